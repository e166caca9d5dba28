//! The spin map `ρ : SU(2) → SO(3)` and its lift through `SO(4)`.
//!
//! Embedding `SO(3)` in `SO(4)` as `1 ⊕ O` and pulling back through the
//! intertwiner gives `ι̃(g) = R(1 ⊕ ρ(g))R†`, which equals
//! `(1 ⊗ σ2)(g ⊗ g)(1 ⊗ σ2)†`. Read the other way this is the decomposition
//! of the tensor square of spin 1/2 into spin 0 plus spin 1.

use serde::{Deserialize, Serialize};

use crate::bell::r_canonical2;
use crate::error::{Error, Result};
use crate::linalg::{is_real_orthogonal, pauli, ComplexMatrix, Tolerance, C64};

/// Norm slack accepted (and then normalised away) on construction.
pub const NORM_SLACK: f64 = 1e-9;

/// `g = [[a+ib, c+id], [−c+id, a−ib]]` with `a² + b² + c² + d² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SU2Element {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl SU2Element {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let norm = (a * a + b * b + c * c + d * d).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_SLACK {
            return Err(Error::Domain(format!(
                "SU(2) parameters need unit norm, got {norm}"
            )));
        }
        Ok(Self {
            a: a / norm,
            b: b / norm,
            c: c / norm,
            d: d / norm,
        })
    }

    pub fn identity() -> Self {
        Self {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: 0.0,
        }
    }

    pub fn from_quaternion(q: [f64; 4]) -> Result<Self> {
        Self::new(q[0], q[1], q[2], q[3])
    }

    /// Reads `(a, b, c, d)` from the first row of a special unitary 2x2 matrix.
    pub fn from_matrix(m: &ComplexMatrix) -> Result<Self> {
        if m.rows() != 2 || m.cols() != 2 {
            return Err(Error::Dimension("SU(2) element must be 2x2".into()));
        }
        let g = Self::new(m[(0, 0)].re, m[(0, 0)].im, m[(0, 1)].re, m[(0, 1)].im)?;
        if g.to_matrix().distance(m) > 1e-9 {
            return Err(Error::Domain("matrix is not of SU(2) form".into()));
        }
        Ok(g)
    }

    pub fn components(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_rows([
            [C64::new(self.a, self.b), C64::new(self.c, self.d)],
            [C64::new(-self.c, self.d), C64::new(self.a, -self.b)],
        ])
    }

    /// Group product `self · other`.
    pub fn compose(&self, other: &SU2Element) -> SU2Element {
        let m = &self.to_matrix() * &other.to_matrix();
        let (p, q) = (m[(0, 0)], m[(0, 1)]);
        Self::new(p.re, p.im, q.re, q.im).expect("product of unit quaternions")
    }

    pub fn negated(&self) -> SU2Element {
        Self {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
        }
    }
}

/// The 3x3 rotation `ρ(g)` with `g τ_j g⁻¹ = Σ_k ρ(g)_{kj} τ_k`, `τ_j = σ_j / 2`.
pub fn rho(g: &SU2Element) -> ComplexMatrix {
    let [a, b, c, d] = g.components();
    let m = [
        [
            1.0 - 2.0 * (b * b + c * c),
            2.0 * (a * b + c * d),
            -2.0 * (a * c - b * d),
        ],
        [
            -2.0 * (a * b - c * d),
            1.0 - 2.0 * (b * b + d * d),
            2.0 * (a * d + b * c),
        ],
        [
            2.0 * (a * c + b * d),
            -2.0 * (a * d - b * c),
            1.0 - 2.0 * (c * c + d * d),
        ],
    ];
    ComplexMatrix::from_fn(3, 3, |i, j| C64::new(m[i][j], 0.0))
}

/// `1 ⊕ O`.
pub fn iota(o: &ComplexMatrix) -> Result<ComplexMatrix> {
    if o.rows() != 3 || o.cols() != 3 {
        return Err(Error::Dimension(format!(
            "expected a 3x3 matrix, got {}x{}",
            o.rows(),
            o.cols()
        )));
    }
    if !is_real_orthogonal(o, Tolerance::ACCEPTANCE) {
        return Err(Error::Domain("matrix is not real orthogonal".into()));
    }
    Ok(ComplexMatrix::identity(1).direct_sum(o))
}

/// `R (1 ⊕ ρ(g)) R†` with the canonical intertwiner.
pub fn iota_tilde(g: &SU2Element) -> ComplexMatrix {
    let r = r_canonical2().into_matrix();
    let embedded = ComplexMatrix::identity(1).direct_sum(&rho(g));
    &(&r * &embedded) * &r.dagger()
}

fn one_sigma2() -> ComplexMatrix {
    ComplexMatrix::identity(2).kron(&pauli(2))
}

/// `(1 ⊗ σ2)(g ⊗ g)(1 ⊗ σ2)†`.
pub fn twisted_tensor_square(g: &SU2Element) -> ComplexMatrix {
    let k = one_sigma2();
    let m = g.to_matrix();
    &(&k * &m.kron(&m)) * &k.dagger()
}

/// `‖1 ⊕ ρ(g) − K(g ⊗ g)K†‖_F` with `K = R†(1 ⊗ σ2)`.
pub fn clebsch_check(g: &SU2Element) -> f64 {
    let k = &r_canonical2().into_matrix().dagger() * &one_sigma2();
    let m = g.to_matrix();
    let reduced = &(&k * &m.kron(&m)) * &k.dagger();
    let embedded = ComplexMatrix::identity(1).direct_sum(&rho(g));
    reduced.distance(&embedded)
}
