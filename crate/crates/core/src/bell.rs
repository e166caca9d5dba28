//! Bell bases and the phase-decorated intertwiner `R`.
//!
//! For `n` qubits the Bell basis pairs each computational state `|0 a⟩` with
//! its full complement `|1 ā⟩`. `R` stacks the phased Bell states as columns.
//! With the canonical two-qubit phases, conjugation by `R` carries
//! `SU(2) ⊗ SU(2)` onto `SO(4)`: `F(A ⊗ B) = R†(A ⊗ B)R`.
//!
//! Qubit labels are big-endian: `|q0 q1 … q_{n-1}⟩` sits at index
//! `q0 2^{n-1} + … + q_{n-1}`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    expm_su2, is_real_orthogonal, is_special, is_unitary, kron_all, pauli, pauli_combination,
    walsh_hadamard, ComplexMatrix, Tolerance, C64, I, ONE, ZERO,
};

/// Largest supported qubit count.
pub const MAX_QUBITS: usize = 10;

pub fn check_qubits(n: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::Bounds(format!(
            "qubit count must be in 1..={MAX_QUBITS}, got {n}"
        )))
    }
}

/// Nonzero pattern of one Bell column: `(|low⟩ + sign |high⟩)/√2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct BellColumn {
    pub low: usize,
    pub high: usize,
    pub sign: f64,
}

pub(crate) fn bell_columns(n: usize) -> Vec<BellColumn> {
    let dim = 1usize << n;
    let half = dim / 2;
    let mut cols = vec![
        BellColumn {
            low: 0,
            high: 0,
            sign: 0.0
        };
        dim
    ];
    for k in 0..half {
        // |0 a⟩ has index k; its complement |1 ā⟩ has index 2^n - 1 - k
        let low = k;
        let high = dim - 1 - k;
        cols[k] = BellColumn {
            low,
            high,
            sign: 1.0,
        };
        cols[dim - 1 - k] = BellColumn {
            low,
            high,
            sign: -1.0,
        };
    }
    cols
}

/// The `2^n` Bell states, in column order `Ψ_1 … Ψ_{2^n}`.
pub fn bell_basis(n: usize) -> Result<Vec<Vec<C64>>> {
    check_qubits(n)?;
    let dim = 1usize << n;
    Ok(bell_columns(n)
        .into_iter()
        .map(|col| {
            let mut v = vec![ZERO; dim];
            v[col.low] = C64::new(FRAC_1_SQRT_2, 0.0);
            v[col.high] = C64::new(col.sign * FRAC_1_SQRT_2, 0.0);
            v
        })
        .collect())
}

/// Phases `θ_1 … θ_{2^n}` decorating the Bell columns, reduced to `[0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseVector {
    n: usize,
    theta: Vec<f64>,
}

fn reduce_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl PhaseVector {
    pub fn new(n: usize, theta: Vec<f64>) -> Result<Self> {
        check_qubits(n)?;
        if theta.len() != 1 << n {
            return Err(Error::Dimension(format!(
                "{n} qubits need {} phases, got {}",
                1usize << n,
                theta.len()
            )));
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::Domain("phases must be finite".into()));
        }
        Ok(Self {
            n,
            theta: theta.into_iter().map(reduce_angle).collect(),
        })
    }

    /// Infers `n` from the length, which must be a power of two `>= 2`.
    pub fn from_angles(theta: Vec<f64>) -> Result<Self> {
        let len = theta.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Dimension(format!(
                "phase count must be 2^n with n >= 1, got {len}"
            )));
        }
        Self::new(len.trailing_zeros() as usize, theta)
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, vec![0.0; 1 << n])
    }

    /// Two-qubit phases `(0, −π/2, π, −π/2)`, i.e. `e^{iθ} = (1, −i, −1, −i)`.
    pub fn canonical2() -> Self {
        Self::new(2, vec![0.0, -FRAC_PI_2, PI, -FRAC_PI_2]).expect("valid by construction")
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn angles(&self) -> &[f64] {
        &self.theta
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn phase(&self, j: usize) -> C64 {
        C64::from_polar(1.0, self.theta[j])
    }

    /// Adds `c` to every phase.
    pub fn shifted(&self, c: f64) -> Self {
        Self::new(self.n, self.theta.iter().map(|t| t + c).collect()).expect("same shape")
    }
}

/// A `2^n x 2^n` unitary whose `j`-th column is `e^{iθ_j} |Ψ_j⟩`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntertwinerMatrix {
    n: usize,
    matrix: ComplexMatrix,
}

impl IntertwinerMatrix {
    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

pub fn r_matrix(phases: &PhaseVector) -> IntertwinerMatrix {
    let n = phases.qubits();
    let dim = 1usize << n;
    let mut data = vec![ZERO; dim * dim];
    for (j, col) in bell_columns(n).into_iter().enumerate() {
        let p = phases.phase(j) * FRAC_1_SQRT_2;
        data[col.low * dim + j] = p;
        data[col.high * dim + j] = p * col.sign;
    }
    IntertwinerMatrix {
        n,
        matrix: ComplexMatrix::from_vec_unchecked(dim, dim, data),
    }
}

/// The two-qubit intertwiner at the canonical phases, with exact entries.
pub fn r_canonical2() -> IntertwinerMatrix {
    let h = FRAC_1_SQRT_2;
    let p = C64::new(h, 0.0);
    let ip = C64::new(0.0, h);
    let z = ZERO;
    IntertwinerMatrix {
        n: 2,
        matrix: ComplexMatrix::from_rows([
            [p, z, z, -ip],
            [z, -ip, -p, z],
            [z, -ip, p, z],
            [p, z, z, ip],
        ]),
    }
}

/// Traceless Hermitian 2x2 matrix `a1 σ1 + a2 σ2 + a3 σ3`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TracelessHermitian2 {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl TracelessHermitian2 {
    pub fn new(a1: f64, a2: f64, a3: f64) -> Self {
        Self { a1, a2, a3 }
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        pauli_combination(self.a1, self.a2, self.a3)
    }

    /// Euclidean length of the coefficient triple.
    pub fn norm(&self) -> f64 {
        (self.a1 * self.a1 + self.a2 * self.a2 + self.a3 * self.a3).sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(s * self.a1, s * self.a2, s * self.a3)
    }

    /// `exp(i self)` via the closed SU(2) formula.
    pub fn exp_i(&self) -> ComplexMatrix {
        expm_su2(self.a1, self.a2, self.a3)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.a1, self.a2, self.a3]
    }
}

/// Element of so(4) stored by its upper-triangle entries.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct So4Element {
    pub f12: f64,
    pub f13: f64,
    pub f14: f64,
    pub f23: f64,
    pub f24: f64,
    pub f34: f64,
}

impl So4Element {
    /// Components in the order `(f12, f13, f14, f23, f24, f34)`.
    pub fn from_array(f: [f64; 6]) -> Self {
        Self {
            f12: f[0],
            f13: f[1],
            f14: f[2],
            f23: f[3],
            f24: f[4],
            f34: f[5],
        }
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.f12, self.f13, self.f14, self.f23, self.f24, self.f34]
    }

    /// The 4x4 real antisymmetric matrix.
    pub fn to_matrix(&self) -> ComplexMatrix {
        const UPPER: [[usize; 4]; 4] = [[6, 0, 1, 2], [0, 6, 3, 4], [1, 3, 6, 5], [2, 4, 5, 6]];
        let f = self.as_array();
        ComplexMatrix::from_fn(4, 4, |i, j| {
            let v = match i.cmp(&j) {
                std::cmp::Ordering::Less => f[UPPER[i][j]],
                std::cmp::Ordering::Greater => -f[UPPER[i][j]],
                std::cmp::Ordering::Equal => 0.0,
            };
            C64::new(v, 0.0)
        })
    }

    /// Reads the upper triangle of a 4x4 matrix after checking it is real antisymmetric.
    pub fn from_matrix(m: &ComplexMatrix, tol: Tolerance) -> Result<Self> {
        if m.rows() != 4 || m.cols() != 4 {
            return Err(Error::Dimension(format!(
                "so(4) element needs a 4x4 matrix, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if !crate::linalg::is_real_antisymmetric(m, tol) {
            return Err(Error::Domain("matrix is not real antisymmetric".into()));
        }
        Ok(Self::from_array([
            m[(0, 1)].re,
            m[(0, 2)].re,
            m[(0, 3)].re,
            m[(1, 2)].re,
            m[(1, 3)].re,
            m[(2, 3)].re,
        ]))
    }
}

fn check_su2(m: &ComplexMatrix, name: &str) -> Result<()> {
    if m.rows() != 2 || m.cols() != 2 {
        return Err(Error::Dimension(format!(
            "{name} must be 2x2, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let tol = Tolerance::ACCEPTANCE;
    if !(is_unitary(m, tol) && is_special(m, tol)) {
        return Err(Error::Domain(format!("{name} is not special unitary")));
    }
    Ok(())
}

/// `F(A ⊗ B) = R†(A ⊗ B)R` with the canonical `R`; lands in `SO(4)`.
pub fn group_map(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_su2(a, "A")?;
    check_su2(b, "B")?;
    let r = r_canonical2().into_matrix();
    Ok(&(&r.dagger() * &a.kron(b)) * &r)
}

/// Closed form of `iR†(a ⊗ 1 + 1 ⊗ b)R` at the canonical phases.
pub fn algebra_map(a: &TracelessHermitian2, b: &TracelessHermitian2) -> So4Element {
    So4Element {
        f12: a.a1 + b.a1,
        f13: a.a2 - b.a2,
        f14: a.a3 + b.a3,
        f23: a.a3 - b.a3,
        f24: -(a.a2 + b.a2),
        f34: a.a1 - b.a1,
    }
}

/// `iR†(a ⊗ 1 + 1 ⊗ b)R` evaluated by explicit matrix products for any `R`.
pub fn conjugated_generator(
    r: &ComplexMatrix,
    a: &TracelessHermitian2,
    b: &TracelessHermitian2,
) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    let gen = &a.to_matrix().kron(&id) + &id.kron(&b.to_matrix());
    (&(&r.dagger() * &gen) * r).scale(I)
}

/// Inverse of [`algebra_map`].
pub fn inverse_algebra_map(f: &So4Element) -> (TracelessHermitian2, TracelessHermitian2) {
    let a = TracelessHermitian2::new(
        (f.f12 + f.f34) / 2.0,
        (f.f13 - f.f24) / 2.0,
        (f.f14 + f.f23) / 2.0,
    );
    let b = TracelessHermitian2::new(
        (f.f12 - f.f34) / 2.0,
        -(f.f13 + f.f24) / 2.0,
        (f.f14 - f.f23) / 2.0,
    );
    (a, b)
}

const RECONSTRUCTION_LIMIT: f64 = 1e-6;

/// Recovers `(A, B)` in `SU(2) x SU(2)` with `group_map(A, B) = O`.
///
/// `(A, B)` and `(−A, −B)` have the same image. The representative returned
/// has the first nonzero entry of `A` (row-major) with positive real part, or
/// zero real part and nonnegative imaginary part.
pub fn inverse_group_map(o: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if o.rows() != 4 || o.cols() != 4 {
        return Err(Error::Dimension(format!(
            "expected a 4x4 matrix, got {}x{}",
            o.rows(),
            o.cols()
        )));
    }
    let tol = Tolerance::ACCEPTANCE;
    if !(is_real_orthogonal(o, tol) && is_special(o, tol)) {
        return Err(Error::Domain("matrix is not in SO(4)".into()));
    }
    let r = r_canonical2().into_matrix();
    let m = &(&r * o) * &r.dagger();

    // m = A ⊗ B; block (i, j) of m is A_ij B
    let blocks: Vec<ComplexMatrix> = (0..4)
        .map(|t| m.block(2 * (t / 2), 2 * (t % 2), 2, 2))
        .collect();
    let pivot = (0..4)
        .max_by(|&x, &y| {
            blocks[x]
                .frobenius_norm()
                .total_cmp(&blocks[y].frobenius_norm())
        })
        .expect("four blocks");
    let b_scaled = &blocks[pivot];
    let denom = b_scaled.frobenius_norm().powi(2);
    // A_ij / A_pivot = ⟨B_scaled, block_ij⟩ / ⟨B_scaled, B_scaled⟩
    let a_rel = ComplexMatrix::from_fn(2, 2, |i, j| {
        let blk = &blocks[2 * i + j];
        let inner: C64 = b_scaled
            .entries()
            .iter()
            .zip(blk.entries())
            .map(|(x, y)| x.conj() * y)
            .sum();
        inner / denom
    });
    let det = a_rel.determinant()?;
    let s = ONE / det.sqrt();
    let mut a = a_rel.scale(s);
    let mut b = b_scaled.scale(ONE / s);

    let lead = a
        .entries()
        .iter()
        .copied()
        .find(|z| z.norm() > 1e-12)
        .unwrap_or(ONE);
    let flip = lead.re < -1e-12 || (lead.re.abs() <= 1e-12 && lead.im < 0.0);
    if flip {
        a = -&a;
        b = -&b;
    }

    let check = &(&r.dagger() * &a.kron(&b)) * &r;
    let residual = check.distance(o);
    if residual > RECONSTRUCTION_LIMIT {
        return Err(Error::Reconstruction(residual));
    }
    Ok((a, b))
}

fn sigma_string(n: usize, first: &ComplexMatrix, rest: &ComplexMatrix) -> ComplexMatrix {
    let mut factors = vec![first.clone()];
    factors.extend(std::iter::repeat_n(rest.clone(), n - 1));
    kron_all(&factors)
}

/// `‖R(σ3 ⊗ 1 ⊗ … ⊗ 1)R† − σ1 ⊗ … ⊗ σ1‖_F`.
pub fn sigma3_characterization(phases: &PhaseVector) -> f64 {
    let n = phases.qubits();
    let r = r_matrix(phases).into_matrix();
    let lhs = &(&r * &sigma_string(n, &pauli(3), &ComplexMatrix::identity(2))) * &r.dagger();
    let rhs = kron_all(&vec![pauli(1); n]);
    lhs.distance(&rhs)
}

/// `R (W ⊗ 1 ⊗ … ⊗ 1)` for the given phases; copies `σ1` on the first qubit to every qubit.
pub fn copy_operator_with(phases: &PhaseVector) -> ComplexMatrix {
    let n = phases.qubits();
    let r = r_matrix(phases).into_matrix();
    &r * &sigma_string(n, &walsh_hadamard(), &ComplexMatrix::identity(2))
}

/// Copy operator with all phases zero.
pub fn copy_operator(n: usize) -> Result<ComplexMatrix> {
    Ok(copy_operator_with(&PhaseVector::zeros(n)?))
}

/// `‖C(σ1 ⊗ 1 ⊗ … ⊗ 1)C† − σ1^{⊗n}‖_F` for `C = copy_operator_with(phases)`.
pub fn copy_residual(phases: &PhaseVector) -> f64 {
    let n = phases.qubits();
    let c = copy_operator_with(phases);
    let lhs = &(&c * &sigma_string(n, &pauli(1), &ComplexMatrix::identity(2))) * &c.dagger();
    lhs.distance(&kron_all(&vec![pauli(1); n]))
}
