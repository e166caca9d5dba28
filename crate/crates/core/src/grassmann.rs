//! Charts on `X_n = {R ∈ U(n) | Rᵀ = R} ≅ U(n)/O(n)`.
//!
//! Every point is `AᵀA` for some unitary `A`, and `A` is fixed only up to a
//! real orthogonal factor on the left. A unitary `A` centres the chart
//! `U_A = {R | R + AᵀA invertible}`, whose coordinates are real symmetric
//! matrices:
//!
//! ```text
//! φ_A(R) = 2i (E + ĀRĀᵀ)⁻¹ (E − ĀRĀᵀ)
//! ω_A(X) = Aᵀ (E + iX/2)(E − iX/2)⁻¹ A
//! ```
//!
//! For `AB† = α + iβ` the change of chart is
//! `φ_B ∘ ω_A (X) = 2 (α − Xβ/2)⁻¹ (β + Xα/2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{is_symmetric, is_unitary, ComplexMatrix, Tolerance, C64, I, ONE};

pub use crate::sampling::haar_unitary;

const POINT_TOL: f64 = 1e-10;
/// Smallest singular value of `R + R₀` required for chart membership.
pub const CHART_MARGIN: f64 = 1e-8;
/// Largest imaginary residue dropped from a chart image, relative to
/// `max(1, max |entry|)`: near the chart edge the image is large and the
/// rounding in its imaginary part grows with it.
pub const REALNESS_TOL: f64 = 1e-9;

fn project_real(m: &ComplexMatrix) -> Result<RealSymmetric> {
    RealSymmetric::from_complex(m, REALNESS_TOL * m.max_abs().max(1.0))
}

fn tol(x: f64) -> Tolerance {
    Tolerance::absolute(x).expect("positive constant")
}

/// Symmetric unitary matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct SymmetricUnitary {
    matrix: ComplexMatrix,
}

impl SymmetricUnitary {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension("point must be square".into()));
        }
        if !is_unitary(&matrix, tol(POINT_TOL)) {
            return Err(Error::Domain("point is not unitary".into()));
        }
        if !is_symmetric(&matrix, tol(POINT_TOL)) {
            return Err(Error::Domain("point is not symmetric".into()));
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

impl TryFrom<ComplexMatrix> for SymmetricUnitary {
    type Error = Error;

    fn try_from(m: ComplexMatrix) -> Result<Self> {
        Self::new(m)
    }
}

impl From<SymmetricUnitary> for ComplexMatrix {
    fn from(p: SymmetricUnitary) -> Self {
        p.matrix
    }
}

/// Real symmetric `n x n` matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealSymmetric {
    n: usize,
    data: Vec<f64>,
}

impl RealSymmetric {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Dimension(format!(
                "{n}x{n} matrix needs {} entries, got {}",
                n * n,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("entries must be finite".into()));
        }
        for i in 0..n {
            for j in i + 1..n {
                if (data[i * n + j] - data[j * n + i]).abs() > 1e-12 {
                    return Err(Error::Domain(format!("entry ({i}, {j}) breaks symmetry")));
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Takes the real part after checking the imaginary residue is at most
    /// `imag_tol`, then symmetrises after checking asymmetry is at most `imag_tol`.
    pub fn from_complex(m: &ComplexMatrix, imag_tol: f64) -> Result<Self> {
        let n = m.rows();
        if !m.is_square() {
            return Err(Error::Dimension("expected a square matrix".into()));
        }
        let residue = m.max_abs_imag();
        if residue > imag_tol {
            return Err(Error::Numerical(format!(
                "imaginary residue {residue:e} exceeds {imag_tol:e}"
            )));
        }
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (m[(i, j)].re, m[(j, i)].re);
                if (x - y).abs() > imag_tol * (1.0 + x.abs()) {
                    return Err(Error::Numerical(format!(
                        "asymmetry {:e} at ({i}, {j})",
                        (x - y).abs()
                    )));
                }
                data[i * n + j] = 0.5 * (x + y);
            }
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_real(self.n, self.n, &self.data).expect("finite by construction")
    }

    pub fn distance(&self, other: &RealSymmetric) -> f64 {
        if self.n != other.n {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Chart centred at `R₀ = AᵀA`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    base: ComplexMatrix,
    center: ComplexMatrix,
}

impl Chart {
    pub fn new(base: ComplexMatrix) -> Result<Self> {
        if !base.is_square() {
            return Err(Error::Dimension("chart base must be square".into()));
        }
        if !is_unitary(&base, tol(POINT_TOL)) {
            return Err(Error::Domain("chart base is not unitary".into()));
        }
        let center = &base.transpose() * &base;
        Ok(Self { base, center })
    }

    pub fn dim(&self) -> usize {
        self.base.rows()
    }

    pub fn base(&self) -> &ComplexMatrix {
        &self.base
    }

    pub fn center(&self) -> &ComplexMatrix {
        &self.center
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n == self.dim() {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "chart has dimension {}, argument has {n}",
                self.dim()
            )))
        }
    }
}

/// `AᵀA`.
pub fn make_point(a: &ComplexMatrix) -> Result<SymmetricUnitary> {
    if !a.is_square() {
        return Err(Error::Dimension("expected a square matrix".into()));
    }
    if !is_unitary(a, tol(POINT_TOL)) {
        return Err(Error::Domain("matrix is not unitary".into()));
    }
    SymmetricUnitary::new(&a.transpose() * a)
}

/// `σ_min(R + R₀) > CHART_MARGIN`.
pub fn in_chart(r: &SymmetricUnitary, chart: &Chart) -> Result<bool> {
    chart.check_dim(r.dim())?;
    let sum = r.matrix() + chart.center();
    Ok(sum.smallest_singular_value() > CHART_MARGIN)
}

/// `φ_A(R)`; fails with `OutOfChart` when `R ∉ U_A`.
pub fn chart_forward(r: &SymmetricUnitary, chart: &Chart) -> Result<RealSymmetric> {
    if !in_chart(r, chart)? {
        return Err(Error::OutOfChart(
            "R + R0 is singular to working precision".into(),
        ));
    }
    let n = r.dim();
    let abar = chart.base().conj();
    let m = &(&abar * r.matrix()) * &abar.transpose();
    let e = ComplexMatrix::identity(n);
    let phi = (&e + &m).solve(&(&e - &m))?.scale(C64::new(0.0, 2.0));
    project_real(&phi)
}

/// Cayley factor `(E + iX/2)(E − iX/2)⁻¹`.
fn cayley(x: &RealSymmetric) -> Result<ComplexMatrix> {
    let n = x.dim();
    let e = ComplexMatrix::identity(n);
    let half = x.to_complex().scale(I * 0.5);
    // the factors commute, so solving from the left gives the same product
    (&e - &half).solve(&(&e + &half))
}

/// `ω_A(X)`.
pub fn chart_inverse(x: &RealSymmetric, chart: &Chart) -> Result<SymmetricUnitary> {
    chart.check_dim(x.dim())?;
    let a = chart.base();
    let r = &(&a.transpose() * &cayley(x)?) * a;
    SymmetricUnitary::new(r)
}

/// `φ_to ∘ ω_from (X)` by the closed form `2 (α − Xβ/2)⁻¹ (β + Xα/2)`, `α + iβ = A B†`.
pub fn transition(x: &RealSymmetric, from: &Chart, to: &Chart) -> Result<RealSymmetric> {
    from.check_dim(x.dim())?;
    to.check_dim(x.dim())?;
    let point = chart_inverse(x, from)?;
    if !in_chart(&point, to)? {
        return Err(Error::OutOfChart(
            "point is outside the target chart".into(),
        ));
    }
    let u = from.base() * &to.base().dagger();
    let alpha = u.real_part();
    let beta = u.imag_part();
    let xm = x.to_complex();
    let lhs = &alpha - &(&xm * &beta).scale_real(0.5);
    if lhs.smallest_singular_value() <= CHART_MARGIN * lhs.max_abs().max(1.0) {
        return Err(Error::TransitionDomain(
            "alpha - X beta / 2 is singular".into(),
        ));
    }
    let rhs = &beta + &(&xm * &alpha).scale_real(0.5);
    let y = lhs.solve(&rhs)?.scale_real(2.0);
    project_real(&y)
}

/// `R = e^{iθ} R̃` with `θ = arg(det R)/n` (principal branch) and `det R̃ = 1`.
pub fn factor_phase(r: &SymmetricUnitary) -> Result<(C64, SymmetricUnitary)> {
    let n = r.dim();
    let det = r.matrix().determinant()?;
    let theta = det.arg() / n as f64;
    let phase = C64::from_polar(1.0, theta);
    let reduced = SymmetricUnitary::new(r.matrix().scale(phase.conj()))?;
    let check = reduced.matrix().determinant()?;
    if (check - ONE).norm() > 1e-10 {
        return Err(Error::Numerical(format!(
            "reduced determinant off by {:e}",
            (check - ONE).norm()
        )));
    }
    Ok((phase, reduced))
}
