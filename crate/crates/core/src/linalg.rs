//! Small dense complex matrices.
//!
//! Everything here is sized for the 2x2 .. 2^10 x 2^10 matrices the rest of the
//! crate works with. Storage is row-major and values are immutable once built;
//! every operation returns a fresh matrix. The Frobenius norm is the distance
//! used throughout.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Absolute/relative tolerance pair.
///
/// A residual `r` measured against a quantity of size `scale` is accepted when
/// `r <= absolute + relative * scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub absolute: f64,
    pub relative: f64,
}

impl Tolerance {
    /// Threshold used by acceptance predicates.
    pub const ACCEPTANCE: Tolerance = Tolerance {
        absolute: 1e-9,
        relative: 0.0,
    };
    /// Threshold used for algebraic round trips.
    pub const ROUND_TRIP: Tolerance = Tolerance {
        absolute: 1e-12,
        relative: 0.0,
    };

    pub fn new(absolute: f64, relative: f64) -> Result<Self> {
        if !(absolute.is_finite() && relative.is_finite()) || absolute <= 0.0 || relative < 0.0 {
            return Err(Error::Domain(format!(
                "tolerance must be finite with absolute > 0 and relative >= 0, got ({absolute}, {relative})"
            )));
        }
        Ok(Self { absolute, relative })
    }

    pub fn absolute(absolute: f64) -> Result<Self> {
        Self::new(absolute, 0.0)
    }

    pub fn accepts(&self, residual: f64, scale: f64) -> bool {
        residual <= self.absolute + self.relative * scale.abs()
    }
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

/// Wire form: `{rows, cols, re: [...], im: [...]}` with row-major arrays.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(json: MatrixJson) -> Result<Self> {
        if json.re.len() != json.im.len() {
            return Err(Error::Dimension(format!(
                "re has {} entries but im has {}",
                json.re.len(),
                json.im.len()
            )));
        }
        let data = json
            .re
            .iter()
            .zip(&json.im)
            .map(|(&re, &im)| C64::new(re, im))
            .collect();
        ComplexMatrix::new(json.rows, json.cols, data)
    }
}

impl From<ComplexMatrix> for MatrixJson {
    fn from(m: ComplexMatrix) -> Self {
        MatrixJson {
            rows: m.rows,
            cols: m.cols,
            re: m.data.iter().map(|z| z.re).collect(),
            im: m.data.iter().map(|z| z.im).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>10.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries; rejects wrong lengths and non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::Domain(format!(
                "entry {pos} is not finite ({})",
                data[pos]
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub(crate) fn from_vec_unchecked(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_vec_unchecked(rows, cols, vec![ZERO; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_vec_unchecked(rows, cols, data)
    }

    /// Real matrix from row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Square matrix from nested rows. Panics on ragged input; meant for literals.
    pub fn from_rows<const N: usize>(rows: [[C64; N]; N]) -> Self {
        Self::from_fn(N, N, |i, j| rows[i][j])
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { ZERO })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    fn require_square(&self, what: &str) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::Dimension(format!(
                "{what} needs a square matrix, got {}x{}",
                self.rows, self.cols
            )))
        }
    }

    pub fn try_mul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = vec![ZERO; self.rows * rhs.cols];
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let dst = &mut out[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let src = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Ok(Self::from_vec_unchecked(self.rows, rhs.cols, out))
    }

    fn zip_with(&self, rhs: &ComplexMatrix, f: impl Fn(C64, C64) -> C64) -> Result<ComplexMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Dimension(format!(
                "shape {}x{} does not match {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self::from_vec_unchecked(self.rows, self.cols, data))
    }

    pub fn try_add(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> ComplexMatrix {
        Self::from_vec_unchecked(
            self.rows,
            self.cols,
            self.data.iter().map(|&z| f(z)).collect(),
        )
    }

    pub fn scale(&self, s: C64) -> ComplexMatrix {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> ComplexMatrix {
        self.map(|z| z * s)
    }

    pub fn transpose(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> ComplexMatrix {
        self.map(|z| z.conj())
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn real_part(&self) -> ComplexMatrix {
        self.map(|z| C64::new(z.re, 0.0))
    }

    pub fn imag_part(&self) -> ComplexMatrix {
        self.map(|z| C64::new(z.im, 0.0))
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius distance; `f64::INFINITY` when shapes differ.
    pub fn distance(&self, other: &ComplexMatrix) -> f64 {
        match self.try_sub(other) {
            Ok(d) => d.frobenius_norm(),
            Err(_) => f64::INFINITY,
        }
    }

    /// Kronecker product; block `(i, j)` of the result is `self[i][j] * rhs`.
    pub fn kron(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let (p, q, r, s) = (self.rows, self.cols, rhs.rows, rhs.cols);
        let mut data = vec![ZERO; p * r * q * s];
        let out_cols = q * s;
        for i in 0..p {
            for j in 0..q {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..r {
                    let row = (i * r + k) * out_cols + j * s;
                    for l in 0..s {
                        data[row + l] = a * rhs[(k, l)];
                    }
                }
            }
        }
        Self::from_vec_unchecked(p * r, out_cols, data)
    }

    /// Block-diagonal direct sum `self ⊕ rhs`.
    pub fn direct_sum(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let rows = self.rows + rhs.rows;
        let cols = self.cols + rhs.cols;
        Self::from_fn(rows, cols, |i, j| {
            if i < self.rows && j < self.cols {
                self[(i, j)]
            } else if i >= self.rows && j >= self.cols {
                rhs[(i - self.rows, j - self.cols)]
            } else {
                ZERO
            }
        })
    }

    /// Sub-block of size `rows x cols` starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> ComplexMatrix {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    fn lu(&self) -> Result<Lu> {
        let n = self.require_square("LU factorization")?;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = false;
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|i| (i, a[i * n + k].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let factor = a[i * n + k] / pivot;
                a[i * n + k] = factor;
                if factor == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let u = a[k * n + j];
                    a[i * n + j] -= factor * u;
                }
            }
        }
        Ok(Lu {
            n,
            lu: a,
            perm,
            sign,
            singular,
        })
    }

    pub fn determinant(&self) -> Result<C64> {
        let lu = self.lu()?;
        if lu.singular {
            return Ok(ZERO);
        }
        let mut det = C64::new(lu.sign, 0.0);
        for k in 0..lu.n {
            det *= lu.lu[k * lu.n + k];
        }
        Ok(det)
    }

    /// Solves `self * X = rhs`.
    pub fn solve(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        let lu = self.lu()?;
        if rhs.rows != lu.n {
            return Err(Error::Dimension(format!(
                "right-hand side has {} rows, system has {}",
                rhs.rows, lu.n
            )));
        }
        if lu.singular {
            return Err(Error::Numerical("matrix is singular".into()));
        }
        let n = lu.n;
        let m = rhs.cols;
        let mut x: Vec<C64> = Vec::with_capacity(n * m);
        for &p in &lu.perm {
            x.extend_from_slice(&rhs.data[p * m..(p + 1) * m]);
        }
        for i in 0..n {
            for k in 0..i {
                let l = lu.lu[i * n + k];
                if l == ZERO {
                    continue;
                }
                for j in 0..m {
                    let v = x[k * m + j];
                    x[i * m + j] -= l * v;
                }
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = lu.lu[i * n + k];
                if u == ZERO {
                    continue;
                }
                for j in 0..m {
                    let v = x[k * m + j];
                    x[i * m + j] -= u * v;
                }
            }
            let d = lu.lu[i * n + i];
            for j in 0..m {
                x[i * m + j] /= d;
            }
        }
        Ok(Self::from_vec_unchecked(n, m, x))
    }

    pub fn inverse(&self) -> Result<ComplexMatrix> {
        let n = self.require_square("inverse")?;
        self.solve(&Self::identity(n))
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        let m = nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data);
        let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    pub fn smallest_singular_value(&self) -> f64 {
        self.singular_values().last().copied().unwrap_or(0.0)
    }

    /// Householder QR of a square matrix: `self = Q * R` with `Q` unitary and `R` upper triangular.
    pub fn qr(&self) -> Result<(ComplexMatrix, ComplexMatrix)> {
        let n = self.require_square("QR factorization")?;
        let mut r = self.data.clone();
        let mut q = Self::identity(n).data;
        for k in 0..n {
            let norm = (k..n).map(|i| r[i * n + k].norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            let x0 = r[k * n + k];
            let phase = if x0 == ZERO { ONE } else { x0 / x0.norm() };
            let alpha = -phase * norm;
            let mut v: Vec<C64> = (k..n).map(|i| r[i * n + k]).collect();
            v[0] -= alpha;
            let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if vnorm == 0.0 {
                continue;
            }
            for z in &mut v {
                *z /= vnorm;
            }
            // R <- (I - 2 v v^†) R on rows k..n
            for j in 0..n {
                let dot: C64 = v
                    .iter()
                    .enumerate()
                    .map(|(t, vt)| vt.conj() * r[(k + t) * n + j])
                    .sum();
                for (t, vt) in v.iter().enumerate() {
                    r[(k + t) * n + j] -= 2.0 * vt * dot;
                }
            }
            // Q <- Q (I - 2 v v^†) on columns k..n
            for i in 0..n {
                let dot: C64 = v
                    .iter()
                    .enumerate()
                    .map(|(t, vt)| q[i * n + k + t] * vt)
                    .sum();
                for (t, vt) in v.iter().enumerate() {
                    q[i * n + k + t] -= 2.0 * dot * vt.conj();
                }
            }
        }
        for i in 1..n {
            for j in 0..i {
                r[i * n + j] = ZERO;
            }
        }
        Ok((
            Self::from_vec_unchecked(n, n, q),
            Self::from_vec_unchecked(n, n, r),
        ))
    }
}

struct Lu {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of range"
        );
        &self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix difference shape mismatch")
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| acc.kron(f))
}

pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    a.dagger()
}

/// Pauli matrix `σ_j` for `j` in 1..=3.
pub fn pauli(j: usize) -> ComplexMatrix {
    match j {
        1 => ComplexMatrix::from_rows([[ZERO, ONE], [ONE, ZERO]]),
        2 => ComplexMatrix::from_rows([[ZERO, -I], [I, ZERO]]),
        3 => ComplexMatrix::from_rows([[ONE, ZERO], [ZERO, -ONE]]),
        _ => panic!("Pauli index must be 1, 2 or 3, got {j}"),
    }
}

/// `x σ1 + y σ2 + z σ3`.
pub fn pauli_combination(x: f64, y: f64, z: f64) -> ComplexMatrix {
    ComplexMatrix::from_rows([
        [C64::new(z, 0.0), C64::new(x, -y)],
        [C64::new(x, y), C64::new(-z, 0.0)],
    ])
}

/// Walsh-Hadamard matrix, `W σ3 W = σ1`.
pub fn walsh_hadamard() -> ComplexMatrix {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    ComplexMatrix::from_rows([[h, h], [h, -h]])
}

/// `exp(i (x σ1 + y σ2 + z σ3)) = cos r + i sin(r)/r (x σ1 + y σ2 + z σ3)`.
pub fn expm_su2(x: f64, y: f64, z: f64) -> ComplexMatrix {
    let r = (x * x + y * y + z * z).sqrt();
    let sinc = if r < 1e-8 {
        1.0 - r * r / 6.0
    } else {
        r.sin() / r
    };
    let c = C64::new(r.cos(), 0.0);
    let s = I * sinc;
    let h = pauli_combination(x, y, z);
    ComplexMatrix::from_fn(2, 2, |i, j| {
        let diag = if i == j { c } else { ZERO };
        diag + s * h[(i, j)]
    })
}

const PADE_ORDER: usize = 8;

/// Matrix exponential by scaling and squaring with a diagonal Padé kernel.
///
/// The input is scaled by `2^-s` with `s` the smallest count bringing its
/// Frobenius norm to at most 0.5, then the [8/8] Padé approximant is squared
/// back `s` times.
pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.require_square("expm")?;
    let norm = a.frobenius_norm();
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil().max(0.0) as u32;
        while norm / 2f64.powi(squarings as i32) > 0.5 {
            squarings += 1;
        }
    }
    let x = a.scale_real(0.5f64.powi(squarings as i32));

    // c_k = (2q-k)! q! / ((2q)! k! (q-k)!)
    let mut coeffs = [0.0; PADE_ORDER + 1];
    coeffs[0] = 1.0;
    for k in 1..=PADE_ORDER {
        coeffs[k] =
            coeffs[k - 1] * (PADE_ORDER + 1 - k) as f64 / (k * (2 * PADE_ORDER + 1 - k)) as f64;
    }

    let mut numer = ComplexMatrix::identity(n);
    let mut denom = ComplexMatrix::identity(n);
    let mut power = ComplexMatrix::identity(n);
    for (k, &c) in coeffs.iter().enumerate().skip(1) {
        power = &power * &x;
        let term = power.scale_real(c);
        numer = &numer + &term;
        denom = if k % 2 == 0 {
            &denom + &term
        } else {
            &denom - &term
        };
    }
    let mut out = denom.solve(&numer)?;
    for _ in 0..squarings {
        out = &out * &out;
    }
    Ok(out)
}

fn unitarity_defect(a: &ComplexMatrix) -> f64 {
    let gram = &a.dagger() * a;
    gram.distance(&ComplexMatrix::identity(a.rows))
}

/// `‖A†A − E‖_F ≤ tol`.
pub fn is_unitary(a: &ComplexMatrix, tol: Tolerance) -> bool {
    a.is_square() && tol.accepts(unitarity_defect(a), 0.0)
}

/// Real entries (imaginary parts within `tol`) and `AᵀA = E` within `tol`.
pub fn is_real_orthogonal(a: &ComplexMatrix, tol: Tolerance) -> bool {
    if !a.is_square() || !tol.accepts(a.max_abs_imag(), 0.0) {
        return false;
    }
    let re = a.real_part();
    let gram = &re.transpose() * &re;
    tol.accepts(gram.distance(&ComplexMatrix::identity(a.rows)), 0.0)
}

/// `|det A − 1| ≤ tol`.
pub fn is_special(a: &ComplexMatrix, tol: Tolerance) -> bool {
    match a.determinant() {
        Ok(d) => tol.accepts((d - ONE).norm(), 0.0),
        Err(_) => false,
    }
}

/// `Aᵀ = −A` and imaginary parts within `tol`.
pub fn is_real_antisymmetric(a: &ComplexMatrix, tol: Tolerance) -> bool {
    a.is_square()
        && tol.accepts(a.max_abs_imag(), 0.0)
        && tol.accepts((&a.transpose() + a).frobenius_norm(), 0.0)
}

/// `‖Aᵀ − A‖_F ≤ tol`.
pub fn is_symmetric(a: &ComplexMatrix, tol: Tolerance) -> bool {
    a.is_square() && tol.accepts(a.distance(&a.transpose()), 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn taylor_expm(a: &ComplexMatrix, terms: usize) -> ComplexMatrix {
        let n = a.rows();
        let mut sum = ComplexMatrix::identity(n);
        let mut term = ComplexMatrix::identity(n);
        for k in 1..terms {
            term = (&term * a).scale_real(1.0 / k as f64);
            sum = &sum + &term;
        }
        sum
    }

    #[test]
    fn kron_identity_and_sigma3() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let expect = ComplexMatrix::diagonal(&[ONE, ONE, -ONE, -ONE]);
        assert_eq!(kron(&pauli(3), &i2), expect);
    }

    #[test]
    fn kron_matches_quadruple_loop() {
        let a =
            ComplexMatrix::from_rows([[c(1.0, 2.0), c(-0.5, 0.0)], [c(0.0, 3.0), c(2.5, -1.0)]]);
        let b =
            ComplexMatrix::from_rows([[c(0.3, 0.1), c(0.0, -2.0)], [c(4.0, 0.0), c(-1.0, 1.0)]]);
        let k = kron(&a, &b);
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..2 {
                    for q in 0..2 {
                        assert_eq!(k[(2 * i + p, 2 * j + q)], a[(i, j)] * b[(p, q)]);
                    }
                }
            }
        }
    }

    #[test]
    fn kron_of_rectangular_factors() {
        let a = ComplexMatrix::from_real(1, 2, &[1.0, 2.0]).unwrap();
        let b = ComplexMatrix::from_real(2, 1, &[3.0, 4.0]).unwrap();
        let k = kron(&a, &b);
        assert_eq!((k.rows(), k.cols()), (2, 2));
        assert_eq!(
            k,
            ComplexMatrix::from_real(2, 2, &[3.0, 6.0, 4.0, 8.0]).unwrap()
        );
    }

    #[test]
    fn dagger_examples() {
        assert_eq!(dagger(&pauli(2)), pauli(2));
        let ii = ComplexMatrix::identity(2).scale(I);
        assert_eq!(dagger(&ii), ComplexMatrix::identity(2).scale(-I));
    }

    #[test]
    fn expm_su2_examples() {
        assert_eq!(expm_su2(0.0, 0.0, 0.0), ComplexMatrix::identity(2));
        let oracle = taylor_expm(&pauli(1).scale(I * PI), 40);
        let got = expm_su2(PI, 0.0, 0.0);
        assert!(got.distance(&oracle) < 1e-12);
        assert!(got.distance(&ComplexMatrix::identity(2).scale_real(-1.0)) < 1e-15);
        let oracle = taylor_expm(&pauli(3).scale(I * PI / 2.0), 40);
        let got = expm_su2(0.0, 0.0, PI / 2.0);
        assert!(got.distance(&oracle) < 1e-12);
        assert!(got.distance(&ComplexMatrix::diagonal(&[I, -I])) < 1e-15);
    }

    #[test]
    fn expm_examples() {
        assert_eq!(
            expm(&ComplexMatrix::zeros(4, 4)).unwrap(),
            ComplexMatrix::identity(4)
        );
        let d = expm(&ComplexMatrix::diagonal(&[ONE, c(2.0, 0.0)])).unwrap();
        let e = std::f64::consts::E;
        assert!(d.distance(&ComplexMatrix::diagonal(&[c(e, 0.0), c(e * e, 0.0)])) < 1e-13);
        let via_pade = expm(&pauli(1).scale(I)).unwrap();
        assert!(via_pade.distance(&expm_su2(1.0, 0.0, 0.0)) < 1e-14);
    }

    #[test]
    fn expm_rejects_non_square() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(expm(&m), Err(Error::Dimension(_))));
    }

    #[test]
    fn expm_large_norm_matches_taylor() {
        // norm ~ 6 forces several squarings
        let a =
            ComplexMatrix::from_rows([[c(0.0, 3.0), c(1.0, 0.5)], [c(-1.0, 0.5), c(0.5, -2.0)]]);
        assert!(expm(&a).unwrap().distance(&taylor_expm(&a, 80)) < 1e-10);
    }

    #[test]
    fn membership_predicates() {
        let tol = Tolerance::ACCEPTANCE;
        assert!(is_unitary(&ComplexMatrix::identity(4), tol));
        assert!(is_real_orthogonal(&pauli(1), tol));
        assert!(!is_real_orthogonal(&pauli(2), tol));
        assert!(!is_special(&pauli(1), tol));
        assert!(is_special(&ComplexMatrix::identity(3), tol));
        let skew = ComplexMatrix::from_real(2, 2, &[0.0, 1.5, -1.5, 0.0]).unwrap();
        assert!(is_real_antisymmetric(&skew, tol));
        assert!(!is_real_antisymmetric(&skew.scale(I), tol));
        assert!(!is_unitary(&ComplexMatrix::zeros(2, 3), tol));
    }

    #[test]
    fn constructor_validates() {
        assert!(matches!(
            ComplexMatrix::new(2, 2, vec![ONE; 3]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]),
            Err(Error::Domain(_))
        ));
        assert!(Tolerance::new(0.0, 0.0).is_err());
        assert!(Tolerance::new(1e-9, f64::INFINITY).is_err());
    }

    #[test]
    fn determinant_and_inverse() {
        let a = ComplexMatrix::from_rows([
            [c(2.0, 1.0), c(0.0, 1.0), c(1.0, 0.0)],
            [c(1.0, 0.0), c(3.0, 0.0), c(0.0, -2.0)],
            [c(0.0, 0.0), c(1.0, 1.0), c(1.0, 0.0)],
        ]);
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).distance(&ComplexMatrix::identity(3)) < 1e-14);
        // cofactor expansion along the first row
        let m = |i: usize, j: usize| a[(i, j)];
        let det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
            - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
            + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
        assert!((a.determinant().unwrap() - det).norm() < 1e-13);
        let singular = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert_eq!(singular.determinant().unwrap(), ZERO);
        assert!(singular.inverse().is_err());
    }

    #[test]
    fn qr_reconstructs() {
        let a = ComplexMatrix::from_rows([
            [c(1.0, 2.0), c(0.0, 1.0), c(-1.0, 0.5)],
            [c(0.5, 0.0), c(3.0, -1.0), c(0.0, -2.0)],
            [c(0.0, 0.0), c(1.0, 1.0), c(1.0, 0.0)],
        ]);
        let (q, r) = a.qr().unwrap();
        assert!(is_unitary(&q, Tolerance::ROUND_TRIP));
        assert!((&q * &r).distance(&a) < 1e-13);
        for i in 1..3 {
            for j in 0..i {
                assert_eq!(r[(i, j)], ZERO);
            }
        }
    }

    #[test]
    fn singular_values_of_diagonal() {
        let d = ComplexMatrix::diagonal(&[c(0.0, 3.0), c(-1.0, 0.0), c(0.5, 0.0)]);
        let sv = d.singular_values();
        assert!((sv[0] - 3.0).abs() < 1e-14 && (sv[2] - 0.5).abs() < 1e-14);
        assert!((d.smallest_singular_value() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn json_shape() {
        let m = ComplexMatrix::from_rows([[ONE, I], [ZERO, -ONE]]);
        let v = serde_json::to_value(&m).unwrap();
        assert_eq!(v["rows"], 2);
        assert_eq!(v["re"], serde_json::json!([1.0, 0.0, 0.0, -1.0]));
        assert_eq!(v["im"], serde_json::json!([0.0, 1.0, 0.0, 0.0]));
        let back: ComplexMatrix = serde_json::from_value(v).unwrap();
        assert_eq!(back, m);
        let bad = serde_json::json!({"rows": 2, "cols": 2, "re": [1.0], "im": [0.0]});
        assert!(serde_json::from_value::<ComplexMatrix>(bad).is_err());
    }
}
