//! Abelian field strengths in four dimensions and three actions on them.
//!
//! With `ℱ` the 4x4 antisymmetric curvature matrix and `g` the coupling:
//!
//! * Maxwell: `½ tr (gℱ)² = −g² Σ_{i<j} F_ij²`
//! * Born-Infeld: `√det(1 + gℱ)`
//! * universal Yang-Mills: `tr e^{gℱ}`
//!
//! Conjugating by the canonical intertwiner splits `ℱ` into
//! `i(a ⊗ 1 + 1 ⊗ b)`, so `tr e^{gℱ} = tr e^{iga} · tr e^{igb}
//! = 4 cos(g X_asd) cos(g X_sd)` with `X_asd = |a|` and `X_sd = |b|`.
//! `X_sd` vanishes exactly on self-dual configurations and `X_asd` on
//! anti-self-dual ones.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bell::{inverse_algebra_map, So4Element, TracelessHermitian2};
use crate::error::{Error, Result};
use crate::linalg::{expm, ComplexMatrix, C64, I};

/// Imaginary residue tolerated in `tr e^{gℱ}` before it is discarded.
pub const TRACE_RESIDUE_TOL: f64 = 1e-10;
/// Threshold below which an invariant counts as zero.
pub const DUALITY_TOL: f64 = 1e-12;

/// Field strength `(F12, F13, F14, F23, F24, F34)` and coupling `g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureConfig {
    pub f: [f64; 6],
    pub g: f64,
}

impl CurvatureConfig {
    pub fn new(f: [f64; 6], g: f64) -> Result<Self> {
        if f.iter().chain(std::iter::once(&g)).any(|x| !x.is_finite()) {
            return Err(Error::Domain(
                "curvature and coupling must be finite".into(),
            ));
        }
        Ok(Self { f, g })
    }

    pub fn f12(&self) -> f64 {
        self.f[0]
    }
    pub fn f13(&self) -> f64 {
        self.f[1]
    }
    pub fn f14(&self) -> f64 {
        self.f[2]
    }
    pub fn f23(&self) -> f64 {
        self.f[3]
    }
    pub fn f24(&self) -> f64 {
        self.f[4]
    }
    pub fn f34(&self) -> f64 {
        self.f[5]
    }

    fn components(&self) -> So4Element {
        So4Element::from_array(self.f)
    }
}

/// The antisymmetric 4x4 matrix `ℱ` (without the coupling).
pub fn curvature_matrix(c: &CurvatureConfig) -> ComplexMatrix {
    c.components().to_matrix()
}

/// `−g² Σ_{i<j} F_ij²`.
pub fn action_ym(c: &CurvatureConfig) -> f64 {
    0.0 - c.g * c.g * c.f.iter().map(|x| x * x).sum::<f64>()
}

/// `½ tr (gℱ)²` by matrix multiplication.
pub fn action_ym_trace(c: &CurvatureConfig) -> f64 {
    let m = curvature_matrix(c).scale_real(c.g);
    0.5 * (&m * &m).trace().re
}

/// `√det(1 + gℱ)`.
pub fn action_bi(c: &CurvatureConfig) -> Result<f64> {
    let m = &ComplexMatrix::identity(4) + &curvature_matrix(c).scale_real(c.g);
    let det = m.determinant()?.re;
    if det < -1e-12 {
        return Err(Error::Numerical(format!(
            "det(1 + gF) = {det:e} is negative"
        )));
    }
    Ok(det.max(0.0).sqrt())
}

/// Self-dual and anti-self-dual invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdAsdInvariants {
    pub x_sd: f64,
    pub x_asd: f64,
}

impl SdAsdInvariants {
    pub fn is_self_dual(&self) -> bool {
        self.x_sd <= DUALITY_TOL
    }

    pub fn is_anti_self_dual(&self) -> bool {
        self.x_asd <= DUALITY_TOL
    }
}

pub fn sd_asd_invariants(c: &CurvatureConfig) -> SdAsdInvariants {
    let [f12, f13, f14, f23, f24, f34] = c.f;
    let sd = (f12 - f34).powi(2) + (f13 + f24).powi(2) + (f14 - f23).powi(2);
    let asd = (f12 + f34).powi(2) + (f13 - f24).powi(2) + (f14 + f23).powi(2);
    SdAsdInvariants {
        x_sd: 0.5 * sd.sqrt(),
        x_asd: 0.5 * asd.sqrt(),
    }
}

/// `4 cos(g X_asd) cos(g X_sd)`.
pub fn action_fos(c: &CurvatureConfig) -> f64 {
    let inv = sd_asd_invariants(c);
    4.0 * (c.g * inv.x_asd).cos() * (c.g * inv.x_sd).cos()
}

/// `tr expm(gℱ)` computed with the general matrix exponential.
pub fn action_fos_direct(c: &CurvatureConfig) -> Result<f64> {
    let tr = expm(&curvature_matrix(c).scale_real(c.g))?.trace();
    real_trace(tr)
}

fn real_trace(tr: C64) -> Result<f64> {
    if tr.im.abs() > TRACE_RESIDUE_TOL {
        return Err(Error::Numerical(format!(
            "trace has imaginary residue {:e}",
            tr.im
        )));
    }
    Ok(tr.re)
}

/// `(a, b)` with `RℱR† = i(a ⊗ 1 + 1 ⊗ b)`.
pub fn decompose(c: &CurvatureConfig) -> (TracelessHermitian2, TracelessHermitian2) {
    inverse_algebra_map(&c.components())
}

/// `tr e^{iga} · tr e^{igb}` through the closed SU(2) exponential.
pub fn action_fos_factorized(c: &CurvatureConfig) -> C64 {
    let (a, b) = decompose(c);
    a.scaled(c.g).exp_i().trace() * b.scaled(c.g).exp_i().trace()
}

/// `4 cosh(g Y_asd) cosh(g Y_sd)` for an imaginary field `F = iG`.
pub fn action_fos_hermitian(gf: &[f64; 6], g: f64) -> f64 {
    let inv = sd_asd_invariants(&CurvatureConfig { f: *gf, g });
    4.0 * (g * inv.x_asd).cosh() * (g * inv.x_sd).cosh()
}

/// `tr expm(i g 𝒢)` with `𝒢` the antisymmetric matrix of `G`.
pub fn action_fos_hermitian_direct(gf: &[f64; 6], g: f64) -> Result<f64> {
    let m = So4Element::from_array(*gf).to_matrix().scale(I * g);
    real_trace(expm(&m)?.trace())
}

/// Treatment of sites next to the lattice edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Sites without both neighbours in some direction are rejected.
    #[default]
    Reject,
    /// Indices wrap around.
    Periodic,
}

/// Batch input `{"configs": [{"f": [...], "g": ...}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchInput {
    pub configs: Vec<CurvatureConfig>,
}

/// Everything computed for one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfigReport {
    pub a_ym: f64,
    pub a_bi: f64,
    pub a_fos: f64,
    pub a_fos_direct: f64,
    pub x_sd: f64,
    pub x_asd: f64,
    pub self_dual: bool,
    pub anti_self_dual: bool,
}

impl ConfigReport {
    /// `|a_fos − a_fos_direct|`.
    pub fn fos_mismatch(&self) -> f64 {
        (self.a_fos - self.a_fos_direct).abs()
    }
}

pub fn evaluate(c: &CurvatureConfig) -> Result<ConfigReport> {
    let c = CurvatureConfig::new(c.f, c.g)?;
    let inv = sd_asd_invariants(&c);
    Ok(ConfigReport {
        a_ym: action_ym(&c),
        a_bi: action_bi(&c)?,
        a_fos: action_fos(&c),
        a_fos_direct: action_fos_direct(&c)?,
        x_sd: inv.x_sd,
        x_asd: inv.x_asd,
        self_dual: inv.is_self_dual(),
        anti_self_dual: inv.is_anti_self_dual(),
    })
}

/// Wire form of a lattice potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeInput {
    pub extent: [usize; 4],
    pub spacing: f64,
    pub potential: Vec<f64>,
    #[serde(default = "mu_major")]
    pub order: String,
}

fn mu_major() -> String {
    "mu-major".into()
}

impl TryFrom<LatticeInput> for LatticePotential {
    type Error = Error;

    fn try_from(input: LatticeInput) -> Result<Self> {
        if input.order != "mu-major" {
            return Err(Error::Domain(format!(
                "unsupported potential order {:?}",
                input.order
            )));
        }
        Self::new(input.extent, input.spacing, input.potential)
    }
}

impl From<LatticePotential> for LatticeInput {
    fn from(p: LatticePotential) -> Self {
        Self {
            extent: p.extent,
            spacing: p.spacing,
            potential: p.values,
            order: mu_major(),
        }
    }
}

/// Real potential `A_μ(x)` on a 4-d grid.
///
/// Values are mu-major: `values[μ · volume + site]`, with
/// `site = ((x1 · n2 + x2) · n3 + x3) · n4 + x4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LatticeInput", into = "LatticeInput")]
pub struct LatticePotential {
    extent: [usize; 4],
    spacing: f64,
    values: Vec<f64>,
}

impl LatticePotential {
    pub fn new(extent: [usize; 4], spacing: f64, values: Vec<f64>) -> Result<Self> {
        if extent.contains(&0) {
            return Err(Error::Domain("lattice extents must be positive".into()));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::Domain(format!(
                "spacing must be positive, got {spacing}"
            )));
        }
        let volume: usize = extent.iter().product();
        if values.len() != 4 * volume {
            return Err(Error::Dimension(format!(
                "potential needs 4 x {volume} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("potential values must be finite".into()));
        }
        Ok(Self {
            extent,
            spacing,
            values,
        })
    }

    /// Samples `A_μ(x)` from `f(μ, x)` at integer coordinates.
    pub fn from_fn(
        extent: [usize; 4],
        spacing: f64,
        f: impl Fn(usize, [usize; 4]) -> f64,
    ) -> Result<Self> {
        let volume: usize = extent.iter().product();
        let mut values = Vec::with_capacity(4 * volume);
        for mu in 0..4 {
            for site in 0..volume {
                values.push(f(mu, site_coords(extent, site)));
            }
        }
        Self::new(extent, spacing, values)
    }

    pub fn extent(&self) -> [usize; 4] {
        self.extent
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn volume(&self) -> usize {
        self.extent.iter().product()
    }

    pub fn site_index(&self, x: [usize; 4]) -> usize {
        site_index(self.extent, x)
    }

    pub fn get(&self, mu: usize, x: [usize; 4]) -> f64 {
        self.values[mu * self.volume() + self.site_index(x)]
    }

    /// `A_μ → A_μ + D_μ φ` with central differences; `φ` wraps at the edges.
    pub fn gauge_transformed(&self, phi: &[f64]) -> Result<Self> {
        let volume = self.volume();
        if phi.len() != volume {
            return Err(Error::Dimension(format!(
                "gauge function needs {volume} values, got {}",
                phi.len()
            )));
        }
        let mut values = self.values.clone();
        for mu in 0..4 {
            for site in 0..volume {
                let x = site_coords(self.extent, site);
                let up = neighbour(self.extent, x, mu, 1, Boundary::Periodic).expect("periodic");
                let dn = neighbour(self.extent, x, mu, -1, Boundary::Periodic).expect("periodic");
                let d = (phi[site_index(self.extent, up)] - phi[site_index(self.extent, dn)])
                    / (2.0 * self.spacing);
                values[mu * volume + site] += d;
            }
        }
        Self::new(self.extent, self.spacing, values)
    }
}

fn site_index(extent: [usize; 4], x: [usize; 4]) -> usize {
    ((x[0] * extent[1] + x[1]) * extent[2] + x[2]) * extent[3] + x[3]
}

fn site_coords(extent: [usize; 4], mut site: usize) -> [usize; 4] {
    let mut x = [0; 4];
    for d in (0..4).rev() {
        x[d] = site % extent[d];
        site /= extent[d];
    }
    x
}

fn neighbour(
    extent: [usize; 4],
    x: [usize; 4],
    dir: usize,
    step: isize,
    boundary: Boundary,
) -> Option<[usize; 4]> {
    let mut y = x;
    let n = extent[dir] as isize;
    let v = x[dir] as isize + step;
    y[dir] = match boundary {
        Boundary::Periodic => v.rem_euclid(n) as usize,
        Boundary::Reject if (0..n).contains(&v) => v as usize,
        Boundary::Reject => return None,
    };
    Some(y)
}

/// `F_μν = D_μ A_ν − D_ν A_μ` at one site with central differences.
pub fn curvature_from_potential(
    p: &LatticePotential,
    site: [usize; 4],
    g: f64,
) -> Result<CurvatureConfig> {
    curvature_at(p, site, g, Boundary::Reject)
}

pub fn curvature_at(
    p: &LatticePotential,
    site: [usize; 4],
    g: f64,
    boundary: Boundary,
) -> Result<CurvatureConfig> {
    let extent = p.extent();
    if site.iter().zip(extent).any(|(&x, n)| x >= n) {
        return Err(Error::Bounds(format!(
            "site {site:?} outside lattice {extent:?}"
        )));
    }
    let mut neighbours = [[[0usize; 4]; 2]; 4];
    for (mu, slot) in neighbours.iter_mut().enumerate() {
        for (k, step) in [1isize, -1].into_iter().enumerate() {
            slot[k] = neighbour(extent, site, mu, step, boundary).ok_or_else(|| {
                Error::Bounds(format!(
                    "site {site:?} has no neighbour along direction {} on {extent:?}",
                    mu + 1
                ))
            })?;
        }
    }
    let h2 = 2.0 * p.spacing();
    let deriv = |mu: usize, nu: usize| {
        let [up, dn] = neighbours[mu];
        (p.get(nu, up) - p.get(nu, dn)) / h2
    };
    let mut f = [0.0; 6];
    let mut k = 0;
    for mu in 0..4 {
        for nu in mu + 1..4 {
            f[k] = deriv(mu, nu) - deriv(nu, mu);
            k += 1;
        }
    }
    CurvatureConfig::new(f, g)
}

/// Curvature at every site where it is defined, in site order.
///
/// With [`Boundary::Reject`] edge sites are omitted.
pub fn curvature_field(
    p: &LatticePotential,
    g: f64,
    boundary: Boundary,
) -> Result<Vec<([usize; 4], CurvatureConfig)>> {
    let extent = p.extent();
    (0..p.volume())
        .into_par_iter()
        .filter_map(|site| {
            let x = site_coords(extent, site);
            match curvature_at(p, x, g, boundary) {
                Ok(c) => Some(Ok((x, c))),
                Err(Error::Bounds(_)) => None,
                Err(e) => Some(Err(e)),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{is_real_antisymmetric, Tolerance};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn cfg(f: [f64; 6], g: f64) -> CurvatureConfig {
        CurvatureConfig::new(f, g).unwrap()
    }

    #[test]
    fn curvature_matrix_layout() {
        assert_eq!(
            curvature_matrix(&cfg([0.0; 6], 1.0)),
            ComplexMatrix::zeros(4, 4)
        );
        let m = curvature_matrix(&cfg([1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1.0));
        for i in 0..4 {
            for j in 0..4 {
                let expect = match (i, j) {
                    (0, 1) => 1.0,
                    (1, 0) => -1.0,
                    _ => 0.0,
                };
                assert_eq!(m[(i, j)].re, expect);
            }
        }
        let m = curvature_matrix(&cfg([0.3, -1.0, 2.0, 0.7, -0.2, 1.1], 2.0));
        assert!(is_real_antisymmetric(&m, Tolerance::ROUND_TRIP));
        assert!(CurvatureConfig::new([f64::NAN; 6], 1.0).is_err());
    }

    #[test]
    fn maxwell_examples() {
        assert_eq!(action_ym(&cfg([0.0; 6], 1.3)), 0.0);
        let c = cfg([1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1.0);
        assert_eq!(action_ym(&c), -1.0);
        assert!((action_ym_trace(&c) + 1.0).abs() < 1e-15);
        let c = cfg([0.3, -1.0, 2.0, 0.7, -0.2, 1.1], -1.7);
        assert!((action_ym(&c) - action_ym_trace(&c)).abs() < 1e-12);
    }

    #[test]
    fn born_infeld_examples() {
        assert_eq!(action_bi(&cfg([0.0; 6], 1.0)).unwrap(), 1.0);
        let c = cfg([1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1.0);
        // det [[1,1],[-1,1]] ⊕ I2 = 2
        assert!((action_bi(&c).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn invariants_examples() {
        let inv = sd_asd_invariants(&cfg([1.0, 0.0, 0.0, 0.0, 0.0, 1.0], 1.0));
        assert_eq!((inv.x_sd, inv.x_asd), (0.0, 1.0));
        assert!(inv.is_self_dual() && !inv.is_anti_self_dual());
        let inv = sd_asd_invariants(&cfg([1.0, 0.0, 0.0, 0.0, 0.0, -1.0], 1.0));
        assert_eq!((inv.x_sd, inv.x_asd), (1.0, 0.0));
        let inv = sd_asd_invariants(&cfg([1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1.0));
        assert_eq!((inv.x_sd, inv.x_asd), (0.5, 0.5));
    }

    #[test]
    fn fos_examples() {
        for g in [-1.5, 0.0, 0.4, 2.0] {
            assert_eq!(action_fos(&cfg([0.0; 6], g)), 4.0);
        }
        assert!((action_fos_direct(&cfg([0.0; 6], 1.0)).unwrap() - 4.0).abs() < 1e-15);
        // eigenvalues of F are ±i, 0, 0, so tr e^F = 2 + 2 cos 1
        let c = cfg([1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1.0);
        let expect = 2.0 + 2.0 * 1f64.cos();
        assert!((action_fos(&c) - expect).abs() < 1e-15);
        assert!((action_fos(&c) - 3.080_604_611_736_279).abs() < 1e-14);
        assert!((action_fos_direct(&c).unwrap() - expect).abs() < 1e-13);
        // self-dual f12 = f34 = 1: eigenvalues ±i twice
        for g in [-1.2, 0.3, 1.9] {
            let c = cfg([1.0, 0.0, 0.0, 0.0, 0.0, 1.0], g);
            assert!((action_fos(&c) - 4.0 * g.cos()).abs() < 1e-14);
            assert!((action_fos_direct(&c).unwrap() - 4.0 * g.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn decompose_examples() {
        let (a, b) = decompose(&cfg([2.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1.0));
        assert_eq!(
            (a.as_array(), b.as_array()),
            ([1.0, 0.0, 0.0], [1.0, 0.0, 0.0])
        );
        let sd = cfg([0.7, -0.4, 1.2, 1.2, 0.4, 0.7], 1.0);
        let (a, b) = decompose(&sd);
        assert!(a.norm() > 0.1);
        assert_eq!(b.norm(), 0.0);
        let inv = sd_asd_invariants(&sd);
        assert_eq!(inv.x_sd, 0.0);
        assert!((a.norm() - inv.x_asd).abs() < 1e-15);
    }

    #[test]
    fn intertwiner_splits_curvature() {
        let r = crate::bell::r_canonical2().into_matrix();
        let c = cfg([0.3, -1.0, 2.0, 0.7, -0.2, 1.1], 1.0);
        let (a, b) = decompose(&c);
        let lhs = &(&r * &curvature_matrix(&c)) * &r.dagger();
        let id = ComplexMatrix::identity(2);
        let rhs = (&a.to_matrix().kron(&id) + &id.kron(&b.to_matrix())).scale(I);
        assert!(lhs.distance(&rhs) <= 1e-12);
        let direct = action_fos_direct(&cfg(c.f, 1.3)).unwrap();
        let factored = action_fos_factorized(&cfg(c.f, 1.3));
        assert!((direct - factored.re).abs() < 1e-12 && factored.im.abs() < 1e-15);
    }

    #[test]
    fn hermitian_variant() {
        assert_eq!(action_fos_hermitian(&[0.0; 6], 0.7), 4.0);
        let g12 = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        // i𝒢 has eigenvalues ±1, 0, 0
        let expect = 2.0 + 2.0 * 1f64.cosh();
        assert!((action_fos_hermitian(&g12, 1.0) - expect).abs() < 1e-14);
        assert!((action_fos_hermitian(&g12, 1.0) - 5.086_161_269_630_487).abs() < 1e-13);
        assert!((action_fos_hermitian_direct(&g12, 1.0).unwrap() - expect).abs() < 1e-12);
        let gf = [0.3, -1.0, 0.5, 0.7, -0.2, 1.1];
        let closed = action_fos_hermitian(&gf, 1.4);
        assert!(closed >= 4.0);
        assert!((closed - action_fos_hermitian_direct(&gf, 1.4).unwrap()).abs() < 1e-10 * closed);
    }

    #[test]
    fn constant_potential_has_no_curvature() {
        let p = LatticePotential::from_fn([3, 3, 3, 3], 0.5, |mu, _| mu as f64 + 0.25).unwrap();
        let c = curvature_from_potential(&p, [1, 1, 1, 1], 1.0).unwrap();
        assert_eq!(c.f, [0.0; 6]);
    }

    #[test]
    fn linear_ramp_gives_unit_curvature() {
        // A_ν(x) = x_μ in lattice length units, for each (μ, ν) pair
        let h = 0.25;
        let mut k = 0;
        for mu in 0..4 {
            for nu in mu + 1..4 {
                let p = LatticePotential::from_fn([4, 4, 4, 4], h, |comp, x| {
                    if comp == nu {
                        x[mu] as f64 * h
                    } else {
                        0.0
                    }
                })
                .unwrap();
                let c = curvature_from_potential(&p, [1, 2, 1, 2], 1.0).unwrap();
                let mut expect = [0.0; 6];
                expect[k] = 1.0;
                assert_eq!(c.f, expect);
                k += 1;
            }
        }
    }

    #[test]
    fn reversed_ramp_gives_negative_curvature() {
        // A_1(x) = x_2 gives F_21 = 1, stored as F_12 = −1
        let p =
            LatticePotential::from_fn(
                [3, 3, 3, 3],
                1.0,
                |comp, x| {
                    if comp == 0 {
                        x[1] as f64
                    } else {
                        0.0
                    }
                },
            )
            .unwrap();
        let c = curvature_from_potential(&p, [1, 1, 1, 1], 1.0).unwrap();
        assert_eq!(c.f12(), -1.0);
    }

    #[test]
    fn boundary_handling() {
        let p = LatticePotential::from_fn([3, 3, 3, 3], 1.0, |_, _| 0.0).unwrap();
        assert!(matches!(
            curvature_from_potential(&p, [0, 1, 1, 1], 1.0),
            Err(Error::Bounds(_))
        ));
        assert!(matches!(
            curvature_from_potential(&p, [1, 1, 1, 3], 1.0),
            Err(Error::Bounds(_))
        ));
        assert!(curvature_at(&p, [0, 0, 0, 0], 1.0, Boundary::Periodic).is_ok());
        let interior = curvature_field(&p, 1.0, Boundary::Reject).unwrap();
        assert_eq!(interior.len(), 1);
        let all = curvature_field(&p, 1.0, Boundary::Periodic).unwrap();
        assert_eq!(all.len(), 81);
    }

    #[test]
    fn batch_report() {
        let r = evaluate(&cfg([0.0; 6], 0.8)).unwrap();
        assert_eq!((r.a_fos, r.a_bi, r.a_ym), (4.0, 1.0, 0.0));
        assert!(r.self_dual && r.anti_self_dual);
        let input: BatchInput =
            serde_json::from_str(r#"{"configs": [{"f": [1, 0, 0, 0, 0, 1], "g": 0.5}]}"#).unwrap();
        let r = evaluate(&input.configs[0]).unwrap();
        assert!(r.self_dual && !r.anti_self_dual);
        assert!(r.fos_mismatch() < 1e-12);
        assert!(
            serde_json::from_str::<BatchInput>(r#"{"configs": [{"f": [1, 2], "g": 0.5}]}"#)
                .is_err()
        );
    }

    #[test]
    fn lattice_json() {
        let p =
            LatticePotential::from_fn([2, 1, 1, 3], 0.5, |mu, x| (mu * 10 + x[3]) as f64).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.contains("\"order\":\"mu-major\""));
        let back: LatticePotential = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
        assert_eq!(p.get(2, [1, 0, 0, 2]), 22.0);
        let bad =
            r#"{"extent": [1,1,1,1], "spacing": 1, "potential": [0,0,0,0], "order": "site-major"}"#;
        assert!(serde_json::from_str::<LatticePotential>(bad).is_err());
        let short = r#"{"extent": [1,1,1,1], "spacing": 1, "potential": [0,0,0]}"#;
        assert!(serde_json::from_str::<LatticePotential>(short).is_err());
    }

    #[test]
    fn lattice_validation() {
        assert!(LatticePotential::new([2, 2, 2, 2], 1.0, vec![0.0; 63]).is_err());
        assert!(LatticePotential::new([2, 2, 2, 0], 1.0, vec![]).is_err());
        assert!(LatticePotential::new([1, 1, 1, 1], -1.0, vec![0.0; 4]).is_err());
        let p = LatticePotential::new([1, 1, 1, 1], 1.0, vec![0.0; 4]).unwrap();
        assert!(p.gauge_transformed(&[0.0; 2]).is_err());
    }

    #[test]
    fn gauge_shift_leaves_curvature_unchanged() {
        let p = LatticePotential::from_fn([5, 5, 5, 5], 0.3, |mu, x| {
            ((mu + 1) as f64 * x[0] as f64 + x[1] as f64 * x[3] as f64).sin()
        })
        .unwrap();
        let phi: Vec<f64> = (0..p.volume())
            .map(|s| (s as f64 * FRAC_1_SQRT_2).cos() * 3.0)
            .collect();
        let q = p.gauge_transformed(&phi).unwrap();
        let before = curvature_field(&p, 1.0, Boundary::Reject).unwrap();
        let after = curvature_field(&q, 1.0, Boundary::Reject).unwrap();
        assert_eq!(before.len(), 81);
        for ((x, a), (y, b)) in before.iter().zip(&after) {
            assert_eq!(x, y);
            for k in 0..6 {
                assert!((a.f[k] - b.f[k]).abs() <= 1e-13);
            }
        }
    }
}
