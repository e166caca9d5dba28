//! Search for Bell-phase intertwiners whose algebra image is real.
//!
//! For `n` qubits the intertwiner `R(θ)` maps the Lie algebra of
//! `SU(2)^{⊗n}` into `so(2^n)` exactly when every image
//! `iR†(σ_j inserted at one slot)R` is real; anti-Hermiticity is automatic.
//! The residual sums the squared imaginary parts over the `3n` generator
//! insertions, so it vanishes exactly on solutions. By R-linearity these
//! `3n` cases cover every `(a, b, c, …)`.
//!
//! Two qubits admit a solution (the canonical phases). For three qubits no
//! phase vector works; the search below certifies a strictly positive floor.
//! That statement is about this ansatz only, not about general `R ∈ SU(8)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use crate::bell::{r_matrix, PhaseVector};
use crate::error::{Error, Result};
use crate::linalg::{kron_all, pauli, ComplexMatrix, C64, I};
use crate::sampling::seeded;

/// Label recorded in every report.
pub const ANSATZ: &str = "bell-phase";

/// Default number of grid points refined.
pub const DEFAULT_TOP_K: usize = 32;

const MAX_GRID_POINTS: u64 = 1 << 32;
const CHUNK: u64 = 1 << 14;

fn check_supported(n: usize) -> Result<()> {
    if n == 2 || n == 3 {
        Ok(())
    } else {
        Err(Error::Bounds(format!(
            "phase residual is defined for 2 or 3 qubits, got {n}"
        )))
    }
}

/// The `3n` generators: `σ_j` in one tensor slot, identity elsewhere.
fn generators(n: usize) -> Vec<ComplexMatrix> {
    let id = ComplexMatrix::identity(2);
    let mut out = Vec::with_capacity(3 * n);
    for slot in 0..n {
        for j in 1..=3 {
            let factors: Vec<ComplexMatrix> = (0..n)
                .map(|t| if t == slot { pauli(j) } else { id.clone() })
                .collect();
            out.push(kron_all(&factors));
        }
    }
    out
}

/// Sum over generator insertions of `‖Im(iR†GR)‖_F²`, by dense products.
pub fn residual(phases: &PhaseVector) -> Result<f64> {
    let n = phases.qubits();
    check_supported(n)?;
    let r = r_matrix(phases).into_matrix();
    let rd = r.dagger();
    Ok(generators(n)
        .iter()
        .map(|g| {
            let image = (&(&rd * g) * &r).scale(I);
            image.entries().iter().map(|z| z.im * z.im).sum::<f64>()
        })
        .sum())
}

#[derive(Debug, Clone, Copy)]
struct Term {
    row: usize,
    col: usize,
    weight: C64,
}

/// Sparse form of the residual.
///
/// With `B` the real Bell matrix, `R = B diag(e^{iθ})` and the `(j, k)`
/// entry of `iR†GR` has imaginary part `Re(e^{i(θ_k − θ_j)} (BᵀGB)_{jk})`.
/// Only the nonzero `(BᵀGB)_{jk}` are kept.
#[derive(Debug, Clone)]
pub struct ResidualModel {
    n: usize,
    dim: usize,
    terms: Vec<Term>,
}

impl ResidualModel {
    pub fn new(n: usize) -> Result<Self> {
        check_supported(n)?;
        let b = r_matrix(&PhaseVector::zeros(n)?).into_matrix();
        let bt = b.transpose();
        let dim = 1 << n;
        let mut terms = Vec::new();
        for g in generators(n) {
            let m = &(&bt * &g) * &b;
            for row in 0..dim {
                for col in 0..dim {
                    let w = m[(row, col)];
                    if w.norm() > 1e-14 {
                        terms.push(Term {
                            row,
                            col,
                            weight: w,
                        });
                    }
                }
            }
        }
        Ok(Self { n, dim, terms })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn check_len(&self, theta: &[f64]) {
        assert_eq!(theta.len(), self.dim, "expected {} phases", self.dim);
    }

    pub fn eval(&self, theta: &[f64]) -> f64 {
        self.check_len(theta);
        let phase: Vec<C64> = theta.iter().map(|&t| C64::from_polar(1.0, t)).collect();
        self.terms
            .iter()
            .map(|t| {
                let x = (phase[t.col] * phase[t.row].conj() * t.weight).re;
                x * x
            })
            .sum()
    }

    /// Analytic gradient with respect to every phase.
    pub fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        self.check_len(theta);
        let phase: Vec<C64> = theta.iter().map(|&t| C64::from_polar(1.0, t)).collect();
        let mut grad = vec![0.0; self.dim];
        for t in &self.terms {
            if t.row == t.col {
                continue;
            }
            let z = phase[t.col] * phase[t.row].conj() * t.weight;
            // d/dδ Re(e^{iδ} w) = −Im(e^{iδ} w), δ = θ_col − θ_row
            let d = 2.0 * z.re * (-z.im);
            grad[t.col] += d;
            grad[t.row] -= d;
        }
        grad
    }

    /// Grid evaluation with `θ_j = 2π digits_j / m`, `roots[q] = e^{2πiq/m}`.
    /// Returns `None` once the partial sum reaches `bound`.
    fn eval_grid(&self, digits: &[usize], roots: &[C64], bound: f64) -> Option<f64> {
        let m = roots.len();
        let mut sum = 0.0;
        for t in &self.terms {
            let q = (digits[t.col] + m - digits[t.row]) % m;
            let x = (roots[q] * t.weight).re;
            sum += x * x;
            if sum >= bound {
                return None;
            }
        }
        Some(sum)
    }
}

/// Analytic gradient of [`residual`].
pub fn residual_gradient(phases: &PhaseVector) -> Result<Vec<f64>> {
    Ok(ResidualModel::new(phases.qubits())?.gradient(phases.angles()))
}

/// A grid point and its residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridCandidate {
    pub index: u64,
    pub residual: f64,
}

/// Best points from an exhaustive grid over the free phases.
#[derive(Debug, Clone, PartialEq)]
pub struct GridScan {
    pub n: usize,
    pub resolution: usize,
    /// Sorted by `(residual, index)`.
    pub candidates: Vec<GridCandidate>,
    pub points: u64,
}

impl GridScan {
    /// Phases of a grid index: `θ_1 = 0`, then base-`resolution` digits with `θ_2` most significant.
    pub fn phases_of(&self, index: u64) -> PhaseVector {
        let digits = grid_digits(index, self.resolution, (1 << self.n) - 1);
        let mut theta = vec![0.0];
        theta.extend(
            digits
                .iter()
                .map(|&d| TAU * d as f64 / self.resolution as f64),
        );
        PhaseVector::new(self.n, theta).expect("grid phases are well formed")
    }
}

fn grid_digits(mut index: u64, m: usize, free: usize) -> Vec<usize> {
    let mut digits = vec![0; free];
    for d in digits.iter_mut().rev() {
        *d = (index % m as u64) as usize;
        index /= m as u64;
    }
    digits
}

fn ordered(a: &GridCandidate, b: &GridCandidate) -> std::cmp::Ordering {
    a.residual
        .total_cmp(&b.residual)
        .then(a.index.cmp(&b.index))
}

fn insert_candidate(best: &mut Vec<GridCandidate>, cand: GridCandidate, keep: usize) {
    let pos = best.partition_point(|c| ordered(c, &cand).is_lt());
    best.insert(pos, cand);
    best.truncate(keep);
}

/// Evaluates the residual on every point of the uniform grid with `θ_1 = 0`
/// and keeps the `keep` best, ties broken by lower grid index.
///
/// The grid is split into fixed index chunks scanned in parallel; each
/// chunk prunes against its own running `keep`-th best and the chunk
/// results are merged in index order, so the outcome does not depend on
/// the thread count.
pub fn grid_scan(n: usize, resolution: usize, keep: usize) -> Result<GridScan> {
    let model = ResidualModel::new(n)?;
    if resolution == 0 {
        return Err(Error::Bounds("grid resolution must be positive".into()));
    }
    let keep = keep.max(1);
    let free = (1usize << n) - 1;
    let points = (resolution as u64)
        .checked_pow(free as u32)
        .filter(|&p| p <= MAX_GRID_POINTS)
        .ok_or_else(|| {
            Error::Bounds(format!(
                "grid {resolution}^{free} exceeds {MAX_GRID_POINTS} points"
            ))
        })?;
    let roots: Vec<C64> = (0..resolution)
        .map(|q| C64::from_polar(1.0, TAU * q as f64 / resolution as f64))
        .collect();

    let chunks = points.div_ceil(CHUNK);
    let per_chunk: Vec<Vec<GridCandidate>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(points);
            let mut best: Vec<GridCandidate> = Vec::with_capacity(keep + 1);
            let mut digits = vec![0usize; free + 1];
            digits[1..].copy_from_slice(&grid_digits(start, resolution, free));
            for index in start..end {
                let bound = if best.len() < keep {
                    f64::INFINITY
                } else {
                    best[keep - 1].residual
                };
                if let Some(residual) = model.eval_grid(&digits, &roots, bound) {
                    insert_candidate(&mut best, GridCandidate { index, residual }, keep);
                }
                // odometer increment, last phase fastest
                for d in digits[1..].iter_mut().rev() {
                    *d += 1;
                    if *d < resolution {
                        break;
                    }
                    *d = 0;
                }
            }
            best
        })
        .collect();

    let mut candidates: Vec<GridCandidate> = per_chunk.into_iter().flatten().collect();
    candidates.sort_by(ordered);
    candidates.truncate(keep);
    Ok(GridScan {
        n,
        resolution,
        candidates,
        points,
    })
}

/// Parameters of [`search`].
#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub n: usize,
    pub grid_resolution: usize,
    /// Maximum coordinate-descent sweeps per starting point.
    pub refinement_steps: usize,
    /// Number of grid points refined.
    pub top_k: usize,
    /// Seeds the coordinate visiting order.
    pub seed: u64,
}

impl SearchConfig {
    pub fn new(n: usize, grid_resolution: usize, refinement_steps: usize, seed: u64) -> Self {
        Self {
            n,
            grid_resolution,
            refinement_steps,
            top_k: DEFAULT_TOP_K,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub n: usize,
    pub best_theta: PhaseVector,
    pub best_residual: f64,
    pub grid_resolution: usize,
    pub refinement_iterations: usize,
    pub samples_evaluated: u64,
}

#[derive(Serialize)]
struct SearchReportJson<'a> {
    n: usize,
    best_theta: &'a [f64],
    best_residual: f64,
    grid_resolution: usize,
    refinement_iterations: usize,
    samples_evaluated: u64,
    ansatz: &'static str,
}

impl Serialize for SearchReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SearchReportJson {
            n: self.n,
            best_theta: self.best_theta.angles(),
            best_residual: self.best_residual,
            grid_resolution: self.grid_resolution,
            refinement_iterations: self.refinement_iterations,
            samples_evaluated: self.samples_evaluated,
            ansatz: ANSATZ,
        }
        .serialize(s)
    }
}

struct Refined {
    theta: Vec<f64>,
    value: f64,
    sweeps: usize,
    evaluations: u64,
}

/// Exact coordinate descent. Along one phase the residual has the form
/// `c0 + c cos 2t + s sin 2t`, so three evaluations fix it and the minimiser
/// is closed form.
fn coordinate_descent(
    model: &ResidualModel,
    start: Vec<f64>,
    max_sweeps: usize,
    seed: u64,
) -> Refined {
    let mut rng = seeded(seed);
    let mut theta = start;
    let mut value = model.eval(&theta);
    let mut evaluations = 1u64;
    let mut sweeps = 0;
    let mut order: Vec<usize> = (1..theta.len()).collect();
    while sweeps < max_sweeps && value > 0.0 {
        sweeps += 1;
        order.shuffle(&mut rng);
        let before = value;
        for &m in &order {
            let t0 = theta[m];
            let f0 = value;
            theta[m] = t0 + FRAC_PI_4;
            let f1 = model.eval(&theta);
            theta[m] = t0 + FRAC_PI_2;
            let f2 = model.eval(&theta);
            let c0 = 0.5 * (f0 + f2);
            let c = 0.5 * (f0 - f2);
            let s = f1 - c0;
            let t = t0 + 0.5 * (s.atan2(c) + PI);
            theta[m] = t;
            let f = model.eval(&theta);
            evaluations += 3;
            if f < f0 {
                value = f;
            } else {
                theta[m] = t0;
            }
        }
        if before - value <= 1e-15 * before.max(1.0) {
            break;
        }
    }
    Refined {
        theta,
        value,
        sweeps,
        evaluations,
    }
}

/// Grid scan followed by coordinate-descent refinement of the `top_k` best
/// grid points. Deterministic for a given configuration.
pub fn search(config: &SearchConfig) -> Result<SearchReport> {
    check_supported(config.n)?;
    if config.grid_resolution < 4 {
        return Err(Error::Bounds(format!(
            "grid resolution must be at least 4, got {}",
            config.grid_resolution
        )));
    }
    let model = ResidualModel::new(config.n)?;
    let scan = grid_scan(config.n, config.grid_resolution, config.top_k)?;

    let refined: Vec<Refined> = scan
        .candidates
        .par_iter()
        .enumerate()
        .map(|(rank, cand)| {
            let start = scan.phases_of(cand.index).angles().to_vec();
            coordinate_descent(
                &model,
                start,
                config.refinement_steps,
                config.seed ^ (rank as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
            )
        })
        .collect();

    let refinement_iterations = refined.iter().map(|r| r.sweeps).sum();
    let samples_evaluated = scan.points + refined.iter().map(|r| r.evaluations).sum::<u64>();
    // earliest rank wins ties
    let best = refined
        .into_iter()
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .expect("at least one grid candidate");
    let mut theta = best.theta;
    let shift = theta[0];
    for t in &mut theta {
        *t -= shift;
    }
    let best_theta = PhaseVector::new(config.n, theta)?;
    let best_residual = residual(&best_theta)?;
    Ok(SearchReport {
        n: config.n,
        best_theta,
        best_residual,
        grid_resolution: config.grid_resolution,
        refinement_iterations,
        samples_evaluated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_two_qubit_phases_are_a_solution() {
        let r = residual(&PhaseVector::canonical2()).unwrap();
        assert!(r <= 1e-20, "{r}");
    }

    #[test]
    fn unit_phases_leave_imaginary_entries() {
        // frozen from an independent numpy evaluation of the same sum
        let r = residual(&PhaseVector::zeros(2).unwrap()).unwrap();
        assert!((r - 16.0).abs() < 1e-12, "{r}");
    }

    #[test]
    fn unsupported_sizes() {
        assert!(matches!(
            residual(&PhaseVector::zeros(1).unwrap()),
            Err(Error::Bounds(_))
        ));
        assert!(matches!(
            residual(&PhaseVector::zeros(4).unwrap()),
            Err(Error::Bounds(_))
        ));
        assert!(ResidualModel::new(4).is_err());
    }

    #[test]
    fn sparse_model_matches_dense_route() {
        for n in [2, 3] {
            let model = ResidualModel::new(n).unwrap();
            for s in 0..5 {
                let theta: Vec<f64> = (0..1 << n)
                    .map(|k| ((k + 3 * s) as f64 * 1.3).sin() * 3.0)
                    .collect();
                let p = PhaseVector::new(n, theta.clone()).unwrap();
                let dense = residual(&p).unwrap();
                assert!((model.eval(&theta) - dense).abs() < 1e-12 * dense.max(1.0));
            }
        }
    }

    #[test]
    fn global_phase_invariance() {
        let theta: Vec<f64> = (0..8).map(|k| k as f64 * 0.77).collect();
        let p = PhaseVector::new(3, theta).unwrap();
        let base = residual(&p).unwrap();
        for c in [0.1, -2.0, 5.5] {
            assert!((residual(&p.shifted(c)).unwrap() - base).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_vanishes_at_solution() {
        let g = residual_gradient(&PhaseVector::canonical2()).unwrap();
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(norm <= 1e-10, "{norm}");
    }

    #[test]
    fn gradient_matches_central_differences() {
        let theta: Vec<f64> = (0..8).map(|k| (k as f64 * 2.1).cos() * 2.5).collect();
        let p = PhaseVector::new(3, theta.clone()).unwrap();
        let g = residual_gradient(&p).unwrap();
        let h = 1e-6;
        for m in 0..8 {
            let mut up = theta.clone();
            up[m] += h;
            let mut dn = theta.clone();
            dn[m] -= h;
            let fd = (residual(&PhaseVector::new(3, up).unwrap()).unwrap()
                - residual(&PhaseVector::new(3, dn).unwrap()).unwrap())
                / (2.0 * h);
            let scale = fd.abs().max(g[m].abs()).max(1e-3);
            assert!(
                (fd - g[m]).abs() / scale < 1e-5,
                "coord {m}: fd {fd} vs {}",
                g[m]
            );
        }
        assert!(g.iter().sum::<f64>().abs() < 1e-10);
    }

    #[test]
    fn quarter_turn_grid_contains_two_qubit_solution() {
        let scan = grid_scan(2, 4, 4).unwrap();
        assert_eq!(scan.points, 64);
        assert!(scan.candidates[0].residual <= 1e-12);
        let report = search(&SearchConfig::new(2, 4, 20, 0)).unwrap();
        assert!(report.best_residual <= 1e-12);
    }

    #[test]
    fn coarse_grid_misses_two_qubit_solution() {
        let scan = grid_scan(2, 2, 1).unwrap();
        assert!(scan.candidates[0].residual > 0.1);
    }

    #[test]
    fn search_rejects_coarse_grids() {
        assert!(matches!(
            search(&SearchConfig::new(2, 3, 5, 0)),
            Err(Error::Bounds(_))
        ));
    }

    #[test]
    fn refinement_from_unit_phases_reaches_zero_for_two_qubits() {
        let model = ResidualModel::new(2).unwrap();
        let out = coordinate_descent(&model, vec![0.0, 0.3, 0.2, 0.1], 200, 1);
        assert!(out.value < 1e-12, "{}", out.value);
    }

    #[test]
    fn grid_scan_is_thread_count_independent() {
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| grid_scan(3, 4, 8).unwrap());
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| grid_scan(3, 4, 8).unwrap());
        assert_eq!(one, many);
    }

    #[test]
    fn pruned_scan_agrees_with_brute_force() {
        let scan = grid_scan(2, 6, 5).unwrap();
        let mut all: Vec<GridCandidate> = (0..scan.points)
            .map(|index| GridCandidate {
                index,
                residual: residual(&scan.phases_of(index)).unwrap(),
            })
            .collect();
        all.sort_by(ordered);
        for (got, want) in scan.candidates.iter().zip(&all) {
            assert!((got.residual - want.residual).abs() < 1e-12);
        }
    }

    #[test]
    fn report_json_shape() {
        let report = search(&SearchConfig::new(2, 4, 5, 3)).unwrap();
        let v = serde_json::to_value(&report).unwrap();
        assert_eq!(v["ansatz"], ANSATZ);
        assert_eq!(v["best_theta"].as_array().unwrap().len(), 4);
        for key in [
            "n",
            "best_residual",
            "grid_resolution",
            "refinement_iterations",
            "samples_evaluated",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }
}
