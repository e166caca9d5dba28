use std::f64::consts::PI;
use std::io::Read;

use bellmap::bell::{
    algebra_map, check_qubits, conjugated_generator, group_map, inverse_algebra_map,
    inverse_group_map, r_canonical2, r_matrix, PhaseVector, TracelessHermitian2,
};
use bellmap::grassmann::{
    chart_forward, chart_inverse, in_chart, make_point, transition, Chart, RealSymmetric,
};
use bellmap::linalg::{is_real_orthogonal, is_special};
use bellmap::phase_search::{search, SearchConfig};
use bellmap::sampling::{haar_unitary_with, real_symmetric, seeded, unit_quaternion, SeededRng};
use bellmap::spin::{clebsch_check, iota_tilde, rho, twisted_tensor_square, SU2Element};
use bellmap::yang_mills::{curvature_field, evaluate, BatchInput, Boundary, LatticePotential};
use bellmap::{ComplexMatrix, Error, Tolerance};
use rand::Rng;
use serde_json::{json, Value};

/// Residual bound for the isomorphism and Yang-Mills checks.
pub const ISO_TOL: f64 = 1e-9;
pub const SPIN_TOL: f64 = 1e-10;
pub const ROUNDTRIP_TOL: f64 = 1e-9;
pub const TRANSITION_TOL: f64 = 1e-8;
pub const SANITY_TOL: f64 = 1e-12;

pub struct Outcome {
    pub payload: Value,
    pub passed: bool,
}

impl Outcome {
    fn ok(payload: Value) -> Self {
        Self {
            payload,
            passed: true,
        }
    }

    fn checked(payload: Value, passed: bool) -> Self {
        Self { payload, passed }
    }
}

pub type CmdResult = Result<Outcome, Error>;

fn require_samples(samples: usize) -> Result<(), Error> {
    if samples == 0 {
        return Err(Error::Bounds("--samples must be at least 1".into()));
    }
    Ok(())
}

fn random_su2(rng: &mut SeededRng) -> SU2Element {
    SU2Element::from_quaternion(unit_quaternion(rng)).expect("unit quaternion")
}

fn random_hermitian(rng: &mut SeededRng) -> TracelessHermitian2 {
    let mut c = || rng.random_range(-2.0..=2.0);
    TracelessHermitian2::new(c(), c(), c())
}

struct Max(f64);

impl Max {
    fn new() -> Self {
        Self(0.0)
    }

    fn add(&mut self, v: f64) {
        // NaN must not be swallowed by max
        if v.is_nan() || v > self.0 {
            self.0 = v;
        }
    }

    fn within(&self, tol: f64) -> bool {
        self.0 <= tol
    }
}

pub fn gen_r(qubits: usize, phases: Option<Vec<f64>>, canonical: bool) -> CmdResult {
    check_qubits(qubits)?;
    if canonical && qubits != 2 {
        return Err(Error::Domain(
            "--canonical is only defined for 2 qubits".into(),
        ));
    }
    let (phases, matrix) = match phases {
        Some(theta) => {
            let p = PhaseVector::new(qubits, theta)?;
            let m = r_matrix(&p).into_matrix();
            (p, m)
        }
        None if qubits == 2 => (PhaseVector::canonical2(), r_canonical2().into_matrix()),
        None => {
            let p = PhaseVector::zeros(qubits)?;
            let m = r_matrix(&p).into_matrix();
            (p, m)
        }
    };
    Ok(Outcome::ok(json!({
        "qubits": qubits,
        "phases": phases.angles(),
        "matrix": matrix,
    })))
}

pub fn verify_iso(samples: usize, seed: u64) -> CmdResult {
    require_samples(samples)?;
    let mut rng = seeded(seed);
    let r = r_canonical2().into_matrix();
    let mut orthogonal = Max::new();
    let mut determinant = Max::new();
    let mut homomorphism = Max::new();
    let mut inverse = Max::new();
    let mut algebra = Max::new();
    let mut algebra_inverse = Max::new();
    let mut not_special = 0usize;

    for _ in 0..samples {
        let [a1, b1, a2, b2] = std::array::from_fn(|_| random_su2(&mut rng).to_matrix());
        let o1 = group_map(&a1, &b1)?;
        let o2 = group_map(&a2, &b2)?;
        let o12 = group_map(&(&a1 * &a2), &(&b1 * &b2))?;

        let gram = &o1.transpose() * &o1;
        orthogonal.add(
            gram.distance(&ComplexMatrix::identity(4))
                .max(o1.max_abs_imag()),
        );
        determinant.add((o1.determinant()? - 1.0).norm());
        if !(is_real_orthogonal(&o1, Tolerance::ACCEPTANCE)
            && is_special(&o1, Tolerance::ACCEPTANCE))
        {
            not_special += 1;
        }
        homomorphism.add(o12.distance(&(&o1 * &o2)));

        let (a, b) = inverse_group_map(&o1)?;
        inverse.add(a.kron(&b).distance(&a1.kron(&b1)));

        let (ha, hb) = (random_hermitian(&mut rng), random_hermitian(&mut rng));
        let f = algebra_map(&ha, &hb);
        algebra.add(f.to_matrix().distance(&conjugated_generator(&r, &ha, &hb)));
        let (ia, ib) = inverse_algebra_map(&f);
        let back = algebra_map(&ia, &ib);
        for (x, y) in back.as_array().iter().zip(f.as_array()) {
            algebra_inverse.add((x - y).abs());
        }
    }

    let all = [
        &orthogonal,
        &determinant,
        &homomorphism,
        &inverse,
        &algebra,
        &algebra_inverse,
    ];
    let passed = not_special == 0 && all.iter().all(|m| m.within(ISO_TOL));
    Ok(Outcome::checked(
        json!({
            "samples": samples,
            "seed": seed,
            "tolerance": ISO_TOL,
            "max_orthogonality_residual": orthogonal.0,
            "max_determinant_residual": determinant.0,
            "max_homomorphism_residual": homomorphism.0,
            "max_inverse_residual": inverse.0,
            "max_algebra_residual": algebra.0,
            "max_algebra_inverse_residual": algebra_inverse.0,
            "not_in_so4": not_special,
            "passed": passed,
        }),
        passed,
    ))
}

pub struct Search3Args {
    pub grid: usize,
    pub seed: u64,
    pub refine: usize,
    pub top_k: usize,
    pub two_qubit_sanity: bool,
}

pub fn search3(args: &Search3Args) -> CmdResult {
    if args.top_k == 0 {
        return Err(Error::Bounds("--top-k must be at least 1".into()));
    }
    let mut config = SearchConfig::new(3, args.grid, args.refine, args.seed);
    config.top_k = args.top_k;
    let report = search(&config)?;
    let mut payload = serde_json::to_value(&report).expect("report serialises");
    let mut passed = report.best_residual > 0.0;
    if args.two_qubit_sanity {
        let mut sanity = SearchConfig::new(2, 4, args.refine, args.seed);
        sanity.top_k = args.top_k;
        let two = search(&sanity)?;
        let ok = two.best_residual <= SANITY_TOL;
        passed &= ok;
        payload["two_qubit_sanity"] = json!({
            "report": two,
            "tolerance": SANITY_TOL,
            "passed": ok,
        });
    }
    Ok(Outcome::checked(payload, passed))
}

/// File path, `-` for stdin, or the JSON text itself.
pub fn read_input(input: &str) -> Result<String, Error> {
    let trimmed = input.trim_start();
    if trimmed.starts_with('{') {
        return Ok(input.to_owned());
    }
    if input == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Error::Domain(format!("reading stdin: {e}")))?;
        return Ok(text);
    }
    std::fs::read_to_string(input).map_err(|e| Error::Domain(format!("reading {input}: {e}")))
}

pub fn yangmills(input: &str, coupling: f64, periodic: bool) -> CmdResult {
    let text = read_input(input)?;
    let doc: Value =
        serde_json::from_str(&text).map_err(|e| Error::Domain(format!("malformed JSON: {e}")))?;
    if doc.get("configs").is_some() {
        let batch: BatchInput = serde_json::from_value(doc)
            .map_err(|e| Error::Domain(format!("invalid batch: {e}")))?;
        let results = batch
            .configs
            .iter()
            .map(evaluate)
            .collect::<Result<Vec<_>, _>>()?;
        let mut worst = Max::new();
        results.iter().for_each(|r| worst.add(r.fos_mismatch()));
        let passed = worst.within(ISO_TOL);
        Ok(Outcome::checked(
            json!({
                "results": results,
                "max_fos_mismatch": worst.0,
                "tolerance": ISO_TOL,
                "passed": passed,
            }),
            passed,
        ))
    } else if doc.get("extent").is_some() {
        let lattice: LatticePotential = serde_json::from_value(doc)
            .map_err(|e| Error::Domain(format!("invalid lattice: {e}")))?;
        let boundary = if periodic {
            Boundary::Periodic
        } else {
            Boundary::Reject
        };
        let field = curvature_field(&lattice, coupling, boundary)?;
        let mut worst = Max::new();
        let mut sites = Vec::with_capacity(field.len());
        for (x, c) in &field {
            let report = evaluate(c)?;
            worst.add(report.fos_mismatch());
            sites.push(json!({"site": x, "f": c.f, "report": report}));
        }
        let passed = worst.within(ISO_TOL);
        Ok(Outcome::checked(
            json!({
                "extent": lattice.extent(),
                "g": coupling,
                "boundary": boundary,
                "sites": sites,
                "max_fos_mismatch": worst.0,
                "tolerance": ISO_TOL,
                "passed": passed,
            }),
            passed,
        ))
    } else {
        Err(Error::Domain(
            "input needs either \"configs\" or a lattice \"extent\"".into(),
        ))
    }
}

fn frobenius(x: &RealSymmetric) -> f64 {
    x.distance(&RealSymmetric::zeros(x.dim()))
}

pub fn grassmann_roundtrip(n: usize, samples: usize, seed: u64) -> CmdResult {
    require_dim(n)?;
    require_samples(samples)?;
    let mut rng = seeded(seed);
    let mut forward = Max::new();
    let mut inverse = Max::new();
    let mut scalar = Max::new();
    let mut skipped = 0usize;

    for _ in 0..samples {
        let chart = Chart::new(haar_unitary_with(n, &mut rng))?;
        let point = make_point(&haar_unitary_with(n, &mut rng))?;
        let x = RealSymmetric::new(n, real_symmetric(n, 2.0, &mut rng))?;

        let back = chart_forward(&chart_inverse(&x, &chart)?, &chart)?;
        inverse.add(back.distance(&x) / frobenius(&x).max(1.0));

        if !in_chart(&point, &chart)? {
            skipped += 1;
            continue;
        }
        let coords = chart_forward(&point, &chart)?;
        forward.add(
            chart_inverse(&coords, &chart)?
                .matrix()
                .distance(point.matrix()),
        );

        if n == 1 {
            // φ_A(e^{iθ}) = 2 tan(ψ/2) with e^{iψ} = Ā² e^{iθ}
            let a = chart.base()[(0, 0)];
            let psi = (a.conj() * a.conj() * point.matrix()[(0, 0)]).arg();
            let expect = 2.0 * (psi / 2.0).tan();
            scalar.add((coords.entries()[0] - expect).abs() / expect.abs().max(1.0));
        }
    }

    let mut passed = forward.within(ROUNDTRIP_TOL) && inverse.within(ROUNDTRIP_TOL);
    let mut payload = json!({
        "action": "roundtrip",
        "n": n,
        "samples": samples,
        "seed": seed,
        "skipped_out_of_chart": skipped,
        "max_omega_phi_residual": forward.0,
        "max_phi_omega_residual": inverse.0,
        "tolerance": ROUNDTRIP_TOL,
    });
    if n == 1 {
        passed &= scalar.within(ROUNDTRIP_TOL);
        payload["max_scalar_cayley_residual"] = json!(scalar.0);
    }
    payload["passed"] = json!(passed);
    Ok(Outcome::checked(payload, passed))
}

pub fn grassmann_transition(n: usize, samples: usize, seed: u64) -> CmdResult {
    require_dim(n)?;
    require_samples(samples)?;
    let mut rng = seeded(seed);
    let mut worst = Max::new();
    let mut out_of_chart = 0usize;
    let mut singular = 0usize;

    for _ in 0..samples {
        let from = Chart::new(haar_unitary_with(n, &mut rng))?;
        let to = Chart::new(haar_unitary_with(n, &mut rng))?;
        let x = RealSymmetric::new(n, real_symmetric(n, 1.0, &mut rng))?;
        let closed = match transition(&x, &from, &to) {
            Ok(y) => y,
            Err(Error::OutOfChart(_)) => {
                out_of_chart += 1;
                continue;
            }
            Err(Error::TransitionDomain(_)) => {
                singular += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let composed = chart_forward(&chart_inverse(&x, &from)?, &to)?;
        worst.add(closed.distance(&composed) / frobenius(&composed).max(1.0));
    }

    let passed = worst.within(TRANSITION_TOL);
    Ok(Outcome::checked(
        json!({
            "action": "transition",
            "n": n,
            "samples": samples,
            "seed": seed,
            "skipped_out_of_chart": out_of_chart,
            "skipped_singular": singular,
            "max_relative_residual": worst.0,
            "tolerance": TRANSITION_TOL,
            "passed": passed,
        }),
        passed,
    ))
}

fn require_dim(n: usize) -> Result<(), Error> {
    if n == 0 {
        return Err(Error::Bounds("--n must be at least 1".into()));
    }
    Ok(())
}

pub fn spinrep(samples: usize, seed: u64) -> CmdResult {
    require_samples(samples)?;
    let mut rng = seeded(seed);
    let mut homomorphism = Max::new();
    let mut orthogonal = Max::new();
    let mut identity = Max::new();
    let mut clebsch = Max::new();
    let mut kernel = Max::new();

    for _ in 0..samples {
        let (g, h) = (random_su2(&mut rng), random_su2(&mut rng));
        let (rg, rh) = (rho(&g), rho(&h));
        homomorphism.add(rho(&g.compose(&h)).distance(&(&rg * &rh)));
        let gram = &rg.transpose() * &rg;
        orthogonal.add(
            gram.distance(&ComplexMatrix::identity(3))
                .max((rg.determinant()? - 1.0).norm()),
        );
        kernel.add(rho(&g.negated()).distance(&rg));
        identity.add(iota_tilde(&g).distance(&twisted_tensor_square(&g)));
        clebsch.add(clebsch_check(&g));
    }

    let passed = [&homomorphism, &orthogonal, &identity, &clebsch, &kernel]
        .iter()
        .all(|m| m.within(SPIN_TOL));
    Ok(Outcome::checked(
        json!({
            "samples": samples,
            "seed": seed,
            "tolerance": SPIN_TOL,
            "max_homomorphism_residual": homomorphism.0,
            "max_so3_residual": orthogonal.0,
            "max_kernel_residual": kernel.0,
            "max_iota_tilde_residual": identity.0,
            "max_clebsch_residual": clebsch.0,
            "passed": passed,
        }),
        passed,
    ))
}

/// Angles accept a trailing `pi` factor, e.g. `-0.5pi`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.strip_suffix("pi") {
        Some("") => PI,
        Some("-") => -PI,
        Some(m) => m.parse::<f64>().map_err(|e| format!("{s:?}: {e}"))? * PI,
        None => s.parse::<f64>().map_err(|e| format!("{s:?}: {e}"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}
