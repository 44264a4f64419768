//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::time::Instant;

use meanlab::conjecture::{conjecture_search_le_omega, replay, ConjectureConfig};
use meanlab::suites::run_verification_suite;
use meanlab::{MatrixFile, SuiteConfig, SuiteReport};
use meanlab_core::hpd::eig_hermitian;
use meanlab_core::sampling::{log_uniform, unitary_with, SamplerSpec};
use meanlab_core::{CMatrix, HermitianMatrix};
use num_complex::Complex64;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn suite(name: &str, seed: u64, trials: u64, dims: (usize, usize)) -> SuiteReport {
    let cfg = SuiteConfig::new(seed, trials, dims).expect("valid config");
    run_verification_suite(name, &cfg).expect("suite runs").report
}

fn failures_summary(r: &SuiteReport) -> String {
    let failed: Vec<_> = r
        .body
        .properties
        .iter()
        .filter(|p| p.gating && p.failures > 0)
        .map(|p| format!("{} ({} failures, worst {:?})", p.name, p.failures, p.worst_margin))
        .collect();
    if failed.is_empty() {
        format!("{} trials, 0 failures", r.body.trials)
    } else {
        failed.join("; ")
    }
}

fn worst_gating_margin(r: &SuiteReport) -> f64 {
    r.body
        .properties
        .iter()
        .filter(|p| p.gating)
        .filter_map(|p| p.worst_margin)
        .fold(f64::INFINITY, f64::min)
}

fn relation_chain() -> Outcome {
    let started = Instant::now();
    let r = suite("relation-chain", 1, 2000, (2, 8));
    let secs = started.elapsed().as_secs_f64();
    outcome(r.passed() && secs <= 60.0, format!("{}, {secs:.1}s", failures_summary(&r)))
}

fn equivalence() -> Outcome {
    let r = suite("equivalence-7way", 2, 500, (2, 8));
    let p = r.property("seven conditions agree").expect("declared");
    outcome(r.passed() && p.trials == 500, failures_summary(&r))
}

fn mono_parameters() -> Outcome {
    let r = suite("mono-parameters", 3, 500, (2, 6));
    let chain_worst = r
        .body
        .properties
        .iter()
        .filter(|p| p.name != "constant tuple margins vanish")
        .filter_map(|p| p.worst_margin)
        .fold(f64::INFINITY, f64::min);
    outcome(
        r.passed() && chain_worst >= -1e-8,
        format!("{}, worst link margin {chain_worst:.3e}", failures_summary(&r)),
    )
}

fn mono_sp_wass() -> Outcome {
    let r = suite("mono-sp-wass", 4, 500, (2, 8));
    outcome(r.passed(), failures_summary(&r))
}

fn renyi_solver() -> Outcome {
    let props = suite("renyi-properties", 5, 500, (2, 8));
    let logdet = suite("renyi-logdet", 5, 500, (2, 8));
    outcome(
        props.passed() && logdet.passed(),
        format!("properties: {}; log-det: {}", failures_summary(&props), failures_summary(&logdet)),
    )
}

fn renyi_quasi_le() -> Outcome {
    let quasi = suite("renyi-quasi", 6, 200, (2, 8));
    let le = suite("renyi-le", 6, 200, (2, 8));
    let conforming = ["below identity: mean ≤ I", "above identity: I ≤ mean"]
        .iter()
        .all(|n| quasi.property(n).is_some_and(|p| p.vacuous == 0 && p.trials > 0));
    outcome(
        quasi.passed() && le.passed() && conforming,
        format!(
            "quasi: {}, worst {:.2e}; le: {}, worst {:.2e}",
            failures_summary(&quasi),
            worst_gating_margin(&quasi),
            failures_summary(&le),
            worst_gating_margin(&le)
        ),
    )
}

fn lie_trotter() -> Outcome {
    let started = Instant::now();
    let r = suite("lie-trotter", 7, 20, (2, 4));
    let secs = started.elapsed().as_secs_f64();
    let s = &r.body.summary;
    outcome(
        r.passed() && secs <= 30.0,
        format!(
            "{}, order in [{:.3}, {:.3}], max terminal error {:.2e}, {secs:.1}s",
            failures_summary(&r),
            s["min estimated order"].as_f64().unwrap_or(f64::NAN),
            s["max estimated order"].as_f64().unwrap_or(f64::NAN),
            s["max terminal error"].as_f64().unwrap_or(f64::NAN),
        ),
    )
}

fn cartan_le_wass() -> Outcome {
    let r = suite("cartan-le-wass", 8, 200, (2, 8));
    outcome(r.passed(), failures_summary(&r))
}

fn eigensolver() -> Outcome {
    let base = SamplerSpec::new(9, 2, (1.0, 1.0), 1000).expect("valid spec");
    let (mut worst_rec, mut worst_unit) = (0.0f64, 0.0f64);
    for trial in 0..1000 {
        let spec = base.for_trial(trial);
        let mut rng = spec.rng("eigensolver");
        let dim = rng.random_range(2..=16);
        let cond = log_uniform(&mut rng, 1.0, 1e8);
        let indefinite = trial % 2 == 1;
        let lambdas: Vec<f64> = (0..dim)
            .map(|k| {
                let l = if k == 0 { 1.0 } else if k == 1 { cond } else { log_uniform(&mut rng, 1.0, cond) };
                if indefinite && rng.random::<bool>() { -l } else { l }
            })
            .collect();
        let u = unitary_with(&mut rng, dim);
        let d = CMatrix::from_fn(dim, dim, |i, j| Complex64::new(if i == j { lambdas[i] } else { 0.0 }, 0.0));
        let h = HermitianMatrix::new(&u * d * u.adjoint()).expect("hermitian");
        let e = eig_hermitian(&h).expect("eigensolver");
        let scale = h.operator_norm().expect("norm").max(1.0);
        worst_rec = worst_rec.max(e.reconstruction_residual(&h).expect("residual") / scale);
        worst_unit = worst_unit.max(e.unitarity_residual().expect("residual"));
    }
    outcome(
        worst_rec <= 1e-12 && worst_unit <= 1e-12,
        format!("1000 matrices, worst scaled reconstruction {worst_rec:.2e}, unitarity {worst_unit:.2e}"),
    )
}

fn determinism() -> Outcome {
    let mut same = true;
    for name in ["mono-parameters", "renyi-properties", "lie-trotter"] {
        let a = suite(name, 10, 20, (2, 5)).body_json().expect("json");
        let b = suite(name, 10, 20, (2, 5)).body_json().expect("json");
        same &= a == b;
    }
    let base = SamplerSpec::new(10, 2, (1.0, 1.0), 1).expect("valid spec");
    let mut exact = true;
    for trial in 0..200 {
        let mut rng = base.for_trial(trial).rng("round-trip");
        let dim = rng.random_range(1..=8);
        let m = CMatrix::from_fn(dim, dim, |_, _| {
            let mag = 10f64.powf(rng.random_range(-300.0..300.0));
            Complex64::new(mag * rng.random_range(-1.0..1.0), mag * rng.random_range(-1.0..1.0))
        });
        let file = MatrixFile::from_matrix(&m, Some("m"));
        let back = MatrixFile::from_json(&file.to_json().expect("json"), std::path::Path::new("mem"))
            .expect("parse")
            .to_matrix()
            .expect("shape");
        exact &= m
            .iter()
            .zip(back.iter())
            .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits());
    }
    outcome(same && exact, format!("report bodies identical: {same}, matrix round-trip bit-exact: {exact}"))
}

fn conjecture() -> Outcome {
    let cfg = ConjectureConfig::new(11, 2000).expect("valid config");
    let out = conjecture_search_le_omega(&cfg).expect("search completes");
    let min = out.minimum_margin().unwrap_or(f64::NAN);
    let negatives = out.report.body.summary["negative_trials"].as_u64().unwrap_or(0);
    let dir = tempfile::tempdir().expect("tempdir");
    let Some(inst) = out.negatives.first().or(out.minimum.as_ref()) else {
        return outcome(false, "no trial completed");
    };
    let path = inst.dump(dir.path()).expect("dump");
    let (_, replayed) = replay(&path, &cfg.tolerance).expect("replay");
    let recorded = inst.param("margin").expect("margin");
    let diff = (replayed - recorded).abs();
    outcome(
        out.report.body.trials == 2000 && diff <= 1e-10,
        format!(
            "minimum margin {min:.4e}, {negatives} negative trials, replay of trial {} differs by {diff:.1e}",
            inst.trial
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("relation chain, 2000 trials within 60 s", relation_chain),
        ("seven-way near-order equivalence", equivalence),
        ("quasi-arithmetic monotonicity in the parameter", mono_parameters),
        ("spectral geometric and Wasserstein monotonicity iff", mono_sp_wass),
        ("Rényi solver and properties", renyi_solver),
        ("Rényi against quasi-arithmetic and log-Euclidean", renyi_quasi_le),
        ("Lie-Trotter first-order convergence within 30 s", lie_trotter),
        ("Karcher, log-Euclidean and barycenter bounds", cartan_le_wass),
        ("eigensolver residuals", eigensolver),
        ("determinism and matrix file round-trip", determinism),
        ("LE ⪯ Ω search with replay", conjecture),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {verdict} {name}: {} [{:.1}s]",
            k + 1,
            o.detail,
            started.elapsed().as_secs_f64()
        );
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
