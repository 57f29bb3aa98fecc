//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails.

use std::f64::consts::{PI, SQRT_2};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use bellnoise::correlation::{
    classical_joint, classical_match_delta, maximize_chsh, chsh, quantum_joint, Angle, CorrelationModel, JointDistribution,
    Settings4, SpinConvention,
};
use bellnoise::distortion::{
    affine_distort, distort_state, inhibition_steady_state, to_complement_form, DistortionParams, InhibitionNetwork,
    critical_visibility_chsh,
};
use bellnoise::quantum_state::{
    born_probabilities, min_partial_transpose_eigenvalue, werner_separability_threshold, werner_state, DensityMatrix,
    Matrix4, Visibility,
};
use bellnoise::trial_sim::{
    breilmann_trial, cell_index, estimate_chsh, sample_pair, BreilmannConfig, OutcomeRule, PopulationConfig,
    StreamFactory, TraitDistribution,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn three_point_agreement() -> Check {
    let half = SpinConvention::Half;
    let mut worst: f64 = 0.0;
    for d in [0.0, PI / 2.0, PI] {
        worst = worst.max(classical_joint(Angle(d), Angle(0.0)).max_abs_diff(&quantum_joint(Angle(d), Angle(0.0), half)));
    }
    let gap = classical_joint(Angle(PI / 4.0), Angle(0.0)).max_abs_diff(&quantum_joint(Angle(PI / 4.0), Angle(0.0), half));
    ensure(worst <= 1e-12 && gap >= 0.05, format!("max diff at 0, π/2, π = {worst:.1e}; diff at π/4 = {gap:.4}"))
}

fn matching_soundness() -> Check {
    let mut r = rng(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let dq = r.random::<f64>() * PI;
        let dc = classical_match_delta(dq, SpinConvention::Half);
        worst = worst.max(classical_joint(Angle(dc), Angle(0.0)).max_abs_diff(&quantum_joint(Angle(dq), Angle(0.0), SpinConvention::Half)));
    }
    ensure(worst <= 1e-12, format!("1000 random Δq, max entrywise diff {worst:.1e}"))
}

fn chsh_maxima() -> Check {
    let q = maximize_chsh(&CorrelationModel::quantum_half()).value;
    let c = maximize_chsh(&CorrelationModel::ClassicalLinear).value;
    let mut r = rng(3);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100_000 {
        let s = Settings4::from_array(std::array::from_fn(|_| r.random_range(-2.0 * PI..2.0 * PI)));
        worst = worst.max(chsh(&CorrelationModel::ClassicalLinear, &s).abs());
    }
    ensure(
        (q - 2.0 * SQRT_2).abs() <= 1e-6 && (c - 2.0).abs() <= 1e-6 && worst <= 2.0 + 1e-9,
        format!("quantum max {q:.10}, classical max {c:.10}, classical random max {worst:.12}"),
    )
}

fn werner_threshold() -> Check {
    let v = werner_separability_threshold(1e-6).map_err(|e| e.to_string())?.value();
    let analytic = (1.0 - 3.0 * v) / 4.0;
    let numeric = min_partial_transpose_eigenvalue(&werner_state(Visibility::new(v).unwrap()));
    ensure(
        (v - 1.0 / 3.0).abs() <= 1e-6 && (analytic - numeric).abs() <= 1e-12,
        format!("threshold {v:.9}; PT min eigenvalue {numeric:.3e} vs (1−3V)/4 = {analytic:.3e}"),
    )
}

fn critical_visibility() -> Check {
    let v = critical_visibility_chsh(1e-4).map_err(|e| e.to_string())?.value();
    let sep = werner_separability_threshold(1e-6).map_err(|e| e.to_string())?.value();
    ensure(
        (v - 1.0 / SQRT_2).abs() <= 1e-4 && sep < v,
        format!("critical V {v:.6}; entangled yet CHSH-undetectable window ({sep:.6}, {v:.6})"),
    )
}

fn random_state(r: &mut ChaCha8Rng) -> DensityMatrix {
    let mut g = Matrix4::zeros();
    for row in g.0.iter_mut() {
        for x in row.iter_mut() {
            *x = Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
        }
    }
    DensityMatrix::from_gram(&g).unwrap()
}

fn state_commutation() -> Check {
    let mut r = rng(6);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let rho = random_state(&mut r);
        let v = r.random::<f64>();
        let (a, b) = (Angle(r.random_range(-PI..PI)), Angle(r.random_range(-PI..PI)));
        let lhs = born_probabilities(&distort_state(&rho, v).unwrap(), a, b).as_array();
        let params = DistortionParams::new((v - 1.0) / 4.0, 4).unwrap();
        let rhs = affine_distort(&born_probabilities(&rho, a, b).as_array(), &params).unwrap();
        for (x, y) in lhs.iter().zip(rhs.entries()) {
            worst = worst.max((x - y).abs());
        }
    }
    ensure(worst <= 1e-12, format!("50 random (ρ, V, a, b), max entrywise diff {worst:.1e}"))
}

fn monte_carlo_fidelity() -> Check {
    let m = CorrelationModel::quantum_half();
    let mut stream = StreamFactory::new(7).stream(0);
    let mut counts = [0u64; 4];
    for _ in 0..1_000_000 {
        counts[cell_index(sample_pair(&m, Angle(PI / 3.0), Angle(0.0), &mut stream).map_err(|e| e.to_string())?)] += 1;
    }
    let expected = [0.125, 0.375, 0.375, 0.125];
    let freq_err = counts
        .iter()
        .zip(expected)
        .map(|(c, e)| (*c as f64 / 1e6 - e).abs())
        .fold(0.0, f64::max);
    let est = estimate_chsh(&PopulationConfig::fixed(m, Settings4::standard(), 1_000_000, 8)).map_err(|e| e.to_string())?;
    let s_err = (est.s_hat.abs() - 2.0 * SQRT_2).abs();
    ensure(
        freq_err <= 0.002 && s_err <= 0.01,
        format!("max cell frequency error {freq_err:.5}; |s_hat| = {:.5} ± {:.5}", est.s_hat.abs(), est.stderr),
    )
}

fn breilmann_bias() -> Check {
    let indicator = breilmann_trial(&BreilmannConfig::indicator(1_000_000, 0.5, 9)).map_err(|e| e.to_string())?;
    let null = breilmann_trial(&BreilmannConfig {
        n_patients: 1_000_000,
        trait_distribution: TraitDistribution::Uniform,
        compliance_threshold: 0.5,
        outcome_rule: OutcomeRule::Constant { p: 0.5 },
        pill_effect: 0.0,
        seed: 10,
    })
    .map_err(|e| e.to_string())?;
    let effect = null.apparent_effect.ok_or("null trial degenerate")?;
    let se = null.standard_error().ok_or("null trial degenerate")?;
    ensure(
        indicator.observed_rate_treated == Some(1.0) && indicator.true_causal_effect == 0.0 && effect.abs() <= 4.0 * se,
        format!(
            "complier pass rate {:?}, true effect {}; null apparent effect {effect:.5} (4 SE = {:.5})",
            indicator.observed_rate_treated,
            indicator.true_causal_effect,
            4.0 * se
        ),
    )
}

fn distortion_algebra() -> Check {
    let mut r = rng(11);
    let (mut worst_form, mut worst_offset): (f64, f64) = (0.0, 0.0);
    for _ in 0..10_000 {
        let k = r.random_range(2..10usize);
        let b = r.random_range(-1.0..1.0);
        let p = r.random::<f64>();
        let d = DistortionParams::new(b, k).unwrap();
        worst_form = worst_form.max((d.apply(p) - to_complement_form(&d).apply(p)).abs());

        let raw: [f64; 4] = std::array::from_fn(|_| r.random::<f64>() + 1e-9);
        let total: f64 = raw.iter().sum();
        let mut q = raw.map(|x| x / total);
        q[3] = 1.0 - q[0] - q[1] - q[2];
        let d4 = DistortionParams::new(r.random_range(-0.5..0.5), 4).unwrap();
        let e = JointDistribution::from_array(q).unwrap().correlation();
        let e_dist = affine_distort(&q, &d4).unwrap().correlation().unwrap();
        worst_offset = worst_offset.max((e_dist - d4.s() * e).abs());
    }
    let m = CorrelationModel::with_visibility(CorrelationModel::quantum_half(), 0.6).unwrap();
    let est = estimate_chsh(&PopulationConfig::fixed(m, Settings4::standard(), 1_000_000, 12)).map_err(|e| e.to_string())?;
    ensure(
        worst_form <= 1e-14 && worst_offset <= 1e-14 && (est.s_hat.abs() - 1.697).abs() <= 0.02,
        format!(
            "complement-form diff {worst_form:.1e}, offset-cancellation diff {worst_offset:.1e}; V=0.6 |s_hat| = {:.4}",
            est.s_hat.abs()
        ),
    )
}

fn lateral_inhibition() -> Check {
    let mut worst: f64 = 0.0;
    for (x, w) in [([1.0, 1.0], 0.5), ([1.0, 0.0], 0.5), ([0.3, 0.8], 0.9), ([2.0, 0.5], 0.1)] {
        let net = InhibitionNetwork::uniform(x.to_vec(), w, false).map_err(|e| e.to_string())?;
        let y = inhibition_steady_state(&net).map_err(|e| e.to_string())?;
        let closed = [(x[0] - w * x[1]) / (1.0 - w * w), (x[1] - w * x[0]) / (1.0 - w * w)];
        worst = worst.max((y[0] - closed[0]).abs()).max((y[1] - closed[1]).abs());
    }
    let rect = InhibitionNetwork::uniform(vec![1.0, 0.0], 0.5, true).map_err(|e| e.to_string())?;
    let y = inhibition_steady_state(&rect).map_err(|e| e.to_string())?;
    let rect_err = (y[0] - 1.0).abs().max(y[1].abs());
    ensure(worst <= 1e-10 && rect_err <= 1e-10, format!("closed-form diff {worst:.1e}; rectified (1,0) diff {rect_err:.1e}"))
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let pop = dir.path().join("pop.json");
    std::fs::write(
        &pop,
        r#"{"version": 1, "n_patients": 200000,
            "angle_mode": {"jittered": {"settings": {"a": 0, "a_prime": 1.5707963267948966, "b": 0.7853981633974483, "b_prime": 2.356194490192345}, "spread": 0.4}},
            "source_model": "quantum_half"}"#,
    )
    .map_err(|e| e.to_string())?;
    let bre = dir.path().join("b.json");
    std::fs::write(
        &bre,
        r#"{"version": 1, "n_patients": 200000, "trait_distribution": {"beta": {"alpha": 2, "beta": 3}},
            "compliance_threshold": 0.4, "outcome_rule": {"linear": {"intercept": 0.2, "slope": 0.6}}}"#,
    )
    .map_err(|e| e.to_string())?;

    let run = |sub: &str, cfg: &Path, threads: &str, tag: &str| -> Result<Vec<u8>, String> {
        let out = dir.path().join(format!("{sub}-{tag}.json"));
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_bellnoise"));
        cmd.args([sub, "--config", cfg.to_str().unwrap(), "--seed", "2718", "--threads", threads, "--out"])
            .arg(&out)
            .env_remove("BELLNOISE_SEED");
        if sub == "masking" {
            cmd.args(["--visibility", "0.6"]);
        }
        let status = cmd.status().map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("{sub} exited with {status}"));
        }
        std::fs::read(&out).map_err(|e| e.to_string())
    };

    let mut compared = 0;
    for (sub, cfg) in [("trial", &pop), ("breilmann", &bre), ("masking", &pop)] {
        let first = run(sub, cfg, "1", "a")?;
        let second = run(sub, cfg, "1", "b")?;
        let parallel = run(sub, cfg, "4", "c")?;
        if first != second || first != parallel {
            return Err(format!("{sub}: outputs differ between runs or thread counts"));
        }
        compared += 1;
    }
    Ok(format!("{compared} seeded subcommands byte-identical across reruns and 1 vs 4 threads"))
}

fn main() {
    let criteria: [(&str, fn() -> Check, Duration); 11] = [
        ("three-point agreement", three_point_agreement, Duration::from_secs(1)),
        ("matching soundness", matching_soundness, Duration::from_secs(1)),
        ("CHSH maxima", chsh_maxima, Duration::from_secs(10)),
        ("Werner separability threshold", werner_threshold, Duration::from_secs(1)),
        ("critical CHSH visibility", critical_visibility, Duration::from_secs(60)),
        ("state/probability commutation", state_commutation, Duration::from_secs(1)),
        ("Monte Carlo fidelity", monte_carlo_fidelity, Duration::from_secs(30)),
        ("self-selection bias", breilmann_bias, Duration::from_secs(30)),
        ("distortion algebra", distortion_algebra, Duration::from_secs(30)),
        ("lateral inhibition", lateral_inhibition, Duration::from_secs(1)),
        ("determinism", determinism, Duration::from_secs(120)),
    ];

    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let over = elapsed > *budget;
        let (status, detail) = match (&result, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; exceeded {budget:?} budget")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} [{:>2}] {name}: {detail} ({:.2?})", i + 1, elapsed);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
