//! End-to-end acceptance checks. Each test writes one `PASS`/`FAIL` line per
//! criterion to stderr (bypassing the capture) before asserting.

use std::io::Write;
use std::time::Instant;

use pauliblad::generator::{generator_to_channel, DEFAULT_CP_TOL};
use pauliblad::learning::{self, builtin_truth, LearnConfig, Strategy};
use pauliblad::mitigation::{compile, estimate_expectations, pea_overhead, pec_overhead, Background, Mode};
use pauliblad::random_channels::{
    analytic_mean_min_rate, analytic_prob_negative, sample_channel, scan_one, RandomChannelConfig, Sampler,
};
use pauliblad::twirl::{self, GateNoise};
use pauliblad::{channel_to_generator, MarkovClass, PauliChannel, PauliOp, PseudoLindblad};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: &str, ok: bool, detail: &str) {
    let status = if ok { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "[acceptance {id}] {status} {detail}");
}

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.2e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn random_real_generator(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> PseudoLindblad {
    let d = 1usize << (2 * n);
    let terms = rng.random_range(1..=4.min(d - 1));
    let mut out = Vec::new();
    for _ in 0..terms {
        let idx = rng.random_range(1..d);
        out.push((PauliOp::from_index(idx, n).unwrap(), rng.random_range(lo..hi)));
    }
    PseudoLindblad::from_real_terms(n, out).unwrap()
}

#[test]
fn criterion_01_round_trip() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut checked = 0;
    let mut index = 0u64;
    while checked < 1000 {
        let n = 1 + (index % 3) as usize;
        let r = 0.3 * (1.0 + (index % 997) as f64) / 997.0;
        let cfg = RandomChannelConfig::new(n, r, 1, 2024, Sampler::Simplex);
        let ch = sample_channel(&cfg, index).unwrap();
        index += 1;
        if ch.fidelities().values().iter().any(|f| f.norm() <= 1e-6) {
            continue;
        }
        let back = generator_to_channel(&channel_to_generator(&ch).unwrap()).unwrap();
        worst = worst.max(back.max_abs_diff(&ch));
        checked += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = worst <= 1e-9 && secs < 10.0;
    report("1", ok, &format!("1000 channels, max |p' - p| = {worst:.3e} (<= 1e-9), {secs:.2}s (< 10s)"));
    assert!(ok);
}

#[test]
fn criterion_02_single_qubit_example() {
    let mut ok = true;
    let mut worst = 0.0f64;
    for p in [0.05, 0.1, 0.2, 0.3, 0.45] {
        let ch = PauliChannel::new(1, vec![p, 0.0, 1.0 - 2.0 * p, p]).unwrap();
        let f = ch.fidelities();
        let want = [2.0 * p - 1.0, 1.0 - 2.0 * p, 4.0 * p - 1.0];
        for (k, w) in want.iter().enumerate() {
            worst = worst.max((f.values()[k + 1] - w).norm());
        }
        let class = channel_to_generator(&ch).unwrap().classify(0.0).class;
        let negative = f.real_parts().iter().any(|v| *v < 0.0);
        ok &= class == MarkovClass::ComplexRates && negative;
    }
    ok &= worst <= 1e-12;
    report("2", ok, &format!("fidelity error {worst:.3e} (<= 1e-12); complex rates and a negative fidelity at every p"));
    assert!(ok);
}

const CRIT3_N: [usize; 3] = [2, 3, 4];
const CRIT3_R: [f64; 5] = [0.001, 0.003, 0.01, 0.03, 0.09];
const CRIT_TRIALS: usize = 20_000;

#[test]
fn criterion_03_probability_of_negative_rate() {
    let start = Instant::now();
    let mut ok = true;
    let mut simplex = Vec::new();
    for n in CRIT3_N {
        for r in CRIT3_R {
            let row = scan_one(&RandomChannelConfig::new(n, r, CRIT_TRIALS, 3, Sampler::Simplex)).unwrap();
            simplex.push((row.p_neg_mc, row.p_neg_stderr));
            let analytic = analytic_prob_negative(n, r);
            let tol = 0.03f64.max(3.0 * row.p_neg_stderr);
            let diff = (row.p_neg_mc - analytic).abs();
            let pass = diff <= tol;
            ok &= pass;
            report(
                "3",
                pass,
                &format!(
                    "simplex n={n} r={r}: mc {:.4} +- {:.4}, analytic {analytic:.4}, |diff| {diff:.4} (tol {tol:.4})",
                    row.p_neg_mc, row.p_neg_stderr
                ),
            );
        }
    }
    // Supplementary: the independent-uniform ensemble the analytic result is derived for,
    // and its distance from the simplex ensemble.
    let mut simplex = simplex.into_iter();
    for n in CRIT3_N {
        for r in CRIT3_R {
            let (sp, sse) = simplex.next().unwrap();
            let row = scan_one(&RandomChannelConfig::new(n, r, CRIT_TRIALS, 3, Sampler::IndependentUniform)).unwrap();
            let analytic = analytic_prob_negative(n, r);
            let tol = 0.03f64.max(3.0 * row.p_neg_stderr);
            let diff = (row.p_neg_mc - analytic).abs();
            report(
                "3 supplementary",
                diff <= tol,
                &format!("independent-uniform n={n} r={r}: mc {:.4}, analytic {analytic:.4}, |diff| {diff:.4}", row.p_neg_mc),
            );
            if n >= 3 {
                let combined = (sse * sse + row.p_neg_stderr * row.p_neg_stderr).sqrt();
                let gap = (sp - row.p_neg_mc).abs();
                report(
                    "3 supplementary",
                    gap <= 2.0 * combined,
                    &format!("sampler equivalence n={n} r={r}: simplex {sp:.4} vs uniform {:.4}, gap {gap:.4} (2 combined stderr {:.4})", row.p_neg_mc, 2.0 * combined),
                );
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 300.0;
    report("3", ok, &format!("overall, {secs:.1}s (< 300s)"));
    assert!(ok, "Monte Carlo disagrees with the analytic probability; see the lines above");
}

#[test]
fn criterion_04_mean_minimum_rate() {
    let r = 0.09;
    let mut ok = true;
    let mut stds = Vec::new();
    for n in CRIT3_N {
        let row = scan_one(&RandomChannelConfig::new(n, r, CRIT_TRIALS, 4, Sampler::Simplex)).unwrap();
        let analytic = analytic_mean_min_rate(n, r);
        let z = (row.mean_min_mc - analytic).abs() / row.mean_min_stderr;
        let pass = z <= 3.0;
        ok &= pass;
        stds.push(row.min_rate_std);
        report(
            "4",
            pass,
            &format!(
                "simplex n={n}: mean {:.4e} +- {:.2e}, analytic {analytic:.4e}, {z:.1} stderr (<= 3)",
                row.mean_min_mc, row.mean_min_stderr
            ),
        );
    }
    let monotone = stds.windows(2).all(|w| w[1] < w[0]);
    ok &= monotone;
    report("4", monotone, &format!("std of lambda_min decreasing in n: {}", sci(&stds)));
    for n in CRIT3_N {
        let row = scan_one(&RandomChannelConfig::new(n, r, CRIT_TRIALS, 4, Sampler::IndependentUniform)).unwrap();
        let analytic = analytic_mean_min_rate(n, r);
        let z = (row.mean_min_mc - analytic).abs() / row.mean_min_stderr;
        report(
            "4 supplementary",
            z <= 3.0,
            &format!("independent-uniform n={n}: mean {:.4e}, analytic {analytic:.4e}, {z:.1} stderr", row.mean_min_mc),
        );
    }
    report("4", ok, "overall");
    assert!(ok, "Monte Carlo mean of lambda_min disagrees with the analytic value; see the lines above");
}

fn linspace(a: f64, b: f64, k: usize) -> Vec<f64> {
    (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect()
}

fn spectrum_diff(a: &pauliblad::SpectrumVector, b: &pauliblad::SpectrumVector) -> f64 {
    a.values().iter().zip(b.values()).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

#[test]
fn criterion_05_gate_closed_forms() {
    let mut worst = [0.0f64; 3];
    for omega in linspace(0.5, 2.0, 10) {
        for dt in linspace(0.01, 0.5, 10) {
            let p = twirl::hadamard_error_probability(omega * dt);
            let closed = GateNoise::Hadamard { omega_dt: omega * dt }.closed_form_fidelities();
            let numeric = twirl::hadamard_numeric(omega, dt).unwrap();
            assert!(p < 0.5);
            worst[0] = worst[0].max(spectrum_diff(&closed, &numeric));
        }
    }
    for dx in linspace(-0.3, 0.3, 10) {
        for dz in linspace(-0.3, 0.3, 10) {
            let closed = twirl::xpi_fidelities(dx, dz);
            worst[1] = worst[1].max(spectrum_diff(&closed, &twirl::xpi_numeric(dx, dz).unwrap()));
        }
    }
    for j in linspace(0.5, 2.0, 10) {
        for dk in linspace(0.05, 2.0, 10) {
            let closed = twirl::zz_t1_fidelities(dk);
            let numeric = twirl::zz_t1_numeric_at(j, dk, twirl::ErrorPlacement::AfterGate).unwrap();
            worst[2] = worst[2].max(spectrum_diff(&closed, &numeric));
        }
    }
    let grids_ok = worst.iter().all(|w| *w <= 1e-8);
    report("5", grids_ok, &format!("closed form vs numeric, max diff (hadamard, xpi, zz-t1) = {} (<= 1e-8)", sci(&worst)));

    let y_neg = (1..=240).all(|k| {
        let p = 0.001 * k as f64;
        twirl::hadamard_channel(p).unwrap().1.rate(&"Y".parse().unwrap()).re < 0.0
    });
    report("5", y_neg, "lambda_Y(hadamard) < 0 for p in (0, 0.24]");

    let grid = linspace(-0.05, 0.05, 10);
    let mut z_neg = true;
    for &dx in &grid {
        for &dz in &grid {
            let (_, g) = twirl::xpi_channel(dx, dz).unwrap();
            z_neg &= g.rate(&"Z".parse().unwrap()).re < 0.0;
        }
    }
    report("5", z_neg, "lambda_Z(xpi) < 0 on the 10x10 grid |dx|, |dz| <= 0.05");

    let zz_neg = (1..=200).all(|k| {
        let dk = 0.01 * k as f64;
        twirl::zz_t1_channel(dk).unwrap().1.rate(&"ZZ".parse().unwrap()).re < 0.0
    });
    report("5", zz_neg, "lambda_ZZ < 0 for dkappa in (0, 2]");

    let (_, g) = twirl::zz_t1_channel(0.05).unwrap();
    let exact = g.rate(&"ZZ".parse().unwrap()).re;
    let series = twirl::zz_t1_series(0.05).2;
    let rel = ((series - exact) / exact).abs();
    report("5", rel <= 1e-4, &format!("lambda_ZZ series at dkappa = 0.05: relative error {rel:.2e} (<= 1e-4)"));

    assert!(grids_ok && y_neg && z_neg && zz_neg && rel <= 1e-4);
}

#[test]
fn criterion_06_sampler_unbiasedness() {
    let shots = 100_000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let (mut inject_in, mut inject_total) = (0usize, 0usize);
    let (mut invert_in, mut invert_total) = (0usize, 0usize);
    for k in 0..20u64 {
        let n = 1 + (k % 2) as usize;
        let g = random_real_generator(&mut rng, n, -0.03, 0.08);
        let dense = generator_to_channel(&g).unwrap().fidelities();
        let obs: Vec<PauliOp> = PauliOp::all(n).skip(1).collect();

        let prog = compile(&g, Mode::Inject);
        let band = 4.0 * prog.total_gamma / (shots as f64).sqrt();
        for e in estimate_expectations(&g, &prog, Background::None, &obs, shots, 1000 + k) {
            inject_total += 1;
            inject_in += ((e.mean - dense.get(&e.observable).re).abs() <= band) as usize;
        }

        let exact_channel = generator_to_channel(&g).unwrap();
        let prog = compile(&g, Mode::Invert);
        let band = 4.0 * prog.total_gamma / (shots as f64).sqrt();
        for e in estimate_expectations(&g, &prog, Background::Channel(&exact_channel), &obs, shots, 2000 + k) {
            invert_total += 1;
            invert_in += ((e.mean - 1.0).abs() <= band) as usize;
        }
    }
    let inject_frac = inject_in as f64 / inject_total as f64;
    let ok_inject = inject_frac >= 0.95;
    let ok_invert = invert_in == invert_total;
    report("6", ok_inject, &format!("inject: {inject_in}/{inject_total} within 4 gamma/sqrt(shots) (>= 95%)"));
    report("6", ok_invert, &format!("invert + exact channel: {invert_in}/{invert_total} within the band of 1"));
    assert!(ok_inject && ok_invert);
}

#[test]
fn criterion_07_overheads() {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let n = 1 + k % 3;
        let g = random_real_generator(&mut rng, n, -0.05, 0.1);
        for alpha in [0.5, 1.0, 1.5, 2.0] {
            let rel = pea_overhead(&g, alpha) / compile(&g, Mode::Amplify(alpha)).total_gamma - 1.0;
            worst = worst.max(rel.abs());
        }
        let rel = pec_overhead(&g) / compile(&g, Mode::Invert).total_gamma - 1.0;
        worst = worst.max(rel.abs());
    }
    let mut markov_ok = true;
    for _ in 0..20 {
        let g = random_real_generator(&mut rng, 2, 0.0, 0.1);
        for alpha in [1.0, 1.5, 2.0] {
            markov_ok &= pea_overhead(&g, alpha) == 1.0;
        }
    }
    report("7", worst <= 1e-12, &format!("closed form vs prod |gamma_k|, max relative diff {worst:.2e} (<= 1e-12)"));
    report("7", markov_ok, "Markovian generators: PEA overhead exactly 1 for alpha in {1, 1.5, 2}");
    assert!(worst <= 1e-12 && markov_ok);
}

struct LearningRuns {
    mae_nonneg: Vec<f64>,
    mae_unc: Vec<f64>,
    negative_sign: usize,
    cp_ok: usize,
    monotone: usize,
    seeds: usize,
    secs: f64,
}

fn learning_runs() -> LearningRuns {
    let start = Instant::now();
    let truth = builtin_truth(4).unwrap();
    let negative: PauliOp = "IZZI".parse().unwrap();
    assert!(truth.rate(&negative).re == -0.004);
    let seeds = 50;
    let mut runs =
        LearningRuns { mae_nonneg: vec![], mae_unc: vec![], negative_sign: 0, cp_ok: 0, monotone: 0, seeds, secs: 0.0 };
    for seed in 0..seeds as u64 {
        let mut cfg = LearnConfig::chain(4, seed);
        cfg.strategies = vec![Strategy::NonNegative, Strategy::Unconstrained];
        let rep = learning::run_learning(&truth, &cfg).unwrap();
        let nn = rep.fit(Strategy::NonNegative).unwrap();
        let un = rep.fit(Strategy::Unconstrained).unwrap();
        runs.mae_nonneg.push(nn.holdout_mae);
        runs.mae_unc.push(un.holdout_mae);
        runs.negative_sign += (un.rates.rate(&negative).re < 0.0) as usize;
        let cp = learning::fit_cp(&un.rates).unwrap();
        let regenerated = generator_to_channel(&cp.rates).unwrap();
        runs.cp_ok += (cp.channel.is_cptp(DEFAULT_CP_TOL) && regenerated.is_cptp(DEFAULT_CP_TOL)) as usize;
        runs.monotone += cp.objective.windows(2).all(|w| w[1] <= w[0]) as usize;
    }
    runs.secs = start.elapsed().as_secs_f64();
    runs
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 0 {
        0.5 * (s[m - 1] + s[m])
    } else {
        s[m]
    }
}

#[test]
fn criterion_08_and_10_learning() {
    let runs = learning_runs();
    let (mn, mu) = (median(&runs.mae_nonneg), median(&runs.mae_unc));
    let frac = runs.negative_sign as f64 / runs.seeds as f64;
    let ok8 = mu < mn && frac >= 0.9 && runs.secs < 120.0;
    report(
        "8",
        ok8,
        &format!(
            "median holdout MAE unconstrained {mu:.3e} < non-negative {mn:.3e}; negative rate sign recovered in {:.0}% (>= 90%); {:.1}s (< 120s)",
            100.0 * frac,
            runs.secs
        ),
    );
    let ok10 = runs.cp_ok == runs.seeds && runs.monotone == runs.seeds;
    report(
        "10",
        ok10,
        &format!("CP projection CPTP on {}/{} runs, objective monotone on {}/{}", runs.cp_ok, runs.seeds, runs.monotone, runs.seeds),
    );
    assert!(ok8 && ok10);
}

#[test]
fn criterion_09_nnls() {
    use nalgebra::DVector;
    let basis = learning::LocalBasis::chain(1).unwrap();
    let m = learning::design_matrix(&basis.paulis, &basis.paulis);
    let rhs = learning::rhs_from_fidelities(&[0.9, 0.8, 0.9]);
    let nn = learning::fit_nonnegative(&m, &rhs).unwrap();
    let x = DVector::from_iterator(3, basis.paulis.iter().map(|p| nn.rate(p).re));
    let want = [0.054751, 0.0, 0.054751];
    let nn_ok = x.iter().zip(want).all(|(a, b)| (a - b).abs() <= 1e-6);
    let grad = m.matrix.transpose() * (&m.matrix * &x - &rhs);
    let kkt = (0..3).all(|i| if x[i] > 0.0 { grad[i].abs() < 1e-10 } else { grad[i] >= -1e-8 });
    report("9", nn_ok && kkt, &format!("NNLS = ({:.6}, {:.6}, {:.6}), KKT satisfied: {kkt}", x[0], x[1], x[2]));

    let (un, _) = learning::fit_unconstrained(&m, &rhs).unwrap();
    let (_, closed) = twirl::hadamard_channel(0.05).unwrap();
    let worst = basis.paulis.iter().map(|p| (un.rate(p) - closed.rate(p)).norm()).fold(0.0, f64::max);
    report("9", worst <= 1e-10, &format!("unconstrained vs closed-form Hadamard rates, max diff {worst:.2e} (<= 1e-10)"));
    assert!(nn_ok && kkt && worst <= 1e-10);
}
