//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line and then
//! asserts it. Run with `--nocapture` to see the report.

use wsms_core::estimators::Method;
use wsms_core::geometry::{fraunhofer_distance, fresnel_distance, exact_distance, steering, ArrayConfig, ChannelModel};
use wsms_core::harness::{run_trials, sweep, Scenario, ScenarioConfig, SweepAxis, SweepResult};
use wsms_core::measurement::{random_combiner, optimized_combiner, total_coherence, unconstrained_optimized_combiner};

const EXACT_TOL: f64 = 1e-8;
const OLS_TOL: f64 = 1e-12;
const FIG2_TRIALS: usize = 2000;
const TREND_TRIALS: usize = 200;
const PD_RATIO_LIMIT: f64 = 1.5;
const COHERENCE_TOL: f64 = 1e-10;

fn config(extra: &str) -> ScenarioConfig {
    ScenarioConfig::parse(extra).expect("acceptance config parses")
}

fn report(id: &str, ok: bool, detail: String) {
    println!("{} {id}: {detail}", if ok { "PASS" } else { "FAIL" });
}

fn nmse_values(cfg: &ScenarioConfig, method: Method) -> Vec<f64> {
    let k = cfg.methods.iter().position(|&m| m == method).unwrap();
    let scenario = Scenario::build(cfg).unwrap();
    run_trials(&scenario)
        .unwrap()
        .iter()
        .map(|r| r.methods[k].nmse.unwrap_or(f64::INFINITY))
        .collect()
}

fn count_below(cfg: &ScenarioConfig, method: Method, tol: f64) -> (usize, f64) {
    let v = nmse_values(cfg, method);
    let worst = v.iter().copied().fold(0.0, f64::max);
    (v.iter().filter(|&&e| e < tol).count(), worst)
}

fn mean(result: &SweepResult, value: f64, method: Method) -> f64 {
    result.point(value, method).and_then(|p| p.mean_nmse).unwrap_or(f64::INFINITY)
}

#[test]
fn c1_model_matched_exactness() {
    let mut ok = true;
    let mut lines = Vec::new();
    for l in [1, 2] {
        let base = format!(
            "pilots = 16\npaths = {l}\nsnr_db = inf\ntrials = 100\nscenario_distances = dictionary\n"
        );
        let exact = config(&format!("{base}channel_model = exact\nmethods = pd-omp, ols\n"));
        let (pd, pd_worst) = count_below(&exact, Method::PdOmp, EXACT_TOL);
        let (ols, ols_worst) = count_below(&exact, Method::Ols, OLS_TOL);
        let cross = config(&format!(
            "{base}channel_model = cross-field\nts_reconstruction = cross-field\nmethods = ts-pad-omp, 2d-pad-omp\n"
        ));
        let (ts, ts_worst) = count_below(&cross, Method::TsPadOmp, EXACT_TOL);
        let (p2, p2_worst) = count_below(&cross, Method::Pad2dOmp, EXACT_TOL);
        for (name, hits, worst) in
            [("pd-omp", pd, pd_worst), ("ols", ols, ols_worst), ("ts-pad-omp", ts, ts_worst), ("2d-pad-omp", p2, p2_worst)]
        {
            ok &= hits == 100;
            lines.push(format!("L={l} {name} {hits}/100 (worst {worst:.2e})"));
        }
    }
    report("C1 model-matched exactness", ok, lines.join("; "));
    assert!(ok);
}

#[test]
fn c2_optimized_beats_random() {
    let snrs = [-15.0, -10.0, -5.0, 0.0, 5.0, 10.0, 15.0];
    let methods = [Method::PdOmp, Method::MadOmp, Method::TsPadOmp, Method::Pad2dOmp];
    let base = format!("pilots = 8\npaths = 4\ntrials = {FIG2_TRIALS}\nmethods = pd-omp, mad-omp, ts-pad-omp, 2d-pad-omp\n");
    let rand = sweep(&config(&format!("{base}combiner = random\n")), SweepAxis::Snr, &snrs).unwrap();
    let opt = sweep(&config(&format!("{base}combiner = optimized\n")), SweepAxis::Snr, &snrs).unwrap();
    let mut violations = Vec::new();
    let mut worst = 0.0f64;
    for &s in &snrs {
        for &m in &methods {
            let ratio = mean(&opt, s, m) / mean(&rand, s, m);
            worst = worst.max(ratio);
            if ratio.is_nan() || ratio >= 1.0 {
                violations.push(format!("{m}@{s}dB ratio {ratio:.4}"));
            }
        }
    }
    let ok = violations.is_empty();
    report(
        "C2 optimized < random combiner",
        ok,
        format!("{FIG2_TRIALS} trials, worst optimized/random {worst:.4}; violations: {violations:?}"),
    );
    assert!(ok);
}

#[test]
fn c3_method_ordering() {
    let snrs = [-5.0, 0.0, 5.0, 10.0, 15.0];
    let cfg = config(&format!("pilots = 16\npaths = 4\ntrials = {TREND_TRIALS}\n"));
    let res = sweep(&cfg, SweepAxis::Snr, &snrs).unwrap();
    let mut violations = Vec::new();
    let mut max_ratio = 0.0f64;
    for &s in &snrs {
        let [pd, mad, ts, p2, ols] =
            [Method::PdOmp, Method::MadOmp, Method::TsPadOmp, Method::Pad2dOmp, Method::Ols].map(|m| mean(&res, s, m));
        max_ratio = max_ratio.max(p2 / pd);
        if ols > pd {
            violations.push(format!("ols > pd-omp @{s}"));
        }
        if ols > p2 {
            violations.push(format!("ols > 2d-pad-omp @{s}"));
        }
        if p2 > PD_RATIO_LIMIT * pd {
            violations.push(format!("2d-pad-omp/pd-omp {:.3} @{s}", p2 / pd));
        }
        for (name, other) in [("pd-omp", pd), ("ts-pad-omp", ts), ("2d-pad-omp", p2), ("ols", ols)] {
            if mad < other {
                violations.push(format!("mad-omp {mad:.3e} < {name} {other:.3e} @{s}"));
            }
        }
    }
    let ok = violations.is_empty();
    report(
        "C3 NMSE ordering",
        ok,
        format!("{TREND_TRIALS} trials, max 2d/pd {max_ratio:.3}; violations: {violations:?}"),
    );
    assert!(ok);
}

fn violations(curve: &[f64], increasing: bool) -> usize {
    curve
        .windows(2)
        .filter(|w| if increasing { w[1] < w[0] } else { w[1] > w[0] })
        .count()
}

#[test]
fn c4_monotone_trends() {
    let methods = Method::ALL;
    let sweeps = [
        ("snr", SweepAxis::Snr, vec![-15.0, -10.0, -5.0, 0.0, 5.0, 10.0, 15.0], "pilots = 16\npaths = 4\n", false),
        ("q", SweepAxis::Q, vec![8.0, 12.0, 16.0, 20.0, 24.0], "snr_db = 5\npaths = 4\n", false),
        ("l", SweepAxis::L, vec![2.0, 4.0, 6.0, 8.0, 10.0], "snr_db = 5\npilots = 16\n", true),
    ];
    let mut ok = true;
    let mut lines = Vec::new();
    for (name, axis, values, extra, increasing) in sweeps {
        let cfg = config(&format!("{extra}trials = {TREND_TRIALS}\n"));
        let res = sweep(&cfg, axis, &values).unwrap();
        for m in methods {
            let curve: Vec<f64> = values.iter().map(|&v| mean(&res, v, m)).collect();
            let v = violations(&curve, increasing);
            if v > 1 {
                ok = false;
                lines.push(format!("{name}/{m} {v} violations {curve:?}"));
            }
        }
    }
    report("C4 monotone trends", ok, format!("{TREND_TRIALS} trials, at most one adjacent violation; failing: {lines:?}"));
    assert!(ok);
}

#[test]
fn c5_runtime_complexity() {
    let cfg = config("pilots = 20\ntrials = 100\nthreads = 1\nmethods = pd-omp, mad-omp, ts-pad-omp, 2d-pad-omp\n");
    let res = sweep(&cfg, SweepAxis::N, &[8.0, 16.0, 24.0]).unwrap();
    let t = |n: f64, m: Method| res.point(n, m).unwrap().mean_runtime_s;
    let [pd, mad, ts, p2] = [Method::PdOmp, Method::MadOmp, Method::TsPadOmp, Method::Pad2dOmp].map(|m| t(24.0, m));
    let ordering = pd > p2 && p2 >= ts && ts > mad;
    let ratio = |m| t(24.0, m) / t(8.0, m);
    let pd_ratio = ratio(Method::PdOmp);
    let others = [Method::MadOmp, Method::TsPadOmp, Method::Pad2dOmp].map(ratio);
    let growth = others.iter().all(|&r| pd_ratio > r);
    let ok = ordering && growth;
    report(
        "C5 runtime trend",
        ok,
        format!(
            "N=24 runtimes pd {pd:.2e} 2d {p2:.2e} ts {ts:.2e} mad {mad:.2e} (ordering {}); \
             N24/N8 pd {pd_ratio:.2} vs mad/ts/2d {:.2}/{:.2}/{:.2} (growth {})",
            if ordering { "ok" } else { "violated" },
            others[0],
            others[1],
            others[2],
            if growth { "ok" } else { "violated" }
        ),
    );
    assert!(ok);
}

#[test]
fn c6_optimizer_optimality() {
    let (n, q) = (24, 8);
    let unconstrained = (0..20).map(|s| total_coherence(&unconstrained_optimized_combiner(n, q, s).unwrap())).fold(0.0, f64::max);
    let projected = total_coherence(&optimized_combiner(n, q, 1).unwrap().w);
    let random_mean = (0..100).map(|s| total_coherence(&random_combiner(n, q, 1000 + s).unwrap().w)).sum::<f64>() / 100.0;
    let ok = unconstrained < COHERENCE_TOL && projected < random_mean;
    report(
        "C6 optimizer optimality",
        ok,
        format!("pre-projection max {unconstrained:.2e}; projected {projected:.4} vs random mean {random_mean:.4}"),
    );
    assert!(ok);
}

#[test]
fn c7_property_spot_checks() {
    // Full property suites live in the unit tests and tests/properties.rs.
    let cfg = ArrayConfig::reference();
    let r_nf = fraunhofer_distance(&cfg);
    let theta = 0.5f64.asin();
    let rel = (fresnel_distance(10.0, theta, 0.48).unwrap() - exact_distance(10.0, theta, 0.48).unwrap()).abs()
        / exact_distance(10.0, theta, 0.48).unwrap();
    let norms_ok = [ChannelModel::Exact, ChannelModel::CrossField].iter().all(|&m| {
        let a = steering(&cfg, m, theta, 20.0).unwrap();
        (a.norm() - 1.0).abs() < 1e-12
    });
    let ok = (r_nf - 153.6).abs() < 1e-9 && rel < 1e-4 && norms_ok;
    report(
        "C7 property spot checks",
        ok,
        format!("R_NF {r_nf:.4} m; fresnel rel err {rel:.2e}; steering norms {}", if norms_ok { "ok" } else { "bad" }),
    );
    assert!(ok);
}
