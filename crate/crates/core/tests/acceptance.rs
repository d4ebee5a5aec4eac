//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs without the libtest harness so every line prints.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use minssd::ar1::{innovation_sample, innovation_survival, stationarity_test, MinAr1Config};
use minssd::decompose::{cofactor, law_cofactor, validate_extended_survival};
use minssd::discrete::{
    discrete_minssd_check, discrete_nmin_check, total_variation, DiscreteFromLt,
};
use minssd::psi::max_perturbation;
use minssd::randsize::{nmin_semistable_check, random_min_sample};
use minssd::stats::{ks_test, null_rejection_rate};
use minssd::{Error, LaplaceTransform, MarginalLaw, Pgf, PsiFunction};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn psi(alpha: f64, p: f64, frac: f64) -> PsiFunction {
    let eps = frac * max_perturbation(alpha, p).unwrap();
    PsiFunction::with_phase(alpha, p, eps, 0.7).unwrap()
}

fn minssd_cli(args: &[&str]) -> (Option<i32>, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_minssd"))
        .args(args)
        .env_remove("MINSSD_SEED")
        .output()
        .expect("binary runs");
    (
        out.status.code(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn law_json(d: &MarginalLaw) -> String {
    serde_json::to_string(d).unwrap()
}

fn ac1() -> Verdict {
    let mut worst = 0.0f64;
    for alpha in [0.5, 1.0, 2.0] {
        for p in [0.1, 0.5] {
            for frac in [0.0, 0.8] {
                let f = psi(alpha, p, frac);
                let c = f.scale();
                let n = 1000;
                for i in 0..n {
                    let x = (-6.0 * std::f64::consts::LN_10
                        + 12.0 * std::f64::consts::LN_10 * i as f64 / (n - 1) as f64)
                        .exp();
                    let lhs = p * f.eval(x).unwrap();
                    let rhs = f.eval(c * x).unwrap();
                    worst = worst.max((lhs - rhs).abs() / lhs.abs());
                }
                ensure(
                    f.validate(1000).passed(),
                    format!("validation failed for alpha={alpha} p={p} frac={frac}"),
                )?;
            }
        }
    }
    ensure(worst < 1e-12, format!("sup relative residual {worst:e}"))?;
    Ok(format!("12 triples, sup relative residual {worst:.2e}"))
}

fn ac2() -> Verdict {
    let mut worst = 0.0f64;
    let mut worst_q = 0.0f64;
    for (alpha, p) in [(1.0, 0.5), (1.4, 0.3), (0.6, 0.1)] {
        let f = psi(alpha, p, 0.8);
        let d = MarginalLaw::semi_pareto(f);
        let c = f.scale();
        let grid = d.default_grid(400);
        let generic = cofactor(move |x| d.survival(x), c, &grid).map_err(|e| e.to_string())?;
        let stable = law_cofactor(&d, c).map_err(|e| e.to_string())?;
        let geo = Pgf::GeometricI0 { p };
        for x in grid.points() {
            let s = f.eval(x).unwrap();
            let analytic = (1.0 + p * s) / (1.0 + s);
            let composed = geo.eval(d.survival(c * x)).unwrap();
            let lit = generic.eval(x);
            for diff in [
                lit - analytic,
                lit - composed,
                analytic - composed,
                stable.eval(x) - analytic,
            ] {
                worst = worst.max(diff.abs());
            }
        }
        let report = validate_extended_survival(&stable, &grid, 1e-12);
        ensure(
            report.passed,
            format!("cofactor validation failed: {report:?}"),
        )?;
        worst_q = worst_q.max((stable.q_inf() - p).abs());
    }
    ensure(worst < 1e-14, format!("pairwise sup difference {worst:e}"))?;
    ensure(worst_q < 1e-9, format!("|q_inf - p| = {worst_q:e}"))?;
    Ok(format!(
        "pairwise sup difference {worst:.2e}, |q_inf - p| <= {worst_q:.1e}"
    ))
}

fn ac3() -> Verdict {
    let f = psi(1.0, 0.5, 0.6);
    let laws = [
        ("semi_weibull", MarginalLaw::semi_weibull(f)),
        (
            "gsp(0.5)",
            MarginalLaw::generalized_semi_pareto(f, 0.5).unwrap(),
        ),
        (
            "gsp(2)",
            MarginalLaw::generalized_semi_pareto(f, 2.0).unwrap(),
        ),
        (
            "gamma-phi",
            MarginalLaw::phi_semi_weibull(f, LaplaceTransform::Gamma { beta: 2.0 }).unwrap(),
        ),
    ];
    let b = f.scale().to_string();
    let mut sw_q = f64::NAN;
    for (name, d) in laws {
        let law = format!("law={}", law_json(&d));
        let (code, out, err) =
            minssd_cli(&["check", "--check", "minssd", "--set", &law, "--b", &b]);
        ensure(code == Some(0), format!("{name}: exit {code:?}: {err}"))?;
        let report: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
        ensure(
            report["passed"] == json!(true),
            format!("{name}: report not passed"),
        )?;
        if name == "semi_weibull" {
            sw_q = report["q_inf"].as_f64().unwrap_or(f64::NAN);
        }
    }
    ensure(sw_q.abs() < 1e-9, format!("semi-Weibull q_inf = {sw_q}"))?;
    Ok(format!(
        "4 laws exit 0 via CLI, semi-Weibull q_inf = {sw_q:e}"
    ))
}

fn nmin_cases() -> Vec<(String, Pgf, MarginalLaw, f64)> {
    let mut cases = Vec::new();
    let (alpha, p) = (1.2, 0.3);
    let f = psi(alpha, p, 0.5);
    cases.push((
        "geometric_i1/semi_pareto".into(),
        Pgf::GeometricI1 { p },
        MarginalLaw::semi_pareto(f),
        f.scale(),
    ));
    // Degenerate(1) needs p = 1: only the trivial identity c = 1 applies.
    let g1 = psi(alpha, 0.5, 0.5);
    cases.push((
        "degenerate(1)/semi_weibull".into(),
        Pgf::Degenerate { k: 1 },
        MarginalLaw::semi_weibull(g1),
        1.0,
    ));
    for k in [2u32, 3] {
        let g = psi(alpha, 1.0 / k as f64, 0.5);
        cases.push((
            format!("degenerate({k})/semi_weibull"),
            Pgf::Degenerate { k },
            MarginalLaw::semi_weibull(g),
            g.scale(),
        ));
    }
    for k in [1u32, 2, 3] {
        let d = MarginalLaw::generalized_semi_pareto(f, 1.0 / k as f64).unwrap();
        cases.push((
            format!("harris({k})/gsp"),
            Pgf::Harris { a: 1.0 / p, k },
            d,
            f.scale(),
        ));
    }
    cases
}

fn ac4() -> Verdict {
    let mut worst = 0.0f64;
    for (name, q, d, c) in nmin_cases() {
        let grid = d.default_grid(400);
        let r = nmin_semistable_check(&q, &d, c, &grid, 1e-12);
        ensure(r.passed, format!("{name}: {r:?}"))?;
        worst = worst.max(r.sup_residual);
    }
    ensure(worst < 1e-12, format!("sup residual {worst:e}"))?;
    Ok(format!("7 pairs, sup residual {worst:.2e}"))
}

fn ac5() -> Verdict {
    let bound = max_perturbation(1.0, 0.25).unwrap();
    let laws = [
        (
            "semi_pareto eps=0",
            MarginalLaw::semi_pareto(PsiFunction::new(1.0, 0.25, 0.0).unwrap()),
        ),
        (
            "semi_pareto eps=0.05",
            MarginalLaw::semi_pareto(PsiFunction::new(1.0, 0.25, 0.05).unwrap()),
        ),
        (
            "semi_weibull",
            MarginalLaw::semi_weibull(PsiFunction::new(1.0, 0.5, 0.05).unwrap()),
        ),
        (
            "gsp(2)",
            MarginalLaw::generalized_semi_pareto(PsiFunction::new(1.0, 0.25, 0.05).unwrap(), 2.0)
                .unwrap(),
        ),
    ];
    assert!(0.05 < bound);
    let mut min_p = 1.0f64;
    let mut failures = Vec::new();
    for (name, d) in laws {
        for seed in [4u64, 5, 6] {
            let cfg = MinAr1Config::certified(d, 10_000, 50, seed);
            let r = stationarity_test(&cfg, 0.01).map_err(|e| e.to_string())?;
            min_p = min_p.min(r.p_value);
            if !r.passed {
                failures.push(format!("{name} seed {seed}: p = {:.4}", r.p_value));
            }
        }
    }
    ensure(failures.is_empty(), failures.join("; "))?;
    Ok(format!(
        "12 runs of 1e4 chains x 50 steps (seeds 4, 5, 6), min p-value {min_p:.4}"
    ))
}

fn infinite_fraction(d: &MarginalLaw, rho: f64, n: usize, seed: u64) -> Result<f64, String> {
    let e = innovation_survival(d, rho).map_err(|e| e.to_string())?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut inf = 0usize;
    for _ in 0..n {
        if innovation_sample(&e, &mut rng)
            .map_err(|e| e.to_string())?
            .is_infinite()
        {
            inf += 1;
        }
    }
    Ok(inf as f64 / n as f64)
}

fn ac6() -> Verdict {
    let n = 100_000;
    let pareto = MarginalLaw::semi_pareto(PsiFunction::power(1.0, 0.5).unwrap());
    let f1 = infinite_fraction(&pareto, 2.0, n, 61)?;
    ensure(
        (f1 - 0.5).abs() <= 0.005,
        format!("Pareto rho=2 fraction {f1}"),
    )?;
    let p = 0.25;
    let sp = MarginalLaw::semi_pareto(psi(1.0, p, 0.8));
    let f2 = infinite_fraction(&sp, sp.psi().period(), n, 62)?;
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    ensure(
        (f2 - p).abs() <= 3.0 * sigma,
        format!(
            "semi-Pareto fraction {f2} vs {p} (3 sigma {:.4})",
            3.0 * sigma
        ),
    )?;
    Ok(format!(
        "Pareto rho=2: {f1:.4}; semi-Pareto p=0.25: {f2:.4} (3 sigma {:.4})",
        3.0 * sigma
    ))
}

/// Power-series coefficients of `f^gamma` from those of `f` (`f[0] != 0`),
/// by the J.C.P. Miller recurrence.
fn series_power(f: &[f64], gamma: f64, order: usize) -> Vec<f64> {
    let mut b = vec![0.0; order + 1];
    b[0] = f[0].powf(gamma);
    for n in 1..=order {
        let mut acc = 0.0;
        for k in 1..=n.min(f.len() - 1) {
            acc += ((gamma + 1.0) * k as f64 - n as f64) * f[k] * b[n - k];
        }
        b[n] = acc / (n as f64 * f[0]);
    }
    b
}

fn ac7() -> Verdict {
    let order = 60;
    // s / (3 - 2 s^2)^{1/2}
    let inner = series_power(&[3.0, 0.0, -2.0], -0.5, order);
    let mut pmf = vec![0.0; order + 1];
    pmf[1..].copy_from_slice(&inner[..order]);
    let head: f64 = pmf.iter().sum();
    let q = Pgf::Harris { a: 3.0, k: 2 };
    let n = 1_000_000;
    let mut rng = ChaCha20Rng::seed_from_u64(70);
    let mut counts = vec![0u64; order + 2];
    for _ in 0..n {
        let j = q.sample(&mut rng) as usize;
        counts[j.min(order + 1)] += 1;
    }
    let mut tv = 0.0;
    for j in 0..=order {
        tv += (counts[j] as f64 / n as f64 - pmf[j]).abs();
    }
    tv += (counts[order + 1] as f64 / n as f64 - (1.0 - head)).abs();
    tv *= 0.5;
    ensure(tv < 0.01, format!("TV {tv}"))?;
    Ok(format!(
        "TV {tv:.5} over orders 0..60 (oracle mass {head:.8})"
    ))
}

fn ac8() -> Verdict {
    let (alpha, p) = (1.2, 0.3);
    let f = psi(alpha, p, 0.5);
    let g = psi(alpha, 0.5, 0.5);
    let cases = [
        (
            "geometric_i1/semi_pareto",
            Pgf::GeometricI1 { p },
            MarginalLaw::semi_pareto(f),
            f.scale(),
        ),
        (
            "degenerate(2)/semi_weibull",
            Pgf::Degenerate { k: 2 },
            MarginalLaw::semi_weibull(g),
            g.scale(),
        ),
        (
            "harris(2)/gsp",
            Pgf::Harris { a: 1.0 / p, k: 2 },
            MarginalLaw::generalized_semi_pareto(f, 0.5).unwrap(),
            f.scale(),
        ),
    ];
    let mut parts = Vec::new();
    for (i, (name, q, d, c)) in cases.into_iter().enumerate() {
        let mut rng = ChaCha20Rng::seed_from_u64(80 + i as u64);
        let xs: Vec<f64> = (0..100_000)
            .map(|_| random_min_sample(&q, &d, c, &mut rng))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let r = ks_test(&xs, |x| d.cdf(x), 0.01).map_err(|e| e.to_string())?;
        ensure(r.p_value > 0.01, format!("{name}: p = {}", r.p_value))?;
        parts.push(format!("{name} p={:.3}", r.p_value));
    }
    Ok(parts.join(", "))
}

fn ac9() -> Verdict {
    let (alpha, p) = (0.5, 0.5);
    let b = p * p;
    let f = psi(alpha, p, 0.5);
    let disc = |d: MarginalLaw| DiscreteFromLt::new(d).map_err(|e| e.to_string());
    let mut worst = 0.0f64;
    for (name, d) in [
        ("semi_pareto", disc(MarginalLaw::semi_pareto(f))?),
        ("semi_weibull", disc(MarginalLaw::semi_weibull(f))?),
        (
            "gsp(2)",
            disc(MarginalLaw::generalized_semi_pareto(f, 2.0).unwrap())?,
        ),
    ] {
        let r = discrete_minssd_check(&d, b, 1000, 1e-12).map_err(|e| e.to_string())?;
        ensure(r.passed, format!("minssd {name}: {r:?}"))?;
        worst = worst.max(r.sup_residual);
    }
    let mut nmin = vec![(
        Pgf::GeometricI1 { p },
        disc(MarginalLaw::semi_pareto(f))?,
        f.scale(),
    )];
    for k in [2u32, 3] {
        let g = psi(alpha, 1.0 / k as f64, 0.5);
        nmin.push((
            Pgf::Degenerate { k },
            disc(MarginalLaw::semi_weibull(g))?,
            g.scale(),
        ));
    }
    for k in [1u32, 2, 3] {
        let d = disc(MarginalLaw::generalized_semi_pareto(f, 1.0 / k as f64).unwrap())?;
        nmin.push((Pgf::Harris { a: 1.0 / p, k }, d, f.scale()));
    }
    for (q, d, c) in &nmin {
        let r = discrete_nmin_check(q, d, *c, 1000, 1e-12).map_err(|e| e.to_string())?;
        ensure(r.passed, format!("nmin {q:?}: {r:?}"))?;
        worst = worst.max(r.sup_residual);
    }
    ensure(worst < 1e-12, format!("sup residual {worst:e}"))?;

    let pw = PsiFunction::power(alpha, p).unwrap();
    let mut tvs = Vec::new();
    for (i, (name, d)) in [
        ("semi_weibull", disc(MarginalLaw::semi_weibull(pw))?),
        (
            "gsp(2)",
            disc(MarginalLaw::generalized_semi_pareto(pw, 2.0).unwrap())?,
        ),
    ]
    .into_iter()
    .enumerate()
    {
        let mut rng = ChaCha20Rng::seed_from_u64(90 + i as u64);
        let xs: Vec<u64> = (0..1_000_000)
            .map(|_| d.sample(&mut rng))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let tv = total_variation(&d, &xs)
            .map_err(|e| e.to_string())?
            .total_variation;
        ensure(tv < 0.005, format!("{name} TV {tv}"))?;
        tvs.push(format!("{name} TV={tv:.4}"));
    }
    Ok(format!(
        "3 minssd + 6 nmin checks, sup residual {worst:.2e}; {}",
        tvs.join(", ")
    ))
}

fn ac10() -> Verdict {
    let pareto = MarginalLaw::semi_pareto(PsiFunction::power(1.0, 0.5).unwrap());
    let law = format!("law={}", law_json(&pareto));
    let (code, out, _) = minssd_cli(&["check", "--check", "minssd", "--set", &law, "--b", "2"]);
    ensure(code == Some(3), format!("Pareto b=2: exit {code:?}"))?;
    let report: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let mono = report["details"]
        .as_array()
        .and_then(|d| d.iter().find(|e| e["name"] == json!("non_increasing")))
        .map(|e| e["passed"] == json!(false));
    ensure(mono == Some(true), "monotonicity sub-check did not fail")?;

    let eps = (1.5 * max_perturbation(1.0, 0.5).unwrap()).to_string();
    let (code, _, err) = minssd_cli(&[
        "sample",
        "--law",
        "semi_pareto",
        "--alpha",
        "1",
        "--p",
        "0.5",
        "--eps",
        &eps,
        "--n",
        "5",
        "--seed",
        "1",
        "--output",
        "unused.csv",
    ]);
    ensure(code == Some(2), format!("eps = 1.5 bound: exit {code:?}"))?;
    ensure(
        err.contains("max_perturbation"),
        "error does not name the bound",
    )?;

    let r = random_min_sample(
        &Pgf::GeometricI0 { p: 0.5 },
        &pareto,
        0.5,
        &mut ChaCha20Rng::seed_from_u64(1),
    );
    ensure(
        matches!(r, Err(Error::Support(_))),
        format!("GeometricI0 accepted: {r:?}"),
    )?;
    Ok("b=2 exit 3 (non_increasing), eps=1.5 bound exit 2, GeometricI0 rejected".into())
}

fn ac11() -> Verdict {
    let rate = null_rejection_rate(20_260_417, 200, 1000, 0.05);
    ensure(
        (0.01..=0.09).contains(&rate),
        format!("rejection rate {rate}"),
    )?;
    Ok(format!("rejection rate {rate:.3} at level 0.05"))
}

fn run(id: u32, title: &str, limit: Duration, f: fn() -> Verdict) -> bool {
    let start = Instant::now();
    let verdict = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    });
    let elapsed = start.elapsed();
    let verdict = match verdict {
        Ok(d) if elapsed > limit => Err(format!(
            "{d}; runtime {:.2} s over the {} s limit",
            elapsed.as_secs_f64(),
            limit.as_secs()
        )),
        v => v,
    };
    let (tag, detail) = match &verdict {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!(
        "AC-{id:02} {tag} {title}: {detail} [{:.2} s]",
        elapsed.as_secs_f64()
    );
    verdict.is_ok()
}

fn main() {
    let secs = Duration::from_secs;
    // Keep the CLI's scratch file out of the source tree.
    let scratch = tempfile::tempdir().expect("temp dir");
    std::env::set_current_dir(scratch.path()).expect("chdir");
    let results = [
        run(1, "functional equation", secs(1), ac1),
        run(2, "semi-Pareto cofactor triple coincidence", secs(1), ac2),
        run(3, "min-SSD checks via CLI", secs(2), ac3),
        run(4, "N-min semi-stability residuals", secs(2), ac4),
        run(5, "min-AR(1) stationarity", secs(60), ac5),
        run(6, "defective innovation calibration", secs(5), ac6),
        run(7, "Harris sampler vs series oracle", secs(10), ac7),
        run(8, "random-min distributional identity", secs(20), ac8),
        run(9, "discrete suite", secs(15), ac9),
        run(10, "negative controls", secs(1), ac10),
        run(11, "KS null calibration", secs(10), ac11),
    ];
    let failed = results.iter().filter(|&&ok| !ok).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
