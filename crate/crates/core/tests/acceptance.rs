//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines appear in order. By default
//! the process exits 0 and the lines are the verdict; set
//! `CV2X_ACCEPTANCE_STRICT=1` to turn any FAIL into a nonzero exit.

use std::f64::consts::PI;
use std::time::Instant;

use cv2x::analysis::{
    association_prob, coverage_probability, laplace_exponent, laplace_transform_derivatives, r_max,
    serving_cdf, serving_joint_pdf, serving_pdf, CoverageQuery, Event,
};
use cv2x::channel::{db_to_linear, dbm_to_watts, equivalent_densities, NetworkParams};
use cv2x::geometry::{void_prob_cox_disc, void_prob_ppp_disc};
use cv2x::load::{
    lens_area_gamma22, rate_coverage, tagged_cell_length, tier1_mean_load, tier2_load_pmf, typical_cell_length,
    LoadModel, RateQuery,
};
use cv2x::montecarlo::{
    estimate_association, estimate_coverage, estimate_rate_coverage, estimate_void_probability,
    measure_tier1_load, measure_tier2_load, run_trial, window_check, TrialConfig,
};
use cv2x::quad::{integrate, QuadOptions};
use cv2x::rng::seeded;
use cv2x::stats::{binomial_ci_halfwidth, cdf_sup_distance, ks_one_sample};
use rand::Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn tight() -> QuadOptions {
    QuadOptions {
        rel_tol: 1e-13,
        abs_tol: 0.0,
        max_panels: 4000,
    }
}

/// Figs. 5, 8 and 9 share this network.
fn fig5() -> NetworkParams {
    NetworkParams::default()
}

/// Networks of the bias and density sweeps.
fn sweep_base(lambda_1_per_km2: f64, lambda_2_per_km: f64) -> NetworkParams {
    NetworkParams {
        mu_l: 5e-3,
        lambda_1: lambda_1_per_km2 * 1e-6,
        lambda_2: lambda_2_per_km * 1e-3,
        p1: dbm_to_watts(43.0),
        ..NetworkParams::default()
    }
}

fn pc(p: &NetworkParams, beta: f64) -> f64 {
    let eq = equivalent_densities(p).unwrap();
    coverage_probability(p, &eq, CoverageQuery::new(beta)).unwrap().total
}

fn rc(p: &NetworkParams, target: f64) -> f64 {
    let eq = equivalent_densities(p).unwrap();
    rate_coverage(p, &eq, RateQuery::new(target)).unwrap().total
}

fn criterion_1() -> Verdict {
    let p = fig5();
    let eq = equivalent_densities(&p).unwrap();
    let dbs = [-10.0, -5.0, 0.0, 5.0, 10.0];
    let betas: Vec<f64> = dbs.iter().map(|&d| db_to_linear(d)).collect();
    let t = Instant::now();
    let cfg = TrialConfig::new(p.clone(), 5, 20_000).unwrap();
    let run = estimate_coverage(&cfg, &betas).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let mut ok = secs <= 600.0;
    let mut parts = Vec::new();
    for (i, db) in dbs.iter().enumerate() {
        let a = coverage_probability(&p, &eq, CoverageQuery::new(betas[i])).unwrap().total;
        let m = run.curve.estimate[i];
        let good = (a - m).abs() <= 0.015;
        ok &= good;
        parts.push(format!("{db:+} dB a={a:.4} mc={m:.4} d={:+.4}{}", m - a, if good { "" } else { "!" }));
    }
    verdict(ok, format!("{}; {:.0} s", parts.join(", "), secs))
}

fn criterion_2() -> Verdict {
    let mut rng = seeded(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = NetworkParams {
            mu_l: rng.random_range(1.0..30.0) * 1e-3,
            lambda_1: rng.random_range(0.05..10.0) * 1e-6,
            lambda_2: rng.random_range(0.1..30.0) * 1e-3,
            alpha: rng.random_range(2.2..5.0),
            p1: dbm_to_watts(rng.random_range(30.0..46.0)),
            p2: dbm_to_watts(rng.random_range(10.0..30.0)),
            b1: db_to_linear(rng.random_range(-20.0..20.0)),
            b2: db_to_linear(rng.random_range(-20.0..20.0)),
            sigma_1: rng.random_range(0.0..8.0),
            sigma_20: rng.random_range(0.0..8.0),
            sigma_21: rng.random_range(0.0..8.0),
            ..NetworkParams::default()
        };
        let eq = equivalent_densities(&p).unwrap();
        // Tier-1 probability from quadrature of its joint density, tier-2 in closed form.
        let rm = r_max(&eq, Event::E1, 1e-16).unwrap();
        let p1 = integrate(|r| serving_joint_pdf(r, &eq, Event::E1), 0.0, rm, tight())
            .unwrap()
            .value;
        worst = worst.max((p1 + association_prob(&eq, Event::E2) - 1.0).abs());
    }
    let p = fig5();
    let eq = equivalent_densities(&p).unwrap();
    let run = estimate_association(&TrialConfig::new(p, 21, 30_000).unwrap()).unwrap();
    let want = association_prob(&eq, Event::E2);
    let got = run.fraction(Event::E2);
    let ci = binomial_ci_halfwidth(want, run.n);
    let ok = worst <= 1e-12 && (got - want).abs() <= ci;
    verdict(
        ok,
        format!("max |P1+P2-1| = {worst:.1e} over 100 sets; P(E2) mc={got:.4} a={want:.4} ci={ci:.4}"),
    )
}

fn criterion_3() -> Verdict {
    let lambda_l = 10e-3 / PI;
    let lambda_p = 4e-3;
    let mut ok = true;
    let mut parts = Vec::new();
    for r in [200.0, 500.0, 1000.0] {
        let a = void_prob_cox_disc(lambda_l, lambda_p, r).unwrap();
        let m = estimate_void_probability(PI * lambda_l, lambda_p, r, 100_000, 3).unwrap();
        let sigma = (a * (1.0 - a) / 1e5).sqrt();
        let good = (m - a).abs() <= 3.0 * sigma;
        ok &= good;
        parts.push(format!("r={r} a={a:.3e} mc={m:.3e}"));
    }
    let mut final_gap: f64 = 0.0;
    for r in [200.0, 500.0, 1000.0] {
        let lambda_a = PI * lambda_l * lambda_p;
        let gaps: Vec<f64> = [1.0, 10.0, 100.0]
            .iter()
            .map(|&s| (void_prob_cox_disc(lambda_l * s, lambda_p / s, r).unwrap() - void_prob_ppp_disc(lambda_a, r)).abs())
            .collect();
        ok &= gaps[1] < gaps[0] && gaps[2] < gaps[1];
        final_gap = final_gap.max(gaps[2]);
    }
    ok &= final_gap < 1e-3;
    verdict(ok, format!("{}; largest gap after x100 scaling {final_gap:.1e}", parts.join(", ")))
}

fn criterion_4() -> Verdict {
    let p = fig5();
    let eq = equivalent_densities(&p).unwrap();
    let run = estimate_association(&TrialConfig::new(p, 4, 30_000).unwrap()).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for ev in Event::BOTH {
        let xs = &run.effective_distances[ev.index()];
        let ks = ks_one_sample(xs, |r| serving_cdf(r, &eq, ev).unwrap());
        let good = xs.len() >= 5000 && ks.p_value > 0.01;
        ok &= good;
        parts.push(format!("{ev:?} n={} D={:.4} p={:.3}", xs.len(), ks.statistic, ks.p_value));
    }
    verdict(ok, parts.join(", "))
}

fn criterion_5() -> Verdict {
    let p0 = fig5();
    let eq0 = equivalent_densities(&p0).unwrap();
    let mut ok = true;
    for ev in Event::BOTH {
        ok &= laplace_exponent(0.0, 300.0, &p0, &eq0, ev, tight()).unwrap() == 0.0;
        ok &= laplace_transform_derivatives(0.0, 300.0, &p0, &eq0, ev, 1, tight()).unwrap()[0] == 1.0;
    }
    // Planar side-lobe population alone, Rayleigh fading, no exclusion.
    let mut e = eq0;
    e.lambda1_e = 0.0;
    e.lambda2_e = 0.0;
    let s = 3.7e6;
    let eta = laplace_exponent(s, 250.0, &p0, &e, Event::E1, tight()).unwrap();
    let exact = -PI * PI * e.lambda2_a * (s * p0.p2 * p0.g2_side).sqrt() / 2.0;
    let closed = ((eta - exact) / exact).abs();
    ok &= closed <= 1e-8;
    // Derivative recursion against five-point differences.
    let p = NetworkParams { m1: 2, ..fig5() };
    let eq = equivalent_densities(&p).unwrap();
    let mut worst: f64 = 0.0;
    for ev in Event::BOTH {
        let (s, r) = (5e7, 150.0);
        let d = laplace_transform_derivatives(s, r, &p, &eq, ev, 2, tight()).unwrap();
        let l = |s: f64| laplace_exponent(s, r, &p, &eq, ev, tight()).unwrap().exp();
        let h = 1e-2 * s;
        let (f2m, f1m, f0, f1p, f2p) = (l(s - 2.0 * h), l(s - h), l(s), l(s + h), l(s + 2.0 * h));
        let fd1 = (f2m - 8.0 * f1m + 8.0 * f1p - f2p) / (12.0 * h);
        let fd2 = (-f2m + 16.0 * f1m - 30.0 * f0 + 16.0 * f1p - f2p) / (12.0 * h * h);
        worst = worst.max(((d[1] - fd1) / fd1).abs()).max(((d[2] - fd2) / fd2).abs());
    }
    ok &= worst <= 1e-4;
    verdict(
        ok,
        format!("L(0)=1 exact; Rayleigh closed form rel err {closed:.1e}; derivative rel err {worst:.1e}"),
    )
}

struct Tier2Numbers {
    sup: f64,
    n: u64,
    campbell_gap: f64,
    campbell_ci: f64,
    typical_ks_p: f64,
    typical_ks_d: f64,
    typical_mean: [f64; 2],
}

fn tier2_numbers() -> Tier2Numbers {
    let p = fig5();
    let eq = equivalent_densities(&p).unwrap();
    let run = measure_tier2_load(&TrialConfig::new(p.clone(), 8, 40_000).unwrap()).unwrap();
    let an = tier2_load_pmf(&eq, p.lambda_r, 1e-9).unwrap();
    let sup = cdf_sup_distance(&run.pmf().probs, &an.probs);
    let loads: Vec<f64> = run.loads.iter().map(|&l| l as f64).collect();
    let n = loads.len() as f64;
    let mean_load = loads.iter().sum::<f64>() / n;
    let var = loads.iter().map(|l| (l - mean_load).powi(2)).sum::<f64>() / (n - 1.0);
    let mean_len = run.tagged_lengths.iter().sum::<f64>() / n;
    let typical = typical_cell_length(&eq).unwrap();
    let ks = ks_one_sample(&run.typical_lengths, |z| typical.cdf_at(z));
    Tier2Numbers {
        sup,
        n: run.n_tagged,
        campbell_gap: (mean_load - 1.0 - p.lambda_r * mean_len).abs(),
        campbell_ci: 1.96 * (var / n).sqrt(),
        typical_ks_p: ks.p_value,
        typical_ks_d: ks.statistic,
        typical_mean: [
            run.typical_lengths.iter().sum::<f64>() / run.typical_lengths.len() as f64,
            typical.mean,
        ],
    }
}

fn criterion_6(t: &Tier2Numbers) -> Verdict {
    verdict(t.sup <= 0.03, format!("sup |F_a - F_mc| = {:.4} over {} tagged cells", t.sup, t.n))
}

fn criterion_7() -> Verdict {
    let p = fig5();
    let eq = equivalent_densities(&p).unwrap();
    let an = LoadModel::new(&p, &eq, 1e-9).unwrap().tier1_mean_load;
    let mc = measure_tier1_load(&TrialConfig::new(p, 7, 20_000).unwrap()).unwrap();
    let rel = (mc.mean() - an).abs() / an;
    let q = NetworkParams {
        lambda_2: 0.0,
        ..fig5()
    };
    let eq0 = equivalent_densities(&q).unwrap();
    let an0 = tier1_mean_load(&eq0, q.lambda_r, q.mu_l, None).unwrap();
    let mc0 = measure_tier1_load(&TrialConfig::new(q, 17, 10_000).unwrap()).unwrap();
    let rel0 = (mc0.mean() - an0).abs() / an0;
    verdict(
        rel <= 0.07 && rel0 <= 0.05,
        format!(
            "a={an:.2} mc={:.2} ({:.1}%, flagged {:.2}%); no tier 2: a={an0:.1} mc={:.1} ({:.1}%)",
            mc.mean(),
            100.0 * rel,
            100.0 * mc.flagged_fraction(),
            mc0.mean(),
            100.0 * rel0
        ),
    )
}

fn criterion_8() -> Verdict {
    let p = fig5();
    let targets = [1e6, 10e6];
    let run = estimate_rate_coverage(&TrialConfig::new(p.clone(), 9, 20_000).unwrap(), &targets).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, &t) in targets.iter().enumerate() {
        let a = rc(&p, t);
        let m = run.curve.estimate[i];
        ok &= (a - m).abs() <= 0.03;
        parts.push(format!("{} Mbps a={a:.4} mc={m:.4}", t / 1e6));
    }
    verdict(ok, parts.join(", "))
}

fn criterion_9() -> Verdict {
    let b2: Vec<f64> = (-10..=20)
        .step_by(5)
        .map(|db| {
            pc(
                &NetworkParams {
                    b2: db_to_linear(db as f64),
                    ..sweep_base(2.0, 5.0)
                },
                1.0,
            )
        })
        .collect();
    let imax = (0..b2.len()).max_by(|&i, &j| b2[i].total_cmp(&b2[j])).unwrap();
    let interior = imax > 0 && imax < b2.len() - 1;
    let at = |l1: f64, b1_db: f64| {
        pc(
            &NetworkParams {
                b1: db_to_linear(b1_db),
                ..sweep_base(l1, 5.0)
            },
            1.0,
        )
    };
    let cross = at(0.25, 0.0) < at(0.5, 0.0) && at(0.25, 10.0) > at(0.5, 10.0);
    let l2: Vec<f64> = [1.0, 2.0, 5.0, 10.0, 20.0]
        .iter()
        .map(|&l| rc(&sweep_base(0.5, l), 10e6))
        .collect();
    let increasing = l2.windows(2).all(|w| w[1] > w[0]);
    verdict(
        interior && cross && increasing,
        format!(
            "P_c(B2) peaks at {} dB; lambda1 0.25 vs 0.5 swap order between B1 0 and 10 dB: {cross}; R_c rising in lambda2: {increasing}",
            -10 + 5 * imax as i32
        ),
    )
}

fn criterion_10(t2: &Tier2Numbers) -> Verdict {
    let p = fig5();
    let eq = equivalent_densities(&p).unwrap();
    let mut failed: Vec<&str> = Vec::new();
    let mut check = |name: &'static str, ok: bool| {
        if !ok {
            failed.push(name);
        }
    };
    // Normalization.
    for ev in Event::BOTH {
        let rm = r_max(&eq, ev, 1e-12).unwrap();
        let total = integrate(|r| serving_pdf(r, &eq, ev).unwrap(), 0.0, rm, QuadOptions::with_rel_tol(1e-10))
            .unwrap()
            .value;
        check("serving pdf normalization", (total - 1.0).abs() < 1e-8);
    }
    let typical = typical_cell_length(&eq).unwrap();
    let tagged = tagged_cell_length(&typical);
    check("typical cell normalization", (typical.mass() - 1.0).abs() < 1e-3);
    check("tagged cell normalization", (tagged.mass() - 1.0).abs() < 1e-3);
    let pmf = tier2_load_pmf(&eq, p.lambda_r, 1e-9).unwrap();
    check("load pmf total", (pmf.total() - 1.0).abs() < 1e-6);
    check("load pmf mean identity", ((pmf.mean() - 1.0 - p.lambda_r * tagged.mean) / pmf.mean()).abs() < 1e-3);
    // Size bias on several networks.
    for (l1, l2) in [(0.5, 4.0), (2.0, 5.0), (0.25, 1.0)] {
        let q = sweep_base(l1, l2);
        let e = equivalent_densities(&q).unwrap();
        let t = typical_cell_length(&e).unwrap();
        check("size bias", tagged_cell_length(&t).mean >= t.mean);
    }
    // Piecewise area continuity.
    for k in [1.5, 2.0, 4.0] {
        let z0 = 3.0;
        let lo = lens_area_gamma22(z0, (k - 1.0) / (k + 1.0) * z0, k).unwrap();
        let z1 = (k + 1.0) / (k - 1.0) * z0;
        let hi = lens_area_gamma22(z0, z1, k).unwrap();
        let outer = PI * k * k * (z1 * z1 - z0 * z0);
        check("area continuity", lo.abs() < 1e-9 * outer && ((hi - outer) / outer).abs() < 1e-9);
    }
    // Monotonicity.
    let curve: Vec<f64> = [-10.0, -5.0, 0.0, 5.0, 10.0, 20.0]
        .iter()
        .map(|&d| pc(&p, db_to_linear(d)))
        .collect();
    check("coverage monotone in threshold", curve.windows(2).all(|w| w[1] < w[0]));
    let loads = LoadModel::new(&p, &eq, 1e-9).unwrap();
    let rates: Vec<f64> = [1e6, 5e6, 10e6, 50e6]
        .iter()
        .map(|&t| cv2x::load::rate_coverage_with(&p, &eq, &loads, RateQuery::new(t)).unwrap())
        .collect();
    check("rate monotone in target", rates.windows(2).all(|w| w[1] <= w[0]));
    let v = |ll: f64, lp: f64, r: f64| void_prob_cox_disc(ll, lp, r).unwrap();
    let ll = 10e-3 / PI;
    check(
        "void monotone",
        v(ll, 4e-3, 300.0) >= v(2.0 * ll, 4e-3, 300.0)
            && v(ll, 4e-3, 300.0) >= v(ll, 8e-3, 300.0)
            && v(ll, 4e-3, 300.0) >= v(ll, 4e-3, 600.0),
    );
    // Rate with unit load is coverage at the matching threshold.
    let t = 7e6;
    let unit = rate_coverage(
        &p,
        &eq,
        RateQuery {
            unit_load: true,
            ..RateQuery::new(t)
        },
    )
    .unwrap()
    .total;
    check("unit-load rate equals coverage", (unit - pc(&p, (t / p.bandwidth * std::f64::consts::LN_2).exp_m1())).abs() < 1e-10);
    // Determinism across thread counts.
    let cfg = TrialConfig::new(p.clone(), 99, 300).unwrap();
    let in_pool = |n: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
            .install(|| estimate_coverage(&cfg, &[0.5, 1.0, 2.0]).unwrap())
    };
    check("deterministic across threads", in_pool(1) == in_pool(3));
    check("deterministic trial", run_trial(&cfg, 17) == run_trial(&cfg, 17));
    // Window sufficiency.
    let wc = window_check(&TrialConfig::new(p.clone(), 5, 5000).unwrap()).unwrap();
    check("window doubling", wc.passed());
    // Simulation-side identities.
    check("tier-2 Campbell identity", t2.campbell_gap <= t2.campbell_ci);
    check("typical cell length fit", t2.typical_ks_p > 0.01);
    let assoc = estimate_association(&TrialConfig::new(p, 5, 20_000).unwrap()).unwrap();
    check("rejection rate", (assoc.rejected as f64) / 20_000.0 < 1e-6);
    let ok = failed.is_empty();
    verdict(
        ok,
        if ok {
            format!(
                "all invariants hold; window check {:.4} vs {:.4} (ci {:.4}); typical cell KS p={:.3}",
                wc.pc_at_radius, wc.pc_at_double, wc.ci_halfwidth, t2.typical_ks_p
            )
        } else {
            format!(
                "failed: {}; typical cell KS D={:.4} p={:.4}, mean mc={:.1} a={:.1}",
                failed.join(", "),
                t2.typical_ks_d,
                t2.typical_ks_p,
                t2.typical_mean[0],
                t2.typical_mean[1]
            )
        },
    )
}

fn main() {
    let start = Instant::now();
    let t2 = tier2_numbers();
    let runs: Vec<(u32, &str, Box<dyn Fn() -> Verdict + '_>)> = vec![
        (1, "coverage vs simulation", Box::new(criterion_1)),
        (2, "association exactness", Box::new(criterion_2)),
        (3, "void probability and PPP limit", Box::new(criterion_3)),
        (4, "serving-distance laws", Box::new(criterion_4)),
        (5, "Laplace transform", Box::new(criterion_5)),
        (6, "tier-2 load CDF", Box::new(|| criterion_6(&t2))),
        (7, "tier-1 mean load", Box::new(criterion_7)),
        (8, "rate coverage vs simulation", Box::new(criterion_8)),
        (9, "qualitative trends", Box::new(criterion_9)),
        (10, "property suite", Box::new(|| criterion_10(&t2))),
    ];
    let mut passed = 0;
    for (n, name, f) in &runs {
        let t = Instant::now();
        let v = f();
        passed += v.pass as u32;
        println!(
            "criterion {n:>2} {}: {name} | {} | {:.0} s",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            t.elapsed().as_secs_f64()
        );
    }
    let total = start.elapsed().as_secs_f64();
    println!("acceptance: {passed}/{} criteria passed in {total:.0} s", runs.len());
    let strict = std::env::var("CV2X_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && passed as usize != runs.len() {
        std::process::exit(1);
    }
}
