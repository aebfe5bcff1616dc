//! Agreement between independent evaluation paths.

use std::f64::consts::LN_2;

use xpharq::asymptotic::{
    build_hbar_table, diversity_order_fit, hbar_eval, outage_asymptotic_general, outage_k2_asymptotic, phi_asymptotic,
};
use xpharq::bounds::{outage_upper_ir, UpperMethod};
use xpharq::exact::{outage_k2_exact, phi_foxh, phi_quadrature, FoxHParams11};
use xpharq::montecarlo::{
    analytical_throughput, estimate_outage, estimate_throughput, throughput_analytical, xp_outage_chain, SimConfig,
};
use xpharq::quadrature::{hbar_quadrature, integrate_adaptive, joint_density_x, xp_outage_quadrature, Tolerance};
use xpharq::{db_to_linear, PowerProfile, RateSchedule, Scheme, Uncertainty};

fn sched(r: &[f64]) -> RateSchedule {
    RateSchedule::new(r.to_vec()).unwrap()
}

fn within_sigmas(p_hat: f64, p: f64, n: u64, k: f64) -> bool {
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    (p_hat - p).abs() <= k * sigma
}

#[test]
fn two_round_exact_against_simulation() {
    let rates = sched(&[1.0, 1.0]);
    let powers = PowerProfile::uniform(10.0, 2).unwrap();
    let n = 1_000_000;
    let exact = outage_k2_exact(&rates, &powers, 1e-14).unwrap().value;
    let mc = estimate_outage(&SimConfig::new(Scheme::Xp, rates.clone(), powers.clone(), n, 101, 4).unwrap()).unwrap();
    assert!(within_sigmas(mc.value, exact, n, 3.0), "{} vs {exact}", mc.value);

    let upper = outage_upper_ir(&rates, &powers, UpperMethod::default()).unwrap().value;
    let ir = estimate_outage(&SimConfig::new(Scheme::Inr, rates.clone(), powers.clone(), n, 101, 4).unwrap()).unwrap();
    assert!(within_sigmas(ir.value, upper, n, 3.0), "{} vs {upper}", ir.value);
    let via_mc = outage_upper_ir(
        &rates,
        &powers,
        UpperMethod::MonteCarlo {
            trials: n,
            seed: 101,
            workers: 4,
        },
    )
    .unwrap();
    assert_eq!(via_mc.value, ir.value);

    let oracle = xp_outage_quadrature(&rates, &powers, Tolerance::new(1e-15, 1e-12)).unwrap().value;
    assert!((oracle - exact).abs() < 1e-8);
}

#[test]
fn phi_paths_agree_on_grid() {
    let tpl = FoxHParams11::default();
    let grid = [0.5, 1.0, 2.0, 3.0];
    let snrs = [1.0, 10.0, 100.0];
    for r1 in grid {
        for r2 in grid {
            for g1 in snrs {
                for g2 in snrs {
                    let q = phi_quadrature(r1, r2, g1, g2, 1e-14).unwrap().value;
                    let f = phi_foxh(r1, r2, g1, g2, &tpl).unwrap();
                    assert!(
                        (q - f).abs() <= 1e-6 * q.abs().max(1.0),
                        "R=({r1},{r2}) g=({g1},{g2}): {q} vs {f}"
                    );
                }
            }
        }
    }
}

#[test]
fn phi_asymptote_converges() {
    let g = 1e4;
    let q = phi_quadrature(1.0, 1.0, g, g, 1e-16).unwrap().value;
    let a = phi_asymptotic(1.0, 1.0, g, g).unwrap();
    assert!((a - q).abs() / q < 0.01);
}

#[test]
fn phi_correction_term_scales_with_snr_product() {
    // snr_bar_1 snr_bar_2 (e^{1/g1}(e^{-(2^R2-1)/g2} - e^{-(2^S-1)/g2}) - phi) e^{-1/g1-1/g2}
    // tends to 2^{R1+R2} R1 ln 2.
    let (r1, r2) = (1.0f64, 0.5f64);
    let target = (r1 + r2).exp2() * r1 * LN_2;
    let mut gaps = Vec::new();
    for g in [1e2, 1e3, 1e4] {
        let phi = phi_quadrature(r1, r2, g, g, 1e-17).unwrap().value;
        let bracket = (1.0 / g).exp() * ((-(r2.exp2() - 1.0) / g).exp() - (-((r1 + r2).exp2() - 1.0) / g).exp());
        let scaled = g * g * (bracket - phi) * (-2.0 / g).exp();
        gaps.push((scaled - target).abs() / target);
    }
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
    assert!(gaps[2] < 1e-3, "{gaps:?}");
}

#[test]
fn two_round_asymptote_equals_table() {
    for r in [[1.0, 1.0], [0.3, 2.5], [2.0, 0.7]] {
        let rates = sched(&r);
        let powers = PowerProfile::new(vec![30.0, 500.0]).unwrap();
        let a = outage_k2_asymptotic(&rates, &powers).unwrap();
        let t = hbar_eval(&build_hbar_table(&rates).unwrap(), 1, 1.0).unwrap() / (30.0 * 500.0);
        assert!((a - t).abs() <= 1e-13 * a);
        assert!((outage_asymptotic_general(&rates, &powers).unwrap() - a).abs() <= 1e-13 * a);
    }
}

#[test]
fn hbar_table_against_nested_integral() {
    let schedules: [&[f64]; 5] = [
        &[1.0, 1.0],
        &[0.25, 3.0, 1.5],
        &[2.0, 0.5, 0.5, 1.0],
        &[1.0, 1.0, 1.0, 1.0, 1.0],
        &[0.7, 2.2, 0.3, 1.9, 0.25],
    ];
    for r in schedules {
        let rates = sched(r);
        let table = hbar_eval(&build_hbar_table(&rates).unwrap(), 1, 1.0).unwrap();
        let quad = hbar_quadrature(&rates, 1, 1.0, Tolerance::new(1e-300, 1e-12)).unwrap().value;
        assert!((table - quad).abs() <= 1e-8 * quad, "{r:?}: {table} vs {quad}");
    }
}

#[test]
fn three_round_outage_approaches_dominant_term() {
    let rates = sched(&[1.0, 1.0, 1.0]);
    let h = hbar_eval(&build_hbar_table(&rates).unwrap(), 1, 1.0).unwrap();
    let mut prev_gap = f64::INFINITY;
    for db in [20.0, 30.0, 40.0, 50.0, 60.0] {
        let g = db_to_linear(db);
        let p = xp_outage_quadrature(&rates, &PowerProfile::uniform(g, 3).unwrap(), Tolerance::new(1e-300, 1e-10))
            .unwrap()
            .value;
        let gap = (p * g.powi(3) - h).abs() / h;
        assert!(gap < prev_gap, "{db} dB");
        prev_gap = gap;
    }
    assert!(prev_gap < 0.05);
}

#[test]
fn diversity_orders() {
    let window: Vec<f64> = [50.0, 55.0, 60.0, 65.0, 70.0].iter().map(|d| db_to_linear(*d)).collect();
    let rates = sched(&[1.0, 1.0]);
    let pts: Vec<(f64, f64)> = window
        .iter()
        .map(|g| (*g, outage_k2_exact(&rates, &PowerProfile::uniform(*g, 2).unwrap(), 1e-30).unwrap().value))
        .collect();
    let d = diversity_order_fit(&pts).unwrap().diversity_order();
    assert!((d - 2.0).abs() < 0.1, "{d}");

    let rates = sched(&[1.0, 0.5, 2.0]);
    let pts: Vec<(f64, f64)> = window
        .iter()
        .map(|g| (*g, outage_asymptotic_general(&rates, &PowerProfile::uniform(*g, 3).unwrap()).unwrap()))
        .collect();
    let d = diversity_order_fit(&pts).unwrap().diversity_order();
    assert!((d - 3.0).abs() < 1e-9, "{d}");
}

#[test]
fn three_round_density_normalizes() {
    // x_k = x_{k-1} (1 + g_k), with g_k truncated where exp(-g / snr_bar) < 1e-15.
    let powers = PowerProfile::new(vec![1.0, 2.0, 0.5]).unwrap();
    let span: Vec<f64> = powers.snr_bars().iter().map(|g| 35.0 * g).collect();
    let tol = Tolerance::new(1e-11, 1e-10);
    let total = integrate_adaptive(
        |x1| {
            integrate_adaptive(
                |x2| {
                    integrate_adaptive(
                        |x3| joint_density_x(&[x1, x2, x3], &powers).unwrap(),
                        x2,
                        x2 * (1.0 + span[2]),
                        tol.tightened(100.0),
                    )
                    .unwrap()
                    .value
                },
                x1,
                x1 * (1.0 + span[1]),
                tol.tightened(10.0),
            )
            .unwrap()
            .value
        },
        1.0,
        1.0 + span[0],
        tol,
    )
    .unwrap()
    .value;
    assert!((total - 1.0).abs() < 1e-6, "{total}");
}

#[test]
fn confidence_intervals_are_calibrated() {
    let rates = sched(&[1.0, 1.0]);
    let powers = PowerProfile::uniform(10.0, 2).unwrap();
    let exact = outage_k2_exact(&rates, &powers, 1e-14).unwrap().value;
    let covered = (0..100u64)
        .filter(|seed| {
            let est = estimate_outage(&SimConfig::new(Scheme::Xp, rates.clone(), powers.clone(), 20_000, *seed, 1).unwrap())
                .unwrap();
            let Uncertainty::Confidence95(half) = est.uncertainty else {
                panic!("expected a confidence interval")
            };
            (est.value - exact).abs() <= half
        })
        .count();
    assert!(covered >= 90, "{covered} of 100");
}

#[test]
fn throughput_paths_agree_over_snr() {
    let rates = sched(&[1.0, 1.0]);
    for db in [0.0, 5.0, 10.0, 15.0, 20.0] {
        let powers = PowerProfile::from_db(&[db, db]).unwrap();
        for scheme in [Scheme::Xp, Scheme::Inr] {
            let ana = analytical_throughput(scheme, &rates, &powers).unwrap();
            let mc = estimate_throughput(&SimConfig::new(scheme, rates.clone(), powers.clone(), 100_000, 2024, 4).unwrap())
                .unwrap();
            assert!(
                (mc.value - ana).abs() <= mc.ci_half_width,
                "{scheme} {db} dB: mc {} +- {} vs {ana}",
                mc.value,
                mc.ci_half_width
            );
        }
    }
}

#[test]
fn throughput_chain_from_exact_paths() {
    let rates = sched(&[1.0, 1.0]);
    let powers = PowerProfile::from_db(&[10.0, 10.0]).unwrap();
    let chain = xp_outage_chain(&rates, &powers).unwrap();
    let p1 = 1.0 - (-0.1f64).exp();
    assert!((chain[0] - p1).abs() < 1e-15);
    let p2 = outage_k2_exact(&rates, &powers, 1e-14).unwrap().value;
    let expected = (1.0 * (1.0 - p1) + 2.0 * (p1 - p2)) / (1.0 + p1);
    assert!((throughput_analytical(Scheme::Xp, &rates, &chain).unwrap() - expected).abs() < 1e-14);
}

#[test]
fn xp_beats_incremental_redundancy_at_twenty_db() {
    let rates = sched(&[1.0, 1.0, 1.0]);
    let powers = PowerProfile::from_db(&[20.0; 3]).unwrap();
    let cfg = |s| SimConfig::new(s, rates.clone(), powers.clone(), 100_000, 5, 4).unwrap();
    let xp = estimate_throughput(&cfg(Scheme::Xp)).unwrap().value;
    let inr = estimate_throughput(&cfg(Scheme::Inr)).unwrap().value;
    assert!(xp >= inr, "{xp} < {inr}");
    assert!(analytical_throughput(Scheme::Xp, &rates, &powers).unwrap() >= analytical_throughput(Scheme::Inr, &rates, &powers).unwrap());
}
