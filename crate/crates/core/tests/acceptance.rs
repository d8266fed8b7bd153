//! End-to-end acceptance checks. Each test writes one `PASS`/`FAIL` status
//! line to stderr (uncaptured) before asserting.

use std::io::Write;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::ThreadPoolBuilder;

use twimo::kloosterman::{complete_kloosterman, weil_campaign, HeathBrown};
use twimo::mollifier::{preset_two_piece, CoefficientTable};
use twimo::moments::{
    apply_q_operator, kappa_lower_bound, main_term_i, main_term_j, main_term_jet, main_term_limit, main_term_naive,
    main_term_upsilon, quadrature_i, EvalMode, KappaConfig, MainTermOptions, QuadratureControl,
};
use twimo::special::{afe_residual, dyadic_partition, v_shift};
use twimo::ShiftPair;

fn status(label: &str, pass: bool, detail: String, elapsed: Duration) -> bool {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "[{label:>2}] {verdict} {detail} ({:.1?})", elapsed);
    pass
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn trial_mobius(n: u64) -> f64 {
    let (mut m, mut sign, mut p) = (n, 1.0, 2);
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return 0.0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    sign
}

fn trial_von_mangoldt(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let p = (2..=n).find(|p| n % p == 0).unwrap();
    let mut m = n;
    while m % p == 0 {
        m /= p;
    }
    if m == 1 {
        (p as f64).ln()
    } else {
        0.0
    }
}

fn trial_tau(c: u64) -> u64 {
    (1..=c).filter(|d| c % d == 0).count() as u64
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn random_table(rng: &mut ChaCha8Rng, len: usize) -> CoefficientTable {
    CoefficientTable::generic((0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

#[test]
fn heath_brown_identities_are_exact() {
    let start = Instant::now();
    let u = 500;
    let hb = HeathBrown::new(u).unwrap();
    let mut worst = 0f64;
    for n in 1..=2 * u {
        worst = worst.max((hb.mu(n).unwrap() - trial_mobius(n)).abs());
        worst = worst.max((hb.lambda(n).unwrap() - trial_von_mangoldt(n)).abs());
    }
    let pass = worst < 1e-9 && start.elapsed() < Duration::from_secs(60);
    assert!(status(" 1", pass, format!("Heath-Brown identities, U = 500, max error {worst:.2e}"), start.elapsed()));
}

#[test]
fn weil_certificates_hold() {
    let start = Instant::now();
    let summary = weil_campaign(100, 2000, 100_000, 2024).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut oracle_gap = 0f64;
    let mut oracle_fail = 0;
    for _ in 0..200 {
        let c = rng.gen_range(1..=400u64);
        let (a, b) = (rng.gen_range(-1000..1000i64), rng.gen_range(-1000..1000i64));
        let mut direct = Complex64::new(0.0, 0.0);
        for x in 1..=c {
            if gcd(x, c) != 1 {
                continue;
            }
            let xbar = (1..=c).find(|y| (x * y) % c == 1 % c).unwrap();
            let phase = (a.rem_euclid(c as i64) as u64 * x + b.rem_euclid(c as i64) as u64 * xbar) % c;
            direct += Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase as f64 / c as f64);
        }
        let rec = complete_kloosterman(a, b, c).unwrap();
        oracle_gap = oracle_gap.max((rec.value - direct).norm());
        let g = gcd(gcd(a.unsigned_abs(), b.unsigned_abs()), c);
        if direct.norm() > trial_tau(c) as f64 * (c as f64).sqrt() * (g as f64).sqrt() + 1e-9 {
            oracle_fail += 1;
        }
    }
    let pass = summary.passed() && oracle_fail == 0 && oracle_gap < 1e-9 && start.elapsed() < Duration::from_secs(120);
    let detail = format!(
        "Weil bound, {} sums, {} failures, max |S|/bound {:.4}, direct-sum gap {oracle_gap:.1e}",
        summary.checked,
        summary.failures.len(),
        summary.max_ratio
    );
    assert!(status(" 2", pass, detail, start.elapsed()));
}

#[test]
fn approximate_functional_equation_residuals() {
    let start = Instant::now();
    let mut worst = 0f64;
    for &t in &[100.0f64, 500.0, 1000.0] {
        let l = 1.0 / t.ln();
        for &(a, b) in &[(0.0, 0.0), (l, l), (l, -l)] {
            let r = afe_residual(t, &ShiftPair::at_height(a, b, t).unwrap(), None).unwrap();
            worst = worst.max(r.relative);
        }
    }
    let pass = worst < 1e-2 && start.elapsed() < Duration::from_secs(300);
    assert!(status(" 3", pass, format!("AFE residual, 9 cases, worst relative {worst:.2e}"), start.elapsed()));
}

#[test]
fn quadrature_matches_unmollified_main_term() {
    let start = Instant::now();
    let c = CoefficientTable::delta_one();
    let devs: Vec<f64> = [1e3f64, 1e4, 1e5]
        .iter()
        .map(|&t| {
            let q = quadrature_i(&c, &ShiftPair::zero(t.ln()), t, &QuadratureControl::default()).unwrap();
            let m = main_term_limit(&c, t, &MainTermOptions::default()).unwrap();
            q.relative_deviation(&m)
        })
        .collect();
    let pass = devs[1] < 0.02 && devs[1] < devs[0] && devs[2] < devs[1] && start.elapsed() < Duration::from_secs(600);
    let detail = format!("unmollified oracle, deviations {:.2e} / {:.2e} / {:.2e}", devs[0], devs[1], devs[2]);
    assert!(status(" 4", pass, detail, start.elapsed()));
}

#[test]
fn quadrature_matches_mollified_main_term() {
    let start = Instant::now();
    let devs: Vec<f64> = [1e4f64, 1e5]
        .iter()
        .map(|&t| {
            let c = preset_two_piece(t, 0.5, 0.5, 0.0).unwrap();
            let sh = ShiftPair::zero(t.ln());
            let q = quadrature_i(&c, &sh, t, &QuadratureControl::default()).unwrap();
            let m = main_term_i(&c, &sh, t, EvalMode::Jet, &MainTermOptions::default()).unwrap();
            q.relative_deviation(&m)
        })
        .collect();
    let pass = devs[0] < 0.2 && devs[1] < devs[0] && start.elapsed() < Duration::from_secs(1800);
    let detail = format!("mollified oracle, deviations {:.2e} / {:.2e}", devs[0], devs[1]);
    assert!(status(" 5", pass, detail, start.elapsed()));
}

#[test]
fn pole_cancels_at_the_origin() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let opts = MainTermOptions::default();
    let mut worst = 0f64;
    for _ in 0..20 {
        let len = rng.gen_range(1..=200);
        let t = 10f64.powf(rng.gen_range(3.0..8.0));
        let c = random_table(&mut rng, len);
        let jet = main_term_i(&c, &ShiftPair::zero(t.ln()), t, EvalMode::Jet, &opts).unwrap();
        let lim = main_term_limit(&c, t, &opts).unwrap();
        worst = worst.max(rel(jet.value, lim.value));
    }
    let pass = worst < 1e-9;
    assert!(status(" 6", pass, format!("removable singularity, 20 tables, worst {worst:.2e}"), start.elapsed()));
}

#[test]
fn jet_derivatives_match_finite_differences() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let opts = MainTermOptions::default();
    let mut worst = 0f64;
    let mut q_gap = 0f64;
    for _ in 0..5 {
        let t = 10f64.powf(rng.gen_range(4.0..7.0));
        let l = t.ln();
        let len = rng.gen_range(2..=100);
        let c = random_table(&mut rng, len);
        let (a0, b0) = (rng.gen_range(0.2..1.0) / l, rng.gen_range(0.2..1.0) / l);
        let f = |a: f64, b: f64| {
            let sh = ShiftPair::at_height(a, b, t).unwrap();
            main_term_i(&c, &sh, t, EvalMode::Pointwise, &opts).unwrap().value
        };
        let (jet, report) = main_term_jet(&c, &c, &ShiftPair::at_height(a0, b0, t).unwrap(), t, &opts).unwrap();
        let h1 = 1e-6;
        let h2 = 1e-4;
        let fd = [
            ((1, 0), (f(a0 + h1, b0) - f(a0 - h1, b0)) / (2.0 * h1)),
            ((0, 1), (f(a0, b0 + h1) - f(a0, b0 - h1)) / (2.0 * h1)),
            ((2, 0), (f(a0 + h2, b0) - 2.0 * f(a0, b0) + f(a0 - h2, b0)) / (h2 * h2)),
            ((0, 2), (f(a0, b0 + h2) - 2.0 * f(a0, b0) + f(a0, b0 - h2)) / (h2 * h2)),
            (
                (1, 1),
                (f(a0 + h2, b0 + h2) - f(a0 + h2, b0 - h2) - f(a0 - h2, b0 + h2) + f(a0 - h2, b0 - h2)) / (4.0 * h2 * h2),
            ),
        ];
        worst = worst.max(rel(jet.value(), f(a0, b0)));
        for ((i, j), v) in fd {
            worst = worst.max(rel(jet.derivative(i, j), v));
        }
        let one = twimo::mollifier::UnitPolynomial::constant(1.0);
        let e = apply_q_operator(&one, &c, t, a0, &opts).unwrap();
        let on_diag = main_term_i(&c, &ShiftPair::at_height(a0, a0, t).unwrap(), t, EvalMode::Jet, &opts).unwrap();
        q_gap = q_gap.max((e - on_diag.value).abs());
        let _ = report;
    }
    let pass = worst < 1e-4 && q_gap == 0.0;
    let detail = format!("jet derivatives, worst relative {worst:.2e}, constant operator gap {q_gap:e}");
    assert!(status(" 7", pass, detail, start.elapsed()));
}

#[test]
fn restructured_sums_match_structural_oracles() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let opts = MainTermOptions::default();
    let t = 1e5f64;
    let sh = ShiftPair::at_height(0.4 / t.ln(), -0.1 / t.ln(), t).unwrap();

    let mut gcd_gap = 0f64;
    for &len in &[1usize, 37, 150, 300] {
        let c = random_table(&mut rng, len);
        let fast = main_term_i(&c, &sh, t, EvalMode::Pointwise, &opts).unwrap();
        let slow = main_term_naive(&c, &c, Some(&sh), t, &opts).unwrap();
        gcd_gap = gcd_gap.max(rel(fast.value, slow.value));
        let fast = main_term_limit(&c, t, &opts).unwrap();
        let slow = main_term_naive(&c, &c, None, t, &opts).unwrap();
        gcd_gap = gcd_gap.max(rel(fast.value, slow.value));
    }

    let a = random_table(&mut rng, 20);
    let b = random_table(&mut rng, 10);
    let mut conv = vec![0.0; 200];
    for n in 1..=20 {
        for k in 1..=10 {
            conv[n * k - 1] += a.values()[n - 1] * b.values()[k - 1];
        }
    }
    let conv = CoefficientTable::generic(conv).unwrap();
    let j = main_term_j(&a, &b, &sh, t, EvalMode::Pointwise, &opts).unwrap();
    let i = main_term_i(&conv, &sh, t, EvalMode::Pointwise, &opts).unwrap();
    let conv_gap = rel(j.value, i.value);

    let u = main_term_upsilon(&a, &a, &sh, t, EvalMode::Jet, &opts).unwrap();
    let i = main_term_i(&a, &sh, t, EvalMode::Jet, &opts).unwrap();
    let same = u.value == i.value;

    let pass = gcd_gap < 1e-10 && conv_gap < 1e-10 && same;
    let detail = format!("structural oracles, gcd {gcd_gap:.2e}, convolution {conv_gap:.2e}, two-table identical {same}");
    assert!(status(" 8", pass, detail, start.elapsed()));
}

#[test]
fn kappa_trend() {
    let start = Instant::now();
    let heights = [1e4, 1e6, 1e8];
    let mut mollified = Vec::new();
    let mut trivial = Vec::new();
    for &t in &heights {
        mollified.push(kappa_lower_bound(&KappaConfig::feng2011(t)).unwrap().kappa);
        trivial.push(kappa_lower_bound(&KappaConfig::trivial(1.3025, t)).unwrap().kappa);
    }
    let pass = mollified.iter().all(|k| k.is_finite())
        && mollified.windows(2).all(|w| w[1] > w[0])
        && mollified.iter().zip(&trivial).all(|(m, t)| m > t)
        && (0.30..=0.50).contains(&mollified[2])
        && start.elapsed() < Duration::from_secs(3600);
    let detail = format!(
        "kappa {:.4} / {:.4} / {:.4}, trivial {:.3} / {:.3} / {:.3}",
        mollified[0], mollified[1], mollified[2], trivial[0], trivial[1], trivial[2]
    );
    assert!(status(" 9", pass, detail, start.elapsed()));
}

#[test]
fn partition_of_unity_and_kernel_decay() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let part = dyadic_partition(1.0, 1e6).unwrap();
    let mut worst = 0f64;
    for _ in 0..1000 {
        let x = 10f64.powf(rng.gen_range(0.0..6.0));
        worst = worst.max((part.sum(x) - 1.0).abs());
    }
    let t = 500f64;
    let sh = ShiftPair::at_height(1.0 / t.ln(), 1.0 / t.ln(), t).unwrap();
    let scaled: Vec<f64> = (0..60)
        .map(|i| {
            let x = t * 10f64.powf(-2.0 + 6.0 * i as f64 / 59.0);
            v_shift(x, t, &sh).unwrap().norm() * (1.0 + x / t).powi(3)
        })
        .collect();
    let peak = scaled.iter().cloned().fold(0.0, f64::max);
    let tail_falls = scaled[40..].windows(2).all(|w| w[1] <= w[0]);
    let pass = worst < 1e-12 && peak.is_finite() && peak < 1e4 && tail_falls;
    let detail = format!("partition error {worst:.1e}, sup |V|(1+x/t)^3 = {peak:.3e}, tail decreasing {tail_falls}");
    assert!(status("10", pass, detail, start.elapsed()));
}

#[test]
fn reports_are_identical_across_thread_counts() {
    let start = Instant::now();
    let t = 1e6f64;
    let c = preset_two_piece(t, 4.0 / 7.0, 6.0 / 11.0, 0.0).unwrap();
    let sh = ShiftPair::at_height(-1.3 / t.ln(), -1.3 / t.ln(), t).unwrap();
    let small = preset_two_piece(300.0, 0.5, 0.5, 0.0).unwrap();
    let run = |threads: usize| {
        let pool = ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let jet = main_term_i(&c, &sh, t, EvalMode::Jet, &MainTermOptions::default()).unwrap();
            let point = main_term_i(&c, &sh, t, EvalMode::Pointwise, &MainTermOptions::default()).unwrap();
            let quad = quadrature_i(&small, &ShiftPair::zero(300f64.ln()), 300.0, &QuadratureControl::default()).unwrap();
            format!("{}{}{}", jet.to_key_value(), point.to_key_value(), quad.to_key_value())
        })
    };
    let reference = run(1);
    let same = [4, 16].iter().all(|&n| run(n) == reference);
    assert!(status("11", same, format!("bit-identical reports across 1/4/16 threads: {same}"), start.elapsed()));
}
