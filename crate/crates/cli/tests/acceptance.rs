//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line with the measured numbers (run with `--nocapture` to see them all).
//!
//! Criteria 7c and 7d encode literal targets that the verified numerics
//! show to be unattainable as stated; they are asserted faithfully anyway
//! and fail with the measured values. The companion checks 7b/7e validate
//! the same machinery against exact oracles and the proven right-tail
//! constant.

use std::time::Instant;

use pfaffwalk::continuum::{
    assemble_continuum_kernel, kernels, scaling_compare, special, ContinuumVariant,
};
use pfaffwalk::kernel::{
    assemble_matrix_kernel, predict_correlation, predict_spin_product, required_buffer,
    solve_scalar_kernel, solve_translation_invariant, MatrixKernel, ScalarKernel, SolveOptions,
};
use pfaffwalk::lattice::{
    estimate_products, exact_ctmc, mean_and_stderr, simulate_ensemble, spin_product,
    two_colour_ensemble, BoundaryMode, Configuration, RateProfile, TwoColourMode, Window,
};
use pfaffwalk::skew::{self, SkewMatrix};
use pfaffwalk::stats::{
    derrida_constant, gap_asymptotic_check, gap_probability_continuum, gap_probability_lattice,
    least_squares_fit, rightmost_tail,
};
use rand::{Rng, SeedableRng};

fn report(id: &str, pass: bool, detail: &str) {
    println!("ACCEPTANCE {id}: {} — {detail}", if pass { "PASS" } else { "FAIL" });
}

fn random_skew(order: usize, seed: u64) -> SkewMatrix {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    SkewMatrix::from_upper(order, |_, _| rng.gen_range(-1.0..1.0)).unwrap()
}

fn det(a: &SkewMatrix) -> f64 {
    nalgebra::DMatrix::from_fn(a.order(), a.order(), |i, j| a.get(i, j)).determinant()
}

#[test]
fn criterion_01_pfaffian_identity_suite() {
    let start = Instant::now();
    let mut worst_det = 0.0f64;
    for seed in 0..200u64 {
        let order = 2 + 2 * (seed as usize % 5); // 2,4,6,8,10
        let a = random_skew(order, seed);
        let pf = skew::pfaffian(&a);
        let d = det(&a);
        worst_det = worst_det.max((pf * pf - d).abs() / d.abs().max(1.0));
    }

    let mut worst_laplace = 0.0f64;
    for seed in 0..60u64 {
        let order = 2 + 2 * (seed as usize % 4); // up to 8
        let a = random_skew(order, 500 + seed);
        let pf = skew::pfaffian(&a);
        for row in 0..order {
            let lp = skew::pfaffian_laplace(&a, row).unwrap();
            worst_laplace = worst_laplace.max((pf - lp).abs() / pf.abs().max(1.0));
        }
    }

    let mut worst_quotient = 0.0f64;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    for _ in 0..50 {
        let n = 2 * (1 + rng.gen_range(0..4));
        let a: Vec<f64> = (0..n)
            .map(|_| {
                let v: f64 = rng.gen_range(0.2..2.0);
                if rng.gen::<bool>() {
                    v
                } else {
                    -v
                }
            })
            .collect();
        let got = skew::pf_quotient_check(&a).unwrap();
        let expect: f64 = (0..n / 2).map(|i| a[2 * i] / a[2 * i + 1]).product();
        worst_quotient = worst_quotient.max((got - expect).abs() / expect.abs().max(1.0));
    }

    let mut jcase_ok = true;
    for seed in 0..50u64 {
        let order = 2 + 2 * (seed as usize % 5);
        if skew::pf_minus_j(&random_skew(order, 7000 + seed), 1e-10).is_err() {
            jcase_ok = false;
        }
    }

    let elapsed = start.elapsed();
    let pass = worst_det < 1e-9
        && worst_laplace < 1e-12
        && worst_quotient < 1e-10
        && jcase_ok
        && elapsed.as_secs() < 10;
    report(
        "1 (pfaffian identities)",
        pass,
        &format!(
            "Pf^2=det worst {worst_det:.2e} (<1e-9), laplace worst {worst_laplace:.2e} \
             (<1e-12), quotient worst {worst_quotient:.2e} (<1e-10), Pf(A-J) dual-route ok: \
             {jcase_ok}, runtime {elapsed:.1?} (<10 s)"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_02_duality_exactness_at_desk_scale() {
    let start = Instant::now();
    let l = 10i64;
    let w = Window::new(0, l - 1).unwrap();
    let t = 1.0;
    let opts = SolveOptions { dt: Some(0.005), ..Default::default() };

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let bernoulli_sites: Vec<i64> = w.sites().filter(|_| rng.gen::<f64>() < 0.5).collect();
    let initials = [
        Configuration::full(w, BoundaryMode::Truncated).unwrap(),
        Configuration::alternating(w, BoundaryMode::Truncated).unwrap(),
        Configuration::from_sites(w, BoundaryMode::Truncated, &bernoulli_sites).unwrap(),
    ];

    // Every 1-, 2- and 3-point set on the window.
    let mut point_sets: Vec<Vec<i64>> = Vec::new();
    for a in 0..l {
        point_sets.push(vec![a]);
        for b in (a + 1)..l {
            point_sets.push(vec![a, b]);
            for c in (b + 1)..l {
                point_sets.push(vec![a, b, c]);
            }
        }
    }
    // Spin products: all single pairs plus sampled 2- and 3-pair tuples.
    let mut spin_sets: Vec<Vec<i64>> = Vec::new();
    for a in 0..l {
        for b in a..l {
            spin_sets.push(vec![a, b]);
        }
    }
    for _ in 0..30 {
        let mut ys: Vec<i64> = (0..4).map(|_| rng.gen_range(0..l)).collect();
        ys.sort_unstable();
        spin_sets.push(ys);
    }
    for _ in 0..20 {
        let mut ys: Vec<i64> = (0..6).map(|_| rng.gen_range(0..l)).collect();
        ys.sort_unstable();
        spin_sets.push(ys);
    }

    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for theta in [0.0, 0.5, 1.0] {
        let rates = RateProfile::boxed(0, l - 1, theta).unwrap();
        for eta0 in &initials {
            let kernel = solve_scalar_kernel(eta0, &rates, t, &opts).unwrap();
            let mk = assemble_matrix_kernel(kernel.clone());
            for pts in &point_sets {
                let predicted = predict_correlation(&mk, pts).unwrap();
                let exact = exact_ctmc(eta0, &rates, t, |c| {
                    f64::from(pts.iter().all(|&x| c.occupied(x)))
                })
                .unwrap();
                worst = worst.max((predicted - exact).abs());
                checked += 1;
            }
            for ys in &spin_sets {
                let predicted = predict_spin_product(&kernel, ys).unwrap();
                let exact =
                    exact_ctmc(eta0, &rates, t, |c| spin_product(c, ys, theta).unwrap())
                        .unwrap();
                worst = worst.max((predicted - exact).abs());
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = worst < 1e-6 && elapsed.as_secs() < 120;
    report(
        "2 (duality exactness)",
        pass,
        &format!(
            "{checked} quantities over theta in {{0, 1/2, 1}} x 3 initial conditions, \
             worst |pfaffian - uniformization| = {worst:.2e} (<1e-6), runtime {elapsed:.1?} \
             (<2 min)"
        ),
    );
    assert!(pass);
}

fn bulk_matrix_kernel(theta: f64, t_lat: f64, gmax: usize, lo: i64, hi: i64) -> MatrixKernel {
    let rates = RateProfile::homogeneous(1.0, theta).unwrap();
    let u = solve_translation_invariant(
        &|g| if g == 0 { 1.0 } else { (-theta).powi(g as i32) },
        &rates,
        t_lat,
        gmax,
        &SolveOptions::default(),
    )
    .unwrap();
    let k =
        ScalarKernel::from_gap_profile(&u, Window::new(lo, hi).unwrap(), t_lat, theta).unwrap();
    assemble_matrix_kernel(k)
}

#[test]
fn criterion_03_monte_carlo_consistency() {
    let start = Instant::now();
    let t = 25.0;
    let n = 100_000usize;
    let w = Window::new(-150, 150).unwrap();
    let eta0 = Configuration::full(w, BoundaryMode::Periodic).unwrap();

    // 20 one-point and 20 two-point sets, all within the accurate centre.
    let singles: Vec<Vec<i64>> = (-38..40).step_by(4).map(|x| vec![x]).take(20).collect();
    let mut pairs: Vec<Vec<i64>> = Vec::new();
    for (i, d) in [1i64, 2, 3, 5, 8, 13, 21, 2, 4, 6, 9, 1, 3, 7, 11, 2, 5, 10, 15, 4]
        .iter()
        .enumerate()
    {
        let base = -35 + 4 * i as i64;
        pairs.push(vec![base, base + d]);
    }

    let mut passed = 0usize;
    let mut total = 0usize;
    for theta in [0.0, 1.0] {
        let rates = RateProfile::homogeneous(1.0, theta).unwrap();
        let samples = simulate_ensemble(&eta0, &rates, t, 424_242, n).unwrap();
        let mk = bulk_matrix_kernel(theta, t, 120, -60, 60);
        for set in singles.iter().chain(pairs.iter()) {
            let (mean, stderr) = estimate_products(&samples, set).unwrap();
            let predicted = predict_correlation(&mk, set).unwrap();
            total += 1;
            if (mean - predicted).abs() <= 3.0 * stderr.max(1e-12) {
                passed += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = passed * 100 >= total * 95 && elapsed.as_secs() < 300;
    report(
        "3 (Monte Carlo consistency)",
        pass,
        &format!(
            "{passed}/{total} point sets within 3 sigma (needs >=95%), N = 1e5, theta in \
             {{0, 1}}, t = 25, window +-150, runtime {elapsed:.1?} (<5 min)"
        ),
    );
    assert!(pass);
}

struct ScalingCase {
    name: &'static str,
    variant: ContinuumVariant,
}

fn lattice_kernel_for(case: &ScalingCase, theta: f64, eps: f64, t_cont: f64) -> MatrixKernel {
    let t_lat = t_cont / (eps * eps);
    match case.variant {
        ContinuumVariant::Bulk => {
            let gmax = (2.8 / eps).round() as usize + 2;
            let half = (1.4 / eps).round() as i64;
            bulk_matrix_kernel(theta, t_lat, gmax, -half, half)
        }
        ContinuumVariant::Halfspace => {
            let rates = RateProfile::homogeneous(1.0, theta).unwrap();
            let buffer = required_buffer(t_lat, &rates) as i64;
            let half = (1.2 / eps).round() as i64 + buffer;
            let w = Window::new(-half, half).unwrap();
            let eta0 = Configuration::half_space(w, BoundaryMode::Truncated).unwrap();
            let k = solve_scalar_kernel(&eta0, &rates, t_lat, &SolveOptions::default()).unwrap();
            assemble_matrix_kernel(k)
        }
        ContinuumVariant::Killed => {
            let rates = RateProfile::killed(theta).unwrap();
            let buffer = required_buffer(t_lat, &rates) as i64;
            let hi = (1.6 / eps).round() as i64 + buffer;
            let w = Window::new(0, hi).unwrap();
            let sites: Vec<i64> = (1..=hi).collect();
            let eta0 =
                Configuration::from_sites(w, BoundaryMode::KilledAtZero, &sites).unwrap();
            let k = solve_scalar_kernel(&eta0, &rates, t_lat, &SolveOptions::default()).unwrap();
            assemble_matrix_kernel(k)
        }
        ContinuumVariant::Reflected => {
            let rates = RateProfile::reflected(theta).unwrap();
            let buffer = required_buffer(t_lat, &rates) as i64;
            let hi = (1.6 / eps).round() as i64 + buffer;
            let w = Window::new(0, hi).unwrap();
            let eta0 = Configuration::full(w, BoundaryMode::ReflectedAtZero).unwrap();
            let k = solve_scalar_kernel(&eta0, &rates, t_lat, &SolveOptions::default()).unwrap();
            assemble_matrix_kernel(k)
        }
    }
}

fn pairs_for(variant: ContinuumVariant) -> Vec<(f64, f64)> {
    let pts: Vec<f64> = match variant {
        ContinuumVariant::Bulk | ContinuumVariant::Halfspace => {
            (0..=10).map(|k| -1.0 + 0.2 * k as f64).collect()
        }
        ContinuumVariant::Killed => (1..=7).map(|k| 0.2 * k as f64).collect(),
        ContinuumVariant::Reflected => (0..=7).map(|k| 0.2 * k as f64).collect(),
    };
    let mut pairs = Vec::new();
    for (i, &y) in pts.iter().enumerate() {
        for &z in &pts[i..] {
            pairs.push((y, z));
        }
    }
    pairs
}

#[test]
fn criterion_04_continuum_scaling() {
    let start = Instant::now();
    let t_cont = 1.0;
    let theta = 0.0;
    let cases = [
        ScalingCase { name: "A/bulk", variant: ContinuumVariant::Bulk },
        ScalingCase { name: "B/halfspace", variant: ContinuumVariant::Halfspace },
        ScalingCase { name: "C/killed", variant: ContinuumVariant::Killed },
        ScalingCase { name: "D/reflected", variant: ContinuumVariant::Reflected },
    ];
    let mut pass = true;
    let mut detail = String::new();
    for case in &cases {
        let ck = assemble_continuum_kernel(case.variant, t_cont, theta).unwrap();
        let pairs = pairs_for(case.variant);
        let mut devs = Vec::new();
        for eps in [0.2f64, 0.1, 0.05] {
            let mk = lattice_kernel_for(case, theta, eps, t_cont);
            devs.push((eps, scaling_compare(&mk, eps, &ck, &pairs).unwrap()));
        }
        let fit: Vec<(f64, f64)> =
            devs.iter().map(|&(e, d)| (e.ln(), d.max(1e-12).ln())).collect();
        let (order, _) = least_squares_fit(&fit).unwrap();
        let dev01 = devs[1].1;
        let ok = order >= 0.8 && dev01 < 0.05;
        pass &= ok;
        detail.push_str(&format!(
            "{}: order {:.2} (>=0.8), dev(0.1) {:.3} (<0.05); ",
            case.name, order, dev01
        ));
    }

    // Maximal-entrance intensity at eps = 0.05, both ends of theta.
    for theta in [0.0, 1.0] {
        let eps = 0.05;
        let mk = bulk_matrix_kernel(theta, t_cont / (eps * eps), 8, 0, 4);
        let rho = mk.intensity(0).unwrap() / eps;
        let expect = 1.0 / ((1.0 + theta) * (2.0 * std::f64::consts::PI * t_cont).sqrt());
        let rel = (rho - expect).abs() / expect;
        pass &= rel < 0.01;
        detail.push_str(&format!("intensity(theta={theta}) rel {rel:.4} (<0.01); "));
    }
    let elapsed = start.elapsed();
    pass &= elapsed.as_secs() < 600;
    report(
        "4 (continuum scaling)",
        pass,
        &format!("{detail}runtime {elapsed:.1?} (<10 min)"),
    );
    assert!(pass);
}

#[test]
fn criterion_05_closed_form_derivative_checks() {
    let start = Instant::now();
    let h = 1e-5;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(55);
    let mut worst = 0.0f64;
    type Kf = fn(f64, f64, f64) -> f64;
    let table: [(&str, Kf, Kf, Kf, Kf); 4] = [
        ("bulk", kernels::bulk_k, kernels::bulk_dy, kernels::bulk_dz, kernels::bulk_dyz),
        (
            "halfspace",
            kernels::halfspace_k,
            kernels::halfspace_dy,
            kernels::halfspace_dz,
            kernels::halfspace_dyz,
        ),
        ("killed", kernels::killed_k, kernels::killed_dy, kernels::killed_dz, kernels::killed_dyz),
        (
            "reflected",
            kernels::reflected_k,
            kernels::reflected_dy,
            kernels::reflected_dz,
            kernels::reflected_dyz,
        ),
    ];
    for (name, k, dy, dz, dyz) in table {
        for _ in 0..100 {
            let t: f64 = rng.gen_range(0.1..1.5);
            let (y, z) = match name {
                "killed" | "reflected" => {
                    let y: f64 = rng.gen_range(0.05..2.0);
                    (y, y + rng.gen_range(0.05..2.0))
                }
                _ => {
                    let y: f64 = rng.gen_range(-2.0..1.5);
                    (y, y + rng.gen_range(0.05..2.0))
                }
            };
            let fd_y = (k(y + h, z, t) - k(y - h, z, t)) / (2.0 * h);
            let fd_z = (k(y, z + h, t) - k(y, z - h, t)) / (2.0 * h);
            // Cross derivative: central difference of the analytic first
            // partial, which keeps the difference quotient away from the
            // f64 noise floor that a double second-difference of K would
            // hit at h = 1e-5.
            let fd_yz = (dz(y + h, z, t) - dz(y - h, z, t)) / (2.0 * h);
            worst = worst.max((fd_y - dy(y, z, t)).abs());
            worst = worst.max((fd_z - dz(y, z, t)).abs());
            worst = worst.max((fd_yz - dyz(y, z, t)).abs());
        }
    }
    let elapsed = start.elapsed();
    let pass = worst < 1e-7;
    report(
        "5 (closed-form derivatives)",
        pass,
        &format!(
            "400 random points, worst |analytic - finite difference| = {worst:.2e} (<1e-7), \
             runtime {elapsed:.1?}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_06_figure_reproduction() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("figure.csv");
    let mut cfg = pfaffwalk_cli::RunConfig::default();
    cfg.t = 0.25;
    cfg.theta = 0.0;
    cfg.out = Some(out.to_str().unwrap().to_owned());
    pfaffwalk_cli::cmd_figure(&cfg).unwrap();
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    let first = &rows[0];
    let absorbing_at_zero = first[1];
    let reflecting_at_zero = first[2];
    let two_over_sqrt_pi = 2.0 / std::f64::consts::PI.sqrt();
    let bulk = 2.0 / (2.0 * std::f64::consts::PI).sqrt();
    let last = rows.last().unwrap();
    let pass = absorbing_at_zero == 0.0
        && (reflecting_at_zero - two_over_sqrt_pi).abs() < 1e-10
        && (last[1] - bulk).abs() < 1e-6
        && (last[2] - bulk).abs() < 1e-6;
    report(
        "6 (figure reproduction)",
        pass,
        &format!(
            "rho_abs(0) = {absorbing_at_zero:e} (= 0 exactly), rho_refl(0) = \
             {reflecting_at_zero:.12} (2/sqrt(pi) +- 1e-10), at y = 10 sqrt(t): \
             {:.8}/{:.8} -> {bulk:.8} (+-1e-6), runtime {:.1?}",
            last[1],
            last[2],
            start.elapsed()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_07a_lattice_gap_oracles() {
    let start = Instant::now();
    let w = Window::new(0, 11).unwrap();
    let theta = 0.5;
    let t = 1.0;
    let rates = RateProfile::boxed(0, 11, theta).unwrap();
    let eta0 = Configuration::full(w, BoundaryMode::Truncated).unwrap();
    let kernel = solve_scalar_kernel(
        &eta0,
        &rates,
        t,
        &SolveOptions { dt: Some(0.005), ..Default::default() },
    )
    .unwrap();
    let mk = assemble_matrix_kernel(kernel);
    let sites = [2i64, 5, 7, 10];
    let p = gap_probability_lattice(&mk, &sites).unwrap();
    let exact = exact_ctmc(&eta0, &rates, t, |c| {
        f64::from(sites.iter().all(|&x| !c.occupied(x)))
    })
    .unwrap();
    let oracle_gap = (p - exact).abs();

    let n = 100_000;
    let samples = simulate_ensemble(&eta0, &rates, t, 808, n).unwrap();
    let empties: Vec<f64> = samples
        .iter()
        .map(|s| f64::from(sites.iter().all(|&x| !s.config.occupied(x))))
        .collect();
    let (mc, se) = mean_and_stderr(&empties).unwrap();
    let mc_gap = (mc - p).abs();

    let pass = oracle_gap < 1e-6 && mc_gap <= 3.0 * se;
    report(
        "7a (lattice gap vs oracles)",
        pass,
        &format!(
            "4-site gap: |pfaffian - uniformization| = {oracle_gap:.2e} (<1e-6); MC \
             deviation {mc_gap:.2e} vs 3 sigma = {:.2e}; runtime {:.1?}",
            3.0 * se,
            start.elapsed()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_07b_fredholm_stability_and_lattice_agreement() {
    let start = Instant::now();
    let theta = 1.0;
    let t: f64 = 0.25;
    let ck = assemble_continuum_kernel(ContinuumVariant::Bulk, t, theta).unwrap();
    // Interval of length 2 at acceptance settings; the node-doubling gate
    // (<1e-6 drift) is enforced inside gap_probability_continuum.
    let p_cont = match gap_probability_continuum(&ck, (0.0, 2.0), 800) {
        Ok(p) => p,
        Err(e) => {
            report("7b (Fredholm stability)", false, &e.to_string());
            panic!("{e}");
        }
    };
    let eps: f64 = 0.02;
    let m = (2.0 / eps).round() as i64;
    let mk = bulk_matrix_kernel(theta, t / (eps * eps), m as usize + 2, -1, m + 1);
    let sites: Vec<i64> = (0..m).collect();
    let p_lat = gap_probability_lattice(&mk, &sites).unwrap();
    let agree = (p_cont - p_lat).abs();
    let pass = agree < 1e-3;
    report(
        "7b (Fredholm stability + lattice agreement)",
        pass,
        &format!(
            "node doubling stable at 800->1600 (gate <1e-6); continuum {p_cont:.6} vs \
             eps=0.02 lattice {p_lat:.6}, |diff| = {agree:.2e} (<1e-3); runtime {:.1?}",
            start.elapsed()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_07c_decay_rate_vs_derrida_constant() {
    // Literal criterion: fitted bulk decay rate within 10% of A(theta) for
    // theta in {1/2, 1}. The exactly computed gap decays exponentially with
    // a different rate (cross-checked against uniformization, Monte Carlo
    // and the proven right-tail constant), so this encodes the measured
    // disagreement rather than hiding it.
    let start = Instant::now();
    let t: f64 = 0.25;
    let lengths = [2.0, 2.75, 3.5, 4.25, 5.0];
    let mut detail = String::new();
    let mut pass = true;
    for theta in [0.5, 1.0] {
        let fit = gap_asymptotic_check(theta, t, &lengths, 800).unwrap();
        let a = derrida_constant(theta).unwrap();
        let rel = (fit.rate - a).abs() / a;
        pass &= rel <= 0.10;
        detail.push_str(&format!(
            "theta={theta}: fitted rate {:.4} vs A = {a:.4}, rel dev {:.0}% (needs <=10%); ",
            fit.rate,
            rel * 100.0
        ));
    }
    detail.push_str(&format!(
        "the exact lattice route confirms the fitted rates (see 7e and the gaps tests); \
         runtime {:.1?}",
        start.elapsed()
    ));
    report("7c (decay rate vs the series constant A(theta))", pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn criterion_07d_right_tail_upper_regime() {
    // Literal criterion: p(t, [L, inf)) within 1e-4 of 1 - erfc(L/sqrt(4t))
    // at L/sqrt(t) = 5. The converged tail mass is erfc/4 (1 + o(1)),
    // which sits inside the stated O(e^{-L^2/4t}) band but 3e-4 away from
    // the quoted leading term.
    let start = Instant::now();
    let t: f64 = 0.25;
    let ck = assemble_continuum_kernel(ContinuumVariant::Halfspace, t, 1.0).unwrap();
    let l = 5.0 * t.sqrt();
    let p = rightmost_tail(&ck, l, 128).unwrap();
    let quoted = 1.0 - special::erfc(l / (4.0 * t).sqrt());
    let diff = (p - quoted).abs();
    let band = (-l * l / (4.0 * t)).exp();
    let quarter_tail = special::erfc(l / (4.0 * t).sqrt()) / 4.0;
    let pass = diff <= 1e-4;
    report(
        "7d (right tail, upper regime)",
        pass,
        &format!(
            "p = {p:.8}, quoted 1-erfc = {quoted:.8}, |diff| = {diff:.2e} (needs <=1e-4); \
             within the O(e^-L^2/4t) band {band:.1e}: {}; observed tail mass {:.3e} vs \
             erfc/4 = {quarter_tail:.3e}; runtime {:.1?}",
            diff < band,
            1.0 - p,
            start.elapsed()
        ),
    );
    assert!(pass, "measured |p - (1 - erfc)| = {diff:.3e}");
}

#[test]
fn criterion_07e_right_tail_lower_slope() {
    // Supplementary: the lower-tail slope of log p(t, [L, inf)) against
    // L/sqrt(4t) reproduces the proven constant zeta(3/2)/(2 sqrt(2 pi)).
    let start = Instant::now();
    let t: f64 = 0.25;
    let ck = assemble_continuum_kernel(ContinuumVariant::Halfspace, t, 1.0).unwrap();
    let mut pts = Vec::new();
    for ratio in [-3.0f64, -4.0, -5.0] {
        let l = ratio * t.sqrt();
        let p = rightmost_tail(&ck, l, 1024).unwrap();
        pts.push((l / (4.0 * t).sqrt(), p.ln()));
    }
    let (slope, _) = least_squares_fit(&pts).unwrap();
    let expect = 2.612375348685488343 / (2.0 * (2.0 * std::f64::consts::PI).sqrt());
    let rel = (slope - expect).abs() / expect;
    let pass = rel < 0.15;
    report(
        "7e (right-tail lower-regime slope)",
        pass,
        &format!(
            "fitted slope {slope:.5} vs zeta(3/2)/(2 sqrt(2 pi)) = {expect:.5}, rel dev \
             {:.2}% (needs <15%); runtime {:.1?}",
            rel * 100.0,
            start.elapsed()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_08_thinning_properties() {
    let start = Instant::now();
    let w = Window::new(-30, 30).unwrap();
    let t = 4.0;
    let n = 100_000;
    let eta0 = Configuration::full(w, BoundaryMode::Periodic).unwrap();
    let mut pass = true;
    let mut detail = String::new();

    // Thinning: blue marginal of the theta = 1 two-colour system equals
    // 1/(1+theta) times the coalescing intensity.
    let theta = 1.0;
    let rates = RateProfile::homogeneous(1.0, theta).unwrap();
    let coloured =
        two_colour_ensemble(&eta0, &rates, t, 616, n, TwoColourMode::Thinning, 0.5).unwrap();
    for x in [-6i64, 0, 9] {
        let blue: Vec<f64> = coloured.iter().map(|s| f64::from(s.blue_at(x))).collect();
        let full: Vec<f64> =
            coloured.iter().map(|s| f64::from(s.config.occupied(x))).collect();
        let (bm, bse) = mean_and_stderr(&blue).unwrap();
        let (fm, fse) = mean_and_stderr(&full).unwrap();
        let target = fm / (1.0 + theta);
        let se = (bse * bse + fse * fse / 4.0).sqrt();
        let ok = (bm - target).abs() <= 3.0 * se;
        pass &= ok;
        detail.push_str(&format!(
            "thinning x={x}: blue {bm:.5} vs coalescing/2 {target:.5} ({:.1} sigma); ",
            (bm - target).abs() / se
        ));
    }

    // Strong thinning at lambda = 0.3 on a coalescing backbone.
    let lambda = 0.3;
    let rates0 = RateProfile::homogeneous(1.0, 0.0).unwrap();
    let coloured = two_colour_ensemble(
        &eta0,
        &rates0,
        t,
        717,
        n,
        TwoColourMode::StrongThinning,
        lambda,
    )
    .unwrap();
    for x in [-6i64, 9] {
        let blue: Vec<f64> = coloured.iter().map(|s| f64::from(s.blue_at(x))).collect();
        let full: Vec<f64> =
            coloured.iter().map(|s| f64::from(s.config.occupied(x))).collect();
        let (bm, bse) = mean_and_stderr(&blue).unwrap();
        let (fm, fse) = mean_and_stderr(&full).unwrap();
        let target = lambda * fm;
        let se = (bse * bse + lambda * lambda * fse * fse).sqrt();
        let ok = (bm - target).abs() <= 3.0 * se;
        pass &= ok;
        detail.push_str(&format!(
            "strong x={x}: blue {bm:.5} vs lambda*coalescing {target:.5} ({:.1} sigma); ",
            (bm - target).abs() / se
        ));
    }
    let elapsed = start.elapsed();
    report("8 (thinning properties)", pass, &format!("{detail}runtime {elapsed:.1?}"));
    assert!(pass);
}
