//! Self-contained verification suites behind `pfaffwalk verify`.
//!
//! Each check prints one PASS/FAIL line; a failing check turns into a
//! numerical-failure exit code.

use pfaffwalk::continuum::{assemble_continuum_kernel, special, ContinuumVariant};
use pfaffwalk::kernel::{
    assemble_matrix_kernel, predict_correlation, predict_spin_product, solve_scalar_kernel,
    solve_translation_invariant, ScalarKernel, SolveOptions,
};
use pfaffwalk::lattice::{
    exact_ctmc, spin_product, BoundaryMode, Configuration, RateProfile, Window,
};
use pfaffwalk::skew::{self, SkewMatrix};
use pfaffwalk::stats::{gap_probability_continuum, gap_probability_lattice};
use rand::{Rng, SeedableRng};

use crate::config::RunConfig;
use crate::CliError;

pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), pass, detail: detail.into() }
}

/// Plain partially pivoted LU determinant, independent of the Pfaffian
/// code paths it cross-checks.
fn lu_determinant(n: usize, a: &[f64]) -> f64 {
    let mut m = a.to_vec();
    let mut det = 1.0;
    for k in 0..n {
        let mut piv = k;
        for i in (k + 1)..n {
            if m[i * n + k].abs() > m[piv * n + k].abs() {
                piv = i;
            }
        }
        if m[piv * n + k] == 0.0 {
            return 0.0;
        }
        if piv != k {
            for j in 0..n {
                m.swap(k * n + j, piv * n + j);
            }
            det = -det;
        }
        det *= m[k * n + k];
        let inv = 1.0 / m[k * n + k];
        for i in (k + 1)..n {
            let f = m[i * n + k] * inv;
            for j in k..n {
                m[i * n + j] -= f * m[k * n + j];
            }
        }
    }
    det
}

fn random_skew(order: usize, seed: u64) -> SkewMatrix {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    SkewMatrix::from_upper(order, |_, _| rng.gen_range(-1.0..1.0)).unwrap()
}

pub fn suite_pfaffian(cfg: &RunConfig) -> Vec<Check> {
    let tol = cfg.tolerances.pfaffian;
    let mut out = Vec::new();

    let mut worst_sq = 0.0f64;
    for seed in 0..50u64 {
        let order = 2 + 2 * (seed as usize % 5); // 2..=10
        let a = random_skew(order, 1000 + seed);
        let pf = skew::pfaffian(&a);
        let dense: Vec<f64> = (0..order * order)
            .map(|i| a.get(i / order, i % order))
            .collect();
        let det = lu_determinant(order, &dense);
        worst_sq = worst_sq.max((pf * pf - det).abs() / det.abs().max(1.0));
    }
    out.push(check(
        "pfaffian squared equals determinant (orders 2-10)",
        worst_sq < tol,
        format!("worst relative residual {worst_sq:.2e}"),
    ));

    let mut worst_laplace = 0.0f64;
    for seed in 0..20u64 {
        let order = 2 + 2 * (seed as usize % 4); // 2..=8
        let a = random_skew(order, 2000 + seed);
        let pf = skew::pfaffian(&a);
        for row in 0..order {
            let lp = skew::pfaffian_laplace(&a, row).unwrap();
            worst_laplace = worst_laplace.max((pf - lp).abs() / pf.abs().max(1.0));
        }
    }
    out.push(check(
        "Laplace expansion agrees with Parlett-Reid (orders <= 8)",
        worst_laplace < 1e-12,
        format!("worst relative deviation {worst_laplace:.2e}"),
    ));

    let quotient = skew::pf_quotient_check(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
    out.push(check(
        "quotient-matrix Pfaffian closed form",
        (quotient - 0.3125).abs() < 1e-10,
        format!("got {quotient}"),
    ));

    let mut jcase_ok = true;
    for seed in 0..20u64 {
        if skew::pf_minus_j(&random_skew(8, 3000 + seed), 1e-10).is_err() {
            jcase_ok = false;
        }
    }
    out.push(check(
        "Pf(A - J) subset expansion agrees with direct evaluation",
        jcase_ok,
        "20 random order-8 matrices",
    ));

    let mut symplectic_ok = true;
    for n in 1..=6 {
        if skew::pfaffian(&SkewMatrix::symplectic(2 * n).unwrap()) != 1.0 {
            symplectic_ok = false;
        }
    }
    out.push(check("Pf(J) = 1 up to order 12", symplectic_ok, ""));
    out
}

pub fn suite_duality(cfg: &RunConfig) -> Vec<Check> {
    let tol = cfg.tolerances.duality;
    let mut out = Vec::new();
    let l = 10i64;
    let w = Window::new(0, l - 1).unwrap();
    let t = 1.0;
    let opts = SolveOptions { dt: Some(0.005), ..Default::default() };
    for theta in [0.0, 0.5, 1.0] {
        let rates = RateProfile::boxed(0, l - 1, theta).unwrap();
        let eta0 = Configuration::full(w, BoundaryMode::Truncated).unwrap();
        let kernel = solve_scalar_kernel(&eta0, &rates, t, &opts).unwrap();

        let ys = [2i64, 7];
        let predicted = predict_spin_product(&kernel, &ys).unwrap();
        let exact =
            exact_ctmc(&eta0, &rates, t, |c| spin_product(c, &ys, theta).unwrap()).unwrap();
        out.push(check(
            format!("spin product matches uniformization (theta={theta})"),
            (predicted - exact).abs() < tol,
            format!("pfaffian {predicted:.9} vs exact {exact:.9}"),
        ));

        let mk = assemble_matrix_kernel(kernel);
        for pts in [vec![4i64], vec![2, 7], vec![1, 4, 8]] {
            let predicted = predict_correlation(&mk, &pts).unwrap();
            let exact = exact_ctmc(&eta0, &rates, t, |c| {
                f64::from(pts.iter().all(|&x| c.occupied(x)))
            })
            .unwrap();
            out.push(check(
                format!("{}-point correlation matches (theta={theta})", pts.len()),
                (predicted - exact).abs() < tol,
                format!("pfaffian {predicted:.9} vs exact {exact:.9}"),
            ));
        }
    }
    out
}

pub fn suite_scaling(cfg: &RunConfig) -> Vec<Check> {
    let tol = cfg.tolerances.scaling;
    let mut out = Vec::new();
    let t_cont = 1.0f64;

    // Bulk via the translation-invariant fast path at two resolutions.
    let theta = 0.0;
    let ck = assemble_continuum_kernel(ContinuumVariant::Bulk, t_cont, theta).unwrap();
    let pairs: Vec<(f64, f64)> = vec![(-0.8, -0.2), (-0.4, 0.4), (0.0, 1.0), (0.2, 0.4)];
    let mut devs = Vec::new();
    for eps in [0.2f64, 0.1] {
        let t_lat = t_cont / (eps * eps);
        let rates = RateProfile::homogeneous(1.0, theta).unwrap();
        let u = solve_translation_invariant(
            &|g| if g == 0 { 1.0 } else { (-theta).powi(g as i32) },
            &rates,
            t_lat,
            (2.4 / eps).round() as usize + 2,
            &SolveOptions::default(),
        )
        .unwrap();
        let half = (1.2 / eps).round() as i64;
        let k = ScalarKernel::from_gap_profile(
            &u,
            Window::new(-half, half).unwrap(),
            t_lat,
            theta,
        )
        .unwrap();
        let mk = assemble_matrix_kernel(k);
        let dev = pfaffwalk::continuum::scaling_compare(&mk, eps, &ck, &pairs).unwrap();
        devs.push(dev);
        out.push(check(
            format!("bulk kernel deviation at eps={eps}"),
            dev < tol || eps > 0.1,
            format!("max blockwise deviation {dev:.4}"),
        ));
    }
    out.push(check(
        "bulk deviation decays with eps",
        devs[0] / devs[1] > 1.5,
        format!("{:.4} -> {:.4}", devs[0], devs[1]),
    ));

    // Killed variant at eps = 0.1 via the full solver.
    let eps = 0.1;
    let t_lat = t_cont / (eps * eps);
    let rates = RateProfile::killed(theta).unwrap();
    let buffer = pfaffwalk::kernel::required_buffer(t_lat, &rates) as i64;
    let hi = (1.4 / eps).round() as i64 + buffer;
    let w = Window::new(0, hi).unwrap();
    let sites: Vec<i64> = (1..=hi).collect();
    let eta0 = Configuration::from_sites(w, BoundaryMode::KilledAtZero, &sites).unwrap();
    let k = solve_scalar_kernel(&eta0, &rates, t_lat, &SolveOptions::default()).unwrap();
    let mk = assemble_matrix_kernel(k);
    let ck = assemble_continuum_kernel(ContinuumVariant::Killed, t_cont, theta).unwrap();
    let kpairs: Vec<(f64, f64)> = vec![(0.2, 0.6), (0.4, 1.2), (1.0, 1.3)];
    let dev = pfaffwalk::continuum::scaling_compare(&mk, eps, &ck, &kpairs).unwrap();
    out.push(check(
        "killed kernel deviation at eps=0.1",
        dev < tol,
        format!("max blockwise deviation {dev:.4}"),
    ));

    // Maximal-entrance intensity at eps = 0.05.
    let eps = 0.05;
    let theta = 1.0;
    let rates = RateProfile::homogeneous(1.0, theta).unwrap();
    let u = solve_translation_invariant(
        &|g| if g == 0 { 1.0 } else { (-theta).powi(g as i32) },
        &rates,
        t_cont / (eps * eps),
        8,
        &SolveOptions::default(),
    )
    .unwrap();
    let k = ScalarKernel::from_gap_profile(
        &u,
        Window::new(0, 4).unwrap(),
        t_cont / (eps * eps),
        theta,
    )
    .unwrap();
    let rho = assemble_matrix_kernel(k).intensity(0).unwrap() / eps;
    let expect = 1.0 / ((1.0 + theta) * (2.0 * std::f64::consts::PI * t_cont).sqrt());
    out.push(check(
        "maximal-entrance intensity within 1% at eps=0.05",
        (rho - expect).abs() / expect < 0.01,
        format!("lattice {rho:.6} vs closed form {expect:.6}"),
    ));
    out
}

pub fn suite_gaps(cfg: &RunConfig) -> Vec<Check> {
    let tol = cfg.tolerances.gaps;
    let mut out = Vec::new();

    // Empty kernel: gap probability 1.
    let ck = assemble_continuum_kernel(ContinuumVariant::Bulk, 0.25, 0.0)
        .unwrap()
        .with_prefactor(0.0);
    let p = gap_probability_continuum(&ck, (0.0, 1.0), 16).unwrap();
    out.push(check("zero kernel gives gap probability 1", (p - 1.0).abs() < 1e-12, format!("{p}")));

    // theta = 0 closed form.
    let t = 0.25;
    let ck = assemble_continuum_kernel(ContinuumVariant::Bulk, t, 0.0).unwrap();
    match gap_probability_continuum(&ck, (0.0, 1.0), 320) {
        Ok(p) => {
            let expect = special::erfc(1.0 / (2.0 * (2.0 * t).sqrt()));
            out.push(check(
                "coalescing gap equals the scalar kernel closed form",
                (p - expect).abs() < tol.max(1e-6),
                format!("fredholm {p:.9} vs erfc {expect:.9}"),
            ));
        }
        Err(e) => out.push(check(
            "coalescing gap equals the scalar kernel closed form",
            false,
            e.to_string(),
        )),
    }

    // Lattice gap vs uniformization on a 12-site box.
    let w = Window::new(0, 11).unwrap();
    let theta = 0.5;
    let rates = RateProfile::boxed(0, 11, theta).unwrap();
    let eta0 = Configuration::full(w, BoundaryMode::Truncated).unwrap();
    let kernel = solve_scalar_kernel(
        &eta0,
        &rates,
        1.0,
        &SolveOptions { dt: Some(0.005), ..Default::default() },
    )
    .unwrap();
    let mk = assemble_matrix_kernel(kernel);
    let sites = [3i64, 5, 8];
    let p = gap_probability_lattice(&mk, &sites).unwrap();
    let exact = exact_ctmc(&eta0, &rates, 1.0, |c| {
        f64::from(sites.iter().all(|&x| !c.occupied(x)))
    })
    .unwrap();
    out.push(check(
        "lattice 3-site gap matches uniformization",
        (p - exact).abs() < 1e-6,
        format!("pfaffian {p:.9} vs exact {exact:.9}"),
    ));
    out
}

pub fn cmd_verify(cfg: &RunConfig, suite: &str) -> Result<(), CliError> {
    let checks = match suite {
        "pfaffian" => suite_pfaffian(cfg),
        "duality" => suite_duality(cfg),
        "scaling" => suite_scaling(cfg),
        "gaps" => suite_gaps(cfg),
        other => {
            return Err(CliError::Config(format!(
                "unknown suite `{other}` (expected pfaffian|duality|scaling|gaps)"
            )))
        }
    };
    let mut failures = 0;
    for c in &checks {
        let tag = if c.pass { "PASS" } else { "FAIL" };
        if c.detail.is_empty() {
            println!("{tag} {}", c.name);
        } else {
            println!("{tag} {} ({})", c.name, c.detail);
        }
        if !c.pass {
            failures += 1;
        }
    }
    if failures > 0 {
        Err(CliError::Numerical(format!("{failures} verification check(s) failed")))
    } else {
        Ok(())
    }
}
