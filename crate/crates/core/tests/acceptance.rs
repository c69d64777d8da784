//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so criteria execute sequentially (the
//! largest assembly holds ~0.8 GB) and every line is printed even when an
//! earlier criterion fails. Exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use volterra_core::analytic::{heat_solution, resolvent_apply, wave_solution, Resolvent};
use volterra_core::solver2d::{assemble_2d, predicted_nnz, sparsity_bound, verify_sparsity};
use volterra_core::sparse::{iterative_solve, IdentityPreconditioner, IterativeConfig, KrylovMethod, SolveStatus};
use volterra_core::stochastic::{deterministic_path, sample_increments_for, stochastic_convolution};
use volterra_core::*;

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

fn order(alpha: f64) -> MemoryOrder {
    MemoryOrder::new(alpha).unwrap()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

/// Sup-norm error over the grid at `t = T`, and the largest one over 13
/// equispaced times in `[0, T]`.
fn benchmark_error(alpha: f64, horizon: f64, half: f64, m: usize, n: usize, sigma: f64) -> (f64, f64) {
    let grid = Grid1D::symmetric(half, m).unwrap();
    let g = InitialField1D::gaussian(sigma).unwrap();
    let sol = solve_1d(order(alpha), horizon, n, &grid, &g).unwrap();
    let error_at = |t: f64| {
        let exact: Vec<f64> = grid
            .points()
            .into_iter()
            .map(|x| {
                if alpha == 1.0 {
                    heat_solution(x, t, sigma).unwrap()
                } else {
                    wave_solution(x, t, &g)
                }
            })
            .collect();
        sup_error(&sol.at_time(t).unwrap(), &exact).unwrap()
    };
    let over_time = (0..=12).map(|k| error_at(horizon * k as f64 / 12.0)).fold(0.0, f64::max);
    (error_at(horizon), over_time)
}

fn criterion_1() -> Outcome {
    let ((err, over_time), took) = timed(|| benchmark_error(1.0, 6.0, 15.0, 151, 8, 1.0));
    outcome(
        err <= 1e-3 && took < Duration::from_secs(10),
        format!("alpha=1 T=6 m=151 n=8: sup error at t=6 {err:.3e} vs 1e-3 (over [0,6]: {over_time:.3e}); {took:.2?}"),
    )
}

fn criterion_2() -> Outcome {
    let ((err, over_time), took) = timed(|| benchmark_error(2.0, 6.0, 15.0, 151, 8, 1.0));
    outcome(
        err <= 1e-3 && took < Duration::from_secs(10),
        format!("alpha=2 T=6 m=151 n=8: sup error at t=6 {err:.3e} vs 1e-3 (over [0,6]: {over_time:.3e}); {took:.2?}"),
    )
}

fn criterion_3() -> Outcome {
    let (errs, took) = timed(|| [1.0, 2.0].map(|alpha| benchmark_error(alpha, 12.0, 20.0, 201, 18, 1.0).0));
    outcome(
        errs.iter().all(|&e| e <= 1e-3) && took < Duration::from_secs(60),
        format!(
            "T=12 m=201 n=18: sup error at t=12 alpha=1 {:.3e}, alpha=2 {:.3e} vs 1e-3; {took:.2?}",
            errs[0], errs[1]
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, m) in [(4, 20), (8, 101), (16, 200)] {
        // alpha = 1.5 has no zero coupling entries, the densest case
        let (basis, coupling) = time_discretization(order(1.5), 6.0, n, QuadratureSpec::default()).unwrap();
        let weights = source_weights(&basis).unwrap();
        let grid = Grid2D::symmetric(15.0, m).unwrap();
        let g = InitialField2D::radial(2.0).unwrap();
        let system = assemble_2d(&coupling, &weights, &g, &grid).unwrap();
        pass &= verify_sparsity(&system, n, m) && predicted_nnz(&coupling, m) == system.matrix.nnz();
        parts.push(format!("({n},{m}) nnz {} <= {}", system.matrix.nnz(), sparsity_bound(n, m)));
    }
    // the printed figure is the leading term 5 n^2 m^2 of the bound
    let leading = 5 * 16 * 16 * 200 * 200;
    pass &= leading == 51_200_000;
    parts.push(format!(
        "bound(16,200) = {} (leading term 5n^2m^2 = {:.3e})",
        sparsity_bound(16, 200),
        leading as f64
    ));
    outcome(pass, parts.join("; "))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let (basis, coupling) = time_discretization(order(1.5), 6.0, 8, QuadratureSpec::default()).unwrap();
    let weights = source_weights(&basis).unwrap();
    let grid = Grid2D::symmetric(15.0, 101).unwrap();
    let g = InitialField2D::radial(2.0).unwrap();
    let system = assemble_2d(&coupling, &weights, &g, &grid).unwrap();
    let config = IterativeConfig {
        method: KrylovMethod::Bicg,
        tol: 1e-10,
        max_iter: 10_000,
    };
    let precond = system_preconditioner(&system, &coupling).unwrap();
    let (_, with) = iterative_solve(&system.matrix, &system.rhs, Some(&precond), config).unwrap();
    // the plain run only has to be shown to need more iterations
    let plain_config = IterativeConfig {
        max_iter: with.iterations,
        ..config
    };
    let (_, without) =
        iterative_solve::<IdentityPreconditioner>(&system.matrix, &system.rhs, None, plain_config).unwrap();
    let took = start.elapsed();
    let plain_slower = without.status != SolveStatus::Converged || without.iterations > with.iterations;
    let pass = with.converged && with.relative_residual <= 1e-10 && plain_slower && took < Duration::from_secs(900);
    outcome(
        pass,
        format!(
            "N={}: preconditioned BiCG {} its (residual {:.2e}); unpreconditioned {:?} after {} its (residual {:.2e}); {took:.2?}",
            system.unknowns(),
            with.iterations,
            with.relative_residual,
            without.status,
            without.iterations,
            without.relative_residual
        ),
    )
}

fn max_relative_gap(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    a.iter().zip(b).fold(0.0f64, |s, (x, y)| s.max((x - y).abs())) / scale
}

fn criterion_6() -> Outcome {
    let direct = SolverOptions::direct();
    let iterative = SolverOptions::iterative(KrylovMethod::Bicg, true);
    let mut worst = (0.0f64, String::new());
    let mut failures = Vec::new();
    let mut systems = 0;
    let mut record = |result: Result<(Vec<f64>, Vec<f64>)>, label: String| {
        systems += 1;
        match result {
            Ok((a, b)) => {
                let gap = max_relative_gap(&a, &b);
                if gap > 1e-8 {
                    failures.push(format!("{label} gap {gap:.1e}"));
                }
                if worst.1.is_empty() || gap > worst.0 {
                    worst = (gap, label);
                }
            }
            Err(err) => failures.push(format!("{label}: {err}")),
        }
    };
    for alpha in [1.0, 1.25, 1.5, 1.75, 2.0] {
        let g1 = InitialField1D::gaussian(1.0).unwrap();
        for (n, m) in [(4, 151), (8, 151), (8, 301), (16, 301)] {
            let grid = Grid1D::symmetric(15.0, m).unwrap();
            let pair = solve_1d_with(order(alpha), 6.0, n, &grid, &g1, &direct).and_then(|a| {
                let b = solve_1d_with(order(alpha), 6.0, n, &grid, &g1, &iterative)?;
                Ok((a.coefficients().to_vec(), b.coefficients().to_vec()))
            });
            record(pair, format!("1D alpha={alpha} n={n} m={m}"));
        }
        let g2 = InitialField2D::radial(1.0).unwrap();
        for (n, m) in [(2, 41), (4, 35)] {
            let grid = Grid2D::symmetric(8.0, m).unwrap();
            let pair = solve_2d_with(order(alpha), 3.0, n, &grid, &g2, &direct).and_then(|a| {
                let b = solve_2d_with(order(alpha), 3.0, n, &grid, &g2, &iterative)?;
                Ok((a.coefficients().to_vec(), b.coefficients().to_vec()))
            });
            record(pair, format!("2D alpha={alpha} n={n} m={m}"));
        }
    }
    let mut detail = format!(
        "{systems} systems with N <= 5000; largest gap among converged runs {:.2e} ({})",
        worst.0, worst.1
    );
    if !failures.is_empty() {
        detail += &format!("; {} failed: {}", failures.len(), failures.join("; "));
    }
    outcome(failures.is_empty(), detail)
}

fn criterion_7() -> Outcome {
    let mut identity_gap = 0.0f64;
    for n in 1..=16 {
        let basis = TimeBasis::new(6.0, n).unwrap();
        let a = coupling_matrix(&basis, MemoryOrder::HEAT, QuadratureSpec::default()).unwrap();
        let w = source_weights(&basis).unwrap().weights;
        for j in 0..n {
            for k in 0..n {
                identity_gap = identity_gap.max((a.get(j, k) + a.get(k, j) - w[j] * w[k]).abs());
            }
        }
    }
    let basis = TimeBasis::new(1.0, 2).unwrap();
    let a = coupling_matrix(&basis, MemoryOrder::HEAT, QuadratureSpec::default()).unwrap();
    let r3 = 3f64.sqrt() / 6.0;
    let hand = (a.get(0, 0) - 0.5)
        .abs()
        .max((a.get(0, 1) + r3).abs())
        .max((a.get(1, 0) - r3).abs());
    outcome(
        identity_gap <= 1e-11 && hand <= 1e-12,
        format!("a_jk + a_kj = w_j w_k gap {identity_gap:.2e} (n <= 16); hand-derived entries gap {hand:.2e}"),
    )
}

// --- criterion 8 helpers ----------------------------------------------------

fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    // Newton on P_q, independent of the library's eigenvalue-based rules
    let mut nodes = Vec::with_capacity(q);
    let mut weights = Vec::with_capacity(q);
    for i in 0..q {
        let mut x = (PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=q {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = q as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

fn legendre_basis(t: f64, horizon: f64, n: usize) -> Vec<f64> {
    let x = 2.0 * t / horizon - 1.0;
    let mut p = vec![1.0, x];
    for k in 2..n {
        p.push(((2 * k - 1) as f64 * x * p[k - 1] - (k - 1) as f64 * p[k - 2]) / k as f64);
    }
    (0..n).map(|k| ((2 * k + 1) as f64 / horizon).sqrt() * p[k]).collect()
}

/// Gram matrix, coupling matrix and basis means by brute quadrature after
/// the substitutions `tau = T w^2`, `tau - s = tau v^2`, which make every
/// integrand a polynomial for `alpha in {1, 1.5, 2}`.
fn independent_projections(alpha: f64, horizon: f64, n: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let gamma = if alpha == 1.5 { PI.sqrt() / 2.0 } else { 1.0 };
    let (x, wq) = gauss_legendre(48);
    let (mut gram, mut coupling, mut mean) = (vec![0.0; n * n], vec![0.0; n * n], vec![0.0; n]);
    for (&xo, &wo) in x.iter().zip(&wq) {
        let w = 0.5 * (xo + 1.0);
        let tau = horizon * w * w;
        let outer = wo * horizon * w;
        let phi = legendre_basis(tau, horizon, n);
        let mut inner = vec![0.0; n];
        for (&xi, &wi) in x.iter().zip(&wq) {
            let v = 0.5 * (xi + 1.0);
            let s = tau - tau * v * v;
            let weight = wi * tau.powf(alpha) * v.powf(2.0 * alpha - 1.0) / gamma;
            for (acc, p) in inner.iter_mut().zip(legendre_basis(s, horizon, n)) {
                *acc += weight * p;
            }
        }
        for j in 0..n {
            mean[j] += outer * phi[j];
            for k in 0..n {
                gram[j * n + k] += outer * phi[j] * phi[k];
                coupling[j * n + k] += outer * phi[j] * inner[k];
            }
        }
    }
    (gram, coupling, mean)
}

/// Largest projection of the equation residual onto a basis function,
/// relative to the size of the projected source.
fn orthogonality_residual(alpha: f64) -> f64 {
    let (horizon, n, m) = (6.0, 8, 151);
    let grid = Grid1D::symmetric(15.0, m).unwrap();
    let g = InitialField1D::gaussian(1.0).unwrap();
    let sol = solve_1d(order(alpha), horizon, n, &grid, &g).unwrap();
    let (gram, coupling, mean) = independent_projections(alpha, horizon, n);
    let h2 = grid.spacing().powi(2);
    let c = |k: usize, i: isize| -> f64 {
        if i < 0 || i >= m as isize {
            0.0
        } else {
            sol.coefficient(k, i as usize)
        }
    };
    let samples = g.sample(&grid);
    let scale = samples.iter().fold(0.0f64, |s, v| s.max(v.abs())) * horizon.sqrt();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..m as isize {
            let mut r = -mean[j] * samples[i as usize];
            for k in 0..n {
                let lap = (c(k, i - 1) - 2.0 * c(k, i) + c(k, i + 1)) / h2;
                r += gram[j * n + k] * c(k, i) - coupling[j * n + k] * lap;
            }
            worst = worst.max(r.abs() / scale);
        }
    }
    worst
}

fn mass(field: &[f64], cell: f64) -> f64 {
    field.iter().sum::<f64>() * cell
}

fn criterion_8() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();

    let ortho = [1.0, 1.5, 2.0].map(orthogonality_residual);
    let worst = ortho.iter().cloned().fold(0.0, f64::max);
    pass &= worst <= 1e-8;
    parts.push(format!("residual orthogonality {worst:.2e}"));

    let grid = Grid1D::symmetric(15.0, 151).unwrap();
    let g = InitialField1D::gaussian(1.0).unwrap();
    let mut drift_1d = 0.0f64;
    let mut symmetry_1d = 0.0f64;
    for alpha in [1.0, 1.25, 1.5, 1.75, 2.0] {
        let sol = solve_1d(order(alpha), 6.0, 8, &grid, &g).unwrap();
        let m0 = mass(&g.sample(&grid), grid.spacing());
        for k in 0..=12 {
            let f = sol.at_time(k as f64 * 0.5).unwrap();
            drift_1d = drift_1d.max((mass(&f, grid.spacing()) - m0).abs() / m0);
            let peak = f.iter().fold(0.0f64, |s, v| s.max(v.abs()));
            for i in 0..f.len() {
                symmetry_1d = symmetry_1d.max((f[i] - f[f.len() - 1 - i]).abs() / peak);
            }
        }
    }
    pass &= drift_1d <= 1e-3 && symmetry_1d <= 1e-8;
    parts.push(format!("1D mass drift {drift_1d:.2e}, reflection {symmetry_1d:.2e}"));

    let grid2 = Grid2D::symmetric(15.0, 61).unwrap();
    let cell = grid2.spacing().powi(2);
    let m = grid2.m();
    let mut drift_2d = 0.0f64;
    let mut symmetry_2d = 0.0f64;
    for alpha in [1.0, 1.5, 2.0] {
        for g2 in [InitialField2D::radial(2.0).unwrap(), InitialField2D::rotated(3.0, 1.5).unwrap()] {
            let radial = matches!(g2, InitialField2D::RadialGaussian { .. });
            let sol = solve_2d(order(alpha), 6.0, 4, &grid2, &g2).unwrap();
            let m0 = mass(&g2.sample(&grid2), cell);
            for t in [0.0, 2.0, 4.0, 6.0] {
                let f = sol.at_time(t).unwrap();
                drift_2d = drift_2d.max((mass(&f, cell) - m0).abs() / m0);
                let peak = f.iter().fold(0.0f64, |s, v| s.max(v.abs()));
                for i in 0..m {
                    for l in 0..m {
                        let v = f[i * m + l];
                        // diagonal reflection for both fields, quarter turn for the radial one
                        let mut gap = (v - f[l * m + i]).abs();
                        if radial {
                            gap = gap.max((v - f[l * m + (m - 1 - i)]).abs());
                        }
                        symmetry_2d = symmetry_2d.max(gap / peak);
                    }
                }
            }
        }
    }
    pass &= drift_2d <= 5e-3 && symmetry_2d <= 1e-8;
    parts.push(format!("2D mass drift {drift_2d:.2e}, rotation/reflection {symmetry_2d:.2e}"));

    let bump = |x: f64| (-(x - 2.0) * (x - 2.0) / 2.25).exp();
    let shifted = InitialField1D::custom(bump);
    let combined = InitialField1D::custom(move |x| 2.0 * (-x * x).exp() - 3.0 * bump(x));
    let s1 = solve_1d(order(1.5), 6.0, 8, &grid, &g).unwrap();
    let s2 = solve_1d(order(1.5), 6.0, 8, &grid, &shifted).unwrap();
    let s12 = solve_1d(order(1.5), 6.0, 8, &grid, &combined).unwrap();
    let expected: Vec<f64> = s1
        .coefficients()
        .iter()
        .zip(s2.coefficients())
        .map(|(a, b)| 2.0 * a - 3.0 * b)
        .collect();
    let linearity = max_relative_gap(&expected, s12.coefficients());
    pass &= linearity <= 1e-8;
    parts.push(format!("linearity {linearity:.2e}"));

    let reference = solve_1d(order(1.5), 6.0, 32, &grid, &g).unwrap();
    let mut errors = Vec::new();
    for n in [4, 8, 16] {
        let sol = solve_1d(order(1.5), 6.0, n, &grid, &g).unwrap();
        let mut e = 0.0f64;
        for k in 0..=12 {
            let t = k as f64 * 0.5;
            e = e.max(sup_error(&sol.at_time(t).unwrap(), &reference.at_time(t).unwrap()).unwrap());
        }
        errors.push(e);
    }
    pass &= errors.windows(2).all(|w| w[1] < w[0]);
    parts.push(format!(
        "n-refinement vs n=32 (n=4,8,16): {:.2e}, {:.2e}, {:.2e}",
        errors[0], errors[1], errors[2]
    ));

    outcome(pass, parts.join("; "))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    let grid = Grid1D::symmetric(15.0, 151).unwrap();
    let g = InitialField1D::gaussian(1.0).unwrap();
    let partition = TimePartition::matching_grid(6.0, &grid).unwrap();

    let mut exact = true;
    for resolvent in [Resolvent::Heat, Resolvent::Wave] {
        let off = NoiseModel::per_node(0.0, 11).unwrap();
        let traj = simulate_trajectory(resolvent, &g, &off, &partition, &grid).unwrap();
        exact &= traj.fields == deterministic_path(resolvent, &g, &partition, &grid).unwrap();
    }
    pass &= exact;
    parts.push(format!("C=0 equals deterministic path: {exact}"));

    let model = NoiseModel::per_node(0.1, 2024).unwrap();
    let a = simulate_member(Resolvent::Wave, &g, &model, &partition, &grid, 17).unwrap();
    let b = simulate_member(Resolvent::Wave, &g, &model, &partition, &grid, 17).unwrap();
    let bits = a
        .fields
        .iter()
        .flatten()
        .zip(b.fields.iter().flatten())
        .all(|(x, y)| x.to_bits() == y.to_bits());
    pass &= bits;
    parts.push(format!("fixed seed bit-identical: {bits}"));

    // ensemble mean at t = 6, alpha = 2
    let members = 500u64;
    let det = resolvent_apply(Resolvent::Wave, 6.0, &g.sample(&grid), &grid).unwrap();
    let finals: Vec<Vec<f64>> = (0..members)
        .map(|k| {
            let inc = sample_increments_for(&model, &grid, &partition, k);
            let noise = stochastic_convolution(Resolvent::Wave, &partition, &inc, &grid).unwrap();
            det.iter().zip(noise).map(|(d, w)| d + w).collect()
        })
        .collect();
    let mut worst_ratio = 0.0f64;
    for j in 0..grid.len() {
        let mean = finals.iter().map(|f| f[j]).sum::<f64>() / members as f64;
        let var = finals.iter().map(|f| (f[j] - mean).powi(2)).sum::<f64>() / (members - 1) as f64;
        let band = 4.0 * var.sqrt() / (members as f64).sqrt();
        worst_ratio = worst_ratio.max((mean - det[j]).abs() / band);
    }
    pass &= worst_ratio <= 1.0;
    parts.push(format!("ensemble mean deviation {worst_ratio:.2} of the 4 sigma/sqrt(500) band"));

    // alpha = 1, same standard noise paths at strengths C and 2C
    let variance = |strength: f64| -> f64 {
        let model = NoiseModel::per_node(strength, 99).unwrap();
        let fields: Vec<Vec<f64>> = (0..members)
            .map(|k| {
                let inc = sample_increments_for(&model, &grid, &partition, k);
                stochastic_convolution(Resolvent::Heat, &partition, &inc, &grid).unwrap()
            })
            .collect();
        let mut total = 0.0;
        for j in 0..grid.len() {
            let mean = fields.iter().map(|f| f[j]).sum::<f64>() / members as f64;
            total += fields.iter().map(|f| (f[j] - mean).powi(2)).sum::<f64>() / (members - 1) as f64;
        }
        total / grid.len() as f64
    };
    let ratio = variance(0.2) / variance(0.1);
    pass &= (ratio - 4.0).abs() <= 1e-9;
    parts.push(format!("variance ratio at 2C {ratio:.12}"));

    let took = start.elapsed();
    pass &= took < Duration::from_secs(300);
    parts.push(format!("{took:.2?}"));
    outcome(pass, parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("heat benchmark", criterion_1),
        ("wave benchmark", criterion_2),
        ("long-horizon benchmark", criterion_3),
        ("2D sparsity bound", criterion_4),
        ("preconditioner efficacy", criterion_5),
        ("direct/iterative equivalence", criterion_6),
        ("coupling-matrix algebra", criterion_7),
        ("property suite", criterion_8),
        ("stochastic suite", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = check();
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        if !result.pass {
            failed += 1;
        }
        println!("criterion {} [{verdict}] {name}: {}", i + 1, result.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
