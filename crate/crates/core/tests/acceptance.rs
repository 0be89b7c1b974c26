//! Acceptance criteria. Every criterion runs and prints one `PASS`/`FAIL`
//! line; the process exits non-zero if any of them failed.

use std::f64::consts::{PI, TAU};
use std::sync::atomic::{AtomicBool, Ordering};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rbfstokes::experiments::*;
use rbfstokes::interpolation::{build_interp_matrix, build_kernel_block};
use rbfstokes::simulate::*;
use rbfstokes::stokeslets::*;
use rbfstokes::*;

static ANY_FAILED: AtomicBool = AtomicBool::new(false);

fn report(id: usize, name: &str, pass: bool, detail: String) {
    println!("criterion {id:>2} {} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    if !pass {
        ANY_FAILED.store(true, Ordering::SeqCst);
    }
}

fn criterion_01_kernel_pde_identities() {
    let mut worst = 0.0f64;
    for delta in [0.05, 0.5] {
        for r in [0.01, 0.1, 1.0, 10.0] {
            let lap_g = g_delta_second(r, delta) + g_delta_prime(r, delta) / r;
            let phi = blob(r, delta);
            worst = worst.max((lap_g - phi).abs() / phi.abs());
            let lap_b = bsecond_delta(r, delta) + bprime_delta(r, delta) / r;
            let g = g_delta(r, delta);
            worst = worst.max((lap_b - g).abs() / g.abs());
        }
    }
    report(1, "kernel PDE identities", worst <= 1e-8, format!("max relative residual {worst:.3e} (tol 1e-8)"));
}

fn criterion_02_incompressibility() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
    let positions: Vec<Point> = (0..10).map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
    let forces: Vec<Point> = (0..10).map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
    let blob = BlobModel::new(0.1, 1.0).unwrap();
    let h = 1e-4;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let x: Point = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
        // fourth-order centered differences
        let offsets = [2.0, 1.0, -1.0, -2.0];
        let weights = [-1.0, 8.0, -8.0, 1.0];
        let mut pts = Vec::new();
        for o in offsets {
            pts.push([x[0] + o * h, x[1]]);
        }
        for o in offsets {
            pts.push([x[0], x[1] + o * h]);
        }
        let u = evaluate_velocity(&positions, &forces, &blob, &pts);
        let mut div = 0.0;
        for k in 0..4 {
            div += weights[k] * (u[k][0] + u[4 + k][1]) / (12.0 * h);
        }
        worst = worst.max(div.abs());
    }
    report(2, "incompressibility", worst <= 1e-6, format!("max |div u| {worst:.3e} over 100 points (tol 1e-6)"));
}

fn criterion_03_operator_identity_and_oracle() {
    let open = NodeSet::kte(20, 0.0, 1.0, 0.85).unwrap();
    let closed = NodeSet::equispaced_periodic(20, 0.0, TAU).unwrap();
    let mut id_err = 0.0f64;
    for (spec, nodes) in [(KernelSpec::rbf(7.0), &open), (KernelSpec::sbf(7.0), &closed), (KernelSpec::sbf(3.0), &closed)] {
        let e = LinearOperator::build(&spec.into(), nodes, nodes, 0).unwrap();
        let n = nodes.len();
        id_err = id_err.max((e.matrix() - nalgebra::DMatrix::<f64>::identity(n, n)).amax());
    }

    let mut rng = rand::rngs::StdRng::seed_from_u64(3);
    let mut oracle_err = 0.0f64;
    for trial in 0..5 {
        let (spec, src) = if trial % 2 == 0 {
            let n = rng.random_range(10..30);
            (KernelSpec::sbf(rng.random_range(2.0..6.0)), NodeSet::equispaced_periodic(n, 0.0, TAU).unwrap())
        } else {
            let n = rng.random_range(10..20);
            (KernelSpec::rbf(rng.random_range(12.0..20.0)), NodeSet::kte(n, 0.0, 1.0, 0.85).unwrap())
        };
        let (a, b) = src.interval();
        let tgt = NodeSet::equispaced(rng.random_range(20..60), a, b).unwrap();
        let order = [0, 1, 2, 4][rng.random_range(0..4)];
        let y: Vec<f64> = (0..src.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let op = LinearOperator::build(&spec.into(), &src, &tgt, order).unwrap();
        let fast = op.apply(&y).unwrap();
        let coef = build_interp_matrix(&spec, &src).unwrap().lu().solve(&DVector::from_vec(y)).unwrap();
        let direct = build_kernel_block(&spec, src.values(), tgt.values(), order).unwrap() * coef;
        let scale = direct.amax();
        let diff = fast.iter().zip(direct.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        oracle_err = oracle_err.max(diff / scale);
    }
    report(
        3,
        "operator identity and coefficient oracle",
        id_err <= 1e-10 && oracle_err <= 1e-12,
        format!("identity error {id_err:.3e} (tol 1e-10), oracle relative error {oracle_err:.3e} (tol 1e-12)"),
    );
}

fn criterion_04_static_convergence() {
    let study = |method| static_error_study(&StaticStudyConfig { method, ..Default::default() }).unwrap();
    let (sbf, rbf, lag) = (study(Method::Sbf), study(Method::Rbf), study(Method::LagrangeChebyshev));
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, r) in [("sbf", &sbf), ("rbf", &rbf)] {
        let (first, last) = (r.for_n(8).unwrap(), r.for_n(80).unwrap());
        let drops = [
            (first.value / last.value).log10(),
            (first.normal / last.normal).log10(),
            (first.second_derivative / last.second_derivative).log10(),
        ];
        pass &= drops.iter().all(|&d| d >= 3.0);
        detail.push(format!("{name} decades {:.2}/{:.2}/{:.2}", drops[0], drops[1], drops[2]));
    }
    let mut worst_ratio = 1.0f64;
    for (a, b) in sbf.errors.iter().zip(&rbf.errors) {
        for (x, y) in [(a.value, b.value), (a.normal, b.normal), (a.second_derivative, b.second_derivative)] {
            worst_ratio = worst_ratio.max(x / y).max(y / x);
        }
    }
    pass &= worst_ratio <= 3.0;
    detail.push(format!("max SBF/RBF ratio {worst_ratio:.3} (tol 3)"));
    let (s64, l64) = (sbf.for_n(64).unwrap().second_derivative, lag.for_n(64).unwrap().second_derivative);
    pass &= s64 < l64;
    detail.push(format!("N_d=64 second derivative SBF {s64:.3e} vs Lagrange {l64:.3e}"));
    report(4, "static study convergence", pass, detail.join("; "));
}

fn criterion_05_best_shape_parameters() {
    let cfg = EpsSweepConfig {
        n_data: vec![8, 16, 32, 64],
        ..Default::default()
    };
    let sweep = run_eps_sweep(&cfg).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    for (n, target) in [(8, 2.5), (32, 3.8), (64, 8.2)] {
        let best = sweep.iter().find(|s| s.n_data == n).unwrap().best_epsilon;
        let ok = (best - target).abs() <= 0.3 * target;
        pass &= ok;
        detail.push(format!("N_d={n} best ε {best:.3} vs {target} ±30%"));
    }
    let fixed = static_error_study(&StaticStudyConfig {
        n_data: vec![8, 16],
        ..Default::default()
    })
    .unwrap();
    for n in [8, 16] {
        let tuned = sweep.iter().find(|s| s.n_data == n).unwrap().best_error;
        let fixed_err = fixed.for_n(n).unwrap().value;
        pass &= tuned < fixed_err;
        detail.push(format!("N_d={n} tuned {tuned:.3e} < fixed ε=7 {fixed_err:.3e}"));
    }
    report(5, "best shape parameters", pass, detail.join("; "));
}

/// Spearman rank correlation.
fn rank_correlation(a: &[f64], b: &[f64]) -> f64 {
    let ranks = |v: &[f64]| {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
        let mut r = vec![0.0; v.len()];
        for (rank, &i) in idx.iter().enumerate() {
            r[i] = rank as f64;
        }
        r
    };
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let mean = (n - 1.0) / 2.0;
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - mean) * (y - mean)).sum();
    let var: f64 = ra.iter().map(|x| (x - mean).powi(2)).sum();
    cov / var
}

fn criterion_06_closed_tangential_test() {
    let r = closed_tangential_test(&ClosedTangentialConfig::default()).unwrap();
    let (sbf_max, fd_max) = (r.sbf.max(), r.fd.max());
    let mut pass = sbf_max[0] < fd_max[0];
    let mut detail = vec![format!("max |Δp| SBF {:.3e} < FD {:.3e}", sbf_max[0], fd_max[0])];

    // decay away from the boundary crossing at x = 1
    let dist: Vec<f64> = r.sbf.markers.iter().map(|m| (m[0] - 1.0).abs()).collect();
    let speed: Vec<f64> = r.sbf.u.iter().zip(&r.sbf.v).map(|(u, v)| u.hypot(*v)).collect();
    let rho_p = rank_correlation(&dist, &r.sbf.pressure);
    let rho_u = rank_correlation(&dist, &speed);
    let nearest = dist.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
    let far = r.sbf.markers.len() - 1;
    let endpoint = r.sbf.pressure[far] <= r.sbf.pressure[nearest] && speed[far] <= speed[nearest];
    pass &= rho_p < 0.0 && rho_u < 0.0 && endpoint;
    detail.push(format!(
        "rank correlation with distance: pressure {rho_p:.3}, velocity {rho_u:.3}; x=1.8 ≤ nearest marker: {endpoint}"
    ));

    let (tv_sbf, tv_fd) = (r.sbf.total_variation(), r.fd.total_variation());
    let tv_ok = (0..3).all(|k| tv_fd[k] > tv_sbf[k]);
    pass &= tv_ok;
    detail.push(format!(
        "total variation FD {:.2e}/{:.2e}/{:.2e} > SBF {:.2e}/{:.2e}/{:.2e}",
        tv_fd[0], tv_fd[1], tv_fd[2], tv_sbf[0], tv_sbf[1], tv_sbf[2]
    ));
    report(6, "closed tangential test", pass, detail.join("; "));
}

fn criterion_07_open_tangential_test() {
    let run = |kernel: KernelSpec, node_kind: NodeKind, alpha: Option<f64>| {
        open_tangential_test(&OpenTangentialConfig {
            kernel,
            node_kind,
            alpha,
            ..Default::default()
        })
        .unwrap()
        .max()
    };
    let sbf_kte = run(KernelSpec::sbf(1.1), NodeKind::Kte, Some(0.85));
    let sbf_cheb = run(KernelSpec::sbf(1.1), NodeKind::Chebyshev, None);
    let rbf_kte = run(KernelSpec::rbf(1.1), NodeKind::Kte, Some(0.85));
    let labels = ["p", "u", "v"];
    let mut pass = true;
    let mut detail = Vec::new();
    for k in 0..3 {
        let ok_nodes = sbf_kte[k] <= sbf_cheb[k];
        let ok_kernel = sbf_kte[k] <= rbf_kte[k];
        pass &= ok_nodes && ok_kernel;
        detail.push(format!(
            "{}: KTE {:.15e} vs Chebyshev {:.15e} ({}), RBF {:.15e} ({})",
            labels[k],
            sbf_kte[k],
            sbf_cheb[k],
            if ok_nodes { "≤" } else { ">" },
            rbf_kte[k],
            if ok_kernel { "≤" } else { ">" }
        ));
    }
    report(7, "open tangential test", pass, detail.join("; "));
}

fn criterion_08_closed_relaxation() {
    let cfg = closed_relaxation_config();
    let sim = Simulation::new(&cfg).unwrap();
    let traj = sim.run(&initial_closed(0.3, 3, sim.data_nodes()).unwrap()).unwrap();
    let target = 1.5 * PI;
    let completed = traj.diverged.is_none() && (traj.times.last().unwrap() - 10.0).abs() < 1e-9;
    let gap0 = (traj.diagnostics[0].arclength - target).abs();
    let last = traj.diagnostics.last().unwrap();
    let gap10 = (last.arclength - target).abs();
    let u1 = traj.diagnostics[traj.frame_near(1.0).unwrap()].max_velocity;
    let pass = completed && gap10 < 0.25 * gap0 && last.max_velocity < u1;
    report(
        8,
        "closed relaxation",
        pass,
        format!(
            "completed {completed}; |L-3π/2| {gap0:.4} -> {gap10:.4} (ratio {:.3}, tol < 0.25); max|u| t=1 {u1:.3e} -> t=10 {:.3e}",
            gap10 / gap0,
            last.max_velocity
        ),
    );
}

fn filament_check(b: f64, omega: f64, period: f64) -> (bool, String) {
    let mut cfg = open_filament_config(b, omega);
    cfg.t_end = 3.0;
    cfg.output_every = 100;
    let sim = Simulation::new(&cfg).unwrap();
    let traj = sim.run(&initial_open(b, sim.data_nodes()).unwrap()).unwrap();
    if traj.diverged.is_some() {
        return (false, format!("b={b}: diverged"));
    }
    let ys = |i: usize| traj.states[i].iter().map(|p| p[1]).collect::<Vec<_>>();
    let (mut lo, mut hi, mut worst_shift) = (f64::INFINITY, 0.0f64, 0.0f64);
    for (i, &t) in traj.times.iter().enumerate() {
        if t < 1.0 - 1e-9 {
            continue;
        }
        let y = ys(i);
        let p2p = y.iter().copied().fold(f64::MIN, f64::max) - y.iter().copied().fold(f64::MAX, f64::min);
        lo = lo.min(p2p);
        hi = hi.max(p2p);
        if t + period <= cfg.t_end + 1e-9 {
            let j = traj.frame_near(t + period).unwrap();
            let later = ys(j);
            let num = y.iter().zip(&later).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt();
            let den = y.iter().map(|a| a * a).sum::<f64>().sqrt();
            worst_shift = worst_shift.max(num / den);
        }
    }
    let amp_ok = lo >= 0.75 * 2.0 * b && hi <= 1.25 * 2.0 * b;
    let shift_ok = worst_shift <= 0.1;
    (
        amp_ok && shift_ok,
        format!(
            "b={b}: peak-to-peak in [{lo:.5}, {hi:.5}] vs 2b={:.3} ±25%; worst relative L² change over {period} time units {worst_shift:.3} (tol 0.1)",
            2.0 * b
        ),
    )
}

fn criterion_09_open_filament() {
    let (ok1, d1) = filament_check(0.01, -TAU, 1.0);
    let (ok2, d2) = filament_check(0.005, -2.0 * TAU, 0.5);
    report(9, "open filament wave", ok1 && ok2, format!("{d1}; {d2}"));
}

fn criterion_10_euler_order() {
    let final_state = |dt: f64| {
        let mut cfg = closed_relaxation_config();
        cfg.dt = dt;
        cfg.t_end = 0.01;
        let sim = Simulation::new(&cfg).unwrap();
        let traj = sim.run(&initial_closed(0.3, 3, sim.data_nodes()).unwrap()).unwrap();
        traj.states.last().unwrap().clone()
    };
    let (a, b, c) = (final_state(1e-3), final_state(5e-4), final_state(2.5e-4));
    let diff = |x: &[Point], y: &[Point]| {
        x.iter().zip(y).map(|(p, q)| (p[0] - q[0]).hypot(p[1] - q[1])).fold(0.0, f64::max)
    };
    let ratio = diff(&a, &b) / diff(&b, &c);
    report(
        10,
        "forward Euler order",
        (1.5..=3.0).contains(&ratio),
        format!("refinement ratio {ratio:.4} (expected in [1.5, 3])"),
    );
}

fn main() {
    let criteria: [(usize, fn()); 10] = [
        (1, criterion_01_kernel_pde_identities),
        (2, criterion_02_incompressibility),
        (3, criterion_03_operator_identity_and_oracle),
        (4, criterion_04_static_convergence),
        (5, criterion_05_best_shape_parameters),
        (6, criterion_06_closed_tangential_test),
        (7, criterion_07_open_tangential_test),
        (8, criterion_08_closed_relaxation),
        (9, criterion_09_open_filament),
        (10, criterion_10_euler_order),
    ];
    for (id, run) in criteria {
        if std::panic::catch_unwind(run).is_err() {
            report(id, "aborted", false, "panicked before reporting".into());
        }
    }
    if ANY_FAILED.load(Ordering::SeqCst) {
        std::process::exit(1);
    }
}
