//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs the full builtin sweep once and checks the
//! figure-level criteria against its results.

mod common;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use common::{dist, oracle, random_point, rel, rng};
use emdof::channel::{run_rank_bound_trials, HarnessConfig};
use emdof::kernels::*;
use emdof::quadrature::{gl_box_grid, DEFAULT_NODE_CAP};
use emdof::scenarios::{builtin_configs, builtin_names, run_sweep, ScenarioResult};
use emdof::spectrum::{assemble, eigenvalues};
use emdof::wavenumber;
use rand::Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn near_zero_fraction(r: &ScenarioResult) -> f64 {
    let n = r.spectrum.normalized();
    n.iter().filter(|&&v| v < 1e-3).count() as f64 / n.len() as f64
}

fn transition_fraction(r: &ScenarioResult) -> f64 {
    let v = r.spectrum.eigenvalues();
    let band = v.iter().filter(|&&x| x > 0.1 && x < 0.9).count() as f64;
    let top = v.iter().filter(|&&x| x >= 0.9).count() as f64;
    band / top
}

fn trace_identities() -> Check {
    let start = Instant::now();
    let cfg = builtin_configs("fig3")
        .map_err(|e| e.to_string())?
        .into_iter()
        .find(|c| c.name == "fig3_ball")
        .ok_or("fig3_ball missing")?;
    let (grid, _) =
        emdof::scenarios::build_grid(&cfg, DEFAULT_NODE_CAP).map_err(|e| e.to_string())?;
    let k0 = wavenumber(3e9);
    let ball = eigenvalues(&assemble(&KernelSpec::Ball3d { k0 }, &grid).unwrap()).unwrap();
    let want = 0.125 * k0.powi(3) / (6.0 * PI * PI);
    let ball_err = rel(ball.sum(), want);
    let ball_time = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let line = gl_box_grid(&[[-1.0, 1.0]], &[128], DEFAULT_NODE_CAP).unwrap();
    let time = eigenvalues(&assemble(&KernelSpec::Time1d { omega: PI }, &line).unwrap()).unwrap();
    let time_err = (time.sum() - 2.0).abs();
    let time_time = start.elapsed().as_secs_f64();
    ensure(
        ball_err <= 1e-9 && time_err <= 1e-10 && ball_time <= 60.0 && time_time <= 60.0,
        format!(
            "ball rel err {ball_err:.2e} ({ball_time:.2} s), time abs err {time_err:.2e} ({time_time:.2} s)"
        ),
    )
}

fn kernel_oracles() -> Check {
    let start = Instant::now();
    let mut r = rng(2024);
    let c = 299_792_458.0;
    let mut worst: Vec<(&str, f64)> = Vec::new();
    let mut track =
        |name: &'static str, got: f64, want: f64| match worst.iter_mut().find(|w| w.0 == name) {
            Some(w) => w.1 = w.1.max(rel(got, want)),
            None => worst.push((name, rel(got, want))),
        };
    let mut slice_err: f64 = 0.0;
    for _ in 0..100 {
        let k0 = r.random_range(2.0..70.0);
        let k1 = r.random_range(0.1..0.95) * k0;
        let omega = r.random_range(0.5..20.0);
        let (t, t2) = (r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        track(
            "time1d",
            eval_time1d(omega, t, t2),
            oracle::time1d(omega, t - t2),
        );

        let (x2, y2) = (random_point(&mut r, 2, 0.5), random_point(&mut r, 2, 0.5));
        track(
            "disk2d",
            eval_disk2d(k0, &x2, &y2),
            oracle::disk2d(k0, dist(&x2, &y2)),
        );

        let (x, y) = (random_point(&mut r, 3, 0.5), random_point(&mut r, 3, 0.5));
        let d = dist(&x, &y);
        track(
            "ball3d",
            eval_ball3d(k0, &x, &y),
            oracle::radial(0.0, k0, d),
        );
        track(
            "shell3d",
            eval_shell3d(k0, k1, &x, &y),
            oracle::radial(k1, k0, d),
        );
        track("sphere3d", eval_sphere3d(k0, &x, &y), oracle::sphere(k0, d));

        let (tt, tt2) = (r.random_range(-5e-9..5e-9), r.random_range(-5e-9..5e-9));
        track(
            "spacetime",
            eval_spacetime(k0, c, &[x[0], tt], &[y[0], tt2]),
            oracle::spacetime(k0, c, (x[0] - y[0]).abs(), tt - tt2),
        );
        let p = [x[0], x[1], x[2], tt];
        let q = [y[0], y[1], y[2], tt];
        slice_err = slice_err.max(rel(
            eval_spacetime(k0, c, &p, &q),
            2.0 * eval_ball3d(k0, &x, &y),
        ));

        let r0 = r.random_range(0.05..1.0);
        let (kx, ky) = (random_point(&mut r, 3, 60.0), random_point(&mut r, 3, 60.0));
        track(
            "dual_ball",
            eval_dual_ball(r0, &kx, &ky),
            oracle::dual_ball(r0, dist(&kx, &ky)),
        );
        let a = [0; 3].map(|_| r.random_range(0.05..1.0));
        let delta = [kx[0] - ky[0], kx[1] - ky[1], kx[2] - ky[2]];
        track(
            "dual_cuboid",
            eval_dual_cuboid(a, &kx, &ky),
            oracle::dual_cuboid(a, delta),
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    let max = worst.iter().map(|w| w.1).fold(0.0, f64::max);
    let summary: Vec<String> = worst.iter().map(|(n, e)| format!("{n} {e:.1e}")).collect();
    ensure(
        max <= 1e-7 && slice_err <= 1e-10 && elapsed <= 120.0,
        format!(
            "max rel err {max:.2e} [{}], equal-time slice {slice_err:.1e}, {elapsed:.2} s",
            summary.join(", ")
        ),
    )
}

fn shell_to_surface() -> Check {
    let k0 = wavenumber(3e9);
    let mut r = rng(77);
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..50)
        .map(|_| (random_point(&mut r, 3, 0.25), random_point(&mut r, 3, 0.25)))
        .collect();
    let err = |delta: f64| {
        pairs
            .iter()
            .map(|(x, y)| {
                (eval_shell3d(k0, k0 - delta, x, y) / delta - eval_sphere3d(k0, x, y)).abs()
            })
            .fold(0.0, f64::max)
    };
    let (e1, e2) = (err(k0 / 100.0), err(k0 / 200.0));
    let ratio = e2 / e1;
    ensure(
        (0.35..=0.65).contains(&ratio),
        format!("error {e1:.3e} -> {e2:.3e}, ratio {ratio:.3}"),
    )
}

fn time_concentration(res: &HashMap<String, ScenarioResult>) -> Check {
    let mut notes = Vec::new();
    let mut ok = true;
    let mut fractions = Vec::new();
    for name in ["fig1_omega_t_2pi", "fig1_omega_t_4pi", "fig1_omega_t_8pi"] {
        let r = &res[name];
        let want = r.dof.asymptotic.ok_or("no asymptotic count")?;
        let dev = r.dof.shannon_count as f64 - want;
        ok &= dev.abs() <= 2.0;
        let f = transition_fraction(r);
        fractions.push(f);
        notes.push(format!("{} vs {want:.0}, band {f:.3}", r.dof.shannon_count));
    }
    ok &= fractions.windows(2).all(|w| w[0] > w[1]);
    ensure(ok, notes.join("; "))
}

fn surface_vs_thin_shell(res: &HashMap<String, ScenarioResult>) -> Check {
    let surface = &res["fig3_surface"];
    let shell = &res["fig3_shell_150mhz"];
    let s = surface.spectrum.normalized();
    let above = s.iter().filter(|&&v| v > 0.01).count();
    let h = shell.spectrum.normalized();
    let dev = s
        .iter()
        .zip(&h)
        .take(50)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let secs = surface.runtime_seconds.max(shell.runtime_seconds);
    ensure(
        above >= 50 && dev <= 0.1 && secs <= 300.0,
        format!("{above} surface values above 0.01, top-50 deviation {dev:.4}, {secs:.2} s"),
    )
}

fn height_gain(res: &HashMap<String, ScenarioResult>) -> Check {
    let counts: Vec<usize> = [
        "fig4_height_1",
        "fig4_height_3",
        "fig4_height_7",
        "fig4_height_10",
    ]
    .iter()
    .map(|n| res[*n].dof.fdof_at["0.1"])
    .collect();
    ensure(
        counts.windows(2).all(|w| w[0] < w[1]),
        format!("fdof(0.1) = {counts:?}"),
    )
}

fn spacing_near_zero(res: &HashMap<String, ScenarioResult>) -> Check {
    let half = near_zero_fraction(&res["fig7_surface_half"]);
    let two_thirds = near_zero_fraction(&res["fig7_surface_two_thirds"]);
    let ball = near_zero_fraction(&res["fig7_ball_half"]);
    let parts = [
        (
            half >= 0.25,
            format!("surface half {:.1}% (>= 25%)", 100.0 * half),
        ),
        (
            two_thirds <= 0.10,
            format!("surface 2/3 {:.1}% (<= 10%)", 100.0 * two_thirds),
        ),
        (
            ball <= 0.10,
            format!("ball half {:.1}% (<= 10%)", 100.0 * ball),
        ),
    ];
    let detail: Vec<String> = parts
        .iter()
        .map(|(ok, s)| format!("{}{s}", if *ok { "" } else { "FAILED " }))
        .collect();
    ensure(parts.iter().all(|p| p.0), detail.join(", "))
}

fn gauss_legendre_gain(res: &HashMap<String, ScenarioResult>) -> Check {
    let mut ok = true;
    let mut notes = Vec::new();
    for n in [9, 13] {
        let u = res[&format!("fig6_uniform_{n}")].dof.shannon_count;
        let g = res[&format!("fig6_gauss_legendre_{n}")].dof.shannon_count;
        ok &= g > u;
        notes.push(format!("n={n}: gauss-legendre {g} vs uniform {u}"));
    }
    ensure(ok, notes.join("; "))
}

fn pattern_orthogonality(res: &HashMap<String, ScenarioResult>) -> Check {
    let mut worst: f64 = 0.0;
    for name in ["fig8_spacetime", "fig9_correlation"] {
        let p = res[name].patterns.as_ref().ok_or("patterns missing")?;
        if p.n_modes() < 6 {
            return Err(format!("{name}: only {} patterns", p.n_modes()));
        }
        for i in 0..6 {
            for k in 0..6 {
                if i != k {
                    worst = worst.max(p.inner(i, k).abs());
                }
            }
        }
    }
    ensure(
        worst <= 1e-8,
        format!("max weighted Gram off-diagonal {worst:.2e}"),
    )
}

fn rank_bound_harness() -> Check {
    let start = Instant::now();
    let cfg = HarnessConfig::default();
    let pairs = [(0.1, 0.1), (0.3, 0.1), (0.1, 0.3)];
    let trials = run_rank_bound_trials(&cfg, &pairs, 100, 20_240_601).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    let bound_failures = trials
        .iter()
        .flat_map(|t| &t.reports)
        .filter(|r| !r.rank_bound.holds)
        .count();
    let norm_failures = trials.iter().filter(|t| !t.norm_bound.holds).count();
    let worst_ratio = trials
        .iter()
        .map(|t| t.norm_bound.max_ratio)
        .fold(0.0, f64::max);
    let slack = trials
        .iter()
        .flat_map(|t| &t.reports)
        .map(|r| r.rank_bound.achieved_error / r.rank_bound.delta)
        .fold(0.0, f64::max);
    ensure(
        bound_failures == 0 && norm_failures == 0 && elapsed <= 300.0,
        format!(
            "{} trials x {} pairs: {bound_failures} bound failures (max error/bound {slack:.3}), \
             {norm_failures} norm failures (max ratio {worst_ratio:.4}), {elapsed:.1} s",
            trials.len(),
            pairs.len()
        ),
    )
}

fn run(id: &str, what: &str, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into()))
    });
    let secs = start.elapsed().as_secs_f64();
    let (tag, detail) = match &outcome {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!("[{tag}] {id:>2} {what}: {detail} [{secs:.2} s]");
    outcome.is_ok()
}

fn main() -> ExitCode {
    let mut passed = Vec::new();
    passed.push(run("1", "trace identities", trace_identities));
    passed.push(run("2", "kernel oracle equivalence", kernel_oracles));
    passed.push(run(
        "3",
        "thin shell converges to surface kernel",
        shell_to_surface,
    ));

    let start = Instant::now();
    let configs: Vec<_> = builtin_names()
        .flat_map(|n| builtin_configs(n).expect("builtin parses"))
        .collect();
    let outcomes = run_sweep(&configs, None, false);
    let sweep_secs = start.elapsed().as_secs_f64();
    let failures: Vec<String> = configs
        .iter()
        .zip(&outcomes)
        .filter_map(|(c, r)| r.as_ref().err().map(|e| format!("{}: {e}", c.name)))
        .collect();
    let results: HashMap<String, ScenarioResult> = outcomes
        .into_iter()
        .flatten()
        .map(|r| (r.name().to_string(), r))
        .collect();

    passed.push(run("4", "time concentration cut-off", || {
        time_concentration(&results)
    }));
    passed.push(run("5", "surface spectrum vs thin shell", || {
        surface_vs_thin_shell(&results)
    }));
    passed.push(run("6", "DoF grows with slab height", || {
        height_gain(&results)
    }));
    passed.push(run("7", "near-zero eigenvalues vs spacing", || {
        spacing_near_zero(&results)
    }));
    passed.push(run("8", "Gauss-Legendre vs uniform sampling", || {
        gauss_legendre_gain(&results)
    }));
    passed.push(run("9", "space-time pattern orthogonality", || {
        pattern_orthogonality(&results)
    }));
    passed.push(run("10", "channel rank bound harness", rank_bound_harness));
    passed.push(run("11", "builtin sweep", || {
        ensure(
            failures.is_empty() && sweep_secs <= 1800.0,
            format!(
                "{} scenarios, {} failed{}, {sweep_secs:.1} s",
                configs.len(),
                failures.len(),
                if failures.is_empty() {
                    String::new()
                } else {
                    format!(" ({})", failures.join("; "))
                }
            ),
        )
    }));

    let n_pass = passed.iter().filter(|&&p| p).count();
    println!("acceptance: {n_pass}/{} criteria passed", passed.len());
    if n_pass == passed.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
