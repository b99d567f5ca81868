use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use nleq_core::harness::{run_cascade, run_comparison, run_grid, Render, SolverSpec, StartPoint};
use nleq_core::lsq::LsqOptions;
use nleq_core::minimize::{MinMethod, MinimizeOptions};
use nleq_core::problems::{lookup, simple2_problem, Problem};
use nleq_core::rootfind::{solve_root, Global, Method, RootOptions};
use nleq_core::spectral::SpectralOptions;

const TRAP: f64 = 0.1833616547;

fn dgv() -> (Problem, StartPoint) {
    let p = lookup("dgv-full:0121a").unwrap();
    let s = StartPoint::resolve(&p, "x0").unwrap();
    (p, s)
}

/// Wraps a problem so every evaluation records the largest |x_i| seen.
fn recording(base: Problem, seen: Arc<AtomicU64>) -> Problem {
    let n = base.n_params();
    Problem::new(base.name().to_string(), n, base.n_residuals(), move |x, _| {
        let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        seen.fetch_max(m.to_bits(), Ordering::Relaxed);
        base.residual(x)
    })
}

#[test]
fn grid_has_one_row_per_pair_in_request_order() {
    let (p, s) = dgv();
    let globals = [Global::Hook, Global::Qline, Global::None];
    let g = run_grid(&p, &s, &[Method::Broyden, Method::Newton], &globals, &RootOptions::default(), false)
        .unwrap();
    let order: Vec<(Method, Global)> = g.rows.iter().map(|r| (r.method, r.global)).collect();
    let expected: Vec<(Method, Global)> = [Method::Broyden, Method::Newton]
        .iter()
        .flat_map(|&m| globals.iter().map(move |&gl| (m, gl)))
        .collect();
    assert_eq!(order, expected);
}

#[test]
fn grids_are_deterministic() {
    let (p, s) = dgv();
    let a = run_grid(&p, &s, &Method::ALL, &Global::ALL, &RootOptions::default(), false).unwrap();
    let b = run_grid(&p, &s, &Method::ALL, &Global::ALL, &RootOptions::default(), false).unwrap();
    assert!(a.same_results(&b));
}

#[test]
fn failing_cells_do_not_disturb_others() {
    let p = simple2_problem();
    let s = StartPoint::resolve(&p, "xbeyond").unwrap();
    let opts = RootOptions::default();
    let baseline = run_grid(&p, &s, &Method::ALL, &Global::ALL, &opts, false).unwrap();

    // Largest |x_i| each cell visits.
    let mut reach = Vec::new();
    for m in Method::ALL {
        for g in Global::ALL {
            let seen = Arc::new(AtomicU64::new(0));
            let rp = recording(simple2_problem(), seen.clone());
            let _ = solve_root(&rp, &s.x, &RootOptions::new(m, g));
            reach.push(f64::from_bits(seen.load(Ordering::Relaxed)));
        }
    }
    let lo = reach.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = reach.iter().copied().fold(0.0, f64::max);
    assert!(hi > lo, "every cell visits the same region");
    let limit = 0.5 * (lo + hi);

    let base = simple2_problem();
    let faulty = Problem::new("simple2", 2, 2, move |x, _| {
        if x.iter().any(|v| v.abs() > limit) {
            panic!("injected failure");
        }
        base.residual(x)
    });
    for parallel in [false, true] {
        let g = run_grid(&faulty, &s, &Method::ALL, &Global::ALL, &opts, parallel).unwrap();
        let mut failed = 0;
        for ((row, base_row), r) in g.rows.iter().zip(&baseline.rows).zip(&reach) {
            if *r <= limit {
                assert!(row.same_result(base_row), "{}/{} changed", row.method, row.global);
            } else {
                assert_eq!(row.termcd, -1);
                assert!(row.error.as_deref().unwrap().contains("injected failure"));
                failed += 1;
            }
        }
        assert!(failed >= 1);
    }
}

#[test]
fn cascade_finds_newton_qline_first() {
    let (p, s) = dgv();
    let globals = [
        Global::Qline,
        Global::Cline,
        Global::Gline,
        Global::Pwldog,
        Global::Dbldog,
        Global::Hook,
        Global::None,
    ];
    let c = run_cascade(&p, &s, &[Method::Newton, Method::Broyden], &globals, &RootOptions::default()).unwrap();
    assert_eq!(c.winner, Some((Method::Newton, Global::Qline)));
    assert_eq!(c.trace.len(), 1);
    assert!(c.sumsq().unwrap() <= 1e-20);
}

#[test]
fn reordered_cascade_skips_failing_pairs() {
    let (p, s) = dgv();
    let c = run_cascade(
        &p,
        &s,
        &[Method::Broyden, Method::Newton],
        &[Global::Pwldog, Global::Hook, Global::Qline],
        &RootOptions::default(),
    )
    .unwrap();
    assert!(c.trace.len() > 1);
    assert!(c.winner.is_some());
    assert!(c.sumsq().unwrap() <= 1e-16);
    assert_eq!(c.trace.last().unwrap().termcd, 1);
    assert!(c.trace[..c.trace.len() - 1].iter().all(|a| a.termcd != 1));
}

#[test]
fn simple2_comparison_clusters_at_root_or_trap() {
    let p = simple2_problem();
    let solvers = vec![
        SolverSpec::root(RootOptions::new(Method::Newton, Global::Cline)),
        SolverSpec::root(RootOptions::new(Method::Newton, Global::Dbldog)),
        SolverSpec::root(RootOptions::new(Method::Broyden, Global::Hook)),
        SolverSpec::spectral(SpectralOptions::default()),
        SolverSpec::lsq(LsqOptions::default()),
    ];
    let t = run_comparison(std::slice::from_ref(&p), &[], &solvers, 10).unwrap();
    assert_eq!(t.rows.len(), solvers.len() * p.starts().len());
    assert!(t.rows.iter().any(|r| (r.sumsq - TRAP).abs() <= 1e-6));
    for r in t.rows.iter().filter(|r| r.converged) {
        assert!(r.sumsq <= 1e-13 || (r.sumsq - TRAP).abs() <= 1e-6, "{} {}: {}", r.solver, r.start, r.sumsq);
    }
    assert_eq!(t.timing.len(), t.rows.len());
    for tm in &t.timing {
        assert_eq!(tm.reps, 10);
        assert!(tm.min_us <= tm.mean_us && tm.mean_us <= tm.max_us);
    }
}

#[test]
fn minimizer_rows_use_unscaled_residuals() {
    let p = lookup("dgv-reduced:0121a").unwrap();
    let spec = SolverSpec::minimizer(
        MinimizeOptions::new(MinMethod::NelderMead),
        Some(vec![1e8, 1e8, 1e3, 1e3, 1.0, 1.0]),
    );
    let t = run_comparison(std::slice::from_ref(&p), &["x0".into()], &[spec], 0).unwrap();
    let row = &t.rows[0];
    assert_eq!(row.solver, "neldermead+rscale");
    assert_eq!(row.sumsq, p.sum_squares(&row.x).unwrap());
}

#[test]
fn inline_start_vectors() {
    let p = simple2_problem();
    let t = run_comparison(
        std::slice::from_ref(&p),
        &["1.2,0.9".into()],
        &[SolverSpec::root(RootOptions::new(Method::Newton, Global::Qline))],
        0,
    )
    .unwrap();
    assert_eq!(t.rows[0].start, "1.2,0.9");
    assert!(t.rows[0].sumsq <= 1e-13);
}

#[test]
fn renderings_share_columns() {
    let p = simple2_problem();
    let t = run_comparison(
        std::slice::from_ref(&p),
        &[],
        &[SolverSpec::lsq(LsqOptions::default())],
        2,
    )
    .unwrap();
    let text = t.to_text();
    let csv = t.to_csv().unwrap();
    let text_head: Vec<&str> = text.lines().next().unwrap().split_whitespace().collect();
    assert_eq!(csv.lines().next().unwrap().split(',').collect::<Vec<_>>(), text_head);
    assert!(text.contains("Timing (microseconds)"));
    let json: serde_json::Value = serde_json::from_str(&t.to_json().unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 3);
    assert_eq!(json["timing"].as_array().unwrap().len(), 3);
}
