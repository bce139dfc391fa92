use dkdv_core::initial::InitialData;
use dkdv_core::oracle::reference_solve;
use dkdv_core::solver::{simulate, SolverConfig, Trajectory};
use dkdv_core::{make_grid, Lp, RealField};
use std::f64::consts::PI;

fn rel_l2(a: &RealField, b: &RealField) -> f64 {
    a.sub(b).unwrap().lp_norm(Lp::Two) / b.lp_norm(Lp::Two)
}

#[test]
fn fourth_order_in_time() {
    let grid = make_grid(128, 64.0).unwrap();
    let u0 = InitialData::gaussian_with_mass(2.0, 2.0).sample(&grid).unwrap();
    let reference = reference_solve(&u0, 1.5, 2.0, vec![2.0]).unwrap();
    let err = |dt: f64| {
        let t = simulate(&u0, &SolverConfig::new(1.5, 2.0, vec![2.0]).with_dt(dt)).unwrap();
        rel_l2(&t.frames[0].field, &reference.frames[0].field)
    };
    let order = (err(0.2) / err(0.1)).log2();
    assert!(order >= 3.5, "observed order {order}");
}

#[test]
fn production_matches_reference() {
    let grid = make_grid(128, 64.0).unwrap();
    let u0 = InitialData::gaussian_with_mass(2.0, 2.0).sample(&grid).unwrap();
    let p = simulate(&u0, &SolverConfig::new(1.5, 10.0, vec![10.0])).unwrap();
    let r = reference_solve(&u0, 1.5, 10.0, vec![10.0]).unwrap();
    assert!(rel_l2(&p.frames[0].field, &r.frames[0].field) < 1e-6);
    assert!((r.frames[0].diagnostics.mass - u0.mass()).abs() < 1e-12 * u0.mass());
}

#[test]
fn refinement_convergence() {
    let coarse = make_grid(512, 128.0).unwrap();
    let fine = make_grid(1024, 128.0).unwrap();
    let data = InitialData::gaussian_with_mass(2.0, 2.0);
    let base = SolverConfig::uniform(1.5, 10.0, 5);
    let a = simulate(&data.sample(&coarse).unwrap(), &base).unwrap();
    let dt = a.dt / 2.0;
    let b = simulate(&data.sample(&fine).unwrap(), &base.clone().with_dt(dt)).unwrap();
    for (fa, fb) in a.frames.iter().zip(&b.frames) {
        let sub: Vec<f64> = fb.field.values().iter().step_by(2).copied().collect();
        let sub = RealField::new(coarse.clone(), sub).unwrap();
        let e = rel_l2(&fa.field, &sub);
        assert!(e < 1e-6, "t={} {e}", fa.t);
    }
}

fn slope(traj: &Trajectory, p: Lp, j: usize) -> f64 {
    let frames: Vec<_> = traj.frames.iter().filter(|f| f.t > 0.0).collect();
    let t: Vec<f64> = frames.iter().map(|f| f.t).collect();
    let v: Vec<f64> = frames.iter().map(|f| f.field.sobolev_norm(p, j)).collect();
    dkdv_core::fit::fit_power_law(&t, &v, (20.0, 200.0), false).unwrap().slope
}

#[test]
fn decay_rate_table() {
    let grid = make_grid(8192, 512.0 * PI).unwrap();
    let u0 = InitialData::gaussian_with_mass(2.0, 1.0).sample(&grid).unwrap();
    for alpha in [1.25, 1.5] {
        let traj = simulate(&u0, &SolverConfig::uniform(alpha, 200.0, 200)).unwrap();
        for (p, j) in [(Lp::Two, 0usize), (Lp::Inf, 0), (Lp::Two, 1)] {
            let predicted = -p.conjugate_weight() / alpha - j as f64 / alpha;
            let s = slope(&traj, p, j);
            assert!((s - predicted).abs() <= 0.1, "alpha={alpha} p={p} j={j}: {s} vs {predicted}");
        }
    }
}
