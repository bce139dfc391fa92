use dkdv_core::{make_grid, GridRef, Lp, RealField};
use proptest::prelude::*;

fn grid() -> GridRef {
    make_grid(256, 64.0).unwrap()
}

/// Sums of Gaussians well inside the box, resolved far below roundoff.
fn bumps(min_width: f64, signed: bool) -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    let amp = if signed { -2.0..2.0 } else { 0.1..2.0 };
    prop::collection::vec((amp, -8.0..8.0f64, min_width..3.0f64), 1..5)
}

fn field(g: &GridRef, b: &[(f64, f64, f64)]) -> RealField {
    RealField::from_fn(g.clone(), |x| {
        b.iter().map(|&(a, c, w)| a * (-((x - c) / w).powi(2)).exp()).sum()
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip(values in prop::collection::vec(-1e3..1e3f64, 256)) {
        let f = RealField::new(grid(), values).unwrap();
        let back = f.to_spectral().to_physical();
        let err = back.sub(&f).unwrap().max_abs();
        prop_assert!(err <= 1e-12 * f.max_abs().max(f64::MIN_POSITIVE), "{err}");
    }

    #[test]
    fn plancherel(b in bumps(1.0, true)) {
        let g = grid();
        let f = field(&g, &b);
        let phys: f64 = f.values().iter().map(|v| v * v).sum::<f64>() * g.dx();
        let spec: f64 = f.to_spectral().coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>()
            * (2.0 * std::f64::consts::PI / g.length()) / (2.0 * std::f64::consts::PI);
        prop_assert!((phys - spec).abs() <= 1e-10 * phys);
    }

    #[test]
    fn hermitian_and_mass(b in bumps(1.0, true)) {
        let f = field(&grid(), &b);
        let s = f.to_spectral();
        prop_assert!(s.hermitian_defect() <= 1e-12 * s.coeffs()[0].norm().max(1.0));
        prop_assert!((s.coeffs()[0].re - f.mass()).abs() <= 1e-12 * f.lp_norm(Lp::One));
    }

    #[test]
    fn interpolation_inequality(b in bumps(1.0, true), k in 1usize..=4, extra in 0usize..=3) {
        let j = (k + extra).min(4);
        let f = field(&grid(), &b);
        prop_assume!(f.decays_within(1e-12));
        let lhs = f.sobolev_norm(Lp::Two, k);
        let kj = k as f64 / j as f64;
        let rhs = f.lp_norm(Lp::Two).powf(1.0 - kj) * f.sobolev_norm(Lp::Two, j).powf(kj);
        prop_assert!(lhs <= (1.0 + 1e-6) * rhs, "{lhs} > {rhs}");
    }

    #[test]
    fn agmon(b in bumps(1.0, true)) {
        let f = field(&grid(), &b);
        prop_assume!(f.decays_within(1e-12));
        let lhs = f.lp_norm(Lp::Inf).powi(2);
        let rhs = f.lp_norm(Lp::Two) * f.sobolev_norm(Lp::Two, 1);
        prop_assert!(lhs <= (1.0 + 1e-6) * rhs, "{lhs} > {rhs}");
    }

    #[test]
    fn moment_ratio_is_dilation_invariant(b in bumps(1.5, false), lambda in 0.7..1.4f64) {
        // ‖f‖₁² / (‖f‖₂ ‖∂_ξ f̂‖₂), with ∂_ξ f̂ the transform of -ix f
        fn ratio(f: &RealField) -> f64 {
            let xf = RealField::new(
                f.grid().clone(),
                f.values().iter().zip(f.grid().xs()).map(|(v, x)| x * v).collect(),
            ).unwrap();
            let dxi = (xf.to_spectral().coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>()
                * 2.0 * std::f64::consts::PI / f.grid().length()).sqrt();
            f.lp_norm(Lp::One).powi(2) / (f.lp_norm(Lp::Two) * dxi)
        }
        let f = field(&grid(), &b);
        let g = f.rescale(lambda).unwrap();
        let (a, c) = (ratio(&f), ratio(&g));
        prop_assert!((a - c).abs() <= 1e-6 * a, "{a} vs {c}");
    }

    #[test]
    fn rescaled_sobolev_norms(b in bumps(1.5, true), lambda in 0.7..1.4f64, j in 0usize..=3) {
        let f = field(&grid(), &b);
        let g = f.rescale(lambda).unwrap();
        let expected = lambda.powf(j as f64 + 0.5) * f.sobolev_norm(Lp::Two, j);
        prop_assert!((g.sobolev_norm(Lp::Two, j) - expected).abs() <= 1e-8 * expected);
    }
}

#[test]
fn interpolation_inequality_fails_for_constants_on_the_torus() {
    // why the property above needs the decay guard
    let f = RealField::from_fn(grid(), |_| 1.0).unwrap();
    assert!(!f.decays_within(1e-12));
    assert!(f.lp_norm(Lp::Inf).powi(2) > f.lp_norm(Lp::Two) * f.sobolev_norm(Lp::Two, 1));
}
