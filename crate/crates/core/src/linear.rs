//! Free evolution and the moment expansions of `S_α(t)∗u₀`.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::{kernel_symbol, KernelKind};
use crate::spectral::{Grid, GridRef, Lp, NormPoint, RealField, SpectralField};

/// Order-`N` expansion data: the moments `M₀..M_N` of the initial field.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionSpec {
    pub order: usize,
    pub alpha: f64,
    pub moments: Vec<f64>,
    /// False when the field was not negligible at the box edge.
    pub decay_ok: bool,
}

impl ExpansionSpec {
    pub fn from_field(u0: &RealField, alpha: f64, order: usize) -> Self {
        let mut decay_ok = true;
        let moments = (0..=order)
            .map(|j| {
                let m = u0.moment(j);
                decay_ok &= m.decay_ok;
                m.value
            })
            .collect();
        ExpansionSpec {
            order,
            alpha,
            moments,
            decay_ok,
        }
    }

    fn check(&self) -> Result<()> {
        if self.moments.len() != self.order + 1 {
            return Err(Error::Parameter(format!(
                "order {} needs {} moments, got {}",
                self.order,
                self.order + 1,
                self.moments.len()
            )));
        }
        Ok(())
    }
}

/// Norms of a remainder along a set of times, with the exponent it should decay at.
#[derive(Debug, Clone, PartialEq)]
pub struct RemainderSeries {
    pub times: Vec<f64>,
    pub norms: Vec<NormPoint>,
    pub predicted_exponent: f64,
    pub p: Lp,
    pub j: usize,
    pub order: usize,
    /// The bound carries a `log t` factor.
    pub log_correction: bool,
    pub warnings: Vec<String>,
}

impl RemainderSeries {
    pub fn values(&self) -> Vec<f64> {
        self.norms.iter().map(|n| n.value).collect()
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn evolve(u0: &RealField, kind: KernelKind, alpha: f64, t: f64) -> Result<RealField> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Time(t));
    }
    if t == 0.0 {
        return Ok(u0.clone());
    }
    let symbol = kernel_symbol(u0.grid(), kind, alpha, t)?;
    Ok(u0.to_spectral().multiply(&symbol).to_physical())
}

/// `S_α(t)∗u₀`.
pub fn linear_solution(u0: &RealField, alpha: f64, t: f64) -> Result<RealField> {
    evolve(u0, KernelKind::Full, alpha, t)
}

/// `G_α(t)∗u₀`.
pub fn heat_solution(u0: &RealField, alpha: f64, t: f64) -> Result<RealField> {
    evolve(u0, KernelKind::Heat, alpha, t)
}

/// Fourier symbol of `Σ_{n≤N} (-1)^n/n! M_n ∂_x^n G_α(t)`, plus the dispersive
/// correction `Σ_{k=1}^N t^k/k! Σ_{ℓ<N} (-1)^ℓ/ℓ! M_ℓ ∂_x^ℓ (-∂_x)^{3k} G_α(t)` when
/// `dispersive` is set.
pub fn expansion_symbol(
    spec: &ExpansionSpec,
    grid: &Grid,
    t: f64,
    dispersive: bool,
) -> Result<Vec<Complex64>> {
    spec.check()?;
    let heat = kernel_symbol(grid, KernelKind::Heat, spec.alpha, t)?;
    let n = grid.n();
    let mut out = vec![Complex64::default(); n];
    let mut add_term = |coef: f64, power: usize, sign: f64| {
        let sym = grid.derivative_symbol(power);
        for i in 0..n {
            out[i] += sym[i] * heat[i] * (coef * sign);
        }
    };
    for (m, &moment) in spec.moments.iter().enumerate() {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        add_term(moment / factorial(m), m, sign);
    }
    if dispersive {
        let order = spec.order;
        for k in 1..=order {
            let tk = t.powi(k as i32) / factorial(k);
            for l in 0..order {
                // (-1)^ℓ from the moment sum, (-1)^{3k} from (-∂_x)^{3k}
                let sign = if (l + 3 * k) % 2 == 0 { 1.0 } else { -1.0 };
                add_term(tk * spec.moments[l] / factorial(l), l + 3 * k, sign);
            }
        }
    }
    Ok(out)
}

fn require_positive_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Time(t));
    }
    Ok(())
}

/// Heat-kernel moment expansion at time `t`.
pub fn heat_expansion(spec: &ExpansionSpec, grid: &GridRef, t: f64) -> Result<RealField> {
    require_positive_time(t)?;
    let sym = expansion_symbol(spec, grid, t, false)?;
    Ok(SpectralField::new(grid.clone(), sym)?.to_physical())
}

/// Full expansion including the dispersive corrections; requires `t ≥ 1`.
pub fn full_expansion(spec: &ExpansionSpec, grid: &GridRef, t: f64) -> Result<RealField> {
    if !(t >= 1.0) || !t.is_finite() {
        return Err(Error::Parameter(format!(
            "the full expansion is asymptotic and needs t >= 1, got {t}"
        )));
    }
    let sym = expansion_symbol(spec, grid, t, true)?;
    Ok(SpectralField::new(grid.clone(), sym)?.to_physical())
}

/// `‖g∗h - Σ_{n≤N} (-1)^n/n! M_n(h) ∂_x^n g‖_{L^p}` on the grid.
pub fn convolution_taylor_remainder(
    g: &RealField,
    h: &RealField,
    order: usize,
    p: Lp,
) -> Result<f64> {
    if **g.grid() != **h.grid() {
        return Err(Error::GridMismatch);
    }
    let gh = g.to_spectral();
    let mut spec = gh.convolve(&h.to_spectral())?;
    for m in 0..=order {
        let moment = h.moment(m).value;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let term = gh.derivative(m);
        let c = sign * moment / factorial(m);
        for (s, t) in spec.coeffs_mut().iter_mut().zip(term.coeffs()) {
            *s -= t * c;
        }
    }
    Ok(spec.to_physical().lp_norm(p))
}

/// `‖S_α(t)∗u₀ - full_expansion(N)‖_{Ḣ^{p,j}}` along `times ⊂ [1, ∞)`.
pub fn remainder_series(
    u0: &RealField,
    alpha: f64,
    times: &[f64],
    order: usize,
    p: Lp,
    j: usize,
) -> Result<RemainderSeries> {
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Parameter("times must be strictly increasing".into()));
    }
    if let Some(&t) = times.iter().find(|&&t| !(t >= 1.0)) {
        return Err(Error::Parameter(format!("remainder times must be >= 1, got {t}")));
    }
    let grid = u0.grid();
    let spec = ExpansionSpec::from_field(u0, alpha, order);
    let mut warnings = Vec::new();
    if !spec.decay_ok {
        warnings.push("initial data not negligible at the box edge; moments unreliable".into());
    }
    let u0_hat = u0.to_spectral();
    let deriv = grid.derivative_symbol(j);
    let mut norms = Vec::with_capacity(times.len());
    for &t in times {
        let flow = kernel_symbol(grid, KernelKind::Full, alpha, t)?;
        let expansion = expansion_symbol(&spec, grid, t, true)?;
        let coeffs: Vec<Complex64> = (0..grid.n())
            .map(|i| (flow[i] * u0_hat.coeffs()[i] - expansion[i]) * deriv[i])
            .collect();
        let value = SpectralField::new(grid.clone(), coeffs)?
            .to_physical()
            .lp_norm(p);
        norms.push(NormPoint { t, p, j, value });
    }
    Ok(RemainderSeries {
        times: times.to_vec(),
        norms,
        predicted_exponent: -p.conjugate_weight() / alpha - j as f64 / alpha - (order + 1) as f64 / alpha,
        p,
        j,
        order,
        log_correction: false,
        warnings,
    })
}

/// `count` log-spaced points covering `[a, b]`.
pub fn log_spaced(a: f64, b: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..count)
        .map(|i| {
            if i + 1 == count {
                b
            } else {
                (la + (lb - la) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::{InitialData, Shape};
    use crate::kernels::{kernel_derivative, sample_g};
    use crate::spectral::make_grid;

    fn grid() -> GridRef {
        make_grid(2048, 160.0).unwrap()
    }

    fn bump(grid: &GridRef) -> RealField {
        InitialData::gaussian(1.0, 0.3, 1.0).sample(grid).unwrap()
    }

    fn max_diff(a: &RealField, b: &RealField) -> f64 {
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn linear_solution_basics() {
        let g = grid();
        let u0 = bump(&g);
        assert_eq!(linear_solution(&u0, 1.5, 0.0).unwrap(), u0);
        for &t in &[0.5, 3.0, 20.0] {
            let u = linear_solution(&u0, 1.5, t).unwrap();
            assert!((u.mass() - u0.mass()).abs() < 1e-12 * u0.mass());
            // Plancherel against the damped spectrum alone
            let diss = g.dissipation_symbol(1.5).unwrap();
            let hat = u0.to_spectral();
            let l2 = (hat
                .coeffs()
                .iter()
                .zip(&diss)
                .map(|(c, a)| c.norm_sqr() * (-2.0 * t * a).exp())
                .sum::<f64>()
                / g.length())
            .sqrt();
            assert!((u.lp_norm(Lp::Two) - l2).abs() < 1e-10);
        }
        assert!(linear_solution(&u0, 1.5, -1.0).is_err());
    }

    #[test]
    fn heat_semigroup_and_monotone_l2() {
        let g = grid();
        let g1 = sample_g(&g, 1.3, 1.0).unwrap();
        let evolved = heat_solution(&g1, 1.3, 2.5).unwrap();
        let direct = sample_g(&g, 1.3, 3.5).unwrap();
        assert!(max_diff(&evolved, &direct) < 1e-9);
        let u0 = bump(&g);
        assert_eq!(heat_solution(&u0, 1.3, 0.0).unwrap(), u0);
        let mut last = f64::INFINITY;
        for &t in &[0.0, 0.1, 1.0, 5.0, 50.0] {
            let n = heat_solution(&u0, 1.3, t).unwrap().lp_norm(Lp::Two);
            assert!(n <= last);
            last = n;
        }
    }

    #[test]
    fn low_order_expansions() {
        let g = grid();
        let u0 = bump(&g);
        let t = 2.0;
        let spec0 = ExpansionSpec::from_field(&u0, 1.5, 0);
        let e0 = heat_expansion(&spec0, &g, t).unwrap();
        let gt = sample_g(&g, 1.5, t).unwrap().scaled(spec0.moments[0]);
        assert!(max_diff(&e0, &gt) < 1e-14);
        assert_eq!(full_expansion(&spec0, &g, t).unwrap(), e0);

        let spec1 = ExpansionSpec::from_field(&u0, 1.5, 1);
        let (m0, m1) = (spec1.moments[0], spec1.moments[1]);
        let d1 = kernel_derivative(&g, KernelKind::Heat, 1.5, t, 1).unwrap();
        let d3 = kernel_derivative(&g, KernelKind::Heat, 1.5, t, 3).unwrap();
        let expected = gt.add_scaled(&d1, -m1).unwrap().add_scaled(&d3, -t * m0).unwrap();
        let e1 = full_expansion(&spec1, &g, t).unwrap();
        assert!(max_diff(&e1, &expected) < 1e-13);
        assert!(full_expansion(&spec1, &g, 0.5).is_err());
    }

    #[test]
    fn even_data_first_moment_vanishes() {
        let g = grid();
        let u0 = InitialData::gaussian(1.0, 0.0, 1.0).sample(&g).unwrap();
        let e0 = heat_expansion(&ExpansionSpec::from_field(&u0, 1.2, 0), &g, 3.0).unwrap();
        let e1 = heat_expansion(&ExpansionSpec::from_field(&u0, 1.2, 1), &g, 3.0).unwrap();
        assert!(max_diff(&e0, &e1) < 1e-12);
    }

    #[test]
    fn zero_mass_remainder_is_the_solution() {
        let g = grid();
        let u0 = InitialData {
            shape: Shape::DGaussian,
            ..InitialData::gaussian(1.0, 0.0, 1.0)
        }
        .sample(&g)
        .unwrap();
        let series = remainder_series(&u0, 1.5, &[1.0, 4.0], 0, Lp::Two, 0).unwrap();
        for pt in &series.norms {
            let u = linear_solution(&u0, 1.5, pt.t).unwrap();
            assert!((pt.value - u.lp_norm(Lp::Two)).abs() < 1e-12);
        }
        assert!((series.predicted_exponent + 1.0).abs() < 1e-12);
    }

    #[test]
    fn taylor_remainder_against_direct_bound() {
        let g = make_grid(4096, 200.0).unwrap();
        let kernel = sample_g(&g, 1.5, 2.0).unwrap();
        let h = InitialData::gaussian_with_mass(1.0, 0.05).sample(&g).unwrap();
        // bound ‖g'‖_{L²}·∫|x||h|
        let abs_first: f64 = g.dx()
            * h.values()
                .iter()
                .zip(g.xs())
                .map(|(v, x)| (v * x).abs())
                .sum::<f64>();
        let bound = kernel.sobolev_norm(Lp::Two, 1) * abs_first;
        let r = convolution_taylor_remainder(&kernel, &h, 0, Lp::Two).unwrap();
        assert!(r <= bound * 1.05, "{r} vs {bound}");
        let other = make_grid(64, 10.0).unwrap();
        assert!(convolution_taylor_remainder(&kernel, &RealField::zeros(other), 0, Lp::Two).is_err());
    }

    #[test]
    fn series_rejects_bad_times() {
        let g = grid();
        let u0 = bump(&g);
        assert!(remainder_series(&u0, 1.5, &[0.5, 2.0], 0, Lp::Two, 0).is_err());
        assert!(remainder_series(&u0, 1.5, &[2.0, 2.0], 0, Lp::Two, 0).is_err());
    }

    #[test]
    fn log_spacing() {
        let ts = log_spaced(4.0, 256.0, 16);
        assert_eq!(ts.len(), 16);
        assert_eq!(ts[0], 4.0);
        assert_eq!(ts[15], 256.0);
        assert!(ts.windows(2).all(|w| w[1] > w[0]));
    }
}
