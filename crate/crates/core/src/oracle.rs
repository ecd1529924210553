//! Independent numerical machinery: adaptive Simpson quadrature and bracketing
//! root-finding, plus re-derivations of the closed forms from the averaged
//! limit condition and the moment balance.
//!
//! Nothing here calls the closed-form solvers of `rod` or `block`.

use crate::block::BlockStation;
use crate::error::{GdlError, Result};
use crate::material::{Constitutive, ConstitutiveVariant, MaterialSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-14,
            rel_tol: 1e-12,
            max_depth: 48,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(GdlError::InvalidSpec(
                "quadrature tolerances must be positive".into(),
            ));
        }
        if self.max_depth < 10 {
            return Err(GdlError::InvalidSpec(
                "quadrature max_depth must be at least 10".into(),
            ));
        }
        Ok(())
    }

    /// Same depth, tolerances scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        QuadratureConfig {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            max_depth: self.max_depth,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketConfig {
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
    pub max_iter: u32,
}

impl BracketConfig {
    pub fn new(lo: f64, hi: f64) -> Self {
        BracketConfig {
            lo,
            hi,
            tol: 1e-15,
            max_iter: 300,
        }
    }
}

const INITIAL_PANELS: usize = 8;

struct Simpson<'a, F> {
    f: &'a F,
    tol_floor: f64,
    max_depth: u32,
}

impl<F: Fn(f64) -> f64> Simpson<'_, F> {
    #[allow(clippy::too_many_arguments)]
    fn refine(
        &self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<Quadrature> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (self.f)(lm);
        let frm = (self.f)(rm);
        if !(flm.is_finite() && frm.is_finite()) {
            return Err(GdlError::Convergence(format!(
                "integrand not finite near x = {lm}"
            )));
        }
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        // rounding level of the panel sums themselves
        let noise = 64.0 * f64::EPSILON * (left.abs() + right.abs());
        if diff.abs() <= 15.0 * tol.max(self.tol_floor).max(noise) {
            return Ok(Quadrature {
                value: left + right + diff / 15.0,
                error: diff.abs() / 15.0,
            });
        }
        if depth >= self.max_depth {
            return Err(GdlError::Convergence(format!(
                "adaptive Simpson exceeded depth {} on [{a}, {b}]",
                self.max_depth
            )));
        }
        let l = self.refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?;
        let r = self.refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?;
        Ok(Quadrature {
            value: l.value + r.value,
            error: l.error + r.error,
        })
    }
}

/// Adaptive Simpson estimate of `∫_a^b f` with its error estimate.
pub fn integrate_with_error<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    config: &QuadratureConfig,
) -> Result<Quadrature> {
    config.validate()?;
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
        });
    }
    let h = (b - a) / INITIAL_PANELS as f64;
    let nodes: Vec<f64> = (0..=2 * INITIAL_PANELS)
        .map(|i| {
            if i == 2 * INITIAL_PANELS {
                b
            } else {
                a + 0.5 * h * i as f64
            }
        })
        .collect();
    let vals: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
    if let Some(i) = vals.iter().position(|v| !v.is_finite()) {
        return Err(GdlError::Convergence(format!(
            "integrand not finite at x = {}",
            nodes[i]
        )));
    }
    let panels: Vec<f64> = (0..INITIAL_PANELS)
        .map(|p| {
            let (fa, fm, fb) = (vals[2 * p], vals[2 * p + 1], vals[2 * p + 2]);
            (nodes[2 * p + 2] - nodes[2 * p]) / 6.0 * (fa + 4.0 * fm + fb)
        })
        .collect();
    let coarse: f64 = panels.iter().sum();
    let scale = panels
        .iter()
        .map(|v| v.abs())
        .sum::<f64>()
        .max(coarse.abs());
    let target = config.abs_tol.max(config.rel_tol * scale);
    let s = Simpson {
        f: &f,
        tol_floor: f64::EPSILON * scale / INITIAL_PANELS as f64,
        max_depth: config.max_depth,
    };
    let mut total = Quadrature {
        value: 0.0,
        error: 0.0,
    };
    for (p, &whole) in panels.iter().enumerate() {
        let q = s.refine(
            nodes[2 * p],
            nodes[2 * p + 2],
            vals[2 * p],
            vals[2 * p + 1],
            vals[2 * p + 2],
            whole,
            target / INITIAL_PANELS as f64,
            0,
        )?;
        total.value += q.value;
        total.error += q.error;
    }
    Ok(total)
}

pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    config: &QuadratureConfig,
) -> Result<f64> {
    integrate_with_error(f, a, b, config).map(|q| q.value)
}

/// Integrates over `[a, b]` split at the given interior breakpoints, so that
/// kinks of the integrand fall on panel edges.
pub fn integrate_split<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    config: &QuadratureConfig,
) -> Result<Quadrature> {
    let mut edges = vec![a];
    let mut inner: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&p| p > a && p < b)
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    edges.extend(inner);
    edges.push(b);
    let mut total = Quadrature {
        value: 0.0,
        error: 0.0,
    };
    for w in edges.windows(2) {
        let q = integrate_with_error(&f, w[0], w[1], config)?;
        total.value += q.value;
        total.error += q.error;
    }
    Ok(total)
}

/// Bisection on a sign change of `f` inside the bracket.
pub fn bisect<F: Fn(f64) -> f64>(f: F, config: &BracketConfig) -> Result<f64> {
    if !(config.lo < config.hi) || !(config.tol > 0.0) {
        return Err(GdlError::InvalidSpec(format!(
            "invalid bracket [{}, {}] with tol {}",
            config.lo, config.hi, config.tol
        )));
    }
    let (mut lo, mut hi) = (config.lo, config.hi);
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return Err(GdlError::Convergence(format!(
            "no sign change on [{lo}, {hi}] (f = {flo}, {fhi})"
        )));
    }
    let lo_negative = flo < 0.0;
    for _ in 0..config.max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= config.tol * mid.abs().max(1.0) || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(GdlError::Convergence(format!(
        "bisection did not reach tol {} in {} iterations",
        config.tol, config.max_iter
    )))
}

/// Rod stress recomputed from the averaged limit condition, with the
/// antiderivative of the threshold obtained by quadrature.
pub fn solve_rod_stress(
    spec: &MaterialSpec,
    variant: ConstitutiveVariant,
    d_m: f64,
    config: &QuadratureConfig,
) -> Result<f64> {
    if !(d_m > 0.0 && d_m < 1.0) {
        return Err(GdlError::Domain {
            value: d_m,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let p = spec.rod_params()?;
    let law = Constitutive::resolve(variant, spec)?;
    let h = integrate(|s| law.y_c(s), 0.0, d_m, config)?;
    let compliance = 1.0 / law.omega(d_m) - 1.0;
    Ok((2.0 * p.e * h / compliance).sqrt())
}

/// Dissipated energy per unit length at a point that went from intact to
/// fully damaged, `∫₀¹ Y_c dd`.
pub fn work_of_separation(
    spec: &MaterialSpec,
    variant: ConstitutiveVariant,
    config: &QuadratureConfig,
) -> Result<f64> {
    let law = Constitutive::resolve(variant, spec)?;
    integrate(|d| law.y_c(d), 0.0, 1.0, config)
}

/// Interface damage `clamp((l_m − x)/l_c, 0, 1)` of a station.
fn interface_damage(station: &BlockStation, l_c: f64) -> impl Fn(f64) -> f64 {
    let station = *station;
    move |x| {
        let d = match station {
            BlockStation::Elastic { .. } => 0.0,
            BlockStation::Nucleation { l_m } | BlockStation::Growth { l_m } => (l_m - x) / l_c,
            BlockStation::Propagation { c } => 1.0 - (x - c) / l_c,
        };
        d.clamp(0.0, 1.0)
    }
}

/// Interval over which the limit condition holds with equality.
fn active_interval(station: &BlockStation, length: f64) -> Result<(f64, f64)> {
    match *station {
        BlockStation::Nucleation { l_m } => Ok((0.0, l_m)),
        BlockStation::Growth { .. } => Ok((0.0, length)),
        BlockStation::Propagation { c } => Ok((c, length)),
        BlockStation::Elastic { .. } => Err(GdlError::Phase {
            phase: "inelastic",
            value: 0.0,
            lo: 0.0,
            hi: length,
        }),
    }
}

fn station_zone(station: &BlockStation, l_c: f64) -> f64 {
    match *station {
        BlockStation::Elastic { .. } => 0.0,
        BlockStation::Nucleation { l_m } | BlockStation::Growth { l_m } => l_m,
        BlockStation::Propagation { c } => c + l_c,
    }
}

/// Integrals `(∫Ỹ/α², ∫Ỹ_c)` over the active interval.
fn block_limit_integrals(
    spec: &MaterialSpec,
    station: &BlockStation,
    config: &QuadratureConfig,
) -> Result<(f64, f64)> {
    let p = spec.block_params()?;
    let law = Constitutive::resolve(ConstitutiveVariant::BLOCK, spec)?;
    let (a, b) = active_interval(station, p.length)?;
    let d = interface_damage(station, p.l_c);
    let drive = integrate(
        |x| -law.omega_prime(d(x)) * 0.5 * p.k * (p.length - x).powi(2),
        a,
        b,
        config,
    )?;
    let threshold = integrate(|x| law.y_c(d(x)), a, b, config)?;
    if !(drive > 0.0 && threshold > 0.0) {
        return Err(GdlError::Model(format!(
            "non-positive limit-condition integrals ({drive}, {threshold})"
        )));
    }
    Ok((drive, threshold))
}

/// Block rotation from the averaged limit condition. The driving force is
/// proportional to α², so `α = sqrt(∫Ỹ_c / ∫(Ỹ/α²))`.
pub fn solve_block_alpha(
    spec: &MaterialSpec,
    station: &BlockStation,
    config: &QuadratureConfig,
) -> Result<f64> {
    let (drive, threshold) = block_limit_integrals(spec, station, config)?;
    Ok((threshold / drive).sqrt())
}

/// Same as [`solve_block_alpha`] but by bisection on the residual
/// `α² ∫(Ỹ/α²) − ∫Ỹ_c` within the bracket.
pub fn solve_block_alpha_bisect(
    spec: &MaterialSpec,
    station: &BlockStation,
    quad: &QuadratureConfig,
    bracket: &BracketConfig,
) -> Result<f64> {
    let (drive, threshold) = block_limit_integrals(spec, station, quad)?;
    bisect(|a| a * a * drive - threshold, bracket)
}

/// Reaction force from the moment balance `P L = ∫ ω k α (L − x)² dx`.
pub fn recompute_reaction(
    spec: &MaterialSpec,
    station: &BlockStation,
    alpha: f64,
    config: &QuadratureConfig,
) -> Result<f64> {
    let p = spec.block_params()?;
    let law = Constitutive::resolve(ConstitutiveVariant::BLOCK, spec)?;
    let l_m = station_zone(station, p.l_c);
    let d = interface_damage(station, p.l_c);
    let moment = integrate_split(
        |x| law.omega(d(x)) * p.k * alpha * (p.length - x).powi(2),
        0.0,
        p.length,
        &[l_m - p.l_c, l_m],
        config,
    )?;
    Ok(moment.value / p.length)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cubic_is_exact() {
        let cfg = QuadratureConfig::default();
        let q = integrate_with_error(|x| x * x * x, 0.0, 1.0, &cfg).unwrap();
        assert_eq!(q.value, 0.25);
        assert_relative_eq!(
            integrate(|x| 3.0 * x * x - x + 2.0, -1.0, 2.0, &cfg).unwrap(),
            13.5,
            max_relative = 1e-15
        );
    }

    #[test]
    fn smooth_integrands() {
        let cfg = QuadratureConfig::default();
        assert_relative_eq!(
            integrate(f64::sin, 0.0, std::f64::consts::PI, &cfg).unwrap(),
            2.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            integrate(f64::exp, 0.0, 1.0, &cfg).unwrap(),
            1f64.exp() - 1.0,
            max_relative = 1e-12
        );
        // compliance integral of the quadratic degradation
        assert_relative_eq!(
            integrate(|d| 1.0 / ((1.0 - d) * (1.0 - d)) - 1.0, 0.0, 0.5, &cfg).unwrap(),
            0.5,
            max_relative = 1e-10
        );
    }

    #[test]
    fn kinked_integrand_with_breakpoint() {
        let cfg = QuadratureConfig::default();
        let q = integrate_split(|x: f64| (x - 0.3).abs(), 0.0, 1.0, &[0.3], &cfg).unwrap();
        assert_relative_eq!(q.value, 0.5 * (0.09 + 0.49), max_relative = 1e-14);
    }

    #[test]
    fn depth_limit_is_reported() {
        let cfg = QuadratureConfig {
            abs_tol: 1e-300,
            rel_tol: 1e-300,
            max_depth: 10,
        };
        let r = integrate(|x: f64| x.sqrt(), 0.0, 1.0, &cfg);
        assert!(matches!(r, Err(GdlError::Convergence(_))));
        assert!(QuadratureConfig {
            max_depth: 5,
            ..cfg
        }
        .validate()
        .is_err());
    }

    #[test]
    fn tightening_tolerance_stays_within_error_estimate() {
        let loose = QuadratureConfig::default().scaled(1e3);
        let f = |x: f64| 1.0 / (1.0 + 25.0 * x * x);
        let a = integrate_with_error(f, -1.0, 1.0, &loose).unwrap();
        let b = integrate_with_error(f, -1.0, 1.0, &loose.scaled(0.5)).unwrap();
        assert!((a.value - b.value).abs() <= a.error + b.error + 1e-15);
    }

    #[test]
    fn bisection_finds_roots() {
        let r = bisect(|x| x * x - 2.0, &BracketConfig::new(0.0, 2.0)).unwrap();
        assert_relative_eq!(r, 2f64.sqrt(), max_relative = 1e-14);
        assert!(bisect(|x| x * x + 1.0, &BracketConfig::new(0.0, 2.0)).is_err());
        assert!(bisect(|x| x, &BracketConfig::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn rod_stress_limits() {
        let spec = MaterialSpec::rod_from_groups(0.4, 0.5, 1.0, 1.0, 1.0);
        let cfg = QuadratureConfig::default();
        let s = solve_rod_stress(&spec, ConstitutiveVariant::CASE_II, 0.5, &cfg).unwrap();
        assert_relative_eq!(s, 1.0 / 3f64.sqrt(), max_relative = 1e-12);
        let s = solve_rod_stress(&spec, ConstitutiveVariant::CASE_I, 1e-6, &cfg).unwrap();
        assert_relative_eq!(s, 1.0, max_relative = 1e-5);
        assert!(solve_rod_stress(&spec, ConstitutiveVariant::CASE_I, 0.0, &cfg).is_err());
    }

    #[test]
    fn separation_work_equals_toughness() {
        let spec = MaterialSpec::block_reference(6.0);
        let g = work_of_separation(
            &spec,
            ConstitutiveVariant::BLOCK,
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(g, 0.25, max_relative = 1e-10);
        // a fully developed rod band dissipates G_c
        let rod = MaterialSpec::rod_from_groups(0.4, 0.5, 1.0, 1.0, 1.0);
        let law = Constitutive::resolve(ConstitutiveVariant::CASE_I, &rod).unwrap();
        let band = integrate(
            |d| law.dissipation_potential(d),
            0.0,
            1.0,
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(2.0 * rod.l_c * band, rod.g_c, max_relative = 1e-10);
    }

    #[test]
    fn elastic_reaction() {
        let spec = MaterialSpec::block_reference(6.0);
        let alpha0 = (2.0 * 0.025 / 800.0f64).sqrt() / 2.0;
        let p = recompute_reaction(
            &spec,
            &BlockStation::Elastic { alpha: alpha0 },
            alpha0,
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(p, 40f64.sqrt() * 2.0 / 3.0, max_relative = 1e-12);
    }
}
