//! Rigid block peeled from a damageable interface (mode I).
//!
//! The block rotates by a small angle `α` about its far corner; the opening
//! at `x` is `α (L − x)`. Damage on the interface is
//! `d(x) = clamp((l_m − x)/l_c, 0, 1)`, driven by the process-zone size `l_m`.
//! Past `l_m = l_c` a fully damaged segment of length `c = l_m − l_c`
//! trails the zone.

use serde::Serialize;

use crate::error::{GdlError, Result};
use crate::exec::Strategy;
use crate::material::{BlockParams, Constitutive, ConstitutiveVariant, MaterialSpec};
use crate::oracle::{integrate, QuadratureConfig};
use crate::profile::{grid, FieldKind, FieldProfile};

/// Fraction of the width the crack may reach before a curve stops.
pub const CRACK_STOP: f64 = 1.0 - 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BlockPhase {
    Elastic,
    Nucleation,
    Growth,
    Propagation,
}

impl BlockPhase {
    pub fn label(self) -> &'static str {
        match self {
            BlockPhase::Elastic => "elastic",
            BlockPhase::Nucleation => "nucleation",
            BlockPhase::Growth => "growth",
            BlockPhase::Propagation => "propagation",
        }
    }
}

/// Driving variable of a point on the equilibrium path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BlockStation {
    Elastic { alpha: f64 },
    Nucleation { l_m: f64 },
    Growth { l_m: f64 },
    Propagation { c: f64 },
}

impl BlockStation {
    pub fn phase(&self) -> BlockPhase {
        match self {
            BlockStation::Elastic { .. } => BlockPhase::Elastic,
            BlockStation::Nucleation { .. } => BlockPhase::Nucleation,
            BlockStation::Growth { .. } => BlockPhase::Growth,
            BlockStation::Propagation { .. } => BlockPhase::Propagation,
        }
    }

    /// Station for a process-zone size, `l_m = 0` being the elastic limit.
    pub fn from_zone(l_m: f64, p: &BlockParams) -> Result<Self> {
        if !(l_m.is_finite() && l_m >= 0.0) {
            return Err(GdlError::Phase {
                phase: "any",
                value: l_m,
                lo: 0.0,
                hi: p.length + p.l_c,
            });
        }
        Ok(if l_m <= p.length {
            BlockStation::Nucleation { l_m }
        } else if l_m <= p.l_c {
            BlockStation::Growth { l_m }
        } else {
            BlockStation::Propagation { c: l_m - p.l_c }
        })
    }

    pub fn zone(&self, l_c: f64) -> f64 {
        match *self {
            BlockStation::Elastic { .. } => 0.0,
            BlockStation::Nucleation { l_m } | BlockStation::Growth { l_m } => l_m,
            BlockStation::Propagation { c } => c + l_c,
        }
    }

    /// The driving variable itself: α, l_m or c.
    pub fn driver(&self) -> f64 {
        match *self {
            BlockStation::Elastic { alpha } => alpha,
            BlockStation::Nucleation { l_m } | BlockStation::Growth { l_m } => l_m,
            BlockStation::Propagation { c } => c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockState {
    pub phase: BlockPhase,
    pub station: BlockStation,
    pub l_m: f64,
    pub c: f64,
    pub d_m: f64,
    pub alpha: f64,
    pub delta: f64,
    pub p: f64,
}

impl BlockState {
    /// Portion of the process zone inside the block.
    pub fn active_zone(&self, length: f64) -> f64 {
        self.l_m.min(length)
    }

    /// Interval where the gradient bound binds and the limit condition holds
    /// on average; `None` in the elastic phase.
    pub fn active_interval(&self, length: f64) -> Option<(f64, f64)> {
        match self.phase {
            BlockPhase::Elastic => None,
            BlockPhase::Nucleation => Some((0.0, self.l_m)),
            BlockPhase::Growth => Some((0.0, length)),
            BlockPhase::Propagation => Some((self.c, length)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElasticLimits {
    pub delta_0: f64,
    pub alpha_0: f64,
    pub p_0: f64,
}

/// Which closed form to use for the rotation in the propagation phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub enum Phase4Form {
    /// `α₀/(L − c) · sqrt(…)`, continuous with the growth phase.
    #[default]
    Corrected,
    /// `α₀/(L − c)² · sqrt(…)` as commonly quoted.
    Printed,
}

#[derive(Debug, Clone, Copy)]
pub struct Block {
    pub params: BlockParams,
    pub law: Constitutive,
}

impl Block {
    /// Requires `l_c ≥ L`; shorter length scales lead to several disjoint
    /// active sets not covered by the closed forms.
    pub fn new(spec: &MaterialSpec) -> Result<Self> {
        let params = spec.block_params()?;
        if params.l_c < params.length {
            return Err(GdlError::UnsupportedRegime(format!(
                "l_c = {} is smaller than the block width L = {}",
                params.l_c, params.length
            )));
        }
        Ok(Block {
            params,
            law: Constitutive::resolve(ConstitutiveVariant::BLOCK, spec)?,
        })
    }

    pub fn phase1_limits(&self) -> ElasticLimits {
        let p = &self.params;
        let delta_0 = (2.0 * p.g_0 / p.k).sqrt();
        ElasticLimits {
            delta_0,
            alpha_0: delta_0 / p.length,
            p_0: (2.0 * p.g_0 * p.k).sqrt() * p.length / 3.0,
        }
    }

    fn alpha_0(&self) -> f64 {
        self.phase1_limits().alpha_0
    }

    fn phase_error(phase: &'static str, value: f64, lo: f64, hi: f64) -> GdlError {
        GdlError::Phase {
            phase,
            value,
            lo,
            hi,
        }
    }

    /// Rotation while the zone grows inside the block, `0 ≤ l_m ≤ L`. At
    /// `l_m = 0` the expression reduces to `α₀`.
    pub fn phase2_alpha(&self, l_m: f64) -> Result<f64> {
        let BlockParams {
            length: l,
            l_c,
            g_c,
            g_0,
            ..
        } = self.params;
        if !(0.0..=l).contains(&l_m) {
            return Err(Self::phase_error("nucleation", l_m, 0.0, l));
        }
        let a1 = l_m.powi(3) / 6.0 - 2.0 / 3.0 * (l_c + l) * l_m * l_m + (l + 2.0 * l_c) * l * l_m
            - 2.0 * l * l * l_c;
        let a2 = (g_0 - g_c) * (l_m * l_m - 2.0 * l_c * l_m) - g_c * l_c * l_c;
        Ok(self.alpha_0() * (g_c * l_c * l_c * l * l * (2.0 * l_c - l_m) / (a1 * a2)).sqrt())
    }

    pub fn phase2_reaction(&self, l_m: f64, alpha: f64) -> Result<f64> {
        let BlockParams {
            length: l, l_c, k, ..
        } = self.params;
        if !(0.0..=l).contains(&l_m) {
            return Err(Self::phase_error("nucleation", l_m, 0.0, l));
        }
        let bracket = l.powi(3) * l_c * l_c + (l_m - 3.0 * l_c) * l_m * l_m * l * l
            - (l_m - 4.0 * l_c) * l_m.powi(3) * l / 2.0
            + (l_m - 5.0 * l_c) * l_m.powi(4) / 10.0;
        Ok(bracket * k * alpha / (3.0 * l_c * l_c * l))
    }

    /// Rotation once the zone spans the block, `L ≤ l_m ≤ l_c`.
    pub fn phase3_alpha(&self, l_m: f64) -> Result<f64> {
        let BlockParams {
            length: l,
            l_c,
            g_c,
            g_0,
            ..
        } = self.params;
        if !(l..=l_c).contains(&l_m) {
            return Err(Self::phase_error("growth", l_m, l, l_c));
        }
        let b1 = l + 4.0 * l_c - 4.0 * l_m;
        let b2 = (l_c - l_m).powi(2) * g_c - l_m * (l_m - 2.0 * l_c) * g_0;
        let b3 = (l - l_m + l_c).powi(2) * g_c - (l - l_m) * (l - l_m + 2.0 * l_c) * g_0;
        Ok(self.alpha_0()
            * (6.0 * g_c * g_c * l_c.powi(4) * (l + 2.0 * l_c - 2.0 * l_m) / (b1 * b2 * b3)).sqrt())
    }

    pub fn phase3_reaction(&self, l_m: f64, alpha: f64) -> Result<f64> {
        let BlockParams {
            length: l, l_c, k, ..
        } = self.params;
        if !(l..=l_c).contains(&l_m) {
            return Err(Self::phase_error("growth", l_m, l, l_c));
        }
        let bracket = 10.0 * l_c * l_c + (5.0 * l - 20.0 * l_m) * l_c + l * l - 5.0 * l * l_m
            + 10.0 * l_m * l_m;
        Ok(k * l * l / (30.0 * l_c * l_c) * bracket * alpha)
    }

    fn check_crack(&self, c: f64) -> Result<()> {
        let l = self.params.length;
        if c >= l {
            return Err(GdlError::Collapse { c, length: l });
        }
        if !(c >= 0.0) {
            return Err(Self::phase_error("propagation", c, 0.0, l));
        }
        Ok(())
    }

    pub fn phase4_alpha(&self, c: f64) -> Result<f64> {
        self.phase4_alpha_with(c, Phase4Form::Corrected)
    }

    /// Rotation with a fully damaged segment `[0, c]`, `0 ≤ c < L`.
    pub fn phase4_alpha_with(&self, c: f64, form: Phase4Form) -> Result<f64> {
        self.check_crack(c)?;
        let BlockParams {
            length: l,
            l_c,
            g_c,
            g_0,
            ..
        } = self.params;
        let h = l - c;
        let root = (6.0 * g_c * g_c * l_c * l_c * l * l
            / (g_0 * (g_c * h * h - g_0 * (h * h - l_c * l_c))))
            .sqrt();
        let power = match form {
            Phase4Form::Corrected => 1,
            Phase4Form::Printed => 2,
        };
        Ok(self.alpha_0() / h.powi(power) * root)
    }

    pub fn phase4_reaction(&self, c: f64, alpha: f64) -> Result<f64> {
        self.check_crack(c)?;
        let BlockParams {
            length: l, l_c, k, ..
        } = self.params;
        Ok(k * (l - c).powi(5) / (30.0 * l_c * l_c * l) * alpha)
    }

    pub fn alpha(&self, station: &BlockStation) -> Result<f64> {
        match *station {
            BlockStation::Elastic { alpha } => {
                let a0 = self.alpha_0();
                if !(0.0..=a0).contains(&alpha) {
                    return Err(Self::phase_error("elastic", alpha, 0.0, a0));
                }
                Ok(alpha)
            }
            BlockStation::Nucleation { l_m } => self.phase2_alpha(l_m),
            BlockStation::Growth { l_m } => self.phase3_alpha(l_m),
            BlockStation::Propagation { c } => self.phase4_alpha(c),
        }
    }

    pub fn reaction(&self, station: &BlockStation, alpha: f64) -> Result<f64> {
        let l = self.params.length;
        match *station {
            BlockStation::Elastic { .. } => Ok(self.params.k * alpha * l * l / 3.0),
            BlockStation::Nucleation { l_m } => self.phase2_reaction(l_m, alpha),
            BlockStation::Growth { l_m } => self.phase3_reaction(l_m, alpha),
            BlockStation::Propagation { c } => self.phase4_reaction(c, alpha),
        }
    }

    pub fn state(&self, station: BlockStation) -> Result<BlockState> {
        let alpha = self.alpha(&station)?;
        let p = self.reaction(&station, alpha)?;
        let l_c = self.params.l_c;
        let l_m = station.zone(l_c);
        Ok(BlockState {
            phase: station.phase(),
            station,
            l_m,
            c: match station {
                BlockStation::Propagation { c } => c,
                _ => 0.0,
            },
            d_m: (l_m / l_c).min(1.0),
            alpha,
            delta: alpha * self.params.length,
            p,
        })
    }

    /// State for a process-zone size `l_m ≥ 0`.
    pub fn state_at_zone(&self, l_m: f64) -> Result<BlockState> {
        self.state(BlockStation::from_zone(l_m, &self.params)?)
    }

    pub fn damage_at(&self, state: &BlockState, x: f64) -> f64 {
        let d = match state.phase {
            BlockPhase::Propagation => 1.0 - (x - state.c) / self.params.l_c,
            _ => (state.l_m - x) / self.params.l_c,
        };
        d.clamp(0.0, 1.0)
    }

    pub fn traction_at(&self, state: &BlockState, x: f64) -> f64 {
        self.law.omega(self.damage_at(state, x))
            * self.params.k
            * state.alpha
            * (self.params.length - x)
    }

    /// `Ỹ = −ω'(d) k α² (L − x)² / 2`.
    pub fn driving_force_at(&self, state: &BlockState, x: f64) -> f64 {
        let opening = state.alpha * (self.params.length - x);
        -self.law.omega_prime(self.damage_at(state, x)) * 0.5 * self.params.k * opening * opening
    }

    pub fn threshold_at(&self, state: &BlockState, x: f64) -> f64 {
        self.law.y_c(self.damage_at(state, x))
    }

    /// Shared x-grid on `[0, L]` containing `c` and the active zone end.
    pub fn profile_grid(&self, state: &BlockState, n_samples: usize) -> Vec<f64> {
        let l = self.params.length;
        grid(0.0, l, n_samples, &[state.c, state.active_zone(l)])
    }

    fn sampled(
        &self,
        kind: FieldKind,
        state: &BlockState,
        n: usize,
        f: impl Fn(f64) -> f64,
    ) -> FieldProfile {
        FieldProfile::from_fn(kind, state.station.driver(), self.profile_grid(state, n), f)
    }

    pub fn damage_profile(&self, state: &BlockState, n_samples: usize) -> FieldProfile {
        self.sampled(FieldKind::Damage, state, n_samples, |x| {
            self.damage_at(state, x)
        })
    }

    pub fn traction_profile(&self, state: &BlockState, n_samples: usize) -> FieldProfile {
        self.sampled(FieldKind::Traction, state, n_samples, |x| {
            self.traction_at(state, x)
        })
    }

    pub fn driving_force_profile(&self, state: &BlockState, n_samples: usize) -> FieldProfile {
        self.sampled(FieldKind::DrivingForce, state, n_samples, |x| {
            self.driving_force_at(state, x)
        })
    }

    pub fn threshold_profile(&self, state: &BlockState, n_samples: usize) -> FieldProfile {
        self.sampled(FieldKind::Threshold, state, n_samples, |x| {
            self.threshold_at(state, x)
        })
    }

    /// Multiplier of the gradient bound by cumulative quadrature of
    /// `Ỹ − Ỹ_c` from the start of the active set. Returns the profile and
    /// the value reached at the far end of the active set, which vanishes
    /// for a consistent rotation.
    pub fn gamma2_with_residual(
        &self,
        state: &BlockState,
        n_samples: usize,
        config: &QuadratureConfig,
    ) -> Result<(FieldProfile, f64)> {
        let x = self.profile_grid(state, n_samples);
        let Some((a, b)) = state.active_interval(self.params.length) else {
            let values = vec![0.0; x.len()];
            return Ok((
                FieldProfile {
                    kind: FieldKind::Gamma2,
                    parameter: state.station.driver(),
                    x,
                    values,
                },
                0.0,
            ));
        };
        let rate = |s: f64| self.driving_force_at(state, s) - self.threshold_at(state, s);
        let mut values = Vec::with_capacity(x.len());
        let mut acc = 0.0;
        let mut prev = a;
        let mut residual = 0.0;
        for &xi in &x {
            if xi <= a || xi > b {
                values.push(0.0);
                continue;
            }
            acc += integrate(rate, prev, xi, config)?;
            prev = xi;
            if xi == b {
                residual = acc;
                values.push(0.0);
            } else {
                values.push(acc);
            }
        }
        Ok((
            FieldProfile {
                kind: FieldKind::Gamma2,
                parameter: state.station.driver(),
                x,
                values,
            },
            residual,
        ))
    }

    /// Multiplier profile; fails if the end residual exceeds `1e-8` of the
    /// profile maximum.
    pub fn gamma2_profile(&self, state: &BlockState, n_samples: usize) -> Result<FieldProfile> {
        let (profile, residual) =
            self.gamma2_with_residual(state, n_samples, &QuadratureConfig::default())?;
        let limit = 1e-8 * profile.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if residual.abs() > limit {
            return Err(GdlError::Inconsistency { residual, limit });
        }
        Ok(profile)
    }

    /// Stations of the four branches: the elastic limit, then `n` points in
    /// each of the three inelastic phases. Junction stations appear twice.
    pub fn curve_stations(&self, n_points_per_phase: usize) -> Result<Vec<BlockStation>> {
        let BlockParams { length: l, l_c, .. } = self.params;
        if l_c <= l {
            return Err(GdlError::UnsupportedRegime(format!(
                "equilibrium curve needs l_c > L (l_c = {l_c}, L = {l})"
            )));
        }
        let n = n_points_per_phase;
        if n < 2 {
            return Err(GdlError::InvalidSpec("at least 2 points per phase".into()));
        }
        let t = |i: usize| i as f64 / (n - 1) as f64;
        let mut out = vec![BlockStation::Elastic {
            alpha: self.alpha_0(),
        }];
        out.extend((0..n).map(|i| BlockStation::Nucleation {
            l_m: if i == n - 1 { l } else { l * t(i) },
        }));
        out.extend((0..n).map(|i| BlockStation::Growth {
            l_m: if i == n - 1 {
                l_c
            } else {
                l + (l_c - l) * t(i)
            },
        }));
        out.extend((0..n).map(|i| BlockStation::Propagation {
            c: l * CRACK_STOP * t(i),
        }));
        Ok(out)
    }

    pub fn equilibrium_curve(
        &self,
        n_points_per_phase: usize,
        strategy: Strategy,
    ) -> Result<Vec<BlockState>> {
        let stations = self.curve_stations(n_points_per_phase)?;
        strategy.try_map(stations.len(), |i| self.state(stations[i]))
    }
}

pub fn phase1_limits(spec: &MaterialSpec) -> Result<ElasticLimits> {
    Ok(Block::new(spec)?.phase1_limits())
}

pub fn equilibrium_curve_block(
    spec: &MaterialSpec,
    n_points_per_phase: usize,
) -> Result<Vec<BlockState>> {
    Block::new(spec)?.equilibrium_curve(n_points_per_phase, Strategy::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference() -> Block {
        Block::new(&MaterialSpec::block_reference(6.0)).unwrap()
    }

    #[test]
    fn elastic_limits_scale() {
        let b = reference();
        let e = b.phase1_limits();
        assert_relative_eq!(e.delta_0, (0.05f64 / 800.0).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(e.p_0, 40f64.sqrt() * 2.0 / 3.0, max_relative = 1e-15);
        let mut spec = MaterialSpec::block_reference(6.0);
        spec.k = Some(3200.0);
        let stiff = Block::new(&spec).unwrap().phase1_limits();
        assert_relative_eq!(stiff.delta_0, 0.5 * e.delta_0, max_relative = 1e-15);
    }

    #[test]
    fn phase_two_limits() {
        let b = reference();
        let a0 = b.phase1_limits().alpha_0;
        assert_relative_eq!(b.phase2_alpha(0.0).unwrap(), a0, max_relative = 1e-14);
        assert_relative_eq!(b.phase2_alpha(1e-9).unwrap(), a0, max_relative = 1e-8);
        assert_relative_eq!(
            b.phase2_alpha(2.0).unwrap(),
            a0 * (540.0f64 / 81.0).sqrt(),
            max_relative = 1e-14
        );
        assert!(matches!(b.phase2_alpha(2.5), Err(GdlError::Phase { .. })));
        // reaction reduces to the elastic value at l_m = 0
        assert_relative_eq!(
            b.phase2_reaction(0.0, a0).unwrap(),
            b.phase1_limits().p_0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn junctions_are_continuous() {
        let b = reference();
        let (a2, a3) = (b.phase2_alpha(2.0).unwrap(), b.phase3_alpha(2.0).unwrap());
        assert_relative_eq!(a2, a3, max_relative = 1e-12);
        assert_relative_eq!(
            b.phase2_reaction(2.0, a2).unwrap(),
            b.phase3_reaction(2.0, a3).unwrap(),
            max_relative = 1e-12
        );
        let (a3, a4) = (b.phase3_alpha(6.0).unwrap(), b.phase4_alpha(0.0).unwrap());
        assert_relative_eq!(a3, a4, max_relative = 1e-12);
        assert_relative_eq!(a4 * a4, 0.0046875, max_relative = 1e-12);
        let p = b.phase4_reaction(0.0, a4).unwrap();
        assert_relative_eq!(p, b.phase3_reaction(6.0, a3).unwrap(), max_relative = 1e-12);
        assert_relative_eq!(p, 0.811440825933579, max_relative = 1e-12);
    }

    #[test]
    fn printed_phase4_form_is_off_by_the_remaining_width() {
        let b = reference();
        for c in [0.0, 0.5, 1.5] {
            let ratio =
                b.phase4_alpha_with(c, Phase4Form::Printed).unwrap() / b.phase4_alpha(c).unwrap();
            assert_relative_eq!(ratio, 1.0 / (2.0 - c), max_relative = 1e-14);
        }
    }

    #[test]
    fn collapse_and_regime_errors() {
        let b = reference();
        assert!(matches!(
            b.phase4_alpha(2.0),
            Err(GdlError::Collapse { .. })
        ));
        assert!(b.phase4_alpha(-0.1).is_err());
        let short = MaterialSpec::block_reference(1.0);
        assert!(matches!(
            Block::new(&short),
            Err(GdlError::UnsupportedRegime(_))
        ));
        let equal = Block::new(&MaterialSpec::block_reference(2.0)).unwrap();
        assert!(matches!(
            equal.curve_stations(5),
            Err(GdlError::UnsupportedRegime(_))
        ));
    }

    #[test]
    fn station_mapping() {
        let b = reference();
        let s = b.state_at_zone(7.0).unwrap();
        assert_eq!(s.phase, BlockPhase::Propagation);
        assert_relative_eq!(s.c, 1.0);
        assert_eq!(s.d_m, 1.0);
        let s = b.state_at_zone(3.0).unwrap();
        assert_eq!(s.phase, BlockPhase::Growth);
        assert_relative_eq!(s.d_m, 0.5);
        assert_eq!(s.active_zone(2.0), 2.0);
        assert_eq!(b.state_at_zone(1.0).unwrap().phase, BlockPhase::Nucleation);
    }

    #[test]
    fn propagation_traction_vanishes_behind_the_crack() {
        let b = reference();
        let s = b.state(BlockStation::Propagation { c: 0.8 }).unwrap();
        let t = b.traction_profile(&s, 51);
        assert!(t.x.contains(&0.8));
        for (x, v) in t.x.iter().zip(&t.values) {
            if *x <= 0.8 {
                assert_eq!(*v, 0.0);
            }
        }
    }

    #[test]
    fn elastic_profiles() {
        let b = reference();
        let s = b.state(BlockStation::Elastic { alpha: 0.002 }).unwrap();
        let g = b.gamma2_profile(&s, 21).unwrap();
        assert!(g.values.iter().all(|&v| v == 0.0));
        let t = b.traction_profile(&s, 21);
        assert_relative_eq!(t.values[0], 800.0 * 0.002 * 2.0);
        assert!(t.values.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn wrong_rotation_is_flagged() {
        let b = reference();
        let mut s = b.state(BlockStation::Growth { l_m: 4.0 }).unwrap();
        s.alpha *= 1.01;
        assert!(matches!(
            b.gamma2_profile(&s, 101),
            Err(GdlError::Inconsistency { .. })
        ));
    }

    #[test]
    fn curve_layout() {
        let b = reference();
        let c = b.equilibrium_curve(5, Strategy::Sequential).unwrap();
        assert_eq!(c.len(), 16);
        assert_eq!(c[0].phase, BlockPhase::Elastic);
        assert_eq!(c[1].phase, BlockPhase::Nucleation);
        assert_relative_eq!(c[0].p, c[1].p, max_relative = 1e-14);
        assert!(c.last().unwrap().p < 1e-3 * c[0].p);
    }
}
