//! Localized solution of the damageable tensile rod.
//!
//! The half-bar `[0, L]` carries a single defect at `x = 0`. Every quantity
//! is an explicit function of the maximum damage `d_m`; the damage field is
//! the triangle `d(x) = max{0, d_m − x/l_c}`.

use serde::Serialize;

use crate::error::{check_damage, GdlError, Result};
use crate::exec::Strategy;
use crate::material::{
    Constitutive, ConstitutiveVariant, DimensionlessGroups, MaterialSpec, RodParams,
};
use crate::oracle::{bisect, BracketConfig};
use crate::profile::{grid, FieldKind, FieldProfile};

/// Largest `d_m` used where a curve must stop short of complete failure.
pub const D_M_MAX: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RodState {
    pub d_m: f64,
    pub sigma: f64,
    pub u_star: f64,
    pub w: f64,
    pub l_m: f64,
    pub variant: ConstitutiveVariant,
}

/// A rod bound to its material data and one of the three supported laws.
#[derive(Debug, Clone, Copy)]
pub struct Rod {
    pub params: RodParams,
    pub groups: DimensionlessGroups,
    pub variant: ConstitutiveVariant,
    pub law: Constitutive,
}

impl Rod {
    pub fn new(spec: &MaterialSpec, variant: ConstitutiveVariant) -> Result<Self> {
        if !matches!(
            variant,
            ConstitutiveVariant::CASE_I
                | ConstitutiveVariant::CASE_II
                | ConstitutiveVariant::CASE_III
        ) {
            return Err(GdlError::UnsupportedVariant(format!(
                "the rod solver handles cases i, ii and iii, not {variant}"
            )));
        }
        let params = spec.rod_params()?;
        Ok(Rod {
            params,
            groups: DimensionlessGroups::of(&params),
            variant,
            law: Constitutive::resolve(variant, spec)?,
        })
    }

    /// End displacement at the elastic limit.
    pub fn elastic_limit(&self) -> Result<f64> {
        let slope = -self.law.omega_prime(0.0);
        if slope <= 0.0 {
            return Err(GdlError::DegenerateMaterial(
                "degradation has zero slope at d = 0".into(),
            ));
        }
        Ok((2.0 * self.law.y_c(0.0) / (slope * self.params.e)).sqrt() * self.params.length)
    }

    pub fn band_half_width(&self, d_m: f64) -> f64 {
        self.params.l_c * d_m
    }

    pub fn stress(&self, d_m: f64) -> Result<f64> {
        check_damage(d_m)?;
        let sc = self.params.sigma_c;
        let lambda = self.groups.lambda;
        Ok(match self.variant {
            ConstitutiveVariant::CASE_I => sc * (1.0 - d_m) / (lambda * d_m * d_m + 1.0 - d_m),
            ConstitutiveVariant::CASE_II => sc * (1.0 - d_m) * (2.0 / (2.0 - d_m)).sqrt(),
            _ => sc * (1.0 - d_m).sqrt(),
        })
    }

    /// `σ(d_m)·F(d_m)`, finite up to and including `d_m = 1`.
    fn stress_compliance(&self, d_m: f64) -> f64 {
        let sc = self.params.sigma_c;
        match self.variant {
            ConstitutiveVariant::CASE_I => {
                sc * d_m * d_m / (self.groups.lambda * d_m * d_m + 1.0 - d_m)
            }
            ConstitutiveVariant::CASE_II => sc * d_m * d_m * (2.0 / (2.0 - d_m)).sqrt(),
            _ if d_m >= 1.0 => 0.0,
            _ => sc * (1.0 - d_m).sqrt() * (-(1.0 - d_m).ln() - d_m),
        }
    }

    pub fn u_star(&self, d_m: f64) -> Result<f64> {
        let sigma = self.stress(d_m)?;
        let p = &self.params;
        Ok((sigma * p.length + p.l_c * self.stress_compliance(d_m)) / p.e)
    }

    /// Apparent opening `w = 2 σ l_c F / E` across the band.
    pub fn opening(&self, d_m: f64) -> Result<f64> {
        check_damage(d_m)?;
        Ok(2.0 * self.params.l_c * self.stress_compliance(d_m) / self.params.e)
    }

    /// `du*/dd_m` from the closed forms.
    pub fn du_star_dd(&self, d_m: f64) -> Result<f64> {
        check_damage(d_m)?;
        let (beta, lambda) = (self.groups.beta, self.groups.lambda);
        let d = d_m;
        let slope = match self.variant {
            ConstitutiveVariant::CASE_I => {
                let den = lambda * d * d + 1.0 - d;
                (beta - lambda) * (2.0 * d - d * d) / (den * den)
            }
            ConstitutiveVariant::CASE_II => {
                2.0 * (beta * d * (8.0 - 3.0 * d) - (3.0 - d)) / (4.0 - 2.0 * d).powf(1.5)
            }
            _ => {
                if d >= 1.0 {
                    return Err(GdlError::Divergent("du*/dd_m"));
                }
                (beta * (3.0 * d + (1.0 - d).ln()) - 1.0) / (2.0 * (1.0 - d).sqrt())
            }
        };
        Ok(slope * self.params.displacement_scale())
    }

    pub fn state(&self, d_m: f64) -> Result<RodState> {
        Ok(RodState {
            d_m,
            sigma: self.stress(d_m)?,
            u_star: self.u_star(d_m)?,
            w: self.opening(d_m)?,
            l_m: self.band_half_width(d_m),
            variant: self.variant,
        })
    }

    /// Inelastic branch sampled uniformly in `d_m ∈ [0, D_M_MAX]`.
    pub fn equilibrium_curve(&self, n_points: usize, strategy: Strategy) -> Result<Vec<RodState>> {
        if n_points < 2 {
            return Err(GdlError::InvalidSpec(
                "a curve needs at least 2 points".into(),
            ));
        }
        strategy.try_map(n_points, |i| {
            self.state(D_M_MAX * i as f64 / (n_points - 1) as f64)
        })
    }

    /// Stress on the equilibrium path at end displacement `u`, following the
    /// elastic line up to the peak and then the inelastic branch. Only
    /// meaningful when the branch has no snap-back.
    pub fn stress_at_displacement(&self, u: f64) -> Result<f64> {
        let u_el = self.elastic_limit()?;
        if u <= u_el {
            return Ok(self.params.e * u / self.params.length);
        }
        if u >= self.u_star(1.0)? {
            return Ok(0.0);
        }
        let d_m = bisect(
            |d| self.u_star(d).unwrap_or(f64::NAN) - u,
            &BracketConfig::new(0.0, 1.0),
        )?;
        self.stress(d_m)
    }

    pub fn damage_at(&self, d_m: f64, x: f64) -> f64 {
        (d_m - x.abs() / self.params.l_c).max(0.0)
    }

    /// Damage-driving force `Y = −ω'(d) σ² / (2 E ω²)`.
    pub fn driving_force(&self, sigma: f64, d: f64) -> f64 {
        let w = self.law.omega(d);
        -self.law.omega_prime(d) * sigma * sigma / (2.0 * self.params.e * w * w)
    }

    fn profile_grid(&self, d_m: f64, n_samples: usize) -> Vec<f64> {
        grid(
            0.0,
            self.params.length,
            n_samples,
            &[self.band_half_width(d_m)],
        )
    }

    pub fn damage_profile(&self, d_m: f64, n_samples: usize) -> Result<FieldProfile> {
        check_damage(d_m)?;
        Ok(FieldProfile::from_fn(
            FieldKind::Damage,
            d_m,
            self.profile_grid(d_m, n_samples),
            |x| self.damage_at(d_m, x),
        ))
    }

    pub fn driving_force_profile(&self, d_m: f64, n_samples: usize) -> Result<FieldProfile> {
        let sigma = self.stress(d_m)?;
        if d_m >= 1.0 {
            return Err(GdlError::Divergent("driving force"));
        }
        Ok(FieldProfile::from_fn(
            FieldKind::DrivingForce,
            d_m,
            self.profile_grid(d_m, n_samples),
            |x| self.driving_force(sigma, self.damage_at(d_m, x)),
        ))
    }

    pub fn threshold_profile(&self, d_m: f64, n_samples: usize) -> Result<FieldProfile> {
        check_damage(d_m)?;
        Ok(FieldProfile::from_fn(
            FieldKind::Threshold,
            d_m,
            self.profile_grid(d_m, n_samples),
            |x| self.law.y_c(self.damage_at(d_m, x)),
        ))
    }

    /// Multiplier of the gradient bound as a function of the local damage:
    /// `γ₂(d) = l_c [H(d) − σ_m² (ω⁻¹(d) − 1) / (2E)]`.
    pub fn gamma2_of_damage(&self, d_m: f64, d: f64) -> Result<f64> {
        let sigma = self.stress(d_m)?;
        check_damage(d)?;
        // both band ends are exact zeros
        if d == 0.0 || d == d_m {
            return Ok(0.0);
        }
        let compliance = 1.0 / self.law.omega(d) - 1.0;
        Ok(self.params.l_c
            * (self.law.dissipation_potential(d)
                - sigma * sigma * compliance / (2.0 * self.params.e)))
    }

    pub fn gamma2_profile(&self, d_m: f64, n_samples: usize) -> Result<FieldProfile> {
        if !(d_m > 0.0 && d_m < 1.0) {
            return Err(GdlError::Domain {
                value: d_m,
                lo: 0.0,
                hi: 1.0,
            });
        }
        let x = self.profile_grid(d_m, n_samples);
        let values = x
            .iter()
            .map(|&xi| self.gamma2_of_damage(d_m, self.damage_at(d_m, xi)))
            .collect::<Result<Vec<_>>>()?;
        Ok(FieldProfile {
            kind: FieldKind::Gamma2,
            parameter: d_m,
            x,
            values,
        })
    }
}

pub fn elastic_limit(spec: &MaterialSpec, variant: ConstitutiveVariant) -> Result<f64> {
    Rod::new(spec, variant)?.elastic_limit()
}

/// Compliance integral `F(d_m) = ∫₀^{d_m} (ω⁻¹ − 1) dd`.
pub fn f_of_dm(variant: ConstitutiveVariant, d_m: f64) -> Result<f64> {
    check_damage(d_m)?;
    if d_m >= 1.0 {
        return Err(GdlError::Divergent("F"));
    }
    Ok(variant.degradation.compliance_integral(d_m))
}

pub fn stress_of_dm(spec: &MaterialSpec, variant: ConstitutiveVariant, d_m: f64) -> Result<f64> {
    Rod::new(spec, variant)?.stress(d_m)
}

pub fn u_star_of_dm(spec: &MaterialSpec, variant: ConstitutiveVariant, d_m: f64) -> Result<f64> {
    Rod::new(spec, variant)?.u_star(d_m)
}

pub fn opening_w(spec: &MaterialSpec, d_m: f64) -> Result<f64> {
    Rod::new(spec, ConstitutiveVariant::CASE_I)?.opening(d_m)
}

pub fn damage_profile(spec: &MaterialSpec, d_m: f64, n_samples: usize) -> Result<FieldProfile> {
    Rod::new(spec, ConstitutiveVariant::CASE_I)?.damage_profile(d_m, n_samples)
}

pub fn gamma2_profile(spec: &MaterialSpec, d_m: f64, n_samples: usize) -> Result<FieldProfile> {
    Rod::new(spec, ConstitutiveVariant::CASE_I)?.gamma2_profile(d_m, n_samples)
}

pub fn equilibrium_curve(
    spec: &MaterialSpec,
    variant: ConstitutiveVariant,
    n_points: usize,
) -> Result<Vec<RodState>> {
    Rod::new(spec, variant)?.equilibrium_curve(n_points, Strategy::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit(lambda: f64, beta: f64, v: ConstitutiveVariant) -> Rod {
        Rod::new(
            &MaterialSpec::rod_from_groups(lambda, beta, 1.0, 1.0, 1.0),
            v,
        )
        .unwrap()
    }

    #[test]
    fn elastic_limits() {
        for v in [ConstitutiveVariant::CASE_I, ConstitutiveVariant::CASE_III] {
            assert_relative_eq!(
                unit(0.4, 0.5, v).elastic_limit().unwrap(),
                1.0,
                max_relative = 1e-15
            );
        }
        let long = Rod::new(
            &MaterialSpec::rod_from_groups(0.4, 0.25, 1.0, 2.0, 1.0),
            ConstitutiveVariant::CASE_I,
        )
        .unwrap();
        assert_relative_eq!(long.elastic_limit().unwrap(), 2.0, max_relative = 1e-15);
    }

    #[test]
    fn compliance_integral() {
        let v = ConstitutiveVariant::CASE_I;
        assert_eq!(f_of_dm(v, 0.0).unwrap(), 0.0);
        assert_relative_eq!(f_of_dm(v, 0.5).unwrap(), 0.5, max_relative = 1e-15);
        assert_relative_eq!(f_of_dm(v, 0.9).unwrap(), 8.1, max_relative = 1e-13);
        assert!(matches!(f_of_dm(v, 1.0), Err(GdlError::Divergent(_))));
    }

    #[test]
    fn stress_values() {
        assert_relative_eq!(
            unit(0.4, 0.5, ConstitutiveVariant::CASE_I)
                .stress(0.5)
                .unwrap(),
            0.5 / 0.6,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            unit(0.4, 0.5, ConstitutiveVariant::CASE_II)
                .stress(0.5)
                .unwrap(),
            1.0 / 3f64.sqrt(),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            unit(0.4, 0.5, ConstitutiveVariant::CASE_III)
                .stress(0.5)
                .unwrap(),
            0.5f64.sqrt(),
            max_relative = 1e-15
        );
        let r = unit(0.4, 0.5, ConstitutiveVariant::CASE_I);
        assert_eq!(r.stress(0.0).unwrap(), 1.0);
        assert_eq!(r.stress(1.0).unwrap(), 0.0);
    }

    #[test]
    fn end_displacement_values() {
        let r = unit(0.4, 0.5, ConstitutiveVariant::CASE_I);
        assert_relative_eq!(r.u_star(0.5).unwrap(), 0.625 / 0.6, max_relative = 1e-15);
        // general relation u* = σ (l_c F + L) / E
        let s = r.stress(0.5).unwrap();
        assert_relative_eq!(
            r.u_star(0.5).unwrap(),
            s * (0.5 * 0.5 + 1.0),
            max_relative = 1e-15
        );
        let r3 = unit(0.4, 0.5, ConstitutiveVariant::CASE_III);
        let expected = 0.5f64.sqrt() * (1.0 - 0.25 - 0.5 * 0.5f64.ln());
        assert_relative_eq!(r3.u_star(0.5).unwrap(), expected, max_relative = 1e-15);
        for v in [
            ConstitutiveVariant::CASE_I,
            ConstitutiveVariant::CASE_II,
            ConstitutiveVariant::CASE_III,
        ] {
            let r = unit(0.4, 0.5, v);
            assert_relative_eq!(
                r.u_star(0.0).unwrap(),
                r.elastic_limit().unwrap(),
                max_relative = 1e-15
            );
            assert!(r.u_star(1.0).unwrap().is_finite());
        }
    }

    #[test]
    fn opening_on_softening_line() {
        let r = unit(0.4, 0.5, ConstitutiveVariant::CASE_I);
        assert_eq!(r.opening(0.0).unwrap(), 0.0);
        let w = r.opening(0.5).unwrap();
        assert_relative_eq!(w, 2.0 * (0.5 / 0.6) * 0.5 * 0.5, max_relative = 1e-14);
        let g_c = r.params.g_c;
        assert_relative_eq!(g_c, 1.25, max_relative = 1e-15);
        assert_relative_eq!(
            1.0 - w / (2.0 * g_c),
            r.stress(0.5).unwrap(),
            max_relative = 1e-14
        );
        let w_end = r.opening(1.0 - 1e-6).unwrap();
        assert_relative_eq!(w_end, 2.0 * g_c, max_relative = 1e-5);
    }

    #[test]
    fn slope_matches_finite_differences() {
        for v in [
            ConstitutiveVariant::CASE_I,
            ConstitutiveVariant::CASE_II,
            ConstitutiveVariant::CASE_III,
        ] {
            for beta in [0.2, 0.5, 2.0] {
                let r = unit(0.4, beta, v);
                for i in 1..20 {
                    let d = i as f64 / 20.0;
                    let h = 1e-6;
                    let fd = (r.u_star(d + h).unwrap() - r.u_star(d - h).unwrap()) / (2.0 * h);
                    assert_relative_eq!(
                        r.du_star_dd(d).unwrap(),
                        fd,
                        max_relative = 1e-6,
                        epsilon = 1e-8
                    );
                }
            }
        }
    }

    #[test]
    fn damage_profile_shape() {
        let spec = MaterialSpec::rod_from_groups(0.4, 0.5, 1.0, 1.0, 1.0);
        let p = damage_profile(&spec, 0.5, 41).unwrap();
        assert!(p.is_well_formed());
        assert_eq!(p.values[0], 0.5);
        let i = p.x.iter().position(|&x| x == 0.25).unwrap();
        assert_eq!(p.values[i], 0.0);
        assert!(damage_profile(&spec, 0.0, 11)
            .unwrap()
            .values
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn gamma2_reference_value() {
        let r = unit(0.4, 0.5, ConstitutiveVariant::CASE_I);
        let g = r.gamma2_of_damage(0.5, 0.25).unwrap();
        let s25 = r.stress(0.25).unwrap();
        let s50 = r.stress(0.5).unwrap();
        let printed = 0.5 / 2.0 * 0.25 * 1.75 / 0.5625 * (s25 * s25 - s50 * s50);
        assert_relative_eq!(g, printed, max_relative = 1e-13);
        assert_relative_eq!(g, 0.047071, max_relative = 2e-5);
        assert!(r.gamma2_of_damage(0.5, 0.5).unwrap().abs() < 1e-15);
    }

    #[test]
    fn unsupported_variants() {
        let spec = MaterialSpec::rod_from_groups(0.4, 0.5, 1.0, 1.0, 1.0);
        assert!(Rod::new(&spec, ConstitutiveVariant::BLOCK).is_err());
    }

    #[test]
    fn stress_at_displacement_follows_the_path() {
        let r = unit(0.4, 0.5, ConstitutiveVariant::CASE_I);
        assert_relative_eq!(r.stress_at_displacement(0.5).unwrap(), 0.5);
        let u = r.u_star(0.3).unwrap();
        assert_relative_eq!(
            r.stress_at_displacement(u).unwrap(),
            r.stress(0.3).unwrap(),
            max_relative = 1e-12
        );
        assert_eq!(r.stress_at_displacement(10.0).unwrap(), 0.0);
    }
}
