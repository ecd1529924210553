//! Material data, constitutive functions and the admissibility predicates
//! of the gradient-bounded damage model.
//!
//! Degradation `ω(d)` multiplies the elastic energy; the threshold `Y_c(d)` is
//! the damage-dependent critical energy release rate. Every derivative is a
//! hand-coded analytic expression.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_damage, GdlError, Result};

/// Raw material and geometry data.
///
/// `length`, `l_c` and `g_c` are shared by both problems. `e` and `sigma_c`
/// belong to the tensile rod; `k` and `g_0` to the interface of the block.
/// `length` is the half-length of the rod or the width of the block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialSpec {
    pub length: f64,
    pub l_c: f64,
    pub g_c: f64,
    pub e: Option<f64>,
    pub sigma_c: Option<f64>,
    pub k: Option<f64>,
    pub g_0: Option<f64>,
}

/// Validated bulk data for the rod.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RodParams {
    pub e: f64,
    pub length: f64,
    pub l_c: f64,
    pub sigma_c: f64,
    pub g_c: f64,
}

/// Validated interface data for the rigid block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockParams {
    pub length: f64,
    pub l_c: f64,
    pub k: f64,
    pub g_c: f64,
    pub g_0: f64,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(GdlError::InvalidSpec(format!(
            "{name} must be strictly positive and finite, got {v}"
        )))
    }
}

fn required(name: &str, v: Option<f64>) -> Result<f64> {
    match v {
        Some(v) => positive(name, v),
        None => Err(GdlError::InvalidSpec(format!("{name} is required"))),
    }
}

impl MaterialSpec {
    pub fn rod(e: f64, length: f64, l_c: f64, sigma_c: f64, g_c: f64) -> Self {
        MaterialSpec {
            length,
            l_c,
            g_c,
            e: Some(e),
            sigma_c: Some(sigma_c),
            k: None,
            g_0: None,
        }
    }

    /// Rod data from the dimensionless pair (λ, β) plus `E`, `L`, `σ_c`:
    /// `l_c = β L`, `G_c = σ_c² l_c / (λ E)`.
    pub fn rod_from_groups(lambda: f64, beta: f64, e: f64, length: f64, sigma_c: f64) -> Self {
        let l_c = beta * length;
        let g_c = sigma_c * sigma_c * l_c / (lambda * e);
        Self::rod(e, length, l_c, sigma_c, g_c)
    }

    pub fn block(length: f64, l_c: f64, k: f64, g_c: f64, g_0: f64) -> Self {
        MaterialSpec {
            length,
            l_c,
            g_c,
            e: None,
            sigma_c: None,
            k: Some(k),
            g_0: Some(g_0),
        }
    }

    /// Rigid-block reference data: L = 2 mm, k = 800 N/mm³, G_c = 0.25 N/mm,
    /// G_0 = 0.025 N/mm, with the given length scale.
    pub fn block_reference(l_c: f64) -> Self {
        Self::block(2.0, l_c, 800.0, 0.25, 0.025)
    }

    /// Checks every field that is present.
    pub fn validate(&self) -> Result<()> {
        positive("L", self.length)?;
        positive("l_c", self.l_c)?;
        positive("G_c", self.g_c)?;
        for (name, v) in [
            ("E", self.e),
            ("sigma_c", self.sigma_c),
            ("k", self.k),
            ("G_0", self.g_0),
        ] {
            if let Some(v) = v {
                positive(name, v)?;
            }
        }
        Ok(())
    }

    pub fn rod_params(&self) -> Result<RodParams> {
        Ok(RodParams {
            e: required("E", self.e)?,
            length: positive("L", self.length)?,
            l_c: positive("l_c", self.l_c)?,
            sigma_c: required("sigma_c", self.sigma_c)?,
            g_c: positive("G_c", self.g_c)?,
        })
    }

    pub fn block_params(&self) -> Result<BlockParams> {
        let p = BlockParams {
            length: positive("L", self.length)?,
            l_c: positive("l_c", self.l_c)?,
            k: required("k", self.k)?,
            g_c: positive("G_c", self.g_c)?,
            g_0: required("G_0", self.g_0)?,
        };
        if p.g_c <= p.g_0 {
            return Err(GdlError::InvalidSpec(format!(
                "block problems need G_c > G_0 (got G_c = {}, G_0 = {})",
                p.g_c, p.g_0
            )));
        }
        Ok(p)
    }

    pub fn groups(&self) -> Result<DimensionlessGroups> {
        Ok(DimensionlessGroups::of(&self.rod_params()?))
    }
}

impl RodParams {
    /// Stress scale `σ_c² / E` of the rod thresholds.
    pub fn threshold_scale(&self) -> f64 {
        self.sigma_c * self.sigma_c / self.e
    }

    /// Displacement scale `σ_c L / E`.
    pub fn displacement_scale(&self) -> f64 {
        self.sigma_c * self.length / self.e
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionlessGroups {
    pub lambda: f64,
    pub beta: f64,
    pub l_coh: f64,
}

impl DimensionlessGroups {
    pub fn of(p: &RodParams) -> Self {
        let l_coh = p.e * p.g_c / (p.sigma_c * p.sigma_c);
        DimensionlessGroups {
            lambda: p.l_c / l_coh,
            beta: p.l_c / p.length,
            l_coh,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Degradation {
    /// ω = (1 − d)²
    Quadratic,
    /// ω = 1 − d
    Linear,
}

impl Degradation {
    #[inline]
    pub fn value(self, d: f64) -> f64 {
        match self {
            Degradation::Quadratic => (1.0 - d) * (1.0 - d),
            Degradation::Linear => 1.0 - d,
        }
    }

    #[inline]
    pub fn slope(self, d: f64) -> f64 {
        match self {
            Degradation::Quadratic => -2.0 * (1.0 - d),
            Degradation::Linear => -1.0,
        }
    }

    #[inline]
    pub fn curvature(self, _d: f64) -> f64 {
        match self {
            Degradation::Quadratic => 2.0,
            Degradation::Linear => 0.0,
        }
    }

    /// `F(d_m) = ∫₀^{d_m} (ω⁻¹ − 1) dd`, unchecked.
    #[inline]
    pub fn compliance_integral(self, d_m: f64) -> f64 {
        match self {
            Degradation::Quadratic => d_m * d_m / (1.0 - d_m),
            Degradation::Linear => -(1.0 - d_m).ln() - d_m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Threshold {
    /// Threshold making the localized rod equivalent to a linear-softening
    /// cohesive crack.
    CohesiveEquivalent,
    /// `Y_c = σ_c² / E`
    ConstantFull,
    /// `Y_c = σ_c² / (2E)`
    ConstantHalf,
    /// Interface threshold producing the local bilinear cohesive law.
    BlockBilinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConstitutiveVariant {
    pub degradation: Degradation,
    pub threshold: Threshold,
}

impl ConstitutiveVariant {
    /// Quadratic degradation with the cohesive-equivalent threshold.
    pub const CASE_I: Self = Self {
        degradation: Degradation::Quadratic,
        threshold: Threshold::CohesiveEquivalent,
    };
    /// Quadratic degradation with constant `Y_c = σ_c²/E`.
    pub const CASE_II: Self = Self {
        degradation: Degradation::Quadratic,
        threshold: Threshold::ConstantFull,
    };
    /// Linear degradation with constant `Y_c = σ_c²/(2E)`.
    pub const CASE_III: Self = Self {
        degradation: Degradation::Linear,
        threshold: Threshold::ConstantHalf,
    };
    /// Interface law of the rigid-block problem.
    pub const BLOCK: Self = Self {
        degradation: Degradation::Quadratic,
        threshold: Threshold::BlockBilinear,
    };

    pub fn label(&self) -> String {
        match *self {
            Self::CASE_I => "i".into(),
            Self::CASE_II => "ii".into(),
            Self::CASE_III => "iii".into(),
            Self::BLOCK => "block".into(),
            other => format!("{:?}/{:?}", other.degradation, other.threshold),
        }
    }
}

impl fmt::Display for ConstitutiveVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for ConstitutiveVariant {
    type Err = GdlError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "i" | "1" => Ok(Self::CASE_I),
            "ii" | "2" => Ok(Self::CASE_II),
            "iii" | "3" => Ok(Self::CASE_III),
            "block" => Ok(Self::BLOCK),
            other => Err(GdlError::UnsupportedVariant(format!(
                "unknown variant '{other}' (expected i, ii, iii or block)"
            ))),
        }
    }
}

/// Threshold function with its parameters resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdLaw {
    Cohesive { scale: f64, lambda: f64 },
    Constant { value: f64 },
    Bilinear { g_0: f64, g_c: f64 },
}

/// A degradation/threshold pair bound to concrete material data.
///
/// Methods are unchecked; they are the hot path of the solvers. The free
/// functions of this module wrap them with domain checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constitutive {
    pub degradation: Degradation,
    pub law: ThresholdLaw,
}

impl Constitutive {
    pub fn resolve(variant: ConstitutiveVariant, spec: &MaterialSpec) -> Result<Self> {
        let law = match variant.threshold {
            Threshold::CohesiveEquivalent => {
                let p = spec.rod_params()?;
                ThresholdLaw::Cohesive {
                    scale: p.threshold_scale(),
                    lambda: DimensionlessGroups::of(&p).lambda,
                }
            }
            Threshold::ConstantFull => {
                let p = spec.rod_params()?;
                ThresholdLaw::Constant {
                    value: p.threshold_scale(),
                }
            }
            Threshold::ConstantHalf => {
                let p = spec.rod_params()?;
                ThresholdLaw::Constant {
                    value: 0.5 * p.threshold_scale(),
                }
            }
            Threshold::BlockBilinear => {
                let p = spec.block_params()?;
                ThresholdLaw::Bilinear {
                    g_0: p.g_0,
                    g_c: p.g_c,
                }
            }
        };
        Ok(Constitutive {
            degradation: variant.degradation,
            law,
        })
    }

    #[inline]
    pub fn omega(&self, d: f64) -> f64 {
        self.degradation.value(d)
    }

    #[inline]
    pub fn omega_prime(&self, d: f64) -> f64 {
        self.degradation.slope(d)
    }

    #[inline]
    pub fn omega_second(&self, d: f64) -> f64 {
        self.degradation.curvature(d)
    }

    #[inline]
    pub fn y_c(&self, d: f64) -> f64 {
        match self.law {
            ThresholdLaw::Cohesive { scale, lambda } => {
                let den = lambda * d * d + 1.0 - d;
                scale * (1.0 + lambda * d * d * (d - 3.0)) / (den * den * den)
            }
            ThresholdLaw::Constant { value } => value,
            ThresholdLaw::Bilinear { g_0, g_c } => {
                let b = g_0 + (g_c - g_0) * self.omega(d);
                -self.omega_prime(d) * g_0 * g_c * g_c / (b * b)
            }
        }
    }

    #[inline]
    pub fn y_c_prime(&self, d: f64) -> f64 {
        match self.law {
            ThresholdLaw::Cohesive { scale, lambda } => {
                let num = 1.0 + lambda * d * d * (d - 3.0);
                let num_p = lambda * (3.0 * d * d - 6.0 * d);
                let den = lambda * d * d + 1.0 - d;
                let den_p = 2.0 * lambda * d - 1.0;
                scale * (num_p * den - 3.0 * num * den_p) / (den * den * den * den)
            }
            ThresholdLaw::Constant { .. } => 0.0,
            ThresholdLaw::Bilinear { g_0, g_c } => {
                let w = self.omega(d);
                let wp = self.omega_prime(d);
                let b = g_0 + (g_c - g_0) * w;
                g_0 * g_c
                    * g_c
                    * (-self.omega_second(d) / (b * b) + 2.0 * (g_c - g_0) * wp * wp / (b * b * b))
            }
        }
    }

    /// Antiderivative `H(d) = ∫₀^d Y_c(s) ds` in closed form.
    #[inline]
    pub fn dissipation_potential(&self, d: f64) -> f64 {
        match self.law {
            ThresholdLaw::Cohesive { scale, lambda } => {
                let den = lambda * d * d + 1.0 - d;
                0.5 * scale * d * (2.0 - d) / (den * den)
            }
            ThresholdLaw::Constant { value } => value * d,
            ThresholdLaw::Bilinear { g_0, g_c } => {
                let b = g_0 + (g_c - g_0) * self.omega(d);
                g_0 * g_c * g_c / (g_c - g_0) * (1.0 / b - 1.0 / g_c)
            }
        }
    }

    /// Local stability margin `Y_c ω'' − Y_c' ω'`; positive when the
    /// homogeneous inelastic response is locally stable.
    pub fn stability_margin(&self, d: f64) -> f64 {
        self.y_c(d) * self.omega_second(d) - self.y_c_prime(d) * self.omega_prime(d)
    }

    /// Strain-softening margin `[Y_c' ω² + 2 Y_c ω ω'] ω' − Y_c ω² ω''`;
    /// positive when the complementary energy decreases with damage.
    pub fn softening_margin(&self, d: f64) -> f64 {
        let w = self.omega(d);
        let wp = self.omega_prime(d);
        let y = self.y_c(d);
        (self.y_c_prime(d) * w * w + 2.0 * y * w * wp) * wp - y * w * w * self.omega_second(d)
    }
}

pub fn omega(degradation: Degradation, d: f64) -> Result<f64> {
    check_damage(d)?;
    Ok(degradation.value(d))
}

pub fn omega_prime(degradation: Degradation, d: f64) -> Result<f64> {
    check_damage(d)?;
    Ok(degradation.slope(d))
}

pub fn omega_second(degradation: Degradation, d: f64) -> Result<f64> {
    check_damage(d)?;
    Ok(degradation.curvature(d))
}

/// Energy-release threshold `Y_c(d)` for a variant and material.
pub fn y_c(variant: ConstitutiveVariant, spec: &MaterialSpec, d: f64) -> Result<f64> {
    check_damage(d)?;
    Ok(Constitutive::resolve(variant, spec)?.y_c(d))
}

/// Upper bound on λ from local stability of the quadratic/cohesive pair.
///
/// The bound is the relevant root of a quadratic in λ. The textbook root
/// expression has a removable 0/0 where `2d² − 9d + 6 = 0` (d ≈ 0.8138), so
/// the conjugate form is used there. Returns `+∞` at `d = 0`.
pub fn stability_bound_lambda(d: f64) -> Result<f64> {
    check_damage(d)?;
    if d == 0.0 {
        return Ok(f64::INFINITY);
    }
    let quad = 2.0 * d * d - 9.0 * d + 6.0;
    let b = d * d * d - 4.0 * d * d - 10.0 * d + 12.0;
    let root = (2.0 - d) * (d.powi(4) - 4.0 * d.powi(3) + 40.0 * d * d - 72.0 * d + 36.0).sqrt();
    if quad.abs() > 0.1 {
        Ok((b - root) / (4.0 * d * d * quad))
    } else {
        let c = 4.0 * (1.0 - d) / d;
        Ok(2.0 * c / (b + root))
    }
}

/// Stability bound in the printed closed form. Kept for cross-checking; it
/// is singular at the root of `2d² − 9d + 6`.
pub fn stability_bound_lambda_closed_form(d: f64) -> f64 {
    let num = (d - 2.0) * (d.powi(4) - 4.0 * d.powi(3) + 40.0 * d * d - 72.0 * d + 36.0).sqrt()
        + d.powi(3)
        - 4.0 * d * d
        - 10.0 * d
        + 12.0;
    num / (8.0 * d.powi(4) - 36.0 * d.powi(3) + 24.0 * d * d)
}

/// Upper bound on λ from the strain-softening condition of the
/// quadratic/cohesive pair: `λ < (1 + (1−d)²) / (2d²)`. `+∞` at `d = 0`.
pub fn softening_bound_lambda(d: f64) -> Result<f64> {
    check_damage(d)?;
    if d == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((1.0 + (1.0 - d) * (1.0 - d)) / (2.0 * d * d))
}

/// Largest λ for which both bounds hold at `d`.
pub fn admissible_lambda(d: f64) -> Result<f64> {
    Ok(stability_bound_lambda(d)?.min(softening_bound_lambda(d)?))
}

/// Warning text when λ leaves the region where both inequalities hold for
/// every damage level.
pub fn lambda_warning(lambda: f64) -> Option<String> {
    if !(lambda > 0.0 && lambda < 0.5) {
        Some(format!(
            "lambda = {lambda} is outside (0, 0.5): local stability or strain softening fails near d = 1"
        ))
    } else {
        None
    }
}

/// Stability of the rod response under displacement control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SnapBack {
    /// End displacement increases monotonically along the localized branch.
    Stable,
    /// Snap-back right after the elastic limit.
    AtOnset,
    /// Snap-back after the elastic limit and again on an interior window of
    /// the branch.
    Window,
}

/// Damage level at which `ln(1 − d) + 3d` vanishes (≈ 0.94048), where the
/// linear-degradation stability threshold diverges a second time.
pub fn linear_degradation_second_divergence() -> f64 {
    // g(d) = ln(1-d) + 3d is positive on (0, d*) and negative beyond.
    let g = |d: f64| (1.0 - d).ln() + 3.0 * d;
    let (mut lo, mut hi) = (0.5_f64, 0.999_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Threshold on β above which `du*/dd_m > 0` at `d_m`, for the three named
/// rod cases. May be infinite or negative where no β stabilizes the branch.
pub fn stability_rhs(variant: ConstitutiveVariant, lambda: f64, d_m: f64) -> Result<f64> {
    check_damage(d_m)?;
    match variant {
        ConstitutiveVariant::CASE_I => Ok(lambda),
        ConstitutiveVariant::CASE_II => Ok((3.0 - d_m) / (d_m * (8.0 - 3.0 * d_m))),
        ConstitutiveVariant::CASE_III => Ok(1.0 / ((1.0 - d_m).ln() + 3.0 * d_m)),
        other => Err(GdlError::UnsupportedVariant(format!(
            "no snap-back threshold for variant {other}"
        ))),
    }
}

pub fn snapback_predicate(
    variant: ConstitutiveVariant,
    beta: f64,
    lambda: f64,
) -> Result<SnapBack> {
    if !(beta > 0.0 && lambda > 0.0) {
        return Err(GdlError::InvalidSpec(format!(
            "beta and lambda must be positive (beta = {beta}, lambda = {lambda})"
        )));
    }
    match variant {
        ConstitutiveVariant::CASE_I => Ok(if beta > lambda {
            SnapBack::Stable
        } else {
            SnapBack::AtOnset
        }),
        ConstitutiveVariant::CASE_II => Ok(SnapBack::AtOnset),
        ConstitutiveVariant::CASE_III => Ok(SnapBack::Window),
        other => Err(GdlError::UnsupportedVariant(format!(
            "no snap-back classification for variant {other}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_rod(lambda: f64) -> MaterialSpec {
        MaterialSpec::rod_from_groups(lambda, 0.5, 1.0, 1.0, 1.0)
    }

    #[test]
    fn degradation_values() {
        assert_eq!(omega(Degradation::Quadratic, 0.0).unwrap(), 1.0);
        assert_eq!(omega(Degradation::Quadratic, 0.5).unwrap(), 0.25);
        assert_eq!(omega(Degradation::Linear, 0.5).unwrap(), 0.5);
        for deg in [Degradation::Quadratic, Degradation::Linear] {
            assert_eq!(deg.value(1.0), 0.0);
            for i in 1..100 {
                assert!(deg.slope(i as f64 / 100.0) < 0.0);
            }
        }
    }

    #[test]
    fn degradation_rejects_out_of_range() {
        assert!(matches!(
            omega(Degradation::Quadratic, 1.5),
            Err(GdlError::Domain { .. })
        ));
        assert!(omega_prime(Degradation::Linear, -0.1).is_err());
        assert!(omega_second(Degradation::Linear, f64::NAN).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let spec = unit_rod(0.4);
        let block = MaterialSpec::block_reference(6.0);
        let cases = [
            Constitutive::resolve(ConstitutiveVariant::CASE_I, &spec).unwrap(),
            Constitutive::resolve(ConstitutiveVariant::CASE_III, &spec).unwrap(),
            Constitutive::resolve(ConstitutiveVariant::BLOCK, &block).unwrap(),
        ];
        let h = 1e-6;
        for c in cases {
            for i in 1..20 {
                let d = i as f64 / 20.0;
                let fd = (c.y_c(d + h) - c.y_c(d - h)) / (2.0 * h);
                assert_relative_eq!(c.y_c_prime(d), fd, max_relative = 1e-6, epsilon = 1e-8);
                let fd = (c.omega(d + h) - c.omega(d - h)) / (2.0 * h);
                assert_relative_eq!(c.omega_prime(d), fd, max_relative = 1e-8);
                let fd =
                    (c.dissipation_potential(d + h) - c.dissipation_potential(d - h)) / (2.0 * h);
                assert_relative_eq!(c.y_c(d), fd, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn cohesive_threshold_reference_values() {
        let spec = unit_rod(0.4);
        let v = ConstitutiveVariant::CASE_I;
        assert_relative_eq!(y_c(v, &spec, 0.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(
            y_c(v, &spec, 0.5).unwrap(),
            0.75 / 0.216,
            max_relative = 1e-14
        );
        assert_relative_eq!(y_c(v, &spec, 0.5).unwrap(), 3.472222, max_relative = 1e-6);
        assert_relative_eq!(y_c(v, &spec, 1.0).unwrap(), 3.125, max_relative = 1e-14);
        // positive everywhere for lambda < 1/2
        let c = Constitutive::resolve(v, &unit_rod(0.49)).unwrap();
        for i in 0..=1000 {
            assert!(c.y_c(i as f64 / 1000.0) > 0.0);
        }
    }

    #[test]
    fn bilinear_threshold_at_onset() {
        let spec = MaterialSpec::block_reference(6.0);
        let y0 = y_c(ConstitutiveVariant::BLOCK, &spec, 0.0).unwrap();
        assert_relative_eq!(y0, 0.05, max_relative = 1e-14);
    }

    #[test]
    fn block_requires_finite_softening() {
        let spec = MaterialSpec::block(2.0, 6.0, 800.0, 0.02, 0.025);
        assert!(matches!(spec.block_params(), Err(GdlError::InvalidSpec(_))));
        assert!(MaterialSpec::rod(1.0, -1.0, 0.5, 1.0, 1.0)
            .validate()
            .is_err());
        assert!(spec.rod_params().is_err());
    }

    #[test]
    fn groups_from_fields() {
        let spec = MaterialSpec::rod(2.0, 3.0, 0.6, 1.5, 0.9);
        let g = spec.groups().unwrap();
        assert_relative_eq!(g.l_coh, 2.0 * 0.9 / 2.25, max_relative = 1e-15);
        assert_relative_eq!(g.lambda, 0.6 / g.l_coh, max_relative = 1e-15);
        assert_relative_eq!(g.beta, 0.2, max_relative = 1e-15);
        let back = MaterialSpec::rod_from_groups(0.4, 0.5, 1.0, 1.0, 1.0)
            .groups()
            .unwrap();
        assert_relative_eq!(back.lambda, 0.4, max_relative = 1e-15);
        assert_relative_eq!(back.beta, 0.5, max_relative = 1e-15);
    }

    #[test]
    fn stability_bound_limits_and_forms() {
        assert_eq!(stability_bound_lambda(0.0).unwrap(), f64::INFINITY);
        assert_relative_eq!(
            stability_bound_lambda(1.0).unwrap(),
            0.5,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            stability_bound_lambda(1.0 - 1e-7).unwrap(),
            0.5,
            max_relative = 1e-6
        );
        for i in 1..100 {
            let d = i as f64 / 100.0;
            if (2.0 * d * d - 9.0 * d + 6.0).abs() < 0.2 {
                continue;
            }
            assert_relative_eq!(
                stability_bound_lambda(d).unwrap(),
                stability_bound_lambda_closed_form(d),
                max_relative = 1e-11
            );
        }
        // smooth across the removable singularity
        let d0 = (9.0 - 33f64.sqrt()) / 4.0;
        let left = stability_bound_lambda(d0 - 1e-3).unwrap();
        let mid = stability_bound_lambda(d0).unwrap();
        let right = stability_bound_lambda(d0 + 1e-3).unwrap();
        assert!((left - mid).abs() < 1e-2 && (right - mid).abs() < 1e-2);
    }

    #[test]
    fn stability_bound_separates_the_predicate() {
        for &d in &[0.1, 0.3, 0.5, 0.7, 0.8138, 0.9, 0.99] {
            let bound = stability_bound_lambda(d).unwrap();
            let below =
                Constitutive::resolve(ConstitutiveVariant::CASE_I, &unit_rod(bound * (1.0 - 1e-4)))
                    .unwrap();
            let above =
                Constitutive::resolve(ConstitutiveVariant::CASE_I, &unit_rod(bound * (1.0 + 1e-4)))
                    .unwrap();
            assert!(below.stability_margin(d) > 0.0, "d = {d}");
            assert!(above.stability_margin(d) < 0.0, "d = {d}");
        }
    }

    #[test]
    fn softening_bound_values_and_separation() {
        assert_eq!(softening_bound_lambda(0.0).unwrap(), f64::INFINITY);
        assert_relative_eq!(softening_bound_lambda(1.0).unwrap(), 0.5);
        assert_relative_eq!(softening_bound_lambda(0.5).unwrap(), 2.5);
        for &d in &[0.2, 0.5, 0.8, 0.95] {
            let bound = softening_bound_lambda(d).unwrap();
            let below =
                Constitutive::resolve(ConstitutiveVariant::CASE_I, &unit_rod(bound * (1.0 - 1e-4)))
                    .unwrap();
            let above =
                Constitutive::resolve(ConstitutiveVariant::CASE_I, &unit_rod(bound * (1.0 + 1e-4)))
                    .unwrap();
            assert!(below.softening_margin(d) > 0.0, "d = {d}");
            assert!(above.softening_margin(d) < 0.0, "d = {d}");
        }
    }

    #[test]
    fn half_is_inside_the_closed_admissible_region() {
        for i in 1..=1000 {
            let d = i as f64 / 1000.0;
            assert!(admissible_lambda(d).unwrap() >= 0.5 - 1e-12, "d = {d}");
        }
        assert!(lambda_warning(0.4).is_none());
        assert!(lambda_warning(0.55).is_some());
    }

    #[test]
    fn snapback_classification() {
        use ConstitutiveVariant as V;
        assert_eq!(
            snapback_predicate(V::CASE_I, 0.5, 0.4).unwrap(),
            SnapBack::Stable
        );
        assert_eq!(
            snapback_predicate(V::CASE_I, 0.3, 0.4).unwrap(),
            SnapBack::AtOnset
        );
        for beta in [0.1, 1.0, 10.0] {
            assert_eq!(
                snapback_predicate(V::CASE_II, beta, 0.4).unwrap(),
                SnapBack::AtOnset
            );
            assert_eq!(
                snapback_predicate(V::CASE_III, beta, 0.4).unwrap(),
                SnapBack::Window
            );
        }
        assert!(snapback_predicate(V::BLOCK, 1.0, 0.4).is_err());
        assert!(snapback_predicate(V::CASE_I, -1.0, 0.4).is_err());
    }

    #[test]
    fn second_divergence_of_linear_case() {
        let d = linear_degradation_second_divergence();
        assert!((d - 0.94048).abs() < 5e-6);
        let rhs = |x: f64| stability_rhs(ConstitutiveVariant::CASE_III, 0.4, x).unwrap();
        assert!(rhs(d - 1e-6).abs() > 1e4);
        assert!(rhs(1e-6).abs() > 1e4);
        assert!(rhs(0.5) > 0.0 && rhs(0.5) < 10.0);
    }

    #[test]
    fn variant_parsing() {
        assert_eq!(
            "ii".parse::<ConstitutiveVariant>().unwrap(),
            ConstitutiveVariant::CASE_II
        );
        assert_eq!(ConstitutiveVariant::CASE_III.to_string(), "iii");
        assert!("iv".parse::<ConstitutiveVariant>().is_err());
    }
}
