//! Quasi-static load path: a monotone schedule of end displacements, each
//! step solved by alternating minimization to a staggered fixed point.

use serde::Serialize;

use crate::error::{GdlError, Result};
use crate::exec::Strategy;
use crate::fem::mesh::Mesh1D;
use crate::fem::model::{FemModel, SEED_REDUCTION};
use crate::fem::multipliers::recover_multipliers;
use crate::fem::projection::project_chain;
use crate::material::{ConstitutiveVariant, MaterialSpec};
use crate::rod::Rod;

/// Increments of the default schedule after the onset step.
pub const DEFAULT_STEPS: usize = 50;

/// Elements of the reference mesh of `[−L, L]`.
pub const DEFAULT_ELEMENTS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathOptions {
    /// Relative change of the combined state `(u, d)` ending a step.
    pub staggered_tol: f64,
    pub max_staggered: usize,
    pub max_bisections: u32,
    pub damage_tol: f64,
    pub damage_max_iter: usize,
    /// Recover the multipliers at every converged step.
    pub multipliers: bool,
}

impl Default for PathOptions {
    fn default() -> Self {
        PathOptions {
            staggered_tol: 1e-8,
            max_staggered: 1000,
            max_bisections: 6,
            damage_tol: 1e-12,
            damage_max_iter: 5000,
            multipliers: true,
        }
    }
}

/// Converged state at one load level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FemState {
    pub load_factor: f64,
    pub u: Vec<f64>,
    pub d: Vec<f64>,
    pub d_prev: Vec<f64>,
    pub lagrange_grad: Vec<f64>,
    pub lagrange_box: Vec<f64>,
    pub lagrange_irrev: Vec<f64>,
    pub kkt_residual: f64,
    /// Mean element stress.
    pub sigma: f64,
    /// `max_e |σ_e − σ̄| / |σ̄|`.
    pub stress_spread: f64,
    pub d_max: f64,
    pub band_half_width: f64,
    pub stored: f64,
    pub dissipation: f64,
    pub work: f64,
    pub staggered_iterations: usize,
    pub bisection_level: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadPath {
    pub n_elements: usize,
    pub states: Vec<FemState>,
}

impl LoadPath {
    pub fn last(&self) -> &FemState {
        &self.states[self.states.len() - 1]
    }

    pub fn curve(&self) -> Vec<(f64, f64)> {
        self.states
            .iter()
            .map(|s| (s.load_factor, s.sigma))
            .collect()
    }

    /// Per-step mismatch `|ΔW − ΔΨ − ΔD|`, relative to the largest of the
    /// three increments.
    pub fn energy_residuals(&self) -> Vec<f64> {
        self.states
            .windows(2)
            .map(|w| energy_mismatch(&w[0], &w[1]))
            .collect()
    }

    /// First state whose stress has dropped below `fraction·σ_peak`, after
    /// the peak.
    pub fn broken_state(&self, sigma_ref: f64, fraction: f64) -> Option<&FemState> {
        let peak = self
            .states
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.sigma.total_cmp(&b.1.sigma))?
            .0;
        self.states[peak..]
            .iter()
            .find(|s| s.sigma.abs() < fraction * sigma_ref)
    }
}

/// One elastic step to the onset of damage at the seeded node, then
/// `steps` uniform increments up to 2% beyond the largest end displacement
/// of the analytic branch.
pub fn default_schedule(
    spec: &MaterialSpec,
    variant: ConstitutiveVariant,
    steps: usize,
) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(GdlError::InvalidSpec(
            "a load path needs at least one step".into(),
        ));
    }
    let rod = Rod::new(spec, variant)?;
    let onset = (1.0 - SEED_REDUCTION) * rod.elastic_limit()?;
    let peak = (0..=2000)
        .map(|i| rod.u_star(i as f64 / 2000.0))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(onset, f64::max);
    let end = 1.02 * peak;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(onset);
    for i in 1..=steps {
        out.push(onset + (end - onset) * i as f64 / steps as f64);
    }
    Ok(out)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

struct Solver<'a> {
    model: &'a FemModel,
    opts: &'a PathOptions,
}

impl Solver<'_> {
    /// Staggered fixed point at end displacement `u_star` starting from the
    /// converged damage `d_prev`. `None` when the iteration cap is hit.
    ///
    /// Every pass is a plain alternation (damage solve, then equilibrium);
    /// the starting damage of the next pass is over-relaxed along the pass
    /// and projected back onto the feasible set.
    /// The step ends when a plain pass changes the state by less than the
    /// tolerance.
    fn step(&self, d_prev: &[f64], u_star: f64) -> Result<Option<(Vec<f64>, Vec<f64>, usize)>> {
        let m = self.model;
        let mut d = d_prev.to_vec();
        let mut u = m.solve_displacement(&d, u_star)?;
        for it in 1..=self.opts.max_staggered {
            let mut g = d.clone();
            m.solve_damage_increment(
                &u,
                d_prev,
                &mut g,
                self.opts.damage_tol,
                self.opts.damage_max_iter,
            )?;
            let u_new = m.solve_displacement(&g, u_star)?;
            let change = max_diff(&g, &d).max(max_diff(&u_new, &u) / max_abs(&u_new).max(1e-300));
            if change < self.opts.staggered_tol {
                return Ok(Some((u_new, g, it)));
            }
            d = self.extrapolate(&d, g, d_prev, u_star)?;
            u = m.solve_displacement(&d, u_star)?;
        }
        Ok(None)
    }

    /// Over-relaxes a pass `d → g` along its direction: the step length is
    /// doubled while the objective at equilibrium keeps decreasing.
    fn extrapolate(&self, d: &[f64], g: Vec<f64>, d_prev: &[f64], u_star: f64) -> Result<Vec<f64>> {
        let m = self.model;
        let ones = vec![1.0; d.len()];
        let mut best = g.clone();
        let mut t = 1.0;
        for _ in 0..12 {
            t *= 2.0;
            let target: Vec<f64> = d.iter().zip(&g).map(|(a, b)| a + t * (b - a)).collect();
            let trial = project_chain(&ones, &target, d_prev, &ones, &m.slopes)?;
            if m.reduced_change(&best, &trial, u_star) < 0.0 {
                best = trial;
            } else {
                break;
            }
        }
        Ok(best)
    }

    fn record(
        &self,
        u_star: f64,
        u: Vec<f64>,
        d: Vec<f64>,
        d_prev: Vec<f64>,
        iterations: usize,
        level: u32,
        work: f64,
    ) -> Result<FemState> {
        let m = self.model;
        let stresses = m.stresses(&u, &d);
        let sigma = stresses.iter().sum::<f64>() / stresses.len() as f64;
        let stress_spread = if sigma == 0.0 {
            0.0
        } else {
            stresses
                .iter()
                .fold(0.0_f64, |a, s| a.max((s - sigma).abs()))
                / sigma.abs()
        };
        let (peak, d_max) =
            d.iter().enumerate().fold(
                (0, 0.0),
                |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
            );
        let band_half_width = if d_max > 0.0 {
            let x = &m.mesh.nodes;
            let n = d.len();
            let mut right = peak;
            while right + 1 < n && d[right] > 0.0 {
                right += 1;
            }
            let mut left = peak;
            while left > 0 && d[left] > 0.0 {
                left -= 1;
            }
            (x[right] - x[peak]).max(x[peak] - x[left])
        } else {
            0.0
        };
        let mult = if self.opts.multipliers {
            Some(recover_multipliers(m, &u, &d, &d_prev)?)
        } else {
            None
        };
        let (lagrange_grad, lagrange_box, lagrange_irrev, kkt_residual) = match mult {
            Some(p) => (p.grad, p.boxed, p.irreversibility, p.residual),
            None => (Vec::new(), Vec::new(), Vec::new(), f64::NAN),
        };
        Ok(FemState {
            load_factor: u_star,
            stored: m.stored_energy(&u, &d),
            dissipation: m.dissipation(&d),
            u,
            d,
            d_prev,
            lagrange_grad,
            lagrange_box,
            lagrange_irrev,
            kkt_residual,
            sigma,
            stress_spread,
            d_max,
            band_half_width,
            work,
            staggered_iterations: iterations,
            bisection_level: level,
        })
    }

    /// Advances from `from` to `u_star`, halving the increment when the
    /// staggered iteration stalls.
    fn advance(
        &self,
        from: &FemState,
        u_star: f64,
        level: u32,
        out: &mut Vec<FemState>,
    ) -> Result<()> {
        let last_level = level >= self.opts.max_bisections;
        match self.step(&from.d, u_star)? {
            Some((u, d, it)) => {
                let sigma_new =
                    self.model.stresses(&u, &d).iter().sum::<f64>() / (d.len() - 1) as f64;
                // both ends move by Δu*
                let work = from.work + (from.sigma + sigma_new) * (u_star - from.load_factor);
                let state = self.record(u_star, u, d, from.d.clone(), it, level, work)?;
                out.push(state);
                return Ok(());
            }
            None if last_level => {
                return Err(GdlError::Convergence(format!(
                    "staggered iteration stalled at u* = {u_star} after {level} bisections"
                )));
            }
            None => {}
        }
        let mid = 0.5 * (from.load_factor + u_star);
        self.advance(from, mid, level + 1, out)?;
        let half = out[out.len() - 1].clone();
        self.advance(&half, u_star, level + 1, out)
    }
}

/// `|ΔW − ΔΨ − ΔD|` between two states, relative to the largest of the
/// three increments.
pub fn energy_mismatch(a: &FemState, b: &FemState) -> f64 {
    let dw = b.work - a.work;
    let ds = b.stored - a.stored;
    let dd = b.dissipation - a.dissipation;
    let scale = dw.abs().max(ds.abs()).max(dd.abs());
    if scale == 0.0 {
        0.0
    } else {
        (dw - ds - dd).abs() / scale
    }
}

/// Runs the load path on `mesh`. The schedule must be increasing and
/// positive; the initial state is undamaged and unloaded.
pub fn run_load_path(
    mesh: &Mesh1D,
    spec: &MaterialSpec,
    variant: ConstitutiveVariant,
    schedule: &[f64],
    opts: &PathOptions,
) -> Result<LoadPath> {
    if schedule.is_empty() || schedule[0] <= 0.0 || !schedule.windows(2).all(|w| w[1] > w[0]) {
        return Err(GdlError::InvalidSpec(
            "the schedule must be positive and strictly increasing".into(),
        ));
    }
    let rod = Rod::new(spec, variant)?;
    let model = FemModel::new(mesh.clone(), rod.law, rod.params.e, rod.params.l_c)?;
    let solver = Solver {
        model: &model,
        opts,
    };
    let n = mesh.n_nodes();
    let zero = vec![0.0; n];
    let mut states = vec![solver.record(0.0, zero.clone(), zero.clone(), zero, 0, 0, 0.0)?];
    for &u_star in schedule {
        let from = states[states.len() - 1].clone();
        solver.advance(&from, u_star, 0, &mut states)?;
    }
    Ok(LoadPath {
        n_elements: mesh.n_elements(),
        states,
    })
}

/// Independent load paths on uniform meshes of `[−L, L]`, one per entry of
/// `elements`, each on the default schedule.
pub fn mesh_study(
    spec: &MaterialSpec,
    variant: ConstitutiveVariant,
    elements: &[usize],
    steps: usize,
    opts: &PathOptions,
    strategy: Strategy,
) -> Result<Vec<LoadPath>> {
    let schedule = default_schedule(spec, variant, steps)?;
    let length = spec.rod_params()?.length;
    strategy.try_map(elements.len(), |i| {
        let mesh = Mesh1D::uniform(length, elements[i])?;
        run_load_path(&mesh, spec, variant, &schedule, opts)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> MaterialSpec {
        MaterialSpec::rod_from_groups(0.4, 0.5, 1.0, 1.0, 1.0)
    }

    #[test]
    fn elastic_path_is_linear_and_undamaged() {
        let mesh = Mesh1D::uniform(1.0, 20).unwrap();
        let path = run_load_path(
            &mesh,
            &spec(),
            ConstitutiveVariant::CASE_I,
            &[0.2, 0.4, 0.6],
            &PathOptions::default(),
        )
        .unwrap();
        for s in &path.states {
            assert!(s.d.iter().all(|&v| v == 0.0));
            assert!((s.sigma - s.load_factor * (1.0 + crate::fem::OMEGA_MIN)).abs() < 1e-14);
        }
        assert!(path.energy_residuals().iter().all(|r| *r < 1e-12));
    }

    #[test]
    fn schedule_starts_at_onset() {
        let s = default_schedule(&spec(), ConstitutiveVariant::CASE_I, 10).unwrap();
        assert_eq!(s.len(), 11);
        assert!((s[0] - 0.999).abs() < 1e-12);
        assert!((s[10] - 1.02 * 1.25).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_schedules() {
        let mesh = Mesh1D::uniform(1.0, 10).unwrap();
        let o = PathOptions::default();
        assert!(run_load_path(&mesh, &spec(), ConstitutiveVariant::CASE_I, &[], &o).is_err());
        assert!(
            run_load_path(&mesh, &spec(), ConstitutiveVariant::CASE_I, &[0.3, 0.2], &o).is_err()
        );
    }
}
