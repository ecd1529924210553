use crate::error::{GdlError, Result};
use crate::fem::mesh::Mesh1D;
use crate::fem::projection::project_chain;
use crate::material::{Constitutive, Degradation};

/// Residual stiffness added to every element.
pub const OMEGA_MIN: f64 = 1e-8;

/// Relative strength reduction applied at the middle of the bar.
pub const SEED_REDUCTION: f64 = 1e-3;

/// Effective stiffness factor of an element whose damage varies linearly
/// between `da` and `db`: the inverse of the mean compliance `⟨1/ω⟩`.
/// Returns the factor and its partial derivatives.
pub fn element_stiffness(deg: Degradation, da: f64, db: f64) -> (f64, f64, f64) {
    let (x, y) = (1.0 - da, 1.0 - db);
    match deg {
        Degradation::Quadratic => (x * y, -y, -x),
        Degradation::Linear => {
            // logarithmic mean of x and y
            let w = if x <= 0.0 || y <= 0.0 {
                0.0
            } else {
                log_mean(x, y)
            };
            let (xf, yf) = (x.max(1e-12), y.max(1e-12));
            let (mut gx, mut gy) = log_mean_gradient(xf, yf);
            // the mean vanishes identically once either end is broken
            if x <= 0.0 {
                gy = 0.0;
            }
            if y <= 0.0 {
                gx = 0.0;
            }
            (w, -gx, -gy)
        }
    }
}

fn log_mean(x: f64, y: f64) -> f64 {
    let m = 0.5 * (x + y);
    let t = (x - y) / (x + y);
    if t.abs() < 1e-4 {
        m * (1.0 - t * t / 3.0)
    } else {
        (x - y) / (x / y).ln()
    }
}

fn log_mean_gradient(x: f64, y: f64) -> (f64, f64) {
    let m = 0.5 * (x + y);
    let delta = x - y;
    if (delta / (x + y)).abs() < 1e-4 {
        (0.5 - delta / (6.0 * m), 0.5 + delta / (6.0 * m))
    } else {
        let ell = (x / y).ln();
        let l = delta / ell;
        ((1.0 - l / x) / ell, (l / y - 1.0) / ell)
    }
}

/// A discretized rod: mesh, material and the per-node dissipation weights.
#[derive(Debug, Clone)]
pub struct FemModel {
    pub mesh: Mesh1D,
    pub law: Constitutive,
    pub e: f64,
    pub l_c: f64,
    /// Lumped nodal length times the local strength factor.
    pub weights: Vec<f64>,
    /// Largest damage jump allowed across each element, `h_e / l_c`.
    pub slopes: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DamageSolve {
    pub iterations: usize,
    pub step: f64,
}

impl FemModel {
    /// Builds the model; the threshold of the middle node(s) is reduced by
    /// `SEED_REDUCTION` in strength, i.e. scaled by `(1 − SEED_REDUCTION)²`.
    pub fn new(mesh: Mesh1D, law: Constitutive, e: f64, l_c: f64) -> Result<Self> {
        if !(e > 0.0 && l_c > 0.0) {
            return Err(GdlError::InvalidSpec("E and l_c must be positive".into()));
        }
        let mut weights = mesh.lumped();
        for i in mesh.middle_nodes() {
            weights[i] *= (1.0 - SEED_REDUCTION).powi(2);
        }
        let slopes = mesh.sizes().iter().map(|h| h / l_c).collect();
        Ok(FemModel {
            mesh,
            law,
            e,
            l_c,
            weights,
            slopes,
        })
    }

    pub fn stiffness_factors(&self, d: &[f64]) -> Vec<f64> {
        d.windows(2)
            .map(|w| element_stiffness(self.law.degradation, w[0], w[1]).0 + OMEGA_MIN)
            .collect()
    }

    pub fn strains(&self, u: &[f64]) -> Vec<f64> {
        u.windows(2)
            .enumerate()
            .map(|(e, w)| (w[1] - w[0]) / self.mesh.h(e))
            .collect()
    }

    pub fn stresses(&self, u: &[f64], d: &[f64]) -> Vec<f64> {
        self.strains(u)
            .iter()
            .zip(self.stiffness_factors(d))
            .map(|(eps, w)| self.e * w * eps)
            .collect()
    }

    /// Equilibrium at frozen damage with `u = ∓u*` at the two ends, by a
    /// tridiagonal (Thomas) solve.
    pub fn solve_displacement(&self, d: &[f64], u_star: f64) -> Result<Vec<f64>> {
        let n = self.mesh.n_nodes();
        let k: Vec<f64> = self
            .stiffness_factors(d)
            .iter()
            .enumerate()
            .map(|(e, w)| self.e * w / self.mesh.h(e))
            .collect();
        let mut u = vec![0.0; n];
        u[0] = -u_star;
        u[n - 1] = u_star;
        if n == 2 {
            return Ok(u);
        }
        // interior unknowns 1..n-1: -k[i-1] u[i-1] + (k[i-1]+k[i]) u[i] - k[i] u[i+1] = 0
        let m = n - 2;
        let mut c_prime = vec![0.0; m];
        let mut d_prime = vec![0.0; m];
        for j in 0..m {
            let i = j + 1;
            let diag = k[i - 1] + k[i];
            let lower = if j > 0 { -k[i - 1] } else { 0.0 };
            let upper = -k[i];
            let mut rhs = 0.0;
            if j == 0 {
                rhs += k[0] * u[0];
            }
            if j == m - 1 {
                rhs += k[n - 2] * u[n - 1];
            }
            let denom = diag - lower * if j > 0 { c_prime[j - 1] } else { 0.0 };
            if !(denom > 0.0) || !denom.is_finite() {
                return Err(GdlError::Singular(format!("zero pivot at node {i}")));
            }
            c_prime[j] = if j < m - 1 { upper / denom } else { 0.0 };
            d_prime[j] = (rhs - lower * if j > 0 { d_prime[j - 1] } else { 0.0 }) / denom;
        }
        u[m] = d_prime[m - 1];
        for j in (0..m - 1).rev() {
            u[j + 1] = d_prime[j] - c_prime[j] * u[j + 2];
        }
        Ok(u)
    }

    /// `Σ h_e / ω_e`: end-to-end compliance per unit `E`.
    fn compliance_terms(&self, d: &[f64]) -> Vec<f64> {
        self.stiffness_factors(d)
            .iter()
            .enumerate()
            .map(|(e, w)| self.mesh.h(e) / w)
            .collect()
    }

    /// Change of the step objective with the displacements at equilibrium,
    /// `Ψ(d) + D(d)`, between damage fields `a` and `b`. The stored energy
    /// at equilibrium is `E (2u*)² / (2 Σ h_e/ω_e)`.
    pub fn reduced_change(&self, a: &[f64], b: &[f64], u_star: f64) -> f64 {
        let (ca, cb) = (self.compliance_terms(a), self.compliance_terms(b));
        let (sa, sb) = (ca.iter().sum::<f64>(), cb.iter().sum::<f64>());
        let diff: f64 = ca.iter().zip(&cb).map(|(x, y)| x - y).sum();
        let stored = 2.0 * self.e * u_star * u_star * diff / (sa * sb);
        let dissipated: f64 = a
            .iter()
            .zip(b)
            .zip(&self.weights)
            .filter(|((x, y), _)| x != y)
            .map(|((x, y), m)| {
                m * (self.law.dissipation_potential(*y) - self.law.dissipation_potential(*x))
            })
            .sum();
        stored + dissipated
    }

    /// Per-element strain-energy coefficients `½ E ε² h`.
    pub fn energy_coefficients(&self, u: &[f64]) -> Vec<f64> {
        self.strains(u)
            .iter()
            .enumerate()
            .map(|(e, eps)| 0.5 * self.e * eps * eps * self.mesh.h(e))
            .collect()
    }

    pub fn stored_energy(&self, u: &[f64], d: &[f64]) -> f64 {
        self.energy_coefficients(u)
            .iter()
            .zip(self.stiffness_factors(d))
            .map(|(c, w)| c * w)
            .sum()
    }

    pub fn dissipation(&self, d: &[f64]) -> f64 {
        d.iter()
            .zip(&self.weights)
            .map(|(di, m)| m * self.law.dissipation_potential(*di))
            .sum()
    }

    /// `f(trial) − f(d)` summed term by term, so that unchanged entries
    /// cancel exactly.
    fn objective_change(&self, c: &[f64], d: &[f64], trial: &[f64]) -> f64 {
        let deg = self.law.degradation;
        let mut delta = 0.0;
        for (e, ce) in c.iter().enumerate() {
            if trial[e] != d[e] || trial[e + 1] != d[e + 1] {
                delta += ce
                    * (element_stiffness(deg, trial[e], trial[e + 1]).0
                        - element_stiffness(deg, d[e], d[e + 1]).0);
            }
        }
        for ((t, x), m) in trial.iter().zip(d).zip(&self.weights) {
            if t != x {
                delta +=
                    m * (self.law.dissipation_potential(*t) - self.law.dissipation_potential(*x));
            }
        }
        delta
    }

    /// Gradient of the incremental damage objective at frozen strains.
    pub fn damage_gradient(&self, c: &[f64], d: &[f64]) -> Vec<f64> {
        let mut g: Vec<f64> = d
            .iter()
            .zip(&self.weights)
            .map(|(di, m)| m * self.law.y_c(*di))
            .collect();
        for (e, ce) in c.iter().enumerate() {
            let (_, ga, gb) = element_stiffness(self.law.degradation, d[e], d[e + 1]);
            g[e] += ce * ga;
            g[e + 1] += ce * gb;
        }
        g
    }

    fn metric(&self, c: &[f64], d: &[f64]) -> Vec<f64> {
        let curvature = self.law.omega_second(0.0).max(1.0);
        let mut a: Vec<f64> = d
            .iter()
            .zip(&self.weights)
            .map(|(di, m)| m * (self.law.y_c_prime(*di).max(0.0) + 1e-3 * self.law.y_c(0.0)))
            .collect();
        for (e, ce) in c.iter().enumerate() {
            a[e] += 0.5 * curvature * ce;
            a[e + 1] += 0.5 * curvature * ce;
        }
        a
    }

    /// Minimizes the incremental damage objective at frozen displacements
    /// over `d_prev ≤ d ≤ 1`, `|d_{i+1} − d_i| ≤ h_e/l_c`, starting from
    /// `d` (which must be feasible). Projected Newton-type iteration with a
    /// diagonal metric, exact projection and Armijo backtracking.
    pub fn solve_damage_increment(
        &self,
        u: &[f64],
        d_prev: &[f64],
        d: &mut [f64],
        tol: f64,
        max_iter: usize,
    ) -> Result<DamageSolve> {
        let c = self.energy_coefficients(u);
        let upper = vec![1.0; d.len()];
        let mut last_step = f64::INFINITY;
        let mut trial = vec![0.0; d.len()];
        for it in 0..max_iter {
            let g = self.damage_gradient(&c, d);
            let a = self.metric(&c, d);
            let target: Vec<f64> = d
                .iter()
                .zip(&g)
                .zip(&a)
                .map(|((x, g), a)| x - g / a)
                .collect();
            let p = project_chain(&a, &target, d_prev, &upper, &self.slopes)?;
            let dir: Vec<f64> = p.iter().zip(d.iter()).map(|(p, x)| p - x).collect();
            let step = dir.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if step <= tol {
                return Ok(DamageSolve {
                    iterations: it,
                    step,
                });
            }
            let slope: f64 = g.iter().zip(&dir).map(|(g, v)| g * v).sum();
            // below this the change of the objective is not resolvable
            let noise: f64 = 1e-13 * g.iter().zip(&dir).map(|(g, v)| (g * v).abs()).sum::<f64>()
                + 1e-15 * c.iter().sum::<f64>();
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                for i in 0..d.len() {
                    trial[i] = if t == 1.0 { p[i] } else { d[i] + t * dir[i] };
                }
                let change = self.objective_change(&c, d, &trial);
                if change <= 1e-4 * t * slope || (t == 1.0 && -slope <= noise && change <= noise) {
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                return Err(GdlError::Solver(format!(
                    "line search failed (step {step:e}, slope {slope:e})"
                )));
            }
            d.copy_from_slice(&trial);
            last_step = step;
        }
        Err(GdlError::Solver(format!(
            "damage subproblem not converged after {max_iter} iterations (last step {last_step:e})"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::{ConstitutiveVariant, MaterialSpec};

    fn model(n: usize) -> FemModel {
        let spec = MaterialSpec::rod_from_groups(0.4, 0.5, 1.0, 1.0, 1.0);
        let law = Constitutive::resolve(ConstitutiveVariant::CASE_I, &spec).unwrap();
        FemModel::new(Mesh1D::uniform(1.0, n).unwrap(), law, 1.0, 0.5).unwrap()
    }

    #[test]
    fn element_stiffness_is_mean_compliance_inverse() {
        for deg in [Degradation::Quadratic, Degradation::Linear] {
            for &(a, b) in &[(0.1, 0.3), (0.5, 0.52), (0.7, 0.7), (0.0, 0.9)] {
                let n = 20000;
                let mean: f64 = (0..n)
                    .map(|k| {
                        let s = (k as f64 + 0.5) / n as f64;
                        1.0 / deg.value(a + (b - a) * s)
                    })
                    .sum::<f64>()
                    / n as f64;
                let (w, _, _) = element_stiffness(deg, a, b);
                assert!((w * mean - 1.0).abs() < 1e-6, "{deg:?} {a} {b}");
            }
            assert_eq!(element_stiffness(deg, 1.0, 0.9).0, 0.0);
        }
    }

    #[test]
    fn element_stiffness_gradient() {
        for deg in [Degradation::Quadratic, Degradation::Linear] {
            for &(a, b) in &[(0.1, 0.3), (0.5, 0.50001), (0.2, 0.2), (0.9, 0.95)] {
                let h = 1e-7;
                let (_, ga, gb) = element_stiffness(deg, a, b);
                let fa = (element_stiffness(deg, a + h, b).0 - element_stiffness(deg, a - h, b).0)
                    / (2.0 * h);
                let fb = (element_stiffness(deg, a, b + h).0 - element_stiffness(deg, a, b - h).0)
                    / (2.0 * h);
                assert!(
                    (ga - fa).abs() < 1e-6 && (gb - fb).abs() < 1e-6,
                    "{deg:?} {a} {b}"
                );
            }
        }
    }

    #[test]
    fn elastic_displacement_is_linear() {
        let m = model(10);
        let d = vec![0.0; 11];
        let u = m.solve_displacement(&d, 0.3).unwrap();
        for (x, ui) in m.mesh.nodes.iter().zip(&u) {
            assert!((ui - 0.3 * x).abs() < 1e-14);
        }
        for s in m.stresses(&u, &d) {
            assert!((s - 0.3 * (1.0 + OMEGA_MIN)).abs() < 1e-14);
        }
    }

    #[test]
    fn softened_element_carries_more_strain() {
        let m = model(10);
        // uniform damage 0.5 on element 4 only: stiffness factor 0.25
        let mut d = vec![0.0; 11];
        d[4] = 0.5;
        d[5] = 0.5;
        let u = m.solve_displacement(&d, 0.2).unwrap();
        let eps = m.strains(&u);
        let sig = m.stresses(&u, &d);
        assert!((eps[4] / eps[0] - (1.0 + OMEGA_MIN) / (0.25 + OMEGA_MIN)).abs() < 1e-9);
        let mean = sig.iter().sum::<f64>() / sig.len() as f64;
        assert!(sig.iter().all(|s| (s - mean).abs() < 1e-12 * mean));
    }

    #[test]
    fn no_growth_below_threshold() {
        let m = model(20);
        let d_prev = vec![0.0; 21];
        let u = m.solve_displacement(&d_prev, 0.9).unwrap();
        let mut d = d_prev.clone();
        m.solve_damage_increment(&u, &d_prev, &mut d, 1e-14, 100)
            .unwrap();
        assert!(d.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn fully_damaged_node_stays_broken() {
        let m = model(20);
        let mut d_prev = vec![0.0; 21];
        for (i, v) in d_prev.iter_mut().enumerate() {
            *v = (1.0 - (i as f64 - 10.0).abs() * 0.1 / 0.5).max(0.0);
        }
        let u = m.solve_displacement(&d_prev, 0.01).unwrap();
        let mut d = d_prev.clone();
        m.solve_damage_increment(&u, &d_prev, &mut d, 1e-14, 100)
            .unwrap();
        assert_eq!(d[10], 1.0);
        assert!(d.iter().zip(&d_prev).all(|(a, b)| a >= b));
    }

    #[test]
    fn overload_spreads_damage_at_the_bound() {
        let m = model(40);
        let d_prev = vec![0.0; 41];
        // strain 4 in the two middle elements, 0.5 elsewhere
        let mut u = vec![0.0; 41];
        for i in 1..41 {
            let eps = if i == 20 || i == 21 { 4.0 } else { 0.5 };
            u[i] = u[i - 1] + eps * m.mesh.h(i - 1);
        }
        let mut d = d_prev.clone();
        m.solve_damage_increment(&u, &d_prev, &mut d, 1e-13, 500)
            .unwrap();
        let peak = d[20];
        assert!(peak > 0.0);
        // the gradient bound binds on the damaged support
        for e in 0..40 {
            if d[e] > 0.0 && d[e + 1] > 0.0 {
                assert!(((d[e + 1] - d[e]).abs() - m.slopes[e]).abs() < 1e-10);
            }
        }
    }
}
