//! Recovery of the discrete Lagrange multipliers at a converged damage
//! state. Stationarity at node `i` reads
//!
//! ```text
//! g_i + β_i − μ_i + η_{i−1} − η_i = 0
//! ```
//!
//! with `β ≥ 0` on the bound `d ≤ 1`, `μ ≥ 0` on irreversibility and `η_e`
//! the flux of the gradient bound across element `e`, which must point
//! along the active slope. Along a chain this is a flow problem: the flux
//! after node `i` is `η_{i−1} + g_i + s_i` with the nodal slack
//! `s_i = β_i − μ_i` restricted by which bounds are active. A forward sweep
//! collects the reachable flux intervals and a backward sweep picks the
//! smallest slack that closes the flow at the end of each run.

use crate::error::Result;
use crate::fem::model::FemModel;

/// Activity tolerance on the slope bound, relative to the bound.
const ACTIVE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Multipliers {
    /// Per element: multiplier of the gradient bound.
    pub grad: Vec<f64>,
    /// Per node: multiplier of `d ≤ 1`.
    pub boxed: Vec<f64>,
    /// Per node: multiplier of `d ≥ d_prev`.
    pub irreversibility: Vec<f64>,
    /// Largest stationarity residual, relative to `max_i m_i Y_c(0)`.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy)]
struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    const POINT_ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };

    fn shift(self, by: f64, slack: Interval) -> Interval {
        Interval {
            lo: self.lo + by + slack.lo,
            hi: self.hi + by + slack.hi,
        }
    }

    fn meet(self, other: Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    fn nearest(self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    /// Point of `self` closest to `other` (which it does not meet).
    fn towards(self, other: Interval) -> f64 {
        if self.hi < other.lo {
            self.hi
        } else {
            self.lo
        }
    }
}

/// Admissible nodal slack `β − μ` for the active bounds.
fn slack_set(at_box: bool, at_prev: bool) -> Interval {
    Interval {
        lo: if at_prev { f64::NEG_INFINITY } else { 0.0 },
        hi: if at_box { f64::INFINITY } else { 0.0 },
    }
}

fn cone(sign: f64) -> Interval {
    if sign > 0.0 {
        Interval {
            lo: 0.0,
            hi: f64::INFINITY,
        }
    } else if sign < 0.0 {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: 0.0,
        }
    } else {
        Interval::POINT_ZERO
    }
}

pub fn recover_multipliers(
    model: &FemModel,
    u: &[f64],
    d: &[f64],
    d_prev: &[f64],
) -> Result<Multipliers> {
    let n = d.len();
    let c = model.energy_coefficients(u);
    let g = model.damage_gradient(&c, d);
    let y0 = model.law.y_c(0.0);
    let scale = model.weights.iter().fold(0.0_f64, |m, w| m.max(w * y0));
    let slack: Vec<Interval> = d
        .iter()
        .zip(d_prev)
        .map(|(&v, &p)| slack_set(v >= 1.0 - 1e-12, v <= p + 1e-12))
        .collect();
    // direction of each active slope: +1 increasing, −1 decreasing, 0 inactive
    let sign: Vec<f64> = (0..n - 1)
        .map(|e| {
            let jump = d[e + 1] - d[e];
            if jump != 0.0 && jump.abs() >= model.slopes[e] * (1.0 - ACTIVE_TOL) {
                jump.signum()
            } else {
                0.0
            }
        })
        .collect();

    // forward: reachable flux after each node (the flux leaving the last
    // node of the chain must vanish)
    let mut reach = Vec::with_capacity(n);
    let mut incoming = Interval::POINT_ZERO;
    for i in 0..n {
        let out_cone = if i + 1 < n {
            cone(sign[i])
        } else {
            Interval::POINT_ZERO
        };
        let raw = incoming.shift(g[i], slack[i]);
        let r = raw.meet(out_cone).unwrap_or_else(|| {
            let x = raw.towards(out_cone);
            let x = out_cone.nearest(x);
            Interval { lo: x, hi: x }
        });
        reach.push(r);
        incoming = r;
    }

    // backward: pick fluxes with the smallest nodal slack
    let mut eta = vec![0.0; n];
    let mut next = reach[n - 1].nearest(0.0);
    for i in (0..n).rev() {
        eta[i] = next;
        let before = if i == 0 {
            Interval::POINT_ZERO
        } else {
            reach[i - 1]
        };
        // η_{i−1} ∈ η_i − g_i − S_i
        let wanted = Interval {
            lo: eta[i] - g[i] - slack[i].hi,
            hi: eta[i] - g[i] - slack[i].lo,
        };
        next = match before.meet(wanted) {
            Some(both) => both.nearest(eta[i] - g[i]),
            None => before.towards(wanted),
        };
    }

    let mut out = Multipliers {
        grad: vec![0.0; n - 1],
        boxed: vec![0.0; n],
        irreversibility: vec![0.0; n],
        residual: 0.0,
    };
    for i in 0..n {
        let inflow = if i == 0 { 0.0 } else { eta[i - 1] };
        let s = slack[i].nearest(eta[i] - inflow - g[i]);
        out.boxed[i] = s.max(0.0);
        out.irreversibility[i] = (-s).max(0.0);
        if i + 1 < n {
            out.grad[i] = (sign[i] * eta[i]).max(0.0);
        }
    }
    for i in 0..n {
        let inflow = if i == 0 {
            0.0
        } else {
            sign[i - 1] * out.grad[i - 1]
        };
        let outflow = if i + 1 < n {
            sign[i] * out.grad[i]
        } else {
            0.0
        };
        let r = g[i] + out.boxed[i] - out.irreversibility[i] + inflow - outflow;
        out.residual = out.residual.max(r.abs() / scale);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::Mesh1D;
    use crate::material::{Constitutive, ConstitutiveVariant, MaterialSpec};

    fn model(n: usize) -> FemModel {
        let spec = MaterialSpec::rod_from_groups(0.4, 0.5, 1.0, 1.0, 1.0);
        let law = Constitutive::resolve(ConstitutiveVariant::CASE_I, &spec).unwrap();
        FemModel::new(Mesh1D::uniform(1.0, n).unwrap(), law, 1.0, 0.5).unwrap()
    }

    #[test]
    fn undamaged_elastic_state_has_only_irreversibility() {
        let m = model(10);
        let d = vec![0.0; 11];
        let u = m.solve_displacement(&d, 0.5).unwrap();
        let p = recover_multipliers(&m, &u, &d, &d).unwrap();
        assert!(p.residual < 1e-14);
        assert!(p.grad.iter().all(|&v| v == 0.0));
        assert!(p.boxed.iter().all(|&v| v == 0.0));
        assert!(p.irreversibility.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn converged_increment_satisfies_stationarity() {
        let m = model(40);
        let d_prev = vec![0.0; 41];
        let mut u = vec![0.0; 41];
        for i in 1..41 {
            let eps = if i == 20 || i == 21 { 4.0 } else { 0.5 };
            u[i] = u[i - 1] + eps * m.mesh.h(i - 1);
        }
        let mut d = d_prev.clone();
        m.solve_damage_increment(&u, &d_prev, &mut d, 1e-13, 2000)
            .unwrap();
        let p = recover_multipliers(&m, &u, &d, &d_prev).unwrap();
        assert!(p.residual < 1e-8, "{}", p.residual);
        assert!(p.grad.iter().any(|&v| v > 0.0));
        for (e, v) in p.grad.iter().enumerate() {
            let active = ((d[e + 1] - d[e]).abs() - m.slopes[e]).abs() < 1e-9;
            assert!(*v >= 0.0 && (active || *v == 0.0));
        }
    }

    #[test]
    fn box_multiplier_lives_on_broken_nodes() {
        let m = model(20);
        let d: Vec<f64> = (0..21)
            .map(|i| (1.0 - (i as f64 - 10.0).abs() * 0.2).max(0.0))
            .collect();
        let u = m.solve_displacement(&d, 0.3).unwrap();
        let p = recover_multipliers(&m, &u, &d, &d).unwrap();
        assert!(p.residual < 1e-10, "{}", p.residual);
        assert!(p
            .boxed
            .iter()
            .enumerate()
            .all(|(i, &b)| i == 10 || b == 0.0));
    }
}
