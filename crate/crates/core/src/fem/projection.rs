//! Weighted projection onto a chain polyhedron
//!
//! ```text
//! min Σ ½ a_i (x_i − t_i)²   s.t.  lo_i ≤ x_i ≤ hi_i,  |x_{i+1} − x_i| ≤ s_i
//! ```
//!
//! solved exactly by dynamic programming on the derivative of the cost-to-go,
//! which stays convex and piecewise quadratic.

use crate::error::{GdlError, Result};

#[derive(Debug, Clone, Copy)]
struct Seg {
    x0: f64,
    x1: f64,
    v0: f64,
    v1: f64,
}

impl Seg {
    fn at(&self, x: f64) -> f64 {
        if self.x1 == self.x0 {
            return self.v0;
        }
        self.v0 + (self.v1 - self.v0) * (x - self.x0) / (self.x1 - self.x0)
    }
}

/// Non-decreasing piecewise-linear derivative on `[lo, hi]`.
#[derive(Debug, Clone)]
struct Message {
    lo: f64,
    hi: f64,
    segs: Vec<Seg>,
}

impl Message {
    fn argmin(&self) -> f64 {
        let Some(first) = self.segs.first() else {
            return self.lo;
        };
        if first.v0 >= 0.0 {
            return self.lo;
        }
        for s in &self.segs {
            if s.v0 >= 0.0 {
                return s.x0;
            }
            if s.v1 >= 0.0 {
                if s.v1 == s.v0 {
                    return s.x0;
                }
                let x = s.x0 + (s.x1 - s.x0) * (-s.v0) / (s.v1 - s.v0);
                return x.clamp(s.x0, s.x1);
            }
        }
        self.hi
    }

    /// Cost-to-go of the next variable: `min F(x)` over `|x − y| ≤ s`.
    fn window(&self, s: f64, m: f64) -> Message {
        let mut segs = Vec::with_capacity(self.segs.len() + 2);
        for g in &self.segs {
            if g.x0 < m {
                let x1 = g.x1.min(m);
                segs.push(Seg {
                    x0: g.x0 - s,
                    x1: x1 - s,
                    v0: g.v0,
                    v1: g.at(x1),
                });
            }
        }
        if s > 0.0 {
            segs.push(Seg {
                x0: m - s,
                x1: m + s,
                v0: 0.0,
                v1: 0.0,
            });
        }
        for g in &self.segs {
            if g.x1 > m {
                let x0 = g.x0.max(m);
                segs.push(Seg {
                    x0: x0 + s,
                    x1: g.x1 + s,
                    v0: g.at(x0),
                    v1: g.v1,
                });
            }
        }
        segs.retain(|g| g.x1 > g.x0);
        Message {
            lo: self.lo - s,
            hi: self.hi + s,
            segs,
        }
    }

    fn add_quadratic(&mut self, a: f64, t: f64) {
        for g in &mut self.segs {
            g.v0 += a * (g.x0 - t);
            g.v1 += a * (g.x1 - t);
        }
    }

    fn restrict(&mut self, lo: f64, hi: f64) -> bool {
        let (lo, hi) = (lo.max(self.lo), hi.min(self.hi));
        if lo > hi {
            return false;
        }
        self.lo = lo;
        self.hi = hi;
        let mut out = Vec::with_capacity(self.segs.len());
        for g in &self.segs {
            if g.x1 <= lo || g.x0 >= hi {
                continue;
            }
            let x0 = g.x0.max(lo);
            let x1 = g.x1.min(hi);
            out.push(Seg {
                x0,
                x1,
                v0: g.at(x0),
                v1: g.at(x1),
            });
        }
        self.segs = out;
        true
    }
}

/// Exact weighted projection. `a`, `t`, `lo`, `hi` have one entry per node
/// and `s` one per edge. Requires `a_i > 0` and a non-empty feasible set.
pub fn project_chain(a: &[f64], t: &[f64], lo: &[f64], hi: &[f64], s: &[f64]) -> Result<Vec<f64>> {
    let n = a.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    debug_assert!(t.len() == n && lo.len() == n && hi.len() == n && s.len() + 1 == n);
    let mut minima = Vec::with_capacity(n);
    let mut bounds = Vec::with_capacity(n);
    let mut msg = Message {
        lo: lo[0],
        hi: hi[0],
        segs: Vec::new(),
    };
    if lo[0] > hi[0] {
        return Err(GdlError::Solver("empty box at node 0".into()));
    }
    if hi[0] > lo[0] {
        msg.segs.push(Seg {
            x0: lo[0],
            x1: hi[0],
            v0: 0.0,
            v1: 0.0,
        });
    }
    msg.add_quadratic(a[0], t[0]);
    minima.push(msg.argmin());
    bounds.push((msg.lo, msg.hi));
    for i in 1..n {
        let m = minima[i - 1];
        msg = msg.window(s[i - 1], m);
        if msg.segs.is_empty() {
            // single-point predecessor with zero window
            msg.segs.push(Seg {
                x0: msg.lo,
                x1: msg.hi,
                v0: 0.0,
                v1: 0.0,
            });
            msg.segs.retain(|g| g.x1 > g.x0);
        }
        msg.add_quadratic(a[i], t[i]);
        if !msg.restrict(lo[i], hi[i]) {
            return Err(GdlError::Solver(format!(
                "chain constraints infeasible at node {i}"
            )));
        }
        minima.push(msg.argmin());
        bounds.push((msg.lo, msg.hi));
    }
    let mut x = vec![0.0; n];
    x[n - 1] = minima[n - 1];
    for i in (0..n - 1).rev() {
        let (dlo, dhi) = bounds[i];
        let lo_w = (x[i + 1] - s[i]).max(dlo);
        let hi_w = (x[i + 1] + s[i]).min(dhi);
        x[i] = minima[i].clamp(lo_w.min(hi_w), hi_w.max(lo_w));
    }
    Ok(x)
}
