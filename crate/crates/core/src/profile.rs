use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Damage,
    Gamma2,
    #[serde(rename = "Y")]
    DrivingForce,
    #[serde(rename = "Yc")]
    Threshold,
    Traction,
}

impl FieldKind {
    pub fn column(self) -> &'static str {
        match self {
            FieldKind::Damage => "d",
            FieldKind::Gamma2 => "gamma2",
            FieldKind::DrivingForce => "Y",
            FieldKind::Threshold => "Yc",
            FieldKind::Traction => "traction",
        }
    }
}

/// A field sampled along the bar or the interface.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldProfile {
    pub kind: FieldKind,
    /// Value of the driving parameter (d_m, l_m or c) of the sampled state.
    pub parameter: f64,
    pub x: Vec<f64>,
    pub values: Vec<f64>,
}

impl FieldProfile {
    pub fn from_fn(kind: FieldKind, parameter: f64, x: Vec<f64>, f: impl Fn(f64) -> f64) -> Self {
        let values = x.iter().map(|&xi| f(xi)).collect();
        FieldProfile {
            kind,
            parameter,
            x,
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_well_formed(&self) -> bool {
        self.x.len() == self.values.len()
            && self.x.windows(2).all(|w| w[1] > w[0])
            && self.values.iter().all(|v| v.is_finite())
    }

    /// Mirrors a half-domain profile on `[0, L]` onto `[-L, L]`.
    pub fn mirrored(&self) -> Self {
        let skip = usize::from(self.x.first() == Some(&0.0));
        let mut x: Vec<f64> = self.x.iter().skip(skip).rev().map(|v| -v).collect();
        let mut values: Vec<f64> = self.values.iter().skip(skip).rev().copied().collect();
        x.extend_from_slice(&self.x);
        values.extend_from_slice(&self.values);
        FieldProfile {
            kind: self.kind,
            parameter: self.parameter,
            x,
            values,
        }
    }
}

/// `n` uniform samples on `[a, b]` merged with the breakpoints that fall
/// strictly inside. Points closer than a relative 1e-12 are merged.
pub fn grid(a: f64, b: f64, n: usize, breakpoints: &[f64]) -> Vec<f64> {
    let n = n.max(2);
    let mut pts: Vec<f64> = (0..n)
        .map(|i| {
            if i == n - 1 {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect();
    pts.extend(breakpoints.iter().copied().filter(|&p| p > a && p < b));
    pts.sort_by(f64::total_cmp);
    let merge = 1e-12 * (b - a).abs().max(f64::MIN_POSITIVE);
    let mut out: Vec<f64> = Vec::with_capacity(pts.len());
    for p in pts {
        match out.last_mut() {
            Some(last) if p - *last <= merge => {
                // keep exact breakpoints over nearby uniform samples
                if breakpoints.contains(&p) {
                    *last = p;
                }
            }
            _ => out.push(p),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_contains_breakpoints_exactly() {
        let g = grid(0.0, 2.0, 11, &[0.3333, 1.0, 5.0]);
        assert!(g.contains(&0.3333));
        assert!(g.contains(&1.0));
        assert_eq!(g.first(), Some(&0.0));
        assert_eq!(g.last(), Some(&2.0));
        assert_eq!(g.len(), 12);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn mirroring_is_symmetric() {
        let p = FieldProfile::from_fn(FieldKind::Damage, 0.5, grid(0.0, 1.0, 5, &[]), |x| 1.0 - x);
        let m = p.mirrored();
        assert_eq!(m.len(), 9);
        assert!(m.is_well_formed());
        assert_eq!(m.values[0], m.values[8]);
        assert_eq!(m.x[0], -1.0);
    }
}
