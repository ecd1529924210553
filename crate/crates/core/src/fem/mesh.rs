use crate::error::{GdlError, Result};

/// Nodes of a 1D mesh; element `e` joins nodes `e` and `e + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    pub nodes: Vec<f64>,
}

impl Mesh1D {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(GdlError::InvalidSpec(
                "a mesh needs at least 2 nodes".into(),
            ));
        }
        if !nodes.windows(2).all(|w| w[1] > w[0]) || !nodes.iter().all(|x| x.is_finite()) {
            return Err(GdlError::InvalidSpec(
                "mesh nodes must be finite and strictly increasing".into(),
            ));
        }
        Ok(Mesh1D { nodes })
    }

    /// Uniform mesh of the full bar `[−L, L]`.
    pub fn uniform(half_length: f64, n_elements: usize) -> Result<Self> {
        if n_elements == 0 || !(half_length > 0.0) {
            return Err(GdlError::InvalidSpec(format!(
                "uniform mesh needs elements > 0 and L > 0 (got {n_elements}, {half_length})"
            )));
        }
        let h = 2.0 * half_length / n_elements as f64;
        let nodes = (0..=n_elements)
            .map(|i| {
                if i == n_elements {
                    half_length
                } else if 2 * i == n_elements {
                    0.0
                } else {
                    -half_length + h * i as f64
                }
            })
            .collect();
        Self::new(nodes)
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn h(&self, e: usize) -> f64 {
        self.nodes[e + 1] - self.nodes[e]
    }

    pub fn sizes(&self) -> Vec<f64> {
        self.nodes.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn length(&self) -> f64 {
        self.nodes[self.nodes.len() - 1] - self.nodes[0]
    }

    /// Lumped nodal lengths: half of each adjacent element.
    pub fn lumped(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.n_nodes()];
        for (e, h) in self.sizes().into_iter().enumerate() {
            m[e] += 0.5 * h;
            m[e + 1] += 0.5 * h;
        }
        m
    }

    /// Nodes closest to the midpoint of the mesh (two when it falls inside
    /// an element, one otherwise).
    pub fn middle_nodes(&self) -> Vec<usize> {
        let mid = 0.5 * (self.nodes[0] + self.nodes[self.n_nodes() - 1]);
        let best = self
            .nodes
            .iter()
            .map(|x| (x - mid).abs())
            .fold(f64::INFINITY, f64::min);
        let tol = 1e-12 * self.length();
        (0..self.n_nodes())
            .filter(|&i| (self.nodes[i] - mid).abs() <= best + tol)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_mesh() {
        let m = Mesh1D::uniform(1.0, 4).unwrap();
        assert_eq!(m.nodes, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(m.lumped(), vec![0.25, 0.5, 0.5, 0.5, 0.25]);
        assert_eq!(m.middle_nodes(), vec![2]);
        assert_eq!(Mesh1D::uniform(1.0, 3).unwrap().middle_nodes(), vec![1, 2]);
    }

    #[test]
    fn invalid_meshes() {
        assert!(Mesh1D::new(vec![0.0]).is_err());
        assert!(Mesh1D::new(vec![0.0, 0.0]).is_err());
        assert!(Mesh1D::uniform(1.0, 0).is_err());
    }
}
