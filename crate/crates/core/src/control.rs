//! Move-to-centroid feedback law and the locational cost it descends.

use crate::error::{Error, Result};
use crate::geometry::ConvexPolygon;
use crate::linalg::Vec2;
use crate::quadrature::{for_each_node, CellMoments, TriangleRule};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gains {
    /// Proportional gain (1/s).
    pub k0: f64,
    /// Gain on the normalized second moment (1/(m⁴·s)).
    pub k1: f64,
    /// Optional speed limit (m/s).
    pub u_max: Option<f64>,
}

impl Default for Gains {
    fn default() -> Self {
        Gains {
            k0: 1.0,
            k1: 0.01,
            u_max: None,
        }
    }
}

impl Gains {
    pub fn validate(&self) -> Result<()> {
        if !(self.k0 >= 0.0 && self.k1 >= 0.0 && self.k0 + self.k1 > 0.0)
            || !(self.k0.is_finite() && self.k1.is_finite())
        {
            return Err(Error::InvalidInput(format!(
                "gains k0 = {}, k1 = {} must be non-negative with a positive sum",
                self.k0, self.k1
            )));
        }
        if let Some(u) = self.u_max {
            if !(u > 0.0 && u.is_finite()) {
                return Err(Error::InvalidInput(format!("u_max = {u} must be positive")));
            }
        }
        Ok(())
    }

    /// Scalar gain multiplying `(C − p)` for a cell with these moments.
    pub fn feedback_gain(&self, moments: &CellMoments) -> Result<f64> {
        if !(moments.mass > 0.0) {
            return Err(Error::Domain(format!(
                "cell mass {} must be positive",
                moments.mass
            )));
        }
        Ok(self.k0 + self.k1 / moments.mass * moments.geometric_second_moment)
    }
}

/// `u = −(k0 + k1/M ∫‖q − p‖² dΩ)(p − C)`, then clamped to `u_max`.
pub fn control_input(p_i: Vec2, moments: &CellMoments, gains: &Gains) -> Result<Vec2> {
    let gain = gains.feedback_gain(moments)?;
    let u = (moments.centroid - p_i) * gain;
    Ok(match gains.u_max {
        Some(limit) if u.norm() > limit => u * (limit / u.norm()),
        _ => u,
    })
}

/// `∂H/∂p_i = 2 M (p_i − C_i)` with the cells held fixed.
pub fn cost_gradient(p_i: Vec2, moments: &CellMoments) -> Vec2 {
    (p_i - moments.centroid) * (2.0 * moments.mass)
}

/// `∫_cell ‖q − p‖² φ(q) dΩ` for one agent.
pub fn cell_cost(
    p_i: Vec2,
    cell: &ConvexPolygon,
    density: &impl Fn(Vec2) -> f64,
    rule: &TriangleRule,
) -> Result<f64> {
    let mut sum = 0.0;
    for_each_node(cell, rule, |q, w| {
        sum += w * (q - p_i).norm_sq() * density(q)
    })?;
    Ok(sum)
}

/// `H = Σ_i ∫_{A_i} ‖q − p_i‖² φ(q, t) dΩ`, summed in agent order.
pub fn locational_cost(
    positions: &[Vec2],
    cells: &[ConvexPolygon],
    density: &impl Fn(Vec2) -> f64,
    rule: &TriangleRule,
) -> Result<f64> {
    if positions.len() != cells.len() {
        return Err(Error::InvalidInput(format!(
            "{} positions but {} cells",
            positions.len(),
            cells.len()
        )));
    }
    positions
        .iter()
        .zip(cells)
        .map(|(&p, c)| cell_cost(p, c, density, rule))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use crate::quadrature::cell_moments;

    fn moments(mass: f64, centroid: Vec2, second: f64) -> CellMoments {
        CellMoments {
            mass,
            centroid,
            geometric_second_moment: second,
            cost: 0.0,
        }
    }

    #[test]
    fn control_examples() {
        let g = Gains::default();
        let c = Vec2::new(1.0, 2.0);
        assert_eq!(
            control_input(c, &moments(1.0, c, 3.0), &g).unwrap(),
            Vec2::ZERO
        );

        let g = Gains {
            k0: 1.0,
            k1: 0.0,
            u_max: None,
        };
        let u = control_input(Vec2::new(2.0, 0.0), &moments(1.0, Vec2::ZERO, 5.0), &g).unwrap();
        assert_eq!(u, Vec2::new(-2.0, 0.0));

        let g = Gains {
            k0: 0.0,
            k1: 1.0,
            u_max: None,
        };
        let u = control_input(Vec2::new(1.0, 1.0), &moments(2.0, Vec2::ZERO, 4.0), &g).unwrap();
        assert_eq!(u, Vec2::new(-2.0, -2.0));
    }

    #[test]
    fn control_saturates() {
        let g = Gains {
            k0: 1.0,
            k1: 0.0,
            u_max: Some(0.5),
        };
        let u = control_input(Vec2::new(3.0, 4.0), &moments(1.0, Vec2::ZERO, 1.0), &g).unwrap();
        assert!((u.norm() - 0.5).abs() < 1e-15);
        assert!((u + Vec2::new(0.3, 0.4)).norm() < 1e-15);
    }

    #[test]
    fn control_rejects_zero_mass() {
        let g = Gains::default();
        assert!(control_input(Vec2::ZERO, &moments(0.0, Vec2::ZERO, 1.0), &g).is_err());
    }

    #[test]
    fn gradient_examples() {
        let c = Vec2::new(0.3, 0.3);
        assert_eq!(cost_gradient(c, &moments(2.0, c, 1.0)), Vec2::ZERO);
        let g = cost_gradient(Vec2::new(1.0, -2.0), &moments(3.0, Vec2::ZERO, 1.0));
        assert_eq!(g, Vec2::new(6.0, -12.0));
    }

    #[test]
    fn cost_of_uniform_unit_square() {
        let rule = TriangleRule::for_order(8).unwrap();
        let cell = Rect::new(0.0, 1.0, 0.0, 1.0).unwrap().to_polygon();
        let h = locational_cost(&[Vec2::new(0.5, 0.5)], &[cell], &|_| 1.0, &rule).unwrap();
        assert!((h - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn moving_off_centroid_increases_cost() {
        let rule = TriangleRule::for_order(8).unwrap();
        let cell = Rect::new(-3.0, 3.0, -2.0, 2.0).unwrap().to_polygon();
        let phi = |q: Vec2| (-0.5 * (q - Vec2::new(0.4, -0.2)).norm_sq()).exp();
        let m = cell_moments(&cell, Vec2::ZERO, &phi, &rule).unwrap();
        let at_c = cell_cost(m.centroid, &cell, &phi, &rule).unwrap();
        assert!(at_c > 0.0);
        for d in [
            Vec2::new(0.1, 0.0),
            Vec2::new(-0.3, 0.2),
            Vec2::new(0.0, 1.0),
        ] {
            let off = cell_cost(m.centroid + d, &cell, &phi, &rule).unwrap();
            // Parallel-axis: H(C + d) = H(C) + M‖d‖².
            assert!((off - at_c - m.mass * d.norm_sq()).abs() < 1e-12);
        }
    }

    #[test]
    fn control_is_translation_invariant() {
        let g = Gains::default();
        let m = moments(0.7, Vec2::new(1.0, 2.0), 4.0);
        let shift = Vec2::new(-13.0, 7.5);
        let p = Vec2::new(2.5, 0.5);
        let shifted = CellMoments {
            centroid: m.centroid + shift,
            ..m
        };
        let a = control_input(p, &m, &g).unwrap();
        let b = control_input(p + shift, &shifted, &g).unwrap();
        assert!((a - b).norm() < 1e-12);
    }
}
