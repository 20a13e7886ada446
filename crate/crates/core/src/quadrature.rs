//! Integration over convex polygons and over the domain grid.
//!
//! Polygons are fan-triangulated from vertex 0 and each triangle uses a
//! fully symmetric rule. Domain integrals use a cell-centered midpoint grid.

// Rule tables keep every published digit.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{ConvexPolygon, Rect};
use crate::linalg::Vec2;

/// Cells whose density integral falls below this are rejected.
pub const MASS_FLOOR: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureConfig {
    /// Polynomial degree the per-triangle rule integrates exactly.
    pub triangle_order: u32,
    /// Each fan triangle is split into `subdivisions²` congruent pieces.
    pub subdivisions: u32,
    pub grid_nx: usize,
    pub grid_ny: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            triangle_order: 8,
            subdivisions: DEFAULT_SUBDIVISIONS,
            grid_nx: 200,
            grid_ny: 200,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_TRIANGLE_ORDER).contains(&self.triangle_order) {
            return Err(Error::InvalidInput(format!(
                "triangle_order {} outside supported range 2..={MAX_TRIANGLE_ORDER}",
                self.triangle_order
            )));
        }
        if !(1..=MAX_SUBDIVISIONS).contains(&self.subdivisions) {
            return Err(Error::InvalidInput(format!(
                "subdivisions {} outside supported range 1..={MAX_SUBDIVISIONS}",
                self.subdivisions
            )));
        }
        if self.grid_nx < 16 || self.grid_ny < 16 {
            return Err(Error::InvalidInput(format!(
                "grid {}x{} is coarser than 16x16",
                self.grid_nx, self.grid_ny
            )));
        }
        Ok(())
    }
}

pub const MAX_TRIANGLE_ORDER: u32 = 8;
pub const DEFAULT_SUBDIVISIONS: u32 = 16;
pub const MAX_SUBDIVISIONS: u32 = 64;

/// One symmetry orbit of a triangle rule, in barycentric coordinates.
enum Orbit {
    Centroid(f64),
    /// `(a, b, b)` and its rotations; `b = (1 − a)/2`.
    Three {
        a: f64,
        w: f64,
    },
    /// All six permutations of `(a, b, 1 − a − b)`.
    Six {
        a: f64,
        b: f64,
        w: f64,
    },
}

/// Degree 2, 3 points.
const RULE_2: &[Orbit] = &[Orbit::Three {
    a: 2.0 / 3.0,
    w: 1.0 / 3.0,
}];

/// Degree 4, 6 points.
const RULE_4: &[Orbit] = &[
    Orbit::Three {
        a: 0.108_103_018_168_070_227_36,
        w: 0.223_381_589_678_011_465_7,
    },
    Orbit::Three {
        a: 0.816_847_572_980_458_513_08,
        w: 0.109_951_743_655_321_867_64,
    },
];

/// Degree 5, 7 points (Radon).
const RULE_5: &[Orbit] = &[
    Orbit::Centroid(9.0 / 40.0),
    Orbit::Three {
        a: 0.797_426_985_353_087_322_4,
        w: 0.125_939_180_544_827_152_6,
    },
    Orbit::Three {
        a: 0.059_715_871_789_769_820_46,
        w: 0.132_394_152_788_506_180_74,
    },
];

/// Degree 8, 16 points.
const RULE_8: &[Orbit] = &[
    Orbit::Centroid(0.144_315_607_677_787_168_25),
    Orbit::Three {
        a: 0.081_414_823_414_553_687_942,
        w: 0.095_091_634_267_284_624_794,
    },
    Orbit::Three {
        a: 0.658_861_384_496_479_586_76,
        w: 0.103_217_370_534_718_250_28,
    },
    Orbit::Three {
        a: 0.898_905_543_365_938_049_08,
        w: 0.032_458_497_623_198_080_311,
    },
    Orbit::Six {
        a: 0.008_394_777_409_957_605_337_2,
        b: 0.263_112_829_634_638_113_42,
        w: 0.027_230_314_174_434_994_265,
    },
];

/// Barycentric nodes and weights (summing to 1) of a symmetric triangle rule.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangleRule {
    pub nodes: Vec<([f64; 3], f64)>,
}

impl TriangleRule {
    /// Smallest built-in rule exact to at least `order`.
    pub fn for_order(order: u32) -> Result<Self> {
        let orbits = match order {
            0..=2 => RULE_2,
            3..=4 => RULE_4,
            5 => RULE_5,
            6..=8 => RULE_8,
            _ => {
                return Err(Error::InvalidInput(format!(
                    "no triangle rule of order {order}"
                )))
            }
        };
        let mut nodes = Vec::new();
        for orbit in orbits {
            match *orbit {
                Orbit::Centroid(w) => nodes.push(([1.0 / 3.0; 3], w)),
                Orbit::Three { a, w } => {
                    let b = 0.5 * (1.0 - a);
                    nodes.extend([([a, b, b], w), ([b, a, b], w), ([b, b, a], w)]);
                }
                Orbit::Six { a, b, w } => {
                    let c = 1.0 - a - b;
                    nodes.extend(
                        [
                            [a, b, c],
                            [a, c, b],
                            [b, a, c],
                            [b, c, a],
                            [c, a, b],
                            [c, b, a],
                        ]
                        .map(|l| (l, w)),
                    );
                }
            }
        }
        Ok(TriangleRule { nodes })
    }

    /// Rule for `cfg`: the base rule repeated over a uniform split of the triangle.
    pub fn from_config(cfg: &QuadratureConfig) -> Result<Self> {
        Ok(TriangleRule::for_order(cfg.triangle_order)?.composite(cfg.subdivisions))
    }

    /// Apply this rule on each of the `s²` sub-triangles of a uniform split.
    ///
    /// The result is still a rule on the parent triangle, exact to the same degree.
    pub fn composite(&self, s: u32) -> Self {
        if s <= 1 {
            return self.clone();
        }
        let h = 1.0 / s as f64;
        let scale = h * h;
        let mut nodes = Vec::with_capacity(self.nodes.len() * (s * s) as usize);
        // Sub-triangle corners in the (l1, l2) coordinates of the parent.
        let mut push = |c0: [f64; 2], c1: [f64; 2], c2: [f64; 2]| {
            for &([b0, b1, b2], w) in &self.nodes {
                let l1 = b0 * c0[0] + b1 * c1[0] + b2 * c2[0];
                let l2 = b0 * c0[1] + b1 * c1[1] + b2 * c2[1];
                nodes.push(([1.0 - l1 - l2, l1, l2], w * scale));
            }
        };
        for i in 0..s {
            for j in 0..s - i {
                let (x, y) = (i as f64 * h, j as f64 * h);
                push([x, y], [x + h, y], [x, y + h]);
                if i + j + 1 < s {
                    push([x + h, y], [x + h, y + h], [x, y + h]);
                }
            }
        }
        TriangleRule { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Visit every quadrature node of `poly` with its area-scaled weight.
pub fn for_each_node(
    poly: &ConvexPolygon,
    rule: &TriangleRule,
    mut visit: impl FnMut(Vec2, f64),
) -> Result<()> {
    let v = &poly.vertices;
    if v.len() < 3 {
        return Err(Error::DegeneratePolygon { vertices: v.len() });
    }
    let o = v[0];
    for k in 1..v.len() - 1 {
        let e1 = v[k] - o;
        let e2 = v[k + 1] - o;
        let area = 0.5 * e1.cross(e2);
        if area == 0.0 {
            continue;
        }
        for &([_, l1, l2], w) in &rule.nodes {
            visit(o + e1 * l1 + e2 * l2, w * area);
        }
    }
    Ok(())
}

/// `∫_poly f dΩ`.
pub fn integrate_polygon(
    f: impl Fn(Vec2) -> f64,
    poly: &ConvexPolygon,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let rule = TriangleRule::from_config(cfg)?;
    let mut sum = 0.0;
    for_each_node(poly, &rule, |q, w| sum += w * f(q))?;
    Ok(sum)
}

/// Density mass, density centroid and density-free second moment of a cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellMoments {
    pub mass: f64,
    pub centroid: Vec2,
    /// `∫_cell ‖q − p‖² dΩ` about the agent position `p`.
    pub geometric_second_moment: f64,
    /// `∫_cell ‖q − p‖² φ dΩ`, this cell's share of the locational cost.
    pub cost: f64,
}

/// Moments of `poly` under `density(·, t)` as seen from agent position `p_i`.
pub fn cell_moments(
    poly: &ConvexPolygon,
    p_i: Vec2,
    density: &impl Fn(Vec2) -> f64,
    rule: &TriangleRule,
) -> Result<CellMoments> {
    let mut mass = 0.0;
    let mut first = Vec2::ZERO;
    let mut second = 0.0;
    let mut cost = 0.0;
    for_each_node(poly, rule, |q, w| {
        let phi = w * density(q);
        let r2 = (q - p_i).norm_sq();
        mass += phi;
        first += q * phi;
        second += w * r2;
        cost += phi * r2;
    })?;
    if !(mass >= MASS_FLOOR) {
        return Err(Error::MassUnderflow { mass });
    }
    Ok(CellMoments {
        mass,
        centroid: first / mass,
        geometric_second_moment: second,
        cost,
    })
}

/// Cell-centered uniform grid over a rectangle.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    domain: Rect,
    nx: usize,
    ny: usize,
}

impl Grid {
    pub fn new(domain: Rect, nx: usize, ny: usize) -> Self {
        Grid { domain, nx, ny }
    }

    pub fn from_config(domain: Rect, cfg: &QuadratureConfig) -> Self {
        Grid::new(domain, cfg.grid_nx, cfg.grid_ny)
    }

    pub fn cell_area(&self) -> f64 {
        self.domain.area() / (self.nx * self.ny) as f64
    }

    fn node(&self, ix: usize, iy: usize) -> Vec2 {
        let dx = self.domain.width() / self.nx as f64;
        let dy = self.domain.height() / self.ny as f64;
        Vec2::new(
            self.domain.xmin + (ix as f64 + 0.5) * dx,
            self.domain.ymin + (iy as f64 + 0.5) * dy,
        )
    }

    /// Row-major samples of `f` at the grid nodes.
    pub fn sample(&self, exec: Execution, f: &(impl Fn(Vec2) -> f64 + Sync)) -> Vec<f64> {
        exec.map(self.ny, |iy| {
            (0..self.nx)
                .map(|ix| f(self.node(ix, iy)))
                .collect::<Vec<_>>()
        })
        .concat()
    }

    /// Midpoint-rule L2 distance between two sample vectors, summed in order.
    pub fn l2(&self, a: &[f64], b: &[f64]) -> f64 {
        assert_eq!(a.len(), b.len(), "sample vectors differ in length");
        let ss: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
        (ss * self.cell_area()).sqrt()
    }
}

/// `‖f − g‖_{L2(domain)}` on the configured grid.
pub fn l2_distance(
    f: &(impl Fn(Vec2) -> f64 + Sync),
    g: &(impl Fn(Vec2) -> f64 + Sync),
    domain: &Rect,
    cfg: &QuadratureConfig,
    exec: Execution,
) -> f64 {
    let grid = Grid::from_config(*domain, cfg);
    grid.l2(&grid.sample(exec, f), &grid.sample(exec, g))
}
