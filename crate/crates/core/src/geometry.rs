//! Obstacle-aware Voronoi cells as convex polygons.
//!
//! Every constraint that defines a cell is linear in `q`: agent bisectors and,
//! for circular obstacles, weighted bisectors whose boundary is tangent to the
//! obstacle disk. A cell is therefore the domain rectangle clipped by a list of
//! half-planes.

use crate::error::{Error, Result};
use crate::linalg::Vec2;

/// Vertices closer than this are merged after clipping.
pub const MERGE_TOL: f64 = 1e-9;

/// Minimum separation for two generators to define a bisector.
pub const COINCIDENT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Rect {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Self> {
        let finite = [xmin, xmax, ymin, ymax].iter().all(|v| v.is_finite());
        if !finite || xmin >= xmax || ymin >= ymax {
            return Err(Error::InvalidInput(format!(
                "rectangle [{xmin}, {xmax}] x [{ymin}, {ymax}] is empty or non-finite"
            )));
        }
        Ok(Rect {
            xmin,
            xmax,
            ymin,
            ymax,
        })
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Vec2 {
        Vec2::new(0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax))
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.xmin && p.x <= self.xmax && p.y >= self.ymin && p.y <= self.ymax
    }

    /// Pull `p` to at least `margin` inside the boundary.
    pub fn clamp_inside(&self, p: Vec2, margin: f64) -> Vec2 {
        Vec2::new(
            p.x.clamp(self.xmin + margin, self.xmax - margin),
            p.y.clamp(self.ymin + margin, self.ymax - margin),
        )
    }

    pub fn to_polygon(&self) -> ConvexPolygon {
        ConvexPolygon {
            vertices: vec![
                Vec2::new(self.xmin, self.ymin),
                Vec2::new(self.xmax, self.ymin),
                Vec2::new(self.xmax, self.ymax),
                Vec2::new(self.xmin, self.ymax),
            ],
        }
    }
}

/// A static circular obstacle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disk {
    pub center: Vec2,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Vec2, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
            return Err(Error::InvalidInput(format!(
                "disk at {center:?} needs a positive finite radius, got {radius}"
            )));
        }
        Ok(Disk { center, radius })
    }

    /// Closed-disk membership.
    pub fn contains(&self, p: Vec2) -> bool {
        p.distance(self.center) <= self.radius
    }
}

/// `{q : normal · q <= offset}` with a unit normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlane {
    pub normal: Vec2,
    pub offset: f64,
}

impl HalfPlane {
    /// Signed distance, positive outside.
    pub fn signed_distance(&self, q: Vec2) -> f64 {
        self.normal.dot(q) - self.offset
    }

    pub fn contains(&self, q: Vec2, tol: f64) -> bool {
        self.signed_distance(q) <= tol
    }
}

/// Counterclockwise convex polygon. Zero vertices means empty.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvexPolygon {
    pub vertices: Vec<Vec2>,
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<Vec2>) -> Self {
        ConvexPolygon { vertices }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 3
    }

    /// Edge half-planes; the polygon is their intersection.
    pub fn edge_halfplanes(&self) -> Vec<HalfPlane> {
        let n = self.vertices.len();
        (0..n)
            .filter_map(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                // Outward normal of a CCW edge is the edge rotated clockwise.
                let normal = Vec2::new(b.y - a.y, a.x - b.x).normalized()?;
                Some(HalfPlane {
                    normal,
                    offset: normal.dot(a),
                })
            })
            .collect()
    }

    pub fn contains(&self, q: Vec2, tol: f64) -> bool {
        !self.is_empty() && self.edge_halfplanes().iter().all(|h| h.contains(q, tol))
    }

    /// Shoelace area; zero for empty polygons.
    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        0.5 * (0..n)
            .map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n]))
            .sum::<f64>()
    }

    /// Intersection with another convex polygon.
    pub fn intersection(&self, other: &ConvexPolygon) -> ConvexPolygon {
        other
            .edge_halfplanes()
            .iter()
            .fold(self.clone(), |poly, hp| clip(&poly, hp))
    }
}

/// Half-plane containing `p_i` bounded by the perpendicular bisector of `p_i`, `p_k`.
pub fn voronoi_halfplane(p_i: Vec2, p_k: Vec2) -> Result<HalfPlane> {
    let d = p_k - p_i;
    if d.norm() <= COINCIDENT_TOL {
        return Err(Error::DegenerateGenerators {
            first: 0,
            second: 1,
        });
    }
    let normal = d / d.norm();
    Ok(HalfPlane {
        normal,
        offset: normal.dot((p_i + p_k) * 0.5),
    })
}

/// Dynamic weight `2 r ‖p − o‖ − ‖p − o‖²` that makes the weighted bisector
/// between an agent and an obstacle tangent to the obstacle.
pub fn obstacle_weight(p_i: Vec2, obs: &Disk) -> f64 {
    let d = p_i.distance(obs.center);
    2.0 * obs.radius * d - d * d
}

/// Linear form of `‖q − p‖² ≤ ‖q − o‖² − w` for an agent outside a disk.
///
/// Expanding gives `2 (o − p)·q ≤ ‖o‖² − ‖p‖² − w`; with the dynamic weight the
/// right-hand side over `2‖o − p‖` reduces to `n·o − r`, so the boundary is the
/// tangent line facing the agent.
pub fn obstacle_halfplane(p_i: Vec2, obs: &Disk) -> Result<HalfPlane> {
    let d = obs.center - p_i;
    let dist = d.norm();
    if !(dist > obs.radius) {
        return Err(Error::AgentInObstacle {
            obstacle: 0,
            x: p_i.x,
            y: p_i.y,
        });
    }
    let normal = d / dist;
    Ok(HalfPlane {
        normal,
        offset: normal.dot(obs.center) - obs.radius,
    })
}

/// Sutherland–Hodgman clip of a convex polygon against one half-plane.
pub fn clip(poly: &ConvexPolygon, hp: &HalfPlane) -> ConvexPolygon {
    let n = poly.vertices.len();
    if n == 0 {
        return ConvexPolygon::default();
    }
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let a = poly.vertices[i];
        let b = poly.vertices[(i + 1) % n];
        let da = hp.signed_distance(a);
        let db = hp.signed_distance(b);
        if da <= 0.0 {
            out.push(a);
        }
        if (da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0) {
            let s = da / (da - db);
            out.push(a + (b - a) * s);
        }
    }
    dedup_vertices(&mut out);
    if out.len() < 3 {
        out.clear();
    }
    ConvexPolygon { vertices: out }
}

fn dedup_vertices(v: &mut Vec<Vec2>) {
    v.dedup_by(|b, a| a.distance(*b) < MERGE_TOL);
    while v.len() > 1 && v[0].distance(v[v.len() - 1]) < MERGE_TOL {
        v.pop();
    }
}

/// Obstacle-aware Voronoi cell of agent `i`.
pub fn build_oavc(
    i: usize,
    positions: &[Vec2],
    obstacles: &[Disk],
    domain: &Rect,
) -> Result<ConvexPolygon> {
    let p_i = *positions
        .get(i)
        .ok_or_else(|| Error::InvalidInput(format!("agent index {i} out of range")))?;
    if !domain.contains(p_i) {
        return Err(Error::InvalidInput(format!(
            "agent {i} at {p_i:?} is outside the domain"
        )));
    }
    let mut cell = domain.to_polygon();
    for (j, obs) in obstacles.iter().enumerate() {
        let hp = obstacle_halfplane(p_i, obs).map_err(|_| Error::AgentInObstacle {
            obstacle: j,
            x: p_i.x,
            y: p_i.y,
        })?;
        cell = clip(&cell, &hp);
    }
    for (k, &p_k) in positions.iter().enumerate() {
        if k == i {
            continue;
        }
        let hp = voronoi_halfplane(p_i, p_k).map_err(|_| Error::DegenerateGenerators {
            first: i.min(k),
            second: i.max(k),
        })?;
        cell = clip(&cell, &hp);
    }
    if cell.is_empty() {
        return Err(Error::EmptyCell { agent: i });
    }
    Ok(cell)
}

/// Area and geometric centroid of a polygon.
pub fn polygon_area_centroid(poly: &ConvexPolygon) -> Result<(f64, Vec2)> {
    let n = poly.vertices.len();
    if n < 3 {
        return Err(Error::DegeneratePolygon { vertices: n });
    }
    // Shift to the first vertex to limit cancellation.
    let o = poly.vertices[0];
    let mut area2 = 0.0;
    let mut c = Vec2::ZERO;
    for i in 0..n {
        let a = poly.vertices[i] - o;
        let b = poly.vertices[(i + 1) % n] - o;
        let cr = a.cross(b);
        area2 += cr;
        c += (a + b) * cr;
    }
    if !(area2 > 0.0) {
        return Err(Error::DegeneratePolygon { vertices: n });
    }
    Ok((0.5 * area2, o + c / (3.0 * area2)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> ConvexPolygon {
        Rect::new(0.0, 1.0, 0.0, 1.0).unwrap().to_polygon()
    }

    fn hp(nx: f64, ny: f64, offset: f64) -> HalfPlane {
        HalfPlane {
            normal: Vec2::new(nx, ny),
            offset,
        }
    }

    #[test]
    fn bisector_examples() {
        let h = voronoi_halfplane(Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.0)).unwrap();
        assert_eq!(h, hp(1.0, 0.0, 1.0));
        let h = voronoi_halfplane(Vec2::new(0.0, 0.0), Vec2::new(0.0, 4.0)).unwrap();
        assert_eq!(h, hp(0.0, 1.0, 2.0));
        let h = voronoi_halfplane(Vec2::new(1.0, 1.0), Vec2::new(3.0, 3.0)).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((h.normal - Vec2::new(s, s)).norm() < 1e-15);
        assert!(h.signed_distance(Vec2::new(2.0, 2.0)).abs() < 1e-14);
    }

    #[test]
    fn bisector_rejects_coincident_points() {
        let p = Vec2::new(1.0, 1.0);
        assert!(matches!(
            voronoi_halfplane(p, p),
            Err(Error::DegenerateGenerators { .. })
        ));
    }

    #[test]
    fn obstacle_halfplane_examples() {
        let disk = Disk::new(Vec2::ZERO, 1.0).unwrap();
        let p = Vec2::new(3.0, 0.0);
        assert_eq!(obstacle_weight(p, &disk), -3.0);
        let h = obstacle_halfplane(p, &disk).unwrap();
        // -x <= -1, i.e. x >= 1
        assert_eq!(h, hp(-1.0, 0.0, -1.0));

        let h = obstacle_halfplane(Vec2::new(0.0, 5.0), &disk).unwrap();
        assert_eq!(h, hp(0.0, -1.0, -1.0));
        assert!(h.contains(Vec2::new(0.0, 5.0), 0.0));
    }

    #[test]
    fn obstacle_halfplane_matches_weighted_quadratic() {
        let disk = Disk::new(Vec2::new(0.5, -1.0), 0.8).unwrap();
        let p = Vec2::new(2.5, 1.5);
        let w = obstacle_weight(p, &disk);
        let h = obstacle_halfplane(p, &disk).unwrap();
        for q in [
            Vec2::new(0.0, 0.0),
            Vec2::new(3.0, -2.0),
            Vec2::new(-1.0, 4.0),
        ] {
            let quad = (q - p).norm_sq() - (q - disk.center).norm_sq() + w;
            // quad = 2‖o − p‖ · signed distance
            let lin = 2.0 * p.distance(disk.center) * h.signed_distance(q);
            assert!((quad - lin).abs() < 1e-12, "{quad} vs {lin}");
        }
    }

    #[test]
    fn obstacle_halfplane_rejects_agent_inside() {
        let disk = Disk::new(Vec2::ZERO, 1.0).unwrap();
        assert!(obstacle_halfplane(Vec2::new(0.5, 0.0), &disk).is_err());
        assert!(obstacle_halfplane(Vec2::new(1.0, 0.0), &disk).is_err());
    }

    #[test]
    fn clip_examples() {
        let sq = unit_square();
        let half = clip(&sq, &hp(1.0, 0.0, 0.5));
        assert_eq!(
            polygon_area_centroid(&half).unwrap(),
            (0.5, Vec2::new(0.25, 0.5))
        );
        assert_eq!(clip(&sq, &hp(1.0, 0.0, 2.0)), sq);
        assert!(clip(&sq, &hp(1.0, 0.0, -1.0)).vertices.is_empty());
    }

    #[test]
    fn clip_through_vertex_does_not_duplicate() {
        let sq = unit_square();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // Diagonal through (1,0) and (0,1).
        let tri = clip(&sq, &hp(s, s, s));
        assert_eq!(tri.vertices.len(), 3);
        assert!((tri.area() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_agent_gets_whole_domain() {
        let domain = Rect::new(-10.0, 10.0, -10.0, 10.0).unwrap();
        let cell = build_oavc(0, &[Vec2::new(1.0, 2.0)], &[], &domain).unwrap();
        assert_eq!(cell, domain.to_polygon());
    }

    #[test]
    fn two_agents_split_domain() {
        let domain = Rect::new(-10.0, 10.0, -10.0, 10.0).unwrap();
        let pos = [Vec2::new(-5.0, 0.0), Vec2::new(5.0, 0.0)];
        let left = build_oavc(0, &pos, &[], &domain).unwrap();
        let right = build_oavc(1, &pos, &[], &domain).unwrap();
        let (al, cl) = polygon_area_centroid(&left).unwrap();
        let (ar, cr) = polygon_area_centroid(&right).unwrap();
        assert_eq!((al, ar), (200.0, 200.0));
        assert!((cl - Vec2::new(-5.0, 0.0)).norm() < 1e-12);
        assert!((cr - Vec2::new(5.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn obstacle_cuts_cell_at_tangent() {
        let domain = Rect::new(-10.0, 10.0, -10.0, 10.0).unwrap();
        let obs = [Disk::new(Vec2::ZERO, 1.0).unwrap()];
        let cell = build_oavc(0, &[Vec2::new(3.0, 0.0)], &obs, &domain).unwrap();
        let (area, c) = polygon_area_centroid(&cell).unwrap();
        assert!((area - 9.0 * 20.0).abs() < 1e-12);
        assert!((c - Vec2::new(5.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn build_reports_offending_indices() {
        let domain = Rect::new(-10.0, 10.0, -10.0, 10.0).unwrap();
        let obs = [
            Disk::new(Vec2::new(5.0, 5.0), 1.0).unwrap(),
            Disk::new(Vec2::ZERO, 1.0).unwrap(),
        ];
        let err = build_oavc(0, &[Vec2::new(0.2, 0.0)], &obs, &domain).unwrap_err();
        assert!(matches!(err, Error::AgentInObstacle { obstacle: 1, .. }));
        let pos = [Vec2::new(3.0, 3.0), Vec2::ZERO, Vec2::new(3.0, 3.0)];
        let err = build_oavc(2, &pos, &[], &domain).unwrap_err();
        assert_eq!(
            err,
            Error::DegenerateGenerators {
                first: 0,
                second: 2
            }
        );
    }

    #[test]
    fn area_centroid_examples() {
        assert_eq!(
            polygon_area_centroid(&unit_square()).unwrap(),
            (1.0, Vec2::new(0.5, 0.5))
        );
        let tri = ConvexPolygon::new(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
        ]);
        let (a, c) = polygon_area_centroid(&tri).unwrap();
        assert_eq!(a, 0.5);
        assert!((c - Vec2::new(1.0 / 3.0, 1.0 / 3.0)).norm() < 1e-15);

        let hex = ConvexPolygon::new(
            (0..6)
                .map(|k| {
                    let th = k as f64 * std::f64::consts::PI / 3.0;
                    Vec2::new(th.cos(), th.sin())
                })
                .collect(),
        );
        let (a, c) = polygon_area_centroid(&hex).unwrap();
        assert!((a - 1.5 * 3f64.sqrt()).abs() < 1e-14);
        assert!(c.norm() < 1e-15);
    }

    #[test]
    fn area_centroid_needs_three_vertices() {
        let seg = ConvexPolygon::new(vec![Vec2::ZERO, Vec2::new(1.0, 0.0)]);
        assert_eq!(
            polygon_area_centroid(&seg),
            Err(Error::DegeneratePolygon { vertices: 2 })
        );
    }
}
