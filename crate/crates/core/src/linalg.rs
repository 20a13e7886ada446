//! Two-dimensional vectors and symmetric 2×2 matrices.
//!
//! Square roots of covariances go through a closed-form eigendecomposition,
//! which is exact at this size and needs no iteration.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// Eigenvalues below this are treated as singular when inverting a square root.
pub const EIG_FLOOR: f64 = 1e-12;

/// Relative eigenvalue gap below which eigenvectors fall back to the axes.
const DEGENERATE_GAP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Unit vector in the same direction, or `None` for a (near) zero vector.
    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self / n)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl SubAssign for Vec2 {
    fn sub_assign(&mut self, rhs: Vec2) {
        self.x -= rhs.x;
        self.y -= rhs.y;
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, rhs: Vec2) -> Vec2 {
        rhs * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x / rhs, self.y / rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Symmetric 2×2 matrix `[[a11, a12], [a12, a22]]`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SymMat2 {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

/// Eigenpairs of a [`SymMat2`], eigenvalues in descending order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eigen2 {
    pub values: [f64; 2],
    pub vectors: [Vec2; 2],
}

impl SymMat2 {
    pub const IDENTITY: SymMat2 = SymMat2 {
        a11: 1.0,
        a12: 0.0,
        a22: 1.0,
    };

    pub const fn new(a11: f64, a12: f64, a22: f64) -> Self {
        SymMat2 { a11, a12, a22 }
    }

    pub const fn diag(a11: f64, a22: f64) -> Self {
        SymMat2 { a11, a12: 0.0, a22 }
    }

    pub fn scaled_identity(s: f64) -> Self {
        SymMat2::diag(s, s)
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn is_finite(&self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a22.is_finite()
    }

    /// Positive definiteness via the leading principal minors.
    pub fn is_spd(&self) -> bool {
        self.is_finite() && self.a11 > 0.0 && self.det() > 0.0
    }

    pub fn mul_vec(&self, v: Vec2) -> Vec2 {
        Vec2::new(
            self.a11 * v.x + self.a12 * v.y,
            self.a12 * v.x + self.a22 * v.y,
        )
    }

    /// `vᵀ M v`.
    pub fn quad_form(&self, v: Vec2) -> f64 {
        self.a11 * v.x * v.x + 2.0 * self.a12 * v.x * v.y + self.a22 * v.y * v.y
    }

    pub fn inverse(&self) -> Result<SymMat2> {
        let det = self.det();
        if !(det.is_finite() && det != 0.0) {
            return Err(Error::Domain(format!("matrix {self:?} is singular")));
        }
        Ok(SymMat2::new(
            self.a22 / det,
            -self.a12 / det,
            self.a11 / det,
        ))
    }

    /// `M·M`, symmetric for symmetric `M`.
    pub fn square(&self) -> SymMat2 {
        SymMat2::new(
            self.a11 * self.a11 + self.a12 * self.a12,
            self.a12 * (self.a11 + self.a22),
            self.a12 * self.a12 + self.a22 * self.a22,
        )
    }

    /// Congruence `S·M·S` with `S = self`; symmetric whenever both factors are.
    pub fn sandwich(&self, inner: &SymMat2) -> SymMat2 {
        let s = self;
        let m = inner;
        // T = S·M (general 2×2), result = T·S.
        let t11 = s.a11 * m.a11 + s.a12 * m.a12;
        let t12 = s.a11 * m.a12 + s.a12 * m.a22;
        let t21 = s.a12 * m.a11 + s.a22 * m.a12;
        let t22 = s.a12 * m.a12 + s.a22 * m.a22;
        let r11 = t11 * s.a11 + t12 * s.a12;
        let r12 = t11 * s.a12 + t12 * s.a22;
        let r21 = t21 * s.a11 + t22 * s.a12;
        let r22 = t21 * s.a12 + t22 * s.a22;
        SymMat2::new(r11, 0.5 * (r12 + r21), r22)
    }

    pub fn scale(&self, s: f64) -> SymMat2 {
        SymMat2::new(self.a11 * s, self.a12 * s, self.a22 * s)
    }

    pub fn add(&self, other: &SymMat2) -> SymMat2 {
        SymMat2::new(
            self.a11 + other.a11,
            self.a12 + other.a12,
            self.a22 + other.a22,
        )
    }

    pub fn frobenius(&self) -> f64 {
        (self.a11 * self.a11 + 2.0 * self.a12 * self.a12 + self.a22 * self.a22).sqrt()
    }

    /// Rebuild `V diag(f(λ)) Vᵀ` from an eigendecomposition.
    fn from_eigen(e: &Eigen2, f: impl Fn(f64) -> f64) -> SymMat2 {
        let [v1, v2] = e.vectors;
        let (l1, l2) = (f(e.values[0]), f(e.values[1]));
        SymMat2::new(
            l1 * v1.x * v1.x + l2 * v2.x * v2.x,
            l1 * v1.x * v1.y + l2 * v2.x * v2.y,
            l1 * v1.y * v1.y + l2 * v2.y * v2.y,
        )
    }

    /// Clamp eigenvalues from below, keeping the eigenvectors.
    pub fn clamp_eigenvalues(&self, floor: f64) -> Result<SymMat2> {
        let e = eig2(self)?;
        if e.values[1] >= floor {
            return Ok(*self);
        }
        Ok(SymMat2::from_eigen(&e, |l| l.max(floor)))
    }
}

/// Closed-form eigendecomposition of a symmetric 2×2 matrix.
pub fn eig2(m: &SymMat2) -> Result<Eigen2> {
    if !m.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite matrix {m:?}")));
    }
    let mean = 0.5 * (m.a11 + m.a22);
    let half_diff = 0.5 * (m.a11 - m.a22);
    let radius = half_diff.hypot(m.a12);
    let l1 = mean + radius;
    // det / λ1 avoids cancellation in mean − radius when λ2 ≪ λ1.
    let l2 = if mean > 0.0 && l1 > 0.0 {
        m.det() / l1
    } else {
        mean - radius
    };
    let values = [l1, l2];

    let scale = m.a11.abs().max(m.a22.abs()).max(m.a12.abs());
    if 2.0 * radius <= DEGENERATE_GAP * scale || radius == 0.0 {
        // Multiple of the identity: any orthonormal basis works.
        let vectors = if m.a11 >= m.a22 {
            [Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)]
        } else {
            [Vec2::new(0.0, 1.0), Vec2::new(1.0, 0.0)]
        };
        return Ok(Eigen2 { values, vectors });
    }

    // Two algebraically equivalent candidates for the leading eigenvector;
    // the longer one is the better conditioned.
    let c1 = Vec2::new(m.a12, l1 - m.a11);
    let c2 = Vec2::new(l1 - m.a22, m.a12);
    let v1 = if c1.norm_sq() >= c2.norm_sq() { c1 } else { c2 };
    let v1 = v1 / v1.norm();
    let v2 = Vec2::new(v1.y, -v1.x);
    Ok(Eigen2 {
        values,
        vectors: [v1, v2],
    })
}

/// Principal square root of an SPD matrix.
pub fn spd_sqrt(m: &SymMat2) -> Result<SymMat2> {
    let e = eig2(m)?;
    if !(e.values[1] > 0.0) {
        return Err(Error::Domain(format!(
            "square root needs an SPD matrix, smallest eigenvalue is {:e}",
            e.values[1]
        )));
    }
    Ok(SymMat2::from_eigen(&e, f64::sqrt))
}

/// Inverse principal square root, refusing matrices below [`EIG_FLOOR`].
pub fn spd_inv_sqrt(m: &SymMat2) -> Result<SymMat2> {
    let e = eig2(m)?;
    if !(e.values[1] > EIG_FLOOR) {
        return Err(Error::Conditioning {
            min_eigenvalue: e.values[1],
        });
    }
    Ok(SymMat2::from_eigen(&e, |l| 1.0 / l.sqrt()))
}
