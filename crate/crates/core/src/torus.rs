//! Flat-torus geometry.
//!
//! A torus `T(l1, l2, alpha)` is the parallelogram spanned by `v1 = (l1, 0)`
//! and `v2 = (l2 cos alpha, l2 sin alpha)` with opposite sides identified.
//! Points are stored in affine coordinates `(x, y) in [0, 1)^2`, meaning
//! `x * v1 + y * v2`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Flat torus parameters: side lengths and the angle between the sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatTorus {
    l1: f64,
    l2: f64,
    alpha: f64,
}

impl FlatTorus {
    /// Builds a torus; `alpha` is in radians and must lie in `(0, pi/2]`.
    pub fn new(l1: f64, l2: f64, alpha: f64) -> Result<Self> {
        if !(l1.is_finite() && l1 > 0.0) || !(l2.is_finite() && l2 > 0.0) {
            return Err(Error::InvalidTorus(format!(
                "side lengths must be positive, got l1 = {l1}, l2 = {l2}"
            )));
        }
        if !(alpha > 0.0 && alpha <= FRAC_PI_2) {
            return Err(Error::InvalidTorus(format!(
                "angle must lie in (0, pi/2], got {alpha} rad"
            )));
        }
        Ok(FlatTorus { l1, l2, alpha })
    }

    /// Same as [`FlatTorus::new`] with the angle given in degrees.
    pub fn from_degrees(l1: f64, l2: f64, alpha_deg: f64) -> Result<Self> {
        Self::new(l1, l2, alpha_deg.to_radians())
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    pub fn l2(&self) -> f64 {
        self.l2
    }

    /// Angle between the basis vectors, in radians.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn v1(&self) -> [f64; 2] {
        [self.l1, 0.0]
    }

    pub fn v2(&self) -> [f64; 2] {
        [self.l2 * self.alpha.cos(), self.l2 * self.alpha.sin()]
    }

    /// Area of the fundamental parallelogram.
    pub fn area(&self) -> f64 {
        self.l1 * self.l2 * self.alpha.sin()
    }

    /// Maps affine coordinates to the plane (no reduction modulo the lattice).
    pub fn to_cartesian(&self, x: f64, y: f64) -> [f64; 2] {
        let v2 = self.v2();
        [x * self.l1 + y * v2[0], y * v2[1]]
    }

    /// Inverse of [`FlatTorus::to_cartesian`].
    pub fn to_affine(&self, p: [f64; 2]) -> [f64; 2] {
        let v2 = self.v2();
        let y = p[1] / v2[1];
        let x = (p[0] - y * v2[0]) / self.l1;
        [x, y]
    }

    /// Half-width `k` of the search range over the `v2` coefficient:
    /// `ceil(1 / (1 - cos^2 alpha)) + 1`.
    pub fn search_bound(&self) -> i64 {
        let c = self.alpha.cos();
        (1.0 / (1.0 - c * c)).ceil() as i64 + 1
    }

    /// Torus distance between two points.
    ///
    /// Finite search: for each `v2` coefficient in `[-k, k]` only the two
    /// integers bracketing the unconstrained minimiser over the `v1`
    /// coefficient can be optimal. The search assumes `l1 <= l2`, so the roles
    /// of the basis vectors are exchanged when that does not hold.
    pub fn metric(&self, p: TorusPoint, q: TorusPoint) -> f64 {
        self.displacement_length(q.x - p.x, q.y - p.y)
    }

    /// Torus length of the affine displacement `(t1, t2)`.
    pub fn displacement_length(&self, t1: f64, t2: f64) -> f64 {
        let (l1, l2, t1, t2) = if self.l1 <= self.l2 {
            (self.l1, self.l2, t1, t2)
        } else {
            (self.l2, self.l1, t2, t1)
        };
        let (sin, cos) = self.alpha.sin_cos();
        let k = self.search_bound();

        let mut best = f64::INFINITY;
        for n in -k..=k {
            let w = t2 + n as f64;
            let f = -(t1 + w * l2 * cos / l1);
            for m in [f.floor(), f.ceil()] {
                let u = t1 + m;
                let x = u * l1 + w * l2 * cos;
                let y = w * l2 * sin;
                best = best.min(x * x + y * y);
            }
        }
        best.sqrt()
    }

    /// Exhaustive distance over all lattice translates with coefficients in
    /// `[-window, window]`. Exact whenever `window >= search_bound() + 2`.
    pub fn metric_oracle(&self, p: TorusPoint, q: TorusPoint, window: u32) -> Result<f64> {
        if window < 1 {
            return Err(Error::InvalidWindow);
        }
        let w = window as i64;
        let v1 = self.v1();
        let v2 = self.v2();
        let (t1, t2) = (q.x - p.x, q.y - p.y);
        let mut best = f64::INFINITY;
        for m in -w..=w {
            for n in -w..=w {
                let a = t1 + m as f64;
                let b = t2 + n as f64;
                let x = a * v1[0] + b * v2[0];
                let y = a * v1[1] + b * v2[1];
                best = best.min(x * x + y * y);
            }
        }
        Ok(best.sqrt())
    }

    /// Sufficient condition for 1-avoiding sets on the torus to tile into
    /// 1-avoiding planar sets: `l1 >= 2 && l2 sin(alpha) >= 2`, or the same
    /// with the sides exchanged.
    ///
    /// Comparisons are raw `>=` on the floating-point products; for instance
    /// `4.0 * sin(pi/6)` evaluates just below 2 and is rejected.
    pub fn is_perfectly_periodic(&self) -> bool {
        let s = self.alpha.sin();
        (self.l1 >= 2.0 && self.l2 * s >= 2.0) || (self.l2 >= 2.0 && self.l1 * s >= 2.0)
    }
}

/// A point on a torus in affine coordinates, each reduced into `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusPoint {
    x: f64,
    y: f64,
}

impl TorusPoint {
    pub fn new(x: f64, y: f64) -> Self {
        TorusPoint {
            x: wrap_unit(x),
            y: wrap_unit(y),
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    /// Translates the point by `(dx, dy)` modulo 1.
    pub fn shifted(&self, dx: f64, dy: f64) -> Self {
        TorusPoint::new(self.x + dx, self.y + dy)
    }
}

fn wrap_unit(v: f64) -> f64 {
    let r = v.rem_euclid(1.0);
    // rem_euclid rounds tiny negatives up to exactly 1.0
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}
