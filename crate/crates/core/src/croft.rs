//! Croft's tortoise: a disc of radius 1/2 clipped by a regular hexagon of
//! height `x`, repeated on a hexagonal lattice with spacing `1 + x`.

use std::f64::consts::{FRAC_PI_3, PI};

use crate::error::{Error, Result};

const R: f64 = 0.5;

/// Smallest admissible hexagon height; below it the six clipped segments
/// overlap.
pub const X_MIN: f64 = 0.866_025_403_784_438_6;

/// Hexagon height of the tortoise construction, in `(sqrt(3)/2, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CroftParams {
    x: f64,
}

impl CroftParams {
    pub fn new(x: f64) -> Result<Self> {
        if x > X_MIN && x < 1.0 {
            Ok(CroftParams { x })
        } else {
            Err(Error::CroftDomain(x))
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    /// Area of the tortoise: the disc minus six circular segments at
    /// distance `x/2` from the centre.
    pub fn tortoise_area(&self) -> f64 {
        let d = self.x / 2.0;
        let segment = R * R * (d / R).acos() - d * (R * R - d * d).sqrt();
        PI * R * R - 6.0 * segment
    }

    /// Area of one fundamental cell of the lattice.
    pub fn cell_area(&self) -> f64 {
        (1.0 + self.x).powi(2) * FRAC_PI_3.sin()
    }
}

/// Fraction of the plane covered by the tortoise packing.
pub fn croft_density(p: CroftParams) -> f64 {
    p.tortoise_area() / p.cell_area()
}

/// Maximises the density over `(sqrt(3)/2 + 1e-6, 1 - 1e-9)`; returns
/// `(x_star, density_star)`.
pub fn croft_optimum() -> (f64, f64) {
    let x = golden_section_max(density_at, X_MIN + 1e-6, 1.0 - 1e-9, 1e-7);
    (x, density_at(x))
}

fn density_at(x: f64) -> f64 {
    // the search never leaves the open domain
    croft_density(CroftParams { x })
}

/// Golden-section search for the maximiser of a unimodal `f` on `[lo, hi]`,
/// stopping once the bracket is narrower than `tol`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        }
    }
    (lo + hi) / 2.0
}
