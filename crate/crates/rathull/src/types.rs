use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A point of C^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2C {
    pub z: Complex64,
    pub w: Complex64,
}

impl Point2C {
    pub fn new(z: Complex64, w: Complex64) -> Self {
        Point2C { z, w }
    }

    /// Euclidean norm of the point viewed as a vector in C^2 = R^4.
    pub fn norm(&self) -> f64 {
        (self.z.norm_sqr() + self.w.norm_sqr()).sqrt()
    }

    pub fn dist(&self, other: &Point2C) -> f64 {
        ((self.z - other.z).norm_sqr() + (self.w - other.w).norm_sqr()).sqrt()
    }

    /// The point as real coordinates (Re z, Im z, Re w, Im w).
    pub fn as_reals(&self) -> [f64; 4] {
        [self.z.re, self.z.im, self.w.re, self.w.im]
    }
}
