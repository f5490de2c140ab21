//! Sparse bivariate polynomials over C, used for fibering maps, avoidance
//! curves, and the test polynomials fed to the certificates.

use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A polynomial in (z, w) with complex coefficients, stored as sorted sparse
/// terms keyed by (z-power, w-power).
#[derive(Debug, Clone, PartialEq)]
pub struct BivariatePoly {
    terms: Vec<((u32, u32), Complex64)>,
}

impl BivariatePoly {
    pub fn zero() -> Self {
        BivariatePoly { terms: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_terms(vec![((0, 0), c)])
    }

    pub fn z() -> Self {
        Self::from_terms(vec![((1, 0), Complex64::new(1.0, 0.0))])
    }

    pub fn w() -> Self {
        Self::from_terms(vec![((0, 1), Complex64::new(1.0, 0.0))])
    }

    pub fn from_terms(terms: Vec<((u32, u32), Complex64)>) -> Self {
        let mut p = BivariatePoly { terms };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        self.terms.sort_by_key(|(k, _)| *k);
        let mut merged: Vec<((u32, u32), Complex64)> = Vec::with_capacity(self.terms.len());
        for (k, c) in self.terms.drain(..) {
            if let Some(last) = merged.last_mut() {
                if last.0 == k {
                    last.1 += c;
                    continue;
                }
            }
            merged.push((k, c));
        }
        merged.retain(|(_, c)| c.norm() != 0.0);
        self.terms = merged;
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[((u32, u32), Complex64)] {
        &self.terms
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((i, j), c) in &self.terms {
            acc += c * z.powu(*i) * w.powu(*j);
        }
        acc
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, c)| (*k, c * s)).collect())
    }

    /// Total degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|((i, j), _)| i + j).max()
    }
}

impl Add for &BivariatePoly {
    type Output = BivariatePoly;
    fn add(self, rhs: &BivariatePoly) -> BivariatePoly {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&rhs.terms);
        BivariatePoly::from_terms(terms)
    }
}

impl Sub for &BivariatePoly {
    type Output = BivariatePoly;
    fn sub(self, rhs: &BivariatePoly) -> BivariatePoly {
        self + &rhs.neg()
    }
}

impl Neg for &BivariatePoly {
    type Output = BivariatePoly;
    fn neg(self) -> BivariatePoly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &BivariatePoly {
    type Output = BivariatePoly;
    fn mul(self, rhs: &BivariatePoly) -> BivariatePoly {
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for ((i1, j1), c1) in &self.terms {
            for ((i2, j2), c2) in &rhs.terms {
                terms.push(((i1 + i2, j1 + j2), c1 * c2));
            }
        }
        BivariatePoly::from_terms(terms)
    }
}

impl fmt::Display for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((i, j), c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono = match (i, j) {
                (0, 0) => String::new(),
                (i, 0) if *i == 1 => "z".into(),
                (i, 0) => format!("z^{i}"),
                (0, j) if *j == 1 => "w".into(),
                (0, j) => format!("w^{j}"),
                (i, j) => {
                    let zs = if *i == 1 { "z".into() } else { format!("z^{i}") };
                    let ws = if *j == 1 { "w".into() } else { format!("w^{j}") };
                    format!("{zs}*{ws}")
                }
            };
            if mono.is_empty() {
                write!(f, "({c})")?;
            } else if *c == Complex64::new(1.0, 0.0) {
                write!(f, "{mono}")?;
            } else {
                write!(f, "({c})*{mono}")?;
            }
        }
        Ok(())
    }
}
