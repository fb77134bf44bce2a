//! Global model parameters and the principal regime.
//!
//! Every quantity in the crate is a function of three numbers: the symmetry
//! order `n`, the elliptic level `r` and the nome parameter `eps > 0` (with
//! `x = exp(-eps)`).  The *principal regime* is
//!
//! ```text
//! eps > 0,    r > n - 1,    0 < v < 1,
//! ```
//!
//! and all defaults target it.  Two elliptic levels appear throughout: the
//! unprimed level `r` and the primed level `r - 1`; [`Level`] selects between
//! them, and [`ModelParams::twisted`] performs the literal substitution
//! `r -> r - 1` used by the twisted weight systems.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex scalar type used by the whole crate.
pub type C = Complex64;

/// Which of the two elliptic levels a bracket or product lives at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Level {
    /// The unprimed level `r`.
    R,
    /// The primed level `r - 1`.
    RMinus1,
}

/// A spectral parameter value, kept as a plain real coordinate.
///
/// Checks that need complex arguments (half-period shifts, contour-adjacent
/// evaluations) build them from `v` explicitly; the reports echo the real
/// coordinate only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    /// The spectral coordinate `v`.
    pub v: f64,
}

impl SpectralPoint {
    /// Promote to a complex argument.
    pub fn c(self) -> C {
        C::new(self.v, 0.0)
    }
}

/// Model parameters shared by every module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Symmetry order `n >= 2` of the Z/nZ model.
    pub n: usize,
    /// Elliptic level `r > n - 1` (generic, non-integer in tests).
    pub r: f64,
    /// Nome exponent `eps > 0`; the multiplicative nome is `x = exp(-eps)`.
    pub eps: f64,
    /// Half-width of the centered theta summation window.
    pub theta_terms: usize,
    /// Truncation tolerance for infinite products.
    pub prod_tol: f64,
}

impl ModelParams {
    /// Default theta window half-width; ample for every nome in the
    /// principal regime at desk scale.
    pub const DEFAULT_THETA_TERMS: usize = 40;
    /// Default infinite-product truncation tolerance.
    pub const DEFAULT_PROD_TOL: f64 = 1e-16;

    /// Build and validate parameters from `(n, r, eps)`.
    pub fn new(n: usize, r: f64, eps: f64) -> Result<Self> {
        let p = ModelParams {
            n,
            r,
            eps,
            theta_terms: Self::DEFAULT_THETA_TERMS,
            prod_tol: Self::DEFAULT_PROD_TOL,
        };
        p.validate()?;
        Ok(p)
    }

    /// Build from the multiplicative nome `x in (0, 1)` instead of `eps`.
    pub fn from_x(n: usize, r: f64, x: f64) -> Result<Self> {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::domain(format!("x must lie in (0,1), got {x}")));
        }
        Self::new(n, r, -x.ln())
    }

    /// Check the principal-regime constraints.
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::domain(format!("n must be >= 2, got {}", self.n)));
        }
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(Error::domain(format!("eps must be > 0, got {}", self.eps)));
        }
        if !(self.r > self.n as f64 - 1.0) || !self.r.is_finite() {
            return Err(Error::domain(format!(
                "level must satisfy r > n - 1 = {}, got r = {}",
                self.n - 1,
                self.r
            )));
        }
        if !(self.theta_terms >= 8) {
            return Err(Error::domain("theta_terms must be >= 8".to_string()));
        }
        if !(self.prod_tol > 0.0 && self.prod_tol < 1e-3) {
            return Err(Error::domain(format!(
                "prod_tol must lie in (0, 1e-3), got {}",
                self.prod_tol
            )));
        }
        Ok(())
    }

    /// The multiplicative nome `x = exp(-eps)`.
    pub fn x(&self) -> f64 {
        (-self.eps).exp()
    }

    /// `x^y` for real exponents.
    pub fn xpow(&self, y: f64) -> f64 {
        (-self.eps * y).exp()
    }

    /// `x^y` for complex exponents, with the principal convention
    /// `x^y := exp(-eps * y)`.
    pub fn xpow_c(&self, y: C) -> C {
        (-self.eps * y).exp()
    }

    /// The multiplicative spectral coordinate `z = x^{2v} = exp(-2 eps v)`.
    ///
    /// All fractional powers `z^gamma` in the crate are keyed to `v` through
    /// this map (`z^gamma := exp(-2 eps gamma v)`), never to a logarithm of a
    /// previously computed `z`.
    pub fn z_of_v(&self, v: C) -> C {
        (-2.0 * self.eps * v).exp()
    }

    /// Inverse of [`Self::z_of_v`] on the principal branch.
    pub fn v_of_z(&self, z: C) -> C {
        z.ln() / C::new(-2.0 * self.eps, 0.0)
    }

    /// Numeric value of an elliptic [`Level`].
    pub fn level_value(&self, level: Level) -> f64 {
        match level {
            Level::R => self.r,
            Level::RMinus1 => self.r - 1.0,
        }
    }

    /// Literal substitution `r -> r - 1` (twisted weight systems).
    ///
    /// The twisted parameters must themselves sit in the principal regime,
    /// which they do for the generic levels used here.
    pub fn twisted(&self) -> Result<Self> {
        let mut p = self.clone();
        p.r -= 1.0;
        p.validate()?;
        Ok(p)
    }
}
