//! Equation parameters: the exponent ell and everything derived from it.

use crate::error::{Error, Result};
use crate::specfun::gamma_fn;

/// The exponent ell of u_tt - t^ell A u = f together with the constants
/// it determines:
///
/// * `gamma = ell / (2(ell+2))`, the kernel singularity exponent,
/// * `c = ((ell+2)/4)^(-ell/(ell+2))`, the kernel prefactor,
/// * `a_coef`, `b_coef`, the forcing coefficients of the K0/K1
///   operator identities; only defined for gamma > 0 resp. gamma < 1,
///   and stored as `None` outside those ranges.
///
/// Only finite real ell > -2 is supported. The value is immutable after
/// construction and freely shareable across threads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TricomiParams {
    ell: f64,
    gamma: f64,
    c: f64,
    a_coef: Option<f64>,
    b_coef: Option<f64>,
}

impl TricomiParams {
    /// Build the parameter set from ell alone.
    pub fn new(ell: f64) -> Result<Self> {
        if !ell.is_finite() || ell <= -2.0 {
            return Err(Error::InvalidEll(ell));
        }
        let gamma = ell / (2.0 * (ell + 2.0));
        let c = ((ell + 2.0) / 4.0).powf(-ell / (ell + 2.0));
        let a_coef = if gamma > 0.0 {
            Some(
                2.0f64.powf(1.0 - 2.0 * gamma) * ell * gamma_fn(2.0 * gamma)?
                    / (2.0 * gamma * gamma_fn(gamma)?.powi(2)),
            )
        } else {
            None
        };
        let b_coef = if gamma < 1.0 {
            Some(
                (ell + 2.0) * 2.0f64.powf(2.0 * gamma - 1.0) * gamma_fn(2.0 - 2.0 * gamma)?
                    / gamma_fn(1.0 - gamma)?.powi(2),
            )
        } else {
            None
        };
        Ok(TricomiParams {
            ell,
            gamma,
            c,
            a_coef,
            b_coef,
        })
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Kernel prefactor c_ell.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// Coefficient of the K0 operator identity, defined for gamma > 0.
    pub fn a_coef(&self) -> Option<f64> {
        self.a_coef
    }

    /// Coefficient of the K1 operator identity, defined for gamma < 1.
    pub fn b_coef(&self) -> Option<f64> {
        self.b_coef
    }

    /// Distance function phi(t) = (2/(ell+2)) t^((ell+2)/2), t >= 0.
    pub fn phi(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("phi needs t >= 0, got {t}")));
        }
        Ok(2.0 / (self.ell + 2.0) * t.powf((self.ell + 2.0) / 2.0))
    }

    /// Inverse of the distance function: phi_inverse(phi(t)) = t.
    pub fn phi_inverse(&self, tau: f64) -> Result<f64> {
        if !(tau >= 0.0) {
            return Err(Error::Domain(format!("phi_inverse needs tau >= 0, got {tau}")));
        }
        Ok(((self.ell + 2.0) / 2.0 * tau).powf(2.0 / (self.ell + 2.0)))
    }

    /// First and second derivatives of phi: (t^(ell/2), (ell/2) t^(ell/2 - 1)).
    ///
    /// At t = 0 these are singular whenever ell < 2, which is reported
    /// as an error rather than returned as infinity.
    pub fn phi_derivatives(&self, t: f64) -> Result<(f64, f64)> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("phi_derivatives needs t >= 0, got {t}")));
        }
        if t == 0.0 && self.ell < 2.0 {
            return Err(Error::Domain(
                "phi derivatives are singular at t = 0 for ell < 2".into(),
            ));
        }
        let phi1 = t.powf(self.ell / 2.0);
        let phi2 = self.ell / 2.0 * t.powf(self.ell / 2.0 - 1.0);
        Ok((phi1, phi2))
    }
}
