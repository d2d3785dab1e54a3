//! The kernel E(r, t; b; gamma) of the integral transform, its
//! auxiliaries alpha and beta, their closed-form derivatives, and the
//! coefficient identities that make E solve E_tt - t^ell E_rr = 0.

use crate::error::{Error, Result};
use crate::params::TricomiParams;
use crate::specfun::{hyp2f1_with_omz, Hyp2F1Request};

/// An admissible evaluation point: 0 < b < t, r >= 0.
///
/// The remaining admissibility condition r < phi(t) + phi(b) depends on
/// the parameters and is enforced by the evaluation routines, which
/// reject a vanishing or negative kernel base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint {
    pub t: f64,
    pub b: f64,
    pub r: f64,
}

impl KernelPoint {
    pub fn new(t: f64, b: f64, r: f64) -> Result<Self> {
        if !(t.is_finite() && b.is_finite() && r.is_finite()) {
            return Err(Error::Domain("kernel point must be finite".into()));
        }
        if !(0.0 < b && b < t) {
            return Err(Error::Domain(format!(
                "kernel point needs 0 < b < t, got b = {b}, t = {t}"
            )));
        }
        if r < 0.0 {
            return Err(Error::Domain(format!("kernel point needs r >= 0, got {r}")));
        }
        Ok(KernelPoint { t, b, r })
    }
}

/// alpha, beta and the cancellation-free complement 1 - beta.
#[derive(Debug, Clone, Copy)]
pub struct AlphaBeta {
    pub alpha: f64,
    pub beta: f64,
    /// 1 - beta computed as 4 phi(t) phi(b) / base, which stays accurate
    /// when beta approaches 1.
    pub one_minus_beta: f64,
}

/// Geometry shared by the kernel formulas at one point.
struct Geometry {
    phi_t: f64,
    phi_b: f64,
    /// phi(t) + phi(b)
    s: f64,
    /// phi(t) - phi(b)
    d: f64,
    /// base = (phi(t) + phi(b))^2 - r^2 > 0
    base: f64,
    /// phi'(t)
    phi1: f64,
    /// phi''(t)
    phi2: f64,
}

fn geometry(p: &TricomiParams, k: &KernelPoint) -> Result<Geometry> {
    let phi_t = p.phi(k.t)?;
    let phi_b = p.phi(k.b)?;
    let s = phi_t + phi_b;
    let d = phi_t - phi_b;
    let base = s * s - k.r * k.r;
    if base <= 0.0 {
        return Err(Error::KernelSingularity(base));
    }
    let (phi1, phi2) = p.phi_derivatives(k.t)?;
    Ok(Geometry { phi_t, phi_b, s, d, base, phi1, phi2 })
}

/// alpha = base^(-gamma) and beta = ((phi_t - phi_b)^2 - r^2) / base.
pub fn alpha_beta(p: &TricomiParams, k: &KernelPoint) -> Result<AlphaBeta> {
    let g = geometry(p, k)?;
    let alpha = g.base.powf(-p.gamma());
    let beta = (g.d * g.d - k.r * k.r) / g.base;
    let one_minus_beta = 4.0 * g.phi_t * g.phi_b / g.base;
    Ok(AlphaBeta { alpha, beta, one_minus_beta })
}

/// Kernel E = c_ell * alpha * F(gamma, gamma; 1; beta).
pub fn kernel_e(p: &TricomiParams, k: &KernelPoint) -> Result<f64> {
    let ab = alpha_beta(p, k)?;
    if p.gamma() == 0.0 {
        // F(0,0;1;.) = 1 and alpha = 1: the kernel is the constant c_ell.
        return Ok(p.c() * ab.alpha);
    }
    let g = p.gamma();
    let req = Hyp2F1Request::new(g, g, 1.0, ab.beta);
    let f = hyp2f1_with_omz(&req, ab.one_minus_beta)?.f;
    Ok(p.c() * ab.alpha * f)
}

/// The eight closed-form derivatives of alpha and beta in t and r.
///
/// Fractional powers of alpha are notational shorthand for shifts of the
/// base power, so every field is computed by re-raising the base to the
/// shifted exponent rather than exponentiating alpha itself.
#[derive(Debug, Clone, Copy)]
pub struct Lemma22Derivatives {
    pub alpha_t: f64,
    pub alpha_tt: f64,
    pub beta_t: f64,
    pub beta_tt: f64,
    pub alpha_r: f64,
    pub alpha_rr: f64,
    pub beta_r: f64,
    pub beta_rr: f64,
}

pub fn lemma22_derivatives(p: &TricomiParams, k: &KernelPoint) -> Result<Lemma22Derivatives> {
    let g = geometry(p, k)?;
    let gm = p.gamma();
    let r = k.r;
    let pg1 = g.base.powf(-gm - 1.0); // alpha^((gamma+1)/gamma)
    let pg2 = g.base.powf(-gm - 2.0); // alpha^((gamma+2)/gamma)
    let q = g.phi_t * g.phi_t - g.phi_b * g.phi_b + r * r;

    let alpha_t = -2.0 * gm * g.phi1 * g.s * pg1;
    let alpha_tt = -2.0 * gm * g.phi2 * g.s * pg1 - 2.0 * gm * g.phi1 * g.phi1 * pg1
        + 4.0 * gm * (gm + 1.0) * g.phi1 * g.phi1 * g.s * g.s * pg2;
    let beta_t = 4.0 * g.phi1 * g.phi_b * q / (g.base * g.base);
    let beta_tt = 4.0 * g.phi_b / (g.base * g.base)
        * (g.phi2 * q - 4.0 * g.phi1 * g.phi1 * g.s * q / g.base
            + 2.0 * g.phi_t * g.phi1 * g.phi1);

    let alpha_r = 2.0 * gm * r * pg1;
    let alpha_rr = 2.0 * gm * pg1 + 4.0 * gm * (gm + 1.0) * r * r * pg2;
    let beta_r = -8.0 * r * g.phi_t * g.phi_b / (g.base * g.base);
    let beta_rr = -8.0 * g.phi_t * g.phi_b / g.base.powi(3) * (g.s * g.s + 3.0 * r * r);

    Ok(Lemma22Derivatives {
        alpha_t,
        alpha_tt,
        beta_t,
        beta_tt,
        alpha_r,
        alpha_rr,
        beta_r,
        beta_rr,
    })
}

/// The coefficients of F, F_z, F_zz in the kernel PDE expansion,
/// assembled from the Lemma 2.2 derivatives, together with the closed
/// form G they all reduce to.
#[derive(Debug, Clone, Copy)]
pub struct Lemma23Coefficients {
    pub i: f64,
    pub j: f64,
    pub y: f64,
    pub g: f64,
}

pub fn lemma23_coefficients(p: &TricomiParams, k: &KernelPoint) -> Result<Lemma23Coefficients> {
    let gm = p.gamma();
    if gm == 0.0 {
        return Err(Error::Unsupported(
            "gamma = 0 makes the kernel constant; the coefficient identities degenerate".into(),
        ));
    }
    let geo = geometry(p, k)?;
    let der = lemma22_derivatives(p, k)?;
    let ab = alpha_beta(p, k)?;
    let t_ell = k.t.powf(p.ell());

    let i = der.alpha_tt - t_ell * der.alpha_rr;
    let j = 2.0 * der.alpha_t * der.beta_t + ab.alpha * der.beta_tt
        - t_ell * (2.0 * der.alpha_r * der.beta_r + ab.alpha * der.beta_rr);
    let y = ab.alpha * (der.beta_t * der.beta_t - t_ell * der.beta_r * der.beta_r);
    let g = 2.0 / gm * geo.phi2 * geo.phi_b * geo.base.powf(-gm - 1.0);
    Ok(Lemma23Coefficients { i, j, y, g })
}

/// Finite-difference residual of E_tt - t^ell E_rr with Richardson
/// extrapolation over steps h and h/2, together with the extrapolated
/// derivative magnitudes for relative bounds.
#[derive(Debug, Clone, Copy)]
pub struct KernelPdeResidual {
    pub residual: f64,
    pub e_tt: f64,
    pub e_rr: f64,
}

/// Step choice that keeps every stencil point admissible and resolved:
/// stencils must not cross b = 0 or t = b, and near the singular
/// surface r = phi(t) + phi(b) the step must stay well inside the
/// distance to it, measured by base / |d(base)/dt| and base / |d(base)/dr|.
pub fn suggested_fd_step(p: &TricomiParams, k: &KernelPoint) -> Result<f64> {
    let g = geometry(p, k)?;
    let scale_t = g.base / (2.0 * g.s * g.phi1).max(1e-300);
    let scale_r = if k.r > 0.0 { g.base / (2.0 * k.r) } else { f64::INFINITY };
    Ok([
        1e-3,
        (k.t - k.b) / 10.0,
        k.b / 10.0,
        0.04 * scale_t,
        0.04 * scale_r,
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min))
}

pub fn kernel_pde_residual(p: &TricomiParams, k: &KernelPoint, h: f64) -> Result<KernelPdeResidual> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("step must be positive, got {h}")));
    }
    if k.t - 2.0 * h <= k.b || k.r < 2.0 * h {
        return Err(Error::Domain(
            "kernel point needs a margin of 2h in t and r for the FD stencil".into(),
        ));
    }
    let t_ell = k.t.powf(p.ell());
    let second = |vals: [f64; 3], step: f64| (vals[0] - 2.0 * vals[1] + vals[2]) / (step * step);
    let stencil = |h: f64| -> Result<(f64, f64)> {
        let e = |t: f64, r: f64| kernel_e(p, &KernelPoint { t, b: k.b, r });
        let e_tt = second([e(k.t - h, k.r)?, e(k.t, k.r)?, e(k.t + h, k.r)?], h);
        let e_rr = second([e(k.t, k.r - h)?, e(k.t, k.r)?, e(k.t, k.r + h)?], h);
        Ok((e_tt, e_rr))
    };
    let (tt_h, rr_h) = stencil(h)?;
    let (tt_h2, rr_h2) = stencil(0.5 * h)?;
    let e_tt = (4.0 * tt_h2 - tt_h) / 3.0;
    let e_rr = (4.0 * rr_h2 - rr_h) / 3.0;
    Ok(KernelPdeResidual {
        residual: e_tt - t_ell * e_rr,
        e_tt,
        e_rr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(ell: f64) -> TricomiParams {
        TricomiParams::new(ell).unwrap()
    }

    #[test]
    fn kernel_point_validation() {
        assert!(KernelPoint::new(1.0, 0.5, 0.2).is_ok());
        assert!(KernelPoint::new(1.0, 1.0, 0.2).is_err());
        assert!(KernelPoint::new(1.0, 0.0, 0.2).is_err());
        assert!(KernelPoint::new(1.0, 0.5, -0.1).is_err());
    }

    #[test]
    fn alpha_is_one_for_ell_zero() {
        let p = params(0.0);
        let k = KernelPoint::new(1.0, 0.3, 0.2).unwrap();
        let ab = alpha_beta(&p, &k).unwrap();
        assert_eq!(ab.alpha, 1.0);
    }

    #[test]
    fn beta_vanishes_on_the_characteristic() {
        let p = params(1.0);
        let t = 1.0;
        let b = 0.25;
        let r = p.phi(t).unwrap() - p.phi(b).unwrap();
        let k = KernelPoint::new(t, b, r).unwrap();
        let ab = alpha_beta(&p, &k).unwrap();
        assert!(ab.beta.abs() < 1e-14);
    }

    #[test]
    fn one_minus_beta_identity() {
        for &ell in &[-4.0 / 3.0, 1.0, 3.0] {
            let p = params(ell);
            for &(t, b, r) in &[(1.0, 0.25, 0.1), (2.0, 0.5, 0.3), (0.7, 0.2, 0.05)] {
                let k = KernelPoint::new(t, b, r).unwrap();
                let ab = alpha_beta(&p, &k).unwrap();
                let phi_t = p.phi(t).unwrap();
                let phi_b = p.phi(b).unwrap();
                let base = (phi_t + phi_b).powi(2) - r * r;
                // Eq. (13): (1 - beta) * base = 4 phi(t) phi(b)
                assert_relative_eq!(
                    (1.0 - ab.beta) * base,
                    4.0 * phi_t * phi_b,
                    max_relative = 1e-12
                );
                if p.gamma() != 0.0 {
                    assert_relative_eq!(
                        ab.one_minus_beta,
                        4.0 * phi_t * phi_b * ab.alpha.powf(1.0 / p.gamma()),
                        max_relative = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn kernel_singularity_is_reported() {
        let p = params(1.0);
        let t = 1.0;
        let b = 0.25;
        let r = p.phi(t).unwrap() + p.phi(b).unwrap();
        let k = KernelPoint { t, b, r };
        assert!(matches!(kernel_e(&p, &k), Err(Error::KernelSingularity(_))));
    }

    #[test]
    fn kernel_is_one_for_ell_zero() {
        let p = params(0.0);
        for &(t, b, r) in &[(1.0, 0.3, 0.2), (2.0, 1.0, 0.5), (0.5, 0.1, 0.0)] {
            let k = KernelPoint::new(t, b, r).unwrap();
            assert_relative_eq!(kernel_e(&p, &k).unwrap(), 1.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn edes_kernel_matches_polynomial_form() {
        // gamma = -1: E = c * base * (1 + beta) = 2c (phi_t^2 + phi_b^2 - r^2).
        let p = params(-4.0 / 3.0);
        for &(t, b, r) in &[(1.0, 0.3, 0.2), (2.0, 0.7, 0.4), (1.5, 0.2, 0.0)] {
            let k = KernelPoint::new(t, b, r).unwrap();
            let phi_t = p.phi(t).unwrap();
            let phi_b = p.phi(b).unwrap();
            let expected = 2.0 * p.c() * (phi_t * phi_t + phi_b * phi_b - r * r);
            assert_relative_eq!(kernel_e(&p, &k).unwrap(), expected, max_relative = 1e-13);
        }
    }

    #[test]
    fn tricomi_kernel_value_pinned() {
        // Regression value for ell = 1, (t, b, r) = (1, 0.25, 0.1); the
        // alpha/beta factors are cross-checked against the extended
        // precision oracle in tests/kernel_oracle.rs.
        let p = params(1.0);
        let k = KernelPoint::new(1.0, 0.25, 0.1).unwrap();
        let e = kernel_e(&p, &k).unwrap();
        assert!(e.is_finite() && e > 0.0);
        assert_relative_eq!(e, 1.2414475848321982, max_relative = 1e-12);
    }

    #[test]
    fn alpha_r_vanishes_at_r_zero() {
        let p = params(3.0);
        let k = KernelPoint::new(1.0, 0.4, 0.0).unwrap();
        let der = lemma22_derivatives(&p, &k).unwrap();
        assert_eq!(der.alpha_r, 0.0);
        assert_eq!(der.beta_r, 0.0);
    }

    #[test]
    fn beta_r_second_closed_form_agrees() {
        let p = params(3.0);
        let k = KernelPoint::new(2.0, 0.5, 0.3).unwrap();
        let der = lemma22_derivatives(&p, &k).unwrap();
        let ab = alpha_beta(&p, &k).unwrap();
        // beta_r = -2 r (1 - beta) alpha^(1/gamma), with the fractional
        // power read as a base-power shift.
        let phi_t = p.phi(2.0).unwrap();
        let phi_b = p.phi(0.5).unwrap();
        let base = (phi_t + phi_b).powi(2) - k.r * k.r;
        let second_form = -2.0 * k.r * (1.0 - ab.beta) / base;
        assert_relative_eq!(der.beta_r, second_form, max_relative = 1e-12);
    }

    #[test]
    fn lemma22_matches_finite_differences_at_spec_point() {
        let p = params(1.0);
        let k = KernelPoint::new(1.0, 0.3, 0.2).unwrap();
        let der = lemma22_derivatives(&p, &k).unwrap();
        // First differences at h = 1e-5; second differences need a larger
        // step because their f64 rounding floor is eps/h^2.
        let h = 1e-5;
        let h2 = 1e-4;
        let ab_at = |t: f64, r: f64| alpha_beta(&p, &KernelPoint { t, b: k.b, r }).unwrap();
        let d1 = |f: &dyn Fn(f64) -> f64, x: f64| (f(x + h) - f(x - h)) / (2.0 * h);
        let d2 = |f: &dyn Fn(f64) -> f64, x: f64| (f(x + h2) - 2.0 * f(x) + f(x - h2)) / (h2 * h2);

        let alpha_of_t = |t: f64| ab_at(t, k.r).alpha;
        let beta_of_t = |t: f64| ab_at(t, k.r).beta;
        let alpha_of_r = |r: f64| ab_at(k.t, r).alpha;
        let beta_of_r = |r: f64| ab_at(k.t, r).beta;

        assert_relative_eq!(der.alpha_t, d1(&alpha_of_t, k.t), max_relative = 1e-6);
        assert_relative_eq!(der.alpha_tt, d2(&alpha_of_t, k.t), max_relative = 1e-6);
        assert_relative_eq!(der.beta_t, d1(&beta_of_t, k.t), max_relative = 1e-6);
        assert_relative_eq!(der.beta_tt, d2(&beta_of_t, k.t), max_relative = 1e-5);
        assert_relative_eq!(der.alpha_r, d1(&alpha_of_r, k.r), max_relative = 1e-6);
        assert_relative_eq!(der.alpha_rr, d2(&alpha_of_r, k.r), max_relative = 1e-6);
        assert_relative_eq!(der.beta_r, d1(&beta_of_r, k.r), max_relative = 1e-6);
        assert_relative_eq!(der.beta_rr, d2(&beta_of_r, k.r), max_relative = 1e-6);
    }

    #[test]
    fn lemma23_identities() {
        for &(ell, t, b, r) in &[(1.0, 1.0, 0.4, 0.15), (3.0, 2.0, 0.5, 0.3)] {
            let p = params(ell);
            let k = KernelPoint::new(t, b, r).unwrap();
            let co = lemma23_coefficients(&p, &k).unwrap();
            let z = alpha_beta(&p, &k).unwrap().beta;
            let gm = p.gamma();
            assert_relative_eq!(co.i / co.g, -gm * gm, max_relative = 1e-10);
            assert_relative_eq!(co.j / co.g, 1.0 - (2.0 * gm + 1.0) * z, max_relative = 1e-10);
            assert_relative_eq!(co.y / co.g, z * (1.0 - z), max_relative = 1e-10);
        }
    }

    #[test]
    fn lemma23_y_vanishes_on_characteristic() {
        let p = params(1.0);
        let t = 1.0;
        let b = 0.4;
        let r = p.phi(t).unwrap() - p.phi(b).unwrap();
        let k = KernelPoint::new(t, b, r).unwrap();
        let co = lemma23_coefficients(&p, &k).unwrap();
        // z = 0 exactly, so Y = z(1-z) G = 0 up to rounding in the assembly.
        assert!((co.y / co.g).abs() < 1e-12, "Y/G = {}", co.y / co.g);
    }

    #[test]
    fn lemma23_rejects_gamma_zero() {
        let p = params(0.0);
        let k = KernelPoint::new(1.0, 0.4, 0.1).unwrap();
        assert!(matches!(
            lemma23_coefficients(&p, &k),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn pde_residual_examples() {
        // ell = 0: E is constant, residual is exactly zero.
        let p = params(0.0);
        let k = KernelPoint::new(1.0, 0.3, 0.2).unwrap();
        let res = kernel_pde_residual(&p, &k, 1e-3).unwrap();
        assert_eq!(res.residual, 0.0);

        // EdeS: polynomial kernel.
        let p = params(-4.0 / 3.0);
        let k = KernelPoint::new(1.0, 0.3, 0.2).unwrap();
        let res = kernel_pde_residual(&p, &k, suggested_fd_step(&p, &k).unwrap()).unwrap();
        assert!(res.residual.abs() < 1e-8, "residual {}", res.residual);

        // Tricomi point from the examples.
        let p = params(1.0);
        let k = KernelPoint::new(1.0, 0.25, 0.1).unwrap();
        let res = kernel_pde_residual(&p, &k, 1e-3).unwrap();
        let bound = 1e-6 * (res.e_tt.abs() + res.e_rr.abs() + 1.0);
        assert!(res.residual.abs() < bound, "residual {}", res.residual);
    }

    #[test]
    fn pde_residual_margin_violation() {
        let p = params(1.0);
        let k = KernelPoint::new(1.0, 0.3, 0.0).unwrap();
        assert!(kernel_pde_residual(&p, &k, 1e-3).is_err());
    }

    #[test]
    fn edes_exact_second_derivatives() {
        // For gamma = -1 the kernel is E = 2c (phi_t^2 + phi_b^2 - r^2),
        // so E_tt and E_rr have closed forms to compare against.
        let p = params(-4.0 / 3.0);
        let k = KernelPoint::new(1.0, 0.3, 0.2).unwrap();
        let res = kernel_pde_residual(&p, &k, suggested_fd_step(&p, &k).unwrap()).unwrap();
        let (phi1, phi2) = p.phi_derivatives(k.t).unwrap();
        let phi_t = p.phi(k.t).unwrap();
        let exact_tt = 4.0 * p.c() * (phi1 * phi1 + phi_t * phi2);
        let exact_rr = -4.0 * p.c();
        assert_relative_eq!(res.e_tt, exact_tt, max_relative = 1e-7);
        assert_relative_eq!(res.e_rr, exact_rr, max_relative = 1e-7);
    }
}
