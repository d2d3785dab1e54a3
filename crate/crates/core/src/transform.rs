//! The integral operators of the method: K maps base-equation solutions
//! to solutions of the degenerate equation with vanishing initial data;
//! K0 and K1 produce homogeneous solutions with prescribed initial
//! value and initial derivative; their sum solves the full Cauchy
//! problem.
//!
//! After the inner substitution r = (phi(t) - phi(b)) s and the outer
//! substitution b = t sigma^(2/(ell+2)), the double integral of K reads
//!
//!   u = c_ell q t phi(t)^(1-2gamma) Int_0^1 dsigma sigma^(q-1) (1-sigma)
//! ```text
//!         Int_0^1 ds D^(-gamma) F(gamma,gamma;1;beta) w(x, r; b)
//! ```
//!
//! with q = 2/(ell+2), D = (1+sigma)^2 - (1-sigma)^2 s^2 and
//! beta = (1-sigma)^2 (1-s^2) / D, so phi(b) = phi(t) sigma is linear in
//! sigma. The integrand keeps algebraic endpoint behaviour at sigma = 0
//! and a shrinking smoothness scale near s = 1, which the graded
//! composite panels below resolve.

use crate::error::{Error, Result};

use crate::params::TricomiParams;
use crate::quad::GaussRule;
use crate::specfun::{gamma_fn, hyp2f1_with_omz, Hyp2F1Request};
use crate::wave::BaseSolution;

/// Which rule family a quadrature-backed operation should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadScheme {
    GaussLegendre,
    GaussJacobi,
    TanhSinh,
    Adaptive,
}

/// Scheme, order and tolerances controlling every integral in this
/// module. `endpoint_exponent` is the Jacobi weight exponent for
/// schemes that absorb an endpoint singularity; K0 and K1 override it
/// with the exponents their definitions prescribe.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub scheme: QuadScheme,
    pub nodes: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub endpoint_exponent: f64,
}

impl QuadratureSpec {
    pub fn new(scheme: QuadScheme, nodes: usize, abs_tol: f64, rel_tol: f64) -> Result<Self> {
        if nodes < 2 {
            return Err(Error::InvalidInput("QuadratureSpec needs nodes >= 2".into()));
        }
        if !(abs_tol > 0.0 && rel_tol > 0.0) {
            return Err(Error::InvalidInput("QuadratureSpec tolerances must be positive".into()));
        }
        Ok(QuadratureSpec { scheme, nodes, abs_tol, rel_tol, endpoint_exponent: 0.0 })
    }

    /// Default: 16-node Gauss panels, 1e-6 tolerances. The error
    /// estimate compares two full resolutions and is conservative, so
    /// tight tolerances want more nodes as well.
    pub fn standard() -> Self {
        QuadratureSpec {
            scheme: QuadScheme::GaussLegendre,
            nodes: 16,
            abs_tol: 1e-6,
            rel_tol: 1e-6,
            endpoint_exponent: 0.0,
        }
    }

    pub fn with_tols(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::standard()
    }
}

/// Value with an error estimate and the number of integrand
/// evaluations spent.
#[derive(Debug, Clone, Copy)]
pub struct TransformResult {
    pub value: f64,
    pub est_error: f64,
    pub nodes_used: usize,
}

/// Geometric panel boundaries on [0, 1] clustering toward 0 with the
/// given depth, then mildly toward 1.
fn graded_panels(depth: usize) -> Vec<(f64, f64)> {
    let mut cuts = vec![0.0];
    for j in (0..=depth).rev() {
        cuts.push(0.25f64.powi(j as i32));
    }
    // cuts now ends at 1/4^0 = 1; refine the top quarter toward 1
    cuts.pop();
    cuts.extend_from_slice(&[0.5, 0.75, 0.875, 0.9375, 1.0]);
    cuts.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Panels of [0, 1] clustering toward 0 until the panel width falls
/// below `scale`, the smoothness scale of the integrand there. Used for
/// the inner gap variable g = 1 - s.
fn inner_panels(scale: f64) -> Vec<(f64, f64)> {
    let floor = scale.max(1e-14).min(0.25);
    let mut cuts = vec![1.0, 0.5];
    let mut w = 0.5;
    while w > floor {
        w *= 0.25;
        cuts.push(w);
    }
    cuts.push(0.0);
    cuts.reverse();
    cuts.windows(2).map(|c| (c[0], c[1])).collect()
}

/// Substitution exponent for the outer integral, b = t sigma^pe.
///
/// For ell < 0 the power pe = 2/(ell+2) makes phi(b) linear in sigma
/// and turns every phi(b)-power in the integrand polynomial. For
/// ell >= 0 those powers are already smooth in b itself (the leading
/// kernel term phi(b)^(1-2gamma) is exactly linear in b), and the
/// substitution would reintroduce sigma^(1-2gamma) endpoint terms, so
/// the identity map is kept.
fn outer_exponent(p: &TricomiParams) -> f64 {
    if p.ell() < 0.0 {
        2.0 / (p.ell() + 2.0)
    } else {
        1.0
    }
}

/// One full evaluation of the substituted double integral at a given
/// resolution. `w_eval(r, b)` must return w(x, r; b).
fn k_double_integral<W>(
    p: &TricomiParams,
    t: f64,
    w_eval: &W,
    nodes: usize,
    depth: usize,
    nodes_used: &mut usize,
) -> Result<f64>
where
    W: Fn(f64, f64) -> f64,
{
    let gamma = p.gamma();
    let pe = outer_exponent(p);
    let phi_t = p.phi(t)?;
    let rule = GaussRule::legendre(nodes)?;
    let mut outer = 0.0;
    for (lo, hi) in graded_panels(depth) {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (&xn, &xw) in rule.nodes().iter().zip(rule.weights()) {
            let sigma = mid + half * xn;
            let b = t * sigma.powf(pe);
            let phi_b = p.phi(b)?;
            let sum = phi_t + phi_b;
            let diff = phi_t - phi_b;
            // Inner integral over the gap g = 1 - s after r = diff * s.
            // The kernel factors lose smoothness near g = 0 on the scale
            // phi(b)/phi(t), and the factored base expression below stays
            // cancellation-free however small the gap gets.
            let mut inner = 0.0;
            for (glo, ghi) in inner_panels(phi_b / phi_t) {
                let ihalf = 0.5 * (ghi - glo);
                let imid = 0.5 * (ghi + glo);
                for (&yn, &yw) in rule.nodes().iter().zip(rule.weights()) {
                    let g = imid + ihalf * yn;
                    let s = 1.0 - g;
                    let r = diff * s;
                    // base = sum^2 - r^2 = (sum - r)(sum + r) with
                    // sum - r = phi_t g + phi_b (2 - g)
                    let base = (phi_t * g + phi_b * (2.0 - g)) * (sum + r);
                    let beta = diff * diff * (g * (2.0 - g)) / base;
                    let omb = 4.0 * phi_t * phi_b / base;
                    let f = if gamma == 0.0 {
                        1.0
                    } else {
                        hyp2f1_with_omz(&Hyp2F1Request::new(gamma, gamma, 1.0, beta), omb)?.f
                    };
                    inner += ihalf * yw * base.powf(-gamma) * f * w_eval(r, b);
                    *nodes_used += 1;
                }
            }
            let jac = pe * t * sigma.powf(pe - 1.0) * diff;
            outer += half * xw * jac * inner;
        }
    }
    Ok(p.c() * outer)
}

/// Apply the transform K to a base-equation solution at one point
/// (x, t): the solution of u_tt - t^ell A u = f with vanishing data,
/// where f(x, b) = w(x, 0; b).
pub fn apply_k(
    w: &BaseSolution,
    p: &TricomiParams,
    x: &[f64],
    t: f64,
    q: &QuadratureSpec,
) -> Result<TransformResult> {
    if t < 0.0 {
        return Err(Error::Domain(format!("apply_k needs t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(TransformResult { value: 0.0, est_error: 0.0, nodes_used: 0 });
    }
    let w_eval = |r: f64, b: f64| w.eval(x, r, b);
    let mut nodes_used = 0usize;
    let depth = depth_for(q);
    let nodes = q.nodes.max(8);
    let hi = k_double_integral(p, t, &w_eval, nodes, depth, &mut nodes_used)?;
    let lo = k_double_integral(p, t, &w_eval, (2 * nodes / 3).max(6), depth.saturating_sub(2), &mut nodes_used)?;
    finish(hi, lo, nodes_used, q)
}

fn depth_for(q: &QuadratureSpec) -> usize {
    let tol = q.abs_tol.min(q.rel_tol).max(1e-14);
    // Panels shrink by 4 per level and the ungraded tail scales like
    // the first panel width, so grade down to the tolerance.
    ((-tol.log2() / 2.0).ceil() as usize).clamp(6, 18)
}

fn finish(hi: f64, lo: f64, nodes_used: usize, q: &QuadratureSpec) -> Result<TransformResult> {
    let est_error = (hi - lo).abs();
    let target = q.abs_tol.max(q.rel_tol * hi.abs());
    if est_error > target {
        return Err(Error::ToleranceNotMet { value: hi, est_error });
    }
    Ok(TransformResult { value: hi, est_error, nodes_used })
}

/// The extra source produced by a nonzero first trace h = w_r(x, 0; b):
///
///   c_ell (phi'(t))^2 Int_0^t (phi(t)+phi(b))^(-2gamma)
/// ```text
///       F(gamma, gamma; 1; ((phi(t)-phi(b))/(phi(t)+phi(b)))^2) h(x, b) db.
/// ```
///
/// Vanishes identically when h = 0, which recovers the clean equation.
pub fn source_residual_term<H>(
    h: &H,
    p: &TricomiParams,
    x: &[f64],
    t: f64,
    q: &QuadratureSpec,
) -> Result<TransformResult>
where
    H: Fn(&[f64], f64) -> f64,
{
    if t < 0.0 {
        return Err(Error::Domain(format!("source term needs t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(TransformResult { value: 0.0, est_error: 0.0, nodes_used: 0 });
    }
    let gamma = p.gamma();
    let pe = outer_exponent(p);
    let phi_t = p.phi(t)?;
    let (phi1, _) = p.phi_derivatives(t)?;
    let mut nodes_used = 0usize;
    let single = |nodes: usize, depth: usize, used: &mut usize| -> Result<f64> {
        let rule = GaussRule::legendre(nodes)?;
        let mut acc = 0.0;
        for (lo, hi) in graded_panels(depth) {
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (&xn, &xw) in rule.nodes().iter().zip(rule.weights()) {
                let sigma = mid + half * xn;
                let b = t * sigma.powf(pe);
                let phi_b = p.phi(b)?;
                let sum = phi_t + phi_b;
                let z = ((phi_t - phi_b) / sum).powi(2);
                let omz = 4.0 * phi_t * phi_b / (sum * sum);
                let f = if gamma == 0.0 {
                    1.0
                } else {
                    hyp2f1_with_omz(&Hyp2F1Request::new(gamma, gamma, 1.0, z), omz)?.f
                };
                let jac = pe * t * sigma.powf(pe - 1.0);
                acc += half * xw * jac * sum.powf(-2.0 * gamma) * f * h(x, b);
                *used += 1;
            }
        }
        Ok(p.c() * phi1 * phi1 * acc)
    };
    let depth = depth_for(q);
    let nodes = q.nodes.max(8);
    let hi = single(nodes, depth, &mut nodes_used)?;
    let lo = single((2 * nodes / 3).max(6), depth.saturating_sub(2), &mut nodes_used)?;
    finish(hi, lo, nodes_used, q)
}

/// Gauss-Jacobi evaluation of Int_0^1 v(x, phi(t) s) (1-s^2)^(expo) ds
/// with the (1-s)^expo factor absorbed by the rule.
fn jacobi_half_interval<V>(v: &V, x: &[f64], phi_t: f64, expo: f64, nodes: usize) -> Result<f64>
where
    V: Fn(&[f64], f64) -> f64,
{
    let rule = GaussRule::jacobi(nodes, expo, 0.0)?;
    let mut acc = 0.0;
    for (&u, &w) in rule.nodes().iter().zip(rule.weights()) {
        let s = 0.5 * (1.0 + u);
        acc += w * ((3.0 + u) / 2.0).powf(expo) * v(x, phi_t * s);
    }
    // ds = du/2 and (1-s^2)^e = ((1-u)/2)^e ((3+u)/2)^e
    Ok(acc * 0.5f64.powf(expo + 1.0))
}

/// K0: weighted average reproducing the initial value,
/// (K0 v)(x, 0) = v(x, 0). Defined for gamma > 0.
pub fn apply_k0<V>(v: &V, p: &TricomiParams, x: &[f64], t: f64, q: &QuadratureSpec) -> Result<f64>
where
    V: Fn(&[f64], f64) -> f64,
{
    let gamma = p.gamma();
    if gamma <= 0.0 {
        return Err(Error::Unsupported(format!(
            "K0 needs gamma > 0 (ell > 0); got gamma = {gamma}"
        )));
    }
    if t < 0.0 {
        return Err(Error::Domain("K0 needs t >= 0".into()));
    }
    let coeff = 2.0f64.powf(2.0 - 2.0 * gamma) * gamma_fn(2.0 * gamma)? / gamma_fn(gamma)?.powi(2);
    let phi_t = p.phi(t)?;
    Ok(coeff * jacobi_half_interval(v, x, phi_t, gamma - 1.0, q.nodes.max(8))?)
}

/// K1: the Dirichlet-to-Neumann counterpart,
/// (K1 v)(x, 0) = 0 and d_t(K1 v)(x, 0) = v(x, 0). Defined for gamma < 1.
pub fn apply_k1<V>(v: &V, p: &TricomiParams, x: &[f64], t: f64, q: &QuadratureSpec) -> Result<f64>
where
    V: Fn(&[f64], f64) -> f64,
{
    let gamma = p.gamma();
    if gamma >= 1.0 {
        return Err(Error::Unsupported(format!(
            "K1 needs gamma < 1; got gamma = {gamma}"
        )));
    }
    if t < 0.0 {
        return Err(Error::Domain("K1 needs t >= 0".into()));
    }
    let coeff = 2.0f64.powf(2.0 * gamma) * gamma_fn(2.0 - 2.0 * gamma)? / gamma_fn(1.0 - gamma)?.powi(2);
    let phi_t = p.phi(t)?;
    Ok(t * coeff * jacobi_half_interval(v, x, phi_t, -gamma, q.nodes.max(8))?)
}

/// Solve the homogeneous Cauchy problem u_tt = t^ell A u with
/// u(x, 0) = phi0 and u_t(x, 0) = phi1, where v0 and v1 are
/// base-equation solutions carrying phi0 and phi1 as initial values
/// (and vanishing first trace). Requires ell > 0.
pub fn solve_cauchy(
    v0: &BaseSolution,
    v1: &BaseSolution,
    p: &TricomiParams,
    x: &[f64],
    t: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    if p.ell() <= 0.0 {
        return Err(Error::Unsupported(format!(
            "the Cauchy solver needs ell > 0, got {}",
            p.ell()
        )));
    }
    let ev0 = |x: &[f64], tau: f64| v0.eval(x, tau, 0.0);
    let ev1 = |x: &[f64], tau: f64| v1.eval(x, tau, 0.0);
    Ok(apply_k0(&ev0, p, x, t, q)? + apply_k1(&ev1, p, x, t, q)?)
}
