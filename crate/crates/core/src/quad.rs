//! Quadrature machinery: Gauss-Legendre and Gauss-Jacobi rules built by
//! the Golub-Welsch method, tanh-sinh integration, and an adaptive
//! Gauss rule with interval bisection.

use crate::error::{Error, Result};
use crate::specfun::gamma_fn;

/// Nodes and weights on [-1, 1]. For Jacobi rules the weights include
/// the (1-x)^alpha (1+x)^beta factor.
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    /// Gauss-Legendre rule with `n` nodes.
    pub fn legendre(n: usize) -> Result<Self> {
        Self::jacobi(n, 0.0, 0.0)
    }

    /// Gauss-Jacobi rule with `n` nodes for the weight
    /// (1-x)^alpha (1+x)^beta on [-1, 1]; alpha, beta > -1.
    pub fn jacobi(n: usize, alpha: f64, beta: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidInput("Gauss rule needs n >= 1".into()));
        }
        if alpha <= -1.0 || beta <= -1.0 {
            return Err(Error::InvalidInput(format!(
                "Jacobi weight exponents must exceed -1, got alpha={alpha}, beta={beta}"
            )));
        }
        let ab = alpha + beta;
        let mu0 = 2.0f64.powf(ab + 1.0) * gamma_fn(alpha + 1.0)? * gamma_fn(beta + 1.0)?
            / gamma_fn(ab + 2.0)?;
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n];
        diag[0] = (beta - alpha) / (ab + 2.0);
        for k in 1..n {
            let kf = k as f64;
            let denom = (2.0 * kf + ab) * (2.0 * kf + ab + 2.0);
            diag[k] = (beta * beta - alpha * alpha) / denom;
            let num = 4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab);
            let den = (2.0 * kf + ab).powi(2) * (2.0 * kf + ab + 1.0) * (2.0 * kf + ab - 1.0);
            off[k - 1] = (num / den).sqrt();
        }
        // k = 1 with ab = -1 would divide by zero in the generic formula;
        // the limit is 4 (1+alpha)(1+beta) / (2+ab)^2 / (3+ab).
        if n > 1 && (1.0 + ab).abs() < 1e-12 {
            off[0] = (4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))).sqrt();
        }
        let (nodes, first_components) = symmetric_tridiagonal_eigen(&mut diag, &mut off)?;
        let weights = first_components.iter().map(|z| mu0 * z * z).collect();
        Ok(GaussRule { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrate over [-1, 1] against the rule's weight.
    pub fn integrate_m11<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Integrate a plain (weight-free Legendre) rule over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half
            * self
                .nodes
                .iter()
                .zip(&self.weights)
                .map(|(&x, &w)| w * f(mid + half * x))
                .sum::<f64>()
    }
}

/// Implicit-QL eigen decomposition of a symmetric tridiagonal matrix.
/// Returns eigenvalues (ascending) and the first component of each
/// normalized eigenvector, which is all Golub-Welsch needs.
fn symmetric_tridiagonal_eigen(diag: &mut [f64], off: &mut [f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    if n == 1 {
        return Ok((diag.to_vec(), z));
    }
    off[n - 1] = 0.0;
    let prec = f64::EPSILON;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                if off[m].abs() <= prec * (diag[m].abs() + diag[m + 1].abs()) {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::NonConvergence(
                    "tridiagonal QL iteration failed to converge".into(),
                ));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            for i in (l..m).rev() {
                let mut f = s * off[i];
                let b = c * off[i];
                if f.abs() >= g.abs() {
                    c = g / f;
                    r = c.hypot(1.0);
                    off[i + 1] = f * r;
                    s = 1.0 / r;
                    c *= s;
                } else {
                    s = f / g;
                    r = s.hypot(1.0);
                    off[i + 1] = g * r;
                    c = 1.0 / r;
                    s *= c;
                }
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
    let nodes = order.iter().map(|&i| diag[i]).collect();
    let firsts = order.iter().map(|&i| z[i]).collect();
    Ok((nodes, firsts))
}

/// Result of an error-estimating quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub est_error: f64,
    pub evals: usize,
}

/// Tanh-sinh quadrature on [a, b] with level doubling until the change
/// between levels drops below the tolerance.
pub fn tanh_sinh<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    use std::f64::consts::FRAC_PI_2;
    let half = 0.5 * (b - a);
    if half == 0.0 {
        return Ok(QuadResult { value: 0.0, est_error: 0.0, evals: 0 });
    }
    let mut evals = 0usize;
    // Abscissae are produced as gaps from the nearer endpoint, so the
    // mapped points never saturate onto a (possibly singular) endpoint.
    let mut eval_at = |u: f64| -> f64 {
        let su = FRAC_PI_2 * u.sinh();
        let w = FRAC_PI_2 * u.cosh() / su.cosh().powi(2);
        let gap = half * 2.0 / ((2.0 * su.abs()).exp() + 1.0); // half*(1-|tanh|)
        let x = if u >= 0.0 { b - gap } else { a + gap };
        evals += 1;
        w * f(x)
    };
    let u_max = 4.0;
    let mut h = 1.0;
    let mut sum = eval_at(0.0);
    let mut k = 1.0;
    while k * h <= u_max {
        sum += eval_at(k * h) + eval_at(-k * h);
        k += 1.0;
    }
    let mut value = half * h * sum;
    let mut err = f64::INFINITY;
    for level in 0..12 {
        h *= 0.5;
        // add the new odd-index points
        let mut k = 1.0;
        while k * h <= u_max {
            sum += eval_at(k * h) + eval_at(-k * h);
            k += 2.0;
        }
        let prev = value;
        value = half * h * sum;
        err = (value - prev).abs();
        if err <= tol * value.abs().max(1.0) && level >= 2 {
            return Ok(QuadResult { value, est_error: err, evals });
        }
    }
    Err(Error::ToleranceNotMet { value, est_error: err })
}

/// Adaptive Gauss quadrature: a 10/21-point pair on each panel with
/// bisection until the summed error estimate meets the tolerance.
pub fn adaptive_gauss<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    let lo = GaussRule::legendre(10)?;
    let hi = GaussRule::legendre(21)?;
    let mut evals = 0usize;

    struct Panel {
        a: f64,
        b: f64,
        value: f64,
        err: f64,
    }
    let estimate = |f: &mut F, a: f64, b: f64, evals: &mut usize| -> Panel {
        let v_lo = lo.integrate(a, b, &mut *f);
        let v_hi = hi.integrate(a, b, &mut *f);
        *evals += lo.len() + hi.len();
        Panel { a, b, value: v_hi, err: (v_hi - v_lo).abs() }
    };

    let mut panels = vec![estimate(f, a, b, &mut evals)];
    for _ in 0..2000 {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let total_err: f64 = panels.iter().map(|p| p.err).sum();
        let target = abs_tol.max(rel_tol * total.abs());
        if total_err <= target {
            return Ok(QuadResult { value: total, est_error: total_err, evals });
        }
        // split the worst panel
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.partial_cmp(&y.1.err).unwrap())
            .unwrap();
        let Panel { a: pa, b: pb, .. } = panels.swap_remove(idx);
        let mid = 0.5 * (pa + pb);
        if mid <= pa || mid >= pb {
            return Err(Error::NonConvergence(
                "adaptive quadrature interval underflow".into(),
            ));
        }
        panels.push(estimate(f, pa, mid, &mut evals));
        panels.push(estimate(f, mid, pb, &mut evals));
    }
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let est_error: f64 = panels.iter().map(|p| p.err).sum();
    Err(Error::ToleranceNotMet { value, est_error })
}
