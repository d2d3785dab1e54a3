//! Solutions w(x, r; b) of the base equation w_rr - A w = 0 with
//! prescribed traces, for A the 1-D second derivative and the Laplacian
//! in two and three dimensions, plus a separable manufactured family
//! with an independent ODE oracle.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions};
use crate::params::TricomiParams;
use crate::quad::GaussRule;

/// A function of (x, b) used as Cauchy data for the base equation.
pub type SpaceFn = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;

/// Source data f(x, b) for the base problem; must be twice continuously
/// differentiable in x for the finite-difference checks to apply.
#[derive(Clone)]
pub struct SourceProfile {
    f: SpaceFn,
}

impl SourceProfile {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
    {
        SourceProfile { f: Arc::new(f) }
    }

    pub fn eval(&self, x: &[f64], b: f64) -> f64 {
        (self.f)(x, b)
    }
}

type EvalFn = Arc<dyn Fn(&[f64], f64, f64) -> f64 + Send + Sync>;

/// A base-equation solution: an evaluator w(x, r; b) together with its
/// traces w(x, 0; b) and w_r(x, 0; b) and the spatial dimension.
///
/// Every constructor in this module builds the symmetric extension, so
/// the first-derivative trace is identically zero. Evaluators are pure
/// and cheaply cloneable.
#[derive(Clone)]
pub struct BaseSolution {
    eval: EvalFn,
    trace0: SpaceFn,
    trace1: SpaceFn,
    dim: usize,
}

impl BaseSolution {
    pub fn from_parts(eval: EvalFn, trace0: SpaceFn, trace1: SpaceFn, dim: usize) -> Self {
        BaseSolution { eval, trace0, trace1, dim }
    }

    pub fn eval(&self, x: &[f64], r: f64, b: f64) -> f64 {
        (self.eval)(x, r, b)
    }

    pub fn trace0(&self, x: &[f64], b: f64) -> f64 {
        (self.trace0)(x, b)
    }

    pub fn trace1(&self, x: &[f64], b: f64) -> f64 {
        (self.trace1)(x, b)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// a*self + b*other, for linearity checks.
    pub fn linear_combination(&self, ca: f64, other: &BaseSolution, cb: f64) -> Result<BaseSolution> {
        if self.dim != other.dim {
            return Err(Error::InvalidInput("dimension mismatch".into()));
        }
        let (e1, e2) = (self.eval.clone(), other.eval.clone());
        let (t01, t02) = (self.trace0.clone(), other.trace0.clone());
        let (t11, t12) = (self.trace1.clone(), other.trace1.clone());
        Ok(BaseSolution {
            eval: Arc::new(move |x, r, b| ca * e1(x, r, b) + cb * e2(x, r, b)),
            trace0: Arc::new(move |x, b| ca * t01(x, b) + cb * t02(x, b)),
            trace1: Arc::new(move |x, b| ca * t11(x, b) + cb * t12(x, b)),
            dim: self.dim,
        })
    }

    /// self + r*h(x, b). The odd part contributes nothing to w_rr, so
    /// the base equation still holds whenever h is affine in x; what it
    /// does switch on is the nonzero first trace w_r(x, 0; b) = h(x, b)
    /// that the residual source term measures.
    pub fn with_odd_trace(&self, h: SpaceFn) -> BaseSolution {
        let eval = self.eval.clone();
        let h_eval = h.clone();
        let trace1 = self.trace1.clone();
        BaseSolution {
            eval: Arc::new(move |x, r, b| eval(x, r, b) + r * h_eval(x, b)),
            trace0: self.trace0.clone(),
            trace1: Arc::new(move |x, b| trace1(x, b) + h(x, b)),
            dim: self.dim,
        }
    }
}

/// d'Alembert solution in one space dimension:
/// w(x, r; b) = (f(x+r, b) + f(x-r, b)) / 2.
pub fn dalembert_1d(f: SourceProfile) -> BaseSolution {
    let f0 = f.clone();
    BaseSolution {
        eval: Arc::new(move |x, r, b| {
            0.5 * (f.eval(&[x[0] + r], b) + f.eval(&[x[0] - r], b))
        }),
        trace0: Arc::new(move |x, b| f0.eval(x, b)),
        trace1: Arc::new(|_, _| 0.0),
        dim: 1,
    }
}

/// Spherical quadrature table: unit vectors and normalized weights.
struct SphereTable {
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

fn sphere_table(n_polar: usize, n_azimuthal: usize) -> Result<SphereTable> {
    let rule = GaussRule::legendre(n_polar)?;
    let mut points = Vec::with_capacity(n_polar * n_azimuthal);
    let mut weights = Vec::with_capacity(n_polar * n_azimuthal);
    let mut total = 0.0;
    for (&mu, &wm) in rule.nodes().iter().zip(rule.weights()) {
        let sin_theta = (1.0 - mu * mu).sqrt();
        for j in 0..n_azimuthal {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / n_azimuthal as f64;
            points.push([sin_theta * phi.cos(), sin_theta * phi.sin(), mu]);
            weights.push(wm);
            total += wm;
        }
    }
    // Self-calibration: the mean of 1 over the sphere must be exactly 1.
    for w in &mut weights {
        *w /= total;
    }
    Ok(SphereTable { points, weights })
}

/// Fourth-order central derivative of an even/odd-symmetric profile.
fn derivative_4th<F: Fn(f64) -> f64>(g: F, r: f64) -> f64 {
    let h = 1e-3 * r.abs().max(1.0);
    (g(r - 2.0 * h) - 8.0 * g(r - h) + 8.0 * g(r + h) - g(r + 2.0 * h)) / (12.0 * h)
}

/// Kirchhoff solution in three space dimensions:
/// w(x, r; b) = d/dr [ r * (spherical mean of f at radius r) ].
///
/// The spherical mean is an even function of r, so the helper
/// g(s) = s * mean(|s|) is odd and the stencil may cross s = 0.
pub fn kirchhoff_3d(f: SourceProfile, n_polar: usize) -> Result<BaseSolution> {
    let table = Arc::new(sphere_table(n_polar, 2 * n_polar)?);
    let f0 = f.clone();
    let mean = move |x: &[f64], r: f64, b: f64| -> f64 {
        let mut acc = 0.0;
        for (p, w) in table.points.iter().zip(&table.weights) {
            let y = [x[0] + r * p[0], x[1] + r * p[1], x[2] + r * p[2]];
            acc += w * f.eval(&y, b);
        }
        acc
    };
    Ok(BaseSolution {
        eval: Arc::new(move |x, r, b| {
            let g = |s: f64| s * mean(x, s.abs(), b);
            derivative_4th(g, r)
        }),
        trace0: Arc::new(move |x, b| f0.eval(x, b)),
        trace1: Arc::new(|_, _| 0.0),
        dim: 3,
    })
}

/// Disk quadrature for the weight 1/sqrt(1-|y|^2): the substitution
/// rho = sin(theta) turns the weighted radial integral into the plain
/// smooth integral of f(sin theta) sin theta over [0, pi/2], handled by
/// Gauss-Legendre; a trapezoid rule covers the angle.
struct DiskTable {
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
}

fn disk_table(n_radial: usize, n_angular: usize) -> Result<DiskTable> {
    let rule = GaussRule::legendre(n_radial)?;
    let mut points = Vec::with_capacity(n_radial * n_angular);
    let mut weights = Vec::with_capacity(n_radial * n_angular);
    let mut total = 0.0;
    for (&xn, &xw) in rule.nodes().iter().zip(rule.weights()) {
        let theta = std::f64::consts::FRAC_PI_4 * (xn + 1.0);
        let rho = theta.sin();
        let wr = xw * rho;
        for j in 0..n_angular {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / n_angular as f64;
            points.push([rho * phi.cos(), rho * phi.sin()]);
            weights.push(wr);
            total += wr;
        }
    }
    // Self-calibration on f = 1: the weighted disk average of 1 must be 1.
    for w in &mut weights {
        *w /= total;
    }
    Ok(DiskTable { points, weights })
}

/// Poisson solution in two space dimensions:
/// w(x, r; b) = d/dr [ r * weighted disk average of f at radius r ].
pub fn poisson_2d(f: SourceProfile, n_radial: usize, n_angular: usize) -> Result<BaseSolution> {
    if n_radial < 2 || n_angular < 4 {
        return Err(Error::InvalidInput("disk rule too small".into()));
    }
    let table = Arc::new(disk_table(n_radial, n_angular)?);
    let f0 = f.clone();
    let mean = move |x: &[f64], r: f64, b: f64| -> f64 {
        let mut acc = 0.0;
        for (p, w) in table.points.iter().zip(&table.weights) {
            acc += w * f.eval(&[x[0] + r * p[0], x[1] + r * p[1]], b);
        }
        acc
    };
    Ok(BaseSolution {
        eval: Arc::new(move |x, r, b| {
            let g = |s: f64| s * mean(x, s.abs(), b);
            derivative_4th(g, r)
        }),
        trace0: Arc::new(move |x, b| f0.eval(x, b)),
        trace1: Arc::new(|_, _| 0.0),
        dim: 2,
    })
}

/// Manufactured separable solution w = cos(kx) cos(kr) g(b) in one
/// space dimension.
pub fn separable_solution(k: f64, g: Arc<dyn Fn(f64) -> f64 + Send + Sync>) -> BaseSolution {
    let g0 = g.clone();
    BaseSolution {
        eval: Arc::new(move |x, r, b| (k * x[0]).cos() * (k * r).cos() * g(b)),
        trace0: Arc::new(move |x, b| (k * x[0]).cos() * g0(b)),
        trace1: Arc::new(|_, _| 0.0),
        dim: 1,
    }
}

/// Ground-truth oracle for the separable problem: with
/// u(x, t) = cos(kx) U(t), the full equation u_tt - t^ell u_xx = cos(kx) g(t)
/// reduces to the scalar initial value problem
///
/// ```text
///     U'' + k^2 t^ell U = g(t),  U(0) = U'(0) = 0,
/// ```
///
/// integrated adaptively from t = 0.
pub struct SeparableOracle {
    ell: f64,
    k: f64,
    g: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    t_max: f64,
    tol: f64,
    start: (f64, f64, f64),
}

pub fn ode_oracle_separable(
    p: &TricomiParams,
    k: f64,
    g: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    t_max: f64,
    tol: f64,
) -> Result<SeparableOracle> {
    if !(t_max > 0.0) {
        return Err(Error::Domain("oracle needs t_max > 0".into()));
    }
    let ell = p.ell();
    let start = if ell >= 0.0 {
        (0.0, 0.0, 0.0)
    } else {
        // The coefficient t^ell is singular at the origin; start from a
        // two-term Taylor state whose neglected contribution is far
        // below the integration tolerance.
        let g0 = g(0.0);
        let dg0 = (g(1e-6) - g(0.0)) / 1e-6;
        let scale = (k * k * g0.abs().max(1.0)).max(1.0);
        let eps = (tol * 1e-2 * (ell + 3.0) * (ell + 4.0) / scale)
            .powf(1.0 / (ell + 4.0))
            .min(1e-4);
        if !eps.is_finite() || eps < 1e-13 {
            return Err(Error::StepSizeUnderflow(0.0));
        }
        let u = 0.5 * g0 * eps * eps + dg0 * eps.powi(3) / 6.0;
        let v = g0 * eps + 0.5 * dg0 * eps * eps;
        (eps, u, v)
    };
    Ok(SeparableOracle { ell, k, g, t_max, tol, start })
}

impl SeparableOracle {
    /// U(t), integrating from the origin on every call.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(0.0 <= t && t <= self.t_max) {
            return Err(Error::Domain(format!(
                "oracle evaluated outside [0, {}]: {t}",
                self.t_max
            )));
        }
        let (t0, u0, v0) = self.start;
        if t <= t0 {
            // Inside the Taylor startup region.
            let g0 = (self.g)(0.0);
            return Ok(0.5 * g0 * t * t);
        }
        let ell = self.ell;
        let k2 = self.k * self.k;
        let g = self.g.clone();
        let opts = OdeOptions {
            rel_tol: self.tol,
            abs_tol: self.tol * 1e-2,
            ..OdeOptions::default()
        };
        let y = ode::integrate(
            move |t: f64, y: &[f64], dy: &mut [f64]| {
                dy[0] = y[1];
                let coeff = if t > 0.0 { t.powf(ell) } else { 0.0 };
                dy[1] = g(t) - k2 * coeff * y[0];
            },
            t0,
            &[u0, v0],
            t,
            &opts,
        )?;
        Ok(y[0])
    }
}
