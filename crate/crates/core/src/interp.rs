//! Natural cubic spline on a uniform grid, used to evaluate pointwise
//! transform solutions on dense space-time grids without re-running the
//! quadrature at every node.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CubicSpline {
    x0: f64,
    dx: f64,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl CubicSpline {
    /// Fit samples y_i at x0 + i dx.
    pub fn uniform(x0: f64, dx: f64, values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < 3 || !(dx > 0.0) {
            return Err(Error::InvalidInput("spline needs >= 3 samples and dx > 0".into()));
        }
        // Tridiagonal solve for second derivatives, natural ends.
        let mut second = vec![0.0; n];
        let mut scratch = vec![0.0; n];
        for i in 1..n - 1 {
            let sig = 0.5;
            let p = sig * second[i - 1] + 2.0;
            second[i] = (sig - 1.0) / p;
            let d = (values[i + 1] - 2.0 * values[i] + values[i - 1]) * 3.0 / (dx * dx);
            scratch[i] = (d - sig * scratch[i - 1]) / p;
        }
        second[n - 1] = 0.0;
        for i in (1..n - 1).rev() {
            second[i] = second[i] * second[i + 1] + scratch[i];
        }
        second[0] = 0.0;
        Ok(CubicSpline { x0, dx, values, second })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.values.len();
        let pos = (x - self.x0) / self.dx;
        let i = (pos.floor() as isize).clamp(0, n as isize - 2) as usize;
        let a = (self.x0 + (i + 1) as f64 * self.dx - x) / self.dx;
        let b = 1.0 - a;
        a * self.values[i]
            + b * self.values[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1])
                * self.dx
                * self.dx
                / 6.0
    }
}
