//! Piecewise cubic Hermite interpolation.

/// C¹ cubic Hermite interpolant through `(x_i, y_i)` with slopes `d_i`.
/// Knots are strictly increasing.
#[derive(Debug, Clone)]
pub struct CubicHermite {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl CubicHermite {
    /// Panics if lengths differ, fewer than two knots are given, or knots are
    /// not strictly increasing.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, ds: Vec<f64>) -> Self {
        assert!(xs.len() >= 2 && xs.len() == ys.len() && xs.len() == ds.len());
        assert!(xs.windows(2).all(|w| w[1] > w[0]), "knots must be strictly increasing");
        Self { xs, ys, ds }
    }

    /// Slopes from three-point finite differences (non-uniform spacing).
    pub fn from_values(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let n = xs.len();
        assert!(n >= 2 && ys.len() == n);
        let mut ds = vec![0.0; n];
        if n == 2 {
            let s = (ys[1] - ys[0]) / (xs[1] - xs[0]);
            ds = vec![s, s];
        } else {
            for i in 0..n {
                let (a, b, c) = if i == 0 {
                    (0, 1, 2)
                } else if i == n - 1 {
                    (n - 3, n - 2, n - 1)
                } else {
                    (i - 1, i, i + 1)
                };
                let (x0, x1, x2) = (xs[a], xs[b], xs[c]);
                let x = xs[i];
                ds[i] = ys[a] * (2.0 * x - x1 - x2) / ((x0 - x1) * (x0 - x2))
                    + ys[b] * (2.0 * x - x0 - x2) / ((x1 - x0) * (x1 - x2))
                    + ys[c] * (2.0 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
            }
        }
        Self::new(xs, ys, ds)
    }

    /// Applies the Fritsch–Carlson limiter so the interpolant is monotone on
    /// every interval where the data are monotone.
    pub fn monotone(mut self) -> Self {
        let n = self.xs.len();
        for i in 0..n - 1 {
            let delta = (self.ys[i + 1] - self.ys[i]) / (self.xs[i + 1] - self.xs[i]);
            if delta == 0.0 {
                self.ds[i] = 0.0;
                self.ds[i + 1] = 0.0;
                continue;
            }
            if self.ds[i].signum() != delta.signum() {
                self.ds[i] = 0.0;
            }
            if self.ds[i + 1].signum() != delta.signum() {
                self.ds[i + 1] = 0.0;
            }
            let a = self.ds[i] / delta;
            let b = self.ds[i + 1] / delta;
            let r = a.hypot(b);
            if r > 3.0 {
                let t = 3.0 / r;
                self.ds[i] = t * a * delta;
                self.ds[i + 1] = t * b * delta;
            }
        }
        self
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }
    pub fn ys(&self) -> &[f64] {
        &self.ys
    }
    pub fn slopes(&self) -> &[f64] {
        &self.ds
    }
    pub fn lo(&self) -> f64 {
        self.xs[0]
    }
    pub fn hi(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    fn locate(&self, x: f64) -> usize {
        let i = self.xs.partition_point(|&k| k <= x);
        i.clamp(1, self.xs.len() - 1) - 1
    }

    /// Value, first and second derivative at `x` (cubic extrapolation outside).
    pub fn eval_all(&self, x: f64) -> (f64, f64, f64) {
        let i = self.locate(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.ds[i] * h, self.ds[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let v =
            (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1;
        let d = ((6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * m1)
            / h;
        let dd =
            ((12.0 * t - 6.0) * y0 + (6.0 * t - 4.0) * m0 + (6.0 - 12.0 * t) * y1 + (6.0 * t - 2.0) * m1) / (h * h);
        (v, d, dd)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_all(x).0
    }

    pub fn deriv(&self, x: f64) -> f64 {
        self.eval_all(x).1
    }
}
