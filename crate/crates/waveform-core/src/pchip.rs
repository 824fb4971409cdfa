//! Monotonicity-preserving piecewise cubic Hermite tables.
//!
//! Nodes carry both values and slopes (the slopes are analytic at
//! construction time for every segment family in this crate). Slopes are
//! capped at three times the local secant, which is the classical
//! Fritsch-Carlson sufficient condition for the interpolant to stay
//! monotone on each interval.

use alloc::vec::Vec;

/// Errors building a monotone table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TableError {
    TooFewNodes,
    NonIncreasingX,
    NonMonotoneY,
    NonFiniteInput,
    SlopeSignMismatch,
}

impl core::fmt::Display for TableError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TableError::TooFewNodes => f.write_str("need at least two nodes"),
            TableError::NonIncreasingX => f.write_str("x must be strictly increasing"),
            TableError::NonMonotoneY => f.write_str("y must be strictly monotone"),
            TableError::NonFiniteInput => f.write_str("nodes must be finite"),
            TableError::SlopeSignMismatch => f.write_str("slopes must match the y direction"),
        }
    }
}

/// Piecewise cubic Hermite interpolant through strictly monotone data.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MonotoneTable {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Node slopes dy/dx after monotonicity capping.
    d: Vec<f64>,
    /// +1.0 if y increases with x, -1.0 otherwise.
    dir: f64,
}

impl MonotoneTable {
    /// Build from strictly increasing `x`, strictly monotone `y`, and node
    /// slopes `d` (same sign as the y direction, zeros allowed).
    pub fn with_slopes(x: Vec<f64>, y: Vec<f64>, mut d: Vec<f64>) -> Result<Self, TableError> {
        let n = x.len();
        if n < 2 || y.len() != n || d.len() != n {
            return Err(TableError::TooFewNodes);
        }
        if x.iter().chain(y.iter()).chain(d.iter()).any(|v| !v.is_finite()) {
            return Err(TableError::NonFiniteInput);
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(TableError::NonIncreasingX);
        }
        let dir = if y[n - 1] > y[0] { 1.0 } else { -1.0 };
        if y.windows(2).any(|w| dir * (w[1] - w[0]) <= 0.0) {
            return Err(TableError::NonMonotoneY);
        }
        if d.iter().any(|&s| dir * s < 0.0) {
            return Err(TableError::SlopeSignMismatch);
        }
        // Fritsch-Carlson cap: |d_i| <= 3 min(|secant_left|, |secant_right|).
        for i in 0..n {
            let mut cap = f64::INFINITY;
            if i > 0 {
                cap = cap.min(3.0 * ((y[i] - y[i - 1]) / (x[i] - x[i - 1])).abs());
            }
            if i + 1 < n {
                cap = cap.min(3.0 * ((y[i + 1] - y[i]) / (x[i + 1] - x[i])).abs());
            }
            if d[i].abs() > cap {
                d[i] = dir * cap;
            }
        }
        Ok(MonotoneTable { x, y, d, dir })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x_nodes(&self) -> &[f64] {
        &self.x
    }

    pub fn y_nodes(&self) -> &[f64] {
        &self.y
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    /// (y at first x node, y at last x node).
    pub fn y_ends(&self) -> (f64, f64) {
        (self.y[0], self.y[self.y.len() - 1])
    }

    /// +1.0 if y increases with x, -1.0 otherwise.
    pub fn direction(&self) -> f64 {
        self.dir
    }

    /// Translate all y values by `dy` (re-anchoring a xi(w) table).
    pub fn shift_y(&mut self, dy: f64) {
        for y in &mut self.y {
            *y += dy;
        }
    }

    fn interval_of(&self, x: f64) -> usize {
        match self.x.partition_point(|&xi| xi <= x) {
            0 => 0,
            p if p >= self.x.len() => self.x.len() - 2,
            p => p - 1,
        }
    }

    fn hermite(&self, i: usize, x: f64) -> (f64, f64, f64) {
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (d0, d1) = (self.d[i], self.d[i + 1]);

        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        let v = h00 * y0 + h * h10 * d0 + h01 * y1 + h * h11 * d1;

        let dh00 = 6.0 * t * (t - 1.0);
        let dh10 = (1.0 - t) * (1.0 - 3.0 * t);
        let dh01 = -dh00;
        let dh11 = t * (3.0 * t - 2.0);
        let dv = (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1;

        let d2h00 = 12.0 * t - 6.0;
        let d2h10 = 6.0 * t - 4.0;
        let d2h01 = -d2h00;
        let d2h11 = 6.0 * t - 2.0;
        let d2v = (d2h00 * y0 + d2h01 * y1) / (h * h) + (d2h10 * d0 + d2h11 * d1) / h;

        (v, dv, d2v)
    }

    /// Interpolated value at `x` (clamped to the node range).
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_all(x).0
    }

    /// (value, dy/dx, d2y/dx2) at `x`.
    pub fn eval_all(&self, x: f64) -> (f64, f64, f64) {
        let x = x.clamp(self.x[0], self.x[self.x.len() - 1]);
        self.hermite(self.interval_of(x), x)
    }

    /// Solve y(x) = y_target for x. `y_target` must lie within the y range
    /// (clamped otherwise). Bisection on the monotone cubic, to near machine
    /// precision in x.
    pub fn invert(&self, y_target: f64) -> f64 {
        let n = self.y.len();
        let (ylo, yhi) = if self.dir > 0.0 {
            (self.y[0], self.y[n - 1])
        } else {
            (self.y[n - 1], self.y[0])
        };
        let y_target = y_target.clamp(ylo, yhi);

        // Locate the bracketing interval on the node values.
        let i = if self.dir > 0.0 {
            match self.y.partition_point(|&yi| yi <= y_target) {
                0 => 0,
                p if p >= n => n - 2,
                p => p - 1,
            }
        } else {
            match self.y.partition_point(|&yi| yi >= y_target) {
                0 => 0,
                p if p >= n => n - 2,
                p => p - 1,
            }
        };

        let mut lo = self.x[i];
        let mut hi = self.x[i + 1];
        let flo = self.hermite(i, lo).0 - y_target;
        if flo == 0.0 {
            return lo;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= f64::EPSILON * (1.0 + mid.abs()) {
                return mid;
            }
            let fmid = self.hermite(i, mid).0 - y_target;
            if fmid == 0.0 {
                return mid;
            }
            if fmid.signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}
