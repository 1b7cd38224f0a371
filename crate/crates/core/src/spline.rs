//! Order-4 cardinal B-splines.

use crate::error::{Error, Result};

pub const ORDER: usize = 4;

/// Cardinal B-spline `M_n(x)` by the two-term recursion, with
/// `M_2(x) = 1 - |x - 1|` on `[0, 2]`.
pub fn cardinal_bspline(order: usize, x: f64) -> f64 {
    assert!(order >= 2);
    if x <= 0.0 || x >= order as f64 {
        return 0.0;
    }
    if order == 2 {
        return 1.0 - (x - 1.0).abs();
    }
    let n = order as f64;
    (x * cardinal_bspline(order - 1, x) + (n - x) * cardinal_bspline(order - 1, x - 1.0))
        / (n - 1.0)
}

/// `d/dx M_n(x) = M_{n-1}(x) - M_{n-1}(x - 1)`.
pub fn cardinal_bspline_deriv(order: usize, x: f64) -> f64 {
    cardinal_bspline(order - 1, x) - cardinal_bspline(order - 1, x - 1.0)
}

/// Weights `M_4(u + i)` and their derivatives for `i = 0..4`, where `u` is the
/// fractional offset of a point past its grid cell. Entry `i` belongs to grid
/// point `floor(position) - i`.
pub fn bspline4(u: f64) -> Result<([f64; 4], [f64; 4])> {
    if !(0.0..1.0).contains(&u) {
        return Err(Error::InvalidParameter(format!(
            "spline offset {u} outside [0, 1)"
        )));
    }
    let mut w = [0.0; 4];
    let mut dw = [0.0; 4];
    for i in 0..ORDER {
        let x = u + i as f64;
        w[i] = cardinal_bspline(ORDER, x);
        dw[i] = cardinal_bspline_deriv(ORDER, x);
    }
    Ok((w, dw))
}

/// Spline support of one coordinate on one grid axis.
///
/// `weights[k]` and `dweights[k]` apply to grid index `(base + k) mod n`.
/// `dweights` are derivatives with respect to the grid coordinate; multiply
/// by grid points per unit length to get a spatial gradient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisSpline {
    pub base: usize,
    pub weights: [f64; 4],
    pub dweights: [f64; 4],
}

impl AxisSpline {
    /// Spline for fractional coordinate `s` in `[0, 1)` on an `n`-point axis.
    pub fn new(s: f64, n: usize) -> Self {
        let u = s * n as f64;
        let fl = u.floor();
        let mut frac = u - fl;
        if frac >= 1.0 {
            frac = 0.0;
        }
        let (w, dw) = bspline4(frac).expect("frac in range");
        let cell = (fl as i64).rem_euclid(n as i64) as usize;
        let base = (cell + n - (ORDER - 1)) % n;
        AxisSpline {
            base,
            weights: [w[3], w[2], w[1], w[0]],
            dweights: [dw[3], dw[2], dw[1], dw[0]],
        }
    }

    #[inline]
    pub fn index(&self, k: usize, n: usize) -> usize {
        (self.base + k) % n
    }
}

/// Per-axis spline weights of one atom.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplineWeights {
    pub axes: [AxisSpline; 3],
}

impl SplineWeights {
    pub fn new(frac: [f64; 3], dims: [usize; 3]) -> Self {
        SplineWeights {
            axes: [
                AxisSpline::new(frac[0], dims[0]),
                AxisSpline::new(frac[1], dims[1]),
                AxisSpline::new(frac[2], dims[2]),
            ],
        }
    }
}
