//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{AdiaError, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-12, max_intervals: 2000 }
    }
}

/// One 15-point Kronrod rule on `[a, b]`: (value, error estimate).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `f` over `[a, b]`, splitting first at the given interior
/// breakpoints, and bisecting the worst interval until the summed error
/// estimate meets `max(abs_tol, rel_tol·|value|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    cfg: &QuadConfig,
) -> Result<Quadrature> {
    let mut knots = vec![a];
    knots.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
    knots.push(b);
    knots.sort_by(f64::total_cmp);
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in knots.windows(2) {
        if w[1] > w[0] {
            let (value, error) = gk15(&f, w[0], w[1]);
            evaluations += 15;
            heap.push(Piece { a: w[0], b: w[1], value, error });
        }
    }
    loop {
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        let target = cfg.abs_tol.max(cfg.rel_tol * value.abs());
        if !value.is_finite() {
            return Err(AdiaError::QuadratureFailure { estimate: error, tolerance: target });
        }
        if error <= target {
            return Ok(Quadrature { value, error, evaluations });
        }
        if heap.len() >= cfg.max_intervals {
            return Err(AdiaError::QuadratureFailure { estimate: error, tolerance: target });
        }
        let worst = heap.pop().expect("non-empty interval list");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(AdiaError::QuadratureFailure { estimate: error, tolerance: target });
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk15(&f, lo, hi);
            evaluations += 15;
            heap.push(Piece { a: lo, b: hi, value, error });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, &[], &QuadConfig::default()).unwrap();
        assert!((q.value - (63.0 / 6.0 - 9.0)).abs() < 1e-13);
    }

    #[test]
    fn kink_with_breakpoint() {
        let q = integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0, &[0.3], &QuadConfig::default()).unwrap();
        assert!((q.value - (0.045 + 0.245)).abs() < 1e-14);
        assert!(q.evaluations == 30);
    }

    #[test]
    fn log_singularity_adapts() {
        let q = integrate(|x: f64| x.ln(), 0.0, 1.0, &[], &QuadConfig { abs_tol: 1e-10, rel_tol: 0.0, max_intervals: 500 }).unwrap();
        assert!((q.value + 1.0).abs() < 1e-9);
    }

    #[test]
    fn nonconvergence_is_reported() {
        let cfg = QuadConfig { abs_tol: 1e-15, rel_tol: 0.0, max_intervals: 3 };
        let err = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &[], &cfg).unwrap_err();
        assert!(matches!(err, AdiaError::QuadratureFailure { .. }));
    }
}
