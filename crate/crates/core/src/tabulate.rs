//! Piecewise Chebyshev interpolation of matrix-valued functions of `s`,
//! used to make repeated generator evaluations cheap.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{AdiaError, Result};
use crate::family::LiouvillianFamily;
use crate::linalg::{self, c};
use crate::superop::{DensityMatrix, QOperator, StateSpace, Superoperator};

#[derive(Clone, Debug)]
struct Panel {
    a: f64,
    b: f64,
    coeffs: Vec<Array2<C64>>,
}

impl Panel {
    fn fit<F>(f: &F, a: f64, b: f64, n: usize) -> Result<Self>
    where
        F: Fn(f64) -> Result<Array2<C64>>,
    {
        let pi = std::f64::consts::PI;
        let vals = (0..n)
            .map(|k| {
                let x = (pi * (k as f64 + 0.5) / n as f64).cos();
                f(0.5 * (a + b) + 0.5 * (b - a) * x)
            })
            .collect::<Result<Vec<_>>>()?;
        let coeffs = (0..n)
            .map(|j| {
                let mut acc = Array2::<C64>::zeros(vals[0].raw_dim());
                for (k, v) in vals.iter().enumerate() {
                    let w = (pi * j as f64 * (k as f64 + 0.5) / n as f64).cos() * 2.0 / n as f64;
                    acc.scaled_add(c(w), v);
                }
                acc
            })
            .collect();
        Ok(Self { a, b, coeffs })
    }

    fn eval(&self, s: f64) -> Array2<C64> {
        let t = (2.0 * s - self.a - self.b) / (self.b - self.a);
        let shape = self.coeffs[0].raw_dim();
        let mut b1 = Array2::<C64>::zeros(shape.clone());
        let mut b2 = Array2::<C64>::zeros(shape);
        for ck in self.coeffs.iter().skip(1).rev() {
            let mut next = ck.clone();
            next.scaled_add(c(2.0 * t), &b1);
            next -= &b2;
            b2 = b1;
            b1 = next;
        }
        let mut out = b1 * c(t) - b2;
        out.scaled_add(c(0.5), &self.coeffs[0]);
        out
    }
}

/// Piecewise Chebyshev interpolant on `[lo, hi]`.
#[derive(Clone, Debug)]
pub struct MatrixInterpolant {
    panels: Vec<Panel>,
    /// Largest deviation from direct evaluation seen at the check points.
    pub max_error: f64,
}

impl MatrixInterpolant {
    /// Splits panels until the interpolant matches `f` to `tol` (absolute,
    /// max-entry) at the midpoints between nodes.
    pub fn build<F>(f: F, lo: f64, hi: f64, nodes: usize, tol: f64) -> Result<Self>
    where
        F: Fn(f64) -> Result<Array2<C64>>,
    {
        let nodes = nodes.max(4);
        let mut todo = vec![(lo, hi)];
        let mut panels = Vec::new();
        let mut max_error: f64 = 0.0;
        while let Some((a, b)) = todo.pop() {
            let panel = Panel::fit(&f, a, b, nodes)?;
            let mut err: f64 = 0.0;
            for k in 0..5 {
                let s = a + (b - a) * (k as f64 + 0.37) / 5.0;
                err = err.max(linalg::max_abs(&(panel.eval(s) - f(s)?)));
            }
            if err <= tol {
                max_error = max_error.max(err);
                panels.push(panel);
            } else if b - a < 1e-6 {
                return Err(AdiaError::NonConvergence { discrepancy: err, steps: panels.len() });
            } else {
                let m = 0.5 * (a + b);
                todo.push((m, b));
                todo.push((a, m));
            }
        }
        panels.sort_by(|p, q| p.a.total_cmp(&q.a));
        Ok(Self { panels, max_error })
    }

    pub fn panels(&self) -> usize {
        self.panels.len()
    }

    pub fn eval(&self, s: f64) -> Array2<C64> {
        let i = self.panels.partition_point(|p| p.b < s).min(self.panels.len() - 1);
        self.panels[i].eval(s)
    }
}

/// A family whose generator is served from an interpolation table; all
/// other queries go to the wrapped family.
pub struct TabulatedFamily<'a> {
    inner: &'a dyn LiouvillianFamily,
    table: MatrixInterpolant,
    template: Superoperator,
}

impl<'a> TabulatedFamily<'a> {
    /// `tol` is relative to `max_s ‖L(s)‖_max`.
    pub fn new(inner: &'a dyn LiouvillianFamily, tol: f64) -> Result<Self> {
        let template = inner.generator(0.0)?;
        let scale = (0..=4)
            .map(|k| inner.generator(k as f64 / 4.0).map(|l| l.max_abs()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max)
            .max(1e-300);
        let table = MatrixInterpolant::build(
            |s| Ok(inner.generator(s)?.into_matrix()),
            0.0,
            1.0,
            16,
            tol * scale,
        )?;
        Ok(Self { inner, table, template })
    }

    pub fn table(&self) -> &MatrixInterpolant {
        &self.table
    }
}

impl LiouvillianFamily for TabulatedFamily<'_> {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn hilbert_dim(&self) -> usize {
        self.inner.hilbert_dim()
    }

    fn space(&self) -> StateSpace {
        self.inner.space()
    }

    fn params(&self) -> serde_json::Value {
        self.inner.params()
    }

    fn hamiltonian(&self, s: f64) -> Option<Result<QOperator>> {
        self.inner.hamiltonian(s)
    }

    fn hamiltonian_derivative(&self, s: f64) -> Option<Result<QOperator>> {
        self.inner.hamiltonian_derivative(s)
    }

    fn beta(&self) -> Option<f64> {
        self.inner.beta()
    }

    fn reference_state(&self, s: f64) -> Option<Result<DensityMatrix>> {
        self.inner.reference_state(s)
    }

    fn generator(&self, s: f64) -> Result<Superoperator> {
        crate::family::check_unit_interval(s)?;
        Ok(self.template.like(self.table.eval(s)))
    }

    fn generator_derivative(&self, s: f64) -> Option<Result<Superoperator>> {
        self.inner.generator_derivative(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Example1, Example2, Example2Params};

    #[test]
    fn scalar_function_is_reproduced() {
        let f = |s: f64| Ok(Array2::from_elem((1, 1), c((3.0 * s).sin() / (1.1 - s))));
        let t = MatrixInterpolant::build(f, 0.0, 1.0, 12, 1e-12).unwrap();
        for k in 0..=50 {
            let s = k as f64 / 50.0;
            let exact = (3.0 * s).sin() / (1.1 - s);
            assert!((t.eval(s)[[0, 0]].re - exact).abs() < 1e-11);
        }
        assert!(t.panels() > 1);
    }

    #[test]
    fn tabulated_generators_match() {
        let f1 = Example1::default();
        let f2 = Example2::new(Example2Params::default()).unwrap();
        for f in [&f1 as &dyn LiouvillianFamily, &f2] {
            let t = TabulatedFamily::new(f, 1e-13).unwrap();
            for k in 0..=40 {
                let s = k as f64 / 40.0;
                let d = (&t.generator(s).unwrap() - &f.generator(s).unwrap()).max_abs();
                assert!(d < 1e-12, "{} at {s}: {d}", f.name());
            }
        }
    }
}
