//! Tensor-product quadrature on boxes.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Midpoint,
    Trapezoid,
}

/// Nodes and weights of a 1D rule with `count` panels on `[lo, hi]`.
pub fn nodes(lo: f64, hi: f64, count: usize, rule: Rule) -> Vec<(f64, f64)> {
    let h = (hi - lo) / count as f64;
    match rule {
        Rule::Midpoint => (0..count).map(|i| (lo + (i as f64 + 0.5) * h, h)).collect(),
        Rule::Trapezoid => (0..=count)
            .map(|i| {
                let w = if i == 0 || i == count { h / 2.0 } else { h };
                (lo + i as f64 * h, w)
            })
            .collect(),
    }
}

/// `∫_box f` with `resolution` panels per axis.
pub fn integrate(
    f: impl Fn(&[f64]) -> Complex64,
    bounds: &[(f64, f64)],
    resolution: usize,
    rule: Rule,
) -> Result<Complex64> {
    if resolution == 0 || bounds.is_empty() {
        return Err(Error::Quadrature("empty rule".into()));
    }
    let axes: Vec<Vec<(f64, f64)>> = bounds
        .iter()
        .map(|&(lo, hi)| nodes(lo, hi, resolution, rule))
        .collect();
    let d = bounds.len();
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    let mut total = Complex64::new(0.0, 0.0);
    loop {
        let mut w = 1.0;
        for a in 0..d {
            let (xa, wa) = axes[a][idx[a]];
            x[a] = xa;
            w *= wa;
        }
        let v = f(&x);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Quadrature(format!("non-finite sample at {x:?}")));
        }
        total += v * w;
        let mut a = d;
        loop {
            if a == 0 {
                return Ok(total);
            }
            a -= 1;
            idx[a] += 1;
            if idx[a] < axes[a].len() {
                break;
            }
            idx[a] = 0;
        }
    }
}
