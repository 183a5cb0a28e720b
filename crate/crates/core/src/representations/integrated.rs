//! Integrated forms `π(f) = ∫ f(g) Q(g) dg` on grids.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{Carrier, Rep, RepId};
use crate::algebra::{partial_fourier, window, Fiber, FiberSource};
use crate::error::{Error, Result};
use crate::kernel::fourier::{resample_axis, ChirpZ};
use crate::kernel::gauss::GaussSum;
use crate::kernel::grid::{GridSpec, GridVector};
use crate::kernel::operator::{DenseMatrix, LinearOperator};
use crate::kernel::scalar::{ebar_unchecked, eta};

type C = Complex64;

/// How the `π_r` kernel is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assembly {
    /// Closed-form Gaussian `y`-integral.
    Analytic,
    /// `y`-quadrature evaluated for all `u` at once by a chirp-z transform.
    Fft,
    /// The same `y`-quadrature summed directly.
    Naive,
}

/// Uniform `y`-quadrature used by the FFT and naive paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YGrid {
    pub points: usize,
    pub start: f64,
    pub step: f64,
}

impl Default for YGrid {
    fn default() -> Self {
        YGrid {
            points: 1024,
            start: -8.0,
            step: 1.0 / 64.0,
        }
    }
}

#[derive(Debug, Clone)]
pub enum IntegratedForm {
    Scalar(C),
    Matrix(DenseMatrix),
    Operator(Arc<TildeRsOperator>),
}

impl IntegratedForm {
    pub fn scalar(&self) -> Option<C> {
        match self {
            IntegratedForm::Scalar(c) => Some(*c),
            _ => None,
        }
    }

    pub fn apply(&self, v: &GridVector) -> Result<GridVector> {
        match self {
            IntegratedForm::Scalar(c) => Ok(v.clone().scaled(*c)),
            IntegratedForm::Matrix(m) => m.apply(v),
            IntegratedForm::Operator(op) => op.apply(v),
        }
    }

    pub fn to_operator(&self, label: impl Into<String>) -> LinearOperator {
        let me = self.clone();
        LinearOperator::new(label, move |v| me.apply(v))
    }
}

/// `π(f)` for `rep`, on `spec` for operator-valued carriers.
pub fn integrated_form(rep: &Rep, f: &dyn FiberSource, spec: GridSpec, assembly: Assembly) -> Result<IntegratedForm> {
    if f.variant() != rep.variant() {
        return Err(crate::Error::VariantMismatch(format!(
            "{:?} function under {}",
            f.variant(),
            rep.label()
        )));
    }
    if f.n() != rep.n {
        return Err(Error::DimensionMismatch {
            expected: rep.n,
            got: f.n(),
        });
    }
    let n = rep.n;
    let fiber = f.fiber(rep.cocycle_r())?;
    match &rep.id {
        RepId::Pq { p, q } => {
            let all: Vec<usize> = (0..2 * n).collect();
            let ft = partial_fourier(&fiber.sum, &all)?;
            let at: Vec<f64> = p.iter().chain(q).copied().collect();
            Ok(IntegratedForm::Scalar(ft.eval(&at)))
        }
        RepId::TildeS { s } => {
            let all: Vec<usize> = (0..2 * n + 1).collect();
            let ft = partial_fourier(&fiber.sum, &all)?;
            let mut at = vec![0.0; 2 * n + 1];
            at[2 * n] = *s;
            Ok(IntegratedForm::Scalar(ft.eval(&at)))
        }
        RepId::R { r } => {
            let et = eta(rep.lambda, *r);
            Ok(IntegratedForm::Matrix(pi_r_kernel(&fiber, et, rep.carrier_grid(spec)?, assembly)?))
        }
        RepId::TildePq { p, q } => {
            let line = rep.carrier_grid(spec)?;
            let xy: Vec<usize> = (0..2 * n).collect();
            let ft = partial_fourier(&fiber.sum, &xy)?;
            let (lo, hi, _) = window(&fiber.sum, 2 * n)?;
            let h = line.h();
            let m = DenseMatrix::from_fn(line, |i, j| {
                let d = line.coord(i);
                let w = line.coord(j) - d;
                if w < lo || w > hi {
                    return C::new(0.0, 0.0);
                }
                let mut at = Vec::with_capacity(2 * n + 1);
                at.push(w);
                at.extend(p.iter().map(|v| d.exp() * v));
                at.extend(q.iter().map(|v| (-d).exp() * v));
                ft.eval(&at) * h
            });
            Ok(IntegratedForm::Matrix(m))
        }
        RepId::TildeRs { .. } => Ok(IntegratedForm::Operator(Arc::new(TildeRsOperator::new(rep, &fiber, spec)?))),
    }
}

fn x_windows(sum: &GaussSum, n: usize) -> Result<Vec<(f64, f64)>> {
    (0..n).map(|a| window(sum, a).map(|(lo, hi, _)| (lo, hi))).collect()
}

/// Dense kernel `M[i][j] = h^n K(u_i, u_j − u_i)` of
/// `(π_r(F)ξ)(u) = ∫ K(u, x) ξ(u + x) dx`, `K(u, x) = ∫ F(x, y) ē[η u·y] dy`.
pub fn pi_r_kernel(fiber: &Fiber, et: f64, spec: GridSpec, assembly: Assembly) -> Result<DenseMatrix> {
    let n = fiber.n;
    let h = spec.h();
    let cell = h.powi(n as i32);
    let win = x_windows(&fiber.sum, n)?;
    match assembly {
        Assembly::Analytic => {
            let y: Vec<usize> = (n..2 * n).collect();
            let ft = partial_fourier(&fiber.sum, &y)?;
            let probe = GridVector::zeros(spec, 1);
            Ok(DenseMatrix::from_fn(spec, |i, j| {
                let mut u = vec![0.0; n];
                let mut v = vec![0.0; n];
                probe.fill_coords(i, &mut u);
                probe.fill_coords(j, &mut v);
                let mut at = Vec::with_capacity(2 * n);
                for a in 0..n {
                    let x = v[a] - u[a];
                    if x < win[a].0 || x > win[a].1 {
                        return C::new(0.0, 0.0);
                    }
                    at.push(x);
                }
                at.extend(u.iter().map(|c| et * c));
                ft.eval(&at) * cell
            }))
        }
        Assembly::Fft | Assembly::Naive => {
            if n != 1 {
                return Err(Error::Parameter("quadrature assembly of π_r supports n = 1".into()));
            }
            let yg = YGrid::default();
            let np = spec.points;
            let l = spec.half_width;
            // K(u_i, x_k) for k = j - i ∈ (-N, N)
            let ks: Vec<i64> = (-(np as i64) + 1..np as i64)
                .filter(|&k| {
                    let x = k as f64 * h;
                    x >= win[0].0 && x <= win[0].1
                })
                .collect();
            let chirp = ChirpZ::new(yg.points, np, -et * h * yg.step);
            let cols: Vec<Vec<C>> = ks
                .par_iter()
                .map(|&k| {
                    let x = k as f64 * h;
                    let samples: Vec<C> = (0..yg.points)
                        .map(|m| fiber.eval(&[x, yg.start + m as f64 * yg.step]) * yg.step)
                        .collect();
                    match assembly {
                        Assembly::Fft => {
                            let pre: Vec<C> = samples
                                .iter()
                                .enumerate()
                                .map(|(m, g)| g * ebar_unchecked(-et * l * yg.step * m as f64))
                                .collect();
                            let out = chirp.apply(&pre);
                            out.into_iter()
                                .enumerate()
                                .map(|(i, v)| v * ebar_unchecked(-et * l * yg.start + et * h * yg.start * i as f64))
                                .collect()
                        }
                        _ => (0..np)
                            .map(|i| {
                                let u = spec.coord(i);
                                samples
                                    .iter()
                                    .enumerate()
                                    .map(|(m, g)| g * ebar_unchecked(et * u * (yg.start + m as f64 * yg.step)))
                                    .sum()
                            })
                            .collect(),
                    }
                })
                .collect();
            let mut m = DenseMatrix::zeros(spec);
            let dim = m.dim();
            let data = m.data_mut();
            for (col, &k) in cols.iter().zip(&ks) {
                for i in 0..np {
                    let j = i as i64 + k;
                    if j >= 0 && (j as usize) < np {
                        data[i * dim + j as usize] = col[i] * cell;
                    }
                }
            }
            Ok(m)
        }
    }
}

/// `π_r(F) ξ` for a Gaussian `ξ`, in closed form.
pub fn pi_r_apply_analytic(fiber: &Fiber, et: f64, xi: &GaussSum) -> Result<GaussSum> {
    let n = fiber.n;
    if xi.dim() != n || fiber.variant != crate::algebra::Variant::A {
        return Err(Error::DimensionMismatch { expected: n, got: xi.dim() });
    }
    // variables (u, x, y)
    let d = 3 * n;
    let xy: Vec<usize> = (n..3 * n).collect();
    let f = fiber.sum.embed(d, &xy)?;
    let mut m = vec![0.0; n * d];
    for i in 0..n {
        m[i * d + i] = 1.0;
        m[i * d + n + i] = 1.0;
    }
    let moved = xi.pullback(d, &m, &vec![0.0; n])?;
    let mut phase = crate::kernel::gauss::QuadExp::one(d);
    for i in 0..n {
        phase.add_bilinear(i, 2 * n + i, C::new(0.0, -2.0 * std::f64::consts::PI * et));
    }
    f.mul(&moved)?.mul_term(&phase)?.integrate_vars(&xy)
}

/// `π̃_{r,s}(F)` as a `w`-trapezoid of dilated kernel operators:
/// `ξ ↦ Σ_k c_k M_k D_{w_k} ξ`, `D_w ξ(v) = ξ(e^{-w} v)`.
#[derive(Debug)]
pub struct TildeRsOperator {
    spec: GridSpec,
    nodes: Vec<(f64, C, DenseMatrix)>,
}

/// Trapezoid step as a fraction of the narrowest `w`-envelope.
const W_STEP_FRACTION: f64 = 1.0 / 2.0;

/// Terms below `e^{-PRUNE}` of the largest one at a node are dropped.
const PRUNE: f64 = 40.0;

impl TildeRsOperator {
    pub fn new(rep: &Rep, fiber: &Fiber, spec: GridSpec) -> Result<Self> {
        let RepId::TildeRs { r, s } = rep.id else {
            return Err(Error::Parameter("expected a π̃_{r,s} label".into()));
        };
        debug_assert_eq!(rep.carrier(), Carrier::Configuration);
        let spec = rep.carrier_grid(spec)?;
        let n = rep.n;
        let et = eta(rep.lambda, r);
        let y: Vec<usize> = (n..2 * n).collect();
        // variables (x, w, ν)
        let ft = partial_fourier(&fiber.sum, &y)?;
        let win = x_windows(&fiber.sum, n)?;
        let (lo, hi, sigma) = window(&fiber.sum, 2 * n)?;
        let count = (((hi - lo) / (sigma * W_STEP_FRACTION)).ceil() as usize).max(2);
        let step = (hi - lo) / count as f64;
        let cell = spec.h().powi(n as i32);
        let probe = GridVector::zeros(spec, 1);
        let mut nodes = Vec::with_capacity(count + 1);
        for k in 0..=count {
            let w = lo + k as f64 * step;
            let wt = if k == 0 || k == count { step / 2.0 } else { step };
            let coef = ebar_unchecked(s * w) * (wt * (-(n as f64) * w / 2.0).exp());
            // terms are localized in w; keep the ones that matter here
            let local = ft.map(2 * n, |t| t.fix(n, w))?.pruned(PRUNE);
            let m = DenseMatrix::from_fn(spec, |i, j| {
                let mut u = vec![0.0; n];
                let mut v = vec![0.0; n];
                probe.fill_coords(i, &mut u);
                probe.fill_coords(j, &mut v);
                let mut at = Vec::with_capacity(2 * n);
                for a in 0..n {
                    let x = v[a] - u[a];
                    if x < win[a].0 || x > win[a].1 {
                        return C::new(0.0, 0.0);
                    }
                    at.push(x);
                }
                at.extend(u.iter().map(|c| et * c));
                local.eval(&at) * cell
            });
            nodes.push((w, coef, m));
        }
        Ok(TildeRsOperator { spec, nodes })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn apply(&self, v: &GridVector) -> Result<GridVector> {
        if v.spec() != self.spec || v.slots() != 1 {
            return Err(Error::GridMismatch);
        }
        let mut out = GridVector::zeros(self.spec, 1);
        for (w, coef, m) in &self.nodes {
            let mut d = v.clone();
            for a in 0..self.spec.n {
                d = resample_axis(&d, a, (-w).exp(), |_| 0.0)?;
            }
            out.axpy(*coef, &m.apply(&d)?)?;
        }
        Ok(out)
    }
}
