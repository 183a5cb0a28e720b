//! Coproduct, inner tensor products and the braiding intertwiners.
//!
//! Tensor vectors `ξ(u, v)` keep the first factor on axis 0.  An intertwiner
//! `H_π ⊗ H_ρ → H_ρ ⊗ H_π` returns a vector whose axis 0 is the `ρ` slot.
//!
//! Every inner tensor product of `A`-representations is the integrated form of
//! `(x, y) ↦ Q^π(e^{λ r_ρ} x, e^{λ r_ρ} y) ⊗ Q^ρ(x, y)` against the fiber at
//! `r_π + r_ρ`, where `r` is the cocycle parameter (0 for characters).

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{partial_fourier, window, Fiber, FiberSource, Variant};
use crate::error::{Error, Result};
use crate::groups::{Group, GroupId};
use crate::kernel::fourier::resample_axis;
use crate::kernel::gauss::{GaussSum, QuadExp};
use crate::kernel::grid::{GridSpec, GridVector};
use crate::kernel::operator::{DenseMatrix, LinearOperator, TestBattery};
use crate::kernel::scalar::{ebar_unchecked, eta};
use crate::representations::{pi_r_kernel, Assembly, Rep, RepId};

type C = Complex64;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// `Δ` in its two coordinate forms.
#[derive(Debug, Clone, Copy)]
pub struct Coproduct {
    pub lambda: f64,
    pub n: usize,
}

impl Coproduct {
    pub fn new(lambda: f64, n: usize) -> Self {
        Coproduct { lambda, n }
    }

    /// `(Δf)(g, g') = f(g g')` for a function on `G`.
    pub fn pqr(&self, f: impl Fn(&[f64]) -> C, g: &[f64], g2: &[f64]) -> Result<C> {
        let grp = Group::new(GroupId::G, self.n, self.lambda)?;
        let a = grp.element(g.to_vec())?;
        let b = grp.element(g2.to_vec())?;
        Ok(f(grp.multiply(&a, &b)?.coords()))
    }

    /// `∫ Δf(x,y,r,x',y',r') φ(x,y) ψ(x',y')` with the oscillatory `p, q`
    /// integral kept and every integral done in closed form.
    pub fn pair_xy(&self, f: &dyn FiberSource, r: f64, r2: f64, phi: &GaussSum, psi: &GaussSum) -> Result<C> {
        let n = self.n;
        check_pairing(f, n, phi, psi)?;
        let fib = f.fiber(r + r2)?;
        let d = 6 * n;
        // variables: x', y' | p, q | x, y  (integrated from the right)
        let prim: Vec<usize> = (0..2 * n).collect();
        let pq: Vec<usize> = (2 * n..4 * n).collect();
        let xy: Vec<usize> = (4 * n..6 * n).collect();
        let mut sum = fib.sum.embed(d, &prim)?;
        sum = sum.mul(&phi.embed(d, &xy)?)?;
        sum = sum.mul(&psi.embed(d, &prim)?)?;
        let st = (self.lambda * r2).exp();
        let mut phase = QuadExp::one(d);
        for i in 0..2 * n {
            // ē[p·(e^{λr'}x' − x)] and the same for q, y
            phase.add_bilinear(pq[i], prim[i], C::new(0.0, -TWO_PI * st));
            phase.add_bilinear(pq[i], xy[i], C::new(0.0, TWO_PI));
        }
        sum.mul_term(&phase)?.integral()
    }

    /// The same pairing after the `p, q` delta has been resolved:
    /// `∫ f(x',y',r+r') φ(e^{λr'}x', e^{λr'}y') ψ(x',y')`.
    pub fn pair_substituted(&self, f: &dyn FiberSource, r: f64, r2: f64, phi: &GaussSum, psi: &GaussSum) -> Result<C> {
        let n = self.n;
        check_pairing(f, n, phi, psi)?;
        let fib = f.fiber(r + r2)?;
        let st = (self.lambda * r2).exp();
        let d = 2 * n;
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            m[i * d + i] = st;
        }
        let stretched = phi.pullback(d, &m, &vec![0.0; d])?;
        fib.sum.mul(&stretched)?.mul(psi)?.integral()
    }
}

fn check_pairing(f: &dyn FiberSource, n: usize, phi: &GaussSum, psi: &GaussSum) -> Result<()> {
    if f.variant() != Variant::A {
        return Err(Error::VariantMismatch("the coproduct is defined on A".into()));
    }
    for d in [f.n() * 2, phi.dim(), psi.dim()] {
        if d != 2 * n {
            return Err(Error::DimensionMismatch { expected: 2 * n, got: d });
        }
    }
    Ok(())
}

/// `π ⊠ ρ (f)`.
#[derive(Debug, Clone)]
pub enum TensorForm {
    Scalar(C),
    Line(DenseMatrix),
    Tensor(Arc<TensorKernel>),
}

impl TensorForm {
    pub fn scalar(&self) -> Option<C> {
        match self {
            TensorForm::Scalar(c) => Some(*c),
            _ => None,
        }
    }

    pub fn apply(&self, v: &GridVector) -> Result<GridVector> {
        match self {
            TensorForm::Scalar(c) => Ok(v.clone().scaled(*c)),
            TensorForm::Line(m) => m.apply(v),
            TensorForm::Tensor(k) => k.apply(v),
        }
    }

    pub fn to_operator(&self, label: impl Into<String>) -> LinearOperator {
        let me = self.clone();
        LinearOperator::new(label, move |v| me.apply(v))
    }
}

/// Multiplies every term of the fiber by `ē(k·x + l·y)`.
fn modulate(fiber: &Fiber, k: &[f64], l: &[f64]) -> Result<Fiber> {
    let n = fiber.n;
    let sum = fiber.sum.map(fiber.sum.dim(), |t| {
        let mut t = t.clone();
        for i in 0..n {
            t.add_wave(i, -k[i]);
            t.add_wave(n + i, -l[i]);
        }
        Ok(t)
    })?;
    Ok(Fiber { sum, ..fiber.clone() })
}

fn character(rep: &Rep) -> Option<(&[f64], &[f64])> {
    match &rep.id {
        RepId::Pq { p, q } => Some((p, q)),
        _ => None,
    }
}

/// `(π ⊗ ρ)(Δf)` for two irreducible representations of `A`.
pub fn inner_tensor(a: &Rep, b: &Rep, f: &dyn FiberSource, spec: GridSpec) -> Result<TensorForm> {
    for rep in [a, b] {
        if rep.variant() != Variant::A {
            return Err(Error::VariantMismatch(format!("{} is not a representation of A", rep.label())));
        }
    }
    if a.n != b.n || a.lambda != b.lambda {
        return Err(Error::Parameter("inner tensor factors must share n and λ".into()));
    }
    if f.variant() != Variant::A || f.n() != a.n {
        return Err(Error::VariantMismatch("inner tensor needs an A function of matching n".into()));
    }
    let (n, lambda) = (a.n, a.lambda);
    let (ra, rb) = (a.cocycle_r(), b.cocycle_r());
    let fiber = f.fiber(ra + rb)?;
    let st = (lambda * rb).exp();
    match (character(a), character(b)) {
        (Some((p, q)), Some((p2, q2))) => {
            let k: Vec<f64> = (0..n).map(|i| st * p[i] + p2[i]).collect();
            let l: Vec<f64> = (0..n).map(|i| st * q[i] + q2[i]).collect();
            Ok(TensorForm::Scalar(modulate(&fiber, &k, &l)?.sum.integral()?))
        }
        (Some((p, q)), None) => {
            let k: Vec<f64> = p.iter().map(|v| st * v).collect();
            let l: Vec<f64> = q.iter().map(|v| st * v).collect();
            let m = modulate(&fiber, &k, &l)?;
            Ok(TensorForm::Line(pi_r_kernel(&m, eta(lambda, rb), b.carrier_grid(spec)?, Assembly::Analytic)?))
        }
        (None, Some((p, q))) => {
            let m = modulate(&fiber, p, q)?;
            Ok(TensorForm::Line(pi_r_kernel(&m, eta(lambda, ra), a.carrier_grid(spec)?, Assembly::Analytic)?))
        }
        (None, None) => Ok(TensorForm::Tensor(Arc::new(TensorKernel::new(&fiber, lambda, ra, rb, spec)?))),
    }
}

/// `(π_r ⊠ π_{r'})(f) ξ(u, v) = ∫ K(x, a u + b v) ξ(u + e^{λr'} x, v + x) dx`
/// with `K(x, ν) = ∫ F(x, y) ē(ν y) dy`, `a = η(r) e^{λr'}`, `b = η(r')`.
#[derive(Debug)]
pub struct TensorKernel {
    spec: GridSpec,
    stretch: f64,
    a: f64,
    b: f64,
    /// Lattice steps `j` with `x = j h` inside the fiber window, and `K(x_j, ·)`.
    nodes: Vec<(i64, GaussSum)>,
}

impl TensorKernel {
    pub fn new(fiber: &Fiber, lambda: f64, r: f64, r2: f64, spec: GridSpec) -> Result<Self> {
        if fiber.n != 1 || spec.n != 1 {
            return Err(Error::Parameter("tensor-grid operators are implemented for n = 1".into()));
        }
        let ft = partial_fourier(&fiber.sum, &[1])?;
        let (lo, hi, _) = window(&fiber.sum, 0)?;
        let h = spec.h();
        let jmax = spec.points as i64;
        let mut nodes = Vec::new();
        for j in (lo / h).ceil() as i64..=(hi / h).floor() as i64 {
            if j.abs() >= jmax {
                continue;
            }
            let x = j as f64 * h;
            nodes.push((j, ft.map(1, |t| t.fix(0, x))?));
        }
        Ok(TensorKernel {
            spec,
            stretch: (lambda * r2).exp(),
            a: eta(lambda, r) * (lambda * r2).exp(),
            b: eta(lambda, r2),
            nodes,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn apply(&self, v: &GridVector) -> Result<GridVector> {
        if v.spec() != self.spec || v.slots() != 2 {
            return Err(Error::GridMismatch);
        }
        let h = self.spec.h();
        let mut out = GridVector::zeros(self.spec, 2);
        // parallel within a chunk, summed in node order so results do not depend on scheduling
        for chunk in self.nodes.chunks(8) {
            let terms: Vec<GridVector> = chunk
                .par_iter()
                .map(|(j, k)| -> Result<GridVector> {
                    let x = *j as f64 * h;
                    let mut t = resample_axis(v, 0, 1.0, |_| self.stretch * x)?.lattice_shift(&[0, *j])?;
                    let (a, b) = (self.a, self.b);
                    t.multiply_fn(|c| k.eval(&[a * c[0] + b * c[1]]) * h);
                    Ok(t)
                })
                .collect::<Result<_>>()?;
            for t in &terms {
                out.axpy(C::new(1.0, 0.0), t)?;
            }
        }
        Ok(out)
    }
}

/// The intertwiners of the inner tensor products.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum IntertwinerKind {
    /// `Sξ(u) = ē(p·u) ξ(u − q/η(r))`, from `π_r ⊠ π_{p,q}` to `π_r`.
    S { p: f64, q: f64, r: f64 },
    SInv { p: f64, q: f64, r: f64 },
    /// `S'^{-1} S` with `S'` built from `(e^{λr} p, e^{λr} q)`.
    Tpq { p: f64, q: f64, r: f64 },
    /// The standalone closed form of `T_pq`.
    TpqClosed { p: f64, q: f64, r: f64 },
    /// `T_{π_r π_{r'}}` by its closed form.
    Trr { r: f64, r2: f64 },
    /// `flip ∘ (π̃_{r,0} ⊗ π̃_{r',0})(R)`.
    FromR { r: f64, r2: f64 },
}

fn shift_phase(v: &GridVector, shift: f64, p: f64, phase_at: f64) -> Result<GridVector> {
    // ē(p (u + phase_at)) ξ(u + shift), one axis at a time
    let mut out = v.clone();
    for a in 0..v.axes() {
        out = resample_axis(&out, a, 1.0, |_| shift)?;
    }
    out.multiply_fn(|c| c.iter().map(|u| ebar_unchecked(p * (u + phase_at))).product());
    Ok(out)
}

/// The scalar-parameter intertwiners act on `L²(R^n)` for any `n`; the
/// two-factor ones on the `n = 1` tensor grid.
pub fn intertwiner(kind: IntertwinerKind, lambda: f64) -> Result<LinearOperator> {
    let need_eta = |r: f64| {
        let e = eta(lambda, r);
        if e == 0.0 {
            Err(Error::Parameter("S needs η(r) ≠ 0".into()))
        } else {
            Ok(e)
        }
    };
    let label = format!("{kind:?}");
    Ok(match kind {
        IntertwinerKind::S { p, q, r } => {
            let e = need_eta(r)?;
            LinearOperator::new(label, move |v| shift_phase(v, -q / e, p, 0.0))
        }
        IntertwinerKind::SInv { p, q, r } => {
            let e = need_eta(r)?;
            LinearOperator::new(label, move |v| shift_phase(v, q / e, -p, q / e))
        }
        IntertwinerKind::Tpq { p, q, r } => {
            let st = (lambda * r).exp();
            let s = intertwiner(IntertwinerKind::S { p, q, r }, lambda)?;
            let s2 = intertwiner(IntertwinerKind::SInv { p: st * p, q: st * q, r }, lambda)?;
            s2.after(&s).labelled(label)
        }
        IntertwinerKind::TpqClosed { p, q, r } => {
            let e = need_eta(r)?;
            let st = (lambda * r).exp();
            let shift = (st - 1.0) * q / e;
            LinearOperator::new(label, move |v| {
                let mut out = v.clone();
                for a in 0..v.axes() {
                    out = resample_axis(&out, a, 1.0, |_| shift)?;
                }
                out.multiply_fn(|c| c.iter().map(|u| ebar_unchecked(p * u - st * p * (u + shift))).product());
                Ok(out)
            })
        }
        IntertwinerKind::Trr { r, r2 } => LinearOperator::new(label, move |v| t_rr(lambda, r, r2, v)),
        IntertwinerKind::FromR { r, r2 } => LinearOperator::new(label, move |v| r_matrix_apply(lambda, r, r2, v)?.flip()),
    })
}

fn tensor_check(v: &GridVector) -> Result<()> {
    if v.slots() != 2 || v.spec().n != 1 {
        return Err(Error::Parameter("expected an n = 1 tensor vector".into()));
    }
    Ok(())
}

fn half_density(lambda: f64, r: f64, r2: f64, n: usize) -> f64 {
    (-(n as f64) * lambda * (r + r2) / 2.0).exp()
}

/// `T ξ(v, u) = k ξ(e^{-λr'} u + (e^{λr'} − e^{-λr'}) e^{-λr} v, e^{-λr} v)`
/// as a dilation of the second slot, a sheared dilation of the first, and a flip.
fn t_rr(lambda: f64, r: f64, r2: f64, v: &GridVector) -> Result<GridVector> {
    tensor_check(v)?;
    let (er, er2) = ((-lambda * r).exp(), (-lambda * r2).exp());
    let c = (lambda * r2).exp() - er2;
    let a = resample_axis(v, 1, er, |_| 0.0)?;
    let b = resample_axis(&a, 0, er2, |x| c * er * x[1])?;
    Ok(b.flip()?.scaled(C::new(half_density(lambda, r, r2, 1), 0.0)))
}

/// `(π̃_{r,0} ⊗ π̃_{r',0})(Φ)`: `k ξ(e^{-λr'} u, e^{-λr} v)`.
pub fn phi_apply(lambda: f64, r: f64, r2: f64, v: &GridVector) -> Result<GridVector> {
    tensor_check(v)?;
    let a = resample_axis(v, 0, (-lambda * r2).exp(), |_| 0.0)?;
    let b = resample_axis(&a, 1, (-lambda * r).exp(), |_| 0.0)?;
    Ok(b.scaled(C::new(half_density(lambda, r, r2, 1), 0.0)))
}

/// `(π̃_{r,0} ⊗ π̃_{r',0})(Ψ)`: `ξ(u + 2λ e^{-λr'} η(r') v, v)`.
pub fn psi_apply(lambda: f64, r2: f64, v: &GridVector) -> Result<GridVector> {
    tensor_check(v)?;
    let c = 2.0 * lambda * (-lambda * r2).exp() * eta(lambda, r2);
    resample_axis(v, 0, 1.0, |x| c * x[1])
}

/// `(π̃_{r,0} ⊗ π̃_{r',0})(R) = Φ Ψ` on a tensor vector.
pub fn r_matrix_apply(lambda: f64, r: f64, r2: f64, v: &GridVector) -> Result<GridVector> {
    phi_apply(lambda, r, r2, &psi_apply(lambda, r2, v)?)
}

/// Linear part `M` and prefactor `k` of `T_{r'r} T_{rr'} ξ(z) = k ξ(M z)`, with
/// `k = e^{-λ(r + r')}` (n = 1).
pub fn composition_map(lambda: f64, r: f64, r2: f64) -> ([f64; 4], f64) {
    let e2r = (-2.0 * lambda * r).exp();
    let e2r2 = (-2.0 * lambda * r2).exp();
    let m = [
        1.0 - (1.0 - e2r2) * e2r,
        ((lambda * r2).exp() - (-lambda * r2).exp()) * e2r,
        (1.0 - e2r) * (-lambda * r2).exp(),
        e2r,
    ];
    (m, (-lambda * (r + r2)).exp())
}

/// The prefactor as printed alongside the composition, `e^{-λr} e^{λr'}`.
pub fn printed_composition_prefactor(lambda: f64, r: f64, r2: f64) -> f64 {
    (-lambda * r + lambda * r2).exp()
}

/// `‖T_{r'r} T_{rr'} ξ − ξ‖ / ‖ξ‖` for `ξ = e^{-π|z|²}`, in closed form.
pub fn analytic_identity_distance(lambda: f64, r: f64, r2: f64) -> f64 {
    let (m, k) = composition_map(lambda, r, r2);
    // G = I + MᵀM
    let g00 = 1.0 + m[0] * m[0] + m[2] * m[2];
    let g11 = 1.0 + m[1] * m[1] + m[3] * m[3];
    let g01 = m[0] * m[1] + m[2] * m[3];
    let overlap = 2.0 * k / (g00 * g11 - g01 * g01).sqrt();
    (2.0 - 2.0 * overlap).max(0.0).sqrt()
}

/// The `n = 1` unit Gaussian `e^{-π(u² + v²)}` as an analytic vector.
pub fn unit_gaussian_analytic() -> GaussSum {
    let mut q = QuadExp::one(2);
    q.add_gaussian(0, C::new(std::f64::consts::PI, 0.0), 0.0);
    q.add_gaussian(1, C::new(std::f64::consts::PI, 0.0), 0.0);
    GaussSum::single(q)
}

/// Outcome of the double-braid computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BraidReport {
    pub pair: (String, String),
    pub lambda: f64,
    pub r: f64,
    pub r_prime: f64,
    /// `T·(π_r ⊠ π_{r'})(f) − (π_{r'} ⊠ π_r)(f)·T` on the battery, when computed.
    pub intertwining_residual: Option<f64>,
    /// Computed composition against `k ξ(M z)` with `k = e^{-λ(r+r')}`.
    pub composition_residual: f64,
    /// Computed composition against the printed prefactor `e^{-λr} e^{λr'}`.
    pub printed_prefactor_residual: f64,
    pub distance_to_identity: f64,
    pub analytic_distance: f64,
}

impl BraidReport {
    pub fn passes(&self, tol: f64, min_distance: Option<f64>) -> bool {
        let base = self.composition_residual <= tol && self.intertwining_residual.map_or(true, |v| v <= tol);
        base && min_distance.map_or(true, |d| self.distance_to_identity > d)
    }
}

/// Default tensor grid for braid computations: 256 points on `[-24, 24)`.
pub fn braid_grid() -> GridSpec {
    GridSpec::new(1, 256, 24.0).expect("static grid")
}

/// Tensor grid for `⊠` kernels: the `x`-trapezoid needs `h ≈ 0.1`.
pub fn tensor_kernel_grid() -> GridSpec {
    GridSpec::new(1, 256, 12.0).expect("static grid")
}

/// `T_{π_{r'}π_r} T_{π_r π_{r'}}` on the unit Gaussian; with a test function the
/// intertwining identity of `T_{π_r π_{r'}}` is measured too, on
/// [`tensor_kernel_grid`].
pub fn braid_composition(lambda: f64, r: f64, r2: f64, spec: GridSpec, f: Option<&dyn FiberSource>) -> Result<BraidReport> {
    let xi_an = unit_gaussian_analytic();
    let xi = GridVector::from_fn(spec, 2, |z| xi_an.eval(z));
    let nrm = xi.norm();
    let t = intertwiner(IntertwinerKind::Trr { r, r2 }, lambda)?;
    let t2 = intertwiner(IntertwinerKind::Trr { r: r2, r2: r }, lambda)?;
    let comp = t2.apply(&t.apply(&xi)?)?;
    let (m, k) = composition_map(lambda, r, r2);
    let moved = xi_an.pullback(2, &m, &[0.0, 0.0])?;
    let target = GridVector::from_fn(spec, 2, |z| moved.eval(z));
    let rel = |a: &GridVector, b: &GridVector| -> Result<f64> { Ok(a.sub(b)?.norm() / nrm) };
    let composition_residual = rel(&comp, &target.clone().scaled(C::new(k, 0.0)))?;
    let printed = printed_composition_prefactor(lambda, r, r2);
    let printed_prefactor_residual = rel(&comp, &target.scaled(C::new(printed, 0.0)))?;
    let distance_to_identity = rel(&comp, &xi)?;
    let ra = Rep::new(RepId::R { r }, 1, lambda)?;
    let rb = Rep::new(RepId::R { r: r2 }, 1, lambda)?;
    let intertwining_residual = match f {
        Some(f) => {
            let fine = tensor_kernel_grid();
            let lhs = inner_tensor(&ra, &rb, f, fine)?;
            let rhs = inner_tensor(&rb, &ra, f, fine)?;
            let battery = TestBattery::unit_gaussian(fine, 2)?;
            let l = t.after(&lhs.to_operator("lhs"));
            let rgt = rhs.to_operator("rhs").after(&t);
            Some(crate::kernel::operator::operator_residual(&l, &rgt, &battery)?)
        }
        None => None,
    };
    Ok(BraidReport {
        pair: (ra.label(), rb.label()),
        lambda,
        r,
        r_prime: r2,
        intertwining_residual,
        composition_residual,
        printed_prefactor_residual,
        distance_to_identity,
        analytic_distance: analytic_identity_distance(lambda, r, r2),
    })
}

/// Quadrature realization of the two factors of `R` acting on the unit
/// Gaussian, compared with their closed forms at the sample points.
/// Returns the worst relative error.
pub fn r_matrix_quadrature_residual(lambda: f64, r: f64, r2: f64, points: &[(f64, f64)]) -> Result<f64> {
    let g = |t: f64| (-std::f64::consts::PI * t * t).exp();
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    // Ψ: ∫dp ē[c v p] ∫dx e[p x] ξ(u + x, v), c = 2λe^{-λr'}η(r')
    let c = 2.0 * lambda * (-lambda * r2).exp() * eta(lambda, r2);
    let xs = crate::kernel::quadrature::nodes(-9.0, 9.0, 576, crate::kernel::quadrature::Rule::Trapezoid);
    let ps = crate::kernel::quadrature::nodes(-6.0, 6.0, 384, crate::kernel::quadrature::Rule::Trapezoid);
    for &(u, v) in points {
        let mut acc = C::new(0.0, 0.0);
        for &(p, wp) in &ps {
            let inner: C = xs.iter().map(|&(x, wx)| ebar_unchecked(-p * x) * (wx * g(u + x))).sum();
            acc += inner * ebar_unchecked(c * v * p) * wp;
        }
        let quad = acc * g(v);
        let exact = g(u + c * v) * g(v);
        worst = worst.max((quad - exact).norm());
        scale = scale.max(exact.abs());
    }
    // Φ factorizes: ∫ds ē[λρ s] ∫dw e[s w] e^{-w/2} g(e^{-w} t) = e^{-λρ/2} g(e^{-λρ} t)
    let ws = crate::kernel::quadrature::nodes(-6.0, 40.0, 1840, crate::kernel::quadrature::Rule::Trapezoid);
    let ss = crate::kernel::quadrature::nodes(-8.0, 8.0, 1024, crate::kernel::quadrature::Rule::Trapezoid);
    let one = |rho: f64, t: f64| -> C {
        let vals: Vec<(f64, f64)> = ws.iter().map(|&(w, ww)| (w, ww * (-w / 2.0).exp() * g((-w).exp() * t))).collect();
        let parts: Vec<C> = ss
            .par_iter()
            .map(|&(s, wt)| {
                let inner: C = vals.iter().map(|&(w, a)| ebar_unchecked(-s * w) * a).sum();
                inner * ebar_unchecked(lambda * rho * s) * wt
            })
            .collect();
        parts.into_iter().sum()
    };
    for &(u, v) in points {
        let quad = one(r2, u) * one(r, v);
        let exact = half_density(lambda, r, r2, 1) * g((-lambda * r2).exp() * u) * g((-lambda * r).exp() * v);
        worst = worst.max((quad - exact).norm());
        scale = scale.max(exact);
    }
    if scale == 0.0 {
        return Err(Error::Quadrature("R oracle sampled only where the closed form vanishes".into()));
    }
    Ok(worst / scale)
}

#[cfg(test)]
mod tests;
