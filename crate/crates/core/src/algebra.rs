//! Twisted convolution algebras `A` (over `H/Z × R`) and `Ã` (over
//! `H̃/Z × R`) on Gaussian test functions.
//!
//! Functions are handled fiberwise in `r`.  A fiber is a [`GaussSum`] in the
//! variables `(x, y)` for `A` and `(x, y, w)` for `Ã`, so the twisted
//! convolution on `A` is exact.  On `Ã` the inner `(a, b)` integral is exact
//! and the `w`-integral runs on a trapezoid rule.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::gauss::{GaussSum, QuadExp};
use crate::kernel::scalar::{dot, ebar_unchecked, eta};

type C = Complex64;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    A,
    Atilde,
}

impl Variant {
    /// Number of fiber variables.
    pub fn fiber_dim(&self, n: usize) -> usize {
        match self {
            Variant::A => 2 * n,
            Variant::Atilde => 2 * n + 1,
        }
    }
}

/// `exp(-width |v - center|²) · e^{2πi freq·v}` on `R^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussPhase {
    pub width: (f64, f64),
    pub center: Vec<f64>,
    pub freq: Vec<f64>,
}

impl GaussPhase {
    pub fn new(width: C, center: Vec<f64>, freq: Vec<f64>) -> Result<Self> {
        if !(width.re > 0.0) || !width.im.is_finite() {
            return Err(Error::Parameter(format!("gaussian width {width} needs positive real part")));
        }
        if center.len() != freq.len() {
            return Err(Error::DimensionMismatch {
                expected: center.len(),
                got: freq.len(),
            });
        }
        Ok(GaussPhase {
            width: (width.re, width.im),
            center,
            freq,
        })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    fn w(&self) -> C {
        C::new(self.width.0, self.width.1)
    }

    pub fn eval(&self, v: &[f64]) -> C {
        let d2: f64 = v.iter().zip(&self.center).map(|(a, b)| (a - b) * (a - b)).sum();
        (-self.w() * d2).exp() * ebar_unchecked(-dot(&self.freq, v))
    }

    /// Writes this factor into `q` on the variables starting at `offset`.
    fn apply(&self, q: &mut QuadExp, offset: usize) {
        for i in 0..self.dim() {
            q.add_gaussian(offset + i, self.w(), self.center[i]);
            q.add_wave(offset + i, self.freq[i]);
        }
    }
}

/// Smooth compactly supported bump in `r`: `exp(1 - 1/(1 - t²))`,
/// `t = (r - center)/half_width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
}

impl Bump {
    pub fn eval(&self, r: f64) -> f64 {
        let t = (r - self.center) / self.half_width;
        if t.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - t * t)).exp()
        }
    }
}

/// One separable term `coef · X(x) Y(y) [W(w)] · φ(r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coef: (f64, f64),
    pub x: GaussPhase,
    pub y: GaussPhase,
    pub w: Option<GaussPhase>,
    pub profile: Bump,
}

/// Finite sum of separable Gaussian terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub variant: Variant,
    pub n: usize,
    pub terms: Vec<Term>,
}

impl TestFunction {
    pub fn new(variant: Variant, n: usize, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            if t.x.dim() != n || t.y.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: t.x.dim().max(t.y.dim()),
                });
            }
            match (variant, &t.w) {
                (Variant::A, None) => {}
                (Variant::Atilde, Some(w)) if w.dim() == 1 => {}
                _ => return Err(Error::VariantMismatch("w-factor must be present exactly for Ã".into())),
            }
            if !(t.profile.half_width > 0.0) {
                return Err(Error::Parameter("profile needs positive half-width".into()));
            }
        }
        Ok(TestFunction { variant, n, terms })
    }

    /// Random test function whose Gaussians have `Re width ∈ widths`,
    /// centers within `±center` and frequencies within `±freq`.
    pub fn random<R: Rng>(variant: Variant, n: usize, count: usize, shape: &Shape, rng: &mut R) -> Result<Self> {
        let gp = |k: usize, s: &(f64, f64, f64), rng: &mut R| {
            GaussPhase::new(
                C::new(rng.gen_range(s.0..=s.1), 0.0),
                (0..k).map(|_| rng.gen_range(-s.2..=s.2)).collect(),
                (0..k).map(|_| rng.gen_range(-shape.freq..=shape.freq)).collect(),
            )
        };
        let mut terms = Vec::with_capacity(count);
        for _ in 0..count {
            let x = gp(n, &shape.xy, rng)?;
            let y = gp(n, &shape.xy, rng)?;
            let w = match variant {
                Variant::A => None,
                Variant::Atilde => Some(gp(1, &shape.w, rng)?),
            };
            let coef = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            terms.push(Term {
                coef,
                x,
                y,
                w,
                profile: shape.profile,
            });
        }
        Self::new(variant, n, terms)
    }

    pub fn eval(&self, z: &[f64], r: f64) -> Result<C> {
        let d = self.variant.fiber_dim(self.n);
        if z.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: z.len() });
        }
        let n = self.n;
        Ok(self
            .terms
            .iter()
            .map(|t| {
                let mut v = C::new(t.coef.0, t.coef.1) * t.profile.eval(r) * t.x.eval(&z[..n]) * t.y.eval(&z[n..2 * n]);
                if let Some(w) = &t.w {
                    v *= w.eval(&z[2 * n..]);
                }
                v
            })
            .sum())
    }
}

/// Parameter ranges for [`TestFunction::random`]: `(min width, max width,
/// max |center|)` for the `x`/`y` and `w` factors.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub xy: (f64, f64, f64),
    pub w: (f64, f64, f64),
    pub freq: f64,
    pub profile: Bump,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            xy: (1.0, 3.0, 1.0),
            w: (8.0, 12.0, 0.3),
            freq: 0.2,
            profile: Bump {
                center: 0.0,
                half_width: 3.0,
            },
        }
    }
}

/// A function at fixed `r`, as a Gaussian sum in the fiber variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Fiber {
    pub variant: Variant,
    pub n: usize,
    pub r: f64,
    pub sum: GaussSum,
}

impl Fiber {
    pub fn eval(&self, z: &[f64]) -> C {
        self.sum.eval(z)
    }

    /// Partial Fourier transform `∫ F e^{-2πi ν·z_vars} dz_vars`; the result
    /// has the remaining variables first, then `ν` in the order of `vars`.
    pub fn partial_fourier(&self, vars: &[usize]) -> Result<GaussSum> {
        partial_fourier(&self.sum, vars)
    }

    /// Window `[lo, hi]` outside which every term of the fiber is below
    /// `e^{-40}` of its own peak along variable `var`, plus the smallest
    /// envelope standard deviation.
    pub fn window(&self, var: usize) -> Result<(f64, f64, f64)> {
        window(&self.sum, var)
    }
}

pub(crate) fn partial_fourier(sum: &GaussSum, vars: &[usize]) -> Result<GaussSum> {
    let d = sum.dim();
    let k = vars.len();
    let pos: Vec<usize> = (0..d).collect();
    let mut terms = Vec::with_capacity(sum.terms().len());
    for t in sum.terms() {
        let mut q = t.embed(d + k, &pos)?;
        for (j, &v) in vars.iter().enumerate() {
            q.add_bilinear(v, d + j, C::new(0.0, -TWO_PI));
        }
        terms.push(q.integrate_vars(vars)?);
    }
    GaussSum::from_terms(d, terms)
}

pub(crate) fn window(sum: &GaussSum, var: usize) -> Result<(f64, f64, f64)> {
    let d = sum.dim();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut sigma = f64::INFINITY;
    for t in sum.terms() {
        let mut a = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                a[i * d + j] = t.quad(i, j).re;
            }
        }
        let b: Vec<f64> = (0..d).map(|i| t.linear(i).re).collect();
        let inv = invert(&a, d).ok_or_else(|| Error::Parameter("fiber envelope is not confining".into()))?;
        let alpha = 1.0 / inv[var * d + var];
        if !(alpha > 0.0) {
            return Err(Error::Parameter("fiber envelope is not confining".into()));
        }
        let mu: f64 = (0..d).map(|j| inv[var * d + j] * b[j]).sum::<f64>() / 2.0;
        let half = (40.0 / alpha).sqrt();
        lo = lo.min(mu - half);
        hi = hi.max(mu + half);
        sigma = sigma.min((0.5 / alpha).sqrt());
    }
    if !lo.is_finite() {
        return Ok((0.0, 0.0, 1.0));
    }
    Ok((lo, hi, sigma))
}

fn invert(a: &[f64], d: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut inv = vec![0.0; d * d];
    for i in 0..d {
        inv[i * d + i] = 1.0;
    }
    for c in 0..d {
        let p = (c..d).max_by(|&x, &y| m[x * d + c].abs().partial_cmp(&m[y * d + c].abs()).unwrap())?;
        if m[p * d + c].abs() < 1e-300 {
            return None;
        }
        for k in 0..d {
            m.swap(c * d + k, p * d + k);
            inv.swap(c * d + k, p * d + k);
        }
        let piv = m[c * d + c];
        for k in 0..d {
            m[c * d + k] /= piv;
            inv[c * d + k] /= piv;
        }
        for r in 0..d {
            if r != c {
                let f = m[r * d + c];
                if f != 0.0 {
                    for k in 0..d {
                        m[r * d + k] -= f * m[c * d + k];
                        inv[r * d + k] -= f * inv[c * d + k];
                    }
                }
            }
        }
    }
    Some(inv)
}

/// Anything that yields fibers: test functions and derived functions.
pub trait FiberSource {
    fn variant(&self) -> Variant;
    fn n(&self) -> usize;
    fn fiber(&self, r: f64) -> Result<Fiber>;
}

impl FiberSource for TestFunction {
    fn variant(&self) -> Variant {
        self.variant
    }

    fn n(&self) -> usize {
        self.n
    }

    fn fiber(&self, r: f64) -> Result<Fiber> {
        let n = self.n;
        let d = self.variant.fiber_dim(n);
        let mut sum = GaussSum::zero(d);
        for t in &self.terms {
            let amp = t.profile.eval(r);
            if amp == 0.0 {
                continue;
            }
            let mut q = QuadExp::constant(d, C::new(t.coef.0, t.coef.1) * amp);
            t.x.apply(&mut q, 0);
            t.y.apply(&mut q, n);
            if let Some(w) = &t.w {
                w.apply(&mut q, 2 * n);
            }
            sum.push(q)?;
        }
        Ok(Fiber {
            variant: self.variant,
            n,
            r,
            sum,
        })
    }
}

impl FiberSource for Fiber {
    fn variant(&self) -> Variant {
        self.variant
    }

    fn n(&self) -> usize {
        self.n
    }

    /// A bare fiber only answers for its own `r`.
    fn fiber(&self, r: f64) -> Result<Fiber> {
        if r != self.r {
            return Err(Error::Parameter(format!("fiber stored at r={} requested at r={r}", self.r)));
        }
        Ok(self.clone())
    }
}

/// `f*` on `A`: `conj(f(-x, -y; r)) · ē[η(r) β(x, y)]`.
#[derive(Debug, Clone)]
pub struct Involuted<F> {
    pub inner: F,
    pub lambda: f64,
}

impl<F: FiberSource> FiberSource for Involuted<F> {
    fn variant(&self) -> Variant {
        Variant::A
    }

    fn n(&self) -> usize {
        self.inner.n()
    }

    fn fiber(&self, r: f64) -> Result<Fiber> {
        let f = self.inner.fiber(r)?;
        let n = f.n;
        let d = 2 * n;
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            m[i * d + i] = -1.0;
        }
        let mut sum = f.sum.conj().pullback(d, &m, &vec![0.0; d])?;
        let et = eta(self.lambda, r);
        let mut phase = QuadExp::one(d);
        for i in 0..n {
            phase.add_bilinear(i, n + i, C::new(0.0, -TWO_PI * et));
        }
        sum = sum.mul_term(&phase)?;
        Ok(Fiber {
            variant: Variant::A,
            n,
            r,
            sum,
        })
    }
}

/// The algebra `A` or `Ã` at deformation `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwistedAlgebra {
    pub variant: Variant,
    pub n: usize,
    pub lambda: f64,
}

impl TwistedAlgebra {
    pub fn new(variant: Variant, n: usize, lambda: f64) -> Result<Self> {
        if n == 0 || !lambda.is_finite() {
            return Err(Error::Parameter("algebra needs n ≥ 1 and finite λ".into()));
        }
        Ok(TwistedAlgebra { variant, n, lambda })
    }

    fn check_point(&self, g: &[f64]) -> Result<()> {
        let d = self.variant.fiber_dim(self.n);
        if g.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: g.len() });
        }
        Ok(())
    }

    /// Group law of `H/Z` or `H̃/Z` on fiber coordinates.
    pub fn coset_multiply(&self, g: &[f64], h: &[f64]) -> Result<Vec<f64>> {
        self.check_point(g)?;
        self.check_point(h)?;
        let n = self.n;
        Ok(match self.variant {
            Variant::A => g.iter().zip(h).map(|(a, b)| a + b).collect(),
            Variant::Atilde => {
                let ew = g[2 * n].exp();
                let mut out: Vec<f64> = (0..n).map(|i| g[i] + ew * h[i]).collect();
                out.extend((0..n).map(|i| g[n + i] + h[n + i] / ew));
                out.push(g[2 * n] + h[2 * n]);
                out
            }
        })
    }

    pub fn coset_inverse(&self, g: &[f64]) -> Result<Vec<f64>> {
        self.check_point(g)?;
        let n = self.n;
        Ok(match self.variant {
            Variant::A => g.iter().map(|v| -v).collect(),
            Variant::Atilde => {
                let ew = g[2 * n].exp();
                let mut out: Vec<f64> = (0..n).map(|i| -g[i] / ew).collect();
                out.extend((0..n).map(|i| -g[n + i] * ew));
                out.push(-g[2 * n]);
                out
            }
        })
    }

    /// The cocycle `σ^r(g, h)`.
    pub fn sigma(&self, r: f64, g: &[f64], h: &[f64]) -> Result<C> {
        self.check_point(g)?;
        self.check_point(h)?;
        let n = self.n;
        let mut t = eta(self.lambda, r) * dot(&g[..n], &h[n..2 * n]);
        if self.variant == Variant::Atilde {
            t *= (-g[2 * n]).exp();
        }
        Ok(ebar_unchecked(t))
    }

    fn check(&self, f: &Fiber) -> Result<()> {
        if f.variant != self.variant {
            return Err(Error::VariantMismatch(format!("{:?} fiber in {:?} algebra", f.variant, self.variant)));
        }
        if f.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: f.n });
        }
        Ok(())
    }

    /// `(f ⋆ g)` at fixed `r`.
    pub fn convolve(&self, f: &Fiber, g: &Fiber) -> Result<Fiber> {
        self.check(f)?;
        self.check(g)?;
        if f.r != g.r {
            return Err(Error::Parameter("fibers taken at different r".into()));
        }
        let sum = match self.variant {
            Variant::A => self.convolve_a(f, g)?,
            Variant::Atilde => self.convolve_atilde(f, g)?,
        };
        Ok(Fiber {
            variant: self.variant,
            n: self.n,
            r: f.r,
            sum,
        })
    }

    /// `(f ⋆ g)` at fixed `r` from any fiber sources.
    pub fn convolve_sources(&self, f: &dyn FiberSource, g: &dyn FiberSource, r: f64) -> Result<Fiber> {
        self.convolve(&f.fiber(r)?, &g.fiber(r)?)
    }

    pub fn involution<F: FiberSource>(&self, f: F) -> Result<Involuted<F>> {
        if self.variant != Variant::A || f.variant() != Variant::A {
            return Err(Error::VariantMismatch("involution is defined on A".into()));
        }
        Ok(Involuted {
            inner: f,
            lambda: self.lambda,
        })
    }

    fn convolve_a(&self, f: &Fiber, g: &Fiber) -> Result<GaussSum> {
        // variables (X, Y, a, b)
        let n = self.n;
        let d = 4 * n;
        let et = eta(self.lambda, f.r);
        let a_pos: Vec<usize> = (2 * n..4 * n).collect();
        // g at (X - a, Y - b)
        let mut m = vec![0.0; 2 * n * d];
        for i in 0..2 * n {
            m[i * d + i] = 1.0;
            m[i * d + 2 * n + i] = -1.0;
        }
        let mut phase = QuadExp::one(d);
        for i in 0..n {
            // ē[η a·(Y - b)]
            phase.add_bilinear(2 * n + i, n + i, C::new(0.0, -TWO_PI * et));
            phase.add_bilinear(2 * n + i, 3 * n + i, C::new(0.0, TWO_PI * et));
        }
        let gs = g.sum.pullback(d, &m, &vec![0.0; 2 * n])?;
        let fs = f.sum.embed(d, &a_pos)?;
        let mut out = GaussSum::zero(2 * n);
        for tf in fs.terms() {
            let tfp = tf.mul(&phase)?;
            for tg in gs.terms() {
                out.push(tfp.mul(tg)?.integrate_vars(&a_pos)?)?;
            }
        }
        Ok(out)
    }

    fn convolve_atilde(&self, f: &Fiber, g: &Fiber) -> Result<GaussSum> {
        let nodes = self.c_nodes(f, g, 1.0)?;
        let out = self.convolve_atilde_on(f, g, &nodes)?;
        // the coarse half of the rule must already agree
        let coarse: Vec<(f64, f64)> = nodes
            .iter()
            .enumerate()
            .filter(|(i, _)| i % 2 == 0)
            .map(|(_, &(c, w))| (c, 2.0 * w))
            .collect();
        let check = self.convolve_atilde_on(f, g, &coarse)?;
        let n = self.n;
        let mut probe = vec![0.0; 2 * n + 1];
        let (lo, hi, _) = window(&out, 2 * n)?;
        probe[2 * n] = 0.5 * (lo + hi);
        let a = out.eval(&probe);
        let b = check.eval(&probe);
        let scale = out.terms().iter().map(|t| t.coef().norm()).fold(0.0, f64::max).max(1e-300);
        if (a - b).norm() > 1e-7 * scale {
            return Err(Error::Quadrature(format!(
                "w-convolution not converged: {:e} at {} nodes",
                (a - b).norm() / scale,
                nodes.len()
            )));
        }
        Ok(out)
    }

    /// Trapezoid nodes for the inner `w` integral, resolving the narrowest
    /// `w`-envelope of either factor.
    fn c_nodes(&self, f: &Fiber, g: &Fiber, refine: f64) -> Result<Vec<(f64, f64)>> {
        let n = self.n;
        let (lo, hi, sf) = window(&f.sum, 2 * n)?;
        let (_, _, sg) = window(&g.sum, 2 * n)?;
        let sigma = 1.0 / (1.0 / (sf * sf) + 1.0 / (sg * sg)).sqrt();
        let step = sigma / (2.0 * refine);
        let count = (((hi - lo) / step).ceil() as usize).max(2);
        // even panel count keeps the coarse check on the same endpoints
        let count = count + count % 2;
        let h = (hi - lo) / count as f64;
        Ok((0..=count)
            .map(|i| {
                let w = if i == 0 || i == count { h / 2.0 } else { h };
                (lo + i as f64 * h, w)
            })
            .collect())
    }

    fn convolve_atilde_on(&self, f: &Fiber, g: &Fiber, nodes: &[(f64, f64)]) -> Result<GaussSum> {
        // variables (X, Y, W, a, b); h = (a, b, c), h⁻¹k = (e^{-c}(X-a), e^{c}(Y-b), W-c)
        let n = self.n;
        let d = 4 * n + 1;
        let et = eta(self.lambda, f.r);
        let ab: Vec<usize> = (2 * n + 1..4 * n + 1).collect();
        let mut phase = QuadExp::one(d);
        for i in 0..n {
            phase.add_bilinear(2 * n + 1 + i, n + i, C::new(0.0, -TWO_PI * et));
            phase.add_bilinear(2 * n + 1 + i, 3 * n + 1 + i, C::new(0.0, TWO_PI * et));
        }
        let mut out = GaussSum::zero(2 * n + 1);
        for &(c, wt) in nodes {
            let fc = f.sum.map(2 * n, |q| q.fix(2 * n, c))?;
            let fc = fc.embed(d, &ab)?;
            let mut m = vec![0.0; (2 * n + 1) * d];
            let mut t = vec![0.0; 2 * n + 1];
            let (em, ep) = ((-c).exp(), c.exp());
            for i in 0..n {
                m[i * d + i] = em;
                m[i * d + 2 * n + 1 + i] = -em;
                m[(n + i) * d + n + i] = ep;
                m[(n + i) * d + 3 * n + 1 + i] = -ep;
            }
            m[2 * n * d + 2 * n] = 1.0;
            t[2 * n] = -c;
            let gc = g.sum.pullback(d, &m, &t)?;
            for tf in fc.terms() {
                let mut tfp = tf.mul(&phase)?;
                tfp.scale(C::new(wt, 0.0));
                for tg in gc.terms() {
                    out.push(tfp.mul(tg)?.integrate_vars(&ab)?)?;
                }
            }
        }
        Ok(out)
    }
}
