//! Closed-form Gaussian algebra.
//!
//! A [`QuadExp`] is `coef · exp(-zᵀAz + bᵀz + c)` in real variables `z`
//! with complex symmetric `A`.  Products, affine substitutions and exact
//! integration over one variable keep the family closed, which is what the
//! analytic oracles rely on.

use num_complex::Complex64;

use crate::error::{Error, Result};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct QuadExp {
    dim: usize,
    coef: C,
    a: Vec<C>,
    b: Vec<C>,
    c: C,
}

impl QuadExp {
    /// The constant function `coef`.
    pub fn constant(dim: usize, coef: C) -> Self {
        QuadExp {
            dim,
            coef,
            a: vec![ZERO; dim * dim],
            b: vec![ZERO; dim],
            c: ZERO,
        }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, C::new(1.0, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coef(&self) -> C {
        self.coef
    }

    /// Entry `A_ij` of the quadratic form.
    pub fn quad(&self, i: usize, j: usize) -> C {
        self.a[i * self.dim + j]
    }

    pub fn linear(&self, i: usize) -> C {
        self.b[i]
    }

    /// Adds `coef · z_i z_j` to the exponent.
    pub fn add_bilinear(&mut self, i: usize, j: usize, coef: C) -> &mut Self {
        let d = self.dim;
        if i == j {
            self.a[i * d + i] -= coef;
        } else {
            self.a[i * d + j] -= coef * 0.5;
            self.a[j * d + i] -= coef * 0.5;
        }
        self
    }

    /// Adds `coef · z_i` to the exponent.
    pub fn add_linear(&mut self, i: usize, coef: C) -> &mut Self {
        self.b[i] += coef;
        self
    }

    /// Adds `coef` to the exponent.
    pub fn add_exponent(&mut self, coef: C) -> &mut Self {
        self.c += coef;
        self
    }

    pub fn scale(&mut self, s: C) -> &mut Self {
        self.coef *= s;
        self
    }

    /// Multiplies by `exp(-width (z_i - center)²)`.
    pub fn add_gaussian(&mut self, i: usize, width: C, center: f64) -> &mut Self {
        self.add_bilinear(i, i, -width);
        self.add_linear(i, width * 2.0 * center);
        self.add_exponent(-width * center * center);
        self
    }

    /// Multiplies by `e^{2πi k z_i}`.
    pub fn add_wave(&mut self, i: usize, k: f64) -> &mut Self {
        self.add_linear(i, C::new(0.0, 2.0 * std::f64::consts::PI * k))
    }

    pub fn exponent(&self, z: &[f64]) -> C {
        debug_assert_eq!(z.len(), self.dim);
        let d = self.dim;
        let mut q = ZERO;
        for i in 0..d {
            if z[i] == 0.0 {
                continue;
            }
            let mut row = ZERO;
            for j in 0..d {
                row += self.a[i * d + j] * z[j];
            }
            q += row * z[i];
        }
        let lin: C = self.b.iter().zip(z).map(|(b, x)| b * x).sum();
        -q + lin + self.c
    }

    pub fn eval(&self, z: &[f64]) -> C {
        if self.coef == ZERO {
            return ZERO;
        }
        self.coef * self.exponent(z).exp()
    }

    /// `ln max_z |self(z)|`, or `None` when `Re A` is not positive definite.
    pub fn log_peak(&self) -> Option<f64> {
        if self.coef == ZERO {
            return Some(f64::NEG_INFINITY);
        }
        let d = self.dim;
        // Cholesky of Re A, then ¼ Re bᵀ (Re A)⁻¹ Re b
        let mut l = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..=i {
                let mut v = self.a[i * d + j].re;
                for k in 0..j {
                    v -= l[i * d + k] * l[j * d + k];
                }
                if i == j {
                    if !(v > 0.0) {
                        return None;
                    }
                    l[i * d + i] = v.sqrt();
                } else {
                    l[i * d + j] = v / l[j * d + j];
                }
            }
        }
        let mut y = vec![0.0; d];
        for i in 0..d {
            let mut v = self.b[i].re;
            for k in 0..i {
                v -= l[i * d + k] * y[k];
            }
            y[i] = v / l[i * d + i];
        }
        let quad: f64 = y.iter().map(|v| v * v).sum();
        Some(self.coef.norm().ln() + self.c.re + quad / 4.0)
    }

    pub fn mul(&self, other: &QuadExp) -> Result<QuadExp> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(QuadExp {
            dim: self.dim,
            coef: self.coef * other.coef,
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(),
            b: self.b.iter().zip(&other.b).map(|(x, y)| x + y).collect(),
            c: self.c + other.c,
        })
    }

    pub fn conj(&self) -> QuadExp {
        QuadExp {
            dim: self.dim,
            coef: self.coef.conj(),
            a: self.a.iter().map(|v| v.conj()).collect(),
            b: self.b.iter().map(|v| v.conj()).collect(),
            c: self.c.conj(),
        }
    }

    /// Substitutes `z = M z' + t` with real `M` (`dim × new_dim`, row-major).
    pub fn pullback(&self, new_dim: usize, m: &[f64], t: &[f64]) -> Result<QuadExp> {
        let d = self.dim;
        if m.len() != d * new_dim {
            return Err(Error::DimensionMismatch {
                expected: d * new_dim,
                got: m.len(),
            });
        }
        if t.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: t.len(),
            });
        }
        // AM (d × new_dim)
        let mut am = vec![ZERO; d * new_dim];
        for i in 0..d {
            for k in 0..d {
                let aik = self.a[i * d + k];
                if aik == ZERO {
                    continue;
                }
                for j in 0..new_dim {
                    am[i * new_dim + j] += aik * m[k * new_dim + j];
                }
            }
        }
        let mut a2 = vec![ZERO; new_dim * new_dim];
        for i in 0..new_dim {
            for j in 0..new_dim {
                let mut s = ZERO;
                for k in 0..d {
                    s += m[k * new_dim + i] * am[k * new_dim + j];
                }
                a2[i * new_dim + j] = s;
            }
        }
        // b' = Mᵀ (b - 2 A t)
        let mut at = vec![ZERO; d];
        for i in 0..d {
            for k in 0..d {
                at[i] += self.a[i * d + k] * t[k];
            }
        }
        let mut b2 = vec![ZERO; new_dim];
        for j in 0..new_dim {
            for k in 0..d {
                b2[j] += m[k * new_dim + j] * (self.b[k] - at[k] * 2.0);
            }
        }
        let tat: C = at.iter().zip(t).map(|(x, y)| x * y).sum();
        let bt: C = self.b.iter().zip(t).map(|(x, y)| x * y).sum();
        Ok(QuadExp {
            dim: new_dim,
            coef: self.coef,
            a: a2,
            b: b2,
            c: self.c - tat + bt,
        })
    }

    /// Places the variables of `self` at `positions` inside a `new_dim`-variable
    /// function.
    pub fn embed(&self, new_dim: usize, positions: &[usize]) -> Result<QuadExp> {
        if positions.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: positions.len(),
            });
        }
        let mut m = vec![0.0; self.dim * new_dim];
        for (i, &p) in positions.iter().enumerate() {
            if p >= new_dim {
                return Err(Error::DimensionMismatch {
                    expected: new_dim,
                    got: p + 1,
                });
            }
            m[i * new_dim + p] = 1.0;
        }
        self.pullback(new_dim, &m, &vec![0.0; self.dim])
    }

    /// Fixes `z_k = value`, removing the variable.
    pub fn fix(&self, k: usize, value: f64) -> Result<QuadExp> {
        let d = self.dim;
        if k >= d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: k + 1,
            });
        }
        let mut m = vec![0.0; d * (d - 1)];
        let mut t = vec![0.0; d];
        for i in 0..d {
            if i == k {
                t[i] = value;
            } else {
                let j = if i < k { i } else { i - 1 };
                m[i * (d - 1) + j] = 1.0;
            }
        }
        self.pullback(d - 1, &m, &t)
    }

    /// Integrates `z_k` over `R` exactly; requires `Re A_kk > 0`.
    pub fn integrate(&self, k: usize) -> Result<QuadExp> {
        let d = self.dim;
        if k >= d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: k + 1,
            });
        }
        let alpha = self.a[k * d + k];
        if !(alpha.re > 0.0) {
            return Err(Error::NotIntegrable(k));
        }
        let keep: Vec<usize> = (0..d).filter(|&i| i != k).collect();
        let nd = d - 1;
        let mut a2 = vec![ZERO; nd * nd];
        for (ii, &i) in keep.iter().enumerate() {
            for (jj, &j) in keep.iter().enumerate() {
                a2[ii * nd + jj] = self.a[i * d + j] - self.a[i * d + k] * self.a[k * d + j] / alpha;
            }
        }
        let bk = self.b[k];
        let b2 = keep
            .iter()
            .map(|&j| self.b[j] - bk * self.a[k * d + j] / alpha)
            .collect();
        let pref = (C::new(std::f64::consts::PI, 0.0) / alpha).sqrt();
        Ok(QuadExp {
            dim: nd,
            coef: self.coef * pref,
            a: a2,
            b: b2,
            c: self.c + bk * bk / (alpha * 4.0),
        })
    }

    /// Integrates the listed variables (any order, distinct).
    pub fn integrate_vars(&self, vars: &[usize]) -> Result<QuadExp> {
        let mut sorted = vars.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut out = self.clone();
        for &k in sorted.iter().rev() {
            out = out.integrate(k)?;
        }
        Ok(out)
    }

    /// Full integral over `R^dim`.
    pub fn integral(&self) -> Result<C> {
        let all: Vec<usize> = (0..self.dim).collect();
        let q = self.integrate_vars(&all)?;
        Ok(q.coef * q.c.exp())
    }
}

/// Finite sum of [`QuadExp`] terms in a common set of variables.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussSum {
    dim: usize,
    terms: Vec<QuadExp>,
}

impl GaussSum {
    pub fn zero(dim: usize) -> Self {
        GaussSum { dim, terms: vec![] }
    }

    pub fn from_terms(dim: usize, terms: Vec<QuadExp>) -> Result<Self> {
        for t in &terms {
            if t.dim != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: t.dim,
                });
            }
        }
        Ok(GaussSum { dim, terms })
    }

    pub fn single(term: QuadExp) -> Self {
        GaussSum {
            dim: term.dim,
            terms: vec![term],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[QuadExp] {
        &self.terms
    }

    pub fn push(&mut self, t: QuadExp) -> Result<()> {
        if t.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: t.dim,
            });
        }
        if t.coef != ZERO {
            self.terms.push(t);
        }
        Ok(())
    }

    pub fn eval(&self, z: &[f64]) -> C {
        self.terms.iter().map(|t| t.eval(z)).sum()
    }

    pub fn add(&self, other: &GaussSum) -> Result<GaussSum> {
        let mut out = self.clone();
        for t in &other.terms {
            out.push(t.clone())?;
        }
        Ok(out)
    }

    pub fn scaled(&self, s: C) -> GaussSum {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.scale(s);
        }
        out
    }

    pub fn mul(&self, other: &GaussSum) -> Result<GaussSum> {
        let mut out = GaussSum::zero(self.dim);
        for a in &self.terms {
            for b in &other.terms {
                out.push(a.mul(b)?)?;
            }
        }
        Ok(out)
    }

    /// Multiplies every term by the same [`QuadExp`] factor.
    pub fn mul_term(&self, f: &QuadExp) -> Result<GaussSum> {
        let terms = self
            .terms
            .iter()
            .map(|t| t.mul(f))
            .collect::<Result<Vec<_>>>()?;
        GaussSum::from_terms(self.dim, terms)
    }

    pub fn conj(&self) -> GaussSum {
        GaussSum {
            dim: self.dim,
            terms: self.terms.iter().map(|t| t.conj()).collect(),
        }
    }

    pub fn map(&self, new_dim: usize, f: impl Fn(&QuadExp) -> Result<QuadExp>) -> Result<GaussSum> {
        let terms = self.terms.iter().map(f).collect::<Result<Vec<_>>>()?;
        GaussSum::from_terms(new_dim, terms)
    }

    /// Drops terms whose peak is below `e^{-drop}` of the largest peak.
    pub fn pruned(&self, drop: f64) -> GaussSum {
        let peaks: Vec<Option<f64>> = self.terms.iter().map(|t| t.log_peak()).collect();
        let top = peaks.iter().flatten().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let terms = self
            .terms
            .iter()
            .zip(&peaks)
            .filter(|(_, p)| p.map_or(true, |p| p >= top - drop))
            .map(|(t, _)| t.clone())
            .collect();
        GaussSum { dim: self.dim, terms }
    }

    pub fn pullback(&self, new_dim: usize, m: &[f64], t: &[f64]) -> Result<GaussSum> {
        self.map(new_dim, |q| q.pullback(new_dim, m, t))
    }

    pub fn embed(&self, new_dim: usize, positions: &[usize]) -> Result<GaussSum> {
        self.map(new_dim, |q| q.embed(new_dim, positions))
    }

    pub fn integrate_vars(&self, vars: &[usize]) -> Result<GaussSum> {
        let nd = self.dim - vars.len();
        self.map(nd, |q| q.integrate_vars(vars))
    }

    pub fn integral(&self) -> Result<C> {
        self.terms.iter().map(|t| t.integral()).sum()
    }

    /// `∫ conj(self) · other`.
    pub fn inner(&self, other: &GaussSum) -> Result<C> {
        self.conj().mul(other)?.integral()
    }

    pub fn norm(&self) -> Result<f64> {
        Ok(self.inner(self)?.re.max(0.0).sqrt())
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn log_peak_matches_grid_max() {
        let mut q = QuadExp::constant(2, C::new(0.5, 0.5));
        q.add_gaussian(0, C::new(1.3, 0.2), 0.4)
            .add_gaussian(1, C::new(0.7, 0.0), -0.3)
            .add_bilinear(0, 1, C::new(0.4, 0.1))
            .add_wave(1, 0.8);
        let mut best: f64 = 0.0;
        for i in 0..400 {
            for j in 0..400 {
                let z = [-3.0 + i as f64 * 0.015, -3.0 + j as f64 * 0.015];
                best = best.max(q.eval(&z).norm());
            }
        }
        assert!((q.log_peak().unwrap() - best.ln()).abs() < 1e-3);
        let mut flat = QuadExp::one(1);
        flat.add_wave(0, 1.0);
        assert!(flat.log_peak().is_none());
    }

    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_integral() {
        let mut q = QuadExp::one(1);
        q.add_gaussian(0, C::new(PI, 0.0), 0.3);
        assert!((q.integral().unwrap() - C::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn fourier_transform_of_gaussian() {
        // ∫ e^{-π x²} e^{-2πi x k} dx = e^{-π k²}
        let mut q = QuadExp::one(2);
        q.add_gaussian(0, C::new(PI, 0.0), 0.0);
        q.add_bilinear(0, 1, C::new(0.0, -2.0 * PI));
        let ft = q.integrate(0).unwrap();
        for k in [-1.0, 0.0, 0.4, 2.0] {
            let want = (-PI * k * k).exp();
            assert!((ft.eval(&[k]) - want).norm() < 1e-14);
        }
    }

    #[test]
    fn integrate_matches_quadrature() {
        let mut q = QuadExp::one(2);
        q.add_bilinear(0, 0, C::new(-1.2, 0.3));
        q.add_bilinear(1, 1, C::new(-0.8, -0.5));
        q.add_bilinear(0, 1, C::new(0.4, 1.1));
        q.add_linear(0, C::new(0.2, 0.7));
        q.add_exponent(C::new(0.1, -0.2));
        let partial = q.integrate(1).unwrap();
        let h = 0.01;
        for x in [-0.7, 0.0, 1.3] {
            let mut s = C::new(0.0, 0.0);
            for k in -1500..=1500 {
                let y = k as f64 * h;
                s += q.eval(&[x, y]) * h;
            }
            assert!((partial.eval(&[x]) - s).norm() < 1e-10);
        }
    }

    #[test]
    fn pullback_matches_evaluation() {
        let mut q = QuadExp::one(2);
        q.add_gaussian(0, C::new(1.0, 0.2), 0.5);
        q.add_gaussian(1, C::new(2.0, 0.0), -0.1);
        q.add_bilinear(0, 1, C::new(0.0, 0.7));
        let m = [2.0, -1.0, 0.5, 3.0];
        let t = [0.1, -0.4];
        let p = q.pullback(2, &m, &t).unwrap();
        for z in [[0.2, 0.3], [-1.0, 0.7]] {
            let zz = [2.0 * z[0] - z[1] + 0.1, 0.5 * z[0] + 3.0 * z[1] - 0.4];
            assert!((p.eval(&z) - q.eval(&zz)).norm() < 1e-13);
        }
        let f = q.fix(1, 0.25).unwrap();
        assert!((f.eval(&[0.3]) - q.eval(&[0.3, 0.25])).norm() < 1e-14);
    }

    #[test]
    fn divergent_integral_rejected() {
        let mut q = QuadExp::one(1);
        q.add_bilinear(0, 0, C::new(1.0, 0.0));
        assert_eq!(q.integral(), Err(Error::NotIntegrable(0)));
    }
}
