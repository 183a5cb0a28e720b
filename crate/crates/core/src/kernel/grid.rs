//! Uniform periodic grids on `[-L, L)^d` and the vectors that live on them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-axis sampling of one copy of `R^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Dimension of the configuration space (axes per slot).
    pub n: usize,
    /// Points per axis, a power of two.
    pub points: usize,
    /// Half-width `L` of the box.
    pub half_width: f64,
}

impl GridSpec {
    pub fn new(n: usize, points: usize, half_width: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGrid("dimension must be positive".into()));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 8, got {points}"
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half-width must be positive, got {half_width}"
            )));
        }
        Ok(GridSpec {
            n,
            points,
            half_width,
        })
    }

    /// Spacing `h = 2L/N`.
    pub fn h(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    /// Coordinate of index `i` along any axis.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.h()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.coord(i)).collect()
    }

    /// Lattice index offset for a shift `x`, if `x` is a multiple of `h`.
    pub fn lattice_steps(&self, x: f64) -> Option<i64> {
        let k = x / self.h();
        let kr = k.round();
        if (k - kr).abs() <= 1e-9 * kr.abs().max(1.0) {
            Some(kr as i64)
        } else {
            None
        }
    }
}

/// Samples on `slots` copies of the grid; a single vector has one slot and
/// a tensor vector two.  Axis 0 is the slowest varying.
#[derive(Debug, Clone, PartialEq)]
pub struct GridVector {
    spec: GridSpec,
    slots: usize,
    values: Vec<Complex64>,
}

/// Vectors on `L²(R^n) ⊗ L²(R^n)`; the first `n` axes form the first slot.
pub type TensorGridVector = GridVector;

impl GridVector {
    pub fn zeros(spec: GridSpec, slots: usize) -> Self {
        let len = spec.points.pow((spec.n * slots) as u32);
        GridVector {
            spec,
            slots,
            values: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn from_values(spec: GridSpec, slots: usize, values: Vec<Complex64>) -> Result<Self> {
        let len = spec.points.pow((spec.n * slots) as u32);
        if values.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: values.len(),
            });
        }
        Ok(GridVector {
            spec,
            slots,
            values,
        })
    }

    /// Samples `f` at every grid point; `f` receives all axis coordinates.
    pub fn from_fn(spec: GridSpec, slots: usize, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let mut v = Self::zeros(spec, slots);
        let axes = v.axes();
        let mut x = vec![0.0; axes];
        for idx in 0..v.values.len() {
            v.fill_coords(idx, &mut x);
            v.values[idx] = f(&x);
        }
        v
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn axes(&self) -> usize {
        self.spec.n * self.slots
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Writes the coordinates of flat index `idx` into `out`.
    pub fn fill_coords(&self, mut idx: usize, out: &mut [f64]) {
        let n = self.spec.points;
        for a in (0..out.len()).rev() {
            out[a] = self.spec.coord(idx % n);
            idx /= n;
        }
    }

    /// Stride of `axis` in the flat layout.
    pub fn stride(&self, axis: usize) -> usize {
        self.spec.points.pow((self.axes() - 1 - axis) as u32)
    }

    pub fn check_compatible(&self, other: &GridVector) -> Result<()> {
        if self.spec != other.spec || self.slots != other.slots {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Cell volume `h^axes`.
    pub fn cell(&self) -> f64 {
        self.spec.h().powi(self.axes() as i32)
    }

    pub fn inner(&self, other: &GridVector) -> Result<Complex64> {
        self.check_compatible(other)?;
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.cell())
    }

    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.cell()).sqrt()
    }

    pub fn scale(&mut self, c: Complex64) {
        self.values.iter_mut().for_each(|v| *v *= c);
    }

    pub fn scaled(mut self, c: Complex64) -> Self {
        self.scale(c);
        self
    }

    pub fn axpy(&mut self, c: Complex64, other: &GridVector) -> Result<()> {
        self.check_compatible(other)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn sub(&self, other: &GridVector) -> Result<GridVector> {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), other)?;
        Ok(out)
    }

    /// Pointwise multiplication by a function of the coordinates.
    pub fn multiply_fn(&mut self, f: impl Fn(&[f64]) -> Complex64) {
        let mut x = vec![0.0; self.axes()];
        for idx in 0..self.values.len() {
            self.fill_coords(idx, &mut x);
            let m = f(&x);
            self.values[idx] *= m;
        }
    }

    /// `ξ(u + k h)` along each axis with periodic wrap-around.
    pub fn lattice_shift(&self, steps: &[i64]) -> Result<GridVector> {
        if steps.len() != self.axes() {
            return Err(Error::DimensionMismatch {
                expected: self.axes(),
                got: steps.len(),
            });
        }
        if steps.iter().all(|&k| k == 0) {
            return Ok(self.clone());
        }
        let n = self.spec.points as i64;
        let mut out = Self::zeros(self.spec, self.slots);
        let axes = self.axes();
        let mut multi = vec![0i64; axes];
        for idx in 0..self.values.len() {
            let mut rem = idx;
            for a in (0..axes).rev() {
                multi[a] = (rem % self.spec.points) as i64;
                rem /= self.spec.points;
            }
            let mut src = 0usize;
            for a in 0..axes {
                let j = (multi[a] + steps[a]).rem_euclid(n) as usize;
                src = src * self.spec.points + j;
            }
            out.values[idx] = self.values[src];
        }
        Ok(out)
    }

    /// Swaps the two slots of a tensor vector: `(Fξ)(u, v) = ξ(v, u)`.
    pub fn flip(&self) -> Result<GridVector> {
        if self.slots != 2 {
            return Err(Error::Parameter("flip needs a two-slot vector".into()));
        }
        let block = self.spec.points.pow(self.spec.n as u32);
        let mut out = Self::zeros(self.spec, 2);
        for i in 0..block {
            for j in 0..block {
                out.values[i * block + j] = self.values[j * block + i];
            }
        }
        Ok(out)
    }

    /// Fraction of the squared norm carried by the inner box `[-L/2, L/2)`.
    pub fn inner_box_fraction(&self) -> f64 {
        let total: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        if total == 0.0 {
            return 1.0;
        }
        let half = self.spec.half_width / 2.0;
        let mut x = vec![0.0; self.axes()];
        let mut inside = 0.0;
        for idx in 0..self.values.len() {
            self.fill_coords(idx, &mut x);
            if x.iter().all(|&c| c >= -half && c < half) {
                inside += self.values[idx].norm_sqr();
            }
        }
        inside / total
    }
}

/// Tensor product `ξ ⊗ ζ` of two single-slot vectors.
pub fn tensor(a: &GridVector, b: &GridVector) -> Result<TensorGridVector> {
    a.check_compatible(b)?;
    if a.slots != 1 {
        return Err(Error::Parameter("tensor factors must be single-slot".into()));
    }
    let mut values = Vec::with_capacity(a.len() * b.len());
    for x in &a.values {
        for y in &b.values {
            values.push(x * y);
        }
    }
    GridVector::from_values(a.spec, 2, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(spec: GridSpec) -> GridVector {
        GridVector::from_fn(spec, 1, |x| {
            Complex64::new((-std::f64::consts::PI * x[0] * x[0]).exp(), 0.0)
        })
    }

    #[test]
    fn spec_validation() {
        assert!(GridSpec::new(1, 256, 8.0).is_ok());
        assert!(GridSpec::new(1, 100, 8.0).is_err());
        assert!(GridSpec::new(1, 256, 0.0).is_err());
        assert!(GridSpec::new(0, 256, 8.0).is_err());
        let s = GridSpec::new(1, 256, 8.0).unwrap();
        assert_eq!(s.h(), 1.0 / 16.0);
        assert_eq!(s.lattice_steps(0.25), Some(4));
        assert_eq!(s.lattice_steps(0.3), None);
    }

    #[test]
    fn gaussian_norm() {
        let spec = GridSpec::new(1, 256, 8.0).unwrap();
        // ∫ e^{-2π x²} dx = 1/√2
        let nrm = gauss(spec).norm();
        assert!((nrm * nrm - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn lattice_shift_roundtrip() {
        let spec = GridSpec::new(1, 64, 4.0).unwrap();
        let g = gauss(spec);
        let back = g.lattice_shift(&[5]).unwrap().lattice_shift(&[-5]).unwrap();
        assert_eq!(back, g);
        let s = g.lattice_shift(&[8]).unwrap();
        // ξ(u + 1) peaks at u = -1
        let peak = s
            .values()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.re.partial_cmp(&b.1.re).unwrap())
            .unwrap()
            .0;
        assert_eq!(spec.coord(peak), -1.0);
    }

    #[test]
    fn flip_is_involution() {
        let spec = GridSpec::new(1, 16, 2.0).unwrap();
        let a = GridVector::from_fn(spec, 1, |x| Complex64::new(x[0], 1.0));
        let b = GridVector::from_fn(spec, 1, |x| Complex64::new(1.0, x[0] * x[0]));
        let t = tensor(&a, &b).unwrap();
        let f = t.flip().unwrap();
        assert_eq!(f, tensor(&b, &a).unwrap());
        assert_eq!(f.flip().unwrap(), t);
    }
}
