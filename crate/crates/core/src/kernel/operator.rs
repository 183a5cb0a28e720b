//! Grid operators, test batteries and the residual metric.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::grid::{GridSpec, GridVector};
use crate::error::{Error, Result};

type C = Complex64;

type Action = dyn Fn(&GridVector) -> Result<GridVector> + Send + Sync;

/// A linear map on grid vectors, applied lazily.
#[derive(Clone)]
pub struct LinearOperator {
    label: String,
    action: Arc<Action>,
}

impl std::fmt::Debug for LinearOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LinearOperator").field("label", &self.label).finish()
    }
}

impl LinearOperator {
    pub fn new(
        label: impl Into<String>,
        action: impl Fn(&GridVector) -> Result<GridVector> + Send + Sync + 'static,
    ) -> Self {
        LinearOperator {
            label: label.into(),
            action: Arc::new(action),
        }
    }

    pub fn identity() -> Self {
        Self::new("id", |v| Ok(v.clone()))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn apply(&self, v: &GridVector) -> Result<GridVector> {
        (self.action)(v)
    }

    /// `self ∘ inner`: applies `inner` first.
    pub fn after(&self, inner: &LinearOperator) -> LinearOperator {
        let (a, b) = (self.clone(), inner.clone());
        LinearOperator::new(format!("{}∘{}", a.label, b.label), move |v| {
            a.apply(&b.apply(v)?)
        })
    }

    pub fn labelled(mut self, label: impl Into<String>) -> LinearOperator {
        self.label = label.into();
        self
    }

    pub fn scaled(&self, c: C) -> LinearOperator {
        let a = self.clone();
        LinearOperator::new(format!("{c}·{}", a.label), move |v| Ok(a.apply(v)?.scaled(c)))
    }
}

/// Dense matrix acting on single-slot vectors, with the grid inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    spec: GridSpec,
    dim: usize,
    data: Vec<C>,
}

impl DenseMatrix {
    pub fn zeros(spec: GridSpec) -> Self {
        let dim = spec.points.pow(spec.n as u32);
        DenseMatrix {
            spec,
            dim,
            data: vec![C::new(0.0, 0.0); dim * dim],
        }
    }

    /// Fills entry `(i, j)` from `f(i, j)` in parallel over rows.
    pub fn from_fn(spec: GridSpec, f: impl Fn(usize, usize) -> C + Sync) -> Self {
        let dim = spec.points.pow(spec.n as u32);
        let mut data = vec![C::new(0.0, 0.0); dim * dim];
        data.par_chunks_mut(dim).enumerate().for_each(|(i, row)| {
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(i, j);
            }
        });
        DenseMatrix { spec, dim, data }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C {
        self.data[i * self.dim + j]
    }

    pub fn data_mut(&mut self) -> &mut [C] {
        &mut self.data
    }

    pub fn apply(&self, v: &GridVector) -> Result<GridVector> {
        if v.spec() != self.spec || v.slots() != 1 {
            return Err(Error::GridMismatch);
        }
        let x = v.values();
        let out: Vec<C> = self
            .data
            .par_chunks(self.dim)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect();
        GridVector::from_values(self.spec, 1, out)
    }

    /// Adjoint for the grid inner product (the cell weight cancels).
    pub fn adjoint(&self) -> DenseMatrix {
        let d = self.dim;
        let mut data = vec![C::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        DenseMatrix {
            spec: self.spec,
            dim: d,
            data,
        }
    }

    pub fn axpy(&mut self, c: C, other: &DenseMatrix) -> Result<()> {
        if other.spec != self.spec {
            return Err(Error::GridMismatch);
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn into_operator(self, label: impl Into<String>) -> LinearOperator {
        let m = Arc::new(self);
        LinearOperator::new(label, move |v| m.apply(v))
    }
}

/// Deterministic set of probe vectors used to compare operators.
#[derive(Debug, Clone)]
pub struct TestBattery {
    vectors: Vec<GridVector>,
}

/// Shape of the random Gaussians in a battery, in units scaled to the box.
#[derive(Debug, Clone, Copy)]
pub struct BatteryShape {
    /// Range of `a` in `exp(-a|u-u₀|²)` at `L = 8`; scales like `(8/L)²`.
    pub width: (f64, f64),
    /// Max `|u₀|` per axis at `L = 8`; scales like `L/8`.
    pub center: f64,
    /// Max frequency per axis of the modulation `e^{2πi k·u}`.
    pub frequency: f64,
}

impl Default for BatteryShape {
    fn default() -> Self {
        BatteryShape {
            width: (1.0, 3.0),
            center: 1.0,
            frequency: 0.3,
        }
    }
}

impl TestBattery {
    pub fn new(vectors: Vec<GridVector>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::EmptyBattery);
        }
        let first = &vectors[0];
        for v in &vectors[1..] {
            first.check_compatible(v)?;
        }
        Ok(TestBattery { vectors })
    }

    /// `count` random normalized Gaussians on `slots` copies of the grid.
    pub fn gaussians<R: Rng>(
        spec: GridSpec,
        slots: usize,
        count: usize,
        shape: BatteryShape,
        rng: &mut R,
    ) -> Result<Self> {
        if count == 0 {
            return Err(Error::EmptyBattery);
        }
        let rel = 8.0 / spec.half_width;
        let axes = spec.n * slots;
        let mut vectors = Vec::with_capacity(count);
        for _ in 0..count {
            let a: Vec<f64> = (0..axes)
                .map(|_| rng.gen_range(shape.width.0..=shape.width.1) * rel * rel)
                .collect();
            let c: Vec<f64> = (0..axes)
                .map(|_| rng.gen_range(-shape.center..=shape.center) / rel)
                .collect();
            let k: Vec<f64> = (0..axes)
                .map(|_| rng.gen_range(-shape.frequency..=shape.frequency))
                .collect();
            let mut v = GridVector::from_fn(spec, slots, |x| {
                let mut e = C::new(0.0, 0.0);
                for i in 0..axes {
                    let u = x[i] - c[i];
                    e += C::new(-a[i] * u * u, 2.0 * std::f64::consts::PI * k[i] * x[i]);
                }
                e.exp()
            });
            let nrm = v.norm();
            v.scale(C::new(1.0 / nrm, 0.0));
            vectors.push(v);
        }
        Self::new(vectors)
    }

    /// The normalized `exp(-π|z|²)` alone.
    pub fn unit_gaussian(spec: GridSpec, slots: usize) -> Result<Self> {
        let mut v = GridVector::from_fn(spec, slots, |x| {
            C::new((-std::f64::consts::PI * x.iter().map(|t| t * t).sum::<f64>()).exp(), 0.0)
        });
        let nrm = v.norm();
        v.scale(C::new(1.0 / nrm, 0.0));
        Self::new(vec![v])
    }

    pub fn vectors(&self) -> &[GridVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Every vector keeps at least `1 - 1e-4` of its mass in the inner box.
    pub fn is_concentrated(&self) -> bool {
        self.vectors.iter().all(|v| v.inner_box_fraction() >= 1.0 - 1e-4)
    }
}

/// `max_ξ ‖(A − B)ξ‖ / ‖ξ‖` over the battery.
pub fn operator_residual(a: &LinearOperator, b: &LinearOperator, battery: &TestBattery) -> Result<f64> {
    residual_by(battery, |v| Ok((a.apply(v)?, b.apply(v)?)))
}

/// Residual where each side is produced by a closure.
pub fn residual_by(
    battery: &TestBattery,
    f: impl Fn(&GridVector) -> Result<(GridVector, GridVector)>,
) -> Result<f64> {
    if battery.is_empty() {
        return Err(Error::EmptyBattery);
    }
    let mut worst: f64 = 0.0;
    for v in battery.vectors() {
        let (x, y) = f(v)?;
        let d = x.sub(&y)?.norm() / v.norm();
        if !d.is_finite() {
            return Ok(f64::INFINITY);
        }
        worst = worst.max(d);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn battery() -> TestBattery {
        let spec = GridSpec::new(1, 128, 8.0).unwrap();
        TestBattery::gaussians(spec, 1, 8, BatteryShape::default(), &mut ChaCha8Rng::seed_from_u64(1)).unwrap()
    }

    #[test]
    fn residual_of_identical_operators_is_zero() {
        let b = battery();
        let op = LinearOperator::new("shift", |v: &GridVector| v.lattice_shift(&[3]));
        assert_eq!(operator_residual(&op, &op, &b).unwrap(), 0.0);
    }

    #[test]
    fn residual_is_symmetric_and_detects_scaling() {
        let b = battery();
        let id = LinearOperator::identity();
        let two = id.scaled(C::new(2.0, 0.0));
        let r1 = operator_residual(&id, &two, &b).unwrap();
        let r2 = operator_residual(&two, &id, &b).unwrap();
        assert_eq!(r1, r2);
        assert!((r1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_battery_rejected() {
        assert!(matches!(TestBattery::new(vec![]), Err(Error::EmptyBattery)));
    }

    #[test]
    fn battery_is_concentrated_and_normalized() {
        let b = battery();
        assert_eq!(b.len(), 8);
        assert!(b.is_concentrated());
        for v in b.vectors() {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_adjoint() {
        let spec = GridSpec::new(1, 16, 2.0).unwrap();
        let m = DenseMatrix::from_fn(spec, |i, j| C::new(i as f64, (j * i) as f64 * 0.1));
        let x = GridVector::from_fn(spec, 1, |u| C::new(u[0], 1.0));
        let y = GridVector::from_fn(spec, 1, |u| C::new(1.0, u[0] * u[0]));
        let lhs = m.apply(&x).unwrap().inner(&y).unwrap();
        let rhs = x.inner(&m.adjoint().apply(&y).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-9);
    }
}
