//! Chirp-z transforms and trigonometric resampling along grid axes.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::grid::GridVector;
use super::scalar::ebar_unchecked;
use crate::error::{Error, Result};

#[inline]
fn e(cycles: f64) -> Complex64 {
    ebar_unchecked(-cycles)
}

/// Evaluates `X_m = Σ_k g_k e^{2πi α k m}` for `m < m_out` (Bluestein).
pub struct ChirpZ {
    n_in: usize,
    m_out: usize,
    size: usize,
    pre: Vec<Complex64>,
    post: Vec<Complex64>,
    kernel_hat: Vec<Complex64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl ChirpZ {
    pub fn new(n_in: usize, m_out: usize, alpha: f64) -> Self {
        let size = (n_in + m_out - 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(size);
        let inv = planner.plan_fft_inverse(size);
        // e^{2πiαkm} = e^{πiα k²} e^{πiα m²} e^{-πiα (m-k)²}
        let chirp = |j: i64| e(0.5 * alpha * (j * j) as f64);
        let pre = (0..n_in as i64).map(chirp).collect();
        let post = (0..m_out as i64).map(chirp).collect();
        let mut kernel = vec![Complex64::new(0.0, 0.0); size];
        for j in 0..m_out {
            kernel[j] = chirp(j as i64).conj();
        }
        for j in 1..n_in {
            kernel[size - j] = chirp(j as i64).conj();
        }
        fwd.process(&mut kernel);
        ChirpZ {
            n_in,
            m_out,
            size,
            pre,
            post,
            kernel_hat: kernel,
            fwd,
            inv,
        }
    }

    pub fn apply(&self, input: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(input.len(), self.n_in);
        let mut buf = vec![Complex64::new(0.0, 0.0); self.size];
        for (k, (g, p)) in input.iter().zip(&self.pre).enumerate() {
            buf[k] = g * p;
        }
        self.fwd.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= k;
        }
        self.inv.process(&mut buf);
        let norm = 1.0 / self.size as f64;
        (0..self.m_out)
            .map(|m| buf[m] * self.post[m] * norm)
            .collect()
    }
}

/// Resamples one periodic lane of `points` samples on `[-L, L)`:
/// `out(u_m) = p(a u_m + b)` where `p` is the trigonometric interpolant.
pub struct LaneResampler {
    points: usize,
    half_width: f64,
    scale: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    chirp: Option<ChirpZ>,
}

impl LaneResampler {
    pub fn new(points: usize, half_width: f64, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale != 0.0) {
            return Err(Error::Parameter(format!("invalid resampling scale {scale}")));
        }
        let mut planner = FftPlanner::new();
        let chirp = if scale == 1.0 {
            None
        } else {
            Some(ChirpZ::new(points, points, scale / points as f64))
        };
        Ok(LaneResampler {
            points,
            half_width,
            scale,
            fwd: planner.plan_fft_forward(points),
            inv: planner.plan_fft_inverse(points),
            chirp,
        })
    }

    fn h(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    /// Resamples `lane` in place with offset `b`.
    pub fn apply(&self, lane: &mut [Complex64], offset: f64) {
        let n = self.points;
        if self.scale == 1.0 && offset == 0.0 {
            return;
        }
        let h = self.h();
        let mut spec = lane.to_vec();
        self.fwd.process(&mut spec);
        let norm = 1.0 / n as f64;
        // fractional index of the first target point
        let j0 = (offset + self.half_width * (1.0 - self.scale)) / h;
        let freq = |k: usize| -> f64 {
            if k < n / 2 {
                k as f64
            } else {
                k as f64 - n as f64
            }
        };
        match &self.chirp {
            None => {
                for (k, c) in spec.iter_mut().enumerate() {
                    *c *= e(freq(k) * j0 / n as f64) * norm;
                }
                self.inv.process(&mut spec);
                lane.copy_from_slice(&spec);
            }
            Some(cz) => {
                // reorder to k' = k̃ + N/2
                let mut d = vec![Complex64::new(0.0, 0.0); n];
                for (k, c) in spec.iter().enumerate() {
                    let kt = freq(k);
                    let kp = (kt + (n / 2) as f64) as usize;
                    d[kp] = c * e(kt * j0 / n as f64) * norm;
                }
                let out = cz.apply(&d);
                for (m, v) in out.into_iter().enumerate() {
                    lane[m] = v * e(-0.5 * self.scale * m as f64);
                }
            }
        }
        // zero wherever the source point leaves the box
        for (m, v) in lane.iter_mut().enumerate() {
            let t = self.scale * (-self.half_width + m as f64 * h) + offset;
            if t < -self.half_width - 1e-12 || t >= self.half_width - 1e-12 {
                *v = Complex64::new(0.0, 0.0);
            }
        }
    }
}

/// `out(c) = ξ(c')` where `c'` agrees with `c` except on `axis`, where
/// `c'_axis = scale · c_axis + offset(c)`.  `offset` sees the lane coordinates
/// (its `axis` entry is meaningless).  Sources outside the box read as zero.
pub fn resample_axis(
    v: &GridVector,
    axis: usize,
    scale: f64,
    offset: impl Fn(&[f64]) -> f64 + Sync,
) -> Result<GridVector> {
    if axis >= v.axes() {
        return Err(Error::DimensionMismatch {
            expected: v.axes(),
            got: axis + 1,
        });
    }
    let spec = v.spec();
    let n = spec.points;
    let rs = LaneResampler::new(n, spec.half_width, scale)?;
    let stride = v.stride(axis);
    let lanes = v.len() / n;
    let src = v.values();
    let results: Vec<Vec<Complex64>> = (0..lanes)
        .into_par_iter()
        .map(|l| {
            let start = (l / stride) * stride * n + l % stride;
            let mut lane: Vec<Complex64> = (0..n).map(|m| src[start + m * stride]).collect();
            let mut coords = vec![0.0; v.axes()];
            v.fill_coords(start, &mut coords);
            let b = offset(&coords);
            rs.apply(&mut lane, b);
            lane
        })
        .collect();
    let mut out = GridVector::zeros(spec, v.slots());
    let dst = out.values_mut();
    for (l, lane) in results.into_iter().enumerate() {
        let start = (l / stride) * stride * n + l % stride;
        for (m, val) in lane.into_iter().enumerate() {
            dst[start + m * stride] = val;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::grid::GridSpec;

    fn gauss(spec: GridSpec, a: f64, c: f64, k: f64) -> GridVector {
        GridVector::from_fn(spec, 1, |x| {
            let u = x[0] - c;
            Complex64::new((-a * u * u).exp(), 0.0) * e(k * x[0])
        })
    }

    #[test]
    fn chirp_matches_direct_sum() {
        let g: Vec<Complex64> = (0..13).map(|k| Complex64::new(k as f64, 1.0 / (k as f64 + 1.0))).collect();
        let alpha = 0.0371;
        let cz = ChirpZ::new(g.len(), 9, alpha);
        let out = cz.apply(&g);
        for (m, o) in out.iter().enumerate() {
            let direct: Complex64 = g
                .iter()
                .enumerate()
                .map(|(k, gk)| gk * e(alpha * (k * m) as f64))
                .sum();
            assert!((o - direct).norm() < 1e-10);
        }
    }

    #[test]
    fn dilation_and_shift_of_gaussian() {
        let spec = GridSpec::new(1, 256, 8.0).unwrap();
        let v = gauss(spec, 1.3, 0.4, 0.3);
        for &(a, b) in &[(1.0, 0.37), (0.6, 0.0), (1.7, -0.25), (1.0, 0.5)] {
            let out = resample_axis(&v, 0, a, |_| b).unwrap();
            let want = GridVector::from_fn(spec, 1, |x| {
                let t = a * x[0] + b;
                let u = t - 0.4;
                Complex64::new((-1.3 * u * u).exp(), 0.0) * e(0.3 * t)
            });
            let err = out.sub(&want).unwrap().norm();
            assert!(err < 1e-10, "a={a} b={b} err={err}");
        }
    }

    #[test]
    fn lane_offsets_follow_other_axes() {
        let spec = GridSpec::new(1, 64, 6.0).unwrap();
        let v = GridVector::from_fn(spec, 2, |x| {
            Complex64::new((-(x[0] * x[0] + x[1] * x[1])).exp(), 0.0)
        });
        // shear along axis 1 by 0.5 * x0
        let out = resample_axis(&v, 1, 1.0, |c| 0.5 * c[0]).unwrap();
        let want = GridVector::from_fn(spec, 2, |x| {
            let y = x[1] + 0.5 * x[0];
            Complex64::new((-(x[0] * x[0] + y * y)).exp(), 0.0)
        });
        assert!(out.sub(&want).unwrap().norm() < 1e-9);
    }
}
