//! Unitary representations of `E` and `Ẽ` and the integrated forms of the
//! matching representing pairs on `A` and `Ã`.
//!
//! | id | group side | algebra side | carrier |
//! |---|---|---|---|
//! | `Pq` | `Q_{p,q}` | `π_{p,q}` | `C` |
//! | `R` | `Q_r` | `π_r` | `L²(R^n)` |
//! | `TildeS` | `Q̃_s` | `π̃_s` | `C` |
//! | `TildePq` | `Q̃_{p,q}` | `π̃_{p,q}` | `L²(R)` in `d` |
//! | `TildeRs` | `Q̃_{r,s}` | `π̃_{r,s}` | `L²(R^n)` |

mod integrated;

pub use integrated::{integrated_form, pi_r_apply_analytic, pi_r_kernel, Assembly, IntegratedForm, TildeRsOperator, YGrid};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{TwistedAlgebra, Variant};
use crate::error::{Error, Result};
use crate::groups::{Group, GroupElement, GroupId};
use crate::kernel::fourier::resample_axis;
use crate::kernel::gauss::GaussSum;
use crate::kernel::grid::{GridSpec, GridVector};
use crate::kernel::operator::TestBattery;
use crate::kernel::scalar::{dot, ebar_unchecked, eta};

type C = Complex64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RepId {
    Pq { p: Vec<f64>, q: Vec<f64> },
    R { r: f64 },
    TildeS { s: f64 },
    TildePq { p: Vec<f64>, q: Vec<f64> },
    TildeRs { r: f64, s: f64 },
}

/// A representation label with its ambient `n` and `λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rep {
    pub id: RepId,
    pub n: usize,
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Carrier {
    Scalar,
    /// `L²(R^n)`.
    Configuration,
    /// `L²(R)` in the dilation variable.
    Line,
}

impl Rep {
    pub fn new(id: RepId, n: usize, lambda: f64) -> Result<Self> {
        if n == 0 || !lambda.is_finite() {
            return Err(Error::Parameter("representation needs n ≥ 1 and finite λ".into()));
        }
        match &id {
            RepId::Pq { p, q } | RepId::TildePq { p, q } => {
                if p.len() != n || q.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: p.len().max(q.len()),
                    });
                }
                if p.iter().chain(q).any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite("representation parameter"));
                }
            }
            RepId::R { r } | RepId::TildeRs { r, .. } if !r.is_finite() => {
                return Err(Error::NonFinite("representation parameter"))
            }
            _ => {}
        }
        Ok(Rep { id, n, lambda })
    }

    pub fn variant(&self) -> Variant {
        match self.id {
            RepId::Pq { .. } | RepId::R { .. } => Variant::A,
            _ => Variant::Atilde,
        }
    }

    /// The `r` whose cocycle the pair carries.
    pub fn cocycle_r(&self) -> f64 {
        match self.id {
            RepId::R { r } | RepId::TildeRs { r, .. } => r,
            _ => 0.0,
        }
    }

    pub fn group(&self) -> Group {
        let r = self.cocycle_r();
        let id = match self.variant() {
            Variant::A => GroupId::E { r },
            Variant::Atilde => GroupId::Etilde { r },
        };
        Group {
            id,
            n: self.n,
            lambda: self.lambda,
        }
    }

    pub fn carrier(&self) -> Carrier {
        match self.id {
            RepId::Pq { .. } | RepId::TildeS { .. } => Carrier::Scalar,
            RepId::TildePq { .. } => Carrier::Line,
            _ => Carrier::Configuration,
        }
    }

    pub fn label(&self) -> String {
        let v = |x: &[f64]| x.iter().map(|c| format!("{c}")).collect::<Vec<_>>().join(",");
        match &self.id {
            RepId::Pq { p, q } => format!("pi_pq(p=[{}],q=[{}])", v(p), v(q)),
            RepId::R { r } => format!("pi_r(r={r})"),
            RepId::TildeS { s } => format!("pit_s(s={s})"),
            RepId::TildePq { p, q } => format!("pit_pq(p=[{}],q=[{}])", v(p), v(q)),
            RepId::TildeRs { r, s } => format!("pit_rs(r={r},s={s})"),
        }
    }

    /// Grid the carrier lives on, derived from the configuration grid.
    pub fn carrier_grid(&self, spec: GridSpec) -> Result<GridSpec> {
        match self.carrier() {
            Carrier::Line => GridSpec::new(1, spec.points, spec.half_width),
            _ => {
                if spec.n != self.n {
                    return Err(Error::DimensionMismatch {
                        expected: self.n,
                        got: spec.n,
                    });
                }
                Ok(spec)
            }
        }
    }
}

/// Input or output of a group representation.
#[derive(Debug, Clone, PartialEq)]
pub enum QValue {
    Scalar(C),
    Vector(GridVector),
}

/// `Q(g) v` for `g` in `E` or `Ẽ`.
pub fn apply_q(rep: &Rep, g: &GroupElement, v: &QValue) -> Result<QValue> {
    if g.group != rep.group() {
        return Err(Error::GroupMismatch {
            left: rep.group().to_string(),
            right: g.group.to_string(),
        });
    }
    let dim = g.coords.len();
    let theta = ebar_unchecked(-g.coords[dim - 1]);
    let out = apply_coset(rep, &g.coords[..dim - 1], v)?;
    Ok(match out {
        QValue::Scalar(c) => QValue::Scalar(c * theta),
        QValue::Vector(x) => QValue::Vector(x.scaled(theta)),
    })
}

/// `Q` on the coset coordinates `(x, y[, w])` with `θ = 1`.
pub fn apply_coset(rep: &Rep, h: &[f64], v: &QValue) -> Result<QValue> {
    let n = rep.n;
    let d = rep.variant().fiber_dim(n);
    if h.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: h.len() });
    }
    let (x, y) = (&h[..n], &h[n..2 * n]);
    let w = if d > 2 * n { h[2 * n] } else { 0.0 };
    match (&rep.id, v) {
        (RepId::Pq { p, q }, QValue::Scalar(c)) => Ok(QValue::Scalar(c * ebar_unchecked(dot(p, x) + dot(q, y)))),
        (RepId::TildeS { s }, QValue::Scalar(c)) => Ok(QValue::Scalar(c * ebar_unchecked(s * w))),
        (RepId::R { r }, QValue::Vector(xi)) => {
            let steps = lattice(xi.spec(), x)?;
            let mut out = xi.lattice_shift(&steps)?;
            let et = eta(rep.lambda, *r);
            out.multiply_fn(|u| ebar_unchecked(et * dot(u, y)));
            Ok(QValue::Vector(out))
        }
        (RepId::TildeRs { r, s }, QValue::Vector(xi)) => {
            let et = eta(rep.lambda, *r);
            let mut out = if w == 0.0 {
                xi.lattice_shift(&lattice(xi.spec(), x)?)?
            } else {
                let e = (-w).exp();
                let mut cur = xi.clone();
                for (a, &xa) in x.iter().enumerate() {
                    cur = resample_axis(&cur, a, e, |_| e * xa)?;
                }
                cur.scaled(C::new((-(n as f64) * w / 2.0).exp(), 0.0))
            };
            let sw = ebar_unchecked(s * w);
            out.multiply_fn(|u| sw * ebar_unchecked(et * dot(u, y)));
            Ok(QValue::Vector(out))
        }
        (RepId::TildePq { p, q }, QValue::Vector(zeta)) => {
            if zeta.spec().n != 1 {
                return Err(Error::DimensionMismatch { expected: 1, got: zeta.spec().n });
            }
            let steps = lattice(zeta.spec(), &[w])?;
            let mut out = zeta.lattice_shift(&steps)?;
            let (px, qy) = (dot(p, x), dot(q, y));
            out.multiply_fn(|d| ebar_unchecked(d[0].exp() * px + (-d[0]).exp() * qy));
            Ok(QValue::Vector(out))
        }
        _ => Err(Error::Parameter(format!("{} does not act on this kind of vector", rep.label()))),
    }
}

fn lattice(spec: GridSpec, x: &[f64]) -> Result<Vec<i64>> {
    x.iter()
        .map(|&v| spec.lattice_steps(v).ok_or(Error::OffLattice(v)))
        .collect()
}

/// `Q(g)` on an analytic vector (a Gaussian sum in `u`).  Exact.
pub fn apply_q_analytic(rep: &Rep, h: &[f64], v: &GaussSum) -> Result<GaussSum> {
    let n = rep.n;
    let d = rep.variant().fiber_dim(n);
    if h.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: h.len() });
    }
    if v.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: v.dim() });
    }
    let (x, y) = (&h[..n], &h[n..2 * n]);
    let w = if d > 2 * n { h[2 * n] } else { 0.0 };
    let (r, s) = match rep.id {
        RepId::R { r } => (r, 0.0),
        RepId::TildeRs { r, s } => (r, s),
        _ => return Err(Error::Parameter(format!("{} has no analytic carrier", rep.label()))),
    };
    let e = (-w).exp();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = e;
    }
    let t: Vec<f64> = x.iter().map(|v| e * v).collect();
    let et = eta(rep.lambda, r);
    let mut phase = crate::kernel::gauss::QuadExp::constant(n, ebar_unchecked(s * w) * (-(n as f64) * w / 2.0).exp());
    for i in 0..n {
        phase.add_wave(i, -et * y[i]);
    }
    v.pullback(n, &m, &t)?.mul_term(&phase)
}

/// A representation paired with the cocycle level `r` it is tested against.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentingPair {
    pub r: f64,
    pub rep: Rep,
}

/// `max ‖Q(g)Q(g')v − σ^r(g,g') Q(gg')v‖ / ‖v‖` over sample pairs and the
/// battery (or over scalars for one-dimensional carriers).
pub fn validate_representing_pair(
    pair: &RepresentingPair,
    samples: &[(Vec<f64>, Vec<f64>)],
    battery: Option<&TestBattery>,
) -> Result<f64> {
    let rep = &pair.rep;
    let alg = TwistedAlgebra::new(rep.variant(), rep.n, rep.lambda)?;
    let mut worst: f64 = 0.0;
    for (g, h) in samples {
        let sigma = alg.sigma(pair.r, g, h)?;
        let gh = alg.coset_multiply(g, h)?;
        match rep.carrier() {
            Carrier::Scalar => {
                let one = QValue::Scalar(C::new(1.0, 0.0));
                let lhs = apply_coset(rep, g, &apply_coset(rep, h, &one)?)?;
                let rhs = apply_coset(rep, &gh, &one)?;
                if let (QValue::Scalar(a), QValue::Scalar(b)) = (lhs, rhs) {
                    worst = worst.max((a - sigma * b).norm());
                }
            }
            _ => {
                let battery = battery.ok_or(Error::EmptyBattery)?;
                for v in battery.vectors() {
                    let vv = QValue::Vector(v.clone());
                    let lhs = apply_coset(rep, g, &apply_coset(rep, h, &vv)?)?;
                    let rhs = apply_coset(rep, &gh, &vv)?;
                    if let (QValue::Vector(a), QValue::Vector(b)) = (lhs, rhs) {
                        let d = a.sub(&b.scaled(sigma))?.norm() / v.norm();
                        worst = worst.max(d);
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Random sample pairs `(g, g')` in coset coordinates that the grid backend
/// accepts: lattice `x` (and lattice `w` for the `Q̃_{p,q}` shift).
pub fn pair_samples<R: Rng>(rep: &Rep, spec: GridSpec, count: usize, rng: &mut R) -> Vec<(Vec<f64>, Vec<f64>)> {
    let n = rep.n;
    let h = spec.h();
    let one = |rng: &mut R| {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-24i64..=24) as f64 * h).collect();
        v.extend((0..n).map(|_| rng.gen_range(-1.0..1.0)));
        match rep.id {
            RepId::TildePq { .. } => v.push(rng.gen_range(-12i64..=12) as f64 * h),
            RepId::TildeRs { .. } | RepId::TildeS { .. } => v.push(rng.gen_range(-0.4..0.4)),
            _ => {}
        }
        v
    };
    (0..count).map(|_| (one(rng), one(rng))).collect()
}

/// How a representation of `Ã` restricts to `A`.
#[derive(Debug, Clone, PartialEq)]
pub enum Restriction {
    Single(Rep),
    /// Direct integral over `w`, sampled at the listed points.
    Integral(Vec<(f64, Rep)>),
}

/// Restriction of a `Ã` representation to `A`.
pub fn restrict(rep: &Rep) -> Result<Restriction> {
    let n = rep.n;
    let lam = rep.lambda;
    match &rep.id {
        RepId::TildeRs { r, .. } => Ok(Restriction::Single(Rep::new(RepId::R { r: *r }, n, lam)?)),
        RepId::TildeS { .. } => Ok(Restriction::Single(Rep::new(
            RepId::Pq {
                p: vec![0.0; n],
                q: vec![0.0; n],
            },
            n,
            lam,
        )?)),
        RepId::TildePq { p, q } => {
            let mut out = Vec::with_capacity(33);
            for k in 0..33 {
                let w = -4.0 + 0.25 * k as f64;
                let id = RepId::Pq {
                    p: p.iter().map(|v| w.exp() * v).collect(),
                    q: q.iter().map(|v| (-w).exp() * v).collect(),
                };
                out.push((w, Rep::new(id, n, lam)?));
            }
            Ok(Restriction::Integral(out))
        }
        _ => Err(Error::VariantMismatch(format!("{} is already a representation of A", rep.label()))),
    }
}

/// `E → Ẽ`, `(x, y; θ) ↦ (x, y, 0; θ)`.
pub fn embed_e(g: &GroupElement) -> Result<GroupElement> {
    let GroupId::E { r } = g.group.id else {
        return Err(Error::WrongGroup {
            expected: "E".into(),
            got: g.group.to_string(),
        });
    };
    let n = g.group.n;
    let tilde = Group {
        id: GroupId::Etilde { r },
        ..g.group
    };
    let mut c = g.coords[..2 * n].to_vec();
    c.push(0.0);
    c.push(g.coords[2 * n]);
    tilde.element(c)
}

#[cfg(test)]
mod tests;
