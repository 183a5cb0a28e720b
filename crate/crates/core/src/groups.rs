//! Group laws of `H`, `H̃`, `G`, `G̃`, their doubles `D`, `D̃`, the central
//! extensions `E`, `Ẽ`, and the Lie bracket on `𝔡̃ = 𝔤̃ ⋈ 𝔥̃`.
//!
//! Coordinates (each block of `n` reals is a vector in `R^n`):
//!
//! | group | layout |
//! |---|---|
//! | `H`  | `x, y, z` |
//! | `H̃`  | `x, y, z, w` |
//! | `G`  | `p, q, r` |
//! | `G̃`  | `p, q, r, s` |
//! | `D`  | `p, q, r, x, y, z` |
//! | `D̃`  | `p, q, r, s, x, y, z, w` |
//! | `E`  | `x, y, t` with `θ = e^{2πit}` |
//! | `Ẽ`  | `x, y, w, t` |
//!
//! The `D` law is the `D̃` law restricted to `s = w = 0` with `s` discarded;
//! `s` is not preserved by that restriction, the others are.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::scalar::{dot, eta};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GroupId {
    H,
    Htilde,
    G,
    Gtilde,
    D,
    Dtilde,
    /// Central extension of `H/Z` by the cocycle at `r`.
    E { r: f64 },
    Etilde { r: f64 },
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupId::H => write!(f, "H"),
            GroupId::Htilde => write!(f, "H~"),
            GroupId::G => write!(f, "G"),
            GroupId::Gtilde => write!(f, "G~"),
            GroupId::D => write!(f, "D"),
            GroupId::Dtilde => write!(f, "D~"),
            GroupId::E { r } => write!(f, "E(r={r})"),
            GroupId::Etilde { r } => write!(f, "E~(r={r})"),
        }
    }
}

/// A group together with its dimension parameter `n` and deformation `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Group {
    pub id: GroupId,
    pub n: usize,
    pub lambda: f64,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[n={}, λ={}]", self.id, self.n, self.lambda)
    }
}

impl Group {
    pub fn new(id: GroupId, n: usize, lambda: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("n must be positive".into()));
        }
        if !lambda.is_finite() {
            return Err(Error::NonFinite("group λ"));
        }
        if let GroupId::E { r } | GroupId::Etilde { r } = id {
            if !r.is_finite() {
                return Err(Error::NonFinite("group r"));
            }
        }
        Ok(Group { id, n, lambda })
    }

    pub fn dim(&self) -> usize {
        let n = self.n;
        match self.id {
            GroupId::H | GroupId::G => 2 * n + 1,
            GroupId::Htilde | GroupId::Gtilde => 2 * n + 2,
            GroupId::D => 4 * n + 2,
            GroupId::Dtilde => 4 * n + 4,
            GroupId::E { .. } => 2 * n + 1,
            GroupId::Etilde { .. } => 2 * n + 2,
        }
    }

    /// Index of the circle coordinate, if any.
    pub fn circle_index(&self) -> Option<usize> {
        match self.id {
            GroupId::E { .. } | GroupId::Etilde { .. } => Some(self.dim() - 1),
            _ => None,
        }
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            group: *self,
            coords: vec![0.0; self.dim()],
        }
    }

    pub fn element(&self, coords: Vec<f64>) -> Result<GroupElement> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("group element"));
        }
        let mut coords = coords;
        if let Some(i) = self.circle_index() {
            coords[i] = coords[i].rem_euclid(1.0);
        }
        Ok(GroupElement {
            group: *self,
            coords,
        })
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        if g.group != *self {
            return Err(Error::GroupMismatch {
                left: self.to_string(),
                right: g.group.to_string(),
            });
        }
        Ok(())
    }

    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        let out = law(self, &a.coords, &b.coords);
        self.element(out)
    }

    pub fn inverse(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        let out = inverse(self, &a.coords)?;
        self.element(out)
    }

    /// Max coordinate distance; the circle coordinate uses the circular
    /// metric on `[0, 1)`.
    pub fn distance(&self, a: &GroupElement, b: &GroupElement) -> Result<f64> {
        self.check(a)?;
        self.check(b)?;
        let circ = self.circle_index();
        Ok(a.coords
            .iter()
            .zip(&b.coords)
            .enumerate()
            .map(|(i, (x, y))| {
                if Some(i) == circ {
                    let d = (x - y).rem_euclid(1.0);
                    d.min(1.0 - d)
                } else {
                    (x - y).abs()
                }
            })
            .fold(0.0, f64::max))
    }
}

/// A point of a group in the coordinates listed at the top of this module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub group: Group,
    pub coords: Vec<f64>,
}

impl GroupElement {
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// Convenience for `group.multiply(a, b)` using the group of `a`.
pub fn multiply(a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
    a.group.multiply(a, b)
}

pub fn inverse_of(a: &GroupElement) -> Result<GroupElement> {
    a.group.inverse(a)
}

pub fn identity(g: &Group) -> GroupElement {
    g.identity()
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn axpby(a: f64, x: &[f64], b: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(u, v)| a * u + b * v).collect()
}

/// Raw coordinate law, assuming lengths already match.
pub(crate) fn law(g: &Group, a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = g.n;
    let lam = g.lambda;
    match g.id {
        GroupId::H => {
            let (x, y, z) = (&a[..n], &a[n..2 * n], a[2 * n]);
            let (x2, y2, z2) = (&b[..n], &b[n..2 * n], b[2 * n]);
            let mut out = add(x, x2);
            out.extend(add(y, y2));
            out.push(z + z2 + dot(x, y2));
            out
        }
        GroupId::Htilde => {
            let (x, y, z, w) = (&a[..n], &a[n..2 * n], a[2 * n], a[2 * n + 1]);
            let (x2, y2, z2, w2) = (&b[..n], &b[n..2 * n], b[2 * n], b[2 * n + 1]);
            let ew = w.exp();
            let mut out = axpby(1.0, x, ew, x2);
            out.extend(axpby(1.0, y, 1.0 / ew, y2));
            out.push(z + z2 + dot(x, y2) / ew);
            out.push(w + w2);
            out
        }
        GroupId::G | GroupId::Gtilde => {
            let (p, q, r) = (&a[..n], &a[n..2 * n], a[2 * n]);
            let (p2, q2, r2) = (&b[..n], &b[n..2 * n], b[2 * n]);
            let e = (lam * r2).exp();
            let mut out = axpby(e, p, 1.0, p2);
            out.extend(axpby(e, q, 1.0, q2));
            out.push(r + r2);
            if g.id == GroupId::Gtilde {
                out.push(a[2 * n + 1] + b[2 * n + 1]);
            }
            out
        }
        GroupId::Dtilde => dtilde_law(n, lam, a, b),
        GroupId::D => {
            let lift = |v: &[f64]| -> Vec<f64> {
                let mut out = v[..2 * n + 1].to_vec();
                out.push(0.0);
                out.extend_from_slice(&v[2 * n + 1..]);
                out.push(0.0);
                out
            };
            let prod = dtilde_law(n, lam, &lift(a), &lift(b));
            let mut out = prod[..2 * n + 1].to_vec();
            out.extend_from_slice(&prod[2 * n + 2..4 * n + 3]);
            out
        }
        GroupId::E { r } => {
            let (x, y, t) = (&a[..n], &a[n..2 * n], a[2 * n]);
            let (x2, y2, t2) = (&b[..n], &b[n..2 * n], b[2 * n]);
            let mut out = add(x, x2);
            out.extend(add(y, y2));
            out.push((t + t2 - eta(lam, r) * dot(x, y2)).rem_euclid(1.0));
            out
        }
        GroupId::Etilde { r } => {
            let (x, y, w, t) = (&a[..n], &a[n..2 * n], a[2 * n], a[2 * n + 1]);
            let (x2, y2, w2, t2) = (&b[..n], &b[n..2 * n], b[2 * n], b[2 * n + 1]);
            let ew = w.exp();
            let mut out = axpby(1.0, x, ew, x2);
            out.extend(axpby(1.0, y, 1.0 / ew, y2));
            out.push(w + w2);
            out.push((t + t2 - eta(lam, r) * dot(x, y2) / ew).rem_euclid(1.0));
            out
        }
    }
}

/// The `D̃` law in coordinates `(p, q, r, s; x, y, z, w)`.
fn dtilde_law(n: usize, lam: f64, a: &[f64], b: &[f64]) -> Vec<f64> {
    let o = 2 * n + 2;
    let (p, q, r, s) = (&a[..n], &a[n..2 * n], a[2 * n], a[2 * n + 1]);
    let (x, y, z, w) = (&a[o..o + n], &a[o + n..o + 2 * n], a[o + 2 * n], a[o + 2 * n + 1]);
    let (p2, q2, r2, s2) = (&b[..n], &b[n..2 * n], b[2 * n], b[2 * n + 1]);
    let (x2, y2, z2, w2) = (&b[o..o + n], &b[o + n..o + 2 * n], b[o + 2 * n], b[o + 2 * n + 1]);
    let up = (lam * r2).exp();
    let down = (-lam * r2).exp();
    let ew = w.exp();
    let et = eta(lam, r2);
    let et_neg = eta(lam, -r2);
    let xy = dot(x, y);
    let px = dot(p2, x);
    let qy = dot(q2, y);
    let mut out = Vec::with_capacity(4 * n + 4);
    for i in 0..n {
        out.push(up * p[i] + p2[i] / ew + down * et * y[i]);
    }
    for i in 0..n {
        out.push(up * q[i] + ew * q2[i] - down * et * x[i]);
    }
    out.push(r + r2);
    out.push(s + s2 + down / ew * px - down * ew * qy - et_neg * xy);
    for i in 0..n {
        out.push(down * x[i] + ew * x2[i]);
    }
    for i in 0..n {
        out.push(down * y[i] + y2[i] / ew);
    }
    out.push(
        z + z2 + down / ew * dot(x, y2) + lam * down / ew * px + lam * down * ew * qy
            + lam * et_neg * xy,
    );
    out.push(w + w2);
    out
}

fn inverse(g: &Group, a: &[f64]) -> Result<Vec<f64>> {
    let n = g.n;
    let lam = g.lambda;
    Ok(match g.id {
        GroupId::H => {
            let (x, y, z) = (&a[..n], &a[n..2 * n], a[2 * n]);
            let mut out: Vec<f64> = x.iter().map(|v| -v).collect();
            out.extend(y.iter().map(|v| -v));
            out.push(-z + dot(x, y));
            out
        }
        GroupId::Htilde => {
            let (x, y, z, w) = (&a[..n], &a[n..2 * n], a[2 * n], a[2 * n + 1]);
            let ew = w.exp();
            let mut out: Vec<f64> = x.iter().map(|v| -v / ew).collect();
            out.extend(y.iter().map(|v| -v * ew));
            out.push(-z + dot(x, y));
            out.push(-w);
            out
        }
        GroupId::G | GroupId::Gtilde => {
            let e = (-lam * a[2 * n]).exp();
            let mut out: Vec<f64> = a[..2 * n].iter().map(|v| -e * v).collect();
            out.push(-a[2 * n]);
            if g.id == GroupId::Gtilde {
                out.push(-a[2 * n + 1]);
            }
            out
        }
        GroupId::Dtilde | GroupId::D => {
            // d = (g; 0)(0; h)  ⇒  d⁻¹ = (0; h⁻¹)(g⁻¹; 0)
            let (gid, hid, split) = if g.id == GroupId::Dtilde {
                (GroupId::Gtilde, GroupId::Htilde, 2 * n + 2)
            } else {
                (GroupId::G, GroupId::H, 2 * n + 1)
            };
            let gg = Group { id: gid, ..*g };
            let hg = Group { id: hid, ..*g };
            let ginv = inverse(&gg, &a[..split])?;
            let hinv = inverse(&hg, &a[split..])?;
            let mut left = vec![0.0; split];
            left.extend(hinv);
            let mut right = ginv;
            right.extend(vec![0.0; g.dim() - split]);
            law(g, &left, &right)
        }
        GroupId::E { r } => {
            let (x, y, t) = (&a[..n], &a[n..2 * n], a[2 * n]);
            let mut out: Vec<f64> = x.iter().map(|v| -v).collect();
            out.extend(y.iter().map(|v| -v));
            out.push((-t - eta(lam, r) * dot(x, y)).rem_euclid(1.0));
            out
        }
        GroupId::Etilde { r } => {
            let (x, y, w, t) = (&a[..n], &a[n..2 * n], a[2 * n], a[2 * n + 1]);
            let ew = w.exp();
            let mut out: Vec<f64> = x.iter().map(|v| -v / ew).collect();
            out.extend(y.iter().map(|v| -v * ew));
            out.push(-w);
            out.push((-t - eta(lam, r) * dot(x, y)).rem_euclid(1.0));
            out
        }
    })
}

/// Element of `𝔡̃ = 𝔤̃ ⋈ 𝔥̃` in coordinates `(p, q, r, s; x, y, z, w)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubleLieVector {
    pub n: usize,
    pub coords: Vec<f64>,
}

impl DoubleLieVector {
    pub fn new(n: usize, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != 4 * n + 4 {
            return Err(Error::DimensionMismatch {
                expected: 4 * n + 4,
                got: coords.len(),
            });
        }
        Ok(DoubleLieVector { n, coords })
    }

    pub fn zero(n: usize) -> Self {
        DoubleLieVector {
            n,
            coords: vec![0.0; 4 * n + 4],
        }
    }

    /// Embeds `(p, q, r, s)` from `𝔤̃`.
    pub fn from_g(n: usize, g: &[f64]) -> Result<Self> {
        let mut v = Self::zero(n);
        if g.len() != 2 * n + 2 {
            return Err(Error::DimensionMismatch {
                expected: 2 * n + 2,
                got: g.len(),
            });
        }
        v.coords[..2 * n + 2].copy_from_slice(g);
        Ok(v)
    }

    /// Embeds `(x, y, z, w)` from `𝔥̃`.
    pub fn from_h(n: usize, h: &[f64]) -> Result<Self> {
        let mut v = Self::zero(n);
        if h.len() != 2 * n + 2 {
            return Err(Error::DimensionMismatch {
                expected: 2 * n + 2,
                got: h.len(),
            });
        }
        v.coords[2 * n + 2..].copy_from_slice(h);
        Ok(v)
    }

    pub fn g_part(&self) -> &[f64] {
        &self.coords[..2 * self.n + 2]
    }

    pub fn h_part(&self) -> &[f64] {
        &self.coords[2 * self.n + 2..]
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn add(&self, o: &DoubleLieVector) -> DoubleLieVector {
        DoubleLieVector {
            n: self.n,
            coords: add(&self.coords, &o.coords),
        }
    }
}

/// Lie bracket of `𝔡̃` at deformation `λ`.  It coincides with the
/// commutator of the `D̃` law's second-order term, so Jacobi holds.
pub fn bracket(lambda: f64, a: &DoubleLieVector, b: &DoubleLieVector) -> Result<DoubleLieVector> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            got: b.n,
        });
    }
    let n = a.n;
    let o = 2 * n + 2;
    let c = &a.coords;
    let d = &b.coords;
    let (p, q, r) = (&c[..n], &c[n..2 * n], c[2 * n]);
    let (x, y, w) = (&c[o..o + n], &c[o + n..o + 2 * n], c[o + 2 * n + 1]);
    let (p2, q2, r2) = (&d[..n], &d[n..2 * n], d[2 * n]);
    let (x2, y2, w2) = (&d[o..o + n], &d[o + n..o + 2 * n], d[o + 2 * n + 1]);
    let mut out = Vec::with_capacity(4 * n + 4);
    for i in 0..n {
        out.push(lambda * (r2 * p[i] - r * p2[i]) + (w2 * p[i] - w * p2[i]) + (r2 * y[i] - r * y2[i]));
    }
    for i in 0..n {
        out.push(lambda * (r2 * q[i] - r * q2[i]) + (w * q2[i] - w2 * q[i]) + (r * x2[i] - r2 * x[i]));
    }
    out.push(0.0);
    out.push((dot(p2, x) - dot(p, x2)) + (dot(q, y2) - dot(q2, y)));
    for i in 0..n {
        out.push((w * x2[i] - w2 * x[i]) + lambda * (r * x2[i] - r2 * x[i]));
    }
    for i in 0..n {
        out.push((w2 * y[i] - w * y2[i]) + lambda * (r * y2[i] - r2 * y[i]));
    }
    out.push(
        dot(x, y2) - dot(x2, y)
            + lambda * (dot(p2, x) - dot(p, x2))
            + lambda * (dot(q2, y) - dot(q, y2)),
    );
    out.push(0.0);
    DoubleLieVector::new(n, out)
}

/// Bracket of `𝔤̃` read off from the `G̃` law: `[X, Y] = B(X,Y) − B(Y,X)` with
/// `B` the bilinear part of the multiplication.
pub fn g_bracket(lambda: f64, n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let (p, q, r) = (&a[..n], &a[n..2 * n], a[2 * n]);
    let (p2, q2, r2) = (&b[..n], &b[n..2 * n], b[2 * n]);
    let mut out = axpby(lambda * r2, p, -lambda * r, p2);
    out.extend(axpby(lambda * r2, q, -lambda * r, q2));
    out.push(0.0);
    out.push(0.0);
    out
}

/// Bracket of `𝔥̃` read off from the `H̃` law.
pub fn h_bracket(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let (x, y, w) = (&a[..n], &a[n..2 * n], a[2 * n + 1]);
    let (x2, y2, w2) = (&b[..n], &b[n..2 * n], b[2 * n + 1]);
    let mut out = axpby(w, x2, -w2, x);
    out.extend(axpby(w2, y, -w, y2));
    out.push(dot(x, y2) - dot(x2, y));
    out.push(0.0);
    out
}

/// Numerical bracket from a group law: `B(X,Y) − B(Y,X)` with `B` estimated
/// by a central second difference of `m(sX, tY)`.
pub fn bracket_from_law(g: &Group, a: &[f64], b: &[f64]) -> Vec<f64> {
    let eps = 1e-4;
    let scale = |v: &[f64], t: f64| v.iter().map(|c| c * t).collect::<Vec<_>>();
    let mixed = |u: &[f64], v: &[f64]| -> Vec<f64> {
        let pp = law(g, &scale(u, eps), &scale(v, eps));
        let pm = law(g, &scale(u, eps), &scale(v, -eps));
        let mp = law(g, &scale(u, -eps), &scale(v, eps));
        let mm = law(g, &scale(u, -eps), &scale(v, -eps));
        (0..pp.len())
            .map(|i| (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * eps * eps))
            .collect()
    };
    let bxy = mixed(a, b);
    let byx = mixed(b, a);
    bxy.iter().zip(&byx).map(|(u, v)| u - v).collect()
}

/// `‖[[a,b],c] + [[b,c],a] + [[c,a],b]‖ / (‖a‖‖b‖‖c‖)`.
pub fn jacobi_residual(
    lambda: f64,
    a: &DoubleLieVector,
    b: &DoubleLieVector,
    c: &DoubleLieVector,
) -> Result<f64> {
    let t1 = bracket(lambda, &bracket(lambda, a, b)?, c)?;
    let t2 = bracket(lambda, &bracket(lambda, b, c)?, a)?;
    let t3 = bracket(lambda, &bracket(lambda, c, a)?, b)?;
    let scale = a.norm() * b.norm() * c.norm();
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(t1.add(&t2).add(&t3).norm() / scale)
}
