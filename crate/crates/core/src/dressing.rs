//! Dressing actions between the dual pairs, factorization in the doubles and
//! orbit classification.
//!
//! Every action is a right action: `dress(γ₁γ₂, x) = dress(γ₂, dress(γ₁, x))`.
//! The closed forms agree with the definition through the double, which is
//! available as [`dress_via_double`].

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{law, Group, GroupElement, GroupId};
use crate::kernel::scalar::{dot, eta};

/// Ties below this magnitude are treated as zero when classifying.
pub const TIE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActionId {
    /// `H̃` acting on `G̃`.
    HtOnGt,
    /// `G̃` acting on `H̃`.
    GtOnHt,
    HOnG,
    GOnH,
}

impl ActionId {
    pub const ALL: [ActionId; 4] = [ActionId::HtOnGt, ActionId::GtOnHt, ActionId::HOnG, ActionId::GOnH];

    pub fn actor(&self) -> GroupId {
        match self {
            ActionId::HtOnGt => GroupId::Htilde,
            ActionId::GtOnHt => GroupId::Gtilde,
            ActionId::HOnG => GroupId::H,
            ActionId::GOnH => GroupId::G,
        }
    }

    pub fn space(&self) -> GroupId {
        match self {
            ActionId::HtOnGt => GroupId::Gtilde,
            ActionId::GtOnHt => GroupId::Htilde,
            ActionId::HOnG => GroupId::G,
            ActionId::GOnH => GroupId::H,
        }
    }

    /// The action whose orbits live in `space`.
    pub fn on(space: GroupId) -> Result<ActionId> {
        ActionId::ALL
            .into_iter()
            .find(|a| a.space() == space)
            .ok_or_else(|| Error::Parameter(format!("no dressing action on {space}")))
    }

    fn double(&self) -> GroupId {
        match self {
            ActionId::HtOnGt | ActionId::GtOnHt => GroupId::Dtilde,
            ActionId::HOnG | ActionId::GOnH => GroupId::D,
        }
    }

    fn tilde(&self) -> bool {
        matches!(self, ActionId::HtOnGt | ActionId::GtOnHt)
    }

    fn check(&self, actor: &GroupElement, point: &GroupElement) -> Result<(usize, f64)> {
        let (a, p) = (actor.group, point.group);
        if a.id != self.actor() {
            return Err(Error::WrongGroup {
                expected: self.actor().to_string(),
                got: a.to_string(),
            });
        }
        if p.id != self.space() {
            return Err(Error::WrongGroup {
                expected: self.space().to_string(),
                got: p.to_string(),
            });
        }
        if a.n != p.n || a.lambda != p.lambda {
            return Err(Error::GroupMismatch {
                left: a.to_string(),
                right: p.to_string(),
            });
        }
        Ok((p.n, p.lambda))
    }
}

/// Closed-form dressing action.
pub fn dress(action: ActionId, actor: &GroupElement, point: &GroupElement) -> Result<GroupElement> {
    let (n, lam) = action.check(actor, point)?;
    let a = &actor.coords;
    let b = &point.coords;
    let out = match action {
        ActionId::HtOnGt | ActionId::HOnG => {
            let (x, y) = (&a[..n], &a[n..2 * n]);
            let w = if action.tilde() { a[2 * n + 1] } else { 0.0 };
            let (p, q, r) = (&b[..n], &b[n..2 * n], b[2 * n]);
            let e = (-lam * r).exp();
            let et = eta(lam, r);
            let ew = w.exp();
            let mut out: Vec<f64> = (0..n).map(|i| ew * (p[i] - e * et * y[i])).collect();
            out.extend((0..n).map(|i| (q[i] + e * et * x[i]) / ew));
            out.push(r);
            if action.tilde() {
                out.push(b[2 * n + 1] - e * dot(p, x) + e * dot(q, y) + e * e * et * dot(x, y));
            }
            out
        }
        ActionId::GtOnHt | ActionId::GOnH => {
            let (p, q, r) = (&a[..n], &a[n..2 * n], a[2 * n]);
            let (x, y, z) = (&b[..n], &b[n..2 * n], b[2 * n]);
            let e = (-lam * r).exp();
            let et = eta(lam, r);
            let mut out: Vec<f64> = x.iter().map(|v| e * v).collect();
            out.extend(y.iter().map(|v| e * v));
            out.push(z + lam * e * (dot(p, x) + dot(q, y)) - lam * e * e * et * dot(x, y));
            if action.tilde() {
                out.push(b[2 * n + 1]);
            }
            out
        }
    };
    point.group.element(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactorOrder {
    /// `d = (g; e)(e; h)`.
    GH,
    /// `d = (e; h)(g; e)`.
    HG,
}

fn parts(double: &Group) -> Result<(Group, Group, usize)> {
    let n = double.n;
    let (g, h, split) = match double.id {
        GroupId::Dtilde => (GroupId::Gtilde, GroupId::Htilde, 2 * n + 2),
        GroupId::D => (GroupId::G, GroupId::H, 2 * n + 1),
        _ => {
            return Err(Error::WrongGroup {
                expected: "D or D~".into(),
                got: double.to_string(),
            })
        }
    };
    Ok((
        Group { id: g, ..*double },
        Group { id: h, ..*double },
        split,
    ))
}

fn join(double: &Group, g: &[f64], h: &[f64]) -> Vec<f64> {
    let _ = double;
    let mut v = g.to_vec();
    v.extend_from_slice(h);
    v
}

/// Splits an element of `D` or `D̃` into its `G`- and `H`-parts, returned in
/// product order: `(g, h)` for [`FactorOrder::GH`], `(h, g)` for `HG`.
pub fn factor(d: &GroupElement, order: FactorOrder) -> Result<(GroupElement, GroupElement)> {
    let dg = d.group;
    let (gg, hg, split) = parts(&dg)?;
    let c = &d.coords;
    match order {
        FactorOrder::GH => Ok((gg.element(c[..split].to_vec())?, hg.element(c[split..].to_vec())?)),
        FactorOrder::HG => {
            let n = dg.n;
            let lam = dg.lambda;
            let tilde = dg.id == GroupId::Dtilde;
            let hc = &c[split..];
            let r = c[2 * n];
            let w = if tilde { hc[2 * n + 1] } else { 0.0 };
            let up = (lam * r).exp();
            let e = 1.0 / up;
            let et = eta(lam, r);
            let x: Vec<f64> = hc[..n].iter().map(|v| up * v).collect();
            let y: Vec<f64> = hc[n..2 * n].iter().map(|v| up * v).collect();
            let mut gpart: Vec<f64> = (0..n).map(|i| w.exp() * (c[i] - e * et * y[i])).collect();
            gpart.extend((0..n).map(|i| (c[n + i] + e * et * x[i]) / w.exp()));
            gpart.push(r);
            let mut hpart = x;
            hpart.extend(y);
            hpart.push(0.0);
            if tilde {
                gpart.push(0.0);
                hpart.push(w);
            }
            // s and z enter additively; recover them from the remainder
            let trial = law(&dg, &join(&dg, &vec![0.0; split], &hpart), &join(&dg, &gpart, &vec![0.0; dg.dim() - split]));
            if tilde {
                gpart[2 * n + 1] = c[2 * n + 1] - trial[2 * n + 1];
            }
            hpart[2 * n] = hc[2 * n] - trial[split + 2 * n];
            let h = hg.element(hpart)?;
            let g = gg.element(gpart)?;
            let back = law(&dg, &join(&dg, &vec![0.0; split], &h.coords), &join(&dg, &g.coords, &vec![0.0; dg.dim() - split]));
            let scale = 1.0 + c.iter().map(|v| v.abs()).fold(0.0, f64::max);
            let res = back
                .iter()
                .zip(c)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
                / scale;
            if !(res <= 1e-10) {
                return Err(Error::FactorNotConverged(res));
            }
            Ok((h, g))
        }
    }
}

/// The dressing action computed from its definition through the double.
pub fn dress_via_double(action: ActionId, actor: &GroupElement, point: &GroupElement) -> Result<GroupElement> {
    let (n, lam) = action.check(actor, point)?;
    let dg = Group::new(action.double(), n, lam)?;
    let inv = actor.group.inverse(actor)?;
    let split = if action.tilde() { 2 * n + 2 } else { 2 * n + 1 };
    match action {
        ActionId::HtOnGt | ActionId::HOnG => {
            // (e; γ⁻¹)(g; e) = (g'; e)(e; h')
            let left = dg.element(join(&dg, &vec![0.0; split], &inv.coords))?;
            let right = dg.element(join(&dg, &point.coords, &vec![0.0; split]))?;
            let d = dg.multiply(&left, &right)?;
            Ok(factor(&d, FactorOrder::GH)?.0)
        }
        ActionId::GtOnHt | ActionId::GOnH => {
            // (γ⁻¹; e)(e; h) = (e; h')(g'; e)
            let d = dg.element(join(&dg, &inv.coords, &point.coords))?;
            Ok(factor(&d, FactorOrder::HG)?.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrbitFamily {
    /// `G̃` points with `r = 0`, `p = q = 0`; parameter `s`.
    GtPoint,
    /// `G̃` with `r = 0`, `(p, q) ≠ 0`; parameters `p̂, q̂, |p||q|`.
    GtPlane,
    /// `G̃` with `r ≠ 0`; parameters `r` and `s + p·q/η(r)`.
    GtLeaf,
    /// `G` with `r = 0`; parameters `p, q`.
    GPoint,
    /// `G` with `r ≠ 0`; parameter `r`.
    GLeaf,
    /// `H̃` with `x = y = 0`; parameters `z, w`.
    HtPoint,
    /// `H̃` with `(x, y) ≠ 0`; parameters the direction of `(x, y)` and `w`.
    HtRay,
    /// `H` with `x = y = 0`; parameter `z`.
    HPoint,
    /// `H` with `(x, y) ≠ 0`; parameter the direction of `(x, y)`.
    HRay,
}

impl OrbitFamily {
    pub fn label(&self) -> &'static str {
        match self {
            OrbitFamily::GtPoint => "Gt.point_s",
            OrbitFamily::GtPlane => "Gt.plane_pq",
            OrbitFamily::GtLeaf => "Gt.leaf_rs",
            OrbitFamily::GPoint => "G.point_pq",
            OrbitFamily::GLeaf => "G.leaf_r",
            OrbitFamily::HtPoint => "Ht.point_zw",
            OrbitFamily::HtRay => "Ht.ray_xyw",
            OrbitFamily::HPoint => "H.point_z",
            OrbitFamily::HRay => "H.ray_xy",
        }
    }

    pub fn families(space: GroupId) -> &'static [OrbitFamily] {
        match space {
            GroupId::Gtilde => &[OrbitFamily::GtPoint, OrbitFamily::GtPlane, OrbitFamily::GtLeaf],
            GroupId::G => &[OrbitFamily::GPoint, OrbitFamily::GLeaf],
            GroupId::Htilde => &[OrbitFamily::HtPoint, OrbitFamily::HtRay],
            GroupId::H => &[OrbitFamily::HPoint, OrbitFamily::HRay],
            _ => &[],
        }
    }

    /// Number of invariant parameters.
    pub fn param_count(&self, n: usize) -> usize {
        match self {
            OrbitFamily::GtPoint => 1,
            OrbitFamily::GtPlane => 2 * n + 1,
            OrbitFamily::GtLeaf => 2,
            OrbitFamily::GPoint => 2 * n,
            OrbitFamily::GLeaf => 1,
            OrbitFamily::HtPoint => 2,
            OrbitFamily::HtRay => 2 * n + 1,
            OrbitFamily::HPoint => 1,
            OrbitFamily::HRay => 2 * n,
        }
    }

    /// Orbit dimension for `λ ≠ 0`.
    pub fn dimension(&self, n: usize) -> usize {
        match self {
            OrbitFamily::GtLeaf | OrbitFamily::GLeaf => 2 * n,
            OrbitFamily::GtPlane | OrbitFamily::HtRay | OrbitFamily::HRay => 2,
            _ => 0,
        }
    }
}

/// Orbit family plus the values of its invariants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitDescriptor {
    pub space: GroupId,
    pub family: OrbitFamily,
    pub params: Vec<f64>,
}

impl OrbitDescriptor {
    /// Max relative parameter difference, `None` across families.
    pub fn distance(&self, other: &OrbitDescriptor) -> Option<f64> {
        if self.family != other.family || self.params.len() != other.params.len() {
            return None;
        }
        Some(
            self.params
                .iter()
                .zip(&other.params)
                .map(|(a, b)| (a - b).abs() / (1.0 + a.abs().max(b.abs())))
                .fold(0.0, f64::max),
        )
    }
}

fn unit(v: &[f64]) -> Vec<f64> {
    let nrm = dot(v, v).sqrt();
    if nrm <= TIE {
        vec![0.0; v.len()]
    } else {
        v.iter().map(|c| c / nrm).collect()
    }
}

/// Classifies `point` into its orbit family for the dressing action on its
/// group.
pub fn classify_orbit(point: &GroupElement) -> Result<OrbitDescriptor> {
    let g = point.group;
    let n = g.n;
    let c = &point.coords;
    let (family, params) = match g.id {
        GroupId::Gtilde | GroupId::G => {
            let (p, q, r) = (&c[..n], &c[n..2 * n], c[2 * n]);
            if r.abs() > TIE {
                if g.id == GroupId::Gtilde {
                    let s = c[2 * n + 1];
                    (OrbitFamily::GtLeaf, vec![r, s + dot(p, q) / eta(g.lambda, r)])
                } else {
                    (OrbitFamily::GLeaf, vec![r])
                }
            } else if g.id == GroupId::G {
                (OrbitFamily::GPoint, c[..2 * n].to_vec())
            } else {
                let (pn, qn) = (dot(p, p).sqrt(), dot(q, q).sqrt());
                if pn.max(qn) <= TIE {
                    (OrbitFamily::GtPoint, vec![c[2 * n + 1]])
                } else {
                    let mut v = unit(p);
                    v.extend(unit(q));
                    v.push(pn * qn);
                    (OrbitFamily::GtPlane, v)
                }
            }
        }
        GroupId::Htilde | GroupId::H => {
            let xy = &c[..2 * n];
            let nrm = dot(xy, xy).sqrt();
            let tilde = g.id == GroupId::Htilde;
            if nrm <= TIE {
                if tilde {
                    (OrbitFamily::HtPoint, vec![c[2 * n], c[2 * n + 1]])
                } else {
                    (OrbitFamily::HPoint, vec![c[2 * n]])
                }
            } else {
                let mut v = unit(xy);
                if tilde {
                    v.push(c[2 * n + 1]);
                    (OrbitFamily::HtRay, v)
                } else {
                    (OrbitFamily::HRay, v)
                }
            }
        }
        _ => {
            return Err(Error::WrongGroup {
                expected: "G, G~, H or H~".into(),
                got: g.to_string(),
            })
        }
    };
    Ok(OrbitDescriptor {
        space: g.id,
        family,
        params,
    })
}

/// Numerical rank of the orbit map `γ ↦ dress(γ, point)` at the identity.
pub fn orbit_tangent_rank(point: &GroupElement) -> Result<usize> {
    let action = ActionId::on(point.group.id)?;
    let actor = Group {
        id: action.actor(),
        ..point.group
    };
    let da = actor.dim();
    let dp = point.group.dim();
    let eps = 1e-5;
    let mut jac = vec![vec![0.0; da]; dp];
    for j in 0..da {
        let mut plus = vec![0.0; da];
        plus[j] = eps;
        let mut minus = vec![0.0; da];
        minus[j] = -eps;
        let fp = dress(action, &actor.element(plus)?, point)?;
        let fm = dress(action, &actor.element(minus)?, point)?;
        for i in 0..dp {
            jac[i][j] = (fp.coords[i] - fm.coords[i]) / (2.0 * eps);
        }
    }
    Ok(rank(jac))
}

fn rank(mut m: Vec<Vec<f64>>) -> usize {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let big = m.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
    if big == 0.0 {
        return 0;
    }
    let tol = 1e-6 * big;
    let mut rank = 0;
    for c in 0..cols {
        let piv = (rank..rows).max_by(|&a, &b| m[a][c].abs().partial_cmp(&m[b][c].abs()).unwrap());
        let Some(p) = piv else { break };
        if m[p][c].abs() <= tol {
            continue;
        }
        m.swap(rank, p);
        for r in 0..rows {
            if r != rank {
                let f = m[r][c] / m[rank][c];
                for k in c..cols {
                    m[r][k] -= f * m[rank][k];
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Random point of `space` lying in `family`.
pub fn sample_point<R: Rng>(group: &Group, family: OrbitFamily, rng: &mut R) -> Result<GroupElement> {
    if !OrbitFamily::families(group.id).contains(&family) {
        return Err(Error::Parameter(format!("{} is not an orbit family of {}", family.label(), group.id)));
    }
    let n = group.n;
    let mut v: Vec<f64> = (0..group.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let nonzero = |rng: &mut R| {
        let m: f64 = rng.gen_range(0.2..1.0);
        if rng.gen_bool(0.5) {
            m
        } else {
            -m
        }
    };
    match family {
        OrbitFamily::GtPoint => {
            v[..2 * n + 1].iter_mut().for_each(|c| *c = 0.0);
        }
        OrbitFamily::GtPlane | OrbitFamily::GPoint => {
            v[2 * n] = 0.0;
            if family == OrbitFamily::GtPlane && rng.gen_bool(0.25) {
                // one of p, q may vanish
                let off = if rng.gen_bool(0.5) { 0 } else { n };
                v[off..off + n].iter_mut().for_each(|c| *c = 0.0);
            }
        }
        OrbitFamily::GtLeaf | OrbitFamily::GLeaf => v[2 * n] = nonzero(rng),
        OrbitFamily::HtPoint | OrbitFamily::HPoint => {
            v[..2 * n].iter_mut().for_each(|c| *c = 0.0);
        }
        OrbitFamily::HtRay | OrbitFamily::HRay => v[0] = nonzero(rng),
    }
    group.element(v)
}

/// Random actor element of moderate size for dressing `space`.
pub fn sample_actor<R: Rng>(group: &Group, space: GroupId, rng: &mut R) -> Result<GroupElement> {
    let action = ActionId::on(space)?;
    let actor = Group {
        id: action.actor(),
        ..*group
    };
    actor.element((0..actor.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use proptest::prelude::*;

    fn grp(id: GroupId, n: usize, lam: f64) -> Group {
        Group::new(id, n, lam).unwrap()
    }

    #[test]
    fn identity_acts_trivially() {
        for action in ActionId::ALL {
            let g = grp(action.space(), 1, 1.0);
            let a = grp(action.actor(), 1, 1.0);
            let x = g.element((0..g.dim()).map(|i| 0.3 * i as f64 - 0.4).collect()).unwrap();
            assert_eq!(dress(action, &a.identity(), &x).unwrap(), x);
        }
    }

    #[test]
    fn wrong_groups_rejected() {
        let g = grp(GroupId::Gtilde, 1, 1.0);
        let h = grp(GroupId::H, 1, 1.0);
        assert!(matches!(
            dress(ActionId::HtOnGt, &h.identity(), &g.identity()),
            Err(Error::WrongGroup { .. })
        ));
        let other = grp(GroupId::Htilde, 1, 0.5);
        assert!(matches!(
            dress(ActionId::HtOnGt, &other.identity(), &g.identity()),
            Err(Error::GroupMismatch { .. })
        ));
    }

    #[test]
    fn factor_roundtrip() {
        for id in [GroupId::Dtilde, GroupId::D] {
            let dg = grp(id, 2, 0.7);
            let d = dg.element((0..dg.dim()).map(|i| (0.7 * i as f64).sin()).collect()).unwrap();
            for order in [FactorOrder::GH, FactorOrder::HG] {
                let (a, b) = factor(&d, order).unwrap();
                let split = a.coords.len();
                let (left, right) = if order == FactorOrder::GH {
                    (join(&dg, &a.coords, &vec![0.0; dg.dim() - split]), join(&dg, &vec![0.0; split], &b.coords))
                } else {
                    (join(&dg, &vec![0.0; split], &a.coords), join(&dg, &b.coords, &vec![0.0; dg.dim() - split]))
                };
                let back = law(&dg, &left, &right);
                for (u, v) in back.iter().zip(&d.coords) {
                    assert!((u - v).abs() < 1e-12);
                }
            }
        }
        assert!(factor(&grp(GroupId::H, 1, 1.0).identity(), FactorOrder::GH).is_err());
    }

    #[test]
    fn classification_examples() {
        let g = grp(GroupId::Gtilde, 1, 1.0);
        let d = classify_orbit(&g.element(vec![0.0, 0.0, 0.0, 2.5]).unwrap()).unwrap();
        assert_eq!(d.family, OrbitFamily::GtPoint);
        assert_eq!(d.params, vec![2.5]);
        let d = classify_orbit(&g.element(vec![1.0, 2.0, 0.0, 0.0]).unwrap()).unwrap();
        assert_eq!(d.family, OrbitFamily::GtPlane);
        let d = classify_orbit(&g.element(vec![1.0, 2.0, 0.5, 0.0]).unwrap()).unwrap();
        assert_eq!(d.family, OrbitFamily::GtLeaf);
        let h = grp(GroupId::H, 1, 1.0);
        assert_eq!(
            classify_orbit(&h.element(vec![0.0, 0.0, 3.0]).unwrap()).unwrap().family,
            OrbitFamily::HPoint
        );
        assert!(classify_orbit(&grp(GroupId::D, 1, 1.0).identity()).is_err());
    }

    #[test]
    fn tangent_ranks_match_orbit_dimensions() {
        let mut rng = stream(7, "rank");
        for n in [1, 2] {
            for space in [GroupId::Gtilde, GroupId::G, GroupId::Htilde, GroupId::H] {
                let g = grp(space, n, 0.8);
                for &fam in OrbitFamily::families(space) {
                    for _ in 0..3 {
                        let x = sample_point(&g, fam, &mut rng).unwrap();
                        assert_eq!(classify_orbit(&x).unwrap().family, fam);
                        assert_eq!(orbit_tangent_rank(&x).unwrap(), fam.dimension(n), "{fam:?} n={n} at {x:?}");
                    }
                }
            }
        }
    }

    fn small(dim: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-1.0f64..1.0, dim)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn closed_form_matches_double(which in 0usize..4, n in 1usize..3, lam in -1.5f64..1.5, v in small(32)) {
            let action = ActionId::ALL[which];
            let g = grp(action.space(), n, lam);
            let a = grp(action.actor(), n, lam);
            let x = g.element(v[..g.dim()].to_vec()).unwrap();
            let gamma = a.element(v[16..16 + a.dim()].to_vec()).unwrap();
            let lhs = dress(action, &gamma, &x).unwrap();
            let rhs = dress_via_double(action, &gamma, &x).unwrap();
            prop_assert!(g.distance(&lhs, &rhs).unwrap() < 1e-9);
        }

        #[test]
        fn right_action_law(which in 0usize..4, n in 1usize..3, lam in -1.5f64..1.5, v in small(48)) {
            let action = ActionId::ALL[which];
            let g = grp(action.space(), n, lam);
            let a = grp(action.actor(), n, lam);
            let x = g.element(v[..g.dim()].to_vec()).unwrap();
            let g1 = a.element(v[16..16 + a.dim()].to_vec()).unwrap();
            let g2 = a.element(v[32..32 + a.dim()].to_vec()).unwrap();
            let lhs = dress(action, &a.multiply(&g1, &g2).unwrap(), &x).unwrap();
            let rhs = dress(action, &g2, &dress(action, &g1, &x).unwrap()).unwrap();
            let scale = 1.0 + lhs.coords.iter().map(|c| c.abs()).fold(0.0, f64::max);
            prop_assert!(g.distance(&lhs, &rhs).unwrap() < 1e-9 * scale);
        }

        #[test]
        fn orbit_invariants_preserved(which in 0usize..4, n in 1usize..3, lam in -1.5f64..1.5, fam in 0usize..3, seed in 0u64..1000) {
            let action = ActionId::ALL[which];
            let g = grp(action.space(), n, lam);
            let fams = OrbitFamily::families(action.space());
            let family = fams[fam % fams.len()];
            let mut rng = stream(seed, "orbit");
            let x = sample_point(&g, family, &mut rng).unwrap();
            let gamma = sample_actor(&g, action.space(), &mut rng).unwrap();
            let y = dress(action, &gamma, &x).unwrap();
            let before = classify_orbit(&x).unwrap();
            let after = classify_orbit(&y).unwrap();
            let d = before.distance(&after);
            prop_assert!(d.is_some(), "{before:?} vs {after:?}");
            prop_assert!(d.unwrap() < 1e-8, "{before:?} vs {after:?}");
        }
    }
}
