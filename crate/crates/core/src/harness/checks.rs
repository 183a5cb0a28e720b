//! The per-suite checks.  Each suite draws from its own seeded streams, so
//! the suites can be run in any combination with identical results.

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Check, RunConfig, Suite, DEFAULT_TOL_ANALYTIC, DEFAULT_TOL_GRID};
use crate::algebra::{Shape, TestFunction, TwistedAlgebra, Variant};
use crate::braiding::{
    braid_composition, braid_grid, inner_tensor, intertwiner, r_matrix_quadrature_residual, tensor_kernel_grid,
    IntertwinerKind,
};
use crate::dressing::{
    classify_orbit, dress, dress_via_double, orbit_tangent_rank, sample_actor, sample_point, ActionId, OrbitFamily,
};
use crate::error::Result;
use crate::groups::{
    bracket, bracket_from_law, g_bracket, h_bracket, jacobi_residual, DoubleLieVector, Group, GroupElement, GroupId,
};
use crate::kernel::grid::{GridSpec, GridVector};
use crate::kernel::operator::{operator_residual, BatteryShape, LinearOperator, TestBattery};
use crate::representations::{
    apply_coset, apply_q, embed_e, integrated_form, pair_samples, restrict, validate_representing_pair, Assembly,
    IntegratedForm, QValue, Rep, RepId, RepresentingPair, Restriction,
};
use crate::rng::stream;

type C = Complex64;

/// Distance to the identity of the double braid on the unit Gaussian at
/// `(λ, r, r') = (1, ½, ½)`, from a high-precision evaluation of the
/// Gaussian overlap.
pub const FROZEN_BRAID_DISTANCE: f64 = 0.984316908565311776;

const TRIPLES: usize = 10_000;
const LIE_TRIPLES: usize = 1_000;
const DRESS_SAMPLES: usize = 1_000;

pub(super) fn run(suite: Suite, cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut c = Checks { cfg, out: Vec::new() };
    match suite {
        Suite::Groups => c.groups(),
        Suite::Dressing => c.dressing(),
        Suite::Algebra => c.algebra(),
        Suite::Representations => c.representations()?,
        Suite::Braiding => c.braiding()?,
    }
    Ok(c.out)
}

struct Checks<'a> {
    cfg: &'a RunConfig,
    out: Vec<Check>,
}

impl Checks<'_> {
    fn rng(&self, label: &str) -> ChaCha8Rng {
        stream(self.cfg.seed, label)
    }

    /// Records a closed-form check; a computation error counts as failure.
    fn exact(&mut self, name: &str, anchor: &str, res: Result<f64>, tol: f64) {
        let tol = tol * self.cfg.tol_analytic / DEFAULT_TOL_ANALYTIC;
        self.out.push(Check::new(name, anchor, res.unwrap_or(f64::NAN), tol));
    }

    /// Records a grid or quadrature check.
    fn grid(&mut self, name: &str, anchor: &str, res: Result<f64>, tol: f64) {
        let tol = tol * self.cfg.tol_grid / DEFAULT_TOL_GRID;
        self.out.push(Check::new(name, anchor, res.unwrap_or(f64::NAN), tol));
    }

    fn line(&self) -> Result<GridSpec> {
        GridSpec::new(1, self.cfg.grid_n, self.cfg.grid_l)
    }

    // ---- groups and Lie algebras ----

    fn groups(&mut self) {
        let (n, lam) = (self.cfg.n, self.cfg.lambda);
        let ids = [
            GroupId::H,
            GroupId::Htilde,
            GroupId::G,
            GroupId::Gtilde,
            GroupId::D,
            GroupId::Dtilde,
            GroupId::E { r: 0.5 },
            GroupId::Etilde { r: -0.5 },
        ];
        for id in ids {
            let mut rng = self.rng(&format!("groups.{id}"));
            let res = Group::new(id, n, lam).and_then(|g| axioms(&g, &mut rng));
            let (a, u, i) = match res {
                Ok(v) => (Ok(v.0), Ok(v.1), Ok(v.2)),
                Err(e) => (Err(e.clone()), Err(e.clone()), Err(e)),
            };
            self.exact(&format!("groups.{id}.associativity"), "group law", a, 1e-9);
            self.exact(&format!("groups.{id}.identity"), "group law", u, 1e-9);
            self.exact(&format!("groups.{id}.inverse"), "group law", i, 1e-9);
        }
        for id in [GroupId::E { r: 0.5 }, GroupId::Etilde { r: -0.5 }] {
            let mut rng = self.rng(&format!("groups.center.{id}"));
            let res = Group::new(id, n, lam).and_then(|g| center(&g, &mut rng));
            self.exact(&format!("groups.{id}.circle_is_central"), "central extension", res, 1e-12);
        }
        let mut rng = self.rng("groups.double");
        let res = Group::new(GroupId::Dtilde, n, lam).and_then(|dt| double_embeddings(&dt, &mut rng));
        self.exact("groups.double.subgroup_embeddings", "double group", res, 1e-12);

        let mut rng = self.rng("lie.brackets");
        let (anti, jac) = match lie_axioms(n, lam, &mut rng) {
            Ok((a, j)) => (Ok(a), Ok(j)),
            Err(e) => (Err(e.clone()), Err(e)),
        };
        self.exact("lie.double.antisymmetry", "double Lie algebra", anti, 1e-9);
        self.exact("lie.double.jacobi", "double Lie algebra", jac, 1e-9);
        let mut rng = self.rng("lie.sub");
        let res = lie_subalgebras(n, lam, &mut rng);
        self.exact("lie.double.subalgebra_restriction", "double Lie algebra", res, 1e-12);
        let mut rng = self.rng("lie.law");
        let res = lie_from_law(n, lam, &mut rng);
        self.grid("lie.bracket_from_group_law", "double Lie algebra", res, 1e-5);
    }

    // ---- dressing ----

    fn dressing(&mut self) {
        let (n, lam) = (self.cfg.n, self.cfg.lambda);
        for action in ActionId::ALL {
            let tag = format!("{action:?}");
            let mut rng = self.rng(&format!("dressing.{tag}"));
            let res = dressing_laws(action, n, lam, &mut rng);
            let (r, o) = match res {
                Ok(v) => (Ok(v.0), Ok(v.1)),
                Err(e) => (Err(e.clone()), Err(e)),
            };
            self.exact(&format!("dressing.{tag}.right_action"), "dressing action", r, 1e-8);
            self.exact(&format!("dressing.{tag}.double_factorization"), "dressing action", o, 1e-8);
        }
        for space in [GroupId::Gtilde, GroupId::G, GroupId::Htilde, GroupId::H] {
            let mut rng = self.rng(&format!("dressing.orbits.{space}"));
            let res = orbit_invariance(space, n, lam, &mut rng);
            self.exact(&format!("dressing.orbits.{space}.invariance"), "dressing orbits", res, 1e-8);
            if lam != 0.0 {
                let mut rng = self.rng(&format!("dressing.rank.{space}"));
                let res = orbit_dimensions(space, n, lam, &mut rng);
                self.exact(&format!("dressing.orbits.{space}.dimension"), "dressing orbits", res, 0.0);
            }
        }
        let mut rng = self.rng("dressing.flat");
        let res = flat_h_on_g(n, &mut rng);
        self.exact("dressing.HOnG.flat_limit", "coadjoint limit", res, 1e-12);
    }

    // ---- cocycles ----

    fn algebra(&mut self) {
        let (n, lam) = (self.cfg.n, self.cfg.lambda);
        for v in [Variant::A, Variant::Atilde] {
            let tag = format!("{v:?}");
            let mut rng = self.rng(&format!("algebra.{tag}"));
            let res = TwistedAlgebra::new(v, n, lam).and_then(|a| cocycles(&a, v.fiber_dim(n), &mut rng));
            let (c, z, flat) = match res {
                Ok(v) => (Ok(v.0), Ok(v.1), Ok(v.2)),
                Err(e) => (Err(e.clone()), Err(e.clone()), Err(e)),
            };
            self.exact(&format!("algebra.{tag}.cocycle_identity"), "twisting cocycle", c, 1e-12);
            self.exact(&format!("algebra.{tag}.normalization"), "twisting cocycle", z, 1e-12);
            self.exact(&format!("algebra.{tag}.sigma_zero_is_one"), "twisting cocycle", flat, 0.0);
        }
    }

    // ---- representations ----

    /// Grids and batteries come from a validated config, so failing to build
    /// them is an error of the run rather than a failed check.
    fn representations(&mut self) -> Result<()> {
        let (n, lam) = (self.cfg.n, self.cfg.lambda);
        let spec = GridSpec::new(n, self.cfg.grid_n, self.cfg.grid_l)?;
        let line = self.line()?;
        let battery = TestBattery::gaussians(spec, 1, 4, BatteryShape::default(), &mut self.rng("reps.battery"))?;
        for r in [-1.0, 0.3, 1.0] {
            let res = projective(RepId::R { r }, n, lam, spec, Some(&battery), &mut self.rng(&format!("reps.q_r.{r}")));
            self.grid(&format!("reps.Q_r(r={r}).projective"), "projective representation", res, 1e-8);
            let res = projective(
                RepId::TildeRs { r, s: 0.7 },
                n,
                lam,
                spec,
                Some(&battery),
                &mut self.rng(&format!("reps.q_rs.{r}")),
            );
            self.grid(&format!("reps.Qt_rs(r={r},s=0.7).projective"), "projective representation, dilation path", res, 1e-6);
            let res = restriction_to_e(r, n, lam, spec, Some(&battery), &mut self.rng(&format!("reps.restrict.{r}")));
            self.exact(&format!("reps.Qt_rs(r={r}).restricts_to_Q_r"), "restriction to E", res, 1e-12);
        }
        let pq = (vec![0.3; n], vec![-0.2; n]);
        let line_battery = TestBattery::gaussians(line, 1, 4, BatteryShape::default(), &mut self.rng("reps.line"))?;
        let scalars = [
            (RepId::Pq { p: pq.0.clone(), q: pq.1.clone() }, "Q_pq"),
            (RepId::TildeS { s: 1.3 }, "Qt_s"),
            (RepId::TildePq { p: pq.0.clone(), q: pq.1.clone() }, "Qt_pq"),
        ];
        for (id, tag) in scalars {
            let res = projective(id, n, lam, line, Some(&line_battery), &mut self.rng(&format!("reps.{tag}")));
            self.grid(&format!("reps.{tag}.projective"), "projective representation", res, 1e-8);
        }

        let (hom, star) = match pi_r_hom(lam, line, &mut self.rng("reps.pi_r")) {
            Ok((a, b)) => (Ok(a), Ok(b)),
            Err(e) => (Err(e.clone()), Err(e)),
        };
        self.grid("reps.pi_r.homomorphism", "integrated form", hom, 1e-6);
        self.grid("reps.pi_r.star", "integrated form", star, 1e-6);
        let res = pi_tilde_rs_hom(lam, line, &mut self.rng("reps.pi_rs"));
        self.grid("reps.pit_rs.homomorphism", "integrated form", res, 1e-5);
        let res = direct_integral_fibers(lam, &mut self.rng("reps.fibers"));
        self.grid("reps.pit_pq.direct_integral_fibers", "direct integral over w", res, 1e-5);

        let (agree, fast) = match fft_vs_naive(lam, line, &mut self.rng("reps.fft")) {
            Ok((a, s)) => (Ok(a), Ok(if s >= 10.0 { 0.0 } else { 1.0 })),
            Err(e) => (Err(e.clone()), Err(e)),
        };
        self.grid("reps.pi_r.fft_matches_naive", "integrated form", agree, 1e-6);
        // indicator rather than the timing itself, so reports stay reproducible
        self.out.push(Check::new("reps.pi_r.fft_speedup_at_least_10x", "integrated form", fast.unwrap_or(f64::NAN), 0.0));
        Ok(())
    }

    // ---- tensor products and braiding ----

    fn braiding(&mut self) -> Result<()> {
        let lam = self.cfg.lambda;
        let line = self.line()?;
        let lb = TestBattery::gaussians(line, 1, 4, BatteryShape::default(), &mut self.rng("braid.line"))?;
        let fine = tensor_kernel_grid();
        let tb = TestBattery::gaussians(fine, 2, 2, BatteryShape::default(), &mut self.rng("braid.tensor"))?;

        let res = characters_add(lam, line, &mut self.rng("braid.pq"));
        self.grid("tensor.pi_pq_x_pi_pq.adds_parameters", "inner tensor product", res, 1e-8);
        let res = character_shift(lam, line, &lb, &mut self.rng("braid.pq_r"));
        self.grid("tensor.pi_pq_x_pi_r.moves_across", "inner tensor product", res, 1e-6);
        let res = tensor_multiplicative(lam, &tb, &mut self.rng("braid.mult"));
        self.grid("tensor.pi_r_x_pi_r.multiplicative", "inner tensor product", res, 1e-5);

        let (p, q, r) = (0.4, 0.5, 0.5);
        let mut unitary: Vec<Result<f64>> = Vec::new();
        let res = s_type(lam, p, q, r, line, &lb, &mut self.rng("braid.s"));
        for (k, tag) in ["S", "S_inverse", "T_pq"].iter().enumerate() {
            let v = res.as_ref().map(|v| v[k]).map_err(Clone::clone);
            self.grid(&format!("braid.{tag}.intertwines"), "intertwiner", v, 1e-6);
        }
        let v = res.as_ref().map(|v| v[3]).map_err(Clone::clone);
        self.grid("braid.T_pq.closed_form", "intertwiner", v, 1e-6);
        for kind in [
            IntertwinerKind::S { p, q, r },
            IntertwinerKind::SInv { p, q, r },
            IntertwinerKind::Tpq { p, q, r },
        ] {
            unitary.push(intertwiner(kind, lam).and_then(|t| unitarity(&t, &lb)));
        }

        let (r, r2) = (0.5, 0.3);
        let (t, fr) = match braid_intertwines(lam, r, r2, &tb, &mut self.rng("braid.trr")) {
            Ok(v) => (Ok(v.0), Ok(v.1)),
            Err(e) => (Err(e.clone()), Err(e)),
        };
        self.grid("braid.T_rr.intertwines", "braiding intertwiner", t, 1e-6);
        self.grid("braid.fromR.intertwines", "R-matrix", fr, 1e-6);
        let res = (|| {
            let t = intertwiner(IntertwinerKind::Trr { r, r2 }, lam)?;
            let fr = intertwiner(IntertwinerKind::FromR { r, r2 }, lam)?;
            unitary.push(unitarity(&t, &tb));
            unitary.push(unitarity(&fr, &tb));
            operator_residual(&t, &fr, &tb)
        })();
        self.grid("braid.fromR.equals_T_rr", "R-matrix", res, 1e-6);
        let worst = unitary.into_iter().try_fold(0.0f64, |acc, v| v.map(|x| acc.max(x)));
        self.grid("braid.intertwiners.unitary", "intertwiner", worst, 1e-6);
        let pts = [(0.3, -0.4), (0.7, 0.5), (-0.9, 0.35), (1.1, -0.8)];
        let res = r_matrix_quadrature_residual(lam, r, r2, &pts);
        self.grid("braid.R.closed_form_matches_quadrature", "R-matrix", res, 1e-5);

        // the theorem is stated at fixed parameters, independent of the run λ
        match braid_composition(1.0, 0.5, 0.5, braid_grid(), None) {
            Ok(b) => {
                let anchor = "double braid";
                self.grid("braid.composition.closed_form", anchor, Ok(b.composition_residual), 1e-6);
                self.grid("braid.composition.nonidentity", anchor, Ok(1e-2 / b.distance_to_identity), 1.0);
                self.grid(
                    "braid.composition.distance_matches_oracle",
                    anchor,
                    Ok((b.distance_to_identity - b.analytic_distance).abs()),
                    1e-6,
                );
                self.exact(
                    "braid.composition.oracle_matches_frozen",
                    anchor,
                    Ok((b.analytic_distance - FROZEN_BRAID_DISTANCE).abs()),
                    1e-12,
                );
            }
            Err(e) => {
                for tag in [
                    "braid.composition.closed_form",
                    "braid.composition.nonidentity",
                    "braid.composition.distance_matches_oracle",
                    "braid.composition.oracle_matches_frozen",
                ] {
                    self.grid(tag, "double braid", Err(e.clone()), 1e-6);
                }
            }
        }
        for (l, r, r2, tag) in [(0.0, 0.5, 0.5, "lambda_zero"), (1.0, 0.0, 0.0, "r_zero")] {
            let res = braid_composition(l, r, r2, braid_grid(), None).map(|b| b.distance_to_identity);
            self.grid(&format!("braid.composition.identity_at_{tag}"), "double braid, cocommutative limit", res, 1e-8);
        }
        Ok(())
    }
}

fn coords<R: Rng>(dim: usize, range: f64, rng: &mut R) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-range..range)).collect()
}

fn scale(v: &GroupElement) -> f64 {
    1.0 + v.coords.iter().map(|c| c.abs()).fold(0.0, f64::max)
}

/// Worst scaled associativity, identity and inverse defects.
fn axioms<R: Rng>(g: &Group, rng: &mut R) -> Result<(f64, f64, f64)> {
    let d = g.dim();
    let e = g.identity();
    let (mut assoc, mut unit, mut inv) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..TRIPLES {
        let a = g.element(coords(d, 1.5, rng))?;
        let b = g.element(coords(d, 1.5, rng))?;
        let c = g.element(coords(d, 1.5, rng))?;
        let lhs = g.multiply(&g.multiply(&a, &b)?, &c)?;
        let rhs = g.multiply(&a, &g.multiply(&b, &c)?)?;
        assoc = assoc.max(g.distance(&lhs, &rhs)? / scale(&lhs));
        let s = scale(&a);
        unit = unit.max(g.distance(&g.multiply(&a, &e)?, &a)? / s);
        unit = unit.max(g.distance(&g.multiply(&e, &a)?, &a)? / s);
        let ai = g.inverse(&a)?;
        let s = s.max(scale(&ai));
        inv = inv.max(g.distance(&g.multiply(&a, &ai)?, &e)? / s);
        inv = inv.max(g.distance(&g.multiply(&ai, &a)?, &e)? / s);
    }
    Ok((assoc, unit, inv))
}

fn center<R: Rng>(g: &Group, rng: &mut R) -> Result<f64> {
    let d = g.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let a = g.element(coords(d, 1.5, rng))?;
        let mut cc = vec![0.0; d];
        cc[d - 1] = rng.gen_range(0.0..1.0);
        let c = g.element(cc)?;
        worst = worst.max(g.distance(&g.multiply(&a, &c)?, &g.multiply(&c, &a)?)?);
    }
    Ok(worst)
}

/// `G̃` and `H̃` embed as subgroups of `D̃`; `D` is the `s`-quotient of the
/// `w = 0` slice.
fn double_embeddings<R: Rng>(dt: &Group, rng: &mut R) -> Result<f64> {
    let n = dt.n;
    let half = 2 * n + 2;
    let gt = Group { id: GroupId::Gtilde, ..*dt };
    let ht = Group { id: GroupId::Htilde, ..*dt };
    let d = Group { id: GroupId::D, ..*dt };
    let mut worst: f64 = 0.0;
    let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    for _ in 0..1000 {
        let (a, b) = (coords(half, 1.5, rng), coords(half, 1.5, rng));
        let zero = vec![0.0; half];
        let big = dt.multiply(&dt.element([&a[..], &zero].concat())?, &dt.element([&b[..], &zero].concat())?)?;
        let small = gt.multiply(&gt.element(a.clone())?, &gt.element(b.clone())?)?;
        worst = worst.max(diff(&big.coords, &[&small.coords[..], &zero].concat()) / scale(&big));
        let big = dt.multiply(&dt.element([&zero[..], &a].concat())?, &dt.element([&zero[..], &b].concat())?)?;
        let small = ht.multiply(&ht.element(a.clone())?, &ht.element(b.clone())?)?;
        worst = worst.max(diff(&big.coords, &[&zero[..], &small.coords].concat()) / scale(&big));

        let (u, v) = (coords(4 * n + 2, 1.5, rng), coords(4 * n + 2, 1.5, rng));
        let lift = |x: &[f64]| [&x[..2 * n + 1], &[0.0], &x[2 * n + 1..], &[0.0]].concat();
        let big = dt.multiply(&dt.element(lift(&u))?, &dt.element(lift(&v))?)?;
        let small = d.multiply(&d.element(u)?, &d.element(v)?)?;
        let c = &big.coords;
        let drop = [&c[..2 * n + 1], &c[half..half + 2 * n + 1]].concat();
        worst = worst.max((diff(&drop, &small.coords) + c[4 * n + 3].abs()) / scale(&big));
    }
    Ok(worst)
}

fn lie_axioms<R: Rng>(n: usize, lam: f64, rng: &mut R) -> Result<(f64, f64)> {
    let d = 4 * n + 4;
    let (mut anti, mut jac) = (0.0f64, 0.0f64);
    for _ in 0..LIE_TRIPLES {
        let a = DoubleLieVector::new(n, coords(d, 1.0, rng))?;
        let b = DoubleLieVector::new(n, coords(d, 1.0, rng))?;
        let c = DoubleLieVector::new(n, coords(d, 1.0, rng))?;
        let s = (1.0 + a.norm()) * (1.0 + b.norm());
        anti = anti.max(bracket(lam, &a, &b)?.add(&bracket(lam, &b, &a)?).norm() / s);
        jac = jac.max(jacobi_residual(lam, &a, &b, &c)?);
    }
    Ok((anti, jac))
}

fn lie_subalgebras<R: Rng>(n: usize, lam: f64, rng: &mut R) -> Result<f64> {
    let half = 2 * n + 2;
    let mut worst: f64 = 0.0;
    let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    for _ in 0..LIE_TRIPLES {
        let (a, b) = (coords(half, 1.0, rng), coords(half, 1.0, rng));
        let br = bracket(lam, &DoubleLieVector::from_g(n, &a)?, &DoubleLieVector::from_g(n, &b)?)?;
        let off = br.h_part().iter().map(|c| c.abs()).fold(0.0, f64::max);
        worst = worst.max(diff(br.g_part(), &g_bracket(lam, n, &a, &b)) + off);
        let br = bracket(lam, &DoubleLieVector::from_h(n, &a)?, &DoubleLieVector::from_h(n, &b)?)?;
        let off = br.g_part().iter().map(|c| c.abs()).fold(0.0, f64::max);
        worst = worst.max(diff(br.h_part(), &h_bracket(n, &a, &b)) + off);
    }
    Ok(worst)
}

/// Closed-form brackets against the commutator of the group laws.
fn lie_from_law<R: Rng>(n: usize, lam: f64, rng: &mut R) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let gt = Group::new(GroupId::Gtilde, n, lam)?;
    let ht = Group::new(GroupId::Htilde, n, lam)?;
    let dt = Group::new(GroupId::Dtilde, n, lam)?;
    for _ in 0..20 {
        let (a, b) = (coords(2 * n + 2, 1.0, rng), coords(2 * n + 2, 1.0, rng));
        worst = worst.max(diff(&bracket_from_law(&gt, &a, &b), &g_bracket(lam, n, &a, &b)));
        worst = worst.max(diff(&bracket_from_law(&ht, &a, &b), &h_bracket(n, &a, &b)));
        let (a, b) = (coords(4 * n + 4, 1.0, rng), coords(4 * n + 4, 1.0, rng));
        let closed = bracket(lam, &DoubleLieVector::new(n, a.clone())?, &DoubleLieVector::new(n, b.clone())?)?;
        worst = worst.max(diff(&bracket_from_law(&dt, &a, &b), &closed.coords));
    }
    Ok(worst)
}

fn dressing_laws<R: Rng>(action: ActionId, n: usize, lam: f64, rng: &mut R) -> Result<(f64, f64)> {
    let g = Group::new(action.space(), n, lam)?;
    let a = Group::new(action.actor(), n, lam)?;
    let (mut right, mut oracle) = (0.0f64, 0.0f64);
    for _ in 0..DRESS_SAMPLES {
        let x = g.element(coords(g.dim(), 1.0, rng))?;
        let g1 = a.element(coords(a.dim(), 1.0, rng))?;
        let g2 = a.element(coords(a.dim(), 1.0, rng))?;
        let lhs = dress(action, &a.multiply(&g1, &g2)?, &x)?;
        let rhs = dress(action, &g2, &dress(action, &g1, &x)?)?;
        right = right.max(g.distance(&lhs, &rhs)? / scale(&lhs));
        let closed = dress(action, &g1, &x)?;
        let via = dress_via_double(action, &g1, &x)?;
        oracle = oracle.max(g.distance(&closed, &via)? / scale(&closed));
    }
    Ok((right, oracle))
}

fn orbit_invariance<R: Rng>(space: GroupId, n: usize, lam: f64, rng: &mut R) -> Result<f64> {
    let g = Group::new(space, n, lam)?;
    let action = ActionId::on(space)?;
    let fams = OrbitFamily::families(space);
    let mut worst: f64 = 0.0;
    for i in 0..DRESS_SAMPLES {
        let x = sample_point(&g, fams[i % fams.len()], rng)?;
        let gamma = sample_actor(&g, space, rng)?;
        let y = dress(action, &gamma, &x)?;
        let d = classify_orbit(&x)?.distance(&classify_orbit(&y)?).unwrap_or(f64::INFINITY);
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Number of sampled points whose orbit tangent rank differs from the
/// family's dimension.
fn orbit_dimensions<R: Rng>(space: GroupId, n: usize, lam: f64, rng: &mut R) -> Result<f64> {
    let g = Group::new(space, n, lam)?;
    let mut wrong = 0;
    for &fam in OrbitFamily::families(space) {
        for _ in 0..5 {
            let x = sample_point(&g, fam, rng)?;
            if orbit_tangent_rank(&x)? != fam.dimension(n) {
                wrong += 1;
            }
        }
    }
    Ok(wrong as f64)
}

/// At `λ = 0`, `H` dresses `G` by `(p − r y, q + r x, r)`.
fn flat_h_on_g<R: Rng>(n: usize, rng: &mut R) -> Result<f64> {
    let g = Group::new(GroupId::G, n, 0.0)?;
    let h = Group::new(GroupId::H, n, 0.0)?;
    let mut worst: f64 = 0.0;
    for _ in 0..DRESS_SAMPLES {
        let pt = coords(2 * n + 1, 1.5, rng);
        let act = coords(2 * n + 1, 1.5, rng);
        let out = dress(ActionId::HOnG, &h.element(act.clone())?, &g.element(pt.clone())?)?;
        let r = pt[2 * n];
        for i in 0..n {
            worst = worst.max((out.coords[i] - (pt[i] - r * act[n + i])).abs());
            worst = worst.max((out.coords[n + i] - (pt[n + i] + r * act[i])).abs());
        }
        worst = worst.max((out.coords[2 * n] - r).abs());
    }
    Ok(worst)
}

/// Cocycle identity, normalization, and the exact triviality at `r = 0`.
fn cocycles<R: Rng>(a: &TwistedAlgebra, d: usize, rng: &mut R) -> Result<(f64, f64, f64)> {
    let e = vec![0.0; d];
    let (mut co, mut norm, mut flat) = (0.0f64, 0.0f64, 0.0f64);
    let one = C::new(1.0, 0.0);
    for _ in 0..TRIPLES {
        let (g, h, k) = (coords(d, 1.0, rng), coords(d, 1.0, rng), coords(d, 1.0, rng));
        let r = rng.gen_range(-1.5..1.5);
        let lhs = a.sigma(r, &g, &h)? * a.sigma(r, &a.coset_multiply(&g, &h)?, &k)?;
        let rhs = a.sigma(r, &h, &k)? * a.sigma(r, &g, &a.coset_multiply(&h, &k)?)?;
        co = co.max((lhs - rhs).norm());
        norm = norm.max((a.sigma(r, &e, &g)? - one).norm());
        norm = norm.max((a.sigma(r, &g, &e)? - one).norm());
        flat = flat.max((a.sigma(0.0, &g, &h)? - one).norm());
    }
    Ok((co, norm, flat))
}

fn projective<R: Rng>(
    id: RepId,
    n: usize,
    lam: f64,
    spec: GridSpec,
    battery: Option<&TestBattery>,
    rng: &mut R,
) -> Result<f64> {
    let rep = Rep::new(id, n, lam)?;
    let samples = pair_samples(&rep, spec, 6, rng);
    let pair = RepresentingPair {
        r: rep.cocycle_r(),
        rep,
    };
    validate_representing_pair(&pair, &samples, battery)
}

/// `Q̃_{r,s}` on the image of `E` against `Q_r`.
fn restriction_to_e<R: Rng>(
    r: f64,
    n: usize,
    lam: f64,
    spec: GridSpec,
    battery: Option<&TestBattery>,
    rng: &mut R,
) -> Result<f64> {
    let battery = battery.ok_or(crate::Error::EmptyBattery)?;
    let t = Rep::new(RepId::TildeRs { r, s: 0.7 }, n, lam)?;
    let Restriction::Single(rr) = restrict(&t)? else {
        return Err(crate::Error::Parameter("Q~_rs must restrict to a single representation".into()));
    };
    let mut worst: f64 = 0.0;
    for (x, _) in pair_samples(&rr, spec, 6, rng) {
        let mut c = x;
        c.push(rng.gen_range(0.0..1.0));
        let g = rr.group().element(c)?;
        let gt = embed_e(&g)?;
        for v in battery.vectors() {
            let vv = QValue::Vector(v.clone());
            let (QValue::Vector(a), QValue::Vector(b)) = (apply_q(&t, &gt, &vv)?, apply_q(&rr, &g, &vv)?) else {
                return Err(crate::Error::Parameter("unexpected scalar carrier".into()));
            };
            worst = worst.max(a.sub(&b)?.norm() / v.norm());
        }
    }
    Ok(worst)
}

fn func<R: Rng>(variant: Variant, count: usize, shape: &Shape, rng: &mut R) -> Result<TestFunction> {
    TestFunction::random(variant, 1, count, shape, rng)
}

fn pi_r_hom<R: Rng>(lam: f64, line: GridSpec, rng: &mut R) -> Result<(f64, f64)> {
    let f = func(Variant::A, 2, &Shape::default(), rng)?;
    let g = func(Variant::A, 2, &Shape::default(), rng)?;
    let b = TestBattery::gaussians(line, 1, 6, BatteryShape::default(), rng)?;
    let r = 0.5;
    let rp = Rep::new(RepId::R { r }, 1, lam)?;
    let alg = TwistedAlgebra::new(Variant::A, 1, lam)?;
    let fg = alg.convolve_sources(&f, &g, r)?;
    let pfg = integrated_form(&rp, &fg, line, Assembly::Analytic)?.to_operator("pi(f*g)");
    let pf = integrated_form(&rp, &f, line, Assembly::Analytic)?;
    let pg = integrated_form(&rp, &g, line, Assembly::Analytic)?;
    let hom = operator_residual(&pfg, &pf.to_operator("pi(f)").after(&pg.to_operator("pi(g)")), &b)?;
    let IntegratedForm::Matrix(m) = pf else {
        return Err(crate::Error::Parameter("pi_r must assemble to a matrix".into()));
    };
    let ps = integrated_form(&rp, &alg.involution(f)?, line, Assembly::Analytic)?.to_operator("pi(f*)");
    let star = operator_residual(&ps, &m.adjoint().into_operator("pi(f)^*"), &b)?;
    Ok((hom, star))
}

fn pi_tilde_rs_hom<R: Rng>(lam: f64, line: GridSpec, rng: &mut R) -> Result<f64> {
    // wider Gaussians keep the dilation sum short
    let shape = Shape {
        xy: (2.0, 4.0, 0.5),
        ..Shape::default()
    };
    let f = func(Variant::Atilde, 1, &shape, rng)?;
    let g = func(Variant::Atilde, 1, &shape, rng)?;
    let bshape = BatteryShape {
        width: (2.0, 4.0),
        center: 0.5,
        frequency: 0.2,
    };
    let b = TestBattery::gaussians(line, 1, 4, bshape, rng)?;
    let r = 0.3;
    let rp = Rep::new(RepId::TildeRs { r, s: 0.6 }, 1, lam)?;
    let alg = TwistedAlgebra::new(Variant::Atilde, 1, lam)?;
    let fg = alg.convolve_sources(&f, &g, r)?;
    let pfg = integrated_form(&rp, &fg, line, Assembly::Analytic)?.to_operator("pi(f*g)");
    let pf = integrated_form(&rp, &f, line, Assembly::Analytic)?.to_operator("pi(f)");
    let pg = integrated_form(&rp, &g, line, Assembly::Analytic)?.to_operator("pi(g)");
    operator_residual(&pfg, &pf.after(&pg), &b)
}

/// `π̃_{p,q}` restricted to `A` acts on `L²(R)` in `d` by multiplication
/// with `π_{e^d p, e^{-d} q}(f)`.  The multiplier is assembled by trapezoid
/// quadrature of `Q̃_{p,q}` over `(x, y)` and read at the 33 sample points.
fn direct_integral_fibers<R: Rng>(lam: f64, rng: &mut R) -> Result<f64> {
    let f = func(Variant::A, 2, &Shape::default(), rng)?;
    let (p, q) = (0.05, -0.04);
    let t = Rep::new(RepId::TildePq { p: vec![p], q: vec![q] }, 1, lam)?;
    let Restriction::Integral(parts) = restrict(&t)? else {
        return Err(crate::Error::Parameter("Q~_pq must restrict to a direct integral".into()));
    };
    let line = GridSpec::new(1, 256, 8.0)?;
    let ones = QValue::Vector(GridVector::from_fn(line, 1, |_| C::new(1.0, 0.0)));
    let h = 1.0 / 32.0;
    let m = 512;
    let mut acc = vec![C::new(0.0, 0.0); line.points];
    for i in 0..m {
        let x = -8.0 + i as f64 * h;
        for j in 0..m {
            let y = -8.0 + j as f64 * h;
            let fv = f.eval(&[x, y], 0.0)?;
            if fv.norm() < 1e-300 {
                continue;
            }
            let QValue::Vector(mult) = apply_coset(&t, &[x, y, 0.0], &ones)? else {
                return Err(crate::Error::Parameter("unexpected scalar carrier".into()));
            };
            for (a, v) in acc.iter_mut().zip(mult.values()) {
                *a += fv * v * h * h;
            }
        }
    }
    let mut worst: f64 = 0.0;
    for (w, rep) in parts {
        let idx = line.lattice_steps(w - line.coord(0)).ok_or(crate::Error::OffLattice(w))? as usize;
        let want = integrated_form(&rep, &f, line, Assembly::Analytic)?
            .scalar()
            .ok_or_else(|| crate::Error::Parameter("pi_pq must be scalar".into()))?;
        worst = worst.max((acc[idx] - want).norm() / (1.0 + want.norm()));
    }
    Ok(worst)
}

/// Agreement of the FFT and naive `y`-quadratures, and the speedup.
fn fft_vs_naive<R: Rng>(lam: f64, line: GridSpec, rng: &mut R) -> Result<(f64, f64)> {
    let f = func(Variant::A, 2, &Shape::default(), rng)?;
    let b = TestBattery::gaussians(line, 1, 4, BatteryShape::default(), rng)?;
    let rp = Rep::new(RepId::R { r: 0.5 }, 1, lam)?;
    let t0 = Instant::now();
    let fast = integrated_form(&rp, &f, line, Assembly::Fft)?;
    let t_fast = t0.elapsed().as_secs_f64();
    let t0 = Instant::now();
    let slow = integrated_form(&rp, &f, line, Assembly::Naive)?;
    let t_slow = t0.elapsed().as_secs_f64();
    let res = operator_residual(&fast.to_operator("fft"), &slow.to_operator("naive"), &b)?;
    Ok((res, t_slow / t_fast.max(1e-9)))
}

fn characters_add<R: Rng>(lam: f64, line: GridSpec, rng: &mut R) -> Result<f64> {
    let f = func(Variant::A, 3, &Shape::default(), rng)?;
    let (p1, q1, p2, q2) = (0.3, -0.4, 0.5, 0.2);
    let a = Rep::new(RepId::Pq { p: vec![p1], q: vec![q1] }, 1, lam)?;
    let b = Rep::new(RepId::Pq { p: vec![p2], q: vec![q2] }, 1, lam)?;
    let sum = Rep::new(RepId::Pq { p: vec![p1 + p2], q: vec![q1 + q2] }, 1, lam)?;
    let s = integrated_form(&sum, &f, line, Assembly::Analytic)?.scalar().unwrap_or_default();
    let mut worst: f64 = 0.0;
    for (x, y) in [(&a, &b), (&b, &a)] {
        let v = inner_tensor(x, y, &f, line)?.scalar().ok_or_else(|| crate::Error::Parameter("expected scalar".into()))?;
        worst = worst.max((v - s).norm());
    }
    Ok(worst)
}

/// `π_{p,q} ⊠ π_r` assembled directly from the group representations,
/// `∫ F(x, y) Q_{p,q}(e^{λr}x, e^{λr}y) Q_r(x, y) dx dy`, with lattice `x`
/// and trapezoid `y`, against the closed form `π_r ⊠ π_{e^{λr}p, e^{λr}q}`.
fn character_shift<R: Rng>(lam: f64, line: GridSpec, b: &TestBattery, rng: &mut R) -> Result<f64> {
    let (r, p, q) = (0.5, 0.3, -0.2);
    let st = (lam * r).exp();
    let pq = Rep::new(RepId::Pq { p: vec![p], q: vec![q] }, 1, lam)?;
    let rr = Rep::new(RepId::R { r }, 1, lam)?;
    let shifted = Rep::new(RepId::Pq { p: vec![st * p], q: vec![st * q] }, 1, lam)?;
    let (hx, hy) = (line.h(), 1.0 / 32.0);
    let ys: Vec<f64> = (0..512).map(|k| -8.0 + k as f64 * hy).collect();
    let mut worst: f64 = 0.0;
    for _ in 0..2 {
        let f = func(Variant::A, 2, &Shape::default(), rng)?;
        let right = inner_tensor(&rr, &shifted, &f, line)?.to_operator("r.pq");
        let mut weights = Vec::new();
        for i in 0..line.points {
            let x = line.coord(i);
            for &y in &ys {
                let fv = f.eval(&[x, y], r)?;
                if fv.norm() < 1e-18 {
                    continue;
                }
                let QValue::Scalar(c) = apply_coset(&pq, &[st * x, st * y], &QValue::Scalar(C::new(1.0, 0.0)))? else {
                    return Err(crate::Error::Parameter("unexpected vector carrier".into()));
                };
                weights.push((x, y, fv * c * hx * hy));
            }
        }
        let rr2 = rr.clone();
        let left = LinearOperator::new("pq.r by quadrature", move |v| {
            let mut acc = GridVector::zeros(v.spec(), v.slots());
            for &(x, y, w) in &weights {
                let QValue::Vector(moved) = apply_coset(&rr2, &[x, y], &QValue::Vector(v.clone()))? else {
                    return Err(crate::Error::Parameter("unexpected scalar carrier".into()));
                };
                acc.axpy(w, &moved)?;
            }
            Ok(acc)
        });
        worst = worst.max(operator_residual(&left, &right, b)?);
    }
    Ok(worst)
}

fn tensor_multiplicative<R: Rng>(lam: f64, b: &TestBattery, rng: &mut R) -> Result<f64> {
    let spec = tensor_kernel_grid();
    let (r, r2) = (0.4, -0.3);
    let ra = Rep::new(RepId::R { r }, 1, lam)?;
    let rb = Rep::new(RepId::R { r: r2 }, 1, lam)?;
    let f = func(Variant::A, 1, &Shape::default(), rng)?;
    let g = func(Variant::A, 1, &Shape::default(), rng)?;
    let alg = TwistedAlgebra::new(Variant::A, 1, lam)?;
    let fg = alg.convolve_sources(&f, &g, r + r2)?;
    let tfg = inner_tensor(&ra, &rb, &fg, spec)?.to_operator("fg");
    let tf = inner_tensor(&ra, &rb, &f, spec)?.to_operator("f");
    let tg = inner_tensor(&ra, &rb, &g, spec)?.to_operator("g");
    operator_residual(&tfg, &tf.after(&tg), b)
}

/// Intertwining residuals of `S`, `S⁻¹`, `T_pq`, and `T_pq` against its
/// standalone closed form.
fn s_type<R: Rng>(lam: f64, p: f64, q: f64, r: f64, line: GridSpec, b: &TestBattery, rng: &mut R) -> Result<[f64; 4]> {
    let s = intertwiner(IntertwinerKind::S { p, q, r }, lam)?;
    let si = intertwiner(IntertwinerKind::SInv { p, q, r }, lam)?;
    let t = intertwiner(IntertwinerKind::Tpq { p, q, r }, lam)?;
    let tc = intertwiner(IntertwinerKind::TpqClosed { p, q, r }, lam)?;
    let rr = Rep::new(RepId::R { r }, 1, lam)?;
    let pq = Rep::new(RepId::Pq { p: vec![p], q: vec![q] }, 1, lam)?;
    let mut out = [0.0f64; 4];
    for _ in 0..2 {
        let f = func(Variant::A, 2, &Shape::default(), rng)?;
        let pr = integrated_form(&rr, &f, line, Assembly::Analytic)?.to_operator("r");
        let rpq = inner_tensor(&rr, &pq, &f, line)?.to_operator("r.pq");
        let pqr = inner_tensor(&pq, &rr, &f, line)?.to_operator("pq.r");
        out[0] = out[0].max(operator_residual(&s.after(&rpq), &pr.after(&s), b)?);
        out[1] = out[1].max(operator_residual(&si.after(&pr), &rpq.after(&si), b)?);
        out[2] = out[2].max(operator_residual(&t.after(&rpq), &pqr.after(&t), b)?);
    }
    out[3] = operator_residual(&t, &tc, b)?;
    Ok(out)
}

fn braid_intertwines<R: Rng>(lam: f64, r: f64, r2: f64, b: &TestBattery, rng: &mut R) -> Result<(f64, f64)> {
    let spec = tensor_kernel_grid();
    let ra = Rep::new(RepId::R { r }, 1, lam)?;
    let rb = Rep::new(RepId::R { r: r2 }, 1, lam)?;
    let f = func(Variant::A, 1, &Shape::default(), rng)?;
    let lhs = inner_tensor(&ra, &rb, &f, spec)?.to_operator("r.r'");
    let rhs = inner_tensor(&rb, &ra, &f, spec)?.to_operator("r'.r");
    let mut out = [0.0; 2];
    for (k, kind) in [IntertwinerKind::Trr { r, r2 }, IntertwinerKind::FromR { r, r2 }].into_iter().enumerate() {
        let t = intertwiner(kind, lam)?;
        out[k] = operator_residual(&t.after(&lhs), &rhs.after(&t), b)?;
    }
    Ok((out[0], out[1]))
}

fn unitarity(t: &LinearOperator, b: &TestBattery) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for v in b.vectors() {
        worst = worst.max((t.apply(v)?.norm() - v.norm()).abs() / v.norm());
    }
    Ok(worst)
}
