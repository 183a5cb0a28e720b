use super::*;
use crate::algebra::{Shape, TestFunction, TwistedAlgebra};
use crate::kernel::operator::{operator_residual, BatteryShape};
use crate::representations::integrated_form;
use crate::rng::stream;

fn line() -> GridSpec {
    GridSpec::new(1, 256, 8.0).unwrap()
}

fn small_tensor() -> GridSpec {
    GridSpec::new(1, 128, 12.0).unwrap()
}

fn fine_tensor() -> GridSpec {
    tensor_kernel_grid()
}

fn rep(id: RepId, lambda: f64) -> Rep {
    Rep::new(id, 1, lambda).unwrap()
}

fn func(seed: u64, count: usize) -> TestFunction {
    TestFunction::random(Variant::A, 1, count, &Shape::default(), &mut stream(seed, "f")).unwrap()
}

fn line_battery(seed: u64) -> TestBattery {
    TestBattery::gaussians(line(), 1, 6, BatteryShape::default(), &mut stream(seed, "b")).unwrap()
}

fn tensor_battery(spec: GridSpec, seed: u64) -> TestBattery {
    TestBattery::gaussians(spec, 2, 3, BatteryShape::default(), &mut stream(seed, "tb")).unwrap()
}

#[test]
fn coproduct_forms() {
    let f = |g: &[f64]| C::new((-(g[0] * g[0] + 2.0 * g[1] * g[1] + g[2] * g[2])).exp(), g[0]);
    let a = [0.3, -0.2, 0.7];
    let b = [-0.5, 0.4, -0.1];
    let c = [0.2, 0.9, 0.35];
    let flat = Coproduct::new(0.0, 1);
    assert!((flat.pqr(f, &a, &b).unwrap() - flat.pqr(f, &b, &a).unwrap()).norm() < 1e-15);
    let cp = Coproduct::new(1.0, 1);
    assert!((cp.pqr(f, &a, &[0.0; 3]).unwrap() - f(&a)).norm() < 1e-15);
    let grp = Group::new(GroupId::G, 1, 1.0).unwrap();
    let ab = grp.multiply(&grp.element(a.to_vec()).unwrap(), &grp.element(b.to_vec()).unwrap()).unwrap();
    let bc = grp.multiply(&grp.element(b.to_vec()).unwrap(), &grp.element(c.to_vec()).unwrap()).unwrap();
    let left = cp.pqr(f, ab.coords(), &c).unwrap();
    let right = cp.pqr(f, &a, bc.coords()).unwrap();
    assert!((left - right).norm() < 1e-10);

    let tf = func(1, 2);
    let mut phi = QuadExp::one(2);
    phi.add_gaussian(0, C::new(1.2, 0.0), 0.3).add_gaussian(1, C::new(0.8, 0.0), -0.2);
    let mut psi = QuadExp::one(2);
    psi.add_gaussian(0, C::new(0.7, 0.0), 0.1).add_gaussian(1, C::new(1.5, 0.0), 0.4).add_wave(0, 0.3);
    let (phi, psi) = (GaussSum::single(phi), GaussSum::single(psi));
    let lhs = cp.pair_xy(&tf, 0.4, 0.3, &phi, &psi).unwrap();
    let rhs = cp.pair_substituted(&tf, 0.4, 0.3, &phi, &psi).unwrap();
    assert!((lhs - rhs).norm() < 1e-10 * rhs.norm().max(1e-3), "{lhs} vs {rhs}");
}

#[test]
fn one_dimensional_tensor_products_add() {
    let f = func(2, 3);
    let a = rep(RepId::Pq { p: vec![0.3], q: vec![-0.4] }, 1.0);
    let b = rep(RepId::Pq { p: vec![0.5], q: vec![0.2] }, 1.0);
    let sum = rep(RepId::Pq { p: vec![0.8], q: vec![-0.2] }, 1.0);
    let ab = inner_tensor(&a, &b, &f, line()).unwrap().scalar().unwrap();
    let ba = inner_tensor(&b, &a, &f, line()).unwrap().scalar().unwrap();
    let s = integrated_form(&sum, &f, line(), Assembly::Analytic).unwrap().scalar().unwrap();
    assert!((ab - s).norm() < 1e-12 && (ba - s).norm() < 1e-12);
}

#[test]
fn character_moves_across_pi_r() {
    let lambda: f64 = 1.0;
    let (r, p, q) = (0.5, 0.3, -0.2);
    let f = func(3, 2);
    let st = (lambda * r).exp();
    let left = inner_tensor(&rep(RepId::Pq { p: vec![p], q: vec![q] }, lambda), &rep(RepId::R { r }, lambda), &f, line()).unwrap();
    let right = inner_tensor(&rep(RepId::R { r }, lambda), &rep(RepId::Pq { p: vec![st * p], q: vec![st * q] }, lambda), &f, line()).unwrap();
    let b = line_battery(4);
    assert!(operator_residual(&left.to_operator("l"), &right.to_operator("r"), &b).unwrap() < 1e-10);
}

#[test]
fn s_type_intertwiners() {
    let lambda: f64 = 1.0;
    let (p, q, r) = (0.4, 0.5, 0.5);
    let b = line_battery(5);
    let s = intertwiner(IntertwinerKind::S { p, q, r }, lambda).unwrap();
    let si = intertwiner(IntertwinerKind::SInv { p, q, r }, lambda).unwrap();
    let t = intertwiner(IntertwinerKind::Tpq { p, q, r }, lambda).unwrap();
    let tc = intertwiner(IntertwinerKind::TpqClosed { p, q, r }, lambda).unwrap();
    assert!(operator_residual(&t, &tc, &b).unwrap() < 1e-9);
    assert!(operator_residual(&si.after(&s), &LinearOperator::identity(), &b).unwrap() < 1e-9);
    let rr = rep(RepId::R { r }, lambda);
    let pq = rep(RepId::Pq { p: vec![p], q: vec![q] }, lambda);
    for seed in 0..2 {
        let f = func(10 + seed, 2);
        let pr = integrated_form(&rr, &f, line(), Assembly::Analytic).unwrap().to_operator("pr");
        let rpq = inner_tensor(&rr, &pq, &f, line()).unwrap().to_operator("r⊠pq");
        let pqr = inner_tensor(&pq, &rr, &f, line()).unwrap().to_operator("pq⊠r");
        let res = operator_residual(&s.after(&rpq), &pr.after(&s), &b).unwrap();
        assert!(res < 1e-6, "S {res}");
        let res = operator_residual(&si.after(&pr), &rpq.after(&si), &b).unwrap();
        assert!(res < 1e-6, "S⁻¹ {res}");
        let res = operator_residual(&t.after(&rpq), &pqr.after(&t), &b).unwrap();
        assert!(res < 1e-6, "T {res}");
    }
    for op in [&s, &si, &t] {
        for v in b.vectors() {
            assert!((op.apply(v).unwrap().norm() - v.norm()).abs() < 1e-9);
        }
    }
    assert!(intertwiner(IntertwinerKind::S { p, q, r: 0.0 }, lambda).is_err());
}

#[test]
fn braid_intertwiner_is_flip_without_deformation() {
    let spec = small_tensor();
    let b = tensor_battery(spec, 6);
    let t = intertwiner(IntertwinerKind::Trr { r: 0.4, r2: 0.7 }, 0.0).unwrap();
    let flip = LinearOperator::new("flip", |v| v.flip());
    assert!(operator_residual(&t, &flip, &b).unwrap() < 1e-13);
    let id = LinearOperator::identity();
    let v = b.vectors()[0].clone();
    assert!(r_matrix_apply(0.0, 0.4, 0.7, &v).unwrap().sub(&id.apply(&v).unwrap()).unwrap().norm() < 1e-13);
}

#[test]
fn r_matrix_degenerates_and_matches_trr() {
    let spec = small_tensor();
    let b = tensor_battery(spec, 7);
    let (lambda, r): (f64, f64) = (1.0, 0.5);
    let want = LinearOperator::new("half", move |v| {
        Ok(resample_axis(v, 1, (-lambda * r).exp(), |_| 0.0)?.scaled(C::new((-lambda * r / 2.0).exp(), 0.0)))
    });
    let got = LinearOperator::new("R", move |v| r_matrix_apply(lambda, r, 0.0, v));
    assert!(operator_residual(&got, &want, &b).unwrap() < 1e-10);
    let t = intertwiner(IntertwinerKind::Trr { r: 0.5, r2: 0.3 }, lambda).unwrap();
    let fr = intertwiner(IntertwinerKind::FromR { r: 0.5, r2: 0.3 }, lambda).unwrap();
    assert!(operator_residual(&t, &fr, &b).unwrap() < 1e-6);
    for v in b.vectors() {
        assert!((t.apply(v).unwrap().norm() - v.norm()).abs() < 1e-6);
    }
}

#[test]
fn r_matrix_quadrature_oracle() {
    let pts = [(0.3, -0.4), (0.7, 0.5), (-0.9, 0.35), (1.1, -0.8)];
    let res = r_matrix_quadrature_residual(1.0, 0.5, 0.3, &pts).unwrap();
    assert!(res < 1e-5, "{res}");
}

#[test]
fn braid_intertwines_tensor_products() {
    let spec = fine_tensor();
    let b = tensor_battery(spec, 8);
    let (lambda, r, r2) = (1.0, 0.5, 0.3);
    let ra = rep(RepId::R { r }, lambda);
    let rb = rep(RepId::R { r: r2 }, lambda);
    let f = func(20, 1);
    let t = intertwiner(IntertwinerKind::Trr { r, r2 }, lambda).unwrap();
    let lhs = inner_tensor(&ra, &rb, &f, spec).unwrap().to_operator("ab");
    let rhs = inner_tensor(&rb, &ra, &f, spec).unwrap().to_operator("ba");
    let res = operator_residual(&t.after(&lhs), &rhs.after(&t), &b).unwrap();
    assert!(res < 1e-6, "{res}");
}

#[test]
fn tensor_product_is_multiplicative() {
    let spec = fine_tensor();
    let b = tensor_battery(spec, 9);
    let (lambda, r, r2) = (1.0, 0.4, -0.3);
    let ra = rep(RepId::R { r }, lambda);
    let rb = rep(RepId::R { r: r2 }, lambda);
    let f = func(30, 1);
    let g = func(31, 1);
    let alg = TwistedAlgebra::new(Variant::A, 1, lambda).unwrap();
    let fg = alg.convolve_sources(&f, &g, r + r2).unwrap();
    let tfg = inner_tensor(&ra, &rb, &fg, spec).unwrap().to_operator("fg");
    let tf = inner_tensor(&ra, &rb, &f, spec).unwrap().to_operator("f");
    let tg = inner_tensor(&ra, &rb, &g, spec).unwrap().to_operator("g");
    let res = operator_residual(&tfg, &tf.after(&tg), &b).unwrap();
    assert!(res < 1e-5, "{res}");
}

#[test]
fn flat_tensor_product_is_flip_symmetric() {
    let spec = small_tensor();
    let b = tensor_battery(spec, 10);
    let ra = rep(RepId::R { r: 0.5 }, 0.0);
    let rb = rep(RepId::R { r: 0.8 }, 0.0);
    let f = func(40, 1);
    let ab = inner_tensor(&ra, &rb, &f, spec).unwrap().to_operator("ab");
    let ba = inner_tensor(&rb, &ra, &f, spec).unwrap().to_operator("ba");
    let flip = LinearOperator::new("flip", |v| v.flip());
    assert!(operator_residual(&flip.after(&ab).after(&flip), &ba, &b).unwrap() < 1e-6);
}

#[test]
fn double_braid_is_not_identity() {
    let f = func(50, 1);
    let rep = braid_composition(1.0, 0.5, 0.5, braid_grid(), Some(&f)).unwrap();
    assert!(rep.intertwining_residual.unwrap() < 1e-6, "{rep:?}");
    assert!(rep.composition_residual < 1e-6, "{rep:?}");
    assert!(rep.printed_prefactor_residual > 1e-2);
    // frozen from a 30-digit evaluation of the Gaussian overlap
    let frozen = 0.984316908565311776;
    assert!((rep.analytic_distance - frozen).abs() < 1e-12);
    assert!((rep.distance_to_identity - frozen).abs() < 1e-6, "{}", rep.distance_to_identity);
    for (lambda, r, r2) in [(0.0, 0.5, 0.5), (1.0, 0.0, 0.0)] {
        let d = braid_composition(lambda, r, r2, braid_grid(), None).unwrap();
        assert!(d.distance_to_identity < 1e-8, "{d:?}");
    }
}

#[test]
fn analytic_distance_matches_gaussian_oracle() {
    // ⟨k ξ∘M, ξ⟩ through the Gaussian backend
    let (m, k) = composition_map(1.0, 0.3, 0.6);
    let xi = unit_gaussian_analytic();
    let moved = xi.pullback(2, &m, &[0.0, 0.0]).unwrap().scaled(C::new(k, 0.0));
    let overlap = moved.inner(&xi).unwrap().re / xi.inner(&xi).unwrap().re;
    let want = (2.0 - 2.0 * overlap).sqrt();
    assert!((analytic_identity_distance(1.0, 0.3, 0.6) - want).abs() < 1e-12);
}

