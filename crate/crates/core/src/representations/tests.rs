use super::*;
use crate::algebra::{FiberSource, Shape, TestFunction};
use crate::kernel::operator::{operator_residual, BatteryShape};
use crate::kernel::quadrature::{integrate, Rule};
use crate::rng::stream;

fn spec() -> GridSpec {
    GridSpec::new(1, 256, 8.0).unwrap()
}

fn battery(seed: u64) -> TestBattery {
    TestBattery::gaussians(spec(), 1, 8, BatteryShape::default(), &mut stream(seed, "battery")).unwrap()
}

fn rep(id: RepId) -> Rep {
    Rep::new(id, 1, 1.0).unwrap()
}

#[test]
fn q_r_unitary_and_projective() {
    let b = battery(1);
    let rr = rep(RepId::R { r: 0.5 });
    let g = rr.group();
    let el = g.element(vec![0.5, 0.3, 0.1]).unwrap();
    for v in b.vectors() {
        let QValue::Vector(out) = apply_q(&rr, &el, &QValue::Vector(v.clone())).unwrap() else {
            panic!()
        };
        assert!((out.norm() - v.norm()).abs() < 1e-12);
    }
    let pair = RepresentingPair { r: 0.5, rep: rr.clone() };
    let samples = pair_samples(&rr, spec(), 6, &mut stream(2, "s"));
    assert!(validate_representing_pair(&pair, &samples, Some(&b)).unwrap() < 1e-12);
    let wrong = RepresentingPair { r: 0.2, rep: rr };
    assert!(validate_representing_pair(&wrong, &samples, Some(&b)).unwrap() > 1e-2);
}

#[test]
fn off_lattice_and_wrong_group_rejected() {
    let rr = rep(RepId::R { r: 0.5 });
    let el = rr.group().element(vec![0.3, 0.0, 0.0]).unwrap();
    let v = QValue::Vector(battery(1).vectors()[0].clone());
    assert!(matches!(apply_q(&rr, &el, &v), Err(Error::OffLattice(_))));
    let other = rep(RepId::R { r: 0.4 }).group().identity();
    assert!(matches!(apply_q(&rr, &other, &v), Err(Error::GroupMismatch { .. })));
}

#[test]
fn tilde_reps_are_honest() {
    let b = battery(3);
    let line = GridSpec::new(1, 256, 8.0).unwrap();
    let bline = TestBattery::gaussians(line, 1, 6, BatteryShape::default(), &mut stream(4, "line")).unwrap();
    let cases: Vec<(Rep, Option<&TestBattery>)> = vec![
        (rep(RepId::TildeRs { r: 0.4, s: 0.7 }), Some(&b)),
        (rep(RepId::TildePq { p: vec![0.3], q: vec![-0.2] }), Some(&bline)),
        (rep(RepId::TildeS { s: 1.3 }), None),
        (rep(RepId::Pq { p: vec![0.3], q: vec![0.1] }), None),
    ];
    for (rp, bat) in cases {
        let pair = RepresentingPair { r: rp.cocycle_r(), rep: rp.clone() };
        let samples = pair_samples(&rp, spec(), 5, &mut stream(5, "s"));
        let res = validate_representing_pair(&pair, &samples, bat).unwrap();
        assert!(res < 1e-8, "{}: {res}", rp.label());
    }
}

#[test]
fn analytic_q_matches_grid() {
    let rp = rep(RepId::TildeRs { r: 0.4, s: 0.7 });
    let mut g = crate::kernel::gauss::QuadExp::one(1);
    g.add_gaussian(0, C::new(1.5, 0.0), 0.3);
    let av = GaussSum::single(g);
    let grid = GridVector::from_fn(spec(), 1, |u| av.eval(u));
    let h = [0.5, 0.3, 0.2];
    let out = apply_q_analytic(&rp, &h, &av).unwrap();
    let QValue::Vector(gv) = apply_coset(&rp, &h, &QValue::Vector(grid)).unwrap() else { panic!() };
    let want = GridVector::from_fn(spec(), 1, |u| out.eval(u));
    assert!(gv.sub(&want).unwrap().norm() < 1e-10);
    assert!((out.norm().unwrap() - av.norm().unwrap()).abs() < 1e-12);
}

#[test]
fn restriction_of_q_tilde_rs_is_q_r() {
    let b = battery(6);
    let t = rep(RepId::TildeRs { r: 0.4, s: 0.7 });
    let Restriction::Single(rr) = restrict(&t).unwrap() else { panic!() };
    assert_eq!(rr.id, RepId::R { r: 0.4 });
    let g = rr.group().element(vec![0.25, -0.4, 0.3]).unwrap();
    let gt = embed_e(&g).unwrap();
    for v in b.vectors() {
        let vv = QValue::Vector(v.clone());
        assert_eq!(apply_q(&t, &gt, &vv).unwrap(), apply_q(&rr, &g, &vv).unwrap());
    }
    let Restriction::Integral(parts) = restrict(&rep(RepId::TildePq { p: vec![1.0], q: vec![1.0] })).unwrap() else {
        panic!()
    };
    assert_eq!(parts.len(), 33);
    assert!(restrict(&rr).is_err());
}

#[test]
fn pi_pq_matches_quadrature_and_is_multiplicative() {
    let mut rng = stream(7, "f");
    let f = TestFunction::random(Variant::A, 1, 2, &Shape::default(), &mut rng).unwrap();
    let g = TestFunction::random(Variant::A, 1, 2, &Shape::default(), &mut rng).unwrap();
    let rp = rep(RepId::Pq { p: vec![0.4], q: vec![-0.3] });
    let pf = integrated_form(&rp, &f, spec(), Assembly::Analytic).unwrap().scalar().unwrap();
    let direct = integrate(
        |z| f.eval(z, 0.0).unwrap() * ebar_unchecked(0.4 * z[0] - 0.3 * z[1]),
        &[(-8.0, 8.0), (-8.0, 8.0)],
        128,
        Rule::Trapezoid,
    )
    .unwrap();
    assert!((pf - direct).norm() < 1e-10);
    let alg = TwistedAlgebra::new(Variant::A, 1, 1.0).unwrap();
    let fg = alg.convolve_sources(&f, &g, 0.0).unwrap();
    let lhs = integrated_form(&rp, &fg, spec(), Assembly::Analytic).unwrap().scalar().unwrap();
    let pg = integrated_form(&rp, &g, spec(), Assembly::Analytic).unwrap().scalar().unwrap();
    assert!((lhs - pf * pg).norm() < 1e-12);
}

#[test]
fn pi_r_assemblies_agree() {
    let mut rng = stream(8, "f");
    let f = TestFunction::random(Variant::A, 1, 2, &Shape::default(), &mut rng).unwrap();
    let rp = rep(RepId::R { r: 0.5 });
    let b = battery(9);
    let an = integrated_form(&rp, &f, spec(), Assembly::Analytic).unwrap().to_operator("an");
    let ff = integrated_form(&rp, &f, spec(), Assembly::Fft).unwrap().to_operator("fft");
    let res = operator_residual(&an, &ff, &b).unwrap();
    assert!(res < 1e-9, "analytic vs fft {res}");
}

#[test]
fn pi_r_is_homomorphism_and_star() {
    let mut rng = stream(10, "f");
    let f = TestFunction::random(Variant::A, 1, 2, &Shape::default(), &mut rng).unwrap();
    let g = TestFunction::random(Variant::A, 1, 2, &Shape::default(), &mut rng).unwrap();
    let r = 0.5;
    let rp = rep(RepId::R { r });
    let alg = TwistedAlgebra::new(Variant::A, 1, 1.0).unwrap();
    let fg = alg.convolve_sources(&f, &g, r).unwrap();
    let b = battery(11);
    let pfg = integrated_form(&rp, &fg, spec(), Assembly::Analytic).unwrap().to_operator("pfg");
    let pf = integrated_form(&rp, &f, spec(), Assembly::Analytic).unwrap();
    let pg = integrated_form(&rp, &g, spec(), Assembly::Analytic).unwrap();
    let prod = pf.to_operator("pf").after(&pg.to_operator("pg"));
    assert!(operator_residual(&pfg, &prod, &b).unwrap() < 1e-6);
    let IntegratedForm::Matrix(m) = pf else { panic!() };
    let star = alg.involution(f).unwrap();
    let ps = integrated_form(&rp, &star, spec(), Assembly::Analytic).unwrap().to_operator("p*");
    let adj = m.adjoint().into_operator("adj");
    assert!(operator_residual(&ps, &adj, &b).unwrap() < 1e-6);
}

#[test]
fn pi_tilde_rs_restricts_and_multiplies() {
    let shape = Shape {
        xy: (2.0, 4.0, 0.5),
        ..Shape::default()
    };
    let mut rng = stream(12, "f");
    let f = TestFunction::random(Variant::Atilde, 1, 1, &shape, &mut rng).unwrap();
    let g = TestFunction::random(Variant::Atilde, 1, 1, &shape, &mut rng).unwrap();
    let r = 0.3;
    let rp = rep(RepId::TildeRs { r, s: 0.6 });
    let alg = TwistedAlgebra::new(Variant::Atilde, 1, 1.0).unwrap();
    let fg = alg.convolve_sources(&f, &g, r).unwrap();
    let bshape = BatteryShape {
        width: (2.0, 4.0),
        center: 0.5,
        frequency: 0.2,
    };
    let b = TestBattery::gaussians(spec(), 1, 4, bshape, &mut stream(13, "b")).unwrap();
    let pfg = integrated_form(&rp, &fg, spec(), Assembly::Analytic).unwrap().to_operator("pfg");
    let pf = integrated_form(&rp, &f, spec(), Assembly::Analytic).unwrap().to_operator("pf");
    let pg = integrated_form(&rp, &g, spec(), Assembly::Analytic).unwrap().to_operator("pg");
    let res = operator_residual(&pfg, &pf.after(&pg), &b).unwrap();
    assert!(res < 1e-6, "homomorphism residual {res}");
    let _ = f.fiber(r).unwrap();
}


#[test]
fn pi_r_grid_matches_analytic_backend() {
    let f = TestFunction::random(Variant::A, 1, 2, &Shape::default(), &mut stream(14, "f")).unwrap();
    let r = 0.3;
    let rp = rep(RepId::R { r });
    let m = integrated_form(&rp, &f, spec(), Assembly::Analytic).unwrap();
    let mut g = crate::kernel::gauss::QuadExp::one(1);
    g.add_gaussian(0, C::new(1.1, 0.0), -0.4).add_wave(0, 0.2);
    let xi = GaussSum::single(g);
    let out = pi_r_apply_analytic(&f.fiber(r).unwrap(), eta(1.0, r), &xi).unwrap();
    let grid = m.apply(&GridVector::from_fn(spec(), 1, |u| xi.eval(u))).unwrap();
    let want = GridVector::from_fn(spec(), 1, |u| out.eval(u));
    assert!(grid.sub(&want).unwrap().norm() < 1e-10 * want.norm().max(1e-3));
}
