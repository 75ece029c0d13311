use std::f64::consts::FRAC_PI_2;

use super::*;
use crate::chart::{sample_cone_points, sample_points, validate_params};
use crate::geometry::calculus::codifferential;
use crate::geometry::field::{exterior_derivative, MonomialForm};
use crate::geometry::metric::MetricJet;
use crate::tensor::wedge_power;

fn params() -> YpqParams {
    validate_params(0.5, 1.0).unwrap()
}

fn ypq() -> MetricProvider {
    MetricProvider::ypq(params()).unwrap()
}

fn cone() -> MetricProvider {
    MetricProvider::cone(params()).unwrap()
}

fn terms(dim: usize, deg: usize, t: &[(f64, &[usize])]) -> DifferentialForm {
    DifferentialForm::from_terms(dim, deg, t.iter().map(|(c, i)| (*c, *i))).unwrap()
}

#[test]
fn c0_is_rejected() {
    let p0 = validate_params(0.5, 0.0).unwrap();
    let pt = ChartPoint::new(1.0, 0.0, 0.0, 0.0, 0.0);
    assert!(matches!(eval_eta(p0, &pt), Err(Error::UnsupportedC(_))));
    assert!(NamedFormCatalog::new(p0).is_err());
}

#[test]
fn eta_example_and_normalization() {
    let pt = ChartPoint::new(FRAC_PI_2, 0.4, 0.0, 1.1, 2.0);
    let eta = eval_eta(params(), &pt).unwrap();
    for k in 0..4 {
        assert!(eta.get(&[k]).abs() < 1e-16);
    }
    assert!((eta.get(&[4]) - 1.0 / 3.0).abs() < 1e-16);
    let p = ypq();
    for pt in sample_points(&p.domain, 1, 100) {
        let x = pt.as_array();
        let eta = eval_eta(params(), &pt).unwrap();
        let gi = crate::geometry::inverse_metric(&p, &x).unwrap();
        let norm: f64 = (0..5).flat_map(|i| (0..5).map(move |j| (i, j))).map(|(i, j)| gi[(i, j)] * eta.get(&[i]) * eta.get(&[j])).sum();
        assert!((norm - 1.0).abs() < 1e-10);
        let reeb = interior_product(&[0.0, 0.0, 0.0, 0.0, 3.0], &eta).unwrap();
        assert!((reeb.get(&[]) - 1.0).abs() < 1e-15);
    }
}

#[test]
fn psi_example_and_structure() {
    let pt = ChartPoint::new(FRAC_PI_2, 0.2, 0.0, 0.5, 1.0);
    let psi = eval_psi(params(), &pt).unwrap();
    let expect = terms(5, 3, &[(1.0 / 9.0, &[0, 1, 4]), (1.0 / 9.0, &[2, 3, 4])]);
    assert!(psi.max_abs_diff(&expect) < 1e-16);
    // the (y, β, ψ′) term from an explicit wedge of coordinate forms
    let dy_db_dpsi = wedge(&wedge(&DifferentialForm::<f64>::basis(5, &[2]).unwrap(), &DifferentialForm::basis(5, &[3]).unwrap()).unwrap(), &DifferentialForm::basis(5, &[4]).unwrap()).unwrap();
    assert!((9.0 * psi.get(&[2, 3, 4]) - dy_db_dpsi.get(&[2, 3, 4])).abs() < 1e-15);

    let p = ypq();
    let eta_f = FormField::eta(params()).unwrap();
    for pt in sample_points(&p.domain, 2, 100) {
        let x = pt.as_array();
        let eta = eval_eta(params(), &pt).unwrap();
        let deta = exterior_derivative(&eta_f, &x).unwrap();
        let rhs = wedge(&eta, &deta).unwrap();
        assert!(eval_psi(params(), &pt).unwrap().max_abs_diff(&rhs) < 1e-10);
        for k in 1..=2 {
            let phi = eval_phi_k(params(), &pt, k).unwrap();
            assert!(phi.max_abs_diff(&wedge_power(&deta, k).unwrap()) < 1e-14);
            let dphi = exterior_derivative(&FormField::phi(params(), k).unwrap(), &x).unwrap();
            assert!(dphi.max_abs() < 1e-9);
        }
    }
}

#[test]
fn xi_upsilon_examples() {
    let pt = ChartPoint::new(FRAC_PI_2, 0.0, 0.0, 0.0, 0.0);
    let s = (1.0f64 / 6.0).sqrt();
    let xi = eval_xi(params(), &pt).unwrap();
    let up = eval_upsilon(params(), &pt).unwrap();
    let xi_expect = terms(5, 2, &[(-s, &[2, 0]), (s / 6.0, &[3, 1])]);
    let up_expect = terms(5, 2, &[(-s, &[2, 1]), (-s / 6.0, &[3, 0])]);
    assert!(xi.max_abs_diff(&xi_expect) < 1e-15);
    assert!(up.max_abs_diff(&up_expect) < 1e-15);
}

#[test]
fn xi_upsilon_rotate_under_reeb_shift() {
    for pt in sample_points(&ypq().domain, 3, 50) {
        let mut shifted = pt;
        shifted.psi += FRAC_PI_2;
        let xi_s = eval_xi(params(), &shifted).unwrap();
        let up = eval_upsilon(params(), &pt).unwrap();
        assert!((&xi_s + &up).max_abs() < 1e-14);
    }
}

#[test]
fn base_volume_relations() {
    let pt = ChartPoint::new(FRAC_PI_2, 0.0, 0.0, 0.0, 0.0);
    let dv = eval_base_volume(params(), &pt).unwrap();
    let s = (1.0f64 / 6.0).sqrt();
    assert!(dv.re.max_abs_diff(&terms(4, 2, &[(s, &[0, 2]), (-s / 6.0, &[1, 3])])) < 1e-15);
    let embed = [0, 1, 2, 3];
    for pt in sample_points(&ypq().domain, 4, 100) {
        let dv = eval_base_volume(params(), &pt).unwrap();
        let (re, im) = (dv.re.embed(5, &embed).unwrap(), dv.im.embed(5, &embed).unwrap());
        let (c, s) = (pt.psi.cos(), pt.psi.sin());
        // Ξ + iΥ = e^{iψ′} dV_EK
        let xi = &(&re * c) - &(&im * s);
        let up = &(&im * c) + &(&re * s);
        assert!(eval_xi(params(), &pt).unwrap().max_abs_diff(&xi) < 1e-14);
        assert!(eval_upsilon(params(), &pt).unwrap().max_abs_diff(&up) < 1e-14);
        // (Re + i Im)∧(Re + i Im) = 0
        let rr = &wedge(&dv.re, &dv.re).unwrap() - &wedge(&dv.im, &dv.im).unwrap();
        let ri = wedge(&dv.re, &dv.im).unwrap();
        assert!(rr.max_abs() < 1e-12 && ri.max_abs() < 1e-12);
    }
}

#[test]
fn kahler_cone_identities() {
    let c = cone();
    let lift_eta = FormField::cone_lift(FormField::eta(params()).unwrap()).unwrap();
    for cp in sample_cone_points(&c.domain, 5, 100, 0.5, 2.0) {
        let x = cp.as_array();
        let omega = eval_kahler_cone(params(), &cp).unwrap();
        assert!(omega.max_abs_diff(&lift_eta.eval(&x).unwrap()) < 1e-12);
        let vol = wedge_power(&omega, 3).unwrap().get(&[0, 1, 2, 3, 4, 5]) / 6.0;
        let sqrt_g = c.matrix(&x).unwrap().determinant().sqrt();
        assert!((vol - sqrt_g).abs() < 1e-10 * sqrt_g.max(1.0), "{vol} vs {sqrt_g}");
    }
}

#[test]
fn cone_lift_dr_block_at_unit_radius() {
    let psi = FormField::psi(params()).unwrap();
    for pt in sample_points(&ypq().domain, 6, 20) {
        let cp = ConePoint::new(1.0, pt).unwrap();
        let lift = cone_lift(&psi, &cp).unwrap();
        let base = psi.eval(&pt.as_array()).unwrap();
        for idx in crate::tensor::combinations(5, 3) {
            let shifted: Vec<usize> = std::iter::once(0).chain(idx.iter().map(|i| i + 1)).collect();
            assert!((lift.get(&shifted) - base.get(&idx)).abs() < 1e-15);
        }
    }
}

#[test]
fn sigma_derivative_is_twice_base_kahler_form() {
    let sigma = FormField::sigma(params()).unwrap();
    let base_idx = [1, 2, 3, 4];
    for pt in sample_points(&ypq().domain, 7, 100) {
        let ds = exterior_derivative(&sigma, &pt.as_array()).unwrap().restrict(&[0, 1, 2, 3]);
        let cp = ConePoint::new(1.0, pt).unwrap();
        let omega_ek = eval_kahler_cone(params(), &cp).unwrap().restrict(&base_idx);
        assert!(ds.max_abs_diff(&(&omega_ek * 2.0)) < 1e-10);
    }
}

#[test]
fn complex_volume_squares_to_volume() {
    let c = cone();
    let mut ratios = Vec::new();
    for cp in sample_cone_points(&c.domain, 8, 100, 0.5, 2.0) {
        let dv = eval_complex_volume(params(), &cp).unwrap();
        // dV ∧ dV̄ = −2i Re∧Im
        let top = wedge(&dv.re, &dv.im).unwrap().get(&[0, 1, 2, 3, 4, 5]);
        let sqrt_g = c.matrix(&cp.as_array()).unwrap().determinant().sqrt();
        ratios.push(top / sqrt_g);
    }
    let (lo, hi) = ratios.iter().fold((f64::MAX, f64::MIN), |(l, h), &v| (l.min(v), h.max(v)));
    assert!((hi - lo) / hi.abs() < 1e-9, "{lo} {hi}");
}

#[test]
fn complex_volume_at_zero_phase() {
    let pt = ChartPoint::new(1.0, 0.3, 0.1, 0.7, 0.0);
    let cp = ConePoint::new(1.0, pt).unwrap();
    let dv = eval_complex_volume(params(), &cp).unwrap();
    let base = eval_base_volume(params(), &pt).unwrap();
    let dr = DifferentialForm::basis(6, &[0]).unwrap();
    let eta = eval_eta(params(), &pt).unwrap().embed(6, &[1, 2, 3, 4, 5]).unwrap();
    let (re, im) = (base.re.embed(6, &[1, 2, 3, 4]).unwrap(), base.im.embed(6, &[1, 2, 3, 4]).unwrap());
    let expect = &wedge(&re, &dr).unwrap() - &wedge(&im, &eta).unwrap();
    assert!(dv.re.max_abs_diff(&expect) < 1e-14);
}

#[test]
fn killing_forms_pass_cky_and_are_coclosed() {
    let p = ypq();
    let cat = NamedFormCatalog::new(params()).unwrap();
    for pt in sample_points(&p.domain, 9, 100) {
        let x = pt.as_array();
        for (name, f) in cat.killing_forms() {
            let parts = cky_parts(&p, f, &x).unwrap();
            assert!(parts.residual < 1e-8, "{name} {}", parts.residual);
            assert!(parts.codiff.max_abs() < 1e-9, "{name}");
        }
        for f in [&cat.phi1, &cat.phi2] {
            let parts = cky_parts(&p, f, &x).unwrap();
            assert!(parts.residual < 1e-8 && parts.d.max_abs() < 1e-9);
        }
    }
}

#[test]
fn cky_negative_control() {
    let p = ypq();
    let dy = FormField::Custom(MonomialForm::constant(5, &[2]));
    let worst = sample_points(&p.domain, 10, 20)
        .iter()
        .map(|pt| cky_residual(&p, &dy, &pt.as_array()).unwrap())
        .fold(0.0, f64::max);
    assert!(worst > 1e-3);
}

#[test]
fn special_killing_constants() {
    let p = ypq();
    let cat = NamedFormCatalog::new(params()).unwrap();
    let pts = sample_points(&p.domain, 11, 30);
    for (name, f) in cat.killing_forms() {
        let expected = -(f.degree() as f64 + 1.0);
        for c in [-5.0, -4.0, -3.0, -2.0, 0.0] {
            let worst = pts.iter().map(|pt| sky_residual(&p, f, c, &pt.as_array()).unwrap()).fold(0.0, f64::max);
            if c == expected {
                assert!(worst < 1e-8, "{name} c={c}: {worst}");
            } else {
                assert!(worst > 1e-3, "{name} c={c}: {worst}");
            }
        }
    }
}

#[test]
fn cone_parallel_forms() {
    let c = cone();
    let cat = NamedFormCatalog::new(params()).unwrap();
    let mut fields = vec![cat.omega_cone.clone(), cat.re_dv_cone.clone(), cat.im_dv_cone.clone()];
    for (_, f) in cat.killing_forms() {
        fields.push(FormField::cone_lift(f.clone()).unwrap());
    }
    for cp in sample_cone_points(&c.domain, 12, 50, 0.5, 2.0) {
        for f in &fields {
            let r = parallel_residual(&c, f, &cp.as_array()).unwrap();
            assert!(r < 1e-8, "{} {r}", f.label());
        }
    }
    let control = FormField::Custom(MonomialForm::monomial(6, 0, 1, &[0, 1]));
    let lifted_dy = FormField::cone_lift(FormField::Custom(MonomialForm::constant(5, &[2]))).unwrap();
    let pts = sample_cone_points(&c.domain, 13, 10, 0.5, 2.0);
    for f in [&control, &lifted_dy] {
        let worst = pts.iter().map(|cp| parallel_residual(&c, f, &cp.as_array()).unwrap()).fold(0.0, f64::max);
        assert!(worst > 1e-3);
    }
}

#[test]
fn kahler_cone_is_closed_and_coclosed() {
    let c = cone();
    let omega = FormField::kahler_cone(params()).unwrap();
    for cp in sample_cone_points(&c.domain, 14, 20, 0.5, 2.0) {
        let x = cp.as_array();
        assert!(exterior_derivative(&omega, &x).unwrap().max_abs() < 1e-12);
        assert!(codifferential(&c, &omega, &x).unwrap().max_abs() < 1e-9);
        let jet = MetricJet::<f64>::new(&c, &x, 0).unwrap();
        assert!(jet.g.determinant() > 0.0);
    }
}

#[test]
fn mismatched_dimensions_are_errors() {
    let psi = FormField::psi(params()).unwrap();
    let x = [1.0, 1.0, 0.0, 0.0, 0.0, 0.0];
    assert!(matches!(parallel_residual(&cone(), &psi, &x), Err(Error::DimensionMismatch(5, 6))));
    let cone_form = FormField::kahler_cone(params()).unwrap();
    assert!(FormField::cone_lift(cone_form).is_err());
}
