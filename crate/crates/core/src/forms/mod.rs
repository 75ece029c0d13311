//! The named Killing forms of Y(p,q) and its cone, the cone lift, and the
//! conformal Killing-Yano, special Killing and parallel residual checks.

pub mod catalog;

use serde::Serialize;

use crate::chart::{ChartPoint, ConePoint, YpqParams};
use crate::dual::{Extended, Real};
use crate::error::{Error, Result};
use crate::geometry::calculus::{codifferential_from, covariant_derivative_from, flat_with};
use crate::geometry::curvature::Connection;
use crate::geometry::field::FormField;
use crate::geometry::metric::MetricProvider;
use crate::tensor::{interior_product, wedge, DifferentialForm, Tensor};

pub use catalog::NamedForm;

fn eval_named(form: NamedForm, params: YpqParams, x: &[f64]) -> Result<DifferentialForm> {
    FormField::named(form, params)?.eval(x)
}

pub fn eval_eta(params: YpqParams, pt: &ChartPoint) -> Result<DifferentialForm> {
    eval_named(NamedForm::Eta, params, &pt.as_array())
}

pub fn eval_sigma(params: YpqParams, pt: &ChartPoint) -> Result<DifferentialForm> {
    eval_named(NamedForm::Sigma, params, &pt.as_array())
}

pub fn eval_psi(params: YpqParams, pt: &ChartPoint) -> Result<DifferentialForm> {
    eval_named(NamedForm::Psi, params, &pt.as_array())
}

/// `Φ_k = (dη)^k`, `k ∈ {1, 2}`.
pub fn eval_phi_k(params: YpqParams, pt: &ChartPoint, k: usize) -> Result<DifferentialForm> {
    FormField::phi(params, k)?.eval(&pt.as_array())
}

pub fn eval_xi(params: YpqParams, pt: &ChartPoint) -> Result<DifferentialForm> {
    eval_named(NamedForm::Xi, params, &pt.as_array())
}

pub fn eval_upsilon(params: YpqParams, pt: &ChartPoint) -> Result<DifferentialForm> {
    eval_named(NamedForm::Upsilon, params, &pt.as_array())
}

/// A complex form stored as its real and imaginary parts.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexForm {
    pub re: DifferentialForm,
    pub im: DifferentialForm,
}

/// Holomorphic (2,0)-form of the Kähler-Einstein base on `(θ, φ, y, β)`.
pub fn eval_base_volume(params: YpqParams, pt: &ChartPoint) -> Result<ComplexForm> {
    params.require_c1()?;
    let x = pt.as_array();
    let (re, im) = catalog::base_volume(params.a, &x[..4]);
    let build = |t: &catalog::Terms<f64>| DifferentialForm::from_terms(4, 2, t.iter().map(|(c, i)| (*c, i.as_slice())));
    Ok(ComplexForm { re: build(&re)?, im: build(&im)? })
}

pub fn eval_kahler_cone(params: YpqParams, cpt: &ConePoint) -> Result<DifferentialForm> {
    eval_named(NamedForm::KahlerCone, params, &cpt.as_array())
}

/// `dV_cone = e^{iψ′} r² dV_EK ∧ (dr + i r η)`.
pub fn eval_complex_volume(params: YpqParams, cpt: &ConePoint) -> Result<ComplexForm> {
    let x = cpt.as_array();
    Ok(ComplexForm {
        re: eval_named(NamedForm::ReVolumeCone, params, &x)?,
        im: eval_named(NamedForm::ImVolumeCone, params, &x)?,
    })
}

pub fn cone_lift(field: &FormField, cpt: &ConePoint) -> Result<DifferentialForm> {
    FormField::cone_lift(field.clone())?.eval(&cpt.as_array())
}

/// The named form fields bound to one parameter set.
#[derive(Clone, Debug, Serialize)]
pub struct NamedFormCatalog {
    pub params: YpqParams,
    pub eta: FormField,
    pub sigma: FormField,
    pub psi: FormField,
    pub phi1: FormField,
    pub phi2: FormField,
    pub xi: FormField,
    pub upsilon: FormField,
    pub omega_cone: FormField,
    pub re_dv_cone: FormField,
    pub im_dv_cone: FormField,
}

impl NamedFormCatalog {
    pub fn new(params: YpqParams) -> Result<Self> {
        Ok(Self {
            params,
            eta: FormField::eta(params)?,
            sigma: FormField::sigma(params)?,
            psi: FormField::psi(params)?,
            phi1: FormField::phi(params, 1)?,
            phi2: FormField::phi(params, 2)?,
            xi: FormField::xi(params)?,
            upsilon: FormField::upsilon(params)?,
            omega_cone: FormField::kahler_cone(params)?,
            re_dv_cone: FormField::re_volume_cone(params)?,
            im_dv_cone: FormField::im_volume_cone(params)?,
        })
    }

    /// Killing forms of the five-manifold, by label.
    pub fn killing_forms(&self) -> [(&'static str, &FormField); 3] {
        [("Psi", &self.psi), ("Xi", &self.xi), ("Upsilon", &self.upsilon)]
    }
}

fn check_field(provider: &MetricProvider, field: &FormField, x: &[f64]) -> Result<()> {
    if field.dim() != provider.dim() {
        return Err(Error::DimensionMismatch(field.dim(), provider.dim()));
    }
    provider.check_point(x)
}

fn unit(n: usize, k: usize) -> Vec<Extended> {
    (0..n).map(|i| if i == k { Extended::one() } else { Extended::zero() }).collect()
}

/// The `k`-th direction slice `(∇_k ω)_{μ…}` of a covariant derivative.
fn direction_slice(nabla: &Tensor<Extended>, k: usize, degree: usize) -> DifferentialForm<Extended> {
    let n = nabla.dim();
    let mut idx = vec![k; degree + 1];
    DifferentialForm::from_sorted(n, degree, |mu| {
        idx[1..].copy_from_slice(mu);
        nabla.get(&idx)
    })
}

/// Per-direction terms of the conformal Killing-Yano equation.
///
/// The residual checks in this module evaluate in double-double arithmetic
/// and report `f64`; the ingredients are rounded to `f64` for inspection.
#[derive(Clone, Debug)]
pub struct CkyParts {
    pub nabla: Tensor,
    pub d: DifferentialForm,
    pub codiff: DifferentialForm,
    pub residual: f64,
}

/// `max_k ‖∇_k ω − 1/(p+1) e_k ⌟ dω + 1/(n−p+1) e_k♭ ∧ d*ω‖_max`, with the
/// ingredients `∇ω`, `dω`, `d*ω`.
pub fn cky_parts(provider: &MetricProvider, field: &FormField, x: &[f64]) -> Result<CkyParts> {
    check_field(provider, field, x)?;
    let (n, p) = (field.dim(), field.degree());
    if p == 0 {
        return Err(Error::ZeroDegree);
    }
    let conn = Connection::<Extended>::compute(provider, x, 1)?;
    let jet = field.jet::<Extended>(x, 1)?;
    let nabla = covariant_derivative_from(&conn, &jet)?;
    let d = jet.exterior_derivative()?.value;
    let codiff = codifferential_from(&conn.jet.ginv, &nabla)?;
    let contr_div = Extended::cst((p + 1) as f64);
    let wedge_div = Extended::cst((n - p + 1) as f64);
    let mut residual: f64 = 0.0;
    for k in 0..n {
        let e = unit(n, k);
        let ek_flat = flat_with(&conn.jet.g, &e);
        let contr = if p < n {
            interior_product(&e, &d)?.scale_by(Extended::one() / contr_div)
        } else {
            DifferentialForm::zero(n, p)
        };
        let wed = wedge(&ek_flat, &codiff)?.scale_by(Extended::one() / wedge_div);
        let lhs = direction_slice(&nabla, k, p);
        residual = residual.max((&(&lhs - &contr) + &wed).max_abs());
    }
    Ok(CkyParts { nabla: nabla.lower(), d: d.lower(), codiff: codiff.lower(), residual })
}

pub fn cky_residual(provider: &MetricProvider, field: &FormField, x: &[f64]) -> Result<f64> {
    Ok(cky_parts(provider, field, x)?.residual)
}

/// `max_k ‖∇_k(dω) − c · e_k♭ ∧ ω‖_max`.
pub fn sky_residual(provider: &MetricProvider, field: &FormField, c: f64, x: &[f64]) -> Result<f64> {
    check_field(provider, field, x)?;
    let n = field.dim();
    let conn = Connection::<Extended>::compute(provider, x, 1)?;
    let jet = field.jet::<Extended>(x, 2)?;
    let dj = jet.exterior_derivative()?;
    let nabla = covariant_derivative_from(&conn, &dj)?;
    let q = dj.degree();
    let mut residual: f64 = 0.0;
    for k in 0..n {
        let rhs = &wedge(&flat_with(&conn.jet.g, &unit(n, k)), &jet.value)? * c;
        let lhs = direction_slice(&nabla, k, q);
        residual = residual.max((&lhs - &rhs).max_abs());
    }
    Ok(residual)
}

/// `max|∇ω|` on the cone.
pub fn parallel_residual(provider: &MetricProvider, field: &FormField, x: &[f64]) -> Result<f64> {
    check_field(provider, field, x)?;
    let conn = Connection::<Extended>::compute(provider, x, 1)?;
    Ok(covariant_derivative_from(&conn, &field.jet::<Extended>(x, 1)?)?.max_abs())
}

/// `max|dσ − 2Ω_EK|` on the four base directions.
pub fn sigma_kahler_defect(params: YpqParams, pt: &ChartPoint) -> Result<f64> {
    let base = [0, 1, 2, 3];
    let ds = crate::geometry::exterior_derivative(&FormField::sigma(params)?, &pt.as_array())?.restrict(&base);
    let omega_ek = eval_kahler_cone(params, &ConePoint::new(1.0, *pt)?)?.restrict(&[1, 2, 3, 4]);
    Ok(ds.max_abs_diff(&(&omega_ek * 2.0)))
}

/// `max|Ψ − η∧dη|`.
pub fn psi_structure_defect(params: YpqParams, pt: &ChartPoint) -> Result<f64> {
    let x = pt.as_array();
    let eta = FormField::eta(params)?;
    let expect = wedge(&eta.eval(&x)?, &crate::geometry::exterior_derivative(&eta, &x)?)?;
    Ok(eval_psi(params, pt)?.max_abs_diff(&expect))
}

/// `max|cone_lift(η) − Ω_cone|`.
pub fn lift_eta_defect(params: YpqParams, cpt: &ConePoint) -> Result<f64> {
    Ok(cone_lift(&FormField::eta(params)?, cpt)?.max_abs_diff(&eval_kahler_cone(params, cpt)?))
}

fn cone_sqrt_det(params: YpqParams, cpt: &ConePoint) -> Result<f64> {
    Ok(crate::geometry::metric_cone(params, cpt)?.determinant().sqrt())
}

/// `|Ω³/3! − vol| / max(1, vol)` with `vol = √g` of the cone.
pub fn kahler_volume_defect(params: YpqParams, cpt: &ConePoint) -> Result<f64> {
    let top = crate::tensor::wedge_power(&eval_kahler_cone(params, cpt)?, 3)?.get(&[0, 1, 2, 3, 4, 5]) / 6.0;
    let vol = cone_sqrt_det(params, cpt)?;
    Ok((top - vol).abs() / vol.max(1.0))
}

/// `Re dV ∧ Im dV / √g`; `dV ∧ dV̄ = −2i Re dV ∧ Im dV`, so a constant ratio
/// means `dV ∧ dV̄` is a fixed multiple of the volume form.
pub fn complex_volume_ratio(params: YpqParams, cpt: &ConePoint) -> Result<f64> {
    let dv = eval_complex_volume(params, cpt)?;
    let top = wedge(&dv.re, &dv.im)?.get(&[0, 1, 2, 3, 4, 5]);
    Ok(top / cone_sqrt_det(params, cpt)?)
}

/// `(max − min) / max|·|` of a sample of ratios.
pub fn relative_spread(ratios: &[f64]) -> f64 {
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    (hi - lo) / lo.abs().max(hi.abs())
}

#[cfg(test)]
mod tests;
