//! Differential-form fields and their derivative jets.
//!
//! Named forms are evaluated from closed-form expressions with nested dual
//! numbers (up to second derivatives). Derived fields (`Φ_k = (dη)^k`,
//! cone lifts) are assembled from the jets of their ingredients, each
//! exterior derivative consuming one derivative order.

use serde::Serialize;

use crate::chart::YpqParams;
use crate::dual::{seed, seed_first, split, Real, Scalar};
use crate::error::{Error, Result};
use crate::forms::catalog::{NamedForm, Terms};
use crate::geometry::metric::MetricProvider;
use crate::tensor::{wedge, wedge_power, DifferentialForm};

/// Highest derivative order available from a closed-form evaluator.
pub const MAX_PRIMITIVE_ORDER: usize = 2;

/// One term `coef · x_k^n · dx^I` of a [`MonomialForm`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Monomial {
    pub coef: f64,
    pub power_of: Option<(usize, u32)>,
    pub indices: Vec<usize>,
}

/// Polynomial-coefficient form, used for control fields.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonomialForm {
    pub dim: usize,
    pub degree: usize,
    pub terms: Vec<Monomial>,
}

impl MonomialForm {
    /// Constant-coefficient `dx^{i₁} ∧ … ∧ dx^{i_p}`.
    pub fn constant(dim: usize, indices: &[usize]) -> Self {
        Self {
            dim,
            degree: indices.len(),
            terms: vec![Monomial { coef: 1.0, power_of: None, indices: indices.to_vec() }],
        }
    }

    /// `x_k^n dx^{i₁} ∧ … ∧ dx^{i_p}`.
    pub fn monomial(dim: usize, coordinate: usize, power: u32, indices: &[usize]) -> Self {
        Self {
            dim,
            degree: indices.len(),
            terms: vec![Monomial { coef: 1.0, power_of: Some((coordinate, power)), indices: indices.to_vec() }],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum FormField {
    Named(NamedForm, YpqParams),
    /// `(dη)^k`
    Phi(YpqParams, usize),
    /// `ω^C = r^p dr ∧ ω + r^{p+1}/(p+1) dω` on the cone over the five-manifold.
    ConeLift(Box<FormField>),
    /// Riemannian volume form `√det g dx¹ ∧ … ∧ dxⁿ`.
    Volume(MetricProvider),
    Custom(MonomialForm),
}

impl FormField {
    pub fn named(form: NamedForm, params: YpqParams) -> Result<Self> {
        params.require_c1()?;
        Ok(Self::Named(form, params))
    }

    pub fn eta(params: YpqParams) -> Result<Self> {
        Self::named(NamedForm::Eta, params)
    }

    pub fn sigma(params: YpqParams) -> Result<Self> {
        Self::named(NamedForm::Sigma, params)
    }

    pub fn psi(params: YpqParams) -> Result<Self> {
        Self::named(NamedForm::Psi, params)
    }

    pub fn xi(params: YpqParams) -> Result<Self> {
        Self::named(NamedForm::Xi, params)
    }

    pub fn upsilon(params: YpqParams) -> Result<Self> {
        Self::named(NamedForm::Upsilon, params)
    }

    pub fn kahler_cone(params: YpqParams) -> Result<Self> {
        Self::named(NamedForm::KahlerCone, params)
    }

    pub fn re_volume_cone(params: YpqParams) -> Result<Self> {
        Self::named(NamedForm::ReVolumeCone, params)
    }

    pub fn im_volume_cone(params: YpqParams) -> Result<Self> {
        Self::named(NamedForm::ImVolumeCone, params)
    }

    pub fn phi(params: YpqParams, k: usize) -> Result<Self> {
        params.require_c1()?;
        if !(1..=2).contains(&k) {
            return Err(Error::DegreeOverflow(2 * k, 5));
        }
        Ok(Self::Phi(params, k))
    }

    pub fn cone_lift(inner: FormField) -> Result<Self> {
        if inner.dim() != 5 {
            return Err(Error::DimensionMismatch(inner.dim(), 5));
        }
        Ok(Self::ConeLift(Box::new(inner)))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Named(n, _) => n.dim(),
            Self::Phi(..) => 5,
            Self::ConeLift(inner) => inner.dim() + 1,
            Self::Volume(p) => p.dim(),
            Self::Custom(m) => m.dim,
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Self::Named(n, _) => n.degree(),
            Self::Phi(_, k) => 2 * k,
            Self::ConeLift(inner) => inner.degree() + 1,
            Self::Volume(p) => p.dim(),
            Self::Custom(m) => m.degree,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Named(n, _) => n.label().to_string(),
            Self::Phi(_, k) => format!("Phi_{k}"),
            Self::ConeLift(inner) => format!("lift({})", inner.label()),
            Self::Volume(_) => "vol".to_string(),
            Self::Custom(_) => "custom".to_string(),
        }
    }

    /// Highest derivative order this field can provide.
    pub fn max_order(&self) -> usize {
        match self {
            Self::Named(..) | Self::Volume(_) | Self::Custom(_) => MAX_PRIMITIVE_ORDER,
            Self::Phi(..) => MAX_PRIMITIVE_ORDER - 1,
            Self::ConeLift(inner) => inner.max_order().saturating_sub(1),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<DifferentialForm> {
        Ok(self.jet::<f64>(x, 0)?.value)
    }

    /// Value and partial derivatives up to `order` at `x`, in scalar type `S`.
    pub fn jet<S: Scalar>(&self, x: &[f64], order: usize) -> Result<FormJet<S>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(x.len(), self.dim()));
        }
        if order > self.max_order() {
            return Err(Error::DerivativeOrder { field: self.label(), available: self.max_order(), requested: order });
        }
        match self {
            Self::Named(n, prm) => primitive_jet(&Primitive::Named(*n, prm.a), x, order),
            Self::Volume(p) => primitive_jet(&Primitive::Volume(p), x, order),
            Self::Custom(m) => primitive_jet(&Primitive::Monomial(m), x, order),
            Self::Phi(prm, k) => {
                let deta = FormField::Named(NamedForm::Eta, *prm).jet::<S>(x, order + 1)?.exterior_derivative()?;
                let mut acc = deta.clone();
                for _ in 1..*k {
                    acc = acc.wedge(&deta)?;
                }
                Ok(acc)
            }
            Self::ConeLift(inner) => cone_lift_jet(inner, x, order),
        }
    }
}

enum Primitive<'a> {
    Named(NamedForm, f64),
    Volume(&'a MetricProvider),
    Monomial(&'a MonomialForm),
}

impl Primitive<'_> {
    fn dim(&self) -> usize {
        match self {
            Self::Named(n, _) => n.dim(),
            Self::Volume(p) => p.dim(),
            Self::Monomial(m) => m.dim,
        }
    }

    fn degree(&self) -> usize {
        match self {
            Self::Named(n, _) => n.degree(),
            Self::Volume(p) => p.dim(),
            Self::Monomial(m) => m.degree,
        }
    }

    fn terms<S: Real>(&self, x: &[S]) -> Terms<S> {
        match self {
            Self::Named(n, a) => n.terms(*a, x),
            Self::Volume(p) => {
                let n = p.dim();
                vec![(sqrt_det(p.components(x), n), (0..n).collect())]
            }
            Self::Monomial(m) => m
                .terms
                .iter()
                .map(|t| {
                    let c = match t.power_of {
                        Some((k, pw)) => x[k].powi(pw).scale(t.coef),
                        None => S::cst(t.coef),
                    };
                    (c, t.indices.clone())
                })
                .collect(),
        }
    }
}

/// `√det` of a symmetric positive-definite matrix by unpivoted elimination.
fn sqrt_det<S: Real>(mut m: Vec<S>, n: usize) -> S {
    let mut det = S::one();
    for k in 0..n {
        let piv = m[k * n + k];
        det = det * piv;
        for i in k + 1..n {
            let f = m[i * n + k] / piv;
            for j in k..n {
                m[i * n + j] = m[i * n + j] - f * m[k * n + j];
            }
        }
    }
    det.sqrt()
}

fn form_from<T: Real, S: Scalar>(
    dim: usize,
    degree: usize,
    terms: &Terms<T>,
    part: impl Fn(&T) -> S,
) -> Result<DifferentialForm<S>> {
    DifferentialForm::from_terms(dim, degree, terms.iter().map(|(c, i)| (part(c), i.as_slice())))
}

fn primitive_jet<S: Scalar>(prim: &Primitive<'_>, x: &[f64], order: usize) -> Result<FormJet<S>> {
    let (n, deg) = (prim.dim(), prim.degree());
    let xs: Vec<S> = x.iter().map(|&v| S::cst(v)).collect();
    let value = form_from(n, deg, &prim.terms(&xs), |c| *c)?;
    let mut d1 = Vec::new();
    let mut d2 = Vec::new();
    if order == 1 {
        for k in 0..n {
            d1.push(form_from(n, deg, &prim.terms(&seed_first::<S>(x, k)), |c| c.d)?);
        }
    } else if order >= 2 {
        d1 = vec![DifferentialForm::zero(n, deg); n];
        d2 = vec![vec![DifferentialForm::zero(n, deg); n]; n];
        for i in 0..n {
            for j in i..n {
                let t = prim.terms(&seed::<S>(x, i, j));
                if i == j {
                    d1[i] = form_from(n, deg, &t, |c| split(c).1)?;
                }
                let dij = form_from(n, deg, &t, |c| split(c).3)?;
                d2[j][i] = dij.clone();
                d2[i][j] = dij;
            }
        }
    }
    Ok(FormJet { value, d1, d2 })
}

/// A form with its first (and possibly second) coordinate partials.
#[derive(Clone, Debug)]
pub struct FormJet<S = f64> {
    pub value: DifferentialForm<S>,
    /// `d1[k] = ∂ₖω`; empty at order 0
    pub d1: Vec<DifferentialForm<S>>,
    /// `d2[k][l] = ∂ₖ∂ₗω`; empty below order 2
    pub d2: Vec<Vec<DifferentialForm<S>>>,
}

/// `(dω)_I = Σ_k (−1)^k ∂_{i_k} ω_{I∖i_k}` on sorted `I`, from the partials.
pub fn d_from_partials<S: Scalar>(partials: &[DifferentialForm<S>]) -> Result<DifferentialForm<S>> {
    let (n, p) = (partials[0].dim(), partials[0].degree());
    if p + 1 > n {
        return Err(Error::DegreeOverflow(p + 1, n));
    }
    let mut rest = vec![0; p];
    Ok(DifferentialForm::from_sorted(n, p + 1, |idx| {
        let mut acc = S::zero();
        for k in 0..=p {
            let mut w = 0;
            for (m, &i) in idx.iter().enumerate() {
                if m != k {
                    rest[w] = i;
                    w += 1;
                }
            }
            let term = partials[idx[k]].get(&rest);
            acc += if k % 2 == 0 { term } else { -term };
        }
        acc
    }))
}

impl<S: Scalar> FormJet<S> {
    pub fn order(&self) -> usize {
        if !self.d2.is_empty() {
            2
        } else if !self.d1.is_empty() {
            1
        } else {
            0
        }
    }

    pub fn dim(&self) -> usize {
        self.value.dim()
    }

    pub fn degree(&self) -> usize {
        self.value.degree()
    }

    /// Jet of `dω`, one order lower.
    pub fn exterior_derivative(&self) -> Result<FormJet<S>> {
        if self.order() == 0 {
            return Err(Error::DerivativeOrder { field: "jet".into(), available: 0, requested: 1 });
        }
        let value = d_from_partials(&self.d1)?;
        let d1 = self
            .d2
            .iter()
            .map(|row| d_from_partials(row))
            .collect::<Result<Vec<_>>>()?;
        Ok(FormJet { value, d1, d2: Vec::new() })
    }

    /// Leibniz rule; the result carries the lower of the two orders.
    pub fn wedge(&self, other: &FormJet<S>) -> Result<FormJet<S>> {
        let order = self.order().min(other.order());
        let value = wedge(&self.value, &other.value)?;
        let n = self.dim();
        let mut d1 = Vec::new();
        let mut d2 = Vec::new();
        if order >= 1 {
            for k in 0..n {
                d1.push(&wedge(&self.d1[k], &other.value)? + &wedge(&self.value, &other.d1[k])?);
            }
        }
        if order >= 2 {
            for k in 0..n {
                let mut row = Vec::with_capacity(n);
                for l in 0..n {
                    let a = &wedge(&self.d2[k][l], &other.value)? + &wedge(&self.d1[k], &other.d1[l])?;
                    let b = &wedge(&self.d1[l], &other.d1[k])? + &wedge(&self.value, &other.d2[k][l])?;
                    row.push(&a + &b);
                }
                d2.push(row);
            }
        }
        Ok(FormJet { value, d1, d2 })
    }

    /// Truncates to a lower order.
    pub fn truncate(mut self, order: usize) -> Self {
        if order < 2 {
            self.d2.clear();
        }
        if order < 1 {
            self.d1.clear();
        }
        self
    }
}

/// Embeds a five-manifold form into the cone chart (index shift by one).
fn to_cone<S: Scalar>(w: &DifferentialForm<S>) -> Result<DifferentialForm<S>> {
    w.embed(6, &[1, 2, 3, 4, 5])
}

fn cone_lift_jet<S: Scalar>(inner: &FormField, x: &[f64], order: usize) -> Result<FormJet<S>> {
    let r = S::cst(x[0]);
    let base = inner.jet::<S>(&x[1..], order + 1)?;
    let dbase = base.exterior_derivative()?;
    // degrees of lifted fields are at least one
    let p = inner.degree() as u32;
    let dr = DifferentialForm::basis(6, &[0])?;
    let a_part = |w: &DifferentialForm<S>| -> Result<DifferentialForm<S>> { wedge(&dr, &to_cone(w)?) };
    // radial factors r^p and r^{p+1}/(p+1) with their r-derivatives
    let pf = S::cst(p as f64);
    let f = [r.powi(p), pf * r.powi(p - 1)];
    let h = [r.powi(p + 1) / (pf + S::one()), r.powi(p)];
    let combine =
        |fa: S, a: &DifferentialForm<S>, hb: S, b: &DifferentialForm<S>| &a.scale_by(fa) + &b.scale_by(hb);

    let a0 = a_part(&base.value)?;
    let b0 = to_cone(&dbase.value)?;
    let value = combine(f[0], &a0, h[0], &b0);
    let mut d1 = Vec::new();
    if order >= 1 {
        let ai: Vec<_> = base.d1.iter().map(&a_part).collect::<Result<_>>()?;
        let bi: Vec<_> = dbase.d1.iter().map(to_cone).collect::<Result<_>>()?;
        d1.push(combine(f[1], &a0, h[1], &b0));
        for k in 0..5 {
            d1.push(combine(f[0], &ai[k], h[0], &bi[k]));
        }
    }
    Ok(FormJet { value, d1, d2: Vec::new() })
}

pub fn exterior_derivative(field: &FormField, x: &[f64]) -> Result<DifferentialForm> {
    Ok(field.jet::<f64>(x, 1)?.exterior_derivative()?.value)
}

/// `(dη)^k` computed from an already evaluated `dη`.
pub fn phi_from_deta(deta: &DifferentialForm, k: usize) -> Result<DifferentialForm> {
    wedge_power(deta, k)
}
