//! Covariant derivatives, codifferential, Hodge star and musical maps.

use nalgebra::DMatrix;

use crate::dual::Scalar;
use crate::error::{Error, Result};
use crate::geometry::curvature::Connection;
use crate::geometry::field::{FormField, FormJet};
use crate::geometry::metric::{MetricJet, MetricProvider};
use crate::tensor::{combinations, permutation_sign, DifferentialForm, Tensor, Valence};

/// `(∇ω)_{λ;μ₁..μ_p} = ∂_λ ω_{μ₁..μ_p} − Σ_i Γ^ρ_{λμ_i} ω_{..ρ..}`, slots `[λ, μ₁, …]`.
pub fn covariant_derivative_from<S: Scalar>(conn: &Connection<S>, jet: &FormJet<S>) -> Result<Tensor<S>> {
    let n = conn.dim();
    if jet.dim() != n {
        return Err(Error::DimensionMismatch(jet.dim(), n));
    }
    if jet.order() == 0 {
        return Err(Error::DerivativeOrder { field: "jet".into(), available: 0, requested: 1 });
    }
    let p = jet.degree();
    let gm = &conn.gamma;
    let w = &jet.value;
    let mut buf = vec![0; p];
    Ok(Tensor::from_fn(n, vec![Valence::Down; p + 1], |idx| {
        let (l, mu) = (idx[0], &idx[1..]);
        let mut v = jet.d1[l].get(mu);
        for i in 0..p {
            buf.copy_from_slice(mu);
            for r in 0..n {
                let c = gm.get(&[r, l, mu[i]]);
                if c != S::zero() {
                    buf[i] = r;
                    v -= c * w.get(&buf);
                }
            }
        }
        v
    }))
}

pub fn covariant_derivative_form(provider: &MetricProvider, field: &FormField, x: &[f64]) -> Result<Tensor> {
    provider.check_point(x)?;
    let conn = Connection::new(provider, x, 1)?;
    covariant_derivative_from(&conn, &field.jet(x, 1)?)
}

/// `(d*ω)_{μ₂..μ_p} = −g^{λκ} (∇ω)_{λ;κμ₂..μ_p}`.
pub fn codifferential_from<S: Scalar>(ginv: &DMatrix<S>, nabla: &Tensor<S>) -> Result<DifferentialForm<S>> {
    let n = nabla.dim();
    let p = nabla.rank() - 1;
    if p == 0 {
        return Err(Error::ZeroDegree);
    }
    let mut buf = vec![0; p + 1];
    Ok(DifferentialForm::from_sorted(n, p - 1, |rest| {
        buf[2..].copy_from_slice(rest);
        let mut v = S::zero();
        for l in 0..n {
            for k in 0..n {
                let gi = ginv[(l, k)];
                if gi != S::zero() {
                    buf[0] = l;
                    buf[1] = k;
                    v -= gi * nabla.get(&buf);
                }
            }
        }
        v
    }))
}

pub fn codifferential(provider: &MetricProvider, field: &FormField, x: &[f64]) -> Result<DifferentialForm> {
    provider.check_point(x)?;
    let conn = Connection::new(provider, x, 1)?;
    let nabla = covariant_derivative_from(&conn, &field.jet(x, 1)?)?;
    codifferential_from(&conn.jet.ginv, &nabla)
}

/// Applies `m` to one slot of a dense `dim^rank` array.
pub(crate) fn transform_slot<S: Scalar>(data: &[S], dim: usize, rank: usize, slot: usize, m: &DMatrix<S>) -> Vec<S> {
    let stride = dim.pow((rank - 1 - slot) as u32);
    let mut out = vec![S::zero(); data.len()];
    for (o, val) in out.iter_mut().enumerate() {
        let i = (o / stride) % dim;
        let base = o - i * stride;
        let mut acc = S::zero();
        for k in 0..dim {
            acc += m[(i, k)] * data[base + k * stride];
        }
        *val = acc;
    }
    out
}

/// All indices of `ω` raised with `g⁻¹`.
pub fn raise_all<S: Scalar>(ginv: &DMatrix<S>, omega: &DifferentialForm<S>) -> Tensor<S> {
    let (n, p) = (omega.dim(), omega.degree());
    let mut data = omega.data().to_vec();
    for s in 0..p {
        data = transform_slot(&data, n, p, s, ginv);
    }
    Tensor::from_data(n, vec![Valence::Up; p], data).expect("size preserved")
}

/// `(⋆ω)_J = √det g · Σ_{I sorted} ε_{IJ} ω^I`, orientation by coordinate order.
pub fn hodge_star_with(g: &DMatrix<f64>, ginv: &DMatrix<f64>, omega: &DifferentialForm) -> DifferentialForm {
    let (n, p) = (omega.dim(), omega.degree());
    let sqrt_g = g.determinant().sqrt();
    let up = raise_all(ginv, omega);
    let mut full = vec![0; n];
    DifferentialForm::from_sorted(n, n - p, |j| {
        let comp: Vec<usize> = (0..n).filter(|i| !j.contains(i)).collect();
        full[..p].copy_from_slice(&comp);
        full[p..].copy_from_slice(j);
        sqrt_g * permutation_sign(&full) as f64 * up.get(&comp)
    })
}

pub fn hodge_star(provider: &MetricProvider, omega: &DifferentialForm, x: &[f64]) -> Result<DifferentialForm> {
    if omega.dim() != provider.dim() {
        return Err(Error::DimensionMismatch(omega.dim(), provider.dim()));
    }
    provider.check_point(x)?;
    let jet = MetricJet::<f64>::new(provider, x, 0)?;
    Ok(hodge_star_with(&jet.g, &jet.ginv, omega))
}

/// `v♭ = g_{μν} v^ν dx^μ`.
pub fn flat_with<S: Scalar>(g: &DMatrix<S>, v: &[S]) -> DifferentialForm<S> {
    DifferentialForm::from_sorted(g.nrows(), 1, |i| (0..v.len()).fold(S::zero(), |acc, k| acc + g[(i[0], k)] * v[k]))
}

/// `ω♯ = g^{μν} ω_ν ∂_μ`.
pub fn sharp_with<S: Scalar>(ginv: &DMatrix<S>, omega: &DifferentialForm<S>) -> Vec<S> {
    let n = ginv.nrows();
    (0..n).map(|i| (0..n).fold(S::zero(), |acc, k| acc + ginv[(i, k)] * omega.get(&[k]))).collect()
}

pub fn flat(provider: &MetricProvider, v: &[f64], x: &[f64]) -> Result<DifferentialForm> {
    if v.len() != provider.dim() {
        return Err(Error::DimensionMismatch(v.len(), provider.dim()));
    }
    Ok(flat_with(&provider.matrix(x)?, v))
}

pub fn sharp(provider: &MetricProvider, omega: &DifferentialForm, x: &[f64]) -> Result<Vec<f64>> {
    if omega.dim() != provider.dim() {
        return Err(Error::DimensionMismatch(omega.dim(), provider.dim()));
    }
    if omega.degree() != 1 {
        return Err(Error::DegreeMismatch(omega.degree(), 1));
    }
    provider.check_point(x)?;
    Ok(sharp_with(&MetricJet::<f64>::new(provider, x, 0)?.ginv, omega))
}

/// Sorted index tuples of a given length, re-exported for callers building forms.
pub fn sorted_indices(n: usize, p: usize) -> Vec<Vec<usize>> {
    combinations(n, p)
}
