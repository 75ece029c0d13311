//! Rank-2 Stäckel-Killing tensors built from pairs of Killing forms.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::dual::{Extended, Real, Scalar};
use crate::error::{Error, Result};
use crate::geometry::calculus::transform_slot;
use crate::geometry::curvature::Connection;
use crate::geometry::field::FormField;
use crate::geometry::metric::MetricProvider;
use crate::tensor::{permutations, DifferentialForm};

/// `P_{μν} = Σ_A ω_{μA} σ_ν^A`, the last `p−1` slots of `σ` raised with
/// `raise[s]` (normally all `g⁻¹`).
fn pair_contract<S: Scalar>(
    omega: &DifferentialForm<S>,
    sigma: &DifferentialForm<S>,
    raise: &[&DMatrix<S>],
) -> DMatrix<S> {
    let (n, p) = (omega.dim(), omega.degree());
    let mut s = sigma.data().to_vec();
    for (slot, m) in raise.iter().enumerate() {
        s = transform_slot(&s, n, p, slot + 1, m);
    }
    let m = n.pow(p as u32 - 1);
    let w = omega.data();
    DMatrix::from_fn(n, n, |mu, nu| (0..m).fold(S::zero(), |acc, a| acc + w[mu * m + a] * s[nu * m + a]))
}

fn symmetric_part<S: Scalar>(m: &DMatrix<S>) -> DMatrix<S> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] + m[(j, i)])
}

/// Symmetric covariant 2-tensor with its first partial derivatives.
#[derive(Clone, Debug)]
pub struct SymmetricJet<S = f64> {
    pub value: DMatrix<S>,
    /// `d1[k] = ∂ₖ K`
    pub d1: Vec<DMatrix<S>>,
}

/// A symmetric 2-tensor field on the five-manifold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum SymmetricField {
    /// `K_{μν} = ω_{μA} σ_ν^A + σ_{μA} ω_ν^A`
    Pair { label: String, omega: FormField, sigma: FormField },
    /// The metric itself.
    Metric,
    /// Coordinate identity `δ_{μν}`.
    CoordinateIdentity,
}

impl SymmetricField {
    pub fn label(&self) -> String {
        match self {
            Self::Pair { label, .. } => label.clone(),
            Self::Metric => "g".into(),
            Self::CoordinateIdentity => "delta".into(),
        }
    }

    /// Value and first derivatives; `provider` supplies the metric used
    /// to raise indices.
    pub fn jet<S: Scalar>(&self, provider: &MetricProvider, conn: &Connection<S>, x: &[f64]) -> Result<SymmetricJet<S>> {
        let n = provider.dim();
        let zero = DMatrix::from_element(n, n, S::zero());
        match self {
            Self::Metric => Ok(SymmetricJet { value: conn.jet.g.clone(), d1: conn.jet.dg.clone() }),
            Self::CoordinateIdentity => Ok(SymmetricJet {
                value: DMatrix::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() }),
                d1: vec![zero; n],
            }),
            Self::Pair { omega, sigma, .. } => {
                if omega.degree() != sigma.degree() {
                    return Err(Error::DegreeMismatch(omega.degree(), sigma.degree()));
                }
                let ja = omega.jet::<S>(x, 1)?;
                let jb = sigma.jet::<S>(x, 1)?;
                let gi = &conn.jet.ginv;
                let p = omega.degree();
                let plain = vec![gi; p - 1];
                let value = symmetric_part(&pair_contract(&ja.value, &jb.value, &plain));
                let mut d1 = Vec::with_capacity(n);
                for k in 0..n {
                    let mut terms = vec![
                        pair_contract(&ja.d1[k], &jb.value, &plain),
                        pair_contract(&ja.value, &jb.d1[k], &plain),
                    ];
                    let dgi = conn.jet.dginv(k);
                    for slot in 0..p - 1 {
                        let mut r = plain.clone();
                        r[slot] = &dgi;
                        terms.push(pair_contract(&ja.value, &jb.value, &r));
                    }
                    let dp = DMatrix::from_fn(n, n, |i, j| terms.iter().fold(S::zero(), |acc, t| acc + t[(i, j)]));
                    d1.push(symmetric_part(&dp));
                }
                Ok(SymmetricJet { value, d1 })
            }
        }
    }
}

/// A Stäckel-Killing tensor at a point with the labels of its source forms.
#[derive(Clone, Debug)]
pub struct StackelTensor {
    pub components: DMatrix<f64>,
    pub provenance: (String, String),
}

pub fn stackel_from_pair(
    provider: &MetricProvider,
    omega: &FormField,
    sigma: &FormField,
    x: &[f64],
) -> Result<StackelTensor> {
    if omega.degree() != sigma.degree() {
        return Err(Error::DegreeMismatch(omega.degree(), sigma.degree()));
    }
    if omega.degree() == 0 {
        return Err(Error::ZeroDegree);
    }
    let ginv = crate::geometry::inverse_metric(provider, x)?;
    let (a, b) = (omega.eval(x)?, sigma.eval(x)?);
    let raise = vec![&ginv; a.degree() - 1];
    let pm = pair_contract(&a, &b, &raise);
    Ok(StackelTensor { components: &pm + pm.transpose(), provenance: (omega.label(), sigma.label()) })
}

/// Largest component of `∇_{(λ} K_{μν)}`, evaluated in double-double.
pub fn killing_tensor_residual(provider: &MetricProvider, field: &SymmetricField, x: &[f64]) -> Result<f64> {
    let conn = Connection::<Extended>::compute(provider, x, 1)?;
    let jet = field.jet(provider, &conn, x)?;
    let n = provider.dim();
    let k = &jet.value;
    let gm = &conn.gamma;
    let nabla = |l: usize, m: usize, v: usize| {
        let mut t = jet.d1[l][(m, v)];
        for r in 0..n {
            t -= gm.get(&[r, l, m]) * k[(r, v)] + gm.get(&[r, l, v]) * k[(m, r)];
        }
        t
    };
    let perms = permutations(3);
    let mut worst: f64 = 0.0;
    for l in 0..n {
        for m in l..n {
            for v in m..n {
                let idx = [l, m, v];
                let s = perms
                    .iter()
                    .fold(Extended::zero(), |acc, (pm, _)| acc + nabla(idx[pm[0]], idx[pm[1]], idx[pm[2]]));
                worst = worst.max((s / Extended::cst(6.0)).re().abs());
            }
        }
    }
    Ok(worst)
}
