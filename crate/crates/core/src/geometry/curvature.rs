//! Levi-Civita connection and curvature from exact metric derivatives.
//!
//! Conventions:
//! `Γ^λ_{μν} = ½ g^{λρ}(∂_μ g_{ρν} + ∂_ν g_{ρμ} − ∂_ρ g_{μν})`,
//! `R^ρ_{σμν} = ∂_μ Γ^ρ_{νσ} − ∂_ν Γ^ρ_{μσ} + Γ^ρ_{μλ}Γ^λ_{νσ} − Γ^ρ_{νλ}Γ^λ_{μσ}`,
//! `Ric_{σν} = R^ρ_{σρν}`.

use crate::dual::{Extended, Real, Scalar};
use crate::error::Result;
use crate::geometry::metric::{MetricJet, MetricKind, MetricProvider};
use crate::tensor::{contract, Tensor, Valence};

use Valence::{Down, Up};

/// Christoffel symbols of the first kind, `[ρ, μ, ν]`, from a metric jet.
fn first_kind<S: Scalar>(jet: &MetricJet<S>) -> Tensor<S> {
    let two = S::cst(2.0);
    Tensor::from_fn(jet.dim(), vec![Down; 3], |i| {
        let (r, m, n) = (i[0], i[1], i[2]);
        (jet.dg[m][(r, n)] + jet.dg[n][(r, m)] - jet.dg[r][(m, n)]) / two
    })
}

fn raise_first<S: Scalar>(ginv: &nalgebra::DMatrix<S>, low: &Tensor<S>) -> Tensor<S> {
    let n = low.dim();
    Tensor::from_fn(n, vec![Up, Down, Down], |i| {
        (0..n).fold(S::zero(), |acc, r| acc + ginv[(i[0], r)] * low.get(&[r, i[1], i[2]]))
    })
}

/// Connection coefficients at a point, with their first derivatives when
/// the jet carries second metric derivatives.
#[derive(Clone, Debug)]
pub struct Connection<S = f64> {
    pub jet: MetricJet<S>,
    /// `Γ^λ_{μν}`, slots `[λ, μ, ν]`
    pub gamma: Tensor<S>,
    /// `∂_σ Γ^λ_{μν}`, slots `[σ, λ, μ, ν]`
    pub dgamma: Option<Tensor<S>>,
}

impl<S: Scalar> Connection<S> {
    pub fn from_jet(jet: MetricJet<S>) -> Self {
        let n = jet.dim();
        let two = S::cst(2.0);
        let low = first_kind(&jet);
        let gamma = raise_first(&jet.ginv, &low);
        let dgamma = (!jet.d2g.is_empty()).then(|| {
            let dlow: Vec<Tensor<S>> = (0..n)
                .map(|s| {
                    Tensor::from_fn(n, vec![Down; 3], |i| {
                        let (r, m, nu) = (i[0], i[1], i[2]);
                        (jet.d2g[s][m][(r, nu)] + jet.d2g[s][nu][(r, m)] - jet.d2g[s][r][(m, nu)]) / two
                    })
                })
                .collect();
            let dginv: Vec<_> = (0..n).map(|s| jet.dginv(s)).collect();
            Tensor::from_fn(n, vec![Down, Up, Down, Down], |i| {
                let (s, l, m, nu) = (i[0], i[1], i[2], i[3]);
                (0..n).fold(S::zero(), |acc, r| {
                    acc + dginv[s][(l, r)] * low.get(&[r, m, nu]) + jet.ginv[(l, r)] * dlow[s].get(&[r, m, nu])
                })
            })
        });
        Self { jet, gamma, dgamma }
    }

    /// Connection in scalar type `S` at a point of `provider`.
    pub fn compute(provider: &MetricProvider, x: &[f64], order: usize) -> Result<Self> {
        Ok(Self::from_jet(MetricJet::new(provider, x, order)?))
    }

    pub fn dim(&self) -> usize {
        self.jet.dim()
    }
}

impl Connection {
    /// `f64` connection at a point of `provider`.
    pub fn new(provider: &MetricProvider, x: &[f64], order: usize) -> Result<Self> {
        Self::compute(provider, x, order)
    }
}

pub fn christoffel(provider: &MetricProvider, x: &[f64]) -> Result<Tensor> {
    Ok(Connection::new(provider, x, 1)?.gamma)
}

/// Largest component of `∂_λ g_{μν} − Γ^ρ_{λμ} g_{ρν} − Γ^ρ_{λν} g_{μρ}`.
pub fn metric_compatibility_defect<S: Scalar>(conn: &Connection<S>) -> f64 {
    let n = conn.dim();
    let (g, gm) = (&conn.jet.g, &conn.gamma);
    let t = Tensor::from_fn(n, vec![Down; 3], |i| {
        let (l, m, nu) = (i[0], i[1], i[2]);
        let corr = (0..n).fold(S::zero(), |acc, r| {
            acc + gm.get(&[r, l, m]) * g[(r, nu)] + gm.get(&[r, l, nu]) * g[(m, r)]
        });
        conn.jet.dg[l][(m, nu)] - corr
    });
    t.max_abs()
}

pub fn riemann_from<S: Scalar>(conn: &Connection<S>) -> Tensor<S> {
    let n = conn.dim();
    let gm = &conn.gamma;
    let dg = conn.dgamma.as_ref().expect("connection built without second derivatives");
    Tensor::from_fn(n, vec![Up, Down, Down, Down], |i| {
        let (r, s, m, nu) = (i[0], i[1], i[2], i[3]);
        let mut v = dg.get(&[m, r, nu, s]) - dg.get(&[nu, r, m, s]);
        for l in 0..n {
            v += gm.get(&[r, m, l]) * gm.get(&[l, nu, s]) - gm.get(&[r, nu, l]) * gm.get(&[l, m, s]);
        }
        v
    })
}

pub fn riemann(provider: &MetricProvider, x: &[f64]) -> Result<Tensor> {
    Ok(riemann_from(&Connection::new(provider, x, 2)?))
}

pub fn ricci_from_riemann<S: Scalar>(riem: &Tensor<S>) -> Tensor<S> {
    // R^ρ_{σρν}: contract slot 0 (up) with slot 2 (down)
    contract(riem, 0, 2).expect("riemann has an up slot 0 and down slot 2")
}

pub fn ricci(provider: &MetricProvider, x: &[f64]) -> Result<Tensor> {
    Ok(ricci_from_riemann(&riemann(provider, x)?))
}

/// `max|Ric − 4g|` on the five-manifold, `max|Ric|` on the cone.
///
/// Evaluated in double-double: near the poles the coordinate components of
/// the curvature carry `f64` round-off of order `ε / sin⁴θ`.
pub fn einstein_residual(provider: &MetricProvider, x: &[f64]) -> Result<f64> {
    let conn = Connection::<Extended>::compute(provider, x, 2)?;
    let ric = ricci_from_riemann(&riemann_from(&conn));
    let n = provider.dim();
    let einstein = Extended::cst(match provider.kind {
        MetricKind::Ypq => 4.0,
        MetricKind::Cone => 0.0,
    });
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((ric.get(&[i, j]) - einstein * conn.jet.g[(i, j)]).re().abs());
        }
    }
    Ok(worst)
}

/// Largest component of the cyclic sum `R^ρ_{σμν} + R^ρ_{μνσ} + R^ρ_{νσμ}`.
pub fn bianchi_defect<S: Scalar>(riem: &Tensor<S>) -> f64 {
    let mut worst: f64 = 0.0;
    riem.for_each(|i, v| {
        let (r, s, m, nu) = (i[0], i[1], i[2], i[3]);
        let c = v + riem.get(&[r, m, nu, s]) + riem.get(&[r, nu, s, m]);
        worst = worst.max(c.re().abs());
    });
    worst
}
