//! The Y(p,q) metric, its metric cone, and their derivative jets.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::chart::{compute_domain, ChartDomain, ChartPoint, ConePoint, YpqParams};
use crate::dual::{seed, seed_first, split, Real, Scalar};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MetricKind {
    Ypq,
    Cone,
}

/// Symmetric component matrix in the primed chart `(θ, φ, y, β, ψ′)`,
/// using the `c = 1` line element
/// `(1−y)/6 (dθ² + sin²θ dφ²) + dy²/p + p/36 (dβ + cosθ dφ)²
///  + 1/9 (dψ′ − cosθ dφ + y(dβ + cosθ dφ))²`.
///
/// Rational coefficients are applied as divisions by exact integers so that
/// an extended-precision scalar sees the exact metric, not its `f64`
/// rounding.
pub fn ypq_primed<S: Real>(a: f64, x: &[S]) -> [[S; 5]; 5] {
    let (th, y) = (x[0], x[2]);
    let (ct, st) = (th.cos(), th.sin());
    let one = S::one();
    let a6 = (one - y) / S::cst(6.0);
    let p = (S::cst(a) - y * y * S::cst(3.0) + y * y * y * S::cst(2.0)).scale(2.0) / (one - y);
    // dβ + cosθ dφ and the Reeb-direction combination
    let b = [S::zero(), ct, S::zero(), one, S::zero()];
    let e = [S::zero(), -ct + y * ct, S::zero(), y, one];
    let mut g = [[S::zero(); 5]; 5];
    for i in 0..5 {
        for j in 0..5 {
            g[i][j] = (b[i] * b[j]) * p / S::cst(36.0) + (e[i] * e[j]) / S::cst(9.0);
        }
    }
    g[0][0] = g[0][0] + a6;
    g[1][1] = g[1][1] + a6 * st * st;
    g[2][2] = g[2][2] + one / p;
    g
}

/// The original line element in `(θ, φ, y, α, ψ)` pulled back through
/// `α = −β/6 − ψ′/6`, `ψ = ψ′`. Valid for `c ∈ {0, 1}`; for `c = 1` it
/// coincides with [`ypq_primed`].
pub fn ypq_pulled_back<S: Real>(a: f64, c: f64, x: &[S]) -> [[S; 5]; 5] {
    let (th, y) = (x[0], x[2]);
    let (ct, st) = (th.cos(), th.sin());
    let one = S::one();
    let (ca, cc) = (S::cst(a), S::cst(c));
    let a_y2 = ca - y * y;
    let cubic = ca - y * y * S::cst(3.0) + cc * y * y * y.scale(2.0);
    let one_cy = one - cc * y;
    let w = a_y2.scale(2.0) / one_cy;
    let q = cubic / a_y2;
    let f = (S::cst(a * c) - y.scale(2.0) + cc * y * y) / a_y2.scale(6.0);
    // dψ − cosθ dφ
    let fv = [S::zero(), -ct, S::zero(), S::zero(), one];
    // dα + f (dψ − cosθ dφ), with dα = −dβ/6 − dψ′/6
    let sixth = -one / S::cst(6.0);
    let gv = [S::zero(), -(f * ct), S::zero(), sixth, sixth + f];
    let mut g = [[S::zero(); 5]; 5];
    for i in 0..5 {
        for j in 0..5 {
            g[i][j] = (fv[i] * fv[j]) * q / S::cst(9.0) + (gv[i] * gv[j]) * w;
        }
    }
    let base = one_cy / S::cst(6.0);
    g[0][0] = g[0][0] + base;
    g[1][1] = g[1][1] + base * st * st;
    g[2][2] = g[2][2] + one / (w * q);
    g
}

/// A metric on the Y(p,q) chart or on its cone, optionally with a constant
/// shift of the `θθ` component (used as a non-Einstein control).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricProvider {
    pub kind: MetricKind,
    pub params: YpqParams,
    pub domain: ChartDomain,
    pub theta_shift: f64,
}

impl MetricProvider {
    pub fn ypq(params: YpqParams) -> Result<Self> {
        Ok(Self { kind: MetricKind::Ypq, params, domain: compute_domain(params)?, theta_shift: 0.0 })
    }

    pub fn cone(params: YpqParams) -> Result<Self> {
        Ok(Self { kind: MetricKind::Cone, params, domain: compute_domain(params)?, theta_shift: 0.0 })
    }

    pub fn perturbed(mut self, theta_shift: f64) -> Self {
        self.theta_shift = theta_shift;
        self
    }

    pub fn unperturbed(&self) -> Self {
        Self { theta_shift: 0.0, ..self.clone() }
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            MetricKind::Ypq => 5,
            MetricKind::Cone => 6,
        }
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(x.len(), self.dim()));
        }
        match self.kind {
            MetricKind::Ypq => self.domain.check(&ChartPoint::from_slice(x)),
            MetricKind::Cone => {
                let cp = ConePoint::from_slice(x)?;
                self.domain.check(&cp.base)
            }
        }
    }

    /// Row-major components at a point with generic scalars.
    pub fn components<S: Real>(&self, x: &[S]) -> Vec<S> {
        let base = |xb: &[S]| {
            let mut g = if self.params.c == 1.0 {
                ypq_primed(self.params.a, xb)
            } else {
                ypq_pulled_back(self.params.a, self.params.c, xb)
            };
            g[0][0] = g[0][0] + S::cst(self.theta_shift);
            g
        };
        match self.kind {
            MetricKind::Ypq => base(x).iter().flatten().copied().collect(),
            MetricKind::Cone => {
                let r = x[0];
                let gb = base(&x[1..]);
                let mut out = vec![S::zero(); 36];
                out[0] = S::one();
                for i in 0..5 {
                    for j in 0..5 {
                        out[(i + 1) * 6 + j + 1] = r * r * gb[i][j];
                    }
                }
                out
            }
        }
    }

    pub fn matrix(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(x)?;
        let n = self.dim();
        Ok(DMatrix::from_row_slice(n, n, &self.components(x)))
    }
}

pub fn metric_ypq(params: YpqParams, pt: &ChartPoint) -> Result<DMatrix<f64>> {
    MetricProvider::ypq(params)?.matrix(&pt.as_array())
}

pub fn metric_cone(params: YpqParams, cpt: &ConePoint) -> Result<DMatrix<f64>> {
    MetricProvider::cone(params)?.matrix(&cpt.as_array())
}

/// Inverse metric via Cholesky factorization; fails unless positive definite.
pub fn invert_spd(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let chol = g.clone().cholesky().ok_or(Error::SingularMetric)?;
    let inv = chol.inverse();
    if inv.iter().all(|v| v.is_finite()) {
        Ok(inv)
    } else {
        Err(Error::SingularMetric)
    }
}

pub fn inverse_metric(provider: &MetricProvider, x: &[f64]) -> Result<DMatrix<f64>> {
    invert_spd(&provider.matrix(x)?)
}

/// Matrix product for scalars without nalgebra's arithmetic bounds.
pub fn product<S: Scalar>(a: &DMatrix<S>, b: &DMatrix<S>) -> DMatrix<S> {
    DMatrix::from_fn(a.nrows(), b.ncols(), |i, j| {
        (0..a.ncols()).fold(S::zero(), |acc, k| acc + a[(i, k)] * b[(k, j)])
    })
}

/// Inverse of a symmetric positive definite matrix by Cholesky
/// factorization, carried out in the matrix's own scalar type.
pub fn invert_spd_in<S: Scalar>(g: &DMatrix<S>) -> Result<DMatrix<S>> {
    let n = g.nrows();
    let mut l = DMatrix::from_element(n, n, S::zero());
    for j in 0..n {
        let d = (0..j).fold(g[(j, j)], |acc, k| acc - l[(j, k)] * l[(j, k)]);
        if !(d.re() > 0.0 && d.re().is_finite()) {
            return Err(Error::SingularMetric);
        }
        l[(j, j)] = d.sqrt();
        for i in j + 1..n {
            let v = (0..j).fold(g[(i, j)], |acc, k| acc - l[(i, k)] * l[(j, k)]);
            l[(i, j)] = v / l[(j, j)];
        }
    }
    // Columns of L⁻¹ by forward substitution, then g⁻¹ = L⁻ᵀ L⁻¹.
    let mut linv = DMatrix::from_element(n, n, S::zero());
    for c in 0..n {
        for i in c..n {
            let rhs = if i == c { S::one() } else { S::zero() };
            let v = (c..i).fold(rhs, |acc, k| acc - l[(i, k)] * linv[(k, c)]);
            linv[(i, c)] = v / l[(i, i)];
        }
    }
    let inv = DMatrix::from_fn(n, n, |i, j| {
        (i.max(j)..n).fold(S::zero(), |acc, k| acc + linv[(k, i)] * linv[(k, j)])
    });
    if inv.iter().all(|v| v.re().is_finite()) {
        Ok(inv)
    } else {
        Err(Error::SingularMetric)
    }
}

/// Metric components with up to second partial derivatives.
#[derive(Clone, Debug)]
pub struct MetricJet<S = f64> {
    pub g: DMatrix<S>,
    pub ginv: DMatrix<S>,
    /// `dg[k] = ∂ₖ g`
    pub dg: Vec<DMatrix<S>>,
    /// `d2g[k][l] = ∂ₖ∂ₗ g`; empty below order 2
    pub d2g: Vec<Vec<DMatrix<S>>>,
}

impl<S: Scalar> MetricJet<S> {
    pub fn new(provider: &MetricProvider, x: &[f64], order: usize) -> Result<Self> {
        provider.check_point(x)?;
        let n = provider.dim();
        let zero = DMatrix::from_element(n, n, S::zero());
        let xs: Vec<S> = x.iter().map(|&v| S::cst(v)).collect();
        let g = DMatrix::from_row_slice(n, n, &provider.components(&xs));
        let ginv = invert_spd_in(&g)?;
        let mut dg = Vec::new();
        let mut d2g = Vec::new();
        if order == 1 {
            for k in 0..n {
                let c = provider.components(&seed_first::<S>(x, k));
                dg.push(DMatrix::from_row_slice(n, n, &c.iter().map(|d| d.d).collect::<Vec<S>>()));
            }
        } else if order >= 2 {
            dg = vec![zero.clone(); n];
            d2g = vec![vec![zero.clone(); n]; n];
            for i in 0..n {
                for j in i..n {
                    let c = provider.components(&seed::<S>(x, i, j));
                    for (o, h) in c.iter().enumerate() {
                        let (_, di, _, dij) = split(h);
                        let (r, s) = (o / n, o % n);
                        if i == j {
                            dg[i][(r, s)] = di;
                        }
                        d2g[i][j][(r, s)] = dij;
                        d2g[j][i][(r, s)] = dij;
                    }
                }
            }
        }
        Ok(Self { g, ginv, dg, d2g })
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// `∂ₖ g⁻¹ = −g⁻¹ (∂ₖ g) g⁻¹`.
    pub fn dginv(&self, k: usize) -> DMatrix<S> {
        product(&product(&self.ginv, &self.dg[k]), &self.ginv).map(|v| -v)
    }
}
