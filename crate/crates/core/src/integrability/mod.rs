//! Geodesic first integrals: Hamiltonian, cyclic momenta, the SU(2)
//! Casimir and the quadratic invariants of Stäckel-Killing tensors.

pub mod flow;
pub mod rank;
pub mod stackel;
pub mod tableau;

use nalgebra::DMatrix;
use serde::Serialize;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::{sample_point, ChartDomain, ChartPoint, YpqParams};
use crate::dual::{Dual, Extended, Real, Scalar};
use crate::error::{Error, Result};
use crate::forms::NamedFormCatalog;
use crate::geometry::curvature::Connection;
use crate::geometry::metric::{product, MetricJet, MetricProvider};

pub use flow::{drift_report, drift_series, geodesic_rhs, integrate_geodesic, DomainExit, IntegratorConfig, Method, Trajectory};
pub use rank::{independence_rank, RankReport};
pub use stackel::{killing_tensor_residual, stackel_from_pair, StackelTensor, SymmetricField};

/// Position in the primed chart and covariant momenta.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseState {
    pub point: ChartPoint,
    pub momenta: [f64; 5],
}

impl PhaseState {
    pub fn new(point: ChartPoint, momenta: [f64; 5]) -> Self {
        Self { point, momenta }
    }

    pub fn as_array(&self) -> [f64; 10] {
        let mut out = [0.0; 10];
        out[..5].copy_from_slice(&self.point.as_array());
        out[5..].copy_from_slice(&self.momenta);
        out
    }

    pub fn from_array(z: &[f64; 10]) -> Self {
        let mut momenta = [0.0; 5];
        momenta.copy_from_slice(&z[5..]);
        Self { point: ChartPoint::from_slice(&z[..5]), momenta }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConservedSet {
    pub h: f64,
    pub p_phi: f64,
    pub p_beta: f64,
    pub p_psi: f64,
    pub j2: f64,
    pub quadratics: Vec<(String, f64)>,
}

impl ConservedSet {
    /// Labelled values in a fixed order.
    pub fn entries(&self) -> Vec<(String, f64)> {
        let mut out = vec![
            ("H".to_string(), self.h),
            ("P_phi".to_string(), self.p_phi),
            ("P_beta".to_string(), self.p_beta),
            ("P_psi".to_string(), self.p_psi),
            ("J2".to_string(), self.j2),
        ];
        out.extend(self.quadratics.iter().cloned());
        out
    }
}

/// Labels of the classical invariants, in [`ConservedSet::entries`] order.
pub const CLASSICAL: [&str; 5] = ["H", "P_phi", "P_beta", "P_psi", "J2"];

/// `J² = P_θ² + (P_φ + cosθ P_ψ)²/sin²θ + P_ψ²` where `P_ψ = P_ψ′ − P_β` is
/// the momentum conjugate to ψ in the original chart.
pub fn j2<S: Real>(theta: S, p: &[S]) -> S {
    let p_psi = p[4] - p[3];
    let l = p[1] + theta.cos() * p_psi;
    let s = theta.sin();
    p[0] * p[0] + l * l / (s * s) + p_psi * p_psi
}

fn quad<S: Scalar>(m: &DMatrix<S>, p: &[S]) -> S {
    let n = p.len();
    let mut v = S::zero();
    for i in 0..n {
        for j in 0..n {
            v += m[(i, j)] * p[i] * p[j];
        }
    }
    v
}

fn mat_vec<S: Scalar>(m: &DMatrix<S>, p: &[S]) -> Vec<S> {
    (0..p.len()).map(|i| (0..p.len()).fold(S::zero(), |acc, j| acc + m[(i, j)] * p[j])).collect()
}

fn sum3<S: Scalar>(a: DMatrix<S>, b: DMatrix<S>, c: DMatrix<S>) -> DMatrix<S> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] + b[(i, j)] + c[(i, j)])
}

/// One invariant's value and its gradient in `(x, p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantGradient {
    pub label: String,
    pub value: f64,
    pub gradient: [f64; 10],
}

/// The geodesic flow of `flow` together with the invariants of the
/// Y(p,q) metric, evaluated on the unperturbed metric. When `flow` is a
/// perturbed metric the invariants are no longer conserved, which serves
/// as a negative control.
#[derive(Clone, Debug)]
pub struct InvariantSystem {
    pub flow: MetricProvider,
    pub reference: MetricProvider,
    pub quadratics: Vec<SymmetricField>,
}

impl InvariantSystem {
    /// Quadratic invariants are included only for `c = 1`.
    pub fn new(flow: MetricProvider) -> Result<Self> {
        let reference = flow.unperturbed();
        let quadratics = if flow.params.c == 1.0 { catalog_pairs(flow.params)? } else { Vec::new() };
        Ok(Self { flow, reference, quadratics })
    }

    pub fn ypq(params: YpqParams) -> Result<Self> {
        Self::new(MetricProvider::ypq(params)?)
    }

    pub fn params(&self) -> YpqParams {
        self.flow.params
    }

    pub fn labels(&self) -> Vec<String> {
        CLASSICAL.iter().map(|s| s.to_string()).chain(self.quadratics.iter().map(|q| q.label())).collect()
    }

    pub fn hamiltonian(&self, state: &PhaseState) -> Result<f64> {
        let ginv = crate::geometry::inverse_metric(&self.flow, &state.point.as_array())?;
        Ok(0.5 * quad(&ginv, &state.momenta))
    }

    pub fn conserved_set(&self, state: &PhaseState) -> Result<ConservedSet> {
        let x = state.point.as_array();
        let p = &state.momenta;
        let h = self.hamiltonian(state)?;
        let mut quadratics = Vec::with_capacity(self.quadratics.len());
        if !self.quadratics.is_empty() {
            let ginv = crate::geometry::inverse_metric(&self.reference, &x)?;
            let up = |k: &DMatrix<f64>| &ginv * k * &ginv;
            for q in &self.quadratics {
                let k = match q {
                    SymmetricField::Pair { omega, sigma, .. } => {
                        stackel_from_pair(&self.reference, omega, sigma, &x)?.components
                    }
                    SymmetricField::Metric => self.reference.matrix(&x)?,
                    SymmetricField::CoordinateIdentity => DMatrix::identity(5, 5),
                };
                quadratics.push((q.label(), quad(&up(&k), p)));
            }
        }
        Ok(ConservedSet {
            h,
            p_phi: p[1],
            p_beta: p[3],
            p_psi: p[4],
            j2: j2(state.point.theta, p),
            quadratics,
        })
    }

    /// Values and `(x, p)` gradients of every invariant, in label order.
    pub fn gradients(&self, state: &PhaseState) -> Result<Vec<InvariantGradient>> {
        Ok(self
            .gradients_in::<f64>(state)?
            .into_iter()
            .map(|(label, value, gradient)| InvariantGradient { label, value, gradient })
            .collect())
    }

    /// [`Self::gradients`] in scalar type `S`.
    fn gradients_in<S: Scalar>(&self, state: &PhaseState) -> Result<Vec<(String, S, [S; 10])>> {
        let x = state.point.as_array();
        let p: Vec<S> = state.momenta.iter().map(|&v| S::cst(v)).collect();
        let two = S::cst(2.0);
        let mut out = Vec::with_capacity(5 + self.quadratics.len());

        let jet = MetricJet::<S>::new(&self.flow, &x, 1)?;
        let mut g = [S::zero(); 10];
        for k in 0..5 {
            g[k] = quad(&jet.dginv(k), &p) / two;
        }
        g[5..].copy_from_slice(&mat_vec(&jet.ginv, &p));
        out.push(("H".to_string(), quad(&jet.ginv, &p) / two, g));

        for (label, slot) in [("P_phi", 1), ("P_beta", 3), ("P_psi", 4)] {
            let mut g = [S::zero(); 10];
            g[5 + slot] = S::one();
            out.push((label.to_string(), p[slot], g));
        }

        let mut g = [S::zero(); 10];
        for (k, gk) in g.iter_mut().enumerate() {
            let seed = |v: S, i: usize| Dual::new(v, if i == k { S::one() } else { S::zero() });
            let th = seed(S::cst(x[0]), 0);
            let pd: Vec<Dual<S>> = (0..5).map(|i| seed(p[i], i + 5)).collect();
            *gk = j2(th, &pd).d;
        }
        out.push(("J2".to_string(), j2(S::cst(x[0]), &p), g));

        if !self.quadratics.is_empty() {
            let conn = Connection::<S>::compute(&self.reference, &x, 1)?;
            let gi = &conn.jet.ginv;
            for q in &self.quadratics {
                let kj = q.jet(&self.reference, &conn, &x)?;
                let up = product(&product(gi, &kj.value), gi);
                let mut g = [S::zero(); 10];
                for k in 0..5 {
                    let dgi = conn.jet.dginv(k);
                    let d = sum3(
                        product(&product(&dgi, &kj.value), gi),
                        product(&product(gi, &kj.d1[k]), gi),
                        product(&product(gi, &kj.value), &dgi),
                    );
                    g[k] = quad(&d, &p);
                }
                let kp = mat_vec(&up, &p);
                for i in 0..5 {
                    g[5 + i] = kp[i] * two;
                }
                out.push((q.label(), quad(&up, &p), g));
            }
        }
        Ok(out)
    }

    /// Seeded generic states rescaled to unit speed (`H = ½`).
    pub fn sample_states(&self, seed: u64, n: usize) -> Result<Vec<PhaseState>> {
        sample_raw_states(&self.flow.domain, seed, n)
            .into_iter()
            .map(|mut s| {
                let k = (0.5 / self.hamiltonian(&s)?).sqrt();
                s.momenta.iter_mut().for_each(|m| *m *= k);
                Ok(s)
            })
            .collect()
    }

    /// `{H, Q}` for every invariant `Q`, in label order. Gradients and
    /// brackets are formed in double-double, since the terms of a vanishing
    /// bracket cancel to far below their size near the poles.
    pub fn poisson_with_hamiltonian(&self, state: &PhaseState) -> Result<Vec<(String, f64)>> {
        let grads = self.gradients_in::<Extended>(state)?;
        let h = grads[0].2;
        Ok(grads.iter().map(|(label, _, g)| (label.clone(), poisson_bracket(&h, g).re())).collect())
    }
}

/// `{F, G} = Σᵢ ∂F/∂xⁱ ∂G/∂pᵢ − ∂F/∂pᵢ ∂G/∂xⁱ` from phase-space gradients.
pub fn poisson_bracket<S: Scalar>(f: &[S; 10], g: &[S; 10]) -> S {
    (0..5).fold(S::zero(), |acc, i| acc + f[i] * g[5 + i] - f[5 + i] * g[i])
}

/// The quadratic invariants from (Ψ,Ψ), (Ξ,Ξ), (Υ,Υ) and (Ξ,Υ).
pub fn catalog_pairs(params: YpqParams) -> Result<Vec<SymmetricField>> {
    let cat = NamedFormCatalog::new(params)?;
    let pair = |label: &str, a: &crate::geometry::FormField, b: &crate::geometry::FormField| SymmetricField::Pair {
        label: label.into(),
        omega: a.clone(),
        sigma: b.clone(),
    };
    Ok(vec![
        pair("K_Psi_Psi", &cat.psi, &cat.psi),
        pair("K_Xi_Xi", &cat.xi, &cat.xi),
        pair("K_Upsilon_Upsilon", &cat.upsilon, &cat.upsilon),
        pair("K_Xi_Upsilon", &cat.xi, &cat.upsilon),
    ])
}

pub fn hamiltonian(params: YpqParams, state: &PhaseState) -> Result<f64> {
    let provider = MetricProvider::ypq(params)?;
    let ginv = crate::geometry::inverse_metric(&provider, &state.point.as_array())?;
    Ok(0.5 * quad(&ginv, &state.momenta))
}

pub fn conserved_set(params: YpqParams, state: &PhaseState) -> Result<ConservedSet> {
    InvariantSystem::ypq(params)?.conserved_set(state)
}

/// Seeded phase states: interior points from [`sample_point`] with momenta
/// uniform in `±[0.1, 1]` per component, so none vanishes.
pub fn sample_raw_states(domain: &ChartDomain, seed: u64, n: usize) -> Vec<PhaseState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let point = sample_point(domain, &mut rng);
            let mut momenta = [0.0; 5];
            for m in momenta.iter_mut() {
                let mag: f64 = rng.gen_range(0.1..1.0);
                *m = if rng.gen_bool(0.5) { mag } else { -mag };
            }
            PhaseState { point, momenta }
        })
        .collect()
}

pub(crate) fn require_finite(state: &PhaseState) -> Result<()> {
    if state.as_array().iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::BadInitialState("non-finite component".into()))
    }
}
