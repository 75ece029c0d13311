//! Parameters, coordinate domain and interior sampling of the Y(p,q) chart.
//!
//! Coordinates are ordered `(θ, φ, y, β, ψ′)` on the five-manifold and
//! `(r, θ, φ, y, β, ψ′)` on the metric cone.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_MARGIN: f64 = 1e-3;

/// Margin for sweeps checked against central finite differences. Closer to
/// the coordinate singularities the difference quotients themselves lose
/// accuracy (truncation error grows like `h²/dist³`).
pub const ORACLE_MARGIN: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct YpqParams {
    pub a: f64,
    pub c: f64,
}

impl YpqParams {
    /// The `c = 0` chart is locally the homogeneous T^{1,1} metric.
    pub fn is_homogeneous_limit(&self) -> bool {
        self.c == 0.0
    }

    pub fn require_c1(&self) -> Result<()> {
        if self.c == 1.0 {
            Ok(())
        } else {
            Err(Error::UnsupportedC(self.c))
        }
    }

    /// Numerator of `q(y)`: `a − 3y² + 2cy³`.
    pub fn cubic(&self, y: f64) -> f64 {
        self.a - 3.0 * y * y + 2.0 * self.c * y * y * y
    }

    pub fn w(&self, y: f64) -> f64 {
        2.0 * (self.a - y * y) / (1.0 - self.c * y)
    }

    pub fn q(&self, y: f64) -> f64 {
        self.cubic(y) / (self.a - y * y)
    }

    /// `p(y) = w(y) q(y) = 2(a − 3y² + 2cy³)/(1 − cy)`.
    pub fn p(&self, y: f64) -> f64 {
        2.0 * self.cubic(y) / (1.0 - self.c * y)
    }
}

/// Checks `c ∈ {0, 1}` and, for `c = 1`, that `a − 3y² + 2y³` has three
/// distinct real roots, which holds exactly for `0 < a < 1`.
pub fn validate_params(a: f64, c: f64) -> Result<YpqParams> {
    if !(c == 0.0 || c == 1.0) {
        return Err(Error::UnsupportedC(c));
    }
    if !a.is_finite() {
        return Err(Error::ParamOutOfRange(format!("a = {a} is not finite")));
    }
    if c == 1.0 {
        // discriminant of 2y³ − 3y² + a
        let disc = 108.0 * a * (1.0 - a);
        if !(a > 0.0 && a < 1.0) || disc <= 0.0 {
            return Err(Error::ParamOutOfRange(format!(
                "a = {a}: need 0 < a < 1 for three real roots (discriminant {disc})"
            )));
        }
    } else if a <= 0.0 {
        return Err(Error::ParamOutOfRange(format!("a = {a}: need a > 0")));
    }
    Ok(YpqParams { a, c })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChartDomain {
    pub params: YpqParams,
    pub y1: f64,
    pub y2: f64,
    pub margin: f64,
}

impl ChartDomain {
    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }

    pub fn theta_bounds(&self) -> (f64, f64) {
        (self.margin, PI - self.margin)
    }

    pub fn y_bounds(&self) -> (f64, f64) {
        let pad = self.margin * (self.y2 - self.y1);
        (self.y1 + pad, self.y2 - pad)
    }

    /// True when `pt` lies inside the sampled region (margins applied).
    pub fn contains(&self, pt: &ChartPoint) -> bool {
        let (t0, t1) = self.theta_bounds();
        let (y0, y1) = self.y_bounds();
        pt.theta > t0 && pt.theta < t1 && pt.y > y0 && pt.y < y1
    }

    /// True when `pt` lies inside the open chart (no margin).
    pub fn contains_open(&self, pt: &ChartPoint) -> bool {
        pt.theta > 0.0 && pt.theta < PI && pt.y > self.y1 && pt.y < self.y2
    }

    pub fn check(&self, pt: &ChartPoint) -> Result<()> {
        if self.contains_open(pt) && pt.as_array().iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::PointOutOfDomain(format!(
                "θ = {}, y = {} not inside (0, π) × ({}, {})",
                pt.theta, pt.y, self.y1, self.y2
            )))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChartPoint {
    pub theta: f64,
    pub phi: f64,
    pub y: f64,
    pub beta: f64,
    pub psi: f64,
}

impl ChartPoint {
    pub fn new(theta: f64, phi: f64, y: f64, beta: f64, psi: f64) -> Self {
        Self { theta, phi, y, beta, psi }
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.theta, self.phi, self.y, self.beta, self.psi]
    }

    pub fn from_slice(x: &[f64]) -> Self {
        Self::new(x[0], x[1], x[2], x[3], x[4])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConePoint {
    pub r: f64,
    pub base: ChartPoint,
}

impl ConePoint {
    pub fn new(r: f64, base: ChartPoint) -> Result<Self> {
        if r > 0.0 && r.is_finite() {
            Ok(Self { r, base })
        } else {
            Err(Error::PointOutOfDomain(format!("cone radius r = {r} must be positive")))
        }
    }

    pub fn as_array(&self) -> [f64; 6] {
        let b = self.base.as_array();
        [self.r, b[0], b[1], b[2], b[3], b[4]]
    }

    pub fn from_slice(x: &[f64]) -> Result<Self> {
        Self::new(x[0], ChartPoint::from_slice(&x[1..]))
    }
}

/// Bracketed Newton iteration; falls back to bisection whenever the
/// Newton step leaves the bracket.
fn bracketed_newton(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
) -> Result<f64> {
    let mut flo = f(lo);
    if flo == 0.0 {
        return Ok(lo);
    }
    if flo * f(hi) > 0.0 {
        return Err(Error::RootFindingFailed(format!("[{lo}, {hi}] does not bracket a root")));
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx * flo < 0.0 {
            hi = x;
        } else {
            lo = x;
            flo = fx;
        }
        let d = df(x);
        let newton = if d != 0.0 { x - fx / d } else { f64::NAN };
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= 1e-16 * (1.0 + x.abs()) || hi - lo <= 1e-16 * (1.0 + x.abs()) {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::RootFindingFailed("no convergence in 200 iterations".into()))
}

/// The two smallest real roots of `a − 3y² + 2cy³`, which bound the
/// coordinate `y`. For `c = 0` the roots are `±√(a/3)`.
pub fn compute_domain(params: YpqParams) -> Result<ChartDomain> {
    let f = |y: f64| params.cubic(y);
    let df = |y: f64| -6.0 * y + 6.0 * params.c * y * y;
    let (lo, hi, n) = (-1.0, 1.5, 500);
    let h = (hi - lo) / n as f64;
    let mut roots = Vec::new();
    for k in 0..n {
        let (x0, x1) = (lo + k as f64 * h, lo + (k + 1) as f64 * h);
        if f(x0) == 0.0 {
            roots.push(x0);
        } else if f(x0) * f(x1) < 0.0 {
            roots.push(bracketed_newton(f, df, x0, x1)?);
        }
    }
    if roots.len() < 2 {
        return Err(Error::RootFindingFailed(format!(
            "found {} sign change(s) of the cubic on [-1, 1.5]",
            roots.len()
        )));
    }
    let (y1, y2) = (roots[0], roots[1]);
    for y in [y1, y2] {
        if f(y).abs() >= 1e-12 {
            return Err(Error::RootFindingFailed(format!("residual {} at y = {y}", f(y))));
        }
    }
    Ok(ChartDomain { params, y1, y2, margin: DEFAULT_MARGIN })
}

/// Uniform interior sample respecting the domain margin.
pub fn sample_point<R: Rng>(domain: &ChartDomain, rng: &mut R) -> ChartPoint {
    let (t0, t1) = domain.theta_bounds();
    let (y0, y1) = domain.y_bounds();
    ChartPoint {
        theta: rng.gen_range(t0..t1),
        phi: rng.gen_range(0.0..TAU),
        y: rng.gen_range(y0..y1),
        beta: rng.gen_range(0.0..TAU),
        psi: rng.gen_range(0.0..TAU),
    }
}

/// Deterministic batch of `n` interior points.
pub fn sample_points(domain: &ChartDomain, seed: u64, n: usize) -> Vec<ChartPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| sample_point(domain, &mut rng)).collect()
}

/// Deterministic batch of cone points with `r` uniform in `[r_min, r_max)`.
pub fn sample_cone_points(
    domain: &ChartDomain,
    seed: u64,
    n: usize,
    r_min: f64,
    r_max: f64,
) -> Vec<ConePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let base = sample_point(domain, &mut rng);
            ConePoint { r: rng.gen_range(r_min..r_max), base }
        })
        .collect()
}
