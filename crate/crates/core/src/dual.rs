//! Forward-mode dual numbers.
//!
//! `Dual<T>` carries a value and one directional derivative. Nesting
//! (`Dual<Dual<f64>>`) yields exact second derivatives: seeding the outer
//! and inner tangents along coordinates `i` and `j` puts `∂ᵢ∂ⱼf` in the
//! innermost slot.
//!
//! The tensor and geometry layers are generic over [`Scalar`], so the same
//! code runs in `f64` and in double-double arithmetic ([`Extended`]). The
//! residual checkers use the latter: near the poles of the chart the metric
//! is badly conditioned and plain `f64` leaves a round-off floor well above
//! the verification tolerances.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use twofloat::TwoFloat;

/// Scalar field usable by the generic metric and form evaluators.
pub trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn cst(v: f64) -> Self;
    fn re(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;

    fn zero() -> Self {
        Self::cst(0.0)
    }

    fn one() -> Self {
        Self::cst(1.0)
    }

    fn scale(self, k: f64) -> Self {
        self * Self::cst(k)
    }

    fn powi(self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }
}

impl Real for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn re(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

/// Double-double scalar (about 106 significant bits) built on
/// `twofloat`. Addition, multiplication, `sqrt`, `sin` and `cos` come from
/// that crate; division is done here by long division with two correction
/// steps, because the crate's own quotient is only `f64`-accurate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extended(TwoFloat);

impl Extended {
    pub fn hi(&self) -> f64 {
        self.0.hi()
    }

    pub fn lo(&self) -> f64 {
        self.0.lo()
    }
}

impl Add for Extended {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self(self.0 + o.0)
    }
}

impl Sub for Extended {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self(self.0 - o.0)
    }
}

impl Mul for Extended {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self(self.0 * o.0)
    }
}

impl Div for Extended {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q1 = self.0.hi() / o.0.hi();
        let r = self.0 - o.0 * q1;
        let q2 = r.hi() / o.0.hi();
        let r = r - o.0 * q2;
        let q3 = r.hi() / o.0.hi();
        Self(TwoFloat::new_add(q1, q2) + q3)
    }
}

impl Neg for Extended {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl AddAssign for Extended {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for Extended {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl MulAssign for Extended {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl Real for Extended {
    fn cst(v: f64) -> Self {
        Self(TwoFloat::from(v))
    }
    fn re(&self) -> f64 {
        self.0.hi() + self.0.lo()
    }
    fn sin(self) -> Self {
        Self(self.0.sin())
    }
    fn cos(self) -> Self {
        Self(self.0.cos())
    }
    fn sqrt(self) -> Self {
        Self(self.0.sqrt())
    }
}

/// A [`Real`] that also works as a matrix entry and accumulator.
///
/// Generic code builds `DMatrix<S>` entry by entry; nalgebra's own
/// arithmetic is reserved for `f64`.
pub trait Scalar:
    Real
    + nalgebra::Scalar
    + AddAssign
    + SubAssign
    + MulAssign
    + Send
    + Sync
{
}

impl<T> Scalar for T where
    T: Real + nalgebra::Scalar + AddAssign + SubAssign + MulAssign + Send + Sync
{
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub v: T,
    pub d: T,
}

impl<T: Real> Dual<T> {
    pub fn new(v: T, d: T) -> Self {
        Self { v, d }
    }

    pub fn variable(v: T) -> Self {
        Self { v, d: T::one() }
    }

    pub fn constant(v: T) -> Self {
        Self { v, d: T::zero() }
    }
}

impl<T: Real> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.v + o.v, self.d + o.d)
    }
}

impl<T: Real> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.v - o.v, self.d - o.d)
    }
}

impl<T: Real> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.v * o.v, self.v * o.d + self.d * o.v)
    }
}

impl<T: Real> Div for Dual<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q = self.v / o.v;
        Self::new(q, (self.d - q * o.d) / o.v)
    }
}

impl<T: Real> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.v, -self.d)
    }
}

impl<T: Real> Real for Dual<T> {
    fn cst(v: f64) -> Self {
        Self::constant(T::cst(v))
    }
    fn re(&self) -> f64 {
        self.v.re()
    }
    fn sin(self) -> Self {
        Self::new(self.v.sin(), self.d * self.v.cos())
    }
    fn cos(self) -> Self {
        Self::new(self.v.cos(), -(self.d * self.v.sin()))
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        Self::new(s, self.d / (s + s))
    }
}

/// Second-order nested dual.
pub type HyperDual<S = f64> = Dual<Dual<S>>;

fn indicator<S: Real>(on: bool) -> S {
    if on {
        S::one()
    } else {
        S::zero()
    }
}

/// Seeds every coordinate of `x` with one tangent along `i`.
pub fn seed_first<S: Real>(x: &[f64], i: usize) -> Vec<Dual<S>> {
    x.iter().enumerate().map(|(k, &xk)| Dual::new(S::cst(xk), indicator(k == i))).collect()
}

/// Seeds coordinate `x` so that the outer tangent points along `i`
/// and the inner tangent along `j`.
pub fn seed<S: Real>(x: &[f64], i: usize, j: usize) -> Vec<HyperDual<S>> {
    x.iter()
        .enumerate()
        .map(|(k, &xk)| {
            let inner = Dual::new(S::cst(xk), indicator(k == j));
            let outer_d = Dual::new(indicator(k == i), S::zero());
            Dual::new(inner, outer_d)
        })
        .collect()
}

/// Value, `∂ᵢ`, `∂ⱼ` and `∂ᵢ∂ⱼ` from a seeded evaluation.
pub fn split<S: Real>(h: &HyperDual<S>) -> (S, S, S, S) {
    (h.v.v, h.d.v, h.v.d, h.d.d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f<S: Real>(x: S, y: S) -> S {
        (x * y).sin() + x.sqrt() / (S::one() + y * y)
    }

    #[test]
    fn first_and_second_partials() {
        let (x, y) = (0.7, -0.4);
        let s = seed::<f64>(&[x, y], 0, 1);
        let (v, fx, fy, fxy) = split(&f(s[0], s[1]));
        assert!((v - f(x, y)).abs() < 1e-15);
        // hand-derived partials
        let dfx = y * (x * y).cos() + 0.5 / x.sqrt() / (1.0 + y * y);
        let dfy = x * (x * y).cos() - x.sqrt() * 2.0 * y / (1.0 + y * y).powi(2);
        let dfxy = (x * y).cos() - x * y * (x * y).sin() - 0.5 / x.sqrt() * 2.0 * y / (1.0 + y * y).powi(2);
        assert!((fx - dfx).abs() < 1e-14);
        assert!((fy - dfy).abs() < 1e-14);
        assert!((fxy - dfxy).abs() < 1e-14);
    }

    #[test]
    fn diagonal_seed_gives_pure_second_derivative() {
        let x = 1.3;
        let s = seed::<f64>(&[x], 0, 0);
        let (_, d1, d1b, d2) = split(&s[0].cos());
        assert_eq!(d1, d1b);
        assert!((d1 + x.sin()).abs() < 1e-15);
        assert!((d2 + x.cos()).abs() < 1e-15);
    }

    #[test]
    fn powi_matches_repeated_product() {
        let d = Dual::variable(1.5f64);
        let p = d.powi(3);
        assert!((p.v - 3.375).abs() < 1e-15);
        assert!((p.d - 3.0 * 2.25).abs() < 1e-15);
    }

    #[test]
    fn extended_partials_agree_with_f64() {
        let (x, y) = (0.7, -0.4);
        let lo = seed::<f64>(&[x, y], 0, 1);
        let hi = seed::<Extended>(&[x, y], 0, 1);
        let (a, b) = (split(&f(lo[0], lo[1])), split(&f(hi[0], hi[1])));
        for (l, h) in [(a.0, b.0), (a.1, b.1), (a.2, b.2), (a.3, b.3)] {
            assert!((l - h.re()).abs() < 1e-14);
        }
    }

    #[test]
    fn extended_resolves_below_f64_epsilon() {
        let third = Extended::one() / Extended::cst(3.0);
        assert!(third.lo() != 0.0);
        let residual = third * Extended::cst(3.0) - Extended::one();
        assert!(residual.re().abs() < 1e-31);
        let q = Extended::cst(0.7) / (Extended::cst(1.3) + Extended::cst(1e-20));
        let back = q * (Extended::cst(1.3) + Extended::cst(1e-20)) - Extended::cst(0.7);
        assert!(back.re().abs() < 1e-31);
        let r = Extended::cst(2.0).sqrt();
        assert!((r * r - Extended::cst(2.0)).re().abs() < 1e-31);
        // sin x = x − x³/6 + x⁵/120 − …
        let x = Extended::cst(1e-3);
        let err = x.sin() - x + x * x * x / Extended::cst(6.0);
        assert!((err.re() - 1e-15 / 120.0).abs() < 1e-24);
    }

    proptest::proptest! {
        #[test]
        fn extended_division_inverts_multiplication(a in -1e3f64..1e3, b in 0.01f64..1e3, t in -1.0f64..1.0) {
            let b = Extended::cst(b) + Extended::cst(t * 1e-17 * b);
            let q = Extended::cst(a) / b;
            let back = q * b - Extended::cst(a);
            proptest::prop_assert!(back.re().abs() <= 1e-30 * a.abs().max(1e-300));
        }
    }
}
