//! Closed-form expressions for the named forms, written once over a generic
//! scalar so the same code yields values and exact derivatives.
//!
//! Five-manifold indices: `θ=0, φ=1, y=2, β=3, ψ′=4`.
//! Cone indices: `r=0, θ=1, φ=2, y=3, β=4, ψ′=5`.

use serde::Serialize;

use crate::dual::Real;

/// A form as a list of `coefficient · dx^{i₁} ∧ … ∧ dx^{i_p}` terms.
pub type Terms<S> = Vec<(S, Vec<usize>)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum NamedForm {
    Eta,
    Sigma,
    Psi,
    Xi,
    Upsilon,
    KahlerCone,
    ReVolumeCone,
    ImVolumeCone,
}

impl NamedForm {
    pub fn dim(&self) -> usize {
        match self {
            Self::KahlerCone | Self::ReVolumeCone | Self::ImVolumeCone => 6,
            _ => 5,
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Self::Eta | Self::Sigma => 1,
            Self::Xi | Self::Upsilon | Self::KahlerCone => 2,
            Self::Psi | Self::ReVolumeCone | Self::ImVolumeCone => 3,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Eta => "eta",
            Self::Sigma => "sigma",
            Self::Psi => "Psi",
            Self::Xi => "Xi",
            Self::Upsilon => "Upsilon",
            Self::KahlerCone => "Omega_cone",
            Self::ReVolumeCone => "Re dV_cone",
            Self::ImVolumeCone => "Im dV_cone",
        }
    }

    pub fn terms<S: Real>(&self, a: f64, x: &[S]) -> Terms<S> {
        match self {
            Self::Eta => eta(x, true),
            Self::Sigma => eta(x, false),
            Self::Psi => psi(x),
            Self::Xi => xi_upsilon(a, x).0,
            Self::Upsilon => xi_upsilon(a, x).1,
            Self::KahlerCone => kahler_cone(x),
            Self::ReVolumeCone => volume_cone(a, x).0,
            Self::ImVolumeCone => volume_cone(a, x).1,
        }
    }
}

fn p_of<S: Real>(a: f64, y: S) -> S {
    (S::cst(a) - y * y * S::cst(3.0) + y * y * y * S::cst(2.0)).scale(2.0) / (S::one() - y)
}

/// `η = ⅓dψ′ + σ`, `σ = ⅓[−cosθ dφ + y(dβ + cosθ dφ)]`.
fn eta<S: Real>(x: &[S], with_reeb: bool) -> Terms<S> {
    let (ct, y) = (x[0].cos(), x[2]);
    let three = S::cst(3.0);
    let mut t = vec![((y * ct - ct) / three, vec![1]), (y / three, vec![3])];
    if with_reeb {
        t.push((S::one() / three, vec![4]));
    }
    t
}

/// `Ψ = η ∧ dη`, in the expanded five-term form.
fn psi<S: Real>(x: &[S]) -> Terms<S> {
    let (ct, st, y) = (x[0].cos(), x[0].sin(), x[2]);
    let one = S::one();
    let nine = S::cst(9.0);
    vec![
        ((one - y) * st / nine, vec![0, 1, 4]),
        (one / nine, vec![2, 3, 4]),
        (ct / nine, vec![2, 1, 4]),
        (-ct / nine, vec![2, 3, 1]),
        ((one - y) * y * st / nine, vec![3, 0, 1]),
    ]
}

/// Real and imaginary parts of the holomorphic (2,0)-form of the
/// four-dimensional Kähler-Einstein base, without the prefactor
/// `√((1−y)/(6p))`, on indices `θ=0, φ=1, y=2, β=3`.
fn base_volume_brackets<S: Real>(a: f64, x: &[S]) -> (Terms<S>, Terms<S>) {
    let (ct, st, y) = (x[0].cos(), x[0].sin(), x[2]);
    let p6 = p_of(a, y) / S::cst(6.0);
    let re = vec![(-S::one(), vec![2, 0]), (p6 * st, vec![3, 1])];
    let im = vec![(-st, vec![2, 1]), (-p6, vec![3, 0]), (p6 * ct, vec![0, 1])];
    (re, im)
}

fn base_volume_prefactor<S: Real>(a: f64, y: S) -> S {
    ((S::one() - y) / (p_of(a, y).scale(6.0))).sqrt()
}

fn scaled<S: Real>(k: S, t: Terms<S>) -> Terms<S> {
    t.into_iter().map(|(c, i)| (k * c, i)).collect()
}

/// `dV_EK` on the base chart `(θ, φ, y, β)` as (Re, Im).
pub fn base_volume<S: Real>(a: f64, x: &[S]) -> (Terms<S>, Terms<S>) {
    let k = base_volume_prefactor(a, x[2]);
    let (re, im) = base_volume_brackets(a, x);
    (scaled(k, re), scaled(k, im))
}

/// `Ξ + iΥ = e^{iψ′} dV_EK`.
fn xi_upsilon<S: Real>(a: f64, x: &[S]) -> (Terms<S>, Terms<S>) {
    let k = base_volume_prefactor(a, x[2]);
    let (cp, sp) = (x[4].cos(), x[4].sin());
    let (re, im) = base_volume_brackets(a, x);
    let mut xi = scaled(k * cp, re.clone());
    xi.extend(scaled(-(k * sp), im.clone()));
    let mut up = scaled(k * cp, im);
    up.extend(scaled(k * sp, re));
    (xi, up)
}

/// `Ω_cone = r dr ∧ η + r² Ω_EK` written out in the primed chart.
fn kahler_cone<S: Real>(x: &[S]) -> Terms<S> {
    let (r, ct, st, y) = (x[0], x[1].cos(), x[1].sin(), x[3]);
    let one = S::one();
    let r2 = r * r;
    let (three, six) = (S::cst(3.0), S::cst(6.0));
    vec![
        (r2 * (one - y) * st / six, vec![1, 2]),
        (r2 / six, vec![3, 4]),
        (r2 * ct / six, vec![3, 2]),
        (r * y / three, vec![0, 4]),
        (r / three, vec![0, 5]),
        (-(r * (one - y) * ct) / three, vec![0, 2]),
    ]
}

#[derive(Clone, Copy)]
struct Cx<S> {
    re: S,
    im: S,
}

impl<S: Real> Cx<S> {
    fn mul(self, o: Self) -> Self {
        Cx { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

/// `dV_cone = e^{iψ′} r² dV_EK ∧ (dr + i r η)` as (Re, Im).
fn volume_cone<S: Real>(a: f64, x: &[S]) -> (Terms<S>, Terms<S>) {
    let (r, ct, st, y, psi) = (x[0], x[1].cos(), x[1].sin(), x[3], x[5]);
    let zero = S::zero();
    let p6 = p_of(a, y) / S::cst(6.0);
    let r3 = r / S::cst(3.0);
    let re = |v: S| Cx { re: v, im: zero };
    let im = |v: S| Cx { re: zero, im: v };
    let l = [(re(S::one()), 1), (im(st), 2)];
    let m = [(re(S::one()), 3), (im(p6), 4), (im(p6 * ct), 2)];
    let n = [
        (re(S::one()), 0),
        (im(r3 * y), 4),
        (im(r3), 5),
        (im(-(r3 * (S::one() - y) * ct)), 2),
    ];
    let k = r * r * base_volume_prefactor(a, y);
    let pref = Cx { re: k * psi.cos(), im: k * psi.sin() };
    let (mut out_re, mut out_im) = (Vec::new(), Vec::new());
    for (cl, il) in l {
        for (cm, im_) in m {
            for (cn, in_) in n {
                let c = pref.mul(cl).mul(cm).mul(cn);
                out_re.push((c.re, vec![il, im_, in_]));
                out_im.push((c.im, vec![il, im_, in_]));
            }
        }
    }
    (out_re, out_im)
}
