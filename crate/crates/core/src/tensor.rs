//! Dense tensors and exterior algebra at a single point.
//!
//! Components are stored lexicographically, first index most significant.
//! Forms keep every index permutation populated; the wedge convention makes
//! `dx¹ ∧ dx²` have component `+1` at `(1, 2)` and `−1` at `(2, 1)`.

use std::ops::{Add, Mul, Neg, Sub};

use crate::dual::Scalar;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valence {
    Up,
    Down,
}

/// Sign of the permutation that sorts `idx`, or 0 if an index repeats.
pub fn permutation_sign(idx: &[usize]) -> i32 {
    if idx.len() < 2 {
        return 1;
    }
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] == v[j + 1] {
                return 0;
            }
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        0
    } else {
        sign
    }
}

/// All permutations of `0..k` with their signs.
pub fn permutations(k: usize) -> Vec<(Vec<usize>, i32)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out.into_iter()
        .map(|p| {
            let s = permutation_sign(&p);
            (p, s)
        })
        .collect()
}

/// Strictly increasing `k`-tuples drawn from `0..n`.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

fn offset(dim: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * dim + i)
}

fn unravel(dim: usize, rank: usize, mut off: usize, out: &mut [usize]) {
    for k in (0..rank).rev() {
        out[k] = off % dim;
        off /= dim;
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn sign_times<S: Scalar>(s: i32, v: S) -> S {
    match s {
        1 => v,
        -1 => -v,
        _ => S::zero(),
    }
}

fn largest<'a, S: Scalar>(values: impl Iterator<Item = &'a S>) -> f64 {
    values.fold(0.0, |m, v| m.max(v.re().abs()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<S = f64> {
    dim: usize,
    slots: Vec<Valence>,
    data: Vec<S>,
}

impl<S: Scalar> Tensor<S> {
    pub fn zeros(dim: usize, slots: Vec<Valence>) -> Self {
        let n = dim.pow(slots.len() as u32);
        Self { dim, slots, data: vec![S::zero(); n] }
    }

    pub fn covariant(dim: usize, rank: usize) -> Self {
        Self::zeros(dim, vec![Valence::Down; rank])
    }

    pub fn from_data(dim: usize, slots: Vec<Valence>, data: Vec<S>) -> Result<Self> {
        let n = dim.pow(slots.len() as u32);
        if data.len() != n {
            return Err(Error::DimensionMismatch(data.len(), n));
        }
        Ok(Self { dim, slots, data })
    }

    /// Identity map `δ^μ_ν` as a (1,1) tensor.
    pub fn identity(dim: usize) -> Self {
        let mut t = Self::zeros(dim, vec![Valence::Up, Valence::Down]);
        for i in 0..dim {
            t.set(&[i, i], S::one());
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[Valence] {
        &self.slots
    }

    pub fn covariant_rank(&self) -> usize {
        self.slots.iter().filter(|s| **s == Valence::Down).count()
    }

    pub fn contravariant_rank(&self) -> usize {
        self.slots.iter().filter(|s| **s == Valence::Up).count()
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn get(&self, idx: &[usize]) -> S {
        self.data[offset(self.dim, idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: S) {
        let o = offset(self.dim, idx);
        self.data[o] = v;
    }

    pub fn add_at(&mut self, idx: &[usize], v: S) {
        let o = offset(self.dim, idx);
        self.data[o] += v;
    }

    pub fn max_abs(&self) -> f64 {
        largest(self.data.iter())
    }

    /// Calls `f(index, value)` for every component.
    pub fn for_each(&self, mut f: impl FnMut(&[usize], S)) {
        let mut idx = vec![0; self.rank()];
        for (o, &v) in self.data.iter().enumerate() {
            unravel(self.dim, self.rank(), o, &mut idx);
            f(&idx, v);
        }
    }

    /// Builds a tensor from a component function.
    pub fn from_fn(dim: usize, slots: Vec<Valence>, mut f: impl FnMut(&[usize]) -> S) -> Self {
        let mut t = Self::zeros(dim, slots);
        let rank = t.rank();
        let mut idx = vec![0; rank];
        for o in 0..t.data.len() {
            unravel(dim, rank, o, &mut idx);
            t.data[o] = f(&idx);
        }
        t
    }

    pub fn scale(&self, k: f64) -> Self {
        self.scale_by(S::cst(k))
    }

    pub fn scale_by(&self, k: S) -> Self {
        Self { data: self.data.iter().map(|&v| v * k).collect(), ..self.clone() }
    }

    pub fn max_abs_diff(&self, other: &Tensor<S>) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |m, (&a, &b)| m.max((a - b).re().abs()))
    }

    /// Components rounded to `f64`.
    pub fn lower(&self) -> Tensor {
        Tensor { dim: self.dim, slots: self.slots.clone(), data: self.data.iter().map(|v| v.re()).collect() }
    }
}

impl<S: Scalar> Sub for &Tensor<S> {
    type Output = Tensor<S>;
    fn sub(self, o: &Tensor<S>) -> Tensor<S> {
        assert_eq!(self.slots, o.slots);
        Tensor {
            data: self.data.iter().zip(&o.data).map(|(&a, &b)| a - b).collect(),
            ..self.clone()
        }
    }
}

impl<S: Scalar> Add for &Tensor<S> {
    type Output = Tensor<S>;
    fn add(self, o: &Tensor<S>) -> Tensor<S> {
        assert_eq!(self.slots, o.slots);
        Tensor {
            data: self.data.iter().zip(&o.data).map(|(&a, &b)| a + b).collect(),
            ..self.clone()
        }
    }
}

fn require_covariant<S: Scalar>(t: &Tensor<S>) -> Result<()> {
    if t.contravariant_rank() == 0 {
        Ok(())
    } else {
        Err(Error::MixedValence)
    }
}

/// Symmetric projection with `1/r!` normalization.
pub fn symmetrize<S: Scalar>(t: &Tensor<S>) -> Result<Tensor<S>> {
    require_covariant(t)?;
    let r = t.rank();
    let perms = permutations(r);
    let norm = S::cst(factorial(r));
    let mut buf = vec![0; r];
    Ok(Tensor::from_fn(t.dim, t.slots.clone(), |idx| {
        perms
            .iter()
            .map(|(p, _)| {
                for k in 0..r {
                    buf[k] = idx[p[k]];
                }
                t.get(&buf)
            })
            .fold(S::zero(), |acc, v| acc + v)
            / norm
    }))
}

/// Antisymmetric projection with `1/r!` normalization.
pub fn antisymmetrize<S: Scalar>(t: &Tensor<S>) -> Result<DifferentialForm<S>> {
    require_covariant(t)?;
    let r = t.rank();
    if r > t.dim {
        return Err(Error::DegreeOverflow(r, t.dim));
    }
    let perms = permutations(r);
    let norm = S::cst(factorial(r));
    let mut buf = vec![0; r];
    Ok(DifferentialForm::from_sorted(t.dim, r, |idx| {
        perms
            .iter()
            .map(|(p, s)| {
                for k in 0..r {
                    buf[k] = idx[p[k]];
                }
                sign_times(*s, t.get(&buf))
            })
            .fold(S::zero(), |acc, v| acc + v)
            / norm
    }))
}

/// Trace over an (upper, lower) slot pair.
pub fn contract<S: Scalar>(t: &Tensor<S>, slot_up: usize, slot_down: usize) -> Result<Tensor<S>> {
    let r = t.rank();
    if slot_up >= r
        || slot_down >= r
        || slot_up == slot_down
        || t.slots[slot_up] != Valence::Up
        || t.slots[slot_down] != Valence::Down
    {
        return Err(Error::BadSlots(slot_up, slot_down));
    }
    let slots: Vec<Valence> = t
        .slots
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != slot_up && *k != slot_down)
        .map(|(_, s)| *s)
        .collect();
    let mut full = vec![0; r];
    Ok(Tensor::from_fn(t.dim, slots, |idx| {
        let mut it = idx.iter();
        for k in 0..r {
            if k != slot_up && k != slot_down {
                full[k] = *it.next().unwrap();
            }
        }
        (0..t.dim)
            .map(|a| {
                full[slot_up] = a;
                full[slot_down] = a;
                t.get(&full)
            })
            .fold(S::zero(), |acc, v| acc + v)
    }))
}

/// Tensor product of two tensors, slots concatenated.
pub fn outer<S: Scalar>(a: &Tensor<S>, b: &Tensor<S>) -> Result<Tensor<S>> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(a.dim, b.dim));
    }
    let mut slots = a.slots.clone();
    slots.extend_from_slice(&b.slots);
    let data = a.data.iter().flat_map(|x| b.data.iter().map(move |&y| *x * y)).collect();
    Tensor::from_data(a.dim, slots, data)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DifferentialForm<S = f64> {
    dim: usize,
    degree: usize,
    data: Vec<S>,
}

impl<S: Scalar> DifferentialForm<S> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Self { dim, degree, data: vec![S::zero(); dim.pow(degree as u32)] }
    }

    pub fn scalar(dim: usize, v: S) -> Self {
        Self { dim, degree: 0, data: vec![v] }
    }

    /// Fills every permutation of each sorted index tuple from `f(sorted)`.
    pub fn from_sorted(dim: usize, degree: usize, mut f: impl FnMut(&[usize]) -> S) -> Self {
        let mut form = Self::zero(dim, degree);
        for combo in combinations(dim, degree) {
            let v = f(&combo);
            if v != S::zero() {
                form.set_antisymmetric(&combo, v);
            }
        }
        form
    }

    /// Accumulates `coef · dx^{i₁} ∧ … ∧ dx^{i_p}` terms; indices need not be sorted.
    pub fn from_terms<'a>(
        dim: usize,
        degree: usize,
        terms: impl IntoIterator<Item = (S, &'a [usize])>,
    ) -> Result<Self> {
        let mut sorted = std::collections::BTreeMap::<Vec<usize>, S>::new();
        for (c, idx) in terms {
            if idx.len() != degree {
                return Err(Error::DegreeMismatch(idx.len(), degree));
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= dim) {
                return Err(Error::DimensionMismatch(bad, dim));
            }
            let s = permutation_sign(idx);
            if s == 0 {
                continue;
            }
            let mut key = idx.to_vec();
            key.sort_unstable();
            *sorted.entry(key).or_insert(S::zero()) += sign_times(s, c);
        }
        let mut form = Self::zero(dim, degree);
        for (k, v) in sorted {
            form.set_antisymmetric(&k, v);
        }
        Ok(form)
    }

    /// The coordinate form `dx^{i₁} ∧ … ∧ dx^{i_p}`.
    pub fn basis(dim: usize, idx: &[usize]) -> Result<Self> {
        Self::from_terms(dim, idx.len(), [(S::one(), idx)])
    }

    /// Sets `idx` and all its permutations consistently with antisymmetry.
    pub fn set_antisymmetric(&mut self, idx: &[usize], v: S) {
        if self.degree == 0 {
            self.data[0] = v;
            return;
        }
        let mut buf = vec![0; self.degree];
        for (p, s) in permutations(self.degree) {
            for k in 0..self.degree {
                buf[k] = idx[p[k]];
            }
            let o = offset(self.dim, &buf);
            self.data[o] = sign_times(s, v);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn get(&self, idx: &[usize]) -> S {
        self.data[offset(self.dim, idx)]
    }

    pub fn max_abs(&self) -> f64 {
        largest(self.data.iter())
    }

    pub fn max_abs_diff(&self, other: &DifferentialForm<S>) -> f64 {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree));
        self.data.iter().zip(&other.data).fold(0.0, |m, (&a, &b)| m.max((a - b).re().abs()))
    }

    pub fn scale_by(&self, k: S) -> Self {
        Self { data: self.data.iter().map(|&v| v * k).collect(), ..self.clone() }
    }

    /// Components rounded to `f64`.
    pub fn lower(&self) -> DifferentialForm {
        DifferentialForm { dim: self.dim, degree: self.degree, data: self.data.iter().map(|v| v.re()).collect() }
    }

    /// Exact widening of an `f64` form.
    pub fn raise(form: &DifferentialForm) -> Self {
        Self { dim: form.dim, degree: form.degree, data: form.data.iter().map(|&v| S::cst(v)).collect() }
    }

    /// Largest violation of antisymmetry under transposition of adjacent slots.
    pub fn antisymmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let t = self.as_tensor();
        let mut sw = vec![0; self.degree];
        t.for_each(|idx, v| {
            for k in 0..self.degree.saturating_sub(1) {
                sw.copy_from_slice(idx);
                sw.swap(k, k + 1);
                worst = worst.max((v + t.get(&sw)).re().abs());
            }
        });
        worst
    }

    pub fn as_tensor(&self) -> Tensor<S> {
        Tensor { dim: self.dim, slots: vec![Valence::Down; self.degree], data: self.data.clone() }
    }

    /// Interprets a fully covariant tensor as a form after checking antisymmetry.
    pub fn try_from_tensor(t: &Tensor<S>, tol: f64) -> Result<Self> {
        require_covariant(t)?;
        let form = Self { dim: t.dim, degree: t.rank(), data: t.data.clone() };
        if form.antisymmetry_defect() > tol {
            return Err(Error::MixedValence);
        }
        Ok(form)
    }

    /// Index inclusion into a larger chart: coordinate `k` maps to `map[k]`.
    pub fn embed(&self, dim: usize, map: &[usize]) -> Result<Self> {
        if map.len() != self.dim {
            return Err(Error::DimensionMismatch(map.len(), self.dim));
        }
        let mut out = Self::zero(dim, self.degree);
        let mut tgt = vec![0; self.degree];
        self.as_tensor().for_each(|idx, v| {
            if v != S::zero() {
                for k in 0..idx.len() {
                    tgt[k] = map[idx[k]];
                }
                let o = offset(dim, &tgt);
                out.data[o] = v;
            }
        });
        Ok(out)
    }

    /// Restriction to a subset of coordinates: result coordinate `k` is `map[k]`.
    pub fn restrict(&self, map: &[usize]) -> Self {
        let dim = map.len();
        let mut src = vec![0; self.degree];
        let t = Tensor::from_fn(dim, vec![Valence::Down; self.degree], |idx| {
            for k in 0..idx.len() {
                src[k] = map[idx[k]];
            }
            self.get(&src)
        });
        Self { dim, degree: self.degree, data: t.data }
    }
}

impl<S: Scalar> Add for &DifferentialForm<S> {
    type Output = DifferentialForm<S>;
    fn add(self, o: &DifferentialForm<S>) -> DifferentialForm<S> {
        assert_eq!((self.dim, self.degree), (o.dim, o.degree));
        DifferentialForm {
            data: self.data.iter().zip(&o.data).map(|(&a, &b)| a + b).collect(),
            ..self.clone()
        }
    }
}

impl<S: Scalar> Sub for &DifferentialForm<S> {
    type Output = DifferentialForm<S>;
    fn sub(self, o: &DifferentialForm<S>) -> DifferentialForm<S> {
        assert_eq!((self.dim, self.degree), (o.dim, o.degree));
        DifferentialForm {
            data: self.data.iter().zip(&o.data).map(|(&a, &b)| a - b).collect(),
            ..self.clone()
        }
    }
}

impl<S: Scalar> Mul<f64> for &DifferentialForm<S> {
    type Output = DifferentialForm<S>;
    fn mul(self, k: f64) -> DifferentialForm<S> {
        self.scale_by(S::cst(k))
    }
}

impl<S: Scalar> Neg for &DifferentialForm<S> {
    type Output = DifferentialForm<S>;
    fn neg(self) -> DifferentialForm<S> {
        DifferentialForm { data: self.data.iter().map(|&v| -v).collect(), ..self.clone() }
    }
}

/// Exterior product. On sorted index sets,
/// `(α∧β)_I = Σ sign(J,K) α_J β_K` over splittings of `I` into sorted `J`, `K`.
pub fn wedge<S: Scalar>(alpha: &DifferentialForm<S>, beta: &DifferentialForm<S>) -> Result<DifferentialForm<S>> {
    if alpha.dim != beta.dim {
        return Err(Error::DimensionMismatch(alpha.dim, beta.dim));
    }
    let (p, q, n) = (alpha.degree, beta.degree, alpha.dim);
    if p + q > n {
        return Err(Error::DegreeOverflow(p + q, n));
    }
    let splits = combinations(p + q, p);
    let mut j = vec![0; p];
    let mut k = vec![0; q];
    let mut order = vec![0; p + q];
    Ok(DifferentialForm::from_sorted(n, p + q, |idx| {
        let mut acc = S::zero();
        for pos in &splits {
            let (mut a, mut b) = (0, 0);
            for (slot, &i) in idx.iter().enumerate() {
                if pos.contains(&slot) {
                    j[a] = i;
                    order[a] = slot;
                    a += 1;
                } else {
                    k[b] = i;
                    order[p + b] = slot;
                    b += 1;
                }
            }
            acc += sign_times(permutation_sign(&order), alpha.get(&j) * beta.get(&k));
        }
        acc
    }))
}

/// `(v ⌟ ω)_{μ₂…μ_p} = v^λ ω_{λμ₂…μ_p}`.
pub fn interior_product<S: Scalar>(v: &[S], omega: &DifferentialForm<S>) -> Result<DifferentialForm<S>> {
    if v.len() != omega.dim {
        return Err(Error::DimensionMismatch(v.len(), omega.dim));
    }
    if omega.degree == 0 {
        return Err(Error::ZeroDegree);
    }
    let n = omega.dim;
    let block = n.pow(omega.degree as u32 - 1);
    let mut data = vec![S::zero(); block];
    for (l, &vl) in v.iter().enumerate() {
        if vl != S::zero() {
            for (o, d) in data.iter_mut().enumerate() {
                *d += vl * omega.data[l * block + o];
            }
        }
    }
    Ok(DifferentialForm { dim: n, degree: omega.degree - 1, data })
}

/// `ω ∧ ω ∧ … ∧ ω` (`k` factors); `k = 0` gives the constant 1.
pub fn wedge_power<S: Scalar>(omega: &DifferentialForm<S>, k: usize) -> Result<DifferentialForm<S>> {
    let mut acc = DifferentialForm::scalar(omega.dim, S::one());
    for _ in 0..k {
        acc = wedge(&acc, omega)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type DifferentialForm = super::DifferentialForm<f64>;
    type Tensor = super::Tensor<f64>;

    fn random_form(dim: usize, deg: usize, seed: &[f64]) -> DifferentialForm {
        let mut it = seed.iter().cycle();
        DifferentialForm::from_sorted(dim, deg, |_| *it.next().unwrap())
    }

    #[test]
    fn basis_wedge_convention() {
        let dx1 = DifferentialForm::basis(5, &[0]).unwrap();
        let dx2 = DifferentialForm::basis(5, &[1]).unwrap();
        let w = wedge(&dx1, &dx2).unwrap();
        assert_eq!(w.get(&[0, 1]), 1.0);
        assert_eq!(w.get(&[1, 0]), -1.0);
        assert_eq!(w, DifferentialForm::basis(5, &[0, 1]).unwrap());
    }

    #[test]
    fn wedge_errors() {
        let a = DifferentialForm::zero(5, 3);
        let b = DifferentialForm::zero(6, 1);
        assert!(matches!(wedge(&a, &b), Err(Error::DimensionMismatch(5, 6))));
        let c = DifferentialForm::zero(5, 3);
        assert!(matches!(wedge(&a, &c), Err(Error::DegreeOverflow(6, 5))));
    }

    #[test]
    fn interior_basis_case() {
        let e1 = [1.0, 0.0, 0.0, 0.0, 0.0];
        let w = DifferentialForm::basis(5, &[0, 1]).unwrap();
        let r = interior_product(&e1, &w).unwrap();
        assert_eq!(r, DifferentialForm::basis(5, &[1]).unwrap());
        assert!(matches!(
            interior_product(&e1, &DifferentialForm::scalar(5, 2.0)),
            Err(Error::ZeroDegree)
        ));
    }

    #[test]
    fn trace_of_identity() {
        let t = contract(&Tensor::identity(5), 0, 1).unwrap();
        assert_eq!(t.rank(), 0);
        assert_eq!(t.get(&[]), 5.0);
        assert!(matches!(contract(&Tensor::identity(5), 1, 0), Err(Error::BadSlots(1, 0))));
    }

    #[test]
    fn contraction_is_linear() {
        let t = Tensor::from_fn(5, vec![Valence::Up, Valence::Down, Valence::Down], |i| {
            (i[0] * 7 + i[1] * 3 + i[2]) as f64 * 0.1 - 1.0
        });
        let a = contract(&t.scale(2.5), 0, 2).unwrap();
        let b = contract(&t, 0, 2).unwrap().scale(2.5);
        assert!(a.max_abs_diff(&b) < 1e-14);
    }

    #[test]
    fn projections() {
        let t = Tensor::from_fn(5, vec![Valence::Down; 2], |i| (i[0] as f64 + 1.0) * (i[1] as f64 - 2.3).powi(2));
        let s = symmetrize(&t).unwrap();
        let a = antisymmetrize(&t).unwrap();
        assert!(symmetrize(&s).unwrap().max_abs_diff(&s) < 1e-14);
        assert!(antisymmetrize(&s).unwrap().max_abs() < 1e-14);
        assert!((&s + &a.as_tensor()).max_abs_diff(&t) < 1e-14);
        assert!(matches!(symmetrize(&Tensor::identity(5)), Err(Error::MixedValence)));
        assert!(antisymmetrize(&a.as_tensor()).unwrap().max_abs_diff(&a) < 1e-14);
    }

    #[test]
    fn embed_and_restrict_round_trip() {
        let w = random_form(4, 2, &[0.3, -1.0, 2.0, 0.5, 0.25, 1.5]);
        let e = w.embed(6, &[1, 2, 3, 4]).unwrap();
        assert_eq!(e.get(&[1, 2]), w.get(&[0, 1]));
        assert_eq!(e.get(&[0, 5]), 0.0);
        assert_eq!(e.restrict(&[1, 2, 3, 4]), w);
    }

    proptest! {
        #[test]
        fn graded_commutativity(
            c in proptest::collection::vec(-2.0f64..2.0, 10),
            p in 1usize..3, q in 1usize..3,
        ) {
            let a = random_form(5, p, &c);
            let b = random_form(5, q, &c[3..]);
            let ab = wedge(&a, &b).unwrap();
            let ba = wedge(&b, &a).unwrap();
            let sign = if (p * q) % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!(ab.max_abs_diff(&(&ba * sign)) < 1e-13);
            prop_assert!(ab.antisymmetry_defect() < 1e-13);
        }

        #[test]
        fn wedge_is_associative(c in proptest::collection::vec(-2.0f64..2.0, 12)) {
            let a = random_form(6, 1, &c);
            let b = random_form(6, 2, &c[4..]);
            let d = random_form(6, 2, &c[7..]);
            let l = wedge(&wedge(&a, &b).unwrap(), &d).unwrap();
            let r = wedge(&a, &wedge(&b, &d).unwrap()).unwrap();
            let scale = l.max_abs().max(1.0);
            prop_assert!(l.max_abs_diff(&r) <= 1e-13 * scale);
        }

        #[test]
        fn interior_product_is_antiderivation(
            c in proptest::collection::vec(-2.0f64..2.0, 10),
            v in proptest::collection::vec(-2.0f64..2.0, 5),
            p in 1usize..3,
        ) {
            let a = random_form(5, p, &c);
            let b = random_form(5, 2, &c[5..]);
            let lhs = interior_product(&v, &wedge(&a, &b).unwrap()).unwrap();
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            let r1 = wedge(&interior_product(&v, &a).unwrap(), &b).unwrap();
            let r2 = wedge(&a, &interior_product(&v, &b).unwrap()).unwrap();
            prop_assert!(lhs.max_abs_diff(&(&r1 + &(&r2 * sign))) < 1e-12);
            let twice = interior_product(&v, &interior_product(&v, &b).unwrap()).unwrap();
            prop_assert!(twice.max_abs() < 1e-13);
        }
    }
}
