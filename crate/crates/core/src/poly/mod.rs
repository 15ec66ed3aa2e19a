//! Sparse multivariate polynomials over Q.

pub mod eval;
mod gcd;
mod resultant;
pub mod text;
pub mod univariate;

pub use eval::SignEvaluator;
pub use gcd::{divides, gcd, square_free_part};
pub use resultant::{bareiss_det, sylvester_resultant};
pub use text::{parse_canonical, ParseError};
pub use univariate::{sturm_count, AlgebraicReal, Bound, SturmChain, UniPoly};

use crate::geometry::PlaneChart;
use crate::rational::{sign, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub const MAX_VARS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("point has {got} coordinates, polynomial has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("derivative order {0} out of range")]
    OrderOutOfRange(u32),
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("division by the zero polynomial")]
    ZeroDivisor,
}

/// Exponent vector, compared in graded lexicographic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub [u16; MAX_VARS]);

impl Monomial {
    pub fn from_slice(e: &[u16]) -> Self {
        let mut m = [0u16; MAX_VARS];
        m[..e.len()].copy_from_slice(e);
        Monomial(m)
    }

    pub fn unit(var: usize) -> Self {
        let mut m = Monomial::default();
        m.0[var] = 1;
        m
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn exp(&self, var: usize) -> u16 {
        self.0[var]
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut m = self.0;
        for (a, b) in m.iter_mut().zip(o.0.iter()) {
            *a += *b;
        }
        Monomial(m)
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        self.0.iter().zip(o.0.iter()).all(|(a, b)| a <= b)
    }

    /// `o / self`, assuming `self` divides `o`.
    pub fn quotient(&self, o: &Monomial) -> Monomial {
        let mut m = o.0;
        for (a, b) in m.iter_mut().zip(self.0.iter()) {
            *a -= *b;
        }
        Monomial(m)
    }

    pub fn with_exp(&self, var: usize, e: u16) -> Monomial {
        let mut m = *self;
        m.0[var] = e;
        m
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree().cmp(&o.degree()).then_with(|| self.0.cmp(&o.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Terms keyed by monomial in ascending grlex order; no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables");
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::default(), c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::unit(i), Q::one());
        p
    }

    pub fn monomial(nvars: usize, exps: &[u16], c: Q) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::from_slice(exps), c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u16>, Q)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert!(e.len() <= nvars);
            p.add_term(Monomial::from_slice(&e), c);
        }
        p
    }

    pub fn from_monomials(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn constant_term(&self) -> Q {
        self.terms.get(&Monomial::default()).cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeff(&self, exps: &[u16]) -> Q {
        self.terms.get(&Monomial::from_slice(exps)).cloned().unwrap_or_else(Q::zero)
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().next_back().map_or(0, |m| m.degree())
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(var) as u32).max().unwrap_or(0)
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.exp(var) > 0)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Q {
        self.leading_term().map_or_else(Q::zero, |(_, c)| c.clone())
    }

    pub fn scale(&self, k: &Q) -> Self {
        if k.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect() }
    }

    pub fn mul_monomial(&self, mono: &Monomial, k: &Q) -> Self {
        if k.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.mul(mono), c * k)).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn eval(&self, p: &[Q]) -> Result<Q, PolyError> {
        if p.len() != self.nvars {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, got: p.len() });
        }
        let mut pows: Vec<Vec<Q>> = Vec::with_capacity(self.nvars);
        for (i, x) in p.iter().enumerate() {
            let d = self.degree_in(i) as usize;
            let mut v = Vec::with_capacity(d + 1);
            v.push(Q::one());
            for k in 1..=d {
                let next = &v[k - 1] * x;
                v.push(next);
            }
            pows.push(v);
        }
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, pw) in pows.iter().enumerate() {
                let e = m.exp(i) as usize;
                if e > 0 {
                    t *= &pw[e];
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn sign_at(&self, p: &[Q]) -> Result<i8, PolyError> {
        self.eval(p).map(|v| sign(&v))
    }

    pub fn partial(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exp(var);
            if e > 0 {
                out.add_term(m.with_exp(var, e - 1), c * Q::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    /// Substitute `subs[i]` for variable i; all substitutes share one variable count.
    pub fn compose(&self, subs: &[MultiPoly]) -> Self {
        assert_eq!(subs.len(), self.nvars);
        let target = subs.first().map_or(0, |s| s.nvars);
        let mut cache: Vec<Vec<MultiPoly>> = subs.iter().map(|s| vec![Self::one(s.nvars), s.clone()]).collect();
        let mut out = Self::zero(target);
        for (m, c) in &self.terms {
            let mut t = Self::constant(target, c.clone());
            for (i, cache_i) in cache.iter_mut().enumerate() {
                let e = m.exp(i) as usize;
                while cache_i.len() <= e {
                    let next = &cache_i[cache_i.len() - 1] * &subs[i];
                    cache_i.push(next);
                }
                if e > 0 {
                    t = &t * &cache_i[e];
                }
            }
            out = out + t;
        }
        out
    }

    /// Reinterpret in `nvars` variables, mapping variable i to `map[i]`.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.nvars);
        let mut out = Self::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = Monomial::default();
            for (i, &j) in map.iter().enumerate() {
                e.0[j] += m.exp(i);
            }
            out.add_term(e, c.clone());
        }
        out
    }

    /// Pad with extra trailing variables.
    pub fn extend_vars(&self, nvars: usize) -> Self {
        assert!(nvars >= self.nvars && nvars <= MAX_VARS);
        MultiPoly { nvars, terms: self.terms.clone() }
    }

    pub fn homogeneous_component(&self, k: u32) -> Self {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(m, _)| m.degree() == k).map(|(m, c)| (*m, c.clone())).collect(),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        let d = self.degree();
        self.terms.keys().all(|m| m.degree() == d)
    }

    /// Coefficients as a polynomial in `var`; entry k multiplies `var^k`.
    pub fn coeffs_in(&self, var: usize) -> Vec<MultiPoly> {
        let d = self.degree_in(var) as usize;
        let mut out = vec![Self::zero(self.nvars); d + 1];
        for (m, c) in &self.terms {
            out[m.exp(var) as usize].terms.insert(m.with_exp(var, 0), c.clone());
        }
        out
    }

    pub fn from_coeffs_in(var: usize, coeffs: &[MultiPoly], nvars: usize) -> Self {
        let mut out = Self::zero(nvars);
        for (k, c) in coeffs.iter().enumerate() {
            for (m, v) in &c.terms {
                out.add_term(m.with_exp(var, m.exp(var) + k as u16), v.clone());
            }
        }
        out
    }

    /// Univariate view when no other variable occurs.
    pub fn to_univariate(&self, var: usize) -> Option<UniPoly> {
        let d = self.degree_in(var) as usize;
        let mut c = vec![Q::zero(); d + 1];
        for (m, v) in &self.terms {
            if m.degree() != m.exp(var) as u32 {
                return None;
            }
            c[m.exp(var) as usize] = v.clone();
        }
        Some(UniPoly::new(c))
    }

    pub fn from_univariate(u: &UniPoly, nvars: usize, var: usize) -> Self {
        let mut out = Self::zero(nvars);
        for (k, c) in u.coeffs().iter().enumerate() {
            out.add_term(Monomial::unit(var).with_exp(var, k as u16), c.clone());
        }
        out
    }

    /// Exact quotient `self / g` when g divides self.
    pub fn div_exact(&self, g: &MultiPoly) -> Option<MultiPoly> {
        let (gm, gc) = g.leading_term()?;
        let (gm, gc) = (*gm, gc.clone());
        let ginv = gc.recip();
        let mut r = self.clone();
        let mut quot = Self::zero(self.nvars);
        while let Some((rm, rc)) = r.leading_term() {
            if !gm.divides(rm) {
                return None;
            }
            let tm = gm.quotient(rm);
            let tc = rc * &ginv;
            r = r - g.mul_monomial(&tm, &tc);
            quot.add_term(tm, tc);
        }
        Some(quot)
    }

    pub fn div_exact_scalar(&self, k: &Q) -> Self {
        self.scale(&k.recip())
    }

    /// Positive rational content making the coefficients coprime integers.
    pub fn content(&self) -> Q {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Q::one();
        }
        Q::new(num, den)
    }

    /// Coprime integer coefficients with positive leading coefficient.
    pub fn normalized(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.leading_coeff().is_negative() {
            c = -c;
        }
        self.scale(&c.recip())
    }

    pub fn is_scalar_multiple_of(&self, o: &MultiPoly) -> bool {
        self.normalized() == o.normalized()
    }

    pub fn display_with(&self, names: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mut factors = Vec::new();
            for v in 0..self.nvars {
                match m.exp(v) {
                    0 => {}
                    1 => factors.push(names.get(v).map_or_else(|| format!("x{}", v + 1), |n| n.to_string())),
                    e => factors.push(format!("{}^{}", names.get(v).map_or_else(|| format!("x{}", v + 1), |n| n.to_string()), e)),
                }
            }
            let coeff = crate::rational::fmt_q(&a);
            if factors.is_empty() {
                s.push_str(&coeff);
            } else {
                if !a.is_one() {
                    s.push_str(&coeff);
                    s.push('*');
                }
                s.push_str(&factors.join("*"));
            }
        }
        s
    }

    /// Canonical sparse text, leading term first.
    pub fn to_canonical(&self) -> String {
        text::format_canonical(self)
    }

    /// `f(origin + s u + t w)`.
    pub fn restrict_to_chart(&self, chart: &PlaneChart) -> MultiPoly {
        assert_eq!(self.nvars, 3, "restriction needs a trivariate polynomial");
        let subs: Vec<MultiPoly> = (0..3)
            .map(|i| {
                MultiPoly::from_terms(
                    2,
                    [
                        (vec![0, 0], chart.origin.get(i).clone()),
                        (vec![1, 0], chart.u.get(i).clone()),
                        (vec![0, 1], chart.w.get(i).clone()),
                    ],
                )
            })
            .collect();
        self.compose(&subs)
    }
}

pub fn restrict_to_chart(f: &MultiPoly, chart: &PlaneChart) -> MultiPoly {
    f.restrict_to_chart(chart)
}

pub fn eval(f: &MultiPoly, p: &[Q]) -> Result<Q, PolyError> {
    f.eval(p)
}

/// `(sum_i v_i d/dx_i)^k f` in variables (x1, x2, x3, v1, v2, v3).
pub fn directional_derivative(f: &MultiPoly, k: u32) -> Result<MultiPoly, PolyError> {
    if k < 1 || k > f.degree() {
        return Err(PolyError::OrderOutOfRange(k));
    }
    assert_eq!(f.nvars(), 3, "directional derivative of a trivariate polynomial");
    let mut g = f.extend_vars(6);
    for _ in 0..k {
        let mut next = MultiPoly::zero(6);
        for i in 0..3 {
            next = next + &g.partial(i) * &MultiPoly::var(6, 3 + i);
        }
        g = next;
    }
    Ok(g)
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: &[&str] = if self.nvars <= 3 { &["x", "y", "z"] } else { &[] };
        f.write_str(&self.display_with(names))
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, o: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, o: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, -c);
        }
        out
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, o: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        let mut out = MultiPoly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Q::one())
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $f(self, o: MultiPoly) -> MultiPoly {
                (&self).$f(&o)
            }
        }
        impl<'a> $tr<&'a MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $f(self, o: &MultiPoly) -> MultiPoly {
                (&self).$f(o)
            }
        }
        impl<'a> $tr<MultiPoly> for &'a MultiPoly {
            type Output = MultiPoly;
            fn $f(self, o: MultiPoly) -> MultiPoly {
                self.$f(&o)
            }
        }
    };
}

owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);
