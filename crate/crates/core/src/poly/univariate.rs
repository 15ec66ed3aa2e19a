//! Dense univariate polynomials, Sturm chains and real algebraic numbers.

use super::{MultiPoly, PolyError};
use crate::rational::{sign, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

/// Coefficients low to high, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    c: Vec<Q>,
}

impl UniPoly {
    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        UniPoly { c }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        UniPoly::new(c.iter().map(|&k| Q::from_integer(BigInt::from(k))).collect())
    }

    pub fn zero() -> Self {
        UniPoly { c: Vec::new() }
    }

    pub fn constant(k: Q) -> Self {
        UniPoly::new(vec![k])
    }

    pub fn x() -> Self {
        UniPoly::new(vec![Q::zero(), Q::one()])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lc(&self) -> Q {
        self.c.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for k in self.c.iter().rev() {
            acc = acc * x + k;
        }
        acc
    }

    pub fn sign_at(&self, x: &Q) -> i8 {
        if let Some(s) = hom_sign(&self.c, x.numer(), x.denom()) {
            return s;
        }
        sign(&self.eval(x))
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.c.iter().all(|x| x.is_integer())
    }

    pub fn sign_at_pos_inf(&self) -> i8 {
        sign(&self.lc())
    }

    pub fn sign_at_neg_inf(&self) -> i8 {
        let s = sign(&self.lc());
        if self.deg() % 2 == 1 {
            -s
        } else {
            s
        }
    }

    pub fn derivative(&self) -> Self {
        UniPoly::new(self.c.iter().enumerate().skip(1).map(|(k, x)| x * Q::from_integer(BigInt::from(k))).collect())
    }

    pub fn scale(&self, k: &Q) -> Self {
        UniPoly::new(self.c.iter().map(|x| x * k).collect())
    }

    /// Euclidean division over Q.
    pub fn divrem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.deg();
        if self.is_zero() || self.deg() < dd {
            return (UniPoly::zero(), self.clone());
        }
        let inv = d.lc().recip();
        let mut r = self.c.clone();
        let mut quot = vec![Q::zero(); self.deg() - dd + 1];
        for k in (0..quot.len()).rev() {
            let t = &r[k + dd] * &inv;
            if !t.is_zero() {
                for (j, dj) in d.c.iter().enumerate() {
                    let s = &t * dj;
                    r[k + j] -= s;
                }
            }
            quot[k] = t;
        }
        r.truncate(dd);
        (UniPoly::new(quot), UniPoly::new(r))
    }

    pub fn rem(&self, d: &UniPoly) -> UniPoly {
        self.divrem(d).1
    }

    pub fn div_exact(&self, d: &UniPoly) -> UniPoly {
        let (quot, r) = self.divrem(d);
        debug_assert!(r.is_zero());
        quot
    }

    /// Positive multiple with coprime integer coefficients.
    pub fn primitive(&self) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        if self.has_integer_coeffs() {
            let g = self.c.iter().fold(BigInt::zero(), |g, x| g.gcd(x.numer()));
            return UniPoly { c: self.c.iter().map(|x| Q::from_integer(x.numer() / &g)).collect() };
        }
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for x in &self.c {
            num = num.gcd(x.numer());
            den = den.lcm(x.denom());
        }
        self.scale(&Q::new(den, num))
    }

    /// Monic gcd (zero only if both inputs are zero).
    pub fn gcd(&self, o: &UniPoly) -> UniPoly {
        let mut a = self.primitive();
        let mut b = o.primitive();
        while !b.is_zero() {
            let r = a.rem(&b).primitive();
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let l = a.lc().recip();
        a.scale(&l)
    }

    pub fn square_free_part(&self) -> UniPoly {
        if self.deg() == 0 {
            return self.primitive();
        }
        let p = self.primitive();
        if coprime_to_derivative_mod(&p, MOD_PRIME) {
            return p;
        }
        let g = self.gcd(&self.derivative());
        self.div_exact(&g).primitive()
    }

    /// 1 + max |a_i / a_n|: every real root lies strictly inside (-B, B).
    pub fn cauchy_bound(&self) -> Q {
        let l = self.lc().abs();
        let m = self.c[..self.c.len().saturating_sub(1)].iter().map(|x| x.abs() / &l).max().unwrap_or_else(Q::zero);
        (m + Q::one()).ceil()
    }

    /// `self(a x + b)`.
    pub fn compose_linear(&self, a: &Q, b: &Q) -> UniPoly {
        let lin = UniPoly::new(vec![b.clone(), a.clone()]);
        let mut acc = UniPoly::zero();
        for k in self.c.iter().rev() {
            acc = &(&acc * &lin) + &UniPoly::constant(k.clone());
        }
        acc
    }

    pub fn to_multi(&self, nvars: usize, var: usize) -> MultiPoly {
        MultiPoly::from_univariate(self, nvars, var)
    }
}

const MOD_PRIME: u64 = 0x1fff_ffff_ffff_ffff;

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    r
}

fn trim_mod(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Certifies gcd(f, f') = 1 over Q by working modulo the prime m.
/// False means "unknown".
fn coprime_to_derivative_mod(f: &UniPoly, m: u64) -> bool {
    let red = |x: &Q| -> u64 {
        let n = x.to_integer() % BigInt::from(m);
        let n = if n.is_negative() { n + BigInt::from(m) } else { n };
        n.try_into().unwrap()
    };
    let mut a: Vec<u64> = f.c.iter().map(red).collect();
    // the degree must survive reduction for the certificate to hold
    if a.last() == Some(&0) || !f.c.iter().all(|x| x.is_integer()) {
        return false;
    }
    let mut b: Vec<u64> = (1..a.len()).map(|i| mulmod(a[i], i as u64 % m, m)).collect();
    trim_mod(&mut b);
    if b.is_empty() {
        return false;
    }
    while !b.is_empty() {
        let inv = powmod(*b.last().unwrap(), m - 2, m);
        while a.len() >= b.len() {
            let k = mulmod(*a.last().unwrap(), inv, m);
            let off = a.len() - b.len();
            for (i, bi) in b.iter().enumerate() {
                a[off + i] = (a[off + i] + m - mulmod(k, *bi, m)) % m;
            }
            trim_mod(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len() == 1
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, o: &UniPoly) -> UniPoly {
        let n = self.c.len().max(o.c.len());
        let z = Q::zero();
        UniPoly::new((0..n).map(|i| self.c.get(i).unwrap_or(&z) + o.c.get(i).unwrap_or(&z)).collect())
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, o: &UniPoly) -> UniPoly {
        let n = self.c.len().max(o.c.len());
        let z = Q::zero();
        UniPoly::new((0..n).map(|i| self.c.get(i).unwrap_or(&z) - o.c.get(i).unwrap_or(&z)).collect())
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut c = vec![Q::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        UniPoly::new(c)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::new(self.c.iter().map(|x| -x).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bound {
    NegInf,
    Finite(Q),
    PosInf,
}

impl Bound {
    fn key(&self) -> (i8, Option<&Q>) {
        match self {
            Bound::NegInf => (-1, None),
            Bound::Finite(x) => (0, Some(x)),
            Bound::PosInf => (1, None),
        }
    }

    fn lt(&self, o: &Bound) -> bool {
        match (self.key(), o.key()) {
            ((0, Some(a)), (0, Some(b))) => a < b,
            ((a, _), (b, _)) => a < b,
        }
    }
}

/// f, f', then negated remainders (each rescaled by a positive constant).
#[derive(Debug, Clone)]
pub struct SturmChain {
    chain: Vec<UniPoly>,
    reduced: Vec<UniPoly>,
}

impl SturmChain {
    pub fn new(f: &UniPoly) -> Result<Self, PolyError> {
        if f.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let mut chain = vec![f.clone()];
        let d = f.derivative();
        if !d.is_zero() {
            chain.push(d);
            loop {
                let n = chain.len();
                let r = chain[n - 2].rem(&chain[n - 1]);
                if r.is_zero() {
                    break;
                }
                chain.push((-&r).primitive());
            }
        }
        let last = chain.last().unwrap();
        let reduced = if last.deg() > 0 { chain.iter().map(|p| p.div_exact(last)).collect() } else { chain.clone() };
        Ok(SturmChain { chain, reduced })
    }

    pub fn polys(&self) -> &[UniPoly] {
        &self.chain
    }

    pub fn variations(&self, at: &Bound) -> usize {
        let mut count = 0;
        let mut prev = 0i8;
        for p in &self.reduced {
            let s = match at {
                Bound::NegInf => p.sign_at_neg_inf(),
                Bound::PosInf => p.sign_at_pos_inf(),
                Bound::Finite(x) => p.sign_at(x),
            };
            if s != 0 {
                if prev != 0 && s != prev {
                    count += 1;
                }
                prev = s;
            }
        }
        count
    }

    /// Distinct real roots in (a, b].
    pub fn count(&self, a: &Bound, b: &Bound) -> usize {
        if !a.lt(b) {
            return 0;
        }
        self.variations(a).saturating_sub(self.variations(b))
    }

    fn count_q(&self, a: &Q, b: &Q) -> usize {
        self.count(&Bound::Finite(a.clone()), &Bound::Finite(b.clone()))
    }
}

/// Distinct real roots of a univariate polynomial in (a, b].
pub fn sturm_count(f: &MultiPoly, a: &Bound, b: &Bound) -> Result<usize, PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    if !a.lt(b) {
        return Err(PolyError::DegenerateInput("sturm_count needs a < b"));
    }
    let used: Vec<usize> = (0..f.nvars()).filter(|&i| f.uses_var(i)).collect();
    let u = match used.as_slice() {
        [] => return Ok(0),
        [v] => f.to_univariate(*v).unwrap(),
        _ => return Err(PolyError::DegenerateInput("sturm_count needs a univariate polynomial")),
    };
    Ok(SturmChain::new(&u)?.count(a, b))
}

/// A real root of a square-free polynomial, exact or isolated in an open
/// interval with nonzero, opposite endpoint signs.
#[derive(Debug, Clone)]
pub enum AlgebraicReal {
    Rational(Q),
    Isolated { poly: UniPoly, lo: Q, hi: Q, sign_lo: i8 },
}

impl AlgebraicReal {
    pub fn lower(&self) -> &Q {
        match self {
            AlgebraicReal::Rational(x) => x,
            AlgebraicReal::Isolated { lo, .. } => lo,
        }
    }

    pub fn upper(&self) -> &Q {
        match self {
            AlgebraicReal::Rational(x) => x,
            AlgebraicReal::Isolated { hi, .. } => hi,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, AlgebraicReal::Rational(_))
    }

    pub fn approx(&self) -> f64 {
        crate::rational::to_f64(&((self.lower() + self.upper()) / Q::from_integer(2.into())))
    }

    /// Halves the isolating interval.
    pub fn refine(&mut self) {
        if let AlgebraicReal::Isolated { poly, lo, hi, sign_lo } = self {
            let mid = (&*lo + &*hi) / Q::from_integer(2.into());
            let s = poly.sign_at(&mid);
            if s == 0 {
                *self = AlgebraicReal::Rational(mid);
            } else if s == *sign_lo {
                *lo = mid;
            } else {
                *hi = mid;
            }
        }
    }

    pub fn width(&self) -> Q {
        self.upper() - self.lower()
    }

    /// Sign of p at this number.
    pub fn sign_of(&mut self, p: &UniPoly) -> i8 {
        if p.is_zero() {
            return 0;
        }
        if let AlgebraicReal::Rational(x) = self {
            return p.sign_at(x);
        }
        for _ in 0..FILTER_STEPS {
            match self {
                AlgebraicReal::Rational(x) => return p.sign_at(x),
                AlgebraicReal::Isolated { lo, hi, .. } => {
                    if let Some(s) = interval_sign(p, lo, hi) {
                        return s;
                    }
                }
            }
            self.refine();
        }
        if let AlgebraicReal::Rational(x) = self {
            return p.sign_at(x);
        }
        if let AlgebraicReal::Isolated { poly, lo, hi, .. } = self {
            let g = poly.gcd(p);
            if g.deg() > 0 && g.sign_at(lo) * g.sign_at(hi) < 0 {
                return 0;
            }
        }
        if p.deg() == 0 {
            return sign(&p.lc());
        }
        let chain = SturmChain::new(p).expect("nonzero");
        loop {
            match self {
                AlgebraicReal::Rational(x) => return p.sign_at(x),
                AlgebraicReal::Isolated { lo, hi, .. } => {
                    if chain.count_q(lo, hi) == 0 {
                        return p.sign_at(hi);
                    }
                }
            }
            self.refine();
        }
    }

    /// Exact comparison, refining both as needed.
    pub fn compare(&mut self, o: &mut AlgebraicReal) -> Ordering {
        let mut checked = false;
        let mut rounds = 0;
        loop {
            match (&*self, &*o) {
                (AlgebraicReal::Rational(a), AlgebraicReal::Rational(b)) => return a.cmp(b),
                (AlgebraicReal::Rational(x), AlgebraicReal::Isolated { poly, lo, hi, .. }) => {
                    if x <= lo {
                        return Ordering::Less;
                    }
                    if x >= hi {
                        return Ordering::Greater;
                    }
                    if poly.sign_at(x) == 0 {
                        return Ordering::Equal;
                    }
                    o.refine();
                }
                (AlgebraicReal::Isolated { .. }, AlgebraicReal::Rational(_)) => return o.compare(self).reverse(),
                (
                    AlgebraicReal::Isolated { poly: pa, lo: la, hi: ha, .. },
                    AlgebraicReal::Isolated { poly: pb, lo: lb, hi: hb, .. },
                ) => {
                    if ha <= lb {
                        return Ordering::Less;
                    }
                    if hb <= la {
                        return Ordering::Greater;
                    }
                    rounds += 1;
                    if !checked && rounds > FILTER_STEPS {
                        checked = true;
                        let g = pa.gcd(pb);
                        if g.deg() > 0 {
                            let l = la.max(lb);
                            let h = ha.min(hb);
                            if g.sign_at(l) * g.sign_at(h) < 0 {
                                return Ordering::Equal;
                            }
                        }
                    }
                    if self.width() >= o.width() {
                        self.refine();
                    } else {
                        o.refine();
                    }
                }
            }
        }
    }
}

const FILTER_STEPS: usize = 24;

fn int_sign(x: &BigInt) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Sign of `sum c_i n^i d^(deg - i)` for integer c_i and d > 0.
fn hom_sign(c: &[Q], n: &BigInt, d: &BigInt) -> Option<i8> {
    if !c.iter().all(|x| x.is_integer()) {
        return None;
    }
    let mut it = c.iter().rev();
    let mut acc = match it.next() {
        Some(x) => x.numer().clone(),
        None => return Some(0),
    };
    let mut dp = BigInt::one();
    for k in it {
        dp *= d;
        acc = acc * n + k.numer() * &dp;
    }
    Some(int_sign(&acc))
}

/// Sign of p on all of [lo, hi] by interval Horner, if constant.
fn interval_sign(p: &UniPoly, lo: &Q, hi: &Q) -> Option<i8> {
    if p.has_integer_coeffs() {
        let den = lo.denom().lcm(hi.denom());
        let l = lo.numer() * (&den / lo.denom());
        let h = hi.numer() * (&den / hi.denom());
        let mut it = p.c.iter().rev();
        let first = it.next()?.numer().clone();
        let (mut a, mut b) = (first.clone(), first);
        let mut dp = BigInt::one();
        for c in it {
            dp *= &den;
            let cands = [&a * &l, &a * &h, &b * &l, &b * &h];
            let k = c.numer() * &dp;
            a = cands.iter().min().unwrap() + &k;
            b = cands.iter().max().unwrap() + &k;
        }
        return if a.is_positive() {
            Some(1)
        } else if b.is_negative() {
            Some(-1)
        } else {
            None
        };
    }
    let mut it = p.c.iter().rev();
    let first = it.next()?.clone();
    let (mut a, mut b) = (first.clone(), first);
    for c in it {
        let cands = [&a * lo, &a * hi, &b * lo, &b * hi];
        let mn = cands.iter().min().unwrap();
        let mx = cands.iter().max().unwrap();
        a = mn + c;
        b = mx + c;
    }
    if a.is_positive() {
        Some(1)
    } else if b.is_negative() {
        Some(-1)
    } else {
        None
    }
}

/// A rational strictly between a < b.
pub fn rational_between(a: &mut AlgebraicReal, b: &mut AlgebraicReal) -> Q {
    loop {
        let ua = a.upper().clone();
        let lb = b.lower().clone();
        if ua < lb {
            return (ua + lb) / Q::from_integer(2.into());
        }
        if ua == lb && !a.is_rational() && !b.is_rational() {
            return ua;
        }
        if !a.is_rational() {
            a.refine();
        }
        if !b.is_rational() {
            b.refine();
        }
    }
}

/// Distinct real roots in increasing order.
///
/// Descartes bisection on the integer square-free part, positive and
/// negative half-lines separately.
pub fn isolate_real_roots(f: &UniPoly) -> Vec<AlgebraicReal> {
    isolate_real_roots_within(f, None)
}

/// `k` with every root of the integer polynomial inside (-2^k, 2^k).
fn root_bound_exp(c: &[BigInt]) -> i64 {
    let n = c.len() - 1;
    let bn = c[n].bits() as i64;
    let mut k = 0i64;
    for (i, a) in c.iter().enumerate().take(n) {
        if a.is_zero() {
            continue;
        }
        let e = a.bits() as i64 - bn + 1;
        let m = (n - i) as i64;
        k = k.max(e.div_euclid(m) + i64::from(e.rem_euclid(m) != 0));
    }
    k + 1
}

/// Roots of `f` in the open interval (-2^k, 2^k), or all real roots.
pub fn isolate_real_roots_within(f: &UniPoly, k: Option<i64>) -> Vec<AlgebraicReal> {
    let inside = |x: &Q| match k {
        None => true,
        Some(k) => {
            let b = if k >= 0 {
                Q::from_integer(BigInt::one() << k)
            } else {
                Q::new(BigInt::one(), BigInt::one() << -k)
            };
            x.abs() < b
        }
    };
    if f.deg() == 0 {
        return Vec::new();
    }
    let sf = f.square_free_part();
    if sf.deg() == 1 {
        let x = -&sf.c[0] / &sf.c[1];
        return if inside(&x) { vec![AlgebraicReal::Rational(x)] } else { Vec::new() };
    }
    let ints: Vec<BigInt> = sf.c.iter().map(|x| x.to_integer()).collect();
    let zero_root = ints[0].is_zero();
    let pos = if zero_root { ints[1..].to_vec() } else { ints.clone() };
    let neg: Vec<BigInt> = pos.iter().enumerate().map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() }).collect();
    let kb = root_bound_exp(&pos);
    let k = k.map_or(kb, |k| k.min(kb));
    let unit = if k >= 0 { Q::from_integer(BigInt::one() << k) } else { Q::new(BigInt::one(), BigInt::one() << -k) };
    let mut out = Vec::new();
    for (side, mut q) in [(-1i8, neg), (1, pos)] {
        // q(2^k x), times a power of 2 if k < 0, has the wanted roots in (0, 1)
        let n = q.len() - 1;
        for (i, c) in q.iter_mut().enumerate() {
            if k >= 0 {
                *c <<= (k as usize) * i;
            } else {
                *c <<= ((-k) as usize) * (n - i);
            }
        }
        let mut found = Vec::new();
        descartes(q, BigInt::zero(), 0, &mut found);
        let mut side_roots: Vec<AlgebraicReal> = found
            .into_iter()
            .map(|(c, depth, exact)| {
                let den = Q::from_integer(BigInt::one() << depth);
                let lo = Q::from_integer(c.clone()) / &den * &unit;
                if exact {
                    return AlgebraicReal::Rational(if side < 0 { -lo } else { lo });
                }
                let hi = Q::from_integer(c + 1) / &den * &unit;
                let (lo, hi) = if side < 0 { (-hi, -lo) } else { (lo, hi) };
                tighten(&sf, lo, hi)
            })
            .collect();
        if side < 0 {
            side_roots.reverse();
            out.extend(side_roots);
            if zero_root {
                out.push(AlgebraicReal::Rational(Q::zero()));
            }
        } else {
            out.extend(side_roots);
        }
    }
    out
}

/// Exactly one root of `sf` in the open interval; moves endpoints off roots.
fn tighten(sf: &UniPoly, mut lo: Q, mut hi: Q) -> AlgebraicReal {
    let two = Q::from_integer(2.into());
    loop {
        let sl = sf.sign_at(&lo);
        let sh = sf.sign_at(&hi);
        if sl != 0 && sh != 0 {
            return AlgebraicReal::Isolated { poly: sf.clone(), lo, hi, sign_lo: sl };
        }
        let mid = (&lo + &hi) / &two;
        let sm = sf.sign_at(&mid);
        if sm == 0 {
            return AlgebraicReal::Rational(mid);
        }
        // a simple root at one endpoint: the interior root is on the side
        // where the sign differs from the nonzero endpoint
        if sl != 0 {
            if sm != sl {
                hi = mid;
            } else {
                lo = mid;
            }
        } else if sm != sh {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

fn taylor_shift_one(q: &mut [BigInt]) {
    let n = q.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = q[j + 1].clone();
            q[j] += t;
        }
    }
}

/// Upper bound on the number of roots of q in (0, 1).
fn descartes_bound(q: &[BigInt]) -> usize {
    let mut r: Vec<BigInt> = q.iter().rev().cloned().collect();
    taylor_shift_one(&mut r);
    let mut count = 0;
    let mut prev = 0i8;
    for c in &r {
        let s = if c.is_positive() {
            1
        } else if c.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if prev != 0 && s != prev {
                count += 1;
            }
            prev = s;
        }
    }
    count
}

/// Roots of q in (0, 1), which stands for (c / 2^depth, (c+1) / 2^depth).
/// Pushes `(c, depth, exact)`, exact meaning the root is the left end.
fn descartes(mut q: Vec<BigInt>, c: BigInt, depth: u32, out: &mut Vec<(BigInt, u32, bool)>) {
    if q[0].is_zero() {
        out.push((c.clone(), depth, true));
        q.remove(0);
    }
    if q.len() < 2 {
        return;
    }
    match descartes_bound(&q) {
        0 => {}
        1 => out.push((c, depth, false)),
        _ => {
            let d = q.len() - 1;
            let mut left: Vec<BigInt> = q.iter().enumerate().map(|(i, a)| a << (d - i)).collect();
            let mut right = left.clone();
            taylor_shift_one(&mut right);
            let g = left.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            if g > BigInt::one() {
                left.iter_mut().for_each(|x| *x /= &g);
            }
            let g = right.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            if g > BigInt::one() {
                right.iter_mut().for_each(|x| *x /= &g);
            }
            descartes(left, &c << 1, depth + 1, out);
            descartes(right, (c << 1) + 1, depth + 1, out);
        }
    }
}
