//! Exact sign evaluation with a floating-point filter.

use super::MultiPoly;
use crate::rational::{lcm_denominators, to_f64, Q};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

const U: f64 = f64::EPSILON * 0.5;

/// Precomputed form of a polynomial for repeated sign queries.
///
/// Coefficients are kept as integers (the polynomial times a positive
/// constant) for the exact path and as doubles for the filter.
#[derive(Debug, Clone)]
pub struct SignEvaluator {
    nvars: usize,
    degree: u32,
    exps: Vec<Vec<u16>>,
    int_coeffs: Vec<BigInt>,
    f_coeffs: Vec<f64>,
    gamma: f64,
}

impl SignEvaluator {
    pub fn new(f: &MultiPoly) -> Self {
        let nvars = f.nvars();
        let den = lcm_denominators(f.terms().map(|(_, c)| c));
        let mut exps = Vec::new();
        let mut int_coeffs = Vec::new();
        let mut f_coeffs = Vec::new();
        for (m, c) in f.terms() {
            exps.push((0..nvars).map(|i| m.exp(i)).collect());
            int_coeffs.push((c * Q::from_integer(den.clone())).to_integer());
            f_coeffs.push(to_f64(c));
        }
        let degree = f.degree();
        // conversions of x and c, the products, then the running sum
        let n = (2 * degree as usize + 3 + exps.len()) as f64;
        let gamma = 2.0 * n * U / (1.0 - n * U);
        SignEvaluator { nvars, degree, exps, int_coeffs, f_coeffs, gamma }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.exps.is_empty()
    }

    /// Sign at `x`, where `approx[i]` is `x[i]` rounded to nearest.
    pub fn sign_with(&self, x: &[Q], approx: &[f64]) -> i8 {
        if let Some(s) = self.filter(approx) {
            return s;
        }
        self.exact_sign(x)
    }

    pub fn sign(&self, x: &[Q]) -> i8 {
        let approx: Vec<f64> = x.iter().map(to_f64).collect();
        self.sign_with(x, &approx)
    }

    /// Certified sign from doubles alone, if the error bound allows.
    pub fn filter(&self, approx: &[f64]) -> Option<i8> {
        if self.exps.is_empty() {
            return Some(0);
        }
        let mut sum = 0.0f64;
        let mut mag = 0.0f64;
        for (e, c) in self.exps.iter().zip(&self.f_coeffs) {
            let mut t = *c;
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t *= approx[i];
                }
            }
            sum += t;
            mag += t.abs();
        }
        if !sum.is_finite() || !mag.is_finite() {
            return None;
        }
        let err = self.gamma * mag + self.exps.len() as f64 * f64::MIN_POSITIVE * 4.0;
        if sum > err {
            Some(1)
        } else if sum < -err {
            Some(-1)
        } else {
            None
        }
    }

    /// Integer evaluation over a common denominator of the point.
    pub fn exact_sign(&self, x: &[Q]) -> i8 {
        assert_eq!(x.len(), self.nvars);
        let l = lcm_denominators(x.iter());
        let xs: Vec<BigInt> = x.iter().map(|v| (v * Q::from_integer(l.clone())).to_integer()).collect();
        let d = self.degree as usize;
        let mut lp = vec![BigInt::one()];
        let mut pows: Vec<Vec<BigInt>> = xs.iter().map(|_| vec![BigInt::one()]).collect();
        for k in 1..=d {
            lp.push(&lp[k - 1] * &l);
            for (i, p) in pows.iter_mut().enumerate() {
                let next = &p[k - 1] * &xs[i];
                p.push(next);
            }
        }
        let mut acc = BigInt::zero();
        for (e, c) in self.exps.iter().zip(&self.int_coeffs) {
            let mut t = c * &lp[d - e.iter().map(|&k| k as usize).sum::<usize>()];
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= &pows[i][k as usize];
                }
            }
            acc += t;
        }
        if acc.is_positive() {
            1
        } else if acc.is_negative() {
            -1
        } else {
            0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::text::parse_canonical;
    use crate::rational::{q, qf};
    use proptest::prelude::*;

    #[test]
    fn exact_zero_and_near_zero() {
        // x^2 + y^2 - 1
        let f = parse_canonical("1 2 0 0\n1 0 2 0\n-1 0 0 0", Some(3)).unwrap();
        let e = SignEvaluator::new(&f);
        assert_eq!(e.sign(&[qf(3, 5), qf(4, 5), q(0)]), 0);
        let tiny = Q::new(BigInt::one(), BigInt::from(10u64).pow(30));
        assert_eq!(e.sign(&[q(1) + &tiny, q(0), q(0)]), 1);
        assert_eq!(e.sign(&[q(1) - &tiny, q(0), q(0)]), -1);
        assert_eq!(e.filter(&[0.6, 0.8, 0.0]), None);
    }

    proptest! {
        #[test]
        fn agrees_with_rational_eval(cs in proptest::collection::vec(-50i64..50, 10), pt in proptest::collection::vec((-30i64..30, 1i64..9), 3)) {
            let mut terms = Vec::new();
            let mut i = 0;
            for a in 0u16..=2 {
                for b in 0u16..=2 - a {
                    for c in 0u16..=2 - a - b {
                        if i < cs.len() {
                            terms.push((vec![a, b, c], qf(cs[i], 3)));
                        }
                        i += 1;
                    }
                }
            }
            let f = MultiPoly::from_terms(3, terms);
            let x: Vec<Q> = pt.iter().map(|&(n, d)| qf(n, d)).collect();
            let want = crate::rational::sign(&f.eval(&x).unwrap());
            let e = SignEvaluator::new(&f);
            prop_assert_eq!(e.sign(&x), want);
            prop_assert_eq!(e.exact_sign(&x), want);
        }
    }
}
