//! Exact rational shadows of the exponent formulas, and generators of random
//! parameter points whose coordinates are exactly representable as `f64`.

#![allow(dead_code)]

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Q {
    q(n, 1)
}

/// Exact value of a finite double.
pub fn exact(x: f64) -> Q {
    Q::from_float(x).expect("finite")
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().expect("representable")
}

/// A parameter point with dyadic coordinates.
#[derive(Debug, Clone)]
pub struct Point {
    pub n: i64,
    pub p: Q,
    pub q: Q,
    pub alpha: Q,
    pub rho: Q,
}

impl Point {
    pub fn new(n: i64, p: Q, q_: Q, alpha: Q, rho: Q) -> Self {
        Self { n, p, q: q_, alpha, rho }
    }

    pub fn floats(&self) -> (usize, f64, f64, f64, f64) {
        (self.n as usize, to_f64(&self.p), to_f64(&self.q), to_f64(&self.alpha), to_f64(&self.rho))
    }

    pub fn delta(&self) -> Q {
        &self.alpha * (Q::one() - self.q.recip())
    }

    fn nn(&self) -> Q {
        int(self.n)
    }

    /// `(N−2ϱ−Nδ)/(N−2ϱ−2)`.
    pub fn threshold(&self) -> Q {
        let n = self.nn();
        (&n - int(2) * &self.rho - &n * self.delta()) / (&n - int(2) * &self.rho - int(2))
    }

    /// `p + Nδ/(N−2ϱ−2) < (N−2ϱ)/(N−2ϱ−2)` together with its preconditions.
    pub fn blowup_holds(&self) -> bool {
        let n = self.nn();
        let d = self.delta();
        let den = &n - int(2) * &self.rho - int(2);
        let pre = self.n >= 3 && !self.rho.is_positive() && d < int(2) / &n;
        pre && den.is_positive() && &self.p + &n * &d / &den < (&n - int(2) * &self.rho) / &den
    }

    pub fn p_c(&self) -> Q {
        let n = self.nn();
        let d = self.delta();
        let k = (&self.p - int(1)) * (&self.q - int(1));
        &n * (k + &d * &self.q) / (int(2) * (&self.q - int(1)) + &n * &d)
    }

    pub fn ell(&self) -> Q {
        let n = self.nn();
        let d = self.delta();
        let k = (&self.p - int(1)) * (&self.q - int(1));
        let r1 = &self.rho + int(1);
        let den = int(2) * (&self.q - int(1)) + &n * &d + int(2) * &r1 * &k + int(2) * &r1 * &d;
        &n * (k + d) / den
    }

    /// `K = (p−1)(q−1)+qδ`.
    pub fn k(&self) -> Q {
        (&self.p - int(1)) * (&self.q - int(1)) + &self.q * self.delta()
    }

    /// `(lower_a, lower_b, upper_a, upper_b)`.
    pub fn window_parts(&self) -> (Q, Q, Q, Q) {
        let n = self.nn();
        let d = self.delta();
        let k = self.k();
        let pc = self.p_c();
        let npk = &n * &self.p * &k;
        let lower_a = (int(2) * (&self.q - int(1)) + &n * &d * &self.p) / &npk;
        let lower_b = pc.recip() + int(2) * &self.rho / &n + int(2) * &d / &npk;
        let upper_a = pc.recip();
        let upper_b = (&self.p - int(1)) * (&self.q + &d - int(1)) / (&self.p * &k);
        (lower_a, lower_b, upper_a, upper_b)
    }

    pub fn window(&self) -> (Q, Q) {
        let (la, lb, ua, ub) = self.window_parts();
        (la.max(lb), ua.min(ub))
    }

    /// `N ≥ 2`, `−1 < ϱ < 0`, `δ < 2/N`, `N(p−1)/2 ≤ q ≤ p`, `p ≥ threshold`.
    pub fn gep_hypotheses(&self) -> bool {
        let n = self.nn();
        self.n >= 2
            && self.rho > int(-1)
            && self.rho.is_negative()
            && self.delta() < int(2) / &n
            && &n * (&self.p - int(1)) / int(2) <= self.q
            && self.q <= self.p
            && self.p >= self.threshold()
    }

    /// `(N−2ϱ−2)/2 + (Nδ−2)/(2(p−1))`.
    pub fn theta(&self) -> Q {
        let n = self.nn();
        (&n - int(2) * &self.rho - int(2)) / int(2)
            + (&n * self.delta() - int(2)) / (int(2) * (&self.p - int(1)))
    }

    pub fn beta(&self, inv_r: &Q) -> Q {
        self.nn() / int(2) * (self.p_c().recip() - inv_r)
    }

    /// `1/(p+α)`.
    pub fn beta_bound(&self) -> Q {
        (&self.p + &self.alpha).recip()
    }
}

/// Seeded generator of dyadic parameter values.
pub struct Sampler(ChaCha8Rng);

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    /// A multiple of `2^{−bits}` uniformly in `[lo, hi]`.
    pub fn dyadic(&mut self, lo: f64, hi: f64, bits: u32) -> Q {
        let scale = f64::from(1u32 << bits);
        let a = (lo * scale).ceil() as i64;
        let b = (hi * scale).floor() as i64;
        q(self.0.random_range(a..=b), 1i64 << bits)
    }

    pub fn dim(&mut self, lo: i64, hi: i64) -> i64 {
        self.0.random_range(lo..=hi)
    }

    /// `N ≥ 3`, `ϱ ≤ 0`, `δ < 2/N`, `p > 1`, `q > 1`: the setting of the
    /// blow-up criterion.
    pub fn blowup_point(&mut self) -> Point {
        loop {
            let n = self.dim(3, 6);
            let rho = self.dyadic(-0.99, 0.0, 8);
            let p = self.dyadic(1.01, 6.0, 10);
            let q_ = self.dyadic(1.01, 6.0, 10);
            let alpha = self.dyadic(0.0, 1.5, 10);
            let pt = Point::new(n, p, q_, alpha, rho);
            if pt.delta() < int(2) / int(n) {
                return pt;
            }
        }
    }

    /// A point satisfying the small-data global existence hypotheses.
    pub fn gep_point(&mut self, alpha_max: f64) -> Point {
        loop {
            let n = self.dim(2, 5);
            let rho = self.dyadic(-0.99, -0.01, 8);
            let p = self.dyadic(1.01, 6.0, 10);
            let q_ = self.dyadic(1.01, 6.0, 10);
            let alpha = if alpha_max > 0.0 { self.dyadic(0.0, alpha_max, 10) } else { Q::zero() };
            let pt = Point::new(n, p, q_, alpha, rho);
            if pt.gep_hypotheses() {
                return pt;
            }
        }
    }
}
