//! Exact arithmetic in cyclotomic fields Q(zeta_N).
//!
//! A `Cyclo` is a vector of rationals of length phi(N) representing an
//! element of Q[z]/(Phi_N(z)). Products are reduced modulo the N-th
//! cyclotomic polynomial, so `z^N = 1` and `Phi_N(z) = 0` hold exactly.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

pub type Rat = BigRational;

pub fn rat_i64(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    assert!(d != 0, "zero denominator");
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Euler phi.
pub fn euler_phi(n: u32) -> u32 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Integer polynomial helpers (dense, low-to-high coefficients).
fn poly_trim(p: &mut Vec<BigInt>) {
    while p.len() > 1 && p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
}

/// Exact division of integer polynomials, panics if the division is not exact.
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem: Vec<BigInt> = num.to_vec();
    let dd = den.len() - 1;
    let lead = den[dd].clone();
    assert!(!lead.is_zero());
    if rem.len() < den.len() {
        assert!(rem.iter().all(|c| c.is_zero()));
        return vec![BigInt::zero()];
    }
    let qd = rem.len() - den.len();
    let mut q = vec![BigInt::zero(); qd + 1];
    for k in (0..=qd).rev() {
        let c = rem[k + dd].clone();
        if c.is_zero() {
            continue;
        }
        let f = &c / &lead;
        assert!((&f * &lead) == c, "non-exact polynomial division");
        q[k] = f.clone();
        for (i, dc) in den.iter().enumerate() {
            let t = &rem[k + i] - &f * dc;
            rem[k + i] = t;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "non-exact polynomial division");
    poly_trim(&mut q);
    q
}

fn divisors(n: u32) -> Vec<u32> {
    let mut ds = Vec::new();
    for d in 1..=n {
        if n % d == 0 {
            ds.push(d);
        }
    }
    ds
}

/// Cyclotomic polynomial Phi_n, integer coefficients, low-to-high.
pub fn cyclotomic_poly(n: u32) -> Vec<BigInt> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<BigInt>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    let poly = if n == 1 {
        vec![BigInt::from(-1), BigInt::from(1)]
    } else {
        // x^n - 1 divided by the product of Phi_d over proper divisors d of n
        let mut num = vec![BigInt::zero(); (n + 1) as usize];
        num[0] = BigInt::from(-1);
        num[n as usize] = BigInt::from(1);
        let mut den = vec![BigInt::one()];
        for d in divisors(n) {
            if d < n {
                let pd = cyclotomic_poly(d);
                let mut prod = vec![BigInt::zero(); den.len() + pd.len() - 1];
                for (i, a) in den.iter().enumerate() {
                    for (j, b) in pd.iter().enumerate() {
                        let t = &prod[i + j] + a * b;
                        prod[i + j] = t;
                    }
                }
                poly_trim(&mut prod);
                den = prod;
            }
        }
        poly_div_exact(&num, &den)
    };
    cache.lock().unwrap().insert(n, poly.clone());
    poly
}

/// Reduction table: zeta^k for k in [phi, 2*phi-1], each a vector of length phi.
fn reduction_table(order: u32) -> &'static Vec<Vec<Rat>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, &'static Vec<Vec<Rat>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(t) = guard.get(&order) {
        return t;
    }
    let phi = euler_phi(order) as usize;
    let cp = cyclotomic_poly(order);
    assert_eq!(cp.len(), phi + 1);
    let lead = cp[phi].clone();
    assert!(lead.is_one(), "cyclotomic polynomial must be monic");
    // zeta^phi = -(cp[0] + cp[1] z + ... + cp[phi-1] z^{phi-1})
    let base: Vec<Rat> = cp[..phi]
        .iter()
        .map(|c| Rat::from_integer(-c.clone()))
        .collect();
    let mut rows: Vec<Vec<Rat>> = vec![base];
    for _ in 1..phi.max(1) {
        let prev = rows.last().unwrap().clone();
        // multiply prev by z and reduce the overflow via rows[0]
        let mut next = vec![Rat::zero(); phi];
        for i in 0..phi - 1 {
            next[i + 1] = prev[i].clone();
        }
        let c = prev[phi - 1].clone();
        if !c.is_zero() {
            for i in 0..phi {
                next[i] += &c * &rows[0][i];
            }
        }
        rows.push(next);
    }
    let leaked: &'static Vec<Vec<Rat>> = Box::leak(Box::new(rows));
    guard.insert(order, leaked);
    leaked
}

/// Element of Q(zeta_order); coeffs has length phi(order).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclo {
    order: u32,
    coeffs: Vec<Rat>,
}

impl Cyclo {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn zero(order: u32) -> Self {
        assert!(order >= 1, "cyclotomic order must be positive");
        Cyclo {
            order,
            coeffs: vec![Rat::zero(); euler_phi(order) as usize],
        }
    }

    pub fn one(order: u32) -> Self {
        Self::from_rat(order, Rat::one())
    }

    pub fn from_rat(order: u32, r: Rat) -> Self {
        let mut c = Self::zero(order);
        c.coeffs[0] = r;
        c
    }

    pub fn from_i64(order: u32, n: i64) -> Self {
        Self::from_rat(order, rat_i64(n))
    }

    /// Construct from raw coefficient vector (length at most phi(order)).
    pub fn from_coeffs(order: u32, cs: &[Rat]) -> Self {
        let phi = euler_phi(order) as usize;
        assert!(cs.len() <= phi, "too many coefficients");
        let mut v = vec![Rat::zero(); phi];
        v[..cs.len()].clone_from_slice(cs);
        Cyclo { order, coeffs: v }
    }

    /// zeta_order^k, reduced.
    pub fn root_of_unity(order: u32, k: i64) -> Self {
        let n = order as i64;
        let k = ((k % n) + n) % n;
        let phi = euler_phi(order) as usize;
        if (k as usize) < phi {
            let mut c = Self::zero(order);
            c.coeffs[k as usize] = Rat::one();
            return c;
        }
        // build by repeated reduction: z^k = z^{phi} * z^{k-phi} ...
        let table = reduction_table(order);
        let mut cur = vec![Rat::zero(); phi];
        cur[phi - 1] = Rat::one(); // z^{phi-1}
        let mut e = phi - 1;
        while e < k as usize {
            // multiply by z
            let mut next = vec![Rat::zero(); phi];
            for i in 0..phi - 1 {
                next[i + 1] = cur[i].clone();
            }
            let c = cur[phi - 1].clone();
            if !c.is_zero() {
                for i in 0..phi {
                    next[i] += &c * &table[0][i];
                }
            }
            cur = next;
            e += 1;
        }
        Cyclo { order, coeffs: cur }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn as_rat(&self) -> Option<Rat> {
        if self.is_rational() {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, other: &Cyclo) -> Cyclo {
        assert_eq!(self.order, other.order, "cyclotomic order mismatch");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Cyclo {
            order: self.order,
            coeffs,
        }
    }

    pub fn sub(&self, other: &Cyclo) -> Cyclo {
        assert_eq!(self.order, other.order, "cyclotomic order mismatch");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Cyclo {
            order: self.order,
            coeffs,
        }
    }

    pub fn neg(&self) -> Cyclo {
        Cyclo {
            order: self.order,
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, r: &Rat) -> Cyclo {
        Cyclo {
            order: self.order,
            coeffs: self.coeffs.iter().map(|a| a * r).collect(),
        }
    }

    pub fn mul(&self, other: &Cyclo) -> Cyclo {
        assert_eq!(self.order, other.order, "cyclotomic order mismatch");
        let phi = self.coeffs.len();
        let mut raw = vec![Rat::zero(); 2 * phi - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                raw[i + j] += a * b;
            }
        }
        let table = reduction_table(self.order);
        let mut out = raw[..phi].to_vec();
        for k in phi..2 * phi - 1 {
            let c = raw[k].clone();
            if c.is_zero() {
                continue;
            }
            let row = &table[k - phi];
            for i in 0..phi {
                out[i] += &c * &row[i];
            }
        }
        Cyclo {
            order: self.order,
            coeffs: out,
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in Q[x].
    pub fn inv(&self) -> Option<Cyclo> {
        if self.is_zero() {
            return None;
        }
        if self.is_rational() {
            let r = self.coeffs[0].clone();
            return Some(Cyclo::from_rat(self.order, Rat::one() / r));
        }
        let phi = self.coeffs.len();
        let modulus: Vec<Rat> = cyclotomic_poly(self.order)
            .iter()
            .map(|c| Rat::from_integer(c.clone()))
            .collect();
        // extended gcd of (self as poly, Phi_N): returns u with u*self = 1 mod Phi_N
        let mut r0: Vec<Rat> = modulus;
        let mut r1: Vec<Rat> = self.coeffs.clone();
        trim_rat(&mut r1);
        let mut s0: Vec<Rat> = vec![Rat::zero()];
        let mut s1: Vec<Rat> = vec![Rat::one()];
        while !(r1.len() == 1 && r1[0].is_zero()) {
            let (q, r) = poly_divmod_rat(&r0, &r1);
            let s = poly_sub_rat(&s0, &poly_mul_rat(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        // r0 = gcd (a nonzero constant since Phi_N is irreducible over Q)
        if r0.len() != 1 || r0[0].is_zero() {
            return None;
        }
        let c = r0[0].clone();
        let mut u = s0;
        for x in u.iter_mut() {
            *x = &*x / &c;
        }
        // reduce u mod Phi_N to degree < phi
        let mut out = Cyclo::zero(self.order);
        let table = reduction_table(self.order);
        for (k, coef) in u.iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            if k < phi {
                out.coeffs[k] += coef;
            } else {
                let row = &table[k - phi];
                for i in 0..phi {
                    out.coeffs[i] += coef * &row[i];
                }
            }
        }
        Some(out)
    }

    pub fn div(&self, other: &Cyclo) -> Option<Cyclo> {
        other.inv().map(|i| self.mul(&i))
    }

    pub fn pow(&self, mut e: u64) -> Cyclo {
        let mut base = self.clone();
        let mut acc = Cyclo::one(self.order);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Embed into Q(zeta_m) where self.order divides m.
    pub fn embed(&self, m: u32) -> Cyclo {
        if m == self.order {
            return self.clone();
        }
        assert!(m % self.order == 0, "target order must be a multiple");
        let step = (m / self.order) as i64;
        let mut out = Cyclo::zero(m);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let z = Cyclo::root_of_unity(m, step * k as i64);
            out = out.add(&z.scale(c));
        }
        out
    }

    /// Galois conjugate zeta -> zeta^k; requires gcd(k, order) = 1.
    pub fn galois(&self, k: i64) -> Cyclo {
        let mut out = Cyclo::zero(self.order);
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let z = Cyclo::root_of_unity(self.order, k * j as i64);
            out = out.add(&z.scale(c));
        }
        out
    }

    /// Complex conjugation zeta -> zeta^{-1}.
    pub fn conj(&self) -> Cyclo {
        self.galois(-1)
    }
}

fn trim_rat(p: &mut Vec<Rat>) {
    while p.len() > 1 && p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
}

fn poly_mul_rat(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim_rat(&mut out);
    out
}

fn poly_sub_rat(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let n = a.len().max(b.len());
    let mut out = vec![Rat::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim_rat(&mut out);
    out
}

fn poly_divmod_rat(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut rem = a.to_vec();
    trim_rat(&mut rem);
    let mut bb = b.to_vec();
    trim_rat(&mut bb);
    let db = bb.len() - 1;
    let lead = bb[db].clone();
    if rem.len() < bb.len() {
        return (vec![Rat::zero()], rem);
    }
    let dq = rem.len() - bb.len();
    let mut q = vec![Rat::zero(); dq + 1];
    for k in (0..=dq).rev() {
        let c = rem[k + db].clone();
        if c.is_zero() {
            continue;
        }
        let f = c / lead.clone();
        q[k] = f.clone();
        for (i, bc) in bb.iter().enumerate() {
            let t = &rem[k + i] - &f * bc;
            rem[k + i] = t;
        }
    }
    trim_rat(&mut q);
    trim_rat(&mut rem);
    (q, rem)
}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if k == 0 {
                write!(f, "{}", c)?;
            } else if k == 1 {
                write!(f, "{}*z{}", c, self.order)?;
            } else {
                write!(f, "{}*z{}^{}", c, self.order, k)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_squared_is_minus_one() {
        let i = Cyclo::root_of_unity(4, 1);
        assert_eq!(i.mul(&i), Cyclo::from_i64(4, -1));
    }

    #[test]
    fn rational_embedding() {
        let five = Cyclo::from_i64(1, 5);
        assert_eq!(five.as_rat().unwrap(), rat_i64(5));
        assert_eq!(five.embed(8), Cyclo::from_i64(8, 5));
    }

    #[test]
    fn eighth_root_order() {
        let z = Cyclo::root_of_unity(8, 1);
        assert!(z.pow(8).is_one());
        assert!(!z.pow(4).is_one());
        assert_eq!(z.pow(4), Cyclo::from_i64(8, -1));
    }

    #[test]
    fn inverse_roundtrip() {
        let z = Cyclo::root_of_unity(12, 5);
        let x = z.add(&Cyclo::from_i64(12, 3));
        let inv = x.inv().unwrap();
        assert!(x.mul(&inv).is_one());
    }

    #[test]
    fn phi_values() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(2), 1);
        assert_eq!(euler_phi(4), 2);
        assert_eq!(euler_phi(8), 4);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(60), 16);
    }

    #[test]
    fn embed_consistency() {
        let z6 = Cyclo::root_of_unity(6, 1);
        let z12 = Cyclo::root_of_unity(12, 2);
        assert_eq!(z6.embed(12), z12);
        let s = z6.add(&z6.mul(&z6));
        assert_eq!(s.embed(12), z12.add(&z12.mul(&z12)));
    }
}
