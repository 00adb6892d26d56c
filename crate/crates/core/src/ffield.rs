//! Finite fields `F_q` and their extensions `F_{q^n}` with the relative
//! Frobenius `x -> x^q`.
//!
//! `F_q = F_p[y]/(g)` and `F_{q^n} = F_q[x]/(h)`, where `g` and `h` are the
//! smallest monic irreducible polynomials in a fixed order. An element of
//! `F_q` is packed as the integer whose base-`p` digits are its
//! coefficients in `y`; the same packing orders field elements, and the
//! order on `F_{q^n}` reads coefficients as base-`q` digits (constant term
//! least significant). Polynomials are ordered the same way.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::arith;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("degrees must be positive (f = {f}, n = {n})")]
    BadDegree { f: u32, n: u32 },
    #[error("field of size {p}^{f} is too large for table arithmetic")]
    BaseTooLarge { p: u64, f: u32 },
    #[error("q^n = {q}^{n} does not fit the supported range")]
    ExtensionTooLarge { q: u64, n: u32 },
    #[error("supplied modulus is not monic irreducible of the right degree")]
    BadModulus,
    #[error("coefficient vector has the wrong length or an out-of-range entry")]
    BadElement,
    #[error("p = {p} divides n = {n}")]
    CharacteristicDividesDegree { p: u64, n: u32 },
    #[error("a generator of the extension needs n >= 2")]
    TrivialExtension,
    #[error(transparent)]
    Factor(#[from] arith::FactorEffortExceeded),
}

/// `F_q` with `q = p^f`.
#[derive(Debug)]
pub struct BaseField {
    p: u64,
    f: u32,
    q: u64,
    /// Monic, low degree first, entries in `F_p`.
    modulus: Vec<u32>,
    /// `exp[k] = g^k` for a primitive `g`; empty when `f = 1`.
    exp: Vec<u32>,
    log: Vec<u32>,
}

const MAX_TABLE: u64 = 1 << 22;

impl BaseField {
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if !arith::is_prime_small(p) || p >= 1 << 31 {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Self {
            p,
            f: 1,
            q: p,
            modulus: vec![0, 1],
            exp: Vec::new(),
            log: Vec::new(),
        })
    }

    pub fn new(p: u64, f: u32) -> Result<Self, FieldError> {
        let prime = Self::prime(p)?;
        if f == 0 {
            return Err(FieldError::BadDegree { f, n: 1 });
        }
        if f == 1 {
            return Ok(prime);
        }
        let q = arith::checked_pow(p as u128, f)
            .filter(|&q| q <= MAX_TABLE as u128)
            .ok_or(FieldError::BaseTooLarge { p, f })? as u64;
        let modulus = smallest_irreducible(&prime, f as usize);
        Self::with_modulus(p, f, q, modulus)
    }

    fn with_modulus(p: u64, f: u32, q: u64, modulus: Vec<u32>) -> Result<Self, FieldError> {
        let mut field = Self {
            p,
            f,
            q,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
        };
        let one = 1u32;
        let mut generator = None;
        'search: for cand in 2..q as u32 {
            let mut exp = Vec::with_capacity(q as usize - 1);
            let mut cur = one;
            for _ in 0..q - 1 {
                exp.push(cur);
                cur = field.slow_mul(cur, cand);
                if cur == one && exp.len() < q as usize - 1 {
                    continue 'search;
                }
            }
            generator = Some(exp);
            break;
        }
        let exp = generator.ok_or(FieldError::BadModulus)?;
        let mut log = vec![0u32; q as usize];
        for (k, &e) in exp.iter().enumerate() {
            log[e as usize] = k as u32;
        }
        field.exp = exp;
        field.log = log;
        Ok(field)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    fn digits(&self, a: u32) -> Vec<u64> {
        let mut a = a as u64;
        (0..self.f)
            .map(|_| {
                let d = a % self.p;
                a /= self.p;
                d
            })
            .collect()
    }

    fn pack(&self, digits: &[u64]) -> u32 {
        digits.iter().rev().fold(0u64, |acc, &d| acc * self.p + d) as u32
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let (da, db) = (self.digits(a), self.digits(b));
        let f = self.f as usize;
        let mut prod = vec![0u64; 2 * f - 1];
        for i in 0..f {
            for j in 0..f {
                prod[i + j] = (prod[i + j] + da[i] * db[j]) % self.p;
            }
        }
        for k in (f..prod.len()).rev() {
            let c = prod[k];
            if c != 0 {
                for (j, &m) in self.modulus.iter().enumerate().take(f) {
                    prod[k - f + j] = (prod[k - f + j] + self.p - c * m as u64 % self.p) % self.p;
                }
            }
        }
        self.pack(&prod[..f])
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.f == 1 {
            return ((a as u64 + b as u64) % self.p) as u32;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let s: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.pack(&s)
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.f == 1 {
            return ((self.p - a as u64) % self.p) as u32;
        }
        let d: Vec<u64> = self
            .digits(a)
            .iter()
            .map(|x| (self.p - x) % self.p)
            .collect();
        self.pack(&d)
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if self.f == 1 {
            return arith::mul_mod(a as u64, b as u64, self.p) as u32;
        }
        if a == 0 || b == 0 {
            return 0;
        }
        let k = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % (self.q - 1);
        self.exp[k as usize]
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        if self.f == 1 {
            return Some(arith::pow_mod(a as u64, self.p - 2, self.p) as u32);
        }
        let k = (self.q - 1 - self.log[a as usize] as u64) % (self.q - 1);
        Some(self.exp[k as usize])
    }

    pub fn from_int(&self, i: i64) -> u32 {
        i.rem_euclid(self.p as i64) as u32
    }
}

// Polynomials over a base field, low degree first, trimmed.

fn trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(k: &BaseField, a: &[u32], m: &[u32]) -> Vec<u32> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = k.inv(m[dm]).expect("nonzero leading coefficient");
    while r.len() > dm {
        let top = r.len() - 1;
        let c = k.mul(r[top], lead_inv);
        for (j, &mj) in m.iter().enumerate() {
            let idx = top - dm + j;
            r[idx] = k.sub(r[idx], k.mul(c, mj));
        }
        trim(&mut r);
    }
    r
}

fn poly_mulmod(k: &BaseField, a: &[u32], b: &[u32], m: &[u32]) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = k.add(prod[i + j], k.mul(x, y));
        }
    }
    poly_rem(k, &prod, m)
}

fn poly_powmod(k: &BaseField, base: &[u32], mut e: u128, m: &[u32]) -> Vec<u32> {
    let mut acc = poly_rem(k, &[1], m);
    let mut b = poly_rem(k, base, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(k, &acc, &b, m);
        }
        b = poly_mulmod(k, &b, &b, m);
        e >>= 1;
    }
    acc
}

fn poly_gcd(k: &BaseField, a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(k, &a, &b);
        a = b;
        b = r;
    }
    a
}

/// Rabin's test: `x^{q^n} = x mod h` and `gcd(x^{q^{n/r}} - x, h) = 1`
/// for every prime `r | n`.
fn is_irreducible(k: &BaseField, h: &[u32]) -> bool {
    let n = h.len() - 1;
    if n == 1 {
        return true;
    }
    if h[0] == 0 {
        return false;
    }
    let x = vec![0, 1];
    let mut powers = vec![poly_rem(k, &x, h)];
    for _ in 0..n {
        let last = powers.last().expect("nonempty");
        powers.push(poly_powmod(k, last, k.q() as u128, h));
    }
    if powers[n] != powers[0] {
        return false;
    }
    let primes = arith::factorize(n as u128).expect("small");
    primes.iter().all(|&(r, _)| {
        let mut diff = powers[n / r as usize].clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = k.sub(diff[1], 1);
        trim(&mut diff);
        poly_gcd(k, &diff, h).len() == 1
    })
}

fn smallest_irreducible(k: &BaseField, n: usize) -> Vec<u32> {
    let q = k.q() as u128;
    (0u128..)
        .map(|idx| {
            let mut rest = idx;
            let mut h: Vec<u32> = (0..n)
                .map(|_| {
                    let d = (rest % q) as u32;
                    rest /= q;
                    d
                })
                .collect();
            h.push(1);
            h
        })
        .find(|h| is_irreducible(k, h))
        .expect("irreducible polynomials exist in every degree")
}

/// An element of `F_{q^n}`: coefficients in `F_q` of `1, x, ..., x^{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement {
    coeffs: Vec<u32>,
}

impl FieldElement {
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// `F_{q^n}` over `F_q`.
#[derive(Debug)]
pub struct FieldExtension {
    base: BaseField,
    n: u32,
    modulus: Vec<u32>,
    /// Column `j` is `sigma(x^j)`.
    frobenius_matrix: Vec<Vec<u32>>,
    generator: OnceLock<Result<FieldElement, FieldError>>,
}

/// Serialized form of an extension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionJson {
    pub p: u64,
    pub f: u32,
    pub n: u32,
    pub modulus: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_modulus: Option<Vec<u32>>,
}

impl FieldExtension {
    pub fn new(p: u64, f: u32, n: u32) -> Result<Self, FieldError> {
        if n == 0 || f == 0 {
            return Err(FieldError::BadDegree { f, n });
        }
        let base = BaseField::new(p, f)?;
        Self::check_size(&base, n)?;
        let modulus = smallest_irreducible(&base, n as usize);
        Ok(Self::assemble(base, n, modulus))
    }

    fn check_size(base: &BaseField, n: u32) -> Result<(), FieldError> {
        arith::checked_pow(base.q() as u128, n)
            .filter(|&v| v < 1 << 120)
            .map(|_| ())
            .ok_or(FieldError::ExtensionTooLarge { q: base.q(), n })
    }

    fn assemble(base: BaseField, n: u32, modulus: Vec<u32>) -> Self {
        let nn = n as usize;
        let xq = poly_powmod(&base, &[0, 1], base.q() as u128, &modulus);
        let mut columns = Vec::with_capacity(nn);
        let mut cur = poly_rem(&base, &[1], &modulus);
        for _ in 0..nn {
            let mut col = cur.clone();
            col.resize(nn, 0);
            columns.push(col);
            cur = poly_mulmod(&base, &cur, &xq, &modulus);
        }
        Self {
            base,
            n,
            modulus,
            frobenius_matrix: columns,
            generator: OnceLock::new(),
        }
    }

    /// Rebuilds an extension from its serialized form, re-checking the moduli.
    pub fn from_json(json: &ExtensionJson) -> Result<Self, FieldError> {
        let ExtensionJson { p, f, n, .. } = *json;
        if n == 0 || f == 0 {
            return Err(FieldError::BadDegree { f, n });
        }
        let base = if f == 1 {
            BaseField::prime(p)?
        } else {
            let prime = BaseField::prime(p)?;
            let g = json.base_modulus.clone().ok_or(FieldError::BadModulus)?;
            let ok = g.len() == f as usize + 1
                && g.last() == Some(&1)
                && g.iter().all(|&c| (c as u64) < p)
                && is_irreducible(&prime, &g);
            if !ok {
                return Err(FieldError::BadModulus);
            }
            let q = arith::checked_pow(p as u128, f)
                .filter(|&q| q <= MAX_TABLE as u128)
                .ok_or(FieldError::BaseTooLarge { p, f })? as u64;
            BaseField::with_modulus(p, f, q, g)?
        };
        Self::check_size(&base, n)?;
        let h = json.modulus.clone();
        let ok = h.len() == n as usize + 1
            && h.last() == Some(&1)
            && h.iter().all(|&c| (c as u64) < base.q())
            && is_irreducible(&base, &h);
        if !ok {
            return Err(FieldError::BadModulus);
        }
        Ok(Self::assemble(base, n, h))
    }

    pub fn to_json(&self) -> ExtensionJson {
        ExtensionJson {
            p: self.p(),
            f: self.base.f(),
            n: self.n,
            modulus: self.modulus.clone(),
            base_modulus: (self.base.f() > 1).then(|| self.base.modulus().to_vec()),
        }
    }

    pub fn base(&self) -> &BaseField {
        &self.base
    }

    pub fn p(&self) -> u64 {
        self.base.p()
    }

    pub fn q(&self) -> u64 {
        self.base.q()
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// `q^n`.
    pub fn size(&self) -> u128 {
        (self.q() as u128).pow(self.n)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            coeffs: vec![0; self.n as usize],
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_base(1)
    }

    /// Embeds an element of `F_q` (packed form).
    pub fn from_base(&self, c: u32) -> FieldElement {
        let mut out = self.zero();
        out.coeffs[0] = c;
        out
    }

    pub fn from_int(&self, i: i64) -> FieldElement {
        self.from_base(self.base.from_int(i))
    }

    pub fn element(&self, coeffs: Vec<u32>) -> Result<FieldElement, FieldError> {
        if coeffs.len() != self.n as usize || coeffs.iter().any(|&c| c as u64 >= self.q()) {
            return Err(FieldError::BadElement);
        }
        Ok(FieldElement { coeffs })
    }

    /// The element whose base-`q` digits are `index`.
    pub fn element_at(&self, mut index: u128) -> FieldElement {
        let q = self.q() as u128;
        let coeffs = (0..self.n)
            .map(|_| {
                let d = (index % q) as u32;
                index /= q;
                d
            })
            .collect();
        FieldElement { coeffs }
    }

    pub fn index_of(&self, x: &FieldElement) -> u128 {
        x.coeffs
            .iter()
            .rev()
            .fold(0u128, |acc, &c| acc * self.q() as u128 + c as u128)
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| self.base.add(x, y))
            .collect();
        FieldElement { coeffs }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldElement {
            coeffs: a.coeffs.iter().map(|&x| self.base.neg(x)).collect(),
        }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.add(a, &self.neg(b))
    }

    pub fn scale_base(&self, c: u32, a: &FieldElement) -> FieldElement {
        FieldElement {
            coeffs: a.coeffs.iter().map(|&x| self.base.mul(c, x)).collect(),
        }
    }

    pub fn scale_int(&self, i: i64, a: &FieldElement) -> FieldElement {
        self.scale_base(self.base.from_int(i), a)
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let mut r = poly_mulmod(&self.base, &a.coeffs, &b.coeffs, &self.modulus);
        r.resize(self.n as usize, 0);
        FieldElement { coeffs: r }
    }

    pub fn pow(&self, a: &FieldElement, e: u128) -> FieldElement {
        let mut r = poly_powmod(&self.base, &a.coeffs, e, &self.modulus);
        r.resize(self.n as usize, 0);
        FieldElement { coeffs: r }
    }

    pub fn inv(&self, a: &FieldElement) -> Option<FieldElement> {
        (!a.is_zero()).then(|| self.pow(a, self.size() - 2))
    }

    /// `sigma^k(x)` for the relative Frobenius `sigma(x) = x^q`.
    pub fn frobenius(&self, x: &FieldElement, k: i64) -> FieldElement {
        let steps = k.rem_euclid(self.n as i64);
        let mut cur = x.clone();
        for _ in 0..steps {
            let mut next = vec![0u32; self.n as usize];
            for (j, &c) in cur.coeffs.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for (i, &m) in self.frobenius_matrix[j].iter().enumerate() {
                    next[i] = self.base.add(next[i], self.base.mul(c, m));
                }
            }
            cur = FieldElement { coeffs: next };
        }
        cur
    }

    /// `sum_{i < n} sigma^i(x)`, an element of `F_q`.
    pub fn trace(&self, x: &FieldElement) -> FieldElement {
        let mut acc = self.zero();
        let mut cur = x.clone();
        for _ in 0..self.n {
            acc = self.add(&acc, &cur);
            cur = self.frobenius(&cur, 1);
        }
        acc
    }

    pub fn in_base_field(&self, x: &FieldElement) -> bool {
        x.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// Size of the Frobenius orbit of `x`, the degree of its minimal polynomial over `F_q`.
    pub fn orbit_size(&self, x: &FieldElement) -> u32 {
        let mut cur = self.frobenius(x, 1);
        let mut k = 1;
        while &cur != x {
            cur = self.frobenius(&cur, 1);
            k += 1;
        }
        k
    }

    /// Smallest element whose multiplicative order is `q^n - 1`.
    pub fn multiplicative_generator(&self) -> Result<&FieldElement, FieldError> {
        self.generator
            .get_or_init(|| {
                let order = self.size() - 1;
                let primes = arith::factorize(order)?;
                let found = (1..self.size())
                    .map(|i| self.element_at(i))
                    .find(|z| {
                        primes
                            .iter()
                            .all(|&(r, _)| self.pow(z, order / r) != self.one())
                    })
                    .expect("the multiplicative group is cyclic");
                Ok(found)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `zeta^e` for the fixed multiplicative generator `zeta`.
    pub fn generator_power(&self, e: u128) -> Result<FieldElement, FieldError> {
        let z = self.multiplicative_generator()?;
        Ok(self.pow(z, e % (self.size() - 1)))
    }

    /// A nonzero generator of `F_{q^n}/F_q` with trace zero: `n e_0 - Tr(e_0)`
    /// for the smallest generator `e_0`.
    pub fn find_trace_zero_generator(&self) -> Result<FieldElement, FieldError> {
        if self.n < 2 {
            return Err(FieldError::TrivialExtension);
        }
        if (self.n as u64).is_multiple_of(self.p()) {
            return Err(FieldError::CharacteristicDividesDegree {
                p: self.p(),
                n: self.n,
            });
        }
        let e0 = (1..self.size())
            .map(|i| self.element_at(i))
            .find(|x| self.orbit_size(x) == self.n)
            .expect("x generates the extension");
        Ok(self.sub(&self.scale_int(self.n as i64, &e0), &self.trace(&e0)))
    }

    /// Roots of unity of exact order `k` lying in `F_q`, smallest first.
    pub fn base_roots_of_unity(&self, k: u64) -> Vec<FieldElement> {
        let q = self.q();
        if !(q - 1).is_multiple_of(k) {
            return Vec::new();
        }
        let prime_factors = arith::factorize(k as u128).expect("small");
        (1..q as u32)
            .map(|c| self.from_base(c))
            .filter(|z| {
                self.pow(z, k as u128) == self.one()
                    && prime_factors
                        .iter()
                        .all(|&(r, _)| self.pow(z, k as u128 / r) != self.one())
            })
            .collect()
    }
}

/// Checks the three properties of a trace-zero generator: nonzero, trace
/// zero, and degree-`n` minimal polynomial.
pub fn is_trace_zero_generator(ext: &FieldExtension, e: &FieldElement) -> bool {
    !e.is_zero() && ext.trace(e).is_zero() && ext.orbit_size(e) == ext.n()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn f25_frobenius_is_fifth_power() {
        let k = FieldExtension::new(5, 1, 2).unwrap();
        for i in 0..25 {
            let x = k.element_at(i);
            assert_eq!(k.frobenius(&x, 1), k.pow(&x, 5));
            assert_eq!(k.frobenius(&x, 0), x);
        }
    }

    #[test]
    fn f9_exhaustive() {
        let k = FieldExtension::new(3, 1, 2).unwrap();
        let all: Vec<_> = (0..9).map(|i| k.element_at(i)).collect();
        for x in &all {
            assert_eq!(k.frobenius(x, 1), k.pow(x, 3));
        }
        let witnesses: Vec<_> = all
            .iter()
            .filter(|e| is_trace_zero_generator(&k, e))
            .collect();
        let e = k.find_trace_zero_generator().unwrap();
        assert!(!witnesses.is_empty());
        assert!(witnesses.contains(&&e));
    }

    #[test]
    fn f4_rejects_even_degree() {
        let k = FieldExtension::new(2, 1, 2).unwrap();
        assert_eq!(
            k.find_trace_zero_generator(),
            Err(FieldError::CharacteristicDividesDegree { p: 2, n: 2 })
        );
        let k1 = FieldExtension::new(5, 1, 1).unwrap();
        assert_eq!(
            k1.find_trace_zero_generator(),
            Err(FieldError::TrivialExtension)
        );
    }

    #[test]
    fn not_prime_rejected() {
        assert_eq!(
            FieldExtension::new(9, 1, 2).unwrap_err(),
            FieldError::NotPrime(9)
        );
    }

    #[test]
    fn f3_8_generator_powers() {
        let k = FieldExtension::new(3, 1, 8).unwrap();
        let q: u128 = 3;
        let a = k.generator_power(q.pow(4).div_ceil(2)).unwrap();
        assert_eq!(k.frobenius(&a, 4), k.neg(&a));
        let b = k.generator_power((q.pow(8) - 1) / 4).unwrap();
        assert_eq!(k.frobenius(&b, 1), k.neg(&b));
        assert_eq!(k.generator_power(0).unwrap(), k.one());
    }

    #[test]
    fn f11_8_builds_quickly() {
        let t = std::time::Instant::now();
        let k = FieldExtension::new(11, 1, 8).unwrap();
        assert!(t.elapsed().as_secs_f64() < 1.0);
        let x = k.element_at(12345);
        assert_eq!(k.frobenius(&x, 8), x);
    }

    #[test]
    fn prime_power_base_fixed_field() {
        let k = FieldExtension::new(3, 2, 2).unwrap();
        let fixed = (0..k.size())
            .map(|i| k.element_at(i))
            .filter(|x| k.frobenius(x, 1) == *x)
            .count();
        assert_eq!(fixed, 9);
        let json = k.to_json();
        let back = FieldExtension::from_json(&json).unwrap();
        assert_eq!(back.to_json(), json);
    }

    #[test]
    fn tampered_modulus_rejected() {
        let k = FieldExtension::new(5, 1, 3).unwrap();
        let mut json = k.to_json();
        json.modulus[0] = 0;
        assert_eq!(
            FieldExtension::from_json(&json).unwrap_err(),
            FieldError::BadModulus
        );
    }

    #[test]
    fn cube_roots_in_base() {
        let k = FieldExtension::new(13, 1, 1).unwrap();
        let roots = k.base_roots_of_unity(3);
        assert_eq!(roots.len(), 2);
        for z in &roots {
            let s = k.add(&k.add(&k.one(), z), &k.mul(z, z));
            assert!(s.is_zero());
        }
        assert!(FieldExtension::new(11, 1, 1)
            .unwrap()
            .base_roots_of_unity(3)
            .is_empty());
    }

    fn ext_strategy() -> impl Strategy<Value = (u64, u32, u32)> {
        prop_oneof![
            Just((2, 1, 5)),
            Just((3, 2, 3)),
            Just((5, 1, 4)),
            Just((7, 1, 3)),
            Just((13, 1, 2))
        ]
    }

    proptest! {
        #[test]
        fn frobenius_is_automorphism((p, f, n) in ext_strategy(), a in any::<u64>(), b in any::<u64>()) {
            let k = FieldExtension::new(p, f, n).unwrap();
            let x = k.element_at(a as u128 % k.size());
            let y = k.element_at(b as u128 % k.size());
            prop_assert_eq!(k.frobenius(&k.add(&x, &y), 1), k.add(&k.frobenius(&x, 1), &k.frobenius(&y, 1)));
            prop_assert_eq!(k.frobenius(&k.mul(&x, &y), 1), k.mul(&k.frobenius(&x, 1), &k.frobenius(&y, 1)));
            prop_assert_eq!(k.frobenius(&x, n as i64), x.clone());
            prop_assert!(k.in_base_field(&k.trace(&x)));
            if !x.is_zero() {
                prop_assert_eq!(k.mul(&x, &k.inv(&x).unwrap()), k.one());
            }
        }
    }
}
