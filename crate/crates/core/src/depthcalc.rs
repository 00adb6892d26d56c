//! Level arithmetic: depth windows, image orders of characters on
//! filtration slices, and explicit surjections onto `Z/p^m`.
//!
//! Depths are normalized so the uniformizer of `F` has valuation 1 and
//! `v(p) = e_F`. The additive character is trivial on positive valuation
//! and nontrivial on the integers.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::arith::{self, Rational};
use crate::ffield::{BaseField, FieldError};

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum DepthError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("character image has order p^{found}, expected p^{expected}")]
    OrderMismatch { expected: u32, found: u32 },
    #[error("depth {0} is not a jump of the lattice")]
    NotOnJump(String),
    #[error("precision K = {k} too small, need K >= {need}")]
    PrecisionInsufficient { k: u32, need: u32 },
    #[error("level maps disagree on the target: Z/{a} vs Z/{b}")]
    TargetMismatch { a: u64, b: u64 },
    #[error("unit group of size {0} is too large to enumerate")]
    TooLarge(u128),
    #[error("no element of order p^{0} in U_m / U_2m")]
    NoSurjection(u32),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `n = 2 e_F m - 1` and the window `(n, n+1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelWindow {
    pub e_f: u32,
    pub m: u32,
    pub n: i64,
}

impl LevelWindow {
    pub fn contains(&self, r: Rational) -> bool {
        Rational::from_integer(self.n) < r && r <= Rational::from_integer(self.n + 1)
    }
}

pub fn level_window(e_f: u32, m: u32) -> Result<LevelWindow, DepthError> {
    if e_f == 0 || m == 0 {
        return Err(DepthError::InvalidParameter(format!(
            "e_F = {e_f}, m = {m}"
        )));
    }
    Ok(LevelWindow {
        e_f,
        m,
        n: 2 * e_f as i64 * m as i64 - 1,
    })
}

/// A depth inside a level window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelParams {
    pub e_f: u32,
    pub m: u32,
    pub n: i64,
    pub r: Rational,
}

impl LevelParams {
    pub fn new(e_f: u32, m: u32, r: Rational) -> Result<Self, DepthError> {
        let w = level_window(e_f, m)?;
        if !w.contains(r) {
            return Err(DepthError::InvalidParameter(format!(
                "r = {r} outside ({}, {}]",
                w.n,
                w.n + 1
            )));
        }
        Ok(Self { e_f, m, n: w.n, r })
    }
}

/// A filtered lattice of the given rank whose jumps form the progression
/// `offset + k step`; `1 / step` must be a positive integer so that
/// `L_{s+1} = uniformizer L_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredLattice {
    pub p: u64,
    pub rank: usize,
    pub e_f: u32,
    offset: Rational,
    step: Rational,
}

impl FilteredLattice {
    pub fn new(
        p: u64,
        rank: usize,
        e_f: u32,
        offset: Rational,
        step: Rational,
    ) -> Result<Self, DepthError> {
        if !arith::is_prime_small(p) || rank == 0 || e_f == 0 {
            return Err(DepthError::InvalidParameter(format!(
                "p = {p}, rank = {rank}, e_F = {e_f}"
            )));
        }
        let inv = step.recip();
        if step <= Rational::from_integer(0) || !inv.is_integer() {
            return Err(DepthError::InvalidParameter(format!(
                "jump step {step} does not divide 1"
            )));
        }
        // normalize the offset into [0, step)
        let k = (offset / step).floor();
        Ok(Self {
            p,
            rank,
            e_f,
            offset: offset - k * step,
            step,
        })
    }

    /// Integer jumps: the unramified torus.
    pub fn unramified_torus(p: u64, rank: usize, e_f: u32) -> Result<Self, DepthError> {
        Self::new(
            p,
            rank,
            e_f,
            Rational::from_integer(0),
            Rational::from_integer(1),
        )
    }

    pub fn step(&self) -> Rational {
        self.step
    }

    pub fn is_jump(&self, s: Rational) -> bool {
        ((s - self.offset) / self.step).is_integer()
    }

    /// Smallest jump strictly above `x`.
    pub fn jump_above(&self, x: Rational) -> Rational {
        let k = ((x - self.offset) / self.step).floor() + Rational::from_integer(1);
        self.offset + k * self.step
    }

    /// Jumps in `(lo, hi]`.
    pub fn jumps_in(&self, lo: Rational, hi: Rational) -> Vec<Rational> {
        let mut out = Vec::new();
        let mut s = self.jump_above(lo);
        while s <= hi {
            out.push(s);
            s += self.step;
        }
        out
    }
}

/// Order of the image of a depth-`r` character on the slice `(r/2, r]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ImageOrder {
    pub p: u64,
    pub exponent: u32,
    /// `m` when `r` lies in the window of level `m`.
    pub window_m: Option<u32>,
}

impl ImageOrder {
    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.exponent)
    }
}

/// `p^{floor(t / e_F) + 1}` with `t = r - s_min`, `s_min` the first jump
/// above `r/2`; 1 for an empty slice. When `r` sits on a jump in a level
/// window the result is checked against `p^m`.
pub fn character_image_order(r: Rational, lat: &FilteredLattice) -> Result<ImageOrder, DepthError> {
    let zero = Rational::from_integer(0);
    let e_f = Rational::from_integer(lat.e_f as i64);
    // r in (2 e_F m - 1, 2 e_F m] forces m = ceil(r / 2 e_F)
    let window_m = if r > zero {
        let m = ((r / (e_f * 2)).ceil()).to_integer();
        (m >= 1 && level_window(lat.e_f, m as u32)?.contains(r)).then_some(m as u32)
    } else {
        None
    };
    if r <= zero {
        return Ok(ImageOrder {
            p: lat.p,
            exponent: 0,
            window_m,
        });
    }
    let s_min = lat.jump_above(r / 2);
    let exponent = if s_min > r {
        0
    } else {
        ((r - s_min) / e_f).floor().to_integer() as u32 + 1
    };
    if let Some(m) = window_m {
        if lat.is_jump(r) && exponent != m {
            return Err(DepthError::OrderMismatch {
                expected: m,
                found: exponent,
            });
        }
    }
    Ok(ImageOrder {
        p: lat.p,
        exponent,
        window_m,
    })
}

/// A homomorphism from a finite abelian group, given by generators and
/// their orders, to `Z/p^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelMap {
    pub p: u64,
    pub m: u32,
    pub generators: Vec<String>,
    pub generator_orders: Vec<u64>,
    pub images: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelMapJson {
    pub target: String,
    pub generators: Vec<String>,
    pub images: Vec<u64>,
}

impl LevelMap {
    pub fn modulus(&self) -> u64 {
        self.p.pow(self.m)
    }

    pub fn is_surjective(&self) -> bool {
        self.images.iter().any(|&x| x % self.p != 0)
    }

    /// Each image is killed by its generator's order.
    pub fn is_well_defined(&self) -> bool {
        let pm = self.modulus() as u128;
        self.images
            .iter()
            .zip(&self.generator_orders)
            .all(|(&x, &o)| (x as u128 * o as u128).is_multiple_of(pm))
    }

    /// Image of `sum c_i g_i`.
    pub fn apply(&self, coeffs: &[u64]) -> u64 {
        let pm = self.modulus() as u128;
        (coeffs
            .iter()
            .zip(&self.images)
            .map(|(&c, &x)| c as u128 * x as u128 % pm)
            .sum::<u128>()
            % pm) as u64
    }

    /// Order of the image subgroup.
    pub fn image_order(&self) -> u64 {
        let pm = self.modulus();
        let g = self
            .images
            .iter()
            .fold(pm, |acc, &x| num_integer::Integer::gcd(&acc, &x));
        pm / g
    }

    pub fn to_json(&self) -> LevelMapJson {
        LevelMapJson {
            target: format!("Z/{}^{}", self.p, self.m),
            generators: self.generators.clone(),
            images: self.images.clone(),
        }
    }
}

/// `lambda` on `L_{r/2+} / L_{r+}` for `F` unramified over `Q_p` and
/// integer jumps: the generator `p^{s_min} e_j` maps to `c_j mod p^m`,
/// where `c_j` is the residue of `X(p^r e_j)`.
pub fn factor_level_map(
    r: Rational,
    lat: &FilteredLattice,
    m: u32,
    coords: &[i64],
) -> Result<LevelMap, DepthError> {
    if lat.e_f != 1 {
        return Err(DepthError::InvalidParameter(
            "explicit level map needs e_F = 1".into(),
        ));
    }
    if coords.len() != lat.rank {
        return Err(DepthError::InvalidParameter(format!(
            "{} coordinates for rank {}",
            coords.len(),
            lat.rank
        )));
    }
    if !lat.is_jump(r) || !r.is_integer() {
        return Err(DepthError::NotOnJump(r.to_string()));
    }
    let io = character_image_order(r, lat)?;
    if io.exponent != m {
        return Err(DepthError::OrderMismatch {
            expected: m,
            found: io.exponent,
        });
    }
    let pm = lat.p.pow(m) as i64;
    let images: Vec<u64> = coords.iter().map(|&c| c.rem_euclid(pm) as u64).collect();
    let s_min = lat.jump_above(r / 2);
    let map = LevelMap {
        p: lat.p,
        m,
        generators: (1..=lat.rank).map(|j| format!("p^{s_min} e_{j}")).collect(),
        generator_orders: vec![lat.p.pow(io.exponent); lat.rank],
        images,
    };
    if !map.is_surjective() {
        let found = m - arith::valuation(
            map.modulus() as u128 / map.image_order() as u128,
            lat.p as u128,
        );
        return Err(DepthError::OrderMismatch { expected: m, found });
    }
    Ok(map)
}

/// Sum map on the product of the domains.
pub fn combine_product(maps: &[LevelMap]) -> Result<LevelMap, DepthError> {
    let first = maps
        .first()
        .ok_or_else(|| DepthError::InvalidParameter("no level maps".into()))?;
    let mut out = LevelMap {
        p: first.p,
        m: first.m,
        generators: Vec::new(),
        generator_orders: Vec::new(),
        images: Vec::new(),
    };
    for (i, map) in maps.iter().enumerate() {
        if map.modulus() != first.modulus() {
            return Err(DepthError::TargetMismatch {
                a: first.modulus(),
                b: map.modulus(),
            });
        }
        out.generators
            .extend(map.generators.iter().map(|g| format!("{i}:{g}")));
        out.generator_orders.extend(&map.generator_orders);
        out.images.extend(&map.images);
    }
    Ok(out)
}

/// `O_E / uniformizer^{eK}` as `GR(p^K, f)[w] / (w^e - p)`, elements stored
/// as `e` blocks of `f` coefficients mod `p^K`.
struct UnitRing {
    pk: u64,
    p: u64,
    f: usize,
    e: usize,
    modulus: Vec<u64>,
}

type Elem = Vec<u64>;

impl UnitRing {
    fn one(&self) -> Elem {
        let mut v = vec![0; self.e * self.f];
        v[0] = 1;
        v
    }

    fn mul_gr(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let f = self.f;
        let pk = self.pk as u128;
        let mut prod = vec![0u128; 2 * f - 1];
        for i in 0..f {
            for j in 0..f {
                prod[i + j] = (prod[i + j] + a[i] as u128 * b[j] as u128) % pk;
            }
        }
        for k in (f..prod.len()).rev() {
            let c = prod[k];
            if c != 0 {
                for j in 0..f {
                    prod[k - f + j] =
                        (prod[k - f + j] + pk - c * self.modulus[j] as u128 % pk) % pk;
                }
            }
            prod[k] = 0;
        }
        prod[..f].iter().map(|&x| x as u64).collect()
    }

    fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let (e, f) = (self.e, self.f);
        let mut acc = vec![0u64; e * f];
        for i in 0..e {
            for j in 0..e {
                let mut c = self.mul_gr(&a[i * f..(i + 1) * f], &b[j * f..(j + 1) * f]);
                let mut k = i + j;
                if k >= e {
                    // w^e = p
                    k -= e;
                    c.iter_mut()
                        .for_each(|x| *x = (*x as u128 * self.p as u128 % self.pk as u128) as u64);
                }
                for (t, x) in c.into_iter().enumerate() {
                    acc[k * f + t] = (acc[k * f + t] + x) % self.pk;
                }
            }
        }
        acc
    }

    fn pow_p(&self, a: &Elem, times: u32) -> Elem {
        let mut x = a.clone();
        for _ in 0..times {
            let mut acc = self.one();
            for _ in 0..self.p {
                acc = self.mul(&acc, &x);
            }
            x = acc;
        }
        x
    }

    /// All of `1 + wO`.
    fn principal_units(&self) -> Vec<Elem> {
        let len = self.e * self.f;
        // coefficient of w^0 ranges over p GR, the rest over GR
        let radix: Vec<u64> = (0..len)
            .map(|i| {
                if i < self.f {
                    self.pk / self.p
                } else {
                    self.pk
                }
            })
            .collect();
        let total: u64 = radix.iter().product();
        (0..total)
            .map(|mut idx| {
                let mut v = vec![0u64; len];
                for (i, &r) in radix.iter().enumerate() {
                    let d = idx % r;
                    idx /= r;
                    v[i] = if i < self.f { d * self.p } else { d };
                }
                v[0] = (v[0] + 1) % self.pk;
                v
            })
            .collect()
    }
}

const MAX_UNITS: u128 = 1 << 20;

/// Builds a surjection `U_m / U_{2m} -> Z/p^m` for `U_1 = 1 + wO_E` and
/// `U_{i+1} = U_i^p`, with `O_E` totally tamely ramified of index `e` over
/// the unramified extension with residue field `F_q`.
pub fn torus_power_filtration(q: u64, e: u32, m: u32, k: u32) -> Result<LevelMap, DepthError> {
    let (p, f) =
        arith::prime_power(q).ok_or_else(|| DepthError::InvalidParameter(format!("q = {q}")))?;
    if e == 0 || m == 0 || (e as u64).is_multiple_of(p) {
        return Err(DepthError::InvalidParameter(format!(
            "e = {e}, m = {m} (tame e required)"
        )));
    }
    let need = if p == 2 {
        (m + 3).max(2 * m + 1)
    } else {
        (m + 2).max(2 * m)
    };
    if k < need {
        return Err(DepthError::PrecisionInsufficient { k, need });
    }
    let size = (q as u128).checked_pow(e * k - 1).unwrap_or(u128::MAX);
    if size > MAX_UNITS {
        return Err(DepthError::TooLarge(size));
    }
    let base = BaseField::new(p, f)?;
    let modulus: Vec<u64> = if f == 1 {
        vec![0, 1]
    } else {
        base.modulus().iter().map(|&c| c as u64).collect()
    };
    let ring = UnitRing {
        pk: p.pow(k),
        p,
        f: f as usize,
        e: e as usize,
        modulus,
    };
    let u1 = ring.principal_units();
    let um: Vec<Elem> = {
        let set: HashSet<Elem> = u1.iter().map(|x| ring.pow_p(x, m - 1)).collect();
        let mut v: Vec<Elem> = set.into_iter().collect();
        v.sort();
        v
    };
    let u2m: Vec<Elem> = {
        let set: HashSet<Elem> = um.iter().map(|x| ring.pow_p(x, m)).collect();
        let mut v: Vec<Elem> = set.into_iter().collect();
        v.sort();
        v
    };
    // canonical coset representatives of U_m / U_2m
    let coset_rep = |x: &Elem| -> Elem {
        u2m.iter()
            .map(|y| ring.mul(x, y))
            .min()
            .expect("U_2m nonempty")
    };
    let mut reps: HashMap<Elem, Elem> = HashMap::new();
    for x in &um {
        if !reps.contains_key(x) {
            let r = coset_rep(x);
            for y in &u2m {
                reps.insert(ring.mul(x, y), r.clone());
            }
        }
    }
    let quotient: Vec<Elem> = {
        let mut v: Vec<Elem> = reps
            .values()
            .cloned()
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        v.sort();
        v
    };
    let one = reps[&ring.one()].clone();
    let class_mul = |a: &Elem, b: &Elem| reps[&ring.mul(a, b)].clone();
    let class_order = |a: &Elem| -> u64 {
        let mut x = a.clone();
        let mut o = 1;
        while x != one {
            x = class_mul(&x, a);
            o += 1;
        }
        o
    };
    let pm = p.pow(m);
    let seed = quotient
        .iter()
        .find(|x| class_order(x) == pm)
        .cloned()
        .ok_or(DepthError::NoSurjection(m))?;
    // Extend lambda(seed) = 1 one generator at a time.
    let mut lambda: HashMap<Elem, u64> = HashMap::new();
    let mut cur = one.clone();
    for j in 0..pm {
        lambda.insert(cur.clone(), j);
        cur = class_mul(&cur, &seed);
    }
    let mut gens = vec![seed];
    let mut images = vec![1u64];
    let mut orders = vec![pm];
    for x in &quotient {
        if lambda.contains_key(x) {
            continue;
        }
        // smallest p^j with x^{p^j} in the current subgroup
        let mut y = x.clone();
        let mut rel = 1u64;
        while !lambda.contains_key(&y) {
            y = (1..p).fold(y.clone(), |acc, _| class_mul(&acc, &y));
            rel *= p;
        }
        let target = lambda[&y];
        // solve rel * t = target mod p^m
        let t = (0..pm)
            .find(|t| (rel as u128 * *t as u128 % pm as u128) as u64 == target)
            .ok_or(DepthError::NoSurjection(m))?;
        let old: Vec<(Elem, u64)> = lambda.iter().map(|(k, v)| (k.clone(), *v)).collect();
        let mut xp = one.clone();
        for i in 0..rel {
            for (h, lh) in &old {
                lambda.insert(class_mul(h, &xp), (lh + i * t) % pm);
            }
            xp = class_mul(&xp, x);
        }
        gens.push(x.clone());
        images.push(t);
        orders.push(class_order(x));
    }
    debug_assert_eq!(lambda.len(), quotient.len());
    Ok(LevelMap {
        p,
        m,
        generators: gens.iter().map(|g| format!("{g:?}")).collect(),
        generator_orders: orders,
        images,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn windows() {
        assert_eq!(level_window(1, 1).unwrap().n, 1);
        assert_eq!(level_window(1, 2).unwrap().n, 3);
        assert_eq!(level_window(2, 1).unwrap().n, 3);
        assert!(level_window(0, 1).is_err());
        assert!(LevelParams::new(1, 1, r(3, 2)).is_ok());
        assert!(LevelParams::new(1, 1, r(1, 1)).is_err());
    }

    /// For `F = Q_p`: enumerate `v` in `p^{s_min} Z / p^{r+1} Z`, pair with
    /// `X = p^{-r}` and read off the largest denominator of `<X, v> / p`.
    fn oracle_order(p: u64, r: i64) -> u64 {
        let s_min = r / 2 + 1;
        if s_min > r {
            return 1;
        }
        let modulus = p.pow((r + 1) as u32);
        let mut best = 1;
        for k in 0..modulus / p.pow(s_min as u32) {
            let v = k * p.pow(s_min as u32);
            // <X,v>/p = v / p^{r+1}; its order in Q/Z is the reduced denominator
            let g = num_integer::Integer::gcd(&v, &modulus);
            best = best.max(modulus / g);
        }
        best
    }

    #[test]
    fn image_order_examples_and_oracle() {
        for p in [3u64, 5] {
            let lat = FilteredLattice::unramified_torus(p, 1, 1).unwrap();
            assert_eq!(
                character_image_order(r(2, 1), &lat).unwrap().order(),
                p as u128
            );
            assert_eq!(
                character_image_order(r(4, 1), &lat).unwrap().order(),
                (p * p) as u128
            );
            for rr in 1..=7 {
                let got = character_image_order(r(rr, 1), &lat).unwrap().order();
                assert_eq!(got, oracle_order(p, rr) as u128, "p={p} r={rr}");
            }
        }
        let lat = FilteredLattice::new(5, 1, 1, r(0, 1), r(1, 1)).unwrap();
        assert_eq!(character_image_order(r(1, 2), &lat).unwrap().exponent, 0);
    }

    #[test]
    fn level_drop() {
        for e_f in 1..=3u32 {
            for step_den in 1..=3 {
                let lat = FilteredLattice::new(7, 2, e_f, r(0, 1), r(1, step_den)).unwrap();
                for m in 1..=4u32 {
                    let w = level_window(e_f, m).unwrap();
                    for rr in
                        lat.jumps_in(Rational::from_integer(w.n), Rational::from_integer(w.n + 1))
                    {
                        assert_eq!(character_image_order(rr, &lat).unwrap().exponent, m);
                        let lower = rr - Rational::from_integer(2 * e_f as i64);
                        assert_eq!(character_image_order(lower, &lat).unwrap().exponent, m - 1);
                    }
                }
            }
        }
    }

    #[test]
    fn level_maps() {
        let lat = FilteredLattice::unramified_torus(3, 1, 1).unwrap();
        let l1 = factor_level_map(r(2, 1), &lat, 1, &[2]).unwrap();
        assert!(l1.is_surjective() && l1.is_well_defined());
        let l2 = factor_level_map(r(4, 1), &lat, 2, &[4]).unwrap();
        assert_eq!(l2.image_order(), 9);
        // quotient p^3 Z / p^5 Z has p^2 elements, kernel index p^2
        let images: HashSet<u64> = (0..9).map(|c| l2.apply(&[c])).collect();
        assert_eq!(images.len(), 9);
        assert!(matches!(
            factor_level_map(r(4, 1), &lat, 2, &[0]),
            Err(DepthError::OrderMismatch { .. })
        ));
        assert!(matches!(
            factor_level_map(r(4, 1), &lat, 1, &[1]),
            Err(DepthError::OrderMismatch { .. })
        ));
        let json = serde_json::to_string(&l2.to_json()).unwrap();
        assert!(json.contains("\"target\":\"Z/3^2\""));
    }

    #[test]
    fn products() {
        let lat = FilteredLattice::unramified_torus(5, 1, 1).unwrap();
        let a = factor_level_map(r(2, 1), &lat, 1, &[1]).unwrap();
        let zero = LevelMap {
            images: vec![0],
            ..a.clone()
        };
        assert_eq!(
            combine_product(std::slice::from_ref(&a)).unwrap().images,
            a.images
        );
        assert!(combine_product(&[a.clone(), a.clone()])
            .unwrap()
            .is_surjective());
        assert!(combine_product(&[zero.clone(), a.clone()])
            .unwrap()
            .is_surjective());
        assert!(!combine_product(&[zero.clone(), zero])
            .unwrap()
            .is_surjective());
        let b = factor_level_map(r(4, 1), &lat, 2, &[1]).unwrap();
        assert!(matches!(
            combine_product(&[a, b]),
            Err(DepthError::TargetMismatch { .. })
        ));
    }

    #[test]
    fn torus_filtration_examples() {
        let l = torus_power_filtration(5, 1, 1, 3).unwrap();
        assert!(l.is_surjective() && l.is_well_defined());
        assert_eq!(l.modulus(), 5);
        let l = torus_power_filtration(5, 1, 2, 4).unwrap();
        assert!(l.is_surjective() && l.is_well_defined());
        // (1+5Z)/(1+5^4 Z) is cyclic of order 125, so U_2/U_4 is cyclic of order 25.
        assert_eq!(l.generators.len(), 1);
        assert_eq!(l.generator_orders, vec![25]);
        let l = torus_power_filtration(9, 1, 1, 3).unwrap();
        assert!(l.is_surjective() && l.is_well_defined());
        let l = torus_power_filtration(5, 2, 1, 3).unwrap();
        assert!(l.is_surjective() && l.is_well_defined());
        assert!(matches!(
            torus_power_filtration(5, 1, 2, 3),
            Err(DepthError::PrecisionInsufficient { .. })
        ));
        assert!(matches!(
            torus_power_filtration(2, 1, 1, 3),
            Err(DepthError::PrecisionInsufficient { .. })
        ));
        assert!(torus_power_filtration(2, 1, 1, 4).unwrap().is_surjective());
    }

    proptest! {
        #[test]
        fn order_is_monotone(e_f in 1u32..4, num in 1i64..40, den in 1i64..4, extra in 1i64..8) {
            let lat = FilteredLattice::new(5, 1, e_f, r(0, 1), r(1, den)).unwrap();
            let lo = r(num, den);
            let hi = lo + Rational::from_integer(extra);
            let a = character_image_order(lo, &lat);
            let b = character_image_order(hi, &lat);
            if let (Ok(a), Ok(b)) = (a, b) {
                prop_assert!(a.exponent <= b.exponent);
            }
        }

        #[test]
        fn level_map_character_order(c in 1i64..1000, m in 1u32..4) {
            prop_assume!(c % 3 != 0);
            let lat = FilteredLattice::unramified_torus(3, 1, 1).unwrap();
            let map = factor_level_map(Rational::from_integer(2 * m as i64), &lat, m, &[c]).unwrap();
            // the composite character has order exactly p^m
            prop_assert_eq!(map.image_order(), 3u64.pow(m));
        }
    }
}
