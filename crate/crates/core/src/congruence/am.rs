use crate::arith;

use super::linalg::Mat;
use super::CongruenceError;

/// `Z/p^K [T] / (1 + T + ... + T^{p^m - 1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmRing {
    p: u64,
    m: u32,
    k: u32,
    pk: u64,
    pm: u64,
}

/// Coefficients of `1, T, ..., T^{p^m - 2}` mod `p^K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AmElement(pub Vec<u64>);

pub fn am_ring(p: u64, m: u32, k: u32) -> Result<AmRing, CongruenceError> {
    if !arith::is_prime_small(p) || m == 0 {
        return Err(CongruenceError::InvalidModel(format!("p = {p}, m = {m}")));
    }
    if k < m {
        return Err(CongruenceError::PrecisionBelowLevel { k, m });
    }
    let pk = arith::checked_pow(p as u128, k)
        .filter(|&x| x < 1 << 62)
        .ok_or(CongruenceError::TooLarge)? as u64;
    let pm = p.pow(m);
    Ok(AmRing { p, m, k, pk, pm })
}

impl AmRing {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `p^K`.
    pub fn coefficient_modulus(&self) -> u64 {
        self.pk
    }

    /// Rank `p^m - 1` over `Z/p^K`.
    pub fn rank(&self) -> usize {
        self.pm as usize - 1
    }

    pub fn zero(&self) -> AmElement {
        AmElement(vec![0; self.rank()])
    }

    pub fn one(&self) -> AmElement {
        self.t_power(0)
    }

    /// Reduces a polynomial of any degree: first `T^{p^m} = 1`, then the top
    /// coefficient through `T^{p^m - 1} = -(1 + ... + T^{p^m - 2})`.
    pub fn from_poly(&self, coeffs: &[i64]) -> AmElement {
        let n = self.pm as usize;
        let mut cyc = vec![0u64; n];
        for (i, &c) in coeffs.iter().enumerate() {
            let c = c.rem_euclid(self.pk as i64) as u64;
            cyc[i % n] = (cyc[i % n] + c) % self.pk;
        }
        let top = cyc[n - 1];
        AmElement(
            cyc[..n - 1]
                .iter()
                .map(|&c| (c + self.pk - top) % self.pk)
                .collect(),
        )
    }

    pub fn t_power(&self, a: i64) -> AmElement {
        let e = a.rem_euclid(self.pm as i64) as usize;
        let mut v = vec![0i64; e + 1];
        v[e] = 1;
        self.from_poly(&v)
    }

    pub fn add(&self, x: &AmElement, y: &AmElement) -> AmElement {
        AmElement(
            x.0.iter()
                .zip(&y.0)
                .map(|(a, b)| (a + b) % self.pk)
                .collect(),
        )
    }

    pub fn sub(&self, x: &AmElement, y: &AmElement) -> AmElement {
        AmElement(
            x.0.iter()
                .zip(&y.0)
                .map(|(a, b)| (a + self.pk - b) % self.pk)
                .collect(),
        )
    }

    pub fn mul(&self, x: &AmElement, y: &AmElement) -> AmElement {
        let n = self.pm as usize;
        let pk = self.pk as u128;
        let mut cyc = vec![0u128; n];
        for (i, &a) in x.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.0.iter().enumerate() {
                let t = (i + j) % n;
                cyc[t] = (cyc[t] + a as u128 * b as u128) % pk;
            }
        }
        let top = cyc[n - 1];
        AmElement(
            cyc[..n - 1]
                .iter()
                .map(|&c| ((c + pk - top) % pk) as u64)
                .collect(),
        )
    }

    /// Matrix of multiplication by `x` on the basis `T^j`.
    pub fn mul_matrix(&self, x: &AmElement) -> Mat {
        let d = self.rank();
        let cols: Vec<AmElement> = (0..d)
            .map(|j| self.mul(x, &self.t_power(j as i64)))
            .collect();
        (0..d)
            .map(|i| (0..d).map(|j| cols[j].0[i]).collect())
            .collect()
    }

    /// The map induced by `T -> 1`, onto `Z/p^{min(m, K)}`.
    pub fn mod_t_minus_1(&self, x: &AmElement) -> u64 {
        let q = self.p.pow(self.m.min(self.k));
        x.0.iter().fold(0u64, |acc, &c| (acc + c % q) % q)
    }
}

pub fn am_mod_t_minus_1(ring: &AmRing, x: &AmElement) -> u64 {
    ring.mod_t_minus_1(x)
}

/// `a mod p^m -> T^a`.
pub fn psi_character(ring: &AmRing, a: i64) -> AmElement {
    ring.t_power(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_cases() {
        let r = am_ring(3, 1, 2).unwrap();
        assert_eq!(r.rank(), 2);
        assert_eq!(r.coefficient_modulus(), 9);
        let t = r.t_power(1);
        // T^2 = -1 - T
        assert_eq!(r.mul(&t, &t), AmElement(vec![8, 8]));
        assert_eq!(r.mul(&r.mul(&t, &t), &t), r.one());
        assert_eq!(r.mod_t_minus_1(&r.sub(&t, &r.one())), 0);
        assert_eq!(r.mod_t_minus_1(&r.one()), 1);
        assert_eq!(am_ring(3, 2, 2).unwrap().rank(), 8);
        assert!(matches!(
            am_ring(3, 2, 1),
            Err(CongruenceError::PrecisionBelowLevel { .. })
        ));
        assert_eq!(psi_character(&r, 0), r.one());
    }

    #[test]
    fn modulus_maps_to_p_power_under_t_to_1() {
        // 1 + T + ... + T^{p^m-1} is 0 in A_m and p^m at T = 1
        let r = am_ring(5, 2, 3).unwrap();
        let ones = vec![1i64; 25];
        assert_eq!(r.from_poly(&ones), r.zero());
    }

    proptest! {
        #[test]
        fn ring_axioms(case in 0usize..4, raw in proptest::collection::vec(any::<u64>(), 72), a in -1000i64..1000) {
            let (p, m) = [(3u64, 1u32), (3, 2), (5, 1), (5, 2)][case];
            let r = am_ring(p, m, m + 1).unwrap();
            let d = r.rank();
            let pk = r.coefficient_modulus();
            let el = |o: usize| AmElement(raw[o * d..(o + 1) * d].iter().map(|v| v % pk).collect());
            let (x, y, z) = (el(0), el(1), el(2));
            prop_assert_eq!(r.mul(&r.mul(&x, &y), &z), r.mul(&x, &r.mul(&y, &z)));
            prop_assert_eq!(r.mul(&x, &r.add(&y, &z)), r.add(&r.mul(&x, &y), &r.mul(&x, &z)));
            prop_assert_eq!(r.mul(&x, &y), r.mul(&y, &x));
            prop_assert_eq!(r.mul(&x, &r.one()), x.clone());
            prop_assert_eq!(r.t_power(d as i64 + 1), r.one());
            prop_assert_eq!(r.mul(&psi_character(&r, a), &psi_character(&r, -a)), r.one());
            prop_assert_eq!(r.mul(&psi_character(&r, a), &psi_character(&r, 7)), psi_character(&r, a + 7));
            prop_assert_eq!(r.mod_t_minus_1(&psi_character(&r, a)), 1);
        }
    }
}
