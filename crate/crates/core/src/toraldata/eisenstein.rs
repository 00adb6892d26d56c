//! Exact arithmetic in `Z[zeta]`, `zeta^2 + zeta + 1 = 0`, for the ramified
//! E6 coordinates before reduction mod `p`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::ffield::{FieldElement, FieldExtension};
use crate::rootsys::{Family, RootSystem, RootSystemType};

/// `c1 + c2 zeta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Eisenstein {
    pub c1: i64,
    pub c2: i64,
}

impl Eisenstein {
    pub const ZETA: Eisenstein = Eisenstein { c1: 0, c2: 1 };

    pub const fn new(c1: i64, c2: i64) -> Self {
        Self { c1, c2 }
    }

    pub const fn int(c: i64) -> Self {
        Self { c1: c, c2: 0 }
    }

    pub fn scale(self, k: i64) -> Self {
        Self::new(k * self.c1, k * self.c2)
    }

    /// Image in `k` with `zeta` sent to `z`.
    pub fn reduce(self, k: &FieldExtension, z: &FieldElement) -> FieldElement {
        k.add(&k.from_int(self.c1), &k.scale_int(self.c2, z))
    }

    /// `c1^2 - c1 c2 + c2^2`; a prime `p` not dividing it cannot kill the
    /// element under either embedding.
    pub fn norm(self) -> i64 {
        self.c1 * self.c1 - self.c1 * self.c2 + self.c2 * self.c2
    }

    /// Sufficient test for `c1 + c2 zeta != 0` mod a prime `p = 1 mod 3`:
    /// vanishing would give `c1 = -c2 zeta`, hence `c1^3 = -c2^3`.
    pub fn cube_criterion(self, p: u64) -> bool {
        let p = p as i128;
        let c = |x: i64| (x as i128).rem_euclid(p).pow(3).rem_euclid(p);
        c(self.c1) != (-c(self.c2)).rem_euclid(p)
    }
}

impl Add for Eisenstein {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.c1 + o.c1, self.c2 + o.c2)
    }
}

impl Sub for Eisenstein {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for Eisenstein {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.c1, -self.c2)
    }
}

impl Mul for Eisenstein {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        // zeta^2 = -1 - zeta
        let zz = self.c2 * o.c2;
        Self::new(self.c1 * o.c1 - zz, self.c1 * o.c2 + self.c2 * o.c1 - zz)
    }
}

impl fmt::Display for Eisenstein {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.c1, self.c2) {
            (a, 0) => write!(f, "{a}"),
            (0, b) => write!(f, "{b}z"),
            (a, b) if b < 0 => write!(f, "{a}{b}z"),
            (a, b) => write!(f, "{a}+{b}z"),
        }
    }
}

/// The ramified E6 coordinates `(2, 1, -4 - 2 zeta, 1, 1, 3 zeta)`.
pub(crate) fn e6_ramified_coords() -> [Eisenstein; 6] {
    let i = Eisenstein::int;
    [
        i(2),
        i(1),
        Eisenstein::new(-4, -2),
        i(1),
        i(1),
        Eisenstein::new(0, 3),
    ]
}

/// `X` on each positive coroot of E6, exactly in `Z[zeta]`.
pub fn e6_ramified_coroot_values() -> Vec<(Vec<i64>, Eisenstein)> {
    let e6 = RootSystemType::new(Family::E, 6).expect("E6");
    let a = e6_ramified_coords();
    RootSystem::cached(e6)
        .positive_coroots()
        .map(|c| {
            let v = c
                .expansion
                .iter()
                .zip(&a)
                .fold(Eisenstein::int(0), |acc, (&l, &x)| acc + x.scale(l));
            (c.expansion.clone(), v)
        })
        .collect()
}

/// Membership in `{1,2,3,-2-4z} + {i-2z : -4<=i<=1} + {i-z : -3<=i<=1}
/// + {i+z : -2<=i<=3} + {i+3z : 0<=i<=3}`.
pub fn e6_ramified_value_set_contains(v: Eisenstein) -> bool {
    match v.c2 {
        0 => (1..=3).contains(&v.c1),
        -4 => v.c1 == -2,
        -2 => (-4..=1).contains(&v.c1),
        -1 => (-3..=1).contains(&v.c1),
        1 => (-2..=3).contains(&v.c1),
        3 => (0..=3).contains(&v.c1),
        _ => false,
    }
}

/// `zeta a_i == sum_j (w a_i^vee)_j a_j` exactly, for the order-three E6 element.
pub fn e6_ramified_descent_exact() -> bool {
    let e6 = RootSystemType::new(Family::E, 6).expect("E6");
    let w = super::build::e6_cocycle(&RootSystem::cached(e6));
    let a = e6_ramified_coords();
    (0..6).all(|i| {
        let rhs = w
            .column(i)
            .iter()
            .zip(&a)
            .fold(Eisenstein::int(0), |acc, (&l, &x)| acc + x.scale(l));
        Eisenstein::ZETA * a[i] == rhs
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_is_a_cube_root_of_unity() {
        let z = Eisenstein::ZETA;
        assert_eq!(z * z * z, Eisenstein::int(1));
        assert_eq!(z * z + z + Eisenstein::int(1), Eisenstein::int(0));
    }

    #[test]
    fn positive_values_against_the_stated_set() {
        let vals = e6_ramified_coroot_values();
        assert_eq!(vals.len(), 36);
        // Frozen from an independent enumeration: the stated set misses one
        // value, 2 - 2z at (1,1,1,2,1,0), and contains -3 - z, which never occurs.
        let outside: Vec<_> = vals
            .iter()
            .filter(|(_, v)| !e6_ramified_value_set_contains(*v))
            .collect();
        assert_eq!(
            outside,
            vec![&(vec![1, 1, 1, 2, 1, 0], Eisenstein::new(2, -2))]
        );
        assert!(vals.iter().all(|(_, v)| *v != Eisenstein::new(-3, -1)));
        assert!(e6_ramified_value_set_contains(Eisenstein::new(-3, -1)));
    }

    #[test]
    fn cube_criterion_at_small_primes() {
        let trivially_nonzero =
            |v: Eisenstein| v.c1 == 0 || v.c2 == 0 || (v.c1.abs() == 1 && v.c2.abs() == 1);
        for p in [13u64, 19, 31, 37, 43] {
            for (_, v) in e6_ramified_coroot_values() {
                assert!(v.norm() % p as i64 != 0, "p={p} v={v}");
                if trivially_nonzero(v) || v == Eisenstein::new(2, -2) {
                    continue;
                }
                assert!(v.cube_criterion(p), "p={p} v={v}");
            }
        }
        // 2 - 2z = 2(1 - z) defeats the cube test but has norm 12.
        assert!(!Eisenstein::new(2, -2).cube_criterion(13));
        assert_eq!(Eisenstein::new(2, -2).norm(), 12);
    }

    #[test]
    fn exact_descent_system() {
        assert!(e6_ramified_descent_exact());
    }

    #[test]
    fn criterion_is_sound_against_reduction() {
        let k = FieldExtension::new(13, 1, 1).unwrap();
        for z in k.base_roots_of_unity(3) {
            for c1 in -20..20 {
                for c2 in -20..20 {
                    let v = Eisenstein::new(c1, c2);
                    if v.cube_criterion(13) {
                        assert!(!v.reduce(&k, &z).is_zero());
                    }
                }
            }
        }
    }
}
