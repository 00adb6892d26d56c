use serde::Serialize;

use crate::arith;

use super::CuspError;

pub type Mat2 = [[u64; 2]; 2];

/// `p^offset * entries`, entries known mod `p^K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TruncatedMatrix {
    pub p: u64,
    pub k: u32,
    pub offset: i32,
    pub entries: Mat2,
}

pub(crate) fn pmod(p: u64, k: u32) -> u64 {
    p.pow(k)
}

fn mulmod(a: u64, b: u64, n: u64) -> u64 {
    (a as u128 * b as u128 % n as u128) as u64
}

pub fn mat_mul(a: &Mat2, b: &Mat2, n: u64) -> Mat2 {
    let mut out = [[0u64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = (mulmod(a[i][0], b[0][j], n) + mulmod(a[i][1], b[1][j], n)) % n;
        }
    }
    out
}

/// Inverse of a determinant-one matrix (the adjugate).
pub fn sl2_inverse(a: &Mat2, n: u64) -> Mat2 {
    [[a[1][1], (n - a[0][1]) % n], [(n - a[1][0]) % n, a[0][0]]]
}

pub fn det(a: &Mat2, n: u64) -> u64 {
    (mulmod(a[0][0], a[1][1], n) + n - mulmod(a[0][1], a[1][0], n)) % n
}

pub fn upper(t: u64, n: u64) -> Mat2 {
    [[1 % n, t % n], [0, 1 % n]]
}

pub fn lower(t: u64, n: u64) -> Mat2 {
    [[1 % n, 0], [t % n, 1 % n]]
}

fn valuation(x: u64, p: u64, k: u32) -> u32 {
    if x == 0 {
        k
    } else {
        arith::valuation(x as u128, p as u128).min(k)
    }
}

/// Smallest entry valuation, `k` for the zero matrix.
pub fn mat_valuation(a: &Mat2, p: u64, k: u32) -> u32 {
    a.iter()
        .flatten()
        .map(|&x| valuation(x, p, k))
        .min()
        .unwrap_or(k)
}

impl TruncatedMatrix {
    pub fn new(p: u64, k: u32, offset: i32, entries: [[i64; 2]; 2]) -> Self {
        let n = pmod(p, k) as i64;
        let entries = entries.map(|r| r.map(|x| x.rem_euclid(n) as u64));
        Self {
            p,
            k,
            offset,
            entries,
        }
    }

    pub fn integral(p: u64, k: u32, entries: Mat2) -> Self {
        let n = pmod(p, k);
        Self {
            p,
            k,
            offset: 0,
            entries: entries.map(|r| r.map(|x| x % n)),
        }
    }

    fn modulus(&self) -> u64 {
        pmod(self.p, self.k)
    }

    /// `offset + min v(entries)`, or `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        let v = mat_valuation(&self.entries, self.p, self.k);
        (v < self.k).then_some(self.offset as i64 + v as i64)
    }

    pub fn is_trace_zero(&self) -> bool {
        (self.entries[0][0] + self.entries[1][1]).is_multiple_of(self.modulus())
    }

    /// Rewrites with a smaller offset; entries keep precision `p^K`.
    fn shifted_to(&self, offset: i32) -> Mat2 {
        let n = self.modulus();
        let f = self.p.pow((self.offset - offset) as u32) % n;
        self.entries.map(|r| r.map(|x| mulmod(x, f, n)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let o = self.offset.min(other.offset);
        let (a, b) = (self.shifted_to(o), other.shifted_to(o));
        let n = self.modulus();
        let mut e = [[0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                e[i][j] = (a[i][j] + b[i][j]) % n;
            }
        }
        Self {
            offset: o,
            entries: e,
            ..self.clone()
        }
    }

    pub fn scale(&self, c: i64) -> Self {
        let n = self.modulus();
        let c = c.rem_euclid(n as i64) as u64;
        Self {
            entries: self.entries.map(|r| r.map(|x| mulmod(x, c, n))),
            ..self.clone()
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            offset: self.offset + other.offset,
            entries: mat_mul(&self.entries, &other.entries, self.modulus()),
            ..self.clone()
        }
    }

    /// `p^offset * entries` as an integral matrix mod `p^K`, when the
    /// valuation is nonnegative.
    pub fn to_integral(&self) -> Option<Mat2> {
        if self.offset >= 0 {
            return Some(self.shifted_to(0));
        }
        let v = mat_valuation(&self.entries, self.p, self.k);
        let s = (-self.offset) as u32;
        (v >= s).then(|| self.entries.map(|r| r.map(|x| x / self.p.pow(s))))
    }
}

/// Class of `num / p^level` in `Q_p / Z_p` (level 0 means integral).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Fraction {
    pub num: u64,
    pub level: u32,
}

/// `tr(a b) mod O`, needing `K >= -(offset_a + offset_b)`.
pub fn pairing_mod_o(a: &TruncatedMatrix, b: &TruncatedMatrix) -> Result<Fraction, CuspError> {
    let prod = a.mul(b);
    let n = prod.modulus();
    let tr = (prod.entries[0][0] + prod.entries[1][1]) % n;
    if prod.offset >= 0 {
        return Ok(Fraction { num: 0, level: 0 });
    }
    let level = (-prod.offset) as u32;
    if level > a.k {
        return Err(CuspError::PrecisionTooLow {
            needed: level,
            got: a.k,
        });
    }
    Ok(reduce_fraction(a.p, tr % a.p.pow(level), level))
}

pub(crate) fn reduce_fraction(p: u64, mut num: u64, mut level: u32) -> Fraction {
    while level > 0 && num.is_multiple_of(p) {
        num /= p;
        level -= 1;
    }
    if level == 0 {
        num = 0;
    }
    Fraction { num, level }
}

/// `1 + sum_{i >= 1} A^i / d_i` mod `p^K`, where `v_d(i) = v_p(d_i)` and
/// `u_d(i)` is the signed unit part of `d_i`. Each term is formed as
/// `p^{it - v_d(i)} (A/p^t)^i / u_d(i)`, so no division by `p` happens.
fn power_series(
    a: &Mat2,
    p: u64,
    k: u32,
    v_d: impl Fn(u64) -> u32,
    u_d: impl Fn(u64) -> i128,
) -> Result<Mat2, CuspError> {
    let n = pmod(p, k);
    let t = mat_valuation(a, p, k);
    if t == 0 {
        return Err(CuspError::Convergence);
    }
    let mut acc = [[1 % n, 0], [0, 1 % n]];
    if t >= k {
        return Ok(acc);
    }
    // a = p^t a'; a' is only meaningful mod p^{K-t}, which is all we need
    let pt = p.pow(t);
    let a1 = a.map(|r| r.map(|x| x / pt));
    let mut pow = [[1 % n, 0], [0, 1 % n]];
    for i in 1..=(2 * k as u64 + 2) {
        pow = mat_mul(&pow, &a1, n);
        let e = i as i64 * t as i64 - v_d(i) as i64;
        if e >= k as i64 {
            continue;
        }
        debug_assert!(e >= t as i64);
        let u = arith::inv_mod(u_d(i), n as i128).expect("unit part") as u64;
        let f = mulmod(p.pow(e as u32), u, n);
        for r in 0..2 {
            for c in 0..2 {
                acc[r][c] = (acc[r][c] + mulmod(pow[r][c], f, n)) % n;
            }
        }
    }
    Ok(acc)
}

fn vp_factorial(i: u64, p: u64) -> u32 {
    let mut v = 0;
    let mut q = p;
    while q <= i {
        v += (i / q) as u32;
        q *= p;
    }
    v
}

fn unit_factorial(i: u64, p: u64, n: u64) -> i128 {
    let mut u = 1u128;
    for j in 1..=i {
        let mut x = j;
        while x % p == 0 {
            x /= p;
        }
        u = u * (x as u128 % n as u128) % n as u128;
    }
    u as i128
}

/// `exp(X) = sum X^k / k!` mod `p^K`; needs `p >= 5` and `v(X) >= 1`.
pub fn exp_truncated(x: &TruncatedMatrix) -> Result<TruncatedMatrix, CuspError> {
    if x.p < 5 {
        return Err(CuspError::Convergence);
    }
    let a = x.to_integral().ok_or(CuspError::Convergence)?;
    let (p, k) = (x.p, x.k);
    let n = pmod(p, k);
    let e = power_series(
        &a,
        p,
        k,
        |i| vp_factorial(i, p),
        |i| unit_factorial(i, p, n),
    )?;
    Ok(TruncatedMatrix::integral(p, k, e))
}

/// `log(g) = sum (-1)^{k+1} (g - 1)^k / k` mod `p^K`; needs `p >= 5` and
/// `g = 1 mod p`.
pub fn log_truncated(p: u64, k: u32, g: &Mat2) -> Result<TruncatedMatrix, CuspError> {
    if p < 5 {
        return Err(CuspError::Convergence);
    }
    let n = pmod(p, k);
    let mut a = *g;
    a[0][0] = (a[0][0] + n - 1 % n) % n;
    a[1][1] = (a[1][1] + n - 1 % n) % n;
    let vp = |i: u64| arith::valuation(i as u128, p as u128);
    let unit = |i: u64| {
        let u = (i / p.pow(vp(i))) as i128;
        if i % 2 == 1 {
            u
        } else {
            -u
        }
    };
    let mut s = power_series(&a, p, k, vp, unit)?;
    // power_series starts from the identity
    s[0][0] = (s[0][0] + n - 1 % n) % n;
    s[1][1] = (s[1][1] + n - 1 % n) % n;
    Ok(TruncatedMatrix::integral(p, k, s))
}
