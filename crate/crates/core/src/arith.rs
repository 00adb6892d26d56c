//! Small exact-arithmetic helpers shared by the other modules: modular
//! arithmetic, primality and factoring, integer polynomials and integer
//! matrices.

use num_rational::Ratio;

/// Exact rational used for depths and valuations.
pub type Rational = Ratio<i64>;

/// `a * b mod m` without overflow for any `u64` modulus.
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: i128, m: i128) -> Option<i128> {
    let (g, x, _) = ext_gcd(a.rem_euclid(m), m);
    (g == 1).then(|| x.rem_euclid(m))
}

pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

pub fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Exponent of `p` in `n` (`n != 0`).
pub fn valuation(mut n: u128, p: u128) -> u32 {
    debug_assert!(n != 0 && p > 1);
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

pub fn checked_pow(base: u128, exp: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

pub fn is_prime_small(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Primes strictly greater than `bound`, ascending, `count` of them.
pub fn primes_above(bound: u64, count: usize) -> Vec<u64> {
    (bound + 1..)
        .filter(|&n| is_prime_small(n))
        .take(count)
        .collect()
}

/// Decomposes `q = p^f`; `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut f = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        f += 1;
    }
    (rest == 1).then_some((p, f))
}

fn mul_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    if let (Ok(x), Ok(y)) = (u64::try_from(a), u64::try_from(b)) {
        if m <= u64::MAX as u128 {
            return (x as u128 * y as u128) % m;
        }
    }
    // Double-and-add keeps every intermediate below 2m.
    let (mut a, mut b, mut acc) = (a % m, b % m, 0u128);
    while b > 0 {
        if b & 1 == 1 {
            acc = add_mod_u128(acc, a, m);
        }
        a = add_mod_u128(a, a, m);
        b >>= 1;
    }
    acc
}

fn add_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    let s = a.wrapping_add(b);
    if s < a || s >= m {
        s.wrapping_sub(m)
    } else {
        s
    }
}

fn pow_mod_u128(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u128(acc, base, m);
        }
        base = mul_mod_u128(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Miller-Rabin. Deterministic below 3.3e24 with these bases, which covers
/// every cofactor the factoring routine sees in practice.
pub fn is_probable_prime(n: u128) -> bool {
    const BASES: [u128; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'bases: for &a in &BASES {
        let mut x = pow_mod_u128(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u128(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Pollard rho (Floyd cycle finding) with an iteration budget.
fn pollard_rho(n: u128, budget: u64) -> Option<u128> {
    if n.is_multiple_of(2) {
        return Some(2);
    }
    for c in 1..20u128 {
        let f = |x: u128| add_mod_u128(mul_mod_u128(x, x, n), c, n);
        let (mut x, mut y, mut d) = (2u128, 2u128, 1u128);
        let mut steps = 0;
        while d == 1 && steps < budget {
            x = f(x);
            y = f(f(y));
            d = gcd_u128(x.abs_diff(y), n);
            steps += 1;
        }
        if d != 1 && d != n {
            return Some(d);
        }
    }
    None
}

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
#[error("factoring {0} exceeded the effort bound")]
pub struct FactorEffortExceeded(pub u128);

/// Prime factorization as sorted `(prime, exponent)` pairs.
pub fn factorize(n: u128) -> Result<Vec<(u128, u32)>, FactorEffortExceeded> {
    let mut out: Vec<(u128, u32)> = Vec::new();
    let push = |p: u128, out: &mut Vec<(u128, u32)>| match out.iter_mut().find(|e| e.0 == p) {
        Some(e) => e.1 += 1,
        None => out.push((p, 1)),
    };
    let mut rest = n;
    let mut d: u128 = 2;
    while d < 100_000 && d * d <= rest {
        while rest.is_multiple_of(d) {
            push(d, &mut out);
            rest /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_probable_prime(m) {
            push(m, &mut out);
            continue;
        }
        let f = pollard_rho(m, 2_000_000).ok_or(FactorEffortExceeded(m))?;
        stack.push(f);
        stack.push(m / f);
    }
    out.sort_unstable();
    Ok(out)
}

pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

pub fn euler_phi(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
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

/// Integer polynomial, coefficients low degree first, no trailing zeros.
pub type IntPoly = Vec<i128>;

fn trim(p: &mut IntPoly) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

pub fn poly_mul(a: &[i128], b: &[i128]) -> IntPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

/// Exact division by a monic polynomial; `None` if there is a remainder.
pub fn poly_div_exact(a: &[i128], monic: &[i128]) -> Option<IntPoly> {
    let dm = monic.len() - 1;
    let mut rem: IntPoly = a.to_vec();
    trim(&mut rem);
    if rem.len() < monic.len() {
        return rem.is_empty().then(Vec::new);
    }
    let mut quot = vec![0; rem.len() - dm];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dm];
        quot[k] = c;
        for (j, m) in monic.iter().enumerate() {
            rem[k + j] -= c * m;
        }
    }
    trim(&mut rem);
    rem.is_empty().then_some(quot)
}

/// The `d`-th cyclotomic polynomial.
pub fn cyclotomic_poly(d: u64) -> IntPoly {
    let mut num: IntPoly = vec![-1];
    num.resize(d as usize + 1, 0);
    num[d as usize] = 1;
    for e in divisors(d).into_iter().filter(|&e| e < d) {
        num = poly_div_exact(&num, &cyclotomic_poly(e)).expect("x^d - 1 is divisible by Phi_e");
    }
    num
}

/// Dense integer matrix, row-major.
pub type IntMatrix = Vec<Vec<i64>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum())
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &IntMatrix, v: &[i64]) -> Vec<i64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn mat_neg(a: &IntMatrix) -> IntMatrix {
    a.iter().map(|r| r.iter().map(|x| -x).collect()).collect()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(a: &IntMatrix) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = a
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Characteristic polynomial `det(xI - A)` by Faddeev-LeVerrier.
pub fn char_poly(a: &IntMatrix) -> IntPoly {
    let n = a.len();
    let mut coeffs = vec![0i128; n + 1];
    coeffs[n] = 1;
    let a128: Vec<Vec<i128>> = a
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut mk: Vec<Vec<i128>> = vec![vec![0; n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![0i128; n]; n];
        for i in 0..n {
            for j in 0..n {
                next[i][j] = (0..n).map(|t| a128[i][t] * mk[t][j]).sum();
            }
            next[i][i] += coeffs[n - k + 1];
        }
        mk = next;
        let am: i128 = (0..n)
            .map(|i| (0..n).map(|t| a128[i][t] * mk[t][i]).sum::<i128>())
            .sum();
        coeffs[n - k] = -am / k as i128;
    }
    coeffs
}

/// Rank over Q of an integer matrix (fraction-free elimination).
pub fn rank_over_q(a: &[Vec<i128>]) -> usize {
    let mut m: Vec<Vec<i128>> = a.to_vec();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        for r in 0..rows {
            if r != rank && m[r][c] != 0 {
                let (a0, b0) = (m[rank][c], m[r][c]);
                for j in 0..cols {
                    m[r][j] = m[r][j] * a0 - m[rank][j] * b0;
                }
                let g = m[r]
                    .iter()
                    .fold(0u128, |g, &x| gcd_u128(g, x.unsigned_abs()));
                if g > 1 {
                    m[r].iter_mut().for_each(|x| *x /= g as i128);
                }
            }
        }
        rank += 1;
    }
    rank
}
