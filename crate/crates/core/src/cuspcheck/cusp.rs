use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith;

use super::cyclo::CycloSum;
use super::matrix::{
    lower, mat_mul, pairing_mod_o, sl2_inverse, upper, Fraction, Mat2, TruncatedMatrix,
};
use super::{basis, is_square_mod, CuspError, EllipticSeed, LambdaChar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parabolic {
    Upper,
    Lower,
}

impl Parabolic {
    pub const BOTH: [Parabolic; 2] = [Parabolic::Upper, Parabolic::Lower];

    fn unipotent(self, t: u64, n: u64) -> Mat2 {
        match self {
            Parabolic::Upper => upper(t, n),
            Parabolic::Lower => lower(t, n),
        }
    }
}

fn check_x(x: u64, p: u64, m: u32) -> Result<(), CuspError> {
    if x == 0 || arith::valuation(x as u128, p as u128) >= m {
        return Err(CuspError::ExcludedCharacter { x, m });
    }
    Ok(())
}

/// Values of `lambda(g u(t))` for `t = t_0 + p^n s`, `s < p^m`, where
/// `t_0 + p^n Z_p` is the set of `t` with `g u(t) in K_n`; `None` when that
/// set is empty. Also checks on `s < p^{m+1}` that the values only depend on
/// `s mod p^m`, so these cosets cover the support.
fn fibre(lam: &LambdaChar, g: &Mat2, par: Parabolic) -> Result<Option<Vec<u64>>, CuspError> {
    let (p, n, m) = (lam.p, lam.n, lam.m);
    let modulus = p.pow(lam.k);
    let pn = p.pow(n);
    let gi = sl2_inverse(g, modulus);
    // K_n is the principal congruence subgroup mod p^n
    let (diag_ok, off_zero, t0) = match par {
        Parabolic::Upper => (
            gi[0][0] % pn == 1 && gi[1][1] % pn == 1,
            gi[1][0].is_multiple_of(pn),
            gi[0][1],
        ),
        Parabolic::Lower => (
            gi[0][0] % pn == 1 && gi[1][1] % pn == 1,
            gi[0][1].is_multiple_of(pn),
            gi[1][0],
        ),
    };
    if !(diag_ok && off_zero) {
        return Ok(None);
    }
    let pm = p.pow(m) as usize;
    let window = pm * p as usize;
    let mut vals = Vec::with_capacity(window);
    for s in 0..window as u64 {
        let t = (t0 + pn * s) % modulus;
        vals.push(lam.eval(&mat_mul(g, &par.unipotent(t, modulus), modulus))?);
    }
    if (pm..window).any(|s| vals[s] != vals[s % pm]) {
        return Err(CuspError::WindowTooSmall);
    }
    vals.truncate(pm);
    Ok(Some(vals))
}

fn character_sum(p: u64, m: u32, x: u64, vals: &[u64]) -> CycloSum {
    let pm = p.pow(m);
    let mut counts = vec![0i64; pm as usize];
    for &v in vals {
        counts[((x % pm) * v % pm) as usize] += 1;
    }
    CycloSum::from_counts(p, m, &counts)
}

#[derive(Clone, Debug, Serialize)]
pub struct CuspRow {
    pub sample: usize,
    pub parabolic: Parabolic,
    pub x: u64,
    pub support: bool,
    pub sum: CycloSum,
}

#[derive(Clone, Debug, Serialize)]
pub struct CuspReport {
    pub p: u64,
    pub n: u32,
    pub m: u32,
    pub x: u64,
    /// Each coset `u(t) N(p^{n+m} Z_p)` carries measure `p^{measure_exponent}`
    /// for the Haar measure giving `N(Z_p)` volume one.
    pub measure_exponent: i64,
    pub rows: Vec<CuspRow>,
    pub pass: bool,
}

/// `sum_u psi_x(lambda(g u))` over both standard unipotent radicals for every
/// sample, in `Z[zeta_{p^m}]`.
pub fn cusp_integral_check(
    lam: &LambdaChar,
    x: u64,
    samples: &[Mat2],
) -> Result<CuspReport, CuspError> {
    check_x(x, lam.p, lam.m)?;
    let fibres = fibres(lam, samples)?;
    let rows = rows_for(lam, x, &fibres);
    let pass = rows.iter().all(|r| r.sum.is_zero());
    Ok(CuspReport {
        p: lam.p,
        n: lam.n,
        m: lam.m,
        x,
        measure_exponent: -((lam.n + lam.m) as i64),
        rows,
        pass,
    })
}

type Fibres = Vec<[Option<Vec<u64>>; 2]>;

fn fibres(lam: &LambdaChar, samples: &[Mat2]) -> Result<Fibres, CuspError> {
    samples
        .par_iter()
        .map(|g| {
            Ok([
                fibre(lam, g, Parabolic::Upper)?,
                fibre(lam, g, Parabolic::Lower)?,
            ])
        })
        .collect()
}

fn rows_for(lam: &LambdaChar, x: u64, fibres: &Fibres) -> Vec<CuspRow> {
    let mut rows = Vec::new();
    for (i, pair) in fibres.iter().enumerate() {
        for (par, f) in Parabolic::BOTH.iter().zip(pair) {
            let sum = match f {
                Some(vals) => character_sum(lam.p, lam.m, x, vals),
                None => CycloSum::from_counts(lam.p, lam.m, &vec![0; lam.p.pow(lam.m) as usize]),
            };
            rows.push(CuspRow {
                sample: i,
                parabolic: *par,
                x,
                support: f.is_some(),
                sum,
            });
        }
    }
    rows
}

#[derive(Clone, Debug, Serialize)]
pub struct CuspBattery {
    pub p: u64,
    pub n: u32,
    pub m: u32,
    pub samples: usize,
    /// Representatives of `(Z_p - p^m Z_p) / p^{m+1}`.
    pub x_classes: usize,
    /// Samples with nonempty support, per parabolic.
    pub supported: [usize; 2],
    pub sums_checked: usize,
    pub nonzero_sums: usize,
    pub pass: bool,
}

/// [`cusp_integral_check`] for every `x` class mod `p^{m+1}` outside
/// `p^m Z_p`, sharing the `lambda` evaluations.
pub fn cusp_battery(lam: &LambdaChar, samples: &[Mat2]) -> Result<CuspBattery, CuspError> {
    let fibres = fibres(lam, samples)?;
    let xs: Vec<u64> = (1..lam.p.pow(lam.m + 1))
        .filter(|&x| check_x(x, lam.p, lam.m).is_ok())
        .collect();
    let mut sums_checked = 0;
    let mut nonzero_sums = 0;
    for &x in &xs {
        for r in rows_for(lam, x, &fibres) {
            sums_checked += 1;
            nonzero_sums += usize::from(!r.sum.is_zero());
        }
    }
    let supported = [0, 1].map(|j| fibres.iter().filter(|f| f[j].is_some()).count());
    Ok(CuspBattery {
        p: lam.p,
        n: lam.n,
        m: lam.m,
        samples: samples.len(),
        x_classes: xs.len(),
        supported,
        sums_checked,
        nonzero_sums,
        pass: nonzero_sums == 0,
    })
}

/// Seeded samples cycling through: elements of `K_n`, `K_n` times an upper
/// unipotent, `K_n` times a lower unipotent, and products
/// `u(a) u^-(b) u(c)` that usually miss `K_n N`.
pub fn sample_elements(lam: &LambdaChar, count: usize, seed: u64) -> Result<Vec<Mat2>, CuspError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modulus = lam.p.pow(lam.k);
    let span = lam.p.pow(lam.k - lam.n) as i64;
    (0..count)
        .map(|i| {
            let coords = [
                rng.gen_range(0..span),
                rng.gen_range(0..span),
                rng.gen_range(0..span),
            ];
            let k = lam.element(coords)?;
            let t = rng.gen_range(0..modulus);
            Ok(match i % 4 {
                0 => k,
                1 => mat_mul(&k, &upper(t, modulus), modulus),
                2 => mat_mul(&k, &lower(t, modulus), modulus),
                _ => {
                    let (a, b) = (rng.gen_range(0..modulus), rng.gen_range(0..modulus));
                    mat_mul(
                        &mat_mul(&upper(a, modulus), &lower(b, modulus), modulus),
                        &upper(t, modulus),
                        modulus,
                    )
                }
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct FourierReport {
    pub p: u64,
    pub k: u32,
    pub m: u32,
    pub x: u64,
    /// `<Y + x Y_m, e>` mod `Z_p` for `e = H, E, F`.
    pub functional: Vec<Fraction>,
    pub integral: bool,
    /// Predicted `sum_{v in L_0 / p^K L_0} psi(<Y + x Y_m, v>)`: `p^{3K}` or 0.
    pub predicted: u64,
    /// Agreement of the exhaustive cyclotomic sum with the prediction.
    pub exact: Option<bool>,
    /// `-x Y_m + L_0^perp` is elliptic: its scaled residue has nonsquare discriminant.
    pub support_elliptic: bool,
}

impl FourierReport {
    pub fn ok(&self) -> bool {
        self.exact != Some(false) && self.support_elliptic
    }
}

/// Evaluates the Fourier transform of `phi_{m,x}` at `y` on `L_0 / p^K L_0`.
/// Needs `K >= m + 1`; the exhaustive sum runs when `p^{3K} <= 10^6`.
pub fn fourier_support_check(
    seed: &EllipticSeed,
    m: u32,
    x: u64,
    y: &TruncatedMatrix,
) -> Result<FourierReport, CuspError> {
    let (p, k) = (seed.p, seed.k);
    if k < m + 1 {
        return Err(CuspError::PrecisionTooLow {
            needed: m + 1,
            got: k,
        });
    }
    check_x(x, p, m)?;
    let w = y.add(&seed.y(m).scale(x as i64));
    let functional = basis(p, k)
        .iter()
        .map(|e| pairing_mod_o(&w, e))
        .collect::<Result<Vec<_>, _>>()?;
    let integral = functional.iter().all(|f| f.level == 0);
    let full = p.pow(3 * k);
    let predicted = if integral { full } else { 0 };
    let exact = (full <= 1_000_000).then(|| {
        let pk = p.pow(k);
        let a: Vec<u64> = functional
            .iter()
            .map(|f| f.num * p.pow(k - f.level) % pk)
            .collect();
        let mut counts = vec![0i64; pk as usize];
        for c0 in 0..pk {
            for c1 in 0..pk {
                for c2 in 0..pk {
                    counts[((c0 * a[0] + c1 * a[1] + c2 * a[2]) % pk) as usize] += 1;
                }
            }
        }
        let sum = CycloSum::from_counts(p, k, &counts);
        if integral {
            sum.as_integer() == Some(full as i64)
        } else {
            sum.is_zero()
        }
    });
    let u = x / p.pow(arith::valuation(x as u128, p as u128));
    let support_elliptic = !is_square_mod(4 * (u % p) * (u % p) % p * seed.epsilon % p, p);
    Ok(FourierReport {
        p,
        k,
        m,
        x,
        functional,
        integral,
        predicted,
        exact,
        support_elliptic,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{elliptic_seed, lambda_character};
    use super::*;

    #[test]
    fn identity_sample_vanishes() {
        let seed = elliptic_seed(5, 8).unwrap();
        let lam = lambda_character(&seed, 4, 1).unwrap();
        let r = cusp_integral_check(&lam, 1, &[[[1, 0], [0, 1]]]).unwrap();
        assert!(r.pass);
        assert!(r.rows.iter().all(|row| row.support));
        assert!(matches!(
            cusp_integral_check(&lam, 5, &[]),
            Err(CuspError::ExcludedCharacter { .. })
        ));
    }

    #[test]
    fn empty_support_is_trivially_zero() {
        let seed = elliptic_seed(5, 8).unwrap();
        let lam = lambda_character(&seed, 3, 1).unwrap();
        let n = 5u64.pow(8);
        // the long Weyl element is far from K_n N
        let w = [[0, 1], [n - 1, 0]];
        let r = cusp_integral_check(&lam, 2, &[w]).unwrap();
        assert!(r.rows.iter().all(|row| !row.support && row.sum.is_zero()));
    }

    #[test]
    fn battery_small() {
        let seed = elliptic_seed(5, 8).unwrap();
        let lam = lambda_character(&seed, 3, 1).unwrap();
        let samples = sample_elements(&lam, 8, 1).unwrap();
        let b = cusp_battery(&lam, &samples).unwrap();
        assert!(b.pass);
        assert_eq!(b.x_classes, 20);
        assert!(b.supported[0] >= 4 && b.supported[1] >= 4);
    }

    #[test]
    fn a_non_cuspidal_function_is_detected() {
        // the trivial character (x = 0 mod p^m) gives a nonzero sum
        let seed = elliptic_seed(5, 8).unwrap();
        let lam = lambda_character(&seed, 3, 1).unwrap();
        let f = fibre(&lam, &[[1, 0], [0, 1]], Parabolic::Upper)
            .unwrap()
            .unwrap();
        assert_eq!(character_sum(5, 1, 5, &f).as_integer(), Some(5));
    }

    #[test]
    fn fourier_support() {
        for (p, k, m) in [(3u64, 2u32, 1u32), (5, 4, 2)] {
            let seed = elliptic_seed(p, 3).unwrap().with_precision(k);
            for x in [1u64, 2, p + 1] {
                let minus = seed.y(m).scale(-(x as i64));
                let r = fourier_support_check(&seed, m, x, &minus).unwrap();
                assert!(r.integral && r.ok(), "{r:?}");
                let shifted = minus.add(&TruncatedMatrix::new(p, k, 0, [[1, 2], [1, -1]]));
                assert!(
                    fourier_support_check(&seed, m, x, &shifted)
                        .unwrap()
                        .integral
                );
                let off = minus.add(&TruncatedMatrix::new(p, k, -1, [[0, 1], [0, 0]]));
                let r = fourier_support_check(&seed, m, x, &off).unwrap();
                assert!(!r.integral && r.predicted == 0 && r.ok(), "{r:?}");
                if p == 3 {
                    assert!(r.exact.is_some());
                }
            }
        }
    }
}
