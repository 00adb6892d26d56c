//! `sl_2` over `Q_p` at precision `p^K`: an elliptic seed `(Y_1, L_0)`,
//! the characters `lambda_{n,m}` on `K_n = exp(p^n L_0)`, and exact
//! cyclotomic checks that the associated functions are cusp forms.
//!
//! The additive character `psi` here is trivial on `Z_p` and nontrivial on
//! `p^{-1} Z_p`; see [`psi_main`] for the other normalization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::arith;

mod cusp;
mod cyclo;
mod matrix;

pub use cusp::{
    cusp_battery, cusp_integral_check, fourier_support_check, sample_elements, CuspBattery,
    CuspReport, CuspRow, FourierReport, Parabolic,
};
pub use cyclo::CycloSum;
pub use matrix::{
    det, exp_truncated, log_truncated, lower, mat_mul, mat_valuation, pairing_mod_o, sl2_inverse,
    upper, Fraction, Mat2, TruncatedMatrix,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CuspError {
    #[error("p must be an odd prime")]
    BadPrime,
    #[error("precision p^{got} is too low, need p^{needed}")]
    PrecisionTooLow { needed: u32, got: u32 },
    #[error("n = {n} is below the homomorphism threshold {n1}")]
    BelowThreshold { n: u32, n1: u32 },
    #[error("exponential/logarithm series needs p >= 5 and positive valuation")]
    Convergence,
    #[error("element is not in K_n")]
    NotInKn,
    #[error("x = {x} does not define a nontrivial character of level {m}")]
    ExcludedCharacter { x: u64, m: u32 },
    #[error("coset window does not cover the support")]
    WindowTooSmall,
}

/// `(Y_1, L_0)` with `Y_1 = p^{-1} [[0, eps], [1, 0]]` and `L_0 = sl_2(Z_p)`.
#[derive(Clone, Debug, Serialize)]
pub struct EllipticSeed {
    pub p: u64,
    pub k: u32,
    /// Smallest quadratic nonresidue mod `p`.
    pub epsilon: u64,
    pub y1: TruncatedMatrix,
    /// Smallest valuation of `<Y_1, e_i>` over the basis `H, E, F` of `L_0`.
    pub pairing_valuation: i64,
    /// Determinant of the trace form on `H, E, F`; a unit gives `L_0^perp = L_0`.
    pub gram_det: i64,
    /// `disc(char poly of p Y')` mod `p` for every `Y'` in `Y_1 + L_0^perp`.
    pub discriminant_residue: u64,
    pub certificate: bool,
}

fn is_square_mod(a: u64, p: u64) -> bool {
    (0..p).any(|x| x * x % p == a % p)
}

pub fn smallest_nonresidue(p: u64) -> u64 {
    (2..p)
        .find(|&a| !is_square_mod(a, p))
        .expect("odd prime has a nonresidue")
}

/// Basis `H, E, F` of `sl_2(Z_p)`.
fn basis(p: u64, k: u32) -> [TruncatedMatrix; 3] {
    [
        TruncatedMatrix::new(p, k, 0, [[1, 0], [0, -1]]),
        TruncatedMatrix::new(p, k, 0, [[0, 1], [0, 0]]),
        TruncatedMatrix::new(p, k, 0, [[0, 0], [1, 0]]),
    ]
}

pub fn elliptic_seed(p: u64, k: u32) -> Result<EllipticSeed, CuspError> {
    if p == 2 || !arith::is_prime_small(p) {
        return Err(CuspError::BadPrime);
    }
    if k < 3 {
        return Err(CuspError::PrecisionTooLow { needed: 3, got: k });
    }
    let eps = smallest_nonresidue(p);
    let y1 = TruncatedMatrix::new(p, k, -1, [[0, eps as i64], [1, 0]]);
    let b = basis(p, k);
    let pairing_valuation = b
        .iter()
        .map(|e| {
            let prod = y1.mul(e);
            let tr = (prod.entries[0][0] + prod.entries[1][1]) % p.pow(k);
            if tr == 0 {
                i64::MAX
            } else {
                prod.offset as i64 + arith::valuation(tr as u128, p as u128) as i64
            }
        })
        .min()
        .expect("three basis vectors");
    let gram: Vec<Vec<i64>> = b
        .iter()
        .map(|x| {
            b.iter()
                .map(|y| {
                    let t = x.mul(y);
                    let n = p.pow(k);
                    let tr = (t.entries[0][0] + t.entries[1][1]) % n;
                    if tr > n / 2 {
                        tr as i64 - n as i64
                    } else {
                        tr as i64
                    }
                })
                .collect()
        })
        .collect();
    let gram_det = arith::determinant(&gram) as i64;
    // p Y' = [[0, eps], [1, 0]] + p Z for Z in L_0^perp = L_0, so the residue
    // of the trace-zero characteristic polynomial x^2 + det is fixed
    let pd = p as i64;
    let disc = (4 * eps as i64).rem_euclid(pd) as u64;
    let det_res = (-(eps as i64)).rem_euclid(pd);
    let consistent = (-4 * det_res).rem_euclid(pd) as u64 == disc;
    let certificate = consistent
        && gram_det.rem_euclid(pd) != 0
        && pairing_valuation == -1
        && !is_square_mod(disc, p);
    Ok(EllipticSeed {
        p,
        k,
        epsilon: eps,
        y1,
        pairing_valuation,
        gram_det,
        discriminant_residue: disc,
        certificate,
    })
}

impl EllipticSeed {
    /// The same seed read mod `p^k`, for small exhaustive checks below the
    /// construction precision.
    pub fn with_precision(&self, k: u32) -> EllipticSeed {
        let n = self.p.pow(k);
        let y1 = TruncatedMatrix {
            k,
            entries: self.y1.entries.map(|r| r.map(|x| x % n)),
            ..self.y1.clone()
        };
        EllipticSeed {
            k,
            y1,
            ..self.clone()
        }
    }

    /// `Y_j = p^{1-j} Y_1`.
    pub fn y(&self, j: u32) -> TruncatedMatrix {
        TruncatedMatrix {
            offset: self.y1.offset + 1 - j as i32,
            ..self.y1.clone()
        }
    }
}

/// `lambda_{n,m}(exp X) = <Y_{n+m}, X> mod Z_p`, read in `Z/p^m` through
/// `p^{-m} Z_p / Z_p`.
#[derive(Clone, Debug, Serialize)]
pub struct LambdaChar {
    pub p: u64,
    pub k: u32,
    pub n: u32,
    pub m: u32,
    pub y: TruncatedMatrix,
}

/// Smallest `n` accepted by [`lambda_character`]: commutator terms of
/// `log(exp X exp Y)` lie in `p^{2n} L_0` and pair into `p^{n-m} Z_p`.
pub fn homomorphism_threshold(m: u32) -> u32 {
    m + 2
}

pub fn lambda_character(seed: &EllipticSeed, n: u32, m: u32) -> Result<LambdaChar, CuspError> {
    if seed.p < 5 {
        return Err(CuspError::Convergence);
    }
    let n1 = homomorphism_threshold(m);
    if n < n1 {
        return Err(CuspError::BelowThreshold { n, n1 });
    }
    if seed.k < n + m + 2 {
        return Err(CuspError::PrecisionTooLow {
            needed: n + m + 2,
            got: seed.k,
        });
    }
    Ok(LambdaChar {
        p: seed.p,
        k: seed.k,
        n,
        m,
        y: seed.y(n + m),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HomomorphismReport {
    pub generator_pairs: usize,
    pub random_pairs: usize,
    pub failures: usize,
    /// Smallest valuation of `log(exp X exp Y) - X - Y` over the tested pairs.
    pub bch_min_valuation: u32,
    pub bch_ok: bool,
    /// `lambda` on `exp(p^n H), exp(p^n E), exp(p^n F)`.
    pub generator_images: Vec<u64>,
    pub surjective: bool,
}

impl HomomorphismReport {
    pub fn ok(&self) -> bool {
        self.failures == 0 && self.bch_ok && self.surjective
    }
}

impl LambdaChar {
    fn modulus(&self) -> u64 {
        self.p.pow(self.k)
    }

    /// `lambda` on an element of `p^n L_0` given as an integral matrix.
    pub fn eval_lie(&self, x: &Mat2) -> Result<u64, CuspError> {
        if mat_valuation(x, self.p, self.k) < self.n {
            return Err(CuspError::NotInKn);
        }
        let f = pairing_mod_o(&self.y, &TruncatedMatrix::integral(self.p, self.k, *x))?;
        // f = num / p^level with level <= m since x is in p^n L_0
        Ok(f.num * self.p.pow(self.m - f.level) % self.p.pow(self.m))
    }

    pub fn eval(&self, g: &Mat2) -> Result<u64, CuspError> {
        let n = self.modulus();
        let mut a = *g;
        a[0][0] = (a[0][0] + n - 1) % n;
        a[1][1] = (a[1][1] + n - 1) % n;
        if mat_valuation(&a, self.p, self.k) < self.n {
            return Err(CuspError::NotInKn);
        }
        self.eval_lie(&log_truncated(self.p, self.k, g)?.entries)
    }

    /// `exp(p^n X')` for an integral `X'` given as `[a, b, c]` (`[[a, b], [c, -a]]`).
    pub fn element(&self, coords: [i64; 3]) -> Result<Mat2, CuspError> {
        let [a, b, c] = coords;
        let x = TruncatedMatrix::new(self.p, self.k, self.n as i32, [[a, b], [c, -a]]);
        Ok(exp_truncated(&x)?.entries)
    }

    /// Checks `lambda(gh) = lambda(g) + lambda(h)` on all pairs of
    /// generators and on `random` seeded pairs, together with the
    /// commutator containment `log(exp X exp Y) in X + Y + p^{2n} L_0`.
    pub fn verify_homomorphism(
        &self,
        random: usize,
        seed: u64,
    ) -> Result<HomomorphismReport, CuspError> {
        let n = self.modulus();
        let pm = self.p.pow(self.m);
        let gens = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let span = self.p.pow(self.k - self.n) as i64;
        let randoms: Vec<([i64; 3], [i64; 3])> = (0..random)
            .map(|_| {
                let mut v = || {
                    [
                        rng.gen_range(0..span),
                        rng.gen_range(0..span),
                        rng.gen_range(0..span),
                    ]
                };
                (v(), v())
            })
            .collect();
        let pairs: Vec<([i64; 3], [i64; 3])> = gens
            .iter()
            .flat_map(|&a| gens.iter().map(move |&b| (a, b)))
            .chain(randoms)
            .collect();
        let mut failures = 0;
        let mut bch = self.k;
        for (a, b) in &pairs {
            let (g, h) = (self.element(*a)?, self.element(*b)?);
            let gh = mat_mul(&g, &h, n);
            if self.eval(&gh)? != (self.eval(&g)? + self.eval(&h)?) % pm {
                failures += 1;
            }
            let z = log_truncated(self.p, self.k, &gh)?.entries;
            let lie = |c: [i64; 3]| {
                TruncatedMatrix::new(self.p, self.k, self.n as i32, [[c[0], c[1]], [c[2], -c[0]]])
            };
            let sum = lie(*a).add(&lie(*b)).to_integral().expect("integral");
            let mut diff = [[0u64; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    diff[i][j] = (z[i][j] + n - sum[i][j]) % n;
                }
            }
            bch = bch.min(mat_valuation(&diff, self.p, self.k));
        }
        let generator_images = gens
            .iter()
            .map(|&c| self.element(c).and_then(|g| self.eval(&g)))
            .collect::<Result<Vec<_>, _>>()?;
        let surjective = generator_images.iter().any(|&v| v % self.p != 0);
        Ok(HomomorphismReport {
            generator_pairs: 9,
            random_pairs: random,
            failures,
            bch_min_valuation: bch,
            bch_ok: bch >= (2 * self.n).min(self.k),
            generator_images,
            surjective,
        })
    }
}

/// `psi(num / p^level)` as the exponent `e` of `zeta_{p^L}^e`, returned as
/// `(e, L)` in lowest terms (`L = 0` for the trivial value).
pub fn psi_appendix(p: u64, num: u64, level: u32) -> Fraction {
    matrix::reduce_fraction(p, num % p.pow(level), level)
}

/// The main-text character `Psi`, trivial on `p Z_p` and nontrivial on
/// `Z_p`: `Psi(y) = psi(y / p)`.
pub fn psi_main(p: u64, num: u64, level: u32) -> Fraction {
    psi_appendix(p, num, level + 1)
}
