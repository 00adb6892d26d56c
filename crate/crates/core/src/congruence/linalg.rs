//! Matrices over `Z/p^K`.

use crate::arith;

pub type Mat = Vec<Vec<u64>>;

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
        .collect()
}

pub fn mat_mul(a: &Mat, b: &Mat, modulus: u64) -> Mat {
    let k = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let s: u128 = (0..k)
                        .map(|t| row[t] as u128 * b[t][j] as u128 % modulus as u128)
                        .sum();
                    (s % modulus as u128) as u64
                })
                .collect()
        })
        .collect()
}

pub fn reduce(a: &Mat, modulus: u64) -> Mat {
    a.iter()
        .map(|r| r.iter().map(|&x| x % modulus).collect())
        .collect()
}

pub fn from_int(a: &arith::IntMatrix, modulus: u64) -> Mat {
    a.iter()
        .map(|r| {
            r.iter()
                .map(|&x| x.rem_euclid(modulus as i64) as u64)
                .collect()
        })
        .collect()
}

pub fn is_identity(a: &Mat) -> bool {
    *a == identity(a.len())
}

/// Block-diagonal sum of `n` copies.
pub fn kron_identity(a: &Mat, n: usize) -> Mat {
    let d = a.len();
    let mut out = vec![vec![0; d * n]; d * n];
    for c in 0..n {
        for i in 0..d {
            for j in 0..d {
                out[c * d + i][c * d + j] = a[i][j];
            }
        }
    }
    out
}

/// `p`-adic valuation of `x` in `Z/p^K`, with `K` for zero.
pub fn val(x: u64, p: u64, k: u32) -> u32 {
    if x == 0 {
        k
    } else {
        arith::valuation(x as u128, p as u128).min(k)
    }
}

/// Valuations of the invariant factors of a `rows x cols` matrix over
/// `Z/p^K`, one per column (`K` where the factor vanishes).
pub fn smith_valuations(rows: &[Vec<u64>], cols: usize, p: u64, k: u32) -> Vec<u32> {
    let pk = p.pow(k);
    let mut a: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x % pk).collect())
        .collect();
    let nrows = a.len();
    let mut out = Vec::with_capacity(cols);
    let mut top = 0;
    let mut live: Vec<usize> = (0..cols).collect();
    while top < nrows && !live.is_empty() {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in top..nrows {
            for (ci, &j) in live.iter().enumerate() {
                let v = val(a[i][j], p, k);
                if v < k && best.is_none_or(|b| v < b.0) {
                    best = Some((v, i, ci));
                }
            }
        }
        let Some((v, i, ci)) = best else { break };
        let j = live.remove(ci);
        a.swap(top, i);
        let piv = a[top][j];
        let unit = piv / p.pow(v);
        let unit_inv = arith::inv_mod(unit as i128, pk as i128).expect("unit") as u64;
        for r in top + 1..nrows {
            let x = a[r][j];
            if x == 0 {
                continue;
            }
            // x = p^v * y since v is minimal
            let f = ((x / p.pow(v)) as u128 * unit_inv as u128 % pk as u128) as u64;
            for &c in live.iter().chain(std::iter::once(&j)) {
                let sub = (f as u128 * a[top][c] as u128 % pk as u128) as u64;
                a[r][c] = (a[r][c] + pk - sub) % pk;
            }
        }
        // the remaining entries of the pivot row can be cleared by column
        // operations without touching other rows' contribution
        for &c in &live {
            a[top][c] = 0;
        }
        out.push(v);
        top += 1;
    }
    out.resize(cols, k);
    out
}

/// `log_p` of the size of the kernel of the stacked maps.
pub fn kernel_length(rows: &[Vec<u64>], cols: usize, p: u64, k: u32) -> u32 {
    smith_valuations(rows, cols, p, k).iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_kernel(rows: &[Vec<u64>], cols: usize, pk: u64) -> usize {
        let total = pk.pow(cols as u32);
        (0..total)
            .filter(|&mut_idx| {
                let mut idx = mut_idx;
                let x: Vec<u64> = (0..cols)
                    .map(|_| {
                        let d = idx % pk;
                        idx /= pk;
                        d
                    })
                    .collect();
                rows.iter()
                    .all(|r| r.iter().zip(&x).map(|(a, b)| a * b).sum::<u64>() % pk == 0)
            })
            .count()
    }

    #[test]
    fn kernel_sizes_match_enumeration() {
        let cases: Vec<Vec<Vec<u64>>> = vec![
            vec![vec![3, 0], vec![0, 0]],
            vec![vec![3, 6], vec![1, 2]],
            vec![vec![0, 0]],
            vec![vec![3, 1], vec![6, 2]],
            vec![vec![3, 3, 0], vec![0, 3, 6], vec![1, 0, 2]],
        ];
        for rows in cases {
            let cols = rows[0].len();
            let len = kernel_length(&rows, cols, 3, 2);
            assert_eq!(
                9usize.pow(0) * 3usize.pow(len),
                brute_kernel(&rows, cols, 9),
                "{rows:?}"
            );
        }
    }
}
