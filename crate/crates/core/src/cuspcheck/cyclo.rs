use serde::Serialize;

/// An element of `Z[zeta_{p^L}]` in the basis `zeta^e`, `e < phi(p^L)`,
/// obtained from exponent counts by the relations
/// `sum_{j < p} zeta^{i + j p^{L-1}} = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycloSum {
    pub p: u64,
    pub level: u32,
    pub coeffs: Vec<i64>,
}

impl CycloSum {
    /// `counts[e]` is the multiplicity of `zeta^e`, `e < p^L`.
    pub fn from_counts(p: u64, level: u32, counts: &[i64]) -> Self {
        let n = p.pow(level) as usize;
        assert_eq!(counts.len(), n, "one count per exponent");
        if level == 0 {
            return Self {
                p,
                level,
                coeffs: vec![counts[0]],
            };
        }
        let block = n / p as usize;
        let top = n - block;
        let coeffs = (0..top)
            .map(|e| counts[e] - counts[top + e % block])
            .collect();
        Self { p, level, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// The rational integer `c`, if the sum equals it.
    pub fn as_integer(&self) -> Option<i64> {
        self.coeffs[1..]
            .iter()
            .all(|&c| c == 0)
            .then_some(self.coeffs[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_character_sums_vanish() {
        for (p, l) in [(3u64, 1u32), (3, 2), (5, 1), (5, 2)] {
            let n = p.pow(l);
            for x in 1..n {
                let mut counts = vec![0i64; n as usize];
                for a in 0..n {
                    counts[(a * x % n) as usize] += 1;
                }
                assert!(CycloSum::from_counts(p, l, &counts).is_zero());
            }
        }
    }

    #[test]
    fn basis_elements_survive() {
        let mut counts = vec![0i64; 9];
        counts[2] = 3;
        let s = CycloSum::from_counts(3, 2, &counts);
        assert!(!s.is_zero());
        assert_eq!(s.coeffs.len(), 6);
        counts = vec![0; 9];
        counts[0] = 4;
        assert_eq!(CycloSum::from_counts(3, 2, &counts).as_integer(), Some(4));
        // zeta^6 = -1 - zeta^3 in Z[zeta_9]
        counts = vec![0; 9];
        counts[6] = 1;
        assert_eq!(
            CycloSum::from_counts(3, 2, &counts).coeffs,
            vec![-1, 0, 0, -1, 0, 0]
        );
    }
}
