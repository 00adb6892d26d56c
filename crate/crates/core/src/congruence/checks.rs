use rayon::prelude::*;
use serde::Serialize;

use crate::arith;

use super::am::{am_ring, psi_character};
use super::group::Elem;
use super::linalg::{self, Mat};
use super::model::{build_space, CoeffModule, FiniteModel};
use super::CongruenceError;

#[derive(Clone, Debug, Serialize)]
pub struct OperatorCheck {
    pub gamma: Elem,
    pub coset_count: usize,
    /// Matrix on `M(U, (Z/p^m)^N)` (orbit-major, row-major).
    pub lhs: Mat,
    /// Matrix on `M(U, A_m/(T-1))^N` after `T -> 1`.
    pub rhs: Mat,
    pub commutes: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CongruenceReport {
    pub p: u64,
    pub m: u32,
    pub n: usize,
    pub orbit_count: usize,
    pub lhs_length: u32,
    pub rhs_length: u32,
    /// The induced `U_p`-action on `A_m/(T-1)` is trivial.
    pub quotient_action_trivial: bool,
    pub operators: Vec<OperatorCheck>,
    pub pass: bool,
}

/// Compares `M(U, (Z/p^m)^N)` with `M(U, A_m/(T-1))^N` under the canonical
/// identification `A_m/(T-1) = Z/p^m`, which is the identity on coordinates,
/// so naturality is equality of every generating Hecke matrix.
pub fn verify_congruence_theorem(
    model: &FiniteModel,
    n: usize,
) -> Result<CongruenceReport, CongruenceError> {
    let ring = am_ring(model.p, model.m, model.m)?;
    let rhs = CoeffModule::am_mod_t(model, &ring)?.direct_sum(n);
    compare(model, &CoeffModule::trivial(model, n), &rhs, n)
}

fn compare(
    model: &FiniteModel,
    lhs: &CoeffModule,
    rhs: &CoeffModule,
    n: usize,
) -> Result<CongruenceReport, CongruenceError> {
    let quotient_action_trivial = rhs.rho.iter().all(linalg::is_identity);
    let (ls, rs) = (build_space(model, lhs), build_space(model, rhs));
    let operators = model
        .double_coset_reps()
        .par_iter()
        .map(|g| {
            let op = model.hecke_operator(g)?;
            let (a, b) = (op.matrix(model, lhs), op.matrix(model, rhs));
            Ok(OperatorCheck {
                gamma: g.clone(),
                coset_count: op.coset_count(),
                commutes: a == b,
                lhs: a,
                rhs: b,
            })
        })
        .collect::<Result<Vec<_>, CongruenceError>>()?;
    let pass = quotient_action_trivial
        && ls.fixed_lengths == rs.fixed_lengths
        && operators.iter().all(|o| o.commutes);
    Ok(CongruenceReport {
        p: model.p,
        m: model.m,
        n,
        orbit_count: ls.orbit_count,
        lhs_length: ls.length,
        rhs_length: rs.length,
        quotient_action_trivial,
        operators,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RationalComponent {
    pub j: u32,
    /// `phi(p^j)`
    pub degree: u64,
    /// Rank over `Q(zeta_{p^j})`.
    pub rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RationalDecomposition {
    pub components: Vec<RationalComponent>,
    /// `dim_Q M(U, A_m) (x) Q`, from fixed spaces of integer matrices.
    pub rational_dim: usize,
    /// The product of the `Phi_{p^j}` is the modulus polynomial.
    pub factorization_ok: bool,
    pub consistent: bool,
}

/// Splits `M(U, A_m)[1/p]` along `Q[T]/(modulus) = prod_j Q(zeta_{p^j})`.
/// An orbit contributes to the `j`-th factor exactly when every character of
/// order `p^j` kills `lambda` of its stabilizer.
pub fn decompose_rational(model: &FiniteModel) -> RationalDecomposition {
    let (p, m) = (model.p, model.m);
    let pm = p.pow(m);
    let mut prod = vec![1i128];
    for j in 1..=m {
        prod = arith::poly_mul(&prod, &arith::cyclotomic_poly(p.pow(j)));
    }
    let factorization_ok = prod == vec![1i128; pm as usize];
    let vals: Vec<u32> = (0..model.orbits().len())
        .map(|k| model.stabilizer_lambda_valuation(k))
        .collect();
    let components: Vec<RationalComponent> = (1..=m)
        .map(|j| RationalComponent {
            j,
            degree: arith::euler_phi(p.pow(j)),
            rank: vals.iter().filter(|&&v| v >= j).count(),
        })
        .collect();
    // independent count: dimension of the fixed space of T^{p^v} on Q^{p^m - 1}
    let d = pm as usize - 1;
    let rational_dim = vals
        .iter()
        .map(|&v| {
            let t = integer_t_power(p, m, p.pow(v) as i64);
            let diff: Vec<Vec<i128>> = (0..d)
                .map(|i| (0..d).map(|j| t[i][j] - i128::from(i == j)).collect())
                .collect();
            d - arith::rank_over_q(&diff)
        })
        .sum();
    let weighted: usize = components.iter().map(|c| c.rank * c.degree as usize).sum();
    RationalDecomposition {
        components,
        rational_dim,
        factorization_ok,
        consistent: factorization_ok && weighted == rational_dim,
    }
}

/// Multiplication by `T^a` on `Z[T]/(1 + ... + T^{p^m - 1})` in the basis `T^j`.
fn integer_t_power(p: u64, m: u32, a: i64) -> Vec<Vec<i128>> {
    let n = p.pow(m) as usize;
    let d = n - 1;
    let mut out = vec![vec![0i128; d]; d];
    for j in 0..d {
        let e = (j as i64 + a).rem_euclid(n as i64) as usize;
        if e < d {
            out[e][j] = 1;
        } else {
            for row in out.iter_mut() {
                row[j] = -1;
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct QuotientOrbit {
    /// Valuation of `lambda` on the stabilizer.
    pub v: u32,
    /// `Z_p`-rank of `A_m^{Stab}`, namely `p^v - 1`.
    pub fixed_rank: u64,
    /// `log_p` of the cokernel of `A_m^{Stab} -> Z/p^m`, `T -> 1`.
    pub cokernel_length: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuotientReport {
    pub orbits: Vec<QuotientOrbit>,
    /// The spanning vectors are fixed by every stabilizer element.
    pub basis_fixed: bool,
    pub isomorphism: bool,
}

/// Tests whether `M(U, A_m)/(T-1) -> M(U, A_m/(T-1))` is bijective. On an
/// orbit whose stabilizer has `lambda`-valuation `v`, the fixed vectors over
/// `Z_p` form the ideal generated by `Psi_m/Psi_v = sum_i T^{i p^v}`, which
/// evaluates to `p^{m-v}` at `T = 1`, and the quotient by `T - 1` has order
/// `p^v`. So the map is an isomorphism iff `v = m` on every orbit.
pub fn quotient_map_check(model: &FiniteModel) -> Result<QuotientReport, CongruenceError> {
    let (p, m) = (model.p, model.m);
    let ring = am_ring(p, m, m + 1)?;
    let mut orbits = Vec::new();
    let mut basis_fixed = true;
    for (k, o) in model.orbits().iter().enumerate() {
        let v = model.stabilizer_lambda_valuation(k);
        let step = p.pow(v) as usize;
        let mut coeffs = vec![0i64; p.pow(m) as usize];
        for i in (0..coeffs.len()).step_by(step) {
            coeffs[i] = 1;
        }
        let b = ring.from_poly(&coeffs);
        basis_fixed &= o
            .stab_p
            .iter()
            .all(|&s| ring.mul(&b, &psi_character(&ring, model.lambda(s))) == b);
        let image = (coeffs.iter().sum::<i64>() as u64) % p.pow(m);
        orbits.push(QuotientOrbit {
            v,
            fixed_rank: step as u64 - 1,
            cokernel_length: linalg::val(image, p, m),
        });
    }
    let isomorphism = basis_fixed && orbits.iter().all(|o| o.cokernel_length == 0 && o.v == m);
    Ok(QuotientReport {
        orbits,
        basis_fixed,
        isomorphism,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NonconstantOutcome {
    Pass,
    Fail,
    /// `U_p` must be shrunk before level `m` is reachable.
    ShrinkUp,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonconstantReport {
    /// Largest `m'` with `U_p` trivial on `V/p^{m'}`.
    pub m_prime: u32,
    pub m: u32,
    pub dim: usize,
    pub outcome: NonconstantOutcome,
    pub congruence: Option<CongruenceReport>,
}

/// For `V` given by generator matrices over `Z/p^k`: if `U_p` acts trivially
/// on `V/p^m`, compares `M(U, V/p^m)` with `M(U, A_m/(T-1))^{dim V}`.
pub fn nonconstant_check(
    model: &FiniteModel,
    gens: &[Mat],
    k: u32,
) -> Result<NonconstantReport, CongruenceError> {
    let v = CoeffModule::representation(model, gens, k)?;
    let pk = v.modulus;
    let m_prime = gens
        .iter()
        .flat_map(|g| {
            g.iter().enumerate().flat_map(move |(i, row)| {
                row.iter()
                    .enumerate()
                    .map(move |(j, &x)| (x % pk + pk - u64::from(i == j)) % pk)
            })
        })
        .map(|x| linalg::val(x, model.p, k))
        .min()
        .unwrap_or(k);
    let m = model.m;
    let dim = v.dim;
    if m > m_prime {
        return Ok(NonconstantReport {
            m_prime,
            m,
            dim,
            outcome: NonconstantOutcome::ShrinkUp,
            congruence: None,
        });
    }
    let lhs = CoeffModule::representation(model, gens, m)?;
    let ring = am_ring(model.p, m, m)?;
    let rhs = CoeffModule::am_mod_t(model, &ring)?.direct_sum(dim);
    let report = compare(model, &lhs, &rhs, dim)?;
    let pass = report.pass;
    Ok(NonconstantReport {
        m_prime,
        m,
        dim,
        outcome: if pass {
            NonconstantOutcome::Pass
        } else {
            NonconstantOutcome::Fail
        },
        congruence: Some(report),
    })
}

#[cfg(test)]
mod tests {
    use super::super::group::GroupSpec;
    use super::super::model::{LambdaConfig, ModelConfig};
    use super::*;

    #[test]
    fn congruence_holds_on_builtin_models() {
        for m in [1, 2] {
            for n in [1, 2] {
                for model in [
                    FiniteModel::heisenberg_s3(3, m).unwrap(),
                    FiniteModel::heisenberg_s3_trivial(3, m).unwrap(),
                ] {
                    let r = verify_congruence_theorem(&model, n).unwrap();
                    assert!(r.pass);
                    assert_eq!(r.lhs_length, 9 * n as u32 * m);
                    assert_eq!(r.operators.len(), 2);
                }
            }
        }
    }

    #[test]
    fn hecke_functorial_in_direct_sums() {
        let model = FiniteModel::heisenberg_s3(3, 1).unwrap();
        let ring = am_ring(3, 1, 2).unwrap();
        let a = CoeffModule::am(&model, &ring).unwrap();
        let a2 = a.direct_sum(2);
        let d = a.dim;
        for g in model.double_coset_reps() {
            let op = model.hecke_operator(&g).unwrap();
            let (x, y) = (op.matrix(&model, &a), op.matrix(&model, &a2));
            let n = model.orbits().len();
            for k in 0..n {
                for k2 in 0..n {
                    for c in 0..2 {
                        for i in 0..d {
                            for j in 0..d {
                                assert_eq!(
                                    y[k * 2 * d + c * d + i][k2 * 2 * d + c * d + j],
                                    x[k * d + i][k2 * d + j]
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn free_action_dimension_bookkeeping() {
        for m in [1, 2] {
            let model = FiniteModel::heisenberg_s3(3, m).unwrap();
            let ring = am_ring(3, m, m).unwrap();
            let space = build_space(&model, &CoeffModule::am(&model, &ring).unwrap());
            assert_eq!(space.rank, Some((3usize.pow(m) - 1) * 9));
        }
    }

    #[test]
    fn rational_ranks() {
        for m in [1, 2] {
            let free = decompose_rational(&FiniteModel::heisenberg_s3(3, m).unwrap());
            assert!(free.consistent);
            assert!(free.components.iter().all(|c| c.rank == 9));
            assert_eq!(free.rational_dim, (3usize.pow(m) - 1) * 9);
            let nf = decompose_rational(&FiniteModel::non_free(3, m).unwrap());
            assert!(nf.consistent);
            assert_eq!(nf.rational_dim, 0);
        }
        let deg: Vec<u64> = decompose_rational(&FiniteModel::heisenberg_s3(3, 2).unwrap())
            .components
            .iter()
            .map(|c| c.degree)
            .collect();
        assert_eq!(deg, vec![2, 6]);
    }

    #[test]
    fn quotient_map() {
        for m in [1, 2] {
            assert!(
                quotient_map_check(&FiniteModel::heisenberg_s3(3, m).unwrap())
                    .unwrap()
                    .isomorphism
            );
            assert!(
                quotient_map_check(&FiniteModel::heisenberg_s3_trivial(3, m).unwrap())
                    .unwrap()
                    .isomorphism
            );
            let nf = quotient_map_check(&FiniteModel::non_free(3, m).unwrap()).unwrap();
            assert!(nf.basis_fixed);
            assert!(!nf.isomorphism);
            assert!(nf.orbits.iter().all(|o| o.cokernel_length == m));
        }
    }

    #[test]
    fn nonconstant_levels() {
        // x acts by [[1, 9a], [0, 1]] mod 27 (b = c = 0 on the other generators)
        let gens = vec![
            vec![vec![1, 9], vec![0, 1]],
            linalg::identity(2),
            linalg::identity(2),
        ];
        let m2 = nonconstant_check(&FiniteModel::heisenberg_s3(3, 2).unwrap(), &gens, 3).unwrap();
        assert_eq!(m2.m_prime, 2);
        assert_eq!(m2.outcome, NonconstantOutcome::Pass);
        let m3 = nonconstant_check(&FiniteModel::heisenberg_s3(3, 3).unwrap(), &gens, 3).unwrap();
        assert_eq!(m3.outcome, NonconstantOutcome::ShrinkUp);
        // the trivial representation agrees with the theorem
        let triv = vec![linalg::identity(2); 3];
        let r = nonconstant_check(&FiniteModel::heisenberg_s3(3, 1).unwrap(), &triv, 1).unwrap();
        assert_eq!(r.outcome, NonconstantOutcome::Pass);
        assert_eq!(
            r.congruence.unwrap().lhs_length,
            verify_congruence_theorem(&FiniteModel::heisenberg_s3(3, 1).unwrap(), 2)
                .unwrap()
                .lhs_length
        );
        // -1 on a group of order 2 is already nontrivial mod p
        let c2 = FiniteModel::new(ModelConfig {
            p: 3,
            m: 1,
            gamma_s: GroupSpec::Symmetric { n: 3 },
            gamma_p: GroupSpec::Cyclic { n: 2 },
            delta: vec![],
            u_s: vec![vec![1, 0, 2]],
            u_p: vec![vec![1]],
            lambda: LambdaConfig { images: vec![0] },
        })
        .unwrap();
        let r = nonconstant_check(&c2, &[vec![vec![2]]], 1).unwrap();
        assert_eq!((r.m_prime, r.outcome), (0, NonconstantOutcome::ShrinkUp));
    }

    #[test]
    fn quotient_collapses_distinct_operators() {
        // abstract shadow: T is a nontrivial operator on A_1 whose image
        // mod (T - 1) is the identity, so T/(p^m) -> its quotient can collapse
        let ring = am_ring(3, 1, 2).unwrap();
        let t = ring.mul_matrix(&psi_character(&ring, 1));
        assert!(!linalg::is_identity(&t));
        assert_eq!(ring.mod_t_minus_1(&psi_character(&ring, 1)), 1);
    }
}
