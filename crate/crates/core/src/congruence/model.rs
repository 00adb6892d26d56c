use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::am::{psi_character, AmRing};
use super::group::{extend_hom, Elem, GroupSpec, Subgroup};
use super::linalg::{self, Mat};
use super::CongruenceError;

/// JSON form of a [`FiniteModel`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub p: u64,
    pub m: u32,
    pub gamma_s: GroupSpec,
    pub gamma_p: GroupSpec,
    /// Generators of the subgroup of `Gamma_S x Gamma_p`, as `[s, g]` pairs.
    #[serde(default)]
    pub delta: Vec<(Elem, Elem)>,
    pub u_s: Vec<Elem>,
    pub u_p: Vec<Elem>,
    pub lambda: LambdaConfig,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaConfig {
    /// `lambda` on the generators of `U_p`.
    pub images: Vec<i64>,
}

/// A point of `Delta \ (Gamma_S x Gamma_p)`, as indices into the two
/// element lists (canonical representative of the coset).
type Point = (usize, usize);

/// Orbit of `U` on the coset space with a Schreier transversal.
#[derive(Clone, Debug)]
pub struct Orbit {
    pub rep: Point,
    pub size: usize,
    /// `U_p` components (indices into `U_p`) of stabilizer generators.
    pub stab_p: Vec<usize>,
}

#[derive(Debug)]
pub struct FiniteModel {
    pub p: u64,
    pub m: u32,
    pub config: ModelConfig,
    pub gamma_s: Subgroup,
    pub gamma_p: Subgroup,
    pub u_s: Subgroup,
    pub u_p: Subgroup,
    delta: Vec<(usize, usize)>,
    /// `lambda` on `U_p`, indexed like `u_p`.
    lambda: Vec<i64>,
    orbits: Vec<Orbit>,
    /// point -> (orbit, U_S element u_s, U_p element u_p) with `rep * (u_s, u_p) = point`
    locate: HashMap<Point, (usize, usize, usize)>,
}

impl FiniteModel {
    pub fn new(config: ModelConfig) -> Result<Self, CongruenceError> {
        let p = config.p;
        if !crate::arith::is_prime_small(p) || config.m == 0 || config.m > 6 {
            return Err(CongruenceError::InvalidModel(format!(
                "p = {p}, m = {}",
                config.m
            )));
        }
        let pm = p.pow(config.m) as i64;
        let gamma_s = Subgroup::whole(&config.gamma_s)?;
        let gamma_p = Subgroup::whole(&config.gamma_p)?;
        if gamma_s.len() * gamma_p.len() > 1 << 18 {
            return Err(CongruenceError::TooLarge);
        }
        let u_s = Subgroup::generate(&config.gamma_s, config.u_s.clone())?;
        let u_p = Subgroup::generate(&config.gamma_p, config.u_p.clone())?;
        let lambda = extend_hom(
            &u_p,
            &config
                .lambda
                .images
                .iter()
                .map(|x| x.rem_euclid(pm))
                .collect::<Vec<_>>(),
            0,
            |a, b| (a + b).rem_euclid(pm),
        )?;
        let delta = generate_delta(&config, &gamma_s, &gamma_p)?;
        let mut model = Self {
            p,
            m: config.m,
            config,
            gamma_s,
            gamma_p,
            u_s,
            u_p,
            delta,
            lambda,
            orbits: Vec::new(),
            locate: HashMap::new(),
        };
        model.compute_orbits();
        Ok(model)
    }

    /// `Gamma_S = S_3`, `U_S = <(12)>`, `Gamma_p` the Heisenberg group over
    /// `Z/p^m`, `U_p = <x, y^p, z>` and `lambda(a, b, c) = a`; `Delta` trivial.
    pub fn heisenberg_s3(p: u64, m: u32) -> Result<Self, CongruenceError> {
        let pp = p as i64;
        Self::new(ModelConfig {
            p,
            m,
            gamma_s: GroupSpec::Symmetric { n: 3 },
            gamma_p: GroupSpec::Heisenberg { modulus: pp.pow(m) },
            delta: vec![],
            u_s: vec![vec![1, 0, 2]],
            u_p: vec![vec![1, 0, 0], vec![0, pp % pp.pow(m), 0], vec![0, 0, 1]],
            lambda: LambdaConfig {
                images: vec![1, 0, 0],
            },
        })
    }

    /// The same model with `lambda = 0`.
    pub fn heisenberg_s3_trivial(p: u64, m: u32) -> Result<Self, CongruenceError> {
        let mut config = Self::heisenberg_s3(p, m)?.config;
        config.lambda.images = vec![0, 0, 0];
        Self::new(config)
    }

    /// `Gamma_p = Z/p^m = U_p` with `lambda` the identity and
    /// `Delta = 1 x Gamma_p`, so every stabilizer is all of `U_p`.
    pub fn non_free(p: u64, m: u32) -> Result<Self, CongruenceError> {
        Self::new(ModelConfig {
            p,
            m,
            gamma_s: GroupSpec::Symmetric { n: 3 },
            gamma_p: GroupSpec::Cyclic { n: p.pow(m) as i64 },
            delta: vec![(vec![0, 1, 2], vec![1])],
            u_s: vec![vec![1, 0, 2]],
            u_p: vec![vec![1]],
            lambda: LambdaConfig { images: vec![1] },
        })
    }

    pub fn by_name(name: &str, p: u64, m: u32) -> Result<Self, CongruenceError> {
        match name {
            "heisenberg" => Self::heisenberg_s3(p, m),
            "trivial-lambda" => Self::heisenberg_s3_trivial(p, m),
            "non-free" => Self::non_free(p, m),
            other => Err(CongruenceError::InvalidModel(format!(
                "unknown built-in model {other}"
            ))),
        }
    }

    pub fn orbits(&self) -> &[Orbit] {
        &self.orbits
    }

    /// `lambda` on the `i`-th element of `U_p`.
    pub fn lambda(&self, i: usize) -> i64 {
        self.lambda[i]
    }

    pub fn lambda_is_zero(&self) -> bool {
        self.lambda.iter().all(|&x| x == 0)
    }

    /// Whether `U` acts freely on the coset space.
    pub fn acts_freely(&self) -> bool {
        let u = self.u_s.len() * self.u_p.len();
        self.orbits.iter().all(|o| o.size == u)
    }

    /// Smallest `p`-adic valuation of `lambda` on the stabilizer of an orbit
    /// (`m` when it vanishes there).
    pub fn stabilizer_lambda_valuation(&self, orbit: usize) -> u32 {
        let vals = self.orbits[orbit]
            .stab_p
            .iter()
            .map(|&u| linalg::val(self.lambda[u] as u64, self.p, self.m));
        vals.min().unwrap_or(self.m)
    }

    fn canonical(&self, pt: Point) -> Point {
        if self.delta.len() <= 1 {
            return pt;
        }
        self.delta
            .iter()
            .map(|&(ds, dp)| {
                (
                    self.gamma_s.mul_idx(ds, pt.0),
                    self.gamma_p.mul_idx(dp, pt.1),
                )
            })
            .min()
            .expect("Delta contains the identity")
    }

    /// Right action of `(u_s, u_p)`, given as indices into `Gamma_S`, `Gamma_p`.
    fn act(&self, pt: Point, s: usize, g: usize) -> Point {
        self.canonical((self.gamma_s.mul_idx(pt.0, s), self.gamma_p.mul_idx(pt.1, g)))
    }

    fn compute_orbits(&mut self) {
        let to_s = |u: usize, sel: &Self| {
            sel.gamma_s
                .index_of(sel.u_s.element(u))
                .expect("U_S in Gamma_S")
        };
        let to_p = |u: usize, sel: &Self| {
            sel.gamma_p
                .index_of(sel.u_p.element(u))
                .expect("U_p in Gamma_p")
        };
        // generators of U as (U_S index, U_p index)
        let mut gens: Vec<(usize, usize)> = Vec::new();
        let us_id = self.u_s.identity_index();
        let up_id = self.u_p.identity_index();
        for g in &self.u_s.generators {
            gens.push((self.u_s.index_of(g).expect("gen"), up_id));
        }
        for g in &self.u_p.generators {
            gens.push((us_id, self.u_p.index_of(g).expect("gen")));
        }
        let mut orbits = Vec::new();
        let mut locate = HashMap::new();
        for s in 0..self.gamma_s.len() {
            for g in 0..self.gamma_p.len() {
                let start = self.canonical((s, g));
                if locate.contains_key(&start) {
                    continue;
                }
                let oid = orbits.len();
                locate.insert(start, (oid, us_id, up_id));
                let mut queue = VecDeque::from([start]);
                let mut members = vec![start];
                let mut stab: BTreeSet<usize> = BTreeSet::new();
                while let Some(y) = queue.pop_front() {
                    let (_, ty_s, ty_p) = locate[&y];
                    for &(xs, xp) in &gens {
                        let y2 = self.act(y, to_s(xs, self), to_p(xp, self));
                        let (ns, np) = (self.u_s.mul_idx(ty_s, xs), self.u_p.mul_idx(ty_p, xp));
                        match locate.get(&y2) {
                            Some(&(_, t2s, t2p)) => {
                                // Schreier generator t_y x t_{y2}^{-1}
                                let sp = self.u_p.mul_idx(np, self.u_p.inv_idx(t2p));
                                let ss = self.u_s.mul_idx(ns, self.u_s.inv_idx(t2s));
                                if sp != up_id || ss != us_id {
                                    stab.insert(sp);
                                }
                            }
                            None => {
                                locate.insert(y2, (oid, ns, np));
                                members.push(y2);
                                queue.push_back(y2);
                            }
                        }
                    }
                }
                orbits.push(Orbit {
                    rep: start,
                    size: members.len(),
                    stab_p: stab.into_iter().collect(),
                });
            }
        }
        self.orbits = orbits;
        self.locate = locate;
    }

    /// Double coset representatives of `U_S \ Gamma_S / U_S`, smallest first;
    /// their operators generate the Hecke algebra.
    pub fn double_coset_reps(&self) -> Vec<Elem> {
        let mut seen = vec![false; self.gamma_s.len()];
        let mut reps = Vec::new();
        for g in 0..self.gamma_s.len() {
            if seen[g] {
                continue;
            }
            reps.push(self.gamma_s.element(g).clone());
            for a in self.u_s.elements() {
                for b in self.u_s.elements() {
                    let x = self
                        .gamma_s
                        .spec
                        .mul(&self.gamma_s.spec.mul(a, self.gamma_s.element(g)), b);
                    seen[self.gamma_s.index_of(&x).expect("closed")] = true;
                }
            }
        }
        reps
    }

    pub fn hecke_operator(&self, gamma: &[i64]) -> Result<HeckeOperator, CongruenceError> {
        let gi = self
            .gamma_s
            .index_of(gamma)
            .ok_or_else(|| CongruenceError::InvalidModel(format!("{gamma:?} is not in Gamma_S")))?;
        // left cosets x U_S inside U_S gamma U_S, keyed by their smallest element
        let mut cosets: BTreeSet<usize> = BTreeSet::new();
        for a in self.u_s.elements() {
            let ag = self
                .gamma_s
                .mul_idx(self.gamma_s.index_of(a).expect("U_S"), gi);
            let key = self
                .u_s
                .elements()
                .iter()
                .map(|b| {
                    self.gamma_s
                        .mul_idx(ag, self.gamma_s.index_of(b).expect("U_S"))
                })
                .min()
                .expect("nonempty");
            cosets.insert(key);
        }
        let cosets: Vec<usize> = cosets.into_iter().collect();
        let p_id = self.gamma_p.identity_index();
        let terms = self
            .orbits
            .iter()
            .map(|o| {
                cosets
                    .iter()
                    .map(|&c| {
                        let y = self.act(o.rep, c, p_id);
                        let (k, _, up) = self.locate[&y];
                        (k, up)
                    })
                    .collect()
            })
            .collect();
        Ok(HeckeOperator {
            gamma: gamma.to_vec(),
            cosets: cosets
                .iter()
                .map(|&c| self.gamma_s.element(c).clone())
                .collect(),
            terms,
        })
    }
}

fn generate_delta(
    config: &ModelConfig,
    gs: &Subgroup,
    gp: &Subgroup,
) -> Result<Vec<(usize, usize)>, CongruenceError> {
    let gens: Vec<(usize, usize)> = config
        .delta
        .iter()
        .map(|(s, g)| match (gs.index_of(s), gp.index_of(g)) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(CongruenceError::InvalidModel(format!(
                "Delta generator {s:?},{g:?} not in Gamma"
            ))),
        })
        .collect::<Result<_, _>>()?;
    let id = (gs.identity_index(), gp.identity_index());
    let mut seen = BTreeSet::from([id]);
    let mut queue = VecDeque::from([id]);
    while let Some((a, b)) = queue.pop_front() {
        for &(x, y) in &gens {
            let z = (gs.mul_idx(a, x), gp.mul_idx(b, y));
            if seen.insert(z) {
                queue.push_back(z);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// `[U_S gamma U_S] f (z) = sum_i f(z gamma_i)`, stored per orbit as the
/// list of `(target orbit, U_p part of the transporting element)`.
#[derive(Clone, Debug)]
pub struct HeckeOperator {
    pub gamma: Elem,
    pub cosets: Vec<Elem>,
    terms: Vec<Vec<(usize, usize)>>,
}

impl HeckeOperator {
    pub fn coset_count(&self) -> usize {
        self.cosets.len()
    }

    /// Matrix on `(+)_orbits Lambda`, orbit-major. Block `(k, k')` is the sum
    /// of `rho(u)^{-1}` over the cosets sending orbit `k` into orbit `k'`.
    pub fn matrix(&self, model: &FiniteModel, coeff: &CoeffModule) -> Mat {
        let d = coeff.dim;
        let n = self.terms.len();
        let mut out = vec![vec![0u64; n * d]; n * d];
        for (k, row) in self.terms.iter().enumerate() {
            for &(k2, up) in row {
                let inv = &coeff.rho[model.u_p.inv_idx(up)];
                for i in 0..d {
                    for j in 0..d {
                        let cell = &mut out[k * d + i][k2 * d + j];
                        *cell = (*cell + inv[i][j]) % coeff.modulus;
                    }
                }
            }
        }
        out
    }
}

/// A coefficient module: `(Z/p^K)^dim` with `U_p` acting through `rho`.
#[derive(Clone, Debug)]
pub struct CoeffModule {
    pub name: String,
    pub p: u64,
    pub k: u32,
    pub modulus: u64,
    pub dim: usize,
    /// indexed like `U_p`
    pub rho: Vec<Mat>,
}

impl CoeffModule {
    /// `(Z/p^m)^n` with trivial action.
    pub fn trivial(model: &FiniteModel, n: usize) -> Self {
        let modulus = model.p.pow(model.m);
        Self {
            name: format!("(Z/{}^{})^{n}", model.p, model.m),
            p: model.p,
            k: model.m,
            modulus,
            dim: n,
            rho: vec![linalg::identity(n); model.u_p.len()],
        }
    }

    /// `A_m` with `u` acting as multiplication by `psi(lambda(u)) = T^{lambda(u)}`.
    pub fn am(model: &FiniteModel, ring: &AmRing) -> Result<Self, CongruenceError> {
        check_ring(model, ring)?;
        let rho = (0..model.u_p.len())
            .map(|u| ring.mul_matrix(&psi_character(ring, model.lambda(u))))
            .collect();
        Ok(Self {
            name: "A_m".into(),
            p: model.p,
            k: ring.k(),
            modulus: ring.coefficient_modulus(),
            dim: ring.rank(),
            rho,
        })
    }

    /// `A_m / (T - 1) = Z/p^m` with the induced action, computed by sending
    /// `T^{lambda(u)}` through `T -> 1`.
    pub fn am_mod_t(model: &FiniteModel, ring: &AmRing) -> Result<Self, CongruenceError> {
        check_ring(model, ring)?;
        let rho = (0..model.u_p.len())
            .map(|u| {
                vec![vec![
                    ring.mod_t_minus_1(&psi_character(ring, model.lambda(u)))
                ]]
            })
            .collect();
        Ok(Self {
            name: "A_m/(T-1)".into(),
            p: model.p,
            k: model.m,
            modulus: model.p.pow(model.m),
            dim: 1,
            rho,
        })
    }

    /// A matrix representation given on the generators of `U_p`, reduced
    /// mod `p^k`.
    pub fn representation(
        model: &FiniteModel,
        gens: &[Mat],
        k: u32,
    ) -> Result<Self, CongruenceError> {
        let dim = gens.first().map_or(0, Vec::len);
        if dim == 0
            || gens
                .iter()
                .any(|g| g.len() != dim || g.iter().any(|r| r.len() != dim))
        {
            return Err(CongruenceError::InvalidModel(
                "representation matrices must be square and equal-sized".into(),
            ));
        }
        let modulus = model.p.pow(k);
        let gens: Vec<Mat> = gens.iter().map(|g| linalg::reduce(g, modulus)).collect();
        let rho = extend_hom(&model.u_p, &gens, linalg::identity(dim), |a, b| {
            linalg::mat_mul(a, b, modulus)
        })?;
        Ok(Self {
            name: format!("V mod {}^{k}", model.p),
            p: model.p,
            k,
            modulus,
            dim,
            rho,
        })
    }

    /// `Lambda^{(+) n}` with the diagonal action.
    pub fn direct_sum(&self, n: usize) -> Self {
        Self {
            name: format!("({})^{n}", self.name),
            dim: self.dim * n,
            rho: self
                .rho
                .iter()
                .map(|r| linalg::kron_identity(r, n))
                .collect(),
            ..self.clone()
        }
    }
}

fn check_ring(model: &FiniteModel, ring: &AmRing) -> Result<(), CongruenceError> {
    if ring.p() != model.p || ring.m() != model.m {
        return Err(CongruenceError::CoefficientMismatch);
    }
    Ok(())
}

/// `M(U, Lambda)`: one summand `Lambda^{Stab}` per orbit.
#[derive(Clone, Debug, Serialize)]
pub struct EquivariantSpace {
    pub coefficients: String,
    pub orbit_count: usize,
    /// `log_p |Lambda^{Stab_k}|` per orbit.
    pub fixed_lengths: Vec<u32>,
    /// Whether the stabilizer acts trivially on `Lambda`.
    pub full: Vec<bool>,
    pub length: u32,
    /// Rank when every summand is free.
    pub rank: Option<usize>,
}

pub fn build_space(model: &FiniteModel, coeff: &CoeffModule) -> EquivariantSpace {
    let d = coeff.dim;
    let mut fixed_lengths = Vec::new();
    let mut full = Vec::new();
    for o in model.orbits() {
        let mut rows = Vec::new();
        for &s in &o.stab_p {
            let r = &coeff.rho[s];
            for i in 0..d {
                rows.push(
                    (0..d)
                        .map(|j| (r[i][j] + coeff.modulus - u64::from(i == j)) % coeff.modulus)
                        .collect(),
                );
            }
        }
        full.push(rows.iter().all(|r: &Vec<u64>| r.iter().all(|&x| x == 0)));
        fixed_lengths.push(linalg::kernel_length(&rows, d, coeff.p, coeff.k));
    }
    let length = fixed_lengths.iter().sum();
    let free_len = d as u32 * coeff.k;
    let rank = fixed_lengths
        .iter()
        .all(|&l| l % coeff.k == 0 && (l == free_len || l == 0 || coeff.k == 1))
        .then(|| fixed_lengths.iter().map(|&l| (l / coeff.k) as usize).sum());
    EquivariantSpace {
        coefficients: coeff.name.clone(),
        orbit_count: model.orbits().len(),
        fixed_lengths,
        full,
        length,
        rank,
    }
}

#[cfg(test)]
mod tests {
    use super::super::am::am_ring;
    use super::*;

    #[test]
    fn heisenberg_model_is_free() {
        for m in [1, 2] {
            let model = FiniteModel::heisenberg_s3(3, m).unwrap();
            assert!(model.acts_freely());
            // |Z| / |U| = (6 * 3^{3m}) / (2 * 3^{3m-1})
            assert_eq!(model.orbits().len(), 9);
            let triv = build_space(&model, &CoeffModule::trivial(&model, 1));
            assert_eq!(triv.rank, Some(9));
        }
    }

    #[test]
    fn coset_counts_match_index_formula() {
        let model = FiniteModel::heisenberg_s3(3, 1).unwrap();
        let spec = &model.gamma_s.spec;
        for g in model.gamma_s.elements() {
            let op = model.hecke_operator(g).unwrap();
            // |U_S| / |U_S cap g U_S g^-1|
            let conj: Vec<Elem> = model
                .u_s
                .elements()
                .iter()
                .map(|u| spec.mul(&spec.mul(g, u), &spec.inv(g)))
                .collect();
            let inter = conj.iter().filter(|x| model.u_s.contains(x)).count();
            assert_eq!(op.coset_count(), model.u_s.len() / inter, "{g:?}");
        }
        let id = model.hecke_operator(&[0, 1, 2]).unwrap();
        let coeff = CoeffModule::trivial(&model, 2);
        assert!(linalg::is_identity(&id.matrix(&model, &coeff)));
        assert_eq!(model.double_coset_reps().len(), 2);
    }

    #[test]
    fn non_free_model_stabilizers() {
        let model = FiniteModel::non_free(3, 1).unwrap();
        assert!(!model.acts_freely());
        assert!((0..model.orbits().len()).all(|k| model.stabilizer_lambda_valuation(k) == 0));
        let ring = am_ring(3, 1, 1).unwrap();
        let space = build_space(&model, &CoeffModule::am(&model, &ring).unwrap());
        // T acts on A_1 = F_3[T]/(1+T+T^2) = F_3[T]/(T-1)^2 with a line of fixed vectors
        assert!(space.fixed_lengths.iter().all(|&l| l == 1));
    }

    #[test]
    fn config_round_trip() {
        let model = FiniteModel::heisenberg_s3(3, 2).unwrap();
        let text = serde_json::to_string(&model.config).unwrap();
        let back: ModelConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, model.config);
        let bad = ModelConfig {
            lambda: LambdaConfig { images: vec![1, 0] },
            ..back.clone()
        };
        assert!(FiniteModel::new(bad).is_err());
        // z^p = [x, y^p] is a commutator, so lambda(z) = 1 is not a homomorphism
        let weird = ModelConfig {
            lambda: LambdaConfig {
                images: vec![1, 0, 1],
            },
            ..back
        };
        assert_eq!(
            FiniteModel::new(weird).unwrap_err(),
            CongruenceError::NotAHomomorphism
        );
    }
}
