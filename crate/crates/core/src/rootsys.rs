//! Irreducible reduced root systems, seen through their coroots.
//!
//! Coroots are integer vectors in the basis of simple coroots. Simple
//! indices follow Bourbaki numbering and are 1-based wherever a caller
//! supplies them (reduced words, automorphism permutations in JSON).

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::arith::{self, IntMatrix};

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum RootSystemError {
    #[error("type {family}{rank} is not admissible")]
    InvalidRank { family: Family, rank: usize },
    #[error("cannot parse root system type {0:?}")]
    Unparseable(String),
    #[error("simple reflection index {index} outside 1..={rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("no power up to {bound} is the identity")]
    OrderBoundExceeded { bound: u64 },
    #[error("element does not have order dividing {0}")]
    WrongOrder(u64),
    #[error("permutation does not preserve the Cartan matrix")]
    NotAnAutomorphism,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// An irreducible Cartan type such as `E6`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootSystemType {
    family: Family,
    rank: usize,
}

impl RootSystemType {
    pub fn new(family: Family, rank: usize) -> Result<Self, RootSystemError> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B => rank >= 2,
            Family::C => rank >= 3,
            Family::D => rank >= 4,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if ok {
            Ok(Self { family, rank })
        } else {
            Err(RootSystemError::InvalidRank { family, rank })
        }
    }

    pub fn family(self) -> Family {
        self.family
    }

    pub fn rank(self) -> usize {
        self.rank
    }

    /// Order of a Coxeter element.
    pub fn coxeter_number(self) -> u64 {
        let s = self.rank as u64;
        match self.family {
            Family::A => s + 1,
            Family::B | Family::C => 2 * s,
            Family::D => 2 * s - 2,
            Family::E => [12, 18, 30][self.rank - 6],
            Family::F => 12,
            Family::G => 6,
        }
    }

    /// Number of roots, from the classical formulas.
    pub fn root_count(self) -> usize {
        let s = self.rank;
        match self.family {
            Family::A => s * (s + 1),
            Family::B | Family::C => 2 * s * s,
            Family::D => 2 * s * (s - 1),
            Family::E => [72, 126, 240][s - 6],
            Family::F => 48,
            Family::G => 12,
        }
    }

    /// Every admissible irreducible type of rank at most `max_rank`.
    pub fn all_up_to_rank(max_rank: usize) -> Vec<Self> {
        let families = [
            Family::A,
            Family::B,
            Family::C,
            Family::D,
            Family::E,
            Family::F,
            Family::G,
        ];
        families
            .iter()
            .flat_map(|&f| (1..=max_rank).filter_map(move |r| Self::new(f, r).ok()))
            .collect()
    }

    /// Symmetrized form: squared lengths and off-diagonal inner products.
    fn gram(self) -> (Vec<i64>, Vec<(usize, usize, i64)>) {
        let s = self.rank;
        let chain = |len: usize| {
            (0..len.saturating_sub(1))
                .map(|i| (i, i + 1, -1))
                .collect::<Vec<_>>()
        };
        match self.family {
            Family::A => (vec![2; s], chain(s)),
            Family::B => {
                let mut lens = vec![2; s];
                lens[s - 1] = 1;
                (lens, chain(s))
            }
            Family::C => {
                let mut lens = vec![2; s];
                lens[s - 1] = 4;
                let mut edges = chain(s);
                edges[s - 2].2 = -2;
                (lens, edges)
            }
            Family::D => {
                let mut edges = chain(s - 1);
                edges.push((s - 3, s - 1, -1));
                (vec![2; s], edges)
            }
            Family::E => {
                let mut edges = vec![(0, 2, -1), (1, 3, -1)];
                edges.extend((2..s - 1).map(|i| (i, i + 1, -1)));
                (vec![2; s], edges)
            }
            Family::F => (vec![4, 4, 2, 2], vec![(0, 1, -2), (1, 2, -2), (2, 3, -1)]),
            Family::G => (vec![2, 6], vec![(0, 1, -3)]),
        }
    }

    /// `cartan[i][j] = <alpha_i, coroot_j>`.
    pub fn cartan_matrix(self) -> IntMatrix {
        let (lens, edges) = self.gram();
        let s = self.rank;
        let mut ip = vec![vec![0i64; s]; s];
        for i in 0..s {
            ip[i][i] = lens[i];
        }
        for &(i, j, v) in &edges {
            ip[i][j] = v;
            ip[j][i] = v;
        }
        (0..s)
            .map(|i| (0..s).map(|j| 2 * ip[i][j] / lens[j]).collect())
            .collect()
    }
}

impl fmt::Display for RootSystemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family, self.rank)
    }
}

impl FromStr for RootSystemType {
    type Err = RootSystemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || RootSystemError::Unparseable(s.to_string());
        let mut chars = s.trim().chars();
        let family = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Family::A,
            Some('B') => Family::B,
            Some('C') => Family::C,
            Some('D') => Family::D,
            Some('E') => Family::E,
            Some('F') => Family::F,
            Some('G') => Family::G,
            _ => return Err(bad()),
        };
        let rest: String = chars.filter(|c| *c != '_').collect();
        let rank = rest.parse().map_err(|_| bad())?;
        Self::new(family, rank)
    }
}

impl Serialize for RootSystemType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RootSystemType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Coxeter number of a product of irreducible factors; 1 for a torus.
pub fn coxeter_number_of_product(factors: &[RootSystemType]) -> u64 {
    factors
        .iter()
        .map(|t| t.coxeter_number())
        .max()
        .unwrap_or(1)
}

/// A coroot written in the simple-coroot basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coroot {
    pub expansion: Vec<i64>,
}

impl Coroot {
    pub fn height(&self) -> i64 {
        self.expansion.iter().sum()
    }

    pub fn is_positive(&self) -> bool {
        self.expansion.iter().all(|&c| c >= 0)
    }
}

#[derive(Debug)]
pub struct RootSystem {
    ty: RootSystemType,
    cartan: IntMatrix,
    reflections: Vec<IntMatrix>,
    coroots: Vec<Coroot>,
}

impl RootSystem {
    /// Builds the coroot system by reflection closure from the simple coroots.
    pub fn new(ty: RootSystemType) -> Self {
        let cartan = ty.cartan_matrix();
        let s = ty.rank();
        let reflections: Vec<IntMatrix> = (0..s)
            .map(|i| {
                (0..s)
                    .map(|r| {
                        (0..s)
                            .map(|j| i64::from(r == j) - if r == i { cartan[i][j] } else { 0 })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let simple: Vec<Vec<i64>> = (0..s).map(|i| unit(s, i)).collect();
        let mut seen: BTreeSet<Vec<i64>> = simple.iter().cloned().collect();
        let mut queue: VecDeque<Vec<i64>> = simple.into_iter().collect();
        while let Some(v) = queue.pop_front() {
            for refl in &reflections {
                let w = arith::mat_vec(refl, &v);
                if seen.insert(w.clone()) {
                    queue.push_back(w);
                }
            }
        }
        let coroots = seen
            .into_iter()
            .map(|expansion| Coroot { expansion })
            .collect();
        Self {
            ty,
            cartan,
            reflections,
            coroots,
        }
    }

    /// Shared immutable instance per type.
    pub fn cached(ty: RootSystemType) -> Arc<RootSystem> {
        static CACHE: OnceLock<Mutex<HashMap<RootSystemType, Arc<RootSystem>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(rs) = cache.lock().expect("cache poisoned").get(&ty) {
            return Arc::clone(rs);
        }
        let rs = Arc::new(RootSystem::new(ty));
        Arc::clone(
            cache
                .lock()
                .expect("cache poisoned")
                .entry(ty)
                .or_insert(rs),
        )
    }

    pub fn root_type(&self) -> RootSystemType {
        self.ty
    }

    pub fn rank(&self) -> usize {
        self.ty.rank()
    }

    pub fn cartan(&self) -> &IntMatrix {
        &self.cartan
    }

    /// All coroots, sorted lexicographically by expansion.
    pub fn coroots(&self) -> &[Coroot] {
        &self.coroots
    }

    pub fn positive_coroots(&self) -> impl Iterator<Item = &Coroot> {
        self.coroots.iter().filter(|c| c.is_positive())
    }

    pub fn highest_coroot(&self) -> &Coroot {
        self.positive_coroots()
            .max_by_key(|c| c.height())
            .expect("nonempty root system")
    }

    pub fn coxeter_number(&self) -> u64 {
        self.ty.coxeter_number()
    }

    pub fn is_coroot(&self, v: &[i64]) -> bool {
        self.coroots
            .binary_search_by(|c| c.expansion.as_slice().cmp(v))
            .is_ok()
    }

    /// Matrix of the simple reflection `s_index` (1-based).
    pub fn simple_reflection(&self, index: usize) -> Result<WeylElement, RootSystemError> {
        if index == 0 || index > self.rank() {
            return Err(RootSystemError::IndexOutOfRange {
                index,
                rank: self.rank(),
            });
        }
        Ok(WeylElement {
            matrix: self.reflections[index - 1].clone(),
        })
    }

    /// `s_{word[0]} s_{word[1]} ...`, so the last letter acts first.
    pub fn weyl_from_word(&self, word: &[usize]) -> Result<WeylElement, RootSystemError> {
        word.iter()
            .try_fold(WeylElement::identity(self.rank()), |acc, &i| {
                Ok(acc.compose(&self.simple_reflection(i)?))
            })
    }

    /// The Coxeter element `s_1 s_2 ... s_rank`.
    pub fn standard_coxeter_element(&self) -> WeylElement {
        let word: Vec<usize> = (1..=self.rank()).collect();
        self.weyl_from_word(&word).expect("indices in range")
    }

    /// Longest element by greedy extension: append `s_i` while some
    /// simple coroot is still sent to a positive coroot.
    pub fn longest_element(&self) -> (WeylElement, Vec<usize>) {
        let mut w = WeylElement::identity(self.rank());
        let mut word = Vec::new();
        while let Some(i) = (0..self.rank()).find(|&i| w.column(i).iter().all(|&c| c >= 0)) {
            w = w.compose(&WeylElement {
                matrix: self.reflections[i].clone(),
            });
            word.push(i + 1);
        }
        (w, word)
    }

    /// Whether `-1` lies in the coset `W delta`.
    ///
    /// `-1 = w delta` forces `-delta` into `W`; `-delta` sends the positive
    /// system to the negative one, so it must be the longest element. The
    /// test is therefore `-w_0 == delta`, uniformly in the order of `delta`.
    pub fn minus_one_in_w_delta(&self, delta: &DiagramAutomorphism) -> bool {
        let (w0, _) = self.longest_element();
        arith::mat_neg(&w0.matrix) == delta.matrix()
    }

    /// Whether an integer matrix lies in the Weyl group: it must permute the
    /// coroots, and undoing it by simple reflections must reach the identity
    /// rather than a diagram symmetry.
    pub fn is_weyl_element(&self, w: &WeylElement) -> bool {
        if w.rank() != self.rank() || w.matrix.iter().any(|r| r.len() != self.rank()) {
            return false;
        }
        if !self
            .coroots
            .iter()
            .all(|c| self.is_coroot(&w.apply(&c.expansion)))
        {
            return false;
        }
        let mut u = w.clone();
        for _ in 0..=self.coroots.len() {
            match (0..self.rank()).find(|&i| u.column(i).iter().any(|&c| c < 0)) {
                Some(i) => {
                    u = u.compose(&WeylElement {
                        matrix: self.reflections[i].clone(),
                    })
                }
                None => return u.is_identity(),
            }
        }
        false
    }

    pub fn to_json(&self) -> RootSystemJson {
        RootSystemJson {
            ty: self.ty,
            simple_coroots: (0..self.rank()).map(|i| unit(self.rank(), i)).collect(),
            coroots: self.coroots.clone(),
        }
    }
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    (0..n).map(|j| i64::from(i == j)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSystemJson {
    #[serde(rename = "type")]
    pub ty: RootSystemType,
    pub simple_coroots: Vec<Vec<i64>>,
    pub coroots: Vec<Coroot>,
}

/// A Weyl group element as its matrix on simple-coroot coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeylElement {
    matrix: IntMatrix,
}

impl WeylElement {
    pub fn identity(rank: usize) -> Self {
        Self {
            matrix: arith::identity(rank),
        }
    }

    /// `-1` on the coroot lattice; lies in `W` only for some types.
    pub fn minus_identity(rank: usize) -> Self {
        Self {
            matrix: arith::mat_neg(&arith::identity(rank)),
        }
    }

    pub fn from_matrix(matrix: IntMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.len()
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        WeylElement {
            matrix: arith::mat_mul(&self.matrix, &other.matrix),
        }
    }

    pub fn pow(&self, k: u64) -> WeylElement {
        (0..k).fold(WeylElement::identity(self.rank()), |acc, _| {
            acc.compose(self)
        })
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        arith::mat_vec(&self.matrix, v)
    }

    /// Image of the `i`-th simple coroot (0-based).
    pub fn column(&self, i: usize) -> Vec<i64> {
        self.matrix.iter().map(|row| row[i]).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == arith::identity(self.rank())
    }

    pub fn order(&self, bound: u64) -> Result<u64, RootSystemError> {
        let mut acc = self.clone();
        for k in 1..=bound {
            if acc.is_identity() {
                return Ok(k);
            }
            acc = acc.compose(self);
        }
        Err(RootSystemError::OrderBoundExceeded { bound })
    }

    /// No nonzero fixed vector: `det(w - 1) != 0`.
    pub fn is_elliptic(&self) -> bool {
        let n = self.rank();
        let shifted: IntMatrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.matrix[i][j] - i64::from(i == j))
                    .collect()
            })
            .collect();
        arith::determinant(&shifted) != 0
    }

    /// Eigenvalues as exponents `k` of `exp(2 pi i k / order)`, sorted, with
    /// multiplicity. Obtained by peeling cyclotomic factors off the
    /// characteristic polynomial.
    pub fn cyclotomic_exponents(&self, order: u64) -> Result<Vec<u64>, RootSystemError> {
        if order == 0 || !self.pow(order).is_identity() {
            return Err(RootSystemError::WrongOrder(order));
        }
        let mut poly = arith::char_poly(&self.matrix);
        let mut out = Vec::new();
        for d in arith::divisors(order) {
            let phi = arith::cyclotomic_poly(d);
            while let Some(q) = arith::poly_div_exact(&poly, &phi) {
                poly = q;
                let step = order / d;
                out.extend(
                    (1..=d)
                        .filter(|&j| num_integer::gcd(j, d) == 1)
                        .map(|j| (j * step) % order),
                );
            }
        }
        if poly != vec![1] {
            return Err(RootSystemError::WrongOrder(order));
        }
        out.sort_unstable();
        Ok(out)
    }
}

/// A Dynkin-diagram automorphism, as a permutation of simple indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiagramAutomorphism {
    perm: Vec<usize>,
}

impl DiagramAutomorphism {
    pub fn identity(rank: usize) -> Self {
        Self {
            perm: (0..rank).collect(),
        }
    }

    /// `perm[i]` is the 0-based image of node `i`.
    pub fn new(ty: RootSystemType, perm: Vec<usize>) -> Result<Self, RootSystemError> {
        let c = ty.cartan_matrix();
        let s = ty.rank();
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        if sorted != (0..s).collect::<Vec<_>>() {
            return Err(RootSystemError::NotAnAutomorphism);
        }
        if (0..s).any(|i| (0..s).any(|j| c[perm[i]][perm[j]] != c[i][j])) {
            return Err(RootSystemError::NotAnAutomorphism);
        }
        Ok(Self { perm })
    }

    /// The order-two symmetry of A_n (n >= 2), D_n and E6.
    pub fn standard_involution(ty: RootSystemType) -> Result<Self, RootSystemError> {
        let s = ty.rank();
        let perm: Vec<usize> = match ty.family() {
            Family::A => (0..s).rev().collect(),
            Family::D => (0..s)
                .map(|i| {
                    if i + 2 == s {
                        s - 1
                    } else if i + 1 == s {
                        s - 2
                    } else {
                        i
                    }
                })
                .collect(),
            Family::E if s == 6 => vec![5, 1, 4, 3, 2, 0],
            _ => return Err(RootSystemError::NotAnAutomorphism),
        };
        let out = Self::new(ty, perm)?;
        if out.is_trivial() {
            return Err(RootSystemError::NotAnAutomorphism);
        }
        Ok(out)
    }

    /// The order-three symmetry of D4 cycling the three outer nodes.
    pub fn triality() -> Self {
        Self {
            perm: vec![2, 1, 3, 0],
        }
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn is_trivial(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn order(&self) -> u64 {
        let mut k = 1;
        let mut cur = self.perm.clone();
        while cur.iter().enumerate().any(|(i, &j)| i != j) {
            cur = cur.iter().map(|&j| self.perm[j]).collect();
            k += 1;
        }
        k
    }

    /// Matrix sending the `i`-th simple coroot to the `perm[i]`-th.
    pub fn matrix(&self) -> IntMatrix {
        let s = self.perm.len();
        let mut m = vec![vec![0; s]; s];
        for (i, &j) in self.perm.iter().enumerate() {
            m[j][i] = 1;
        }
        m
    }

    pub fn as_weyl_matrix(&self) -> WeylElement {
        WeylElement::from_matrix(self.matrix())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> RootSystemType {
        s.parse().unwrap()
    }

    #[test]
    fn rank_constraints() {
        assert!(RootSystemType::new(Family::C, 2).is_err());
        assert!(RootSystemType::new(Family::D, 3).is_err());
        assert!(RootSystemType::new(Family::E, 9).is_err());
        assert!("G3".parse::<RootSystemType>().is_err());
        assert_eq!(t("D_5").to_string(), "D5");
    }

    #[test]
    fn coroot_counts() {
        assert_eq!(RootSystem::new(t("A2")).coroots().len(), 6);
        assert_eq!(RootSystem::new(t("D5")).coroots().len(), 40);
        assert_eq!(RootSystem::new(t("E6")).coroots().len(), 72);
        for ty in RootSystemType::all_up_to_rank(8) {
            assert_eq!(RootSystem::new(ty).coroots().len(), ty.root_count(), "{ty}");
        }
    }

    #[test]
    fn coxeter_products() {
        assert_eq!(coxeter_number_of_product(&[]), 1);
        assert_eq!(coxeter_number_of_product(&[t("A2"), t("B3")]), 6);
    }

    #[test]
    fn word_errors_and_identity() {
        let rs = RootSystem::new(t("A2"));
        assert!(rs.weyl_from_word(&[]).unwrap().is_identity());
        assert!(matches!(
            rs.weyl_from_word(&[3]),
            Err(RootSystemError::IndexOutOfRange { .. })
        ));
        assert!(rs.weyl_from_word(&[0]).is_err());
    }

    #[test]
    fn a2_coxeter_element() {
        let rs = RootSystem::new(t("A2"));
        let w = rs.weyl_from_word(&[1, 2]).unwrap();
        assert_eq!(w.order(100).unwrap(), 3);
        assert_eq!(w.cyclotomic_exponents(3).unwrap(), vec![1, 2]);
    }

    #[test]
    fn a_coxeter_shifts_simple_coroots() {
        for n in 1..=8 {
            let rs = RootSystem::new(RootSystemType::new(Family::A, n).unwrap());
            let w = rs.standard_coxeter_element();
            for i in 0..n - 1 {
                assert_eq!(w.column(i), unit(n, i + 1));
            }
            assert_eq!(w.column(n - 1), vec![-1; n]);
            assert_eq!(w.order(100).unwrap(), n as u64 + 1);
        }
    }

    #[test]
    fn longest_element_and_minus_one() {
        for (name, expect) in [
            ("E6", false),
            ("D4", true),
            ("B2", true),
            ("A1", true),
            ("A3", false),
            ("D5", false),
        ] {
            let rs = RootSystem::new(t(name));
            let (w0, word) = rs.longest_element();
            assert_eq!(word.len(), rs.coroots().len() / 2);
            assert!(w0.pow(2).is_identity());
            for c in rs.positive_coroots() {
                assert!(!Coroot {
                    expansion: w0.apply(&c.expansion)
                }
                .is_positive());
            }
            let triv = DiagramAutomorphism::identity(rs.rank());
            assert_eq!(rs.minus_one_in_w_delta(&triv), expect, "{name}");
        }
    }

    #[test]
    fn nontrivial_delta() {
        let e6 = RootSystem::new(t("E6"));
        let d = DiagramAutomorphism::standard_involution(t("E6")).unwrap();
        assert!(e6.minus_one_in_w_delta(&d));
        let a4 = RootSystem::new(t("A4"));
        assert!(
            a4.minus_one_in_w_delta(&DiagramAutomorphism::standard_involution(t("A4")).unwrap())
        );
        let d4 = RootSystem::new(t("D4"));
        let tri = DiagramAutomorphism::triality();
        assert_eq!(
            DiagramAutomorphism::new(t("D4"), tri.perm().to_vec())
                .unwrap()
                .order(),
            3
        );
        assert!(!d4.minus_one_in_w_delta(&tri));
        assert!(DiagramAutomorphism::new(t("B3"), vec![2, 1, 0]).is_err());
    }

    #[test]
    fn e6_coxeter_and_elliptic_power() {
        let rs = RootSystem::new(t("E6"));
        let wh = rs.weyl_from_word(&[2, 3, 5, 1, 4, 6]).unwrap();
        assert_eq!(wh.order(100).unwrap(), 12);
        assert_eq!(
            wh.cyclotomic_exponents(12).unwrap(),
            vec![1, 4, 5, 7, 8, 11]
        );
        let w = wh.pow(4);
        assert!(w.is_elliptic());
        let expected = [
            [-1, -1, -1, -1, 0, 0],
            [1, 0, 1, 1, 1, 1],
            [1, 1, 1, 2, 1, 0],
            [-1, -1, -2, -3, -2, -1],
            [0, 1, 1, 2, 1, 1],
            [0, -1, 0, -1, -1, -1],
        ];
        for (i, e) in expected.iter().enumerate() {
            assert_eq!(w.column(i), e.to_vec(), "image of simple coroot {}", i + 1);
        }
    }

    #[test]
    fn d_coxeter_action() {
        for s in 4..=8usize {
            let rs = RootSystem::new(RootSystemType::new(Family::D, s).unwrap());
            let w = rs.standard_coxeter_element();
            assert_eq!(w.order(100).unwrap(), 2 * s as u64 - 2);
            for i in 0..s - 3 {
                assert_eq!(w.column(i), unit(s, i + 1));
            }
            assert_eq!(w.column(s - 3), vec![1; s]);
            let mut v = vec![-1; s];
            v[s - 1] = 0;
            assert_eq!(w.column(s - 2), v);
            let mut v = vec![-1; s];
            v[s - 2] = 0;
            assert_eq!(w.column(s - 1), v);
        }
    }

    #[test]
    fn json_shape() {
        let v = serde_json::to_value(RootSystem::new(t("A2")).to_json()).unwrap();
        assert_eq!(v["type"], "A2");
        assert_eq!(v["simple_coroots"], serde_json::json!([[1, 0], [0, 1]]));
        assert_eq!(v["coroots"].as_array().unwrap().len(), 6);
        assert!(v["coroots"][0]["expansion"].is_array());
    }
}
