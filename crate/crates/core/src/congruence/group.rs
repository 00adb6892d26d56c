use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::CongruenceError;

pub type Elem = Vec<i64>;

/// The finite groups available to models. Elements are integer vectors:
/// permutation images, `[a, b, c]` for the Heisenberg group, `[a]` for cyclic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    Trivial,
    Symmetric {
        n: usize,
    },
    Cyclic {
        n: i64,
    },
    /// Upper unitriangular 3x3 matrices over `Z/modulus`.
    Heisenberg {
        modulus: i64,
    },
}

impl GroupSpec {
    pub fn identity(&self) -> Elem {
        match self {
            GroupSpec::Trivial => vec![],
            GroupSpec::Symmetric { n } => (0..*n as i64).collect(),
            GroupSpec::Cyclic { .. } => vec![0],
            GroupSpec::Heisenberg { .. } => vec![0, 0, 0],
        }
    }

    pub fn mul(&self, a: &[i64], b: &[i64]) -> Elem {
        match self {
            GroupSpec::Trivial => vec![],
            // (a b)(i) = a(b(i))
            GroupSpec::Symmetric { .. } => b.iter().map(|&i| a[i as usize]).collect(),
            GroupSpec::Cyclic { n } => vec![(a[0] + b[0]).rem_euclid(*n)],
            GroupSpec::Heisenberg { modulus: n } => vec![
                (a[0] + b[0]).rem_euclid(*n),
                (a[1] + b[1]).rem_euclid(*n),
                (a[2] + b[2] + a[0] * b[1]).rem_euclid(*n),
            ],
        }
    }

    pub fn inv(&self, a: &[i64]) -> Elem {
        match self {
            GroupSpec::Trivial => vec![],
            GroupSpec::Symmetric { .. } => {
                let mut out = vec![0; a.len()];
                for (i, &j) in a.iter().enumerate() {
                    out[j as usize] = i as i64;
                }
                out
            }
            GroupSpec::Cyclic { n } => vec![(-a[0]).rem_euclid(*n)],
            GroupSpec::Heisenberg { modulus: n } => {
                vec![
                    (-a[0]).rem_euclid(*n),
                    (-a[1]).rem_euclid(*n),
                    (-a[2] + a[0] * a[1]).rem_euclid(*n),
                ]
            }
        }
    }

    pub fn contains(&self, a: &[i64]) -> bool {
        match self {
            GroupSpec::Trivial => a.is_empty(),
            GroupSpec::Symmetric { n } => {
                let mut seen = vec![false; *n];
                a.len() == *n
                    && a.iter().all(|&i| {
                        (0..*n as i64).contains(&i)
                            && !std::mem::replace(&mut seen[i as usize], true)
                    })
            }
            GroupSpec::Cyclic { n } => a.len() == 1 && (0..*n).contains(&a[0]),
            GroupSpec::Heisenberg { modulus: n } => {
                a.len() == 3 && a.iter().all(|x| (0..*n).contains(x))
            }
        }
    }

    fn validate(&self) -> Result<(), CongruenceError> {
        let ok = match self {
            GroupSpec::Trivial => true,
            GroupSpec::Symmetric { n } => (1..=8).contains(n),
            GroupSpec::Cyclic { n } => *n >= 1,
            GroupSpec::Heisenberg { modulus } => *modulus >= 2 && modulus.pow(3) <= 1 << 21,
        };
        if ok {
            Ok(())
        } else {
            Err(CongruenceError::InvalidModel(format!(
                "unsupported group {self:?}"
            )))
        }
    }
}

/// A subgroup (possibly everything) listed in sorted order.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub spec: GroupSpec,
    pub generators: Vec<Elem>,
    elements: Vec<Elem>,
    index: HashMap<Elem, usize>,
}

impl Subgroup {
    pub fn generate(spec: &GroupSpec, generators: Vec<Elem>) -> Result<Self, CongruenceError> {
        spec.validate()?;
        if let Some(g) = generators.iter().find(|g| !spec.contains(g)) {
            return Err(CongruenceError::InvalidModel(format!(
                "{g:?} is not an element of {spec:?}"
            )));
        }
        let id = spec.identity();
        let mut seen: HashMap<Elem, ()> = HashMap::from([(id.clone(), ())]);
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in &generators {
                let y = spec.mul(&x, g);
                if seen.insert(y.clone(), ()).is_none() {
                    queue.push_back(y);
                }
            }
        }
        let mut elements: Vec<Elem> = seen.into_keys().collect();
        elements.sort();
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        Ok(Self {
            spec: spec.clone(),
            generators,
            elements,
            index,
        })
    }

    /// Every element of the ambient group.
    pub fn whole(spec: &GroupSpec) -> Result<Self, CongruenceError> {
        let gens = match spec {
            GroupSpec::Trivial => vec![],
            GroupSpec::Symmetric { n } if *n <= 1 => vec![],
            GroupSpec::Symmetric { n } => {
                let mut swap: Elem = (0..*n as i64).collect();
                swap.swap(0, 1);
                let cycle: Elem = (0..*n as i64).map(|i| (i + 1) % *n as i64).collect();
                vec![swap, cycle]
            }
            GroupSpec::Cyclic { .. } => vec![vec![1 % cyclic_n(spec)]],
            GroupSpec::Heisenberg { .. } => vec![vec![1, 0, 0], vec![0, 1, 0]],
        };
        Self::generate(spec, gens)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Elem {
        &self.elements[i]
    }

    pub fn index_of(&self, x: &[i64]) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.index.contains_key(x)
    }

    pub fn identity_index(&self) -> usize {
        self.index[&self.spec.identity()]
    }

    pub fn mul_idx(&self, a: usize, b: usize) -> usize {
        self.index[&self.spec.mul(&self.elements[a], &self.elements[b])]
    }

    pub fn inv_idx(&self, a: usize) -> usize {
        self.index[&self.spec.inv(&self.elements[a])]
    }
}

fn cyclic_n(spec: &GroupSpec) -> i64 {
    match spec {
        GroupSpec::Cyclic { n } => *n,
        _ => 1,
    }
}

/// Extends values on generators to a map on the whole subgroup, checking
/// that it is a homomorphism into the monoid given by `op`.
pub fn extend_hom<T: Clone + PartialEq>(
    group: &Subgroup,
    images: &[T],
    unit: T,
    op: impl Fn(&T, &T) -> T,
) -> Result<Vec<T>, CongruenceError> {
    if images.len() != group.generators.len() {
        return Err(CongruenceError::InvalidModel(format!(
            "{} images for {} generators",
            images.len(),
            group.generators.len()
        )));
    }
    let gen_idx: Vec<usize> = group
        .generators
        .iter()
        .map(|g| group.index_of(g).expect("generator"))
        .collect();
    let mut value: Vec<Option<T>> = vec![None; group.len()];
    let id = group.identity_index();
    value[id] = Some(unit);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for (gi, &g) in gen_idx.iter().enumerate() {
            let y = group.mul_idx(x, g);
            let v = op(value[x].as_ref().expect("visited"), &images[gi]);
            match &value[y] {
                Some(old) if *old != v => return Err(CongruenceError::NotAHomomorphism),
                Some(_) => {}
                None => {
                    value[y] = Some(v);
                    queue.push_back(y);
                }
            }
        }
    }
    Ok(value.into_iter().map(|v| v.expect("generated")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        assert_eq!(
            Subgroup::whole(&GroupSpec::Symmetric { n: 3 })
                .unwrap()
                .len(),
            6
        );
        assert_eq!(
            Subgroup::whole(&GroupSpec::Heisenberg { modulus: 3 })
                .unwrap()
                .len(),
            27
        );
        assert_eq!(
            Subgroup::whole(&GroupSpec::Heisenberg { modulus: 9 })
                .unwrap()
                .len(),
            729
        );
        assert_eq!(
            Subgroup::whole(&GroupSpec::Cyclic { n: 9 }).unwrap().len(),
            9
        );
        assert_eq!(Subgroup::whole(&GroupSpec::Trivial).unwrap().len(), 1);
    }

    #[test]
    fn heisenberg_group_laws() {
        let h = GroupSpec::Heisenberg { modulus: 9 };
        let g = Subgroup::whole(&h).unwrap();
        for a in g.elements().iter().step_by(37) {
            assert_eq!(h.mul(a, &h.inv(a)), h.identity());
            for b in g.elements().iter().step_by(53) {
                for c in g.elements().iter().step_by(101) {
                    assert_eq!(h.mul(&h.mul(a, b), c), h.mul(a, &h.mul(b, c)));
                }
            }
        }
        // the commutator of x and y is central z
        let (x, y) = (vec![1, 0, 0], vec![0, 1, 0]);
        let comm = h.mul(&h.mul(&x, &y), &h.mul(&h.inv(&x), &h.inv(&y)));
        assert_eq!(comm, vec![0, 0, 1]);
    }

    #[test]
    fn hom_extension_detects_non_homs() {
        let c = Subgroup::whole(&GroupSpec::Cyclic { n: 6 }).unwrap();
        assert!(extend_hom(&c, &[2i64], 0, |a, b| (a + b) % 3).is_ok());
        assert!(matches!(
            extend_hom(&c, &[1i64], 0, |a, b| (a + b) % 4),
            Err(CongruenceError::NotAHomomorphism)
        ));
    }
}
