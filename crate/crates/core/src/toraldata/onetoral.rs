use serde::{Deserialize, Serialize};

use crate::arith::{self, Rational};

use super::{format_rational, verify_genericity, ToralError, ZeroToralDatum};

/// One simple factor with its depth; the datum is optional so the chain
/// logic can run on bare depths.
#[derive(Clone, Debug)]
pub struct ToralFactor {
    pub id: String,
    pub depth: Rational,
    pub datum: Option<ZeroToralDatum>,
}

impl ToralFactor {
    pub fn new(id: impl Into<String>, depth: Rational) -> Self {
        Self {
            id: id.into(),
            depth,
            datum: None,
        }
    }

    pub fn from_datum(id: impl Into<String>, datum: ZeroToralDatum) -> Self {
        Self {
            id: id.into(),
            depth: datum.depth(),
            datum: Some(datum),
        }
    }
}

/// Factors grouped by depth into `G^0 = T < G^1 < ... < G^d = G`.
#[derive(Clone, Debug)]
pub struct OneToralDatum {
    factors: Vec<ToralFactor>,
    groups: Vec<Vec<usize>>,
    depths: Vec<Rational>,
    n: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneToralSummary {
    pub n: i64,
    pub depths: Vec<String>,
    pub chain: Vec<Vec<String>>,
}

impl OneToralDatum {
    pub fn factors(&self) -> &[ToralFactor] {
        &self.factors
    }

    /// `d`, the number of distinct depths.
    pub fn d(&self) -> usize {
        self.groups.len()
    }

    /// `r_0 < ... < r_{d-1}`.
    pub fn depths(&self) -> &[Rational] {
        &self.depths
    }

    /// The common integer `n` with all depths in `(n, n+1]`.
    pub fn window(&self) -> i64 {
        self.n
    }

    /// Factor ids in the group of depth `r_j`.
    pub fn group(&self, j: usize) -> Vec<&str> {
        self.groups[j]
            .iter()
            .map(|&i| self.factors[i].id.as_str())
            .collect()
    }

    /// Factor ids whose derived groups make up `G^k` besides the torus: the
    /// factors of all depth groups below `k`.
    pub fn chain(&self, k: usize) -> Vec<&str> {
        (0..k.min(self.d())).flat_map(|j| self.group(j)).collect()
    }

    pub fn summary(&self) -> OneToralSummary {
        OneToralSummary {
            n: self.n,
            depths: self.depths.iter().map(|&r| format_rational(r)).collect(),
            chain: (0..=self.d())
                .map(|k| self.chain(k).into_iter().map(String::from).collect())
                .collect(),
        }
    }
}

/// Sorts factors by depth and groups equal depths; requires a common
/// window `(n, n+1]`.
pub fn assemble_one_toral(mut factors: Vec<ToralFactor>) -> Result<OneToralDatum, ToralError> {
    if factors.is_empty() {
        return Err(ToralError::InvalidParameter(
            "at least one factor is required".into(),
        ));
    }
    // ceil(r) - 1 is the n with r in (n, n+1]
    let window = |r: Rational| r.ceil().to_integer() - 1;
    let n = window(factors[0].depth);
    if factors
        .iter()
        .any(|f| f.depth <= Rational::from_integer(0) || window(f.depth) != n)
    {
        return Err(ToralError::DepthWindow(
            factors.iter().map(|f| format_rational(f.depth)).collect(),
        ));
    }
    factors.sort_by(|a, b| a.depth.cmp(&b.depth).then_with(|| a.id.cmp(&b.id)));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut depths = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        if depths.last() == Some(&f.depth) {
            groups.last_mut().expect("nonempty").push(i);
        } else {
            depths.push(f.depth);
            groups.push(vec![i]);
        }
    }
    Ok(OneToralDatum {
        factors,
        groups,
        depths,
        n,
    })
}

/// Rescales a depth and its per-coroot valuation table from `v' = e v`
/// back to `v`, requiring the table to be uniformly `-r'`.
pub fn restriction_depth(
    e: u32,
    r_prime: Rational,
    table: &[Rational],
) -> Result<(Rational, Vec<Rational>), ToralError> {
    if e == 0 || r_prime <= Rational::from_integer(0) {
        return Err(ToralError::InvalidParameter(format!(
            "e = {e}, r' = {r_prime}"
        )));
    }
    if table.iter().any(|&v| v != -r_prime) {
        return Err(ToralError::NonuniformTable);
    }
    let e = Rational::from_integer(e as i64);
    Ok((r_prime / e, table.iter().map(|&v| v / e).collect()))
}

/// Result of raising a character to the `i`-th power.
#[derive(Clone, Debug)]
pub struct TwistedDatum {
    /// `v(i) = v_p(i) e_F`.
    pub shift: i64,
    pub data: Vec<ZeroToralDatum>,
    /// `r_0 - v(i) > r_d / 2`.
    pub window_ok: bool,
    /// Every twisted component is still generic.
    pub generic: bool,
}

impl TwistedDatum {
    pub fn ok(&self) -> bool {
        self.window_ok && self.generic
    }
}

fn twist_parts(p: u64, i: i64, m: u32, e_f: u32) -> Result<(i64, i64), ToralError> {
    let pm = arith::checked_pow(p as u128, m)
        .filter(|&x| x <= i64::MAX as u128)
        .ok_or_else(|| {
            ToralError::InvalidParameter(format!("p^m too large for p = {p}, m = {m}"))
        })? as i64;
    let ir = i.rem_euclid(pm);
    if ir == 0 {
        return Err(ToralError::TwistByZero { i, pm: pm as u64 });
    }
    let vp = arith::valuation(ir as u128, p as u128);
    let unit = (ir / (p as i64).pow(vp)).rem_euclid(p as i64);
    Ok((vp as i64 * e_f as i64, unit))
}

fn twist_one(d: &ZeroToralDatum, shift: i64, unit: i64) -> ZeroToralDatum {
    let k = d.ext().residue();
    let coords = d.coords().iter().map(|a| k.scale_int(unit, a)).collect();
    d.with_depth_and_coords(d.depth() - Rational::from_integer(shift), coords)
}

/// `X -> i X` for `i` taken mod `p^m`: depth drops by `v(i)` and the
/// coordinates are scaled by the unit part of `i` (with `p = uniformizer^{e_F}`).
pub fn twist_datum(
    d: &ZeroToralDatum,
    i: i64,
    m: u32,
    e_f: u32,
) -> Result<TwistedDatum, ToralError> {
    let (shift, unit) = twist_parts(d.p(), i, m, e_f)?;
    let t = twist_one(d, shift, unit);
    let r = d.depth();
    let window_ok = r - Rational::from_integer(shift) > r / 2;
    let generic = verify_genericity(&t).verdict;
    Ok(TwistedDatum {
        shift,
        data: vec![t],
        window_ok,
        generic,
    })
}

/// Twists every factor of a 1-toral datum; the window check uses the
/// untwisted `r_0` and `r_d = r_{d-1}`.
pub fn twist_one_toral(
    d: &OneToralDatum,
    i: i64,
    m: u32,
    e_f: u32,
) -> Result<TwistedDatum, ToralError> {
    let data: Vec<&ZeroToralDatum> = d.factors.iter().filter_map(|f| f.datum.as_ref()).collect();
    let p = data
        .first()
        .map(|x| x.p())
        .ok_or_else(|| ToralError::InvalidParameter("no factor data".into()))?;
    let (shift, unit) = twist_parts(p, i, m, e_f)?;
    let twisted: Vec<ZeroToralDatum> = data.iter().map(|x| twist_one(x, shift, unit)).collect();
    let r0 = d.depths[0];
    let rd = *d.depths.last().expect("nonempty");
    let window_ok = r0 - Rational::from_integer(shift) > rd / 2;
    let generic = twisted.iter().all(|x| verify_genericity(x).verdict);
    Ok(TwistedDatum {
        shift,
        data: twisted,
        window_ok,
        generic,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{build_generic_element, build_product, BuildOptions};
    use super::*;
    use crate::rootsys::{DiagramAutomorphism, RootSystemType};
    use proptest::prelude::*;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn grouping_oracle() {
        let one = assemble_one_toral(vec![ToralFactor::new("x", r(3, 2))]).unwrap();
        assert_eq!(one.d(), 1);
        let eq = assemble_one_toral(vec![
            ToralFactor::new("x", r(2, 1)),
            ToralFactor::new("y", r(2, 1)),
        ])
        .unwrap();
        assert_eq!(eq.d(), 1);
        assert_eq!(eq.chain(1), vec!["x", "y"]);
        let three = assemble_one_toral(vec![
            ToralFactor::new("c", r(19, 10)),
            ToralFactor::new("a", r(6, 5)),
            ToralFactor::new("b", r(3, 2)),
        ])
        .unwrap();
        assert_eq!(three.d(), 3);
        assert_eq!(three.depths(), &[r(6, 5), r(3, 2), r(19, 10)]);
        assert_eq!(three.chain(0), Vec::<&str>::new());
        assert_eq!(three.chain(1), vec!["a"]);
        assert_eq!(three.chain(2), vec!["a", "b"]);
        assert_eq!(three.chain(3), vec!["a", "b", "c"]);
        assert!(*three.depths.last().unwrap() < three.depths[0] + 1);
    }

    #[test]
    fn window_violation() {
        let e = assemble_one_toral(vec![
            ToralFactor::new("a", r(3, 2)),
            ToralFactor::new("b", r(5, 2)),
        ]);
        assert!(matches!(e, Err(ToralError::DepthWindow(_))));
        // 1 and 3/2 lie in different windows (0,1] and (1,2].
        let e = assemble_one_toral(vec![
            ToralFactor::new("a", r(1, 1)),
            ToralFactor::new("b", r(3, 2)),
        ]);
        assert!(e.is_err());
    }

    #[test]
    fn restriction_examples() {
        assert_eq!(
            restriction_depth(1, r(2, 1), &[r(-2, 1)]).unwrap().0,
            r(2, 1)
        );
        let (d, t) = restriction_depth(2, r(3, 1), &[r(-3, 1); 4]).unwrap();
        assert_eq!(d, r(3, 2));
        assert!(t.iter().all(|&v| v == r(-3, 2)));
        assert!(r(1, 1) < d && d <= r(2, 1));
        assert_eq!(restriction_depth(3, r(4, 1), &[]).unwrap().0, r(4, 3));
        assert!(matches!(
            restriction_depth(2, r(3, 1), &[r(-3, 1), r(-2, 1)]),
            Err(ToralError::NonuniformTable)
        ));
    }

    #[test]
    fn twist_examples() {
        let t: RootSystemType = "A2".parse().unwrap();
        let d = build_generic_element(
            t,
            &DiagramAutomorphism::identity(2),
            5,
            5,
            3,
            BuildOptions::default(),
        )
        .unwrap();
        let tw = twist_datum(&d, 2, 2, 1).unwrap();
        assert_eq!(tw.shift, 0);
        assert_eq!(tw.data[0].depth(), d.depth());
        assert_eq!(
            tw.data[0].coords()[0],
            d.ext().residue().scale_int(2, &d.coords()[0])
        );
        assert!(tw.ok());
        let tw = twist_datum(&d, 5, 2, 1).unwrap();
        assert_eq!(tw.shift, 1);
        assert_eq!(tw.data[0].depth(), r(3, 1));
        assert!(tw.ok());
        assert!(matches!(
            twist_datum(&d, 25, 2, 1),
            Err(ToralError::TwistByZero { .. })
        ));
    }

    #[test]
    fn product_chain() {
        let types: Vec<RootSystemType> = ["A2", "B2"].iter().map(|s| s.parse().unwrap()).collect();
        let d = build_product(&types, 5, 5, 1, &[false, true]).unwrap();
        assert_eq!(d.d(), 2);
        assert_eq!(d.depths(), &[r(3, 2), r(2, 1)]);
        assert_eq!(d.chain(1), vec!["1:B2"]);
        assert!(twist_one_toral(&d, 3, 1, 1).unwrap().ok());
    }

    proptest! {
        #[test]
        fn unit_twists_stay_generic(i in 1i64..10_000) {
            prop_assume!(i % 7 != 0);
            let t: RootSystemType = "G2".parse().unwrap();
            let d = build_generic_element(t, &DiagramAutomorphism::identity(2), 7, 7, 1, BuildOptions::default()).unwrap();
            let tw = twist_datum(&d, i, 1, 1).unwrap();
            prop_assert!(tw.ok());
        }

        #[test]
        fn chain_is_strict(mut nums in proptest::collection::vec(1i64..=12, 1..6)) {
            let fs: Vec<ToralFactor> = nums.iter().enumerate().map(|(i, &k)| ToralFactor::new(i.to_string(), r(12 + k, 12))).collect();
            let d = assemble_one_toral(fs).unwrap();
            nums.sort();
            nums.dedup();
            prop_assert_eq!(d.d(), nums.len());
            prop_assert!(d.depths().windows(2).all(|w| w[0] < w[1]));
            prop_assert!(*d.depths().last().unwrap() < d.depths()[0] + 1);
            prop_assert_eq!(d.chain(d.d()).len(), d.factors().len());
        }
    }
}
