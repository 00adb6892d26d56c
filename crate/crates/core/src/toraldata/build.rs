use crate::arith::{self, Rational};
use crate::ffield::FieldElement;
use crate::rootsys::{
    coxeter_number_of_product, DiagramAutomorphism, Family, RootSystem, RootSystemType, WeylElement,
};

use super::onetoral::{assemble_one_toral, OneToralDatum, ToralFactor};
use super::{CaseLabel, ExtensionSpec, ToralError, ZeroToralDatum};

/// Caller preferences that the dispatch rule leaves open.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// Use the ramified quadratic splitting field in the `-1` case, and
    /// insist on the ramified cubic one for E6.
    pub ramified: bool,
}

fn split_q(p: u64, q: u64) -> Result<u32, ToralError> {
    match arith::prime_power(q) {
        Some((pp, f)) if pp == p => Ok(f),
        _ => Err(ToralError::NotAPowerOfP { p, q }),
    }
}

fn depth(n: u32, e: i64) -> Rational {
    Rational::from_integer(n as i64) + Rational::new(1, e)
}

/// The E6 element `w = (s2 s3 s5 s1 s4 s6)^4` of order 3.
pub(crate) fn e6_cocycle(rs: &RootSystem) -> WeylElement {
    rs.weyl_from_word(&[2, 3, 5, 1, 4, 6])
        .expect("E6 word")
        .pow(4)
}

/// Builds a generic element of depth in `(n, n+1]` for an elliptic torus.
///
/// If `-1` lies in `W delta` the torus splits over a quadratic extension
/// with Galois action `-1` and all coordinates are equal. Otherwise the
/// group is split of type A, odd D or E6 and the coordinates come from the
/// Coxeter-element (or, for E6, order-three) constructions.
pub fn build_generic_element(
    ty: RootSystemType,
    delta: &DiagramAutomorphism,
    p: u64,
    q: u64,
    n: u32,
    opts: BuildOptions,
) -> Result<ZeroToralDatum, ToralError> {
    let rs = RootSystem::cached(ty);
    let cox = rs.coxeter_number();
    if p <= cox {
        return Err(ToralError::PrimeTooSmall { p, cox });
    }
    let f = split_q(p, q)?;
    if delta.perm().len() != rs.rank() {
        return Err(ToralError::UnsupportedDelta(format!(
            "automorphism of the wrong rank for {ty}"
        )));
    }
    let rank = rs.rank();
    let even_d = ty.family() == Family::D && rank.is_multiple_of(2);
    if even_d && !delta.is_trivial() {
        return Err(ToralError::UnsupportedDelta(format!(
            "{ty} with nontrivial delta needs a second splitting field meeting E only in F; only the split form is modelled"
        )));
    }
    let datum = |cocycle, ext, depth, case, coords| ZeroToralDatum {
        root_type: ty,
        delta: delta.clone(),
        cocycle,
        ext,
        p,
        q,
        n,
        depth,
        case,
        coords,
    };

    if rs.minus_one_in_w_delta(delta) {
        let d = delta.matrix();
        let w: Vec<Vec<i64>> = (0..rank)
            .map(|i| (0..rank).map(|j| -d[j][i]).collect())
            .collect();
        let w = WeylElement::from_matrix(w);
        return if opts.ramified {
            let ext = ExtensionSpec::ramified_quadratic(p, f)?;
            let coords = vec![ext.residue().one(); rank];
            Ok(datum(w, ext, depth(n, 2), CaseLabel::Case1Ram, coords))
        } else {
            let ext = ExtensionSpec::unramified(p, f, 2)?;
            let a = ext.residue().find_trace_zero_generator()?;
            let coords = vec![a; rank];
            Ok(datum(w, ext, depth(n, 1), CaseLabel::Case1Unram, coords))
        };
    }
    if !delta.is_trivial() {
        return Err(ToralError::UnsupportedDelta(format!(
            "-1 is not in W delta for {ty}"
        )));
    }
    match (ty.family(), rank) {
        (Family::A, _) => {
            let ext = ExtensionSpec::unramified(p, f, rank as u32 + 1)?;
            let k = ext.residue();
            let a = k.find_trace_zero_generator()?;
            let coords = (0..rank).map(|i| k.frobenius(&a, i as i64)).collect();
            Ok(datum(
                rs.standard_coxeter_element(),
                ext,
                depth(n, 1),
                CaseLabel::A,
                coords,
            ))
        }
        (Family::D, s) if s % 2 == 1 => {
            let dc = build_dodd_coordinates(s, q)?;
            Ok(datum(
                rs.standard_coxeter_element(),
                dc.ext,
                depth(n, 1),
                CaseLabel::Dodd,
                dc.coords,
            ))
        }
        (Family::E, 6) => {
            let variant = if q % 3 == 1 {
                E6Variant::RamifiedCubic
            } else if opts.ramified {
                return Err(ToralError::NoCubeRootOfUnity(q));
            } else {
                E6Variant::UnramifiedCubic
            };
            let (ext, coords) = build_e6_coordinates(variant, q)?;
            let (e, case) = match variant {
                E6Variant::UnramifiedCubic => (1, CaseLabel::E6Unram),
                E6Variant::RamifiedCubic => (3, CaseLabel::E6Ram),
            };
            Ok(datum(e6_cocycle(&rs), ext, depth(n, e), case, coords))
        }
        _ => Err(ToralError::NoCase(ty.to_string())),
    }
}

/// Coordinates for odd `D_s` together with the auxiliary elements `a, b`.
#[derive(Clone, Debug)]
pub struct DoddCoordinates {
    pub ext: ExtensionSpec,
    pub a: FieldElement,
    pub b: FieldElement,
    pub coords: Vec<FieldElement>,
}

impl DoddCoordinates {
    /// `a_{s-1} - a_s = b`, `sigma^{s-1}(a) = -a` and `sigma(b) = -b`.
    pub fn identities_hold(&self) -> bool {
        let k = self.ext.residue();
        let s = self.coords.len();
        k.sub(&self.coords[s - 2], &self.coords[s - 1]) == self.b
            && k.frobenius(&self.a, s as i64 - 1) == k.neg(&self.a)
            && k.frobenius(&self.b, 1) == k.neg(&self.b)
    }
}

/// Coordinates for split `D_s`, `s` odd, over the unramified extension of
/// degree `2s - 2`, built from powers of the fixed multiplicative generator.
pub fn build_dodd_coordinates(s: usize, q: u64) -> Result<DoddCoordinates, ToralError> {
    if s < 5 || s.is_multiple_of(2) {
        return Err(ToralError::InvalidParameter(format!(
            "D_s construction needs odd s >= 5, got {s}"
        )));
    }
    let (p, f) = arith::prime_power(q).ok_or(ToralError::NotAPowerOfP { p: q, q })?;
    let h = 2 * s as u64 - 2;
    if p <= h {
        return Err(ToralError::PrimeTooSmall { p, cox: h });
    }
    let ext = ExtensionSpec::unramified(p, f, h as u32)?;
    let k = ext.residue();
    let qq = q as u128;
    let half_order = qq.pow(s as u32 - 1);
    let a = k.generator_power(half_order.div_ceil(2))?;
    let b = k.generator_power((qq.pow(h as u32) - 1) / (2 * (qq - 1)))?;
    let orbit: Vec<FieldElement> = (0..s - 1).map(|i| k.frobenius(&a, i as i64)).collect();
    let partial = orbit[..s - 2]
        .iter()
        .fold(k.zero(), |acc, x| k.add(&acc, x));
    let half = k.base().inv(k.base().from_int(2)).expect("p odd");
    let tail = k.sub(&orbit[s - 2], &partial);
    let a_sm1 = k.scale_base(half, &k.add(&b, &tail));
    let a_s = k.scale_base(half, &k.sub(&tail, &b));
    let mut coords = orbit[..s - 2].to_vec();
    coords.push(a_sm1);
    coords.push(a_s);
    Ok(DoddCoordinates { ext, a, b, coords })
}

/// Genericity families of positive coroots of `D_s` used in the odd-rank
/// argument; a coroot may belong to several.
///
/// * `1a`, `1b`, `1c`: `alpha_{i+1} + ... + alpha_j` with `j <= s-2`,
///   `j = s-1`, `j = s` respectively;
/// * `2`: `(alpha_{i+1} + ... + alpha_s) + (alpha_{j+1} + ... + alpha_{s-2})`, `i <= j <= s-2`;
/// * `3`: `alpha_{i+1} + ... + alpha_{s-2} + alpha_s`, `i < s-2`.
pub fn dodd_families(s: usize, expansion: &[i64]) -> Vec<&'static str> {
    let interval = |lo: usize, hi: usize| -> Vec<i64> {
        (1..=s).map(|k| i64::from(k > lo && k <= hi)).collect()
    };
    let add =
        |x: Vec<i64>, y: Vec<i64>| -> Vec<i64> { x.iter().zip(&y).map(|(a, b)| a + b).collect() };
    let mut out = Vec::new();
    let mut hit = |label: &'static str, v: Vec<i64>| {
        if v == expansion && !out.contains(&label) {
            out.push(label);
        }
    };
    for i in 0..s {
        for j in i + 1..=s {
            let label = if j <= s - 2 {
                "1a"
            } else if j == s - 1 {
                "1b"
            } else {
                "1c"
            };
            hit(label, interval(i, j));
        }
    }
    for i in 0..=s - 2 {
        for j in i..=s - 2 {
            hit("2", add(interval(i, s), interval(j, s - 2)));
        }
    }
    for i in 0..s - 2 {
        let mut v = interval(i, s - 2);
        v[s - 1] += 1;
        hit("3", v);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum E6Variant {
    UnramifiedCubic,
    RamifiedCubic,
}

/// Coordinates for split E6 with the order-three cocycle.
///
/// Unramified: `a` is a trace-zero generator of `F_{q^3}` and the
/// coordinates are `(s, s, a - 2s, s, a + s, -3a - 2s)` with `s = sigma(a)`.
/// Ramified: `(2, 1, -4 - 2z, 1, 1, 3z)` for a primitive cube root of unity
/// `z` in `F_q`.
pub fn build_e6_coordinates(
    variant: E6Variant,
    q: u64,
) -> Result<(ExtensionSpec, Vec<FieldElement>), ToralError> {
    let (p, f) = arith::prime_power(q).ok_or(ToralError::NotAPowerOfP { p: q, q })?;
    if p <= 12 {
        return Err(ToralError::PrimeTooSmall { p, cox: 12 });
    }
    match variant {
        E6Variant::UnramifiedCubic => {
            let ext = ExtensionSpec::unramified(p, f, 3)?;
            let k = ext.residue();
            let a = k.find_trace_zero_generator()?;
            let sa = k.frobenius(&a, 1);
            let lin = |x: i64, y: i64| k.add(&k.scale_int(x, &a), &k.scale_int(y, &sa));
            let coords = vec![
                sa.clone(),
                sa.clone(),
                lin(1, -2),
                sa.clone(),
                lin(1, 1),
                lin(-3, -2),
            ];
            Ok((ext, coords))
        }
        E6Variant::RamifiedCubic => {
            if q % 3 != 1 {
                return Err(ToralError::NoCubeRootOfUnity(q));
            }
            let ext = ExtensionSpec::ramified_cubic(p, f)?;
            let k = ext.residue();
            let z = ext.unit().clone();
            let lin = |x: i64, y: i64| k.add(&k.from_int(x), &k.scale_int(y, &z));
            let coords = vec![
                lin(2, 0),
                lin(1, 0),
                lin(-4, -2),
                lin(1, 0),
                lin(1, 0),
                lin(0, 3),
            ];
            Ok((ext, coords))
        }
    }
}

/// Builds one datum per simple factor (split, trivial twist) and assembles
/// the 1-toral chain.
pub fn build_product(
    types: &[RootSystemType],
    p: u64,
    q: u64,
    n: u32,
    ramified: &[bool],
) -> Result<OneToralDatum, ToralError> {
    let cox = coxeter_number_of_product(types);
    if p <= cox {
        return Err(ToralError::PrimeTooSmall { p, cox });
    }
    let factors = types
        .iter()
        .enumerate()
        .map(|(i, &ty)| {
            let opts = BuildOptions {
                ramified: ramified.get(i).copied().unwrap_or(false),
            };
            let d = build_generic_element(
                ty,
                &DiagramAutomorphism::identity(ty.rank()),
                p,
                q,
                n,
                opts,
            )?;
            Ok(ToralFactor::from_datum(format!("{i}:{ty}"), d))
        })
        .collect::<Result<Vec<_>, ToralError>>()?;
    assemble_one_toral(factors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> RootSystemType {
        s.parse().unwrap()
    }

    #[test]
    fn dispatch_labels() {
        let cases = [
            ("B2", 5, false, CaseLabel::Case1Unram),
            ("B2", 5, true, CaseLabel::Case1Ram),
            ("A1", 3, false, CaseLabel::Case1Unram),
            ("A2", 5, false, CaseLabel::A),
            ("D5", 11, false, CaseLabel::Dodd),
            ("D4", 7, false, CaseLabel::Case1Unram),
            ("E6", 13, true, CaseLabel::E6Ram),
            ("E6", 17, false, CaseLabel::E6Unram),
        ];
        for (ty, p, ram, label) in cases {
            let d = build_generic_element(
                t(ty),
                &DiagramAutomorphism::identity(t(ty).rank()),
                p,
                p,
                1,
                BuildOptions { ramified: ram },
            )
            .unwrap();
            assert_eq!(d.case(), label, "{ty}");
        }
    }

    #[test]
    fn dispatch_errors() {
        let id = |ty: &str| DiagramAutomorphism::identity(t(ty).rank());
        assert!(matches!(
            build_generic_element(t("E6"), &id("E6"), 11, 11, 1, BuildOptions::default()),
            Err(ToralError::PrimeTooSmall { .. })
        ));
        assert!(matches!(
            build_generic_element(
                t("E6"),
                &id("E6"),
                17,
                17,
                1,
                BuildOptions { ramified: true }
            ),
            Err(ToralError::NoCubeRootOfUnity(17))
        ));
        assert!(matches!(
            build_generic_element(
                t("B2"),
                &id("B2"),
                5,
                25 * 5 + 1,
                1,
                BuildOptions::default()
            ),
            Err(ToralError::NotAPowerOfP { .. })
        ));
        let d6 = DiagramAutomorphism::standard_involution(t("D6")).unwrap();
        assert!(matches!(
            build_generic_element(t("D6"), &d6, 11, 11, 1, BuildOptions::default()),
            Err(ToralError::UnsupportedDelta(_))
        ));
    }

    #[test]
    fn e6_ramified_coordinates_at_13() {
        let (ext, c) = build_e6_coordinates(E6Variant::RamifiedCubic, 13).unwrap();
        let k = ext.residue();
        let z = ext.unit();
        assert_eq!(c[0], k.from_int(2));
        assert_eq!(c[5], k.scale_int(3, z));
        assert_eq!(k.pow(z, 3), k.one());
    }

    #[test]
    fn dodd_identities() {
        for (s, q) in [(5, 11), (5, 13), (7, 13)] {
            assert!(build_dodd_coordinates(s, q).unwrap().identities_hold());
        }
        assert!(matches!(
            build_dodd_coordinates(5, 7),
            Err(ToralError::PrimeTooSmall { .. })
        ));
        assert!(build_dodd_coordinates(6, 11).is_err());
    }

    #[test]
    fn dodd_families_cover_positive_coroots() {
        for s in [5usize, 7] {
            let rs = RootSystem::new(RootSystemType::new(Family::D, s).unwrap());
            let mut seen = std::collections::BTreeSet::new();
            for c in rs.positive_coroots() {
                let fam = dodd_families(s, &c.expansion);
                assert!(!fam.is_empty(), "{:?}", c.expansion);
                seen.extend(fam);
            }
            assert_eq!(
                seen.into_iter().collect::<Vec<_>>(),
                vec!["1a", "1b", "1c", "2", "3"]
            );
        }
    }

    #[test]
    fn dodd_sigma_relations_written_out() {
        for (s, q) in [(5usize, 11u64), (5, 13), (5, 17), (7, 13), (7, 17)] {
            let dc = build_dodd_coordinates(s, q).unwrap();
            let k = dc.ext.residue();
            let a = &dc.coords;
            let sum = |idx: &[usize]| idx.iter().fold(k.zero(), |acc, &i| k.add(&acc, &a[i - 1]));
            let sig = |i: usize| k.frobenius(&a[i - 1], 1);
            for i in 1..=s - 3 {
                assert_eq!(sig(i), a[i]);
            }
            let all: Vec<usize> = (1..=s).collect();
            assert_eq!(sig(s - 2), sum(&all));
            assert_eq!(sig(s - 1), k.neg(&sum(&all[..s - 1])));
            let mut last: Vec<usize> = (1..=s - 2).collect();
            last.push(s);
            assert_eq!(sig(s), k.neg(&sum(&last)));
        }
    }

    #[test]
    fn json_round_trip() {
        let cases = [
            ("E6", 13, true),
            ("D5", 11, false),
            ("B3", 7, true),
            ("A3", 5, false),
        ];
        for (ty, p, ram) in cases {
            let d = build_generic_element(
                t(ty),
                &DiagramAutomorphism::identity(t(ty).rank()),
                p,
                p,
                2,
                BuildOptions { ramified: ram },
            )
            .unwrap();
            let text = serde_json::to_string(&d.to_json()).unwrap();
            let back = ZeroToralDatum::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
            assert_eq!(serde_json::to_string(&back.to_json()).unwrap(), text);
            assert_eq!(back.coords(), d.coords());
        }
    }
}
