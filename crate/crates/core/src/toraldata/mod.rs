//! Generic elements for elliptic tori and their exact certificates.
//!
//! A [`ZeroToralDatum`] records an elliptic torus (through its Galois
//! cocycle `w` and the quasi-split twist `delta`) together with the residues
//! `a_i` of a linear functional `X` on the simple coroots at depth `-r`.
//! Descent and genericity both reduce to identities and nonvanishing in the
//! residue field, which is what [`verify`] checks.

mod build;
mod eisenstein;
mod onetoral;
mod verify;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::ffield::{ExtensionJson, FieldElement, FieldError, FieldExtension};
use crate::rootsys::{
    DiagramAutomorphism, RootSystem, RootSystemError, RootSystemType, WeylElement,
};

pub use build::{
    build_dodd_coordinates, build_e6_coordinates, build_generic_element, build_product,
    dodd_families, BuildOptions, DoddCoordinates, E6Variant,
};
pub use eisenstein::{
    e6_ramified_coroot_values, e6_ramified_descent_exact, e6_ramified_value_set_contains,
    Eisenstein,
};
pub use onetoral::{
    assemble_one_toral, restriction_depth, twist_datum, twist_one_toral, OneToralDatum,
    OneToralSummary, ToralFactor, TwistedDatum,
};
pub use verify::{
    verify, verify_galois_descent, verify_genericity, CorootRow, DescentRow, GenericityReport,
};

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum ToralError {
    #[error("p = {p} must exceed the Coxeter number {cox}")]
    PrimeTooSmall { p: u64, cox: u64 },
    #[error("q = {q} is not a power of p = {p}")]
    NotAPowerOfP { p: u64, q: u64 },
    #[error("ramified cubic extension needs q = 1 mod 3, got q = {0}")]
    NoCubeRootOfUnity(u64),
    #[error("ramified quadratic extension needs p odd")]
    EvenCharacteristic,
    #[error("unsupported twist: {0}")]
    UnsupportedDelta(String),
    #[error("no case of the construction applies to {0}")]
    NoCase(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("depths {0:?} do not fit in one window (n, n+1]")]
    DepthWindow(Vec<String>),
    #[error("twist exponent {i} is divisible by p^m = {pm}")]
    TwistByZero { i: i64, pm: u64 },
    #[error("nonuniform valuation table")]
    NonuniformTable,
    #[error("malformed datum: {0}")]
    Malformed(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Root(#[from] RootSystemError),
}

/// Which construction produced a datum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseLabel {
    #[serde(rename = "Case1-unram")]
    Case1Unram,
    #[serde(rename = "Case1-ram")]
    Case1Ram,
    #[serde(rename = "A")]
    A,
    #[serde(rename = "Dodd")]
    Dodd,
    #[serde(rename = "E6-unram")]
    E6Unram,
    #[serde(rename = "E6-ram")]
    E6Ram,
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseLabel::Case1Unram => "Case1-unram",
            CaseLabel::Case1Ram => "Case1-ram",
            CaseLabel::A => "A",
            CaseLabel::Dodd => "Dodd",
            CaseLabel::E6Unram => "E6-unram",
            CaseLabel::E6Ram => "E6-ram",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionKind {
    Unramified,
    RamifiedQuadratic,
    RamifiedCubic,
}

/// The splitting field `E/F` of the torus, seen through its residue field
/// and, when ramified, the unit `sigma(uniformizer) / uniformizer`.
#[derive(Clone, Debug)]
pub struct ExtensionSpec {
    kind: ExtensionKind,
    residue: Arc<FieldExtension>,
    unit: FieldElement,
}

impl ExtensionSpec {
    pub fn unramified(p: u64, f: u32, degree: u32) -> Result<Self, ToralError> {
        let residue = Arc::new(FieldExtension::new(p, f, degree)?);
        let unit = residue.one();
        Ok(Self {
            kind: ExtensionKind::Unramified,
            residue,
            unit,
        })
    }

    pub fn ramified_quadratic(p: u64, f: u32) -> Result<Self, ToralError> {
        if p == 2 {
            return Err(ToralError::EvenCharacteristic);
        }
        let residue = Arc::new(FieldExtension::new(p, f, 1)?);
        let unit = residue.from_int(-1);
        Ok(Self {
            kind: ExtensionKind::RamifiedQuadratic,
            residue,
            unit,
        })
    }

    /// Uses the smallest primitive cube root of unity of `F_q`.
    pub fn ramified_cubic(p: u64, f: u32) -> Result<Self, ToralError> {
        let residue = Arc::new(FieldExtension::new(p, f, 1)?);
        let unit = residue
            .base_roots_of_unity(3)
            .into_iter()
            .next()
            .ok_or(ToralError::NoCubeRootOfUnity(residue.q()))?;
        Ok(Self {
            kind: ExtensionKind::RamifiedCubic,
            residue,
            unit,
        })
    }

    pub fn kind(&self) -> ExtensionKind {
        self.kind
    }

    pub fn residue(&self) -> &FieldExtension {
        &self.residue
    }

    /// Residue of `sigma(uniformizer_E) / uniformizer_E`; 1 when unramified.
    pub fn unit(&self) -> &FieldElement {
        &self.unit
    }

    pub fn ramification_index(&self) -> u32 {
        match self.kind {
            ExtensionKind::Unramified => 1,
            ExtensionKind::RamifiedQuadratic => 2,
            ExtensionKind::RamifiedCubic => 3,
        }
    }

    /// `[E : F]`.
    pub fn degree(&self) -> u32 {
        self.ramification_index() * self.residue.n()
    }

    fn to_json(&self) -> ExtSpecJson {
        ExtSpecJson {
            kind: self.kind,
            residue: self.residue.to_json(),
            unit: self.unit.coeffs().to_vec(),
        }
    }

    fn from_json(json: &ExtSpecJson) -> Result<Self, ToralError> {
        let residue = Arc::new(FieldExtension::from_json(&json.residue)?);
        let unit = residue.element(json.unit.clone())?;
        let e = match json.kind {
            ExtensionKind::Unramified => 1,
            ExtensionKind::RamifiedQuadratic => 2,
            ExtensionKind::RamifiedCubic => 3,
        };
        let ok = match json.kind {
            ExtensionKind::Unramified => unit == residue.one(),
            _ => {
                residue.n() == 1
                    && residue.pow(&unit, e) == residue.one()
                    && (1..e).all(|k| residue.pow(&unit, k) != residue.one())
            }
        };
        if !ok {
            return Err(ToralError::Malformed(
                "extension unit inconsistent with its kind".into(),
            ));
        }
        Ok(Self {
            kind: json.kind,
            residue,
            unit,
        })
    }
}

/// Leading term `c * uniformizer^v` of an element, or only a lower bound
/// on its valuation when cancellation made the coefficient unknown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TameLeadingTerm {
    pub valuation: Rational,
    pub residue: Option<FieldElement>,
}

impl TameLeadingTerm {
    pub fn known(valuation: Rational, residue: FieldElement) -> Self {
        let residue = (!residue.is_zero()).then_some(residue);
        Self { valuation, residue }
    }

    pub fn is_unknown(&self) -> bool {
        self.residue.is_none()
    }

    pub fn add(&self, other: &Self, k: &FieldExtension) -> Self {
        use std::cmp::Ordering::*;
        match (
            &self.residue,
            &other.residue,
            self.valuation.cmp(&other.valuation),
        ) {
            (Some(_), _, Less) => self.clone(),
            (_, Some(_), Greater) => other.clone(),
            (Some(a), Some(b), Equal) => Self::known(self.valuation, k.add(a, b)),
            (Some(_), None, Equal) => self.clone(),
            (None, Some(_), Equal) => other.clone(),
            _ => Self {
                valuation: self.valuation.min(other.valuation),
                residue: None,
            },
        }
    }

    /// Multiplication by a rational integer.
    pub fn scale_int(&self, c: i64, k: &FieldExtension) -> Self {
        match &self.residue {
            Some(r) => Self::known(self.valuation, k.scale_int(c, r)),
            None => self.clone(),
        }
    }

    pub fn shift(&self, by: Rational) -> Self {
        Self {
            valuation: self.valuation + by,
            residue: self.residue.clone(),
        }
    }
}

/// A 0-toral datum: elliptic torus, depth and generic functional.
#[derive(Clone, Debug)]
pub struct ZeroToralDatum {
    root_type: RootSystemType,
    delta: DiagramAutomorphism,
    cocycle: WeylElement,
    ext: ExtensionSpec,
    p: u64,
    q: u64,
    n: u32,
    depth: Rational,
    case: CaseLabel,
    coords: Vec<FieldElement>,
}

impl ZeroToralDatum {
    pub fn root_type(&self) -> RootSystemType {
        self.root_type
    }

    pub fn root_system(&self) -> Arc<RootSystem> {
        RootSystem::cached(self.root_type)
    }

    pub fn delta(&self) -> &DiagramAutomorphism {
        &self.delta
    }

    pub fn cocycle(&self) -> &WeylElement {
        &self.cocycle
    }

    /// `w delta`, the action of the Galois generator on coroots.
    pub fn twisted_action(&self) -> WeylElement {
        self.cocycle.compose(&self.delta.as_weyl_matrix())
    }

    pub fn ext(&self) -> &ExtensionSpec {
        &self.ext
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn depth(&self) -> Rational {
        self.depth
    }

    pub fn case(&self) -> CaseLabel {
        self.case
    }

    /// Residues `a_i` of `X(uniformizer_E^{r e} H_i)`.
    pub fn coords(&self) -> &[FieldElement] {
        &self.coords
    }

    /// The coordinates as leading terms of valuation 0.
    pub fn coord_terms(&self) -> Vec<TameLeadingTerm> {
        self.coords
            .iter()
            .map(|a| TameLeadingTerm::known(Rational::from_integer(0), a.clone()))
            .collect()
    }

    /// Exponent `r e` of the uniformizer of `E` in the basis vectors.
    pub fn basis_exponent(&self) -> i64 {
        let re = self.depth * Rational::from_integer(self.ext.ramification_index() as i64);
        re.to_integer()
    }

    /// Replaces the coordinates; used for negative controls.
    pub fn with_coords(&self, coords: Vec<FieldElement>) -> Self {
        Self {
            coords,
            ..self.clone()
        }
    }

    pub(crate) fn with_depth_and_coords(&self, depth: Rational, coords: Vec<FieldElement>) -> Self {
        Self {
            depth,
            coords,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> DatumJson {
        DatumJson {
            ty: self.root_type,
            case: self.case,
            p: self.p,
            q: self.q,
            n: self.n,
            ext: self.ext.to_json(),
            depth: format_rational(self.depth),
            delta: self.delta.perm().to_vec(),
            cocycle: self.cocycle.matrix().clone(),
            coords: self.coords.iter().map(|c| c.coeffs().to_vec()).collect(),
        }
    }

    /// Rebuilds a datum, validating everything except descent and
    /// genericity, which are left to [`verify`].
    pub fn from_json(json: &DatumJson) -> Result<Self, ToralError> {
        let rs = RootSystem::cached(json.ty);
        let rank = rs.rank();
        let cox = rs.coxeter_number();
        if json.p <= cox {
            return Err(ToralError::PrimeTooSmall { p: json.p, cox });
        }
        let delta = DiagramAutomorphism::new(json.ty, json.delta.clone())?;
        let cocycle = WeylElement::from_matrix(json.cocycle.clone());
        if !rs.is_weyl_element(&cocycle) {
            return Err(ToralError::Malformed(
                "cocycle is not a Weyl group element".into(),
            ));
        }
        let ext = ExtensionSpec::from_json(&json.ext)?;
        if ext.residue().p() != json.p || ext.residue().q() != json.q {
            return Err(ToralError::Malformed(
                "extension does not match p and q".into(),
            ));
        }
        let depth =
            parse_rational(&json.depth).ok_or_else(|| ToralError::Malformed("bad depth".into()))?;
        let e = ext.ramification_index() as i64;
        let expected = Rational::from_integer(json.n as i64) + Rational::new(1, e);
        if depth != expected {
            return Err(ToralError::Malformed(format!(
                "depth {} is not n + 1/e",
                json.depth
            )));
        }
        if json.coords.len() != rank {
            return Err(ToralError::Malformed(
                "one coordinate per simple coroot is required".into(),
            ));
        }
        let coords = json
            .coords
            .iter()
            .map(|c| ext.residue().element(c.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            root_type: json.ty,
            delta,
            cocycle,
            ext,
            p: json.p,
            q: json.q,
            n: json.n,
            depth,
            case: json.case,
            coords,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtSpecJson {
    pub kind: ExtensionKind,
    pub residue: ExtensionJson,
    pub unit: Vec<u32>,
}

/// On-disk form of a [`ZeroToralDatum`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatumJson {
    #[serde(rename = "type")]
    pub ty: RootSystemType,
    pub case: CaseLabel,
    pub p: u64,
    pub q: u64,
    pub n: u32,
    pub ext: ExtSpecJson,
    pub depth: String,
    pub delta: Vec<usize>,
    pub cocycle: Vec<Vec<i64>>,
    pub coords: Vec<Vec<u32>>,
}

pub fn format_rational(r: Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((a, b)) => {
            let num: i64 = a.trim().parse().ok()?;
            let den: i64 = b.trim().parse().ok()?;
            (den != 0).then(|| Rational::new(num, den))
        }
        None => Some(Rational::from_integer(s.trim().parse().ok()?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leading_term_cancellation_is_unknown() {
        let k = FieldExtension::new(5, 1, 2).unwrap();
        let zero = Rational::from_integer(0);
        let a = TameLeadingTerm::known(zero, k.from_int(2));
        let b = TameLeadingTerm::known(zero, k.from_int(3));
        assert!(a.add(&b, &k).is_unknown());
        let c = TameLeadingTerm::known(Rational::new(1, 2), k.from_int(1));
        assert_eq!(a.add(&c, &k), a);
        let u = TameLeadingTerm {
            valuation: Rational::new(-1, 1),
            residue: None,
        };
        assert!(a.add(&u, &k).is_unknown());
        assert!(a.scale_int(5, &k).is_unknown());
    }

    #[test]
    fn rational_format_round_trip() {
        for r in [
            Rational::new(4, 3),
            Rational::from_integer(2),
            Rational::new(-1, 2),
        ] {
            assert_eq!(parse_rational(&format_rational(r)), Some(r));
        }
        assert_eq!(parse_rational("3"), Some(Rational::from_integer(3)));
        assert_eq!(parse_rational("1/0"), None);
    }
}
