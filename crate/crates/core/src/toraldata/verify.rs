use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::ffield::FieldElement;

use super::{format_rational, ExtensionKind, TameLeadingTerm, ZeroToralDatum};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorootRow {
    pub expansion: Vec<i64>,
    /// Residue of `X` on the coroot, or `None` if it cancelled.
    pub residue: Option<Vec<u32>>,
    pub valuation: String,
    pub pass: bool,
}

/// `unit^{re} sigma(a_i)` against `X(w delta (alpha_i))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentRow {
    pub index: usize,
    pub lhs: Vec<u32>,
    pub rhs: Vec<u32>,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericityReport {
    pub coroot_rows: Vec<CorootRow>,
    pub descent_rows: Vec<DescentRow>,
    pub notes: Vec<String>,
    pub verdict: bool,
}

impl GenericityReport {
    fn recompute(&mut self, structural_ok: bool) {
        self.verdict = structural_ok
            && self.coroot_rows.iter().all(|r| r.pass)
            && self.descent_rows.iter().all(|r| r.pass);
    }

    pub fn failing_coroots(&self) -> impl Iterator<Item = &CorootRow> {
        self.coroot_rows.iter().filter(|r| !r.pass)
    }

    pub fn failing_descent(&self) -> impl Iterator<Item = &DescentRow> {
        self.descent_rows.iter().filter(|r| !r.pass)
    }
}

/// Checks that `w delta` is elliptic of order dividing `[E:F]` and that
/// the functional commutes with the Galois generator on every simple coroot.
pub fn verify_galois_descent(d: &ZeroToralDatum) -> GenericityReport {
    let k = d.ext().residue();
    let action = d.twisted_action();
    let mut notes = Vec::new();
    let elliptic = action.is_elliptic();
    if !elliptic {
        notes.push("w delta has a nonzero fixed vector; torus is not elliptic".to_string());
    }
    let degree = d.ext().degree() as u64;
    let periodic = action.pow(degree).is_identity();
    if !periodic {
        notes.push(format!("(w delta)^{degree} is not the identity"));
    }
    let unit_power = match d.ext().kind() {
        ExtensionKind::Unramified => k.one(),
        _ => k.pow(
            d.ext().unit(),
            d.basis_exponent()
                .rem_euclid(d.ext().ramification_index() as i64) as u128,
        ),
    };
    let a = d.coords();
    let descent_rows = (0..a.len())
        .map(|i| {
            let lhs = k.mul(&unit_power, &k.frobenius(&a[i], 1));
            let rhs = action
                .column(i)
                .iter()
                .zip(a)
                .fold(k.zero(), |acc, (&l, x)| k.add(&acc, &k.scale_int(l, x)));
            DescentRow {
                index: i + 1,
                pass: lhs == rhs,
                lhs: lhs.coeffs().to_vec(),
                rhs: rhs.coeffs().to_vec(),
            }
        })
        .collect();
    let mut report = GenericityReport {
        coroot_rows: Vec::new(),
        descent_rows,
        notes,
        verdict: false,
    };
    report.recompute(elliptic && periodic);
    report
}

/// Evaluates `X` on every coroot through leading-term arithmetic; a
/// cancelled or zero leading term is a failure.
pub fn verify_genericity(d: &ZeroToralDatum) -> GenericityReport {
    let k = d.ext().residue();
    let rs = d.root_system();
    let terms = d.coord_terms();
    let target = Rational::from_integer(0);
    let coroot_rows: Vec<CorootRow> = rs
        .coroots()
        .iter()
        .map(|c| {
            let empty = TameLeadingTerm {
                valuation: Rational::from_integer(i64::MAX / 4),
                residue: None,
            };
            let sum = c
                .expansion
                .iter()
                .zip(&terms)
                .filter(|(&l, _)| l != 0)
                .fold(empty, |acc, (&l, t)| acc.add(&t.scale_int(l, k), k));
            let pass = !sum.is_unknown() && sum.valuation == target;
            CorootRow {
                expansion: c.expansion.clone(),
                residue: sum
                    .residue
                    .as_ref()
                    .map(|r: &FieldElement| r.coeffs().to_vec()),
                valuation: format_rational(sum.valuation - d.depth()),
                pass,
            }
        })
        .collect();
    let failures = coroot_rows.iter().filter(|r| !r.pass).count();
    let mut notes = Vec::new();
    if failures > 0 {
        notes.push(format!("{failures} coroots with valuation above -r"));
    }
    let mut report = GenericityReport {
        coroot_rows,
        descent_rows: Vec::new(),
        notes,
        verdict: false,
    };
    report.recompute(true);
    report
}

/// Both halves in one report.
pub fn verify(d: &ZeroToralDatum) -> GenericityReport {
    let descent = verify_galois_descent(d);
    let generic = verify_genericity(d);
    let structural_ok = descent.notes.is_empty();
    let mut notes = descent.notes;
    notes.extend(generic.notes);
    let mut report = GenericityReport {
        coroot_rows: generic.coroot_rows,
        descent_rows: descent.descent_rows,
        notes,
        verdict: false,
    };
    report.recompute(structural_ok);
    report
}
