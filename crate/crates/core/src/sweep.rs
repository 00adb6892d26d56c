//! Batch build-and-verify over a grid of (type, p, q, n).

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::rootsys::{DiagramAutomorphism, RootSystemType};
use crate::toraldata::{
    build_generic_element, twist_datum, verify_galois_descent, verify_genericity, BuildOptions,
    CaseLabel, ZeroToralDatum,
};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum SweepError {
    #[error("the sweep grid is empty")]
    EmptyGrid,
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

fn default_primes_per_type() -> usize {
    2
}

fn default_q_powers() -> Vec<u32> {
    vec![1]
}

fn default_n_values() -> Vec<u32> {
    vec![1, 2]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub types: Vec<RootSystemType>,
    /// Take the smallest this-many primes above the Coxeter number.
    #[serde(default = "default_primes_per_type")]
    pub primes_per_type: usize,
    /// Explicit primes; when nonempty they replace the rule above.
    #[serde(default)]
    pub primes: Vec<u64>,
    /// Residue field sizes `q = p^f` for `f` in this list.
    #[serde(default = "default_q_powers")]
    pub q_powers: Vec<u32>,
    #[serde(default = "default_n_values")]
    pub n_values: Vec<u32>,
    #[serde(default)]
    pub ramified: bool,
    /// Also twist by `i = p^j u` and re-check genericity.
    #[serde(default)]
    pub twist: bool,
}

impl SweepConfig {
    /// Every irreducible type of rank at most `max_rank`, split.
    pub fn all_types(max_rank: usize) -> Self {
        Self {
            types: RootSystemType::all_up_to_rank(max_rank),
            primes_per_type: default_primes_per_type(),
            primes: Vec::new(),
            q_powers: default_q_powers(),
            n_values: default_n_values(),
            ramified: false,
            twist: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridPoint {
    #[serde(rename = "type")]
    pub ty: RootSystemType,
    pub p: u64,
    pub q: u64,
    pub n: u32,
}

/// Expands the grid; points with `p <= Cox` are dropped with a warning.
pub fn expand_grid(cfg: &SweepConfig) -> (Vec<GridPoint>, Vec<String>) {
    let mut points = Vec::new();
    let mut warnings = Vec::new();
    for &ty in &cfg.types {
        let cox = ty.coxeter_number();
        let primes: Vec<u64> = if cfg.primes.is_empty() {
            arith::primes_above(cox, cfg.primes_per_type)
        } else {
            cfg.primes.clone()
        };
        for p in primes {
            if p <= cox {
                warnings.push(format!(
                    "skipping {ty} at p = {p}: p must exceed Cox = {cox}"
                ));
                continue;
            }
            for &f in &cfg.q_powers {
                let Some(q) = arith::checked_pow(p as u128, f).filter(|&q| q <= u32::MAX as u128)
                else {
                    warnings.push(format!("skipping {ty} at q = {p}^{f}: too large"));
                    continue;
                };
                for &n in &cfg.n_values {
                    points.push(GridPoint {
                        ty,
                        p,
                        q: q as u64,
                        n,
                    });
                }
            }
        }
    }
    (points, warnings)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    #[serde(flatten)]
    pub point: GridPoint,
    pub case: Option<CaseLabel>,
    pub descent: bool,
    pub genericity: bool,
    /// Number of twists checked and whether all passed.
    pub twists: Option<(usize, bool)>,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub warnings: Vec<String>,
    pub failures: usize,
    pub pass: bool,
}

/// Twist exponents `p^j u` with `j < m` and `0 < u < p`, where
/// `m = floor((n + 1) / 2)` is the largest level with `2m - 1 <= n`.
pub fn twist_exponents(p: u64, n: u32) -> (u32, Vec<i64>) {
    let m = n.div_ceil(2);
    let ex = (0..m)
        .flat_map(|j| (1..p).map(move |u| (p as i64).pow(j) * u as i64))
        .collect();
    (m, ex)
}

fn check_twists(d: &ZeroToralDatum) -> (usize, bool) {
    let (m, ex) = twist_exponents(d.p(), d.n());
    let ok = ex
        .iter()
        .all(|&i| twist_datum(d, i, m, 1).map(|t| t.ok()).unwrap_or(false));
    (ex.len(), ok)
}

fn run_point(pt: &GridPoint, opts: BuildOptions, twist: bool) -> SweepRow {
    let delta = DiagramAutomorphism::identity(pt.ty.rank());
    match build_generic_element(pt.ty, &delta, pt.p, pt.q, pt.n, opts) {
        Ok(d) => {
            let descent = verify_galois_descent(&d).verdict;
            let genericity = verify_genericity(&d).verdict;
            let twists = twist.then(|| check_twists(&d));
            let pass = descent && genericity && twists.is_none_or(|t| t.1);
            SweepRow {
                point: pt.clone(),
                case: Some(d.case()),
                descent,
                genericity,
                twists,
                pass,
                error: None,
            }
        }
        Err(e) => SweepRow {
            point: pt.clone(),
            case: None,
            descent: false,
            genericity: false,
            twists: None,
            pass: false,
            error: Some(e.to_string()),
        },
    }
}

/// Runs every grid point on `jobs` worker threads. Rows come back in grid
/// order; the per-row wall times in milliseconds are returned separately so
/// that the report itself is reproducible.
pub fn run_sweep(cfg: &SweepConfig, jobs: usize) -> Result<(SweepReport, Vec<u128>), SweepError> {
    let (points, warnings) = expand_grid(cfg);
    if points.is_empty() {
        return Err(SweepError::EmptyGrid);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| SweepError::Pool(e.to_string()))?;
    let opts = BuildOptions {
        ramified: cfg.ramified,
    };
    let results: Vec<(SweepRow, u128)> = pool.install(|| {
        points
            .par_iter()
            .map(|pt| {
                let t = Instant::now();
                let row = run_point(pt, opts, cfg.twist);
                (row, t.elapsed().as_millis())
            })
            .collect()
    });
    let (rows, ms): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let failures = rows.iter().filter(|r| !r.pass).count();
    Ok((
        SweepReport {
            rows,
            warnings,
            failures,
            pass: failures == 0,
        },
        ms,
    ))
}

fn yes(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAIL"
    }
}

impl SweepReport {
    /// Aligned columns; `ms` adds a timing column.
    pub fn to_text(&self, ms: Option<&[u128]>) -> String {
        let mut out = String::new();
        let _ = write!(
            out,
            "{:<5} {:>5} {:>10} {:>2} {:<12} {:<7} {:<7} {:<9} {:<4}",
            "type", "p", "q", "n", "case", "descent", "generic", "twists", "pass"
        );
        if ms.is_some() {
            out.push_str("       ms");
        }
        out.push('\n');
        for (i, r) in self.rows.iter().enumerate() {
            let case = r.case.map_or("-".to_string(), |c| c.to_string());
            let tw = r
                .twists
                .map_or("-".to_string(), |(k, ok)| format!("{k} {}", yes(ok)));
            let _ = write!(
                out,
                "{:<5} {:>5} {:>10} {:>2} {:<12} {:<7} {:<7} {:<9} {:<4}",
                r.point.ty.to_string(),
                r.point.p,
                r.point.q,
                r.point.n,
                case,
                yes(r.descent),
                yes(r.genericity),
                tw,
                yes(r.pass)
            );
            if let Some(ms) = ms {
                let _ = write!(out, " {:>8}", ms[i]);
            }
            if let Some(e) = &r.error {
                let _ = write!(out, "  {e}");
            }
            out.push('\n');
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        let _ = writeln!(
            out,
            "{} points, {} failures",
            self.rows.len(),
            self.failures
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::Family;

    #[test]
    fn grid_and_small_sweep() {
        let mut cfg = SweepConfig::all_types(3);
        cfg.twist = true;
        let (pts, warn) = expand_grid(&cfg);
        assert!(warn.is_empty());
        assert!(pts.iter().all(|pt| pt.p > pt.ty.coxeter_number()));
        let (r1, _) = run_sweep(&cfg, 1).unwrap();
        let (r4, _) = run_sweep(&cfg, 4).unwrap();
        assert!(r1.pass, "{}", r1.to_text(None));
        assert_eq!(r1, r4);
        assert_eq!(r1.to_text(None), r4.to_text(None));
    }

    #[test]
    fn small_primes_are_skipped_and_empty_grid_rejected() {
        let g2 = RootSystemType::new(Family::G, 2).unwrap();
        let cfg = SweepConfig {
            types: vec![g2],
            primes: vec![5, 7],
            ..SweepConfig::all_types(0)
        };
        let (pts, warn) = expand_grid(&cfg);
        assert_eq!(pts.len(), 2);
        assert_eq!(warn.len(), 1);
        let empty = SweepConfig {
            types: vec![],
            ..cfg
        };
        assert_eq!(run_sweep(&empty, 1).unwrap_err(), SweepError::EmptyGrid);
    }

    #[test]
    fn twist_exponent_sets() {
        assert_eq!(twist_exponents(5, 1), (1, vec![1, 2, 3, 4]));
        let (m, ex) = twist_exponents(3, 3);
        assert_eq!(m, 2);
        assert_eq!(ex, vec![1, 2, 3, 6]);
    }
}
