//! Exact arithmetic behind toral supercuspidal data: root systems, finite
//! fields, generic elements and their descent, depth bookkeeping, a finite
//! model of mod-p^m congruences, and an SL2 cusp-form check.

pub mod arith;
pub mod congruence;
pub mod cuspcheck;
pub mod depthcalc;
pub mod ffield;
pub mod rootsys;
pub mod sweep;
pub mod toraldata;
