//! Reductions of the two application problems — orthogonal least-square
//! regression and the (un)balanced orthogonal Procrustes problem — onto the
//! quadratic problem, plus their closed-form special cases.

mod olsr;
mod procrustes;

pub use olsr::{olsr_reduce, olsr_solve, OlsrProblem, OlsrSolution};
pub use procrustes::{
    balanced_procrustes, uopp_reduce, uopp_solve, ProcrustesProblem, UoppReport,
};
