//! Polynomial-time evaluation of ABPs and SBPs, walk evaluation for relaxed
//! SBPs and bounded state exploration for RABPs.
//!
//! Every evaluator is generic over the coefficient ring, so the same code
//! computes field values, lane batches for identity testing and exact
//! symbolic polynomials.

mod rabp;
mod sbp;

pub use rabp::{eval_rabp, eval_rabp_with_budget, MemoryState, DEFAULT_STATE_BUDGET};
pub use sbp::{eval_sbp, eval_sbp_by_stack_states, eval_sbp_counted, SbpDpTable, SbpEvaluation};

use crate::algebra::{Evaluable, ExpandSmall, Ring, SparsePoly, Symbolic, Valuation};
use crate::programs::{Abp, BranchingProgram, Rabp, RelaxedSbp, Sbp};
use crate::transforms::unwind;
use crate::Result;

/// Sum over all s-t paths of the product of edge weights, by one pass in
/// topological order.
pub fn eval_abp<R: Ring, V: Valuation<R>>(g: &Abp, val: &V) -> R {
    let mut acc: Vec<R> = vec![R::zero(); g.n_vertices()];
    acc[g.source()] = R::one();
    for &v in g.topological_order() {
        if acc[v].is_zero() {
            continue;
        }
        let here = acc[v].clone();
        for &id in g.out_edges(v) {
            let e = g.edge(id);
            acc[e.to].add_assign(&here.mul(&e.weight.value(val)));
        }
    }
    acc.swap_remove(g.sink())
}

/// `f_{G,m}`: the summed weight of stack-realizable s-t walks of length `m`,
/// computed as [`eval_sbp`] on the `m`-step unwinding. For `m = 0` the only
/// candidate is the empty walk, present exactly when `s = t`.
pub fn eval_relaxed<R: Ring, V: Valuation<R>>(g: &RelaxedSbp, m: usize, val: &V) -> R {
    if m == 0 {
        return if g.source() == g.sink() { R::one() } else { R::zero() };
    }
    eval_sbp(&unwind(g, m).0, val)
}

/// A relaxed SBP paired with the walk length that selects its polynomial.
#[derive(Clone, Copy, Debug)]
pub struct RelaxedAt<'a> {
    pub g: &'a RelaxedSbp,
    pub m: usize,
}

fn expand<T: Evaluable + ?Sized>(obj: &T, max_terms: usize) -> Result<SparsePoly> {
    let p: SparsePoly = obj.evaluate(&Symbolic)?;
    p.check_budget(max_terms)?;
    Ok(p)
}

impl Evaluable for Abp {
    fn num_vars(&self) -> usize {
        self.max_var() as usize
    }

    fn degree_bound(&self) -> u64 {
        BranchingProgram::degree_bound(self)
    }

    fn evaluate<R: Ring, V: Valuation<R>>(&self, val: &V) -> Result<R> {
        Ok(eval_abp(self, val))
    }
}

impl Evaluable for Sbp {
    fn num_vars(&self) -> usize {
        self.max_var() as usize
    }

    fn degree_bound(&self) -> u64 {
        BranchingProgram::degree_bound(self)
    }

    fn evaluate<R: Ring, V: Valuation<R>>(&self, val: &V) -> Result<R> {
        Ok(eval_sbp(self, val))
    }
}

impl Evaluable for Rabp {
    fn num_vars(&self) -> usize {
        self.max_var() as usize
    }

    fn degree_bound(&self) -> u64 {
        BranchingProgram::degree_bound(self)
    }

    fn evaluate<R: Ring, V: Valuation<R>>(&self, val: &V) -> Result<R> {
        eval_rabp(self, val)
    }
}

impl Evaluable for RelaxedAt<'_> {
    fn num_vars(&self) -> usize {
        self.g.max_var() as usize
    }

    fn degree_bound(&self) -> u64 {
        self.m as u64
    }

    fn evaluate<R: Ring, V: Valuation<R>>(&self, val: &V) -> Result<R> {
        Ok(eval_relaxed(self.g, self.m, val))
    }
}

impl ExpandSmall for Abp {
    fn expand_small(&self, max_terms: usize) -> Result<SparsePoly> {
        expand(self, max_terms)
    }
}

impl ExpandSmall for Sbp {
    fn expand_small(&self, max_terms: usize) -> Result<SparsePoly> {
        expand(self, max_terms)
    }
}

impl ExpandSmall for Rabp {
    fn expand_small(&self, max_terms: usize) -> Result<SparsePoly> {
        expand(self, max_terms)
    }
}

impl ExpandSmall for RelaxedAt<'_> {
    fn expand_small(&self, max_terms: usize) -> Result<SparsePoly> {
        expand(self, max_terms)
    }
}
