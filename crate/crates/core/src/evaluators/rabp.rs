use std::collections::BTreeMap;

use crate::algebra::{Ring, Valuation};
use crate::programs::{RamOp, Rabp};
use crate::{Error, Result};

/// Default limit on the number of (vertex, memory) states an RABP
/// evaluation may create.
pub const DEFAULT_STATE_BUDGET: usize = 1_000_000;

/// Memory content as a count per symbol id. Trailing zeros are trimmed so
/// equal multisets have equal keys.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MemoryState(Vec<u32>);

impl MemoryState {
    pub fn count(&self, s: u32) -> u32 {
        self.0.get(s as usize).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| c as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn write(&self, s: u32) -> Self {
        let mut c = self.0.clone();
        if c.len() <= s as usize {
            c.resize(s as usize + 1, 0);
        }
        c[s as usize] += 1;
        MemoryState(c)
    }

    fn delete(&self, s: u32) -> Option<Self> {
        if self.count(s) == 0 {
            return None;
        }
        let mut c = self.0.clone();
        c[s as usize] -= 1;
        while c.last() == Some(&0) {
            c.pop();
        }
        Some(MemoryState(c))
    }
}

/// Sum of the weights of all random-access-realizable s-t paths, with the
/// default state budget.
pub fn eval_rabp<R: Ring, V: Valuation<R>>(g: &Rabp, val: &V) -> Result<R> {
    eval_rabp_with_budget(g, val, DEFAULT_STATE_BUDGET)
}

/// Forward dynamic program over (vertex, memory) pairs in topological
/// order. Exact, but the number of memory states can grow exponentially.
pub fn eval_rabp_with_budget<R: Ring, V: Valuation<R>>(g: &Rabp, val: &V, budget: usize) -> Result<R> {
    let n = g.n_vertices();
    let alive = reaches_sink(g);
    let mut states: Vec<BTreeMap<MemoryState, R>> = vec![BTreeMap::new(); n];
    if !alive[g.source()] {
        return Ok(R::zero());
    }
    states[g.source()].insert(MemoryState::default(), R::one());
    let mut created = 1usize;
    for &v in g.topological_order() {
        let here = std::mem::take(&mut states[v]);
        if v == g.sink() {
            return Ok(here.get(&MemoryState::default()).cloned().unwrap_or_else(R::zero));
        }
        for (mem, value) in &here {
            for &id in g.out_edges(v) {
                let e = g.edge(id);
                if !alive[e.to] {
                    continue;
                }
                let next = match e.op {
                    RamOp::Write(s) => mem.write(s),
                    RamOp::Delete(s) => match mem.delete(s) {
                        Some(m) => m,
                        None => continue,
                    },
                    RamOp::Nop => mem.clone(),
                };
                let term = value.mul(&e.weight.value(val));
                let slot = &mut states[e.to];
                match slot.get_mut(&next) {
                    Some(x) => x.add_assign(&term),
                    None => {
                        created += 1;
                        if created > budget {
                            return Err(Error::BudgetExceeded {
                                what: "memory states",
                                limit: budget,
                            });
                        }
                        slot.insert(next, term);
                    }
                }
            }
        }
    }
    Ok(R::zero())
}

fn reaches_sink(g: &Rabp) -> Vec<bool> {
    let mut alive = vec![false; g.n_vertices()];
    alive[g.sink()] = true;
    for &v in g.topological_order().iter().rev() {
        if g.out_edges(v).iter().any(|&id| alive[g.edge(id).to]) {
            alive[v] = true;
        }
    }
    alive
}
