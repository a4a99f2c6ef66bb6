use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{BitSet, Circuit, CircuitBuilder, Gate};
use crate::algebra::{Var, Weight};

/// Seeded random multiplicatively disjoint circuit over `X_1..X_{n_vars}`
/// with at most `n_gates` gates.
///
/// Gates are drawn one at a time. When a product's two operands would
/// share a gate, the right operand's whole subcircuit is copied first; if
/// the copy does not fit in the remaining budget a fresh input gate is used
/// instead. The output is the gate with the largest subcircuit (the latest
/// one on ties) and unreachable gates are dropped, so the result may be
/// smaller than `n_gates`.
pub fn random_md_circuit(n_vars: usize, n_gates: usize, seed: u64) -> Circuit {
    let n_vars = n_vars.max(1);
    let n_gates = n_gates.max(n_vars);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gates: Vec<Gate> = Vec::with_capacity(n_gates);
    let mut sets: Vec<BitSet> = Vec::with_capacity(n_gates);

    let push = |gates: &mut Vec<Gate>, sets: &mut Vec<BitSet>, gate: Gate| -> usize {
        let id = gates.len();
        let mut s = BitSet::new(n_gates);
        s.insert(id);
        for &c in gate.children() {
            s.union_with(&sets[c]);
        }
        gates.push(gate);
        sets.push(s);
        id
    };

    for i in 1..=n_vars {
        push(&mut gates, &mut sets, Gate::Input(Weight::Var(Var(i as u32))));
    }
    while gates.len() < n_gates {
        let remaining = n_gates - gates.len();
        let n = gates.len();
        // Prefer recent gates so the output tends to depend on most of the draw.
        let pick = |rng: &mut ChaCha8Rng| {
            if rng.random_bool(0.6) {
                rng.random_range(n.saturating_sub(4)..n)
            } else {
                rng.random_range(0..n)
            }
        };
        let kind = rng.random_range(0..10);
        if kind == 0 {
            let c = rng.random_range(-3i64..=3);
            push(&mut gates, &mut sets, Gate::Input(Weight::Const(c)));
            continue;
        }
        let a = pick(&mut rng);
        let b = pick(&mut rng);
        if kind < 5 {
            push(&mut gates, &mut sets, Gate::Sum(vec![a, b]));
            continue;
        }
        if !sets[a].intersects(&sets[b]) {
            push(&mut gates, &mut sets, Gate::Prod([a, b]));
            continue;
        }
        let copy_size = sets[b].len();
        if copy_size < remaining {
            let b_copy = copy_subcircuit(&mut gates, &mut sets, b, &push);
            push(&mut gates, &mut sets, Gate::Prod([a, b_copy]));
        } else if remaining >= 2 {
            let v = rng.random_range(1..=n_vars as u32);
            let leaf = push(&mut gates, &mut sets, Gate::Input(Weight::Var(Var(v))));
            push(&mut gates, &mut sets, Gate::Prod([a, leaf]));
        } else {
            push(&mut gates, &mut sets, Gate::Sum(vec![a, b]));
        }
    }

    let mut builder = CircuitBuilder::new();
    for g in &gates {
        builder.push(g.clone());
    }
    let output = (0..gates.len())
        .max_by_key(|&g| (sets[g].len(), g))
        .expect("at least one input gate");
    let c = builder
        .finish(output, false)
        .expect("generator only emits well-formed gates");
    debug_assert!(c.is_multiplicatively_disjoint());
    c
}

/// Appends a fresh copy of the subcircuit rooted at `root`; returns the copy's root.
fn copy_subcircuit(
    gates: &mut Vec<Gate>,
    sets: &mut Vec<BitSet>,
    root: usize,
    push: &impl Fn(&mut Vec<Gate>, &mut Vec<BitSet>, Gate) -> usize,
) -> usize {
    // Gate ids are created children-first, so ascending id order is topological.
    let members: Vec<usize> = (0..=root).filter(|&g| sets[root].contains(g)).collect();
    let mut map = std::collections::HashMap::new();
    for g in members {
        let gate = match &gates[g] {
            Gate::Input(w) => Gate::Input(*w),
            Gate::Sum(c) => Gate::Sum(c.iter().map(|c| map[c]).collect()),
            Gate::Prod([a, b]) => Gate::Prod([map[a], map[b]]),
        };
        let id = push(gates, sets, gate);
        map.insert(g, id);
    }
    map[&root]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_disjoint() {
        assert_eq!(random_md_circuit(2, 5, 42), random_md_circuit(2, 5, 42));
        for seed in 0..200 {
            let c = random_md_circuit(3, 30, seed);
            assert!(c.size() <= 30);
            assert!(c.is_multiplicatively_disjoint(), "seed {seed}");
        }
    }
}
