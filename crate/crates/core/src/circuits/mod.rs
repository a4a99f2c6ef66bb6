//! Arithmetic circuits: DAGs of input, sum and product gates.

mod random;

pub use random::random_md_circuit;

use crate::algebra::{Evaluable, ExpandSmall, Ring, SparsePoly, Symbolic, Valuation, Weight};
use crate::{Error, Result};

/// Gate of an arithmetic circuit. Product gates always have fanin two.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    Input(Weight),
    Sum(Vec<usize>),
    Prod([usize; 2]),
}

impl Gate {
    pub fn children(&self) -> &[usize] {
        match self {
            Gate::Input(_) => &[],
            Gate::Sum(c) => c,
            Gate::Prod(c) => c,
        }
    }

    pub fn is_input(&self) -> bool {
        matches!(self, Gate::Input(_))
    }
}

/// Validated arithmetic circuit with a single output gate.
///
/// Gate indices are positions in `gates`; construction checks that every
/// child index exists, that the graph is acyclic and that the output is the
/// unique sink. In strict mode sums have fanin exactly two; the
/// semi-unbounded flag admits sums of any positive fanin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    gates: Vec<Gate>,
    output: usize,
    semi_unbounded: bool,
    order: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CircuitStats {
    pub size: usize,
    pub depth: usize,
    pub formal_degree: u64,
}

impl Circuit {
    pub fn new(gates: Vec<Gate>, output: usize, semi_unbounded: bool) -> Result<Self> {
        let n = gates.len();
        if output >= n {
            return Err(Error::structure(format!(
                "output gate {output} is not among the {n} gates"
            )));
        }
        let mut parents = vec![0usize; n];
        for (g, gate) in gates.iter().enumerate() {
            if let Gate::Sum(children) = gate {
                let ok = if semi_unbounded {
                    !children.is_empty()
                } else {
                    children.len() == 2
                };
                if !ok {
                    return Err(Error::structure(format!(
                        "sum gate {g} has fanin {} (semi-unbounded: {semi_unbounded})",
                        children.len()
                    )));
                }
            }
            for &c in gate.children() {
                if c >= n {
                    return Err(Error::structure(format!(
                        "gate {g} references missing child {c}"
                    )));
                }
                parents[c] += 1;
            }
        }
        if parents[output] != 0 {
            return Err(Error::structure(format!(
                "output gate {output} feeds another gate"
            )));
        }
        if let Some(g) = (0..n).find(|&g| g != output && parents[g] == 0) {
            return Err(Error::structure(format!(
                "gate {g} is a second sink besides output {output}"
            )));
        }
        let order = topological_order(&gates)?;
        Ok(Circuit {
            gates,
            output,
            semi_unbounded,
            order,
        })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, g: usize) -> &Gate {
        &self.gates[g]
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn is_semi_unbounded(&self) -> bool {
        self.semi_unbounded
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    /// Gates with every child listed before its parents.
    pub fn topological_order(&self) -> &[usize] {
        &self.order
    }

    pub fn max_var(&self) -> u32 {
        self.gates
            .iter()
            .map(|g| match g {
                Gate::Input(w) => w.var_index(),
                _ => 0,
            })
            .max()
            .unwrap_or(0)
    }

    /// Values of all gates, in gate-index order.
    pub fn eval_all<R: Ring, V: Valuation<R>>(&self, val: &V) -> Vec<R> {
        let mut values: Vec<Option<R>> = vec![None; self.gates.len()];
        for &g in &self.order {
            let v = match &self.gates[g] {
                Gate::Input(w) => w.value(val),
                Gate::Sum(children) => {
                    let mut acc = R::zero();
                    for &c in children {
                        acc.add_assign(values[c].as_ref().expect("topological order"));
                    }
                    acc
                }
                Gate::Prod([a, b]) => {
                    let (a, b) = (values[*a].as_ref(), values[*b].as_ref());
                    a.expect("topological order").mul(b.expect("topological order"))
                }
            };
            values[g] = Some(v);
        }
        values.into_iter().map(|v| v.expect("every gate visited")).collect()
    }

    /// Value of the output gate.
    pub fn eval<R: Ring, V: Valuation<R>>(&self, val: &V) -> R {
        self.eval_all(val).swap_remove(self.output)
    }

    /// Subcircuit membership bitsets, one per gate.
    fn subcircuit_sets(&self) -> Vec<BitSet> {
        let n = self.gates.len();
        let mut sets: Vec<BitSet> = vec![BitSet::new(n); n];
        for &g in &self.order {
            let mut s = BitSet::new(n);
            s.insert(g);
            for &c in self.gates[g].children() {
                s.union_with(&sets[c]);
            }
            sets[g] = s;
        }
        sets
    }

    /// First product gate whose two operand subcircuits intersect.
    pub fn first_shared_product(&self) -> Option<usize> {
        let sets = self.subcircuit_sets();
        self.order.iter().copied().find(|&g| match self.gates[g] {
            Gate::Prod([a, b]) => sets[a].intersects(&sets[b]),
            _ => false,
        })
    }

    pub fn is_multiplicatively_disjoint(&self) -> bool {
        self.first_shared_product().is_none()
    }

    pub fn is_skew(&self) -> bool {
        self.gates.iter().all(|g| match g {
            Gate::Prod([a, b]) => self.gates[*a].is_input() || self.gates[*b].is_input(),
            _ => true,
        })
    }

    /// Per-gate subcircuit sizes `|C_v|`.
    pub fn subcircuit_sizes(&self) -> Vec<usize> {
        self.subcircuit_sets().iter().map(BitSet::len).collect()
    }

    /// Per-gate formal degrees: constants 0, variables 1, sums take the
    /// maximum and products the sum of their children.
    pub fn formal_degrees(&self) -> Vec<u64> {
        let mut deg = vec![0u64; self.gates.len()];
        for &g in &self.order {
            deg[g] = match &self.gates[g] {
                Gate::Input(w) => w.degree(),
                Gate::Sum(c) => c.iter().map(|&c| deg[c]).max().unwrap_or(0),
                Gate::Prod([a, b]) => deg[*a].saturating_add(deg[*b]),
            };
        }
        deg
    }

    /// Per-gate depth: length of the longest path from an input gate.
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0usize; self.gates.len()];
        for &g in &self.order {
            depth[g] = self.gates[g]
                .children()
                .iter()
                .map(|&c| depth[c] + 1)
                .max()
                .unwrap_or(0);
        }
        depth
    }

    pub fn stats(&self) -> CircuitStats {
        CircuitStats {
            size: self.gates.len(),
            depth: self.depths()[self.output],
            formal_degree: self.formal_degrees()[self.output],
        }
    }

    /// Maximum fanin over product gates and over sum gates.
    pub fn max_fanins(&self) -> (usize, usize) {
        let mut prod = 0;
        let mut sum = 0;
        for g in &self.gates {
            match g {
                Gate::Prod(_) => prod = 2,
                Gate::Sum(c) => sum = sum.max(c.len()),
                Gate::Input(_) => {}
            }
        }
        (prod, sum)
    }
}

pub fn eval_circuit<R: Ring, V: Valuation<R>>(c: &Circuit, val: &V) -> R {
    c.eval(val)
}

pub fn is_multiplicatively_disjoint(c: &Circuit) -> bool {
    c.is_multiplicatively_disjoint()
}

pub fn is_skew(c: &Circuit) -> bool {
    c.is_skew()
}

pub fn circuit_stats(c: &Circuit) -> CircuitStats {
    c.stats()
}

impl Evaluable for Circuit {
    fn num_vars(&self) -> usize {
        self.max_var() as usize
    }

    fn degree_bound(&self) -> u64 {
        self.stats().formal_degree
    }

    fn evaluate<R: Ring, V: Valuation<R>>(&self, val: &V) -> Result<R> {
        Ok(self.eval(val))
    }
}

impl ExpandSmall for Circuit {
    fn expand_small(&self, max_terms: usize) -> Result<SparsePoly> {
        let mut values: Vec<Option<SparsePoly>> = vec![None; self.gates.len()];
        for &g in &self.order {
            let v = match &self.gates[g] {
                Gate::Input(w) => w.value(&Symbolic),
                Gate::Sum(children) => {
                    let mut acc = SparsePoly::zero();
                    for &c in children {
                        acc.add_assign(values[c].as_ref().expect("topological order"));
                    }
                    acc
                }
                Gate::Prod([a, b]) => values[*a]
                    .as_ref()
                    .expect("topological order")
                    .mul(values[*b].as_ref().expect("topological order")),
            };
            v.check_budget(max_terms)?;
            values[g] = Some(v);
        }
        Ok(values.swap_remove(self.output).expect("output visited"))
    }
}

fn topological_order(gates: &[Gate]) -> Result<Vec<usize>> {
    // Iterative DFS post-order; a gate seen again while on the stack is a cycle.
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let n = gates.len();
    let mut mark = vec![Mark::New; n];
    let mut order = Vec::with_capacity(n);
    for root in 0..n {
        if mark[root] != Mark::New {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        mark[root] = Mark::Open;
        while let Some(&mut (g, ref mut next)) = stack.last_mut() {
            let children = gates[g].children();
            if *next < children.len() {
                let c = children[*next];
                *next += 1;
                match mark[c] {
                    Mark::New => {
                        mark[c] = Mark::Open;
                        stack.push((c, 0));
                    }
                    Mark::Open => {
                        return Err(Error::structure(format!("cycle through gate {c}")));
                    }
                    Mark::Done => {}
                }
            } else {
                mark[g] = Mark::Done;
                order.push(g);
                stack.pop();
            }
        }
    }
    Ok(order)
}

/// Incremental circuit construction. `finish` keeps only gates reachable
/// from the output and renumbers them children-first.
#[derive(Default)]
pub struct CircuitBuilder {
    gates: Vec<Gate>,
    inputs: std::collections::HashMap<Weight, usize>,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Input gate for `w`, shared between all callers asking for the same label.
    pub fn input(&mut self, w: Weight) -> usize {
        if let Some(&g) = self.inputs.get(&w) {
            return g;
        }
        let g = self.push(Gate::Input(w));
        self.inputs.insert(w, g);
        g
    }

    pub fn constant(&mut self, c: i64) -> usize {
        self.input(Weight::Const(c))
    }

    pub fn push(&mut self, gate: Gate) -> usize {
        self.gates.push(gate);
        self.gates.len() - 1
    }

    pub fn prod(&mut self, a: usize, b: usize) -> usize {
        self.push(Gate::Prod([a, b]))
    }

    /// Single unbounded-fanin sum (zero constant when `terms` is empty).
    pub fn sum(&mut self, terms: Vec<usize>) -> usize {
        match terms.len() {
            0 => self.constant(0),
            1 => terms[0],
            _ => self.push(Gate::Sum(terms)),
        }
    }

    /// Balanced tree of fanin-2 sums.
    pub fn binary_sum(&mut self, terms: &[usize]) -> usize {
        match terms.len() {
            0 => self.constant(0),
            1 => terms[0],
            n => {
                let (l, r) = terms.split_at(n / 2);
                let l = self.binary_sum(l);
                let r = self.binary_sum(r);
                self.push(Gate::Sum(vec![l, r]))
            }
        }
    }

    /// Balanced tree of fanin-2 products (constant one when empty).
    pub fn product(&mut self, factors: &[usize]) -> usize {
        match factors.len() {
            0 => self.constant(1),
            1 => factors[0],
            n => {
                let (l, r) = factors.split_at(n / 2);
                let l = self.product(l);
                let r = self.product(r);
                self.prod(l, r)
            }
        }
    }

    pub fn finish(self, output: usize, semi_unbounded: bool) -> Result<Circuit> {
        let n = self.gates.len();
        let order = topological_order(&self.gates)?;
        let mut reachable = vec![false; n];
        reachable[output] = true;
        for &g in order.iter().rev() {
            if reachable[g] {
                for &c in self.gates[g].children() {
                    reachable[c] = true;
                }
            }
        }
        let mut new_id = vec![usize::MAX; n];
        let mut gates = Vec::new();
        for &g in &order {
            if !reachable[g] {
                continue;
            }
            new_id[g] = gates.len();
            gates.push(match &self.gates[g] {
                Gate::Input(w) => Gate::Input(*w),
                Gate::Sum(c) => Gate::Sum(c.iter().map(|&c| new_id[c]).collect()),
                Gate::Prod([a, b]) => Gate::Prod([new_id[*a], new_id[*b]]),
            });
        }
        Circuit::new(gates, new_id[output], semi_unbounded)
    }
}

/// Fixed-size bitset over gate indices.
#[derive(Clone, Debug)]
pub(crate) struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub(crate) fn new(n: usize) -> Self {
        BitSet {
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub(crate) fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub(crate) fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub(crate) fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub(crate) fn intersects(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub(crate) fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Assignment, Fp, Var};

    fn x(i: u32) -> Gate {
        Gate::Input(Weight::Var(Var(i)))
    }

    fn at(c: &Circuit, pt: &[u64]) -> Fp {
        c.eval(&Assignment::from_u64s(pt))
    }

    #[test]
    fn evaluation_examples() {
        let c = Circuit::new(vec![x(1)], 0, false).unwrap();
        assert_eq!(at(&c, &[5]), Fp::new(5));

        // Prod(X1, X1) shares its operand.
        let sq = Circuit::new(vec![x(1), Gate::Prod([0, 0])], 1, false).unwrap();
        assert_eq!(at(&sq, &[3]), Fp::new(9));

        let c = Circuit::new(
            vec![
                x(1),
                x(2),
                Gate::Prod([0, 1]),
                Gate::Input(Weight::Const(1)),
                Gate::Sum(vec![2, 3]),
            ],
            4,
            false,
        )
        .unwrap();
        assert_eq!(at(&c, &[2, 3]), Fp::new(7));
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(
            Circuit::new(vec![Gate::Sum(vec![0, 5])], 0, false),
            Err(Error::Structure(_))
        ));
        // 0 -> 1 -> 0 cycle
        let cyc = vec![Gate::Sum(vec![1, 2]), Gate::Sum(vec![0, 2]), x(1)];
        assert!(Circuit::new(cyc, 0, false).is_err());
        // fanin 3 only in semi-unbounded mode
        let wide = vec![x(1), x(2), x(3), Gate::Sum(vec![0, 1, 2])];
        assert!(Circuit::new(wide.clone(), 3, false).is_err());
        assert!(Circuit::new(wide, 3, true).is_ok());
        // dangling second sink
        assert!(Circuit::new(vec![x(1), x(2)], 1, false).is_err());
    }

    #[test]
    fn disjointness_predicate() {
        // A formula is always disjoint.
        let tree = Circuit::new(vec![x(1), x(2), Gate::Prod([0, 1])], 2, false).unwrap();
        assert!(tree.is_multiplicatively_disjoint());
        let sq = Circuit::new(vec![x(1), Gate::Prod([0, 0])], 1, false).unwrap();
        assert!(!sq.is_multiplicatively_disjoint());
        // g = X1 * X2 reused twice under a sum only.
        let shared_sum = Circuit::new(
            vec![x(1), x(2), Gate::Prod([0, 1]), Gate::Sum(vec![2, 2])],
            3,
            false,
        )
        .unwrap();
        assert!(shared_sum.is_multiplicatively_disjoint());
        // ... but a product over two sums that both contain X2 is not.
        let shared = Circuit::new(
            vec![
                x(1),
                x(2),
                x(3),
                Gate::Sum(vec![0, 1]),
                Gate::Sum(vec![1, 2]),
                Gate::Prod([3, 4]),
            ],
            5,
            false,
        )
        .unwrap();
        assert!(!shared.is_multiplicatively_disjoint());
        assert!(!shared.is_skew());
    }

    #[test]
    fn skew_predicate() {
        let no_prod = Circuit::new(vec![x(1), x(2), Gate::Sum(vec![0, 1])], 2, false).unwrap();
        assert!(no_prod.is_skew());
        let skew = Circuit::new(
            vec![x(1), x(2), x(3), Gate::Sum(vec![1, 2]), Gate::Prod([0, 3])],
            4,
            false,
        )
        .unwrap();
        assert!(skew.is_skew());
    }

    #[test]
    fn stats_examples() {
        let single = Circuit::new(vec![x(1)], 0, false).unwrap();
        assert_eq!(
            single.stats(),
            CircuitStats {
                size: 1,
                depth: 0,
                formal_degree: 1
            }
        );
        let p = Circuit::new(vec![x(1), x(2), Gate::Prod([0, 1])], 2, false).unwrap();
        assert_eq!(p.stats().formal_degree, 2);
        let tree = Circuit::new(
            vec![
                x(1),
                x(2),
                x(3),
                x(4),
                Gate::Prod([0, 1]),
                Gate::Prod([2, 3]),
                Gate::Prod([4, 5]),
            ],
            6,
            false,
        )
        .unwrap();
        let s = tree.stats();
        assert_eq!((s.depth, s.formal_degree), (2, 4));
    }

    #[test]
    fn builder_prunes_and_orders() {
        let mut b = CircuitBuilder::new();
        let x1 = b.input(Weight::Var(Var(1)));
        let _unused = b.input(Weight::Var(Var(7)));
        let x2 = b.input(Weight::Var(Var(2)));
        assert_eq!(b.input(Weight::Var(Var(1))), x1);
        let p = b.product(&[x1, x2, x1]);
        let c = b.finish(p, false).unwrap();
        assert_eq!(c.size(), 4);
        assert_eq!(c.max_var(), 2);
        assert_eq!(at(&c, &[3, 5]), Fp::new(45));
    }

    #[test]
    fn expansion_agrees_with_evaluation() {
        let c = Circuit::new(
            vec![x(1), x(2), Gate::Sum(vec![0, 1]), Gate::Sum(vec![0, 1]), Gate::Prod([2, 3])],
            4,
            false,
        );
        // Product of two distinct sum gates over the same inputs: not disjoint, still evaluable.
        let c = c.unwrap();
        let poly = c.expand_small(100).unwrap();
        assert_eq!(poly.num_terms(), 3);
        let pt = Assignment::from_u64s(&[4, 9]);
        assert_eq!(poly.eval(&pt), c.eval(&pt));
        assert!(matches!(
            c.expand_small(2),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
