//! Literal decomposition oracle for (gap) paths, used to certify that the
//! depth recursion counts every path exactly once.

use super::{GapDescription, GateIndex, PathDescription};
use crate::programs::{stack_seq_realizable, Sbp, StackOp};
use crate::{Error, Result};

/// Stack height (pushes minus pops) of the path `path` (edge ids of `g`)
/// when it first reaches `v`.
pub fn stack_height(g: &Sbp, path: &[usize], v: usize) -> Result<i64> {
    let mut height = 0i64;
    for &id in path {
        let e = g.edge(id);
        if e.from == v {
            return Ok(height);
        }
        match e.op {
            StackOp::Push(_) => height += 1,
            StackOp::Pop(_) => height -= 1,
            StackOp::Nop => {}
        }
        if e.to == v {
            return Ok(height);
        }
    }
    Err(Error::Invalid(format!("vertex {v} is not on the path")))
}

/// A concrete path, possibly with a gap.
///
/// `ops` is the glued operation sequence and `vertices` its `ops.len() + 1`
/// positions. With a gap at position `pos`, the path reaches `c =
/// vertices[pos]`, jumps over `j` edges and resumes at `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GappedPath {
    pub vertices: Vec<usize>,
    pub ops: Vec<StackOp>,
    pub gap: Option<Gap>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gap {
    pub pos: usize,
    pub d: usize,
    pub j: usize,
}

impl GappedPath {
    pub fn plain(vertices: Vec<usize>, ops: Vec<StackOp>) -> Self {
        assert_eq!(vertices.len(), ops.len() + 1, "one more vertex than operations");
        GappedPath { vertices, ops, gap: None }
    }

    /// Left part `a ~> c` and right part `d ~> b`, with a gap of length `j`.
    pub fn with_gap(left: (Vec<usize>, Vec<StackOp>), right: (Vec<usize>, Vec<StackOp>), j: usize) -> Self {
        let (mut vertices, mut ops) = left;
        assert_eq!(vertices.len(), ops.len() + 1, "one more vertex than operations");
        assert_eq!(right.0.len(), right.1.len() + 1, "one more vertex than operations");
        let pos = ops.len();
        let d = right.0[0];
        vertices.extend_from_slice(&right.0[1..]);
        ops.extend_from_slice(&right.1);
        GappedPath {
            vertices,
            ops,
            gap: Some(Gap { pos, d, j }),
        }
    }

    /// Total length, counting the gap.
    pub fn len(&self) -> usize {
        self.ops.len() + self.gap.map_or(0, |g| g.j)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The piece between glued positions `p <= q`.
    fn describe(&self, p: usize, q: usize) -> GateIndex {
        let a = self.vertices[p];
        match self.gap {
            Some(g) if p <= g.pos && g.pos <= q => GateIndex::Gap(GapDescription {
                a,
                c: self.vertices[g.pos],
                d: g.d,
                j: g.j,
                b: if q == g.pos { g.d } else { self.vertices[q] },
                i: q - p + g.j,
            }),
            _ => GateIndex::Plain(PathDescription {
                a,
                b: self.vertices[q],
                i: q - p,
            }),
        }
    }
}

/// A split of a (gap) path: `p1` is a realizable run that starts with a
/// block `push p2 pop` and continues with `p3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub p1: GateIndex,
    pub p2: GateIndex,
    pub p3: GateIndex,
    /// Glued positions: `p1` spans `start..end`, the block's pop is edge `pop`.
    pub start: usize,
    pub pop: usize,
    pub end: usize,
}

/// Every `(P1, P2, P3)` of `path` that satisfies the splitting conditions.
///
/// For a plain path of length `i`: `P2, P3 <= i / 2 < P1`. For a path with
/// a gap of measure `mu = i - j`: `P1` contains the gap, the piece of `P2`
/// and `P3` holding the gap has measure at most `mu / 2` and `P1` has
/// measure above `mu / 2`. With `closed`, `P1` must also be followed by a
/// pop or by the end of the path; without it the conditions are the bare
/// ones, under which a path can have several splits.
pub fn all_decompositions(path: &GappedPath, closed: bool) -> Vec<Decomposition> {
    let ops = &path.ops;
    let n = ops.len();
    let half = n / 2;
    let real = |a: usize, b: usize| stack_seq_realizable(&ops[a..b]);
    let mut out = Vec::new();
    for start in 0..n {
        let StackOp::Push(s) = ops[start] else { continue };
        for pop in start + 1..n {
            if ops[pop] != StackOp::Pop(s) || !real(start + 1, pop) {
                continue;
            }
            for end in pop + 1..=n {
                if !real(pop + 1, end) {
                    continue;
                }
                if closed && end < n && !matches!(ops[end], StackOp::Pop(_)) {
                    continue;
                }
                let (p2, p3, p1) = (pop - start - 1, end - pop - 1, end - start);
                let ok = match path.gap {
                    None => p2 <= half && p3 <= half && p1 > half,
                    Some(g) => {
                        let in_p2 = start < g.pos && g.pos <= pop;
                        let in_p3 = pop < g.pos && g.pos <= end;
                        p1 > half && ((in_p2 && p2 <= half) || (in_p3 && p3 <= half))
                    }
                };
                if ok {
                    out.push(Decomposition {
                        p1: path.describe(start, end),
                        p2: path.describe(start + 1, pop),
                        p3: path.describe(pop + 1, end),
                        start,
                        pop,
                        end,
                    });
                }
            }
        }
    }
    out
}

/// The unique closed decomposition of a realizable, nop-free (gap) path of
/// measure at least 2 whose gap, if any, is followed by a pop or the end.
pub fn decompose_oracle(path: &GappedPath) -> Result<Decomposition> {
    if path.ops.contains(&StackOp::Nop) {
        return Err(Error::Invalid("path contains nop edges".into()));
    }
    if !stack_seq_realizable(&path.ops) || path.ops.len() < 2 {
        return Err(Error::Invalid("path is not realizable with measure at least 2".into()));
    }
    if let Some(g) = path.gap {
        if g.pos < path.ops.len() && !matches!(path.ops[g.pos], StackOp::Pop(_)) {
            return Err(Error::Invalid("gap is not followed by a pop or the end".into()));
        }
    }
    let found = all_decompositions(path, true);
    match found.as_slice() {
        [one] => Ok(*one),
        _ => Err(Error::Invalid(format!("expected one decomposition, found {}", found.len()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Var, Weight};
    use crate::programs::{Edge, SymbolTable};

    const A: StackOp = StackOp::Push(0);
    const B: StackOp = StackOp::Push(1);
    const PA: StackOp = StackOp::Pop(0);
    const PB: StackOp = StackOp::Pop(1);

    fn line(ops: &[StackOp]) -> GappedPath {
        GappedPath::plain((0..=ops.len()).collect(), ops.to_vec())
    }

    #[test]
    fn heights_along_a_path() {
        let g = Sbp::new(
            5,
            (0..4)
                .map(|k| Edge::new(k, k + 1, Weight::Var(Var(1)), [A, B, PB, PA][k]))
                .collect(),
            0,
            4,
            SymbolTable::from_names(["a", "b"]).unwrap(),
        )
        .unwrap();
        let path = [0, 1, 2, 3];
        assert_eq!(stack_height(&g, &path, 0).unwrap(), 0);
        assert_eq!(stack_height(&g, &path, 2).unwrap(), 2);
        assert_eq!(stack_height(&g, &path, 4).unwrap(), 0);
        assert!(stack_height(&g, &path[..1], 3).is_err());
    }

    #[test]
    fn single_block() {
        let d = decompose_oracle(&line(&[A, PA])).unwrap();
        assert_eq!(d.p1, GateIndex::Plain(PathDescription { a: 0, b: 2, i: 2 }));
        assert_eq!(d.p2, GateIndex::Plain(PathDescription { a: 1, b: 1, i: 0 }));
        assert_eq!(d.p3, GateIndex::Plain(PathDescription { a: 2, b: 2, i: 0 }));
    }

    #[test]
    fn nested_block_splits_at_the_outer_pop() {
        let d = decompose_oracle(&line(&[A, B, PB, PA])).unwrap();
        assert_eq!(d.p1, GateIndex::Plain(PathDescription { a: 0, b: 4, i: 4 }));
        assert_eq!((d.start, d.pop, d.end), (0, 3, 4));
    }

    #[test]
    fn bare_conditions_are_ambiguous() {
        let flat = line(&[A, PA, A, PA, A, PA]);
        assert_eq!(all_decompositions(&flat, false).len(), 2);
        assert_eq!(all_decompositions(&flat, true).len(), 1);
    }

    #[test]
    fn gap_inside_the_first_block() {
        // push a | gap | pop a push b pop b, gap of length 4.
        let p = GappedPath::with_gap(((0..2).collect(), vec![A]), ((10..14).collect(), vec![PA, B, PB]), 4);
        assert_eq!(p.len(), 8);
        let d = decompose_oracle(&p).unwrap();
        assert!(matches!(d.p1, GateIndex::Gap(_)));
    }
}
