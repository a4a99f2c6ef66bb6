use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;
use std::hash::Hash;

use crate::{Error, Result};

/// Interned memory symbol.
pub type Sym = u32;

/// Bidirectional map between symbol names and dense ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolTable {
    names: Vec<String>,
    ids: BTreeMap<String, Sym>,
}

impl SymbolTable {
    pub fn from_names<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut t = SymbolTable::default();
        for name in names {
            let name = name.into();
            if t.ids.contains_key(&name) {
                return Err(Error::structure(format!("duplicate symbol name {name:?}")));
            }
            t.intern(&name);
        }
        Ok(t)
    }

    /// Id of `name`, adding it if new.
    pub fn intern(&mut self, name: &str) -> Sym {
        if let Some(&s) = self.ids.get(name) {
            return s;
        }
        let s = self.names.len() as Sym;
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), s);
        s
    }

    /// A new symbol whose name starts with `stem` and is not yet taken.
    pub fn fresh(&mut self, stem: &str) -> Sym {
        if !self.ids.contains_key(stem) {
            return self.intern(stem);
        }
        let mut k = 1;
        loop {
            let name = format!("{stem}'{k}");
            if !self.ids.contains_key(&name) {
                return self.intern(&name);
            }
            k += 1;
        }
    }

    pub fn get(&self, name: &str) -> Option<Sym> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, s: Sym) -> &str {
        &self.names[s as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Operation carried by a program edge.
pub trait MemoryOp: Copy + Eq + Hash + Debug {
    /// Document kind used by the interchange format.
    const KIND: &'static str;

    fn nop() -> Self;
    fn is_nop(&self) -> bool;
    fn symbol(&self) -> Option<Sym>;

    /// Whether a whole operation sequence is realizable in this memory model.
    fn seq_realizable(ops: &[Self]) -> bool;

    /// Textual form, e.g. `push:a`.
    fn label(&self, symbols: &SymbolTable) -> String;

    fn parse_label(text: &str, symbols: &SymbolTable) -> Result<Self>;
}

/// Plain ABP edges carry no operation.
impl MemoryOp for () {
    const KIND: &'static str = "abp";

    fn nop() -> Self {}

    fn is_nop(&self) -> bool {
        true
    }

    fn symbol(&self) -> Option<Sym> {
        None
    }

    fn seq_realizable(_: &[Self]) -> bool {
        true
    }

    fn label(&self, _: &SymbolTable) -> String {
        "nop".into()
    }

    fn parse_label(text: &str, _: &SymbolTable) -> Result<Self> {
        match text {
            "nop" => Ok(()),
            _ => Err(Error::Invalid(format!("operation {text:?} is not allowed in an ABP"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StackOp {
    Push(Sym),
    Pop(Sym),
    Nop,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RamOp {
    Write(Sym),
    Delete(Sym),
    Nop,
}

fn parse_sym(text: &str, name: &str, symbols: &SymbolTable) -> Result<Sym> {
    symbols
        .get(name)
        .ok_or_else(|| Error::Invalid(format!("operation {text:?} names an undeclared symbol")))
}

impl MemoryOp for StackOp {
    const KIND: &'static str = "sbp";

    fn nop() -> Self {
        StackOp::Nop
    }

    fn is_nop(&self) -> bool {
        matches!(self, StackOp::Nop)
    }

    fn symbol(&self) -> Option<Sym> {
        match *self {
            StackOp::Push(s) | StackOp::Pop(s) => Some(s),
            StackOp::Nop => None,
        }
    }

    fn seq_realizable(ops: &[Self]) -> bool {
        stack_seq_realizable(ops)
    }

    fn label(&self, symbols: &SymbolTable) -> String {
        match *self {
            StackOp::Push(s) => format!("push:{}", symbols.name(s)),
            StackOp::Pop(s) => format!("pop:{}", symbols.name(s)),
            StackOp::Nop => "nop".into(),
        }
    }

    fn parse_label(text: &str, symbols: &SymbolTable) -> Result<Self> {
        match text.split_once(':') {
            Some(("push", name)) => Ok(StackOp::Push(parse_sym(text, name, symbols)?)),
            Some(("pop", name)) => Ok(StackOp::Pop(parse_sym(text, name, symbols)?)),
            None if text == "nop" => Ok(StackOp::Nop),
            _ => Err(Error::Invalid(format!("operation {text:?} is not a stack operation"))),
        }
    }
}

impl MemoryOp for RamOp {
    const KIND: &'static str = "rabp";

    fn nop() -> Self {
        RamOp::Nop
    }

    fn is_nop(&self) -> bool {
        matches!(self, RamOp::Nop)
    }

    fn symbol(&self) -> Option<Sym> {
        match *self {
            RamOp::Write(s) | RamOp::Delete(s) => Some(s),
            RamOp::Nop => None,
        }
    }

    fn seq_realizable(ops: &[Self]) -> bool {
        ram_seq_realizable(ops)
    }

    fn label(&self, symbols: &SymbolTable) -> String {
        match *self {
            RamOp::Write(s) => format!("write:{}", symbols.name(s)),
            RamOp::Delete(s) => format!("delete:{}", symbols.name(s)),
            RamOp::Nop => "nop".into(),
        }
    }

    fn parse_label(text: &str, symbols: &SymbolTable) -> Result<Self> {
        match text.split_once(':') {
            Some(("write", name)) => Ok(RamOp::Write(parse_sym(text, name, symbols)?)),
            Some(("delete", name)) => Ok(RamOp::Delete(parse_sym(text, name, symbols)?)),
            None if text == "nop" => Ok(RamOp::Nop),
            _ => Err(Error::Invalid(format!("operation {text:?} is not a memory operation"))),
        }
    }
}

/// Stack simulation: pops must match the top symbol, the stack must never
/// underflow and must be empty at the end.
pub fn stack_seq_realizable(ops: &[StackOp]) -> bool {
    let mut stack = Vec::new();
    for op in ops {
        match *op {
            StackOp::Push(s) => stack.push(s),
            StackOp::Pop(s) => {
                if stack.pop() != Some(s) {
                    return false;
                }
            }
            StackOp::Nop => {}
        }
    }
    stack.is_empty()
}

/// Multiset simulation: every delete needs an earlier unmatched write of the
/// same symbol, and all writes must be deleted by the end.
pub fn ram_seq_realizable(ops: &[RamOp]) -> bool {
    let mut counts: HashMap<Sym, i64> = HashMap::new();
    for op in ops {
        match *op {
            RamOp::Write(s) => *counts.entry(s).or_insert(0) += 1,
            RamOp::Delete(s) => {
                let c = counts.entry(s).or_insert(0);
                if *c == 0 {
                    return false;
                }
                *c -= 1;
            }
            RamOp::Nop => {}
        }
    }
    counts.values().all(|&c| c == 0)
}
