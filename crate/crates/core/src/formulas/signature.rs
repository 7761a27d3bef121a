use std::collections::BTreeMap;

use crate::kernel::{FinType, TypeEnv};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub ty: FinType,
    /// Depends on real arguments only through the reals they denote.
    pub respects_equality: bool,
}

/// Typed opaque constants available to formulas.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: BTreeMap<String, Symbol>,
}

/// Reals, partitions and binary sequences all live at `O -> O`.
pub fn real() -> FinType {
    FinType::one()
}

impl Signature {
    pub fn empty() -> Signature {
        Signature::default()
    }

    pub fn declare(&mut self, name: &str, ty: FinType, respects_equality: bool) {
        self.symbols.insert(name.to_string(), Symbol { ty, respects_equality });
    }

    pub fn with(mut self, name: &str, ty: FinType, respects_equality: bool) -> Signature {
        self.declare(name, ty, respects_equality);
        self
    }

    pub fn get(&self, name: &str) -> Option<&Symbol> {
        self.symbols.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.symbols.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.symbols.keys().map(String::as_str)
    }

    /// Real-analysis vocabulary used by the fixture corpus.
    pub fn analysis() -> Signature {
        let o = FinType::Base;
        let r = real();
        let rr = FinType::arrow(r.clone(), r.clone());
        let r2 = FinType::curried(&[r.clone(), r.clone()], r.clone());
        let cmp = FinType::curried(&[r.clone(), r.clone()], o.clone());
        let mut s = Signature::empty();
        for c in ["r0", "r1"] {
            s.declare(c, r.clone(), true);
        }
        for op in ["dist", "radd", "rsub", "rmul", "rmax", "rmin"] {
            s.declare(op, r2.clone(), true);
        }
        for op in ["rabs", "rneg", "mesh"] {
            s.declare(op, rr.clone(), true);
        }
        s.declare("rle", cmp.clone(), true);
        s.declare("rlt", cmp, true);
        s.declare("inv", FinType::arrow(o.clone(), r.clone()), true);
        s.declare("qr", FinType::arrow(o.clone(), r.clone()), true);
        s.declare("rb", FinType::arrow(FinType::one(), r.clone()), true);
        s.declare("rsum", FinType::curried(&[rr.clone(), r.clone()], r.clone()), true);
        s.declare("integ", FinType::curried(&[rr.clone(), r.clone()], r.clone()), true);
        s.declare("dq", FinType::curried(&[rr.clone(), r.clone(), r.clone()], r.clone()), true);
        s.declare("pow2", FinType::one(), true);
        s.declare("at", FinType::curried(&[r.clone(), o.clone()], o.clone()), false);
        s.declare("bar", FinType::curried(&[FinType::one(), o.clone()], o.clone()), false);
        s.declare("inC", FinType::arrow(FinType::two(), o), false);
        s
    }
}

impl TypeEnv for Signature {
    fn lookup(&self, name: &str) -> Option<FinType> {
        self.symbols.get(name).map(|s| s.ty.clone())
    }
}
