use std::fmt;

/// Finite types over the naturals: `O` and `(-> A B)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FinType {
    Base,
    Arrow(Box<FinType>, Box<FinType>),
}

impl FinType {
    pub fn arrow(a: FinType, b: FinType) -> FinType {
        FinType::Arrow(Box::new(a), Box::new(b))
    }

    /// `O -> O`
    pub fn one() -> FinType {
        FinType::arrow(FinType::Base, FinType::Base)
    }

    /// `(O -> O) -> O`
    pub fn two() -> FinType {
        FinType::arrow(FinType::one(), FinType::Base)
    }

    /// `a1 -> ... -> an -> ret`
    pub fn curried(args: &[FinType], ret: FinType) -> FinType {
        args.iter()
            .rev()
            .fold(ret, |acc, a| FinType::arrow(a.clone(), acc))
    }

    pub fn is_base(&self) -> bool {
        matches!(self, FinType::Base)
    }

    /// Splits into argument types and the final result type.
    pub fn uncurry(&self) -> (Vec<&FinType>, &FinType) {
        let mut args = Vec::new();
        let mut cur = self;
        while let FinType::Arrow(a, b) = cur {
            args.push(a.as_ref());
            cur = b;
        }
        (args, cur)
    }

    /// Type level: `O` is 0, `(-> A B)` is `max(level(A) + 1, level(B))`.
    pub fn level(&self) -> usize {
        match self {
            FinType::Base => 0,
            FinType::Arrow(a, b) => (a.level() + 1).max(b.level()),
        }
    }

    pub fn arity(&self) -> usize {
        self.uncurry().0.len()
    }
}

impl fmt::Display for FinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FinType::Base => write!(f, "O"),
            FinType::Arrow(a, b) => write!(f, "(-> {} {})", a, b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levels() {
        assert_eq!(FinType::Base.level(), 0);
        assert_eq!(FinType::one().level(), 1);
        assert_eq!(FinType::two().level(), 2);
        assert_eq!(FinType::arrow(FinType::Base, FinType::one()).level(), 1);
    }

    #[test]
    fn curry_roundtrip() {
        let t = FinType::curried(&[FinType::one(), FinType::Base], FinType::Base);
        assert_eq!(t.to_string(), "(-> (-> O O) (-> O O))");
        let (args, ret) = t.uncurry();
        assert_eq!(args.len(), 2);
        assert!(ret.is_base());
    }
}
