use std::fmt;

use thiserror::Error;

use super::ast::{Formula, Quant, Rel};
use super::signature::Signature;
use crate::kernel::{type_check, Const, FinType, Layered, Term, TypeEnv, TypeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("{0}")]
    Type(#[from] TypeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pos {
    line: usize,
    col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug)]
enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            _ => None,
        }
    }
}

fn err<T>(pos: Pos, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError::Syntax {
        line: pos.line,
        col: pos.col,
        message: message.into(),
    })
}

fn read_all(src: &str) -> Result<Vec<Sexp>, ParseError> {
    let mut stack: Vec<(Vec<Sexp>, Pos)> = vec![(Vec::new(), Pos { line: 1, col: 1 })];
    let mut line = 1;
    let mut col = 0;
    let mut chars = src.chars().peekable();
    let mut token = String::new();
    let mut token_pos = Pos { line, col };
    let flush = |token: &mut String, pos: Pos, stack: &mut Vec<(Vec<Sexp>, Pos)>| {
        if !token.is_empty() {
            stack.last_mut().unwrap().0.push(Sexp::Atom(std::mem::take(token), pos));
        }
    };
    while let Some(c) = chars.next() {
        col += 1;
        let here = Pos { line, col };
        match c {
            ';' => {
                flush(&mut token, token_pos, &mut stack);
                for c in chars.by_ref() {
                    if c == '\n' {
                        line += 1;
                        col = 0;
                        break;
                    }
                }
            }
            '(' => {
                flush(&mut token, token_pos, &mut stack);
                stack.push((Vec::new(), here));
            }
            ')' => {
                flush(&mut token, token_pos, &mut stack);
                if stack.len() < 2 {
                    return err(here, "unbalanced ')'");
                }
                let (items, p) = stack.pop().unwrap();
                stack.last_mut().unwrap().0.push(Sexp::List(items, p));
            }
            ':' => {
                flush(&mut token, token_pos, &mut stack);
                stack.last_mut().unwrap().0.push(Sexp::Atom(":".into(), here));
            }
            c if c.is_whitespace() => {
                flush(&mut token, token_pos, &mut stack);
                if c == '\n' {
                    line += 1;
                    col = 0;
                }
            }
            c => {
                if token.is_empty() {
                    token_pos = here;
                }
                token.push(c);
            }
        }
    }
    flush(&mut token, token_pos, &mut stack);
    if stack.len() != 1 {
        let (_, p) = stack.pop().unwrap();
        return err(p, "unclosed '('");
    }
    Ok(stack.pop().unwrap().0)
}

fn read_one(src: &str) -> Result<Sexp, ParseError> {
    let mut all = read_all(src)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => err(Pos { line: 1, col: 1 }, "empty input"),
        _ => err(all[1].pos(), "trailing input"),
    }
}

fn is_ident(s: &str) -> bool {
    const RESERVED: [&str; 20] = [
        "lam", "rec", "zero", "succ", "max", "st", "not", "and", "or", "implies", "approx", "forall", "exists",
        "forall-st", "exists-st", "forall-mono", "exists-mono", "=0", "<=0", "<=*",
    ];
    !s.is_empty() && s != ":" && s != "->" && !RESERVED.contains(&s) && !s.chars().all(|c| c.is_ascii_digit())
}

fn to_type(s: &Sexp) -> Result<FinType, ParseError> {
    match s {
        Sexp::Atom(a, _) if a == "O" => Ok(FinType::Base),
        Sexp::Atom(a, _) if a == "R" => Ok(super::signature::real()),
        Sexp::List(items, p) => match items.as_slice() {
            [Sexp::Atom(arrow, _), a, b] if arrow == "->" => Ok(FinType::arrow(to_type(a)?, to_type(b)?)),
            _ => err(*p, "expected (-> type type)"),
        },
        other => err(other.pos(), "expected a type"),
    }
}

fn binder(items: &[Sexp], p: Pos) -> Result<(String, FinType), ParseError> {
    match items {
        [Sexp::Atom(x, xp), Sexp::Atom(colon, _), ty, _] if colon == ":" => {
            if !is_ident(x) {
                return err(*xp, format!("'{}' cannot be a variable", x));
            }
            Ok((x.clone(), to_type(ty)?))
        }
        _ => err(p, "expected NAME : TYPE BODY"),
    }
}

fn to_term(s: &Sexp) -> Result<Term, ParseError> {
    match s {
        Sexp::Atom(a, p) => match a.as_str() {
            "zero" => Ok(Term::zero()),
            "succ" => Ok(Term::Const(Const::Succ)),
            "max" => Ok(Term::Const(Const::Max)),
            n if n.chars().all(|c| c.is_ascii_digit()) => n
                .parse()
                .map(Term::Num)
                .or_else(|_| err(*p, "numeral out of range")),
            x if is_ident(x) => Ok(Term::var(x)),
            other => err(*p, format!("unexpected '{}' in term", other)),
        },
        Sexp::List(items, p) => match items.first().and_then(Sexp::atom) {
            Some("lam") => {
                let (x, ty) = binder(&items[1..], *p)?;
                Ok(Term::lam(&x, ty, to_term(&items[4])?))
            }
            Some("rec") if items.len() == 2 => Ok(Term::Const(Const::Rec(to_type(&items[1])?))),
            _ if items.len() >= 2 => {
                let head = to_term(&items[0])?;
                let args = items[1..].iter().map(to_term).collect::<Result<Vec<_>, _>>()?;
                Ok(Term::apps(head, args))
            }
            _ => err(*p, "application needs at least one argument"),
        },
    }
}

struct FormulaReader<'a> {
    env: &'a dyn TypeEnv,
    scope: Vec<(String, FinType)>,
}

impl FormulaReader<'_> {
    fn check(&self, t: &Term) -> Result<FinType, ParseError> {
        let env = Layered {
            parent: self.env,
            local: self.scope.clone(),
        };
        Ok(type_check(t, &env)?)
    }

    fn expect(&self, t: &Term, ty: &FinType) -> Result<(), ParseError> {
        let found = self.check(t)?;
        if &found != ty {
            return Err(ParseError::Type(TypeError::TypeMismatch {
                location: t.to_string(),
                expected: ty.clone(),
                found,
            }));
        }
        Ok(())
    }

    fn formula(&mut self, s: &Sexp) -> Result<Formula, ParseError> {
        let Sexp::List(items, p) = s else {
            return err(s.pos(), "expected a formula");
        };
        let Some(head) = items.first().and_then(Sexp::atom) else {
            return err(*p, "expected a formula keyword");
        };
        let arity = |n: usize| -> Result<(), ParseError> {
            if items.len() != n + 1 {
                err(*p, format!("'{}' takes {} arguments", head, n))
            } else {
                Ok(())
            }
        };
        match head {
            "=0" | "<=0" => {
                arity(2)?;
                let (l, r) = (to_term(&items[1])?, to_term(&items[2])?);
                self.expect(&l, &FinType::Base)?;
                self.expect(&r, &FinType::Base)?;
                let rel = if head == "=0" { Rel::Eq0 } else { Rel::Leq0 };
                Ok(Formula::Atom(rel, l, r))
            }
            "<=*" => {
                arity(2)?;
                let (l, r) = (to_term(&items[1])?, to_term(&items[2])?);
                let ty = self.check(&l)?;
                self.expect(&r, &ty)?;
                Ok(Formula::Atom(Rel::LeqStar(ty), l, r))
            }
            "approx" => {
                arity(2)?;
                let (l, r) = (to_term(&items[1])?, to_term(&items[2])?);
                self.expect(&l, &super::signature::real())?;
                self.expect(&r, &super::signature::real())?;
                Ok(Formula::Approx(l, r))
            }
            "st" => {
                arity(1)?;
                let t = to_term(&items[1])?;
                self.check(&t)?;
                Ok(Formula::St(t))
            }
            "not" => {
                arity(1)?;
                Ok(Formula::not(self.formula(&items[1])?))
            }
            "and" | "or" | "implies" => {
                arity(2)?;
                let a = self.formula(&items[1])?;
                let b = self.formula(&items[2])?;
                Ok(match head {
                    "and" => Formula::and(a, b),
                    "or" => Formula::or(a, b),
                    _ => Formula::implies(a, b),
                })
            }
            q => match Quant::from_keyword(q) {
                Some(q) => {
                    arity(4)?;
                    let (x, ty) = binder(&items[1..], *p)?;
                    self.scope.push((x.clone(), ty.clone()));
                    let body = self.formula(&items[4]);
                    self.scope.pop();
                    Ok(Formula::quant(q, x, ty, body?))
                }
                None => err(*p, format!("unknown formula keyword '{}'", q)),
            },
        }
    }
}

pub fn parse_type(src: &str) -> Result<FinType, ParseError> {
    to_type(&read_one(src)?)
}

/// Parses a term without type checking it.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    to_term(&read_one(src)?)
}

pub fn parse_formula(src: &str, env: &dyn TypeEnv) -> Result<Formula, ParseError> {
    FormulaReader { env, scope: Vec::new() }.formula(&read_one(src)?)
}

/// A fixture file: `;! decl NAME : TYPE` lines followed by one formula.
#[derive(Clone, Debug)]
pub struct Document {
    pub signature: Signature,
    pub formula: Formula,
}

pub fn parse_document(src: &str, base: &Signature) -> Result<Document, ParseError> {
    let mut signature = base.clone();
    for (i, line) in src.lines().enumerate() {
        let Some(rest) = line.trim_start().strip_prefix(";! decl ") else { continue };
        let Some((name, ty)) = rest.split_once(':') else {
            return err(Pos { line: i + 1, col: 1 }, "expected ';! decl NAME : TYPE'");
        };
        let ty = parse_type(ty.trim()).map_err(|e| match e {
            ParseError::Syntax { message, .. } => ParseError::Syntax {
                line: i + 1,
                col: 1,
                message,
            },
            other => other,
        })?;
        signature.declare(name.trim(), ty, true);
    }
    let formula = parse_formula(src, &signature)?;
    Ok(Document { signature, formula })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_types() {
        assert_eq!(parse_type("(-> (-> O O) O)").unwrap(), FinType::two());
        assert!(parse_type("(-> O)").is_err());
    }

    #[test]
    fn infers_star_type_from_left() {
        let sig = Signature::analysis();
        let f = parse_formula("(forall f : (-> O O) (<=* f (lam n : O 1)))", &sig).unwrap();
        match f {
            Formula::Quant(_, _, _, b) => match *b {
                Formula::Atom(Rel::LeqStar(ty), ..) => assert_eq!(ty, FinType::one()),
                other => panic!("{}", other),
            },
            other => panic!("{}", other),
        }
    }

    #[test]
    fn comments_are_skipped() {
        let sig = Signature::empty();
        let f = parse_formula("; leading\n(forall x : O ; trailing\n (=0 x 0))", &sig).unwrap();
        assert_eq!(f.to_string(), "(forall x : O (=0 x 0))");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_formula("(forall x : O\n  (frob x 0))", &Signature::empty()) {
            Err(ParseError::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn unbound_variables_are_type_errors() {
        assert!(matches!(
            parse_formula("(=0 y 0)", &Signature::empty()),
            Err(ParseError::Type(TypeError::UnboundVariable(_)))
        ));
    }

    #[test]
    fn real_type_shorthand() {
        assert_eq!(parse_type("(-> R R)").unwrap().to_string(), "(-> (-> O O) (-> O O))");
    }

    #[test]
    fn declarations_extend_signature() {
        let doc = parse_document(";! decl x : (-> O O)\n(st x)", &Signature::empty()).unwrap();
        assert!(doc.signature.contains("x"));
    }
}
