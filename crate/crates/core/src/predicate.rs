//! Rational expressions and the decidable predicate fragment used for
//! generator sets, relator constraints and subgroup descriptions.
//!
//! Predicates are boolean combinations of polynomial (in)equalities with
//! rational coefficients and the atoms "is an integer" / "is a natural".
//! Division is allowed in expressions; an atom whose expression divides by
//! zero is undefined, and an undefined predicate evaluates to false.

use std::fmt;
use std::ops;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::Rat;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Expr {
    Var(usize),
    Const(Rat),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
}

pub fn var(i: usize) -> Expr {
    Expr::Var(i)
}

pub fn cst(q: impl Into<Rat>) -> Expr {
    Expr::Const(q.into())
}

impl Expr {
    pub fn eval(&self, vars: &[Rat]) -> Option<Rat> {
        Some(match self {
            Expr::Var(i) => vars.get(*i)?.clone(),
            Expr::Const(q) => q.clone(),
            Expr::Add(a, b) => a.eval(vars)? + b.eval(vars)?,
            Expr::Sub(a, b) => a.eval(vars)? - b.eval(vars)?,
            Expr::Mul(a, b) => a.eval(vars)? * b.eval(vars)?,
            Expr::Div(a, b) => a.eval(vars)?.checked_div(&b.eval(vars)?).ok()?,
            Expr::Neg(a) => -a.eval(vars)?,
        })
    }

    /// Replaces `Var(i)` by `with[i]`.
    pub fn subst(&self, with: &[Expr]) -> Expr {
        match self {
            Expr::Var(i) => with.get(*i).cloned().unwrap_or(Expr::Var(*i)),
            Expr::Const(_) => self.clone(),
            Expr::Add(a, b) => Expr::Add(Box::new(a.subst(with)), Box::new(b.subst(with))),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.subst(with)), Box::new(b.subst(with))),
            Expr::Mul(a, b) => Expr::Mul(Box::new(a.subst(with)), Box::new(b.subst(with))),
            Expr::Div(a, b) => Expr::Div(Box::new(a.subst(with)), Box::new(b.subst(with))),
            Expr::Neg(a) => Expr::Neg(Box::new(a.subst(with))),
        }
    }

    pub fn vars(&self, out: &mut Vec<usize>) {
        match self {
            Expr::Var(i) => {
                if !out.contains(i) {
                    out.push(*i)
                }
            }
            Expr::Const(_) => {}
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            Expr::Neg(a) => a.vars(out),
        }
    }

    pub fn as_var(&self) -> Option<usize> {
        match self {
            Expr::Var(i) => Some(*i),
            _ => None,
        }
    }

    /// Every constant mentioned.
    pub fn constants(&self, out: &mut Vec<Rat>) {
        match self {
            Expr::Var(_) => {}
            Expr::Const(q) => out.push(q.clone()),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.constants(out);
                b.constants(out);
            }
            Expr::Neg(a) => a.constants(out),
        }
    }
}

macro_rules! expr_binop {
    ($tr:ident, $method:ident, $variant:ident) => {
        impl ops::$tr for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$variant(Box::new(self), Box::new(rhs))
            }
        }
    };
}

expr_binop!(Add, add, Add);
expr_binop!(Sub, sub, Sub);
expr_binop!(Mul, mul, Mul);
expr_binop!(Div, div, Div);

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(i) => write!(f, "v{i}"),
            Expr::Const(q) => write!(f, "{q}"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Div(a, b) => write!(f, "{a}/{b}"),
            Expr::Neg(a) => write!(f, "-{a}"),
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cmp {
    Eq,
    Ne,
    Ge,
    Gt,
    Le,
    Lt,
}

pub type DecideFn = dyn Fn(&[Rat]) -> bool + Send + Sync;

/// An opaque decision procedure. It is accepted wherever a predicate is, but
/// cannot be serialized.
#[derive(Clone)]
pub struct Callback(pub Arc<DecideFn>);

impl fmt::Debug for Callback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<callback>")
    }
}

impl PartialEq for Callback {
    fn eq(&self, other: &Callback) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SetPredicate {
    True,
    False,
    Cmp(Cmp, Expr, Expr),
    IsInteger(Expr),
    IsNatural(Expr),
    And(Vec<SetPredicate>),
    Or(Vec<SetPredicate>),
    Not(Box<SetPredicate>),
    #[serde(skip)]
    Callback(Callback),
}

pub fn eq(a: Expr, b: Expr) -> SetPredicate {
    SetPredicate::Cmp(Cmp::Eq, a, b)
}

pub fn ne(a: Expr, b: Expr) -> SetPredicate {
    SetPredicate::Cmp(Cmp::Ne, a, b)
}

pub fn ge(a: Expr, b: Expr) -> SetPredicate {
    SetPredicate::Cmp(Cmp::Ge, a, b)
}

pub fn gt(a: Expr, b: Expr) -> SetPredicate {
    SetPredicate::Cmp(Cmp::Gt, a, b)
}

pub fn lt(a: Expr, b: Expr) -> SetPredicate {
    SetPredicate::Cmp(Cmp::Lt, a, b)
}

pub fn le(a: Expr, b: Expr) -> SetPredicate {
    SetPredicate::Cmp(Cmp::Le, a, b)
}

pub fn is_integer(a: Expr) -> SetPredicate {
    SetPredicate::IsInteger(a)
}

pub fn is_natural(a: Expr) -> SetPredicate {
    SetPredicate::IsNatural(a)
}

pub fn and(ps: Vec<SetPredicate>) -> SetPredicate {
    SetPredicate::And(ps)
}

pub fn or(ps: Vec<SetPredicate>) -> SetPredicate {
    SetPredicate::Or(ps)
}

pub fn not(p: SetPredicate) -> SetPredicate {
    SetPredicate::Not(Box::new(p))
}

pub fn callback(f: impl Fn(&[Rat]) -> bool + Send + Sync + 'static) -> SetPredicate {
    SetPredicate::Callback(Callback(Arc::new(f)))
}

impl SetPredicate {
    pub fn eval(&self, vars: &[Rat]) -> bool {
        self.eval3(vars).unwrap_or(false)
    }

    /// Three-valued evaluation; `None` when an atom is undefined.
    fn eval3(&self, vars: &[Rat]) -> Option<bool> {
        match self {
            SetPredicate::True => Some(true),
            SetPredicate::False => Some(false),
            SetPredicate::Cmp(op, a, b) => {
                let (a, b) = (a.eval(vars)?, b.eval(vars)?);
                Some(match op {
                    Cmp::Eq => a == b,
                    Cmp::Ne => a != b,
                    Cmp::Ge => a >= b,
                    Cmp::Gt => a > b,
                    Cmp::Le => a <= b,
                    Cmp::Lt => a < b,
                })
            }
            SetPredicate::IsInteger(a) => Some(a.eval(vars)?.is_integer()),
            SetPredicate::IsNatural(a) => Some(a.eval(vars)?.is_natural()),
            SetPredicate::And(ps) => {
                let mut undefined = false;
                for p in ps {
                    match p.eval3(vars) {
                        Some(false) => return Some(false),
                        None => undefined = true,
                        Some(true) => {}
                    }
                }
                if undefined {
                    None
                } else {
                    Some(true)
                }
            }
            SetPredicate::Or(ps) => {
                let mut undefined = false;
                for p in ps {
                    match p.eval3(vars) {
                        Some(true) => return Some(true),
                        None => undefined = true,
                        Some(false) => {}
                    }
                }
                if undefined {
                    None
                } else {
                    Some(false)
                }
            }
            SetPredicate::Not(p) => p.eval3(vars).map(|b| !b),
            SetPredicate::Callback(f) => Some((f.0)(vars)),
        }
    }

    /// Replaces every variable by an expression.
    pub fn subst(&self, with: &[Expr]) -> SetPredicate {
        match self {
            SetPredicate::True | SetPredicate::False => self.clone(),
            SetPredicate::Cmp(op, a, b) => SetPredicate::Cmp(*op, a.subst(with), b.subst(with)),
            SetPredicate::IsInteger(a) => SetPredicate::IsInteger(a.subst(with)),
            SetPredicate::IsNatural(a) => SetPredicate::IsNatural(a.subst(with)),
            SetPredicate::And(ps) => SetPredicate::And(ps.iter().map(|p| p.subst(with)).collect()),
            SetPredicate::Or(ps) => SetPredicate::Or(ps.iter().map(|p| p.subst(with)).collect()),
            SetPredicate::Not(p) => SetPredicate::Not(Box::new(p.subst(with))),
            SetPredicate::Callback(f) => {
                // evaluate the substituted expressions, then call through
                let f = f.clone();
                let with = with.to_vec();
                callback(move |vars| {
                    let args: Option<Vec<Rat>> = with.iter().map(|e| e.eval(vars)).collect();
                    args.is_some_and(|a| (f.0)(&a))
                })
            }
        }
    }

    pub fn is_serializable(&self) -> bool {
        match self {
            SetPredicate::Callback(_) => false,
            SetPredicate::And(ps) | SetPredicate::Or(ps) => ps.iter().all(Self::is_serializable),
            SetPredicate::Not(p) => p.is_serializable(),
            _ => true,
        }
    }

    /// Every rational constant mentioned.
    pub fn constants(&self, out: &mut Vec<Rat>) {
        match self {
            SetPredicate::Cmp(_, a, b) => {
                a.constants(out);
                b.constants(out);
            }
            SetPredicate::IsInteger(a) | SetPredicate::IsNatural(a) => a.constants(out),
            SetPredicate::And(ps) | SetPredicate::Or(ps) => {
                ps.iter().for_each(|p| p.constants(out))
            }
            SetPredicate::Not(p) => p.constants(out),
            _ => {}
        }
    }

    /// Conjunction that drops trivially true parts.
    pub fn conj(parts: Vec<SetPredicate>) -> SetPredicate {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                SetPredicate::True => {}
                SetPredicate::And(qs) => flat.extend(qs),
                q => flat.push(q),
            }
        }
        match flat.len() {
            0 => SetPredicate::True,
            1 => flat.pop().unwrap(),
            _ => SetPredicate::And(flat),
        }
    }
}

impl fmt::Display for SetPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, ps: &[SetPredicate], sep: &str| {
            write!(f, "(")?;
            for (i, p) in ps.iter().enumerate() {
                if i > 0 {
                    write!(f, " {sep} ")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")
        };
        match self {
            SetPredicate::True => write!(f, "true"),
            SetPredicate::False => write!(f, "false"),
            SetPredicate::Cmp(op, a, b) => {
                let s = match op {
                    Cmp::Eq => "=",
                    Cmp::Ne => "!=",
                    Cmp::Ge => ">=",
                    Cmp::Gt => ">",
                    Cmp::Le => "<=",
                    Cmp::Lt => "<",
                };
                write!(f, "{a} {s} {b}")
            }
            SetPredicate::IsInteger(a) => write!(f, "int({a})"),
            SetPredicate::IsNatural(a) => write!(f, "nat({a})"),
            SetPredicate::And(ps) => join(f, ps, "and"),
            SetPredicate::Or(ps) => join(f, ps, "or"),
            SetPredicate::Not(p) => write!(f, "not {p}"),
            SetPredicate::Callback(_) => write!(f, "<callback>"),
        }
    }
}
