//! Expression trees over chart coordinates.
//!
//! Every scalar function handled by the toolkit (Hamiltonians, bivector
//! entries, invariant generators, covector components) is an [`Expression`].
//! Trees are immutable and cheaply cloneable; children are shared through
//! `Arc` so derivatives and substitutions reuse subtrees.

use std::fmt;
use std::sync::Arc;

use super::dual::Scalar;
use super::EvalError;

/// A node of an expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    /// Chart coordinate `x_i`.
    Coord(usize),
    /// Path parameter `t`; only meaningful for time-dependent covector specs.
    Time,
    Sum(Vec<Expression>),
    Product(Vec<Expression>),
    Pow(Expression, i32),
    Sqrt(Expression),
    Sin(Expression),
    Cos(Expression),
    Neg(Expression),
}

#[derive(Clone, PartialEq)]
pub struct Expression(Arc<Node>);

impl fmt::Debug for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expression({self})")
    }
}

impl Expression {
    pub fn node(&self) -> &Node {
        &self.0
    }

    fn from_node(node: Node) -> Self {
        Expression(Arc::new(node))
    }

    pub fn constant(c: f64) -> Self {
        Self::from_node(Node::Const(c))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn coord(i: usize) -> Self {
        Self::from_node(Node::Coord(i))
    }

    pub fn time() -> Self {
        Self::from_node(Node::Time)
    }

    pub fn as_const(&self) -> Option<f64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    /// n-ary sum; constants are folded and zero terms dropped.
    pub fn sum<I: IntoIterator<Item = Expression>>(terms: I) -> Self {
        let mut acc = 0.0;
        let mut rest = Vec::new();
        for t in terms {
            match t.node() {
                Node::Const(c) => acc += c,
                Node::Sum(inner) => {
                    for s in inner {
                        match s.as_const() {
                            Some(c) => acc += c,
                            None => rest.push(s.clone()),
                        }
                    }
                }
                _ => rest.push(t),
            }
        }
        if acc != 0.0 {
            rest.push(Self::constant(acc));
        }
        match rest.len() {
            0 => Self::zero(),
            1 => rest.pop().unwrap(),
            _ => Self::from_node(Node::Sum(rest)),
        }
    }

    /// n-ary product; constants are folded and a zero factor collapses it.
    pub fn product<I: IntoIterator<Item = Expression>>(factors: I) -> Self {
        let mut acc = 1.0;
        let mut rest = Vec::new();
        for f in factors {
            match f.node() {
                Node::Const(c) => acc *= c,
                Node::Product(inner) => {
                    for s in inner {
                        match s.as_const() {
                            Some(c) => acc *= c,
                            None => rest.push(s.clone()),
                        }
                    }
                }
                _ => rest.push(f),
            }
        }
        if acc == 0.0 {
            return Self::zero();
        }
        if rest.is_empty() {
            return Self::constant(acc);
        }
        if acc != 1.0 {
            rest.insert(0, Self::constant(acc));
        }
        if rest.len() == 1 {
            rest.pop().unwrap()
        } else {
            Self::from_node(Node::Product(rest))
        }
    }

    pub fn powi(&self, k: i32) -> Self {
        match (self.node(), k) {
            (_, 0) => Self::one(),
            (_, 1) => self.clone(),
            (Node::Const(c), _) => Self::constant(c.powi(k)),
            _ => Self::from_node(Node::Pow(self.clone(), k)),
        }
    }

    pub fn sqrt(&self) -> Self {
        Self::from_node(Node::Sqrt(self.clone()))
    }

    pub fn sin(&self) -> Self {
        Self::from_node(Node::Sin(self.clone()))
    }

    pub fn cos(&self) -> Self {
        Self::from_node(Node::Cos(self.clone()))
    }

    pub fn neg(&self) -> Self {
        match self.node() {
            Node::Const(c) => Self::constant(-c),
            Node::Neg(inner) => inner.clone(),
            _ => Self::from_node(Node::Neg(self.clone())),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::product([Self::constant(c), self.clone()])
    }

    pub fn add(&self, other: &Expression) -> Self {
        Self::sum([self.clone(), other.clone()])
    }

    pub fn sub(&self, other: &Expression) -> Self {
        Self::sum([self.clone(), other.neg()])
    }

    pub fn mul(&self, other: &Expression) -> Self {
        Self::product([self.clone(), other.clone()])
    }

    pub fn div(&self, other: &Expression) -> Self {
        Self::product([self.clone(), other.powi(-1)])
    }

    /// Largest coordinate index referenced, plus one.
    pub fn arity(&self) -> usize {
        match self.node() {
            Node::Const(_) | Node::Time => 0,
            Node::Coord(i) => i + 1,
            Node::Sum(ts) | Node::Product(ts) => ts.iter().map(|t| t.arity()).max().unwrap_or(0),
            Node::Pow(e, _) | Node::Sqrt(e) | Node::Sin(e) | Node::Cos(e) | Node::Neg(e) => e.arity(),
        }
    }

    pub fn depends_on_time(&self) -> bool {
        match self.node() {
            Node::Const(_) | Node::Coord(_) => false,
            Node::Time => true,
            Node::Sum(ts) | Node::Product(ts) => ts.iter().any(|t| t.depends_on_time()),
            Node::Pow(e, _) | Node::Sqrt(e) | Node::Sin(e) | Node::Cos(e) | Node::Neg(e) => {
                e.depends_on_time()
            }
        }
    }

    /// Evaluates over any [`Scalar`] (plain reals or forward-mode duals).
    pub fn eval_with<S: Scalar>(&self, x: &[S], t: f64) -> Result<S, EvalError> {
        let n = x.first().map(|s| s.ndim()).unwrap_or(0);
        self.eval_inner(x, t, n)
    }

    fn eval_inner<S: Scalar>(&self, x: &[S], t: f64, n: usize) -> Result<S, EvalError> {
        Ok(match self.node() {
            Node::Const(c) => S::constant(*c, n),
            Node::Coord(i) => x
                .get(*i)
                .cloned()
                .ok_or(EvalError::Dimension { expected: i + 1, found: x.len() })?,
            Node::Time => S::constant(t, n),
            Node::Sum(ts) => {
                let mut acc = S::constant(0.0, n);
                for term in ts {
                    acc = acc.add(&term.eval_inner(x, t, n)?);
                }
                acc
            }
            Node::Product(ts) => {
                let mut acc = S::constant(1.0, n);
                for term in ts {
                    acc = acc.mul(&term.eval_inner(x, t, n)?);
                }
                acc
            }
            Node::Pow(e, k) => {
                let base = e.eval_inner(x, t, n)?;
                if *k < 0 && base.value() == 0.0 {
                    return Err(EvalError::Domain {
                        node: self.to_string(),
                        reason: "negative power of zero",
                    });
                }
                base.powi(*k)
            }
            Node::Sqrt(e) => {
                let arg = e.eval_inner(x, t, n)?;
                if arg.value() < 0.0 || (arg.value() == 0.0 && S::CARRIES_DERIVATIVES) {
                    return Err(EvalError::Domain {
                        node: self.to_string(),
                        reason: if arg.value() < 0.0 {
                            "sqrt of negative argument"
                        } else {
                            "sqrt is not differentiable at zero"
                        },
                    });
                }
                arg.sqrt()
            }
            Node::Sin(e) => e.eval_inner(x, t, n)?.sin(),
            Node::Cos(e) => e.eval_inner(x, t, n)?.cos(),
            Node::Neg(e) => e.eval_inner(x, t, n)?.neg(),
        })
    }

    /// Plain real evaluation at chart point `x` and time `t`.
    pub fn eval_at(&self, x: &[f64], t: f64) -> Result<f64, EvalError> {
        self.eval_inner(x, t, 0)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        self.eval_at(x, 0.0)
    }

    /// Symbolic partial derivative with respect to coordinate `i`.
    pub fn derivative(&self, i: usize) -> Expression {
        match self.node() {
            Node::Const(_) | Node::Time => Self::zero(),
            Node::Coord(j) => {
                if *j == i {
                    Self::one()
                } else {
                    Self::zero()
                }
            }
            Node::Sum(ts) => Self::sum(ts.iter().map(|t| t.derivative(i))),
            Node::Product(fs) => {
                let mut terms = Vec::with_capacity(fs.len());
                for (k, f) in fs.iter().enumerate() {
                    let df = f.derivative(i);
                    if df.is_zero() {
                        continue;
                    }
                    let others = fs
                        .iter()
                        .enumerate()
                        .filter(|(m, _)| *m != k)
                        .map(|(_, g)| g.clone());
                    terms.push(Self::product(std::iter::once(df).chain(others)));
                }
                Self::sum(terms)
            }
            Node::Pow(e, k) => {
                let de = e.derivative(i);
                if de.is_zero() {
                    return Self::zero();
                }
                Self::product([Self::constant(*k as f64), e.powi(k - 1), de])
            }
            Node::Sqrt(e) => {
                let de = e.derivative(i);
                if de.is_zero() {
                    return Self::zero();
                }
                Self::product([Self::constant(0.5), de, self.powi(-1)])
            }
            Node::Sin(e) => Self::product([e.cos(), e.derivative(i)]),
            Node::Cos(e) => Self::product([e.sin().neg(), e.derivative(i)]),
            Node::Neg(e) => e.derivative(i).neg(),
        }
    }

    /// Symbolic derivative with respect to the time parameter.
    pub fn time_derivative(&self) -> Expression {
        match self.node() {
            Node::Const(_) | Node::Coord(_) => Self::zero(),
            Node::Time => Self::one(),
            Node::Sum(ts) => Self::sum(ts.iter().map(|t| t.time_derivative())),
            Node::Product(fs) => Self::sum(fs.iter().enumerate().map(|(k, f)| {
                Self::product(
                    std::iter::once(f.time_derivative())
                        .chain(fs.iter().enumerate().filter(|(m, _)| *m != k).map(|(_, g)| g.clone())),
                )
            })),
            Node::Pow(e, k) => {
                Self::product([Self::constant(*k as f64), e.powi(k - 1), e.time_derivative()])
            }
            Node::Sqrt(e) => Self::product([Self::constant(0.5), e.time_derivative(), self.powi(-1)]),
            Node::Sin(e) => Self::product([e.cos(), e.time_derivative()]),
            Node::Cos(e) => Self::product([e.sin().neg(), e.time_derivative()]),
            Node::Neg(e) => e.time_derivative().neg(),
        }
    }

    /// Replaces coordinate `x_i` by `coords[i]` and, when given, `t` by `time`.
    /// Coordinates beyond `coords.len()` are left untouched.
    pub fn substitute(&self, coords: &[Expression], time: Option<&Expression>) -> Expression {
        match self.node() {
            Node::Const(_) => self.clone(),
            Node::Coord(i) => coords.get(*i).cloned().unwrap_or_else(|| self.clone()),
            Node::Time => time.cloned().unwrap_or_else(|| self.clone()),
            Node::Sum(ts) => Self::sum(ts.iter().map(|t| t.substitute(coords, time))),
            Node::Product(fs) => Self::product(fs.iter().map(|f| f.substitute(coords, time))),
            Node::Pow(e, k) => e.substitute(coords, time).powi(*k),
            Node::Sqrt(e) => e.substitute(coords, time).sqrt(),
            Node::Sin(e) => e.substitute(coords, time).sin(),
            Node::Cos(e) => e.substitute(coords, time).cos(),
            Node::Neg(e) => e.substitute(coords, time).neg(),
        }
    }
}

impl fmt::Display for Expression {
    /// Prefix (s-expression) notation, parseable by [`super::parse_expression`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, op: &str, items: &[Expression]) -> fmt::Result {
            write!(f, "({op}")?;
            for it in items {
                write!(f, " {it}")?;
            }
            write!(f, ")")
        }
        match self.node() {
            Node::Const(c) => write!(f, "{c:?}"),
            Node::Coord(i) => write!(f, "x{i}"),
            Node::Time => write!(f, "t"),
            Node::Sum(ts) => list(f, "+", ts),
            Node::Product(ts) => list(f, "*", ts),
            Node::Pow(e, k) => write!(f, "(^ {e} {k})"),
            Node::Sqrt(e) => write!(f, "(sqrt {e})"),
            Node::Sin(e) => write!(f, "(sin {e})"),
            Node::Cos(e) => write!(f, "(cos {e})"),
            Node::Neg(e) => write!(f, "(- {e})"),
        }
    }
}

impl From<f64> for Expression {
    fn from(c: f64) -> Self {
        Expression::constant(c)
    }
}
