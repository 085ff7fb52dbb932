//! Generator expressions: the evolvable weight functions `w_ij`.

mod classify;
mod eval;
mod parse;
mod random;
mod simplify;

pub use classify::{classify, contains_delta, delta_thresholds, probe_contexts, Family};
pub use eval::EdgeContext;
pub use random::{mutate, mutate_traced, random_constant, random_tree, recombine, recombine_traced, InitParams, InitStrategy};

use std::fmt;

use serde::{Deserialize, Serialize};

/// Terminal variables a generator may read for candidate edge `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Var {
    I,
    J,
    #[serde(rename = "k_i")]
    Ki,
    #[serde(rename = "k_j")]
    Kj,
    KinI,
    KinJ,
    KoutI,
    KoutJ,
    D,
    Dd,
    Dr,
    Xi,
}

impl Var {
    pub const ALL: [Var; 12] = [
        Var::I,
        Var::J,
        Var::Ki,
        Var::Kj,
        Var::KinI,
        Var::KinJ,
        Var::KoutI,
        Var::KoutJ,
        Var::D,
        Var::Dd,
        Var::Dr,
        Var::Xi,
    ];

    pub const UNDIRECTED: [Var; 6] = [Var::I, Var::J, Var::Ki, Var::Kj, Var::D, Var::Xi];

    pub fn name(self) -> &'static str {
        match self {
            Var::I => "i",
            Var::J => "j",
            Var::Ki => "k_i",
            Var::Kj => "k_j",
            Var::KinI => "kin_i",
            Var::KinJ => "kin_j",
            Var::KoutI => "kout_i",
            Var::KoutJ => "kout_j",
            Var::D => "d",
            Var::Dd => "dd",
            Var::Dr => "dr",
            Var::Xi => "xi",
        }
    }

    /// Accepts canonical names plus the short alias `k` for `k_i`.
    pub fn from_name(s: &str) -> Option<Var> {
        if s == "k" {
            return Some(Var::Ki);
        }
        Var::ALL.into_iter().find(|v| v.name() == s)
    }

    pub fn vocabulary(directed: bool) -> Vec<Var> {
        if directed {
            Var::ALL.to_vec()
        } else {
            Var::UNDIRECTED.to_vec()
        }
    }

    pub fn is_degree(self) -> bool {
        matches!(
            self,
            Var::Ki | Var::Kj | Var::KinI | Var::KinJ | Var::KoutI | Var::KoutJ
        )
    }

    pub fn is_distance(self) -> bool {
        matches!(self, Var::D | Var::Dd | Var::Dr)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Exp,
    Log,
    Abs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Gt,
    Lt,
    Eq,
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Abs => "abs",
        }
    }
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Pow => "pow",
            BinaryOp::Min => "min",
            BinaryOp::Max => "max",
        }
    }
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Gt => ">",
            CmpOp::Lt => "<",
            CmpOp::Eq => "=",
        }
    }
}

/// One node of a generator tree.
///
/// `Psi` and `Delta` carry their group count / switch threshold as a literal
/// parameter rather than a child subtree, so only `same`/`other` and
/// `before`/`after` are addressable by mutation and recombination.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    /// `(op a b then else)`
    Cond(CmpOp, Box<[Expr; 4]>),
    /// `(=0 a then else)`
    IfZero(Box<[Expr; 3]>),
    Psi {
        groups: f64,
        same: Box<Expr>,
        other: Box<Expr>,
    },
    Delta {
        threshold: f64,
        before: Box<Expr>,
        after: Box<Expr>,
    },
}

impl Expr {
    pub fn constant(v: f64) -> Self {
        Expr::Const(v)
    }

    pub fn unary(op: UnaryOp, a: Expr) -> Self {
        Expr::Unary(op, Box::new(a))
    }

    pub fn binary(op: BinaryOp, a: Expr, b: Expr) -> Self {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn cond(op: CmpOp, a: Expr, b: Expr, then: Expr, otherwise: Expr) -> Self {
        Expr::Cond(op, Box::new([a, b, then, otherwise]))
    }

    pub fn if_zero(a: Expr, then: Expr, otherwise: Expr) -> Self {
        Expr::IfZero(Box::new([a, then, otherwise]))
    }

    pub fn psi(groups: f64, same: Expr, other: Expr) -> Self {
        Expr::Psi {
            groups,
            same: Box::new(same),
            other: Box::new(other),
        }
    }

    pub fn delta(threshold: f64, before: Expr, after: Expr) -> Self {
        Expr::Delta {
            threshold,
            before: Box::new(before),
            after: Box::new(after),
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Const(_) | Expr::Var(_) => Vec::new(),
            Expr::Unary(_, a) => vec![a],
            Expr::Binary(_, a, b) => vec![a, b],
            Expr::Cond(_, xs) => xs.iter().collect(),
            Expr::IfZero(xs) => xs.iter().collect(),
            Expr::Psi { same, other, .. } => vec![same, other],
            Expr::Delta { before, after, .. } => vec![before, after],
        }
    }

    pub fn children_mut(&mut self) -> Vec<&mut Expr> {
        match self {
            Expr::Const(_) | Expr::Var(_) => Vec::new(),
            Expr::Unary(_, a) => vec![a.as_mut()],
            Expr::Binary(_, a, b) => vec![a.as_mut(), b.as_mut()],
            Expr::Cond(_, xs) => xs.iter_mut().collect(),
            Expr::IfZero(xs) => xs.iter_mut().collect(),
            Expr::Psi { same, other, .. } => vec![same.as_mut(), other.as_mut()],
            Expr::Delta { before, after, .. } => vec![before.as_mut(), after.as_mut()],
        }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self, Expr::Const(_) | Expr::Var(_))
    }

    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Expr::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Expr::depth)
            .max()
            .unwrap_or(0)
    }

    /// Node at preorder position `idx` (root is 0).
    pub fn node(&self, idx: usize) -> Option<&Expr> {
        if idx == 0 {
            return Some(self);
        }
        let mut offset = 1;
        for child in self.children() {
            let s = child.size();
            if idx < offset + s {
                return child.node(idx - offset);
            }
            offset += s;
        }
        None
    }

    pub fn node_mut(&mut self, idx: usize) -> Option<&mut Expr> {
        if idx == 0 {
            return Some(self);
        }
        let mut offset = 1;
        for child in self.children_mut() {
            let s = child.size();
            if idx < offset + s {
                return child.node_mut(idx - offset);
            }
            offset += s;
        }
        None
    }

    /// Reads `i`, `j`, or `xi` implicitly (psi and delta) or explicitly.
    fn collect_vars(&self, out: &mut VarSet) {
        match self {
            Expr::Var(v) => out.insert(*v),
            Expr::Psi { .. } => {
                out.insert(Var::I);
                out.insert(Var::J);
            }
            Expr::Delta { .. } => out.insert(Var::Xi),
            _ => {}
        }
        for c in self.children() {
            c.collect_vars(out);
        }
    }
}

/// Bit set over [`Var`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VarSet(u16);

impl VarSet {
    pub fn insert(&mut self, v: Var) {
        self.0 |= 1 << v as u16;
    }

    pub fn contains(self, v: Var) -> bool {
        self.0 & (1 << v as u16) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Var> {
        Var::ALL.into_iter().filter(move |v| self.contains(*v))
    }

    pub fn needs_undirected_distance(self) -> bool {
        self.contains(Var::D)
    }

    pub fn needs_directed_distance(self) -> bool {
        self.contains(Var::Dd) || self.contains(Var::Dr)
    }
}

/// A generator: an expression tree assigning a weight to each candidate edge.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorTree {
    root: Expr,
}

impl GeneratorTree {
    pub fn new(root: Expr) -> Self {
        Self { root }
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    pub fn into_root(self) -> Expr {
        self.root
    }

    pub fn size(&self) -> usize {
        self.root.size()
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// Variables the tree reads, including the implicit reads of psi and delta.
    pub fn variables(&self) -> VarSet {
        let mut set = VarSet::default();
        self.root.collect_vars(&mut set);
        set
    }

    /// True when no explicit variable appears (psi/delta still count as reads).
    pub fn is_variable_free(&self) -> bool {
        self.variables().is_empty()
    }

    /// Weight for one candidate edge; always finite and non-negative.
    pub fn evaluate(&self, ctx: &EdgeContext) -> f64 {
        eval::evaluate_root(&self.root, ctx)
    }

    pub fn parse(text: &str) -> crate::Result<Self> {
        parse::parse(text).map(Self::new)
    }

    pub fn simplify(&self) -> Self {
        Self::new(simplify::simplify(&self.root))
    }

    /// Human-oriented infix rendering for reports. Not parseable.
    pub fn to_infix(&self) -> String {
        parse::infix(&self.root)
    }

    /// Checks arity and parameter invariants; trees built through this crate
    /// always pass.
    pub fn is_well_formed(&self) -> bool {
        fn ok(e: &Expr) -> bool {
            match e {
                Expr::Const(v) => v.is_finite(),
                Expr::Psi { groups, .. } => groups.is_finite() && e.children().into_iter().all(ok),
                Expr::Delta { threshold, .. } => {
                    threshold.is_finite() && e.children().into_iter().all(ok)
                }
                _ => e.children().into_iter().all(ok),
            }
        }
        ok(&self.root)
    }
}

impl fmt::Display for GeneratorTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        parse::write_prefix(&self.root, f)
    }
}

impl std::str::FromStr for GeneratorTree {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        Self::parse(s)
    }
}

impl From<Expr> for GeneratorTree {
    fn from(root: Expr) -> Self {
        Self::new(root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preorder_addressing() {
        let t = GeneratorTree::parse("(+ (* k_i 2) d)").unwrap();
        assert_eq!(t.size(), 5);
        assert_eq!(t.root().node(1).unwrap(), &Expr::binary(BinaryOp::Mul, Expr::Var(Var::Ki), Expr::Const(2.0)));
        assert_eq!(t.root().node(2).unwrap(), &Expr::Var(Var::Ki));
        assert_eq!(t.root().node(4).unwrap(), &Expr::Var(Var::D));
        assert!(t.root().node(5).is_none());
    }

    #[test]
    fn implicit_reads() {
        let t = GeneratorTree::parse("(delta 0.5 1 (psi 2 3 4))").unwrap();
        let vars = t.variables();
        assert!(vars.contains(Var::Xi));
        assert!(vars.contains(Var::I) && vars.contains(Var::J));
        assert!(!vars.contains(Var::D));
        assert!(GeneratorTree::parse("(+ 1 2)").unwrap().is_variable_free());
    }
}
