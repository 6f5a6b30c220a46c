use std::fmt;

use crate::space::{Domain, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Pow,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "mod",
            BinOp::Pow => "^",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }

    pub fn is_arith(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod | BinOp::Pow)
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Eq | BinOp::Ne)
    }
}

/// Integer or Boolean expression. Names are resolved by the parser.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Var(String),
    /// Reference to a named condition.
    Cond(String),
    /// Application of a named one-parameter function.
    Call(String, Box<Expr>),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Expr {
        Expr::Unary(UnOp::Not, Box::new(e))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Var(v) | Expr::Cond(v) => write!(f, "{v}"),
            Expr::Call(name, arg) => write!(f, "{name}({arg})"),
            Expr::Unary(UnOp::Neg, e) => write!(f, "-({e})"),
            Expr::Unary(UnOp::Not, e) => write!(f, "not ({e})"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
        }
    }
}

/// Right-hand entry of a plain assignment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BetaRhs {
    Lit(i64),
    Var(String),
    Bottom,
}

impl fmt::Display for BetaRhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetaRhs::Lit(n) => write!(f, "{n}"),
            BetaRhs::Var(v) => write!(f, "{v}"),
            BetaRhs::Bottom => write!(f, "bottom"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stmt {
    Skip,
    Abort,
    Require(Expr),
    /// Sequential plain assignment of literals or variables, left to right.
    Beta { targets: Vec<String>, rhs: Vec<BetaRhs> },
    /// `var <- expr`.
    Apply { var: String, expr: Expr },
    If { cond: Expr, then: Box<Stmt>, els: Box<Stmt> },
    While { cond: Expr, body: Box<Stmt> },
    Seq(Vec<Stmt>),
}

pub type ProgramAst = Stmt;

impl Stmt {
    pub fn kind(&self) -> &'static str {
        match self {
            Stmt::Skip => "skip",
            Stmt::Abort => "abort",
            Stmt::Require(_) => "require",
            Stmt::Beta { .. } => "beta",
            Stmt::Apply { .. } => "apply",
            Stmt::If { .. } => "if",
            Stmt::While { .. } => "while",
            Stmt::Seq(_) => "seq",
        }
    }

    /// Top-level statements, flattening nested sequences.
    pub fn flatten(&self) -> Vec<Stmt> {
        match self {
            Stmt::Seq(items) => items.iter().flat_map(Stmt::flatten).collect(),
            other => vec![other.clone()],
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + match self {
            Stmt::If { then, els, .. } => then.size() + els.size(),
            Stmt::While { body, .. } => body.size(),
            Stmt::Seq(items) => items.iter().map(Stmt::size).sum(),
            _ => 0,
        }
    }

    /// Body and condition of a while loop, possibly wrapped in a one-element sequence.
    pub fn as_while(&self) -> Option<(&Expr, &Stmt)> {
        match self {
            Stmt::While { cond, body } => Some((cond, body)),
            Stmt::Seq(items) if items.len() == 1 => items[0].as_while(),
            _ => None,
        }
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Skip => write!(f, "skip"),
            Stmt::Abort => write!(f, "abort"),
            Stmt::Require(c) => write!(f, "require {c}"),
            Stmt::Beta { targets, rhs } => {
                let rhs: Vec<String> = rhs.iter().map(ToString::to_string).collect();
                write!(f, "({}) <- ({})", targets.join(", "), rhs.join(", "))
            }
            Stmt::Apply { var, expr } => write!(f, "{var} <- {expr}"),
            Stmt::If { cond, then, els } => write!(f, "if {cond} {{ {then} }} else {{ {els} }}"),
            Stmt::While { cond, body } => write!(f, "while {cond} {{ {body} }}"),
            Stmt::Seq(items) => {
                let items: Vec<String> = items.iter().map(ToString::to_string).collect();
                write!(f, "{{ {} }}", items.join("; "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FnDef {
    pub name: String,
    pub param: String,
    pub body: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CondDef {
    pub name: String,
    pub expr: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramDef {
    pub name: String,
    /// State variables of the program's space, in order.
    pub vars: Vec<String>,
    pub body: Stmt,
    pub line: usize,
}

/// A parsed and resolved `.tpf` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramUnit {
    pub domains: Vec<Domain>,
    pub vars: Vec<Var>,
    pub conds: Vec<CondDef>,
    pub fns: Vec<FnDef>,
    pub programs: Vec<ProgramDef>,
}

impl ProgramUnit {
    pub fn var(&self, name: &str) -> Option<&Var> {
        self.vars.iter().find(|v| v.name == name)
    }

    pub fn cond(&self, name: &str) -> Option<&CondDef> {
        self.conds.iter().find(|c| c.name == name)
    }

    pub fn function(&self, name: &str) -> Option<&FnDef> {
        self.fns.iter().find(|c| c.name == name)
    }

    pub fn program(&self, name: &str) -> Option<&ProgramDef> {
        self.programs.iter().find(|c| c.name == name)
    }
}
