//! Shared test support: fixture loading, a small-step reference interpreter,
//! and random instance generators.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};
use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tpa_core::calculus::{parse, BetaRhs, BinOp, Expr, ProgramUnit, Stmt, UnOp};
use tpa_core::{Condition, Domain, Lifted, PartialFn, Space, StateId, StateSpace};

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture(name: &str) -> ProgramUnit {
    let path = fixtures_dir().join(name);
    let src = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse(&src).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Every fixture file, sorted by name.
pub fn all_fixtures() -> Vec<(String, ProgramUnit)> {
    let mut names: Vec<String> = std::fs::read_dir(fixtures_dir())
        .unwrap()
        .filter_map(|e| {
            let name = e.ok()?.file_name().into_string().ok()?;
            name.ends_with(".tpf").then_some(name)
        })
        .collect();
    names.sort();
    names.into_iter().map(|n| (n.clone(), fixture(&n))).collect()
}

// ---------------------------------------------------------------------------
// Reference interpreter. It shares only the syntax tree with the library:
// expressions are evaluated over named variables in 128-bit arithmetic and
// statements run one step at a time on an explicit continuation stack.

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Run {
    Halted(BTreeMap<String, i64>),
    Stuck,
    Diverged,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Val {
    I(i128),
    B(bool),
}

const LO: i128 = i64::MIN as i128;
const HI: i128 = i64::MAX as i128;

fn fits(v: i128) -> Option<i128> {
    (LO..=HI).contains(&v).then_some(v)
}

fn floor_div(a: i128, b: i128) -> Option<i128> {
    if b == 0 {
        return None;
    }
    // Quotient chosen so that the remainder is non-negative.
    let mut q = a / b;
    if a % b < 0 {
        q += if b > 0 { -1 } else { 1 };
    }
    fits(q)
}

fn floor_mod(a: i128, b: i128) -> Option<i128> {
    if b == 0 {
        return None;
    }
    let r = a % b;
    Some(if r < 0 { r + b.abs() } else { r })
}

fn power(a: i128, e: i128) -> Option<i128> {
    if e < 0 {
        return None;
    }
    match a {
        0 => return Some(if e == 0 { 1 } else { 0 }),
        1 => return Some(1),
        -1 => return Some(if e % 2 == 0 { 1 } else { -1 }),
        _ => {}
    }
    let mut acc: i128 = 1;
    for _ in 0..e {
        acc = fits(acc * a)?;
    }
    Some(acc)
}

pub struct Oracle<'a> {
    unit: &'a ProgramUnit,
}

impl<'a> Oracle<'a> {
    pub fn new(unit: &'a ProgramUnit) -> Self {
        Oracle { unit }
    }

    fn eval(&self, e: &Expr, env: &BTreeMap<String, i64>) -> Option<Val> {
        Some(match e {
            Expr::Int(n) => Val::I(*n as i128),
            Expr::Bool(b) => Val::B(*b),
            Expr::Var(v) => Val::I(*env.get(v)? as i128),
            Expr::Cond(c) => {
                let def = self.unit.conds.iter().find(|d| &d.name == c)?;
                self.eval(&def.expr, env)?
            }
            Expr::Call(f, arg) => {
                let def = self.unit.fns.iter().find(|d| &d.name == f)?;
                let Val::I(a) = self.eval(arg, env)? else { return None };
                let mut inner = env.clone();
                inner.insert(def.param.clone(), a as i64);
                self.eval(&def.body, &inner)?
            }
            Expr::Unary(UnOp::Neg, a) => match self.eval(a, env)? {
                Val::I(n) => Val::I(fits(-n)?),
                Val::B(_) => return None,
            },
            Expr::Unary(UnOp::Not, a) => match self.eval(a, env)? {
                Val::B(b) => Val::B(!b),
                Val::I(_) => return None,
            },
            Expr::Binary(BinOp::And, a, b) => match self.eval(a, env)? {
                Val::B(false) => Val::B(false),
                Val::B(true) => self.eval(b, env)?,
                Val::I(_) => return None,
            },
            Expr::Binary(BinOp::Or, a, b) => match self.eval(a, env)? {
                Val::B(true) => Val::B(true),
                Val::B(false) => self.eval(b, env)?,
                Val::I(_) => return None,
            },
            Expr::Binary(op, a, b) => {
                let (Val::I(x), Val::I(y)) = (self.eval(a, env)?, self.eval(b, env)?) else {
                    return None;
                };
                match op {
                    BinOp::Add => Val::I(fits(x + y)?),
                    BinOp::Sub => Val::I(fits(x - y)?),
                    BinOp::Mul => Val::I(fits(x.checked_mul(y)?)?),
                    BinOp::Div => Val::I(floor_div(x, y)?),
                    BinOp::Mod => Val::I(floor_mod(x, y)?),
                    BinOp::Pow => Val::I(power(x, y)?),
                    BinOp::Lt => Val::B(x < y),
                    BinOp::Le => Val::B(x <= y),
                    BinOp::Gt => Val::B(x > y),
                    BinOp::Ge => Val::B(x >= y),
                    BinOp::Eq => Val::B(x == y),
                    BinOp::Ne => Val::B(x != y),
                    BinOp::And | BinOp::Or => unreachable!(),
                }
            }
        })
    }

    fn test(&self, e: &Expr, env: &BTreeMap<String, i64>) -> Option<bool> {
        match self.eval(e, env)? {
            Val::B(b) => Some(b),
            Val::I(_) => None,
        }
    }

    fn store(&self, env: &mut BTreeMap<String, i64>, var: &str, v: i128) -> bool {
        let Some(decl) = self.unit.vars.iter().find(|d| d.name == var) else {
            return false;
        };
        if !(LO..=HI).contains(&v) || !decl.domain.elements().contains(&(v as i64)) {
            return false;
        }
        env.insert(var.to_string(), v as i64);
        true
    }

    /// Runs `stmt` from `env` to completion.
    pub fn run(&self, stmt: &Stmt, mut env: BTreeMap<String, i64>) -> Run {
        let mut stack: Vec<&Stmt> = vec![stmt];
        let mut seen: HashSet<(Vec<usize>, BTreeMap<String, i64>)> = HashSet::new();
        while let Some(top) = stack.pop() {
            match top {
                Stmt::Skip => {}
                Stmt::Abort => return Run::Stuck,
                Stmt::Require(c) => {
                    if self.test(c, &env) != Some(true) {
                        return Run::Stuck;
                    }
                }
                Stmt::Beta { targets, rhs } => {
                    for (n, t) in targets.iter().enumerate() {
                        let r = rhs.get(n).or(rhs.last());
                        let v = match r {
                            Some(BetaRhs::Lit(v)) => *v as i128,
                            Some(BetaRhs::Var(v)) => match env.get(v) {
                                Some(x) => *x as i128,
                                None => return Run::Stuck,
                            },
                            _ => return Run::Stuck,
                        };
                        if !self.store(&mut env, t, v) {
                            return Run::Stuck;
                        }
                    }
                }
                Stmt::Apply { var, expr } => match self.eval(expr, &env) {
                    Some(Val::I(v)) if self.store(&mut env, var, v) => {}
                    _ => return Run::Stuck,
                },
                Stmt::If { cond, then, els } => match self.test(cond, &env) {
                    Some(true) => stack.push(then),
                    Some(false) => stack.push(els),
                    None => return Run::Stuck,
                },
                Stmt::While { cond, body } => match self.test(cond, &env) {
                    Some(true) => {
                        stack.push(top);
                        let key: Vec<usize> = stack.iter().map(|s| *s as *const Stmt as usize).collect();
                        if !seen.insert((key, env.clone())) {
                            return Run::Diverged;
                        }
                        stack.push(body);
                    }
                    Some(false) => {}
                    None => return Run::Stuck,
                },
                Stmt::Seq(items) => stack.extend(items.iter().rev()),
            }
        }
        Run::Halted(env)
    }
}

pub fn env_of(space: &StateSpace, s: StateId) -> BTreeMap<String, i64> {
    space
        .vars()
        .iter()
        .zip(space.decode(s))
        .map(|(v, x)| (v.name.clone(), x))
        .collect()
}

pub fn state_of(space: &StateSpace, env: &BTreeMap<String, i64>) -> Option<StateId> {
    let values: Vec<i64> = space.vars().iter().map(|v| env[&v.name]).collect();
    space.encode(&values)
}

// ---------------------------------------------------------------------------
// Random instances.

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn line_space(n: usize) -> Space {
    StateSpace::single("x", Domain::range("A", 0, n as i64 - 1).unwrap()).unwrap()
}

/// Random endofunction; each entry is bottom with probability `p_bottom`.
pub fn random_fn(rng: &mut StdRng, space: &Space, p_bottom: f64) -> PartialFn {
    let n = space.len() as u32;
    PartialFn::endo(space, |_| {
        if rng.random_bool(p_bottom) {
            Lifted::Bottom
        } else {
            Lifted::Defined(StateId(rng.random_range(0..n)))
        }
    })
    .unwrap()
}

/// Random endofunction defined everywhere on `c`.
pub fn random_fn_total_on(rng: &mut StdRng, c: &Condition, p_bottom: f64) -> PartialFn {
    let space = c.space().clone();
    let n = space.len() as u32;
    PartialFn::endo(&space, |s| {
        if !c.holds(s) && rng.random_bool(p_bottom) {
            Lifted::Bottom
        } else {
            Lifted::Defined(StateId(rng.random_range(0..n)))
        }
    })
    .unwrap()
}

pub fn random_cond(rng: &mut StdRng, space: &Space, density: f64) -> Condition {
    Condition::from_fn(space, |_| rng.random_bool(density))
}

/// A random condition that entails `c`.
pub fn random_stronger(rng: &mut StdRng, c: &Condition) -> Condition {
    let keep = rng.random_range(0.0..1.0);
    Condition::from_fn(c.space(), |s| c.holds(s) && rng.random_bool(keep))
}

/// A random condition entailed by `c`.
pub fn random_weaker(rng: &mut StdRng, c: &Condition) -> Condition {
    let add = rng.random_range(0.0..1.0);
    Condition::from_fn(c.space(), |s| c.holds(s) || rng.random_bool(add))
}

// ---------------------------------------------------------------------------
// Random programs over two small variables.

pub const TWO_VARS: &str = "domain X = 0 .. 4\ndomain Y = 0 .. 3 desc\nvar x : X\nvar y : Y\n";

pub fn two_var_unit() -> ProgramUnit {
    parse(TWO_VARS).unwrap()
}

fn var_name(rng: &mut StdRng) -> String {
    if rng.random_bool(0.5) { "x" } else { "y" }.to_string()
}

pub fn random_int_expr(rng: &mut StdRng, depth: u32) -> Expr {
    if depth == 0 || rng.random_bool(0.35) {
        return if rng.random_bool(0.5) {
            Expr::Var(var_name(rng))
        } else {
            Expr::Int(rng.random_range(-1..5))
        };
    }
    if rng.random_bool(0.1) {
        return Expr::Unary(UnOp::Neg, Box::new(random_int_expr(rng, depth - 1)));
    }
    let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Mod, BinOp::Pow][rng.random_range(0..6)];
    Expr::bin(op, random_int_expr(rng, depth - 1), random_int_expr(rng, depth - 1))
}

pub fn random_bool_expr(rng: &mut StdRng, depth: u32) -> Expr {
    if depth == 0 || rng.random_bool(0.5) {
        if rng.random_bool(0.05) {
            return Expr::Bool(rng.random_bool(0.5));
        }
        let op = [BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge, BinOp::Eq, BinOp::Ne][rng.random_range(0..6)];
        return Expr::bin(op, random_int_expr(rng, 1), random_int_expr(rng, 1));
    }
    match rng.random_range(0..3) {
        0 => Expr::not(random_bool_expr(rng, depth - 1)),
        1 => Expr::bin(BinOp::And, random_bool_expr(rng, depth - 1), random_bool_expr(rng, depth - 1)),
        _ => Expr::bin(BinOp::Or, random_bool_expr(rng, depth - 1), random_bool_expr(rng, depth - 1)),
    }
}

pub fn random_beta(rng: &mut StdRng, allow_bottom: bool) -> Stmt {
    let n = rng.random_range(1..4);
    let targets: Vec<String> = (0..n).map(|_| var_name(rng)).collect();
    let m = rng.random_range(1..=n);
    let rhs = (0..m)
        .map(|_| match rng.random_range(0..10) {
            0 if allow_bottom => BetaRhs::Bottom,
            0..=4 => BetaRhs::Lit(rng.random_range(-1..6)),
            _ => BetaRhs::Var(var_name(rng)),
        })
        .collect();
    Stmt::Beta { targets, rhs }
}

pub fn random_stmt(rng: &mut StdRng, depth: u32) -> Stmt {
    let leaf = depth == 0 || rng.random_bool(0.3);
    if leaf {
        return match rng.random_range(0..20) {
            0 => Stmt::Abort,
            1..=2 => Stmt::Skip,
            3..=4 => Stmt::Require(random_bool_expr(rng, 1)),
            5..=8 => random_beta(rng, true),
            _ => Stmt::Apply {
                var: var_name(rng),
                expr: random_int_expr(rng, 2),
            },
        };
    }
    match rng.random_range(0..3) {
        0 => Stmt::If {
            cond: random_bool_expr(rng, 2),
            then: Box::new(random_stmt(rng, depth - 1)),
            els: Box::new(random_stmt(rng, depth - 1)),
        },
        1 => Stmt::While {
            cond: random_bool_expr(rng, 2),
            body: Box::new(random_stmt(rng, depth - 1)),
        },
        _ => Stmt::Seq((0..rng.random_range(2..4)).map(|_| random_stmt(rng, depth - 1)).collect()),
    }
}

pub fn two_var_space(unit: &ProgramUnit) -> Space {
    tpa_core::calculus::unit_space(unit).unwrap()
}
