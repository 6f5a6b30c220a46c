//! Denotation of programs as explicit tables.

use std::sync::Arc;

use super::ast::{BetaRhs, ProgramUnit, Stmt};
use super::beta::beta_normalize;
use super::expr::{bind, condition_of, var_pos, Bound};
use crate::condition::Condition;
use crate::error::{Error, Result};
use crate::orbit::{element_orders, ExtOrder};
use crate::pfn::{check_bound, PartialFn};
use crate::space::{Lifted, Space, StateId, StateSpace, Var};

/// What running a program from one state produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Defined(StateId),
    /// Bottom reached after finitely many steps.
    Stuck,
    /// A loop revisits a state, so the run never ends.
    Diverge,
}

impl Outcome {
    pub fn lifted(self) -> Lifted {
        match self {
            Outcome::Defined(s) => Lifted::Defined(s),
            _ => Lifted::Bottom,
        }
    }
}

/// Outcome of a program from every defined state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Denotation {
    pub space: Space,
    pub outcomes: Vec<Outcome>,
}

impl Denotation {
    pub fn to_pfn(&self) -> PartialFn {
        PartialFn::from_table(&self.space, &self.space, self.outcomes.iter().map(|o| o.lifted()).collect())
            .expect("outcome table matches its space")
    }

    pub fn at(&self, s: StateId) -> Outcome {
        self.outcomes[s.index()]
    }
}

/// The state space of a program: its declared variables, in order.
pub fn program_space(unit: &ProgramUnit, program: &str) -> Result<Space> {
    let def = unit.program(program).ok_or_else(|| Error::UnknownName {
        kind: "program",
        name: program.to_string(),
    })?;
    vars_space(unit, &def.vars)
}

/// Space over the named variables of `unit`.
pub fn vars_space(unit: &ProgramUnit, vars: &[String]) -> Result<Space> {
    let vars: Vec<Var> = vars
        .iter()
        .map(|v| {
            unit.var(v).cloned().ok_or_else(|| Error::UnknownName {
                kind: "variable",
                name: v.clone(),
            })
        })
        .collect::<Result<_>>()?;
    let space = StateSpace::new(vars)?;
    let bound = crate::pfn::table_bound();
    if space.size() > bound {
        return Err(Error::SpaceTooLarge {
            size: space.size(),
            bound,
        });
    }
    Ok(Arc::new(space))
}

/// Space over every variable of `unit`.
pub fn unit_space(unit: &ProgramUnit) -> Result<Space> {
    let names: Vec<String> = unit.vars.iter().map(|v| v.name.clone()).collect();
    vars_space(unit, &names)
}

pub fn denote(unit: &ProgramUnit, program: &str) -> Result<PartialFn> {
    Ok(denote_outcomes(unit, program)?.to_pfn())
}

pub fn denote_outcomes(unit: &ProgramUnit, program: &str) -> Result<Denotation> {
    let space = program_space(unit, program)?;
    let def = unit.program(program).expect("checked by program_space");
    denote_stmt(unit, &space, &def.body)
}

/// Denotation of an arbitrary statement over `space`.
pub fn denote_stmt(unit: &ProgramUnit, space: &Space, stmt: &Stmt) -> Result<Denotation> {
    check_bound(space)?;
    let outcomes = Denoter { unit, space }.stmt(stmt)?;
    Ok(Denotation {
        space: space.clone(),
        outcomes,
    })
}

struct Denoter<'a> {
    unit: &'a ProgramUnit,
    space: &'a Space,
}

impl Denoter<'_> {
    fn bind(&self, e: &super::ast::Expr) -> Result<Bound> {
        bind(self.unit, self.space, e)
    }

    fn map(&self, mut f: impl FnMut(StateId, &mut Vec<i64>) -> Outcome) -> Vec<Outcome> {
        let mut env = Vec::with_capacity(self.space.vars().len());
        self.space
            .states()
            .map(|s| {
                env.clear();
                env.extend(self.space.decode(s));
                f(s, &mut env)
            })
            .collect()
    }

    /// `Some(true)`, `Some(false)`, or `None` when the test itself is undefined.
    fn test(&self, cond: &super::ast::Expr) -> Result<Vec<Option<bool>>> {
        let b = self.bind(cond)?;
        let mut env = Vec::new();
        Ok(self
            .space
            .states()
            .map(|s| {
                env.clear();
                env.extend(self.space.decode(s));
                b.eval_bool(&env)
            })
            .collect())
    }

    fn stmt(&self, s: &Stmt) -> Result<Vec<Outcome>> {
        Ok(match s {
            Stmt::Skip => self.map(|s, _| Outcome::Defined(s)),
            Stmt::Abort => self.map(|_, _| Outcome::Stuck),
            Stmt::Require(c) => {
                let t = self.test(c)?;
                self.map(|s, _| if t[s.index()] == Some(true) { Outcome::Defined(s) } else { Outcome::Stuck })
            }
            Stmt::Beta { .. } => match beta_normalize(self.unit, s)? {
                Stmt::Abort => self.map(|_, _| Outcome::Stuck),
                Stmt::Beta { targets, rhs } => {
                    let plan: Vec<(usize, Rhs)> = targets
                        .iter()
                        .zip(&rhs)
                        .map(|(t, r)| {
                            Ok((
                                var_pos(self.space, t)?,
                                match r {
                                    BetaRhs::Lit(n) => Rhs::Lit(*n),
                                    BetaRhs::Var(v) => Rhs::Var(var_pos(self.space, v)?),
                                    BetaRhs::Bottom => unreachable!("normal form has no bottom"),
                                },
                            ))
                        })
                        .collect::<Result<_>>()?;
                    let space = self.space;
                    self.map(|s, _| {
                        let mut cur = s;
                        for (pos, r) in &plan {
                            let v = match r {
                                Rhs::Lit(n) => *n,
                                Rhs::Var(i) => space.value(cur, *i),
                            };
                            match space.with_value(cur, *pos, v) {
                                Some(next) => cur = next,
                                None => return Outcome::Stuck,
                            }
                        }
                        Outcome::Defined(cur)
                    })
                }
                other => unreachable!("beta normal form is Beta or Abort, got {other:?}"),
            },
            Stmt::Apply { var, expr } => {
                let pos = var_pos(self.space, var)?;
                let b = self.bind(expr)?;
                let space = self.space;
                self.map(|s, env| match b.eval_int(env).and_then(|v| space.with_value(s, pos, v)) {
                    Some(t) => Outcome::Defined(t),
                    None => Outcome::Stuck,
                })
            }
            Stmt::If { cond, then, els } => {
                let t = self.test(cond)?;
                let a = self.stmt(then)?;
                let b = self.stmt(els)?;
                self.map(|s, _| match t[s.index()] {
                    Some(true) => a[s.index()],
                    Some(false) => b[s.index()],
                    None => Outcome::Stuck,
                })
            }
            Stmt::While { cond, body } => {
                let t = self.test(cond)?;
                let b = self.stmt(body)?;
                while_outcomes(&t, &b)
            }
            Stmt::Seq(items) => {
                let mut acc = self.stmt(&Stmt::Skip)?;
                for item in items {
                    let next = self.stmt(item)?;
                    for o in acc.iter_mut() {
                        if let Outcome::Defined(s) = *o {
                            *o = next[s.index()];
                        }
                    }
                }
                acc
            }
        })
    }
}

enum Rhs {
    Lit(i64),
    Var(usize),
}

/// Least solution of `W(s) = if c(s) then W(body(s)) else s`, resolved per start
/// state with cycle detection over the body table.
fn while_outcomes(test: &[Option<bool>], body: &[Outcome]) -> Vec<Outcome> {
    let n = test.len();
    let mut out: Vec<Option<Outcome>> = vec![None; n];
    let mut on_path = vec![false; n];
    let mut path: Vec<usize> = Vec::new();
    for start in 0..n {
        let mut cur = start;
        let result = loop {
            if let Some(o) = out[cur] {
                break o;
            }
            match test[cur] {
                Some(false) => {
                    out[cur] = Some(Outcome::Defined(StateId(cur as u32)));
                    break Outcome::Defined(StateId(cur as u32));
                }
                None => break Outcome::Stuck,
                Some(true) => {}
            }
            if on_path[cur] {
                break Outcome::Diverge;
            }
            on_path[cur] = true;
            path.push(cur);
            match body[cur] {
                Outcome::Defined(next) => cur = next.index(),
                other => break other,
            }
        };
        for s in path.drain(..) {
            on_path[s] = false;
            out[s] = Some(result);
        }
        if out[start].is_none() {
            out[start] = Some(result);
        }
    }
    out.into_iter().map(|o| o.expect("resolved")).collect()
}

/// Outcomes of `while cond { body }` given the body's outcomes.
pub fn denote_loop(body: &Denotation, cond: &Condition) -> Denotation {
    let test: Vec<Option<bool>> = body.space.states().map(|s| Some(cond.holds(s))).collect();
    Denotation {
        space: body.space.clone(),
        outcomes: while_outcomes(&test, &body.outcomes),
    }
}

/// `true` when both programs denote the same function on the same space.
pub fn check_equiv(unit: &ProgramUnit, p1: &str, p2: &str) -> Result<bool> {
    let a = denote(unit, p1)?;
    let b = denote(unit, p2)?;
    if !crate::space::same_space(a.domain_space(), b.domain_space()) {
        return Err(Error::mismatch(format!("`{p1}` and `{p2}` have different state spaces")));
    }
    Ok(a == b)
}

/// Body function and loop condition of a while-rooted program.
pub fn while_parts(unit: &ProgramUnit, program: &str) -> Result<(PartialFn, Condition)> {
    let space = program_space(unit, program)?;
    let def = unit.program(program).expect("checked");
    let (cond, body) = def.body.as_while().ok_or_else(|| Error::NotALoop(program.to_string()))?;
    let body_fn = denote_stmt(unit, &space, body)?.to_pfn();
    let c = condition_of(unit, &space, cond, &cond.to_string())?;
    Ok((body_fn, c))
}

/// Number of loop iterations started from `x`.
pub fn loop_iteration_count(unit: &ProgramUnit, program: &str, x: Lifted) -> Result<ExtOrder> {
    let (body, c) = while_parts(unit, program)?;
    let Lifted::Defined(s) = x else {
        return Ok(ExtOrder::Finite(0));
    };
    let orders = element_orders(&body, &c)?;
    Ok(match orders[s.index()] {
        ExtOrder::NegOne => ExtOrder::Finite(0),
        o => o.succ(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse;
    use super::*;

    const F1: &str = "
domain A = 1 .. 15
var x : A
cond C = x < 10
fn f(x) = x + 2
program Loop = while C { x <- f(x) }
program Spin = while true { skip }
program Guard = if C { skip } else { abort }
program Req = require C
";

    fn st(space: &Space, v: &[i64]) -> StateId {
        space.encode(v).unwrap()
    }

    #[test]
    fn f1_loop() {
        let u = parse(F1).unwrap();
        let f = denote(&u, "Loop").unwrap();
        let a = f.domain_space().clone();
        assert_eq!(f.at(st(&a, &[1])), Lifted::Defined(st(&a, &[11])));
        assert_eq!(f.at(st(&a, &[8])), Lifted::Defined(st(&a, &[10])));
        assert_eq!(f.at(st(&a, &[12])), Lifted::Defined(st(&a, &[12])));
    }

    #[test]
    fn infinite_loop_is_bottom() {
        let u = parse(F1).unwrap();
        let d = denote_outcomes(&u, "Spin").unwrap();
        assert!(d.outcomes.iter().all(|o| *o == Outcome::Diverge));
        assert_eq!(d.to_pfn(), crate::pfn::undefined_fn(&d.space).unwrap());
    }

    #[test]
    fn guarded_skip_is_conditional_identity() {
        let u = parse(F1).unwrap();
        assert!(check_equiv(&u, "Guard", "Req").unwrap());
    }

    #[test]
    fn iteration_counts() {
        let u = parse(F1).unwrap();
        let a = program_space(&u, "Loop").unwrap();
        let count = |v| loop_iteration_count(&u, "Loop", Lifted::Defined(st(&a, &[v]))).unwrap();
        assert_eq!(count(1), ExtOrder::Finite(5));
        assert_eq!(count(12), ExtOrder::Finite(0));
        assert_eq!(count(9), ExtOrder::Finite(1));
        assert_eq!(count(8), ExtOrder::Finite(1));
        assert!(matches!(
            loop_iteration_count(&u, "Req", Lifted::Bottom),
            Err(Error::NotALoop(_))
        ));
    }

    #[test]
    fn stuck_inside_loop() {
        let u = parse("domain D = 0..5\nvar x : D\nprogram P = while x > 0 { x <- x + 1 }").unwrap();
        let d = denote_outcomes(&u, "P").unwrap();
        assert_eq!(d.outcomes[0], Outcome::Defined(StateId(0)));
        assert!(d.outcomes[1..].iter().all(|o| *o == Outcome::Stuck));
    }

    #[test]
    fn sequential_beta() {
        let u = parse("domain D = 0..9\nvar x, y : D\nprogram P = (x, y) <- (y, x)").unwrap();
        let f = denote(&u, "P").unwrap();
        let s = f.domain_space().clone();
        assert_eq!(f.at(st(&s, &[1, 2])), Lifted::Defined(st(&s, &[2, 2])));
    }

    #[test]
    fn table_bound_is_enforced() {
        let u = parse("domain D = 0..999\nvar x, y, z : D\nprogram P = skip").unwrap();
        assert!(matches!(denote(&u, "P"), Err(Error::SpaceTooLarge { .. })));
    }
}
