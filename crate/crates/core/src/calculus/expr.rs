//! Expressions bound to a concrete state space, and their evaluation.

use std::sync::Arc;

use super::ast::{BinOp, Expr, ProgramUnit, UnOp};
use crate::condition::Condition;
use crate::error::{Error, Result};
use crate::pfn::PartialFn;
use crate::space::Space;

/// Expression with variables replaced by positions in a space and
/// named conditions and functions inlined.
#[derive(Debug, Clone)]
pub enum Bound {
    Int(i64),
    Bool(bool),
    Var(usize),
    /// A function parameter, by depth in the call stack.
    Local(usize),
    Call { body: Arc<Bound>, arg: Box<Bound> },
    Unary(UnOp, Box<Bound>),
    Binary(BinOp, Box<Bound>, Box<Bound>),
}

pub fn bind(unit: &ProgramUnit, space: &Space, e: &Expr) -> Result<Bound> {
    bind_in(unit, space, e, &mut Vec::new())
}

/// `scope` holds the parameters of the enclosing calls, innermost last.
fn bind_in(unit: &ProgramUnit, space: &Space, e: &Expr, scope: &mut Vec<String>) -> Result<Bound> {
    Ok(match e {
        Expr::Int(n) => Bound::Int(*n),
        Expr::Bool(b) => Bound::Bool(*b),
        Expr::Var(v) => match scope.iter().rposition(|p| p == v) {
            Some(depth) => Bound::Local(depth),
            None => Bound::Var(var_pos(space, v)?),
        },
        Expr::Cond(c) => {
            let def = unit.cond(c).ok_or_else(|| Error::UnknownName {
                kind: "condition",
                name: c.clone(),
            })?;
            bind_in(unit, space, &def.expr, scope)?
        }
        Expr::Call(f, arg) => {
            let def = unit.function(f).ok_or_else(|| Error::UnknownName {
                kind: "function",
                name: f.clone(),
            })?;
            let arg = Box::new(bind_in(unit, space, arg, scope)?);
            scope.push(def.param.clone());
            let body = bind_in(unit, space, &def.body, scope);
            scope.pop();
            Bound::Call {
                body: Arc::new(body?),
                arg,
            }
        }
        Expr::Unary(op, a) => Bound::Unary(*op, Box::new(bind_in(unit, space, a, scope)?)),
        Expr::Binary(op, a, b) => Bound::Binary(
            *op,
            Box::new(bind_in(unit, space, a, scope)?),
            Box::new(bind_in(unit, space, b, scope)?),
        ),
    })
}

pub(crate) fn var_pos(space: &Space, v: &str) -> Result<usize> {
    space.var_index(v).ok_or_else(|| Error::UnknownName {
        kind: "variable",
        name: v.to_string(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Value {
    Int(i64),
    Bool(bool),
}

/// Checked `i64` arithmetic; `None` stands for the undefined result.
pub fn arith(op: BinOp, a: i64, b: i64) -> Option<i64> {
    match op {
        BinOp::Add => a.checked_add(b),
        BinOp::Sub => a.checked_sub(b),
        BinOp::Mul => a.checked_mul(b),
        BinOp::Div => a.checked_div_euclid(b),
        BinOp::Mod => a.checked_rem_euclid(b),
        BinOp::Pow => u32::try_from(b).ok().and_then(|e| a.checked_pow(e)),
        _ => None,
    }
}

impl Bound {
    /// Evaluates against the variable values of one state.
    pub fn eval(&self, env: &[i64]) -> Option<Value> {
        self.eval_in(env, &mut Vec::new())
    }

    fn eval_in(&self, env: &[i64], locals: &mut Vec<i64>) -> Option<Value> {
        Some(match self {
            Bound::Int(n) => Value::Int(*n),
            Bound::Bool(b) => Value::Bool(*b),
            Bound::Var(i) => Value::Int(env[*i]),
            Bound::Local(d) => Value::Int(locals[*d]),
            Bound::Call { body, arg } => {
                let v = arg.int_in(env, locals)?;
                locals.push(v);
                let r = body.eval_in(env, locals);
                locals.pop();
                r?
            }
            Bound::Unary(UnOp::Neg, a) => Value::Int(a.int_in(env, locals)?.checked_neg()?),
            Bound::Unary(UnOp::Not, a) => Value::Bool(!a.bool_in(env, locals)?),
            Bound::Binary(op, a, b) => match op {
                BinOp::And => Value::Bool(a.bool_in(env, locals)? && b.bool_in(env, locals)?),
                BinOp::Or => Value::Bool(a.bool_in(env, locals)? || b.bool_in(env, locals)?),
                op if op.is_arith() => Value::Int(arith(*op, a.int_in(env, locals)?, b.int_in(env, locals)?)?),
                op => {
                    let (x, y) = (a.int_in(env, locals)?, b.int_in(env, locals)?);
                    Value::Bool(match op {
                        BinOp::Lt => x < y,
                        BinOp::Le => x <= y,
                        BinOp::Gt => x > y,
                        BinOp::Ge => x >= y,
                        BinOp::Eq => x == y,
                        _ => x != y,
                    })
                }
            },
        })
    }

    fn int_in(&self, env: &[i64], locals: &mut Vec<i64>) -> Option<i64> {
        match self.eval_in(env, locals)? {
            Value::Int(n) => Some(n),
            Value::Bool(_) => None,
        }
    }

    fn bool_in(&self, env: &[i64], locals: &mut Vec<i64>) -> Option<bool> {
        match self.eval_in(env, locals)? {
            Value::Bool(b) => Some(b),
            Value::Int(_) => None,
        }
    }

    pub fn eval_int(&self, env: &[i64]) -> Option<i64> {
        self.int_in(env, &mut Vec::new())
    }

    pub fn eval_bool(&self, env: &[i64]) -> Option<bool> {
        self.bool_in(env, &mut Vec::new())
    }
}

/// Extension of a Boolean expression. States where evaluation is undefined are excluded.
pub fn condition_of(unit: &ProgramUnit, space: &Space, e: &Expr, label: &str) -> Result<Condition> {
    let b = bind(unit, space, e)?;
    Ok(Condition::from_fn(space, |s| b.eval_bool(&space.decode(s)) == Some(true)).with_label(label))
}

/// Endofunction that sets `var` to the value of `e`; undefined or out-of-domain results give bottom.
pub fn assign_fn(unit: &ProgramUnit, space: &Space, var: &str, e: &Expr) -> Result<PartialFn> {
    let pos = var_pos(space, var)?;
    let b = bind(unit, space, e)?;
    PartialFn::endo(space, |s| {
        b.eval_int(&space.decode(s))
            .and_then(|v| space.with_value(s, pos, v))
            .into()
    })
}

/// A named condition over `space`.
pub fn named_condition(unit: &ProgramUnit, space: &Space, name: &str) -> Result<Condition> {
    let def = unit.cond(name).ok_or_else(|| Error::UnknownName {
        kind: "condition",
        name: name.to_string(),
    })?;
    condition_of(unit, space, &def.expr, name)
}

/// A named function as the endofunction `param <- body`.
pub fn named_fn(unit: &ProgramUnit, space: &Space, name: &str) -> Result<PartialFn> {
    let def = unit.function(name).ok_or_else(|| Error::UnknownName {
        kind: "function",
        name: name.to_string(),
    })?;
    assign_fn(unit, space, &def.param, &def.body)
}

/// A condition given either by name or as an inline Boolean expression.
pub fn resolve_condition(unit: &ProgramUnit, space: &Space, text: &str) -> Result<Condition> {
    let text = text.trim();
    if unit.cond(text).is_some() {
        return named_condition(unit, space, text);
    }
    let e = super::parser::parse_condition_expr(unit, text)?;
    condition_of(unit, space, &e, text)
}

#[cfg(test)]
mod tests {
    use super::super::parser::{parse, parse_expr};
    use super::*;
    use crate::space::{Lifted, StateSpace};

    #[test]
    fn checked_arithmetic() {
        assert_eq!(arith(BinOp::Div, -7, 2), Some(-4));
        assert_eq!(arith(BinOp::Mod, -7, 2), Some(1));
        assert_eq!(arith(BinOp::Div, 1, 0), None);
        assert_eq!(arith(BinOp::Mod, 1, 0), None);
        assert_eq!(arith(BinOp::Pow, 2, 10), Some(1024));
        assert_eq!(arith(BinOp::Pow, 2, -1), None);
        assert_eq!(arith(BinOp::Mul, i64::MAX, 2), None);
    }

    #[test]
    fn conditions_and_functions() {
        let u = parse("domain A = 1..15\nvar x : A\ncond C = x < 10\nfn f(x) = x + 2\ncond D = f(x) > 12 or C").unwrap();
        let space = Arc::new(StateSpace::new(u.vars.clone()).unwrap());
        let c = named_condition(&u, &space, "C").unwrap();
        assert_eq!(c.count(), 9);
        let d = named_condition(&u, &space, "D").unwrap();
        assert_eq!(d.count(), 9 + 5);
        let f = named_fn(&u, &space, "f").unwrap();
        assert_eq!(f.at(space.encode(&[13]).unwrap()), Lifted::Defined(space.encode(&[15]).unwrap()));
        assert_eq!(f.at(space.encode(&[14]).unwrap()), Lifted::Bottom);
        let e = parse_expr(&u, "x / (x - 3) > 0").unwrap();
        let c = condition_of(&u, &space, &e, "e").unwrap();
        assert!(!c.holds(space.encode(&[3]).unwrap()));
    }

    #[test]
    fn call_binds_only_its_parameter() {
        let u = parse("domain D = 0..9\nvar x, y : D\nfn g(x) = x + y").unwrap();
        let space = Arc::new(StateSpace::new(u.vars.clone()).unwrap());
        let b = bind(&u, &space, &parse_expr(&u, "g(2) * 10 + x").unwrap()).unwrap();
        assert_eq!(b.eval_int(&[1, 3]), Some(51));
    }

    #[test]
    fn parameter_outside_the_space() {
        let u = parse("domain D = 0..9\nvar x, y : D\nfn half(y) = y / 2").unwrap();
        let space = Arc::new(StateSpace::new(vec![u.vars[0].clone()]).unwrap());
        let b = bind(&u, &space, &parse_expr(&u, "half(x + 4)").unwrap()).unwrap();
        assert_eq!(b.eval_int(&[6]), Some(5));
    }
}
