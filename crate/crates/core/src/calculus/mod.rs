//! A small while-language over finite integer state spaces and its
//! denotation as partial functions.

pub mod ast;
pub mod beta;
pub mod denote;
pub mod expr;
pub mod lexer;
pub mod parser;

pub use ast::{BetaRhs, BinOp, Expr, ProgramAst, ProgramDef, ProgramUnit, Stmt, UnOp};
pub use beta::beta_normalize;
pub use denote::{
    check_equiv, denote, denote_loop, denote_outcomes, denote_stmt, loop_iteration_count, program_space, unit_space, vars_space,
    while_parts, Denotation, Outcome,
};
pub use expr::{assign_fn, condition_of, named_condition, named_fn, resolve_condition};
pub use parser::{parse, parse_condition_expr, parse_expr, parse_int_expr, parse_stmt};
