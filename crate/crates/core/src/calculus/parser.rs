//! Recursive-descent parser for `.tpf` sources.

use std::collections::BTreeSet;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use crate::error::{Error, Result};
use crate::space::{Domain, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Int,
    Bool,
}

pub fn parse(src: &str) -> Result<ProgramUnit> {
    let mut p = Parser::new(src)?;
    p.unit()?;
    Ok(p.unit)
}

/// Parses a standalone expression against the names declared in `unit`.
pub fn parse_expr(unit: &ProgramUnit, src: &str) -> Result<Expr> {
    let mut p = Parser::new(src)?;
    p.unit = unit.clone();
    let e = p.expr()?;
    p.skip_newlines();
    p.expect(Tok::Eof, "end of expression")?;
    Ok(e)
}

/// Parses `src` as a boolean expression over `unit`.
pub fn parse_condition_expr(unit: &ProgramUnit, src: &str) -> Result<Expr> {
    let e = parse_expr(unit, src)?;
    check_ty(&e, Ty::Bool, "condition")?;
    Ok(e)
}

/// Parses `src` as an integer expression over `unit`.
pub fn parse_int_expr(unit: &ProgramUnit, src: &str) -> Result<Expr> {
    let e = parse_expr(unit, src)?;
    check_ty(&e, Ty::Int, "expression")?;
    Ok(e)
}

/// Parses a single statement (or `;`-separated sequence) against `unit`.
pub fn parse_stmt(unit: &ProgramUnit, src: &str) -> Result<Stmt> {
    let mut p = Parser::new(src)?;
    p.unit = unit.clone();
    let s = p.line_seq()?;
    p.skip_newlines();
    p.expect(Tok::Eof, "end of statement")?;
    p.check_stmt(&s)?;
    Ok(s)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    paren: usize,
    unit: ProgramUnit,
}

impl Parser {
    fn new(src: &str) -> Result<Self> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
            paren: 0,
            unit: ProgramUnit {
                domains: Vec::new(),
                vars: Vec::new(),
                conds: Vec::new(),
                fns: Vec::new(),
                programs: Vec::new(),
            },
        })
    }

    fn peek_tok(&self) -> &Token {
        let mut i = self.pos;
        if self.paren > 0 {
            while self.toks[i].tok == Tok::Newline {
                i += 1;
            }
        }
        &self.toks[i]
    }

    fn peek(&self) -> &Tok {
        &self.peek_tok().tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        if self.paren > 0 {
            while self.toks[self.pos].tok == Tok::Newline {
                self.pos += 1;
            }
        }
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let t = self.peek_tok();
        Err(Error::Syntax {
            line: t.line,
            col: t.col,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            self.err(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.err(format!("expected `{kw}`, found {}", describe(self.peek())))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_reserved(&s) => {
                self.bump();
                Ok(s)
            }
            other => self.err(format!("expected {what}, found {}", describe(&other))),
        }
    }

    fn skip_newlines(&mut self) {
        while matches!(self.toks[self.pos].tok, Tok::Newline | Tok::Semi) {
            self.pos += 1;
        }
    }

    fn end_of_decl(&mut self) -> Result<()> {
        match self.peek() {
            Tok::Newline | Tok::Eof => Ok(()),
            other => self.err(format!("expected end of line, found {}", describe(other))),
        }
    }

    fn int(&mut self) -> Result<i64> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok(if neg { -n } else { n })
            }
            ref other => self.err(format!("expected integer, found {}", describe(other))),
        }
    }

    fn line(&self) -> usize {
        self.peek_tok().line
    }

    fn unit(&mut self) -> Result<()> {
        loop {
            self.skip_newlines();
            if *self.peek() == Tok::Eof {
                return Ok(());
            }
            let kw = match self.peek() {
                Tok::Ident(s) => s.clone(),
                other => return self.err(format!("expected a declaration, found {}", describe(other))),
            };
            match kw.as_str() {
                "domain" => self.domain_decl()?,
                "var" => self.var_decl()?,
                "cond" => self.cond_decl()?,
                "fn" => self.fn_decl()?,
                "program" => self.program_decl()?,
                _ => return self.err(format!("unknown declaration `{kw}`")),
            }
            self.end_of_decl()?;
        }
    }

    fn domain_spec(&mut self, name: &str) -> Result<Domain> {
        let mut dom = if *self.peek() == Tok::LBrace {
            self.bump();
            let mut els = vec![self.int()?];
            while *self.peek() == Tok::Comma {
                self.bump();
                els.push(self.int()?);
            }
            self.expect(Tok::RBrace, "`}`")?;
            Domain::new(name, els)?
        } else {
            let lo = self.int()?;
            self.expect(Tok::DotDot, "`..`")?;
            let hi = self.int()?;
            let step = if self.eat_kw("step") { self.int()? } else { 1 };
            if step <= 0 {
                return self.err("domain step must be positive");
            }
            if lo > hi {
                return Err(Error::EmptyDomain(name.to_string()));
            }
            Domain::new(name, (lo..=hi).step_by(step as usize))?
        };
        if self.eat_kw("desc") {
            dom = dom.descending();
        }
        Ok(dom)
    }

    fn domain_decl(&mut self) -> Result<()> {
        self.expect_kw("domain")?;
        let name = self.ident("domain name")?;
        if self.unit.domains.iter().any(|d| d.name() == name) {
            return Err(Error::DuplicateName { kind: "domain", name });
        }
        self.expect(Tok::Assign, "`=`")?;
        let dom = self.domain_spec(&name)?;
        self.unit.domains.push(dom);
        Ok(())
    }

    fn check_fresh(&self, name: &str) -> Result<()> {
        if self.unit.var(name).is_some() || self.unit.cond(name).is_some() || self.unit.function(name).is_some() {
            return Err(Error::DuplicateName {
                kind: "name",
                name: name.to_string(),
            });
        }
        Ok(())
    }

    fn var_decl(&mut self) -> Result<()> {
        self.expect_kw("var")?;
        let mut names = vec![self.ident("variable name")?];
        while *self.peek() == Tok::Comma {
            self.bump();
            names.push(self.ident("variable name")?);
        }
        self.expect(Tok::Colon, "`:`")?;
        let domain = match self.peek().clone() {
            Tok::Ident(d) if !is_reserved(&d) => {
                self.bump();
                self.unit
                    .domains
                    .iter()
                    .find(|x| x.name() == d)
                    .cloned()
                    .ok_or(Error::UnknownName { kind: "domain", name: d })?
            }
            _ => self.domain_spec(&names[0])?,
        };
        for name in names {
            self.check_fresh(&name)?;
            self.unit.vars.push(Var {
                name,
                domain: domain.clone(),
            });
        }
        Ok(())
    }

    fn cond_decl(&mut self) -> Result<()> {
        self.expect_kw("cond")?;
        let name = self.ident("condition name")?;
        self.check_fresh(&name)?;
        self.expect(Tok::Assign, "`=`")?;
        let expr = self.expr()?;
        check_ty(&expr, Ty::Bool, &format!("condition `{name}`"))?;
        self.unit.conds.push(CondDef { name, expr });
        Ok(())
    }

    fn fn_decl(&mut self) -> Result<()> {
        self.expect_kw("fn")?;
        let name = self.ident("function name")?;
        self.check_fresh(&name)?;
        self.expect(Tok::LParen, "`(`")?;
        let param = self.ident("parameter")?;
        self.expect(Tok::RParen, "`)`")?;
        if self.unit.var(&param).is_none() {
            return Err(Error::UnknownName {
                kind: "variable",
                name: param,
            });
        }
        self.expect(Tok::Assign, "`=`")?;
        let body = self.expr()?;
        check_ty(&body, Ty::Int, &format!("function `{name}`"))?;
        self.unit.fns.push(FnDef { name, param, body });
        Ok(())
    }

    fn program_decl(&mut self) -> Result<()> {
        self.expect_kw("program")?;
        let line = self.line();
        let name = self.ident("program name")?;
        if self.unit.program(&name).is_some() {
            return Err(Error::DuplicateName { kind: "program", name });
        }
        let vars = if *self.peek() == Tok::LParen {
            self.bump();
            let mut vs = vec![self.ident("variable name")?];
            while *self.peek() == Tok::Comma {
                self.bump();
                vs.push(self.ident("variable name")?);
            }
            self.expect(Tok::RParen, "`)`")?;
            for v in &vs {
                if self.unit.var(v).is_none() {
                    return Err(Error::UnknownName {
                        kind: "variable",
                        name: v.clone(),
                    });
                }
            }
            vs
        } else {
            self.unit.vars.iter().map(|v| v.name.clone()).collect()
        };
        self.expect(Tok::Assign, "`=`")?;
        let body = self.line_seq()?;
        self.check_stmt(&body)?;
        let used = stmt_vars(&self.unit, &body);
        if let Some(v) = used.iter().find(|v| !vars.contains(v)) {
            return Err(Error::UnknownName {
                kind: "variable",
                name: format!("{v} (not in the variables of program `{name}`)"),
            });
        }
        self.unit.programs.push(ProgramDef {
            name,
            vars,
            body,
            line,
        });
        Ok(())
    }

    /// Statements separated by `;` up to the end of the line.
    fn line_seq(&mut self) -> Result<Stmt> {
        let mut items = vec![self.stmt()?];
        while *self.peek() == Tok::Semi {
            self.bump();
            if matches!(self.peek(), Tok::Newline | Tok::Eof) {
                break;
            }
            items.push(self.stmt()?);
        }
        Ok(seq(items))
    }

    fn block(&mut self) -> Result<Stmt> {
        let saved = self.paren;
        self.paren = 0;
        self.expect(Tok::LBrace, "`{`")?;
        let mut items = Vec::new();
        loop {
            self.skip_newlines();
            if *self.peek() == Tok::RBrace {
                self.bump();
                break;
            }
            if *self.peek() == Tok::Eof {
                return self.err("unclosed `{`");
            }
            items.push(self.stmt()?);
            match self.peek() {
                Tok::Semi | Tok::Newline => {}
                Tok::RBrace => {}
                other => return self.err(format!("expected `;`, newline or `}}`, found {}", describe(other))),
            }
        }
        self.paren = saved;
        Ok(if items.is_empty() { Stmt::Skip } else { seq(items) })
    }

    fn stmt(&mut self) -> Result<Stmt> {
        match self.peek().clone() {
            Tok::LBrace => self.block(),
            Tok::LParen => self.multi_beta(),
            Tok::Ident(kw) => match kw.as_str() {
                "skip" => {
                    self.bump();
                    Ok(Stmt::Skip)
                }
                "abort" => {
                    self.bump();
                    Ok(Stmt::Abort)
                }
                "require" => {
                    self.bump();
                    Ok(Stmt::Require(self.expr()?))
                }
                "if" => self.if_stmt(),
                "while" => {
                    self.bump();
                    let cond = self.expr()?;
                    let body = self.block()?;
                    Ok(Stmt::While {
                        cond,
                        body: Box::new(body),
                    })
                }
                _ => self.assignment(),
            },
            other => self.err(format!("expected a statement, found {}", describe(&other))),
        }
    }

    fn if_stmt(&mut self) -> Result<Stmt> {
        self.expect_kw("if")?;
        let cond = self.expr()?;
        let then = self.block()?;
        let mut k = self.pos;
        while self.toks[k].tok == Tok::Newline {
            k += 1;
        }
        let els = if matches!(&self.toks[k].tok, Tok::Ident(s) if s == "else") {
            self.pos = k + 1;
            if self.is_kw("if") {
                self.if_stmt()?
            } else {
                self.block()?
            }
        } else {
            Stmt::Skip
        };
        Ok(Stmt::If {
            cond,
            then: Box::new(then),
            els: Box::new(els),
        })
    }

    fn beta_rhs(&mut self) -> Result<BetaRhs> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "bottom" => {
                self.bump();
                Ok(BetaRhs::Bottom)
            }
            Tok::Ident(s) => {
                self.bump();
                if self.unit.var(&s).is_none() {
                    return Err(Error::UnknownName { kind: "variable", name: s });
                }
                Ok(BetaRhs::Var(s))
            }
            _ => Ok(BetaRhs::Lit(self.int()?)),
        }
    }

    fn target(&mut self) -> Result<String> {
        let name = self.ident("assignment target")?;
        if self.unit.var(&name).is_none() {
            return Err(Error::UnknownName {
                kind: "variable",
                name,
            });
        }
        Ok(name)
    }

    fn multi_beta(&mut self) -> Result<Stmt> {
        self.expect(Tok::LParen, "`(`")?;
        let mut targets = vec![self.target()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            targets.push(self.target()?);
        }
        self.expect(Tok::RParen, "`)`")?;
        self.expect(Tok::Arrow, "`<-`")?;
        let rhs = if *self.peek() == Tok::LParen {
            self.bump();
            let mut rhs = Vec::new();
            if *self.peek() != Tok::RParen {
                rhs.push(self.beta_rhs()?);
                while *self.peek() == Tok::Comma {
                    self.bump();
                    rhs.push(self.beta_rhs()?);
                }
            }
            self.expect(Tok::RParen, "`)`")?;
            rhs
        } else {
            vec![self.beta_rhs()?]
        };
        Ok(Stmt::Beta { targets, rhs })
    }

    fn assignment(&mut self) -> Result<Stmt> {
        let var = self.target()?;
        self.expect(Tok::Arrow, "`<-`")?;
        // A lone literal, variable or `bottom` is a plain assignment.
        let simple_len = match (self.peek_at(0), self.peek_at(1)) {
            (Tok::Minus, Tok::Int(_)) => Some(2),
            (Tok::Int(_), _) => Some(1),
            (Tok::Ident(s), _) if s == "bottom" || self.unit.var(s).is_some() => Some(1),
            _ => None,
        };
        if let Some(len) = simple_len {
            if matches!(
                self.peek_at(len),
                Tok::Semi | Tok::Newline | Tok::RBrace | Tok::Eof
            ) {
                let rhs = self.beta_rhs()?;
                return Ok(Stmt::Beta {
                    targets: vec![var],
                    rhs: vec![rhs],
                });
            }
        }
        let expr = self.expr()?;
        Ok(Stmt::Apply { var, expr })
    }

    fn check_stmt(&self, s: &Stmt) -> Result<()> {
        match s {
            Stmt::Require(c) => check_ty(c, Ty::Bool, "require"),
            Stmt::Apply { expr, var } => check_ty(expr, Ty::Int, &format!("assignment to `{var}`")),
            Stmt::If { cond, then, els } => {
                check_ty(cond, Ty::Bool, "if condition")?;
                self.check_stmt(then)?;
                self.check_stmt(els)
            }
            Stmt::While { cond, body } => {
                check_ty(cond, Ty::Bool, "while condition")?;
                self.check_stmt(body)
            }
            Stmt::Seq(items) => items.iter().try_for_each(|i| self.check_stmt(i)),
            _ => Ok(()),
        }
    }

    pub(crate) fn expr(&mut self) -> Result<Expr> {
        self.or_expr()
    }

    fn or_expr(&mut self) -> Result<Expr> {
        let mut e = self.and_expr()?;
        while *self.peek() == Tok::OrOr || self.is_kw("or") {
            self.bump();
            e = Expr::bin(BinOp::Or, e, self.and_expr()?);
        }
        Ok(e)
    }

    fn and_expr(&mut self) -> Result<Expr> {
        let mut e = self.cmp_expr()?;
        while *self.peek() == Tok::AndAnd || self.is_kw("and") {
            self.bump();
            e = Expr::bin(BinOp::And, e, self.cmp_expr()?);
        }
        Ok(e)
    }

    fn cmp_expr(&mut self) -> Result<Expr> {
        let e = self.add_expr()?;
        let op = match self.peek() {
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::EqEq | Tok::Assign => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            _ => return Ok(e),
        };
        self.bump();
        let rhs = self.add_expr()?;
        if matches!(self.peek(), Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge | Tok::EqEq | Tok::Ne) {
            return self.err("comparisons do not chain; use `and`");
        }
        Ok(Expr::bin(op, e, rhs))
    }

    fn add_expr(&mut self) -> Result<Expr> {
        let mut e = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(e),
            };
            self.bump();
            e = Expr::bin(op, e, self.mul_expr()?);
        }
    }

    fn mul_expr(&mut self) -> Result<Expr> {
        let mut e = self.pow_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                Tok::Percent => BinOp::Mod,
                Tok::Ident(s) if s == "mod" => BinOp::Mod,
                _ => return Ok(e),
            };
            self.bump();
            e = Expr::bin(op, e, self.pow_expr()?);
        }
    }

    fn pow_expr(&mut self) -> Result<Expr> {
        let base = self.unary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exp = self.pow_expr()?;
            return Ok(Expr::bin(BinOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(match self.unary()? {
                Expr::Int(n) => Expr::Int(-n),
                e => Expr::Unary(UnOp::Neg, Box::new(e)),
            });
        }
        if *self.peek() == Tok::Bang || self.is_kw("not") {
            self.bump();
            return Ok(Expr::not(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::LParen => {
                self.bump();
                self.paren += 1;
                let e = self.expr();
                let close = e.and_then(|e| self.expect(Tok::RParen, "`)`").map(|_| e));
                self.paren -= 1;
                close
            }
            Tok::Ident(name) => {
                match name.as_str() {
                    "true" | "True" => {
                        self.bump();
                        return Ok(Expr::Bool(true));
                    }
                    "false" | "False" => {
                        self.bump();
                        return Ok(Expr::Bool(false));
                    }
                    _ => {}
                }
                if is_reserved(&name) {
                    return self.err(format!("unexpected keyword `{name}`"));
                }
                self.bump();
                if self.unit.var(&name).is_some() {
                    Ok(Expr::Var(name))
                } else if self.unit.cond(&name).is_some() {
                    Ok(Expr::Cond(name))
                } else if self.unit.function(&name).is_some() {
                    self.expect(Tok::LParen, "`(` after function name")?;
                    self.paren += 1;
                    let arg = self.expr();
                    let close = arg.and_then(|a| self.expect(Tok::RParen, "`)`").map(|_| a));
                    self.paren -= 1;
                    Ok(Expr::Call(name, Box::new(close?)))
                } else {
                    Err(Error::UnknownName { kind: "name", name })
                }
            }
            other => self.err(format!("expected an expression, found {}", describe(&other))),
        }
    }
}

fn seq(mut items: Vec<Stmt>) -> Stmt {
    if items.len() == 1 {
        items.pop().expect("one item")
    } else {
        Stmt::Seq(items)
    }
}

const RESERVED: &[&str] = &[
    "domain", "var", "cond", "fn", "program", "skip", "abort", "require", "if", "else", "while", "bottom", "and", "or",
    "not", "mod", "true", "false", "True", "False", "desc", "step",
];

fn is_reserved(s: &str) -> bool {
    RESERVED.contains(&s)
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(n) => format!("`{n}`"),
        Tok::Newline => "end of line".into(),
        Tok::Eof => "end of input".into(),
        other => format!("{other:?}"),
    }
}

fn infer(e: &Expr) -> Result<Ty> {
    let want = |e: &Expr, t: Ty, ctx: &str| -> Result<()> {
        let got = infer(e)?;
        if got == t {
            Ok(())
        } else {
            Err(Error::Type(format!("{ctx}: expected {t:?}, found {got:?} in `{e}`")))
        }
    };
    Ok(match e {
        Expr::Int(_) | Expr::Var(_) => Ty::Int,
        Expr::Bool(_) | Expr::Cond(_) => Ty::Bool,
        Expr::Call(_, arg) => {
            want(arg, Ty::Int, "function argument")?;
            Ty::Int
        }
        Expr::Unary(UnOp::Neg, a) => {
            want(a, Ty::Int, "negation")?;
            Ty::Int
        }
        Expr::Unary(UnOp::Not, a) => {
            want(a, Ty::Bool, "logical not")?;
            Ty::Bool
        }
        Expr::Binary(op, a, b) => {
            let (operand, result) = if op.is_arith() {
                (Ty::Int, Ty::Int)
            } else if op.is_comparison() {
                (Ty::Int, Ty::Bool)
            } else {
                (Ty::Bool, Ty::Bool)
            };
            let ctx = format!("operator `{}`", op.symbol());
            want(a, operand, &ctx)?;
            want(b, operand, &ctx)?;
            result
        }
    })
}

fn check_ty(e: &Expr, t: Ty, ctx: &str) -> Result<()> {
    let got = infer(e)?;
    if got != t {
        return Err(Error::Type(format!("{ctx}: expected {t:?}, found {got:?} in `{e}`")));
    }
    Ok(())
}

/// State variables an expression reads, through conditions and functions.
pub fn expr_vars(unit: &ProgramUnit, e: &Expr) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_expr(unit, e, &mut out);
    out
}

fn collect_expr(unit: &ProgramUnit, e: &Expr, out: &mut BTreeSet<String>) {
    match e {
        Expr::Int(_) | Expr::Bool(_) => {}
        Expr::Var(v) => {
            out.insert(v.clone());
        }
        Expr::Cond(c) => {
            if let Some(d) = unit.cond(c) {
                collect_expr(unit, &d.expr, out);
            }
        }
        Expr::Call(f, arg) => {
            collect_expr(unit, arg, out);
            if let Some(d) = unit.function(f) {
                let mut body = BTreeSet::new();
                collect_expr(unit, &d.body, &mut body);
                body.remove(&d.param);
                out.extend(body);
            }
        }
        Expr::Unary(_, a) => collect_expr(unit, a, out),
        Expr::Binary(_, a, b) => {
            collect_expr(unit, a, out);
            collect_expr(unit, b, out);
        }
    }
}

/// State variables a statement reads or writes.
pub fn stmt_vars(unit: &ProgramUnit, s: &Stmt) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_stmt(unit, s, &mut out);
    out
}

fn collect_stmt(unit: &ProgramUnit, s: &Stmt, out: &mut BTreeSet<String>) {
    match s {
        Stmt::Skip | Stmt::Abort => {}
        Stmt::Require(c) => collect_expr(unit, c, out),
        Stmt::Beta { targets, rhs } => {
            out.extend(targets.iter().cloned());
            for r in rhs {
                if let BetaRhs::Var(v) = r {
                    out.insert(v.clone());
                }
            }
        }
        Stmt::Apply { var, expr } => {
            out.insert(var.clone());
            collect_expr(unit, expr, out);
        }
        Stmt::If { cond, then, els } => {
            collect_expr(unit, cond, out);
            collect_stmt(unit, then, out);
            collect_stmt(unit, els, out);
        }
        Stmt::While { cond, body } => {
            collect_expr(unit, cond, out);
            collect_stmt(unit, body, out);
        }
        Stmt::Seq(items) => items.iter().for_each(|i| collect_stmt(unit, i, out)),
    }
}
