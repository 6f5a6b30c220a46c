//! One function per subcommand. Each returns the result payload and exit code.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::{json, Value};
use tpa_core::arrows::{
    build_iso_graph, make_arrow0, parse_transform, search_arrow0, search_arrow1, verify_restricted, Arrow,
    ArrowKind, Certificate, GraphNode, IsoGraph, LoopView, SearchLimits,
};
use tpa_core::calculus::{
    denote, denote_outcomes, named_fn, parse, program_space, resolve_condition, unit_space, Outcome, ProgramUnit,
};
use tpa_core::condlab::{check_element_monotonicity, relaxation, weakening_report};
use tpa_core::orbit::{element_orders, nf_profile, orbit};
use tpa_core::{Condition, Lifted, PartialFn, Space};

use crate::report::{Exit, Failure};

pub struct Output {
    pub result: Value,
    pub exit: Exit,
    pub diagnostics: Vec<String>,
}

impl Output {
    fn ok(result: Value) -> Self {
        Output {
            result,
            exit: Exit::Success,
            diagnostics: Vec::new(),
        }
    }

    fn with_exit(mut self, holds: bool) -> Self {
        self.exit = if holds { Exit::Success } else { Exit::PropertyFails };
        self
    }
}

pub type CmdResult = Result<Output, Failure>;

pub fn load(path: &Path) -> Result<ProgramUnit, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    parse(&text).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

/// The function under analysis: a named `fn` or the denotation of a program.
pub enum Subject<'a> {
    Fn(&'a str),
    Program(&'a str),
}

impl Subject<'_> {
    pub fn resolve(&self, unit: &ProgramUnit) -> Result<(Space, PartialFn), Failure> {
        Ok(match self {
            Subject::Fn(name) => {
                let space = unit_space(unit)?;
                let f = named_fn(unit, &space, name)?;
                (space, f)
            }
            Subject::Program(name) => (program_space(unit, name)?, denote(unit, name)?),
        })
    }
}

fn parse_start(space: &Space, text: &str) -> Result<Lifted, Failure> {
    if text.trim() == "bottom" {
        return Ok(Lifted::Bottom);
    }
    Ok(Lifted::Defined(space.parse_assignment(text)?))
}

pub fn cmd_parse(unit: &ProgramUnit) -> CmdResult {
    let domains: Vec<Value> = unit
        .domains
        .iter()
        .map(|d| {
            json!({
                "name": d.name(),
                "size": d.len(),
                "min": d.elements().iter().min(),
                "max": d.elements().iter().max(),
                "descending": d.is_descending(),
            })
        })
        .collect();
    let vars: Vec<Value> = unit
        .vars
        .iter()
        .map(|v| json!({"name": v.name, "domain": v.domain.name()}))
        .collect();
    let conds: Vec<Value> = unit
        .conds
        .iter()
        .map(|c| json!({"name": c.name, "expr": c.expr.to_string()}))
        .collect();
    let fns: Vec<Value> = unit
        .fns
        .iter()
        .map(|f| json!({"name": f.name, "param": f.param, "body": f.body.to_string()}))
        .collect();
    let programs: Vec<Value> = unit
        .programs
        .iter()
        .map(|p| {
            let top: Vec<&str> = p.body.flatten().iter().map(|s| s.kind()).collect();
            json!({
                "name": p.name,
                "vars": p.vars,
                "line": p.line,
                "size": p.body.size(),
                "top_level": top,
                "source": p.body.to_string(),
            })
        })
        .collect();
    Ok(Output::ok(json!({
        "domains": domains,
        "vars": vars,
        "conds": conds,
        "fns": fns,
        "programs": programs,
    })))
}

pub fn cmd_denote(unit: &ProgramUnit, program: &str, table: bool) -> CmdResult {
    let d = denote_outcomes(unit, program)?;
    let mut counts = BTreeMap::from([("defined", 0usize), ("stuck", 0), ("diverges", 0)]);
    let mut rows = Vec::new();
    let mut stuck = Vec::new();
    let mut diverging = Vec::new();
    for s in d.space.states() {
        let o = d.at(s);
        let from = d.space.format_state(s);
        match o {
            Outcome::Defined(_) => *counts.get_mut("defined").unwrap() += 1,
            Outcome::Stuck => {
                *counts.get_mut("stuck").unwrap() += 1;
                stuck.push(Value::from(from.clone()));
            }
            Outcome::Diverge => {
                *counts.get_mut("diverges").unwrap() += 1;
                diverging.push(Value::from(from.clone()));
            }
        }
        if table {
            rows.push(Value::from(format!("{from} -> {}", d.space.format_lifted(o.lifted()))));
        }
    }
    let mut result = json!({
        "program": program,
        "vars": d.space.vars().iter().map(|v| v.name.clone()).collect::<Vec<_>>(),
        "states": d.space.len(),
        "counts": counts,
    });
    if table {
        result["rows"] = Value::from(rows);
        result["stuck_states"] = Value::from(stuck);
        result["diverging_states"] = Value::from(diverging);
    }
    Ok(Output::ok(result))
}

pub fn cmd_orbit(unit: &ProgramUnit, subject: Subject, cond: &str, start: &str) -> CmdResult {
    let (space, f) = subject.resolve(unit)?;
    let c = resolve_condition(unit, &space, cond)?;
    let x = parse_start(&space, start)?;
    let r = orbit(&f, &c, x)?;
    let trace: Vec<String> = r.trace.iter().map(|s| space.format_lifted(*s)).collect();
    Ok(Output::ok(json!({
        "start": space.format_lifted(r.start),
        "trace": trace,
        "applied": trace[1..],
        "stop_reason": r.stop_reason,
        "order": r.order,
    })))
}

pub fn cmd_order(unit: &ProgramUnit, subject: Subject, cond: &str, element: Option<&str>) -> CmdResult {
    let (space, f) = subject.resolve(unit)?;
    let c = resolve_condition(unit, &space, cond)?;
    let orders = element_orders(&f, &c)?;
    let profile = nf_profile(&f, &c)?;
    let table: Vec<Value> = space
        .states()
        .map(|s| json!({"state": space.format_state(s), "in_cond": c.holds(s), "order": orders[s.index()]}))
        .collect();
    let mut result = json!({
        "m": profile.order,
        "l": profile.limit,
        "profile": profile,
        "cond_states": c.count(),
        "table": table,
    });
    if let Some(e) = element {
        let x = parse_start(&space, e)?;
        let order = tpa_core::orbit::element_order(&f, &c, x)?;
        result["element"] = json!({"state": space.format_lifted(x), "order": order});
    }
    Ok(Output::ok(result))
}

pub fn cmd_profile(unit: &ProgramUnit, subject: Subject, cond: &str, cond2: &str) -> CmdResult {
    let (space, f) = subject.resolve(unit)?;
    let c = resolve_condition(unit, &space, cond)?;
    let c2 = resolve_condition(unit, &space, cond2)?;
    if c2.entails(&c)? {
        let rep = relaxation(&f, &c, &c2)?;
        let order_ok = rep.new_profile.order <= rep.old_profile.order;
        let limit_ok = rep.new_profile.limit <= rep.old_profile.limit;
        let elements_ok = check_element_monotonicity(&f, &c, &c2)?;
        let holds = order_ok && limit_ok && elements_ok;
        let mut out = Output::ok(json!({
            "direction": "strengthening",
            "report": rep,
            "laws": {"order": order_ok, "limit": limit_ok, "elements": elements_ok},
        }))
        .with_exit(holds);
        if !order_ok {
            out.diagnostics.push("the order grew under strengthening".into());
        }
        Ok(out)
    } else if c.entails(&c2)? {
        let rep = weakening_report(&f, &c, &c2)?;
        let order_ok = rep.new_profile.order >= rep.old_profile.order;
        let limit_ok = rep.new_profile.limit >= rep.old_profile.limit;
        let elements_ok = check_element_monotonicity(&f, &c2, &c)?;
        let holds = order_ok && limit_ok && elements_ok;
        let mut out = Output::ok(json!({
            "direction": "weakening",
            "report": rep,
            "laws": {"order": order_ok, "limit": limit_ok, "elements": elements_ok},
        }))
        .with_exit(holds);
        if !order_ok {
            out.diagnostics.push("the order shrank under weakening".into());
        }
        Ok(out)
    } else {
        Err(Failure {
            exit: Exit::PropertyFails,
            kind: "entailment",
            message: format!("neither `{cond}` nor `{cond2}` entails the other"),
        })
    }
}

pub struct ArrowArgs<'a> {
    pub kind: u8,
    pub from_unit: &'a ProgramUnit,
    pub from: &'a str,
    pub from_cond: Option<&'a str>,
    pub to_unit: &'a ProgramUnit,
    pub to: &'a str,
    pub to_cond: Option<&'a str>,
    pub map: Option<&'a Path>,
    pub limits: SearchLimits,
}

fn certificate_json(src: &LoopView, cert: &Certificate) -> Value {
    let violation = cert.violation.as_ref().map(|v| {
        json!({
            "clause": v.clause,
            "state": src.space.format_state(v.state),
            "other": v.other.map(|o| src.space.format_state(o)),
            "message": v.message,
        })
    });
    json!({"holds": cert.holds, "violation": violation})
}

pub fn arrow_json(a: &Arrow) -> Value {
    let kind = match a.kind {
        ArrowKind::Type0 => "type0",
        ArrowKind::Type1 => "type1",
        ArrowKind::Type2Asserted => "type2_asserted",
    };
    let pairs: Vec<String> = match (&a.source_view, &a.target_view) {
        (Some(s), Some(t)) => a
            .pairs()
            .map(|(x, y)| format!("{} -> {}", s.space.format_state(x), t.space.format_state(y)))
            .collect(),
        _ => Vec::new(),
    };
    json!({
        "kind": kind,
        "source": a.source,
        "target": a.target,
        "target_view": a.target_view.as_ref().map(|v| v.name.clone()),
        "restricted": a.restricted,
        "decomposition": a.decomposition,
        "range_states": a.range.as_ref().map(Condition::count),
        "witness": a.witness,
        "pairs": pairs,
    })
}

pub fn cmd_arrow(args: &ArrowArgs) -> CmdResult {
    let src = Arc::new(LoopView::from_program(args.from_unit, args.from, args.from_cond)?);
    match args.kind {
        0 => {
            let tgt = Arc::new(LoopView::from_program(args.to_unit, args.to, args.to_cond)?);
            if let Some(path) = args.map {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
                let t = parse_transform(&src, &tgt, &text)?;
                let partial = t.iter().any(Option::is_none);
                let cert = if partial {
                    verify_restricted(&src, &tgt, &t)?
                } else {
                    tpa_core::arrows::verify_arrow0(&src, &tgt, &t)?
                };
                let arrow = if cert.holds && !partial {
                    make_arrow0(&src, &tgt, t)?.ok().map(|a| arrow_json(&a))
                } else {
                    None
                };
                return Ok(Output::ok(json!({
                    "mode": "verify",
                    "found": cert.holds,
                    "certificate": certificate_json(&src, &cert),
                    "arrow": arrow,
                }))
                .with_exit(cert.holds));
            }
            let found = search_arrow0(&src, &tgt, &args.limits)?;
            Ok(Output::ok(json!({
                "mode": "search",
                "found": found.is_some(),
                "arrow": found.as_ref().map(arrow_json),
            }))
            .with_exit(found.is_some()))
        }
        1 => {
            if args.map.is_some() {
                return Err(Failure::usage("--map applies to type-0 arrows only"));
            }
            if args.to_cond.is_some() {
                return Err(Failure::usage("--to-cond applies to type-0 arrows only"));
            }
            let found = search_arrow1(&src, args.to_unit, args.to, &args.limits)?;
            Ok(Output::ok(json!({
                "mode": "search",
                "found": found.is_some(),
                "arrow": found.as_ref().map(arrow_json),
            }))
            .with_exit(found.is_some()))
        }
        k => Err(Failure::usage(format!("unsupported arrow kind {k}; use 0 or 1"))),
    }
}

pub struct GraphInput {
    pub path: PathBuf,
    pub unit: ProgramUnit,
}

/// Node labels: program names when unique, else `file-stem:program`.
fn labels(files: &[GraphInput], picked: &[(usize, String)]) -> Result<Vec<String>, Failure> {
    let mut by_name: BTreeMap<&str, usize> = BTreeMap::new();
    for (_, p) in picked {
        *by_name.entry(p).or_default() += 1;
    }
    let labels: Vec<String> = picked
        .iter()
        .map(|(i, p)| {
            if by_name[p.as_str()] == 1 {
                p.clone()
            } else {
                let stem = files[*i].path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                format!("{stem}:{p}")
            }
        })
        .collect();
    let mut seen = BTreeMap::new();
    for (l, (i, _)) in labels.iter().zip(picked) {
        if let Some(j) = seen.insert(l.clone(), *i) {
            return Err(Failure::usage(format!(
                "node `{l}` is ambiguous between {} and {}",
                files[j].path.display(),
                files[*i].path.display()
            )));
        }
    }
    Ok(labels)
}

pub fn cmd_graph(
    files: &[GraphInput],
    only: &[String],
    conds: &BTreeMap<String, String>,
    budget: usize,
    limits: &SearchLimits,
) -> CmdResult {
    let mut picked = Vec::new();
    for (i, f) in files.iter().enumerate() {
        for p in &f.unit.programs {
            if only.is_empty() || only.contains(&p.name) {
                picked.push((i, p.name.clone()));
            }
        }
    }
    for name in only.iter().chain(conds.keys()) {
        if !picked.iter().any(|(_, p)| p == name) {
            return Err(Failure::usage(format!("no program named `{name}` in the given files")));
        }
    }
    if picked.is_empty() {
        return Err(Failure::usage("no programs to graph"));
    }
    let labels = labels(files, &picked)?;
    let nodes: Vec<GraphNode> = picked
        .iter()
        .zip(&labels)
        .map(|((i, p), label)| GraphNode {
            label: label.clone(),
            unit: &files[*i].unit,
            program: p.clone(),
            cond: conds.get(p).cloned(),
        })
        .collect();
    let g = build_iso_graph(&nodes, budget, limits)?;
    let exit = if g.truncated { Exit::Budget } else { Exit::Success };
    Ok(Output {
        result: graph_json(&g),
        exit,
        diagnostics: g.diagnostics.clone(),
    })
}

fn class(infinite: bool, undefined: bool) -> &'static str {
    match (infinite, undefined) {
        (true, true) => "H1+K1",
        (true, false) => "H1",
        (false, true) => "K1",
        (false, false) => "halting",
    }
}

pub fn graph_json(g: &IsoGraph) -> Value {
    let component_of = |n: usize| g.components.iter().position(|c| c.members.contains(&n));
    let nodes: Vec<Value> = g
        .nodes
        .iter()
        .enumerate()
        .map(|(i, label)| {
            json!({
                "label": label,
                "component": component_of(i),
                "guaranteed_halting": g.guaranteed_halting[i],
                "diverges": g.diverges[i],
                "gets_stuck": g.gets_stuck[i],
            })
        })
        .collect();
    let edges: Vec<Value> = g
        .edges
        .iter()
        .map(|e| {
            let mut a = arrow_json(&e.arrow);
            a["from"] = Value::from(g.nodes[e.from].clone());
            a["to"] = Value::from(g.nodes[e.to].clone());
            a
        })
        .collect();
    let components: Vec<Value> = g
        .components
        .iter()
        .map(|c| {
            json!({
                "members": c.members.iter().map(|&m| g.nodes[m].clone()).collect::<Vec<_>>(),
                "contains_infinite_loop": c.contains_infinite_loop,
                "contains_undefined": c.contains_undefined,
                "class": class(c.contains_infinite_loop, c.contains_undefined),
            })
        })
        .collect();
    json!({
        "nodes": nodes,
        "edges": edges,
        "components": components,
        "truncated": g.truncated,
        "searches": g.searches,
    })
}
