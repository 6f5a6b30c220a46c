//! Isomorphism arrows between loops: verification, search, composition,
//! inversion, and the isomorphism graph.
//!
//! Every arrow endpoint is a [`LoopView`]: a state space together with the
//! per-state truth-preservation orders of a loop body under its condition.
//! A type-0 arrow is a state map `T` that is injective, monotone in the
//! canonical state order, sends condition states to condition states and
//! keeps every order unchanged. A type-1 arrow is a type-0 arrow into one
//! contiguous segment of the target program whose image lies in the range
//! of the segment's prefix.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::calculus::{
    denote_loop, denote_outcomes, denote_stmt, program_space, resolve_condition, Denotation, Outcome, ProgramUnit,
    Stmt,
};
use crate::condition::Condition;
use crate::error::{Error, Result};
use crate::orbit::{element_orders, ExtOrder};
use crate::pfn::PartialFn;
use crate::space::{same_space, Lifted, Space, StateId};

/// Orders and condition of a loop, as seen by arrows.
#[derive(Debug, Clone)]
pub struct LoopView {
    pub name: String,
    pub space: Space,
    pub orders: Vec<ExtOrder>,
    pub cond: Condition,
}

impl PartialEq for LoopView {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.orders == other.orders && self.cond == other.cond
    }
}

impl LoopView {
    /// The loop `while cond { body }`.
    pub fn from_body(name: impl Into<String>, body: &PartialFn, cond: &Condition) -> Result<Self> {
        Ok(LoopView {
            name: name.into(),
            space: body.domain_space().clone(),
            orders: element_orders(body, cond)?,
            cond: cond.clone(),
        })
    }

    /// A straight-line program run once: order 0 where it is defined, `-1` elsewhere.
    pub fn single_pass(name: impl Into<String>, f: &PartialFn) -> Self {
        let cond = f.domain_condition();
        let orders = f
            .domain_space()
            .states()
            .map(|s| if cond.holds(s) { ExtOrder::Finite(0) } else { ExtOrder::NegOne })
            .collect();
        LoopView {
            name: name.into(),
            space: f.domain_space().clone(),
            orders,
            cond,
        }
    }

    /// View of a named program.
    ///
    /// With a condition, the program is the loop body and the condition is
    /// the loop test. Without one, a while-rooted program contributes its own
    /// body and test and any other program is viewed as a single pass.
    pub fn from_program(unit: &ProgramUnit, program: &str, cond: Option<&str>) -> Result<Self> {
        let space = program_space(unit, program)?;
        let def = unit.program(program).expect("checked by program_space");
        match cond {
            Some(text) => {
                let c = resolve_condition(unit, &space, text)?;
                let body = denote_stmt(unit, &space, &def.body)?.to_pfn();
                Self::from_body(format!("{program} under {text}"), &body, &c)
            }
            None => Self::from_statements(unit, &space, &def.body.flatten(), program),
        }
    }

    /// View of a run of top-level statements.
    pub fn from_statements(unit: &ProgramUnit, space: &Space, items: &[Stmt], name: &str) -> Result<Self> {
        if let [Stmt::While { cond, body }] = items {
            let c = crate::calculus::condition_of(unit, space, cond, &cond.to_string())?;
            let body = denote_stmt(unit, space, body)?.to_pfn();
            return Self::from_body(name, &body, &c);
        }
        let f = denote_stmt(unit, space, &seq_of(items))?.to_pfn();
        Ok(Self::single_pass(name, &f))
    }

    fn size(&self) -> usize {
        self.space.len()
    }
}

fn seq_of(items: &[Stmt]) -> Stmt {
    match items {
        [] => Stmt::Skip,
        [one] => one.clone(),
        many => Stmt::Seq(many.to_vec()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrowKind {
    Type0,
    Type1,
    Type2Asserted,
}

/// The four defining clauses of a type-0 arrow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Clause {
    Injective,
    Monotone,
    ConditionImplication,
    OrderInvariance,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::Injective => "(a) injective",
            Clause::Monotone => "(b) order-preserving",
            Clause::ConditionImplication => "(c) condition implication",
            Clause::OrderInvariance => "(d) order invariance",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub clause: Clause,
    pub state: StateId,
    /// Second source state for injectivity and monotonicity failures.
    pub other: Option<StateId>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub holds: bool,
    pub violation: Option<Violation>,
}

impl Certificate {
    fn ok() -> Self {
        Certificate {
            holds: true,
            violation: None,
        }
    }

    fn fail(clause: Clause, state: StateId, other: Option<StateId>, message: String) -> Self {
        Certificate {
            holds: false,
            violation: Some(Violation {
                clause,
                state,
                other,
                message,
            }),
        }
    }
}

/// Position of a type-1 target segment among the target's top-level statements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    /// Statements before the segment.
    pub prefix: usize,
    /// Statements in the segment.
    pub segment: usize,
    /// Statements after the segment.
    pub suffix: usize,
}

#[derive(Debug, Clone)]
pub struct Arrow {
    pub kind: ArrowKind,
    pub source: String,
    pub target: String,
    pub source_view: Option<Arc<LoopView>>,
    pub target_view: Option<Arc<LoopView>>,
    /// Image of each source state; `None` only on restricted arrows.
    pub transform: Vec<Option<StateId>>,
    /// Some source states outside the source condition are left unmapped.
    pub restricted: bool,
    pub decomposition: Option<Decomposition>,
    /// Range of the prefix for type-1 arrows.
    pub range: Option<Condition>,
    pub witness: Option<String>,
}

impl Arrow {
    /// Mapped pairs in source order.
    pub fn pairs(&self) -> impl Iterator<Item = (StateId, StateId)> + '_ {
        self.transform
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.map(|t| (StateId(i as u32), t)))
    }

    fn views(&self) -> Result<(&Arc<LoopView>, &Arc<LoopView>)> {
        match (&self.source_view, &self.target_view) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::NotComposable("asserted arrows carry no transform".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_source: usize,
    pub max_target: usize,
    /// Candidate assignments tried before giving up.
    pub max_nodes: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_source: 12,
            max_target: 24,
            max_nodes: 5_000_000,
        }
    }
}

/// Checks the type-0 clauses for a total transform.
pub fn verify_arrow0(src: &LoopView, tgt: &LoopView, t: &[Option<StateId>]) -> Result<Certificate> {
    verify(src, tgt, t, false)
}

/// As [`verify_arrow0`], but states outside the source condition may be unmapped.
pub fn verify_restricted(src: &LoopView, tgt: &LoopView, t: &[Option<StateId>]) -> Result<Certificate> {
    verify(src, tgt, t, true)
}

fn verify(src: &LoopView, tgt: &LoopView, t: &[Option<StateId>], allow_partial: bool) -> Result<Certificate> {
    if t.len() != src.size() {
        return Err(Error::mismatch(format!(
            "transform has {} rows for {} source states",
            t.len(),
            src.size()
        )));
    }
    if let Some(bad) = t.iter().flatten().find(|s| s.index() >= tgt.size()) {
        return Err(Error::mismatch(format!("transform image {} outside target space", bad.0)));
    }
    for s in src.space.states() {
        if t[s.index()].is_none() && (!allow_partial || src.cond.holds(s)) {
            return Err(Error::PartialT(s.0));
        }
    }
    let mapped: Vec<(StateId, StateId)> = t
        .iter()
        .enumerate()
        .filter_map(|(i, y)| y.map(|y| (StateId(i as u32), y)))
        .collect();

    let mut owner: Vec<Option<StateId>> = vec![None; tgt.size()];
    for &(x, y) in &mapped {
        if let Some(prev) = owner[y.index()] {
            return Ok(Certificate::fail(
                Clause::Injective,
                x,
                Some(prev),
                format!("states {} and {} both map to {}", prev.0, x.0, y.0),
            ));
        }
        owner[y.index()] = Some(x);
    }
    for w in mapped.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if y1 <= y0 {
            return Ok(Certificate::fail(
                Clause::Monotone,
                x1,
                Some(x0),
                format!(
                    "{} precedes {} but {} does not precede {}",
                    src.space.format_state(x0),
                    src.space.format_state(x1),
                    tgt.space.format_state(y0),
                    tgt.space.format_state(y1)
                ),
            ));
        }
    }
    for &(x, y) in &mapped {
        if src.cond.holds(x) && !tgt.cond.holds(y) {
            return Ok(Certificate::fail(
                Clause::ConditionImplication,
                x,
                None,
                format!(
                    "{} satisfies the source condition but {} violates the target condition",
                    src.space.format_state(x),
                    tgt.space.format_state(y)
                ),
            ));
        }
    }
    for &(x, y) in &mapped {
        let (a, b) = (src.orders[x.index()], tgt.orders[y.index()]);
        if a != b {
            return Ok(Certificate::fail(
                Clause::OrderInvariance,
                x,
                None,
                format!(
                    "order of {} is {a} but order of {} is {b}",
                    src.space.format_state(x),
                    tgt.space.format_state(y)
                ),
            ));
        }
    }
    Ok(Certificate::ok())
}

/// Builds a verified type-0 arrow, or returns the failing certificate.
pub fn make_arrow0(
    src: &Arc<LoopView>,
    tgt: &Arc<LoopView>,
    t: Vec<Option<StateId>>,
) -> Result<std::result::Result<Arrow, Certificate>> {
    let cert = verify_arrow0(src, tgt, &t)?;
    if !cert.holds {
        return Ok(Err(cert));
    }
    Ok(Ok(type0(src, tgt, t, false)))
}

fn type0(src: &Arc<LoopView>, tgt: &Arc<LoopView>, transform: Vec<Option<StateId>>, restricted: bool) -> Arrow {
    Arrow {
        kind: ArrowKind::Type0,
        source: src.name.clone(),
        target: tgt.name.clone(),
        source_view: Some(src.clone()),
        target_view: Some(tgt.clone()),
        transform,
        restricted,
        decomposition: None,
        range: None,
        witness: None,
    }
}

/// Identity arrow on a view.
pub fn identity_arrow(view: &Arc<LoopView>) -> Arrow {
    type0(view, view, view.space.states().map(Some).collect(), false)
}

/// First monotone injection (in the canonical state order) that verifies.
pub fn search_arrow0(src: &Arc<LoopView>, tgt: &Arc<LoopView>, limits: &SearchLimits) -> Result<Option<Arrow>> {
    Ok(search_injection(src, tgt, None, limits)?.map(|t| type0(src, tgt, t, false)))
}

fn search_injection(
    src: &LoopView,
    tgt: &LoopView,
    allowed: Option<&Condition>,
    limits: &SearchLimits,
) -> Result<Option<Vec<Option<StateId>>>> {
    let (n, m) = (src.size(), tgt.size());
    if n > limits.max_source {
        return Err(Error::SearchBudgetExceeded(format!(
            "source `{}` has {n} states, above the cap of {}",
            src.name, limits.max_source
        )));
    }
    if m > limits.max_target {
        return Err(Error::SearchBudgetExceeded(format!(
            "target `{}` has {m} states, above the cap of {}",
            tgt.name, limits.max_target
        )));
    }
    if n > m {
        return Ok(None);
    }
    struct Dfs<'a> {
        src: &'a LoopView,
        tgt: &'a LoopView,
        allowed: Option<&'a Condition>,
        chosen: Vec<StateId>,
        nodes: u64,
        max_nodes: u64,
    }
    impl Dfs<'_> {
        fn fits(&self, x: StateId, y: StateId) -> bool {
            self.allowed.is_none_or(|a| a.holds(y))
                && self.src.orders[x.index()] == self.tgt.orders[y.index()]
                && (!self.src.cond.holds(x) || self.tgt.cond.holds(y))
        }

        fn go(&mut self, i: usize, from: usize) -> Result<bool> {
            let (n, m) = (self.src.size(), self.tgt.size());
            if i == n {
                return Ok(true);
            }
            let x = StateId(i as u32);
            for j in from..=(m - (n - i)) {
                let y = StateId(j as u32);
                if !self.fits(x, y) {
                    continue;
                }
                self.nodes += 1;
                if self.nodes > self.max_nodes {
                    return Err(Error::SearchBudgetExceeded(format!(
                        "more than {} candidate assignments",
                        self.max_nodes
                    )));
                }
                self.chosen.push(y);
                if self.go(i + 1, j + 1)? {
                    return Ok(true);
                }
                self.chosen.pop();
            }
            Ok(false)
        }
    }
    let mut dfs = Dfs {
        src,
        tgt,
        allowed,
        chosen: Vec::with_capacity(n),
        nodes: 0,
        max_nodes: limits.max_nodes,
    };
    if !dfs.go(0, 0)? {
        return Ok(None);
    }
    let t: Vec<Option<StateId>> = dfs.chosen.into_iter().map(Some).collect();
    debug_assert!(verify_arrow0(src, tgt, &t).map(|c| c.holds).unwrap_or(false));
    Ok(Some(t))
}

/// `a2 ∘ a1`, re-verified.
pub fn compose_arrow0(a1: &Arrow, a2: &Arrow) -> Result<Arrow> {
    let (s1, t1) = a1.views()?;
    let (s2, t2) = a2.views()?;
    if **t1 != **s2 {
        return Err(Error::NotComposable(format!(
            "target of `{}` differs from source of `{}`",
            a1.target, a2.source
        )));
    }
    let transform: Vec<Option<StateId>> = a1
        .transform
        .iter()
        .map(|y| y.and_then(|y| a2.transform[y.index()]))
        .collect();
    let restricted = transform.iter().any(Option::is_none);
    let cert = verify(s1, t2, &transform, restricted).map_err(|e| Error::NotComposable(e.to_string()))?;
    if !cert.holds {
        let v = cert.violation.expect("failed certificate");
        return Err(Error::NotComposable(format!("composite violates {}: {}", v.clause, v.message)));
    }
    let mut out = type0(s1, t2, transform, restricted);
    if a2.kind == ArrowKind::Type1 {
        out.kind = ArrowKind::Type1;
        out.target = a2.target.clone();
        out.decomposition = a2.decomposition;
        out.range = a2.range.clone();
        if let Some(r) = &out.range {
            if out.pairs().any(|(_, y)| !r.holds(y)) {
                return Err(Error::NotComposable("composite leaves the prefix range".into()));
            }
        }
    }
    Ok(out)
}

/// Inverse of a type-0 arrow.
///
/// A bijective transform inverts directly. Otherwise the inverse is
/// restricted to the image, which is allowed when every unreached target
/// state lies outside the target condition.
pub fn invert_arrow0(a: &Arrow) -> Result<Arrow> {
    if a.kind != ArrowKind::Type0 {
        return Err(Error::NotInvertible("only type-0 arrows are inverted".into()));
    }
    let (src, tgt) = a.views()?;
    let mut inv: Vec<Option<StateId>> = vec![None; tgt.size()];
    for (x, y) in a.pairs() {
        inv[y.index()] = Some(x);
    }
    if let Some(y) = tgt.space.states().find(|y| inv[y.index()].is_none() && tgt.cond.holds(*y)) {
        return Err(Error::NotInvertible(format!(
            "{} satisfies the target condition but is not reached",
            tgt.space.format_state(y)
        )));
    }
    let restricted = inv.iter().any(Option::is_none);
    let cert = verify(tgt, src, &inv, true)?;
    if !cert.holds {
        let v = cert.violation.expect("failed certificate");
        return Err(Error::NotInvertible(format!("inverse violates {}: {}", v.clause, v.message)));
    }
    Ok(type0(tgt, src, inv, restricted))
}

/// Searches for a type-1 arrow from `src` into a contiguous segment of `program`.
pub fn search_arrow1(
    src: &Arc<LoopView>,
    unit: &ProgramUnit,
    program: &str,
    limits: &SearchLimits,
) -> Result<Option<Arrow>> {
    let space = program_space(unit, program)?;
    let items = unit.program(program).expect("checked").body.flatten();
    let n = items.len();
    for prefix in 0..n {
        let range = denote_stmt(unit, &space, &seq_of(&items[..prefix]))?.to_pfn().image_condition();
        for end in prefix + 1..=n {
            let name = format!("{program}[{prefix}..{end}]");
            let view = Arc::new(LoopView::from_statements(unit, &space, &items[prefix..end], &name)?);
            if let Some(t) = search_injection(src, &view, Some(&range), limits)? {
                let mut arrow = type0(src, &view, t, false);
                arrow.kind = ArrowKind::Type1;
                arrow.target = program.to_string();
                arrow.decomposition = Some(Decomposition {
                    prefix,
                    segment: end - prefix,
                    suffix: n - end,
                });
                arrow.range = Some(range.clone());
                return Ok(Some(arrow));
            }
        }
    }
    Ok(None)
}

/// An unverified reducibility claim.
pub fn assert_arrow2(p_i: &str, p_j: &str, witness: &str) -> Arrow {
    Arrow {
        kind: ArrowKind::Type2Asserted,
        source: p_i.to_string(),
        target: p_j.to_string(),
        source_view: None,
        target_view: None,
        transform: Vec::new(),
        restricted: false,
        decomposition: None,
        range: None,
        witness: Some(witness.to_string()),
    }
}

/// A graph node: a program, optionally run as a loop body under a condition.
#[derive(Debug, Clone)]
pub struct GraphNode<'a> {
    pub label: String,
    pub unit: &'a ProgramUnit,
    pub program: String,
    pub cond: Option<String>,
}

#[derive(Debug, Clone)]
pub struct GraphEdge {
    pub from: usize,
    pub to: usize,
    pub arrow: Arrow,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Component {
    pub members: Vec<usize>,
    pub contains_infinite_loop: bool,
    pub contains_undefined: bool,
}

#[derive(Debug, Clone)]
pub struct IsoGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<GraphEdge>,
    pub components: Vec<Component>,
    /// Per node: its component carries neither flag.
    pub guaranteed_halting: Vec<bool>,
    /// Per node: some start state runs forever.
    pub diverges: Vec<bool>,
    /// Per node: some start state reaches bottom.
    pub gets_stuck: Vec<bool>,
    pub truncated: bool,
    pub searches: usize,
    pub diagnostics: Vec<String>,
}

impl IsoGraph {
    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges.iter().any(|e| e.from == from && e.to == to)
    }

    /// Adds an asserted edge; it does not change components or flags.
    pub fn add_asserted(&mut self, from: usize, to: usize, witness: &str) {
        let arrow = assert_arrow2(&self.nodes[from], &self.nodes[to], witness);
        self.edges.push(GraphEdge { from, to, arrow });
    }
}

/// Outcomes of a graph node from every start state.
pub fn node_outcomes(node: &GraphNode) -> Result<Denotation> {
    let d = denote_outcomes(node.unit, &node.program)?;
    match &node.cond {
        None => Ok(d),
        Some(text) => {
            let c = resolve_condition(node.unit, &d.space, text)?;
            Ok(denote_loop(&d, &c))
        }
    }
}

/// Pairwise arrow search over `nodes`, with at most `budget` searches.
pub fn build_iso_graph(nodes: &[GraphNode], budget: usize, limits: &SearchLimits) -> Result<IsoGraph> {
    let views: Vec<Arc<LoopView>> = nodes
        .iter()
        .map(|n| {
            LoopView::from_program(n.unit, &n.program, n.cond.as_deref()).map(|mut v| {
                v.name = n.label.clone();
                Arc::new(v)
            })
        })
        .collect::<Result<_>>()?;
    let mut edges = Vec::new();
    let mut diagnostics = Vec::new();
    let mut searches = 0usize;
    let mut truncated = false;
    'pairs: for i in 0..nodes.len() {
        for j in 0..nodes.len() {
            if i == j {
                continue;
            }
            if searches >= budget {
                truncated = true;
                break 'pairs;
            }
            searches += 1;
            match search_arrow0(&views[i], &views[j], limits) {
                Ok(Some(arrow)) => {
                    edges.push(GraphEdge { from: i, to: j, arrow });
                    continue;
                }
                Ok(None) => {}
                Err(Error::SearchBudgetExceeded(msg)) => {
                    truncated = true;
                    diagnostics.push(format!("{} -> {}: {msg}", nodes[i].label, nodes[j].label));
                    continue;
                }
                Err(e) => return Err(e),
            }
            if nodes[j].cond.is_some() {
                continue;
            }
            if searches >= budget {
                truncated = true;
                break 'pairs;
            }
            searches += 1;
            match search_arrow1(&views[i], nodes[j].unit, &nodes[j].program, limits) {
                Ok(Some(mut arrow)) => {
                    arrow.target = nodes[j].label.clone();
                    edges.push(GraphEdge { from: i, to: j, arrow });
                }
                Ok(None) => {}
                Err(Error::SearchBudgetExceeded(msg)) => {
                    truncated = true;
                    diagnostics.push(format!("{} -> {} (type 1): {msg}", nodes[i].label, nodes[j].label));
                }
                Err(e) => return Err(e),
            }
        }
    }

    let mut diverges = Vec::with_capacity(nodes.len());
    let mut gets_stuck = Vec::with_capacity(nodes.len());
    for n in nodes {
        let d = node_outcomes(n)?;
        diverges.push(d.outcomes.contains(&Outcome::Diverge));
        gets_stuck.push(d.outcomes.contains(&Outcome::Stuck));
    }

    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut c = x;
        while p[c] != r {
            let next = p[c];
            p[c] = r;
            c = next;
        }
        r
    }
    for e in &edges {
        let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut components: Vec<Component> = Vec::new();
    let mut comp_of = vec![0usize; nodes.len()];
    let mut root_index: Vec<Option<usize>> = vec![None; nodes.len()];
    for v in 0..nodes.len() {
        let r = find(&mut parent, v);
        let idx = *root_index[r].get_or_insert_with(|| {
            components.push(Component {
                members: Vec::new(),
                contains_infinite_loop: false,
                contains_undefined: false,
            });
            components.len() - 1
        });
        comp_of[v] = idx;
        let c = &mut components[idx];
        c.members.push(v);
        c.contains_infinite_loop |= diverges[v];
        c.contains_undefined |= gets_stuck[v];
    }
    let guaranteed_halting = (0..nodes.len())
        .map(|v| {
            let c = &components[comp_of[v]];
            !c.contains_infinite_loop && !c.contains_undefined
        })
        .collect();

    Ok(IsoGraph {
        nodes: nodes.iter().map(|n| n.label.clone()).collect(),
        edges,
        components,
        guaranteed_halting,
        diverges,
        gets_stuck,
        truncated,
        searches,
        diagnostics,
    })
}

/// View of the canonical infinite loop `while true { skip }` on a one-state space.
pub fn canonical_infinite_loop() -> Arc<LoopView> {
    let space = crate::space::StateSpace::single("u", crate::space::Domain::new("Unit", [0]).expect("nonempty"))
        .expect("one state");
    let id = PartialFn::identity(&space).expect("one state");
    Arc::new(LoopView::from_body("infinite loop", &id, &Condition::always(&space)).expect("same space"))
}

/// Looks up a state of the target by formatted text, for error messages and tables.
pub fn format_pair(arrow: &Arrow, x: StateId, y: StateId) -> (String, String) {
    match (&arrow.source_view, &arrow.target_view) {
        (Some(s), Some(t)) => (s.space.format_state(x), t.space.format_state(y)),
        _ => (x.to_string(), y.to_string()),
    }
}

/// Parses a transform given as `source -> target` lines of assignments.
pub fn parse_transform(src: &LoopView, tgt: &LoopView, text: &str) -> Result<Vec<Option<StateId>>> {
    let mut t = vec![None; src.size()];
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (a, b) = line.split_once("->").ok_or_else(|| Error::Syntax {
            line: lineno + 1,
            col: 1,
            msg: "expected `SOURCE -> TARGET`".into(),
        })?;
        let x = src.space.parse_assignment(a)?;
        let b = b.trim();
        t[x.index()] = if b == "bottom" {
            None
        } else {
            Some(tgt.space.parse_assignment(b)?)
        };
    }
    Ok(t)
}

/// The start states of `view` where the loop never stops.
pub fn infinite_starts(view: &LoopView) -> Vec<StateId> {
    view.space
        .states()
        .filter(|s| view.orders[s.index()] == ExtOrder::Infinite)
        .collect()
}

impl Lifted {
    /// Convenience for tables: bottom stays bottom.
    pub fn map_state(self, f: impl FnOnce(StateId) -> Option<StateId>) -> Lifted {
        self.defined().and_then(f).into()
    }
}
