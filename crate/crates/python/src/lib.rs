//! Python bindings: program units, partial functions, conditions, orders and arrows.
//!
//! States cross the boundary as `{var: value}` dicts; bottom is `None`.
//! Orders are ints, with `-1` for "never entered" and `math.inf` for infinity.

use std::collections::BTreeMap;
use std::sync::Arc;

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use tpa_core::arrows::{build_iso_graph, search_arrow0, search_arrow1, Arrow, GraphNode, LoopView, SearchLimits};
use tpa_core::calculus::{self, Outcome, ProgramUnit};
use tpa_core::condlab::{self, Delta};
use tpa_core::orbit::{self, ExtOrder};
use tpa_core::pfn;
use tpa_core::{Condition, Lifted, PartialFn, Space, StateId};

/// A state as `{var: value}`.
type StateMap = BTreeMap<String, i64>;

type Row = (StateMap, Option<StateMap>);
type Outcome3 = (StateMap, Option<StateMap>, &'static str);
type Pair = (StateMap, StateMap);

create_exception!(tpa, TpaError, PyValueError, "Raised for every analysis error.");

fn err(e: tpa_core::Error) -> PyErr {
    TpaError::new_err(e.to_string())
}

fn order_obj(py: Python<'_>, o: ExtOrder) -> PyResult<Py<PyAny>> {
    Ok(match o.as_i64() {
        Some(n) => n.into_pyobject(py)?.into_any().unbind(),
        None => f64::INFINITY.into_pyobject(py)?.into_any().unbind(),
    })
}

fn delta_obj(py: Python<'_>, d: Delta) -> PyResult<Py<PyAny>> {
    Ok(match d {
        Delta::Finite(n) => n.into_pyobject(py)?.into_any().unbind(),
        Delta::PlusInf => f64::INFINITY.into_pyobject(py)?.into_any().unbind(),
        Delta::MinusInf => f64::NEG_INFINITY.into_pyobject(py)?.into_any().unbind(),
        Delta::Indeterminate => py.None(),
    })
}

fn state_dict(space: &Space, s: StateId) -> StateMap {
    space
        .vars()
        .iter()
        .zip(space.decode(s))
        .map(|(v, x)| (v.name.clone(), x))
        .collect()
}

fn lifted_dict(space: &Space, s: Lifted) -> Option<StateMap> {
    s.defined().map(|s| state_dict(space, s))
}

/// Accepts a dict, a bare int for one-variable spaces, or `None` for bottom.
fn to_lifted(space: &Space, obj: &Bound<'_, PyAny>) -> PyResult<Lifted> {
    if obj.is_none() {
        return Ok(Lifted::Bottom);
    }
    if let Ok(n) = obj.extract::<i64>() {
        return space.parse_assignment(&n.to_string()).map(Lifted::Defined).map_err(err);
    }
    let values: StateMap = obj.extract()?;
    let text = values
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(",");
    space.parse_assignment(&text).map(Lifted::Defined).map_err(err)
}

#[pyclass(name = "Unit", module = "tpa", frozen)]
struct PyUnit {
    unit: Arc<ProgramUnit>,
}

#[pymethods]
impl PyUnit {
    #[getter]
    fn programs(&self) -> Vec<String> {
        self.unit.programs.iter().map(|p| p.name.clone()).collect()
    }

    #[getter]
    fn conditions(&self) -> Vec<String> {
        self.unit.conds.iter().map(|c| c.name.clone()).collect()
    }

    #[getter]
    fn functions(&self) -> Vec<String> {
        self.unit.fns.iter().map(|f| f.name.clone()).collect()
    }

    /// Named `fn` over the space of all declared variables.
    fn function(&self, name: &str) -> PyResult<PyFunction> {
        let space = calculus::unit_space(&self.unit).map_err(err)?;
        let f = calculus::named_fn(&self.unit, &space, name).map_err(err)?;
        Ok(PyFunction { f })
    }

    /// Denotation of a program as a partial function.
    fn denote(&self, program: &str) -> PyResult<PyFunction> {
        Ok(PyFunction {
            f: calculus::denote(&self.unit, program).map_err(err)?,
        })
    }

    /// Per start state: `(start, image, outcome)` with outcome `defined`, `stuck` or `diverges`.
    fn outcomes(&self, program: &str) -> PyResult<Vec<Outcome3>> {
        let d = calculus::denote_outcomes(&self.unit, program).map_err(err)?;
        Ok(d.space
            .states()
            .map(|s| {
                let o = d.at(s);
                let kind = match o {
                    Outcome::Defined(_) => "defined",
                    Outcome::Stuck => "stuck",
                    Outcome::Diverge => "diverges",
                };
                (state_dict(&d.space, s), lifted_dict(&d.space, o.lifted()), kind)
            })
            .collect())
    }

    /// A condition by name or expression, over a program's space or the whole unit's.
    #[pyo3(signature = (text, program=None))]
    fn condition(&self, text: &str, program: Option<&str>) -> PyResult<PyCondition> {
        let space = match program {
            Some(p) => calculus::program_space(&self.unit, p),
            None => calculus::unit_space(&self.unit),
        }
        .map_err(err)?;
        Ok(PyCondition {
            c: calculus::resolve_condition(&self.unit, &space, text).map_err(err)?,
        })
    }

    fn equivalent(&self, p1: &str, p2: &str) -> PyResult<bool> {
        calculus::check_equiv(&self.unit, p1, p2).map_err(err)
    }

    /// Body passes a while-program makes from `state`.
    fn iteration_count(&self, py: Python<'_>, program: &str, state: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
        let space = calculus::program_space(&self.unit, program).map_err(err)?;
        let x = to_lifted(&space, state)?;
        order_obj(py, calculus::loop_iteration_count(&self.unit, program, x).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        format!(
            "Unit(programs={:?}, conditions={:?}, functions={:?})",
            self.programs(),
            self.conditions(),
            self.functions()
        )
    }
}

#[pyclass(name = "Function", module = "tpa", frozen)]
struct PyFunction {
    f: PartialFn,
}

#[pymethods]
impl PyFunction {
    fn __call__(&self, state: &Bound<'_, PyAny>) -> PyResult<Option<StateMap>> {
        let x = to_lifted(self.f.domain_space(), state)?;
        Ok(lifted_dict(self.f.codomain_space(), self.f.apply(x)))
    }

    fn __len__(&self) -> usize {
        self.f.domain_space().len()
    }

    fn __eq__(&self, other: &PyFunction) -> bool {
        self.f == other.f
    }

    /// `(state, image)` rows in state order.
    fn table(&self) -> Vec<Row> {
        let (dom, cod) = (self.f.domain_space(), self.f.codomain_space());
        dom.states()
            .map(|s| (state_dict(dom, s), lifted_dict(cod, self.f.at(s))))
            .collect()
    }

    /// `self ∘ other`: apply `other` first.
    fn compose(&self, other: &PyFunction) -> PyResult<PyFunction> {
        Ok(PyFunction {
            f: pfn::compose(&self.f, &other.f).map_err(err)?,
        })
    }

    /// Pointwise merge; raises on a state where both are defined and differ.
    fn merge(&self, other: &PyFunction) -> PyResult<PyFunction> {
        Ok(PyFunction {
            f: pfn::bullet_merge(&self.f, &other.f).map_err(err)?,
        })
    }

    /// `self` restricted to states satisfying `cond`.
    fn restrict(&self, cond: &PyCondition) -> PyResult<PyFunction> {
        Ok(PyFunction {
            f: pfn::compose(&self.f, &pfn::cond_identity(&cond.c)).map_err(err)?,
        })
    }

    fn is_truth_preserving(&self, cond: &PyCondition) -> PyResult<bool> {
        self.f.is_truth_preserving(&cond.c).map_err(err)
    }

    fn element_orders(&self, py: Python<'_>, cond: &PyCondition) -> PyResult<Vec<Py<PyAny>>> {
        orbit::element_orders(&self.f, &cond.c)
            .map_err(err)?
            .into_iter()
            .map(|o| order_obj(py, o))
            .collect()
    }

    fn element_order(&self, py: Python<'_>, cond: &PyCondition, state: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
        let x = to_lifted(self.f.domain_space(), state)?;
        order_obj(py, orbit::element_order(&self.f, &cond.c, x).map_err(err)?)
    }

    /// The order m: the least element order over states satisfying `cond`.
    fn order(&self, py: Python<'_>, cond: &PyCondition) -> PyResult<Py<PyAny>> {
        order_obj(py, orbit::preservation_order(&self.f, &cond.c).map_err(err)?)
    }

    /// The limit l: the greatest element order.
    fn limit(&self, py: Python<'_>, cond: &PyCondition) -> PyResult<Py<PyAny>> {
        order_obj(py, orbit::preservation_limit(&self.f, &cond.c).map_err(err)?)
    }

    /// Orbit of `start` while `cond` holds, as a dict.
    fn orbit<'py>(&self, py: Python<'py>, cond: &PyCondition, start: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyDict>> {
        let space = self.f.domain_space();
        let r = orbit::orbit(&self.f, &cond.c, to_lifted(space, start)?).map_err(err)?;
        let out = PyDict::new(py);
        let trace: Vec<_> = r.trace.iter().map(|s| lifted_dict(space, *s)).collect();
        out.set_item("applied", PyList::new(py, trace.iter().skip(1))?)?;
        out.set_item("trace", trace)?;
        out.set_item(
            "stop_reason",
            match r.stop_reason {
                orbit::StopReason::ConditionFailed => "condition_failed",
                orbit::StopReason::BottomReached => "bottom_reached",
                orbit::StopReason::CycleDetected => "cycle_detected",
            },
        )?;
        out.set_item("order", order_obj(py, r.order)?)?;
        Ok(out)
    }

    fn __repr__(&self) -> String {
        let vars: Vec<&str> = self.f.domain_space().vars().iter().map(|v| v.name.as_str()).collect();
        format!("Function(vars={vars:?}, states={})", self.f.domain_space().len())
    }
}

#[pyclass(name = "Condition", module = "tpa", frozen)]
struct PyCondition {
    c: Condition,
}

#[pymethods]
impl PyCondition {
    fn __contains__(&self, state: &Bound<'_, PyAny>) -> PyResult<bool> {
        Ok(self.c.holds_lifted(to_lifted(self.c.space(), state)?))
    }

    fn __len__(&self) -> usize {
        self.c.count()
    }

    fn __eq__(&self, other: &PyCondition) -> bool {
        self.c == other.c
    }

    fn states(&self) -> Vec<StateMap> {
        self.c.states().map(|s| state_dict(self.c.space(), s)).collect()
    }

    /// Every state satisfying `self` satisfies `other`.
    fn entails(&self, other: &PyCondition) -> PyResult<bool> {
        self.c.entails(&other.c).map_err(err)
    }

    fn __and__(&self, other: &PyCondition) -> PyResult<PyCondition> {
        Ok(PyCondition {
            c: self.c.and(&other.c).map_err(err)?,
        })
    }

    fn __or__(&self, other: &PyCondition) -> PyResult<PyCondition> {
        Ok(PyCondition {
            c: self.c.or(&other.c).map_err(err)?,
        })
    }

    fn __invert__(&self) -> PyCondition {
        PyCondition { c: self.c.not() }
    }

    fn __repr__(&self) -> String {
        format!("Condition({} of {} states)", self.c.count(), self.c.space().len())
    }
}

#[pyfunction]
fn parse(source: &str) -> PyResult<PyUnit> {
    Ok(PyUnit {
        unit: Arc::new(calculus::parse(source).map_err(err)?),
    })
}

#[pyfunction]
fn load(path: std::path::PathBuf) -> PyResult<PyUnit> {
    let text = std::fs::read_to_string(&path)?;
    parse(&text)
}

/// Profiles of `f` under `cond` and a stronger or weaker `cond2`.
#[pyfunction]
fn relaxation<'py>(
    py: Python<'py>,
    f: &PyFunction,
    cond: &PyCondition,
    cond2: &PyCondition,
) -> PyResult<Bound<'py, PyDict>> {
    let (direction, rep) = if cond2.c.entails(&cond.c).map_err(err)? {
        ("strengthening", condlab::relaxation(&f.f, &cond.c, &cond2.c))
    } else {
        ("weakening", condlab::weakening_report(&f.f, &cond.c, &cond2.c))
    };
    let rep = rep.map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("direction", direction)?;
    out.set_item(
        "old_profile",
        (order_obj(py, rep.old_profile.order)?, order_obj(py, rep.old_profile.limit)?),
    )?;
    out.set_item(
        "new_profile",
        (order_obj(py, rep.new_profile.order)?, order_obj(py, rep.new_profile.limit)?),
    )?;
    out.set_item("order_relaxation", delta_obj(py, rep.order_relaxation)?)?;
    out.set_item("limit_relaxation", delta_obj(py, rep.limit_relaxation)?)?;
    out.set_item("sigma", delta_obj(py, rep.sigma)?)?;
    out.set_item("window_collapsed", rep.window_collapsed)?;
    Ok(out)
}

fn arrow_pairs(a: &Arrow) -> Vec<Pair> {
    match (&a.source_view, &a.target_view) {
        (Some(s), Some(t)) => a
            .pairs()
            .map(|(x, y)| (state_dict(&s.space, x), state_dict(&t.space, y)))
            .collect(),
        _ => Vec::new(),
    }
}

/// Searches an arrow from `source` to `target`; returns its pairs or `None`.
#[pyfunction]
#[pyo3(signature = (unit, source, target, kind=0, source_cond=None, target_cond=None, target_unit=None))]
#[allow(clippy::too_many_arguments)]
fn search_arrow(
    py: Python<'_>,
    unit: &PyUnit,
    source: &str,
    target: &str,
    kind: u8,
    source_cond: Option<&str>,
    target_cond: Option<&str>,
    target_unit: Option<&PyUnit>,
) -> PyResult<Option<Vec<Pair>>> {
    let to_unit = target_unit.map_or(&unit.unit, |u| &u.unit);
    let limits = SearchLimits::default();
    py.detach(|| {
        let src = Arc::new(LoopView::from_program(&unit.unit, source, source_cond).map_err(err)?);
        let found = match kind {
            0 => {
                let tgt = Arc::new(LoopView::from_program(to_unit, target, target_cond).map_err(err)?);
                search_arrow0(&src, &tgt, &limits)
            }
            1 => search_arrow1(&src, to_unit, target, &limits),
            k => return Err(PyValueError::new_err(format!("arrow kind must be 0 or 1, got {k}"))),
        }
        .map_err(err)?;
        Ok(found.as_ref().map(arrow_pairs))
    })
}

/// Isomorphism graph over `(unit, program, cond or None)` triples.
#[pyfunction]
#[pyo3(signature = (nodes, budget=1000))]
fn iso_graph<'py>(
    py: Python<'py>,
    nodes: Vec<(PyRef<'py, PyUnit>, String, Option<String>)>,
    budget: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let graph_nodes: Vec<GraphNode> = nodes
        .iter()
        .map(|(u, p, c)| GraphNode {
            label: p.clone(),
            unit: &u.unit,
            program: p.clone(),
            cond: c.clone(),
        })
        .collect();
    let g = build_iso_graph(&graph_nodes, budget, &SearchLimits::default()).map_err(err)?;
    let out = PyDict::new(py);
    let edges: Vec<(usize, usize)> = g.edges.iter().map(|e| (e.from, e.to)).collect();
    let components = PyList::empty(py);
    for c in &g.components {
        let d = PyDict::new(py);
        d.set_item("members", c.members.clone())?;
        d.set_item("contains_infinite_loop", c.contains_infinite_loop)?;
        d.set_item("contains_undefined", c.contains_undefined)?;
        components.append(d)?;
    }
    out.set_item("nodes", g.nodes.clone())?;
    out.set_item("edges", edges)?;
    out.set_item("components", components)?;
    out.set_item("guaranteed_halting", g.guaranteed_halting.clone())?;
    out.set_item("truncated", g.truncated)?;
    out.set_item("diagnostics", g.diagnostics.clone())?;
    Ok(out)
}

#[pymodule]
fn tpa(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyUnit>()?;
    m.add_class::<PyFunction>()?;
    m.add_class::<PyCondition>()?;
    m.add("TpaError", m.py().get_type::<TpaError>())?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(load, m)?)?;
    m.add_function(wrap_pyfunction!(relaxation, m)?)?;
    m.add_function(wrap_pyfunction!(search_arrow, m)?)?;
    m.add_function(wrap_pyfunction!(iso_graph, m)?)?;
    Ok(())
}
