//! Partial functions between bottom-lifted spaces, stored as explicit tables.

use std::fmt;

use crate::condition::Condition;
use crate::error::{Error, Result};
use crate::space::{same_space, Lifted, Space, StateId};

/// Default cap on the number of states a table may hold.
pub const DEFAULT_TABLE_BOUND: u64 = 1_000_000;

/// Effective table cap, overridable through `TPA_TABLE_BOUND`.
pub fn table_bound() -> u64 {
    std::env::var("TPA_TABLE_BOUND")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_TABLE_BOUND)
}

pub(crate) fn check_bound(space: &Space) -> Result<()> {
    let bound = table_bound();
    if space.size() > bound {
        return Err(Error::SpaceTooLarge {
            size: space.size(),
            bound,
        });
    }
    Ok(())
}

/// Total map on a lifted space; bottom always maps to bottom.
#[derive(Clone, PartialEq, Eq)]
pub struct PartialFn {
    dom: Space,
    cod: Space,
    table: Vec<Lifted>,
}

impl PartialFn {
    pub fn from_table(dom: &Space, cod: &Space, table: Vec<Lifted>) -> Result<Self> {
        check_bound(dom)?;
        if table.len() != dom.len() {
            return Err(Error::InvalidArgument(format!(
                "table has {} rows for {} states",
                table.len(),
                dom.len()
            )));
        }
        if let Some(bad) = table.iter().filter_map(|l| l.defined()).find(|s| s.index() >= cod.len()) {
            return Err(Error::InvalidArgument(format!("image {} outside codomain", bad.0)));
        }
        Ok(PartialFn {
            dom: dom.clone(),
            cod: cod.clone(),
            table,
        })
    }

    pub fn from_fn(dom: &Space, cod: &Space, mut f: impl FnMut(StateId) -> Lifted) -> Result<Self> {
        check_bound(dom)?;
        let table = dom.states().map(&mut f).collect();
        Self::from_table(dom, cod, table)
    }

    pub fn endo(space: &Space, f: impl FnMut(StateId) -> Lifted) -> Result<Self> {
        Self::from_fn(space, space, f)
    }

    pub fn identity(space: &Space) -> Result<Self> {
        Self::endo(space, Lifted::Defined)
    }

    pub fn domain_space(&self) -> &Space {
        &self.dom
    }

    pub fn codomain_space(&self) -> &Space {
        &self.cod
    }

    pub fn is_endo(&self) -> bool {
        same_space(&self.dom, &self.cod)
    }

    pub fn table(&self) -> &[Lifted] {
        &self.table
    }

    pub fn at(&self, s: StateId) -> Lifted {
        self.table[s.index()]
    }

    /// Application on the lifted space; the trap law is built in.
    pub fn apply(&self, x: Lifted) -> Lifted {
        match x {
            Lifted::Bottom => Lifted::Bottom,
            Lifted::Defined(s) => self.at(s),
        }
    }

    /// `Dom(f)`: states with a defined image.
    pub fn defined_states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.dom.states().filter(|&s| !self.at(s).is_bottom())
    }

    pub fn domain_condition(&self) -> Condition {
        Condition::from_fn(&self.dom, |s| !self.at(s).is_bottom())
    }

    /// `Im(f)` in canonical order.
    pub fn image(&self) -> Vec<StateId> {
        self.image_condition().states().collect()
    }

    pub fn image_condition(&self) -> Condition {
        let hits: Vec<StateId> = self.table.iter().filter_map(|l| l.defined()).collect();
        Condition::from_states(&self.cod, hits).expect("images lie in codomain")
    }

    /// Injective on its defined part.
    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.cod.len()];
        for s in self.table.iter().filter_map(|l| l.defined()) {
            if std::mem::replace(&mut seen[s.index()], true) {
                return false;
            }
        }
        true
    }

    /// `Im(f_C) ⊆ [A]_C`.
    pub fn is_truth_preserving(&self, c: &Condition) -> Result<bool> {
        self.check_endo_cond(c)?;
        Ok(c.states().all(|s| match self.at(s) {
            Lifted::Bottom => true,
            Lifted::Defined(y) => c.holds(y),
        }))
    }

    pub(crate) fn check_endo_cond(&self, c: &Condition) -> Result<()> {
        if !self.is_endo() {
            return Err(Error::mismatch("function is not an endofunction"));
        }
        if !same_space(&self.dom, c.space()) {
            return Err(Error::mismatch("condition is over a different space"));
        }
        Ok(())
    }
}

impl fmt::Debug for PartialFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for s in self.dom.states() {
            m.entry(&self.dom.format_state(s), &self.cod.format_lifted(self.at(s)));
        }
        m.finish()
    }
}

/// `id_C`.
pub fn cond_identity(c: &Condition) -> PartialFn {
    PartialFn::endo(c.space(), |s| if c.holds(s) { Lifted::Defined(s) } else { Lifted::Bottom })
        .expect("condition spaces are already materialised")
}

/// `id_⊥`.
pub fn undefined_fn(space: &Space) -> Result<PartialFn> {
    PartialFn::endo(space, |_| Lifted::Bottom)
}

/// `f_C`: `f` on `[A]_C`, bottom elsewhere.
pub fn restrict_fn(f: &PartialFn, c: &Condition) -> Result<PartialFn> {
    if !same_space(f.domain_space(), c.space()) {
        return Err(Error::mismatch("condition is not over the function's domain"));
    }
    PartialFn::from_fn(f.domain_space(), f.codomain_space(), |s| {
        if c.holds(s) {
            f.at(s)
        } else {
            Lifted::Bottom
        }
    })
}

/// `g ∘ f`.
pub fn compose(g: &PartialFn, f: &PartialFn) -> Result<PartialFn> {
    if !same_space(f.codomain_space(), g.domain_space()) {
        return Err(Error::mismatch("codomain of f differs from domain of g"));
    }
    PartialFn::from_fn(f.domain_space(), g.codomain_space(), |s| g.apply(f.at(s)))
}

/// `Ψ_{C1,C2}(f) = id_{C2} ∘ f ∘ id_{C1}`.
pub fn psi(f: &PartialFn, c1: &Condition, c2: &Condition) -> Result<PartialFn> {
    if !same_space(f.domain_space(), c1.space()) || !same_space(f.codomain_space(), c2.space()) {
        return Err(Error::mismatch("psi conditions do not match the function's spaces"));
    }
    compose(&cond_identity(c2), &compose(f, &cond_identity(c1))?)
}

/// The `•` merge of two partial functions.
pub fn bullet_merge(f: &PartialFn, g: &PartialFn) -> Result<PartialFn> {
    if !same_space(f.domain_space(), g.domain_space()) || !same_space(f.codomain_space(), g.codomain_space()) {
        return Err(Error::mismatch("merge operands have different spaces"));
    }
    let mut table = Vec::with_capacity(f.table.len());
    for s in f.domain_space().states() {
        table.push(match (f.at(s), g.at(s)) {
            (Lifted::Bottom, y) | (y, Lifted::Bottom) => y,
            (a, b) if a == b => a,
            _ => return Err(Error::MergeConflict { state: s.0 }),
        });
    }
    PartialFn::from_table(f.domain_space(), f.codomain_space(), table)
}
