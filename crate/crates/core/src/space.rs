//! Finite ordered state spaces and their bottom-lifting.
//!
//! A [`StateSpace`] is an ordered tuple of typed variables. Every variable
//! ranges over a finite [`Domain`] of integers with a declared total order
//! (ascending by default, optionally descending). States are numbered
//! lexicographically: the first variable is the most significant digit and
//! each digit follows its domain's declared order. That numbering is the
//! canonical total order on the space, so `StateId` comparison *is* the
//! declared state order.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Finite set of integers with a declared total order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Domain {
    name: String,
    /// Strictly ascending, nonempty.
    elements: Vec<i64>,
    descending: bool,
}

impl Domain {
    /// Builds a domain from arbitrary integers; input is sorted and deduplicated.
    pub fn new(name: impl Into<String>, elements: impl IntoIterator<Item = i64>) -> Result<Self> {
        let name = name.into();
        let mut elements: Vec<i64> = elements.into_iter().collect();
        if elements.is_empty() {
            return Err(Error::EmptyDomain(name));
        }
        elements.sort_unstable();
        elements.dedup();
        Ok(Domain {
            name,
            elements,
            descending: false,
        })
    }

    pub fn range(name: impl Into<String>, lo: i64, hi: i64) -> Result<Self> {
        Self::new(name, lo..=hi)
    }

    /// Same elements, with the declared order reversed to descending.
    pub fn descending(mut self) -> Self {
        self.descending = true;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Elements in ascending numeric order.
    pub fn elements(&self) -> &[i64] {
        &self.elements
    }

    pub fn is_descending(&self) -> bool {
        self.descending
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, value: i64) -> bool {
        self.elements.binary_search(&value).is_ok()
    }

    /// Position of `value` in the declared order.
    pub fn position(&self, value: i64) -> Option<usize> {
        let idx = self.elements.binary_search(&value).ok()?;
        Some(if self.descending {
            self.elements.len() - 1 - idx
        } else {
            idx
        })
    }

    /// Element at `pos` in the declared order.
    pub fn value_at(&self, pos: usize) -> i64 {
        if self.descending {
            self.elements[self.elements.len() - 1 - pos]
        } else {
            self.elements[pos]
        }
    }

    /// Elements in the declared order.
    pub fn ordered(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.len()).map(move |p| self.value_at(p))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Var {
    pub name: String,
    pub domain: Domain,
}

/// Index of a defined state within its space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Element of a bottom-lifted state space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lifted {
    Bottom,
    Defined(StateId),
}

impl Lifted {
    pub fn defined(self) -> Option<StateId> {
        match self {
            Lifted::Defined(s) => Some(s),
            Lifted::Bottom => None,
        }
    }

    pub fn is_bottom(self) -> bool {
        matches!(self, Lifted::Bottom)
    }
}

impl From<StateId> for Lifted {
    fn from(s: StateId) -> Self {
        Lifted::Defined(s)
    }
}

impl From<Option<StateId>> for Lifted {
    fn from(s: Option<StateId>) -> Self {
        s.map_or(Lifted::Bottom, Lifted::Defined)
    }
}

/// Ordered tuple of typed state variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct StateSpace {
    vars: Vec<Var>,
    #[serde(skip)]
    strides: Vec<u64>,
    size: u64,
}

/// Shared handle; spaces are immutable once built.
pub type Space = Arc<StateSpace>;

impl StateSpace {
    pub fn new(vars: Vec<Var>) -> Result<Self> {
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::DuplicateName {
                    kind: "variable",
                    name: v.name.clone(),
                });
            }
        }
        let mut strides = vec![1u64; vars.len()];
        let mut size: u64 = 1;
        for (i, v) in vars.iter().enumerate().rev() {
            strides[i] = size;
            size = size
                .checked_mul(v.domain.len() as u64)
                .filter(|s| *s < u32::MAX as u64)
                .ok_or(Error::SpaceTooLarge {
                    size: u64::MAX,
                    bound: u32::MAX as u64,
                })?;
        }
        Ok(StateSpace {
            vars,
            strides,
            size,
        })
    }

    /// Convenience constructor for a one-variable space.
    pub fn single(var: impl Into<String>, domain: Domain) -> Result<Space> {
        Ok(Arc::new(Self::new(vec![Var {
            name: var.into(),
            domain,
        }])?))
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// Number of defined states (the empty product has one state).
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn len(&self) -> usize {
        self.size as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All defined states in canonical order.
    pub fn states(&self) -> impl DoubleEndedIterator<Item = StateId> + ExactSizeIterator {
        (0..self.size as u32).map(StateId)
    }

    /// Values of every variable at `s`, in variable order.
    pub fn decode(&self, s: StateId) -> Vec<i64> {
        let mut rem = s.0 as u64;
        self.vars
            .iter()
            .zip(&self.strides)
            .map(|(v, &stride)| {
                let pos = rem / stride;
                rem %= stride;
                v.domain.value_at(pos as usize)
            })
            .collect()
    }

    /// Value of variable `var` at `s`.
    pub fn value(&self, s: StateId, var: usize) -> i64 {
        let pos = (s.0 as u64 / self.strides[var]) % self.vars[var].domain.len() as u64;
        self.vars[var].domain.value_at(pos as usize)
    }

    /// State with the given values, or `None` if any value is out of its domain.
    pub fn encode(&self, values: &[i64]) -> Option<StateId> {
        if values.len() != self.vars.len() {
            return None;
        }
        let mut id = 0u64;
        for ((v, &stride), &x) in self.vars.iter().zip(&self.strides).zip(values) {
            id += v.domain.position(x)? as u64 * stride;
        }
        Some(StateId(id as u32))
    }

    /// `s` with variable `var` replaced by `value`; `None` when out of domain.
    pub fn with_value(&self, s: StateId, var: usize, value: i64) -> Option<StateId> {
        let stride = self.strides[var];
        let dom = &self.vars[var].domain;
        let old = (s.0 as u64 / stride) % dom.len() as u64;
        let new = dom.position(value)? as u64;
        Some(StateId((s.0 as u64 - old * stride + new * stride) as u32))
    }

    /// Parses `x=1,y=2` (or a bare integer for one-variable spaces).
    pub fn parse_assignment(&self, text: &str) -> Result<StateId> {
        let text = text.trim();
        let mut values: Vec<Option<i64>> = vec![None; self.vars.len()];
        if self.vars.len() == 1 && !text.contains('=') {
            values[0] = Some(parse_int(text)?);
        } else {
            for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let (name, val) = part
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidArgument(format!("expected NAME=VALUE, got `{part}`")))?;
                let idx = self.var_index(name.trim()).ok_or_else(|| Error::UnknownName {
                    kind: "variable",
                    name: name.trim().to_string(),
                })?;
                values[idx] = Some(parse_int(val.trim())?);
            }
        }
        let values: Vec<i64> = values
            .iter()
            .zip(&self.vars)
            .map(|(v, var)| v.ok_or_else(|| Error::InvalidArgument(format!("missing value for `{}`", var.name))))
            .collect::<Result<_>>()?;
        for (v, var) in values.iter().zip(&self.vars) {
            if !var.domain.contains(*v) {
                return Err(Error::OutOfDomain {
                    var: var.name.clone(),
                    value: *v,
                });
            }
        }
        Ok(self.encode(&values).expect("values checked against domains"))
    }

    /// Human-readable `x=1, y=2`.
    pub fn format_state(&self, s: StateId) -> String {
        self.decode(s)
            .iter()
            .zip(&self.vars)
            .map(|(v, var)| format!("{}={}", var.name, v))
            .collect::<Vec<_>>()
            .join(", ")
    }

    pub fn format_lifted(&self, s: Lifted) -> String {
        match s {
            Lifted::Bottom => "bottom".to_string(),
            Lifted::Defined(s) => self.format_state(s),
        }
    }
}

fn parse_int(text: &str) -> Result<i64> {
    text.parse()
        .map_err(|_| Error::InvalidArgument(format!("`{text}` is not an integer")))
}

/// Checks that two shared spaces are the same space.
pub(crate) fn same_space(a: &Space, b: &Space) -> bool {
    Arc::ptr_eq(a, b) || a == b
}
