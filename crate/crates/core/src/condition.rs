//! Extensional Boolean conditions over a state space.

use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::space::{same_space, Lifted, Space, StateId};

/// Subset of the defined states of a space. Bottom is never a member.
///
/// Equality ignores the label: two conditions are equal exactly when they
/// hold on the same states.
#[derive(Clone)]
pub struct Condition {
    space: Space,
    members: FixedBitSet,
    label: Option<String>,
}

impl Condition {
    pub fn from_fn(space: &Space, mut pred: impl FnMut(StateId) -> bool) -> Self {
        let mut members = FixedBitSet::with_capacity(space.len());
        for s in space.states() {
            if pred(s) {
                members.insert(s.index());
            }
        }
        Condition {
            space: space.clone(),
            members,
            label: None,
        }
    }

    pub fn from_states(space: &Space, states: impl IntoIterator<Item = StateId>) -> Result<Self> {
        let mut members = FixedBitSet::with_capacity(space.len());
        for s in states {
            if s.index() >= space.len() {
                return Err(Error::InvalidArgument(format!("state {} outside space", s.0)));
            }
            members.insert(s.index());
        }
        Ok(Condition {
            space: space.clone(),
            members,
            label: None,
        })
    }

    pub fn always(space: &Space) -> Self {
        Self::from_fn(space, |_| true).with_label("True")
    }

    pub fn never(space: &Space) -> Self {
        Self::from_fn(space, |_| false).with_label("False")
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn holds(&self, s: StateId) -> bool {
        self.members.contains(s.index())
    }

    pub fn holds_lifted(&self, s: Lifted) -> bool {
        s.defined().is_some_and(|s| self.holds(s))
    }

    pub fn count(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    /// Members in canonical order.
    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.members.ones().map(|i| StateId(i as u32))
    }

    fn check(&self, other: &Condition) -> Result<()> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::mismatch("conditions range over different spaces"))
        }
    }

    /// `self ⊢ other`: every state satisfying `self` satisfies `other`.
    pub fn entails(&self, other: &Condition) -> Result<bool> {
        self.check(other)?;
        Ok(self.members.is_subset(&other.members))
    }

    /// Entailment with a proper subset of extensions.
    pub fn strictly_stronger(&self, other: &Condition) -> Result<bool> {
        Ok(self.entails(other)? && self.members != other.members)
    }

    pub fn and(&self, other: &Condition) -> Result<Condition> {
        self.check(other)?;
        let mut members = self.members.clone();
        members.intersect_with(&other.members);
        Ok(self.derived(members, join_label(self, "∧", other)))
    }

    pub fn or(&self, other: &Condition) -> Result<Condition> {
        self.check(other)?;
        let mut members = self.members.clone();
        members.union_with(&other.members);
        Ok(self.derived(members, join_label(self, "∨", other)))
    }

    pub fn not(&self) -> Condition {
        let mut members = self.members.clone();
        members.toggle_range(..);
        let label = self.label.as_ref().map(|l| format!("¬({l})"));
        self.derived(members, label)
    }

    fn derived(&self, members: FixedBitSet, label: Option<String>) -> Condition {
        Condition {
            space: self.space.clone(),
            members,
            label,
        }
    }
}

fn join_label(a: &Condition, op: &str, b: &Condition) -> Option<String> {
    match (&a.label, &b.label) {
        (Some(x), Some(y)) => Some(format!("({x}) {op} ({y})")),
        _ => None,
    }
}

/// `[A]_C`: the states of `space` satisfying `c`, in canonical order.
pub fn restrict(space: &Space, c: &Condition) -> Result<Vec<StateId>> {
    if !same_space(space, &c.space) {
        return Err(Error::mismatch("condition is over a different space"));
    }
    Ok(c.states().collect())
}

impl PartialEq for Condition {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.members == other.members
    }
}

impl Eq for Condition {}

impl fmt::Debug for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let states: Vec<u32> = self.states().map(|s| s.0).collect();
        f.debug_struct("Condition")
            .field("label", &self.label)
            .field("members", &states)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{Domain, StateSpace};

    fn a15() -> Space {
        StateSpace::single("x", Domain::range("A", 1, 15).unwrap()).unwrap()
    }

    fn lt(space: &Space, k: i64) -> Condition {
        Condition::from_fn(space, |s| space.value(s, 0) < k)
    }

    fn values(space: &Space, states: &[StateId]) -> Vec<i64> {
        states.iter().map(|&s| space.value(s, 0)).collect()
    }

    #[test]
    fn restriction_examples() {
        let a = a15();
        assert_eq!(values(&a, &restrict(&a, &lt(&a, 10)).unwrap()), (1..=9).collect::<Vec<_>>());
        assert!(restrict(&a, &Condition::never(&a)).unwrap().is_empty());
        assert_eq!(restrict(&a, &Condition::always(&a)).unwrap().len(), 15);
    }

    #[test]
    fn entailment_examples() {
        let a = a15();
        let (c5, c10) = (lt(&a, 5), lt(&a, 10));
        assert!(c5.entails(&c10).unwrap());
        assert!(c10.entails(&c10).unwrap());
        assert!(!c10.entails(&c5).unwrap());
        assert!(c5.strictly_stronger(&c10).unwrap());
        assert!(!c10.strictly_stronger(&c10).unwrap());
    }

    #[test]
    fn lattice_examples() {
        let a = a15();
        let c = lt(&a, 10);
        assert_eq!(c.and(&c.not()).unwrap(), Condition::never(&a));
        let gt3 = Condition::from_fn(&a, |s| a.value(s, 0) > 3);
        let both = c.and(&gt3).unwrap();
        assert_eq!(values(&a, &both.states().collect::<Vec<_>>()), (4..=9).collect::<Vec<_>>());
        assert_eq!(Condition::always(&a).and(&c).unwrap(), c);
    }

    #[test]
    fn bottom_is_never_a_member() {
        let a = a15();
        assert!(!Condition::always(&a).holds_lifted(Lifted::Bottom));
        assert!(!Condition::always(&a).not().holds_lifted(Lifted::Bottom));
    }

    #[test]
    fn space_mismatch() {
        let a = a15();
        let b = StateSpace::single("y", Domain::range("B", 0, 3).unwrap()).unwrap();
        assert!(matches!(
            Condition::always(&a).entails(&Condition::always(&b)),
            Err(Error::SpaceMismatch(_))
        ));
        assert!(restrict(&b, &Condition::always(&a)).is_err());
    }

    #[test]
    fn condition_count_is_power_of_two() {
        let s = StateSpace::single("x", Domain::range("D", 0, 3).unwrap()).unwrap();
        let mut seen: Vec<Vec<StateId>> = Vec::new();
        for mask in 0u32..64 {
            // masks above 15 alias lower ones
            let c = Condition::from_fn(&s, |st| mask & (1 << st.0) != 0);
            let v: Vec<StateId> = c.states().collect();
            if !seen.contains(&v) {
                seen.push(v);
            }
        }
        assert_eq!(seen.len(), 16);
    }
}
