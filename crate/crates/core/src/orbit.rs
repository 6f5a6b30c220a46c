//! Orbits, per-element truth-preservation orders and the order/limit profile.

use std::collections::HashSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::condition::Condition;
use crate::error::Result;
use crate::pfn::PartialFn;
use crate::space::{Lifted, StateId};

/// Element of `{-1} ∪ ℕ ∪ {∞}`, totally ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtOrder {
    NegOne,
    Finite(u64),
    Infinite,
}

impl ExtOrder {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtOrder::Finite(_))
    }

    /// Numeric value for `-1` and finite orders.
    pub fn as_i64(self) -> Option<i64> {
        match self {
            ExtOrder::NegOne => Some(-1),
            ExtOrder::Finite(n) => Some(n as i64),
            ExtOrder::Infinite => None,
        }
    }

    pub fn from_i64(n: i64) -> Self {
        if n < 0 {
            ExtOrder::NegOne
        } else {
            ExtOrder::Finite(n as u64)
        }
    }

    /// `self + 1`, saturating at infinity.
    pub fn succ(self) -> Self {
        match self {
            ExtOrder::NegOne => ExtOrder::Finite(0),
            ExtOrder::Finite(n) => ExtOrder::Finite(n + 1),
            ExtOrder::Infinite => ExtOrder::Infinite,
        }
    }
}

impl fmt::Display for ExtOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtOrder::NegOne => write!(f, "-1"),
            ExtOrder::Finite(n) => write!(f, "{n}"),
            ExtOrder::Infinite => write!(f, "inf"),
        }
    }
}

/// Finite orders are numbers; `-1` and infinity are the strings `"-1"` and `"inf"`.
impl Serialize for ExtOrder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtOrder::Finite(n) => s.serialize_u64(*n),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    ConditionFailed,
    BottomReached,
    CycleDetected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitReport {
    pub start: Lifted,
    /// Visited states including the start and the state that ended the walk.
    pub trace: Vec<Lifted>,
    pub stop_reason: StopReason,
    pub order: ExtOrder,
}

/// `N_f(C) = (order, limit)`, compared lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NfProfile {
    pub order: ExtOrder,
    pub limit: ExtOrder,
}

/// Walks `x, f(x), f(f(x)), …` while `c` holds.
pub fn orbit(f: &PartialFn, c: &Condition, x: Lifted) -> Result<OrbitReport> {
    f.check_endo_cond(c)?;
    let mut trace = vec![x];
    let report = |trace, stop_reason, order| OrbitReport {
        start: x,
        trace,
        stop_reason,
        order,
    };
    let mut cur = match x {
        Lifted::Bottom => return Ok(report(trace, StopReason::BottomReached, ExtOrder::NegOne)),

        Lifted::Defined(s) if !c.holds(s) => {
            return Ok(report(trace, StopReason::ConditionFailed, ExtOrder::NegOne))
        }
        Lifted::Defined(s) => s,
    };
    let mut seen = HashSet::from([cur]);
    let mut count = 0u64;
    loop {
        let next = f.at(cur);
        trace.push(next);
        match next {
            Lifted::Bottom => return Ok(report(trace, StopReason::BottomReached, ExtOrder::Finite(count))),
            Lifted::Defined(y) if !c.holds(y) => {
                return Ok(report(trace, StopReason::ConditionFailed, ExtOrder::Finite(count)))
            }
            Lifted::Defined(y) if !seen.insert(y) => {
                return Ok(report(trace, StopReason::CycleDetected, ExtOrder::Infinite))
            }
            Lifted::Defined(y) => {
                count += 1;
                cur = y;
            }
        }
    }
}

pub fn element_order(f: &PartialFn, c: &Condition, x: Lifted) -> Result<ExtOrder> {
    Ok(orbit(f, c, x)?.order)
}

/// Orders of every defined state, computed in one pass over the functional graph.
pub fn element_orders(f: &PartialFn, c: &Condition) -> Result<Vec<ExtOrder>> {
    f.check_endo_cond(c)?;
    let n = f.domain_space().len();
    let mut order: Vec<Option<ExtOrder>> = vec![None; n];
    let mut on_path = vec![false; n];
    let mut path: Vec<StateId> = Vec::new();
    for start in f.domain_space().states() {
        if order[start.index()].is_some() {
            continue;
        }
        if !c.holds(start) {
            order[start.index()] = Some(ExtOrder::NegOne);
            continue;
        }
        let mut cur = start;
        // value carried back along the path
        let mut tail = loop {
            path.push(cur);
            on_path[cur.index()] = true;
            match f.at(cur) {
                Lifted::Defined(y) if c.holds(y) => {
                    if on_path[y.index()] {
                        break ExtOrder::Infinite;
                    }
                    if let Some(o) = order[y.index()] {
                        break o.succ();
                    }
                    cur = y;
                }
                _ => break ExtOrder::Finite(0),
            }
        };
        while let Some(s) = path.pop() {
            on_path[s.index()] = false;
            order[s.index()] = Some(tail);
            tail = tail.succ();
        }
    }
    Ok(order.into_iter().map(|o| o.expect("every state resolved")).collect())
}

/// `m`: least order over `[A]_C`, or `-1` when the restriction is empty.
pub fn preservation_order(f: &PartialFn, c: &Condition) -> Result<ExtOrder> {
    let orders = element_orders(f, c)?;
    Ok(order_of(&orders, c))
}

/// `l`: greatest order over all defined states.
pub fn preservation_limit(f: &PartialFn, c: &Condition) -> Result<ExtOrder> {
    let orders = element_orders(f, c)?;
    Ok(limit_of(&orders))
}

pub fn nf_profile(f: &PartialFn, c: &Condition) -> Result<NfProfile> {
    let orders = element_orders(f, c)?;
    Ok(profile_of(&orders, c))
}

pub(crate) fn order_of(orders: &[ExtOrder], c: &Condition) -> ExtOrder {
    c.states().map(|s| orders[s.index()]).min().unwrap_or(ExtOrder::NegOne)
}

pub(crate) fn limit_of(orders: &[ExtOrder]) -> ExtOrder {
    orders.iter().copied().max().unwrap_or(ExtOrder::NegOne)
}

pub(crate) fn profile_of(orders: &[ExtOrder], c: &Condition) -> NfProfile {
    NfProfile {
        order: order_of(orders, c),
        limit: limit_of(orders),
    }
}

/// `fix(f)`.
pub fn fixed_points(f: &PartialFn) -> Vec<StateId> {
    f.domain_space()
        .states()
        .filter(|&s| f.is_endo() && f.at(s) == Lifted::Defined(s))
        .collect()
}

/// States with `f^k(x) = x`; with `minimal`, only those whose least period is `k`.
pub fn periodic_points(f: &PartialFn, k: usize, minimal: bool) -> Vec<StateId> {
    if k == 0 || !f.is_endo() {
        return Vec::new();
    }
    let returns_after = |s: StateId, j: usize| {
        let mut y = Lifted::Defined(s);
        for _ in 0..j {
            y = f.apply(y);
        }
        y == Lifted::Defined(s)
    };
    f.domain_space()
        .states()
        .filter(|&s| returns_after(s, k) && (!minimal || (1..k).all(|j| !returns_after(s, j))))
        .collect()
}

/// Fixed points inside `[A]_C` that some other state of `[A]_C` maps onto.
pub fn attractors(f: &PartialFn, c: &Condition) -> Result<Vec<StateId>> {
    f.check_endo_cond(c)?;
    let mut fed = vec![false; f.domain_space().len()];
    for z in c.states() {
        if let Lifted::Defined(y) = f.at(z) {
            if y != z {
                fed[y.index()] = true;
            }
        }
    }
    Ok(fixed_points(f)
        .into_iter()
        .filter(|y| c.holds(*y) && fed[y.index()])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{Domain, Space, StateSpace};

    fn space(lo: i64, hi: i64) -> Space {
        StateSpace::single("x", Domain::range("A", lo, hi).unwrap()).unwrap()
    }

    fn map(space: &Space, g: impl Fn(i64) -> i64) -> PartialFn {
        PartialFn::endo(space, |s| space.with_value(s, 0, g(space.value(s, 0))).into()).unwrap()
    }

    fn cond(space: &Space, p: impl Fn(i64) -> bool) -> Condition {
        Condition::from_fn(space, |s| p(space.value(s, 0)))
    }

    fn st(space: &Space, v: i64) -> Lifted {
        Lifted::Defined(space.encode(&[v]).unwrap())
    }

    #[test]
    fn ext_order_is_total() {
        use ExtOrder::*;
        assert!(NegOne < Finite(0));
        assert!(Finite(0) < Finite(7));
        assert!(Finite(u64::MAX) < Infinite);
        assert_eq!(NegOne.succ(), Finite(0));
        assert_eq!(Infinite.succ(), Infinite);
    }

    #[test]
    fn order_table() {
        let a = space(1, 15);
        let f = map(&a, |x| x + 2);
        let c = cond(&a, |x| x < 10);
        let orders = element_orders(&f, &c).unwrap();
        let expect = [4, 3, 3, 2, 2, 1, 1, 0, 0];
        for (i, e) in expect.iter().enumerate() {
            assert_eq!(orders[i], ExtOrder::Finite(*e));
        }
        for o in &orders[9..] {
            assert_eq!(*o, ExtOrder::NegOne);
        }
        assert_eq!(
            nf_profile(&f, &c).unwrap(),
            NfProfile {
                order: ExtOrder::Finite(0),
                limit: ExtOrder::Finite(4)
            }
        );
    }

    #[test]
    fn orbit_examples() {
        let a = space(1, 15);
        let f = map(&a, |x| x + 2);
        let c = cond(&a, |x| x < 10);
        let r = orbit(&f, &c, st(&a, 1)).unwrap();
        let trace: Vec<Lifted> = [1, 3, 5, 7, 9, 11].iter().map(|&v| st(&a, v)).collect();
        assert_eq!(r.trace, trace);
        assert_eq!(r.stop_reason, StopReason::ConditionFailed);
        assert_eq!(r.order, ExtOrder::Finite(4));
        assert_eq!(orbit(&f, &c, st(&a, 10)).unwrap().order, ExtOrder::NegOne);

        let b = space(1, 5);
        let id = PartialFn::identity(&b).unwrap();
        let r = orbit(&id, &Condition::always(&b), st(&b, 3)).unwrap();
        assert_eq!(r.stop_reason, StopReason::CycleDetected);
        assert_eq!(r.order, ExtOrder::Infinite);
    }

    #[test]
    fn bottom_ends_the_count() {
        let d = space(0, 20);
        let f = map(&d, |x| x + 1);
        let c = cond(&d, |x| x > 0);
        let r = orbit(&f, &c, st(&d, 5)).unwrap();
        assert_eq!(r.order, ExtOrder::Finite(15));
        assert_eq!(r.stop_reason, StopReason::BottomReached);
        assert_eq!(preservation_order(&f, &c).unwrap(), ExtOrder::Finite(0));
        let r = orbit(&f, &c, Lifted::Bottom).unwrap();
        assert_eq!(r.order, ExtOrder::NegOne);
    }

    #[test]
    fn order_and_limit_edge_cases() {
        let a = space(1, 15);
        let f = map(&a, |x| x + 2);
        let never = Condition::never(&a);
        assert_eq!(preservation_order(&f, &never).unwrap(), ExtOrder::NegOne);
        assert_eq!(preservation_limit(&f, &never).unwrap(), ExtOrder::NegOne);
        let id = PartialFn::identity(&a).unwrap();
        assert_eq!(preservation_limit(&id, &cond(&a, |x| x == 3)).unwrap(), ExtOrder::Infinite);
    }

    #[test]
    fn strengthened_profile_example() {
        let a = space(1, 15);
        let f = map(&a, |x| x + 2);
        let weak = nf_profile(&f, &cond(&a, |x| x < 10)).unwrap();
        let strong = nf_profile(&f, &cond(&a, |x| x < 5)).unwrap();
        assert_eq!(strong.order, ExtOrder::Finite(0));
        assert_eq!(strong.limit, ExtOrder::Finite(1));
        assert!(strong <= weak);
    }

    #[test]
    fn fixed_periodic_attractors() {
        let b = space(1, 5);
        assert_eq!(fixed_points(&PartialFn::identity(&b).unwrap()).len(), 5);

        let t = space(1, 3);
        let rot = map(&t, |x| (x % 3) + 1);
        assert_eq!(periodic_points(&rot, 3, false).len(), 3);
        assert_eq!(periodic_points(&rot, 3, true).len(), 3);
        assert!(periodic_points(&rot, 1, false).is_empty());
        assert!(fixed_points(&rot).is_empty());
        assert!(periodic_points(&PartialFn::identity(&t).unwrap(), 3, true).is_empty());

        let k = map(&b, |_| 4);
        let at = attractors(&k, &Condition::always(&b)).unwrap();
        assert_eq!(at.len(), 1);
        assert_eq!(Lifted::Defined(at[0]), st(&b, 4));
    }

    #[test]
    fn cycle_partly_outside_condition_bounds_orders() {
        let t = space(1, 3);
        let rot = map(&t, |x| (x % 3) + 1);
        let c = cond(&t, |x| x != 3);
        for o in element_orders(&rot, &c).unwrap() {
            assert!(o < ExtOrder::Finite(3));
        }
        assert_eq!(
            element_orders(&rot, &Condition::always(&t)).unwrap(),
            vec![ExtOrder::Infinite; 3]
        );
    }

    #[test]
    fn serialization() {
        let v = serde_json::to_string(&[ExtOrder::NegOne, ExtOrder::Finite(3), ExtOrder::Infinite]);
        assert_eq!(v.unwrap(), r#"["-1",3,"inf"]"#);
    }
}
