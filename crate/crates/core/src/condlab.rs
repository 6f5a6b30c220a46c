//! Behaviour of the order/limit profile when the looping condition,
//! the state space or the loop body changes.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::condition::Condition;
use crate::error::{Error, Result};
use crate::orbit::{element_orders, limit_of, order_of, profile_of, ExtOrder, NfProfile};
use crate::pfn::{bullet_merge, compose, cond_identity, PartialFn};
use crate::space::{same_space, Lifted, StateId};

/// Difference of two extended orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delta {
    Finite(i64),
    PlusInf,
    MinusInf,
    /// `∞ - ∞`.
    Indeterminate,
}

impl Delta {
    pub fn between(a: ExtOrder, b: ExtOrder) -> Delta {
        match (a.as_i64(), b.as_i64()) {
            (Some(x), Some(y)) => Delta::Finite(x - y),
            (None, Some(_)) => Delta::PlusInf,
            (Some(_), None) => Delta::MinusInf,
            (None, None) => Delta::Indeterminate,
        }
    }

    /// `self - other`, with `∞ - ∞` indeterminate.
    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, other: Delta) -> Delta {
        use Delta::*;
        match (self, other) {
            (Indeterminate, _) | (_, Indeterminate) => Indeterminate,
            (Finite(a), Finite(b)) => Finite(a - b),
            (PlusInf, PlusInf) | (MinusInf, MinusInf) => Indeterminate,
            (PlusInf, _) | (_, MinusInf) => PlusInf,
            (MinusInf, _) | (_, PlusInf) => MinusInf,
        }
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Delta::Finite(n) => write!(f, "{n}"),
            Delta::PlusInf => write!(f, "inf"),
            Delta::MinusInf => write!(f, "-inf"),
            Delta::Indeterminate => write!(f, "indeterminate"),
        }
    }
}

impl Serialize for Delta {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Delta::Finite(n) => s.serialize_i64(*n),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelaxationReport {
    pub old_profile: NfProfile,
    pub new_profile: NfProfile,
    pub order_relaxation: Delta,
    pub limit_relaxation: Delta,
    pub sigma: Delta,
    /// New limit below the old order.
    pub window_collapsed: bool,
}

/// Relaxations from `c` to the stronger `c_strong`.
pub fn relaxation(f: &PartialFn, c: &Condition, c_strong: &Condition) -> Result<RelaxationReport> {
    f.check_endo_cond(c)?;
    if !c_strong.entails(c)? {
        return Err(Error::NotStronger);
    }
    Ok(relaxation_unchecked(f, c, c_strong))
}

fn relaxation_unchecked(f: &PartialFn, c: &Condition, c_new: &Condition) -> RelaxationReport {
    let old = profile_of(&element_orders(f, c).expect("checked"), c);
    let new = profile_of(&element_orders(f, c_new).expect("checked"), c_new);
    let order_relaxation = Delta::between(old.order, new.order);
    let limit_relaxation = Delta::between(old.limit, new.limit);
    RelaxationReport {
        old_profile: old,
        new_profile: new,
        order_relaxation,
        limit_relaxation,
        sigma: limit_relaxation.sub(order_relaxation),
        window_collapsed: new.limit < old.order,
    }
}

/// Relaxation report for a weakening `c ⊢ c_weak`; deltas are old minus new.
pub fn weakening_report(f: &PartialFn, c: &Condition, c_weak: &Condition) -> Result<RelaxationReport> {
    f.check_endo_cond(c)?;
    if !c.entails(c_weak)? {
        return Err(Error::NotWeaker);
    }
    Ok(relaxation_unchecked(f, c, c_weak))
}

/// Neither profile component grows when `c_strong ⊢ c`.
pub fn check_strengthening(f: &PartialFn, c: &Condition, c_strong: &Condition) -> Result<bool> {
    let r = relaxation(f, c, c_strong)?;
    Ok(r.new_profile.order <= r.old_profile.order && r.new_profile.limit <= r.old_profile.limit)
}

/// Neither profile component shrinks when `c ⊢ c_weak`.
pub fn check_weakening(f: &PartialFn, c: &Condition, c_weak: &Condition) -> Result<bool> {
    let r = weakening_report(f, c, c_weak)?;
    Ok(r.new_profile.order >= r.old_profile.order && r.new_profile.limit >= r.old_profile.limit)
}

/// `n_{x,C'} ≤ n_{x,C}` for every state, given `c_strong ⊢ c`.
pub fn check_element_monotonicity(f: &PartialFn, c: &Condition, c_strong: &Condition) -> Result<bool> {
    f.check_endo_cond(c)?;
    if !c_strong.entails(c)? {
        return Err(Error::NotStronger);
    }
    let weak = element_orders(f, c)?;
    let strong = element_orders(f, c_strong)?;
    Ok(strong.iter().zip(&weak).all(|(s, w)| s <= w))
}

/// An inner loop on `c_a ∧ c_b` against the outer condition `c_b`.
pub fn nested_bound_check(f: &PartialFn, c_a: &Condition, c_b: &Condition) -> Result<bool> {
    f.check_endo_cond(c_b)?;
    let inner = c_a.and(c_b)?;
    check_strengthening(f, c_b, &inner)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RemapCase {
    Equal,
    StrictlyWeaker,
    StrictlyStronger,
    /// Neither stronger nor weaker than the transported condition.
    Incomparable,
    LargerSet,
    SmallerSurjective,
    SmallerNonSurjective,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RemapReport {
    pub case_tag: RemapCase,
    pub old_profile: NfProfile,
    pub new_profile: NfProfile,
    pub relation_verified: bool,
    /// Orders on the target space: transported states first (by source state), then extras.
    #[serde(skip)]
    pub new_orders: Vec<ExtOrder>,
}

/// Moves `f` under `c_a` onto a different state set through `phi`.
///
/// A source state keeps its orbit under `f` but is judged by `c_b` at its
/// image under `phi`. Target states outside `phi`'s image have no transported
/// behaviour and count as leaving the loop after one step when `c_b` holds
/// on them.
pub fn remap(f: &PartialFn, c_a: &Condition, phi: &PartialFn, c_b: &Condition) -> Result<RemapReport> {
    f.check_endo_cond(c_a)?;
    if !same_space(phi.domain_space(), f.domain_space()) || !same_space(phi.codomain_space(), c_b.space()) {
        return Err(Error::mismatch("phi must map the function's space onto the new condition's space"));
    }
    let phi_at = |s: StateId| phi.at(s).defined().ok_or(Error::NonTotalPhi(s.0));
    for s in phi.domain_space().states() {
        phi_at(s)?;
    }
    let space_a = f.domain_space();
    let space_b = c_b.space();
    let old_orders = element_orders(f, c_a)?;
    let old = profile_of(&old_orders, c_a);

    let pulled = Condition::from_fn(space_a, |s| c_b.holds(phi_at(s).expect("total")));
    let transported = element_orders(f, &pulled)?;
    let image = phi.image_condition();
    let extras: Vec<StateId> = space_b.states().filter(|&y| !image.holds(y)).collect();
    let extra_order = |y: StateId| if c_b.holds(y) { ExtOrder::Finite(0) } else { ExtOrder::NegOne };

    let mut new_orders = transported.clone();
    new_orders.extend(extras.iter().map(|&y| extra_order(y)));
    let in_cond = transported
        .iter()
        .zip(space_a.states())
        .filter(|(_, s)| pulled.holds(*s))
        .map(|(o, _)| *o)
        .chain(extras.iter().filter(|&&y| c_b.holds(y)).map(|&y| extra_order(y)));
    let new = NfProfile {
        order: in_cond.min().unwrap_or(ExtOrder::NegOne),
        limit: limit_of(&new_orders),
    };

    let carried = Condition::from_states(space_b, c_a.states().map(|s| phi_at(s).expect("total")))?;
    let b_on_image = c_b.and(&image)?;
    let injective = phi.is_injective();
    let surjective = extras.is_empty();

    let extra_profile = || {
        let sat: Vec<ExtOrder> = extras.iter().filter(|&&y| c_b.holds(y)).map(|&y| extra_order(y)).collect();
        let all = extras.iter().map(|&y| extra_order(y));
        let order = match (c_a.is_empty(), sat.iter().min()) {
            (true, None) => ExtOrder::NegOne,
            (true, Some(m)) => *m,
            (false, m) => m.map_or(old.order, |m| old.order.min(*m)),
        };
        NfProfile {
            order,
            limit: all.fold(old.limit, ExtOrder::max),
        }
    };
    let ge = new.order >= old.order && new.limit >= old.limit;
    let le = new.order <= old.order && new.limit <= old.limit;

    let (case_tag, relation_verified) = if b_on_image == carried {
        match (injective, surjective) {
            (true, true) => (RemapCase::Equal, new == old),
            (true, false) => (RemapCase::LargerSet, new == extra_profile()),
            (false, true) => (RemapCase::SmallerSurjective, new == old),
            (false, false) => (RemapCase::SmallerNonSurjective, new == extra_profile()),
        }
    } else {
        let tag = |t: RemapCase| {
            if injective {
                t
            } else if surjective {
                RemapCase::SmallerSurjective
            } else {
                RemapCase::SmallerNonSurjective
            }
        };
        if carried.strictly_stronger(&b_on_image)? {
            (tag(RemapCase::StrictlyWeaker), ge)
        } else if b_on_image.strictly_stronger(&carried)? {
            (tag(RemapCase::StrictlyStronger), le)
        } else {
            (tag(RemapCase::Incomparable), true)
        }
    };
    Ok(RemapReport {
        case_tag,
        old_profile: old,
        new_profile: new,
        relation_verified,
        new_orders,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionalBounds {
    pub m1: ExtOrder,
    pub m2: ExtOrder,
    pub l1: ExtOrder,
    pub l2: ExtOrder,
    pub order_bound: ExtOrder,
    pub limit_bound: ExtOrder,
    pub exact: NfProfile,
    pub order_bound_holds: bool,
    pub limit_bound_holds: bool,
    /// Direct orders agree with the alternating-phase decomposition.
    pub phase_split_agrees: bool,
}

/// The conditional function `(f1 ∘ id_c) • (f2 ∘ id_¬c)`.
pub fn conditional_fn(f1: &PartialFn, f2: &PartialFn, c: &Condition) -> Result<PartialFn> {
    f1.check_endo_cond(c)?;
    f2.check_endo_cond(c)?;
    bullet_merge(
        &compose(f1, &cond_identity(c))?,
        &compose(f2, &cond_identity(&c.not()))?,
    )
}

pub fn conditional_bounds(
    f1: &PartialFn,
    f2: &PartialFn,
    c: &Condition,
    c_a: &Condition,
) -> Result<ConditionalBounds> {
    let f = conditional_fn(f1, f2, c)?;
    f.check_endo_cond(c_a)?;
    let c1 = c.and(c_a)?;
    let c2 = c.not().and(c_a)?;
    let o1 = element_orders(f1, &c1)?;
    let o2 = element_orders(f2, &c2)?;
    let exact_orders = element_orders(&f, c_a)?;
    let exact = profile_of(&exact_orders, c_a);
    let (m1, m2) = (order_of(&o1, &c1), order_of(&o2, &c2));
    let (l1, l2) = (limit_of(&o1), limit_of(&o2));
    let order_bound = m1.min(m2);
    let limit_bound = l1.min(l2);
    let split = phase_split_orders(f1, f2, c, c_a, &o1, &o2)?;
    Ok(ConditionalBounds {
        m1,
        m2,
        l1,
        l2,
        order_bound,
        limit_bound,
        exact,
        order_bound_holds: exact.order >= order_bound,
        limit_bound_holds: exact.limit >= limit_bound,
        phase_split_agrees: split == exact_orders,
    })
}

/// Orders of the conditional function assembled phase by phase.
///
/// A phase is a maximal run under one branch. For `x` in `c ∧ c_a` the run
/// under `f1` lasts `n + 1` steps where `n` is its order under `c ∧ c_a`; the
/// rest of the orbit continues from `f1^{n+1}(x)`, whose own order is `-1`
/// when it is bottom or outside `c_a`. Symmetric for `¬c` and `f2`.
pub fn phase_split_orders(
    f1: &PartialFn,
    f2: &PartialFn,
    c: &Condition,
    c_a: &Condition,
    o1: &[ExtOrder],
    o2: &[ExtOrder],
) -> Result<Vec<ExtOrder>> {
    let space = c_a.space();
    let n = space.len();
    let branch = |s: StateId| if c.holds(s) { (f1, o1) } else { (f2, o2) };

    // exit[x]: state reached when the phase starting at x ends.
    let mut exit: Vec<Lifted> = vec![Lifted::Bottom; n];
    let mut phase_starts: Vec<StateId> = c_a.states().filter(|&s| branch(s).1[s.index()].is_finite()).collect();
    phase_starts.sort_by_key(|&s| branch(s).1[s.index()]);
    for &s in &phase_starts {
        let (g, o) = branch(s);
        let next = g.at(s);
        exit[s.index()] = if o[s.index()] == ExtOrder::Finite(0) {
            next
        } else {
            exit[next.defined().expect("positive order has a defined successor").index()]
        };
    }

    let mut total: Vec<Option<ExtOrder>> = vec![None; n];
    let mut on_path = vec![false; n];
    let mut path: Vec<StateId> = Vec::new();
    for start in space.states() {
        if total[start.index()].is_some() {
            continue;
        }
        if !c_a.holds(start) {
            total[start.index()] = Some(ExtOrder::NegOne);
            continue;
        }
        let mut cur = start;
        let mut tail = loop {
            let phase = branch(cur).1[cur.index()];
            if !phase.is_finite() {
                break ExtOrder::Infinite;
            }
            path.push(cur);
            on_path[cur.index()] = true;
            match exit[cur.index()] {
                Lifted::Defined(y) if c_a.holds(y) => {
                    if on_path[y.index()] {
                        break ExtOrder::Infinite;
                    }
                    if let Some(t) = total[y.index()] {
                        break t;
                    }
                    cur = y;
                }
                _ => break ExtOrder::NegOne,
            }
        };
        // tail is the total of the state after the last pushed phase
        if path.is_empty() {
            total[cur.index()] = Some(tail);
            continue;
        }
        while let Some(s) = path.pop() {
            on_path[s.index()] = false;
            let phase = branch(s).1[s.index()].as_i64().expect("finite phase");
            tail = match tail {
                ExtOrder::Infinite => ExtOrder::Infinite,
                t => ExtOrder::from_i64(phase + 1 + t.as_i64().expect("finite")),
            };
            total[s.index()] = Some(tail);
        }
    }
    Ok(total.into_iter().map(|t| t.expect("resolved")).collect())
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

    #[test]
    fn relaxation_worked_example() {
        let a = space(1, 15);
        let f = map(&a, |x| x + 2);
        let r = relaxation(&f, &cond(&a, |x| x < 10), &cond(&a, |x| x < 5)).unwrap();
        assert_eq!(r.new_profile.order, ExtOrder::Finite(0));
        assert_eq!(r.new_profile.limit, ExtOrder::Finite(1));
        assert_eq!(r.order_relaxation, Delta::Finite(0));
        assert_eq!(r.limit_relaxation, Delta::Finite(3));
        assert_eq!(r.sigma, Delta::Finite(3));
        assert!(!r.window_collapsed);
    }

    #[test]
    fn relaxation_trivial_cases() {
        let a = space(1, 15);
        let f = map(&a, |x| x + 2);
        let c = cond(&a, |x| x < 10);
        let r = relaxation(&f, &c, &c).unwrap();
        assert_eq!((r.order_relaxation, r.limit_relaxation, r.sigma), (Delta::Finite(0), Delta::Finite(0), Delta::Finite(0)));
        let r = relaxation(&f, &c, &Condition::never(&a)).unwrap();
        assert_eq!(r.new_profile, NfProfile { order: ExtOrder::NegOne, limit: ExtOrder::NegOne });
        assert_eq!(relaxation(&f, &cond(&a, |x| x < 5), &c), Err(Error::NotStronger));
    }

    #[test]
    fn infinite_deltas() {
        let a = space(1, 5);
        let id = PartialFn::identity(&a).unwrap();
        let r = relaxation(&id, &Condition::always(&a), &cond(&a, |x| x < 3)).unwrap();
        assert_eq!(r.order_relaxation, Delta::Indeterminate);
        assert_eq!(Delta::between(ExtOrder::Infinite, ExtOrder::Finite(2)), Delta::PlusInf);
        assert_eq!(Delta::PlusInf.sub(Delta::Finite(1)), Delta::PlusInf);
    }

    #[test]
    fn weakening_examples() {
        let a = space(1, 15);
        let f = map(&a, |x| x + 2);
        let c = cond(&a, |x| x < 10);
        let r = weakening_report(&f, &c, &cond(&a, |x| x < 12)).unwrap();
        assert_eq!(r.new_profile.limit, ExtOrder::Finite(5));
        assert!(check_weakening(&f, &c, &c).unwrap());
        let wrap = map(&a, |x| x % 15 + 1);
        let r = weakening_report(&wrap, &c, &Condition::always(&a)).unwrap();
        assert_eq!(r.new_profile, NfProfile { order: ExtOrder::Infinite, limit: ExtOrder::Infinite });
        assert_eq!(weakening_report(&f, &c, &cond(&a, |x| x < 5)), Err(Error::NotWeaker));
    }

    #[test]
    fn strengthening_can_raise_the_order() {
        // 1 is a fixed point inside both conditions; 2 leaves {1,2} at once.
        let a = space(1, 3);
        let f = map(&a, |x| if x == 1 { 1 } else { 3 });
        let c = cond(&a, |x| x <= 2);
        let c_strong = cond(&a, |x| x == 1);
        assert!(check_element_monotonicity(&f, &c, &c_strong).unwrap());
        assert!(!check_strengthening(&f, &c, &c_strong).unwrap());
        assert!(!check_weakening(&f, &c_strong, &c).unwrap());
        let r = relaxation(&f, &c, &c_strong).unwrap();
        assert_eq!(r.old_profile.order, ExtOrder::Finite(0));
        assert_eq!(r.new_profile.order, ExtOrder::Infinite);
    }

    #[test]
    fn strengthening_f1() {
        let a = space(1, 15);
        let f = map(&a, |x| x + 2);
        assert!(check_strengthening(&f, &cond(&a, |x| x < 10), &cond(&a, |x| x < 5)).unwrap());
    }

    #[test]
    fn nested_bounds() {
        let xy = std::sync::Arc::new(
            StateSpace::new(vec![
                crate::space::Var { name: "x".into(), domain: Domain::range("X", 0, 3).unwrap() },
                crate::space::Var { name: "y".into(), domain: Domain::range("Y", 0, 3).unwrap() },
            ])
            .unwrap(),
        );
        let f = PartialFn::endo(&xy, |s| xy.with_value(s, 0, xy.value(s, 0) + 1).into()).unwrap();
        let c_b = Condition::from_fn(&xy, |s| xy.value(s, 0) < 3);
        assert!(nested_bound_check(&f, &Condition::always(&xy), &c_b).unwrap());
        let inner = Condition::always(&xy).and(&c_b).unwrap();
        assert_eq!(
            crate::orbit::nf_profile(&f, &inner).unwrap(),
            crate::orbit::nf_profile(&f, &c_b).unwrap()
        );
        assert!(nested_bound_check(&f, &c_b, &Condition::never(&xy)).unwrap());
    }

    #[test]
    fn remap_bijective_cases() {
        let a = space(1, 9);
        let b = space(11, 19);
        let f = map(&a, |x| x + 2);
        let c_a = cond(&a, |x| x < 6);
        let phi = PartialFn::from_fn(&a, &b, |s| b.encode(&[a.value(s, 0) + 10]).into()).unwrap();
        let r = remap(&f, &c_a, &phi, &cond(&b, |y| y < 16)).unwrap();
        assert_eq!(r.case_tag, RemapCase::Equal);
        assert_eq!(r.old_profile, r.new_profile);
        assert!(r.relation_verified);

        let r = remap(&f, &c_a, &phi, &cond(&b, |y| y < 18)).unwrap();
        assert_eq!(r.case_tag, RemapCase::StrictlyWeaker);
        assert!(r.new_profile.limit >= r.old_profile.limit);

        let r = remap(&f, &c_a, &phi, &cond(&b, |y| y < 13)).unwrap();
        assert_eq!(r.case_tag, RemapCase::StrictlyStronger);
        assert!(r.relation_verified);
    }

    #[test]
    fn remap_larger_set() {
        let a = space(1, 9);
        let b = space(1, 20);
        let f = map(&a, |x| x + 2);
        let c_a = cond(&a, |x| x < 6);
        let phi = PartialFn::from_fn(&a, &b, |s| b.encode(&[a.value(s, 0)]).into()).unwrap();
        let r = remap(&f, &c_a, &phi, &cond(&b, |y| !(6..=15).contains(&y))).unwrap();
        assert_eq!(r.case_tag, RemapCase::LargerSet);
        assert!(r.relation_verified);
        assert_eq!(r.new_profile.order, ExtOrder::Finite(0));
        assert_eq!(r.new_profile.limit, r.old_profile.limit);
    }

    #[test]
    fn remap_smaller_set_and_errors() {
        let a = space(1, 4);
        let b = space(0, 1);
        let f = map(&a, |x| x % 4 + 1);
        let parity = PartialFn::from_fn(&a, &b, |s| b.encode(&[a.value(s, 0) % 2]).into()).unwrap();
        let r = remap(&f, &Condition::always(&a), &parity, &Condition::always(&b)).unwrap();
        assert_eq!(r.case_tag, RemapCase::SmallerSurjective);
        assert!(r.relation_verified);

        let partial = PartialFn::from_fn(&a, &b, |_| Lifted::Bottom).unwrap();
        assert_eq!(
            remap(&f, &Condition::always(&a), &partial, &Condition::always(&b)).unwrap_err(),
            Error::NonTotalPhi(0)
        );
    }

    #[test]
    fn conditional_bounds_same_function() {
        let a = space(1, 15);
        let f = map(&a, |x| x + 2);
        let c = cond(&a, |x| x % 2 == 0);
        let c_a = cond(&a, |x| x < 10);
        let r = conditional_bounds(&f, &f, &c, &c_a).unwrap();
        assert_eq!(r.exact, crate::orbit::nf_profile(&f, &c_a).unwrap());
        assert!(r.order_bound_holds && r.limit_bound_holds && r.phase_split_agrees);
    }

    #[test]
    fn phase_split_alternating() {
        let a = space(0, 20);
        let f1 = map(&a, |x| x + 3);
        let f2 = map(&a, |x| x - 1);
        let c = cond(&a, |x| x % 2 == 0);
        let c_a = cond(&a, |x| x < 18);
        let r = conditional_bounds(&f1, &f2, &c, &c_a).unwrap();
        assert!(r.phase_split_agrees);
        assert!(r.order_bound_holds && r.limit_bound_holds);
    }
}
