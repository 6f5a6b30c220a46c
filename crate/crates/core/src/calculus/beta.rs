//! Normal form of plain assignments.

use super::ast::{BetaRhs, ProgramUnit, Stmt};
use crate::error::{Error, Result};

/// Rewrites a `Beta` node into its normal form.
///
/// * a short right-hand side is padded with copies of its last entry;
/// * a `bottom` entry, or a literal outside its target's domain, turns the
///   whole node into `Abort`;
/// * an assignment that is overwritten later is dropped, after forwarding
///   its value into the reads that happen before the overwrite.
///
/// The result denotes the same function as the input. A repeated target is
/// kept when its value cannot be forwarded (the source variable is itself
/// reassigned in between) or when the copied variable's domain is not
/// contained in the target's, since that copy may fail.
pub fn beta_normalize(unit: &ProgramUnit, node: &Stmt) -> Result<Stmt> {
    let Stmt::Beta { targets, rhs } = node else {
        return Err(Error::InvalidArgument(format!("expected an assignment, found {}", node.kind())));
    };
    if rhs.is_empty() || rhs.len() > targets.len() {
        return Err(Error::Arity {
            targets: targets.len(),
            rhs: rhs.len(),
        });
    }
    let mut rhs = rhs.clone();
    let last = rhs.last().cloned().expect("nonempty");
    rhs.resize(targets.len(), last);
    let mut targets = targets.clone();

    for (t, r) in targets.iter().zip(&rhs) {
        let var = unit.var(t).ok_or_else(|| Error::UnknownName {
            kind: "variable",
            name: t.clone(),
        })?;
        match r {
            BetaRhs::Bottom => return Ok(Stmt::Abort),
            BetaRhs::Lit(n) if !var.domain.contains(*n) => return Ok(Stmt::Abort),
            _ => {}
        }
    }

    'outer: loop {
        for i in 0..targets.len() {
            let t = &targets[i];
            let Some(j) = (i + 1..targets.len()).find(|&j| targets[j] == *t) else {
                continue;
            };
            // A copy from a wider domain can still fail at run time, so it must stay.
            if let BetaRhs::Var(v) = &rhs[i] {
                if !fits_domain(unit, v, t) {
                    continue;
                }
            }
            let mut forwarded = rhs.clone();
            let mut ok = true;
            for k in i + 1..=j {
                if forwarded[k] != BetaRhs::Var(t.clone()) {
                    continue;
                }
                match &rhs[i] {
                    BetaRhs::Var(v) if targets[i + 1..k].contains(v) => {
                        ok = false;
                        break;
                    }
                    r => forwarded[k] = r.clone(),
                }
            }
            if ok {
                forwarded.remove(i);
                targets.remove(i);
                rhs = forwarded;
                continue 'outer;
            }
        }
        break;
    }
    Ok(Stmt::Beta { targets, rhs })
}

fn fits_domain(unit: &ProgramUnit, from: &str, to: &str) -> bool {
    match (unit.var(from), unit.var(to)) {
        (Some(a), Some(b)) => a.domain.elements().iter().all(|v| b.domain.contains(*v)),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse;
    use super::*;

    fn unit() -> ProgramUnit {
        parse("domain D = 0..9\nvar x, y, z : D").unwrap()
    }

    fn beta(t: &[&str], r: Vec<BetaRhs>) -> Stmt {
        Stmt::Beta {
            targets: t.iter().map(|s| s.to_string()).collect(),
            rhs: r,
        }
    }

    use BetaRhs::{Lit, Var};

    #[test]
    fn broadcast() {
        assert_eq!(
            beta_normalize(&unit(), &beta(&["x", "y", "z"], vec![Lit(1)])).unwrap(),
            beta(&["x", "y", "z"], vec![Lit(1), Lit(1), Lit(1)])
        );
    }

    #[test]
    fn narrowing_copy_is_kept() {
        let u = parse("domain D = 0..9\ndomain S = 0..3\nvar x : D\nvar y : S").unwrap();
        let node = beta(&["y", "y"], vec![Var("x".into()), Lit(1)]);
        assert_eq!(beta_normalize(&u, &node).unwrap(), node);
    }

    #[test]
    fn duplicate_targets() {
        assert_eq!(
            beta_normalize(&unit(), &beta(&["x", "y", "x"], vec![Lit(1), Lit(2), Lit(3)])).unwrap(),
            beta(&["y", "x"], vec![Lit(2), Lit(3)])
        );
        assert_eq!(
            beta_normalize(&unit(), &beta(&["x", "y", "x"], vec![Lit(5), Var("x".into()), Lit(7)])).unwrap(),
            beta(&["y", "x"], vec![Lit(5), Lit(7)])
        );
    }

    #[test]
    fn bottom_collapses() {
        assert_eq!(
            beta_normalize(&unit(), &beta(&["x", "y"], vec![Lit(1), BetaRhs::Bottom])).unwrap(),
            Stmt::Abort
        );
        assert_eq!(
            beta_normalize(&unit(), &beta(&["x"], vec![Lit(10)])).unwrap(),
            Stmt::Abort
        );
    }

    #[test]
    fn arity() {
        assert_eq!(
            beta_normalize(&unit(), &beta(&["x"], vec![Lit(1), Lit(2)])),
            Err(Error::Arity { targets: 1, rhs: 2 })
        );
        assert!(beta_normalize(&unit(), &beta(&["x"], vec![])).is_err());
    }
}
