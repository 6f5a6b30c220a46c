//! Denotation tables against the small-step reference interpreter.

mod common;

use common::{all_fixtures, env_of, random_stmt, rng, state_of, two_var_space, two_var_unit, Oracle, Run};
use tpa_core::calculus::{denote_outcomes, denote_stmt, Denotation, Outcome, ProgramUnit, Stmt};

fn mismatches(unit: &ProgramUnit, body: &Stmt, d: &Denotation) -> Vec<String> {
    let oracle = Oracle::new(unit);
    let mut out = Vec::new();
    for s in d.space.states() {
        let want = match oracle.run(body, env_of(&d.space, s)) {
            Run::Halted(env) => Outcome::Defined(state_of(&d.space, &env).expect("oracle stays in domain")),
            Run::Stuck => Outcome::Stuck,
            Run::Diverged => Outcome::Diverge,
        };
        if d.at(s) != want {
            out.push(format!("{}: table {:?}, oracle {:?}", d.space.format_state(s), d.at(s), want));
        }
    }
    out
}

#[test]
fn every_fixture_program_matches() {
    let mut checked = 0;
    for (file, unit) in all_fixtures() {
        for p in &unit.programs {
            let d = denote_outcomes(&unit, &p.name).unwrap();
            let bad = mismatches(&unit, &p.body, &d);
            assert!(bad.is_empty(), "{file}/{}: {bad:?}", p.name);
            checked += 1;
        }
    }
    assert!(checked >= 30, "only {checked} programs");
}

#[test]
fn random_programs_match() {
    let unit = two_var_unit();
    let space = two_var_space(&unit);
    let mut r = rng(7);
    for _ in 0..3000 {
        let stmt = random_stmt(&mut r, 4);
        let d = denote_stmt(&unit, &space, &stmt).unwrap();
        let bad = mismatches(&unit, &stmt, &d);
        assert!(bad.is_empty(), "{stmt}: {bad:?}");
    }
}

#[test]
fn fixture_outcomes_cover_all_kinds() {
    let mut seen = [false; 3];
    for (_, unit) in all_fixtures() {
        for p in &unit.programs {
            for o in denote_outcomes(&unit, &p.name).unwrap().outcomes {
                seen[match o {
                    Outcome::Defined(_) => 0,
                    Outcome::Stuck => 1,
                    Outcome::Diverge => 2,
                }] = true;
            }
        }
    }
    assert_eq!(seen, [true; 3]);
}
