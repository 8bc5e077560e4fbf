//! Reads exported LP text back and checks it against the in-memory instance.

use std::collections::BTreeMap;

use nbswitch_core::lpcert::{export_lp, primal_optimum, LpInstance};
use nbswitch_core::{Mode, Rational};
use num_traits::ToPrimitive;

#[derive(Debug, Default)]
struct Lp {
    objective: Vec<String>,
    rows: BTreeMap<String, (Vec<String>, i64)>,
    bounded: Vec<String>,
}

fn parse(text: &str) -> Lp {
    let mut lp = Lp::default();
    let mut section = "";
    let mut stmts: Vec<(String, String)> = Vec::new();
    for line in text.lines() {
        let l = line.trim();
        if l.starts_with('\\') || l.is_empty() {
            continue;
        }
        match l {
            "Maximize" | "Subject To" | "Bounds" | "End" => {
                section = match l {
                    "Maximize" => "obj",
                    "Subject To" => "st",
                    "Bounds" => "bounds",
                    _ => "end",
                };
                continue;
            }
            _ => {}
        }
        if section == "bounds" || l.contains(':') || stmts.is_empty() {
            stmts.push((section.to_string(), l.to_string()));
        } else {
            let last = stmts.last_mut().unwrap();
            last.1.push(' ');
            last.1.push_str(l);
        }
    }
    for (sec, s) in stmts {
        match sec.as_str() {
            "obj" => {
                let (_, body) = s.split_once(':').unwrap();
                lp.objective = terms(body);
            }
            "st" => {
                let (name, body) = s.split_once(':').unwrap();
                let (lhs, rhs) = body.split_once("<=").unwrap();
                lp.rows.insert(name.trim().to_string(), (terms(lhs), rhs.trim().parse().unwrap()));
            }
            "bounds" => {
                let parts: Vec<&str> = s.split_whitespace().collect();
                assert_eq!((parts[0], parts[1], parts[3], parts[4]), ("0", "<=", "<=", "1"), "{s}");
                lp.bounded.push(parts[2].to_string());
            }
            _ => panic!("text after End: {s}"),
        }
    }
    lp
}

fn terms(s: &str) -> Vec<String> {
    s.split('+').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect()
}

#[test]
fn exported_lp_round_trips() {
    for mode in [Mode::LinkBlocking, Mode::CrosstalkFree] {
        for (d, n, t, f, k) in [(2, 3, 0, 1, 1), (2, 4, 1, 2, 2), (2, 4, 2, 4, 4), (3, 3, 1, 3, 2), (2, 3, 3, 2, 1)] {
            let inst = LpInstance::canonical(d, n, t, f, k, mode).unwrap();
            let text = export_lp(&inst);
            assert_eq!(text, export_lp(&inst), "export is deterministic");
            let lp = parse(&text);
            assert_eq!(lp.objective.len(), inst.uw_pairs().len() + inst.uv_pairs().len());
            assert_eq!(lp.bounded.len(), inst.uw_pairs().len());

            // the max-flow optimum satisfies every parsed row and attains the objective
            let opt = primal_optimum::<Rational>(&inst);
            let mut value: BTreeMap<String, i64> = BTreeMap::new();
            for (&(u, w), x) in &opt.x_uw {
                value.insert(format!("x_u{u}_w{w}"), x.to_integer().to_i64().unwrap());
            }
            for (&(u, v), x) in &opt.x_uv {
                value.insert(format!("x_u{u}_v{v}"), x.to_integer().to_i64().unwrap());
            }
            let eval = |vars: &[String]| vars.iter().map(|v| value.get(v).copied().unwrap_or(0)).sum::<i64>();
            for (name, (vars, rhs)) in &lp.rows {
                assert!(eval(vars) <= *rhs, "{name} violated");
            }
            assert_eq!(Rational::from_integer(eval(&lp.objective).into()), opt.objective());

            // every variable in a row is declared in the objective
            for (vars, _) in lp.rows.values() {
                assert!(vars.iter().all(|v| lp.objective.contains(v)));
            }
            // one window row per window that has variables, one fanout row per input
            let windows: std::collections::BTreeSet<_> = inst.uw_pairs().iter().map(|p| p.1).collect();
            let inputs: std::collections::BTreeSet<_> =
                inst.uw_pairs().iter().map(|p| p.0).chain(inst.uv_pairs().iter().map(|p| p.0)).collect();
            assert_eq!(lp.rows.keys().filter(|r| r.starts_with("win_")).count(), windows.len());
            assert_eq!(lp.rows.keys().filter(|r| r.starts_with("fan_")).count(), inputs.len());
        }
    }
}
