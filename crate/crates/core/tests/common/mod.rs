#![allow(dead_code)]

use std::collections::BTreeSet;

use fstcascade::{Arc, Cascade, Fst, StateId, Symbol};

pub fn sym(text: &str) -> Symbol {
    Symbol::new(text).unwrap()
}

pub fn syms(texts: &[&str]) -> Vec<Symbol> {
    texts.iter().map(|t| sym(t)).collect()
}

pub fn fst(states: usize, finals: &[StateId], arcs: &[(StateId, &str, &str, StateId)]) -> Fst {
    Fst::new(
        states,
        finals.iter().copied(),
        arcs.iter()
            .map(|&(p, i, o, q)| Arc::new(p, sym(i), sym(o), q)),
        [],
        [],
    )
    .unwrap()
}

/// Symbol texts of each class.
pub fn texts(classes: &[Vec<Symbol>]) -> Vec<Vec<String>> {
    classes
        .iter()
        .map(|c| c.iter().map(|s| s.as_str().to_string()).collect())
        .collect()
}

/// Brute force: two candidates are equivalent when, at every state, the sets
/// of (output, destination) over their arcs coincide. Classes are sorted,
/// ordered by first member.
pub fn oracle_partition(fst: &Fst, candidates: &BTreeSet<Symbol>) -> Vec<Vec<Symbol>> {
    let behaviour = |s: &Symbol| -> Vec<BTreeSet<(String, StateId)>> {
        (0..fst.state_count())
            .map(|q| {
                fst.arcs()
                    .iter()
                    .filter(|a| a.src == q && &a.input == s)
                    .map(|a| (a.output.as_str().to_string(), a.dst))
                    .collect()
            })
            .collect()
    };
    let mut classes: Vec<Vec<Symbol>> = Vec::new();
    for s in candidates {
        let b = behaviour(s);
        match classes.iter_mut().find(|c| behaviour(&c[0]) == b) {
            Some(c) => c.push(s.clone()),
            None => classes.push(vec![s.clone()]),
        }
    }
    for c in &mut classes {
        c.sort();
    }
    classes.sort();
    classes
}

/// Checks that `path` is a run of `fst` from state 0 to a final state that
/// reads `input` and writes `output`, using only the transducer's arcs.
pub fn check_path(
    fst: &Fst,
    input: &[Symbol],
    output: &[Symbol],
    path: &[Arc],
) -> Result<(), String> {
    let known: BTreeSet<&str> = fst
        .arcs()
        .iter()
        .flat_map(|a| [a.input.as_str(), a.output.as_str()])
        .chain(fst.declared_in().iter().map(Symbol::as_str))
        .chain(fst.declared_out().iter().map(Symbol::as_str))
        .filter(|t| *t != "<eps>" && *t != "<unk>")
        .collect();
    let mut state = 0;
    let mut read = 0;
    let mut written: Vec<Symbol> = Vec::new();
    for a in path {
        if !fst.arcs().contains(a) {
            return Err(format!("arc {a} is not in the transducer"));
        }
        if a.src != state {
            return Err(format!("arc {a} does not leave state {state}"));
        }
        let mut consumed = None;
        if a.input.as_str() != "<eps>" {
            let tok = input.get(read).ok_or("path reads past the input")?;
            let ok = if a.input.as_str() == "<unk>" {
                !known.contains(tok.as_str())
            } else {
                a.input == *tok
            };
            if !ok {
                return Err(format!("arc {a} cannot read {tok}"));
            }
            consumed = Some(tok.clone());
            read += 1;
        }
        match a.output.as_str() {
            "<eps>" => {}
            "<unk>" => written.push(consumed.ok_or("unknown output without input")?),
            _ => written.push(a.output.clone()),
        }
        state = a.dst;
    }
    if read != input.len() {
        return Err("path does not read the whole input".into());
    }
    if !fst.is_final(state) {
        return Err(format!("path ends in non-final state {state}"));
    }
    if written != output {
        return Err("path writes a different output".into());
    }
    Ok(())
}

/// α0 shares arcs with α1, α2 at state 0 and with α3, α4 at state 2.
pub fn three_class_t2() -> Fst {
    fst(
        4,
        &[1, 3],
        &[
            (0, "α0", "y", 1),
            (0, "α1", "y", 1),
            (0, "α2", "y", 1),
            (0, "α3", "v", 2),
            (0, "α4", "v", 2),
            (2, "α0", "x", 3),
            (2, "α1", "y", 3),
            (2, "α2", "y", 3),
            (2, "α3", "x", 3),
            (2, "α4", "x", 3),
        ],
    )
}

/// α0 -> β0 and α1 -> β1 on parallel arcs; the last stage cannot tell β0
/// from β1.
pub fn parallel_arcs() -> Cascade {
    Cascade::new(vec![
        fst(2, &[1], &[(0, "a", "α0", 1), (0, "b", "α1", 1)]),
        fst(2, &[1], &[(0, "α0", "β0", 1), (0, "α1", "β1", 1)]),
        fst(2, &[1], &[(0, "β0", "x", 1), (0, "β1", "x", 1)]),
    ])
    .unwrap()
}
