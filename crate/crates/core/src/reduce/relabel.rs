//! Representative substitution on one tape of a transducer.

use std::collections::BTreeMap;

use crate::fst::{Arc, Fst};
use crate::symbol::Symbol;

use super::ReduceError;

/// A symbol substitution; symbols without an entry map to themselves.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Relabeling {
    map: BTreeMap<Symbol, Symbol>,
}

impl Relabeling {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn from_pairs(
        pairs: impl IntoIterator<Item = (Symbol, Symbol)>,
    ) -> Result<Self, ReduceError> {
        let mut map = BTreeMap::new();
        for (from, to) in pairs {
            if let Some(bad) = [&from, &to].into_iter().find(|s| s.is_reserved()) {
                return Err(ReduceError::ReservedCandidate(bad.clone()));
            }
            if from != to {
                map.insert(from, to);
            }
        }
        Ok(Relabeling { map })
    }

    pub(crate) fn from_classes(classes: &[Vec<Symbol>]) -> Self {
        let map = classes
            .iter()
            .flat_map(|c| c[1..].iter().map(|m| (m.clone(), c[0].clone())))
            .collect();
        Relabeling { map }
    }

    pub fn apply<'a>(&'a self, symbol: &'a Symbol) -> &'a Symbol {
        self.map.get(symbol).unwrap_or(symbol)
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    /// Symbols that are replaced by something else.
    pub fn merged_away(&self) -> impl Iterator<Item = &Symbol> {
        self.map.keys()
    }
}

fn rebuild(fst: &Fst, arcs: Vec<Arc>, declared_in: Vec<Symbol>, declared_out: Vec<Symbol>) -> Fst {
    Fst::new(
        fst.state_count(),
        fst.finals().iter().copied(),
        arcs,
        declared_in,
        declared_out,
    )
    .expect("relabeling ordinary symbols keeps a transducer valid")
}

/// Rewrites the output tape of the upstream transducer of a pair.
///
/// Arc outputs and declared output symbols go through `rep`; reserved
/// outputs are left alone. If `fst` reads `<unk>`, symbols that would
/// disappear from its alphabet are kept as declared output symbols so the
/// set of tokens it treats as unknown does not change.
pub fn relabel_output_side(fst: &Fst, rep: &Relabeling) -> Fst {
    let arcs: Vec<Arc> = fst
        .arcs()
        .iter()
        .map(|a| Arc {
            output: if a.output.is_reserved() {
                a.output.clone()
            } else {
                rep.apply(&a.output).clone()
            },
            ..a.clone()
        })
        .collect();
    let declared_in: Vec<Symbol> = fst.declared_in().iter().cloned().collect();
    let mut declared_out: Vec<Symbol> = fst
        .declared_out()
        .iter()
        .map(|s| rep.apply(s).clone())
        .collect();

    let relabeled = rebuild(fst, arcs.clone(), declared_in.clone(), declared_out.clone());
    if !fst.has_unknown_input() {
        return relabeled;
    }
    let lost: Vec<Symbol> = fst.sigma().difference(relabeled.sigma()).cloned().collect();
    if lost.is_empty() {
        return relabeled;
    }
    declared_out.extend(lost);
    rebuild(fst, arcs, declared_in, declared_out)
}

/// Rewrites the input tape of the downstream transducer of a pair.
///
/// Merged-away symbols leave the declared input alphabet.
pub fn relabel_input_side(fst: &Fst, rep: &Relabeling) -> Fst {
    let arcs = fst
        .arcs()
        .iter()
        .map(|a| Arc {
            input: if a.input.is_reserved() {
                a.input.clone()
            } else {
                rep.apply(&a.input).clone()
            },
            ..a.clone()
        })
        .collect();
    let declared_in = fst
        .declared_in()
        .iter()
        .map(|s| rep.apply(s).clone())
        .collect();
    let declared_out = fst.declared_out().iter().cloned().collect();
    rebuild(fst, arcs, declared_in, declared_out)
}
