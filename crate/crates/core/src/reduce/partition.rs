//! Equivalence classes of intermediate symbols.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::fst::{Fst, StateId};
use crate::symbol::Symbol;

use super::{ReduceError, Relabeling};

/// Equivalence classes over a candidate symbol set.
///
/// Every class is sorted by symbol text and its first member is the
/// representative. Classes are ordered by representative.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Partition {
    classes: Vec<Vec<Symbol>>,
}

impl Partition {
    /// Builds a partition from arbitrary disjoint groups, normalizing order.
    pub fn from_classes(classes: impl IntoIterator<Item = Vec<Symbol>>) -> Self {
        let mut classes: Vec<Vec<Symbol>> = classes
            .into_iter()
            .filter(|c| !c.is_empty())
            .map(|mut c| {
                c.sort();
                c.dedup();
                c
            })
            .collect();
        classes.sort();
        Partition { classes }
    }

    pub fn classes(&self) -> &[Vec<Symbol>] {
        &self.classes
    }

    pub fn representatives(&self) -> impl Iterator<Item = &Symbol> {
        self.classes.iter().map(|c| &c[0])
    }

    /// The class containing `symbol`, if it is a candidate.
    pub fn class_of(&self, symbol: &Symbol) -> Option<&[Symbol]> {
        self.classes
            .iter()
            .find(|c| c.binary_search(symbol).is_ok())
            .map(Vec::as_slice)
    }

    /// Number of classes with more than one member.
    pub fn merged_classes(&self) -> usize {
        self.classes.iter().filter(|c| c.len() > 1).count()
    }

    /// Number of symbols replaced by a representative.
    pub fn eliminated_symbols(&self) -> usize {
        self.classes.iter().map(|c| c.len() - 1).sum()
    }

    /// True when every class is a singleton.
    pub fn is_discrete(&self) -> bool {
        self.classes.iter().all(|c| c.len() == 1)
    }

    /// Maps every non-representative member to its representative.
    pub fn relabeling(&self) -> Relabeling {
        Relabeling::from_classes(&self.classes)
    }
}

/// `{ (output, destination) }` over the arcs leaving `state` with input `symbol`.
pub fn signature(fst: &Fst, state: StateId, symbol: &Symbol) -> BTreeSet<(Symbol, StateId)> {
    fst.arcs_from(state)
        .iter()
        .filter(|a| &a.input == symbol)
        .map(|a| (a.output.clone(), a.dst))
        .collect()
}

/// Symbols of the intermediate alphabet between `t1` and `t2` that may be
/// merged.
///
/// These are `t2`'s input symbols. When `t1` has arcs reading `<unk>`, the
/// set is narrowed to symbols `t1` can emit on its own arcs: everything
/// else either reaches `t2` untouched through `t1`'s unknown arcs or would
/// change which tokens `t1` treats as unknown once it starts emitting it.
pub fn eligible_candidates(t1: &Fst, t2: &Fst) -> BTreeSet<Symbol> {
    let candidates = t2.input_alphabet();
    if t1.has_unknown_input() {
        let emitted = t1.output_alphabet();
        candidates.intersection(&emitted).cloned().collect()
    } else {
        candidates
    }
}

/// The coarsest partition of `candidates` whose members have equal
/// [`signature`]s at every state of `t2`.
///
/// Starts from a single class and splits classes state by state, stopping
/// early once all classes are singletons.
pub fn compute_partition(
    t2: &Fst,
    candidates: &BTreeSet<Symbol>,
) -> Result<Partition, ReduceError> {
    let order: Vec<StateId> = (0..t2.state_count()).collect();
    partition_in_state_order(t2, candidates, &order)
}

/// class -> signature at one state -> members carrying it
type Splits<'a> = HashMap<usize, HashMap<Vec<(&'a Symbol, StateId)>, Vec<usize>>>;

pub(crate) fn partition_in_state_order(
    t2: &Fst,
    candidates: &BTreeSet<Symbol>,
    order: &[StateId],
) -> Result<Partition, ReduceError> {
    if let Some(bad) = candidates.iter().find(|s| s.is_reserved()) {
        return Err(ReduceError::ReservedCandidate(bad.clone()));
    }
    let symbols: Vec<&Symbol> = candidates.iter().collect();
    let index: HashMap<&Symbol, usize> = symbols.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let n = symbols.len();

    let mut class_of = vec![0usize; n];
    let mut class_size = vec![n];
    let mut live_classes = usize::from(n > 0);

    for &q in order {
        if live_classes == n {
            break;
        }
        let mut splits: Splits = HashMap::new();
        for run in t2.arcs_from(q).chunk_by(|a, b| a.input == b.input) {
            let Some(&sym) = index.get(&run[0].input) else {
                continue;
            };
            // arcs are sorted by (output, dst) within an input run
            let sig = run.iter().map(|a| (&a.output, a.dst)).collect();
            splits
                .entry(class_of[sym])
                .or_default()
                .entry(sig)
                .or_default()
                .push(sym);
        }
        for (class, by_sig) in splits {
            let touched: usize = by_sig.values().map(Vec::len).sum();
            if by_sig.len() == 1 && touched == class_size[class] {
                continue;
            }
            for members in by_sig.into_values() {
                let fresh = class_size.len();
                class_size.push(members.len());
                class_size[class] -= members.len();
                for m in members {
                    class_of[m] = fresh;
                }
                live_classes += 1;
            }
            if class_size[class] == 0 {
                live_classes -= 1;
            }
        }
    }

    let mut groups: BTreeMap<usize, Vec<Symbol>> = BTreeMap::new();
    for (i, sym) in symbols.into_iter().enumerate() {
        groups.entry(class_of[i]).or_default().push(sym.clone());
    }
    Ok(Partition::from_classes(groups.into_values()))
}
