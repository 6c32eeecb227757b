//! Applying transducers and cascades to token sequences.
//!
//! Application is a bounded search over configurations `(state, input
//! position, output so far)`. Three limits keep it finite in the presence of
//! ambiguity and epsilon loops; whenever one of them cuts the search the
//! result is flagged `truncated`, and a truncated result must not be used
//! as evidence of relation equality.

use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;

use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::fst::{matches, Arc, Cascade, Fst, StateId};
use crate::symbol::Symbol;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("input token {0} is reserved")]
    ReservedInputToken(Symbol),
    #[error("relation was truncated by the search limits; raise them to decide equality")]
    TruncatedRelation,
    #[error("search limits must all be at least 1")]
    InvalidLimits,
}

/// Search bounds for one transducer application.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Output strings kept per application (the smallest ones are kept).
    pub max_outputs: usize,
    /// Consecutive input-epsilon moves allowed on one path.
    pub max_epsilon_moves: usize,
    /// Longest output string explored.
    pub max_output_len: usize,
}

impl Limits {
    pub fn new(
        max_outputs: usize,
        max_epsilon_moves: usize,
        max_output_len: usize,
    ) -> Result<Self, EngineError> {
        if max_outputs == 0 || max_epsilon_moves == 0 || max_output_len == 0 {
            return Err(EngineError::InvalidLimits);
        }
        Ok(Limits {
            max_outputs,
            max_epsilon_moves,
            max_output_len,
        })
    }
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_outputs: 10_000,
            max_epsilon_moves: 64,
            max_output_len: 64,
        }
    }
}

/// Output strings of one application.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outputs {
    pub strings: BTreeSet<Vec<Symbol>>,
    pub truncated: bool,
}

/// A bounded sample of a cascade's input/output relation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Relation {
    pub pairs: BTreeSet<(Vec<Symbol>, Vec<Symbol>)>,
    pub truncated: bool,
}

fn check_tokens(input: &[Symbol]) -> Result<(), EngineError> {
    match input.iter().find(|t| t.is_reserved()) {
        Some(t) => Err(EngineError::ReservedInputToken(t.clone())),
        None => Ok(()),
    }
}

struct Node<'a> {
    parent: Option<usize>,
    via: Option<&'a Arc>,
    state: StateId,
    pos: usize,
    eps_run: usize,
    output: Vec<Symbol>,
}

/// Result of the configuration search: accepted outputs, each with the
/// arena index of the node that accepted it.
struct Search<'a> {
    nodes: Vec<Node<'a>>,
    accepted: BTreeMap<Vec<Symbol>, usize>,
    truncated: bool,
}

impl Search<'_> {
    fn path_to(&self, end: usize) -> Vec<Arc> {
        let mut arcs = Vec::new();
        let mut cur = Some(end);
        while let Some(id) = cur {
            arcs.extend(self.nodes[id].via.cloned());
            cur = self.nodes[id].parent;
        }
        arcs.reverse();
        arcs
    }
}

fn search<'a>(fst: &'a Fst, input: &[Symbol], limits: &Limits) -> Search<'a> {
    let sigma = fst.sigma();
    let mut nodes = vec![Node {
        parent: None,
        via: None,
        state: 0,
        pos: 0,
        eps_run: 0,
        output: Vec::new(),
    }];
    // smallest epsilon run with which each configuration was reached
    let mut seen: FxHashMap<(StateId, usize, Vec<Symbol>), usize> = FxHashMap::default();
    seen.insert((0, 0, Vec::new()), 0);
    let mut stack = vec![0];
    let mut accepted: BTreeMap<Vec<Symbol>, usize> = BTreeMap::new();
    let mut truncated = false;

    while let Some(id) = stack.pop() {
        let (state, pos, eps_run) = (nodes[id].state, nodes[id].pos, nodes[id].eps_run);
        if pos == input.len() && fst.is_final(state) && !accepted.contains_key(&nodes[id].output) {
            accepted.insert(nodes[id].output.clone(), id);
            if accepted.len() > limits.max_outputs {
                accepted.pop_last();
                truncated = true;
            }
        }

        for arc in fst.arcs_from(state) {
            let (next_pos, next_eps, consumed) = if arc.input.is_epsilon() {
                (pos, eps_run + 1, None)
            } else if pos < input.len() && matches(&input[pos], &arc.input, sigma) {
                (pos + 1, 0, Some(&input[pos]))
            } else {
                continue;
            };

            let emitted = if arc.output.is_epsilon() {
                None
            } else if arc.output.is_unknown() {
                consumed
            } else {
                Some(&arc.output)
            };
            let mut output = nodes[id].output.clone();
            if let Some(sym) = emitted {
                if output.len() >= limits.max_output_len {
                    truncated = true;
                    continue;
                }
                output.push(sym.clone());
            }

            let key = (arc.dst, next_pos, output);
            if next_eps > limits.max_epsilon_moves {
                if !seen.contains_key(&key) {
                    truncated = true;
                }
                continue;
            }
            if seen.get(&key).is_some_and(|&best| best <= next_eps) {
                continue;
            }
            let output = key.2.clone();
            seen.insert(key, next_eps);
            nodes.push(Node {
                parent: Some(id),
                via: Some(arc),
                state: arc.dst,
                pos: next_pos,
                eps_run: next_eps,
                output,
            });
            stack.push(nodes.len() - 1);
        }
    }

    Search {
        nodes,
        accepted,
        truncated,
    }
}

/// Transduces `input` with one transducer.
///
/// An arc consumes a token when [`matches`] holds; input-epsilon arcs consume
/// nothing. Output `<eps>` emits nothing, `<unk>` (on `<unk>:<unk>` arcs)
/// emits the consumed token. A path accepts when it ends in a final state
/// with the whole input consumed.
pub fn apply_fst(fst: &Fst, input: &[Symbol], limits: &Limits) -> Result<Outputs, EngineError> {
    check_tokens(input)?;
    let s = search(fst, input, limits);
    Ok(Outputs {
        strings: s.accepted.into_keys().collect(),
        truncated: s.truncated,
    })
}

/// One accepting arc path per output string.
pub type Paths = BTreeMap<Vec<Symbol>, Vec<Arc>>;

/// Like [`apply_fst`], but returns one accepting arc path per output string
/// and the truncation flag.
pub fn accepting_paths(
    fst: &Fst,
    input: &[Symbol],
    limits: &Limits,
) -> Result<(Paths, bool), EngineError> {
    check_tokens(input)?;
    let s = search(fst, input, limits);
    let paths = s
        .accepted
        .iter()
        .map(|(out, &end)| (out.clone(), s.path_to(end)))
        .collect();
    Ok((paths, s.truncated))
}

type Memo = FxHashMap<Vec<Symbol>, Rc<Outputs>>;

fn apply_memo(fst: &Fst, input: &[Symbol], limits: &Limits, memo: &mut Memo) -> Rc<Outputs> {
    if let Some(hit) = memo.get(input) {
        return Rc::clone(hit);
    }
    let s = search(fst, input, limits);
    let out = Rc::new(Outputs {
        strings: s.accepted.into_keys().collect(),
        truncated: s.truncated,
    });
    memo.insert(input.to_vec(), Rc::clone(&out));
    out
}

fn cascade_with_memo(
    stages: &[Fst],
    input: &[Symbol],
    limits: &Limits,
    memos: &mut [Memo],
) -> Outputs {
    let mut current: Vec<Vec<Symbol>> = vec![input.to_vec()];
    let mut truncated = false;
    for (fst, memo) in stages.iter().zip(memos.iter_mut()) {
        let results: Vec<Rc<Outputs>> = current
            .iter()
            .map(|tape| apply_memo(fst, tape, limits, memo))
            .collect();
        truncated |= results.iter().any(|r| r.truncated);
        let distinct: FxHashSet<&Vec<Symbol>> = results.iter().flat_map(|r| &r.strings).collect();
        current = distinct.into_iter().cloned().collect();
        if current.is_empty() {
            break;
        }
    }
    Outputs {
        strings: current.into_iter().collect(),
        truncated,
    }
}

/// Feeds every output of stage `i` into stage `i + 1` and returns the union
/// of the last stage's outputs.
pub fn apply_cascade(
    cascade: &Cascade,
    input: &[Symbol],
    limits: &Limits,
) -> Result<Outputs, EngineError> {
    check_tokens(input)?;
    let mut memos = vec![Memo::default(); cascade.len()];
    Ok(cascade_with_memo(
        cascade.stages(),
        input,
        limits,
        &mut memos,
    ))
}

/// All sequences over `vocab` of length `0..=max_len`, shortest first, each
/// length in lexicographic order.
pub fn input_sequences(vocab: &BTreeSet<Symbol>, max_len: usize) -> Vec<Vec<Symbol>> {
    let vocab: Vec<&Symbol> = vocab.iter().collect();
    let mut all = vec![Vec::new()];
    let mut layer: Vec<Vec<Symbol>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * vocab.len());
        for prefix in &layer {
            for &sym in &vocab {
                let mut seq = prefix.clone();
                seq.push(sym.clone());
                next.push(seq);
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

/// The cascade's relation restricted to inputs over `vocab` of length at
/// most `max_input_len`.
///
/// Include a token outside every stage's alphabet (e.g.
/// [`crate::PROBE_TOKEN`]) in `vocab` to exercise `<unk>` arcs.
pub fn enumerate_relation(
    cascade: &Cascade,
    max_input_len: usize,
    vocab: &BTreeSet<Symbol>,
    limits: &Limits,
) -> Result<Relation, EngineError> {
    check_tokens(&vocab.iter().cloned().collect::<Vec<_>>())?;
    let mut memos = vec![Memo::default(); cascade.len()];
    let mut relation = Relation::default();
    for input in input_sequences(vocab, max_input_len) {
        let out = cascade_with_memo(cascade.stages(), &input, limits, &mut memos);
        relation.truncated |= out.truncated;
        for o in out.strings {
            relation.pairs.insert((input.clone(), o));
        }
    }
    Ok(relation)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A pair found in exactly one of two relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub input: Vec<Symbol>,
    pub output: Vec<Symbol>,
    /// The relation that contains the pair.
    pub side: Side,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Comparison {
    Equal,
    Different(Witness),
}

impl Comparison {
    pub fn is_equal(&self) -> bool {
        matches!(self, Comparison::Equal)
    }
}

/// Set equality of two untruncated relations. The witness is the smallest
/// pair of the symmetric difference.
pub fn relations_equal(left: &Relation, right: &Relation) -> Result<Comparison, EngineError> {
    if left.truncated || right.truncated {
        return Err(EngineError::TruncatedRelation);
    }
    let only_left = left.pairs.difference(&right.pairs).next();
    let only_right = right.pairs.difference(&left.pairs).next();
    let pick = match (only_left, only_right) {
        (None, None) => return Ok(Comparison::Equal),
        (Some(l), None) => (l, Side::Left),
        (None, Some(r)) => (r, Side::Right),
        (Some(l), Some(r)) if l <= r => (l, Side::Left),
        (_, Some(r)) => (r, Side::Right),
    };
    let ((input, output), side) = pick;
    Ok(Comparison::Different(Witness {
        input: input.clone(),
        output: output.clone(),
        side,
    }))
}

/// Outcome of [`compare_cascades`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Both relations agree; `pairs` is the size of each.
    Equal {
        pairs: usize,
    },
    Different(Witness),
    /// No difference was found, but some inputs hit the search limits on
    /// either side and could not be compared.
    Inconclusive {
        truncated_inputs: usize,
    },
}

/// Compares two cascades on every input over `vocab` of length at most
/// `max_input_len`, one input at a time, shortest inputs first.
///
/// Equivalent to enumerating both relations and calling [`relations_equal`],
/// except that memory stays proportional to one input's outputs and the
/// witness is the first differing input in enumeration order (with its
/// smallest differing output). An input truncated on either side is skipped;
/// a difference on a fully explored input is reported even if other inputs
/// were truncated.
pub fn compare_cascades(
    left: &Cascade,
    right: &Cascade,
    max_input_len: usize,
    vocab: &BTreeSet<Symbol>,
    limits: &Limits,
) -> Result<Verdict, EngineError> {
    check_tokens(&vocab.iter().cloned().collect::<Vec<_>>())?;
    let mut left_memos = vec![Memo::default(); left.len()];
    let mut right_memos = vec![Memo::default(); right.len()];
    let mut pairs = 0;
    let mut truncated_inputs = 0;
    for input in input_sequences(vocab, max_input_len) {
        let l = cascade_with_memo(left.stages(), &input, limits, &mut left_memos);
        let r = cascade_with_memo(right.stages(), &input, limits, &mut right_memos);
        if l.truncated || r.truncated {
            truncated_inputs += 1;
            continue;
        }
        let only_left = l.strings.difference(&r.strings).next();
        let only_right = r.strings.difference(&l.strings).next();
        let (output, side) = match (only_left, only_right) {
            (None, None) => {
                pairs += l.strings.len();
                continue;
            }
            (Some(o), None) => (o, Side::Left),
            (None, Some(o)) => (o, Side::Right),
            (Some(a), Some(b)) if a <= b => (a, Side::Left),
            (_, Some(b)) => (b, Side::Right),
        };
        return Ok(Verdict::Different(Witness {
            input,
            output: output.clone(),
            side,
        }));
    }
    Ok(if truncated_inputs > 0 {
        Verdict::Inconclusive { truncated_inputs }
    } else {
        Verdict::Equal { pairs }
    })
}

/// One stage of an accepting cascade run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageTrace {
    pub input: Vec<Symbol>,
    pub output: Vec<Symbol>,
    pub arcs: Vec<Arc>,
}

/// Finds a run of the cascade that maps `input` to `output`, stage by
/// stage, or `None` if there is none within `limits`.
pub fn explain(
    cascade: &Cascade,
    input: &[Symbol],
    output: &[Symbol],
    limits: &Limits,
) -> Result<Option<Vec<StageTrace>>, EngineError> {
    check_tokens(input)?;
    Ok(explain_from(cascade.stages(), input, output, limits))
}

fn explain_from(
    stages: &[Fst],
    input: &[Symbol],
    output: &[Symbol],
    limits: &Limits,
) -> Option<Vec<StageTrace>> {
    let (first, rest) = stages.split_first()?;
    let s = search(first, input, limits);
    for (tape, &end) in &s.accepted {
        let tail = if rest.is_empty() {
            if tape.as_slice() != output {
                continue;
            }
            Vec::new()
        } else {
            match explain_from(rest, tape, output, limits) {
                Some(t) => t,
                None => continue,
            }
        };
        let mut trace = vec![StageTrace {
            input: input.to_vec(),
            output: tape.clone(),
            arcs: s.path_to(end),
        }];
        trace.extend(tail);
        return Some(trace);
    }
    None
}
