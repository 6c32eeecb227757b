//! Transducer data model.
//!
//! An [`Fst`] is an unweighted, possibly nondeterministic and ambiguous
//! transducer. State 0 is always the initial state. Arc labels are
//! `input:output` symbol pairs; the reserved symbol `<eps>` stands for the
//! empty string and `<unk>` for any symbol outside the transducer's
//! alphabet. An arc `<unk>:<unk>` copies the unknown token to the output.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::symbol::Symbol;

pub type StateId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FstError {
    #[error("invalid symbol {0:?}")]
    InvalidSymbol(String),
    #[error("state {state} out of range (state count {state_count})")]
    InvalidStateIndex { state: StateId, state_count: usize },
    #[error("arc {src} -> {dst} has output <unk> on a non-identity arc (input {input})")]
    IllegalUnknownOutput {
        src: StateId,
        dst: StateId,
        input: Symbol,
    },
    #[error("reserved symbol {0} in a declared alphabet")]
    ReservedSymbolInAlphabet(Symbol),
    #[error("a transducer needs at least one state")]
    EmptyFst,
    #[error("a cascade needs at least one stage")]
    EmptyCascade,
}

/// A labeled transition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arc {
    pub src: StateId,
    pub dst: StateId,
    pub input: Symbol,
    pub output: Symbol,
}

impl Arc {
    pub fn new(src: StateId, input: Symbol, output: Symbol, dst: StateId) -> Self {
        Arc {
            src,
            dst,
            input,
            output,
        }
    }

    /// `<unk>:<unk>`: the matched token passes through unchanged.
    pub fn is_identity_unknown(&self) -> bool {
        self.input.is_unknown() && self.output.is_unknown()
    }

    fn canonical_key(&self) -> (StateId, &str, &str, StateId) {
        (
            self.src,
            self.input.as_str(),
            self.output.as_str(),
            self.dst,
        )
    }
}

/// Canonical arc order: source, input text, output text, destination.
impl Ord for Arc {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical_key().cmp(&other.canonical_key())
    }
}

impl PartialOrd for Arc {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {}",
            self.src, self.dst, self.input, self.output
        )
    }
}

/// Size counts in the layout of a transducer size table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FstStats {
    pub states: usize,
    pub arcs: usize,
    pub input_symbols: usize,
    pub output_symbols: usize,
}

/// A validated transducer. Immutable once built; see [`Fst::new`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fst {
    state_count: usize,
    finals: BTreeSet<StateId>,
    arcs: Vec<Arc>,
    // arcs leaving state q are arcs[offsets[q]..offsets[q + 1]]
    offsets: Vec<usize>,
    // declared symbols that do not already occur on arcs of that side
    declared_in: BTreeSet<Symbol>,
    declared_out: BTreeSet<Symbol>,
    sigma: BTreeSet<Symbol>,
}

impl Fst {
    /// Validates and normalizes a transducer.
    ///
    /// Arcs are sorted into canonical order and deduplicated. Declared
    /// alphabet entries that already occur on arcs of the same side are
    /// dropped, so two transducers with the same effective alphabets compare
    /// equal.
    pub fn new(
        state_count: usize,
        finals: impl IntoIterator<Item = StateId>,
        arcs: impl IntoIterator<Item = Arc>,
        declared_in: impl IntoIterator<Item = Symbol>,
        declared_out: impl IntoIterator<Item = Symbol>,
    ) -> Result<Self, FstError> {
        if state_count == 0 {
            return Err(FstError::EmptyFst);
        }
        let check = |state: StateId| {
            if state < state_count {
                Ok(())
            } else {
                Err(FstError::InvalidStateIndex { state, state_count })
            }
        };

        let finals: BTreeSet<StateId> = finals.into_iter().collect();
        for &q in &finals {
            check(q)?;
        }

        let mut arcs: Vec<Arc> = arcs.into_iter().collect();
        for arc in &arcs {
            check(arc.src)?;
            check(arc.dst)?;
            if arc.output.is_unknown() && !arc.input.is_unknown() {
                return Err(FstError::IllegalUnknownOutput {
                    src: arc.src,
                    dst: arc.dst,
                    input: arc.input.clone(),
                });
            }
        }
        arcs.sort();
        arcs.dedup();

        let mut offsets = vec![0; state_count + 1];
        for arc in &arcs {
            offsets[arc.src + 1] += 1;
        }
        for q in 0..state_count {
            offsets[q + 1] += offsets[q];
        }

        let arc_in: BTreeSet<&Symbol> = arcs
            .iter()
            .map(|a| &a.input)
            .filter(|s| !s.is_reserved())
            .collect();
        let arc_out: BTreeSet<&Symbol> = arcs
            .iter()
            .map(|a| &a.output)
            .filter(|s| !s.is_reserved())
            .collect();

        let normalize = |declared: BTreeSet<Symbol>, on_arcs: &BTreeSet<&Symbol>| {
            if let Some(bad) = declared.iter().find(|s| s.is_reserved()) {
                return Err(FstError::ReservedSymbolInAlphabet(bad.clone()));
            }
            Ok(declared
                .into_iter()
                .filter(|s| !on_arcs.contains(s))
                .collect::<BTreeSet<_>>())
        };
        let declared_in = normalize(declared_in.into_iter().collect(), &arc_in)?;
        let declared_out = normalize(declared_out.into_iter().collect(), &arc_out)?;

        let sigma = arc_in
            .iter()
            .chain(arc_out.iter())
            .map(|s| (*s).clone())
            .chain(declared_in.iter().cloned())
            .chain(declared_out.iter().cloned())
            .collect();

        Ok(Fst {
            state_count,
            finals,
            arcs,
            offsets,
            declared_in,
            declared_out,
            sigma,
        })
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn finals(&self) -> &BTreeSet<StateId> {
        &self.finals
    }

    pub fn is_final(&self, state: StateId) -> bool {
        self.finals.contains(&state)
    }

    /// All arcs in canonical order.
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Arcs leaving `state`, in canonical order (grouped by input symbol).
    pub fn arcs_from(&self, state: StateId) -> &[Arc] {
        &self.arcs[self.offsets[state]..self.offsets[state + 1]]
    }

    /// Declared input symbols that do not occur as arc inputs.
    pub fn declared_in(&self) -> &BTreeSet<Symbol> {
        &self.declared_in
    }

    /// Declared output symbols that do not occur as arc outputs.
    pub fn declared_out(&self) -> &BTreeSet<Symbol> {
        &self.declared_out
    }

    /// Effective input alphabet: declared plus on-arc, reserved symbols excluded.
    pub fn input_alphabet(&self) -> BTreeSet<Symbol> {
        self.arcs
            .iter()
            .map(|a| &a.input)
            .filter(|s| !s.is_reserved())
            .chain(self.declared_in.iter())
            .cloned()
            .collect()
    }

    pub fn output_alphabet(&self) -> BTreeSet<Symbol> {
        self.arcs
            .iter()
            .map(|a| &a.output)
            .filter(|s| !s.is_reserved())
            .chain(self.declared_out.iter())
            .cloned()
            .collect()
    }

    /// The union of both effective alphabets. `<unk>` matches exactly the
    /// tokens outside this set.
    pub fn sigma(&self) -> &BTreeSet<Symbol> {
        &self.sigma
    }

    /// Returns `(Σin, Σout, Σ)`.
    pub fn effective_alphabets(&self) -> (BTreeSet<Symbol>, BTreeSet<Symbol>, BTreeSet<Symbol>) {
        (
            self.input_alphabet(),
            self.output_alphabet(),
            self.sigma.clone(),
        )
    }

    pub fn has_unknown_input(&self) -> bool {
        self.arcs.iter().any(|a| a.input.is_unknown())
    }

    pub fn stats(&self) -> FstStats {
        FstStats {
            states: self.state_count,
            arcs: self.arcs.len(),
            input_symbols: self.input_alphabet().len(),
            output_symbols: self.output_alphabet().len(),
        }
    }
}

/// Does `token` take an arc whose input label is `arc_input`?
///
/// `token` must be an ordinary symbol. `<unk>` matches exactly the tokens
/// outside `sigma`.
pub fn matches(token: &Symbol, arc_input: &Symbol, sigma: &BTreeSet<Symbol>) -> bool {
    debug_assert!(!token.is_reserved());
    arc_input == token || (arc_input.is_unknown() && !sigma.contains(token))
}

/// Transducers applied first to last; each stage reads the previous stage's
/// output tape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cascade {
    stages: Vec<Fst>,
}

impl Cascade {
    pub fn new(stages: Vec<Fst>) -> Result<Self, FstError> {
        if stages.is_empty() {
            return Err(FstError::EmptyCascade);
        }
        Ok(Cascade { stages })
    }

    pub fn stages(&self) -> &[Fst] {
        &self.stages
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn into_stages(self) -> Vec<Fst> {
        self.stages
    }
}
