//! Seeded random cascades with planted symbol equivalences.
//!
//! The generator draws from xoshiro256++ seeded through SplitMix64
//! (`Xoshiro256PlusPlus::seed_from_u64`). Integers in `[0, n)` are
//! `next_u64() % n` and probabilities compare `next_u64() >> 11` scaled by
//! 2^-53 against the threshold, so a seed yields the same cascade on every
//! platform.
//!
//! Tape `k` of a cascade with `n` stages uses symbols named after the tape
//! (`a0 a1 ...` for the input tape, `b0 b1 ...` for the next one, and so on);
//! stage `i` reads tape `i` and writes tape `i + 1`. Every stage declares
//! both of its tape alphabets, so a symbol of another tape is unknown to it.
//!
//! The ordinary arcs drawn for a state read distinct symbols; ambiguity comes
//! from the arcs that make every state reachable and from epsilon and
//! unknown arcs. Input-epsilon arcs either loop on their source state with
//! empty output or move to a higher-numbered state, so no epsilon cycle ever
//! emits output.

use std::ops::RangeInclusive;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use thiserror::Error;

use crate::fst::{Arc, Cascade, Fst, StateId};
use crate::symbol::Symbol;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub seed: u64,
    pub stages: usize,
    pub states_per_stage: RangeInclusive<usize>,
    pub alphabet_size: RangeInclusive<usize>,
    pub arcs_per_state: RangeInclusive<usize>,
    /// Chance that a tape symbol copies the arcs of an earlier symbol.
    pub redundancy: f64,
    pub final_prob: f64,
    pub epsilon_prob: f64,
    pub unknown_prob: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            seed: 0,
            stages: 3,
            states_per_stage: 2..=6,
            alphabet_size: 2..=5,
            arcs_per_state: 1..=3,
            redundancy: 0.3,
            final_prob: 0.3,
            epsilon_prob: 0.05,
            unknown_prob: 0.05,
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |msg: &str| Err(GenError::InvalidParams(msg.to_string()));
        if self.stages < 2 {
            return bad("a cascade needs at least 2 stages");
        }
        for (name, r) in [
            ("states per stage", &self.states_per_stage),
            ("alphabet size", &self.alphabet_size),
            ("arcs per state", &self.arcs_per_state),
        ] {
            if r.is_empty() {
                return Err(GenError::InvalidParams(format!("empty {name} range")));
            }
        }
        if *self.states_per_stage.start() == 0 {
            return bad("states per stage must be at least 1");
        }
        if *self.alphabet_size.start() == 0 {
            return bad("alphabet size must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.redundancy) {
            return bad("redundancy must lie in [0, 1]");
        }
        if !(self.final_prob > 0.0 && self.final_prob <= 1.0) {
            return bad("final probability must lie in (0, 1]");
        }
        if !(0.0..1.0).contains(&self.epsilon_prob) || !(0.0..1.0).contains(&self.unknown_prob) {
            return bad("epsilon and unknown probabilities must lie in [0, 1)");
        }
        Ok(())
    }
}

struct Draw(Xoshiro256PlusPlus);

impl Draw {
    fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    fn in_range(&mut self, r: &RangeInclusive<usize>) -> usize {
        r.start() + self.below(r.end() - r.start() + 1)
    }

    fn chance(&mut self, p: f64) -> bool {
        let unit = (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        unit < p
    }

    fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len())]
    }
}

fn tape_name(tape: usize) -> String {
    if tape < 26 {
        char::from(b'a' + tape as u8).to_string()
    } else {
        format!("t{tape}_")
    }
}

/// Symbols of tape `tape`.
pub fn tape_alphabet(tape: usize, size: usize) -> Vec<Symbol> {
    let prefix = tape_name(tape);
    (0..size)
        .map(|j| Symbol::new(&format!("{prefix}{j}")).expect("generated names are valid"))
        .collect()
}

/// A connectable cascade drawn deterministically from `params.seed`.
pub fn random_cascade(params: &GenParams) -> Result<Cascade, GenError> {
    params.validate()?;
    let mut rng = Draw(Xoshiro256PlusPlus::seed_from_u64(params.seed));
    let tapes: Vec<Vec<Symbol>> = (0..=params.stages)
        .map(|t| {
            let size = rng.in_range(&params.alphabet_size);
            tape_alphabet(t, size)
        })
        .collect();
    let stages = (0..params.stages)
        .map(|i| random_stage(&mut rng, params, &tapes[i], &tapes[i + 1]))
        .collect();
    Ok(Cascade::new(stages).expect("at least two stages"))
}

fn random_stage(rng: &mut Draw, params: &GenParams, inputs: &[Symbol], outputs: &[Symbol]) -> Fst {
    let n = rng.in_range(&params.states_per_stage);

    // clone_of[j] = Some(d): symbol j copies every arc of base symbol d
    let mut base: Vec<usize> = Vec::new();
    let mut clone_of: Vec<Option<usize>> = Vec::with_capacity(inputs.len());
    for j in 0..inputs.len() {
        if !base.is_empty() && rng.chance(params.redundancy) {
            clone_of.push(Some(*rng.pick(&base)));
        } else {
            base.push(j);
            clone_of.push(None);
        }
    }

    let output = |rng: &mut Draw| -> Symbol {
        if rng.chance(params.epsilon_prob) {
            Symbol::epsilon()
        } else {
            rng.pick(outputs).clone()
        }
    };

    let mut arcs: Vec<Arc> = Vec::new();
    // every state is reachable, and mentioned in the text format
    for q in 1..n {
        let src = rng.below(q);
        let input = inputs[*rng.pick(&base)].clone();
        let out = output(rng);
        arcs.push(Arc::new(src, input, out, q));
    }
    for q in 0..n {
        let mut unused = base.clone();
        for _ in 0..rng.in_range(&params.arcs_per_state) {
            let arc = if rng.chance(params.epsilon_prob) {
                let dst: StateId = q + rng.below(n - q);
                let out = if dst == q || rng.chance(0.5) {
                    Symbol::epsilon()
                } else {
                    rng.pick(outputs).clone()
                };
                Arc::new(q, Symbol::epsilon(), out, dst)
            } else if rng.chance(params.unknown_prob) {
                let out = if rng.chance(0.5) {
                    Symbol::unknown()
                } else {
                    output(rng)
                };
                Arc::new(q, Symbol::unknown(), out, rng.below(n))
            } else if unused.is_empty() {
                continue;
            } else {
                let j = unused.swap_remove(rng.below(unused.len()));
                let out = output(rng);
                Arc::new(q, inputs[j].clone(), out, rng.below(n))
            };
            arcs.push(arc);
        }
    }

    let planted: Vec<Arc> = clone_of
        .iter()
        .enumerate()
        .filter_map(|(j, d)| d.map(|d| (j, d)))
        .flat_map(|(j, d)| {
            arcs.iter()
                .filter(move |a| a.input == inputs[d])
                .map(move |a| Arc::new(a.src, inputs[j].clone(), a.output.clone(), a.dst))
        })
        .collect();
    arcs.extend(planted);

    let mut finals: Vec<StateId> = (0..n).filter(|_| rng.chance(params.final_prob)).collect();
    if finals.is_empty() {
        finals.push(rng.below(n));
    }

    Fst::new(
        n,
        finals,
        arcs,
        inputs.iter().cloned(),
        outputs.iter().cloned(),
    )
    .expect("generated transducers are valid")
}
