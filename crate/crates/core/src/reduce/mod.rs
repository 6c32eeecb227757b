//! Intermediate alphabet reduction.
//!
//! For two transducers `t1`, `t2` applied in sequence, symbols on the tape
//! between them are merged when `t2` cannot tell them apart: at every state
//! they label arcs with the same outputs and destinations. Each class is then
//! replaced by one representative on the output side of `t1` and on the
//! input side of `t2`. The relation of `t1` followed by `t2` is unchanged,
//! while both transducers may lose arcs and symbols. Nothing is needed at
//! application time.
//!
//! In a longer cascade the boundaries are reduced from the last one to the
//! first: merging symbols on a later tape can make earlier symbols
//! indistinguishable, never the reverse.

mod partition;
mod relabel;

pub use partition::{compute_partition, eligible_candidates, signature, Partition};
pub use relabel::{relabel_input_side, relabel_output_side, Relabeling};

use thiserror::Error;

use crate::fst::{Cascade, Fst, FstStats};
use crate::symbol::Symbol;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("reserved symbol {0} cannot be merged")]
    ReservedCandidate(Symbol),
}

/// Size of one transducer before and after a reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionReport {
    /// Position of the transducer in its cascade, from 0.
    pub stage_index: usize,
    pub before: FstStats,
    pub after: FstStats,
    /// Non-singleton classes on the transducer's input tape.
    pub classes_merged: usize,
    /// Input symbols replaced by a representative.
    pub symbols_eliminated: usize,
}

impl ReductionReport {
    fn new(stage_index: usize, before: &Fst, after: &Fst, partition: Option<&Partition>) -> Self {
        ReductionReport {
            stage_index,
            before: before.stats(),
            after: after.stats(),
            classes_merged: partition.map_or(0, Partition::merged_classes),
            symbols_eliminated: partition.map_or(0, Partition::eliminated_symbols),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedPair {
    pub upstream: Fst,
    pub downstream: Fst,
    pub partition: Partition,
    /// Change to the downstream transducer, whose input alphabet was reduced.
    pub report: ReductionReport,
    pub upstream_report: ReductionReport,
}

/// Merges equivalent symbols on the tape between `t1` and `t2`.
pub fn reduce_pair(t1: &Fst, t2: &Fst) -> ReducedPair {
    reduce_boundary(t1, t2, 1)
}

fn reduce_boundary(t1: &Fst, t2: &Fst, downstream_index: usize) -> ReducedPair {
    let candidates = eligible_candidates(t1, t2);
    let partition = compute_partition(t2, &candidates)
        .expect("effective alphabets never hold reserved symbols");
    let rep = partition.relabeling();
    let (upstream, downstream) = if rep.is_identity() {
        (t1.clone(), t2.clone())
    } else {
        (relabel_output_side(t1, &rep), relabel_input_side(t2, &rep))
    };
    let report = ReductionReport::new(downstream_index, t2, &downstream, Some(&partition));
    let upstream_report = ReductionReport::new(downstream_index - 1, t1, &upstream, None);
    ReducedPair {
        upstream,
        downstream,
        partition,
        report,
        upstream_report,
    }
}

/// Order in which the boundaries of a cascade are processed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    /// Last boundary first. This is the order [`reduce_cascade`] uses.
    Reverse,
    /// First boundary first; only useful for comparison.
    Forward,
}

/// One reduced boundary of a cascade.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryStep {
    /// Index of the stage reading the reduced tape.
    pub downstream: usize,
    pub partition: Partition,
    pub report: ReductionReport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadeReduction {
    pub cascade: Cascade,
    /// Boundaries in processing order.
    pub steps: Vec<BoundaryStep>,
}

impl CascadeReduction {
    pub fn reports(&self) -> Vec<ReductionReport> {
        self.steps.iter().map(|s| s.report).collect()
    }

    /// The partition computed for the tape read by stage `downstream`.
    pub fn partition_for(&self, downstream: usize) -> Option<&Partition> {
        self.steps
            .iter()
            .find(|s| s.downstream == downstream)
            .map(|s| &s.partition)
    }

    /// One report per stage comparing `original` with the reduced cascade,
    /// in cascade order.
    pub fn stage_reports(&self, original: &Cascade) -> Vec<ReductionReport> {
        original
            .stages()
            .iter()
            .zip(self.cascade.stages())
            .enumerate()
            .map(|(i, (before, after))| {
                ReductionReport::new(i, before, after, self.partition_for(i))
            })
            .collect()
    }
}

/// Reduces every intermediate alphabet of `cascade`, last boundary first.
pub fn reduce_cascade(cascade: &Cascade) -> CascadeReduction {
    reduce_cascade_with(cascade, Sweep::Reverse)
}

pub fn reduce_cascade_with(cascade: &Cascade, sweep: Sweep) -> CascadeReduction {
    let mut stages = cascade.stages().to_vec();
    let boundaries: Vec<usize> = match sweep {
        Sweep::Reverse => (1..stages.len()).rev().collect(),
        Sweep::Forward => (1..stages.len()).collect(),
    };
    let mut steps = Vec::with_capacity(boundaries.len());
    for i in boundaries {
        let pair = reduce_boundary(&stages[i - 1], &stages[i], i);
        stages[i - 1] = pair.upstream;
        stages[i] = pair.downstream;
        steps.push(BoundaryStep {
            downstream: i,
            partition: pair.partition,
            report: pair.report,
        });
    }
    CascadeReduction {
        cascade: Cascade::new(stages).expect("stage count is unchanged"),
        steps,
    }
}
