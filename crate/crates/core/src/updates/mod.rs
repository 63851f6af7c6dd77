//! In-place edits of a zigzag filtration with barcode maintenance.
//!
//! A [`Bundle`] couples a filtration with its converted up-down state and a
//! valid pairing.  Eight atomic edits mutate all three consistently:
//!
//! * switches — transposing two adjacent arrows ([`switch_forward`],
//!   [`switch_backward`], [`switch_mixed`]);
//! * inward expansion/contraction — inserting or removing an adjacent
//!   `(+σ, -σ)` pair ([`expand_inward`], [`contract_inward`]);
//! * outward expansion/contraction — inserting or removing an adjacent
//!   `(-σ, +σ)` pair ([`expand_outward`], [`contract_outward`]).
//!
//! Every operation returns a [`VineRecord`] tracing how the bars moved.  A
//! mixed switch costs no chain additions, the other switches O(1), and the
//! expansions/contractions O(m); all bookkeeping stays within O(m²) time.

mod apex;
mod inward;
mod outward;
mod switch;

pub use inward::{contract_inward, expand_inward};
pub use outward::{contract_outward, expand_outward};
pub use switch::{switch_backward, switch_forward, switch_mixed};

use std::collections::HashMap;
use std::fmt;

use crate::cellmodel::{ArrowDir, Simplex, ZigzagFiltration};
use crate::error::{Error, Result};
use crate::oracle::initial_pairset;
use crate::reps::{validate_pairset, PairSet};
use crate::updown::{convert, ArrowRef, UpDownState};

/// The two arrows identifying a pair, e.g. `+3,-7` for a bar created by the
/// addition of cell 3 and destroyed by the deletion of cell 7.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PairKey {
    pub creator: ArrowRef,
    pub destroyer: ArrowRef,
}

impl fmt::Display for PairKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.creator, self.destroyer)
    }
}

/// A filtration together with its up-down conversion and a maintained
/// pairing, plus an instrumentation counter of chain additions.
#[derive(Clone, Debug)]
pub struct Bundle {
    pub filtration: ZigzagFiltration,
    pub state: UpDownState,
    pub pairs: PairSet,
    /// Chain-chain additions performed by update operations so far.
    pub chain_adds: u64,
}

impl Bundle {
    /// Converts a filtration and computes an initial pairing from scratch.
    pub fn new(filtration: ZigzagFiltration) -> Result<Bundle> {
        let state = convert(&filtration)?;
        let pairs = initial_pairset(&state)?;
        Ok(Bundle { filtration, state, pairs, chain_adds: 0 })
    }

    /// Full consistency check: structural invariants, a valid complete
    /// pairing, and matching arrow counts.
    pub fn validate(&self) -> Result<()> {
        self.state.check_invariants()?;
        validate_pairset(&self.state, &self.pairs)?;
        if self.filtration.len() != self.state.m() {
            return Err(Error::Invariant(format!(
                "{} filtration arrows vs {} up-down arrows",
                self.filtration.len(),
                self.state.m()
            )));
        }
        Ok(())
    }

    /// Keys of all pairs, sorted by the creator's up-down position.
    pub fn pair_keys(&self) -> Vec<PairKey> {
        let mut keys: Vec<PairKey> = self
            .pairs
            .iter()
            .map(|(_, p)| PairKey { creator: p.creator, destroyer: p.destroyer })
            .collect();
        keys.sort_by_key(|k| self.state.uindex(k.creator));
        keys
    }
}

/// Snapshot of the intermediate up-down filtration an outward operation
/// passes through: the state still contains the bridge cell χ and its two
/// pairs.  Comparing its barcode with the final one, after dropping the
/// χ-pairs and shifting indices past `dropped_uindices`, checks the arrow
/// correspondence of the operation.
#[derive(Clone, Debug)]
pub struct InterimReport {
    pub state: UpDownState,
    /// The `(+σ₂,+χ)` and `(-χ,-σ₁)` pairs, in that order.
    pub chi_pairs: [PairKey; 2],
    /// Interim key → final key for every pair whose slot survives the rest
    /// of the operation untouched.
    pub mapping: Vec<(PairKey, PairKey)>,
    /// Up-down arrow indices (in the interim state) that vanish on the way
    /// to the final state.
    pub dropped_uindices: Vec<usize>,
}

/// How one operation moved the bars.
///
/// Survivor identity follows the creator arrow: a pair whose creator (after
/// applying `renames`) still creates a pair afterwards is the same bar.
#[derive(Clone, Debug, Default)]
pub struct VineRecord {
    /// Old key → new key of every surviving pair.
    pub survivors: Vec<(PairKey, PairKey)>,
    pub created: Vec<PairKey>,
    pub destroyed: Vec<PairKey>,
    /// Arrow identities rewritten by the operation (old → new).
    pub renames: Vec<(ArrowRef, ArrowRef)>,
    /// Present for outward operations.
    pub interim: Option<InterimReport>,
}

/// Diffs the pairing against a snapshot of keys taken before the operation.
pub(crate) fn vine(
    bundle: &Bundle,
    before: Vec<PairKey>,
    renames: Vec<(ArrowRef, ArrowRef)>,
    interim: Option<InterimReport>,
) -> VineRecord {
    let rename: HashMap<ArrowRef, ArrowRef> = renames.iter().copied().collect();
    let map = |a: ArrowRef| rename.get(&a).copied().unwrap_or(a);
    let mut after: HashMap<ArrowRef, PairKey> =
        bundle.pair_keys().into_iter().map(|k| (k.creator, k)).collect();

    let mut survivors = Vec::new();
    let mut destroyed = Vec::new();
    // Renamed keys claim their new creator first, so that an old pair whose
    // creator arrow was handed to another pair cannot shadow them.
    let (renamed, plain): (Vec<PairKey>, Vec<PairKey>) =
        before.into_iter().partition(|k| rename.contains_key(&k.creator));
    for old in renamed.into_iter().chain(plain) {
        let new_creator = map(old.creator);
        match after.remove(&new_creator) {
            Some(new) => survivors.push((old, new)),
            None => destroyed.push(old),
        }
    }
    let mut created: Vec<PairKey> = after.into_values().collect();
    created.sort_by_key(|k| bundle.state.uindex(k.creator));
    VineRecord { survivors, created, destroyed, renames, interim }
}

/// One scripted edit, positions referring to the current filtration.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum UpdateOp {
    /// Transpose arrows `j`, `j+1`; the variant (forward, backward, mixed)
    /// is read off their directions.
    Switch(usize),
    /// Insert `(+σ, -σ)` at position `i`.
    ExpandIn(usize, Simplex),
    /// Remove the `(+σ, -σ)` pair at position `i`.
    ContractIn(usize),
    /// Insert `(-σ, +σ)` at position `i`, splitting σ's lifetime.
    ExpandOut(usize, Simplex),
    /// Remove the `(-σ, +σ)` pair at position `i`, merging the lifetimes.
    ContractOut(usize),
}

impl fmt::Display for UpdateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vertices = |f: &mut fmt::Formatter<'_>, s: &Simplex| {
            s.vertices().iter().try_for_each(|v| write!(f, " {}", v.0))
        };
        match self {
            UpdateOp::Switch(j) => write!(f, "switch {j}"),
            UpdateOp::ExpandIn(i, s) => {
                write!(f, "expand-in {i}")?;
                vertices(f, s)
            }
            UpdateOp::ContractIn(i) => write!(f, "contract-in {i}"),
            UpdateOp::ExpandOut(i, s) => {
                write!(f, "expand-out {i}")?;
                vertices(f, s)
            }
            UpdateOp::ContractOut(i) => write!(f, "contract-out {i}"),
        }
    }
}

/// Applies one operation, classifying switches by the arrow directions.
pub fn apply_op(bundle: &mut Bundle, op: &UpdateOp) -> Result<VineRecord> {
    match op {
        UpdateOp::Switch(j) => {
            let j = *j;
            if j + 1 >= bundle.filtration.len() {
                return Err(Error::IllegalOp(format!(
                    "switch at {j} needs two arrows, filtration has {}",
                    bundle.filtration.len()
                )));
            }
            let dirs = (bundle.filtration.arrows()[j].dir, bundle.filtration.arrows()[j + 1].dir);
            match dirs {
                (ArrowDir::Add, ArrowDir::Add) => switch_forward(bundle, j),
                (ArrowDir::Del, ArrowDir::Del) => switch_backward(bundle, j),
                _ => switch_mixed(bundle, j),
            }
        }
        UpdateOp::ExpandIn(i, s) => expand_inward(bundle, *i, s.clone()),
        UpdateOp::ContractIn(i) => contract_inward(bundle, *i),
        UpdateOp::ExpandOut(i, s) => expand_outward(bundle, *i, s.clone()),
        UpdateOp::ContractOut(i) => contract_outward(bundle, *i),
    }
}

/// Runs a script, returning one record per operation.  A failing operation
/// rolls the bundle back to its state before that operation and reports the
/// step index; with `validate_each` the full consistency check runs after
/// every step.
pub fn apply_script(
    bundle: &mut Bundle,
    ops: &[UpdateOp],
    validate_each: bool,
) -> Result<Vec<VineRecord>> {
    let mut records = Vec::with_capacity(ops.len());
    for (index, op) in ops.iter().enumerate() {
        let snapshot = bundle.clone();
        let outcome = apply_op(bundle, op).and_then(|record| {
            if validate_each {
                bundle.validate()?;
            }
            Ok(record)
        });
        match outcome {
            Ok(record) => records.push(record),
            Err(e) => {
                *bundle = snapshot;
                return Err(e.at_op(index));
            }
        }
    }
    Ok(records)
}
