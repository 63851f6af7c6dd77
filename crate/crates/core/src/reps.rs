//! Interval pairings and representative chains.
//!
//! Every barcode interval of an up-down filtration is witnessed by a pair of
//! arrows together with a small bundle of chains.  A pair is *closed-open*
//! when an ascending arrow creates the class and a later ascending arrow
//! destroys it, *open-closed* for the descending mirror image, and
//! *closed-closed* when the class is born on the way up and dies on the way
//! down.  The validators in this module are the ground truth the update
//! algorithms are tested against: any pairing in which each arrow is used
//! exactly once and each pair carries a valid representative encodes the
//! true barcode.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::cellmodel::{ArrowDir, Chain};
use crate::error::{Error, Result};
use crate::updown::{map_pair_to_interval, ArrowRef, UpDownState};

/// Shape of an interval pair, named after which ends of the bar are closed.
#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord)]
pub enum PairKind {
    /// Created and destroyed by additions.
    ClosedOpen,
    /// Created and destroyed by deletions.
    OpenClosed,
    /// Created by an addition, destroyed by a deletion.
    ClosedClosed,
}

impl fmt::Display for PairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PairKind::ClosedOpen => "co",
            PairKind::OpenClosed => "oc",
            PairKind::ClosedClosed => "cc",
        };
        write!(f, "{s}")
    }
}

/// Witness chains for one pair.
///
/// * closed-open: `z_asc = ∂(spanning)`, `z_asc` created by the creator and
///   `spanning` by the destroyer;
/// * open-closed: `z_desc = ∂(spanning)`, `spanning` created by the creator
///   and `z_desc` by the destroyer;
/// * closed-closed: `z_asc + z_desc = ∂(spanning)`, both `z` chains are
///   cycles, created by the creator and destroyer respectively; `spanning`
///   is unconstrained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representative {
    pub z_asc: Option<Chain>,
    pub spanning: Chain,
    pub z_desc: Option<Chain>,
}

impl Representative {
    pub fn closed_open(z: Chain, spanning: Chain) -> Self {
        Representative { z_asc: Some(z), spanning, z_desc: None }
    }

    pub fn open_closed(spanning: Chain, z: Chain) -> Self {
        Representative { z_asc: None, spanning, z_desc: Some(z) }
    }

    pub fn closed_closed(z_asc: Chain, spanning: Chain, z_desc: Chain) -> Self {
        Representative { z_asc: Some(z_asc), spanning, z_desc: Some(z_desc) }
    }
}

#[derive(Clone, Debug)]
pub struct Pair {
    pub creator: ArrowRef,
    pub destroyer: ArrowRef,
    pub rep: Representative,
}

impl Pair {
    pub fn kind(&self) -> PairKind {
        match (self.creator.kind, self.destroyer.kind) {
            (ArrowDir::Add, ArrowDir::Add) => PairKind::ClosedOpen,
            (ArrowDir::Del, ArrowDir::Del) => PairKind::OpenClosed,
            (ArrowDir::Add, ArrowDir::Del) => PairKind::ClosedClosed,
            (ArrowDir::Del, ArrowDir::Add) => {
                unreachable!("creator/destroyer orientation is checked on insert")
            }
        }
    }

    /// Dimension of the homology class the pair witnesses.
    pub fn dim(&self, st: &UpDownState) -> usize {
        match self.kind() {
            PairKind::OpenClosed => st.cell(self.destroyer.cell).dim,
            _ => st.cell(self.creator.cell).dim,
        }
    }

    /// Closed interval `[b, d]` of up-down indices the pair spans.
    pub fn interval(&self, st: &UpDownState) -> (usize, usize) {
        (st.uindex(self.creator) + 1, st.uindex(self.destroyer))
    }
}

/// Stable handle to a pair inside a [`PairSet`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct PairId(usize);

/// Which end of a pair an arrow sits at.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Role {
    Creator,
    Destroyer,
}

/// A set of pairs indexed by their arrows.
///
/// Handles stay valid across removals of other pairs; iteration order is
/// by insertion slot and therefore deterministic for a deterministic
/// construction.
#[derive(Clone, Default, Debug)]
pub struct PairSet {
    slots: Vec<Option<Pair>>,
    by_arrow: HashMap<ArrowRef, (PairId, Role)>,
}

impl PairSet {
    pub fn new() -> Self {
        PairSet::default()
    }

    pub fn len(&self) -> usize {
        self.by_arrow.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.by_arrow.is_empty()
    }

    pub fn insert(&mut self, pair: Pair) -> Result<PairId> {
        if pair.creator.kind == ArrowDir::Del && pair.destroyer.kind == ArrowDir::Add {
            return Err(Error::Invariant(format!(
                "pair ({}, {}) runs against the filtration",
                pair.creator, pair.destroyer
            )));
        }
        for arrow in [pair.creator, pair.destroyer] {
            if self.by_arrow.contains_key(&arrow) {
                return Err(Error::Invariant(format!("arrow {arrow} already paired")));
            }
        }
        let id = PairId(self.slots.len());
        self.by_arrow.insert(pair.creator, (id, Role::Creator));
        self.by_arrow.insert(pair.destroyer, (id, Role::Destroyer));
        self.slots.push(Some(pair));
        Ok(id)
    }

    pub fn remove(&mut self, id: PairId) -> Pair {
        let pair = self.slots[id.0].take().expect("pair already removed");
        self.by_arrow.remove(&pair.creator);
        self.by_arrow.remove(&pair.destroyer);
        pair
    }

    pub fn get(&self, id: PairId) -> &Pair {
        self.slots[id.0].as_ref().expect("pair was removed")
    }

    pub fn get_mut(&mut self, id: PairId) -> &mut Pair {
        self.slots[id.0].as_mut().expect("pair was removed")
    }

    /// Replaces the arrows of a pair, keeping its slot, and reindexes.
    pub fn set_arrows(&mut self, id: PairId, creator: ArrowRef, destroyer: ArrowRef) {
        self.set_arrows_many(&[(id, creator, destroyer)]);
    }

    /// Rearrows several pairs at once.  All old keys are dropped before any
    /// new one is indexed, so arrows may legally migrate between the listed
    /// pairs.
    pub fn set_arrows_many(&mut self, updates: &[(PairId, ArrowRef, ArrowRef)]) {
        for &(id, _, _) in updates {
            let pair = self.slots[id.0].as_ref().expect("pair was removed");
            self.by_arrow.remove(&pair.creator);
            self.by_arrow.remove(&pair.destroyer);
        }
        for &(id, creator, destroyer) in updates {
            let pair = self.slots[id.0].as_mut().expect("pair was removed");
            pair.creator = creator;
            pair.destroyer = destroyer;
            self.by_arrow.insert(creator, (id, Role::Creator));
            self.by_arrow.insert(destroyer, (id, Role::Destroyer));
        }
    }

    pub fn find(&self, arrow: ArrowRef) -> Option<(PairId, Role)> {
        self.by_arrow.get(&arrow).copied()
    }

    pub fn ids(&self) -> impl Iterator<Item = PairId> + '_ {
        self.slots.iter().enumerate().filter_map(|(i, s)| s.as_ref().map(|_| PairId(i)))
    }

    pub fn iter(&self) -> impl Iterator<Item = (PairId, &Pair)> + '_ {
        self.slots.iter().enumerate().filter_map(|(i, s)| s.as_ref().map(|p| (PairId(i), p)))
    }

    /// Pairs sorted by the up-down index of their creator arrow.
    pub fn sorted_by_creator(&self, st: &UpDownState) -> Vec<PairId> {
        let mut ids: Vec<PairId> = self.ids().collect();
        ids.sort_by_key(|&id| st.uindex(self.get(id).creator));
        ids
    }
}

/// Does `arrow` create `chain`?  An addition creates a chain it belongs to
/// whose other members were all added earlier; a deletion creates a chain it
/// belongs to whose other members are all deleted later.
pub fn created_by(st: &UpDownState, chain: &Chain, arrow: ArrowRef) -> bool {
    if !chain.contains(arrow.cell) {
        return false;
    }
    match arrow.kind {
        ArrowDir::Add => {
            let bar = st.asc_pos(arrow.cell);
            chain.cells().iter().all(|&c| st.asc_pos(c) <= bar)
        }
        ArrowDir::Del => {
            let bar = st.desc_pos(arrow.cell);
            chain.cells().iter().all(|&c| st.desc_pos(c) >= bar)
        }
    }
}

fn ensure_live(st: &UpDownState, chain: &Chain, what: &str) -> Result<()> {
    for &c in chain.cells() {
        if st.try_cell(c).is_none() {
            return Err(Error::Invariant(format!("{what} mentions dead cell {c}")));
        }
    }
    Ok(())
}

/// Checks the chain equations and created-by conditions of one pair.
pub fn validate_rep(st: &UpDownState, pair: &Pair) -> Result<()> {
    let fail = |why: String| {
        Err(Error::Invariant(format!("pair ({}, {}): {why}", pair.creator, pair.destroyer)))
    };
    if st.uindex(pair.creator) >= st.uindex(pair.destroyer) {
        return fail("creator does not precede destroyer".into());
    }
    let kind = pair.kind();
    let p = pair.dim(st);
    let rep = &pair.rep;
    ensure_live(st, &rep.spanning, "spanning chain")?;
    if let Some(z) = &rep.z_asc {
        ensure_live(st, z, "ascending cycle")?;
    }
    if let Some(z) = &rep.z_desc {
        ensure_live(st, z, "descending cycle")?;
    }

    let check_dim = |chain: &Chain, want: usize, what: &str| -> Result<()> {
        if !chain.is_empty() && chain.dim() != want {
            return Err(Error::Invariant(format!(
                "pair ({}, {}): {what} has dimension {} instead of {want}",
                pair.creator,
                pair.destroyer,
                chain.dim()
            )));
        }
        Ok(())
    };

    match kind {
        PairKind::ClosedOpen => {
            let z = rep.z_asc.as_ref().ok_or_else(|| {
                Error::Invariant("closed-open pair without ascending cycle".into())
            })?;
            if rep.z_desc.is_some() {
                return fail("closed-open pair carries a descending cycle".into());
            }
            check_dim(z, p, "cycle")?;
            check_dim(&rep.spanning, p + 1, "spanning chain")?;
            if st.cell(pair.creator.cell).dim != p || st.cell(pair.destroyer.cell).dim != p + 1 {
                return fail("arrow dimensions do not match a closed-open pair".into());
            }
            if st.boundary_of_chain(&rep.spanning) != *z {
                return fail("spanning chain does not bound the cycle".into());
            }
            if !created_by(st, z, pair.creator) {
                return fail("cycle is not created by the creator".into());
            }
            if !created_by(st, &rep.spanning, pair.destroyer) {
                return fail("spanning chain is not created by the destroyer".into());
            }
        }
        PairKind::OpenClosed => {
            let z = rep.z_desc.as_ref().ok_or_else(|| {
                Error::Invariant("open-closed pair without descending cycle".into())
            })?;
            if rep.z_asc.is_some() {
                return fail("open-closed pair carries an ascending cycle".into());
            }
            check_dim(z, p, "cycle")?;
            check_dim(&rep.spanning, p + 1, "spanning chain")?;
            if st.cell(pair.creator.cell).dim != p + 1 || st.cell(pair.destroyer.cell).dim != p {
                return fail("arrow dimensions do not match an open-closed pair".into());
            }
            if st.boundary_of_chain(&rep.spanning) != *z {
                return fail("spanning chain does not bound the cycle".into());
            }
            if !created_by(st, &rep.spanning, pair.creator) {
                return fail("spanning chain is not created by the creator".into());
            }
            if !created_by(st, z, pair.destroyer) {
                return fail("cycle is not created by the destroyer".into());
            }
        }
        PairKind::ClosedClosed => {
            let za = rep.z_asc.as_ref().ok_or_else(|| {
                Error::Invariant("closed-closed pair without ascending cycle".into())
            })?;
            let zd = rep.z_desc.as_ref().ok_or_else(|| {
                Error::Invariant("closed-closed pair without descending cycle".into())
            })?;
            check_dim(za, p, "ascending cycle")?;
            check_dim(zd, p, "descending cycle")?;
            check_dim(&rep.spanning, p + 1, "spanning chain")?;
            if st.cell(pair.creator.cell).dim != p || st.cell(pair.destroyer.cell).dim != p {
                return fail("arrow dimensions do not match a closed-closed pair".into());
            }
            if !st.is_cycle(za) {
                return fail("ascending chain is not a cycle".into());
            }
            if !st.is_cycle(zd) {
                return fail("descending chain is not a cycle".into());
            }
            let mut sum = za.clone();
            for &c in zd.cells() {
                sum.toggle(c);
            }
            if st.boundary_of_chain(&rep.spanning) != sum {
                return fail("spanning chain does not connect the two cycles".into());
            }
            if !created_by(st, za, pair.creator) {
                return fail("ascending cycle is not created by the creator".into());
            }
            if !created_by(st, zd, pair.destroyer) {
                return fail("descending cycle is not created by the destroyer".into());
            }
        }
    }
    Ok(())
}

/// Checks that `pairs` is a full valid pairing of the arrows of `st`: every
/// addition and every deletion appears in exactly one pair, and every pair
/// carries a valid representative.
pub fn validate_pairset(st: &UpDownState, pairs: &PairSet) -> Result<()> {
    if pairs.len() != st.n() {
        return Err(Error::Invariant(format!("{} pairs for {} cells", pairs.len(), st.n())));
    }
    for id in st.cell_ids() {
        for arrow in [ArrowRef::add(id), ArrowRef::del(id)] {
            if pairs.find(arrow).is_none() {
                return Err(Error::Invariant(format!("arrow {arrow} is unpaired")));
            }
        }
    }
    for (_, pair) in pairs.iter() {
        validate_rep(st, pair)?;
    }
    Ok(())
}

/// Multiset of bars: `(dimension, birth, death)` with closed indices.
pub type Barcode = BTreeMap<(usize, usize, usize), usize>;

/// Barcode of the up-down filtration read off a pairing.
pub fn u_barcode(st: &UpDownState, pairs: &PairSet) -> Barcode {
    let mut bars = Barcode::new();
    for (_, pair) in pairs.iter() {
        let (b, d) = pair.interval(st);
        *bars.entry((pair.dim(st), b, d)).or_insert(0) += 1;
    }
    bars
}

/// Barcode of the original zigzag filtration read off a pairing, using the
/// arrow correspondence (crossed pairs drop one dimension).
pub fn f_barcode(st: &UpDownState, pairs: &PairSet) -> Result<Barcode> {
    let mut bars = Barcode::new();
    for (_, pair) in pairs.iter() {
        let (p, iv) = map_pair_to_interval(st, pair.dim(st), pair.creator, pair.destroyer)?;
        *bars.entry((p, iv.b, iv.d)).or_insert(0) += 1;
    }
    Ok(bars)
}

/// Human-readable difference between two barcodes, empty when equal.
pub fn barcode_diff(left: &Barcode, right: &Barcode) -> Vec<String> {
    let mut out = Vec::new();
    for (key, &lc) in left {
        let rc = right.get(key).copied().unwrap_or(0);
        if lc != rc {
            out.push(format!("bar {} {} {}: {lc} vs {rc}", key.0, key.1, key.2));
        }
    }
    for (key, &rc) in right {
        if !left.contains_key(key) {
            out.push(format!("bar {} {} {}: 0 vs {rc}", key.0, key.1, key.2));
        }
    }
    out
}
