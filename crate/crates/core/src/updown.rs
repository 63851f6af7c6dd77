//! Conversion of a zigzag filtration into its up-down counterpart.
//!
//! The up-down filtration performs all additions of the input filtration
//! first (in input order) and then all deletions (in input order).  Every
//! addition creates a distinct cell, so a simplex that is added twice yields
//! two parallel cells.  The original arrow index of each cell's addition and
//! deletion is retained; that correspondence maps bars of the up-down
//! barcode back to bars of the input filtration.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::cellmodel::{
    validate_filtration, ArrowDir, Cell, CellId, CellLabel, Chain, Simplex, ZigzagFiltration,
};
use crate::error::{Error, Result};

/// Reference to one arrow of the up-down filtration: the addition or the
/// deletion of a cell.  Its index among all arrows is positional and shifts
/// when cells are inserted, so it is derived on demand via
/// [`UpDownState::uindex`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ArrowRef {
    pub kind: ArrowDir,
    pub cell: CellId,
}

impl ArrowRef {
    pub fn add(cell: CellId) -> Self {
        ArrowRef { kind: ArrowDir::Add, cell }
    }

    pub fn del(cell: CellId) -> Self {
        ArrowRef { kind: ArrowDir::Del, cell }
    }
}

impl std::fmt::Display for ArrowRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            ArrowDir::Add => write!(f, "+{}", self.cell),
            ArrowDir::Del => write!(f, "-{}", self.cell),
        }
    }
}

/// Closed interval of an input-filtration barcode, `1 <= b <= d <= m-1`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FInterval {
    pub b: usize,
    pub d: usize,
}

/// Up-down filtration: `ascending` additions followed by `descending`
/// deletions, with cell records and provenance back to the input filtration.
#[derive(Clone, Debug, Default)]
pub struct UpDownState {
    cells: BTreeMap<CellId, Cell>,
    ascending: Vec<CellId>,
    descending: Vec<CellId>,
    asc_pos: HashMap<CellId, usize>,
    desc_pos: HashMap<CellId, usize>,
    /// Input-filtration arrow of each cell's addition/deletion; synthetic
    /// cells have no entry.
    f_add: HashMap<CellId, usize>,
    f_del: HashMap<CellId, usize>,
    /// Inverse map: input arrow index -> up-down arrow, total over real arrows.
    f_map: Vec<ArrowRef>,
    next_id: usize,
}

impl UpDownState {
    /// Number of cells (= additions = deletions).
    pub fn n(&self) -> usize {
        self.ascending.len()
    }

    /// Number of up-down arrows.
    pub fn m(&self) -> usize {
        self.ascending.len() + self.descending.len()
    }

    pub fn ascending(&self) -> &[CellId] {
        &self.ascending
    }

    pub fn descending(&self) -> &[CellId] {
        &self.descending
    }

    pub fn cell(&self, id: CellId) -> &Cell {
        &self.cells[&id]
    }

    pub fn try_cell(&self, id: CellId) -> Option<&Cell> {
        self.cells.get(&id)
    }

    /// Cell ids in ascending order of id (deterministic).
    pub fn cell_ids(&self) -> impl Iterator<Item = CellId> + '_ {
        self.cells.keys().copied()
    }

    pub fn asc_pos(&self, id: CellId) -> usize {
        self.asc_pos[&id]
    }

    pub fn desc_pos(&self, id: CellId) -> usize {
        self.desc_pos[&id]
    }

    /// Index of an arrow among all up-down arrows; additions come first.
    pub fn uindex(&self, arrow: ArrowRef) -> usize {
        match arrow.kind {
            ArrowDir::Add => self.asc_pos[&arrow.cell],
            ArrowDir::Del => self.n() + self.desc_pos[&arrow.cell],
        }
    }

    /// Input-filtration arrow behind an up-down arrow; `None` for synthetic
    /// cells.
    pub fn f_index(&self, arrow: ArrowRef) -> Option<usize> {
        match arrow.kind {
            ArrowDir::Add => self.f_add.get(&arrow.cell).copied(),
            ArrowDir::Del => self.f_del.get(&arrow.cell).copied(),
        }
    }

    /// Up-down arrow behind an input-filtration arrow.
    pub fn u_arrow_of_f(&self, f_arrow: usize) -> Option<ArrowRef> {
        self.f_map.get(f_arrow).copied()
    }

    /// Cells of the complex reached after the first `i` up-down arrows,
    /// sorted by id.
    pub fn cells_at(&self, i: usize) -> Vec<CellId> {
        let n = self.n();
        let mut out: Vec<CellId> = if i <= n {
            self.ascending[..i].to_vec()
        } else {
            let gone: HashSet<CellId> = self.descending[..i - n].iter().copied().collect();
            self.ascending.iter().copied().filter(|c| !gone.contains(c)).collect()
        };
        out.sort_unstable();
        out
    }

    /// Boundary of a chain of dimension >= 1 within this state.
    pub fn boundary_of_chain(&self, c: &Chain) -> Chain {
        let mut out = Chain::empty(c.dim().saturating_sub(1));
        for &cell in c.cells() {
            out.xor_assign(&self.cells[&cell].boundary);
        }
        out
    }

    /// Whether a chain is a cycle; 0-chains always are.
    pub fn is_cycle(&self, c: &Chain) -> bool {
        c.dim() == 0 || self.boundary_of_chain(c).is_empty()
    }

    /// The cell copy of `simplex` present in the input complex reached after
    /// `f_pos` arrows.
    pub fn active_copy_at(&self, simplex: &Simplex, f_pos: usize) -> Option<CellId> {
        self.cells.iter().find_map(|(id, cell)| match &cell.label {
            CellLabel::Simplex(s) if s == simplex => {
                let added = *self.f_add.get(id)?;
                let deleted = *self.f_del.get(id)?;
                (added < f_pos && deleted >= f_pos).then_some(*id)
            }
            _ => None,
        })
    }

    /// Cells whose boundary contains `face`, sorted by id.
    pub fn cofaces(&self, face: CellId) -> Vec<CellId> {
        self.cells.iter().filter(|(_, c)| c.boundary.contains(face)).map(|(id, _)| *id).collect()
    }

    // ---- mutation, used by the update operations ----

    pub(crate) fn fresh_id(&mut self) -> CellId {
        let id = CellId(self.next_id);
        self.next_id += 1;
        id
    }

    /// Appends a cell at the apex: last addition, first deletion.
    pub(crate) fn insert_apex(&mut self, cell: Cell) -> CellId {
        let id = self.fresh_id();
        self.cells.insert(id, cell);
        self.asc_pos.insert(id, self.ascending.len());
        self.ascending.push(id);
        self.descending.insert(0, id);
        for (k, c) in self.descending.iter().enumerate() {
            self.desc_pos.insert(*c, k);
        }
        id
    }

    /// Removes a cell sitting at the apex (last addition, first deletion).
    pub(crate) fn remove_apex(&mut self, id: CellId) {
        assert_eq!(self.ascending.last(), Some(&id));
        assert_eq!(self.descending.first(), Some(&id));
        self.ascending.pop();
        self.descending.remove(0);
        self.asc_pos.remove(&id);
        self.desc_pos.remove(&id);
        for (k, c) in self.descending.iter().enumerate() {
            self.desc_pos.insert(*c, k);
        }
        self.cells.remove(&id);
        self.f_add.remove(&id);
        self.f_del.remove(&id);
    }

    /// Swaps adjacent additions at positions `q`, `q+1`, carrying input-arrow
    /// provenance along when both cells have it.
    pub(crate) fn swap_ascending(&mut self, q: usize) {
        let (a, b) = (self.ascending[q], self.ascending[q + 1]);
        self.ascending.swap(q, q + 1);
        self.asc_pos.insert(a, q + 1);
        self.asc_pos.insert(b, q);
        if let (Some(&fa), Some(&fb)) = (self.f_add.get(&a), self.f_add.get(&b)) {
            self.f_add.insert(a, fb);
            self.f_add.insert(b, fa);
            self.f_map.swap(fa, fb);
        }
    }

    /// Swaps adjacent deletions at positions `q`, `q+1`.
    pub(crate) fn swap_descending(&mut self, q: usize) {
        let (a, b) = (self.descending[q], self.descending[q + 1]);
        self.descending.swap(q, q + 1);
        self.desc_pos.insert(a, q + 1);
        self.desc_pos.insert(b, q);
        if let (Some(&fa), Some(&fb)) = (self.f_del.get(&a), self.f_del.get(&b)) {
            self.f_del.insert(a, fb);
            self.f_del.insert(b, fa);
            self.f_map.swap(fa, fb);
        }
    }

    /// Swaps the input arrows of an adjacent addition/deletion pair (the
    /// up-down side is unaffected).
    pub(crate) fn swap_f_arrows(&mut self, j: usize) {
        let (u, v) = (self.f_map[j], self.f_map[j + 1]);
        self.set_f_index(u, j + 1);
        self.set_f_index(v, j);
        self.f_map.swap(j, j + 1);
    }

    pub(crate) fn set_f_index(&mut self, arrow: ArrowRef, f: usize) {
        match arrow.kind {
            ArrowDir::Add => self.f_add.insert(arrow.cell, f),
            ArrowDir::Del => self.f_del.insert(arrow.cell, f),
        };
    }

    pub(crate) fn cell_mut(&mut self, id: CellId) -> &mut Cell {
        self.cells.get_mut(&id).unwrap()
    }

    /// Detaches a cell from the input filtration (used while its arrows are
    /// being spliced out); returns the old indices.
    pub(crate) fn clear_provenance(&mut self, id: CellId) -> (Option<usize>, Option<usize>) {
        (self.f_add.remove(&id), self.f_del.remove(&id))
    }

    /// Shifts every recorded input-arrow index `>= from` by `delta`.
    pub(crate) fn shift_f_indices(&mut self, from: usize, delta: isize) {
        for table in [&mut self.f_add, &mut self.f_del] {
            for v in table.values_mut() {
                if *v >= from {
                    *v = v.checked_add_signed(delta).expect("arrow index underflow");
                }
            }
        }
    }

    /// Registers a new cell without placing it in either order.
    pub(crate) fn insert_cell(&mut self, cell: Cell) -> CellId {
        let id = self.fresh_id();
        self.cells.insert(id, cell);
        id
    }

    pub(crate) fn insert_ascending_at(&mut self, q: usize, id: CellId) {
        self.ascending.insert(q, id);
        for (k, c) in self.ascending.iter().enumerate().skip(q) {
            self.asc_pos.insert(*c, k);
        }
    }

    pub(crate) fn insert_descending_at(&mut self, k: usize, id: CellId) {
        self.descending.insert(k, id);
        for (j, c) in self.descending.iter().enumerate().skip(k) {
            self.desc_pos.insert(*c, j);
        }
    }

    pub(crate) fn remove_ascending(&mut self, id: CellId) {
        let q = self.asc_pos.remove(&id).expect("cell not in ascending order");
        self.ascending.remove(q);
        for (k, c) in self.ascending.iter().enumerate().skip(q) {
            self.asc_pos.insert(*c, k);
        }
    }

    pub(crate) fn remove_descending(&mut self, id: CellId) {
        let q = self.desc_pos.remove(&id).expect("cell not in descending order");
        self.descending.remove(q);
        for (k, c) in self.descending.iter().enumerate().skip(q) {
            self.desc_pos.insert(*c, k);
        }
    }

    /// Renames the cell occupying one slot of the descending order.
    pub(crate) fn rename_descending(&mut self, old: CellId, new: CellId) {
        let k = self.desc_pos.remove(&old).expect("cell not in descending order");
        self.descending[k] = new;
        self.desc_pos.insert(new, k);
    }

    /// Drops a cell record (the caller has already unlinked it everywhere).
    pub(crate) fn remove_cell(&mut self, id: CellId) {
        self.cells.remove(&id);
        self.f_add.remove(&id);
        self.f_del.remove(&id);
    }

    /// Rebuilds the arrow maps from per-cell provenance after a structural
    /// edit.  Every real arrow must have provenance and indices must form a
    /// permutation of `0..m`.
    pub(crate) fn rebuild_f_map(&mut self) -> Result<()> {
        let mut map = vec![None; self.f_add.len() + self.f_del.len()];
        for &id in self.cells.keys() {
            for (table, kind) in [(&self.f_add, ArrowDir::Add), (&self.f_del, ArrowDir::Del)] {
                if let Some(&f) = table.get(&id) {
                    if f >= map.len() || map[f].is_some() {
                        return Err(Error::Invariant(format!(
                            "input-arrow map broken at arrow {f}"
                        )));
                    }
                    map[f] = Some(ArrowRef { kind, cell: id });
                }
            }
        }
        self.f_map = map
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Invariant("input-arrow map has holes".into()))?;
        Ok(())
    }

    /// Structural sanity: positions consistent, boundaries respect order.
    pub fn check_invariants(&self) -> Result<()> {
        if self.ascending.len() != self.descending.len() {
            return Err(Error::Invariant("additions and deletions out of balance".into()));
        }
        for (q, id) in self.ascending.iter().enumerate() {
            if self.asc_pos[id] != q {
                return Err(Error::Invariant(format!("ascending position of {id} stale")));
            }
            for &b in self.cells[id].boundary.cells() {
                if self.asc_pos[&b] >= q {
                    return Err(Error::Invariant(format!("cell {id} added before its face {b}")));
                }
            }
        }
        for (q, id) in self.descending.iter().enumerate() {
            if self.desc_pos[id] != q {
                return Err(Error::Invariant(format!("descending position of {id} stale")));
            }
            for &b in self.cells[id].boundary.cells() {
                if self.desc_pos[&b] <= q {
                    return Err(Error::Invariant(format!(
                        "face {b} deleted before its coface {id}"
                    )));
                }
            }
        }
        for (&id, cell) in self.cells.iter() {
            if !self.boundary_of_chain(&cell.boundary).is_empty() {
                return Err(Error::Invariant(format!(
                    "boundary of the boundary of {id} does not vanish"
                )));
            }
        }
        Ok(())
    }
}

/// Builds the up-down state of a valid filtration in one pass.
pub fn convert(f: &ZigzagFiltration) -> Result<UpDownState> {
    validate_filtration(f)?;
    let mut st = UpDownState::default();
    let mut active: HashMap<Simplex, CellId> = HashMap::new();
    for (fi, arrow) in f.arrows().iter().enumerate() {
        match arrow.dir {
            ArrowDir::Add => {
                let dim = arrow.simplex.dim();
                let mut boundary = Chain::empty(dim.saturating_sub(1));
                for facet in arrow.simplex.facets() {
                    boundary.toggle(active[&facet]);
                }
                let id = st.fresh_id();
                st.cells.insert(
                    id,
                    Cell { dim, boundary, label: CellLabel::Simplex(arrow.simplex.clone()) },
                );
                st.asc_pos.insert(id, st.ascending.len());
                st.ascending.push(id);
                st.f_add.insert(id, fi);
                active.insert(arrow.simplex.clone(), id);
            }
            ArrowDir::Del => {
                let id = active.remove(&arrow.simplex).expect("validated filtration");
                st.desc_pos.insert(id, st.descending.len());
                st.descending.push(id);
                st.f_del.insert(id, fi);
            }
        }
    }
    st.rebuild_f_map()?;
    st.check_invariants()?;
    Ok(st)
}

/// Maps an up-down pair, given by its creator and destroyer arrows and its
/// dimension, to an interval of the input-filtration barcode.
///
/// When the creator's input arrow comes first the interval lives in the same
/// dimension; otherwise the bar flips around the deletion and drops one
/// dimension.
pub fn map_pair_to_interval(
    st: &UpDownState,
    dim: usize,
    creator: ArrowRef,
    destroyer: ArrowRef,
) -> Result<(usize, FInterval)> {
    let l = st
        .f_index(creator)
        .ok_or_else(|| Error::Invariant(format!("arrow {creator} has no input arrow")))?;
    let r = st
        .f_index(destroyer)
        .ok_or_else(|| Error::Invariant(format!("arrow {destroyer} has no input arrow")))?;
    if l < r {
        Ok((dim, FInterval { b: l + 1, d: r }))
    } else {
        let dim = dim
            .checked_sub(1)
            .ok_or_else(|| Error::Invariant("dimension-shifted pair in dimension 0".into()))?;
        Ok((dim, FInterval { b: r + 1, d: l }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellmodel::{Arrow, VertexId};

    fn s(v: &[u32]) -> Simplex {
        Simplex::new(v.iter().map(|&x| VertexId(x)).collect()).unwrap()
    }

    fn filt(steps: &[(ArrowDir, &[u32])]) -> ZigzagFiltration {
        ZigzagFiltration::new(steps.iter().map(|(d, v)| Arrow { dir: *d, simplex: s(v) }).collect())
    }

    use ArrowDir::{Add, Del};

    fn fix_b() -> ZigzagFiltration {
        filt(&[(Add, &[0]), (Add, &[1]), (Add, &[0, 1]), (Del, &[0, 1]), (Del, &[1]), (Del, &[0])])
    }

    fn fix_c() -> ZigzagFiltration {
        filt(&[
            (Add, &[0]),
            (Add, &[1]),
            (Add, &[0, 1]),
            (Del, &[0, 1]),
            (Add, &[0, 1]),
            (Del, &[0, 1]),
            (Del, &[1]),
            (Del, &[0]),
        ])
    }

    #[test]
    fn convert_simple_edge() {
        let st = convert(&fix_b()).unwrap();
        assert_eq!(st.n(), 3);
        // Ascending u, v, uv; descending uv, v, u; arrow map is the identity.
        let labels: Vec<_> = st
            .ascending()
            .iter()
            .map(|c| match &st.cell(*c).label {
                CellLabel::Simplex(s) => s.clone(),
                _ => panic!(),
            })
            .collect();
        assert_eq!(labels, vec![s(&[0]), s(&[1]), s(&[0, 1])]);
        let desc: Vec<_> = st.descending().to_vec();
        assert_eq!(desc, vec![CellId(2), CellId(1), CellId(0)]);
        for u in 0..st.n() {
            assert_eq!(st.f_index(ArrowRef::add(st.ascending()[u])), Some(u));
        }
        for k in 0..st.n() {
            assert_eq!(st.f_index(ArrowRef::del(st.descending()[k])), Some(st.n() + k));
        }
        // Edge boundary points at the vertex cells.
        let edge = st.cell(CellId(2));
        assert_eq!(edge.boundary.cells(), &[CellId(0), CellId(1)]);
    }

    #[test]
    fn convert_duplicates_parallel_copies() {
        let st = convert(&fix_c()).unwrap();
        assert_eq!(st.n(), 4);
        // Two distinct edge cells with identical boundaries.
        let (uv1, uv2) = (CellId(2), CellId(3));
        assert_eq!(st.cell(uv1).boundary, st.cell(uv2).boundary);
        assert_eq!(st.ascending()[2], uv1);
        assert_eq!(st.ascending()[3], uv2);
        assert_eq!(st.descending()[0], uv1);
        assert_eq!(st.descending()[1], uv2);
        // Arrow correspondence: the second copy is added by input arrow 4,
        // the first copy deleted by input arrow 3; the rest is the identity.
        assert_eq!(st.f_index(ArrowRef::add(uv2)), Some(4));
        assert_eq!(st.f_index(ArrowRef::del(uv1)), Some(3));
        assert_eq!(st.f_index(ArrowRef::add(uv1)), Some(2));
        assert_eq!(st.f_index(ArrowRef::del(uv2)), Some(5));
        assert_eq!(st.u_arrow_of_f(4), Some(ArrowRef::add(uv2)));
        assert_eq!(st.u_arrow_of_f(3), Some(ArrowRef::del(uv1)));
    }

    #[test]
    fn complexes_along_the_way() {
        let st = convert(&fix_b()).unwrap();
        assert!(st.cells_at(0).is_empty());
        assert_eq!(st.cells_at(2), vec![CellId(0), CellId(1)]);
        assert_eq!(st.cells_at(3), vec![CellId(0), CellId(1), CellId(2)]);
        assert_eq!(st.cells_at(4), vec![CellId(0), CellId(1)]);
        assert!(st.cells_at(6).is_empty());
    }

    #[test]
    fn interval_mapping_shifts_dimension_for_crossed_arrows() {
        let st = convert(&fix_c()).unwrap();
        let (uv1, uv2) = (CellId(2), CellId(3));
        // Straight pair: dimension kept.
        let (p, iv) =
            map_pair_to_interval(&st, 0, ArrowRef::add(CellId(0)), ArrowRef::del(CellId(0)))
                .unwrap();
        assert_eq!((p, iv), (0, FInterval { b: 1, d: 7 }));
        // Crossed pair: the second copy's addition (input arrow 4) pairs with
        // the first copy's deletion (input arrow 3): dimension drops.
        let (p, iv) = map_pair_to_interval(&st, 1, ArrowRef::add(uv2), ArrowRef::del(uv1)).unwrap();
        assert_eq!((p, iv), (0, FInterval { b: 4, d: 4 }));
    }

    #[test]
    fn rejects_invalid_input() {
        let bad = filt(&[(Add, &[0]), (Add, &[0, 1])]);
        assert!(convert(&bad).is_err());
    }

    #[test]
    fn active_copy_tracks_the_input_position() {
        let st = convert(&fix_c()).unwrap();
        assert_eq!(st.active_copy_at(&s(&[0, 1]), 3), Some(CellId(2)));
        assert_eq!(st.active_copy_at(&s(&[0, 1]), 4), None);
        assert_eq!(st.active_copy_at(&s(&[0, 1]), 5), Some(CellId(3)));
        assert_eq!(st.active_copy_at(&s(&[0]), 1), Some(CellId(0)));
        assert_eq!(st.active_copy_at(&s(&[0]), 8), None);
    }
}
