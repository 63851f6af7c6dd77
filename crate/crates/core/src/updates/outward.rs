//! Outward expansion and contraction: splitting one cell's lifetime in two
//! around an inserted `(-σ, +σ)` arrow pair, or merging the lifetimes of two
//! adjacent copies by removing such a pair.
//!
//! Both operations pass through an intermediate state holding a synthetic
//! `(p+1)`-cell χ with boundary `σ' + σ''` that bridges the two copies.  Its
//! two pairs — `(+σ'', +χ)` and `(-χ, -σ')` — are the bars the split creates
//! and the merge destroys; everything else keeps its slot, which is what the
//! [`InterimReport`] records.

use std::collections::HashSet;

use crate::cellmodel::{Arrow, ArrowDir, Cell, CellId, CellLabel, Chain, Simplex};
use crate::error::{Error, Result};
use crate::reps::{Pair, PairId, PairKind, Representative, Role};
use crate::updown::ArrowRef;

use super::apex::{apex_insert, apex_remove};
use super::inward::arrows_before;
use super::switch::{transpose_ascending, transpose_descending};
use super::{vine, Bundle, InterimReport, PairKey, VineRecord};

fn key_of(bundle: &Bundle, pid: PairId) -> PairKey {
    let p = bundle.pairs.get(pid);
    PairKey { creator: p.creator, destroyer: p.destroyer }
}

/// Points a pair's arrow slot at a renamed up-down arrow.
fn rename_in_pair(bundle: &mut Bundle, old: ArrowRef, new: ArrowRef) -> Result<()> {
    let (pid, role) = bundle
        .pairs
        .find(old)
        .ok_or_else(|| Error::Invariant(format!("arrow {old} is unpaired")))?;
    let pair = bundle.pairs.get(pid);
    let (creator, destroyer) = match role {
        Role::Creator => (new, pair.destroyer),
        Role::Destroyer => (pair.creator, new),
    };
    bundle.pairs.set_arrows(pid, creator, destroyer);
    Ok(())
}

/// Removes the adjacent deletion/re-addition `(-σ, +σ)` at positions `i`,
/// `i+1`, merging the two copies of σ into the earlier one.
pub fn contract_outward(bundle: &mut Bundle, i: usize) -> Result<VineRecord> {
    if i + 1 >= bundle.filtration.len() {
        return Err(Error::IllegalOp(format!(
            "contraction at {i} needs two arrows, filtration has {}",
            bundle.filtration.len()
        )));
    }
    {
        let arrows = bundle.filtration.arrows();
        let (a, b) = (&arrows[i], &arrows[i + 1]);
        if a.dir != ArrowDir::Del || b.dir != ArrowDir::Add || a.simplex != b.simplex {
            return Err(Error::IllegalOp(format!(
                "arrows {i}, {} are not a deletion/re-addition of one simplex",
                i + 1
            )));
        }
    }
    let first = bundle
        .state
        .u_arrow_of_f(i)
        .ok_or_else(|| Error::Invariant(format!("arrow {i} is unmapped")))?
        .cell;
    let second = bundle
        .state
        .u_arrow_of_f(i + 1)
        .ok_or_else(|| Error::Invariant(format!("arrow {} is unmapped", i + 1)))?
        .cell;
    if bundle.state.cell(first).boundary != bundle.state.cell(second).boundary {
        return Err(Error::Invariant(format!(
            "copies {first} and {second} have different boundaries"
        )));
    }
    let before = bundle.pair_keys();
    let dim = bundle.state.cell(first).dim;

    // Bridge the copies with χ, then walk its arrows next to them: the
    // addition right after the later copy's, the deletion right before the
    // earlier copy's.
    let chi = apex_insert(
        &mut bundle.state,
        &mut bundle.pairs,
        Cell {
            dim: dim + 1,
            boundary: Chain::from_cells(dim, vec![first, second]),
            label: CellLabel::Chi,
        },
        &mut bundle.chain_adds,
    )?;
    let a_target = bundle.state.asc_pos(second) + 1;
    let mut q = bundle.state.asc_pos(chi);
    while q > a_target {
        transpose_ascending(&mut bundle.state, &mut bundle.pairs, q - 1, &mut bundle.chain_adds)?;
        q -= 1;
    }
    let d_target = bundle.state.desc_pos(first) - 1;
    let mut k = bundle.state.desc_pos(chi);
    while k < d_target {
        transpose_descending(&mut bundle.state, &mut bundle.pairs, k, &mut bundle.chain_adds)?;
        k += 1;
    }

    // In this position the pairing is forced: +χ closes the later copy's
    // bar, -χ reopens the bar that -σ' closes.
    let (pid_co, role_co) = bundle
        .pairs
        .find(ArrowRef::add(chi))
        .ok_or_else(|| Error::Invariant(format!("addition of {chi} is unpaired")))?;
    if role_co != Role::Destroyer || bundle.pairs.get(pid_co).creator != ArrowRef::add(second) {
        return Err(Error::Invariant(format!(
            "bridge addition is not paired with the later copy {second}"
        )));
    }
    let (pid_oc, role_oc) = bundle
        .pairs
        .find(ArrowRef::del(chi))
        .ok_or_else(|| Error::Invariant(format!("deletion of {chi} is unpaired")))?;
    if role_oc != Role::Creator || bundle.pairs.get(pid_oc).destroyer != ArrowRef::del(first) {
        return Err(Error::Invariant(format!(
            "bridge deletion is not paired with the earlier copy {first}"
        )));
    }

    let interim_state = bundle.state.clone();
    let chi_pairs = [key_of(bundle, pid_co), key_of(bundle, pid_oc)];
    let nn = interim_state.n();
    let dropped_uindices = vec![
        interim_state.asc_pos(second),
        interim_state.asc_pos(chi),
        nn + interim_state.desc_pos(chi),
        nn + interim_state.desc_pos(first),
    ];
    let tracked: Vec<(PairId, PairKey)> = bundle
        .pairs
        .iter()
        .filter(|(pid, _)| *pid != pid_co && *pid != pid_oc)
        .map(|(pid, p)| (pid, PairKey { creator: p.creator, destroyer: p.destroyer }))
        .collect();

    bundle.pairs.remove(pid_co);
    bundle.pairs.remove(pid_oc);
    let old_del = ArrowRef::del(second);
    let new_del = ArrowRef::del(first);
    rename_in_pair(bundle, old_del, new_del)?;
    let renames = vec![(old_del, new_del)];

    // Project every representative along χ ↦ 0, σ'' ↦ σ'; both chains keep
    // their boundaries, so all pairing equations survive.
    let pids: Vec<PairId> = bundle.pairs.ids().collect();
    for pid in pids {
        let rep = &mut bundle.pairs.get_mut(pid).rep;
        for chain in
            [rep.z_asc.as_mut(), Some(&mut rep.spanning), rep.z_desc.as_mut()].into_iter().flatten()
        {
            if chain.contains(chi) {
                chain.toggle(chi);
            }
            if chain.contains(second) {
                chain.toggle(second);
                chain.toggle(first);
            }
        }
    }
    for coface in bundle.state.cofaces(second) {
        if coface == chi {
            continue;
        }
        let boundary = &mut bundle.state.cell_mut(coface).boundary;
        boundary.toggle(second);
        boundary.toggle(first);
    }

    // Drop χ and the later copy; the deletion slot of the later copy now
    // deletes the merged cell.
    bundle.state.remove_ascending(chi);
    bundle.state.remove_ascending(second);
    bundle.state.remove_descending(chi);
    bundle.state.remove_descending(first);
    bundle.state.rename_descending(second, first);
    let merged_del = bundle
        .state
        .f_index(old_del)
        .ok_or_else(|| Error::Invariant(format!("deletion of {second} has no arrow index")))?;
    bundle.state.remove_cell(chi);
    bundle.state.remove_cell(second);
    bundle.state.set_f_index(new_del, merged_del);

    bundle.filtration.splice(i, 2, Vec::new());
    bundle.state.shift_f_indices(i + 2, -2);
    bundle.state.rebuild_f_map()?;

    let mapping: Vec<(PairKey, PairKey)> =
        tracked.into_iter().map(|(pid, key)| (key, key_of(bundle, pid))).collect();
    let interim = InterimReport { state: interim_state, chi_pairs, mapping, dropped_uindices };
    Ok(vine(bundle, before, renames, Some(interim)))
}

/// Inserts `(-σ, +σ)` at positions `i`, `i+1`, splitting the lifetime of the
/// copy of σ active there.  Rejected while any coface of that copy is alive
/// at `i`.
pub fn expand_outward(bundle: &mut Bundle, i: usize, simplex: Simplex) -> Result<VineRecord> {
    if i > bundle.filtration.len() {
        return Err(Error::IllegalOp(format!(
            "insertion position {i} outside filtration of length {}",
            bundle.filtration.len()
        )));
    }
    let split = bundle.state.active_copy_at(&simplex, i).ok_or_else(|| {
        Error::IllegalOp(format!("simplex {simplex} has no active copy at position {i}"))
    })?;
    let life = |bundle: &Bundle, id: CellId| -> Result<(usize, usize)> {
        let added = bundle
            .state
            .f_index(ArrowRef::add(id))
            .ok_or_else(|| Error::Invariant(format!("cell {id} has no addition index")))?;
        let deleted = bundle
            .state
            .f_index(ArrowRef::del(id))
            .ok_or_else(|| Error::Invariant(format!("cell {id} has no deletion index")))?;
        Ok((added, deleted))
    };
    let cofaces = bundle.state.cofaces(split);
    let mut late = HashSet::new();
    let mut early = HashSet::new();
    for &coface in &cofaces {
        let (added, deleted) = life(bundle, coface)?;
        if added < i && deleted >= i {
            return Err(Error::IllegalOp(format!(
                "cannot split {simplex} at {i}: coface {coface} is alive there"
            )));
        }
        if added >= i {
            late.insert(coface);
        } else {
            early.insert(coface);
        }
    }

    let before = bundle.pair_keys();
    let t_a = arrows_before(bundle, i, ArrowDir::Add);
    let t_d = arrows_before(bundle, i, ArrowDir::Del);
    let (_, old_deleted) = life(bundle, split)?;
    let dim = bundle.state.cell(split).dim;

    // The later copy takes over the old deletion slot; χ bridges the two.
    let boundary = bundle.state.cell(split).boundary.clone();
    let rest = bundle.state.insert_cell(Cell {
        dim,
        boundary,
        label: CellLabel::Simplex(simplex.clone()),
    });
    let chi = bundle.state.insert_cell(Cell {
        dim: dim + 1,
        boundary: Chain::from_cells(dim, vec![split, rest]),
        label: CellLabel::Chi,
    });
    for &coface in &late {
        let boundary = &mut bundle.state.cell_mut(coface).boundary;
        boundary.toggle(split);
        boundary.toggle(rest);
    }
    bundle.state.insert_ascending_at(t_a, rest);
    bundle.state.insert_ascending_at(t_a + 1, chi);
    bundle.state.rename_descending(split, rest);
    bundle.state.insert_descending_at(t_d, chi);
    bundle.state.insert_descending_at(t_d + 1, split);

    // Patch the representatives around the renamed deletion slot and the
    // repointed cofaces.  Descending cycles and the spanning chains with a
    // descending window follow the slot to the later copy; a spanning chain
    // whose boundary picked up `split + rest` from an odd number of
    // repointed (or, mirrored, retired) cofaces absorbs χ to restore its
    // equation; (p+1)-cycles that lost cycleness the same way absorb χ too.
    let odd = |chain: &Chain, set: &HashSet<CellId>| {
        chain.cells().iter().filter(|c| set.contains(c)).count() % 2 == 1
    };
    let pids: Vec<PairId> = bundle.pairs.ids().collect();
    for pid in pids {
        let pair_dim = bundle.pairs.get(pid).dim(&bundle.state);
        let kind = bundle.pairs.get(pid).kind();
        let rep = &mut bundle.pairs.get_mut(pid).rep;
        if pair_dim == dim {
            let mut renamed = false;
            if let Some(z) = rep.z_desc.as_mut() {
                if z.contains(split) {
                    renamed = true;
                    z.toggle(split);
                    z.toggle(rest);
                }
            }
            let absorb = match kind {
                PairKind::ClosedOpen => odd(&rep.spanning, &late),
                PairKind::OpenClosed => odd(&rep.spanning, &early),
                PairKind::ClosedClosed => odd(&rep.spanning, &late) ^ renamed,
            };
            if absorb {
                rep.spanning.toggle(chi);
            }
        } else if pair_dim == dim + 1 && kind == PairKind::ClosedClosed {
            let z_asc = rep.z_asc.as_mut().expect("closed-closed pair has both cycles");
            let absorb = odd(z_asc, &late);
            if absorb {
                z_asc.toggle(chi);
            }
            let z_desc = rep.z_desc.as_mut().expect("closed-closed pair has both cycles");
            if odd(z_desc, &late) != absorb {
                return Err(Error::Invariant(format!(
                    "split of {split} unbalanced the cycles of a {} pair",
                    PairKind::ClosedClosed
                )));
            }
            if absorb {
                z_desc.toggle(chi);
            }
        } else if dim > 0
            && pair_dim + 1 == dim
            && kind == PairKind::OpenClosed
            && rep.spanning.contains(split)
        {
            rep.spanning.toggle(split);
            rep.spanning.toggle(rest);
        }
    }
    let old_del = ArrowRef::del(split);
    let new_del = ArrowRef::del(rest);
    rename_in_pair(bundle, old_del, new_del)?;
    let renames = vec![(old_del, new_del)];

    let bridge = Chain::from_cells(dim, vec![split, rest]);
    let pid_co = bundle.pairs.insert(Pair {
        creator: ArrowRef::add(rest),
        destroyer: ArrowRef::add(chi),
        rep: Representative::closed_open(bridge.clone(), Chain::from_cells(dim + 1, vec![chi])),
    })?;
    let pid_oc = bundle.pairs.insert(Pair {
        creator: ArrowRef::del(chi),
        destroyer: old_del,
        rep: Representative::open_closed(Chain::from_cells(dim + 1, vec![chi]), bridge),
    })?;

    bundle.state.shift_f_indices(i, 2);
    bundle.state.set_f_index(old_del, i);
    bundle.state.set_f_index(ArrowRef::add(rest), i + 1);
    bundle.state.set_f_index(new_del, old_deleted + 2);
    bundle.filtration.splice(
        i,
        0,
        vec![
            Arrow { dir: ArrowDir::Del, simplex: simplex.clone() },
            Arrow { dir: ArrowDir::Add, simplex },
        ],
    );
    bundle.state.rebuild_f_map()?;

    let interim_state = bundle.state.clone();
    let chi_pairs = [key_of(bundle, pid_co), key_of(bundle, pid_oc)];
    let dropped_uindices =
        vec![interim_state.asc_pos(chi), interim_state.n() + interim_state.desc_pos(chi)];
    let tracked: Vec<(PairId, PairKey)> = bundle
        .pairs
        .iter()
        .filter(|(pid, _)| *pid != pid_co && *pid != pid_oc)
        .map(|(pid, p)| (pid, PairKey { creator: p.creator, destroyer: p.destroyer }))
        .collect();

    // Retire χ: walk its arrows to the apex and unlink it there.
    let n = bundle.state.n();
    let mut q = bundle.state.asc_pos(chi);
    while q + 1 < n {
        transpose_ascending(&mut bundle.state, &mut bundle.pairs, q, &mut bundle.chain_adds)?;
        q += 1;
    }
    let mut k = bundle.state.desc_pos(chi);
    while k > 0 {
        transpose_descending(&mut bundle.state, &mut bundle.pairs, k - 1, &mut bundle.chain_adds)?;
        k -= 1;
    }
    apex_remove(&mut bundle.state, &mut bundle.pairs, chi, &mut bundle.chain_adds)?;

    let live: HashSet<PairId> = bundle.pairs.ids().collect();
    let mapping: Vec<(PairKey, PairKey)> = tracked
        .into_iter()
        .filter(|(pid, _)| live.contains(pid))
        .map(|(pid, key)| (key, key_of(bundle, pid)))
        .collect();
    let interim = InterimReport { state: interim_state, chi_pairs, mapping, dropped_uindices };
    Ok(vine(bundle, before, renames, Some(interim)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellmodel::VertexId;
    use crate::cellmodel::ZigzagFiltration;
    use crate::oracle::fresh_f_barcode;
    use crate::reps::{f_barcode, Barcode};

    fn s(v: &[u32]) -> Simplex {
        Simplex::new(v.iter().map(|&x| VertexId(x)).collect()).unwrap()
    }

    fn filt(steps: &[(ArrowDir, &[u32])]) -> ZigzagFiltration {
        ZigzagFiltration::new(steps.iter().map(|(d, v)| Arrow { dir: *d, simplex: s(v) }).collect())
    }

    use ArrowDir::{Add, Del};

    fn bars(entries: &[(usize, usize, usize)]) -> Barcode {
        let mut out = Barcode::new();
        for &e in entries {
            *out.entry(e).or_insert(0) += 1;
        }
        out
    }

    fn key(creator: ArrowRef, destroyer: ArrowRef) -> PairKey {
        PairKey { creator, destroyer }
    }

    /// `(+u, +v, -v, +v, -v, -u)`: the same vertex lives twice.
    fn split_vertex() -> Bundle {
        Bundle::new(filt(&[
            (Add, &[0]),
            (Add, &[1]),
            (Del, &[1]),
            (Add, &[1]),
            (Del, &[1]),
            (Del, &[0]),
        ]))
        .unwrap()
    }

    #[test]
    fn contract_outward_merges_vertex_copies() {
        let mut bundle = split_vertex();
        let record = contract_outward(&mut bundle, 2).unwrap();
        bundle.validate().unwrap();

        let (u, v1, v2, chi) = (CellId(0), CellId(1), CellId(2), CellId(3));
        assert_eq!(record.renames, vec![(ArrowRef::del(v2), ArrowRef::del(v1))]);
        let interim = record.interim.as_ref().unwrap();
        assert_eq!(
            interim.chi_pairs,
            [
                key(ArrowRef::add(v2), ArrowRef::add(chi)),
                key(ArrowRef::del(chi), ArrowRef::del(v1)),
            ]
        );
        assert_eq!(interim.dropped_uindices, vec![2, 3, 4, 5]);
        assert!(interim.mapping.contains(&(
            key(ArrowRef::add(v1), ArrowRef::del(v2)),
            key(ArrowRef::add(v1), ArrowRef::del(v1))
        )));
        assert!(interim.mapping.contains(&(
            key(ArrowRef::add(u), ArrowRef::del(u)),
            key(ArrowRef::add(u), ArrowRef::del(u))
        )));
        interim.state.check_invariants().unwrap();

        let got = f_barcode(&bundle.state, &bundle.pairs).unwrap();
        assert_eq!(got, bars(&[(0, 1, 3), (0, 2, 2)]));
        assert_eq!(got, fresh_f_barcode(&bundle.filtration).unwrap());
    }

    #[test]
    fn expand_outward_splits_vertex_lifetime() {
        let mut bundle =
            Bundle::new(filt(&[(Add, &[0]), (Add, &[1]), (Del, &[1]), (Del, &[0])])).unwrap();
        let record = expand_outward(&mut bundle, 2, s(&[1])).unwrap();
        bundle.validate().unwrap();

        let (v1, v2) = (CellId(1), CellId(2));
        assert_eq!(record.renames, vec![(ArrowRef::del(v1), ArrowRef::del(v2))]);
        assert_eq!(record.created, vec![key(ArrowRef::add(v2), ArrowRef::del(v2))]);
        assert!(record.destroyed.is_empty());
        let interim = record.interim.as_ref().unwrap();
        assert_eq!(interim.dropped_uindices, vec![3, 4]);
        interim.state.check_invariants().unwrap();

        let got = f_barcode(&bundle.state, &bundle.pairs).unwrap();
        assert_eq!(got, bars(&[(0, 1, 5), (0, 2, 2), (0, 4, 4)]));
        assert_eq!(got, fresh_f_barcode(&bundle.filtration).unwrap());
    }

    #[test]
    fn expand_outward_splits_edge_lifetime() {
        let mut bundle = Bundle::new(filt(&[
            (Add, &[0]),
            (Add, &[1]),
            (Add, &[0, 1]),
            (Del, &[0, 1]),
            (Del, &[1]),
            (Del, &[0]),
        ]))
        .unwrap();
        expand_outward(&mut bundle, 3, s(&[0, 1])).unwrap();
        bundle.validate().unwrap();
        assert_eq!(bundle.filtration.len(), 8);
        let got = f_barcode(&bundle.state, &bundle.pairs).unwrap();
        assert_eq!(got, bars(&[(0, 1, 7), (0, 2, 2), (0, 4, 4), (0, 6, 6)]));
        assert_eq!(got, fresh_f_barcode(&bundle.filtration).unwrap());
    }

    #[test]
    fn outward_round_trip_restores_everything() {
        let mut bundle = split_vertex();
        let start = f_barcode(&bundle.state, &bundle.pairs).unwrap();
        contract_outward(&mut bundle, 2).unwrap();
        expand_outward(&mut bundle, 2, s(&[1])).unwrap();
        bundle.validate().unwrap();
        assert_eq!(f_barcode(&bundle.state, &bundle.pairs).unwrap(), start);
        assert_eq!(bundle.filtration.len(), 6);
    }

    #[test]
    fn expand_outward_rejects_live_coface() {
        let mut bundle = Bundle::new(filt(&[
            (Add, &[0]),
            (Add, &[1]),
            (Add, &[0, 1]),
            (Del, &[0, 1]),
            (Del, &[1]),
            (Del, &[0]),
        ]))
        .unwrap();
        assert!(expand_outward(&mut bundle, 3, s(&[1])).is_err());
    }

    #[test]
    fn contract_outward_rejects_inward_pattern() {
        let mut bundle = Bundle::new(filt(&[
            (Add, &[0]),
            (Add, &[1]),
            (Add, &[0, 1]),
            (Del, &[0, 1]),
            (Del, &[1]),
            (Del, &[0]),
        ]))
        .unwrap();
        assert!(contract_outward(&mut bundle, 2).is_err());
    }
}
