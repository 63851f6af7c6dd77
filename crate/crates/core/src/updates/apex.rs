//! Inserting and removing a cell at the apex.
//!
//! The apex — last addition, first deletion — is the only place a cell can
//! appear or vanish without disturbing the rest of the up-down order, so the
//! expansion and contraction edits all funnel through here.  Insertion
//! reduces the new boundary against the creator cycles to learn which bars it
//! disturbs; removal stitches the bars that ran through the vanished cell
//! back together.  Both run in O(m) chain additions.

use crate::cellmodel::{Cell, CellId, Chain};
use crate::error::{Error, Result};
use crate::reps::{Pair, PairId, PairKind, PairSet, Representative, Role};
use crate::updown::{ArrowRef, UpDownState};

fn add_into(target: &mut Chain, other: &Chain, adds: &mut u64) {
    target.xor_assign(other);
    *adds += 1;
}

fn add_rep(target: &mut Representative, other: &Representative, adds: &mut u64) {
    if let (Some(t), Some(o)) = (target.z_asc.as_mut(), other.z_asc.as_ref()) {
        add_into(t, o, adds);
    }
    add_into(&mut target.spanning, &other.spanning, adds);
    if let (Some(t), Some(o)) = (target.z_desc.as_mut(), other.z_desc.as_ref()) {
        add_into(t, o, adds);
    }
}

/// Appends `cell` at the apex and extends the pairing.  Returns the new id.
pub fn apex_insert(
    st: &mut UpDownState,
    pairs: &mut PairSet,
    cell: Cell,
    adds: &mut u64,
) -> Result<CellId> {
    let dim = cell.dim;
    for &b in cell.boundary.cells() {
        let face = st
            .try_cell(b)
            .ok_or_else(|| Error::IllegalOp(format!("boundary cell {b} does not exist")))?;
        if face.dim + 1 != dim {
            return Err(Error::DimensionMismatch { left: face.dim + 1, right: dim });
        }
    }
    if !st.is_cycle(&cell.boundary) {
        return Err(Error::IllegalOp("boundary of the new cell is not a cycle".into()));
    }

    let mut w = cell.boundary.clone();
    let id = st.insert_apex(cell);

    // Reduce the boundary against creator cycles.  Closed-open pairs feed the
    // disc S_D, closed-closed pairs the staircase candidates S_H.
    let mut s_d: Vec<PairId> = Vec::new();
    let mut s_h: Vec<PairId> = Vec::new();
    while let Some(pivot) = latest_added(st, &w) {
        let (pid, role) = pairs
            .find(ArrowRef::add(pivot))
            .ok_or_else(|| Error::Invariant(format!("addition of {pivot} is unpaired")))?;
        if role != Role::Creator {
            return Err(Error::Invariant(format!(
                "cycle pivot {pivot} is not created by its addition"
            )));
        }
        let p = pairs.get(pid);
        add_into(&mut w, p.rep.z_asc.as_ref().unwrap(), adds);
        match p.kind() {
            PairKind::ClosedOpen => s_d.push(pid),
            PairKind::ClosedClosed => s_h.push(pid),
            PairKind::OpenClosed => unreachable!("addition-created pairs are not open-closed"),
        }
    }

    // B = the new cell plus the spanning chains of the disc.
    let mut b = Chain::singleton(dim, id);
    for &pid in &s_d {
        add_into(&mut b, &pairs.get(pid).rep.spanning, adds);
    }

    if s_h.is_empty() {
        // The boundary was already a boundary: the new cell opens a bar that
        // its own deletion will close.
        let rep = Representative::closed_closed(b.clone(), Chain::empty(dim + 1), b);
        pairs.insert(Pair { creator: ArrowRef::add(id), destroyer: ArrowRef::del(id), rep })?;
        return Ok(id);
    }

    // Eliminate nested pairs from the support: a later-created pair whose bar
    // ends earlier absorbs the outer pair's representative and the outer pair
    // drops out of the sum.
    s_h.sort_by_key(|&pid| st.uindex(pairs.get(pid).creator));
    let mut stair: Vec<PairId> = Vec::new();
    for pid in s_h {
        let dp = st.uindex(pairs.get(pid).destroyer);
        while let Some(&top) = stair.last() {
            if st.uindex(pairs.get(top).destroyer) > dp {
                let outer = pairs.get(top).rep.clone();
                add_rep(&mut pairs.get_mut(pid).rep, &outer, adds);
                stair.pop();
            } else {
                break;
            }
        }
        stair.push(pid);
    }

    // The survivors form a staircase: creators and destroyers both ascending.
    // Relink them around the new cell.
    let creators: Vec<ArrowRef> = stair.iter().map(|&pid| pairs.get(pid).creator).collect();
    let destroyers: Vec<ArrowRef> = stair.iter().map(|&pid| pairs.get(pid).destroyer).collect();
    let reps: Vec<Representative> = stair.iter().map(|&pid| pairs.get(pid).rep.clone()).collect();
    for &pid in &stair {
        pairs.remove(pid);
    }
    let k = reps.len();

    // Prefix sums of the ascending cycles.
    let mut zpre: Vec<Chain> = Vec::with_capacity(k);
    for rep in &reps {
        let mut z = zpre.last().cloned().unwrap_or_else(|| Chain::empty(dim - 1));
        add_into(&mut z, rep.z_asc.as_ref().unwrap(), adds);
        zpre.push(z);
    }

    // The last step keeps the full cycle sum and B itself.
    pairs.insert(Pair {
        creator: creators[k - 1],
        destroyer: ArrowRef::add(id),
        rep: Representative::closed_open(zpre[k - 1].clone(), b.clone()),
    })?;

    // Middle steps and the opening bar accumulate spanning chains and
    // descending cycles from the top of the staircase downward.
    let mut a_acc = b;
    let mut z2_acc = Chain::empty(dim - 1);
    for i in (1..k).rev() {
        add_into(&mut a_acc, &reps[i].spanning, adds);
        add_into(&mut z2_acc, reps[i].z_desc.as_ref().unwrap(), adds);
        pairs.insert(Pair {
            creator: creators[i - 1],
            destroyer: destroyers[i],
            rep: Representative::closed_closed(zpre[i - 1].clone(), a_acc.clone(), z2_acc.clone()),
        })?;
    }
    add_into(&mut a_acc, &reps[0].spanning, adds);
    add_into(&mut z2_acc, reps[0].z_desc.as_ref().unwrap(), adds);
    pairs.insert(Pair {
        creator: ArrowRef::del(id),
        destroyer: destroyers[0],
        rep: Representative::open_closed(a_acc, z2_acc),
    })?;

    Ok(id)
}

fn latest_added(st: &UpDownState, w: &Chain) -> Option<CellId> {
    w.cells().iter().copied().max_by_key(|&c| st.asc_pos(c))
}

/// Removes the cell at the apex, stitching the pairing back together.
pub fn apex_remove(
    st: &mut UpDownState,
    pairs: &mut PairSet,
    id: CellId,
    adds: &mut u64,
) -> Result<()> {
    if st.ascending().last() != Some(&id) || st.descending().first() != Some(&id) {
        return Err(Error::IllegalOp(format!("cell {id} is not at the apex")));
    }
    if !st.cofaces(id).is_empty() {
        return Err(Error::IllegalOp(format!("cell {id} still has cofaces")));
    }
    let up = ArrowRef::add(id);
    let dn = ArrowRef::del(id);
    let (pid_up, role_up) =
        pairs.find(up).ok_or_else(|| Error::Invariant(format!("addition of {id} is unpaired")))?;

    if role_up == Role::Creator {
        // Positive cell: its own bar vanishes; its cycle scrubs the cell out
        // of the unconstrained spanning chains.
        let pair = pairs.get(pid_up);
        if pair.destroyer != dn {
            return Err(Error::Invariant(format!(
                "positive apex cell {id} is not paired with its own deletion"
            )));
        }
        let zbar = pair.rep.z_asc.clone().unwrap();
        pairs.remove(pid_up);
        let ids: Vec<PairId> = pairs.ids().collect();
        for pid in ids {
            let p = pairs.get(pid);
            if p.kind() == PairKind::ClosedClosed && p.rep.spanning.contains(id) {
                add_into(&mut pairs.get_mut(pid).rep.spanning, &zbar, adds);
            }
        }
        st.remove_apex(id);
        return Ok(());
    }

    // Negative cell: its addition closed some bar (↘τ, ↘c) and its deletion
    // reopens one (↖c, ↖τ').
    let p_co = pid_up;
    let (p_oc, role_dn) =
        pairs.find(dn).ok_or_else(|| Error::Invariant(format!("deletion of {id} is unpaired")))?;
    if role_dn != Role::Creator {
        return Err(Error::Invariant(format!(
            "deletion of the negative apex cell {id} does not open a bar"
        )));
    }
    let tau = pairs.get(p_co).creator;
    let tau2 = pairs.get(p_oc).destroyer;
    let rep_star = pairs.get(p_co).rep.clone(); // (z_*, A_*)
    let rep_circ = pairs.get(p_oc).rep.clone(); // (A_o, z_o)

    // Every other chain through the cell sits in the spanning chain of some
    // closed-closed pair.
    let mut lambda: Vec<PairId> = pairs
        .iter()
        .filter(|&(pid, p)| {
            pid != p_co
                && pid != p_oc
                && p.kind() == PairKind::ClosedClosed
                && p.rep.spanning.contains(id)
        })
        .map(|(pid, _)| pid)
        .collect();
    lambda.sort_by_key(|&pid| st.uindex(pairs.get(pid).creator));

    // Settle pairs created after τ with the closing bar's representative.
    let tau_pos = st.uindex(tau);
    let mut remaining: Vec<PairId> = Vec::new();
    for pid in lambda {
        if st.uindex(pairs.get(pid).creator) > tau_pos {
            let p = pairs.get_mut(pid);
            add_into(p.rep.z_asc.as_mut().unwrap(), rep_star.z_asc.as_ref().unwrap(), adds);
            add_into(&mut p.rep.spanning, &rep_star.spanning, adds);
        } else {
            remaining.push(pid);
        }
    }

    // Settle pairs destroyed before τ' with the opening bar's representative.
    let tau2_pos = st.uindex(tau2);
    let mut lambda: Vec<PairId> = Vec::new();
    for pid in remaining {
        if st.uindex(pairs.get(pid).destroyer) < tau2_pos {
            let p = pairs.get_mut(pid);
            add_into(&mut p.rep.spanning, &rep_circ.spanning, adds);
            add_into(p.rep.z_desc.as_mut().unwrap(), rep_circ.z_desc.as_ref().unwrap(), adds);
        } else {
            lambda.push(pid);
        }
    }

    // Settle nested pairs against the staircase: an inner pair absorbs the
    // enclosing pair's representative and drops out; the outer one stays.
    let mut stair: Vec<PairId> = Vec::new();
    for pid in lambda {
        match stair.last() {
            Some(&top)
                if st.uindex(pairs.get(pid).destroyer) < st.uindex(pairs.get(top).destroyer) =>
            {
                let outer = pairs.get(top).rep.clone();
                add_rep(&mut pairs.get_mut(pid).rep, &outer, adds);
            }
            _ => stair.push(pid),
        }
    }

    // Relink around the vanished cell.
    let creators: Vec<ArrowRef> = stair.iter().map(|&pid| pairs.get(pid).creator).collect();
    let destroyers: Vec<ArrowRef> = stair.iter().map(|&pid| pairs.get(pid).destroyer).collect();
    let reps: Vec<Representative> = stair.iter().map(|&pid| pairs.get(pid).rep.clone()).collect();
    pairs.remove(p_co);
    pairs.remove(p_oc);
    for &pid in &stair {
        pairs.remove(pid);
    }

    if reps.is_empty() {
        let mut spanning = rep_star.spanning.clone();
        add_into(&mut spanning, &rep_circ.spanning, adds);
        pairs.insert(Pair {
            creator: tau,
            destroyer: tau2,
            rep: Representative::closed_closed(
                rep_star.z_asc.clone().unwrap(),
                spanning,
                rep_circ.z_desc.clone().unwrap(),
            ),
        })?;
    } else {
        let ell = reps.len();
        // Lowest staircase step takes over the reopened bar.
        let mut spanning = reps[0].spanning.clone();
        add_into(&mut spanning, &rep_circ.spanning, adds);
        let mut z2 = reps[0].z_desc.clone().unwrap();
        add_into(&mut z2, rep_circ.z_desc.as_ref().unwrap(), adds);
        pairs.insert(Pair {
            creator: creators[0],
            destroyer: tau2,
            rep: Representative::closed_closed(reps[0].z_asc.clone().unwrap(), spanning, z2),
        })?;
        // The closing bar's creator takes over the highest step.
        let mut z = reps[ell - 1].z_asc.clone().unwrap();
        add_into(&mut z, rep_star.z_asc.as_ref().unwrap(), adds);
        let mut spanning = reps[ell - 1].spanning.clone();
        add_into(&mut spanning, &rep_star.spanning, adds);
        pairs.insert(Pair {
            creator: tau,
            destroyer: destroyers[ell - 1],
            rep: Representative::closed_closed(z, spanning, reps[ell - 1].z_desc.clone().unwrap()),
        })?;
        // Adjacent steps chain into each other.
        for j in 0..ell - 1 {
            let mut z = reps[j].z_asc.clone().unwrap();
            add_into(&mut z, reps[j + 1].z_asc.as_ref().unwrap(), adds);
            let mut spanning = reps[j].spanning.clone();
            add_into(&mut spanning, &reps[j + 1].spanning, adds);
            let mut z2 = reps[j].z_desc.clone().unwrap();
            add_into(&mut z2, reps[j + 1].z_desc.as_ref().unwrap(), adds);
            pairs.insert(Pair {
                creator: creators[j + 1],
                destroyer: destroyers[j],
                rep: Representative::closed_closed(z, spanning, z2),
            })?;
        }
    }

    st.remove_apex(id);
    Ok(())
}
