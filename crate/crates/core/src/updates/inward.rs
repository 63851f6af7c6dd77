//! Inward expansion and contraction: inserting or removing an adjacent
//! add/delete pair of the same simplex in the middle of the filtration.
//!
//! Both are the composition of an apex edit with a cascade of transpositions
//! that walks the new cell's arrows between the apex and their place in the
//! input order.  The cell never has cofaces while it travels, so every step
//! of the cascade is legal.

use crate::cellmodel::{Arrow, ArrowDir, Cell, CellLabel, Chain, Simplex};
use crate::error::{Error, Result};
use crate::updates::apex::{apex_insert, apex_remove};
use crate::updates::switch::{transpose_ascending, transpose_descending};
use crate::updates::{vine, Bundle, VineRecord};
use crate::updown::ArrowRef;

pub(super) fn arrows_before(bundle: &Bundle, i: usize, dir: ArrowDir) -> usize {
    bundle.filtration.arrows()[..i].iter().filter(|a| a.dir == dir).count()
}

/// Inserts `(+σ, -σ)` at input position `i`.  The simplex must be addable
/// there: absent, with every facet present.
pub fn expand_inward(bundle: &mut Bundle, i: usize, simplex: Simplex) -> Result<VineRecord> {
    if i > bundle.filtration.len() {
        return Err(Error::IllegalOp(format!(
            "position {i} is outside the filtration (length {})",
            bundle.filtration.len()
        )));
    }
    if bundle.state.active_copy_at(&simplex, i).is_some() {
        return Err(Error::IllegalOp(format!("{simplex} is already present at {i}")));
    }
    let dim = simplex.dim();
    let mut boundary = Chain::empty(dim.saturating_sub(1));
    if dim > 0 {
        for facet in simplex.facets() {
            let id = bundle.state.active_copy_at(&facet, i).ok_or_else(|| {
                Error::IllegalOp(format!("facet {facet} of {simplex} is absent at {i}"))
            })?;
            boundary.toggle(id);
        }
    }
    let before = bundle.pair_keys();

    let cell = Cell { dim, boundary, label: CellLabel::Simplex(simplex.clone()) };
    let id = apex_insert(&mut bundle.state, &mut bundle.pairs, cell, &mut bundle.chain_adds)?;

    // Walk the addition down to its slot, then the deletion up to its.
    let a_target = arrows_before(bundle, i, ArrowDir::Add);
    let mut q = bundle.state.asc_pos(id);
    while q > a_target {
        transpose_ascending(&mut bundle.state, &mut bundle.pairs, q - 1, &mut bundle.chain_adds)?;
        q -= 1;
    }
    let d_target = arrows_before(bundle, i, ArrowDir::Del);
    let mut k = bundle.state.desc_pos(id);
    while k < d_target {
        transpose_descending(&mut bundle.state, &mut bundle.pairs, k, &mut bundle.chain_adds)?;
        k += 1;
    }

    bundle.state.shift_f_indices(i, 2);
    bundle.state.set_f_index(ArrowRef::add(id), i);
    bundle.state.set_f_index(ArrowRef::del(id), i + 1);
    bundle.filtration.splice(
        i,
        0,
        vec![
            Arrow { dir: ArrowDir::Add, simplex: simplex.clone() },
            Arrow { dir: ArrowDir::Del, simplex },
        ],
    );
    bundle.state.rebuild_f_map()?;
    Ok(vine(bundle, before, Vec::new(), None))
}

/// Removes an adjacent `(+σ, -σ)` at input position `i`.
pub fn contract_inward(bundle: &mut Bundle, i: usize) -> Result<VineRecord> {
    if i + 1 >= bundle.filtration.len() {
        return Err(Error::IllegalOp(format!(
            "contraction at {i} needs two arrows, filtration has {}",
            bundle.filtration.len()
        )));
    }
    {
        let arrows = bundle.filtration.arrows();
        let (a, b) = (&arrows[i], &arrows[i + 1]);
        if a.dir != ArrowDir::Add || b.dir != ArrowDir::Del || a.simplex != b.simplex {
            return Err(Error::IllegalOp(format!(
                "arrows {i}, {} are not an add/delete pair of one simplex",
                i + 1
            )));
        }
    }
    let up = bundle
        .state
        .u_arrow_of_f(i)
        .ok_or_else(|| Error::Invariant(format!("arrow {i} missing from the up-down map")))?;
    let dn = bundle
        .state
        .u_arrow_of_f(i + 1)
        .ok_or_else(|| Error::Invariant(format!("arrow {} missing from the up-down map", i + 1)))?;
    if up.kind != ArrowDir::Add || dn.kind != ArrowDir::Del || up.cell != dn.cell {
        return Err(Error::Invariant(format!(
            "arrows {i}, {} do not map to one cell's add/delete pair",
            i + 1
        )));
    }
    let id = up.cell;
    let before = bundle.pair_keys();

    // Detach the cell from the input order, walk it to the apex, drop it.
    bundle.state.clear_provenance(id);
    let n = bundle.state.n();
    let mut q = bundle.state.asc_pos(id);
    while q + 1 < n {
        transpose_ascending(&mut bundle.state, &mut bundle.pairs, q, &mut bundle.chain_adds)?;
        q += 1;
    }
    let mut k = bundle.state.desc_pos(id);
    while k > 0 {
        transpose_descending(&mut bundle.state, &mut bundle.pairs, k - 1, &mut bundle.chain_adds)?;
        k -= 1;
    }
    apex_remove(&mut bundle.state, &mut bundle.pairs, id, &mut bundle.chain_adds)?;

    bundle.filtration.splice(i, 2, Vec::new());
    bundle.state.shift_f_indices(i + 2, -2);
    bundle.state.rebuild_f_map()?;
    Ok(vine(bundle, before, Vec::new(), None))
}
