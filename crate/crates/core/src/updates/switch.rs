//! Transposing adjacent arrows.
//!
//! A forward switch swaps two adjacent additions of the input filtration, a
//! backward switch two adjacent deletions, and a mixed switch an adjacent
//! addition/deletion pair.  Mixed switches leave the up-down filtration
//! untouched.  The other two reorder two up-down arrows, which can invalidate
//! at most one representative chain: the unique chain *created by* the arrow
//! that moves toward the front.  The repair either keeps both pairs (summing
//! the disturbed representative with its neighbour) or exchanges their
//! endpoints; every branch costs O(1) chain additions.

use crate::cellmodel::{ArrowDir, Chain};
use crate::error::{Error, Result};
use crate::reps::PairSet;
use crate::reps::{PairId, PairKind, Role};
use crate::updates::{vine, Bundle, VineRecord};
use crate::updown::ArrowRef;
use crate::updown::UpDownState;

fn add_into(target: &mut Chain, other: &Chain, adds: &mut u64) -> Result<()> {
    if target.dim() != other.dim() {
        return Err(Error::DimensionMismatch { left: target.dim(), right: other.dim() });
    }
    target.xor_assign(other);
    *adds += 1;
    Ok(())
}

fn z_asc(pairs: &PairSet, id: PairId) -> &Chain {
    pairs.get(id).rep.z_asc.as_ref().expect("pair kind guarantees an ascending cycle")
}

fn z_desc(pairs: &PairSet, id: PairId) -> &Chain {
    pairs.get(id).rep.z_desc.as_ref().expect("pair kind guarantees a descending cycle")
}

/// Swaps the additions at ascending positions `q`, `q+1` and repairs the
/// representatives.
pub(crate) fn transpose_ascending(
    st: &mut UpDownState,
    pairs: &mut PairSet,
    q: usize,
    adds: &mut u64,
) -> Result<()> {
    let e = st.ascending()[q];
    let f = st.ascending()[q + 1];
    if st.cell(f).boundary.contains(e) {
        return Err(Error::IllegalOp(format!("cannot add {f} before its face {e}")));
    }
    let (fid, frole) = pairs
        .find(ArrowRef::add(f))
        .ok_or_else(|| Error::Invariant(format!("addition of {f} is unpaired")))?;
    let (eid, erole) = pairs
        .find(ArrowRef::add(e))
        .ok_or_else(|| Error::Invariant(format!("addition of {e} is unpaired")))?;
    if eid == fid {
        return Err(Error::IllegalOp(format!(
            "cannot move the addition of {f} before the addition of {e} of the same pair"
        )));
    }
    // The only chain a swap can break is the one created by the arrow moving
    // forward: the cycle of f's pair if f creates it, its spanning chain if
    // f destroys it.
    let broken = match frole {
        Role::Creator => z_asc(pairs, fid).contains(e),
        Role::Destroyer => pairs.get(fid).rep.spanning.contains(e),
    };
    st.swap_ascending(q);
    if !broken {
        return Ok(());
    }

    let rep_e = pairs.get(eid).rep.clone();
    let rep_f = pairs.get(fid).rep.clone();
    let kind_e = pairs.get(eid).kind();
    let kind_f = pairs.get(fid).kind();
    match (erole, frole) {
        (Role::Creator, Role::Creator) => {
            let keep = match (kind_e, kind_f) {
                (PairKind::ClosedOpen, PairKind::ClosedOpen) => {
                    st.uindex(pairs.get(eid).destroyer) < st.uindex(pairs.get(fid).destroyer)
                }
                (PairKind::ClosedClosed, PairKind::ClosedClosed) => {
                    st.uindex(pairs.get(eid).destroyer) > st.uindex(pairs.get(fid).destroyer)
                }
                (PairKind::ClosedOpen, PairKind::ClosedClosed) => true,
                (PairKind::ClosedClosed, PairKind::ClosedOpen) => false,
                _ => unreachable!("addition-created pairs are closed-open or closed-closed"),
            };
            if keep {
                let pf = pairs.get_mut(fid);
                add_into(pf.rep.z_asc.as_mut().unwrap(), rep_e.z_asc.as_ref().unwrap(), adds)?;
                add_into(&mut pf.rep.spanning, &rep_e.spanning, adds)?;
                if kind_e == PairKind::ClosedClosed && kind_f == PairKind::ClosedClosed {
                    add_into(
                        pf.rep.z_desc.as_mut().unwrap(),
                        rep_e.z_desc.as_ref().unwrap(),
                        adds,
                    )?;
                }
            } else {
                // Exchange destroyers: e's class continues into f's bar.
                let de = pairs.get(eid).destroyer;
                let df = pairs.get(fid).destroyer;
                pairs.set_arrows_many(&[(eid, ArrowRef::add(e), df), (fid, ArrowRef::add(f), de)]);
                let mut sum = rep_e.clone();
                add_into(sum.z_asc.as_mut().unwrap(), rep_f.z_asc.as_ref().unwrap(), adds)?;
                add_into(&mut sum.spanning, &rep_f.spanning, adds)?;
                // For two closed-closed pairs the descending cycles sum as
                // well; when only e's pair is closed-closed the sum keeps
                // e's descending cycle untouched.
                if kind_e == PairKind::ClosedClosed && kind_f == PairKind::ClosedClosed {
                    add_into(sum.z_desc.as_mut().unwrap(), rep_f.z_desc.as_ref().unwrap(), adds)?;
                }
                pairs.get_mut(eid).rep = rep_f;
                pairs.get_mut(fid).rep = sum;
            }
        }
        (Role::Destroyer, Role::Destroyer) => {
            // Both additions destroy closed-open bars; e sits in f's spanning
            // chain.
            let ge = pairs.get(eid).creator;
            let gf = pairs.get(fid).creator;
            if st.uindex(ge) < st.uindex(gf) {
                let pf = pairs.get_mut(fid);
                add_into(pf.rep.z_asc.as_mut().unwrap(), rep_e.z_asc.as_ref().unwrap(), adds)?;
                add_into(&mut pf.rep.spanning, &rep_e.spanning, adds)?;
            } else {
                pairs.set_arrows_many(&[(eid, gf, ArrowRef::add(e)), (fid, ge, ArrowRef::add(f))]);
                let mut sum = rep_e.clone();
                add_into(sum.z_asc.as_mut().unwrap(), rep_f.z_asc.as_ref().unwrap(), adds)?;
                add_into(&mut sum.spanning, &rep_f.spanning, adds)?;
                pairs.get_mut(eid).rep = rep_f;
                pairs.get_mut(fid).rep = sum;
            }
        }
        (Role::Destroyer, Role::Creator) => {
            // e destroys a closed-open bar and sits in the cycle f creates.
            // After the swap the roles flip: e takes over f's pair unchanged,
            // f closes e's bar with the old spanning chain patched by the
            // cycle.
            let ge = pairs.get(eid).creator;
            let xf = pairs.get(fid).destroyer;
            pairs.set_arrows_many(&[(eid, ge, ArrowRef::add(f)), (fid, ArrowRef::add(e), xf)]);
            let pe = pairs.get_mut(eid);
            add_into(&mut pe.rep.spanning, rep_f.z_asc.as_ref().unwrap(), adds)?;
        }
        (Role::Creator, Role::Destroyer) => {
            // The cycle e creates sits inside f's spanning chain; summing the
            // cycle into it removes e without moving any endpoint.
            let pf = pairs.get_mut(fid);
            add_into(&mut pf.rep.spanning, rep_e.z_asc.as_ref().unwrap(), adds)?;
        }
    }
    Ok(())
}

/// Swaps the deletions at descending positions `q`, `q+1` and repairs the
/// representatives.
pub(crate) fn transpose_descending(
    st: &mut UpDownState,
    pairs: &mut PairSet,
    q: usize,
    adds: &mut u64,
) -> Result<()> {
    let e = st.descending()[q];
    let f = st.descending()[q + 1];
    if st.cell(e).boundary.contains(f) {
        return Err(Error::IllegalOp(format!("cannot delete {f} before its coface {e}")));
    }
    let (eid, erole) = pairs
        .find(ArrowRef::del(e))
        .ok_or_else(|| Error::Invariant(format!("deletion of {e} is unpaired")))?;
    let (fid, frole) = pairs
        .find(ArrowRef::del(f))
        .ok_or_else(|| Error::Invariant(format!("deletion of {f} is unpaired")))?;
    if eid == fid {
        return Err(Error::IllegalOp(format!(
            "cannot move the deletion of {f} before the deletion of {e} of the same pair"
        )));
    }
    // Mirror image of the ascending case: the only breakable chain is the one
    // created by the arrow whose cell now dies later, i.e. e's.
    let broken = match erole {
        Role::Destroyer => z_desc(pairs, eid).contains(f),
        Role::Creator => pairs.get(eid).rep.spanning.contains(f),
    };
    st.swap_descending(q);
    if !broken {
        return Ok(());
    }

    let rep_e = pairs.get(eid).rep.clone();
    let rep_f = pairs.get(fid).rep.clone();
    let kind_e = pairs.get(eid).kind();
    let kind_f = pairs.get(fid).kind();
    match (erole, frole) {
        (Role::Destroyer, Role::Destroyer) => match (kind_e, kind_f) {
            (PairKind::ClosedClosed, PairKind::ClosedClosed) => {
                let ce = pairs.get(eid).creator;
                let cf = pairs.get(fid).creator;
                if st.uindex(cf) < st.uindex(ce) {
                    let pe = pairs.get_mut(eid);
                    add_into(pe.rep.z_asc.as_mut().unwrap(), rep_f.z_asc.as_ref().unwrap(), adds)?;
                    add_into(&mut pe.rep.spanning, &rep_f.spanning, adds)?;
                    add_into(
                        pe.rep.z_desc.as_mut().unwrap(),
                        rep_f.z_desc.as_ref().unwrap(),
                        adds,
                    )?;
                } else {
                    pairs.set_arrows_many(&[
                        (eid, ce, ArrowRef::del(f)),
                        (fid, cf, ArrowRef::del(e)),
                    ]);
                    let mut sum = rep_f.clone();
                    add_into(sum.z_asc.as_mut().unwrap(), rep_e.z_asc.as_ref().unwrap(), adds)?;
                    add_into(&mut sum.spanning, &rep_e.spanning, adds)?;
                    add_into(sum.z_desc.as_mut().unwrap(), rep_e.z_desc.as_ref().unwrap(), adds)?;
                    pairs.get_mut(eid).rep = rep_e;
                    pairs.get_mut(fid).rep = sum;
                }
            }
            (PairKind::ClosedClosed, PairKind::OpenClosed) => {
                // f's bar keeps everything; e's descending cycle absorbs it.
                let pe = pairs.get_mut(eid);
                add_into(&mut pe.rep.spanning, &rep_f.spanning, adds)?;
                add_into(pe.rep.z_desc.as_mut().unwrap(), rep_f.z_desc.as_ref().unwrap(), adds)?;
            }
            (PairKind::OpenClosed, PairKind::ClosedClosed) => {
                let ge = pairs.get(eid).creator;
                let cf = pairs.get(fid).creator;
                pairs.set_arrows_many(&[(eid, ge, ArrowRef::del(f)), (fid, cf, ArrowRef::del(e))]);
                let mut sum = rep_f.clone();
                add_into(&mut sum.spanning, &rep_e.spanning, adds)?;
                add_into(sum.z_desc.as_mut().unwrap(), rep_e.z_desc.as_ref().unwrap(), adds)?;
                pairs.get_mut(eid).rep = rep_e;
                pairs.get_mut(fid).rep = sum;
            }
            (PairKind::OpenClosed, PairKind::OpenClosed) => {
                let ge = pairs.get(eid).creator;
                let gf = pairs.get(fid).creator;
                if st.uindex(ge) < st.uindex(gf) {
                    let pe = pairs.get_mut(eid);
                    add_into(&mut pe.rep.spanning, &rep_f.spanning, adds)?;
                    add_into(
                        pe.rep.z_desc.as_mut().unwrap(),
                        rep_f.z_desc.as_ref().unwrap(),
                        adds,
                    )?;
                } else {
                    pairs.set_arrows_many(&[
                        (eid, ge, ArrowRef::del(f)),
                        (fid, gf, ArrowRef::del(e)),
                    ]);
                    let mut sum = rep_e.clone();
                    add_into(&mut sum.spanning, &rep_f.spanning, adds)?;
                    add_into(sum.z_desc.as_mut().unwrap(), rep_f.z_desc.as_ref().unwrap(), adds)?;
                    pairs.get_mut(eid).rep = rep_e;
                    pairs.get_mut(fid).rep = sum;
                }
            }
            _ => unreachable!("deletion-destroyed pairs are open-closed or closed-closed"),
        },
        (Role::Creator, Role::Creator) => {
            // Both deletions open bars; f sits in e's spanning chain.
            let de = pairs.get(eid).destroyer;
            let df = pairs.get(fid).destroyer;
            if st.uindex(de) < st.uindex(df) {
                let pe = pairs.get_mut(eid);
                add_into(&mut pe.rep.spanning, &rep_f.spanning, adds)?;
                add_into(pe.rep.z_desc.as_mut().unwrap(), rep_f.z_desc.as_ref().unwrap(), adds)?;
            } else {
                pairs.set_arrows_many(&[(eid, ArrowRef::del(e), df), (fid, ArrowRef::del(f), de)]);
                let mut sum = rep_e.clone();
                add_into(&mut sum.spanning, &rep_f.spanning, adds)?;
                add_into(sum.z_desc.as_mut().unwrap(), rep_f.z_desc.as_ref().unwrap(), adds)?;
                pairs.get_mut(eid).rep = sum;
                pairs.get_mut(fid).rep = rep_e;
            }
        }
        (Role::Creator, Role::Destroyer) => {
            // The cycle f's deletion creates sits inside e's spanning chain.
            let pe = pairs.get_mut(eid);
            add_into(&mut pe.rep.spanning, rep_f.z_desc.as_ref().unwrap(), adds)?;
        }
        (Role::Destroyer, Role::Creator) => {
            // Roles flip, mirroring the ascending case.
            let ce = pairs.get(eid).creator;
            let df = pairs.get(fid).destroyer;
            pairs.set_arrows_many(&[(eid, ce, ArrowRef::del(f)), (fid, ArrowRef::del(e), df)]);
            let pf = pairs.get_mut(fid);
            add_into(&mut pf.rep.spanning, rep_e.z_desc.as_ref().unwrap(), adds)?;
        }
    }
    Ok(())
}

fn check_adjacent(bundle: &Bundle, j: usize) -> Result<()> {
    if j + 1 >= bundle.filtration.len() {
        return Err(Error::IllegalOp(format!(
            "switch at {j} needs two arrows, filtration has {}",
            bundle.filtration.len()
        )));
    }
    Ok(())
}

/// Swaps two adjacent additions of the input filtration.
pub fn switch_forward(bundle: &mut Bundle, j: usize) -> Result<VineRecord> {
    check_adjacent(bundle, j)?;
    {
        let arrows = bundle.filtration.arrows();
        let (a, b) = (&arrows[j], &arrows[j + 1]);
        if a.dir != ArrowDir::Add || b.dir != ArrowDir::Add {
            return Err(Error::IllegalOp(format!("arrows {j}, {} are not both additions", j + 1)));
        }
        if a.simplex.is_face_of(&b.simplex) {
            return Err(Error::IllegalOp(format!(
                "cannot add {} before its face {}",
                b.simplex, a.simplex
            )));
        }
    }
    let before = bundle.pair_keys();
    let e = bundle
        .state
        .u_arrow_of_f(j)
        .ok_or_else(|| Error::Invariant(format!("arrow {j} missing from the up-down map")))?;
    let q = bundle.state.asc_pos(e.cell);
    transpose_ascending(&mut bundle.state, &mut bundle.pairs, q, &mut bundle.chain_adds)?;
    bundle.filtration.swap_arrows(j);
    Ok(vine(bundle, before, Vec::new(), None))
}

/// Swaps two adjacent deletions of the input filtration.
pub fn switch_backward(bundle: &mut Bundle, j: usize) -> Result<VineRecord> {
    check_adjacent(bundle, j)?;
    {
        let arrows = bundle.filtration.arrows();
        let (a, b) = (&arrows[j], &arrows[j + 1]);
        if a.dir != ArrowDir::Del || b.dir != ArrowDir::Del {
            return Err(Error::IllegalOp(format!("arrows {j}, {} are not both deletions", j + 1)));
        }
        if b.simplex.is_face_of(&a.simplex) {
            return Err(Error::IllegalOp(format!(
                "cannot delete {} before its coface {}",
                b.simplex, a.simplex
            )));
        }
    }
    let before = bundle.pair_keys();
    let e = bundle
        .state
        .u_arrow_of_f(j)
        .ok_or_else(|| Error::Invariant(format!("arrow {j} missing from the up-down map")))?;
    let q = bundle.state.desc_pos(e.cell);
    transpose_descending(&mut bundle.state, &mut bundle.pairs, q, &mut bundle.chain_adds)?;
    bundle.filtration.swap_arrows(j);
    Ok(vine(bundle, before, Vec::new(), None))
}

/// Swaps an adjacent addition/deletion pair of the input filtration; the
/// up-down filtration, the pairs and the representatives are unchanged.
pub fn switch_mixed(bundle: &mut Bundle, j: usize) -> Result<VineRecord> {
    check_adjacent(bundle, j)?;
    {
        let arrows = bundle.filtration.arrows();
        let (a, b) = (&arrows[j], &arrows[j + 1]);
        if a.dir == b.dir {
            return Err(Error::IllegalOp(format!(
                "arrows {j}, {} run in the same direction",
                j + 1
            )));
        }
        if a.simplex == b.simplex {
            return Err(Error::IllegalOp(format!(
                "cannot reorder the two arrows of {} at {j}",
                a.simplex
            )));
        }
    }
    let before = bundle.pair_keys();
    bundle.state.swap_f_arrows(j);
    bundle.filtration.swap_arrows(j);
    Ok(vine(bundle, before, Vec::new(), None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellmodel::{Arrow, CellId, Simplex, VertexId, ZigzagFiltration};
    use crate::oracle::fresh_f_barcode;
    use crate::reps::{f_barcode, u_barcode, Barcode};
    use crate::updates::Bundle;

    fn s(v: &[u32]) -> Simplex {
        Simplex::new(v.iter().map(|&x| VertexId(x)).collect()).unwrap()
    }

    fn filt(steps: &[(ArrowDir, &[u32])]) -> ZigzagFiltration {
        ZigzagFiltration::new(steps.iter().map(|(d, v)| Arrow { dir: *d, simplex: s(v) }).collect())
    }

    use ArrowDir::{Add, Del};

    fn fix_b() -> Bundle {
        Bundle::new(filt(&[
            (Add, &[0]),
            (Add, &[1]),
            (Add, &[0, 1]),
            (Del, &[0, 1]),
            (Del, &[1]),
            (Del, &[0]),
        ]))
        .unwrap()
    }

    fn fix_d() -> Bundle {
        Bundle::new(filt(&[
            (Add, &[0]),
            (Add, &[1]),
            (Add, &[0, 1]),
            (Del, &[0, 1]),
            (Add, &[2]),
            (Del, &[2]),
            (Del, &[1]),
            (Del, &[0]),
        ]))
        .unwrap()
    }

    fn bars(entries: &[(usize, usize, usize)]) -> Barcode {
        let mut out = Barcode::new();
        for &e in entries {
            *out.entry(e).or_insert(0) += 1;
        }
        out
    }

    #[test]
    fn forward_switch_exchanges_elder_bars() {
        let mut bundle = fix_b();
        let record = switch_forward(&mut bundle, 0).unwrap();
        bundle.validate().unwrap();
        assert_eq!(record.survivors.len(), 3);
        assert!(record.created.is_empty() && record.destroyed.is_empty());

        // The first vertex now closes the edge's bar, the second carries the
        // long component bar.
        let (u, v, uv) = (CellId(0), CellId(1), CellId(2));
        let (co, _) = bundle.pairs.find(ArrowRef::add(u)).unwrap();
        let co = bundle.pairs.get(co);
        assert_eq!(co.destroyer, ArrowRef::add(uv));
        assert_eq!(co.rep.z_asc.as_ref().unwrap().cells(), [u, v]);
        assert_eq!(co.rep.spanning.cells(), [uv]);
        let (cc, _) = bundle.pairs.find(ArrowRef::add(v)).unwrap();
        let cc = bundle.pairs.get(cc);
        assert_eq!(cc.destroyer, ArrowRef::del(u));
        assert_eq!(cc.rep.z_asc.as_ref().unwrap().cells(), [v]);
        assert_eq!(cc.rep.spanning.cells(), [uv]);
        assert_eq!(cc.rep.z_desc.as_ref().unwrap().cells(), [u]);

        let got = f_barcode(&bundle.state, &bundle.pairs).unwrap();
        assert_eq!(got, bars(&[(0, 1, 5), (0, 2, 2), (0, 4, 4)]));
        assert_eq!(got, fresh_f_barcode(&bundle.filtration).unwrap());
    }

    #[test]
    fn forward_switch_rejects_face_order() {
        let mut bundle = fix_b();
        assert!(switch_forward(&mut bundle, 1).is_err());
    }

    #[test]
    fn backward_switch_after_mixed_normalization() {
        let mut bundle = fix_d();
        switch_mixed(&mut bundle, 3).unwrap();
        let record = switch_backward(&mut bundle, 4).unwrap();
        bundle.validate().unwrap();
        assert_eq!(record.created.len() + record.destroyed.len(), 0);
        assert_eq!(
            f_barcode(&bundle.state, &bundle.pairs).unwrap(),
            fresh_f_barcode(&bundle.filtration).unwrap()
        );
    }

    #[test]
    fn backward_switch_rejects_coface_order() {
        let mut bundle = fix_b();
        assert!(switch_backward(&mut bundle, 3).is_err());
    }

    #[test]
    fn mixed_switch_permutes_input_barcode_only() {
        let mut bundle = fix_d();
        assert_eq!(
            f_barcode(&bundle.state, &bundle.pairs).unwrap(),
            bars(&[(0, 1, 7), (0, 2, 2), (0, 4, 6), (0, 5, 5)])
        );
        let persistent = u_barcode(&bundle.state, &bundle.pairs);

        switch_mixed(&mut bundle, 3).unwrap();
        bundle.validate().unwrap();
        assert_eq!(bundle.chain_adds, 0);
        assert_eq!(u_barcode(&bundle.state, &bundle.pairs), persistent);
        let got = f_barcode(&bundle.state, &bundle.pairs).unwrap();
        assert_eq!(got, bars(&[(0, 1, 7), (0, 2, 2), (0, 4, 5), (0, 5, 6)]));
        assert_eq!(got, fresh_f_barcode(&bundle.filtration).unwrap());
    }

    #[test]
    fn mixed_switch_rejects_shared_simplex() {
        let mut bundle = fix_b();
        assert!(switch_mixed(&mut bundle, 2).is_err());
    }
}
