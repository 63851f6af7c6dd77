//! From-scratch ground truth for up-down filtrations.
//!
//! Nothing in this module shares state with the incremental update
//! algorithms: ranks and barcodes are recomputed by plain GF(2) Gaussian
//! elimination over the complex as it currently stands.  [`ud_rank`] answers
//! a single interval-rank query straight from the definition,
//! [`ud_barcode_oracle`] assembles the whole barcode out of such ranks by
//! inclusion-exclusion, and [`initial_pairset`] builds a valid pairing with
//! representatives by column reduction, which is how a fresh bundle is
//! seeded before any updates run.

use std::collections::HashMap;

use crate::cellmodel::{CellId, Chain, ZigzagFiltration};
use crate::error::{Error, Result};
use crate::gf2::{BitVec, Echelon};
use crate::reps::{validate_pairset, Barcode, Pair, PairSet, Representative};
use crate::updown::{convert, ArrowRef, UpDownState};

/// Bit-index assignment for the cells of one dimension.
struct DimIndex {
    cells: Vec<CellId>,
    pos: HashMap<CellId, usize>,
}

impl DimIndex {
    fn empty() -> Self {
        DimIndex { cells: Vec::new(), pos: HashMap::new() }
    }

    fn from_cells(cells: Vec<CellId>) -> Self {
        let pos = cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        DimIndex { cells, pos }
    }

    fn width(&self) -> usize {
        self.cells.len()
    }

    fn to_bits(&self, chain: &Chain) -> BitVec {
        let mut v = BitVec::zeros(self.width());
        for &c in chain.cells() {
            v.set(self.pos[&c]);
        }
        v
    }

    fn to_chain(&self, bits: &BitVec, dim: usize) -> Chain {
        Chain::from_cells(dim, bits.ones().map(|i| self.cells[i]).collect())
    }
}

/// Cells of one dimension with bit order = addition order, so that the top
/// bit of a chain is its latest-added member.
fn asc_index(st: &UpDownState, dim: usize) -> DimIndex {
    let mut cells: Vec<CellId> = st.cell_ids().filter(|&c| st.cell(c).dim == dim).collect();
    cells.sort_by_key(|&c| st.asc_pos(c));
    DimIndex::from_cells(cells)
}

/// Cells of one dimension with bit order = reverse deletion order, so that
/// the top bit of a chain is its earliest-deleted member.
fn desc_index(st: &UpDownState, dim: usize) -> DimIndex {
    let mut cells: Vec<CellId> = st.cell_ids().filter(|&c| st.cell(c).dim == dim).collect();
    cells.sort_by_key(|&c| std::cmp::Reverse(st.desc_pos(c)));
    DimIndex::from_cells(cells)
}

fn below(st: &UpDownState, dim: usize, asc: bool) -> DimIndex {
    if dim == 0 {
        DimIndex::empty()
    } else if asc {
        asc_index(st, dim - 1)
    } else {
        desc_index(st, dim - 1)
    }
}

fn max_dim(st: &UpDownState) -> usize {
    st.cell_ids().map(|c| st.cell(c).dim).max().unwrap_or(0)
}

/// Echelon whose rows remember the chain combination that produced them.
struct ChainEchelon {
    by_pivot: Vec<Option<usize>>,
    rows: Vec<(BitVec, Chain)>,
}

impl ChainEchelon {
    fn new(width: usize) -> Self {
        ChainEchelon { by_pivot: vec![None; width], rows: Vec::new() }
    }

    fn reduce(&self, v: &mut BitVec, trail: &mut Chain) {
        while let Some(p) = v.top_bit() {
            match self.by_pivot[p] {
                Some(r) => {
                    v.xor_assign(&self.rows[r].0);
                    trail.xor_assign(&self.rows[r].1);
                }
                None => break,
            }
        }
    }

    fn insert(&mut self, v: BitVec, trail: Chain) {
        let p = v.top_bit().expect("inserting a zero row");
        debug_assert!(self.by_pivot[p].is_none());
        self.by_pivot[p] = Some(self.rows.len());
        self.rows.push((v, trail));
    }
}

/// Echelon whose rows carry a coefficient vector over another basis.
struct TagEchelon {
    by_pivot: Vec<Option<usize>>,
    rows: Vec<(BitVec, BitVec)>,
}

impl TagEchelon {
    fn new(width: usize) -> Self {
        TagEchelon { by_pivot: vec![None; width], rows: Vec::new() }
    }

    fn reduce(&self, v: &mut BitVec, tag: &mut BitVec) {
        while let Some(p) = v.top_bit() {
            match self.by_pivot[p] {
                Some(r) => {
                    v.xor_assign(&self.rows[r].0);
                    tag.xor_assign(&self.rows[r].1);
                }
                None => break,
            }
        }
    }

    fn insert(&mut self, v: BitVec, tag: BitVec) {
        let p = v.top_bit().expect("inserting a zero row");
        debug_assert!(self.by_pivot[p].is_none());
        self.by_pivot[p] = Some(self.rows.len());
        self.rows.push((v, tag));
    }
}

/// Reduces `v` against the union of a boundary echelon and a homology
/// echelon (their pivot sets are disjoint by construction), accumulating the
/// homology tags used.  One pass per echelon would be an incomplete
/// membership test: clearing a homology pivot can re-expose a boundary pivot
/// below it and vice versa.
fn reduce_mod_both(bnd: &ChainEchelon, homology: &TagEchelon, v: &mut BitVec, tag: &mut BitVec) {
    while let Some(p) = v.top_bit() {
        if let Some(r) = bnd.by_pivot[p] {
            v.xor_assign(&bnd.rows[r].0);
        } else if let Some(r) = homology.by_pivot[p] {
            v.xor_assign(&homology.rows[r].0);
            tag.xor_assign(&homology.rows[r].1);
        } else {
            break;
        }
    }
}

/// Outcome of reducing the boundary columns of one dimension.
struct Reduction {
    /// `(pivot cell, column cell, residual cycle, recorded combination)`:
    /// the column's boundary reduced to a nonzero chain whose top member is
    /// the pivot.
    pairs: Vec<(CellId, CellId, Chain, Chain)>,
    /// `(column cell, cycle)` of columns that reduced to zero, in processing
    /// order.
    cycles: Vec<(CellId, Chain)>,
}

/// Plain column reduction of all `dim`-cells, processed and bit-ordered as
/// given (addition order for the ascending pass, reverse deletion order for
/// the descending pass).
fn reduce_dimension(st: &UpDownState, cols: &DimIndex, rows: &DimIndex, dim: usize) -> Reduction {
    let mut ech = ChainEchelon::new(rows.width());
    let mut out = Reduction { pairs: Vec::new(), cycles: Vec::new() };
    for &cell in &cols.cells {
        let mut v = rows.to_bits(&st.cell(cell).boundary);
        let mut trail = Chain::singleton(dim, cell);
        ech.reduce(&mut v, &mut trail);
        match v.top_bit() {
            None => out.cycles.push((cell, trail)),
            Some(p) => {
                let z = rows.to_chain(&v, dim - 1);
                out.pairs.push((rows.cells[p], cell, z, trail.clone()));
                ech.insert(v, trail);
            }
        }
    }
    out
}

/// Builds a valid pairing with representatives for the current state by
/// three rounds of column reduction: one over the additions (closed-open
/// pairs), one over the deletions (open-closed pairs), and a matching of the
/// leftover essential cycles of both reductions (closed-closed pairs).
pub fn initial_pairset(st: &UpDownState) -> Result<PairSet> {
    let mut pairs = PairSet::new();
    let top = max_dim(st);

    // Survivors of each pass, keyed by dimension, in processing order.
    let mut asc_surv: Vec<Vec<(CellId, Chain)>> = vec![Vec::new(); top + 1];
    let mut desc_surv: Vec<Vec<(CellId, Chain)>> = vec![Vec::new(); top + 1];

    for dim in 0..=top {
        let cols = asc_index(st, dim);
        let red = reduce_dimension(st, &cols, &below(st, dim, true), dim);
        asc_surv[dim] = red.cycles;
        for (pivot, col, z, a) in red.pairs {
            asc_surv[dim - 1].retain(|(c, _)| *c != pivot);
            pairs.insert(Pair {
                creator: ArrowRef::add(pivot),
                destroyer: ArrowRef::add(col),
                rep: Representative::closed_open(z, a),
            })?;
        }

        let cols = desc_index(st, dim);
        let red = reduce_dimension(st, &cols, &below(st, dim, false), dim);
        desc_surv[dim] = red.cycles;
        for (pivot, col, z, a) in red.pairs {
            desc_surv[dim - 1].retain(|(c, _)| *c != pivot);
            pairs.insert(Pair {
                creator: ArrowRef::del(col),
                destroyer: ArrowRef::del(pivot),
                rep: Representative::open_closed(a, z),
            })?;
        }
    }

    // Match the essential cycles of the two passes dimension by dimension.
    for dim in 0..=top {
        let up = asc_surv[dim].clone();
        // Deletion order: earliest-deleted survivor first.
        let mut down = desc_surv[dim].clone();
        down.reverse();
        if up.len() != down.len() {
            return Err(Error::Invariant(format!(
                "{} ascending but {} descending essential cycles in dimension {dim}",
                up.len(),
                down.len()
            )));
        }
        let g = up.len();
        if g == 0 {
            continue;
        }

        let idx = asc_index(st, dim);
        // Boundary space of the full complex, with recorded preimages for
        // solving the spanning chains later.
        let above = asc_index(st, dim + 1);
        let mut bnd = ChainEchelon::new(idx.width());
        for &c in &above.cells {
            let mut v = idx.to_bits(&st.cell(c).boundary);
            let mut trail = Chain::singleton(dim + 1, c);
            bnd.reduce(&mut v, &mut trail);
            if !v.is_zero() {
                bnd.insert(v, trail);
            }
        }

        // Express each descending cycle over the ascending ones modulo
        // boundaries.
        let mut homology = TagEchelon::new(idx.width());
        for (i, (_, z)) in up.iter().enumerate() {
            let mut v = idx.to_bits(z);
            let mut tag = BitVec::zeros(g);
            tag.set(i);
            reduce_mod_both(&bnd, &homology, &mut v, &mut tag);
            if v.is_zero() {
                return Err(Error::Invariant(
                    "ascending essential cycles are not independent".into(),
                ));
            }
            homology.insert(v, tag);
        }
        let mut coef: Vec<BitVec> = Vec::with_capacity(g);
        let mut wchain: Vec<Chain> = Vec::with_capacity(g);
        for (_, w) in &down {
            let mut v = idx.to_bits(w);
            let mut tag = BitVec::zeros(g);
            reduce_mod_both(&bnd, &homology, &mut v, &mut tag);
            if !v.is_zero() {
                return Err(Error::Invariant(
                    "descending essential cycle misses the ascending span".into(),
                ));
            }
            coef.push(tag);
            wchain.push(w.clone());
        }

        // Right-to-left elimination: the column of the last-deleted survivor
        // picks the latest-created ascending cycle it still mentions, and
        // clears that cycle from all earlier-deleted columns (an
        // earlier-deleted chain may absorb a later-deleted one without
        // breaking its created-by condition).
        let mut matched = vec![usize::MAX; g];
        for j in (0..g).rev() {
            let pivot = coef[j]
                .top_bit()
                .ok_or_else(|| Error::Invariant("essential matching ran dry".into()))?;
            matched[j] = pivot;
            let (head, tail) = coef.split_at_mut(j);
            let cj = &tail[0];
            let (whead, wtail) = wchain.split_at_mut(j);
            for jp in 0..j {
                if head[jp].get(pivot) {
                    head[jp].xor_assign(cj);
                    whead[jp].xor_assign(&wtail[0]);
                }
            }
        }

        for j in 0..g {
            let mut z = Chain::empty(dim);
            for i in coef[j].ones() {
                z.xor_assign(&up[i].1);
            }
            // Spanning chain: solve boundary = ascending cycle + descending
            // cycle over the full complex.
            let mut target = idx.to_bits(&z);
            target.xor_assign(&idx.to_bits(&wchain[j]));
            let mut spanning = Chain::empty(dim + 1);
            bnd.reduce(&mut target, &mut spanning);
            if !target.is_zero() {
                return Err(Error::Invariant("matched essential cycles are not homologous".into()));
            }
            pairs.insert(Pair {
                creator: ArrowRef::add(up[matched[j]].0),
                destroyer: ArrowRef::del(down[j].0),
                rep: Representative::closed_closed(z, spanning, wchain[j].clone()),
            })?;
        }
    }

    validate_pairset(st, &pairs)?;
    Ok(pairs)
}

/// Cycle space of the complex reached after `x` arrows, as bit vectors over
/// the addition-ordered cells of dimension `p`.
fn cycle_space_at(st: &UpDownState, x: usize, p: usize, idx: &DimIndex) -> Vec<BitVec> {
    let present: std::collections::HashSet<CellId> = st.cells_at(x).into_iter().collect();
    let rows = below(st, p, true);
    let mut ech = TagEchelon::new(rows.width());
    let mut cycles = Vec::new();
    for (i, &cell) in idx.cells.iter().enumerate() {
        if !present.contains(&cell) {
            continue;
        }
        let mut v = rows.to_bits(&st.cell(cell).boundary);
        let mut tag = BitVec::zeros(idx.width());
        tag.set(i);
        ech.reduce(&mut v, &mut tag);
        if v.is_zero() {
            cycles.push(tag);
        } else {
            ech.insert(v, tag);
        }
    }
    cycles
}

/// Boundary space of the complex reached after `x` arrows, over the
/// addition-ordered cells of dimension `p`.
fn boundary_space_at(st: &UpDownState, x: usize, p: usize, idx: &DimIndex) -> Echelon {
    let present: std::collections::HashSet<CellId> = st.cells_at(x).into_iter().collect();
    let mut ech = Echelon::new(idx.width());
    for c in st.cell_ids() {
        if st.cell(c).dim == p + 1 && present.contains(&c) {
            ech.insert(idx.to_bits(&st.cell(c).boundary));
        }
    }
    ech
}

/// Number of degree-`p` bars of the up-down barcode containing `[i, j]`,
/// straight from the definition: the two complexes include into the one at
/// the turning point between them, and the bar count is the dimension of the
/// intersection of the two homology images there.
pub fn ud_rank(st: &UpDownState, i: usize, j: usize, p: usize) -> Result<usize> {
    let (n, m) = (st.n(), st.m());
    if i > j || j > m {
        return Err(Error::IllegalOp(format!("rank query [{i}, {j}] out of range for {m} arrows")));
    }
    let t = if j <= n {
        j
    } else if i >= n {
        i
    } else {
        n
    };
    let idx = asc_index(st, p);
    let vi = cycle_space_at(st, i, p, &idx);
    let vj = cycle_space_at(st, j, p, &idx);
    let bt = boundary_space_at(st, t, p, &idx);

    let with = |sets: &[&Vec<BitVec>]| {
        let mut e = bt.clone();
        for s in sets {
            for v in s.iter() {
                e.insert(v.clone());
            }
        }
        e.rank()
    };
    Ok(with(&[&vi]) + with(&[&vj]) - with(&[&vi, &vj]) - bt.rank())
}

/// Full table of interval ranks `r[i][j]` (zero above the diagonal's
/// mirror), computed in `O(m^3)` by sweeping one end of the interval while
/// the other is fixed.
fn rank_table(st: &UpDownState, p: usize) -> Vec<Vec<usize>> {
    let (n, m) = (st.n(), st.m());
    let idx = asc_index(st, p);

    // Ascending cycles become available one arrow after their latest cell;
    // the reduction of the full ascending pass hands them out in order.
    let asc_avail: Vec<(usize, BitVec)> = {
        let rows = below(st, p, true);
        let mut ech = TagEchelon::new(rows.width());
        let mut out = Vec::new();
        for (i, &cell) in idx.cells.iter().enumerate() {
            let mut v = rows.to_bits(&st.cell(cell).boundary);
            let mut tag = BitVec::zeros(idx.width());
            tag.set(i);
            ech.reduce(&mut v, &mut tag);
            if v.is_zero() {
                out.push((st.asc_pos(cell) + 1, tag));
            } else {
                ech.insert(v, tag);
            }
        }
        out
    };
    // Descending cycles stay available until their earliest-deleted cell
    // goes; the reverse-deletion reduction hands them out from the top down.
    let desc_avail: Vec<(usize, BitVec)> = {
        let cols = desc_index(st, p);
        let rows = below(st, p, false);
        let mut ech = TagEchelon::new(rows.width());
        let mut out = Vec::new();
        for &cell in &cols.cells {
            let mut v = rows.to_bits(&st.cell(cell).boundary);
            let mut tag = BitVec::zeros(idx.width());
            tag.set(idx.pos[&cell]);
            ech.reduce(&mut v, &mut tag);
            if v.is_zero() {
                out.push((n + st.desc_pos(cell), tag));
            } else {
                ech.insert(v, tag);
            }
        }
        out
    };

    let mut r = vec![vec![0usize; m + 1]; m + 1];

    // Both ends ascending: r(i, j) = dim(V_i + B_j) - dim B_j.
    let mut basc = Echelon::new(idx.width());
    for j in 0..=n {
        if j > 0 {
            let c = st.ascending()[j - 1];
            if st.cell(c).dim == p + 1 {
                basc.insert(idx.to_bits(&st.cell(c).boundary));
            }
        }
        let bj = basc.rank();
        let mut e = basc.clone();
        let mut next = 0;
        for (i, row) in r.iter_mut().enumerate().take(j + 1) {
            while next < asc_avail.len() && asc_avail[next].0 <= i {
                e.insert(asc_avail[next].1.clone());
                next += 1;
            }
            row[j] = e.rank() - bj;
        }
    }
    let bn = basc;
    let bn_rank = bn.rank();

    // Both ends descending: r(i, j) = dim(V_j + B_i) - dim B_i.
    let mut by_del: Vec<(usize, CellId)> =
        st.cell_ids().filter(|&c| st.cell(c).dim == p + 1).map(|c| (st.desc_pos(c), c)).collect();
    by_del.sort_unstable_by_key(|&(d, _)| std::cmp::Reverse(d));
    let mut bdesc = Echelon::new(idx.width());
    let mut next_cell = 0;
    for i in (n..=m).rev() {
        while next_cell < by_del.len() && by_del[next_cell].0 >= i - n {
            bdesc.insert(idx.to_bits(&st.cell(by_del[next_cell].1).boundary));
            next_cell += 1;
        }
        let bi = bdesc.rank();
        let mut e = bdesc.clone();
        let mut next = 0;
        for j in (i..=m).rev() {
            while next < desc_avail.len() && desc_avail[next].0 >= j {
                e.insert(desc_avail[next].1.clone());
                next += 1;
            }
            r[i][j] = e.rank() - bi;
        }
    }

    // One end on each side: meet at the apex.
    // dim(V_j + B_n) for the descending end, swept once.
    let mut vjb = vec![0usize; m + 1];
    {
        let mut e = bn.clone();
        let mut next = 0;
        for j in (n..=m).rev() {
            while next < desc_avail.len() && desc_avail[next].0 >= j {
                e.insert(desc_avail[next].1.clone());
                next += 1;
            }
            vjb[j] = e.rank();
        }
    }
    let mut ei = bn.clone();
    let mut nexti = 0;
    for (i, row) in r.iter_mut().enumerate().take(n) {
        while nexti < asc_avail.len() && asc_avail[nexti].0 <= i {
            ei.insert(asc_avail[nexti].1.clone());
            nexti += 1;
        }
        let vib = ei.rank();
        let mut f = ei.clone();
        let mut nextj = 0;
        for j in ((n + 1)..=m).rev() {
            while nextj < desc_avail.len() && desc_avail[nextj].0 >= j {
                f.insert(desc_avail[nextj].1.clone());
                nextj += 1;
            }
            row[j] = vib + vjb[j] - f.rank() - bn_rank;
        }
    }

    r
}

/// Barcode of the up-down filtration by inclusion-exclusion over interval
/// ranks.
pub fn ud_barcode_oracle(st: &UpDownState) -> Result<Barcode> {
    let m = st.m();
    let mut bars = Barcode::new();
    if m == 0 {
        return Ok(bars);
    }
    for p in 0..=max_dim(st) {
        let r = rank_table(st, p);
        for b in 1..m {
            for d in b..m {
                let keep = r[b][d] + r[b - 1][d + 1];
                let cut = r[b - 1][d] + r[b][d + 1];
                if keep < cut {
                    return Err(Error::Invariant(format!(
                        "negative bar multiplicity at ({p}, {b}, {d})"
                    )));
                }
                if keep > cut {
                    bars.insert((p, b, d), keep - cut);
                }
            }
        }
    }
    Ok(bars)
}

/// Barcode of an input filtration computed entirely from scratch: convert,
/// reduce, and map the pairs back through the arrow correspondence.
pub fn fresh_f_barcode(f: &ZigzagFiltration) -> Result<Barcode> {
    let st = convert(f)?;
    let pairs = initial_pairset(&st)?;
    crate::reps::f_barcode(&st, &pairs)
}
