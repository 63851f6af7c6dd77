//! Cells, mod-2 chains, and zigzag filtrations.
//!
//! A filtration is a sequence of single-simplex additions and deletions over
//! an abstract simplicial complex, starting and ending empty.  Because a
//! simplex may be added, deleted, and added again, the converted complex
//! works with *cells*: abstract chain-complex generators identified by a
//! [`CellId`], each carrying a dimension and a boundary chain.  Two cells may
//! be parallel copies of the same simplex, and synthetic cells (see
//! [`CellLabel::Chi`]) need not correspond to any simplex at all.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// Vertex of the ambient complex.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VertexId(pub u32);

/// Non-empty vertex set, kept sorted ascending.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex(Vec<VertexId>);

impl Simplex {
    /// Builds a simplex from distinct vertices in any order.
    pub fn new(mut vertices: Vec<VertexId>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::IllegalOp("simplex needs at least one vertex".into()));
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::IllegalOp(format!(
                "simplex has repeated vertex {}",
                vertices.windows(2).find(|w| w[0] == w[1]).unwrap()[0].0
            )));
        }
        Ok(Simplex(vertices))
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    /// Codimension-one faces; empty for vertices.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = self.0.len();
        (0..n).filter(move |_| n > 1).map(move |skip| {
            let mut v = Vec::with_capacity(n - 1);
            v.extend(self.0.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, x)| *x));
            Simplex(v)
        })
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        // Both sorted: subset test by merge walk.
        let mut it = other.0.iter();
        self.0.iter().all(|v| it.any(|w| w == v))
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", v.0)?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Identifier of a cell inside one converted state.  Ids are never reused.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CellId(pub usize);

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// What a cell stands for.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CellLabel {
    /// A copy of a simplex from the original filtration.
    Simplex(Simplex),
    /// Synthetic cell bridging two parallel copies of the same simplex;
    /// only alive inside outward expansions/contractions.
    Chi,
}

/// Abstract chain-complex generator.
#[derive(Clone, Debug)]
pub struct Cell {
    pub dim: usize,
    /// Boundary chain of dimension `dim - 1`; empty for vertices.
    pub boundary: Chain,
    pub label: CellLabel,
}

/// Mod-2 chain: a set of cells of one dimension.  Support is kept sorted.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Chain {
    dim: usize,
    cells: Vec<CellId>,
}

impl Chain {
    pub fn empty(dim: usize) -> Self {
        Chain { dim, cells: Vec::new() }
    }

    pub fn singleton(dim: usize, cell: CellId) -> Self {
        Chain { dim, cells: vec![cell] }
    }

    /// Mod-2 sum of the given cells (an even number of repeats cancels).
    pub fn from_cells(dim: usize, mut cells: Vec<CellId>) -> Self {
        cells.sort_unstable();
        let mut out = Vec::with_capacity(cells.len());
        let mut i = 0;
        while i < cells.len() {
            let mut j = i + 1;
            while j < cells.len() && cells[j] == cells[i] {
                j += 1;
            }
            if (j - i) % 2 == 1 {
                out.push(cells[i]);
            }
            i = j;
        }
        Chain { dim, cells: out }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> &[CellId] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, cell: CellId) -> bool {
        self.cells.binary_search(&cell).is_ok()
    }

    /// Flips one cell in or out.
    pub fn toggle(&mut self, cell: CellId) {
        match self.cells.binary_search(&cell) {
            Ok(i) => {
                self.cells.remove(i);
            }
            Err(i) => self.cells.insert(i, cell),
        }
    }

    /// Unchecked mod-2 sum; callers guarantee equal dimensions.
    pub(crate) fn xor_assign(&mut self, other: &Chain) {
        debug_assert_eq!(self.dim, other.dim, "chain xor across dimensions");
        let mut merged = Vec::with_capacity(self.cells.len() + other.cells.len());
        let (a, b) = (&self.cells, &other.cells);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    merged.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    merged.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        merged.extend_from_slice(&a[i..]);
        merged.extend_from_slice(&b[j..]);
        self.cells = merged;
    }
}

impl fmt::Debug for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}d:", self.dim)?;
        for c in &self.cells {
            write!(f, " {}", c.0)?;
        }
        write!(f, "]")
    }
}

/// Checked mod-2 sum of two chains of equal dimension.
pub fn chain_add(a: &Chain, b: &Chain) -> Result<Chain> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { left: a.dim, right: b.dim });
    }
    let mut out = a.clone();
    out.xor_assign(b);
    Ok(out)
}

/// Boundary of a chain of dimension >= 1, given a boundary lookup per cell.
pub fn chain_boundary(c: &Chain, boundary_of: impl Fn(CellId) -> Chain) -> Result<Chain> {
    if c.dim == 0 {
        return Err(Error::IllegalOp("boundary of a 0-chain".into()));
    }
    let mut out = Chain::empty(c.dim - 1);
    for &cell in c.cells() {
        out.xor_assign(&boundary_of(cell));
    }
    Ok(out)
}

/// Direction of a filtration arrow.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ArrowDir {
    Add,
    Del,
}

/// One step of a zigzag filtration.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Arrow {
    pub dir: ArrowDir,
    pub simplex: Simplex,
}

/// Sequence of single-simplex additions and deletions, starting and ending
/// with the empty complex.
#[derive(Clone, Default, Debug)]
pub struct ZigzagFiltration {
    arrows: Vec<Arrow>,
}

impl ZigzagFiltration {
    pub fn new(arrows: Vec<Arrow>) -> Self {
        ZigzagFiltration { arrows }
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn arrow(&self, i: usize) -> Option<&Arrow> {
        self.arrows.get(i)
    }

    pub(crate) fn splice(&mut self, at: usize, remove: usize, insert: Vec<Arrow>) {
        self.arrows.splice(at..at + remove, insert);
    }

    pub(crate) fn swap_arrows(&mut self, i: usize) {
        self.arrows.swap(i, i + 1);
    }

    /// Simplices present after the first `i` arrows.
    pub fn complex_at(&self, i: usize) -> HashSet<Simplex> {
        let mut present = HashSet::new();
        for a in &self.arrows[..i] {
            match a.dir {
                ArrowDir::Add => present.insert(a.simplex.clone()),
                ArrowDir::Del => present.remove(&a.simplex),
            };
        }
        present
    }
}

/// Checks presence and face closure at every step, and that the filtration
/// ends empty.
pub fn validate_filtration(f: &ZigzagFiltration) -> Result<()> {
    let mut present: HashSet<Simplex> = HashSet::new();
    for (index, a) in f.arrows.iter().enumerate() {
        match a.dir {
            ArrowDir::Add => {
                if present.contains(&a.simplex) {
                    return Err(Error::InvalidFiltration {
                        index,
                        reason: format!("{} added while present", a.simplex),
                    });
                }
                for facet in a.simplex.facets() {
                    if !present.contains(&facet) {
                        return Err(Error::InvalidFiltration {
                            index,
                            reason: format!("{} added without facet {}", a.simplex, facet),
                        });
                    }
                }
                present.insert(a.simplex.clone());
            }
            ArrowDir::Del => {
                if !present.contains(&a.simplex) {
                    return Err(Error::InvalidFiltration {
                        index,
                        reason: format!("{} deleted while absent", a.simplex),
                    });
                }
                if let Some(cofacet) = present
                    .iter()
                    .find(|t| t.dim() == a.simplex.dim() + 1 && a.simplex.is_face_of(t))
                {
                    return Err(Error::InvalidFiltration {
                        index,
                        reason: format!("{} deleted under cofacet {}", a.simplex, cofacet),
                    });
                }
                present.remove(&a.simplex);
            }
        }
    }
    if !present.is_empty() {
        return Err(Error::InvalidFiltration {
            index: f.arrows.len(),
            reason: format!("filtration ends with {} simplices present", present.len()),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(v: &[u32]) -> Simplex {
        Simplex::new(v.iter().map(|&x| VertexId(x)).collect()).unwrap()
    }

    fn filt(steps: &[(ArrowDir, &[u32])]) -> ZigzagFiltration {
        ZigzagFiltration::new(steps.iter().map(|(d, v)| Arrow { dir: *d, simplex: s(v) }).collect())
    }

    use ArrowDir::{Add, Del};

    #[test]
    fn simplex_rejects_duplicates_and_empty() {
        assert!(Simplex::new(vec![]).is_err());
        assert!(Simplex::new(vec![VertexId(1), VertexId(1)]).is_err());
        let t = s(&[2, 0, 1]);
        assert_eq!(t.vertices(), &[VertexId(0), VertexId(1), VertexId(2)]);
    }

    #[test]
    fn facets_of_triangle() {
        let t = s(&[0, 1, 2]);
        let facets: Vec<_> = t.facets().collect();
        assert_eq!(facets, vec![s(&[1, 2]), s(&[0, 2]), s(&[0, 1])]);
        assert!(s(&[0]).facets().next().is_none());
        assert!(s(&[0, 1]).is_face_of(&t));
        assert!(!s(&[0, 3]).is_face_of(&t));
    }

    #[test]
    fn chain_add_checks_dimension() {
        let a = Chain::singleton(0, CellId(1));
        let b = Chain::singleton(1, CellId(2));
        assert!(matches!(chain_add(&a, &b), Err(Error::DimensionMismatch { left: 0, right: 1 })));
    }

    #[test]
    fn chain_from_cells_cancels_pairs() {
        let c = Chain::from_cells(1, vec![CellId(3), CellId(1), CellId(3), CellId(2)]);
        assert_eq!(c.cells(), &[CellId(1), CellId(2)]);
    }

    #[test]
    fn valid_fixture_filtrations() {
        // (+u, -u)
        let fix_a = filt(&[(Add, &[0]), (Del, &[0])]);
        // (+u, +v, +uv, -uv, -v, -u)
        let fix_b = filt(&[
            (Add, &[0]),
            (Add, &[1]),
            (Add, &[0, 1]),
            (Del, &[0, 1]),
            (Del, &[1]),
            (Del, &[0]),
        ]);
        // (+u, +v, -v, +v, -v, -u): re-addition of the same simplex
        let fix_e =
            filt(&[(Add, &[0]), (Add, &[1]), (Del, &[1]), (Add, &[1]), (Del, &[1]), (Del, &[0])]);
        validate_filtration(&fix_a).unwrap();
        validate_filtration(&fix_b).unwrap();
        validate_filtration(&fix_e).unwrap();
    }

    #[test]
    fn invalid_filtrations_are_rejected() {
        let missing_facet = filt(&[(Add, &[0]), (Add, &[0, 1])]);
        assert!(matches!(
            validate_filtration(&missing_facet),
            Err(Error::InvalidFiltration { index: 1, .. })
        ));

        let double_add = filt(&[(Add, &[0]), (Add, &[0])]);
        assert!(matches!(
            validate_filtration(&double_add),
            Err(Error::InvalidFiltration { index: 1, .. })
        ));

        let delete_absent = filt(&[(Add, &[0]), (Del, &[1])]);
        assert!(matches!(
            validate_filtration(&delete_absent),
            Err(Error::InvalidFiltration { index: 1, .. })
        ));

        let delete_under_cofacet = filt(&[(Add, &[0]), (Add, &[1]), (Add, &[0, 1]), (Del, &[0])]);
        assert!(matches!(
            validate_filtration(&delete_under_cofacet),
            Err(Error::InvalidFiltration { index: 3, .. })
        ));

        let never_ends = filt(&[(Add, &[0])]);
        assert!(matches!(
            validate_filtration(&never_ends),
            Err(Error::InvalidFiltration { index: 1, .. })
        ));
    }

    fn arb_chain(dim: usize) -> impl Strategy<Value = Chain> {
        proptest::collection::vec(0usize..12, 0..8)
            .prop_map(move |ids| Chain::from_cells(dim, ids.into_iter().map(CellId).collect()))
    }

    proptest! {
        // Chains under mod-2 sum form an abelian group with every element
        // its own inverse.
        #[test]
        fn chain_sum_group_laws(a in arb_chain(1), b in arb_chain(1), c in arb_chain(1)) {
            let ab = chain_add(&a, &b).unwrap();
            let ba = chain_add(&b, &a).unwrap();
            prop_assert_eq!(&ab, &ba);
            let ab_c = chain_add(&ab, &c).unwrap();
            let a_bc = chain_add(&a, &chain_add(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(&ab_c, &a_bc);
            let aa = chain_add(&a, &a).unwrap();
            prop_assert!(aa.is_empty());
            prop_assert_eq!(chain_add(&a, &Chain::empty(1)).unwrap(), a);
        }
    }
}
