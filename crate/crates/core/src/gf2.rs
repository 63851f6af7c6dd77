//! Minimal dense GF(2) vectors and row-echelon bases.

#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) struct BitVec {
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(width: usize) -> Self {
        BitVec { words: vec![0; width.div_ceil(64)] }
    }

    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.words.len(), other.words.len());
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    /// Index of the highest set bit.
    pub fn top_bit(&self) -> Option<usize> {
        for (k, w) in self.words.iter().enumerate().rev() {
            if *w != 0 {
                return Some(k * 64 + 63 - w.leading_zeros() as usize);
            }
        }
        None
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, w)| {
            let mut w = *w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + b)
                }
            })
        })
    }
}

/// Echelon basis keyed by highest set bit; rows are reduced against each
/// other only as far as needed for rank and membership tests.
#[derive(Clone, Debug)]
pub(crate) struct Echelon {
    rows: Vec<BitVec>,
    by_pivot: Vec<Option<usize>>,
}

impl Echelon {
    pub fn new(width: usize) -> Self {
        Echelon { rows: Vec::new(), by_pivot: vec![None; width] }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis in place.
    pub fn reduce(&self, v: &mut BitVec) {
        while let Some(p) = v.top_bit() {
            match self.by_pivot[p] {
                Some(r) => v.xor_assign(&self.rows[r]),
                None => break,
            }
        }
    }

    /// Reduce-and-insert; returns whether the rank grew.
    pub fn insert(&mut self, mut v: BitVec) -> bool {
        self.reduce(&mut v);
        match v.top_bit() {
            Some(p) => {
                self.by_pivot[p] = Some(self.rows.len());
                self.rows.push(v);
                true
            }
            None => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(width: usize, bits: &[usize]) -> BitVec {
        let mut v = BitVec::zeros(width);
        for &b in bits {
            v.set(b);
        }
        v
    }

    #[test]
    fn bitvec_basics() {
        let mut v = bv(130, &[0, 64, 129]);
        assert_eq!(v.top_bit(), Some(129));
        assert!(v.get(64) && !v.get(63));
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![0, 64, 129]);
        v.xor_assign(&bv(130, &[129]));
        assert_eq!(v.top_bit(), Some(64));
    }

    #[test]
    fn echelon_rank_and_membership() {
        let mut e = Echelon::new(8);
        assert!(e.insert(bv(8, &[0, 1])));
        assert!(e.insert(bv(8, &[1, 2])));
        assert!(!e.insert(bv(8, &[0, 2])));
        assert_eq!(e.rank(), 2);
        let mut probe = bv(8, &[0, 2]);
        e.reduce(&mut probe);
        assert!(probe.is_zero());
        let mut outside = bv(8, &[0]);
        e.reduce(&mut outside);
        assert!(!outside.is_zero());
    }
}
