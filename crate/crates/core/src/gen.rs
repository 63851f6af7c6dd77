//! Seeded random generation of valid zigzag filtrations and of legal edit
//! operations on them.
//!
//! Everything here is deterministic for a fixed RNG stream: candidate sets
//! are enumerated in sorted order before a uniform pick, so the same seed
//! always yields the same filtration and the same op schedule.

use std::collections::BTreeSet;

use rand::Rng;

use crate::cellmodel::{Arrow, ArrowDir, Simplex, VertexId, ZigzagFiltration};
use crate::updates::UpdateOp;

fn splx(vertices: &[u32]) -> Simplex {
    Simplex::new(vertices.iter().map(|&v| VertexId(v)).collect())
        .expect("generator vertex lists are distinct")
}

/// Simplices addable to `complex`: absent, all facets present, dimension
/// within `max_dim`, vertices drawn from `0..vertices`.
fn addable(complex: &BTreeSet<Simplex>, vertices: u32, max_dim: usize) -> Vec<Simplex> {
    let mut out = Vec::new();
    for v in 0..vertices {
        let s = splx(&[v]);
        if !complex.contains(&s) {
            out.push(s);
        }
    }
    if max_dim == 0 {
        return out;
    }
    let present: Vec<u32> = (0..vertices).filter(|&v| complex.contains(&splx(&[v]))).collect();
    for (i, &u) in present.iter().enumerate() {
        for &v in &present[i + 1..] {
            let s = splx(&[u, v]);
            if !complex.contains(&s) {
                out.push(s);
            }
        }
    }
    if max_dim == 1 {
        return out;
    }
    for (i, &u) in present.iter().enumerate() {
        for (j, &v) in present.iter().enumerate().skip(i + 1) {
            for &w in &present[j + 1..] {
                if complex.contains(&splx(&[u, v]))
                    && complex.contains(&splx(&[u, w]))
                    && complex.contains(&splx(&[v, w]))
                {
                    let s = splx(&[u, v, w]);
                    if !complex.contains(&s) {
                        out.push(s);
                    }
                }
            }
        }
    }
    out
}

/// Simplices removable from `complex`: present with no present coface.
/// Because generated complexes are closed under faces, checking cofaces one
/// dimension up suffices.
fn removable(complex: &BTreeSet<Simplex>) -> Vec<Simplex> {
    complex
        .iter()
        .filter(|s| !complex.iter().any(|t| t.dim() == s.dim() + 1 && s.is_face_of(t)))
        .cloned()
        .collect()
}

/// Complex reached after each prefix of the filtration; entry `i` is the
/// state between arrows `i - 1` and `i`, so the vector has `m + 1` entries.
pub fn prefix_complexes(f: &ZigzagFiltration) -> Vec<BTreeSet<Simplex>> {
    let mut states = Vec::with_capacity(f.len() + 1);
    let mut complex: BTreeSet<Simplex> = BTreeSet::new();
    states.push(complex.clone());
    for arrow in f.arrows() {
        match arrow.dir {
            ArrowDir::Add => complex.insert(arrow.simplex.clone()),
            ArrowDir::Del => complex.remove(&arrow.simplex),
        };
        states.push(complex.clone());
    }
    states
}

/// Source of random valid zigzag filtrations.
#[derive(Clone, Copy, Debug)]
pub struct FiltrationGen {
    /// Arrow count; odd values round up since every added cell must die.
    pub arrows: usize,
    /// Largest simplex dimension to generate (at most 2 is exercised here).
    pub max_dim: usize,
    /// Vertex labels are drawn from `0..vertices`.
    pub vertices: u32,
}

impl FiltrationGen {
    /// Defaults tuned for a target arrow count: dimension up to 2 and a
    /// vertex pool that leaves room for edges and triangles.
    pub fn with_len(arrows: usize) -> Self {
        FiltrationGen { arrows, max_dim: 2, vertices: (arrows / 4).clamp(4, 12) as u32 }
    }

    /// Draws one valid filtration: every addition has its facets present,
    /// every deletion removes a maximal simplex, and the complex is empty at
    /// both ends.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> ZigzagFiltration {
        let m = self.arrows + self.arrows % 2;
        let bias = rng.gen_range(0.45..=0.70);
        let mut complex: BTreeSet<Simplex> = BTreeSet::new();
        let mut arrows = Vec::with_capacity(m);
        for step in 0..m {
            let remaining = m - step;
            let grow = if complex.len() == remaining {
                false
            } else if complex.is_empty() {
                true
            } else {
                rng.gen_bool(bias)
            };
            if grow {
                let cands = addable(&complex, self.vertices, self.max_dim);
                if !cands.is_empty() {
                    let s = cands[rng.gen_range(0..cands.len())].clone();
                    complex.insert(s.clone());
                    arrows.push(Arrow { dir: ArrowDir::Add, simplex: s });
                    continue;
                }
                // Pool exhausted: fall through to a deletion.
            }
            let cands = removable(&complex);
            let s = cands[rng.gen_range(0..cands.len())].clone();
            complex.remove(&s);
            arrows.push(Arrow { dir: ArrowDir::Del, simplex: s });
        }
        ZigzagFiltration::new(arrows)
    }
}

/// The seven concrete edit flavors (switches split by arrow directions).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OpKind {
    SwitchForward,
    SwitchBackward,
    SwitchMixed,
    ExpandIn,
    ContractIn,
    ExpandOut,
    ContractOut,
}

impl OpKind {
    pub const ALL: [OpKind; 7] = [
        OpKind::SwitchForward,
        OpKind::SwitchBackward,
        OpKind::SwitchMixed,
        OpKind::ExpandIn,
        OpKind::ContractIn,
        OpKind::ExpandOut,
        OpKind::ContractOut,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OpKind::SwitchForward => "switch-forward",
            OpKind::SwitchBackward => "switch-backward",
            OpKind::SwitchMixed => "switch-mixed",
            OpKind::ExpandIn => "expand-in",
            OpKind::ContractIn => "contract-in",
            OpKind::ExpandOut => "expand-out",
            OpKind::ContractOut => "contract-out",
        }
    }

    /// Does applying this kind lengthen the filtration?
    fn grows(self) -> bool {
        matches!(self, OpKind::ExpandIn | OpKind::ExpandOut)
    }
}

/// Classifies position `j` as a legal switch flavor, if it is one.
fn switch_kind(f: &ZigzagFiltration, j: usize) -> Option<OpKind> {
    let arrows = f.arrows();
    let (a, b) = (&arrows[j], &arrows[j + 1]);
    match (a.dir, b.dir) {
        (ArrowDir::Add, ArrowDir::Add) => {
            (!a.simplex.is_face_of(&b.simplex)).then_some(OpKind::SwitchForward)
        }
        (ArrowDir::Del, ArrowDir::Del) => {
            (!b.simplex.is_face_of(&a.simplex)).then_some(OpKind::SwitchBackward)
        }
        _ => (a.simplex != b.simplex).then_some(OpKind::SwitchMixed),
    }
}

/// Source of random legal edit operations for a given filtration.
#[derive(Clone, Copy, Debug)]
pub struct OpGen {
    /// Largest simplex dimension inward expansions may introduce.
    pub max_dim: usize,
    /// Vertex pool for inward expansions.
    pub vertices: u32,
    /// Expansions are withheld once the filtration reaches this length.
    pub max_len: usize,
}

impl OpGen {
    pub fn new(vertices: u32, max_dim: usize, max_len: usize) -> Self {
        OpGen { max_dim, vertices, max_len }
    }

    /// Draws a legal op of any kind, trying kinds in random order so rare
    /// patterns (adjacent delete–add pairs, say) are taken when available.
    /// Returns `None` only when no edit at all is legal.
    pub fn sample<R: Rng>(&self, f: &ZigzagFiltration, rng: &mut R) -> Option<UpdateOp> {
        let mut kinds: Vec<OpKind> =
            OpKind::ALL.into_iter().filter(|k| !k.grows() || f.len() + 2 <= self.max_len).collect();
        while !kinds.is_empty() {
            let kind = kinds.swap_remove(rng.gen_range(0..kinds.len()));
            if let Some(op) = self.sample_kind(f, kind, rng) {
                return Some(op);
            }
        }
        None
    }

    /// Draws a legal op of one specific kind, or `None` if the filtration
    /// admits no such edit.
    pub fn sample_kind<R: Rng>(
        &self,
        f: &ZigzagFiltration,
        kind: OpKind,
        rng: &mut R,
    ) -> Option<UpdateOp> {
        let m = f.len();
        match kind {
            OpKind::SwitchForward | OpKind::SwitchBackward | OpKind::SwitchMixed => {
                let cands: Vec<usize> =
                    (0..m.saturating_sub(1)).filter(|&j| switch_kind(f, j) == Some(kind)).collect();
                pick(cands, rng).map(UpdateOp::Switch)
            }
            OpKind::ExpandIn => {
                let mut cands = Vec::new();
                for (i, complex) in prefix_complexes(f).into_iter().enumerate() {
                    for s in addable(&complex, self.vertices, self.max_dim) {
                        cands.push((i, s));
                    }
                }
                pick(cands, rng).map(|(i, s)| UpdateOp::ExpandIn(i, s))
            }
            OpKind::ContractIn => {
                let cands = adjacent_pairs(f, ArrowDir::Add, ArrowDir::Del);
                pick(cands, rng).map(UpdateOp::ContractIn)
            }
            OpKind::ExpandOut => {
                let mut cands = Vec::new();
                for (i, complex) in prefix_complexes(f).into_iter().enumerate() {
                    if i == 0 || i == m {
                        continue; // nothing is alive at the empty ends
                    }
                    for s in removable(&complex) {
                        cands.push((i, s));
                    }
                }
                pick(cands, rng).map(|(i, s)| UpdateOp::ExpandOut(i, s))
            }
            OpKind::ContractOut => {
                let cands = adjacent_pairs(f, ArrowDir::Del, ArrowDir::Add);
                pick(cands, rng).map(UpdateOp::ContractOut)
            }
        }
    }
}

/// Positions `i` where arrow `i` has direction `first`, arrow `i + 1` has
/// direction `second`, and both move the same simplex.
fn adjacent_pairs(f: &ZigzagFiltration, first: ArrowDir, second: ArrowDir) -> Vec<usize> {
    let arrows = f.arrows();
    (0..arrows.len().saturating_sub(1))
        .filter(|&i| {
            arrows[i].dir == first
                && arrows[i + 1].dir == second
                && arrows[i].simplex == arrows[i + 1].simplex
        })
        .collect()
}

fn pick<T, R: Rng>(cands: Vec<T>, rng: &mut R) -> Option<T> {
    if cands.is_empty() {
        None
    } else {
        let i = rng.gen_range(0..cands.len());
        Some(cands.into_iter().nth(i).expect("index in range"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::updates::{apply_op, Bundle};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sampled_filtrations_are_valid_and_sized() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for target in [0, 2, 8, 17, 40] {
            for _ in 0..20 {
                let f = FiltrationGen::with_len(target).sample(&mut rng);
                assert_eq!(f.len(), target + target % 2);
                let bundle = Bundle::new(f).unwrap();
                bundle.validate().unwrap();
            }
        }
    }

    #[test]
    fn sampled_ops_apply_cleanly() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for round in 0..15 {
            let gen = FiltrationGen::with_len(10 + 2 * round);
            let mut bundle = Bundle::new(gen.sample(&mut rng)).unwrap();
            let ops = OpGen::new(gen.vertices, gen.max_dim, gen.arrows + 16);
            for _ in 0..20 {
                let op = ops.sample(&bundle.filtration, &mut rng).expect("some op is legal");
                apply_op(&mut bundle, &op).unwrap_or_else(|e| panic!("{op} rejected: {e}"));
            }
            bundle.validate().unwrap();
        }
    }

    #[test]
    fn kind_specific_sampling_honors_the_kind() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let gen = FiltrationGen::with_len(24);
        let ops = OpGen::new(gen.vertices, gen.max_dim, 64);
        let mut seen = [false; 7];
        for _ in 0..40 {
            let f = gen.sample(&mut rng);
            for (slot, kind) in OpKind::ALL.into_iter().enumerate() {
                let Some(op) = ops.sample_kind(&f, kind, &mut rng) else {
                    continue;
                };
                seen[slot] = true;
                let fits = matches!(
                    (kind, &op),
                    (OpKind::SwitchForward, UpdateOp::Switch(_))
                        | (OpKind::SwitchBackward, UpdateOp::Switch(_))
                        | (OpKind::SwitchMixed, UpdateOp::Switch(_))
                        | (OpKind::ExpandIn, UpdateOp::ExpandIn(..))
                        | (OpKind::ContractIn, UpdateOp::ContractIn(_))
                        | (OpKind::ExpandOut, UpdateOp::ExpandOut(..))
                        | (OpKind::ContractOut, UpdateOp::ContractOut(_))
                );
                assert!(fits, "{:?} produced {op}", kind);
                let mut bundle = Bundle::new(f.clone()).unwrap();
                apply_op(&mut bundle, &op).unwrap_or_else(|e| panic!("{op} rejected: {e}"));
                bundle.validate().unwrap();
            }
        }
        // Every kind must occur somewhere across the rounds.
        assert_eq!(seen, [true; 7]);
    }

    #[test]
    fn same_seed_reproduces_the_stream() {
        let draw = || {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            let gen = FiltrationGen::with_len(20);
            let f = gen.sample(&mut rng);
            let ops = OpGen::new(gen.vertices, gen.max_dim, 40);
            let schedule: Vec<String> =
                (0..10).map(|_| ops.sample(&f, &mut rng).unwrap().to_string()).collect();
            (f.arrows().to_vec(), schedule)
        };
        assert_eq!(draw(), draw());
    }
}

#[cfg(test)]
mod soak {
    use super::*;
    use crate::oracle::ud_barcode_oracle;
    use crate::reps::u_barcode;
    use crate::updates::{apply_op, Bundle};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pairset_tracks_oracle_under_random_edits() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for round in 0..60usize {
            let gen = FiltrationGen::with_len(6 + (round % 18) * 2);
            let f = gen.sample(&mut rng);
            let mut bundle = Bundle::new(f).unwrap();
            let ops = OpGen::new(gen.vertices, gen.max_dim, gen.arrows + 20);
            for step in 0..30 {
                let before: Vec<_> = bundle.filtration.arrows().to_vec();
                let op = ops.sample(&bundle.filtration, &mut rng).unwrap();
                apply_op(&mut bundle, &op).unwrap_or_else(|e| {
                    panic!("round {round} step {step}: {op} rejected: {e}\nbefore: {before:?}")
                });
                bundle.validate().unwrap_or_else(|e| {
                    panic!("round {round} step {step}: {op}: {e}\nbefore: {before:?}")
                });
                let want = ud_barcode_oracle(&bundle.state).unwrap();
                let got = u_barcode(&bundle.state, &bundle.pairs);
                assert_eq!(got, want, "round {round} step {step}: {op}\nbefore: {before:?}");
            }
        }
    }
}
