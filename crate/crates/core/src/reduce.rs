//! Elementary free-face collapses.
//!
//! A face is free when it has exactly one proper coface; removing the pair
//! is a homotopy equivalence. The engine powers both the collapsibility
//! certificate and a reduction pre-pass that shrinks large complexes before
//! Smith normal form.

use std::collections::{BinaryHeap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::simplicial::Simplex;

/// All faces of a closed face set, canonically ordered (dim asc, lex asc).
pub fn closed_face_list(maximal: &[Simplex]) -> Vec<Simplex> {
    let mut set = std::collections::BTreeSet::new();
    for m in maximal {
        for f in m.all_faces() {
            set.insert(f);
        }
    }
    let mut v: Vec<Simplex> = set.into_iter().collect();
    v.sort_unstable_by(|a, b| {
        a.vertices()
            .len()
            .cmp(&b.vertices().len())
            .then_with(|| a.cmp(b))
    });
    v
}

/// Outcome of a greedy collapse run: the surviving faces.
pub struct CollapseRun {
    pub remaining: Vec<Simplex>,
    pub pairs_removed: usize,
}

impl CollapseRun {
    /// True when the complex collapsed all the way to a single vertex.
    pub fn is_point(&self) -> bool {
        self.remaining.len() == 1 && self.remaining[0].dim() == 0
    }
}

/// Greedy free-face collapse over a closed face list. `priority` assigns a
/// tie-breaking rank per face; lower ranks collapse first (the free face of
/// smallest dimension wins, then the rank).
fn collapse_with_priority(faces: &[Simplex], priority: &[u32]) -> CollapseRun {
    let n = faces.len();
    let index: HashMap<&Simplex, usize> = faces.iter().enumerate().map(|(i, f)| (f, i)).collect();
    // parents[i] = faces exactly one dimension up containing face i.
    let mut parents: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (i, f) in faces.iter().enumerate() {
        for facet in f.facets() {
            let j = index[&facet];
            parents[j].push(i as u32);
        }
    }
    let mut alive = vec![true; n];
    let mut live_parents: Vec<u32> = parents.iter().map(|p| p.len() as u32).collect();

    // Max-heap; invert ordering so the smallest (dim, priority, index) pops
    // first.
    #[derive(PartialEq, Eq, PartialOrd, Ord)]
    struct Cand(std::cmp::Reverse<(usize, u32, usize)>);
    let mut heap: BinaryHeap<Cand> = BinaryHeap::new();
    for (i, f) in faces.iter().enumerate() {
        if live_parents[i] == 1 {
            heap.push(Cand(std::cmp::Reverse((f.dim(), priority[i], i))));
        }
    }

    let mut pairs = 0usize;
    while let Some(Cand(std::cmp::Reverse((_, _, i)))) = heap.pop() {
        if !alive[i] || live_parents[i] != 1 {
            continue;
        }
        let coface = parents[i]
            .iter()
            .copied()
            .find(|&p| alive[p as usize])
            .expect("live parent count says one exists") as usize;
        alive[i] = false;
        alive[coface] = false;
        pairs += 1;
        // Dropping `coface` frees up capacity below it; dropping `i` does the
        // same one dimension lower.
        for &removed in &[coface, i] {
            for facet in faces[removed].facets() {
                let j = index[&facet];
                if !alive[j] {
                    continue;
                }
                live_parents[j] -= 1;
                if live_parents[j] == 1 {
                    heap.push(Cand(std::cmp::Reverse((
                        faces[j].dim(),
                        priority[j],
                        j,
                    ))));
                }
            }
        }
    }

    let remaining: Vec<Simplex> = faces
        .iter()
        .zip(&alive)
        .filter(|(_, &a)| a)
        .map(|(f, _)| f.clone())
        .collect();
    CollapseRun {
        remaining,
        pairs_removed: pairs,
    }
}

/// Deterministic collapse in canonical face order. Used as a reduction
/// pre-pass: the result carries the same integral homology.
pub fn collapse_deterministic(faces: &[Simplex]) -> CollapseRun {
    let priority: Vec<u32> = (0..faces.len() as u32).collect();
    collapse_with_priority(faces, &priority)
}

/// Seeded collapse: tie-breaking order shuffled by the given seed.
pub fn collapse_seeded(faces: &[Simplex], seed: u64) -> CollapseRun {
    let mut order: Vec<u32> = (0..faces.len() as u32).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut priority = vec![0u32; faces.len()];
    for (rank, &i) in order.iter().enumerate() {
        priority[i as usize] = rank as u32;
    }
    collapse_with_priority(faces, &priority)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::{build_complex, Simplex};

    fn sx(v: &[u32]) -> Simplex {
        Simplex::from_slice(v).unwrap()
    }

    #[test]
    fn solid_simplex_collapses_to_point() {
        let k = build_complex(vec![sx(&[0, 1, 2, 3])]).unwrap();
        let run = collapse_deterministic(k.faces());
        assert!(run.is_point());
    }

    #[test]
    fn circle_does_not_collapse() {
        let k = build_complex(vec![sx(&[0, 1]), sx(&[1, 2]), sx(&[0, 2])]).unwrap();
        let run = collapse_deterministic(k.faces());
        // No free face at all: nothing is removed.
        assert_eq!(run.remaining.len(), 6);
        assert_eq!(run.pairs_removed, 0);
    }

    #[test]
    fn collapse_preserves_euler_characteristic_parity() {
        let k = build_complex(vec![sx(&[0, 1, 2]), sx(&[2, 3, 4]), sx(&[4, 5])]).unwrap();
        let faces = k.faces();
        let run = collapse_deterministic(faces);
        let euler_before: i64 = faces
            .iter()
            .map(|f| if f.dim() % 2 == 0 { 1i64 } else { -1 })
            .sum();
        let euler_after: i64 = run
            .remaining
            .iter()
            .map(|f| if f.dim() % 2 == 0 { 1i64 } else { -1 })
            .sum();
        assert_eq!(euler_before, euler_after);
    }
}
