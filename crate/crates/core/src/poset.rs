//! Finite posets, order complexes, nerves of covers, flag-nerves, and
//! fibers of poset maps.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::cliques::{clique_complex, Graph};
use crate::simplicial::{build_complex, ComplexError, Simplex, SimplicialComplex, VertexId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PosetError {
    #[error("relation mentions unknown element {0}")]
    UnknownElement(u32),
    #[error("the relation has a cycle through element {0}")]
    CycleDetected(u32),
    #[error("map is not monotone: {0} < {1} but images are not ordered")]
    NotMonotone(u32, u32),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// A finite strict partial order. The relation is stored transitively
/// closed; reflexivity is implicit where a definition needs it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    ids: Vec<u32>,
    /// below[i] = indices j with ids[j] strictly below ids[i].
    below: Vec<BTreeSet<usize>>,
}

impl Poset {
    pub fn new(mut elements: Vec<u32>, relations: &[(u32, u32)]) -> Result<Self, PosetError> {
        elements.sort_unstable();
        elements.dedup();
        let index: BTreeMap<u32, usize> = elements
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        let n = elements.len();
        let mut below: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for &(a, b) in relations {
            let ia = *index.get(&a).ok_or(PosetError::UnknownElement(a))?;
            let ib = *index.get(&b).ok_or(PosetError::UnknownElement(b))?;
            below[ib].insert(ia);
        }
        // Transitive closure by iterating to a fixed point.
        loop {
            let mut changed = false;
            for i in 0..n {
                let mut add = BTreeSet::new();
                for &j in &below[i] {
                    for &k in &below[j] {
                        if !below[i].contains(&k) {
                            add.insert(k);
                        }
                    }
                }
                if !add.is_empty() {
                    below[i].extend(add);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for (i, b) in below.iter().enumerate() {
            if b.contains(&i) {
                return Err(PosetError::CycleDetected(elements[i]));
            }
        }
        Ok(Poset {
            ids: elements,
            below,
        })
    }

    pub fn elements(&self) -> &[u32] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, a: u32) -> bool {
        self.ids.binary_search(&a).is_ok()
    }

    fn idx(&self, a: u32) -> Option<usize> {
        self.ids.binary_search(&a).ok()
    }

    /// Strict comparison `a < b`.
    pub fn lt(&self, a: u32, b: u32) -> bool {
        match (self.idx(a), self.idx(b)) {
            (Some(ia), Some(ib)) => self.below[ib].contains(&ia),
            _ => false,
        }
    }

    /// Reflexive comparison `a <= b`.
    pub fn leq(&self, a: u32, b: u32) -> bool {
        a == b && self.contains(a) || self.lt(a, b)
    }

    pub fn comparable(&self, a: u32, b: u32) -> bool {
        self.lt(a, b) || self.lt(b, a)
    }

    /// All strict relation pairs (a, b) with a < b.
    pub fn relation_pairs(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for (i, b) in self.below.iter().enumerate() {
            for &j in b {
                out.push((self.ids[j], self.ids[i]));
            }
        }
        out.sort_unstable();
        out
    }

    /// Elements at or below `q` (the order ideal generated by q).
    pub fn down_set(&self, q: u32) -> Vec<u32> {
        let Some(iq) = self.idx(q) else {
            return Vec::new();
        };
        let mut v: Vec<u32> = self.below[iq].iter().map(|&j| self.ids[j]).collect();
        v.push(q);
        v.sort_unstable();
        v
    }

    /// The sub-poset induced on the given elements.
    pub fn induced(&self, keep: &[u32]) -> Poset {
        let keep_set: BTreeSet<u32> = keep.iter().copied().collect();
        let rel: Vec<(u32, u32)> = self
            .relation_pairs()
            .into_iter()
            .filter(|(a, b)| keep_set.contains(a) && keep_set.contains(b))
            .collect();
        Poset::new(keep_set.into_iter().collect(), &rel).expect("induced sub-poset is valid")
    }

    /// Longest-chain length (counted in steps) ending at each element, and
    /// the overall maximum. An element with nothing below it has rank 0.
    pub fn chain_ranks(&self) -> (Vec<usize>, usize) {
        let n = self.ids.len();
        let mut rank = vec![0usize; n];
        // below is transitively closed, so a longest chain to i extends a
        // longest chain to some j below i.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| self.below[i].len());
        for &i in &order {
            for &j in &self.below[i] {
                rank[i] = rank[i].max(rank[j] + 1);
            }
        }
        let max = rank.iter().copied().max().unwrap_or(0);
        (rank, max)
    }
}

/// The order complex: simplices are the chains of the poset. Chains are
/// exactly the cliques of the comparability graph.
pub fn order_complex(p: &Poset) -> Result<SimplicialComplex, PosetError> {
    if p.is_empty() {
        return Err(PosetError::Complex(ComplexError::EmptyComplex));
    }
    let n = p.len();
    let mut g = Graph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if p.comparable(p.ids[i], p.ids[j]) {
                g.add_edge(i, j);
            }
        }
    }
    Ok(clique_complex(&g, p.elements())?)
}

/// A finite cover: each index owns a finite set of ground elements.
#[derive(Clone, Debug)]
pub struct Cover {
    sets: Vec<(u32, BTreeSet<u64>)>,
}

impl Cover {
    pub fn new(mut sets: Vec<(u32, BTreeSet<u64>)>) -> Self {
        sets.sort_by_key(|(i, _)| *i);
        Cover { sets }
    }

    pub fn sets(&self) -> &[(u32, BTreeSet<u64>)] {
        &self.sets
    }

    pub fn indices(&self) -> Vec<u32> {
        self.sets.iter().map(|(i, _)| *i).collect()
    }

    pub fn remove(&self, index: u32) -> Cover {
        Cover {
            sets: self
                .sets
                .iter()
                .filter(|(i, _)| *i != index)
                .cloned()
                .collect(),
        }
    }
}

/// The nerve: a subset of cover indices spans a simplex exactly when the
/// intersection of its sets is non-empty. Intersections are exact over the
/// explicit finite ground sets.
pub fn nerve(cover: &Cover) -> Result<SimplicialComplex, PosetError> {
    if cover.sets.is_empty() {
        return Err(PosetError::Complex(ComplexError::EmptyComplex));
    }
    let n = cover.sets.len();
    let mut sims: Vec<Simplex> = Vec::new();
    // Depth-first extension: every simplex with a non-empty intersection is
    // visited exactly once with ascending index order.
    let mut stack: Vec<(Vec<usize>, BTreeSet<u64>)> = Vec::new();
    for i in (0..n).rev() {
        stack.push((vec![i], cover.sets[i].1.clone()));
    }
    while let Some((members, inter)) = stack.pop() {
        sims.push(
            Simplex::new(members.iter().map(|&i| cover.sets[i].0).collect())
                .expect("cover indices are distinct"),
        );
        let last = *members.last().expect("non-empty");
        for j in (last + 1..n).rev() {
            let next: BTreeSet<u64> = inter
                .intersection(&cover.sets[j].1)
                .copied()
                .collect();
            if !next.is_empty() {
                let mut m2 = members.clone();
                m2.push(j);
                stack.push((m2, next));
            }
        }
    }
    Ok(build_complex(sims)?)
}

/// Nerve over the face set of a triangulated complex: a set of faces spans
/// a simplex when some ordering makes it a flag, i.e. the faces are
/// pairwise nested. This is the clique complex of the face-containment
/// graph, with vertex i the i-th face in canonical order.
pub fn flag_nerve(k: &SimplicialComplex) -> SimplicialComplex {
    let faces = k.faces();
    let n = faces.len();
    let mut g = Graph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if faces[i].is_proper_face_of(&faces[j]) || faces[j].is_proper_face_of(&faces[i]) {
                g.add_edge(i, j);
            }
        }
    }
    let ids: Vec<VertexId> = (0..n as u32).collect();
    clique_complex(&g, &ids).expect("face chains stay within the dimension cap")
}

/// Order complex of the preimage of the down-set of `q` under a poset map.
/// The map must be defined on all of `p`, land in `q_poset`, and be
/// monotone.
pub fn poset_fiber(
    p: &Poset,
    q_poset: &Poset,
    map: &BTreeMap<u32, u32>,
    q: u32,
) -> Result<SimplicialComplex, PosetError> {
    for &x in p.elements() {
        let y = map.get(&x).ok_or(PosetError::UnknownElement(x))?;
        if !q_poset.contains(*y) {
            return Err(PosetError::UnknownElement(*y));
        }
    }
    if !q_poset.contains(q) {
        return Err(PosetError::UnknownElement(q));
    }
    for &(a, b) in &p.relation_pairs() {
        if !q_poset.leq(map[&a], map[&b]) {
            return Err(PosetError::NotMonotone(a, b));
        }
    }
    let keep: Vec<u32> = p
        .elements()
        .iter()
        .copied()
        .filter(|x| q_poset.leq(map[x], q))
        .collect();
    if keep.is_empty() {
        return Err(PosetError::Complex(ComplexError::EmptyComplex));
    }
    order_complex(&p.induced(&keep))
}

/// Parses the poset text format: `a < b` per line declares a relation, a
/// bare `a` declares an element, `#` comments.
pub fn parse_poset(text: &str) -> Result<Poset, PosetError> {
    let mut elements: Vec<u32> = Vec::new();
    let mut relations: Vec<(u32, u32)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        let parse_id = |tok: &str| -> Result<u32, PosetError> {
            tok.parse().map_err(|_| PosetError::Parse {
                line: lineno + 1,
                msg: format!("bad element id `{tok}`"),
            })
        };
        match toks.as_slice() {
            [] => {}
            [a] => elements.push(parse_id(a)?),
            [a, "<", b] => {
                let (a, b) = (parse_id(a)?, parse_id(b)?);
                elements.push(a);
                elements.push(b);
                relations.push((a, b));
            }
            _ => {
                return Err(PosetError::Parse {
                    line: lineno + 1,
                    msg: "expected `a < b` or a bare element id".into(),
                })
            }
        }
    }
    Poset::new(elements, &relations)
}

/// Parses the cover text format: `i: e1 e2 e3` per line.
pub fn parse_cover(text: &str) -> Result<Cover, PosetError> {
    let mut sets = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| PosetError::Parse {
            line: lineno + 1,
            msg,
        };
        let (head, tail) = line
            .split_once(':')
            .ok_or_else(|| err("expected `i: e1 e2 ...`".into()))?;
        let index: u32 = head
            .trim()
            .parse()
            .map_err(|_| err(format!("bad cover index `{}`", head.trim())))?;
        let mut members = BTreeSet::new();
        for tok in tail.split_whitespace() {
            members.insert(
                tok.parse::<u64>()
                    .map_err(|_| err(format!("bad element `{tok}`")))?,
            );
        }
        sets.push((index, members));
    }
    Ok(Cover::new(sets))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::betti;

    fn set(v: &[u64]) -> BTreeSet<u64> {
        v.iter().copied().collect()
    }

    #[test]
    fn chain_gives_solid_simplex() {
        let p = Poset::new(vec![0, 1, 2], &[(0, 1), (1, 2)]).unwrap();
        let k = order_complex(&p).unwrap();
        assert_eq!(k.maximal_simplices().len(), 1);
        assert_eq!(k.maximal_simplices()[0].vertices(), &[0, 1, 2]);
    }

    #[test]
    fn antichain_gives_isolated_vertices() {
        let p = Poset::new(vec![0, 1, 2], &[]).unwrap();
        let k = order_complex(&p).unwrap();
        assert_eq!(k.f_vector(), vec![3]);
    }

    #[test]
    fn transitive_closure_and_cycles() {
        let p = Poset::new(vec![0, 1, 2], &[(0, 1), (1, 2)]).unwrap();
        assert!(p.lt(0, 2));
        assert!(!p.lt(2, 0));
        assert_eq!(
            Poset::new(vec![0, 1], &[(0, 1), (1, 0)]).unwrap_err(),
            PosetError::CycleDetected(0)
        );
    }

    #[test]
    fn face_poset_order_complex_is_subdivision() {
        // Face poset of the triangle boundary; its order complex has the
        // homology of a circle.
        let k = crate::simplicial::build_complex(vec![
            Simplex::from_slice(&[0, 1]).unwrap(),
            Simplex::from_slice(&[1, 2]).unwrap(),
            Simplex::from_slice(&[0, 2]).unwrap(),
        ])
        .unwrap();
        let faces = k.faces();
        let mut rel = Vec::new();
        for (i, a) in faces.iter().enumerate() {
            for (j, b) in faces.iter().enumerate() {
                if a.is_proper_face_of(b) {
                    rel.push((i as u32, j as u32));
                }
            }
        }
        let p = Poset::new((0..faces.len() as u32).collect(), &rel).unwrap();
        let oc = order_complex(&p).unwrap();
        assert_eq!(betti(&oc).free, vec![1, 1]);
    }

    #[test]
    fn nerve_basic_shapes() {
        // Two overlapping sets: an edge.
        let c = Cover::new(vec![(0, set(&[1, 2])), (1, set(&[2, 3]))]);
        let n = nerve(&c).unwrap();
        assert_eq!(n.f_vector(), vec![2, 1]);

        // Pairwise overlaps, empty triple intersection: hollow triangle.
        let c = Cover::new(vec![
            (0, set(&[1, 2])),
            (1, set(&[2, 3])),
            (2, set(&[3, 1])),
        ]);
        let n = nerve(&c).unwrap();
        assert_eq!(n.f_vector(), vec![3, 3]);
        assert_eq!(betti(&n).free, vec![1, 1]);
    }

    #[test]
    fn nerve_of_closed_stars_of_a_path() {
        // Path 0-1-2-3; ground set indexes the faces of the path complex.
        let k = crate::simplicial::build_complex(vec![
            Simplex::from_slice(&[0, 1]).unwrap(),
            Simplex::from_slice(&[1, 2]).unwrap(),
            Simplex::from_slice(&[2, 3]).unwrap(),
        ])
        .unwrap();
        let faces = k.faces();
        let star = |v: u32| -> BTreeSet<u64> {
            let mut s = BTreeSet::new();
            for (i, f) in faces.iter().enumerate() {
                if f.vertices().contains(&v) {
                    // closed star: all faces of simplices containing v
                    for sub in f.all_faces() {
                        let j = faces.iter().position(|x| *x == sub).unwrap();
                        s.insert(j as u64);
                    }
                    s.insert(i as u64);
                }
            }
            s
        };
        let c = Cover::new((0..4).map(|v| (v, star(v))).collect());
        let n = nerve(&c).unwrap();
        let b = betti(&n);
        assert_eq!(b.rank(0), 1);
        assert!(b.free.iter().skip(1).all(|&r| r == 0));
    }

    #[test]
    fn nerve_monotone_under_set_removal() {
        let c = Cover::new(vec![
            (0, set(&[1, 2])),
            (1, set(&[2, 3])),
            (2, set(&[3, 1])),
        ]);
        let full = nerve(&c).unwrap();
        let smaller = nerve(&c.remove(2)).unwrap();
        for f in smaller.faces() {
            assert!(full.contains(f));
        }
    }

    #[test]
    fn flag_nerve_shapes() {
        let point = crate::simplicial::build_complex(vec![Simplex::vertex(0)]).unwrap();
        assert_eq!(flag_nerve(&point).f_vector(), vec![1]);

        let edge =
            crate::simplicial::build_complex(vec![Simplex::from_slice(&[0, 1]).unwrap()])
                .unwrap();
        let fnv = flag_nerve(&edge);
        assert_eq!(betti(&fnv).free, vec![1, 0]);
    }

    #[test]
    fn poset_fiber_cases() {
        let p = Poset::new(vec![0, 1, 2], &[(0, 1), (1, 2)]).unwrap();
        // Identity map: fiber over q is the order complex of the down-set.
        let id: BTreeMap<u32, u32> = [(0, 0), (1, 1), (2, 2)].into_iter().collect();
        let f = poset_fiber(&p, &p, &id, 1).unwrap();
        assert_eq!(f.maximal_simplices()[0].vertices(), &[0, 1]);

        // Constant map to a singleton: fiber is the full order complex.
        let q = Poset::new(vec![7], &[]).unwrap();
        let c: BTreeMap<u32, u32> = [(0, 7), (1, 7), (2, 7)].into_iter().collect();
        let f = poset_fiber(&p, &q, &c, 7).unwrap();
        assert_eq!(f, order_complex(&p).unwrap());

        // Non-monotone maps are rejected.
        let q2 = Poset::new(vec![0, 1], &[(0, 1)]).unwrap();
        let bad: BTreeMap<u32, u32> = [(0, 1), (1, 0), (2, 0)].into_iter().collect();
        assert_eq!(
            poset_fiber(&p, &q2, &bad, 1).unwrap_err(),
            PosetError::NotMonotone(0, 1)
        );
    }

    #[test]
    fn fiber_of_product_projection() {
        // Product of chains 0<1 and 0<1, encoded as ids p*2+q.
        let ids: Vec<u32> = (0..4).collect();
        let mut rel = Vec::new();
        for a in 0..4u32 {
            for b in 0..4u32 {
                let (a1, a2) = (a / 2, a % 2);
                let (b1, b2) = (b / 2, b % 2);
                if (a1 <= b1 && a2 <= b2) && a != b {
                    rel.push((a, b));
                }
            }
        }
        let p = Poset::new(ids, &rel).unwrap();
        let q = Poset::new(vec![0, 1], &[(0, 1)]).unwrap();
        let proj: BTreeMap<u32, u32> = (0..4).map(|x| (x, x / 2)).collect();
        let fiber = poset_fiber(&p, &q, &proj, 0).unwrap();
        // Down-set of 0 in the first factor is {0}; the fiber is the order
        // complex of {0} x {0 < 1}, a chain of two elements.
        assert_eq!(fiber.maximal_simplices().len(), 1);
        assert_eq!(fiber.maximal_simplices()[0].vertices(), &[0, 1]);
    }

    #[test]
    fn parse_poset_text() {
        let p = parse_poset("# order\n0 < 1\n1 < 2\n5\n").unwrap();
        assert_eq!(p.elements(), &[0, 1, 2, 5]);
        assert!(p.lt(0, 2));
        assert!(!p.comparable(5, 0));
    }

    #[test]
    fn parse_cover_text() {
        let c = parse_cover("0: 1 2\n1: 2 3\n").unwrap();
        assert_eq!(c.sets().len(), 2);
        assert_eq!(c.sets()[0].1, set(&[1, 2]));
    }
}
