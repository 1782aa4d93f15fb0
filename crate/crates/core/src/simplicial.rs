//! Finite abstract simplicial complexes over integer vertex ids.
//!
//! A complex stores only its inclusion-maximal simplices; faces are implicit
//! and enumerated on demand (memoized). The simplex dimension is capped at
//! [`MAX_DIMENSION`] because face enumeration is exponential in it.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

pub type VertexId = u32;

/// Hard cap on simplex dimension (subset enumeration is `2^(dim+1)`).
pub const MAX_DIMENSION: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComplexError {
    #[error("a complex needs at least one simplex")]
    EmptyComplex,
    #[error("a simplex needs at least one vertex")]
    EmptySimplex,
    #[error("duplicate vertex {0} in simplex")]
    DuplicateVertex(VertexId),
    #[error("simplex dimension {0} exceeds the supported maximum {MAX_DIMENSION}")]
    DimensionTooLarge(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A non-empty set of vertices, stored strictly ascending.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    vertices: Vec<VertexId>,
}

impl Simplex {
    /// Builds a simplex from vertex ids in any order. Rejects empty input,
    /// duplicates, and dimensions above [`MAX_DIMENSION`].
    pub fn new(mut vertices: Vec<VertexId>) -> Result<Self, ComplexError> {
        if vertices.is_empty() {
            return Err(ComplexError::EmptySimplex);
        }
        vertices.sort_unstable();
        for w in vertices.windows(2) {
            if w[0] == w[1] {
                return Err(ComplexError::DuplicateVertex(w[0]));
            }
        }
        if vertices.len() > MAX_DIMENSION + 1 {
            return Err(ComplexError::DimensionTooLarge(vertices.len() - 1));
        }
        Ok(Simplex { vertices })
    }

    pub fn from_slice(vertices: &[VertexId]) -> Result<Self, ComplexError> {
        Self::new(vertices.to_vec())
    }

    pub fn vertex(v: VertexId) -> Self {
        Simplex { vertices: vec![v] }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// True when `self` is a subset of `other` (including equality).
    pub fn is_face_of(&self, other: &Simplex) -> bool {
        if self.vertices.len() > other.vertices.len() {
            return false;
        }
        let mut it = other.vertices.iter();
        'outer: for v in &self.vertices {
            for w in it.by_ref() {
                match w.cmp(v) {
                    std::cmp::Ordering::Equal => continue 'outer,
                    std::cmp::Ordering::Greater => return false,
                    std::cmp::Ordering::Less => {}
                }
            }
            return false;
        }
        true
    }

    pub fn is_proper_face_of(&self, other: &Simplex) -> bool {
        self.vertices.len() < other.vertices.len() && self.is_face_of(other)
    }

    /// Codimension-one faces, i.e. the simplex with one vertex removed.
    /// Empty for a vertex.
    pub fn facets(&self) -> Vec<Simplex> {
        if self.vertices.len() == 1 {
            return Vec::new();
        }
        (0..self.vertices.len())
            .map(|i| {
                let mut v = self.vertices.clone();
                v.remove(i);
                Simplex { vertices: v }
            })
            .collect()
    }

    /// All non-empty subsets, `self` included.
    pub fn all_faces(&self) -> Vec<Simplex> {
        let n = self.vertices.len();
        let mut out = Vec::with_capacity((1usize << n) - 1);
        for mask in 1u32..(1u32 << n) {
            let mut v = Vec::with_capacity(mask.count_ones() as usize);
            for (i, vert) in self.vertices.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    v.push(*vert);
                }
            }
            out.push(Simplex { vertices: v });
        }
        out
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// A finite abstract simplicial complex: the inclusion-maximal antichain of
/// its simplices plus optional vertex labels.
pub struct SimplicialComplex {
    maximal: Vec<Simplex>,
    labels: BTreeMap<VertexId, String>,
    faces_memo: OnceLock<Vec<Simplex>>,
}

impl Clone for SimplicialComplex {
    fn clone(&self) -> Self {
        SimplicialComplex {
            maximal: self.maximal.clone(),
            labels: self.labels.clone(),
            faces_memo: OnceLock::new(),
        }
    }
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.maximal == other.maximal
    }
}
impl Eq for SimplicialComplex {}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SimplicialComplex{:?}", self.maximal)
    }
}

/// Builds a complex from arbitrary simplices, keeping the inclusion-maximal
/// antichain. Errors on an empty list.
pub fn build_complex(simplices: Vec<Simplex>) -> Result<SimplicialComplex, ComplexError> {
    if simplices.is_empty() {
        return Err(ComplexError::EmptyComplex);
    }
    Ok(SimplicialComplex::from_maximal_unchecked(antichain(simplices)))
}

/// Reduces a simplex list to its inclusion-maximal members.
fn antichain(mut simplices: Vec<Simplex>) -> Vec<Simplex> {
    // Longer simplices first so faces get absorbed in a single pass.
    simplices.sort_unstable_by(|a, b| {
        b.vertices()
            .len()
            .cmp(&a.vertices().len())
            .then_with(|| a.cmp(b))
    });
    simplices.dedup();
    let mut kept: Vec<Simplex> = Vec::new();
    'next: for s in simplices {
        for k in &kept {
            if s.is_face_of(k) {
                continue 'next;
            }
        }
        kept.push(s);
    }
    kept.sort_unstable();
    kept
}

impl SimplicialComplex {
    fn from_maximal_unchecked(maximal: Vec<Simplex>) -> Self {
        SimplicialComplex {
            maximal,
            labels: BTreeMap::new(),
            faces_memo: OnceLock::new(),
        }
    }

    pub fn maximal_simplices(&self) -> &[Simplex] {
        &self.maximal
    }

    pub fn dim(&self) -> usize {
        self.maximal.iter().map(Simplex::dim).max().unwrap_or(0)
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.maximal.iter().any(|m| s.is_face_of(m))
    }

    pub fn set_label(&mut self, v: VertexId, label: impl Into<String>) {
        self.labels.insert(v, label.into());
        self.faces_memo = OnceLock::new();
    }

    pub fn label(&self, v: VertexId) -> Option<&str> {
        self.labels.get(&v).map(String::as_str)
    }

    pub fn labels(&self) -> &BTreeMap<VertexId, String> {
        &self.labels
    }

    /// All faces in canonical order: dimension ascending, then lexicographic.
    /// Memoized; the complex is immutable after construction.
    pub fn faces(&self) -> &[Simplex] {
        self.faces_memo.get_or_init(|| {
            let mut set = BTreeSet::new();
            for m in &self.maximal {
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
        })
    }

    /// Canonical index of each face; inverse of the order in [`Self::faces`].
    pub fn face_index(&self) -> HashMap<Simplex, usize> {
        self.faces()
            .iter()
            .enumerate()
            .map(|(i, f)| (f.clone(), i))
            .collect()
    }

    pub fn faces_of_dim(&self, k: usize) -> Vec<Simplex> {
        self.faces()
            .iter()
            .filter(|f| f.dim() == k)
            .cloned()
            .collect()
    }

    pub fn vertices(&self) -> Vec<VertexId> {
        let mut v: Vec<VertexId> = self
            .maximal
            .iter()
            .flat_map(|s| s.vertices().iter().copied())
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Number of faces per dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0usize; self.dim() + 1];
        for face in self.faces() {
            f[face.dim()] += 1;
        }
        f
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(k, &n)| if k % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }

    /// Serializes to the one-maximal-simplex-per-line text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for m in &self.maximal {
            let ids: Vec<String> = m.vertices().iter().map(|v| v.to_string()).collect();
            out.push_str(&ids.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Parses the complex text format: one maximal simplex per line as
/// whitespace-separated integer ids, `#` starts a comment, blank lines
/// are ignored.
pub fn parse_complex(text: &str) -> Result<SimplicialComplex, ComplexError> {
    let mut simplices = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let mut ids = Vec::new();
        for tok in line.split_whitespace() {
            let id: VertexId = tok.parse().map_err(|_| ComplexError::Parse {
                line: lineno + 1,
                msg: format!("bad vertex id `{tok}`"),
            })?;
            ids.push(id);
        }
        simplices.push(Simplex::new(ids).map_err(|e| ComplexError::Parse {
            line: lineno + 1,
            msg: e.to_string(),
        })?);
    }
    build_complex(simplices)
}

/// A strictly decreasing chain of faces, each a proper face of its
/// predecessor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Flag {
    chain: Vec<Simplex>,
}

impl Flag {
    pub fn new(chain: Vec<Simplex>) -> Option<Flag> {
        if chain.is_empty() {
            return None;
        }
        for w in chain.windows(2) {
            if !w[1].is_proper_face_of(&w[0]) {
                return None;
            }
        }
        Some(Flag { chain })
    }

    pub fn chain(&self) -> &[Simplex] {
        &self.chain
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }
}

/// All k-flags: chains of k+1 faces, each a proper face of the previous.
pub fn flags(complex: &SimplicialComplex, k: usize) -> Vec<Flag> {
    let faces = complex.faces();
    let mut out = Vec::new();
    let mut chain: Vec<Simplex> = Vec::with_capacity(k + 1);
    // Faces are canonically ordered by dimension, so descending chains pick
    // successors with strictly smaller index.
    fn extend(
        faces: &[Simplex],
        chain: &mut Vec<Simplex>,
        remaining: usize,
        out: &mut Vec<Flag>,
    ) {
        if remaining == 0 {
            out.push(Flag {
                chain: chain.clone(),
            });
            return;
        }
        let top = chain.last().cloned();
        for f in faces {
            let ok = match &top {
                Some(t) => f.is_proper_face_of(t),
                None => true,
            };
            if ok {
                chain.push(f.clone());
                extend(faces, chain, remaining - 1, out);
                chain.pop();
            }
        }
    }
    extend(faces, &mut chain, k + 1, &mut out);
    out.sort_unstable();
    out
}

/// The k-skeleton: all faces of dimension at most k.
pub fn skeleton(complex: &SimplicialComplex, k: usize) -> SimplicialComplex {
    use itertools::Itertools;
    let mut pieces = Vec::new();
    for m in complex.maximal_simplices() {
        if m.dim() <= k {
            pieces.push(m.clone());
        } else {
            for combo in m.vertices().iter().copied().combinations(k + 1) {
                pieces.push(Simplex::new(combo).expect("subset of a valid simplex"));
            }
        }
    }
    let mut result = build_complex(pieces).expect("skeleton of non-empty complex");
    result.labels = complex.labels.clone();
    result
}

/// Barycentric subdivision. Vertex `i` of the subdivision is the barycenter
/// of face `i` in the canonical face order of the original complex; the
/// simplices of the subdivision are exactly the flags of the original.
pub struct Subdivision {
    pub complex: SimplicialComplex,
    /// Subdivision vertex id -> the original face it centers.
    pub vertex_face: Vec<Simplex>,
}

impl Subdivision {
    /// Original face -> its barycenter vertex id.
    pub fn vertex_of_face(&self, face: &Simplex) -> Option<VertexId> {
        self.vertex_face
            .iter()
            .position(|f| f == face)
            .map(|i| i as VertexId)
    }

    /// Decodes a subdivision simplex into its flag of original faces,
    /// ordered by strictly decreasing dimension. Returns `None` if a vertex
    /// id is out of range.
    pub fn flag_of(&self, b: &Simplex) -> Option<Vec<Simplex>> {
        let mut faces: Vec<Simplex> = b
            .vertices()
            .iter()
            .map(|&v| self.vertex_face.get(v as usize).cloned())
            .collect::<Option<Vec<_>>>()?;
        faces.sort_unstable_by(|a, b| {
            b.vertices()
                .len()
                .cmp(&a.vertices().len())
                .then_with(|| a.cmp(b))
        });
        Some(faces)
    }

    /// Face ids (canonical indices in the original complex) of a subdivision
    /// simplex, ordered by strictly decreasing dimension of the faces.
    pub fn flag_ids(&self, b: &Simplex) -> Vec<usize> {
        let mut ids: Vec<usize> = b.vertices().iter().map(|&v| v as usize).collect();
        ids.sort_unstable_by(|&a, &b| {
            let da = self.vertex_face[a].vertices().len();
            let db = self.vertex_face[b].vertices().len();
            db.cmp(&da).then_with(|| a.cmp(&b))
        });
        ids
    }
}

pub fn barycentric_subdivision(complex: &SimplicialComplex) -> Subdivision {
    let faces = complex.faces().to_vec();
    let index: HashMap<&Simplex, usize> = faces.iter().enumerate().map(|(i, f)| (f, i)).collect();
    // Maximal chains descend from each maximal simplex one dimension at a
    // time, so they are generated by repeatedly removing a vertex.
    let mut maximal_chains: Vec<Simplex> = Vec::new();
    for top in complex.maximal_simplices() {
        let mut stack: Vec<(Simplex, Vec<VertexId>)> = vec![(
            top.clone(),
            vec![index[top] as VertexId],
        )];
        while let Some((face, chain_ids)) = stack.pop() {
            if face.dim() == 0 {
                maximal_chains
                    .push(Simplex::new(chain_ids.clone()).expect("distinct face ids"));
                continue;
            }
            for facet in face.facets() {
                let mut ids = chain_ids.clone();
                ids.push(index[&facet] as VertexId);
                stack.push((facet, ids));
            }
        }
    }
    let mut complex_out =
        build_complex(maximal_chains).expect("subdivision of a non-empty complex");
    for (i, f) in faces.iter().enumerate() {
        let ids: Vec<String> = f.vertices().iter().map(|v| v.to_string()).collect();
        complex_out.set_label(i as VertexId, format!("[{}]", ids.join(" ")));
    }
    Subdivision {
        complex: complex_out,
        vertex_face: faces,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sx(v: &[VertexId]) -> Simplex {
        Simplex::from_slice(v).unwrap()
    }

    #[test]
    fn face_closure_of_triangle() {
        let k = build_complex(vec![sx(&[0, 1, 2])]).unwrap();
        let expected: Vec<Simplex> = vec![
            sx(&[0]),
            sx(&[1]),
            sx(&[2]),
            sx(&[0, 1]),
            sx(&[0, 2]),
            sx(&[1, 2]),
            sx(&[0, 1, 2]),
        ];
        assert_eq!(k.faces(), expected.as_slice());
        for f in &expected {
            assert!(k.contains(f));
        }
    }

    #[test]
    fn triangle_boundary_counts() {
        let k = build_complex(vec![sx(&[0, 1]), sx(&[1, 2]), sx(&[0, 2])]).unwrap();
        assert_eq!(k.f_vector(), vec![3, 3]);
    }

    #[test]
    fn antichain_absorbs_faces() {
        let k = build_complex(vec![sx(&[0, 1]), sx(&[0, 1, 2])]).unwrap();
        assert_eq!(k.maximal_simplices(), &[sx(&[0, 1, 2])]);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert_eq!(build_complex(vec![]).unwrap_err(), ComplexError::EmptyComplex);
    }

    #[test]
    fn simplex_validation() {
        assert_eq!(Simplex::new(vec![]).unwrap_err(), ComplexError::EmptySimplex);
        assert_eq!(
            Simplex::new(vec![3, 3]).unwrap_err(),
            ComplexError::DuplicateVertex(3)
        );
        assert!(Simplex::new((0..=MAX_DIMENSION as u32 + 1).collect()).is_err());
        assert_eq!(sx(&[2, 0, 1]).vertices(), &[0, 1, 2]);
    }

    #[test]
    fn subdivision_of_edge_is_a_path() {
        let k = build_complex(vec![sx(&[0, 1])]).unwrap();
        let sub = barycentric_subdivision(&k);
        assert_eq!(sub.complex.f_vector(), vec![3, 2]);
    }

    #[test]
    fn subdivision_of_solid_triangle() {
        let k = build_complex(vec![sx(&[0, 1, 2])]).unwrap();
        let sub = barycentric_subdivision(&k);
        assert_eq!(sub.complex.f_vector(), vec![7, 12, 6]);
        // Each subdivision simplex decodes to a strictly decreasing flag.
        for m in sub.complex.maximal_simplices() {
            let flag = sub.flag_of(m).unwrap();
            assert_eq!(flag.len(), 3);
            assert!(flag[1].is_proper_face_of(&flag[0]));
            assert!(flag[2].is_proper_face_of(&flag[1]));
        }
    }

    #[test]
    fn subdivision_preserves_euler_characteristic() {
        // Deterministic pseudo-random complexes via a simple LCG.
        let mut state = 12345u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as u32
        };
        for _ in 0..50 {
            let n_simplices = 1 + (next() % 5) as usize;
            let mut sims = Vec::new();
            for _ in 0..n_simplices {
                let size = 1 + (next() % 4) as usize;
                let mut verts: Vec<VertexId> = (0..8).collect();
                // Fisher-Yates prefix.
                for i in 0..size {
                    let j = i + (next() as usize) % (verts.len() - i);
                    verts.swap(i, j);
                }
                sims.push(Simplex::new(verts[..size].to_vec()).unwrap());
            }
            let k = build_complex(sims).unwrap();
            let sub = barycentric_subdivision(&k);
            assert_eq!(k.euler_characteristic(), sub.complex.euler_characteristic());
        }
    }

    #[test]
    fn flags_of_solid_triangle() {
        let k = build_complex(vec![sx(&[0, 1, 2])]).unwrap();
        assert_eq!(flags(&k, 0).len(), 7);
        assert_eq!(flags(&k, 2).len(), 6);
        assert_eq!(flags(&k, 3).len(), 0);
    }

    #[test]
    fn flags_count_matches_poset_chain_enumeration() {
        // Independent oracle: count strictly descending chains in the face
        // poset by dynamic programming over the subset relation.
        let k = build_complex(vec![sx(&[0, 1, 2]), sx(&[2, 3])]).unwrap();
        let faces = k.faces();
        for len in 1..=3usize {
            let mut count = 0usize;
            // chains[i] = number of chains of length `l` ending at face i.
            let mut chains = vec![1usize; faces.len()];
            for _ in 1..len {
                let mut nxt = vec![0usize; faces.len()];
                for (i, fi) in faces.iter().enumerate() {
                    for (j, fj) in faces.iter().enumerate() {
                        if fj.is_proper_face_of(fi) {
                            nxt[j] += chains[i];
                        }
                    }
                }
                chains = nxt;
            }
            count += chains.iter().sum::<usize>();
            assert_eq!(flags(&k, len - 1).len(), count, "length {len}");
        }
    }

    #[test]
    fn skeleton_of_tetrahedron() {
        let k = build_complex(vec![sx(&[0, 1, 2, 3])]).unwrap();
        let k1 = skeleton(&k, 1);
        assert_eq!(k1.f_vector(), vec![4, 6]); // complete graph K4
        // Identity above the dimension.
        assert_eq!(skeleton(&k, 3), k);
        assert_eq!(skeleton(&k, 5), k);
        // Monotone and idempotent.
        let k2 = skeleton(&k, 2);
        assert_eq!(skeleton(&k2, 1), k1);
        assert_eq!(skeleton(&k1, 1), k1);
    }

    #[test]
    fn text_round_trip() {
        let text = "# a triangle and a tail\n0 1 2\n\n2 3\n";
        let k = parse_complex(text).unwrap();
        assert_eq!(k.maximal_simplices(), &[sx(&[0, 1, 2]), sx(&[2, 3])]);
        let k2 = parse_complex(&k.to_text()).unwrap();
        assert_eq!(k, k2);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(matches!(
            parse_complex("0 x 2"),
            Err(ComplexError::Parse { line: 1, .. })
        ));
    }
}
