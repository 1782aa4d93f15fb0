//! Marked complexes: a triangulation `R`, a distinguished union of open
//! simplices `S`, and a hard/soft classification of nested face pairs.
//! The marking drives the core of each barycentric simplex and the partial
//! order built from core disjointness.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::sign::Sign;
use crate::simplicial::{
    barycentric_subdivision, Simplex, SimplicialComplex, Subdivision,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MarkingError {
    #[error("face {0:?} is not a face of the complex")]
    FaceNotInComplex(Simplex),
    #[error("sign vectors disagree in length: expected {expected}, got {got}")]
    BadSignLength { expected: usize, got: usize },
    #[error("no sign vector assigned to face {0:?}")]
    MissingSignVector(Simplex),
    #[error(
        "incompatible signs: function {function} is {outer} on {outer_face:?} but {inner} on its face {inner_face:?}"
    )]
    IncompatibleSigns {
        function: usize,
        outer_face: Simplex,
        outer: Sign,
        inner_face: Simplex,
        inner: Sign,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Sign vectors indexed by face, over `s` defining functions. Face
/// compatibility: a strictly positive function on a face stays
/// non-negative on its subfaces, symmetrically for negative.
#[derive(Clone, Debug, Default)]
pub struct SignVectorAssignment {
    pub signs: BTreeMap<Simplex, Vec<Sign>>,
}

impl SignVectorAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn assign(&mut self, face: Simplex, vector: Vec<Sign>) {
        self.signs.insert(face, vector);
    }
}

/// A complex `R`, the set of its faces that make up `S`, and the hardness
/// of nested face pairs inside `S`. Pairs whose smaller face is outside `S`
/// are implicitly soft. Also carries the barycentric subdivision, whose
/// vertex ids are the canonical face indices of `R`.
pub struct MarkedComplex {
    complex: SimplicialComplex,
    subdivision: Subdivision,
    faces: Vec<Simplex>,
    in_s: Vec<bool>,
    /// (smaller face id, larger face id) pairs classified hard.
    hard: BTreeSet<(usize, usize)>,
}

impl std::fmt::Debug for MarkedComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MarkedComplex")
            .field("complex", &self.complex)
            .field("s_faces", &self.in_s)
            .field("hard", &self.hard)
            .finish()
    }
}

impl MarkedComplex {
    fn base(complex: SimplicialComplex, s_faces: &[Simplex]) -> Result<Self, MarkingError> {
        let subdivision = barycentric_subdivision(&complex);
        let faces = complex.faces().to_vec();
        let mut in_s = vec![false; faces.len()];
        for f in s_faces {
            let idx = faces
                .iter()
                .position(|x| x == f)
                .ok_or_else(|| MarkingError::FaceNotInComplex(f.clone()))?;
            in_s[idx] = true;
        }
        Ok(MarkedComplex {
            complex,
            subdivision,
            faces,
            in_s,
            hard: BTreeSet::new(),
        })
    }

    /// Every nested pair soft.
    pub fn all_soft(complex: SimplicialComplex, s_faces: &[Simplex]) -> Result<Self, MarkingError> {
        Self::base(complex, s_faces)
    }

    /// Constructible-case marking: a face pair inside `S` is hard exactly
    /// when both faces carry the same sign vector; differing vectors force
    /// some function to vanish on the smaller face while staying strict on
    /// the larger, which separates them.
    pub fn from_signs(
        complex: SimplicialComplex,
        s_faces: &[Simplex],
        assignment: &SignVectorAssignment,
    ) -> Result<Self, MarkingError> {
        let mut marked = Self::base(complex, s_faces)?;
        let s: Option<usize> = assignment.signs.values().next().map(Vec::len);
        for (face, vec) in &assignment.signs {
            if Some(vec.len()) != s {
                return Err(MarkingError::BadSignLength {
                    expected: s.unwrap_or(0),
                    got: vec.len(),
                });
            }
            if !marked.faces.contains(face) {
                return Err(MarkingError::FaceNotInComplex(face.clone()));
            }
        }
        let vector_of = |face: &Simplex| -> Result<&Vec<Sign>, MarkingError> {
            assignment
                .signs
                .get(face)
                .ok_or_else(|| MarkingError::MissingSignVector(face.clone()))
        };
        let s_ids: Vec<usize> = (0..marked.faces.len())
            .filter(|&i| marked.in_s[i])
            .collect();
        // Face compatibility first, then hardness by vector equality.
        for &small in &s_ids {
            for &big in &s_ids {
                if !marked.faces[small].is_proper_face_of(&marked.faces[big]) {
                    continue;
                }
                let v_small = vector_of(&marked.faces[small])?;
                let v_big = vector_of(&marked.faces[big])?;
                for (i, (&inner, &outer)) in v_small.iter().zip(v_big).enumerate() {
                    let clash = (outer == Sign::Pos && inner == Sign::Neg)
                        || (outer == Sign::Neg && inner == Sign::Pos);
                    if clash {
                        return Err(MarkingError::IncompatibleSigns {
                            function: i,
                            outer_face: marked.faces[big].clone(),
                            outer,
                            inner_face: marked.faces[small].clone(),
                            inner,
                        });
                    }
                }
                if v_small == v_big {
                    marked.hard.insert((small, big));
                }
            }
        }
        Ok(marked)
    }

    /// Marking with explicit hard pairs (by face id), e.g. from the text
    /// format. Pairs not listed stay soft.
    pub fn with_hard_pairs(
        complex: SimplicialComplex,
        s_faces: &[Simplex],
        hard_pairs: &[(usize, usize)],
    ) -> Result<Self, MarkingError> {
        let mut marked = Self::base(complex, s_faces)?;
        for &(small, big) in hard_pairs {
            if small >= marked.faces.len() || big >= marked.faces.len() {
                return Err(MarkingError::Parse {
                    line: 0,
                    msg: format!("face id out of range in pair ({small}, {big})"),
                });
            }
            marked.hard.insert((small, big));
        }
        Ok(marked)
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn subdivision(&self) -> &Subdivision {
        &self.subdivision
    }

    pub fn faces(&self) -> &[Simplex] {
        &self.faces
    }

    pub fn face_id(&self, face: &Simplex) -> Option<usize> {
        self.faces.iter().position(|f| f == face)
    }

    pub fn face_in_s(&self, id: usize) -> bool {
        self.in_s.get(id).copied().unwrap_or(false)
    }

    /// Hardness of the ordered pair (smaller face, larger face). A pair
    /// whose smaller face lies outside `S` is always soft.
    pub fn is_hard(&self, small: usize, big: usize) -> bool {
        self.face_in_s(small) && self.face_in_s(big) && self.hard.contains(&(small, big))
    }

    /// A barycentric simplex lies in the marked set exactly when the
    /// largest face of its flag does: its open simplex sits inside that
    /// open face.
    pub fn in_s_hat(&self, b: &Simplex) -> bool {
        let ids = self.subdivision.flag_ids(b);
        self.face_in_s(ids[0])
    }

    /// All simplices of the subdivision lying in the marked set.
    pub fn s_hat(&self) -> Vec<Simplex> {
        self.subdivision
            .complex
            .faces()
            .iter()
            .filter(|b| self.in_s_hat(b))
            .cloned()
            .collect()
    }

    /// The core of a flag (face ids ordered by strictly decreasing
    /// dimension): the longest prefix in which every face is hard in all
    /// faces before it. Empty when the simplex is outside the marked set.
    pub fn core_of_flag(&self, flag_ids: &[usize]) -> Vec<usize> {
        if flag_ids.is_empty() || !self.face_in_s(flag_ids[0]) {
            return Vec::new();
        }
        let mut core = vec![flag_ids[0]];
        for nu in 1..flag_ids.len() {
            if (0..nu).all(|mu| self.is_hard(flag_ids[nu], flag_ids[mu])) {
                core.push(flag_ids[nu]);
            } else {
                break;
            }
        }
        core
    }

    /// The core of a barycentric simplex.
    pub fn core(&self, b: &Simplex) -> Vec<usize> {
        self.core_of_flag(&self.subdivision.flag_ids(b))
    }

    /// The order on barycentric simplices: `b_prime` is at or above `b`
    /// when it is a proper face of `b` with a core disjoint from the core
    /// of `b`, or the two coincide.
    pub fn succ(&self, b_prime: &Simplex, b: &Simplex) -> bool {
        if b_prime == b {
            return true;
        }
        if !b_prime.is_proper_face_of(b) {
            return false;
        }
        let c1: BTreeSet<usize> = self.core(b_prime).into_iter().collect();
        let c2: BTreeSet<usize> = self.core(b).into_iter().collect();
        c1.intersection(&c2).next().is_none()
    }

    /// Strict form of [`Self::succ`].
    pub fn succ_strict(&self, b_prime: &Simplex, b: &Simplex) -> bool {
        b_prime != b && self.succ(b_prime, b)
    }

    /// Longest-chain ranks of the order on the marked subdivision: the
    /// overall rank, the rank of the sub-poset under each simplex, and the
    /// rank of the ideal each element generates. Lengths count steps, so a
    /// chain of r+1 elements has length r.
    pub fn ranks(&self) -> MarkingRanks {
        let s_hat = self.s_hat();
        let n = s_hat.len();
        let cores: Vec<BTreeSet<usize>> = s_hat
            .iter()
            .map(|b| self.core(b).into_iter().collect())
            .collect();
        let strict = |i: usize, j: usize| -> bool {
            // s_hat[i] strictly above s_hat[j]
            s_hat[i].is_proper_face_of(&s_hat[j])
                && cores[i].intersection(&cores[j]).next().is_none()
        };
        // Elements with larger simplices are lower in the order; process by
        // descending simplex dimension so dependencies resolve first.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(s_hat[i].vertices().len()));
        let mut elem_rank = vec![0usize; n];
        for &i in &order {
            for j in 0..n {
                if strict(i, j) {
                    elem_rank[i] = elem_rank[i].max(elem_rank[j] + 1);
                }
            }
        }
        let overall = elem_rank.iter().copied().max().unwrap_or(0);

        let mut per_simplex = BTreeMap::new();
        for (bi, b) in s_hat.iter().enumerate() {
            // Induced sub-poset on the faces of b that lie in the marked
            // set (b itself included).
            let members: Vec<usize> = (0..n)
                .filter(|&i| i == bi || s_hat[i].is_proper_face_of(b))
                .collect();
            let mut local = BTreeMap::new();
            let mut ord = members.clone();
            ord.sort_by_key(|&i| std::cmp::Reverse(s_hat[i].vertices().len()));
            for &i in &ord {
                let mut r = 0usize;
                for &j in &members {
                    if strict(i, j) {
                        r = r.max(local.get(&j).copied().unwrap_or(0) + 1);
                    }
                }
                local.insert(i, r);
            }
            let rank = local.values().copied().max().unwrap_or(0);
            per_simplex.insert(b.clone(), rank);
        }

        let per_element = s_hat
            .iter()
            .enumerate()
            .map(|(i, b)| (b.clone(), elem_rank[i]))
            .collect();
        MarkingRanks {
            rank: overall,
            per_simplex,
            per_element,
        }
    }
}

/// Output of [`MarkedComplex::ranks`].
pub struct MarkingRanks {
    /// Maximal chain length over the whole marked subdivision.
    pub rank: usize,
    /// Per simplex `B`: the rank of the induced sub-poset on the faces of
    /// `B` in the marked set.
    pub per_simplex: BTreeMap<Simplex, usize>,
    /// Per element: the longest chain with this element maximal.
    pub per_element: BTreeMap<Simplex, usize>,
}

/// The canonical marked triangle: vertex 0 at the corner of two coordinate
/// hyperplanes, vertex 1 on the first axis, vertex 2 on the second, with
/// the sign data of the closed quadrant over the functions (x, y).
pub fn quadrant_marking() -> (SimplicialComplex, SignVectorAssignment) {
    use Sign::{Pos, Zero};
    let sx = |v: &[crate::simplicial::VertexId]| Simplex::from_slice(v).unwrap();
    let k = crate::simplicial::build_complex(vec![sx(&[0, 1, 2])]).unwrap();
    let mut a = SignVectorAssignment::new();
    a.assign(sx(&[0]), vec![Zero, Zero]);
    a.assign(sx(&[1]), vec![Pos, Zero]);
    a.assign(sx(&[2]), vec![Zero, Pos]);
    a.assign(sx(&[0, 1]), vec![Pos, Zero]);
    a.assign(sx(&[0, 2]), vec![Zero, Pos]);
    a.assign(sx(&[1, 2]), vec![Pos, Pos]);
    a.assign(sx(&[0, 1, 2]), vec![Pos, Pos]);
    (k, a)
}

/// Parses marking lines `hard j' j` / `soft j' j` over face ids. Unlisted
/// pairs default to soft.
pub fn parse_marking(
    complex: SimplicialComplex,
    s_faces: &[Simplex],
    text: &str,
) -> Result<MarkedComplex, MarkingError> {
    let mut hard_pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let err = |msg: String| MarkingError::Parse {
            line: lineno + 1,
            msg,
        };
        if toks.len() != 3 {
            return Err(err("expected `hard j' j` or `soft j' j`".into()));
        }
        let small: usize = toks[1]
            .parse()
            .map_err(|_| err(format!("bad face id `{}`", toks[1])))?;
        let big: usize = toks[2]
            .parse()
            .map_err(|_| err(format!("bad face id `{}`", toks[2])))?;
        match toks[0] {
            "hard" => hard_pairs.push((small, big)),
            "soft" => {}
            other => return Err(err(format!("unknown marking `{other}`"))),
        }
    }
    MarkedComplex::with_hard_pairs(complex, s_faces, &hard_pairs)
}

/// Parses sign assignment lines `face <id> signs +0-`, ids referring to the
/// canonical face order of the complex.
pub fn parse_sign_assignment(
    complex: &SimplicialComplex,
    text: &str,
) -> Result<SignVectorAssignment, MarkingError> {
    let faces = complex.faces();
    let mut out = SignVectorAssignment::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let err = |msg: String| MarkingError::Parse {
            line: lineno + 1,
            msg,
        };
        if toks.len() != 4 || toks[0] != "face" || toks[2] != "signs" {
            return Err(err("expected `face <id> signs <vector>`".into()));
        }
        let id: usize = toks[1]
            .parse()
            .map_err(|_| err(format!("bad face id `{}`", toks[1])))?;
        let face = faces
            .get(id)
            .ok_or_else(|| err(format!("face id {id} out of range")))?;
        let vector = crate::sign::parse_vector(toks[3])
            .ok_or_else(|| err(format!("bad sign vector `{}`", toks[3])))?;
        out.assign(face.clone(), vector);
    }
    Ok(out)
}
