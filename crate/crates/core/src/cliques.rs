//! Bitset graphs, maximal-clique enumeration, and homology of clique
//! complexes through a truncated skeleton.
//!
//! Several constructions here reduce to the clique complex of a pairwise
//! compatibility graph: chain complexes of posets, the cap-bounded label
//! complexes, and nerves of box covers (boxes have Helly number two, so a
//! family of boxes intersects exactly when it intersects pairwise).

use std::collections::HashMap;

use num::BigInt;

use crate::homology::{smith_normal_form, BettiVector, IntMatrix, UnionFind};
use crate::simplicial::{build_complex, ComplexError, Simplex, SimplicialComplex, VertexId};

/// Undirected graph over vertices `0..n` with bitset adjacency rows.
#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<u64>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        Graph {
            n,
            adj: vec![vec![0u64; words]; n],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        debug_assert!(a != b && a < self.n && b < self.n);
        self.adj[a][b / 64] |= 1 << (b % 64);
        self.adj[b][a / 64] |= 1 << (a % 64);
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a][b / 64] & (1 << (b % 64)) != 0
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].iter().map(|w| w.count_ones() as usize).sum()
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.adj[v]
    }
}

fn bits_iter(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            }
        })
    })
}

fn and_assign(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d &= *s;
    }
}

fn is_zero(words: &[u64]) -> bool {
    words.iter().all(|&w| w == 0)
}

/// All maximal cliques, Bron-Kerbosch with pivoting. Deterministic output
/// (each clique ascending, cliques sorted).
pub fn maximal_cliques(g: &Graph) -> Vec<Vec<usize>> {
    let words = g.n.div_ceil(64);
    let mut all = vec![u64::MAX; words];
    if g.n % 64 != 0 && words > 0 {
        all[words - 1] = (1u64 << (g.n % 64)) - 1;
    }
    let mut out = Vec::new();
    let mut r: Vec<usize> = Vec::new();
    bron_kerbosch(g, &mut r, all.clone(), vec![0u64; words], &mut out);
    out.sort_unstable();
    out
}

fn bron_kerbosch(
    g: &Graph,
    r: &mut Vec<usize>,
    p: Vec<u64>,
    x: Vec<u64>,
    out: &mut Vec<Vec<usize>>,
) {
    if is_zero(&p) && is_zero(&x) {
        let mut clique = r.clone();
        clique.sort_unstable();
        out.push(clique);
        return;
    }
    // Pivot: vertex of P union X with the most neighbours inside P.
    let pivot = bits_iter(&p)
        .chain(bits_iter(&x))
        .max_by_key(|&u| {
            let mut cnt = 0usize;
            for (pw, nw) in p.iter().zip(g.row(u)) {
                cnt += (pw & nw).count_ones() as usize;
            }
            (cnt, usize::MAX - u) // ties: smallest vertex
        })
        .expect("P or X non-empty");
    let mut candidates = p.clone();
    for (c, nw) in candidates.iter_mut().zip(g.row(pivot)) {
        *c &= !nw;
    }
    let mut p = p;
    let mut x = x;
    for v in bits_iter(&candidates).collect::<Vec<_>>() {
        r.push(v);
        let mut p2 = p.clone();
        and_assign(&mut p2, g.row(v));
        let mut x2 = x.clone();
        and_assign(&mut x2, g.row(v));
        bron_kerbosch(g, r, p2, x2, out);
        r.pop();
        p[v / 64] &= !(1 << (v % 64));
        x[v / 64] |= 1 << (v % 64);
    }
}

/// The clique complex as a simplicial complex; vertex `i` of the graph maps
/// to the given id. Errors if some clique exceeds the dimension cap.
pub fn clique_complex(g: &Graph, ids: &[VertexId]) -> Result<SimplicialComplex, ComplexError> {
    assert_eq!(ids.len(), g.n);
    let mut sims = Vec::new();
    for clique in maximal_cliques(g) {
        sims.push(Simplex::new(clique.iter().map(|&v| ids[v]).collect())?);
    }
    build_complex(sims)
}

/// All cliques of exactly `k` vertices, each ascending, in lexicographic
/// order.
pub fn cliques_of_size(g: &Graph, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![];
    }
    let words = g.n.div_ceil(64);
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<usize>, Vec<u64>)> = Vec::new();
    for v in (0..g.n).rev() {
        // Candidates: neighbours above v.
        let mut cand = g.row(v).to_vec();
        mask_above(&mut cand, v, words);
        stack.push((vec![v], cand));
    }
    while let Some((clique, cand)) = stack.pop() {
        if clique.len() == k {
            out.push(clique);
            continue;
        }
        for v in bits_iter(&cand).collect::<Vec<_>>().into_iter().rev() {
            let mut cand2 = cand.clone();
            and_assign(&mut cand2, g.row(v));
            mask_above(&mut cand2, v, words);
            let mut c2 = clique.clone();
            c2.push(v);
            stack.push((c2, cand2));
        }
    }
    out
}

fn mask_above(words: &mut [u64], v: usize, n_words: usize) {
    let w = v / 64;
    for word in words.iter_mut().take(w) {
        *word = 0;
    }
    if w < n_words {
        let keep = if v % 64 == 63 {
            0
        } else {
            !((1u64 << ((v % 64) + 1)) - 1)
        };
        words[w] &= keep;
    }
}

/// Betti numbers (free and torsion) of the clique complex in degrees
/// `0..=max_degree`, computed from the skeleton of dimension
/// `max_degree + 1` only.
///
/// Degree 0 uses component counting, and the rank of the vertex-edge
/// boundary is `V - components`; graph incidence matrices are totally
/// unimodular so degree 0 never carries torsion. Higher degrees run Smith
/// normal form on the clique boundary matrices.
pub fn clique_skeleton_betti(g: &Graph, max_degree: usize) -> BettiVector {
    let mut out = BettiVector::zeros(max_degree + 1);
    if g.n == 0 {
        return out;
    }
    let mut uf = UnionFind::new(g.n);
    for a in 0..g.n {
        for b in bits_iter(g.row(a)) {
            if b > a {
                uf.union(a, b);
            }
        }
    }
    let components = uf.count_roots(g.n);
    out.free[0] = components;
    if max_degree == 0 {
        return out;
    }

    // Clique lists by size; cliques[s] holds the (s+1)-vertex cliques.
    let mut cliques: Vec<Vec<Vec<usize>>> = Vec::new();
    for size in 1..=max_degree + 2 {
        cliques.push(cliques_of_size(g, size));
    }
    let rank1 = g.n - components;
    let mut ranks: Vec<usize> = vec![0; max_degree + 3];
    let mut torsion: Vec<Vec<BigInt>> = vec![Vec::new(); max_degree + 3];
    ranks[1] = rank1;
    for deg in 2..=max_degree + 1 {
        let b = clique_boundary(&cliques[deg - 1], &cliques[deg]);
        let snf = smith_normal_form(&b);
        ranks[deg] = snf.rank;
        torsion[deg] = snf
            .factors
            .into_iter()
            .filter(|d| *d > BigInt::from(1))
            .collect();
    }
    for q in 1..=max_degree {
        let n_q = cliques[q].len();
        out.free[q] = n_q - ranks[q] - ranks[q + 1];
        out.torsion[q] = torsion[q + 1].clone();
    }
    out
}

fn clique_boundary(rows: &[Vec<usize>], cols: &[Vec<usize>]) -> IntMatrix {
    let index: HashMap<&[usize], usize> = rows
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_slice(), i))
        .collect();
    let mut m = IntMatrix::new(rows.len(), cols.len());
    for (j, c) in cols.iter().enumerate() {
        for drop in 0..c.len() {
            let mut facet = c.clone();
            facet.remove(drop);
            let i = index[facet.as_slice()];
            let sign = if drop % 2 == 0 { 1 } else { -1 };
            m.set(i, j, BigInt::from(sign));
        }
    }
    m
}

#[derive(Clone, Debug)]
pub struct UnionFindExt;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximal_cliques_of_a_square_with_diagonal() {
        // 0-1-2-3 cycle plus diagonal 0-2: cliques {0,1,2}, {0,2,3}.
        let mut g = Graph::new(4);
        for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)] {
            g.add_edge(a, b);
        }
        assert_eq!(maximal_cliques(&g), vec![vec![0, 1, 2], vec![0, 2, 3]]);
    }

    #[test]
    fn cliques_of_size_enumeration() {
        let mut g = Graph::new(4);
        for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)] {
            g.add_edge(a, b);
        }
        assert_eq!(cliques_of_size(&g, 1).len(), 4);
        assert_eq!(cliques_of_size(&g, 2).len(), 5);
        assert_eq!(cliques_of_size(&g, 3), vec![vec![0, 1, 2], vec![0, 2, 3]]);
        assert!(cliques_of_size(&g, 4).is_empty());
    }

    #[test]
    fn skeleton_betti_matches_full_homology() {
        // Hollow square: cycle of length 4, no triangles.
        let mut g = Graph::new(4);
        for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
            g.add_edge(a, b);
        }
        let b = clique_skeleton_betti(&g, 1);
        assert_eq!(b.free, vec![1, 1]);

        // Two disjoint triangles: filled by the clique complex.
        let mut g = Graph::new(6);
        for (a, b) in [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)] {
            g.add_edge(a, b);
        }
        let b = clique_skeleton_betti(&g, 1);
        assert_eq!(b.free, vec![2, 0]);
    }

    #[test]
    fn skeleton_betti_agrees_with_complex_route() {
        let mut g = Graph::new(5);
        for (a, b) in [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)] {
            g.add_edge(a, b);
        }
        let ids: Vec<u32> = (0..5).collect();
        let k = clique_complex(&g, &ids).unwrap();
        let full = crate::homology::betti(&k);
        let sk = clique_skeleton_betti(&g, k.dim());
        assert_eq!(full.free, sk.free);
    }
}
