//! Exact integer simplicial homology via Smith normal form.
//!
//! The default pipeline runs a homotopy-preserving collapse pre-pass and
//! then diagonalizes the boundary matrices of the surviving faces over the
//! integers, so both free ranks and torsion are exact. An independent
//! rational-rank route ([`betti_rational`]) cross-checks the free part.

use std::collections::{BTreeMap, BTreeSet};

use num::{BigInt, BigRational, Signed, Zero};
use rayon::prelude::*;

use crate::reduce;
use crate::simplicial::{build_complex, Simplex, SimplicialComplex, VertexId};
use crate::Integer;

/// Per-degree free ranks plus torsion coefficients (invariant factors > 1,
/// each dividing the next).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiVector {
    pub free: Vec<usize>,
    pub torsion: Vec<Vec<Integer>>,
}

impl BettiVector {
    pub fn zeros(len: usize) -> Self {
        BettiVector {
            free: vec![0; len],
            torsion: vec![Vec::new(); len],
        }
    }

    pub fn len(&self) -> usize {
        self.free.len()
    }

    pub fn is_empty(&self) -> bool {
        self.free.is_empty()
    }

    pub fn rank(&self, k: usize) -> usize {
        self.free.get(k).copied().unwrap_or(0)
    }

    pub fn torsion_at(&self, k: usize) -> &[Integer] {
        self.torsion.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn has_torsion(&self) -> bool {
        self.torsion.iter().any(|t| !t.is_empty())
    }

    /// Truncates or zero-pads to exactly `len` degrees. Panics if a nonzero
    /// group would be dropped.
    pub fn resized(mut self, len: usize) -> Self {
        while self.free.len() > len {
            assert_eq!(self.free.pop(), Some(0), "dropping a nonzero Betti number");
            assert!(
                self.torsion.pop().map(|t| t.is_empty()).unwrap_or(true),
                "dropping torsion"
            );
        }
        while self.free.len() < len {
            self.free.push(0);
            self.torsion.push(Vec::new());
        }
        self
    }

    /// Reduced form: degree zero drops one (the complex is non-empty).
    pub fn reduced(&self) -> BettiVector {
        let mut out = self.clone();
        out.free[0] = out.free[0].saturating_sub(1);
        out
    }
}

/// Sparse integer matrix with row-major storage and a column occupancy
/// index, sized for exact elimination.
#[derive(Clone, Debug)]
pub struct IntMatrix {
    pub nrows: usize,
    pub ncols: usize,
    rows: Vec<BTreeMap<usize, BigInt>>,
}

impl IntMatrix {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        IntMatrix {
            nrows,
            ncols,
            rows: vec![BTreeMap::new(); nrows],
        }
    }

    pub fn from_dense(data: &[Vec<i64>]) -> Self {
        let nrows = data.len();
        let ncols = data.first().map(Vec::len).unwrap_or(0);
        let mut m = IntMatrix::new(nrows, ncols);
        for (i, row) in data.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    m.set(i, j, BigInt::from(v));
                }
            }
        }
        m
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        debug_assert!(i < self.nrows && j < self.ncols);
        if v.is_zero() {
            self.rows[i].remove(&j);
        } else {
            self.rows[i].insert(j, v);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        self.rows[i].get(&j).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn row(&self, i: usize) -> &BTreeMap<usize, BigInt> {
        &self.rows[i]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(BTreeMap::len).sum()
    }

    /// Exact product, used by the `boundary-of-boundary vanishes` check.
    pub fn multiply(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.ncols, other.nrows);
        let mut out = IntMatrix::new(self.nrows, other.ncols);
        for i in 0..self.nrows {
            let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
            for (&k, a) in &self.rows[i] {
                for (&j, b) in &other.rows[k] {
                    let e = acc.entry(j).or_insert_with(BigInt::zero);
                    *e += a * b;
                }
            }
            acc.retain(|_, v| !v.is_zero());
            out.rows[i] = acc;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BTreeMap::is_empty)
    }
}

/// Result of the Smith normal form: invariant factors `d1 | d2 | ...`
/// (all positive) and the rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub factors: Vec<Integer>,
    pub rank: usize,
}

/// Diagonalizes an integer matrix by unimodular row and column operations.
/// Pivot rule: smallest non-zero absolute value, ties by lowest (row, col);
/// deterministic for a fixed input.
pub fn smith_normal_form(matrix: &IntMatrix) -> SmithForm {
    let mut rows: Vec<BTreeMap<usize, BigInt>> = matrix.rows.clone();
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); matrix.ncols];
    for (i, row) in rows.iter().enumerate() {
        for &j in row.keys() {
            col_rows[j].insert(i);
        }
    }
    let mut live_row = vec![true; matrix.nrows];
    let mut live_col = vec![true; matrix.ncols];
    let mut factors: Vec<BigInt> = Vec::new();

    let find_pivot = |rows: &Vec<BTreeMap<usize, BigInt>>,
                      live_row: &Vec<bool>,
                      live_col: &Vec<bool>|
     -> Option<(usize, usize, BigInt)> {
        let mut best: Option<(BigInt, usize, usize)> = None;
        for (i, row) in rows.iter().enumerate() {
            if !live_row[i] {
                continue;
            }
            for (&j, v) in row {
                if !live_col[j] {
                    continue;
                }
                let a = v.abs();
                match &best {
                    Some((b, _, _)) if *b <= a => {}
                    _ => best = Some((a, i, j)),
                }
            }
        }
        best.map(|(v, i, j)| (i, j, v))
    };

    loop {
        let Some((pr, pc, _)) = find_pivot(&rows, &live_row, &live_col) else {
            break;
        };
        // Reduce the pivot column: subtract multiples of the pivot row.
        let mut clean = true;
        let col_members: Vec<usize> = col_rows[pc]
            .iter()
            .copied()
            .filter(|&i| i != pr && live_row[i])
            .collect();
        for i in col_members {
            let d = rows[pr][&pc].clone();
            let a = rows[i][&pc].clone();
            let q = &a / &d; // truncated: |a - q*d| < |d|
            if !q.is_zero() {
                let pivot_row: Vec<(usize, BigInt)> = rows[pr]
                    .iter()
                    .filter(|(j, _)| live_col[**j])
                    .map(|(&j, v)| (j, v.clone()))
                    .collect();
                for (j, v) in pivot_row {
                    let newv = rows[i].get(&j).cloned().unwrap_or_else(BigInt::zero) - &q * v;
                    if newv.is_zero() {
                        rows[i].remove(&j);
                        col_rows[j].remove(&i);
                    } else {
                        rows[i].insert(j, newv);
                        col_rows[j].insert(i);
                    }
                }
            }
            if rows[i].get(&pc).map(|v| !v.is_zero()).unwrap_or(false) {
                clean = false; // remainder survives; it is smaller than |d|
            }
        }
        if !clean {
            continue; // re-pick: some remainder is now the smallest entry
        }
        // Reduce the pivot row: subtract multiples of the pivot column.
        let row_members: Vec<usize> = rows[pr]
            .keys()
            .copied()
            .filter(|&j| j != pc && live_col[j])
            .collect();
        for j in row_members {
            let d = rows[pr][&pc].clone();
            let a = rows[pr][&j].clone();
            let q = &a / &d;
            if !q.is_zero() {
                // col_j -= q * col_pc, i.e. per row with an entry in pc.
                let members: Vec<usize> =
                    col_rows[pc].iter().copied().filter(|&i| live_row[i]).collect();
                for i in members {
                    let pv = rows[i][&pc].clone();
                    let newv =
                        rows[i].get(&j).cloned().unwrap_or_else(BigInt::zero) - &q * pv;
                    if newv.is_zero() {
                        rows[i].remove(&j);
                        col_rows[j].remove(&i);
                    } else {
                        rows[i].insert(j, newv);
                        col_rows[j].insert(i);
                    }
                }
            }
            if rows[pr].get(&j).map(|v| !v.is_zero()).unwrap_or(false) {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // Pivot row and column are singletons. Enforce divisibility before
        // finalizing: fold in a row containing a non-divisible entry.
        let d = rows[pr][&pc].clone();
        let mut offender: Option<usize> = None;
        'scan: for (i, row) in rows.iter().enumerate() {
            if !live_row[i] || i == pr {
                continue;
            }
            for (&j, v) in row {
                if live_col[j] && !(v % &d).is_zero() {
                    offender = Some(i);
                    break 'scan;
                }
            }
        }
        if let Some(i) = offender {
            // row_pr += row_i keeps the pivot but exposes the offending
            // entry to the elimination with a gcd-shrinking effect.
            let addend: Vec<(usize, BigInt)> = rows[i]
                .iter()
                .filter(|(j, _)| live_col[**j])
                .map(|(&j, v)| (j, v.clone()))
                .collect();
            for (j, v) in addend {
                let newv = rows[pr].get(&j).cloned().unwrap_or_else(BigInt::zero) + v;
                if newv.is_zero() {
                    rows[pr].remove(&j);
                    col_rows[j].remove(&pr);
                } else {
                    rows[pr].insert(j, newv);
                    col_rows[j].insert(pr);
                }
            }
            continue;
        }
        factors.push(d.abs());
        live_row[pr] = false;
        live_col[pc] = false;
    }

    debug_assert!(factors
        .windows(2)
        .all(|w| (&w[1] % &w[0]).is_zero()));
    let rank = factors.len();
    SmithForm { factors, rank }
}

/// Chain complex data: faces grouped by dimension in canonical order.
pub struct ChainComplex {
    pub faces_by_dim: Vec<Vec<Simplex>>,
}

impl ChainComplex {
    pub fn from_complex(k: &SimplicialComplex) -> Self {
        Self::from_faces(k.faces().to_vec())
    }

    /// Builds from a face list that is already closed under taking faces.
    pub fn from_faces(mut faces: Vec<Simplex>) -> Self {
        faces.sort_unstable_by(|a, b| {
            a.vertices()
                .len()
                .cmp(&b.vertices().len())
                .then_with(|| a.cmp(b))
        });
        let dim = faces.last().map(Simplex::dim).unwrap_or(0);
        let mut by_dim: Vec<Vec<Simplex>> = vec![Vec::new(); dim + 1];
        for f in faces {
            by_dim[f.dim()].push(f);
        }
        ChainComplex { faces_by_dim: by_dim }
    }

    pub fn dim(&self) -> usize {
        self.faces_by_dim.len() - 1
    }

    pub fn n_faces(&self, k: usize) -> usize {
        self.faces_by_dim.get(k).map(Vec::len).unwrap_or(0)
    }

    /// The degree-k boundary matrix: rows index (k-1)-faces, columns index
    /// k-faces, and column entries alternate sign under the ascending-vertex
    /// orientation. Degree 0 (or a degree beyond the dimension) is a zero
    /// map of the appropriate shape.
    pub fn boundary(&self, k: usize) -> IntMatrix {
        if k == 0 || k > self.dim() {
            return IntMatrix::new(
                if k >= 1 { self.n_faces(k - 1) } else { 0 },
                self.n_faces(k),
            );
        }
        let rows_faces = &self.faces_by_dim[k - 1];
        let cols_faces = &self.faces_by_dim[k];
        let row_index: BTreeMap<&Simplex, usize> =
            rows_faces.iter().enumerate().map(|(i, f)| (f, i)).collect();
        let mut m = IntMatrix::new(rows_faces.len(), cols_faces.len());
        for (j, f) in cols_faces.iter().enumerate() {
            for (drop, facet) in f.facets().iter().enumerate() {
                // facets() removes vertex `drop` of the ascending list.
                let i = row_index[facet];
                let sign = if drop % 2 == 0 { 1 } else { -1 };
                m.set(i, j, BigInt::from(sign));
            }
        }
        m
    }
}

fn betti_of_chain_complex(cc: &ChainComplex, out_dim: usize) -> BettiVector {
    let cdim = cc.dim();
    // Degrees are independent; compute their Smith forms concurrently and
    // collect in order.
    let forms: Vec<SmithForm> = (0..=cdim + 1)
        .into_par_iter()
        .map(|k| smith_normal_form(&cc.boundary(k)))
        .collect();
    let mut out = BettiVector::zeros(out_dim + 1);
    for k in 0..=cdim {
        let rank_k = forms[k].rank;
        let rank_k1 = forms[k + 1].rank;
        out.free[k] = cc.n_faces(k) - rank_k - rank_k1;
        out.torsion[k] = forms[k + 1]
            .factors
            .iter()
            .filter(|d| **d > BigInt::from(1))
            .cloned()
            .collect();
    }
    out
}

/// Integer Betti numbers and torsion of a complex. Runs the collapse
/// pre-pass first; the collapsed complex carries the same homology.
pub fn betti(k: &SimplicialComplex) -> BettiVector {
    let run = reduce::collapse_deterministic(k.faces());
    let cc = ChainComplex::from_faces(run.remaining);
    betti_of_chain_complex(&cc, k.dim())
}

/// Betti numbers of a bare closed face list (no collapse pre-pass).
pub fn betti_of_faces(faces: Vec<Simplex>, out_dim: usize) -> BettiVector {
    let cc = ChainComplex::from_faces(faces);
    betti_of_chain_complex(&cc, out_dim)
}

/// Reduced Betti numbers: degree 0 drops one.
pub fn reduced_betti(k: &SimplicialComplex) -> BettiVector {
    betti(k).reduced()
}

/// Rank over the rationals by exact Gaussian elimination. Independent of
/// the Smith normal form route.
pub fn rational_rank(matrix: &IntMatrix) -> usize {
    let mut rows: Vec<BTreeMap<usize, BigRational>> = matrix
        .rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|(&j, v)| (j, BigRational::from_integer(v.clone())))
                .collect()
        })
        .collect();
    let mut rank = 0usize;
    for col in 0..matrix.ncols {
        // First remaining row with a nonzero in this column.
        let Some(pivot_row) = (rank..rows.len()).find(|&i| rows[i].contains_key(&col)) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let pv = rows[rank][&col].clone();
        let targets: Vec<usize> = (rank + 1..rows.len())
            .filter(|&i| rows[i].contains_key(&col))
            .collect();
        for i in targets {
            let factor = &rows[i][&col] / &pv;
            let pivot_entries: Vec<(usize, BigRational)> =
                rows[rank].iter().map(|(&j, v)| (j, v.clone())).collect();
            for (j, v) in pivot_entries {
                let newv = rows[i]
                    .get(&j)
                    .cloned()
                    .unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
                    - &factor * v;
                if newv.is_zero() {
                    rows[i].remove(&j);
                } else {
                    rows[i].insert(j, newv);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Free Betti ranks over the rationals, computed on the raw boundary
/// matrices with no collapse and no Smith normal form.
pub fn betti_rational(k: &SimplicialComplex) -> Vec<usize> {
    let cc = ChainComplex::from_complex(k);
    let dim = cc.dim();
    let ranks: Vec<usize> = (0..=dim + 1)
        .into_par_iter()
        .map(|d| rational_rank(&cc.boundary(d)))
        .collect();
    (0..=dim)
        .map(|d| cc.n_faces(d) - ranks[d] - ranks[d + 1])
        .collect()
}

/// Connected components as sub-complexes, by 1-skeleton reachability.
pub fn connected_components(k: &SimplicialComplex) -> Vec<SimplicialComplex> {
    let vertices = k.vertices();
    let index: BTreeMap<VertexId, usize> =
        vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf = UnionFind::new(vertices.len());
    for m in k.maximal_simplices() {
        let vs = m.vertices();
        for w in vs.windows(2) {
            uf.union(index[&w[0]], index[&w[1]]);
        }
    }
    let mut groups: BTreeMap<usize, Vec<Simplex>> = BTreeMap::new();
    for m in k.maximal_simplices() {
        let root = uf.find(index[&m.vertices()[0]]);
        groups.entry(root).or_default().push(m.clone());
    }
    groups
        .into_values()
        .map(|sims| build_complex(sims).expect("non-empty component"))
        .collect()
}

/// Minimal union-find with path compression.
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    pub fn count_roots(&mut self, n: usize) -> usize {
        (0..n).filter(|&i| self.find(i) == i).count()
    }
}
