//! Axis-aligned rational box complexes: adaptive interval-certified
//! approximation of closed formulas, exact set operations over shared
//! grids, coordinate projection, and a grid-compatible triangulation.

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Zero};
use rayon::prelude::*;

use crate::constructible::formula::{ClosedFormula, Tri};
use crate::constructible::polynomial::Interval;
use crate::constructible::ConstructibleError;
use crate::homology::UnionFind;
use crate::simplicial::{build_complex, Simplex, SimplicialComplex, VertexId};
use crate::Rational;

/// A closed axis-aligned box, possibly degenerate on some axes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RBox {
    pub lo: Vec<Rational>,
    pub hi: Vec<Rational>,
}

impl RBox {
    pub fn new(lo: Vec<Rational>, hi: Vec<Rational>) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert!(lo.iter().zip(&hi).all(|(l, h)| l <= h));
        RBox { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains_point(&self, x: &[Rational]) -> bool {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(x)
            .all(|((l, h), v)| l <= v && v <= h)
    }

    pub fn contains_box(&self, other: &RBox) -> bool {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(other.lo.iter().zip(&other.hi))
            .all(|((l, h), (ol, oh))| l <= ol && oh <= h)
    }

    /// Closed intersection; `None` when empty.
    pub fn intersect(&self, other: &RBox) -> Option<RBox> {
        let mut lo = Vec::with_capacity(self.dim());
        let mut hi = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let l = self.lo[i].clone().max(other.lo[i].clone());
            let h = self.hi[i].clone().min(other.hi[i].clone());
            if l > h {
                return None;
            }
            lo.push(l);
            hi.push(h);
        }
        Some(RBox { lo, hi })
    }

    pub fn meets(&self, other: &RBox) -> bool {
        (0..self.dim()).all(|i| {
            self.lo[i] <= other.hi[i] && other.lo[i] <= self.hi[i]
        })
    }

    pub fn intervals(&self) -> Vec<Interval> {
        self.lo
            .iter()
            .cloned()
            .zip(self.hi.iter().cloned())
            .collect()
    }
}

/// A finite union of closed boxes in a fixed ambient dimension, kept
/// sorted and free of boxes contained in other boxes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxComplex {
    dim: usize,
    boxes: Vec<RBox>,
}

impl BoxComplex {
    pub fn empty(dim: usize) -> Self {
        BoxComplex {
            dim,
            boxes: Vec::new(),
        }
    }

    pub fn new(dim: usize, boxes: Vec<RBox>) -> Self {
        for b in &boxes {
            assert_eq!(b.dim(), dim, "box dimension mismatch");
        }
        let mut c = BoxComplex { dim, boxes };
        c.reduce();
        c
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boxes(&self) -> &[RBox] {
        &self.boxes
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    /// Drops duplicate and contained boxes; sorts canonically.
    fn reduce(&mut self) {
        self.boxes.sort_unstable();
        self.boxes.dedup();
        let boxes = std::mem::take(&mut self.boxes);
        let kept: Vec<RBox> = boxes
            .iter()
            .enumerate()
            .filter(|(i, b)| {
                !boxes
                    .iter()
                    .enumerate()
                    .any(|(j, other)| j != *i && other != *b && other.contains_box(b))
            })
            .map(|(_, b)| b.clone())
            .collect();
        self.boxes = kept;
    }

    pub fn contains_point(&self, x: &[Rational]) -> bool {
        self.boxes.iter().any(|b| b.contains_point(x))
    }

    pub fn union(&self, other: &BoxComplex) -> BoxComplex {
        assert_eq!(self.dim, other.dim);
        let mut boxes = self.boxes.clone();
        boxes.extend(other.boxes.iter().cloned());
        BoxComplex::new(self.dim, boxes)
    }

    /// Pairwise closed intersection of the two unions.
    pub fn intersection(&self, other: &BoxComplex) -> BoxComplex {
        assert_eq!(self.dim, other.dim);
        let mut boxes = Vec::new();
        for a in &self.boxes {
            for b in &other.boxes {
                if let Some(c) = a.intersect(b) {
                    boxes.push(c);
                }
            }
        }
        BoxComplex::new(self.dim, boxes)
    }

    /// Exact set inclusion: every cell of the common refinement of `self`
    /// is inside some box of `other`.
    pub fn subset_of(&self, other: &BoxComplex) -> bool {
        assert_eq!(self.dim, other.dim);
        let cuts = axis_cuts(&[self, other]);
        for cell in refined_cells(self, &cuts) {
            let b = cell_box(&cell, &cuts);
            if !other.boxes.iter().any(|ob| ob.contains_box(&b)) {
                return false;
            }
        }
        true
    }

    pub fn set_eq(&self, other: &BoxComplex) -> bool {
        self.subset_of(other) && other.subset_of(self)
    }

    /// Number of connected components of the union: boxes are closed, so
    /// components are exactly the components of the pairwise-intersection
    /// graph.
    pub fn components(&self) -> usize {
        let n = self.boxes.len();
        let mut uf = UnionFind::new(n);
        for i in 0..n {
            for j in i + 1..n {
                if self.boxes[i].meets(&self.boxes[j]) {
                    uf.union(i, j);
                }
            }
        }
        uf.count_roots(n)
    }

    /// Total volume of the union (full-dimensional cells of the refinement).
    pub fn volume(&self) -> Rational {
        let cuts = axis_cuts(&[self]);
        let mut total = Rational::zero();
        for cell in refined_cells(self, &cuts) {
            let mut v = Rational::one();
            let mut full = true;
            for (axis, part) in cell.iter().enumerate() {
                match part {
                    CellAxis::Interval(i) => {
                        v *= cuts[axis][*i + 1].clone() - cuts[axis][*i].clone();
                    }
                    CellAxis::Point(_) => {
                        full = false;
                        break;
                    }
                }
            }
            if full {
                total += v;
            }
        }
        total
    }

    /// Keeps the first `n` coordinates of every box.
    pub fn project(&self, n: usize) -> BoxComplex {
        assert!(n >= 1 && n < self.dim);
        let boxes: Vec<RBox> = self
            .boxes
            .iter()
            .map(|b| RBox {
                lo: b.lo[..n].to_vec(),
                hi: b.hi[..n].to_vec(),
            })
            .collect();
        BoxComplex::new(n, boxes)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for b in &self.boxes {
            let axes: Vec<String> = b
                .lo
                .iter()
                .zip(&b.hi)
                .map(|(l, h)| format!("{l},{h}"))
                .collect();
            out.push_str(&axes.join("x"));
            out.push('\n');
        }
        out
    }
}

/// One axis of a refinement cell: either the interval between consecutive
/// cuts `i` and `i+1`, or the single cut point `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CellAxis {
    Interval(usize),
    Point(usize),
}

/// Sorted distinct cut coordinates per axis over the given complexes.
pub fn axis_cuts(complexes: &[&BoxComplex]) -> Vec<Vec<Rational>> {
    let dim = complexes[0].dim;
    let mut cuts: Vec<BTreeSet<Rational>> = vec![BTreeSet::new(); dim];
    for c in complexes {
        for b in &c.boxes {
            for i in 0..dim {
                cuts[i].insert(b.lo[i].clone());
                cuts[i].insert(b.hi[i].clone());
            }
        }
    }
    cuts.into_iter().map(|s| s.into_iter().collect()).collect()
}

/// All refinement cells covered by the complex: products over axes of cut
/// intervals or cut points; degenerate box axes yield point components.
pub fn refined_cells(c: &BoxComplex, cuts: &[Vec<Rational>]) -> BTreeSet<Vec<CellAxis>> {
    let mut out = BTreeSet::new();
    for b in &c.boxes {
        let mut axis_parts: Vec<Vec<CellAxis>> = Vec::with_capacity(c.dim);
        for axis in 0..c.dim {
            let lo_idx = cuts[axis].binary_search(&b.lo[axis]).expect("cut from box");
            let hi_idx = cuts[axis].binary_search(&b.hi[axis]).expect("cut from box");
            if lo_idx == hi_idx {
                axis_parts.push(vec![CellAxis::Point(lo_idx)]);
            } else {
                axis_parts.push((lo_idx..hi_idx).map(CellAxis::Interval).collect());
            }
        }
        let mut stack: Vec<Vec<CellAxis>> = vec![Vec::new()];
        for parts in &axis_parts {
            let mut next = Vec::with_capacity(stack.len() * parts.len());
            for prefix in &stack {
                for p in parts {
                    let mut cell = prefix.clone();
                    cell.push(*p);
                    next.push(cell);
                }
            }
            stack = next;
        }
        out.extend(stack);
    }
    out
}

fn cell_box(cell: &[CellAxis], cuts: &[Vec<Rational>]) -> RBox {
    let mut lo = Vec::with_capacity(cell.len());
    let mut hi = Vec::with_capacity(cell.len());
    for (axis, part) in cell.iter().enumerate() {
        match part {
            CellAxis::Interval(i) => {
                lo.push(cuts[axis][*i].clone());
                hi.push(cuts[axis][*i + 1].clone());
            }
            CellAxis::Point(i) => {
                lo.push(cuts[axis][*i].clone());
                hi.push(cuts[axis][*i].clone());
            }
        }
    }
    RBox { lo, hi }
}

/// Policy for cells still undecided at maximum depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Policy {
    /// Include undecided cells (outer approximation, the default).
    Outer,
    /// Exclude undecided cells (inner approximation).
    Inner,
    /// Error out when any cell stays undecided.
    Strict,
}

/// Adaptive dyadic bisection with exact interval certification. A cell is
/// kept when the formula is certified true on all of it, dropped when
/// certified false, and split otherwise; cells still undecided at
/// `max_depth` are resolved by the policy.
pub fn approximate(
    formula: &ClosedFormula,
    bounds: &RBox,
    max_depth: u32,
    policy: Policy,
) -> Result<BoxComplex, ConstructibleError> {
    if max_depth > 24 {
        return Err(ConstructibleError::DepthTooLarge(max_depth));
    }
    let dim = bounds.dim();
    let n_vars = formula.n_vars();
    if n_vars > dim {
        return Err(ConstructibleError::DimensionMismatch {
            expected: n_vars,
            got: dim,
        });
    }
    let polys: Vec<_> = formula.polys.iter().map(|p| p.padded(dim)).collect();
    let widths: Vec<Rational> = bounds
        .lo
        .iter()
        .zip(&bounds.hi)
        .map(|(l, h)| h.clone() - l.clone())
        .collect();

    let cell_intervals = |depth: u32, idx: &[u64]| -> Vec<Interval> {
        let scale = Rational::new(num::BigInt::one(), num::BigInt::from(1u64 << depth));
        (0..dim)
            .map(|a| {
                let lo = bounds.lo[a].clone()
                    + widths[a].clone() * scale.clone() * Rational::from_integer(idx[a].into());
                let hi = bounds.lo[a].clone()
                    + widths[a].clone()
                        * scale.clone()
                        * Rational::from_integer((idx[a] + 1).into());
                (lo, hi)
            })
            .collect()
    };

    let mut included: Vec<RBox> = Vec::new();
    let mut level: Vec<Vec<u64>> = vec![vec![0; dim]];
    for depth in 0..=max_depth {
        let verdicts: Vec<(Vec<Interval>, Tri)> = level
            .par_iter()
            .map(|idx| {
                let cell = cell_intervals(depth, idx);
                let enclosures: Vec<Interval> =
                    polys.iter().map(|p| p.eval_interval(&cell)).collect();
                let verdict = formula.eval_cell(&enclosures);
                (cell, verdict)
            })
            .collect();
        let mut next: Vec<Vec<u64>> = Vec::new();
        for (idx, (cell, verdict)) in level.iter().zip(verdicts) {
            match verdict {
                Tri::True => included.push(RBox {
                    lo: cell.iter().map(|(l, _)| l.clone()).collect(),
                    hi: cell.iter().map(|(_, h)| h.clone()).collect(),
                }),
                Tri::False => {}
                Tri::Unknown => {
                    if depth == max_depth {
                        match policy {
                            Policy::Outer => included.push(RBox {
                                lo: cell.iter().map(|(l, _)| l.clone()).collect(),
                                hi: cell.iter().map(|(_, h)| h.clone()).collect(),
                            }),
                            Policy::Inner => {}
                            Policy::Strict => {
                                return Err(ConstructibleError::DepthExceeded)
                            }
                        }
                    } else {
                        // Children in lexicographic order.
                        for corner in 0..(1u64 << dim) {
                            let child: Vec<u64> = idx
                                .iter()
                                .enumerate()
                                .map(|(a, &i)| 2 * i + ((corner >> (dim - 1 - a)) & 1))
                                .collect();
                            next.push(child);
                        }
                    }
                }
            }
        }
        level = next;
        if level.is_empty() {
            break;
        }
    }
    Ok(BoxComplex::new(dim, included))
}

/// Triangulates the union of boxes over the common refinement grid: each
/// full cell splits into `d!` simplices along sorted-coordinate paths, so
/// neighbouring cells agree on shared faces. Vertex ids index the lattice
/// points in lexicographic order.
pub fn triangulate(c: &BoxComplex) -> Option<(SimplicialComplex, Vec<Vec<Rational>>)> {
    if c.is_empty() {
        return None;
    }
    let cuts = axis_cuts(&[c]);
    let cells = refined_cells(c, &cuts);
    // Lattice points: cell corners.
    let mut points: BTreeSet<Vec<usize>> = BTreeSet::new();
    for cell in &cells {
        for corner in corners(cell) {
            points.insert(corner);
        }
    }
    let ids: BTreeMap<Vec<usize>, VertexId> = points
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i as VertexId))
        .collect();
    let mut simplices: Vec<Simplex> = Vec::new();
    for cell in &cells {
        let interval_axes: Vec<usize> = cell
            .iter()
            .enumerate()
            .filter_map(|(a, part)| match part {
                CellAxis::Interval(_) => Some(a),
                CellAxis::Point(_) => None,
            })
            .collect();
        let base: Vec<usize> = cell
            .iter()
            .map(|part| match part {
                CellAxis::Interval(i) | CellAxis::Point(i) => *i,
            })
            .collect();
        if interval_axes.is_empty() {
            simplices.push(Simplex::vertex(ids[&base]));
            continue;
        }
        for perm in permutations(&interval_axes) {
            let mut vertex = base.clone();
            let mut chain = vec![ids[&vertex]];
            for &axis in &perm {
                vertex[axis] += 1;
                chain.push(ids[&vertex]);
            }
            simplices.push(Simplex::new(chain).expect("distinct lattice points"));
        }
    }
    let complex = build_complex(simplices).expect("non-empty box complex");
    let coords: Vec<Vec<Rational>> = points
        .iter()
        .map(|p| {
            p.iter()
                .enumerate()
                .map(|(a, &i)| cuts[a][i].clone())
                .collect()
        })
        .collect();
    Some((complex, coords))
}

fn corners(cell: &[CellAxis]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for part in cell {
        let options: Vec<usize> = match part {
            CellAxis::Interval(i) => vec![*i, *i + 1],
            CellAxis::Point(i) => vec![*i],
        };
        let mut next = Vec::with_capacity(out.len() * options.len());
        for prefix in &out {
            for &o in &options {
                let mut c = prefix.clone();
                c.push(o);
                next.push(c);
            }
        }
        out = next;
    }
    out
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Binary PPM (P6) rasterization of a two-dimensional box set over the
/// given viewport; covered pixels are black.
pub fn raster_ppm(c: &BoxComplex, viewport: &RBox, width: usize, height: usize) -> Vec<u8> {
    assert_eq!(c.dim(), 2);
    let mut out = format!("P6\n{width} {height}\n255\n").into_bytes();
    let w = Rational::from_integer((width as i64).into());
    let h = Rational::from_integer((height as i64).into());
    let span_x = viewport.hi[0].clone() - viewport.lo[0].clone();
    let span_y = viewport.hi[1].clone() - viewport.lo[1].clone();
    for row in 0..height {
        // Image rows run top to bottom.
        let fy = Rational::from_integer((row as i64).into()) + crate::ratio(1, 2);
        let y = viewport.hi[1].clone() - span_y.clone() * fy / h.clone();
        for col in 0..width {
            let fx = Rational::from_integer((col as i64).into()) + crate::ratio(1, 2);
            let x = viewport.lo[0].clone() + span_x.clone() * fx / w.clone();
            let covered = c.contains_point(&[x.clone(), y.clone()]);
            let byte = if covered { 0u8 } else { 255u8 };
            out.extend_from_slice(&[byte, byte, byte]);
        }
    }
    out
}

/// Parses one box: axis ranges `lo,hi` joined by `x`, rational endpoints.
pub fn parse_box(text: &str) -> Result<RBox, ConstructibleError> {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for part in text.split('x') {
        let (l, h) = part
            .split_once(',')
            .ok_or_else(|| ConstructibleError::Parse {
                line: 1,
                col: 0,
                msg: format!("expected `lo,hi`, found `{part}`"),
            })?;
        let parse = |tok: &str| -> Result<Rational, ConstructibleError> {
            tok.trim().parse().map_err(|_| ConstructibleError::Parse {
                line: 1,
                col: 0,
                msg: format!("bad rational `{tok}`"),
            })
        };
        let (l, h) = (parse(l)?, parse(h)?);
        if l > h {
            return Err(ConstructibleError::Parse {
                line: 1,
                col: 0,
                msg: format!("empty range `{part}`"),
            });
        }
        lo.push(l);
        hi.push(h);
    }
    Ok(RBox { lo, hi })
}

/// Parses a box file: one box per line, `#` comments.
pub fn parse_box_file(text: &str) -> Result<BoxComplex, ConstructibleError> {
    let mut boxes = Vec::new();
    let mut dim = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let b = parse_box(line.trim()).map_err(|e| match e {
            ConstructibleError::Parse { col, msg, .. } => ConstructibleError::Parse {
                line: lineno + 1,
                col,
                msg,
            },
            other => other,
        })?;
        match dim {
            None => dim = Some(b.dim()),
            Some(d) if d == b.dim() => {}
            Some(d) => {
                return Err(ConstructibleError::Parse {
                    line: lineno + 1,
                    col: 0,
                    msg: format!("box dimension {} differs from {}", b.dim(), d),
                })
            }
        }
        boxes.push(b);
    }
    let dim = dim.ok_or_else(|| ConstructibleError::Parse {
        line: 1,
        col: 0,
        msg: "no boxes in file".into(),
    })?;
    Ok(BoxComplex::new(dim, boxes))
}
