//! Fibred powers of a box complex over a coordinate projection, and the
//! spectral-sequence upper bound on Betti numbers of the projection.

use thiserror::Error;

use crate::constructible::{box_betti_nerve_upto, box_homology, BoxComplex, RBox};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpectralError {
    #[error("base dimension must satisfy 1 <= n < ambient dimension")]
    BadBaseDimension,
    #[error("fibred power order {0} exceeds the supported cap 4")]
    PowerTooLarge(usize),
    #[error("box complex is empty")]
    EmptyComplex,
}

/// The (p+1)-fold fibred power of a box union over its projection to the
/// first `n` coordinates. Every box is determined by one shared base box
/// and p+1 fiber blocks.
#[derive(Clone, Debug)]
pub struct FibredPower {
    pub base_dim: usize,
    pub fiber_dim: usize,
    pub p: usize,
    pub complex: BoxComplex,
}

/// Enumerates ordered (p+1)-tuples of boxes whose base shadows intersect
/// pairwise (intervals have the Helly property, so the common base
/// intersection is then non-empty) and emits
/// `(shared base) x fiber_0 x ... x fiber_p`.
pub fn fibred_power(t: &BoxComplex, n: usize, p: usize) -> Result<FibredPower, SpectralError> {
    if n < 1 || n >= t.dim() {
        return Err(SpectralError::BadBaseDimension);
    }
    if p > 4 {
        return Err(SpectralError::PowerTooLarge(p));
    }
    if t.is_empty() {
        return Err(SpectralError::EmptyComplex);
    }
    let r = t.dim() - n;
    let shadows: Vec<RBox> = t
        .boxes()
        .iter()
        .map(|b| RBox::new(b.lo[..n].to_vec(), b.hi[..n].to_vec()))
        .collect();
    let fibers: Vec<RBox> = t
        .boxes()
        .iter()
        .map(|b| RBox::new(b.lo[n..].to_vec(), b.hi[n..].to_vec()))
        .collect();
    let count = t.len();
    let mut out: Vec<RBox> = Vec::new();
    let mut tuple = vec![0usize; p + 1];
    'tuples: loop {
        // Pairwise base intersection, accumulated left to right.
        let mut base = shadows[tuple[0]].clone();
        let mut ok = true;
        for &i in &tuple[1..] {
            match base.intersect(&shadows[i]) {
                Some(b) => base = b,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let mut lo = base.lo.clone();
            let mut hi = base.hi.clone();
            for &i in &tuple {
                lo.extend(fibers[i].lo.iter().cloned());
                hi.extend(fibers[i].hi.iter().cloned());
            }
            out.push(RBox::new(lo, hi));
        }
        // Next tuple in lexicographic order.
        for slot in (0..=p).rev() {
            tuple[slot] += 1;
            if tuple[slot] < count {
                continue 'tuples;
            }
            tuple[slot] = 0;
            if slot == 0 {
                break 'tuples;
            }
        }
    }
    Ok(FibredPower {
        base_dim: n,
        fiber_dim: r,
        p,
        complex: BoxComplex::new(n + (p + 1) * r, out),
    })
}

/// The per-(p, q) table and total of the spectral upper bound
/// `sum over p+q=k of b_q(W_p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralBound {
    pub k: usize,
    pub total: usize,
    /// (p, q, b_q(W_p)) for p + q = k.
    pub table: Vec<(usize, usize, usize)>,
}

/// Computes `sum_{p+q=k} b_q(W_p)` with fibred-power homology through the
/// nerve route, which stays exact in the high ambient dimensions of the
/// larger powers.
pub fn spectral_upper_bound(
    t: &BoxComplex,
    n: usize,
    k: usize,
) -> Result<SpectralBound, SpectralError> {
    let mut table = Vec::with_capacity(k + 1);
    let mut total = 0usize;
    for p in 0..=k {
        let q = k - p;
        let w = fibred_power(t, n, p)?;
        let b = box_betti_nerve_upto(&w.complex, q);
        let rank = b.rank(q);
        table.push((p, q, rank));
        total += rank;
    }
    Ok(SpectralBound { k, total, table })
}

/// Both sides of the inequality: the k-th Betti number of the projection
/// against the fibred-power bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InequalityReport {
    pub lhs: usize,
    pub rhs: usize,
    pub holds: bool,
    pub table: Vec<(usize, usize, usize)>,
}

/// Computes `b_k` of the projected complex (grid triangulation route) and
/// compares it with the spectral bound (nerve route); the two sides take
/// independent paths through the homology backend.
pub fn check_inequality(
    t: &BoxComplex,
    n: usize,
    k: usize,
) -> Result<InequalityReport, SpectralError> {
    let projected = t.project(n);
    let lhs = box_homology(&projected).rank(k);
    let bound = spectral_upper_bound(t, n, k)?;
    Ok(InequalityReport {
        lhs,
        rhs: bound.total,
        holds: lhs <= bound.total,
        table: bound.table,
    })
}

/// The worked two-box example used across the tests: two boxes in the
/// plane with overlapping shadows but disjoint fibers.
pub fn two_box_example() -> BoxComplex {
    use crate::ratio;
    let b1 = RBox::new(vec![ratio(0, 1), ratio(0, 1)], vec![ratio(2, 1), ratio(1, 1)]);
    let b2 = RBox::new(vec![ratio(1, 1), ratio(2, 1)], vec![ratio(3, 1), ratio(3, 1)]);
    BoxComplex::new(2, vec![b1, b2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructible::box_betti_nerve;

    #[test]
    fn zeroth_power_is_the_complex_itself() {
        let t = two_box_example();
        let w0 = fibred_power(&t, 1, 0).unwrap();
        assert_eq!(w0.complex.len(), t.len());
        assert_eq!(
            box_betti_nerve(&w0.complex).free,
            box_betti_nerve(&t).free
        );
    }

    #[test]
    fn two_box_example_matches_hand_counts() {
        let t = two_box_example();
        let w1 = fibred_power(&t, 1, 1).unwrap();
        assert_eq!(w1.complex.len(), 4);
        assert_eq!(box_betti_nerve_upto(&w1.complex, 0).rank(0), 4);

        let k0 = check_inequality(&t, 1, 0).unwrap();
        assert_eq!((k0.lhs, k0.rhs), (1, 2));
        assert!(k0.holds);

        let k1 = check_inequality(&t, 1, 1).unwrap();
        assert_eq!((k1.lhs, k1.rhs), (0, 4));
        assert!(k1.holds);
    }

    #[test]
    fn single_box_bound_is_tight_at_zero() {
        use crate::ratio;
        let t = BoxComplex::new(
            2,
            vec![RBox::new(
                vec![ratio(0, 1), ratio(0, 1)],
                vec![ratio(1, 1), ratio(1, 1)],
            )],
        );
        let k0 = check_inequality(&t, 1, 0).unwrap();
        assert_eq!((k0.lhs, k0.rhs), (1, 1));
        // At k = 1 the sum still carries b_0(W_1) = 1 for a non-empty
        // complex; the projection of a single box stays contractible.
        let k1 = check_inequality(&t, 1, 1).unwrap();
        assert_eq!(k1.lhs, 0);
        assert_eq!(k1.rhs, 1);
        assert!(k1.holds);
    }

    #[test]
    fn disjoint_shadows_leave_only_diagonal_tuples() {
        use crate::ratio;
        let b1 = RBox::new(vec![ratio(0, 1), ratio(0, 1)], vec![ratio(1, 1), ratio(1, 1)]);
        let b2 = RBox::new(vec![ratio(5, 1), ratio(0, 1)], vec![ratio(6, 1), ratio(1, 1)]);
        let t = BoxComplex::new(2, vec![b1, b2]);
        let w1 = fibred_power(&t, 1, 1).unwrap();
        assert_eq!(w1.complex.len(), 2);
    }

    #[test]
    fn fiber_block_permutation_preserves_betti() {
        let t = two_box_example();
        let w1 = fibred_power(&t, 1, 1).unwrap();
        // Swap the two fiber blocks of every box.
        let swapped: Vec<RBox> = w1
            .complex
            .boxes()
            .iter()
            .map(|b| {
                let n = 1;
                let r = 1;
                let mut lo = b.lo[..n].to_vec();
                let mut hi = b.hi[..n].to_vec();
                lo.extend(b.lo[n + r..n + 2 * r].iter().cloned());
                lo.extend(b.lo[n..n + r].iter().cloned());
                hi.extend(b.hi[n + r..n + 2 * r].iter().cloned());
                hi.extend(b.hi[n..n + r].iter().cloned());
                RBox::new(lo, hi)
            })
            .collect();
        let swapped = BoxComplex::new(w1.complex.dim(), swapped);
        assert_eq!(
            box_betti_nerve(&w1.complex).free,
            box_betti_nerve(&swapped).free
        );
    }

    #[test]
    fn power_cap_and_dimension_checks() {
        let t = two_box_example();
        assert_eq!(
            fibred_power(&t, 2, 0).unwrap_err(),
            SpectralError::BadBaseDimension
        );
        assert_eq!(
            fibred_power(&t, 1, 5).unwrap_err(),
            SpectralError::PowerTooLarge(5)
        );
    }
}
