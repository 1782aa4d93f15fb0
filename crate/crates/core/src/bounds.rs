//! Exact calculators for the explicit Betti-number bound formulas, with
//! every asymptotic constant exposed as a parameter (default 1). Results
//! are arbitrary precision integers; when a rational constant makes a
//! power non-integral the value rounds up, which preserves upper bounds.

use num::{BigInt, BigRational, Integer as _, One, Signed, Zero};
use thiserror::Error;

use crate::{Integer, Rational};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundsError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Parameters shared by the bound formulas: ambient dimension `n`, number
/// of distinct functions `s`, degree `d`, homology degree `k`, extra
/// projected coordinates `r`, an optional Pfaffian complexity triple
/// `(length, alpha, beta)`, and the constant standing in for the
/// unspecified asymptotic factor.
#[derive(Clone, Debug)]
pub struct BoundParams {
    pub n: u64,
    pub s: u64,
    pub d: u64,
    pub k: u64,
    pub r: u64,
    pub pfaffian: Option<(u64, u64, u64)>,
    pub c: Rational,
}

impl Default for BoundParams {
    fn default() -> Self {
        BoundParams {
            n: 1,
            s: 1,
            d: 1,
            k: 0,
            r: 0,
            pfaffian: None,
            c: Rational::one(),
        }
    }
}

impl BoundParams {
    fn validate(&self) -> Result<(), BoundsError> {
        if self.n < 1 {
            return Err(BoundsError::InvalidParams("n must be at least 1".into()));
        }
        if self.c <= Rational::zero() {
            return Err(BoundsError::InvalidParams("c must be positive".into()));
        }
        Ok(())
    }

    /// The duality coefficient `min(k+1, n-k, s)`.
    pub fn nu(&self) -> Result<u64, BoundsError> {
        self.validate()?;
        if self.k > self.n {
            return Err(BoundsError::InvalidParams("k must not exceed n".into()));
        }
        Ok((self.k + 1).min(self.n - self.k).min(self.s))
    }
}

fn big(x: u64) -> Integer {
    BigInt::from(x)
}

fn pow_int(base: &Integer, e: u64) -> Integer {
    num::pow::pow(base.clone(), e as usize)
}

fn pow_rat(base: &Rational, e: u64) -> Rational {
    num::pow::pow(base.clone(), e as usize)
}

/// Ceiling of a non-negative rational.
fn ceil_to_int(x: &Rational) -> Integer {
    debug_assert!(!x.is_negative());
    let (num, den) = (x.numer(), x.denom());
    let (q, r) = num.div_rem(den);
    if r.is_zero() {
        q
    } else {
        q + BigInt::one()
    }
}

/// Rounded-up value of `(c * base)^e`.
fn o_power(c: &Rational, base: u64, e: u64) -> Integer {
    let scaled = c.clone() * BigRational::from_integer(big(base));
    ceil_to_int(&pow_rat(&scaled, e))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassicalVariant {
    /// Conjunction of equations: `d (2d-1)^(n-1)`.
    Equations,
    /// Conjunction of non-strict inequalities: `(s d + 1)^n`.
    Nonstrict,
    /// Conjunction of equations and strict inequalities: `(c s d)^n`.
    Mixed,
}

pub fn classical_bound(variant: ClassicalVariant, p: &BoundParams) -> Result<Integer, BoundsError> {
    p.validate()?;
    if p.d < 1 || p.s < 1 {
        return Err(BoundsError::InvalidParams("s and d must be at least 1".into()));
    }
    Ok(match variant {
        ClassicalVariant::Equations => big(p.d) * pow_int(&big(2 * p.d - 1), p.n - 1),
        ClassicalVariant::Nonstrict => pow_int(&big(p.s * p.d + 1), p.n),
        ClassicalVariant::Mixed => o_power(&p.c, p.s * p.d, p.n),
    })
}

/// The per-degree bound `(c nu s d)^n` with `nu = min(k+1, n-k, s)`.
pub fn gv_bound_k(p: &BoundParams) -> Result<Integer, BoundsError> {
    let nu = p.nu()?;
    if p.d < 1 || p.s < 1 {
        return Err(BoundsError::InvalidParams("s and d must be at least 1".into()));
    }
    Ok(o_power(&p.c, nu * p.s * p.d, p.n))
}

/// The projection bound and its quantifier-elimination comparison value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionBound {
    /// `sum_{p=0}^{k} (c (p+1)(k+1) s d)^(n + (p+1) r)`
    pub value: Integer,
    /// `(s d)^(ceil(c_qe n^2 r))`, the elimination-based comparison.
    pub qe_comparison: Integer,
    pub terms: Vec<Integer>,
}

pub fn projection_bound(p: &BoundParams, c_qe: &Rational) -> Result<ProjectionBound, BoundsError> {
    p.validate()?;
    if p.r < 1 {
        return Err(BoundsError::InvalidParams("r must be at least 1".into()));
    }
    if p.d < 1 || p.s < 1 {
        return Err(BoundsError::InvalidParams("s and d must be at least 1".into()));
    }
    let mut terms = Vec::with_capacity(p.k as usize + 1);
    let mut total = Integer::zero();
    for pp in 0..=p.k {
        let base = (pp + 1) * (p.k + 1) * p.s * p.d;
        let exponent = p.n + (pp + 1) * p.r;
        let term = o_power(&p.c, base, exponent);
        total += term.clone();
        terms.push(term);
    }
    let qe_exp = ceil_to_int(&(c_qe.clone() * BigRational::from_integer(big(p.n * p.n * p.r))));
    let qe_exp_u64 = u64::try_from(&qe_exp).map_err(|_| {
        BoundsError::InvalidParams("quantifier-elimination exponent overflow".into())
    })?;
    let qe_comparison = pow_int(&big(p.s * p.d), qe_exp_u64);
    Ok(ProjectionBound {
        value: total,
        qe_comparison,
        terms,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PfaffianVariant {
    /// `s^n 2^(l(l-1)/2) (c (n b + min(n,l) a))^(n+l)`
    Total,
    /// `(nu s)^n 2^(l(l-1)/2) (c (n b + min(n,l) a))^(n+l)`
    DegreeK,
    /// `(k s)^(ceil(c (n+(k+1)r))) 2^(ceil((c k l)^2))
    ///  ((n+(k+1)r)(a+b))^(n+(k+1)r+k l)`
    Projection,
}

pub fn pfaffian_bounds(variant: PfaffianVariant, p: &BoundParams) -> Result<Integer, BoundsError> {
    p.validate()?;
    let (ell, alpha, beta) = p
        .pfaffian
        .ok_or_else(|| BoundsError::InvalidParams("pfaffian parameters required".into()))?;
    if p.s < 1 {
        return Err(BoundsError::InvalidParams("s must be at least 1".into()));
    }
    let two_power = pow_int(&big(2), ell * (ell.saturating_sub(1)) / 2);
    let o_base = p.n * beta + p.n.min(ell) * alpha;
    match variant {
        PfaffianVariant::Total => {
            Ok(pow_int(&big(p.s), p.n) * two_power * o_power(&p.c, o_base, p.n + ell))
        }
        PfaffianVariant::DegreeK => {
            let nu = p.nu()?;
            Ok(pow_int(&big(nu * p.s), p.n) * two_power * o_power(&p.c, o_base, p.n + ell))
        }
        PfaffianVariant::Projection => {
            if p.r < 1 {
                return Err(BoundsError::InvalidParams("r must be at least 1".into()));
            }
            let m = p.n + (p.k + 1) * p.r;
            let e1 = ceil_to_int(&(p.c.clone() * BigRational::from_integer(big(m))));
            let e1 = u64::try_from(&e1)
                .map_err(|_| BoundsError::InvalidParams("exponent overflow".into()))?;
            let ckl = p.c.clone() * BigRational::from_integer(big(p.k * ell));
            let e2 = ceil_to_int(&(ckl.clone() * ckl));
            let e2 = u64::try_from(&e2)
                .map_err(|_| BoundsError::InvalidParams("exponent overflow".into()))?;
            let tail = pow_int(&big(m * (alpha + beta)), m + p.k * ell);
            Ok(pow_int(&big(p.k * p.s), e1) * pow_int(&big(2), e2) * tail)
        }
    }
}

/// Number of shifted functions describing a telescope: `4 (k+1) s`.
pub fn telescope_polynomial_count(k: u64, s: u64) -> u64 {
    4 * (k + 1) * s
}

/// Number of shifted functions describing a fibred power of a telescope:
/// `4 (p+1) (k+1) s`.
pub fn fibred_polynomial_count(p: u64, k: u64, s: u64) -> u64 {
    4 * (p + 1) * (k + 1) * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;

    fn params(n: u64, s: u64, d: u64, k: u64, r: u64) -> BoundParams {
        BoundParams {
            n,
            s,
            d,
            k,
            r,
            ..Default::default()
        }
    }

    #[test]
    fn classical_values() {
        assert_eq!(
            classical_bound(ClassicalVariant::Equations, &params(3, 1, 2, 0, 0)).unwrap(),
            big(18)
        );
        assert_eq!(
            classical_bound(ClassicalVariant::Nonstrict, &params(2, 2, 1, 0, 0)).unwrap(),
            big(9)
        );
        assert_eq!(
            classical_bound(ClassicalVariant::Mixed, &params(5, 1, 1, 0, 0)).unwrap(),
            big(1)
        );
    }

    #[test]
    fn nu_definition_and_symmetry() {
        assert_eq!(params(3, 5, 1, 1, 0).nu().unwrap(), 2);
        assert_eq!(params(4, 9, 1, 0, 0).nu().unwrap(), 1);
        // nu(k) = nu(n-k-1) when s is large: sweep a few shapes.
        for n in 1..=6u64 {
            for k in 0..n {
                let a = params(n, 100, 2, k, 0).nu().unwrap();
                let b = params(n, 100, 2, n - k - 1, 0).nu().unwrap();
                assert_eq!(a, b, "n={n} k={k}");
                assert_eq!(
                    gv_bound_k(&params(n, 100, 2, k, 0)).unwrap(),
                    gv_bound_k(&params(n, 100, 2, n - k - 1, 0)).unwrap()
                );
            }
        }
    }

    #[test]
    fn projection_bound_worked_example() {
        // n=2, r=1, k=1, s=d=2, c=1: 8^3 + 16^4 = 66048.
        let b = projection_bound(&params(2, 2, 2, 1, 1), &ratio(1, 1)).unwrap();
        assert_eq!(b.terms, vec![big(512), big(65536)]);
        assert_eq!(b.value, big(66048));
        // Comparison value at c_qe = 1: (sd)^(n^2 r) = 4^4.
        assert_eq!(b.qe_comparison, big(256));
    }

    #[test]
    fn projection_k0_is_a_single_term() {
        // Single term (c s d)^(n + r) at k = 0.
        let b = projection_bound(&params(3, 2, 2, 0, 2), &ratio(1, 1)).unwrap();
        assert_eq!(b.terms.len(), 1);
        assert_eq!(b.value, o_power(&ratio(1, 1), 4, 5));
    }

    #[test]
    fn polynomial_counts() {
        assert_eq!(telescope_polynomial_count(1, 3), 24);
        assert_eq!(fibred_polynomial_count(1, 1, 3), 48);
    }

    #[test]
    fn pfaffian_degenerate_and_identity_cases() {
        // l = 0 collapses the 2-power and the min term.
        let mut p = params(3, 2, 1, 0, 0);
        p.pfaffian = Some((0, 7, 5));
        let total = pfaffian_bounds(PfaffianVariant::Total, &p).unwrap();
        assert_eq!(total, pow_int(&big(2), 3) * pow_int(&big(15), 3));
        // nu = 1 makes the degree-k variant equal the total variant.
        let mut p1 = params(4, 1, 1, 0, 0);
        p1.pfaffian = Some((2, 3, 4));
        assert_eq!(
            pfaffian_bounds(PfaffianVariant::DegreeK, &p1).unwrap(),
            pfaffian_bounds(PfaffianVariant::Total, &p1).unwrap()
        );
    }

    #[test]
    fn bounds_are_monotone_in_each_parameter() {
        let base = params(3, 2, 2, 1, 1);
        let grid = |f: &dyn Fn(&BoundParams) -> Integer| {
            for ds in 0..3u64 {
                for dd in 0..3u64 {
                    for dn in 0..2u64 {
                        let mut p = base.clone();
                        p.s += ds;
                        p.d += dd;
                        p.n += dn;
                        let v0 = f(&base);
                        let v1 = f(&p);
                        assert!(v1 >= v0, "monotonicity failed at +{ds},+{dd},+{dn}");
                    }
                }
            }
        };
        grid(&|p| classical_bound(ClassicalVariant::Nonstrict, p).unwrap());
        grid(&|p| classical_bound(ClassicalVariant::Mixed, p).unwrap());
        grid(&|p| gv_bound_k(p).unwrap());
        grid(&|p| projection_bound(p, &ratio(1, 1)).unwrap().value);
        // Mixed bound grows with the constant too.
        let mut pc = base.clone();
        pc.c = ratio(3, 2);
        assert!(
            classical_bound(ClassicalVariant::Mixed, &pc).unwrap()
                >= classical_bound(ClassicalVariant::Mixed, &base).unwrap()
        );
        // Pfaffian variants, sweeping k from 1 for the projection form.
        for dk in 1..3u64 {
            for dl in 0..3u64 {
                let mut p = base.clone();
                p.k = dk;
                p.pfaffian = Some((1 + dl, 2, 3));
                let v = pfaffian_bounds(PfaffianVariant::Projection, &p).unwrap();
                let mut bigger = p.clone();
                bigger.pfaffian = Some((2 + dl, 2, 3));
                let w = pfaffian_bounds(PfaffianVariant::Projection, &bigger).unwrap();
                assert!(w >= v);
            }
        }
    }

    #[test]
    fn gv_bound_below_mixed_with_scaled_s() {
        // (c nu s d)^n equals the mixed bound with s replaced by nu*s.
        for n in 1..=4u64 {
            for k in 0..n {
                for s in 1..=4u64 {
                    let p = params(n, s, 2, k, 0);
                    let nu = p.nu().unwrap();
                    let scaled = params(n, nu * s, 2, 0, 0);
                    assert_eq!(
                        gv_bound_k(&p).unwrap(),
                        classical_bound(ClassicalVariant::Mixed, &scaled).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn invalid_params_are_rejected() {
        let mut p = params(2, 1, 1, 3, 0);
        assert!(p.nu().is_err());
        p.k = 0;
        p.c = ratio(-1, 1);
        assert!(classical_bound(ClassicalVariant::Mixed, &p).is_err());
        assert!(pfaffian_bounds(PfaffianVariant::Total, &params(2, 1, 1, 0, 0)).is_err());
    }
}
