//! Sparse multivariate polynomials over the rationals, with exact interval
//! evaluation. Interval endpoints are rationals, so enclosures are tight
//! per term and no rounding enters the decision path.

use std::fmt;

use num::{One, Zero};

use crate::constructible::ConstructibleError;
use crate::Rational;

pub type Interval = (Rational, Rational);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    n_vars: usize,
    /// (coefficient, exponent vector), exponent vectors distinct.
    terms: Vec<(Rational, Vec<u32>)>,
}

impl Polynomial {
    pub fn new(n_vars: usize, mut terms: Vec<(Rational, Vec<u32>)>) -> Self {
        for (_, e) in &mut terms {
            e.resize(n_vars, 0);
        }
        terms.sort_by(|a, b| a.1.cmp(&b.1));
        // Merge duplicate exponent vectors.
        let mut merged: Vec<(Rational, Vec<u32>)> = Vec::new();
        for (c, e) in terms {
            match merged.last_mut() {
                Some((mc, me)) if *me == e => *mc += c,
                _ => merged.push((c, e)),
            }
        }
        merged.retain(|(c, _)| !c.is_zero());
        Polynomial {
            n_vars,
            terms: merged,
        }
    }

    pub fn constant(n_vars: usize, c: Rational) -> Self {
        Polynomial::new(n_vars, vec![(c, vec![0; n_vars])])
    }

    /// The polynomial `x_i`.
    pub fn variable(n_vars: usize, i: usize) -> Self {
        let mut e = vec![0; n_vars];
        e[i] = 1;
        Polynomial::new(n_vars, vec![(Rational::one(), e)])
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn terms(&self) -> &[(Rational, Vec<u32>)] {
        &self.terms
    }

    /// Re-embeds into a larger ambient dimension.
    pub fn padded(&self, n_vars: usize) -> Polynomial {
        assert!(n_vars >= self.n_vars);
        Polynomial::new(n_vars, self.terms.clone())
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.n_vars);
        let mut total = Rational::zero();
        for (c, exps) in &self.terms {
            let mut term = c.clone();
            for (x, &e) in point.iter().zip(exps) {
                term *= rat_pow(x, e);
            }
            total += term;
        }
        total
    }

    /// Exact interval enclosure over an axis-aligned cell.
    pub fn eval_interval(&self, cell: &[Interval]) -> Interval {
        assert_eq!(cell.len(), self.n_vars);
        let mut total = (Rational::zero(), Rational::zero());
        for (c, exps) in &self.terms {
            let mut term = (c.clone(), c.clone());
            for ((lo, hi), &e) in cell.iter().zip(exps) {
                if e > 0 {
                    term = mul_interval(&term, &pow_interval(lo, hi, e));
                }
            }
            total = (total.0 + term.0, total.1 + term.1);
        }
        total
    }
}

pub fn rat_pow(x: &Rational, e: u32) -> Rational {
    let mut acc = Rational::one();
    let mut base = x.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base.clone();
        }
        base = base.clone() * base;
        e >>= 1;
    }
    acc
}

pub fn mul_interval(a: &Interval, b: &Interval) -> Interval {
    let products = [
        a.0.clone() * b.0.clone(),
        a.0.clone() * b.1.clone(),
        a.1.clone() * b.0.clone(),
        a.1.clone() * b.1.clone(),
    ];
    let lo = products.iter().min().expect("four products").clone();
    let hi = products.iter().max().expect("four products").clone();
    (lo, hi)
}

pub fn pow_interval(lo: &Rational, hi: &Rational, e: u32) -> Interval {
    if e == 0 {
        return (Rational::one(), Rational::one());
    }
    let plo = rat_pow(lo, e);
    let phi = rat_pow(hi, e);
    if e % 2 == 1 {
        (plo, phi)
    } else if *lo >= Rational::zero() {
        (plo, phi)
    } else if *hi <= Rational::zero() {
        (phi, plo)
    } else {
        (Rational::zero(), plo.max(phi))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, exps)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (v, &e) in exps.iter().enumerate() {
                if e == 1 {
                    write!(f, " x{v}")?;
                } else if e > 1 {
                    write!(f, " x{v}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// Parses a sparse polynomial: `+`-separated terms, each an optional
/// rational coefficient followed by `xN` or `xN^E` factors.
pub fn parse_polynomial(text: &str, line: usize) -> Result<Polynomial, ConstructibleError> {
    let mut terms: Vec<(Rational, Vec<u32>)> = Vec::new();
    let mut max_var = 0usize;
    for chunk in text.split('+') {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            return Err(ConstructibleError::Parse {
                line,
                col: 0,
                msg: "empty term".into(),
            });
        }
        let mut coeff = Rational::one();
        let mut exps: Vec<(usize, u32)> = Vec::new();
        for tok in chunk.split_whitespace() {
            if let Some(rest) = tok.strip_prefix('x') {
                let (var, exp) = match rest.split_once('^') {
                    Some((v, e)) => (v, e),
                    None => (rest, "1"),
                };
                let v: usize = var.parse().map_err(|_| ConstructibleError::Parse {
                    line,
                    col: 0,
                    msg: format!("bad variable `{tok}`"),
                })?;
                let e: u32 = exp.parse().map_err(|_| ConstructibleError::Parse {
                    line,
                    col: 0,
                    msg: format!("bad exponent `{tok}`"),
                })?;
                max_var = max_var.max(v + 1);
                exps.push((v, e));
            } else {
                let c: Rational = tok.parse().map_err(|_| ConstructibleError::Parse {
                    line,
                    col: 0,
                    msg: format!("bad coefficient `{tok}`"),
                })?;
                coeff *= c;
            }
        }
        let mut evec = vec![0u32; max_var];
        for (v, e) in exps {
            if evec.len() <= v {
                evec.resize(v + 1, 0);
            }
            evec[v] += e;
        }
        terms.push((coeff, evec));
    }
    let n_vars = terms.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
    Ok(Polynomial::new(n_vars, terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;

    #[test]
    fn parse_eval_roundtrip() {
        // x0^2 + x1^2 - 1
        let p = parse_polynomial("1 x0^2 + 1 x1^2 + -1", 1).unwrap();
        assert_eq!(p.n_vars(), 2);
        assert_eq!(p.eval(&[ratio(3, 5), ratio(4, 5)]), ratio(0, 1));
        assert_eq!(p.eval(&[ratio(1, 1), ratio(1, 1)]), ratio(1, 1));
    }

    #[test]
    fn interval_power_handles_signs() {
        assert_eq!(
            pow_interval(&ratio(-2, 1), &ratio(3, 1), 2),
            (ratio(0, 1), ratio(9, 1))
        );
        assert_eq!(
            pow_interval(&ratio(-3, 1), &ratio(-1, 1), 2),
            (ratio(1, 1), ratio(9, 1))
        );
        assert_eq!(
            pow_interval(&ratio(-2, 1), &ratio(3, 1), 3),
            (ratio(-8, 1), ratio(27, 1))
        );
    }

    #[test]
    fn interval_enclosure_is_sound_on_samples() {
        let p = parse_polynomial("1 x0^2 + -1 x0 x1 + 2", 1).unwrap();
        let cell = [(ratio(-1, 1), ratio(1, 1)), (ratio(0, 1), ratio(2, 1))];
        let (lo, hi) = p.eval_interval(&cell);
        // Corner and midpoint samples stay inside the enclosure.
        for x in [ratio(-1, 1), ratio(0, 1), ratio(1, 2), ratio(1, 1)] {
            for y in [ratio(0, 1), ratio(1, 1), ratio(2, 1)] {
                let v = p.eval(&[x.clone(), y]);
                assert!(lo <= v && v <= hi);
            }
        }
    }

    #[test]
    fn duplicate_exponents_merge() {
        let p = Polynomial::new(
            1,
            vec![(ratio(1, 1), vec![1]), (ratio(2, 1), vec![1])],
        );
        assert_eq!(p.terms().len(), 1);
        assert_eq!(p.terms()[0].0, ratio(3, 1));
    }
}
