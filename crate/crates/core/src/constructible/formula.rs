//! Boolean sign formulas over a polynomial table, their satisfying sign
//! vectors, and the closed threshold relaxations.

use num::{One, Zero};

use crate::constructible::polynomial::{parse_polynomial, Interval, Polynomial};
use crate::constructible::ConstructibleError;
use crate::sign::Sign;
use crate::Rational;

/// Relation of an atom against zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Zero,
    Pos,
    Neg,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormulaNode {
    Atom { poly: usize, rel: Rel },
    And(Vec<FormulaNode>),
    Or(Vec<FormulaNode>),
    Not(Box<FormulaNode>),
}

/// A Boolean combination of sign conditions over a shared function table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignFormula {
    pub polys: Vec<Polynomial>,
    pub root: FormulaNode,
}

impl SignFormula {
    pub fn n_vars(&self) -> usize {
        self.polys.iter().map(Polynomial::n_vars).max().unwrap_or(0)
    }

    /// Truth of the formula under a fixed sign per function.
    pub fn eval_signs(&self, signs: &[Sign]) -> bool {
        eval_node(&self.root, signs)
    }
}

fn eval_node(node: &FormulaNode, signs: &[Sign]) -> bool {
    match node {
        FormulaNode::Atom { poly, rel } => match rel {
            Rel::Zero => signs[*poly] == Sign::Zero,
            Rel::Pos => signs[*poly] == Sign::Pos,
            Rel::Neg => signs[*poly] == Sign::Neg,
        },
        FormulaNode::And(children) => children.iter().all(|c| eval_node(c, signs)),
        FormulaNode::Or(children) => children.iter().any(|c| eval_node(c, signs)),
        FormulaNode::Not(child) => !eval_node(child, signs),
    }
}

/// All sign vectors satisfying the formula as a truth assignment. Purely
/// syntactic: geometric emptiness of a sign set is not decided here.
pub fn sign_sets(f: &SignFormula) -> Result<Vec<Vec<Sign>>, ConstructibleError> {
    let s = f.polys.len();
    if s > 16 {
        return Err(ConstructibleError::TooManyFunctions(s));
    }
    let mut out = Vec::new();
    let total = 3usize.pow(s as u32);
    for code in 0..total {
        let mut c = code;
        let mut v = Vec::with_capacity(s);
        for _ in 0..s {
            v.push(match c % 3 {
                0 => Sign::Neg,
                1 => Sign::Zero,
                _ => Sign::Pos,
            });
            c /= 3;
        }
        if f.eval_signs(&v) {
            out.push(v);
        }
    }
    Ok(out)
}

/// Closed atoms over the shared table; no strict inequalities, no negation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosedAtom {
    /// poly >= threshold
    Ge(usize, Rational),
    /// poly <= threshold
    Le(usize, Rational),
    /// lo <= poly <= hi
    Between(usize, Rational, Rational),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosedNode {
    Atom(ClosedAtom),
    And(Vec<ClosedNode>),
    Or(Vec<ClosedNode>),
}

/// A positive Boolean combination of closed threshold conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedFormula {
    pub polys: Vec<Polynomial>,
    pub root: ClosedNode,
}

/// Three-valued verdict of interval evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tri {
    True,
    False,
    Unknown,
}

impl ClosedFormula {
    pub fn n_vars(&self) -> usize {
        self.polys.iter().map(Polynomial::n_vars).max().unwrap_or(0)
    }

    pub fn eval_point(&self, x: &[Rational]) -> bool {
        let values: Vec<Rational> = self.polys.iter().map(|p| p.padded(x.len()).eval(x)).collect();
        eval_closed_point(&self.root, &values)
    }

    /// Certifies the formula over a cell from precomputed per-function
    /// enclosures.
    pub fn eval_cell(&self, enclosures: &[Interval]) -> Tri {
        eval_closed_cell(&self.root, enclosures)
    }
}

fn eval_closed_point(node: &ClosedNode, values: &[Rational]) -> bool {
    match node {
        ClosedNode::Atom(ClosedAtom::Ge(p, c)) => values[*p] >= *c,
        ClosedNode::Atom(ClosedAtom::Le(p, c)) => values[*p] <= *c,
        ClosedNode::Atom(ClosedAtom::Between(p, lo, hi)) => {
            *lo <= values[*p] && values[*p] <= *hi
        }
        ClosedNode::And(children) => children.iter().all(|c| eval_closed_point(c, values)),
        ClosedNode::Or(children) => children.iter().any(|c| eval_closed_point(c, values)),
    }
}

fn eval_closed_cell(node: &ClosedNode, enc: &[Interval]) -> Tri {
    match node {
        ClosedNode::Atom(atom) => {
            let (p, lo_req, hi_req) = match atom {
                ClosedAtom::Ge(p, c) => (*p, Some(c.clone()), None),
                ClosedAtom::Le(p, c) => (*p, None, Some(c.clone())),
                ClosedAtom::Between(p, lo, hi) => (*p, Some(lo.clone()), Some(hi.clone())),
            };
            let (lo, hi) = &enc[p];
            let ok_lo = lo_req.as_ref().map(|c| lo >= c);
            let ok_hi = hi_req.as_ref().map(|c| hi <= c);
            let fail_lo = lo_req.as_ref().map(|c| hi < c);
            let fail_hi = hi_req.as_ref().map(|c| lo > c);
            if ok_lo.unwrap_or(true) && ok_hi.unwrap_or(true) {
                Tri::True
            } else if fail_lo.unwrap_or(false) || fail_hi.unwrap_or(false) {
                Tri::False
            } else {
                Tri::Unknown
            }
        }
        ClosedNode::And(children) => {
            let mut verdict = Tri::True;
            for c in children {
                match eval_closed_cell(c, enc) {
                    Tri::False => return Tri::False,
                    Tri::Unknown => verdict = Tri::Unknown,
                    Tri::True => {}
                }
            }
            verdict
        }
        ClosedNode::Or(children) => {
            let mut verdict = Tri::False;
            for c in children {
                match eval_closed_cell(c, enc) {
                    Tri::True => return Tri::True,
                    Tri::Unknown => verdict = Tri::Unknown,
                    Tri::False => {}
                }
            }
            verdict
        }
    }
}

/// Relaxes the formula per satisfying sign vector: strict inequalities move
/// to `delta`-thresholds, and equations either stay exact (no `eps`) or
/// widen to the `eps`-band. The result is the disjunction over sign sets of
/// the conjunction of relaxed atoms, one per function.
pub fn relax(
    f: &SignFormula,
    delta: &Rational,
    eps: Option<&Rational>,
) -> Result<ClosedFormula, ConstructibleError> {
    if *delta <= Rational::zero() || *delta >= Rational::one() {
        return Err(ConstructibleError::BadThresholds);
    }
    if let Some(eps) = eps {
        if *eps <= Rational::zero() || eps >= delta {
            return Err(ConstructibleError::BadThresholds);
        }
    }
    let vectors = sign_sets(f)?;
    let mut disjuncts = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut conjuncts = Vec::with_capacity(v.len());
        for (i, s) in v.iter().enumerate() {
            conjuncts.push(ClosedNode::Atom(match s {
                Sign::Pos => ClosedAtom::Ge(i, delta.clone()),
                Sign::Neg => ClosedAtom::Le(i, -delta.clone()),
                Sign::Zero => match eps {
                    Some(e) => ClosedAtom::Between(i, -e.clone(), e.clone()),
                    None => ClosedAtom::Between(i, Rational::zero(), Rational::zero()),
                },
            }));
        }
        disjuncts.push(ClosedNode::And(conjuncts));
    }
    Ok(ClosedFormula {
        polys: f.polys.clone(),
        root: ClosedNode::Or(disjuncts),
    })
}

/// Adds the bounding-ball clause for unbounded sets: conjoins the condition
/// `|x|^2 <= 1/delta` as a new table function constrained non-negative.
pub fn compactify(f: &SignFormula, delta: &Rational) -> Result<SignFormula, ConstructibleError> {
    if *delta <= Rational::zero() {
        return Err(ConstructibleError::BadThresholds);
    }
    let n = f.n_vars();
    let mut terms: Vec<(Rational, Vec<u32>)> = vec![(
        Rational::one() / delta.clone(),
        vec![0; n],
    )];
    for i in 0..n {
        let mut e = vec![0u32; n];
        e[i] = 2;
        terms.push((-Rational::one(), e));
    }
    let ball = Polynomial::new(n, terms);
    let mut polys: Vec<Polynomial> = f.polys.iter().map(|p| p.padded(n)).collect();
    let ball_idx = polys.len();
    polys.push(ball);
    let root = FormulaNode::And(vec![
        f.root.clone(),
        FormulaNode::Or(vec![
            FormulaNode::Atom {
                poly: ball_idx,
                rel: Rel::Pos,
            },
            FormulaNode::Atom {
                poly: ball_idx,
                rel: Rel::Zero,
            },
        ]),
    ]);
    Ok(SignFormula { polys, root })
}

/// Whether the box contains the closed ball of squared radius `1/delta`
/// centered at the origin, axis by axis.
pub fn box_contains_ball(lo: &[Rational], hi: &[Rational], delta: &Rational) -> bool {
    let r2 = Rational::one() / delta.clone();
    lo.iter()
        .zip(hi)
        .all(|(l, h)| l.clone() * l.clone() >= r2 && *l <= Rational::zero() && h.clone() * h.clone() >= r2 && *h >= Rational::zero())
}

/// Parses the formula file format: `pN: <sparse polynomial>` table lines,
/// remaining content an s-expression
/// `form := atom | (and form+) | (or form+) | (not form)`,
/// `atom := ( rel pN )`, `rel := = | > | <`.
pub fn parse_formula_file(text: &str) -> Result<SignFormula, ConstructibleError> {
    let mut table: Vec<(usize, Polynomial)> = Vec::new();
    let mut formula_text = String::new();
    let mut formula_start_line = 1usize;
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some((head, tail)) = trimmed.split_once(':') {
            if let Some(id_text) = head.trim().strip_prefix('p') {
                if let Ok(id) = id_text.parse::<usize>() {
                    if id == 0 {
                        return Err(ConstructibleError::Parse {
                            line: lineno + 1,
                            col: 0,
                            msg: "polynomial ids start at p1".into(),
                        });
                    }
                    table.push((id, parse_polynomial(tail, lineno + 1)?));
                    continue;
                }
            }
        }
        if formula_text.is_empty() {
            formula_start_line = lineno + 1;
        }
        formula_text.push_str(line);
        formula_text.push(' ');
    }
    table.sort_by_key(|(id, _)| *id);
    for (expect, (id, _)) in table.iter().enumerate() {
        if *id != expect + 1 {
            return Err(ConstructibleError::Parse {
                line: 1,
                col: 0,
                msg: format!("polynomial table must be contiguous p1..pN, missing p{}", expect + 1),
            });
        }
    }
    let n_vars = table
        .iter()
        .map(|(_, p)| p.n_vars())
        .max()
        .unwrap_or(0);
    let polys: Vec<Polynomial> = table.into_iter().map(|(_, p)| p.padded(n_vars)).collect();
    let root = parse_sexpr(&formula_text, formula_start_line, polys.len())?;
    Ok(SignFormula { polys, root })
}

fn parse_sexpr(
    text: &str,
    line: usize,
    n_polys: usize,
) -> Result<FormulaNode, ConstructibleError> {
    let mut tokens = tokenize(text);
    let node = parse_form(&mut tokens, line, n_polys)?;
    if let Some((tok, col)) = tokens.first() {
        return Err(ConstructibleError::Parse {
            line,
            col: *col,
            msg: format!("unexpected trailing `{tok}`"),
        });
    }
    Ok(node)
}

fn tokenize(text: &str) -> Vec<(String, usize)> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut start = 0usize;
    for (i, c) in text.char_indices() {
        match c {
            '(' | ')' => {
                if !current.is_empty() {
                    out.push((std::mem::take(&mut current), start));
                }
                out.push((c.to_string(), i));
            }
            c if c.is_whitespace() => {
                if !current.is_empty() {
                    out.push((std::mem::take(&mut current), start));
                }
            }
            _ => {
                if current.is_empty() {
                    start = i;
                }
                current.push(c);
            }
        }
    }
    if !current.is_empty() {
        out.push((current, start));
    }
    out
}

fn parse_form(
    tokens: &mut Vec<(String, usize)>,
    line: usize,
    n_polys: usize,
) -> Result<FormulaNode, ConstructibleError> {
    let err = |col: usize, msg: String| ConstructibleError::Parse { line, col, msg };
    if tokens.is_empty() {
        return Err(err(0, "unexpected end of formula".into()));
    }
    let (tok, col) = tokens.remove(0);
    if tok != "(" {
        return Err(err(col, format!("expected `(`, found `{tok}`")));
    }
    if tokens.is_empty() {
        return Err(err(col, "unbalanced parentheses".into()));
    }
    let (head, head_col) = tokens.remove(0);
    match head.as_str() {
        "and" | "or" => {
            let mut children = Vec::new();
            while tokens.first().map(|(t, _)| t != ")").unwrap_or(false) {
                children.push(parse_form(tokens, line, n_polys)?);
            }
            if tokens.is_empty() {
                return Err(err(head_col, "unbalanced parentheses".into()));
            }
            tokens.remove(0); // `)`
            if children.is_empty() {
                return Err(err(head_col, format!("`{head}` needs at least one operand")));
            }
            Ok(if head == "and" {
                FormulaNode::And(children)
            } else {
                FormulaNode::Or(children)
            })
        }
        "not" => {
            let child = parse_form(tokens, line, n_polys)?;
            match tokens.first() {
                Some((t, _)) if t == ")" => {
                    tokens.remove(0);
                }
                _ => return Err(err(head_col, "unbalanced parentheses".into())),
            }
            Ok(FormulaNode::Not(Box::new(child)))
        }
        "=" | ">" | "<" => {
            let (pref, pcol) = tokens
                .first()
                .cloned()
                .ok_or_else(|| err(head_col, "atom needs a polynomial reference".into()))?;
            tokens.remove(0);
            let idx: usize = pref
                .strip_prefix('p')
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err(pcol, format!("expected polynomial reference, found `{pref}`")))?;
            if idx == 0 || idx > n_polys {
                return Err(err(pcol, format!("polynomial p{idx} not in table")));
            }
            match tokens.first() {
                Some((t, _)) if t == ")" => {
                    tokens.remove(0);
                }
                _ => return Err(err(head_col, "unbalanced parentheses".into())),
            }
            let rel = match head.as_str() {
                "=" => Rel::Zero,
                ">" => Rel::Pos,
                _ => Rel::Neg,
            };
            Ok(FormulaNode::Atom {
                poly: idx - 1,
                rel,
            })
        }
        other => Err(err(head_col, format!("unknown operator `{other}`"))),
    }
}

/// The canonical closed-quadrant example: the union of the four sign sets
/// of (x0, x1) that make up the first closed quadrant.
pub fn quadrant_formula() -> SignFormula {
    let polys = vec![Polynomial::variable(2, 0), Polynomial::variable(2, 1)];
    let atom = |poly: usize, rel: Rel| FormulaNode::Atom { poly, rel };
    let root = FormulaNode::Or(vec![
        FormulaNode::And(vec![atom(0, Rel::Pos), atom(1, Rel::Pos)]),
        FormulaNode::And(vec![atom(0, Rel::Pos), atom(1, Rel::Zero)]),
        FormulaNode::And(vec![atom(0, Rel::Zero), atom(1, Rel::Pos)]),
        FormulaNode::And(vec![atom(0, Rel::Zero), atom(1, Rel::Zero)]),
    ]);
    SignFormula { polys, root }
}

/// Text of the quadrant example in the formula file format.
pub fn quadrant_formula_text() -> String {
    "# closed quadrant as a union of sign sets\n\
     p1: 1 x0\n\
     p2: 1 x1\n\
     (or (and (> p1) (> p2))\n\
    \x20    (and (> p1) (= p2))\n\
    \x20    (and (= p1) (> p2))\n\
    \x20    (and (= p1) (= p2)))\n"
        .to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;
    use Sign::{Neg, Pos, Zero};

    #[test]
    fn parse_simple_conjunction() {
        let f = parse_formula_file("p1: 1 x0\np2: 1 x1\n(and (> p1) (= p2))\n").unwrap();
        assert_eq!(f.polys.len(), 2);
        assert!(f.eval_signs(&[Pos, Zero]));
        assert!(!f.eval_signs(&[Pos, Pos]));
    }

    #[test]
    fn quadrant_sign_sets() {
        let f = quadrant_formula();
        let sets = sign_sets(&f).unwrap();
        let expect: Vec<Vec<Sign>> = vec![
            vec![Zero, Zero],
            vec![Pos, Zero],
            vec![Zero, Pos],
            vec![Pos, Pos],
        ];
        assert_eq!(sets.len(), 4);
        for e in expect {
            assert!(sets.contains(&e));
        }
        let parsed = parse_formula_file(&quadrant_formula_text()).unwrap();
        assert_eq!(sign_sets(&parsed).unwrap(), sets);
    }

    #[test]
    fn contradiction_has_no_sign_sets() {
        let f = parse_formula_file("p1: 1 x0\n(and (> p1) (< p1))\n").unwrap();
        assert!(sign_sets(&f).unwrap().is_empty());
    }

    #[test]
    fn single_strict_atom() {
        let f = parse_formula_file("p1: 1 x0\n(> p1)\n").unwrap();
        assert_eq!(sign_sets(&f).unwrap(), vec![vec![Pos]]);
    }

    #[test]
    fn unbalanced_parens_is_an_error() {
        let err = parse_formula_file("p1: 1 x0\n(and (> p1)\n").unwrap_err();
        assert!(matches!(err, ConstructibleError::Parse { .. }));
    }

    #[test]
    fn negation_is_supported_at_depth() {
        let f = parse_formula_file("p1: 1 x0\n(not (or (> p1) (< p1)))\n").unwrap();
        assert_eq!(sign_sets(&f).unwrap(), vec![vec![Zero]]);
    }

    #[test]
    fn relax_substitutes_thresholds() {
        // Sign set (+, 0) with delta = 1/10, eps = 1/100.
        let f = parse_formula_file("p1: 1 x0\np2: 1 x1\n(and (> p1) (= p2))\n").unwrap();
        let c = relax(&f, &ratio(1, 10), Some(&ratio(1, 100))).unwrap();
        let ClosedNode::Or(disjuncts) = &c.root else {
            panic!("relaxation is a disjunction");
        };
        assert_eq!(disjuncts.len(), 1);
        let ClosedNode::And(atoms) = &disjuncts[0] else {
            panic!("per-vector conjunction");
        };
        assert_eq!(
            atoms[0],
            ClosedNode::Atom(ClosedAtom::Ge(0, ratio(1, 10)))
        );
        assert_eq!(
            atoms[1],
            ClosedNode::Atom(ClosedAtom::Between(1, ratio(-1, 100), ratio(1, 100)))
        );
    }

    #[test]
    fn relax_keeps_equations_without_eps() {
        let f = parse_formula_file("p1: 1 x0\n(= p1)\n").unwrap();
        let c = relax(&f, &ratio(1, 10), None).unwrap();
        let ClosedNode::Or(d) = &c.root else { panic!() };
        let ClosedNode::And(a) = &d[0] else { panic!() };
        assert_eq!(
            a[0],
            ClosedNode::Atom(ClosedAtom::Between(0, ratio(0, 1), ratio(0, 1)))
        );
    }

    #[test]
    fn relax_rejects_bad_thresholds() {
        let f = parse_formula_file("p1: 1 x0\n(> p1)\n").unwrap();
        assert_eq!(
            relax(&f, &ratio(1, 10), Some(&ratio(1, 2))).unwrap_err(),
            ConstructibleError::BadThresholds
        );
    }

    #[test]
    fn relax_of_contradiction_is_unsatisfiable() {
        let f = parse_formula_file("p1: 1 x0\n(and (> p1) (< p1))\n").unwrap();
        let c = relax(&f, &ratio(1, 10), None).unwrap();
        assert_eq!(c.root, ClosedNode::Or(vec![]));
        assert!(!c.eval_point(&[ratio(5, 1)]));
    }

    #[test]
    fn compactify_adds_the_ball_clause() {
        // One variable, delta = 1/4: the clause is x^2 <= 4.
        let f = parse_formula_file("p1: 1 x0\n(> p1)\n").unwrap();
        let g = compactify(&f, &ratio(1, 4)).unwrap();
        assert_eq!(g.polys.len(), 2);
        let ball = &g.polys[1];
        assert_eq!(ball.eval(&[ratio(0, 1)]), ratio(4, 1));
        assert_eq!(ball.eval(&[ratio(2, 1)]), ratio(0, 1));
        assert_eq!(ball.eval(&[ratio(3, 1)]), ratio(-5, 1));
        // Satisfying vectors now constrain the ball function to >= 0.
        let sets = sign_sets(&g).unwrap();
        assert!(sets
            .iter()
            .all(|v| v[0] == Pos && (v[1] == Pos || v[1] == Zero)));
        assert!(!sets.iter().any(|v| v[1] == Neg));
    }

    #[test]
    fn closed_formula_point_and_cell_eval_agree() {
        let f = quadrant_formula();
        let c = relax(&f, &ratio(1, 10), Some(&ratio(1, 100))).unwrap();
        assert!(c.eval_point(&[ratio(1, 2), ratio(1, 2)]));
        assert!(!c.eval_point(&[ratio(-1, 2), ratio(1, 2)]));
        // A cell entirely inside the relaxed quadrant certifies true.
        let enc: Vec<Interval> = c
            .polys
            .iter()
            .map(|p| {
                p.eval_interval(&[
                    (ratio(1, 2), ratio(3, 4)),
                    (ratio(1, 2), ratio(3, 4)),
                ])
            })
            .collect();
        assert_eq!(c.eval_cell(&enc), Tri::True);
        let enc: Vec<Interval> = c
            .polys
            .iter()
            .map(|p| {
                p.eval_interval(&[
                    (ratio(-3, 4), ratio(-1, 2)),
                    (ratio(1, 2), ratio(3, 4)),
                ])
            })
            .collect();
        assert_eq!(c.eval_cell(&enc), Tri::False);
    }
}
