//! Word-problem oracle for Thompson's group F, presented by generators
//! `y_0, y_1, ...` and relations `y_k y_i = y_i y_{k+1}` for `k > i`.
//!
//! Triviality is decided by rewriting to the classical unique normal form
//! `y_{i_1}^{a_1} .. y_{i_r}^{a_r} y_{j_s}^{-b_s} .. y_{j_1}^{-b_1}`.
//! An exact model by dyadic piecewise-linear homeomorphisms of `[0,1]`
//! serves as an independent semantic oracle; the composition-order
//! convention is pinned by the relation-soundness tests rather than trusted.

use num::rational::BigRational;
use num::{BigInt, One, Signed, Zero};
use thiserror::Error;

use crate::words::{Family, Letter, Word};

#[derive(Debug, Clone, Copy)]
pub struct ThompsonContext {
    /// Input letters `y_0 .. y_p` are accepted; rewriting may create larger
    /// indices internally (bounded by `p` plus the word length).
    pub index_cap: u32,
}

impl ThompsonContext {
    pub fn new(index_cap: u32) -> ThompsonContext {
        ThompsonContext { index_cap }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ThompsonError {
    #[error("letter {letter} exceeds the index cap {cap}")]
    IndexAboveCap { letter: Letter, cap: u32 },
    #[error("letter {0} is not in the Thompson family")]
    WrongFamily(Letter),
}

fn check_word(ctx: &ThompsonContext, word: &Word) -> Result<(), ThompsonError> {
    for &letter in word.letters() {
        if letter.family != Family::Thompson {
            return Err(ThompsonError::WrongFamily(letter));
        }
        if letter.index > ctx.index_cap {
            return Err(ThompsonError::IndexAboveCap { letter, cap: ctx.index_cap });
        }
    }
    Ok(())
}

/// The unique normal form: positive and negative parts as run-length
/// sequences with strictly increasing indices. The negative part is applied
/// inverted in decreasing-index order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NormalForm {
    pub positive: Vec<(u32, u32)>,
    pub negative: Vec<(u32, u32)>,
}

impl NormalForm {
    pub fn is_empty(&self) -> bool {
        self.positive.is_empty() && self.negative.is_empty()
    }

    /// Reconstruct the word `y_{i_1}^{a_1} .. y_{j_s}^{-b_s} .. y_{j_1}^{-b_1}`.
    pub fn to_word(&self) -> Word {
        let mut letters = Vec::new();
        for &(index, mult) in &self.positive {
            letters.extend(std::iter::repeat(Letter::new(Family::Thompson, index, 1)).take(mult as usize));
        }
        for &(index, mult) in self.negative.iter().rev() {
            letters.extend(std::iter::repeat(Letter::new(Family::Thompson, index, -1)).take(mult as usize));
        }
        Word(letters)
    }

    /// The uniqueness condition: whenever an index occurs in both parts,
    /// index+1 occurs in at least one part.
    pub fn satisfies_uniqueness_condition(&self) -> bool {
        let in_pos = |i: u32| self.positive.iter().any(|&(j, _)| j == i);
        let in_neg = |i: u32| self.negative.iter().any(|&(j, _)| j == i);
        self.positive
            .iter()
            .map(|&(i, _)| i)
            .all(|i| !in_neg(i) || in_pos(i + 1) || in_neg(i + 1))
    }
}

/// One pass of the oriented rewriting rules towards seminormal form:
/// free cancellation, positives pushed left in non-decreasing index order,
/// negatives in non-increasing order.
fn seminormalize(mut letters: Vec<(u32, i8)>) -> Vec<(u32, i8)> {
    let mut i = 0;
    while i + 1 <= letters.len().saturating_sub(1) {
        let (a, sa) = letters[i];
        let (b, sb) = letters[i + 1];
        let rewritten = if a == b && sa == -sb {
            letters.drain(i..i + 2);
            true
        } else {
            match (sa, sb) {
                (-1, 1) if a > b => {
                    letters[i] = (b, 1);
                    letters[i + 1] = (a + 1, -1);
                    true
                }
                (-1, 1) if a < b => {
                    letters[i] = (b + 1, 1);
                    letters[i + 1] = (a, -1);
                    true
                }
                (1, 1) if a > b => {
                    letters[i] = (b, 1);
                    letters[i + 1] = (a + 1, 1);
                    true
                }
                (-1, -1) if b > a => {
                    letters[i] = (b + 1, -1);
                    letters[i + 1] = (a, -1);
                    true
                }
                _ => false,
            }
        };
        if rewritten {
            i = i.saturating_sub(1);
        } else {
            i += 1;
        }
    }
    letters
}

fn to_runs(letters: &[(u32, i8)]) -> NormalForm {
    let mut positive: Vec<(u32, u32)> = Vec::new();
    let mut negative: Vec<(u32, u32)> = Vec::new();
    for &(index, sign) in letters {
        let part = if sign > 0 { &mut positive } else { &mut negative };
        match part.last_mut() {
            Some((i, mult)) if *i == index => *mult += 1,
            _ => part.push((index, 1)),
        }
    }
    // word order of negatives is decreasing; store increasing
    negative.reverse();
    NormalForm { positive, negative }
}

fn from_runs(nf: &NormalForm) -> Vec<(u32, i8)> {
    nf.to_word().0.iter().map(|l| (l.index, l.sign)).collect()
}

/// The unique normal form of a word in F.
pub fn normal_form(ctx: &ThompsonContext, word: &Word) -> Result<NormalForm, ThompsonError> {
    check_word(ctx, word)?;
    let mut letters: Vec<(u32, i8)> = word.0.iter().map(|l| (l.index, l.sign)).collect();
    loop {
        letters = seminormalize(letters);
        let mut nf = to_runs(&letters);
        // uniqueness-condition contraction: y_i v y_i^-1 with v over
        // indices >= i+2 becomes v with those indices decremented
        let occurs = |part: &[(u32, u32)], i: u32| part.iter().any(|&(j, _)| j == i);
        let candidate = nf
            .positive
            .iter()
            .map(|&(i, _)| i)
            .find(|&i| {
                occurs(&nf.negative, i)
                    && !occurs(&nf.positive, i + 1)
                    && !occurs(&nf.negative, i + 1)
            });
        let Some(i) = candidate else {
            return Ok(nf);
        };
        let drop_one = |part: &mut Vec<(u32, u32)>| {
            if let Some(pos) = part.iter().position(|&(j, _)| j == i) {
                if part[pos].1 > 1 {
                    part[pos].1 -= 1;
                } else {
                    part.remove(pos);
                }
            }
        };
        drop_one(&mut nf.positive);
        drop_one(&mut nf.negative);
        for part in [&mut nf.positive, &mut nf.negative] {
            for entry in part.iter_mut() {
                if entry.0 > i {
                    entry.0 -= 1;
                }
            }
        }
        letters = from_runs(&nf);
    }
}

/// Word problem for F: true iff the normal form is empty.
pub fn is_trivial(ctx: &ThompsonContext, word: &Word) -> Result<bool, ThompsonError> {
    Ok(normal_form(ctx, word)?.is_empty())
}

/// Equality in F via normal-form comparison.
pub fn equal(ctx: &ThompsonContext, a: &Word, b: &Word) -> Result<bool, ThompsonError> {
    Ok(normal_form(ctx, a)? == normal_form(ctx, b)?)
}

/// A piecewise-linear homeomorphism of `[0,1]` with dyadic breakpoints and
/// power-of-two slopes, stored as its breakpoint list with collinear points
/// removed. Equality is structural on the normalized list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLMap {
    pub breakpoints: Vec<(BigRational, BigRational)>,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl PLMap {
    pub fn identity() -> PLMap {
        PLMap {
            breakpoints: vec![(rat(0, 1), rat(0, 1)), (rat(1, 1), rat(1, 1))],
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == PLMap::identity()
    }

    fn normalize(mut points: Vec<(BigRational, BigRational)>) -> PLMap {
        points.sort_by(|a, b| a.0.cmp(&b.0));
        points.dedup();
        let mut kept: Vec<(BigRational, BigRational)> = Vec::with_capacity(points.len());
        for point in points {
            while kept.len() >= 2 {
                let a = &kept[kept.len() - 2];
                let b = &kept[kept.len() - 1];
                // drop b when a, b, point are collinear
                let lhs = (&b.1 - &a.1) * (&point.0 - &a.0);
                let rhs = (&point.1 - &a.1) * (&b.0 - &a.0);
                if lhs == rhs {
                    kept.pop();
                } else {
                    break;
                }
            }
            kept.push(point);
        }
        PLMap { breakpoints: kept }
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let points = &self.breakpoints;
        let hi = points.partition_point(|p| p.0 < *x);
        if hi < points.len() && points[hi].0 == *x {
            return points[hi].1.clone();
        }
        let (x0, y0) = &points[hi - 1];
        let (x1, y1) = &points[hi];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    pub fn inverse(&self) -> PLMap {
        PLMap {
            breakpoints: self.breakpoints.iter().map(|(x, y)| (y.clone(), x.clone())).collect(),
        }
    }

    /// `x -> other(self(x))`: apply `self` first, then `other`.
    pub fn then(&self, other: &PLMap) -> PLMap {
        let inv = self.inverse();
        let mut inputs: Vec<BigRational> =
            self.breakpoints.iter().map(|(x, _)| x.clone()).collect();
        inputs.extend(other.breakpoints.iter().map(|(x, _)| inv.eval(x)));
        inputs.sort();
        inputs.dedup();
        let points = inputs
            .into_iter()
            .map(|x| {
                let y = other.eval(&self.eval(&x));
                (x, y)
            })
            .collect();
        PLMap::normalize(points)
    }

    /// Invariant check used by tests: endpoints fixed, strictly increasing,
    /// all coordinates dyadic, all slopes powers of two.
    pub fn check_invariants(&self) -> bool {
        let points = &self.breakpoints;
        if points.first() != Some(&(rat(0, 1), rat(0, 1)))
            || points.last() != Some(&(rat(1, 1), rat(1, 1)))
        {
            return false;
        }
        let dyadic = |r: &BigRational| {
            let d = r.denom().abs();
            let mut d = d.clone();
            while d.clone() % BigInt::from(2) == BigInt::zero() {
                d /= 2;
            }
            d.is_one()
        };
        for window in points.windows(2) {
            let (x0, y0) = &window[0];
            let (x1, y1) = &window[1];
            if x1 <= x0 || y1 <= y0 || !dyadic(x0) || !dyadic(y0) {
                return false;
            }
            let slope = (y1 - y0) / (x1 - x0);
            let (num, den) = (slope.numer().abs(), slope.denom().abs());
            let pow2 = |v: &BigInt| {
                let mut v = v.clone();
                while v.clone() % BigInt::from(2) == BigInt::zero() {
                    v /= 2;
                }
                v.is_one()
            };
            if !(num.is_one() && pow2(&den) || den.is_one() && pow2(&num)) {
                return false;
            }
        }
        true
    }
}

/// The standard generator maps: `y_0` as given, `y_1` identity below 1/2
/// with a half-scale copy of `y_0` above, `y_{k+1} = y_0^{-1} y_k y_0`.
fn generator_map(index: u32) -> PLMap {
    let y0 = PLMap {
        breakpoints: vec![
            (rat(0, 1), rat(0, 1)),
            (rat(1, 2), rat(1, 4)),
            (rat(3, 4), rat(1, 2)),
            (rat(1, 1), rat(1, 1)),
        ],
    };
    if index == 0 {
        return y0;
    }
    let mut current = PLMap {
        breakpoints: vec![
            (rat(0, 1), rat(0, 1)),
            (rat(1, 2), rat(1, 2)),
            (rat(3, 4), rat(5, 8)),
            (rat(7, 8), rat(3, 4)),
            (rat(1, 1), rat(1, 1)),
        ],
    };
    for _ in 1..index {
        current = y0.then(&current).then(&y0.inverse());
    }
    current
}

/// Evaluate a word in the PL model. The image of `uv` is the function
/// composite `map(u) . map(v)` (apply `v` first); the relation-soundness
/// test locks this convention.
pub fn pl_map(ctx: &ThompsonContext, word: &Word) -> Result<PLMap, ThompsonError> {
    check_word(ctx, word)?;
    let mut cache: Vec<PLMap> = Vec::new();
    let mut acc = PLMap::identity();
    for &letter in word.letters() {
        while cache.len() <= letter.index as usize {
            cache.push(generator_map(cache.len() as u32));
        }
        let gen = &cache[letter.index as usize];
        let step = if letter.sign > 0 { gen.clone() } else { gen.inverse() };
        acc = step.then(&acc);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn ctx() -> ThompsonContext {
        ThompsonContext::new(8)
    }

    #[test]
    fn normal_form_examples() {
        let nf = normal_form(&ctx(), &w("y2 y0")).unwrap();
        assert_eq!(nf.positive, vec![(0, 1), (3, 1)]);
        assert!(nf.negative.is_empty());

        assert!(normal_form(&ctx(), &Word::empty()).unwrap().is_empty());

        let nf = normal_form(&ctx(), &w("y1 y3 y1^-1")).unwrap();
        assert_eq!(nf.positive, vec![(2, 1)]);
        assert!(nf.negative.is_empty());
    }

    #[test]
    fn is_trivial_examples() {
        assert!(is_trivial(&ctx(), &w("y0 y0^-1")).unwrap());
        assert!(is_trivial(&ctx(), &w("y2 y0 y3^-1 y0^-1")).unwrap());
        assert!(!is_trivial(&ctx(), &w("y0")).unwrap());
    }

    #[test]
    fn equal_examples() {
        assert!(equal(&ctx(), &w("y2 y0"), &w("y0 y3")).unwrap());
        assert!(equal(&ctx(), &w("y1 y2^-1"), &w("y1 y2^-1")).unwrap());
        assert!(!equal(&ctx(), &w("y0"), &w("y1")).unwrap());
    }

    #[test]
    fn cap_enforced() {
        let tight = ThompsonContext::new(1);
        assert!(matches!(
            normal_form(&tight, &w("y2")),
            Err(ThompsonError::IndexAboveCap { .. })
        ));
        assert!(matches!(
            normal_form(&tight, &w("x1")),
            Err(ThompsonError::WrongFamily(_))
        ));
    }

    #[test]
    fn pl_map_examples() {
        assert!(pl_map(&ctx(), &Word::empty()).unwrap().is_identity());
        let y0 = pl_map(&ctx(), &w("y0")).unwrap();
        assert_eq!(
            y0.breakpoints,
            vec![
                (rat(0, 1), rat(0, 1)),
                (rat(1, 2), rat(1, 4)),
                (rat(3, 4), rat(1, 2)),
                (rat(1, 1), rat(1, 1)),
            ]
        );
        assert!(y0.check_invariants());
    }

    #[test]
    fn pl_relation_soundness_pins_composition_order() {
        // y_k y_i = y_i y_{k+1} for 0 <= i < k <= 6 in the PL model
        for k in 1u32..=6 {
            for i in 0..k {
                let lhs = pl_map(
                    &ctx(),
                    &Word(vec![
                        Letter::new(Family::Thompson, k, 1),
                        Letter::new(Family::Thompson, i, 1),
                    ]),
                )
                .unwrap();
                let rhs = pl_map(
                    &ctx(),
                    &Word(vec![
                        Letter::new(Family::Thompson, i, 1),
                        Letter::new(Family::Thompson, k + 1, 1),
                    ]),
                )
                .unwrap();
                assert_eq!(lhs, rhs, "relation y{k} y{i} = y{i} y{}", k + 1);
            }
        }
    }

    #[test]
    fn normal_form_idempotent_and_unique() {
        let words = ["y2 y0", "y1 y3 y1^-1", "y0 y1 y0^-1 y2^-1", "y2 y2 y1^-1 y0"];
        for s in words {
            let nf = normal_form(&ctx(), &w(s)).unwrap();
            assert!(nf.satisfies_uniqueness_condition(), "{s}");
            let again = normal_form(&ctx(), &nf.to_word()).unwrap();
            assert_eq!(nf, again, "{s}");
        }
    }

    #[test]
    fn oracle_agreement_short_words() {
        // all words of length <= 3 over {y0, y1, y2}^{+-1}
        let letters: Vec<Letter> = (0..3)
            .flat_map(|i| [Letter::new(Family::Thompson, i, 1), Letter::new(Family::Thompson, i, -1)])
            .collect();
        let mut words: Vec<Word> = vec![Word::empty()];
        let mut frontier: Vec<Word> = vec![Word::empty()];
        for _ in 0..3 {
            let mut next: Vec<Word> = Vec::new();
            for word in &frontier {
                for &l in &letters {
                    let mut v = word.0.clone();
                    v.push(l);
                    next.push(Word(v));
                }
            }
            words.extend(next.iter().cloned());
            frontier = next;
        }
        for word in &words {
            let by_nf = is_trivial(&ctx(), word).unwrap();
            let by_pl = pl_map(&ctx(), word).unwrap().is_identity();
            assert_eq!(by_nf, by_pl, "word {word}");
        }
    }
}
