//! Word-value distributions and fixed-point statistics under uniformly
//! random homomorphisms.
//!
//! For a word `w` in the free group of rank `r` and a finite group `P`, the
//! distribution of `phi(w)` over all `|P|^r` homomorphisms is computed by
//! direct enumeration, exactly. A subgroup generated by a primitive word is
//! a free factor, so its distribution is exactly uniform; the expected
//! number of fixed points in a symmetric group is exactly 1 for primitive
//! words and strictly larger for proper powers and other non-primitive
//! words. All expectations are exact rationals.

use num_rational::Rational64;
use rayon::prelude::*;
use serde::Serialize;

use crate::fingroup::{make_symmetric, FiniteGroup};
use crate::words::{Alphabet, Word};
use crate::{Error, Result};

/// Largest enumeration `|P|^rank` accepted.
pub const MAX_ENUMERATION: u64 = 10_000_000;

/// Exact counts of each value of `phi(w)` over all homomorphisms
/// `F_rank -> P`.
#[derive(Clone, Debug, Serialize)]
pub struct WordDistribution {
    pub word: Word,
    pub codomain: String,
    pub rank: usize,
    /// `counts[p]` homomorphisms send the word to element `p`.
    pub counts: Vec<u64>,
    /// `|P|^rank`
    pub total: u64,
}

impl WordDistribution {
    pub fn is_uniform(&self) -> bool {
        self.counts.windows(2).all(|w| w[0] == w[1])
    }
}

/// Serializable exact rational, reduced to lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExactRational {
    pub num: i64,
    pub den: i64,
}

impl From<Rational64> for ExactRational {
    fn from(r: Rational64) -> Self {
        ExactRational {
            num: *r.numer(),
            den: *r.denom(),
        }
    }
}

fn enumeration_size(order: usize, rank: usize) -> Result<u64> {
    let mut total: u64 = 1;
    for _ in 0..rank {
        total = total
            .checked_mul(order as u64)
            .filter(|&t| t <= MAX_ENUMERATION)
            .ok_or_else(|| {
                Error::Bound(format!(
                    "enumeration |P|^rank = {order}^{rank} exceeds {MAX_ENUMERATION}"
                ))
            })?;
    }
    Ok(total)
}

/// Exact distribution of `phi(w)` over all `|P|^rank` homomorphisms,
/// computed by full enumeration partitioned on the first generator image.
pub fn word_value_distribution(
    w: &Word,
    rank: usize,
    p: &FiniteGroup,
) -> Result<WordDistribution> {
    if rank == 0 {
        return Err(Error::Bound("rank must be positive".into()));
    }
    let total = enumeration_size(p.order(), rank)?;
    let alphabet = Alphabet::infer(std::slice::from_ref(w), rank)?;
    let cw = alphabet.to_cword(w)?;
    let order = p.order();
    let counts: Vec<u64> = (0..order as u16)
        .into_par_iter()
        .map(|first| {
            let mut local = vec![0u64; order];
            let mut assign = vec![0u16; rank];
            assign[0] = first;
            loop {
                let mut acc = 0u16;
                for &l in &cw {
                    let x = assign[l.unsigned_abs() as usize - 1];
                    let x = if l < 0 { p.inv(x) } else { x };
                    acc = p.mul(acc, x);
                }
                local[usize::from(acc)] += 1;
                // odometer over the remaining generators
                let mut i = 1;
                loop {
                    if i == rank {
                        return local;
                    }
                    if usize::from(assign[i]) + 1 < order {
                        assign[i] += 1;
                        break;
                    }
                    assign[i] = 0;
                    i += 1;
                }
            }
        })
        .reduce(
            || vec![0u64; order],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    debug_assert_eq!(counts.iter().sum::<u64>(), total);
    Ok(WordDistribution {
        word: w.clone(),
        codomain: p.name().to_string(),
        rank,
        counts,
        total,
    })
}

/// Exact expected number of fixed points of `phi(w)` for a uniformly random
/// homomorphism `F_rank -> Sym(n)`.
pub fn expected_fixed_points(w: &Word, rank: usize, n: usize) -> Result<Rational64> {
    if n > 6 {
        return Err(Error::Bound(format!("expected_fixed_points limited to n <= 6, got {n}")));
    }
    let sym = make_symmetric(n)?;
    let dist = word_value_distribution(w, rank, &sym)?;
    let mut weighted: i64 = 0;
    for (elt, &count) in dist.counts.iter().enumerate() {
        let fix = sym
            .fixed_points(elt as u16)
            .expect("symmetric groups carry a permutation realization");
        let contribution = i64::try_from(count)
            .ok()
            .and_then(|c| c.checked_mul(fix as i64))
            .ok_or_else(|| Error::Overflow("fixed-point sum exceeds i64".into()))?;
        weighted = weighted
            .checked_add(contribution)
            .ok_or_else(|| Error::Overflow("fixed-point sum exceeds i64".into()))?;
    }
    Ok(Rational64::new(weighted, dist.total as i64))
}

/// Exact total-variation distance of the word-value distribution from the
/// uniform distribution on `P`.
pub fn uniformity_deviation(w: &Word, rank: usize, p: &FiniteGroup) -> Result<Rational64> {
    let dist = word_value_distribution(w, rank, p)?;
    // (1/2) sum |counts/total - 1/|P||  =  sum |counts*|P| - total| / (2 total |P|)
    let order = p.order() as i64;
    let total = dist.total as i64;
    let mut numerator: i64 = 0;
    for &c in &dist.counts {
        let c = i64::try_from(c).map_err(|_| Error::Overflow("count exceeds i64".into()))?;
        let diff = c
            .checked_mul(order)
            .map(|v| (v - total).abs())
            .ok_or_else(|| Error::Overflow("deviation sum exceeds i64".into()))?;
        numerator = numerator
            .checked_add(diff)
            .ok_or_else(|| Error::Overflow("deviation sum exceeds i64".into()))?;
    }
    Ok(Rational64::new(numerator, 2 * total * order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingroup::{default_catalog, make_cyclic};
    use crate::presentation::{count_homs, Constraint, CountOptions, Presentation};

    #[test]
    fn projection_is_uniform() {
        let s3 = make_symmetric(3).unwrap();
        let dist =
            word_value_distribution(&Word::parse("x").unwrap(), 2, &s3).unwrap();
        assert_eq!(dist.total, 36);
        assert!(dist.is_uniform());
        assert!(dist.counts.iter().all(|&c| c == 6));
    }

    #[test]
    fn squares_in_sym3() {
        let s3 = make_symmetric(3).unwrap();
        let dist =
            word_value_distribution(&Word::parse("x x").unwrap(), 1, &s3).unwrap();
        assert_eq!(dist.counts[0], 4);
        for elt in 1..6u16 {
            let expected = match s3.element_order(elt) {
                2 => 0,
                3 => 1,
                _ => unreachable!(),
            };
            assert_eq!(dist.counts[usize::from(elt)], expected);
        }
    }

    #[test]
    fn commutator_distribution() {
        let s3 = make_symmetric(3).unwrap();
        let w = Word::parse("x y x^-1 y^-1").unwrap();
        let dist = word_value_distribution(&w, 2, &s3).unwrap();
        assert_eq!(dist.total, 36);
        for elt in 0..6u16 {
            let expected = match s3.element_order(elt) {
                1 => 18,
                2 => 0,
                3 => 9,
                _ => unreachable!(),
            };
            assert_eq!(dist.counts[usize::from(elt)], expected);
        }
    }

    #[test]
    fn expected_fixed_points_examples() {
        assert_eq!(
            expected_fixed_points(&Word::parse("x").unwrap(), 1, 3).unwrap(),
            Rational64::new(1, 1)
        );
        assert_eq!(
            expected_fixed_points(&Word::parse("x x").unwrap(), 1, 3).unwrap(),
            Rational64::new(2, 1)
        );
        assert_eq!(
            expected_fixed_points(&Word::parse("x y x^-1 y^-1").unwrap(), 2, 3).unwrap(),
            Rational64::new(3, 2)
        );
    }

    #[test]
    fn primitive_words_have_expectation_one_up_to_degree_four() {
        let one = Rational64::new(1, 1);
        for text in ["x", "x y", "x y x", "x y^-1"] {
            let w = Word::parse(text).unwrap();
            for n in 2..=4usize {
                assert_eq!(expected_fixed_points(&w, 2, n).unwrap(), one, "{text} at n={n}");
            }
        }
    }

    #[test]
    fn deviation_examples() {
        let c2 = make_cyclic(2).unwrap();
        assert_eq!(
            uniformity_deviation(&Word::parse("x").unwrap(), 1, &c2).unwrap(),
            Rational64::new(0, 1)
        );
        assert_eq!(
            uniformity_deviation(&Word::parse("x x").unwrap(), 1, &c2).unwrap(),
            Rational64::new(1, 2)
        );
        assert_eq!(
            uniformity_deviation(&Word::parse("x y").unwrap(), 2, &c2).unwrap(),
            Rational64::new(0, 1)
        );
    }

    #[test]
    fn totals_always_match() {
        for p in default_catalog().iter().filter(|p| p.order() <= 8) {
            for (text, rank) in [("x", 1), ("x x", 1), ("x y x", 2), ("x y x^-1 y^-1", 2)] {
                let dist =
                    word_value_distribution(&Word::parse(text).unwrap(), rank, p).unwrap();
                assert_eq!(dist.counts.iter().sum::<u64>(), dist.total);
                assert_eq!(dist.total, (p.order() as u64).pow(rank as u32));
            }
        }
    }

    #[test]
    fn distribution_agrees_with_constrained_counts() {
        // dual route: counts[p] must equal the constrained hom count pinning
        // the word to p
        let s3 = make_symmetric(3).unwrap();
        let opts = CountOptions::default();
        let f2 = Presentation::free(2);
        let w = Word::parse("x1 x2 x1").unwrap();
        let dist = word_value_distribution(&w, 2, &s3).unwrap();
        for (elt, &count) in dist.counts.iter().enumerate() {
            let constrained = count_homs(
                &f2,
                &s3,
                &[Constraint {
                    word: w.clone(),
                    target: elt as u16,
                }],
                &opts,
            )
            .unwrap();
            assert_eq!(constrained.total, count);
        }
    }

    #[test]
    fn size_bound_is_enforced() {
        let s4 = make_symmetric(4).unwrap();
        assert!(word_value_distribution(&Word::parse("x").unwrap(), 6, &s4).is_err());
        assert!(expected_fixed_points(&Word::parse("x").unwrap(), 1, 7).is_err());
    }
}
