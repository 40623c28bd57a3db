//! Whitehead automorphisms and the primitivity test by length descent.
//!
//! A cyclic word has minimal length in its automorphic orbit exactly when no
//! Whitehead automorphism shortens it (peak reduction), so greedy descent
//! over the full Whitehead set decides primitivity: a word is primitive iff
//! the descent bottoms out at cyclic length 1.

use crate::words::{Alphabet, Word};
use crate::{Error, Result};

/// The Whitehead move set grows as `2 rank · 4^(rank-1)`; ranks above this
/// are rejected.
pub const MAX_WHITEHEAD_RANK: usize = 4;

/// A Whitehead automorphism of the free group of some rank, over signed
/// generator indices (`+k`/`-k`, 1-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WhiteheadAuto {
    /// Type I: a signed permutation of the generators; `images[k-1]` is the
    /// image letter of generator `k`.
    Permutation { images: Vec<i16> },
    /// Type II: a multiplier letter `a`; generator `g != |a|` maps to
    /// `(a^-1)? g (a)?` according to its flags, and `|a|` is fixed.
    Multiplier {
        a: i16,
        left: Vec<bool>,
        right: Vec<bool>,
    },
}

impl WhiteheadAuto {
    /// Image of the positive generator `g` (1-based) as a signed word.
    fn generator_image(&self, g: i16) -> Vec<i16> {
        match self {
            WhiteheadAuto::Permutation { images } => vec![images[g as usize - 1]],
            WhiteheadAuto::Multiplier { a, left, right } => {
                if g == a.abs() {
                    return vec![g];
                }
                let mut w = Vec::with_capacity(3);
                if left[g as usize - 1] {
                    w.push(-a);
                }
                w.push(g);
                if right[g as usize - 1] {
                    w.push(*a);
                }
                w
            }
        }
    }

    /// Applies the automorphism to a signed word, freely reducing.
    pub fn apply(&self, w: &[i16]) -> Vec<i16> {
        let mut out: Vec<i16> = Vec::with_capacity(w.len() * 3);
        for &letter in w {
            let image = self.generator_image(letter.abs());
            if letter > 0 {
                for &l in &image {
                    push_reduced(&mut out, l);
                }
            } else {
                for &l in image.iter().rev() {
                    push_reduced(&mut out, -l);
                }
            }
        }
        out
    }

    /// The inverse Whitehead automorphism.
    pub fn inverse(&self) -> WhiteheadAuto {
        match self {
            WhiteheadAuto::Permutation { images } => {
                let mut inv = vec![0i16; images.len()];
                for (k, &img) in images.iter().enumerate() {
                    let gen = (k + 1) as i16;
                    inv[img.unsigned_abs() as usize - 1] = if img > 0 { gen } else { -gen };
                }
                WhiteheadAuto::Permutation { images: inv }
            }
            WhiteheadAuto::Multiplier { a, left, right } => WhiteheadAuto::Multiplier {
                a: -a,
                left: left.clone(),
                right: right.clone(),
            },
        }
    }

    /// Checks that the inverse descriptor undoes this one on every generator.
    pub fn validate(&self, rank: usize) -> Result<()> {
        let inv = self.inverse();
        for g in 1..=rank as i16 {
            let image = self.apply(&[g]);
            let back = inv.apply(&image);
            if back != vec![g] {
                return Err(Error::Inconsistent(format!(
                    "Whitehead descriptor does not invert on generator {g}"
                )));
            }
        }
        Ok(())
    }
}

fn push_reduced(out: &mut Vec<i16>, letter: i16) {
    if out.last() == Some(&-letter) {
        out.pop();
    } else {
        out.push(letter);
    }
}

/// The full Whitehead set for the given rank: all signed permutations and
/// all non-identity type II moves, in a fixed deterministic order.
pub fn whitehead_autos(rank: usize) -> Result<Vec<WhiteheadAuto>> {
    if rank == 0 || rank > MAX_WHITEHEAD_RANK {
        return Err(Error::Bound(format!(
            "Whitehead set supported for rank 1..={MAX_WHITEHEAD_RANK}, got {rank}"
        )));
    }
    let mut autos = Vec::new();
    for perm in permutations(rank) {
        for mask in 0..(1u32 << rank) {
            let images: Vec<i16> = perm
                .iter()
                .enumerate()
                .map(|(k, &p)| {
                    let v = (p + 1) as i16;
                    if mask & (1 << k) != 0 {
                        -v
                    } else {
                        v
                    }
                })
                .collect();
            autos.push(WhiteheadAuto::Permutation { images });
        }
    }
    for g in 1..=rank as i16 {
        for a in [g, -g] {
            let others: Vec<usize> = (0..rank).filter(|&k| k != g as usize - 1).collect();
            for combo in 0..(4u32).pow(others.len() as u32) {
                if combo == 0 {
                    continue; // identity move
                }
                let mut left = vec![false; rank];
                let mut right = vec![false; rank];
                let mut c = combo;
                for &k in &others {
                    left[k] = c % 4 == 1 || c % 4 == 3;
                    right[k] = c % 4 == 2 || c % 4 == 3;
                    c /= 4;
                }
                autos.push(WhiteheadAuto::Multiplier { a, left, right });
            }
        }
    }
    Ok(autos)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    permute(&mut items, 0, &mut out);
    out.sort();
    out
}

fn permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, out);
        items.swap(k, i);
    }
}

/// Cyclic reduction of a signed word: strip cancelling first/last pairs.
fn cyclically_reduce(mut w: Vec<i16>) -> Vec<i16> {
    while w.len() >= 2 && w[0] == -w[w.len() - 1] {
        w.pop();
        w.remove(0);
    }
    w
}

fn letter_key(v: i16) -> (i16, bool) {
    (v.abs(), v < 0)
}

/// Lexicographically least rotation under the order `x < x^-1 < y < ...`.
fn canonical_rotation(w: &[i16]) -> Vec<i16> {
    if w.len() <= 1 {
        return w.to_vec();
    }
    let n = w.len();
    let mut best = 0usize;
    for start in 1..n {
        for i in 0..n {
            let a = letter_key(w[(start + i) % n]);
            let b = letter_key(w[(best + i) % n]);
            match a.cmp(&b) {
                std::cmp::Ordering::Less => {
                    best = start;
                    break;
                }
                std::cmp::Ordering::Greater => break,
                std::cmp::Ordering::Equal => {}
            }
        }
    }
    (0..n).map(|i| w[(best + i) % n]).collect()
}

fn canonical_cyclic(w: &[i16]) -> Vec<i16> {
    canonical_rotation(&cyclically_reduce(w.to_vec()))
}

/// Whether `w` is a primitive element (part of a free basis) of the free
/// group of the given rank, decided by Whitehead length descent. The empty
/// word is not primitive.
pub fn is_primitive_whitehead(w: &Word, rank: usize) -> Result<bool> {
    let alphabet = Alphabet::infer(std::slice::from_ref(w), rank)?;
    let cw = alphabet.to_cword(w)?;
    let mut current = canonical_cyclic(&cw);
    if current.is_empty() {
        return Ok(false);
    }
    let moves = whitehead_autos(rank)?;
    loop {
        let mut best: Option<Vec<i16>> = None;
        for m in &moves {
            let image = canonical_cyclic(&m.apply(&current));
            if image.len() < current.len() {
                let better = match &best {
                    None => true,
                    Some(b) => {
                        (image.len(), image.as_slice()) < (b.len(), b.as_slice())
                    }
                };
                if better {
                    best = Some(image);
                }
            }
        }
        match best {
            Some(shorter) => current = shorter,
            None => break,
        }
    }
    Ok(current.len() == 1)
}
