//! Word-problem oracle for the braid group `B_m` via Dehornoy handle
//! reduction, with the symmetric-group projection as a cheap necessary
//! condition.
//!
//! A handle is a subword `x_i^e v x_i^{-e}` whose interior `v` only uses
//! indices strictly greater than `i`. Reducing it removes the two flanking
//! letters and rewrites every `x_{i+1}^d` inside as
//! `x_{i+1}^{-e} x_i^d x_{i+1}^{e}`. Repeatedly reducing the leftmost handle
//! whose interior contains no other handle terminates on a handle-free word,
//! which is empty iff the input is trivial in `B_m`.

use thiserror::Error;

use crate::words::{Family, Letter, Word};

#[derive(Debug, Clone, Copy)]
pub struct BraidContext {
    /// Number of strands; generators are `x_1 .. x_{m-1}`.
    pub strands: u32,
    /// Guard on handle-reduction steps; exceeding it signals pathological
    /// input or a bug rather than looping forever.
    pub max_reduction_steps: u64,
}

impl BraidContext {
    pub fn new(strands: u32) -> BraidContext {
        BraidContext { strands, max_reduction_steps: 1_000_000 }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BraidError {
    #[error("letter {letter} is not a braid generator of B_{strands}")]
    OutOfRange { letter: Letter, strands: u32 },
    #[error("letter {0} is not in the braid family")]
    WrongFamily(Letter),
    #[error("handle reduction exceeded {0} steps")]
    StepGuard(u64),
}

/// A permutation of `{1..m}` stored as its image sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    pub images: Vec<u32>,
}

impl Permutation {
    pub fn identity(m: u32) -> Permutation {
        Permutation { images: (1..=m).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(k, &v)| v == k as u32 + 1)
    }
}

/// Every letter must be `x_i` with `1 <= i <= m-1`.
pub fn check_word(ctx: &BraidContext, word: &Word) -> Result<(), BraidError> {
    for &letter in word.letters() {
        if letter.family != Family::Braid {
            return Err(BraidError::WrongFamily(letter));
        }
        if letter.index < 1 || letter.index >= ctx.strands {
            return Err(BraidError::OutOfRange { letter, strands: ctx.strands });
        }
    }
    Ok(())
}

/// Image of the word under `x_i -> (i, i+1)` in the symmetric group.
/// Signs are irrelevant since transpositions are involutions.
pub fn perm_projection(ctx: &BraidContext, word: &Word) -> Result<Permutation, BraidError> {
    check_word(ctx, word)?;
    let mut perm = Permutation::identity(ctx.strands);
    for letter in word.letters() {
        let i = letter.index as usize;
        perm.images.swap(i - 1, i);
    }
    Ok(perm)
}

/// Location of a handle: flanking letters at `start` and `end`.
#[derive(Debug, Clone, Copy)]
struct Handle {
    start: usize,
    end: usize,
}

/// Find every handle in `letters`: positions p < q with the same index `i`,
/// opposite signs, and only indices > i strictly between.
fn find_handles(letters: &[Letter]) -> Vec<Handle> {
    let mut handles = Vec::new();
    // For each position q, the nearest previous position with index <= index(q)
    // is the only candidate left end.
    for q in 1..letters.len() {
        let right = letters[q];
        for p in (0..q).rev() {
            let left = letters[p];
            if left.index < right.index {
                break;
            }
            if left.index == right.index {
                if left.sign == -right.sign {
                    handles.push(Handle { start: p, end: q });
                }
                break;
            }
        }
    }
    handles
}

fn contains_handle(letters: &[Letter]) -> bool {
    !find_handles(letters).is_empty()
}

/// Rewrite one handle: drop the flanks, conjugate the `x_{i+1}` letters.
fn reduce_handle(letters: &[Letter], handle: Handle) -> Vec<Letter> {
    let i = letters[handle.start].index;
    let e = letters[handle.start].sign;
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len() + 4);
    out.extend_from_slice(&letters[..handle.start]);
    for &letter in &letters[handle.start + 1..handle.end] {
        if letter.index == i + 1 {
            out.push(Letter::new(Family::Braid, i + 1, -e));
            out.push(Letter::new(Family::Braid, i, letter.sign));
            out.push(Letter::new(Family::Braid, i + 1, e));
        } else {
            out.push(letter);
        }
    }
    out.extend_from_slice(&letters[handle.end + 1..]);
    out
}

/// Dehornoy handle reduction. Returns a freely-reduced, handle-free word
/// equal to the input in `B_m`.
pub fn handle_reduce(ctx: &BraidContext, word: &Word) -> Result<Word, BraidError> {
    check_word(ctx, word)?;
    let mut letters = word.free_reduce().0;
    let mut steps: u64 = 0;
    loop {
        let handles = find_handles(&letters);
        let Some(&innermost) = handles
            .iter()
            .find(|h| !contains_handle(&letters[h.start + 1..h.end]))
        else {
            break;
        };
        steps += 1;
        if steps > ctx.max_reduction_steps {
            return Err(BraidError::StepGuard(ctx.max_reduction_steps));
        }
        letters = Word(reduce_handle(&letters, innermost)).free_reduce().0;
    }
    Ok(Word(letters))
}

/// Word problem for `B_m`: true iff the word is the identity.
pub fn is_trivial(ctx: &BraidContext, word: &Word) -> Result<bool, BraidError> {
    Ok(handle_reduce(ctx, word)?.is_empty())
}

/// Equality in `B_m` via triviality of `a b^-1`.
pub fn equal(ctx: &BraidContext, a: &Word, b: &Word) -> Result<bool, BraidError> {
    check_word(ctx, a)?;
    check_word(ctx, b)?;
    is_trivial(ctx, &a.concat(&b.invert()))
}

/// True when the word contains no handle (exposed for test assertions).
pub fn is_handle_free(word: &Word) -> bool {
    !contains_handle(&word.0)
}
