//! Free words over signed generator alphabets.
//!
//! Every other module speaks this vocabulary: a [`Letter`] is a signed
//! generator symbol tagged with the family it belongs to, a [`Word`] is a
//! finite sequence of letters. Free reduction, inversion and concatenation
//! are pure functions; nothing here knows any group relations beyond
//! `g g^-1 = 1`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Generator families. `Braid` letters print as `x3`, `Thompson` as `y0`,
/// token letters as `W2` / `U1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Braid,
    Thompson,
    TokenW,
    TokenU,
}

impl Family {
    pub fn symbol(self) -> char {
        match self {
            Family::Braid => 'x',
            Family::Thompson => 'y',
            Family::TokenW => 'W',
            Family::TokenU => 'U',
        }
    }

    fn from_symbol(c: char) -> Option<Family> {
        match c {
            'x' => Some(Family::Braid),
            'y' => Some(Family::Thompson),
            'W' => Some(Family::TokenW),
            'U' => Some(Family::TokenU),
            _ => None,
        }
    }
}

/// A bounded index range for one generator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alphabet {
    pub family: Family,
    pub min_index: u32,
    pub max_index: u32,
}

impl Alphabet {
    /// Braid generators `x_1 .. x_{m-1}`.
    pub fn braid(strands: u32) -> Alphabet {
        Alphabet { family: Family::Braid, min_index: 1, max_index: strands.saturating_sub(1) }
    }

    /// Thompson generators `y_0 .. y_p`.
    pub fn thompson(cap: u32) -> Alphabet {
        Alphabet { family: Family::Thompson, min_index: 0, max_index: cap }
    }

    /// Sender-side token symbols `W_1 .. W_n`.
    pub fn token_w(n: u32) -> Alphabet {
        Alphabet { family: Family::TokenW, min_index: 1, max_index: n }
    }

    /// Receiver-side token symbols `U_1 .. U_n`.
    pub fn token_u(n: u32) -> Alphabet {
        Alphabet { family: Family::TokenU, min_index: 1, max_index: n }
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter.family == self.family
            && letter.index >= self.min_index
            && letter.index <= self.max_index
    }

    /// Number of distinct indices.
    pub fn width(&self) -> u32 {
        if self.max_index < self.min_index {
            0
        } else {
            self.max_index - self.min_index + 1
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("empty alphabet (no indices in range)")]
    EmptyAlphabet,
    #[error("cannot parse letter {0:?}")]
    BadLetter(String),
}

/// One signed generator symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub family: Family,
    pub index: u32,
    /// +1 or -1.
    pub sign: i8,
}

impl Letter {
    pub fn new(family: Family, index: u32, sign: i8) -> Letter {
        debug_assert!(sign == 1 || sign == -1);
        Letter { family, index, sign }
    }

    pub fn inverse(self) -> Letter {
        Letter { sign: -self.sign, ..self }
    }

    /// True when `self` and `other` cancel as adjacent letters.
    pub fn cancels(self, other: Letter) -> bool {
        self.family == other.family && self.index == other.index && self.sign == -other.sign
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.symbol(), self.index)?;
        if self.sign < 0 {
            write!(f, "^-1")?;
        }
        Ok(())
    }
}

impl FromStr for Letter {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Letter, WordError> {
        let bad = || WordError::BadLetter(s.to_string());
        let mut chars = s.chars();
        let family = chars.next().and_then(Family::from_symbol).ok_or_else(bad)?;
        let rest = chars.as_str();
        let (digits, sign) = match rest.strip_suffix("^-1") {
            Some(d) => (d, -1),
            None => (rest, 1),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let index: u32 = digits.parse().map_err(|_| bad())?;
        Ok(Letter { family, index, sign })
    }
}

/// A finite word over signed generator letters. Not intrinsically reduced;
/// call [`Word::free_reduce`] for the reduced representative.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// True when all letters belong to `family` (the empty word is pure in
    /// every family).
    pub fn is_pure(&self, family: Family) -> bool {
        self.0.iter().all(|l| l.family == family)
    }

    /// Reverse the letters and flip every sign.
    pub fn invert(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Plain concatenation, no reduction.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// Delete adjacent inverse pairs until none remain. One left-to-right
    /// stack pass; free reduction is confluent so the result is canonical.
    pub fn free_reduce(&self) -> Word {
        let mut stack: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &letter in &self.0 {
            match stack.last() {
                Some(&top) if top.cancels(letter) => {
                    stack.pop();
                }
                _ => stack.push(letter),
            }
        }
        Word(stack)
    }

    pub fn is_freely_reduced(&self) -> bool {
        self.0.windows(2).all(|w| !w[0].cancels(w[1]))
    }

    /// Sum of signs of letters with the given index (any family).
    pub fn exponent_sum(&self, index: u32) -> i64 {
        self.0
            .iter()
            .filter(|l| l.index == index)
            .map(|l| l.sign as i64)
            .sum()
    }

    /// Sum of signs over all letters (total writhe for braid words).
    pub fn total_exponent_sum(&self) -> i64 {
        self.0.iter().map(|l| l.sign as i64).sum()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for (i, letter) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{letter}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = WordError;

    /// Whitespace-separated letters; a single `e` is the empty word.
    fn from_str(s: &str) -> Result<Word, WordError> {
        let tokens: Vec<&str> = s.split_whitespace().collect();
        if tokens == ["e"] {
            return Ok(Word::empty());
        }
        tokens.iter().map(|t| t.parse()).collect::<Result<_, _>>().map(Word)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Word {
        Word(iter.into_iter().collect())
    }
}

/// Uniform freely-reduced word of exactly `len` letters. Each letter is drawn
/// uniformly over (index, sign) and resampled when it would cancel the
/// previous letter, so the requested length is exact.
pub fn random_word<R: Rng + ?Sized>(
    alphabet: Alphabet,
    len: usize,
    rng: &mut R,
) -> Result<Word, WordError> {
    if alphabet.width() == 0 {
        return Err(WordError::EmptyAlphabet);
    }
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let index = rng.gen_range(alphabet.min_index..=alphabet.max_index);
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        let letter = Letter::new(alphabet.family, index, sign);
        if matches!(letters.last(), Some(&prev) if prev.cancels(letter)) {
            continue;
        }
        letters.push(letter);
    }
    Ok(Word(letters))
}
