//! The platform-group layer: public parameters defining the amalgamated
//! free product of a braid group and Thompson's group F, the token alphabet
//! naming the amalgamated subgroup generators, evaluation of token words in
//! the nilpotent model, expansion to the letter layer, and free-product
//! segment normalization of mixed words.
//!
//! Honest parties compute entirely at the token layer: the public words
//! `w_i` (braid) and `u_i` (Thompson) are equal in the platform group, so
//! both token kinds `W_i` and `U_i` evaluate to the same abstract generator
//! `h_i` of the class-2 nilpotent model. Decomposing an arbitrary
//! letter-layer word back into tokens is a subgroup-membership problem with
//! no known algorithm here, so messages stay at the token layer and
//! [`expand`] provides the adversary-facing letter realization.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::braid::{self, BraidContext};
use crate::nilpotent::{NilElement, NilError};
use crate::thompson::{self, ThompsonContext};
use crate::words::{random_word, Alphabet, Family, Word};

mod word_text {
    //! Serialize words as their textual syntax inside parameter files.
    use super::Word;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(words: &[Word], ser: S) -> Result<S::Ok, S::Error> {
        words
            .iter()
            .map(|w| w.to_string())
            .collect::<Vec<_>>()
            .serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Word>, D::Error> {
        let strings = Vec::<String>::deserialize(de)?;
        strings
            .iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Public parameters of one protocol instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlatformParams {
    pub version: u32,
    /// Number of amalgamated generator pairs (w_i, u_i).
    pub n: u32,
    /// Braid strands; generators x_1 .. x_{m-1}.
    pub m: u32,
    /// Thompson index cap; generators y_0 .. y_p.
    pub p: u32,
    /// Private token-word length.
    #[serde(rename = "L")]
    pub secret_len: u32,
    /// Defining braid words w_1 .. w_n.
    #[serde(with = "word_text")]
    pub w: Vec<Word>,
    /// Defining Thompson words u_1 .. u_n.
    #[serde(with = "word_text")]
    pub u: Vec<Word>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AmalgamError {
    #[error("n must be at least 2, got {0}")]
    TooFewGenerators(u32),
    #[error("L must be at least 1")]
    ZeroSecretLen,
    #[error("expected {expected} defining words, got {got}")]
    WrongWordCount { expected: u32, got: usize },
    #[error("defining word {name} is empty")]
    EmptyDefiningWord { name: String },
    #[error("defining word {name} is not freely reduced")]
    NotReduced { name: String },
    #[error("defining word {name} uses letters outside its factor alphabet")]
    BadLetters { name: String },
    #[error("defining word {name} is trivial in its factor group")]
    TrivialDefiningWord { name: String },
    #[error("token index {index} out of range 1..={n}")]
    TokenIndexOutOfRange { index: u32, n: u32 },
    #[error("letter {0} is not a token letter")]
    NotAToken(crate::words::Letter),
    #[error("letter {0} is not a factor letter (expand token words first)")]
    NotAFactorLetter(crate::words::Letter),
    #[error(transparent)]
    Braid(#[from] braid::BraidError),
    #[error(transparent)]
    Thompson(#[from] thompson::ThompsonError),
    #[error(transparent)]
    Nil(#[from] NilError),
}

impl PlatformParams {
    pub fn braid_context(&self) -> BraidContext {
        BraidContext::new(self.m)
    }

    pub fn thompson_context(&self) -> ThompsonContext {
        ThompsonContext::new(self.p)
    }

    /// Check every structural invariant and reject degenerate instances:
    /// a defining word that is trivial in its factor collapses the
    /// amalgamated generator it names.
    pub fn validate(&self) -> Result<(), AmalgamError> {
        if self.n < 2 {
            return Err(AmalgamError::TooFewGenerators(self.n));
        }
        if self.secret_len == 0 {
            return Err(AmalgamError::ZeroSecretLen);
        }
        for (words, family, symbol) in [
            (&self.w, Family::Braid, 'w'),
            (&self.u, Family::Thompson, 'u'),
        ] {
            if words.len() != self.n as usize {
                return Err(AmalgamError::WrongWordCount {
                    expected: self.n,
                    got: words.len(),
                });
            }
            let alphabet = match family {
                Family::Braid => Alphabet::braid(self.m),
                _ => Alphabet::thompson(self.p),
            };
            for (k, word) in words.iter().enumerate() {
                let name = format!("{symbol}_{}", k + 1);
                if word.is_empty() {
                    return Err(AmalgamError::EmptyDefiningWord { name });
                }
                if !word.is_freely_reduced() {
                    return Err(AmalgamError::NotReduced { name });
                }
                if !word.letters().iter().all(|&l| alphabet.contains(l)) {
                    return Err(AmalgamError::BadLetters { name });
                }
                let trivial = match family {
                    Family::Braid => braid::is_trivial(&self.braid_context(), word)?,
                    _ => thompson::is_trivial(&self.thompson_context(), word)?,
                };
                if trivial {
                    return Err(AmalgamError::TrivialDefiningWord { name });
                }
            }
        }
        Ok(())
    }
}

/// Generate a random validated parameter set. Defining words that happen to
/// be trivial in their factor are resampled.
pub fn generate_params<R: rand::Rng + ?Sized>(
    n: u32,
    m: u32,
    p: u32,
    word_len: usize,
    secret_len: u32,
    rng: &mut R,
) -> Result<PlatformParams, AmalgamError> {
    let braid_ctx = BraidContext::new(m);
    let thompson_ctx = ThompsonContext::new(p);
    let mut w = Vec::with_capacity(n as usize);
    while w.len() < n as usize {
        let word = random_word(Alphabet::braid(m), word_len, rng)
            .map_err(|_| AmalgamError::BadLetters { name: "w".into() })?;
        if !braid::is_trivial(&braid_ctx, &word)? {
            w.push(word);
        }
    }
    let mut u = Vec::with_capacity(n as usize);
    while u.len() < n as usize {
        let word = random_word(Alphabet::thompson(p), word_len, rng)
            .map_err(|_| AmalgamError::BadLetters { name: "u".into() })?;
        if !thompson::is_trivial(&thompson_ctx, &word)? {
            u.push(word);
        }
    }
    let params = PlatformParams { version: 1, n, m, p, secret_len, w, u };
    params.validate()?;
    Ok(params)
}

/// Homomorphic image of a token word under `W_i -> h_i`, `U_i -> h_i`
/// (the amalgamation identifies both token kinds).
pub fn eval_token(token_word: &Word, n: u32) -> Result<NilElement, AmalgamError> {
    let mut acc = NilElement::identity(n as usize)?;
    for &letter in token_word.letters() {
        if !matches!(letter.family, Family::TokenW | Family::TokenU) {
            return Err(AmalgamError::NotAToken(letter));
        }
        if letter.index < 1 || letter.index > n {
            return Err(AmalgamError::TokenIndexOutOfRange { index: letter.index, n });
        }
        let gen = NilElement::generator(n as usize, letter.index as usize)?;
        let step = if letter.sign > 0 { gen } else { gen.inv() };
        acc = acc.mul(&step)?;
    }
    Ok(acc)
}

/// Substitute each token by its public defining word and freely reduce.
/// The result is the mixed letter-layer realization of the same element.
pub fn expand(token_word: &Word, params: &PlatformParams) -> Result<Word, AmalgamError> {
    let mut letters = Vec::new();
    for &letter in token_word.letters() {
        let table = match letter.family {
            Family::TokenW => &params.w,
            Family::TokenU => &params.u,
            _ => return Err(AmalgamError::NotAToken(letter)),
        };
        if letter.index < 1 || letter.index > params.n {
            return Err(AmalgamError::TokenIndexOutOfRange { index: letter.index, n: params.n });
        }
        let defining = &table[letter.index as usize - 1];
        let piece = if letter.sign > 0 { defining.clone() } else { defining.invert() };
        letters.extend_from_slice(piece.letters());
    }
    Ok(Word(letters).free_reduce())
}

/// Alternating factorization of a mixed braid/Thompson word, with segments
/// trivial in their factor removed and newly adjacent same-family runs
/// merged, repeated to a fixpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmentation {
    pub segments: Vec<Word>,
}

impl Segmentation {
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

pub fn segment(
    word: &Word,
    braid_ctx: &BraidContext,
    thompson_ctx: &ThompsonContext,
) -> Result<Segmentation, AmalgamError> {
    for &letter in word.letters() {
        if !matches!(letter.family, Family::Braid | Family::Thompson) {
            return Err(AmalgamError::NotAFactorLetter(letter));
        }
    }
    // maximal same-family runs
    let mut runs: Vec<Word> = Vec::new();
    for &letter in word.letters() {
        match runs.last_mut() {
            Some(run) if run.0[0].family == letter.family => run.0.push(letter),
            _ => runs.push(Word(vec![letter])),
        }
    }
    loop {
        // drop runs trivial in their factor
        let mut kept: Vec<Word> = Vec::new();
        for run in runs {
            let trivial = match run.0.first() {
                None => true,
                Some(l) if l.family == Family::Braid => braid::is_trivial(braid_ctx, &run)?,
                Some(_) => thompson::is_trivial(thompson_ctx, &run)?,
            };
            if !trivial {
                kept.push(run);
            }
        }
        // merge newly adjacent same-family runs
        let mut merged: Vec<Word> = Vec::new();
        let mut changed = false;
        for run in kept {
            match merged.last_mut() {
                Some(prev) if prev.0[0].family == run.0[0].family => {
                    *prev = prev.concat(&run).free_reduce();
                    changed = true;
                }
                _ => merged.push(run),
            }
        }
        if !changed {
            return Ok(Segmentation { segments: merged });
        }
        runs = merged;
    }
}

/// Verify the centrality relation `w_i u_j w_i^-1 u_j^-1 w_l =
/// w_l w_i u_j w_i^-1 u_j^-1` for every triple (i, j, l) at the model
/// level. Returns the verified triples; any failure is an implementation
/// bug since the model enforces the relation.
pub fn centrality_witness(params: &PlatformParams) -> Result<Vec<(u32, u32, u32)>, AmalgamError> {
    use crate::words::Letter;
    let n = params.n;
    let mut verified = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            for l in 1..=n {
                let lhs = Word(vec![
                    Letter::new(Family::TokenW, i, 1),
                    Letter::new(Family::TokenU, j, 1),
                    Letter::new(Family::TokenW, i, -1),
                    Letter::new(Family::TokenU, j, -1),
                    Letter::new(Family::TokenW, l, 1),
                ]);
                let rhs = Word(vec![
                    Letter::new(Family::TokenW, l, 1),
                    Letter::new(Family::TokenW, i, 1),
                    Letter::new(Family::TokenU, j, 1),
                    Letter::new(Family::TokenW, i, -1),
                    Letter::new(Family::TokenU, j, -1),
                ]);
                if eval_token(&lhs, n)? == eval_token(&rhs, n)? {
                    verified.push((i, j, l));
                }
            }
        }
    }
    Ok(verified)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    pub(crate) fn tiny_params() -> PlatformParams {
        PlatformParams {
            version: 1,
            n: 2,
            m: 3,
            p: 2,
            secret_len: 8,
            w: vec![w("x1"), w("x2")],
            u: vec![w("y0"), w("y1")],
        }
    }

    #[test]
    fn validate_accepts_minimal_instance() {
        assert!(tiny_params().validate().is_ok());
    }

    #[test]
    fn validate_rejects_degenerate() {
        let mut p = tiny_params();
        p.w[0] = w("x1 x1^-1");
        // x1 x1^-1 is not freely reduced; a reduced trivial word also fails
        assert!(matches!(p.validate(), Err(AmalgamError::NotReduced { .. })));

        let mut p = tiny_params();
        p.w[0] = w("x1 x2 x1 x2^-1 x1^-1 x2^-1");
        assert!(matches!(
            p.validate(),
            Err(AmalgamError::TrivialDefiningWord { .. })
        ));

        let mut p = tiny_params();
        p.n = 1;
        assert_eq!(p.validate(), Err(AmalgamError::TooFewGenerators(1)));

        let mut p = tiny_params();
        p.w[0] = Word::empty();
        assert!(matches!(p.validate(), Err(AmalgamError::EmptyDefiningWord { .. })));

        let mut p = tiny_params();
        p.w[0] = w("x5");
        assert!(matches!(p.validate(), Err(AmalgamError::BadLetters { .. })));
    }

    #[test]
    fn eval_token_examples() {
        let h1 = eval_token(&w("W1"), 3).unwrap();
        assert_eq!(h1, NilElement::generator(3, 1).unwrap());
        assert!(eval_token(&w("U1 W1^-1"), 3).unwrap().is_identity());
        let c = eval_token(&w("W1 U2 W1^-1 U2^-1"), 3).unwrap();
        let expected = NilElement::generator(3, 1)
            .unwrap()
            .commutator(&NilElement::generator(3, 2).unwrap())
            .unwrap();
        assert_eq!(c, expected);
        assert!(matches!(
            eval_token(&w("W3"), 2),
            Err(AmalgamError::TokenIndexOutOfRange { .. })
        ));
        assert!(matches!(eval_token(&w("x1"), 2), Err(AmalgamError::NotAToken(_))));
    }

    #[test]
    fn expand_examples() {
        let mut params = tiny_params();
        params.w[0] = w("x1 x2");
        assert_eq!(expand(&w("W1"), &params).unwrap(), w("x1 x2"));
        assert_eq!(expand(&w("W1 W1^-1"), &params).unwrap(), Word::empty());
        let params = tiny_params();
        assert_eq!(expand(&w("W1 U1"), &params).unwrap(), w("x1 y0"));
    }

    #[test]
    fn segment_examples() {
        let params = tiny_params();
        let bctx = params.braid_context();
        let tctx = params.thompson_context();
        let seg = segment(&w("x1 y0 x2"), &bctx, &tctx).unwrap();
        assert_eq!(seg.segments, vec![w("x1"), w("y0"), w("x2")]);

        let seg = segment(&w("x1 y0 y0^-1 x1^-1"), &bctx, &tctx).unwrap();
        assert!(seg.is_empty());

        let seg = segment(&w("x1 x1 y0"), &bctx, &tctx).unwrap();
        assert_eq!(seg.segments, vec![w("x1 x1"), w("y0")]);

        assert!(matches!(
            segment(&w("W1"), &bctx, &tctx),
            Err(AmalgamError::NotAFactorLetter(_))
        ));
    }

    #[test]
    fn segment_idempotent_and_alternating() {
        let params = tiny_params();
        let bctx = params.braid_context();
        let tctx = params.thompson_context();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let tw = random_word(Alphabet::token_w(2), 6, &mut rng)
                .unwrap()
                .concat(&random_word(Alphabet::token_u(2), 6, &mut rng).unwrap());
            let letters = expand(&tw, &params).unwrap();
            let seg = segment(&letters, &bctx, &tctx).unwrap();
            for pair in seg.segments.windows(2) {
                assert_ne!(pair[0].0[0].family, pair[1].0[0].family);
            }
            let flattened = seg
                .segments
                .iter()
                .fold(Word::empty(), |acc, s| acc.concat(s));
            let again = segment(&flattened, &bctx, &tctx).unwrap();
            assert_eq!(seg, again);
        }
    }

    #[test]
    fn centrality_witness_all_triples() {
        let params = tiny_params();
        let verified = centrality_witness(&params).unwrap();
        assert_eq!(verified.len(), 8);

        let mut p3 = tiny_params();
        p3.n = 3;
        p3.w.push(w("x1 x2"));
        p3.u.push(w("y0 y1"));
        assert_eq!(centrality_witness(&p3).unwrap().len(), 27);
    }

    #[test]
    fn token_only_expansion_consistency() {
        // a token word over W-tokens that freely reduces to empty expands
        // to a braid-trivial word; symmetric for U-tokens
        let params = tiny_params();
        let tw = w("W1 W2 W2^-1 W1^-1");
        assert!(tw.free_reduce().is_empty());
        let expanded = expand(&tw, &params).unwrap();
        assert!(braid::is_trivial(&params.braid_context(), &expanded).unwrap());

        let tu = w("U2 U1 U1^-1 U2^-1");
        let expanded = expand(&tu, &params).unwrap();
        assert!(thompson::is_trivial(&params.thompson_context(), &expanded).unwrap());
    }

    #[test]
    fn params_json_round_trip() {
        let params = tiny_params();
        let json = serde_json::to_string(&params).unwrap();
        assert!(json.contains("\"L\":8"));
        assert!(json.contains("\"x1\""));
        let back: PlatformParams = serde_json::from_str(&json).unwrap();
        assert_eq!(back, params);
    }

    #[test]
    fn generate_params_validates() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let params = generate_params(3, 5, 3, 6, 12, &mut rng).unwrap();
        assert!(params.validate().is_ok());
        assert_eq!(params.w.len(), 3);
        assert_eq!(params.u.len(), 3);
    }
}
