//! Cryptanalysis harness for the conjugacy search problem behind the
//! protocol: exhaustive search at toy scale, a greedy length-based descent,
//! and an executable demonstration of the conjugator-multiplicity argument.
//!
//! Attacks run at the token layer, which only makes them easier than a
//! letter-layer adversary, so any failure here is an honest lower bound.

use std::time::{Duration, Instant};

use num::Signed;
use serde::Serialize;

use crate::amalgam::{self, AmalgamError, PlatformParams};
use crate::nilpotent::NilElement;
use crate::protocol::{Message, MsgType};
use crate::words::{Family, Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AttackMethod {
    BruteForce,
    LengthBased,
}

/// Outcome of one attack run.
#[derive(Debug, Clone, Serialize)]
pub struct AttackReport {
    pub method: AttackMethod,
    /// Conjugator found, as textual word syntax; None when the search was
    /// exhausted or stalled.
    pub found: Option<String>,
    /// Whether the found conjugator reproduces the victim's full tuple.
    pub equivalent_to_secret: bool,
    pub nodes_explored: u64,
    #[serde(serialize_with = "millis")]
    pub wall_time: Duration,
    pub budget: u64,
}

fn millis<S: serde::Serializer>(d: &Duration, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_f64(d.as_secs_f64() * 1000.0)
}

/// The generators the victim conjugated, and the family of the conjugator
/// being searched for.
fn attack_frame(msg: &Message) -> (Family, Family) {
    match msg.msg_type {
        // M1 = A^-1 U_i A with A over W-tokens
        MsgType::M1 => (Family::TokenU, Family::TokenW),
        MsgType::M2 => (Family::TokenW, Family::TokenU),
    }
}

/// Canonical targets eval(msg_i).
fn targets(msg: &Message, n: u32) -> Result<Vec<NilElement>, AmalgamError> {
    msg.payload.iter().map(|w| amalgam::eval_token(w, n)).collect()
}

/// Whether `candidate^-1 G_i candidate` reproduces every target.
fn reproduces(
    candidate: &Word,
    gen_family: Family,
    targets: &[NilElement],
    n: u32,
) -> Result<bool, AmalgamError> {
    for (i, target) in targets.iter().enumerate() {
        let gen = Word(vec![Letter::new(gen_family, i as u32 + 1, 1)]);
        let conj = candidate.invert().concat(&gen).concat(candidate);
        if amalgam::eval_token(&conj, n)? != *target {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Letters of the search alphabet in enumeration order: by index, positive
/// sign before negative.
fn search_letters(family: Family, n: u32) -> Vec<Letter> {
    (1..=n)
        .flat_map(|i| [Letter::new(family, i, 1), Letter::new(family, i, -1)])
        .collect()
}

/// Enumerate all reduced token words up to `max_len`, ordered by length
/// then lexicographically by (index, sign), and return the first that
/// reproduces the message tuple.
pub fn brute_force_csp(
    params: &PlatformParams,
    msg: &Message,
    max_len: usize,
) -> Result<AttackReport, AmalgamError> {
    let start = Instant::now();
    let (gen_family, conj_family) = attack_frame(msg);
    let target = targets(msg, params.n)?;
    let letters = search_letters(conj_family, params.n);

    let mut nodes: u64 = 0;
    let mut found: Option<Word> = None;
    let mut frontier: Vec<Word> = vec![Word::empty()];
    'search: for len in 0..=max_len {
        for candidate in &frontier {
            nodes += 1;
            if reproduces(candidate, gen_family, &target, params.n)? {
                found = Some(candidate.clone());
                break 'search;
            }
        }
        if len == max_len {
            break;
        }
        let mut next = Vec::with_capacity(frontier.len() * letters.len());
        for word in &frontier {
            for &letter in &letters {
                if matches!(word.0.last(), Some(&prev) if prev.cancels(letter)) {
                    continue;
                }
                let mut extended = word.0.clone();
                extended.push(letter);
                next.push(Word(extended));
            }
        }
        frontier = next;
    }

    let equivalent = match &found {
        Some(c) => reproduces(c, gen_family, &target, params.n)?,
        None => false,
    };
    Ok(AttackReport {
        method: AttackMethod::BruteForce,
        found: found.map(|w| w.to_string()),
        equivalent_to_secret: equivalent,
        nodes_explored: nodes,
        wall_time: start.elapsed(),
        budget: nodes,
    })
}

/// Distance from the candidate's tuple action to the target tuple: the
/// total absolute value of the exponent vectors of the difference elements.
pub fn tuple_distance(
    candidate: &Word,
    gen_family: Family,
    targets: &[NilElement],
    n: u32,
) -> Result<num::BigInt, AmalgamError> {
    let mut total = num::BigInt::from(0);
    for (i, target) in targets.iter().enumerate() {
        let gen = Word(vec![Letter::new(gen_family, i as u32 + 1, 1)]);
        let conj = candidate.invert().concat(&gen).concat(candidate);
        let diff = amalgam::eval_token(&conj, n)?.mul(&target.inv())?;
        for entry in diff.a.iter().chain(&diff.m) {
            total += entry.abs();
        }
    }
    Ok(total)
}

/// Greedy descent: extend the candidate by whichever single token letter
/// most decreases the tuple distance, stopping at success, a local minimum,
/// or the node budget. Ties break towards lower index and positive sign.
pub fn length_based_attack(
    params: &PlatformParams,
    msg: &Message,
    budget: u64,
) -> Result<AttackReport, AmalgamError> {
    let start = Instant::now();
    let (gen_family, conj_family) = attack_frame(msg);
    let target = targets(msg, params.n)?;
    let letters = search_letters(conj_family, params.n);

    let mut candidate = Word::empty();
    let mut distance = tuple_distance(&candidate, gen_family, &target, params.n)?;
    let mut nodes: u64 = 0;
    let zero = num::BigInt::from(0);

    while distance != zero && nodes < budget {
        let mut best: Option<(num::BigInt, Letter)> = None;
        for &letter in &letters {
            if matches!(candidate.0.last(), Some(&prev) if prev.cancels(letter)) {
                continue;
            }
            if nodes >= budget {
                break;
            }
            nodes += 1;
            let mut extended = candidate.0.clone();
            extended.push(letter);
            let score = tuple_distance(&Word(extended), gen_family, &target, params.n)?;
            // strict order on (score, index, sign) keeps the first best
            if best.as_ref().map_or(true, |(s, _)| score < *s) {
                best = Some((score, letter));
            }
        }
        match best {
            Some((score, letter)) if score < distance => {
                candidate.0.push(letter);
                distance = score;
            }
            _ => break, // local minimum or budget
        }
    }

    let success = distance == zero
        && reproduces(&candidate, gen_family, &target, params.n)?;
    Ok(AttackReport {
        method: AttackMethod::LengthBased,
        found: success.then(|| candidate.to_string()),
        equivalent_to_secret: success,
        nodes_explored: nodes,
        wall_time: start.elapsed(),
        budget,
    })
}

/// Executable form of the conjugator-multiplicity argument: for random
/// `h`, `u` the element `v = u h` is a second conjugator, distinct from `u`
/// whenever `h` is nontrivial. Returns the number of verified trials.
pub fn conjugator_multiplicity_demo<R: rand::Rng + ?Sized>(
    n: usize,
    trials: u64,
    rng: &mut R,
) -> Result<u64, AmalgamError> {
    let mut verified = 0;
    for _ in 0..trials {
        let mut random_element = || -> Result<NilElement, AmalgamError> {
            let mut g = NilElement::identity(n)?;
            for entry in g.a.iter_mut().chain(g.m.iter_mut()) {
                *entry = num::BigInt::from(rng.gen_range(-100i64..=100));
            }
            Ok(g)
        };
        let h = random_element()?;
        let u = random_element()?;
        let v = u.mul(&h)?;
        if h.conj(&u)? != h.conj(&v)? {
            continue;
        }
        if !h.is_identity() && v == u {
            continue;
        }
        verified += 1;
    }
    Ok(verified)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{gen_private, make_message, PrivateKey, Role};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn tiny_params() -> PlatformParams {
        PlatformParams {
            version: 1,
            n: 2,
            m: 3,
            p: 2,
            secret_len: 2,
            w: vec![w("x1"), w("x2")],
            u: vec![w("y0"), w("y1")],
        }
    }

    #[test]
    fn brute_force_finds_short_secrets() {
        let params = tiny_params();
        let secret = PrivateKey { role: Role::Sender, secret: w("W1") };
        let msg = make_message(&secret, &params).unwrap();
        let report = brute_force_csp(&params, &msg, 1).unwrap();
        assert!(report.found.is_some());
        assert!(report.equivalent_to_secret);
    }

    #[test]
    fn brute_force_identity_conjugator() {
        let params = tiny_params();
        // empty secret: tuple action is trivial, identity conjugator works
        let secret = PrivateKey { role: Role::Sender, secret: Word::empty() };
        let msg = make_message(&secret, &params).unwrap();
        let report = brute_force_csp(&params, &msg, 2).unwrap();
        assert_eq!(report.found.as_deref(), Some("e"));
    }

    #[test]
    fn brute_force_empty_search_space() {
        let params = tiny_params();
        let secret = PrivateKey { role: Role::Sender, secret: w("W1 W2") };
        let msg = make_message(&secret, &params).unwrap();
        let report = brute_force_csp(&params, &msg, 0).unwrap();
        assert!(report.found.is_none());
        assert!(!report.equivalent_to_secret);
    }

    #[test]
    fn brute_force_completeness_up_to_len_3() {
        let params = tiny_params();
        let letters = search_letters(Family::TokenW, 2);
        let mut secrets: Vec<Word> = vec![Word::empty()];
        let mut frontier = vec![Word::empty()];
        for _ in 0..3 {
            let mut next = Vec::new();
            for word in &frontier {
                for &l in &letters {
                    if matches!(word.0.last(), Some(&prev) if prev.cancels(l)) {
                        continue;
                    }
                    let mut v = word.0.clone();
                    v.push(l);
                    next.push(Word(v));
                }
            }
            secrets.extend(next.iter().cloned());
            frontier = next;
        }
        for secret in secrets {
            let key = PrivateKey { role: Role::Sender, secret: secret.clone() };
            let msg = make_message(&key, &params).unwrap();
            let report = brute_force_csp(&params, &msg, 3).unwrap();
            assert!(report.found.is_some(), "no conjugator for secret {secret}");
            assert!(report.equivalent_to_secret);
        }
    }

    #[test]
    fn found_conjugator_is_never_unique() {
        // multiply any found conjugator by a central token word and it
        // still reproduces the tuple
        let params = tiny_params();
        let secret = PrivateKey { role: Role::Sender, secret: w("W1 W2^-1") };
        let msg = make_message(&secret, &params).unwrap();
        let report = brute_force_csp(&params, &msg, 2).unwrap();
        let found: Word = report.found.unwrap().parse().unwrap();
        let central = w("W1 U2 W1^-1 U2^-1"); // token commutator, central
        let alt = found.concat(&central);
        let target = targets(&msg, params.n).unwrap();
        assert!(reproduces(&alt, Family::TokenU, &target, params.n).unwrap());
        assert_ne!(
            amalgam::eval_token(&alt, params.n).unwrap(),
            amalgam::eval_token(&found, params.n).unwrap()
        );
    }

    #[test]
    fn length_based_attack_reports() {
        let params = tiny_params();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let secret = gen_private(&params, Role::Sender, &mut rng).unwrap();
        let msg = make_message(&secret, &params).unwrap();
        let report = length_based_attack(&params, &msg, 10_000).unwrap();
        assert!(report.nodes_explored <= 10_000);
        if let Some(found) = &report.found {
            assert!(report.equivalent_to_secret);
            let found: Word = found.parse().unwrap();
            let target = targets(&msg, params.n).unwrap();
            assert!(reproduces(&found, Family::TokenU, &target, params.n).unwrap());
        }

        // distance at the exact secret is zero
        let target = targets(&msg, params.n).unwrap();
        let d = tuple_distance(&secret.secret, Family::TokenU, &target, params.n).unwrap();
        assert_eq!(d, num::BigInt::from(0));

        // zero budget explores nothing
        let report = length_based_attack(&params, &msg, 0).unwrap();
        assert!(report.found.is_none());
        assert_eq!(report.nodes_explored, 0);
    }

    #[test]
    fn multiplicity_demo_verifies_all_trials() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        assert_eq!(conjugator_multiplicity_demo(3, 500, &mut rng).unwrap(), 500);
        // single handpicked trial: h = h_1, u = h_2, v = h_2 h_1 != h_2
        let h = NilElement::generator(2, 1).unwrap();
        let u = NilElement::generator(2, 2).unwrap();
        let v = u.mul(&h).unwrap();
        assert_eq!(h.conj(&u).unwrap(), h.conj(&v).unwrap());
        assert_ne!(v, u);
    }
}
