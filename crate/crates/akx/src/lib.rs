//! Group-based key agreement over an amalgamated free product of a braid
//! group and Thompson's group F.
//!
//! The platform group is built from two factors with solvable word problems
//! (braid groups via handle reduction, Thompson's group F via its unique
//! normal form), amalgamated along subgroups generated by public words
//! `w_1..w_n` and `u_1..u_n`, with the extra relations that make commutators
//! of the amalgamated generators central. Honest parties compute in the
//! resulting class-2 nilpotent model, which gives a canonical form and hence
//! a checkable shared key.
//!
//! Module map:
//! - [`words`]: free words over signed generator alphabets
//! - [`braid`]: word-problem oracle for `B_m` (Dehornoy handle reduction)
//! - [`thompson`]: word-problem oracle for F (normal form + PL-map oracle)
//! - [`nilpotent`]: exact arithmetic in the free class-2 nilpotent group
//! - [`amalgam`]: platform parameters, token layer, segment normalization
//! - [`protocol`]: two-party handshake, wire format, key derivation
//! - [`attack`]: conjugacy-search attacks against recorded transcripts
//! - [`cli`]: the `akx` command-line surface

pub mod amalgam;
pub mod attack;
pub mod braid;
pub mod cli;
pub mod nilpotent;
pub mod protocol;
pub mod thompson;
pub mod words;
