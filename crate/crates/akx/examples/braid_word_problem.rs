//! Solve the word problem in a braid group with Dehornoy handle reduction.
//!
//! Run with: cargo run --example braid_word_problem

use akx::braid::{handle_reduce, is_trivial, perm_projection, BraidContext};
use akx::words::Word;

fn main() {
    let ctx = BraidContext::new(4);
    let samples = [
        "x1 x2 x1 x2^-1 x1^-1 x2^-1", // braid relation, trivial
        "x1 x3 x1^-1 x3^-1",          // far commutation, trivial
        "x1 x2 x1",                   // half twist on three strands
        "x2 x1 x2^-1",                // conjugate of a generator
    ];
    for text in samples {
        let word: Word = text.parse().unwrap();
        let reduced = handle_reduce(&ctx, &word).unwrap();
        let verdict = if is_trivial(&ctx, &word).unwrap() { "trivial" } else { "nontrivial" };
        let perm = perm_projection(&ctx, &word).unwrap();
        println!("{text:32} -> {verdict:10} reduced: {reduced:24} perm: {:?}", perm.images);
    }
}
