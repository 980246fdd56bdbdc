//! Platform parameters: validation, token evaluation, letter-layer
//! expansion, segment normalization, and the centrality witness.
//!
//! Run with: cargo run --example platform_params

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use akx::amalgam::{centrality_witness, eval_token, expand, generate_params, segment};
use akx::words::Word;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let params = generate_params(2, 4, 2, 4, 8, &mut rng).unwrap();
    println!("{}", serde_json::to_string_pretty(&params).unwrap());

    // both token kinds name the same amalgamated generator
    let cancel: Word = "U1 W1^-1".parse().unwrap();
    assert!(eval_token(&cancel, params.n).unwrap().is_identity());
    println!("eval(U1 W1^-1) = identity: yes");

    // a token word and its letter-layer realization
    let tw: Word = "W1 U2 W1^-1".parse().unwrap();
    let letters = expand(&tw, &params).unwrap();
    println!("expand({tw}) = {letters}");

    // free-product segmentation of the mixed word
    let seg = segment(&letters, &params.braid_context(), &params.thompson_context()).unwrap();
    println!("segments:");
    for s in &seg.segments {
        println!("  {s}");
    }

    let verified = centrality_witness(&params).unwrap();
    println!("centrality relation verified for {} triples", verified.len());
}
