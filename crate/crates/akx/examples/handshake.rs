//! Full in-process key agreement: generate a parameter set, run both roles,
//! and show that the derived session keys agree.
//!
//! Run with: cargo run --example handshake

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use akx::amalgam::generate_params;
use akx::protocol::run_handshake;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let params = generate_params(3, 5, 3, 6, 16, &mut rng).expect("valid parameters");
    println!("platform: n={} braid strands={} thompson cap={} L={}", params.n, params.m, params.p, params.secret_len);
    for (i, (w, u)) in params.w.iter().zip(&params.u).enumerate() {
        println!("  w_{} = {w}    u_{} = {u}", i + 1, i + 1);
    }

    let mut rng_sender = ChaCha8Rng::seed_from_u64(1);
    let mut rng_receiver = ChaCha8Rng::seed_from_u64(2);
    let (key_sender, key_receiver, transcript) =
        run_handshake(&params, &mut rng_sender, &params, &mut rng_receiver).expect("handshake");

    println!("sender key   : {}", key_sender.to_hex());
    println!("receiver key : {}", key_receiver.to_hex());
    assert_eq!(key_sender, key_receiver);
    println!("agreement    : yes");
    println!(
        "transcript   : m1 {} bytes, m2 {} bytes (base64)",
        transcript.m1.len(),
        transcript.m2.len()
    );
}
