//! The binary wire format: frame a message, decode it back, and record a
//! transcript with letter-layer expansions.
//!
//! Run with: cargo run --example wire_format

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use akx::amalgam::generate_params;
use akx::protocol::{
    decode_message, encode_message, gen_private, make_message, Role, Transcript,
};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let params = generate_params(2, 4, 2, 3, 4, &mut rng).unwrap();

    let sender = gen_private(&params, Role::Sender, &mut rng).unwrap();
    let receiver = gen_private(&params, Role::Receiver, &mut rng).unwrap();
    let m1 = make_message(&sender, &params).unwrap();
    let m2 = make_message(&receiver, &params).unwrap();

    let frame = encode_message(&m1).unwrap();
    println!("m1 frame ({} bytes):", frame.len());
    for chunk in frame.chunks(16) {
        let hex: Vec<String> = chunk.iter().map(|b| format!("{b:02x}")).collect();
        println!("  {}", hex.join(" "));
    }
    let decoded = decode_message(&frame).unwrap();
    assert_eq!(decoded, m1);
    println!("round trip: ok");

    let transcript = Transcript::new(&params, &m1, &m2, true).unwrap();
    println!("{}", serde_json::to_string_pretty(&transcript).unwrap());
}
