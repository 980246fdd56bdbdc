//! Attack a recorded exchange: brute-force conjugacy search at toy scale,
//! then the greedy length-based descent, and the multiplicity demonstration
//! showing why a recovered conjugator is never unique.
//!
//! Run with: cargo run --example attack_transcript

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use akx::amalgam::generate_params;
use akx::attack::{brute_force_csp, conjugator_multiplicity_demo, length_based_attack};
use akx::protocol::{gen_private, make_message, Role};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let params = generate_params(2, 4, 2, 3, 2, &mut rng).unwrap();

    let victim = gen_private(&params, Role::Sender, &mut rng).unwrap();
    println!("victim secret (normally unknown): {}", victim.secret);
    let msg = make_message(&victim, &params).unwrap();

    let report = brute_force_csp(&params, &msg, 3).unwrap();
    println!(
        "brute force: found={:?} nodes={} time={:.2?}",
        report.found, report.nodes_explored, report.wall_time
    );

    let report = length_based_attack(&params, &msg, 10_000).unwrap();
    println!(
        "length-based: found={:?} nodes={} time={:.2?}",
        report.found, report.nodes_explored, report.wall_time
    );

    let verified = conjugator_multiplicity_demo(3, 1000, &mut rng).unwrap();
    println!("conjugator multiplicity verified in {verified}/1000 random trials");
}
