//! Normal forms in Thompson's group F, cross-checked against the exact
//! piecewise-linear homeomorphism model.
//!
//! Run with: cargo run --example thompson_normal_form

use akx::thompson::{normal_form, pl_map, ThompsonContext};
use akx::words::Word;

fn main() {
    let ctx = ThompsonContext::new(6);
    let samples = ["y2 y0", "y1 y3 y1^-1", "y2 y0 y3^-1 y0^-1", "y0 y1^-1"];
    for text in samples {
        let word: Word = text.parse().unwrap();
        let nf = normal_form(&ctx, &word).unwrap();
        let map = pl_map(&ctx, &word).unwrap();
        println!(
            "{text:20} normal form: {:16} identity map: {}",
            nf.to_word().to_string(),
            map.is_identity()
        );
    }

    // the defining relation holds in the PL model
    let lhs = pl_map(&ctx, &"y2 y0".parse().unwrap()).unwrap();
    let rhs = pl_map(&ctx, &"y0 y3".parse().unwrap()).unwrap();
    assert_eq!(lhs, rhs);
    println!("PL model verifies y2 y0 = y0 y3");
    println!("breakpoints of y0: {:?}", pl_map(&ctx, &"y0".parse().unwrap()).unwrap().breakpoints);
}
