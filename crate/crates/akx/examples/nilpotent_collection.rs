//! Arithmetic in the free class-2 nilpotent group: collection, commutators,
//! centrality, and the conjugator-multiplicity phenomenon that makes the
//! conjugacy search problem answerless about the exact secret.
//!
//! Run with: cargo run --example nilpotent_collection

use akx::nilpotent::NilElement;

fn main() {
    let h1 = NilElement::generator(3, 1).unwrap();
    let h2 = NilElement::generator(3, 2).unwrap();
    let h3 = NilElement::generator(3, 3).unwrap();

    // collection: h2 h1 = h1 h2 [h1,h2]^-1
    let g = h2.mul(&h1).unwrap();
    println!("h2 * h1 collected: a = {:?}, m = {:?}", g.a, g.m);

    // commutators are central
    let c = h1.commutator(&h2).unwrap();
    let left = c.mul(&h3).unwrap();
    let right = h3.mul(&c).unwrap();
    assert_eq!(left, right);
    println!("[h1,h2] commutes with h3: yes");

    // class 2: [[h1,h2],h3] = 1
    assert!(c.commutator(&h3).unwrap().is_identity());
    println!("[[h1,h2],h3] = identity: yes");

    // conjugator multiplicity: conj(h,u) == conj(h, u*h) with u*h != u
    let h = h1.mul(&h2).unwrap();
    let u = h3.mul(&h1).unwrap();
    let v = u.mul(&h).unwrap();
    assert_eq!(h.conj(&u).unwrap(), h.conj(&v).unwrap());
    assert_ne!(u, v);
    println!("two distinct conjugators produce the same conjugate: yes");

    // the canonical encoding used for key derivation
    println!("canonical bytes of h2*h1: {}", String::from_utf8(g.canonical_bytes()).unwrap());
}
