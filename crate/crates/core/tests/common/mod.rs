#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sfm_core::cut::{Arc, CutFunction};

/// Multiples of 1/64 keep every sum in these tests exact.
pub fn dyadic(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let x = lo + (hi - lo) * rng.gen::<f64>();
    (x * 64.0).round() / 64.0
}

/// Random directed cut function with `n` elements.
pub fn random_cut(rng: &mut ChaCha8Rng, n: usize) -> CutFunction<f64> {
    let mut arcs = Vec::new();
    for p in 0..n {
        for q in 0..n {
            if p != q && rng.gen_bool(0.5) {
                arcs.push(Arc { from: p, to: q, capacity: dyadic(rng, 0.0, 2.0) });
            }
        }
    }
    let modular = (0..n).map(|_| dyadic(rng, -2.0, 2.0)).collect();
    CutFunction::new(n, arcs, modular).unwrap()
}
