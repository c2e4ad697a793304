//! Benchmark fixtures.

use hecc_core::{CauchyParams, EcCode, Elem, Field, HierCode, HierConfig, Symbol};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_message(f: &Field, k: usize, rng: &mut ChaCha8Rng) -> Vec<Elem> {
    let q = f.order() as u16;
    (0..k)
        .map(|_| Elem::from_raw(rng.gen_range(0..q)))
        .collect()
}

/// `s` errors followed by `t` erasures at distinct random positions.
pub fn corrupt(f: &Field, c: &[Elem], s: usize, t: usize, rng: &mut ChaCha8Rng) -> Vec<Symbol> {
    let q = f.order() as u16;
    let mut pos: Vec<usize> = (0..c.len()).collect();
    pos.shuffle(rng);
    let mut w: Vec<Symbol> = c.iter().map(|&x| Some(x)).collect();
    for &p in &pos[..s] {
        w[p] = Some(c[p] + Elem::from_raw(rng.gen_range(1..q)));
    }
    for &p in &pos[s..s + t] {
        w[p] = None;
    }
    w
}

/// EC code of length `n` and redundancy `v = r` over GF(2^m) with consecutive points.
pub fn ec_code(f: &Field, n: usize, v: usize) -> EcCode {
    EcCode::new(f, CauchyParams::default_points(f, n - v, v).unwrap(), v).unwrap()
}

/// Two blocks of `k = 96`, `r = 12`, `δ_i = 2` over GF(2^8).
pub fn storage_code() -> HierCode {
    HierCode::build(&HierConfig::with_default_points(8, None, &[(96, 12, 2), (96, 12, 2)]).unwrap())
        .unwrap()
}
