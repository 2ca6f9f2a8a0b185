#![allow(dead_code)]

use g2toolkit::liealg::BracketTriple;
use nalgebra::Matrix4;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn traceless(m: Matrix4<f64>) -> Matrix4<f64> {
    m - Matrix4::identity() * (m.trace() / 4.0)
}

/// Commuting traceless triple built from polynomials in one random matrix;
/// generally neither normal nor diagonalisable over the reals.
pub fn random_commuting(rng: &mut ChaCha8Rng) -> BracketTriple {
    let x = Matrix4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    let x2 = x * x;
    let x3 = x2 * x;
    let mut poly = || {
        let c: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5)];
        traceless(x * c[0] + x2 * c[1] + x3 * c[2])
    };
    let (a, b, c) = (poly(), poly(), poly());
    BracketTriple::new(a, b, c).expect("polynomials in one matrix commute")
}

pub fn random_diag(rng: &mut ChaCha8Rng) -> [f64; 4] {
    let v: [f64; 3] = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
    [v[0], v[1], v[2], -(v[0] + v[1] + v[2])]
}

pub fn random_diagonal(rng: &mut ChaCha8Rng) -> BracketTriple {
    let (a, b, c) = (random_diag(rng), random_diag(rng), random_diag(rng));
    BracketTriple::diagonal(a, b, c).unwrap()
}
