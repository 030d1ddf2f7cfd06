//! Helpers shared by unit tests: seeded random geometry.

use nalgebra::Vector2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::Polytope;

/// Random bounded polytope: hull of `n` points in a disk.
pub fn random_polytope(rng: &mut ChaCha8Rng, center: Vector2<f64>, radius: f64) -> Polytope<f64> {
    loop {
        let n = rng.gen_range(3..=10);
        let pts: Vec<Vector2<f64>> = (0..n)
            .map(|_| {
                let ang = rng.gen_range(0.0..std::f64::consts::TAU);
                let r = radius * rng.gen_range(0.2..1.0f64).sqrt();
                center + Vector2::new(r * ang.cos(), r * ang.sin())
            })
            .collect();
        if let Ok(p) = Polytope::from_vertices(&pts) {
            return p;
        }
    }
}

/// Random polytope pair with centers drawn in a box, for distance tests.
pub fn random_pair(rng: &mut ChaCha8Rng) -> (Polytope<f64>, Polytope<f64>) {
    let c1 = Vector2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    let c2 = Vector2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    let r1 = rng.gen_range(0.3..1.2);
    let r2 = rng.gen_range(0.3..1.2);
    let p = random_polytope(rng, c1, r1);
    let q = random_polytope(rng, c2, r2);
    (p, q)
}
