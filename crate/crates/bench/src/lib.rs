//! Seeded fixtures shared by the benchmarks.

use plurigreen_core::{AnalyticDisc, Complex64, Poly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn coefficient(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Random polynomial of exact degree `degree`.
pub fn random_poly(degree: usize, seed: u64) -> Poly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c: Vec<Complex64> = (0..=degree).map(|_| coefficient(&mut rng)).collect();
    c[degree] += Complex64::new(1.0, 0.0);
    Poly::new(c)
}

/// Random disc in `C^dim` of the given degree through `center`, scaled so
/// that it stays inside the unit ball.
pub fn random_disc(center: &[f64], degree: usize, seed: u64) -> AnalyticDisc {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let room = 1.0 - center.iter().map(|v| v * v).sum::<f64>().sqrt();
    let scale = 0.9 * room / (degree as f64 * center.len() as f64).sqrt();
    let coeffs = center
        .iter()
        .map(|&c0| {
            std::iter::once(Complex64::new(c0, 0.0))
                .chain((0..degree).map(|_| coefficient(&mut rng) * scale))
                .collect()
        })
        .collect();
    AnalyticDisc::new(coeffs, 1.0001).expect("valid disc")
}
