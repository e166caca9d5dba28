//! Seeded random sources. All randomness in the crate flows through an
//! explicit `u64` seed; nothing reads global state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian: real and imaginary parts i.i.d. N(0, 1/2).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed `n x n` unitary drawn from `rng`.
///
/// QR of a complex Gaussian matrix, with the phases of `R`'s diagonal moved
/// into `Q` so the result does not depend on the QR sign convention.
pub fn haar_unitary_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    assert!(n >= 1, "dimension must be positive");
    let z = ComplexMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    let (q, r) = z.qr().expect("square by construction");
    let phases: Vec<C64> = (0..n)
        .map(|k| {
            let d = r[(k, k)];
            if d.norm() == 0.0 {
                C64::new(1.0, 0.0)
            } else {
                d / d.norm()
            }
        })
        .collect();
    &q * &ComplexMatrix::diagonal(&phases)
}

/// Haar unitary from a seed; identical seeds give identical matrices.
pub fn haar_unitary(n: usize, seed: u64) -> ComplexMatrix {
    haar_unitary_with(n, &mut seeded(seed))
}

/// Uniform point on the unit 3-sphere.
pub fn unit_quaternion<R: Rng + ?Sized>(rng: &mut R) -> [f64; 4] {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.map(|x| x / norm);
        }
    }
}

/// Real symmetric matrix with entries uniform in `[-scale, scale]`.
pub fn real_symmetric<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> Vec<f64> {
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let x = rng.random_range(-scale..=scale);
            data[i * n + j] = x;
            data[j * n + i] = x;
        }
    }
    data
}
