//! Synthetic benchmark generators.

use alloc::vec::Vec;

use super::Dataset;
use crate::math;
use crate::rng::Rng;

const PI: f64 = core::f64::consts::PI;

/// Three half circles embedded in 100 dimensions, 500 points each.
///
/// Two upper arcs of radius 1 centered at (0, 0) and (3, 0), one lower arc
/// of radius 1.5 centered at (1.5, 0.4). The 2-D points fill the first two
/// coordinates; the remaining 98 are zero. Gaussian noise of variance 0.02
/// is then added to every one of the 100 components.
pub fn three_moons(seed: u64) -> Dataset {
    three_moons_with_noise(seed, 0.02)
}

/// [`three_moons`] with an explicit noise variance (0 disables noise).
pub fn three_moons_with_noise(seed: u64, noise_variance: f64) -> Dataset {
    const PER_CLASS: usize = 500;
    const DIM: usize = 100;
    let mut rng = Rng::new(seed);
    let n = 3 * PER_CLASS;
    let mut points = alloc::vec![0.0; n * DIM];
    let mut labels = Vec::with_capacity(n);
    let sigma = math::sqrt(noise_variance);

    for class in 0..3 {
        for p in 0..PER_CLASS {
            let row = (class * PER_CLASS + p) * DIM;
            let (x, y) = match class {
                // upper arcs, radius 1
                0 => {
                    let theta = rng.range(0.0, PI);
                    (math::cos(theta), math::sin(theta))
                }
                1 => {
                    let theta = rng.range(0.0, PI);
                    (3.0 + math::cos(theta), math::sin(theta))
                }
                // lower arc, radius 1.5
                _ => {
                    let theta = rng.range(PI, 2.0 * PI);
                    (1.5 + 1.5 * math::cos(theta), 0.4 + 1.5 * math::sin(theta))
                }
            };
            points[row] = x;
            points[row + 1] = y;
            if sigma > 0.0 {
                for d in 0..DIM {
                    points[row + d] += sigma * rng.normal();
                }
            }
            labels.push(class);
        }
    }
    Dataset::with_labels(points, n, DIM, labels, 3).expect("generator output is valid")
}

/// Four Gaussians rolled into 3-D, 400 points each.
///
/// Source points come from N(mean, I) with means (7.5, 7.5), (7.5, 12.5),
/// (12.5, 7.5), (12.5, 12.5) and are mapped by
/// `(x, y) -> (x cos x, y, x sin x)`.
pub fn swiss_roll(seed: u64) -> Dataset {
    const PER_CLASS: usize = 400;
    const MEANS: [(f64, f64); 4] = [(7.5, 7.5), (7.5, 12.5), (12.5, 7.5), (12.5, 12.5)];
    let mut rng = Rng::new(seed);
    let n = 4 * PER_CLASS;
    let mut points = Vec::with_capacity(n * 3);
    let mut labels = Vec::with_capacity(n);

    for (class, &(mx, my)) in MEANS.iter().enumerate() {
        for _ in 0..PER_CLASS {
            let x = mx + rng.normal();
            let y = my + rng.normal();
            points.push(x * math::cos(x));
            points.push(y);
            points.push(x * math::sin(x));
            labels.push(class);
        }
    }
    Dataset::with_labels(points, n, 3, labels, 4).expect("generator output is valid")
}
