//! Lloyd k-means over cell coordinates, used to split large terrain clusters
//! into search-sized subclusters.
//!
//! Seeding is farthest-point: the first centroid is drawn from a seeded RNG,
//! each further centroid is the point with the largest distance to its
//! nearest chosen centroid. Every tie (assignment, seeding, reseeding) breaks
//! towards the lowest point index, so a (points, k, seed) triple always
//! produces the same partition.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MAX_ITERATIONS: usize = 100;

pub(crate) struct KmeansResult {
    /// Index of the owning centroid per point.
    pub assignment: Vec<usize>,
    #[cfg_attr(not(test), allow(dead_code))]
    pub centroids: Vec<(f64, f64)>,
}

#[inline]
fn dist2(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)
}

fn nearest(point: (f64, f64), centroids: &[(f64, f64)]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, &c) in centroids.iter().enumerate() {
        let d = dist2(point, c);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Point index maximizing the distance to its nearest centroid.
fn farthest_point(points: &[(f64, f64)], centroids: &[(f64, f64)]) -> usize {
    let mut best = 0;
    let mut best_d = -1.0;
    for (i, &p) in points.iter().enumerate() {
        let d = centroids.iter().map(|&c| dist2(p, c)).fold(f64::INFINITY, f64::min);
        if d > best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

pub(crate) fn lloyd(points: &[(f64, f64)], k: usize, seed: u64) -> KmeansResult {
    assert!(k >= 1 && k <= points.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut centroids = Vec::with_capacity(k);
    centroids.push(points[rng.gen_range(0..points.len())]);
    while centroids.len() < k {
        centroids.push(points[farthest_point(points, &centroids)]);
    }

    let mut assignment: Vec<usize> = points.iter().map(|&p| nearest(p, &centroids)).collect();
    for _ in 0..MAX_ITERATIONS {
        // Means of the current assignment; empty clusters reseed to the
        // point farthest from its own centroid.
        let mut sums = vec![(0.0, 0.0, 0usize); k];
        for (i, &a) in assignment.iter().enumerate() {
            sums[a].0 += points[i].0;
            sums[a].1 += points[i].1;
            sums[a].2 += 1;
        }
        for (c, sum) in centroids.iter_mut().zip(&sums) {
            if sum.2 > 0 {
                *c = (sum.0 / sum.2 as f64, sum.1 / sum.2 as f64);
            }
        }
        for ci in 0..k {
            if sums[ci].2 == 0 {
                centroids[ci] = points[farthest_point(points, &centroids)];
            }
        }

        let next: Vec<usize> = points.iter().map(|&p| nearest(p, &centroids)).collect();
        let converged = next == assignment;
        assignment = next;
        if converged {
            break;
        }
    }

    KmeansResult { assignment, centroids }
}
