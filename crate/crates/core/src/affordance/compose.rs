use rand::Rng as _;

use super::AffordanceMap;
use crate::geometry::{PointCloud, Vec3};
use crate::real::Real;
use crate::rng::rng_from_seed;
use crate::{Error, Result};

/// Pooled activation above which a point takes part in clustering.
pub const ACTIVE_THRESHOLD: f64 = 0.1;
/// Falloff of the coarse map around selected centers, meters.
pub const COARSE_SIGMA: f64 = 0.05;
pub const KMEANS_ITERS: usize = 20;
pub const KMEANS_TOL: f64 = 1e-6;
pub const KMEANS_SEED: u64 = 0;

fn check_maps<T: Real>(maps: &[AffordanceMap<T>]) -> Result<usize> {
    let first = maps
        .first()
        .ok_or_else(|| Error::InvalidArgument("no affordance maps".into()))?;
    if let Some(m) = maps.iter().find(|m| m.len() != first.len()) {
        return Err(Error::InvalidArgument(format!(
            "affordance maps are not aligned ({} vs {} values)",
            m.len(),
            first.len()
        )));
    }
    Ok(first.len())
}

/// `F_j = max(H_1j, ..., H_nj, mean_j)`.
pub fn compose_fine<T: Real>(maps: &[AffordanceMap<T>]) -> Result<AffordanceMap<T>> {
    let n = check_maps(maps)?;
    let count = T::lit(maps.len() as f64);
    let act = (0..n)
        .map(|j| {
            let (mx, sum) = maps
                .iter()
                .map(|m| m.activations()[j])
                .fold((T::zero(), T::zero()), |(mx, s), a| (mx.max(a), s + a));
            mx.max(sum / count).min(T::one())
        })
        .collect();
    Ok(AffordanceMap::from_trusted(act, maps[0].reference()))
}

/// Result of weighted k-means.
#[derive(Clone, Debug, PartialEq)]
pub struct Clusters<T> {
    pub centers: Vec<Vec3<T>>,
    /// Total weight assigned to each center.
    pub masses: Vec<T>,
}

fn nearest<T: Real>(p: &Vec3<T>, centers: &[Vec3<T>]) -> (usize, T) {
    let mut best = (0, T::infinity());
    for (i, c) in centers.iter().enumerate() {
        let d = p.distance_squared(c);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

fn draw_index(rng: &mut crate::rng::Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u -= w;
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// Weighted k-means with k-means++ seeding from a fixed seed. Fewer than `k` centers
/// are returned when the points have fewer than `k` distinct locations.
pub fn weighted_kmeans<T: Real>(
    points: &[Vec3<T>],
    weights: &[T],
    k: usize,
    seed: u64,
) -> Clusters<T> {
    let mut rng = rng_from_seed(seed);
    let w: Vec<f64> = weights.iter().map(|w| w.as_f64()).collect();
    let mut centers = vec![points[draw_index(&mut rng, &w)]];
    while centers.len() < k {
        let d2w: Vec<f64> = points
            .iter()
            .zip(&w)
            .map(|(p, &wi)| wi * nearest(p, &centers).1.as_f64())
            .collect();
        if d2w.iter().sum::<f64>() <= 0.0 {
            break;
        }
        centers.push(points[draw_index(&mut rng, &d2w)]);
    }
    let mut assign = vec![0usize; points.len()];
    for _ in 0..KMEANS_ITERS {
        for (a, p) in assign.iter_mut().zip(points) {
            *a = nearest(p, &centers).0;
        }
        let mut sums = vec![Vec3::zeros(); centers.len()];
        let mut mass = vec![T::zero(); centers.len()];
        for ((p, &a), &wi) in points.iter().zip(&assign).zip(weights) {
            sums[a] += *p * wi;
            mass[a] += wi;
        }
        let mut shift = T::zero();
        for (c, (s, m)) in centers.iter_mut().zip(sums.into_iter().zip(mass)) {
            if m > T::zero() {
                let nc = s / m;
                shift = shift.max(nc.distance(c));
                *c = nc;
            }
        }
        if shift < T::lit(KMEANS_TOL) {
            break;
        }
    }
    let mut masses = vec![T::zero(); centers.len()];
    for (p, &wi) in points.iter().zip(weights) {
        masses[nearest(p, &centers).0] += wi;
    }
    Clusters { centers, masses }
}

/// Coarse composition: cluster the pooled activation and score every scene point by
/// its distance to the heaviest `top_k` cluster centers.
///
/// Maps are pooled by pointwise maximum, and the weights of active points are
/// normalized to sum to one, so duplicating an input map leaves the result unchanged.
pub fn compose_coarse<T: Real>(
    maps: &[AffordanceMap<T>],
    scene_cloud: &PointCloud<T>,
    k: usize,
    top_k: usize,
) -> Result<AffordanceMap<T>> {
    let n = check_maps(maps)?;
    maps[0].check_aligned(scene_cloud)?;
    if k == 0 || top_k == 0 {
        return Err(Error::InvalidArgument(
            "k and top_k must be positive".into(),
        ));
    }
    let pooled: Vec<T> = (0..n)
        .map(|j| {
            maps.iter()
                .map(|m| m.activations()[j])
                .fold(T::zero(), T::max)
        })
        .collect();
    let peak = pooled.iter().copied().fold(T::zero(), T::max);
    if !(peak > T::zero()) {
        return Err(Error::AllZeroMap);
    }
    // Maps that never exceed the threshold still cluster on their support.
    let thr = if peak > T::lit(ACTIVE_THRESHOLD) {
        T::lit(ACTIVE_THRESHOLD)
    } else {
        T::zero()
    };
    let (pts, w): (Vec<Vec3<T>>, Vec<T>) = scene_cloud
        .points()
        .iter()
        .zip(&pooled)
        .filter(|(_, &a)| a > thr)
        .map(|(p, &a)| (*p, a))
        .unzip();
    let total: T = w.iter().copied().sum();
    let w: Vec<T> = w.into_iter().map(|a| a / total).collect();
    let clusters = weighted_kmeans(&pts, &w, k, KMEANS_SEED);
    let mut order: Vec<usize> = (0..clusters.centers.len()).collect();
    order.sort_by(|&a, &b| {
        clusters.masses[b]
            .partial_cmp(&clusters.masses[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let selected: Vec<Vec3<T>> = order
        .iter()
        .take(top_k)
        .map(|&i| clusters.centers[i])
        .collect();
    let s2 = T::two() * T::lit(COARSE_SIGMA * COARSE_SIGMA);
    let act = scene_cloud
        .points()
        .iter()
        .map(|p| (-nearest(p, &selected).1 / s2).exp())
        .collect();
    Ok(AffordanceMap::from_trusted(act, maps[0].reference()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn map(a: Vec<f64>) -> AffordanceMap<f64> {
        AffordanceMap::new(a, "s").unwrap()
    }

    #[test]
    fn fine_single_map_is_identity() {
        let m = map(vec![0.1, 0.7, 0.0]);
        assert_eq!(compose_fine(std::slice::from_ref(&m)).unwrap(), m);
    }

    #[test]
    fn fine_max_dominates_mean() {
        let f = compose_fine(&[map(vec![1.0, 0.0]), map(vec![0.0, 1.0])]).unwrap();
        assert_eq!(f.activations(), &[1.0, 1.0]);
    }

    #[test]
    fn fine_rejects_misaligned() {
        assert!(compose_fine(&[map(vec![1.0]), map(vec![0.0, 1.0])]).is_err());
        assert!(compose_fine::<f64>(&[]).is_err());
    }

    /// Two compact blobs of points with activation 1 around each center.
    fn blobs(c1: Vec3<f64>, n1: usize, c2: Vec3<f64>, n2: usize) -> (PointCloud<f64>, Vec<f64>) {
        let mut rng = rng_from_seed(3);
        let mut pts = Vec::new();
        for (c, n) in [(c1, n1), (c2, n2)] {
            for _ in 0..n {
                let d = Vec3::new(
                    rng.random::<f64>() - 0.5,
                    rng.random::<f64>() - 0.5,
                    rng.random::<f64>() - 0.5,
                );
                pts.push(c + d * 0.04);
            }
        }
        let act = vec![1.0; pts.len()];
        (PointCloud::new(pts).unwrap(), act)
    }

    fn mean(pts: &[Vec3<f64>]) -> Vec3<f64> {
        pts.iter().copied().sum::<Vec3<f64>>() / pts.len() as f64
    }

    #[test]
    fn coarse_two_blob_centers() {
        let (c1, c2) = (Vec3::new(0.0, 0.0, 0.0), Vec3::new(0.5, 0.2, 0.0));
        let (cloud, act) = blobs(c1, 60, c2, 40);
        let pts = cloud.points();
        let cl = weighted_kmeans(pts, &vec![0.01; 100], 2, 0);
        let m1 = mean(&pts[..60]);
        let m2 = mean(&pts[60..]);
        for m in [m1, m2] {
            assert!(cl.centers.iter().any(|c| c.distance(&m) < 0.01));
        }
        let coarse = compose_coarse(&[map(act.clone())], &cloud, 2, 2).unwrap();
        assert!(coarse
            .activations()
            .iter()
            .all(|&a| (0.0..=1.0).contains(&a)));
        // top_k = 1 keeps only the heavier blob.
        let one = compose_coarse(&[map(act)], &cloud, 2, 1).unwrap();
        // Selected center is within 1 cm of the heavy blob mean, so the light blob sees
        // at most the falloff at (separation - 1 cm - offset of the probe point).
        let sep = m1.distance(&m2);
        let j = pts
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.distance(&m2).total_cmp(&b.1.distance(&m2)))
            .unwrap()
            .0;
        let d = sep - 0.01 - pts[j].distance(&m2);
        let bound = (-(d * d) / (2.0 * COARSE_SIGMA * COARSE_SIGMA)).exp();
        assert!(one.activations()[j] <= bound);
        assert!(bound < (-(0.25f64).powi(2) / (2.0 * COARSE_SIGMA * COARSE_SIGMA)).exp());
        let i = pts
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.distance(&m1).total_cmp(&b.1.distance(&m1)))
            .unwrap()
            .0;
        assert!(one.activations()[i] > 0.9);
    }

    #[test]
    fn coarse_degenerate_single_location() {
        let pts = vec![
            Vec3::new(0.1, 0.1, 0.0),
            Vec3::new(0.1, 0.1, 0.0),
            Vec3::new(0.5, 0.0, 0.0),
            Vec3::new(0.12, 0.1, 0.0),
        ];
        let cloud = PointCloud::new(pts).unwrap();
        let m = map(vec![1.0, 0.5, 0.0, 0.0]);
        let c = compose_coarse(&[m], &cloud, 2, 2).unwrap();
        assert_eq!(c.argmax(), Some(0));
        assert!((c.activations()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coarse_all_zero_is_error() {
        let cloud = PointCloud::new(vec![Vec3::zeros()]).unwrap();
        assert!(matches!(
            compose_coarse(&[map(vec![0.0])], &cloud, 2, 2),
            Err(Error::AllZeroMap)
        ));
    }

    proptest! {
        #[test]
        fn fine_upper_bounds_inputs_and_is_permutation_invariant(
            a in prop::collection::vec(0.0f64..=1.0, 12),
            b in prop::collection::vec(0.0f64..=1.0, 12),
            c in prop::collection::vec(0.0f64..=1.0, 12),
        ) {
            let (ma, mb, mc) = (map(a), map(b), map(c));
            let f = compose_fine(&[ma.clone(), mb.clone(), mc.clone()]).unwrap();
            let g = compose_fine(&[mc.clone(), ma.clone(), mb.clone()]).unwrap();
            for j in 0..12 {
                let x = [ma.activations()[j], mb.activations()[j], mc.activations()[j]];
                let mean = (x[0] + x[1] + x[2]) / 3.0;
                prop_assert!(x.iter().all(|&v| f.activations()[j] >= v));
                prop_assert!(f.activations()[j] >= mean);
                prop_assert!((f.activations()[j] - g.activations()[j]).abs() <= 1e-15);
            }
        }

        #[test]
        fn coarse_duplication_invariant(
            a in prop::collection::vec(0.0f64..=1.0, 30),
            b in prop::collection::vec(0.0f64..=1.0, 30),
            seed in 0u64..1000,
        ) {
            let mut rng = rng_from_seed(seed);
            let pts: Vec<Vec3<f64>> = (0..30).map(|_| Vec3::new(rng.random(), rng.random(), 0.0)).collect();
            let cloud = PointCloud::new(pts).unwrap();
            let (ma, mb) = (map(a), map(b));
            prop_assume!(ma.max() > 0.0 || mb.max() > 0.0);
            let once = compose_coarse(&[ma.clone(), mb.clone()], &cloud, 2, 2).unwrap();
            let twice = compose_coarse(&[ma.clone(), mb.clone(), ma.clone()], &cloud, 2, 2).unwrap();
            prop_assert_eq!(once, twice);
        }
    }
}
