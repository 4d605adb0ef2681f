use super::AffordanceMap;
use crate::geometry::PointCloud;
use crate::real::Real;
use crate::{Error, Result};

/// Indices of points with activation at least `threshold_frac` times the map maximum.
pub fn high_affordance_indices<T: Real>(
    map: &AffordanceMap<T>,
    threshold_frac: T,
) -> Result<Vec<usize>> {
    let peak = map.max();
    if !(peak > T::zero()) {
        return Err(Error::AllZeroMap);
    }
    let thr = threshold_frac * peak;
    Ok(map
        .activations()
        .iter()
        .enumerate()
        .filter(|(_, &a)| a >= thr)
        .map(|(i, _)| i)
        .collect())
}

/// The high-affordance region `X_h` as a point cloud.
pub fn high_affordance_points<T: Real>(
    map: &AffordanceMap<T>,
    scene_cloud: &PointCloud<T>,
    threshold_frac: T,
) -> Result<PointCloud<T>> {
    map.check_aligned(scene_cloud)?;
    let idx = high_affordance_indices(map, threshold_frac)?;
    PointCloud::new(idx.into_iter().map(|i| scene_cloud.points()[i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;

    fn line(n: usize) -> PointCloud<f64> {
        PointCloud::new(
            (0..n)
                .map(|i| Vec3::new(i as f64 * 0.01, 0.0, 0.0))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn uniform_map_keeps_everything() {
        let m = AffordanceMap::new(vec![0.3; 5], "s").unwrap();
        assert_eq!(high_affordance_points(&m, &line(5), 0.5).unwrap().len(), 5);
    }

    #[test]
    fn single_nonzero_point() {
        let m = AffordanceMap::new(vec![0.0, 0.0, 0.2, 0.0], "s").unwrap();
        let x = high_affordance_points(&m, &line(4), 0.5).unwrap();
        assert_eq!(x.points(), &[Vec3::new(0.02, 0.0, 0.0)]);
    }

    #[test]
    fn gaussian_half_max_radius() {
        let cloud = line(101);
        let c = Vec3::new(0.5, 0.0, 0.0);
        let sigma = 0.1;
        let act: Vec<f64> = cloud
            .points()
            .iter()
            .map(|p| (-p.distance_squared(&c) / (2.0 * sigma * sigma)).exp())
            .collect();
        let m = AffordanceMap::new(act, "s").unwrap();
        let x = high_affordance_points(&m, &cloud, 0.5).unwrap();
        let r = sigma * (2.0 * 2f64.ln()).sqrt();
        let expect: Vec<_> = cloud
            .points()
            .iter()
            .filter(|p| p.distance(&c) <= r)
            .copied()
            .collect();
        assert_eq!(x.points(), expect.as_slice());
    }

    #[test]
    fn all_zero_rejected() {
        let m = AffordanceMap::new(vec![0.0; 3], "s").unwrap();
        assert!(matches!(
            high_affordance_points(&m, &line(3), 0.5),
            Err(Error::AllZeroMap)
        ));
    }
}
