use crate::geometry::{KdTree, PointCloud, Pose, PoseDelta, TsdfGrid, Vec3};
use crate::real::Real;
use crate::Result;

/// Derivative of a world point `p = R(yaw) o + t` with respect to yaw, given `r = p - t`.
#[inline]
fn d_yaw<T: Real>(r: &Vec3<T>) -> Vec3<T> {
    Vec3::new(-r.y, r.x, T::zero())
}

/// Alignment cost `sum_i |T o_i - x_i|^2` with `x_i` the nearest point of `X_h`, and its
/// gradient with respect to the pose. Correspondences are held fixed when differentiating.
pub fn cost_afford<T: Real>(
    pose0: &Pose<T>,
    object_points: &PointCloud<T>,
    x_h: &KdTree<T>,
) -> (T, PoseDelta<T>) {
    let t = pose0.translation();
    let mut cost = T::zero();
    let mut g = PoseDelta::zero();
    for o in object_points.points() {
        let r = pose0.rotate(o);
        let p = r + t;
        let (i, d2) = x_h.nearest(&p);
        cost += d2;
        let e = (p - x_h.point(i)) * T::two();
        g.translation += e;
        g.yaw += e.dot(&d_yaw(&r));
    }
    (cost, g)
}

/// [`cost_afford`] building the search structure from `X_h`. Errors on an empty `X_h`.
pub fn cost_afford_cloud<T: Real>(
    pose0: &Pose<T>,
    object_points: &PointCloud<T>,
    x_h: &PointCloud<T>,
) -> Result<(T, PoseDelta<T>)> {
    let tree = KdTree::from_cloud(x_h)?;
    Ok(cost_afford(pose0, object_points, &tree))
}

/// Penetration cost `sum_i -min(tsdf(T o_i), 0)` and its gradient with respect to the pose.
pub fn cost_collide<T: Real>(
    pose0: &Pose<T>,
    object_points: &PointCloud<T>,
    grid: &TsdfGrid<T>,
) -> (T, PoseDelta<T>) {
    let t = pose0.translation();
    let mut cost = T::zero();
    let mut g = PoseDelta::zero();
    for o in object_points.points() {
        let r = pose0.rotate(o);
        let (v, grad) = grid.query(&(r + t));
        if v < T::zero() {
            cost -= v;
            g.translation -= grad;
            g.yaw -= grad.dot(&d_yaw(&r));
        }
    }
    (cost, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::surface::box_surface;
    use crate::geometry::TsdfParams;

    fn cloud(pts: Vec<Vec3<f64>>) -> PointCloud<f64> {
        PointCloud::new(pts).unwrap()
    }

    #[test]
    fn perfect_alignment_is_zero() {
        let obj = cloud(vec![Vec3::new(0.1, 0.0, 0.0), Vec3::new(0.0, 0.2, 0.0)]);
        let pose = Pose::new(Vec3::new(1.0, 2.0, 0.0), 0.7);
        let xh = obj.transformed(&pose);
        let (j, g) = cost_afford_cloud(&pose, &obj, &xh).unwrap();
        assert_eq!(j, 0.0);
        assert_eq!(g, PoseDelta::zero());
    }

    #[test]
    fn single_point_quadratic() {
        let obj = cloud(vec![Vec3::zeros()]);
        let xh = cloud(vec![Vec3::new(0.1, 0.0, 0.0)]);
        let (j, g) = cost_afford_cloud(&Pose::identity(), &obj, &xh).unwrap();
        assert!((j - 0.01).abs() < 1e-15);
        assert!((g.translation.norm() - 0.2).abs() < 1e-15);
        // Descending the gradient moves toward the target.
        assert!(g.translation.x < 0.0);
    }

    #[test]
    fn empty_xh_is_an_error() {
        let obj = cloud(vec![Vec3::zeros()]);
        assert!(cost_afford_cloud(&Pose::identity(), &obj, &cloud(vec![])).is_err());
    }

    fn cube_grid() -> TsdfGrid<f64> {
        let pts = box_surface(Vec3::new(0.0, 0.0, 0.05), Vec3::new(0.05, 0.05, 0.05), 0.01);
        TsdfGrid::build(&[cloud(pts)], &TsdfParams::default()).unwrap()
    }

    #[test]
    fn free_space_is_zero() {
        let g = cube_grid();
        let obj = cloud(vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(0.02, 0.0, 0.0)]);
        let (j, d) = cost_collide(&Pose::from_translation(Vec3::new(0.4, 0.0, 0.05)), &obj, &g);
        assert_eq!(j, 0.0);
        assert_eq!(d, PoseDelta::zero());
    }

    #[test]
    fn single_point_penalty_equals_depth() {
        let g = cube_grid();
        let p = Vec3::new(0.0, 0.0, 0.05);
        let v = g.value(&p);
        assert!(v < 0.0);
        let (j, _) = cost_collide(&Pose::from_translation(p), &cloud(vec![Vec3::zeros()]), &g);
        assert_eq!(j, -v);
    }

    #[test]
    fn descent_clears_box_overlap() {
        let g = cube_grid();
        let obj = cloud(box_surface(
            Vec3::zeros(),
            Vec3::new(0.03, 0.03, 0.03),
            0.01,
        ));
        let mut pose = Pose::from_translation(Vec3::new(0.06, 0.01, 0.03));
        let (mut j, _) = cost_collide(&pose, &obj, &g);
        assert!(j > 0.0);
        for _ in 0..20 {
            if j == 0.0 {
                break;
            }
            let (_, d) = cost_collide(&pose, &obj, &g);
            let n = (d.translation.norm_squared() + d.yaw * d.yaw).sqrt();
            let step = 0.005 / n;
            pose = pose.boxplus(&d.scaled(-step, -step));
            let (nj, _) = cost_collide(&pose, &obj, &g);
            assert!(nj < j, "{nj} >= {j}");
            j = nj;
        }
        assert_eq!(j, 0.0);
    }
}
