//! Deterministic surface sampling of primitive solids (object frame, +z up).

use super::Vec3;
use crate::real::Real;

fn steps<T: Real>(len: T, spacing: T) -> usize {
    (len / spacing).ceil().to_usize().unwrap_or(1).max(1)
}

/// Points on the six faces of a box centered at `center` with half sizes `half`,
/// on a regular lattice no coarser than `spacing`.
pub fn box_surface<T: Real>(center: Vec3<T>, half: Vec3<T>, spacing: T) -> Vec<Vec3<T>> {
    let two = T::two();
    let (nx, ny, nz) = (
        steps(half.x * two, spacing),
        steps(half.y * two, spacing),
        steps(half.z * two, spacing),
    );
    let coord =
        |c: T, h: T, i: usize, n: usize| c - h + two * h * T::lit(i as f64) / T::lit(n as f64);
    let mut pts = Vec::new();
    for i in 0..=nx {
        for j in 0..=ny {
            for k in 0..=nz {
                if i == 0 || i == nx || j == 0 || j == ny || k == 0 || k == nz {
                    pts.push(Vec3::new(
                        coord(center.x, half.x, i, nx),
                        coord(center.y, half.y, j, ny),
                        coord(center.z, half.z, k, nz),
                    ));
                }
            }
        }
    }
    pts
}

/// Points on an upright cylinder (side rings plus both caps) centered at `center`.
pub fn cylinder_surface<T: Real>(
    center: Vec3<T>,
    radius: T,
    half_height: T,
    spacing: T,
) -> Vec<Vec3<T>> {
    let two = T::two();
    // A multiple of 4 puts ring points on both horizontal axes, so the AABB is exact.
    let n_around = steps(T::TAU() * radius, spacing).max(8).div_ceil(4) * 4;
    let n_up = steps(half_height * two, spacing);
    let n_rings = steps(radius, spacing);
    let mut pts = Vec::new();
    let ring = |pts: &mut Vec<Vec3<T>>, r: T, z: T, n: usize| {
        for a in 0..n {
            let th = T::TAU() * T::lit(a as f64) / T::lit(n as f64);
            pts.push(Vec3::new(
                center.x + r * th.cos(),
                center.y + r * th.sin(),
                z,
            ));
        }
    };
    for k in 0..=n_up {
        let z = center.z - half_height + two * half_height * T::lit(k as f64) / T::lit(n_up as f64);
        ring(&mut pts, radius, z, n_around);
    }
    for z in [center.z - half_height, center.z + half_height] {
        pts.push(Vec3::new(center.x, center.y, z));
        for r in 1..n_rings {
            let rr = radius * T::lit(r as f64) / T::lit(n_rings as f64);
            let n = steps(T::TAU() * rr, spacing).max(6);
            ring(&mut pts, rr, z, n);
        }
    }
    pts
}

/// Regular grid on the plane `z = height` covering `[-hx, hx] x [-hy, hy]` around `center`.
pub fn plane_grid<T: Real>(center: [T; 2], hx: T, hy: T, height: T, spacing: T) -> Vec<Vec3<T>> {
    let two = T::two();
    let (nx, ny) = (steps(hx * two, spacing), steps(hy * two, spacing));
    let mut pts = Vec::with_capacity((nx + 1) * (ny + 1));
    for i in 0..=nx {
        for j in 0..=ny {
            pts.push(Vec3::new(
                center[0] - hx + two * hx * T::lit(i as f64) / T::lit(nx as f64),
                center[1] - hy + two * hy * T::lit(j as f64) / T::lit(ny as f64),
                height,
            ));
        }
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Aabb;

    #[test]
    fn box_surface_spans_box() {
        let pts = box_surface(Vec3::<f64>::zeros(), Vec3::new(0.1, 0.05, 0.02), 0.01);
        let b = Aabb::from_points(&pts).unwrap();
        assert!((b.extent() - Vec3::new(0.2, 0.1, 0.04)).norm() < 1e-12);
        // No interior points.
        assert!(pts
            .iter()
            .all(|p| p.x.abs() > 0.0999 || p.y.abs() > 0.0499 || p.z.abs() > 0.0199));
    }

    #[test]
    fn cylinder_surface_radius() {
        let pts = cylinder_surface(Vec3::<f64>::zeros(), 0.04, 0.05, 0.01);
        let rmax = pts
            .iter()
            .map(|p| (p.x * p.x + p.y * p.y).sqrt())
            .fold(0.0, f64::max);
        assert!((rmax - 0.04).abs() < 1e-12);
    }
}
