//! Independent reference implementations shared by the integration tests.

#![allow(dead_code)]

use placement_core::Vec3;

/// Convex hull (counter-clockwise, no collinear points) by Andrew's monotone chain.
pub fn hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &q in &p {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], q) <= 0.0 {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &q in p.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], q) <= 0.0 {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn axes(poly: &[[f64; 2]]) -> Vec<[f64; 2]> {
    (0..poly.len())
        .filter_map(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % poly.len()];
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let n = (dx * dx + dy * dy).sqrt();
            (n > 0.0).then(|| [-dy / n, dx / n])
        })
        .collect()
}

fn project(poly: &[[f64; 2]], axis: [f64; 2]) -> (f64, f64) {
    poly.iter()
        .map(|p| p[0] * axis[0] + p[1] * axis[1])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
}

/// Minimum translation distance separating two convex polygons; 0 when they do not overlap.
pub fn sat_depth(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    if a.len() < 3 || b.len() < 3 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for axis in axes(a).into_iter().chain(axes(b)) {
        let (a0, a1) = project(a, axis);
        let (b0, b1) = project(b, axis);
        let overlap = (a1 - b0).min(b1 - a0);
        if overlap <= 0.0 {
            return 0.0;
        }
        best = best.min(overlap);
    }
    best
}

/// Penetration of two world-frame point sets treated as footprint prisms.
pub fn prism_penetration(a: &[Vec3], b: &[Vec3]) -> f64 {
    let z = |p: &[Vec3]| {
        p.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), q| {
                (lo.min(q.z), hi.max(q.z))
            })
    };
    let (a0, a1) = z(a);
    let (b0, b1) = z(b);
    let vertical = (a1 - b0).min(b1 - a0);
    if vertical <= 0.0 {
        return 0.0;
    }
    let flat = |p: &[Vec3]| hull(&p.iter().map(|q| [q.x, q.y]).collect::<Vec<_>>());
    sat_depth(&flat(a), &flat(b)).min(vertical)
}

/// Points of an axis-aligned box surface, rotated by `yaw` about the vertical through
/// `center`.
pub fn yawed_box(center: Vec3, half: Vec3, yaw: f64, spacing: f64) -> Vec<Vec3> {
    let (s, c) = yaw.sin_cos();
    placement_core::geometry::surface::box_surface(Vec3::zeros(), half, spacing)
        .into_iter()
        .map(|p| {
            Vec3::new(
                center.x + c * p.x - s * p.y,
                center.y + s * p.x + c * p.y,
                center.z + p.z,
            )
        })
        .collect()
}
