//! Horizontal footprints: 2D convex hulls of an object's points seen along gravity.

use super::Vec3;
use crate::real::Real;

/// Counter-clockwise convex polygon in the horizontal plane. Degenerate hulls
/// (a single point or a segment) are kept as-is.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon<T> {
    vertices: Vec<[T; 2]>,
}

fn cross<T: Real>(o: [T; 2], a: [T; 2], b: [T; 2]) -> T {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

impl<T: Real> ConvexPolygon<T> {
    /// Andrew's monotone chain. Collinear boundary points are dropped.
    pub fn hull(points: impl IntoIterator<Item = [T; 2]>) -> Self {
        let mut pts: Vec<[T; 2]> = points.into_iter().collect();
        pts.sort_by(|a, b| {
            a[0].partial_cmp(&b[0])
                .expect("finite")
                .then(a[1].partial_cmp(&b[1]).expect("finite"))
        });
        pts.dedup();
        if pts.len() <= 2 {
            return Self { vertices: pts };
        }
        let mut lower: Vec<[T; 2]> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2
                && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= T::zero()
            {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<[T; 2]> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2
                && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= T::zero()
            {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Self { vertices: lower }
    }

    pub fn from_points3(points: &[Vec3<T>]) -> Self {
        Self::hull(points.iter().map(|p| p.xy()))
    }

    /// Axis-aligned rectangle centered at `center` with half sizes `hx`, `hy`.
    pub fn rectangle(center: [T; 2], hx: T, hy: T) -> Self {
        let [cx, cy] = center;
        Self::hull([
            [cx - hx, cy - hy],
            [cx + hx, cy - hy],
            [cx + hx, cy + hy],
            [cx - hx, cy + hy],
        ])
    }

    pub fn vertices(&self) -> &[[T; 2]] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> T {
        let n = self.vertices.len();
        if n < 3 {
            return T::zero();
        }
        let mut a = T::zero();
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            a += p[0] * q[1] - q[0] * p[1];
        }
        a * T::half()
    }

    /// Max of `p · dir` over the polygon (support function).
    pub fn support(&self, dir: [T; 2]) -> T {
        self.vertices
            .iter()
            .map(|p| p[0] * dir[0] + p[1] * dir[1])
            .fold(T::neg_infinity(), T::max)
    }

    /// Support measured from `origin`: how far the footprint reaches along the unit `dir`.
    pub fn reach(&self, origin: [T; 2], dir: [T; 2]) -> T {
        self.support(dir) - (origin[0] * dir[0] + origin[1] * dir[1])
    }

    /// Closed containment test with an absolute tolerance (meters).
    pub fn contains(&self, p: [T; 2], tol: T) -> bool {
        match self.vertices.len() {
            0 => false,
            1 => dist2(self.vertices[0], p) <= tol * tol,
            2 => segment_distance(p, self.vertices[0], self.vertices[1]) <= tol,
            n => (0..n).all(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                let len = dist2(a, b).sqrt();
                cross(a, b, p) / len >= -tol
            }),
        }
    }

    fn edge_normals(&self) -> Vec<[T; 2]> {
        let n = self.vertices.len();
        match n {
            0 | 1 => Vec::new(),
            2 => {
                let (a, b) = (self.vertices[0], self.vertices[1]);
                let d = [b[0] - a[0], b[1] - a[1]];
                let l = (d[0] * d[0] + d[1] * d[1]).sqrt();
                vec![[d[0] / l, d[1] / l], [-d[1] / l, d[0] / l]]
            }
            _ => (0..n)
                .map(|i| {
                    let a = self.vertices[i];
                    let b = self.vertices[(i + 1) % n];
                    let d = [b[0] - a[0], b[1] - a[1]];
                    let l = (d[0] * d[0] + d[1] * d[1]).sqrt();
                    [d[1] / l, -d[0] / l]
                })
                .collect(),
        }
    }

    fn project(&self, axis: [T; 2]) -> (T, T) {
        self.vertices
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), p| {
                let s = p[0] * axis[0] + p[1] * axis[1];
                (lo.min(s), hi.max(s))
            })
    }

    /// Minimum horizontal translation distance that separates the two polygons
    /// (separating-axis test over both polygons' edge normals). Zero when already
    /// separated or touching.
    pub fn penetration_depth(&self, other: &Self) -> T {
        if self.is_empty() || other.is_empty() {
            return T::zero();
        }
        let mut axes = self.edge_normals();
        axes.extend(other.edge_normals());
        if axes.is_empty() {
            // Two points.
            return T::zero();
        }
        let mut depth = T::infinity();
        for axis in axes {
            let (a0, a1) = self.project(axis);
            let (b0, b1) = other.project(axis);
            let d = (a1 - b0).min(b1 - a0);
            if d <= T::zero() {
                return T::zero();
            }
            depth = depth.min(d);
        }
        depth
    }

    /// Euclidean distance between the two polygons; zero if they intersect.
    pub fn distance(&self, other: &Self) -> T {
        if self.is_empty() || other.is_empty() {
            return T::infinity();
        }
        if self.penetration_depth(other) > T::zero()
            || self.vertices.iter().any(|&p| other.contains(p, T::zero()))
            || other.vertices.iter().any(|&p| self.contains(p, T::zero()))
        {
            return T::zero();
        }
        let mut best = T::infinity();
        for (a, b) in [(self, other), (other, self)] {
            let m = b.vertices.len();
            for &p in &a.vertices {
                if m == 1 {
                    best = best.min(dist2(p, b.vertices[0]).sqrt());
                }
                for j in 0..m.max(1) {
                    if m >= 2 {
                        best =
                            best.min(segment_distance(p, b.vertices[j], b.vertices[(j + 1) % m]));
                    }
                }
            }
        }
        best
    }

    /// Signed distance from `p` to the boundary: negative inside.
    pub fn signed_distance(&self, p: [T; 2]) -> T {
        let n = self.vertices.len();
        if n < 3 {
            return match n {
                0 => T::infinity(),
                1 => dist2(p, self.vertices[0]).sqrt(),
                _ => segment_distance(p, self.vertices[0], self.vertices[1]),
            };
        }
        let d = (0..n)
            .map(|i| segment_distance(p, self.vertices[i], self.vertices[(i + 1) % n]))
            .fold(T::infinity(), T::min);
        if self.contains(p, T::zero()) {
            -d
        } else {
            d
        }
    }

    pub fn translated(&self, d: [T; 2]) -> Self {
        Self {
            vertices: self
                .vertices
                .iter()
                .map(|p| [p[0] + d[0], p[1] + d[1]])
                .collect(),
        }
    }
}

fn dist2<T: Real>(a: [T; 2], b: [T; 2]) -> T {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

fn segment_distance<T: Real>(p: [T; 2], a: [T; 2], b: [T; 2]) -> T {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    if len2 == T::zero() {
        return dist2(p, a).sqrt();
    }
    let t = (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2)
        .max(T::zero())
        .min(T::one());
    dist2(p, [a[0] + ab[0] * t, a[1] + ab[1] * t]).sqrt()
}
