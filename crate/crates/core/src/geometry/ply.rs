//! ASCII PLY import/export for point clouds (`x y z [activation]`).

use std::fmt::Write as _;
use std::path::Path;

use super::{PointCloud, Vec3};
use crate::error::{Error, Result};
use crate::real::Real;

pub fn to_ply_string<T: Real>(cloud: &PointCloud<T>) -> String {
    let mut s = String::with_capacity(64 + cloud.len() * 40);
    s.push_str("ply\nformat ascii 1.0\n");
    let _ = writeln!(s, "element vertex {}", cloud.len());
    s.push_str("property double x\nproperty double y\nproperty double z\n");
    if cloud.activations().is_some() {
        s.push_str("property double activation\n");
    }
    s.push_str("end_header\n");
    for (i, p) in cloud.points().iter().enumerate() {
        // f64 Display is the shortest representation that round-trips.
        let _ = write!(s, "{} {} {}", p.x.as_f64(), p.y.as_f64(), p.z.as_f64());
        if let Some(a) = cloud.activations() {
            let _ = write!(s, " {}", a[i].as_f64());
        }
        s.push('\n');
    }
    s
}

pub fn write_ply<T: Real>(path: &Path, cloud: &PointCloud<T>) -> Result<()> {
    std::fs::write(path, to_ply_string(cloud))?;
    Ok(())
}

pub fn parse_ply<T: Real>(text: &str) -> Result<PointCloud<T>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("ply") {
        return Err(Error::Parse("missing ply magic".into()));
    }
    let mut count = None;
    let mut props: Vec<String> = Vec::new();
    let mut in_vertex = false;
    loop {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse("unterminated ply header".into()))?
            .trim();
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("format") => {
                if tok.next() != Some("ascii") {
                    return Err(Error::Parse("only ascii ply is supported".into()));
                }
            }
            Some("element") => {
                in_vertex = tok.next() == Some("vertex");
                if in_vertex {
                    count = tok.next().and_then(|n| n.parse::<usize>().ok());
                }
            }
            Some("property") if in_vertex => {
                props.push(tok.last().unwrap_or_default().to_string());
            }
            Some("end_header") => break,
            _ => {}
        }
    }
    let count = count.ok_or_else(|| Error::Parse("missing vertex element".into()))?;
    let col = |name: &str| props.iter().position(|p| p == name);
    let (ix, iy, iz) = match (col("x"), col("y"), col("z")) {
        (Some(x), Some(y), Some(z)) => (x, y, z),
        _ => return Err(Error::Parse("vertex needs x, y, z".into())),
    };
    let ia = col("activation");
    let mut points = Vec::with_capacity(count);
    let mut acts = Vec::new();
    for _ in 0..count {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse("truncated vertex list".into()))?;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad number {t:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        if vals.len() < props.len() {
            return Err(Error::Parse("short vertex row".into()));
        }
        points.push(Vec3::from_f64(vals[ix], vals[iy], vals[iz]));
        if let Some(i) = ia {
            acts.push(T::lit(vals[i]));
        }
    }
    if ia.is_some() {
        PointCloud::with_activations(points, acts)
    } else {
        PointCloud::new(points)
    }
}

pub fn read_ply<T: Real>(path: &Path) -> Result<PointCloud<T>> {
    parse_ply(&std::fs::read_to_string(path)?)
}
