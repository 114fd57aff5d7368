//! Triangle meshes: OBJ loading, mass properties, and scale normalization.
//!
//! All lengths are meters. Object meshes are rescaled into a graspable size
//! band before any SDF or sampling work happens, see [`TriangleMesh::normalize_scale`].

use std::fs;
use std::path::Path;

use nalgebra::{Point3, Vector3};

use crate::error::{Error, Result};

/// Base rescale factor applied to raw assets (most are unit-cube normalized).
pub const SCALE_BASE: f64 = 0.08;
/// After rescaling, the smallest bounding-box axis may not exceed this.
pub const SCALE_MAX_MIN_AXIS: f64 = 0.08;
/// After rescaling, the largest bounding-box axis may not fall below this.
pub const SCALE_MIN_MAX_AXIS: f64 = 0.07;

#[derive(Debug, Clone)]
pub struct TriangleMesh {
    pub vertices: Vec<Point3<f64>>,
    pub triangles: Vec<[usize; 3]>,
    /// Per-vertex unit normals, area-weighted over incident faces.
    pub normals: Vec<Vector3<f64>>,
}

impl TriangleMesh {
    /// Builds a mesh from raw buffers, validating indices and recomputing
    /// vertex normals. Rejects empty meshes and out-of-range indices.
    pub fn new(vertices: Vec<Point3<f64>>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if vertices.is_empty() || triangles.is_empty() {
            return Err(Error::Mesh("mesh has no vertices or no faces".into()));
        }
        for (f, tri) in triangles.iter().enumerate() {
            for &i in tri {
                if i >= vertices.len() {
                    return Err(Error::Mesh(format!(
                        "face {f} references vertex {i} but mesh has {} vertices",
                        vertices.len()
                    )));
                }
            }
        }
        let mut mesh = TriangleMesh {
            vertices,
            triangles,
            normals: Vec::new(),
        };
        if mesh.surface_area() <= 0.0 {
            return Err(Error::Mesh("mesh has zero surface area".into()));
        }
        mesh.recompute_normals();
        Ok(mesh)
    }

    /// Parses a Wavefront OBJ file. Only `v` and `f` records are used;
    /// normals are recomputed, polygons are fan-triangulated.
    pub fn load_obj(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::parse_obj(&text).map_err(|e| match e {
            Error::Mesh(m) => Error::Mesh(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse_obj(text: &str) -> Result<Self> {
        let mut vertices: Vec<Point3<f64>> = Vec::new();
        let mut triangles: Vec<[usize; 3]> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            match it.next() {
                Some("v") => {
                    let mut coord = [0.0f64; 3];
                    for c in coord.iter_mut() {
                        *c = it
                            .next()
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| Error::Mesh(format!("line {}: bad vertex", lineno + 1)))?;
                    }
                    vertices.push(Point3::new(coord[0], coord[1], coord[2]));
                }
                Some("f") => {
                    let idx: Vec<usize> = it
                        .map(|tok| {
                            let first = tok.split('/').next().unwrap_or("");
                            let v: i64 = first
                                .parse()
                                .map_err(|_| Error::Mesh(format!("line {}: bad face index", lineno + 1)))?;
                            let v = if v < 0 {
                                vertices.len() as i64 + v
                            } else {
                                v - 1
                            };
                            if v < 0 {
                                return Err(Error::Mesh(format!("line {}: bad face index", lineno + 1)));
                            }
                            Ok(v as usize)
                        })
                        .collect::<Result<_>>()?;
                    if idx.len() < 3 {
                        return Err(Error::Mesh(format!("line {}: face with < 3 vertices", lineno + 1)));
                    }
                    for k in 1..idx.len() - 1 {
                        triangles.push([idx[0], idx[k], idx[k + 1]]);
                    }
                }
                _ => {}
            }
        }
        Self::new(vertices, triangles)
    }

    pub fn triangle(&self, i: usize) -> [Point3<f64>; 3] {
        let [a, b, c] = self.triangles[i];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn recompute_normals(&mut self) {
        let mut acc = vec![Vector3::zeros(); self.vertices.len()];
        for tri in &self.triangles {
            let [a, b, c] = *tri;
            let n = (self.vertices[b] - self.vertices[a]).cross(&(self.vertices[c] - self.vertices[a]));
            // cross product magnitude is twice the area, so this is area weighting
            acc[a] += n;
            acc[b] += n;
            acc[c] += n;
        }
        self.normals = acc
            .into_iter()
            .map(|n| {
                let len = n.norm();
                if len > 1e-20 {
                    n / len
                } else {
                    Vector3::z()
                }
            })
            .collect();
    }

    pub fn bounding_box(&self) -> (Point3<f64>, Point3<f64>) {
        let mut lo = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    pub fn extents(&self) -> Vector3<f64> {
        let (lo, hi) = self.bounding_box();
        hi - lo
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|i| {
                let [a, b, c] = self.triangle(i);
                (b - a).cross(&(c - a)).norm() * 0.5
            })
            .sum()
    }

    /// Volume centroid from signed tetrahedra against the origin. Falls back
    /// to the area centroid when the enclosed volume is near zero (open shells).
    pub fn center_of_mass(&self) -> Point3<f64> {
        let mut vol = 0.0;
        let mut moment = Vector3::zeros();
        for i in 0..self.triangles.len() {
            let [a, b, c] = self.triangle(i);
            let v = a.coords.dot(&b.coords.cross(&c.coords)) / 6.0;
            vol += v;
            moment += (a.coords + b.coords + c.coords) / 4.0 * v;
        }
        if vol.abs() > 1e-12 {
            return Point3::from(moment / vol);
        }
        let mut area = 0.0;
        let mut centroid = Vector3::zeros();
        for i in 0..self.triangles.len() {
            let [a, b, c] = self.triangle(i);
            let w = (b - a).cross(&(c - a)).norm() * 0.5;
            area += w;
            centroid += (a.coords + b.coords + c.coords) / 3.0 * w;
        }
        Point3::from(centroid / area)
    }

    /// Radius of the smallest origin-independent bounding sphere proxy:
    /// max vertex distance from `center`.
    pub fn circumradius(&self, center: &Point3<f64>) -> f64 {
        self.vertices
            .iter()
            .map(|v| (v - center).norm())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> TriangleMesh {
        let mut out = self.clone();
        for v in &mut out.vertices {
            v.coords *= factor;
        }
        out
    }

    /// Rescales the mesh into the graspable size band.
    ///
    /// Meshes are first scaled by 0.08 (raw assets are unit-cube normalized),
    /// then corrected: if the smallest bounding-box axis still exceeds
    /// 0.08 m the mesh is shrunk until it equals 0.08 m, and if the largest
    /// axis falls below 0.07 m the mesh is grown until it equals 0.07 m.
    /// A mesh whose extents already satisfy both bounds is returned
    /// unchanged, which makes the operation idempotent.
    pub fn normalize_scale(&self) -> Result<TriangleMesh> {
        let e = self.extents();
        let min_axis = e.min();
        let max_axis = e.max();
        if !(min_axis > 0.0) {
            return Err(Error::Mesh("degenerate bounding box".into()));
        }
        if min_axis <= SCALE_MAX_MIN_AXIS && max_axis >= SCALE_MIN_MAX_AXIS {
            return Ok(self.clone());
        }
        let mut s = SCALE_BASE;
        if min_axis * s > SCALE_MAX_MIN_AXIS {
            s *= SCALE_MAX_MIN_AXIS / (min_axis * s);
        } else if max_axis * s < SCALE_MIN_MAX_AXIS {
            s *= SCALE_MIN_MAX_AXIS / (max_axis * s);
        }
        Ok(self.scaled(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cube(side: f64) -> TriangleMesh {
        let h = side / 2.0;
        let text = format!(
            "v -{h} -{h} -{h}\nv {h} -{h} -{h}\nv {h} {h} -{h}\nv -{h} {h} -{h}\n\
             v -{h} -{h} {h}\nv {h} -{h} {h}\nv {h} {h} {h}\nv -{h} {h} {h}\n\
             f 1 3 2\nf 1 4 3\nf 5 6 7\nf 5 7 8\nf 1 2 6\nf 1 6 5\n\
             f 2 3 7\nf 2 7 6\nf 3 4 8\nf 3 8 7\nf 4 1 5\nf 4 5 8\n"
        );
        TriangleMesh::parse_obj(&text).unwrap()
    }

    #[test]
    fn parse_empty_fails() {
        assert!(TriangleMesh::parse_obj("").is_err());
        assert!(TriangleMesh::parse_obj("# nothing\n").is_err());
    }

    #[test]
    fn parse_bad_index_fails() {
        assert!(TriangleMesh::parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n").is_err());
    }

    #[test]
    fn cube_mass_properties() {
        let m = cube(1.0);
        assert_eq!(m.vertices.len(), 8);
        assert_eq!(m.triangles.len(), 12);
        assert_relative_eq!(m.surface_area(), 6.0, epsilon = 1e-12);
        let com = m.center_of_mass();
        assert_relative_eq!(com.coords.norm(), 0.0, epsilon = 1e-12);
        let e = m.extents();
        assert_relative_eq!(e.x, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn com_translates_with_mesh() {
        let mut m = cube(1.0);
        for v in &mut m.vertices {
            v.coords += Vector3::new(0.3, -0.2, 0.5);
        }
        let com = m.center_of_mass();
        assert_relative_eq!(com.x, 0.3, epsilon = 1e-12);
        assert_relative_eq!(com.y, -0.2, epsilon = 1e-12);
        assert_relative_eq!(com.z, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn normalize_unit_cube() {
        let m = cube(1.0).normalize_scale().unwrap();
        let e = m.extents();
        for k in 0..3 {
            assert_relative_eq!(e[k], 0.08, epsilon = 1e-12);
        }
    }

    #[test]
    fn normalize_oversized_box_downscales() {
        // 2 m cube: base step gives 0.16 m sides, then the smallest axis is
        // pulled back down to 0.08 m.
        let m = cube(2.0).normalize_scale().unwrap();
        let e = m.extents();
        for k in 0..3 {
            assert_relative_eq!(e[k], 0.08, epsilon = 1e-12);
        }
    }

    #[test]
    fn normalize_undersized_box_upscales() {
        // 0.5 m cube: base step gives 0.04 m sides, then the largest axis is
        // pushed back up to 0.07 m.
        let m = cube(0.5).normalize_scale().unwrap();
        let e = m.extents();
        for k in 0..3 {
            assert_relative_eq!(e[k], 0.07, epsilon = 1e-12);
        }
    }

    #[test]
    fn normalize_is_idempotent() {
        for side in [1.0, 2.0, 0.5, 0.92, 10.0] {
            let once = cube(side).normalize_scale().unwrap();
            let twice = once.normalize_scale().unwrap();
            let d = once.extents() - twice.extents();
            assert!(d.norm() < 1e-9, "side {side}: extents changed by {}", d.norm());
        }
    }

    #[test]
    fn fan_triangulation_of_quads() {
        let text = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
        let m = TriangleMesh::parse_obj(text).unwrap();
        assert_eq!(m.triangles.len(), 2);
        assert_relative_eq!(m.surface_area(), 1.0, epsilon = 1e-12);
    }
}
