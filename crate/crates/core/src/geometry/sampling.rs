//! Deterministic point sampling: farthest-point subsets and area-weighted
//! surface samples with interpolated normals.

use nalgebra::{Point3, Vector3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::mesh::TriangleMesh;

/// Greedy farthest-point sampling starting from `start`. Returns `k` indices
/// into `points`; ties are broken toward the lower index so results do not
/// depend on iteration internals.
pub fn farthest_point_sample_from(points: &[Point3<f64>], k: usize, start: usize) -> Result<Vec<usize>> {
    if k == 0 || k > points.len() {
        return Err(Error::Grasp(format!(
            "farthest-point sample of {k} from {} points",
            points.len()
        )));
    }
    if start >= points.len() {
        return Err(Error::Grasp(format!("start index {start} out of range")));
    }
    let mut chosen = Vec::with_capacity(k);
    let mut best_d2 = vec![f64::INFINITY; points.len()];
    let mut current = start;
    chosen.push(current);
    while chosen.len() < k {
        let mut far_i = 0;
        let mut far_d = f64::NEG_INFINITY;
        for (i, p) in points.iter().enumerate() {
            let d2 = (p - points[current]).norm_squared();
            if d2 < best_d2[i] {
                best_d2[i] = d2;
            }
            if best_d2[i] > far_d {
                far_d = best_d2[i];
                far_i = i;
            }
        }
        chosen.push(far_i);
        current = far_i;
    }
    Ok(chosen)
}

/// Farthest-point sampling with a random start drawn from `rng`.
pub fn farthest_point_sample(points: &[Point3<f64>], k: usize, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    if points.is_empty() {
        return Err(Error::Grasp("farthest-point sample of empty set".into()));
    }
    let start = rng.random_range(0..points.len());
    farthest_point_sample_from(points, k, start)
}

/// Surface points with outward normals drawn uniformly by area.
#[derive(Debug, Clone)]
pub struct SurfaceSampleSet {
    pub points: Vec<Point3<f64>>,
    pub normals: Vec<Vector3<f64>>,
    pub triangles: Vec<usize>,
}

/// Area-weighted uniform surface sampling. Positions lie exactly on mesh
/// triangles; normals are the interpolated vertex normals, re-normalized.
pub fn surface_sample(mesh: &TriangleMesh, n: usize, rng: &mut ChaCha8Rng) -> Result<SurfaceSampleSet> {
    if n == 0 {
        return Err(Error::Mesh("surface sample of zero points".into()));
    }
    let mut cumulative = Vec::with_capacity(mesh.triangles.len());
    let mut total = 0.0;
    for i in 0..mesh.triangles.len() {
        let [a, b, c] = mesh.triangle(i);
        total += (b - a).cross(&(c - a)).norm() * 0.5;
        cumulative.push(total);
    }
    if total <= 0.0 {
        return Err(Error::Mesh("mesh has zero surface area".into()));
    }

    let mut points = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    let mut triangles = Vec::with_capacity(n);
    for _ in 0..n {
        let target = rng.random::<f64>() * total;
        let ti = cumulative.partition_point(|&c| c < target).min(mesh.triangles.len() - 1);
        let [ia, ib, ic] = mesh.triangles[ti];
        let (a, b, c) = (mesh.vertices[ia], mesh.vertices[ib], mesh.vertices[ic]);
        // square-root trick for uniform barycentric coordinates
        let r1: f64 = rng.random();
        let r2: f64 = rng.random();
        let s = r1.sqrt();
        let (u, v, w) = (1.0 - s, s * (1.0 - r2), s * r2);
        points.push(Point3::from(a.coords * u + b.coords * v + c.coords * w));
        let n_interp =
            mesh.normals[ia] * u + mesh.normals[ib] * v + mesh.normals[ic] * w;
        let len = n_interp.norm();
        normals.push(if len > 1e-12 {
            n_interp / len
        } else {
            let face = (b - a).cross(&(c - a));
            face / face.norm()
        });
        triangles.push(ti);
    }
    Ok(SurfaceSampleSet {
        points,
        normals,
        triangles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn fps_picks_extremes() {
        let pts = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(10.0, 0.0, 0.0),
        ];
        let picked = farthest_point_sample_from(&pts, 2, 0).unwrap();
        assert_eq!(picked, vec![0, 2]);
    }

    #[test]
    fn fps_k_equals_n_returns_all() {
        let pts = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 2.0, 0.0),
        ];
        let mut picked = farthest_point_sample_from(&pts, 3, 1).unwrap();
        picked.sort_unstable();
        assert_eq!(picked, vec![0, 1, 2]);
    }

    #[test]
    fn fps_rejects_bad_sizes() {
        let pts = vec![Point3::new(0.0, 0.0, 0.0)];
        assert!(farthest_point_sample_from(&pts, 0, 0).is_err());
        assert!(farthest_point_sample_from(&pts, 2, 0).is_err());
    }

    #[test]
    fn fps_deterministic_for_seed() {
        let pts: Vec<Point3<f64>> = (0..50)
            .map(|i| {
                let t = i as f64 * 0.37;
                Point3::new(t.sin(), (2.0 * t).cos(), t * 0.05)
            })
            .collect();
        let mut r1 = ChaCha8Rng::seed_from_u64(7);
        let mut r2 = ChaCha8Rng::seed_from_u64(7);
        let a = farthest_point_sample(&pts, 10, &mut r1).unwrap();
        let b = farthest_point_sample(&pts, 10, &mut r2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn surface_samples_lie_on_triangles() {
        let text = "v 0 0 0\nv 2 0 0\nv 0 2 0\nv 0 0 2\nf 1 2 3\nf 1 2 4\nf 1 3 4\nf 2 3 4\n";
        let mesh = TriangleMesh::parse_obj(text).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let set = surface_sample(&mesh, 200, &mut rng).unwrap();
        assert_eq!(set.points.len(), 200);
        for (p, &ti) in set.points.iter().zip(&set.triangles) {
            let [a, b, c] = mesh.triangle(ti);
            let q = crate::geometry::sdf::closest_point_on_triangle(p, &a, &b, &c);
            assert!((p - q).norm() < 1e-12, "sample off its triangle: {p:?}");
        }
        for n in &set.normals {
            assert!((n.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn surface_sampling_is_area_weighted() {
        // two parallel triangles, one with 9x the area of the other
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 5\nv 3 0 5\nv 0 3 5\nf 1 2 3\nf 4 5 6\n";
        let mesh = TriangleMesh::parse_obj(text).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let set = surface_sample(&mesh, 4000, &mut rng).unwrap();
        let big = set.triangles.iter().filter(|&&t| t == 1).count() as f64;
        let frac = big / 4000.0;
        assert!((frac - 0.9).abs() < 0.03, "big-triangle fraction {frac}");
    }
}
