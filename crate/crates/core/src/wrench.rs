//! Contact wrenches, friction cone discretization, and closure certificates.
//!
//! A contact exerting unit force `f` at position `r` relative to the center
//! of mass contributes the wrench `[f; sqrt(w_tau) * (f x r)]`. Friction
//! cones are discretized as four-sided pyramids. A grasp achieves closure
//! exactly when its wrench columns positively span R^6, certified by rank
//! plus a strict-interior linear program.

use nalgebra::{DMatrix, DVector, Point3, Unit, Vector3, Vector6};

use crate::linprog::{solve_lp, LpStatus};

/// Default friction coefficient.
pub const DEFAULT_FRICTION: f64 = 0.2;
/// Default torque weight applied to the rotational wrench rows (as a
/// variance-style weight; rows are scaled by its square root).
pub const DEFAULT_TORQUE_WEIGHT: f64 = 5.0;
/// Number of pyramid edges per friction cone.
pub const CONE_EDGES: usize = 4;
/// Strict-positivity margin for the spanning certificate.
pub const SPAN_MARGIN: f64 = 1e-8;
/// Relative singular value cutoff for the rank-6 test.
pub const RANK_TOL: f64 = 1e-8;

/// A world-frame contact: position on (or near) the object surface and the
/// outward-pointing unit normal of the object at that position.
#[derive(Debug, Clone, Copy)]
pub struct ContactPoint {
    pub position: Point3<f64>,
    pub normal: Vector3<f64>,
}

/// Deterministic tangent basis: Gram-Schmidt against the world axis with the
/// smallest normal component (ties toward lower index), then the cross
/// product. Returns an orthonormal right-handed frame `(t1, t2)` with
/// `t1 x t2 = n`.
pub fn tangent_basis(n: &Unit<Vector3<f64>>) -> (Vector3<f64>, Vector3<f64>) {
    let a = n.iter().map(|c| c.abs()).enumerate().fold(
        (0usize, f64::INFINITY),
        |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
    );
    let mut seed = Vector3::zeros();
    seed[a.0] = 1.0;
    let t1 = (seed - n.as_ref() * n.dot(&seed)).normalize();
    let t2 = n.cross(&t1);
    (t1, t2)
}

/// Unit force directions of the discretized friction cone at `n`. One edge
/// (the normal itself) when frictionless, four pyramid edges otherwise.
pub fn friction_cone_edges(n: &Unit<Vector3<f64>>, mu: f64) -> Vec<Vector3<f64>> {
    assert!(mu >= 0.0, "negative friction coefficient");
    if mu == 0.0 {
        return vec![n.into_inner()];
    }
    let (t1, t2) = tangent_basis(n);
    (0..CONE_EDGES)
        .map(|j| {
            let phi = std::f64::consts::FRAC_PI_2 * j as f64;
            (n.as_ref() + (t1 * phi.cos() + t2 * phi.sin()) * mu).normalize()
        })
        .collect()
}

/// Wrench of a unit force `f` applied at `r` (contact position minus center
/// of mass). Torque rows carry the square root of the torque weight so that
/// `||w||^2` weights torques by `torque_weight`.
pub fn contact_wrench(f: &Vector3<f64>, r: &Vector3<f64>, torque_weight: f64) -> Vector6<f64> {
    let tau = f.cross(r) * torque_weight.sqrt();
    Vector6::new(f.x, f.y, f.z, tau.x, tau.y, tau.z)
}

/// Stacks cone-edge wrenches of every contact into a 6 x (edges * contacts)
/// matrix. Column order: contact-major, edge-minor.
pub fn wrench_matrix(
    contacts: &[ContactPoint],
    com: &Point3<f64>,
    mu: f64,
    torque_weight: f64,
) -> DMatrix<f64> {
    let edges_per = if mu == 0.0 { 1 } else { CONE_EDGES };
    let mut w = DMatrix::zeros(6, edges_per * contacts.len());
    for (ci, contact) in contacts.iter().enumerate() {
        let n = Unit::new_normalize(contact.normal);
        let r = contact.position - com;
        for (ei, edge) in friction_cone_edges(&n, mu).into_iter().enumerate() {
            w.set_column(ci * edges_per + ei, &contact_wrench(&edge, &r, torque_weight));
        }
    }
    w
}

/// All six singular values of `w`, descending, zero-padded when the matrix
/// has fewer than six columns.
pub fn singular_values_padded(w: &DMatrix<f64>) -> [f64; 6] {
    let mut sv: Vec<f64> = w.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut out = [0.0; 6];
    for (i, v) in sv.into_iter().take(6).enumerate() {
        out[i] = v;
    }
    out
}

/// True when the columns of `w` positively span R^6: rank 6 and a strictly
/// positive combination summing to zero. The margin LP maximizes `s` over
/// `W (beta + s 1) = 0`, `sum(beta) + n s = n`, `beta, s >= 0`; positive
/// spanning is certified by `s > 1e-8`.
pub fn positively_spans(w: &DMatrix<f64>) -> bool {
    let n = w.ncols();
    if n < 7 {
        // a positive spanning set of R^6 needs at least 7 vectors
        return false;
    }
    let sv = singular_values_padded(w);
    if sv[5] <= RANK_TOL * sv[0].max(1e-300) {
        return false;
    }
    let w_sum = w * DVector::from_element(n, 1.0);
    let mut a = DMatrix::zeros(7, n + 1);
    for i in 0..6 {
        for j in 0..n {
            a[(i, j)] = w[(i, j)];
        }
        a[(i, n)] = w_sum[i];
    }
    for j in 0..n {
        a[(6, j)] = 1.0;
    }
    a[(6, n)] = n as f64;
    let mut b = DVector::zeros(7);
    b[6] = n as f64;
    let mut c = DVector::zeros(n + 1);
    c[n] = -1.0;
    let sol = solve_lp(&a, &b, &c);
    sol.status == LpStatus::Optimal && -sol.objective > SPAN_MARGIN
}
