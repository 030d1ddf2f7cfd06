//! Minimum distance between polytopes: primal closest points plus the dual
//! multiplier certificate.

use nalgebra::{DMatrix, DVector, Vector2, Vector4};

use super::polytope::Polytope;
use super::GeometryError;
use crate::scalar::Real;

/// Closest points, distance, and dual certificate for a polytope pair.
///
/// At the optimum the duals satisfy
/// `lambda_obs A_obs + lambda_rob A_rob = 0`, `|lambda_obs A_obs| <= 1`,
/// `lambda >= 0`, and `-lambda_obs.b_obs - lambda_rob.b_rob = dist`.
#[derive(Debug, Clone)]
pub struct DistanceResult<T: Real> {
    pub dist: T,
    pub y_obs: Vector2<T>,
    pub y_rob: Vector2<T>,
    pub lambda_obs: Vec<T>,
    pub lambda_rob: Vec<T>,
}

impl<T: Real> DistanceResult<T> {
    /// Normal of the maximum-separation hyperplane, `lambda_obs A_obs`.
    pub fn separating_normal(&self, obs: &Polytope<T>) -> Vector2<T> {
        let mut w = Vector2::zeros();
        for (l, n) in self.lambda_obs.iter().zip(obs.normals()) {
            w += *n * *l;
        }
        w
    }
}

/// Dual objective `-lambda_obs . b_obs - lambda_rob . b_rob`.
///
/// For any dual-feasible pair this lower-bounds the minimum distance; at the
/// optimal duals it equals it.
pub fn dual_cost<T: Real>(lambda_obs: &[T], lambda_rob: &[T], b_obs: &[T], b_rob: &[T]) -> T {
    let mut v = T::zero();
    for (l, b) in lambda_obs.iter().zip(b_obs) {
        v -= *l * *b;
    }
    for (l, b) in lambda_rob.iter().zip(b_rob) {
        v -= *l * *b;
    }
    v
}

/// Euclidean minimum distance between two polytopes with primal points and
/// dual multipliers recovered jointly.
///
/// The closest-point pair is found by an active-set method on the convex QP
/// over both points; multipliers of the final working set are rescaled into
/// the unit-normalized dual certificate. Closest-point ties are broken toward
/// the lexicographically smallest `(y_obs, y_rob)`.
pub fn min_distance<T: Real>(
    obs: &Polytope<T>,
    rob: &Polytope<T>,
) -> Result<DistanceResult<T>, GeometryError> {
    let sol = closest_pair_qp(obs, rob)?;
    let y_obs0 = Vector2::new(sol.z[0], sol.z[1]);
    let y_rob0 = Vector2::new(sol.z[2], sol.z[3]);
    let e = y_obs0 - y_rob0;
    let dist = e.norm();

    let s_obs = obs.num_facets();
    let mut lambda_obs = vec![T::zero(); s_obs];
    let mut lambda_rob = vec![T::zero(); rob.num_facets()];
    if dist > T::c(1e-9) {
        // Stationarity of the squared objective gives A^T mu = -2 e; dividing
        // by 2*dist turns mu into duals of the unsquared distance.
        let scale = T::one() / (T::c(2.0) * dist);
        for (i, l) in lambda_obs.iter_mut().enumerate() {
            *l = sol.multipliers[i] * scale;
        }
        for (j, l) in lambda_rob.iter_mut().enumerate() {
            *l = sol.multipliers[s_obs + j] * scale;
        }
    }

    let (y_obs, y_rob) = lexicographic_pair(obs, rob, e).unwrap_or((y_obs0, y_rob0));

    let result = DistanceResult {
        dist,
        y_obs,
        y_rob,
        lambda_obs,
        lambda_rob,
    };
    certify(&result, obs, rob)?;
    Ok(result)
}

/// Validate the dual certificate; failure indicates a solver bug.
fn certify<T: Real>(
    r: &DistanceResult<T>,
    obs: &Polytope<T>,
    rob: &Polytope<T>,
) -> Result<(), GeometryError> {
    let tol = T::c(1e-6);
    let w_obs = r.separating_normal(obs);
    let mut w_rob = Vector2::zeros();
    for (l, n) in r.lambda_rob.iter().zip(rob.normals()) {
        w_rob += *n * *l;
    }
    if (w_obs + w_rob).norm() > tol {
        return Err(GeometryError::SolverFailure(
            "dual stationarity residual too large".into(),
        ));
    }
    if w_obs.norm() > T::one() + tol {
        return Err(GeometryError::SolverFailure(
            "dual norm constraint violated".into(),
        ));
    }
    let g = dual_cost(&r.lambda_obs, &r.lambda_rob, obs.offsets(), rob.offsets());
    if (g - r.dist).abs() > tol {
        return Err(GeometryError::SolverFailure(
            "strong duality residual too large".into(),
        ));
    }
    if (r.y_obs - r.y_rob).norm() > r.dist + tol || r.dist > (r.y_obs - r.y_rob).norm() + tol {
        return Err(GeometryError::SolverFailure(
            "closest points inconsistent with distance".into(),
        ));
    }
    Ok(())
}

struct QpSolution<T: Real> {
    z: Vector4<T>,
    multipliers: Vec<T>,
}

/// Active-set solve of `min |y_obs - y_rob|^2` over both polytopes.
///
/// The Hessian is only positive semidefinite, so every equality-constrained
/// subproblem is solved through an SVD pseudo-inverse (minimum-norm step).
/// Constraint drops follow Bland's rule to exclude cycling.
fn closest_pair_qp<T: Real>(
    obs: &Polytope<T>,
    rob: &Polytope<T>,
) -> Result<QpSolution<T>, GeometryError> {
    let s_obs = obs.num_facets();
    let m = s_obs + rob.num_facets();

    let mut rows: Vec<Vector4<T>> = Vec::with_capacity(m);
    let mut rhs: Vec<T> = Vec::with_capacity(m);
    for (n, &b) in obs.normals().iter().zip(obs.offsets()) {
        rows.push(Vector4::new(n.x, n.y, T::zero(), T::zero()));
        rhs.push(b);
    }
    for (n, &b) in rob.normals().iter().zip(rob.offsets()) {
        rows.push(Vector4::new(T::zero(), T::zero(), n.x, n.y));
        rhs.push(b);
    }

    let co = obs.centroid();
    let cr = rob.centroid();
    let mut z = Vector4::new(co.x, co.y, cr.x, cr.y);

    let mut working: Vec<usize> = Vec::new();
    let mut in_working = vec![false; m];
    let two = T::c(2.0);

    for _iter in 0..200 {
        let e = Vector2::new(z[0] - z[2], z[1] - z[3]);
        let g = Vector4::new(two * e.x, two * e.y, -two * e.x, -two * e.y);

        let k = working.len();
        let dim = 4 + k;
        let mut kkt = DMatrix::<T>::zeros(dim, dim);
        // 2H block for |y_obs - y_rob|^2.
        for i in 0..2 {
            kkt[(i, i)] = two;
            kkt[(i + 2, i + 2)] = two;
            kkt[(i, i + 2)] = -two;
            kkt[(i + 2, i)] = -two;
        }
        for (r, &ci) in working.iter().enumerate() {
            for c in 0..4 {
                kkt[(4 + r, c)] = rows[ci][c];
                kkt[(c, 4 + r)] = rows[ci][c];
            }
        }
        let mut rhs_v = DVector::<T>::zeros(dim);
        for c in 0..4 {
            rhs_v[c] = -g[c];
        }
        let svd = kkt.svd(true, true);
        let sol = svd
            .solve(&rhs_v, T::c(1e-10))
            .map_err(|e| GeometryError::SolverFailure(e.to_string()))?;
        let step = Vector4::new(sol[0], sol[1], sol[2], sol[3]);
        if std::env::var("QP_TRACE").is_ok() {
            eprintln!("iter {} z={:?} W={:?} |p|={:?}", _iter, z.as_slice(), working, step.norm().lossy());
        }

        if step.norm() <= T::c(1e-11) {
            let mus: Vec<T> = (0..k).map(|i| sol[4 + i]).collect();
            // Bland: drop the lowest-indexed constraint with a negative multiplier.
            let drop_pos = (0..k)
                .filter(|&i| mus[i] < -T::c(1e-9))
                .min_by_key(|&i| working[i]);
            if let Some(pos) = drop_pos {
                in_working[working[pos]] = false;
                working.remove(pos);
                continue;
            }
            let mut full = vec![T::zero(); m];
            for (i, &ci) in working.iter().enumerate() {
                full[ci] = mus[i].max(T::zero());
            }
            return Ok(QpSolution { z, multipliers: full });
        }

        // Longest feasible step along the subproblem direction.
        let mut alpha = T::one();
        let mut blocker: Option<usize> = None;
        for ci in 0..m {
            if in_working[ci] {
                continue;
            }
            let ap = rows[ci].dot(&step);
            if ap > T::c(1e-12) {
                let slack = rhs[ci] - rows[ci].dot(&z);
                let a = (slack / ap).max(T::zero());
                if a < alpha - T::c(1e-15) {
                    alpha = a;
                    blocker = Some(ci);
                }
            }
        }
        z += step * alpha;
        if let Some(ci) = blocker {
            working.push(ci);
            in_working[ci] = true;
        }
    }
    Err(GeometryError::SolverFailure(
        "active-set iteration limit reached".into(),
    ))
}

/// Lexicographically smallest optimal pair given the (unique) optimal
/// difference vector `e = y_obs - y_rob`.
///
/// The optimal obstacle-side points form the polytope
/// `{y : y in O, y - e in R}`; its lexicographic minimum is a vertex.
fn lexicographic_pair<T: Real>(
    obs: &Polytope<T>,
    rob: &Polytope<T>,
    e: Vector2<T>,
) -> Option<(Vector2<T>, Vector2<T>)> {
    let mut ns: Vec<Vector2<T>> = obs.normals().to_vec();
    let mut bs: Vec<T> = obs.offsets().to_vec();
    for (n, &b) in rob.normals().iter().zip(rob.offsets()) {
        ns.push(*n);
        bs.push(b + n.dot(&e));
    }
    let pts = super::polytope::feasible_intersections(&ns, &bs);
    let tie = T::c(1e-12);
    let best = pts.into_iter().reduce(|a, b| {
        if b.x < a.x - tie || ((b.x - a.x).abs() <= tie && b.y < a.y) {
            b
        } else {
            a
        }
    })?;
    Some((best, best - e))
}

/// Independent distance oracle: sampled hull boundaries plus a separating-axis
/// intersection test.
///
/// Over-approximates the true distance by at most the edge-subdivision
/// spacing; returns exactly 0 when the sets intersect.
pub fn brute_force_distance<T: Real>(p: &Polytope<T>, q: &Polytope<T>, resolution: usize) -> T {
    assert!(resolution >= 2, "resolution must be at least 2");

    // Separating-axis test over all facet normals of both polytopes.
    let mut separated = false;
    for axis in p.normals().iter().chain(q.normals()) {
        let (pmin, pmax) = project(p, *axis);
        let (qmin, qmax) = project(q, *axis);
        if pmax < qmin || qmax < pmin {
            separated = true;
            break;
        }
    }
    if !separated {
        return T::zero();
    }

    let pa = boundary_samples(p, resolution);
    let pb = boundary_samples(q, resolution);
    let mut best = T::infinity();
    for a in &pa {
        for b in &pb {
            best = best.min((a - b).norm());
        }
    }
    best
}

fn project<T: Real>(p: &Polytope<T>, axis: Vector2<T>) -> (T, T) {
    let mut lo = T::infinity();
    let mut hi = -T::infinity();
    for v in p.vertices() {
        let s = axis.dot(v);
        lo = lo.min(s);
        hi = hi.max(s);
    }
    (lo, hi)
}

fn boundary_samples<T: Real>(p: &Polytope<T>, resolution: usize) -> Vec<Vector2<T>> {
    let verts = p.vertices();
    let m = verts.len();
    if m == 1 {
        return vec![verts[0]];
    }
    let edges = if m == 2 { 1 } else { m };
    let mut out = Vec::with_capacity(edges * resolution);
    for k in 0..edges {
        let a = verts[k];
        let b = verts[(k + 1) % m];
        for i in 0..resolution {
            let t = T::from_usize(i).unwrap() / T::from_usize(resolution - 1).unwrap();
            out.push(a + (b - a) * t);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_util::random_pair;
    use nalgebra::Vector2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(x: f64, y: f64) -> Vector2<f64> {
        Vector2::new(x, y)
    }

    fn boxp(x0: f64, x1: f64, y0: f64, y1: f64) -> Polytope<f64> {
        Polytope::from_vertices(&[v(x0, y0), v(x1, y0), v(x1, y1), v(x0, y1)]).unwrap()
    }

    #[test]
    fn axis_aligned_gap() {
        let p = boxp(0.0, 1.0, 0.0, 1.0);
        let q = boxp(2.0, 3.0, 0.0, 1.0);
        let r = min_distance(&p, &q).unwrap();
        assert!((r.dist - 1.0).abs() < 1e-9);
        // lexicographic tie-break along the parallel edges
        assert!((r.y_obs - v(1.0, 0.0)).norm() < 1e-7);
        assert!((r.y_rob - v(2.0, 0.0)).norm() < 1e-7);
        assert!(((r.y_obs - r.y_rob).norm() - r.dist).abs() < 1e-9);
    }

    #[test]
    fn overlapping_squares() {
        let p = boxp(0.0, 1.0, 0.0, 1.0);
        let q = boxp(0.5, 1.5, 0.5, 1.5);
        let r = min_distance(&p, &q).unwrap();
        assert!(r.dist.abs() < 1e-9);
        assert!(r.lambda_obs.iter().all(|&l| l == 0.0));
        assert!(r.lambda_rob.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn corner_to_corner() {
        let p = boxp(0.0, 1.0, 0.0, 1.0);
        let q = boxp(2.0, 3.0, 2.0, 3.0);
        let r = min_distance(&p, &q).unwrap();
        assert!((r.dist - 2.0f64.sqrt()).abs() < 1e-9);
        assert!((r.y_obs - v(1.0, 1.0)).norm() < 1e-7);
        assert!((r.y_rob - v(2.0, 2.0)).norm() < 1e-7);
    }

    #[test]
    fn strong_duality_and_certificates_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let (p, q) = random_pair(&mut rng);
            let r = min_distance(&p, &q).unwrap();
            // strong duality
            let g = dual_cost(&r.lambda_obs, &r.lambda_rob, p.offsets(), q.offsets());
            assert!((g - r.dist).abs() < 1e-6, "duality gap {}", (g - r.dist).abs());
            // dual feasibility
            let w = r.separating_normal(&p);
            let mut wr = Vector2::zeros();
            for (l, n) in r.lambda_rob.iter().zip(q.normals()) {
                wr += *n * *l;
            }
            assert!((w + wr).norm() < 1e-6);
            assert!(w.norm() <= 1.0 + 1e-6);
            assert!(r.lambda_obs.iter().chain(&r.lambda_rob).all(|&l| l >= 0.0));
            // oracle agreement: sampled distance over-approximates by at most
            // the sample spacing
            let res = 200;
            let bf = brute_force_distance(&p, &q, res);
            let spacing = max_edge(&p).max(max_edge(&q)) / (res - 1) as f64;
            assert!(bf >= r.dist - 1e-7, "oracle below solver: {} < {}", bf, r.dist);
            assert!(
                bf <= r.dist + spacing + 1e-7,
                "oracle too far above solver: {} vs {} (spacing {})",
                bf,
                r.dist,
                spacing
            );
            // separation certificate
            if r.dist > 1e-6 {
                let c_obs = -dual_cost(&r.lambda_obs, &[], p.offsets(), &[]);
                let c_rob = dual_cost(&[], &r.lambda_rob, &[], q.offsets());
                for vtx in p.vertices() {
                    assert!(w.dot(vtx) <= c_obs + 1e-6);
                }
                for vtx in q.vertices() {
                    assert!(w.dot(vtx) >= c_rob - 1e-6);
                }
                assert!((c_rob - c_obs - r.dist).abs() < 1e-6);
            }
        }
    }

    fn max_edge(p: &Polytope<f64>) -> f64 {
        let vs = p.vertices();
        (0..vs.len())
            .map(|i| (vs[(i + 1) % vs.len()] - vs[i]).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn weak_duality_scaled_duals() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let (p, q) = random_pair(&mut rng);
            let r = min_distance(&p, &q).unwrap();
            for &s in &[0.0, 0.25, 0.5, 0.75, 1.0] {
                let lo: Vec<f64> = r.lambda_obs.iter().map(|&l| l * s).collect();
                let lr: Vec<f64> = r.lambda_rob.iter().map(|&l| l * s).collect();
                let g = dual_cost(&lo, &lr, p.offsets(), q.offsets());
                assert!(g <= r.dist + 1e-8, "weak duality violated: {} > {}", g, r.dist);
            }
        }
    }

    #[test]
    fn dual_cost_examples() {
        let p = boxp(0.0, 1.0, 0.0, 1.0);
        let q = boxp(2.0, 3.0, 0.0, 1.0);
        let r = min_distance(&p, &q).unwrap();
        let g = dual_cost(&r.lambda_obs, &r.lambda_rob, p.offsets(), q.offsets());
        assert!((g - 1.0).abs() < 1e-9);
        let zo = vec![0.0; p.num_facets()];
        let zr = vec![0.0; q.num_facets()];
        assert_eq!(dual_cost(&zo, &zr, p.offsets(), q.offsets()), 0.0);
    }

    #[test]
    fn symmetry_and_translation_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let (p, q) = random_pair(&mut rng);
            let a = min_distance(&p, &q).unwrap();
            let b = min_distance(&q, &p).unwrap();
            assert!((a.dist - b.dist).abs() < 1e-8);
            let delta = v(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let c = min_distance(&p.translated(delta), &q.translated(delta)).unwrap();
            assert!((a.dist - c.dist).abs() < 1e-8);
        }
    }

    #[test]
    fn brute_force_examples() {
        let p = boxp(0.0, 1.0, 0.0, 1.0);
        let q = boxp(2.0, 3.0, 0.0, 1.0);
        // parallel facing edges: sampled points align exactly
        assert!((brute_force_distance(&p, &q, 100) - 1.0).abs() < 1e-9);
        let o = boxp(0.5, 1.5, 0.5, 1.5);
        assert_eq!(brute_force_distance(&p, &o, 10), 0.0);
        let t = boxp(1.0, 2.0, 0.0, 1.0); // touching edge
        assert_eq!(brute_force_distance(&p, &t, 10), 0.0);
    }

    #[test]
    fn touching_polytopes_have_zero_distance() {
        let p = boxp(0.0, 1.0, 0.0, 1.0);
        let q = boxp(1.0, 2.0, 0.0, 1.0);
        let r = min_distance(&p, &q).unwrap();
        assert!(r.dist < 1e-7);
    }

    #[test]
    fn deterministic_results() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let (p, q) = random_pair(&mut rng);
        let a = min_distance(&p, &q).unwrap();
        let b = min_distance(&p, &q).unwrap();
        assert_eq!(a.dist, b.dist);
        assert_eq!(a.y_obs, b.y_obs);
        assert_eq!(a.y_rob, b.y_rob);
        assert_eq!(a.lambda_obs, b.lambda_obs);
    }

    #[test]
    fn f32_distance_smoke() {
        let p = Polytope::<f32>::from_vertices(&[
            Vector2::new(0.0f32, 0.0),
            Vector2::new(1.0, 0.0),
            Vector2::new(1.0, 1.0),
            Vector2::new(0.0, 1.0),
        ])
        .unwrap();
        let q = Polytope::<f32>::from_vertices(&[
            Vector2::new(2.0f32, 0.0),
            Vector2::new(3.0, 0.0),
            Vector2::new(3.0, 1.0),
            Vector2::new(2.0, 1.0),
        ])
        .unwrap();
        let r = min_distance(&p, &q).unwrap();
        assert!((r.dist - 1.0).abs() < 1e-4);
    }
}
