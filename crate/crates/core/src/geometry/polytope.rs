//! Halfspace polytopes, hulls, and rigid-body placement.

use nalgebra::{Matrix2, Vector2};

use super::GeometryError;
use crate::scalar::Real;

/// Slack used by construction-time feasibility checks.
const FEAS_SLACK: f64 = 1e-9;

/// Cross product `(a - o) x (b - o)`.
fn cross<T: Real>(o: Vector2<T>, a: Vector2<T>, b: Vector2<T>) -> T {
    let u = a - o;
    let v = b - o;
    u.x * v.y - u.y * v.x
}

/// Convex hull of a point set via monotone chain; counter-clockwise order,
/// duplicates and collinear interior points removed.
pub fn convex_hull<T: Real>(points: &[Vector2<T>]) -> Vec<Vector2<T>> {
    let mut pts: Vec<Vector2<T>> = points.to_vec();
    pts.sort_by(|a, b| {
        a.x.partial_cmp(&b.x)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.y.partial_cmp(&b.y).unwrap_or(std::cmp::Ordering::Equal))
    });
    pts.dedup_by(|a, b| (*a - *b).norm() < T::c(1e-12));
    if pts.len() < 3 {
        return pts;
    }
    let turn_eps = T::c(1e-12);
    let mut lower: Vec<Vector2<T>> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= turn_eps {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Vector2<T>> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= turn_eps {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Rigid pose of a body in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose<T: Real> {
    pub position: Vector2<T>,
    pub heading: T,
}

impl<T: Real> Pose<T> {
    pub fn new(x: T, y: T, heading: T) -> Self {
        Self {
            position: Vector2::new(x, y),
            heading,
        }
    }

    pub fn rotation(&self) -> Matrix2<T> {
        let (s, c) = (self.heading.sin(), self.heading.cos());
        Matrix2::new(c, -s, s, c)
    }
}

/// Bounded non-empty convex polytope `{y : A y <= b}` with unit row normals.
///
/// The counter-clockwise vertex list is computed once at construction and
/// kept alongside the halfspaces; placement transforms both consistently.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope<T: Real> {
    normals: Vec<Vector2<T>>,
    offsets: Vec<T>,
    vertices: Vec<Vector2<T>>,
}

impl<T: Real> Polytope<T> {
    /// Halfspace form of the convex hull of `vertices`.
    ///
    /// Fails with [`GeometryError::DegenerateInput`] when the hull is
    /// lower-dimensional (fewer than 3 distinct non-collinear points).
    pub fn from_vertices(vertices: &[Vector2<T>]) -> Result<Self, GeometryError> {
        if vertices
            .iter()
            .any(|v| !v.x.is_finite_scalar() || !v.y.is_finite_scalar())
        {
            return Err(GeometryError::DegenerateInput);
        }
        let hull = convex_hull(vertices);
        if hull.len() < 3 {
            return Err(GeometryError::DegenerateInput);
        }
        let mut normals = Vec::with_capacity(hull.len());
        let mut offsets = Vec::with_capacity(hull.len());
        for k in 0..hull.len() {
            let p = hull[k];
            let q = hull[(k + 1) % hull.len()];
            let d = q - p;
            // CCW polygon: outward normal is the edge direction rotated -90 deg.
            let n = Vector2::new(d.y, -d.x);
            let len = n.norm();
            if len < T::c(1e-12) {
                return Err(GeometryError::DegenerateInput);
            }
            let n = n / len;
            normals.push(n);
            offsets.push(n.dot(&p));
        }
        Ok(Self {
            normals,
            offsets,
            vertices: hull,
        })
    }

    /// Validate and build from raw halfspaces `A y <= b`.
    ///
    /// Rows are normalized to unit length. Boundedness is decided exactly from
    /// the angular span of the normals; non-emptiness by feasibility of the
    /// pairwise boundary intersections at `1e-9` slack.
    pub fn from_halfspaces(normals: &[Vector2<T>], offsets: &[T]) -> Result<Self, GeometryError> {
        assert_eq!(normals.len(), offsets.len(), "rows of A and b must match");
        let mut ns = Vec::with_capacity(normals.len());
        let mut bs = Vec::with_capacity(offsets.len());
        for (i, (n, &b)) in normals.iter().zip(offsets.iter()).enumerate() {
            let len = n.norm();
            if len < T::c(1e-12) || !len.is_finite_scalar() {
                return Err(GeometryError::ZeroNormal(i));
            }
            ns.push(*n / len);
            bs.push(b / len);
        }

        // Bounded iff the unit normals leave no angular gap of pi or more:
        // a gap >= pi admits a recession direction d with A d <= 0.
        if ns.len() < 3 {
            return Err(GeometryError::Unbounded);
        }
        let mut angles: Vec<f64> = ns.iter().map(|n| n.y.lossy().atan2(n.x.lossy())).collect();
        angles.sort_by(f64::total_cmp);
        let mut max_gap: f64 = 0.0;
        for i in 0..angles.len() {
            let next = if i + 1 == angles.len() {
                angles[0] + std::f64::consts::TAU
            } else {
                angles[i + 1]
            };
            max_gap = max_gap.max(next - angles[i]);
        }
        if max_gap >= std::f64::consts::PI - 1e-12 {
            return Err(GeometryError::Unbounded);
        }

        let pts = feasible_intersections(&ns, &bs);
        if pts.is_empty() {
            return Err(GeometryError::Empty);
        }
        let mut vertices = convex_hull(&pts);
        if vertices.is_empty() {
            vertices = pts;
        }
        Ok(Self {
            normals: ns,
            offsets: bs,
            vertices,
        })
    }

    pub fn num_facets(&self) -> usize {
        self.normals.len()
    }

    /// Unit outward normals (rows of `A`).
    pub fn normals(&self) -> &[Vector2<T>] {
        &self.normals
    }

    /// Right-hand sides `b`.
    pub fn offsets(&self) -> &[T] {
        &self.offsets
    }

    /// Counter-clockwise hull vertices.
    pub fn vertices(&self) -> &[Vector2<T>] {
        &self.vertices
    }

    pub fn contains(&self, p: Vector2<T>, tol: T) -> bool {
        self.normals
            .iter()
            .zip(&self.offsets)
            .all(|(n, &b)| n.dot(&p) <= b + tol)
    }

    /// Arithmetic mean of the vertices; strictly interior for full-dimensional sets.
    pub fn centroid(&self) -> Vector2<T> {
        let mut c = Vector2::zeros();
        for v in &self.vertices {
            c += v;
        }
        c / T::from_usize(self.vertices.len().max(1)).unwrap()
    }

    /// Largest vertex norm; the reach of the set from the frame origin.
    pub fn circumradius(&self) -> T {
        self.vertices
            .iter()
            .map(|v| v.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Euclidean distance from a point to the set (0 inside).
    pub fn distance_to_point(&self, q: Vector2<T>) -> T {
        if self.contains(q, T::zero()) {
            return T::zero();
        }
        let m = self.vertices.len();
        if m == 1 {
            return (q - self.vertices[0]).norm();
        }
        let mut best = T::infinity();
        for k in 0..m {
            let a = self.vertices[k];
            let b = self.vertices[(k + 1) % m];
            best = best.min(point_segment_distance(q, a, b));
            if m == 2 {
                break;
            }
        }
        best
    }

    /// Support value `max_{y in P} d . y`.
    pub fn support(&self, d: Vector2<T>) -> T {
        self.vertices
            .iter()
            .map(|v| d.dot(v))
            .fold(T::c(f64::NEG_INFINITY), |a, b| a.max(b))
    }

    /// The set rigidly moved by `pose`: rotate by the heading, then translate.
    ///
    /// `A' = A R^T`, `b' = b + A R^T p`; a world point `q` is inside the moved
    /// set iff `R^T (q - p)` is inside this one.
    pub fn placed(&self, pose: &Pose<T>) -> Polytope<T> {
        let rot = pose.rotation();
        let p = pose.position;
        let normals: Vec<Vector2<T>> = self.normals.iter().map(|n| rot * n).collect();
        let offsets: Vec<T> = normals
            .iter()
            .zip(&self.offsets)
            .map(|(n, &b)| b + n.dot(&p))
            .collect();
        let vertices = self.vertices.iter().map(|v| rot * v + p).collect();
        Polytope {
            normals,
            offsets,
            vertices,
        }
    }

    /// Pure translation.
    pub fn translated(&self, delta: Vector2<T>) -> Polytope<T> {
        self.placed(&Pose {
            position: delta,
            heading: T::zero(),
        })
    }
}

fn point_segment_distance<T: Real>(q: Vector2<T>, a: Vector2<T>, b: Vector2<T>) -> T {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 < T::c(1e-24) {
        return (q - a).norm();
    }
    let t = ((q - a).dot(&ab) / len2).clamp(T::zero(), T::one());
    (q - (a + ab * t)).norm()
}

/// All pairwise boundary intersections satisfying every halfspace at slack.
pub(super) fn feasible_intersections<T: Real>(ns: &[Vector2<T>], bs: &[T]) -> Vec<Vector2<T>> {
    let slack = T::c(FEAS_SLACK);
    let mut pts: Vec<Vector2<T>> = Vec::new();
    for i in 0..ns.len() {
        for j in (i + 1)..ns.len() {
            let det = ns[i].x * ns[j].y - ns[i].y * ns[j].x;
            if det.abs() < T::c(1e-12) {
                continue;
            }
            let x = (bs[i] * ns[j].y - bs[j] * ns[i].y) / det;
            let y = (ns[i].x * bs[j] - ns[j].x * bs[i]) / det;
            let p = Vector2::new(x, y);
            if ns
                .iter()
                .zip(bs)
                .all(|(n, &b)| n.dot(&p) <= b + slack)
                && !pts.iter().any(|q| (*q - p).norm() < T::c(1e-9))
            {
                pts.push(p);
            }
        }
    }
    pts
}

/// Robot geometry as a union of convex body-frame pieces.
///
/// Coordinates are relative to the kinematic reference point (rear axle), so
/// a piece need not contain the origin. Pieces may overlap; the union can
/// represent non-convex shapes such as an L.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotBody<T: Real> {
    pieces: Vec<Polytope<T>>,
}

impl<T: Real> RobotBody<T> {
    pub fn new(pieces: Vec<Polytope<T>>) -> Result<Self, GeometryError> {
        if pieces.is_empty() {
            return Err(GeometryError::EmptyBody);
        }
        Ok(Self { pieces })
    }

    pub fn pieces(&self) -> &[Polytope<T>] {
        &self.pieces
    }

    pub fn num_pieces(&self) -> usize {
        self.pieces.len()
    }

    /// World-frame polytope of one piece at the given pose.
    pub fn place(&self, piece_index: usize, pose: &Pose<T>) -> Result<Polytope<T>, GeometryError> {
        self.pieces
            .get(piece_index)
            .map(|p| p.placed(pose))
            .ok_or(GeometryError::InvalidPieceIndex {
                index: piece_index,
                count: self.pieces.len(),
            })
    }

    /// Largest circumradius over the pieces.
    pub fn circumradius(&self) -> T {
        self.pieces
            .iter()
            .map(|p| p.circumradius())
            .fold(T::zero(), |a, b| a.max(b))
    }
}
