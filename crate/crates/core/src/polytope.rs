//! Convex polygons in the plane: projection, hulls and vertex tangent cones.

use thiserror::Error;

pub type Point = [f64; 2];

/// Tolerance for collinearity and membership tests.
const GEOM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolytopeError {
    #[error("polygon needs at least one vertex")]
    Empty,
    #[error("all vertices coincide")]
    Degenerate,
    #[error("vertex {0} is not a strictly convex counterclockwise corner")]
    NotConvex(usize),
    #[error("non-finite vertex coordinate")]
    NonFinite,
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn norm2(a: Point) -> f64 {
    dot(a, a)
}

/// Nearest point of segment `[a, b]` to `p`.
fn project_segment(a: Point, b: Point, p: Point) -> Point {
    let d = sub(b, a);
    let len2 = norm2(d);
    if len2 == 0.0 {
        return a;
    }
    let s = (dot(sub(p, a), d) / len2).clamp(0.0, 1.0);
    [a[0] + s * d[0], a[1] + s * d[1]]
}

/// A bounded convex polygon given by its vertices in counterclockwise order.
/// Two vertices make a segment; a single vertex is a degenerate point.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope2D {
    vertices: Vec<Point>,
    diameter: f64,
}

impl Polytope2D {
    pub fn new(vertices: Vec<Point>) -> Result<Self, PolytopeError> {
        if vertices.is_empty() {
            return Err(PolytopeError::Empty);
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(PolytopeError::NonFinite);
        }
        let m = vertices.len();
        if m > 1 && vertices.iter().all(|v| *v == vertices[0]) {
            return Err(PolytopeError::Degenerate);
        }
        if m == 2 && vertices[0] == vertices[1] {
            return Err(PolytopeError::Degenerate);
        }
        if m >= 3 {
            for i in 0..m {
                let (a, b, c) = (vertices[i], vertices[(i + 1) % m], vertices[(i + 2) % m]);
                if cross(sub(b, a), sub(c, b)) <= GEOM_TOL {
                    return Err(PolytopeError::NotConvex((i + 1) % m));
                }
            }
        }
        let diameter = vertices
            .iter()
            .flat_map(|a| vertices.iter().map(move |b| norm2(sub(*a, *b))))
            .fold(0.0, f64::max)
            .sqrt();
        Ok(Self { vertices, diameter })
    }

    /// Convex hull of a point set (monotone chain); collinear points give a segment.
    pub fn hull(points: &[Point]) -> Result<Self, PolytopeError> {
        if points.is_empty() {
            return Err(PolytopeError::Empty);
        }
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|a, b| (a[0] - b[0]).abs() <= GEOM_TOL && (a[1] - b[1]).abs() <= GEOM_TOL);
        if pts.len() <= 2 {
            return Self::new(pts);
        }
        let turn = |h: &[Point], p: Point| {
            let k = h.len();
            cross(sub(h[k - 1], h[k - 2]), sub(p, h[k - 1]))
        };
        let mut lower: Vec<Point> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2 && turn(&lower, p) <= GEOM_TOL {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<Point> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && turn(&upper, p) <= GEOM_TOL {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Self::new(lower)
    }

    pub fn point(p: Point) -> Self {
        Self::new(vec![p]).expect("finite point")
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Vertex count `m`.
    pub fn m(&self) -> usize {
        self.vertices.len()
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Euclidean projection and squared distance.
    pub fn project(&self, p: Point) -> (Point, f64) {
        let v = &self.vertices;
        let nearest = match v.len() {
            1 => v[0],
            2 => project_segment(v[0], v[1], p),
            m => {
                let inside = (0..m).all(|i| cross(sub(v[(i + 1) % m], v[i]), sub(p, v[i])) >= 0.0);
                if inside {
                    p
                } else {
                    (0..m)
                        .map(|i| project_segment(v[i], v[(i + 1) % m], p))
                        .min_by(|a, b| norm2(sub(p, *a)).partial_cmp(&norm2(sub(p, *b))).unwrap())
                        .unwrap()
                }
            }
        };
        (nearest, norm2(sub(p, nearest)))
    }

    pub fn dist2(&self, p: Point) -> f64 {
        self.project(p).1
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        self.dist2(p) <= tol * tol
    }

    /// Same vertex set within `tol` (order ignored).
    pub fn same_vertices(&self, other: &Self, tol: f64) -> bool {
        let near = |a: Point, b: Point| norm2(sub(a, b)) <= tol * tol;
        self.m() == other.m()
            && self
                .vertices
                .iter()
                .all(|a| other.vertices.iter().any(|b| near(*a, *b)))
    }

    /// Translated tangent cone `T_v − v` at vertex `i`.
    pub fn vertex_cone(&self, i: usize) -> VertexCone {
        let v = &self.vertices;
        let m = v.len();
        let generators = match m {
            1 => vec![],
            2 => vec![sub(v[1 - i], v[i])],
            _ => vec![sub(v[(i + 1) % m], v[i]), sub(v[(i + m - 1) % m], v[i])],
        };
        VertexCone { generators }
    }
}

/// Closed convex cone generated by at most two directions (pointed, angle < π).
#[derive(Debug, Clone, PartialEq)]
pub struct VertexCone {
    generators: Vec<Point>,
}

impl VertexCone {
    pub fn generators(&self) -> &[Point] {
        &self.generators
    }

    /// Nearest point of the cone to `x`.
    pub fn project(&self, x: Point) -> Point {
        let ray = |d: Point| {
            let s = (dot(x, d) / norm2(d)).max(0.0);
            [s * d[0], s * d[1]]
        };
        match self.generators.as_slice() {
            [] => [0.0, 0.0],
            [d] => ray(*d),
            [d1, d2] => {
                // orient so that d1 → d2 is a counterclockwise turn
                let (a, b) = if cross(*d1, *d2) >= 0.0 {
                    (*d1, *d2)
                } else {
                    (*d2, *d1)
                };
                if cross(a, x) >= 0.0 && cross(x, b) >= 0.0 {
                    x
                } else {
                    let (p, q) = (ray(a), ray(b));
                    if norm2(sub(x, p)) <= norm2(sub(x, q)) {
                        p
                    } else {
                        q
                    }
                }
            }
            _ => unreachable!("vertex cones have at most two generators"),
        }
    }

    /// `d²(x, cone)`.
    pub fn dist2(&self, x: Point) -> f64 {
        norm2(sub(x, self.project(x)))
    }

    /// `∇ d²(x, cone) = 2(x − x₀)` with `x₀` the projection.
    pub fn grad_dist2(&self, x: Point) -> Point {
        let p = self.project(x);
        [2.0 * (x[0] - p[0]), 2.0 * (x[1] - p[1])]
    }
}

/// Free-function form of [`Polytope2D::project`].
pub fn project_polygon(poly: &Polytope2D, p: Point) -> (Point, f64) {
    poly.project(p)
}
