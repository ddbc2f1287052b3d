//! Planar geometry used by feature extraction: convex hulls, shoelace areas,
//! path lengths and nearest-opponent search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cross products within this tolerance are treated as collinear.
pub const COLLINEAR_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn translate(self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }
}

/// Twice the signed area of triangle (o, a, b); positive when counter-clockwise.
pub fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Polygon {
    pub vertices: Vec<Point>,
}

impl Polygon {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// True if `p` lies inside or on a counter-clockwise convex polygon.
    pub fn contains(&self, p: Point) -> bool {
        match self.vertices.len() {
            0 => false,
            1 => self.vertices[0].dist(p) <= COLLINEAR_EPS,
            2 => {
                let (a, b) = (self.vertices[0], self.vertices[1]);
                let len = a.dist(b);
                cross(a, b, p).abs() <= COLLINEAR_EPS * len.max(1.0)
                    && (p.dist(a) + p.dist(b) - len).abs() <= 1e-7
            }
            n => (0..n).all(|i| {
                cross(self.vertices[i], self.vertices[(i + 1) % n], p) >= -COLLINEAR_EPS
            }),
        }
    }
}

/// Convex hull by Andrew's monotone chain.
///
/// Vertices come back counter-clockwise starting from the lowest-x (then
/// lowest-y) point, with collinear points dropped. Degenerate input yields a
/// single point or a two-point segment.
pub fn convex_hull(points: &[Point]) -> Result<Polygon> {
    if points.is_empty() {
        return Err(Error::Empty("convex hull of an empty point set".into()));
    }
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() <= 2 {
        return Ok(Polygon { vertices: pts });
    }

    let mut lower: Vec<Point> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= COLLINEAR_EPS {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= COLLINEAR_EPS {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    // all input collinear: lower and upper chains both reduce to the endpoints
    if lower.len() == 2 && lower[0] == lower[1] {
        lower.pop();
    }
    Ok(Polygon { vertices: lower })
}

/// Shoelace area; zero for points and segments.
pub fn polygon_area(poly: &Polygon) -> f64 {
    let v = &poly.vertices;
    if v.len() < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for i in 0..v.len() {
        let a = v[i];
        let b = v[(i + 1) % v.len()];
        twice += a.x * b.y - b.x * a.y;
    }
    (twice / 2.0).abs()
}

pub fn path_length(points: &[Point]) -> f64 {
    points.windows(2).map(|w| w[0].dist(w[1])).sum()
}

/// Index and distance of the opponent closest to `target`; ties go to the
/// lowest index.
pub fn nearest_opponent(target: Point, opponents: &[Point; 5]) -> (usize, f64) {
    let mut best = (0, target.dist(opponents[0]));
    for (i, &o) in opponents.iter().enumerate().skip(1) {
        let d = target.dist(o);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    /// A point is a hull vertex iff it is not inside or on the hull of the
    /// remaining points (checked triangle by triangle and segment by segment).
    pub(crate) fn brute_force_extreme_points(points: &[Point]) -> Vec<Point> {
        let mut uniq: Vec<Point> = Vec::new();
        for &p in points {
            if !uniq.contains(&p) {
                uniq.push(p);
            }
        }
        let in_triangle = |p: Point, a: Point, b: Point, c: Point| {
            let d1 = cross(a, b, p);
            let d2 = cross(b, c, p);
            let d3 = cross(c, a, p);
            let neg = d1 < -COLLINEAR_EPS || d2 < -COLLINEAR_EPS || d3 < -COLLINEAR_EPS;
            let pos = d1 > COLLINEAR_EPS || d2 > COLLINEAR_EPS || d3 > COLLINEAR_EPS;
            !(neg && pos)
        };
        let on_segment = |p: Point, a: Point, b: Point| {
            cross(a, b, p).abs() <= COLLINEAR_EPS
                && p.x >= a.x.min(b.x) - 1e-12
                && p.x <= a.x.max(b.x) + 1e-12
                && p.y >= a.y.min(b.y) - 1e-12
                && p.y <= a.y.max(b.y) + 1e-12
        };
        uniq.iter()
            .copied()
            .filter(|&p| {
                let others: Vec<Point> = uniq.iter().copied().filter(|&q| q != p).collect();
                let n = others.len();
                for i in 0..n {
                    for j in (i + 1)..n {
                        if on_segment(p, others[i], others[j]) {
                            return false;
                        }
                        for k in (j + 1)..n {
                            let (a, b, c) = (others[i], others[j], others[k]);
                            if cross(a, b, c).abs() > COLLINEAR_EPS && in_triangle(p, a, b, c) {
                                return false;
                            }
                        }
                    }
                }
                true
            })
            .collect()
    }

    /// Fan triangulation from the vertex centroid.
    pub(crate) fn triangulation_area(poly: &Polygon) -> f64 {
        let v = &poly.vertices;
        if v.len() < 3 {
            return 0.0;
        }
        let n = v.len() as f64;
        let c = Point::new(
            v.iter().map(|p| p.x).sum::<f64>() / n,
            v.iter().map(|p| p.y).sum::<f64>() / n,
        );
        (0..v.len())
            .map(|i| cross(c, v[i], v[(i + 1) % v.len()]).abs() / 2.0)
            .sum()
    }

    fn same_set(a: &[Point], b: &[Point]) -> bool {
        a.len() == b.len() && a.iter().all(|p| b.contains(p))
    }

    #[test]
    fn square_with_interior_point() {
        let hull = convex_hull(&pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.5, 0.5)])).unwrap();
        assert_eq!(hull.vertices, pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]));
        assert_eq!(polygon_area(&hull), 1.0);
    }

    #[test]
    fn collinear_points_give_segment() {
        let hull = convex_hull(&pts(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)])).unwrap();
        assert_eq!(hull.vertices, pts(&[(0.0, 0.0), (2.0, 2.0)]));
        assert_eq!(polygon_area(&hull), 0.0);
    }

    #[test]
    fn single_and_repeated_points() {
        let hull = convex_hull(&pts(&[(3.0, 4.0), (3.0, 4.0)])).unwrap();
        assert_eq!(hull.vertices, pts(&[(3.0, 4.0)]));
        assert!(convex_hull(&[]).is_err());
    }

    #[test]
    fn hull_matches_extreme_point_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let p: Vec<Point> = (0..5)
                .map(|_| Point::new(rng.random_range(0.0..94.0), rng.random_range(0.0..50.0)))
                .collect();
            let hull = convex_hull(&p).unwrap();
            assert!(same_set(&hull.vertices, &brute_force_extreme_points(&p)), "{p:?}");
            assert!((polygon_area(&hull) - triangulation_area(&hull)).abs() < 1e-9);
        }
    }

    #[test]
    fn path_length_cases() {
        assert_eq!(path_length(&pts(&[(0.0, 0.0)])), 0.0);
        assert_eq!(path_length(&pts(&[(0.0, 0.0), (3.0, 4.0)])), 5.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut walk = vec![Point::new(0.0, 0.0)];
        let mut oracle = 0.0;
        for _ in 0..200 {
            let (dx, dy): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            oracle += (dx * dx + dy * dy).sqrt();
            let last = *walk.last().unwrap();
            walk.push(last.translate(dx, dy));
        }
        assert!((path_length(&walk) - oracle).abs() < 1e-9);
    }

    #[test]
    fn nearest_opponent_cases() {
        let target = Point::new(0.0, 0.0);
        let opp = [5.0, 4.0, 3.0, 2.0, 1.0].map(|d| Point::new(d, 0.0));
        assert_eq!(nearest_opponent(target, &opp), (4, 1.0));
        let tied = [
            Point::new(5.0, 0.0),
            Point::new(0.0, 2.0),
            Point::new(9.0, 9.0),
            Point::new(2.0, 0.0),
            Point::new(7.0, 0.0),
        ];
        assert_eq!(nearest_opponent(target, &tied), (1, 2.0));

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let t = Point::new(rng.random_range(0.0..94.0), rng.random_range(0.0..50.0));
            let o: [Point; 5] =
                std::array::from_fn(|_| Point::new(rng.random_range(0.0..94.0), rng.random_range(0.0..50.0)));
            let dists: Vec<f64> = o.iter().map(|p| t.dist(*p)).collect();
            let min = dists.iter().cloned().fold(f64::INFINITY, f64::min);
            let idx = dists.iter().position(|&d| d == min).unwrap();
            assert_eq!(nearest_opponent(t, &o), (idx, min));
        }
    }

    fn point_strategy() -> impl Strategy<Value = Point> {
        (0.0..94.0f64, 0.0..50.0f64).prop_map(|(x, y)| Point::new(x, y))
    }

    proptest! {
        #[test]
        fn hull_contains_inputs_and_is_idempotent(p in prop::collection::vec(point_strategy(), 1..30)) {
            let hull = convex_hull(&p).unwrap();
            for q in &p {
                prop_assert!(hull.contains(*q));
            }
            let again = convex_hull(&hull.vertices).unwrap();
            prop_assert_eq!(&again, &hull);
            if hull.len() >= 3 {
                let n = hull.len();
                for i in 0..n {
                    prop_assert!(cross(hull.vertices[i], hull.vertices[(i + 1) % n], hull.vertices[(i + 2) % n]) > COLLINEAR_EPS);
                }
            }
        }

        #[test]
        fn area_translation_invariant(p in prop::collection::vec(point_strategy(), 3..12), dx in -40.0..40.0f64, dy in -20.0..20.0f64) {
            let hull = convex_hull(&p).unwrap();
            let moved = Polygon { vertices: hull.vertices.iter().map(|v| v.translate(dx, dy)).collect() };
            prop_assert!((polygon_area(&hull) - polygon_area(&moved)).abs() < 1e-9);
        }

        #[test]
        fn path_length_rigid_and_additive(p in prop::collection::vec(point_strategy(), 2..20), q in prop::collection::vec(point_strategy(), 1..20), angle in 0.0..std::f64::consts::TAU) {
            let (s, c) = angle.sin_cos();
            let rotated: Vec<Point> = p.iter().map(|v| Point::new(c * v.x - s * v.y + 3.0, s * v.x + c * v.y - 7.0)).collect();
            prop_assert!((path_length(&p) - path_length(&rotated)).abs() < 1e-9);
            let mut joined = p.clone();
            let mut tail = vec![*p.last().unwrap()];
            tail.extend(q.iter().copied());
            joined.extend(q.iter().copied());
            prop_assert!((path_length(&joined) - (path_length(&p) + path_length(&tail))).abs() < 1e-9);
        }
    }
}
