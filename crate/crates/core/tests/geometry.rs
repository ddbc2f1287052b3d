mod common;

use common::{extreme_points, fan_area, pt};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shotlab::geometry::{convex_hull, cross, nearest_opponent, path_length, polygon_area, Point, Polygon};

fn sorted(mut v: Vec<Point>) -> Vec<Point> {
    v.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    v
}

#[test]
fn square_with_interior_point() {
    let hull = convex_hull(&[pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0), pt(0.5, 0.5)]).unwrap();
    assert_eq!(hull.len(), 4);
    assert!(!hull.vertices.contains(&pt(0.5, 0.5)));
    assert_eq!(polygon_area(&hull), 1.0);
}

#[test]
fn collinear_points_give_segment() {
    let hull = convex_hull(&[pt(0.0, 0.0), pt(1.0, 1.0), pt(2.0, 2.0)]).unwrap();
    assert_eq!(sorted(hull.vertices.clone()), vec![pt(0.0, 0.0), pt(2.0, 2.0)]);
    assert_eq!(polygon_area(&hull), 0.0);
}

#[test]
fn single_point_and_empty_input() {
    let hull = convex_hull(&[pt(3.0, 4.0)]).unwrap();
    assert_eq!(hull.vertices, vec![pt(3.0, 4.0)]);
    assert_eq!(polygon_area(&hull), 0.0);
    assert!(convex_hull(&[]).is_err());
}

#[test]
fn hull_matches_extreme_point_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let pts: Vec<Point> = (0..5).map(|_| pt(rng.random_range(0.0..94.0), rng.random_range(0.0..50.0))).collect();
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(sorted(hull.vertices.clone()), sorted(extreme_points(&pts)), "{pts:?}");
        assert!((polygon_area(&hull) - fan_area(&hull.vertices)).abs() < 1e-9);
    }
}

#[test]
fn hull_is_counter_clockwise_and_strictly_convex() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..300 {
        let n = rng.random_range(3..40);
        let pts: Vec<Point> = (0..n).map(|_| pt(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0))).collect();
        let v = convex_hull(&pts).unwrap().vertices;
        for i in 0..v.len() {
            let turn = cross(v[i], v[(i + 1) % v.len()], v[(i + 2) % v.len()]);
            assert!(turn > 1e-9, "non-left turn {turn} at {i}");
        }
    }
}

#[test]
fn random_convex_polygon_area() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let n = rng.random_range(3..30);
        let mut angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let r = rng.random_range(1.0..20.0);
        let (cx, cy) = (rng.random_range(0.0..94.0), rng.random_range(0.0..50.0));
        let vertices: Vec<Point> = angles.iter().map(|a| pt(cx + r * a.cos(), cy + r * a.sin())).collect();
        let poly = Polygon { vertices };
        assert!((polygon_area(&poly) - fan_area(&poly.vertices)).abs() < 1e-9);
    }
}

#[test]
fn path_length_examples() {
    assert_eq!(path_length(&[pt(0.0, 0.0)]), 0.0);
    assert_eq!(path_length(&[pt(0.0, 0.0), pt(3.0, 4.0)]), 5.0);
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut walk = vec![pt(0.0, 0.0)];
    let mut expected = 0.0;
    for _ in 0..200 {
        let (dx, dy): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        expected += dx.hypot(dy);
        let last = *walk.last().unwrap();
        walk.push(pt(last.x + dx, last.y + dy));
    }
    assert!((path_length(&walk) - expected).abs() < 1e-9);
}

#[test]
fn nearest_opponent_examples() {
    let opps = [pt(5.0, 0.0), pt(0.0, 4.0), pt(-3.0, 0.0), pt(0.0, -2.0), pt(1.0, 0.0)];
    assert_eq!(nearest_opponent(pt(0.0, 0.0), &opps), (4, 1.0));
    let tied = [pt(9.0, 0.0), pt(2.0, 0.0), pt(7.0, 0.0), pt(0.0, 2.0), pt(0.0, 8.0)];
    assert_eq!(nearest_opponent(pt(0.0, 0.0), &tied), (1, 2.0));
}

#[test]
fn nearest_opponent_matches_exhaustive_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..1000 {
        let t = pt(rng.random_range(0.0..94.0), rng.random_range(0.0..50.0));
        let opps: [Point; 5] = std::array::from_fn(|_| pt(rng.random_range(0.0..94.0), rng.random_range(0.0..50.0)));
        let mut best = (0, f64::INFINITY);
        for (i, o) in opps.iter().enumerate() {
            let d = ((o.x - t.x).powi(2) + (o.y - t.y).powi(2)).sqrt();
            if d < best.1 {
                best = (i, d);
            }
        }
        let (i, d) = nearest_opponent(t, &opps);
        assert_eq!(i, best.0);
        assert!((d - best.1).abs() < 1e-12);
    }
}

fn points() -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec((0.0..94.0f64, 0.0..50.0f64).prop_map(|(x, y)| pt(x, y)), 1..30)
}

proptest! {
    #[test]
    fn hull_is_idempotent(pts in points()) {
        let hull = convex_hull(&pts).unwrap();
        let again = convex_hull(&hull.vertices).unwrap();
        prop_assert_eq!(sorted(again.vertices), sorted(hull.vertices));
    }

    #[test]
    fn hull_contains_inputs(pts in points()) {
        let hull = convex_hull(&pts).unwrap();
        if hull.len() >= 3 {
            for p in &pts {
                for i in 0..hull.len() {
                    let e = cross(hull.vertices[i], hull.vertices[(i + 1) % hull.len()], *p);
                    prop_assert!(e >= -1e-9);
                }
            }
        }
    }

    #[test]
    fn area_is_translation_invariant(pts in points(), dx in -100.0..100.0f64, dy in -100.0..100.0f64) {
        let a = polygon_area(&convex_hull(&pts).unwrap());
        let moved: Vec<Point> = pts.iter().map(|p| p.translate(dx, dy)).collect();
        let b = polygon_area(&convex_hull(&moved).unwrap());
        prop_assert!((a - b).abs() < 1e-9 * a.max(1.0));
    }

    #[test]
    fn path_length_rigid_and_additive(pts in points(), theta in 0.0..6.3f64, split in 0usize..30) {
        let (s, c) = theta.sin_cos();
        let rotated: Vec<Point> = pts.iter().map(|p| pt(c * p.x - s * p.y + 3.0, s * p.x + c * p.y - 7.0)).collect();
        let whole = path_length(&pts);
        prop_assert!((whole - path_length(&rotated)).abs() < 1e-9 * whole.max(1.0));
        let k = split.min(pts.len() - 1);
        let parts = path_length(&pts[..=k]) + path_length(&pts[k..]);
        prop_assert!((whole - parts).abs() < 1e-9 * whole.max(1.0));
    }
}
