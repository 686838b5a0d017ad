use delaunay_gibbs::geometry::{delaunay, Rect, TorusTriangulation};
use delaunay_gibbs::hamiltonian::h_periodic;
use delaunay_gibbs::interaction::{constant, phi1, truncate};
use delaunay_gibbs::oracles::{
    brute_force_z, lambda2_area, naive_delaunay, snap, verify_euler, verify_frontiere, verify_local_bound,
    verify_ordre, verify_torus_euler, verify_vacuum_bound, OracleError,
};
use delaunay_gibbs::sampler::{sample_poisson, uniform_in};
use delaunay_gibbs::snapshot::{Domain, Snapshot};
use delaunay_gibbs::{Configuration, Point2, Window};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn lattice_points() -> impl Strategy<Value = Vec<Point2>> {
    prop::collection::vec((0i64..1 << 22, 0i64..1 << 22), 3..40).prop_map(|v| {
        v.into_iter().map(|(i, j)| Point2::new(i as f64 / (1 << 20) as f64, j as f64 / (1 << 20) as f64)).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_agrees_with_naive(pts in lattice_points()) {
        let nd = naive_delaunay(&pts).unwrap();
        prop_assume!(!nd.cocircular);
        let t = delaunay(&pts, None);
        let mut keys: Vec<_> = t.tiles().iter().map(|t| { let mut k = t.vertices.map(|p| p.key()); k.sort(); k }).collect();
        keys.sort();
        prop_assert_eq!(keys, nd.keys());
        if !nd.triangles.is_empty() {
            prop_assert!(verify_euler(&t));
        }
    }

    #[test]
    fn torus_has_two_tiles_per_point(seed in 0u64..1000, n in 3usize..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = Rect::new(0.0, 0.0, 4.0, 4.0);
        let pts: Vec<Point2> = (0..n).map(|_| uniform_in(&r, &mut rng)).collect();
        if let Ok(t) = TorusTriangulation::new(&pts, [0.0, 0.0], 4.0) {
            prop_assert!(verify_torus_euler(&t));
        }
    }

    #[test]
    fn snapshot_round_trip(pts in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3, prop::option::of(1u8..5)), 0..30)) {
        let s = Snapshot {
            domain: Domain::Window(Rect::new(-1e3, -1e3, 1e3, 1e3)),
            points: pts.into_iter().map(|(x, y, m)| Point2 { x, y, mark: m }).collect(),
        };
        prop_assert_eq!(Snapshot::parse(&s.render(None)).unwrap(), s);
    }
}

#[test]
fn euler_counts_for_small_sets() {
    let three = delaunay(&[Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)], None);
    assert_eq!(three.tile_count(), 1);
    assert!(verify_euler(&three));
    let square =
        delaunay(&[Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0), Point2::new(0.0, 1.0)], None);
    assert_eq!((square.tile_count(), square.hull_vertex_count()), (2, 4));
    assert!(verify_euler(&square));
}

#[test]
fn ordre_at_centre_of_a_huge_empty_disc() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let origin = Point2::new(0.0, 0.0);
    let far: Vec<Point2> =
        sample_poisson(1.0, &Rect::centered_square(40.0), &mut rng).into_iter().filter(|p| p.dist(&origin) > 25.0).collect();
    let mut ring: Vec<Point2> = (0..40)
        .map(|i| {
            let a = i as f64 * std::f64::consts::TAU / 40.0 + 0.01 * rand::Rng::gen::<f64>(&mut rng);
            Point2::new(20.0 * a.cos(), 20.0 * a.sin())
        })
        .collect();
    ring.extend(far);
    let mut t = delaunay(&ring, None);
    let d = t.insert_cavity(Point2::new(1e-3, -2e-3)).unwrap();
    let r = verify_ordre(&d);
    assert!(r.destroyed >= 30, "{r:?}");
    assert!(r.deficit <= 4, "{r:?}");
}

#[test]
fn frontiere_trivial_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let region = Rect::centered_square(3.0);
    let omega: Vec<Point2> = sample_poisson(1.0, &region, &mut rng).into_iter().map(snap).collect();
    let delta = Rect::new(-1.25, -0.75, 1.5, 2.0);
    assert!(verify_frontiere(&delta, &[], &omega).unwrap());
    assert!(verify_frontiere(&delta, &omega, &omega).unwrap());
}

#[test]
fn local_bound_constant_tail_and_precondition() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let k = 3;
    let data = Window::new(k).rect().expand(14.0);
    let x = Point2::new(0.3, -0.4);
    let pts: Vec<Point2> =
        sample_poisson(1.0, &data, &mut rng).into_iter().filter(|p| p.dist(&x) >= 4.0).collect();
    let omega = Configuration::new(pts, data);
    let phi = truncate(phi1(1.0), 2.0, 1.0);
    let b = verify_local_bound(&omega, x, &phi, k).unwrap();
    assert!(b.holds && b.delta_h <= 2.0 * phi.bound() + 1e-9, "{b:?}");
    let near = Point2::new(omega.points[0].x + 0.1, omega.points[0].y);
    let close = verify_local_bound(&omega, near, &phi, k);
    assert!(matches!(close, Err(OracleError::PreconditionUnmet(_))));
}

#[test]
fn vacuum_bound_chain_and_lambda2() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let phi = truncate(constant(0.3), 0.5, 0.3);
    let k = 2;
    let w = Window::new(k);
    let data = w.rect().expand(12.0);
    let out: Vec<Point2> =
        sample_poisson(1.0, &data, &mut rng).into_iter().filter(|p| !w.rect().contains(p)).collect();
    let r = verify_vacuum_bound(1.0, &phi, k, &[Configuration::new(out, data)], 200, &mut rng).unwrap();
    assert!(r.cases.iter().all(|c| c.holds), "{r:?}");
    let ratios: Vec<f64> = [2, 8, 32, 256].iter().map(|&k| lambda2_area(k, 0.5) / Window::new(k).volume().powi(2)).collect();
    assert!(ratios.windows(2).all(|p| p[0] < p[1]) && ratios[3] > 0.98, "{ratios:?}");
}

#[test]
fn brute_force_z_constant_exponent() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let w = Window::new(1);
    let v = w.volume();
    let (z, c) = (0.8, 0.1);
    let b = brute_force_z(w, z, &constant(c), 80, 1, 1e-9, &mut rng).unwrap();
    // H = 2cN except below three points, where it vanishes.
    let m = z * v;
    let small: f64 =
        (0..3).map(|k| (-m).exp() * m.powi(k) / [1.0, 1.0, 2.0][k as usize] * (1.0 - (-2.0 * c * k as f64).exp())).sum();
    let closed = (z * v * ((-2.0 * c).exp() - 1.0)).exp() + small;
    assert!((b.z_hat - closed).abs() < 1e-9 * closed, "{} vs {closed}", b.z_hat);
    assert!(b.truncation < 1e-9 * b.z_hat);
}

#[test]
fn brute_force_z_phi1_is_consistent_with_direct_average() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let w = Window::new(1);
    let phi = phi1(0.5);
    let b = brute_force_z(w, 0.5, &phi, 40, 400, 1e-6, &mut rng).unwrap();
    let direct: f64 = (0..20_000)
        .map(|_| (-h_periodic(&sample_poisson(0.5, &w.rect(), &mut rng), w, &phi).unwrap()).exp())
        .sum::<f64>()
        / 20_000.0;
    let se = b.stderr.hypot(0.5 / 20_000f64.sqrt());
    assert!((b.z_hat - direct).abs() < 4.0 * se, "{} vs {direct} (se {se})", b.z_hat);
}
