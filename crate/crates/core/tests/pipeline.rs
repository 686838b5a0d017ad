use delaunay_gibbs::estimators::{pressure, PressureGrid};
use delaunay_gibbs::interaction::phi1;
use delaunay_gibbs::oracles::brute_force_z;
use delaunay_gibbs::sampler::{block_paste, run_chain, run_chains, sample_poisson};
use delaunay_gibbs::{Configuration, GibbsModel, Point2, Rect, SamplerConfig, Window};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn pressure_matches_brute_force_on_smallest_torus() {
    let phi = phi1(0.5);
    let w = Window::new(1);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let bz = brute_force_z(w, 0.5, &phi, 40, 2000, 1e-6, &mut rng).unwrap();
    let target = bz.log_z / w.volume();
    let pe = pressure(&GibbsModel::periodic(0.5, phi, 1), &PressureGrid::default(), &SamplerConfig::new(22, 4000, 200, 1))
        .unwrap();
    let se = pe.p_hat.stderr.hypot(bz.log_stderr / w.volume());
    assert!((pe.p_hat.value - target).abs() < 3.0 * se, "p̂ {} vs {target} (se {se})", pe.p_hat.value);
}

#[test]
fn chains_are_reproducible_per_stream() {
    let model = GibbsModel::periodic(1.0, phi1(1.0), 2);
    let cfg = SamplerConfig::new(5, 30, 5, 3);
    let a = run_chain(&model, &cfg).unwrap();
    assert_eq!(a, run_chain(&model, &cfg).unwrap());
    let many = run_chains(&model, &cfg, 3).unwrap();
    assert_eq!(many[0], a);
    assert_ne!(many[1], many[2]);
}

#[test]
fn configurational_chain_stays_in_window() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let w = Window::new(2);
    let data = w.rect().expand(12.0);
    let out: Vec<Point2> = sample_poisson(1.0, &data, &mut rng).into_iter().filter(|p| !w.rect().contains(p)).collect();
    let model = GibbsModel::configurational(1.0, phi1(1.0), 2, Configuration::new(out, data));
    let s = run_chain(&model, &SamplerConfig::new(1, 40, 10, 4)).unwrap();
    assert_eq!(s.len(), 10);
    assert!(s.iter().all(|s| s.points.iter().all(|p| w.rect().contains(p))));
}

#[test]
fn block_paste_keeps_corridor_free() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let w = Window::new(2);
    let blocks: Vec<Vec<Point2>> = (0..4).map(|_| sample_poisson(2.0, &w.rect(), &mut rng)).collect();
    let c = block_paste(&blocks, 2, 3, 0.5, Point2::new(0.0, 0.0));
    let l = w.side();
    assert_eq!(c.window, Rect::centered_square(1.5 * l));
    for p in &c.points {
        // Distance to the nearest block edge, with blocks tiling from the window corner.
        let fx = (p.x + 1.5 * l).rem_euclid(l);
        let fy = (p.y + 1.5 * l).rem_euclid(l);
        let d = fx.min(l - fx).min(fy).min(l - fy);
        assert!(d >= 0.5 - 1e-9, "{p:?} at {d}");
    }
}
