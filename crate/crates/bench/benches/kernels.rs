use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use delaunay_gibbs::geometry::{delaunay, TorusTriangulation};
use delaunay_gibbs::hamiltonian::{h_config, h_periodic};
use delaunay_gibbs::interaction::{phi1, truncate};
use delaunay_gibbs::oracles::{naive_delaunay, snap};
use delaunay_gibbs::sampler::{mcmc_step, sample_poisson, uniform_in, ChainState, ProposalWeights};
use delaunay_gibbs::{Configuration, GibbsModel, Window};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn triangulation(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let w = Window::new(8);
    let pts = sample_poisson(1.0, &w.rect(), &mut rng);
    c.bench_function("delaunay_289", |b| b.iter(|| delaunay(black_box(&pts), None)));
    c.bench_function("torus_289", |b| {
        b.iter(|| TorusTriangulation::new(black_box(&pts), w.origin(), w.side()).unwrap())
    });
    let small: Vec<_> = pts.iter().take(40).copied().map(snap).collect();
    c.bench_function("naive_delaunay_40", |b| b.iter(|| naive_delaunay(black_box(&small)).unwrap()));
    let base = delaunay(&pts, None);
    c.bench_function("insert_cavity", |b| {
        b.iter_batched(
            || (base.clone(), uniform_in(&w.rect(), &mut rng)),
            |(mut t, x)| t.insert_cavity(x),
            BatchSize::SmallInput,
        )
    });
}

fn energies(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let phi = truncate(phi1(1.0), 2.0, 1.0);
    let w = Window::new(4);
    let data = w.rect().expand(2.0 * w.half_side() + 6.0);
    let omega = Configuration::new(sample_poisson(1.0, &data, &mut rng), data);
    let zeta = omega.inside(&w.rect());
    c.bench_function("h_config_n4", |b| b.iter(|| h_config(black_box(&zeta), &omega, w, &phi).unwrap()));
    let torus = sample_poisson(1.0, &w.rect(), &mut rng);
    c.bench_function("h_periodic_n4", |b| b.iter(|| h_periodic(black_box(&torus), w, &phi).unwrap()));
}

fn chains(c: &mut Criterion) {
    let phi = truncate(phi1(1.0), 2.0, 1.0);
    let periodic = GibbsModel::periodic(1.0, phi.clone(), 4);
    let mut state = ChainState::new(&periodic, &[], 3, 0).unwrap();
    for _ in 0..5000 {
        mcmc_step(&mut state, ProposalWeights::default()).unwrap();
    }
    c.bench_function("mcmc_step_periodic_n4", |b| b.iter(|| mcmc_step(&mut state, ProposalWeights::default()).unwrap()));

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let w = Window::new(4);
    let data = w.rect().expand(2.0 * w.half_side() + 6.0);
    let out = sample_poisson(1.0, &data, &mut rng).into_iter().filter(|p| !w.rect().contains(p)).collect();
    let model = GibbsModel::configurational(1.0, phi, 4, Configuration::new(out, data));
    let mut state = ChainState::new(&model, &[], 5, 0).unwrap();
    for _ in 0..5000 {
        mcmc_step(&mut state, ProposalWeights::default()).unwrap();
    }
    c.bench_function("mcmc_step_configurational_n4", |b| {
        b.iter(|| mcmc_step(&mut state, ProposalWeights::default()).unwrap())
    });
}

criterion_group!(benches, triangulation, energies, chains);
criterion_main!(benches);
