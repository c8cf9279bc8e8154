use gbs_dks::dks::{
    expected_gbs_density, expected_uniform_density, greedy_baseline, random_search_with, simulated_annealing,
    AnnealingSchedule, GbsDevice, NoiseConfig,
};
use gbs_dks::graph::{densest_k_brute_force, erdos_renyi_seeded, Graph};
use gbs_dks::gstate::{embed_graph, expand_spectral, scaling_bound, schmidt_profile};
use gbs_dks::harness::{run_experiment, ExperimentConfig};
use gbs_dks::rng::seeded;
use gbs_dks::sampler::{enumerate_subspace, threshold_probability, ChainSampler, ClickPattern};
use proptest::prelude::*;

#[test]
fn sampled_densities_track_exact_expectation() {
    let g = erdos_renyi_seeded(12, 0.35, 21).unwrap();
    let device = GbsDevice::prepare(&g, 4, &NoiseConfig::new(0.2, None).unwrap()).unwrap();
    let exact = expected_gbs_density(&g, &device).unwrap();
    let mut rng = seeded(3);
    let draws = 20_000;
    let samples: Vec<f64> = (0..draws)
        .map(|_| g.density_of_mask(device.sample_k(&mut rng).unwrap().bits()))
        .collect();
    let mean = samples.iter().sum::<f64>() / draws as f64;
    let sd = (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / draws as f64).sqrt();
    assert!((mean - exact).abs() < 4.0 * sd / (draws as f64).sqrt(), "{mean} vs {exact}");
    assert!(exact > expected_uniform_density(&g, 4).unwrap());
}

#[test]
fn chain_rejection_matches_enumeration_beyond_small_graphs() {
    // above the enumeration limit the device falls back to chain rejection;
    // check that path against the exact marginal on a 12-mode instance
    let g = erdos_renyi_seeded(12, 0.4, 8).unwrap();
    let state = embed_graph(&g, 0.9 * scaling_bound(&g)).unwrap();
    let chain = ChainSampler::new(&state).unwrap();
    let dist = enumerate_subspace(&state, 2).unwrap();
    let mut rng = seeded(17);
    let draws = 4_000;
    let mut counts = vec![0usize; dist.len()];
    for _ in 0..draws {
        let p = chain.sample_with_clicks(&mut rng, 2, 100_000).unwrap();
        let i = dist.patterns().iter().position(|q| *q == p).unwrap();
        counts[i] += 1;
    }
    let tv: f64 = counts
        .iter()
        .zip(dist.weights())
        .map(|(&c, w)| (c as f64 / draws as f64 - w).abs())
        .sum::<f64>()
        / 2.0;
    assert!(tv < 0.08, "total variation {tv}");
}

#[test]
fn search_algorithms_respect_the_optimum() {
    let g = erdos_renyi_seeded(11, 0.45, 5).unwrap();
    let best = densest_k_brute_force(&g, 4).unwrap();
    let profile = schmidt_profile(2, 1.0, 0.75).unwrap();
    let device = GbsDevice::prepare(&g, 4, &NoiseConfig::new(0.1, Some(profile)).unwrap()).unwrap();
    let runs = [
        random_search_with(&g, &device, 200, 1).unwrap(),
        simulated_annealing(&g, 4, 200, &device, true, AnnealingSchedule::default(), 2).unwrap(),
        simulated_annealing(&g, 4, 200, &device, false, AnnealingSchedule::default(), 3).unwrap(),
        greedy_baseline(&g, 4, 200).unwrap(),
    ];
    for r in &runs {
        assert!(r.final_density() <= best + 1e-12);
    }
    // 200 GBS samples on 330 subsets find the optimum
    assert_eq!(runs[0].final_density(), best);
}

#[test]
fn scaling_experiment_shows_enhancement() {
    let config = ExperimentConfig::from_json(
        r#"{"kind": "scaling-n", "graph": {"n": [9, 16], "rho": 0.4, "seed": 2}, "k_rule": "sqrt_n",
            "steps": 40, "iterations": 5, "loss": [0.0], "master_seed": 6}"#,
        "inline",
    )
    .unwrap();
    let out = run_experiment(&config, 2).unwrap();
    let d = out.table.column("diff_vs_uniform").unwrap();
    let a = out.table.column("algorithm").unwrap();
    for row in out.table.rows.iter().filter(|r| r[a] == "gbs") {
        assert!(row[d].parse::<f64>().unwrap() > 0.0, "{row:?}");
    }
}

#[test]
fn disconnected_pairs_stay_dark_on_bipartite_graphs() {
    // a bipartite kernel only emits photon pairs across the bipartition, and
    // spectral impurity keeps that structure
    let g = Graph::from_edges(6, &[(0, 3), (0, 4), (1, 4), (1, 5), (2, 3), (2, 5)]).unwrap();
    let pure = embed_graph(&g, 0.8 * scaling_bound(&g)).unwrap();
    let impure = expand_spectral(&pure, &schmidt_profile(3, 0.5, 0.6).unwrap()).unwrap();
    for state in [&pure, &impure] {
        for (i, j) in [(0, 1), (0, 2), (3, 4), (4, 5)] {
            let p = threshold_probability(state, &ClickPattern::from_modes(&[i, j], 6).unwrap()).unwrap();
            assert!(p.abs() < 1e-12, "({i}, {j}): {p}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gbs_samples_have_k_clicks(seed in 0u64..1000, k in 2usize..5) {
        let g = erdos_renyi_seeded(9, 0.5, seed).unwrap();
        prop_assume!(g.edge_count() > 0);
        let device = GbsDevice::prepare(&g, k, &NoiseConfig::new(0.3, None).unwrap()).unwrap();
        let mut rng = seeded(seed);
        for _ in 0..20 {
            let p = device.sample_k(&mut rng).unwrap();
            prop_assert_eq!(p.count(), k);
            let raw = device.sample_raw(&mut rng).unwrap();
            prop_assert_eq!(raw.width(), 9);
        }
    }
}
