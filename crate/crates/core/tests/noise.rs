use purecliff::circuit::{FaultAction, FaultAssignment};
use purecliff::noise::{enumerate_fault_sites, FaultSampler, NoiseModel, SiteKind};
use purecliff::pauli::Pauli;
use purecliff::protocols::{builtin, BUILTIN_NAMES};
use purecliff::Rational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn network_sites(name: &str) -> (usize, usize) {
    let circuit = builtin(name).unwrap().circuit;
    let sites = enumerate_fault_sites(&circuit, &NoiseModel::network(0.01).unwrap());
    assert!(sites.iter().all(|s| matches!(s.kind, SiteKind::Network { .. })));
    (sites.len(), sites.iter().map(|s| s.alternatives.len()).sum())
}

#[test]
fn raw_ghz3_has_six_first_order_events() {
    assert_eq!(network_sites("raw-ghz3"), (2, 6));
}

#[test]
fn ghz3_het_has_four_network_sites() {
    assert_eq!(network_sites("ghz3-het"), (4, 12));
}

#[test]
fn noiseless_model_has_no_sites() {
    for name in BUILTIN_NAMES {
        let circuit = builtin(name).unwrap().circuit;
        assert!(enumerate_fault_sites(&circuit, &NoiseModel::<f64>::noiseless()).is_empty());
        assert!(enumerate_fault_sites(&circuit, &NoiseModel::<Rational>::noiseless()).is_empty());
    }
}

#[test]
fn gate_sites_split_weight_evenly() {
    let circuit = builtin("ghz3-het").unwrap().circuit;
    let model = NoiseModel::new(0.0, 0.03, 0.0).unwrap();
    for site in enumerate_fault_sites(&circuit, &model) {
        let SiteKind::Gate { qubits } = &site.kind else {
            panic!("unexpected {site}");
        };
        let expected = if qubits.len() == 1 { 3 } else { 15 };
        assert_eq!(site.alternatives.len(), expected);
        assert!((site.total_weight(&model) - 0.03f64).abs() < 1e-15);
    }
}

#[test]
fn invalid_rates_are_rejected() {
    assert!(NoiseModel::new(0.34, 0.0, 0.0).is_err());
    assert!(NoiseModel::new(-0.1, 0.0, 0.0).is_err());
    assert!(NoiseModel::new(0.0, 1.5, 0.0).is_err());
    assert!(NoiseModel::new(f64::NAN, 0.0, 0.0).is_err());
}

fn sample(eps: f64, draws: usize) -> (usize, [usize; 3]) {
    let circuit = builtin("raw-ghz3").unwrap().circuit;
    let model = NoiseModel::network(eps).unwrap();
    let mut sites = enumerate_fault_sites(&circuit, &model);
    sites.truncate(1);
    let sampler = FaultSampler::new(sites, &model);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut out = FaultAssignment::default();
    let mut fired = 0;
    let mut letters = [0usize; 3];
    for _ in 0..draws {
        sampler.sample_into(&mut rng, &mut out);
        if let Some(f) = out.faults().first() {
            fired += 1;
            let FaultAction::Pauli(ps) = &f.action else { panic!() };
            let k = match ps[0].1 {
                Pauli::X => 0,
                Pauli::Y => 1,
                Pauli::Z => 2,
                Pauli::I => panic!("identity alternative"),
            };
            letters[k] += 1;
        }
    }
    (fired, letters)
}

#[test]
fn zero_rate_never_fires() {
    assert_eq!(sample(0.0, 10_000).0, 0);
}

#[test]
fn maximal_rate_always_fires_uniformly() {
    let draws = 100_000;
    let (fired, letters) = sample(1.0 / 3.0, draws);
    assert_eq!(fired, draws);
    let p = 1.0 / 3.0;
    let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
    for c in letters {
        assert!((c as f64 - draws as f64 * p).abs() < 3.0 * sigma, "{letters:?}");
    }
}

#[test]
fn fault_frequency_is_binomial() {
    let draws = 1_000_000;
    let (fired, _) = sample(0.01, draws);
    let p = 0.03;
    let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
    assert!((fired as f64 - draws as f64 * p).abs() < 3.0 * sigma, "{fired}");
}
