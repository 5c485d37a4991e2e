use chancert::correlations::BellFunctional;
use chancert::protocols::{informationally_complete_inputs, sample_losr, tetrahedral_states, MdiSetup, SeesawSettings};
use chancert::tensor::{gates, kron, ComplexMatrix};
use chancert::{ChoiChannel, Error, Verdict};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn replacer(state: &ComplexMatrix) -> ChoiChannel {
    let j = kron(&ComplexMatrix::identity(&[2, 2]), state).with_square_dims(vec![2, 2, 2, 2]).unwrap();
    ChoiChannel::bipartite(j, 2, 2, 2, 2).unwrap()
}

fn settings() -> SeesawSettings {
    SeesawSettings { restarts: 4, ..SeesawSettings::default() }
}

/// Functional `p_E - p_F` for a Bell-state preparation `E` and the fully mixed preparation `F`.
fn entangled_preparation_setup() -> (MdiSetup, ChoiChannel, ChoiChannel) {
    let inputs = informationally_complete_inputs(2).unwrap();
    let scenario = MdiSetup::scenario_for(2, 2, inputs.len(), inputs.len());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let probe = MdiSetup::new(BellFunctional::zero(scenario), inputs.clone(), inputs.clone(), &settings(), &mut rng).unwrap();
    let bell = replacer(&ComplexMatrix::projector(&gates::phi_plus()));
    let mixed = replacer(&ComplexMatrix::identity(&[2, 2]).scale_real(0.25));
    let p = probe.distribution(&bell).unwrap();
    let q = probe.distribution(&mixed).unwrap();
    let coefficients = p.as_slice().iter().zip(q.as_slice()).map(|(a, b)| a - b).collect();
    let gamma = BellFunctional::new(scenario, coefficients).unwrap();
    (MdiSetup::new(gamma, inputs.clone(), inputs, &settings(), &mut rng).unwrap(), bell, mixed)
}

#[test]
fn bell_preparation_is_certified_and_losr_never_is() {
    let (setup, bell, mixed) = entangled_preparation_setup();
    assert!(setup.lower_bound <= setup.upper_bound.value + 1e-7);

    let report = setup.test(&bell).unwrap();
    assert_eq!(report.verdict, Verdict::Outside);
    assert!(report.margin.unwrap() > 1.0);
    assert_eq!(setup.test(&mixed).unwrap().verdict, Verdict::Inconclusive);

    for seed in 0..20 {
        let ch = sample_losr([2, 2, 2, 2], 1 + (seed as usize) % 3, seed).unwrap();
        let report = setup.test(&ch).unwrap();
        assert_ne!(report.verdict, Verdict::Outside, "seed {seed}");
        assert!(report.value.unwrap() <= setup.upper_bound.value + 1e-7);
    }
}

#[test]
fn zero_functional_is_inconclusive() {
    let inputs = informationally_complete_inputs(2).unwrap();
    let scenario = MdiSetup::scenario_for(2, 2, 16, 16);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let setup = MdiSetup::new(BellFunctional::zero(scenario), inputs.clone(), inputs, &settings(), &mut rng).unwrap();
    let ch = ChoiChannel::unitary(&gates::cnot(), &[2, 2]).unwrap();
    let report = setup.test(&ch).unwrap();
    assert_eq!(report.verdict, Verdict::Inconclusive);
    assert_eq!(report.value, Some(0.0));
}

#[test]
fn setup_rejects_bad_inputs() {
    let inputs = informationally_complete_inputs(2).unwrap();
    let scenario = MdiSetup::scenario_for(2, 2, 15, 16);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let short = inputs[..15].to_vec();
    let err = MdiSetup::new(BellFunctional::zero(scenario), short, inputs.clone(), &settings(), &mut rng).unwrap_err();
    assert!(matches!(err, Error::NotSpanning { rank: 15, needed: 16 }));

    let setup = MdiSetup::new(BellFunctional::zero(MdiSetup::scenario_for(2, 2, 16, 16)), inputs.clone(), inputs, &settings(), &mut rng)
        .unwrap();
    let qutrit_out = ChoiChannel::bipartite(
        kron(&ComplexMatrix::identity(&[2, 2]), &ComplexMatrix::identity(&[3, 2]).scale_real(1.0 / 6.0))
            .with_square_dims(vec![2, 2, 3, 2])
            .unwrap(),
        2,
        2,
        3,
        2,
    )
    .unwrap();
    assert!(matches!(setup.distribution(&qutrit_out), Err(Error::UnsupportedDimensions(_))));
    assert_eq!(tetrahedral_states().len(), 4);
}
