//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero if a
//! required criterion fails. Criterion 4 part 2 is reported but not required.

use std::f64::consts::SQRT_2;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use chancert::channels::{choi_from_kraus, is_qns};
use chancert::constructions::{
    bell_basis_unitary_channel, bell_gram, printed_permutation, printed_permutation_reversed_bits,
    rotated_bell_basis_unitary,
};
use chancert::correlations::{
    bell_value, is_local, is_nonsignaling, max_bell_local, max_bell_ns, BellFunctional, ConditionalDistribution,
    Scenario, WitnessSet,
};
use chancert::dephasing::{decoherent_action, decoherent_action_kraus, decoherent_distribution, dephase_state};
use chancert::protocols::{
    lose_from_strategy, random_measurements, run_protocol, sample_losr_with, ProtocolSpec, QuantumStrategy,
};
use chancert::quantum_bounds::{cross_section_grid, negativity, negativity_grid, npa_max, npa_membership, CrossSection};
use chancert::random::{random_density, random_kraus, random_pure};
use chancert::tensor::{gates, kron};
use chancert::{ChoiChannel, ComplexMatrix, KrausChannel, C64};
use chancert_cli::commands::{witness, Context};
use chancert_cli::files::{MatrixFile, ReportFile};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CHSH_LOCAL_TIME_S: f64 = 2.0;
const NPA1_TOL: f64 = 1e-4;
const NS_TOL: f64 = 1e-7;
const NEG_TOL: f64 = 1e-9;
const SWEEP_TIME_S: f64 = 5.0;
const MONOTONE_TOL: f64 = 1e-12;
const EDGE_SLACK: f64 = 1e-5;
const CROSS_SECTION_N: usize = 201;
const CROSS_SECTION_TIME_S: f64 = 60.0;
// Entries of the decoherent action are sums of products of 1/√2; the last bit may differ.
const EXACT_TOL: f64 = 1e-12;
const CHSH_LOSE_TOL: f64 = 1e-8;
const SIGNALING_TOL: f64 = 1e-8;
const STATE_TOL: f64 = 1e-12;
const CHSH_OBS_TOL: f64 = 1e-10;
const WITNESS_ID_TOL: f64 = 1e-9;
const KRAUS_TOL: f64 = 1e-10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn tsirelson() -> f64 {
    2.0 * SQRT_2
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_channel(d_in: &[usize], d_out: &[usize], rank: usize, rng: &mut ChaCha8Rng) -> KrausChannel {
    KrausChannel::new(random_kraus(d_in, d_out, rank, rng), d_in.to_vec(), d_out.to_vec()).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let chsh = BellFunctional::chsh();
    let local = max_bell_local(&chsh).unwrap();
    let q = npa_max(&chsh, 1).unwrap();
    let ns = max_bell_ns(&chsh).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let pass = local == 2.0 && (q - tsirelson()).abs() < NPA1_TOL && (ns - 4.0).abs() < NS_TOL && secs < CHSH_LOCAL_TIME_S;
    outcome(pass, format!("L = {local}, NPA1 = {q:.9}, NS = {ns:.9}, {secs:.2} s"))
}

fn criterion_2() -> Outcome {
    let corner = |p: f64, q: f64| negativity(&chancert::dephasing::dephased_plus_plus(p, q).unwrap(), &[1]).unwrap();
    let mut pass = corner(0.0, 0.0).abs() < NEG_TOL && (corner(1.0, 0.0) - 0.5).abs() < NEG_TOL;
    for p in [0.0, 0.5, 1.0] {
        pass &= corner(p, 1.0).abs() < NEG_TOL;
    }
    let start = Instant::now();
    let grid = negativity_grid(101).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let monotone = grid.iter().all(|col| col.windows(2).all(|w| w[1] <= w[0] + MONOTONE_TOL));
    pass &= monotone && secs < SWEEP_TIME_S;
    outcome(
        pass,
        format!("N(1,0) = {:.12}, 101x101 sweep {secs:.2} s, monotone in q: {monotone}", corner(1.0, 0.0)),
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let section = CrossSection::new();
    let grid = cross_section_grid(CROSS_SECTION_N).unwrap();
    let mut violations = 0usize;
    for &(s, t) in &grid {
        if !section.memberships(s, t).unwrap().is_nested() {
            violations += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let s_star = (1.0 + 1.0 / SQRT_2) / 2.0;
    let edge = chancert::correlations::cross_section_point(s_star, 1.0 - s_star);
    let chsh = bell_value(&BellFunctional::chsh(), &edge).unwrap();
    let slack = npa_membership(&edge, 1).unwrap().value.unwrap();
    let pass = violations == 0 && (chsh - tsirelson()).abs() < 1e-12 && slack >= -EDGE_SLACK && secs < CROSS_SECTION_TIME_S;
    outcome(
        pass,
        format!(
            "{} points, {violations} nesting violations, edge CHSH = {chsh:.12} with NPA1 slack {slack:.2e}, {secs:.1} s",
            grid.len()
        ),
    )
}

/// Returns (required part, optional part).
fn criterion_4() -> (Outcome, Outcome) {
    let s = decoherent_action(&bell_basis_unitary_channel());
    let xx = [[1.0, 0.0, 0.0, 1.0], [0.0, 1.0, 1.0, 0.0], [0.0, 1.0, 1.0, 0.0], [1.0, 0.0, 0.0, 1.0]];
    let expected = DMatrix::from_fn(4, 4, |o, i| 0.5 * xx[o][i]);
    let diff = (&s - &expected).abs().max();
    let local = is_local(&ConditionalDistribution::from_stochastic(&s, Scenario::CHSH).unwrap()).unwrap();
    let first = outcome(
        diff < EXACT_TOL && local.is_inside(),
        format!("U: max |S - (1+XX)/2| = {diff:.1e}, local: {}", local.verdict.as_str()),
    );

    let rotated = ChoiChannel::unitary(&rotated_bell_basis_unitary(), &[2, 2]).unwrap();
    let s = decoherent_action(&rotated);
    let msb = (&s - printed_permutation()).abs().max();
    let lsb = (&s - printed_permutation_reversed_bits()).abs().max();
    let verdict = |m: DMatrix<f64>| {
        let d = ConditionalDistribution::from_stochastic(&m, Scenario::CHSH).unwrap();
        format!("local {}, ns {}", is_local(&d).unwrap().verdict.as_str(), is_nonsignaling(&d).verdict.as_str())
    };
    let second = outcome(
        msb < EXACT_TOL || lsb < EXACT_TOL,
        format!(
            "U~: distance to printed permutation {msb:.3} (MSB first, {}) and {lsb:.3} (LSB first, {}); computed S ({})",
            verdict(printed_permutation()),
            verdict(printed_permutation_reversed_bits()),
            verdict(s.clone()),
        ),
    );
    (first, second)
}

fn criterion_5() -> Outcome {
    let ch = lose_from_strategy(&QuantumStrategy::tsirelson()).unwrap();
    let cptp = ch.cptp_report().is_inside();
    let qns = is_qns(&ch).unwrap().is_inside();
    let chsh = bell_value(&BellFunctional::chsh(), &decoherent_distribution(&ch).unwrap()).unwrap();
    let mut r = rng(5);
    let mut failures = 0;
    for _ in 0..50 {
        let s = QuantumStrategy::random(Scenario::CHSH, 2, 2, true, &mut r);
        let ch = lose_from_strategy(&s).unwrap();
        if !is_local(&decoherent_distribution(&ch).unwrap()).unwrap().is_inside() {
            failures += 1;
        }
    }
    outcome(
        cptp && qns && (chsh - tsirelson()).abs() < CHSH_LOSE_TOL && failures == 0,
        format!("Tsirelson LOSE: CPTP {cptp}, QNS {qns}, CHSH {chsh:.12}; {failures}/50 local strategies not LP-local"),
    )
}

fn product_input_spec(r: &mut ChaCha8Rng) -> ProtocolSpec {
    ProtocolSpec::ProductInput {
        alice_states: (0..2).map(|_| random_density(&[2, 2], r)).collect(),
        bob_states: (0..2).map(|_| random_density(&[2, 2], r)).collect(),
        alice_measurements: random_measurements(&[2, 2], 2, 2, r),
        bob_measurements: random_measurements(&[2, 2], 2, 2, r),
    }
}

/// Largest violation of the no-signalling marginal equalities.
fn signaling(p: &ConditionalDistribution) -> f64 {
    let s = p.scenario();
    let mut worst: f64 = 0.0;
    for x in 0..s.n_x {
        for a in 0..s.n_a {
            for y in 1..s.n_y {
                let m = |y: usize| (0..s.n_b).map(|b| p.get(a, b, x, y)).sum::<f64>();
                worst = worst.max((m(y) - m(0)).abs());
            }
        }
    }
    for y in 0..s.n_y {
        for b in 0..s.n_b {
            for x in 1..s.n_x {
                let m = |x: usize| (0..s.n_a).map(|a| p.get(a, b, x, y)).sum::<f64>();
                worst = worst.max((m(x) - m(0)).abs());
            }
        }
    }
    worst
}

fn criterion_6() -> Outcome {
    let mut r = rng(6);
    let mut losr_false = 0;
    for _ in 0..100 {
        let ch = sample_losr_with([2, 2, 2, 2], 3, &mut r).unwrap();
        for spec in [product_input_spec(&mut r), ProtocolSpec::Computational] {
            if !is_local(&run_protocol(&spec, &ch).unwrap()).unwrap().is_inside() {
                losr_false += 1;
            }
        }
    }
    let mut lose_false = 0;
    for _ in 0..100 {
        let ch = lose_from_strategy(&QuantumStrategy::random(Scenario::CHSH, 2, 2, false, &mut r)).unwrap();
        let p = run_protocol(&product_input_spec(&mut r), &ch).unwrap();
        if !npa_membership(&p, 1).unwrap().is_inside() {
            lose_false += 1;
        }
    }
    let mut product_false = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let a = choi_from_kraus(&random_channel(&[2], &[2], 2, &mut r));
        let b = choi_from_kraus(&random_channel(&[2], &[2], 2, &mut r));
        let ch = ChoiChannel::product(&a, &b).unwrap();
        let spec = ProtocolSpec::General {
            state: ComplexMatrix::projector(&random_pure(&[2, 2], &mut r)),
            alice_channels: (0..2).map(|_| choi_from_kraus(&random_channel(&[2], &[2, 2], 2, &mut r))).collect(),
            bob_channels: (0..2).map(|_| choi_from_kraus(&random_channel(&[2], &[2, 2], 2, &mut r))).collect(),
            alice_measurements: random_measurements(&[2, 2], 2, 2, &mut r),
            bob_measurements: random_measurements(&[2, 2], 2, 2, &mut r),
        };
        let p = run_protocol(&spec, &ch).unwrap();
        let sig = signaling(&p);
        worst = worst.max(sig);
        if sig > SIGNALING_TOL || !is_nonsignaling(&p).is_inside() {
            product_false += 1;
        }
    }
    outcome(
        losr_false + lose_false + product_false == 0,
        format!(
            "LOSR (b, c) non-local: {losr_false}/200, LOSE non-NPA1: {lose_false}/100, product signaling: {product_false}/100 (max {worst:.1e})"
        ),
    )
}

fn criterion_7() -> Outcome {
    let plus = kron(&gates::plus_ket(), &gates::plus_ket());
    let rho = dephase_state(&ComplexMatrix::projector(&plus), &bell_gram()).unwrap();
    let h = 0.5;
    let psi = ComplexMatrix::ket(&[C64::new(h, 0.0), C64::new(h, 0.0), C64::new(h, 0.0), C64::new(-h, 0.0)], &[2, 2]).unwrap();
    let dist = rho.max_abs_diff(&ComplexMatrix::projector(&psi));
    let neg = negativity(&rho, &[1]).unwrap();
    let k = 1.0 / SQRT_2;
    let sp = (&gates::pauli_x() + &gates::pauli_z()).scale_real(k);
    let sm = (&gates::pauli_x() - &gates::pauli_z()).scale_real(k);
    let op = &kron(&gates::pauli_z(), &(&sp + &sm)) + &kron(&gates::pauli_x(), &(&sp - &sm));
    let chsh = rho.trace_product(&op).re;
    outcome(
        dist < STATE_TOL && (neg - 0.5).abs() < STATE_TOL && (chsh - tsirelson()).abs() < CHSH_OBS_TOL,
        format!("distance to Bell state {dist:.1e}, negativity {neg:.12}, CHSH {chsh:.12}"),
    )
}

fn criterion_8(dir: &Path) -> Outcome {
    let mut r = rng(8);
    let ctx = Context::new(vec!["witness".into()]);
    let mut worst: f64 = 0.0;
    let mut local_negative = 0;
    let mut local_count = 0;
    // 50 generic channels, then 50 LOSR channels whose decoherent actions are local
    for k in 0..100 {
        let ch = if k < 50 {
            choi_from_kraus(&random_channel(&[2, 2], &[2, 2], 2, &mut r))
        } else {
            sample_losr_with([2, 2, 2, 2], 3, &mut r).unwrap()
        };
        let path = dir.join(format!("channel-{k}.json"));
        std::fs::write(&path, MatrixFile::from_channel(&ch).to_json()).unwrap();
        let report = ReportFile::parse(&witness(&ctx, &path, "chsh", WitnessSet::Local).unwrap().stdout).unwrap();
        let v = |key: &str| report.values[key].as_f64().unwrap();
        worst = worst.max((v("trace_jw") - (v("gamma_s") - v("gamma_of_decoherent_action"))).abs());
        if is_local(&decoherent_distribution(&ch).unwrap()).unwrap().is_inside() {
            local_count += 1;
            if v("trace_jw") < -WITNESS_ID_TOL {
                local_negative += 1;
            }
        }
    }
    outcome(
        worst < WITNESS_ID_TOL && local_negative == 0,
        format!("max |Tr(JW) - (γ_S - γ(S))| = {worst:.1e} over 100 channels; {local_negative} negative among {local_count} LP-local actions"),
    )
}

fn criterion_9() -> Outcome {
    let mut r = rng(9);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let (d_in, d_out): (&[usize], &[usize]) = if k % 2 == 0 { (&[2, 2], &[2, 2]) } else { (&[3], &[2]) };
        let kraus = random_channel(d_in, d_out, 1 + k % 4, &mut r);
        let s = decoherent_action_kraus(&kraus);
        let j = choi_from_kraus(&kraus);
        let (di, dout) = (j.d_in(), j.d_out());
        let reshaped = DMatrix::from_fn(dout, di, |o, i| j.choi().get(i * dout + o, i * dout + o).re);
        let schur = DMatrix::from_fn(dout, di, |o, i| kraus.operators().iter().map(|m| m.get(o, i).norm_sqr()).sum::<f64>());
        worst = worst.max((&s - &reshaped).abs().max()).max((&schur - &reshaped).abs().max());
        worst = worst.max((&decoherent_action(&j) - &reshaped).abs().max());
    }
    outcome(worst < KRAUS_TOL, format!("max deviation over 100 channels {worst:.1e}"))
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let dir = tempfile::TempDir::new().unwrap();
    let (c4, c4_printed) = criterion_4();
    let results = [
        (1, criterion_1()),
        (2, criterion_2()),
        (3, criterion_3()),
        (4, c4),
        (5, criterion_5()),
        (6, criterion_6()),
        (7, criterion_7()),
        (8, criterion_8(dir.path())),
        (9, criterion_9()),
    ];
    let mut required_failures = 0;
    for (n, o) in &results {
        let mut pass = o.pass;
        let mut detail = o.detail.clone();
        if *n == 4 {
            pass &= c4_printed.pass;
            detail = format!("{detail}; {}", c4_printed.detail);
        }
        println!("criterion {n}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
        if !o.pass {
            required_failures += 1;
        }
    }
    if !c4_printed.pass {
        println!("note: criterion 4 fails on the printed permutation for U~ in both bit orders; the first part is required and holds");
    }
    if required_failures > 0 {
        println!("{required_failures} required criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
