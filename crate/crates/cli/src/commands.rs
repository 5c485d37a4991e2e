use std::path::Path;
use std::time::Instant;

use chancert::channels::{is_qns, is_superchannel};
use chancert::correlations::{
    bell_value, build_witness, is_local, is_nonsignaling, BellFunctional, ConditionalDistribution, WitnessSet,
};
use chancert::dephasing::{decoherent_action, decoherent_distribution, GramMatrix, GRAM_DIAGONAL_TOL, GRAM_PSD_TOL};
use chancert::protocols::{run_protocol, seesaw_gamma_max, SeesawSettings};
use chancert::quantum_bounds::{cross_section_grid, negativity, npa_membership, CrossSection};
use chancert::report::Residual;
use chancert::tensor::ComplexMatrix;
use chancert::{CertificateReport, Verdict};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::files::{Kind, MatrixFile, ReportFile, FORMAT};
use crate::{CliError, Output};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OUTSIDE: i32 = 1;

/// Strictly negative witness values below this count as certified.
pub const WITNESS_TOL: f64 = 1e-9;
pub const STATE_TOL: f64 = 1e-9;

pub struct Context {
    pub command: Vec<String>,
    started: Instant,
}

impl Context {
    pub fn new(command: Vec<String>) -> Self {
        Self { command, started: Instant::now() }
    }

    fn report(&self, reports: Vec<CertificateReport>, values: Map<String, Value>, seed: Option<u64>, code: i32) -> Output {
        let file = ReportFile {
            format: FORMAT.into(),
            command: self.command.clone(),
            reports,
            values,
            seed,
            wall_time_seconds: self.started.elapsed().as_secs_f64(),
            exit_code: code,
        };
        Output { stdout: file.to_json(), code }
    }
}

fn any_outside(reports: &[CertificateReport]) -> bool {
    reports.iter().any(|r| r.verdict == Verdict::Outside)
}

fn violation(set: &str, message: String) -> CertificateReport {
    CertificateReport::new(set, Verdict::Outside).with_note(message)
}

/// Core errors that describe an object failing its own invariants rather than bad input.
fn invariant_failure(e: &CliError) -> Option<String> {
    match e {
        CliError::Core(
            err @ (chancert::Error::InvalidMeasurement(_)
            | chancert::Error::InvalidStrategy(_)
            | chancert::Error::InvalidDistribution(_)
            | chancert::Error::InvalidGram(_)
            | chancert::Error::InvalidChannel(_)),
        ) => Some(err.to_string()),
        _ => None,
    }
}

fn state_report(set: &str, m: &ComplexMatrix) -> chancert::Result<CertificateReport> {
    let min = m.hermitian_part().min_eigenvalue()?;
    let trace = m.trace();
    Ok(CertificateReport::from_residuals(
        set,
        vec![
            Residual { name: "hermiticity".into(), value: m.hermiticity_error(), tolerance: STATE_TOL },
            Residual { name: "psd".into(), value: (-min).max(0.0), tolerance: STATE_TOL },
            Residual { name: "trace".into(), value: (trace - 1.0).norm(), tolerance: STATE_TOL },
        ],
    ))
}

fn gram_report(m: &ComplexMatrix) -> chancert::Result<CertificateReport> {
    let min = m.hermitian_part().min_eigenvalue()?;
    let diag = m.diagonal_real().iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    let mut report = CertificateReport::from_residuals(
        "gram",
        vec![
            Residual { name: "hermiticity".into(), value: m.hermiticity_error(), tolerance: GRAM_PSD_TOL },
            Residual { name: "psd".into(), value: (-min).max(0.0), tolerance: GRAM_PSD_TOL },
            Residual { name: "unit_diagonal".into(), value: diag, tolerance: GRAM_DIAGONAL_TOL },
        ],
    );
    report.value = Some(min);
    Ok(report)
}

pub fn validate(ctx: &Context, path: &Path) -> Result<Output, CliError> {
    let file = MatrixFile::read(path)?;
    let mut reports = Vec::new();
    let checked = (|| -> Result<(), CliError> {
        match file.kind()? {
            Kind::Choi => {
                let ch = file.channel_unchecked()?;
                reports.push(ch.cptp_report());
                if ch.is_bipartite() {
                    reports.push(is_qns(&ch)?);
                }
            }
            Kind::Superchannel => reports.push(is_superchannel(&file.superchannel()?)?),
            Kind::State => reports.push(state_report("state", &file.square_matrix()?)?),
            Kind::Gram => {
                let m = file.square_matrix()?;
                reports.push(gram_report(&m)?);
                if reports[0].is_inside() {
                    GramMatrix::new(m)?;
                }
            }
            Kind::Stochastic | Kind::Distribution => reports.push(is_nonsignaling(&file.distribution()?)),
            Kind::PovmFamily => {
                let m = file.measurements()?;
                reports.push(CertificateReport::new("povm-family", Verdict::Inside).with_note(format!(
                    "{} settings, {} outcomes, dimension {}",
                    m.settings(),
                    m.outcomes(),
                    m.dim()
                )));
            }
            Kind::Strategy => {
                let s = file.strategy()?;
                let p = s.distribution()?;
                reports.push(CertificateReport::new("strategy", Verdict::Inside));
                reports.push(is_nonsignaling(&p));
            }
            Kind::Functional => {
                file.functional()?;
                reports.push(CertificateReport::new("functional", Verdict::Inside));
            }
            Kind::Inputs => {
                let (alice, bob) = file.inputs()?;
                for (k, m) in alice.iter().enumerate() {
                    reports.push(state_report(&format!("alice_state_{k}"), m)?);
                }
                for (k, m) in bob.iter().enumerate() {
                    reports.push(state_report(&format!("bob_state_{k}"), m)?);
                }
            }
            Kind::Protocol => {
                file.protocol()?;
                reports.push(CertificateReport::new("protocol", Verdict::Inside));
            }
        }
        Ok(())
    })();
    if let Err(e) = checked {
        match invariant_failure(&e) {
            Some(message) => reports.push(violation("invariants", message)),
            None => return Err(e),
        }
    }
    let code = if any_outside(&reports) { EXIT_OUTSIDE } else { EXIT_OK };
    Ok(ctx.report(reports, Map::new(), None, code))
}

pub fn decohere(path: &Path) -> Result<Output, CliError> {
    let ch = MatrixFile::read(path)?.channel()?;
    let s = decoherent_action(&ch);
    let out = MatrixFile::from_stochastic(&s, ch.input_dims(), ch.output_dims());
    Ok(Output { stdout: out.to_json(), code: EXIT_OK })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum CertifySet {
    Local,
    Ns,
    Npa1,
    Npa2,
}

/// A distribution from a distribution, stochastic or channel file.
fn load_distribution(file: &MatrixFile) -> Result<ConditionalDistribution, CliError> {
    match file.kind()? {
        Kind::Choi => Ok(decoherent_distribution(&file.channel()?)?),
        _ => file.distribution(),
    }
}

pub fn certify(ctx: &Context, path: &Path, set: CertifySet) -> Result<Output, CliError> {
    let p = load_distribution(&MatrixFile::read(path)?)?;
    let report = match set {
        CertifySet::Local => is_local(&p)?,
        CertifySet::Ns => is_nonsignaling(&p),
        CertifySet::Npa1 => npa_membership(&p, 1)?,
        CertifySet::Npa2 => npa_membership(&p, 2)?,
    };
    let code = if report.verdict == Verdict::Outside { EXIT_OUTSIDE } else { EXIT_OK };
    Ok(ctx.report(vec![report], Map::new(), None, code))
}

/// `chsh` or the path of a functional file.
pub fn load_functional(spec: &str) -> Result<BellFunctional, CliError> {
    if spec.eq_ignore_ascii_case("chsh") {
        Ok(BellFunctional::chsh())
    } else {
        MatrixFile::read(Path::new(spec))?.functional()
    }
}

pub fn witness(ctx: &Context, path: &Path, functional: &str, set: WitnessSet) -> Result<Output, CliError> {
    let ch = MatrixFile::read(path)?.channel()?;
    let gamma = load_functional(functional)?;
    let w = build_witness(&gamma, set)?;
    let value = chancert::correlations::witness_value(&w, &ch)?;
    let gamma_of_action = bell_value(&gamma, &decoherent_distribution(&ch)?)?;
    let verdict = if value < -WITNESS_TOL { Verdict::Outside } else { Verdict::Inconclusive };
    let set_name = match set {
        WitnessSet::Local => "L",
        WitnessSet::Quantum => "Q",
        WitnessSet::Nonsignaling => "NS",
    };
    let report = CertificateReport::new(format!("witness-{set_name}"), verdict)
        .with_value(value)
        .with_margin(-value)
        .with_residual("witness_value", value, WITNESS_TOL);
    let mut values = Map::new();
    values.insert("trace_jw".into(), json!(value));
    values.insert("gamma_s".into(), json!(w.gamma_s));
    values.insert("gamma_of_decoherent_action".into(), json!(gamma_of_action));
    let code = if verdict == Verdict::Outside { EXIT_OUTSIDE } else { EXIT_OK };
    Ok(ctx.report(vec![report], values, None, code))
}

fn resolution(n: usize) -> Result<f64, CliError> {
    if n < 2 {
        return Err(CliError::Input(format!("resolution must be at least 2, got {n}")));
    }
    Ok(1.0 / (n - 1) as f64)
}

pub fn noise_sweep(n: usize) -> Result<Output, CliError> {
    let step = resolution(n)?;
    let rows: Vec<String> = (0..n)
        .into_par_iter()
        .map(|i| -> Result<String, CliError> {
            let p = i as f64 * step;
            let mut out = String::new();
            for j in 0..n {
                let q = j as f64 * step;
                let rho = chancert::dephasing::dephased_plus_plus(p, q)?;
                out.push_str(&format!("{p},{q},{}\n", negativity(&rho, &[1])?));
            }
            Ok(out)
        })
        .collect::<Result<_, _>>()?;
    Ok(Output { stdout: format!("p,q,negativity\n{}", rows.concat()), code: EXIT_OK })
}

pub fn cross_section(n: usize) -> Result<Output, CliError> {
    resolution(n)?;
    let grid = cross_section_grid(n)?;
    let classifier = CrossSection::new();
    let lines: Vec<String> = grid
        .par_iter()
        .map(|&(s, t)| -> Result<String, CliError> {
            let m = classifier.memberships(s, t)?;
            if !m.is_nested() {
                return Err(CliError::Solver(format!("membership tests disagree with nesting at ({s}, {t}): {m:?}")));
            }
            Ok(format!("{s},{t},{}\n", m.region()))
        })
        .collect::<Result<_, _>>()?;
    Ok(Output { stdout: format!("s,t,region\n{}", lines.concat()), code: EXIT_OK })
}

pub fn simulate(protocol: &Path, channel: Option<&Path>) -> Result<Output, CliError> {
    let (spec, embedded) = MatrixFile::read(protocol)?.protocol()?;
    let ch = match (channel, embedded) {
        (Some(path), _) => MatrixFile::read(path)?.channel()?,
        (None, Some(ch)) => ch,
        (None, None) => {
            return Err(CliError::Input("no channel: pass --channel or embed `channel` in the protocol file".into()))
        }
    };
    let p = run_protocol(&spec, &ch)?;
    Ok(Output { stdout: MatrixFile::from_distribution(&p).to_json(), code: EXIT_OK })
}

pub struct SeesawArgs<'a> {
    pub channel: &'a Path,
    pub inputs: &'a Path,
    pub functional: &'a str,
    pub restarts: usize,
    pub max_sweeps: usize,
    pub seed: u64,
}

pub fn seesaw(ctx: &Context, args: &SeesawArgs) -> Result<Output, CliError> {
    let ch = MatrixFile::read(args.channel)?.channel()?;
    let (alice, bob) = MatrixFile::read(args.inputs)?.inputs()?;
    let gamma = load_functional(args.functional)?;
    let settings = SeesawSettings { restarts: args.restarts, max_sweeps: args.max_sweeps, ..SeesawSettings::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let res = seesaw_gamma_max(&ch, &gamma, &alice, &bob, &settings, &mut rng)?;
    let mut report = CertificateReport::new("seesaw", Verdict::Inconclusive).with_value(res.value);
    if !res.converged {
        report = report.with_note(format!("sweep cap of {} reached before convergence", args.max_sweeps));
    }
    let mut values = Map::new();
    values.insert("gamma_lower_bound".into(), json!(res.value));
    values.insert("sweeps".into(), json!(res.sweeps));
    values.insert("converged".into(), json!(res.converged));
    values.insert("alice_measurement".into(), serde_json::to_value(MatrixFile::from_measurements(&res.alice)).expect("json"));
    values.insert("bob_measurement".into(), serde_json::to_value(MatrixFile::from_measurements(&res.bob)).expect("json"));
    Ok(ctx.report(vec![report], values, Some(args.seed), EXIT_OK))
}

pub fn lose_from_strategy(path: &Path) -> Result<Output, CliError> {
    let s = MatrixFile::read(path)?.strategy()?;
    let ch = chancert::protocols::lose_from_strategy(&s)?;
    Ok(Output { stdout: MatrixFile::from_channel(&ch).to_json(), code: EXIT_OK })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Example {
    /// Identity channel on two qubits.
    Identity,
    Cnot,
    /// Unitary mapping the computational basis onto Bell states.
    BellBasisUnitary,
    RotatedBellBasisUnitary,
    ControlledXz,
    /// The two-qubit Gram matrix that turns |++> into a maximally entangled state.
    BellGram,
    /// Identity channel after memoryless dephasing of its input by the Bell Gram matrix.
    BellGramIdentity,
    PrBox,
    Chsh,
    TsirelsonStrategy,
    /// Inputs |+><+| ⊗ |x><x| on (A0, R) for both parties.
    PlusInputs,
    /// Computational-basis protocol (the decoherent action).
    ComputationalProtocol,
}

pub fn example(which: Example) -> Result<Output, CliError> {
    use chancert::constructions as c;
    let unitary = |u: ComplexMatrix| -> Result<MatrixFile, CliError> {
        Ok(MatrixFile::from_channel(&chancert::ChoiChannel::unitary(&u, &[2, 2])?))
    };
    let file = match which {
        Example::Identity => MatrixFile::from_channel(&chancert::ChoiChannel::identity(&[2, 2])),
        Example::Cnot => unitary(chancert::tensor::gates::cnot())?,
        Example::BellBasisUnitary => unitary(c::bell_basis_unitary())?,
        Example::RotatedBellBasisUnitary => unitary(c::rotated_bell_basis_unitary())?,
        Example::ControlledXz => unitary(c::controlled_xz())?,
        Example::BellGram => MatrixFile::from_gram(c::bell_gram().matrix()),
        Example::BellGramIdentity => MatrixFile::from_channel(&chancert::dephasing::dephase_channel_memoryless(
            &chancert::ChoiChannel::identity(&[2, 2]),
            &c::bell_gram(),
            &GramMatrix::trivial(&[2, 2]),
        )?),
        Example::PrBox => MatrixFile::from_distribution(&chancert::correlations::pr_box()),
        Example::Chsh => MatrixFile::from_functional(&BellFunctional::chsh()),
        Example::TsirelsonStrategy => MatrixFile::from_strategy(&chancert::protocols::QuantumStrategy::tsirelson()),
        Example::PlusInputs => {
            let plus = ComplexMatrix::projector(&chancert::tensor::gates::plus_ket());
            let states: Vec<ComplexMatrix> = (0..2)
                .map(|x| chancert::tensor::kron(&plus, &ComplexMatrix::basis_projector(&[2], x)))
                .collect();
            MatrixFile::from_inputs(&states, &states)
        }
        Example::ComputationalProtocol => MatrixFile {
            variant: Some(crate::files::Variant::Computational),
            ..MatrixFile::new(Kind::Protocol)
        },
    };
    Ok(Output { stdout: file.to_json(), code: EXIT_OK })
}
