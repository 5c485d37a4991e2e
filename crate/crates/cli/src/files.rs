//! JSON file formats shared by every command.
//!
//! Every matrix-like object is one JSON document with a `kind` tag. Complex entries are
//! written as `[re, im]` pairs, row by row.

use std::path::Path;

use chancert::correlations::{BellFunctional, ConditionalDistribution, Scenario};
use chancert::protocols::{MeasurementFamily, ProtocolSpec, QuantumStrategy};
use chancert::tensor::{ComplexMatrix, C64};
use chancert::{CertificateReport, ChoiChannel};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const FORMAT: &str = "chancert/1";

/// Rows of `[re, im]` pairs.
pub type Entries = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    State,
    Choi,
    Gram,
    Stochastic,
    PovmFamily,
    Strategy,
    Superchannel,
    Distribution,
    Functional,
    Inputs,
    Protocol,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub n_a: usize,
    pub n_b: usize,
    pub n_x: usize,
    pub n_y: usize,
}

impl From<Scenario> for ScenarioSpec {
    fn from(s: Scenario) -> Self {
        Self { n_a: s.n_a, n_b: s.n_b, n_x: s.n_x, n_y: s.n_y }
    }
}

impl From<ScenarioSpec> for Scenario {
    fn from(s: ScenarioSpec) -> Self {
        Scenario::new(s.n_a, s.n_b, s.n_x, s.n_y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    General,
    ProductInput,
    Computational,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub format: String,
    pub kind: Option<Kind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Subsystem dimensions of a square matrix or of each effect/state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_dims: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dims: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Entries>,
    /// POVM family: `effects[setting][outcome]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effects: Option<Vec<Vec<Entries>>>,
    /// Strategy measurements, acting on `alice_dims` and `bob_dims`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alice_effects: Option<Vec<Vec<Entries>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bob_effects: Option<Vec<Vec<Entries>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alice_dims: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bob_dims: Option<Vec<usize>>,
    /// Input families `ρ^x` on `(A0, R)` and `σ^y` on `(B0, S)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alice_states: Option<Vec<Entries>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bob_states: Option<Vec<Entries>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<Box<MatrixFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<Box<MatrixFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alice_channels: Option<Vec<MatrixFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bob_channels: Option<Vec<MatrixFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alice_measurement: Option<Box<MatrixFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bob_measurement: Option<Box<MatrixFile>>,
}

fn missing(field: &str, kind: &str) -> CliError {
    CliError::Input(format!("{kind} file is missing `{field}`"))
}

pub fn to_entries(m: &DMatrix<C64>) -> Entries {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn real_entries(m: &DMatrix<f64>) -> Entries {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)], 0.0]).collect()).collect()
}

pub fn from_entries(e: &Entries) -> Result<DMatrix<C64>, CliError> {
    let rows = e.len();
    let cols = e.first().map(Vec::len).unwrap_or(0);
    if rows == 0 || cols == 0 {
        return Err(CliError::Input("empty matrix".into()));
    }
    if e.iter().any(|r| r.len() != cols) {
        return Err(CliError::Input("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(rows, cols, |i, j| C64::new(e[i][j][0], e[i][j][1])))
}

fn real_from_entries(e: &Entries) -> Result<DMatrix<f64>, CliError> {
    let m = from_entries(e)?;
    if m.iter().any(|v| v.im != 0.0) {
        return Err(CliError::Input("expected real entries (imaginary parts must be 0)".into()));
    }
    Ok(m.map(|v| v.re))
}

fn square(e: &Entries, dims: Option<&Vec<usize>>) -> Result<ComplexMatrix, CliError> {
    let m = from_entries(e)?;
    let dims = dims.cloned().unwrap_or_else(|| vec![m.nrows()]);
    Ok(ComplexMatrix::square(m, dims)?)
}

impl MatrixFile {
    pub fn new(kind: Kind) -> Self {
        Self { format: FORMAT.into(), kind: Some(kind), ..Self::default() }
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Input(msg) => CliError::Input(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let file: MatrixFile = serde_json::from_str(text).map_err(|e| CliError::Input(format!("invalid JSON: {e}")))?;
        if file.format != FORMAT {
            return Err(CliError::Input(format!("unsupported format `{}` (expected `{FORMAT}`)", file.format)));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serialisable") + "\n"
    }

    pub fn kind(&self) -> Result<Kind, CliError> {
        self.kind.ok_or_else(|| CliError::Input("file has no `kind`".into()))
    }

    fn expect(&self, kinds: &[Kind]) -> Result<Kind, CliError> {
        let k = self.kind()?;
        if kinds.contains(&k) {
            Ok(k)
        } else {
            Err(CliError::Input(format!("expected a file of kind {kinds:?}, found {k:?}")))
        }
    }

    fn entries(&self, kind: &str) -> Result<&Entries, CliError> {
        self.entries.as_ref().ok_or_else(|| missing("entries", kind))
    }

    // ---- states and Gram matrices

    pub fn from_state(m: &ComplexMatrix) -> Self {
        Self { dims: Some(m.dims().to_vec()), entries: Some(to_entries(m.data())), ..Self::new(Kind::State) }
    }

    pub fn from_gram(m: &ComplexMatrix) -> Self {
        Self { kind: Some(Kind::Gram), ..Self::from_state(m) }
    }

    /// Square matrix of a `state` or `gram` file.
    pub fn square_matrix(&self) -> Result<ComplexMatrix, CliError> {
        self.expect(&[Kind::State, Kind::Gram])?;
        square(self.entries("state")?, self.dims.as_ref())
    }

    // ---- channels

    pub fn from_channel(ch: &ChoiChannel) -> Self {
        Self {
            input_dims: Some(ch.input_dims().to_vec()),
            output_dims: Some(ch.output_dims().to_vec()),
            entries: Some(to_entries(ch.choi().data())),
            ..Self::new(Kind::Choi)
        }
    }

    /// The Choi matrix with its dimensions, without checking complete positivity.
    pub fn channel_unchecked(&self) -> Result<ChoiChannel, CliError> {
        self.expect(&[Kind::Choi])?;
        let i = self.input_dims.clone().ok_or_else(|| missing("input_dims", "choi"))?;
        let o = self.output_dims.clone().ok_or_else(|| missing("output_dims", "choi"))?;
        let m = from_entries(self.entries("choi")?)?;
        Ok(ChoiChannel::new_cp_unchecked(ComplexMatrix::from_dmatrix(m), i, o)?)
    }

    pub fn channel(&self) -> Result<ChoiChannel, CliError> {
        let ch = self.channel_unchecked()?;
        Ok(ChoiChannel::new(ch.choi().clone(), ch.input_dims().to_vec(), ch.output_dims().to_vec())?)
    }

    pub fn superchannel(&self) -> Result<chancert::SuperchannelChoi, CliError> {
        self.expect(&[Kind::Superchannel])?;
        let dims = self.dims.clone().ok_or_else(|| missing("dims", "superchannel"))?;
        let dims: [usize; 4] =
            dims.try_into().map_err(|_| CliError::Input("superchannel dims must list (A0, B0, A1, B1)".into()))?;
        let m = from_entries(self.entries("superchannel")?)?;
        Ok(chancert::SuperchannelChoi::new(ComplexMatrix::from_dmatrix(m), dims)?)
    }

    // ---- stochastic matrices, distributions and functionals

    pub fn from_stochastic(s: &DMatrix<f64>, input_dims: &[usize], output_dims: &[usize]) -> Self {
        let scenario = (input_dims.len() == 2 && output_dims.len() == 2)
            .then(|| Scenario::new(output_dims[0], output_dims[1], input_dims[0], input_dims[1]).into());
        Self {
            input_dims: Some(input_dims.to_vec()),
            output_dims: Some(output_dims.to_vec()),
            scenario,
            entries: Some(real_entries(s)),
            ..Self::new(Kind::Stochastic)
        }
    }

    pub fn from_distribution(p: &ConditionalDistribution) -> Self {
        Self {
            scenario: Some(p.scenario().into()),
            entries: Some(real_entries(&p.to_stochastic())),
            ..Self::new(Kind::Distribution)
        }
    }

    pub fn from_functional(g: &BellFunctional) -> Self {
        let s = g.scenario();
        let m = DMatrix::from_fn(s.rows(), s.cols(), |r, c| {
            g.get(r / s.n_b, r % s.n_b, c / s.n_y, c % s.n_y)
        });
        Self { scenario: Some(s.into()), entries: Some(real_entries(&m)), ..Self::new(Kind::Functional) }
    }

    fn scenario_of(&self, kind: &str) -> Result<Scenario, CliError> {
        if let Some(s) = self.scenario {
            return Ok(s.into());
        }
        match (&self.input_dims, &self.output_dims) {
            (Some(i), Some(o)) if i.len() == 2 && o.len() == 2 => Ok(Scenario::new(o[0], o[1], i[0], i[1])),
            _ => Err(missing("scenario", kind)),
        }
    }

    /// A `distribution` or bipartite `stochastic` file.
    pub fn distribution(&self) -> Result<ConditionalDistribution, CliError> {
        self.expect(&[Kind::Distribution, Kind::Stochastic])?;
        let scenario = self.scenario_of("distribution")?;
        let m = real_from_entries(self.entries("distribution")?)?;
        Ok(ConditionalDistribution::from_stochastic(&m, scenario)?)
    }

    pub fn functional(&self) -> Result<BellFunctional, CliError> {
        self.expect(&[Kind::Functional])?;
        let s = self.scenario_of("functional")?;
        let m = real_from_entries(self.entries("functional")?)?;
        if m.nrows() != s.rows() || m.ncols() != s.cols() {
            return Err(CliError::Input(format!(
                "functional matrix is {}x{}, scenario needs {}x{}",
                m.nrows(),
                m.ncols(),
                s.rows(),
                s.cols()
            )));
        }
        Ok(BellFunctional::from_fn(s, |a, b, x, y| m[(a * s.n_b + b, x * s.n_y + y)]))
    }

    // ---- measurements, strategies and inputs

    pub fn from_measurements(m: &MeasurementFamily) -> Self {
        Self {
            dims: Some(m.dims().to_vec()),
            effects: Some(family_entries(m)),
            ..Self::new(Kind::PovmFamily)
        }
    }

    pub fn measurements(&self) -> Result<MeasurementFamily, CliError> {
        self.expect(&[Kind::PovmFamily])?;
        let effects = self.effects.as_ref().ok_or_else(|| missing("effects", "povm-family"))?;
        family(effects, self.dims.as_ref())
    }

    pub fn from_strategy(s: &QuantumStrategy) -> Self {
        Self {
            dims: Some(s.state.dims().to_vec()),
            entries: Some(to_entries(s.state.data())),
            alice_dims: Some(s.alice.dims().to_vec()),
            bob_dims: Some(s.bob.dims().to_vec()),
            alice_effects: Some(family_entries(&s.alice)),
            bob_effects: Some(family_entries(&s.bob)),
            ..Self::new(Kind::Strategy)
        }
    }

    pub fn strategy(&self) -> Result<QuantumStrategy, CliError> {
        self.expect(&[Kind::Strategy])?;
        let alice = family(self.alice_effects.as_ref().ok_or_else(|| missing("alice_effects", "strategy"))?, self.alice_dims.as_ref())?;
        let bob = family(self.bob_effects.as_ref().ok_or_else(|| missing("bob_effects", "strategy"))?, self.bob_dims.as_ref())?;
        let state = ComplexMatrix::from_dmatrix(from_entries(self.entries("strategy")?)?);
        Ok(QuantumStrategy::new(state, alice, bob)?)
    }

    pub fn from_inputs(alice: &[ComplexMatrix], bob: &[ComplexMatrix]) -> Self {
        Self {
            alice_states: Some(alice.iter().map(|m| to_entries(m.data())).collect()),
            bob_states: Some(bob.iter().map(|m| to_entries(m.data())).collect()),
            ..Self::new(Kind::Inputs)
        }
    }

    pub fn inputs(&self) -> Result<(Vec<ComplexMatrix>, Vec<ComplexMatrix>), CliError> {
        self.expect(&[Kind::Inputs, Kind::Protocol])?;
        let read = |list: &Option<Vec<Entries>>, field: &str| -> Result<Vec<ComplexMatrix>, CliError> {
            let list = list.as_ref().ok_or_else(|| missing(field, "inputs"))?;
            if list.is_empty() {
                return Err(CliError::Input(format!("`{field}` is empty")));
            }
            list.iter().map(|e| square(e, None)).collect()
        };
        Ok((read(&self.alice_states, "alice_states")?, read(&self.bob_states, "bob_states")?))
    }

    // ---- protocols

    /// The protocol description and the channel embedded in it, if any.
    pub fn protocol(&self) -> Result<(ProtocolSpec, Option<ChoiChannel>), CliError> {
        self.expect(&[Kind::Protocol])?;
        let variant = self.variant.ok_or_else(|| missing("variant", "protocol"))?;
        let channel = self.channel.as_ref().map(|c| c.channel()).transpose()?;
        let measurement = |m: &Option<Box<MatrixFile>>, field: &str| -> Result<MeasurementFamily, CliError> {
            m.as_ref().ok_or_else(|| missing(field, "protocol"))?.measurements()
        };
        let spec = match variant {
            Variant::Computational => ProtocolSpec::Computational,
            Variant::ProductInput => {
                let (alice_states, bob_states) = self.inputs()?;
                ProtocolSpec::ProductInput {
                    alice_states,
                    bob_states,
                    alice_measurements: measurement(&self.alice_measurement, "alice_measurement")?,
                    bob_measurements: measurement(&self.bob_measurement, "bob_measurement")?,
                }
            }
            Variant::General => {
                let state = self.state.as_ref().ok_or_else(|| missing("state", "protocol"))?.square_matrix()?;
                let channels = |list: &Option<Vec<MatrixFile>>, field: &str| -> Result<Vec<ChoiChannel>, CliError> {
                    list.as_ref().ok_or_else(|| missing(field, "protocol"))?.iter().map(MatrixFile::channel).collect()
                };
                ProtocolSpec::General {
                    state,
                    alice_channels: channels(&self.alice_channels, "alice_channels")?,
                    bob_channels: channels(&self.bob_channels, "bob_channels")?,
                    alice_measurements: measurement(&self.alice_measurement, "alice_measurement")?,
                    bob_measurements: measurement(&self.bob_measurement, "bob_measurement")?,
                }
            }
        };
        Ok((spec, channel))
    }
}

fn family_entries(m: &MeasurementFamily) -> Vec<Vec<Entries>> {
    (0..m.settings()).map(|x| m.effects(x).iter().map(|e| to_entries(e.data())).collect()).collect()
}

fn family(effects: &[Vec<Entries>], dims: Option<&Vec<usize>>) -> Result<MeasurementFamily, CliError> {
    let mut list = Vec::with_capacity(effects.len());
    for setting in effects {
        list.push(setting.iter().map(|e| square(e, dims)).collect::<Result<Vec<_>, _>>()?);
    }
    let dims = match dims {
        Some(d) => d.clone(),
        None => vec![list.first().and_then(|s| s.first()).map(|e| e.rows()).unwrap_or(0)],
    };
    Ok(MeasurementFamily::new(list, dims)?)
}

/// Machine-readable outcome of a command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub format: String,
    pub command: Vec<String>,
    pub reports: Vec<CertificateReport>,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub values: serde_json::Map<String, serde_json::Value>,
    pub seed: Option<u64>,
    pub wall_time_seconds: f64,
    pub exit_code: i32,
}

impl ReportFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialisable") + "\n"
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("invalid report: {e}")))
    }
}
