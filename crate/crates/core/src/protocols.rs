//! Measurement protocols that turn a bipartite channel into a conditional
//! distribution, see-saw optimisation of Bell values over measurements, the
//! measurement-device-independent LOSR test, and LOSE channels built from
//! quantum strategies.
//!
//! Subsystem orders used throughout: inputs on `(A0, R)` and `(B0, S)`, joint
//! outputs on `(A1, R, B1, S)`, measurements on `(A1, R)` and `(B1, S)`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::channels::ChoiChannel;
use crate::correlations::{bell_value, BellFunctional, ConditionalDistribution, Scenario};
use crate::dephasing::decoherent_distribution;
use crate::error::{Error, Result};
use crate::random::{haar_unitary, random_density, random_kraus, random_projective, random_pure, random_simplex};
use crate::report::{CertificateReport, Verdict};
use crate::sdp::{SdpProblem, SdpSettings, SparseSym};
use crate::tensor::{
    gates, kron, kron_all, partial_trace, permute_subsystems, unitary_completion, ComplexMatrix, C64, I, ONE, ZERO,
};
use crate::KrausChannel;

pub const EFFECT_TOL: f64 = 1e-9;
/// Required excess of `γ(p_E)` over the upper bound before certifying non-LOSR.
pub const MDI_MARGIN: f64 = 1e-7;

/// One POVM per setting, all acting on the same space.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementFamily {
    effects: Vec<Vec<ComplexMatrix>>,
    dims: Vec<usize>,
}

impl MeasurementFamily {
    pub fn new(effects: Vec<Vec<ComplexMatrix>>, dims: Vec<usize>) -> Result<Self> {
        let d: usize = dims.iter().product();
        let outcomes = effects.first().map(Vec::len).unwrap_or(0);
        if outcomes == 0 {
            return Err(Error::InvalidMeasurement("no settings or no outcomes".into()));
        }
        let mut tagged = Vec::with_capacity(effects.len());
        for (x, setting) in effects.into_iter().enumerate() {
            if setting.len() != outcomes {
                return Err(Error::InvalidMeasurement(format!(
                    "setting {x} has {} outcomes, setting 0 has {outcomes}",
                    setting.len()
                )));
            }
            let mut sum = ComplexMatrix::zeros(&dims);
            let mut list = Vec::with_capacity(outcomes);
            for (a, e) in setting.into_iter().enumerate() {
                if e.rows() != d || e.cols() != d {
                    return Err(Error::DimensionMismatch(format!(
                        "effect ({x}, {a}) is {}x{}, expected {d}x{d}",
                        e.rows(),
                        e.cols()
                    )));
                }
                let e = e.with_square_dims(dims.clone())?;
                if !e.is_hermitian(EFFECT_TOL) {
                    return Err(Error::InvalidMeasurement(format!("effect ({x}, {a}) is not Hermitian")));
                }
                let min = e.hermitian_part().min_eigenvalue()?;
                if min < -EFFECT_TOL {
                    return Err(Error::InvalidMeasurement(format!("effect ({x}, {a}) has eigenvalue {min:.3e}")));
                }
                sum = &sum + &e;
                list.push(e);
            }
            let dev = sum.max_abs_diff(&ComplexMatrix::identity(&dims));
            if dev > EFFECT_TOL {
                return Err(Error::InvalidMeasurement(format!("setting {x} sums to identity only within {dev:.3e}")));
            }
            tagged.push(list);
        }
        Ok(Self { effects: tagged, dims })
    }

    /// A single POVM used for every setting.
    pub fn single(effects: Vec<ComplexMatrix>, dims: Vec<usize>) -> Result<Self> {
        Self::new(vec![effects], dims)
    }

    /// Computational-basis projectors, the same for every setting.
    pub fn computational(dims: &[usize], settings: usize) -> Self {
        let d: usize = dims.iter().product();
        let basis: Vec<ComplexMatrix> = (0..d).map(|k| ComplexMatrix::basis_projector(dims, k)).collect();
        Self { effects: vec![basis; settings.max(1)], dims: dims.to_vec() }
    }

    pub fn settings(&self) -> usize {
        self.effects.len()
    }

    pub fn outcomes(&self) -> usize {
        self.effects[0].len()
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn effects(&self, setting: usize) -> &[ComplexMatrix] {
        &self.effects[setting]
    }

    pub fn effect(&self, setting: usize, outcome: usize) -> &ComplexMatrix {
        &self.effects[setting][outcome]
    }

    /// Effects for setting `x`; a single-setting family answers every `x`.
    fn for_setting(&self, x: usize) -> &[ComplexMatrix] {
        if self.effects.len() == 1 {
            &self.effects[0]
        } else {
            &self.effects[x]
        }
    }

    fn check_settings(&self, n: usize, who: &str) -> Result<()> {
        if self.effects.len() == 1 || self.effects.len() == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "{who} measurement has {} settings for {n} inputs",
                self.effects.len()
            )))
        }
    }

    pub fn is_projective(&self, tol: f64) -> bool {
        self.effects
            .iter()
            .flatten()
            .all(|e| e.matmul(e).map(|sq| sq.max_abs_diff(e) <= tol).unwrap_or(false))
    }
}

/// The three ways of extracting a distribution from a bipartite channel.
#[derive(Clone, Debug)]
pub enum ProtocolSpec {
    /// A shared state on (Alice's share, Bob's share) is mapped by `Λ^x` to `(A0, R)` and
    /// by `Φ^y` to `(B0, S)`; then the channel acts and local measurements follow.
    General {
        state: ComplexMatrix,
        alice_channels: Vec<ChoiChannel>,
        bob_channels: Vec<ChoiChannel>,
        alice_measurements: MeasurementFamily,
        bob_measurements: MeasurementFamily,
    },
    /// Product inputs `ρ^x` on `(A0, R)` and `σ^y` on `(B0, S)`.
    ProductInput {
        alice_states: Vec<ComplexMatrix>,
        bob_states: Vec<ComplexMatrix>,
        alice_measurements: MeasurementFamily,
        bob_measurements: MeasurementFamily,
    },
    /// Computational-basis inputs and measurements; yields the decoherent action.
    Computational,
}

fn ancilla_dim(total: usize, system: usize, what: &str) -> Result<usize> {
    if system == 0 || total % system != 0 {
        return Err(Error::DimensionMismatch(format!("{what} of dimension {total} does not factor through {system}")));
    }
    Ok(total / system)
}

/// `(E ⊗ id_RS)(ω)` for `ω` on `(A0, R, B0, S)`, returned on `(A1, R, B1, S)`.
fn apply_on_inputs(ch: &ChoiChannel, omega: &ComplexMatrix, d_r: usize, d_s: usize) -> Result<ComplexMatrix> {
    let (i, o) = (ch.input_dims(), ch.output_dims());
    let w = omega.clone().with_square_dims(vec![i[0], d_r, i[1], d_s])?;
    let w = permute_subsystems(&w, &[0, 2, 1, 3])?;
    let out = ch.apply_with_ancilla(&w, &[d_r, d_s])?.with_square_dims(vec![o[0], o[1], d_r, d_s])?;
    permute_subsystems(&out, &[0, 2, 1, 3])
}

fn born(
    outputs: &[ComplexMatrix],
    scenario: Scenario,
    alice: &MeasurementFamily,
    bob: &MeasurementFamily,
) -> Result<ConditionalDistribution> {
    let mut data = vec![0.0; scenario.len()];
    for x in 0..scenario.n_x {
        for y in 0..scenario.n_y {
            let omega = &outputs[x * scenario.n_y + y];
            for (a, m) in alice.for_setting(x).iter().enumerate() {
                for (b, n) in bob.for_setting(y).iter().enumerate() {
                    data[scenario.index(a, b, x, y)] = kron(m, n).trace_product(omega).re;
                }
            }
        }
    }
    ConditionalDistribution::new(scenario, data)
}

fn require_bipartite(ch: &ChoiChannel) -> Result<()> {
    if ch.is_bipartite() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch("protocols need a bipartite channel (A0,B0)->(A1,B1)".into()))
    }
}

/// Output states `(E ⊗ id)(ρ^x ⊗ σ^y)` on `(A1, R, B1, S)`, indexed `x * n_y + y`.
pub fn product_input_outputs(
    ch: &ChoiChannel,
    alice_states: &[ComplexMatrix],
    bob_states: &[ComplexMatrix],
) -> Result<(Vec<ComplexMatrix>, usize, usize)> {
    require_bipartite(ch)?;
    let (first_a, first_b) = match (alice_states.first(), bob_states.first()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::DimensionMismatch("empty input family".into())),
    };
    let d_r = ancilla_dim(first_a.rows(), ch.input_dims()[0], "Alice's input")?;
    let d_s = ancilla_dim(first_b.rows(), ch.input_dims()[1], "Bob's input")?;
    let mut outputs = Vec::with_capacity(alice_states.len() * bob_states.len());
    for rho in alice_states {
        for sigma in bob_states {
            if rho.rows() != first_a.rows() || sigma.rows() != first_b.rows() {
                return Err(Error::DimensionMismatch("input states of different sizes".into()));
            }
            outputs.push(apply_on_inputs(ch, &kron(rho, sigma), d_r, d_s)?);
        }
    }
    Ok((outputs, d_r, d_s))
}

fn check_measurement_dim(m: &MeasurementFamily, d: usize, who: &str) -> Result<()> {
    if m.dim() != d {
        return Err(Error::DimensionMismatch(format!("{who} measurement acts on dimension {}, expected {d}", m.dim())));
    }
    Ok(())
}

pub fn run_protocol(spec: &ProtocolSpec, ch: &ChoiChannel) -> Result<ConditionalDistribution> {
    require_bipartite(ch)?;
    let (i, o) = (ch.input_dims(), ch.output_dims());
    match spec {
        ProtocolSpec::Computational => decoherent_distribution(ch),
        ProtocolSpec::ProductInput { alice_states, bob_states, alice_measurements, bob_measurements } => {
            let (outputs, d_r, d_s) = product_input_outputs(ch, alice_states, bob_states)?;
            check_measurement_dim(alice_measurements, o[0] * d_r, "Alice's")?;
            check_measurement_dim(bob_measurements, o[1] * d_s, "Bob's")?;
            alice_measurements.check_settings(alice_states.len(), "Alice's")?;
            bob_measurements.check_settings(bob_states.len(), "Bob's")?;
            let scenario =
                Scenario::new(alice_measurements.outcomes(), bob_measurements.outcomes(), alice_states.len(), bob_states.len());
            born(&outputs, scenario, alice_measurements, bob_measurements)
        }
        ProtocolSpec::General { state, alice_channels, bob_channels, alice_measurements, bob_measurements } => {
            let (la, lb) = match (alice_channels.first(), bob_channels.first()) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(Error::DimensionMismatch("empty input channel family".into())),
            };
            let (d_alpha, d_beta) = (la.d_in(), lb.d_in());
            if state.rows() != d_alpha * d_beta {
                return Err(Error::DimensionMismatch(format!(
                    "shared state of dimension {} for shares {d_alpha} and {d_beta}",
                    state.rows()
                )));
            }
            let d_r = ancilla_dim(la.d_out(), i[0], "Alice's prepared system")?;
            let d_s = ancilla_dim(lb.d_out(), i[1], "Bob's prepared system")?;
            for c in alice_channels {
                if c.d_in() != d_alpha || c.d_out() != la.d_out() {
                    return Err(Error::DimensionMismatch("Alice's input channels differ in shape".into()));
                }
            }
            for c in bob_channels {
                if c.d_in() != d_beta || c.d_out() != lb.d_out() {
                    return Err(Error::DimensionMismatch("Bob's input channels differ in shape".into()));
                }
            }
            check_measurement_dim(alice_measurements, o[0] * d_r, "Alice's")?;
            check_measurement_dim(bob_measurements, o[1] * d_s, "Bob's")?;
            alice_measurements.check_settings(alice_channels.len(), "Alice's")?;
            bob_measurements.check_settings(bob_channels.len(), "Bob's")?;

            let rho = state.clone().with_square_dims(vec![d_alpha, d_beta])?;
            let mut outputs = Vec::with_capacity(alice_channels.len() * bob_channels.len());
            for lam in alice_channels {
                let after_a = lam.apply_with_ancilla(&rho, &[d_beta])?.with_square_dims(vec![lam.d_out(), d_beta])?;
                let swapped = permute_subsystems(&after_a, &[1, 0])?;
                for phi in bob_channels {
                    let after_b =
                        phi.apply_with_ancilla(&swapped, &[lam.d_out()])?.with_square_dims(vec![phi.d_out(), lam.d_out()])?;
                    let inputs = permute_subsystems(&after_b, &[1, 0])?;
                    outputs.push(apply_on_inputs(ch, &inputs, d_r, d_s)?);
                }
            }
            let scenario = Scenario::new(
                alice_measurements.outcomes(),
                bob_measurements.outcomes(),
                alice_channels.len(),
                bob_channels.len(),
            );
            born(&outputs, scenario, alice_measurements, bob_measurements)
        }
    }
}

/// `|φ^{ab}> = Σ_k e^{2πi bk/d} |k, k+a> / sqrt(d)`, listed with index `a * d + b`.
pub fn generalized_bell_basis(d: usize) -> Result<Vec<ComplexMatrix>> {
    if d < 2 {
        return Err(Error::OutOfRange(format!("Bell basis needs d >= 2, got {d}")));
    }
    let norm = 1.0 / (d as f64).sqrt();
    let mut basis = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let mut amps = vec![ZERO; d * d];
            for k in 0..d {
                let phase = 2.0 * std::f64::consts::PI * (b * k) as f64 / d as f64;
                amps[k * d + (k + a) % d] = C64::from_polar(norm, phase);
            }
            basis.push(ComplexMatrix::ket(&amps, &[d, d])?);
        }
    }
    Ok(basis)
}

/// Projective measurement onto the generalized Bell basis.
pub fn bell_measurement(d: usize) -> Result<MeasurementFamily> {
    let effects = generalized_bell_basis(d)?.iter().map(ComplexMatrix::projector).collect();
    MeasurementFamily::single(effects, vec![d, d])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeesawSettings {
    pub restarts: usize,
    pub max_sweeps: usize,
    pub tolerance: f64,
}

impl Default for SeesawSettings {
    fn default() -> Self {
        Self { restarts: 20, max_sweeps: 200, tolerance: 1e-9 }
    }
}

#[derive(Clone, Debug)]
pub struct SeesawResult {
    pub value: f64,
    pub alice: MeasurementFamily,
    pub bob: MeasurementFamily,
    /// False when the best restart hit the sweep cap.
    pub converged: bool,
    pub sweeps: usize,
    /// Value after each sweep of the best restart.
    pub history: Vec<f64>,
}

/// Joint states `ω_xy` flattened into the two linear maps used by the see-saw:
/// `K = Σ_xy Tr_B[(1 ⊗ N_xy) ω_xy]` and `L = Σ_xy Tr_A[(M_xy ⊗ 1) ω_xy]`.
struct JointStates {
    d_a: usize,
    d_b: usize,
    n_xy: usize,
    to_alice: DMatrix<C64>,
    to_bob: DMatrix<C64>,
}

impl JointStates {
    fn new(states: &[ComplexMatrix], d_a: usize, d_b: usize) -> Result<Self> {
        let n_xy = states.len();
        let mut to_alice = DMatrix::zeros(d_a * d_a, n_xy * d_b * d_b);
        let mut to_bob = DMatrix::zeros(d_b * d_b, n_xy * d_a * d_a);
        for (xy, w) in states.iter().enumerate() {
            if w.rows() != d_a * d_b {
                return Err(Error::DimensionMismatch(format!("joint state of size {} for {d_a}x{d_b}", w.rows())));
            }
            for al in 0..d_a {
                for be in 0..d_a {
                    for i in 0..d_b {
                        for j in 0..d_b {
                            let v = w.get(al * d_b + i, be * d_b + j);
                            to_alice[(al * d_a + be, xy * d_b * d_b + j * d_b + i)] = v;
                            to_bob[(i * d_b + j, xy * d_a * d_a + be * d_a + al)] = v;
                        }
                    }
                }
            }
        }
        Ok(Self { d_a, d_b, n_xy, to_alice, to_bob })
    }

    /// `K_a = Σ_{b,x,y} γ_{ab,xy} Tr_B[(1 ⊗ N^b) ω_xy]`.
    fn alice_operators(&self, gamma: &BellFunctional, bob: &[DMatrix<C64>]) -> Vec<DMatrix<C64>> {
        let s = gamma.scenario();
        let (d_a, d_b) = (self.d_a, self.d_b);
        (0..s.n_a)
            .map(|a| {
                let mut v = nalgebra::DVector::<C64>::zeros(self.n_xy * d_b * d_b);
                for x in 0..s.n_x {
                    for y in 0..s.n_y {
                        let off = (x * s.n_y + y) * d_b * d_b;
                        for (b, nb) in bob.iter().enumerate() {
                            let g = gamma.get(a, b, x, y);
                            if g == 0.0 {
                                continue;
                            }
                            for j in 0..d_b {
                                for i in 0..d_b {
                                    v[off + j * d_b + i] += nb[(j, i)] * g;
                                }
                            }
                        }
                    }
                }
                let k = &self.to_alice * v;
                DMatrix::from_fn(d_a, d_a, |r, c| k[r * d_a + c])
            })
            .collect()
    }

    fn bob_operators(&self, gamma: &BellFunctional, alice: &[DMatrix<C64>]) -> Vec<DMatrix<C64>> {
        let s = gamma.scenario();
        let (d_a, d_b) = (self.d_a, self.d_b);
        (0..s.n_b)
            .map(|b| {
                let mut v = nalgebra::DVector::<C64>::zeros(self.n_xy * d_a * d_a);
                for x in 0..s.n_x {
                    for y in 0..s.n_y {
                        let off = (x * s.n_y + y) * d_a * d_a;
                        for (a, ma) in alice.iter().enumerate() {
                            let g = gamma.get(a, b, x, y);
                            if g == 0.0 {
                                continue;
                            }
                            for be in 0..d_a {
                                for al in 0..d_a {
                                    v[off + be * d_a + al] += ma[(be, al)] * g;
                                }
                            }
                        }
                    }
                }
                let l = &self.to_bob * v;
                DMatrix::from_fn(d_b, d_b, |r, c| l[r * d_b + c])
            })
            .collect()
    }
}

fn objective(effects: &[DMatrix<C64>], ops: &[DMatrix<C64>]) -> f64 {
    effects.iter().zip(ops).map(|(m, k)| m.iter().zip(k.transpose().iter()).map(|(u, v)| (u * v).re).sum::<f64>()).sum()
}

fn hermitize(m: &mut DMatrix<C64>) {
    let h = (&*m + m.adjoint()) * C64::new(0.5, 0.0);
    *m = h;
}

/// POVM maximising `Σ_a Re Tr(M_a K_a)`.
fn optimal_povm(ops: &[DMatrix<C64>]) -> Result<Vec<DMatrix<C64>>> {
    let d = ops[0].nrows();
    match ops.len() {
        1 => Ok(vec![DMatrix::identity(d, d)]),
        2 => {
            let mut diff = &ops[0] - &ops[1];
            hermitize(&mut diff);
            let eig = SymmetricEigen::new(diff);
            let mut m0 = DMatrix::<C64>::zeros(d, d);
            for k in 0..d {
                if eig.eigenvalues[k] > 0.0 {
                    let v = eig.eigenvectors.column(k);
                    m0 += &v * v.adjoint();
                }
            }
            let m1 = DMatrix::identity(d, d) - &m0;
            Ok(vec![m0, m1])
        }
        n => povm_sdp(ops, n, d),
    }
}

fn povm_sdp(ops: &[DMatrix<C64>], n: usize, d: usize) -> Result<Vec<DMatrix<C64>>> {
    let mut p = SdpProblem::<C64>::new(vec![d; n]);
    for (a, k) in ops.iter().enumerate() {
        let mut c = -k.clone();
        hermitize(&mut c);
        p.c[a] = c;
    }
    for i in 0..d {
        for j in i..d {
            if i == j {
                let mut s = SparseSym::new();
                for a in 0..n {
                    s.add(a, i, i, ONE);
                }
                p.add_constraint(s, 1.0);
            } else {
                let mut re = SparseSym::new();
                let mut im = SparseSym::new();
                for a in 0..n {
                    re.add(a, i, j, C64::new(0.5, 0.0));
                    im.add(a, i, j, I * 0.5);
                }
                p.add_constraint(re, 0.0);
                p.add_constraint(im, 0.0);
            }
        }
    }
    let sol = p.solve()?;
    // clip and renormalise so the result is exactly a POVM
    let mut effects: Vec<DMatrix<C64>> = sol
        .x
        .into_iter()
        .map(|mut m| {
            hermitize(&mut m);
            let eig = SymmetricEigen::new(m);
            let vals = eig.eigenvalues.map(|v| C64::new(v.max(0.0), 0.0));
            &eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.adjoint()
        })
        .collect();
    let mut total = DMatrix::<C64>::zeros(d, d);
    for m in &effects {
        total += m;
    }
    hermitize(&mut total);
    let eig = SymmetricEigen::new(total);
    if eig.eigenvalues.iter().any(|v| *v <= 1e-12) {
        return Err(Error::NotConverged("POVM subproblem returned a singular sum".into()));
    }
    let inv_sqrt = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(|v| C64::new(1.0 / v.sqrt(), 0.0)))
        * eig.eigenvectors.adjoint();
    for m in effects.iter_mut() {
        *m = &inv_sqrt * &*m * &inv_sqrt;
        hermitize(m);
    }
    Ok(effects)
}

fn random_effects<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Vec<DMatrix<C64>> {
    random_projective(d, n, rng).into_iter().map(ComplexMatrix::into_data).collect()
}

struct Restart {
    value: f64,
    alice: Vec<DMatrix<C64>>,
    bob: Vec<DMatrix<C64>>,
    converged: bool,
    history: Vec<f64>,
}

fn seesaw_restart(
    joint: &JointStates,
    gamma: &BellFunctional,
    settings: &SeesawSettings,
    seed: u64,
) -> Result<Restart> {
    let s = gamma.scenario();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bob = random_effects(joint.d_b, s.n_b, &mut rng);
    let mut alice = optimal_povm(&joint.alice_operators(gamma, &bob))?;
    let mut value = objective(&alice, &joint.alice_operators(gamma, &bob));
    let mut history = vec![value];
    let mut converged = false;
    for _ in 0..settings.max_sweeps {
        let previous = value;
        let l = joint.bob_operators(gamma, &alice);
        let candidate = optimal_povm(&l)?;
        let v = objective(&candidate, &l);
        if v > value {
            bob = candidate;
            value = v;
        }
        let k = joint.alice_operators(gamma, &bob);
        let candidate = optimal_povm(&k)?;
        let v = objective(&candidate, &k);
        if v > value {
            alice = candidate;
            value = v;
        }
        history.push(value);
        if value - previous < settings.tolerance {
            converged = true;
            break;
        }
    }
    Ok(Restart { value, alice, bob, converged, history })
}

/// See-saw over one POVM per party maximising `Σ γ_{ab,xy} Tr[(M^a ⊗ N^b) ω_xy]`
/// for fixed joint states `ω_xy` (index `x * n_y + y`) on `d_a ⊗ d_b`.
pub fn seesaw_joint_states<R: Rng + ?Sized>(
    states: &[ComplexMatrix],
    d_a: usize,
    d_b: usize,
    gamma: &BellFunctional,
    settings: &SeesawSettings,
    rng: &mut R,
) -> Result<SeesawResult> {
    let s = gamma.scenario();
    if states.len() != s.n_x * s.n_y {
        return Err(Error::DimensionMismatch(format!(
            "{} joint states for {} x {} settings",
            states.len(),
            s.n_x,
            s.n_y
        )));
    }
    let joint = JointStates::new(states, d_a, d_b)?;
    let seeds: Vec<u64> = (0..settings.restarts.max(1)).map(|_| rng.random()).collect();
    #[cfg(feature = "parallel")]
    let runs: Vec<Result<Restart>> = seeds.par_iter().map(|&seed| seesaw_restart(&joint, gamma, settings, seed)).collect();
    #[cfg(not(feature = "parallel"))]
    let runs: Vec<Result<Restart>> = seeds.iter().map(|&seed| seesaw_restart(&joint, gamma, settings, seed)).collect();
    let mut best: Option<Restart> = None;
    for run in runs {
        let run = run?;
        if best.as_ref().is_none_or(|b| run.value > b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one restart");
    let wrap = |effects: Vec<DMatrix<C64>>, d: usize| -> Result<MeasurementFamily> {
        let list = effects.into_iter().map(|m| ComplexMatrix::square(m, vec![d])).collect::<Result<Vec<_>>>()?;
        MeasurementFamily::single(list, vec![d])
    };
    Ok(SeesawResult {
        value: best.value,
        alice: wrap(best.alice, d_a)?,
        bob: wrap(best.bob, d_b)?,
        converged: best.converged,
        sweeps: best.history.len() - 1,
        history: best.history,
    })
}

/// Lower bound on `γ_max(E)`: fixed inputs `ρ^x` on `(A0, R)` and `σ^y` on `(B0, S)`,
/// optimised over one POVM on `(A1, R)` and one on `(B1, S)`.
pub fn seesaw_gamma_max<R: Rng + ?Sized>(
    ch: &ChoiChannel,
    gamma: &BellFunctional,
    alice_inputs: &[ComplexMatrix],
    bob_inputs: &[ComplexMatrix],
    settings: &SeesawSettings,
    rng: &mut R,
) -> Result<SeesawResult> {
    let s = gamma.scenario();
    if alice_inputs.len() != s.n_x || bob_inputs.len() != s.n_y {
        return Err(Error::DimensionMismatch("number of inputs does not match the functional's settings".into()));
    }
    let (outputs, d_r, d_s) = product_input_outputs(ch, alice_inputs, bob_inputs)?;
    let o = ch.output_dims();
    seesaw_joint_states(&outputs, o[0] * d_r, o[1] * d_s, gamma, settings, rng)
}

/// The four qubit states whose Bloch vectors form a regular tetrahedron.
pub fn tetrahedral_states() -> Vec<ComplexMatrix> {
    let s = 1.0 / 3f64.sqrt();
    let vectors = [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
    let (x, y, z) = (gates::pauli_x(), gates::pauli_y(), gates::pauli_z());
    vectors
        .iter()
        .map(|v| {
            let bloch = &(&x.scale_real(v[0]) + &y.scale_real(v[1])) + &z.scale_real(v[2]);
            (&ComplexMatrix::identity(&[2]) + &bloch).scale_real(0.5)
        })
        .collect()
}

/// `d^2` pure states spanning the operators on `C^d`: tetrahedral states for `d = 2`,
/// otherwise the computational basis with `(|j> + |k>)/√2` and `(|j> + i|k>)/√2`.
pub fn spanning_states(d: usize) -> Result<Vec<ComplexMatrix>> {
    match d {
        0 | 1 => Err(Error::OutOfRange(format!("spanning states need d >= 2, got {d}"))),
        2 => Ok(tetrahedral_states()),
        _ => {
            let mut out: Vec<ComplexMatrix> = (0..d).map(|k| ComplexMatrix::basis_projector(&[d], k)).collect();
            let h = std::f64::consts::FRAC_1_SQRT_2;
            for j in 0..d {
                for k in (j + 1)..d {
                    for phase in [ONE, I] {
                        let mut amps = vec![ZERO; d];
                        amps[j] = C64::new(h, 0.0);
                        amps[k] = phase * h;
                        out.push(ComplexMatrix::projector(&ComplexMatrix::ket(&amps, &[d])?));
                    }
                }
            }
            Ok(out)
        }
    }
}

/// Products `τ_i ⊗ τ_j` of spanning states on `(A0, R)` with `d_{A0} = d_R = d`.
pub fn informationally_complete_inputs(d: usize) -> Result<Vec<ComplexMatrix>> {
    let single = spanning_states(d)?;
    let mut out = Vec::with_capacity(single.len() * single.len());
    for a in &single {
        for b in &single {
            out.push(kron(a, b));
        }
    }
    Ok(out)
}

/// Rank of the span of a family of square matrices.
pub fn operator_span_rank(states: &[ComplexMatrix]) -> usize {
    let Some(first) = states.first() else { return 0 };
    let n = first.rows() * first.cols();
    let m = DMatrix::from_fn(n, states.len(), |i, k| states[k].data()[i]);
    let sv = m.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|v| **v > 1e-10 * top.max(1.0)).count()
}

fn check_spanning(states: &[ComplexMatrix]) -> Result<usize> {
    let d = states.first().map(|s| s.rows()).unwrap_or(0);
    let rank = operator_span_rank(states);
    if rank < d * d || d == 0 {
        return Err(Error::NotSpanning { rank, needed: d * d });
    }
    Ok(d)
}

/// Upper bound on `max Σ γ Tr(M̃^a ρ^x) Tr(Ñ^b σ^y)` over product POVMs, obtained by
/// replacing `M̃^a ⊗ Ñ^b` with global effects `G_ab ⪰ 0`, `G_ab^{T_B} ⪰ 0`, `Σ G_ab = 1`.
/// The value returned is that of a dual-feasible point, so it is a valid bound even
/// when the solver stops early.
#[derive(Clone, Debug)]
pub struct PptBound {
    pub value: f64,
    pub solver_optimal: bool,
    pub iterations: usize,
    /// Shift added to the dual variable to restore exact feasibility.
    pub feasibility_shift: f64,
}

fn hermitian_basis_count(d: usize) -> usize {
    d * d
}

/// Adds `scale * B_k` for the `k`-th Hermitian basis element, optionally partially transposed.
fn add_basis(s: &mut SparseSym<C64>, block: usize, k: usize, d: usize, scale: f64, transpose_b: Option<usize>) {
    let (i, j, imaginary) = basis_entry(k, d);
    let (i, j) = match transpose_b {
        Some(db) => {
            let (p, q) = (i / db, i % db);
            let (r, t) = (j / db, j % db);
            (p * db + t, r * db + q)
        }
        None => (i, j),
    };
    let v = if imaginary { I * scale } else { C64::new(scale, 0.0) };
    s.add(block, i, j, v);
}

/// Element `k` of the basis `{E_ii} ∪ {E_ij + E_ji} ∪ {i E_ij - i E_ji}`, as `(i, j, imaginary)`.
fn basis_entry(k: usize, d: usize) -> (usize, usize, bool) {
    if k < d {
        return (k, k, false);
    }
    let off = (k - d) / 2;
    let imaginary = (k - d) % 2 == 1;
    // enumerate pairs i < j row by row
    let mut rest = off;
    for i in 0..d {
        let len = d - i - 1;
        if rest < len {
            return (i, i + 1 + rest, imaginary);
        }
        rest -= len;
    }
    unreachable!("basis index in range")
}

fn hermitian_from_params(y: &[f64], d: usize) -> DMatrix<C64> {
    let mut m = DMatrix::<C64>::zeros(d, d);
    for (k, v) in y.iter().enumerate() {
        let (i, j, imaginary) = basis_entry(k, d);
        if i == j {
            m[(i, i)] += C64::new(*v, 0.0);
        } else if imaginary {
            m[(i, j)] += I * *v;
            m[(j, i)] -= I * *v;
        } else {
            m[(i, j)] += C64::new(*v, 0.0);
            m[(j, i)] += C64::new(*v, 0.0);
        }
    }
    m
}

fn partial_transpose_b(m: &DMatrix<C64>, da: usize, db: usize) -> DMatrix<C64> {
    DMatrix::from_fn(da * db, da * db, |i, j| {
        let (p, q) = (i / db, i % db);
        let (r, t) = (j / db, j % db);
        m[(p * db + t, r * db + q)]
    })
}

fn min_eigenvalue(m: &DMatrix<C64>) -> f64 {
    let mut h = m.clone();
    hermitize(&mut h);
    SymmetricEigen::new(h).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

pub fn ppt_upper_bound(
    gamma: &BellFunctional,
    alice_inputs: &[ComplexMatrix],
    bob_inputs: &[ComplexMatrix],
) -> Result<PptBound> {
    let s = gamma.scenario();
    if alice_inputs.len() != s.n_x || bob_inputs.len() != s.n_y {
        return Err(Error::DimensionMismatch("number of inputs does not match the functional's settings".into()));
    }
    let (da, db) = (alice_inputs[0].rows(), bob_inputs[0].rows());
    let dim = da * db;
    let n_ab = s.n_a * s.n_b;
    let nh = hermitian_basis_count(dim);

    let products: Vec<DMatrix<C64>> = alice_inputs
        .iter()
        .flat_map(|r| bob_inputs.iter().map(move |q| kron(r, q).into_data()))
        .collect();
    let mut ks = Vec::with_capacity(n_ab);
    for a in 0..s.n_a {
        for b in 0..s.n_b {
            let mut k = DMatrix::<C64>::zeros(dim, dim);
            for x in 0..s.n_x {
                for y in 0..s.n_y {
                    let g = gamma.get(a, b, x, y);
                    if g != 0.0 {
                        k += &products[x * s.n_y + y] * C64::new(g, 0.0);
                    }
                }
            }
            hermitize(&mut k);
            ks.push(k);
        }
    }

    // blocks 0..n_ab hold Y - K_ab - Q_ab^{T_B}, blocks n_ab..2 n_ab hold Q_ab
    let mut p = SdpProblem::<C64>::new(vec![dim; 2 * n_ab]);
    for (ab, k) in ks.iter().enumerate() {
        p.c[ab] = -k.clone();
    }
    for k in 0..nh {
        let mut a = SparseSym::new();
        for ab in 0..n_ab {
            add_basis(&mut a, ab, k, dim, -1.0, None);
        }
        let trace = if k < dim { -1.0 } else { 0.0 };
        p.add_constraint(a, trace);
    }
    let mut groups = Vec::with_capacity(n_ab);
    for ab in 0..n_ab {
        let mut group = Vec::with_capacity(nh);
        for k in 0..nh {
            let mut a = SparseSym::new();
            add_basis(&mut a, ab, k, dim, 1.0, Some(db));
            add_basis(&mut a, n_ab + ab, k, dim, -1.0, None);
            group.push(p.add_constraint(a, 0.0));
        }
        groups.push(group);
    }
    p.decoupled_groups = groups;
    let sol = p.solve_with(&SdpSettings { tolerance: 1e-9, ..SdpSettings::default() })?;

    let y_mat = hermitian_from_params(&sol.y[..nh], dim);
    let mut shift: f64 = 0.0;
    for ab in 0..n_ab {
        let start = nh + ab * nh;
        let q = hermitian_from_params(&sol.y[start..start + nh], dim);
        let mut qh = q.clone();
        hermitize(&mut qh);
        let eig = SymmetricEigen::new(qh);
        let clipped = &eig.eigenvectors
            * DMatrix::from_diagonal(&eig.eigenvalues.map(|v| C64::new(v.max(0.0), 0.0)))
            * eig.eigenvectors.adjoint();
        let slack = &y_mat - &ks[ab] - partial_transpose_b(&clipped, da, db);
        shift = shift.max(-min_eigenvalue(&slack));
    }
    // guard against rounding in the eigenvalue computation itself
    let shift = shift.max(0.0) + 1e-12 * (1.0 + y_mat.norm());
    let value = y_mat.trace().re + dim as f64 * shift;
    Ok(PptBound { value, solver_optimal: sol.is_optimal(), iterations: sol.iterations, feasibility_shift: shift })
}

/// Fixed inputs and functional of the device-independent LOSR test; the bounds on
/// the right-hand side do not depend on the channel and are computed once.
#[derive(Clone, Debug)]
pub struct MdiSetup {
    pub gamma: BellFunctional,
    pub alice_inputs: Vec<ComplexMatrix>,
    pub bob_inputs: Vec<ComplexMatrix>,
    pub lower_bound: f64,
    pub upper_bound: PptBound,
}

impl MdiSetup {
    pub fn new<R: Rng + ?Sized>(
        gamma: BellFunctional,
        alice_inputs: Vec<ComplexMatrix>,
        bob_inputs: Vec<ComplexMatrix>,
        settings: &SeesawSettings,
        rng: &mut R,
    ) -> Result<Self> {
        let da = check_spanning(&alice_inputs)?;
        let db = check_spanning(&bob_inputs)?;
        let s = gamma.scenario();
        if s.n_a != da || s.n_b != db || s.n_x != alice_inputs.len() || s.n_y != bob_inputs.len() {
            return Err(Error::DimensionMismatch(format!(
                "functional scenario {s:?} does not match {} x {} inputs of dimensions {da}, {db}",
                alice_inputs.len(),
                bob_inputs.len()
            )));
        }
        let products: Vec<ComplexMatrix> =
            alice_inputs.iter().flat_map(|r| bob_inputs.iter().map(move |q| kron(r, q))).collect();
        let lower_bound = if gamma.is_zero() {
            0.0
        } else {
            seesaw_joint_states(&products, da, db, &gamma, settings, rng)?.value
        };
        let upper_bound = if gamma.is_zero() {
            PptBound { value: 0.0, solver_optimal: true, iterations: 0, feasibility_shift: 0.0 }
        } else {
            ppt_upper_bound(&gamma, &alice_inputs, &bob_inputs)?
        };
        Ok(Self { gamma, alice_inputs, bob_inputs, lower_bound, upper_bound })
    }

    /// Scenario with `d^2` Bell outcomes per party and the given inputs.
    pub fn scenario_for(d_a: usize, d_b: usize, n_x: usize, n_y: usize) -> Scenario {
        Scenario::new(d_a * d_a, d_b * d_b, n_x, n_y)
    }

    /// `p_E(ab|xy)` with generalized Bell measurements on `(A1, R)` and `(B1, S)`.
    pub fn distribution(&self, ch: &ChoiChannel) -> Result<ConditionalDistribution> {
        require_bipartite(ch)?;
        let (i, o) = (ch.input_dims(), ch.output_dims());
        if i[0] != o[0] || i[1] != o[1] {
            return Err(Error::UnsupportedDimensions(format!(
                "the Bell-measurement test needs equal input and output dimensions, got {i:?} -> {o:?}"
            )));
        }
        let (d_a, d_b) = (i[0], i[1]);
        if self.alice_inputs[0].rows() != d_a * d_a || self.bob_inputs[0].rows() != d_b * d_b {
            return Err(Error::UnsupportedDimensions(
                "inputs must live on (A0, R) with R of the same dimension as A0".into(),
            ));
        }
        let spec = ProtocolSpec::ProductInput {
            alice_states: self.alice_inputs.clone(),
            bob_states: self.bob_inputs.clone(),
            alice_measurements: bell_measurement(d_a)?,
            bob_measurements: bell_measurement(d_b)?,
        };
        run_protocol(&spec, ch)
    }

    pub fn test(&self, ch: &ChoiChannel) -> Result<CertificateReport> {
        let p = self.distribution(ch)?;
        let lhs = bell_value(&self.gamma, &p)?;
        let margin = lhs - self.upper_bound.value;
        let verdict = if !self.gamma.is_zero() && margin > MDI_MARGIN { Verdict::Outside } else { Verdict::Inconclusive };
        let mut report = CertificateReport::new("LOSR", verdict)
            .with_value(lhs)
            .with_margin(margin)
            .with_residual("upper_bound", self.upper_bound.value, MDI_MARGIN)
            .with_residual("seesaw_lower_bound", self.lower_bound, 0.0);
        if !self.upper_bound.solver_optimal {
            report = report.with_note("upper bound taken from a dual-feasible point before full convergence");
        }
        Ok(report)
    }
}

/// One-shot form of [`MdiSetup::test`].
pub fn mdi_losr_test<R: Rng + ?Sized>(
    ch: &ChoiChannel,
    gamma: &BellFunctional,
    alice_inputs: Vec<ComplexMatrix>,
    bob_inputs: Vec<ComplexMatrix>,
    settings: &SeesawSettings,
    rng: &mut R,
) -> Result<CertificateReport> {
    MdiSetup::new(gamma.clone(), alice_inputs, bob_inputs, settings, rng)?.test(ch)
}

/// Shared state on `(R, S)` with projective measurements on each side.
#[derive(Clone, Debug)]
pub struct QuantumStrategy {
    pub state: ComplexMatrix,
    pub alice: MeasurementFamily,
    pub bob: MeasurementFamily,
}

impl QuantumStrategy {
    pub fn new(state: ComplexMatrix, alice: MeasurementFamily, bob: MeasurementFamily) -> Result<Self> {
        let (dr, ds) = (alice.dim(), bob.dim());
        if state.rows() != dr * ds || !state.is_square() {
            return Err(Error::InvalidStrategy(format!("state of size {} for measurements on {dr} x {ds}", state.rows())));
        }
        let state = state.with_square_dims(vec![dr, ds])?;
        if (state.trace().re - 1.0).abs() > 1e-9 || state.trace().im.abs() > 1e-9 {
            return Err(Error::InvalidStrategy(format!("state trace {}", state.trace())));
        }
        if !state.is_hermitian(1e-9) || state.hermitian_part().min_eigenvalue()? < -1e-9 {
            return Err(Error::InvalidStrategy("state is not positive semidefinite".into()));
        }
        if !alice.is_projective(1e-9) || !bob.is_projective(1e-9) {
            return Err(Error::InvalidStrategy("measurements must be projective".into()));
        }
        Ok(Self { state, alice, bob })
    }

    pub fn scenario(&self) -> Scenario {
        Scenario::new(self.alice.outcomes(), self.bob.outcomes(), self.alice.settings(), self.bob.settings())
    }

    /// `p(a,b|x,y) = Tr(σ P^{a|x} ⊗ Q^{b|y})`.
    pub fn distribution(&self) -> Result<ConditionalDistribution> {
        let s = self.scenario();
        let outputs = vec![self.state.clone(); s.n_x * s.n_y];
        born(&outputs, s, &self.alice, &self.bob)
    }

    /// `φ+` with `Z`, `X` for Alice and `(Z ± X)/√2` for Bob.
    pub fn tsirelson() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (x, z) = (gates::pauli_x(), gates::pauli_z());
        let plus = (&z + &x).scale_real(h);
        let minus = (&z - &x).scale_real(h);
        let projectors = |obs: &ComplexMatrix| {
            let id = ComplexMatrix::identity(&[2]);
            vec![(&id + obs).scale_real(0.5), (&id - obs).scale_real(0.5)]
        };
        let alice = MeasurementFamily::new(vec![projectors(&z), projectors(&x)], vec![2]).expect("valid");
        let bob = MeasurementFamily::new(vec![projectors(&plus), projectors(&minus)], vec![2]).expect("valid");
        Self::new(ComplexMatrix::projector(&gates::phi_plus()), alice, bob).expect("valid strategy")
    }

    /// Random projective strategy; `separable` draws a product of random states.
    pub fn random<R: Rng + ?Sized>(scenario: Scenario, d_r: usize, d_s: usize, separable: bool, rng: &mut R) -> Self {
        let state = if separable {
            kron(&random_density(&[d_r], rng), &random_density(&[d_s], rng))
        } else {
            ComplexMatrix::projector(&random_pure(&[d_r, d_s], rng))
        };
        let alice = (0..scenario.n_x).map(|_| random_projective(d_r, scenario.n_a, rng)).collect();
        let bob = (0..scenario.n_y).map(|_| random_projective(d_s, scenario.n_b, rng)).collect();
        Self::new(
            state,
            MeasurementFamily::new(alice, vec![d_r]).expect("valid"),
            MeasurementFamily::new(bob, vec![d_s]).expect("valid"),
        )
        .expect("valid strategy")
    }
}

/// `Σ_x |x><x| ⊗ U_x` with `U_x |0>_A = Σ_a |a> ⊗ P^{a|x}`, on `(C, A, R)`.
fn controlled_dilation(m: &MeasurementFamily) -> Result<ComplexMatrix> {
    let (n_x, n_a, d) = (m.settings(), m.outcomes(), m.dim());
    let block = n_a * d;
    let mut u = ComplexMatrix::zeros(&[n_x, n_a, d]);
    for x in 0..n_x {
        let iso = DMatrix::from_fn(block, d, |row, col| m.effect(x, row / d).get(row % d, col));
        let iso = ComplexMatrix::new(iso, vec![n_a, d], vec![d])?;
        let ux = unitary_completion(&iso)?;
        for r in 0..block {
            for c in 0..block {
                u.set(x * block + r, x * block + c, ux.get(r, c));
            }
        }
    }
    Ok(u)
}

/// LOSE channel `(C, D) -> (A, B)` whose decoherent action is the strategy's distribution:
/// `E(ρ) = Tr_{CDRS}[(U ⊗ V)(ρ ⊗ |00><00| ⊗ σ)(U ⊗ V)^†]`.
pub fn lose_from_strategy(s: &QuantumStrategy) -> Result<ChoiChannel> {
    let sc = s.scenario();
    let (dr, ds) = (s.alice.dim(), s.bob.dim());
    let u = controlled_dilation(&s.alice)?;
    let v = controlled_dilation(&s.bob)?;
    // order (C, A, R, D, B, S)
    let w = kron(&u, &v).with_square_dims(vec![sc.n_x, sc.n_a, dr, sc.n_y, sc.n_b, ds])?;
    let w_adj = w.adjoint();
    let ancilla = kron(&ComplexMatrix::basis_projector(&[sc.n_a], 0), &ComplexMatrix::basis_projector(&[sc.n_b], 0));
    let d_in = sc.n_x * sc.n_y;
    let d_out = sc.n_a * sc.n_b;
    let mut j = ComplexMatrix::zeros(&[sc.n_x, sc.n_y, sc.n_a, sc.n_b]);
    for i in 0..d_in {
        for ip in 0..d_in {
            let unit = ComplexMatrix::matrix_unit(&[sc.n_x, sc.n_y], i, ip);
            // (C, D, A, B, R, S) -> (C, A, R, D, B, S)
            let input = kron_all(&[&unit, &ancilla, &s.state])
                .with_square_dims(vec![sc.n_x, sc.n_y, sc.n_a, sc.n_b, dr, ds])?;
            let input = permute_subsystems(&input, &[0, 2, 4, 1, 3, 5])?;
            let evolved = w.matmul(&input)?.matmul(&w_adj)?.with_square_dims(vec![sc.n_x, sc.n_a, dr, sc.n_y, sc.n_b, ds])?;
            let out = partial_trace(&evolved, &[1, 4])?;
            for o in 0..d_out {
                for op in 0..d_out {
                    j.set(i * d_out + o, ip * d_out + op, out.get(o, op));
                }
            }
        }
    }
    ChoiChannel::bipartite(j, sc.n_x, sc.n_y, sc.n_a, sc.n_b)
}

fn random_channel<R: Rng + ?Sized>(d_in: usize, d_out: usize, rng: &mut R) -> Result<ChoiChannel> {
    let rank = 2usize.max(d_in.div_ceil(d_out));
    let k = KrausChannel::new(random_kraus(&[d_in], &[d_out], rank, rng), vec![d_in], vec![d_out])?;
    Ok(crate::channels::choi_from_kraus(&k))
}

/// `Σ_λ p_λ E_A^λ ⊗ E_B^λ` with random factors and simplex weights; `dims` is
/// `[d_A0, d_B0, d_A1, d_B1]`.
pub fn sample_losr_with<R: Rng + ?Sized>(dims: [usize; 4], terms: usize, rng: &mut R) -> Result<ChoiChannel> {
    if terms == 0 {
        return Err(Error::OutOfRange("LOSR sample needs at least one term".into()));
    }
    let weights = random_simplex(terms, rng);
    let mut parts = Vec::with_capacity(terms);
    for _ in 0..terms {
        let a = random_channel(dims[0], dims[2], rng)?;
        let b = random_channel(dims[1], dims[3], rng)?;
        parts.push(ChoiChannel::product(&a, &b)?);
    }
    ChoiChannel::mixture(&weights, &parts)
}

pub fn sample_losr(dims: [usize; 4], terms: usize, seed: u64) -> Result<ChoiChannel> {
    sample_losr_with(dims, terms, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Random qubit POVM family with `outcomes` effects per setting on `dims`.
pub fn random_measurements<R: Rng + ?Sized>(dims: &[usize], settings: usize, outcomes: usize, rng: &mut R) -> MeasurementFamily {
    let d: usize = dims.iter().product();
    let effects = (0..settings)
        .map(|_| {
            crate::random::random_povm(d, outcomes, rng)
                .into_iter()
                .map(|e| e.with_square_dims(dims.to_vec()).expect("dims"))
                .collect()
        })
        .collect();
    MeasurementFamily::new(effects, dims.to_vec()).expect("random POVMs are valid")
}

/// A Haar-random unitary channel on `d` dimensions.
pub fn random_unitary_channel<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> ChoiChannel {
    let d: usize = dims.iter().product();
    let u = haar_unitary(d, rng).with_square_dims(dims.to_vec()).expect("dims");
    ChoiChannel::unitary(&u, dims).expect("unitary")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::{is_local, is_nonsignaling};
    use crate::quantum_bounds::npa_membership;
    use crate::random::random_density;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn bell_basis_examples() {
        let b2 = generalized_bell_basis(2).unwrap();
        assert!(b2[0].max_abs_diff(&gates::phi_plus()) < 1e-15);
        let b3 = generalized_bell_basis(3).unwrap();
        let mut sum = ComplexMatrix::zeros(&[3, 3]);
        for (i, u) in b3.iter().enumerate() {
            for (j, v) in b3.iter().enumerate() {
                let overlap = u.adjoint().matmul(v).unwrap().get(0, 0).norm();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((overlap - expected).abs() < 1e-12);
            }
            sum = &sum + &ComplexMatrix::projector(u);
        }
        assert!(sum.max_abs_diff(&ComplexMatrix::identity(&[3, 3])) < 1e-10);
        // every Bell state is maximally entangled
        for v in &b3 {
            let reduced = partial_trace(&ComplexMatrix::projector(v), &[0]).unwrap();
            assert!(reduced.max_abs_diff(&ComplexMatrix::identity(&[3]).scale_real(1.0 / 3.0)) < 1e-12);
        }
        assert!(generalized_bell_basis(1).is_err());
    }

    #[test]
    fn measurement_validation() {
        let z = MeasurementFamily::computational(&[2], 1);
        assert!(z.is_projective(1e-12));
        let bad = vec![ComplexMatrix::identity(&[2]), ComplexMatrix::identity(&[2])];
        assert!(matches!(MeasurementFamily::single(bad, vec![2]), Err(Error::InvalidMeasurement(_))));
        let mut r = rng(1);
        let m = random_measurements(&[2, 2], 3, 3, &mut r);
        assert_eq!((m.settings(), m.outcomes(), m.dim()), (3, 3, 4));
    }

    #[test]
    fn computational_variant_on_identity() {
        let p = run_protocol(&ProtocolSpec::Computational, &ChoiChannel::identity(&[2, 2])).unwrap();
        assert_eq!(p.to_stochastic(), DMatrix::identity(4, 4));
    }

    #[test]
    fn product_variant_with_computational_inputs_is_the_decoherent_action() {
        let mut r = rng(2);
        let ch = random_unitary_channel(&[2, 2], &mut r);
        let basis = |d: usize| (0..d).map(|k| ComplexMatrix::basis_projector(&[d], k)).collect::<Vec<_>>();
        let spec = ProtocolSpec::ProductInput {
            alice_states: basis(2),
            bob_states: basis(2),
            alice_measurements: MeasurementFamily::computational(&[2], 1),
            bob_measurements: MeasurementFamily::computational(&[2], 1),
        };
        let p = run_protocol(&spec, &ch).unwrap();
        let q = run_protocol(&ProtocolSpec::Computational, &ch).unwrap();
        assert!(p.max_abs_diff(&q) < 1e-12);
    }

    #[test]
    fn losr_channels_give_local_distributions() {
        let mut r = rng(3);
        for t in 0..10 {
            let ch = sample_losr_with([2, 2, 2, 2], 1 + t % 3, &mut r).unwrap();
            let spec = ProtocolSpec::ProductInput {
                alice_states: vec![random_density(&[2, 2], &mut r), random_density(&[2, 2], &mut r)],
                bob_states: vec![random_density(&[2, 2], &mut r), random_density(&[2, 2], &mut r)],
                alice_measurements: random_measurements(&[2, 2], 1, 2, &mut r),
                bob_measurements: random_measurements(&[2, 2], 1, 2, &mut r),
            };
            let p = run_protocol(&spec, &ch).unwrap();
            assert!(is_local(&p).unwrap().is_inside());
        }
    }

    #[test]
    fn general_variant_on_product_channels_is_nonsignaling() {
        let mut r = rng(4);
        for _ in 0..5 {
            let ch = ChoiChannel::product(&random_channel(2, 2, &mut r).unwrap(), &random_channel(2, 2, &mut r).unwrap())
                .unwrap();
            let spec = ProtocolSpec::General {
                state: ComplexMatrix::projector(&random_pure(&[2, 2], &mut r)),
                alice_channels: (0..2).map(|_| random_channel(2, 4, &mut r).unwrap()).collect(),
                bob_channels: (0..2).map(|_| random_channel(2, 4, &mut r).unwrap()).collect(),
                alice_measurements: random_measurements(&[4], 2, 2, &mut r),
                bob_measurements: random_measurements(&[4], 2, 2, &mut r),
            };
            let p = run_protocol(&spec, &ch).unwrap();
            assert!(is_nonsignaling(&p).is_inside());
        }
    }

    #[test]
    fn general_variant_reduces_to_product_inputs() {
        // preparation channels that discard the shared state and output fixed states
        let mut r = rng(5);
        let ch = random_unitary_channel(&[2, 2], &mut r);
        let rho: Vec<ComplexMatrix> = (0..2).map(|_| random_density(&[2, 2], &mut r)).collect();
        let sigma: Vec<ComplexMatrix> = (0..2).map(|_| random_density(&[2, 2], &mut r)).collect();
        let prepare = |out: &ComplexMatrix| {
            let j = kron(&ComplexMatrix::identity(&[1]), out);
            ChoiChannel::new(j.with_square_dims(vec![1, 4]).unwrap(), vec![1], vec![4]).unwrap()
        };
        let alice_measurements = random_measurements(&[4], 1, 2, &mut r);
        let bob_measurements = random_measurements(&[4], 1, 2, &mut r);
        let general = ProtocolSpec::General {
            state: ComplexMatrix::identity(&[1]),
            alice_channels: rho.iter().map(prepare).collect(),
            bob_channels: sigma.iter().map(prepare).collect(),
            alice_measurements: alice_measurements.clone(),
            bob_measurements: bob_measurements.clone(),
        };
        let product = ProtocolSpec::ProductInput { alice_states: rho, bob_states: sigma, alice_measurements, bob_measurements };
        let p = run_protocol(&general, &ch).unwrap();
        let q = run_protocol(&product, &ch).unwrap();
        assert!(p.max_abs_diff(&q) < 1e-12);
    }

    #[test]
    fn seesaw_on_identity_stays_local() {
        let mut r = rng(6);
        let inputs: Vec<ComplexMatrix> = (0..2).map(|_| random_density(&[2], &mut r)).collect();
        let settings = SeesawSettings { restarts: 5, ..SeesawSettings::default() };
        let res = seesaw_gamma_max(
            &ChoiChannel::identity(&[2, 2]),
            &BellFunctional::chsh(),
            &inputs,
            &inputs,
            &settings,
            &mut r,
        )
        .unwrap();
        assert!(res.value <= 2.0 + 1e-9);
        for w in res.history.windows(2) {
            assert!(w[1] >= w[0] - 1e-10);
        }
    }

    #[test]
    fn seesaw_finds_tsirelson_after_bell_gram_dephasing() {
        let g = crate::constructions::bell_gram();
        let ch = crate::dephasing::dephase_channel_memoryless(
            &ChoiChannel::identity(&[2, 2]),
            &g,
            &crate::dephasing::GramMatrix::trivial(&[2, 2]),
        )
        .unwrap();
        let plus = ComplexMatrix::projector(&gates::plus_ket());
        let inputs: Vec<ComplexMatrix> =
            (0..2).map(|x| kron(&plus, &ComplexMatrix::basis_projector(&[2], x))).collect();
        let mut r = rng(7);
        let res = seesaw_gamma_max(&ch, &BellFunctional::chsh(), &inputs, &inputs, &SeesawSettings::default(), &mut r)
            .unwrap();
        assert!(res.value >= 2.0 * 2f64.sqrt() - 1e-3, "value {}", res.value);
        assert!(res.value <= 2.0 * 2f64.sqrt() + 1e-9);
    }

    #[test]
    fn seesaw_zero_functional() {
        let mut r = rng(8);
        let inputs = vec![random_density(&[2], &mut r); 2];
        let res = seesaw_gamma_max(
            &ChoiChannel::identity(&[2, 2]),
            &BellFunctional::zero(Scenario::CHSH),
            &inputs,
            &inputs,
            &SeesawSettings { restarts: 2, ..SeesawSettings::default() },
            &mut r,
        )
        .unwrap();
        assert_eq!(res.value, 0.0);
    }

    #[test]
    fn multi_outcome_povm_step_matches_brute_force_bound() {
        // with K_a diagonal the optimum assigns each basis vector to its best outcome
        let ks: Vec<DMatrix<C64>> = [[1.0, 0.0, 2.0], [0.5, 3.0, 0.0], [0.0, 1.0, 1.5]]
            .iter()
            .map(|d| DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(3, d.iter().map(|v| C64::new(*v, 0.0)))))
            .collect();
        let m = optimal_povm(&ks).unwrap();
        assert!((objective(&m, &ks) - 6.0).abs() < 1e-6);
        let mut total = DMatrix::<C64>::zeros(3, 3);
        for e in &m {
            total += e;
            assert!(min_eigenvalue(e) > -1e-12);
        }
        assert!((total - DMatrix::identity(3, 3)).norm() < 1e-10);
    }

    #[test]
    fn tsirelson_lose_channel() {
        let s = QuantumStrategy::tsirelson();
        let chsh = BellFunctional::chsh();
        assert!((bell_value(&chsh, &s.distribution().unwrap()).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        let ch = lose_from_strategy(&s).unwrap();
        assert!(ch.cptp_report().is_inside());
        assert!(crate::channels::is_qns(&ch).unwrap().is_inside());
        let p = decoherent_distribution(&ch).unwrap();
        assert!((bell_value(&chsh, &p).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn lose_roundtrip_random_strategies() {
        let mut r = rng(9);
        for t in 0..20 {
            let s = QuantumStrategy::random(Scenario::CHSH, 2, 2, t % 2 == 0, &mut r);
            let ch = lose_from_strategy(&s).unwrap();
            let p = decoherent_distribution(&ch).unwrap();
            assert!(p.max_abs_diff(&s.distribution().unwrap()) < 1e-8);
            if t % 2 == 0 {
                assert!(is_local(&p).unwrap().is_inside());
            }
        }
    }

    #[test]
    fn deterministic_strategy_gives_classical_channel() {
        let id = ComplexMatrix::identity(&[1]);
        let zero = ComplexMatrix::zeros(&[1]);
        let alice = MeasurementFamily::new(vec![vec![id.clone(), zero.clone()], vec![zero.clone(), id.clone()]], vec![1]).unwrap();
        let bob = MeasurementFamily::new(vec![vec![zero.clone(), id.clone()], vec![zero, id.clone()]], vec![1]).unwrap();
        let s = QuantumStrategy::new(id, alice, bob).unwrap();
        let ch = lose_from_strategy(&s).unwrap();
        assert!(ch.choi().max_abs_diff(&ch.choi().diagonal_part()) < 1e-12);
        let p = decoherent_distribution(&ch).unwrap();
        let expected = ConditionalDistribution::deterministic(Scenario::CHSH, &[0, 1], &[1, 1]).unwrap();
        assert!(p.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn lose_channels_give_quantum_distributions() {
        let mut r = rng(10);
        for _ in 0..5 {
            let s = QuantumStrategy::random(Scenario::CHSH, 2, 2, false, &mut r);
            let ch = lose_from_strategy(&s).unwrap();
            let spec = ProtocolSpec::ProductInput {
                alice_states: vec![random_density(&[2, 2], &mut r), random_density(&[2, 2], &mut r)],
                bob_states: vec![random_density(&[2, 2], &mut r), random_density(&[2, 2], &mut r)],
                alice_measurements: random_measurements(&[2, 2], 1, 2, &mut r),
                bob_measurements: random_measurements(&[2, 2], 1, 2, &mut r),
            };
            let p = run_protocol(&spec, &ch).unwrap();
            assert!(npa_membership(&p, 1).unwrap().is_inside());
        }
    }

    #[test]
    fn losr_samples() {
        let one = ChoiChannel::product(&ChoiChannel::identity(&[2]), &ChoiChannel::identity(&[2])).unwrap();
        assert!(one.choi().max_abs_diff(ChoiChannel::identity(&[2, 2]).choi()) < 1e-15);
        for seed in 0..10 {
            let ch = sample_losr([2, 2, 2, 2], 3, seed).unwrap();
            assert!(ch.cptp_report().is_inside());
            assert!(crate::channels::is_qns(&ch).unwrap().is_inside());
            assert!(is_local(&decoherent_distribution(&ch).unwrap()).unwrap().is_inside());
        }
        assert_eq!(sample_losr([2, 2, 2, 2], 2, 5).unwrap(), sample_losr([2, 2, 2, 2], 2, 5).unwrap());
        assert!(sample_losr([2, 2, 2, 2], 0, 1).is_err());
    }

    #[test]
    fn spanning_families() {
        assert_eq!(operator_span_rank(&tetrahedral_states()), 4);
        assert_eq!(operator_span_rank(&spanning_states(3).unwrap()), 9);
        assert_eq!(operator_span_rank(&informationally_complete_inputs(2).unwrap()), 16);
        let short = tetrahedral_states()[..3].to_vec();
        assert!(matches!(check_spanning(&short), Err(Error::NotSpanning { rank: 3, needed: 4 })));
    }

    #[test]
    fn hermitian_basis_roundtrip() {
        let d = 4;
        for k in 0..d * d {
            let mut y = vec![0.0; d * d];
            y[k] = 1.0;
            let m = hermitian_from_params(&y, d);
            let mut s = SparseSym::<C64>::new();
            add_basis(&mut s, 0, k, d, 1.0, None);
            let mut p = SdpProblem::<C64>::new(vec![d]);
            p.c[0] = m.clone();
            p.add_constraint(s, 0.0);
            // <B_k, B_k> through the sparse representation equals |B_k|^2
            let z = p.dual_slack(&[1.0]);
            assert!(z[0].norm() < 1e-15);
        }
    }
}
