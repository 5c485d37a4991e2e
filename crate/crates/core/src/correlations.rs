//! Conditional distributions, Bell functionals, the local and nonsignaling
//! polytopes, and channel witnesses.
//!
//! A distribution `p(a,b|x,y)` is stored as a bipartite stochastic matrix with
//! rows `(a,b)` and columns `(x,y)`, flattened row-major. Bell functionals use the
//! same layout, so `bell_value` is a plain dot product.

use minilp::{ComparisonOp, OptimizationDirection, Problem, Variable};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::channels::ChoiChannel;
use crate::error::{Error, Result};
use crate::quantum_bounds;
use crate::report::{CertificateReport, Residual, Verdict};
use crate::tensor::{ComplexMatrix, C64};

pub const NORMALISATION_TOL: f64 = 1e-10;
pub const NEGATIVITY_TOL: f64 = 1e-12;
pub const NS_TOL: f64 = 1e-8;
pub const LP_FEASIBILITY_TOL: f64 = 1e-8;
pub const LP_SEPARATION_TOL: f64 = 1e-9;
pub const DEFAULT_VERTEX_CAP: usize = 1_000_000;

/// Cardinalities `(nA, nB, nX, nY)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scenario {
    pub n_a: usize,
    pub n_b: usize,
    pub n_x: usize,
    pub n_y: usize,
}

impl Scenario {
    pub const fn new(n_a: usize, n_b: usize, n_x: usize, n_y: usize) -> Self {
        Self { n_a, n_b, n_x, n_y }
    }

    pub const CHSH: Scenario = Scenario::new(2, 2, 2, 2);

    pub fn rows(&self) -> usize {
        self.n_a * self.n_b
    }

    pub fn cols(&self) -> usize {
        self.n_x * self.n_y
    }

    pub fn len(&self) -> usize {
        self.rows() * self.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, a: usize, b: usize, x: usize, y: usize) -> usize {
        (a * self.n_b + b) * self.cols() + x * self.n_y + y
    }

    /// Number of deterministic local strategies, `nA^nX * nB^nY`.
    pub fn vertex_count(&self) -> u128 {
        (self.n_a as u128).pow(self.n_x as u32) * (self.n_b as u128).pow(self.n_y as u32)
    }

    fn validate(&self) -> Result<()> {
        if self.n_a == 0 || self.n_b == 0 || self.n_x == 0 || self.n_y == 0 {
            return Err(Error::InvalidDistribution("cardinalities must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalDistribution {
    scenario: Scenario,
    data: Vec<f64>,
}

impl ConditionalDistribution {
    /// Validates normalisation per `(x,y)` and non-negativity.
    pub fn new(scenario: Scenario, data: Vec<f64>) -> Result<Self> {
        let p = Self::new_unchecked(scenario, data)?;
        p.check()?;
        Ok(p)
    }

    /// Shape check only; used for affine combinations that may leave the simplex.
    pub fn new_unchecked(scenario: Scenario, data: Vec<f64>) -> Result<Self> {
        scenario.validate()?;
        if data.len() != scenario.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} entries for scenario {:?}, expected {}",
                data.len(),
                scenario,
                scenario.len()
            )));
        }
        Ok(Self { scenario, data })
    }

    pub fn from_fn(scenario: Scenario, f: impl Fn(usize, usize, usize, usize) -> f64) -> Result<Self> {
        let mut data = vec![0.0; scenario.len()];
        for a in 0..scenario.n_a {
            for b in 0..scenario.n_b {
                for x in 0..scenario.n_x {
                    for y in 0..scenario.n_y {
                        data[scenario.index(a, b, x, y)] = f(a, b, x, y);
                    }
                }
            }
        }
        Self::new(scenario, data)
    }

    /// From a stochastic matrix with rows `(a,b)` and columns `(x,y)`.
    pub fn from_stochastic(m: &DMatrix<f64>, scenario: Scenario) -> Result<Self> {
        if m.nrows() != scenario.rows() || m.ncols() != scenario.cols() {
            return Err(Error::InvalidDistribution(format!(
                "{}x{} matrix does not fit scenario {:?}",
                m.nrows(),
                m.ncols(),
                scenario
            )));
        }
        let data = (0..m.nrows()).flat_map(|r| (0..m.ncols()).map(move |c| m[(r, c)])).collect();
        Self::new(scenario, data)
    }

    /// Deterministic box `a = f(x)`, `b = g(y)`.
    pub fn deterministic(scenario: Scenario, f: &[usize], g: &[usize]) -> Result<Self> {
        Self::from_fn(scenario, |a, b, x, y| if f[x] == a && g[y] == b { 1.0 } else { 0.0 })
    }

    fn check(&self) -> Result<()> {
        let s = self.scenario;
        if let Some(v) = self.data.iter().find(|v| **v < -NEGATIVITY_TOL || !v.is_finite()) {
            return Err(Error::InvalidDistribution(format!("entry {v} is negative or not finite")));
        }
        for x in 0..s.n_x {
            for y in 0..s.n_y {
                let total = self.column_sum(x, y);
                if (total - 1.0).abs() > NORMALISATION_TOL {
                    return Err(Error::InvalidDistribution(format!(
                        "column (x={x}, y={y}) sums to {total}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn column_sum(&self, x: usize, y: usize) -> f64 {
        let s = self.scenario;
        (0..s.n_a)
            .flat_map(|a| (0..s.n_b).map(move |b| (a, b)))
            .map(|(a, b)| self.get(a, b, x, y))
            .sum()
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.data[self.scenario.index(a, b, x, y)]
    }

    pub fn to_stochastic(&self) -> DMatrix<f64> {
        let s = self.scenario;
        DMatrix::from_row_slice(s.rows(), s.cols(), &self.data)
    }

    /// `Σ w_i p_i`; the weights may be any reals, the result is validated.
    pub fn combination(weights: &[f64], parts: &[&ConditionalDistribution]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidDistribution("empty combination".into()))?;
        let mut data = vec![0.0; first.data.len()];
        for (w, p) in weights.iter().zip(parts) {
            if p.scenario != first.scenario {
                return Err(Error::InvalidDistribution("scenarios differ".into()));
            }
            for (d, v) in data.iter_mut().zip(&p.data) {
                *d += w * v;
            }
        }
        Self::new(first.scenario, data)
    }

    /// Alice's marginal `p(a|x,y)`.
    pub fn marginal_a(&self, a: usize, x: usize, y: usize) -> f64 {
        (0..self.scenario.n_b).map(|b| self.get(a, b, x, y)).sum()
    }

    /// Bob's marginal `p(b|x,y)`.
    pub fn marginal_b(&self, b: usize, x: usize, y: usize) -> f64 {
        (0..self.scenario.n_a).map(|a| self.get(a, b, x, y)).sum()
    }

    pub fn max_abs_diff(&self, other: &ConditionalDistribution) -> f64 {
        if self.scenario != other.scenario {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// PR box `R`: `a ⊕ b = x y` with probability 1/2 each.
pub fn pr_box() -> ConditionalDistribution {
    ConditionalDistribution::from_fn(Scenario::CHSH, |a, b, x, y| if (a ^ b) == (x & y) { 0.5 } else { 0.0 })
        .expect("valid box")
}

/// Anti-PR box `S`: `a ⊕ b = x y ⊕ 1`.
pub fn anti_pr_box() -> ConditionalDistribution {
    ConditionalDistribution::from_fn(Scenario::CHSH, |a, b, x, y| if (a ^ b) != (x & y) { 0.5 } else { 0.0 })
        .expect("valid box")
}

/// Identity stochastic matrix `1_4`: `a = x`, `b = y`.
pub fn identity_box() -> ConditionalDistribution {
    ConditionalDistribution::deterministic(Scenario::CHSH, &[0, 1], &[0, 1]).expect("valid box")
}

/// `s R + t S + (1 - s - t) 1_4`, unvalidated.
pub fn cross_section_point(s: f64, t: f64) -> ConditionalDistribution {
    let (r, sb, id) = (pr_box(), anti_pr_box(), identity_box());
    let data = (0..16)
        .map(|k| s * r.data[k] + t * sb.data[k] + (1.0 - s - t) * id.data[k])
        .collect();
    ConditionalDistribution::new_unchecked(Scenario::CHSH, data).expect("shape is fixed")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellFunctional {
    scenario: Scenario,
    coefficients: Vec<f64>,
    pub local_bound: Option<f64>,
    pub quantum_bound: Option<f64>,
    pub ns_bound: Option<f64>,
}

impl BellFunctional {
    pub fn new(scenario: Scenario, coefficients: Vec<f64>) -> Result<Self> {
        scenario.validate()?;
        if coefficients.len() != scenario.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for scenario {:?}",
                coefficients.len(),
                scenario
            )));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::OutOfRange("non-finite Bell coefficient".into()));
        }
        Ok(Self { scenario, coefficients, local_bound: None, quantum_bound: None, ns_bound: None })
    }

    pub fn from_fn(scenario: Scenario, f: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let mut c = vec![0.0; scenario.len()];
        for a in 0..scenario.n_a {
            for b in 0..scenario.n_b {
                for x in 0..scenario.n_x {
                    for y in 0..scenario.n_y {
                        c[scenario.index(a, b, x, y)] = f(a, b, x, y);
                    }
                }
            }
        }
        Self::new(scenario, c).expect("shape matches")
    }

    /// `γ_{ab,xy} = (-1)^{a+b} (-1)^{xy}` with bounds 2, 2√2, 4.
    pub fn chsh() -> Self {
        let mut g = Self::from_fn(Scenario::CHSH, |a, b, x, y| {
            if (a ^ b ^ (x & y)) == 0 {
                1.0
            } else {
                -1.0
            }
        });
        g.local_bound = Some(2.0);
        g.quantum_bound = Some(2.0 * std::f64::consts::SQRT_2);
        g.ns_bound = Some(4.0);
        g
    }

    pub fn zero(scenario: Scenario) -> Self {
        Self::new(scenario, vec![0.0; scenario.len()]).expect("shape matches")
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.coefficients[self.scenario.index(a, b, x, y)]
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|c| *c == 0.0)
    }
}

pub fn bell_value(gamma: &BellFunctional, p: &ConditionalDistribution) -> Result<f64> {
    if gamma.scenario != p.scenario {
        return Err(Error::DimensionMismatch(format!(
            "functional scenario {:?} vs distribution scenario {:?}",
            gamma.scenario, p.scenario
        )));
    }
    Ok(gamma.coefficients.iter().zip(&p.data).map(|(g, v)| g * v).sum())
}

/// Nonsignaling test: each marginal is compared with its average over the other
/// party's setting.
pub fn is_nonsignaling(p: &ConditionalDistribution) -> CertificateReport {
    let (ra, rb) = signaling_residuals(p);
    CertificateReport::from_residuals(
        "ns",
        vec![
            Residual { name: "alice_marginal".into(), value: ra, tolerance: NS_TOL },
            Residual { name: "bob_marginal".into(), value: rb, tolerance: NS_TOL },
        ],
    )
}

fn signaling_residuals(p: &ConditionalDistribution) -> (f64, f64) {
    let s = p.scenario;
    let mut ra = 0.0f64;
    for a in 0..s.n_a {
        for x in 0..s.n_x {
            let vals: Vec<f64> = (0..s.n_y).map(|y| p.marginal_a(a, x, y)).collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            ra = vals.iter().fold(ra, |m, v| m.max((v - mean).abs()));
        }
    }
    let mut rb = 0.0f64;
    for b in 0..s.n_b {
        for y in 0..s.n_y {
            let vals: Vec<f64> = (0..s.n_x).map(|x| p.marginal_b(b, x, y)).collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            rb = vals.iter().fold(rb, |m, v| m.max((v - mean).abs()));
        }
    }
    (ra, rb)
}

/// A deterministic local strategy `a = f(x)`, `b = g(y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalVertex {
    pub f: Vec<usize>,
    pub g: Vec<usize>,
}

impl LocalVertex {
    pub fn to_distribution(&self, scenario: Scenario) -> ConditionalDistribution {
        ConditionalDistribution::deterministic(scenario, &self.f, &self.g).expect("valid vertex")
    }

    /// Indices into the flattened distribution where this vertex is 1.
    fn support(&self, s: Scenario) -> impl Iterator<Item = usize> + '_ {
        (0..s.n_x).flat_map(move |x| (0..s.n_y).map(move |y| s.index(self.f[x], self.g[y], x, y)))
    }
}

fn digits(mut n: usize, base: usize, len: usize) -> Vec<usize> {
    let mut d = vec![0; len];
    for k in (0..len).rev() {
        d[k] = n % base;
        n /= base;
    }
    d
}

/// All deterministic strategies, ordered lexicographically by `(f(0), ..., g(0), ...)`.
pub fn local_vertex_list(scenario: Scenario, cap: usize) -> Result<Vec<LocalVertex>> {
    scenario.validate()?;
    let count = scenario.vertex_count();
    if count > cap as u128 {
        return Err(Error::VertexCap { count, cap });
    }
    let nf = scenario.n_a.pow(scenario.n_x as u32);
    let ng = scenario.n_b.pow(scenario.n_y as u32);
    let gs: Vec<Vec<usize>> = (0..ng).map(|j| digits(j, scenario.n_b, scenario.n_y)).collect();
    let mut out = Vec::with_capacity(nf * ng);
    for i in 0..nf {
        let f = digits(i, scenario.n_a, scenario.n_x);
        for g in &gs {
            out.push(LocalVertex { f: f.clone(), g: g.clone() });
        }
    }
    Ok(out)
}

pub fn local_vertices(scenario: Scenario, cap: usize) -> Result<Vec<ConditionalDistribution>> {
    Ok(local_vertex_list(scenario, cap)?.iter().map(|v| v.to_distribution(scenario)).collect())
}

/// Exact local bound by scanning the deterministic strategies. For each `f` the best
/// `g` decouples over `y`, so the scan costs `nA^nX * nY * nB`.
pub fn max_bell_local(gamma: &BellFunctional) -> Result<f64> {
    max_bell_local_with_cap(gamma, DEFAULT_VERTEX_CAP)
}

pub fn max_bell_local_with_cap(gamma: &BellFunctional, cap: usize) -> Result<f64> {
    let s = gamma.scenario;
    let count = s.vertex_count();
    if count > cap as u128 {
        return Err(Error::VertexCap { count, cap });
    }
    let nf = s.n_a.pow(s.n_x as u32);
    let mut best = f64::NEG_INFINITY;
    for i in 0..nf {
        let f = digits(i, s.n_a, s.n_x);
        let mut total = 0.0;
        for y in 0..s.n_y {
            let mut best_b = f64::NEG_INFINITY;
            for b in 0..s.n_b {
                let v: f64 = (0..s.n_x).map(|x| gamma.get(f[x], b, x, y)).sum();
                best_b = best_b.max(v);
            }
            total += best_b;
        }
        best = best.max(total);
    }
    Ok(best)
}

fn lp_error(e: minilp::Error) -> Error {
    Error::Lp(e.to_string())
}

/// Membership in the local polytope.
///
/// The first LP looks for vertex weights reproducing `p`, minimising the L1 error.
/// When that error exceeds the feasibility tolerance a second LP looks for a
/// functional `γ ∈ [-1, 1]` maximising `γ·p - max_v γ·v`.
pub fn is_local(p: &ConditionalDistribution) -> Result<CertificateReport> {
    is_local_with_cap(p, DEFAULT_VERTEX_CAP)
}

pub fn is_local_with_cap(p: &ConditionalDistribution, cap: usize) -> Result<CertificateReport> {
    let s = p.scenario;
    let vertices = local_vertex_list(s, cap)?;
    let n = s.len();

    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let lambdas: Vec<Variable> = vertices.iter().map(|_| problem.add_var(0.0, (0.0, f64::INFINITY))).collect();
    let mut rows: Vec<Vec<(Variable, f64)>> = vec![Vec::new(); n];
    for (v, lam) in vertices.iter().zip(&lambdas) {
        for k in v.support(s) {
            rows[k].push((*lam, 1.0));
        }
    }
    for (k, mut row) in rows.into_iter().enumerate() {
        let plus = problem.add_var(1.0, (0.0, f64::INFINITY));
        let minus = problem.add_var(1.0, (0.0, f64::INFINITY));
        row.push((plus, 1.0));
        row.push((minus, -1.0));
        problem.add_constraint(row.as_slice(), ComparisonOp::Eq, p.data[k]);
    }
    let sum: Vec<(Variable, f64)> = lambdas.iter().map(|l| (*l, 1.0)).collect();
    problem.add_constraint(sum.as_slice(), ComparisonOp::Eq, 1.0);
    let solution = problem.solve().map_err(lp_error)?;

    let weights: Vec<f64> = lambdas.iter().map(|l| solution[*l].max(0.0)).collect();
    let total: f64 = weights.iter().sum();
    let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let mut recon = vec![0.0; n];
    for (v, w) in vertices.iter().zip(&weights) {
        for k in v.support(s) {
            recon[k] += w;
        }
    }
    let error = recon.iter().zip(&p.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    if error <= LP_FEASIBILITY_TOL {
        let mut report = CertificateReport::new("local", Verdict::Inside)
            .with_residual("reconstruction", error, LP_FEASIBILITY_TOL)
            .with_margin(-error);
        report.weights = Some(weights);
        return Ok(report);
    }

    let (gamma, _) = separating_functional(p, &vertices)?;
    let value = bell_value(&gamma, p)?;
    let local = max_bell_local_with_cap(&gamma, cap)?;
    let margin = value - local;
    let verdict = if margin > LP_SEPARATION_TOL { Verdict::Outside } else { Verdict::Inconclusive };
    let mut report = CertificateReport::new("local", verdict)
        .with_residual("reconstruction", error, LP_FEASIBILITY_TOL)
        .with_value(value)
        .with_margin(margin)
        .with_note(format!("separating functional: value {value:.12}, local bound {local:.12}"));
    report.functional = Some(gamma.coefficients);
    Ok(report)
}

/// `max γ·p - t` subject to `γ·v <= t` for every vertex and `|γ_k| <= 1`.
fn separating_functional(p: &ConditionalDistribution, vertices: &[LocalVertex]) -> Result<(BellFunctional, f64)> {
    let s = p.scenario;
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let gamma: Vec<Variable> = p.data.iter().map(|pk| problem.add_var(*pk, (-1.0, 1.0))).collect();
    let t = problem.add_var(-1.0, (f64::NEG_INFINITY, f64::INFINITY));
    for v in vertices {
        let mut row: Vec<(Variable, f64)> = v.support(s).map(|k| (gamma[k], 1.0)).collect();
        row.push((t, -1.0));
        problem.add_constraint(row.as_slice(), ComparisonOp::Le, 0.0);
    }
    let solution = problem.solve().map_err(lp_error)?;
    let coeffs = gamma.iter().map(|g| solution[*g]).collect();
    Ok((BellFunctional::new(s, coeffs)?, solution.objective()))
}

/// LP maximum of `γ(p)` over the nonsignaling polytope.
pub fn max_bell_ns(gamma: &BellFunctional) -> Result<f64> {
    let s = gamma.scenario;
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<Variable> = gamma.coefficients.iter().map(|g| problem.add_var(*g, (0.0, 1.0))).collect();
    let var = |a, b, x, y| vars[s.index(a, b, x, y)];
    for x in 0..s.n_x {
        for y in 0..s.n_y {
            let row: Vec<(Variable, f64)> = (0..s.n_a)
                .flat_map(|a| (0..s.n_b).map(move |b| (a, b)))
                .map(|(a, b)| (var(a, b, x, y), 1.0))
                .collect();
            problem.add_constraint(row.as_slice(), ComparisonOp::Eq, 1.0);
        }
    }
    for a in 0..s.n_a {
        for x in 0..s.n_x {
            for y in 1..s.n_y {
                let mut row: Vec<(Variable, f64)> = (0..s.n_b).map(|b| (var(a, b, x, y), 1.0)).collect();
                row.extend((0..s.n_b).map(|b| (var(a, b, x, 0), -1.0)));
                problem.add_constraint(row.as_slice(), ComparisonOp::Eq, 0.0);
            }
        }
    }
    for b in 0..s.n_b {
        for y in 0..s.n_y {
            for x in 1..s.n_x {
                let mut row: Vec<(Variable, f64)> = (0..s.n_a).map(|a| (var(a, b, x, y), 1.0)).collect();
                row.extend((0..s.n_a).map(|a| (var(a, b, 0, y), -1.0)));
                problem.add_constraint(row.as_slice(), ComparisonOp::Eq, 0.0);
            }
        }
    }
    Ok(problem.solve().map_err(lp_error)?.objective())
}

/// Set against which a witness is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessSet {
    #[serde(rename = "L")]
    Local,
    #[serde(rename = "Q")]
    Quantum,
    #[serde(rename = "NS")]
    Nonsignaling,
}

impl std::str::FromStr for WitnessSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L" | "l" | "local" => Ok(Self::Local),
            "Q" | "q" | "quantum" => Ok(Self::Quantum),
            "NS" | "ns" | "nonsignaling" => Ok(Self::Nonsignaling),
            other => Err(Error::OutOfRange(format!("unknown witness set `{other}`"))),
        }
    }
}

/// `W = γ_S/(d_A0 d_B0) 1 - Ω` on `(A0, A1, B0, B1)`, with `Ω` diagonal in `|x a y b>`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelWitness {
    pub w: ComplexMatrix,
    pub omega: ComplexMatrix,
    pub gamma_s: f64,
    pub set: WitnessSet,
    pub functional: BellFunctional,
}

/// `γ_S` is the vertex-scan local bound, the NPA level-2 bound or the NS LP bound.
pub fn build_witness(gamma: &BellFunctional, set: WitnessSet) -> Result<ChannelWitness> {
    let gamma_s = match set {
        WitnessSet::Local => max_bell_local(gamma)?,
        WitnessSet::Quantum => quantum_bounds::npa_max(gamma, 2)?,
        WitnessSet::Nonsignaling => max_bell_ns(gamma)?,
    };
    build_witness_with_bound(gamma, set, gamma_s)
}

pub fn build_witness_with_bound(gamma: &BellFunctional, set: WitnessSet, gamma_s: f64) -> Result<ChannelWitness> {
    let s = gamma.scenario;
    let dims = [s.n_x, s.n_a, s.n_y, s.n_b];
    let mut diag = vec![C64::new(0.0, 0.0); dims.iter().product()];
    for x in 0..s.n_x {
        for a in 0..s.n_a {
            for y in 0..s.n_y {
                for b in 0..s.n_b {
                    let idx = ((x * s.n_a + a) * s.n_y + y) * s.n_b + b;
                    diag[idx] = C64::new(gamma.get(a, b, x, y), 0.0);
                }
            }
        }
    }
    let omega = ComplexMatrix::diagonal(&diag, &dims)?;
    let shift = ComplexMatrix::identity(&dims).scale_real(gamma_s / (s.n_x * s.n_y) as f64);
    let w = &shift - &omega;
    Ok(ChannelWitness { w, omega, gamma_s, set, functional: gamma.clone() })
}

/// `Tr(J W)` with J reordered to `(A0, A1, B0, B1)`. Negative values certify that the
/// channel lies outside the witness set.
pub fn witness_value(w: &ChannelWitness, ch: &ChoiChannel) -> Result<f64> {
    let s = w.functional.scenario;
    if !ch.is_bipartite() || ch.input_dims() != [s.n_x, s.n_y] || ch.output_dims() != [s.n_a, s.n_b] {
        return Err(Error::DimensionMismatch(format!(
            "witness for inputs ({}, {}) and outputs ({}, {}) does not fit channel {:?} -> {:?}",
            s.n_x,
            s.n_y,
            s.n_a,
            s.n_b,
            ch.input_dims(),
            ch.output_dims()
        )));
    }
    let j = ch.party_ordered_choi()?;
    Ok(j.trace_product(&w.w).re)
}
