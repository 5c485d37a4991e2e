//! NPA outer approximations of the quantum set and entanglement negativity.
//!
//! Moment matrices use projectors `E_{a|x}` for `a < nA - 1` and `F_{b|y}` for
//! `b < nB - 1`; the last outcome of each setting is `1 - Σ` of the others. Words are
//! reduced with idempotence and same-setting orthogonality, Alice's projectors commute
//! with Bob's, and the moment matrix is taken real so that `<w> = <w†>`.

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::correlations::{is_nonsignaling, local_vertex_list, BellFunctional, ConditionalDistribution, LocalVertex, Scenario};
use crate::error::{Error, Result};
use crate::report::{CertificateReport, Verdict};
use crate::sdp::{SdpProblem, SdpSettings, SparseSym};
use crate::tensor::{herm_eig, partial_transpose, ComplexMatrix};

/// Slack on the smallest eigenvalue of the moment matrix in the membership test.
pub const NPA_SLACK: f64 = 1e-7;

type Letter = (usize, usize);

/// A monomial: Alice's letters then Bob's letters, each `(setting, outcome)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub alice: Vec<Letter>,
    pub bob: Vec<Letter>,
}

impl Word {
    fn identity() -> Self {
        Self { alice: Vec::new(), bob: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.alice.len() + self.bob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn adjoint(&self) -> Self {
        let mut alice = self.alice.clone();
        let mut bob = self.bob.clone();
        alice.reverse();
        bob.reverse();
        Self { alice, bob }
    }

    fn canonical(self) -> Self {
        let adj = self.adjoint();
        if adj < self {
            adj
        } else {
            self
        }
    }
}

/// Reduces one party's letter string; `None` when the product vanishes.
fn reduce(letters: &[Letter]) -> Option<Vec<Letter>> {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if let Some(&last) = out.last() {
            if last.0 == l.0 {
                if last.1 == l.1 {
                    continue;
                }
                return None;
            }
        }
        out.push(l);
    }
    Some(out)
}

/// `u† v`, reduced.
fn product(u: &Word, v: &Word) -> Option<Word> {
    let ua = u.adjoint();
    let alice: Vec<Letter> = ua.alice.iter().chain(&v.alice).copied().collect();
    let bob: Vec<Letter> = ua.bob.iter().chain(&v.bob).copied().collect();
    Some(Word { alice: reduce(&alice)?, bob: reduce(&bob)? })
}

/// Operator words indexing the rows of the moment matrix.
#[derive(Clone, Debug)]
pub struct MomentMatrixSpec {
    pub scenario: Scenario,
    pub level: usize,
    pub words: Vec<Word>,
    pub index: HashMap<Word, usize>,
}

impl MomentMatrixSpec {
    pub fn new(scenario: Scenario, level: usize) -> Result<Self> {
        if !(1..=2).contains(&level) {
            return Err(Error::OutOfRange(format!("NPA level {level} (supported: 1, 2)")));
        }
        let alice: Vec<Letter> =
            (0..scenario.n_x).flat_map(|x| (0..scenario.n_a - 1).map(move |a| (x, a))).collect();
        let bob: Vec<Letter> =
            (0..scenario.n_y).flat_map(|y| (0..scenario.n_b - 1).map(move |b| (y, b))).collect();
        let mut level1 = vec![Word::identity()];
        level1.extend(alice.iter().map(|&l| Word { alice: vec![l], bob: vec![] }));
        level1.extend(bob.iter().map(|&l| Word { alice: vec![], bob: vec![l] }));

        let mut words = level1.clone();
        if level == 2 {
            for u in &level1[1..] {
                for v in &level1[1..] {
                    let alice: Vec<Letter> = u.alice.iter().chain(&v.alice).copied().collect();
                    let bob: Vec<Letter> = u.bob.iter().chain(&v.bob).copied().collect();
                    // Alice letters come first, so B·A duplicates A·B
                    if !u.bob.is_empty() && !v.alice.is_empty() {
                        continue;
                    }
                    if let (Some(alice), Some(bob)) = (reduce(&alice), reduce(&bob)) {
                        let w = Word { alice, bob };
                        if w.len() == 2 && !words.contains(&w) {
                            words.push(w);
                        }
                    }
                }
            }
        }
        let index = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        Ok(Self { scenario, level, words, index })
    }

    pub fn size(&self) -> usize {
        self.words.len()
    }
}

/// Moment-matrix relaxation with the entry-to-moment map prepared once.
#[derive(Clone, Debug)]
pub struct NpaRelaxation {
    pub spec: MomentMatrixSpec,
    /// Canonical moments appearing in the matrix; index 0 is the identity.
    moments: Vec<Word>,
    moment_index: HashMap<Word, usize>,
    /// Upper-triangle positions `(i, j)` of each moment.
    positions: Vec<Vec<(usize, usize)>>,
    settings: SdpSettings,
}

impl NpaRelaxation {
    pub fn new(scenario: Scenario, level: usize) -> Result<Self> {
        if scenario.n_a < 2 || scenario.n_b < 2 {
            return Err(Error::UnsupportedDimensions("NPA needs at least two outcomes per party".into()));
        }
        let spec = MomentMatrixSpec::new(scenario, level)?;
        let n = spec.size();
        let mut moments = vec![Word::identity()];
        let mut moment_index: HashMap<Word, usize> = HashMap::from([(Word::identity(), 0)]);
        let mut positions: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
        for i in 0..n {
            for j in i..n {
                if let Some(w) = product(&spec.words[i], &spec.words[j]) {
                    let w = w.canonical();
                    let k = *moment_index.entry(w.clone()).or_insert_with(|| {
                        moments.push(w);
                        positions.push(Vec::new());
                        moments.len() - 1
                    });
                    positions[k].push((i, j));
                }
            }
        }
        Ok(Self { spec, moments, moment_index, positions, settings: SdpSettings::default() })
    }

    pub fn size(&self) -> usize {
        self.spec.size()
    }

    pub fn num_moments(&self) -> usize {
        self.moments.len()
    }

    fn moment_matrix(&self, k: usize) -> SparseSym<f64> {
        let mut s = SparseSym::new();
        for &(i, j) in &self.positions[k] {
            s.add(0, i, j, 1.0);
        }
        s
    }

    fn add_to_dense(&self, k: usize, value: f64, m: &mut DMatrix<f64>) {
        for &(i, j) in &self.positions[k] {
            m[(i, j)] += value;
            if i != j {
                m[(j, i)] += value;
            }
        }
    }

    /// `p(a,b|x,y)` as a combination of moments, `(moment index, coefficient)`.
    fn probability_expansion(&self, a: usize, b: usize, x: usize, y: usize) -> Vec<(usize, f64)> {
        let s = self.spec.scenario;
        let alice: Vec<(Option<Letter>, f64)> = if a + 1 < s.n_a {
            vec![(Some((x, a)), 1.0)]
        } else {
            std::iter::once((None, 1.0)).chain((0..s.n_a - 1).map(|a2| (Some((x, a2)), -1.0))).collect()
        };
        let bob: Vec<(Option<Letter>, f64)> = if b + 1 < s.n_b {
            vec![(Some((y, b)), 1.0)]
        } else {
            std::iter::once((None, 1.0)).chain((0..s.n_b - 1).map(|b2| (Some((y, b2)), -1.0))).collect()
        };
        let mut out = Vec::new();
        for (la, ca) in &alice {
            for (lb, cb) in &bob {
                let w = Word { alice: la.iter().copied().collect(), bob: lb.iter().copied().collect() };
                let k = self.moment_index[&w.canonical()];
                out.push((k, ca * cb));
            }
        }
        out
    }

    /// Linear objective over moments for a Bell functional: `(constant, per-moment)`.
    fn functional_in_moments(&self, gamma: &BellFunctional) -> (f64, Vec<f64>) {
        let s = self.spec.scenario;
        let mut coeffs = vec![0.0; self.moments.len()];
        for a in 0..s.n_a {
            for b in 0..s.n_b {
                for x in 0..s.n_x {
                    for y in 0..s.n_y {
                        let g = gamma.get(a, b, x, y);
                        if g == 0.0 {
                            continue;
                        }
                        for (k, c) in self.probability_expansion(a, b, x, y) {
                            coeffs[k] += g * c;
                        }
                    }
                }
            }
        }
        let constant = coeffs[0];
        coeffs[0] = 0.0;
        (constant, coeffs)
    }

    /// Upper bound on the quantum value of `gamma`.
    pub fn maximize(&self, gamma: &BellFunctional) -> Result<f64> {
        if gamma.scenario() != self.spec.scenario {
            return Err(Error::DimensionMismatch("functional and relaxation scenarios differ".into()));
        }
        let (constant, coeffs) = self.functional_in_moments(gamma);
        let n = self.size();
        let mut problem = SdpProblem::<f64>::new(vec![n]);
        self.add_to_dense(0, 1.0, &mut problem.c[0]);
        for (k, c) in coeffs.iter().enumerate().skip(1) {
            problem.add_constraint(self.moment_matrix(k).scaled(-1.0), *c);
        }
        let sol = problem.solve_with(&self.settings)?;
        if !sol.is_optimal() {
            return Err(Error::NotConverged(format!(
                "NPA level {} maximisation: gap {:.2e}, infeasibility {:.2e}/{:.2e} after {} iterations",
                self.spec.level, sol.relative_gap, sol.primal_infeasibility, sol.dual_infeasibility, sol.iterations
            )));
        }
        Ok(constant + sol.primal_objective.max(sol.dual_objective))
    }

    /// Membership test: the largest `t` with `Γ(p, y) - t 1 ⪰ 0` over the free moments `y`.
    pub fn membership(&self, p: &ConditionalDistribution) -> Result<CertificateReport> {
        let set = format!("npa{}", self.spec.level);
        let s = self.spec.scenario;
        if p.scenario() != s {
            return Err(Error::DimensionMismatch("distribution and relaxation scenarios differ".into()));
        }
        let ns = is_nonsignaling(p);
        if !ns.is_inside() {
            let worst = ns.residuals.iter().map(|r| r.value).fold(0.0, f64::max);
            return Ok(CertificateReport::new(set, Verdict::Outside)
                .with_residual("signaling", worst, crate::correlations::NS_TOL)
                .with_margin(-worst)
                .with_note("signaling distributions lie outside every NPA level"));
        }

        // fixed moments from the behaviour
        let mut fixed: HashMap<usize, f64> = HashMap::from([(0, 1.0)]);
        for x in 0..s.n_x {
            for a in 0..s.n_a - 1 {
                let v = (0..s.n_y).map(|y| p.marginal_a(a, x, y)).sum::<f64>() / s.n_y as f64;
                fixed.insert(self.moment_index[&Word { alice: vec![(x, a)], bob: vec![] }], v);
            }
        }
        for y in 0..s.n_y {
            for b in 0..s.n_b - 1 {
                let v = (0..s.n_x).map(|x| p.marginal_b(b, x, y)).sum::<f64>() / s.n_x as f64;
                fixed.insert(self.moment_index[&Word { alice: vec![], bob: vec![(y, b)] }], v);
            }
        }
        for x in 0..s.n_x {
            for y in 0..s.n_y {
                for a in 0..s.n_a - 1 {
                    for b in 0..s.n_b - 1 {
                        let w = Word { alice: vec![(x, a)], bob: vec![(y, b)] }.canonical();
                        fixed.insert(self.moment_index[&w], p.get(a, b, x, y));
                    }
                }
            }
        }

        let n = self.size();
        let mut problem = SdpProblem::<f64>::new(vec![n]);
        for (&k, &v) in &fixed {
            self.add_to_dense(k, v, &mut problem.c[0]);
        }
        for k in 0..self.moments.len() {
            if !fixed.contains_key(&k) {
                problem.add_constraint(self.moment_matrix(k).scaled(-1.0), 0.0);
            }
        }
        let mut ident = SparseSym::new();
        for i in 0..n {
            ident.add(0, i, i, 1.0);
        }
        problem.add_constraint(ident, 1.0);
        let sol = problem.solve_with(&self.settings)?;
        if !sol.is_optimal() {
            return Err(Error::NotConverged(format!(
                "NPA level {} membership: gap {:.2e} after {} iterations",
                self.spec.level, sol.relative_gap, sol.iterations
            )));
        }
        let t = sol.dual_objective;
        let verdict = if t >= -NPA_SLACK { Verdict::Inside } else { Verdict::Outside };
        Ok(CertificateReport::new(set, verdict)
            .with_residual("min_eigenvalue_deficit", (-t).max(0.0), NPA_SLACK)
            .with_value(t)
            .with_margin(t))
    }
}

impl NpaRelaxation {
    /// Membership from a local decomposition: the moment matrix of a mixture of
    /// deterministic strategies is a sum of rank-one terms, so it only has to be
    /// assembled and compared with `p`.
    pub fn membership_from_local(
        &self,
        p: &ConditionalDistribution,
        vertices: &[LocalVertex],
        weights: &[f64],
    ) -> Result<CertificateReport> {
        let set = format!("npa{}", self.spec.level);
        let s = self.spec.scenario;
        if p.scenario() != s || vertices.len() != weights.len() {
            return Err(Error::DimensionMismatch("decomposition does not match the relaxation".into()));
        }
        let n = self.size();
        let mut gamma = DMatrix::<f64>::zeros(n, n);
        let mut v = nalgebra::DVector::<f64>::zeros(n);
        for (vertex, &w) in vertices.iter().zip(weights) {
            if w <= 0.0 {
                continue;
            }
            for (i, word) in self.spec.words.iter().enumerate() {
                let alice = word.alice.iter().all(|&(x, a)| vertex.f[x] == a);
                let bob = word.bob.iter().all(|&(y, b)| vertex.g[y] == b);
                v[i] = if alice && bob { 1.0 } else { 0.0 };
            }
            gamma.ger(w, &v, &v, 1.0);
        }
        let mut deviation: f64 = 0.0;
        for a in 0..s.n_a {
            for b in 0..s.n_b {
                for x in 0..s.n_x {
                    for y in 0..s.n_y {
                        let mut value = 0.0;
                        for (k, c) in self.probability_expansion(a, b, x, y) {
                            let (i, j) = self.positions[k][0];
                            value += c * gamma[(i, j)];
                        }
                        deviation = deviation.max((value - p.get(a, b, x, y)).abs());
                    }
                }
            }
        }
        let min_eig = gamma.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        let inside = deviation <= crate::correlations::LP_FEASIBILITY_TOL && min_eig >= -NPA_SLACK;
        let verdict = if inside { Verdict::Inside } else { Verdict::Inconclusive };
        Ok(CertificateReport::new(set, verdict)
            .with_residual("moment_deviation", deviation, crate::correlations::LP_FEASIBILITY_TOL)
            .with_residual("min_eigenvalue_deficit", (-min_eig).max(0.0), NPA_SLACK)
            .with_value(min_eig)
            .with_margin(min_eig)
            .with_note("moment matrix assembled from a local decomposition"))
    }
}

pub fn npa_max(gamma: &BellFunctional, level: usize) -> Result<f64> {
    NpaRelaxation::new(gamma.scenario(), level)?.maximize(gamma)
}

pub fn npa_membership(p: &ConditionalDistribution, level: usize) -> Result<CertificateReport> {
    NpaRelaxation::new(p.scenario(), level)?.membership(p)
}

/// Sum of the absolute values of the negative eigenvalues of `rho^{T_over}`.
pub fn negativity(rho: &ComplexMatrix, over: &[usize]) -> Result<f64> {
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
        return Err(Error::InvalidChannel(format!("state has trace {tr}")));
    }
    let pt = partial_transpose(rho, over)?;
    let (vals, _) = herm_eig(&pt)?;
    Ok(vals.iter().filter(|v| **v < 0.0).fold(0.0, |acc, v| acc - v))
}

/// Negativity of the two-qubit state `D_q ∘ D'_p (|++><++|)` on an `n x n` grid,
/// indexed `[p_index][q_index]` with `p, q = i / (n - 1)`.
pub fn negativity_grid(n: usize) -> Result<Vec<Vec<f64>>> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("grid resolution {n} (need >= 2)")));
    }
    let step = 1.0 / (n - 1) as f64;
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| negativity(&crate::dephasing::dephased_plus_plus(i as f64 * step, j as f64 * step)?, &[1]))
                .collect()
        })
        .collect()
}

/// Innermost set containing a point of the `(s, t)` cross section.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    Local,
    Npa2,
    Npa1,
    Ns,
    /// Not a valid nonsignaling distribution (negative entries off the simplex).
    SignalingExcluded,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::Local => "local",
            Region::Npa2 => "npa2",
            Region::Npa1 => "npa1",
            Region::Ns => "ns",
            Region::SignalingExcluded => "signaling-excluded",
        }
    }
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Independent membership verdicts at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Memberships {
    pub local: bool,
    pub npa2: bool,
    pub npa1: bool,
    pub ns: bool,
}

impl Memberships {
    pub fn region(&self) -> Region {
        if self.local {
            Region::Local
        } else if self.npa2 {
            Region::Npa2
        } else if self.npa1 {
            Region::Npa1
        } else if self.ns {
            Region::Ns
        } else {
            Region::SignalingExcluded
        }
    }

    /// `local ⊆ npa2 ⊆ npa1 ⊆ ns` holds at this point.
    pub fn is_nested(&self) -> bool {
        (!self.local || self.npa2) && (!self.npa2 || self.npa1) && (!self.npa1 || self.ns)
    }
}

/// Reusable classifier for `P(s, t) = s R + t S + (1 - s - t) 1_4`.
pub struct CrossSection {
    level1: NpaRelaxation,
    level2: NpaRelaxation,
    vertices: Vec<LocalVertex>,
}

impl CrossSection {
    pub fn new() -> Self {
        Self {
            level1: NpaRelaxation::new(Scenario::CHSH, 1).expect("CHSH scenario"),
            level2: NpaRelaxation::new(Scenario::CHSH, 2).expect("CHSH scenario"),
            vertices: local_vertex_list(Scenario::CHSH, 16).expect("16 vertices"),
        }
    }

    /// Runs every membership test at `(s, t)`. Points whose entries leave `[0, 1]`
    /// are reported outside all four sets.
    pub fn memberships(&self, s: f64, t: f64) -> Result<Memberships> {
        let raw = crate::correlations::cross_section_point(s, t);
        let Ok(p) = ConditionalDistribution::new(Scenario::CHSH, raw.as_slice().to_vec()) else {
            return Ok(Memberships { local: false, npa2: false, npa1: false, ns: false });
        };
        let local = crate::correlations::is_local(&p)?;
        // a local decomposition settles level 2 without an SDP; fall back when it does not
        let npa2 = match &local.weights {
            Some(w) if local.is_inside() => {
                let cert = self.level2.membership_from_local(&p, &self.vertices, w)?;
                cert.is_inside() || self.level2.membership(&p)?.is_inside()
            }
            _ => self.level2.membership(&p)?.is_inside(),
        };
        Ok(Memberships {
            local: local.is_inside(),
            npa2,
            npa1: self.level1.membership(&p)?.is_inside(),
            ns: is_nonsignaling(&p).is_inside(),
        })
    }

    pub fn classify(&self, s: f64, t: f64) -> Result<Region> {
        Ok(self.memberships(s, t)?.region())
    }
}

impl Default for CrossSection {
    fn default() -> Self {
        Self::new()
    }
}

/// Grid coordinates `(s_i, t_j) = (i, j) / (n - 1)` in row-major order.
pub fn cross_section_grid(n: usize) -> Result<Vec<(f64, f64)>> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("grid resolution {n} (need >= 2)")));
    }
    let step = 1.0 / (n - 1) as f64;
    Ok((0..n).flat_map(|i| (0..n).map(move |j| (i as f64 * step, j as f64 * step))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::{anti_pr_box, identity_box, pr_box};
    use crate::tensor::{gates, kron};
    use approx::assert_abs_diff_eq;

    #[test]
    fn moment_matrix_sizes() {
        assert_eq!(MomentMatrixSpec::new(Scenario::CHSH, 1).unwrap().size(), 5);
        assert_eq!(MomentMatrixSpec::new(Scenario::CHSH, 2).unwrap().size(), 13);
        assert!(MomentMatrixSpec::new(Scenario::CHSH, 3).is_err());
    }

    #[test]
    fn word_reduction() {
        assert_eq!(reduce(&[(0, 0), (0, 0), (1, 0)]), Some(vec![(0, 0), (1, 0)]));
        assert_eq!(reduce(&[(0, 0), (0, 1)]), None);
    }

    #[test]
    fn chsh_quantum_bound() {
        let chsh = BellFunctional::chsh();
        let tsirelson = 2.0 * 2f64.sqrt();
        assert_abs_diff_eq!(npa_max(&chsh, 1).unwrap(), tsirelson, epsilon = 1e-6);
        assert_abs_diff_eq!(npa_max(&chsh, 2).unwrap(), tsirelson, epsilon = 1e-6);
        assert_abs_diff_eq!(npa_max(&BellFunctional::zero(Scenario::CHSH), 1).unwrap(), 0.0, epsilon = 1e-7);
    }

    #[test]
    fn membership_examples() {
        assert!(npa_membership(&identity_box(), 1).unwrap().is_inside());
        assert!(npa_membership(&identity_box(), 2).unwrap().is_inside());
        assert!(npa_membership(&pr_box(), 1).unwrap().is_outside());
        let ps = (1.0 + 1.0 / 2f64.sqrt()) / 2.0;
        let mix = ConditionalDistribution::combination(&[ps, 1.0 - ps], &[&pr_box(), &anti_pr_box()]).unwrap();
        let report = npa_membership(&mix, 1).unwrap();
        assert!(report.is_inside(), "{report:?}");
        assert!(report.value.unwrap().abs() < 1e-5);
    }

    #[test]
    fn negativity_examples() {
        let pp = ComplexMatrix::projector(&kron(&gates::plus_ket(), &gates::plus_ket()));
        assert!(negativity(&pp, &[1]).unwrap().abs() < 1e-12);
        let bell = ComplexMatrix::projector(&gates::phi_plus());
        assert_abs_diff_eq!(negativity(&bell, &[1]).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn cross_section_anchors() {
        let c = CrossSection::new();
        assert_eq!(c.classify(0.0, 0.0).unwrap(), Region::Local);
        assert_eq!(c.classify(1.0, 0.0).unwrap(), Region::Ns);
        assert_eq!(c.classify(0.0, 1.0).unwrap(), Region::Ns);
        assert_eq!(c.classify(1.0, 1.0).unwrap(), Region::SignalingExcluded);
        // the R–S edge point with CHSH value 2√2 sits on the quantum boundary
        let s_star = (1.0 + std::f64::consts::FRAC_1_SQRT_2) / 2.0;
        let p = crate::correlations::cross_section_point(s_star, 1.0 - s_star);
        let chsh = crate::correlations::bell_value(&BellFunctional::chsh(), &p).unwrap();
        assert_abs_diff_eq!(chsh, 2.0 * 2f64.sqrt(), epsilon = 1e-12);
        let report = npa_membership(&p, 1).unwrap();
        assert!(report.value.unwrap() >= -1e-5);
        assert!(report.value.unwrap() <= 1e-5);
        for k in 0..40 {
            let m = c.memberships(k as f64 / 40.0, 0.3).unwrap();
            assert!(m.is_nested());
        }
    }

    #[test]
    fn local_decomposition_certifies_level_two() {
        let relax = NpaRelaxation::new(Scenario::CHSH, 2).unwrap();
        let vertices = local_vertex_list(Scenario::CHSH, 16).unwrap();
        let p = crate::correlations::cross_section_point(0.2, 0.1);
        let local = crate::correlations::is_local(&p).unwrap();
        let cert = relax.membership_from_local(&p, &vertices, local.weights.as_ref().unwrap()).unwrap();
        assert!(cert.is_inside());
        assert!(relax.membership(&p).unwrap().is_inside());
        // weights for a different point do not certify this one
        let other = crate::correlations::is_local(&identity_box()).unwrap();
        let wrong = relax.membership_from_local(&p, &vertices, other.weights.as_ref().unwrap()).unwrap();
        assert!(!wrong.is_inside());
    }
}
