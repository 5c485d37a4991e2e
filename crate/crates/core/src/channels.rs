//! Channels as Choi matrices or Kraus lists, with CPTP, QNS and superchannel checks.
//!
//! A Choi matrix lives on `(inputs..., outputs...)`. For a bipartite channel that is
//! `(A0, B0, A1, B1)`. The Choi matrix is unnormalised, `Tr J = d_in`, and a channel
//! acts as `E(rho) = Tr_in(J (rho^T ⊗ 1))`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::report::{CertificateReport, Residual};
use crate::tensor::{herm_eig, kron, partial_trace, permute_subsystems, ComplexMatrix, C64, ZERO};

/// Eigenvalue tolerance for positivity of a Choi matrix.
pub const PSD_TOL: f64 = 1e-9;
/// Max-norm tolerance for the trace-preservation condition.
pub const TP_TOL: f64 = 1e-9;
/// Max-norm tolerance for marginal (nonsignaling) conditions.
pub const MARGINAL_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiChannel {
    j: ComplexMatrix,
    input_dims: Vec<usize>,
    output_dims: Vec<usize>,
}

fn product(d: &[usize]) -> usize {
    d.iter().product()
}

impl ChoiChannel {
    /// Builds a channel and checks that it is CPTP.
    pub fn new(j: ComplexMatrix, input_dims: Vec<usize>, output_dims: Vec<usize>) -> Result<Self> {
        let ch = Self::new_cp_unchecked(j, input_dims, output_dims)?;
        let report = ch.cptp_report();
        if !report.is_inside() {
            return Err(Error::InvalidChannel(format!(
                "min eigenvalue {:.3e}, trace-preservation residual {:.3e}",
                -report.residual("psd").unwrap_or(f64::NAN),
                report.residual("trace_preserving").unwrap_or(f64::NAN)
            )));
        }
        Ok(ch)
    }

    /// Builds a linear map from its Choi matrix, checking only the dimensions.
    pub fn new_cp_unchecked(
        j: ComplexMatrix,
        input_dims: Vec<usize>,
        output_dims: Vec<usize>,
    ) -> Result<Self> {
        let dims: Vec<usize> = input_dims.iter().chain(&output_dims).copied().collect();
        let n = product(&dims);
        if j.rows() != n || j.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix is {}x{}, expected {n}x{n} for inputs {:?} and outputs {:?}",
                j.rows(),
                j.cols(),
                input_dims,
                output_dims
            )));
        }
        let j = j.with_square_dims(dims)?;
        Ok(Self { j, input_dims, output_dims })
    }

    /// Bipartite channel on `(A0, B0) -> (A1, B1)`.
    pub fn bipartite(j: ComplexMatrix, d_a0: usize, d_b0: usize, d_a1: usize, d_b1: usize) -> Result<Self> {
        Self::new(j, vec![d_a0, d_b0], vec![d_a1, d_b1])
    }

    pub fn identity(dims: &[usize]) -> Self {
        let n = product(dims);
        let mut j = DMatrix::zeros(n * n, n * n);
        for a in 0..n {
            for b in 0..n {
                j[(a * n + a, b * n + b)] = C64::new(1.0, 0.0);
            }
        }
        let all: Vec<usize> = dims.iter().chain(dims).copied().collect();
        Self {
            j: ComplexMatrix::square(j, all).expect("dims match"),
            input_dims: dims.to_vec(),
            output_dims: dims.to_vec(),
        }
    }

    /// Unitary channel `rho -> U rho U†`.
    pub fn unitary(u: &ComplexMatrix, dims: &[usize]) -> Result<Self> {
        let k = u.clone().with_dims(dims.to_vec(), dims.to_vec())?;
        Ok(choi_from_kraus(&KrausChannel::new(vec![k], dims.to_vec(), dims.to_vec())?))
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.j
    }

    pub fn input_dims(&self) -> &[usize] {
        &self.input_dims
    }

    pub fn output_dims(&self) -> &[usize] {
        &self.output_dims
    }

    pub fn d_in(&self) -> usize {
        product(&self.input_dims)
    }

    pub fn d_out(&self) -> usize {
        product(&self.output_dims)
    }

    pub fn is_bipartite(&self) -> bool {
        self.input_dims.len() == 2 && self.output_dims.len() == 2
    }

    /// Smallest eigenvalue of J and the trace-preservation residual.
    pub fn cptp_report(&self) -> CertificateReport {
        let min_eig = match herm_eig(&self.j) {
            Ok((v, _)) => v.first().copied().unwrap_or(0.0),
            Err(_) => f64::NEG_INFINITY,
        };
        let tp = self.trace_preservation_residual();
        let mut report = CertificateReport::from_residuals(
            "cptp",
            vec![
                Residual { name: "psd".into(), value: (-min_eig).max(0.0), tolerance: PSD_TOL },
                Residual { name: "trace_preserving".into(), value: tp, tolerance: TP_TOL },
            ],
        );
        report.value = Some(min_eig);
        report
    }

    pub fn trace_preservation_residual(&self) -> f64 {
        let keep: Vec<usize> = (0..self.input_dims.len()).collect();
        let marginal = partial_trace(&self.j, &keep).expect("valid positions");
        marginal.max_abs_diff(&ComplexMatrix::identity(&self.input_dims))
    }

    /// Applies the map to an operator on the inputs.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d_in = self.d_in();
        if rho.rows() != d_in || rho.cols() != d_in {
            return Err(Error::DimensionMismatch(format!(
                "input operator is {}x{}, channel expects {d_in}x{d_in}",
                rho.rows(),
                rho.cols()
            )));
        }
        let d_out = self.d_out();
        let j = self.j.data();
        let mut out = DMatrix::zeros(d_out, d_out);
        for i in 0..d_in {
            for ip in 0..d_in {
                let r = rho.get(i, ip);
                if r == ZERO {
                    continue;
                }
                for o in 0..d_out {
                    for op in 0..d_out {
                        out[(o, op)] += j[(i * d_out + o, ip * d_out + op)] * r;
                    }
                }
            }
        }
        ComplexMatrix::square(out, self.output_dims.clone())
    }

    /// Applies `E ⊗ id` to an operator on `(inputs, ancilla)`; the result lives on
    /// `(outputs, ancilla)`.
    pub fn apply_with_ancilla(&self, x: &ComplexMatrix, ancilla_dims: &[usize]) -> Result<ComplexMatrix> {
        let d_in = self.d_in();
        let d_out = self.d_out();
        let d_r = product(ancilla_dims);
        if x.rows() != d_in * d_r || x.cols() != d_in * d_r {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, expected {}x{}",
                x.rows(),
                x.cols(),
                d_in * d_r,
                d_in * d_r
            )));
        }
        let j = self.j.data();
        let mut out = DMatrix::zeros(d_out * d_r, d_out * d_r);
        for i in 0..d_in {
            for ip in 0..d_in {
                for r in 0..d_r {
                    for rp in 0..d_r {
                        let v = x.get(i * d_r + r, ip * d_r + rp);
                        if v == ZERO {
                            continue;
                        }
                        for o in 0..d_out {
                            for op in 0..d_out {
                                out[(o * d_r + r, op * d_r + rp)] += j[(i * d_out + o, ip * d_out + op)] * v;
                            }
                        }
                    }
                }
            }
        }
        let dims: Vec<usize> = self.output_dims.iter().chain(ancilla_dims).copied().collect();
        ComplexMatrix::square(out, dims)
    }

    /// Choi matrix of `after ∘ self`.
    pub fn then(&self, after: &ChoiChannel) -> Result<ChoiChannel> {
        compose(after, self)
    }

    /// Reorders the Choi matrix so that the channel reads `(A0, B0) -> (A1, B1)` from a
    /// matrix given on `(A0, A1, B0, B1)`.
    pub fn from_party_order(
        j: &ComplexMatrix,
        d_a0: usize,
        d_a1: usize,
        d_b0: usize,
        d_b1: usize,
    ) -> Result<Self> {
        let j = j.clone().with_square_dims(vec![d_a0, d_a1, d_b0, d_b1])?;
        let permuted = permute_subsystems(&j, &[0, 2, 1, 3])?;
        Self::bipartite(permuted, d_a0, d_b0, d_a1, d_b1)
    }

    /// Choi matrix reordered to `(A0, A1, B0, B1)`.
    pub fn party_ordered_choi(&self) -> Result<ComplexMatrix> {
        self.require_bipartite()?;
        permute_subsystems(&self.j, &[0, 2, 1, 3])
    }

    fn require_bipartite(&self) -> Result<()> {
        if self.is_bipartite() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "expected a bipartite channel (A0,B0)->(A1,B1), got inputs {:?} outputs {:?}",
                self.input_dims, self.output_dims
            )))
        }
    }

    /// Product channel `E_A ⊗ E_B` on `(A0, B0) -> (A1, B1)`.
    pub fn product(a: &ChoiChannel, b: &ChoiChannel) -> Result<Self> {
        if a.input_dims.len() != 1 || b.input_dims.len() != 1 || a.output_dims.len() != 1 || b.output_dims.len() != 1 {
            return Err(Error::DimensionMismatch("product expects two single-system channels".into()));
        }
        // kron gives (A0, A1, B0, B1)
        let j = kron(&a.j, &b.j);
        let permuted = permute_subsystems(&j, &[0, 2, 1, 3])?;
        Self::new_cp_unchecked(
            permuted,
            vec![a.input_dims[0], b.input_dims[0]],
            vec![a.output_dims[0], b.output_dims[0]],
        )
    }

    /// Convex combination of channels with identical dimensions.
    pub fn mixture(weights: &[f64], channels: &[ChoiChannel]) -> Result<Self> {
        let first = channels
            .first()
            .ok_or_else(|| Error::InvalidChannel("empty mixture".into()))?;
        let mut acc = ComplexMatrix::zeros(first.j.dims());
        for (w, ch) in weights.iter().zip(channels) {
            if ch.input_dims != first.input_dims || ch.output_dims != first.output_dims {
                return Err(Error::DimensionMismatch("mixture of channels with different dims".into()));
            }
            acc = &acc + &ch.j.scale_real(*w);
        }
        Self::new_cp_unchecked(acc, first.input_dims.clone(), first.output_dims.clone())
    }
}

/// Channel given by Kraus operators, each `d_out x d_in`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    kraus: Vec<ComplexMatrix>,
    input_dims: Vec<usize>,
    output_dims: Vec<usize>,
}

impl KrausChannel {
    pub fn new(kraus: Vec<ComplexMatrix>, input_dims: Vec<usize>, output_dims: Vec<usize>) -> Result<Self> {
        let d_in = product(&input_dims);
        let d_out = product(&output_dims);
        if kraus.is_empty() {
            return Err(Error::InvalidChannel("no Kraus operators".into()));
        }
        for k in &kraus {
            if k.rows() != d_out || k.cols() != d_in {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator is {}x{}, expected {d_out}x{d_in}",
                    k.rows(),
                    k.cols()
                )));
            }
        }
        let mut sum = DMatrix::<C64>::zeros(d_in, d_in);
        for k in &kraus {
            sum += k.data().adjoint() * k.data();
        }
        let dev = (sum - DMatrix::identity(d_in, d_in)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > TP_TOL {
            return Err(Error::InvalidChannel(format!("sum of K†K deviates from identity by {dev:.3e}")));
        }
        let kraus = kraus
            .into_iter()
            .map(|k| k.with_dims(output_dims.clone(), input_dims.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { kraus, input_dims, output_dims })
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn input_dims(&self) -> &[usize] {
        &self.input_dims
    }

    pub fn output_dims(&self) -> &[usize] {
        &self.output_dims
    }

    /// `Σ K rho K†`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut out = DMatrix::zeros(product(&self.output_dims), product(&self.output_dims));
        for k in &self.kraus {
            if rho.rows() != k.cols() {
                return Err(Error::DimensionMismatch("state does not match Kraus input".into()));
            }
            out += k.data() * rho.data() * k.data().adjoint();
        }
        ComplexMatrix::square(out, self.output_dims.clone())
    }
}

/// `J = Σ_m vec(K_m) vec(K_m)†` with `vec(K)[(i, o)] = K[o, i]`.
pub fn choi_from_kraus(k: &KrausChannel) -> ChoiChannel {
    let d_in = product(&k.input_dims);
    let d_out = product(&k.output_dims);
    let n = d_in * d_out;
    let mut j = DMatrix::<C64>::zeros(n, n);
    for op in &k.kraus {
        let v = nalgebra::DVector::from_fn(n, |idx, _| op.get(idx % d_out, idx / d_out));
        j += &v * v.adjoint();
    }
    let dims: Vec<usize> = k.input_dims.iter().chain(&k.output_dims).copied().collect();
    ChoiChannel {
        j: ComplexMatrix::square(j, dims).expect("dims match"),
        input_dims: k.input_dims.clone(),
        output_dims: k.output_dims.clone(),
    }
}

/// Choi matrix of `after ∘ before`, built column by column from `|i><i'|`.
pub fn compose(after: &ChoiChannel, before: &ChoiChannel) -> Result<ChoiChannel> {
    if product(&before.output_dims) != product(&after.input_dims) {
        return Err(Error::DimensionMismatch(format!(
            "cannot chain outputs {:?} into inputs {:?}",
            before.output_dims, after.input_dims
        )));
    }
    let d_in = before.d_in();
    let d_out = after.d_out();
    let n = d_in * d_out;
    let mut j = DMatrix::<C64>::zeros(n, n);
    let mid_dims = before.output_dims.clone();
    for i in 0..d_in {
        for ip in 0..d_in {
            let unit = ComplexMatrix::matrix_unit(&before.input_dims, i, ip);
            let mid = before.apply(&unit)?.with_square_dims(mid_dims.clone())?;
            let out = after.apply(&mid)?;
            for o in 0..d_out {
                for op in 0..d_out {
                    j[(i * d_out + o, ip * d_out + op)] = out.get(o, op);
                }
            }
        }
    }
    let dims: Vec<usize> = before.input_dims.iter().chain(&after.output_dims).copied().collect();
    ChoiChannel::new_cp_unchecked(ComplexMatrix::square(j, dims)?, before.input_dims.clone(), after.output_dims.clone())
}

/// The Heisenberg-picture map `E†`, defined by `Tr(E[X] Y) = Tr(X E†[Y])`. It is CP and
/// unital; its Choi matrix lives on `(outputs, inputs)`.
pub fn adjoint(ch: &ChoiChannel) -> ChoiChannel {
    let n_in = ch.input_dims.len();
    let n_out = ch.output_dims.len();
    let perm: Vec<usize> = (n_in..n_in + n_out).chain(0..n_in).collect();
    let jt = ch.j.transpose();
    let j = permute_subsystems(&jt, &perm).expect("valid permutation");
    ChoiChannel {
        j,
        input_dims: ch.output_dims.clone(),
        output_dims: ch.input_dims.clone(),
    }
}

/// Quantum nonsignaling test: both marginal conditions within [`MARGINAL_TOL`].
pub fn is_qns(ch: &ChoiChannel) -> Result<CertificateReport> {
    ch.require_bipartite()?;
    let (b_to_a, a_to_b) = qns_residuals(ch)?;
    Ok(CertificateReport::from_residuals(
        "qns",
        vec![
            Residual { name: "no_signal_a_to_b".into(), value: b_to_a, tolerance: MARGINAL_TOL },
            Residual { name: "no_signal_b_to_a".into(), value: a_to_b, tolerance: MARGINAL_TOL },
        ],
    ))
}

/// Residuals of `J_{A0B0B1} = 1 ⊗ J_{B0B1}/d_A0` and `J_{A0A1B0} = J_{A0A1} ⊗ 1/d_B0`.
fn qns_residuals(ch: &ChoiChannel) -> Result<(f64, f64)> {
    let d = ch.j.dims().to_vec();
    let (d_a0, d_b0) = (d[0] as f64, d[1] as f64);
    let j = &ch.j;

    let lhs1 = partial_trace(j, &[0, 1, 3])?;
    let j_b = partial_trace(j, &[1, 3])?;
    let rhs1 = kron(&ComplexMatrix::identity(&[d[0]]), &j_b).scale_real(1.0 / d_a0);

    let res2 = one_way_residual(j, d_b0)?;
    Ok((lhs1.max_abs_diff(&rhs1), res2))
}

/// Residual of `J_{A0B0A1} = J_{A0A1} ⊗ 1_{B0} / d_B0`.
fn one_way_residual(j: &ComplexMatrix, d_b0: f64) -> Result<f64> {
    let d = j.dims().to_vec();
    let lhs = partial_trace(j, &[0, 1, 2])?;
    let j_a = partial_trace(j, &[0, 2])?;
    let rhs = permute_subsystems(
        &kron(&j_a, &ComplexMatrix::identity(&[d[1]])).scale_real(1.0 / d_b0),
        &[0, 2, 1],
    )?;
    Ok(lhs.max_abs_diff(&rhs))
}

/// Choi matrix of a superchannel on `(A0, B0, A1, B1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperchannelChoi {
    j: ComplexMatrix,
}

impl SuperchannelChoi {
    pub fn new(j: ComplexMatrix, dims: [usize; 4]) -> Result<Self> {
        Ok(Self { j: j.with_square_dims(dims.to_vec())? })
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.j
    }
}

/// Positivity, `J_{A0B0} = 1` and the one-way condition `J_{A0B0A1} = J_{A0A1} ⊗ 1 / d_B0`.
pub fn is_superchannel(s: &SuperchannelChoi) -> Result<CertificateReport> {
    let j = &s.j;
    let d = j.dims().to_vec();
    if d.len() != 4 {
        return Err(Error::DimensionMismatch("superchannel Choi needs four subsystems".into()));
    }
    let min_eig = herm_eig(j)?.0[0];
    let tp = partial_trace(j, &[0, 1])?.max_abs_diff(&ComplexMatrix::identity(&[d[0], d[1]]));
    let one_way = one_way_residual(j, d[1] as f64)?;
    let mut report = CertificateReport::from_residuals(
        "superchannel",
        vec![
            Residual { name: "psd".into(), value: (-min_eig).max(0.0), tolerance: PSD_TOL },
            Residual { name: "normalisation".into(), value: tp, tolerance: MARGINAL_TOL },
            Residual { name: "one_way_nonsignaling".into(), value: one_way, tolerance: MARGINAL_TOL },
        ],
    );
    report.value = Some(min_eig);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{haar_unitary, random_density, random_hermitian, random_kraus};
    use crate::tensor::gates::*;
    use crate::tensor::{I, ONE};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn depolarizing() -> ChoiChannel {
        let ks = [identity2(), pauli_x(), pauli_y(), pauli_z()]
            .iter()
            .map(|k| k.scale_real(0.5))
            .collect();
        choi_from_kraus(&KrausChannel::new(ks, vec![2], vec![2]).unwrap())
    }

    fn random_channel(rng: &mut ChaCha8Rng, d_in: &[usize], d_out: &[usize], rank: usize) -> ChoiChannel {
        choi_from_kraus(&KrausChannel::new(random_kraus(d_in, d_out, rank, rng), d_in.to_vec(), d_out.to_vec()).unwrap())
    }

    /// `Σ_j |j><j| ⊗ X (i Z)^j`.
    fn controlled_xz() -> ComplexMatrix {
        let p0 = ComplexMatrix::basis_projector(&[2], 0);
        let p1 = ComplexMatrix::basis_projector(&[2], 1);
        let izz = pauli_z().scale(I);
        &kron(&p0, &pauli_x()) + &kron(&p1, &pauli_x().matmul(&izz).unwrap())
    }

    #[test]
    fn identity_choi_is_unnormalised_max_entangled() {
        let ch = choi_from_kraus(&KrausChannel::new(vec![identity2()], vec![2], vec![2]).unwrap());
        let mut expected = ComplexMatrix::zeros(&[2, 2]);
        for (a, b) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            expected.set(a, b, ONE);
        }
        assert!(ch.choi().max_abs_diff(&expected) < 1e-15);
        assert!(ch.choi().max_abs_diff(ChoiChannel::identity(&[2]).choi()) < 1e-15);
        let marginal = partial_trace(ch.choi(), &[0]).unwrap();
        assert!(marginal.max_abs_diff(&ComplexMatrix::identity(&[2])) < 1e-15);
    }

    #[test]
    fn depolarizing_choi_is_half_identity() {
        let j = depolarizing();
        assert!(j.choi().max_abs_diff(&ComplexMatrix::identity(&[2, 2]).scale_real(0.5)) < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = random_density(&[2], &mut rng);
        let out = j.apply(&rho).unwrap();
        assert!(out.max_abs_diff(&ComplexMatrix::identity(&[2]).scale_real(0.5)) < 1e-14);
    }

    #[test]
    fn unitary_choi_is_rank_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let u = haar_unitary(3, &mut rng);
        let ch = ChoiChannel::unitary(&u, &[3]).unwrap();
        let (vals, _) = herm_eig(ch.choi()).unwrap();
        assert!((vals[8] - 3.0).abs() < 1e-10);
        assert!(vals[..8].iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn controlled_unitary_applied_to_10() {
        let u = controlled_xz();
        let ch = ChoiChannel::unitary(&u, &[2, 2]).unwrap();
        let rho = ComplexMatrix::basis_projector(&[2, 2], 2);
        let out = ch.apply(&rho).unwrap();
        let expected = rho.conjugate_by(&u).unwrap();
        assert!(out.max_abs_diff(&expected) < 1e-14);
        // X (iZ) |0> = i|1>, so the output is |11><11|
        assert!((out.get(3, 3) - ONE).norm() < 1e-14);
    }

    #[test]
    fn kraus_and_choi_application_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let ks = KrausChannel::new(random_kraus(&[3], &[2], 3, &mut rng), vec![3], vec![2]).unwrap();
            let ch = choi_from_kraus(&ks);
            assert!(ch.cptp_report().is_inside());
            let rho = random_density(&[3], &mut rng);
            let a = ch.apply(&rho).unwrap();
            let b = ks.apply(&rho).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-10);
            assert!((a.trace().re - 1.0).abs() < 1e-10);
            assert!(a.min_eigenvalue().unwrap() > -1e-9);
        }
    }

    #[test]
    fn compose_matches_sequential_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let e1 = random_channel(&mut rng, &[2], &[3], 2);
        let e2 = random_channel(&mut rng, &[3], &[2], 3);
        let c = compose(&e2, &e1).unwrap();
        assert!(c.cptp_report().is_inside());
        for _ in 0..50 {
            let rho = random_density(&[2], &mut rng);
            let direct = e2.apply(&e1.apply(&rho).unwrap()).unwrap();
            assert!(c.apply(&rho).unwrap().max_abs_diff(&direct) < 1e-10);
        }
        let id = ChoiChannel::identity(&[2]);
        let e = random_channel(&mut rng, &[2], &[2], 2);
        assert!(compose(&id, &e).unwrap().choi().max_abs_diff(e.choi()) < 1e-12);
        assert!(compose(&e, &id).unwrap().choi().max_abs_diff(e.choi()) < 1e-12);

        let u = haar_unitary(2, &mut rng);
        let cu = ChoiChannel::unitary(&u, &[2]).unwrap();
        let cud = ChoiChannel::unitary(&u.adjoint(), &[2]).unwrap();
        assert!(compose(&cu, &cud).unwrap().choi().max_abs_diff(id.choi()) < 1e-12);
    }

    #[test]
    fn adjoint_satisfies_trace_duality() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let e = random_channel(&mut rng, &[2], &[3], 2);
        let ed = adjoint(&e);
        let one = ed.apply(&ComplexMatrix::identity(&[3])).unwrap();
        assert!(one.max_abs_diff(&ComplexMatrix::identity(&[2])) < 1e-12);
        for _ in 0..50 {
            let x = random_hermitian(&[2], &mut rng);
            let y = random_hermitian(&[3], &mut rng);
            let lhs = e.apply(&x).unwrap().trace_product(&y);
            let rhs = ed.apply(&y).unwrap().trace_product(&x);
            assert!((lhs - rhs).norm() < 1e-10);
        }
        let u = haar_unitary(2, &mut rng);
        let adj_u = adjoint(&ChoiChannel::unitary(&u, &[2]).unwrap());
        let expected = ChoiChannel::unitary(&u.adjoint(), &[2]).unwrap();
        assert!(adj_u.choi().max_abs_diff(expected.choi()) < 1e-12);
        assert!(adjoint(&depolarizing()).apply(&identity2()).unwrap().max_abs_diff(&identity2()) < 1e-14);
    }

    #[test]
    fn product_channels_are_qns() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..50 {
            let a = random_channel(&mut rng, &[2], &[2], 2);
            let b = random_channel(&mut rng, &[2], &[3], 2);
            let ab = ChoiChannel::product(&a, &b).unwrap();
            assert!(ab.cptp_report().is_inside());
            assert!(is_qns(&ab).unwrap().is_inside());
        }
    }

    #[test]
    fn cnot_signals() {
        let ch = ChoiChannel::unitary(&cnot(), &[2, 2]).unwrap();
        let ch = ChoiChannel::bipartite(ch.choi().clone(), 2, 2, 2, 2).unwrap();
        let report = is_qns(&ch).unwrap();
        assert!(report.is_outside());
        // control to target, and target to control through phase kickback
        assert!(report.residual("no_signal_a_to_b").unwrap() > 0.4);
        assert!(report.residual("no_signal_b_to_a").unwrap() > 0.4);
    }

    #[test]
    fn identity_is_a_superchannel_and_random_channels_are_not() {
        let id = ChoiChannel::identity(&[2, 2]);
        let s = SuperchannelChoi::new(id.choi().clone(), [2, 2, 2, 2]).unwrap();
        assert!(is_superchannel(&s).unwrap().is_inside());

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let e = random_channel(&mut rng, &[2, 2], &[2, 2], 3);
        let s = SuperchannelChoi::new(e.choi().clone(), [2, 2, 2, 2]).unwrap();
        let report = is_superchannel(&s).unwrap();
        assert!(report.is_outside());
        assert!(report.residual("one_way_nonsignaling").unwrap() > 1e-3);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let bad = ComplexMatrix::identity(&[2, 2]);
        assert!(matches!(ChoiChannel::new(bad, vec![2], vec![2]), Err(Error::InvalidChannel(_))));
        assert!(ChoiChannel::new(ComplexMatrix::identity(&[3]), vec![2], vec![2]).is_err());
        let not_tp = vec![identity2(), identity2()];
        assert!(KrausChannel::new(not_tp, vec![2], vec![2]).is_err());
    }
}
