//! Dephasing by Schur products with Gram matrices, the parametric noise families
//! `D_q` and `D'_p`, and the decoherent action of a channel.

use nalgebra::DMatrix;

use crate::channels::{ChoiChannel, KrausChannel, SuperchannelChoi};
use crate::correlations::{ConditionalDistribution, Scenario};
use crate::error::{Error, Result};
use crate::tensor::{gates, herm_eig, kron, kron_all, schur, ComplexMatrix, C64, I, ONE};

pub const GRAM_PSD_TOL: f64 = 1e-9;
pub const GRAM_DIAGONAL_TOL: f64 = 1e-10;

/// A positive semidefinite matrix with unit diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix {
    g: ComplexMatrix,
}

impl GramMatrix {
    pub fn new(g: ComplexMatrix) -> Result<Self> {
        if !g.is_square() {
            return Err(Error::InvalidGram("not square".into()));
        }
        if let Some(k) = (0..g.rows()).find(|&k| (g.get(k, k) - ONE).norm() > GRAM_DIAGONAL_TOL) {
            return Err(Error::InvalidGram(format!("diagonal entry {k} is {}", g.get(k, k))));
        }
        let (vals, _) = herm_eig(&g).map_err(|e| Error::InvalidGram(e.to_string()))?;
        if vals[0] < -GRAM_PSD_TOL {
            return Err(Error::InvalidGram(format!("smallest eigenvalue {:.6}", vals[0])));
        }
        Ok(Self { g })
    }

    /// The identity, which dephases completely.
    pub fn complete(dims: &[usize]) -> Self {
        Self { g: ComplexMatrix::identity(dims) }
    }

    /// The all-ones matrix, which leaves everything unchanged.
    pub fn trivial(dims: &[usize]) -> Self {
        Self { g: ComplexMatrix::ones(dims) }
    }

    /// `D_q` as a Gram matrix: off-diagonal entries `1 - q`.
    pub fn uniform(dims: &[usize], q: f64) -> Result<Self> {
        check_unit_interval("q", q)?;
        let n: usize = dims.iter().product();
        let g = ComplexMatrix::from_fn(dims, |i, j| if i == j { ONE } else { C64::new(1.0 - q, 0.0) });
        debug_assert_eq!(g.rows(), n);
        Ok(Self { g })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.g.rows()
    }
}

fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) || v.is_nan() {
        return Err(Error::OutOfRange(format!("{name} = {v} is outside [0, 1]")));
    }
    Ok(())
}

/// Noise strengths for `D_q ∘ D'_p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseParams {
    pub q: f64,
    pub p: f64,
}

impl NoiseParams {
    pub fn new(q: f64, p: f64) -> Result<Self> {
        check_unit_interval("q", q)?;
        check_unit_interval("p", p)?;
        Ok(Self { q, p })
    }

    /// Coherence left between the fourth level and the others, `(1 - q)(1 - 2p)`.
    pub fn x(&self) -> f64 {
        (1.0 - self.q) * (1.0 - 2.0 * self.p)
    }
}

/// `rho ⊙ G`.
pub fn dephase_state(rho: &ComplexMatrix, g: &GramMatrix) -> Result<ComplexMatrix> {
    schur(rho, &g.g)
}

/// `D^{G_out} ∘ E ∘ D^{G_in}`, whose Choi matrix is `J ⊙ (G_in ⊗ G_out)`.
pub fn dephase_channel_memoryless(ch: &ChoiChannel, g_in: &GramMatrix, g_out: &GramMatrix) -> Result<ChoiChannel> {
    if g_in.dim() != ch.d_in() || g_out.dim() != ch.d_out() {
        return Err(Error::DimensionMismatch(format!(
            "Gram sizes {} and {} do not match channel {} -> {}",
            g_in.dim(),
            g_out.dim(),
            ch.d_in(),
            ch.d_out()
        )));
    }
    let g = kron(&g_in.g, &g_out.g);
    let j = schur(ch.choi(), &g)?;
    ChoiChannel::new_cp_unchecked(j, ch.input_dims().to_vec(), ch.output_dims().to_vec())
}

/// Local dephasing `J ⊙ (G_A0 ⊗ G_B0 ⊗ G_A1 ⊗ G_B1)` of a bipartite channel.
pub fn dephase_local(ch: &ChoiChannel, grams: [&GramMatrix; 4]) -> Result<ChoiChannel> {
    if !ch.is_bipartite() {
        return Err(Error::DimensionMismatch("local dephasing needs a bipartite channel".into()));
    }
    let dims = ch.choi().dims().to_vec();
    for (g, d) in grams.iter().zip(&dims) {
        if g.dim() != *d {
            return Err(Error::DimensionMismatch(format!("Gram of size {} for a subsystem of dimension {d}", g.dim())));
        }
    }
    let g = kron_all(&[&grams[0].g, &grams[1].g, &grams[2].g, &grams[3].g]);
    let j = schur(ch.choi(), &g)?;
    ChoiChannel::new_cp_unchecked(j, ch.input_dims().to_vec(), ch.output_dims().to_vec())
}

/// `D_q(rho) = (1 - q) rho + q diag(rho)`.
pub fn noise_dq(rho: &ComplexMatrix, q: f64) -> Result<ComplexMatrix> {
    check_unit_interval("q", q)?;
    Ok(&rho.scale_real(1.0 - q) + &rho.diagonal_part().scale_real(q))
}

/// `D'_p`: entries `(i, 3)` and `(3, i)`, `i != 3`, scaled by `1 - 2p` on a 4x4 state.
pub fn noise_dp(rho: &ComplexMatrix, p: f64) -> Result<ComplexMatrix> {
    check_unit_interval("p", p)?;
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(Error::DimensionMismatch(format!("D'_p acts on 4x4 states, got {}x{}", rho.rows(), rho.cols())));
    }
    let mut out = rho.clone();
    let f = 1.0 - 2.0 * p;
    for i in 0..3 {
        out.set(i, 3, rho.get(i, 3) * f);
        out.set(3, i, rho.get(3, i) * f);
    }
    Ok(out)
}

/// `D_q ∘ D'_p (|++><++|)` as a two-qubit state.
pub fn dephased_plus_plus(p: f64, q: f64) -> Result<ComplexMatrix> {
    let pp = ComplexMatrix::projector(&kron(&gates::plus_ket(), &gates::plus_ket()));
    noise_dq(&noise_dp(&pp, p)?, q)
}

/// Stochastic matrix `S[out, in] = <out| E(|in><in|) |out>`, read off the Choi diagonal.
pub fn decoherent_action(ch: &ChoiChannel) -> DMatrix<f64> {
    let (d_in, d_out) = (ch.d_in(), ch.d_out());
    let j = ch.choi();
    DMatrix::from_fn(d_out, d_in, |o, i| {
        let k = i * d_out + o;
        j.get(k, k).re
    })
}

/// `Σ_m K_m ⊙ conj(K_m)`.
pub fn decoherent_action_kraus(k: &KrausChannel) -> DMatrix<f64> {
    let ops = k.operators();
    let (rows, cols) = (ops[0].rows(), ops[0].cols());
    let mut s = DMatrix::zeros(rows, cols);
    for op in ops {
        for o in 0..rows {
            for i in 0..cols {
                s[(o, i)] += op.get(o, i).norm_sqr();
            }
        }
    }
    s
}

/// Decoherent action of a bipartite channel as `p(a,b|x,y)` with `x, y` the inputs.
pub fn decoherent_distribution(ch: &ChoiChannel) -> Result<ConditionalDistribution> {
    if !ch.is_bipartite() {
        return Err(Error::DimensionMismatch("expected a bipartite channel".into()));
    }
    let (i, o) = (ch.input_dims(), ch.output_dims());
    let scenario = Scenario::new(o[0], o[1], i[0], i[1]);
    ConditionalDistribution::from_stochastic(&decoherent_action(ch), scenario)
}

/// Classical channel with a diagonal Choi matrix built from a stochastic matrix.
pub fn classical_channel(s: &DMatrix<f64>, input_dims: &[usize], output_dims: &[usize]) -> Result<ChoiChannel> {
    let (d_out, d_in) = s.shape();
    let diag: Vec<C64> = (0..d_in * d_out).map(|k| C64::new(s[(k % d_out, k / d_out)], 0.0)).collect();
    let dims: Vec<usize> = input_dims.iter().chain(output_dims).copied().collect();
    ChoiChannel::new(ComplexMatrix::diagonal(&diag, &dims)?, input_dims.to_vec(), output_dims.to_vec())
}

/// Complete dephasing of inputs and outputs.
pub fn fully_dephase(ch: &ChoiChannel) -> Result<ChoiChannel> {
    dephase_channel_memoryless(ch, &GramMatrix::complete(ch.input_dims()), &GramMatrix::complete(ch.output_dims()))
}

/// How the flat coefficients of the 16x16 superchannel Gram example are read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GramReading {
    /// Coefficients as printed, flat indices counted from 1.
    OneBased,
    /// Coefficients as printed, flat indices counted from 0.
    ZeroBased,
    /// Rank-one phases `c c†` on the support `{2, 5, 12, 15}` (1-based) with
    /// `c = (1, 1, i, -i)`, identity elsewhere.
    Consistent,
}

/// The 16x16 matrix of the superchannel dephasing example under a given reading.
/// The printed readings are not positive semidefinite, so a raw matrix is returned.
pub fn superchannel_example_gram(reading: GramReading) -> ComplexMatrix {
    let mut g = ComplexMatrix::identity(&[2, 2, 2, 2]);
    let mut set = |k: usize, l: usize, v: C64| {
        g.set(k, l, v);
        g.set(l, k, v.conj());
    };
    match reading {
        GramReading::OneBased | GramReading::ZeroBased => {
            let shift = if reading == GramReading::OneBased { 1 } else { 0 };
            let at = |k: usize| k - shift;
            set(at(12), at(15), ONE);
            set(at(2), at(5), -ONE);
            set(at(2), at(12), I);
            set(at(5), at(12), I);
            set(at(2), at(15), -I);
            set(at(5), at(15), I);
        }
        GramReading::Consistent => {
            let support = [1usize, 4, 11, 14];
            let c = [ONE, ONE, I, -I];
            for a in 0..4 {
                for b in 0..4 {
                    if a != b {
                        g.set(support[a], support[b], c[a] * c[b].conj());
                    }
                }
            }
        }
    }
    g
}

/// Outcome of applying one reading of the Gram example to `J^{U_L}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramReadingCheck {
    pub reading: GramReading,
    pub gram_min_eigenvalue: f64,
    /// `max |J^{U_L} ⊙ G - J^U|`.
    pub distance_to_target: f64,
    /// Whether `J^{U_L} ⊙ G` is completely positive and trace preserving.
    pub result_is_channel: bool,
    /// Whether `J^{U_L} ⊙ G` also passes the superchannel constraints.
    pub result_is_superchannel: bool,
    /// Whether the identity superchannel stays a superchannel under `⊙ G`.
    pub identity_stays_superchannel: bool,
}

pub fn check_gram_reading(reading: GramReading) -> Result<GramReadingCheck> {
    let g = superchannel_example_gram(reading);
    let gram_min_eigenvalue = herm_eig(&g)?.0[0];
    let jl = crate::constructions::local_x_channel().choi().clone();
    let target = crate::constructions::controlled_xz_channel().choi().clone();
    let out = schur(&jl, &g)?;
    let result_is_channel =
        ChoiChannel::new_cp_unchecked(out.clone(), vec![2, 2], vec![2, 2])?.cptp_report().is_inside();
    let superchannel = |j: ComplexMatrix| -> Result<bool> {
        Ok(crate::channels::is_superchannel(&SuperchannelChoi::new(j, [2, 2, 2, 2])?)?.is_inside())
    };
    let identity = ChoiChannel::identity(&[2, 2]).choi().clone();
    Ok(GramReadingCheck {
        reading,
        gram_min_eigenvalue,
        distance_to_target: out.max_abs_diff(&target),
        result_is_channel,
        result_is_superchannel: superchannel(out)?,
        identity_stays_superchannel: superchannel(schur(&identity, &g)?)?,
    })
}
