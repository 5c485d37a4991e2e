//! Named states, unitaries and Gram matrices used as worked examples.

use crate::channels::ChoiChannel;
use crate::dephasing::GramMatrix;
use crate::tensor::{gates, kron, ComplexMatrix, C64, I};

/// `(|0+> + |1->)/sqrt(2)` as a density matrix.
pub fn psi_bell_state() -> ComplexMatrix {
    let h = 0.5;
    let amps = [C64::new(h, 0.0), C64::new(h, 0.0), C64::new(h, 0.0), C64::new(-h, 0.0)];
    ComplexMatrix::projector(&ComplexMatrix::ket(&amps, &[2, 2]).unwrap())
}

/// `4 |psi><psi|`, a Gram matrix that is also maximally entangled up to scale.
pub fn bell_gram() -> GramMatrix {
    GramMatrix::new(psi_bell_state().scale_real(4.0)).expect("valid Gram matrix")
}

/// `1 ⊗ X`.
pub fn local_x() -> ComplexMatrix {
    kron(&gates::identity2(), &gates::pauli_x())
}

pub fn local_x_channel() -> ChoiChannel {
    ChoiChannel::unitary(&local_x(), &[2, 2]).expect("unitary")
}

/// `Σ_j |j><j| ⊗ X (iZ)^j`.
pub fn controlled_xz() -> ComplexMatrix {
    let x = gates::pauli_x();
    let iz = gates::pauli_z().scale(I);
    let p0 = ComplexMatrix::basis_projector(&[2], 0);
    let p1 = ComplexMatrix::basis_projector(&[2], 1);
    &kron(&p0, &x) + &kron(&p1, &x.matmul(&iz).unwrap())
}

pub fn controlled_xz_channel() -> ChoiChannel {
    ChoiChannel::unitary(&controlled_xz(), &[2, 2]).expect("unitary")
}

/// `X^i Z^j ⊗ 1 |Φ+>`.
pub fn bell_ket(i: usize, j: usize) -> ComplexMatrix {
    let mut op = gates::identity2();
    if i == 1 {
        op = gates::pauli_x();
    }
    if j == 1 {
        op = op.matmul(&gates::pauli_z()).unwrap();
    }
    kron(&op, &gates::identity2()).matmul(&gates::phi_plus()).unwrap()
}

/// `Σ_ij |φ_ij><i+j, j|`, which maps the computational basis onto Bell states.
pub fn bell_basis_unitary() -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(&[2, 2]);
    for i in 0..2 {
        for j in 0..2 {
            let phi = bell_ket(i, j);
            let col = ((i + j) % 2) * 2 + j;
            for r in 0..4 {
                u.set(r, col, phi.get(r, 0));
            }
        }
    }
    u
}

pub fn bell_basis_unitary_channel() -> ChoiChannel {
    ChoiChannel::unitary(&bell_basis_unitary(), &[2, 2]).expect("unitary")
}

/// `(H ⊗ H) U (1 ⊗ H)` for the Bell basis unitary `U`.
pub fn rotated_bell_basis_unitary() -> ComplexMatrix {
    let h = gates::hadamard();
    let hh = kron(&h, &h);
    let ih = kron(&gates::identity2(), &h);
    hh.matmul(&bell_basis_unitary()).unwrap().matmul(&ih).unwrap()
}

/// The permutation `|0><0| + |1><3| + |2><2| + |3><1|` as a stochastic matrix.
pub fn printed_permutation() -> nalgebra::DMatrix<f64> {
    let mut s = nalgebra::DMatrix::zeros(4, 4);
    for (o, i) in [(0, 0), (1, 3), (2, 2), (3, 1)] {
        s[(o, i)] = 1.0;
    }
    s
}

/// Same permutation with each two-bit index read least significant bit first.
pub fn printed_permutation_reversed_bits() -> nalgebra::DMatrix<f64> {
    let flip = |k: usize| ((k & 1) << 1) | (k >> 1);
    let p = printed_permutation();
    nalgebra::DMatrix::from_fn(4, 4, |o, i| p[(flip(o), flip(i))])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::{is_nonsignaling, ConditionalDistribution, Scenario};
    use crate::dephasing::decoherent_action;

    fn unitary_error(u: &ComplexMatrix) -> f64 {
        u.adjoint().matmul(u).unwrap().max_abs_diff(&ComplexMatrix::identity(&[2, 2]))
    }

    #[test]
    fn examples_are_unitary() {
        for u in [local_x(), controlled_xz(), bell_basis_unitary(), rotated_bell_basis_unitary()] {
            assert!(unitary_error(&u) < 1e-12);
        }
    }

    #[test]
    fn controlled_xz_is_locally_a_cnot_up_to_phase() {
        let h = gates::hadamard();
        let left = kron(&gates::identity2(), &h.matmul(&gates::pauli_x()).unwrap());
        let right = kron(&gates::identity2(), &h).adjoint();
        let c = left.matmul(&controlled_xz()).unwrap().matmul(&right).unwrap();
        // equal to the C-NOT up to the phase gate diag(1, i) on the control
        let phase = ComplexMatrix::diagonal(&[C64::new(1.0, 0.0), I], &[2]).unwrap();
        let expected = kron(&phase, &gates::identity2()).matmul(&gates::cnot()).unwrap();
        assert!(c.max_abs_diff(&expected) < 1e-12);
        assert!(c.max_abs_diff(&gates::cnot()) > 0.5);
    }

    #[test]
    fn bell_gram_state_violates_chsh_maximally() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let sp = (&gates::pauli_x() + &gates::pauli_z()).scale_real(s);
        let sm = (&gates::pauli_x() - &gates::pauli_z()).scale_real(s);
        let op = &kron(&gates::pauli_z(), &(&sp + &sm)) + &kron(&gates::pauli_x(), &(&sp - &sm));
        let v = psi_bell_state().trace_product(&op).re;
        assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rotated_unitary_decoheres_to_uniform_noise() {
        let s = decoherent_action(&ChoiChannel::unitary(&rotated_bell_basis_unitary(), &[2, 2]).unwrap());
        assert!((s.add_scalar(-0.25)).abs().max() < 1e-12);
    }

    #[test]
    fn printed_permutation_signals_in_both_bit_orders() {
        for p in [printed_permutation(), printed_permutation_reversed_bits()] {
            let d = ConditionalDistribution::from_stochastic(&p, Scenario::CHSH).unwrap();
            assert!(!is_nonsignaling(&d).is_inside());
        }
    }
}
