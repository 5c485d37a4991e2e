//! Seeded random matrices: Haar unitaries, density matrices, channels.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::tensor::{ComplexMatrix, C64};

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    })
}

/// Haar-distributed unitary via QR of a Ginibre matrix with the phase fix
/// `Q diag(R_ii / |R_ii|)`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let qr = ginibre(n, n, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_dmatrix(q)
}

/// Random density matrix `G G† / Tr(G G†)` with a square Ginibre `G` (Hilbert-Schmidt measure).
pub fn random_density<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> ComplexMatrix {
    let n: usize = dims.iter().product();
    let g = ginibre(n, n, rng);
    let m = &g * g.adjoint();
    let tr = m.trace();
    ComplexMatrix::square(m / tr, dims.to_vec()).expect("dims match")
}

/// Random pure state projector.
pub fn random_pure<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> ComplexMatrix {
    let n: usize = dims.iter().product();
    let v = ginibre(n, 1, rng);
    let v = &v / C64::new(v.norm(), 0.0);
    ComplexMatrix::square(&v * v.adjoint(), dims.to_vec()).expect("dims match")
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> ComplexMatrix {
    let n: usize = dims.iter().product();
    let g = ginibre(n, n, rng);
    let h = (&g + g.adjoint()) * C64::new(0.5, 0.0);
    ComplexMatrix::square(h, dims.to_vec()).expect("dims match")
}

/// Kraus operators of a random channel: the first `d_in` columns of a Haar unitary of
/// size `d_out * rank`, cut into `rank` blocks of `d_out` rows.
pub fn random_kraus<R: Rng + ?Sized>(
    input_dims: &[usize],
    output_dims: &[usize],
    rank: usize,
    rng: &mut R,
) -> Vec<ComplexMatrix> {
    let d_in: usize = input_dims.iter().product();
    let d_out: usize = output_dims.iter().product();
    let big = d_out * rank;
    assert!(big >= d_in, "need d_out * rank >= d_in for an isometry");
    let u = haar_unitary(big, rng);
    (0..rank)
        .map(|m| {
            let block = DMatrix::from_fn(d_out, d_in, |i, j| u.get(m * d_out + i, j));
            ComplexMatrix::new(block, output_dims.to_vec(), input_dims.to_vec()).expect("dims match")
        })
        .collect()
}

/// Effects `K_a^† K_a` of a random channel's Kraus operators: a random `n`-outcome POVM.
pub fn random_povm<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Vec<ComplexMatrix> {
    random_kraus(&[d], &[d], n, rng)
        .into_iter()
        .map(|k| k.adjoint().matmul(&k).expect("square").with_square_dims(vec![d]).expect("dims"))
        .collect()
}

/// Projective measurement from the columns of a Haar unitary, column `k` going to
/// outcome `k mod n`. Outcomes beyond `d` get the zero projector.
pub fn random_projective<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Vec<ComplexMatrix> {
    let u = haar_unitary(d, rng);
    let mut effects = vec![ComplexMatrix::zeros(&[d]); n];
    for k in 0..d {
        let col = ComplexMatrix::new(u.data().columns(k, 1).into_owned(), vec![d], vec![1]).expect("column");
        effects[k % n] = &effects[k % n] + &ComplexMatrix::projector(&col);
    }
    effects
}

/// Uniform point on the probability simplex.
pub fn random_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..6 {
            let u = haar_unitary(n, &mut rng);
            let prod = u.adjoint().matmul(&u).unwrap();
            assert!(prod.max_abs_diff(&ComplexMatrix::identity(&[n])) < 1e-12);
        }
    }

    #[test]
    fn random_kraus_is_trace_preserving() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ks = random_kraus(&[2], &[3], 2, &mut rng);
        let mut acc = ComplexMatrix::zeros(&[2]);
        for k in &ks {
            acc = &acc + &k.adjoint().matmul(k).unwrap().with_square_dims(vec![2]).unwrap();
        }
        assert!(acc.max_abs_diff(&ComplexMatrix::identity(&[2])) < 1e-12);
    }

    #[test]
    fn random_measurements_are_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for effects in [random_povm(3, 4, &mut rng), random_projective(3, 2, &mut rng)] {
            let mut acc = ComplexMatrix::zeros(&[3]);
            for e in &effects {
                assert!(e.min_eigenvalue().unwrap() > -1e-12);
                acc = &acc + e;
            }
            assert!(acc.max_abs_diff(&ComplexMatrix::identity(&[3])) < 1e-12);
        }
        for p in random_projective(4, 3, &mut rng) {
            assert!(p.matmul(&p).unwrap().max_abs_diff(&p) < 1e-12);
        }
    }

    #[test]
    fn density_has_unit_trace_and_is_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random_density(&[2, 2], &mut rng);
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        assert!(rho.min_eigenvalue().unwrap() > -1e-12);
    }
}
