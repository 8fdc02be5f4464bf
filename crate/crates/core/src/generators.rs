//! Seeded constructors for test families of state pairs.
//!
//! Every generator is a pure function of its parameters and a 64-bit seed.

use std::f64::consts::{PI, TAU};

use nalgebra::QR;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{LoccError, Result};
use crate::kernel::{ComplexMatrix, ComplexVector};
use crate::states::{from_unitary, BipartiteState, UnitaryMatrix};

fn haar_with_rng(d: usize, rng: &mut ChaCha8Rng) -> UnitaryMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let ginibre = ComplexMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    });
    let qr = QR::new(ginibre);
    let (mut q, r) = (qr.q(), qr.r());
    // Absorb the phases of diag(R) so the distribution is Haar.
    for (k, mut col) in q.column_iter_mut().enumerate() {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 { rkk / rkk.norm() } else { Complex64::new(1.0, 0.0) };
        col *= phase;
    }
    UnitaryMatrix::new(q, 1e-10).expect("QR factor is unitary")
}

/// Haar-distributed `d×d` unitary.
pub fn haar_unitary(d: usize, seed: u64) -> UnitaryMatrix {
    haar_with_rng(d, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// `V·diag(eigenvalues)·V†` with Haar `V`.
pub fn planted_unitary(eigenvalues: &[Complex64], seed: u64) -> UnitaryMatrix {
    planted_with_rng(eigenvalues, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn planted_with_rng(eigenvalues: &[Complex64], rng: &mut ChaCha8Rng) -> UnitaryMatrix {
    let v = haar_with_rng(eigenvalues.len(), rng);
    let lambda = ComplexMatrix::from_diagonal(&ComplexVector::from_row_slice(eigenvalues));
    let t = v.matrix() * lambda * v.matrix().adjoint();
    UnitaryMatrix::new(t, 1e-9).expect("conjugated unit-modulus diagonal is unitary")
}

fn pair_with_rng(t: &UnitaryMatrix, rng: &mut ChaCha8Rng) -> (BipartiteState, BipartiteState) {
    let u2 = haar_with_rng(t.dim(), rng);
    let u1 = t.mul(&u2);
    (from_unitary(&u1), from_unitary(&u2))
}

/// A pair `(|ψ_1⟩, |ψ_2⟩)` with `|ψ_1⟩ = (T⊗1)|ψ_2⟩` and Haar `|ψ_2⟩`,
/// so that its pair operator is `t`.
pub fn pair_from_operator(t: &UnitaryMatrix, seed: u64) -> (BipartiteState, BipartiteState) {
    pair_with_rng(t, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn unit(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

/// `d` unit-modulus numbers summing to zero.
///
/// The first `d − 2` start from a balanced configuration (antipodal pairs,
/// plus one equilateral triple when the count is odd) with independent
/// random orientations, then each is jittered by at most `1.9/(d−2)` rad so
/// their sum has modulus below 2. The last two are the unique pair of unit
/// vectors summing to minus that residual.
pub fn traceless_spectrum(d: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    assert!(d >= 2, "traceless unitary spectrum needs d >= 2");
    let free = d - 2;
    let mut angles: Vec<f64> = Vec::with_capacity(d);
    let mut remaining = free;
    if remaining % 2 == 1 {
        let beta = rng.random_range(0.0..TAU);
        if remaining >= 3 {
            angles.extend([beta, beta + TAU / 3.0, beta + 2.0 * TAU / 3.0]);
            remaining -= 3;
        } else {
            angles.push(beta);
            remaining -= 1;
        }
    }
    for _ in 0..remaining / 2 {
        let alpha = rng.random_range(0.0..TAU);
        angles.extend([alpha, alpha + PI]);
    }
    if free > 0 {
        let amp = (1.9 / free as f64).min(PI);
        for a in angles.iter_mut() {
            *a += rng.random_range(-amp..amp);
        }
    }
    let mut eigs: Vec<Complex64> = angles.into_iter().map(unit).collect();

    let residual: Complex64 = eigs.iter().sum();
    let r = residual.norm();
    if r < 1e-12 {
        let gamma = rng.random_range(0.0..TAU);
        eigs.extend([unit(gamma), -unit(gamma)]);
    } else {
        let half = (1.0 - r * r / 4.0).max(0.0).sqrt();
        let perp = Complex64::new(0.0, 1.0) * residual / r;
        eigs.push(-residual / 2.0 + perp * half);
        eigs.push(-residual / 2.0 - perp * half);
    }
    eigs
}

/// Random orthogonal pair of maximally entangled states.
pub fn orthogonal_pair(d: usize, seed: u64) -> Result<(BipartiteState, BipartiteState)> {
    if d < 2 {
        return Err(LoccError::Domain(format!("orthogonal pair needs d ≥ 2, got {d}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eigs = traceless_spectrum(d, &mut rng);
    let t = planted_with_rng(&eigs, &mut rng);
    Ok(pair_with_rng(&t, &mut rng))
}

/// Eigenvalues `e^{iφ}·e^{2πi r/m}`, each repeated `d/m` times.
pub fn copyable_spectrum(d: usize, m: usize, phi: f64) -> Result<Vec<Complex64>> {
    if m < 2 || !d.is_multiple_of(m) {
        return Err(LoccError::Domain(format!("m = {m} must be at least 2 and divide d = {d}")));
    }
    Ok((0..d).map(|k| unit(phi + TAU * (k % m) as f64 / m as f64)).collect())
}

/// Pair whose pair operator has equally degenerate `m`th roots of unity,
/// rotated by a random global phase.
pub fn copyable_pair(d: usize, m: usize, seed: u64) -> Result<(BipartiteState, BipartiteState)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi = rng.random_range(0.0..TAU);
    let eigs = copyable_spectrum(d, m, phi)?;
    let t = planted_with_rng(&eigs, &mut rng);
    Ok(pair_with_rng(&t, &mut rng))
}

/// `λ_{jj'} = e^{2πi j/d1}·e^{i j' δ}` for `j < d1`, `j' < d2`.
pub fn nonprime_spectrum(d1: usize, d2: usize, delta: f64) -> Result<Vec<Complex64>> {
    if d1 < 2 || d2 < 2 {
        return Err(LoccError::Domain(format!("need d1, d2 ≥ 2, got ({d1}, {d2})")));
    }
    let limit = TAU / (d1 * d2) as f64;
    if !(delta > 0.0 && delta < limit) {
        return Err(LoccError::Domain(format!("delta = {delta} must lie in (0, 2π/{}) = (0, {limit})", d1 * d2)));
    }
    Ok((0..d1).flat_map(|j| (0..d2).map(move |jp| unit(TAU * j as f64 / d1 as f64 + jp as f64 * delta))).collect())
}

/// Orthogonal but uncopyable pair at `D = d1·d2`.
pub fn nonprime_counterexample(
    d1: usize,
    d2: usize,
    delta: f64,
    seed: u64,
) -> Result<(BipartiteState, BipartiteState)> {
    let eigs = nonprime_spectrum(d1, d2, delta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = planted_with_rng(&eigs, &mut rng);
    Ok(pair_with_rng(&t, &mut rng))
}

/// Smallest factorization `d = d1·d2` with both factors at least 2.
pub fn smallest_factorization(d: usize) -> Option<(usize, usize)> {
    (2..d).take_while(|f| f * f <= d).find(|f| d.is_multiple_of(*f)).map(|f| (f, d / f))
}
