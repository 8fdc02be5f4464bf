//! Local copying of two orthogonal maximally entangled states with a
//! maximally entangled blank.
//!
//! Everything hinges on the pair operator `T = U_1·U_2†`. The pair can be
//! copied by local unitaries `A` (on particles 1,3) and `B` (on 2,4) iff the
//! eigenvalues of `T` are, after a global rotation, the `M`th roots of unity
//! for some `M | D`, each with multiplicity `D/M`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::NumericConfig;
use crate::error::{LoccError, Result};
use crate::kernel::{
    eig_normal, kron, kron_vec, partial_trace_second, ComplexMatrix, ComplexVector, NormalEigen, ONE, ZERO,
};
use crate::simulator;
use crate::states::{unitary_of_state, BipartiteState, UnitaryMatrix};

/// Particle wiring used by every protocol in this crate.
pub const WIRING: &str = "A:(1,3) B:(2,4)";

/// One group of (numerically) equal eigenphases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseCluster {
    /// Circular mean of the member phases after rotation removal, in `[0, 2π)`.
    pub phase: f64,
    pub multiplicity: usize,
}

/// Spectral analysis of a pair operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Eigenphases of `T` itself, sorted, in `[0, 2π)`.
    pub eigenphases: Vec<f64>,
    /// Clusters sorted by rotated phase; the first sits at 0.
    pub clusters: Vec<PhaseCluster>,
    /// `Δθ` with `T̃ = e^{iΔθ}·T`.
    pub rotation: f64,
    /// Number of clusters when they sit on the `M`th roots of unity.
    pub detected_m: Option<usize>,
    pub equally_spaced: bool,
    pub equal_degeneracy: bool,
    pub copyable: bool,
    /// `Tr(T)`, serialized as `[re, im]`.
    pub trace: Complex64,
}

impl SpectrumReport {
    pub fn multiplicities(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.multiplicity).collect()
    }

    /// The rotated operator `T̃ = e^{iΔθ}·T`.
    pub fn rotated(&self, t: &UnitaryMatrix) -> UnitaryMatrix {
        t.with_phase(self.rotation)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orthogonality {
    Orthogonal,
    IdenticalUpToPhase,
    Neither,
}

/// Local unitaries that copy a pair of states onto a blank.
#[derive(Debug, Clone)]
pub struct CopyProtocol {
    pub d: usize,
    pub blank: BipartiteState,
    /// Acts on particles (1,3), particle 1 as the fast factor.
    pub a_op: UnitaryMatrix,
    /// Acts on particles (2,4), particle 2 as the fast factor.
    pub b_op: UnitaryMatrix,
    /// Output phase `θ_j` observed for each designed state.
    pub phases: Vec<f64>,
    pub wiring: String,
}

/// `T = D·PT(|ψ_1⟩⟨ψ_2|)`, which equals `U_1·U_2†`.
pub fn pair_operator(psi1: &BipartiteState, psi2: &BipartiteState, config: &NumericConfig) -> Result<UnitaryMatrix> {
    if psi1.dim() != psi2.dim() {
        return Err(LoccError::Shape(format!("pair has d = {} and d = {}", psi1.dim(), psi2.dim())));
    }
    unitary_of_state(psi1, config)?;
    unitary_of_state(psi2, config)?;
    let d = psi1.dim();
    let outer = psi1.to_vector() * psi2.to_vector().adjoint();
    let t = partial_trace_second(&outer, d, d)? * Complex64::new(d as f64, 0.0);
    UnitaryMatrix::new(t, config.unitarity_tol)
}

/// Classifies `|⟨ψ_2|ψ_1⟩| = |Tr T|/D`.
pub fn orthogonality(t: &UnitaryMatrix, ortho_tol: f64) -> Orthogonality {
    let d = t.dim() as f64;
    let tr = t.trace().norm();
    if tr < d * ortho_tol {
        Orthogonality::Orthogonal
    } else if tr > d * (1.0 - ortho_tol) {
        Orthogonality::IdenticalUpToPhase
    } else {
        Orthogonality::Neither
    }
}

struct AnalyzedSpectrum {
    eig: NormalEigen,
    /// Cluster index (position in `report.clusters`) of each eigenvector column.
    labels: Vec<usize>,
    report: SpectrumReport,
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let diff = (a - b).rem_euclid(TAU);
    diff.min(TAU - diff)
}

fn analyze(t: &UnitaryMatrix, config: &NumericConfig) -> Result<AnalyzedSpectrum> {
    let d = t.dim();
    let tol = config.phase_tol;
    let eig = eig_normal(t.matrix(), config)?;
    let phases: Vec<f64> = eig.values.iter().map(|z| z.arg().rem_euclid(TAU)).collect();

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| phases[a].total_cmp(&phases[b]));
    let sorted: Vec<f64> = order.iter().map(|&k| phases[k]).collect();

    // gaps[k] separates sorted[k] from its circular successor.
    let gaps: Vec<f64> =
        (0..d).map(|k| if k + 1 < d { sorted[k + 1] - sorted[k] } else { TAU + sorted[0] - sorted[d - 1] }).collect();
    if let Some(&gap) = gaps.iter().find(|&&g| g > tol && g <= 2.0 * tol) {
        return Err(LoccError::AmbiguousClustering { gap, tol });
    }

    // Walk the circle starting just after a cut so no cluster wraps.
    let start = gaps.iter().position(|&g| g > tol).map_or(0, |k| (k + 1) % d);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut current = Vec::new();
    for step in 0..d {
        let k = (start + step) % d;
        current.push(order[k]);
        if gaps[k] > tol || step + 1 == d {
            groups.push(std::mem::take(&mut current));
        }
    }

    let mut clusters: Vec<(f64, Vec<usize>)> = groups
        .into_iter()
        .map(|members| {
            let mean: Complex64 = members.iter().map(|&k| Complex64::from_polar(1.0, phases[k])).sum();
            (mean.arg().rem_euclid(TAU), members)
        })
        .collect();
    clusters.sort_by(|a, b| a.0.total_cmp(&b.0));

    let rotation = -clusters[0].0;
    let m = clusters.len();
    let mut labels = vec![0; d];
    let mut phase_clusters = Vec::with_capacity(m);
    for (r, (phase, members)) in clusters.iter().enumerate() {
        for &k in members {
            labels[k] = r;
        }
        phase_clusters.push(PhaseCluster { phase: (phase + rotation).rem_euclid(TAU), multiplicity: members.len() });
    }
    // Rounding can push the anchor to just below 2π.
    phase_clusters[0].phase = 0.0;

    let equally_spaced =
        phase_clusters.iter().enumerate().all(|(r, c)| circular_distance(c.phase, TAU * r as f64 / m as f64) <= tol);
    let equal_degeneracy = phase_clusters.iter().all(|c| c.multiplicity == phase_clusters[0].multiplicity);
    let copyable = equally_spaced && d.is_multiple_of(m) && equal_degeneracy;

    let report = SpectrumReport {
        eigenphases: sorted,
        clusters: phase_clusters,
        rotation,
        detected_m: equally_spaced.then_some(m),
        equally_spaced,
        equal_degeneracy,
        copyable,
        trace: t.trace(),
    };
    Ok(AnalyzedSpectrum { eig, labels, report })
}

/// Decides copyability from the spectrum of `T`.
pub fn spectral_verdict(t: &UnitaryMatrix, config: &NumericConfig) -> Result<SpectrumReport> {
    Ok(analyze(t, config)?.report)
}

/// Checks `Σ_{s,s'} G_{rss'} d_s d_{s'} = D·d_r` for every `r`, where
/// `G_{rss'} = 1` iff `λ_s·λ_{s'} = λ_r` for the `M`th roots of unity
/// `λ_r = e^{2πi(r−1)/M}`.
pub fn degeneracy_form_check(multiplicities: &[usize], m: usize, d: usize) -> bool {
    if m == 0 || multiplicities.len() != m || multiplicities.iter().sum::<usize>() != d {
        return false;
    }
    (0..m).all(|r| {
        let lhs: usize = (0..m)
            .flat_map(|s| (0..m).map(move |sp| (s, sp)))
            .filter(|&(s, sp)| (s + sp) % m == r)
            .map(|(s, sp)| multiplicities[s] * multiplicities[sp])
            .sum();
        lhs == d * multiplicities[r]
    })
}

/// Builds a unitary `A` on `D²` with `A(T̃⊗1)A† = T̃⊗T̃`.
///
/// `A` maps the `λ_r` eigenspace of `T̃⊗1` onto the `λ_r` eigenspace of
/// `T̃⊗T̃`, using the product eigenbases `v_a⊗e_k` and `v_a⊗v_b` built
/// from one eigendecomposition of `T`.
pub fn synthesize_a(t: &UnitaryMatrix, config: &NumericConfig) -> Result<UnitaryMatrix> {
    let spectrum = analyze(t, config)?;
    let report = &spectrum.report;
    if !report.copyable {
        return Err(LoccError::NotCopyable(describe_failure(report, t.dim())));
    }
    let d = t.dim();
    let m = report.clusters.len();
    let v = &spectrum.eig.vectors;
    let labels = &spectrum.labels;

    let basis = |k: usize| {
        let mut e = ComplexVector::zeros(d);
        e[k] = ONE;
        e
    };
    let eigvec = |a: usize| v.column(a).into_owned();

    let mut eta = Vec::with_capacity(d * d);
    let mut xi = Vec::with_capacity(d * d);
    for r in 0..m {
        let before = (eta.len(), xi.len());
        for a in (0..d).filter(|&a| labels[a] == r) {
            for k in 0..d {
                eta.push(kron_vec(&eigvec(a), &basis(k)));
            }
        }
        for a in 0..d {
            for b in (0..d).filter(|&b| (labels[a] + labels[b]) % m == r) {
                xi.push(kron_vec(&eigvec(a), &eigvec(b)));
            }
        }
        let (n_eta, n_xi) = (eta.len() - before.0, xi.len() - before.1);
        if n_eta != n_xi {
            return Err(LoccError::Internal(format!(
                "eigenspace dimensions differ for root {r}: {n_eta} (T̃⊗1) vs {n_xi} (T̃⊗T̃)"
            )));
        }
    }
    let eta = ComplexMatrix::from_columns(&eta);
    let xi = ComplexMatrix::from_columns(&xi);
    let a = UnitaryMatrix::new(&xi * eta.adjoint(), config.unitarity_tol)
        .map_err(|e| LoccError::Internal(format!("synthesized A is not unitary: {e}")))?;

    let t_tilde = report.rotated(t);
    let lhs =
        a.matrix() * kron(t_tilde.matrix(), &ComplexMatrix::identity(d, d), config.max_dim)? * a.matrix().adjoint();
    let rhs = kron(t_tilde.matrix(), t_tilde.matrix(), config.max_dim)?;
    let residual = (lhs - rhs).norm();
    if residual >= 1e-9 {
        return Err(LoccError::Internal(format!("‖A(T̃⊗1)A† − T̃⊗T̃‖_F = {residual:.3e}")));
    }
    Ok(a)
}

fn describe_failure(report: &SpectrumReport, d: usize) -> String {
    let m = report.clusters.len();
    if !report.equally_spaced {
        format!("the {m} distinct eigenvalues of T are not equally spaced on the unit circle")
    } else if !d.is_multiple_of(m) {
        format!("eigenvalues are {m}th roots of unity but {m} does not divide D = {d}")
    } else {
        format!("eigenvalue multiplicities {:?} are unequal", report.multiplicities())
    }
}

/// Synthesizes `A`, `B` copying `psi1` and `psi2` onto `blank`, and
/// verifies both copies by simulation.
pub fn synthesize_protocol(
    psi1: &BipartiteState,
    psi2: &BipartiteState,
    blank: &BipartiteState,
    config: &NumericConfig,
) -> Result<CopyProtocol> {
    let d = psi1.dim();
    if psi2.dim() != d || blank.dim() != d {
        return Err(LoccError::Shape(format!(
            "states have d = {}, {}, {} (psi1, psi2, blank)",
            d,
            psi2.dim(),
            blank.dim()
        )));
    }
    let u1 = unitary_of_state(psi1, config)?;
    let ub = unitary_of_state(blank, config).map_err(|e| LoccError::Precondition(format!("blank state: {e}")))?;
    let t = pair_operator(psi1, psi2, config)?;
    match orthogonality(&t, config.ortho_tol) {
        Orthogonality::Orthogonal => {}
        other => {
            return Err(LoccError::Precondition(format!(
                "states must be orthogonal, found {other:?} (|⟨ψ2|ψ1⟩| = {:.3e})",
                t.trace().norm() / d as f64
            )))
        }
    }
    let a = synthesize_a(&t, config)?;

    // C_1 = (U_1†⊗U_1†)·A·(U_1⊗U_b) satisfies C_1·Bᵀ = e^{iθ_1}, so B = conj(C_1)
    // up to a global phase.
    let u1_dag = u1.matrix().adjoint();
    let c1 = kron(&u1_dag, &u1_dag, config.max_dim)? * a.matrix() * kron(u1.matrix(), ub.matrix(), config.max_dim)?;
    let b = UnitaryMatrix::new(c1.map(|z| z.conj()), config.unitarity_tol)
        .map_err(|e| LoccError::Internal(format!("B is not unitary: {e}")))?;

    let mut protocol = CopyProtocol {
        d,
        blank: blank.clone(),
        a_op: a,
        b_op: b,
        phases: Vec::with_capacity(2),
        wiring: WIRING.to_string(),
    };
    for psi in [psi1, psi2] {
        let outcome = simulator::copy_outcome(&protocol, psi)?;
        if outcome.fidelity < 1.0 - config.fidelity_tol {
            return Err(LoccError::VerificationFailed { fidelity: outcome.fidelity });
        }
        protocol.phases.push(outcome.theta);
    }
    Ok(protocol)
}

/// Per-pair result of [`pairwise_check`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairVerdict {
    pub i: usize,
    pub j: usize,
    pub orthogonality: Orthogonality,
    pub spectrum: SpectrumReport,
}

/// All-pairs check for `N ≥ 2` states. Every pair being copyable is
/// necessary for copying the whole set; it is not known to be sufficient
/// when `N > 2`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairwiseReport {
    pub pairs: Vec<PairVerdict>,
    pub all_pairs_copyable: bool,
    /// "exact" for two states, "pairwise-necessary only" beyond that.
    pub scope: String,
}

pub fn pairwise_check(states: &[BipartiteState], config: &NumericConfig) -> Result<PairwiseReport> {
    if states.len() < 2 {
        return Err(LoccError::Domain("need at least two states".into()));
    }
    let mut pairs = Vec::new();
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            let t = pair_operator(&states[i], &states[j], config)?;
            pairs.push(PairVerdict {
                i,
                j,
                orthogonality: orthogonality(&t, config.ortho_tol),
                spectrum: spectral_verdict(&t, config)?,
            });
        }
    }
    let all_pairs_copyable = pairs.iter().all(|p| p.orthogonality == Orthogonality::Orthogonal && p.spectrum.copyable);
    let scope = if states.len() == 2 { "exact" } else { "pairwise-necessary only" };
    Ok(PairwiseReport { pairs, all_pairs_copyable, scope: scope.to_string() })
}

/// `e^{iφ}` for the `r`th of `m` roots of unity.
pub fn root_of_unity(r: usize, m: usize) -> Complex64 {
    if m == 0 {
        return ZERO;
    }
    Complex64::from_polar(1.0, TAU * r as f64 / m as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{from_unitary, max_entangled};

    fn cfg() -> NumericConfig {
        NumericConfig::default()
    }

    fn diag(values: &[Complex64]) -> UnitaryMatrix {
        UnitaryMatrix::new(ComplexMatrix::from_diagonal(&ComplexVector::from_row_slice(values)), 1e-12).unwrap()
    }

    fn sigma_x() -> UnitaryMatrix {
        UnitaryMatrix::new(ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]), 1e-12).unwrap()
    }

    #[test]
    fn pair_operator_of_identical_states_is_identity() {
        let s = max_entangled(3).unwrap();
        let t = pair_operator(&s, &s, &cfg()).unwrap();
        assert!((t.matrix() - ComplexMatrix::identity(3, 3)).norm() < 1e-14);
    }

    #[test]
    fn pair_operator_of_bell_pair_is_sigma_x() {
        let t = pair_operator(&max_entangled(2).unwrap(), &from_unitary(&sigma_x()), &cfg()).unwrap();
        assert!((t.matrix() - sigma_x().matrix()).norm() < 1e-14);
    }

    #[test]
    fn pair_operator_rejects_partially_entangled() {
        let amps = ComplexMatrix::from_diagonal(&ComplexVector::from_vec(vec![
            Complex64::new(0.8f64.sqrt(), 0.0),
            Complex64::new(0.2f64.sqrt(), 0.0),
        ]));
        let s = BipartiteState::new(amps, &cfg()).unwrap();
        let err = pair_operator(&s, &max_entangled(2).unwrap(), &cfg()).unwrap_err();
        assert!(matches!(err, LoccError::Precondition(_)));
    }

    #[test]
    fn orthogonality_classes() {
        assert_eq!(orthogonality(&UnitaryMatrix::identity(2), 1e-9), Orthogonality::IdenticalUpToPhase);
        assert_eq!(orthogonality(&sigma_x(), 1e-9), Orthogonality::Orthogonal);
        let t = diag(&[ONE, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3)]);
        assert!((t.trace().norm() - 3f64.sqrt()).abs() < 1e-14);
        assert_eq!(orthogonality(&t, 1e-9), Orthogonality::Neither);
    }

    #[test]
    fn bell_pair_spectrum() {
        let report = spectral_verdict(&sigma_x(), &cfg()).unwrap();
        assert!(report.copyable);
        assert_eq!(report.detected_m, Some(2));
        assert_eq!(report.multiplicities(), vec![1, 1]);
        assert!((report.clusters[1].phase - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn rotated_cube_roots_are_copyable() {
        let phi = 0.7;
        let t = diag(&[0, 1, 2].map(|r| Complex64::from_polar(1.0, phi + TAU * r as f64 / 3.0)));
        let report = spectral_verdict(&t, &cfg()).unwrap();
        assert!(report.copyable);
        assert_eq!(report.detected_m, Some(3));
        assert!((report.rotation + phi).abs() < 1e-12);
    }

    #[test]
    fn cluster_straddling_zero_is_merged() {
        let eps = 1e-9;
        let t = diag(&[
            Complex64::from_polar(1.0, -eps),
            Complex64::from_polar(1.0, eps),
            Complex64::from_polar(1.0, std::f64::consts::PI),
            Complex64::from_polar(1.0, std::f64::consts::PI + eps),
        ]);
        let report = spectral_verdict(&t, &cfg()).unwrap();
        assert_eq!(report.multiplicities(), vec![2, 2]);
        assert!(report.copyable);
    }

    #[test]
    fn d4_counterexample_is_rejected() {
        let delta = std::f64::consts::FRAC_PI_4;
        let t = diag(&[ONE, Complex64::from_polar(1.0, delta), -ONE, -Complex64::from_polar(1.0, delta)]);
        assert!(t.trace().norm() < 1e-14);
        let report = spectral_verdict(&t, &cfg()).unwrap();
        assert!(!report.copyable);
        assert!(!report.equally_spaced);
        assert_eq!(report.detected_m, None);
        assert!(matches!(synthesize_a(&t, &cfg()), Err(LoccError::NotCopyable(_))));
    }

    #[test]
    fn unequal_degeneracy_is_rejected() {
        let t = diag(&[ONE, ONE, root_of_unity(1, 3), root_of_unity(2, 3)]);
        let report = spectral_verdict(&t, &cfg()).unwrap();
        assert!(report.equally_spaced);
        assert!(!report.equal_degeneracy);
        assert!(!report.copyable);
    }

    #[test]
    fn ambiguous_gap_is_an_error() {
        let tol = cfg().phase_tol;
        let t = diag(&[ONE, Complex64::from_polar(1.0, 1.5 * tol), -ONE]);
        match spectral_verdict(&t, &cfg()) {
            Err(LoccError::AmbiguousClustering { gap, .. }) => assert!((gap - 1.5 * tol).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degeneracy_form_examples() {
        // (1,1), M=2: r=0 gets d_0² + d_1² = 2 = 2·1; r=1 gets 2·d_0·d_1 = 2.
        assert!(degeneracy_form_check(&[1, 1], 2, 2));
        // (2,1,1), M=3: r=0 gets 2·2 + 2·1·1 = 6 ≠ 4·2.
        assert!(!degeneracy_form_check(&[2, 1, 1], 3, 4));
        assert!(degeneracy_form_check(&[2, 2], 2, 4));
        assert!(degeneracy_form_check(&[5], 1, 5));
        assert!(!degeneracy_form_check(&[1, 2], 3, 3));
    }

    #[test]
    fn synthesize_a_for_identity_and_sigma_x() {
        for t in [UnitaryMatrix::identity(3), sigma_x()] {
            let d = t.dim();
            let a = synthesize_a(&t, &cfg()).unwrap();
            let report = spectral_verdict(&t, &cfg()).unwrap();
            let tt = report.rotated(&t);
            let lhs =
                a.matrix() * kron(tt.matrix(), &ComplexMatrix::identity(d, d), 1 << 12).unwrap() * a.matrix().adjoint();
            let rhs = kron(tt.matrix(), tt.matrix(), 1 << 12).unwrap();
            assert!((lhs - rhs).norm() < 1e-9);
        }
    }

    #[test]
    fn protocol_for_bell_pair() {
        let psi1 = max_entangled(2).unwrap();
        let psi2 = from_unitary(&sigma_x());
        let protocol = synthesize_protocol(&psi1, &psi2, &max_entangled(2).unwrap(), &cfg()).unwrap();
        assert_eq!(protocol.phases.len(), 2);
        assert_eq!(protocol.wiring, WIRING);
        for psi in [&psi1, &psi2] {
            assert!(simulator::verify_copy(&protocol, psi).unwrap() >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn protocol_rejects_identical_states() {
        let s = max_entangled(2).unwrap();
        let err = synthesize_protocol(&s, &s, &s, &cfg()).unwrap_err();
        assert!(matches!(err, LoccError::Precondition(_)));
    }

    #[test]
    fn pairwise_scope_label() {
        let states = vec![max_entangled(2).unwrap(), from_unitary(&sigma_x())];
        let report = pairwise_check(&states, &cfg()).unwrap();
        assert_eq!(report.scope, "exact");
        assert!(report.all_pairs_copyable);
        let sz = diag(&[ONE, -ONE]);
        let sy = UnitaryMatrix::new(
            ComplexMatrix::from_row_slice(2, 2, &[ZERO, Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), ZERO]),
            1e-12,
        )
        .unwrap();
        let mut states = states;
        states.push(from_unitary(&sz));
        states.push(from_unitary(&sy));
        let report = pairwise_check(&states, &cfg()).unwrap();
        assert_eq!(report.scope, "pairwise-necessary only");
        assert_eq!(report.pairs.len(), 6);
        assert!(report.all_pairs_copyable);
    }
}
