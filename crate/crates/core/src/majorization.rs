//! Majorization, deterministic LOCC convertibility of pure states, and the
//! self-catalysis test for copying a single known state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::states::SchmidtVector;

/// Descending partial sums of `v`, padded with zeros to `len`.
pub fn partial_sums(v: &[f64], len: usize) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted.resize(len.max(sorted.len()), 0.0);
    sorted
        .iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// Partial-sum comparison of two vectors, for reporting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorizationTable {
    /// Partial sums of the candidate majorizer `w`.
    pub upper: Vec<f64>,
    /// Partial sums of `v`.
    pub lower: Vec<f64>,
    /// First 1-based index where `lower` exceeds `upper` by more than the
    /// tolerance, or where the totals differ.
    pub first_violation: Option<usize>,
}

impl MajorizationTable {
    pub fn holds(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Compares `w ≻ v` on raw probability slices.
pub fn majorization_table(w: &[f64], v: &[f64], sum_tol: f64) -> MajorizationTable {
    let len = w.len().max(v.len());
    let upper = partial_sums(w, len);
    let lower = partial_sums(v, len);
    let mut first_violation = upper.iter().zip(&lower).position(|(u, l)| *l > *u + sum_tol).map(|i| i + 1);
    if first_violation.is_none() && len > 0 && (upper[len - 1] - lower[len - 1]).abs() > sum_tol {
        first_violation = Some(len);
    }
    MajorizationTable { upper, lower, first_violation }
}

/// `true` iff `w` majorizes `v` (`v ≺ w`).
pub fn majorizes(w: &SchmidtVector, v: &SchmidtVector, sum_tol: f64) -> bool {
    majorization_table(w.probs(), v.probs(), sum_tol).holds()
}

/// Whether `|φ_src⟩ → |φ_dst⟩` is possible by deterministic LOCC.
pub fn nielsen_transformable(src: &SchmidtVector, dst: &SchmidtVector, sum_tol: f64) -> bool {
    majorizes(dst, src, sum_tol)
}

/// All pairwise products `a_i·b_j`, sorted non-increasing.
pub fn tensor_probs(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
    out.sort_by(|x, y| y.total_cmp(x));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CopyVerdict {
    /// `blank ≺ psi`: the blank converts to `psi` without help.
    Direct,
    /// Only `psi ⊗ blank ≺ psi ⊗ psi` holds; the original acts as catalyst.
    Catalytic,
    Impossible,
}

impl std::fmt::Display for CopyVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CopyVerdict::Direct => "direct",
            CopyVerdict::Catalytic => "catalytic",
            CopyVerdict::Impossible => "impossible",
        })
    }
}

/// Full record of a single-state copy check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalysisReport {
    pub verdict: CopyVerdict,
    pub direct: MajorizationTable,
    pub tensored: MajorizationTable,
}

pub fn catalysis_report(psi: &SchmidtVector, blank: &SchmidtVector, sum_tol: f64) -> CatalysisReport {
    let direct = majorization_table(psi.probs(), blank.probs(), sum_tol);
    let tensored =
        majorization_table(&tensor_probs(psi.probs(), psi.probs()), &tensor_probs(psi.probs(), blank.probs()), sum_tol);
    let verdict = if direct.holds() {
        CopyVerdict::Direct
    } else if tensored.holds() {
        CopyVerdict::Catalytic
    } else {
        CopyVerdict::Impossible
    };
    CatalysisReport { verdict, direct, tensored }
}

/// Can `|ψ⟩⊗|b⟩ → |ψ⟩⊗|ψ⟩` be done by LOCC, and does it need `|ψ⟩` as a catalyst?
pub fn catalytic_copy_check(psi: &SchmidtVector, blank: &SchmidtVector, sum_tol: f64) -> CopyVerdict {
    catalysis_report(psi, blank, sum_tol).verdict
}

fn random_probs(rng: &mut ChaCha8Rng, d: usize, support: usize) -> Vec<f64> {
    let mut p: Vec<f64> = (0..d)
        .map(|i| {
            if i < support {
                let z: f64 = StandardNormal.sample(rng);
                z * z
            } else {
                0.0
            }
        })
        .collect();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    p
}

/// Randomized search for `(psi, blank)` whose copy verdict is catalytic.
///
/// Probabilities are normalized squared normals. The support size of `psi`
/// is drawn uniformly from `⌈d/2⌉..=d` on each attempt: full-support pairs
/// are catalytic only very rarely, while a `psi` with vanishing trailing
/// coefficients is a much richer source.
pub fn find_catalytic_pair(
    d: usize,
    attempts: usize,
    seed: u64,
    sum_tol: f64,
) -> Option<(SchmidtVector, SchmidtVector)> {
    if d < 2 {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let support = Uniform::new_inclusive(d.div_ceil(2), d).expect("non-empty support range");
    for _ in 0..attempts {
        let k = support.sample(&mut rng);
        let psi = random_probs(&mut rng, d, k);
        let blank = random_probs(&mut rng, d, d);
        let (Ok(psi), Ok(blank)) = (SchmidtVector::new(psi, 1e-9), SchmidtVector::new(blank, 1e-9)) else {
            continue;
        };
        if catalytic_copy_check(&psi, &blank, sum_tol) == CopyVerdict::Catalytic {
            return Some((psi, blank));
        }
    }
    None
}
