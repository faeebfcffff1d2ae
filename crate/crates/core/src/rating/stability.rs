use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::RatingError;
use crate::player::PlayerId;

/// Agreement between a reference ranking and bootstrap rankings, averaged
/// over samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub samples: usize,
    pub kendall_tau: f64,
    pub spearman_rho: f64,
    /// Sum of absolute rank displacements over its maximum, `n^2/2` for
    /// even `n` and `(n^2-1)/2` for odd `n`.
    pub footrule_normalized: f64,
    /// Fraction of samples with the same top player.
    pub top1_consistency: f64,
    /// Fraction of (sample, unordered pair) combinations ordered as in the
    /// reference.
    pub pairwise_order_agreement: f64,
}

fn positions(reference: &[PlayerId], ranking: &[PlayerId]) -> Result<Vec<usize>, RatingError> {
    // pos[k] = rank in `ranking` of the player at reference rank k
    let ref_set: BTreeSet<&PlayerId> = reference.iter().collect();
    let set: BTreeSet<&PlayerId> = ranking.iter().collect();
    if ranking.len() != reference.len() || set != ref_set {
        return Err(RatingError::Data("rankings are over different players".into()));
    }
    Ok(reference
        .iter()
        .map(|p| ranking.iter().position(|q| q == p).expect("same set"))
        .collect())
}

/// Kendall tau, Spearman rho, footrule, top-1 and pairwise agreement of
/// each sample ranking against `reference`. Rankings list players best
/// first and must be permutations of the same ids.
pub fn stability(reference: &[PlayerId], samples: &[Vec<PlayerId>]) -> Result<StabilityReport, RatingError> {
    let n = reference.len();
    if n < 2 {
        return Err(RatingError::Data("stability needs at least two players".into()));
    }
    if samples.is_empty() {
        return Err(RatingError::Data("no ranking samples".into()));
    }
    if reference.iter().collect::<BTreeSet<_>>().len() != n {
        return Err(RatingError::Data("reference ranking repeats a player".into()));
    }
    let pairs = (n * (n - 1) / 2) as f64;
    let nf = n as f64;
    let footrule_max = if n.is_multiple_of(2) { nf * nf / 2.0 } else { (nf * nf - 1.0) / 2.0 };
    let (mut tau, mut rho, mut foot, mut top1, mut agree) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for sample in samples {
        let pos = positions(reference, sample)?;
        let mut concordant = 0usize;
        for a in 0..n {
            for b in a + 1..n {
                if pos[a] < pos[b] {
                    concordant += 1;
                }
            }
        }
        let concordant = concordant as f64;
        tau += (2.0 * concordant - pairs) / pairs;
        agree += concordant / pairs;
        let d2: f64 = pos.iter().enumerate().map(|(k, &p)| (k as f64 - p as f64).powi(2)).sum();
        rho += 1.0 - 6.0 * d2 / (nf * (nf * nf - 1.0));
        let d1: f64 = pos.iter().enumerate().map(|(k, &p)| (k as f64 - p as f64).abs()).sum();
        foot += d1 / footrule_max;
        if sample[0] == reference[0] {
            top1 += 1.0;
        }
    }
    let m = samples.len() as f64;
    Ok(StabilityReport {
        samples: samples.len(),
        kendall_tau: tau / m,
        spearman_rho: rho / m,
        footrule_normalized: foot / m,
        top1_consistency: top1 / m,
        pairwise_order_agreement: agree / m,
    })
}
