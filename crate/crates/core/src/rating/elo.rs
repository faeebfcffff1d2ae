use std::f64::consts::LN_10;

use serde::{Deserialize, Serialize};

use super::{CovarianceReport, StrengthFit};
use crate::player::PlayerId;

pub const BASE_RATING: f64 = 1200.0;
pub const ELO_SLOPE: f64 = 400.0;

/// Rating points per unit of strength, `400 / ln 10`.
pub fn elo_scale() -> f64 {
    ELO_SLOPE / LN_10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EloReport {
    pub ids: Vec<PlayerId>,
    pub rating: Vec<f64>,
    /// Present when a covariance was supplied.
    pub se: Option<Vec<f64>>,
}

pub fn strength_to_elo(s: f64) -> f64 {
    BASE_RATING + elo_scale() * s
}

pub fn to_elo(fit: &StrengthFit, cov: Option<&CovarianceReport>) -> EloReport {
    EloReport {
        ids: fit.ids.clone(),
        rating: fit.s.iter().map(|&s| strength_to_elo(s)).collect(),
        se: cov.map(|c| c.se.iter().map(|se| elo_scale() * se).collect()),
    }
}

/// Win probability implied by a rating difference.
pub fn elo_win_probability(r_i: f64, r_j: f64) -> f64 {
    1.0 / (1.0 + 10f64.powf(-(r_i - r_j) / ELO_SLOPE))
}

impl EloReport {
    /// Player indices ordered by rating, highest first, ties by id.
    pub fn order(&self) -> Vec<usize> {
        rank_order(&self.ids, &self.rating)
    }

    pub fn ranking(&self) -> Vec<PlayerId> {
        self.order().into_iter().map(|i| self.ids[i].clone()).collect()
    }
}

pub(crate) fn rank_order(ids: &[PlayerId], rating: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..ids.len()).collect();
    idx.sort_by(|&a, &b| rating[b].total_cmp(&rating[a]).then_with(|| ids[a].cmp(&ids[b])));
    idx
}
