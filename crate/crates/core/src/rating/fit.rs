use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{RatingError, WinMatrix};
use crate::player::PlayerId;

/// Strengths beyond this magnitude mean the likelihood has no finite
/// maximum.
pub const DIVERGENCE_LIMIT: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Added to every off-diagonal count before fitting. Removes
    /// separation at the cost of shrinking strengths towards zero.
    pub pseudo_count: f64,
    /// Convergence threshold on the gradient's max-norm.
    pub tol: f64,
    pub max_iter: usize,
    /// Starting strengths; zeros when absent. Only differences matter.
    pub init: Option<Vec<f64>>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            pseudo_count: 0.0,
            tol: 1e-10,
            max_iter: 500,
            init: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Separation {
    /// Never lost a game.
    AllWins,
    /// Never won a game.
    AllLosses,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrengthFit {
    pub ids: Vec<PlayerId>,
    /// Strengths with `sum(s) = 0`.
    pub s: Vec<f64>,
    pub loglik: f64,
    pub iterations: usize,
    pub converged: bool,
    pub pseudo_count: f64,
    /// Players whose raw record is all wins or all losses.
    pub separation_flags: Vec<(PlayerId, Separation)>,
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(sigmoid(x))` without overflow.
fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

pub fn log_likelihood(w: &WinMatrix, s: &[f64]) -> f64 {
    let n = w.n();
    let mut ll = 0.0;
    for i in 0..n {
        for j in 0..n {
            let wij = w.get(i, j);
            if i != j && wij > 0.0 {
                ll += wij * log_sigmoid(s[i] - s[j]);
            }
        }
    }
    ll
}

/// Gradient of the log-likelihood in each strength.
pub(crate) fn gradient(w: &WinMatrix, s: &[f64]) -> Vec<f64> {
    let n = w.n();
    let mut g = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                g[i] += w.get(i, j) * sigmoid(s[j] - s[i]) - w.get(j, i) * sigmoid(s[i] - s[j]);
            }
        }
    }
    g
}

/// Fisher information: the negated Hessian of the log-likelihood.
pub(crate) fn information(w: &WinMatrix, s: &[f64]) -> DMatrix<f64> {
    let n = w.n();
    let mut info = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let p = sigmoid(s[i] - s[j]);
                let v = w.games(i, j) * p * (1.0 - p);
                info[(i, j)] = -v;
                info[(i, i)] += v;
            }
        }
    }
    info
}

fn components(n: usize, edge: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut k = 0;
        while k < comp.len() {
            let i = comp[k];
            for j in 0..n {
                if !seen[j] && (edge(i, j) || edge(j, i)) {
                    seen[j] = true;
                    comp.push(j);
                }
            }
            k += 1;
        }
        out.push(comp);
    }
    out
}

fn reachable(n: usize, from: usize, edge: impl Fn(usize, usize) -> bool) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[from] = true;
    let mut stack = vec![from];
    while let Some(i) = stack.pop() {
        for j in 0..n {
            if !seen[j] && edge(i, j) {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen
}

/// Whether every player can be reached from every other along "beat"
/// edges, which is when the maximum-likelihood estimate is finite.
pub fn strongly_connected(w: &WinMatrix) -> bool {
    let n = w.n();
    let fwd = reachable(n, 0, |i, j| w.get(i, j) > 0.0);
    let bwd = reachable(n, 0, |i, j| w.get(j, i) > 0.0);
    fwd.iter().chain(&bwd).all(|&b| b)
}

pub fn separation_flags(w: &WinMatrix) -> Vec<(PlayerId, Separation)> {
    let n = w.n();
    let mut flags = Vec::new();
    for i in 0..n {
        let wins: f64 = (0..n).map(|j| w.get(i, j)).sum();
        let losses: f64 = (0..n).map(|j| w.get(j, i)).sum();
        if wins + losses == 0.0 {
            continue;
        }
        if losses == 0.0 {
            flags.push((w.ids()[i].clone(), Separation::AllWins));
        } else if wins == 0.0 {
            flags.push((w.ids()[i].clone(), Separation::AllLosses));
        }
    }
    flags
}

fn recenter(s: &mut [f64]) {
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    s.iter_mut().for_each(|x| *x -= mean);
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Maximum-likelihood Bradley-Terry strengths under `sum(s) = 0`.
///
/// Projected Newton: each step solves `(I + 11^T) d = g`, which on the
/// sum-zero subspace equals the Newton step with the information matrix
/// `I`, followed by a backtracking line search.
pub fn fit(w: &WinMatrix, opts: &FitOptions) -> Result<StrengthFit, RatingError> {
    let n = w.n();
    if n < 2 {
        return Err(RatingError::Data("at least two players are needed".into()));
    }
    if !(opts.pseudo_count >= 0.0 && opts.pseudo_count.is_finite()) {
        return Err(RatingError::Data("pseudo_count must be non-negative".into()));
    }
    let flags = separation_flags(w);
    let data = if opts.pseudo_count > 0.0 {
        w.with_pseudo_count(opts.pseudo_count)
    } else {
        w.clone()
    };
    let comps = components(n, |i, j| data.games(i, j) > 0.0);
    if comps.len() > 1 {
        return Err(RatingError::Disconnected {
            components: comps
                .iter()
                .map(|c| c.iter().map(|&i| w.ids()[i].to_string()).collect())
                .collect(),
        });
    }
    if !strongly_connected(&data) {
        return Err(RatingError::Separation {
            players: flags.iter().map(|(p, _)| p.to_string()).collect(),
        });
    }

    let mut s = match &opts.init {
        Some(init) if init.len() == n => init.clone(),
        Some(_) => return Err(RatingError::Data("init has the wrong length".into())),
        None => vec![0.0; n],
    };
    recenter(&mut s);
    let ones = DMatrix::from_element(n, n, 1.0);
    let mut ll = log_likelihood(&data, &s);
    let mut iterations = 0;
    let mut converged = false;
    while iterations <= opts.max_iter {
        let g = gradient(&data, &s);
        if max_abs(&g) <= opts.tol {
            converged = true;
            break;
        }
        if iterations == opts.max_iter {
            break;
        }
        iterations += 1;
        let system = information(&data, &s) + &ones;
        let rhs = DVector::from_vec(g);
        let step = match system.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => system.lu().solve(&rhs).ok_or(RatingError::Singular {
                detail: "Newton system is singular".into(),
            })?,
        };
        let mut t = 1.0;
        loop {
            let mut cand: Vec<f64> = s.iter().zip(step.iter()).map(|(a, d)| a + t * d).collect();
            recenter(&mut cand);
            let cand_ll = log_likelihood(&data, &cand);
            // Near the optimum the change is below rounding noise in ll.
            let noise = 64.0 * f64::EPSILON * ll.abs().max(1.0);
            if cand_ll >= ll - noise || t < 1e-12 {
                s = cand;
                ll = cand_ll;
                break;
            }
            t *= 0.5;
        }
        if max_abs(&s) > DIVERGENCE_LIMIT {
            return Err(RatingError::Separation {
                players: flags.iter().map(|(p, _)| p.to_string()).collect(),
            });
        }
    }
    Ok(StrengthFit {
        ids: w.ids().to_vec(),
        s,
        loglik: ll,
        iterations,
        converged,
        pseudo_count: opts.pseudo_count,
        separation_flags: flags,
    })
}

/// Probability that `i` beats `j`.
pub fn predict(fit: &StrengthFit, i: usize, j: usize) -> f64 {
    sigmoid(fit.s[i] - fit.s[j])
}
