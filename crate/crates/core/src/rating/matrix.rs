use std::collections::BTreeSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::RatingError;
use crate::player::PlayerId;

/// One comparison event: a tournament (or, at round granularity, a round)
/// among `players`, won by `winner` or drawn when `winner` is `None`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TournamentOutcome {
    pub players: Vec<PlayerId>,
    pub winner: Option<PlayerId>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DrawPolicy {
    /// Draws contribute nothing.
    #[default]
    Exclude,
    /// Each side of a draw gets half a win. The binomial model then sees
    /// fractional counts, so standard errors are approximate.
    Split,
}

/// Pairwise win counts: `get(i, j)` is how often `i` beat `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct WinMatrix {
    ids: Vec<PlayerId>,
    w: Vec<f64>,
}

impl WinMatrix {
    pub fn zeros(ids: Vec<PlayerId>) -> Self {
        let n = ids.len();
        Self {
            ids,
            w: vec![0.0; n * n],
        }
    }

    /// Builds a matrix from rows of counts. Counts must be finite and
    /// non-negative, and the diagonal zero.
    pub fn from_rows(ids: Vec<PlayerId>, rows: &[Vec<f64>]) -> Result<Self, RatingError> {
        let n = ids.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(RatingError::Data(format!("win matrix must be {n}x{n}")));
        }
        let unique: BTreeSet<&PlayerId> = ids.iter().collect();
        if unique.len() != n {
            return Err(RatingError::Data("duplicate player id in win matrix".into()));
        }
        let mut m = Self::zeros(ids);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(RatingError::Data(format!("invalid count {v} at ({i}, {j})")));
                }
                if i == j && v != 0.0 {
                    return Err(RatingError::Data(format!("non-zero diagonal at {i}")));
                }
                m.w[i * n + j] = v;
            }
        }
        Ok(m)
    }

    /// Counts tournament wins. Ids are the sorted union of all players.
    pub fn from_tournaments(
        outcomes: &[TournamentOutcome],
        draws: DrawPolicy,
    ) -> Result<Self, RatingError> {
        let ids: BTreeSet<PlayerId> = outcomes.iter().flat_map(|o| o.players.iter().cloned()).collect();
        Self::from_tournaments_with_ids(ids.into_iter().collect(), outcomes, draws)
    }

    /// Like [`WinMatrix::from_tournaments`] with a fixed id order, so
    /// resampled data sets share one layout.
    pub fn from_tournaments_with_ids(
        ids: Vec<PlayerId>,
        outcomes: &[TournamentOutcome],
        draws: DrawPolicy,
    ) -> Result<Self, RatingError> {
        if ids.is_empty() {
            return Err(RatingError::Empty);
        }
        let mut m = Self::zeros(ids);
        for o in outcomes {
            let idx: Vec<usize> = o
                .players
                .iter()
                .map(|p| m.index_of(p).ok_or_else(|| RatingError::UnknownPlayer(p.to_string())))
                .collect::<Result<_, _>>()?;
            match &o.winner {
                Some(winner) => {
                    let wi = m
                        .index_of(winner)
                        .filter(|i| idx.contains(i))
                        .ok_or_else(|| RatingError::UnknownPlayer(winner.to_string()))?;
                    for &j in idx.iter().filter(|&&j| j != wi) {
                        m.add(wi, j, 1.0);
                    }
                }
                None if draws == DrawPolicy::Split => {
                    for (a, &i) in idx.iter().enumerate() {
                        for &j in &idx[a + 1..] {
                            m.add(i, j, 0.5);
                            m.add(j, i, 0.5);
                        }
                    }
                }
                None => {}
            }
        }
        Ok(m)
    }

    pub fn ids(&self) -> &[PlayerId] {
        &self.ids
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn index_of(&self, id: &PlayerId) -> Option<usize> {
        self.ids.iter().position(|p| p == id)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i != j || v == 0.0, "diagonal must stay zero");
        let n = self.n();
        self.w[i * n + j] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let cur = self.get(i, j);
        self.set(i, j, cur + v);
    }

    /// Games between `i` and `j`.
    pub fn games(&self, i: usize, j: usize) -> f64 {
        self.get(i, j) + self.get(j, i)
    }

    pub fn total_games(&self) -> f64 {
        self.w.iter().sum()
    }

    /// Adds `alpha` to every off-diagonal count.
    pub fn with_pseudo_count(&self, alpha: f64) -> Self {
        let mut m = self.clone();
        let n = self.n();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m.add(i, j, alpha);
                }
            }
        }
        m
    }

    /// Restricts the matrix to the given indices, in that order.
    pub fn subset(&self, keep: &[usize]) -> Self {
        let mut m = Self::zeros(keep.iter().map(|&i| self.ids[i].clone()).collect());
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                if a != b {
                    m.set(a, b, self.get(i, j));
                }
            }
        }
        m
    }

    /// Comma-separated with a header row of ids; each row starts with the
    /// winning player's id.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), RatingError> {
        let mut wtr = csv::Writer::from_writer(out);
        let mut header = vec!["id".to_string()];
        header.extend(self.ids.iter().map(|p| p.to_string()));
        wtr.write_record(&header).map_err(csv_error)?;
        for i in 0..self.n() {
            let mut row = vec![self.ids[i].to_string()];
            row.extend((0..self.n()).map(|j| format_count(self.get(i, j))));
            wtr.write_record(&row).map_err(csv_error)?;
        }
        wtr.flush().map_err(|e| RatingError::Data(e.to_string()))
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self, RatingError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let header = rdr.headers().map_err(csv_error)?.clone();
        let ids: Vec<PlayerId> = header.iter().skip(1).map(PlayerId::from).collect();
        let mut rows = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(csv_error)?;
            let row_id = rec.get(0).unwrap_or("");
            if ids.get(line).map(PlayerId::as_str) != Some(row_id) {
                return Err(RatingError::Data(format!(
                    "row {} is `{row_id}`, expected rows in header order",
                    line + 2
                )));
            }
            let row = rec
                .iter()
                .skip(1)
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| RatingError::Data(format!("row {}: bad count `{v}`", line + 2)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Self::from_rows(ids, &rows)
    }
}

fn format_count(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        v.to_string()
    }
}

fn csv_error(e: csv::Error) -> RatingError {
    RatingError::Data(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcome(players: &[&str], winner: Option<&str>) -> TournamentOutcome {
        TournamentOutcome {
            players: players.iter().map(|&p| p.into()).collect(),
            winner: winner.map(PlayerId::from),
        }
    }

    #[test]
    fn counts_tournament_wins() {
        let data = vec![
            outcome(&["A", "B"], Some("A")),
            outcome(&["A", "B"], Some("A")),
            outcome(&["B", "A"], Some("B")),
        ];
        let m = WinMatrix::from_tournaments(&data, DrawPolicy::Exclude).unwrap();
        assert_eq!((m.get(0, 1), m.get(1, 0)), (2.0, 1.0));
        assert_eq!(m.games(0, 1), 3.0);
    }

    #[test]
    fn draws_are_excluded_or_split() {
        let data = vec![outcome(&["A", "B"], Some("A")), outcome(&["A", "B"], None)];
        let m = WinMatrix::from_tournaments(&data, DrawPolicy::Exclude).unwrap();
        assert_eq!((m.get(0, 1), m.get(1, 0)), (1.0, 0.0));
        let m = WinMatrix::from_tournaments(&data, DrawPolicy::Split).unwrap();
        assert_eq!((m.get(0, 1), m.get(1, 0)), (1.5, 0.5));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            WinMatrix::from_tournaments(&[], DrawPolicy::Exclude),
            Err(RatingError::Empty)
        ));
        let bad = vec![outcome(&["A", "B"], Some("C"))];
        assert!(matches!(
            WinMatrix::from_tournaments(&bad, DrawPolicy::Exclude),
            Err(RatingError::UnknownPlayer(_))
        ));
        let ids = vec![PlayerId::from("A")];
        let data = vec![outcome(&["A", "Z"], Some("A"))];
        assert!(WinMatrix::from_tournaments_with_ids(ids, &data, DrawPolicy::Exclude).is_err());
        assert!(WinMatrix::from_rows(vec!["A".into(), "B".into()], &[vec![1.0, 0.0], vec![0.0, 0.0]]).is_err());
    }

    #[test]
    fn multiplayer_winner_beats_everyone() {
        let m = WinMatrix::from_tournaments(&[outcome(&["A", "B", "C"], Some("B"))], DrawPolicy::Exclude)
            .unwrap();
        assert_eq!((m.get(1, 0), m.get(1, 2), m.get(0, 2)), (1.0, 1.0, 0.0));
    }

    #[test]
    fn csv_form() {
        let m = WinMatrix::from_rows(
            vec!["A".into(), "B".into()],
            &[vec![0.0, 7.0], vec![3.0, 0.0]],
        )
        .unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "id,A,B\nA,0,7\nB,3,0\n");
        assert_eq!(WinMatrix::read_csv(buf.as_slice()).unwrap(), m);
        assert!(WinMatrix::read_csv("id,A,B\nB,0,1\nA,1,0\n".as_bytes()).is_err());
    }
}
