use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::player::{PlayerId, TournamentWinner, Winner};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Disposition {
    Played,
    Walkover,
    AllInvalidTie,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolution {
    pub disposition: Disposition,
    /// Valid players, in input order. For a walkover this is the winner.
    pub participants: Vec<PlayerId>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("validity map is empty")]
pub struct EmptyValidity;

/// Applies the invalid-submission rules: nobody valid ties the round, a
/// single valid player wins by walkover, otherwise only valid players play.
pub fn resolve_validity(validity: &[(PlayerId, bool)]) -> Result<Resolution, EmptyValidity> {
    if validity.is_empty() {
        return Err(EmptyValidity);
    }
    let participants: Vec<PlayerId> = validity
        .iter()
        .filter(|(_, ok)| *ok)
        .map(|(p, _)| p.clone())
        .collect();
    let disposition = match participants.len() {
        0 => Disposition::AllInvalidTie,
        1 => Disposition::Walkover,
        _ => Disposition::Played,
    };
    Ok(Resolution {
        disposition,
        participants,
    })
}

/// Unique player with the most simulation wins. A shared maximum, or more
/// tied simulations than the maximum, gives a tie.
pub fn decide_round_winner(sim_wins: &BTreeMap<PlayerId, u64>, ties: u64) -> Winner {
    let Some(&best) = sim_wins.values().max() else {
        return Winner::Tie;
    };
    let mut leaders = sim_wins.iter().filter(|(_, &w)| w == best);
    let leader = leaders.next().map(|(p, _)| p.clone());
    match (leader, leaders.next()) {
        (Some(p), None) if ties <= best => Winner::Player(p),
        _ => Winner::Tie,
    }
}

/// Most round wins; equal counts go to whoever won most recently.
pub fn decide_tournament_winner(round_winners: &[Winner]) -> TournamentWinner {
    // (wins, last round won) per player
    let mut stats: BTreeMap<&PlayerId, (u32, usize)> = BTreeMap::new();
    for (i, w) in round_winners.iter().enumerate() {
        if let Winner::Player(p) = w {
            let e = stats.entry(p).or_default();
            e.0 += 1;
            e.1 = i + 1;
        }
    }
    stats
        .into_iter()
        .max_by_key(|(_, key)| *key)
        .map(|(p, _)| TournamentWinner::Player(p.clone()))
        .unwrap_or(TournamentWinner::Draw)
}

/// Uniformly random permutation of `players`.
pub fn shuffle_order<R: Rng + ?Sized>(rng: &mut R, players: &[PlayerId]) -> Vec<PlayerId> {
    let mut order = players.to_vec();
    order.shuffle(rng);
    order
}

/// Per-player round score out of 100: `(wins + ties/2) / sims * 100` for a
/// played round, 100 for a walkover winner, 0 otherwise.
pub fn round_scores(
    players: &[PlayerId],
    resolution: &Resolution,
    sim_wins: &BTreeMap<PlayerId, u64>,
    ties: u64,
    sims: u64,
) -> BTreeMap<PlayerId, f64> {
    players
        .iter()
        .map(|p| {
            let score = match resolution.disposition {
                Disposition::AllInvalidTie => 0.0,
                Disposition::Walkover if resolution.participants.contains(p) => 100.0,
                Disposition::Walkover => 0.0,
                Disposition::Played => match sim_wins.get(p) {
                    Some(&w) => (2 * w + ties) as f64 * 50.0 / sims as f64,
                    None => 0.0,
                },
            };
            (p.clone(), score)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ids(names: &[&str]) -> Vec<PlayerId> {
        names.iter().map(|&n| PlayerId::from(n)).collect()
    }

    fn tally(pairs: &[(&str, u64)]) -> BTreeMap<PlayerId, u64> {
        pairs.iter().map(|&(p, w)| (p.into(), w)).collect()
    }

    fn w(name: &str) -> Winner {
        Winner::from(name.to_string())
    }

    #[test]
    fn validity_rules() {
        let r = resolve_validity(&[("A".into(), false), ("B".into(), false)]).unwrap();
        assert_eq!(r.disposition, Disposition::AllInvalidTie);
        let r = resolve_validity(&[("A".into(), true), ("B".into(), false)]).unwrap();
        assert_eq!(r.disposition, Disposition::Walkover);
        assert_eq!(r.participants, ids(&["A"]));
        let r = resolve_validity(&[("A".into(), true), ("B".into(), true), ("C".into(), false)])
            .unwrap();
        assert_eq!(r.disposition, Disposition::Played);
        assert_eq!(r.participants, ids(&["A", "B"]));
        assert_eq!(resolve_validity(&[]), Err(EmptyValidity));
    }

    #[test]
    fn round_winner_examples() {
        assert_eq!(decide_round_winner(&tally(&[("A", 620), ("B", 350)]), 30), w("A"));
        assert_eq!(decide_round_winner(&tally(&[("A", 500), ("B", 500)]), 0), Winner::Tie);
        assert_eq!(decide_round_winner(&tally(&[("A", 300), ("B", 300)]), 400), Winner::Tie);
        assert_eq!(decide_round_winner(&tally(&[("A", 301), ("B", 299)]), 400), Winner::Tie);
        assert_eq!(decide_round_winner(&tally(&[("A", 400), ("B", 200)]), 400), w("A"));
    }

    #[test]
    fn tournament_winner_examples() {
        let seq: Vec<Winner> = ["A", "B", "A", "B"].iter().map(|s| w(s)).collect();
        assert_eq!(decide_tournament_winner(&seq), TournamentWinner::Player("B".into()));
        assert_eq!(decide_tournament_winner(&vec![Winner::Tie; 15]), TournamentWinner::Draw);
        let mut seq = vec![w("A"); 8];
        seq.extend(vec![w("B"); 7]);
        assert_eq!(decide_tournament_winner(&seq), TournamentWinner::Player("A".into()));
    }

    #[test]
    fn scores_sum_to_100_for_two_players() {
        let players = ids(&["A", "B"]);
        let res = resolve_validity(&[("A".into(), true), ("B".into(), true)]).unwrap();
        let s = round_scores(&players, &res, &tally(&[("A", 487), ("B", 483)]), 30, 1000);
        assert_eq!(s[&PlayerId::from("A")], 50.2);
        assert_eq!(s[&PlayerId::from("A")] + s[&PlayerId::from("B")], 100.0);
        let res = resolve_validity(&[("A".into(), false), ("B".into(), true)]).unwrap();
        let s = round_scores(&players, &res, &BTreeMap::new(), 0, 1000);
        assert_eq!((s[&PlayerId::from("A")], s[&PlayerId::from("B")]), (0.0, 100.0));
    }

    #[test]
    fn shuffle_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(shuffle_order(&mut rng, &ids(&["solo"])), ids(&["solo"]));
        let players = ids(&["A", "B", "C", "D"]);
        let a = shuffle_order(&mut ChaCha8Rng::seed_from_u64(9), &players);
        let b = shuffle_order(&mut ChaCha8Rng::seed_from_u64(9), &players);
        assert_eq!(a, b);
    }

    #[test]
    fn two_player_shuffle_is_balanced() {
        let players = ids(&["A", "B"]);
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let a_first = (0..10_000)
            .filter(|_| shuffle_order(&mut rng, &players)[0] == players[0])
            .count();
        assert!((4850..=5150).contains(&a_first), "{a_first}");
    }

    proptest! {
        #[test]
        fn two_player_scores_are_complementary(a in 0u64..2000, b in 0u64..2000, t in 0u64..2000) {
            prop_assume!(a + b + t > 0);
            let players = ids(&["A", "B"]);
            let res = resolve_validity(&[("A".into(), true), ("B".into(), true)]).unwrap();
            let s = round_scores(&players, &res, &tally(&[("A", a), ("B", b)]), t, a + b + t);
            prop_assert_eq!(s[&players[0]] + s[&players[1]], 100.0);
        }

        #[test]
        fn round_winner_attains_max(wins in proptest::collection::vec(0u64..50, 2..5), ties in 0u64..50) {
            let names = ["A", "B", "C", "D"];
            let t: BTreeMap<PlayerId, u64> =
                wins.iter().zip(names).map(|(&w, n)| (n.into(), w)).collect();
            if let Winner::Player(p) = decide_round_winner(&t, ties) {
                let max = *t.values().max().unwrap();
                prop_assert_eq!(t[&p], max);
                prop_assert!(ties <= max);
            }
        }

        #[test]
        fn tournament_winner_ignores_labels(seq in proptest::collection::vec(0usize..4, 1..16)) {
            // 0..3 are players, 3 is a tie
            let names = ["A", "B", "C"];
            let relabel = ["X", "Z", "Y"];
            let to_w = |labels: &[&str; 3], i: usize| {
                if i == 3 { Winner::Tie } else { Winner::from(labels[i].to_string()) }
            };
            let a: Vec<Winner> = seq.iter().map(|&i| to_w(&names, i)).collect();
            let b: Vec<Winner> = seq.iter().map(|&i| to_w(&relabel, i)).collect();
            let map = |w: TournamentWinner| match w {
                TournamentWinner::Draw => None,
                TournamentWinner::Player(p) => Some(p.to_string()),
            };
            let wa = map(decide_tournament_winner(&a))
                .map(|p| names.iter().position(|&n| n == p).unwrap());
            let wb = map(decide_tournament_winner(&b))
                .map(|p| relabel.iter().position(|&n| n == p).unwrap());
            prop_assert_eq!(wa, wb);
        }
    }
}
