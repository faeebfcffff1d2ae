//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes plain strings and numbers and returns a JSON string,
//! so the page needs no generated type glue beyond `wasm-bindgen`.

use codearena_core::analytics;
use codearena_core::gridsnake::{run_game, BuiltinBot, GameConfig, SnakeBot, Strategy};
use codearena_core::rating::{covariance, fit, to_elo, FitOptions, WinMatrix};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct EloRow {
    id: String,
    rating: f64,
    se: Option<f64>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum Reply<T: Serialize> {
    Ok { ok: T },
    Err { error: String },
}

fn reply<T: Serialize>(r: Result<T, String>) -> String {
    let r = match r {
        Ok(ok) => Reply::Ok { ok },
        Err(error) => Reply::Err { error },
    };
    serde_json::to_string(&r).expect("reply serializes")
}

/// Fits Elo ratings to a win-count matrix given as CSV (`id,A,B` header,
/// one row per player). Returns `{"ok":[{id,rating,se}]}` sorted by rating,
/// or `{"error":..}`.
#[wasm_bindgen]
pub fn fit_elo(csv: &str, pseudo_count: f64) -> String {
    reply(fit_elo_rows(csv, pseudo_count))
}

fn fit_elo_rows(csv: &str, pseudo_count: f64) -> Result<Vec<EloRow>, String> {
    let w = WinMatrix::read_csv(csv.as_bytes()).map_err(|e| e.to_string())?;
    let opts = FitOptions {
        pseudo_count,
        ..FitOptions::default()
    };
    let point = fit(&w, &opts).map_err(|e| e.to_string())?;
    let cov = covariance(&point, &w).ok();
    let elo = to_elo(&point, cov.as_ref());
    Ok(elo
        .order()
        .into_iter()
        .map(|i| EloRow {
            id: elo.ids[i].to_string(),
            rating: elo.rating[i],
            se: elo.se.as_ref().map(|se| se[i]),
        })
        .collect())
}

#[derive(Serialize)]
struct Replay {
    winner: Option<String>,
    width: i32,
    height: i32,
    /// One text grid per turn, top row first.
    frames: Vec<String>,
}

/// Plays a GridSnake game between two builtin strategies (`random`,
/// `greedy`, `flood`). Snake `A` is `bot_a`, snake `B` is `bot_b`.
#[wasm_bindgen]
pub fn snake_game(seed: u64, width: i32, height: i32, bot_a: &str, bot_b: &str, max_turns: u32) -> String {
    reply(play(seed, width, height, bot_a, bot_b, max_turns))
}

fn play(seed: u64, width: i32, height: i32, bot_a: &str, bot_b: &str, max_turns: u32) -> Result<Replay, String> {
    let strategy = |s: &str| Strategy::parse(s).ok_or_else(|| format!("unknown strategy `{s}`"));
    let (a, b) = (strategy(bot_a)?, strategy(bot_b)?);
    let config = GameConfig {
        width,
        height,
        max_turns,
        ..GameConfig::default()
    };
    let mut bots: Vec<(String, Box<dyn SnakeBot>)> = vec![
        ("A".into(), Box::new(BuiltinBot::new(a, seed ^ 0xA))),
        ("B".into(), Box::new(BuiltinBot::new(b, seed ^ 0xB))),
    ];
    let record = run_game(&mut bots, &config, seed, "demo").map_err(|e| e.to_string())?;
    let legend = vec!["A".to_string(), "B".to_string()];
    Ok(Replay {
        winner: record.result.winner.clone(),
        width,
        height,
        frames: record.turns.iter().map(|t| t.render_text(&legend)).collect(),
    })
}

/// Gestalt similarity ratio of two texts, in `[0, 1]`.
#[wasm_bindgen]
pub fn similarity(a: &str, b: &str) -> f64 {
    analytics::similarity(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits_a_seven_three_matrix() {
        let out = fit_elo("id,A,B\nA,0,7\nB,3,0\n", 0.0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let rows = v["ok"].as_array().unwrap();
        assert_eq!(rows[0]["id"], "A");
        let exact = 1200.0 + 200.0 * (7.0f64 / 3.0).log10();
        assert!((rows[0]["rating"].as_f64().unwrap() - exact).abs() < 1e-6);
    }

    #[test]
    fn bad_input_is_reported_not_thrown() {
        let v: serde_json::Value = serde_json::from_str(&fit_elo("nonsense", 0.0)).unwrap();
        assert!(v["error"].is_string());
        let v: serde_json::Value =
            serde_json::from_str(&snake_game(1, 7, 7, "greedy", "nope", 50)).unwrap();
        assert!(v["error"].as_str().unwrap().contains("nope"));
    }

    #[test]
    fn game_is_seeded() {
        let a = snake_game(5, 9, 9, "greedy", "flood", 100);
        assert_eq!(a, snake_game(5, 9, 9, "greedy", "flood", 100));
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        let frames = v["ok"]["frames"].as_array().unwrap();
        assert!(!frames.is_empty());
        assert_eq!(frames[0].as_str().unwrap().lines().count(), 9);
    }

    #[test]
    fn similarity_bounds() {
        assert_eq!(similarity("abc", "abc"), 1.0);
        assert_eq!(similarity("abc", "xyz"), 0.0);
    }
}
