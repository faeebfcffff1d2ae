use std::collections::HashMap;

/// Gestalt (Ratcliff-Obershelp) similarity of two character sequences:
/// `2M / (|a| + |b|)`, where `M` counts the characters in the matching
/// blocks found by taking the longest common block and recursing on both
/// sides of it. Equally long blocks resolve to the earliest start in `a`,
/// then in `b`. No junk heuristics. Two empty inputs give 1.0.
pub fn similarity(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    similarity_chars(&a, &b)
}

pub fn similarity_chars(a: &[char], b: &[char]) -> f64 {
    let total = a.len() + b.len();
    if total == 0 {
        return 1.0;
    }
    2.0 * matched_chars(a, b) as f64 / total as f64
}

/// Total size of the matching blocks.
pub fn matched_chars(a: &[char], b: &[char]) -> usize {
    let mut b2j: HashMap<char, Vec<usize>> = HashMap::new();
    for (j, &c) in b.iter().enumerate() {
        b2j.entry(c).or_default().push(j);
    }
    let mut matched = 0;
    let mut queue = vec![(0, a.len(), 0, b.len())];
    while let Some((alo, ahi, blo, bhi)) = queue.pop() {
        let (i, j, k) = longest_match(a, &b2j, alo, ahi, blo, bhi);
        if k == 0 {
            continue;
        }
        matched += k;
        if alo < i && blo < j {
            queue.push((alo, i, blo, j));
        }
        if i + k < ahi && j + k < bhi {
            queue.push((i + k, ahi, j + k, bhi));
        }
    }
    matched
}

/// Longest block `a[i..i+k] == b[j..j+k]` inside the given ranges.
fn longest_match(
    a: &[char],
    b2j: &HashMap<char, Vec<usize>>,
    alo: usize,
    ahi: usize,
    blo: usize,
    bhi: usize,
) -> (usize, usize, usize) {
    let (mut bi, mut bj, mut bk) = (alo, blo, 0);
    // Length of the match ending at (i - 1, j), keyed by j.
    let mut prev: HashMap<usize, usize> = HashMap::new();
    for (i, c) in a.iter().enumerate().take(ahi).skip(alo) {
        let mut cur = HashMap::new();
        if let Some(js) = b2j.get(c) {
            let start = js.partition_point(|&j| j < blo);
            for &j in &js[start..] {
                if j >= bhi {
                    break;
                }
                let k = j.checked_sub(1).and_then(|p| prev.get(&p)).copied().unwrap_or(0) + 1;
                cur.insert(j, k);
                if k > bk {
                    (bi, bj, bk) = (i + 1 - k, j + 1 - k, k);
                }
            }
        }
        prev = cur;
    }
    (bi, bj, bk)
}

/// Mean similarity over all unordered pairs of texts, each pair compared
/// with the texts ordered by their key. `None` with fewer than two texts.
pub fn solution_diversity(texts: &[(String, String)]) -> Option<f64> {
    if texts.len() < 2 {
        return None;
    }
    let mut sorted: Vec<&(String, String)> = texts.iter().collect();
    sorted.sort_by(|x, y| x.0.cmp(&y.0));
    let chars: Vec<Vec<char>> = sorted.iter().map(|(_, t)| t.chars().collect()).collect();
    let mut sum = 0.0;
    let mut pairs = 0;
    for i in 0..chars.len() {
        for j in i + 1..chars.len() {
            sum += similarity_chars(&chars[i], &chars[j]);
            pairs += 1;
        }
    }
    Some(sum / pairs as f64)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Direct transcription of the definition: scan every (i, j) start,
    /// measure the common run, keep the first longest.
    pub(crate) fn reference_matched(a: &[char], b: &[char]) -> usize {
        fn go(a: &[char], b: &[char], alo: usize, ahi: usize, blo: usize, bhi: usize) -> usize {
            let mut best = (0, 0, 0);
            for i in alo..ahi {
                for j in blo..bhi {
                    let mut k = 0;
                    while i + k < ahi && j + k < bhi && a[i + k] == b[j + k] {
                        k += 1;
                    }
                    if k > best.2 {
                        best = (i, j, k);
                    }
                }
            }
            let (i, j, k) = best;
            if k == 0 {
                return 0;
            }
            k + go(a, b, alo, i, blo, j) + go(a, b, i + k, ahi, j + k, bhi)
        }
        go(a, b, 0, a.len(), 0, b.len())
    }

    pub(crate) fn reference_ratio(a: &str, b: &str) -> f64 {
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        if a.is_empty() && b.is_empty() {
            return 1.0;
        }
        2.0 * reference_matched(&a, &b) as f64 / (a.len() + b.len()) as f64
    }

    #[test]
    fn examples() {
        assert_eq!(similarity("abc", "abc"), 1.0);
        assert_eq!(similarity("abcd", "bcde"), 0.75);
        assert_eq!(similarity("abc", ""), 0.0);
        assert_eq!(similarity("", ""), 1.0);
    }

    #[test]
    fn known_values() {
        // Values from an established implementation of the same algorithm
        // with junk detection disabled.
        let cases = [
            ("private Thread currentThread;", "private volatile Thread currentThread;", 0.8656716417910447),
            ("def move(board):\n    return \"up\"\n", "def move(state):\n    return \"left\"\n", 0.7941176470588235),
            ("aaaabbbb", "bbbbaaaa", 0.5),
            ("héllo wörld", "hello world", 0.8181818181818182),
        ];
        for (a, b, r) in cases {
            assert_eq!(similarity(a, b), r, "{a:?} {b:?}");
        }
    }

    #[test]
    fn tie_break_prefers_earliest_block() {
        // "ab" occurs twice in b; the earlier one is matched, leaving "x"
        // unmatched on the right.
        let a: Vec<char> = "abx".chars().collect();
        let b: Vec<char> = "abyabx".chars().collect();
        let mut b2j: HashMap<char, Vec<usize>> = HashMap::new();
        for (j, &c) in b.iter().enumerate() {
            b2j.entry(c).or_default().push(j);
        }
        assert_eq!(longest_match(&a, &b2j, 0, 3, 0, 6), (0, 3, 3));
        let a: Vec<char> = "ab".chars().collect();
        assert_eq!(longest_match(&a, &b2j, 0, 2, 0, 6), (0, 0, 2));
    }

    #[test]
    fn random_pairs_match_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let la = rng.random_range(0..120);
            let lb = rng.random_range(0..120);
            let a: String = (0..la).map(|_| (b'a' + rng.random_range(0..4)) as char).collect();
            let b: String = (0..lb).map(|_| (b'a' + rng.random_range(0..4)) as char).collect();
            assert_eq!(similarity(&a, &b).to_bits(), reference_ratio(&a, &b).to_bits());
        }
    }

    #[test]
    fn diversity() {
        let same = vec![("t1".to_string(), "x = 1".to_string()); 4];
        assert_eq!(solution_diversity(&same), Some(1.0));
        assert_eq!(solution_diversity(&same[..1]), None);
        let texts = vec![
            ("t2".to_string(), "bcde".to_string()),
            ("t1".to_string(), "abcd".to_string()),
        ];
        assert_eq!(solution_diversity(&texts), Some(0.75));
    }

    proptest! {
        #[test]
        fn bounds(a in "[abc]{0,40}", b in "[abc]{0,40}") {
            let r = similarity(&a, &b);
            prop_assert!((0.0..=1.0).contains(&r));
            prop_assert_eq!(similarity(&a, &a), 1.0);
            let (la, lb) = (a.chars().count(), b.chars().count());
            if la + lb > 0 {
                prop_assert!(r <= 2.0 * la.min(lb) as f64 / (la + lb) as f64 + 1e-15);
            }
        }
    }
}
