use plauscheck_core::metrics::{gestalt_matches, gestalt_similarity, mean_similarity, pass_at_k_exact, success_rate};
use proptest::prelude::*;

fn longest_common_substring(a: &[char], b: &[char]) -> usize {
    let mut best = 0;
    for i in 0..a.len() {
        for j in 0..b.len() {
            let mut k = 0;
            while i + k < a.len() && j + k < b.len() && a[i + k] == b[j + k] {
                k += 1;
            }
            best = best.max(k);
        }
    }
    best
}

#[test]
fn umlauts_are_single_characters() {
    assert_eq!(gestalt_similarity("Fälschung", "Falschung"), 16.0 / 18.0);
    assert_eq!(mean_similarity(&[("Führerschein", "Führerschein")]), Ok(100));
}

#[test]
fn pass_at_k_against_hypergeometric_table() {
    // 1 - C(n-c,k)/C(n,k) for n = 5, written out by hand.
    let table = [(1, 1, "1/5"), (1, 2, "2/5"), (2, 2, "7/10"), (3, 2, "9/10"), (2, 3, "9/10"), (4, 1, "4/5")];
    for (c, k, want) in table {
        assert_eq!(pass_at_k_exact(5, c, k).unwrap().to_string(), want, "c={c} k={k}");
    }
}

proptest! {
    #[test]
    fn matches_cover_longest_common_substring(a in "[abc]{0,15}", b in "[abc]{0,15}") {
        let (ca, cb): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
        let m = gestalt_matches(&a, &b);
        prop_assert!(m >= longest_common_substring(&ca, &cb));
        prop_assert_eq!(gestalt_matches(&a, &a), ca.len());
    }

    #[test]
    fn success_rate_is_exact_similarity_rate(outs in prop::collection::vec("[xy]{0,3}", 1..8), r in "[xy]{0,3}") {
        let hits = outs.iter().filter(|o| gestalt_similarity(o, &r) == 1.0).count();
        let expected = (200 * hits + outs.len()) / (2 * outs.len());
        prop_assert_eq!(success_rate(&outs, &r).unwrap() as usize, expected);
    }
}
