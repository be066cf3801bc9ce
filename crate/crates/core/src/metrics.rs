//! Gestalt (Ratcliff-Obershelp) similarity, success rate, output/code match
//! and pass@k.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("metric over an empty input")]
    EmptyInput,
    #[error("domain error: {0}")]
    DomainError(String),
}

/// Longest common block of `a[alo..ahi]` and `b[blo..bhi]` as
/// `(start_a, start_b, len)`; ties go to the smallest start in `a`, then in `b`.
fn longest_block(
    a: &[char],
    b: &[char],
    (alo, ahi): (usize, usize),
    (blo, bhi): (usize, usize),
) -> (usize, usize, usize) {
    let width = bhi - blo;
    let mut prev = vec![0usize; width + 1];
    let mut cur = vec![0usize; width + 1];
    let (mut best_i, mut best_j, mut best) = (alo, blo, 0);
    for (i, ai) in (alo..ahi).zip(&a[alo..ahi]) {
        for (j, bj) in (blo..bhi).zip(&b[blo..bhi]) {
            let k = if ai == bj { prev[j - blo] + 1 } else { 0 };
            cur[j - blo + 1] = k;
            if k > best {
                best = k;
                best_i = i + 1 - k;
                best_j = j + 1 - k;
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    (best_i, best_j, best)
}

/// Total length of the recursively chosen matching blocks (the `M` of the
/// similarity formula), counted in Unicode scalar values.
pub fn gestalt_matches(s1: &str, s2: &str) -> usize {
    let a: Vec<char> = s1.chars().collect();
    let b: Vec<char> = s2.chars().collect();
    let mut total = 0;
    let mut stack = vec![(0, a.len(), 0, b.len())];
    while let Some((alo, ahi, blo, bhi)) = stack.pop() {
        if alo >= ahi || blo >= bhi {
            continue;
        }
        let (i, j, k) = longest_block(&a, &b, (alo, ahi), (blo, bhi));
        if k == 0 {
            continue;
        }
        total += k;
        stack.push((alo, i, blo, j));
        stack.push((i + k, ahi, j + k, bhi));
    }
    total
}

/// `2M / (|s1| + |s2|)`, with two empty strings counting as identical.
pub fn gestalt_similarity(s1: &str, s2: &str) -> f64 {
    let (m, len) = matches_and_len(s1, s2);
    if len == 0 {
        1.0
    } else {
        (2 * m) as f64 / len as f64
    }
}

fn matches_and_len(s1: &str, s2: &str) -> (usize, usize) {
    (
        gestalt_matches(s1, s2),
        s1.chars().count() + s2.chars().count(),
    )
}

fn similarity_ratio(s1: &str, s2: &str) -> BigRational {
    let (m, len) = matches_and_len(s1, s2);
    if len == 0 {
        BigRational::one()
    } else {
        BigRational::new((2 * m).into(), len.into())
    }
}

/// Collapses every whitespace run to one space and trims the ends.
pub fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// `floor(100 * x + 1/2)`, exact.
fn percent_half_up(x: &BigRational) -> u32 {
    let half = BigRational::new(1.into(), 2.into());
    let scaled = x * BigRational::from_integer(100.into()) + half;
    scaled.floor().to_integer().to_u32().expect("percentage fits in u32")
}

/// Percentage of outputs byte-equal to `reference`, rounded half up.
pub fn success_rate(outputs: &[String], reference: &str) -> Result<u32, MetricsError> {
    let hits = outputs.iter().filter(|o| o.as_str() == reference).count();
    rate(hits, outputs.len())
}

/// Percentage `100 * hits / n`, rounded half up.
pub fn rate(hits: usize, n: usize) -> Result<u32, MetricsError> {
    if n == 0 {
        return Err(MetricsError::EmptyInput);
    }
    if hits > n {
        return Err(MetricsError::DomainError(format!("{hits} hits out of {n}")));
    }
    Ok(percent_half_up(&BigRational::new(hits.into(), n.into())))
}

/// Mean similarity as a percentage, rounded half up from the exact mean.
pub fn mean_similarity<S1, S2>(pairs: &[(S1, S2)]) -> Result<u32, MetricsError>
where
    S1: AsRef<str>,
    S2: AsRef<str>,
{
    if pairs.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let sum = pairs
        .iter()
        .fold(BigRational::zero(), |acc, (a, b)| {
            acc + similarity_ratio(a.as_ref(), b.as_ref())
        });
    let mean = sum / BigRational::from_integer(pairs.len().into());
    Ok(percent_half_up(&mean))
}

/// Unrounded mean similarity in `[0, 1]`.
pub fn mean_similarity_raw<S1, S2>(pairs: &[(S1, S2)]) -> Result<f64, MetricsError>
where
    S1: AsRef<str>,
    S2: AsRef<str>,
{
    if pairs.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let sum: f64 = pairs
        .iter()
        .map(|(a, b)| gestalt_similarity(a.as_ref(), b.as_ref()))
        .sum();
    Ok(sum / pairs.len() as f64)
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `1 - C(n-c, k) / C(n, k)` as an exact fraction.
pub fn pass_at_k_exact(n: u64, c: u64, k: u64) -> Result<BigRational, MetricsError> {
    if c > n || k == 0 || k > n {
        return Err(MetricsError::DomainError(format!(
            "pass@k needs 0 <= c <= n and 1 <= k <= n, got n={n} c={c} k={k}"
        )));
    }
    let fail = BigRational::new(binomial(n - c, k).into(), binomial(n, k).into());
    Ok(BigRational::one() - fail)
}

pub fn pass_at_k(n: u64, c: u64, k: u64) -> Result<f64, MetricsError> {
    let exact = pass_at_k_exact(n, c, k)?;
    Ok(exact.to_f64().expect("probability is finite"))
}

/// 1 when any of the first `k` samples is correct.
pub fn pass_at_k_observed(flags: &[bool], k: usize) -> Result<u8, MetricsError> {
    if k > flags.len() {
        return Err(MetricsError::DomainError(format!(
            "k={k} exceeds {} samples",
            flags.len()
        )));
    }
    Ok(u8::from(flags[..k].iter().any(|&f| f)))
}
