use std::time::Duration;

use rand::Rng;

/// Exponential backoff for transient HTTP failures.
///
/// With the defaults a batch gets at most four attempts, waiting roughly
/// 1s, 2s and 4s between them.
#[derive(Debug, Clone, PartialEq)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub base_delay: Duration,
    /// Fraction of the nominal delay added as uniform random jitter.
    pub jitter: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_retries: 3,
            base_delay: Duration::from_secs(1),
            jitter: 0.25,
        }
    }
}

impl RetryPolicy {
    pub fn none() -> Self {
        Self {
            max_retries: 0,
            ..Self::default()
        }
    }

    pub fn max_attempts(&self) -> u32 {
        self.max_retries + 1
    }

    /// Nominal delay before retry number `retry` (0-based), without jitter.
    pub fn nominal_delay(&self, retry: u32) -> Duration {
        self.base_delay.saturating_mul(1u32 << retry.min(16))
    }

    pub fn delay(&self, retry: u32) -> Duration {
        let nominal = self.nominal_delay(retry);
        if self.jitter <= 0.0 || nominal.is_zero() {
            return nominal;
        }
        let extra = rand::rng().random_range(0.0..=self.jitter);
        nominal + nominal.mul_f64(extra)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schedule_is_one_two_four_seconds() {
        let p = RetryPolicy::default();
        assert_eq!(p.max_attempts(), 4);
        let delays: Vec<_> = (0..3).map(|r| p.nominal_delay(r)).collect();
        assert_eq!(
            delays,
            vec![
                Duration::from_secs(1),
                Duration::from_secs(2),
                Duration::from_secs(4)
            ]
        );
    }

    #[test]
    fn jitter_stays_within_bound() {
        let p = RetryPolicy::default();
        for r in 0..3 {
            let d = p.delay(r);
            let n = p.nominal_delay(r);
            assert!(d >= n && d <= n.mul_f64(1.25) + Duration::from_nanos(1));
        }
    }
}
