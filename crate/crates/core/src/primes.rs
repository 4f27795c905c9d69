//! Prime sieve, `π(ℓ)`, and the check `π(ℓ) ≥ ℓ / (2 log ℓ)`.

use crate::error::{Error, Result};

/// Default ceiling for sieve sizes.
pub const SIEVE_CAP: u64 = 100_000_000;

/// Odd-only sieve of Eratosthenes up to `limit` inclusive.
pub struct Sieve {
    limit: u64,
    // bit i set <=> 2i+1 is composite
    composite: Vec<u64>,
}

impl Sieve {
    pub fn new(limit: u64, cap: u64) -> Result<Self> {
        if limit > cap {
            return Err(Error::Budget { what: "sieve limit", cap });
        }
        let odds = (limit / 2 + 1) as usize;
        let mut composite = vec![0u64; odds.div_ceil(64)];
        composite[0] |= 1; // 1 is not prime
        let mut i = 3u64;
        while i * i <= limit {
            if composite[(i / 2) as usize >> 6] >> ((i / 2) & 63) & 1 == 0 {
                let mut j = i * i;
                while j <= limit {
                    let o = (j / 2) as usize;
                    composite[o >> 6] |= 1 << (o & 63);
                    j += 2 * i;
                }
            }
            i += 2;
        }
        Ok(Sieve { limit, composite })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn is_prime(&self, x: u64) -> bool {
        assert!(x <= self.limit, "{x} is beyond the sieve limit {}", self.limit);
        match x {
            0 | 1 => false,
            2 => true,
            _ if x.is_multiple_of(2) => false,
            _ => {
                let o = (x / 2) as usize;
                self.composite[o >> 6] >> (o & 63) & 1 == 0
            }
        }
    }

    /// Primes up to `bound` (at most the sieve limit) in increasing order.
    pub fn primes_up_to(&self, bound: u64) -> Vec<u64> {
        let bound = bound.min(self.limit);
        let mut out = Vec::new();
        if bound >= 2 {
            out.push(2);
        }
        let mut x = 3;
        while x <= bound {
            if self.is_prime(x) {
                out.push(x);
            }
            x += 2;
        }
        out
    }
}

/// `π(ℓ)`, the number of primes `≤ ℓ`.
pub fn prime_pi(l: u64, cap: u64) -> Result<u64> {
    if l < 2 {
        return Err(Error::InvalidArgument(format!("prime_pi needs l >= 2, got {l}")));
    }
    let s = Sieve::new(l, cap)?;
    Ok(s.primes_up_to(l).len() as u64)
}

/// Primes `≤ bound`, empty if `bound < 2`.
pub fn primes_up_to(bound: u64, cap: u64) -> Result<Vec<u64>> {
    if bound < 2 {
        return Ok(Vec::new());
    }
    Ok(Sieve::new(bound, cap)?.primes_up_to(bound))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PntReport {
    pub l0: u64,
    pub l_max: u64,
    pub holds: bool,
    pub first_violation: Option<u64>,
}

/// Checks `π(ℓ) ≥ ℓ / (2 ln ℓ)` for every `ℓ ∈ [l0, l_max]`.
///
/// The comparison is `2·π(ℓ)·ln ℓ ≥ ℓ` with `ln ℓ` rounded outward by a few
/// ulps: a pass uses the lower end, a violation the upper end. A value
/// inside the rounding window counts as a violation.
pub fn verify_pnt_constant(l0: u64, l_max: u64, cap: u64) -> Result<PntReport> {
    if l0 < 2 || l0 > l_max {
        return Err(Error::InvalidArgument(format!(
            "need 2 <= l0 <= l_max, got l0={l0}, l_max={l_max}"
        )));
    }
    let s = Sieve::new(l_max, cap)?;
    let slack = 8.0 * f64::EPSILON;
    let mut pi = s.primes_up_to(l0 - 1).len() as u64;
    for l in l0..=l_max {
        if s.is_prime(l) {
            pi += 1;
        }
        let ln_lo = (l as f64).ln() * (1.0 - slack);
        if 2.0 * pi as f64 * ln_lo < l as f64 {
            return Ok(PntReport { l0, l_max, holds: false, first_violation: Some(l) });
        }
    }
    Ok(PntReport { l0, l_max, holds: true, first_violation: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(x: u64) -> bool {
        x >= 2 && (2..).take_while(|d| d * d <= x).all(|d| !x.is_multiple_of(d))
    }

    #[test]
    fn sieve_matches_trial_division() {
        let s = Sieve::new(5000, SIEVE_CAP).unwrap();
        for x in 0..=5000 {
            assert_eq!(s.is_prime(x), trial_division(x), "{x}");
        }
    }

    #[test]
    fn pi_examples() {
        assert_eq!(prime_pi(2, SIEVE_CAP).unwrap(), 1);
        assert_eq!(prime_pi(10, SIEVE_CAP).unwrap(), 4);
        assert_eq!(prime_pi(100, SIEVE_CAP).unwrap(), 25);
        assert_eq!(prime_pi(1_000_000, SIEVE_CAP).unwrap(), 78_498);
        assert!(prime_pi(1, SIEVE_CAP).is_err());
        assert!(matches!(prime_pi(1000, 100), Err(Error::Budget { .. })));
    }

    #[test]
    fn pnt_examples() {
        let r = verify_pnt_constant(2, 10, SIEVE_CAP).unwrap();
        assert!(!r.holds);
        assert_eq!(r.first_violation, Some(2));
        assert!(verify_pnt_constant(3, 3, SIEVE_CAP).unwrap().holds);
        assert!(verify_pnt_constant(3, 10_000, SIEVE_CAP).unwrap().holds);
        assert!(verify_pnt_constant(5, 4, SIEVE_CAP).is_err());
    }
}
