//! Successive primes for synthetic moduli streams.

/// Deterministic primality test by trial division; moduli here stay small.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// The primes `p >= start` in increasing order.
pub fn primes_from(start: u64) -> impl Iterator<Item = u64> {
    (start..).filter(|&n| is_prime(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_primes_from_1013() {
        let v: Vec<u64> = primes_from(1013).take(5).collect();
        assert_eq!(v, vec![1013, 1019, 1021, 1031, 1033]);
        assert_eq!(primes_from(0).take(4).collect::<Vec<_>>(), vec![2, 3, 5, 7]);
        assert!(!is_prime(1));
        assert!(is_prime(65_537));
    }
}
