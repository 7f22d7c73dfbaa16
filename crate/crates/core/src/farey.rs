//! Farey series and the adjacency facts the leap decomposition relies on.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::scalar::{int, Rat};

/// All reduced p/q in [0, 1] with q ≤ n, ascending (next-term recurrence).
pub fn farey_series(n: u64) -> Result<Vec<Rat>> {
    if n == 0 {
        return Err(Error::Precondition("Farey order must be positive".into()));
    }
    let n = n as i64;
    let (mut a, mut b, mut c, mut d) = (0i64, 1i64, 1i64, n);
    let mut out = vec![Rat::new(BigInt::from(a), BigInt::from(b))];
    while c <= n {
        out.push(Rat::new(BigInt::from(c), BigInt::from(d)));
        let k = (n + b) / d;
        let (e, f) = (k * c - a, k * d - b);
        a = c;
        b = d;
        c = e;
        d = f;
        if a == 1 && b == 1 {
            break;
        }
    }
    Ok(out)
}

/// Two neighbours r > r' of a translated Farey series of order n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FareyPair {
    pub r: Rat,
    pub r_prime: Rat,
    pub n: u64,
}

impl FareyPair {
    pub fn new(r: Rat, r_prime: Rat, n: u64) -> Result<Self> {
        let p = FareyPair { r, r_prime, n };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        if self.r <= self.r_prime {
            return Err(Error::Precondition(format!("need r > r', got {} and {}", self.r, self.r_prime)));
        }
        let (k, k2) = (self.r.denom(), self.r_prime.denom());
        let n = BigInt::from(self.n);
        if k > &n || k2 > &n {
            return Err(Error::Precondition(format!("denominators exceed order {}", self.n)));
        }
        if cross(&self.r, &self.r_prime) != BigInt::one() {
            return Err(Error::Precondition("not adjacent".into()));
        }
        if k + k2 < n + BigInt::one() {
            return Err(Error::Precondition(format!("k + k' < n + 1 for ({}, {})", self.r, self.r_prime)));
        }
        Ok(())
    }
}

/// h·k' − h'·k for r = h/k, r' = h'/k'.
pub fn cross(r: &Rat, r_prime: &Rat) -> BigInt {
    r.numer() * r_prime.denom() - r_prime.numer() * r.denom()
}

/// (r − r', τ) with τ = 1 / (min{k, k'}·(r − r')), which is max{k, k'} for
/// adjacent pairs.
pub fn adjacency_invariants(r: &Rat, r_prime: &Rat) -> Result<(Rat, u64)> {
    if cross(r, r_prime) != BigInt::one() {
        return Err(Error::Precondition(format!("not adjacent: {} and {}", r, r_prime)));
    }
    let diff = r - r_prime;
    let kmin = r.denom().min(r_prime.denom()).clone();
    let tau = Rat::one() / (Rat::from_integer(kmin) * diff.clone());
    if !tau.is_integer() {
        return Err(Error::Precondition(format!("tau {} not integral", tau)));
    }
    let tau = tau.to_integer().to_u64().expect("tau fits in u64");
    Ok((diff, tau))
}

/// Smallest integer N with N > 2/λ − 1.
pub fn n_for_lambda(lambda: &Rat) -> Result<u64> {
    if !lambda.is_positive() {
        return Err(Error::Precondition("lambda must be positive".into()));
    }
    let bound = int(2) / lambda - int(1);
    let n = bound.floor().to_integer() + BigInt::one();
    Ok(n.to_u64().unwrap_or(1).max(1))
}

/// Union of 𝔉_{n0} + m for m = 1..d−1 in descending order, junction
/// duplicates removed. Runs from d down to 1.
pub fn descending_chain(n0: u64, d: u64) -> Result<Vec<Rat>> {
    if d < 2 {
        return Err(Error::Precondition("chain needs d >= 2".into()));
    }
    let base = farey_series(n0)?;
    let mut out: Vec<Rat> = Vec::new();
    for m in (1..d).rev() {
        for x in base.iter().rev() {
            let v = x + int(m as i64);
            if out.last() != Some(&v) {
                out.push(v);
            }
        }
    }
    Ok(out)
}

/// Euler's totient, used for series-length checks.
pub fn totient(n: u64) -> u64 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64
}

/// Reduced p/q split into (p, q) as i64.
pub fn parts(r: &Rat) -> (i64, i64) {
    (r.numer().to_i64().expect("numerator fits"), r.denom().to_i64().expect("denominator fits"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn small_series() {
        assert_eq!(farey_series(1).unwrap(), vec![rat(0, 1), rat(1, 1)]);
        let f5: Vec<Rat> = [(0, 1), (1, 5), (1, 4), (1, 3), (2, 5), (1, 2), (3, 5), (2, 3), (3, 4), (4, 5), (1, 1)]
            .iter()
            .map(|&(p, q)| rat(p, q))
            .collect();
        assert_eq!(farey_series(5).unwrap(), f5);
        assert_eq!(farey_series(7).unwrap().len(), 19);
        assert!(farey_series(0).is_err());
    }

    #[test]
    fn adjacency_examples() {
        assert_eq!(adjacency_invariants(&rat(2, 5), &rat(1, 3)).unwrap(), (rat(1, 15), 5));
        assert_eq!(adjacency_invariants(&rat(1, 1), &rat(4, 5)).unwrap(), (rat(1, 5), 5));
        assert_eq!(adjacency_invariants(&rat(1, 2), &rat(1, 3)).unwrap(), (rat(1, 6), 3));
        assert!(adjacency_invariants(&rat(1, 2), &rat(1, 5)).is_err());
        assert!(FareyPair::new(rat(2, 5), rat(1, 3), 5).is_ok());
        assert!(FareyPair::new(rat(1, 2), rat(1, 3), 5).is_err());
    }

    #[test]
    fn lambda_orders() {
        assert_eq!(n_for_lambda(&rat(1, 8)).unwrap(), 16);
        assert_eq!(n_for_lambda(&rat(1, 1)).unwrap(), 2);
        assert_eq!(n_for_lambda(&rat(1, 14)).unwrap(), 28);
    }

    #[test]
    fn chains() {
        assert_eq!(
            descending_chain(2, 3).unwrap(),
            vec![rat(3, 1), rat(5, 2), rat(2, 1), rat(3, 2), rat(1, 1)]
        );
        assert_eq!(descending_chain(1, 2).unwrap(), vec![rat(2, 1), rat(1, 1)]);
    }
}
