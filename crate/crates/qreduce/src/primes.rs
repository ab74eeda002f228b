//! Integer primality, factorization and squarefreeness with bounded effort.
//!
//! Primality is Miller-Rabin, deterministic for inputs below 3.3e24 via the
//! usual twelve-base certificate. Factorization is trial division followed
//! by Brent's variant of Pollard rho under an iteration budget, so callers
//! get a definite answer or an honest `Unknown`/`None`.

use num::bigint::{BigInt, BigUint};
use num::traits::{One, Zero};

/// Bases certifying Miller-Rabin for all n < 3_317_044_064_679_887_385_961_981.
const MR_BASES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Miller-Rabin primality test. Deterministic below 3.3e24; for larger
/// inputs the same fixed bases give a strong pseudoprime test.
pub fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    for &b in &MR_BASES {
        let b = BigUint::from(b);
        if n == &b {
            return true;
        }
        if (n % &b).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let r = n_minus_1.trailing_zeros().expect("n > 1 is odd here");
    let d = &n_minus_1 >> r;
    'bases: for &b in &MR_BASES {
        let mut x = BigUint::from(b).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Convenience wrapper for signed inputs; negative numbers are not prime.
pub fn is_probable_prime_int(n: &BigInt) -> bool {
    match n.to_biguint() {
        Some(u) => is_probable_prime(&u),
        None => false,
    }
}

fn gcd(a: BigUint, b: BigUint) -> BigUint {
    num::integer::gcd(a, b)
}

/// Brent-cycle Pollard rho. Returns a nontrivial factor of composite `n`
/// or `None` when the iteration budget runs out. `n` must be odd, > 1,
/// not prime and not a perfect power of a prime smaller than ~2^20.
fn pollard_rho(n: &BigUint, budget: &mut u64) -> Option<BigUint> {
    let one = BigUint::one();
    for c in 1u32..64 {
        let cc = BigUint::from(c);
        let mut y = BigUint::from(2u32);
        let mut m = 128u32;
        let mut g = one.clone();
        let mut r = 1u64;
        let mut q = one.clone();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = (&y * &y + &cc) % n;
            }
            let mut k = 0u64;
            while k < r && g.is_one() {
                ys = y.clone();
                let steps = m.min((r - k) as u32);
                for _ in 0..steps {
                    y = (&y * &y + &cc) % n;
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (&q * &diff) % n;
                }
                g = gcd(q.clone(), n.clone());
                k += steps as u64;
                if *budget < steps as u64 {
                    return None;
                }
                *budget -= steps as u64;
            }
            r *= 2;
            if m < 65536 {
                m *= 2;
            }
        }
        if g == *n {
            // Backtrack one step at a time to recover the factor.
            loop {
                ys = (&ys * &ys + &cc) % n;
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = gcd(diff, n.clone());
                if !g.is_one() {
                    break;
                }
                if *budget == 0 {
                    return None;
                }
                *budget -= 1;
            }
        }
        if g != *n {
            return Some(g);
        }
        // Unlucky cycle for this c; try the next increment.
    }
    None
}

/// Full factorization of `n > 0` as sorted `(prime, exponent)` pairs, or
/// `None` if the rho budget is exhausted before completion.
pub fn factor(n: &BigUint, budget: u64) -> Option<Vec<(BigUint, u32)>> {
    let mut budget = budget;
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    let mut rest = n.clone();
    if rest.is_zero() {
        return None;
    }
    let mut p = 2u64;
    while p < 100_000 && BigUint::from(p) * BigUint::from(p) <= rest {
        let bp = BigUint::from(p);
        if (&rest % &bp).is_zero() {
            let mut e = 0u32;
            while (&rest % &bp).is_zero() {
                rest /= &bp;
                e += 1;
            }
            out.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            push_prime(&mut out, m);
            continue;
        }
        // Perfect powers split without rho.
        if let Some((root, _)) = perfect_power(&m) {
            stack.push(root.clone());
            stack.push(&m / &root);
            continue;
        }
        match pollard_rho(&m, &mut budget) {
            Some(f) => {
                stack.push(&m / &f);
                stack.push(f);
            }
            None => return None,
        }
    }
    out.sort();
    Some(out)
}

fn push_prime(out: &mut Vec<(BigUint, u32)>, p: BigUint) {
    for (q, e) in out.iter_mut() {
        if *q == p {
            *e += 1;
            return;
        }
    }
    out.push((p, 1));
}

/// If `n = r^k` for some `k >= 2`, returns `(r, k)` with `k` maximal prime.
fn perfect_power(n: &BigUint) -> Option<(BigUint, u32)> {
    let bits = n.bits() as u32;
    for k in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
        if k > bits {
            break;
        }
        let r = n.nth_root(k);
        if r.pow(k) == *n {
            return Some((r, k));
        }
    }
    None
}

/// Outcome of a bounded squarefreeness decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SquarefreeStatus {
    Yes,
    No,
    /// The cofactor left after bounded effort could not be factored.
    Unknown,
}

/// Decides whether `|n|` is squarefree using trial division up to
/// `trial_bound` and a rho budget for the remaining cofactor.
pub fn squarefree_status(n: &BigInt, trial_bound: u64, rho_budget: u64) -> SquarefreeStatus {
    let n = n.magnitude().clone();
    if n.is_zero() {
        return SquarefreeStatus::No;
    }
    if n.is_one() {
        return SquarefreeStatus::Yes;
    }
    let mut rest = n;
    let mut p = 2u64;
    while p <= trial_bound {
        let bp = BigUint::from(p);
        if &bp * &bp > rest {
            break;
        }
        if (&rest % &bp).is_zero() {
            rest /= &bp;
            if (&rest % &bp).is_zero() {
                return SquarefreeStatus::No;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest.is_one() || is_probable_prime(&rest) {
        return SquarefreeStatus::Yes;
    }
    // All prime factors of `rest` now exceed min(trial_bound, rest^(1/2)).
    let b = BigUint::from(trial_bound);
    if perfect_power(&rest).is_some() {
        return SquarefreeStatus::No;
    }
    if rest < &b * &b * &b {
        // At most two prime factors and not a square: distinct primes.
        return SquarefreeStatus::Yes;
    }
    match factor(&rest, rho_budget) {
        Some(fs) => {
            if fs.iter().all(|(_, e)| *e == 1) {
                SquarefreeStatus::Yes
            } else {
                SquarefreeStatus::No
            }
        }
        None => SquarefreeStatus::Unknown,
    }
}

/// Floor of the square root of a nonnegative integer.
pub fn isqrt(n: &BigUint) -> BigUint {
    n.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::FromPrimitive;

    #[test]
    fn primality_small_and_large() {
        let primes = [2u64, 3, 5, 7, 97, 7919, 2147483647, 10000000019];
        for p in primes {
            assert!(is_probable_prime(&BigUint::from(p)), "{p}");
        }
        let composites = [1u64, 4, 100, 7917, 10000000021, 3215031751];
        for c in composites {
            assert!(!is_probable_prime(&BigUint::from(c)), "{c}");
        }
    }

    #[test]
    fn factor_recovers_structure() {
        let n = BigUint::from(2u32).pow(5) * BigUint::from(3u32).pow(2) * BigUint::from(10007u32);
        let fs = factor(&n, 1_000_000).unwrap();
        assert_eq!(
            fs,
            vec![
                (BigUint::from(2u32), 5),
                (BigUint::from(3u32), 2),
                (BigUint::from(10007u32), 1)
            ]
        );
    }

    #[test]
    fn factor_semiprime() {
        // Two 10-digit primes; rho must split this within budget.
        let p = BigUint::from(10000000019u64);
        let q = BigUint::from(10000000033u64);
        let fs = factor(&(&p * &q), 10_000_000).unwrap();
        assert_eq!(fs, vec![(p, 1), (q, 1)]);
    }

    #[test]
    fn squarefree_basics() {
        let sf = |n: i64| squarefree_status(&BigInt::from_i64(n).unwrap(), 1_000_000, 1_000_000);
        assert_eq!(sf(1), SquarefreeStatus::Yes);
        assert_eq!(sf(2), SquarefreeStatus::Yes);
        assert_eq!(sf(4), SquarefreeStatus::No);
        assert_eq!(sf(12), SquarefreeStatus::No);
        assert_eq!(sf(30), SquarefreeStatus::Yes);
        assert_eq!(sf(-5), SquarefreeStatus::Yes);
        assert_eq!(sf(49), SquarefreeStatus::No);
        assert_eq!(sf(0), SquarefreeStatus::No);
    }

    #[test]
    fn squarefree_large_composite() {
        // 10007^2 * 10009 is caught by trial division.
        let n = BigInt::from(10007i64 * 10007 * 10009);
        assert_eq!(squarefree_status(&n, 1_000_000, 0), SquarefreeStatus::No);
    }
}
