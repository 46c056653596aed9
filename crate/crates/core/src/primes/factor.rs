use num_integer::Integer;

use super::primality::is_prime;
use super::segment::base_primes;

/// Distinct prime divisors of `n`, ascending. Trial division by cached primes
/// up to `min(√n, 2^20)`; whatever survives is split with Pollard–Brent.
pub fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let base = base_primes(n.saturating_add(1).min(1 << 40));
    for &p in base.iter() {
        let p = u64::from(p);
        if p * p > n {
            break;
        }
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
    }
    if n > 1 {
        let reach = base.last().map_or(1, |&p| u64::from(p));
        if is_prime(n) || n <= reach.saturating_mul(reach) {
            out.push(n);
        } else {
            let mut big = Vec::new();
            split(n, &mut big);
            out.extend(big);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn split(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    split(d, out);
    split(n / d, out);
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// A nontrivial factor of the odd composite `n`.
fn pollard_brent(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g, mut r, mut q) = (2u64, 2u64, 1u64, 1u64, 1u64);
        let mut ys = 2u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..128.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    distinct_prime_factors(n)
        .into_iter()
        .fold(n, |acc, p| acc / p * (p - 1))
}
