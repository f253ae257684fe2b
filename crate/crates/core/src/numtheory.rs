//! Integer predicates and sequences: primality, factorization, divisor sums,
//! primitive roots, and smooth-number sets.
//!
//! Factorization runs trial division against a sieve of primes below 2^20,
//! which is complete for every n < 2^40. Larger cofactors that fail the
//! primality test are split with Brent's variant of Pollard rho.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Primes below this bound are sieved once and shared.
pub const SIEVE_LIMIT: u64 = 1 << 20;

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(SIEVE_LIMIT))
}

/// All primes `p <= limit`, ascending.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// The first `count` primes.
pub fn first_primes(count: usize) -> Vec<u64> {
    if count == 0 {
        return Vec::new();
    }
    // p_k < k (ln k + ln ln k) for k >= 6
    let k = count.max(6) as f64;
    let bound = (k * (k.ln() + k.ln().ln())).ceil() as u64 + 16;
    let mut primes = primes_up_to(bound);
    primes.truncate(count);
    primes
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut base = base % m;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn is_power_of_two(n: u64) -> bool {
    n != 0 && n & (n - 1) == 0
}

/// Deterministic primality for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    // These twelve witnesses are sufficient below 3.3 * 10^24.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeFactorization {
    pub n: u64,
    /// `(prime, exponent)` pairs, ascending by prime.
    pub factors: Vec<(u64, u32)>,
}

impl PrimeFactorization {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Re-multiplies the factors. Only meaningful when it fits in a `u64`,
    /// which is always the case for a factorization produced by [`factorize`].
    pub fn product(&self) -> u64 {
        self.factors.iter().map(|&(p, e)| p.pow(e)).product()
    }

    /// True when every prime factor lies in `primes`.
    pub fn is_smooth_over(&self, primes: &[u64]) -> bool {
        self.primes().all(|p| primes.contains(&p))
    }
}

fn pollard_brent(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| ((x as u128 * x as u128 + c as u128) % n as u128) as u64;
        let (mut x, mut y, mut q, mut g) = (2u64, 2u64, 1u64, 1u64);
        let mut r = 1u64;
        let mut ys = 2u64;
        const M: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..M.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += M;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    split_large(d, out);
    split_large(n / d, out);
}

pub fn factorize(n: u64) -> PrimeFactorization {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut factors = Vec::new();
    let mut m = n;
    for &p in small_primes() {
        if p * p > m {
            break;
        }
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    if m > 1 {
        if m < SIEVE_LIMIT * SIEVE_LIMIT || is_prime(m) {
            factors.push((m, 1));
        } else {
            let mut big = Vec::new();
            split_large(m, &mut big);
            big.sort_unstable();
            for p in big {
                match factors.last_mut() {
                    Some((q, e)) if *q == p => *e += 1,
                    _ => factors.push((p, 1)),
                }
            }
        }
    }
    PrimeFactorization { n, factors }
}

pub fn euler_phi(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    factorize(n)
        .factors
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Sum of the divisors `d` of `x` with `d < x`; `0` for `x` in `{0, 1}`.
pub fn proper_divisor_sum(x: u64) -> u64 {
    if x <= 1 {
        return 0;
    }
    let sigma: u128 = factorize(x)
        .factors
        .iter()
        .map(|&(p, e)| {
            let p = p as u128;
            (p.pow(e + 1) - 1) / (p - 1)
        })
        .product();
    (sigma - x as u128) as u64
}

/// Proper divisor sums for every `x < limit`, by additive sieve.
pub fn proper_divisor_sums(limit: usize) -> Vec<u64> {
    let mut sums = vec![0u64; limit];
    for d in 1..limit {
        let mut m = 2 * d;
        while m < limit {
            sums[m] += d as u64;
            m += d;
        }
    }
    sums
}

/// Whether `a` generates the multiplicative group modulo the prime `p`.
///
/// Checks `a^((p-1)/q) != 1` for each prime `q | p-1` instead of computing
/// the full order.
pub fn is_primitive_root(a: u64, p: u64) -> Result<bool> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if a.is_multiple_of(p) {
        return Err(Error::InvalidArgument(format!(
            "{a} is divisible by the modulus {p}"
        )));
    }
    if p == 2 {
        return Ok(true);
    }
    let order = p - 1;
    Ok(factorize(order)
        .primes()
        .all(|q| pow_mod(a, order / q, p) != 1))
}

pub fn is_fermat_prime(n: u64) -> bool {
    if n < 3 || !is_power_of_two(n - 1) || !is_prime(n) {
        return false;
    }
    is_power_of_two(u64::from((n - 1).trailing_zeros()))
}

/// True when every prime factor of `m >= 1` lies in `primes`.
pub fn is_smooth(m: u64, primes: &[u64]) -> bool {
    let mut m = m;
    for &p in primes {
        if p < 2 {
            continue;
        }
        while m.is_multiple_of(p) {
            m /= p;
        }
    }
    m == 1
}

/// Primes `n` with `n - 1` smooth over `primes`. With `{2, 3}` these are the
/// Pierpont primes; with `{2}` the Fermat primes together with 2.
pub fn is_one_plus_smooth_prime(n: u64, primes: &[u64]) -> bool {
    is_prime(n) && is_smooth(n - 1, primes)
}

/// Numbers up to `limit` whose prime factors all lie in `base_primes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothSet {
    pub base_primes: Vec<u64>,
    pub limit: u64,
    pub members: Vec<u64>,
}

impl SmoothSet {
    pub fn contains(&self, n: u64) -> bool {
        self.members.binary_search(&n).is_ok()
    }
}

fn checked_base(primes: &[u64]) -> Result<Vec<u64>> {
    if primes.is_empty() {
        return Err(Error::InvalidArgument("empty prime set".into()));
    }
    if let Some(&p) = primes.iter().find(|&&p| !is_prime(p)) {
        return Err(Error::NotPrime(p));
    }
    let mut base = primes.to_vec();
    base.sort_unstable();
    base.dedup();
    Ok(base)
}

pub fn smooth_set(primes: &[u64], limit: u64) -> Result<SmoothSet> {
    let base_primes = checked_base(primes)?;
    let mut members = vec![1u64];
    for &p in &base_primes {
        let mut grown = Vec::new();
        for &m in &members {
            let mut v = m;
            while let Some(next) = v.checked_mul(p).filter(|&x| x <= limit) {
                grown.push(next);
                v = next;
            }
        }
        members.extend(grown);
    }
    members.retain(|&m| m <= limit);
    members.sort_unstable();
    Ok(SmoothSet {
        base_primes,
        limit,
        members,
    })
}

/// `S ∪ 2S` for the smooth set `S`, truncated at `limit`.
pub fn double_smooth_set(primes: &[u64], limit: u64) -> Result<SmoothSet> {
    let mut set = smooth_set(primes, limit)?;
    let doubled: Vec<u64> = set
        .members
        .iter()
        .filter_map(|&m| m.checked_mul(2).filter(|&d| d <= limit))
        .collect();
    set.members.extend(doubled);
    set.members.sort_unstable();
    set.members.dedup();
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_examples() {
        assert!(is_prime(2));
        assert!(is_prime(257));
        assert!(!is_prime(91));
        assert!(!is_prime(1));
        assert!(!is_prime(0));
        assert!(is_prime(65537));
        assert!(is_prime(18446744073709551557)); // largest 64-bit prime
        assert!(!is_prime(3215031751)); // strong pseudoprime to bases 2,3,5,7
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).factors.is_empty());
        assert_eq!(factorize(54).factors, vec![(2, 1), (3, 3)]);
        assert_eq!(factorize(21).factors, vec![(3, 1), (7, 1)]);
        let big = 1_000_003u64 * 1_000_033;
        assert_eq!(factorize(big).factors, vec![(1_000_003, 1), (1_000_033, 1)]);
        let p = (1u64 << 61) - 1;
        assert_eq!(factorize(p).factors, vec![(p, 1)]);
        let semi = 4_294_967_291u64 * 4_294_967_279; // two primes above 2^31
        let f = factorize(semi);
        assert_eq!(f.factors, vec![(4_294_967_279, 1), (4_294_967_291, 1)]);
        assert_eq!(f.product(), semi);
    }

    #[test]
    fn divisor_sums() {
        assert_eq!(proper_divisor_sum(6), 6);
        assert_eq!(proper_divisor_sum(28), 28);
        assert_eq!(proper_divisor_sum(1), 0);
        assert_eq!(proper_divisor_sum(0), 0);
        assert_eq!(proper_divisor_sum(220), 284);
        assert_eq!(proper_divisor_sum(284), 220);
        let sieve = proper_divisor_sums(2000);
        for (x, &s) in sieve.iter().enumerate() {
            assert_eq!(s, proper_divisor_sum(x as u64), "x = {x}");
        }
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(is_primitive_root(2, 3), Ok(true));
        assert_eq!(is_primitive_root(2, 7), Ok(false));
        assert_eq!(is_primitive_root(3, 7), Ok(true));
        assert_eq!(is_primitive_root(2, 9), Err(Error::NotPrime(9)));
        assert!(is_primitive_root(14, 7).is_err());
    }

    #[test]
    fn fermat_and_pierpont() {
        assert!(is_fermat_prime(257));
        assert!(is_fermat_prime(65537));
        assert!(is_fermat_prime(3));
        assert!(!is_fermat_prime(9));
        assert!(!is_fermat_prime(2));
        assert!(!is_fermat_prime(129)); // 2^7 + 1, exponent not a power of two
        assert!(is_one_plus_smooth_prime(163, &[2, 3]));
        assert!(!is_one_plus_smooth_prime(11, &[2, 3]));
        assert!(is_one_plus_smooth_prime(11, &[2, 5]));
        assert!(is_one_plus_smooth_prime(2, &[2, 3]));
    }

    #[test]
    fn smooth_sets() {
        assert_eq!(smooth_set(&[2], 10).unwrap().members, vec![1, 2, 4, 8]);
        assert_eq!(
            smooth_set(&[3], 100).unwrap().members,
            vec![1, 3, 9, 27, 81]
        );
        assert_eq!(
            smooth_set(&[3, 2], 13).unwrap().members,
            vec![1, 2, 3, 4, 6, 8, 9, 12]
        );
        assert_eq!(
            double_smooth_set(&[3], 100).unwrap().members,
            vec![1, 2, 3, 6, 9, 18, 27, 54, 81]
        );
        assert_eq!(
            double_smooth_set(&[2], 8).unwrap().members,
            vec![1, 2, 4, 8]
        );
        assert_eq!(
            double_smooth_set(&[7], 100).unwrap().members,
            vec![1, 2, 7, 14, 49, 98]
        );
        assert!(smooth_set(&[], 10).is_err());
        assert_eq!(smooth_set(&[4], 10), Err(Error::NotPrime(4)));
    }

    #[test]
    fn first_primes_counts() {
        assert_eq!(first_primes(5), vec![2, 3, 5, 7, 11]);
        assert_eq!(first_primes(10_000).last(), Some(&104_729));
        assert_eq!(euler_phi(15), 8);
        assert_eq!(euler_phi(1), 1);
    }
}
