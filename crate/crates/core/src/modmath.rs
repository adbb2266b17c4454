//! Exact modular arithmetic on machine integers.
//!
//! All moduli are bounded by [`MAX_MODULUS`] (2^31); products are formed in
//! `u128` so no intermediate can overflow.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus accepted anywhere in the crate.
pub const MAX_MODULUS: u64 = 1 << 31;

pub(crate) fn check_modulus(what: &'static str, m: u64) -> Result<()> {
    if m > MAX_MODULUS {
        return Err(Error::BoundExceeded {
            what,
            value: m,
            limit: MAX_MODULUS,
        });
    }
    Ok(())
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic trial-division primality test.
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

/// Largest `e` with `p^e | n` (`n > 0`, `p >= 2`).
pub fn valuation(mut n: u64, p: u64) -> u32 {
    debug_assert!(n > 0 && p >= 2);
    let mut e = 0;
    while n.is_multiple_of(p) {
        n /= p;
        e += 1;
    }
    e
}

/// Prime factorization with primes in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(q, _)| q)
    }

    pub fn exponent_of(&self, prime: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == prime)
            .map_or(0, |&(_, e)| e)
    }

    pub fn value(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(q, e)| q.pow(e))
            .product()
    }
}

/// Factorization of `n` by trial division; `2 <= n <= MAX_MODULUS`.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n < 2 {
        return Err(Error::domain(format!("cannot factorize {n}: need n >= 2")));
    }
    check_modulus("n", n)?;
    Ok(factorize_unchecked(n))
}

fn factorize_unchecked(mut n: u64) -> Factorization {
    let mut factors = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            factors.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        factors.push((n, 1));
    }
    Factorization { factors }
}

/// Euler's totient, from the factorization. `euler_phi(1) == 1`.
pub fn euler_phi(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::domain("euler_phi(0) is undefined"));
    }
    if n == 1 {
        return Ok(1);
    }
    let f = factorize(n)?;
    Ok(f.factors()
        .iter()
        .map(|&(q, e)| q.pow(e - 1) * (q - 1))
        .product())
}

/// Smallest `d >= 1` with `a^d = 1 (mod m)`.
pub fn multiplicative_order(a: u64, m: u64) -> Result<u64> {
    if m < 2 {
        return Err(Error::domain(format!("modulus {m} must be at least 2")));
    }
    check_modulus("modulus", m)?;
    let a = a % m;
    if gcd(a, m) != 1 {
        return Err(Error::domain(format!("{a} is not a unit modulo {m}")));
    }
    let phi = euler_phi(m)?;
    let mut order = phi;
    if phi > 1 {
        for &(q, _) in factorize_unchecked(phi).factors() {
            while order % q == 0 && pow_mod(a, order / q, m) == 1 {
                order /= q;
            }
        }
    }
    Ok(order)
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p == 2 {
        return Err(Error::domain("p must be an odd prime, got 2"));
    }
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    Ok(())
}

/// Units of order exactly `p` modulo `2 p^r`.
///
/// For `r >= 2` these are `(2p^{r-1}+1)^i = 2 i p^{r-1} + 1`, `i = 1..p-1`; both
/// forms are computed and checked against each other and against the order.
/// For `r = 1` the unit group of `Z_{2p}` has order `p - 1` and the set is empty.
pub fn order_p_elements(p: u64, r: u32) -> Result<BTreeSet<u64>> {
    check_odd_prime(p)?;
    if r == 0 {
        return Err(Error::domain("r must be at least 1"));
    }
    let pr1 = checked_pow(p, r - 1)?;
    let m = pr1
        .checked_mul(2 * p)
        .filter(|&m| m <= MAX_MODULUS)
        .ok_or(Error::BoundExceeded {
            what: "2p^r",
            value: u64::MAX,
            limit: MAX_MODULUS,
        })?;
    if r == 1 {
        return Ok(BTreeSet::new());
    }
    let generator = 2 * pr1 + 1;
    let mut out = BTreeSet::new();
    for i in 1..p {
        let closed = (2 * i * pr1 + 1) % m;
        let powered = pow_mod(generator, i, m);
        if closed != powered {
            return Err(Error::theory(format!(
                "(2p^(r-1)+1)^{i} = {powered} but 2ip^(r-1)+1 = {closed} mod {m}"
            )));
        }
        let ord = multiplicative_order(closed, m)?;
        if ord != p {
            return Err(Error::theory(format!(
                "{closed} has order {ord} modulo {m}, expected {p}"
            )));
        }
        out.insert(closed);
    }
    Ok(out)
}

/// Verification path for [`order_p_elements`]: scans every unit of `Z_{2p^r}`.
pub fn order_p_elements_brute(p: u64, r: u32) -> Result<BTreeSet<u64>> {
    check_odd_prime(p)?;
    if r == 0 {
        return Err(Error::domain("r must be at least 1"));
    }
    let m = 2 * checked_pow(p, r)?;
    check_modulus("2p^r", m)?;
    Ok((1..m)
        .filter(|&u| gcd(u, m) == 1)
        .filter(|&u| {
            let mut acc = u;
            let mut d = 1;
            while acc != 1 {
                acc = mul_mod(acc, u, m);
                d += 1;
            }
            d == p
        })
        .collect())
}

pub(crate) fn checked_pow(base: u64, exp: u32) -> Result<u64> {
    base.checked_pow(exp)
        .filter(|&v| v <= MAX_MODULUS)
        .ok_or(Error::BoundExceeded {
            what: "power",
            value: u64::MAX,
            limit: MAX_MODULUS,
        })
}

/// Extended Euclid: returns `(g, x, y)` with `a x + b y = g`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// The inverse of `a` modulo `m`, in `[0, m)`.
pub fn mod_inverse(a: u64, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::domain("modulus must be positive"));
    }
    if m == 1 {
        return Ok(0);
    }
    let (g, x, _) = ext_gcd((a % m) as i128, m as i128);
    if g != 1 {
        return Err(Error::domain(format!("{a} is not invertible modulo {m}")));
    }
    Ok(x.rem_euclid(m as i128) as u64)
}

fn check_coprime(m1: u64, m2: u64) -> Result<()> {
    if m1 == 0 || m2 == 0 {
        return Err(Error::domain("moduli must be positive"));
    }
    if gcd(m1, m2) != 1 {
        return Err(Error::domain(format!("moduli {m1} and {m2} are not coprime")));
    }
    Ok(())
}

/// `a -> (a mod m1, a mod m2)` for coprime `m1`, `m2`.
pub fn crt_split(a: u64, m1: u64, m2: u64) -> Result<(u64, u64)> {
    check_coprime(m1, m2)?;
    Ok((a % m1, a % m2))
}

/// Inverse of [`crt_split`]: the unique `a` in `[0, m1 m2)` with the given residues.
pub fn crt_combine(r1: u64, r2: u64, m1: u64, m2: u64) -> Result<u64> {
    check_coprime(m1, m2)?;
    let m = m1 as u128 * m2 as u128;
    let inv = mod_inverse(m1 % m2, m2)? as u128;
    // a = r1 + m1 * ((r2 - r1) * m1^{-1} mod m2)
    let r1 = (r1 % m1) as u128;
    let diff = ((r2 % m2) as u128 + m2 as u128 - r1 % m2 as u128) % m2 as u128;
    let a = r1 + m1 as u128 * (diff * inv % m2 as u128);
    Ok((a % m) as u64)
}

/// Merges `x = r1 (mod m1)` and `x = r2 (mod m2)` for arbitrary moduli.
/// Returns `None` when the system is inconsistent.
pub fn crt_merge(r1: u64, m1: u64, r2: u64, m2: u64) -> Option<(u64, u64)> {
    let g = gcd(m1, m2);
    let (r1, r2) = (r1 % m1, r2 % m2);
    if (r1 as i128 - r2 as i128).rem_euclid(g as i128) != 0 {
        return None;
    }
    let l = m1 / g * m2;
    let m1g = m1 / g;
    let m2g = m2 / g;
    // r1 + m1 * k with m1 k = r2 - r1 (mod m2)  =>  k = (r2-r1)/g * (m1/g)^{-1} (mod m2/g)
    let diff = (r2 as i128 - r1 as i128) / g as i128;
    let k = if m2g == 1 {
        0
    } else {
        let inv = mod_inverse(m1g % m2g, m2g).ok()? as i128;
        (diff.rem_euclid(m2g as i128) * inv).rem_euclid(m2g as i128)
    };
    let x = (r1 as i128 + m1 as i128 * k).rem_euclid(l as i128);
    Some((x as u64, l))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order_by_powering(a: u64, m: u64) -> u64 {
        let mut acc = a % m;
        let mut d = 1;
        while acc != 1 {
            acc = mul_mod(acc, a, m);
            d += 1;
        }
        d
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(18).unwrap().factors(), &[(2, 1), (3, 2)]);
        assert_eq!(factorize(45).unwrap().factors(), &[(3, 2), (5, 1)]);
        assert_eq!(factorize(126).unwrap().factors(), &[(2, 1), (3, 2), (7, 1)]);
        assert_eq!(factorize(97).unwrap().factors(), &[(97, 1)]);
        assert!(matches!(factorize(1), Err(Error::Domain(_))));
        assert!(matches!(factorize(0), Err(Error::Domain(_))));
        assert!(matches!(
            factorize(MAX_MODULUS + 1),
            Err(Error::BoundExceeded { .. })
        ));
        assert_eq!(factorize(MAX_MODULUS).unwrap().factors(), &[(2, 31)]);
        assert_eq!(factorize(999_999_937).unwrap().value(), 999_999_937);
    }

    #[test]
    fn euler_phi_examples() {
        assert_eq!(euler_phi(18).unwrap(), 6);
        assert_eq!(euler_phi(1).unwrap(), 1);
        assert_eq!(euler_phi(45).unwrap(), 24);
        for n in 1..300u64 {
            let brute = (1..=n).filter(|&u| gcd(u, n) == 1).count() as u64;
            assert_eq!(euler_phi(n).unwrap(), brute, "n = {n}");
        }
    }

    #[test]
    fn multiplicative_order_examples() {
        assert_eq!(order_by_powering(7, 18), 3);
        assert_eq!(order_by_powering(31, 45), 3);
        assert_eq!(multiplicative_order(7, 18).unwrap(), 3);
        assert_eq!(multiplicative_order(1, 18).unwrap(), 1);
        assert_eq!(multiplicative_order(31, 45).unwrap(), 3);
        assert!(matches!(multiplicative_order(6, 18), Err(Error::Domain(_))));
        assert!(matches!(multiplicative_order(1, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn multiplicative_order_matches_powering_and_divides_phi() {
        for m in 2..200u64 {
            let phi = euler_phi(m).unwrap();
            for a in (1..m).filter(|&a| gcd(a, m) == 1) {
                let d = multiplicative_order(a, m).unwrap();
                assert_eq!(d, order_by_powering(a, m), "a = {a}, m = {m}");
                assert_eq!(phi % d, 0);
            }
        }
    }

    #[test]
    fn order_p_elements_examples() {
        // Brute force over the units of Z_18: 7 and 13 are the only elements of order 3.
        let brute: BTreeSet<u64> = (1..18u64)
            .filter(|&u| gcd(u, 18) == 1 && order_by_powering(u, 18) == 3)
            .collect();
        assert_eq!(brute, BTreeSet::from([7, 13]));
        assert_eq!(order_p_elements(3, 2).unwrap(), brute);
        // Z_6^* = {1, 5} and Z_10^* = {1, 3, 7, 9} have no elements of order p.
        assert!(order_p_elements(3, 1).unwrap().is_empty());
        assert!(order_p_elements(5, 1).unwrap().is_empty());
        assert!(order_p_elements_brute(3, 1).unwrap().is_empty());
        assert!(order_p_elements_brute(5, 1).unwrap().is_empty());
        assert!(matches!(order_p_elements(2, 3), Err(Error::Domain(_))));
        assert!(matches!(order_p_elements(9, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn order_p_elements_complete() {
        for (p, r) in [(3, 2), (3, 3), (3, 4), (5, 2), (5, 3), (7, 2), (11, 2), (13, 2)] {
            assert_eq!(
                order_p_elements(p, r).unwrap(),
                order_p_elements_brute(p, r).unwrap(),
                "p = {p}, r = {r}"
            );
        }
    }

    #[test]
    fn mod_inverse_examples() {
        assert_eq!(mod_inverse(2, 5).unwrap(), 3);
        assert_eq!(mod_inverse(1, 17).unwrap(), 1);
        assert_eq!(mod_inverse(7, 18).unwrap(), 13);
        assert!(matches!(mod_inverse(6, 18), Err(Error::Domain(_))));
    }

    #[test]
    fn crt_examples() {
        assert_eq!(crt_split(31, 9, 5).unwrap(), (4, 1));
        assert_eq!(crt_combine(0, 0, 9, 5).unwrap(), 0);
        assert!(matches!(crt_split(3, 6, 4), Err(Error::Domain(_))));
        assert!(matches!(crt_combine(1, 1, 6, 4), Err(Error::Domain(_))));
        for x in 0..45 {
            let (u, v) = crt_split(x, 9, 5).unwrap();
            assert_eq!(crt_combine(u, v, 9, 5).unwrap(), x);
        }
    }

    #[test]
    fn crt_merge_handles_shared_factors() {
        assert_eq!(crt_merge(1, 4, 3, 6), Some((9, 12)));
        assert_eq!(crt_merge(0, 4, 1, 6), None);
        assert_eq!(crt_merge(2, 5, 0, 1), Some((2, 5)));
        for m1 in 1..13u64 {
            for m2 in 1..13u64 {
                for r1 in 0..m1 {
                    for r2 in 0..m2 {
                        let brute = (0..lcm(m1, m2)).find(|x| x % m1 == r1 && x % m2 == r2);
                        assert_eq!(
                            crt_merge(r1, m1, r2, m2).map(|(x, _)| x),
                            brute,
                            "{r1} mod {m1}, {r2} mod {m2}"
                        );
                    }
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn crt_round_trip(m1 in 1u64..5000, m2 in 1u64..5000, seed in 0u64..u64::MAX) {
            proptest::prop_assume!(gcd(m1, m2) == 1);
            let x = seed % (m1 * m2);
            let (u, v) = crt_split(x, m1, m2).unwrap();
            proptest::prop_assert_eq!(crt_combine(u, v, m1, m2).unwrap(), x);
        }

        #[test]
        fn large_moduli_do_not_overflow(a in 1u64..MAX_MODULUS, e in 0u64..u64::MAX) {
            let m = MAX_MODULUS - 1;
            let v = pow_mod(a, e, m);
            proptest::prop_assert!(v < m);
        }
    }
}
