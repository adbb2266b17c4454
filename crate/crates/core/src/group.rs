//! Normal-form arithmetic in `Z_N x|_phi Z_p`.
//!
//! Elements are pairs `(a, b)` standing for `x^a y^b`, with `x = (1, 0)` and
//! `y = (0, 1)`. The twist is fixed by `phi11 = phi(1)(1)`: `y x = x^phi11 y`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modmath::{self, add_mod, check_modulus, gcd, mul_mod, pow_mod};

/// `x^a y^b` in normal form. Ordering is lexicographic on `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Element {
    pub a: u64,
    pub b: u64,
}

impl Element {
    pub const IDENTITY: Element = Element { a: 0, b: 0 };

    pub const fn new(a: u64, b: u64) -> Self {
        Element { a, b }
    }

    /// Renders as `x^a*y^b`.
    pub fn power_form(&self) -> String {
        format!("x^{}*y^{}", self.a, self.b)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

fn parse_u64(s: &str, whole: &str) -> Result<u64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer {s:?} in element {whole:?}")))
}

impl FromStr for Element {
    type Err = Error;

    /// Accepts `(a,b)`, `x^a*y^b`, `x^a`, `y^b`, `x`, `y` and `e`.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let (a, b) = inner
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("expected (a,b), got {s:?}")))?;
            return Ok(Element::new(parse_u64(a, s)?, parse_u64(b, s)?));
        }
        if t == "e" {
            return Ok(Element::IDENTITY);
        }
        let mut el = Element::IDENTITY;
        let (mut seen_x, mut seen_y) = (false, false);
        for factor in t.split('*') {
            let (base, exp) = match factor.split_once('^') {
                Some((base, exp)) => (base, parse_u64(exp, s)?),
                None => (factor, 1),
            };
            match base {
                "x" if !seen_x && !seen_y => {
                    el.a = exp;
                    seen_x = true;
                }
                "y" if !seen_y => {
                    el.b = exp;
                    seen_y = true;
                }
                _ => return Err(Error::Parse(format!("expected x^a*y^b, got {s:?}"))),
            }
        }
        Ok(el)
    }
}

/// `N = 2^t0 p^r` with `t0` in `{0, 1}` and `p` an odd prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Family {
    pub p: u64,
    pub r: u32,
    pub t0: u32,
}

impl Family {
    pub fn modulus(&self) -> u64 {
        (1 << self.t0) * self.p.pow(self.r)
    }

    /// `2^t0 p^(r-1) + 1` when `r >= 2`. For `r = 1` there is no unit of
    /// order `p` modulo `2^t0 p`, so the only admissible twist is 1.
    pub fn canonical_phi11(&self) -> u64 {
        if self.r >= 2 {
            (1 << self.t0) * self.p.pow(self.r - 1) + 1
        } else {
            1
        }
    }

    /// `2^t p^s`, the index of `<x^(2^t p^s)>` in `<x>`.
    pub fn x_index(&self, t: u32, s: u32) -> u64 {
        (1 << t) * self.p.pow(s)
    }
}

const TWIST_TABLE_LIMIT: u64 = 1 << 16;

/// Validated parameters of `Z_N x|_phi Z_p` with its twist table.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    n: u64,
    p: u64,
    phi11: u64,
    /// `phi11^b mod N` for `b` in `[0, p)`; empty when `p` is too large to tabulate.
    twist: Vec<u64>,
    /// `sum_{j<p} phi11^j mod N`, so that `(x^a y^b)^p = x^(a * power_sum)` for `b != 0`.
    power_sum: u64,
}

impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        (self.n, self.p, self.phi11) == (other.n, other.p, other.phi11)
    }
}

impl Eq for GroupSpec {}

#[derive(Serialize, Deserialize)]
struct SpecParams {
    #[serde(rename = "N")]
    n: u64,
    p: u64,
    phi11: u64,
}

impl Serialize for GroupSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpecParams {
            n: self.n,
            p: self.p,
            phi11: self.phi11,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SpecParams::deserialize(d)?;
        GroupSpec::new(raw.n, raw.p, raw.phi11).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z_{} x| Z_{} (phi11 = {})", self.n, self.p, self.phi11)
    }
}

/// Validates `(N, p, phi11)`; see [`GroupSpec::new`].
pub fn validate_spec(n: u64, p: u64, phi11: u64) -> Result<GroupSpec> {
    GroupSpec::new(n, p, phi11)
}

impl GroupSpec {
    /// Requires `N >= 2`, `p` an odd prime, `phi11` a unit in `[1, N)` with
    /// `phi11^p = 1 (mod N)`; the order of `phi11` is then 1 or `p`.
    pub fn new(n: u64, p: u64, phi11: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("N = {n} must be at least 2")));
        }
        check_modulus("N", n)?;
        check_modulus("p", p)?;
        if !modmath::is_prime(p) {
            return Err(Error::domain(format!("p = {p} is not prime")));
        }
        if p == 2 {
            return Err(Error::domain("p must be an odd prime"));
        }
        if phi11 == 0 || phi11 >= n {
            return Err(Error::domain(format!("phi11 = {phi11} is not in [1, {n})")));
        }
        if gcd(phi11, n) != 1 {
            return Err(Error::domain(format!(
                "phi11 = {phi11} is not a unit modulo {n}"
            )));
        }
        if pow_mod(phi11, p, n) != 1 {
            let order = modmath::multiplicative_order(phi11, n)?;
            return Err(Error::domain(format!(
                "phi11 = {phi11} has order {order} modulo {n}; need 1 or {p}"
            )));
        }
        let twist = if p <= TWIST_TABLE_LIMIT {
            let mut t = Vec::with_capacity(p as usize);
            let mut acc = 1 % n;
            for _ in 0..p {
                t.push(acc);
                acc = mul_mod(acc, phi11, n);
            }
            t
        } else {
            Vec::new()
        };
        let power_sum = if phi11 == 1 {
            p % n
        } else {
            let mut acc = 0;
            let mut term = 1 % n;
            for _ in 0..p {
                acc = add_mod(acc, term, n);
                term = mul_mod(term, phi11, n);
            }
            acc
        };
        Ok(GroupSpec {
            n,
            p,
            phi11,
            twist,
            power_sum,
        })
    }

    /// The canonical group of a family: `Z_{2^t0 p^r} x| Z_p` with `phi11 = 2^t0 p^(r-1) + 1`
    /// (the direct product when `r = 1`).
    pub fn canonical(p: u64, r: u32, t0: u32) -> Result<Self> {
        if t0 > 1 {
            return Err(Error::domain(format!("t0 = {t0} must be 0 or 1")));
        }
        if r == 0 {
            return Err(Error::domain("r must be at least 1"));
        }
        if !modmath::is_prime(p) || p == 2 {
            return Err(Error::domain(format!("p = {p} is not an odd prime")));
        }
        let fam = Family { p, r, t0 };
        let n = (1u64 << t0)
            .checked_mul(modmath::checked_pow(p, r)?)
            .ok_or(Error::BoundExceeded {
                what: "N",
                value: u64::MAX,
                limit: modmath::MAX_MODULUS,
            })?;
        GroupSpec::new(n, p, fam.canonical_phi11())
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn phi11(&self) -> u64 {
        self.phi11
    }

    pub fn order(&self) -> u64 {
        self.n * self.p
    }

    pub fn is_direct_product(&self) -> bool {
        self.phi11 == 1
    }

    /// `phi11^b mod N`.
    #[inline]
    pub fn twist(&self, b: u64) -> u64 {
        match self.twist.get(b as usize) {
            Some(&v) => v,
            None => pow_mod(self.phi11, b, self.n),
        }
    }

    /// The family `N = 2^t0 p^r` this spec belongs to, if any.
    pub fn family(&self) -> Option<Family> {
        let t0 = modmath::valuation(self.n, 2);
        if t0 > 1 {
            return None;
        }
        let odd = self.n >> t0;
        let r = modmath::valuation(odd, self.p);
        if r == 0 || self.p.pow(r) != odd {
            return None;
        }
        Some(Family { p: self.p, r, t0 })
    }

    /// The family, if `phi11` is its canonical twist.
    pub fn canonical_family(&self) -> Option<Family> {
        self.family()
            .filter(|fam| fam.canonical_phi11() == self.phi11)
    }

    /// `i` in `[0, p)` with `phi11 = canonical_phi11^i (mod N)`.
    pub fn twist_index(&self) -> Option<u64> {
        let fam = self.family()?;
        if self.phi11 == 1 {
            return Some(0);
        }
        let step = fam.canonical_phi11() - 1;
        let i = ((self.phi11 - 1) / step) % self.p;
        ((self.phi11 - 1).is_multiple_of(step) && pow_mod(fam.canonical_phi11(), i, self.n) == self.phi11)
            .then_some(i)
    }

    /// Range-checked constructor for an element of this group.
    pub fn element(&self, a: u64, b: u64) -> Result<Element> {
        if a >= self.n || b >= self.p {
            return Err(Error::domain(format!(
                "({a},{b}) is not in normal form for {self}"
            )));
        }
        Ok(Element::new(a, b))
    }

    /// Reduces arbitrary exponents into normal form.
    pub fn reduce(&self, a: u64, b: u64) -> Element {
        Element::new(a % self.n, b % self.p)
    }

    pub fn contains(&self, g: Element) -> bool {
        g.a < self.n && g.b < self.p
    }

    pub fn x(&self) -> Element {
        self.reduce(1, 0)
    }

    pub fn y(&self) -> Element {
        Element::new(0, 1)
    }

    /// Index `a p + b`; agrees with the lexicographic order on elements.
    #[inline]
    pub fn index_of(&self, g: Element) -> usize {
        (g.a * self.p + g.b) as usize
    }

    #[inline]
    pub fn element_at(&self, index: usize) -> Element {
        let i = index as u64;
        Element::new(i / self.p, i % self.p)
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.n).flat_map(move |a| (0..self.p).map(move |b| Element::new(a, b)))
    }

    #[inline]
    pub fn mul(&self, g: Element, h: Element) -> Element {
        Element::new(
            add_mod(g.a, mul_mod(self.twist(g.b), h.a, self.n), self.n),
            add_mod(g.b, h.b, self.p),
        )
    }

    pub fn inv(&self, g: Element) -> Element {
        let nb = (self.p - g.b) % self.p;
        // phi11^{-b} = phi11^{p-b}
        let a = mul_mod(self.twist(nb), g.a, self.n);
        Element::new((self.n - a) % self.n, nb)
    }

    /// `g^k` by square-and-multiply; negative `k` uses `inv(g)^(-k)`.
    pub fn pow(&self, g: Element, k: i64) -> Element {
        let (mut base, mut e) = if k < 0 {
            (self.inv(g), k.unsigned_abs())
        } else {
            (g, k as u64)
        };
        let mut acc = Element::IDENTITY;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Order of `g`. Canonical family groups use the closed form
    /// `m p / gcd(a, m)` if `p^r | a` and `b != 0`, else `m / gcd(a, m)`,
    /// with `m = 2^t0 p^r`. Other groups use `(x^a y^b)^p = x^(a S)`, where
    /// `S = sum_{j<p} phi11^j`, giving `p * |x^(a S)|` for `b != 0`.
    pub fn element_order(&self, g: Element) -> u64 {
        if let Some(fam) = self.canonical_family() {
            let m = self.n;
            let pr = fam.p.pow(fam.r);
            let base = m / gcd(g.a, m);
            return if g.a.is_multiple_of(pr) && g.b != 0 {
                base * fam.p
            } else {
                base
            };
        }
        if g.b == 0 {
            self.n / gcd(g.a, self.n)
        } else {
            let ap = mul_mod(g.a, self.power_sum, self.n);
            self.p * (self.n / gcd(ap, self.n))
        }
    }

    /// Verification path for [`GroupSpec::element_order`]: iterated multiplication.
    pub fn element_order_brute(&self, g: Element) -> u64 {
        let mut acc = g;
        let mut d = 1;
        while acc != Element::IDENTITY {
            acc = self.mul(acc, g);
            d += 1;
        }
        d
    }

    /// `(x^a y^b)^k = x^(a k ((k-1) b p^(r-1) + 1)) y^(b k)` in the canonical
    /// `Z_{2p^r} x| Z_p`, `r >= 2`.
    pub fn pow_closed_form_2pr(&self, g: Element, k: u64) -> Result<Element> {
        let fam = self
            .canonical_family()
            .filter(|f| f.t0 == 1 && f.r >= 2)
            .ok_or_else(|| {
                Error::domain(format!(
                    "{self} is not the canonical Z_(2p^r) x| Z_p with r >= 2"
                ))
            })?;
        let n = self.n;
        let km = k % n;
        let k_minus_1 = (km + n - 1) % n;
        let pr1 = fam.p.pow(fam.r - 1) % n;
        let inner = add_mod(mul_mod(mul_mod(k_minus_1, g.b, n), pr1, n), 1, n);
        let a = mul_mod(mul_mod(g.a, km, n), inner, n);
        let b = mul_mod(g.b, k % self.p, self.p);
        Ok(Element::new(a, b))
    }
}
