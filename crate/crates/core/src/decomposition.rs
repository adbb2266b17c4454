//! Splitting `Z_N x| Z_p` into `Z_{M0} x (Z_{p^r} x| Z_p)`.
//!
//! When `p` divides no `q - 1` for the primes `q | N`, the twist acts
//! trivially on every prime-power component other than the `p`-part, so
//! `phi11 = 1 (mod M0)` with `M0 = N / p^r`. CRT on the first coordinate then
//! gives an isomorphism onto a direct product of groups of coprime order,
//! and every subgroup is a product of its two projections.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};
use crate::modmath::{self, Factorization};

/// Position of `p` in the factorization of `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeSlot {
    pub k_index: usize,
    pub r_k: u32,
    /// `r_k < 2` while `p` divides no `q - 1`: no unit of order `p` exists modulo `N`.
    pub twist_impossible: bool,
}

pub fn locate_k(n: u64, p: u64) -> Result<PrimeSlot> {
    let f = modmath::factorize(n)?;
    let k_index = f
        .primes()
        .position(|q| q == p)
        .ok_or_else(|| Error::domain(format!("p = {p} does not divide N = {n}")))?;
    let r_k = f.factors()[k_index].1;
    let twist_impossible = r_k < 2 && offending_prime(&f, p).is_none();
    Ok(PrimeSlot {
        k_index,
        r_k,
        twist_impossible,
    })
}

fn offending_prime(f: &Factorization, p: u64) -> Option<u64> {
    f.primes().find(|&q| (q - 1) % p == 0)
}

/// The first prime factor `q` of `N` with `p | q - 1`, if any.
pub fn hypothesis_violation(n: u64, p: u64) -> Result<Option<u64>> {
    Ok(offending_prime(&modmath::factorize(n)?, p))
}

/// `true` iff `p` divides no `q - 1` for the prime factors `q` of `N`.
pub fn check_hypothesis(n: u64, p: u64) -> Result<bool> {
    Ok(hypothesis_violation(n, p)?.is_none())
}

/// Element of `Z_{M0} x (Z_{p^r} x| Z_p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ProductElement {
    pub c0: u64,
    pub inner: Element,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecomposedSpec {
    pub spec: GroupSpec,
    pub factorization: Factorization,
    pub k_index: usize,
    pub r_k: u32,
    /// `N / p^{r_k}`.
    #[serde(rename = "M0")]
    pub m0: u64,
    /// `Z_{p^{r_k}} x| Z_p` with twist `phi11 mod p^{r_k}`.
    pub inner: GroupSpec,
    /// `i` with `inner.phi11 = (p^{r_k - 1} + 1)^i`.
    pub twist_index: u64,
    /// The canonical group `inner` is carried to by `Psi_i`.
    pub canonical_inner: GroupSpec,
}

/// Decomposes a twisted group satisfying [`check_hypothesis`].
pub fn decompose(spec: &GroupSpec) -> Result<DecomposedSpec> {
    let (n, p) = (spec.n(), spec.p());
    if spec.is_direct_product() {
        return Err(Error::domain(format!(
            "{spec} is a direct product; it is handled by the abelian solver"
        )));
    }
    let factorization = modmath::factorize(n)?;
    if let Some(q) = offending_prime(&factorization, p) {
        return Err(Error::domain(format!(
            "p = {p} divides {q} - 1 for the prime factor {q} of N = {n}"
        )));
    }
    let slot = locate_k(n, p).map_err(|_| {
        Error::theory(format!(
            "{spec} has a twist of order p but p does not divide N"
        ))
    })?;
    if slot.r_k < 2 {
        return Err(Error::theory(format!(
            "{spec} has a twist of order p but p^2 does not divide N"
        )));
    }
    let prime_power = p.pow(slot.r_k);
    let m0 = n / prime_power;
    if spec.phi11() % m0 != 1 % m0 {
        return Err(Error::theory(format!(
            "phi11 = {} is not 1 modulo M0 = {m0}; the twist acts on the p-free part",
            spec.phi11()
        )));
    }
    let inner_phi = spec.phi11() % prime_power;
    if inner_phi == 1 {
        return Err(Error::theory(format!(
            "phi11 = {} is trivial on Z_{prime_power} but not on Z_{n}",
            spec.phi11()
        )));
    }
    let inner = GroupSpec::new(prime_power, p, inner_phi)
        .map_err(|e| Error::theory(format!("inner group is invalid: {e}")))?;
    let twist_index = inner
        .twist_index()
        .ok_or_else(|| Error::theory(format!("{inner} is not a power of the canonical twist")))?;
    let canonical_inner = GroupSpec::canonical(p, slot.r_k, 0)?;
    Ok(DecomposedSpec {
        spec: spec.clone(),
        factorization,
        k_index: slot.k_index,
        r_k: slot.r_k,
        m0,
        inner,
        twist_index,
        canonical_inner,
    })
}

impl DecomposedSpec {
    pub fn prime_power(&self) -> u64 {
        self.inner.n()
    }

    /// `x^a y^b -> (a mod M0, (a mod p^r, b))`.
    pub fn map_element(&self, g: Element) -> ProductElement {
        ProductElement {
            c0: g.a % self.m0,
            inner: Element::new(g.a % self.prime_power(), g.b),
        }
    }

    /// Inverse of [`DecomposedSpec::map_element`].
    pub fn unmap_element(&self, u: ProductElement) -> Result<Element> {
        let a = modmath::crt_combine(u.c0, u.inner.a, self.m0, self.prime_power())?;
        Ok(Element::new(a, u.inner.b))
    }

    pub fn product_mul(&self, u: ProductElement, v: ProductElement) -> ProductElement {
        ProductElement {
            c0: (u.c0 + v.c0) % self.m0,
            inner: self.inner.mul(u.inner, v.inner),
        }
    }

    /// Projections `(H0, H1)` of a subgroup of the product, checked to satisfy
    /// `H = H0 x H1`.
    pub fn split_subgroup(
        &self,
        h: &BTreeSet<ProductElement>,
    ) -> Result<(BTreeSet<u64>, BTreeSet<Element>)> {
        if modmath::gcd(self.m0, self.inner.order()) != 1 {
            return Err(Error::domain("factor orders are not coprime"));
        }
        let h0: BTreeSet<u64> = h.iter().map(|u| u.c0).collect();
        let h1: BTreeSet<Element> = h.iter().map(|u| u.inner).collect();
        let product_size = h0.len() * h1.len();
        let rebuilt = product_size == h.len()
            && h0.iter().all(|&c0| {
                h1.iter()
                    .all(|&inner| h.contains(&ProductElement { c0, inner }))
            });
        if !rebuilt {
            return Err(Error::theory(format!(
                "subgroup of order {} is not the product of its projections ({} x {})",
                h.len(),
                h0.len(),
                h1.len()
            )));
        }
        Ok((h0, h1))
    }

    /// [`DecomposedSpec::split_subgroup`] for a subgroup given inside `G`.
    pub fn split_in_g(&self, h: &BTreeSet<Element>) -> Result<(BTreeSet<u64>, BTreeSet<Element>)> {
        let mapped: BTreeSet<ProductElement> = h.iter().map(|&g| self.map_element(g)).collect();
        self.split_subgroup(&mapped)
    }
}
