//! Subgroups of `Z_{2^t0 p^r} x| Z_p`.
//!
//! Every subgroup is one of
//!
//! * `C(t,s)`   = `<x^(2^t p^s)>`
//! * `T(t,s,h)` = `<x^(2^t p^s), x^(h 2^t p^(s-1)) y>`, `1 <= s <= r`
//! * `Y(t)`     = `<x^(2^t), y>` (the `s = 0` member of the two-generator family)
//!
//! with `0 <= t <= t0`, `0 <= s <= r`, `0 <= h < p`. Arbitrary subgroups of
//! any group are carried as `E{...}` element sets; [`closure`] and
//! [`all_subgroups_brute`] are the brute-force checks behind the structured forms.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Element, Family, GroupSpec};
use crate::modmath::{self, mul_mod};

/// Default ceiling on `|G|` for closure-based computations.
pub const DEFAULT_CLOSURE_LIMIT: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubgroupDesc {
    CyclicX { t: u32, s: u32 },
    TwoGen { t: u32, s: u32, h: u64 },
    YJoin { t: u32 },
    ExplicitSet(BTreeSet<Element>),
}

/// Left coset `gH`, named by its lexicographically smallest element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CosetLabel {
    pub rep: Element,
}

/// Dense membership bitmap over element indices of one group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct ElementBits {
    words: Vec<u64>,
}

impl ElementBits {
    pub(crate) fn new(len: usize) -> Self {
        ElementBits {
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// Returns `true` if the bit was newly set.
    #[inline]
    pub(crate) fn insert(&mut self, i: usize) -> bool {
        let w = &mut self.words[i / 64];
        let mask = 1 << (i % 64);
        let fresh = *w & mask == 0;
        *w |= mask;
        fresh
    }

    pub(crate) fn is_subset(&self, other: &ElementBits) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            (0..64).filter(move |bit| w >> bit & 1 == 1).map(move |bit| wi * 64 + bit)
        })
    }
}

fn check_order_limit(spec: &GroupSpec, limit: u64) -> Result<()> {
    let order = spec.n().saturating_mul(spec.p());
    if order > limit {
        return Err(Error::BoundExceeded {
            what: "|G|",
            value: order,
            limit,
        });
    }
    Ok(())
}

fn closure_bits(gens: &[Element], spec: &GroupSpec) -> ElementBits {
    let mut seen = ElementBits::new(spec.order() as usize);
    let mut queue = VecDeque::from([Element::IDENTITY]);
    seen.insert(0);
    while let Some(u) = queue.pop_front() {
        for &g in gens {
            let v = spec.mul(u, g);
            if seen.insert(spec.index_of(v)) {
                queue.push_back(v);
            }
        }
    }
    seen
}

fn bits_to_set(bits: &ElementBits, spec: &GroupSpec) -> BTreeSet<Element> {
    bits.iter().map(|i| spec.element_at(i)).collect()
}

/// Smallest subgroup containing `gens`, by breadth-first expansion.
pub fn closure(gens: &[Element], spec: &GroupSpec) -> Result<BTreeSet<Element>> {
    closure_with_limit(gens, spec, DEFAULT_CLOSURE_LIMIT)
}

pub fn closure_with_limit(
    gens: &[Element],
    spec: &GroupSpec,
    limit: u64,
) -> Result<BTreeSet<Element>> {
    check_order_limit(spec, limit)?;
    for &g in gens {
        spec.element(g.a, g.b)?;
    }
    Ok(bits_to_set(&closure_bits(gens, spec), spec))
}

/// Every subgroup of `G` as an element set, by joining cyclic subgroups
/// until nothing new appears. Sorted by (order, elements).
pub fn all_subgroups_brute(spec: &GroupSpec) -> Result<Vec<BTreeSet<Element>>> {
    check_order_limit(spec, 20_000)?;
    let elements: Vec<Element> = spec.elements().collect();
    // (bits, generators)
    let mut found: Vec<(ElementBits, Vec<Element>)> = Vec::new();
    let mut index: std::collections::HashSet<ElementBits> = std::collections::HashSet::new();
    let mut cyclic: Vec<(ElementBits, Element)> = Vec::new();
    for &g in &elements {
        let bits = closure_bits(&[g], spec);
        if index.insert(bits.clone()) {
            cyclic.push((bits.clone(), g));
            found.push((bits, vec![g]));
        }
    }
    let mut frontier: Vec<usize> = (0..found.len()).collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &hi in &frontier {
            for (cbits, g) in &cyclic {
                if cbits.is_subset(&found[hi].0) {
                    continue;
                }
                let mut gens = found[hi].1.clone();
                gens.push(*g);
                let bits = closure_bits(&gens, spec);
                if index.insert(bits.clone()) {
                    next.push(found.len());
                    found.push((bits, gens));
                }
            }
        }
        frontier = next;
    }
    let mut out: Vec<BTreeSet<Element>> = found
        .iter()
        .map(|(bits, _)| bits_to_set(bits, spec))
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

fn family_of(spec: &GroupSpec) -> Result<Family> {
    spec.family().ok_or_else(|| {
        Error::domain(format!(
            "{spec} is not of the form Z_(2^t0 p^r) x| Z_p with t0 in {{0,1}}"
        ))
    })
}

fn canonical_family_of(spec: &GroupSpec) -> Result<Family> {
    spec.canonical_family()
        .ok_or_else(|| Error::domain(format!("{spec} is not a canonical family group")))
}

impl SubgroupDesc {
    /// Builds an `E{...}` descriptor, checking that the set is a subgroup.
    pub fn explicit(set: BTreeSet<Element>, spec: &GroupSpec) -> Result<Self> {
        if !set.contains(&Element::IDENTITY) {
            return Err(Error::domain("element set does not contain the identity"));
        }
        for &g in &set {
            if !spec.contains(g) {
                return Err(Error::domain(format!("{g} is not an element of {spec}")));
            }
            if !set.contains(&spec.inv(g)) {
                return Err(Error::domain(format!("element set is not closed under inverse at {g}")));
            }
            for &h in &set {
                if !set.contains(&spec.mul(g, h)) {
                    return Err(Error::domain(format!(
                        "element set is not closed: {g} * {h} is missing"
                    )));
                }
            }
        }
        Ok(SubgroupDesc::ExplicitSet(set))
    }

    /// Checks the parameters against the group's family.
    pub fn validate(&self, spec: &GroupSpec) -> Result<()> {
        let check = |fam: &Family, t: u32, s: u32| {
            if t > fam.t0 || s > fam.r {
                Err(Error::domain(format!(
                    "{self} is out of range for t0 = {}, r = {}",
                    fam.t0, fam.r
                )))
            } else {
                Ok(())
            }
        };
        match *self {
            SubgroupDesc::CyclicX { t, s } => check(&family_of(spec)?, t, s),
            SubgroupDesc::TwoGen { t, s, h } => {
                if s == 0 {
                    return Err(Error::domain("T(t,s,h) needs s >= 1; use Y(t) for s = 0"));
                }
                if h >= spec.p() {
                    return Err(Error::domain(format!("h = {h} must be reduced modulo p")));
                }
                check(&family_of(spec)?, t, s)
            }
            SubgroupDesc::YJoin { t } => check(&family_of(spec)?, t, 0),
            SubgroupDesc::ExplicitSet(ref set) => {
                SubgroupDesc::explicit(set.clone(), spec).map(|_| ())
            }
        }
    }

    /// `|H|`.
    pub fn order(&self, spec: &GroupSpec) -> Result<u64> {
        self.validate(spec)?;
        let n = spec.n();
        Ok(match *self {
            SubgroupDesc::CyclicX { t, s } => n / family_of(spec)?.x_index(t, s),
            SubgroupDesc::TwoGen { t, s, .. } => n / family_of(spec)?.x_index(t, s) * spec.p(),
            SubgroupDesc::YJoin { t } => n / (1 << t) * spec.p(),
            SubgroupDesc::ExplicitSet(ref set) => set.len() as u64,
        })
    }

    /// A generating set.
    pub fn generators(&self, spec: &GroupSpec) -> Result<Vec<Element>> {
        self.validate(spec)?;
        Ok(match *self {
            SubgroupDesc::CyclicX { t, s } => {
                vec![spec.reduce(family_of(spec)?.x_index(t, s), 0)]
            }
            SubgroupDesc::TwoGen { t, s, h } => {
                let fam = family_of(spec)?;
                let step = fam.x_index(t, s - 1);
                vec![
                    spec.reduce(fam.x_index(t, s), 0),
                    spec.reduce(h * step, 1),
                ]
            }
            SubgroupDesc::YJoin { t } => vec![spec.reduce(1 << t, 0), spec.y()],
            SubgroupDesc::ExplicitSet(ref set) => set.iter().copied().collect(),
        })
    }

    /// The elements of `H` in lexicographic order.
    pub fn elements(&self, spec: &GroupSpec) -> Result<Vec<Element>> {
        self.validate(spec)?;
        let n = spec.n();
        let p = spec.p();
        let progression = |start: u64, step: u64, b: u64| {
            (0..n / step).map(move |j| Element::new(start + j * step, b))
        };
        let mut out: Vec<Element> = match *self {
            SubgroupDesc::CyclicX { t, s } => {
                let d = family_of(spec)?.x_index(t, s);
                progression(0, d, 0).collect()
            }
            SubgroupDesc::TwoGen { t, s, h } => {
                let fam = family_of(spec)?;
                let d = fam.x_index(t, s);
                let c = fam.x_index(t, s - 1);
                (0..p)
                    .flat_map(|b| progression(mul_mod(h * c % d, b, d), d, b))
                    .collect()
            }
            SubgroupDesc::YJoin { t } => {
                let d = 1u64 << t;
                (0..p).flat_map(|b| progression(0, d, b)).collect()
            }
            SubgroupDesc::ExplicitSet(ref set) => return Ok(set.iter().copied().collect()),
        };
        out.sort_unstable();
        Ok(out)
    }

    /// The structured form of this subgroup when the group has one.
    pub fn canonicalize(&self, spec: &GroupSpec) -> Result<SubgroupDesc> {
        self.validate(spec)?;
        match self {
            SubgroupDesc::ExplicitSet(set) => Ok(classify(set, spec).unwrap_or_else(|| self.clone())),
            SubgroupDesc::TwoGen { t, s, h } => Ok(SubgroupDesc::TwoGen {
                t: *t,
                s: *s,
                h: h % spec.p(),
            }),
            other => Ok(other.clone()),
        }
    }
}

/// Reads off the structured descriptor of a subgroup given as an element set.
/// `None` if the group is outside the family or the set is not one of the forms.
pub fn classify(set: &BTreeSet<Element>, spec: &GroupSpec) -> Option<SubgroupDesc> {
    let fam = spec.family()?;
    let n = spec.n();
    // H ∩ <x> = <x^d>, d | N
    let d = set
        .iter()
        .filter(|g| g.b == 0 && g.a != 0)
        .map(|g| g.a)
        .min()
        .map_or(n, |a| modmath::gcd(a, n));
    let t = modmath::valuation(d, 2);
    let s = modmath::valuation(d >> t, fam.p);
    if fam.x_index(t, s) != d || t > fam.t0 {
        return None;
    }
    let desc = match set.iter().find(|g| g.b == 1) {
        None => SubgroupDesc::CyclicX { t, s },
        Some(_) if s == 0 => SubgroupDesc::YJoin { t },
        Some(g) => {
            let c = fam.x_index(t, s - 1);
            let a = g.a % d;
            if a % c != 0 {
                return None;
            }
            SubgroupDesc::TwoGen { t, s, h: a / c }
        }
    };
    let same = desc
        .elements(spec)
        .ok()
        .is_some_and(|els| els.len() == set.len() && els.iter().all(|g| set.contains(g)));
    same.then_some(desc)
}

/// `g ∈ H`.
pub fn membership(h: &SubgroupDesc, g: Element, spec: &GroupSpec) -> Result<bool> {
    h.validate(spec)?;
    if !spec.contains(g) {
        return Err(Error::domain(format!("{g} is not an element of {spec}")));
    }
    Ok(match *h {
        SubgroupDesc::CyclicX { t, s } => {
            g.b == 0 && g.a.is_multiple_of(family_of(spec)?.x_index(t, s))
        }
        SubgroupDesc::TwoGen { t, s, h } => {
            let fam = family_of(spec)?;
            let d = fam.x_index(t, s);
            let c = fam.x_index(t, s - 1);
            // a - h 2^t p^(s-1) b = 0 (mod 2^t p^s)
            g.a % d == mul_mod(h * c % d, g.b, d)
        }
        SubgroupDesc::YJoin { t } => g.a.is_multiple_of(1 << t),
        SubgroupDesc::ExplicitSet(ref set) => set.contains(&g),
    })
}

/// The label of `gH`: its lexicographically smallest element.
pub fn coset_label(h: &SubgroupDesc, g: Element, spec: &GroupSpec) -> Result<CosetLabel> {
    if !spec.contains(g) {
        return Err(Error::domain(format!("{g} is not an element of {spec}")));
    }
    let rep = h
        .elements(spec)?
        .into_iter()
        .map(|k| spec.mul(g, k))
        .min()
        .expect("subgroups are non-empty");
    Ok(CosetLabel { rep })
}

/// `labels[index_of(g)] = index_of(min(gH))` for every `g`, in `O(|G|)`.
pub fn coset_table(h: &SubgroupDesc, spec: &GroupSpec) -> Result<Vec<u32>> {
    check_order_limit(spec, u32::MAX as u64)?;
    let members = h.elements(spec)?;
    let size = spec.order() as usize;
    let mut labels = vec![u32::MAX; size];
    // Scanning in increasing index order, the first unlabeled element is
    // the minimum of its coset.
    for i in 0..size {
        if labels[i] != u32::MAX {
            continue;
        }
        let g = spec.element_at(i);
        for &k in &members {
            labels[spec.index_of(spec.mul(g, k))] = i as u32;
        }
    }
    Ok(labels)
}

/// `{ x^(a i) y^(b i) : 0 <= i < |g| }` for `g = x^a y^b` in a canonical family group.
pub fn cyclic_elements(g: Element, spec: &GroupSpec) -> Result<Vec<Element>> {
    canonical_family_of(spec)?;
    spec.element(g.a, g.b)?;
    let order = spec.element_order(g);
    Ok((0..order)
        .map(|i| {
            Element::new(
                mul_mod(g.a, i % spec.n(), spec.n()),
                mul_mod(g.b, i % spec.p(), spec.p()),
            )
        })
        .collect())
}

/// Every subgroup of a family group, each once, in structured form.
pub fn enumerate_subgroups(spec: &GroupSpec) -> Result<Vec<SubgroupDesc>> {
    let fam = family_of(spec)?;
    let mut out = Vec::new();
    for t in 0..=fam.t0 {
        for s in 0..=fam.r {
            out.push(SubgroupDesc::CyclicX { t, s });
        }
        for s in 1..=fam.r {
            for h in 0..fam.p {
                out.push(SubgroupDesc::TwoGen { t, s, h });
            }
        }
        out.push(SubgroupDesc::YJoin { t });
    }
    let mut seen = BTreeSet::new();
    let mut unique = Vec::with_capacity(out.len());
    for desc in out {
        if seen.insert(desc.elements(spec)?) {
            unique.push(desc);
        }
    }
    Ok(unique)
}

fn psi_specs_check(i: u64, from: &GroupSpec, to: &GroupSpec) -> Result<Family> {
    let fam = canonical_family_of(from)?;
    if fam.r < 2 {
        return Err(Error::domain("twisted groups need r >= 2"));
    }
    if i == 0 || i >= fam.p {
        return Err(Error::domain(format!("i = {i} must lie in [1, p)")));
    }
    if to.n() != from.n() || to.p() != from.p() {
        return Err(Error::domain("source and target groups have different moduli"));
    }
    let expected = modmath::pow_mod(from.phi11(), i, from.n());
    if to.phi11() != expected {
        return Err(Error::domain(format!(
            "target twist {} is not {}^{i} = {expected}",
            to.phi11(),
            from.phi11()
        )));
    }
    Ok(fam)
}

/// `Psi_i(x^a y^b) = x^a y^(b i^{-1})`, an isomorphism from the canonical
/// group onto the group with twist `phi11^i`.
pub fn isomorphism_psi(i: u64, g: Element, from: &GroupSpec, to: &GroupSpec) -> Result<Element> {
    psi_specs_check(i, from, to)?;
    from.element(g.a, g.b)?;
    let inv = modmath::mod_inverse(i, from.p())?;
    Ok(Element::new(g.a, mul_mod(g.b, inv, from.p())))
}

/// Inverse of [`isomorphism_psi`].
pub fn isomorphism_psi_inverse(
    i: u64,
    g: Element,
    from: &GroupSpec,
    to: &GroupSpec,
) -> Result<Element> {
    psi_specs_check(i, from, to)?;
    to.element(g.a, g.b)?;
    Ok(Element::new(g.a, mul_mod(g.b, i, from.p())))
}

/// Image of a structured descriptor under `Psi_i`: `T(t,s,h) -> T(t,s,h i)`.
pub fn psi_image(i: u64, h: &SubgroupDesc, from: &GroupSpec, to: &GroupSpec) -> Result<SubgroupDesc> {
    psi_specs_check(i, from, to)?;
    h.validate(from)?;
    Ok(match h {
        SubgroupDesc::TwoGen { t, s, h } => SubgroupDesc::TwoGen {
            t: *t,
            s: *s,
            h: mul_mod(*h, i, from.p()),
        },
        SubgroupDesc::ExplicitSet(set) => SubgroupDesc::ExplicitSet(
            set.iter()
                .map(|&g| isomorphism_psi(i, g, from, to))
                .collect::<Result<_>>()?,
        ),
        other => other.clone(),
    })
}

impl fmt::Display for SubgroupDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubgroupDesc::CyclicX { t, s } => write!(f, "C({t},{s})"),
            SubgroupDesc::TwoGen { t, s, h } => write!(f, "T({t},{s},{h})"),
            SubgroupDesc::YJoin { t } => write!(f, "Y({t})"),
            SubgroupDesc::ExplicitSet(set) => {
                f.write_str("E{")?;
                for (i, g) in set.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{g}")?;
                }
                f.write_str("}")
            }
        }
    }
}

fn parse_args<const K: usize>(body: &str, whole: &str) -> Result<[u64; K]> {
    let parts: Vec<&str> = body.split(',').collect();
    if parts.len() != K {
        return Err(Error::Parse(format!("expected {K} arguments in {whole:?}")));
    }
    let mut out = [0u64; K];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad integer {part:?} in {whole:?}")))?;
    }
    Ok(out)
}

fn small(v: u64, whole: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::Parse(format!("parameter too large in {whole:?}")))
}

impl FromStr for SubgroupDesc {
    type Err = Error;

    /// Parses `C(t,s)`, `T(t,s,h)`, `Y(t)` or `E{(a,b),...}`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some(body) = t.strip_prefix("E{").and_then(|r| r.strip_suffix('}')) {
            let mut set = BTreeSet::new();
            let mut rest = body.trim();
            while !rest.is_empty() {
                let close = rest
                    .find(')')
                    .filter(|_| rest.starts_with('('))
                    .ok_or_else(|| Error::Parse(format!("malformed element list in {s:?}")))?;
                set.insert(rest[..=close].parse::<Element>()?);
                rest = rest[close + 1..].trim_start();
                if let Some(after) = rest.strip_prefix(',') {
                    rest = after.trim_start();
                    if rest.is_empty() {
                        return Err(Error::Parse(format!("trailing comma in {s:?}")));
                    }
                } else if !rest.is_empty() {
                    return Err(Error::Parse(format!("malformed element list in {s:?}")));
                }
            }
            return Ok(SubgroupDesc::ExplicitSet(set));
        }
        let (tag, rest) = t.split_at(t.find('(').ok_or_else(|| Error::Parse(format!("unrecognised subgroup {s:?}")))?);
        let body = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("unbalanced parentheses in {s:?}")))?;
        match tag.trim() {
            "C" => {
                let [tt, ss] = parse_args::<2>(body, s)?;
                Ok(SubgroupDesc::CyclicX { t: small(tt, s)?, s: small(ss, s)? })
            }
            "T" => {
                let [tt, ss, h] = parse_args::<3>(body, s)?;
                Ok(SubgroupDesc::TwoGen { t: small(tt, s)?, s: small(ss, s)?, h })
            }
            "Y" => {
                let [tt] = parse_args::<1>(body, s)?;
                Ok(SubgroupDesc::YJoin { t: small(tt, s)? })
            }
            _ => Err(Error::Parse(format!("unrecognised subgroup {s:?}"))),
        }
    }
}

impl Serialize for SubgroupDesc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SubgroupDesc {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
