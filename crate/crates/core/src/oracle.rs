//! Hiding functions: `f(g1) = f(g2)` exactly when `g1 H = g2 H`.
//!
//! Solvers only see the [`HidingFunction`] trait. Each classical evaluation
//! and each coherent evaluation over a register counts as one query.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::group::{Element, GroupSpec};
use crate::subgroups::{self, CosetLabel, SubgroupDesc};

#[derive(Debug, Default)]
pub struct QueryCounter(AtomicU64);

impl QueryCounter {
    pub fn bump(&self) {
        self.0.fetch_add(1, Ordering::Relaxed);
    }

    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.0.store(0, Ordering::Relaxed);
    }
}

pub trait HidingFunction: Sync {
    /// The group `f` is defined on.
    fn spec(&self) -> &GroupSpec;

    /// Uncounted evaluation; solvers go through [`HidingFunction::query`].
    fn eval(&self, g: Element) -> u64;

    fn counter(&self) -> &QueryCounter;

    fn query(&self, g: Element) -> u64 {
        self.counter().bump();
        self.eval(g)
    }

    /// One coherent query over a register whose basis states are `points`.
    fn query_superposition(&self, points: &[Element]) -> Vec<u64> {
        self.counter().bump();
        points.iter().map(|&g| self.eval(g)).collect()
    }

    fn query_count(&self) -> u64 {
        self.counter().get()
    }
}

/// Coset-representative oracle for a known subgroup.
#[derive(Debug)]
pub struct HidingOracle {
    spec: GroupSpec,
    hidden: SubgroupDesc,
    table: Vec<u32>,
    counter: QueryCounter,
}

/// Tabulates `g -> min(gH)`; `H` must be a valid subgroup of `spec`.
pub fn make_oracle(spec: &GroupSpec, hidden: &SubgroupDesc) -> Result<HidingOracle> {
    let table = subgroups::coset_table(hidden, spec)?;
    Ok(HidingOracle {
        spec: spec.clone(),
        hidden: hidden.clone(),
        table,
        counter: QueryCounter::default(),
    })
}

impl HidingOracle {
    pub fn hidden(&self) -> &SubgroupDesc {
        &self.hidden
    }

    pub fn label_of(&self, g: Element) -> CosetLabel {
        CosetLabel {
            rep: self.spec.element_at(self.table[self.spec.index_of(g)] as usize),
        }
    }

    pub fn distinct_labels(&self) -> usize {
        let mut seen: Vec<u32> = self.table.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    /// Checks the hiding condition: exhaustively over all pairs when
    /// `|G| <= 1000`, otherwise on `10^5` seeded random pairs.
    pub fn verify_hiding(&self) -> Result<bool> {
        verify_hiding(self, &self.hidden)
    }

    #[cfg(test)]
    pub(crate) fn overwrite_label(&mut self, g: Element, label: u32) {
        let i = self.spec.index_of(g);
        self.table[i] = label;
    }
}

impl HidingFunction for HidingOracle {
    fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    fn eval(&self, g: Element) -> u64 {
        self.table[self.spec.index_of(g)] as u64
    }

    fn counter(&self) -> &QueryCounter {
        &self.counter
    }
}

/// The same oracle with labels passed through a keyed random permutation of
/// the label space, so nothing about coset representatives leaks.
#[derive(Debug)]
pub struct PermutedOracle {
    inner: HidingOracle,
    permutation: Vec<u32>,
}

pub fn make_permuted_oracle(spec: &GroupSpec, hidden: &SubgroupDesc, key: u64) -> Result<PermutedOracle> {
    let inner = make_oracle(spec, hidden)?;
    let mut permutation: Vec<u32> = (0..inner.table.len() as u32).collect();
    permutation.shuffle(&mut ChaCha8Rng::seed_from_u64(key));
    Ok(PermutedOracle { inner, permutation })
}

impl PermutedOracle {
    pub fn hidden(&self) -> &SubgroupDesc {
        &self.inner.hidden
    }
}

impl HidingFunction for PermutedOracle {
    fn spec(&self) -> &GroupSpec {
        &self.inner.spec
    }

    fn eval(&self, g: Element) -> u64 {
        self.permutation[self.inner.eval(g) as usize] as u64
    }

    fn counter(&self) -> &QueryCounter {
        &self.inner.counter
    }
}

/// A hiding function on another group, pulled back along `map` into `parent`.
/// Queries are charged to the parent's counter.
pub struct PulledBackOracle<'a, F> {
    parent: &'a dyn HidingFunction,
    spec: GroupSpec,
    map: F,
}

impl<'a, F> PulledBackOracle<'a, F>
where
    F: Fn(Element) -> Element + Sync,
{
    pub fn new(parent: &'a dyn HidingFunction, spec: GroupSpec, map: F) -> Self {
        PulledBackOracle { parent, spec, map }
    }
}

impl<F> HidingFunction for PulledBackOracle<'_, F>
where
    F: Fn(Element) -> Element + Sync,
{
    fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    fn eval(&self, g: Element) -> u64 {
        self.parent.eval((self.map)(g))
    }

    fn counter(&self) -> &QueryCounter {
        self.parent.counter()
    }
}

const EXHAUSTIVE_LIMIT: u64 = 1_000;
const SAMPLED_PAIRS: usize = 100_000;

/// `f(g1) = f(g2)  <=>  g1^{-1} g2 ∈ H`, checked without charging queries.
pub fn verify_hiding(f: &(impl HidingFunction + ?Sized), hidden: &SubgroupDesc) -> Result<bool> {
    let spec = f.spec();
    let member_list = hidden.elements(spec)?;
    let members: std::collections::HashSet<Element> = member_list.iter().copied().collect();
    let holds = |u: Element, v: Element| {
        (f.eval(u) == f.eval(v)) == members.contains(&spec.mul(spec.inv(u), v))
    };
    if spec.order() <= EXHAUSTIVE_LIMIT {
        let all: Vec<Element> = spec.elements().collect();
        return Ok(all.iter().all(|&u| all.iter().all(|&v| holds(u, v))));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x68696465);
    let size = spec.order() as usize;
    let mut pairs_ok = (0..SAMPLED_PAIRS).all(|_| {
        let u = spec.element_at(rng.gen_range(0..size));
        // Half the pairs share a coset so the "equal label" direction is exercised too.
        let v = if rng.gen_bool(0.5) {
            spec.mul(u, member_list[rng.gen_range(0..member_list.len())])
        } else {
            spec.element_at(rng.gen_range(0..size))
        };
        holds(u, v)
    });
    pairs_ok &= holds(Element::IDENTITY, Element::IDENTITY);
    Ok(pairs_ok)
}
