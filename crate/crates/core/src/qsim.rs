//! State-vector simulation of the Fourier-sampling procedures.
//!
//! Oracle registers are never stored as amplitudes. Measuring the label
//! register is simulated by grouping basis states by label and picking a
//! group with probability proportional to its size, which yields the same
//! post-measurement mixture.

use std::collections::{BTreeSet, HashMap};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::decomposition::{self, ProductElement};
use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};
use crate::modmath::{self, mul_mod, pow_mod};
use crate::oracle::{self, HidingFunction, PulledBackOracle};
use crate::subgroups::{self, SubgroupDesc};

/// Tolerance on `sum |amp|^2 = 1`.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Largest register product simulated densely.
pub const MAX_DENSE_DIM: usize = 1_000_000;

/// Default number of Fourier-sampling rounds per solve.
pub const DEFAULT_ROUNDS: usize = 8;

/// Generator for stream `stream` of master seed `seed`.
pub fn derive_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Amplitudes over a tuple of registers, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct QState {
    dims: Vec<usize>,
    amps: Vec<Complex64>,
}

fn dense_len(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::domain("registers must be non-empty"));
    }
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .filter(|&len| len <= MAX_DENSE_DIM)
        .ok_or(Error::BoundExceeded {
            what: "dense state size",
            value: dims.iter().map(|&d| d as u64).product(),
            limit: MAX_DENSE_DIM as u64,
        })
}

impl QState {
    pub fn from_amplitudes(dims: Vec<usize>, amps: Vec<Complex64>) -> Result<Self> {
        if dense_len(&dims)? != amps.len() {
            return Err(Error::domain("amplitude count does not match register sizes"));
        }
        let state = QState { dims, amps };
        if (state.norm_sqr() - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::domain(format!(
                "state has squared norm {}",
                state.norm_sqr()
            )));
        }
        Ok(state)
    }

    /// `|index>`.
    pub fn basis(dims: &[usize], index: &[usize]) -> Result<Self> {
        let len = dense_len(dims)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); len];
        let probe = QState {
            dims: dims.to_vec(),
            amps: Vec::new(),
        };
        amps[probe.flat_index(index)?] = Complex64::new(1.0, 0.0);
        Ok(QState {
            dims: dims.to_vec(),
            amps,
        })
    }

    /// Equal superposition over the given flat indices.
    pub fn uniform(dims: &[usize], support: &[usize]) -> Result<Self> {
        let len = dense_len(dims)?;
        let distinct: BTreeSet<usize> = support.iter().copied().collect();
        if distinct.is_empty() || distinct.len() != support.len() {
            return Err(Error::domain("support must be non-empty and repetition free"));
        }
        if distinct.last().is_some_and(|&i| i >= len) {
            return Err(Error::domain("support index out of range"));
        }
        let amp = Complex64::new(1.0 / (support.len() as f64).sqrt(), 0.0);
        let mut amps = vec![Complex64::new(0.0, 0.0); len];
        for &i in support {
            amps[i] = amp;
        }
        Ok(QState {
            dims: dims.to_vec(),
            amps,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: &[usize]) -> Result<Complex64> {
        Ok(self.amps[self.flat_index(index)?])
    }

    pub fn flat_index(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.dims.len() || index.iter().zip(&self.dims).any(|(i, d)| i >= d) {
            return Err(Error::domain(format!(
                "index {index:?} does not fit registers {:?}",
                self.dims
            )));
        }
        Ok(index
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&i, &d)| acc * d + i))
    }

    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = flat % d;
            flat /= d;
        }
        out
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `F_n|l> = n^{-1/2} sum_k e^{2 pi i kl/n}|k>` on one register, or its
    /// adjoint when `inverse` is set.
    pub fn fourier(&mut self, register: usize, inverse: bool) -> Result<()> {
        let n = *self
            .dims
            .get(register)
            .ok_or_else(|| Error::domain(format!("no register {register}")))?;
        let inner: usize = self.dims[register + 1..].iter().product();
        let outer = self.amps.len() / (n * inner);
        let mut planner = FftPlanner::<f64>::new();
        // rustfft's inverse transform carries the positive exponent.
        let fft = if inverse {
            planner.plan_fft_forward(n)
        } else {
            planner.plan_fft_inverse(n)
        };
        let scale = 1.0 / (n as f64).sqrt();
        let mut fiber = vec![Complex64::new(0.0, 0.0); n];
        for o in 0..outer {
            for i in 0..inner {
                let base = o * n * inner + i;
                for (l, slot) in fiber.iter_mut().enumerate() {
                    *slot = self.amps[base + l * inner];
                }
                fft.process(&mut fiber);
                for (k, v) in fiber.iter().enumerate() {
                    self.amps[base + k * inner] = v * scale;
                }
            }
        }
        debug_assert!((self.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE);
        Ok(())
    }

    /// Samples a full basis index from `|amp|^2`.
    pub fn measure<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        self.unflatten(sample_weighted(&self.probabilities(), rng))
    }
}

/// `F_p` on `register`, which must have size `p`.
pub fn qft_p(mut state: QState, register: usize, p: u64) -> Result<QState> {
    match state.dims.get(register) {
        Some(&d) if d as u64 == p => {
            state.fourier(register, false)?;
            Ok(state)
        }
        Some(&d) => Err(Error::domain(format!(
            "register {register} has size {d}, not p = {p}"
        ))),
        None => Err(Error::domain(format!("no register {register}"))),
    }
}

/// Weights at or below this are rounding residue from the transform.
const ZERO_WEIGHT: f64 = 1e-20;

/// Inverse-CDF sampling over non-negative weights.
fn sample_weighted<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().filter(|&&w| w > ZERO_WEIGHT).sum();
    let target = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > ZERO_WEIGHT {
            acc += w;
            last_positive = i;
            if target < acc {
                return i;
            }
        }
    }
    last_positive
}

/// Indices grouped by equal label, in order of first appearance.
fn group_by_label(labels: &[u64]) -> Vec<Vec<usize>> {
    let mut slot: HashMap<u64, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &label) in labels.iter().enumerate() {
        let g = *slot.entry(label).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    groups
}

fn pick_group<R: Rng + ?Sized>(groups: &[Vec<usize>], rng: &mut R) -> usize {
    let weights: Vec<f64> = groups.iter().map(|g| g.len() as f64).collect();
    sample_weighted(&weights, rng)
}

/// Outcome of one `Z_p x Z_p` sampling round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RoundOutcome {
    pub c_tilde: u64,
    pub d_tilde: u64,
    pub h_tilde: Option<u64>,
    /// First coordinate of the collapsed branch at its smallest `b`.
    pub a0: u64,
}

impl RoundOutcome {
    pub fn from_measurement(c: u64, d: u64, p: u64, a0: u64) -> Self {
        let h_tilde = (c != 0).then(|| (p - mul_mod(pow_mod(c, p - 2, p), d, p)) % p);
        RoundOutcome {
            c_tilde: c,
            d_tilde: d,
            h_tilde,
            a0,
        }
    }
}

/// `2^t p^(s-1)`, the grid step for a round at `(t, s)`.
fn grid_step(spec: &GroupSpec, t: u32, s: u32) -> Result<u64> {
    let fam = spec
        .family()
        .ok_or_else(|| Error::domain(format!("{spec} is not of the form 2^t0 p^r")))?;
    if s == 0 {
        return Err(Error::domain("the sampling grid needs s >= 1"));
    }
    if t > fam.t0 || s > fam.r {
        return Err(Error::domain(format!(
            "(t, s) = ({t}, {s}) out of range for t0 = {}, r = {}",
            fam.t0, fam.r
        )));
    }
    Ok(fam.x_index(t, s - 1))
}

/// `x^(a step) y^b` for `(a, b)` in `Z_p x Z_p`, indexed `a p + b`.
fn grid_points(spec: &GroupSpec, step: u64) -> Vec<Element> {
    let p = spec.p();
    (0..p)
        .flat_map(|a| (0..p).map(move |b| (a, b)))
        .map(|(a, b)| spec.reduce(a * step, b))
        .collect()
}

fn branch_a0(members: &[usize], p: usize) -> u64 {
    let first = members
        .iter()
        .min_by_key(|&&i| (i % p, i / p))
        .expect("label groups are non-empty");
    (first / p) as u64
}

fn fourier_branch(members: &[usize], p: usize) -> Result<QState> {
    let mut state = QState::uniform(&[p, p], members)?;
    state.fourier(0, false)?;
    state.fourier(1, false)?;
    Ok(state)
}

/// One round: prepare, query, collapse, `F_p x F_p`, measure.
pub fn run_round<R: Rng + ?Sized>(
    spec: &GroupSpec,
    t: u32,
    s: u32,
    oracle: &dyn HidingFunction,
    rng: &mut R,
) -> Result<RoundOutcome> {
    let step = grid_step(spec, t, s)?;
    let p = spec.p() as usize;
    let labels = oracle.query_superposition(&grid_points(spec, step));
    let groups = group_by_label(&labels);
    let members = &groups[pick_group(&groups, rng)];
    let state = fourier_branch(members, p)?;
    let cd = state.measure(rng);
    Ok(RoundOutcome::from_measurement(
        cd[0] as u64,
        cd[1] as u64,
        spec.p(),
        branch_a0(members, p),
    ))
}

/// A post-measurement branch with its probability, before the final measurement.
#[derive(Clone, Debug)]
pub struct CollapsedBranch {
    pub weight: f64,
    pub a0: u64,
    pub state: QState,
}

/// Every branch of a round against a known subgroup, without counting queries.
pub fn analysis_branches(
    spec: &GroupSpec,
    t: u32,
    s: u32,
    hidden: &SubgroupDesc,
) -> Result<Vec<CollapsedBranch>> {
    let step = grid_step(spec, t, s)?;
    let p = spec.p() as usize;
    let oracle = oracle::make_oracle(spec, hidden)?;
    let labels: Vec<u64> = grid_points(spec, step).into_iter().map(|g| oracle.eval(g)).collect();
    group_by_label(&labels)
        .iter()
        .map(|members| {
            Ok(CollapsedBranch {
                weight: members.len() as f64 / (p * p) as f64,
                a0: branch_a0(members, p),
                state: fourier_branch(members, p)?,
            })
        })
        .collect()
}

/// Exact law of `(c, d)` for one round.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    p: u64,
    probs: Vec<f64>,
}

impl Distribution {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn get(&self, c: u64, d: u64) -> f64 {
        self.probs[(c * self.p + d) as usize]
    }

    /// `(c, d, probability)` in lexicographic order.
    pub fn triples(&self) -> impl Iterator<Item = (u64, u64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &q)| (i as u64 / self.p, i as u64 % self.p, q))
    }

    /// Points with probability above `tol`.
    pub fn support(&self, tol: f64) -> BTreeSet<(u64, u64)> {
        self.triples()
            .filter(|&(_, _, q)| q > tol)
            .map(|(c, d, _)| (c, d))
            .collect()
    }
}

impl Serialize for Distribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.probs.len()))?;
        for triple in self.triples() {
            seq.serialize_element(&triple)?;
        }
        seq.end()
    }
}

/// Mixture over all branches of the measured `(c, d)` law.
pub fn post_collapse_distribution(
    spec: &GroupSpec,
    t: u32,
    s: u32,
    hidden: &SubgroupDesc,
) -> Result<Distribution> {
    let p = spec.p();
    let mut probs = vec![0.0; (p * p) as usize];
    for branch in analysis_branches(spec, t, s, hidden)? {
        for (slot, q) in probs.iter_mut().zip(branch.state.probabilities()) {
            *slot += branch.weight * q;
        }
    }
    for q in probs.iter_mut().filter(|q| **q <= ZERO_WEIGHT) {
        *q = 0.0;
    }
    Ok(Distribution { p, probs })
}

/// Samples per abelian solve for a register of size `m`.
pub fn default_abelian_samples(m: u64) -> usize {
    (64 - (m.max(2) - 1).leading_zeros()) as usize + 8
}

/// Finds `d | M` with `f` hiding `<d>` in `Z_M`. Each sample costs one
/// coherent query; one classical comparison `f(0) = f(d)` confirms the
/// result, and a mismatch triggers one fresh batch before failing.
pub fn abelian_hsp_cyclic<R: Rng + ?Sized>(
    m: u64,
    oracle: &dyn Fn(&[u64]) -> Vec<u64>,
    rng: &mut R,
    num_samples: usize,
) -> Result<u64> {
    if m == 0 {
        return Err(Error::domain("M must be positive"));
    }
    dense_len(&[m as usize])?;
    let points: Vec<u64> = (0..m).collect();
    for _ in 0..2 {
        let mut g = m;
        for _ in 0..num_samples {
            let groups = group_by_label(&oracle(&points));
            let mut state = QState::uniform(&[m as usize], &groups[pick_group(&groups, rng)])?;
            state.fourier(0, false)?;
            g = modmath::gcd(g, state.measure(rng)[0] as u64);
        }
        let d = m / g;
        let check = oracle(&[0, d % m]);
        if check[0] == check[1] {
            return Ok(d);
        }
    }
    Err(Error::SolverFailure(format!(
        "samples on Z_{m} are inconsistent with a hidden subgroup"
    )))
}

/// Verdict of the repetition rule on one batch of rounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Decision {
    TwoGen(u64),
    Cyclic,
    NoSurvivors,
}

/// Rounds with `c = 0` are dropped; one common `h` among the rest means
/// `T(t,s,h)`, two or more distinct values mean `C(t,s)`.
pub fn decide(rounds: &[RoundOutcome]) -> Decision {
    let mut seen = rounds.iter().filter_map(|r| r.h_tilde);
    match seen.next() {
        None => Decision::NoSurvivors,
        Some(h) if seen.all(|x| x == h) => Decision::TwoGen(h),
        Some(_) => Decision::Cyclic,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoPrSolution {
    pub subgroup: SubgroupDesc,
    pub t: u32,
    pub s: u32,
    /// Rounds of the deciding batch.
    pub rounds: Vec<RoundOutcome>,
    /// `1`, or `2` when the first batch had no surviving round.
    pub batches: u32,
    /// A `T(t,s,h)` verdict was refuted by the membership check.
    pub overturned: bool,
}

fn subgroup_x(spec: &GroupSpec, oracle: &dyn HidingFunction, a: &[u64]) -> Vec<u64> {
    let pts: Vec<Element> = a.iter().map(|&a| spec.reduce(a, 0)).collect();
    oracle.query_superposition(&pts)
}

fn check_oracle_spec(spec: &GroupSpec, oracle: &dyn HidingFunction) -> Result<()> {
    if oracle.spec() != spec {
        return Err(Error::domain(format!(
            "oracle is defined on {}, not {spec}",
            oracle.spec()
        )));
    }
    Ok(())
}

/// Recovers the hidden subgroup of a `2^t0 p^r` group.
pub fn solve_2pr<R: Rng + ?Sized>(
    spec: &GroupSpec,
    oracle: &dyn HidingFunction,
    k: usize,
    rng: &mut R,
) -> Result<TwoPrSolution> {
    solve_2pr_inner(spec, oracle, k, rng, false)
}

/// [`solve_2pr`], plus two classical queries testing whether
/// `x^(h 2^t p^(s-1)) y` is in `H` before a `T(t,s,h)` verdict is returned.
/// A failed test turns the verdict into `C(t,s)`.
pub fn solve_2pr_verified<R: Rng + ?Sized>(
    spec: &GroupSpec,
    oracle: &dyn HidingFunction,
    k: usize,
    rng: &mut R,
) -> Result<TwoPrSolution> {
    solve_2pr_inner(spec, oracle, k, rng, true)
}

fn solve_2pr_inner<R: Rng + ?Sized>(
    spec: &GroupSpec,
    oracle: &dyn HidingFunction,
    k: usize,
    rng: &mut R,
    verify: bool,
) -> Result<TwoPrSolution> {
    check_oracle_spec(spec, oracle)?;
    let fam = spec
        .family()
        .ok_or_else(|| Error::domain(format!("{spec} is not of the form 2^t0 p^r")))?;
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    let n = spec.n();
    let d = abelian_hsp_cyclic(
        n,
        &|a: &[u64]| subgroup_x(spec, oracle, a),
        rng,
        default_abelian_samples(n),
    )?;
    let (t, s) = (modmath::valuation(d, 2), modmath::valuation(d, spec.p()));
    if t > fam.t0 || fam.x_index(t, s) != d {
        return Err(Error::SolverFailure(format!(
            "H ∩ <x> has index {d}, which is not 2^t p^s"
        )));
    }
    if s == 0 {
        let subgroup = if oracle.query(spec.y()) == oracle.query(Element::IDENTITY) {
            SubgroupDesc::YJoin { t }
        } else {
            SubgroupDesc::CyclicX { t, s }
        };
        return Ok(TwoPrSolution {
            subgroup,
            t,
            s,
            rounds: Vec::new(),
            batches: 0,
            overturned: false,
        });
    }
    for batch in 1..=2 {
        let rounds = (0..k)
            .map(|_| run_round(spec, t, s, oracle, rng))
            .collect::<Result<Vec<_>>>()?;
        let (subgroup, overturned) = match decide(&rounds) {
            Decision::TwoGen(h) if verify => {
                let witness = spec.reduce(h * fam.x_index(t, s - 1), 1);
                if oracle.query(witness) == oracle.query(Element::IDENTITY) {
                    (SubgroupDesc::TwoGen { t, s, h }, false)
                } else {
                    (SubgroupDesc::CyclicX { t, s }, true)
                }
            }
            Decision::TwoGen(h) => (SubgroupDesc::TwoGen { t, s, h }, false),
            Decision::Cyclic => (SubgroupDesc::CyclicX { t, s }, false),
            Decision::NoSurvivors => continue,
        };
        return Ok(TwoPrSolution {
            subgroup,
            t,
            s,
            rounds,
            batches: batch,
            overturned,
        });
    }
    Err(Error::AllRoundsFailed { rounds: 2 * k })
}

/// How [`solve_general`] reached its answer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "route", rename_all = "snake_case")]
pub enum Route {
    /// `phi11 = 1`: Fourier sampling on `Z_N x Z_p`.
    Abelian,
    /// `Z_{M0}` factor by cyclic sampling, `p`-part through `Psi_i` and [`solve_2pr`].
    Decomposed {
        #[serde(rename = "M0")]
        m0: u64,
        twist_index: u64,
        cyclic_index: u64,
        inner: SubgroupDesc,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneralSolution {
    pub generators: Vec<Element>,
    #[serde(flatten)]
    pub route: Route,
}

impl GeneralSolution {
    pub fn elements(&self, spec: &GroupSpec) -> Result<BTreeSet<Element>> {
        subgroups::closure(&self.generators, spec)
    }
}

/// Recovers the hidden subgroup of `Z_N x| Z_p` as a generating set. With
/// `verify`, the `p`-part goes through [`solve_2pr_verified`] and `f` is
/// compared against `f(e)` on every returned generator.
pub fn solve_general<R: Rng + ?Sized>(
    spec: &GroupSpec,
    oracle: &dyn HidingFunction,
    k: usize,
    rng: &mut R,
    verify: bool,
) -> Result<GeneralSolution> {
    check_oracle_spec(spec, oracle)?;
    let solution = if spec.is_direct_product() {
        GeneralSolution {
            generators: abelian_product(spec, oracle, rng)?,
            route: Route::Abelian,
        }
    } else {
        decomposed(spec, oracle, k, rng, verify)?
    };
    if verify {
        let base = oracle.query(Element::IDENTITY);
        if let Some(g) = solution.generators.iter().find(|&&g| oracle.query(g) != base) {
            return Err(Error::SolverFailure(format!(
                "f is not constant on the recovered subgroup (generator {g})"
            )));
        }
    }
    Ok(solution)
}

fn decomposed<R: Rng + ?Sized>(
    spec: &GroupSpec,
    oracle: &dyn HidingFunction,
    k: usize,
    rng: &mut R,
    verify: bool,
) -> Result<GeneralSolution> {
    let dec = decomposition::decompose(spec)?;
    let unmap = |c0: u64, inner: Element| dec.unmap_element(ProductElement { c0, inner });
    let mut generators = Vec::new();

    let cyclic_index = if dec.m0 == 1 {
        1
    } else {
        let lift = (0..dec.m0)
            .map(|c| unmap(c, Element::IDENTITY))
            .collect::<Result<Vec<_>>>()?;
        let f0 = |c: &[u64]| {
            let pts: Vec<Element> = c.iter().map(|&c| lift[c as usize]).collect();
            oracle.query_superposition(&pts)
        };
        let d0 = abelian_hsp_cyclic(dec.m0, &f0, rng, default_abelian_samples(dec.m0))?;
        if d0 < dec.m0 {
            generators.push(lift[d0 as usize]);
        }
        d0
    };

    let canon = &dec.canonical_inner;
    let lift = canon
        .elements()
        .map(|g| unmap(0, subgroups::isomorphism_psi(dec.twist_index, g, canon, &dec.inner)?))
        .collect::<Result<Vec<_>>>()?;
    let pulled = PulledBackOracle::new(oracle, canon.clone(), |g| lift[canon.index_of(g)]);
    let inner = solve_2pr_inner(canon, &pulled, k, rng, verify)?.subgroup;
    generators.extend(
        inner
            .generators(canon)?
            .into_iter()
            .map(|g| lift[canon.index_of(g)])
            .filter(|&g| g != Element::IDENTITY),
    );
    Ok(GeneralSolution {
        generators,
        route: Route::Decomposed {
            m0: dec.m0,
            twist_index: dec.twist_index,
            cyclic_index,
            inner,
        },
    })
}

/// Fourier sampling on `Z_N x Z_p`. Samples `(u, v)` annihilate `H`:
/// `u a / N + v b / p` is an integer on `H`, and `H` is read back as the
/// common solution set.
fn abelian_product<R: Rng + ?Sized>(
    spec: &GroupSpec,
    oracle: &dyn HidingFunction,
    rng: &mut R,
) -> Result<Vec<Element>> {
    let (n, p) = (spec.n(), spec.p());
    let dims = [n as usize, p as usize];
    dense_len(&dims)?;
    let all: Vec<Element> = spec.elements().collect();
    let samples: Vec<(u64, u64)> = (0..default_abelian_samples(spec.order()))
        .map(|_| {
            let groups = group_by_label(&oracle.query_superposition(&all));
            let mut state = QState::uniform(&dims, &groups[pick_group(&groups, rng)])?;
            state.fourier(0, false)?;
            state.fourier(1, false)?;
            let uv = state.measure(rng);
            Ok((uv[0] as u64, uv[1] as u64))
        })
        .collect::<Result<_>>()?;

    // b = 0: u a = 0 (mod N) for every sample.
    let d = n / samples.iter().fold(n, |g, &(u, _)| modmath::gcd(g, u));
    let mut generators = Vec::new();
    if d < n {
        generators.push(Element::new(d, 0));
    }
    // b = 1: u p a = -v N (mod N p) for every sample.
    let np = n * p;
    let mut acc = Some((0u64, 1u64));
    for &(u, v) in &samples {
        let Some((r, m)) = acc else { break };
        let coeff = mul_mod(u, p, np);
        let rhs = (np - mul_mod(v, n, np)) % np;
        let g = modmath::gcd(coeff, np);
        acc = if !rhs.is_multiple_of(g) {
            None
        } else {
            let modulus = np / g;
            let a = mul_mod(rhs / g, modmath::mod_inverse(coeff / g, modulus)?, modulus);
            modmath::crt_merge(r, m, a, modulus)
        };
    }
    if let Some((a, _)) = acc {
        generators.push(Element::new(a % n, 1));
    }
    Ok(generators)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::make_oracle;
    use std::f64::consts::PI;

    fn canon(p: u64, r: u32, t0: u32) -> GroupSpec {
        GroupSpec::canonical(p, r, t0).unwrap()
    }

    fn naive_dft(input: &[Complex64]) -> Vec<Complex64> {
        let n = input.len();
        (0..n)
            .map(|k| {
                input
                    .iter()
                    .enumerate()
                    .map(|(l, &x)| x * Complex64::from_polar(1.0, 2.0 * PI * (k * l) as f64 / n as f64))
                    .sum::<Complex64>()
                    / (n as f64).sqrt()
            })
            .collect()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn qft_examples() {
        let s = qft_p(QState::basis(&[3], &[0]).unwrap(), 0, 3).unwrap();
        let third = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
        assert!(s.amplitudes().iter().all(|&a| close(a, third, 1e-12)));

        let s = qft_p(QState::basis(&[3], &[1]).unwrap(), 0, 3).unwrap();
        for k in 0..3 {
            let w = Complex64::from_polar(1.0 / 3f64.sqrt(), 2.0 * PI * k as f64 / 3.0);
            assert!(close(s.amplitude(&[k]).unwrap(), w, 1e-12));
        }
        assert!(qft_p(QState::basis(&[5], &[0]).unwrap(), 0, 3).is_err());
        assert!(qft_p(QState::basis(&[3], &[0]).unwrap(), 1, 3).is_err());
    }

    #[test]
    fn qft_is_unitary_but_not_an_involution() {
        let start = QState::uniform(&[5, 3], &[1, 4, 8]).unwrap();
        let mut s = start.clone();
        s.fourier(0, false).unwrap();
        s.fourier(0, true).unwrap();
        for (a, b) in s.amplitudes().iter().zip(start.amplitudes()) {
            assert!(close(*a, *b, 1e-12));
        }
        let twice = qft_p(qft_p(start.clone(), 0, 5).unwrap(), 0, 5).unwrap();
        assert!(twice
            .amplitudes()
            .iter()
            .zip(start.amplitudes())
            .any(|(a, b)| !close(*a, *b, 1e-6)));
        assert!((twice.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qft_matches_the_defining_sum_on_each_register() {
        let amps: Vec<Complex64> = (0..15)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.7).cos()))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let amps: Vec<Complex64> = amps.into_iter().map(|a| a / norm).collect();
        let state = QState::from_amplitudes(vec![3, 5], amps.clone()).unwrap();

        let mut on_second = state.clone();
        on_second.fourier(1, false).unwrap();
        for row in 0..3 {
            let expected = naive_dft(&amps[row * 5..row * 5 + 5]);
            for (k, e) in expected.iter().enumerate() {
                assert!(close(on_second.amplitude(&[row, k]).unwrap(), *e, 1e-12));
            }
        }
        let mut on_first = state;
        on_first.fourier(0, false).unwrap();
        for col in 0..5 {
            let column: Vec<Complex64> = (0..3).map(|r| amps[r * 5 + col]).collect();
            for (k, e) in naive_dft(&column).iter().enumerate() {
                assert!(close(on_first.amplitude(&[k, col]).unwrap(), *e, 1e-12));
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn fourier_preserves_norm_and_inverts(
            dims in proptest::sample::select(vec![vec![3usize], vec![5, 3], vec![2, 7], vec![18]]),
            raw in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 126),
            register in 0usize..2,
        ) {
            let len: usize = dims.iter().product();
            let amps: Vec<Complex64> = raw[..len].iter().map(|&(re, im)| Complex64::new(re, im)).collect();
            let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            proptest::prop_assume!(norm > 1e-3);
            let start = QState::from_amplitudes(dims.clone(), amps.into_iter().map(|a| a / norm).collect()).unwrap();
            let register = register % dims.len();
            let mut s = start.clone();
            s.fourier(register, false).unwrap();
            proptest::prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            s.fourier(register, true).unwrap();
            for (a, b) in s.amplitudes().iter().zip(start.amplitudes()) {
                proptest::prop_assert!(close(*a, *b, 1e-12));
            }
        }
    }

    #[test]
    fn rejects_unnormalized_states() {
        assert!(QState::from_amplitudes(vec![2], vec![Complex64::new(1.0, 0.0); 2]).is_err());
        assert!(QState::uniform(&[3], &[1, 1]).is_err());
        assert!(QState::uniform(&[3], &[3]).is_err());
    }

    fn ch_plus_d_support(p: u64, h: u64) -> BTreeSet<(u64, u64)> {
        (0..p)
            .flat_map(|c| (0..p).map(move |d| (c, d)))
            .filter(|&(c, d)| (c * h + d).is_multiple_of(p))
            .collect()
    }

    #[test]
    fn distribution_examples() {
        let g = canon(3, 2, 1);
        let dist = post_collapse_distribution(&g, 0, 1, &SubgroupDesc::TwoGen { t: 0, s: 1, h: 1 }).unwrap();
        assert_eq!(dist.support(1e-12), BTreeSet::from([(0, 0), (1, 2), (2, 1)]));
        for (c, d) in dist.support(1e-12) {
            assert!((dist.get(c, d) - 1.0 / 3.0).abs() < 1e-9);
        }
        let dist = post_collapse_distribution(&g, 1, 2, &SubgroupDesc::CyclicX { t: 1, s: 2 }).unwrap();
        assert!(dist.triples().all(|(_, _, q)| (q - 1.0 / 9.0).abs() < 1e-9));

        let g = canon(5, 2, 0);
        let dist = post_collapse_distribution(&g, 0, 2, &SubgroupDesc::TwoGen { t: 0, s: 2, h: 0 }).unwrap();
        assert_eq!(dist.support(1e-12), (0..5).map(|c| (c, 0)).collect());
    }

    #[test]
    fn cyclic_distribution_is_uniform() {
        for (p, r, t0) in [(3, 2, 1), (5, 2, 0), (7, 2, 1)] {
            let g = canon(p, r, t0);
            for t in 0..=t0 {
                for s in 1..=r {
                    let dist = post_collapse_distribution(&g, t, s, &SubgroupDesc::CyclicX { t, s }).unwrap();
                    let q = 1.0 / (p * p) as f64;
                    assert!(dist.triples().all(|(_, _, x)| (x - q).abs() < 1e-9), "p={p} t={t} s={s}");
                }
            }
        }
    }

    #[test]
    fn survival_probability_is_exact() {
        for (p, r, t0) in [(3, 2, 1), (5, 2, 1), (7, 1, 0)] {
            let g = canon(p, r, t0);
            for t in 0..=t0 {
                for s in 1..=r {
                    for h in 0..p {
                        let dist = post_collapse_distribution(&g, t, s, &SubgroupDesc::TwoGen { t, s, h }).unwrap();
                        let survive: f64 = dist.triples().filter(|&(c, _, _)| c != 0).map(|(_, _, q)| q).sum();
                        assert!((survive - (1.0 - 1.0 / p as f64)).abs() < 1e-9);
                        for (c, d) in dist.support(1e-12) {
                            assert_eq!((c * h + d) % p, 0);
                            if c != 0 {
                                assert_eq!(RoundOutcome::from_measurement(c, d, p, 0).h_tilde, Some(h));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn distribution_json_is_triples() {
        let g = canon(3, 1, 0);
        let dist = post_collapse_distribution(&g, 0, 1, &SubgroupDesc::TwoGen { t: 0, s: 1, h: 2 }).unwrap();
        let json: serde_json::Value = serde_json::to_value(&dist).unwrap();
        let rows = json.as_array().unwrap();
        assert_eq!(rows.len(), 9);
        assert_eq!(rows[0][0], 0);
        assert_eq!(rows[0][1], 0);
        assert!((rows[0][2].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn branch_phases_and_norms() {
        for (p, r, t0) in [(3, 2, 1), (5, 2, 0), (7, 1, 1)] {
            let g = canon(p, r, t0);
            for t in 0..=t0 {
                for s in 1..=r {
                    for h in 0..p {
                        let desc = SubgroupDesc::TwoGen { t, s, h };
                        let branches = analysis_branches(&g, t, s, &desc).unwrap();
                        assert_eq!(branches.len() as u64, p);
                        for b in branches {
                            assert!((b.state.norm_sqr() - 1.0).abs() < 1e-12);
                            for c in 0..p {
                                for d in 0..p {
                                    let amp = b.state.amplitude(&[c as usize, d as usize]).unwrap();
                                    let expected = if (c * h + d) % p == 0 {
                                        Complex64::from_polar(
                                            1.0 / (p as f64).sqrt(),
                                            2.0 * PI * (b.a0 * c) as f64 / p as f64,
                                        )
                                    } else {
                                        Complex64::new(0.0, 0.0)
                                    };
                                    assert!(close(amp, expected, 1e-9), "p={p} h={h} a0={}", b.a0);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sampled_rounds_respect_the_support() {
        let g = canon(3, 2, 1);
        let desc = SubgroupDesc::TwoGen { t: 1, s: 2, h: 2 };
        let o = make_oracle(&g, &desc).unwrap();
        let mut rng = derive_rng(7, 0);
        let support = ch_plus_d_support(3, 2);
        let mut zero_c = 0;
        for _ in 0..600 {
            let out = run_round(&g, 1, 2, &o, &mut rng).unwrap();
            assert!(support.contains(&(out.c_tilde, out.d_tilde)));
            match out.h_tilde {
                Some(h) => assert_eq!(h, 2),
                None => zero_c += 1,
            }
        }
        assert!((150..250).contains(&zero_c), "{zero_c}");
        assert_eq!(o.query_count(), 600);
        assert!(run_round(&g, 1, 0, &o, &mut rng).is_err());
    }

    #[test]
    fn h_tilde_formula() {
        for p in [3u64, 5, 7] {
            for c in 1..p {
                for h in 0..p {
                    let d = (p - c * h % p) % p;
                    assert_eq!(RoundOutcome::from_measurement(c, d, p, 0).h_tilde, Some(h));
                }
            }
            assert_eq!(RoundOutcome::from_measurement(0, 1, p, 0).h_tilde, None);
        }
    }

    struct CyclicOracle {
        m: u64,
        d: u64,
    }

    impl CyclicOracle {
        fn labels(&self, xs: &[u64]) -> Vec<u64> {
            xs.iter().map(|&x| x % self.m % self.d).collect()
        }
    }

    #[test]
    fn abelian_support_is_the_annihilator() {
        let m = 18u64;
        for d in (1..=m).filter(|d| m.is_multiple_of(*d)) {
            let o = CyclicOracle { m, d };
            let groups = group_by_label(&o.labels(&(0..m).collect::<Vec<_>>()));
            for g in &groups {
                let mut state = QState::uniform(&[m as usize], g).unwrap();
                state.fourier(0, false).unwrap();
                let support: BTreeSet<u64> = state
                    .probabilities()
                    .iter()
                    .enumerate()
                    .filter(|(_, &q)| q > 1e-12)
                    .map(|(k, _)| k as u64)
                    .collect();
                let annihilator: BTreeSet<u64> = (0..m).filter(|k| k * d % m == 0).collect();
                assert_eq!(support, annihilator, "d={d}");
            }
        }
    }

    #[test]
    fn abelian_recovers_every_divisor() {
        for m in [6u64, 18, 54, 50] {
            for d in (1..=m).filter(|d| m % d == 0) {
                let o = CyclicOracle { m, d };
                for run in 0..100 {
                    let mut rng = derive_rng(m * 1000 + d, run);
                    let got = abelian_hsp_cyclic(m, &|x: &[u64]| o.labels(x), &mut rng, default_abelian_samples(m)).unwrap();
                    assert_eq!(got, d, "M={m} d={d} run={run}");
                }
            }
        }
    }

    #[test]
    fn too_few_samples_fail_loudly() {
        let o = CyclicOracle { m: 12, d: 12 };
        let results: Vec<Result<u64>> = (0..50)
            .map(|run| abelian_hsp_cyclic(12, &|x: &[u64]| o.labels(x), &mut derive_rng(2, run), 1))
            .collect();
        assert!(results.iter().any(|r| matches!(r, Err(Error::SolverFailure(_)))));
        assert!(results.iter().flatten().all(|&d| d == 12));
    }

    #[test]
    fn decision_rule() {
        let r = |c, d| RoundOutcome::from_measurement(c, d, 3, 0);
        assert_eq!(decide(&[r(0, 0), r(0, 1)]), Decision::NoSurvivors);
        assert_eq!(decide(&[r(0, 0), r(1, 2), r(2, 1)]), Decision::TwoGen(1));
        assert_eq!(decide(&[r(1, 2), r(1, 0)]), Decision::Cyclic);
    }

    fn same_subgroup(a: &SubgroupDesc, b: &SubgroupDesc, g: &GroupSpec) -> bool {
        a.elements(g).unwrap() == b.elements(g).unwrap()
    }

    #[test]
    fn solve_2pr_examples() {
        let g = canon(3, 1, 1);
        let mut fails = 0;
        let desc = SubgroupDesc::TwoGen { t: 0, s: 1, h: 2 };
        let o = make_oracle(&g, &desc).unwrap();
        for run in 0..200 {
            let got = solve_2pr(&g, &o, 5, &mut derive_rng(3, run)).unwrap();
            fails += u32::from(!same_subgroup(&got.subgroup, &desc, &g));
        }
        assert_eq!(fails, 0);

        let g = canon(3, 2, 1);
        for desc in [SubgroupDesc::YJoin { t: 0 }, SubgroupDesc::YJoin { t: 1 }, SubgroupDesc::CyclicX { t: 1, s: 0 }, SubgroupDesc::CyclicX { t: 0, s: 0 }] {
            let o = make_oracle(&g, &desc).unwrap();
            let got = solve_2pr(&g, &o, 4, &mut derive_rng(5, 0)).unwrap();
            assert!(same_subgroup(&got.subgroup, &desc, &g), "{desc}");
            assert!(got.rounds.is_empty());
        }

        let desc = SubgroupDesc::CyclicX { t: 1, s: 1 };
        let o = make_oracle(&g, &desc).unwrap();
        let ok = (0..300)
            .filter(|&run| {
                let got = solve_2pr(&g, &o, 6, &mut derive_rng(11, run)).unwrap();
                same_subgroup(&got.subgroup, &desc, &g)
            })
            .count();
        let bound = 1.0 - (64.0 * 3.0 - 3.0 + 1.0) / 729.0;
        assert!(ok as f64 / 300.0 >= bound - 0.1, "{ok}");
    }

    #[test]
    fn solve_2pr_recovers_every_subgroup() {
        for (p, r, t0) in [(3, 2, 1), (5, 1, 1), (3, 2, 0), (5, 2, 0)] {
            let g = canon(p, r, t0);
            for desc in subgroups::enumerate_subgroups(&g).unwrap() {
                let o = make_oracle(&g, &desc).unwrap();
                let got = solve_2pr(&g, &o, 10, &mut derive_rng(p, 0)).unwrap();
                assert!(same_subgroup(&got.subgroup, &desc, &g), "{g}: {desc} vs {}", got.subgroup);
            }
        }
    }

    #[test]
    fn verified_mode_never_misreports_cyclic_subgroups() {
        let g = canon(3, 2, 1);
        let desc = SubgroupDesc::CyclicX { t: 0, s: 2 };
        let o = make_oracle(&g, &desc).unwrap();
        let (mut overturned, mut gave_up) = (0, 0);
        for run in 0..300 {
            // Losing every round is reported, never turned into a wrong answer.
            match solve_2pr_verified(&g, &o, 3, &mut derive_rng(13, run)) {
                Ok(got) => {
                    assert!(same_subgroup(&got.subgroup, &desc, &g));
                    overturned += u32::from(got.overturned);
                }
                Err(Error::AllRoundsFailed { rounds: 6 }) => gave_up += 1,
                Err(e) => panic!("{e}"),
            }
        }
        assert!(overturned > 0);
        assert!(gave_up < 10, "{gave_up}");
        let desc = SubgroupDesc::TwoGen { t: 1, s: 1, h: 2 };
        let o = make_oracle(&g, &desc).unwrap();
        // k = 3 would lose both batches with probability 3^-6 per run.
        for run in 0..50 {
            let got = solve_2pr_verified(&g, &o, 8, &mut derive_rng(14, run)).unwrap();
            assert!(same_subgroup(&got.subgroup, &desc, &g));
            assert!(!got.overturned);
        }
    }

    #[test]
    fn solve_2pr_rejects_bad_inputs() {
        let g = canon(3, 2, 1);
        let o = make_oracle(&g, &SubgroupDesc::YJoin { t: 0 }).unwrap();
        assert!(solve_2pr(&g, &o, 0, &mut derive_rng(0, 0)).is_err());
        assert!(solve_2pr(&canon(3, 2, 0), &o, 3, &mut derive_rng(0, 0)).is_err());
    }

    #[test]
    fn solve_general_on_decomposed_groups() {
        for phi in [31u64, 16] {
            let g = GroupSpec::new(45, 3, phi).unwrap();
            let all = subgroups::all_subgroups_brute(&g).unwrap();
            assert_eq!(all.len(), 20);
            for (i, set) in all.iter().enumerate() {
                let desc = SubgroupDesc::ExplicitSet(set.clone());
                let o = make_oracle(&g, &desc).unwrap();
                let got = solve_general(&g, &o, 10, &mut derive_rng(phi, i as u64), true).unwrap();
                assert_eq!(&got.elements(&g).unwrap(), set, "phi={phi} H={desc}");
            }
        }
    }

    #[test]
    fn solve_general_trivial_and_full() {
        let g = GroupSpec::new(45, 3, 31).unwrap();
        let trivial = SubgroupDesc::ExplicitSet(BTreeSet::from([Element::IDENTITY]));
        let o = make_oracle(&g, &trivial).unwrap();
        let got = solve_general(&g, &o, 8, &mut derive_rng(0, 0), false).unwrap();
        assert!(got.generators.is_empty());
        let full = SubgroupDesc::ExplicitSet(g.elements().collect());
        let o = make_oracle(&g, &full).unwrap();
        let got = solve_general(&g, &o, 8, &mut derive_rng(0, 0), false).unwrap();
        assert_eq!(got.elements(&g).unwrap().len(), 135);
    }

    #[test]
    fn solve_general_on_direct_products() {
        for (n, p) in [(15u64, 3u64), (9, 3), (10, 5), (21, 3)] {
            let g = GroupSpec::new(n, p, 1).unwrap();
            for (i, set) in subgroups::all_subgroups_brute(&g).unwrap().iter().enumerate() {
                let desc = SubgroupDesc::ExplicitSet(set.clone());
                let o = make_oracle(&g, &desc).unwrap();
                let got = solve_general(&g, &o, 8, &mut derive_rng(n, i as u64), true).unwrap();
                assert_eq!(got.route, Route::Abelian);
                assert_eq!(&got.elements(&g).unwrap(), set);
            }
        }
    }

    #[test]
    fn solve_general_rejects_hypothesis_violations() {
        // 7 - 1 is divisible by 3.
        let g = GroupSpec::new(63, 3, 43).unwrap();
        let o = make_oracle(&g, &SubgroupDesc::ExplicitSet(g.elements().collect())).unwrap();
        match solve_general(&g, &o, 4, &mut derive_rng(0, 0), false) {
            Err(Error::Domain(_)) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let g = canon(5, 2, 1);
        let o = make_oracle(&g, &SubgroupDesc::TwoGen { t: 1, s: 1, h: 3 }).unwrap();
        let a = solve_2pr(&g, &o, 6, &mut derive_rng(42, 9)).unwrap();
        let b = solve_2pr(&g, &o, 6, &mut derive_rng(42, 9)).unwrap();
        assert_eq!(a.rounds, b.rounds);
    }
}
