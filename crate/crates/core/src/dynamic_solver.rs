//! Finite-horizon allocation for a queue with Poisson arrivals and a latency
//! penalty.
//!
//! Over a horizon of `N` stages the expected benefit per stage is
//!
//! ```text
//! J(t) = 1/N * sum_l [ f(t_l) - c E[n_l] t_l - c lambda t_l^2 / 2 ],
//! E[n_l] = n1 - l + 1 + lambda * sum_{j<l} t_j .
//! ```
//!
//! For a fixed set of processed stages `eta_1 < ... < eta_m` every stationary
//! point is parametrised by the first allocation: the later ones sit on the
//! upper branch of `f'` at `f'(t_1) - c (eta_k - eta_1)`, and `t_1` solves
//! `f'(t_1) = P(t_1)` where `P` is the effective penalty rate. The solver
//! enumerates every processed set, finds these roots by bisection, certifies
//! them and keeps the best candidate whose expected queue never empties.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::numeric::{bisect, expand_right, TIME_TOLERANCE};
use crate::sigmoid::{Branch, Sigmoid};
use crate::static_solvers::AllocationVector;

/// Default cap on the horizon; enumeration visits `2^N` processed sets.
pub const DEFAULT_MAX_HORIZON: usize = 16;

/// Largest accepted residual of the stationarity system.
pub const STATIONARITY_TOLERANCE: f64 = 1e-6;

/// Slack allowed in `f''(t_k) <= c lambda`.
pub const CURVATURE_TOLERANCE: f64 = 1e-9;

/// Expected queue lengths must exceed this to count as non-empty.
pub const QUEUE_TOLERANCE: f64 = 1e-12;

/// Sample points used to isolate roots on the non-monotone pieces.
const SCAN_POINTS: usize = 24;

/// Context of one finite-horizon solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueParams {
    /// Expected queue length at the first stage; fractional values are fine.
    pub initial_queue: f64,
    /// Poisson arrival rate, tasks per second.
    pub arrival_rate: f64,
    /// Latency penalty per waiting task per second.
    pub penalty_rate: f64,
    /// Number of stages `N` in the lookahead.
    pub horizon: usize,
}

impl QueueParams {
    pub fn new(initial_queue: f64, arrival_rate: f64, penalty_rate: f64, horizon: usize) -> Result<Self> {
        let params = QueueParams { initial_queue, arrival_rate, penalty_rate, horizon };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.penalty_rate > 0.0 && self.penalty_rate.is_finite()) {
            return Err(Error::domain(format!("penalty rate must be positive, got {}", self.penalty_rate)));
        }
        if !(self.arrival_rate >= 0.0 && self.arrival_rate.is_finite()) {
            return Err(Error::domain(format!("arrival rate must be non-negative, got {}", self.arrival_rate)));
        }
        if self.horizon == 0 {
            return Err(Error::domain("horizon must be at least 1"));
        }
        if !(self.initial_queue >= 1.0 && self.initial_queue.is_finite()) {
            return Err(Error::domain(format!("initial queue length must be at least 1, got {}", self.initial_queue)));
        }
        Ok(())
    }
}

/// Stages that receive a positive duration, stored zero-based and strictly
/// increasing. Displays as the `{0,+}^N` pattern, stage 1 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProcessedSet {
    stages: Vec<usize>,
    horizon: usize,
}

impl ProcessedSet {
    /// Builds a set from zero-based stage indices.
    pub fn new(stages: Vec<usize>, horizon: usize) -> Result<Self> {
        if stages.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("processed stages must be strictly increasing"));
        }
        if stages.last().is_some_and(|&s| s >= horizon) {
            return Err(Error::domain(format!("processed stage outside horizon {horizon}")));
        }
        Ok(ProcessedSet { stages, horizon })
    }

    /// Bit `i` of `mask` marks stage `i + 1` as processed.
    pub fn from_mask(mask: u64, horizon: usize) -> Self {
        let stages = (0..horizon).filter(|i| mask >> i & 1 == 1).collect();
        ProcessedSet { stages, horizon }
    }

    pub fn stages(&self) -> &[usize] {
        &self.stages
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn contains(&self, stage: usize) -> bool {
        self.stages.binary_search(&stage).is_ok()
    }

    /// `'+'` for processed stages, `'0'` for dropped ones.
    pub fn pattern(&self) -> Vec<bool> {
        (0..self.horizon).map(|i| self.contains(i)).collect()
    }

    fn offsets(&self) -> impl Iterator<Item = f64> + '_ {
        let first = self.stages[0];
        self.stages[1..].iter().map(move |&s| (s - first) as f64)
    }

    fn span(&self) -> f64 {
        (self.stages[self.stages.len() - 1] - self.stages[0]) as f64
    }
}

impl fmt::Display for ProcessedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for processed in self.pattern() {
            f.write_str(if processed { "+" } else { "0" })?;
        }
        Ok(())
    }
}

/// `{0,+}` strings ordered lexicographically with `0 < +`.
fn compare_patterns(a: &ProcessedSet, b: &ProcessedSet) -> Ordering {
    a.pattern().cmp(&b.pattern())
}

/// Effective penalty rate for the first processed task.
///
/// `Infinite` marks first allocations for which some later processed task
/// has no stationary duration; it compares above every finite rate and
/// supports no arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EffectivePenalty {
    Finite(f64),
    Infinite,
}

impl EffectivePenalty {
    /// `slope - penalty`, with `-inf` for the infinite sentinel.
    pub fn shortfall(self, slope: f64) -> f64 {
        match self {
            EffectivePenalty::Finite(p) => slope - p,
            EffectivePenalty::Infinite => f64::NEG_INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, EffectivePenalty::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            EffectivePenalty::Finite(p) => Some(p),
            EffectivePenalty::Infinite => None,
        }
    }
}

impl PartialOrd<f64> for EffectivePenalty {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        match self {
            EffectivePenalty::Finite(p) => p.partial_cmp(other),
            EffectivePenalty::Infinite => Some(Ordering::Greater),
        }
    }
}

impl PartialEq<f64> for EffectivePenalty {
    fn eq(&self, other: &f64) -> bool {
        matches!(self, EffectivePenalty::Finite(p) if p == other)
    }
}

/// Which of the sufficient conditions for a local maximum hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Existence {
    /// `f'(delta2) >= P(delta2)`: a maximum with the first allocation past `delta2`.
    UpperRegion,
    /// `f'(tau1) <= P(tau1)`, `f'(delta1) >= P(delta1)`, `delta1 >= tau1`.
    LowerRegion,
    Both,
    None,
}

impl Existence {
    fn from_flags(upper: bool, lower: bool) -> Self {
        match (upper, lower) {
            (true, true) => Existence::Both,
            (true, false) => Existence::UpperRegion,
            (false, true) => Existence::LowerRegion,
            (false, false) => Existence::None,
        }
    }
}

/// A certified local maximum (or the all-zero baseline) of `J`.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSolution {
    pub processed: ProcessedSet,
    pub allocation: AllocationVector,
    /// `J` at `allocation`.
    pub objective: f64,
    /// `E[n_1..N]` under the clipped recursion.
    pub expected_queue: Vec<f64>,
    /// Every expected queue length is positive.
    pub feasible: bool,
}

/// Counters over one enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CandidateStats {
    /// Processed sets visited, the all-zero string included.
    pub enumerated: usize,
    /// Sets for which the sufficient existence conditions hold.
    pub admitted: usize,
    /// Sets that produced a certified local maximum.
    pub solved: usize,
    /// Solved sets whose expected queue stays non-empty.
    pub feasible: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HorizonSolution {
    pub best: CandidateSolution,
    pub stats: CandidateStats,
}

/// Finite-horizon problem for a given performance function and queue state.
#[derive(Debug, Clone, Copy)]
pub struct DynamicQueue {
    sigmoid: Sigmoid,
    params: QueueParams,
    max_horizon: usize,
}

impl DynamicQueue {
    pub fn new(sigmoid: Sigmoid, params: QueueParams) -> Result<Self> {
        params.validate()?;
        Ok(DynamicQueue { sigmoid, params, max_horizon: DEFAULT_MAX_HORIZON })
    }

    /// Overrides the enumeration cap.
    pub fn with_max_horizon(mut self, max_horizon: usize) -> Self {
        self.max_horizon = max_horizon;
        self
    }

    pub fn params(&self) -> &QueueParams {
        &self.params
    }

    pub fn sigmoid(&self) -> &Sigmoid {
        &self.sigmoid
    }

    fn check_len(&self, t: &[f64]) -> Result<()> {
        if t.len() != self.params.horizon {
            return Err(Error::domain(format!(
                "allocation has {} entries, horizon is {}",
                t.len(),
                self.params.horizon
            )));
        }
        if t.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::domain("allocation entries must be finite and non-negative"));
        }
        Ok(())
    }

    /// Expected benefit per stage, `J(t)`, assuming the queue never empties.
    pub fn objective(&self, t: &[f64]) -> Result<f64> {
        self.check_len(t)?;
        Ok(self.objective_unchecked(t))
    }

    fn objective_unchecked(&self, t: &[f64]) -> f64 {
        let QueueParams { initial_queue: n1, arrival_rate: lambda, penalty_rate: c, horizon } = self.params;
        let mut elapsed = 0.0;
        let mut sum = 0.0;
        for (l, &tl) in t.iter().enumerate() {
            let waiting = n1 - l as f64 + lambda * elapsed;
            sum += self.sigmoid.f(tl) - c * waiting * tl - 0.5 * c * lambda * tl * tl;
            elapsed += tl;
        }
        sum / horizon as f64
    }

    /// `E[n_1..N]` under `E[n_{l+1}] = max(0, E[n_l] - 1 + lambda t_l)`.
    pub fn expected_queue_evolution(&self, t: &[f64]) -> Result<Vec<f64>> {
        self.check_len(t)?;
        Ok(self.queue_unchecked(t))
    }

    fn queue_unchecked(&self, t: &[f64]) -> Vec<f64> {
        let mut n = self.params.initial_queue;
        t.iter()
            .map(|&tl| {
                let current = n;
                n = (n - 1.0 + self.params.arrival_rate * tl).max(0.0);
                current
            })
            .collect()
    }

    /// Durations of the later processed stages implied by a first allocation
    /// `t1`, or `None` when one of them has no stationary duration.
    fn coupled(&self, pset: &ProcessedSet, t1: f64, out: &mut Vec<f64>) -> bool {
        out.clear();
        let slope = self.sigmoid.df(t1);
        for offset in pset.offsets() {
            let level = slope - self.params.penalty_rate * offset;
            if level <= 0.0 {
                return false;
            }
            match self.sigmoid.derivative_inverse(level, Branch::Upper) {
                Ok(t) => out.push(t),
                Err(_) => return false,
            }
        }
        true
    }

    /// Effective penalty rate `P(t1)` for the first processed stage.
    ///
    /// Returns `Infinite` when `f'(t1) <= c (eta_m - eta_1)`: the last
    /// processed stage would need an unbounded duration.
    pub fn effective_penalty(&self, pset: &ProcessedSet, t1: f64) -> EffectivePenalty {
        let mut scratch = Vec::with_capacity(pset.len());
        self.penalty_with(pset, t1, &mut scratch)
    }

    fn penalty_with(&self, pset: &ProcessedSet, t1: f64, scratch: &mut Vec<f64>) -> EffectivePenalty {
        if pset.is_empty() || !self.coupled(pset, t1, scratch) {
            return EffectivePenalty::Infinite;
        }
        let QueueParams { initial_queue: n1, arrival_rate: lambda, penalty_rate: c, .. } = self.params;
        let first_stage = (pset.stages[0] + 1) as f64;
        let later: f64 = scratch.iter().sum();
        EffectivePenalty::Finite(c * (n1 - first_stage + 1.0 + lambda * t1 + lambda * later))
    }

    /// Smallest first allocation for which every later processed stage has a
    /// stationary duration: the lower-branch root of `f'(t) = c (eta_m - eta_1)`.
    ///
    /// Zero for a single processed stage, when the level exceeds `f'(t_inf)`,
    /// and when the level lies below `f'(0)` (every small duration qualifies).
    pub fn min_feasible_first_allocation(&self, pset: &ProcessedSet) -> f64 {
        if pset.len() <= 1 {
            return 0.0;
        }
        let level = self.params.penalty_rate * pset.span();
        let profile = self.sigmoid.profile();
        if level > profile.max_slope || level <= profile.slope_at_zero {
            return 0.0;
        }
        self.sigmoid.derivative_inverse(level, Branch::Lower).unwrap_or(0.0)
    }

    fn curvature_level(&self) -> f64 {
        self.params.penalty_rate * self.params.arrival_rate
    }

    /// Evaluates the two sufficient conditions for a local maximum consistent
    /// with `pset`.
    pub fn existence_check(&self, pset: &ProcessedSet) -> Result<Existence> {
        if pset.is_empty() {
            return Err(Error::domain("existence check needs a non-empty processed set"));
        }
        let level = self.curvature_level();
        if level == 0.0 {
            let ok = self.static_levels(pset).is_some();
            return Ok(Existence::from_flags(ok, false));
        }
        let (delta1, delta2) = self.sigmoid.curvature_crossings(level)?;
        let tau1 = self.min_feasible_first_allocation(pset);
        let mut scratch = Vec::with_capacity(pset.len());
        let mut gap = |t: f64| self.penalty_with(pset, t, &mut scratch).shortfall(self.sigmoid.df(t));
        let upper = gap(delta2) >= 0.0;
        let lower = delta1 >= tau1 && gap(tau1) <= 0.0 && gap(delta1) >= 0.0;
        Ok(Existence::from_flags(upper, lower))
    }

    /// Stationary levels `c (n1 - eta_k + 1)` when there are no arrivals;
    /// `None` unless every level lies in `(0, f'(t_inf)]`.
    fn static_levels(&self, pset: &ProcessedSet) -> Option<Vec<f64>> {
        let QueueParams { initial_queue: n1, penalty_rate: c, .. } = self.params;
        let max = self.sigmoid.profile().max_slope;
        pset.stages
            .iter()
            .map(|&s| {
                let level = c * (n1 - s as f64);
                (level > 0.0 && level <= max).then_some(level)
            })
            .collect()
    }

    /// Locates the best certified local maximum of `J` whose support is
    /// exactly `pset`.
    ///
    /// A single processed stage is searched directly in its duration. With
    /// several stages the search runs over the last duration `t_m`, which
    /// fixes every other one through `f'(t_k) = f'(t_m) + c (eta_m - eta_k)`;
    /// the first stage may sit on either branch of `f'`, the later ones on
    /// the upper branch. Roots with `f''(t_1) > c lambda` are skipped, the
    /// rest are verified (a residual violation is an error) and saddle points
    /// are discarded. Among the survivors the feasible one with the largest
    /// `J` wins.
    pub fn solve_consistent_allocation(&self, pset: &ProcessedSet) -> Result<Option<CandidateSolution>> {
        if pset.is_empty() {
            return Err(Error::domain("processed set must be non-empty"));
        }
        if pset.horizon != self.params.horizon {
            return Err(Error::domain("processed set horizon differs from the queue horizon"));
        }
        let chains = if self.curvature_level() == 0.0 {
            self.no_arrival_chain(pset)?.into_iter().collect()
        } else if pset.len() == 1 {
            self.single_stage_roots(pset)?.into_iter().map(|t| vec![t]).collect()
        } else {
            self.last_allocation_chains(pset)?
        };

        let mut best: Option<CandidateSolution> = None;
        for chain in chains {
            if self.sigmoid.d2f(chain[0]) > self.curvature_level() + CURVATURE_TOLERANCE {
                continue;
            }
            let mut durations = vec![0.0; self.params.horizon];
            for (&stage, &t) in pset.stages.iter().zip(&chain) {
                durations[stage] = t;
            }
            self.verify_stationary(pset, &durations)?;
            if !self.is_local_max(pset, &durations) {
                continue;
            }
            let candidate = self.candidate(pset.clone(), durations);
            let better = match &best {
                None => true,
                Some(b) => (candidate.feasible, candidate.objective) > (b.feasible, b.objective),
            };
            if better {
                best = Some(candidate);
            }
        }
        Ok(best)
    }

    fn no_arrival_chain(&self, pset: &ProcessedSet) -> Result<Option<Vec<f64>>> {
        let Some(levels) = self.static_levels(pset) else {
            return Ok(None);
        };
        levels
            .into_iter()
            .map(|level| self.sigmoid.derivative_inverse(level, Branch::Upper))
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    /// Roots of `f'(t) = P(t)` for one processed stage: a scan where the
    /// gap may turn back, bisection past the inflection point where it is
    /// monotone.
    fn single_stage_roots(&self, pset: &ProcessedSet) -> Result<Vec<f64>> {
        let inflection = self.sigmoid.profile().inflection;
        let (delta1, delta2) = self.sigmoid.curvature_crossings(self.curvature_level())?;
        let mut scratch = Vec::new();
        let mut gap = |t: f64| self.penalty_with(pset, t, &mut scratch).shortfall(self.sigmoid.df(t));
        let mut roots = Vec::new();
        if delta1 > 0.0 {
            scan_roots(&mut gap, 0.0, delta1, &mut roots)?;
        }
        if delta2 < inflection {
            scan_roots(&mut gap, delta2, inflection, &mut roots)?;
        }
        let lo = inflection.max(delta2);
        let g_lo = gap(lo);
        if g_lo > 0.0 {
            let hi = expand_right(lo, inflection.max(1.0), |t| gap(t) < 0.0)?;
            roots.push(bisect(&mut gap, lo, hi, TIME_TOLERANCE)?);
        } else if g_lo == 0.0 {
            roots.push(lo);
        }
        roots.retain(|t| *t > 0.0);
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|a, b| (*a - *b).abs() <= TIME_TOLERANCE);
        Ok(roots)
    }

    /// Processed durations implied by the last one, `s`, with the first on
    /// `branch`; `None` when a level has no preimage.
    fn chain_from_last(&self, pset: &ProcessedSet, s: f64, branch: Branch, out: &mut Vec<f64>) -> Option<()> {
        out.clear();
        let c = self.params.penalty_rate;
        let profile = self.sigmoid.profile();
        let base = self.sigmoid.df(s);
        let span = pset.span();
        for (i, offset) in std::iter::once(0.0).chain(pset.offsets()).enumerate() {
            if i + 1 == pset.len() {
                out.push(s);
                break;
            }
            let level = (base + c * (span - offset)).min(profile.max_slope);
            let side = if i == 0 { branch } else { Branch::Upper };
            if side == Branch::Lower {
                // below f'(0) the first duration would be negative; pin it at zero
                if level <= profile.slope_at_zero {
                    out.push(0.0);
                    continue;
                }
            }
            out.push(self.sigmoid.derivative_inverse(level, side).ok()?);
        }
        Some(())
    }

    /// Stationarity gap of the last processed stage,
    /// `f'(t_m) - c (n1 - eta_m + 1) - c lambda sum t`, along the chain.
    fn last_stage_gap(&self, pset: &ProcessedSet, s: f64, branch: Branch, scratch: &mut Vec<f64>) -> f64 {
        let QueueParams { initial_queue: n1, arrival_rate: lambda, penalty_rate: c, .. } = self.params;
        if self.chain_from_last(pset, s, branch, scratch).is_none() {
            return f64::NAN;
        }
        let last = pset.stages[pset.len() - 1] as f64;
        let total: f64 = scratch.iter().sum();
        self.sigmoid.df(s) - c * (n1 - last) - c * lambda * total
    }

    /// Stationary chains for two or more processed stages, found by
    /// bisection in the last duration.
    fn last_allocation_chains(&self, pset: &ProcessedSet) -> Result<Vec<Vec<f64>>> {
        let profile = *self.sigmoid.profile();
        let span = self.params.penalty_rate * pset.span();
        if span >= profile.max_slope {
            return Ok(Vec::new());
        }
        let start = self.sigmoid.derivative_inverse(profile.max_slope - span, Branch::Upper)?;
        let width = profile.inflection.max(1.0);
        let mut scratch = Vec::with_capacity(pset.len());
        let mut found: Vec<(f64, Branch)> = Vec::new();

        // upper first stage: every duration grows with s, so the gap falls
        let mut upper = |s: f64| self.last_stage_gap(pset, s, Branch::Upper, &mut scratch);
        let g_start = upper(start);
        if g_start > 0.0 {
            let hi = expand_right(start, width, |s| upper(s) < 0.0)?;
            found.push((bisect(&mut upper, start, hi, TIME_TOLERANCE)?, Branch::Upper));
        } else if g_start == 0.0 {
            found.push((start, Branch::Upper));
        }

        // lower first stage: sample uniformly in t_1, bisect in s
        let mut lower = |s: f64| self.last_stage_gap(pset, s, Branch::Lower, &mut scratch);
        let floor = self.min_feasible_first_allocation(pset);
        let mut samples = Vec::with_capacity(SCAN_POINTS + 1);
        let mut open_tail = false;
        for i in 0..=SCAN_POINTS {
            let t1 = floor + (profile.inflection - floor) * i as f64 / SCAN_POINTS as f64;
            let level = self.sigmoid.df(t1) - span;
            if i == 0 && (floor > 0.0 || level <= 0.0) {
                // t_1 at its floor sends s to infinity
                open_tail = true;
                continue;
            }
            let s = if i == SCAN_POINTS {
                start
            } else {
                self.sigmoid.derivative_inverse(level.min(profile.max_slope), Branch::Upper)?
            };
            samples.push((s, lower(s)));
        }
        if let (true, Some(&(s, g))) = (open_tail, samples.first()) {
            if g > 0.0 {
                let hi = expand_right(s, width, |x| lower(x) < 0.0)?;
                found.push((bisect(&mut lower, s, hi, TIME_TOLERANCE)?, Branch::Lower));
            }
        }
        for (i, &(s, g)) in samples.iter().enumerate() {
            if g == 0.0 {
                found.push((s, Branch::Lower));
            } else if let Some(&(next_s, next_g)) = samples.get(i + 1) {
                if next_g != 0.0 && (g > 0.0) != (next_g > 0.0) {
                    found.push((bisect(&mut lower, next_s, s, TIME_TOLERANCE)?, Branch::Lower));
                }
            }
        }

        let mut chains = Vec::with_capacity(found.len());
        for (s, branch) in found {
            let mut chain = Vec::with_capacity(pset.len());
            if self.chain_from_last(pset, s, branch, &mut chain).is_some() && chain[0] > 0.0 {
                chains.push(chain);
            }
        }
        Ok(chains)
    }

    fn verify_stationary(&self, pset: &ProcessedSet, t: &[f64]) -> Result<()> {
        let QueueParams { initial_queue: n1, arrival_rate: lambda, penalty_rate: c, .. } = self.params;
        let total: f64 = t.iter().sum();
        for &stage in &pset.stages {
            let tk = t[stage];
            let residual = self.sigmoid.df(tk) - c * (n1 - stage as f64) - c * lambda * total;
            if residual.abs() >= STATIONARITY_TOLERANCE {
                return Err(Error::numeric(format!(
                    "stationarity residual {residual:e} at stage {} of pattern {pset}",
                    stage + 1
                )));
            }
            let curvature = self.sigmoid.d2f(tk);
            if curvature > c * lambda + CURVATURE_TOLERANCE {
                return Err(Error::numeric(format!(
                    "curvature {curvature:e} exceeds c*lambda at stage {} of pattern {pset}",
                    stage + 1
                )));
            }
        }
        Ok(())
    }

    /// Negative semidefiniteness of `diag(f''(t_k)) - c lambda 1 1^T` on the
    /// processed coordinates, tested by a Cholesky factorisation of its negation.
    fn is_local_max(&self, pset: &ProcessedSet, t: &[f64]) -> bool {
        let m = pset.len();
        let coupling = self.curvature_level();
        let mut a = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                a[i * m + j] = coupling;
            }
            a[i * m + i] -= self.sigmoid.d2f(t[pset.stages[i]]);
            a[i * m + i] += 1e-10;
        }
        for j in 0..m {
            let mut d = a[j * m + j];
            for k in 0..j {
                d -= a[j * m + k] * a[j * m + k];
            }
            if d < 0.0 {
                return false;
            }
            let d = d.sqrt();
            a[j * m + j] = d;
            for i in j + 1..m {
                let mut s = a[i * m + j];
                for k in 0..j {
                    s -= a[i * m + k] * a[j * m + k];
                }
                a[i * m + j] = if d > 0.0 { s / d } else { 0.0 };
            }
        }
        true
    }

    fn candidate(&self, processed: ProcessedSet, durations: Vec<f64>) -> CandidateSolution {
        let objective = self.objective_unchecked(&durations);
        let expected_queue = self.queue_unchecked(&durations);
        let feasible = expected_queue.iter().all(|n| *n > QUEUE_TOLERANCE);
        CandidateSolution {
            processed,
            allocation: AllocationVector::new(durations).expect("solver durations are non-negative"),
            objective,
            expected_queue,
            feasible,
        }
    }

    /// Enumerates every `{0,+}^N` string and returns the feasible candidate
    /// with the largest `J`.
    ///
    /// The all-zero allocation is always a candidate. Equal objectives go to
    /// the lexicographically smallest string (`0 < +`).
    pub fn solve_finite_horizon(&self) -> Result<HorizonSolution> {
        let horizon = self.params.horizon;
        if horizon > self.max_horizon {
            return Err(Error::Capacity { horizon, max: self.max_horizon, candidates: 2f64.powi(horizon as i32) });
        }
        let mut stats = CandidateStats { enumerated: 1, ..Default::default() };
        let mut best = self.candidate(ProcessedSet::from_mask(0, horizon), vec![0.0; horizon]);
        for mask in 1..(1u64 << horizon) {
            let pset = ProcessedSet::from_mask(mask, horizon);
            stats.enumerated += 1;
            if self.existence_check(&pset)? != Existence::None {
                stats.admitted += 1;
            }
            let Some(candidate) = self.solve_consistent_allocation(&pset)? else {
                continue;
            };
            stats.solved += 1;
            if !candidate.feasible {
                continue;
            }
            stats.feasible += 1;
            let order = candidate
                .objective
                .total_cmp(&best.objective)
                .then_with(|| compare_patterns(&best.processed, &candidate.processed));
            if order == Ordering::Greater {
                best = candidate;
            }
        }
        Ok(HorizonSolution { best, stats })
    }
}

/// Samples `gap` on `[lo, hi]` and bisects every sign change.
fn scan_roots<G>(gap: &mut G, lo: f64, hi: f64, roots: &mut Vec<f64>) -> Result<()>
where
    G: FnMut(f64) -> f64,
{
    let step = (hi - lo) / SCAN_POINTS as f64;
    let mut prev_t = lo;
    let mut prev = gap(lo);
    if prev == 0.0 {
        roots.push(lo);
    }
    for i in 1..=SCAN_POINTS {
        let t = if i == SCAN_POINTS { hi } else { lo + step * i as f64 };
        let g = gap(t);
        if g == 0.0 {
            roots.push(t);
        } else if prev != 0.0 && (g > 0.0) != (prev > 0.0) {
            roots.push(bisect(&mut *gap, prev_t, t, TIME_TOLERANCE)?);
        }
        prev_t = t;
        prev = g;
    }
    Ok(())
}
