//! Fault-injection experiments: draw a random rational, feed its images
//! modulo successive primes (some corrupted), and count how many pairs each
//! algorithm needs before it settles on the right answer.

use std::fmt::{self, Write as _};
use std::io;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::{BigInt, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arith::{Bounds, Instance, ResiduePair};
use crate::error::{Error, Result};
use crate::etl::{etl, EtlConfig};
use crate::ftrr::{ftrr, ftrr_precondition};
use crate::hrr::{self, HrrConfig};
use crate::int;
use crate::primes::primes_from;
use crate::BigRational;

pub const DEFAULT_START_PRIME: u64 = 1013;
pub const DEFAULT_CONFIRMATIONS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Hrr,
    Etl,
    Ftrr,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Hrr => "HRR",
            Algorithm::Etl => "ETL",
            Algorithm::Ftrr => "FTRR",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hrr" => Ok(Algorithm::Hrr),
            "etl" => Ok(Algorithm::Etl),
            "ftrr" => Ok(Algorithm::Ftrr),
            other => Err(Error::InvalidArgument(format!("unknown algorithm '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub num_bits: u32,
    pub den_bits: u32,
    /// Probability that a residue is replaced by a different random value.
    pub bad_prob: f64,
    pub start_prime: u64,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub rng_seed: u64,
    pub hrr: HrrConfig,
    pub etl: EtlConfig,
    /// Fixed cap `e` for FTRR. `None` uses, at each pair count, the largest
    /// `e` for which the precondition holds.
    pub ftrr_max_bad: Option<usize>,
    /// Further correct checks required after the first correct one.
    pub confirmations: usize,
    /// Give up after this many pairs; defaults to ten times a size estimate.
    pub max_pairs: Option<usize>,
}

impl ExperimentSpec {
    pub fn new(algorithm: Algorithm, num_bits: u32, den_bits: u32, bad_prob: f64) -> Self {
        Self {
            num_bits,
            den_bits,
            bad_prob,
            start_prime: DEFAULT_START_PRIME,
            algorithm,
            trials: 25,
            rng_seed: 0,
            hrr: HrrConfig::default(),
            etl: EtlConfig::default(),
            ftrr_max_bad: None,
            confirmations: DEFAULT_CONFIRMATIONS,
            max_pairs: None,
        }
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_bits + self.den_bits == 0 {
            return Err(Error::InvalidArgument("num_bits + den_bits must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.bad_prob) {
            return Err(Error::InvalidArgument(format!("bad probability {} is outside [0, 1)", self.bad_prob)));
        }
        if self.start_prime < 2 {
            return Err(Error::InvalidArgument("start prime must be at least 2".into()));
        }
        Ok(())
    }

    /// Pair budget per trial.
    pub fn pair_cap(&self) -> usize {
        self.max_pairs.unwrap_or_else(|| {
            let bits_per_pair = (self.start_prime as f64).log2().max(1.0);
            let needed = 2.0 * f64::from(self.num_bits + self.den_bits + 20) / bits_per_pair;
            10 * needed.ceil() as usize
        })
    }

    /// Numerator and denominator bounds `(P, Q)` implied by the bit sizes.
    pub fn bounds(&self) -> (BigInt, BigInt) {
        let bound = |bits: u32| (BigInt::one() << bits) - 1;
        let p = if self.num_bits == 0 { BigInt::from(SMALL_NUMERATOR) } else { bound(self.num_bits) };
        let q = if self.den_bits == 0 { BigInt::one() } else { bound(self.den_bits) };
        (p, q)
    }
}

/// Numerator range `[1, SMALL_NUMERATOR]` used when `num_bits` is 0.
pub const SMALL_NUMERATOR: u64 = 100;

/// A random `N/D` with `N` of `num_bits` bits (random sign) and `D` of
/// `den_bits` bits, normalized. `den_bits = 0` gives `D = 1`; `num_bits = 0`
/// gives a nonzero `|N| <= SMALL_NUMERATOR`.
pub fn random_rational<R: Rng + ?Sized>(num_bits: u32, den_bits: u32, rng: &mut R) -> BigRational {
    let draw = |bits: u32, rng: &mut R| {
        let lo = BigInt::one() << (bits - 1);
        let hi = BigInt::one() << bits;
        rng.gen_bigint_range(&lo, &hi)
    };
    let mut n = if num_bits == 0 { BigInt::from(rng.gen_range(1..=SMALL_NUMERATOR)) } else { draw(num_bits, rng) };
    if rng.gen_bool(0.5) {
        n = -n;
    }
    let d = if den_bits == 0 { BigInt::one() } else { draw(den_bits, rng) };
    BigRational::new(n, d)
}

/// Images of a hidden rational modulo successive primes, each corrupted
/// independently with a fixed probability.
pub struct PairStream {
    target: BigRational,
    primes: Box<dyn Iterator<Item = u64> + Send>,
    bad_prob: f64,
    rng: ChaCha8Rng,
    corrupted: usize,
}

impl PairStream {
    pub fn new(target: BigRational, start_prime: u64, bad_prob: f64, rng: ChaCha8Rng) -> Self {
        Self { target, primes: Box::new(primes_from(start_prime)), bad_prob, rng, corrupted: 0 }
    }

    pub fn target(&self) -> &BigRational {
        &self.target
    }

    /// Number of bad pairs produced so far.
    pub fn corrupted(&self) -> usize {
        self.corrupted
    }

    pub fn next_pair(&mut self) -> ResiduePair<BigInt> {
        let p = self.primes.next().expect("primes are unbounded");
        let m = BigInt::from(p);
        let image = int::inv_mod(self.target.denom(), &m).map(|inv| (self.target.numer() * inv).mod_floor(&m));
        let corrupt = self.rng.gen_bool(self.bad_prob);
        let residue = match image {
            Some(x) if !corrupt => x,
            Some(x) => {
                self.corrupted += 1;
                loop {
                    let y = BigInt::from(self.rng.gen_range(0..p));
                    if y != x {
                        break y;
                    }
                }
            }
            // the denominator vanishes modulo p: no correct image exists
            None => {
                self.corrupted += 1;
                BigInt::from(self.rng.gen_range(0..p))
            }
        };
        ResiduePair::new(residue, m).expect("a prime modulus is at least 2")
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Runs one reconstruction on the current instance. `None` means the
/// algorithm gave no answer.
pub fn attempt(spec: &ExperimentSpec, inst: &Instance<BigInt>) -> Result<Option<BigRational>> {
    match spec.algorithm {
        Algorithm::Hrr => Ok(hrr::hrr(inst, &spec.hrr)?.value()),
        Algorithm::Etl => Ok(etl(inst, &spec.etl)?.value()),
        Algorithm::Ftrr => {
            let (p, q) = spec.bounds();
            let max_bad = match spec.ftrr_max_bad {
                Some(e) => {
                    if e >= inst.len() || !ftrr_precondition(inst, &Bounds::new(p.clone(), q.clone(), e)?)? {
                        return Ok(None);
                    }
                    e
                }
                None => match largest_admissible_max_bad(inst, &p, &q)? {
                    Some(e) => e,
                    None => return Ok(None),
                },
            };
            Ok(ftrr(inst, &Bounds::new(p, q, max_bad)?)?.value())
        }
    }
}

/// The largest `e < s` with `M > 2 P Q M_max(e)^2`, if any.
pub fn largest_admissible_max_bad(inst: &Instance<BigInt>, p: &BigInt, q: &BigInt) -> Result<Option<usize>> {
    let base: BigInt = p * q * 2;
    let mut m_max = BigInt::one();
    let mut best = None;
    for (e, pair) in std::iter::once(None).chain(inst.pairs().iter().rev().map(Some)).enumerate() {
        if let Some(pair) = pair {
            m_max *= pair.modulus();
        }
        if e >= inst.len() || *inst.modulus() <= &base * &m_max * &m_max {
            break;
        }
        best = Some(e);
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial: usize,
    pub target: BigRational,
    /// First pair count from which every check returned the target.
    pub pairs_needed: usize,
    /// Wrong values returned before the answer was confirmed.
    pub false_positives: usize,
    /// Corrupted pairs among the first `pairs_needed`.
    pub bad_pairs: usize,
    /// Wall time of the reconstruction call at `pairs_needed`.
    pub seconds: f64,
    /// HRR values returned although the expansion of `X/M` fails the
    /// configured convincingness test. Always 0 for other algorithms.
    pub unconvincing_values: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub spec: ExperimentSpec,
    pub trials: Vec<TrialOutcome>,
    pub wall_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairStats {
    pub mean: f64,
    pub min: usize,
    pub max: usize,
}

impl ExperimentReport {
    pub fn pairs_needed(&self) -> PairStats {
        let v: Vec<usize> = self.trials.iter().map(|t| t.pairs_needed).collect();
        PairStats {
            mean: v.iter().sum::<usize>() as f64 / v.len().max(1) as f64,
            min: v.iter().copied().min().unwrap_or(0),
            max: v.iter().copied().max().unwrap_or(0),
        }
    }

    pub fn false_positives(&self) -> usize {
        self.trials.iter().map(|t| t.false_positives).sum()
    }

    pub fn unconvincing_values(&self) -> usize {
        self.trials.iter().map(|t| t.unconvincing_values).sum()
    }

    /// Everything except timings, for reproducibility checks.
    pub fn outcomes(&self) -> Vec<(usize, usize, usize)> {
        self.trials.iter().map(|t| (t.trial, t.pairs_needed, t.false_positives)).collect()
    }
}

/// Re-derives the convincingness of `X/M` independently of the HRR call.
/// Zero answers (from the gcd test) are exempt.
fn hrr_convincing(spec: &ExperimentSpec, inst: &Instance<BigInt>) -> Result<bool> {
    let (x, m) = (inst.residue(), inst.modulus());
    let g = x.gcd(m);
    if x.is_zero() || &g * &g > BigInt::from(spec.hrr.a_crit) * m {
        return Ok(true);
    }
    let mut tail = crate::contfrac::partial_quotients(x, m)?.split_off(1);
    tail.sort_unstable_by(|a, b| b.cmp(a));
    let a_max = tail.first().cloned().unwrap_or_default();
    Ok(match spec.hrr.criterion {
        hrr::Criterion::AbsoluteThreshold => a_max >= BigInt::from(spec.hrr.a_crit),
        hrr::Criterion::RatioThreshold(t) => {
            let a_next = tail.get(1).cloned().unwrap_or_else(BigInt::one);
            a_max >= a_next * t
        }
    })
}

fn run_trial(spec: &ExperimentSpec, trial: usize) -> Result<TrialOutcome> {
    let mut rng = trial_rng(spec.rng_seed, trial);
    let target = random_rational(spec.num_bits, spec.den_bits, &mut rng);
    let mut stream = PairStream::new(target.clone(), spec.start_prime, spec.bad_prob, rng);
    let cap = spec.pair_cap();

    let mut inst: Option<Instance<BigInt>> = None;
    let mut candidate: Option<(usize, usize, f64)> = None;
    let mut streak = 0;
    let mut false_positives = 0;
    let mut unconvincing_values = 0;
    for n in 1..=cap {
        let pair = stream.next_pair();
        let next = match inst.take() {
            None => Instance::new([pair])?,
            Some(i) => i.extended(pair)?,
        };
        let started = Instant::now();
        let got = attempt(spec, &next)?;
        let seconds = started.elapsed().as_secs_f64();
        if got.is_some() && spec.algorithm == Algorithm::Hrr && !hrr_convincing(spec, &next)? {
            unconvincing_values += 1;
        }
        match got {
            Some(v) if v == target => {
                candidate.get_or_insert((n, stream.corrupted(), seconds));
                streak += 1;
                if streak > spec.confirmations {
                    let (pairs_needed, bad_pairs, seconds) = candidate.unwrap();
                    return Ok(TrialOutcome {
                        trial,
                        target,
                        pairs_needed,
                        false_positives,
                        bad_pairs,
                        seconds,
                        unconvincing_values,
                    });
                }
            }
            other => {
                if other.is_some() {
                    false_positives += 1;
                }
                candidate = None;
                streak = 0;
            }
        }
        inst = Some(next);
    }
    Err(Error::PrimeStreamExhausted(cap))
}

/// Runs every trial of `spec`. Trials run in parallel; each owns an RNG
/// stream derived from the seed and its index, so results do not depend on
/// scheduling.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let started = Instant::now();
    let trials = (0..spec.trials)
        .into_par_iter()
        .map(|t| run_trial(spec, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport { spec: spec.clone(), trials, wall_time: started.elapsed().as_secs_f64() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strategy {
    /// Call the reconstructor whenever the pair count is a multiple of `k`.
    Every(usize),
    /// Call at pair counts following a geometric progression with this
    /// ratio.
    Geometric(f64),
}

impl Strategy {
    fn validate(&self) -> Result<()> {
        match *self {
            Strategy::Every(0) => Err(Error::InvalidArgument("Every(k) needs k >= 1".into())),
            Strategy::Geometric(r) if r <= 1.0 || !r.is_finite() => {
                Err(Error::InvalidArgument("geometric ratio must exceed 1".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CallOutcome {
    Correct,
    Wrong,
    NoValue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceCall {
    pub pairs: usize,
    pub outcome: CallOutcome,
    /// Bit length of `M` at this call.
    pub modulus_bits: u64,
    /// Sum of `modulus_bits` over this and all earlier calls.
    pub cumulative_cost: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftingTrace {
    pub calls: Vec<TraceCall>,
    pub final_value: Option<BigRational>,
}

impl LiftingTrace {
    pub fn pairs_used(&self) -> usize {
        self.calls.last().map_or(0, |c| c.pairs)
    }

    pub fn false_positives(&self) -> usize {
        self.calls.iter().filter(|c| c.outcome == CallOutcome::Wrong).count()
    }
}

/// Adds pairs one at a time, calling the reconstructor when `strategy`
/// says so, until a call returns `target`. Corruption and the algorithm
/// come from `spec`, as do the FTRR bounds and the pair budget.
pub fn lifting_loop(target: &BigRational, strategy: Strategy, spec: &ExperimentSpec) -> Result<LiftingTrace> {
    strategy.validate()?;
    let mut stream = PairStream::new(target.clone(), spec.start_prime, spec.bad_prob, trial_rng(spec.rng_seed, 0));
    let cap = spec.pair_cap();
    let mut inst: Option<Instance<BigInt>> = None;
    let mut calls = Vec::new();
    let mut cost = 0u64;
    let mut next_call = 1usize;
    for n in 1..=cap {
        let pair = stream.next_pair();
        let current = match inst.take() {
            None => Instance::new([pair])?,
            Some(i) => i.extended(pair)?,
        };
        let due = match strategy {
            Strategy::Every(k) => n % k == 0,
            Strategy::Geometric(_) => n == next_call,
        };
        if due {
            if let Strategy::Geometric(r) = strategy {
                next_call = (n + 1).max((n as f64 * r).ceil() as usize);
            }
            let got = attempt(spec, &current)?;
            let modulus_bits = current.modulus().bits();
            cost += modulus_bits;
            let outcome = match &got {
                Some(v) if v == target => CallOutcome::Correct,
                Some(_) => CallOutcome::Wrong,
                None => CallOutcome::NoValue,
            };
            calls.push(TraceCall { pairs: n, outcome, modulus_bits, cumulative_cost: cost });
            if outcome == CallOutcome::Correct {
                return Ok(LiftingTrace { calls, final_value: got });
            }
        }
        inst = Some(current);
    }
    Err(Error::PrimeStreamExhausted(cap))
}

/// CSV rows, one per trial.
pub fn write_csv<W: io::Write>(reports: &[ExperimentReport], out: W) -> Result<()> {
    let io_err = |e: csv::Error| Error::InvalidArgument(format!("CSV output failed: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["algorithm", "num_bits", "den_bits", "bad_prob", "trial", "pairs_needed", "false_positives", "seconds"])
        .map_err(io_err)?;
    for r in reports {
        for t in &r.trials {
            w.write_record([
                r.spec.algorithm.to_string(),
                r.spec.num_bits.to_string(),
                r.spec.den_bits.to_string(),
                r.spec.bad_prob.to_string(),
                t.trial.to_string(),
                t.pairs_needed.to_string(),
                t.false_positives.to_string(),
                // one decimal: the resolution of the per-call time budget
                format!("{:.1}", t.seconds),
            ])
            .map_err(io_err)?;
        }
    }
    w.flush().map_err(|e| Error::InvalidArgument(format!("CSV output failed: {e}")))?;
    Ok(())
}

/// Mean pairs needed laid out with one row per algorithm and corruption
/// rate and one column per bit split.
pub fn format_table(reports: &[ExperimentReport]) -> String {
    let mut splits: Vec<(u32, u32)> = Vec::new();
    let mut rows: Vec<(u64, Algorithm)> = Vec::new();
    for r in reports {
        let split = (r.spec.num_bits, r.spec.den_bits);
        if !splits.contains(&split) {
            splits.push(split);
        }
        let row = (r.spec.bad_prob.to_bits(), r.spec.algorithm);
        if !rows.contains(&row) {
            rows.push(row);
        }
    }
    rows.sort_by(|a, b| f64::from_bits(a.0).total_cmp(&f64::from_bits(b.0)).then(a.1.cmp(&b.1)));

    let labels: Vec<String> = rows
        .iter()
        .map(|(p, a)| format!("{a} {}% bad", f64::from_bits(*p) * 100.0))
        .collect();
    let width = labels.iter().map(String::len).max().unwrap_or(0).max(6);
    let mut s = String::new();
    let _ = write!(s, "{:width$}", "");
    for (n, d) in &splits {
        let _ = write!(s, " | {:>14}", format!("{n}/{d} bits"));
    }
    s.push('\n');
    for (label, (p, a)) in labels.iter().zip(&rows) {
        let _ = write!(s, "{label:width$}");
        for split in &splits {
            let cell = reports.iter().find(|r| {
                r.spec.algorithm == *a && r.spec.bad_prob.to_bits() == *p && (r.spec.num_bits, r.spec.den_bits) == *split
            });
            match cell {
                Some(r) => {
                    let st = r.pairs_needed();
                    let _ = write!(s, " | {:>14}", format!("{:.1} [{}-{}]", st.mean, st.min, st.max));
                }
                None => {
                    let _ = write!(s, " | {:>14}", "-");
                }
            }
        }
        s.push('\n');
    }
    s
}
