mod common;

use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ratrecon::arith::Instance;
use ratrecon::harness::{
    attempt, lifting_loop, random_rational, run_experiment, write_csv, Algorithm, CallOutcome, ExperimentSpec,
    PairStream, Strategy,
};
use ratrecon::{BigInt, BigRational};

fn stream_for(seed: u64, num_bits: u32, den_bits: u32, bad_prob: f64) -> PairStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = random_rational(num_bits, den_bits, &mut rng);
    PairStream::new(target, 1013, bad_prob, rng)
}

/// Results of `algorithm` on every prefix of a stream, up to `len` pairs.
fn prefix_results(spec: &ExperimentSpec, stream: &mut PairStream, len: usize) -> Vec<Option<BigRational>> {
    let mut inst: Option<Instance<BigInt>> = None;
    (0..len)
        .map(|_| {
            let pair = stream.next_pair();
            let next = match inst.take() {
                None => Instance::new([pair]).unwrap(),
                Some(i) => i.extended(pair).unwrap(),
            };
            let got = attempt(spec, &next).unwrap();
            inst = Some(next);
            got
        })
        .collect()
}

#[test]
fn experiments_are_deterministic() {
    for alg in [Algorithm::Hrr, Algorithm::Etl, Algorithm::Ftrr] {
        let spec = ExperimentSpec::new(alg, 120, 60, 0.1).with_trials(6).with_seed(11);
        let a = run_experiment(&spec).unwrap();
        let b = run_experiment(&spec).unwrap();
        assert_eq!(a.outcomes(), b.outcomes());
        let (mut ca, mut cb) = (Vec::new(), Vec::new());
        write_csv(std::slice::from_ref(&a), &mut ca).unwrap();
        write_csv(std::slice::from_ref(&b), &mut cb).unwrap();
        let strip = |v: &[u8]| -> Vec<String> {
            String::from_utf8(v.to_vec())
                .unwrap()
                .lines()
                .map(|l| l.rsplit_once(',').unwrap().0.to_string())
                .collect()
        };
        assert_eq!(strip(&ca), strip(&cb));
    }
}

#[test]
fn hrr_success_is_monotone_without_corruption() {
    let spec = ExperimentSpec::new(Algorithm::Hrr, 200, 100, 0.0);
    for seed in 0..20 {
        let mut stream = stream_for(seed, 200, 100, 0.0);
        let target = stream.target().clone();
        let results = prefix_results(&spec, &mut stream, 80);
        let first = results.iter().position(|r| r.as_ref() == Some(&target)).expect("recovered");
        assert!(results[first..].iter().all(|r| r.as_ref() == Some(&target)), "seed {seed}");
    }
}

#[test]
fn hrr_is_eventually_correct_under_corruption() {
    let spec = ExperimentSpec::new(Algorithm::Hrr, 64, 64, 0.1);
    let mut settled = Vec::new();
    for seed in 0..200 {
        let mut stream = stream_for(1000 + seed, 64, 64, 0.1);
        let target = stream.target().clone();
        let results = prefix_results(&spec, &mut stream, 70);
        // after the last wrong or missing answer, every answer is correct
        let last_bad = results.iter().rposition(|r| r.as_ref() != Some(&target));
        let from = last_bad.map_or(0, |i| i + 1);
        assert!(from <= 50, "seed {seed}: still unsettled at {from} pairs");
        settled.push(from);
    }
    assert!(settled.iter().all(|&s| s >= 10));
}

#[test]
fn etl_never_needs_more_pairs_on_unbalanced_inputs() {
    let (mut dominated, mut total) = (0, 0);
    for (nb, db) in [(300, 0), (240, 60)] {
        let hrr = run_experiment(&ExperimentSpec::new(Algorithm::Hrr, nb, db, 0.0).with_trials(20).with_seed(5)).unwrap();
        let etl = run_experiment(&ExperimentSpec::new(Algorithm::Etl, nb, db, 0.0).with_trials(20).with_seed(5)).unwrap();
        for (h, e) in hrr.trials.iter().zip(&etl.trials) {
            assert_eq!(h.target, e.target);
            total += 1;
            if e.pairs_needed >= h.pairs_needed {
                dominated += 1;
            }
        }
    }
    assert!(dominated * 10 >= total * 9, "{dominated}/{total}");
}

#[test]
fn geometric_lifting_matches_every_pair() {
    let spec = ExperimentSpec::new(Algorithm::Hrr, 500, 500, 0.0);
    let noisy = ExperimentSpec::new(Algorithm::Hrr, 500, 500, 0.1);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let target = random_rational(500, 500, &mut rng);
        let every = lifting_loop(&target, Strategy::Every(1), &spec).unwrap();
        let geo = lifting_loop(&target, Strategy::Geometric(2.0), &spec).unwrap();
        assert_eq!(every.final_value, geo.final_value);
        assert_eq!(geo.final_value.as_ref(), Some(&target));
        let n = geo.pairs_used() as f64;
        assert!(geo.calls.len() as f64 <= n.log2().ceil() + 1.0);
        assert!(geo.pairs_used() <= 2 * every.pairs_used());
        assert!(geo.calls.last().unwrap().cumulative_cost < every.calls.last().unwrap().cumulative_cost);

        // with corruption, on the same stream
        let minimal = lifting_loop(&target, Strategy::Every(1), &noisy).unwrap();
        let slow = lifting_loop(&target, Strategy::Geometric(1.5), &noisy).unwrap();
        assert_eq!(slow.final_value.as_ref(), Some(&target));
        assert!(slow.pairs_used() as f64 <= 1.5 * minimal.pairs_used() as f64 + 1.0);
    }
}

#[test]
fn ftrr_lifting_stops_once_the_precondition_holds() {
    let mut spec = ExperimentSpec::new(Algorithm::Ftrr, 100, 50, 0.0);
    spec.ftrr_max_bad = Some(0);
    let (p, q) = spec.bounds();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..5 {
        let target = random_rational(100, 50, &mut rng);
        let trace = lifting_loop(&target, Strategy::Every(1), &spec).unwrap();
        let need: BigInt = &p * &q * 2;
        let mut m = BigInt::one();
        let minimal = ratrecon::primes::primes_from(1013)
            .position(|prime| {
                m *= prime;
                m > need
            })
            .unwrap()
            + 1;
        assert_eq!(trace.pairs_used(), minimal);
        assert!(trace.calls[..trace.calls.len() - 1].iter().all(|c| c.outcome == CallOutcome::NoValue));
    }
}

#[test]
fn invalid_strategies_are_rejected() {
    let spec = ExperimentSpec::new(Algorithm::Hrr, 10, 10, 0.0);
    let r = BigRational::from_integer(BigInt::from(3));
    assert!(lifting_loop(&r, Strategy::Every(0), &spec).is_err());
    assert!(lifting_loop(&r, Strategy::Geometric(1.0), &spec).is_err());
}

#[test]
fn hrr_recovers_exact_images() {
    use ratrecon::hrr::{hrr, HrrConfig};
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for _ in 0..10 {
        let target = random_rational(100, 100, &mut rng);
        let mut stream = PairStream::new(target.clone(), 1013, 0.0, ChaCha8Rng::seed_from_u64(0));
        let inst = Instance::new((0..30).map(|_| stream.next_pair())).unwrap();
        assert_eq!(hrr(&inst, &HrrConfig::default()).unwrap().value(), Some(target));
    }
}

#[test]
fn hrr_reports_zero_for_mostly_zero_residues() {
    use num_integer::Integer;
    use ratrecon::arith::ResiduePair;
    use ratrecon::hrr::{hrr, HrrConfig, HrrResult};
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let pairs: Vec<ResiduePair<BigInt>> = ratrecon::primes::primes_from(1013)
        .take(30)
        .enumerate()
        .map(|(i, p)| {
            let x = if i % 3 == 0 { rand::Rng::gen_range(&mut rng, 1..p) } else { 0 };
            ResiduePair::new(BigInt::from(x), BigInt::from(p)).unwrap()
        })
        .collect();
    let inst = Instance::new(pairs).unwrap();
    let g = inst.residue().gcd(inst.modulus());
    assert!(&g * &g > BigInt::from(1_000_000) * inst.modulus());
    assert_eq!(hrr(&inst, &HrrConfig::default()).unwrap(), HrrResult::Zero);
}
