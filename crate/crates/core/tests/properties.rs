use proptest::prelude::*;

use romanoff_lab::lacunary::{LacunaryParams, LacunarySet};
use romanoff_lab::primes::{
    count_primes_in, count_primes_in_ap, distinct_prime_factors, is_prime, logarithmic_integral,
    sieve_segment, small_primes,
};
use romanoff_lab::romanoff::{
    build_modulus, hunt_large_multiplicity, romanoff_rep, trivial_bound, HuntOutcome,
    RomanoffConvention,
};
use romanoff_lab::singular::{average_over_differences, singular_series, small_prime_divisor_sum};
use romanoff_lab::window::{rep_function, window_record};

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn squares_set(scale: u64) -> LacunarySet {
    LacunarySet::generate(LacunaryParams::new(vec![2.0, 2.0]).unwrap(), scale).unwrap()
}

/// `∏_{p > 2} p(p − 1)/((p − 2)(p + 1))`, bounding `(p−1)/(p−2) <= K_p (1 + 1/p)`.
fn divisor_constant() -> f64 {
    let head: f64 = small_primes(100_000)
        .into_iter()
        .filter(|&p| p > 2)
        .map(|p| {
            let p = p as f64;
            p * (p - 1.0) / ((p - 2.0) * (p + 1.0))
        })
        .product();
    // remaining factors are 1 + 2/(p² − p − 2) and sum to well under 1e-4
    head * (1.0 + 1e-4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn segment_flags_match_primality(lo in 0u64..10_000_000_000, len in 1u64..4000) {
        let seg = sieve_segment(lo, lo + len).unwrap();
        for m in lo..lo + len {
            prop_assert_eq!(seg.is_prime(m), is_prime(m), "m = {}", m);
        }
    }

    #[test]
    fn interval_counts_are_additive(a in 0u64..50_000_000, d1 in 0u64..300_000, d2 in 0u64..300_000) {
        let (b, c) = (a + d1, a + d1 + d2);
        prop_assert_eq!(
            count_primes_in(a, c).unwrap(),
            count_primes_in(a, b).unwrap() + count_primes_in(b, c).unwrap()
        );
    }

    #[test]
    fn progression_counts_sum_to_interval_count(lo in 0u64..1_000_000, len in 0u64..200_000, k in 1u64..60) {
        let hi = lo + len;
        let total: u64 = (0..k)
            .filter(|&l| gcd(l, k) == 1)
            .map(|l| count_primes_in_ap(lo, hi, k, l).unwrap())
            .sum();
        let dividing = distinct_prime_factors(k).into_iter().filter(|&p| p > lo && p <= hi).count() as u64;
        prop_assert_eq!(total, count_primes_in(lo, hi).unwrap() - dividing);
    }

    #[test]
    fn li_is_increasing(x in 2.0f64..1e15, step in 1e-3f64..1e6) {
        prop_assert!(logarithmic_integral(x + step).unwrap() > logarithmic_integral(x).unwrap());
    }

    #[test]
    fn generate_is_monotone_in_scale(x in 3u64..1_000_000_000, extra in 0u64..1_000_000_000, r2 in 1.1f64..=2.0) {
        let r = vec![2.0, r2];
        let params = LacunaryParams::new(r).unwrap();
        let small = LacunarySet::generate(params.clone(), x).unwrap();
        let large = LacunarySet::generate(params, x + extra).unwrap();
        for v in small.values() {
            prop_assert!(large.values().binary_search(v).is_ok(), "{} missing", v);
        }
        prop_assert_eq!(small.counting_function(2.0 * x as f64).unwrap(), small.len());
    }

    #[test]
    fn window_sums_are_additive(x in 1_000_000u64..2_000_000, h in 1u64..2000) {
        let set = squares_set(1_000_000);
        let whole = window_record(x, 2 * h, &set).unwrap();
        let left = window_record(x, h, &set).unwrap();
        let right = window_record(x + h, h, &set).unwrap();
        prop_assert_eq!(whole.r, left.r + right.r);
        prop_assert_eq!(whole.q, left.q + right.q);
        prop_assert_eq!(whole.s, left.s + right.s);
        prop_assert!(whole.is_consistent());
    }

    #[test]
    fn pointwise_rep_bounded_by_set_size(n in 1u64..4_000_000) {
        let set = squares_set(1_000_000);
        prop_assert!(rep_function(n, &set) <= set.len() as u64);
    }

    #[test]
    fn singular_series_symmetries(half in 1i64..1_000_000_000) {
        let delta = 2 * half;
        let s = singular_series(delta).unwrap().value;
        prop_assert_eq!(s, singular_series(-delta).unwrap().value);
        prop_assert_eq!(s, singular_series(2 * delta).unwrap().value);
    }

    #[test]
    fn singular_series_divisor_bound(delta in 1u64..10_000_000_000) {
        let c2 = romanoff_lab::singular::default_twin_prime_constant().value;
        let s = singular_series(delta as i64).unwrap().value;
        let divisor_sum = small_prime_divisor_sum(delta, f64::INFINITY).unwrap();
        prop_assert!(s <= 2.0 * c2 * divisor_constant() * divisor_sum);
    }

    #[test]
    fn difference_total_ignores_order(seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let set = squares_set(1 << 24);
        let mut shuffled = set.values().to_vec();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let again = LacunarySet::from_values(set.params().clone(), set.scale(), shuffled).unwrap();
        let a = average_over_differences(&set).unwrap();
        let b = average_over_differences(&again).unwrap();
        prop_assert!((a.total - b.total).abs() <= 1e-12 * a.total);
    }

    #[test]
    fn romanoff_rep_trivial_bound(n in 2u64..u64::MAX / 2) {
        let f = romanoff_rep(n, RomanoffConvention::POSITIVE);
        prop_assert!(f <= trivial_bound(n));
        prop_assert!(f <= u64::from(63 - n.leading_zeros()));
    }

    #[test]
    fn nonnegative_convention_dominates(n in 2u64..100_000_000) {
        prop_assert!(
            romanoff_rep(n, RomanoffConvention::NONNEGATIVE) >= romanoff_rep(n, RomanoffConvention::POSITIVE)
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn hunt_matches_reverse_scan(scale in 1_000_000u64..1_000_000_000, window in 15_015u64..200_000) {
        let d = build_modulus(13.0, &[]).unwrap();
        let conv = RomanoffConvention::POSITIVE;
        let HuntOutcome::Found(hunt) = hunt_large_multiplicity(scale, window, &d, conv).unwrap() else {
            return Err(TestCaseError::fail("window holds a multiple of d"));
        };
        let first = (scale / d.d + 1) * d.d;
        let multiples: Vec<u64> = (0..).map(|i| first + i * d.d).take_while(|&n| n <= scale + window).collect();
        let mut best = (0, u64::MAX);
        for &n in multiples.iter().rev() {
            let f = romanoff_rep(n, conv);
            if f > best.0 || (f == best.0 && n < best.1) {
                best = (f, n);
            }
        }
        prop_assert_eq!((hunt.multiplicity, hunt.n), best);
        prop_assert_eq!(hunt.multiples, multiples.len());
    }
}
