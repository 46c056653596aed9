use rand::Rng;

use romanoff_lab::lacunary::{LacunaryParams, LacunarySet};
use romanoff_lab::primes::{count_primes_in, euler_phi, primes_in};
use romanoff_lab::romanoff::{enumerate_representable_odds, romanoff_rep, RomanoffConvention};
use romanoff_lab::sampling::stream_rng;
use romanoff_lab::singular::{pair_count_vs_prediction, singular_series};
use romanoff_lab::window::{scan, ScanConfig};

fn trial_division(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

#[test]
fn scan_matches_naive_double_loop_for_small_sets() {
    let params = LacunaryParams::new(vec![2.0, 2.0]).unwrap();
    let mut rng = stream_rng(3, "oracle-sets");
    for trial in 0..20 {
        let size = rng.gen_range(1..=5);
        let mut values: Vec<u64> = (0..size).map(|_| rng.gen_range(1..=2000)).collect();
        values.sort_unstable();
        values.dedup();
        let scale = rng.gen_range(100..=10_000);
        let set = LacunarySet::from_values(params.clone(), scale, values.clone()).unwrap();
        let config = ScanConfig::new(scale, 0.5, 25, trial).unwrap();
        for rec in scan(&config, &set).records {
            let (mut r, mut q, mut s) = (0, 0, 0);
            for n in rec.x + 1..=rec.x + rec.h {
                let f = values
                    .iter()
                    .filter(|&&a| a < n && trial_division(n - a))
                    .count() as u64;
                r += f;
                q += f * f;
                s += u64::from(f > 0);
            }
            assert_eq!(
                (rec.r, rec.q, rec.s),
                (r, q, s),
                "values {values:?}, x = {}",
                rec.x
            );
        }
    }
}

#[test]
fn interval_primes_match_trial_division() {
    let mut rng = stream_rng(5, "oracle-intervals");
    for _ in 0..50 {
        let lo = rng.gen_range(0..100_000_000u64);
        let hi = lo + rng.gen_range(0..3000);
        let naive: Vec<u64> = (lo + 1..=hi).filter(|&m| trial_division(m)).collect();
        assert_eq!(primes_in(lo, hi).unwrap(), naive);
        assert_eq!(count_primes_in(lo, hi).unwrap(), naive.len() as u64);
    }
}

#[test]
fn totient_matches_gcd_count() {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    for n in 1..3000u64 {
        assert_eq!(
            euler_phi(n),
            (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64,
            "n = {n}"
        );
    }
}

#[test]
fn representable_odds_two_sided() {
    let limit = 1_000_000;
    let conv = RomanoffConvention::POSITIVE;
    let seq = enumerate_representable_odds(limit, conv).unwrap();
    for &n in &seq.values {
        assert!(
            romanoff_rep(n, conv) >= 1,
            "{n} listed but has no representation"
        );
    }
    let mut rng = stream_rng(9, "non-members");
    let mut checked = 0;
    while checked < 200 {
        let n = seq.non_representable[rng.gen_range(0..seq.non_representable.len())];
        let naive = (1..20)
            .map(|k| 1u64 << k)
            .take_while(|&p| p < n)
            .any(|p| trial_division(n - p));
        assert!(!naive, "{n} reported non-representable");
        assert_eq!(romanoff_rep(n, conv), 0);
        checked += 1;
    }
    assert_eq!(
        seq.values.len() + seq.non_representable.len(),
        ((limit - 1) / 2) as usize,
        "every odd 3 <= n <= limit is classified"
    );
}

#[test]
fn singular_series_matches_direct_product() {
    let c2 = romanoff_lab::singular::default_twin_prime_constant().value;
    for delta in 1..2000i64 {
        let mut m = delta;
        let mut weight = 1.0;
        let mut p = 2;
        while m > 1 {
            if m % p == 0 {
                if p > 2 {
                    weight *= (p - 1) as f64 / (p - 2) as f64;
                }
                while m % p == 0 {
                    m /= p;
                }
            }
            p += 1;
        }
        let expected = if delta % 2 == 1 {
            0.0
        } else {
            2.0 * c2 * weight
        };
        let got = singular_series(delta).unwrap().value;
        assert!(
            (got - expected).abs() <= 1e-12 * expected.max(1.0),
            "delta = {delta}"
        );
    }
}

/// Largest observed ratio over these samples was 0.588.
const PAIR_RATIO_BOUND: f64 = 1.0;

#[test]
fn pair_count_ratio_is_bounded() {
    let mut rng = stream_rng(11, "pairs");
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let y = rng.gen_range(0..10_000_000_000u64);
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        let delta = 2 * rng.gen_range(1..=500i64) * sign;
        worst = worst.max(pair_count_vs_prediction(y, 100_000, delta).unwrap().ratio);
    }
    assert!(worst <= PAIR_RATIO_BOUND, "max ratio {worst}");
}

#[test]
fn pair_count_matches_naive_count() {
    let mut rng = stream_rng(13, "pairs-naive");
    for _ in 0..30 {
        let y = rng.gen_range(0..1_000_000u64);
        let h = rng.gen_range(2..2000u64);
        let delta = rng.gen_range(-200..=200i64);
        if delta == 0 {
            continue;
        }
        let naive = (y + 1..=y + h)
            .filter(|&m| {
                trial_division(m) && m.checked_add_signed(delta).is_some_and(trial_division)
            })
            .count() as u64;
        assert_eq!(pair_count_vs_prediction(y, h, delta).unwrap().count, naive);
    }
}
