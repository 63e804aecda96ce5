mod common;

use common::*;
use num_traits::{One, Pow, Zero};
use pamlab::beta::{check_greedy_lazy_conjugacy, digit_stream, partial_value, BetaSystem, Variant};
use pamlab::cli::{parse_pam_file, print_pam};
use pamlab::exactnum::{
    affine_apply, enumerate_bounded_weight, int, m_weight_vector, padic_weight, rat, PrimeBasis, Rational,
};
use pamlab::pam::{conjugate, inverse_affine, iterate_orbit, normalize};
use pamlab::reach::{decide_reach_weight, ReachOutcome};
use pamlab::seqlab::{dynamic_hit_frequency, mahler_fraction, DynamicInterval, Generator, Schedule};
use pamlab::transfer::transfer_once;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (-5000i64..5000, 1i64..5000)
        .prop_filter("nonzero", |(n, _)| *n != 0)
        .prop_map(|(n, d)| rat(n, d))
}

fn small_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn weight_of_product_adds(x in nonzero_rational(), y in nonzero_rational(), p in small_prime()) {
        let lhs = padic_weight(&(&x * &y), p).unwrap();
        prop_assert_eq!(lhs, padic_weight(&x, p).unwrap() + padic_weight(&y, p).unwrap());
    }

    #[test]
    fn weight_of_power_scales(x in nonzero_rational(), r in 1u32..6, p in small_prime()) {
        let lhs = padic_weight(&Pow::pow(&x, r), p).unwrap();
        prop_assert_eq!(lhs, r as i64 * padic_weight(&x, p).unwrap());
    }

    #[test]
    fn weight_of_sum(x in nonzero_rational(), y in nonzero_rational(), p in small_prime()) {
        let (wx, wy) = (padic_weight(&x, p).unwrap(), padic_weight(&y, p).unwrap());
        let s = &x + &y;
        if !s.is_zero() {
            let ws = padic_weight(&s, p).unwrap();
            if wx == wy {
                prop_assert!(ws <= wx);
            } else {
                prop_assert_eq!(ws, wx.max(wy));
            }
        }
    }

    #[test]
    fn weights_reconstruct_smooth_rationals(e2 in -6i32..6, e3 in -6i32..6, e5 in -4i32..4) {
        let x = Pow::pow(rat(2, 1), e2) * Pow::pow(rat(3, 1), e3) * Pow::pow(rat(5, 1), e5);
        let basis = PrimeBasis::new([2, 3, 5]).unwrap();
        let wv = m_weight_vector(&x, &basis).unwrap();
        prop_assert!(!wv.residual);
        let back = basis
            .primes()
            .iter()
            .zip(&wv.per_prime)
            .fold(Rational::one(), |acc, (&p, &w)| acc * Pow::pow(Rational::from_integer(p.into()), -w as i32));
        prop_assert_eq!(back, x);
    }

    #[test]
    fn fast_affine_apply_is_exact(a in nonzero_rational(), b in nonzero_rational(), x in nonzero_rational()) {
        prop_assert_eq!(affine_apply(&a, &b, &x), &a * &x + &b);
        prop_assert_eq!(affine_apply(&Rational::zero(), &b, &x), b.clone());
    }

    #[test]
    fn conjugation_round_trips(seed in any::<u64>(), un in prop_oneof![-9i64..-1, 1i64..9], ud in 1i64..9, v in -20i64..20) {
        let map = random_map(&mut StdRng::seed_from_u64(seed));
        let (u, v) = (rat(un, ud), rat(v, 7));
        let g = conjugate(&map, &u, &v).unwrap();
        let (ui, vi) = inverse_affine(&u, &v);
        prop_assert_eq!(conjugate(&g, &ui, &vi).unwrap(), map.clone());
        if un > 0 {
            for j in 0..20 {
                let x = rat(j, 20);
                let fx = map.step(&x).unwrap().1;
                prop_assert_eq!(&u * fx + &v, g.step(&(&u * &x + &v)).unwrap().1);
            }
        }
        prop_assert_eq!(normalize(&map), map);
    }

    #[test]
    fn transfer_conserves_mass_and_sign(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let map = random_map(&mut rng);
        let phi = random_density(&mut rng);
        let out = transfer_once(&map, &phi).unwrap();
        prop_assert_eq!(out.mass(), phi.mass());
        prop_assert!(out.values().iter().all(|v| *v >= int(0)));
        prop_assert_eq!(out.merged().mass(), phi.mass());
    }

    #[test]
    fn map_documents_round_trip(seed in any::<u64>()) {
        let map = random_map(&mut StdRng::seed_from_u64(seed)).with_label(format!("seed {seed}"));
        prop_assert_eq!(parse_pam_file(&print_pam(&map)).unwrap(), map);
    }

    #[test]
    fn expansions_are_sound(bi in 0usize..4, j in 0i64..1000, greedy in any::<bool>()) {
        let beta = [rat(5, 2), rat(7, 3), rat(9, 4), rat(3, 2)][bi].clone();
        let system = BetaSystem::new(beta.clone()).unwrap();
        let x = system.vmax() * rat(j, 1000);
        let variant = if greedy { Variant::Greedy } else { Variant::Lazy };
        let seq = digit_stream(&system, variant, &x, 25).unwrap();
        prop_assert!(seq.replays(&beta));
        prop_assert!(seq.digits.iter().all(|&d| d < system.digit_count()));
        for n in 0..=25 {
            let pv = partial_value(&seq.digits, &beta, n).unwrap();
            let tail = &x - &pv.sum;
            prop_assert!(tail >= pv.remainder_bounds.0 && tail < pv.remainder_bounds.1);
        }
    }

    #[test]
    fn greedy_lazy_conjugacy(bi in 0usize..4, j in 0i64..997) {
        let beta = [rat(5, 2), rat(7, 3), rat(9, 4), rat(13, 3)][bi].clone();
        let system = BetaSystem::new(beta).unwrap();
        let x = system.vmax() * rat(j, 997);
        prop_assert!(check_greedy_lazy_conjugacy(&system, &[x]).unwrap());
    }

    #[test]
    fn dynamic_and_shifted_counts_agree(tn in 0i64..200, td in 1i64..200, l in 0i64..9, w in 1i64..4, s in 0usize..3, p in 2u64..4) {
        let theta = rat(tn, td);
        let r = (l + w).min(10);
        let schedule = [Schedule::Constant(2), Schedule::NMinusOne, Schedule::N][s].clone();
        let di = DynamicInterval::new(iv(rat(l, 10), rat(r, 10)), p, schedule).unwrap();
        let xs = Generator::FracMultiple(theta).take(60).unwrap();
        prop_assert!(dynamic_hit_frequency(&xs, &di, 60).unwrap().consistent());
    }

    #[test]
    fn mahler_congruence(n in 1u64..400) {
        let f = mahler_fraction(n, 1000).unwrap();
        let two_n = num_bigint::BigInt::one() << n;
        let lifted = &f * Rational::from_integer(two_n.clone());
        prop_assert!(lifted.is_integer());
        let three_n = Pow::pow(num_bigint::BigInt::from(3), n);
        prop_assert_eq!(lifted.to_integer(), three_n % two_n);
    }

    #[test]
    fn weight_verdicts_replay(xn in 0i64..36, yn in 0i64..36) {
        let map = three_halves();
        let (x, y) = (rat(xn, 36), rat(yn, 36));
        let v = decide_reach_weight(&map, &x, &y, 5000).unwrap();
        prop_assert!(v.certificate.replays_on(&map));
        match v.outcome {
            ReachOutcome::Reached { step } => prop_assert_eq!(&v.certificate.points[step], &y),
            ReachOutcome::UnreachableCycle => prop_assert!(!v.certificate.points.contains(&y)),
            ReachOutcome::UnreachableWeight => {
                let sim = iterate_orbit(&map, &x, 2000, Some(&y)).unwrap();
                prop_assert!(!sim.points.contains(&y));
            }
            ReachOutcome::Unknown(_) => {}
        }
    }
}

#[test]
fn bounded_weight_sets_are_symmetric() {
    for basis in [vec![2], vec![2, 3], vec![2, 3, 5]] {
        let basis = PrimeBasis::new(basis).unwrap();
        for a in 1..=3 {
            let set = enumerate_bounded_weight(a, &basis, 1_000_000).unwrap();
            assert!(set.iter().all(|x| set.contains(&(int(1) - x))));
        }
    }
}
