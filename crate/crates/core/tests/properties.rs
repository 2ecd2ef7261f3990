use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nonlocal::classify::{
    gamma_star, locc_category, min_copies_adaptive_locc, min_copies_adaptive_sep, region,
    LoccCategory, Region,
};
use nonlocal::entanglement::concurrence;
use nonlocal::linalg::{hermitian_eigenvalues, partial_transpose};
use nonlocal::protocols::{
    basis_pair_protocol, bell_grouping_protocol, conclusion_distribution, elimination_tournament,
    exact_success_probability,
};
use nonlocal::secretshare::strong_pair_shares;
use nonlocal::states::{a_basis, random, theta_basis, FamilyParams, OrthonormalBasis};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn angle() -> impl Strategy<Value = f64> {
    0.0..=FRAC_PI_2
}

fn inner_angle() -> impl Strategy<Value = f64> {
    0.02..(FRAC_PI_2 - 0.02)
}

/// Random bases plus family members, which sit on the interesting strata.
fn any_basis() -> impl Strategy<Value = OrthonormalBasis> {
    prop_oneof![
        any::<u64>().prop_map(|s| random::basis(&mut rng(s))),
        (angle(), angle(), angle())
            .prop_map(|(a, b, g)| a_basis(&FamilyParams::new(a, b, g).unwrap())),
        angle().prop_map(|t| theta_basis(t).unwrap()),
    ]
}

fn permutation() -> impl Strategy<Value = [usize; 4]> {
    Just(vec![0usize, 1, 2, 3])
        .prop_shuffle()
        .prop_map(|v| [v[0], v[1], v[2], v[3]])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn copy_counts_survive_relabelling(b in any_basis(), perm in permutation()) {
        let p = b.permuted(perm);
        prop_assert_eq!(min_copies_adaptive_locc(&b).unwrap(), min_copies_adaptive_locc(&p).unwrap());
        prop_assert_eq!(min_copies_adaptive_sep(&b).unwrap(), min_copies_adaptive_sep(&p).unwrap());
    }

    #[test]
    fn copy_counts_survive_local_unitaries(b in any_basis(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let u = random::unitary2(&mut r);
        let v = random::unitary2(&mut r);
        let moved = b.apply_local(&u, &v);
        prop_assert_eq!(min_copies_adaptive_locc(&b).unwrap(), min_copies_adaptive_locc(&moved).unwrap());
        prop_assert_eq!(min_copies_adaptive_sep(&b).unwrap(), min_copies_adaptive_sep(&moved).unwrap());
        for (x, y) in b.states().iter().zip(moved.states()) {
            prop_assert!((concurrence(x) - concurrence(y)).abs() < 1e-10);
        }
    }

    #[test]
    fn sep_never_needs_more_copies_than_locc(b in any_basis()) {
        let locc = min_copies_adaptive_locc(&b).unwrap();
        let sep = min_copies_adaptive_sep(&b).unwrap();
        prop_assert!(sep <= locc);
        prop_assert!((1..=3).contains(&sep) && (1..=3).contains(&locc));
    }

    #[test]
    fn one_copy_exactly_for_product_bases(b in any_basis()) {
        let all_product = b.states().iter().all(|k| concurrence(k) < 1e-9);
        prop_assert_eq!(all_product, locc_category(&b).unwrap() == LoccCategory::OneCopy);
    }

    #[test]
    fn pt_spectrum_has_unit_trace_and_involution(seed in any::<u64>()) {
        let b = random::basis(&mut rng(seed));
        let p = b.state(0).projector() + b.state(2).projector();
        let pt = partial_transpose(&p);
        prop_assert!(partial_transpose(&pt).max_abs_diff(&p) < 1e-15);
        let ev = hermitian_eigenvalues(&pt).unwrap();
        prop_assert!((ev.iter().sum::<f64>() - 2.0).abs() < 1e-10);
        prop_assert!(ev[0] >= -0.5 - 1e-10);
    }

    #[test]
    fn pair_protocol_is_sound(seed in any::<u64>(), i in 0usize..4, shift in 1usize..4) {
        let b = random::basis(&mut rng(seed));
        let j = (i + shift) % 4;
        let t = basis_pair_protocol(&b, i, j).unwrap();
        let d = conclusion_distribution(&t, std::slice::from_ref(b.state(i))).unwrap();
        prop_assert!((d[i] - 1.0).abs() < 1e-9);
        let d = conclusion_distribution(&t, std::slice::from_ref(b.state(j))).unwrap();
        prop_assert!((d[j] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tournament_conserves_probability_on_any_input(b in any_basis(), seed in any::<u64>()) {
        let t = elimination_tournament(&b, 3).unwrap();
        let input = random::ket(&mut rng(seed));
        let d = conclusion_distribution(&t, &[input]).unwrap();
        prop_assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!(d.iter().all(|&p| (-1e-15..=1.0 + 1e-12).contains(&p)));
        prop_assert!((exact_success_probability(&t, &b).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bell_grouping_is_exact_on_its_family(theta in angle()) {
        let t = bell_grouping_protocol(theta).unwrap();
        let p = exact_success_probability(&t, &theta_basis(theta).unwrap()).unwrap();
        prop_assert!((p - 1.0).abs() < 1e-9);
        prop_assert!(min_copies_adaptive_locc(&theta_basis(theta).unwrap()).unwrap() <= 2);
    }

    #[test]
    fn gamma_star_makes_a4_product(alpha in inner_angle(), beta in inner_angle()) {
        let g = gamma_star(alpha, beta).unwrap();
        let p = FamilyParams::new(alpha, beta, g).unwrap();
        prop_assert!(concurrence(a_basis(&p).state(3)) < 1e-9);
        let on_boundary = matches!(region(&p).unwrap(), Region::Boundary { .. });
        prop_assert!(on_boundary);
    }

    #[test]
    fn swapping_alpha_and_beta_exchanges_regions_one_and_two(alpha in inner_angle(), beta in inner_angle(), gamma in inner_angle()) {
        let p = FamilyParams::new(alpha, beta, gamma).unwrap();
        let swapped = FamilyParams::new(beta, alpha, gamma).unwrap();
        let (r, s) = (region(&p).unwrap(), region(&swapped).unwrap());
        let expected = match r {
            Region::RI => Region::RII,
            Region::RII => Region::RI,
            other => other,
        };
        if !matches!(r, Region::Boundary { .. }) {
            prop_assert_eq!(s, expected);
        }
    }

    #[test]
    fn mixed_share_spectrum_is_lambda_split(seed in any::<u64>(), lambda in 0.01f64..0.99, mu in 0.01f64..0.99) {
        let b = random::basis(&mut rng(seed));
        let m = strong_pair_shares(&b, 0, 3, lambda, mu).unwrap();
        let ev = hermitian_eigenvalues(&m.sigma).unwrap();
        let mut want = [0.0, 0.0, lambda, 1.0 - lambda];
        want.sort_by(f64::total_cmp);
        for (a, w) in ev.iter().zip(want) {
            prop_assert!((a - w).abs() < 1e-10);
        }
        prop_assert!(m.support_overlap < 1e-10);
    }
}
