//! Randomized invariants: facts the norm must satisfy for every vector,
//! checked on small random instances rather than worked examples.

use normset::engine::oracle::{brute_force_norm, OracleOpts};
use normset::engine::{self, EngineOpts};
use normset::index_lab::{empirical_alpha_tilde, GridPoint};
use normset::seq_lab::basis_seq;
use normset::{validate, FinVec, Rat, SpaceSpec};
use proptest::prelude::*;

fn caps() -> EngineOpts {
    EngineOpts { size_cap: Some(8), depth_cap: Some(4), node_budget: None }
}

fn small_rat() -> impl Strategy<Value = Rat> {
    (-4i64..=4, 1i64..=4).prop_map(|(n, d)| Rat::new(n, d))
}

/// Up to five nonzero coordinates among the first twelve.
fn small_vec() -> impl Strategy<Value = FinVec> {
    proptest::collection::btree_map(1u32..=12, small_rat(), 1..=5)
        .prop_map(FinVec::from_pairs)
}

/// At most three coordinates among the first six, with coefficients the
/// brute-force oracle stays cheap on.
fn tiny_vec() -> impl Strategy<Value = FinVec> {
    let coeff = prop_oneof![Just(1i64), Just(-1), Just(2), Just(-2)]
        .prop_flat_map(|n| (Just(n), prop_oneof![Just(1i64), Just(2)]))
        .prop_map(|(n, d)| Rat::new(n, d));
    proptest::collection::btree_map(1u32..=6, coeff, 1..=3).prop_map(FinVec::from_pairs)
}

fn norm_of(x: &FinVec) -> Rat {
    engine::norm(x, &SpaceSpec::standard(), &caps()).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // every coordinate functional is in the set
    #[test]
    fn norm_dominates_every_coordinate(x in small_vec()) {
        prop_assert!(norm_of(&x) >= x.max_abs_coeff());
    }

    #[test]
    fn witness_validates_and_reproduces_value(x in small_vec()) {
        prop_assume!(!x.is_empty());
        let space = SpaceSpec::standard();
        let res = engine::norm(&x, &space, &caps()).unwrap();
        prop_assert!(validate(&res.witness, &space).is_pass());
        prop_assert_eq!(res.witness.evaluate(&x, &space).unwrap(), res.value);
    }

    // leaves carry free signs, so the norm cannot see coordinate signs
    #[test]
    fn sign_flips_preserve_norm(x in small_vec(), mask in any::<u32>()) {
        let flipped = FinVec::from_pairs(x.entries().iter().enumerate().map(|(k, (i, c))| {
            let c = if mask >> (k % 32) & 1 == 1 { -c.clone() } else { c.clone() };
            (*i, c)
        }));
        prop_assert_eq!(norm_of(&flipped), norm_of(&x));
    }

    #[test]
    fn norm_is_homogeneous(x in small_vec(), c in small_rat()) {
        prop_assert_eq!(norm_of(&x.scale(&c)), &c.abs() * &norm_of(&x));
    }

    // 1-unconditionality: damping coefficients cannot grow the norm
    #[test]
    fn damped_coefficients_never_grow_norm(
        x in small_vec(),
        factors in proptest::collection::vec(-2i64..=2, 5),
    ) {
        let damped = FinVec::from_pairs(x.entries().iter().enumerate().map(|(k, (i, c))| {
            (*i, c * &Rat::new(factors[k % factors.len()], 2))
        }));
        prop_assert!(norm_of(&damped) <= norm_of(&x));
    }

    #[test]
    fn restriction_never_grows_norm(x in small_vec(), mask in any::<u32>()) {
        let kept = FinVec::from_pairs(
            x.entries()
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> (k % 32) & 1 == 1)
                .map(|(_, (i, c))| (*i, c.clone())),
        );
        prop_assert!(norm_of(&kept) <= norm_of(&x));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn triangle_inequality(x in small_vec(), y in small_vec()) {
        prop_assert!(norm_of(&x.add(&y)) <= &norm_of(&x) + &norm_of(&y));
    }

    // the dynamic program and the family enumeration are two routes to the
    // same capped supremum
    #[test]
    fn engine_matches_brute_force_on_tiny_supports(x in tiny_vec()) {
        let space = SpaceSpec::standard();
        let opts = EngineOpts { size_cap: Some(4), depth_cap: Some(3), node_budget: None };
        let via_engine = engine::norm(&x, &space, &opts).unwrap().value;
        let via_family = brute_force_norm(&x, &space, OracleOpts::new(3, 4)).unwrap();
        prop_assert_eq!(via_engine, via_family);
    }

    // relaxing either cap can only enlarge the family
    #[test]
    fn family_caps_are_monotone(x in tiny_vec()) {
        let space = SpaceSpec::standard();
        let a = brute_force_norm(&x, &space, OracleOpts::new(2, 3)).unwrap();
        let b = brute_force_norm(&x, &space, OracleOpts::new(3, 4)).unwrap();
        let c = brute_force_norm(&x, &space, OracleOpts::new(4, 6)).unwrap();
        prop_assert!(a <= b);
        prop_assert!(b <= c);
    }

    // profile values tighten as the size floor rises and relax as the
    // length allowance grows
    #[test]
    fn profile_is_monotone_in_the_grid(
        len in 4usize..=8,
        s in prop_oneof![Just(2u32), Just(3), Just(4)],
        l in 1u32..=2,
    ) {
        let seq = basis_seq(len).unwrap();
        let grid = vec![
            GridPoint { s_min: s, max_len: l, tail_start: 1 },
            GridPoint { s_min: 2 * s, max_len: l, tail_start: 1 },
            GridPoint { s_min: s, max_len: l + 1, tail_start: 1 },
        ];
        let eps = Rat::new(1, 10);
        let profile = empirical_alpha_tilde(
            &seq,
            &SpaceSpec::standard(),
            &grid,
            &eps,
            &EngineOpts::default(),
        )
        .unwrap();
        let at = |k: usize| profile.entries[k].1.clone();
        prop_assert!(at(1) <= at(0), "raising the size floor must not raise the value");
        prop_assert!(at(2) >= at(0), "allowing longer functionals must not lower the value");
    }
}
