use hypercomb::exact::{binomial, gamma_ratio, int, pochhammer, rat, BigRational, GammaValue};
use hypercomb::hyper::{direct_sum, reverse, split_tail, Params, Pfq};
use hypercomb::identities::{catalan, chain_value, find_identity, lah};
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = BigRational> {
    (-40i64..40, 1i64..9).prop_map(|(p, q)| rat(p, q))
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(64) })]

    #[test]
    fn pascal_rule_and_symmetry(n in 1i64..200, k in 1i64..200) {
        prop_assert_eq!(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
        if k <= n {
            prop_assert_eq!(binomial(n, k), binomial(n, n - k));
        }
    }

    #[test]
    fn pochhammer_splits_additively(a in small_rational(), j in 0u64..12, k in 0u64..12) {
        let shifted = &a + int(j as i64);
        prop_assert_eq!(pochhammer(&a, j + k), pochhammer(&a, j) * pochhammer(&shifted, k));
    }

    #[test]
    fn gamma_duplication_on_half_integers(h in 1i64..60) {
        // G(z) G(z + 1/2) = 2^(1 - 2z) sqrt(pi) G(2z) with z = h/2
        let z = rat(h, 2);
        let lhs = gamma_ratio(&[z.clone(), &z + rat(1, 2)], &[int(h)]).unwrap();
        let scale = if h <= 1 { int(1 << (1 - h)) } else { rat(1, 1 << (h - 1)) };
        prop_assert_eq!(lhs, GammaValue::new(scale, 1));
    }

    #[test]
    fn lah_recurrence(n in 1u64..40, k in 1u64..40) {
        let lhs = lah(n + 1, k);
        let rhs = int((n + k) as i64) * lah(n, k) + lah(n, k - 1);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn catalan_recurrence(n in 0u64..60) {
        let rhs = catalan(n) * rat(2 * (2 * n as i64 + 1), n as i64 + 2);
        prop_assert_eq!(catalan(n + 1), rhs);
    }

    #[test]
    fn reversal_keeps_the_sum(
        n in 1i64..25,
        up in prop::collection::vec(small_rational(), 1..3),
        lo in prop::collection::vec((1i64..30, 1i64..4), 1..3),
        z in small_rational(),
    ) {
        let mut upper = vec![int(-n)];
        upper.extend(up);
        // lower parameters kept positive so no pole meets the truncation
        let lower: Vec<_> = lo.into_iter().map(|(p, q)| rat(p, q)).collect();
        prop_assume!(!num_traits::Zero::is_zero(&z));
        let series = Pfq::new(upper, lower, z).unwrap();
        prop_assume!(series.upper().iter().all(|a| a >= &int(-n)));
        if let Ok((pref, rev)) = reverse(&series) {
            let forward = direct_sum(&series, None).unwrap();
            prop_assert_eq!(forward, pref * direct_sum(&rev, None).unwrap());
        }
    }

    #[test]
    fn tail_split_matches_partial_sums(n in 1i64..30, cut in 0u64..20) {
        let series = Pfq::new(vec![int(n + 1)], vec![], rat(1, 2)).unwrap();
        let st = split_tail(&series, cut).unwrap();
        prop_assert!(st.check_at(cut + 15).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(24) })]

    #[test]
    fn chains_reproduce_the_naive_sums(pick in 0usize..6, n in 0i64..40, second in 0i64..20) {
        let id = ["S0", "S1", "S2", "S3", "S7", "S8"][pick];
        let entry = find_identity(id).unwrap();
        let p = Params::nm(n, second);
        prop_assume!(entry.in_domain(p));
        let naive = entry.naive_lhs(p).unwrap();
        let (value, _) = chain_value(id, p).unwrap();
        prop_assert_eq!(value.as_rational(), Some(naive));
    }

    #[test]
    fn trigamma_sums_agree(n in 0i64..60) {
        let s1 = find_identity("S1").unwrap().naive_lhs(Params::n(n)).unwrap();
        let s2 = find_identity("S2").unwrap().naive_lhs(Params::n(n)).unwrap();
        prop_assert_eq!(s1, s2);
    }
}
