//! Randomized invariants: parser round trips, estimator consistency on
//! fractional power series, exact-curve functional equations, and iterate
//! contraction.

use proptest::prelude::*;

use fracvel::dyadic::DyadicRational;
use fracvel::expr::{parse_function, FunctionExpr};
use fracvel::ifs;
use fracvel::series::{FractionalPowerSeries, SeriesSign, SeriesTerm};
use fracvel::velocity::{estimate_velocity, Classification, EstimatorSchedule, Side};
use fracvel::Error;

fn term_strategy() -> impl Strategy<Value = SeriesTerm> {
    (-5.0..5.0f64, -3.0..3.0f64, 0.1..4.0f64)
        .prop_map(|(c, b, alpha)| SeriesTerm { c, b, alpha })
}

fn expr_strategy() -> impl Strategy<Value = FunctionExpr> {
    prop_oneof![
        (0.01..5.0f64).prop_map(|alpha| FunctionExpr::Power { alpha }),
        (0.05..0.95f64).prop_map(|alpha| FunctionExpr::CounterexampleH { alpha }),
        (0.05..0.95f64).prop_map(|a| FunctionExpr::DeRham { a }),
        (0.05..1.0f64, 1u32..32).prop_map(|(a, n)| FunctionExpr::DeRhamReparam { a, n }),
        (0.05..0.95f64, 1u32..32).prop_map(|(a, n)| FunctionExpr::Neidinger { a, n }),
        (-10.0..10.0f64, proptest::collection::vec(term_strategy(), 0..4))
            .prop_map(|(c0, terms)| FunctionExpr::PowerSeries { c0, terms }),
    ]
}

proptest! {
    #[test]
    fn printed_expressions_parse_back_to_themselves(expr in expr_strategy()) {
        let text = expr.to_string();
        let reparsed = parse_function(&text);
        prop_assert_eq!(reparsed, Ok(expr), "source {}", text);
    }

    #[test]
    fn parser_rejects_junk_without_panicking(src in "[a-z0-9:;,.()e-]{0,24}") {
        match parse_function(&src) {
            Ok(expr) => {
                // anything accepted must round trip
                prop_assert_eq!(parse_function(&expr.to_string()), Ok(expr));
            }
            Err(Error::Parse { offset, expected }) => {
                prop_assert!(offset <= src.len());
                prop_assert!(!expected.is_empty());
            }
            Err(other) => prop_assert!(false, "unexpected error kind: {other}"),
        }
    }

    #[test]
    fn exact_curve_satisfies_both_branch_equations(
        a in 0.1..0.9f64,
        k in 0u64..=65536,
        n in 0u32..=16,
    ) {
        let denom = 1u64 << n;
        let k = k % (denom + 1);
        let x = DyadicRational::from_f64(k as f64 / denom as f64).unwrap();
        let lower = DyadicRational::from_f64(k as f64 / (2.0 * denom as f64)).unwrap();
        let upper =
            DyadicRational::from_f64((k + denom) as f64 / (2.0 * denom as f64)).unwrap();
        let rx = ifs::derham_eval_exact(a, &x).unwrap();
        let rl = ifs::derham_eval_exact(a, &lower).unwrap();
        let ru = ifs::derham_eval_exact(a, &upper).unwrap();
        prop_assert!((rl - a * rx).abs() <= 1e-12, "lower branch: {rl} vs {}", a * rx);
        prop_assert!(
            (ru - (a + (1.0 - a) * rx)).abs() <= 1e-12,
            "upper branch: {ru} vs {}",
            a + (1.0 - a) * rx
        );
    }

    #[test]
    fn exact_curve_is_strictly_increasing(
        a in 0.1..0.9f64,
        j in 0u64..4096,
        k in 0u64..=4096,
        n in 4u32..=12,
    ) {
        let denom = 1u64 << n;
        let (j, k) = (j % denom, k % (denom + 1));
        prop_assume!(j < k);
        let xj = DyadicRational::from_f64(j as f64 / denom as f64).unwrap();
        let xk = DyadicRational::from_f64(k as f64 / denom as f64).unwrap();
        let rj = ifs::derham_eval_exact(a, &xj).unwrap();
        let rk = ifs::derham_eval_exact(a, &xk).unwrap();
        prop_assert!(rj < rk, "R({j}/{denom}) = {rj} !< R({k}/{denom}) = {rk}");
    }

    #[test]
    fn successive_iterates_contract_pointwise(
        a in 0.15..0.85f64,
        n in 1u32..12,
        x in 0.0..=1.0f64,
    ) {
        let q = a.max(1.0 - a);
        let lo = ifs::neidinger_iterate(a, n, x).unwrap();
        let hi = ifs::neidinger_iterate(a, n + 1, x).unwrap();
        prop_assert!(
            (hi - lo).abs() <= 0.5 * q.powi(n as i32) + 1e-12,
            "levels {n}/{} differ by {} at x = {x}",
            n + 1,
            (hi - lo).abs()
        );
    }

    #[test]
    fn series_addition_distributes_over_evaluation(
        c0a in -5.0..5.0f64,
        c0b in -5.0..5.0f64,
        ta in proptest::collection::vec((-5.0..5.0f64, 0.0..3.0f64, 0.1..4.0f64), 0..4),
        tb in proptest::collection::vec((-5.0..5.0f64, 0.0..3.0f64, 0.1..4.0f64), 0..4),
        x in 0.0..3.0f64,
    ) {
        let mk = |c0: f64, ts: &[(f64, f64, f64)]| {
            let terms = ts
                .iter()
                .map(|&(c, b, alpha)| SeriesTerm { c, b, alpha })
                .collect();
            FractionalPowerSeries::new(c0, terms, SeriesSign::Plus).unwrap()
        };
        let sa = mk(c0a, &ta);
        let sb = mk(c0b, &tb);
        let sum = sa.series_add(&sb).unwrap();
        let direct = sa.eval(x).unwrap() + sb.eval(x).unwrap();
        let merged = sum.eval(x).unwrap();
        let scale = 1.0 + direct.abs();
        prop_assert!(
            (merged - direct).abs() <= 1e-12 * scale,
            "{merged} vs {direct}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn velocity_of_a_pure_power_recovers_the_coefficient(
        c in 0.25..4.0f64,
        beta in 0.35..0.65f64,
    ) {
        let f = FractionalPowerSeries::monomial(c, beta)
            .unwrap()
            .to_real_function();
        let est =
            estimate_velocity(&f, 0.0, beta, Side::Forward, &EstimatorSchedule::default())
                .unwrap();
        prop_assert_eq!(est.classification, Classification::Finite);
        prop_assert!((est.value - c).abs() <= 1e-6 * c.max(1.0), "value {}", est.value);
    }

    #[test]
    fn smooth_terms_do_not_move_the_velocity(
        c in 0.25..3.0f64,
        s in -1.5..1.5f64,
        b in 0.5..2.0f64,
        gamma in 1.2..2.0f64,
        beta in 0.35..0.65f64,
    ) {
        let series = FractionalPowerSeries::new(
            0.0,
            vec![
                SeriesTerm { c, b: 0.0, alpha: beta },
                SeriesTerm { c: s, b, alpha: gamma },
            ],
            SeriesSign::Plus,
        )
        .unwrap();
        let f = series.to_real_function();
        let est =
            estimate_velocity(&f, 0.0, beta, Side::Forward, &EstimatorSchedule::default())
                .unwrap();
        prop_assert_eq!(est.classification, Classification::Finite);
        prop_assert!((est.value - c).abs() <= 1e-3, "value {} vs {c}", est.value);
    }

    #[test]
    fn smooth_functions_have_zero_velocity_below_order_one(
        s in 0.1..2.0f64,
        b in 0.5..2.0f64,
        gamma in 1.1..2.5f64,
        beta in 0.25..0.75f64,
        x in 0.0..1.5f64,
    ) {
        let series = FractionalPowerSeries::new(
            1.0,
            vec![SeriesTerm { c: s, b, alpha: gamma }],
            SeriesSign::Plus,
        )
        .unwrap();
        let f = series.to_real_function();
        let est =
            estimate_velocity(&f, x, beta, Side::Forward, &EstimatorSchedule::default())
                .unwrap();
        prop_assert_eq!(est.classification, Classification::Zero, "at x = {}", x);
    }

    #[test]
    fn closed_form_velocity_matches_the_numeric_estimator(
        c0 in -2.0..2.0f64,
        c1 in 0.3..2.0f64,
        c2 in -2.0..2.0f64,
        beta in 0.35..0.65f64,
        gap in 0.2..1.0f64,
    ) {
        let series = FractionalPowerSeries::new(
            c0,
            vec![
                SeriesTerm { c: c1, b: 0.0, alpha: beta },
                SeriesTerm { c: c2, b: 0.0, alpha: beta + gap },
            ],
            SeriesSign::Plus,
        )
        .unwrap();
        let closed = series.closed_form_velocity(0.0, beta, Side::Forward).unwrap();
        let est = estimate_velocity(
            &series.to_real_function(),
            0.0,
            beta,
            Side::Forward,
            &EstimatorSchedule::default(),
        )
        .unwrap();
        prop_assert_eq!(closed.classification, Classification::Finite);
        prop_assert_eq!(est.classification, Classification::Finite);
        prop_assert!(
            (closed.value - est.value).abs() <= 1e-4,
            "closed {} vs numeric {}",
            closed.value,
            est.value
        );
    }
}
