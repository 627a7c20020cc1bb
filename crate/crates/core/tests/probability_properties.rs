use proptest::prelude::*;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spaghetti_core::geometry::{
    clipped_area, max_pairwise_gap, simplex, triangle_condition, triangle_condition_constraints,
};
use spaghetti_core::policy::resolve;
use spaghetti_core::probability::{
    classical_probability, delta_of_piece, p_band, p_equilateral, probability_report, series_total,
    symmetric_probability,
};
use spaghetti_core::{BaryPoint, FractalApprox, Mode, Rat, Tri};

const POLICIES: [&str; 4] = ["default", "mirror", "rotate", "pattern:213/sf"];

#[test]
fn classical_value_agrees_with_clipped_region() {
    let clipped = clipped_area(&simplex(), &triangle_condition_constraints());
    assert_eq!(classical_probability(), Rat::frac(1, 4));
    assert_eq!(clipped, classical_probability());
}

#[test]
fn paper_closed_forms() {
    assert_eq!(
        series_total(&Rat::frac(1, 8), &Rat::frac(1, 8)).unwrap(),
        Rat::frac(1, 7)
    );
    assert_eq!(
        series_total(&Rat::frac(1, 64), &Rat::frac(1, 8)).unwrap(),
        Rat::frac(1, 56)
    );
    assert_eq!(
        symmetric_probability(Mode::Paper, None).unwrap(),
        Rat::frac(1, 8)
    );
    let mut eighth_power = Rat::one();
    for i in 1..=10u32 {
        assert_eq!(p_equilateral(i, Mode::Paper, None).unwrap(), eighth_power);
        assert_eq!(
            p_band(i, Mode::Paper, None).unwrap(),
            Rat::frac(1, 56) * &eighth_power
        );
        eighth_power = eighth_power * Rat::frac(1, 8);
    }
}

#[test]
fn measured_mode_needs_an_audit() {
    assert!(symmetric_probability(Mode::Measured, None).is_err());
    assert!(p_equilateral(1, Mode::Measured, None).is_err());
    assert!(p_band(0, Mode::Paper, None).is_err());
}

#[test]
fn measured_identities_hold_for_every_policy() {
    for spec in POLICIES {
        let a = FractalApprox::build(12, resolve(spec).unwrap()).unwrap();
        let audit = a.audit().unwrap();
        assert_eq!(
            symmetric_probability(Mode::Measured, Some(&audit)).unwrap(),
            Rat::frac(1, 4)
        );
        let eq = |i| p_equilateral(i, Mode::Measured, Some(&audit)).unwrap();
        let mut band_sum = Rat::zero();
        for i in 1..=12u32 {
            let band = p_band(i, Mode::Measured, Some(&audit)).unwrap();
            assert_eq!(band, eq(i) - eq(i + 1), "{spec} row {i}");
            assert!(eq(i + 1) < eq(i));
            band_sum = band_sum + band;
            assert_eq!(&band_sum + &eq(i + 1), Rat::one());
        }
        assert_eq!(eq(1), Rat::one());
        assert_eq!(eq(2), Rat::frac(1, 4));
    }
}

#[test]
fn delta_ladder_halves_under_every_policy() {
    for spec in POLICIES {
        let a = FractalApprox::build(12, resolve(spec).unwrap()).unwrap();
        for (k, piece) in a.pieces().iter().enumerate() {
            assert_eq!(
                delta_of_piece(piece),
                Rat::inv_pow2(k as u32),
                "{spec} level {}",
                k + 1
            );
        }
    }
}

#[test]
fn report_rows_follow_the_ladder() {
    let a = FractalApprox::build_default(12).unwrap();
    let r = probability_report(Mode::Measured, 12, &a).unwrap();
    assert!(r.flagged_rows.is_empty());
    assert_eq!(r.p_triangle, Rat::frac(1, 4));
    for row in &r.delta_table {
        assert_eq!(row.delta, Rat::inv_pow2(row.i - 1));
        assert!(row.band_matches_tail_difference);
    }
    let paper = probability_report(Mode::Paper, 12, &a).unwrap();
    assert_eq!(paper.flagged_rows, (1..=12).collect::<Vec<_>>());
    assert!(probability_report(Mode::Paper, 13, &a).is_err());
}

/// Exact point `(w_a a + w_b b + w_c c) / (w_a + w_b + w_c)` with positive weights.
fn random_point_in(t: &Tri, rng: &mut ChaCha8Rng) -> BaryPoint {
    let w: [i64; 3] = std::array::from_fn(|_| rng.gen_range(1..1 << 20));
    let total: i64 = w.iter().sum();
    let coords: [Rat; 3] = std::array::from_fn(|i| {
        t.vertices()
            .iter()
            .zip(w)
            .map(|(v, wj)| &v.coords()[i] * &Rat::frac(wj, total))
            .sum()
    });
    BaryPoint::new(coords[0].clone(), coords[1].clone(), coords[2].clone()).unwrap()
}

#[test]
fn piece_points_are_delta_equilateral() {
    let a = FractalApprox::build_default(6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for piece in a.pieces() {
        let delta = delta_of_piece(piece);
        for _ in 0..2000 {
            let p = random_point_in(&piece.triangle, &mut rng);
            assert!(max_pairwise_gap(&p) <= delta);
            // only the first piece reaches lengths of 1/2 or more
            assert_eq!(triangle_condition(&p), piece.level > 1, "{p:?}");
        }
    }
}

proptest! {
    #[test]
    fn series_total_inverts_the_geometric_sum(a in 0i64..1000, b in 1i64..1000, rn in 0i64..999, rd in 1000i64..2000) {
        let first = Rat::frac(a, b);
        let ratio = Rat::frac(rn, rd);
        let total = series_total(&first, &ratio).unwrap();
        prop_assert_eq!(total * (Rat::one() - ratio), first);
    }

    #[test]
    fn series_total_rejects_divergent_ratios(n in 1i64..100, d in 1i64..100) {
        prop_assume!(n >= d);
        prop_assert!(series_total(&Rat::one(), &Rat::frac(n, d)).is_err());
    }
}
