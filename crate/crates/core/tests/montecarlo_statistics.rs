use statrs::distribution::{ChiSquared, ContinuousCDF};

use spaghetti_core::montecarlo::{
    chi_square_statistic, estimate_probability, physical_cell_counts, pool_tail,
    sample_in_triangle, FractalSampler, PhysicalSampler,
};
use spaghetti_core::{FractalApprox, Predicate, Rat, Rng, Sampler, SamplerRegistry};

fn chi_square_critical(df: usize, alpha: f64) -> f64 {
    ChiSquared::new(df as f64).unwrap().inverse_cdf(1.0 - alpha)
}

#[test]
fn critical_value_matches_tables() {
    // standard table entries for alpha = 0.001
    assert!((chi_square_critical(3, 0.001) - 16.266).abs() < 1e-3);
    assert!((chi_square_critical(10, 0.001) - 29.588).abs() < 1e-3);
}

#[test]
fn physical_triangle_frequency() {
    let e = estimate_probability(&PhysicalSampler, &Predicate::Triangle, 1_000_000, 0, 1).unwrap();
    assert!(e.z_score(&Rat::frac(1, 4)) <= 3.0, "{e:?}");
    assert!((e.stderr - 0.000433).abs() < 1e-5);
    assert_eq!(e.targets.exact, Some(Rat::frac(1, 4)));
}

#[test]
fn physical_samples_are_uniform_over_medial_cells() {
    let n = 1_000_000;
    let counts = physical_cell_counts(n, 11);
    let stat = chi_square_statistic(&counts, &[0.25; 4]);
    assert!(
        stat < chi_square_critical(3, 0.001),
        "{counts:?} gives {stat}"
    );
}

#[test]
fn physical_gap_frequency_matches_clipped_area() {
    let d = Predicate::Delta(Rat::frac(1, 3));
    let e = estimate_probability(&PhysicalSampler, &d, 400_000, 5, 1).unwrap();
    let exact = e.targets.exact.clone().unwrap();
    assert_eq!(exact, Rat::frac(2, 9));
    assert!(e.z_score(&exact) <= 3.0, "{e:?}");
}

#[test]
fn triangle_sampling_has_the_centroid_as_mean() {
    let a = FractalApprox::build_default(3).unwrap();
    let n = 200_000;
    for piece in a.pieces() {
        let mut rng = Rng::new(piece.level as u64);
        let mut sum = [0.0; 3];
        let mut sq = [0.0; 3];
        for _ in 0..n {
            let p = sample_in_triangle(&piece.triangle, &mut rng).unwrap();
            for i in 0..3 {
                sum[i] += p[i];
                sq[i] += p[i] * p[i];
            }
        }
        let vs = piece.triangle.vertices().map(|v| v.to_f64());
        for i in 0..3 {
            let mean = sum[i] / n as f64;
            let sd = (sq[i] / n as f64 - mean * mean).sqrt();
            let expected = (vs[0][i] + vs[1][i] + vs[2][i]) / 3.0;
            assert!((mean - expected).abs() <= 3.0 * sd / (n as f64).sqrt());
        }
    }
}

#[test]
fn fractal_draws_follow_audited_areas() {
    let a = FractalApprox::build_default(12).unwrap();
    let s = FractalSampler::new(&a).unwrap();
    let n = 300_000;
    let counts = s.piece_counts(n, 3);
    let probs: Vec<f64> = s.shares().iter().map(Rat::to_f64).collect();
    assert!((probs[0] - 0.75).abs() < 1e-6);
    let (obs, pr) = pool_tail(&counts, &probs, n, 5.0);
    let stat = chi_square_statistic(&obs, &pr);
    assert!(
        stat < chi_square_critical(obs.len() - 1, 0.001),
        "{obs:?} gives {stat}"
    );
}

#[test]
fn fractal_samples_stay_in_their_piece() {
    let a = FractalApprox::build_default(12).unwrap();
    let s = FractalSampler::new(&a).unwrap();
    let mut rng = Rng::new(99);
    for _ in 0..100_000 {
        let (p, k) = s.sample_tagged(&mut rng);
        assert!(
            s.triangle(k).contains_within(p, 1e-12),
            "{p:?} outside piece {k}"
        );
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn fractal_triangle_frequency_matches_target() {
    let a = FractalApprox::build_default(12).unwrap();
    let s = FractalSampler::new(&a).unwrap();
    let e = estimate_probability(&s, &Predicate::Triangle, 300_000, 1, 2).unwrap();
    let t = &e.targets;
    assert_eq!(t.measured, Some(Rat::frac(1, 4)));
    assert_eq!(t.paper, Some(Rat::frac(1, 8)));
    assert!(e.z_score(t.measured.as_ref().unwrap()) <= 3.0, "{e:?}");
    assert!(e.z_score(t.exact.as_ref().unwrap()) <= 3.0, "{e:?}");
    assert!(t.truncation_bias.as_ref().unwrap().to_f64().abs() < 1e-6);
}

#[test]
fn fractal_gap_frequency_matches_exact_share() {
    let a = FractalApprox::build_default(12).unwrap();
    let s = FractalSampler::new(&a).unwrap();
    let d = Predicate::Delta(Rat::frac(1, 2));
    let e = estimate_probability(&s, &d, 300_000, 2, 1).unwrap();
    let t = &e.targets;
    assert_eq!(t.measured, Some(Rat::frac(1, 4)));
    assert!(e.z_score(t.exact.as_ref().unwrap()) <= 3.0, "{e:?}");
}

#[test]
fn stderr_shrinks_with_the_square_root_of_n() {
    let small = estimate_probability(&PhysicalSampler, &Predicate::Triangle, 10_000, 4, 1).unwrap();
    let large =
        estimate_probability(&PhysicalSampler, &Predicate::Triangle, 1_000_000, 4, 1).unwrap();
    let ratio = small.stderr / large.stderr;
    assert!((ratio - 10.0).abs() < 0.5, "{ratio}");
}

#[test]
fn estimates_are_reproducible() {
    let a = FractalApprox::build_default(8).unwrap();
    let reg = SamplerRegistry::builtin();
    for name in reg.names() {
        let s = reg.create(name, Some(&a)).unwrap();
        let run = |seed, threads| {
            estimate_probability(s.as_ref(), &Predicate::Triangle, 50_000, seed, threads).unwrap()
        };
        assert_eq!(run(9, 1), run(9, 1));
        assert_eq!(run(9, 4), run(9, 4));
        assert_ne!(run(9, 1).p_hat, run(10, 1).p_hat);
    }
}

#[test]
fn thread_split_uses_numbered_substreams() {
    let s = PhysicalSampler;
    let threaded = estimate_probability(&s, &Predicate::Triangle, 30_001, 8, 3).unwrap();
    let chunks = [10_001u64, 10_000, 10_000];
    let hits: u64 = chunks
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let mut rng = Rng::substream(8, i as u64);
            (0..m)
                .filter(|_| Predicate::Triangle.test(s.sample(&mut rng)))
                .count() as u64
        })
        .sum();
    assert_eq!(threaded.p_hat, hits as f64 / 30_001.0);
}
