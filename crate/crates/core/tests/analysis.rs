use layersum::analysis::{
    boxplot_stats, histogram, integer_histogram, jarque_bera, ks_normal, percent_metrics, quartiles, shapiro_wilk,
    summarize_set, summarize_values, Moments,
};
use layersum::layers::{generate_fixed_set, generate_layer1_set};
use layersum::{make_stream, Error, Layer, MasterSeed, RunConfig};
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

fn two_pass(xs: &[f64]) -> (f64, f64, f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in xs {
        let d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    (mean, m2, m3, m4)
}

fn shape(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let (_, m2, m3, m4) = two_pass(xs);
    (n.sqrt() * m3 / m2.powf(1.5), n * m4 / (m2 * m2) - 3.0)
}

fn rel(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / b.abs().max(floor)
}

fn type7(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let below = pos.floor() as usize;
    let above = pos.ceil() as usize;
    sorted[below] + (pos - below as f64) * (sorted[above] - sorted[below])
}

fn single_set(k: u32, n: u32, seed: u64) -> RunConfig {
    RunConfig { total_numbers: n, total_sets: 1, ..RunConfig::new(Layer::Fixed { k }, seed) }
}

#[test]
fn uniform_excess_kurtosis_from_a_million_draws() {
    let mut s = make_stream(MasterSeed(101), 0);
    let mut acc = Moments::new();
    for _ in 0..1_000_000 {
        acc.push(s.next_int(1, 100).unwrap() as f64);
    }
    // discrete uniform: -6 (m^2 + 1) / (5 (m^2 - 1))
    let exact = -6.0 * 10_001.0 / (5.0 * 9_999.0);
    assert!((acc.excess_kurtosis().unwrap() - exact).abs() < 0.03);
}

#[test]
fn sixteen_chunk_tree_merge() {
    let mut s = make_stream(MasterSeed(102), 0);
    let xs: Vec<f64> = (0..100_000).map(|_| s.next_int(-1_000_000, 1_000_000).unwrap() as f64 * 0.37).collect();
    let mut cuts: Vec<usize> = (0..15).map(|_| s.next_int(0, 100_000).unwrap() as usize).collect();
    cuts.extend([0, 100_000]);
    cuts.sort_unstable();
    let mut level: Vec<Moments> = cuts.windows(2).map(|w| Moments::from_values(xs[w[0]..w[1]].iter().copied())).collect();
    while level.len() > 1 {
        level = level.chunks(2).map(|p| if p.len() == 2 { p[0].merged(&p[1]) } else { p[0] }).collect();
    }
    let tree = level[0];
    let single = Moments::from_values(xs.iter().copied());
    assert_eq!(tree.count(), single.count());
    assert!(rel(tree.mean().unwrap(), single.mean().unwrap(), 1.0) < 1e-10);
    assert!(rel(tree.m2(), single.m2(), 0.0) < 1e-10);
    assert!(rel(tree.m3(), single.m3(), single.m2().powf(1.5) / 1e5) < 1e-10);
    assert!(rel(tree.m4(), single.m4(), 0.0) < 1e-10);
}

#[test]
fn quartile_oracle_for_every_small_length() {
    let mut s = make_stream(MasterSeed(103), 0);
    for n in 1..=50usize {
        for _ in 0..20 {
            let xs: Vec<f64> = (0..n).map(|_| s.next_int(-500, 500).unwrap() as f64 / 7.0).collect();
            let mut sorted = xs.clone();
            sorted.sort_by(f64::total_cmp);
            let (q1, q2, q3) = quartiles(&xs).unwrap();
            assert_eq!(q1, type7(&sorted, 0.25), "n={n}");
            assert_eq!(q2, type7(&sorted, 0.5), "n={n}");
            assert_eq!(q3, type7(&sorted, 0.75), "n={n}");
        }
    }
}

#[test]
fn spec_examples_for_descriptive_statistics() {
    assert_eq!(quartiles(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap(), (2.0, 3.0, 4.0));
    assert_eq!(quartiles(&[1.0, 2.0, 3.0, 4.0]).unwrap(), (1.75, 2.5, 3.25));
    assert_eq!(quartiles(&[7.0]).unwrap(), (7.0, 7.0, 7.0));
    assert!(matches!(quartiles(&[]), Err(Error::InsufficientData { .. })));

    let b = boxplot_stats(&[1.0, 2.0, 3.0, 4.0, 100.0]).unwrap();
    assert_eq!((b.q1, b.q3, b.upper_fence, b.outlier_count), (2.0, 4.0, 7.0, 1));
    let b = boxplot_stats(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
    assert_eq!((b.lower_fence, b.upper_fence, b.outlier_count), (-1.0, 7.0, 0));
    let b = boxplot_stats(&[3.0; 9]).unwrap();
    assert_eq!((b.q3 - b.q1, b.outlier_count), (0.0, 0));

    let ones: Vec<f64> = (1..=100).map(f64::from).collect();
    assert_eq!(histogram(&ones, 10).unwrap().counts, vec![10; 10]);
    let h = histogram(&[7.0], 3).unwrap();
    assert_eq!(h.counts.iter().filter(|&&c| c > 0).count(), 1);
}

#[test]
fn triangular_histogram_peaks_at_the_apex() {
    // one million values, one bin per attainable sum 2..=200
    let c = single_set(2, 1_000_000, 104);
    let set = generate_fixed_set(&c, 1, 2).unwrap();
    let xs: Vec<f64> = set.values.iter().map(|&v| v as f64).collect();
    let h = integer_histogram(&xs).unwrap();
    assert_eq!(h.counts.len(), 199);
    assert_eq!(h.total(), 1_000_000);
    let peak = h.bin_edges[h.peak_bin()] + 0.5;
    // neighbours of 101 differ from it by 1e-4 in probability, about one
    // binomial SE at this size, so the apex is located to within 2 here
    assert!((peak - 101.0).abs() <= 2.0, "{peak}");

    // with 5e7 values the apex stands 5 SE clear of its neighbours
    let mut s = make_stream(MasterSeed(105), 0);
    let mut counts = vec![0u64; 201];
    for _ in 0..50_000_000 {
        counts[(s.next_int(1, 100).unwrap() + s.next_int(1, 100).unwrap()) as usize] += 1;
    }
    let apex = counts.iter().enumerate().max_by_key(|&(_, &c)| c).unwrap().0;
    assert_eq!(apex, 101);
}

#[test]
fn jarque_bera_examples() {
    let r = jarque_bera(0.0, 0.0, 123).unwrap();
    assert_eq!((r.statistic, r.p_value), (0.0, 1.0));
    let r = jarque_bera(0.0, -1.2, 1000).unwrap();
    assert!((r.statistic - 60.0).abs() < 1e-9);
    assert!(r.p_value < 1e-12);
    assert!(jarque_bera(0.0, 0.0, 7).is_err());

    let mut accepted = 0;
    for seed in 1..=100 {
        let c = single_set(100, 1000, seed);
        let s = summarize_set(&generate_fixed_set(&c, 1, 100).unwrap(), &c);
        if s.normality.jb_p.unwrap() > 0.001 {
            accepted += 1;
        }
    }
    assert!(accepted >= 95, "{accepted}");
}

/// Largest gap between the Uniform{1..100} CDF and the moment-matched normal.
fn discrete_uniform_normal_gap() -> f64 {
    let normal = Normal::new(50.5, (9999.0f64 / 12.0).sqrt()).unwrap();
    let mut gap = 0.0f64;
    for v in 1..=100 {
        let x = f64::from(v);
        let phi = normal.cdf(x);
        gap = gap.max((f64::from(v) / 100.0 - phi).abs()).max((f64::from(v - 1) / 100.0 - phi).abs());
    }
    gap
}

#[test]
fn ks_examples() {
    let gap = discrete_uniform_normal_gap();
    assert!((gap - 0.0622).abs() < 5e-4, "{gap}");
    let mut s = make_stream(MasterSeed(106), 0);
    let xs: Vec<f64> = (0..10_000).map(|_| s.next_int(1, 100).unwrap() as f64).collect();
    let m = Moments::from_values(xs.iter().copied());
    let r = ks_normal(&xs, m.mean().unwrap(), m.sample_std().unwrap()).unwrap();
    // sampling SE of D around the population gap is below 0.005 here
    assert!((r.statistic - gap).abs() < 0.02, "{}", r.statistic);
    assert!(r.p_value < 1e-10);

    let mut accepted = 0;
    for seed in 1..=100 {
        let c = RunConfig { total_sets: 10_000, ..RunConfig::new(Layer::Layer1, seed) };
        let s = summarize_set(&generate_layer1_set(&c, 10_000).unwrap(), &c);
        assert!(s.normality.ks_params_estimated);
        if s.normality.ks_p.unwrap() > 0.001 {
            accepted += 1;
        }
    }
    assert!(accepted >= 95, "{accepted}");
}

#[test]
fn shapiro_wilk_examples() {
    let linear: Vec<f64> = (1..=50).map(f64::from).collect();
    let r = shapiro_wilk(&linear).unwrap();
    assert!((r.statistic - 0.955_582_687_6).abs() < 1e-4);
    assert!(matches!(shapiro_wilk(&[5.0, 5.0, 5.0]), Err(Error::Degenerate(_))));
    assert!(matches!(shapiro_wilk(&[1.0, 2.0]), Err(Error::SampleSizeOutOfRange { .. })));
    assert!(matches!(shapiro_wilk(&vec![1.0; 5001]), Err(Error::SampleSizeOutOfRange { .. })));
}

/// Mean JB and mean fitted-normal D fall as k grows. E[JB] is only about
/// 2.15 at k = 10 against 1.97 at k = 100 (sd near 2 per set), so a 50-seed
/// average orders them correctly roughly 70% of the time; 5000 seeds put the
/// smallest gap above 4 standard errors.
#[test]
fn normality_gradient_in_expectation() {
    const SEEDS: u64 = 5000;
    let ks = [1u32, 2, 10, 100];
    let mut jb = [0.0f64; 4];
    let mut d = [0.0f64; 4];
    for seed in 1..=SEEDS {
        for (i, &k) in ks.iter().enumerate() {
            let c = single_set(k, 1000, 5000 + seed);
            let s = summarize_set(&generate_fixed_set(&c, 1, k).unwrap(), &c);
            jb[i] += s.normality.jb_stat.unwrap() / SEEDS as f64;
            d[i] += s.normality.ks_d.unwrap() / SEEDS as f64;
        }
    }
    assert!(jb.windows(2).all(|w| w[1] < w[0]), "{jb:?}");
    assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
}

#[test]
fn percent_metric_examples() {
    let values: Vec<u64> = (1..=1000).collect();
    let l1 = RunConfig::new(Layer::Layer1, 0);
    let base = summarize_values(10_000, Some(10_000), &values, &l1);
    let pm = percent_metrics(&layersum::analysis::SetSummary { mean: 504_982.0, ..base }, &l1);
    assert!((pm.pct_mean - 50.4982).abs() < 1e-9);

    let l2 = RunConfig::new(Layer::Layer2, 0);
    let base = summarize_values(1, Some(6), &values, &l2);
    let pm = percent_metrics(&layersum::analysis::SetSummary { mean: 305.0, ..base }, &l2);
    assert!((pm.pct_mean - 50.833_333).abs() < 1e-5);

    let l3 = RunConfig::new(Layer::Layer3, 0);
    let base = summarize_values(1, None, &values, &l3);
    let pm = percent_metrics(&layersum::analysis::SetSummary { std_dev: Some(145_170.0), ..base }, &l3);
    assert!((pm.pct_std.unwrap() - 14.517).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn streaming_matches_two_pass(
        centre in -1e6f64..1e6, spread in 1e-3f64..1e4,
        unit in prop::collection::vec(-1.0f64..1.0, 2..10_000),
    ) {
        let xs: Vec<f64> = unit.iter().map(|u| centre + spread * u).collect();
        let (_, m2, _, _) = two_pass(&xs);
        prop_assume!(m2 > 0.0);
        let m = Moments::from_values(xs.iter().copied());
        let (g1, g2) = shape(&xs);
        prop_assert!(rel(m.skewness().unwrap(), g1, 1.0) < 1e-8, "{} vs {}", m.skewness().unwrap(), g1);
        prop_assert!(rel(m.excess_kurtosis().unwrap(), g2, 1.0) < 1e-8);
    }
}

proptest! {
    #[test]
    fn merge_is_associative(
        a in prop::collection::vec(-1e3f64..1e3, 0..200),
        b in prop::collection::vec(-1e3f64..1e3, 0..200),
        c in prop::collection::vec(-1e3f64..1e3, 0..200),
    ) {
        let [ma, mb, mc] = [&a, &b, &c].map(|v| Moments::from_values(v.iter().copied()));
        let left = ma.merged(&mb).merged(&mc);
        let right = ma.merged(&mb.merged(&mc));
        prop_assert_eq!(left.count(), right.count());
        if left.count() > 0 {
            let scale = left.m2().max(1.0);
            prop_assert!(rel(left.mean().unwrap(), right.mean().unwrap(), 1.0) < 1e-10);
            prop_assert!(rel(left.m2(), right.m2(), 1.0) < 1e-10);
            prop_assert!(rel(left.m3(), right.m3(), scale.powf(1.5)) < 1e-10);
            prop_assert!(rel(left.m4(), right.m4(), scale * scale) < 1e-10);
        }
        let swapped = mb.merged(&ma);
        let direct = ma.merged(&mb);
        if direct.count() > 0 {
            prop_assert!(rel(direct.m2(), swapped.m2(), 1.0) < 1e-10);
        }
    }

    #[test]
    fn summaries_are_ordered(values in prop::collection::vec(1u64..10_000, 1..300)) {
        let cfg = RunConfig::new(Layer::Fixed { k: 100 }, 0);
        let s = summarize_values(1, Some(100), &values, &cfg);
        prop_assert!(s.min <= s.q1 && s.q1 <= s.median && s.median <= s.q3 && s.q3 <= s.max);
        prop_assert!(s.pct_mean >= 0.0 && s.pct_mean <= 100.0);
        prop_assert!(s.pct_median >= 0.0 && s.pct_median <= 100.0);
        prop_assert!(s.pct_std.unwrap_or(0.0) >= 0.0);
    }
}
