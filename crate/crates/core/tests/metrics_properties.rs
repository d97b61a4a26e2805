use idrkit_core::discipline::Discipline;
use idrkit_core::metrics::{
    balance, disparity_matrix, true_diversity, variety, DisciplineMatrix, DisparityMatrix, TdMode,
};
use idrkit_core::DisciplineVector;
use proptest::prelude::*;

/// Gini complement from mean absolute difference over all ordered pairs.
fn pairwise_balance(xs: &[u64]) -> f64 {
    let n = xs.len() as f64;
    let total: f64 = xs.iter().map(|&x| x as f64).sum();
    let mut diff = 0.0;
    for &a in xs {
        for &b in xs {
            diff += (a as f64 - b as f64).abs();
        }
    }
    1.0 - diff / (2.0 * n * total)
}

fn vector(counts: &[u64]) -> DisciplineVector {
    let mut arr = [0u64; 27];
    arr[..counts.len()].copy_from_slice(counts);
    DisciplineVector::from_counts(arr)
}

fn counts() -> impl Strategy<Value = Vec<u64>> {
    proptest::collection::vec(1u64..=10_000, 1..=27)
}

fn symmetric_counts() -> impl Strategy<Value = DisciplineMatrix> {
    proptest::collection::vec(0u32..50, 27 * 28 / 2).prop_map(|upper| {
        let mut m = DisciplineMatrix::default();
        let mut k = 0;
        for i in 0..27 {
            for j in i..27 {
                let (a, b) = (Discipline::ALL[i], Discipline::ALL[j]);
                // sparse: about half the entries are zero
                let v = if upper[k] % 2 == 0 { 0.0 } else { upper[k] as f64 };
                m.set(a, b, v);
                m.set(b, a, v);
                k += 1;
            }
        }
        m
    })
}

proptest! {
    #[test]
    fn variety_matches_independent_scan(xs in proptest::collection::vec(0u64..5, 27)) {
        let v = vector(&xs);
        let scan = xs.iter().filter(|&&x| x != 0).count();
        match variety(&v) {
            Ok(n) => prop_assert_eq!(n, scan),
            Err(_) => prop_assert_eq!(scan, 0),
        }
    }

    #[test]
    fn balance_equals_pairwise_gini(xs in counts()) {
        let b = balance(&vector(&xs)).unwrap();
        prop_assert!((b - pairwise_balance(&xs)).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&b));
    }

    #[test]
    fn balance_permutation_and_scale_invariant(xs in counts(), k in 1u64..50, rot in 0usize..27) {
        let b = balance(&vector(&xs)).unwrap();
        let mut rotated = xs.clone();
        let r = rot % rotated.len();
        rotated.rotate_left(r);
        prop_assert!((balance(&vector(&rotated)).unwrap() - b).abs() < 1e-12);
        let scaled: Vec<u64> = xs.iter().map(|x| x * k).collect();
        prop_assert!((balance(&vector(&scaled)).unwrap() - b).abs() < 1e-12);
    }

    #[test]
    fn disparity_is_symmetric_bounded_zero_diagonal(c in symmetric_counts()) {
        let d = disparity_matrix(&c, "prop").unwrap();
        for a in Discipline::ALL {
            prop_assert_eq!(d.get(a, a), 0.0);
            for b in Discipline::ALL {
                let x = d.get(a, b);
                prop_assert!((0.0..=1.0).contains(&x));
                prop_assert_eq!(x, d.get(b, a));
            }
        }
    }

    #[test]
    fn canonical_td_at_least_one_and_scale_invariant(c in symmetric_counts(), xs in counts(), k in 1u64..20) {
        let d = disparity_matrix(&c, "prop").unwrap();
        let v = vector(&xs);
        let td = true_diversity(&v, &d, TdMode::Canonical).unwrap();
        prop_assert!(td >= 1.0 - 1e-12);
        let scaled: Vec<u64> = xs.iter().map(|x| x * k).collect();
        let td2 = true_diversity(&vector(&scaled), &d, TdMode::Canonical).unwrap();
        prop_assert!((td - td2).abs() < 1e-9 * td);
    }

    #[test]
    fn single_discipline_td_is_one(idx in 0usize..27, n in 1u64..1000, c in symmetric_counts()) {
        let d = disparity_matrix(&c, "prop").unwrap();
        let v = DisciplineVector::from_pairs(&[(Discipline::ALL[idx], n)]);
        prop_assert_eq!(true_diversity(&v, &d, TdMode::Canonical).unwrap(), 1.0);
    }

    #[test]
    fn merging_identical_disciplines_keeps_td(pa in 1u64..100, pb in 1u64..100, pc in 1u64..100, x in 0.0f64..=1.0) {
        use Discipline::*;
        let mut m = DisciplineMatrix::from_fn(|_, _| 1.0);
        for (a, b, v) in [(Medi, Immu, 0.0), (Medi, Cs, x), (Immu, Cs, x)] {
            m.set(a, b, v);
            m.set(b, a, v);
        }
        let d = DisparityMatrix::from_distances(m, "toy").unwrap();
        let split = DisciplineVector::from_pairs(&[(Medi, pa), (Immu, pb), (Cs, pc)]);
        let merged = DisciplineVector::from_pairs(&[(Medi, pa + pb), (Cs, pc)]);
        let t1 = true_diversity(&split, &d, TdMode::Canonical).unwrap();
        let t2 = true_diversity(&merged, &d, TdMode::Canonical).unwrap();
        prop_assert!((t1 - t2).abs() < 1e-9);
    }
}

#[test]
fn identical_rows_have_zero_disparity() {
    use Discipline::*;
    let mut c = DisciplineMatrix::default();
    // MEDI and IMMU always co-occur with each other and with BIOC
    for a in [Medi, Immu, Bioc] {
        for b in [Medi, Immu, Bioc] {
            c.set(a, b, 4.0);
        }
    }
    let d = disparity_matrix(&c, "t").unwrap();
    assert!(d.get(Medi, Immu).abs() < 1e-12);
    assert!(d.zero_rows.contains(Earth));
}
