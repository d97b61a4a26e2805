use std::collections::BTreeSet;

use idrkit_core::corpus::{
    bucket_by_period, filter_doc_types, parse_records, write_records, BucketOptions, DateWindow, MissingMonthPolicy,
    YearMonth, YearRange,
};
use idrkit_core::synth::fixture_corpus;
use idrkit_core::{DocType, Granularity, PublicationRecord};
use proptest::prelude::*;

fn type_sets() -> impl Strategy<Value = BTreeSet<DocType>> {
    proptest::sample::subsequence(vec![DocType::Article, DocType::Review, DocType::Other], 1..=3)
        .prop_map(|v| v.into_iter().collect())
}

fn corpus(seed: u64, n: usize) -> Vec<PublicationRecord> {
    fixture_corpus(seed, n).records
}

fn serialize(records: &[PublicationRecord]) -> String {
    let mut buf = Vec::new();
    write_records(records, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialization_is_a_fixed_point(seed in 0u64..10_000, n in 0usize..40) {
        let records = corpus(seed, n);
        let text = serialize(&records);
        let parsed = parse_records(text.as_bytes(), YearRange::default()).unwrap();
        prop_assert_eq!(&parsed.records, &records);
        prop_assert_eq!(serialize(&parsed.records), text);
    }

    #[test]
    fn parsed_plus_skipped_is_nonempty_lines(
        seed in 0u64..10_000,
        n in 1usize..30,
        junk in proptest::collection::vec((0usize..30, prop_oneof![
            Just("{not json".to_string()),
            Just(String::new()),
            Just("   ".to_string()),
            Just(r#"{"id":"x"}"#.to_string()),
            Just(r#"{"id":"fx0000","title":"","journal":"","year":2016,"type":"article","references":[]}"#.to_string()),
        ]), 0..8),
    ) {
        let mut lines: Vec<String> = serialize(&corpus(seed, n)).lines().map(str::to_string).collect();
        for (at, j) in junk {
            let at = at.min(lines.len());
            lines.insert(at, j);
        }
        let text = lines.join("\n");
        let nonempty = lines.iter().filter(|l| !l.trim().is_empty()).count();
        let out = parse_records(text.as_bytes(), YearRange::default()).unwrap();
        prop_assert_eq!(out.records.len() + out.skipped, nonempty);
        prop_assert_eq!(out.warnings.len(), out.skipped);
        let ids: BTreeSet<_> = out.records.iter().map(|r| r.id.clone()).collect();
        prop_assert_eq!(ids.len(), out.records.len());
    }

    #[test]
    fn type_filter_is_idempotent(seed in 0u64..10_000, allowed in type_sets(), refs in any::<bool>()) {
        let once = filter_doc_types(corpus(seed, 40), &allowed, refs).unwrap();
        let twice = filter_doc_types(once.clone(), &allowed, refs).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert!(once.iter().all(|r| allowed.contains(&r.doc_type)));
    }

    #[test]
    fn type_filter_commutes_with_bucketing(
        seed in 0u64..10_000,
        allowed in type_sets(),
        monthly in any::<bool>(),
        january in any::<bool>(),
        from in 2015i32..2019,
        span in 0i32..4,
    ) {
        let records = corpus(seed, 60);
        let g = if monthly { Granularity::Month } else { Granularity::Year };
        let opts = BucketOptions {
            window: DateWindow {
                from: Some(YearMonth { year: from, month: None }),
                to: Some(YearMonth { year: from + span, month: Some(6) }),
            },
            missing_month: if january { MissingMonthPolicy::January } else { MissingMonthPolicy::Exclude },
        };

        let filtered = filter_doc_types(records.clone(), &allowed, false).unwrap();
        let a = bucket_by_period(&filtered, g, &opts);
        let b = bucket_by_period(&records, g, &opts);
        for (period, items) in &a.buckets {
            let expected: Vec<&PublicationRecord> =
                b.buckets[period].iter().copied().filter(|r| allowed.contains(&r.doc_type)).collect();
            prop_assert_eq!(items, &expected);
        }
        for (period, items) in &b.buckets {
            if !a.buckets.contains_key(period) {
                prop_assert!(items.iter().all(|r| !allowed.contains(&r.doc_type)));
            }
        }
    }

    #[test]
    fn buckets_partition_the_retained_records(seed in 0u64..10_000, monthly in any::<bool>(), january in any::<bool>()) {
        let records = corpus(seed, 60);
        let g = if monthly { Granularity::Month } else { Granularity::Year };
        let opts = BucketOptions {
            window: DateWindow::default(),
            missing_month: if january { MissingMonthPolicy::January } else { MissingMonthPolicy::Exclude },
        };
        let b = bucket_by_period(&records, g, &opts);
        prop_assert_eq!(b.retained() + b.warnings.len(), records.len());
        let mut ids = BTreeSet::new();
        for items in b.buckets.values() {
            prop_assert!(!items.is_empty());
            for r in items {
                prop_assert!(ids.insert(r.id.clone()), "record in two buckets");
            }
        }
        let keys: Vec<_> = b.buckets.keys().collect();
        prop_assert!(keys.windows(2).all(|w| w[0] < w[1]));
    }
}
