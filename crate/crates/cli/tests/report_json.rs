use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::test_runner::Config;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treeprune_cli::report::{OracleSummary, SelectorVerdict, Stats, Step, Timing, SCHEMA};
use treeprune_cli::{Report, SiteReport, Status};

fn text(rng: &mut ChaCha8Rng) -> String {
    let pool = [
        "a",
        ".warn",
        "#x y",
        "é",
        "\"q\"",
        "\\",
        "\n",
        "{}",
        "(down* s)",
        "ε",
        "",
    ];
    (0..rng.gen_range(0..4))
        .map(|_| *pool.choose(rng).unwrap())
        .collect()
}

fn opt<T>(rng: &mut ChaCha8Rng, f: impl FnOnce(&mut ChaCha8Rng) -> T) -> Option<T> {
    if rng.gen_bool(0.5) {
        Some(f(rng))
    } else {
        None
    }
}

fn report(rng: &mut ChaCha8Rng, page: String) -> Report {
    let selectors = (0..rng.gen_range(0..5))
        .map(|i| SelectorVerdict {
            name: format!("s{i}"),
            selector: text(rng),
            source: Some("shared.css".into()),
            line: Some(rng.gen_range(1..4)),
            status: *[Status::Redundant, Status::Reachable, Status::Unsupported]
                .choose(rng)
                .unwrap(),
            notes: (0..rng.gen_range(0..2)).map(|_| text(rng)).collect(),
            witness: opt(rng, |r| {
                (0..r.gen_range(0..3))
                    .map(|_| Step {
                        node: text(r),
                        rule: text(r),
                        synthetic: r.gen_bool(0.5),
                    })
                    .collect()
            }),
        })
        .collect();
    let mut r = Report {
        schema: SCHEMA,
        tool: "treeprune test".into(),
        command: "analyze".into(),
        inputs: vec![page],
        bound: opt(rng, |r| r.gen_range(0..9)),
        selectors,
        stats: Stats {
            nodes: rng.gen_range(0..50),
            rules: rng.gen_range(0..50),
            ..Stats::default()
        },
        warnings: (0..rng.gen_range(0..3)).map(|_| text(rng)).collect(),
        oracle: opt(rng, |r| OracleSummary {
            method: text(r),
            trees: r.gen_range(0..100),
            exhausted: r.gen_bool(0.5),
            confirmed: r.gen_range(0..5),
        }),
        timings: opt(rng, |r| {
            vec![Timing {
                phase: text(r),
                micros: r.gen(),
            }]
        }),
        dumps: (0..rng.gen_range(0..2))
            .map(|_| (text(rng), text(rng)))
            .collect::<BTreeMap<_, _>>(),
    };
    r.tally();
    r
}

proptest! {
    #![proptest_config(Config { cases: 500, ..Config::default() })]

    #[test]
    fn reports_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = report(&mut rng, "p.html".into());
        let back: Report = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        prop_assert_eq!(&back, &r);
        let pretty: Report = serde_json::from_str(&serde_json::to_string_pretty(&r).unwrap()).unwrap();
        prop_assert_eq!(pretty, r);
    }

    #[test]
    fn site_reports_round_trip_and_intersect(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pages: Vec<Report> = (0..rng.gen_range(2..4)).map(|i| report(&mut rng, format!("p{i}.html"))).collect();
        let site = SiteReport::collate(pages);
        let back: SiteReport = serde_json::from_str(&serde_json::to_string(&site).unwrap()).unwrap();
        prop_assert_eq!(&back, &site);
        for v in site.selectors.iter().filter(|v| v.status == Status::Redundant) {
            for p in &site.pages {
                for pv in p.selectors.iter().filter(|x| x.selector == v.selector && x.line == Some(v.line)) {
                    prop_assert_eq!(pv.status, Status::Redundant);
                }
            }
        }
        let loaded: usize = site.selectors.iter().map(|v| v.pages.len()).sum();
        prop_assert!(loaded >= site.stats.selectors);
    }
}
