//! End-to-end acceptance battery.
//!
//! Each test covers one numbered criterion and prints a single
//! `criterion NN PASS — ...` / `criterion NN FAIL — ...` line (visible with
//! `cargo test --test acceptance -- --nocapture`; the test name itself also
//! identifies the criterion in the default harness output). Criterion 08
//! depends on an optional reference dataset and prints a SKIP line when the
//! file is absent.
//!
//! Criteria 3 and 4 compare the closed-form metrics against a deliberately
//! naive enumeration oracle written here from the scheme definitions alone:
//! padded lengths come from loops and literal case analysis, conditional
//! entropy from the grouped-by-observation formula, and k-anonymity from
//! explicit candidate sets. The two routes share no code.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, resume_unwind, UnwindSafe};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sucipad::freqdist::FrequencyTable;
use sucipad::metrics::{self, EvalRecord};
use sucipad::padding::SchemeInstance;
use sucipad::padding::SchemeKind;
use sucipad::suci::{self, ConcealmentScheme, HomeKeyPair, Nai};
use sucipad::sweep::{self, GridSpec, SweepConfig};

fn criterion<F: FnOnce() + UnwindSafe>(number: u32, summary: &str, body: F) {
    match catch_unwind(body) {
        Ok(()) => println!("criterion {number:02} PASS — {summary}"),
        Err(panic) => {
            println!("criterion {number:02} FAIL — {summary}");
            resume_unwind(panic);
        }
    }
}

/// Pseudo-random frequency tables from a fixed seed: `n` tables, lengths in
/// `1..=max_len`, up to `max_distinct` distinct lengths, counts in
/// `1..=max_count`.
fn seeded_tables(
    seed: u64,
    n: usize,
    max_len: u32,
    max_distinct: usize,
    max_count: u64,
) -> Vec<FrequencyTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let distinct = rng.gen_range(1..=max_distinct);
            let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
            while counts.len() < distinct {
                counts.insert(rng.gen_range(1..=max_len), rng.gen_range(1..=max_count));
            }
            FrequencyTable::from_counts(format!("t{i}"), counts).expect("generated table is valid")
        })
        .collect()
}

/// Hand-picked small tables exercising the shapes random draws rarely hit.
fn edge_tables() -> Vec<FrequencyTable> {
    vec![
        FrequencyTable::from_counts("edge-singleton", [(7u32, 5u64)]).unwrap(),
        FrequencyTable::from_counts(
            "edge-ones",
            [(1u32, 1u64), (2, 1), (3, 1), (4, 1), (5, 1), (6, 1)],
        )
        .unwrap(),
        FrequencyTable::from_counts("edge-skew", [(1u32, 1u64), (12, 1_000_000)]).unwrap(),
        FrequencyTable::from_counts("edge-pair", [(11u32, 3u64), (12, 3)]).unwrap(),
        FrequencyTable::from_counts(
            "edge-spread",
            [(1u32, 10u64), (3, 20), (5, 30), (7, 20), (9, 10), (12, 5)],
        )
        .unwrap(),
    ]
}

// ---------------------------------------------------------------------------
// Naive oracle: an independent second route to every metric.
// ---------------------------------------------------------------------------

/// A scheme restated as loops and literal case analysis.
#[derive(Debug, Clone, Copy)]
enum Naive {
    Identity,
    MaxL(u32),
    Blk(u32, u32),
    Pwr(u32, u32),
    RndBlk(u32, u32, u32),
    RndLen(u32),
    TaBlk(u32, u32, u32),
}

impl Naive {
    /// All padded lengths the scheme can emit for input length `u`
    /// (equiprobable), or `None` when the scheme rejects `u`.
    fn outcomes(self, u: u32) -> Option<Vec<u32>> {
        match self {
            Naive::Identity => Some(vec![u]),
            Naive::MaxL(len) => (u <= len).then(|| vec![len]),
            Naive::Blk(size, min) => {
                let mut p = u;
                while !p.is_multiple_of(size) {
                    p += 1;
                }
                Some(vec![p.max(min)])
            }
            Naive::Pwr(base, min) => {
                let mut p: u32 = 1;
                while p < u {
                    p *= base;
                }
                Some(vec![p.max(min)])
            }
            Naive::RndBlk(size, blocks, min) => {
                let base = Naive::Blk(size, min).outcomes(u).unwrap()[0];
                Some((0..blocks).map(|j| base + j * size).collect())
            }
            Naive::RndLen(len) => Some((u..=u + len).collect()),
            Naive::TaBlk(l, m, r) => {
                if u < l {
                    Some(vec![l])
                } else if u <= m {
                    Some(vec![u])
                } else if u <= r {
                    Some(vec![r])
                } else {
                    None
                }
            }
        }
    }
}

struct OracleMetrics {
    alpha1: f64,
    alpha2: u64,
    beta: f64,
}

/// Metrics by brute enumeration over person-classes × equiprobable choices.
/// `None` when the scheme rejects some length present in the table.
fn oracle_metrics(table: &FrequencyTable, naive: Naive) -> Option<OracleMetrics> {
    let total = table.population() as f64;
    // Joint weights grouped by padded length p: p -> [(u, Pr[U=u, P=p])].
    let mut by_p: BTreeMap<u32, Vec<(u32, f64)>> = BTreeMap::new();
    let mut expected_padded = 0.0;
    let mut expected_unpadded = 0.0;
    for (u, count) in table.iter() {
        let outs = naive.outcomes(u)?;
        let w = count as f64 / total;
        let mean = outs.iter().map(|&p| p as f64).sum::<f64>() / outs.len() as f64;
        expected_padded += w * mean;
        expected_unpadded += w * u as f64;
        let share = w / outs.len() as f64;
        for &p in &outs {
            by_p.entry(p).or_default().push((u, share));
        }
    }

    // H(U|P) as sum over observations p of Pr[p] * H(U | P = p).
    let mut alpha1 = 0.0;
    for weights in by_p.values() {
        let pr_p: f64 = weights.iter().map(|&(_, w)| w).sum();
        let mut h = 0.0;
        for &(_, w) in weights {
            let q = w / pr_p;
            if q > 0.0 {
                h -= q * q.log2();
            }
        }
        alpha1 += pr_p * h;
    }

    // k-anonymity: per reachable p, count every person whose length could
    // have produced p; take the minimum.
    let mut alpha2 = u64::MAX;
    for &p in by_p.keys() {
        let mut candidates = 0u64;
        for (u, count) in table.iter() {
            if naive.outcomes(u).unwrap().contains(&p) {
                candidates += count;
            }
        }
        alpha2 = alpha2.min(candidates);
    }

    Some(OracleMetrics {
        alpha1,
        alpha2,
        beta: expected_padded / expected_unpadded,
    })
}

/// Fixed battery of 42 instances covering every scheme kind, parameters
/// ≤ 16, each paired with its naive restatement.
fn battery() -> Vec<(SchemeInstance, Naive)> {
    let mut v = vec![
        (SchemeInstance::identity(), Naive::Identity),
        (SchemeInstance::max_l(12).unwrap(), Naive::MaxL(12)),
        (SchemeInstance::max_l(16).unwrap(), Naive::MaxL(16)),
    ];
    for (size, min) in [
        (1, 1),
        (2, 2),
        (2, 4),
        (3, 3),
        (4, 4),
        (4, 8),
        (5, 10),
        (8, 8),
        (8, 16),
        (16, 16),
    ] {
        v.push((
            SchemeInstance::blk(size, min).unwrap(),
            Naive::Blk(size, min),
        ));
    }
    for (base, min) in [(2, 1), (2, 2), (2, 8), (3, 1), (3, 3), (4, 4), (2, 16)] {
        v.push((
            SchemeInstance::pwr(base, min).unwrap(),
            Naive::Pwr(base, min),
        ));
    }
    for (size, blocks, min) in [
        (2, 2, 2),
        (2, 3, 4),
        (3, 2, 3),
        (4, 2, 4),
        (4, 3, 8),
        (1, 4, 1),
        (5, 2, 5),
    ] {
        v.push((
            SchemeInstance::rnd_blk(size, blocks, min).unwrap(),
            Naive::RndBlk(size, blocks, min),
        ));
    }
    for len in [0, 1, 2, 3, 5, 8, 16] {
        v.push((SchemeInstance::rnd_len(len), Naive::RndLen(len)));
    }
    for (l, m, r) in [
        (1, 12, 12),
        (2, 6, 12),
        (4, 8, 12),
        (6, 12, 16),
        (3, 3, 12),
        (12, 12, 12),
        (2, 4, 16),
        (1, 1, 16),
    ] {
        v.push((
            SchemeInstance::ta_blk(l, m, r).unwrap(),
            Naive::TaBlk(l, m, r),
        ));
    }
    assert_eq!(v.len(), 42);
    v
}

// ---------------------------------------------------------------------------
// Criteria.
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_delta_worked_example() {
    criterion(1, "delta(1.0, 3.0, 4.0) equals sqrt(2) to 1e-9", || {
        let d = metrics::delta(1.0, 3.0, 4.0);
        assert!(
            (d - 2f64.sqrt()).abs() <= 1e-9,
            "delta(1, 3, 4) = {d}, want sqrt(2)"
        );
    });
}

#[test]
fn criterion_02_endpoint_identities() {
    criterion(
        2,
        "identity and maxL hit their closed-form endpoints on 60 tables",
        || {
            let tables = seeded_tables(0x02, 60, 50, 12, 1_000_000);
            assert!(tables.len() >= 50);
            for t in &tables {
                let ident = metrics::evaluate(t, &SchemeInstance::identity()).unwrap();
                assert!(
                    ident.alpha1.abs() <= 1e-9,
                    "identity alpha1 = {} on {}",
                    ident.alpha1,
                    t.label()
                );
                assert!(
                    (ident.beta - 1.0).abs() <= 1e-9,
                    "identity beta = {} on {}",
                    ident.beta,
                    t.label()
                );
                assert_eq!(
                    ident.alpha2,
                    t.min_class().unwrap().1,
                    "identity alpha2 should be the least-common-length count on {}",
                    t.label()
                );

                let cap = SchemeInstance::max_l(t.max_length().unwrap()).unwrap();
                let capped = metrics::evaluate(t, &cap).unwrap();
                assert!(
                    (capped.alpha1 - t.entropy()).abs() <= 1e-9,
                    "maxL alpha1 = {} but H(U) = {} on {}",
                    capped.alpha1,
                    t.entropy(),
                    t.label()
                );
                assert_eq!(
                    capped.alpha2,
                    t.population(),
                    "maxL alpha2 should be the whole population on {}",
                    t.label()
                );
            }
        },
    );
}

#[test]
fn criterion_03_oracle_equivalence() {
    criterion(
        3,
        "alpha1/alpha2/beta match the brute-force oracle on 305 tables x 42 instances",
        || {
            let mut tables = seeded_tables(0x03, 300, 12, 6, 50);
            tables.extend(edge_tables());
            let battery = battery();
            for t in &tables {
                for (inst, naive) in &battery {
                    match oracle_metrics(t, *naive) {
                        None => assert!(
                            metrics::evaluate(t, inst).is_err(),
                            "{} on {}: oracle says inapplicable, evaluate succeeded",
                            inst.code(),
                            t.label()
                        ),
                        Some(o) => {
                            let r = metrics::evaluate(t, inst).unwrap_or_else(|e| {
                                panic!("{} on {}: {e}", inst.code(), t.label())
                            });
                            assert!(
                                (r.alpha1 - o.alpha1).abs() <= 1e-9,
                                "alpha1 {} vs oracle {} for {} on {}",
                                r.alpha1,
                                o.alpha1,
                                inst.code(),
                                t.label()
                            );
                            assert_eq!(
                                r.alpha2,
                                o.alpha2,
                                "alpha2 mismatch for {} on {}",
                                inst.code(),
                                t.label()
                            );
                            assert!(
                                (r.beta - o.beta).abs() <= 1e-9,
                                "beta {} vs oracle {} for {} on {}",
                                r.beta,
                                o.beta,
                                inst.code(),
                                t.label()
                            );
                        }
                    }
                }
            }
        },
    );
}

#[test]
fn criterion_04_chain_rule() {
    criterion(
        4,
        "deterministic schemes satisfy alpha1 = H(U) - H(P) on 200 tables",
        || {
            let tables = seeded_tables(0x04, 200, 50, 12, 1_000_000);
            let deterministic: Vec<(SchemeInstance, Naive)> = battery()
                .into_iter()
                .filter(|(inst, _)| inst.is_deterministic())
                .collect();
            for t in &tables {
                let h_u = t.entropy();
                let max = t.max_length().unwrap();
                let mut pairs = deterministic.clone();
                pairs.push((SchemeInstance::max_l(max).unwrap(), Naive::MaxL(max)));
                for (inst, naive) in &pairs {
                    // H(P) by the naive route: deterministic schemes induce a
                    // padded-length histogram directly.
                    let mut padded_counts: BTreeMap<u32, u64> = BTreeMap::new();
                    let mut applicable = true;
                    for (u, count) in t.iter() {
                        match naive.outcomes(u) {
                            Some(outs) => {
                                assert_eq!(outs.len(), 1);
                                *padded_counts.entry(outs[0]).or_insert(0) += count;
                            }
                            None => {
                                applicable = false;
                                break;
                            }
                        }
                    }
                    if !applicable {
                        assert!(metrics::evaluate(t, inst).is_err());
                        continue;
                    }
                    let total = t.population() as f64;
                    let h_p = -padded_counts
                        .values()
                        .map(|&c| {
                            let q = c as f64 / total;
                            q * q.log2()
                        })
                        .sum::<f64>();
                    let r = metrics::evaluate(t, inst).unwrap();
                    assert!(
                        (r.alpha1 - (h_u - h_p)).abs() <= 1e-9,
                        "chain rule broken for {} on {}: alpha1 {} vs H(U)-H(P) {}",
                        inst.code(),
                        t.label(),
                        r.alpha1,
                        h_u - h_p
                    );
                }
            }
        },
    );
}

#[test]
fn criterion_05_metric_bounds() {
    criterion(
        5,
        "alpha2 >= min class, beta >= 1, 0 <= alpha1 <= H(U) across the property suite",
        || {
            let mut tables = seeded_tables(0x05, 150, 12, 6, 50);
            tables.extend(seeded_tables(0x55, 100, 50, 12, 1_000_000));
            tables.extend(edge_tables());
            let battery = battery();
            for t in &tables {
                let min_class = t.min_class().unwrap().1;
                let h_u = t.entropy();
                let max = t.max_length().unwrap();
                let mut instances: Vec<SchemeInstance> =
                    battery.iter().map(|(inst, _)| *inst).collect();
                instances.push(SchemeInstance::max_l(max).unwrap());
                for inst in &instances {
                    let Ok(r) = metrics::evaluate(t, inst) else {
                        continue;
                    };
                    assert!(
                        r.alpha2 >= min_class,
                        "alpha2 {} below min class {} for {} on {}",
                        r.alpha2,
                        min_class,
                        inst.code(),
                        t.label()
                    );
                    assert!(
                        r.beta >= 1.0 - 1e-12,
                        "beta {} below 1 for {} on {}",
                        r.beta,
                        inst.code(),
                        t.label()
                    );
                    assert!(
                        r.alpha1 >= 0.0 && r.alpha1 <= h_u + 1e-9,
                        "alpha1 {} outside [0, H(U)={}] for {} on {}",
                        r.alpha1,
                        h_u,
                        inst.code(),
                        t.label()
                    );
                }
            }
        },
    );
}

#[test]
fn criterion_06_sampled_lengths_match_analytic_support() {
    criterion(
        6,
        "10^4 seeded draws per randomized instance stay in support, frequencies within 5 sigma",
        || {
            const DRAWS: usize = 10_000;
            let mut rng = ChaCha8Rng::seed_from_u64(0x06);
            let randomized: Vec<(SchemeInstance, Naive)> = battery()
                .into_iter()
                .filter(|(inst, _)| !inst.is_deterministic())
                .collect();
            for (inst, _) in &randomized {
                for u in [1u32, 7, 12] {
                    let dist = inst.padded_length(u).unwrap();
                    let plaintext = vec![b'x'; u as usize];
                    let mut freq: BTreeMap<u32, usize> = BTreeMap::new();
                    for _ in 0..DRAWS {
                        let padded = inst.pad_bytes(&plaintext, &mut rng).unwrap();
                        *freq.entry(padded.len() as u32).or_insert(0) += 1;
                    }
                    for &len in freq.keys() {
                        assert!(
                            dist.contains(len),
                            "sampled length {len} outside analytic support of {} at u={u}",
                            inst.code()
                        );
                    }
                    for &(len, p) in dist.support() {
                        let observed = *freq.get(&len).unwrap_or(&0) as f64;
                        let mean = DRAWS as f64 * p;
                        let sigma = (DRAWS as f64 * p * (1.0 - p)).sqrt();
                        assert!(
                            (observed - mean).abs() <= 5.0 * sigma + 1e-9,
                            "{} at u={u}: length {len} observed {observed} times, expected {mean} (sigma {sigma})",
                            inst.code()
                        );
                    }
                }
            }
        },
    );
}

#[test]
fn criterion_07_suci_round_trip_and_length_leak() {
    criterion(
        7,
        "1000 NAIs round-trip under {null, profileA} x {identity, blk-8-8, taBlk-6-15-30}",
        || {
            const CHARS: &[u8] =
                b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789._-";
            let mut rng = ChaCha8Rng::seed_from_u64(0x07);
            let home = HomeKeyPair::generate(&mut rng);
            let pads = [
                SchemeInstance::parse("identity").unwrap(),
                SchemeInstance::parse("blk-8-8").unwrap(),
                SchemeInstance::parse("taBlk-6-15-30").unwrap(),
            ];
            for _ in 0..1000 {
                let len: u32 = rng.gen_range(1..=30);
                let username: String = (0..len)
                    .map(|_| CHARS[rng.gen_range(0..CHARS.len())] as char)
                    .collect();
                let nai = Nai::new(&username, "operator.example").unwrap();
                for scheme in [ConcealmentScheme::Null, ConcealmentScheme::ProfileA] {
                    for pad in &pads {
                        let msg =
                            suci::conceal(&nai, scheme, pad, home.public(), 3, "421", &mut rng)
                                .unwrap();
                        let back = suci::reveal(&msg, pad, home.secret()).unwrap();
                        assert_eq!(back.username(), nai.username());
                        assert_eq!(back.realm(), nai.realm());

                        let observed = suci::observed_length(&msg);
                        match pad.code().as_str() {
                            // The unpadded pitfall: ciphertext length equals
                            // username length, for both profiles.
                            "identity" => assert_eq!(observed, len),
                            "taBlk-6-15-30" => assert!(
                                (6..=15).contains(&observed) || observed == 30,
                                "taBlk-6-15-30 emitted length {observed}"
                            ),
                            _ => {}
                        }
                    }
                }
            }
        },
    );
}

#[test]
fn criterion_08_reference_dataset_reproduction() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/scb_name_length_data_Sweden_Stockholm_2019.csv");
    if !path.exists() {
        println!(
            "criterion 08 SKIP — optional dataset data/scb_name_length_data_Sweden_Stockholm_2019.csv not present"
        );
        return;
    }
    criterion(
        8,
        "Swe-fl: unpadded k-anonymity 3; some default-grid taBlk has beta <= 1.1 and alpha2 >= 10000",
        move || {
            let table = FrequencyTable::from_csv_path(&path, "Swe-fl").unwrap();
            assert_eq!(
                table.min_class().unwrap().1,
                3,
                "least-common first-name length should have exactly 3 bearers"
            );
            let cfg = SweepConfig {
                datasets: vec![table.clone()],
                grid: GridSpec::default_grid(table.max_length().unwrap()),
                beta_cap: None,
                k_threshold: None,
            };
            let instances = sweep::expand_grid(&cfg).unwrap();
            let found = instances
                .iter()
                .filter(|inst| inst.kind() == SchemeKind::TaBlk)
                .any(|inst| {
                    metrics::evaluate(&table, inst)
                        .is_ok_and(|r| r.beta <= 1.1 && r.alpha2 >= 10_000)
                });
            assert!(
                found,
                "no default-grid taBlk reaches beta <= 1.1 with alpha2 >= 10000 on Swe-fl"
            );
        },
    );
}

#[test]
fn criterion_09_tail_aware_wins_on_company_like_table() {
    criterion(
        9,
        "company-like table: identity alpha2 = 1; threshold winner is a taBlk beating all blk/pwr/maxL",
        || {
            let path =
                Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/synthetic_company.csv");
            let table = FrequencyTable::from_csv_path(&path, "Comp-syn").unwrap();
            assert_eq!(
                metrics::evaluate(&table, &SchemeInstance::identity())
                    .unwrap()
                    .alpha2,
                1,
                "unpadded table should single out at least one person"
            );

            let cfg = SweepConfig {
                datasets: vec![table.clone()],
                grid: GridSpec::default_grid(table.max_length().unwrap()),
                beta_cap: None,
                k_threshold: Some(100),
            };
            let report = sweep::evaluate_all(&cfg).unwrap();
            let winner = report
                .winners
                .by_threshold
                .get("Comp-syn")
                .expect("a record meets the k=100 threshold");
            assert_eq!(
                winner.scheme.kind(),
                SchemeKind::TaBlk,
                "threshold winner is {}, expected a taBlk",
                winner.scheme.code()
            );
            let direct = sweep::best_by_threshold(&report.records, "Comp-syn", 100).unwrap();
            assert_eq!(direct, winner);

            let rivals: Vec<&EvalRecord> = report
                .records
                .iter()
                .filter(|r| {
                    r.alpha2 >= 100
                        && matches!(
                            r.scheme.kind(),
                            SchemeKind::Blk | SchemeKind::Pwr | SchemeKind::MaxL
                        )
                })
                .collect();
            assert!(
                !rivals.is_empty(),
                "comparison is vacuous: no blk/pwr/maxL record meets the threshold"
            );
            for rival in &rivals {
                assert!(
                    winner.beta < rival.beta,
                    "winner {} (beta {}) does not beat {} (beta {})",
                    winner.scheme.code(),
                    winner.beta,
                    rival.scheme.code(),
                    rival.beta
                );
            }
        },
    );
}
