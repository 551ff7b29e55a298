//! Acceptance gate: one PASS/FAIL line per criterion, each checked against
//! its tolerance and runtime budget. Run with
//! `cargo test -p growai --test acceptance`.

#[path = "../../core/tests/support/oracles.rs"]
mod oracles;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use chrono::{TimeZone, Utc};
use growai_core::campaign::{finalize_campaign, Campaign, CampaignError, CampaignResult, CampaignVerdict, EntityKind};
use growai_core::decimal::{validate_score, Exact, Tenths, Thousandths};
use growai_core::journal::{
    coverage_table, parse_journal, serialize_journal, EvidenceCategory, GateSeverity, Journal, JournalEntry,
    SafetyGateEvent, Timestamp,
};
use growai_core::rubric::{default_weights, ArenaId, Criterion, WeightSet, WeightVector};
use growai_core::scoring::{apply_gates, criterion_composite, parse_sheet_document, score_run, RunResult, RunVerdict, ScoreSheet};
use growai_core::weights::{
    ahp_weights, derive_random_index, feasible_weights, fit_objective, fit_weights, fit_weights_report, random_index,
    CalibrationObservation, PairwiseMatrix,
};
use num_rational::Ratio;
use oracles::{brute_force_fit, continuous_fit, decimal_composite, dense_lambda_max, dense_principal_eigen, Obs};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn t(v: u8) -> Tenths {
    Tenths::new(v).unwrap()
}

fn random_tenths(rng: &mut ChaCha8Rng, lo: u8) -> [Tenths; 24] {
    std::array::from_fn(|_| t(rng.random_range(lo..=30)))
}

fn sheet(evaluator: &str, run: &str, tenths: [Tenths; 24]) -> ScoreSheet {
    ScoreSheet::from_tenths(evaluator, "bot", run, tenths).unwrap()
}

fn random_gates(rng: &mut ChaCha8Rng) -> Vec<SafetyGateEvent> {
    let arenas: Vec<ArenaId> = ArenaId::all().collect();
    (0..rng.random_range(0..4))
        .map(|k| {
            let reject = rng.random_bool(0.2);
            SafetyGateEvent {
                gate_id: format!("g{k}"),
                severity: if reject { GateSeverity::Reject } else { GateSeverity::Cap },
                scope: if reject {
                    vec![]
                } else {
                    (0..rng.random_range(1..5)).map(|_| arenas[rng.random_range(0..24)]).collect()
                },
                evidence_entry: String::new(),
                note: String::new(),
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------

fn golden_weights() -> Outcome {
    let published: [(Criterion, [&str; 4]); 6] = [
        (Criterion::C1, ["0.25", "0.30", "0.25", "0.20"]),
        (Criterion::C2, ["0.30", "0.25", "0.20", "0.25"]),
        (Criterion::C3, ["0.35", "0.25", "0.20", "0.20"]),
        (Criterion::C4, ["0.30", "0.25", "0.25", "0.20"]),
        (Criterion::C5, ["0.30", "0.25", "0.20", "0.25"]),
        (Criterion::C6, ["0.30", "0.25", "0.25", "0.20"]),
    ];
    for (c, text) in published {
        let want: Vec<Ratio<i128>> = text.iter().map(|s| oracles::decimal_text(s)).collect();
        let got: Vec<Ratio<i128>> = default_weights(c)
            .hundredths()
            .iter()
            .map(|&h| Ratio::new(i128::from(h), 100))
            .collect();
        ensure!(got == want, "{c}: {got:?} != {want:?}");
        let sum: Ratio<i128> = got.iter().sum();
        ensure!(sum == Ratio::from_integer(1), "{c} sums to {sum}");
    }
    Ok("6 vectors exact, each sums to 1".into())
}

fn composite_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let feasible: Vec<[u8; 4]> = feasible_weights().collect();
    let n = 12_000;
    for i in 0..n {
        let s = sheet("E", "r", random_tenths(&mut rng, 10));
        let c = Criterion::ALL[i % 6];
        // half with the published weights, half with random feasible ones
        let w = if i % 2 == 0 {
            default_weights(c)
        } else {
            WeightVector::new(c, feasible[rng.random_range(0..feasible.len())]).unwrap()
        };
        let got = criterion_composite(c, &s, &w).map_err(|e| e.to_string())?;
        let wt = w.hundredths().map(|h| format!("0.{h:02}"));
        let st = c.arenas().map(|a| s.value(a).to_string());
        let want = decimal_composite(&wt, &st);
        ensure!(
            Ratio::new(i128::from(got.value.0), 1000) == want,
            "sheet {i} {c}: {} != {want}",
            got.value
        );
    }
    Ok(format!("{n} sheets, exact to the thousandth"))
}

fn rule_suite() -> Outcome {
    // grid
    let mut accepted = Vec::new();
    for k in 0..=500u32 {
        for text in [format!("{}.{}", k / 100, (k % 100) / 10), format!("{}.{:02}", k / 100, k % 100)] {
            if let Ok(v) = validate_score(&text) {
                accepted.push(v);
            }
        }
    }
    accepted.sort();
    accepted.dedup();
    let grid: Vec<Tenths> = (10..=30).map(t).collect();
    ensure!(accepted == grid, "accepted values {accepted:?}");
    for junk in ["", "abc", "NaN", "2.45", "0.9", "3.1", "-2.0", "2.0.0"] {
        ensure!(validate_score(junk).is_err(), "accepted `{junk}`");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let cases = 20_000;
    for i in 0..cases {
        let s = sheet("E", "r", random_tenths(&mut rng, 10));
        let gates = random_gates(&mut rng);
        let (g1, rejected_by) = apply_gates(&s, &gates).map_err(|e| e.to_string())?;
        let (g2, _) = apply_gates(&g1, &gates).map_err(|e| e.to_string())?;
        ensure!(g1 == g2, "case {i}: gating not idempotent");
        for a in ArenaId::all() {
            let in_scope = gates.iter().any(|g| g.severity == GateSeverity::Cap && g.scope.contains(&a));
            let want = if in_scope { s.value(a).min(Tenths::FLOOR) } else { s.value(a) };
            ensure!(g1.value(a) == want, "case {i}: {a} capped to {}", g1.value(a));
            ensure!(g1.value(a) <= s.value(a), "case {i}: {a} raised");
        }
        let run = score_run(&s, &gates, &WeightSet::prior()).map_err(|e| e.to_string())?;
        let any_reject = gates.iter().any(|g| g.severity == GateSeverity::Reject);
        ensure!(rejected_by.is_some() == any_reject, "case {i}: rejected_by {rejected_by:?}");
        let any_low = g1.scores().any(|x| x.value < Tenths::FLOOR);
        let want = if any_reject {
            RunVerdict::Rejected
        } else if any_low {
            RunVerdict::Knockout
        } else {
            RunVerdict::Ok
        };
        ensure!(run.verdict == want, "case {i}: verdict {} want {want}", run.verdict);
        // GUI is the exact mean of six oracle composites
        let mean: Ratio<i128> = Criterion::ALL
            .iter()
            .map(|&c| {
                let wt = default_weights(c).hundredths().map(|h| format!("0.{h:02}"));
                decimal_composite(&wt, &c.arenas().map(|a| g1.value(a).to_string()))
            })
            .sum::<Ratio<i128>>()
            / Ratio::from_integer(6);
        let gui = Ratio::new(i128::from(*run.run_gui.0.numer()), i128::from(*run.run_gui.0.denom()));
        ensure!(gui == mean, "case {i}: GUI {gui} != {mean}");
    }

    // pass threshold, boundary included
    let verdict_at = |tenths: [Tenths; 24]| -> Result<CampaignResult, String> {
        let mut c = Campaign::new("camp", "bot", EntityKind::SoftwareAgent).unwrap();
        for i in 0..10 {
            let run = score_run(&sheet(&format!("E{i}"), &format!("r{i}"), tenths), &[], &WeightSet::prior())
                .map_err(|e| e.to_string())?;
            c.add_run(run).map_err(|e| e.to_string())?;
        }
        finalize_campaign(&c, &WeightSet::prior()).map_err(|e| e.to_string())
    };
    let at = verdict_at([t(24); 24])?;
    ensure!(
        at.grow_up_index == Exact::new(12, 5) && at.verdict == CampaignVerdict::Passed,
        "GUI 2.4 gave {}",
        at.verdict
    );
    let below = verdict_at([t(23); 24])?;
    ensure!(below.verdict == CampaignVerdict::FailedThreshold, "GUI 2.3 gave {}", below.verdict);
    let mut mixed = [t(24); 24];
    for a in Criterion::C6.arenas() {
        mixed[ArenaId::all().position(|x| x == a).unwrap()] = t(26);
    }
    let r = verdict_at(mixed)?;
    ensure!(r.grow_up_index == Exact::new(146, 60), "14.6/6 fixture gave {}", r.grow_up_index);
    ensure!(r.grow_up_index.round_half_up(2) == "2.43", "displayed {}", r.grow_up_index.round_half_up(2));
    Ok(format!("21-value grid, {cases} gated sheets, pass boundary 2.4 PASSED"))
}

fn campaign_protocol() -> Outcome {
    let run = |i: usize, tenths: [Tenths; 24], gates: &[SafetyGateEvent]| -> RunResult {
        score_run(&sheet(&format!("E{i:02}"), &format!("run-{i:02}"), tenths), gates, &WeightSet::prior()).unwrap()
    };
    let mut nine = Campaign::new("camp", "bot", EntityKind::SoftwareAgent).unwrap();
    for i in 0..9 {
        nine.add_run(run(i, [t(30); 24], &[])).unwrap();
    }
    ensure!(
        matches!(nine.finalize(None), Err(CampaignError::InsufficientRuns { have: 9, need: 10 })),
        "9 runs were finalized"
    );
    let mut dup = run(3, [t(30); 24], &[]);
    dup.run_id = "another".into();
    ensure!(
        matches!(nine.add_run(dup), Err(CampaignError::DuplicateEvaluator(_))),
        "duplicate evaluator accepted"
    );

    // A2.AD averaging 1.95, everything else 3.0
    let ad = ArenaId::parse("A2.AD").unwrap();
    let ad_idx = ArenaId::all().position(|a| a == ad).unwrap();
    let mut c = Campaign::new("ad-195", "bot", EntityKind::SoftwareAgent).unwrap();
    for i in 0..10 {
        let mut tenths = [t(30); 24];
        tenths[ad_idx] = t(if i < 5 { 19 } else { 20 });
        c.add_run(run(i, tenths, &[])).unwrap();
    }
    let r = c.finalize(None).map_err(|e| e.to_string())?;
    ensure!(r.final_arena_means[&ad] == Exact::new(39, 20), "AD mean {}", r.final_arena_means[&ad]);
    ensure!(
        r.verdict == CampaignVerdict::FailedElimination && r.eliminated_arenas == [ad],
        "AD fixture: {} {:?}",
        r.verdict,
        r.eliminated_arenas
    );
    ensure!(matches!(c.finalize(None), Err(CampaignError::CampaignFinalized)), "finalized twice");

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let campaigns = 1_000;
    for k in 0..campaigns {
        let mut c = Campaign::new("camp", "bot", EntityKind::SoftwareAgent).unwrap();
        let n = rng.random_range(10..=16);
        for i in 0..n {
            let tenths = random_tenths(&mut rng, 10);
            let gates = if rng.random_bool(0.2) { random_gates(&mut rng) } else { vec![] };
            c.add_run(run(i, tenths, &gates)).unwrap();
        }
        let result = finalize_campaign(&c, &WeightSet::prior()).map_err(|e| e.to_string())?;
        for (j, criterion) in Criterion::ALL.into_iter().enumerate() {
            let sum: i64 = c.runs.iter().map(|r| r.composites[j].value.0).sum();
            let mean_of_composites = Exact::new(sum, 1000 * n as i64);
            ensure!(
                mean_of_composites == result.final_composites[&criterion],
                "campaign {k} {criterion}: {mean_of_composites} != {}",
                result.final_composites[&criterion]
            );
        }
    }
    Ok(format!("<10 and duplicate refused, AD 1.95 eliminated, {campaigns} random campaigns exact"))
}

fn scale() -> Vec<f64> {
    let mut v: Vec<f64> = (2..=9).map(|k| 1.0 / f64::from(k)).collect();
    v.push(1.0);
    v.extend((2..=9).map(f64::from));
    v
}

fn ahp() -> Outcome {
    let uniform = ahp_weights(&PairwiseMatrix::new(vec![vec![1.0; 4]; 4]).unwrap()).map_err(|e| e.to_string())?;
    ensure!(
        uniform.weights.iter().all(|w| (w - 0.25).abs() < 1e-8) && uniform.cr.abs() < 1e-8,
        "uniform: {uniform:?}"
    );
    for c in Criterion::ALL {
        let w: Vec<f64> = default_weights(c).hundredths().iter().map(|&h| f64::from(h) / 100.0).collect();
        let r = ahp_weights(&PairwiseMatrix::consistent(&w).unwrap()).map_err(|e| e.to_string())?;
        let err = r.weights.iter().zip(&w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure!(err < 1e-8, "{c}: weight error {err:e}");
        ensure!((r.lambda_max - 4.0).abs() < 1e-8, "{c}: lambda {}", r.lambda_max);
    }

    let scale = scale();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut worst = 0.0f64;
    for _ in 0..2_000 {
        let n = rng.random_range(3..=8);
        let upper: Vec<f64> = (0..n * (n - 1) / 2).map(|_| scale[rng.random_range(0..scale.len())]).collect();
        let m = PairwiseMatrix::from_upper(n, upper).unwrap();
        let r = ahp_weights(&m).map_err(|e| e.to_string())?;
        let (lambda, v) = dense_principal_eigen(m.cells());
        let err = r.weights.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold((r.lambda_max - lambda).abs(), f64::max);
        worst = worst.max(err);
    }
    ensure!(worst < 1e-6, "dense oracle disagreement {worst:e}");

    // random index: independent Monte Carlo with a dense eigensolver
    let samples = 100_000;
    let mut line = Vec::new();
    for n in 3..=7usize {
        let mut rng = ChaCha8Rng::seed_from_u64(2026 + n as u64);
        let mut total = 0.0;
        let mut cells = vec![vec![1.0; n]; n];
        for _ in 0..samples {
            for i in 0..n {
                for j in i + 1..n {
                    let x = scale[rng.random_range(0..scale.len())];
                    cells[i][j] = x;
                    cells[j][i] = 1.0 / x;
                }
            }
            let lambda = dense_lambda_max(&cells).max(n as f64);
            total += (lambda - n as f64) / (n as f64 - 1.0);
        }
        let oracle = total / samples as f64;
        let shipped = random_index(n).map_err(|e| e.to_string())?;
        let library = derive_random_index(n, samples, 7).map_err(|e| e.to_string())?.mean_ci;
        ensure!((oracle - shipped).abs() <= 0.05, "n={n}: oracle {oracle:.4} vs shipped {shipped:.4}");
        ensure!((library - shipped).abs() <= 0.05, "n={n}: library {library:.4} vs shipped {shipped:.4}");
        line.push(format!("n{n} {oracle:.3}/{shipped:.3}"));
    }
    Ok(format!("dense max err {worst:.1e}; RI oracle/shipped {}", line.join(" ")))
}

fn obs(c: Criterion, scores: [u8; 4], target: i64) -> CalibrationObservation {
    CalibrationObservation {
        criterion: c,
        arena_scores: scores.map(t),
        target: Thousandths(target),
    }
}

fn to_oracle(o: &[CalibrationObservation]) -> Vec<Obs> {
    o.iter()
        .map(|x| Obs {
            scores: x.arena_scores.map(|s| i64::from(s.get())),
            target: x.target.0,
        })
        .collect()
}

fn weight_fitting() -> Outcome {
    let raw = std::fs::read(fixtures().join("calibration/c1_exact.json")).map_err(|e| e.to_string())?;
    let exact: Vec<CalibrationObservation> = serde_json::from_slice(&raw).map_err(|e| e.to_string())?;
    let (oracle, best) = brute_force_fit(&to_oracle(&exact), [25, 25, 25, 25]);
    ensure!(oracle == [25, 30, 25, 20] && best == 0, "oracle found {oracle:?} ({best})");
    let flat = WeightVector::new(Criterion::C1, [25, 25, 25, 25]).unwrap();
    let fitted = fit_weights(Criterion::C1, &exact, &flat).map_err(|e| e.to_string())?;
    ensure!(fitted.hundredths() == [25, 30, 25, 20], "fit {:?}", fitted.hundredths());

    for c in Criterion::ALL {
        let degenerate = [obs(c, [22; 4], 2200)];
        let w = fit_weights(c, &degenerate, &default_weights(c)).map_err(|e| e.to_string())?;
        ensure!(w == default_weights(c), "{c}: degenerate fit moved to {:?}", w.hundredths());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let trials = 60;
    for k in 0..trials {
        let c = Criterion::ALL[k % 6];
        let truth = default_weights(c).hundredths().map(i64::from);
        let data: Vec<_> = (0..rng.random_range(4..20))
            .map(|_| {
                let s: [u8; 4] = std::array::from_fn(|_| rng.random_range(10..=30));
                let y: i64 = (0..4).map(|i| truth[i] * i64::from(s[i])).sum::<i64>() + rng.random_range(-120..=120);
                obs(c, s, y.clamp(1000, 3000))
            })
            .collect();
        let report = fit_weights_report(c, &data, &default_weights(c)).map_err(|e| e.to_string())?;
        let o = to_oracle(&data);
        let (grid, grid_obj) = brute_force_fit(&o, truth);
        ensure!(report.objective == grid_obj, "trial {k}: objective {} vs grid {grid_obj}", report.objective);
        ensure!(report.weights.hundredths().map(i64::from) == grid, "trial {k}: tie broken differently");
        let (wc, fc) = continuous_fit(&o);
        ensure!(fc <= grid_obj as f64 * (1.0 + 1e-9) + 1e-6, "trial {k}: grid beats the relaxation");
        let near = feasible_weights()
            .filter(|w| w.iter().zip(&wc).all(|(&a, &b)| (f64::from(a) - b).abs() <= 1.0 + 1e-9))
            .map(|w| fit_objective(&w, &data))
            .min()
            .ok_or("no grid point within one step")?;
        ensure!(report.objective <= near, "trial {k}: not within one grid step of the continuous optimum");
    }
    Ok(format!("exact C1 recovery, degenerate keeps prior, {trials} noisy fits equal the grid optimum"))
}

fn journal_robustness() -> Outcome {
    let mut corpus = Vec::new();
    for e in std::fs::read_dir(fixtures().join("journals")).map_err(|e| e.to_string())? {
        let p = e.map_err(|e| e.to_string())?.path();
        corpus.push(std::fs::read(&p).map_err(|e| e.to_string())?);
    }
    ensure!(!corpus.is_empty(), "no fixtures");
    for raw in &corpus {
        let once = serialize_journal(&parse_journal(raw).map_err(|e| e.to_string())?);
        let twice = serialize_journal(&parse_journal(&once).map_err(|e| e.to_string())?);
        ensure!(once == twice, "canonical form not idempotent");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let inputs = 100_000;
    let mut parsed = 0;
    let tokens: &[&[u8]] = &[b"{", b"}", b"[", b"]", b"\"", b",", b":", b"null", b"1e999", b"-", b"\\u0000", b"\xff"];
    for _ in 0..inputs {
        let input: Vec<u8> = match rng.random_range(0..3) {
            0 => {
                let mut buf = vec![0u8; rng.random_range(0..512)];
                rng.fill_bytes(&mut buf);
                buf
            }
            1 => {
                let mut v = corpus[rng.random_range(0..corpus.len())].clone();
                for _ in 0..rng.random_range(1..6) {
                    if v.is_empty() {
                        break;
                    }
                    let i = rng.random_range(0..v.len());
                    match rng.random_range(0..3) {
                        0 => v[i] = rng.random(),
                        1 => {
                            v.remove(i);
                        }
                        _ => {
                            let tok = tokens[rng.random_range(0..tokens.len())];
                            v.splice(i..i, tok.iter().copied());
                        }
                    }
                }
                v
            }
            _ => {
                // field-level swaps keep the document well-formed JSON
                let mut doc: serde_json::Value =
                    serde_json::from_slice(&corpus[rng.random_range(0..corpus.len())]).unwrap();
                if let Some(entries) = doc.get_mut("entries").and_then(|e| e.as_array_mut()) {
                    if !entries.is_empty() {
                        let i = rng.random_range(0..entries.len());
                        let junk = [
                            serde_json::json!(null),
                            serde_json::json!(-1),
                            serde_json::json!("2026-13-01T00:00:00Z"),
                            serde_json::json!({"kind": "ab_test", "runs": 0}),
                            serde_json::json!("x"),
                        ];
                        let field = ["timestamp", "category", "arena", "attachments", "entry_id"][rng.random_range(0..5)];
                        entries[i][field] = junk[rng.random_range(0..junk.len())].clone();
                    }
                }
                serde_json::to_vec(&doc).unwrap()
            }
        };
        if let Ok(j) = parse_journal(&input) {
            parsed += 1;
            let back = parse_journal(&serialize_journal(&j)).map_err(|e| format!("re-parse failed: {e}"))?;
            ensure!(back == j, "accepted input does not round-trip");
        }
    }

    let base = Utc.with_ymd_and_hms(2026, 1, 1, 0, 0, 0).unwrap();
    let entry = |i: usize, cat: EvidenceCategory| JournalEntry {
        entry_id: format!("e{i:05}"),
        timestamp: Timestamp(base + chrono::Duration::seconds(i as i64)),
        criterion: None,
        arena: None,
        category: cat,
        body: String::new(),
        attachments: vec![],
    };
    for _ in 0..2_000 {
        let mut j = Journal {
            entity_id: "bot".into(),
            run_id: "r".into(),
            entries: vec![],
            gate_events: vec![],
        };
        let mut prev: BTreeMap<Criterion, usize> = coverage_table(&j).into_iter().map(|(c, v)| (c, v.present)).collect();
        for i in 0..rng.random_range(1..60) {
            let cat = EvidenceCategory::ALL[rng.random_range(0..EvidenceCategory::ALL.len())];
            j.entries.push(entry(i, cat));
            for (c, cov) in coverage_table(&j) {
                ensure!(cov.present >= prev[&c], "{c} coverage dropped after adding {cat:?}");
                prev.insert(c, cov.present);
            }
        }
    }
    Ok(format!("{inputs} fuzz inputs ({parsed} accepted) without a crash; round-trip idempotent; coverage monotone"))
}

fn end_to_end() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_growai");
    let fx = fixtures();
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |args: &[&str]| -> Result<std::process::Output, String> {
        let out = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("growai {}: {}", args.join(" "), String::from_utf8_lossy(&out.stderr)));
        }
        Ok(out)
    };
    let journal = fx.join("journals/complete.json");
    run(&["validate-journal", journal.to_str().unwrap()])?;

    let dir = tmp.path().join("atlas");
    let dir_s = dir.to_str().unwrap();
    run(&["campaign", "init", "--dir", dir_s, "--entity-id", "atlas-7"])?;
    let mut expected = Campaign::new("atlas", "atlas-7", EntityKind::SoftwareAgent).unwrap();
    for i in 1..=10 {
        let sheet_path = fx.join(format!("sheets/sheet-{i:02}.json"));
        let out_path = tmp.path().join(format!("run-{i:02}.json"));
        run(&[
            "score",
            "--sheet",
            sheet_path.to_str().unwrap(),
            "--format",
            "json",
            "--out",
            out_path.to_str().unwrap(),
        ])?;
        run(&["campaign", "add-run", "--dir", dir_s, "--run", out_path.to_str().unwrap()])?;
        let doc = parse_sheet_document(&std::fs::read(&sheet_path).unwrap()).map_err(|e| e.to_string())?;
        expected
            .add_run(score_run(&doc.sheet, &doc.gates, &WeightSet::prior()).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    }
    run(&["campaign", "finalize", "--dir", dir_s])?;
    let a = run(&["report", "--dir", dir_s, "--format", "md"])?.stdout;
    let b = run(&["report", "--dir", dir_s, "--format", "md"])?.stdout;
    ensure!(a == b, "markdown differs between runs");

    let result = expected.finalize(None).map_err(|e| e.to_string())?;
    let line = format!(
        "**Grow Up Index: {} — {}** (exact: {})",
        result.grow_up_index.round_half_up(2),
        result.verdict,
        result.grow_up_index
    );
    let md = String::from_utf8(a).map_err(|e| e.to_string())?;
    ensure!(md.lines().any(|l| l == line), "verdict line missing, wanted `{line}`");
    Ok(line)
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 8] = [
        ("golden weights", golden_weights, Duration::from_secs(1)),
        ("composite oracle equivalence", composite_oracle, Duration::from_secs(10)),
        ("rule suite", rule_suite, Duration::from_secs(30)),
        ("campaign protocol", campaign_protocol, Duration::from_secs(30)),
        ("AHP", ahp, Duration::from_secs(60)),
        ("weight fitting", weight_fitting, Duration::from_secs(60)),
        ("journal robustness", journal_robustness, Duration::from_secs(60)),
        ("end-to-end CLI pipeline", end_to_end, Duration::from_secs(5)),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; took {elapsed:.2?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS  {name} ({elapsed:.2?}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name} ({elapsed:.2?}): {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
