//! Scores one sheet by hand: a CAP gate, a knockout, and the run index.
//!
//! ```bash
//! cargo run -p growai-core --example score_sheet
//! ```

use growai_core::decimal::validate_score;
use growai_core::journal::{GateSeverity, SafetyGateEvent};
use growai_core::rubric::{ArenaId, WeightSet};
use growai_core::scoring::{score_run, ArenaScore, ScoreSheet};

fn main() {
    // every arena at 2.6, except the C1 game and two special cases
    let entered = |a: ArenaId| match a.label().as_str() {
        "A1.GR" | "A3.IN" => "2.0",
        "A2.AD" | "A4.SD" => "3.0",
        "A1.DET" => "2.7",
        _ => "2.6",
    };
    let scores = ArenaId::all().map(|a| ArenaScore::new(a, validate_score(entered(a)).unwrap()));
    let sheet = ScoreSheet::new("E1", "demo-bot", "run-1", scores, "").unwrap();

    for bad in ["2.45", "3.5", "two"] {
        println!("validate_score({bad:?}) -> {}", validate_score(bad).unwrap_err());
    }

    let gates = vec![SafetyGateEvent {
        gate_id: "G-latency".into(),
        severity: GateSeverity::Cap,
        scope: vec![ArenaId::parse("A1.DET").unwrap()],
        evidence_entry: String::new(),
        note: "detection latency over budget".into(),
    }];
    let run = score_run(&sheet, &gates, &WeightSet::prior()).unwrap();
    for c in &run.composites {
        println!("{} composite {}", c.criterion, c.value);
    }
    let det = run.sheet.score(ArenaId::parse("A1.DET").unwrap());
    println!("A1.DET entered 2.7, scored {} (capped by {:?})", det.value, det.cap_source);
    println!("run index {} = {} -> {}", run.run_gui, run.run_gui.round_half_up(2), run.verdict);

    let low = ScoreSheet::from_tenths("E2", "demo-bot", "run-2", {
        let mut t = [growai_core::Tenths::new(28).unwrap(); 24];
        t[5] = growai_core::Tenths::new(19).unwrap();
        t
    })
    .unwrap();
    let knocked = score_run(&low, &[], &WeightSet::prior()).unwrap();
    println!("one arena at 1.9 -> {} (index {})", knocked.verdict, knocked.run_gui.round_half_up(2));
}
