//! Parses an AI Journal and prints evidence coverage per criterion.
//!
//! ```bash
//! cargo run -p growai-core --example validate_journal -- fixtures/journals/partial.json
//! ```

use growai_core::journal::{parse_journal, validate_journal};
use growai_core::rubric::rubric_registry;

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| "fixtures/journals/complete.json".into());
    let raw = std::fs::read(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    let journal = match parse_journal(&raw) {
        Ok(j) => j,
        Err(e) => {
            eprintln!("{path}: {e}");
            std::process::exit(2);
        }
    };
    let report = validate_journal(&journal, &rubric_registry());
    println!("{} / {}: {} entries", report.entity_id, report.run_id, report.entry_count);
    for c in &report.criteria {
        println!("  {} {:>3.0}%  missing {:?}", c.criterion, c.ratio * 100.0, c.missing);
    }
    for g in &report.gates {
        println!("  gate {} {:?} on {}", g.gate_id, g.severity, g.scope);
    }
    println!("complete: {}", report.complete);
}
