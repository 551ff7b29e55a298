//! Renders the Markdown report of a finalized campaign, with journal
//! coverage.
//!
//! ```bash
//! cargo run -p growai-core --example render_report
//! ```

use std::path::Path;

use growai_core::campaign::{Campaign, EntityKind};
use growai_core::journal::{coverage_table, parse_journal};
use growai_core::report::{render_report, ReportFormat};
use growai_core::rubric::WeightSet;
use growai_core::scoring::{parse_sheet_document, score_run};

fn main() {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let mut campaign = Campaign::new("atlas", "atlas-7", EntityKind::SoftwareAgent).unwrap();
    for i in 1..=10 {
        let raw = std::fs::read(fixtures.join(format!("sheets/sheet-{i:02}.json"))).unwrap();
        let doc = parse_sheet_document(&raw).unwrap();
        campaign.add_run(score_run(&doc.sheet, &doc.gates, &WeightSet::prior()).unwrap()).unwrap();
    }
    let result = campaign.finalize(None).unwrap();
    let journal = parse_journal(&std::fs::read(fixtures.join("journals/complete.json")).unwrap()).unwrap();
    let coverage = coverage_table(&journal);
    print!("{}", render_report(&campaign, &result, Some(&coverage), ReportFormat::Markdown).unwrap());
}
