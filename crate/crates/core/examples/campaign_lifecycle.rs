//! Ten evaluators score the same entity; the campaign is stored on disk,
//! finalized and classified.
//!
//! ```bash
//! cargo run -p growai-core --example campaign_lifecycle
//! ```

use growai_core::campaign::{Campaign, CampaignDir, EntityKind};
use growai_core::decimal::Tenths;
use growai_core::rubric::WeightSet;
use growai_core::scoring::{score_run, ScoreSheet};
use rand::{Rng, SeedableRng};

fn main() {
    let root = std::env::temp_dir().join(format!("growai-example-{}", std::process::id()));
    let dir = CampaignDir::new(root.join("demo"));
    dir.init(&Campaign::new("demo", "demo-bot", EntityKind::Robot).unwrap()).unwrap();

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    for i in 1..=10 {
        let tenths = std::array::from_fn(|_| Tenths::new(rng.random_range(21..=29)).unwrap());
        let sheet = ScoreSheet::from_tenths(format!("E{i:02}"), "demo-bot", format!("run-{i:02}"), tenths).unwrap();
        let run = score_run(&sheet, &[], &WeightSet::prior()).unwrap();
        let campaign = dir.add_run(run).unwrap();
        let s = campaign.summary();
        println!("{} runs, eligible to finalize: {}", s.run_count, s.eligible_to_finalize);
    }

    let result = dir.finalize(None).unwrap();
    for (c, v) in &result.final_composites {
        println!("{c} {}", v.round_half_up(2));
    }
    println!(
        "Grow Up Index {} ({}) -> {}, {}",
        result.grow_up_index.round_half_up(2),
        result.grow_up_index,
        result.verdict,
        result.maturity_band
    );
    println!("stored in {}", dir.root().display());
    std::fs::remove_dir_all(root).ok();
}
