//! Walks the rubric: six criteria, their games, and the weighted arenas.
//!
//! ```bash
//! cargo run -p growai-core --example rubric_tour
//! ```

use growai_core::rubric::{default_weights, rubric_registry, ArenaId};

fn main() {
    for game in rubric_registry() {
        let c = game.criterion;
        println!("{c} {} / \"{}\"", c.title(), game.game_name);
        for (arena, w) in game.arenas.iter().zip(default_weights(c).hundredths()) {
            println!("    {:<8} {:<45} 0.{w:02}", arena.label(), arena.name());
        }
        let checklist: Vec<_> = game.evidence_checklist.iter().map(|e| e.as_str()).collect();
        println!("    evidence: {}", checklist.join(", "));
    }

    // bare codes are unique, so they parse too
    let ad = ArenaId::parse("AD").unwrap();
    println!("\nAD -> {} ({})", ad.label(), ad.criterion());
}
