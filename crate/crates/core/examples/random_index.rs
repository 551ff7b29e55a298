//! Re-derives the AHP random index by Monte Carlo and compares it with the
//! shipped table.
//!
//! ```bash
//! cargo run --release -p growai-core --example random_index -- 100000 7
//! ```

use growai_core::weights::derive_random_index;

fn main() {
    let mut args = std::env::args().skip(1);
    let samples: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(20_000);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);

    println!("{:>3} {:>10} {:>10} {:>10} {:>8}", "n", "derived", "std.err", "shipped", "diff");
    for n in 3..=10 {
        let est = derive_random_index(n, samples, seed).expect("dimension in range");
        println!(
            "{:>3} {:>10.4} {:>10.4} {:>10.4} {:>+8.4}",
            n,
            est.mean_ci,
            est.std_error,
            est.shipped,
            est.mean_ci - est.shipped
        );
    }
}
