//! Fits weights to calibration observations over the feasible grid.
//!
//! ```bash
//! cargo run -p growai-core --example fit_weights -- fixtures/calibration/c1_exact.json
//! ```

use growai_core::rubric::{default_weights, Criterion, WeightVector};
use growai_core::weights::{fit_weights_report, CalibrationObservation};

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| "fixtures/calibration/c1_exact.json".into());
    let raw = std::fs::read(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    let obs: Vec<CalibrationObservation> = serde_json::from_slice(&raw).unwrap();
    let criterion = obs.first().map(|o| o.criterion).unwrap_or(Criterion::C1);

    let flat = WeightVector::new(criterion, [25, 25, 25, 25]).unwrap();
    let report = fit_weights_report(criterion, &obs, &flat).unwrap();
    println!(
        "{criterion}: fitted {:?} (objective {}), started from {:?} (objective {})",
        report.weights.hundredths(),
        report.objective,
        report.prior.hundredths(),
        report.prior_objective
    );
    println!("{} candidates searched; published {:?}", report.candidates, default_weights(criterion).hundredths());
}
