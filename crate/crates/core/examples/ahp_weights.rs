//! Derives weights from a pairwise comparison matrix and checks consistency.
//!
//! ```bash
//! cargo run -p growai-core --example ahp_weights
//! ```

use growai_core::rubric::{default_weights, Criterion};
use growai_core::weights::{ahp_weights, random_index, PairwiseMatrix};

fn main() {
    // a judge's comparison of the four C3 arenas: PT, ROB, INT, ETH
    let judgement = PairwiseMatrix::from_upper(4, [1.4, 1.75, 1.75, 1.25, 1.25, 1.0]).unwrap();
    let r = ahp_weights(&judgement).unwrap();
    println!("weights {:.4?}", r.weights);
    println!("lambda_max {:.6}  CI {:.6}  CR {:.6} (RI {:.4})", r.lambda_max, r.ci, r.cr, random_index(4).unwrap());
    let w = r.to_weight_vector(Criterion::C3).unwrap();
    println!("as hundredths {:?}; prior {:?}", w.hundredths(), default_weights(Criterion::C3).hundredths());

    // consistent, but PT gets 0.40 which the rubric does not allow
    let lopsided = PairwiseMatrix::from_upper(4, [2.0, 2.0, 2.0, 1.0, 1.0, 1.0]).unwrap();
    let r = ahp_weights(&lopsided).unwrap();
    println!("\nlopsided {:.4?} -> {:?}", r.weights, r.to_weight_vector(Criterion::C3).unwrap_err());

    // an inconsistent judge
    let messy = PairwiseMatrix::from_upper(4, [9.0, 1.0 / 9.0, 3.0, 1.0 / 7.0, 5.0, 9.0]).unwrap();
    let r = ahp_weights(&messy).unwrap();
    println!("\nmessy CR {:.3} acceptable {}", r.cr, r.acceptable);
}
