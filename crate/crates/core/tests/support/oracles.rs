//! Reference computations that share no code path with the library.
//! Used by the core integration tests and by the acceptance suite.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_rational::Ratio;

/// Parses a plain decimal literal ("0.25", "2.7", "3") into an exact ratio.
pub fn decimal_text(s: &str) -> Ratio<i128> {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let digits: String = format!("{int}{frac}");
    let num: i128 = digits.parse().expect("decimal digits");
    Ratio::new(num, 10i128.pow(frac.len() as u32))
}

/// Composite as Σ weight × score over decimal text, e.g. weights
/// ["0.25", "0.30", ...] and scores ["2.0", "3.0", ...].
pub fn decimal_composite(weights: &[String; 4], scores: &[String; 4]) -> Ratio<i128> {
    weights
        .iter()
        .zip(scores)
        .map(|(w, s)| decimal_text(w) * decimal_text(s))
        .fold(Ratio::from_integer(0), |a, b| a + b)
}

/// Principal eigenpair by a dense eigensolver: eigenvalues from the real
/// Schur form, eigenvector as the null space of (A - λI) through SVD.
pub fn dense_principal_eigen(cells: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let n = cells.len();
    let a = DMatrix::from_fn(n, n, |i, j| cells[i][j]);
    let lambda = a
        .clone()
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() < 1e-9)
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let shifted = &a - DMatrix::<f64>::identity(n, n) * lambda;
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let k = (0..n)
        .min_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]))
        .unwrap();
    let v: Vec<f64> = v_t.row(k).iter().copied().collect();
    let sum: f64 = v.iter().sum();
    (lambda, v.iter().map(|x| x / sum).collect())
}

/// Largest real eigenvalue only.
pub fn dense_lambda_max(cells: &[Vec<f64>]) -> f64 {
    let n = cells.len();
    DMatrix::from_fn(n, n, |i, j| cells[i][j])
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() < 1e-9)
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// One calibration observation in plain numbers: arena scores in tenths and
/// target in thousandths.
#[derive(Debug, Clone)]
pub struct Obs {
    pub scores: [i64; 4],
    pub target: i64,
}

pub fn objective(w: [i64; 4], obs: &[Obs]) -> i128 {
    obs.iter()
        .map(|o| {
            let p: i64 = (0..4).map(|i| w[i] * o.scores[i]).sum();
            let r = i128::from(p - o.target);
            r * r
        })
        .sum()
}

/// Exhaustive search over all 21^4 box points, keeping those on the
/// simplex; ties by distance to `prior`, then lexicographic.
pub fn brute_force_fit(obs: &[Obs], prior: [i64; 4]) -> ([i64; 4], i128) {
    let mut cands = Vec::new();
    for a in 15..=35 {
        for b in 15..=35 {
            for c in 15..=35 {
                for d in 15..=35 {
                    if a + b + c + d == 100 {
                        cands.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    let best = cands.iter().map(|w| objective(*w, obs)).min().unwrap();
    let mut ties: Vec<_> = cands.into_iter().filter(|w| objective(*w, obs) == best).collect();
    ties.sort_by_key(|w| {
        let d: i64 = (0..4).map(|i| (w[i] - prior[i]).pow(2)).sum();
        (d, *w)
    });
    (ties[0], best)
}

fn project_box_simplex(v: &[f64; 4]) -> [f64; 4] {
    // find shift t so that Σ clamp(v_i - t, 15, 35) = 100
    let f = |t: f64| v.iter().map(|x| (x - t).clamp(15.0, 35.0)).sum::<f64>();
    let (mut lo, mut hi) = (-1e6, 1e6);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 100.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    v.map(|x| (x - t).clamp(15.0, 35.0))
}

/// Continuous minimiser over the box ∩ simplex by projected gradient.
/// Returns (weights in hundredths, objective in thousandths²).
pub fn continuous_fit(obs: &[Obs]) -> ([f64; 4], f64) {
    let f = |w: &[f64; 4]| -> f64 {
        obs.iter()
            .map(|o| {
                let p: f64 = (0..4).map(|i| w[i] * o.scores[i] as f64).sum();
                (p - o.target as f64).powi(2)
            })
            .sum()
    };
    // Lipschitz bound of the gradient: 2 Σ |x|²
    let l: f64 = 2.0 * obs.iter().map(|o| o.scores.iter().map(|&s| (s * s) as f64).sum::<f64>()).sum::<f64>();
    let mut w = [25.0; 4];
    for _ in 0..20_000 {
        let mut g = [0.0; 4];
        for o in obs {
            let p: f64 = (0..4).map(|i| w[i] * o.scores[i] as f64).sum();
            let r = p - o.target as f64;
            for i in 0..4 {
                g[i] += 2.0 * r * o.scores[i] as f64;
            }
        }
        let step = [0, 1, 2, 3].map(|i| w[i] - g[i] / l);
        w = project_box_simplex(&step);
    }
    (w, f(&w))
}
