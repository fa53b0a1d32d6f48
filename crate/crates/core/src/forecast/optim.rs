//! Nelder–Mead simplex minimizer with restarts.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct NelderMeadOptions {
    /// Initial simplex edge length per coordinate.
    pub step: Vec<f64>,
    /// Converged when `f_max - f_min <= f_tol * (1 + |f_min|)` and the simplex
    /// spans at most `x_tol` in every coordinate.
    pub f_tol: f64,
    pub x_tol: f64,
    /// Objective evaluations allowed across all restarts.
    pub max_evals: usize,
    /// Fresh simplices built around the incumbent after the first convergence.
    pub restarts: usize,
}

impl NelderMeadOptions {
    pub fn new(step: Vec<f64>) -> Self {
        NelderMeadOptions {
            step,
            f_tol: 1e-12,
            x_tol: 1e-8,
            max_evals: 200_000,
            restarts: 3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

/// Minimizes `f` from `x0`. Infinite values mark infeasible points.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    if opts.step.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: opts.step.len(),
        });
    }
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut best = x0.to_vec();
    let mut best_value = eval(&best, &mut evals);
    if !best_value.is_finite() {
        return Err(Error::invalid("starting point is infeasible"));
    }
    if dim == 0 {
        return Ok(Minimum {
            x: best,
            value: best_value,
            evals,
        });
    }

    for round in 0..=opts.restarts {
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
        simplex.push((best.clone(), best_value));
        for k in 0..dim {
            let mut x = best.clone();
            x[k] += opts.step[k];
            let mut v = eval(&x, &mut evals);
            if !v.is_finite() {
                x[k] = best[k] - opts.step[k];
                v = eval(&x, &mut evals);
            }
            simplex.push((x, v));
        }
        let converged = loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let (lo, hi) = (simplex[0].1, simplex[dim].1);
            let spread = (0..dim)
                .map(|k| {
                    let (mn, mx) = simplex.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| {
                        (a.min(s.0[k]), b.max(s.0[k]))
                    });
                    mx - mn
                })
                .fold(0.0, f64::max);
            if hi - lo <= opts.f_tol * (1.0 + lo.abs()) && spread <= opts.x_tol {
                break true;
            }
            if evals >= opts.max_evals {
                break false;
            }
            let centroid: Vec<f64> = (0..dim)
                .map(|k| simplex[..dim].iter().map(|s| s.0[k]).sum::<f64>() / dim as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[dim].0)
                    .map(|(c, w)| c + t * (w - c))
                    .collect()
            };
            let xr = along(-1.0);
            let fr = eval(&xr, &mut evals);
            if fr < simplex[0].1 {
                let xe = along(-2.0);
                let fe = eval(&xe, &mut evals);
                simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[dim - 1].1 {
                simplex[dim] = (xr, fr);
            } else {
                let (xc, fc) = if fr < simplex[dim].1 {
                    let xc = along(-0.5);
                    let fc = eval(&xc, &mut evals);
                    (xc, fc)
                } else {
                    let xc = along(0.5);
                    let fc = eval(&xc, &mut evals);
                    (xc, fc)
                };
                if fc < simplex[dim].1.min(fr) {
                    simplex[dim] = (xc, fc);
                } else {
                    let x0 = simplex[0].0.clone();
                    for s in simplex.iter_mut().skip(1) {
                        for k in 0..dim {
                            s.0[k] = x0[k] + 0.5 * (s.0[k] - x0[k]);
                        }
                        s.1 = eval(&s.0, &mut evals);
                    }
                }
            }
        };
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let improved = best_value - simplex[0].1;
        if simplex[0].1 <= best_value {
            best = simplex[0].0.clone();
            best_value = simplex[0].1;
        }
        if !converged {
            return Err(Error::NonConvergence {
                iterations: evals,
                best_objective: best_value,
                best_params: best,
            });
        }
        if round > 0 && improved <= opts.f_tol * (1.0 + best_value.abs()) {
            break;
        }
    }
    Ok(Minimum {
        x: best,
        value: best_value,
        evals,
    })
}
