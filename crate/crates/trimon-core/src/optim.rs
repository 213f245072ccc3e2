//! Derivative-free simplex search and damped least squares. Small problem
//! dimensions only (the likelihood has 16 parameters, the crossing fit 4).

use crate::error::{CoreError, Result};
use nalgebra::{DMatrix, DVector};

/// Nelder–Mead options.
#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub max_iter: usize,
    /// Converged when the best objective improves by less than `tol` over
    /// `stall_iters` consecutive iterations.
    pub tol: f64,
    pub stall_iters: usize,
    /// Initial simplex step per coordinate.
    pub step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iter: 20_000,
            tol: 1e-10,
            stall_iters: 50,
            step: 0.05,
        }
    }
}

/// Minimize `f` with the Nelder–Mead simplex. Returns the best point and its
/// objective value.
pub fn nelder_mead<F>(f: F, x0: &[f64], opts: &SimplexOptions) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        let step = if p[i].abs() > 1e-8 {
            opts.step * p[i].abs()
        } else {
            opts.step
        };
        p[i] += step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();

    let mut stall = 0usize;
    let mut last_best = f64::INFINITY;
    for _ in 0..opts.max_iter {
        // order ascending
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
        let reordered: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let revalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        simplex = reordered;
        values = revalues;

        if last_best - values[0] < opts.tol {
            stall += 1;
            if stall >= opts.stall_iters {
                break;
            }
        } else {
            stall = 0;
        }
        last_best = values[0];

        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|p| p[k]).sum::<f64>() / n as f64)
            .collect();

        let mix = |a: &[f64], b: &[f64], w: f64| -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| x + w * (x - y)).collect()
        };
        let reflected = mix(&centroid, &simplex[n], alpha);
        let f_ref = f(&reflected);
        if f_ref < values[0] {
            let expanded = mix(&centroid, &simplex[n], gamma);
            let f_exp = f(&expanded);
            if f_exp < f_ref {
                simplex[n] = expanded;
                values[n] = f_exp;
            } else {
                simplex[n] = reflected;
                values[n] = f_ref;
            }
        } else if f_ref < values[n - 1] {
            simplex[n] = reflected;
            values[n] = f_ref;
        } else {
            let contracted: Vec<f64> = (0..n)
                .map(|k| centroid[k] + rho * (simplex[n][k] - centroid[k]))
                .collect();
            let f_con = f(&contracted);
            if f_con < values[n] {
                simplex[n] = contracted;
                values[n] = f_con;
            } else {
                let best = simplex[0].clone();
                for i in 1..=n {
                    for (k, b) in best.iter().enumerate() {
                        simplex[i][k] = b + sigma * (simplex[i][k] - b);
                    }
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=n {
        if values[i] < values[best] {
            best = i;
        }
    }
    (simplex[best].clone(), values[best])
}

/// Damped least-squares fit result.
#[derive(Debug, Clone)]
pub struct LeastSquaresFit {
    pub params: Vec<f64>,
    pub cost: f64,
    pub rms: f64,
    pub iterations: usize,
}

/// Levenberg–Marquardt-style damped least squares with a forward-difference
/// Jacobian.
pub fn least_squares<F>(residuals: F, x0: &[f64], max_iter: usize) -> Result<LeastSquaresFit>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = x0.len();
    let mut x = DVector::from_column_slice(x0);
    let eval = |x: &DVector<f64>| -> DVector<f64> {
        DVector::from_vec(residuals(x.as_slice()))
    };
    let mut r = eval(&x);
    let m = r.len();
    if m < n {
        return Err(CoreError::Underdetermined(format!(
            "{m} residuals for {n} parameters"
        )));
    }
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    let mut iterations = 0;

    for _ in 0..max_iter {
        iterations += 1;
        // forward-difference Jacobian with per-parameter scaling
        let mut jac = DMatrix::zeros(m, n);
        for k in 0..n {
            let h = 1e-7 * x[k].abs().max(1e-7);
            let mut xp = x.clone();
            xp[k] += h;
            let rp = eval(&xp);
            for i in 0..m {
                jac[(i, k)] = (rp[i] - r[i]) / h;
            }
        }
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * &r;

        let mut improved = false;
        for _ in 0..12 {
            let mut damped = jtj.clone();
            for k in 0..n {
                damped[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
            }
            let Some(step) = damped.lu().solve(&jtr) else {
                lambda *= 10.0;
                continue;
            };
            let x_new = &x - &step;
            let r_new = eval(&x_new);
            let cost_new = r_new.norm_squared();
            if cost_new < cost {
                let rel_drop = (cost - cost_new) / cost.max(1e-300);
                x = x_new;
                r = r_new;
                cost = cost_new;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                if rel_drop < 1e-12 {
                    return Ok(LeastSquaresFit {
                        params: x.as_slice().to_vec(),
                        rms: (cost / m as f64).sqrt(),
                        cost,
                        iterations,
                    });
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    Ok(LeastSquaresFit {
        params: x.as_slice().to_vec(),
        rms: (cost / m as f64).sqrt(),
        cost,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn simplex_minimizes_quadratic_bowl() {
        let f = |x: &[f64]| (x[0] - 1.5).powi(2) + 3.0 * (x[1] + 0.5).powi(2);
        let (x, v) = nelder_mead(f, &[0.0, 0.0], &SimplexOptions::default());
        assert_relative_eq!(x[0], 1.5, epsilon = 1e-5);
        assert_relative_eq!(x[1], -0.5, epsilon = 1e-5);
        assert!(v < 1e-9);
    }

    #[test]
    fn simplex_handles_rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let (x, _) = nelder_mead(f, &[-1.2, 1.0], &SimplexOptions {
            max_iter: 50_000,
            ..Default::default()
        });
        assert_relative_eq!(x[0], 1.0, epsilon = 1e-4);
        assert_relative_eq!(x[1], 1.0, epsilon = 1e-4);
    }

    #[test]
    fn least_squares_recovers_exponential_decay() {
        let ts: Vec<f64> = (0..30).map(|i| i as f64 * 0.1).collect();
        let truth = [2.0, 1.3];
        let data: Vec<f64> = ts.iter().map(|t| truth[0] * (-truth[1] * t).exp()).collect();
        let fit = least_squares(
            |p: &[f64]| {
                ts.iter()
                    .zip(&data)
                    .map(|(t, d)| p[0] * (-p[1] * t).exp() - d)
                    .collect()
            },
            &[1.0, 1.0],
            200,
        )
        .unwrap();
        assert_relative_eq!(fit.params[0], truth[0], epsilon = 1e-6);
        assert_relative_eq!(fit.params[1], truth[1], epsilon = 1e-6);
        assert!(fit.rms < 1e-8);
    }
}
