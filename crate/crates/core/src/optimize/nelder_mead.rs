//! Derivative-free simplex minimisation.

/// Stopping rules and the size of the initial simplex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NmOptions {
    /// Converged once the spread of simplex values is at most this.
    pub tol: f64,
    pub max_iter: usize,
    pub initial_step: f64,
}

impl Default for NmOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 2000,
            initial_step: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NmResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Nelder-Mead with standard coefficients (reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2) and an axis-aligned initial simplex.
pub fn minimize<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], opts: NmOptions) -> NmResult {
    let n = x0.len();
    if n == 0 {
        let value = f(x0);
        return NmResult {
            x: Vec::new(),
            value,
            iterations: 0,
            converged: true,
        };
    }
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += opts.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        // sort ascending; ties keep insertion order so results are reproducible
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        if values[n] - values[0] <= opts.tol {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < values[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        // outside contraction when the reflection helped a little, inside otherwise
        let xc = if fr < values[n] {
            along(-0.5)
        } else {
            along(0.5)
        };
        let fc = f(&xc);
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        // shrink towards the best vertex
        for i in 1..=n {
            let shrunk: Vec<f64> = simplex[0]
                .iter()
                .zip(&simplex[i])
                .map(|(b, v)| b + 0.5 * (v - b))
                .collect();
            values[i] = f(&shrunk);
            simplex[i] = shrunk;
        }
    }

    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    NmResult {
        x: simplex[best].clone(),
        value: values[best],
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let r = minimize(
            |x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2),
            &[0.0, 0.0],
            NmOptions {
                tol: 1e-14,
                ..NmOptions::default()
            },
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] + 2.0).abs() < 1e-5);
    }

    #[test]
    fn rosenbrock() {
        let r = minimize(
            |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
            &[-1.2, 1.0],
            NmOptions {
                tol: 1e-16,
                max_iter: 5000,
                initial_step: 0.5,
            },
        );
        assert!(r.value < 1e-8, "{r:?}");
    }

    #[test]
    fn flat_function_converges_immediately() {
        let r = minimize(|_| 0.3, &[0.1, 0.2, 0.3], NmOptions::default());
        assert!(r.converged);
        assert_eq!(r.iterations, 0);
        assert_eq!(r.x, vec![0.1, 0.2, 0.3]);
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let r = minimize(
            |x| x.iter().map(|v| v * v).sum(),
            &[5.0; 4],
            NmOptions {
                tol: 0.0,
                max_iter: 3,
                initial_step: 1.0,
            },
        );
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
    }
}
