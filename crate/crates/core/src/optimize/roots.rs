//! Bracketing root finders and the threshold / crossover curves built on them.
//!
//! Brackets come from a uniform grid scan; each sign change is refined by
//! bisection to the parameter tolerance.

use crate::capacity::{
    c_fully_correlated_werner, c_quasiclassical_werner, classical_capacity_dep_qubit,
    transferred_info_fully_gamma, transferred_info_quasiclassical_gamma,
};
use crate::error::{Result, SdcError};
use crate::states::werner_state;

/// Root tolerance on the parameter.
pub const DEFAULT_TOL: f64 = 1e-5;
/// Grid cells used to find brackets.
pub const SCAN_STEPS: usize = 100;

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(SdcError::ParameterOutOfRange {
            name: "tol",
            value: tol,
            range: "> 0",
        })
    }
}

/// Bisection on `[lo, hi]`; requires `f(lo)` and `f(hi)` not to share a strict sign.
pub fn bisect<F: Fn(f64) -> Result<f64>>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(SdcError::NoBracket { lo, hi });
    }
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Evenly spaced grid of `steps` points; a single step gives `[from]`.
pub fn linspace(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..steps)
            .map(|i| {
                if i == steps - 1 {
                    to
                } else {
                    from + (to - from) * i as f64 / (steps - 1) as f64
                }
            })
            .collect(),
    }
}

/// All sign changes of `f` on a `steps`-cell grid over `[lo, hi]`, each refined by bisection.
pub fn scan_roots<F: Fn(f64) -> Result<f64>>(
    f: F,
    lo: f64,
    hi: f64,
    steps: usize,
    tol: f64,
) -> Result<Vec<f64>> {
    let grid = linspace(lo, hi, steps + 1);
    let values = grid.iter().map(|&x| f(x)).collect::<Result<Vec<f64>>>()?;
    let mut roots = Vec::new();
    for i in 0..steps {
        let (fa, fb) = (values[i], values[i + 1]);
        if fa == 0.0 {
            if roots.last() != Some(&grid[i]) {
                roots.push(grid[i]);
            }
        } else if fb != 0.0 && fa.signum() != fb.signum() {
            roots.push(bisect(&f, grid[i], grid[i + 1], tol)?);
        }
    }
    if values[steps] == 0.0 && roots.last() != Some(&grid[steps]) {
        roots.push(grid[steps]);
    }
    Ok(roots)
}

/// `2 − S(W((1−p)²))`: Bell pair through independent depolarising noise on both sides.
pub fn c_bell_two_sided_dep(p: f64) -> Result<f64> {
    let eta = (1.0 - p) * (1.0 - p);
    Ok(2.0 - werner_state(2, eta)?.entropy())
}

/// Noise level where a Bell pair stops beating the best separable input
/// under two-sided qubit depolarising noise.
pub fn depolarising_transition_threshold(tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let f = |p: f64| Ok(c_bell_two_sided_dep(p)? - classical_capacity_dep_qubit(p)?);
    // the curves meet again at p = 1 where both vanish; the interior crossing is wanted
    let roots = scan_roots(f, 0.0, 1.0, SCAN_STEPS, tol)?;
    roots
        .into_iter()
        .find(|&r| r > 0.0 && r < 1.0)
        .ok_or(SdcError::NoBracket { lo: 0.0, hi: 1.0 })
}

/// `C_un − C_Γ` for a Bell pair in the correlated quasi-classical channel.
pub fn quasiclassical_gap(p: f64, mu: f64) -> Result<f64> {
    Ok(c_quasiclassical_werner(1.0, p, mu)? - transferred_info_quasiclassical_gamma(p)?)
}

/// Correlation degree at which unitary encoding catches up with the reset
/// pre-processing at noise `p`; `None` when unitary encoding wins for every μ.
pub fn crossover_mu_tilde(p: f64, tol: f64) -> Result<Option<f64>> {
    crate::error::check_unit_interval("p", p)?;
    check_tol(tol)?;
    if quasiclassical_gap(p, 0.0)? >= 0.0 {
        return Ok(None);
    }
    let roots = scan_roots(|mu| quasiclassical_gap(p, mu), 0.0, 1.0, SCAN_STEPS, tol)?;
    Ok(roots.first().copied())
}

/// Noise intervals where the reset pre-processing beats unitary encoding at fixed μ.
///
/// Both the lower interval and its mirror under `p ↔ 1 − p` are returned, in increasing order.
pub fn crossover_p_range(mu: f64, tol: f64) -> Result<Vec<(f64, f64)>> {
    crate::error::check_unit_interval("mu", mu)?;
    check_tol(tol)?;
    // positive where the reset wins
    let h = |p: f64| Ok(-quasiclassical_gap(p, mu)?);
    let grid = linspace(0.0, 1.0, SCAN_STEPS + 1);
    let values = grid.iter().map(|&p| h(p)).collect::<Result<Vec<f64>>>()?;
    let mut intervals = Vec::new();
    let mut open: Option<f64> = if values[0] > 0.0 { Some(0.0) } else { None };
    for i in 0..SCAN_STEPS {
        let (a, b) = (values[i], values[i + 1]);
        match open {
            None if b > 0.0 => {
                open = Some(if a == 0.0 {
                    grid[i]
                } else {
                    bisect(h, grid[i], grid[i + 1], tol)?
                });
            }
            Some(start) if b <= 0.0 => {
                let end = if b == 0.0 {
                    grid[i + 1]
                } else {
                    bisect(h, grid[i], grid[i + 1], tol)?
                };
                intervals.push((start, end));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(start) = open {
        intervals.push((start, 1.0));
    }
    Ok(intervals)
}

/// Werner parameter at which `2 − S(ρ_w)` equals `1 − H2(q)`.
pub fn crossover_eta_tilde(q: f64, tol: f64) -> Result<f64> {
    crate::error::check_unit_interval("q", q)?;
    check_tol(tol)?;
    let target = transferred_info_fully_gamma(q)?;
    bisect(
        |eta| Ok(c_fully_correlated_werner(eta)? - target),
        0.0,
        1.0,
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bisect_basics() {
        let r = bisect(|x| Ok(x * x - 2.0), 0.0, 2.0, 1e-12).unwrap();
        assert_abs_diff_eq!(r, 2f64.sqrt(), epsilon = 1e-11);
        assert!(matches!(
            bisect(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-6),
            Err(SdcError::NoBracket { .. })
        ));
        assert_eq!(bisect(Ok, 0.0, 1.0, 1e-6).unwrap(), 0.0);
        assert!(bisect(Ok, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn grid_helpers() {
        assert_eq!(linspace(0.3, 0.9, 1), vec![0.3]);
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        let roots = scan_roots(|x| Ok((x - 0.25) * (x - 0.75)), 0.0, 1.0, 10, 1e-9).unwrap();
        assert_eq!(roots.len(), 2);
        assert_abs_diff_eq!(roots[0], 0.25, epsilon = 1e-8);
        assert_abs_diff_eq!(roots[1], 0.75, epsilon = 1e-8);
    }

    #[test]
    fn threshold() {
        let pt = depolarising_transition_threshold(DEFAULT_TOL).unwrap();
        assert!((pt - 0.345).abs() <= 0.005);
        assert_abs_diff_eq!(pt, 0.344_492_283_028_069_8, epsilon = 2e-5);
        let gap = c_bell_two_sided_dep(pt).unwrap() - classical_capacity_dep_qubit(pt).unwrap();
        assert!(gap.abs() <= DEFAULT_TOL);
        assert!(c_bell_two_sided_dep(0.1).unwrap() > classical_capacity_dep_qubit(0.1).unwrap());
        assert!(c_bell_two_sided_dep(0.6).unwrap() < classical_capacity_dep_qubit(0.6).unwrap());
    }

    #[test]
    fn mu_tilde() {
        let a = crossover_mu_tilde(0.05, DEFAULT_TOL).unwrap().unwrap();
        assert_abs_diff_eq!(a, 0.294_619_021_200_492_8, epsilon = 2e-5);
        let b = crossover_mu_tilde(0.95, DEFAULT_TOL).unwrap().unwrap();
        assert_abs_diff_eq!(a, b, epsilon = DEFAULT_TOL);
        assert_eq!(crossover_mu_tilde(0.5, DEFAULT_TOL).unwrap(), None);
    }

    #[test]
    fn p_range() {
        let iv = crossover_p_range(0.2, DEFAULT_TOL).unwrap();
        assert_eq!(iv.len(), 2);
        let oracle = [
            0.007_473_227_640_627_356,
            0.293_001_673_575_806_25,
            0.706_998_326_424_194_1,
            0.992_526_772_359_372_7,
        ];
        let got = [iv[0].0, iv[0].1, iv[1].0, iv[1].1];
        for (g, o) in got.iter().zip(oracle) {
            assert_abs_diff_eq!(*g, o, epsilon = 2e-5);
        }
        assert!(crossover_p_range(0.5, DEFAULT_TOL).unwrap().is_empty());
        // at μ = 0 the endpoints are crossings of the two curves
        for (lo, hi) in crossover_p_range(0.0, DEFAULT_TOL).unwrap() {
            for p in [lo, hi] {
                assert!(quasiclassical_gap(p, 0.0).unwrap().abs() < 1e-4);
            }
        }
    }

    #[test]
    fn eta_tilde() {
        for q in [0.0, 1.0] {
            let e = crossover_eta_tilde(q, DEFAULT_TOL).unwrap();
            assert_abs_diff_eq!(e, 0.747_613_833_446_357_7, epsilon = 2e-5);
        }
        assert_eq!(crossover_eta_tilde(0.5, DEFAULT_TOL).unwrap(), 0.0);
        for i in 0..21 {
            let q = i as f64 / 20.0;
            assert!(crossover_eta_tilde(q, DEFAULT_TOL).unwrap() <= 0.747_613_833_446_357_7 + 2e-5);
        }
    }
}
