//! Quadrature primitives shared by the functionals.
//!
//! Angular integrals use the periodic trapezoid rule. Radial integrals use
//! composite Simpson on (possibly non-uniform) grids, usually in the
//! logarithmic variable `s = ln t` so that power-law behaviour near the
//! origin is resolved with a modest number of nodes.

use std::f64::consts::TAU;

/// Equispaced angles `2πj/n`, `j = 0..n`.
pub fn angles(n: usize) -> impl Iterator<Item = f64> + Clone {
    let step = TAU / n as f64;
    (0..n).map(move |j| j as f64 * step)
}

/// Periodic trapezoid mean `(1/2π)∫ g dθ` on `n` equispaced nodes.
pub fn periodic_mean<F: FnMut(f64) -> f64>(n: usize, mut g: F) -> f64 {
    let mut acc = 0.0;
    for theta in angles(n) {
        acc += g(theta);
    }
    acc / n as f64
}

/// Geometric grid with `intervals + 1` nodes from `a` to `b` inclusive.
/// The endpoints are reproduced exactly.
pub fn log_grid(a: f64, b: f64, intervals: usize) -> Vec<f64> {
    debug_assert!(a > 0.0 && b > a && intervals >= 1);
    let (la, lb) = (a.ln(), b.ln());
    let step = (lb - la) / intervals as f64;
    let mut grid: Vec<f64> = (0..=intervals)
        .map(|j| (la + j as f64 * step).exp())
        .collect();
    grid[0] = a;
    grid[intervals] = b;
    grid
}

/// Uniform grid with `intervals + 1` nodes from `a` to `b` inclusive.
pub fn uniform_grid(a: f64, b: f64, intervals: usize) -> Vec<f64> {
    let step = (b - a) / intervals as f64;
    let mut grid: Vec<f64> = (0..=intervals).map(|j| a + j as f64 * step).collect();
    grid[intervals] = b;
    grid
}

/// Composite Simpson rule on an arbitrary strictly increasing grid.
///
/// Pairs of intervals use the non-uniform three-point Simpson formula; an
/// odd trailing interval is closed with the matching three-point end
/// correction, so the rule stays exact for quadratics everywhere. Two nodes
/// fall back to the trapezoid rule. Any `+∞` sample makes the result `+∞`.
pub fn simpson(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    if y.contains(&f64::INFINITY) {
        return f64::INFINITY;
    }
    if n == 2 {
        return 0.5 * (x[1] - x[0]) * (y[0] + y[1]);
    }
    let intervals = n - 1;
    let paired = intervals - intervals % 2;
    let mut acc = 0.0;
    let mut i = 0;
    while i < paired {
        let h0 = x[i + 1] - x[i];
        let h1 = x[i + 2] - x[i + 1];
        let hs = h0 + h1;
        acc += hs / 6.0
            * ((2.0 - h1 / h0) * y[i]
                + hs * hs / (h0 * h1) * y[i + 1]
                + (2.0 - h0 / h1) * y[i + 2]);
        i += 2;
    }
    if intervals % 2 == 1 {
        let k = n - 1;
        let h0 = x[k - 1] - x[k - 2];
        let h1 = x[k] - x[k - 1];
        let alpha = (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1));
        let beta = (h1 * h1 + 3.0 * h1 * h0) / (6.0 * h0);
        let eta = h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
        acc += alpha * y[k] + beta * y[k - 1] - eta * y[k - 2];
    }
    acc
}

/// `∫ g(t) dt` over the grid `t`, integrated by Simpson in `s = ln t`.
///
/// When the nodes are equispaced in `s` and the interval count is a
/// multiple of four, one Richardson step against the every-other-node rule
/// raises the order to six.
pub fn simpson_log(t: &[f64], g: &[f64]) -> f64 {
    let s: Vec<f64> = t.iter().map(|v| v.ln()).collect();
    let w: Vec<f64> = t
        .iter()
        .zip(g)
        .map(|(ti, gi)| if *gi == 0.0 { 0.0 } else { gi * ti })
        .collect();
    let fine = simpson(&s, &w);
    let intervals = s.len().saturating_sub(1);
    if !fine.is_finite() || intervals < 8 || !intervals.is_multiple_of(4) || !equispaced(&s) {
        return fine;
    }
    let s2: Vec<f64> = s.iter().step_by(2).copied().collect();
    let w2: Vec<f64> = w.iter().step_by(2).copied().collect();
    let coarse = simpson(&s2, &w2);
    fine + (fine - coarse) / 15.0
}

fn equispaced(s: &[f64]) -> bool {
    let h = (s[s.len() - 1] - s[0]) / (s.len() - 1) as f64;
    s.windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs())
}

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Eight-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre8<F: Fn(f64) -> f64>(a: f64, b: f64, f: F) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS) {
        acc += w * (f(mid - half * x) + f(mid + half * x));
    }
    acc * half
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_exact_for_quadratics_on_nonuniform_grids() {
        let x = [0.0, 0.1, 0.35, 0.4, 0.9, 1.0];
        let y: Vec<f64> = x.iter().map(|t| 3.0 * t * t - 2.0 * t + 1.0).collect();
        assert!((simpson(&x, &y) - 1.0).abs() < 1e-14);

        // equal spacing keeps the cubic term
        let x = uniform_grid(0.0, 1.0, 4);
        let y: Vec<f64> = x.iter().map(|t| t * t * t).collect();
        assert!((simpson(&x, &y) - 0.25).abs() < 1e-15);

        let x = [0.0, 0.2, 0.5, 1.0];
        let y: Vec<f64> = x.iter().map(|t| 3.0 * t * t).collect();
        assert!((simpson(&x, &y) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn simpson_propagates_infinity() {
        let x = [0.0, 0.5, 1.0];
        let y = [1.0, f64::INFINITY, 1.0];
        assert_eq!(simpson(&x, &y), f64::INFINITY);
    }

    #[test]
    fn log_simpson_power_law() {
        let t = log_grid(1e-6, 1.0, 512);
        let g: Vec<f64> = t.iter().map(|v| v.powf(-0.5)).collect();
        let exact = 2.0 * (1.0 - 1e-3);
        let e = (simpson_log(&t, &g) - exact).abs();
        assert!(e < 1e-12, "{e}");

        // plain Simpson order on a grid that is not equispaced in ln t
        let mut t = log_grid(1e-6, 1.0, 512);
        t[1] *= 1.01;
        let g: Vec<f64> = t.iter().map(|v| v.powf(-0.5)).collect();
        let e = (simpson_log(&t, &g) - exact).abs();
        assert!(e < 1e-9, "{e}");
    }

    #[test]
    fn periodic_trapezoid_is_spectral() {
        let m = periodic_mean(64, |th| (th.cos()).exp());
        // I_0(1)
        assert!((m - 1.266_065_877_752_008_4).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_polynomial_degree_15() {
        let v = gauss_legendre8(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
    }
}
