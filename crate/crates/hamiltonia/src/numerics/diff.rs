//! Finite-difference derivatives with Richardson extrapolation.

/// Default step pair for Richardson-refined central differences.
pub const STEP: f64 = 1e-5;

/// Central difference of a vector function along coordinate `j`, refined by
/// Richardson extrapolation between steps `h` and `h/2`.
pub fn partial<F: Fn(&[f64]) -> Vec<f64>>(f: &F, x: &[f64], j: usize, h: f64) -> Vec<f64> {
    let central = |h: f64| {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += h;
        xm[j] -= h;
        let (fp, fm) = (f(&xp), f(&xm));
        fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<_>>()
    };
    let d1 = central(h);
    let d2 = central(h / 2.0);
    d1.iter().zip(&d2).map(|(a, b)| (4.0 * b - a) / 3.0).collect()
}

/// Jacobian J[i][j] = ∂f_i/∂x_j.
pub fn jacobian<F: Fn(&[f64]) -> Vec<f64>>(f: &F, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let cols: Vec<Vec<f64>> = (0..x.len()).map(|j| partial(f, x, j, h)).collect();
    let m = cols.first().map_or(0, Vec::len);
    (0..m).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
}

/// Gradient of a scalar function.
pub fn gradient<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], h: f64) -> Vec<f64> {
    let g = |y: &[f64]| vec![f(y)];
    (0..x.len()).map(|j| partial(&g, x, j, h)[0]).collect()
}

/// Second derivative of a scalar function of one variable by a 5-point stencil.
pub fn second_derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h)) / (12.0 * h * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobian_of_polar() {
        let f = |x: &[f64]| vec![x[0] * x[1].cos(), x[0] * x[1].sin()];
        let j = jacobian(&f, &[2.0, 0.3], STEP);
        assert!((j[0][0] - 0.3f64.cos()).abs() < 1e-10);
        assert!((j[1][1] - 2.0 * 0.3f64.cos()).abs() < 1e-10);
    }

    #[test]
    fn second_derivative_of_sin() {
        assert!((second_derivative(f64::sin, 1.0, 1e-3) + 1f64.sin()).abs() < 1e-9);
    }
}
