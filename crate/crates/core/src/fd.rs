//! Finite-difference stencils and convergence-order fits.

use num_complex::Complex64;

/// Fourth-order central first derivative from values at offsets `-2, -1, +1, +2`.
pub fn central4(fm2: &[Complex64], fm1: &[Complex64], fp1: &[Complex64], fp2: &[Complex64], h: f64) -> Vec<Complex64> {
    let s = 1.0 / (12.0 * h);
    (0..fm2.len()).map(|i| (fm2[i] - 8.0 * fm1[i] + 8.0 * fp1[i] - fp2[i]) * s).collect()
}

/// Second-order central first derivative.
pub fn central2(fm1: &[Complex64], fp1: &[Complex64], h: f64) -> Vec<Complex64> {
    let s = 0.5 / h;
    fm1.iter().zip(fp1).map(|(a, b)| (b - a) * s).collect()
}

/// Five-point Laplacian.
pub fn laplacian5(c: &[Complex64], e: &[Complex64], w: &[Complex64], n: &[Complex64], s: &[Complex64], h: f64) -> Vec<Complex64> {
    let k = 1.0 / (h * h);
    (0..c.len()).map(|i| (e[i] + w[i] + n[i] + s[i] - 4.0 * c[i]) * k).collect()
}

/// `d/dz = (d/dx - i d/dy) / 2` and `d/dzbar = (d/dx + i d/dy) / 2` from partials.
pub fn wirtinger(dx: &[Complex64], dy: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let i = Complex64::new(0.0, 1.0);
    let dz = dx.iter().zip(dy).map(|(a, b)| 0.5 * (a - i * b)).collect();
    let dzb = dx.iter().zip(dy).map(|(a, b)| 0.5 * (a + i * b)).collect();
    (dz, dzb)
}

/// Observed order `log(e_coarse / e_fine) / log(h_coarse / h_fine)`.
pub fn observed_order(h_coarse: f64, e_coarse: f64, h_fine: f64, e_fine: f64) -> f64 {
    (e_coarse / e_fine).ln() / (h_coarse / h_fine).ln()
}

/// Least-squares slope of `log e` against `log h`; `None` for fewer than two usable points.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(h, e)| *h > 0.0 && *e > 0.0).map(|(h, e)| (h.ln(), e.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

pub fn sup_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(x: f64) -> Vec<Complex64> {
        vec![Complex64::new(x, 0.0)]
    }

    #[test]
    fn central4_exact_on_quartics() {
        let f = |x: f64| x.powi(4) - 2.0 * x.powi(3) + x;
        let df = |x: f64| 4.0 * x.powi(3) - 6.0 * x.powi(2) + 1.0;
        let (x, h) = (0.3, 0.1);
        let d = central4(&c(f(x - 2.0 * h)), &c(f(x - h)), &c(f(x + h)), &c(f(x + 2.0 * h)), h);
        assert_relative_eq!(d[0].re, df(x), epsilon = 1e-12);
    }

    #[test]
    fn central4_order() {
        let err = |h: f64| {
            let d = central4(&c((1.0 - 2.0 * h).sin()), &c((1.0 - h).sin()), &c((1.0 + h).sin()), &c((1.0 + 2.0 * h).sin()), h);
            (d[0].re - 1f64.cos()).abs()
        };
        let p = observed_order(0.1, err(0.1), 0.05, err(0.05));
        assert!((p - 4.0).abs() < 0.1, "{p}");
    }

    #[test]
    fn laplacian_of_quadratic() {
        let f = |x: f64, y: f64| x * x + 3.0 * y * y;
        let h = 0.25;
        let l = laplacian5(&c(f(0.0, 0.0)), &c(f(h, 0.0)), &c(f(-h, 0.0)), &c(f(0.0, h)), &c(f(0.0, -h)), h);
        assert_relative_eq!(l[0].re, 8.0, epsilon = 1e-12);
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = [0.1, 0.05, 0.025].iter().map(|&h| (h, 3.0 * h * h)).collect();
        assert_relative_eq!(loglog_slope(&pts).unwrap(), 2.0, epsilon = 1e-12);
        assert!(loglog_slope(&pts[..1]).is_none());
    }

    #[test]
    fn wirtinger_of_z() {
        // f = x + i y: df/dz = 1, df/dzbar = 0
        let (dz, dzb) = wirtinger(&[Complex64::new(1.0, 0.0)], &[Complex64::new(0.0, 1.0)]);
        assert_relative_eq!((dz[0] - 1.0).norm(), 0.0);
        assert_relative_eq!(dzb[0].norm(), 0.0);
    }
}
