//! Least-squares fits and grid-limit extrapolation.

use crate::error::{Error, Result};

/// Ordinary least squares for y ≈ slope·x + intercept.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidArgument(
            "linear fit needs at least two paired samples".into(),
        ));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 0.0 {
        return Err(Error::InvalidArgument(
            "degenerate fit: zero variance in abscissae".into(),
        ));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Log–log power-law slope of positive data.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.iter().chain(ys).any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidArgument(
            "log-log fit needs strictly positive data".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    Ok(linear_fit(&lx, &ly)?.0)
}

/// Classical Richardson extrapolation with estimated order on a geometric
/// ladder h, 2h, 4h, …: fits y(h) = y* + C·hᵖ through the last three levels.
/// Returns the finest value if the differences are not one-signed.
pub fn richardson_power(hs: &[f64], ys: &[f64]) -> Result<f64> {
    check_ladder(hs, ys)?;
    let k = ys.len();
    let (y1, y2, y3) = (ys[k - 3], ys[k - 2], ys[k - 1]); // coarse → fine
    let d1 = y2 - y1;
    let d2 = y3 - y2;
    if d1 * d2 <= 0.0 || d2.abs() >= d1.abs() {
        return Ok(y3);
    }
    let rho = d2 / d1; // = 2^{-p}
    Ok(y3 + d2 * rho / (1.0 - rho))
}

/// Grid-limit extrapolation for Hardy pencil eigenvalues.
///
/// Minimising sequences concentrate in a boundary layer whose discrete
/// resolution enters through ln(1/h), so the level values follow
/// y(h) = y* + a/(ln(1/h) + b)² much more closely than a power law. With
/// exactly three levels the model is interpolated; with more it is fitted by
/// least squares over b. Falls back to power-law Richardson when the level
/// differences are not one-signed and decreasing.
pub fn extrapolate_log_model(hs: &[f64], ys: &[f64]) -> Result<f64> {
    check_ladder(hs, ys)?;
    let ls: Vec<f64> = hs.iter().map(|h| (1.0 / h).ln()).collect();
    let monotone = ys
        .windows(2)
        .all(|w| (w[1] - w[0]).signum() == (ys[1] - ys[0]).signum() && w[1] != w[0]);
    if !monotone {
        return richardson_power(hs, ys);
    }
    if ys.len() == 3 {
        // solve the interpolation condition for b by bisection
        let target = (ys[0] - ys[1]) / (ys[1] - ys[2]);
        let ratio = |b: f64| {
            let w = |l: f64| (l + b).powi(-2);
            (w(ls[0]) - w(ls[1])) / (w(ls[1]) - w(ls[2]))
        };
        let mut lo = -ls[0] + 1e-3;
        let mut hi = 1e4;
        if !(ratio(lo) >= target && ratio(hi) <= target) {
            return richardson_power(hs, ys);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if ratio(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let b = 0.5 * (lo + hi);
        let w = |l: f64| (l + b).powi(-2);
        let a = (ys[1] - ys[2]) / (w(ls[1]) - w(ls[2]));
        Ok(ys[2] - a * w(ls[2]))
    } else {
        // least-squares over a grid of b values
        let mut best: Option<(f64, f64)> = None;
        let b_min = -ls[0] + 0.05;
        for k in 0..3000 {
            let b = b_min + (30.0 - b_min) * (k as f64) / 2999.0;
            let xs: Vec<f64> = ls.iter().map(|&l| (l + b).powi(-2)).collect();
            let (a, y_star) = match linear_fit(&xs, ys) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let res: f64 = xs
                .iter()
                .zip(ys)
                .map(|(&x, &y)| (y_star + a * x - y).powi(2))
                .sum();
            if best.map_or(true, |(r, _)| res < r) {
                best = Some((res, y_star));
            }
        }
        best.map(|(_, y)| y)
            .ok_or_else(|| Error::InvalidArgument("log-model fit failed".into()))
    }
}

fn check_ladder(hs: &[f64], ys: &[f64]) -> Result<()> {
    if hs.len() != ys.len() || hs.len() < 3 {
        return Err(Error::InvalidArgument(
            "extrapolation needs at least three levels".into(),
        ));
    }
    for w in hs.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::InvalidArgument("grid levels must decrease".into()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_power_data_is_recovered() {
        assert_relative_eq!(log_log_slope(&[0.2, 0.1, 0.05], &[0.04, 0.01, 0.0025]).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn linear_fit_recovers_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [2.5, 4.5, 6.5, 8.5];
        let (s, b) = linear_fit(&xs, &ys).unwrap();
        assert_relative_eq!(s, 2.0, epsilon = 1e-12);
        assert_relative_eq!(b, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn richardson_recovers_power_limit() {
        // y = 3 + h^1.5 on h, h/2, h/4
        let hs = [0.4, 0.2, 0.1];
        let ys: Vec<f64> = hs.iter().map(|&h: &f64| 3.0 + h.powf(1.5)).collect();
        assert_relative_eq!(richardson_power(&hs, &ys).unwrap(), 3.0, epsilon = 1e-10);
    }

    #[test]
    fn log_model_recovers_logarithmic_limit() {
        let hs = [1.0 / 256.0, 1.0 / 512.0, 1.0 / 1024.0];
        let ys: Vec<f64> = hs
            .iter()
            .map(|h| 0.25 + 9.87 / ((1.0f64 / h).ln() + 3.0).powi(2))
            .collect();
        let y = extrapolate_log_model(&hs, &ys).unwrap();
        assert_relative_eq!(y, 0.25, epsilon = 1e-6);
    }

    #[test]
    fn log_model_lsq_with_five_levels() {
        let hs = [1.0 / 32.0, 1.0 / 48.0, 1.0 / 64.0, 1.0 / 96.0, 1.0 / 128.0];
        let ys: Vec<f64> = hs
            .iter()
            .map(|h| 0.25 + 6.4 / ((1.0f64 / h).ln() + 1.4).powi(2))
            .collect();
        let y = extrapolate_log_model(&hs, &ys).unwrap();
        assert_relative_eq!(y, 0.25, epsilon = 1e-3);
    }

    #[test]
    fn nonmonotone_data_falls_back_to_finest() {
        let hs = [0.4, 0.2, 0.1];
        let ys = [1.0, 1.2, 1.1];
        let y = extrapolate_log_model(&hs, &ys).unwrap();
        assert_relative_eq!(y, 1.1);
    }

    #[test]
    fn degenerate_fit_is_rejected() {
        assert!(linear_fit(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(log_log_slope(&[0.1, -0.2], &[1.0, 2.0]).is_err());
    }
}
