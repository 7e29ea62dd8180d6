use crate::error::{Error, Result};

/// Least-squares slope of `log2(value)` against `j`.
pub fn decay_slope(series: &[(i32, f64)]) -> Result<f64> {
    if series.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "{} points; a slope fit needs at least 3",
            series.len()
        )));
    }
    if let Some((j, v)) = series.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidInput(format!(
            "value {v} at j = {j} is not positive"
        )));
    }
    let pts: Vec<(f64, f64)> = series.iter().map(|(j, v)| (*j as f64, v.log2())).collect();
    Ok(slope(&pts))
}

pub(crate) fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut k = i;
        while k + 1 < idx.len() && v[idx[k + 1]] == v[idx[i]] {
            k += 1;
        }
        // ties share the average rank
        let avg = (i + k) as f64 / 2.0 + 1.0;
        for t in i..=k {
            r[idx[t]] = avg;
        }
        i = k + 1;
    }
    r
}

/// Spearman rank correlation.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let rx = ranks(x);
    let ry = ranks(y);
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let c: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    c / (vx * vy).sqrt()
}

/// True when every step strictly decreases.
pub fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}
