//! Lower hull of `(i, f[i])` by Andrew's monotone chain.

/// Vertex indices of the lower hull; collinear middle points are dropped.
pub(crate) fn lower_hull_indices(f: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(f.len());
    for k in 0..f.len() {
        while hull.len() >= 2 {
            let i = hull[hull.len() - 2];
            let j = hull[hull.len() - 1];
            // keep j only if it lies strictly below the chord from i to k
            let cross = (j - i) as f64 * (f[k] - f[i]) - (k - i) as f64 * (f[j] - f[i]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    hull
}

pub(crate) fn lower_envelope(f: &[f64]) -> Vec<f64> {
    let hull = lower_hull_indices(f);
    let mut out = f.to_vec();
    for w in hull.windows(2) {
        let (i, k) = (w[0], w[1]);
        let span = (k - i) as f64;
        for j in i + 1..k {
            let t = (j - i) as f64 / span;
            let v = f[i] + t * (f[k] - f[i]);
            out[j] = v.min(f[j]);
        }
    }
    out
}
