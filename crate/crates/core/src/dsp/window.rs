//! Window functions.

/// Edge-tapered analysis window of length `6 * n`.
///
/// The window is exactly 1.0 over the central 4n-sample span and rolls
/// off to zero over n samples on each side following a Blackman-shaped
/// taper `0.42 + 0.5 cos(pi u / n) + 0.08 cos(2 pi u / n)`, where `u`
/// is the distance in samples from the nearest span edge. Index n is
/// the first sample of the flat span and index 5n its last.
pub fn blackman_edge_window(n: usize) -> Vec<f64> {
    let taper = |u: f64| {
        let p = std::f64::consts::PI * u / n as f64;
        0.42 + 0.5 * p.cos() + 0.08 * (2.0 * p).cos()
    };
    (0..6 * n)
        .map(|i| {
            if i < n {
                taper((n - i) as f64)
            } else if i <= 5 * n {
                1.0
            } else {
                taper((i - 5 * n) as f64)
            }
        })
        .collect()
}

/// Classic symmetric Blackman window of length `n`, used by the
/// spectral estimators for its low sidelobes.
pub fn blackman_window(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| {
            let p = 2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64;
            0.42 - 0.5 * p.cos() + 0.08 * (2.0 * p).cos()
        })
        .collect()
}
