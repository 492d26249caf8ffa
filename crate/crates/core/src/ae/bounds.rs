use std::f64::consts::PI;

/// `2a√(μ(1−μ)) + a²`: how far `sin²` can move when its argument moves by at most `a`.
pub fn lemma1_bound(mu: f64, a: f64) -> f64 {
    2.0 * a * (mu * (1.0 - mu)).max(0.0).sqrt() + a * a
}

/// Fejér kernel `K_t(y) = sin²(2^t π y) / (2^{2t} sin²(π y))`, with `K_t(k) = 1` at integers.
pub fn fejer_kernel(y: f64, t: usize) -> f64 {
    let states = (t as f64).exp2();
    let d = (PI * y).sin();
    if d.abs() < 1e-12 {
        return 1.0;
    }
    let num = (states * PI * y).sin();
    num * num / (states * states * d * d)
}

/// Closed-form outcome distribution of phase estimation on a state with
/// equal weight on eigenphases `θ` and `−θ`:
/// `P(x) = ½ (K_t(θ − x/2^t) + K_t(θ + x/2^t))`.
pub fn two_eigenphase_distribution(theta: f64, t: usize) -> Vec<f64> {
    let states = 1usize << t;
    (0..states)
        .map(|x| {
            let y = x as f64 / states as f64;
            0.5 * (fejer_kernel(theta - y, t) + fejer_kernel(theta + y, t))
        })
        .collect()
}

/// The phase `θ ∈ [0, ½]` with `sin²(πθ) = p`.
pub fn phase_of_probability(p: f64) -> f64 {
    p.clamp(0.0, 1.0).sqrt().asin() / PI
}
