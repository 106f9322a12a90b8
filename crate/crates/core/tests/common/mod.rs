#![allow(dead_code)]

/// `P[Bin(n, p) > k]`, summed directly from the probability mass function.
pub fn binomial_tail_above(n: u32, p: f64, k: u32) -> f64 {
    let mut coeff = 1.0f64;
    let mut below = 0.0;
    for i in 0..=k.min(n) {
        if i > 0 {
            coeff = coeff * (n - i + 1) as f64 / i as f64;
        }
        below += coeff * p.powi(i as i32) * (1.0 - p).powi((n - i) as i32);
    }
    (1.0 - below).max(0.0)
}

/// Block error rate with full input masking and no injected errors: the
/// punctured coordinate is the pad with probability `1/(n+1)`, leaving all
/// `n` codeword coordinates, otherwise `n - 1` survive.
pub fn block_error_oracle(v: u32, eps: f64) -> f64 {
    let n = 1u32 << v;
    let t = (1u32 << (v - 2)) - 1;
    let ell = (n + 1) as f64;
    binomial_tail_above(n, eps, t) / ell + binomial_tail_above(n - 1, eps, t) * n as f64 / ell
}

/// Standard deviation of a proportion estimated from `trials` samples.
pub fn binomial_sigma(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}
