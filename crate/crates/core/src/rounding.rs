/// Rounds `ratio * n` half away from zero, clamped to `0..=n`.
pub fn round_half_away(ratio: f64, n: usize) -> usize {
    let scaled = ratio * n as f64;
    // f64::round is std-only; emulate half-away-from-zero for non-negative values
    let floor = scaled as usize;
    let frac = scaled - floor as f64;
    let rounded = if frac >= 0.5 { floor + 1 } else { floor };
    rounded.min(n)
}
