//! Deterministic shortest-form number formatting with a fixed number of
//! significant digits, so identical runs serialize byte-identically on
//! every platform.

/// Formats `x` with `sig` significant digits, choosing fixed or scientific
/// notation like C's %g and trimming trailing zeros. `sig` must be ≥ 1.
pub fn format_sig(x: f64, sig: usize) -> String {
    assert!(sig >= 1, "need at least one significant digit");
    if x == 0.0 {
        return String::from("0");
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    // Round via exponential formatting, then decide presentation by the
    // rounded exponent (rounding may carry, e.g. 9.99e2 -> 1.0e3).
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp_str) = sci.split_once('e').expect("exponential format");
    let exp: i32 = exp_str.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    }
}

fn trim_zeros(s: &str) -> String {
    if !s.contains('.') {
        return String::from(s);
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    String::from(t)
}
