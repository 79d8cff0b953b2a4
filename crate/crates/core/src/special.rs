//! Bessel functions of the first kind and factorial helpers.

/// n! as f64 (exact up to 22!, correctly rounded beyond).
pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// J_p(x) for integer order p >= 0.
///
/// Miller's backward recurrence normalised with J0 + 2 sum J_2k = 1.
pub fn bessel_j(p: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if p == 0 { 1.0 } else { 0.0 };
    }
    let ax = x.abs();
    let sign = if x < 0.0 && p % 2 == 1 { -1.0 } else { 1.0 };
    let top = (p as f64).max(ax);
    let mut start = (top + 30.0 + (50.0 * top).sqrt()) as u32;
    start += start % 2;

    let mut j_next = 0.0;
    let mut j_cur = 1e-300;
    let mut norm = 0.0;
    let mut result = 0.0;
    for k in (1..=start).rev() {
        // J_{k-1} = (2k/x) J_k - J_{k+1}
        let j_prev = 2.0 * k as f64 / ax * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        if j_cur.abs() > 1e250 {
            j_cur *= 1e-250;
            j_next *= 1e-250;
            norm *= 1e-250;
            result *= 1e-250;
        }
        let order = k - 1;
        if order == p {
            result = j_cur;
        }
        if order % 2 == 0 && order > 0 {
            norm += 2.0 * j_cur;
        }
    }
    norm += j_cur;
    sign * result / norm
}
