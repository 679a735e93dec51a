//! Bessel functions of the first kind for integer order.
//!
//! Small arguments (x² ≤ 4(n+1), where the ascending series has no
//! cancellation) use the series directly. Everything else uses Miller's
//! backward recurrence normalised by J₀ + 2ΣJ₂ₖ = 1.

use crate::error::{Error, Result};

/// Largest order accepted by the public entry points.
pub const MAX_ORDER: usize = 64;

const RESCALE_ABOVE: f64 = 1e250;

fn check(n: usize, x: f64) -> Result<()> {
    if n > MAX_ORDER {
        return Err(Error::Domain(format!("order {n} exceeds {MAX_ORDER}")));
    }
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("argument {x} must be finite and >= 0")));
    }
    Ok(())
}

/// J_n(x) for 0 ≤ n ≤ 64 and finite x ≥ 0.
pub fn bessel_j(n: usize, x: f64) -> Result<f64> {
    check(n, x)?;
    Ok(jn(n, x))
}

/// J_n′(x) through J_n′ = (J_{n−1} − J_{n+1})/2, with J₀′ = −J₁.
pub fn bessel_j_prime(n: usize, x: f64) -> Result<f64> {
    check(n, x)?;
    Ok(jn_prime(n, x))
}

/// J_n″(x) through J_n″ = (J_{n−2} − 2J_n + J_{n+2})/4, using J_{−k} = (−1)^k J_k.
pub fn bessel_j_second(n: usize, x: f64) -> Result<f64> {
    check(n, x)?;
    let lower = match n {
        0 => jn(2, x),
        1 => -jn(1, x),
        _ => jn(n - 2, x),
    };
    Ok((lower - 2.0 * jn(n, x) + jn(n + 2, x)) / 4.0)
}

pub(crate) fn jn_prime(n: usize, x: f64) -> f64 {
    if n == 0 {
        -jn(1, x)
    } else if x * x <= 4.0 * n as f64 {
        0.5 * (jn(n - 1, x) - jn(n + 1, x))
    } else {
        let j = orders(n + 1, x);
        0.5 * (j[n - 1] - j[n + 1])
    }
}

/// Unchecked J_n(x); orders slightly above [`MAX_ORDER`] are fine internally.
pub(crate) fn jn(n: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x * x <= 4.0 * (n as f64 + 1.0) {
        series(n, x)
    } else {
        orders(n, x)[n]
    }
}

fn series(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let q = half * half;
    let mut sum = term;
    let mut k = 0usize;
    loop {
        k += 1;
        term *= -q / (k as f64 * (n + k) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || k > 500 {
            break;
        }
    }
    sum
}

/// J_0(x)..=J_nmax(x) by Miller's algorithm (x > 0).
pub(crate) fn orders(nmax: usize, x: f64) -> Vec<f64> {
    let top = (nmax as f64).max(x.ceil());
    let mut start = (top + 30.0 + (40.0 * top).sqrt()) as usize;
    start += start % 2;
    let mut out = vec![0.0; nmax + 1];
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-300; // J_k
    let mut norm = 0.0;
    let two_over_x = 2.0 / x;
    for k in (1..=start).rev() {
        // cur = J_k, next = J_{k+1}
        if k <= nmax {
            out[k] = cur;
        }
        if k % 2 == 0 {
            norm += 2.0 * cur;
        }
        let prev = k as f64 * two_over_x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > RESCALE_ABOVE {
            cur /= RESCALE_ABOVE;
            next /= RESCALE_ABOVE;
            norm /= RESCALE_ABOVE;
            for v in out.iter_mut() {
                *v /= RESCALE_ABOVE;
            }
        }
    }
    out[0] = cur;
    norm += cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}
