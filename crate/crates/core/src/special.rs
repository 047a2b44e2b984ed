//! Special functions backing every distribution in the crate.
//!
//! Log-gamma, the regularized incomplete gamma and beta functions, and the
//! Stirling-series pieces used to keep the incomplete-function prefactors
//! accurate when the shape parameters reach the millions.

use std::f64::consts::PI;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 200_000;

/// Above this shape value the Stirling forms replace direct log-gamma sums.
const STIRLING_CUTOFF: f64 = 10.0;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Stirling remainder `ln Γ(x) − [(x − ½)ln x − x + ½ln 2π]` for x ≥ 10.
pub fn stirling_delta(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    r * (1.0 / 12.0
        + r2 * (-1.0 / 360.0
            + r2 * (1.0 / 1260.0
                + r2 * (-1.0 / 1680.0
                    + r2 * (1.0 / 1188.0 + r2 * (-691.0 / 360_360.0 + r2 / 156.0))))))
}

/// Natural log of the gamma function for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x.is_nan() || x <= 0.0 {
        return f64::NAN;
    }
    if x >= STIRLING_CUTOFF {
        return (x - 0.5) * x.ln() - x + LN_SQRT_2PI + stirling_delta(x);
    }
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + acc.ln()
}

/// `ln(1 + u) − u`, accurate for small |u|.
pub fn log1pmx(u: f64) -> f64 {
    if u.abs() > 0.1 {
        return u.ln_1p() - u;
    }
    // -u²/2 + u³/3 - u⁴/4 + ...
    let mut term = u * u;
    let mut sum = 0.0;
    let mut k = 2.0;
    let mut sign = -1.0;
    loop {
        let add = sign * term / k;
        sum += add;
        if add.abs() <= EPS * sum.abs() || k > 60.0 {
            break;
        }
        term *= u;
        k += 1.0;
        sign = -sign;
    }
    sum
}

/// `ln C(n, k)`. Exact products for small n, log-gamma otherwise.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    if n <= 60 {
        // C(60, 30) < 2^57; multiplicative form stays exact in u128
        let mut c: u128 = 1;
        for i in 0..k as u128 {
            c = c * (n as u128 - i) / (i + 1);
        }
        return (c as f64).ln();
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// `a ln x − x − ln Γ(a)`: log of the incomplete-gamma prefactor.
fn ln_gamma_prefactor(a: f64, x: f64) -> f64 {
    if a >= STIRLING_CUTOFF {
        let u = (x - a) / a;
        a * log1pmx(u) + 0.5 * a.ln() - LN_SQRT_2PI - stirling_delta(a)
    } else {
        a * x.ln() - x - ln_gamma(a)
    }
}

/// Regularized incomplete gamma pair `(P(a, x), Q(a, x))`.
///
/// The smaller tail is computed directly so neither loses relative accuracy.
pub fn gamma_inc(a: f64, x: f64) -> (f64, f64) {
    debug_assert!(a > 0.0);
    if x <= 0.0 {
        return (0.0, 1.0);
    }
    if x.is_infinite() {
        return (1.0, 0.0);
    }
    let front = ln_gamma_prefactor(a, x);
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                break;
            }
        }
        let p = (front + sum.ln()).exp().min(1.0);
        (p, 1.0 - p)
    } else {
        // modified Lentz on the Legendre continued fraction
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < EPS {
                break;
            }
        }
        let q = (front + h.ln()).exp().min(1.0);
        (1.0 - q, q)
    }
}

/// `ln` of x given the pair `(x, 1 − x)`, picking the accurate branch.
fn ln_from_pair(x: f64, y: f64) -> f64 {
    if x < 0.5 {
        x.ln()
    } else {
        (-y).ln_1p()
    }
}

/// `a ln x + b ln y − ln B(a, b)` with `y = 1 − x`.
pub fn ln_beta_power_terms(a: f64, b: f64, x: f64, y: f64) -> f64 {
    if a >= STIRLING_CUTOFF && b >= STIRLING_CUTOFF {
        let s = a + b;
        let x0 = a / s;
        let y0 = b / s;
        let lx = ((x - x0) / x0).ln_1p();
        let ly = ((y - y0) / y0).ln_1p();
        a * lx + b * ly + 0.5 * (a * b / s).ln() - LN_SQRT_2PI - stirling_delta(a)
            - stirling_delta(b)
            + stirling_delta(s)
    } else if a >= STIRLING_CUTOFF || b >= STIRLING_CUTOFF {
        // one large shape (big), one small (small)
        let (big, small, ln_big_side, ln_small_side) = if a >= b {
            (a, b, ln_from_pair(x, y), ln_from_pair(y, x))
        } else {
            (b, a, ln_from_pair(y, x), ln_from_pair(x, y))
        };
        big * ln_big_side + small * ln_small_side - ln_gamma(small)
            + small * big.ln()
            + (big + small - 0.5) * (small / big).ln_1p()
            - small
            - stirling_delta(big)
            + stirling_delta(big + small)
    } else {
        a * ln_from_pair(x, y) + b * ln_from_pair(y, x) - ln_beta(a, b)
    }
}

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta pair `(I_x(a, b), 1 − I_x(a, b))`.
///
/// Takes `y = 1 − x` explicitly so callers with an accurate complement
/// (t and F tails) do not lose it to cancellation.
pub fn beta_inc(a: f64, b: f64, x: f64, y: f64) -> (f64, f64) {
    debug_assert!(a > 0.0 && b > 0.0);
    if x <= 0.0 {
        return (0.0, 1.0);
    }
    if y <= 0.0 {
        return (1.0, 0.0);
    }
    if x < (a + 1.0) / (a + b + 2.0) {
        let front = ln_beta_power_terms(a, b, x, y);
        let p = ((front.exp()) * beta_cf(a, b, x) / a).min(1.0);
        (p, 1.0 - p)
    } else {
        let front = ln_beta_power_terms(b, a, y, x);
        let q = ((front.exp()) * beta_cf(b, a, y) / b).min(1.0);
        (1.0 - q, q)
    }
}
