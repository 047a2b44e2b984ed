//! Globally adaptive Gauss–Kronrod (7/15) quadrature for log-space integrands
//! on the whole real line.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;
const SCAN: (f64, f64, f64) = (-60.0, 80.0, 0.05);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadFailure {
    pub tolerance: f64,
    pub achieved: f64,
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Piece {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (i, (&x, &w)) in XGK.iter().zip(&WGK).take(7).enumerate() {
        let pair = f(c - h * x) + f(c + h * x);
        kronrod += w * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    Piece { a, b, value: kronrod * h, error: ((kronrod - gauss) * h).abs() }
}

/// θ ∈ (−1, 1) ↦ s = θ/(1−θ²), with Jacobian ds/dθ.
fn to_line(theta: f64) -> (f64, f64) {
    let q = 1.0 - theta * theta;
    (theta / q, (1.0 + theta * theta) / (q * q))
}

fn from_line(s: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        // inverse of s = θ/(1−θ²), the root inside (−1, 1)
        (-1.0 + (1.0 + 4.0 * s * s).sqrt()) / (2.0 * s)
    }
}

/// `ln ∫ exp(log_f(s)) ds` over the real line, to relative tolerance `rel_tol`.
///
/// The integrand is rescaled by its maximum on a grid so that neither huge nor
/// tiny integrals overflow.
pub fn log_integral(log_f: impl Fn(f64) -> f64, rel_tol: f64) -> Result<f64, QuadFailure> {
    let (lo, hi, step) = SCAN;
    let mut peak = f64::NEG_INFINITY;
    let mut peak_at = 0.0;
    let mut s = lo;
    while s <= hi {
        let v = log_f(s);
        if v > peak {
            peak = v;
            peak_at = s;
        }
        s += step;
    }
    if peak == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let h = |theta: f64| {
        let (s, jac) = to_line(theta);
        if !s.is_finite() {
            return 0.0;
        }
        let v = (log_f(s) - peak).exp() * jac;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };

    let mut cuts: Vec<f64> = (0..=16).map(|i| -1.0 + i as f64 / 8.0).collect();
    let theta_peak = from_line(peak_at);
    for offset in [-1.0, 0.0, 1.0] {
        cuts.push(from_line(peak_at + offset));
    }
    cuts.push(theta_peak);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let mut pieces: Vec<Piece> = cuts.windows(2).map(|w| gk15(&h, w[0], w[1])).collect();
    loop {
        let total: f64 = pieces.iter().map(|p| p.value).sum();
        let err: f64 = pieces.iter().map(|p| p.error).sum();
        if err <= rel_tol * total.abs() {
            return Ok(peak + total.ln());
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(QuadFailure { tolerance: rel_tol, achieved: err / total.abs() });
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .expect("non-empty partition");
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Err(QuadFailure { tolerance: rel_tol, achieved: err / total.abs() });
        }
        pieces.push(gk15(&h, p.a, mid));
        pieces.push(gk15(&h, mid, p.b));
    }
}
