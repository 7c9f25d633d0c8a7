//! Laplace coefficients
//! `b_s^(j)(α) = (1/π) ∫₀^{2π} cos(jθ) (1 − 2α cos θ + α²)^{−s} dθ`.
//!
//! Small α uses the product of the binomial series of `(1 − αe^{±iθ})^{−s}`,
//! which has no cancellation; larger α uses adaptive Gauss–Kronrod quadrature,
//! where the coefficients are large enough for its absolute accuracy.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Absolute tolerance requested from the quadrature.
const QUAD_TOL: f64 = 1e-14;
const MAX_DEPTH: u32 = 30;
/// Below this α the binomial product series converges in a few dozen terms.
const SERIES_ALPHA: f64 = 0.5;

// 15-point Kronrod nodes on [-1, 1] (non-negative half) and weights;
// the odd-indexed nodes carry the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (k, err) = gauss_kronrod(f, a, b);
    // below a few ulps of the panel value the error estimate is roundoff
    if err <= tol || err <= 50.0 * f64::EPSILON * k.abs() || depth >= MAX_DEPTH {
        return k;
    }
    let mid = 0.5 * (a + b);
    adaptive(f, a, mid, 0.5 * tol, depth + 1) + adaptive(f, mid, b, 0.5 * tol, depth + 1)
}

/// Laplace coefficient `b_s^(j)(α)` for `0 < α < 1`.
pub fn laplace_coefficient(s: f64, j: u32, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("Laplace coefficient needs 0 < alpha < 1, got {alpha}")));
    }
    if !(s > 0.0) {
        return Err(Error::domain(format!("Laplace coefficient needs s > 0, got {s}")));
    }
    if alpha <= SERIES_ALPHA {
        return Ok(binomial_product(s, j, alpha));
    }
    Ok(quadrature(s, j, alpha))
}

/// `2 Σ_n c_n c_{n+j} α^{2n+j}` with `c_n = (s)_n / n!`.
fn binomial_product(s: f64, j: u32, alpha: f64) -> f64 {
    let mut cj = 1.0;
    for k in 0..j {
        cj *= (s + k as f64) / (k as f64 + 1.0) * alpha;
    }
    let x = alpha * alpha;
    let (mut cn, mut cnj) = (1.0, cj);
    let mut sum = cnj;
    for n in 0..1000 {
        let (nf, m) = (n as f64, (n + j) as f64);
        cn *= (s + nf) / (nf + 1.0);
        cnj *= (s + m) / (m + 1.0) * x;
        let term = cn * cnj;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    2.0 * sum
}

fn quadrature(s: f64, j: u32, alpha: f64) -> f64 {
    let jf = j as f64;
    let integrand = |theta: f64| (jf * theta).cos() * (1.0 - 2.0 * alpha * theta.cos() + alpha * alpha).powf(-s);
    // the integrand is even about π, so integrate over [0, π] and double;
    // panels keep the peak near θ = 0 resolved at large α
    let panels = 8 + j as usize;
    let width = PI / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let a = p as f64 * width;
        sum += adaptive(&integrand, a, a + width, QUAD_TOL / panels as f64, 0);
    }
    2.0 * sum / PI
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `b_s^(j) = 2 (s)_j/j! α^j F(s, s+j; j+1; α²)`.
    fn hypergeometric_series(s: f64, j: u32, alpha: f64) -> f64 {
        let mut prefactor = 2.0;
        for k in 0..j {
            prefactor *= (s + k as f64) / (k as f64 + 1.0) * alpha;
        }
        let x = alpha * alpha;
        let (mut term, mut sum) = (1.0, 1.0);
        let jf = j as f64;
        for k in 0..10_000 {
            let kf = k as f64;
            term *= (s + kf) * (s + jf + kf) / ((jf + 1.0 + kf) * (kf + 1.0)) * x;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        prefactor * sum
    }

    /// Plain trapezoid rule on the full period (spectrally accurate for periodic integrands).
    fn trapezoid(s: f64, j: u32, alpha: f64, n: usize) -> f64 {
        let h = 2.0 * PI / n as f64;
        (0..n)
            .map(|i| {
                let th = i as f64 * h;
                (j as f64 * th).cos() * (1.0 - 2.0 * alpha * th.cos() + alpha * alpha).powf(-s)
            })
            .sum::<f64>()
            * h
            / PI
    }

    #[test]
    fn small_alpha_limits() {
        for s in [0.5, 1.5, 2.5] {
            assert!((laplace_coefficient(s, 0, 1e-9).unwrap() - 2.0).abs() < 1e-8);
            for j in 1..4 {
                assert!(laplace_coefficient(s, j, 1e-9).unwrap().abs() < 1e-8);
            }
        }
    }

    #[test]
    fn three_half_first_order_at_one_half() {
        let q = laplace_coefficient(1.5, 1, 0.5).unwrap();
        let series = hypergeometric_series(1.5, 1, 0.5);
        let trap = trapezoid(1.5, 1, 0.5, 4096);
        assert!((series - trap).abs() < 1e-12, "oracles disagree: {series} {trap}");
        assert!((q - series).abs() < 1e-12, "{q} {series}");
    }

    #[test]
    fn matches_series_over_grid() {
        for &s in &[0.5, 1.5, 2.5] {
            for j in 0..4 {
                for &alpha in &[0.05, 0.2, 0.5, 0.7, 0.85] {
                    let q = laplace_coefficient(s, j, alpha).unwrap();
                    let r = hypergeometric_series(s, j, alpha);
                    assert!((q - r).abs() < 1e-10, "s={s} j={j} alpha={alpha}: {q} vs {r}");
                }
            }
        }
    }

    #[test]
    fn methods_agree_at_the_switch() {
        for &s in &[0.5, 1.5, 2.5] {
            for j in 0..6 {
                for &alpha in &[0.3, SERIES_ALPHA, 0.6] {
                    let (p, q) = (binomial_product(s, j, alpha), quadrature(s, j, alpha));
                    assert!((p / q - 1.0).abs() < 1e-12, "s={s} j={j} alpha={alpha}: {p} vs {q}");
                }
            }
        }
    }

    #[test]
    fn small_coefficients_keep_relative_accuracy() {
        let (q, r) = (laplace_coefficient(0.5, 4, 0.05).unwrap(), hypergeometric_series(0.5, 4, 0.05));
        assert!((q / r - 1.0).abs() < 1e-13, "{q} {r}");
    }

    #[test]
    fn domain_errors() {
        assert!(laplace_coefficient(1.5, 1, 0.0).is_err());
        assert!(laplace_coefficient(1.5, 1, 1.0).is_err());
        assert!(laplace_coefficient(1.5, 1, -0.3).is_err());
    }
}
