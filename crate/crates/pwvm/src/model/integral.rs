//! Closed-form Gaussian segment integrals.
//!
//! Inside one bin the relative displacement of a dyad is affine in local
//! time, `p + v s`, so the intensity restricted to the bin is a Gaussian in
//! `s` and its zeroth/first/second moments have erf closed forms. All
//! prefactors are assembled in log space and large erf arguments go through
//! the scaled complement `erfcx`, so the evaluation neither overflows nor
//! loses the tiny tails to cancellation.

use super::VELOCITY_EPS;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Scaled complementary error function `exp(x^2) * erfc(x)` for `x >= 0`.
///
/// Below the crossover the direct product is exact enough (both factors stay
/// in normal range up to x = 12); above it an asymptotic expansion in
/// `1/(2x^2)` converges to full precision within a few terms.
pub(crate) fn erfcx(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x <= 12.0 {
        libm::erfc(x) * (x * x).exp()
    } else {
        let inv = 1.0 / (2.0 * x * x);
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..=8u32 {
            term *= -((2 * k - 1) as f64) * inv;
            sum += term;
        }
        sum / (x * SQRT_PI)
    }
}

/// Moments of the intensity over one in-bin segment `[s_lower, s_upper]`
/// (local bin time):
///
/// * `i0 = ∫ exp(c - ||p + v s||^2) ds`
/// * `i1 = ∫ s exp(c - ||p + v s||^2) ds`
/// * `i2 = ∫ s^2 exp(c - ||p + v s||^2) ds`
///
/// `i0` is the integrated intensity; `i1`/`i2` feed the analytic gradients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentMoments {
    pub i0: f64,
    pub i1: f64,
    pub i2: f64,
}

impl SegmentMoments {
    /// Compute the three moments for bias sum `c`, relative position `p` at
    /// the bin start and relative velocity `v`.
    pub fn compute(c: f64, p: &[f64], v: &[f64], s_lower: f64, s_upper: f64) -> Self {
        debug_assert_eq!(p.len(), v.len());
        if s_upper <= s_lower {
            return Self { i0: 0.0, i1: 0.0, i2: 0.0 };
        }
        let q: f64 = p.iter().map(|x| x * x).sum();
        let vv: f64 = v.iter().map(|x| x * x).sum();
        let dv = vv.sqrt();
        if dv < VELOCITY_EPS {
            // Constant-distance limit; exact as v -> 0.
            let w = (c - q).exp();
            return Self {
                i0: w * (s_upper - s_lower),
                i1: w * (s_upper * s_upper - s_lower * s_lower) / 2.0,
                i2: w * (s_upper.powi(3) - s_lower.powi(3)) / 3.0,
            };
        }
        let pv: f64 = p.iter().zip(v).map(|(a, b)| a * b).sum();
        let r = pv / dv;
        // Substitution u = dv*s + r turns the exponent into -(u^2 - r^2) - q.
        let u_l = dv * s_lower + r;
        let u_u = dv * s_upper + r;
        // w(s) = exp(c - ||p + v s||^2), with the exponent formed as a single
        // sum so intermediate exp(r^2) never appears.
        let w_exponent = |s: f64| c - q - dv * s * (dv * s + 2.0 * r);
        let w_l = w_exponent(s_lower).exp();
        let w_u = w_exponent(s_upper).exp();
        // ae = exp(c + r^2 - q) * ∫_{u_l}^{u_u} exp(-u^2) du. Cauchy-Schwarz
        // gives r^2 <= q, so the prefactor exponent is bounded by c. When both
        // erf arguments share a sign the difference goes through erfcx to keep
        // the tail cancellation-free; exp(g)*erfc(u) == erfcx(u)*w(s).
        let g = c + r * r - q;
        let half_sqrt_pi = 0.5 * SQRT_PI;
        let ae = if u_l >= 0.0 {
            half_sqrt_pi * (erfcx(u_l) * w_l - erfcx(u_u) * w_u)
        } else if u_u <= 0.0 {
            half_sqrt_pi * (erfcx(-u_u) * w_u - erfcx(-u_l) * w_l)
        } else {
            half_sqrt_pi * g.exp() * (libm::erf(u_u) - libm::erf(u_l))
        };

        let i0 = ae / dv;
        let i1 = (0.5 * (w_l - w_u) - r * ae) / (dv * dv);
        let i2 = (0.5 * (u_l * w_l - u_u * w_u) + (0.5 + r * r) * ae - r * (w_l - w_u))
            / (dv * dv * dv);
        Self { i0, i1, i2 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;

    /// Adaptive Simpson quadrature with relative tolerance, the independent
    /// oracle for the closed forms.
    pub(crate) fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
        fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64) {
            let m = 0.5 * (a + b);
            let fm = f(m);
            ((b - a) / 6.0 * (fa + 4.0 * fm + fb), fm)
        }
        fn recurse<F: Fn(f64) -> f64>(
            f: &F,
            a: f64,
            fa: f64,
            b: f64,
            fb: f64,
            whole: f64,
            fm: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let (left, flm) = simpson(f, a, fa, m, fm);
            let (right, frm) = simpson(f, m, fm, b, fb);
            let delta = left + right - whole;
            if depth > 48 || delta.abs() <= 15.0 * tol {
                left + right + delta / 15.0
            } else {
                recurse(f, a, fa, m, fm, left, flm, tol / 2.0, depth + 1)
                    + recurse(f, m, fm, b, fb, right, frm, tol / 2.0, depth + 1)
            }
        }
        let fa = f(a);
        let fb = f(b);
        let (whole, fm) = simpson(f, a, fa, b, fb);
        // Pre-refine once so a vanishing first estimate cannot freeze the
        // absolute tolerance at zero.
        let m = 0.5 * (a + b);
        let (left, _) = simpson(f, a, fa, m, fm);
        let (right, _) = simpson(f, m, fm, b, fb);
        let scale = whole.abs().max((left + right).abs()).max(f64::MIN_POSITIVE);
        recurse(f, a, fa, b, fb, whole, fm, scale * rel_tol, 0)
    }

    fn oracle_moments(c: f64, p: &[f64], v: &[f64], lo: f64, hi: f64) -> (f64, f64, f64) {
        let integrand = |pow: i32| {
            move |s: f64| {
                let q: f64 =
                    p.iter().zip(v).map(|(a, b)| (a + b * s) * (a + b * s)).sum();
                s.powi(pow) * (c - q).exp()
            }
        };
        let tol = 1e-12;
        (
            adaptive_simpson(&integrand(0), lo, hi, tol),
            adaptive_simpson(&integrand(1), lo, hi, tol),
            adaptive_simpson(&integrand(2), lo, hi, tol),
        )
    }

    #[test]
    fn erfcx_matches_direct_product_and_tail() {
        for &x in &[0.0, 0.3, 1.0, 4.0, 11.9] {
            let direct = libm::erfc(x) * (x * x).exp();
            assert_relative_eq!(erfcx(x), direct, max_relative = 1e-12);
        }
        // Continuity across the crossover.
        assert_relative_eq!(erfcx(12.0 - 1e-9), erfcx(12.0 + 1e-9), max_relative = 1e-10);
        // Tail against the two-term asymptote.
        let x = 50.0;
        let asym = (1.0 - 1.0 / (2.0 * x * x)) / (x * SQRT_PI);
        assert_relative_eq!(erfcx(x), asym, max_relative = 1e-5);
    }

    #[test]
    fn unit_intensity_over_unit_interval() {
        let m = SegmentMoments::compute(0.0, &[0.0, 0.0], &[0.0, 0.0], 0.0, 1.0);
        assert_relative_eq!(m.i0, 1.0);
        assert_relative_eq!(m.i1, 0.5);
        assert_relative_eq!(m.i2, 1.0 / 3.0);
    }

    #[test]
    fn moments_match_quadrature_on_random_segments() {
        let mut rng = crate::rng::stream_rng(21, 0);
        for trial in 0..300 {
            let dim = rng.gen_range(1..=3);
            let c: f64 = rng.gen_range(-2.0..2.0);
            let p: Vec<f64> = (0..dim).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let scale = match trial % 4 {
                0 => 0.0,
                1 => 1e-9,
                2 => 1e-6,
                _ => rng.gen_range(0.1..4.0),
            };
            let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0) * scale).collect();
            let lo = rng.gen_range(0.0..0.5);
            let hi = lo + rng.gen_range(1e-4..0.5);
            let m = SegmentMoments::compute(c, &p, &v, lo, hi);
            let (o0, o1, o2) = oracle_moments(c, &p, &v, lo, hi);
            assert_relative_eq!(m.i0, o0, max_relative = 1e-8, epsilon = 1e-300);
            assert_relative_eq!(m.i1, o1, max_relative = 1e-8, epsilon = 1e-300);
            assert_relative_eq!(m.i2, o2, max_relative = 1e-7, epsilon = 1e-300);
        }
    }

    #[test]
    fn far_apart_dyads_keep_relative_precision() {
        // Large |p| pushes both erf arguments deep into one tail; the result
        // is tiny but must stay accurate relative to quadrature.
        let p = [8.0, 1.0];
        let v = [2.0, 0.5];
        let m = SegmentMoments::compute(0.0, &p, &v, 0.0, 1.0);
        let (o0, _, _) = oracle_moments(0.0, &p, &v, 0.0, 1.0);
        assert!(m.i0 > 0.0);
        assert_relative_eq!(m.i0, o0, max_relative = 1e-7);
    }

    #[test]
    fn additivity_over_adjacent_segments() {
        let p = [0.4, -0.2];
        let v = [1.3, 0.7];
        let whole = SegmentMoments::compute(0.5, &p, &v, 0.0, 0.9).i0;
        let a = SegmentMoments::compute(0.5, &p, &v, 0.0, 0.35).i0;
        let b = SegmentMoments::compute(0.5, &p, &v, 0.35, 0.9).i0;
        assert_relative_eq!(whole, a + b, epsilon = 1e-12);
    }
}
