//! Standard normal density, distribution function, and quantile.

use crate::error::{domain, Result};

pub(crate) const FRAC_1_SQRT_2PI: f64 = 0.3989422804014326779399460599343819;

/// phi(x) without input validation; used on hot paths.
#[inline]
pub(crate) fn pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Phi(x) through the complementary error function. Relative error is at the
/// erfc level (~1e-16) in the body and the far lower tail underflows
/// gradually instead of rounding to 0 at moderate |x|.
#[inline]
pub(crate) fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return domain(format!("normal_pdf: non-finite input {x}"));
    }
    Ok(pdf(x))
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return domain(format!("normal_cdf: non-finite input {x}"));
    }
    Ok(cdf(x))
}

/// Standard normal quantile, for p strictly inside (0, 1).
pub fn inverse_normal_cdf(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("inverse_normal_cdf: p = {p} outside (0, 1)"));
    }
    Ok(quantile(p))
}

// Wichura's PPND16 (algorithm AS 241): three rational approximations, one for
// the central region and two for the tails, good to ~1e-16 relative over the
// full double range.
const AS241_A: [f64; 8] = [
    3.3871328727963666080e0,
    1.3314166789178437745e2,
    1.9715909503065514427e3,
    1.3731693765509461125e4,
    4.5921953931549871457e4,
    6.7265770927008700853e4,
    3.3430575583588128105e4,
    2.5090809287301226727e3,
];
const AS241_B: [f64; 8] = [
    1.0,
    4.2313330701600911252e1,
    6.8718700749205790830e2,
    5.3941960214247511077e3,
    2.1213794301586595867e4,
    3.9307895800092710610e4,
    2.8729085735721942674e4,
    5.2264952788528545610e3,
];
const AS241_C: [f64; 8] = [
    1.42343711074968357734e0,
    4.63033784615654529590e0,
    5.76949722146069140550e0,
    3.64784832476320460504e0,
    1.27045825245236838258e0,
    2.41780725177450611770e-1,
    2.27238449892691845833e-2,
    7.74545014278341407640e-4,
];
const AS241_D: [f64; 8] = [
    1.0,
    2.05319162663775882187e0,
    1.67638483018380384940e0,
    6.89767334985100004550e-1,
    1.48103976427480074590e-1,
    1.51986665636164571966e-2,
    5.47593808499534494600e-4,
    1.05075007164441684324e-9,
];
const AS241_E: [f64; 8] = [
    6.65790464350110377720e0,
    5.46378491116411436990e0,
    1.78482653991729133580e0,
    2.96560571828504891230e-1,
    2.65321895265761230930e-2,
    1.24266094738807843860e-3,
    2.71155556874348757815e-5,
    2.01033439929228813265e-7,
];
const AS241_F: [f64; 8] = [
    1.0,
    5.99832206555887937690e-1,
    1.36929880922735805310e-1,
    1.48753612908506148525e-2,
    7.86869131145613259100e-4,
    1.84631831751005468180e-5,
    1.42151175831644588870e-7,
    2.04426310338993978564e-15,
];

#[inline]
fn horner(cs: &[f64; 8], x: f64) -> f64 {
    let mut r = 0.0;
    for c in cs.iter().rev() {
        r = r * x + c;
    }
    r
}

/// AS 241 quantile; caller guarantees 0 < p < 1.
pub(crate) fn quantile(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q * horner(&AS241_A, r) / horner(&AS241_B, r);
    }
    let mut r = if q < 0.0 { p } else { 1.0 - p };
    r = (-r.ln()).sqrt();
    let z = if r <= 5.0 {
        r -= 1.6;
        horner(&AS241_C, r) / horner(&AS241_D, r)
    } else {
        r -= 5.0;
        horner(&AS241_E, r) / horner(&AS241_F, r)
    };
    if q < 0.0 {
        -z
    } else {
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pdf_values() {
        assert_eq!(normal_pdf(0.0).unwrap(), FRAC_1_SQRT_2PI);
        // direct evaluation of the defining expression at double precision
        assert!((normal_pdf(1.0).unwrap() - 0.24197072451914337).abs() < 1e-16);
        assert_eq!(normal_pdf(2.5).unwrap(), normal_pdf(-2.5).unwrap());
        assert!(normal_pdf(f64::NAN).is_err());
        assert!(normal_pdf(f64::INFINITY).is_err());
    }

    #[test]
    fn cdf_values() {
        assert_eq!(normal_cdf(0.0).unwrap(), 0.5);
        assert!(normal_cdf(8.0).unwrap() >= 1.0 - 1e-14);
        // high-precision erf reference value
        assert!((normal_cdf(1.0).unwrap() - 0.8413447460685429).abs() < 3e-16);
        assert!(normal_cdf(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn cdf_complement() {
        for &x in &[0.0, 0.3, 1.0, 2.5, 4.0, 6.5, 8.0] {
            let s = normal_cdf(x).unwrap() + normal_cdf(-x).unwrap();
            assert!((s - 1.0).abs() <= 1e-15, "x={x}: {s}");
        }
    }

    #[test]
    fn quantile_roundtrip() {
        // cdf is an independent route (erfc); the roundtrip checks both. The
        // tolerance grows with z^2 because d(log p)/dz ~ |z| in the tail.
        let mut p = 1e-300;
        while p < 0.5 {
            let z = quantile(p);
            let back = cdf(z);
            let rel = (back - p).abs() / p;
            assert!(rel <= 8e-16 * (1.0 + z * z), "p={p:e} z={z} rel={rel:e}");

            // upper branch: y = 1 - p rounds, but 1 - y is then exact
            // (Sterbenz), so the complementary roundtrip is well posed
            let y = 1.0 - p;
            if y < 1.0 {
                let py = 1.0 - y;
                let z2 = quantile(y);
                let back2 = cdf(-z2);
                let rel2 = (back2 - py).abs() / py;
                assert!(rel2 <= 8e-16 * (1.0 + z2 * z2), "y={y} rel={rel2:e}");
                // near the center 1 - p is near-exact and the central
                // rational form is odd, so symmetry holds tightly
                if p >= 0.075 {
                    assert!((z2 + z).abs() <= 1e-15 * (1.0 + z.abs()), "p={p:e}");
                }
            }
            p *= 97.0;
        }
        assert_eq!(quantile(0.5), 0.0);
        assert!((quantile(0.975) - 1.959963984540054).abs() < 1e-14);
        assert!(inverse_normal_cdf(0.0).is_err());
        assert!(inverse_normal_cdf(1.0).is_err());
        assert!(inverse_normal_cdf(f64::NAN).is_err());
    }
}
