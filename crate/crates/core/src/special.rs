//! Normal CDF and its inverse, the chi-square survival function, and Laplace draws.

use rand::Rng;
use statrs::function::{erf, gamma};

/// Standard normal CDF `Φ(x)`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erf::erfc(-x / std::f64::consts::SQRT_2)
}

fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Inverse standard normal CDF `Φ⁻¹(p)`: Acklam's rational approximation
/// followed by one Halley refinement step.
pub fn inverse_normal_cdf(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383_577_518_672_69e2,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };

    // Halley step; the residual Φ(x) - p is taken on the smaller tail to avoid cancellation.
    let e = if x < 0.0 {
        normal_cdf(x) - p
    } else {
        (1.0 - p) - 0.5 * erf::erfc(x / std::f64::consts::SQRT_2)
    };
    let u = e / normal_pdf(x);
    x - u / (1.0 + x * u / 2.0)
}

/// Upper tail `P(χ²_dof ≥ x)` = `Q(dof/2, x/2)`.
pub fn chi_square_sf(x: f64, dof: usize) -> f64 {
    assert!(dof > 0, "chi-square needs at least one degree of freedom");
    if x <= 0.0 {
        return 1.0;
    }
    gamma::gamma_ur(dof as f64 / 2.0, x / 2.0).clamp(0.0, 1.0)
}

/// One draw from Laplace(0, scale) by inverse CDF.
pub fn laplace<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> f64 {
    if scale == 0.0 {
        return 0.0;
    }
    // u in (-0.5, 0.5]
    let u: f64 = 0.5 - rng.random::<f64>();
    -scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
}
