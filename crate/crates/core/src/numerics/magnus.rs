//! Propagation of the linear oscillator `q'' + w²(t) q = 0`.
//!
//! The one-step map is the fourth-order Magnus exponential with two Gauss
//! nodes. Each step is the exponential of a traceless 2×2 matrix, so the
//! propagator has unit determinant: the Wronskian of any two solutions is
//! preserved up to rounding no matter how coarse the step.

use crate::error::{Error, Result};

pub type Mat2 = [[f64; 2]; 2];

pub const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

#[derive(Debug, Clone, Copy)]
pub struct MagnusOptions {
    /// Local relative tolerance per step (step-doubling estimate).
    pub rel_tol: f64,
    /// Upper bound on the step size.
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for MagnusOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_step: f64::INFINITY,
            max_steps: 20_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Propagation {
    /// Fundamental matrix mapping (q, q') at the start to the end.
    pub matrix: Mat2,
    pub steps: usize,
    pub rejected: usize,
}

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// exp of the traceless matrix [[p, q], [r, -p]].
fn expm_traceless(p: f64, q: f64, r: f64) -> Mat2 {
    // M^2 = d I with d = p^2 + q r
    let d = p * p + q * r;
    let (c, s) = if d.abs() < 1e-8 {
        // series to O(d^4): error below 1e-32
        let c = 1.0 + d / 2.0 + d * d / 24.0 + d * d * d / 720.0;
        let s = 1.0 + d / 6.0 + d * d / 120.0 + d * d * d / 5040.0;
        (c, s)
    } else if d > 0.0 {
        let x = d.sqrt();
        (x.cosh(), x.sinh() / x)
    } else {
        let x = (-d).sqrt();
        (x.cos(), x.sin() / x)
    };
    [[c + s * p, s * q], [s * r, c - s * p]]
}

fn magnus_step<W: Fn(f64) -> f64>(w2: &W, t: f64, h: f64) -> Mat2 {
    const OFF: f64 = 0.288_675_134_594_812_9; // sqrt(3)/6
    let a = w2(t + h * (0.5 - OFF));
    let b = w2(t + h * (0.5 + OFF));
    let c = 3f64.sqrt() * h * h / 12.0 * (b - a);
    expm_traceless(c, h, -0.5 * h * (a + b))
}

fn norm(m: &Mat2) -> f64 {
    m.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Integrate from `t0` to `t1` (`t1 > t0`) and return the fundamental matrix.
pub fn propagate<W: Fn(f64) -> f64>(w2: W, t0: f64, t1: f64, opts: MagnusOptions) -> Result<Propagation> {
    if !(t1 >= t0) {
        return Err(Error::Ode(format!("invalid interval [{t0}, {t1}]")));
    }
    let mut m = IDENTITY;
    let mut t = t0;
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(Propagation {
            matrix: m,
            steps: 0,
            rejected: 0,
        });
    }
    let w_init = w2(t0).abs().sqrt().max(1e-300);
    let mut h = (0.1 / w_init).min(opts.max_step).min(span);
    let mut steps = 0;
    let mut rejected = 0;

    while t < t1 {
        if steps + rejected > opts.max_steps {
            return Err(Error::Ode(format!("step budget exhausted at t = {t} of {t1}")));
        }
        let last = t + h >= t1;
        let h_try = if last { t1 - t } else { h };

        let big = magnus_step(&w2, t, h_try);
        let half = 0.5 * h_try;
        let small = mul(&magnus_step(&w2, t + half, half), &magnus_step(&w2, t, half));
        let diff = [
            [big[0][0] - small[0][0], big[0][1] - small[0][1]],
            [big[1][0] - small[1][0], big[1][1] - small[1][1]],
        ];
        // Errors measured in the frame where q and q'/w are commensurate.
        let scale = norm(&small).max(1.0);
        let err = norm(&diff) / 15.0 / scale;
        let tol = opts.rel_tol;

        if err <= tol || h_try < 1e-14 * span {
            m = mul(&small, &m);
            t = if last { t1 } else { t + h_try };
            steps += 1;
        } else {
            rejected += 1;
        }
        let factor = if err == 0.0 {
            2.0
        } else {
            (0.9 * (tol / err).powf(0.2)).clamp(0.2, 2.0)
        };
        h = (h_try * factor).min(opts.max_step);
        if !h.is_finite() || h <= 0.0 {
            return Err(Error::Ode(format!("step size collapsed at t = {t}")));
        }
    }

    Ok(Propagation {
        matrix: m,
        steps,
        rejected,
    })
}

pub fn det(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_frequency_is_rotation() {
        let w = 3.0;
        let t = 7.3;
        let p = propagate(|_| w * w, 0.0, t, MagnusOptions::default()).unwrap();
        let m = p.matrix;
        assert_relative_eq!(m[0][0], (w * t).cos(), epsilon = 1e-12);
        assert_relative_eq!(m[0][1], (w * t).sin() / w, epsilon = 1e-12);
        assert_relative_eq!(m[1][0], -w * (w * t).sin(), epsilon = 1e-11);
        assert_relative_eq!(m[1][1], (w * t).cos(), epsilon = 1e-12);
    }

    #[test]
    fn airy_like_growth_matches_reference() {
        // q'' - q = 0 (w^2 = -1): cosh / sinh
        let p = propagate(|_| -1.0, 0.0, 2.0, MagnusOptions::default()).unwrap();
        assert_relative_eq!(p.matrix[0][0], 2f64.cosh(), max_relative = 1e-12);
        assert_relative_eq!(p.matrix[1][0], 2f64.sinh(), max_relative = 1e-12);
    }

    #[test]
    fn wronskian_preserved_for_rough_drive() {
        let p = propagate(
            |t: f64| 1.0 + 0.5 * (3.0 * t).sin() + 0.3 * (17.0 * t).cos(),
            0.0,
            200.0,
            MagnusOptions::default(),
        )
        .unwrap();
        assert!((det(&p.matrix) - 1.0).abs() < 1e-11);
    }

    #[test]
    fn step_ceiling_respected() {
        let opts = MagnusOptions {
            max_step: 0.01,
            ..Default::default()
        };
        let p = propagate(|_| 1.0, 0.0, 1.0, opts).unwrap();
        assert!(p.steps >= 100);
    }
}
