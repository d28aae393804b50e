//! Dense complex matrix exponential by scaling and squaring with diagonal
//! Padé approximants (degrees 3, 5, 7, 9, 13), following Higham's choice of
//! degree by the 1-norm of the argument.

use nalgebra::DMatrix;
use num_complex::Complex64;

type CMat = DMatrix<Complex64>;

const THETA: [(usize, f64); 5] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_230e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068),
    (13, 5.371_920_351_148_152),
];

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17_297_280.0,
    8_648_640.0,
    1_995_840.0,
    277_200.0,
    25_200.0,
    1_512.0,
    56.0,
    1.0,
];
const B9: [f64; 10] = [
    17_643_225_600.0,
    8_821_612_800.0,
    2_075_673_600.0,
    302_702_400.0,
    30_270_240.0,
    2_162_160.0,
    110_880.0,
    3_960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

pub fn one_norm(a: &CMat) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn scaled(a: &CMat, s: f64) -> CMat {
    a.map(|z| z * s)
}

fn pade_low(a: &CMat, b: &[f64]) -> (CMat, CMat) {
    let n = a.nrows();
    let id = CMat::identity(n, n);
    let a2 = a * a;
    let mut u_sum = scaled(&id, b[1]);
    let mut v = scaled(&id, b[0]);
    let mut power = id;
    let m = b.len() - 1;
    for k in 1..=m / 2 {
        power = &power * &a2;
        u_sum += scaled(&power, b[2 * k + 1]);
        v += scaled(&power, b[2 * k]);
    }
    (a * u_sum, v)
}

fn pade13(a: &CMat) -> (CMat, CMat) {
    let n = a.nrows();
    let b = &B13;
    let id = CMat::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = scaled(&a6, b[13]) + scaled(&a4, b[11]) + scaled(&a2, b[9]);
    let u = &a6 * inner_u + scaled(&a6, b[7]) + scaled(&a4, b[5]) + scaled(&a2, b[3]) + scaled(&id, b[1]);
    let u = a * u;
    let inner_v = scaled(&a6, b[12]) + scaled(&a4, b[10]) + scaled(&a2, b[8]);
    let v = &a6 * inner_v + scaled(&a6, b[6]) + scaled(&a4, b[4]) + scaled(&a2, b[2]) + scaled(&id, b[0]);
    (u, v)
}

/// `exp(a)` for a square complex matrix.
pub fn expm(a: &CMat) -> CMat {
    assert!(a.is_square(), "expm requires a square matrix");
    let n = a.nrows();
    if n == 0 {
        return a.clone();
    }
    let norm = one_norm(a);

    let mut squarings = 0;
    let (u, v) = match THETA.iter().find(|(_, th)| norm <= *th) {
        Some((3, _)) => pade_low(a, &B3),
        Some((5, _)) => pade_low(a, &B5),
        Some((7, _)) => pade_low(a, &B7),
        Some((9, _)) => pade_low(a, &B9),
        _ => {
            let theta13 = THETA[4].1;
            if norm > theta13 {
                squarings = (norm / theta13).log2().ceil().max(0.0) as i32;
            }
            let scaled_a = scaled(a, 0.5f64.powi(squarings));
            pade13(&scaled_a)
        }
    };

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .expect("Padé denominator is nonsingular for the selected degree");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_diff(a: &CMat, b: &CMat) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn zero_gives_identity() {
        let z = CMat::zeros(4, 4);
        assert!(max_diff(&expm(&z), &CMat::identity(4, 4)) < 1e-15);
    }

    #[test]
    fn diagonal_matches_scalar_exp() {
        for scale in [1e-3, 0.2, 0.9, 2.0, 5.0, 40.0] {
            let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
                c(scale, 0.0),
                c(-scale, 0.5),
                c(0.0, scale),
            ]));
            let e = expm(&d);
            for i in 0..3 {
                let want = d[(i, i)].exp();
                assert!((e[(i, i)] - want).norm() <= 1e-12 * want.norm().max(1.0));
            }
        }
    }

    #[test]
    fn rotation_generator() {
        // exp([[0, -t], [t, 0]]) = rotation by t
        for t in [0.01, 0.3, 1.0, 3.0, 25.0] {
            let a = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(-t, 0.0), c(t, 0.0), c(0.0, 0.0)]);
            let e = expm(&a);
            let want = CMat::from_row_slice(
                2,
                2,
                &[c(t.cos(), 0.0), c(-t.sin(), 0.0), c(t.sin(), 0.0), c(t.cos(), 0.0)],
            );
            assert!(max_diff(&e, &want) < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn hermitian_generator_matches_eigendecomposition() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for &scale in &[0.05, 0.7, 3.0] {
            let n = 12;
            let mut h = CMat::zeros(n, n);
            for i in 0..n {
                h[(i, i)] = c(rng.gen_range(-1.0..1.0), 0.0);
                for j in 0..i {
                    let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    h[(i, j)] = z;
                    h[(j, i)] = z.conj();
                }
            }
            h *= c(scale, 0.0);
            let eig = h.clone().symmetric_eigen();
            let phases = eig.eigenvalues.map(|l| c(0.0, -l).exp());
            let v = &eig.eigenvectors;
            let want = v * CMat::from_diagonal(&phases) * v.adjoint();
            let got = expm(&h.map(|z| z * c(0.0, -1.0)));
            assert!(max_diff(&got, &want) < 1e-12, "scale {scale}");
        }
    }
}
