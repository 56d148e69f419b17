use std::f64::consts::{FRAC_PI_2, PI, TAU};

use gl3sup::gl2special::{
    gamma_half_modulus, gl2_whittaker, k_bessel_imag_scaled, k_bessel_with_path, ln_gamma, whittaker_sq_log_integral,
    whittaker_sq_tail_integral, BesselEvalConfig, BesselPath,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `K_0(x)` from the ascending series with harmonic numbers.
fn k0_series(x: f64) -> f64 {
    let q = x * x / 4.0;
    let (mut term, mut i0, mut rest, mut h) = (1.0, 1.0, 0.0, 0.0);
    for k in 1..60 {
        term *= q / (k * k) as f64;
        h += 1.0 / k as f64;
        i0 += term;
        rest += term * h;
    }
    -((x / 2.0).ln() + EULER_GAMMA) * i0 + rest
}

/// `K_{it}(x) = int_0^inf e^{-x cosh u} cos(t u) du` by a 160-bit trapezoid.
fn k_imag_mp(t: f64, x: f64) -> f64 {
    let prec = 160;
    let h = 1.0 / 256.0;
    let u_max = (2.0 * (400.0 / x).ln()).max(8.0);
    let n = (u_max / h) as usize;
    let hf = Float::with_val(prec, h);
    let mut sum = Float::new(prec);
    for j in 0..=n {
        let u = Float::with_val(prec, &hf * j as u32);
        let arg = Float::with_val(prec, -x * Float::with_val(prec, u.cosh_ref()));
        let w = Float::with_val(prec, arg.exp_ref()) * Float::with_val(prec, (Float::with_val(prec, &u * t)).cos_ref());
        if j == 0 {
            sum += w / 2u32;
        } else {
            sum += w;
        }
    }
    (sum * hf).to_f64()
}

/// Lanczos approximation with `g = 7`, nine coefficients.
fn lanczos_ln_gamma(z: Complex64) -> Complex64 {
    const C: [f64; 9] = [
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
    let z = z - 1.0;
    let mut a = Complex64::new(C[0], 0.0);
    for (k, c) in C.iter().enumerate().skip(1) {
        a += c / (z + k as f64);
    }
    let t = z + 7.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

#[test]
fn k0_matches_series() {
    let cfg = BesselEvalConfig::default();
    for x in [0.05, 0.3, 1.0, 2.5, 6.0] {
        let v = k_bessel_imag_scaled(0.0, x, &cfg).unwrap().to_f64();
        let o = k0_series(x);
        assert!((v - o).abs() <= 1e-10 * o, "x={x}: {v} vs {o}");
    }
}

#[test]
fn k0_large_argument_asymptotic() {
    let v = k_bessel_imag_scaled(0.0, 50.0, &BesselEvalConfig::default()).unwrap().to_f64();
    let lead = (PI / 100.0).sqrt() * (-50.0f64).exp();
    assert!((v / lead - 1.0).abs() < 0.01);
}

#[test]
fn small_argument_against_multiprecision_quadrature() {
    let cfg = BesselEvalConfig::default();
    for (t, x) in [(5.0, 0.01), (3.0, 0.2), (1.5, 2.0)] {
        let v = k_bessel_imag_scaled(t, x, &cfg).unwrap().to_f64();
        let o = k_imag_mp(t, x);
        let scale = (-FRAC_PI_2 * t).exp();
        assert!((v - o).abs() <= 1e-10 * scale, "t={t} x={x}: {v} vs {o}");
    }
}

#[test]
fn double_and_multiprecision_paths_meet_at_the_seam() {
    let hi = BesselEvalConfig { t_switch: 20.0, use_series: false, ..Default::default() };
    let lo = BesselEvalConfig { t_switch: 5.0, use_series: false, ..Default::default() };
    for t in [9.5, 10.5] {
        for x in [0.5, 3.0, 9.0, 12.0, 25.0] {
            let (a, pa) = k_bessel_with_path(t, x, &hi).unwrap();
            let (b, pb) = k_bessel_with_path(t, x, &lo).unwrap();
            assert_eq!(pa, BesselPath::Double);
            assert_eq!(pb, BesselPath::Multiprecision);
            let rel = (a.to_f64() / b.to_f64() - 1.0).abs();
            assert!(rel < 1e-8, "t={t} x={x}: relative gap {rel:e}");
        }
    }
}

#[test]
fn gamma_against_lanczos() {
    for (re, im) in [(0.5, 0.0), (0.5, 1.0), (0.5, 7.5), (2.3, -4.0), (0.5, 30.0), (11.0, 0.25)] {
        let z = Complex64::new(re, im);
        let a = ln_gamma(z);
        let b = lanczos_ln_gamma(z);
        assert!((a.re - b.re).abs() < 1e-10 * (1.0 + b.re.abs()), "{z}: {a} vs {b}");
    }
}

#[test]
fn gamma_half_modulus_values() {
    assert!((gamma_half_modulus(0.0).to_f64() - PI.sqrt()).abs() < 1e-14);
    let one = (PI / PI.cosh()).sqrt();
    assert!((gamma_half_modulus(1.0).to_f64() / one - 1.0).abs() < 1e-13);
    let lz = lanczos_ln_gamma(Complex64::new(0.5, 1.0)).re.exp();
    assert!((gamma_half_modulus(1.0).to_f64() / lz - 1.0).abs() < 1e-10);
    let mut prev = f64::INFINITY;
    for k in 0..=100 {
        let v = gamma_half_modulus(0.5 * k as f64).ln_abs();
        assert!(v < prev);
        prev = v;
    }
}

#[test]
fn whittaker_decays_past_the_turning_point() {
    let cfg = BesselEvalConfig::default();
    let x = 20.0;
    let w = gl2_whittaker(10.0, x, &cfg).unwrap().abs();
    assert!(w <= 10.0 * (-PI * x).exp(), "{w:e}");
}

#[test]
fn oscillatory_region_ceiling() {
    let cfg = BesselEvalConfig::default();
    let t: f64 = 100.0;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let x = rng.random_range(1e-6..2.0 * t / TAU);
        let w = gl2_whittaker(t, x, &cfg).unwrap().abs();
        let gap = (TAU * x - t).abs();
        let ceiling = 5.0 * t.powf(1.0 / 6.0).min(t.powf(0.25) * gap.powf(-0.25));
        assert!(w <= ceiling, "x={x}: {w} > {ceiling}");
    }
}

#[test]
fn log_integral_is_one_eighth() {
    let cfg = BesselEvalConfig::default();
    for t in [0.0, 5.0] {
        let v = whittaker_sq_log_integral(t, &cfg).unwrap();
        assert!((v - 0.125).abs() <= 1e-6, "t={t}: {v}");
    }
    let v = whittaker_sq_log_integral(20.0, &cfg).unwrap();
    assert!((v - 0.125).abs() <= 1e-5, "t=20: {v}");
}

#[test]
fn tail_at_zero_cut() {
    let cfg = BesselEvalConfig::default();
    let v = whittaker_sq_tail_integral(0.0, 0.0, &cfg).unwrap();
    assert!((v - 0.125).abs() <= 1e-6);
    let far = whittaker_sq_tail_integral(10.0, 20.0, &cfg).unwrap();
    let near = whittaker_sq_tail_integral(10.0, 0.0, &cfg).unwrap();
    assert!(far <= near);
}
