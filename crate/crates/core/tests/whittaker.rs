use gl3sup::gl2special::BesselEvalConfig;
use gl3sup::h3geom::H3Point;
use gl3sup::spectral::SpectralTriple;
use gl3sup::whittaker3::{e_phase, jw_diagonal, jw_full, verify_lemma42};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn st(t1: f64, t2: f64) -> SpectralTriple<f64> {
    SpectralTriple::new(t1, t2).unwrap()
}

#[test]
fn unipotent_part_only_moves_the_phase() {
    let cfg = BesselEvalConfig::default();
    let nu = st(1.5, 0.5);
    let (y1, y2) = (0.7, 1.3);
    let base = jw_diagonal(&nu, y1, y2, &cfg).unwrap();
    let z0 = H3Point::new(0.0, 0.0, 0.0, y1, y2).unwrap();
    assert_eq!(jw_full(&nu, &z0, 1, &cfg).unwrap(), base);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let z = H3Point::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), y1, y2)
            .unwrap();
        let plus = jw_full(&nu, &z, 1, &cfg).unwrap();
        let minus = jw_full(&nu, &z, -1, &cfg).unwrap();
        assert!((plus.norm() - base.norm()).abs() <= 1e-12 * base.norm());
        assert!((plus / minus - e_phase(2.0 * z.x2)).norm() <= 1e-12);
    }
    assert!(jw_full(&nu, &z0, 2, &cfg).is_err());
}

#[test]
fn quadrature_is_self_consistent() {
    let loose = BesselEvalConfig::default();
    let tight = BesselEvalConfig { rel_tol: 1e-14, abs_tol: 1e-15, ..Default::default() };
    for (t1, t2, y1, y2) in [(1.0, 1.0, 0.5, 0.5), (3.0, 0.5, 1.0, 0.3), (2.0, 5.0, 0.8, 1.7), (12.0, 9.0, 1.0, 2.0)] {
        let a = jw_diagonal(&st(t1, t2), y1, y2, &loose).unwrap();
        let b = jw_diagonal(&st(t1, t2), y1, y2, &tight).unwrap();
        assert!((a - b).norm() <= 1e-8 * b.norm(), "({t1}, {t2}, {y1}, {y2}): {a} vs {b}");
    }
}

#[test]
fn lemma42_grid_at_small_order() {
    let ys: Vec<f64> = (0..8).map(|k| 0.5 * 1.55f64.powi(k)).collect();
    let grid: Vec<(f64, f64)> = ys.iter().flat_map(|&a| ys.iter().map(move |&b| (a, b))).collect();
    let r = verify_lemma42(&[st(1.0, 1.0)], &grid, 3.0, 100.0, &BesselEvalConfig::default()).unwrap();
    let c = r.summary_value("max_ratio").unwrap();
    assert!(r.passed && c.is_finite() && c > 0.0, "{c}");
}

/// Sign of W~ near the origin for small orders. The value is reported, not
/// asserted: nothing guarantees it.
#[test]
fn sign_near_the_origin_is_reported() {
    let cfg = BesselEvalConfig::default();
    let mut positive = 0;
    let mut total = 0;
    for t in [0.0, 0.25, 0.5] {
        for y in [0.02, 0.05, 0.1] {
            let w = jw_diagonal(&st(t, t), y, y, &cfg).unwrap();
            total += 1;
            if w.re > 0.0 {
                positive += 1;
            }
        }
    }
    println!("W~ > 0 at {positive} of {total} points with t1 = t2 <= 0.5, y <= 0.1");
}
