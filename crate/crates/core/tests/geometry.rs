use gl3sup::cartan::{cartan_norm, cartan_project, CartanVector};
use gl3sup::expansion::bezout;
use gl3sup::h3geom::{
    act, dual_point, gl2_block_heights, iwasawa, sandwich, siegel_height, siegel_reduce, to_matrix, H3Point,
    IntMatrix3, RealMatrix3,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_point(rng: &mut ChaCha8Rng, x: f64, y: (f64, f64)) -> H3Point<f64> {
    H3Point::new(
        rng.random_range(-x..x),
        rng.random_range(-x..x),
        rng.random_range(-x..x),
        rng.random_range(y.0..y.1),
        rng.random_range(y.0..y.1),
    )
    .unwrap()
}

fn rotation(axis: usize, th: f64) -> RealMatrix3<f64> {
    let (c, s) = (th.cos(), th.sin());
    let (p, q) = [(1, 2), (0, 2), (0, 1)][axis];
    let mut m = RealMatrix3::<f64>::identity();
    m.m[p][p] = c;
    m.m[q][q] = c;
    m.m[p][q] = -s;
    m.m[q][p] = s;
    m
}

fn random_orthogonal(rng: &mut ChaCha8Rng) -> RealMatrix3<f64> {
    let mut k = RealMatrix3::identity();
    for axis in [2, 1, 2, 0] {
        k = k.mul(&rotation(axis, rng.random_range(-3.2..3.2)));
    }
    if rng.random_bool(0.5) {
        k = k.mul(&RealMatrix3::diag(1.0, -1.0, 1.0));
    }
    k
}

fn random_gamma(rng: &mut ChaCha8Rng, steps: usize) -> IntMatrix3 {
    let mut g = IntMatrix3::identity();
    for _ in 0..steps {
        let s = match rng.random_range(0..4) {
            0 => IntMatrix3::s12(),
            1 => IntMatrix3::s23(),
            _ => IntMatrix3::unipotent(rng.random_range(-2..=2), rng.random_range(-2..=2), rng.random_range(-2..=2)),
        };
        g = s.checked_mul(&g).unwrap();
    }
    g
}

fn small_gamma(rng: &mut ChaCha8Rng) -> IntMatrix3 {
    loop {
        let e: [i64; 9] = std::array::from_fn(|_| rng.random_range(-3..=3));
        if let Ok(g) = IntMatrix3::new([[e[0], e[1], e[2]], [e[3], e[4], e[5]], [e[6], e[7], e[8]]]) {
            return g;
        }
    }
}

#[test]
fn sandwich_matches_matrix_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let z = random_point(&mut rng, 2.0, (0.2, 5.0));
        let g = small_gamma(&mut rng);
        let zm = to_matrix(&z);
        let direct = zm.inverse().unwrap().mul(&g.to_real()).mul(&zm);
        let explicit = sandwich(&z, &g);
        assert!(explicit.max_abs_diff(&direct) <= 1e-12 * direct.frobenius().max(1.0));
        assert_eq!(explicit.m[2][0], g.g() as f64 * z.y1 * z.y2);
    }
}

#[test]
fn sandwich_is_a_homomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let z = random_point(&mut rng, 0.5, (0.8, 3.0));
        let (g1, g2) = (small_gamma(&mut rng), small_gamma(&mut rng));
        let lhs = sandwich(&z, &g1).mul(&sandwich(&z, &g2));
        let rhs = sandwich(&z, &g1.checked_mul(&g2).unwrap());
        assert!(lhs.max_abs_diff(&rhs) <= 1e-10 * rhs.frobenius().max(1.0));
    }
}

#[test]
fn iwasawa_recovers_point_through_orthogonal_factor() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let z = random_point(&mut rng, 3.0, (0.1, 10.0));
        let s = rng.random_range(0.5..4.0);
        let m = to_matrix(&z).mul(&random_orthogonal(&mut rng)).scale(s);
        let iw = iwasawa(&m).unwrap();
        assert!(iw.point.max_abs_diff(&z) <= 1e-10, "{z:?} vs {:?}", iw.point);
        assert!((iw.scale - s).abs() <= 1e-12 * s);
        let back = to_matrix(&iw.point).mul(&iw.k).scale(iw.scale);
        assert!(back.max_abs_diff(&m) <= 1e-12 * m.frobenius());
        let kk = iw.k.mul(&iw.k.transpose());
        assert!(kk.max_abs_diff(&RealMatrix3::identity()) <= 1e-12);
    }
}

#[test]
fn projection_is_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let z = random_point(&mut rng, 1.0, (0.3, 3.0));
        let again = to_matrix(&iwasawa(&to_matrix(&z)).unwrap().point);
        assert!(again.max_abs_diff(&to_matrix(&z)) <= 1e-12);
    }
}

#[test]
fn dual_point_is_the_transpose_inverse_involution() {
    let w = IntMatrix3::new([[0, 0, 1], [0, 1, 0], [1, 0, 0]]).unwrap().to_real::<f64>();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let z = random_point(&mut rng, 1.0, (0.3, 4.0));
        let d = dual_point(&z);
        // x3 goes through x1 x2 - (x1 x2 - x3), so only it can pick up rounding
        let dd = dual_point(&d);
        assert_eq!((dd.x1, dd.x2, dd.y1, dd.y2), (z.x1, z.x2, z.y1, z.y2));
        assert!((dd.x3 - z.x3).abs() <= 4.0 * f64::EPSILON * (1.0 + (z.x1 * z.x2).abs()));
        assert_eq!(d.y1 * d.y2, z.y1 * z.y2);
        let m = w.mul(&to_matrix(&z).inverse().unwrap().transpose()).mul(&w);
        let via = iwasawa(&m).unwrap().point;
        assert!(via.max_abs_diff(&d) <= 1e-10, "{via:?} vs {d:?}");
    }
}

#[test]
fn block_heights_match_embedded_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let z = random_point(&mut rng, 0.5, (0.9, 2.0));
    for (c, d) in [(0, 1), (1, 0), (1, 1), (1, -1), (2, 1), (3, -2), (-5, 7)] {
        let (a, b) = bezout(c, d);
        let block = IntMatrix3::new([[a, b, 0], [c, d, 0], [0, 0, 1]]).unwrap();
        let moved = act(&block, &z).unwrap();
        let (y1, y2) = gl2_block_heights(c, d, &z).unwrap();
        assert!((moved.y1 - y1).abs() <= 1e-12 * y1 && (moved.y2 - y2).abs() <= 1e-12 * y2, "({c}, {d})");
    }
    assert!(gl2_block_heights(0, 0, &z).is_err());
}

#[test]
fn reduction_reaches_the_siegel_set() {
    let z = H3Point::new(0.0, 0.0, 0.0, 0.1, 0.1).unwrap();
    let (r, g) = siegel_reduce(&z).unwrap();
    let h = siegel_height::<f64>() - 1e-9;
    assert!(r.y1 >= h && r.y2 >= h);
    assert!(g.det().abs() == 1);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let z = random_point(&mut rng, 5.0, (0.02, 3.0));
        let (r, g) = siegel_reduce(&z).unwrap();
        assert!(r.y1 >= h && r.y2 >= h);
        assert!([r.x1, r.x2, r.x3].iter().all(|x| x.abs() <= 0.5 + 1e-9));
        assert!(g.det().abs() == 1);
        assert!(act(&g, &z).unwrap().max_abs_diff(&r) <= 1e-9);
    }
}

/// The diagonal sign matrices fix the point up to flipping `x`
/// coordinates, so reduced points agree only modulo these.
fn sign_variants(z: &H3Point<f64>) -> [H3Point<f64>; 4] {
    [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)].map(|(a, b)| H3Point {
        x1: a * z.x1,
        x2: b * z.x2,
        x3: a * b * z.x3,
        ..*z
    })
}

#[test]
fn reduction_is_invariant_under_the_group() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let z = random_point(&mut rng, 0.3, (1.2, 2.5));
        let (r0, _) = siegel_reduce(&z).unwrap();
        let moved = act(&random_gamma(&mut rng, 6), &z).unwrap();
        let (r1, _) = siegel_reduce(&moved).unwrap();
        let best = sign_variants(&r1).iter().map(|v| v.max_abs_diff(&r0)).fold(f64::INFINITY, f64::min);
        assert!(best <= 1e-8, "{r0:?} vs {r1:?}");
    }
}

#[test]
fn cartan_projection_invariances() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let g = to_matrix(&random_point(&mut rng, 1.0, (0.3, 3.0))).mul(&random_orthogonal(&mut rng));
        let c = cartan_project(&g).unwrap();
        let n = cartan_norm(&c);
        assert!((c.a1 + c.a2 + c.a3).abs() <= 1e-12 && c.a1 >= c.a2 && c.a2 >= c.a3);
        let inv = cartan_project(&g.inverse().unwrap()).unwrap();
        assert!((inv.a1 + c.a3).abs() <= 1e-10 && (inv.a3 + c.a1).abs() <= 1e-10);
        let tr = cartan_project(&g.transpose()).unwrap();
        assert!((cartan_norm(&tr) - n).abs() <= 1e-10);
        let (k1, k2) = (random_orthogonal(&mut rng), random_orthogonal(&mut rng));
        let moved = cartan_project(&k1.mul(&g).mul(&k2)).unwrap();
        assert!((moved.a1 - c.a1).abs() <= 1e-10 && (moved.a3 - c.a3).abs() <= 1e-10);
        let scaled = cartan_project(&g.scale(3.7)).unwrap();
        assert!((cartan_norm(&scaled) - n).abs() <= 1e-10);
    }
}

#[test]
fn cartan_examples() {
    let e = std::f64::consts::E;
    let c = cartan_project(&RealMatrix3::diag(e, 1.0, 1.0 / e)).unwrap();
    assert!((c.a1 - 1.0).abs() < 1e-14 && c.a2.abs() < 1e-14 && (c.a3 + 1.0).abs() < 1e-14);
    let mut shear = RealMatrix3::<f64>::identity();
    shear.m[0][1] = 1.0;
    let c = cartan_project(&shear).unwrap();
    let phi = ((1.0 + 5f64.sqrt()) / 2.0).ln();
    assert!((c.a1 - phi).abs() < 1e-13 && c.a2.abs() < 1e-13 && (c.a3 + phi).abs() < 1e-13);
    let v = CartanVector::from_unsorted([-1.0, 0.0, 1.0]);
    assert!((cartan_norm(&v) - 2f64.sqrt()).abs() < 1e-15);
    let f = CartanVector::from_unsorted([0.25f32, -0.5, 0.25]);
    assert!((cartan_norm(&f) - 0.375f32.sqrt() * 1.0).abs() < 1e-6);
}
