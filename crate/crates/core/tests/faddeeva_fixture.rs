use num_complex::Complex64;
use stark_core::cerf::faddeeva_w;

const FIXTURE: &str = include_str!("fixtures/faddeeva_oracle.csv");

fn rows() -> Vec<(Complex64, Complex64)> {
    FIXTURE
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            (Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]))
        })
        .collect()
}

#[test]
fn fixture_has_both_half_planes() {
    let r = rows();
    assert!(r.len() >= 200);
    assert!(r.iter().any(|(z, _)| z.im < -1.0));
    assert!(r.iter().any(|(z, _)| z.im > 1.0));
}

#[test]
fn w_matches_high_precision_fixture() {
    let mut worst = (0.0, Complex64::new(0.0, 0.0));
    for (z, expected) in rows() {
        let got = faddeeva_w(z).unwrap();
        let err = (got - expected).norm() / expected.norm();
        if err > worst.0 {
            worst = (err, z);
        }
    }
    assert!(worst.0 < 1e-12, "worst relative error {:e} at {}", worst.0, worst.1);
}
