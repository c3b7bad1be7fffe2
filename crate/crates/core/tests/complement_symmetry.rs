use miptlab_core::ensemble::{sample_unitary, EnsembleParams};
use miptlab_core::measurement::{build_projector, lambda_p};
use miptlab_core::rng::RngSeed;
use miptlab_core::spectral::ks_two_sample;

fn continuum(values: &[f64], eps: f64) -> Vec<f64> {
    values
        .iter()
        .copied()
        .filter(|&x| x > eps && x < 1.0 - eps)
        .collect()
}

/// `P U P` and `P̄ U P̄` share their singular values away from 0 and 1.
#[test]
fn complementary_projectors_share_continuum() {
    let dim = 128;
    let u = sample_unitary(&EnsembleParams::cayley(dim, 0.5), RngSeed::new(7, 0)).unwrap();
    let p = build_projector(dim, 40).unwrap();
    let a = lambda_p(&u, &p).unwrap().spectrum().unwrap();
    let b = lambda_p(&u, &p.complement()).unwrap().spectrum().unwrap();
    let (ca, cb) = (continuum(a.values(), 1e-6), continuum(b.values(), 1e-6));
    assert_eq!(ca.len(), cb.len());
    for (x, y) in ca.iter().zip(&cb) {
        assert!((x - y).abs() < 1e-9, "{x} vs {y}");
    }
}

#[test]
fn mirrored_fillings_match_in_distribution() {
    let dim = 512;
    let params = EnsembleParams::cayley(dim, 2.0);
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for i in 0..4 {
        let u = sample_unitary(&params, RngSeed::new(11, i)).unwrap();
        let s = lambda_p(&u, &build_projector(dim, 192).unwrap())
            .unwrap()
            .spectrum()
            .unwrap();
        lo.extend(continuum(s.values(), 1e-3));
        let u = sample_unitary(&params, RngSeed::new(12, i)).unwrap();
        let s = lambda_p(&u, &build_projector(dim, 320).unwrap())
            .unwrap()
            .spectrum()
            .unwrap();
        hi.extend(continuum(s.values(), 1e-3));
    }
    let (stat, p) = ks_two_sample(&lo, &hi).unwrap();
    assert!(p > 0.01, "KS {stat} p {p}");
}
