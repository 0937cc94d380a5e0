use num_bigint::BigInt;
use num_rational::BigRational;

use skforms::arthur::{sk_eta_stream, EigenStream, SpecJson};
use skforms::cache::{siegel_from_str, siegel_to_string};
use skforms::cli::kohnen_radial_series;
use skforms::heckeop::{apply_tp, eigenvalue};
use skforms::jacobi::cusp_form_10_12;
use skforms::maass::sk_lift;
use skforms::qseries::newform_onedim;
use skforms::quad::HalfIntMatrix;

fn scaled(t: HalfIntMatrix, s: i64) -> HalfIntMatrix {
    HalfIntMatrix::new(s * t.n, s * t.r, s * t.m)
}

#[test]
fn radial_series_matches_lift_coefficients() {
    let detmax4 = 3 * 4u64.pow(5);
    for k in [10u32, 12] {
        let lift = sk_lift(&cusp_form_10_12(k, detmax4).unwrap(), detmax4).unwrap();
        let f = newform_onedim(2 * k - 2, 50).unwrap();
        let t0 = HalfIntMatrix::new(1, 1, 1);
        let a0 = lift.coeff(&t0).unwrap();
        let series = kohnen_radial_series(&f, k, -3, &a0, 2, 5).unwrap();
        for (j, want) in series.iter().enumerate() {
            assert_eq!(&lift.coeff(&scaled(t0, 1 << j)).unwrap(), want, "k={k} j={j}");
        }
    }
}

#[test]
fn eigenvalues_survive_a_cache_roundtrip() {
    let f = sk_lift(&cusp_form_10_12(12, 400).unwrap(), 400).unwrap();
    let g = siegel_from_str(&siegel_to_string(&f)).unwrap();
    assert_eq!(f, g);
    let image = apply_tp(&g, 2).unwrap();
    let eta = BigRational::from_integer(BigInt::from(2784));
    for t in image.region() {
        assert_eq!(image.coeff(&t).unwrap(), &eta * g.coeff(&t).unwrap(), "{t}");
    }
    assert_eq!(eigenvalue(&g, 2).unwrap(), eta);
}

#[test]
fn eta_stream_agrees_with_hecke_on_the_lift() {
    let f = newform_onedim(18, 20).unwrap();
    let eta = sk_eta_stream(&f, 10, 3).unwrap();
    let lift = sk_lift(&cusp_form_10_12(10, 900).unwrap(), 900).unwrap();
    assert_eq!(BigRational::from_integer(eta[2].clone()), eigenvalue(&lift, 2).unwrap());
    assert_eq!(BigRational::from_integer(eta[3].clone()), eigenvalue(&lift, 3).unwrap());
}

#[test]
fn scan_spec_resolves_to_exact_streams() {
    let spec: SpecJson = serde_json::from_str(r#"{"kind": "SaitoKurokawa", "weight": 18, "chi0": -3}"#).unwrap();
    let stream = spec.resolve(200).unwrap().stream(100).unwrap();
    let lambda0 = EigenStream::elliptic(18, 200).unwrap();
    for (p, v) in stream {
        let u = (p as f64 + 1.0) / (p as f64).sqrt();
        let chi = match p % 3 {
            0 => 0.0,
            1 => 1.0,
            _ => -1.0,
        };
        assert!((v - lambda0.value(p).unwrap() - u * chi).abs() < 1e-9, "p={p}");
    }
}
