//! Property tests for the structural invariants.

use proptest::prelude::*;

use borel_resum::engine::{conformal_w, conformal_z, MomentCache, Resummator};
use borel_resum::quad::QuadratureSpec;
use borel_resum::series::{
    builtin_series, load_series, BuiltinModel, CoefficientSeries, SeriesFormat, SeriesOrigin,
};

fn small_series() -> impl Strategy<Value = CoefficientSeries> {
    (
        prop::collection::vec(-50.0f64..50.0, 2..8),
        prop_oneof![Just(1.0f64), 0.1f64..10.0],
    )
        .prop_filter_map("valid series", |(coeffs, pf)| {
            CoefficientSeries::new("prop", coeffs, pf, SeriesOrigin::File).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conformal_round_trip(z in 1e-6f64..1e3, p in 1e-2f64..1e2) {
        let w = conformal_w(z, p);
        prop_assert!((0.0..1.0).contains(&w));
        let back = conformal_z(w, p).unwrap();
        prop_assert!((back - z).abs() <= 1e-13 * z);
    }

    #[test]
    fn partial_sum_difference_is_last_term(series in small_series(), lam in -2.0f64..2.0) {
        let order = series.order();
        for n in 1..=order {
            let diff = series.partial_sum(n, lam).unwrap() - series.partial_sum(n - 1, lam).unwrap();
            let term = series.prefactor() * series.coefficient(n) * lam.powi(n as i32);
            let scale = series.partial_sum(n, lam).unwrap().abs().max(term.abs()).max(1.0);
            prop_assert!((diff - term).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn auxiliary_reconstruction(series in small_series(), lam in 0.01f64..2.0) {
        // force f_0 = 0, then λ·S'(λ) must reproduce the parent exactly
        let mut coeffs = series.coefficients().to_vec();
        coeffs[0] = 0.0;
        let parent =
            CoefficientSeries::new("parent", coeffs, series.prefactor(), SeriesOrigin::File)
                .unwrap();
        let aux = parent.auxiliary().unwrap();
        for n in 0..aux.order() + 1 {
            let rec = lam * aux.partial_sum(n, lam).unwrap();
            let direct = parent.partial_sum(n + 1, lam).unwrap();
            let scale = direct.abs().max(1e-30);
            prop_assert!((rec - direct).abs() <= 1e-14 * scale);
        }
    }

    #[test]
    fn csv_round_trip_reproduces_evaluations(series in small_series(), lam in 0.05f64..2.0) {
        // one row of comma-separated coefficients is the whole format
        let csv: String = series
            .coefficients()
            .iter()
            .map(|c| format!("{c}"))
            .collect::<Vec<_>>()
            .join(",");
        let reloaded = load_series(csv.as_bytes(), SeriesFormat::Csv).unwrap();
        // shortest round-trip float formatting parses back bit-exactly
        let twin = CoefficientSeries::new(
            "twin",
            series.coefficients().to_vec(),
            1.0,
            SeriesOrigin::File,
        )
        .unwrap();
        for n in 0..=series.order() {
            let a = twin.partial_sum(n, lam).unwrap();
            let b = reloaded.partial_sum(n, lam).unwrap();
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn moments_decrease_and_stay_in_unit_interval(
        lam in 0.05f64..20.0,
        p in 0.05f64..50.0,
    ) {
        let cache = MomentCache::new();
        let data = cache.moments(6, lam, p, &QuadratureSpec::default()).unwrap();
        for m in 1..=6 {
            prop_assert!(data.values[m] > 0.0);
            prop_assert!(data.values[m] < data.values[m - 1]);
        }
    }

    #[test]
    fn decomposition_identity(
        lam in 0.1f64..5.0,
        p in 0.1f64..30.0,
        n in 1usize..6,
    ) {
        let series = builtin_series(BuiltinModel::PvModel, 6).unwrap();
        let engine = Resummator::new(&series, QuadratureSpec::default()).unwrap();
        let e = engine.eval(n, lam, p).unwrap();
        let resid = (e.value - e.decomposition_sum()).abs();
        prop_assert!(resid <= 1e-12 * e.value.abs().max(1e-9));
    }

    #[test]
    fn term_signs_follow_coefficients(
        lam in 0.1f64..5.0,
        p in 0.1f64..30.0,
    ) {
        let series = builtin_series(BuiltinModel::Prototype, 6).unwrap();
        let engine = Resummator::new(&series, QuadratureSpec::default()).unwrap();
        let e = engine.eval(5, lam, p).unwrap();
        for (n, &a) in e.terms.iter().enumerate() {
            let f = series.coefficient(n);
            if f != 0.0 {
                prop_assert_eq!(a.signum(), f.signum());
            }
        }
    }
}

#[test]
fn json_round_trip_preserves_series() {
    let s = builtin_series(BuiltinModel::BetaPolymer, 7).unwrap();
    let doc = serde_json::json!({
        "name": s.name(),
        "prefactor": s.prefactor(),
        "coefficients": s.coefficients(),
    });
    let reloaded = load_series(doc.to_string().as_bytes(), SeriesFormat::Json).unwrap();
    assert_eq!(reloaded.coefficients(), s.coefficients());
    assert_eq!(reloaded.prefactor(), s.prefactor());
}
