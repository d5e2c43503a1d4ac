use proptest::prelude::*;
use tdasum::learn::{classical_mds, distance_matrix, knn_classify, DistanceMatrix, LabeledCurveSet};
use tdasum::{Grid1D, MetricSpec, SummaryCurve, SummaryKind};

fn grid() -> Grid1D {
    Grid1D::new(0.0, 2.0, 10).unwrap()
}

fn curve(v: &[f64]) -> SummaryCurve {
    SummaryCurve::new(grid(), vec![v.to_vec()], SummaryKind::Silhouette).unwrap()
}

fn curves(min: usize, max: usize) -> impl Strategy<Value = Vec<SummaryCurve>> {
    prop::collection::vec(prop::collection::vec(-2.0..2.0f64, 10), min..max)
        .prop_map(|cs| cs.iter().map(|v| curve(v)).collect())
}

fn metric() -> impl Strategy<Value = MetricSpec> {
    prop::sample::select(vec![MetricSpec::lp(1.0), MetricSpec::lp(2.0), MetricSpec::sup()])
}

proptest! {
    #[test]
    fn distance_matrices_satisfy_the_triangle_inequality(cs in curves(3, 9), m in metric()) {
        let dm = distance_matrix(&cs, &m).unwrap();
        let n = dm.len();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(dm.get(i, j), dm.get(j, i));
                for k in 0..n {
                    prop_assert!(dm.get(i, k) <= dm.get(i, j) + dm.get(j, k) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn knn_depends_only_on_the_ranking(cs in curves(4, 12), q in prop::collection::vec(-2.0..2.0f64, 10), k in 1usize..4, scale in 0.1..10.0f64) {
        // scaling every curve scales every distance by the same factor
        let labels: Vec<usize> = (0..cs.len()).map(|i| i % 3).collect();
        let scaled: Vec<SummaryCurve> = cs
            .iter()
            .map(|c| curve(&c.orders[0].iter().map(|v| v * scale).collect::<Vec<_>>()))
            .collect();
        let qs = curve(&q.iter().map(|v| v * scale).collect::<Vec<_>>());
        let a = knn_classify(&LabeledCurveSet::new(cs, labels.clone()).unwrap(), &curve(&q), k, &MetricSpec::lp(2.0)).unwrap();
        let b = knn_classify(&LabeledCurveSet::new(scaled, labels).unwrap(), &qs, k, &MetricSpec::lp(2.0)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn mds_recovers_planar_configurations(pts in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 3..15)) {
        let d = |a: (f64, f64), b: (f64, f64)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
        let rows: Vec<Vec<f64>> = pts.iter().map(|&p| pts.iter().map(|&q| d(p, q)).collect()).collect();
        let x = classical_mds(&DistanceMatrix::from_rows(rows.clone()).unwrap(), 2).unwrap();
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                prop_assert!((d((x[i][0], x[i][1]), (x[j][0], x[j][1])) - rows[i][j]).abs() < 1e-9);
            }
        }
    }
}
