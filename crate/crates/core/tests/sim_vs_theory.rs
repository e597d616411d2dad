//! Long simulation runs checked against the analytical averages.

use aoc_core::{
    avg_aoc_units, fdma_gamma, simulate, PerVector, SchemeKind, SimConfig, TransmissionOrder,
};

const HORIZON: u64 = 1_000_000;

#[test]
fn equal_per_grid_agrees_with_theory() {
    for step in 0..=10 {
        let p = PerVector::uniform(6, 0.05 * step as f64).unwrap();
        for scheme in SchemeKind::ALL {
            let theory = avg_aoc_units(scheme, &p).unwrap();
            let cfg = SimConfig::new(scheme, p.clone(), HORIZON, 1000 + step).unwrap();
            let sim = simulate(&cfg).unwrap();
            let tol = (3.0 * sim.ci_halfwidth).max(0.01 * theory);
            assert!(
                (sim.avg_aoc - theory).abs() <= tol,
                "{scheme} p={:.2}: sim {} theory {theory} tol {tol}",
                0.05 * step as f64,
                sim.avg_aoc
            );
        }
    }
}

#[test]
fn uneven_per_agrees_with_theory() {
    let p = PerVector::new(vec![0.3, 0.05, 0.2, 0.1]).unwrap();
    for scheme in SchemeKind::ALL {
        let theory = avg_aoc_units(scheme, &p).unwrap();
        let sim = simulate(&SimConfig::new(scheme, p.clone(), HORIZON, 77).unwrap()).unwrap();
        assert!((sim.avg_aoc - theory).abs() <= (3.0 * sim.ci_halfwidth).max(0.01 * theory));
    }
}

#[test]
fn fdma_gaps_are_geometric() {
    let p = PerVector::new(vec![0.2, 0.1, 0.3]).unwrap();
    let sim = simulate(&SimConfig::new(SchemeKind::Fdma, p.clone(), HORIZON, 5).unwrap()).unwrap();
    let ev = sim.trace.events();
    let gaps: Vec<f64> = ev.windows(2).map(|w| w[1].completion_time - w[0].completion_time).collect();
    let n = gaps.len() as f64;
    let mean = gaps.iter().sum::<f64>() / n;
    let var = gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let expected = 1.0 / fdma_gamma(&p);
    assert!((mean - expected).abs() <= 3.0 * (var / n).sqrt(), "{mean} vs {expected}");
    assert!(ev.iter().all(|e| e.reset_age == 1.0));
}

#[test]
fn retransmission_orders_with_same_leader_agree() {
    let p = PerVector::new(vec![0.05, 0.1, 0.1, 0.1, 0.1, 0.2]).unwrap();
    let [first, _, third] = TransmissionOrder::study_orders();
    let run = |order: TransmissionOrder, seed| {
        let cfg = SimConfig::new(SchemeKind::TdmaR, p.clone(), HORIZON, seed)
            .unwrap()
            .with_order(order)
            .unwrap();
        simulate(&cfg).unwrap()
    };
    let (a, b) = (run(first, 11), run(third, 12));
    let combined = (a.ci_halfwidth.powi(2) + b.ci_halfwidth.powi(2)).sqrt();
    assert!((a.avg_aoc - b.avg_aoc).abs() <= 3.0 * combined);
}

#[test]
fn simulated_order_matches_permuted_theory() {
    let p = PerVector::new(vec![0.05, 0.1, 0.1, 0.1, 0.1, 0.2]).unwrap();
    let weakest_first = TransmissionOrder::from_one_based(&[6, 1, 2, 3, 4, 5]).unwrap();
    for scheme in [SchemeKind::TdmaNr, SchemeKind::TdmaR] {
        let theory = avg_aoc_units(scheme, &p.permuted(&weakest_first).unwrap()).unwrap();
        let cfg = SimConfig::new(scheme, p.clone(), HORIZON, 21)
            .unwrap()
            .with_order(weakest_first.clone())
            .unwrap();
        let sim = simulate(&cfg).unwrap();
        assert!((sim.avg_aoc - theory).abs() <= (3.0 * sim.ci_halfwidth).max(0.01 * theory));
    }
}
