//! Long-run behaviour of the seeker on the Cournot benchmark at a step size
//! inside its empirical stability region.

use coalition_ne::cournot::{run_benchmark, BenchmarkOptions, BenchmarkReport};
use coalition_ne::sweep::window_means;

const ITERS: usize = 3000;
const WINDOW: usize = 100;

fn report() -> BenchmarkReport {
    let seeds: Vec<u64> = (0..10).collect();
    run_benchmark(&BenchmarkOptions::default(), &[0.02], ITERS, &seeds).unwrap()
}

fn assert_non_increasing(name: &str, w: &[f64]) {
    assert_eq!(w.len(), ITERS / WINDOW);
    for (k, pair) in w.windows(2).enumerate() {
        assert!(pair[1] <= pair[0], "{name}: window {} mean {} exceeds window {} mean {}", k + 1, pair[1], k, pair[0]);
    }
}

#[test]
fn windowed_gap_and_tracking_error_decrease() {
    let r = report();
    let res = &r.results[0];
    let gaps: Vec<f64> = res.mean_gap.iter().skip(1).map(|p| p.1).collect();
    let w = window_means(&gaps, WINDOW);
    assert_non_increasing("nash gap", &w);
    assert!(w[w.len() - 1] < 1e-3 * w[0]);

    let mut tracking = vec![0.0; ITERS];
    for run in &res.runs {
        for (acc, s) in tracking.iter_mut().zip(run.series.iter().skip(1)) {
            *acc += s.tracking_error / res.runs.len() as f64;
        }
    }
    assert_non_increasing("tracking error", &window_means(&tracking, WINDOW));
}
