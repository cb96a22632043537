//! Optimal antenna counts for the reference scenarios at noise power 1e-3.

use std::path::Path;

use hmimo::experiments::{run_optimize, RunConfig};
use hmimo::optimizer::ActiveCase;

fn optimum(l_s: f64, p_u: f64) -> (u64, u64, ActiveCase) {
    let text = format!(
        r#"{{"scenario": "reference", "sigma2_w": 0.001,
            "ee": {{"l_s": {l_s}, "l_r": 1, "p_u": [{p_u}], "oracle": true}}}}"#
    );
    let cfg = RunConfig::from_json_str(&text, Path::new("reference.json")).unwrap();
    let r = &run_optimize(&cfg).unwrap().results[0];
    assert_eq!(r.oracle, Some([r.report.ns_opt, r.report.nr_opt]));
    (r.report.ns_opt, r.report.nr_opt, r.report.case)
}

#[test]
fn five_wavelength_surface() {
    assert_eq!(optimum(5.0, 0.001), (273, 91, ActiveCase::Interior));
    assert_eq!(optimum(5.0, 0.01), (127, 42, ActiveCase::Interior));
    let (n_s, n_r, _) = optimum(5.0, 1.0);
    assert_eq!((n_s, n_r), (81, 5));
}

#[test]
fn seven_wavelength_surface() {
    assert_eq!(optimum(7.0, 0.001), (311, 104, ActiveCase::Interior));
    assert_eq!(optimum(7.0, 0.01).0, 149);
    let (n_s, n_r, _) = optimum(7.0, 1.0);
    assert_eq!((n_s, n_r), (149, 5));
}
