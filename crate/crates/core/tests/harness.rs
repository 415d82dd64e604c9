use dmt_core::harness::analysis::pearson;
use dmt_core::harness::{analytic_fading, measure_snr_profile, probe_and_load, run_point};
use dmt_core::{DmtError, ExperimentConfig, OsnrPoint};

fn span(km: f64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.link.fiber_len = km * 1e3;
    cfg
}

#[test]
fn estimated_snr_tracks_fading_response() {
    let mut cfg = span(50.5);
    cfg.link.mod_index = 0.05;
    let profile = measure_snr_profile(&cfg, OsnrPoint::Db(60.0)).unwrap();
    let (snr, oracle): (Vec<f64>, Vec<f64>) = profile
        .snr
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, cfg.dmt.carrier_frequency(i + 1)))
        .filter(|&(_, f)| f < 20e9)
        .map(|(s, f)| (s, analytic_fading(f, &cfg.link).powi(2)))
        .unzip();
    let r = pearson(&snr, &oracle);
    assert!(r > 0.95, "r = {r}");
}

#[test]
fn back_to_back_probe_is_near_uniform() {
    let probe = probe_and_load(&span(0.0)).unwrap();
    assert_eq!(probe.table.bits_per_symbol(), 1820);
    let lo = *probe.table.bits.iter().min().unwrap();
    let hi = *probe.table.bits.iter().max().unwrap();
    assert!(hi - lo <= 1, "{lo}..{hi}");
}

#[test]
fn fiber_probe_dips_at_first_null() {
    let cfg = span(50.5);
    let probe = probe_and_load(&cfg).unwrap();
    // Carrier nearest 8.48 GHz at 31.25 MHz spacing.
    let k = (8.48e9 / cfg.dmt.carrier_frequency(1)).round() as usize - 1;
    assert!(probe.table.bits[k - 2..=k + 2].iter().all(|&b| b <= 1));
    assert!(probe.table.bits[..50].iter().all(|&b| b >= 4));
}

#[test]
fn ber_drops_with_osnr_and_noise_off_is_clean() {
    let cfg = span(0.0);
    let probe = probe_and_load(&cfg).unwrap();
    let at = |o: OsnrPoint| run_point(&cfg, &probe.table, o, 0).unwrap();
    let p25 = at(OsnrPoint::Db(25.0));
    let p31 = at(OsnrPoint::Db(31.0));
    let two_sigma = 2.0 * (p25.ber / p25.bits as f64).sqrt();
    assert!(p31.ber <= p25.ber + two_sigma);
    assert!(p31.hd_pass, "ber {}", p31.ber);
    assert!(p31.bits >= 100_000 && !p31.low_confidence);
    let off = at(OsnrPoint::Off);
    assert_eq!(off.errors, 0);
    assert_eq!(off.ber, 0.0);
}

#[test]
fn rate_above_capacity_is_infeasible() {
    let cfg = ExperimentConfig {
        rate_gbps: 200.0,
        ..span(0.0)
    };
    assert!(matches!(
        probe_and_load(&cfg),
        Err(DmtError::InfeasibleRate {
            requested: 6500,
            max_achievable: 5964
        })
    ));
}
