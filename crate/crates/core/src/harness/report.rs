//! CSV and gnuplot table emission.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use super::experiment::SweepReport;

/// File names written by [`write_report`].
pub const SWEEP_CSV: &str = "sweep.csv";
pub const LOADING_CSV: &str = "loading.csv";
pub const SNR_CSV: &str = "snr.csv";
pub const BER_TABLE: &str = "ber_vs_osnr.dat";
pub const BITS_TABLE: &str = "bits_vs_carrier.dat";
pub const SNR_TABLE: &str = "snr_vs_carrier.dat";

/// Whitespace-delimited tables ready for gnuplot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlotTables {
    pub ber_vs_osnr: String,
    pub bits_vs_carrier: String,
    pub snr_vs_carrier: String,
}

fn header(report: &SweepReport) -> String {
    let cfg = &report.config;
    format!(
        "# fingerprint={}\n# rate_gbps={} fiber_len_m={} seed={} target_bits={}\n",
        report.fingerprint, cfg.rate_gbps, cfg.link.fiber_len, cfg.seed, report.table.target_bits
    )
}

/// Renders the three plot tables: BER versus OSNR, bits and power per
/// carrier, and estimated SNR per carrier.
pub fn report_render(report: &SweepReport) -> PlotTables {
    let head = header(report);
    let dmt = &report.config.dmt;

    let mut ber = head.clone();
    ber.push_str("# osnr_db ber errors bits\n");
    for p in &report.points {
        let _ = writeln!(ber, "{} {:.6e} {} {}", p.osnr, p.ber, p.errors, p.bits);
    }

    let mut bits = head.clone();
    bits.push_str("# carrier freq_ghz bits power\n");
    for (i, (b, g)) in report
        .table
        .bits
        .iter()
        .zip(&report.table.power)
        .enumerate()
    {
        let f = dmt.carrier_frequency(i + 1) / 1e9;
        let _ = writeln!(bits, "{} {f:.5} {b} {g:.6}", i + 1);
    }

    let mut snr = head;
    snr.push_str("# carrier freq_ghz snr_db\n");
    for (i, s) in report.profile.snr_db().enumerate() {
        let f = dmt.carrier_frequency(i + 1) / 1e9;
        let _ = writeln!(snr, "{} {f:.5} {s:.4}", i + 1);
    }

    PlotTables {
        ber_vs_osnr: ber,
        bits_vs_carrier: bits,
        snr_vs_carrier: snr,
    }
}

/// `osnr_db,ber,errors,bits,hd_pass,sd_pass`
pub fn sweep_csv(report: &SweepReport) -> String {
    let mut out = header(report);
    out.push_str("osnr_db,ber,errors,bits,hd_pass,sd_pass\n");
    for p in &report.points {
        let _ = writeln!(
            out,
            "{},{:.6e},{},{},{},{}",
            p.osnr, p.ber, p.errors, p.bits, p.hd_pass, p.sd_pass
        );
    }
    out
}

/// `carrier,freq_hz,snr_db`
pub fn snr_csv(report: &SweepReport) -> String {
    let mut out = header(report);
    out.push_str("carrier,freq_hz,snr_db\n");
    for (i, s) in report.profile.snr_db().enumerate() {
        let f = report.config.dmt.carrier_frequency(i + 1);
        let _ = writeln!(out, "{},{f},{s:.4}", i + 1);
    }
    out
}

/// `carrier,bits,power`
pub fn loading_csv(report: &SweepReport) -> String {
    report
        .table
        .to_csv(&[format!("fingerprint={}", report.fingerprint)])
}

/// Writes the three CSVs and the three plot tables into `dir`.
pub fn write_report(report: &SweepReport, dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(SWEEP_CSV), sweep_csv(report))?;
    fs::write(dir.join(LOADING_CSV), loading_csv(report))?;
    fs::write(dir.join(SNR_CSV), snr_csv(report))?;
    let tables = report_render(report);
    fs::write(dir.join(BER_TABLE), tables.ber_vs_osnr)?;
    fs::write(dir.join(BITS_TABLE), tables.bits_vs_carrier)?;
    fs::write(dir.join(SNR_TABLE), tables.snr_vs_carrier)?;
    Ok(())
}
