use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use dmt_core::harness::report::{self, LOADING_CSV, SNR_CSV, SWEEP_CSV};
use dmt_core::harness::{analytic_fading, osnr_sweep, probe_and_load, run_point};
use dmt_core::{ExperimentConfig, LoadingTable, OsnrPoint, SweepReport};

#[derive(Parser)]
#[command(
    name = "dmtsim",
    version,
    about = "DMT over IM/DD optical link simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Probe the link with uniform 16-QAM and write the loading table and SNR profile.
    Probe(Common),
    /// Probe, load, then measure BER at every OSNR point.
    Sweep(Common),
    /// Tabulate the analytic dispersion fading response per carrier.
    Fading(Common),
    /// Measure BER at a single OSNR.
    Point {
        #[command(flatten)]
        common: Common,
        /// Loading table CSV to use instead of probing.
        #[arg(long)]
        loading: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML experiment file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    rate_gbps: Option<f64>,
    #[arg(long)]
    length_km: Option<f64>,
    /// Comma-separated OSNR values in dB, `a:b` ranges, or `off`.
    #[arg(long)]
    osnr: Option<String>,
    #[arg(long)]
    frames: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                ExperimentConfig::from_toml(&text)
                    .with_context(|| format!("parsing {}", path.display()))?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.rate_gbps {
            cfg.rate_gbps = v;
        }
        if let Some(v) = self.length_km {
            cfg.link.fiber_len = v * 1e3;
        }
        if let Some(list) = &self.osnr {
            cfg.osnr_points = OsnrPoint::parse_list(list)?;
        }
        if let Some(v) = self.frames {
            cfg.n_frames = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(dir) = &self.out {
            cfg.output_path = Some(dir.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn out_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output_path
        .clone()
        .unwrap_or_else(|| PathBuf::from("."))
}

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn print_points(report: &SweepReport) {
    for p in &report.points {
        let mut flags = String::new();
        if p.low_confidence {
            flags.push_str(" low-confidence");
        }
        if p.unreliable {
            flags.push_str(" unreliable");
        }
        println!(
            "osnr {:>5}  ber {:.3e}  ({} / {} bits)  hd {}  sd {}{flags}",
            p.osnr.to_string(),
            p.ber,
            p.errors,
            p.bits,
            p.hd_pass,
            p.sd_pass
        );
    }
}

fn probe(common: &Common) -> Result<()> {
    let cfg = common.resolve()?;
    let outcome = probe_and_load(&cfg)?;
    let report = SweepReport {
        fingerprint: cfg.fingerprint(),
        table: outcome.table,
        profile: outcome.profile,
        points: Vec::new(),
        config: cfg,
    };
    let dir = out_dir(&report.config);
    write(&dir, LOADING_CSV, &report::loading_csv(&report))?;
    write(&dir, SNR_CSV, &report::snr_csv(&report))?;
    let t = &report.table;
    println!(
        "{} bits/symbol on {} carriers, max {} bits",
        t.bits_per_symbol(),
        t.n_loaded(),
        t.max_bits()
    );
    Ok(())
}

fn sweep(common: &Common) -> Result<()> {
    let cfg = common.resolve()?;
    let dir = out_dir(&cfg);
    let report = osnr_sweep(&cfg)?;
    report::write_report(&report, &dir)
        .with_context(|| format!("writing report to {}", dir.display()))?;
    eprintln!("wrote {} and plot tables to {}", SWEEP_CSV, dir.display());
    print_points(&report);
    match report.required_osnr() {
        Some(v) => println!("required OSNR (HD-FEC): {v} dB"),
        None => println!("required OSNR (HD-FEC): not reached"),
    }
    Ok(())
}

fn fading(common: &Common) -> Result<()> {
    let cfg = common.resolve()?;
    let mut text = format!(
        "# fingerprint={}\n# fiber_len_m={}\ncarrier,freq_hz,response\n",
        cfg.fingerprint(),
        cfg.link.fiber_len
    );
    for k in 1..=cfg.dmt.n_modulated {
        let f = cfg.dmt.carrier_frequency(k);
        text.push_str(&format!("{k},{f},{:.6}\n", analytic_fading(f, &cfg.link)));
    }
    write(&out_dir(&cfg), "fading.csv", &text)
}

fn point(common: &Common, loading: Option<&Path>) -> Result<()> {
    let cfg = common.resolve()?;
    let [osnr] = cfg.osnr_points[..] else {
        bail!(
            "`point` takes exactly one OSNR value, got {}",
            cfg.osnr_points.len()
        );
    };
    let (table, profile) = match loading {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            (LoadingTable::from_csv(&text)?, None)
        }
        None => {
            let probe = probe_and_load(&cfg)?;
            (probe.table, Some(probe.profile))
        }
    };
    let result = run_point(&cfg, &table, osnr, 0)?;
    let report = SweepReport {
        fingerprint: cfg.fingerprint(),
        profile: profile.unwrap_or_else(|| {
            dmt_core::SnrProfile::new(vec![0.0; table.n_carriers()]).expect("non-negative")
        }),
        table,
        points: vec![result],
        config: cfg,
    };
    write(
        &out_dir(&report.config),
        SWEEP_CSV,
        &report::sweep_csv(&report),
    )?;
    print_points(&report);
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Probe(c) => probe(c),
        Command::Sweep(c) => sweep(c),
        Command::Fading(c) => fading(c),
        Command::Point { common, loading } => point(common, loading.as_deref()),
    }
}
