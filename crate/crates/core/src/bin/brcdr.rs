use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use brcdr::harness::{self, ScenarioConfig};
use brcdr::Error;

#[derive(Parser)]
#[command(name = "brcdr", version, about = "Multi-lane baud-rate CDR behavioral simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Scenario TOML; built-in defaults when omitted.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override the scenario seed.
    #[arg(short, long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate one scenario and write report.json, summary.txt and telemetry.
    Run(Common),
    /// Run the scenario once per value of a dotted config path.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// e.g. `clock.ppm_offset`
        #[arg(long)]
        param: String,
        /// Comma-separated values, e.g. `0,1000,2500`
        #[arg(long)]
        values: String,
    },
    /// Phase-scanned eye diagram of lane 0.
    Eye {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 64)]
        phase_bins: usize,
        #[arg(long, default_value_t = 256)]
        v_bins: usize,
    },
    /// BER against sampling offset with the loop frozen after warmup.
    Bathtub {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = -0.6, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, default_value_t = 0.6)]
        to: f64,
        #[arg(long, default_value_t = 0.025)]
        step: f64,
        #[arg(long, default_value_t = 200_000)]
        bits: u64,
    },
    /// Jitter tolerance curve.
    Jtol {
        #[command(flatten)]
        common: Common,
        /// Comma-separated SJ frequencies, Hz.
        #[arg(long, default_value = "2e5,5e5,1e6,2e6,5e6,1e7,2e7,5e7")]
        freqs: String,
        #[arg(long, default_value_t = 1e-4)]
        target_ber: f64,
        #[arg(long, default_value_t = 0.02)]
        min_amp: f64,
        #[arg(long, default_value_t = 40.0)]
        max_amp: f64,
    },
    /// Phase spectra of the recovered clock and the ILCM output.
    Spectrum(Common),
}

fn load(c: &Common) -> brcdr::Result<ScenarioConfig> {
    let mut cfg = match &c.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_spectrum(path: &Path, s: &brcdr::metrics::PhaseSpectrum) -> brcdr::Result<()> {
    #[derive(serde::Serialize)]
    struct Row {
        freq_hz: f64,
        dbc: f64,
    }
    let rows: Vec<Row> = s
        .freqs
        .iter()
        .zip(&s.power_dbc)
        .map(|(&freq_hz, &dbc)| Row { freq_hz, dbc })
        .collect();
    harness::write_csv_rows(path, &rows)
}

fn exec(cli: Cli) -> brcdr::Result<()> {
    match cli.cmd {
        Cmd::Run(c) => {
            let cfg = load(&c)?;
            let out = harness::run(&cfg)?;
            harness::write_run_outputs(&out, &c.out)?;
            print!("{}", out.report.summary());
            harness::check_lock(&out.report)
        }
        Cmd::Sweep { common, param, values } => {
            let cfg = load(&common)?;
            let vals = harness::parse_sweep_values(&values)?;
            let pts = harness::sweep(&cfg, &param, &vals)?;
            std::fs::create_dir_all(&common.out)?;
            harness::write_sweep_csv(&common.out.join("sweep.csv"), &param, &pts)?;
            for (i, p) in pts.iter().enumerate() {
                std::fs::write(common.out.join(format!("report_{i}.json")), p.report.to_json())?;
                println!("{param}={} loss_of_lock={}", p.value, p.report.loss_of_lock);
            }
            Ok(())
        }
        Cmd::Eye {
            common,
            phase_bins,
            v_bins,
        } => {
            let cfg = load(&common)?;
            let (eye, out) = harness::eye(&cfg, phase_bins, v_bins)?;
            harness::write_run_outputs(&out, &common.out)?;
            #[derive(serde::Serialize)]
            struct Row {
                phase_ui: f64,
                v: f64,
                count_plus: u64,
                count_minus: u64,
            }
            let rows: Vec<Row> = eye
                .cells()
                .into_iter()
                .map(|(phase_ui, v, count_plus, count_minus)| Row {
                    phase_ui,
                    v,
                    count_plus,
                    count_minus,
                })
                .collect();
            harness::write_csv_rows(&common.out.join("eye.csv"), &rows)?;
            let centre = brcdr::metrics::measure_vem(&eye, 0.0, 0.0)?;
            println!("eye_cells={} vem_at_lock={centre:.5}", rows.len());
            Ok(())
        }
        Cmd::Bathtub {
            common,
            from,
            to,
            step,
            bits,
        } => {
            let cfg = load(&common)?;
            if !(step > 0.0 && to > from) {
                return Err(Error::Config("bathtub needs from < to and step > 0".into()));
            }
            let n = ((to - from) / step).round() as usize;
            let offsets: Vec<f64> = (0..=n).map(|i| from + i as f64 * step).collect();
            let curve = harness::bathtub(&cfg, &offsets, bits)?;
            std::fs::create_dir_all(&common.out)?;
            #[derive(serde::Serialize)]
            struct Row {
                offset_ui: f64,
                errors: u64,
                bits: u64,
                ber: f64,
                upper: f64,
            }
            let rows: Vec<Row> = curve
                .points
                .iter()
                .map(|p| Row {
                    offset_ui: p.phase,
                    errors: p.errors,
                    bits: p.bits,
                    ber: p.ber(),
                    upper: p.upper(),
                })
                .collect();
            harness::write_csv_rows(&common.out.join("bathtub.csv"), &rows)?;
            println!("opening_1e-3={:.4}", curve.opening(1e-3));
            Ok(())
        }
        Cmd::Jtol {
            common,
            freqs,
            target_ber,
            min_amp,
            max_amp,
        } => {
            let cfg = load(&common)?;
            let freqs: Vec<f64> = freqs
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Config(format!("bad frequency `{s}`: {e}")))
                })
                .collect::<Result<_, _>>()?;
            let curve = harness::jtol(&cfg, &freqs, target_ber, min_amp, max_amp)?;
            std::fs::create_dir_all(&common.out)?;
            harness::write_csv_rows(&common.out.join("jtol.csv"), &curve.points)?;
            for f in &curve.failed_hz {
                println!("failed_at_min_amplitude_hz={f}");
            }
            for p in &curve.points {
                println!(
                    "freq_hz={} amplitude_ui={:.4} capped={}",
                    p.freq_hz, p.amplitude_ui, p.capped
                );
            }
            Ok(())
        }
        Cmd::Spectrum(c) => {
            let cfg = load(&c)?;
            let s = harness::spectrum_run(&cfg)?;
            harness::write_run_outputs(&s.output, &c.out)?;
            write_spectrum(&c.out.join("spectrum_recovered.csv"), &s.recovered)?;
            write_spectrum(&c.out.join("spectrum_ilcm.csv"), &s.ilcm)?;
            for (name, sp) in [("recovered", &s.recovered), ("ilcm", &s.ilcm)] {
                match sp.dominant() {
                    Some(d) => println!(
                        "{name}.dominant_spur_hz={} {name}.dominant_spur_dbc={:.2}",
                        d.freq_hz, d.dbc
                    ),
                    None => println!("{name}.dominant_spur=none"),
                }
                println!(
                    "{name}.integrated_spur_dbc={:.2} {name}.integration_bw_hz={}",
                    sp.integrated_spur_dbc, sp.integration_bw_hz
                );
            }
            harness::check_lock(&s.output.report)
        }
    }
}

fn main() -> ExitCode {
    match exec(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
