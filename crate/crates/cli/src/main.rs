use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fdw_core::channel::complex_gaussian;
use fdw_core::linalg::{gsvd, GsvdDims};
use fdw_core::sim::{run_sweep, sdof_table, slope_check, ExperimentSpec, SdofRow};
use fdw_core::{Error, NetworkConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "fdw", version, about = "Aligned precoding for full-duplex MIMO wiretap channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Budgets, case, closed-form and constructed S.D.o.F. per configuration.
    Sdof {
        /// Antenna split `na_t,na_r,nb_t,nb_r,ne`; repeatable.
        #[arg(short, long = "antennas", value_parser = parse_antennas)]
        antennas: Vec<NetworkConfig>,
        /// JSON file holding a list of configurations.
        #[arg(long)]
        configs: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print JSON instead of CSV.
        #[arg(long)]
        json: bool,
    },
    /// Run a Monte Carlo sweep described by a JSON spec and emit CSV.
    Sweep {
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the run count of the spec.
        #[arg(long)]
        runs: Option<usize>,
    },
    /// Fit high-SNR secrecy-rate slopes of the constructed pair.
    Slope {
        #[arg(short, long = "antennas", value_parser = parse_antennas)]
        antennas: NetworkConfig,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        /// Power grid `start:stop:step` in dBm.
        #[arg(long, default_value = "60:120:10")]
        grid: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decompose random pairs and report the worst GSVD residuals.
    GsvdCheck {
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_antennas(s: &str) -> Result<NetworkConfig, String> {
    let v: Vec<usize> = s
        .split(',')
        .map(|x| x.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("bad antenna count in {s:?}: {e}"))?;
    match v[..] {
        [a, b, c, d, e] => Ok(NetworkConfig::new(a, b, c, d, e)),
        _ => Err(format!("expected five comma-separated counts, got {s:?}")),
    }
}

fn parse_grid(s: &str) -> Result<Vec<f64>, Error> {
    let bad = || Error::Config(format!("grid must be start:stop:step, got {s:?}"));
    let v: Vec<f64> = s
        .split(':')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let [start, stop, step] = v[..] else {
        return Err(bad());
    };
    if !(step > 0.0) || stop < start {
        return Err(bad());
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| start + i as f64 * step).collect())
}

/// `FDW_SEED`, when set, wins over any seed given on the command line or
/// in a spec file.
fn seed_override() -> Result<Option<u64>, Error> {
    match std::env::var("FDW_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Config(format!("FDW_SEED must be an unsigned integer, got {s:?}"))),
        Err(_) => Ok(None),
    }
}

fn read(path: &PathBuf) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn default_configs() -> Vec<NetworkConfig> {
    vec![
        NetworkConfig::new(5, 2, 4, 3, 5),
        NetworkConfig::new(4, 6, 8, 2, 5),
        NetworkConfig::new(7, 4, 7, 4, 2),
        NetworkConfig::default(),
    ]
}

fn run(cli: Cli) -> Result<String, Error> {
    let env_seed = seed_override()?;
    match cli.command {
        Command::Sdof {
            mut antennas,
            configs,
            seed,
            json,
        } => {
            if let Some(p) = configs {
                let list: Vec<NetworkConfig> = serde_json::from_str(&read(&p)?)
                    .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
                antennas.extend(list);
            }
            if antennas.is_empty() {
                antennas = default_configs();
            }
            let rows = sdof_table(&antennas, env_seed.unwrap_or(seed))?;
            if json {
                return Ok(serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n");
            }
            let mut out = String::from(SdofRow::HEADER);
            out.push('\n');
            for r in &rows {
                out.push_str(&r.csv_line());
                out.push('\n');
            }
            Ok(out)
        }
        Command::Sweep { spec, out, runs } => {
            let mut s: ExperimentSpec = serde_json::from_str(&read(&spec)?)
                .map_err(|e| Error::Config(format!("{}: {e}", spec.display())))?;
            if let Some(r) = runs {
                s.runs = r;
            }
            if let Some(seed) = env_seed {
                s.seed = seed;
            }
            let csv = run_sweep(&s)?.to_csv();
            match out {
                Some(path) => {
                    fs::write(&path, csv)
                        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                    Ok(String::new())
                }
                None => Ok(csv),
            }
        }
        Command::Slope {
            antennas,
            rho,
            grid,
            seed,
        } => {
            let cfg = antennas.with_rho(rho);
            cfg.validate()?;
            let s = slope_check(&cfg, env_seed.unwrap_or(seed), &parse_grid(&grid)?)?;
            Ok(format!(
                "sdof {} slopes {:.4} {:.4}\n",
                s.achieved, s.slope_a, s.slope_b
            ))
        }
        Command::GsvdCheck { pairs, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(env_seed.unwrap_or(seed));
            let (mut rec, mut norm, mut dims) = (0.0f64, 0.0f64, 0usize);
            for _ in 0..pairs {
                let (n, m, k) = (
                    rng.random_range(1..=8),
                    rng.random_range(1..=8),
                    rng.random_range(1..=8),
                );
                let a = complex_gaussian(&mut rng, n, m, 1.0);
                let b = complex_gaussian(&mut rng, n, k, 1.0);
                let g = gsvd(&a, &b)?;
                rec = rec.max(g.reconstruction_error(&a, &b));
                norm = norm.max(g.normalization_error());
                dims += usize::from(g.dims == GsvdDims::generic(n, m, k));
            }
            let ok = rec <= 1e-10 && norm <= 1e-10 && dims == pairs;
            let report = format!(
                "pairs {pairs} reconstruction {rec:.2e} normalization {norm:.2e} dims {dims}/{pairs} {}\n",
                if ok { "ok" } else { "FAILED" }
            );
            if ok {
                Ok(report)
            } else {
                Err(Error::InternalInconsistency(report.trim_end().to_string()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("fdw: {e}");
            match e {
                Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
