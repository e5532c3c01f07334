//! Seeded Monte Carlo sweeps over Eve's position or the CSI error level,
//! plus per-configuration S.D.o.F. tables.
//!
//! Every run draws its channels from a seed that depends only on the base
//! seed and the run index, so results do not depend on thread count and
//! all sweep points share the same random phases.

mod table;

pub use table::{sdof_row, sdof_table, slope_check, SdofRow, SlopeCheck};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{mf_precoders, oneway_bob_silent, oneway_config, zf_precoders};
use crate::channel::{gen_pathloss, perturb_csi, ChannelSet, Geometry, LinkSelector, NetworkConfig};
use crate::error::{Error, Result};
use crate::precoder::{construct_with, ConstructOptions};
use crate::rate::{rates, RatePoint, TransmitPair};

pub const CSV_HEADER: &str =
    "scheme,axis,value,rho,alpha,mean_rs_a,mean_rs_b,mean_rs_sum,runs,seed";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Proposed,
    ProposedConstrained,
    /// Proposed design built from the Eve channels alone.
    ProposedHUnaware,
    Mf,
    Zf,
    Oneway,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::ProposedConstrained => "proposed-constrained",
            Scheme::ProposedHUnaware => "proposed-h-unaware",
            Scheme::Mf => "mf",
            Scheme::Zf => "zf",
            Scheme::Oneway => "oneway",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Eve at `(value, −r)`.
    X,
    /// Eve at `(0, value)`.
    Y,
    /// CSI error level on the selected links.
    Alpha,
    None,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Alpha => "alpha",
            Axis::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: Axis,
    #[serde(default)]
    pub start: f64,
    #[serde(default)]
    pub stop: f64,
    #[serde(default = "one")]
    pub step: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            axis: Axis::None,
            start: 0.0,
            stop: 0.0,
            step: 1.0,
        }
    }
}

impl SweepSpec {
    pub fn points(&self) -> Vec<f64> {
        if self.axis == Axis::None {
            return vec![0.0];
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

/// Alice at `(−r, 0)`, Bob at `(r, 0)`; Eve's default spot is `(0, −r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default = "default_c")]
    pub path_loss_exp: f64,
    #[serde(default)]
    pub eve: Option<[f64; 2]>,
}

fn default_r() -> f64 {
    5.0
}

fn default_c() -> f64 {
    3.5
}

impl Default for GeometrySpec {
    fn default() -> Self {
        GeometrySpec {
            r: default_r(),
            path_loss_exp: default_c(),
            eve: None,
        }
    }
}

impl GeometrySpec {
    fn at(&self, eve: [f64; 2]) -> Geometry {
        Geometry::symmetric(self.r, eve, self.path_loss_exp)
    }

    fn eve(&self) -> [f64; 2] {
        self.eve.unwrap_or([0.0, -self.r])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub config: NetworkConfig,
    #[serde(default)]
    pub geometry: GeometrySpec,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_schemes")]
    pub schemes: Vec<Scheme>,
    #[serde(default)]
    pub seed: u64,
    /// CSI error level applied to `csi_links` when the sweep is not over α.
    #[serde(default)]
    pub csi_alpha: f64,
    #[serde(default = "default_links")]
    pub csi_links: LinkSelector,
}

fn default_runs() -> usize {
    500
}

fn default_schemes() -> Vec<Scheme> {
    vec![Scheme::Proposed]
}

fn default_links() -> LinkSelector {
    LinkSelector::All
}

impl ExperimentSpec {
    pub fn new(config: NetworkConfig) -> Self {
        ExperimentSpec {
            config,
            geometry: GeometrySpec::default(),
            sweep: SweepSpec::default(),
            runs: default_runs(),
            schemes: default_schemes(),
            seed: 0,
            csi_alpha: 0.0,
            csi_links: default_links(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        let bad = |m: String| Err(Error::Config(m));
        if self.runs == 0 {
            return bad("runs must be at least 1".into());
        }
        if self.schemes.is_empty() {
            return bad("at least one scheme is required".into());
        }
        let g = &self.geometry;
        if !(g.r.is_finite() && g.r > 0.0) {
            return bad(format!("geometry.r must be positive, got {}", g.r));
        }
        if !g.path_loss_exp.is_finite() || g.path_loss_exp < 0.0 {
            return bad(format!("invalid path_loss_exp {}", g.path_loss_exp));
        }
        let s = &self.sweep;
        if s.axis != Axis::None {
            if !(s.step.is_finite() && s.step > 0.0) {
                return bad(format!("sweep.step must be positive, got {}", s.step));
            }
            if !(s.start.is_finite() && s.stop.is_finite()) || s.stop < s.start {
                return bad(format!("sweep range [{}, {}] is not ordered", s.start, s.stop));
            }
        }
        let alphas: Vec<f64> = if s.axis == Axis::Alpha {
            s.points()
        } else {
            vec![self.csi_alpha]
        };
        if alphas.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return bad("CSI error levels must lie in [0, 1]".into());
        }
        Ok(())
    }

    /// Geometry and α at one sweep point.
    fn point(&self, value: f64) -> (Geometry, f64) {
        let g = &self.geometry;
        match self.sweep.axis {
            Axis::X => (g.at([value, -g.r]), self.csi_alpha),
            Axis::Y => (g.at([0.0, value]), self.csi_alpha),
            Axis::Alpha => (g.at(g.eve()), value),
            Axis::None => (g.at(g.eve()), self.csi_alpha),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub scheme: Scheme,
    pub axis: Axis,
    pub value: f64,
    pub rho: f64,
    pub alpha: f64,
    pub mean_rs_a: f64,
    pub mean_rs_b: f64,
    pub mean_rs_sum: f64,
    pub runs: usize,
    pub seed: u64,
}

impl SweepRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.scheme.name(),
            self.axis.name(),
            sig6(self.value),
            sig6(self.rho),
            sig6(self.alpha),
            sig6(self.mean_rs_a),
            sig6(self.mean_rs_b),
            sig6(self.mean_rs_sum),
            self.runs,
            self.seed
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.csv_line());
            out.push('\n');
        }
        out
    }

    pub fn find(&self, scheme: Scheme, value: f64) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.scheme == scheme && (r.value - value).abs() < 1e-9)
    }
}

/// Six significant digits, `%g` style.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x == 0.0 { "0".into() } else { format!("{x}") };
    }
    let sci = format!("{x:.5e}");
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mant.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn run_seed(seed: u64, run: usize) -> u64 {
    seed.wrapping_add((run as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

const PERTURB_SALT: u64 = 0x5851_F42D_4C95_7F2D;
const ONEWAY_SALT: u64 = 0x2545_F491_4F6C_DD1D;

fn proposed(est: &ChannelSet, cfg: &NetworkConfig, opts: ConstructOptions) -> Result<TransmitPair> {
    Ok(construct_with(est, cfg, opts)?.pair.transmit())
}

/// Rates of one scheme in one run: precoders from the estimate, rates on
/// the channel actually seen.
fn evaluate(
    scheme: Scheme,
    cfg: &NetworkConfig,
    est: &ChannelSet,
    truth: &ChannelSet,
) -> Result<RatePoint> {
    let p = cfg.power_linear();
    let tx = match scheme {
        Scheme::Proposed => proposed(est, cfg, ConstructOptions::default())?,
        Scheme::ProposedConstrained => proposed(
            est,
            cfg,
            ConstructOptions {
                constrained: true,
                eve_only: false,
            },
        )?,
        Scheme::ProposedHUnaware => proposed(
            est,
            cfg,
            ConstructOptions {
                constrained: false,
                eve_only: true,
            },
        )?,
        Scheme::Mf => mf_precoders(est, p),
        Scheme::Zf => zf_precoders(est, p).0,
        Scheme::Oneway => unreachable!("one-way runs on its own channels"),
    };
    Ok(rates(truth, &tx, cfg.rho))
}

fn one_run(spec: &ExperimentSpec, points: &[f64], run: usize) -> Result<Vec<RatePoint>> {
    let cfg = &spec.config;
    let seed = run_seed(spec.seed, run);
    let one_cfg = oneway_config(cfg);
    let mut out = Vec::with_capacity(points.len() * spec.schemes.len());
    for &v in points {
        let (geom, alpha) = spec.point(v);
        let est = gen_pathloss(cfg, &geom, seed)?;
        let truth = perturb_csi(&est, alpha, spec.csi_links, seed ^ PERTURB_SALT);
        for &scheme in &spec.schemes {
            let r = if scheme == Scheme::Oneway {
                let est1 = gen_pathloss(&one_cfg, &geom, seed ^ ONEWAY_SALT)?;
                let truth1 =
                    perturb_csi(&est1, alpha, spec.csi_links, seed ^ ONEWAY_SALT ^ PERTURB_SALT);
                let mut tx = proposed(&est1, &one_cfg, ConstructOptions::default())?;
                if oneway_bob_silent(cfg) {
                    tx.v_b.fill(num_complex::Complex64::new(0.0, 0.0));
                }
                rates(&truth1, &tx, cfg.rho)
            } else {
                evaluate(scheme, cfg, &est, &truth)?
            };
            out.push(r);
        }
    }
    Ok(out)
}

/// Mean secrecy rates for every sweep point and scheme.
///
/// Runs execute in parallel; sums are accumulated in run order so the
/// output is identical for any thread count.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<SweepTable> {
    spec.validate()?;
    let points = spec.sweep.points();
    let per_run: Vec<Vec<RatePoint>> = (0..spec.runs)
        .into_par_iter()
        .map(|run| one_run(spec, &points, run))
        .collect::<Result<_>>()?;

    let width = points.len() * spec.schemes.len();
    let mut sum_a = vec![0.0; width];
    let mut sum_b = vec![0.0; width];
    for run in &per_run {
        for (k, r) in run.iter().enumerate() {
            sum_a[k] += r.rs_a;
            sum_b[k] += r.rs_b;
        }
    }
    let n = spec.runs as f64;
    let mut rows = Vec::with_capacity(width);
    for (i, &v) in points.iter().enumerate() {
        let (_, alpha) = spec.point(v);
        for (j, &scheme) in spec.schemes.iter().enumerate() {
            let k = i * spec.schemes.len() + j;
            let (a, b) = (sum_a[k] / n, sum_b[k] / n);
            rows.push(SweepRow {
                scheme,
                axis: spec.sweep.axis,
                value: v,
                rho: spec.config.rho,
                alpha,
                mean_rs_a: a,
                mean_rs_b: b,
                mean_rs_sum: a + b,
                runs: spec.runs,
                seed: spec.seed,
            });
        }
    }
    Ok(SweepTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(axis: Axis, start: f64, stop: f64, step: f64) -> ExperimentSpec {
        let mut s = ExperimentSpec::new(NetworkConfig::default());
        s.sweep = SweepSpec {
            axis,
            start,
            stop,
            step,
        };
        s.runs = 4;
        s.schemes = vec![Scheme::Proposed, Scheme::Mf, Scheme::Zf, Scheme::Oneway];
        s.seed = 9;
        s
    }

    #[test]
    fn sig6_formatting() {
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(1.0), "1");
        assert_eq!(sig6(-15.0), "-15");
        assert_eq!(sig6(3.14159265), "3.14159");
        assert_eq!(sig6(0.000123456789), "0.000123457");
        assert_eq!(sig6(1234567.0), "1.23457e6");
        assert_eq!(sig6(1.5e-7), "1.5e-7");
    }

    #[test]
    fn sweep_points() {
        let s = SweepSpec {
            axis: Axis::X,
            start: -15.0,
            stop: 15.0,
            step: 1.0,
        };
        assert_eq!(s.points().len(), 31);
        let a = SweepSpec {
            axis: Axis::Alpha,
            start: 0.0,
            stop: 1.0,
            step: 0.2,
        };
        assert_eq!(a.points().len(), 6);
        assert_eq!(SweepSpec::default().points(), vec![0.0]);
    }

    #[test]
    fn row_accounting_and_header() {
        let spec = small(Axis::X, -2.0, 2.0, 1.0);
        let t = run_sweep(&spec).unwrap();
        assert_eq!(t.rows.len(), 5 * 4);
        let csv = t.to_csv();
        assert_eq!(csv.lines().next().unwrap(), CSV_HEADER);
        assert_eq!(csv.lines().count(), 21);
        assert!(t.rows.iter().all(|r| r.seed == 9 && r.runs == 4));
    }

    #[test]
    fn reproducible_bytes() {
        let spec = small(Axis::Y, 0.0, 10.0, 5.0);
        let a = run_sweep(&spec).unwrap().to_csv();
        let b = run_sweep(&spec).unwrap().to_csv();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = pool.install(|| run_sweep(&spec).unwrap().to_csv());
        assert_eq!(a, c);
    }

    #[test]
    fn zero_power_gives_zero_rates() {
        let mut spec = small(Axis::None, 0.0, 0.0, 1.0);
        spec.runs = 1;
        spec.config.power_dbm = -1000.0;
        let t = run_sweep(&spec).unwrap();
        assert!(t.rows.iter().all(|r| r.mean_rs_sum == 0.0));
    }

    #[test]
    fn malformed_specs_are_rejected() {
        let mut s = small(Axis::X, 1.0, 0.0, 1.0);
        assert!(matches!(run_sweep(&s), Err(Error::Config(_))));
        s.sweep.stop = 2.0;
        s.runs = 0;
        assert!(matches!(run_sweep(&s), Err(Error::Config(_))));
        s.runs = 1;
        s.sweep.step = 0.0;
        assert!(matches!(run_sweep(&s), Err(Error::Config(_))));
        let mut a = small(Axis::Alpha, 0.0, 1.5, 0.5);
        a.runs = 1;
        assert!(matches!(run_sweep(&a), Err(Error::Config(_))));
    }

    #[test]
    fn eve_on_a_node_is_an_error() {
        let mut s = small(Axis::None, 0.0, 0.0, 1.0);
        s.runs = 1;
        s.geometry.eve = Some([-5.0, 0.0]);
        assert_eq!(run_sweep(&s), Err(Error::ZeroDistance("alice-eve")));
    }

    #[test]
    fn spec_json_defaults() {
        let s: ExperimentSpec = serde_json::from_str(
            r#"{"config": {"na_t": 3, "na_r": 2, "nb_t": 3, "nb_r": 2, "ne": 5},
                "sweep": {"axis": "x", "start": -15, "stop": 15},
                "schemes": ["proposed", "proposed-constrained", "proposed-h-unaware", "mf", "zf", "oneway"]}"#,
        )
        .unwrap();
        assert_eq!(s.runs, 500);
        assert_eq!(s.sweep.step, 1.0);
        assert_eq!(s.geometry.r, 5.0);
        assert_eq!(s.schemes.len(), 6);
        assert!(serde_json::from_str::<ExperimentSpec>(r#"{"config": {"na_t": 1, "na_r": 1, "nb_t": 1, "nb_r": 1, "ne": 1}, "bogus": 1}"#).is_err());
    }
}
