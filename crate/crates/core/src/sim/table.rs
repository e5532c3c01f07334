use serde::Serialize;

use crate::channel::{gen_rayleigh, NetworkConfig};
use crate::error::Result;
use crate::precoder::{construct_with, CaseLabel, ConstructOptions, SDoFPair, SubsetBudget};
use crate::rate::empirical_sdof;

/// One line of an S.D.o.F. table: what the closed form predicts and what
/// the construction achieves on one random draw.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SdofRow {
    pub config: NetworkConfig,
    pub case: CaseLabel,
    pub budget: SubsetBudget,
    pub counts: Vec<usize>,
    pub closed_form: SDoFPair,
    pub constructive: SDoFPair,
    pub agree: bool,
}

impl SdofRow {
    pub const HEADER: &'static str =
        "na_t,na_r,nb_t,nb_r,ne,case,d11,d12,d13,d14,d21,d22,d23,d24,counts,closed_a,closed_b,built_a,built_b,agree";

    pub fn csv_line(&self) -> String {
        let c = &self.config;
        let d: Vec<String> = self.budget.d.iter().map(|x| x.to_string()).collect();
        let q: Vec<String> = self.counts.iter().map(|x| x.to_string()).collect();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            c.na_t,
            c.na_r,
            c.nb_t,
            c.nb_r,
            c.ne,
            self.case,
            d.join(","),
            q.join(" "),
            self.closed_form.ds_a,
            self.closed_form.ds_b,
            self.constructive.ds_a,
            self.constructive.ds_b,
            self.agree
        )
    }
}

pub fn sdof_row(cfg: &NetworkConfig, seed: u64) -> Result<SdofRow> {
    let ch = gen_rayleigh(cfg, seed);
    let c = construct_with(&ch, cfg, ConstructOptions::default())?;
    Ok(SdofRow {
        config: *cfg,
        case: c.counts.case,
        budget: c.budget,
        counts: c.counts.counts.clone(),
        closed_form: c.closed_form,
        constructive: c.achieved,
        agree: c.closed_form == c.achieved,
    })
}

/// One row per configuration, each from its own Rayleigh draw.
pub fn sdof_table(configs: &[NetworkConfig], seed: u64) -> Result<Vec<SdofRow>> {
    configs
        .iter()
        .enumerate()
        .map(|(i, cfg)| sdof_row(cfg, seed.wrapping_add(i as u64)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeCheck {
    pub achieved: SDoFPair,
    pub slope_a: f64,
    pub slope_b: f64,
}

impl SlopeCheck {
    pub fn within(&self, tol: f64) -> bool {
        (self.slope_a - self.achieved.ds_a as f64).abs() <= tol
            && (self.slope_b - self.achieved.ds_b as f64).abs() <= tol
    }
}

/// Build the aligned pair once on a Rayleigh draw and fit the secrecy-rate
/// slopes over `grid_dbm`, with self-interference level `cfg.rho`.
pub fn slope_check(cfg: &NetworkConfig, seed: u64, grid_dbm: &[f64]) -> Result<SlopeCheck> {
    let ch = gen_rayleigh(cfg, seed);
    let c = construct_with(&ch, cfg, ConstructOptions::default())?;
    let pair = c.pair;
    let (slope_a, slope_b) =
        empirical_sdof(&ch, |p| pair.clone().with_power(p).transmit(), grid_dbm, cfg.rho)?;
    Ok(SlopeCheck {
        achieved: c.achieved,
        slope_a,
        slope_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_examples() {
        let cfgs = [
            NetworkConfig::new(5, 2, 4, 3, 5),
            NetworkConfig::new(4, 6, 8, 2, 5),
            NetworkConfig::new(7, 4, 7, 4, 2),
        ];
        let rows = sdof_table(&cfgs, 1).unwrap();
        let totals: Vec<usize> = rows.iter().map(|r| r.closed_form.total()).collect();
        assert_eq!(totals, vec![3, 5, 7]);
        assert!(rows.iter().all(|r| r.agree));
    }

    #[test]
    fn every_case_family_appears() {
        let cfgs = [
            NetworkConfig::new(3, 2, 3, 2, 5),
            NetworkConfig::new(4, 6, 8, 2, 5),
            NetworkConfig::new(8, 2, 4, 6, 5),
            NetworkConfig::new(7, 4, 7, 4, 2),
        ];
        let fam: Vec<char> = sdof_table(&cfgs, 3)
            .unwrap()
            .iter()
            .map(|r| r.case.family())
            .collect();
        assert_eq!(fam, vec!['A', 'B', 'C', 'D']);
    }

    #[test]
    fn no_eavesdropper_antennas() {
        let cfg = NetworkConfig::new(3, 2, 3, 2, 0);
        let row = sdof_row(&cfg, 4).unwrap();
        assert_eq!(row.budget.d[0], 1);
        assert_eq!(row.budget.d[2], 1);
        assert!(row.agree);
        assert!(row.csv_line().starts_with("3,2,3,2,0,"));
    }

    #[test]
    fn default_scenario_slopes() {
        let grid: Vec<f64> = (0..7).map(|i| 60.0 + 10.0 * i as f64).collect();
        let s = slope_check(&NetworkConfig::default(), 5, &grid).unwrap();
        assert_eq!(s.achieved, SDoFPair::new(1, 1));
        assert!(s.within(0.15), "{s:?}");
    }
}
