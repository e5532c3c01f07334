//! Case split, selection counts and the closed-form sum S.D.o.F.

use serde::Serialize;
use std::fmt;

use super::{SDoFPair, SubsetBudget, SubsetId};
use crate::channel::NetworkConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CaseLabel {
    AIa,
    AIb,
    AIIa,
    AIIb,
    B,
    C,
    D,
}

impl CaseLabel {
    pub fn name(self) -> &'static str {
        match self {
            CaseLabel::AIa => "A(i)a",
            CaseLabel::AIb => "A(i)b",
            CaseLabel::AIIa => "A(ii)a",
            CaseLabel::AIIb => "A(ii)b",
            CaseLabel::B => "B",
            CaseLabel::C => "C",
            CaseLabel::D => "D",
        }
    }

    /// The top-level case letter.
    pub fn family(self) -> char {
        match self {
            CaseLabel::AIa | CaseLabel::AIb | CaseLabel::AIIa | CaseLabel::AIIb => 'A',
            CaseLabel::B => 'B',
            CaseLabel::C => 'C',
            CaseLabel::D => 'D',
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Number of pairs taken from each ranked group: `q1..q7` in case A,
/// `ζ1..ζ6` in B, `η1..η6` in C, `t1..t5` in D.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SelectionCounts {
    pub case: CaseLabel,
    pub counts: Vec<usize>,
}

/// `min⁺{x, y}`.
fn mp(x: i64, y: i64) -> i64 {
    x.min(y).max(0)
}

fn pos(x: i64) -> i64 {
    x.max(0)
}

fn fl(x: i64, k: i64) -> i64 {
    x.div_euclid(k)
}

struct Evaluated {
    case: CaseLabel,
    counts: Vec<i64>,
    da: i64,
    db: i64,
    picks: Vec<SubsetId>,
}

fn budgets(b: &SubsetBudget) -> [i64; 8] {
    let mut d = [0i64; 8];
    for (i, v) in b.d.iter().enumerate() {
        d[i] = *v as i64;
    }
    d
}

const I11: usize = 0;
const I12: usize = 1;
const I13: usize = 2;
const I14: usize = 3;
const I21: usize = 4;
const I22: usize = 5;
const I23: usize = 6;
const I24: usize = 7;

fn repeat(out: &mut Vec<SubsetId>, id: SubsetId, n: i64) {
    out.extend(std::iter::repeat_n(id, n.max(0) as usize));
}

/// Case A written for `N_b^r ≥ N_a^r`. `d` is already in that orientation.
/// Returns the counts, the pair, and whether the d22/d̄23 roles swapped.
fn case_a(nar: i64, nbr: i64, d: &[i64; 8]) -> (Vec<i64>, i64, i64, bool) {
    let d23_bar = d[I23] - d[I23].min(nbr - nar);
    let swapped = d[I22] < d23_bar;
    let (x22, x23) = if swapped { (d23_bar, d[I22]) } else { (d[I22], d23_bar) };

    let q1 = mp(nbr.max(nar), d[I21]);
    let q2 = mp(fl(nbr - q1, 2).max(nar - q1), (nbr - nar).min(d[I23]));
    let q3 = 2 * mp(fl(nbr - q1 - 2 * q2, 3).max(fl(nar - q1 - q2, 3)), x23);
    let q4 = mp((nbr - q1 - 2 * q2 - 3 * q3).max(fl(nar - q1 - q2 - 3 * q3, 2)), x22 - q3);
    let q5 = mp(
        fl(nbr - q1 - 2 * q2 - 3 * q3 - q4, 2).max(fl(nar - q1 - q2 - 3 * q3 - 2 * q4, 2)),
        d[I24],
    );
    let rb = nbr - q1 - 2 * q2 - 3 * q3 - q4 - 2 * q5;
    let ra = nar - q1 - q2 - 3 * q3 - 2 * q4 - 2 * q5;
    let q6 = mp(rb.min(ra), d[I12]);
    let q7 = mp((rb - q6).min(ra - q6), d[I14]);

    // q4 pairs are S22 pairs normally, S23 pairs when the roles swap; the
    // self-interference they cause lands on Alice or Bob accordingly.
    let (q4_at_b, q4_at_a) = if swapped { (q4, 0) } else { (0, q4) };
    let da = pos(nbr - q2 - q3 / 2 - q5 - q7 - q4_at_b).min(q1 + q2 + q3 + q4 + q5 + q6);
    let db = pos(nar - q3 / 2 - q4_at_a - q5 - q6).min(q1 + q2 + q3 + q4 + q5 + q7);
    (vec![q1, q2, q3, q4, q5, q6, q7], da, db, swapped)
}

fn evaluate(budget: &SubsetBudget, cfg: &NetworkConfig) -> Evaluated {
    use SubsetId::*;
    let d = budgets(budget);
    let (nat, nar, nbt, nbr, ne) = {
        let (a, b, c, dd, e) = cfg.antennas();
        (a as i64, b as i64, c as i64, dd as i64, e as i64)
    };
    let cond_a = nat <= ne + nar;
    let cond_b = nbt <= ne + nbr;
    let mut picks = Vec::new();

    match (cond_a, cond_b) {
        (true, true) => {
            let mirror = nbr < nar;
            let (nar_m, nbr_m, dm) = if mirror {
                let mut dm = d;
                dm.swap(I22, I23);
                dm.swap(I12, I14);
                (nbr, nar, dm)
            } else {
                (nar, nbr, d)
            };
            let (q, da_m, db_m, swapped) = case_a(nar_m, nbr_m, &dm);
            let (first, second, l6, l7) = if mirror {
                (S22, S23, S14, S12)
            } else {
                (S23, S22, S12, S14)
            };
            repeat(&mut picks, S21, q[0]);
            repeat(&mut picks, first, q[1]);
            for _ in 0..q[2] / 2 {
                picks.push(second);
                picks.push(first);
            }
            repeat(&mut picks, if swapped { first } else { second }, q[3]);
            repeat(&mut picks, S24, q[4]);
            repeat(&mut picks, l6, q[5]);
            repeat(&mut picks, l7, q[6]);
            let case = match (mirror, swapped) {
                (false, false) => CaseLabel::AIa,
                (false, true) => CaseLabel::AIb,
                (true, false) => CaseLabel::AIIa,
                (true, true) => CaseLabel::AIIb,
            };
            let (da, db) = if mirror { (db_m, da_m) } else { (da_m, db_m) };
            Evaluated {
                case,
                counts: q,
                da,
                db,
                picks,
            }
        }
        (true, false) => {
            let z1 = mp(nbr.max(nar), d[I21]);
            let first = d[I22].min(nbr);
            let z2 = mp((nbr - z1).max(fl(nar - z1, 2)), first);
            let z3 = mp(nar - z1 - 2 * z2, d[I13]);
            let z4 = mp(
                (nbr - z1 - z2).max(fl(nar - z1 - 2 * z2 - z3, 2)),
                d[I22] - first,
            );
            let nar_bar = nar - z1 - 2 * z2 - z3 - 2 * z4;
            let z5 = mp((nbr - z1 - z2 - z4).min(nar_bar), d[I12]);
            let z6 = mp((nbr - z1 - z2 - z4 - z5).min(nar_bar - z5), d[I14]);
            let da = pos(nbr - z6).min(z1 + z2 + z4 + z5);
            let db = pos(nar - z2 - z4 - z5).min(z1 + z2 + z3 + z4 + z6);
            for (id, n) in [(S21, z1), (S22, z2), (S13, z3), (S22, z4), (S12, z5), (S14, z6)] {
                repeat(&mut picks, id, n);
            }
            Evaluated {
                case: CaseLabel::B,
                counts: vec![z1, z2, z3, z4, z5, z6],
                da,
                db,
                picks,
            }
        }
        (false, true) => {
            let e1 = mp(nar.max(nbr), d[I21]);
            let first = d[I23].min(nar);
            let e2 = mp(fl(nbr - e1, 2).max(nar - e1), first);
            let e3 = mp(nbr - e1 - 2 * e2, d[I11]);
            let e4 = mp(
                fl(nbr - e1 - 2 * e2 - e3, 2).max(nar - e1 - e2),
                d[I23] - first,
            );
            let nbr_bar = nbr - e1 - 2 * e2 - e3 - 2 * e4;
            let e5 = mp(nbr_bar.min(nar - e1 - e2 - e4), d[I12]);
            let e6 = mp((nbr_bar - e5).min(nar - e1 - e2 - e4 - e5), d[I14]);
            let da = pos(nbr - e2 - e4 - e6).min(e1 + e2 + e3 + e4 + e5);
            let db = pos(nar - e5).min(e1 + e2 + e4 + e6);
            for (id, n) in [(S21, e1), (S23, e2), (S11, e3), (S23, e4), (S12, e5), (S14, e6)] {
                repeat(&mut picks, id, n);
            }
            Evaluated {
                case: CaseLabel::C,
                counts: vec![e1, e2, e3, e4, e5, e6],
                da,
                db,
                picks,
            }
        }
        (false, false) => {
            let t1 = mp(nar.max(nbr), d[I21]);
            let t2 = mp(nbr - t1, d[I11]);
            let t3 = mp(nar - t1, d[I13]);
            let t4 = mp((nbr - t1 - t2).min(nar - t1 - t3), d[I12]);
            let t5 = mp((nbr - t1 - t2 - t4).min(nar - t1 - t3 - t4), d[I14]);
            let da = pos(nbr - t5).min(t1 + t2 + t4);
            let db = pos(nar - t4).min(t1 + t3 + t5);
            for (id, n) in [(S21, t1), (S11, t2), (S13, t3), (S12, t4), (S14, t5)] {
                repeat(&mut picks, id, n);
            }
            Evaluated {
                case: CaseLabel::D,
                counts: vec![t1, t2, t3, t4, t5],
                da,
                db,
                picks,
            }
        }
    }
}

/// Case label and per-group counts for the given budgets and antennas.
pub fn selection_counts(budget: &SubsetBudget, cfg: &NetworkConfig) -> SelectionCounts {
    let e = evaluate(budget, cfg);
    SelectionCounts {
        case: e.case,
        counts: e.counts.iter().map(|&c| c as usize).collect(),
    }
}

/// Closed-form S.D.o.F. pair of the active case and its total.
pub fn sum_sdof_closed_form(budget: &SubsetBudget, cfg: &NetworkConfig) -> (SDoFPair, usize) {
    let e = evaluate(budget, cfg);
    let pair = SDoFPair::new(e.da as usize, e.db as usize);
    (pair, pair.total())
}

/// The subsets to draw from, one entry per pair, in selection order.
pub fn ranked_picks(budget: &SubsetBudget, cfg: &NetworkConfig) -> Vec<SubsetId> {
    evaluate(budget, cfg).picks
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closed(cfg: NetworkConfig) -> (SelectionCounts, SDoFPair) {
        let b = SubsetBudget::generic(&cfg);
        (selection_counts(&b, &cfg), sum_sdof_closed_form(&b, &cfg).0)
    }

    #[test]
    fn example_one() {
        let (s, p) = closed(NetworkConfig::new(5, 2, 4, 3, 5));
        assert_eq!(s.case.family(), 'A');
        assert_eq!(s.counts, vec![0, 1, 0, 1, 0, 0, 0]);
        assert_eq!(p.total(), 3);
    }

    #[test]
    fn example_two() {
        let (s, p) = closed(NetworkConfig::new(4, 6, 8, 2, 5));
        assert_eq!(s.case, CaseLabel::B);
        assert_eq!(s.counts, vec![0, 2, 1, 0, 0, 0]);
        assert_eq!(p, SDoFPair::new(2, 3));
    }

    #[test]
    fn example_three() {
        let (s, p) = closed(NetworkConfig::new(7, 4, 7, 4, 2));
        assert_eq!(s.case, CaseLabel::D);
        assert_eq!(s.counts, vec![2, 1, 1, 1, 0]);
        assert_eq!(p.total(), 7);
    }

    #[test]
    fn scenario_configs() {
        assert_eq!(closed(NetworkConfig::new(3, 2, 3, 2, 5)).1, SDoFPair::new(1, 1));
        assert_eq!(closed(NetworkConfig::new(4, 3, 5, 2, 5)).1, SDoFPair::new(1, 2));
        assert_eq!(closed(NetworkConfig::new(4, 3, 4, 3, 4)).1, SDoFPair::new(2, 2));
        assert_eq!(closed(NetworkConfig::new(5, 0, 1, 4, 5)).1.total(), 1);
    }

    #[test]
    fn mirror_of_case_b_is_case_c() {
        let (s, p) = closed(NetworkConfig::new(8, 2, 4, 6, 5));
        assert_eq!(s.case, CaseLabel::C);
        assert_eq!(p, SDoFPair::new(3, 2));
    }

    #[test]
    fn zero_budgets_give_zero_counts() {
        let cfg = NetworkConfig::new(2, 2, 2, 2, 6);
        let b = SubsetBudget::generic(&cfg);
        assert_eq!(b.d, [0; 8]);
        let s = selection_counts(&b, &cfg);
        assert!(s.counts.iter().all(|&c| c == 0));
        assert_eq!(sum_sdof_closed_form(&b, &cfg).1, 0);
    }

    #[test]
    fn example_one_picks() {
        let cfg = NetworkConfig::new(5, 2, 4, 3, 5);
        let picks = ranked_picks(&SubsetBudget::generic(&cfg), &cfg);
        assert_eq!(picks, vec![SubsetId::S23, SubsetId::S22]);
    }

    #[test]
    fn fig7_picks_start_with_s22() {
        let cfg = NetworkConfig::new(4, 3, 5, 2, 5);
        let s = selection_counts(&SubsetBudget::generic(&cfg), &cfg);
        assert!(matches!(s.case, CaseLabel::AIIa | CaseLabel::AIIb));
        let picks = ranked_picks(&SubsetBudget::generic(&cfg), &cfg);
        assert_eq!(picks, vec![SubsetId::S22, SubsetId::S23]);
    }
}
