//! Subset budgets, selection counts, closed-form sum S.D.o.F. and the
//! constructive precoder design.
//!
//! Candidate precoding pairs fall into eight subsets. `S1x` pairs are
//! invisible to Eve (one side transmits, the other stays silent); `S2x`
//! pairs are aligned at Eve (`G_a v_a = G_b v_b ≠ 0`). The second digit
//! says which self-interference links the pair leaves untouched:
//!
//! | subset | Alice SI | Bob SI |
//! |--------|----------|--------|
//! | S11, S13, S21 | none | none |
//! | S12 | yes | |
//! | S14 | | yes |
//! | S22 | yes | none |
//! | S23 | none | yes |
//! | S24 | yes | yes |

mod align;
mod budget;
mod construct;
mod sdof;
mod selection;

pub use align::align_project;
pub use budget::{subset_budgets, subset_vectors, Knowledge, SubsetBudget, SubsetGenerator};
pub use construct::{construct_precoders, construct_with, ConstructOptions, Construction};
pub use sdof::{achieved_sdof, image_rank, lemma1_sdof, SignedSdof};
pub use selection::{
    ranked_picks, selection_counts, sum_sdof_closed_form, CaseLabel, SelectionCounts,
};

use serde::Serialize;
use std::fmt;

use crate::linalg::CMatrix;
use crate::rate::TransmitPair;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SubsetId {
    S11,
    S12,
    S13,
    S14,
    S21,
    S22,
    S23,
    S24,
}

impl SubsetId {
    pub const ALL: [SubsetId; 8] = [
        SubsetId::S11,
        SubsetId::S12,
        SubsetId::S13,
        SubsetId::S14,
        SubsetId::S21,
        SubsetId::S22,
        SubsetId::S23,
        SubsetId::S24,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            SubsetId::S11 => "S11",
            SubsetId::S12 => "S12",
            SubsetId::S13 => "S13",
            SubsetId::S14 => "S14",
            SubsetId::S21 => "S21",
            SubsetId::S22 => "S22",
            SubsetId::S23 => "S23",
            SubsetId::S24 => "S24",
        }
    }

    /// Pairs whose two sides are aligned at Eve rather than hidden from her.
    pub fn is_aligned(self) -> bool {
        self.index() >= 4
    }
}

impl fmt::Display for SubsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Secure degrees of freedom of the two links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct SDoFPair {
    pub ds_a: usize,
    pub ds_b: usize,
}

impl SDoFPair {
    pub fn new(ds_a: usize, ds_b: usize) -> Self {
        SDoFPair { ds_a, ds_b }
    }

    pub fn total(&self) -> usize {
        self.ds_a + self.ds_b
    }
}

impl fmt::Display for SDoFPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.ds_a, self.ds_b)
    }
}

/// A precoder pair whose columns satisfy `G_a v_a = G_b v_b` exactly.
///
/// `provenance[j]` names the subset column `j` was drawn from, or `None`
/// for columns produced by [`align_project`]. Columns are jointly scaled so
/// the larger side of each pair has unit norm; [`PrecoderPair::transmit`]
/// applies the power budget.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecoderPair {
    pub v_a: CMatrix,
    pub v_b: CMatrix,
    pub provenance: Vec<Option<SubsetId>>,
    pub power: f64,
}

impl PrecoderPair {
    pub fn empty(na_t: usize, nb_t: usize, power: f64) -> Self {
        PrecoderPair {
            v_a: CMatrix::zeros(na_t, 0),
            v_b: CMatrix::zeros(nb_t, 0),
            provenance: Vec::new(),
            power,
        }
    }

    pub fn len(&self) -> usize {
        self.v_a.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `‖G_a V_a − G_b V_b‖ / max(1, ‖G_a V_a‖)`.
    pub fn alignment_residual(&self, g_a: &CMatrix, g_b: &CMatrix) -> f64 {
        let ia = g_a * &self.v_a;
        let ib = g_b * &self.v_b;
        (&ia - ib).norm() / ia.norm().max(1.0)
    }

    /// Transmit matrices with power `P / L` on each active column, `L`
    /// being the number of nonzero columns on that side. All-zero columns
    /// stay silent.
    pub fn transmit(&self) -> TransmitPair {
        TransmitPair {
            v_a: equal_power(&self.v_a, self.power),
            v_b: equal_power(&self.v_b, self.power),
        }
    }

    pub fn with_power(mut self, power: f64) -> Self {
        self.power = power;
        self
    }
}

/// Scale nonzero columns of `v` to carry `power / L` each.
pub fn equal_power(v: &CMatrix, power: f64) -> CMatrix {
    let norms: Vec<f64> = v.column_iter().map(|c| c.norm()).collect();
    let smax = norms.iter().cloned().fold(0.0, f64::max);
    let active: Vec<bool> = norms.iter().map(|&n| n > 1e-12 * smax.max(f64::MIN_POSITIVE)).collect();
    let l = active.iter().filter(|&&a| a).count();
    let mut out = CMatrix::zeros(v.nrows(), v.ncols());
    if l == 0 {
        return out;
    }
    let target = (power / l as f64).sqrt();
    for (j, col) in v.column_iter().enumerate() {
        if active[j] {
            out.set_column(j, &(col * Complex64::new(target / norms[j], 0.0)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_power_skips_zero_columns() {
        let mut v = CMatrix::zeros(3, 3);
        v[(0, 0)] = Complex64::new(2.0, 0.0);
        v[(1, 2)] = Complex64::new(0.0, 0.5);
        let t = equal_power(&v, 4.0);
        let tr: f64 = t.iter().map(|z| z.norm_sqr()).sum();
        assert!((tr - 4.0).abs() < 1e-12);
        assert!(t.column(1).norm() == 0.0);
        assert!((t.column(0).norm_squared() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn subset_ids_are_ordered() {
        assert_eq!(SubsetId::ALL.len(), 8);
        for (i, id) in SubsetId::ALL.iter().enumerate() {
            assert_eq!(id.index(), i);
        }
        assert!(!SubsetId::S14.is_aligned());
        assert!(SubsetId::S21.is_aligned());
    }
}
