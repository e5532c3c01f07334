//! Greedy construction of an aligned precoder pair following the ranked
//! subset picks of the active case.

use serde::Serialize;

use super::budget::{Knowledge, SubsetGenerator};
use super::sdof::{image_rank, sdof_of};
use super::selection::{ranked_picks, selection_counts, sum_sdof_closed_form};
use super::{PrecoderPair, SDoFPair, SelectionCounts, SubsetBudget, SubsetId};
use crate::channel::{ChannelSet, NetworkConfig};
use crate::error::{Error, Result};
use crate::linalg::{hstack, CMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConstructOptions {
    /// Stop before a pair would give a legitimate receiver more streams
    /// than it has antennas.
    pub constrained: bool,
    /// Build from the eavesdropper channels only (Eve-nulling and
    /// Eve-aligned pairs; legitimate and SI channels are treated as unknown).
    pub eve_only: bool,
}

/// Everything the constructor decided along the way.
#[derive(Debug, Clone, Serialize)]
pub struct Construction {
    #[serde(skip)]
    pub pair: PrecoderPair,
    pub budget: SubsetBudget,
    pub counts: SelectionCounts,
    pub closed_form: SDoFPair,
    pub achieved: SDoFPair,
    /// Subsets actually taken, in order.
    pub taken: Vec<SubsetId>,
    /// Achieved sum S.D.o.F. after each accepted pair.
    pub history: Vec<usize>,
}

pub fn construct_precoders(
    ch: &ChannelSet,
    cfg: &NetworkConfig,
    constrained: bool,
) -> Result<PrecoderPair> {
    let opts = ConstructOptions {
        constrained,
        ..Default::default()
    };
    Ok(construct_with(ch, cfg, opts)?.pair)
}

fn receive_limits_hold(ch: &ChannelSet, v_a: &CMatrix, v_b: &CMatrix) -> bool {
    let at_alice = image_rank(&ch.h_aa, v_a) + image_rank(&ch.h_ab, v_b);
    let at_bob = image_rank(&ch.h_ba, v_a) + image_rank(&ch.h_bb, v_b);
    at_alice <= ch.h_aa.nrows() && at_bob <= ch.h_bb.nrows()
}

pub fn construct_with(
    ch: &ChannelSet,
    cfg: &NetworkConfig,
    opts: ConstructOptions,
) -> Result<Construction> {
    if !ch.conforms_to(cfg) {
        return Err(Error::DimensionMismatch(
            "channel shapes do not match the antenna configuration".into(),
        ));
    }
    let generator = if opts.eve_only {
        SubsetGenerator::eve_only(ch)?
    } else {
        SubsetGenerator::new(ch)?
    };
    let budget = *generator.budget();
    let counts = selection_counts(&budget, cfg);
    let (closed_form, _) = sum_sdof_closed_form(&budget, cfg);
    let picks = ranked_picks(&budget, cfg);

    let mut pools: Vec<(CMatrix, CMatrix)> = Vec::with_capacity(8);
    for id in SubsetId::ALL {
        let n = picks.iter().filter(|&&p| p == id).count();
        pools.push(generator.vectors(id, n)?);
    }
    let mut used = [0usize; 8];

    let mut v_a = CMatrix::zeros(cfg.na_t, 0);
    let mut v_b = CMatrix::zeros(cfg.nb_t, 0);
    let mut taken = Vec::new();
    let mut history = Vec::new();
    let mut current = SDoFPair::default();

    for id in picks {
        let (pa, pb) = &pools[id.index()];
        let j = used[id.index()];
        let next_a = hstack(&v_a, &pa.columns(j, 1).into_owned())?;
        let next_b = hstack(&v_b, &pb.columns(j, 1).into_owned())?;
        if opts.constrained && !receive_limits_hold(ch, &next_a, &next_b) {
            break;
        }
        let sdof = sdof_of(ch, &next_a, &next_b)?;
        if generator.knowledge() == Knowledge::Full && sdof.total() < current.total() {
            return Err(Error::InternalInconsistency(format!(
                "adding a {id} pair lowered the sum S.D.o.F. from {} to {}",
                current.total(),
                sdof.total()
            )));
        }
        used[id.index()] += 1;
        v_a = next_a;
        v_b = next_b;
        current = sdof;
        taken.push(id);
        history.push(sdof.total());
    }

    let pair = PrecoderPair {
        v_a,
        v_b,
        provenance: taken.iter().map(|&id| Some(id)).collect(),
        power: cfg.power_linear(),
    };
    Ok(Construction {
        pair,
        budget,
        counts,
        closed_form,
        achieved: current,
        taken,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::gen_rayleigh;
    use crate::precoder::achieved_sdof;

    fn build(cfg: NetworkConfig, seed: u64, constrained: bool) -> Construction {
        let ch = gen_rayleigh(&cfg, seed);
        construct_with(
            &ch,
            &cfg,
            ConstructOptions {
                constrained,
                eve_only: false,
            },
        )
        .unwrap()
    }

    #[test]
    fn example_one_order() {
        let c = build(NetworkConfig::new(5, 2, 4, 3, 5), 1, false);
        assert_eq!(c.taken, vec![SubsetId::S23, SubsetId::S22]);
        assert_eq!(c.achieved.total(), 3);
        assert_eq!(c.achieved, c.closed_form);
    }

    #[test]
    fn default_scenario() {
        let c = build(NetworkConfig::default(), 2, false);
        assert_eq!(c.achieved, SDoFPair::new(1, 1));
        assert_eq!(c.taken, vec![SubsetId::S24]);
    }

    #[test]
    fn fig7_constrained_vs_free() {
        let cfg = NetworkConfig::new(4, 3, 5, 2, 5);
        assert_eq!(build(cfg, 3, false).achieved, SDoFPair::new(1, 2));
        assert_eq!(build(cfg, 3, true).achieved, SDoFPair::new(1, 1));
    }

    #[test]
    fn history_is_monotone_and_pair_aligned() {
        let cfg = NetworkConfig::new(7, 4, 7, 4, 2);
        let ch = gen_rayleigh(&cfg, 4);
        let c = construct_with(&ch, &cfg, ConstructOptions::default()).unwrap();
        assert!(c.history.windows(2).all(|w| w[0] <= w[1]));
        assert!(c.pair.alignment_residual(&ch.g_a, &ch.g_b) <= 1e-9);
        assert_eq!(achieved_sdof(&ch, &c.pair).unwrap().total(), 7);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let ch = gen_rayleigh(&NetworkConfig::default(), 1);
        let other = NetworkConfig::new(4, 2, 3, 2, 5);
        assert!(matches!(
            construct_precoders(&ch, &other, false),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
