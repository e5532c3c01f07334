use fdw_core::channel::{gen_rayleigh, NetworkConfig};
use fdw_core::linalg::{rank_rtol, spectral_norm, CMatrix};
use fdw_core::precoder::{
    achieved_sdof, construct_with, selection_counts, sum_sdof_closed_form, ConstructOptions,
    SubsetBudget, SubsetGenerator, SubsetId,
};
use fdw_core::Error;
use nalgebra::DMatrix;
use proptest::prelude::*;
use proptest::test_runner::Config;

fn antennas() -> impl Strategy<Value = NetworkConfig> {
    (1usize..=6, 1usize..=6, 1usize..=6, 1usize..=6, 1usize..=6)
        .prop_map(|(a, b, c, d, e)| NetworkConfig::new(a, b, c, d, e))
}

/// `‖H v‖ ≤ tol · ‖H‖ · ‖v‖` for every column.
fn nulls(h: &CMatrix, v: &CMatrix) -> bool {
    let hn = spectral_norm(h);
    v.column_iter()
        .all(|c| (h * c).norm() <= 1e-9 * hn.max(1.0) * c.norm().max(1e-300))
}

fn stacked(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut m = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols());
    m.rows_mut(0, a.nrows()).copy_from(a);
    m.rows_mut(a.nrows(), b.nrows()).copy_from(b);
    m
}

proptest! {
    #![proptest_config(Config { cases: 500, failure_persistence: None, ..Config::default() })]

    #[test]
    fn construction_meets_closed_form(cfg in antennas(), seed in any::<u64>()) {
        let ch = gen_rayleigh(&cfg, seed);
        let c = construct_with(&ch, &cfg, ConstructOptions::default()).unwrap();
        prop_assert_eq!(c.achieved.total(), c.closed_form.total(), "{:?}", cfg);
        prop_assert_eq!(achieved_sdof(&ch, &c.pair).unwrap(), c.achieved);
        prop_assert!(c.pair.alignment_residual(&ch.g_a, &ch.g_b) <= 1e-9);
        prop_assert!(c.history.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn numeric_budgets_are_generic(cfg in antennas(), seed in any::<u64>()) {
        let ch = gen_rayleigh(&cfg, seed);
        let g = SubsetGenerator::new(&ch).unwrap();
        prop_assert_eq!(*g.budget(), SubsetBudget::generic(&cfg));
    }

    #[test]
    fn subsets_honour_their_constraints(cfg in antennas(), seed in any::<u64>()) {
        let ch = gen_rayleigh(&cfg, seed);
        let g = SubsetGenerator::new(&ch).unwrap();
        for id in SubsetId::ALL {
            let n = g.budget().get(id);
            let (va, vb) = g.vectors(id, n).unwrap();
            prop_assert_eq!(rank_rtol(&stacked(&va, &vb), 1e-9), n, "{} of {:?}", id, cfg);
            let over = g.vectors(id, n + 1);
            let is_budget_error = matches!(over, Err(Error::BudgetExceeded { .. }));
            prop_assert!(is_budget_error);

            let eve_a = &ch.g_a * &va;
            let eve_b = &ch.g_b * &vb;
            let scale = eve_a.norm().max(eve_b.norm()).max(1.0);
            prop_assert!((&eve_a - &eve_b).norm() <= 1e-9 * scale, "{} not aligned", id);
            match id {
                SubsetId::S11 => {
                    prop_assert!(vb.norm() == 0.0 && nulls(&ch.g_a, &va) && nulls(&ch.h_aa, &va));
                }
                SubsetId::S12 => prop_assert!(vb.norm() == 0.0 && nulls(&ch.g_a, &va)),
                SubsetId::S13 => {
                    prop_assert!(va.norm() == 0.0 && nulls(&ch.g_b, &vb) && nulls(&ch.h_bb, &vb));
                }
                SubsetId::S14 => prop_assert!(va.norm() == 0.0 && nulls(&ch.g_b, &vb)),
                SubsetId::S21 => prop_assert!(nulls(&ch.h_aa, &va) && nulls(&ch.h_bb, &vb)),
                SubsetId::S22 => prop_assert!(nulls(&ch.h_bb, &vb)),
                SubsetId::S23 => prop_assert!(nulls(&ch.h_aa, &va)),
                SubsetId::S24 => {}
            }
            if id.is_aligned() && n > 0 {
                prop_assert!(eve_a.column_iter().all(|c| c.norm() > 0.0));
            }
        }
    }

    #[test]
    fn mirroring_keeps_the_total(cfg in antennas()) {
        let b = SubsetBudget::generic(&cfg);
        let m = cfg.mirrored();
        let bm = SubsetBudget::generic(&m);
        // The split between the links may differ; the total may not.
        let (_, t) = sum_sdof_closed_form(&b, &cfg);
        let (_, tm) = sum_sdof_closed_form(&bm, &m);
        prop_assert_eq!(t, tm);
        let fam = selection_counts(&b, &cfg).case.family();
        let fam_m = selection_counts(&bm, &m).case.family();
        let expect = match fam { 'B' => 'C', 'C' => 'B', f => f };
        prop_assert_eq!(fam_m, expect);
    }

    #[test]
    fn constrained_never_beats_free(cfg in antennas(), seed in any::<u64>()) {
        let ch = gen_rayleigh(&cfg, seed);
        let free = construct_with(&ch, &cfg, ConstructOptions::default()).unwrap();
        let opts = ConstructOptions { constrained: true, eve_only: false };
        let tight = construct_with(&ch, &cfg, opts).unwrap();
        prop_assert!(tight.achieved.total() <= free.achieved.total());
        prop_assert!(tight.taken.len() <= free.taken.len());
        prop_assert_eq!(&tight.taken[..], &free.taken[..tight.taken.len()]);
    }
}
