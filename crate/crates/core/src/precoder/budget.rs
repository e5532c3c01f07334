use serde::Serialize;

use super::SubsetId;
use crate::channel::{ChannelSet, NetworkConfig};
use crate::error::{Error, Result};
use crate::linalg::{
    gsvd, hstack_all, identity, null_basis_rtol, orth_basis_abs, orth_basis_rtol,
    pinv, rank_rtol, row_space_basis_rtol, CMatrix, GsvdResult, SUBSPACE_RTOL,
};
use num_complex::Complex64;

/// Threshold for "this orthonormal direction survives the projection".
const DIRECTION_TOL: f64 = 1e-8;

/// How many linearly independent candidate pairs each subset offers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SubsetBudget {
    pub d: [usize; 8],
    pub s_hat: usize,
    pub s_bar: usize,
    pub s_breve: usize,
    pub s_tilde: usize,
}

fn pos(x: i64) -> usize {
    x.max(0) as usize
}

/// Shared dimension of two generic column spaces of widths `m`, `k` in `C^n`.
fn generic_s(m: usize, k: usize, n: usize) -> usize {
    (m.min(n) + k.min(n)).saturating_sub(n)
}

impl SubsetBudget {
    /// Budgets from antenna counts and the four shared dimensions.
    pub fn from_dims(
        cfg: &NetworkConfig,
        s_hat: usize,
        s_bar: usize,
        s_breve: usize,
        s_tilde: usize,
    ) -> Result<Self> {
        let (na_t, na_r, nb_t, nb_r, ne) = {
            let (a, b, c, d, e) = cfg.antennas();
            (a as i64, b as i64, c as i64, d as i64, e as i64)
        };
        let d22 = s_bar as i64 - s_hat as i64;
        let d23 = s_breve as i64 - s_hat as i64;
        let d24 = s_tilde as i64 - s_hat as i64 - d22 - d23;
        if d22 < 0 || d23 < 0 || d24 < 0 {
            return Err(Error::InternalInconsistency(format!(
                "shared dimensions ({s_hat}, {s_bar}, {s_breve}, {s_tilde}) give a negative budget"
            )));
        }
        let mut d = [0usize; 8];
        d[SubsetId::S11.index()] = pos(na_t - ne - na_r);
        d[SubsetId::S12.index()] = na_r.min(pos(na_t - ne) as i64) as usize;
        d[SubsetId::S13.index()] = pos(nb_t - ne - nb_r);
        d[SubsetId::S14.index()] = nb_r.min(pos(nb_t - ne) as i64) as usize;
        d[SubsetId::S21.index()] = s_hat;
        d[SubsetId::S22.index()] = d22 as usize;
        d[SubsetId::S23.index()] = d23 as usize;
        d[SubsetId::S24.index()] = d24 as usize;
        Ok(SubsetBudget {
            d,
            s_hat,
            s_bar,
            s_breve,
            s_tilde,
        })
    }

    /// Budgets that generic full-rank channels of this shape produce.
    pub fn generic(cfg: &NetworkConfig) -> Self {
        let ga = cfg.na_t.saturating_sub(cfg.na_r);
        let gb = cfg.nb_t.saturating_sub(cfg.nb_r);
        let ne = cfg.ne;
        Self::from_dims(
            cfg,
            generic_s(ga, gb, ne),
            generic_s(cfg.na_t, gb, ne),
            generic_s(ga, cfg.nb_t, ne),
            generic_s(cfg.na_t, cfg.nb_t, ne),
        )
        .expect("generic shared dimensions are nested")
    }

    /// Budgets when the self-interference and legitimate channels are
    /// unknown: only Eve-nulling and Eve-aligned pairs remain.
    pub fn h_unaware(&self) -> Self {
        let mut out = *self;
        for id in [SubsetId::S11, SubsetId::S13, SubsetId::S21, SubsetId::S22, SubsetId::S23] {
            out.d[id.index()] = 0;
        }
        out.d[SubsetId::S24.index()] = self.s_tilde;
        out
    }

    pub fn get(&self, id: SubsetId) -> usize {
        self.d[id.index()]
    }
}

/// Whether the generator may use the legitimate and self-interference
/// channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Knowledge {
    Full,
    EveOnly,
}

/// Per-channel-set cache of the bases and decompositions every subset
/// formula draws from.
#[derive(Debug, Clone)]
pub struct SubsetGenerator {
    cfg: NetworkConfig,
    knowledge: Knowledge,
    gamma_aa: CMatrix,
    gamma_bb: CMatrix,
    hat: GsvdResult,
    bar: GsvdResult,
    breve: GsvdResult,
    tilde: GsvdResult,
    /// Eve-side directions reserved for S22, S23, S24 (orthonormal).
    dirs: [CMatrix; 3],
    one_sided: [(CMatrix, CMatrix); 4],
    budget: SubsetBudget,
}

fn shape_of(ch: &ChannelSet) -> NetworkConfig {
    NetworkConfig::new(
        ch.g_a.ncols(),
        ch.h_aa.nrows(),
        ch.g_b.ncols(),
        ch.h_bb.nrows(),
        ch.g_a.nrows(),
    )
}

fn check_full_rank(ch: &ChannelSet) -> Result<()> {
    let links: [(&'static str, &CMatrix); 6] = [
        ("h_ba", &ch.h_ba),
        ("h_ab", &ch.h_ab),
        ("h_aa", &ch.h_aa),
        ("h_bb", &ch.h_bb),
        ("g_a", &ch.g_a),
        ("g_b", &ch.g_b),
    ];
    for (name, m) in links {
        if rank_rtol(m, SUBSPACE_RTOL) != m.nrows().min(m.ncols()) {
            return Err(Error::RankDegenerate(name));
        }
    }
    Ok(())
}

/// Orthonormal part of `span(w)` orthogonal to the orthonormal `q`.
fn outside(w: &CMatrix, q: &CMatrix) -> CMatrix {
    let w = orth_basis_rtol(w, SUBSPACE_RTOL);
    if q.ncols() == 0 {
        return w;
    }
    let residual = &w - q * (q.adjoint() * &w);
    orth_basis_abs(&residual, DIRECTION_TOL)
}

pub(super) fn scale_pairs(va: CMatrix, vb: CMatrix) -> (CMatrix, CMatrix) {
    let mut va = va;
    let mut vb = vb;
    for j in 0..va.ncols() {
        let s = va.column(j).norm().max(vb.column(j).norm());
        if s > 0.0 {
            va.column_mut(j).unscale_mut(s);
            vb.column_mut(j).unscale_mut(s);
        }
    }
    (va, vb)
}

fn inv_diag(l: &[f64]) -> CMatrix {
    let mut d = CMatrix::zeros(l.len(), l.len());
    for (i, &x) in l.iter().enumerate() {
        d[(i, i)] = Complex64::new(1.0 / x, 0.0);
    }
    d
}

/// Pairs mapping to the Eve-side directions `eve` through a GSVD whose
/// operands were `G_a·left` and `G_b·right`.
fn aligned_pairs(
    g: &GsvdResult,
    left: Option<&CMatrix>,
    right: Option<&CMatrix>,
    eve: &CMatrix,
) -> (CMatrix, CMatrix) {
    let z = pinv(&g.x2(), SUBSPACE_RTOL) * eve;
    let xa = g.psi12() * inv_diag(&g.lambda1) * &z;
    let xb = g.psi22() * inv_diag(&g.lambda2) * &z;
    let va = match left {
        Some(l) => l * xa,
        None => xa,
    };
    let vb = match right {
        Some(r) => r * xb,
        None => xb,
    };
    scale_pairs(va, vb)
}

impl SubsetGenerator {
    pub fn new(ch: &ChannelSet) -> Result<Self> {
        Self::build(ch, Knowledge::Full)
    }

    /// Generator that ignores `h_*` entirely (only their shapes are used).
    pub fn eve_only(ch: &ChannelSet) -> Result<Self> {
        Self::build(ch, Knowledge::EveOnly)
    }

    fn build(ch: &ChannelSet, knowledge: Knowledge) -> Result<Self> {
        let cfg = shape_of(ch);
        match knowledge {
            Knowledge::Full => check_full_rank(ch)?,
            Knowledge::EveOnly => {
                for (name, m) in [("g_a", &ch.g_a), ("g_b", &ch.g_b)] {
                    if rank_rtol(m, SUBSPACE_RTOL) != m.nrows().min(m.ncols()) {
                        return Err(Error::RankDegenerate(name));
                    }
                }
            }
        }
        let tilde = gsvd(&ch.g_a, &ch.g_b)?;
        let null_ga = null_basis_rtol(&ch.g_a, SUBSPACE_RTOL);
        let null_gb = null_basis_rtol(&ch.g_b, SUBSPACE_RTOL);

        if knowledge == Knowledge::EveOnly {
            let base = SubsetBudget::from_dims(&cfg, 0, 0, 0, tilde.dims.s)?.h_unaware();
            let take = |m: &CMatrix, n: usize| m.columns(0, n.min(m.ncols())).into_owned();
            let s12 = take(&null_ga, base.get(SubsetId::S12));
            let s14 = take(&null_gb, base.get(SubsetId::S14));
            let empty_a = CMatrix::zeros(cfg.na_t, 0);
            let empty_b = CMatrix::zeros(cfg.nb_t, 0);
            let ne = cfg.ne;
            let one_sided = [
                (empty_a.clone(), CMatrix::zeros(cfg.nb_t, 0)),
                (s12.clone(), CMatrix::zeros(cfg.nb_t, s12.ncols())),
                (CMatrix::zeros(cfg.na_t, 0), empty_b.clone()),
                (CMatrix::zeros(cfg.na_t, s14.ncols()), s14.clone()),
            ];
            let empty_g = |n: usize, m: usize, k: usize| {
                gsvd(&CMatrix::zeros(n, m), &CMatrix::zeros(n, k)).expect("empty gsvd")
            };
            let dirs = [
                CMatrix::zeros(ne, 0),
                CMatrix::zeros(ne, 0),
                orth_basis_rtol(&tilde.x2(), SUBSPACE_RTOL),
            ];
            return Ok(SubsetGenerator {
                cfg,
                knowledge,
                gamma_aa: identity(cfg.na_t),
                gamma_bb: identity(cfg.nb_t),
                hat: empty_g(ne, 0, 0),
                bar: empty_g(ne, 0, 0),
                breve: empty_g(ne, 0, 0),
                tilde,
                dirs,
                one_sided,
                budget: base,
            });
        }

        let gamma_aa = null_basis_rtol(&ch.h_aa, SUBSPACE_RTOL);
        let gamma_bb = null_basis_rtol(&ch.h_bb, SUBSPACE_RTOL);
        let ga_n = &ch.g_a * &gamma_aa;
        let gb_n = &ch.g_b * &gamma_bb;
        let hat = gsvd(&ga_n, &gb_n)?;
        let bar = gsvd(&ch.g_a, &gb_n)?;
        let breve = gsvd(&ga_n, &ch.g_b)?;
        let budget =
            SubsetBudget::from_dims(&cfg, hat.dims.s, bar.dims.s, breve.dims.s, tilde.dims.s)?;

        let q21 = orth_basis_rtol(&hat.x2(), SUBSPACE_RTOL);
        let d22 = outside(&bar.x2(), &q21);
        let d23 = outside(&breve.x2(), &q21);
        let taken = orth_basis_abs(&hstack_all(cfg.ne, &[&q21, &d22, &d23])?, DIRECTION_TOL);
        let d24 = outside(&tilde.x2(), &taken);
        for (id, dirs) in [(SubsetId::S22, &d22), (SubsetId::S23, &d23), (SubsetId::S24, &d24)] {
            if dirs.ncols() != budget.get(id) {
                return Err(Error::InternalInconsistency(format!(
                    "{id} offers {} Eve-side directions for a budget of {}",
                    dirs.ncols(),
                    budget.get(id)
                )));
            }
        }

        // Eve-nulling vectors split by whether they also null the SI link.
        let sa = &ch.h_aa * &null_ga;
        let sb = &ch.h_bb * &null_gb;
        let s11 = &null_ga * null_basis_rtol(&sa, SUBSPACE_RTOL);
        let s12 = &null_ga * row_space_basis_rtol(&sa, SUBSPACE_RTOL);
        let s13 = &null_gb * null_basis_rtol(&sb, SUBSPACE_RTOL);
        let s14 = &null_gb * row_space_basis_rtol(&sb, SUBSPACE_RTOL);
        let one_sided = [
            (s11.clone(), CMatrix::zeros(cfg.nb_t, s11.ncols())),
            (s12.clone(), CMatrix::zeros(cfg.nb_t, s12.ncols())),
            (CMatrix::zeros(cfg.na_t, s13.ncols()), s13.clone()),
            (CMatrix::zeros(cfg.na_t, s14.ncols()), s14.clone()),
        ];
        for (i, (va, vb)) in one_sided.iter().enumerate() {
            let id = SubsetId::ALL[i];
            if va.ncols().max(vb.ncols()) != budget.get(id) {
                return Err(Error::InternalInconsistency(format!(
                    "{id} basis has {} columns for a budget of {}",
                    va.ncols(),
                    budget.get(id)
                )));
            }
        }

        Ok(SubsetGenerator {
            cfg,
            knowledge,
            gamma_aa,
            gamma_bb,
            hat,
            bar,
            breve,
            tilde,
            dirs: [d22, d23, d24],
            one_sided,
            budget,
        })
    }

    pub fn budget(&self) -> &SubsetBudget {
        &self.budget
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.cfg
    }

    pub fn knowledge(&self) -> Knowledge {
        self.knowledge
    }

    /// The first `count` candidate pairs of subset `id` as column blocks
    /// `(v_a, v_b)`.
    pub fn vectors(&self, id: SubsetId, count: usize) -> Result<(CMatrix, CMatrix)> {
        let budget = self.budget.get(id);
        if count > budget {
            return Err(Error::BudgetExceeded {
                subset: id.name(),
                requested: count,
                budget,
            });
        }
        if count == 0 {
            return Ok((CMatrix::zeros(self.cfg.na_t, 0), CMatrix::zeros(self.cfg.nb_t, 0)));
        }
        let (va, vb) = match id {
            SubsetId::S11 | SubsetId::S12 | SubsetId::S13 | SubsetId::S14 => {
                let (va, vb) = &self.one_sided[id.index()];
                let (va, vb) = (va.columns(0, count).into_owned(), vb.columns(0, count).into_owned());
                return Ok((va, vb));
            }
            SubsetId::S21 => {
                let s = self.hat.dims.s;
                let mut z = CMatrix::zeros(s, count);
                for j in 0..count {
                    z[(j, j)] = Complex64::new(1.0, 0.0);
                }
                let eve = self.hat.x2() * z;
                aligned_pairs(&self.hat, Some(&self.gamma_aa), Some(&self.gamma_bb), &eve)
            }
            SubsetId::S22 => {
                let eve = self.dirs[0].columns(0, count).into_owned();
                aligned_pairs(&self.bar, None, Some(&self.gamma_bb), &eve)
            }
            SubsetId::S23 => {
                let eve = self.dirs[1].columns(0, count).into_owned();
                aligned_pairs(&self.breve, Some(&self.gamma_aa), None, &eve)
            }
            SubsetId::S24 => {
                let eve = self.dirs[2].columns(0, count).into_owned();
                aligned_pairs(&self.tilde, None, None, &eve)
            }
        };
        Ok((va, vb))
    }

    /// Every candidate pair of `id`, i.e. `vectors(id, budget)`.
    pub fn basis(&self, id: SubsetId) -> (CMatrix, CMatrix) {
        self.vectors(id, self.budget.get(id))
            .expect("full budget is always available")
    }
}

/// Table I budgets of a channel realization, from the four GSVDs.
pub fn subset_budgets(ch: &ChannelSet) -> Result<SubsetBudget> {
    Ok(*SubsetGenerator::new(ch)?.budget())
}

/// `count` linearly independent candidate pairs from subset `id`.
pub fn subset_vectors(ch: &ChannelSet, id: SubsetId, count: usize) -> Result<(CMatrix, CMatrix)> {
    SubsetGenerator::new(ch)?.vectors(id, count)
}
