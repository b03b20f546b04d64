//! Følner ratios and witness search.
//!
//! The central quantity is `dim(sum_i g_i V) / dim V` for a finite set of
//! generators acting by left multiplication on a finite-dimensional
//! subspace of a truncation. The sum ranges over the given generators
//! only, so `V` itself is included exactly when `1` is passed as a
//! generator. Searches emit serializable certificates whose stored ratio
//! can be re-derived from the stored subspace.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{self, Matrix, SparseVec, Subspace};
use crate::kernel::{as_operator, AlgebraElement, AlgebraFamily, NormalWord, Truncation};
use crate::par;
use crate::rat::Rat;
use crate::SCHEMA_VERSION;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Exact ratio of one generator set acting on one subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioReport {
    pub generators: Vec<AlgebraElement>,
    pub subspace_dim: usize,
    pub image_dim: usize,
    pub ratio: Rat,
}

/// Largest generator degree; zero generators contribute nothing.
fn max_degree(gens: &[AlgebraElement]) -> Result<usize> {
    let mut max = 0;
    for g in gens {
        if !g.is_zero() {
            max = max.max(g.degree()?);
        }
    }
    Ok(max)
}

fn check_family(gens: &[AlgebraElement], family: &AlgebraFamily) -> Result<()> {
    if gens.is_empty() {
        return Err(Error::Invalid("at least one generator is required".into()));
    }
    for g in gens {
        if g.family() != family {
            return Err(Error::FamilyMismatch {
                left: g.family().to_string(),
                right: family.to_string(),
            });
        }
    }
    Ok(())
}

/// `dim(sum_i g_i V) / dim V`, computed exactly in the enlarged ambient
/// truncation that holds every product.
pub fn ratio(gens: &[AlgebraElement], src: &Truncation, v: &Subspace) -> Result<RatioReport> {
    check_family(gens, src.family())?;
    if v.ambient_dim() != src.len() {
        return Err(Error::AmbientMismatch {
            left: v.ambient_dim(),
            right: src.len(),
        });
    }
    if v.dim() == 0 {
        return Err(Error::ZeroSubspace);
    }
    let dst = Truncation::new(src.family(), src.degree_bound() + max_degree(gens)?)?;
    let mut images = Vec::with_capacity(gens.len());
    for g in gens {
        if g.is_zero() {
            continue;
        }
        let op = as_operator(g, src, &dst)?;
        images.push(exactlin::image(&op, v)?);
    }
    let total = exactlin::sum_many(dst.len(), images.iter())?;
    Ok(RatioReport {
        generators: gens.to_vec(),
        subspace_dim: v.dim(),
        image_dim: total.dim(),
        ratio: Rat::ratio_of(total.dim(), v.dim())?,
    })
}

/// One level of a ball scan.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: usize,
    pub dim: usize,
    pub image_dim: usize,
    pub ratio: Rat,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanOutcome {
    pub rows: Vec<ScanRow>,
    /// True when the scan stopped early because the ambient cap was hit.
    pub truncated: bool,
}

/// Ratios for `V = Truncation(n)`, `n = 0..=d_max`. Hitting the ambient
/// cap truncates the scan and sets the flag instead of erroring.
pub fn ball_sequence_scan(
    gens: &[AlgebraElement],
    family: &AlgebraFamily,
    d_max: usize,
) -> Result<ScanOutcome> {
    check_family(gens, family)?;
    let mut rows = Vec::new();
    let mut truncated = false;
    for n in 0..=d_max {
        let src = match Truncation::new(family, n) {
            Ok(t) => t,
            Err(Error::CapExceeded { .. }) => {
                truncated = true;
                break;
            }
            Err(e) => return Err(e),
        };
        let v = Subspace::full(src.len());
        match ratio(gens, &src, &v) {
            Ok(r) => rows.push(ScanRow {
                n,
                dim: r.subspace_dim,
                image_dim: r.image_dim,
                ratio: r.ratio,
            }),
            Err(Error::CapExceeded { .. }) => {
                truncated = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(ScanOutcome { rows, truncated })
}

/// Word-level action table, available when every generator is a single
/// term and every product of a generator term with a basis word is again a
/// single word. On such data the ratio of a monomial subspace reduces to
/// set counting.
pub(crate) struct SetAction {
    /// For each source basis index, the sorted deduplicated target indices.
    images: Vec<Vec<usize>>,
    target_len: usize,
}

impl SetAction {
    pub(crate) fn build(
        gens: &[AlgebraElement],
        src: &Truncation,
        dst: &Truncation,
    ) -> Option<SetAction> {
        let fam = src.family();
        let mut images: Vec<Vec<usize>> = vec![Vec::new(); src.len()];
        for g in gens {
            if g.terms().len() != 1 {
                return None;
            }
            let t = g.terms().keys().next().expect("one term");
            for (j, img) in images.iter_mut().enumerate() {
                let prods = fam.mul_words(t, src.word(j));
                if prods.len() != 1 || prods[0].1.is_zero() {
                    return None;
                }
                img.push(dst.index_of(&prods[0].0).expect("product fits target"));
            }
        }
        for img in &mut images {
            img.sort_unstable();
            img.dedup();
        }
        Some(SetAction {
            images,
            target_len: dst.len(),
        })
    }

    pub(crate) fn image_count(&self, subset: &[usize]) -> usize {
        let mut seen = vec![false; self.target_len];
        let mut count = 0;
        for &j in subset {
            for &t in &self.images[j] {
                if !seen[t] {
                    seen[t] = true;
                    count += 1;
                }
            }
        }
        count
    }
}

/// Per-word target bitmasks over a compacted target index set, for the
/// exhaustive subset scan. Only available when at most 256 distinct target
/// words occur.
pub(crate) struct MaskAction {
    pub(crate) word_masks: Vec<[u64; 4]>,
}

impl MaskAction {
    pub(crate) fn build(action: &SetAction) -> Option<MaskAction> {
        let mut remap: Vec<Option<u16>> = vec![None; action.target_len];
        let mut next: u16 = 0;
        let mut word_masks = Vec::with_capacity(action.images.len());
        for img in &action.images {
            let mut mask = [0u64; 4];
            for &t in img {
                let bit = match remap[t] {
                    Some(b) => b,
                    None => {
                        if next == 256 {
                            return None;
                        }
                        remap[t] = Some(next);
                        next += 1;
                        next - 1
                    }
                };
                mask[(bit / 64) as usize] |= 1u64 << (bit % 64);
            }
            word_masks.push(mask);
        }
        Some(MaskAction { word_masks })
    }

    pub(crate) fn image_count(&self, mut mask: u64) -> u64 {
        let mut acc = [0u64; 4];
        while mask != 0 {
            let j = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            let m = &self.word_masks[j];
            acc[0] |= m[0];
            acc[1] |= m[1];
            acc[2] |= m[2];
            acc[3] |= m[3];
        }
        acc.iter().map(|w| w.count_ones() as u64).sum()
    }
}

pub const BRUTEFORCE_CAP: usize = 22;

#[derive(Clone, Debug)]
pub struct BruteforceResult {
    pub min_ratio: Rat,
    pub witness: Vec<NormalWord>,
    pub subsets_scanned: u64,
}

/// Exact minimum of the ratio over all nonempty monomial subspaces (spans
/// of basis-word subsets) of `Truncation(d)`, evaluated in the enlarged
/// ambient so images never get clipped.
pub fn min_ratio_bruteforce(gens: &[AlgebraElement], d: usize) -> Result<BruteforceResult> {
    if gens.is_empty() {
        return Err(Error::Invalid("at least one generator is required".into()));
    }
    let family = gens[0].family().clone();
    check_family(gens, &family)?;
    let src = Truncation::new(&family, d)?;
    if src.len() > BRUTEFORCE_CAP {
        return Err(Error::BasisTooLarge {
            size: src.len(),
            cap: BRUTEFORCE_CAP,
        });
    }
    let dst = Truncation::new(&family, d + max_degree(gens)?)?;
    let k = src.len();
    let total: u64 = 1u64 << k;

    let best = if let Some(action) = SetAction::build(gens, &src, &dst) {
        if let Some(masks) = MaskAction::build(&action) {
            par::scan_masks_min(1, total, |mask| {
                (masks.image_count(mask), mask.count_ones() as u64)
            })
        } else {
            par::scan_masks_min(1, total, |mask| {
                let subset: Vec<usize> =
                    (0..k).filter(|&j| mask & (1 << j) != 0).collect();
                (action.image_count(&subset) as u64, subset.len() as u64)
            })
        }
    } else {
        // General generators: evaluate each monomial subspace through the
        // linear-algebra path. Exact but much slower; callers with large
        // bases and non-monomial generators should use witness search.
        let mut best: Option<par::MaskBest> = None;
        for mask in 1..total {
            let subset: Vec<usize> = (0..k).filter(|&j| mask & (1 << j) != 0).collect();
            let v = subset_to_subspace(&subset, k);
            let rep = ratio(gens, &src, &v)?;
            let cand = par::MaskBest {
                image_count: rep.image_dim as u64,
                source_count: rep.subspace_dim as u64,
                mask,
            };
            let better = best.as_ref().map_or(true, |b| {
                (cand.image_count as u128) * (b.source_count as u128)
                    < (b.image_count as u128) * (cand.source_count as u128)
            });
            if better {
                best = Some(cand);
            }
        }
        best
    };

    let best = best.ok_or_else(|| Error::Invalid("empty subset scan".into()))?;
    let witness: Vec<NormalWord> = (0..k)
        .filter(|&j| best.mask & (1 << j) != 0)
        .map(|j| src.word(j).clone())
        .collect();
    Ok(BruteforceResult {
        min_ratio: Rat::ratio_of(best.image_count as usize, best.source_count as usize)?,
        witness,
        subsets_scanned: total - 1,
    })
}

/// Search strategies for Følner witnesses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Scan full truncations of increasing degree.
    BallScan,
    /// Local search over monomial subspaces: start from a random word
    /// subset and toggle the word that most decreases the ratio, ties
    /// broken by basis order; restarts on local minima.
    Greedy,
    /// Random sparse subspaces with {-1,0,1} coefficients at density 3/dim.
    Random,
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strategy::BallScan => "ball",
            Strategy::Greedy => "greedy",
            Strategy::Random => "random",
        })
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ball" => Ok(Strategy::BallScan),
            "greedy" => Ok(Strategy::Greedy),
            "random" => Ok(Strategy::Random),
            other => Err(Error::Invalid(format!("unknown strategy `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub gens: Vec<AlgebraElement>,
    pub epsilon: Rat,
    /// Ambient truncation degree (ball scan: maximum level).
    pub degree: usize,
    pub budget: u64,
    pub seed: u64,
    pub strategy: Strategy,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SearchTraceRow {
    pub evaluations: u64,
    pub ratio: Rat,
    pub subspace_dim: usize,
}

/// Serializable Følner witness. `verify` reconstructs the subspace from
/// the stored rows and re-derives the ratio.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FoelnerCertificate {
    pub schema_version: u32,
    pub kind: String,
    pub family: String,
    pub generators: Vec<String>,
    pub epsilon: Rat,
    pub degree: usize,
    pub subspace_dim: usize,
    pub image_dim: usize,
    pub ratio: Rat,
    /// Basis rows over the truncation word basis, each row a list of
    /// `[column, coefficient]` pairs in reduced row-echelon form.
    pub basis: Vec<Vec<(usize, Rat)>>,
    pub seed: u64,
    pub budget: u64,
    pub strategy: String,
    pub evaluations: u64,
}

pub const CERTIFICATE_KIND: &str = "foelner_certificate";

impl FoelnerCertificate {
    /// Re-derive everything from the stored basis and compare. Fails on
    /// any mismatch, including a tampered ratio field.
    pub fn verify(&self) -> Result<()> {
        let family: AlgebraFamily = self.family.parse()?;
        let gens = self
            .generators
            .iter()
            .map(|s| AlgebraElement::parse(&family, s))
            .collect::<Result<Vec<_>>>()?;
        if self.epsilon <= Rat::zero() {
            return Err(Error::Invalid("epsilon must be positive".into()));
        }
        let src = Truncation::new(&family, self.degree)?;
        let m = Matrix::from_rows(src.len(), self.basis.clone())?;
        let v = exactlin::rref(&m);
        if v.dim() != self.basis.len() {
            return Err(Error::Invalid(
                "stored basis rows are not linearly independent".into(),
            ));
        }
        let rep = ratio(&gens, &src, &v)?;
        if rep.subspace_dim != self.subspace_dim
            || rep.image_dim != self.image_dim
            || rep.ratio != self.ratio
        {
            return Err(Error::Invalid(format!(
                "certificate mismatch: stored {}/{} = {}, recomputed {}/{} = {}",
                self.image_dim,
                self.subspace_dim,
                self.ratio,
                rep.image_dim,
                rep.subspace_dim,
                rep.ratio
            )));
        }
        let bound = Rat::one() + self.epsilon.clone();
        if !(rep.ratio < bound) {
            return Err(Error::Invalid(format!(
                "certificate ratio {} is not below 1 + epsilon = {}",
                rep.ratio, bound
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExhaustedReport {
    pub schema_version: u32,
    pub kind: String,
    pub family: String,
    pub generators: Vec<String>,
    pub epsilon: Rat,
    pub degree: usize,
    pub strategy: String,
    pub seed: u64,
    pub budget: u64,
    pub evaluations: u64,
    pub best_ratio: Option<Rat>,
    pub best_dim: usize,
    pub trace: Vec<SearchTraceRow>,
}

pub const EXHAUSTED_KIND: &str = "search_exhausted";

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found(FoelnerCertificate),
    Exhausted(ExhaustedReport),
}

struct SearchState<'a> {
    config: &'a SearchConfig,
    family: AlgebraFamily,
    evaluations: u64,
    best: Option<(Rat, Subspace, usize)>, // ratio, subspace, ambient degree
    trace: Vec<SearchTraceRow>,
}

impl<'a> SearchState<'a> {
    fn budget_left(&self) -> bool {
        self.evaluations < self.config.budget
    }

    /// Record an evaluated candidate; returns true when it wins.
    fn offer(&mut self, ratio: Rat, v: &Subspace, degree: usize) -> bool {
        let improved = self.best.as_ref().map_or(true, |(b, _, _)| ratio < *b);
        if improved {
            self.best = Some((ratio.clone(), v.clone(), degree));
            self.trace.push(SearchTraceRow {
                evaluations: self.evaluations,
                ratio,
                subspace_dim: v.dim(),
            });
        }
        improved
    }

    fn threshold(&self) -> Rat {
        Rat::one() + self.config.epsilon.clone()
    }

    fn is_witness(&self) -> bool {
        match &self.best {
            Some((r, _, _)) => *r < self.threshold(),
            None => false,
        }
    }

    fn into_outcome(self) -> Result<SearchOutcome> {
        let cfg = self.config;
        let gens_str: Vec<String> = cfg.gens.iter().map(|g| g.to_string()).collect();
        if self.is_witness() {
            let (_, v, degree) = self.best.expect("witness present");
            // The certificate ratio always comes from the linear-algebra
            // path, independent of any set-counting shortcut the search used.
            let src = Truncation::new(&self.family, degree)?;
            let rep = ratio(&cfg.gens, &src, &v)?;
            return Ok(SearchOutcome::Found(FoelnerCertificate {
                schema_version: SCHEMA_VERSION,
                kind: CERTIFICATE_KIND.into(),
                family: self.family.to_string(),
                generators: gens_str,
                epsilon: cfg.epsilon.clone(),
                degree,
                subspace_dim: rep.subspace_dim,
                image_dim: rep.image_dim,
                ratio: rep.ratio,
                basis: v.basis_rows().to_vec(),
                seed: cfg.seed,
                budget: cfg.budget,
                strategy: cfg.strategy.to_string(),
                evaluations: self.evaluations,
            }));
        }
        Ok(SearchOutcome::Exhausted(ExhaustedReport {
            schema_version: SCHEMA_VERSION,
            kind: EXHAUSTED_KIND.into(),
            family: self.family.to_string(),
            generators: gens_str,
            epsilon: cfg.epsilon.clone(),
            degree: cfg.degree,
            strategy: cfg.strategy.to_string(),
            seed: cfg.seed,
            budget: cfg.budget,
            evaluations: self.evaluations,
            best_ratio: self.best.as_ref().map(|(r, _, _)| r.clone()),
            best_dim: self.best.as_ref().map_or(0, |(_, v, _)| v.dim()),
            trace: self.trace,
        }))
    }
}

/// Search for a subspace with ratio strictly below `1 + epsilon`.
/// `Exhausted` is a value, not an error; it carries the best ratio found
/// and the improvement trace. Fixed seeds give identical outcomes
/// regardless of worker count.
pub fn witness_search(config: &SearchConfig) -> Result<SearchOutcome> {
    if config.epsilon <= Rat::zero() {
        return Err(Error::Invalid("epsilon must be positive".into()));
    }
    if config.budget == 0 {
        return Err(Error::Invalid("budget must be positive".into()));
    }
    if config.gens.is_empty() {
        return Err(Error::Invalid("at least one generator is required".into()));
    }
    let family = config.gens[0].family().clone();
    check_family(&config.gens, &family)?;
    let mut state = SearchState {
        config,
        family: family.clone(),
        evaluations: 0,
        best: None,
        trace: Vec::new(),
    };
    match config.strategy {
        Strategy::BallScan => ball_scan_search(&mut state)?,
        Strategy::Greedy => greedy_search(&mut state)?,
        Strategy::Random => random_search(&mut state)?,
    }
    state.into_outcome()
}

fn ball_scan_search(state: &mut SearchState) -> Result<()> {
    let cfg = state.config;
    for n in 0..=cfg.degree {
        if !state.budget_left() {
            return Ok(());
        }
        let src = match Truncation::new(&state.family, n) {
            Ok(t) => t,
            Err(Error::CapExceeded { .. }) => return Ok(()),
            Err(e) => return Err(e),
        };
        if src.is_empty() {
            continue;
        }
        let v = Subspace::full(src.len());
        let rep = match ratio(&cfg.gens, &src, &v) {
            Ok(r) => r,
            Err(Error::CapExceeded { .. }) => return Ok(()),
            Err(e) => return Err(e),
        };
        state.evaluations += 1;
        state.offer(rep.ratio, &v, n);
        if state.is_witness() {
            return Ok(());
        }
    }
    Ok(())
}

/// Evaluate a batch of monomial subsets; returns (ratio, dim) per subset.
fn eval_subsets(
    subsets: &[Vec<usize>],
    action: Option<&SetAction>,
    gens: &[AlgebraElement],
    src: &Truncation,
) -> Result<Vec<(Rat, usize)>> {
    match action {
        Some(act) => Ok(par::map_vec(subsets, |s| {
            (
                Rat::ratio_of(act.image_count(s), s.len()).expect("nonempty subset"),
                s.len(),
            )
        })),
        None => {
            let evals = par::map_vec(subsets, |s| {
                let rows: Vec<SparseVec> = s.iter().map(|&j| vec![(j, Rat::one())]).collect();
                let v = exactlin::rref(&Matrix::from_rows(src.len(), rows).expect("unit rows"));
                ratio(gens, src, &v).map(|r| (r.ratio, r.subspace_dim))
            });
            evals.into_iter().collect()
        }
    }
}

fn subset_to_subspace(subset: &[usize], ambient: usize) -> Subspace {
    let rows: Vec<SparseVec> = subset.iter().map(|&j| vec![(j, Rat::one())]).collect();
    exactlin::rref(&Matrix::from_rows(ambient, rows).expect("unit rows"))
}

fn greedy_search(state: &mut SearchState) -> Result<()> {
    let cfg = state.config;
    let src = Truncation::new(&state.family, cfg.degree)?;
    let dst = Truncation::new(&state.family, cfg.degree + max_degree(&cfg.gens)?)?;
    let action = SetAction::build(&cfg.gens, &src, &dst);
    let k = src.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    'restart: while state.budget_left() && !state.is_witness() {
        // Random nonempty start subset.
        let mut current: Vec<usize> = loop {
            let s: Vec<usize> = (0..k).filter(|_| rng.gen_bool(0.5)).collect();
            if !s.is_empty() {
                break s;
            }
        };
        let mut current_ratio = eval_subsets(
            std::slice::from_ref(&current),
            action.as_ref(),
            &cfg.gens,
            &src,
        )?[0]
            .0
            .clone();
        state.evaluations += 1;
        state.offer(current_ratio.clone(), &subset_to_subspace(&current, k), cfg.degree);
        if state.is_witness() {
            return Ok(());
        }

        loop {
            if !state.budget_left() {
                return Ok(());
            }
            // All single-word toggles, in basis order; removal is skipped
            // when it would empty the subspace.
            let mut moves: Vec<(usize, Vec<usize>)> = Vec::with_capacity(k);
            for j in 0..k {
                let mut next = current.clone();
                match next.binary_search(&j) {
                    Ok(pos) => {
                        if next.len() == 1 {
                            continue;
                        }
                        next.remove(pos);
                    }
                    Err(pos) => next.insert(pos, j),
                }
                moves.push((j, next));
            }
            let room = (cfg.budget - state.evaluations) as usize;
            moves.truncate(room);
            let subsets: Vec<Vec<usize>> = moves.iter().map(|(_, s)| s.clone()).collect();
            let evals = eval_subsets(&subsets, action.as_ref(), &cfg.gens, &src)?;
            state.evaluations += evals.len() as u64;

            // Deterministic winner: smallest ratio, then lowest basis index.
            let mut winner: Option<(Rat, usize, usize)> = None; // ratio, move idx, basis idx
            for (m, (r, _)) in evals.iter().enumerate() {
                let better = match &winner {
                    None => true,
                    Some((br, _, bj)) => r < br || (r == br && moves[m].0 < *bj),
                };
                if better {
                    winner = Some((r.clone(), m, moves[m].0));
                }
            }
            let Some((best_ratio, best_move, _)) = winner else {
                continue 'restart;
            };
            if best_ratio < current_ratio {
                current = moves[best_move].1.clone();
                current_ratio = best_ratio;
                state.offer(
                    current_ratio.clone(),
                    &subset_to_subspace(&current, k),
                    cfg.degree,
                );
                if state.is_witness() {
                    return Ok(());
                }
            } else {
                // Local minimum: restart from a fresh random subset.
                continue 'restart;
            }
        }
    }
    Ok(())
}

fn random_search(state: &mut SearchState) -> Result<()> {
    let cfg = state.config;
    let src = Truncation::new(&state.family, cfg.degree)?;
    let k = src.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    const BATCH: usize = 32;
    let density = 3.0 / k as f64;

    while state.budget_left() && !state.is_witness() {
        let room = (cfg.budget - state.evaluations) as usize;
        let batch_size = BATCH.min(room);
        // Candidates are drawn sequentially from the seeded stream, then
        // evaluated in parallel; ids keep the merge deterministic.
        let mut candidates: Vec<Vec<SparseVec>> = Vec::with_capacity(batch_size);
        for _ in 0..batch_size {
            let target_dim = rng.gen_range(1..=k.min(32));
            let mut rows = Vec::with_capacity(target_dim);
            for _ in 0..target_dim {
                let mut row: SparseVec = Vec::new();
                for j in 0..k {
                    if rng.gen_bool(density.min(1.0)) {
                        let c = if rng.gen_bool(0.5) { 1 } else { -1 };
                        row.push((j, Rat::from_int(c)));
                    }
                }
                if !row.is_empty() {
                    rows.push(row);
                }
            }
            candidates.push(rows);
        }
        let evaluated: Vec<Option<(Rat, Subspace)>> = par::map_vec(&candidates, |rows| {
            let m = Matrix::from_rows(k, rows.clone()).expect("rows in ambient");
            let v = exactlin::rref(&m);
            if v.dim() == 0 {
                return None;
            }
            ratio(&cfg.gens, &src, &v).ok().map(|r| (r.ratio, v))
        });
        state.evaluations += evaluated.len() as u64;
        for ev in evaluated.into_iter().flatten() {
            state.offer(ev.0, &ev.1, cfg.degree);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_gens(family: &AlgebraFamily, exprs: &[&str]) -> Vec<AlgebraElement> {
        exprs
            .iter()
            .map(|s| AlgebraElement::parse(family, s).unwrap())
            .collect()
    }

    #[test]
    fn poly1_chain_ratio() {
        let fam = AlgebraFamily::commutative_poly(1).unwrap();
        let gens = parse_gens(&fam, &["1", "x"]);
        for n in [0usize, 1, 4, 9] {
            let src = Truncation::new(&fam, n).unwrap();
            let v = Subspace::full(src.len());
            let rep = ratio(&gens, &src, &v).unwrap();
            assert_eq!(rep.ratio, Rat::ratio_of(n + 2, n + 1).unwrap());
        }
    }

    #[test]
    fn quaternion_full_algebra_ratio_one() {
        let fam = AlgebraFamily::Quaternions;
        let gens = parse_gens(&fam, &["i", "j"]);
        let src = Truncation::new(&fam, 1).unwrap();
        let v = Subspace::full(4);
        let rep = ratio(&gens, &src, &v).unwrap();
        assert_eq!(rep.ratio, Rat::one());
    }

    #[test]
    fn free_group_ball_ratio() {
        let fam = AlgebraFamily::free_group(2).unwrap();
        let gens = parse_gens(&fam, &["1", "a", "a^-1", "b", "b^-1"]);
        for n in 0..=3usize {
            let src = Truncation::new(&fam, n).unwrap();
            let v = Subspace::full(src.len());
            let rep = ratio(&gens, &src, &v).unwrap();
            let num = 2 * 3usize.pow(n as u32 + 1) - 1;
            let den = 2 * 3usize.pow(n as u32) - 1;
            assert_eq!(rep.ratio, Rat::ratio_of(num, den).unwrap());
        }
    }

    #[test]
    fn zero_subspace_is_an_error() {
        let fam = AlgebraFamily::commutative_poly(1).unwrap();
        let gens = parse_gens(&fam, &["x"]);
        let src = Truncation::new(&fam, 2).unwrap();
        let v = Subspace::zero(src.len());
        assert!(matches!(ratio(&gens, &src, &v), Err(Error::ZeroSubspace)));
    }

    #[test]
    fn single_generator_acts_injectively() {
        // In families without zero divisors a nonzero single generator
        // gives ratio exactly 1; with {1, g} the ratio is at least 1.
        for (fam, gen) in [
            (AlgebraFamily::free_assoc(2).unwrap(), "x + y"),
            (AlgebraFamily::commutative_poly(2).unwrap(), "x*y - 2"),
            (AlgebraFamily::Weyl1, "y"),
            (AlgebraFamily::free_group(2).unwrap(), "a + 3*b"),
            (AlgebraFamily::Quaternions, "i + j - k"),
        ] {
            let g = AlgebraElement::parse(&fam, gen).unwrap();
            let src = Truncation::new(&fam, 2).unwrap();
            let v = Subspace::full(src.len());
            let rep = ratio(std::slice::from_ref(&g), &src, &v).unwrap();
            assert_eq!(rep.ratio, Rat::one(), "{fam}: {gen}");
            let with_unit = vec![AlgebraElement::one(fam.clone()), g];
            let rep2 = ratio(&with_unit, &src, &v).unwrap();
            assert!(rep2.ratio >= Rat::one());
        }
    }

    #[test]
    fn monotone_ambient() {
        // Enlarging the ambient degree without changing V leaves the ratio
        // unchanged (coordinates embed along the basis prefix).
        let fam = AlgebraFamily::free_group(2).unwrap();
        let gens = parse_gens(&fam, &["a", "b"]);
        let small = Truncation::new(&fam, 2).unwrap();
        let big = Truncation::new(&fam, 3).unwrap();
        let v = Subspace::full(small.len());
        let r1 = ratio(&gens, &small, &v).unwrap().ratio;
        let v_big = v.embed(big.len()).unwrap();
        let r2 = ratio(&gens, &big, &v_big).unwrap().ratio;
        assert_eq!(r1, r2);
    }

    #[test]
    fn scan_weyl_levels() {
        let fam = AlgebraFamily::Weyl1;
        let gens = parse_gens(&fam, &["1", "x", "y"]);
        let scan = ball_sequence_scan(&gens, &fam, 6).unwrap();
        assert!(!scan.truncated);
        for row in &scan.rows {
            let n = row.n;
            assert_eq!(row.dim, (n + 1) * (n + 2) / 2);
            assert_eq!(row.image_dim, (n + 2) * (n + 3) / 2);
        }
    }

    #[test]
    fn scan_lattice_box_layers() {
        let fam = AlgebraFamily::lattice(2).unwrap();
        let gens = parse_gens(&fam, &["1", "x", "x^-1", "y", "y^-1"]);
        let scan = ball_sequence_scan(&gens, &fam, 5).unwrap();
        for row in &scan.rows {
            let s = 2 * row.n + 1;
            assert_eq!(row.dim, s * s);
            assert_eq!(row.image_dim, s * s + 4 * s);
        }
    }

    #[test]
    fn scan_truncates_at_cap() {
        let fam = AlgebraFamily::free_assoc(2).unwrap();
        let gens = parse_gens(&fam, &["1", "x", "y"]);
        let scan = ball_sequence_scan(&gens, &fam, 40).unwrap();
        assert!(scan.truncated);
        assert!(!scan.rows.is_empty());
        for row in &scan.rows {
            let n = row.n as u32;
            assert_eq!(row.dim, (1usize << (n + 1)) - 1);
            assert_eq!(row.image_dim, (1usize << (n + 2)) - 1);
        }
    }

    #[test]
    fn bruteforce_identity_generator() {
        let fam = AlgebraFamily::free_group(2).unwrap();
        let gens = parse_gens(&fam, &["1"]);
        let res = min_ratio_bruteforce(&gens, 1).unwrap();
        assert_eq!(res.min_ratio, Rat::one());
    }

    #[test]
    fn bruteforce_poly_shift() {
        let fam = AlgebraFamily::commutative_poly(1).unwrap();
        // x alone is injective on monomials: every subset has ratio 1.
        let res = min_ratio_bruteforce(&parse_gens(&fam, &["x"]), 3).unwrap();
        assert_eq!(res.min_ratio, Rat::one());
        // {1, x}: the best subset is the full chain, ratio (m+1)/m.
        let res = min_ratio_bruteforce(&parse_gens(&fam, &["1", "x"]), 3).unwrap();
        assert_eq!(res.min_ratio, Rat::ratio_of(5, 4).unwrap());
        assert_eq!(res.witness.len(), 4);
    }

    #[test]
    fn bruteforce_free_assoc_doubles() {
        let fam = AlgebraFamily::free_assoc(2).unwrap();
        let res = min_ratio_bruteforce(&parse_gens(&fam, &["x", "y"]), 2).unwrap();
        assert_eq!(res.min_ratio, Rat::from_int(2));
    }

    #[test]
    fn bruteforce_matches_linear_algebra_on_monomial_subspaces() {
        // The set-counting fast path and the exact linear-algebra path must
        // agree on every monomial subspace: the isoperimetric dichotomy at
        // desk scale.
        let fam = AlgebraFamily::free_group(2).unwrap();
        let gens = parse_gens(&fam, &["a", "a^-1", "b", "b^-1"]);
        let src = Truncation::new(&fam, 1).unwrap();
        let dst = Truncation::new(&fam, 2).unwrap();
        let action = SetAction::build(&gens, &src, &dst).unwrap();
        let k = src.len();
        let mut best = Rat::from_int(1000);
        for mask in 1u64..(1 << k) {
            let subset: Vec<usize> = (0..k).filter(|&j| mask & (1 << j) != 0).collect();
            let set_count = action.image_count(&subset);
            let v = subset_to_subspace(&subset, k);
            let rep = ratio(&gens, &src, &v).unwrap();
            assert_eq!(set_count, rep.image_dim, "mask {mask}");
            if rep.ratio < best {
                best = rep.ratio.clone();
            }
        }
        let res = min_ratio_bruteforce(&gens, 1).unwrap();
        assert_eq!(res.min_ratio, best);
        // Regression pin from the exhaustive oracle: the sphere {a,a^-1,b,b^-1}
        // reaches 13 words, beating the full ball's 17/5.
        assert_eq!(best, Rat::ratio_of(13, 4).unwrap());
        assert_eq!(res.witness.len(), 4);
    }

    #[test]
    fn bruteforce_rejects_large_bases() {
        let fam = AlgebraFamily::free_assoc(2).unwrap();
        let gens = parse_gens(&fam, &["x", "y"]);
        assert!(matches!(
            min_ratio_bruteforce(&gens, 4),
            Err(Error::BasisTooLarge { .. })
        ));
    }

    #[test]
    fn search_quaternions_certificate() {
        let fam = AlgebraFamily::Quaternions;
        let cfg = SearchConfig {
            gens: parse_gens(&fam, &["i", "j"]),
            epsilon: Rat::new(1, 10).unwrap(),
            degree: 3,
            budget: 100,
            seed: 1,
            strategy: Strategy::BallScan,
        };
        match witness_search(&cfg).unwrap() {
            SearchOutcome::Found(cert) => {
                assert_eq!(cert.ratio, Rat::one());
                assert_eq!(cert.subspace_dim, 4);
                cert.verify().unwrap();
            }
            SearchOutcome::Exhausted(_) => panic!("quaternions must certify"),
        }
    }

    #[test]
    fn search_free_assoc_exhausts() {
        let fam = AlgebraFamily::free_assoc(2).unwrap();
        for strategy in [Strategy::BallScan, Strategy::Greedy, Strategy::Random] {
            let cfg = SearchConfig {
                gens: parse_gens(&fam, &["x", "y"]),
                epsilon: Rat::new(1, 2).unwrap(),
                degree: 3,
                budget: 200,
                seed: 7,
                strategy,
            };
            match witness_search(&cfg).unwrap() {
                SearchOutcome::Found(c) => panic!("free algebra certified: {c:?}"),
                SearchOutcome::Exhausted(rep) => {
                    let best = rep.best_ratio.expect("something evaluated");
                    assert!(best >= Rat::from_int(1), "best {best}");
                }
            }
        }
    }

    #[test]
    fn search_deterministic_across_reruns() {
        let fam = AlgebraFamily::commutative_poly(2).unwrap();
        let cfg = SearchConfig {
            gens: parse_gens(&fam, &["1", "x", "y"]),
            epsilon: Rat::new(1, 4).unwrap(),
            degree: 6,
            budget: 64,
            seed: 42,
            strategy: Strategy::Random,
        };
        let a = witness_search(&cfg).unwrap();
        let b = witness_search(&cfg).unwrap();
        match (a, b) {
            (SearchOutcome::Found(x), SearchOutcome::Found(y)) => assert_eq!(x, y),
            (SearchOutcome::Exhausted(x), SearchOutcome::Exhausted(y)) => {
                assert_eq!(x.best_ratio, y.best_ratio);
                assert_eq!(x.trace, y.trace);
            }
            _ => panic!("outcomes diverged"),
        }
    }

    #[test]
    fn greedy_finds_poly_witness() {
        let fam = AlgebraFamily::commutative_poly(1).unwrap();
        let cfg = SearchConfig {
            gens: parse_gens(&fam, &["1", "x"]),
            epsilon: Rat::new(1, 4).unwrap(),
            degree: 8,
            budget: 5000,
            seed: 3,
            strategy: Strategy::Greedy,
        };
        match witness_search(&cfg).unwrap() {
            SearchOutcome::Found(cert) => {
                assert!(cert.ratio < Rat::new(5, 4).unwrap());
                cert.verify().unwrap();
            }
            SearchOutcome::Exhausted(rep) => {
                panic!("greedy should find a chain witness, best {:?}", rep.best_ratio)
            }
        }
    }

    #[test]
    fn tampered_certificate_fails_verification() {
        let fam = AlgebraFamily::Quaternions;
        let cfg = SearchConfig {
            gens: parse_gens(&fam, &["i", "j"]),
            epsilon: Rat::new(1, 10).unwrap(),
            degree: 2,
            budget: 10,
            seed: 1,
            strategy: Strategy::BallScan,
        };
        let SearchOutcome::Found(mut cert) = witness_search(&cfg).unwrap() else {
            panic!("expected a certificate");
        };
        cert.ratio = Rat::new(99, 100).unwrap();
        assert!(cert.verify().is_err());
    }
}
