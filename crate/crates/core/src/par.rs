//! Data-parallel kernels with a sequential fallback.
//!
//! With the default `parallel` feature the hot loops (subset scans,
//! candidate batches, trace sums) run on the rayon pool; without it the
//! same entry points run the sequential bodies. Results are merged
//! deterministically, so output never depends on the worker count. The
//! `*_seq` variants are always compiled and are what the bench suite
//! compares against.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Best subset found by an exhaustive mask scan: the exact ratio
/// `image_count / source_count` as a pair, plus the achieving mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MaskBest {
    pub image_count: u64,
    pub source_count: u64,
    pub mask: u64,
}

impl MaskBest {
    /// Compare by exact fraction value, ties broken by the smaller mask.
    fn better_than(&self, other: &MaskBest) -> bool {
        let lhs = (self.image_count as u128) * (other.source_count as u128);
        let rhs = (other.image_count as u128) * (self.source_count as u128);
        lhs < rhs || (lhs == rhs && self.mask < other.mask)
    }
}

fn fold_masks(lo: u64, hi: u64, eval: &(impl Fn(u64) -> (u64, u64) + Sync)) -> Option<MaskBest> {
    let mut best: Option<MaskBest> = None;
    for mask in lo..hi {
        let (img, src) = eval(mask);
        if src == 0 {
            continue;
        }
        let cand = MaskBest {
            image_count: img,
            source_count: src,
            mask,
        };
        if best.as_ref().map_or(true, |b| cand.better_than(b)) {
            best = Some(cand);
        }
    }
    best
}

pub fn scan_masks_min_seq(
    lo: u64,
    hi: u64,
    eval: impl Fn(u64) -> (u64, u64) + Sync,
) -> Option<MaskBest> {
    fold_masks(lo, hi, &eval)
}

/// Minimum of `image/source` over all masks in `lo..hi`; deterministic
/// regardless of how the range is split across workers.
#[cfg(feature = "parallel")]
pub fn scan_masks_min(lo: u64, hi: u64, eval: impl Fn(u64) -> (u64, u64) + Sync) -> Option<MaskBest> {
    const CHUNK: u64 = 1 << 14;
    if hi.saturating_sub(lo) <= CHUNK {
        return fold_masks(lo, hi, &eval);
    }
    let chunks: Vec<(u64, u64)> = (lo..hi)
        .step_by(CHUNK as usize)
        .map(|c| (c, (c + CHUNK).min(hi)))
        .collect();
    chunks
        .into_par_iter()
        .filter_map(|(a, b)| fold_masks(a, b, &eval))
        .reduce_with(|a, b| if b.better_than(&a) { b } else { a })
}

#[cfg(not(feature = "parallel"))]
pub fn scan_masks_min(lo: u64, hi: u64, eval: impl Fn(u64) -> (u64, u64) + Sync) -> Option<MaskBest> {
    scan_masks_min_seq(lo, hi, eval)
}

pub fn map_vec_seq<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    items.iter().map(f).collect()
}

/// Order-preserving parallel map; candidate batches in the witness search
/// go through here so traces are reproducible for a fixed seed.
#[cfg(feature = "parallel")]
pub fn map_vec<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Send + Sync) -> Vec<R> {
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_vec<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Send + Sync) -> Vec<R> {
    map_vec_seq(items, f)
}

const SUM_CHUNK: usize = 4096;

fn kahan(xs: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for &x in xs {
        let y = x - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

pub fn stable_sum_seq(xs: &[f64]) -> f64 {
    kahan(&xs.chunks(SUM_CHUNK).map(kahan).collect::<Vec<_>>())
}

/// Compensated sum over fixed-size chunks, combined in chunk order: the
/// result is identical for any worker count and agrees with the
/// sequential variant bit for bit.
#[cfg(feature = "parallel")]
pub fn stable_sum(xs: &[f64]) -> f64 {
    let partials: Vec<f64> = xs.par_chunks(SUM_CHUNK).map(kahan).collect();
    kahan(&partials)
}

#[cfg(not(feature = "parallel"))]
pub fn stable_sum(xs: &[f64]) -> f64 {
    stable_sum_seq(xs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_scan_matches_seq() {
        let eval = |m: u64| (m.count_ones() as u64 + 1, (m % 7) + 1);
        let a = scan_masks_min(1, 5000, eval);
        let b = scan_masks_min_seq(1, 5000, eval);
        assert_eq!(a, b);
    }

    #[test]
    fn stable_sum_matches_seq() {
        let xs: Vec<f64> = (0..100_000).map(|i| ((i * 37) % 101) as f64 * 1e-3).collect();
        assert_eq!(stable_sum(&xs), stable_sum_seq(&xs));
    }
}
