//! Parallel accumulation with a fixed summation order.

use rayon::prelude::*;

/// Items per work unit; also fixes the grouping of floating-point sums.
const CHUNK: usize = 64;

/// Folds `step` over `0..len` in fixed chunks run in parallel, then merges
/// the chunk results left to right, so the result does not depend on thread
/// scheduling.
pub(crate) fn ordered_fold<A, M, S, G>(len: usize, make: M, step: S, merge: G) -> A
where
    A: Send,
    M: Fn() -> A + Sync,
    S: Fn(&mut A, usize) + Sync,
    G: Fn(&mut A, &A),
{
    let parts: Vec<A> = (0..len.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = make();
            for i in c * CHUNK..((c + 1) * CHUNK).min(len) {
                step(&mut acc, i);
            }
            acc
        })
        .collect();
    let mut out = make();
    for p in &parts {
        merge(&mut out, p);
    }
    out
}
