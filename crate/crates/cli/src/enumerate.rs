//! Exhaustive Pareto fronts for small instances.

use anyhow::{bail, Result};
use moqubo_core::qap::{Permutation, QapInstance};

use crate::run::{front_point, reduce_front, FrontPoint};

pub const DEFAULT_CAP: usize = 10;

/// Calls `visit` on every permutation of `0..n` (Heap's algorithm).
pub fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    visit(&perm)?;
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm)?;
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(())
}

/// True Pareto front over all `n!` assignments, one representative (the
/// lexicographically smallest permutation) per distinct cost vector.
pub fn enumerate_front(inst: &QapInstance, cap: usize) -> Result<Vec<FrontPoint>> {
    if inst.n() > cap {
        bail!("instance has n = {} which exceeds the enumeration cap of {cap}", inst.n());
    }
    let mut best: Vec<FrontPoint> = Vec::new();
    for_each_permutation(inst.n(), |p| {
        let point = front_point(inst, &Permutation::new(p.to_vec())?)?;
        // Cheap pre-filter keeps memory small; the final reduction is exact.
        if !best.iter().any(|b| dominates_strictly(&b.costs, &point.costs)) {
            best.retain(|b| !dominates_strictly(&point.costs, &b.costs));
            best.push(point);
        }
        Ok(())
    })?;
    Ok(reduce_front(best))
}

fn dominates_strictly(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y)
}
