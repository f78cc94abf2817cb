//! Closed-form size and cost figures for open-ended trees and lists.
//!
//! `m` is the number of updates (values stored), `n` the depth limit of the
//! last tree in the collector sequence and `d0` the starting depth.

use crate::error::{Error, Result};

/// Memory layouts whose heap footprint is estimated by [`heap_cells_estimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReprKind {
    /// Every value in a `tree/3` term (4 cells).
    TreePlain,
    /// Maximal-depth values in a `leaf/1` term (2 cells).
    TreeLeafWrapped,
    /// Maximal-depth values stored directly.
    TreeLeafInline,
    /// Open-ended list, one `./2` term (2 cells) per value.
    List,
}

fn pow2(e: u32) -> Result<u64> {
    1u64.checked_shl(e)
        .filter(|_| e < 63)
        .ok_or_else(|| Error::BadArgs(format!("2^{e} overflows")))
}

/// Values held once the trees of depth `d0..=n` and their collectors are all
/// complete: `2^(n+1) - 2^d0`.
pub fn capacity_completed(n: u32, d0: u32) -> Result<u64> {
    if d0 < 1 || n < d0 {
        return Err(Error::BadArgs(format!(
            "need n >= d0 >= 1, got n={n}, d0={d0}"
        )));
    }
    Ok(pow2(n + 1)? - pow2(d0)?)
}

/// Depth limit of the tree that receives the `m`-th value: the smallest
/// `n >= d0` with `m <= capacity_completed(n, d0)`.
pub fn depth_of_last_tree(m: u64, d0: u32) -> Result<u32> {
    if m < 1 {
        return Err(Error::BadArgs("update count must be at least 1".into()));
    }
    if d0 < 1 {
        return Err(Error::BadArgs("start depth must be at least 1".into()));
    }
    let mut n = d0;
    while capacity_completed(n, d0)? < m {
        n += 1;
    }
    Ok(n)
}

/// Number of collectors on the spine after `m` updates.
pub fn collector_count(m: u64, d0: u32) -> Result<u32> {
    if m == 0 {
        return Ok(0);
    }
    Ok(depth_of_last_tree(m, d0)? - d0 + 1)
}

/// Maximum node depth (root = 1) of a tree holding `m` values, computed from
/// occupancy alone.
///
/// The last collector sits at spine depth `k`. Its left tree holds `r` nodes
/// filled in preorder, so it reaches `min(r, n)` levels below the collector.
/// The complete tree hanging off collector `k - 1` reaches `n - 2` levels
/// below collector `k`, which dominates while the last tree is shallow.
pub fn predicted_max_depth(m: u64, d0: u32) -> Result<u32> {
    if m == 0 {
        return Ok(0);
    }
    let n = depth_of_last_tree(m, d0)?;
    let k = n - d0 + 1;
    let before = if k == 1 {
        0
    } else {
        capacity_completed(n - 1, d0)?
    };
    let in_last_tree = m - before - 1;
    let last = k + (in_last_tree.min(u64::from(n)) as u32);
    let previous = if k >= 2 { k + n - 2 } else { 0 };
    Ok(last.max(previous))
}

/// Upper bound on nodes inspected by one insert or lookup when `m` values
/// are (or will be, after the insert) stored.
pub fn visit_bound(m: u64, d0: u32) -> Result<u64> {
    Ok(2 * u64::from(depth_of_last_tree(m.max(1), d0)?) + 1)
}

/// Asymptotic heap cells for `m` values.
pub fn heap_cells_estimate(m: u64, repr: ReprKind) -> Result<u64> {
    if m < 1 {
        return Err(Error::BadArgs("update count must be at least 1".into()));
    }
    let per_value = match repr {
        ReprKind::TreePlain => 4,
        ReprKind::TreeLeafWrapped => 3,
        ReprKind::TreeLeafInline | ReprKind::List => 2,
    };
    Ok(per_value * m)
}
