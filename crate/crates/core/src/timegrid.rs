//! Equispaced block grids over `[0, T]` and the index arithmetic of rolling
//! windows.
//!
//! A window of half-width `K` centred on boundary `t_i` spans
//! `[t_{i-K}, t_{i+K})`. Centres run over `K ..= B-K` and are grouped into
//! residue classes `i ≡ l (mod 2K)`, `l = 1..=2K`; the windows of one class
//! never overlap.

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockGrid {
    horizon: f64,
    blocks: usize,
    delta: f64,
}

impl BlockGrid {
    pub fn new(horizon: f64, blocks: usize) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(invalid(format!("horizon must be positive, got {horizon}")));
        }
        if blocks < 2 {
            return Err(invalid(format!("need at least 2 blocks, got {blocks}")));
        }
        Ok(Self {
            horizon,
            blocks,
            delta: horizon / blocks as f64,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `t_i = i·Δ`, with `t_B` pinned to the horizon.
    pub fn boundary(&self, i: usize) -> f64 {
        debug_assert!(i <= self.blocks);
        if i == self.blocks {
            self.horizon
        } else {
            i as f64 * self.delta
        }
    }

    pub fn boundaries(&self) -> Vec<f64> {
        (0..=self.blocks).map(|i| self.boundary(i)).collect()
    }

    /// Index `j` with `s ∈ [t_j, t_{j+1})`, or `None` when `s ∉ [0, T)`.
    pub fn cell_of(&self, s: f64) -> Option<usize> {
        if !(s >= 0.0 && s < self.horizon) {
            return None;
        }
        let mut j = ((s / self.delta).floor() as usize).min(self.blocks - 1);
        while j > 0 && self.boundary(j) > s {
            j -= 1;
        }
        while j + 1 < self.blocks && self.boundary(j + 1) <= s {
            j += 1;
        }
        Some(j)
    }

    /// Block `i ∈ 1..=B` with `s ∈ (t_{i-1}, t_i]`, or `None` outside `(0, T]`.
    pub fn block_of(&self, s: f64) -> Option<usize> {
        if !(s > 0.0 && s <= self.horizon) {
            return None;
        }
        let mut i = ((s / self.delta).ceil() as usize).clamp(1, self.blocks);
        while i > 1 && self.boundary(i - 1) >= s {
            i -= 1;
        }
        while i < self.blocks && self.boundary(i) < s {
            i += 1;
        }
        Some(i)
    }

    /// Whether `other` has the same horizon and block count.
    pub fn same_as(&self, other: &BlockGrid) -> bool {
        self.blocks == other.blocks && self.horizon == other.horizon
    }
}

/// Build a grid of `blocks` equal blocks over `[0, horizon]`.
pub fn build_grid(horizon: f64, blocks: usize) -> Result<BlockGrid> {
    BlockGrid::new(horizon, blocks)
}

/// Half-window `K` in blocks, `1 ≤ K ≤ B/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    k: usize,
}

impl WindowSpec {
    pub fn new(k: usize, grid: &BlockGrid) -> Result<Self> {
        if k == 0 || 2 * k > grid.blocks() {
            return Err(invalid(format!(
                "half-window K={k} must satisfy 1 <= K <= B/2 with B={}",
                grid.blocks()
            )));
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Window centres `K ..= B-K`.
    pub fn centres(&self, grid: &BlockGrid) -> std::ops::RangeInclusive<usize> {
        self.k..=grid.blocks() - self.k
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueClass {
    pub label: usize,
    pub members: Vec<usize>,
}

/// Centres `i ∈ [K, B-K]` with `i ≡ l (mod 2K)`, ascending.
pub fn residue_members(l: usize, k: usize, blocks: usize) -> Result<Vec<usize>> {
    if k == 0 || 2 * k > blocks {
        return Err(invalid(format!("K={k} out of range for B={blocks}")));
    }
    if l == 0 || l > 2 * k {
        return Err(invalid(format!("class label l={l} not in 1..={}", 2 * k)));
    }
    let period = 2 * k;
    // smallest i >= K congruent to l
    let first = k + (l + period - k % period) % period;
    Ok((first..=blocks - k).step_by(period).collect())
}

/// All `2K` residue classes for the window.
pub fn residue_classes(window: WindowSpec, grid: &BlockGrid) -> Vec<ResidueClass> {
    (1..=2 * window.k())
        .map(|l| ResidueClass {
            label: l,
            members: residue_members(l, window.k(), grid.blocks())
                .expect("window already validated against grid"),
        })
        .collect()
}

/// The member of class `l` whose window `[t_{i-K}, t_{i+K})` contains `s`.
fn covering_member(s: f64, l: usize, k: usize, grid: &BlockGrid) -> Option<usize> {
    if k == 0 || l == 0 || l > 2 * k || 2 * k > grid.blocks() {
        return None;
    }
    let j = grid.cell_of(s)?;
    // candidates i ∈ [j-K+1, j+K]: 2K consecutive integers, one per class
    let lo = (j + 1).saturating_sub(k);
    let period = 2 * k;
    let i = lo + (l % period + period - lo % period) % period;
    if i < k || i > grid.blocks() - k || i + k <= j || i > j + k {
        return None;
    }
    Some(i)
}

/// Tent weight of class `l`: rises on `[t_{i-K}, t_i)`, falls on
/// `[t_i, t_{i+K})`, peaks at 1 on the centre. Zero off the support.
pub fn eval_f(s: f64, l: usize, k: usize, grid: &BlockGrid) -> f64 {
    let Some(i) = covering_member(s, l, k, grid) else {
        return 0.0;
    };
    // position in blocks: s = t_j + frac·Δ
    let j = grid.cell_of(s).expect("covered points lie on the grid");
    let frac = (s - grid.boundary(j)) / grid.delta();
    let kf = k as f64;
    if j >= i {
        ((i + k - j) as f64 - frac) / kf
    } else {
        ((j + k - i) as f64 + frac) / kf
    }
}

/// Step weight of class `l`: `+1` on the forward half-window, `-1` on the
/// backward one.
pub fn eval_g(s: f64, l: usize, k: usize, grid: &BlockGrid) -> f64 {
    let Some(i) = covering_member(s, l, k, grid) else {
        return 0.0;
    };
    if s >= grid.boundary(i) {
        1.0
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_boundaries_are_equispaced() {
        let g = build_grid(1.0, 4).unwrap();
        assert_eq!(g.boundaries(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let day = build_grid(1.0, 390).unwrap();
        assert_eq!(day.delta(), 1.0 / 390.0);
        assert!((day.delta() * 390.0 - 1.0).abs() < 1e-15);
        assert!(build_grid(1.0, 1).is_err());
        assert!(build_grid(0.0, 4).is_err());
        assert!(build_grid(-1.0, 4).is_err());
    }

    #[test]
    fn boundaries_strictly_increase() {
        let g = build_grid(6.5, 777).unwrap();
        let b = g.boundaries();
        assert!(b.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*b.last().unwrap(), 6.5);
    }

    #[test]
    fn residue_members_by_enumeration() {
        // i in [2, 10] with i ≡ 2 (mod 4)
        assert_eq!(residue_members(2, 2, 12).unwrap(), vec![2, 6, 10]);
        assert_eq!(residue_members(1, 1, 4).unwrap(), vec![1, 3]);
        assert!(residue_members(0, 2, 12).is_err());
        assert!(residue_members(5, 2, 12).is_err());
        assert!(residue_members(1, 7, 12).is_err());
    }

    #[test]
    fn residue_classes_partition_centres() {
        for blocks in 2..40 {
            for k in 1..=blocks / 2 {
                let mut all: Vec<usize> = (1..=2 * k)
                    .flat_map(|l| residue_members(l, k, blocks).unwrap())
                    .collect();
                all.sort_unstable();
                let expect: Vec<usize> = (k..=blocks - k).collect();
                assert_eq!(all, expect, "B={blocks} K={k}");
                for l in 1..=2 * k {
                    let m = residue_members(l, k, blocks).unwrap();
                    assert!(m.windows(2).all(|w| w[1] - w[0] == 2 * k));
                    assert!(m.iter().all(|i| (i + 2 * k - l % (2 * k)) % (2 * k) == 0));
                }
            }
        }
    }

    #[test]
    fn tent_values_at_landmarks() {
        let g = build_grid(1.0, 20).unwrap();
        let k = 3;
        for l in 1..=2 * k {
            for i in residue_members(l, k, 20).unwrap() {
                assert_eq!(eval_f(g.boundary(i), l, k, &g), 1.0);
                if i > k {
                    // t_{i-K} is the previous member's forward end for this class
                    assert_eq!(eval_f(g.boundary(i - k), l, k, &g), 0.0);
                }
                let mid = 0.5 * (g.boundary(i) + g.boundary(i + k));
                assert!((eval_f(mid, l, k, &g) - 0.5).abs() < 1e-12);
            }
        }
        assert_eq!(eval_f(1.0, 1, k, &g), 0.0);
        assert_eq!(eval_f(-0.1, 1, k, &g), 0.0);
    }

    #[test]
    fn step_signs() {
        let g = build_grid(1.0, 20).unwrap();
        let (l, k) = (2, 2);
        let i = residue_members(l, k, 20).unwrap()[1];
        let fwd = g.boundary(i) + 0.5 * g.delta();
        let back = g.boundary(i) - 0.5 * g.delta();
        assert_eq!(eval_g(fwd, l, k, &g), 1.0);
        assert_eq!(eval_g(back, l, k, &g), -1.0);
        // class 4 with K=2 has its first centre at 4, so [0, t_2) is outside
        assert_eq!(eval_g(0.01, 4, k, &g), 0.0);
        assert_eq!(eval_g(1.0, l, k, &g), 0.0);
    }

    #[test]
    fn tents_sum_to_k_in_the_interior() {
        let blocks = 30;
        let g = build_grid(2.0, blocks).unwrap();
        for k in 1..=5 {
            let lo = g.boundary(2 * k);
            let hi = g.boundary(blocks - 2 * k);
            for step in 0..=200 {
                let s = lo + (hi - lo) * step as f64 / 200.0;
                if s >= hi {
                    continue;
                }
                let total: f64 = (1..=2 * k).map(|l| eval_f(s, l, k, &g)).sum();
                assert!((total - k as f64).abs() < 1e-12, "K={k} s={s} sum={total}");
            }
        }
    }

    #[test]
    fn block_lookup_uses_left_open_blocks() {
        let g = build_grid(1.0, 4).unwrap();
        assert_eq!(g.block_of(0.0), None);
        assert_eq!(g.block_of(0.25), Some(1));
        assert_eq!(g.block_of(0.2500001), Some(2));
        assert_eq!(g.block_of(1.0), Some(4));
        assert_eq!(g.cell_of(0.25), Some(1));
        assert_eq!(g.cell_of(1.0), None);
    }
}
