//! The integer program `min Σ c_j z_j` s.t. `Σ z_j q_j = d`,
//! `Σ z_j p_j ≡ e (mod 2)`, `z ≥ 0` integral, with a fixed number of rows.
//!
//! Solved as a shortest path over partial sums `(r, b)`: `r` ranges over the
//! integer points within ℓ∞-distance `R` of the segment from `0` to `d`, `b`
//! is the parity. Every feasible multiset of columns has an ordering whose
//! partial sums stay in that tube once `R` is at least the dimension times
//! the largest column entry.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub q: Vec<i64>,
    pub p: u8,
    pub cost: u128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IpSolution {
    /// Multiplicity per column.
    pub z: Vec<u64>,
    pub cost: u128,
    pub states_settled: u64,
}

/// Default tube radius: `2 · g · Δ` with `Δ` the largest column entry.
pub fn default_radius(columns: &[Column], genus: usize) -> i64 {
    let delta = columns
        .iter()
        .flat_map(|c| c.q.iter().map(|x| x.abs()))
        .max()
        .unwrap_or(0)
        .max(1);
    2 * genus as i64 * delta
}

/// Whether some `t ∈ [0, 1]` has `|r_i - t d_i| ≤ radius` for every `i`.
pub fn in_tube(r: &[i64], d: &[i64], radius: i64) -> bool {
    // Interval of t as fractions num/den with den > 0; start with [0, 1].
    let (mut lo_n, mut lo_d) = (0i128, 1i128);
    let (mut hi_n, mut hi_d) = (1i128, 1i128);
    for (&ri, &di) in r.iter().zip(d) {
        let (ri, di, rad) = (ri as i128, di as i128, radius as i128);
        if di == 0 {
            if ri.abs() > rad {
                return false;
            }
            continue;
        }
        // t ∈ [(ri - rad)/di, (ri + rad)/di], swapped when di < 0.
        let (mut a, mut b, den) = (ri - rad, ri + rad, di);
        let den = if den < 0 {
            std::mem::swap(&mut a, &mut b);
            a = -a;
            b = -b;
            -den
        } else {
            den
        };
        if a * lo_d > lo_n * den {
            lo_n = a;
            lo_d = den;
        }
        if b * hi_d < hi_n * den {
            hi_n = b;
            hi_d = den;
        }
        if lo_n * hi_d > hi_n * lo_d {
            return false;
        }
    }
    lo_n * hi_d <= hi_n * lo_d
}

/// Drops columns that are the sum of a kept column and another column, both
/// ranked before them (by cost, then `‖q‖₁`, parity and `q`), at no greater
/// total cost, plus columns with `q = 0, p = 0`. Some optimal solution of the
/// integer program uses only the returned columns.
pub fn irreducible_columns(columns: &[Column]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..columns.len()).collect();
    let rank_key = |j: usize| {
        let c = &columns[j];
        (
            c.cost,
            c.q.iter().map(|x| x.abs()).sum::<i64>(),
            c.p,
            c.q.clone(),
        )
    };
    order.sort_by_key(|&j| rank_key(j));
    let mut rank = vec![0usize; columns.len()];
    for (r, &j) in order.iter().enumerate() {
        rank[j] = r;
    }
    let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
    for (j, c) in columns.iter().enumerate() {
        let mut key = c.q.clone();
        key.push(c.p as i64);
        index.insert(key, j);
    }
    let mut kept: Vec<usize> = Vec::new();
    let mut buf = Vec::new();
    for &k in &order {
        let ck = &columns[k];
        if ck.p == 0 && ck.q.iter().all(|&x| x == 0) {
            continue;
        }
        let reducible = kept.iter().any(|&i| {
            let ci = &columns[i];
            buf.clear();
            buf.extend(ck.q.iter().zip(&ci.q).map(|(a, b)| a - b));
            buf.push((ck.p ^ ci.p) as i64);
            index
                .get(buf.as_slice())
                .is_some_and(|&j| rank[j] < rank[k] && ci.cost + columns[j].cost <= ck.cost)
        });
        if !reducible {
            kept.push(k);
        }
    }
    kept.sort_unstable();
    kept
}

/// Mixed-radix index of the integer points of the tube's bounding box.
struct Packing {
    lo: Vec<i64>,
    hi: Vec<i64>,
    stride: Vec<u128>,
}

impl Packing {
    fn new(d: &[i64], radius: i64) -> Self {
        let lo: Vec<i64> = d.iter().map(|&x| x.min(0) - radius).collect();
        let hi: Vec<i64> = d.iter().map(|&x| x.max(0) + radius).collect();
        let mut stride = Vec::with_capacity(d.len());
        let mut acc: u128 = 2;
        for (l, h) in lo.iter().zip(&hi) {
            stride.push(acc);
            acc = acc
                .checked_mul((h - l + 1) as u128)
                .expect("tube bounding box fits in 128-bit indices");
        }
        Packing { lo, hi, stride }
    }

    fn pack(&self, r: &[i64], b: u8) -> u128 {
        r.iter()
            .zip(&self.lo)
            .zip(&self.stride)
            .fold(b as u128, |acc, ((&x, &l), &s)| acc + (x - l) as u128 * s)
    }

    fn unpack(&self, key: u128, r: &mut Vec<i64>) -> u8 {
        r.clear();
        for (i, &l) in self.lo.iter().enumerate() {
            let width = (self.hi[i] - l + 1) as u128;
            r.push(l + ((key / self.stride[i]) % width) as i64);
        }
        (key & 1) as u8
    }
}

/// Cheapest column multiset reaching `(d, e)`, or `None` if none exists in
/// the tube.
pub fn solve_fixed_row_ip(columns: &[Column], d: &[i64], e: u8, radius: i64) -> Option<IpSolution> {
    let packing = Packing::new(d, radius);
    let start = packing.pack(&vec![0; d.len()], 0);
    let target = packing.pack(d, e & 1);
    // state -> (cost, predecessor, column)
    let mut best: HashMap<u128, (u128, u128, usize)> = HashMap::new();
    let mut heap = BinaryHeap::new();
    best.insert(start, (0, start, usize::MAX));
    heap.push(Reverse((0u128, start)));
    let mut settled = 0u64;
    let useful: Vec<usize> = (0..columns.len())
        .filter(|&j| columns[j].p == 1 || columns[j].q.iter().any(|&x| x != 0))
        .collect();
    let (mut r, mut next_r) = (Vec::new(), Vec::new());
    while let Some(Reverse((cost, key))) = heap.pop() {
        if best[&key].0 < cost {
            continue;
        }
        settled += 1;
        if key == target {
            let mut z = vec![0u64; columns.len()];
            let mut at = key;
            while at != start {
                let (_, prev, j) = best[&at];
                z[j] += 1;
                at = prev;
            }
            return Some(IpSolution {
                z,
                cost,
                states_settled: settled,
            });
        }
        let b = packing.unpack(key, &mut r);
        for &j in &useful {
            let col = &columns[j];
            next_r.clear();
            next_r.extend(r.iter().zip(&col.q).map(|(a, b)| a + b));
            if !in_tube(&next_r, d, radius) {
                continue;
            }
            let next = packing.pack(&next_r, b ^ col.p);
            let nc = cost + col.cost;
            if best.get(&next).is_none_or(|&(old, _, _)| nc < old) {
                best.insert(next, (nc, key, j));
                heap.push(Reverse((nc, next)));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(q: &[i64], p: u8, cost: u128) -> Column {
        Column {
            q: q.to_vec(),
            p,
            cost,
        }
    }

    #[test]
    fn tube_membership() {
        assert!(in_tube(&[0], &[10], 0));
        assert!(in_tube(&[5], &[10], 0));
        assert!(!in_tube(&[11], &[10], 0));
        assert!(in_tube(&[11], &[10], 1));
        assert!(!in_tube(&[-2], &[10], 1));
        assert!(in_tube(&[3, 0], &[6, 0], 0));
        assert!(!in_tube(&[3, 2], &[6, 0], 1));
        assert!(!in_tube(&[-3, 1], &[-6, 3], 0));
        assert!(in_tube(&[-2, 1], &[-6, 3], 0));
        assert!(in_tube(&[], &[], 0));
    }

    #[test]
    fn trivial_target() {
        let s = solve_fixed_row_ip(&[col(&[1], 0, 3)], &[0], 0, 2).unwrap();
        assert_eq!(s.cost, 0);
        assert_eq!(s.z, vec![0]);
    }

    #[test]
    fn parity_only() {
        let cols = [col(&[], 1, 4), col(&[], 1, 3), col(&[], 0, 1)];
        let s = solve_fixed_row_ip(&cols, &[], 1, 0).unwrap();
        assert_eq!((s.cost, s.z.clone()), (3, vec![0, 1, 0]));
        assert!(solve_fixed_row_ip(&[col(&[], 0, 1)], &[], 1, 0).is_none());
    }

    #[test]
    fn knapsack_like() {
        // Reach 7 with steps 2 (cost 3) and 3 (cost 4): 2 + 2 + 3 costs 10.
        let cols = [col(&[2], 0, 3), col(&[3], 0, 4)];
        let s = solve_fixed_row_ip(&cols, &[7], 0, 6).unwrap();
        assert_eq!(s.cost, 10);
        assert_eq!(s.z, vec![2, 1]);
        // Going backwards is needed: reach 1 with +3 and -2.
        let cols = [col(&[3], 0, 1), col(&[-2], 0, 1)];
        let s = solve_fixed_row_ip(&cols, &[1], 0, 6).unwrap();
        assert_eq!(s.z, vec![1, 1]);
        assert!(solve_fixed_row_ip(&[col(&[2], 0, 1)], &[1], 0, 4).is_none());
    }

    #[test]
    fn reducible_columns_dropped() {
        let cols = [
            col(&[1, 0], 0, 2),
            col(&[0, 1], 0, 2),
            col(&[1, 1], 0, 4),
            col(&[1, 1], 1, 3),
            col(&[0, 0], 0, 5),
            col(&[2, 0], 0, 5),
        ];
        assert_eq!(irreducible_columns(&cols), vec![0, 1, 3]);
    }
}
