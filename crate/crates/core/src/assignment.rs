//! Minimum-cost rectangular assignment (Hungarian method with potentials).

use alloc::vec;
use alloc::vec::Vec;

/// Costs closer than this are considered equal when breaking ties.
pub const TIE_EPSILON: f64 = 1e-9;

/// A dense row-major cost matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    cells: Vec<f64>,
}

impl CostMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut cells = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                cells.push(f(r, c));
            }
        }
        Self { rows, cols, cells }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.cells[r * self.cols + c]
    }
}

/// Solves the assignment restricted to the given rows and columns.
///
/// Every optimal solution has `min(rows.len(), cols.len())` pairs. Returns the
/// minimum total cost and, for each entry of `rows`, the matched position in
/// `cols` (if any).
pub fn solve_subset(m: &CostMatrix, rows: &[usize], cols: &[usize]) -> (f64, Vec<Option<usize>>) {
    if rows.is_empty() || cols.is_empty() {
        return (0.0, vec![None; rows.len()]);
    }
    if rows.len() <= cols.len() {
        hungarian(rows.len(), cols.len(), |i, j| m.get(rows[i], cols[j]))
    } else {
        let (cost, col_to_row) = hungarian(cols.len(), rows.len(), |i, j| m.get(rows[j], cols[i]));
        let mut row_to_col = vec![None; rows.len()];
        for (c, r) in col_to_row.into_iter().enumerate() {
            if let Some(r) = r {
                row_to_col[r] = Some(c);
            }
        }
        (cost, row_to_col)
    }
}

/// Minimum-cost assignment of every row of an `n × m` matrix (`n ≤ m`).
fn hungarian(n: usize, m: usize, cost: impl Fn(usize, usize) -> f64) -> (f64, Vec<Option<usize>>) {
    debug_assert!(n <= m);
    // 1-based potentials; column 0 is the virtual start column
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![None; n];
    let mut total = 0.0;
    for j in 1..=m {
        if owner[j] != 0 {
            row_to_col[owner[j] - 1] = Some(j - 1);
            total += cost(owner[j] - 1, j - 1);
        }
    }
    (total, row_to_col)
}

/// An optimal assignment chosen deterministically among ties.
#[derive(Debug, Clone, PartialEq)]
pub struct LexAssignment {
    /// For each row, the assigned column.
    pub row_to_col: Vec<Option<usize>>,
    pub total_cost: f64,
    /// Whether another optimal assignment exists.
    pub tied: bool,
}

/// Among all maximum-cardinality minimum-cost assignments, returns the one
/// whose sorted `(row, col)` pair list is lexicographically smallest.
///
/// Rows are fixed one at a time, in order, to the lowest column that still
/// admits an optimal completion.
pub fn lexicographic_assignment(m: &CostMatrix) -> LexAssignment {
    let mut free_rows: Vec<usize> = (0..m.rows()).collect();
    let mut free_cols: Vec<usize> = (0..m.cols()).collect();
    let mut row_to_col = vec![None; m.rows()];
    let (mut remaining_opt, _) = solve_subset(m, &free_rows, &free_cols);
    let mut needed = m.rows().min(m.cols());
    let mut tied = false;

    for r in 0..m.rows() {
        free_rows.retain(|&x| x != r);
        if needed == 0 {
            break;
        }
        let mut chosen: Option<(Option<usize>, f64)> = None;
        // candidates: each free column in order, then leaving the row unassigned
        let candidates = free_cols.iter().copied().map(Some).chain(core::iter::once(None));
        for cand in candidates {
            let feasible = match cand {
                Some(c) => {
                    let cols: Vec<usize> = free_cols.iter().copied().filter(|&x| x != c).collect();
                    if free_rows.len().min(cols.len()) + 1 != needed {
                        None
                    } else {
                        let (rest, _) = solve_subset(m, &free_rows, &cols);
                        let total = m.get(r, c) + rest;
                        (libm::fabs(total - remaining_opt) <= TIE_EPSILON).then_some(rest)
                    }
                }
                None => {
                    if free_rows.len().min(free_cols.len()) != needed {
                        None
                    } else {
                        let (rest, _) = solve_subset(m, &free_rows, &free_cols);
                        (libm::fabs(rest - remaining_opt) <= TIE_EPSILON).then_some(rest)
                    }
                }
            };
            if let Some(rest) = feasible {
                if chosen.is_some() {
                    tied = true;
                    break;
                }
                chosen = Some((cand, rest));
                if tied {
                    break;
                }
            }
        }
        let (cand, rest) = chosen.expect("an optimal completion always exists");
        if let Some(c) = cand {
            row_to_col[r] = Some(c);
            free_cols.retain(|&x| x != c);
            needed -= 1;
        }
        remaining_opt = rest;
    }

    let total_cost = row_to_col
        .iter()
        .enumerate()
        .filter_map(|(r, c)| c.map(|c| m.get(r, c)))
        .sum();
    LexAssignment { row_to_col, total_cost, tied }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_min(m: &CostMatrix) -> f64 {
        fn go(m: &CostMatrix, r: usize, used: &mut Vec<bool>, left: usize) -> f64 {
            if left == 0 {
                return 0.0;
            }
            if m.rows() - r < left {
                return f64::INFINITY;
            }
            let mut best = go(m, r + 1, used, left);
            for c in 0..m.cols() {
                if !used[c] {
                    used[c] = true;
                    best = best.min(m.get(r, c) + go(m, r + 1, used, left - 1));
                    used[c] = false;
                }
            }
            best
        }
        let k = m.rows().min(m.cols());
        go(m, 0, &mut vec![false; m.cols()], k)
    }

    #[test]
    fn square_example() {
        let data = [[4.0, 1.0, 3.0], [2.0, 0.0, 5.0], [3.0, 2.0, 2.0]];
        let m = CostMatrix::from_fn(3, 3, |r, c| data[r][c]);
        let (cost, assign) = solve_subset(&m, &[0, 1, 2], &[0, 1, 2]);
        assert_eq!(cost, 5.0);
        assert_eq!(assign, vec![Some(1), Some(0), Some(2)]);
    }

    #[test]
    fn rectangular_both_ways() {
        let wide = CostMatrix::from_fn(2, 4, |r, c| ((r * 7 + c * 3) % 5) as f64);
        let (cost, _) = solve_subset(&wide, &[0, 1], &[0, 1, 2, 3]);
        assert_eq!(cost, brute_min(&wide));
        let tall = CostMatrix::from_fn(4, 2, |r, c| ((r * 5 + c * 3) % 7) as f64);
        let (cost, assign) = solve_subset(&tall, &[0, 1, 2, 3], &[0, 1]);
        assert_eq!(cost, brute_min(&tall));
        assert_eq!(assign.iter().filter(|a| a.is_some()).count(), 2);
    }

    #[test]
    fn pseudo_random_matrices_match_brute_force() {
        let mut seed = 0x2545_f491_4f6c_dd1du64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed % 1000) as f64 / 1000.0
        };
        for rows in 1..=5 {
            for cols in 1..=5 {
                let cells: Vec<f64> = (0..rows * cols).map(|_| next()).collect();
                let m = CostMatrix::from_fn(rows, cols, |r, c| cells[r * cols + c]);
                let lex = lexicographic_assignment(&m);
                assert!((lex.total_cost - brute_min(&m)).abs() < 1e-12);
                assert_eq!(lex.row_to_col.iter().flatten().count(), rows.min(cols));
            }
        }
    }

    #[test]
    fn ties_prefer_lowest_pairs() {
        let m = CostMatrix::from_fn(2, 1, |_, _| 0.125);
        let lex = lexicographic_assignment(&m);
        assert_eq!(lex.row_to_col, vec![Some(0), None]);
        assert!(lex.tied);
        let m = CostMatrix::from_fn(2, 2, |_, _| 0.0);
        let lex = lexicographic_assignment(&m);
        assert_eq!(lex.row_to_col, vec![Some(0), Some(1)]);
        assert!(lex.tied);
        let m = CostMatrix::from_fn(2, 2, |r, c| if r == c { 0.0 } else { 1.0 });
        assert!(!lexicographic_assignment(&m).tied);
    }
}
