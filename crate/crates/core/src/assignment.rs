//! Exact minimum-cost perfect matching on a square cost matrix.
//!
//! This is the O(n^3) Hungarian algorithm with row/column potentials and
//! shortest augmenting paths. Costs may be negative (the solver feeds it
//! matrices whose entries are all `<= 0`); no pre-shifting is required.

use crate::error::{Error, Result};

/// A square matrix of finite assignment costs.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    cost: Vec<f64>, // row-major
}

impl CostMatrix {
    /// Builds an `n x n` matrix from row-major entries.
    pub fn new(n: usize, cost: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("cost matrix must be non-empty".into()));
        }
        if cost.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "cost matrix must be square: got {} entries for n = {n}",
                cost.len()
            )));
        }
        if let Some(bad) = cost.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "cost matrix contains a non-finite entry: {bad}"
            )));
        }
        Ok(Self { n, cost })
    }

    /// Builds a matrix from rows, rejecting ragged or non-square input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput(
                "cost matrix rows must all have length n".into(),
            ));
        }
        Self::new(n, rows.concat())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        debug_assert!(col < self.n);
        self.cost[row * self.n + col]
    }
}

/// Solves the assignment problem to optimality.
///
/// Returns `(perm, total_cost)` where `perm[row]` is the column assigned to
/// `row` and `total_cost = sum_row cost[row][perm[row]]` is the minimum over
/// all permutations. Ties between equally cheap assignments are broken by
/// the deterministic index-order scan.
pub fn hungarian(m: &CostMatrix) -> (Vec<usize>, f64) {
    let n = m.n();
    const UNASSIGNED: usize = usize::MAX;

    // Potentials for rows and columns; column n is the virtual root of every
    // augmenting search.
    let mut row_potential = vec![0.0f64; n];
    let mut col_potential = vec![0.0f64; n + 1];
    let mut row_of_col = vec![UNASSIGNED; n + 1];
    let mut prev_col = vec![0usize; n + 1];

    for row in 0..n {
        row_of_col[n] = row;
        let mut j0 = n;
        let mut min_slack = vec![f64::INFINITY; n + 1];
        let mut visited = vec![false; n + 1];

        // Dijkstra-style search for the shortest augmenting path.
        loop {
            visited[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = f64::INFINITY;
            let mut j_next = 0;
            for j in 0..n {
                if visited[j] {
                    continue;
                }
                let reduced = m.get(i0, j) - row_potential[i0] - col_potential[j];
                if reduced < min_slack[j] {
                    min_slack[j] = reduced;
                    prev_col[j] = j0;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    j_next = j;
                }
            }
            for j in 0..=n {
                if visited[j] {
                    row_potential[row_of_col[j]] += delta;
                    col_potential[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j_next;
            if row_of_col[j0] == UNASSIGNED {
                break;
            }
        }

        // Augment along the recorded path back to the virtual root.
        while j0 != n {
            let j1 = prev_col[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
        }
    }

    let mut perm = vec![0usize; n];
    for col in 0..n {
        perm[row_of_col[col]] = col;
    }
    let total = (0..n).map(|row| m.get(row, perm[row])).sum();
    (perm, total)
}
