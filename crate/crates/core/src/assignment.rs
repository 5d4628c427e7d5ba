//! Minimum-cost assignment on rectangular cost matrices (Hungarian method,
//! shortest augmenting path with row/column potentials, O(n²m)).

/// Dense row-major cost matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    /// Builds a matrix from equally long rows.
    ///
    /// # Panics
    ///
    /// Panics if the rows differ in length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged cost matrix");
        Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }

    fn transposed(&self) -> CostMatrix {
        let mut t = CostMatrix::filled(self.cols, self.rows, 0.0);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// `(row, col)` pairs sorted by row.
    pub pairs: Vec<(usize, usize)>,
    /// Sum of the costs of `pairs`, accumulated in row order.
    pub total: f64,
}

impl Assignment {
    fn from_pairs(costs: &CostMatrix, mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        let total = pairs.iter().map(|&(r, c)| costs.get(r, c)).sum();
        Self { pairs, total }
    }
}

/// Row-to-column assignment for `rows <= cols`; every row gets a column.
fn solve_wide(costs: &CostMatrix) -> Vec<usize> {
    let (n, m) = (costs.rows, costs.cols);
    // 1-based with a virtual column 0 holding the row being inserted.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];

    for row in 1..=n {
        owner[0] = row;
        let mut col0 = 0;
        let mut min_slack = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[col0] = true;
            let r0 = owner[col0];
            let mut delta = f64::INFINITY;
            let mut col1 = 0;
            for col in 1..=m {
                if used[col] {
                    continue;
                }
                let slack = costs.get(r0 - 1, col - 1) - u[r0] - v[col];
                if slack < min_slack[col] {
                    min_slack[col] = slack;
                    way[col] = col0;
                }
                if min_slack[col] < delta {
                    delta = min_slack[col];
                    col1 = col;
                }
            }
            for col in 0..=m {
                if used[col] {
                    u[owner[col]] += delta;
                    v[col] -= delta;
                } else {
                    min_slack[col] -= delta;
                }
            }
            col0 = col1;
            if owner[col0] == 0 {
                break;
            }
        }
        // Flip the augmenting path.
        loop {
            let prev = way[col0];
            owner[col0] = owner[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0; n];
    for col in 1..=m {
        if owner[col] != 0 {
            row_to_col[owner[col] - 1] = col - 1;
        }
    }
    row_to_col
}

/// Minimum-cost matching of size `min(rows, cols)`.
///
/// # Panics
///
/// Panics on non-finite costs.
pub fn solve_assignment(costs: &CostMatrix) -> Assignment {
    assert!(costs.data.iter().all(|c| c.is_finite()), "cost matrix must be finite");
    if costs.rows == 0 || costs.cols == 0 {
        return Assignment {
            pairs: Vec::new(),
            total: 0.0,
        };
    }
    let pairs = if costs.rows <= costs.cols {
        solve_wide(costs).into_iter().enumerate().collect()
    } else {
        solve_wide(&costs.transposed())
            .into_iter()
            .enumerate()
            .map(|(c, r)| (r, c))
            .collect()
    };
    Assignment::from_pairs(costs, pairs)
}

/// Like [`solve_assignment`], with infeasible pairs marked by `sentinel`.
///
/// The sentinel must exceed any sum of feasible costs; pairs costing at least
/// `sentinel` are dropped from the result.
pub fn solve_gated(costs: &CostMatrix, sentinel: f64) -> Assignment {
    let full = solve_assignment(costs);
    let kept = full.pairs.into_iter().filter(|&(r, c)| costs.get(r, c) < sentinel).collect();
    Assignment::from_pairs(costs, kept)
}
