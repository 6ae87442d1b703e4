use crate::error::{Error, Result};

/// Optimal one-to-one assignment for a square cost matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// `columns[row]` is the column assigned to `row`.
    pub columns: Vec<usize>,
    pub total_cost: f64,
}

/// Minimum-cost perfect matching (Kuhn-Munkres with potentials, O(n^3)).
///
/// `cost[r][c]` is the cost of giving column `c` to row `r`.
pub fn hungarian(cost: &[Vec<f64>]) -> Result<Assignment> {
    let n = cost.len();
    if cost.iter().any(|row| row.len() != n) {
        return Err(Error::domain("cost matrix must be square"));
    }
    if cost.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::domain("cost matrix entries must be finite"));
    }
    if n == 0 {
        return Ok(Assignment {
            columns: Vec::new(),
            total_cost: 0.0,
        });
    }

    // 1-based potentials; index 0 is the virtual root.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for row in 1..=n {
        row_of_col[0] = row;
        let mut col0 = 0;
        let mut min_slack = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let r0 = row_of_col[col0];
            let mut delta = f64::INFINITY;
            let mut col1 = 0;
            for col in 1..=n {
                if used[col] {
                    continue;
                }
                let reduced = cost[r0 - 1][col - 1] - u[r0] - v[col];
                if reduced < min_slack[col] {
                    min_slack[col] = reduced;
                    way[col] = col0;
                }
                if min_slack[col] < delta {
                    delta = min_slack[col];
                    col1 = col;
                }
            }
            for col in 0..=n {
                if used[col] {
                    u[row_of_col[col]] += delta;
                    v[col] -= delta;
                } else {
                    min_slack[col] -= delta;
                }
            }
            col0 = col1;
            if row_of_col[col0] == 0 {
                break;
            }
        }
        // augment along the alternating path
        loop {
            let prev = way[col0];
            row_of_col[col0] = row_of_col[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }

    let mut columns = vec![0usize; n];
    for col in 1..=n {
        columns[row_of_col[col] - 1] = col - 1;
    }
    let total_cost = columns.iter().enumerate().map(|(r, &c)| cost[r][c]).sum();
    Ok(Assignment {
        columns,
        total_cost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_dominant() {
        let a = hungarian(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert_eq!(a.columns, vec![0, 1]);
        assert_eq!(a.total_cost, 2.0);
    }

    #[test]
    fn anti_diagonal() {
        let a = hungarian(&[vec![4.0, 1.0], vec![2.0, 3.0]]).unwrap();
        assert_eq!(a.columns, vec![1, 0]);
        assert_eq!(a.total_cost, 3.0);
    }

    #[test]
    fn identity_favoring() {
        let n = 5;
        let cost: Vec<Vec<f64>> = (0..n)
            .map(|r| (0..n).map(|c| if r == c { 0.0 } else { 10.0 + c as f64 }).collect())
            .collect();
        assert_eq!(hungarian(&cost).unwrap().columns, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn rejects_non_square() {
        assert!(hungarian(&[vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn negative_costs_are_fine() {
        let a = hungarian(&[vec![-1.0, -5.0], vec![-2.0, -1.0]]).unwrap();
        assert_eq!(a.columns, vec![1, 0]);
        assert_eq!(a.total_cost, -7.0);
    }
}
