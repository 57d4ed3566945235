use crate::error::{Error, Result};
use crate::model::Vec3;

/// A perfect matching `a[i] ↔ b[permutation[i]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub permutation: Vec<usize>,
    /// Σᵢ cost(i, permutation[i]), summed in row order.
    pub total_cost: f64,
}

/// Minimum-cost perfect assignment on a square cost matrix
/// (Kuhn–Munkres with row/column potentials, O(n³)).
pub fn solve_assignment(cost: &[Vec<f64>]) -> Result<Vec<usize>> {
    let n = cost.len();
    if cost.iter().any(|row| row.len() != n) {
        return Err(Error::validation("assignment cost matrix must be square"));
    }
    if cost.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::validation("assignment costs must be finite"));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    // 1-based arrays; column 0 is a virtual start column
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of_col[0] = i;
        let mut j0 = 0usize;
        let mut min_slack = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < min_slack[j] {
                    min_slack[j] = cur;
                    way[j] = j0;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of_row = vec![0usize; n];
    for j in 1..=n {
        col_of_row[row_of_col[j] - 1] = j - 1;
    }
    Ok(col_of_row)
}

/// Matches two equally sized center sets minimizing the summed L1 distance.
pub fn hungarian_match(centers_a: &[Vec3], centers_b: &[Vec3]) -> Result<Assignment> {
    if centers_a.len() != centers_b.len() {
        return Err(Error::validation(format!(
            "cannot match {} centers against {}",
            centers_a.len(),
            centers_b.len()
        )));
    }
    let cost: Vec<Vec<f64>> = centers_a
        .iter()
        .map(|a| centers_b.iter().map(|b| (a - b).abs().sum()).collect())
        .collect();
    let permutation = solve_assignment(&cost)?;
    let total_cost = permutation
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j])
        .sum();
    Ok(Assignment {
        permutation,
        total_cost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swapped_pair() {
        let a = [Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0)];
        let b = [Vec3::new(1.1, 0.0, 0.0), Vec3::new(0.1, 0.0, 0.0)];
        let m = hungarian_match(&a, &b).unwrap();
        assert_eq!(m.permutation, vec![1, 0]);
        assert!((m.total_cost - 0.2).abs() < 1e-12);
    }

    #[test]
    fn identical_sets_cost_zero() {
        let a = [Vec3::zeros(), Vec3::x(), Vec3::y(), Vec3::z()];
        assert_eq!(hungarian_match(&a, &a).unwrap().total_cost, 0.0);
    }

    #[test]
    fn single_pair_and_errors() {
        let m = hungarian_match(&[Vec3::x()], &[Vec3::y()]).unwrap();
        assert_eq!(m.permutation, vec![0]);
        assert_eq!(m.total_cost, 2.0);
        assert!(hungarian_match(&[Vec3::x()], &[]).is_err());
        assert!(solve_assignment(&[vec![1.0, 2.0]]).is_err());
        assert!(solve_assignment(&[vec![f64::NAN]]).is_err());
    }

    #[test]
    fn permutation_is_bijection() {
        let cost: Vec<Vec<f64>> = (0..12)
            .map(|i| (0..12).map(|j| ((i * 7 + j * 13) % 17) as f64).collect())
            .collect();
        let mut p = solve_assignment(&cost).unwrap();
        p.sort();
        assert_eq!(p, (0..12).collect::<Vec<_>>());
    }
}
