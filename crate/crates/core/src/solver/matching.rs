//! Rectangular min-cost assignment (Hungarian method with potentials).

/// Assigns every row to a distinct column minimizing the summed cost.
/// `cost` is row-major with `rows <= cols`. Returns `col_of_row`.
pub(crate) fn min_cost_assignment(cost: &[f64], rows: usize, cols: usize) -> Vec<usize> {
    assert!(rows <= cols, "need at least as many columns as rows");
    assert_eq!(cost.len(), rows * cols);
    if rows == 0 {
        return Vec::new();
    }
    // 1-based potentials; index 0 is the virtual root column.
    let mut u = vec![0.0f64; rows + 1];
    let mut v = vec![0.0f64; cols + 1];
    let mut row_of_col = vec![0usize; cols + 1];
    let mut way = vec![0usize; cols + 1];
    let mut minv = vec![0.0f64; cols + 1];
    let mut used = vec![false; cols + 1];

    for i in 1..=rows {
        row_of_col[0] = i;
        let mut j0 = 0usize;
        minv.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=cols {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * cols + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=cols {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
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

    let mut col_of_row = vec![0usize; rows];
    for j in 1..=cols {
        if row_of_col[j] != 0 {
            col_of_row[row_of_col[j] - 1] = j - 1;
        }
    }
    col_of_row
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(cost: &[f64], rows: usize, cols: usize) -> f64 {
        fn rec(cost: &[f64], rows: usize, cols: usize, r: usize, used: &mut Vec<bool>) -> f64 {
            if r == rows {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for c in 0..cols {
                if !used[c] {
                    used[c] = true;
                    best = best.min(cost[r * cols + c] + rec(cost, rows, cols, r + 1, used));
                    used[c] = false;
                }
            }
            best
        }
        rec(cost, rows, cols, 0, &mut vec![false; cols])
    }

    #[test]
    fn small_square() {
        let cost = [4.0, 1.0, 3.0, 2.0, 0.0, 5.0, 3.0, 2.0, 2.0];
        let a = min_cost_assignment(&cost, 3, 3);
        let total: f64 = a.iter().enumerate().map(|(r, &c)| cost[r * 3 + c]).sum();
        assert_eq!(total, 5.0);
    }

    proptest! {
        #[test]
        fn matches_enumeration(rows in 1usize..5, extra in 0usize..3, seed in prop::collection::vec(0.0f64..10.0, 40)) {
            let cols = rows + extra;
            let cost: Vec<f64> = seed[..rows * cols].to_vec();
            let a = min_cost_assignment(&cost, rows, cols);
            let mut seen = vec![false; cols];
            for &c in &a {
                prop_assert!(!seen[c]);
                seen[c] = true;
            }
            let total: f64 = a.iter().enumerate().map(|(r, &c)| cost[r * cols + c]).sum();
            prop_assert!((total - brute(&cost, rows, cols)).abs() < 1e-9);
        }
    }
}
