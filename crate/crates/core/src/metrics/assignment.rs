//! Rectangular minimum-cost assignment (Hungarian method with potentials,
//! `O(n²m)` for `n ≤ m`).

/// Assigns each of the `min(rows, cols)` agents on the smaller side to a
/// distinct partner minimizing the total cost. Returns the partner of every
/// row (`None` for rows left over when `rows > cols`) and the total cost.
pub fn linear_assignment(rows: usize, cols: usize, cost: impl Fn(usize, usize) -> f64) -> (Vec<Option<usize>>, f64) {
    if rows == 0 || cols == 0 {
        return (vec![None; rows], 0.0);
    }
    if rows > cols {
        let (col_to_row, total) = hungarian(cols, rows, |i, j| cost(j, i));
        let mut row_to_col = vec![None; rows];
        for (c, r) in col_to_row.into_iter().enumerate() {
            row_to_col[r] = Some(c);
        }
        return (row_to_col, total);
    }
    let (assign, total) = hungarian(rows, cols, cost);
    (assign.into_iter().map(Some).collect(), total)
}

/// `n ≤ m`; returns the column of every row.
fn hungarian(n: usize, m: usize, cost: impl Fn(usize, usize) -> f64) -> (Vec<usize>, f64) {
    // 1-based with a virtual column 0, following the classic formulation.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    let mut minv = vec![0.0; m + 1];
    let mut used = vec![false; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        minv.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
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
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0; n];
    for j in 1..=m {
        if p[j] != 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    let total = assign.iter().enumerate().map(|(i, &j)| cost(i, j)).sum();
    (assign, total)
}
