//! Minimum-cost perfect matching of two point sets.

/// Exact method up to this size, greedy beyond.
pub const EXACT_LIMIT: usize = 16;

/// Returns `assign` with `assign[row]` the column matched to `row`,
/// minimizing `Σ cost[row][assign[row]]`.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    if cost.len() <= EXACT_LIMIT {
        hungarian(cost)
    } else {
        greedy(cost)
    }
}

/// Kuhn–Munkres with potentials, `O(n³)`.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    // 1-based arrays; column 0 is a sentinel
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        row_of_col[0] = row;
        let mut col0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
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
                let cur = cost[r0 - 1][col - 1] - u[r0] - v[col];
                if cur < minv[col] {
                    minv[col] = cur;
                    way[col] = col0;
                }
                if minv[col] < delta {
                    delta = minv[col];
                    col1 = col;
                }
            }
            for col in 0..=n {
                if used[col] {
                    u[row_of_col[col]] += delta;
                    v[col] -= delta;
                } else {
                    minv[col] -= delta;
                }
            }
            col0 = col1;
            if row_of_col[col0] == 0 {
                break;
            }
        }
        loop {
            let col1 = way[col0];
            row_of_col[col0] = row_of_col[col1];
            col0 = col1;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0; n];
    for col in 1..=n {
        assign[row_of_col[col] - 1] = col - 1;
    }
    assign
}

/// Repeatedly matches the globally cheapest remaining pair.
pub fn greedy(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let mut pairs: Vec<(f64, usize, usize)> = (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .map(|(r, c)| (cost[r][c], r, c))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut assign = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for (_, r, c) in pairs {
        if assign[r] == usize::MAX && !taken[c] {
            assign[r] = c;
            taken[c] = true;
        }
    }
    assign
}

pub fn total_cost(cost: &[Vec<f64>], assign: &[usize]) -> f64 {
    assign.iter().enumerate().map(|(r, &c)| cost[r][c]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_force(cost: &[Vec<f64>]) -> f64 {
        fn rec(cost: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
            if row == cost.len() {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for c in 0..cost.len() {
                if !used[c] {
                    used[c] = true;
                    best = best.min(cost[row][c] + rec(cost, row + 1, used));
                    used[c] = false;
                }
            }
            best
        }
        rec(cost, 0, &mut vec![false; cost.len()])
    }

    #[test]
    fn small_example() {
        let cost = vec![vec![4.0, 1.0, 3.0], vec![2.0, 0.0, 5.0], vec![3.0, 2.0, 2.0]];
        let a = hungarian(&cost);
        assert_eq!(total_cost(&cost, &a), 5.0);
    }

    proptest! {
        #[test]
        fn hungarian_matches_brute_force(n in 1usize..7, seed in proptest::collection::vec(0.0f64..10.0, 49)) {
            let cost: Vec<Vec<f64>> = (0..n).map(|r| (0..n).map(|c| seed[r * 7 + c]).collect()).collect();
            let a = hungarian(&cost);
            let mut seen = a.clone();
            seen.sort();
            prop_assert_eq!(seen, (0..n).collect::<Vec<_>>());
            prop_assert!((total_cost(&cost, &a) - brute_force(&cost)).abs() < 1e-9);
        }

        #[test]
        fn greedy_is_a_permutation(n in 1usize..20, seed in proptest::collection::vec(0.0f64..10.0, 400)) {
            let cost: Vec<Vec<f64>> = (0..n).map(|r| (0..n).map(|c| seed[r * 20 + c]).collect()).collect();
            let mut a = greedy(&cost);
            a.sort();
            prop_assert_eq!(a, (0..n).collect::<Vec<_>>());
        }
    }
}
