//! Exact transportation simplex on integer data.
//!
//! Balanced problem `min Σ c_ij x_ij` subject to row sums `supply`, column
//! sums `demand`, `x ≥ 0`. The basis is kept as a spanning tree over the
//! `m + n` row/column nodes; potentials come from a tree traversal and the
//! entering cell from the most negative reduced cost. After a run of
//! degenerate pivots the solver switches to Bland's rule, which cannot cycle.

use std::collections::VecDeque;

use crate::error::{PascoError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportSolution {
    pub rows: usize,
    pub cols: usize,
    /// Row-major `rows × cols`.
    pub flow: Vec<i64>,
    pub cost: i64,
    pub pivots: usize,
}

const MAX_PIVOTS: usize = 10_000_000;

struct Tree {
    adj: Vec<Vec<(usize, usize)>>,
}

impl Tree {
    /// Nodes `0..m` are rows, `m..m+n` columns; edge payload is the cell index.
    fn build(m: usize, n: usize, basis: &[usize]) -> Tree {
        let mut adj = vec![Vec::new(); m + n];
        for &cell in basis {
            let (i, j) = (cell / n, cell % n);
            adj[i].push((m + j, cell));
            adj[m + j].push((i, cell));
        }
        Tree { adj }
    }
}

fn potentials(m: usize, n: usize, cost: &[i64], tree: &Tree) -> (Vec<i64>, Vec<i64>) {
    let mut pot = vec![0i64; m + n];
    let mut seen = vec![false; m + n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(x) = queue.pop_front() {
        for &(y, cell) in &tree.adj[x] {
            if !seen[y] {
                seen[y] = true;
                // u_i + v_j = c_ij on basic cells.
                pot[y] = cost[cell] - pot[x];
                queue.push_back(y);
            }
        }
    }
    (pot[..m].to_vec(), pot[m..].to_vec())
}

/// Cells on the tree path from node `from` to node `to`, in order.
fn tree_path(tree: &Tree, from: usize, to: usize) -> Vec<usize> {
    let total = tree.adj.len();
    let mut parent = vec![(usize::MAX, usize::MAX); total];
    let mut seen = vec![false; total];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(x) = queue.pop_front() {
        if x == to {
            break;
        }
        for &(y, cell) in &tree.adj[x] {
            if !seen[y] {
                seen[y] = true;
                parent[y] = (x, cell);
                queue.push_back(y);
            }
        }
    }
    let mut cells = Vec::new();
    let mut x = to;
    while x != from {
        let (p, cell) = parent[x];
        cells.push(cell);
        x = p;
    }
    cells.reverse();
    cells
}

pub fn transport(supply: &[i64], demand: &[i64], cost: &[i64]) -> Result<TransportSolution> {
    let (m, n) = (supply.len(), demand.len());
    if m == 0 || n == 0 {
        return Err(PascoError::Empty("transport marginals"));
    }
    if cost.len() != m * n {
        return Err(PascoError::SizeMismatch {
            context: "transport cost",
            expected: m * n,
            found: cost.len(),
        });
    }
    if supply.iter().chain(demand).any(|&x| x < 0) {
        return Err(PascoError::InvalidParameter("negative marginal".into()));
    }
    let (ts, td): (i64, i64) = (supply.iter().sum(), demand.iter().sum());
    if ts != td {
        return Err(PascoError::InvalidParameter(format!(
            "unbalanced transport problem: {ts} vs {td}"
        )));
    }

    // Northwest corner start: exactly m + n - 1 basic cells.
    let mut flow = vec![0i64; m * n];
    let mut basis = Vec::with_capacity(m + n - 1);
    let (mut s, mut d) = (supply.to_vec(), demand.to_vec());
    let (mut i, mut j) = (0, 0);
    loop {
        let x = s[i].min(d[j]);
        flow[i * n + j] = x;
        basis.push(i * n + j);
        s[i] -= x;
        d[j] -= x;
        if i == m - 1 && j == n - 1 {
            break;
        }
        if (s[i] == 0 && i < m - 1) || j == n - 1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    debug_assert_eq!(basis.len(), m + n - 1);

    let mut in_basis = vec![false; m * n];
    basis.iter().for_each(|&c| in_basis[c] = true);
    let mut degenerate_run = 0usize;
    let mut bland = false;
    let mut pivots = 0usize;
    loop {
        let tree = Tree::build(m, n, &basis);
        let (u, v) = potentials(m, n, cost, &tree);
        let mut entering = None;
        let mut best = 0i64;
        for cell in 0..m * n {
            if in_basis[cell] {
                continue;
            }
            let r = cost[cell] - u[cell / n] - v[cell % n];
            if r < best {
                best = r;
                entering = Some(cell);
                if bland {
                    break;
                }
            }
        }
        let Some(enter) = entering else {
            break;
        };
        pivots += 1;
        if pivots > MAX_PIVOTS {
            return Err(PascoError::NoConvergence(pivots));
        }
        let (ei, ej) = (enter / n, enter % n);
        // Cycle: entering cell (+), then the tree path from column ej back
        // to row ei with alternating signs starting at (-).
        let path = tree_path(&tree, m + ej, ei);
        let minus: Vec<usize> = path.iter().copied().step_by(2).collect();
        let theta = minus.iter().map(|&c| flow[c]).min().expect("nonempty cycle");
        let leave = *minus
            .iter()
            .filter(|&&c| flow[c] == theta)
            .min()
            .expect("leaving cell");
        for (k, &c) in path.iter().enumerate() {
            if k % 2 == 0 {
                flow[c] -= theta;
            } else {
                flow[c] += theta;
            }
        }
        flow[enter] += theta;
        in_basis[leave] = false;
        in_basis[enter] = true;
        let pos = basis.iter().position(|&c| c == leave).expect("leaving cell is basic");
        basis[pos] = enter;

        if theta == 0 {
            degenerate_run += 1;
            if degenerate_run >= 2 * (m + n) {
                bland = true;
            }
        } else {
            degenerate_run = 0;
        }
    }
    let total = flow.iter().zip(cost).map(|(x, c)| x * c).sum();
    Ok(TransportSolution {
        rows: m,
        cols: n,
        flow,
        cost: total,
        pivots,
    })
}
