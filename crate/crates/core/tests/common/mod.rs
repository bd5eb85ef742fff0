//! Brute-force and direct-formula oracles shared by the integration tests and
//! the acceptance harness. Everything here works on small dense matrices and
//! deliberately avoids the library's own numerical kernels.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pasco_core::exec::Executor;
use pasco_core::fusion::{
    lin_reg_align, majority_vote_update, many_to_one_align, ot_distance_and_plan, quad_ot_solve, CouplingMatrix,
};
use pasco_core::graph::WeightedGraph;
use pasco_core::metrics::{ami, description_length, expected_mutual_information, gncut, modularity, mutual_information, rsa};
use pasco_core::partition::{contingency, Partition};
use pasco_core::table::CoarseningTable;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// random instances

/// Edge list with small integer weights; self-loops and repeated pairs allowed.
pub fn random_edges(rng: &mut impl Rng, n: usize, loops: bool) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u..n {
            if u == v && !loops {
                continue;
            }
            if rng.random_bool(0.4) {
                edges.push((u, v, rng.random_range(1..=5) as f64));
            }
        }
    }
    edges
}

/// Labels in `0..k` using every label at least once (requires `n >= k`).
pub fn random_surjection(rng: &mut impl Rng, n: usize, k: usize) -> Vec<usize> {
    loop {
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let mut seen = vec![false; k];
        labels.iter().for_each(|&l| seen[l] = true);
        if seen.iter().all(|&s| s) {
            return labels;
        }
    }
}

pub fn random_partition(rng: &mut impl Rng, n: usize, k_max: usize) -> Partition {
    let k = rng.random_range(1..=k_max.min(n));
    Partition::from_labels(random_surjection(rng, n, k))
}

// ---------------------------------------------------------------------------
// dense helpers

/// `A` with the doubled-diagonal convention for self-loops.
pub fn dense_adjacency(n: usize, edges: &[(usize, usize, f64)]) -> Vec<f64> {
    let mut a = vec![0.0; n * n];
    for &(u, v, w) in edges {
        if u == v {
            a[u * n + u] += 2.0 * w;
        } else {
            a[u * n + v] += w;
            a[v * n + u] += w;
        }
    }
    a
}

/// `N × k` indicator matrix.
pub fn indicator(labels: &[usize], k: usize) -> Vec<f64> {
    let mut m = vec![0.0; labels.len() * k];
    for (i, &l) in labels.iter().enumerate() {
        m[i * k + l] = 1.0;
    }
    m
}

/// `(r × s) · (s × t)`.
pub fn matmul(a: &[f64], b: &[f64], r: usize, s: usize, t: usize) -> Vec<f64> {
    let mut c = vec![0.0; r * t];
    for i in 0..r {
        for l in 0..s {
            let x = a[i * s + l];
            if x != 0.0 {
                for j in 0..t {
                    c[i * t + j] += x * b[l * t + j];
                }
            }
        }
    }
    c
}

pub fn transpose(a: &[f64], r: usize, c: usize) -> Vec<f64> {
    let mut t = vec![0.0; r * c];
    for i in 0..r {
        for j in 0..c {
            t[j * r + i] = a[i * c + j];
        }
    }
    t
}

/// `Hᵀ A H` by explicit matrix products.
pub fn dense_coarsen(n: usize, a: &[f64], h: &[usize], n_dst: usize) -> Vec<f64> {
    let hm = indicator(h, n_dst);
    let ah = matmul(a, &hm, n, n, n_dst);
    matmul(&transpose(&hm, n, n_dst), &ah, n_dst, n, n_dst)
}

/// Least squares `min ‖A X − B‖_F` via Householder QR, `A` is `m × n` with
/// full column rank.
pub fn lstsq(a: &[f64], b: &[f64], m: usize, n: usize, cols: usize) -> Vec<f64> {
    let mut r = a.to_vec();
    let mut qb = b.to_vec();
    for j in 0..n {
        let norm = (j..m).map(|i| r[i * n + j] * r[i * n + j]).sum::<f64>().sqrt();
        let alpha = if r[j * n + j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (0..m).map(|i| if i < j { 0.0 } else { r[i * n + j] }).collect();
        v[j] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for c in 0..n {
            let dot: f64 = (j..m).map(|i| v[i] * r[i * n + c]).sum();
            for i in j..m {
                r[i * n + c] -= 2.0 * v[i] * dot / vnorm2;
            }
        }
        for c in 0..cols {
            let dot: f64 = (j..m).map(|i| v[i] * qb[i * cols + c]).sum();
            for i in j..m {
                qb[i * cols + c] -= 2.0 * v[i] * dot / vnorm2;
            }
        }
    }
    let mut x = vec![0.0; n * cols];
    for c in 0..cols {
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|l| r[i * n + l] * x[l * cols + c]).sum();
            x[i * cols + c] = (qb[i * cols + c] - s) / r[i * n + i];
        }
    }
    x
}

/// Cyclic Jacobi eigen-decomposition; ascending values, vectors as columns of
/// a row-major `n × n` matrix.
pub fn jacobi_eigen(n: usize, a: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    (0..n).for_each(|i| v[i * n + i] = 1.0);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k * n + p], m[k * n + q]);
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p * n + k], m[q * n + k]);
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    let vals = order.iter().map(|&i| m[i * n + i]).collect();
    let mut vecs = vec![0.0; n * n];
    for (new, &old) in order.iter().enumerate() {
        for r in 0..n {
            vecs[r * n + new] = v[r * n + old];
        }
    }
    (vals, vecs)
}

// ---------------------------------------------------------------------------
// alignment and fusion oracles

/// `‖P Q − P̄‖²_F` with dense matrices.
pub fn alignment_objective(p: &Partition, q: &[f64], pbar: &Partition) -> f64 {
    let n = p.len();
    let (k, kbar) = (p.k(), pbar.k());
    let pq = matmul(&indicator(p.labels(), k), q, n, k, kbar);
    let target = indicator(pbar.labels(), kbar);
    pq.iter().zip(&target).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Minimum of the alignment objective over binary row-stochastic `Q`.
pub fn exhaustive_many_to_one(p: &Partition, pbar: &Partition) -> f64 {
    let (k, kbar) = (p.k(), pbar.k());
    let mut best = f64::INFINITY;
    let total = kbar.pow(k as u32);
    for code in 0..total {
        let mut q = vec![0.0; k * kbar];
        let mut c = code;
        for i in 0..k {
            q[i * kbar + c % kbar] = 1.0;
            c /= kbar;
        }
        best = best.min(alignment_objective(p, &q, pbar));
    }
    best
}

/// All nonnegative integer vectors of length `len` summing to `total`.
fn compositions(total: usize, len: usize) -> Vec<Vec<usize>> {
    if len == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, len - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Optimal integer transport cost with row supplies `k̄`, column demands `k`,
/// by enumerating every integer plan.
pub fn brute_force_transport(k: usize, kbar: usize, cost: &[i64]) -> i64 {
    let rows = compositions(kbar, kbar);
    let mut best = i64::MAX;
    let mut choice = vec![0usize; k];
    loop {
        let mut cols = vec![0usize; kbar];
        let mut c = 0i64;
        for i in 0..k {
            for j in 0..kbar {
                let f = rows[choice[i]][j];
                cols[j] += f;
                c += f as i64 * cost[i * kbar + j];
            }
        }
        if cols.iter().all(|&s| s == k) {
            best = best.min(c);
        }
        let mut i = 0;
        loop {
            if i == k {
                return best;
            }
            choice[i] += 1;
            if choice[i] < rows.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// `Σ_r Σ_ij ‖P_r[:,i] − P̄[:,j]‖² Q_r[i,j]`.
pub fn barycenter_ot_objective(partitions: &[Partition], plans: &[CouplingMatrix], labels: &[usize], kbar: usize) -> f64 {
    let n = labels.len();
    let pbar = indicator(labels, kbar);
    let mut total = 0.0;
    for (p, q) in partitions.iter().zip(plans) {
        let pm = indicator(p.labels(), p.k());
        for i in 0..p.k() {
            for j in 0..kbar {
                let d: f64 = (0..n).map(|u| (pm[u * p.k() + i] - pbar[u * kbar + j]).powi(2)).sum();
                total += d * q.get(i, j);
            }
        }
    }
    total
}

/// `Σ_r ‖P̄ − P_r Q_r‖²_F`.
pub fn barycenter_frobenius_objective(partitions: &[Partition], plans: &[CouplingMatrix], labels: &[usize], kbar: usize) -> f64 {
    let n = labels.len();
    let pbar = indicator(labels, kbar);
    let mut total = 0.0;
    for (p, q) in partitions.iter().zip(plans) {
        let pq = matmul(&indicator(p.labels(), p.k()), q.as_slice(), n, p.k(), kbar);
        total += pq.iter().zip(&pbar).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
    }
    total
}

/// Minimum of `objective` over every label vector in `kbar^N`.
pub fn brute_force_minimum(n: usize, kbar: usize, objective: impl Fn(&[usize]) -> f64) -> f64 {
    let mut best = f64::INFINITY;
    let mut labels = vec![0usize; n];
    for code in 0..kbar.pow(n as u32) {
        let mut c = code;
        for l in labels.iter_mut() {
            *l = c % kbar;
            c /= kbar;
        }
        best = best.min(objective(&labels));
    }
    best
}

/// Objective of a (possibly compacted) update, minimized over the
/// order-preserving embeddings of its `k'` labels into `0..kbar`.
pub fn objective_of_update(update: &Partition, kbar: usize, objective: impl Fn(&[usize]) -> f64) -> f64 {
    let k = update.k();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << kbar) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let targets: Vec<usize> = (0..kbar).filter(|&j| mask & (1 << j) != 0).collect();
        let labels: Vec<usize> = update.labels().iter().map(|&l| targets[l]).collect();
        best = best.min(objective(&labels));
    }
    best
}

// ---------------------------------------------------------------------------
// metric oracles

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

pub fn entropy_direct(sizes: &[usize], n: usize) -> f64 {
    sizes
        .iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / n as f64;
            -p * p.ln()
        })
        .sum()
}

pub fn mi_direct(p: &Partition, q: &Partition) -> f64 {
    let n = p.len() as f64;
    let (a, b) = (p.sizes(), q.sizes());
    let mut mi = 0.0;
    for i in 0..p.k() {
        for j in 0..q.k() {
            let nij = (0..p.len()).filter(|&u| p.label(u) == i && q.label(u) == j).count();
            if nij > 0 {
                let pij = nij as f64 / n;
                mi += pij * (pij / ((a[i] as f64 / n) * (b[j] as f64 / n))).ln();
            }
        }
    }
    mi
}

/// Hypergeometric expectation of MI, summed cell by cell with plain
/// factorials (valid for small `N`).
pub fn emi_direct(p: &Partition, q: &Partition) -> f64 {
    let n = p.len();
    let nf = n as f64;
    let (a, b) = (p.sizes(), q.sizes());
    let mut e = 0.0;
    for &ai in &a {
        for &bj in &b {
            let lo = (ai + bj).saturating_sub(n).max(1);
            for nij in lo..=ai.min(bj) {
                let x = nij as f64;
                let term = x / nf * (nf * x / (ai as f64 * bj as f64)).ln();
                let prob = factorial(ai) * factorial(bj) * factorial(n - ai) * factorial(n - bj)
                    / (factorial(n) * factorial(nij) * factorial(ai - nij) * factorial(bj - nij) * factorial(n + nij - ai - bj));
                e += term * prob;
            }
        }
    }
    e
}

pub fn ami_direct(p: &Partition, q: &Partition) -> f64 {
    let n = p.len();
    let mi = mi_direct(p, q);
    let emi = emi_direct(p, q);
    let h = entropy_direct(&p.sizes(), n).max(entropy_direct(&q.sizes(), n));
    let denom = h - emi;
    if denom.abs() < 1e-12 {
        return if p.same_grouping(q) { 1.0 } else { 0.0 };
    }
    (mi - emi) / denom
}

pub fn modularity_dense(n: usize, a: &[f64], labels: &[usize]) -> f64 {
    let deg: Vec<f64> = (0..n).map(|u| (0..n).map(|v| a[u * n + v]).sum()).collect();
    let two_m: f64 = deg.iter().sum();
    let mut q = 0.0;
    for u in 0..n {
        for v in 0..n {
            if labels[u] == labels[v] {
                q += a[u * n + v] - deg[u] * deg[v] / two_m;
            }
        }
    }
    q / two_m
}

pub fn gncut_dense(n: usize, a: &[f64], labels: &[usize], k: usize) -> f64 {
    let mut total = 0.0;
    for c in 0..k {
        let (mut cut, mut vol) = (0.0, 0.0);
        for u in (0..n).filter(|&u| labels[u] == c) {
            for v in 0..n {
                vol += a[u * n + v];
                if labels[v] != c {
                    cut += a[u * n + v];
                }
            }
        }
        total += cut / vol;
    }
    total / k as f64
}

pub fn dl_direct(n: usize, a: &[f64], labels: &[usize], k: usize) -> f64 {
    let e = dense_coarsen(n, a, labels, k);
    let sizes: Vec<f64> = (0..k).map(|c| labels.iter().filter(|&&l| l == c).count() as f64).collect();
    let edges = a.iter().sum::<f64>() / 2.0;
    let mut s = edges;
    for i in 0..k {
        for j in 0..k {
            let eij = e[i * k + j];
            if eij > 0.0 {
                s -= 0.5 * eij * (eij / (sizes[i] * sizes[j])).ln();
            }
        }
    }
    let h = |x: f64| {
        let xlx = if x > 0.0 { x * x.ln() } else { 0.0 };
        (1.0 + x) * (1.0 + x).ln() - xlx
    };
    let kf = k as f64;
    s + edges * h(kf * (kf + 1.0) / (2.0 * edges)) + n as f64 * kf.ln()
}

/// RSA from scratch: own Laplacian, Jacobi eigenvectors, explicit
/// projection, and a Jacobi solve of the reduced problem. Returns `None`
/// when `λ_k = λ_{k+1}` makes `U_k` ambiguous.
pub fn rsa_direct(n: usize, a: &[f64], h: &[usize], n_dst: usize, k: usize) -> Option<f64> {
    let mut l = vec![0.0; n * n];
    for u in 0..n {
        for v in 0..n {
            if u != v {
                l[u * n + v] = -a[u * n + v];
                l[u * n + u] += a[u * n + v];
            }
        }
    }
    let (vals, vecs) = jacobi_eigen(n, &l);
    if k < n && (vals[k] - vals[k - 1]).abs() < 1e-6 {
        return None;
    }
    let keep: Vec<usize> = (0..k).filter(|&j| vals[j] > 1e-10).collect();
    if keep.is_empty() {
        return Some(0.0);
    }
    let sizes: Vec<f64> = (0..n_dst).map(|c| h.iter().filter(|&&x| x == c).count() as f64).collect();
    // Columns b_j = (I − Π) u_j / sqrt(λ_j).
    let m = keep.len();
    let mut b = vec![0.0; n * m];
    for (c, &j) in keep.iter().enumerate() {
        let mut mean = vec![0.0; n_dst];
        for u in 0..n {
            mean[h[u]] += vecs[u * n + j] / sizes[h[u]];
        }
        for u in 0..n {
            b[u * m + c] = (vecs[u * n + j] - mean[h[u]]) / vals[j].sqrt();
        }
    }
    let lb = matmul(&l, &b, n, n, m);
    let reduced = matmul(&transpose(&b, n, m), &lb, m, n, m);
    let (rv, _) = jacobi_eigen(m, &reduced);
    Some(rv[m - 1].max(0.0).sqrt())
}

/// Largest `‖x − Πx‖_L / ‖x‖_L` over random unit `x` in the non-null part
/// of `U_k`; a lower bound on RSA.
pub fn rsa_monte_carlo(n: usize, a: &[f64], h: &[usize], n_dst: usize, k: usize, draws: usize, rng: &mut impl Rng) -> f64 {
    let mut l = vec![0.0; n * n];
    for u in 0..n {
        for v in 0..n {
            if u != v {
                l[u * n + v] = -a[u * n + v];
                l[u * n + u] += a[u * n + v];
            }
        }
    }
    let (vals, vecs) = jacobi_eigen(n, &l);
    let keep: Vec<usize> = (0..k).filter(|&j| vals[j] > 1e-10).collect();
    let sizes: Vec<f64> = (0..n_dst).map(|c| h.iter().filter(|&&x| x == c).count() as f64).collect();
    let quad = |x: &[f64]| -> f64 {
        let lx = matmul(&l, x, n, n, 1);
        x.iter().zip(&lx).map(|(a, b)| a * b).sum()
    };
    let mut best = 0.0f64;
    for _ in 0..draws {
        let c: Vec<f64> = keep.iter().map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let mut x = vec![0.0; n];
        for (ci, &j) in c.iter().zip(&keep) {
            for u in 0..n {
                x[u] += ci * vecs[u * n + j];
            }
        }
        let mut mean = vec![0.0; n_dst];
        for u in 0..n {
            mean[h[u]] += x[u] / sizes[h[u]];
        }
        let r: Vec<f64> = (0..n).map(|u| x[u] - mean[h[u]]).collect();
        let den = quad(&x);
        if den > 1e-12 {
            best = best.max((quad(&r).max(0.0) / den).sqrt());
        }
    }
    best
}

// ---------------------------------------------------------------------------
// criterion-level checks, shared with the acceptance harness

pub type Check = Result<String, String>;

fn fail<T>(msg: String) -> Result<T, String> {
    Err(msg)
}

/// Coarsened adjacency vs dense `HᵀAH` on random graphs with `n ≤ 8`.
pub fn check_coarsen_vs_dense(cases: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    for case in 0..cases {
        let n = rng.random_range(1..=8);
        let edges = random_edges(&mut rng, n, true);
        let g = WeightedGraph::from_edges(n, &edges).map_err(|e| e.to_string())?;
        let n_dst = rng.random_range(1..=n);
        let h = random_surjection(&mut rng, n, n_dst);
        let table = CoarseningTable::new(h.clone(), n_dst).map_err(|e| e.to_string())?;
        let got = g.coarsen(&table).map_err(|e| e.to_string())?.to_dense();
        let want = dense_coarsen(n, &dense_adjacency(n, &edges), &h, n_dst);
        if got != want {
            return fail(format!("case {case}: n={n} h={h:?}: got {got:?}, want {want:?}"));
        }
    }
    Ok(format!("{cases} graphs exact"))
}

pub fn check_lin_reg(cases: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let mut worst = 0.0f64;
    for case in 0..cases {
        let n = rng.random_range(2..=12);
        let p = random_partition(&mut rng, n, 4);
        let pbar = random_partition(&mut rng, n, 4);
        let q = lin_reg_align(&p, &pbar).map_err(|e| e.to_string())?;
        let want = lstsq(&indicator(p.labels(), p.k()), &indicator(pbar.labels(), pbar.k()), n, p.k(), pbar.k());
        let err = q.as_slice().iter().zip(&want).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        worst = worst.max(err);
        if err > 1e-8 {
            return fail(format!("case {case}: max deviation {err:e}"));
        }
    }
    Ok(format!("{cases} instances, max deviation {worst:.1e}"))
}

/// All partitions with `N ≤ 6`, `k, k̄ ≤ 3` drawn at random.
pub fn check_many_to_one(cases: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    for case in 0..cases {
        let n = rng.random_range(1..=6);
        let p = random_partition(&mut rng, n, 3);
        let pbar = random_partition(&mut rng, n, 3);
        let q = many_to_one_align(&p, &pbar).map_err(|e| e.to_string())?;
        let got = alignment_objective(&p, q.as_slice(), &pbar);
        let want = exhaustive_many_to_one(&p, &pbar);
        if got != want {
            return fail(format!("case {case}: objective {got} vs exhaustive {want}"));
        }
    }
    Ok(format!("{cases} instances exact"))
}

/// Exact transport plans vs integer-plan enumeration for `k, k̄ ≤ 3`.
pub fn check_ot_exact(cases: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    for case in 0..cases {
        let n = rng.random_range(1..=9);
        let p = random_partition(&mut rng, n, 3);
        let pbar = random_partition(&mut rng, n, 3);
        let (cost, plan) = ot_distance_and_plan(&p, &pbar).map_err(|e| e.to_string())?;
        let t = contingency(&p, &pbar).map_err(|e| e.to_string())?;
        let (k, kbar) = (p.k(), pbar.k());
        let c2: Vec<i64> = (0..k * kbar)
            .map(|c| {
                let (i, j) = (c / kbar, c % kbar);
                (t.row_sizes()[i] + t.col_sizes()[j]) as i64 - 2 * t.get(i, j) as i64
            })
            .collect();
        let want = brute_force_transport(k, kbar, &c2) as f64 / (k * kbar) as f64;
        if cost != want || plan.marginal_error() > 1e-12 {
            return fail(format!("case {case}: cost {cost} vs {want}, marginal error {:e}", plan.marginal_error()));
        }
    }
    Ok(format!("{cases} instances exact"))
}

/// Majority-vote update vs brute-force minimization over all `P̄` (`N ≤ 6`,
/// `k̄ ≤ 2`), for OT plans (transport objective) and least-squares plans
/// (Frobenius objective).
pub fn check_majority_vote(cases: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let exec = Executor::sequential();
    for case in 0..cases {
        let n = rng.random_range(1..=6);
        let r = rng.random_range(1..=3);
        let partitions: Vec<Partition> = (0..r).map(|_| random_partition(&mut rng, n, 3)).collect();
        let reference = random_partition(&mut rng, n, 2);
        let kbar = reference.k();
        let ot: Vec<CouplingMatrix> = partitions
            .iter()
            .map(|p| ot_distance_and_plan(p, &reference).map(|x| x.1))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let lr: Vec<CouplingMatrix> = partitions
            .iter()
            .map(|p| lin_reg_align(p, &reference))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for (name, plans) in [("ot", &ot), ("lin-reg", &lr)] {
            let objective = |labels: &[usize]| {
                if name == "ot" {
                    barycenter_ot_objective(&partitions, plans, labels, kbar)
                } else {
                    barycenter_frobenius_objective(&partitions, plans, labels, kbar)
                }
            };
            let update = majority_vote_update(&partitions, plans, kbar, &exec).map_err(|e| e.to_string())?;
            let got = objective_of_update(&update, kbar, objective);
            let want = brute_force_minimum(n, kbar, objective);
            if (got - want).abs() > 1e-12 * want.abs().max(1.0) {
                return fail(format!("case {case} ({name}): objective {got} vs brute force {want}"));
            }
        }
    }
    Ok(format!("{cases} instances, both plan families"))
}

/// Primal/dual gap and marginals of quad-ot, with primal and dual values
/// recomputed here from the returned plan and multipliers.
pub fn check_quad_ot(cases: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let mut worst = 0.0f64;
    for case in 0..cases {
        let n = rng.random_range(2..=60);
        let p = random_partition(&mut rng, n, 6);
        let pbar = random_partition(&mut rng, n, 6);
        let t = contingency(&p, &pbar).map_err(|e| e.to_string())?;
        let sol = quad_ot_solve(&t).map_err(|e| format!("case {case}: {e}"))?;
        let (k, kbar) = (p.k(), pbar.k());
        let sizes = p.sizes();
        let mut primal = 0.0;
        for i in 0..k {
            for j in 0..kbar {
                let q = sol.plan.get(i, j);
                primal += sizes[i] as f64 * q * q - 2.0 * t.get(i, j) as f64 * q;
            }
        }
        let mut dual = sol.mu.iter().sum::<f64>() / k as f64 + sol.nu.iter().sum::<f64>() / kbar as f64;
        for i in 0..k {
            for j in 0..kbar {
                let x = (sol.mu[i] + sol.nu[j] + 2.0 * t.get(i, j) as f64).max(0.0);
                dual -= 0.25 * x * x / sizes[i] as f64;
            }
        }
        let gap = primal - dual;
        let marg = sol.plan.marginal_error();
        worst = worst.max(gap.abs());
        if gap.abs() > 1e-6 || marg > 1e-6 || sol.plan.as_slice().iter().any(|&x| x < 0.0) {
            return fail(format!("case {case}: gap {gap:e}, marginal error {marg:e}"));
        }
    }
    Ok(format!("{cases} instances, max |gap| {worst:.1e}"))
}

/// AMI, MI, EMI, modularity, gnCut, DL and RSA against direct formulas.
pub fn check_metrics(cases: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let mut worst = 0.0f64;
    let mut rsa_cases = 0;
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-10 * b.abs().max(1.0);
    for case in 0..cases {
        let n = rng.random_range(2..=8);
        let p = random_partition(&mut rng, n, 4);
        let q = random_partition(&mut rng, n, 4);
        let t = contingency(&p, &q).map_err(|e| e.to_string())?;
        let pairs = [
            ("mi", mutual_information(&t), mi_direct(&p, &q)),
            ("emi", expected_mutual_information(&t), emi_direct(&p, &q)),
            ("ami", ami(&p, &q).map_err(|e| e.to_string())?, ami_direct(&p, &q)),
        ];
        for (name, got, want) in pairs {
            worst = worst.max((got - want).abs());
            if !close(got, want) {
                return fail(format!("case {case}: {name} {got} vs {want}"));
            }
        }

        let edges = random_edges(&mut rng, n, true);
        if edges.is_empty() {
            continue;
        }
        let g = WeightedGraph::from_edges(n, &edges).map_err(|e| e.to_string())?;
        let a = dense_adjacency(n, &edges);
        let mq = modularity(&g, &p).map_err(|e| e.to_string())?;
        let want = modularity_dense(n, &a, p.labels());
        worst = worst.max((mq - want).abs());
        if !close(mq, want) {
            return fail(format!("case {case}: modularity {mq} vs {want}"));
        }
        let vol_ok = (0..p.k()).all(|c| (0..n).filter(|&u| p.label(u) == c).any(|u| g.degree(u) > 0.0));
        if vol_ok {
            let got = gncut(&g, &p).map_err(|e| e.to_string())?;
            let want = gncut_dense(n, &a, p.labels(), p.k());
            worst = worst.max((got - want).abs());
            if !close(got, want) {
                return fail(format!("case {case}: gncut {got} vs {want}"));
            }
        }
        let got = description_length(&g, &p).map_err(|e| e.to_string())?;
        let want = dl_direct(n, &a, p.labels(), p.k());
        worst = worst.max((got - want).abs());
        if !close(got, want) {
            return fail(format!("case {case}: dl {got} vs {want}"));
        }

        let plain: Vec<_> = edges.iter().copied().filter(|e| e.0 != e.1).collect();
        if plain.is_empty() {
            continue;
        }
        let g0 = WeightedGraph::from_edges(n, &plain).map_err(|e| e.to_string())?;
        let a0 = dense_adjacency(n, &plain);
        let k = rng.random_range(1..=n);
        let h = p.labels();
        if let Some(want) = rsa_direct(n, &a0, h, p.k(), k) {
            let table = CoarseningTable::new(h.to_vec(), p.k()).map_err(|e| e.to_string())?;
            let got = rsa(&g0, &table, k).map_err(|e| e.to_string())?;
            if (got - want).abs() > 1e-8 * want.max(1.0) {
                return fail(format!("case {case}: rsa {got} vs {want}"));
            }
            let lower = rsa_monte_carlo(n, &a0, h, p.k(), k, 200, &mut rng);
            if lower > got + 1e-6 {
                return fail(format!("case {case}: sampled ratio {lower} exceeds rsa {got}"));
            }
            rsa_cases += 1;
        }
    }
    Ok(format!("{cases} instances ({rsa_cases} with RSA), max deviation {worst:.1e}"))
}
