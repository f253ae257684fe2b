//! Independent reference implementations used as test oracles. None of these
//! call into the library's graph construction or metrics code.

#![allow(dead_code)]

use std::collections::BTreeSet;

use dyngraph::mapfamily::apply;
use dyngraph::{MapFamily, SimpleGraph};

/// Edge set built state by state through `apply` and `index_of`, bypassing
/// the compiled index arithmetic.
pub fn slow_edges(family: &MapFamily) -> BTreeSet<(u32, u32)> {
    let space = family.space();
    let mut edges = BTreeSet::new();
    for (x, state) in space.enumerate().enumerate() {
        for m in family.maps() {
            if let Some(image) = apply(m, space, &state).unwrap() {
                let y = space.index_of(&image).unwrap() as u32;
                let x = x as u32;
                if x != y {
                    edges.insert((x.min(y), x.max(y)));
                }
            }
        }
    }
    edges
}

pub fn edge_set(g: &SimpleGraph) -> BTreeSet<(u32, u32)> {
    g.edges().collect()
}

/// Union-find with path halving; returns a canonical label per vertex (the
/// smallest vertex of its class) and the class count.
pub fn union_find(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> (Vec<usize>, usize) {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (u, v) in edges {
        let (a, b) = (find(&mut parent, u as usize), find(&mut parent, v as usize));
        if a != b {
            // keep the smaller vertex as root so labels are canonical
            let (lo, hi) = (a.min(b), a.max(b));
            parent[hi] = lo;
        }
    }
    let labels: Vec<usize> = (0..n).map(|x| find(&mut parent, x)).collect();
    let count = labels.iter().enumerate().filter(|&(i, &l)| i == l).count();
    (labels, count)
}

/// True if two labelings induce the same partition.
pub fn same_partition(a: &[u32], b: &[usize]) -> bool {
    use std::collections::HashMap;
    let mut fwd: HashMap<u32, usize> = HashMap::new();
    let mut back: HashMap<usize, u32> = HashMap::new();
    a.iter()
        .zip(b)
        .all(|(&x, &y)| *fwd.entry(x).or_insert(y) == y && *back.entry(y).or_insert(x) == x)
}

/// Dense adjacency matrix.
pub fn matrix(n: usize, edges: &BTreeSet<(u32, u32)>) -> Vec<Vec<bool>> {
    let mut m = vec![vec![false; n]; n];
    for &(u, v) in edges {
        m[u as usize][v as usize] = true;
        m[v as usize][u as usize] = true;
    }
    m
}

/// Counts `u < v < w` with all three pairs adjacent.
#[allow(clippy::needless_range_loop)]
pub fn brute_triangles(n: usize, edges: &BTreeSet<(u32, u32)>) -> u64 {
    let m = matrix(n, edges);
    let mut count = 0;
    for u in 0..n {
        for v in u + 1..n {
            if !m[u][v] {
                continue;
            }
            for w in v + 1..n {
                if m[u][w] && m[v][w] {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Floyd-Warshall distances; `u32::MAX` marks unreachable pairs.
pub fn all_distances(n: usize, edges: &BTreeSet<(u32, u32)>) -> Vec<Vec<u32>> {
    let inf = u32::MAX;
    let mut d = vec![vec![inf; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(u, v) in edges {
        d[u as usize][v as usize] = 1;
        d[v as usize][u as usize] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            if d[i][k] == inf {
                continue;
            }
            for j in 0..n {
                if d[k][j] != inf && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

pub fn sieve(limit: usize) -> Vec<bool> {
    let mut is = vec![true; limit + 1];
    is[0] = false;
    if limit >= 1 {
        is[1] = false;
    }
    let mut i = 2;
    while i * i <= limit {
        if is[i] {
            let mut j = i * i;
            while j <= limit {
                is[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    is
}

pub fn trial_division_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        while n.is_multiple_of(d) {
            out.push(d);
            n /= d;
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn smooth_by_division(mut n: u64, primes: &[u64]) -> bool {
    for &p in primes {
        while n.is_multiple_of(p) {
            n /= p;
        }
    }
    n == 1
}

/// Multiplicative order of `a` modulo prime `p` by repeated multiplication.
pub fn naive_order(a: u64, p: u64) -> u64 {
    let mut x = a % p;
    let mut k = 1;
    while x != 1 {
        x = x * a % p;
        k += 1;
        if k > p {
            return 0;
        }
    }
    k
}
