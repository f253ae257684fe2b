//! Graph statistics: components, distances, clustering, triangles, Euler
//! characteristic, degrees.
//!
//! Distances are taken inside the largest component only. Components of up to
//! [`EXACT_BFS_LIMIT`] vertices get a BFS from every vertex; larger ones are
//! estimated from [`SAMPLED_SOURCES`] seeded sources, and the report records
//! how many sources were used.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphcore::SimpleGraph;

pub const EXACT_BFS_LIMIT: usize = 1 << 16;
pub const SAMPLED_SOURCES: usize = 2048;
const SAMPLE_SEED: u64 = 0x5_eed0_fb75;

/// Neumaier's compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    pub count: usize,
    /// Component id per vertex, numbered in order of each component's lowest vertex.
    pub labels: Vec<u32>,
    /// Sizes indexed by component id.
    pub sizes: Vec<usize>,
}

impl Components {
    /// Id of the largest component; ties go to the lower id.
    pub fn largest(&self) -> Option<u32> {
        let max = *self.sizes.iter().max()?;
        self.sizes.iter().position(|&s| s == max).map(|i| i as u32)
    }

    pub fn sizes_descending(&self) -> Vec<usize> {
        let mut s = self.sizes.clone();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }

    pub fn is_connected(&self) -> bool {
        self.count == 1
    }
}

pub fn components(g: &SimpleGraph) -> Components {
    let n = g.vertex_count();
    let mut labels = vec![u32::MAX; n];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for root in 0..n {
        if labels[root] != u32::MAX {
            continue;
        }
        let id = sizes.len() as u32;
        labels[root] = id;
        stack.push(root as u32);
        let mut size = 0;
        while let Some(v) = stack.pop() {
            size += 1;
            for &w in g.adj(v as usize) {
                if labels[w as usize] == u32::MAX {
                    labels[w as usize] = id;
                    stack.push(w);
                }
            }
        }
        sizes.push(size);
    }
    Components {
        count: sizes.len(),
        labels,
        sizes,
    }
}

pub fn is_connected(g: &SimpleGraph) -> bool {
    components(g).is_connected()
}

/// BFS from `src`; returns (eccentricity, sum of distances, vertices reached).
fn bfs(g: &SimpleGraph, src: u32, dist: &mut [u32], queue: &mut Vec<u32>) -> (u32, u64, usize) {
    queue.clear();
    queue.push(src);
    dist[src as usize] = 0;
    let mut head = 0;
    let mut total = 0u64;
    let mut ecc = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        let d = dist[v as usize];
        total += u64::from(d);
        ecc = ecc.max(d);
        for &w in g.adj(v as usize) {
            if dist[w as usize] == u32::MAX {
                dist[w as usize] = d + 1;
                queue.push(w);
            }
        }
    }
    for &v in queue.iter() {
        dist[v as usize] = u32::MAX;
    }
    (ecc, total, queue.len())
}

/// Eccentricity of `v` within its own component.
pub fn eccentricity(g: &SimpleGraph, v: usize) -> Result<u32> {
    g.neighbors(v)?;
    let mut dist = vec![u32::MAX; g.vertex_count()];
    Ok(bfs(g, v as u32, &mut dist, &mut Vec::new()).0)
}

/// Distance statistics of the largest component.
#[derive(Debug, Clone, PartialEq)]
pub struct PathStats {
    pub diameter: u32,
    /// Mean distance over unordered vertex pairs; `None` below two vertices.
    pub mu: Option<f64>,
    pub component_size: usize,
    /// BFS sources used; equals `component_size` when exact.
    pub sources: usize,
}

impl PathStats {
    pub fn is_exact(&self) -> bool {
        self.sources == self.component_size
    }
}

pub fn path_stats(g: &SimpleGraph) -> PathStats {
    path_stats_with(g, &components(g))
}

fn path_stats_with(g: &SimpleGraph, comps: &Components) -> PathStats {
    let Some(big) = comps.largest() else {
        return PathStats {
            diameter: 0,
            mu: None,
            component_size: 0,
            sources: 0,
        };
    };
    let members: Vec<u32> = (0..g.vertex_count() as u32)
        .filter(|&v| comps.labels[v as usize] == big)
        .collect();
    let size = members.len();
    let sources: Vec<u32> = if size <= EXACT_BFS_LIMIT {
        members
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
        let mut picked: Vec<u32> = sample(&mut rng, size, SAMPLED_SOURCES)
            .into_iter()
            .map(|i| members[i])
            .collect();
        picked.sort_unstable();
        picked
    };
    let n = g.vertex_count();
    let (ecc, total) = sources
        .par_iter()
        .map_init(
            || (vec![u32::MAX; n], Vec::new()),
            |(dist, queue), &s| {
                let (e, t, _) = bfs(g, s, dist, queue);
                (e, t)
            },
        )
        .reduce(|| (0, 0), |a, b| (a.0.max(b.0), a.1 + b.1));
    let mu = (size >= 2).then(|| total as f64 / (sources.len() as f64 * (size - 1) as f64));
    PathStats {
        diameter: ecc,
        mu,
        component_size: size,
        sources: sources.len(),
    }
}

/// Maximum eccentricity over the largest component.
pub fn diameter(g: &SimpleGraph) -> u32 {
    path_stats(g).diameter
}

/// Mean shortest-path length over pairs in the largest component.
pub fn mean_path_length(g: &SimpleGraph) -> Option<f64> {
    path_stats(g).mu
}

/// Edges go from lower to higher (degree, id) rank; each triangle is then
/// found exactly once from its lowest-ranked vertex.
fn forward_adjacency(g: &SimpleGraph) -> Vec<Vec<u32>> {
    let rank = |v: u32| (g.degree(v as usize), v);
    (0..g.vertex_count())
        .map(|v| {
            let rv = rank(v as u32);
            let mut out: Vec<u32> = g.adj(v).iter().copied().filter(|&w| rank(w) > rv).collect();
            out.sort_unstable();
            out
        })
        .collect()
}

fn intersect_into(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

/// Number of triangles through each vertex.
pub fn triangles_per_vertex(g: &SimpleGraph) -> Vec<u64> {
    let fwd = forward_adjacency(g);
    let counts: Vec<AtomicU64> = (0..g.vertex_count()).map(|_| AtomicU64::new(0)).collect();
    (0..g.vertex_count())
        .into_par_iter()
        .for_each_init(Vec::new, |common, u| {
            for &v in &fwd[u] {
                intersect_into(&fwd[u], &fwd[v as usize], common);
                if common.is_empty() {
                    continue;
                }
                let k = common.len() as u64;
                counts[u].fetch_add(k, Ordering::Relaxed);
                counts[v as usize].fetch_add(k, Ordering::Relaxed);
                for &w in common.iter() {
                    counts[w as usize].fetch_add(1, Ordering::Relaxed);
                }
            }
        });
    counts.into_iter().map(AtomicU64::into_inner).collect()
}

pub fn triangle_count(g: &SimpleGraph) -> u64 {
    triangles_per_vertex(g).iter().sum::<u64>() / 3
}

/// Whether the graph contains no 4-clique.
pub fn k4_free(g: &SimpleGraph) -> bool {
    let fwd = forward_adjacency(g);
    (0..g.vertex_count()).into_par_iter().all(|u| {
        let mut common = Vec::new();
        let mut inner = Vec::new();
        for &v in &fwd[u] {
            intersect_into(&fwd[u], &fwd[v as usize], &mut common);
            for &w in &common {
                intersect_into(&fwd[w as usize], &common, &mut inner);
                if !inner.is_empty() {
                    return false;
                }
            }
        }
        true
    })
}

/// `vertices - edges + triangles`; this is the Euler characteristic of the
/// clique complex when the graph has no 4-clique.
pub fn euler_characteristic(g: &SimpleGraph) -> i64 {
    g.vertex_count() as i64 - g.edge_count() as i64 + triangle_count(g) as i64
}

/// Number of paths of length two, i.e. connected triples.
pub fn connected_triples(g: &SimpleGraph) -> u64 {
    (0..g.vertex_count())
        .map(|v| {
            let d = g.degree(v) as u64;
            d * d.saturating_sub(1) / 2
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clustering {
    /// Mean local clustering; vertices of degree below two count as zero.
    pub local: f64,
    /// `3 * triangles / connected triples`.
    pub transitivity: f64,
}

pub fn clustering(g: &SimpleGraph) -> Clustering {
    clustering_from(g, &triangles_per_vertex(g))
}

fn clustering_from(g: &SimpleGraph, tri: &[u64]) -> Clustering {
    let n = g.vertex_count();
    let local_sum: CompensatedSum = (0..n)
        .map(|v| {
            let d = g.degree(v) as f64;
            if d < 2.0 {
                0.0
            } else {
                tri[v] as f64 / (d * (d - 1.0) / 2.0)
            }
        })
        .collect();
    let local = if n == 0 {
        0.0
    } else {
        local_sum.total() / n as f64
    };
    let triples = connected_triples(g);
    let triangles = tri.iter().sum::<u64>() / 3;
    let transitivity = if triples == 0 {
        0.0
    } else {
        3.0 * triangles as f64 / triples as f64
    };
    Clustering {
        local,
        transitivity,
    }
}

/// `-mu / ln(nu)`, defined for `0 < nu < 1`.
pub fn lambda_coefficient(mu: f64, nu: f64) -> Option<f64> {
    (nu > 0.0 && nu < 1.0).then(|| -mu / nu.ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeStats {
    pub mean: f64,
    /// `histogram[d]` counts vertices of degree `d`.
    pub histogram: Vec<usize>,
}

pub fn degree_stats(g: &SimpleGraph) -> DegreeStats {
    let n = g.vertex_count();
    let max = (0..n).map(|v| g.degree(v)).max().unwrap_or(0);
    let mut histogram = vec![0; max + 1];
    for v in 0..n {
        histogram[g.degree(v)] += 1;
    }
    let mean = if n == 0 {
        0.0
    } else {
        2.0 * g.edge_count() as f64 / n as f64
    };
    DegreeStats { mean, histogram }
}

/// Which clustering estimator feeds the length-cluster coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NuEstimator {
    Local,
    #[default]
    Transitivity,
}

impl fmt::Display for NuEstimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NuEstimator::Local => "local",
            NuEstimator::Transitivity => "transitivity",
        })
    }
}

impl FromStr for NuEstimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "local" => Ok(NuEstimator::Local),
            "transitivity" => Ok(NuEstimator::Transitivity),
            other => Err(Error::UnknownName(other.to_string())),
        }
    }
}

impl Clustering {
    pub fn select(&self, which: NuEstimator) -> f64 {
        match which {
            NuEstimator::Local => self.local,
            NuEstimator::Transitivity => self.transitivity,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatsReport {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub component_count: usize,
    pub component_sizes: Vec<usize>,
    pub diameter: u32,
    pub mu: Option<f64>,
    pub nu_local: f64,
    pub nu_transitivity: f64,
    pub nu_estimator: NuEstimator,
    pub lambda: Option<f64>,
    pub triangles: u64,
    pub euler_characteristic: i64,
    pub mean_degree: f64,
    pub degree_histogram: Vec<usize>,
    pub bfs_sources: usize,
}

#[derive(Serialize)]
struct FlatReport<'a> {
    vertices: usize,
    edges: usize,
    components: usize,
    diameter: u32,
    mu: Option<f64>,
    nu_local: f64,
    nu_transitivity: f64,
    lambda: Option<f64>,
    triangles: u64,
    euler_char: i64,
    mean_degree: f64,
    nu_estimator: &'a str,
    largest_component: usize,
    bfs_sources: usize,
}

impl StatsReport {
    /// Flat JSON object with fixed key order; undefined values are `null`.
    pub fn to_json(&self) -> String {
        let estimator = self.nu_estimator.to_string();
        let flat = FlatReport {
            vertices: self.vertex_count,
            edges: self.edge_count,
            components: self.component_count,
            diameter: self.diameter,
            mu: self.mu,
            nu_local: self.nu_local,
            nu_transitivity: self.nu_transitivity,
            lambda: self.lambda,
            triangles: self.triangles,
            euler_char: self.euler_characteristic,
            mean_degree: self.mean_degree,
            nu_estimator: &estimator,
            largest_component: self.component_sizes.first().copied().unwrap_or(0),
            bfs_sources: self.bfs_sources,
        };
        let mut s = serde_json::to_string_pretty(&flat).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn full_report(g: &SimpleGraph) -> StatsReport {
    full_report_with(g, NuEstimator::default())
}

pub fn full_report_with(g: &SimpleGraph, estimator: NuEstimator) -> StatsReport {
    let comps = components(g);
    let paths = path_stats_with(g, &comps);
    let tri = triangles_per_vertex(g);
    let triangles = tri.iter().sum::<u64>() / 3;
    let clus = clustering_from(g, &tri);
    let degrees = degree_stats(g);
    let lambda = paths
        .mu
        .and_then(|mu| lambda_coefficient(mu, clus.select(estimator)));
    StatsReport {
        vertex_count: g.vertex_count(),
        edge_count: g.edge_count(),
        component_count: comps.count,
        component_sizes: comps.sizes_descending(),
        diameter: paths.diameter,
        mu: paths.mu,
        nu_local: clus.local,
        nu_transitivity: clus.transitivity,
        nu_estimator: estimator,
        lambda,
        triangles,
        euler_characteristic: g.vertex_count() as i64 - g.edge_count() as i64 + triangles as i64,
        mean_degree: degrees.mean,
        degree_histogram: degrees.histogram,
        bfs_sources: paths.sources,
    }
}
