//! Simple graphs induced by map families, stored as compressed sorted
//! adjacency, plus edge-list and DOT export.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mapfamily::{format_map_list, CompiledMap, MapFamily, NO_IMAGE};
use crate::ringspace::{StateSpace, MAX_STATES};

/// Undirected simple graph on vertices `0..vertex_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl SimpleGraph {
    /// Builds a graph from arbitrary vertex pairs. Loops are dropped and
    /// duplicates merged.
    pub fn from_edges(vertex_count: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut canon: Vec<(u32, u32)> = edges
            .into_iter()
            .filter(|(u, v)| u != v)
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        assert!(
            canon.iter().all(|&(_, v)| (v as usize) < vertex_count),
            "edge endpoint out of range"
        );
        canon.par_sort_unstable();
        canon.dedup();
        Self::from_canonical(vertex_count, &canon)
    }

    /// `edges` must be sorted, deduplicated, and have `u < v`.
    fn from_canonical(vertex_count: usize, edges: &[(u32, u32)]) -> Self {
        let mut degree = vec![0usize; vertex_count + 1];
        for &(u, v) in edges {
            degree[u as usize + 1] += 1;
            degree[v as usize + 1] += 1;
        }
        for i in 0..vertex_count {
            degree[i + 1] += degree[i];
        }
        let offsets = degree;
        let mut cursor = offsets.clone();
        let mut neighbors = vec![0u32; edges.len() * 2];
        // Scanning in (u, v) order fills each list in ascending order: the
        // lower neighbours of v arrive sorted by u, all before v's own row,
        // whose upper neighbours arrive sorted by v.
        for &(u, v) in edges {
            neighbors[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        for &(u, v) in edges {
            neighbors[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
        }
        SimpleGraph { offsets, neighbors }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Sorted neighbours of `v`.
    pub fn neighbors(&self, v: usize) -> Result<&[u32]> {
        if v >= self.vertex_count() {
            return Err(Error::OutOfRange {
                index: v as u64,
                size: self.vertex_count() as u64,
            });
        }
        Ok(self.adj(v))
    }

    #[inline]
    pub(crate) fn adj(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Edges `(u, v)` with `u < v` in ascending lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.vertex_count()).flat_map(move |u| {
            self.adj(u)
                .iter()
                .filter(move |&&v| v as usize > u)
                .map(move |&v| (u as u32, v))
        })
    }

    /// One `u v` line per edge, newline-terminated.
    pub fn export_edge_list(&self) -> String {
        let mut out = String::with_capacity(self.edge_count() * 12);
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }

    /// Undirected DOT document; `labels[i]` names vertex `i` when given.
    pub fn export_dot(&self, labels: Option<&[String]>) -> String {
        let mut out = String::from("graph G {\n");
        for v in 0..self.vertex_count() {
            match labels.and_then(|l| l.get(v)) {
                Some(label) => writeln!(out, "  {v} [label=\"{}\"];", label.replace('"', "\\\"")),
                None => writeln!(out, "  {v};"),
            }
            .unwrap();
        }
        for (u, v) in self.edges() {
            writeln!(out, "  {u} -- {v};").unwrap();
        }
        out.push_str("}\n");
        out
    }
}

/// A space with its family and a textual record of where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSpec {
    pub family: MapFamily,
    pub provenance: String,
}

impl GraphSpec {
    pub fn new(family: MapFamily) -> Self {
        let provenance = format!(
            "space={} maps={}",
            family.space(),
            format_map_list(family.maps())
        );
        GraphSpec { family, provenance }
    }

    pub fn space(&self) -> &StateSpace {
        self.family.space()
    }

    /// State labels in index order, for labelled exports.
    pub fn labels(&self) -> Vec<String> {
        self.space().enumerate().map(|s| s.to_string()).collect()
    }
}

/// Builds the graph joining `x` and `T(x)` for every map `T` in the family.
pub fn build_graph(spec: &GraphSpec) -> Result<SimpleGraph> {
    let space = spec.space();
    if space.size() > MAX_STATES {
        return Err(Error::SpaceTooLarge {
            size: space.size() as u128,
            cap: MAX_STATES,
        });
    }
    let maps = spec.family.compile()?;
    Ok(build_from_maps(space.size() as usize, &maps))
}

fn build_from_maps(vertex_count: usize, maps: &[CompiledMap]) -> SimpleGraph {
    let mut edges: Vec<(u32, u32)> = (0..vertex_count as u64)
        .into_par_iter()
        .flat_map_iter(|x| {
            maps.iter().filter_map(move |m| {
                let y = m.image(x)?;
                (y != x).then(|| (x.min(y) as u32, x.max(y) as u32))
            })
        })
        .collect();
    edges.par_sort_unstable();
    edges.dedup();
    SimpleGraph::from_canonical(vertex_count, &edges)
}

/// Builds a graph from precomputed image tables, one per map; entries equal
/// to [`NO_IMAGE`] contribute no edge.
pub fn build_from_images(vertex_count: usize, tables: &[&[u32]]) -> SimpleGraph {
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(vertex_count * tables.len());
    for table in tables {
        assert_eq!(table.len(), vertex_count, "image table length");
        for (x, &y) in table.iter().enumerate() {
            let x = x as u32;
            if y != NO_IMAGE && y != x {
                edges.push((x.min(y), x.max(y)));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    SimpleGraph::from_canonical(vertex_count, &edges)
}
