//! Chimera hardware graph and self-avoiding chain embeddings.
//!
//! Vertex ids decompose as `((row * cells + col) * 2 + side) * 4 + index`.
//! Side 0 vertices couple vertically to the same `(col, side, index)` in the
//! rows above and below; side 1 vertices couple horizontally to the same
//! `(row, side, index)` in neighbouring columns. Within a cell every side-0
//! vertex couples to every side-1 vertex.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{apply_random_gauge, ChainInstance, CouplingKind};
use crate::{seed, Error, Result};

/// Number of unit cells per side of the DW2KQ graph (2048 qubits).
pub const DEFAULT_CELLS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChimeraVertex {
    pub row: usize,
    pub col: usize,
    pub side: usize,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChimeraGraph {
    cells: usize,
}

impl ChimeraGraph {
    pub fn new(cells: usize) -> Result<Self> {
        if cells == 0 {
            return Err(Error::invalid("chimera graph", "need at least one cell"));
        }
        Ok(ChimeraGraph { cells })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn vertex_count(&self) -> usize {
        8 * self.cells * self.cells
    }

    pub fn decompose(&self, v: u32) -> Result<ChimeraVertex> {
        let v = v as usize;
        if v >= self.vertex_count() {
            return Err(Error::domain(format!(
                "vertex {v} out of range for a {0}x{0} Chimera graph",
                self.cells
            )));
        }
        let index = v % 4;
        let side = (v / 4) % 2;
        let cell = v / 8;
        Ok(ChimeraVertex {
            row: cell / self.cells,
            col: cell % self.cells,
            side,
            index,
        })
    }

    pub fn compose(&self, v: ChimeraVertex) -> u32 {
        (((v.row * self.cells + v.col) * 2 + v.side) * 4 + v.index) as u32
    }

    /// Neighbours of `v`, at most six.
    pub fn neighbors(&self, v: u32) -> Result<Vec<u32>> {
        let mut out = Vec::with_capacity(6);
        self.for_each_neighbor(v, |w| out.push(w))?;
        Ok(out)
    }

    fn for_each_neighbor(&self, v: u32, mut f: impl FnMut(u32)) -> Result<()> {
        let cv = self.decompose(v)?;
        let other = 1 - cv.side;
        for k in 0..4 {
            f(self.compose(ChimeraVertex {
                side: other,
                index: k,
                ..cv
            }));
        }
        let n = self.cells;
        if cv.side == 0 {
            if cv.row > 0 {
                f(self.compose(ChimeraVertex { row: cv.row - 1, ..cv }));
            }
            if cv.row + 1 < n {
                f(self.compose(ChimeraVertex { row: cv.row + 1, ..cv }));
            }
        } else {
            if cv.col > 0 {
                f(self.compose(ChimeraVertex { col: cv.col - 1, ..cv }));
            }
            if cv.col + 1 < n {
                f(self.compose(ChimeraVertex { col: cv.col + 1, ..cv }));
            }
        }
        Ok(())
    }

    pub fn degree(&self, v: u32) -> Result<usize> {
        let mut d = 0;
        self.for_each_neighbor(v, |_| d += 1)?;
        Ok(d)
    }

    pub fn is_adjacent(&self, a: u32, b: u32) -> Result<bool> {
        let (ca, cb) = (self.decompose(a)?, self.decompose(b)?);
        let same_cell = ca.row == cb.row && ca.col == cb.col;
        Ok(if same_cell {
            ca.side != cb.side
        } else if ca.side == cb.side && ca.index == cb.index {
            if ca.side == 0 {
                ca.col == cb.col && ca.row.abs_diff(cb.row) == 1
            } else {
                ca.row == cb.row && ca.col.abs_diff(cb.col) == 1
            }
        } else {
            false
        })
    }

    /// 16ℓ² intra-cell couplers plus 8ℓ(ℓ−1) inter-cell couplers.
    pub fn edge_count(&self) -> usize {
        let l = self.cells;
        16 * l * l + 8 * l * (l - 1)
    }

    /// Checks that `path` is a self-avoiding walk on the graph.
    pub fn validate_path(&self, path: &[u32]) -> Result<()> {
        let mut seen = vec![false; self.vertex_count()];
        for (i, &v) in path.iter().enumerate() {
            self.decompose(v)?;
            if std::mem::replace(&mut seen[v as usize], true) {
                return Err(Error::invalid("embedding", format!("vertex {v} repeated at position {i}")));
            }
            if i > 0 && !self.is_adjacent(path[i - 1], v)? {
                return Err(Error::invalid(
                    "embedding",
                    format!("vertices {} and {v} at positions {} and {i} are not coupled", path[i - 1], i - 1),
                ));
            }
        }
        Ok(())
    }
}

/// A generated instance with the generation record needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub id: String,
    pub cells: usize,
    pub length: usize,
    pub coupling: CouplingKind,
    pub vertices: Vec<u32>,
    pub couplings: Vec<i8>,
    pub seed: u64,
    pub attempts: usize,
}

impl InstanceRecord {
    pub fn to_instance(&self) -> Result<ChainInstance> {
        let graph = ChimeraGraph::new(self.cells)?;
        ChainInstance::new(self.id.clone(), self.couplings.clone())?.with_embedding(&graph, self.vertices.clone())
    }
}

/// Grows a self-avoiding random walk of `length` vertices from a uniformly
/// random start, choosing uniformly among unvisited neighbours. A walk that
/// reaches a dead end is discarded and a fresh walk started; the number of
/// walks used is returned with the path.
pub fn self_avoiding_walk<R: Rng>(
    graph: &ChimeraGraph,
    length: usize,
    rng: &mut R,
    max_retries: usize,
) -> Result<(Vec<u32>, usize)> {
    if max_retries == 0 {
        return Err(Error::invalid("walk", "max_retries must be at least 1"));
    }
    if length == 0 {
        return Err(Error::invalid("walk", "length must be positive"));
    }
    let n = graph.vertex_count();
    let mut visited = vec![false; n];
    let mut path: Vec<u32> = Vec::with_capacity(length);
    let mut options: Vec<u32> = Vec::with_capacity(6);
    if length <= n {
        for attempt in 1..=max_retries {
            for &v in &path {
                visited[v as usize] = false;
            }
            path.clear();
            let start = rng.random_range(0..n) as u32;
            visited[start as usize] = true;
            path.push(start);
            while path.len() < length {
                let tip = *path.last().expect("non-empty");
                options.clear();
                graph.for_each_neighbor(tip, |w| {
                    if !visited[w as usize] {
                        options.push(w);
                    }
                })?;
                if options.is_empty() {
                    break;
                }
                let next = options[rng.random_range(0..options.len())];
                visited[next as usize] = true;
                path.push(next);
            }
            if path.len() == length {
                return Ok((path, attempt));
            }
        }
    }
    Err(Error::GenerationFailed {
        length,
        attempts: max_retries,
    })
}

/// Generates one embedded chain. Couplings follow `coupling`; for
/// [`CouplingKind::Gauge`] a ferromagnetic chain is gauge-flipped with a seed
/// split from `walk_seed`.
pub fn saw_chain(
    graph: &ChimeraGraph,
    length: usize,
    coupling: CouplingKind,
    walk_seed: u64,
    max_retries: usize,
) -> Result<(ChainInstance, usize)> {
    let mut rng = seed::rng(walk_seed);
    let (vertices, attempts) = self_avoiding_walk(graph, length, &mut rng, max_retries)?;
    let id = format!("saw-{walk_seed:016x}");
    let base = match coupling {
        CouplingKind::Antiferro => ChainInstance::new(id, vec![1; length - 1])?,
        CouplingKind::Ferro | CouplingKind::Gauge => ChainInstance::new(id, vec![-1; length - 1])?,
    };
    let inst = if coupling == CouplingKind::Gauge {
        apply_random_gauge(&base, seed::split(walk_seed, 0)).0
    } else {
        base
    };
    Ok((inst.with_embedding(graph, vertices)?, attempts))
}

/// Generates `count` independent instances. Instance i uses the walk seed
/// `seed::split(master_seed, i)`.
pub fn generate_instances(
    graph: &ChimeraGraph,
    length: usize,
    count: usize,
    coupling: CouplingKind,
    master_seed: u64,
    max_retries: usize,
) -> Result<Vec<InstanceRecord>> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let walk_seed = seed::split(master_seed, i as u64);
            let (inst, attempts) = saw_chain(graph, length, coupling, walk_seed, max_retries)?;
            let emb = inst.embedding().expect("embedded");
            Ok(InstanceRecord {
                id: format!("chain-{i}"),
                cells: graph.cells(),
                length,
                coupling,
                vertices: emb.vertices.clone(),
                couplings: inst.couplings().to_vec(),
                seed: walk_seed,
                attempts,
            })
        })
        .collect()
}

/// Shared handles for generated instances.
pub fn records_to_instances(records: &[InstanceRecord]) -> Result<Vec<Arc<ChainInstance>>> {
    records.iter().map(|r| r.to_instance().map(Arc::new)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_adjacent(g: &ChimeraGraph, a: u32, b: u32) -> bool {
        let (x, y) = (g.decompose(a).unwrap(), g.decompose(b).unwrap());
        if a == b {
            return false;
        }
        let intra = x.row == y.row && x.col == y.col && x.side != y.side;
        let vertical = x.side == 0
            && y.side == 0
            && x.index == y.index
            && x.col == y.col
            && (x.row as i64 - y.row as i64).abs() == 1;
        let horizontal = x.side == 1
            && y.side == 1
            && x.index == y.index
            && x.row == y.row
            && (x.col as i64 - y.col as i64).abs() == 1;
        intra || vertical || horizontal
    }

    #[test]
    fn adjacency_matches_brute_force_for_small_graphs() {
        for cells in 1..=3 {
            let g = ChimeraGraph::new(cells).unwrap();
            let n = g.vertex_count() as u32;
            let mut edges = 0;
            for a in 0..n {
                let nbrs = g.neighbors(a).unwrap();
                for b in 0..n {
                    let brute = brute_adjacent(&g, a, b);
                    assert_eq!(nbrs.contains(&b), brute, "cells={cells} a={a} b={b}");
                    assert_eq!(g.is_adjacent(a, b).unwrap(), brute);
                    if brute {
                        assert!(g.neighbors(b).unwrap().contains(&a));
                    }
                    if brute && a < b {
                        edges += 1;
                    }
                }
            }
            assert_eq!(edges, g.edge_count());
        }
    }

    #[test]
    fn degrees() {
        let g = ChimeraGraph::new(16).unwrap();
        let interior = g.compose(ChimeraVertex { row: 5, col: 7, side: 0, index: 2 });
        assert_eq!(g.degree(interior).unwrap(), 6);
        let corner = g.compose(ChimeraVertex { row: 0, col: 0, side: 0, index: 0 });
        assert_eq!(g.degree(corner).unwrap(), 5);
        let single = ChimeraGraph::new(1).unwrap();
        for v in 0..8 {
            assert_eq!(single.degree(v).unwrap(), 4);
        }
        assert!(matches!(g.degree(2048), Err(Error::Domain(_))));
        assert!((0..2048).all(|v| g.degree(v).unwrap() <= 6));
    }

    #[test]
    fn decompose_compose_round_trip() {
        let g = ChimeraGraph::new(4).unwrap();
        for v in 0..g.vertex_count() as u32 {
            assert_eq!(g.compose(g.decompose(v).unwrap()), v);
        }
    }

    #[test]
    fn shortest_walk_is_an_edge() {
        let g = ChimeraGraph::new(16).unwrap();
        for s in 0..20 {
            let (inst, _) = saw_chain(&g, 2, CouplingKind::Antiferro, s, 10).unwrap();
            let v = &inst.embedding().unwrap().vertices;
            assert!(g.is_adjacent(v[0], v[1]).unwrap());
        }
    }

    #[test]
    fn pigeonhole_failure() {
        let g = ChimeraGraph::new(1).unwrap();
        match saw_chain(&g, 9, CouplingKind::Ferro, 1, 50) {
            Err(Error::GenerationFailed { attempts, .. }) => assert_eq!(attempts, 50),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn full_scale_chain_is_valid_and_deterministic() {
        let g = ChimeraGraph::new(16).unwrap();
        let (inst, attempts) = saw_chain(&g, 800, CouplingKind::Gauge, 77, 100_000).unwrap();
        let v = &inst.embedding().unwrap().vertices;
        assert_eq!(v.len(), 800);
        g.validate_path(v).unwrap();
        let again = saw_chain(&g, 800, CouplingKind::Gauge, 77, 100_000).unwrap();
        assert_eq!(again.0, inst);
        assert_eq!(again.1, attempts);
        assert_eq!(inst.couplings().len(), 799);
    }

    #[test]
    fn validate_path_rejects_bad_paths() {
        let g = ChimeraGraph::new(2).unwrap();
        assert!(g.validate_path(&[0, 4, 0]).is_err());
        assert!(g.validate_path(&[0, 1]).is_err());
        assert!(g.validate_path(&[0, 4, 1]).is_ok());
    }
}
