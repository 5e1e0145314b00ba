//! Edge-list parsing and CSR construction.
//!
//! Input graphs are plain text edge lists: one `src dst [weight]` record per
//! line, `#` starts a comment line, fields are whitespace separated. Vertex
//! ids are dense 0-based 32-bit integers and `vertex_count = 1 + max id seen`,
//! so gaps in the id space simply become isolated vertices. Undirected input
//! materializes both directions of every edge (doubling `edge_count`).
//! Duplicate edges and self-loops are preserved verbatim.
//!
//! [`build_csr`] is a stable two-pass counting sort (count per source, prefix
//! sum, placement), so the out-edges of a vertex keep their input order and
//! total work stays linear in the edge count. The same machinery is reused for
//! in-edge (CSC) layouts by swapping endpoints first.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::VertexId;

/// Errors produced while loading or decoding graphs.
#[derive(Debug, Error)]
pub enum GraphError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: malformed edge record ({reason})")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: vertex id {id} exceeds the 32-bit index capacity")]
    IdOverflow { line: usize, id: u64 },
    #[error("invalid binary graph cache: {0}")]
    BadCache(String),
}

/// Parsed edge list in input order, before any indexing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawEdgeList {
    pub edges: Vec<(VertexId, VertexId)>,
    /// Parallel to `edges` when the input had a third column.
    pub weights: Option<Vec<u32>>,
    pub vertex_count: u32,
    pub directed: bool,
}

impl RawEdgeList {
    /// Build an edge list directly (tests and synthetic generators).
    pub fn from_edges(edges: Vec<(VertexId, VertexId)>, directed: bool) -> Self {
        let vertex_count = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        RawEdgeList {
            edges,
            weights: None,
            vertex_count,
            directed,
        }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Mirror every edge, producing the symmetrized graph used by
    /// undirected-semantics algorithms on directed input.
    pub fn symmetrize(&self) -> RawEdgeList {
        if !self.directed {
            return self.clone();
        }
        let mut edges = Vec::with_capacity(self.edges.len() * 2);
        let mut weights = self
            .weights
            .as_ref()
            .map(|w| Vec::with_capacity(w.len() * 2));
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            edges.push((u, v));
            edges.push((v, u));
            if let (Some(out), Some(src)) = (weights.as_mut(), self.weights.as_ref()) {
                out.push(src[i]);
                out.push(src[i]);
            }
        }
        RawEdgeList {
            edges,
            weights,
            vertex_count: self.vertex_count,
            directed: false,
        }
    }
}

/// Compressed sparse row adjacency: `row_index` has `vertex_count + 1`
/// entries and `column[row_index[v]..row_index[v + 1]]` lists the
/// out-neighbors of `v` in input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsrGraph {
    pub vertex_count: u32,
    pub row_index: Vec<usize>,
    pub column: Vec<VertexId>,
    pub weights: Option<Vec<u32>>,
}

impl CsrGraph {
    pub fn edge_count(&self) -> usize {
        self.column.len()
    }

    pub fn out_degree(&self, v: VertexId) -> u32 {
        (self.row_index[v as usize + 1] - self.row_index[v as usize]) as u32
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.column[self.row_index[v as usize]..self.row_index[v as usize + 1]]
    }
}

/// Element read/write tally for the construction passes, used to assert the
/// linear preprocessing bound.
#[derive(Debug, Default, Clone, Copy)]
pub struct BuildOps {
    pub element_reads: u64,
    pub element_writes: u64,
}

impl BuildOps {
    pub fn total(&self) -> u64 {
        self.element_reads + self.element_writes
    }
}

/// Parse a text edge list from a file path. See the module docs for the
/// accepted format.
pub fn parse_edge_list(path: impl AsRef<Path>, directed: bool) -> Result<RawEdgeList, GraphError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| GraphError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_edge_list_reader(BufReader::new(file), directed)
}

/// Parse a text edge list from any buffered reader.
pub fn parse_edge_list_reader(
    reader: impl BufRead,
    directed: bool,
) -> Result<RawEdgeList, GraphError> {
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    let mut weights: Option<Vec<u32>> = None;
    let mut max_id: u64 = 0;
    let mut saw_edge = false;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| GraphError::Io {
            path: "<reader>".to_string(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_ascii_whitespace();
        let src = parse_id(fields.next(), line_no, "missing source id")?;
        let dst = parse_id(fields.next(), line_no, "missing destination id")?;
        let weight_field = fields.next();
        if fields.next().is_some() {
            return Err(GraphError::MalformedLine {
                line: line_no,
                reason: "more than three fields".to_string(),
            });
        }

        // The first data line fixes the record arity for the whole file.
        if !saw_edge {
            saw_edge = true;
            if weight_field.is_some() {
                weights = Some(Vec::new());
            }
        }
        match (weights.as_mut(), weight_field) {
            (None, None) => {}
            (Some(ws), Some(raw)) => {
                let w: u32 = raw.parse().map_err(|_| GraphError::MalformedLine {
                    line: line_no,
                    reason: format!("invalid weight {raw:?}"),
                })?;
                ws.push(w);
                if !directed {
                    ws.push(w);
                }
            }
            (None, Some(_)) => {
                return Err(GraphError::MalformedLine {
                    line: line_no,
                    reason: "weight column appears after unweighted records".to_string(),
                })
            }
            (Some(_), None) => {
                return Err(GraphError::MalformedLine {
                    line: line_no,
                    reason: "missing weight column on a weighted file".to_string(),
                })
            }
        }

        for id in [src, dst] {
            // vertex_count = max id + 1 must itself fit in 32 bits.
            if id >= u64::from(u32::MAX) {
                return Err(GraphError::IdOverflow { line: line_no, id });
            }
            max_id = max_id.max(id);
        }
        edges.push((src as VertexId, dst as VertexId));
        if !directed {
            edges.push((dst as VertexId, src as VertexId));
        }
    }

    let vertex_count = if saw_edge { max_id as u32 + 1 } else { 0 };
    Ok(RawEdgeList {
        edges,
        weights,
        vertex_count,
        directed,
    })
}

fn parse_id(field: Option<&str>, line: usize, missing: &str) -> Result<u64, GraphError> {
    let raw = field.ok_or_else(|| GraphError::MalformedLine {
        line,
        reason: missing.to_string(),
    })?;
    raw.parse().map_err(|_| GraphError::MalformedLine {
        line,
        reason: format!("invalid vertex id {raw:?}"),
    })
}

/// Build the out-edge CSR with a stable counting sort.
pub fn build_csr(raw: &RawEdgeList) -> CsrGraph {
    build_csr_counted(raw).0
}

/// Build the in-edge layout (CSC): a CSR over the transposed edge list.
/// `column` then holds source ids and rows are destination ids.
pub fn build_csc(raw: &RawEdgeList) -> CsrGraph {
    let transposed = RawEdgeList {
        edges: raw.edges.iter().map(|&(u, v)| (v, u)).collect(),
        weights: raw.weights.clone(),
        vertex_count: raw.vertex_count,
        directed: raw.directed,
    };
    build_csr(&transposed)
}

/// As [`build_csr`] but also reports the element read/write tally of the
/// counting and placement passes.
pub fn build_csr_counted(raw: &RawEdgeList) -> (CsrGraph, BuildOps) {
    let v = raw.vertex_count as usize;
    let e = raw.edges.len();
    let mut ops = BuildOps::default();

    // Pass 1: out-degree per source.
    let mut counts = vec![0usize; v + 1];
    for &(src, _) in &raw.edges {
        ops.element_reads += 1;
        counts[src as usize + 1] += 1;
        ops.element_reads += 1;
        ops.element_writes += 1;
    }
    // Prefix sum gives row_index.
    for i in 1..=v {
        counts[i] += counts[i - 1];
        ops.element_reads += 2;
        ops.element_writes += 1;
    }
    let row_index = counts;

    // Pass 2: stable placement using a moving cursor per row.
    let mut cursor = row_index.clone();
    let mut column = vec![0 as VertexId; e];
    let mut weights = raw.weights.as_ref().map(|_| vec![0u32; e]);
    for (i, &(src, dst)) in raw.edges.iter().enumerate() {
        ops.element_reads += 1;
        let slot = cursor[src as usize];
        cursor[src as usize] += 1;
        ops.element_reads += 2;
        ops.element_writes += 1;
        column[slot] = dst;
        ops.element_writes += 1;
        if let (Some(out), Some(src_w)) = (weights.as_mut(), raw.weights.as_ref()) {
            out[slot] = src_w[i];
            ops.element_reads += 1;
            ops.element_writes += 1;
        }
    }

    (
        CsrGraph {
            vertex_count: raw.vertex_count,
            row_index,
            column,
            weights,
        },
        ops,
    )
}

const CACHE_MAGIC: &[u8; 8] = b"DMGCSR01";
const CACHE_VERSION: u32 = 1;

/// Serialize a preprocessed CSR as a little-endian binary cache.
pub fn write_csr_cache(
    csr: &CsrGraph,
    directed: bool,
    path: impl AsRef<Path>,
) -> Result<(), GraphError> {
    let path = path.as_ref();
    let io_err = |source| GraphError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut out = Vec::with_capacity(32 + csr.column.len() * 4);
    out.extend_from_slice(CACHE_MAGIC);
    out.extend_from_slice(&CACHE_VERSION.to_le_bytes());
    out.push(u8::from(directed));
    out.push(u8::from(csr.weights.is_some()));
    out.extend_from_slice(&[0u8; 2]);
    out.extend_from_slice(&csr.vertex_count.to_le_bytes());
    out.extend_from_slice(&(csr.column.len() as u64).to_le_bytes());
    for &r in &csr.row_index {
        out.extend_from_slice(&(r as u64).to_le_bytes());
    }
    for &c in &csr.column {
        out.extend_from_slice(&c.to_le_bytes());
    }
    if let Some(ws) = &csr.weights {
        for &w in ws {
            out.extend_from_slice(&w.to_le_bytes());
        }
    }
    let mut file = File::create(path).map_err(io_err)?;
    file.write_all(&out).map_err(io_err)?;
    Ok(())
}

/// Does the file start with the binary CSR cache magic? Lets callers pick
/// between [`read_csr_cache`] and [`parse_edge_list`] without guessing from
/// the file name.
pub fn looks_like_cache(path: impl AsRef<Path>) -> bool {
    let mut head = [0u8; 8];
    File::open(path.as_ref())
        .and_then(|mut f| f.read_exact(&mut head))
        .map(|_| &head == CACHE_MAGIC)
        .unwrap_or(false)
}

/// Load a binary CSR cache written by [`write_csr_cache`]. Returns the CSR
/// and its directedness flag.
pub fn read_csr_cache(path: impl AsRef<Path>) -> Result<(CsrGraph, bool), GraphError> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|source| GraphError::Io {
            path: path.display().to_string(),
            source,
        })?;
    let mut off = 0usize;
    let take = |off: &mut usize, n: usize| -> Result<&[u8], GraphError> {
        let slice = bytes
            .get(*off..*off + n)
            .ok_or_else(|| GraphError::BadCache("truncated file".to_string()))?;
        *off += n;
        Ok(slice)
    };

    if take(&mut off, 8)? != CACHE_MAGIC {
        return Err(GraphError::BadCache("bad magic".to_string()));
    }
    let version = u32::from_le_bytes(take(&mut off, 4)?.try_into().unwrap());
    if version != CACHE_VERSION {
        return Err(GraphError::BadCache(format!(
            "unsupported version {version}"
        )));
    }
    let directed = take(&mut off, 1)?[0] != 0;
    let has_weights = take(&mut off, 1)?[0] != 0;
    take(&mut off, 2)?; // padding
    let vertex_count = u32::from_le_bytes(take(&mut off, 4)?.try_into().unwrap());
    let edge_count = u64::from_le_bytes(take(&mut off, 8)?.try_into().unwrap()) as usize;

    let mut row_index = Vec::with_capacity(vertex_count as usize + 1);
    for _ in 0..=vertex_count as usize {
        row_index.push(u64::from_le_bytes(take(&mut off, 8)?.try_into().unwrap()) as usize);
    }
    if *row_index.last().unwrap_or(&0) != edge_count {
        return Err(GraphError::BadCache(
            "row index does not close over the edge count".to_string(),
        ));
    }
    let mut column = Vec::with_capacity(edge_count);
    for _ in 0..edge_count {
        column.push(u32::from_le_bytes(take(&mut off, 4)?.try_into().unwrap()));
    }
    let weights = if has_weights {
        let mut ws = Vec::with_capacity(edge_count);
        for _ in 0..edge_count {
            ws.push(u32::from_le_bytes(take(&mut off, 4)?.try_into().unwrap()));
        }
        Some(ws)
    } else {
        None
    };
    if off != bytes.len() {
        return Err(GraphError::BadCache("trailing bytes".to_string()));
    }
    Ok((
        CsrGraph {
            vertex_count,
            row_index,
            column,
            weights,
        },
        directed,
    ))
}

/// Recover an input-order edge list from a CSR (used when a graph is loaded
/// from the binary cache, where CSR expansion order stands in for file order).
pub fn raw_from_csr(csr: &CsrGraph, directed: bool) -> RawEdgeList {
    let mut edges = Vec::with_capacity(csr.column.len());
    let mut weights = csr
        .weights
        .as_ref()
        .map(|_| Vec::with_capacity(csr.column.len()));
    for v in 0..csr.vertex_count {
        let lo = csr.row_index[v as usize];
        let hi = csr.row_index[v as usize + 1];
        for i in lo..hi {
            edges.push((v, csr.column[i]));
            if let (Some(out), Some(ws)) = (weights.as_mut(), csr.weights.as_ref()) {
                out.push(ws[i]);
            }
        }
    }
    RawEdgeList {
        edges,
        weights,
        vertex_count: csr.vertex_count,
        directed,
    }
}
