//! Sampling digraph realizations, degree statistics, strong connectivity and
//! the binary graph format.

use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::WeightProfile;
use crate::par;
use crate::rng::{self, Domain};

/// Largest `n` accepted by the quadratic reference sampler.
pub const NAIVE_MAX_N: usize = 5000;

const MAGIC: &[u8; 4] = b"CLDG";
const VERSION: u32 = 1;
/// magic, version, n, edge count, seed, profile digest.
const HEADER_LEN: usize = 4 + 4 + 8 + 8 + 8 + 32;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("naive sampler is limited to n <= {max}, got {n}")]
    TooLargeForNaive { n: usize, max: usize },
    #[error("n = {0} does not fit 32-bit vertex ids")]
    TooManyVertices(usize),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(usize, usize),
    #[error("bad magic: expected \"CLDG\", found {0:?}")]
    BadMagic([u8; 4]),
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),
    #[error("truncated graph file: needed {needed} bytes, have {have}")]
    Truncated { needed: usize, have: usize },
    #[error("corrupt graph file: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An immutable digraph in compressed sparse row form, both directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    out_offsets: Vec<u64>,
    out_targets: Vec<u32>,
    in_offsets: Vec<u64>,
    in_sources: Vec<u32>,
    seed: u64,
    profile_digest: [u8; 32],
}

impl Digraph {
    /// From per-vertex out-neighbour lists that are already sorted,
    /// duplicate-free and loop-free.
    fn from_sorted_rows(rows: Vec<Vec<u32>>, seed: u64, profile_digest: [u8; 32]) -> Self {
        let n = rows.len();
        let mut out_offsets = Vec::with_capacity(n + 1);
        out_offsets.push(0u64);
        let m: usize = rows.iter().map(Vec::len).sum();
        let mut out_targets = Vec::with_capacity(m);
        for row in rows {
            out_targets.extend_from_slice(&row);
            out_offsets.push(out_targets.len() as u64);
        }
        let (in_offsets, in_sources) = transpose(n, &out_offsets, &out_targets);
        Digraph { n, out_offsets, out_targets, in_offsets, in_sources, seed, profile_digest }
    }

    /// Builds a graph from an edge list, rejecting loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n > u32::MAX as usize {
            return Err(GraphError::TooManyVertices(n));
        }
        let mut rows = vec![Vec::new(); n];
        for &(x, y) in edges {
            for v in [x, y] {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            if x == y {
                return Err(GraphError::SelfLoop(x));
            }
            rows[x].push(y as u32);
        }
        for (x, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            if let Some(w) = row.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(x, w[0] as usize));
            }
        }
        Ok(Self::from_sorted_rows(rows, 0, [0; 32]))
    }

    /// The directed `n`-cycle `i → i+1 mod n`.
    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges).expect("cycle needs n >= 2")
    }

    /// The complete digraph without loops.
    pub fn complete(n: usize) -> Self {
        let rows = (0..n).map(|x| (0..n as u32).filter(|&y| y as usize != x).collect()).collect();
        Self::from_sorted_rows(rows, 0, [0; 32])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn profile_digest(&self) -> [u8; 32] {
        self.profile_digest
    }

    #[inline]
    pub fn out(&self, x: usize) -> &[u32] {
        &self.out_targets[self.out_offsets[x] as usize..self.out_offsets[x + 1] as usize]
    }

    #[inline]
    pub fn inn(&self, y: usize) -> &[u32] {
        &self.in_sources[self.in_offsets[y] as usize..self.in_offsets[y + 1] as usize]
    }

    #[inline]
    pub fn out_degree(&self, x: usize) -> usize {
        (self.out_offsets[x + 1] - self.out_offsets[x]) as usize
    }

    #[inline]
    pub fn in_degree(&self, y: usize) -> usize {
        (self.in_offsets[y + 1] - self.in_offsets[y]) as usize
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        self.out(x).binary_search(&(y as u32)).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |x| self.out(x).iter().map(move |&y| (x, y as usize)))
    }

    /// First vertex with no out-edges, if any.
    pub fn first_sink(&self) -> Option<usize> {
        (0..self.n).find(|&x| self.out_degree(x) == 0)
    }

    pub fn out_degree_histogram(&self) -> Vec<u64> {
        histogram((0..self.n).map(|x| self.out_degree(x)))
    }

    pub fn in_degree_histogram(&self) -> Vec<u64> {
        histogram((0..self.n).map(|y| self.in_degree(y)))
    }

    /// Checks the structural invariants; used by tests and after loading.
    pub fn check_invariants(&self) -> Result<(), GraphError> {
        let corrupt = |m: String| Err(GraphError::Corrupt(m));
        for (name, offs, items) in [
            ("out", &self.out_offsets, &self.out_targets),
            ("in", &self.in_offsets, &self.in_sources),
        ] {
            if offs.len() != self.n + 1 || offs[0] != 0 || *offs.last().unwrap() as usize != items.len() {
                return corrupt(format!("{name} offsets do not frame the {name} block"));
            }
            if offs.windows(2).any(|w| w[0] > w[1]) {
                return corrupt(format!("{name} offsets decrease"));
            }
            for v in 0..self.n {
                let row = &items[offs[v] as usize..offs[v + 1] as usize];
                if row.iter().any(|&u| u as usize >= self.n || u as usize == v) {
                    return corrupt(format!("{name} row {v} has a loop or an out-of-range id"));
                }
                if row.windows(2).any(|w| w[0] >= w[1]) {
                    return corrupt(format!("{name} row {v} is not strictly increasing"));
                }
            }
        }
        let (io, is) = transpose(self.n, &self.out_offsets, &self.out_targets);
        if io != self.in_offsets || is != self.in_sources {
            return corrupt("in block is not the transpose of the out block".into());
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let m = self.edge_count();
        let mut b = Vec::with_capacity(HEADER_LEN + 16 * (self.n + 1) + 8 * m);
        b.extend_from_slice(MAGIC);
        b.extend_from_slice(&VERSION.to_le_bytes());
        b.extend_from_slice(&(self.n as u64).to_le_bytes());
        b.extend_from_slice(&(m as u64).to_le_bytes());
        b.extend_from_slice(&self.seed.to_le_bytes());
        b.extend_from_slice(&self.profile_digest);
        for (offs, items) in [(&self.out_offsets, &self.out_targets), (&self.in_offsets, &self.in_sources)] {
            offs.iter().for_each(|o| b.extend_from_slice(&o.to_le_bytes()));
            items.iter().for_each(|v| b.extend_from_slice(&v.to_le_bytes()));
        }
        b
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, GraphError> {
        let mut r = Reader { bytes, pos: 0 };
        let magic: [u8; 4] = r.take(4)?.try_into().unwrap();
        if &magic != MAGIC {
            return Err(GraphError::BadMagic(magic));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(GraphError::UnsupportedVersion(version));
        }
        let n = r.u64()? as usize;
        let m = r.u64()? as usize;
        let seed = r.u64()?;
        let profile_digest: [u8; 32] = r.take(32)?.try_into().unwrap();
        if n > u32::MAX as usize {
            return Err(GraphError::Corrupt(format!("n = {n} exceeds 32-bit ids")));
        }
        let needed = HEADER_LEN
            .checked_add(n.checked_add(1).and_then(|k| k.checked_mul(16)).ok_or(GraphError::Corrupt("n overflows".into()))?)
            .and_then(|k| k.checked_add(m.checked_mul(8)?))
            .ok_or(GraphError::Corrupt("edge count overflows".into()))?;
        if bytes.len() < needed {
            return Err(GraphError::Truncated { needed, have: bytes.len() });
        }
        if bytes.len() > needed {
            return Err(GraphError::Corrupt(format!("{} trailing bytes", bytes.len() - needed)));
        }
        let out_offsets = r.u64s(n + 1)?;
        let out_targets = r.u32s(m)?;
        let in_offsets = r.u64s(n + 1)?;
        let in_sources = r.u32s(m)?;
        let g = Digraph { n, out_offsets, out_targets, in_offsets, in_sources, seed, profile_digest };
        g.check_invariants()?;
        Ok(g)
    }

    pub fn save(&self, path: &Path) -> Result<(), GraphError> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(&self.to_bytes())?;
        f.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, GraphError> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }

    /// SHA-256 of the serialized form.
    pub fn content_digest(&self) -> [u8; 32] {
        Sha256::digest(self.to_bytes()).into()
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8], GraphError> {
        let end = self.pos + k;
        if end > self.bytes.len() {
            return Err(GraphError::Truncated { needed: end, have: self.bytes.len() });
        }
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, GraphError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, GraphError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn u64s(&mut self, k: usize) -> Result<Vec<u64>, GraphError> {
        Ok(self.take(8 * k)?.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect())
    }

    fn u32s(&mut self, k: usize) -> Result<Vec<u32>, GraphError> {
        Ok(self.take(4 * k)?.chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().unwrap())).collect())
    }
}

fn transpose(n: usize, offsets: &[u64], targets: &[u32]) -> (Vec<u64>, Vec<u32>) {
    let mut counts = vec![0u64; n + 1];
    for &y in targets {
        counts[y as usize + 1] += 1;
    }
    for i in 0..n {
        counts[i + 1] += counts[i];
    }
    let mut next = counts.clone();
    let mut sources = vec![0u32; targets.len()];
    // Scanning sources in increasing order keeps every in-row sorted.
    for x in 0..n {
        for &y in &targets[offsets[x] as usize..offsets[x + 1] as usize] {
            let slot = &mut next[y as usize];
            sources[*slot as usize] = x as u32;
            *slot += 1;
        }
    }
    (counts, sources)
}

fn histogram(degrees: impl Iterator<Item = usize>) -> Vec<u64> {
    let mut h = Vec::new();
    for d in degrees {
        if d >= h.len() {
            h.resize(d + 1, 0);
        }
        h[d] += 1;
    }
    h
}

/// Skip sampler for the out-row of any source vertex.
///
/// Targets are visited in order of decreasing in-weight, so the edge
/// probability along the scan is non-increasing. From position `i` with
/// proposal probability `q` the next candidate lies a geometric number of
/// positions ahead; it is accepted with probability `p/q` and `q` is lowered
/// to `p`. The result is exactly one independent Bernoulli(`p_xy`) per target.
#[derive(Debug, Clone)]
pub struct RowSampler {
    order: Vec<u32>,
    w_sorted: Vec<f64>,
    w_plus: Vec<f64>,
    scale: f64,
}

impl RowSampler {
    pub fn new(profile: &WeightProfile) -> Self {
        let wm = profile.w_minus();
        let mut order: Vec<u32> = (0..wm.len() as u32).collect();
        order.sort_by(|&a, &b| wm[b as usize].total_cmp(&wm[a as usize]).then(a.cmp(&b)));
        let w_sorted = order.iter().map(|&i| wm[i as usize]).collect();
        RowSampler { order, w_sorted, w_plus: profile.w_plus().to_vec(), scale: profile.scale() }
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    /// Sorted out-neighbours of `x` drawn from `rng`.
    pub fn sample_row<R: Rng + ?Sized>(&self, x: usize, rng: &mut R) -> Vec<u32> {
        let n = self.order.len();
        let a = self.w_plus[x] * self.scale;
        let mut row = Vec::new();
        let mut i = 0usize;
        let mut q = (a * self.w_sorted[0]).min(1.0);
        while i < n && q > 0.0 {
            if q < 1.0 {
                let u: f64 = 1.0 - rng.random::<f64>();
                let skip = (u.ln() / (-q).ln_1p()).floor();
                if skip >= (n - i) as f64 {
                    break;
                }
                i += skip as usize;
            }
            let p = (a * self.w_sorted[i]).min(1.0);
            if (p >= q || rng.random::<f64>() * q < p) && self.order[i] as usize != x {
                row.push(self.order[i]);
            }
            q = p;
            i += 1;
        }
        row.sort_unstable();
        row
    }

    /// The row of `x` in the graph sampled with `seed`.
    pub fn row(&self, seed: u64, x: usize) -> Vec<u32> {
        self.sample_row(x, &mut rng::stream(seed, Domain::GraphRow, x as u64))
    }
}

/// Samples a realization in expected `O(n log n + |E|)` time. Rows are
/// generated in parallel from per-row streams, so the result does not depend
/// on the number of workers.
pub fn sample_digraph(profile: &WeightProfile, seed: u64) -> Digraph {
    let sampler = RowSampler::new(profile);
    let rows = par::map_range(profile.n(), |x| sampler.row(seed, x));
    Digraph::from_sorted_rows(rows, seed, profile.digest())
}

/// Reference sampler: one Bernoulli per ordered pair, in lexicographic order,
/// from a single stream.
pub fn sample_digraph_naive(profile: &WeightProfile, seed: u64) -> Result<Digraph, GraphError> {
    let n = profile.n();
    if n > NAIVE_MAX_N {
        return Err(GraphError::TooLargeForNaive { n, max: NAIVE_MAX_N });
    }
    let mut r = rng::stream(seed, Domain::NaiveRow, 0);
    let rows = (0..n)
        .map(|x| (0..n).filter(|&y| y != x && r.random::<f64>() < profile.p(x, y)).map(|y| y as u32).collect())
        .collect();
    Ok(Digraph::from_sorted_rows(rows, seed, profile.digest()))
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DegreeSummary {
    pub delta_plus: usize,
    pub delta_minus: usize,
    #[serde(rename = "Delta_plus")]
    pub big_delta_plus: usize,
    #[serde(rename = "Delta_minus")]
    pub big_delta_minus: usize,
    /// `δ⁺ ≥ 2` and `Δ⁺ ≤ c_used · ln n`.
    pub e_plus_holds: bool,
    pub c_used: f64,
    /// `Δ⁺ / ln n`: the smallest constant for which the upper bound holds.
    pub c_empirical: f64,
}

pub fn degree_summary(g: &Digraph, c: f64) -> DegreeSummary {
    let n = g.n();
    let outs = (0..n).map(|x| g.out_degree(x));
    let ins = (0..n).map(|y| g.in_degree(y));
    let (delta_plus, big_delta_plus) = outs.fold((usize::MAX, 0), |(lo, hi), d| (lo.min(d), hi.max(d)));
    let (delta_minus, big_delta_minus) = ins.fold((usize::MAX, 0), |(lo, hi), d| (lo.min(d), hi.max(d)));
    let ln_n = (n as f64).ln();
    DegreeSummary {
        delta_plus,
        delta_minus,
        big_delta_plus,
        big_delta_minus,
        e_plus_holds: delta_plus >= 2 && big_delta_plus as f64 <= c * ln_n,
        c_used: c,
        c_empirical: big_delta_plus as f64 / ln_n,
    }
}

/// Strongly connected component id per vertex (iterative Tarjan) and the
/// number of components.
pub fn scc(g: &Digraph) -> (Vec<u32>, usize) {
    const UNSEEN: u32 = u32::MAX;
    let n = g.n();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut call: Vec<(u32, usize)> = Vec::new();
    let mut next_index = 0u32;
    let mut count = 0usize;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root as u32, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root as u32);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            let v = v as usize;
            let row = g.out(v);
            if *edge < row.len() {
                let w = row[*edge] as usize;
                *edge += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w as u32);
                    on_stack[w] = true;
                    call.push((w as u32, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                let p = parent as usize;
                low[p] = low[p].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack") as usize;
                    on_stack[w] = false;
                    comp[w] = count as u32;
                    if w == v {
                        break;
                    }
                }
                count += 1;
            }
        }
    }
    (comp, count)
}

pub fn strongly_connected(g: &Digraph) -> (bool, usize) {
    let (_, count) = scc(g);
    (count == 1, count)
}
