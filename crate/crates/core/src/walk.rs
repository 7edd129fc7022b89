//! Randomized contiguity-class machinery: graph distances between maps, the
//! local-search walk deciding "same class?", uniform sampling of based
//! closed walks, and the class-count estimator built on top.
//!
//! The walk mutates one vertex per step.  In the default `ContiguousSteps`
//! mode a mutation at `v` from value `b` to `w` is admissible when
//! `f(sigma) ∪ {w}` is a simplex of the codomain for every maximal simplex
//! `sigma` containing `v` — that makes each accepted step a contiguity, so a
//! successful walk is a proof.  `PaperLiteral` mode only requires the
//! mutated map to stay simplicial; it is kept for comparison runs and can
//! hop between genuinely distinct classes (e.g. it changes winding degree
//! on the triangle, whose 1-skeleton is complete).
//!
//! For the hot case — a cycle domain and a codomain with at most 64
//! vertices — admissibility is precomputed as one bitmask per value triple
//! `(f(prev), f(v), f(next))`, so an iteration is a few table lookups.

use std::collections::VecDeque;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use num_bigint::{BigUint, RandBigInt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{Simplex, SimplicialComplex, StandardComplex};
use crate::contiguity::contiguous;
use crate::error::Error;
use crate::maps::{same_complex, SimplicialMap};
use crate::Result;

/// Candidate draws per iteration before the iteration becomes a no-op.
pub const RESAMPLE_LIMIT: usize = 32;

/// Trial budgets for the estimator's stopping heuristic: run each budget to
/// completion and stop once a full round leaves the catalog unchanged.
pub const DEFAULT_SCHEDULE: [u64; 3] = [1_000, 10_000, 100_000];

const UNREACHABLE: u32 = u32::MAX;

/// All-pairs shortest-path distances over a complex's 1-skeleton.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DistanceTable {
    n: usize,
    d: Vec<u32>,
}

impl DistanceTable {
    pub fn new(y: &SimplicialComplex) -> Self {
        let n = y.vertex_count();
        let adj = y.adjacency();
        let mut d = vec![UNREACHABLE; n * n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            let row = &mut d[s * n..(s + 1) * n];
            row[s] = 0;
            queue.clear();
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                let du = row[u];
                for &v in &adj[u] {
                    if row[v] == UNREACHABLE {
                        row[v] = du + 1;
                        queue.push_back(v);
                    }
                }
            }
        }
        DistanceTable { n, d }
    }

    /// Like [`DistanceTable::new`], but memoized on disk, keyed by a content
    /// hash of the 1-skeleton.  Any read problem — missing file, stale
    /// shape, parse error — falls back to a rebuild and a best-effort
    /// rewrite, so caching never changes results.
    pub fn cached(y: &SimplicialComplex, dir: &Path) -> Self {
        let key = skeleton_key(y);
        let path = dir.join(format!("bfs-{key:016x}.json"));
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(table) = serde_json::from_str::<DistanceTable>(&text) {
                if table.n == y.vertex_count() && table.d.len() == table.n * table.n {
                    return table;
                }
            }
        }
        let table = DistanceTable::new(y);
        let _ = fs::create_dir_all(dir);
        if let Ok(json) = serde_json::to_string(&table) {
            // write-then-rename keeps concurrent readers off half-written files
            let tmp = dir.join(format!("bfs-{key:016x}.tmp{}", std::process::id()));
            if fs::write(&tmp, json).is_ok() {
                let _ = fs::rename(&tmp, &path);
            }
        }
        table
    }

    /// Table per the walk configuration: cached when a directory is set.
    fn for_config(y: &SimplicialComplex, cfg: &WalkConfig) -> Self {
        match &cfg.cache_dir {
            Some(dir) => DistanceTable::cached(y, dir),
            None => DistanceTable::new(y),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `None` when the vertices lie in different components.
    pub fn distance(&self, u: usize, v: usize) -> Option<u32> {
        let raw = self.raw(u, v);
        (raw != UNREACHABLE).then_some(raw)
    }

    pub fn is_connected(&self) -> bool {
        !self.d.contains(&UNREACHABLE)
    }

    fn raw(&self, u: usize, v: usize) -> u32 {
        self.d[u * self.n + v]
    }
}

/// FNV-1a over everything the BFS sees: vertex count and sorted edge list.
fn skeleton_key(y: &SimplicialComplex) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    let mut eat = |x: u64| {
        for byte in x.to_le_bytes() {
            h = (h ^ u64::from(byte)).wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    eat(y.vertex_count() as u64);
    for (u, row) in y.adjacency().iter().enumerate() {
        for &v in row {
            if u < v {
                eat(((u as u64) << 32) | v as u64);
            }
        }
    }
    h
}

/// Sum over domain vertices of codomain graph distance between images.
pub fn map_distance(f: &SimplicialMap, g: &SimplicialMap) -> Result<u64> {
    if !same_complex(f.domain(), g.domain()) || !same_complex(f.codomain(), g.codomain()) {
        return Err(Error::MixedComplexes);
    }
    let table = DistanceTable::new(f.codomain());
    f.assignment()
        .iter()
        .zip(g.assignment())
        .map(|(&a, &b)| {
            table
                .distance(a, b)
                .map(u64::from)
                .ok_or(Error::DisconnectedCodomain)
        })
        .sum()
}

/// Admissibility rule for a single-vertex mutation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepRule {
    /// Mutated map must be contiguous to its predecessor (sound certificates).
    #[default]
    ContiguousSteps,
    /// Mutated map only has to stay simplicial, as the algorithm's step 5b
    /// literally reads.
    PaperLiteral,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WalkConfig {
    /// Probability of keeping a step that worsens the distance.
    pub kappa: f64,
    /// Iteration budget M.
    pub max_iters: u64,
    pub seed: u64,
    pub step_rule: StepRule,
    /// Domain vertex that is never mutated (based walks).
    pub based: Option<usize>,
    /// Vertex draws per iteration while hunting for one with any admissible
    /// value; an iteration that exhausts this is spent without a proposal.
    pub resample_limit: usize,
    /// Directory for memoized all-pairs BFS tables; `None` disables caching.
    pub cache_dir: Option<PathBuf>,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            kappa: 0.1,
            max_iters: 500_000,
            seed: 0,
            step_rule: StepRule::default(),
            based: None,
            resample_limit: RESAMPLE_LIMIT,
            cache_dir: None,
        }
    }
}

impl WalkConfig {
    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.kappa) {
            return Err(Error::BadConfig("kappa must lie in [0, 1]"));
        }
        if self.max_iters == 0 {
            return Err(Error::BadConfig("max_iters must be at least 1"));
        }
        if self.resample_limit == 0 {
            return Err(Error::BadConfig("resample_limit must be at least 1"));
        }
        Ok(())
    }
}

/// A replayable path of single-vertex mutations from one map to another.
#[derive(Clone, Debug)]
pub struct WalkCertificate {
    domain: Arc<SimplicialComplex>,
    codomain: Arc<SimplicialComplex>,
    start: Vec<usize>,
    deltas: Vec<(u32, u32)>,
    verified: bool,
}

impl WalkCertificate {
    /// Number of single-vertex steps.
    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    /// Whether every step was contiguity-checked during the walk.
    pub fn verified(&self) -> bool {
        self.verified
    }

    pub fn deltas(&self) -> &[(u32, u32)] {
        &self.deltas
    }

    /// Materializes the full map path, start included.
    pub fn steps(&self) -> Result<Vec<SimplicialMap>> {
        let mut cur = self.start.clone();
        let mut out = vec![SimplicialMap::new(
            self.domain.clone(),
            self.codomain.clone(),
            cur.clone(),
        )?];
        for &(v, w) in &self.deltas {
            cur[v as usize] = w as usize;
            out.push(SimplicialMap::new(
                self.domain.clone(),
                self.codomain.clone(),
                cur.clone(),
            )?);
        }
        Ok(out)
    }

    /// Replays the path and checks it is a genuine contiguity proof that
    /// `f` and `g` are in one class: endpoints match, every step is a
    /// simplicial single-vertex change, and consecutive maps are contiguous.
    pub fn verify(&self, f: &SimplicialMap, g: &SimplicialMap) -> bool {
        if self.start != f.assignment()
            || !same_complex(f.domain(), &self.domain)
            || !same_complex(f.codomain(), &self.codomain)
        {
            return false;
        }
        let Ok(steps) = self.steps() else {
            return false;
        };
        for pair in steps.windows(2) {
            if pair[0].assignment() == pair[1].assignment() {
                return false;
            }
            if !contiguous(&pair[0], &pair[1]).unwrap_or(false) {
                return false;
            }
        }
        steps.last().map(SimplicialMap::assignment) == Some(g.assignment())
    }
}

#[derive(Clone, Debug)]
pub enum WalkOutcome {
    Found(WalkCertificate),
    /// One-sided: exhausting the budget proves nothing.
    NotFound { iterations: u64 },
}

impl WalkOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, WalkOutcome::Found(_))
    }
}

fn select_bit(mut mask: u64, mut r: u32) -> usize {
    loop {
        let b = mask.trailing_zeros();
        if r == 0 {
            return b as usize;
        }
        mask &= mask - 1;
        r -= 1;
    }
}

/// Per-(domain, codomain, rule) state reused across walk invocations.
struct WalkContext<'a> {
    dist: &'a DistanceTable,
    codomain: &'a SimplicialComplex,
    rule: StepRule,
    kappa: f64,
    max_iters: u64,
    resample_limit: usize,
    /// Vertices eligible for mutation (base excluded).
    mutable: Vec<usize>,
    engine: Engine<'a>,
    domain_arc: &'a Arc<SimplicialComplex>,
    codomain_arc: &'a Arc<SimplicialComplex>,
}

enum Engine<'a> {
    /// 2-regular edge-only domain, codomain with <= 64 vertices: masks[(a*n+b)*n+c]
    /// is the bitmask of admissible new values for the triple of neighbour
    /// images (a, b, c).
    Cycle {
        n: usize,
        left: Vec<usize>,
        right: Vec<usize>,
        masks: Vec<u64>,
    },
    Generic {
        maximal: &'a [Simplex],
        by_vertex: Vec<Vec<usize>>,
    },
}

fn cycle_neighbours(domain: &SimplicialComplex) -> Option<(Vec<usize>, Vec<usize>)> {
    if domain.maximal_simplices().iter().any(|s| s.dim() != 1) {
        return None;
    }
    let adj = domain.adjacency();
    if adj.iter().any(|nb| nb.len() != 2) {
        return None;
    }
    let left = adj.iter().map(|nb| nb[0]).collect();
    let right = adj.iter().map(|nb| nb[1]).collect();
    Some((left, right))
}

fn build_masks(y: &SimplicialComplex, rule: StepRule) -> Vec<u64> {
    let n = y.vertex_count();
    // membership tables over value pairs/triples as sets
    let mut buf = Vec::with_capacity(3);
    let mut member = |vs: &[usize]| {
        buf.clear();
        buf.extend_from_slice(vs);
        buf.sort_unstable();
        buf.dedup();
        y.contains(&buf)
    };
    let mut t2 = vec![false; n * n];
    for a in 0..n {
        for w in 0..n {
            t2[a * n + w] = member(&[a, w]);
        }
    }
    let mut t3 = vec![false; n * n * n];
    if matches!(rule, StepRule::ContiguousSteps) {
        for a in 0..n {
            for b in 0..n {
                for w in 0..n {
                    t3[(a * n + b) * n + w] = member(&[a, b, w]);
                }
            }
        }
    }
    let mut masks = vec![0u64; n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut m = 0u64;
                for w in 0..n {
                    let ok = match rule {
                        StepRule::ContiguousSteps => {
                            t3[(a * n + b) * n + w] && t3[(b * n + c) * n + w]
                        }
                        StepRule::PaperLiteral => t2[a * n + w] && t2[w * n + c],
                    };
                    if ok {
                        m |= 1 << w;
                    }
                }
                masks[(a * n + b) * n + c] = m;
            }
        }
    }
    masks
}

impl<'a> WalkContext<'a> {
    fn new(
        domain: &'a Arc<SimplicialComplex>,
        codomain: &'a Arc<SimplicialComplex>,
        dist: &'a DistanceTable,
        cfg: &WalkConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        if let Some(b) = cfg.based {
            if b >= domain.vertex_count() {
                return Err(Error::VertexOutOfRange {
                    id: b,
                    count: domain.vertex_count(),
                });
            }
        }
        let mutable: Vec<usize> = (0..domain.vertex_count())
            .filter(|&v| cfg.based != Some(v))
            .collect();
        if mutable.is_empty() {
            return Err(Error::BadConfig("no mutable domain vertices"));
        }
        let engine = match cycle_neighbours(domain) {
            Some((left, right)) if codomain.vertex_count() <= 64 => Engine::Cycle {
                n: codomain.vertex_count(),
                left,
                right,
                masks: build_masks(codomain, cfg.step_rule),
            },
            _ => {
                let maximal = domain.maximal_simplices();
                let mut by_vertex = vec![Vec::new(); domain.vertex_count()];
                for (i, s) in maximal.iter().enumerate() {
                    for &v in s.vertices() {
                        by_vertex[v].push(i);
                    }
                }
                Engine::Generic { maximal, by_vertex }
            }
        };
        Ok(WalkContext {
            dist,
            codomain: codomain.as_ref(),
            rule: cfg.step_rule,
            kappa: cfg.kappa,
            max_iters: cfg.max_iters,
            resample_limit: cfg.resample_limit,
            mutable,
            engine,
            domain_arc: domain,
            codomain_arc: codomain,
        })
    }

    fn generic_candidates(
        &self,
        cur: &[usize],
        v: usize,
        out: &mut Vec<usize>,
        buf: &mut Vec<usize>,
    ) {
        let Engine::Generic { maximal, by_vertex } = &self.engine else {
            unreachable!("generic candidates on cycle engine");
        };
        out.clear();
        'candidates: for w in 0..self.codomain.vertex_count() {
            if w == cur[v] {
                continue;
            }
            for &si in &by_vertex[v] {
                buf.clear();
                for &u in maximal[si].vertices() {
                    if u != v || matches!(self.rule, StepRule::ContiguousSteps) {
                        buf.push(cur[u]);
                    }
                }
                buf.push(w);
                buf.sort_unstable();
                buf.dedup();
                if !self.codomain.contains(buf) {
                    continue 'candidates;
                }
            }
            out.push(w);
        }
    }

    fn certificate(&self, start: Vec<usize>, deltas: Vec<(u32, u32)>) -> WalkCertificate {
        WalkCertificate {
            domain: self.domain_arc.clone(),
            codomain: self.codomain_arc.clone(),
            start,
            deltas,
            verified: matches!(self.rule, StepRule::ContiguousSteps),
        }
    }

    /// Algorithm core.  Distances to the target are tracked incrementally as
    /// (number of unreachable pairs, finite sum); equality with the target
    /// is exactly distance (0, 0).
    ///
    /// Successful walks are re-run from an RNG snapshot to reconstruct the
    /// accepted steps; failing walks (the expensive, common case in the
    /// estimator) never record anything.  The second return value is the
    /// number of iterations spent.
    fn run(&self, rng: &mut ChaCha8Rng, start: &[usize], target: &[usize]) -> (WalkOutcome, u64) {
        let (inf, fin) = self.initial_distance(start, target);
        if inf == 0 && fin == 0 {
            return (
                WalkOutcome::Found(self.certificate(start.to_vec(), Vec::new())),
                0,
            );
        }
        let snapshot = rng.clone();
        let Some(iters) = self.evolve(rng, start, target, (inf, fin), self.max_iters, None)
        else {
            return (
                WalkOutcome::NotFound {
                    iterations: self.max_iters,
                },
                self.max_iters,
            );
        };
        let mut deltas = Vec::new();
        let mut replay = snapshot;
        let reached =
            self.evolve(&mut replay, start, target, (inf, fin), self.max_iters, Some(&mut deltas));
        assert_eq!(
            reached,
            Some(iters),
            "deterministic replay must reach the target again"
        );
        (
            WalkOutcome::Found(self.certificate(start.to_vec(), deltas)),
            iters,
        )
    }

    /// Success/iteration count only, with an explicit iteration budget and no
    /// certificate reconstruction.  A failed probe consumes the whole budget.
    fn probe(
        &self,
        rng: &mut ChaCha8Rng,
        start: &[usize],
        target: &[usize],
        budget: u64,
    ) -> (bool, u64) {
        let (inf, fin) = self.initial_distance(start, target);
        if inf == 0 && fin == 0 {
            return (true, 0);
        }
        match self.evolve(rng, start, target, (inf, fin), budget, None) {
            Some(iters) => (true, iters),
            None => (false, budget),
        }
    }

    fn initial_distance(&self, start: &[usize], target: &[usize]) -> (u64, u64) {
        let (mut inf, mut fin) = (0u64, 0u64);
        for (&a, &b) in start.iter().zip(target) {
            match self.dist.raw(a, b) {
                UNREACHABLE => inf += 1,
                d => fin += u64::from(d),
            }
        }
        (inf, fin)
    }

    /// One candidate per iteration; resampling only hunts for a vertex with
    /// any admissible value.  A rejected candidate (or a fruitless hunt)
    /// leaves the map in place and the iteration spent.  Returns the
    /// iteration at which the target was reached; `deltas`, when present,
    /// receives every accepted step.
    fn evolve(
        &self,
        rng: &mut ChaCha8Rng,
        start: &[usize],
        target: &[usize],
        dist0: (u64, u64),
        budget: u64,
        deltas: Option<&mut Vec<(u32, u32)>>,
    ) -> Option<u64> {
        match &self.engine {
            Engine::Cycle {
                n,
                left,
                right,
                masks,
            } => {
                self.evolve_cycle(rng, start, target, dist0, budget, deltas, *n, left, right, masks)
            }
            Engine::Generic { .. } => {
                self.evolve_generic(rng, start, target, dist0, budget, deltas)
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn evolve_cycle(
        &self,
        rng: &mut ChaCha8Rng,
        start: &[usize],
        target: &[usize],
        (mut inf, mut fin): (u64, u64),
        budget: u64,
        mut deltas: Option<&mut Vec<(u32, u32)>>,
        n: usize,
        left: &[usize],
        right: &[usize],
        masks: &[u64],
    ) -> Option<u64> {
        let mut cur = start.to_vec();
        let mlen = self.mutable.len() as u32;
        // acceptance threshold for distance-worsening steps on a 32-bit grid
        let kappa_bits = (self.kappa * 4_294_967_296.0).round() as u64;
        for i in 1..=budget {
            let mut hit = None;
            for _ in 0..self.resample_limit {
                let r = rng.gen::<u64>();
                let v = self.mutable[lemire32((r >> 32) as u32, mlen, rng) as usize];
                let (a, b, c) = (cur[left[v]], cur[v], cur[right[v]]);
                let mask = masks[(a * n + b) * n + c] & !(1u64 << b);
                if mask != 0 {
                    let w = select_bit(mask, lemire32(r as u32, mask.count_ones(), rng));
                    hit = Some((v, w));
                    break;
                }
            }
            let Some((v, w)) = hit else {
                if self.frozen(&cur, n, left, right, masks) {
                    // Absorbing state: no vertex will ever admit a move, so
                    // the remaining iterations are no-ops.  Skip them; the
                    // budget still counts as spent.
                    return None;
                }
                continue;
            };
            let old = self.dist.raw(cur[v], target[v]);
            let new = self.dist.raw(w, target[v]);
            let no_worse = match (old == UNREACHABLE, new == UNREACHABLE) {
                (true, _) => true,
                (false, true) => false,
                (false, false) => new <= old,
            };
            if no_worse || u64::from(rng.gen::<u32>()) < kappa_bits {
                if old == UNREACHABLE {
                    inf -= 1;
                } else {
                    fin -= u64::from(old);
                }
                if new == UNREACHABLE {
                    inf += 1;
                } else {
                    fin += u64::from(new);
                }
                cur[v] = w;
                if let Some(d) = deltas.as_deref_mut() {
                    d.push((v as u32, w as u32));
                }
                if inf == 0 && fin == 0 {
                    return Some(i);
                }
            }
        }
        None
    }

    fn evolve_generic(
        &self,
        rng: &mut ChaCha8Rng,
        start: &[usize],
        target: &[usize],
        (mut inf, mut fin): (u64, u64),
        budget: u64,
        mut deltas: Option<&mut Vec<(u32, u32)>>,
    ) -> Option<u64> {
        let mut cur = start.to_vec();
        let mut cand = Vec::new();
        let mut buf = Vec::new();
        for i in 1..=budget {
            let mut hit = None;
            for _ in 0..self.resample_limit {
                let v = self.mutable[rng.gen_range(0..self.mutable.len())];
                self.generic_candidates(&cur, v, &mut cand, &mut buf);
                if !cand.is_empty() {
                    hit = Some((v, cand[rng.gen_range(0..cand.len())]));
                    break;
                }
            }
            let Some((v, w)) = hit else { continue };
            let old = self.dist.raw(cur[v], target[v]);
            let new = self.dist.raw(w, target[v]);
            let no_worse = match (old == UNREACHABLE, new == UNREACHABLE) {
                (true, _) => true,
                (false, true) => false,
                (false, false) => new <= old,
            };
            if no_worse || rng.gen::<f64>() < self.kappa {
                if old == UNREACHABLE {
                    inf -= 1;
                } else {
                    fin -= u64::from(old);
                }
                if new == UNREACHABLE {
                    inf += 1;
                } else {
                    fin += u64::from(new);
                }
                cur[v] = w;
                if let Some(d) = deltas.as_deref_mut() {
                    d.push((v as u32, w as u32));
                }
                if inf == 0 && fin == 0 {
                    return Some(i);
                }
            }
        }
        None
    }

    /// True when no mutable vertex admits any value change, i.e. the walk can
    /// never leave `cur` again.
    fn frozen(&self, cur: &[usize], n: usize, left: &[usize], right: &[usize], masks: &[u64]) -> bool {
        self.mutable.iter().all(|&v| {
            let (a, b, c) = (cur[left[v]], cur[v], cur[right[v]]);
            masks[(a * n + b) * n + c] & !(1u64 << b) == 0
        })
    }
}

/// Exact uniform draw from `0..len` (Lemire's multiply-shift with rejection),
/// seeded by one 32-bit word and topping up from `rng` in the rare rejection
/// case.
#[inline]
fn lemire32(word: u32, len: u32, rng: &mut ChaCha8Rng) -> u32 {
    debug_assert!(len > 0);
    let mut m = u64::from(word) * u64::from(len);
    if (m as u32) < len {
        let threshold = len.wrapping_neg() % len;
        while (m as u32) < threshold {
            m = u64::from(rng.gen::<u32>()) * u64::from(len);
        }
    }
    (m >> 32) as u32
}

/// Randomized one-sided test whether `f` and `g` lie in one contiguity
/// class: a biased random walk over single-vertex mutations from `f`,
/// mostly greedy in `map_distance` to `g`, taking an uphill step with
/// probability `kappa`.  `Found` comes with a replayable certificate; in
/// the default step rule the certificate is a proof.
pub fn same_class_walk(
    f: &SimplicialMap,
    g: &SimplicialMap,
    cfg: &WalkConfig,
) -> Result<WalkOutcome> {
    if !same_complex(f.domain(), g.domain()) || !same_complex(f.codomain(), g.codomain()) {
        return Err(Error::MixedComplexes);
    }
    let table = DistanceTable::for_config(f.codomain(), cfg);
    let ctx = WalkContext::new(f.domain(), f.codomain(), &table, cfg)?;
    if let Some(b) = cfg.based {
        // the base never mutates, so differing base images settle it now
        if f.apply(b) != g.apply(b) {
            return Ok(WalkOutcome::NotFound { iterations: 0 });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok(ctx.run(&mut rng, f.assignment(), g.assignment()).0)
}

/// Uniform sampling of based closed walks (equivalently, based simplicial
/// maps `S1_k -> y`) by transfer-matrix counting: `counts[j][w]` holds the
/// big-integer number of completions of a partial walk sitting at `w`
/// after `j` steps, and each position is drawn proportionally.
pub(crate) struct ClosedWalkSampler {
    base: usize,
    k: usize,
    neigh: Vec<Vec<usize>>,
    counts: Vec<Vec<BigUint>>,
}

impl ClosedWalkSampler {
    /// `allow_collapse` adds self-loops, permitting steps that repeat a
    /// vertex (simplicial maps may collapse edges).  Without it the walk
    /// must move along an edge every step.
    pub(crate) fn new(
        y: &SimplicialComplex,
        base: usize,
        k: usize,
        allow_collapse: bool,
    ) -> Result<Self> {
        if k < 3 {
            return Err(Error::CircleTooSmall(k));
        }
        let n = y.vertex_count();
        if base >= n {
            return Err(Error::VertexOutOfRange { id: base, count: n });
        }
        let mut neigh = y.adjacency();
        if allow_collapse {
            for (v, nb) in neigh.iter_mut().enumerate() {
                let pos = nb.binary_search(&v).unwrap_err();
                nb.insert(pos, v);
            }
        }
        let mut counts = vec![vec![BigUint::default(); n]; k + 1];
        counts[k][base] = BigUint::from(1u32);
        for j in (0..k).rev() {
            for w in 0..n {
                let mut acc = BigUint::default();
                for &u in &neigh[w] {
                    acc += &counts[j + 1][u];
                }
                counts[j][w] = acc;
            }
        }
        Ok(ClosedWalkSampler {
            base,
            k,
            neigh,
            counts,
        })
    }

    pub(crate) fn total(&self) -> &BigUint {
        &self.counts[0][self.base]
    }

    /// Draws one walk; requires `total() > 0`.
    pub(crate) fn sample<R: Rng>(&self, rng: &mut R) -> Vec<usize> {
        debug_assert!(*self.total() > BigUint::default(), "no walks to sample");
        let mut out = vec![0usize; self.k];
        out[0] = self.base;
        let mut pos = self.base;
        for j in 1..self.k {
            let mut r = rng.gen_biguint_below(&self.counts[j - 1][pos]);
            for &u in &self.neigh[pos] {
                let c = &self.counts[j][u];
                if r < *c {
                    pos = u;
                    break;
                }
                r -= c;
            }
            out[j] = pos;
        }
        out
    }
}

/// Total number of based closed `k`-walks in the (reflexive, unless
/// `allow_collapse` is false) 1-skeleton — the sample space size of
/// [`uniform_closed_walk`].
pub fn closed_walk_count(
    y: &Arc<SimplicialComplex>,
    base: usize,
    k: usize,
    allow_collapse: bool,
) -> Result<BigUint> {
    Ok(ClosedWalkSampler::new(y, base, k, allow_collapse)?
        .total()
        .clone())
}

fn sample_walk_map(
    y: &Arc<SimplicialComplex>,
    base: usize,
    k: usize,
    seed: u64,
    allow_collapse: bool,
) -> Result<SimplicialMap> {
    let sampler = ClosedWalkSampler::new(y, base, k, allow_collapse)?;
    if *sampler.total() == BigUint::default() {
        return Err(Error::NoWalks);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let assignment = sampler.sample(&mut rng);
    let domain = Arc::new(StandardComplex::Circle(k).build()?);
    SimplicialMap::new(domain, y.clone(), assignment)
}

/// A uniformly random based simplicial map `S1_k -> y` (edges may collapse).
pub fn uniform_closed_walk(
    y: &Arc<SimplicialComplex>,
    base: usize,
    k: usize,
    seed: u64,
) -> Result<SimplicialMap> {
    sample_walk_map(y, base, k, seed, true)
}

/// Sensitivity variant that forbids collapsed edges; can fail with
/// [`Error::NoWalks`] (e.g. triangle-free targets with odd `k`).
pub fn uniform_noncollapsing_walk(
    y: &Arc<SimplicialComplex>,
    base: usize,
    k: usize,
    seed: u64,
) -> Result<SimplicialMap> {
    sample_walk_map(y, base, k, seed, false)
}

/// Result of a class-count estimation run.
#[derive(Clone, Debug)]
pub struct EstimatorState {
    /// Representatives no two of which have been connected by a walk.
    pub catalog: Vec<SimplicialMap>,
    pub trials: u64,
    pub stop_schedule: Vec<u64>,
    /// Whether some full budget round left the catalog unchanged.
    pub stabilized: bool,
    /// Catalog size after each completed round, paired with its budget.
    pub round_sizes: Vec<(u64, usize)>,
    /// Trial index at which each catalog entry was admitted.
    pub admitted_at: Vec<u64>,
    /// Total comparison walks launched.
    pub walks: u64,
    /// Total walk iterations spent across all comparisons.
    pub walk_iters: u64,
}

impl EstimatorState {
    pub fn class_count(&self) -> usize {
        self.catalog.len()
    }
}

fn saturating_assignment_distance(table: &DistanceTable, a: &[usize], b: &[usize]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| match table.raw(x, y) {
            UNREACHABLE => u64::from(u32::MAX),
            d => u64::from(d),
        })
        .sum()
}

struct TrialRun<'a> {
    sampler: &'a ClosedWalkSampler,
    ctx: &'a WalkContext<'a>,
    table: &'a DistanceTable,
    seed: u64,
    walks: AtomicU64,
    walk_iters: AtomicU64,
    /// Per-member match tallies, used as a tie-break: classes that matched
    /// often before are likelier to match again, so equal-distance members
    /// are tried in decreasing tally order.
    hits: Mutex<Vec<u64>>,
}

impl TrialRun<'_> {
    /// One sample-and-compare trial.  Returns the sampled assignment and
    /// the still-live RNG when no catalog entry matched.
    fn run(&self, trial: u64, catalog: &[Vec<usize>]) -> Option<(Vec<usize>, ChaCha8Rng)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial + 1);
        let gamma = self.sampler.sample(&mut rng);
        if self.matches_any(&gamma, catalog, 0, &mut rng) {
            None
        } else {
            Some((gamma, rng))
        }
    }

    /// `tally_base` maps slice positions back to global catalog indices when
    /// only a suffix is being checked.
    ///
    /// Two sweeps over the members.  The short screen settles the common
    /// case — a sample sitting near its own representative — without paying
    /// the full budget for every nearer member of a different class.  A
    /// sample that survives the screen still walks the full budget against
    /// every member, so nothing enters the catalog on the cheap sweep alone;
    /// and since a walk that reaches its target is a contiguity path, screen
    /// matches are never spurious.
    fn matches_any(
        &self,
        gamma: &[usize],
        catalog: &[Vec<usize>],
        tally_base: usize,
        rng: &mut ChaCha8Rng,
    ) -> bool {
        // nearest-first: same-class representatives tend to sit closest
        let mut order: Vec<(u64, std::cmp::Reverse<u64>, usize)> = {
            let hits = self.hits.lock().unwrap();
            catalog
                .iter()
                .enumerate()
                .map(|(i, entry)| {
                    let tally = hits.get(tally_base + i).copied().unwrap_or(0);
                    let d = saturating_assignment_distance(self.table, gamma, entry);
                    (d, std::cmp::Reverse(tally), i)
                })
                .collect()
        };
        order.sort_unstable();
        if let Some(&(0, _, i)) = order.first() {
            self.record_hit(tally_base + i);
            return true;
        }
        let full = self.ctx.max_iters;
        let screen = (full / 64).max(1_024);
        if screen.saturating_mul(4) <= full {
            for &(_, _, i) in &order {
                if self.walk_matches(gamma, &catalog[i], screen, rng) {
                    self.record_hit(tally_base + i);
                    return true;
                }
            }
        }
        for &(_, _, i) in &order {
            if self.walk_matches(gamma, &catalog[i], full, rng) {
                self.record_hit(tally_base + i);
                return true;
            }
        }
        false
    }

    fn walk_matches(
        &self,
        gamma: &[usize],
        entry: &[usize],
        budget: u64,
        rng: &mut ChaCha8Rng,
    ) -> bool {
        let (found, iters) = self.ctx.probe(rng, gamma, entry, budget);
        self.walks.fetch_add(1, Ordering::Relaxed);
        self.walk_iters.fetch_add(iters, Ordering::Relaxed);
        found
    }

    fn record_hit(&self, slot: usize) {
        let mut hits = self.hits.lock().unwrap();
        if hits.len() <= slot {
            hits.resize(slot + 1, 0);
        }
        hits[slot] += 1;
    }
}

/// Algorithm: repeatedly sample a uniform based closed walk and append it to
/// the catalog unless a walk connects it to an existing representative.
/// Budgets from `schedule` are cumulative trial counts; the run stops early
/// once a full round leaves the catalog unchanged.  The catalog size is the
/// class-count estimate: walk false negatives can split one true class
/// across entries, so it overestimates, never undercounts, in
/// `ContiguousSteps` mode.
///
/// Per-trial RNG streams are derived from `(cfg.seed, trial index)`, so the
/// sampled walks do not depend on the worker count; with `workers == 1` the
/// entire run is deterministic.
pub fn estimate_class_count(
    y: &Arc<SimplicialComplex>,
    k: usize,
    cfg: &WalkConfig,
    schedule: &[u64],
    workers: usize,
) -> Result<EstimatorState> {
    let table = DistanceTable::for_config(y, cfg);
    if !table.is_connected() {
        return Err(Error::DisconnectedCodomain);
    }
    // based estimation throughout: domain vertex 0 pinned to codomain vertex 0
    let cfg = WalkConfig {
        based: Some(0),
        ..cfg.clone()
    };
    let domain = Arc::new(StandardComplex::Circle(k).build()?);
    let sampler = ClosedWalkSampler::new(y, 0, k, true)?;
    let ctx = WalkContext::new(&domain, y, &table, &cfg)?;
    let trial_run = TrialRun {
        sampler: &sampler,
        ctx: &ctx,
        table: &table,
        seed: cfg.seed,
        walks: AtomicU64::new(0),
        walk_iters: AtomicU64::new(0),
        hits: Mutex::new(Vec::new()),
    };
    let mut catalog: Vec<Vec<usize>> = Vec::new();
    let mut admitted_at: Vec<u64> = Vec::new();
    let mut round_sizes = Vec::new();
    let mut trials_done: u64 = 0;
    let mut stabilized = false;
    for &budget in schedule {
        if budget <= trials_done {
            round_sizes.push((budget, catalog.len()));
            continue;
        }
        let before = catalog.len();
        if workers <= 1 {
            for trial in trials_done..budget {
                if let Some((gamma, _)) = trial_run.run(trial, &catalog) {
                    catalog.push(gamma);
                    admitted_at.push(trial);
                }
            }
        } else {
            run_round_parallel(
                &trial_run,
                &mut catalog,
                &mut admitted_at,
                trials_done,
                budget,
                workers,
            );
        }
        trials_done = budget;
        round_sizes.push((budget, catalog.len()));
        if catalog.len() == before && before > 0 {
            stabilized = true;
            break;
        }
    }
    let catalog = catalog
        .into_iter()
        .map(|assignment| {
            SimplicialMap::new(domain.clone(), y.clone(), assignment)
                .expect("sampled walks are simplicial")
        })
        .collect();
    Ok(EstimatorState {
        catalog,
        trials: trials_done,
        stop_schedule: schedule.to_vec(),
        stabilized,
        round_sizes,
        admitted_at,
        walks: trial_run.walks.into_inner(),
        walk_iters: trial_run.walk_iters.into_inner(),
    })
}

fn run_round_parallel(
    trial_run: &TrialRun<'_>,
    catalog: &mut Vec<Vec<usize>>,
    admitted_at: &mut Vec<u64>,
    from: u64,
    to: u64,
    workers: usize,
) {
    let shared = Mutex::new((std::mem::take(catalog), std::mem::take(admitted_at)));
    let next = AtomicU64::new(from);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let trial = next.fetch_add(1, Ordering::Relaxed);
                if trial >= to {
                    return;
                }
                let snapshot = shared.lock().unwrap().0.clone();
                let Some((gamma, mut rng)) = trial_run.run(trial, &snapshot) else {
                    continue;
                };
                // serialized insertion: re-verify against entries that
                // appeared while this trial was running
                let mut guard = shared.lock().unwrap();
                let late = &guard.0[snapshot.len()..];
                if late.is_empty()
                    || !trial_run.matches_any(&gamma, late, snapshot.len(), &mut rng)
                {
                    guard.0.push(gamma);
                    guard.1.push(trial);
                }
            });
        }
    });
    (*catalog, *admitted_at) = shared.into_inner().unwrap();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contiguity::exact_class_count;

    fn triangle() -> Arc<SimplicialComplex> {
        Arc::new(StandardComplex::Boundary(2).build().unwrap())
    }

    fn map(
        x: &Arc<SimplicialComplex>,
        y: &Arc<SimplicialComplex>,
        a: &[usize],
    ) -> SimplicialMap {
        SimplicialMap::new(x.clone(), y.clone(), a.to_vec()).unwrap()
    }

    #[test]
    fn distance_table_basics() {
        let c5 = StandardComplex::Circle(5).build().unwrap();
        let t = DistanceTable::new(&c5);
        assert_eq!(t.distance(0, 0), Some(0));
        assert_eq!(t.distance(0, 2), Some(2));
        assert_eq!(t.distance(0, 3), Some(2));
        assert!(t.is_connected());
        let split = crate::complex::SimplicialComplex::from_facets(4, &[vec![0, 1], vec![2, 3]])
            .unwrap();
        let t = DistanceTable::new(&split);
        assert_eq!(t.distance(0, 2), None);
        assert!(!t.is_connected());
    }

    #[test]
    fn map_distance_examples() {
        let y = triangle();
        let f = map(&y, &y, &[0, 1, 0]);
        assert_eq!(map_distance(&f, &f).unwrap(), 0);
        let g = map(&y, &y, &[0, 2, 0]);
        assert_eq!(map_distance(&f, &g).unwrap(), 1);
        let h = map(&y, &y, &[1, 2, 1]);
        assert_eq!(map_distance(&f, &h).unwrap(), 3);
    }

    #[test]
    fn map_distance_disconnected_errors() {
        let y = Arc::new(
            crate::complex::SimplicialComplex::from_facets(4, &[vec![0, 1], vec![2, 3]]).unwrap(),
        );
        let x = Arc::new(StandardComplex::Simplex(1).build().unwrap());
        let f = map(&x, &y, &[0, 1]);
        let g = map(&x, &y, &[2, 3]);
        assert!(matches!(
            map_distance(&f, &g),
            Err(Error::DisconnectedCodomain)
        ));
    }

    #[test]
    fn identical_maps_found_immediately() {
        let y = triangle();
        let f = map(&y, &y, &[0, 1, 2]);
        let cfg = WalkConfig {
            max_iters: 1,
            ..WalkConfig::default()
        };
        match same_class_walk(&f, &f, &cfg).unwrap() {
            WalkOutcome::Found(cert) => {
                assert!(cert.is_empty());
                assert!(cert.verify(&f, &f));
            }
            WalkOutcome::NotFound { .. } => panic!("equal maps must be found at iteration 0"),
        }
    }

    #[test]
    fn degenerate_pair_connects_with_certificate() {
        let y = triangle();
        let f = map(&y, &y, &[0, 1, 0]);
        let constant = map(&y, &y, &[0, 0, 0]);
        let g = map(&y, &y, &[0, 2, 0]);
        let cfg = WalkConfig {
            max_iters: 10_000,
            seed: 7,
            based: Some(0),
            ..WalkConfig::default()
        };
        for target in [&constant, &g] {
            match same_class_walk(&f, target, &cfg).unwrap() {
                WalkOutcome::Found(cert) => {
                    assert!(cert.verified());
                    assert!(cert.verify(&f, target));
                }
                WalkOutcome::NotFound { .. } => panic!("degenerate maps share a class"),
            }
        }
    }

    #[test]
    fn contiguous_steps_respect_winding_but_literal_do_not() {
        let y = triangle();
        let plus = map(&y, &y, &[0, 1, 2]);
        let minus = map(&y, &y, &[0, 2, 1]);
        let sound = WalkConfig {
            max_iters: 20_000,
            seed: 11,
            based: Some(0),
            ..WalkConfig::default()
        };
        // the permutation cycles are rigid: no single-vertex contiguity move
        // exists, so the sound walk can never cross
        assert!(!same_class_walk(&plus, &minus, &sound).unwrap().is_found());
        let literal = WalkConfig {
            step_rule: StepRule::PaperLiteral,
            ..sound
        };
        // the triangle's 1-skeleton is complete, so merely-simplicial steps
        // rewind through degenerate maps and do cross classes
        match same_class_walk(&plus, &minus, &literal).unwrap() {
            WalkOutcome::Found(cert) => {
                assert!(!cert.verified());
                // honest replay rejects it as a contiguity proof
                assert!(!cert.verify(&plus, &minus));
            }
            WalkOutcome::NotFound { .. } => {
                panic!("literal steps connect distinct winding classes on the triangle")
            }
        }
    }

    #[test]
    fn walk_counts_on_small_targets() {
        let y = triangle();
        // two free positions over a reflexive complete graph on 3 vertices
        assert_eq!(
            closed_walk_count(&y, 0, 3, true).unwrap(),
            BigUint::from(9u32)
        );
        let point = Arc::new(StandardComplex::Point.build().unwrap());
        assert_eq!(
            closed_walk_count(&point, 0, 5, true).unwrap(),
            BigUint::from(1u32)
        );
        let m = uniform_closed_walk(&point, 0, 5, 3).unwrap();
        assert_eq!(m.assignment(), &[0; 5]);
        // no triangles in C4, so odd non-collapsing closed walks vanish
        let c4 = Arc::new(StandardComplex::Circle(4).build().unwrap());
        assert_eq!(
            closed_walk_count(&c4, 0, 3, false).unwrap(),
            BigUint::default()
        );
        assert!(matches!(
            uniform_noncollapsing_walk(&c4, 0, 3, 1),
            Err(Error::NoWalks)
        ));
    }

    #[test]
    fn sampler_is_deterministic_per_seed() {
        let t = Arc::new(StandardComplex::TorusT.build().unwrap());
        let a = uniform_closed_walk(&t, 0, 9, 42).unwrap();
        let b = uniform_closed_walk(&t, 0, 9, 42).unwrap();
        assert_eq!(a, b);
        let c = uniform_closed_walk(&t, 0, 9, 43).unwrap();
        // overwhelmingly likely distinct; fixed seeds make this stable
        assert_ne!(a.assignment(), c.assignment());
    }

    #[test]
    fn estimator_matches_exact_on_triangle() {
        let y = triangle();
        let exact = exact_class_count(&y, &y, Some((0, 0)), 10_000).unwrap();
        let cfg = WalkConfig {
            max_iters: 20_000,
            seed: 5,
            ..WalkConfig::default()
        };
        let state = estimate_class_count(&y, 3, &cfg, &[50, 500], 1).unwrap();
        assert_eq!(state.class_count(), exact.class_count());
        assert!(state.stabilized);
        // replaying the same configuration reproduces the catalog exactly
        let replay = estimate_class_count(&y, 3, &cfg, &[50, 500], 1).unwrap();
        let left: Vec<_> = state.catalog.iter().map(|m| m.assignment().to_vec()).collect();
        let right: Vec<_> = replay.catalog.iter().map(|m| m.assignment().to_vec()).collect();
        assert_eq!(left, right);
    }

    #[test]
    fn estimator_rejects_disconnected_targets() {
        let y = Arc::new(
            crate::complex::SimplicialComplex::from_facets(4, &[vec![0, 1], vec![2, 3]]).unwrap(),
        );
        let err = estimate_class_count(&y, 3, &WalkConfig::default(), &[10], 1);
        assert!(matches!(err, Err(Error::DisconnectedCodomain)));
    }

    #[test]
    fn config_validation() {
        let y = triangle();
        let f = map(&y, &y, &[0, 1, 2]);
        let bad = WalkConfig {
            kappa: 1.5,
            ..WalkConfig::default()
        };
        assert!(matches!(
            same_class_walk(&f, &f, &bad),
            Err(Error::BadConfig(_))
        ));
        let bad = WalkConfig {
            max_iters: 0,
            ..WalkConfig::default()
        };
        assert!(same_class_walk(&f, &f, &bad).is_err());
    }
}
