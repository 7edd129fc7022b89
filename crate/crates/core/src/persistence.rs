//! Persistent homology of nested complex sequences, and the two degree-zero
//! pipelines that track contiguity classes of maps across a changing scale
//! (Rips threshold) or a refining domain (subdivision sequence).
//!
//! Bars are stored as stage-index pairs `[birth, death)` with `death = None`
//! for essential classes; the `grades` vector translates stage indices back
//! to scale values.  Zero-length bars (killed in their birth stage) are
//! dropped everywhere, so the bars alive at stage `s` count exactly the
//! classes present at stage `s`.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::complex::{Simplex, SimplicialComplex, StandardComplex};
use crate::contiguity::family_contiguous;
use crate::error::Error;
use crate::homology::{reduce_columns, PrimeField, SparseColumn};
use crate::maps::{enumerate_maps, same_complex, SimplicialMap};
use crate::rips::{FiniteMetricSpace, RipsFiltration};
use crate::unionfind::UnionFind;
use crate::Result;

/// One interval of a barcode, as stage indices: alive on `birth..death`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bar {
    pub birth: usize,
    pub death: Option<usize>,
}

impl Bar {
    pub fn alive_at(&self, stage: usize) -> bool {
        self.birth <= stage && self.death.map_or(true, |d| stage < d)
    }
}

/// A single-degree barcode over an explicit grade sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct Barcode {
    pub degree: usize,
    pub grades: Vec<f64>,
    pub bars: Vec<Bar>,
}

impl Barcode {
    fn normalized(degree: usize, grades: Vec<f64>, mut bars: Vec<Bar>) -> Self {
        bars.sort_unstable_by_key(|b| (b.birth, b.death.unwrap_or(usize::MAX)));
        Barcode {
            degree,
            grades,
            bars,
        }
    }

    /// Number of bars alive at the given stage index.
    pub fn alive_at(&self, stage: usize) -> usize {
        self.bars.iter().filter(|b| b.alive_at(stage)).count()
    }

    /// Bars translated to grade values, `None` meaning infinite.
    pub fn intervals(&self) -> Vec<(f64, Option<f64>)> {
        self.bars
            .iter()
            .map(|b| (self.grades[b.birth], b.death.map(|d| self.grades[d])))
            .collect()
    }

    pub fn to_data(&self) -> BarcodeData {
        BarcodeData {
            degree: self.degree,
            // shortest round-tripping decimal form, so thresholds stay exact
            grades: self.grades.iter().map(|g| format!("{g}")).collect(),
            bars: self.bars.iter().map(|b| (b.birth, b.death)).collect(),
        }
    }

    pub fn from_data(data: &BarcodeData) -> Result<Barcode> {
        let grades: Vec<f64> = data
            .grades
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("grade '{s}': {e}")))
            })
            .collect::<Result<_>>()?;
        for &(birth, death) in &data.bars {
            let end = death.unwrap_or(birth);
            if birth >= grades.len() || end > grades.len().saturating_sub(1) {
                return Err(Error::Parse(format!("bar ({birth}, {death:?}) out of range")));
            }
        }
        Ok(Barcode::normalized(
            data.degree,
            grades,
            data.bars
                .iter()
                .map(|&(birth, death)| Bar { birth, death })
                .collect(),
        ))
    }

    /// Plain-text interval table, one bar per line.
    pub fn render_text(&self) -> String {
        let mut out = format!("degree {}\n", self.degree);
        for b in &self.bars {
            let birth = self.grades[b.birth];
            match b.death {
                Some(d) => out.push_str(&format!("  [{birth}, {})\n", self.grades[d])),
                None => out.push_str(&format!("  [{birth}, inf)\n")),
            }
        }
        out
    }
}

/// Serialized barcode; grades as decimal strings to keep thresholds exact.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BarcodeData {
    pub degree: usize,
    pub grades: Vec<String>,
    pub bars: Vec<(usize, Option<usize>)>,
}

fn validate_nested(stages: &[Arc<SimplicialComplex>]) -> Result<()> {
    for n in 1..stages.len() {
        if stages[n].vertex_count() < stages[n - 1].vertex_count() {
            return Err(Error::NotNested(n));
        }
        for s in stages[n - 1].simplices() {
            if !stages[n].contains_simplex(s) {
                return Err(Error::NotNested(n));
            }
        }
    }
    Ok(())
}

/// Persistence of a nested sequence of complexes in one degree, by column
/// reduction over the simplexwise refinement: simplices are ordered by
/// (first stage, dimension, lex) and bars are reported at stage indices.
pub fn persistent_homology(
    stages: &[Arc<SimplicialComplex>],
    grades: &[f64],
    degree: usize,
    field: &PrimeField,
) -> Result<Barcode> {
    assert_eq!(stages.len(), grades.len(), "one grade per stage");
    let Some(last) = stages.last() else {
        return Ok(Barcode::normalized(degree, Vec::new(), Vec::new()));
    };
    validate_nested(stages)?;
    // sorted_simplices is (dim, lex); a stable sort by birth stage yields
    // the (birth, dim, lex) column order the reduction needs
    let mut order: Vec<(usize, &Simplex)> = last
        .sorted_simplices()
        .into_iter()
        .map(|s| {
            let birth = stages
                .iter()
                .position(|stage| stage.contains_simplex(s))
                .expect("simplex is in the last stage");
            (birth, s)
        })
        .collect();
    order.sort_by_key(|&(birth, _)| birth);
    let index: HashMap<&Simplex, usize> = order
        .iter()
        .enumerate()
        .map(|(i, &(_, s))| (s, i))
        .collect();
    let births: Vec<usize> = order.iter().map(|&(b, _)| b).collect();
    let columns: Vec<SparseColumn> = order
        .iter()
        .map(|&(_, s)| {
            if s.dim() == 0 {
                return SparseColumn::new();
            }
            let mut col: SparseColumn = s
                .facets()
                .into_iter()
                .enumerate()
                .map(|(i, f)| (index[&f], if i % 2 == 0 { 1 } else { field.neg(1) }))
                .collect();
            col.sort_unstable_by_key(|&(row, _)| row);
            col
        })
        .collect();
    let reduction = reduce_columns(columns, field);
    let mut bars = Vec::new();
    for (j, &(birth, s)) in order.iter().enumerate() {
        if s.dim() != degree || !reduction.columns[j].is_empty() {
            continue;
        }
        let death = reduction.low_to_col.get(&j).map(|&k| births[k]);
        if death == Some(birth) {
            continue;
        }
        bars.push(Bar { birth, death });
    }
    Ok(Barcode::normalized(degree, grades.to_vec(), bars))
}

/// Incremental connected-component tracker implementing the elder rule:
/// when two components meet, the younger one dies at the meeting stage.
struct H0Tracker {
    uf: UnionFind,
    birth: Vec<usize>,
    bars: Vec<Bar>,
}

impl H0Tracker {
    fn new() -> Self {
        H0Tracker {
            uf: UnionFind::new(0),
            birth: Vec::new(),
            bars: Vec::new(),
        }
    }

    fn add_node(&mut self, stage: usize) -> usize {
        self.birth.push(stage);
        self.uf.push()
    }

    fn connected(&mut self, a: usize, b: usize) -> bool {
        self.uf.find(a) == self.uf.find(b)
    }

    fn connect(&mut self, a: usize, b: usize, stage: usize) {
        let (ra, rb) = (self.uf.find(a), self.uf.find(b));
        if ra == rb {
            return;
        }
        let (ba, bb) = (self.birth[ra], self.birth[rb]);
        let younger = ba.max(bb);
        if younger < stage {
            self.bars.push(Bar {
                birth: younger,
                death: Some(stage),
            });
        }
        self.uf.union(ra, rb);
        let winner = self.uf.find(ra);
        self.birth[winner] = ba.min(bb);
    }

    fn into_barcode(mut self, grades: Vec<f64>) -> Barcode {
        for i in 0..self.birth.len() {
            if self.uf.find(i) == i {
                self.bars.push(Bar {
                    birth: self.birth[i],
                    death: None,
                });
            }
        }
        Barcode::normalized(0, grades, self.bars)
    }
}

/// Degree-0 persistence by union-find instead of matrix reduction; agrees
/// with `persistent_homology(.., 0, ..)` on every nested sequence.
pub fn h0_barcode(stages: &[Arc<SimplicialComplex>], grades: &[f64]) -> Result<Barcode> {
    assert_eq!(stages.len(), grades.len(), "one grade per stage");
    validate_nested(stages)?;
    let mut tracker = H0Tracker::new();
    for (stage, complex) in stages.iter().enumerate() {
        while tracker.birth.len() < complex.vertex_count() {
            tracker.add_node(stage);
        }
        for s in complex.sorted_simplices() {
            if s.dim() == 1 {
                let vs = s.vertices();
                tracker.connect(vs[0], vs[1], stage);
            }
        }
    }
    Ok(tracker.into_barcode(grades.to_vec()))
}

/// Degree-0 persistence of the Rips filtration of a metric space.
pub fn rips_h0_barcode(space: &Arc<FiniteMetricSpace>) -> Barcode {
    let filt = RipsFiltration::new(space, 1);
    let stages: Vec<Arc<SimplicialComplex>> =
        (0..filt.len()).map(|i| filt.complex_at(i)).collect();
    h0_barcode(&stages, filt.values()).expect("Rips stages are nested")
}

fn metric_contiguous(
    maximal: &[Simplex],
    a: &[usize],
    b: &[usize],
    space: &FiniteMetricSpace,
    eps: f64,
    image: &mut Vec<usize>,
) -> bool {
    for sigma in maximal {
        image.clear();
        for &v in sigma.vertices() {
            image.push(a[v]);
            image.push(b[v]);
        }
        image.sort_unstable();
        image.dedup();
        for (i, &u) in image.iter().enumerate() {
            for &w in &image[i + 1..] {
                if space.distance(u, w) > eps {
                    return false;
                }
            }
        }
    }
    true
}

/// Degree-0 persistent contiguity homology of maps from `z` into the Rips
/// filtration of a metric space.  Stage 0 is the scale-0 (discrete) complex;
/// later stages sit at the distinct pairwise distances, optionally windowed
/// by `stage_range` (inclusive indices into the stage list).  The structure
/// maps are literal inclusions — a map is the same vertex assignment seen in
/// a larger codomain — so classes only ever merge or newly appear.
///
/// Everything is driven by the metric criterion for contiguity, so no
/// simplices of the codomain beyond dimension `dim z` are materialised.
pub fn persistent_contiguity_h0(
    z: &Arc<SimplicialComplex>,
    space: &Arc<FiniteMetricSpace>,
    stage_range: Option<(usize, usize)>,
    based: Option<(usize, usize)>,
    cap: usize,
) -> Result<Barcode> {
    let zdim = z.dim().expect("domain has at least one vertex");
    let filt = RipsFiltration::new(space, zdim);
    let (lo, hi) = stage_range.unwrap_or((0, filt.len() - 1));
    if lo > hi || hi >= filt.len() {
        return Err(Error::BadStageRange {
            lo,
            hi,
            stages: filt.len(),
        });
    }
    let maximal = z.maximal_simplices();
    let mut tracker = H0Tracker::new();
    let mut node_of: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut grades = Vec::with_capacity(hi - lo + 1);
    let mut image_buf = Vec::new();
    for (stage, idx) in (lo..=hi).enumerate() {
        let eps = filt.values()[idx];
        grades.push(eps);
        let codomain = filt.complex_at(idx);
        let maps = enumerate_maps(z, &codomain, based, cap)?;
        let nodes: Vec<(usize, Vec<usize>)> = maps
            .iter()
            .map(|m| {
                let a = m.assignment().to_vec();
                let node = *node_of
                    .entry(a.clone())
                    .or_insert_with(|| tracker.add_node(stage));
                (node, a)
            })
            .collect();
        for i in 0..nodes.len() {
            for j in (i + 1)..nodes.len() {
                if tracker.connected(nodes[i].0, nodes[j].0) {
                    continue;
                }
                if metric_contiguous(maximal, &nodes[i].1, &nodes[j].1, space, eps, &mut image_buf)
                {
                    tracker.connect(nodes[i].0, nodes[j].0, stage);
                }
            }
        }
    }
    Ok(tracker.into_barcode(grades))
}

/// Degree-0 persistent subdivision homology of `Map(X_n, Y)` along a chain
/// of connecting maps `f_n : X_{n+1} -> X_n`.  Each `f_n` must be surjective
/// on vertices, which makes precomposition injective, so a stage-`n` class
/// is tracked into stage `n+1` by pushing each catalogued assignment
/// forward.  Grades are the stage indices.
pub fn persistent_subdivision_h0(
    stages: &[Arc<SimplicialComplex>],
    connecting: &[SimplicialMap],
    y: &Arc<SimplicialComplex>,
    based: Option<(usize, usize)>,
    cap: usize,
) -> Result<Barcode> {
    if stages.is_empty() && connecting.is_empty() {
        return Ok(Barcode::normalized(0, Vec::new(), Vec::new()));
    }
    assert_eq!(
        connecting.len() + 1,
        stages.len(),
        "one connecting map between consecutive stages"
    );
    for (n, f) in connecting.iter().enumerate() {
        if !same_complex(f.domain(), &stages[n + 1]) || !same_complex(f.codomain(), &stages[n]) {
            return Err(Error::MixedComplexes);
        }
        if !f.is_surjective_on_vertices() {
            return Err(Error::NotVertexSurjective(n));
        }
        if let Some((bx, _)) = based {
            if f.apply(bx) != bx {
                return Err(Error::BaseNotPreserved(n));
            }
        }
    }
    let contains = |vs: &[usize]| y.contains(vs);
    let mut tracker = H0Tracker::new();
    let mut grades = Vec::with_capacity(stages.len());
    let mut union_buf = Vec::new();
    // assignments of the previous stage with their component nodes
    let mut prev: Vec<(Vec<usize>, usize)> = Vec::new();
    for (stage, x) in stages.iter().enumerate() {
        grades.push(stage as f64);
        let maps = enumerate_maps(x, y, based, cap)?;
        let mut node_of: HashMap<Vec<usize>, usize> = HashMap::with_capacity(maps.len());
        if stage > 0 {
            let f = &connecting[stage - 1];
            for (assignment, node) in &prev {
                let pushed: Vec<usize> =
                    f.assignment().iter().map(|&fv| assignment[fv]).collect();
                node_of.insert(pushed, *node);
            }
        }
        let current: Vec<(Vec<usize>, usize)> = maps
            .iter()
            .map(|m| {
                let a = m.assignment().to_vec();
                let node = *node_of
                    .entry(a.clone())
                    .or_insert_with(|| tracker.add_node(stage));
                (a, node)
            })
            .collect();
        let maximal = x.maximal_simplices();
        for i in 0..current.len() {
            for j in (i + 1)..current.len() {
                if tracker.connected(current[i].1, current[j].1) {
                    continue;
                }
                if family_contiguous(
                    maximal,
                    &contains,
                    &[&current[i].0, &current[j].0],
                    &mut union_buf,
                ) {
                    tracker.connect(current[i].1, current[j].1, stage);
                }
            }
        }
        prev = current;
    }
    Ok(tracker.into_barcode(grades))
}

/// The collapse `S1_{2k} -> S1_k` sending each doubled vertex to its
/// original and each midpoint to its lower-indexed neighbour.
pub fn circle_doubling_collapse(k: usize) -> Result<SimplicialMap> {
    let big = StandardComplex::Circle(2 * k).build()?;
    let small = StandardComplex::Circle(k).build()?;
    let assignment: Vec<usize> = (0..2 * k)
        .map(|v| {
            let i = v / 2;
            if v % 2 == 0 || i + 1 < k {
                i
            } else {
                0
            }
        })
        .collect();
    SimplicialMap::new(Arc::new(big), Arc::new(small), assignment)
}

/// The collapse `S1_{k+1} -> S1_k` folding the extra vertex onto the base.
pub fn circle_step_collapse(k: usize) -> Result<SimplicialMap> {
    let big = StandardComplex::Circle(k + 1).build()?;
    let small = StandardComplex::Circle(k).build()?;
    let assignment: Vec<usize> = (0..=k).map(|v| if v < k { v } else { 0 }).collect();
    SimplicialMap::new(Arc::new(big), Arc::new(small), assignment)
}
