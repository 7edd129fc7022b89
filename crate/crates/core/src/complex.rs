use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Hard limit on stored simplices used when no explicit cap is given.
/// Product closures blow up combinatorially; callers opt in to more.
pub const DEFAULT_SIZE_CAP: usize = 2_000_000;

/// A simplex is a nonempty, strictly increasing sequence of vertex ids.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    /// Builds a simplex from arbitrary vertex order, deduplicating.
    /// Panics on empty input: the empty simplex is never stored.
    pub fn new(vertices: impl IntoIterator<Item = usize>) -> Self {
        let mut vs: Vec<usize> = vertices.into_iter().collect();
        vs.sort_unstable();
        vs.dedup();
        assert!(!vs.is_empty(), "empty simplex");
        Simplex(vs)
    }

    /// Wraps a slice already known to be sorted and strictly increasing.
    pub(crate) fn from_sorted(vertices: Vec<usize>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(!vertices.is_empty());
        Simplex(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| other.contains_vertex(*v))
    }

    /// The codimension-1 faces, in vertex-drop order. Empty for vertices.
    pub fn facets(&self) -> Vec<Simplex> {
        if self.0.len() == 1 {
            return Vec::new();
        }
        (0..self.0.len())
            .map(|drop| {
                let mut vs = self.0.clone();
                vs.remove(drop);
                Simplex(vs)
            })
            .collect()
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Canonical order used for all deterministic listings: dimension, then
/// lexicographic on the vertex sequence.
pub fn canonical_cmp(a: &Simplex, b: &Simplex) -> std::cmp::Ordering {
    a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0))
}

/// Finite abstract simplicial complex over vertices `0..vertex_count`.
///
/// Invariants, established at construction and never mutated afterwards:
/// every singleton is present, the simplex set is downward closed, and
/// `maximal` lists exactly the simplices that are not proper faces.
pub struct SimplicialComplex {
    vertex_count: usize,
    simplices: HashSet<Simplex>,
    maximal: Vec<Simplex>,
    labels: Option<Vec<String>>,
}

impl SimplicialComplex {
    /// Downward closure of the given facets, plus all singletons.
    pub fn from_facets(vertex_count: usize, facets: &[Vec<usize>]) -> Result<Self> {
        Self::from_facets_capped(vertex_count, facets, DEFAULT_SIZE_CAP)
    }

    pub fn from_facets_capped(
        vertex_count: usize,
        facets: &[Vec<usize>],
        cap: usize,
    ) -> Result<Self> {
        Self::build(vertex_count, facets, cap, None)
    }

    fn build(
        vertex_count: usize,
        facets: &[Vec<usize>],
        cap: usize,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if let Some(ls) = &labels {
            assert_eq!(ls.len(), vertex_count, "one label per vertex");
        }
        let mut simplices = HashSet::new();
        for v in 0..vertex_count {
            simplices.insert(Simplex(vec![v]));
        }
        if simplices.len() > cap {
            return Err(Error::SizeCapExceeded { cap });
        }
        for facet in facets {
            if facet.is_empty() {
                return Err(Error::EmptyFacet);
            }
            for &v in facet {
                if v >= vertex_count {
                    return Err(Error::VertexOutOfRange {
                        id: v,
                        count: vertex_count,
                    });
                }
            }
            let canon = Simplex::new(facet.iter().copied());
            insert_closure(&mut simplices, &canon, cap)?;
        }
        let maximal = compute_maximal(&simplices, vertex_count);
        Ok(SimplicialComplex {
            vertex_count,
            simplices,
            maximal,
            labels,
        })
    }

    /// Used by constructions that already produce a downward-closed set.
    pub(crate) fn from_closed_set(
        vertex_count: usize,
        simplices: HashSet<Simplex>,
        labels: Option<Vec<String>>,
    ) -> Self {
        debug_assert!((0..vertex_count).all(|v| simplices.contains(&Simplex(vec![v]))));
        let maximal = compute_maximal(&simplices, vertex_count);
        SimplicialComplex {
            vertex_count,
            simplices,
            maximal,
            labels,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn simplex_count(&self) -> usize {
        self.simplices.len()
    }

    pub fn contains(&self, vertices: &[usize]) -> bool {
        if vertices.is_empty() {
            return false;
        }
        if vertices.windows(2).all(|w| w[0] < w[1]) {
            return self.simplices.contains(&Simplex(vertices.to_vec()));
        }
        self.simplices.contains(&Simplex::new(vertices.iter().copied()))
    }

    pub fn contains_simplex(&self, s: &Simplex) -> bool {
        self.simplices.contains(s)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u == v {
            return u < self.vertex_count;
        }
        let e = if u < v { vec![u, v] } else { vec![v, u] };
        self.simplices.contains(&Simplex(e))
    }

    pub fn simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter()
    }

    /// All simplices in canonical order (dimension, then lexicographic).
    pub fn sorted_simplices(&self) -> Vec<&Simplex> {
        let mut all: Vec<&Simplex> = self.simplices.iter().collect();
        all.sort_by(|a, b| canonical_cmp(a, b));
        all
    }

    pub fn maximal_simplices(&self) -> &[Simplex] {
        &self.maximal
    }

    /// Largest simplex dimension; `None` for the complex on zero vertices.
    pub fn dim(&self) -> Option<usize> {
        self.simplices.iter().map(|s| s.dim()).max()
    }

    /// Simplex counts per dimension, index = dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut counts = match self.dim() {
            Some(d) => vec![0; d + 1],
            None => return Vec::new(),
        };
        for s in &self.simplices {
            counts[s.dim()] += 1;
        }
        counts
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Neighbor lists of the 1-skeleton, ascending, without self loops.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for s in &self.simplices {
            if s.dim() == 1 {
                let (u, v) = (s.0[0], s.0[1]);
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// For each vertex, the indices into `maximal_simplices()` of the
    /// maximal simplices containing it.
    pub fn maximal_by_vertex(&self) -> Vec<Vec<usize>> {
        let mut table = vec![Vec::new(); self.vertex_count];
        for (i, s) in self.maximal.iter().enumerate() {
            for &v in s.vertices() {
                table[v].push(i);
            }
        }
        table
    }

    /// Canonical serialization form: maximal simplices, sorted.
    pub fn to_data(&self) -> ComplexData {
        let mut facets: Vec<Vec<usize>> = self.maximal.iter().map(|s| s.0.clone()).collect();
        facets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        ComplexData {
            vertex_count: self.vertex_count,
            facets,
            labels: self.labels.clone(),
        }
    }

    pub fn from_data(data: &ComplexData) -> Result<Self> {
        if let Some(ls) = &data.labels {
            if ls.len() != data.vertex_count {
                return Err(Error::LabelCount {
                    got: ls.len(),
                    want: data.vertex_count,
                });
            }
        }
        Self::build(
            data.vertex_count,
            &data.facets,
            DEFAULT_SIZE_CAP,
            data.labels.clone(),
        )
    }

    /// Full simplex on `n + 1` vertices.
    pub fn simplex(n: usize) -> Self {
        let facet: Vec<usize> = (0..=n).collect();
        Self::from_facets(n + 1, &[facet]).expect("within cap")
    }

    pub fn point() -> Self {
        Self::simplex(0)
    }

    /// Boundary of the `n`-simplex: all proper nonempty subsets of `0..=n`.
    pub fn boundary(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::BoundaryTooSmall(0));
        }
        let facets: Vec<Vec<usize>> = (0..=n)
            .map(|drop| (0..=n).filter(|&v| v != drop).collect())
            .collect();
        Self::from_facets(n + 1, &facets)
    }

    /// The `k`-gon circle: vertices `0..k`, edges between cyclic neighbors.
    pub fn circle(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::CircleTooSmall(k));
        }
        let facets: Vec<Vec<usize>> = (0..k).map(|i| vec![i, (i + 1) % k]).collect();
        Self::from_facets(k, &facets)
    }

    /// Torus triangulation on the 3x3 vertex grid, vertex `(row, col)` at id
    /// `3*row + col`, rows and columns wrapping mod 3. Each grid square is
    /// split by the diagonal joining its top-left and bottom-right corners.
    /// 9 vertices, 27 edges, 18 triangles.
    pub fn torus_t() -> Self {
        let id = |row: usize, col: usize| 3 * (row % 3) + (col % 3);
        let mut facets = Vec::with_capacity(18);
        for row in 0..3 {
            for col in 0..3 {
                let bl = id(row, col);
                let br = id(row, col + 1);
                let tl = id(row + 1, col);
                let tr = id(row + 1, col + 1);
                facets.push(vec![bl, br, tl]);
                facets.push(vec![br, tr, tl]);
            }
        }
        Self::from_facets(9, &facets).expect("within cap")
    }

    /// Pinched sphere: the barycentric subdivision of the boundary of the
    /// 3-simplex, with two extra edges joining barycenters of 2-simplices.
    /// The four 2-simplex barycenters are paired in canonical order, lowest
    /// indices first, so the construction is deterministic. 14 vertices,
    /// 38 edges, 24 triangles.
    pub fn pinched_p() -> Self {
        let base = Self::boundary(3).expect("n = 3");
        let (sd, ancestors) = barycentric_complex(&base);
        let mut triangle_barycenters: Vec<usize> = ancestors
            .iter()
            .enumerate()
            .filter(|(_, s)| s.dim() == 2)
            .map(|(v, _)| v)
            .collect();
        triangle_barycenters.sort_unstable();
        assert_eq!(triangle_barycenters.len(), 4);
        let mut simplices: HashSet<Simplex> = sd.simplices.iter().cloned().collect();
        simplices.insert(Simplex::new([triangle_barycenters[0], triangle_barycenters[1]]));
        simplices.insert(Simplex::new([triangle_barycenters[2], triangle_barycenters[3]]));
        Self::from_closed_set(sd.vertex_count, simplices, sd.labels.clone())
    }

    /// Categorical product: vertex `(v, w)` at id `v * other.vertex_count() + w`;
    /// a vertex set is a simplex exactly when both coordinate projections are
    /// simplices. Facets are products of maximal simplices, so the closure can
    /// explode; `cap` bounds the stored simplex count.
    pub fn product_capped(&self, other: &SimplicialComplex, cap: usize) -> Result<Self> {
        let wc = other.vertex_count;
        let vertex_count = self.vertex_count * wc;
        let mut simplices = HashSet::new();
        for v in 0..vertex_count {
            simplices.insert(Simplex(vec![v]));
        }
        if simplices.len() > cap {
            return Err(Error::SizeCapExceeded { cap });
        }
        for sx in &self.maximal {
            for sy in &other.maximal {
                let facet: Vec<usize> = sx
                    .vertices()
                    .iter()
                    .flat_map(|&v| sy.vertices().iter().map(move |&w| product_vertex(v, w, wc)))
                    .collect();
                let canon = Simplex::new(facet);
                insert_closure(&mut simplices, &canon, cap)?;
            }
        }
        Ok(Self::from_closed_set(vertex_count, simplices, None))
    }

    pub fn product(&self, other: &SimplicialComplex) -> Result<Self> {
        self.product_capped(other, DEFAULT_SIZE_CAP)
    }

    pub fn into_arc(self) -> Arc<Self> {
        Arc::new(self)
    }
}

/// Id of the product vertex `(v, w)` when the second factor has `w_count`
/// vertices. Shared convention for products and exponential transposes.
pub fn product_vertex(v: usize, w: usize, w_count: usize) -> usize {
    v * w_count + w
}

impl PartialEq for SimplicialComplex {
    /// Labels are presentation metadata and do not affect identity.
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count && self.simplices == other.simplices
    }
}

impl Eq for SimplicialComplex {}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SimplicialComplex {{ vertices: {}, f_vector: {:?} }}",
            self.vertex_count,
            self.f_vector()
        )
    }
}

/// Inserts `simplex` and every nonempty subset, enforcing the cap.
fn insert_closure(set: &mut HashSet<Simplex>, simplex: &Simplex, cap: usize) -> Result<()> {
    let vs = simplex.vertices();
    let n = vs.len();
    if n > 63 {
        return Err(Error::SizeCapExceeded { cap });
    }
    for mask in 1u64..(1u64 << n) {
        let subset: Vec<usize> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| vs[i])
            .collect();
        set.insert(Simplex(subset));
        if set.len() > cap {
            return Err(Error::SizeCapExceeded { cap });
        }
    }
    Ok(())
}

/// A simplex is maximal iff no single-vertex extension is present; with a
/// downward-closed set this is equivalent to having no proper coface.
fn compute_maximal(set: &HashSet<Simplex>, vertex_count: usize) -> Vec<Simplex> {
    let mut maximal: Vec<Simplex> = set
        .iter()
        .filter(|s| {
            let mut probe = s.vertices().to_vec();
            for v in 0..vertex_count {
                if s.contains_vertex(v) {
                    continue;
                }
                probe.push(v);
                probe.sort_unstable();
                let hit = set.contains(&Simplex(probe.clone()));
                let pos = probe.binary_search(&v).unwrap();
                probe.remove(pos);
                if hit {
                    return false;
                }
            }
            true
        })
        .cloned()
        .collect();
    maximal.sort_by(canonical_cmp);
    maximal
}

/// Combinatorial barycentric subdivision: one vertex per simplex of `base`
/// (in canonical order, so original vertices keep their ids), simplices are
/// the flags of the face poset. Returns the subdivision and, per new vertex,
/// the base simplex it is the barycenter of.
pub(crate) fn barycentric_complex(base: &SimplicialComplex) -> (SimplicialComplex, Vec<Simplex>) {
    let ancestors: Vec<Simplex> = base
        .sorted_simplices()
        .into_iter()
        .cloned()
        .collect();
    let index: HashMap<&Simplex, usize> = ancestors.iter().zip(0..).collect();
    let mut facets: Vec<Vec<usize>> = Vec::new();
    // Flags are built downward from each maximal simplex; every maximal flag
    // starts at a maximal simplex and drops one vertex per step.
    for top in base.maximal_simplices() {
        let mut chain = vec![index[top]];
        extend_flags(top, &mut chain, &index, &mut facets);
    }
    let labels: Vec<String> = ancestors
        .iter()
        .map(|s| {
            s.vertices()
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("-")
        })
        .collect();
    let complex = SimplicialComplex::build(ancestors.len(), &facets, usize::MAX, Some(labels))
        .expect("flag closure within cap");
    (complex, ancestors)
}

fn extend_flags(
    s: &Simplex,
    chain: &mut Vec<usize>,
    index: &HashMap<&Simplex, usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if s.dim() == 0 {
        out.push(chain.clone());
        return;
    }
    for face in s.facets() {
        chain.push(index[&face]);
        extend_flags(&face, chain, index, out);
        chain.pop();
    }
}

/// Wire format for complexes: vertex count plus maximal simplices.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ComplexData {
    pub vertex_count: usize,
    pub facets: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub labels: Option<Vec<String>>,
}

/// The named complexes used on the command line and in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardComplex {
    Point,
    Simplex(usize),
    Boundary(usize),
    Circle(usize),
    TorusT,
    PinchedP,
}

impl StandardComplex {
    pub fn build(self) -> Result<SimplicialComplex> {
        match self {
            StandardComplex::Point => Ok(SimplicialComplex::point()),
            StandardComplex::Simplex(n) => Ok(SimplicialComplex::simplex(n)),
            StandardComplex::Boundary(n) => SimplicialComplex::boundary(n),
            StandardComplex::Circle(k) => SimplicialComplex::circle(k),
            StandardComplex::TorusT => Ok(SimplicialComplex::torus_t()),
            StandardComplex::PinchedP => Ok(SimplicialComplex::pinched_p()),
        }
    }

    pub fn name(self) -> String {
        match self {
            StandardComplex::Point => "point".into(),
            StandardComplex::Simplex(n) => format!("simplex{n}"),
            StandardComplex::Boundary(n) => format!("boundary{n}"),
            StandardComplex::Circle(k) => format!("circle{k}"),
            StandardComplex::TorusT => "torus_T".into(),
            StandardComplex::PinchedP => "pinched_P".into(),
        }
    }
}

impl FromStr for StandardComplex {
    type Err = String;

    /// Accepts `point`, `torus_T`, `pinched_P`, and `simplexN` / `boundaryN`
    /// / `circleK` with the parameter appended, e.g. `boundary2`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "point" => return Ok(StandardComplex::Point),
            "torus_T" => return Ok(StandardComplex::TorusT),
            "pinched_P" => return Ok(StandardComplex::PinchedP),
            _ => {}
        }
        for (prefix, make) in [
            ("simplex", StandardComplex::Simplex as fn(usize) -> _),
            ("boundary", StandardComplex::Boundary as fn(usize) -> _),
            ("circle", StandardComplex::Circle as fn(usize) -> _),
        ] {
            if let Some(rest) = s.strip_prefix(prefix) {
                return rest
                    .parse::<usize>()
                    .map(make)
                    .map_err(|_| format!("bad parameter in standard complex name '{s}'"));
            }
        }
        Err(format!("unknown standard complex '{s}'"))
    }
}
