use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::complex::SimplicialComplex;
use crate::error::Error;
use crate::Result;

/// Default bound on the number of maps an enumeration may produce.
pub const DEFAULT_MAP_CAP: usize = 50_000;

/// A vertex map between complexes that sends simplices to simplices.
/// Validated at construction; a `SimplicialMap` that exists is simplicial.
#[derive(Clone)]
pub struct SimplicialMap {
    domain: Arc<SimplicialComplex>,
    codomain: Arc<SimplicialComplex>,
    assignment: Vec<usize>,
}

impl SimplicialMap {
    pub fn new(
        domain: Arc<SimplicialComplex>,
        codomain: Arc<SimplicialComplex>,
        assignment: Vec<usize>,
    ) -> Result<Self> {
        if assignment.len() != domain.vertex_count() {
            return Err(Error::AssignmentLength {
                got: assignment.len(),
                want: domain.vertex_count(),
            });
        }
        for &w in &assignment {
            if w >= codomain.vertex_count() {
                return Err(Error::VertexOutOfRange {
                    id: w,
                    count: codomain.vertex_count(),
                });
            }
        }
        if let Some(bad) = first_non_simplicial(&domain, &codomain, &assignment) {
            return Err(Error::NotSimplicial { simplex: bad });
        }
        Ok(SimplicialMap {
            domain,
            codomain,
            assignment,
        })
    }

    /// Constructor for assignments already known to be simplicial (used by
    /// the enumerator and the walk, which check admissibility incrementally).
    pub(crate) fn new_unchecked(
        domain: Arc<SimplicialComplex>,
        codomain: Arc<SimplicialComplex>,
        assignment: Vec<usize>,
    ) -> Self {
        debug_assert!(first_non_simplicial(&domain, &codomain, &assignment).is_none());
        SimplicialMap {
            domain,
            codomain,
            assignment,
        }
    }

    pub fn domain(&self) -> &Arc<SimplicialComplex> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<SimplicialComplex> {
        &self.codomain
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn apply(&self, v: usize) -> usize {
        self.assignment[v]
    }

    /// Image of a vertex set, sorted and deduplicated.
    pub fn image_of(&self, vertices: &[usize]) -> Vec<usize> {
        let mut image: Vec<usize> = vertices.iter().map(|&v| self.assignment[v]).collect();
        image.sort_unstable();
        image.dedup();
        image
    }

    /// Re-runs the simpliciality check over every maximal domain simplex.
    pub fn verify(&self) -> bool {
        first_non_simplicial(&self.domain, &self.codomain, &self.assignment).is_none()
    }

    /// `other` then `self`: requires `other`'s codomain to be this domain.
    pub fn compose(&self, other: &SimplicialMap) -> Result<SimplicialMap> {
        if !same_complex(&self.domain, &other.codomain) {
            return Err(Error::MixedComplexes);
        }
        let assignment: Vec<usize> = other
            .assignment
            .iter()
            .map(|&v| self.assignment[v])
            .collect();
        // Composites of simplicial maps are simplicial.
        Ok(SimplicialMap::new_unchecked(
            other.domain.clone(),
            self.codomain.clone(),
            assignment,
        ))
    }

    pub fn is_surjective_on_vertices(&self) -> bool {
        let mut hit = vec![false; self.codomain.vertex_count()];
        for &w in &self.assignment {
            hit[w] = true;
        }
        hit.iter().all(|&h| h)
    }

    pub fn to_data(&self, domain_name: &str, codomain_name: &str) -> MapData {
        MapData {
            domain: domain_name.to_string(),
            codomain: codomain_name.to_string(),
            assignment: self.assignment.clone(),
        }
    }
}

impl PartialEq for SimplicialMap {
    fn eq(&self, other: &Self) -> bool {
        self.assignment == other.assignment
            && same_complex(&self.domain, &other.domain)
            && same_complex(&self.codomain, &other.codomain)
    }
}

impl Eq for SimplicialMap {}

impl std::fmt::Debug for SimplicialMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SimplicialMap {:?}", self.assignment)
    }
}

/// Pointer equality first: maps built from shared complexes compare cheaply.
pub(crate) fn same_complex(a: &Arc<SimplicialComplex>, b: &Arc<SimplicialComplex>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Simpliciality needs checking on maximal simplices only: images of faces
/// are faces of images. Returns a witness simplex on failure.
fn first_non_simplicial(
    domain: &SimplicialComplex,
    codomain: &SimplicialComplex,
    assignment: &[usize],
) -> Option<Vec<usize>> {
    let mut image = Vec::new();
    for s in domain.maximal_simplices() {
        image.clear();
        image.extend(s.vertices().iter().map(|&v| assignment[v]));
        image.sort_unstable();
        image.dedup();
        if !codomain.contains(&image) {
            return Some(s.vertices().to_vec());
        }
    }
    None
}

/// True when the assignment sends every maximal simplex to a simplex.
pub fn is_simplicial(
    domain: &SimplicialComplex,
    codomain: &SimplicialComplex,
    assignment: &[usize],
) -> bool {
    assignment.len() == domain.vertex_count()
        && assignment.iter().all(|&w| w < codomain.vertex_count())
        && first_non_simplicial(domain, codomain, assignment).is_none()
}

/// Wire format for maps; complex names are chosen by the caller.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MapData {
    pub domain: String,
    pub codomain: String,
    pub assignment: Vec<usize>,
}

/// All simplicial maps from `domain` to `codomain`, in a deterministic
/// order: backtracking over domain vertices arranged so that each vertex
/// shares a maximal simplex with an earlier one where possible, candidate
/// values ascending. `based` fixes one domain vertex to one codomain vertex.
pub fn enumerate_maps(
    domain: &Arc<SimplicialComplex>,
    codomain: &Arc<SimplicialComplex>,
    based: Option<(usize, usize)>,
    cap: usize,
) -> Result<Vec<SimplicialMap>> {
    let assignments = enumerate_assignments(domain, codomain.vertex_count(), based, cap, &|img| {
        codomain.contains(img)
    })?;
    Ok(assignments
        .into_iter()
        .map(|a| SimplicialMap::new_unchecked(domain.clone(), codomain.clone(), a))
        .collect())
}

/// Enumeration core, parameterized by the codomain's simplex test so Rips
/// stages can run directly against a metric without materializing complexes.
/// `image_ok` receives sorted, deduplicated vertex sets.
pub(crate) fn enumerate_assignments(
    domain: &SimplicialComplex,
    codomain_vertices: usize,
    based: Option<(usize, usize)>,
    cap: usize,
    image_ok: &dyn Fn(&[usize]) -> bool,
) -> Result<Vec<Vec<usize>>> {
    let n = domain.vertex_count();
    if let Some((v, w)) = based {
        if v >= n {
            return Err(Error::VertexOutOfRange { id: v, count: n });
        }
        if w >= codomain_vertices {
            return Err(Error::VertexOutOfRange {
                id: w,
                count: codomain_vertices,
            });
        }
    }
    if n == 0 {
        return Ok(vec![Vec::new()]);
    }
    if codomain_vertices == 0 {
        return Ok(Vec::new());
    }

    let order = spanning_order(domain, based.map(|(v, _)| v).unwrap_or(0));
    let position_of: Vec<usize> = {
        let mut pos = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        pos
    };
    let maximal = domain.maximal_simplices();
    let by_vertex = domain.maximal_by_vertex();

    let mut results: Vec<Vec<usize>> = Vec::new();
    let mut assignment = vec![usize::MAX; n];
    let mut image = Vec::new();
    let mut depth = 0usize;
    // candidate value currently tried at each depth
    let mut cursor = vec![0usize; n];

    'outer: loop {
        if depth == n {
            if results.len() == cap {
                return Err(Error::EnumerationCapExceeded { cap });
            }
            results.push(assignment.clone());
            depth -= 1;
            continue;
        }
        let v = order[depth];
        let fixed = based.and_then(|(bv, bw)| (bv == v).then_some(bw));
        let start = cursor[depth];
        let candidates: Box<dyn Iterator<Item = usize>> = match fixed {
            Some(w) if start == 0 => Box::new(std::iter::once(w)),
            Some(_) => Box::new(std::iter::empty()),
            None => Box::new(start..codomain_vertices),
        };
        for w in candidates {
            cursor[depth] = if fixed.is_some() { 1 } else { w + 1 };
            assignment[v] = w;
            let mut ok = true;
            for &mi in &by_vertex[v] {
                image.clear();
                for &u in maximal[mi].vertices() {
                    if position_of[u] <= depth {
                        image.push(assignment[u]);
                    }
                }
                image.sort_unstable();
                image.dedup();
                if !image_ok(&image) {
                    ok = false;
                    break;
                }
            }
            if ok {
                depth += 1;
                if depth < n {
                    cursor[depth] = 0;
                }
                continue 'outer;
            }
        }
        assignment[v] = usize::MAX;
        if depth == 0 {
            break;
        }
        depth -= 1;
    }
    Ok(results)
}

/// Vertex order for backtracking: breadth-first over "shares a maximal
/// simplex", starting at `start`, remaining components in ascending order.
fn spanning_order(domain: &SimplicialComplex, start: usize) -> Vec<usize> {
    let n = domain.vertex_count();
    let maximal = domain.maximal_simplices();
    let by_vertex = domain.maximal_by_vertex();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    let enqueue = |v: usize, seen: &mut Vec<bool>, queue: &mut std::collections::VecDeque<usize>| {
        if !seen[v] {
            seen[v] = true;
            queue.push_back(v);
        }
    };
    enqueue(start, &mut seen, &mut queue);
    let mut next_unseen = 0usize;
    loop {
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &mi in &by_vertex[v] {
                for &u in maximal[mi].vertices() {
                    enqueue(u, &mut seen, &mut queue);
                }
            }
        }
        while next_unseen < n && seen[next_unseen] {
            next_unseen += 1;
        }
        if next_unseen == n {
            break;
        }
        enqueue(next_unseen, &mut seen, &mut queue);
    }
    order
}
