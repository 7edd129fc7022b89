use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::complex::{product_vertex, Simplex, SimplicialComplex};
use crate::error::Error;
use crate::maps::{enumerate_maps, same_complex, SimplicialMap};
use crate::subdivision::Subdivision;
use crate::unionfind::UnionFind;
use crate::Result;

/// Tests whether a family of maps is mutually contiguous: for every maximal
/// simplex of the shared domain, the union of all images must be a simplex
/// of the shared codomain. Checking maximal simplices suffices because the
/// union over a face is a subset of the union over any containing simplex.
pub fn mutually_contiguous(maps: &[&SimplicialMap]) -> Result<bool> {
    let first = match maps.first() {
        Some(f) => f,
        None => return Ok(true),
    };
    for f in &maps[1..] {
        if !same_complex(f.domain(), first.domain()) || !same_complex(f.codomain(), first.codomain())
        {
            return Err(Error::MixedComplexes);
        }
    }
    let codomain = first.codomain();
    let mut union = Vec::new();
    Ok(family_contiguous(
        first.domain().maximal_simplices(),
        &|img| codomain.contains(img),
        &maps.iter().map(|f| f.assignment()).collect::<Vec<_>>(),
        &mut union,
    ))
}

/// Contiguity of a pair, the common case.
pub fn contiguous(f: &SimplicialMap, g: &SimplicialMap) -> Result<bool> {
    mutually_contiguous(&[f, g])
}

/// Assignment-level mutual contiguity test against an abstract codomain
/// simplex predicate; `image_ok` receives sorted deduplicated vertex sets.
pub(crate) fn family_contiguous(
    maximal: &[Simplex],
    image_ok: &dyn Fn(&[usize]) -> bool,
    assignments: &[&[usize]],
    union: &mut Vec<usize>,
) -> bool {
    for s in maximal {
        union.clear();
        for a in assignments {
            union.extend(s.vertices().iter().map(|&v| a[v]));
        }
        union.sort_unstable();
        union.dedup();
        if !image_ok(union) {
            return false;
        }
    }
    true
}

/// The mapping complex: one vertex per simplicial map from `x` to `y`,
/// simplices the mutually contiguous families, materialized up to `max_dim`.
pub struct ContiguityComplex {
    domain: Arc<SimplicialComplex>,
    codomain: Arc<SimplicialComplex>,
    maps: Vec<SimplicialMap>,
    index: HashMap<Vec<usize>, usize>,
    complex: Arc<SimplicialComplex>,
    max_dim: usize,
}

impl ContiguityComplex {
    pub fn maps(&self) -> &[SimplicialMap] {
        &self.maps
    }

    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    pub fn domain(&self) -> &Arc<SimplicialComplex> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<SimplicialComplex> {
        &self.codomain
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    /// Index of the map with the given vertex assignment, if enumerated.
    pub fn find(&self, assignment: &[usize]) -> Option<usize> {
        self.index.get(assignment).copied()
    }
}

/// Builds the mapping complex. Families are grown level by level: a set is
/// tested only when all its facets are already present, and every candidate
/// set is verified mutually contiguous directly (pairwise contiguity does
/// not imply higher families).
pub fn build_contiguity_complex(
    x: &Arc<SimplicialComplex>,
    y: &Arc<SimplicialComplex>,
    based: Option<(usize, usize)>,
    max_dim: usize,
    cap: usize,
) -> Result<ContiguityComplex> {
    let maps = enumerate_maps(x, y, based, cap)?;
    let maximal = x.maximal_simplices();
    let image_ok = |img: &[usize]| y.contains(img);
    let assignments: Vec<&[usize]> = maps.iter().map(|f| f.assignment()).collect();
    let mut union = Vec::new();

    let mut simplices: HashSet<Simplex> = HashSet::new();
    for i in 0..maps.len() {
        simplices.insert(Simplex::new([i]));
    }
    let mut level: Vec<Vec<usize>> = (0..maps.len()).map(|i| vec![i]).collect();
    let mut dim = 0usize;
    while dim < max_dim && !level.is_empty() {
        let mut next: Vec<Vec<usize>> = Vec::new();
        for family in &level {
            let last = *family.last().expect("nonempty");
            'candidate: for j in last + 1..maps.len() {
                // All facets of the extended family must already be present;
                // the facet missing `last` is checked via the level set below.
                let mut extended = family.clone();
                extended.push(j);
                if dim > 0 {
                    for drop in 0..extended.len() - 1 {
                        let mut facet = extended.clone();
                        facet.remove(drop);
                        if !simplices.contains(&Simplex::from_sorted(facet)) {
                            continue 'candidate;
                        }
                    }
                }
                let members: Vec<&[usize]> =
                    extended.iter().map(|&i| assignments[i]).collect();
                if family_contiguous(maximal, &image_ok, &members, &mut union) {
                    simplices.insert(Simplex::from_sorted(extended.clone()));
                    next.push(extended);
                }
            }
        }
        level = next;
        dim += 1;
    }

    let index: HashMap<Vec<usize>, usize> = maps
        .iter()
        .enumerate()
        .map(|(i, f)| (f.assignment().to_vec(), i))
        .collect();
    let complex = Arc::new(SimplicialComplex::from_closed_set(maps.len(), simplices, None));
    Ok(ContiguityComplex {
        domain: x.clone(),
        codomain: y.clone(),
        maps,
        index,
        complex,
        max_dim,
    })
}

/// Partition of the simplicial maps from one complex to another into
/// contiguity classes: connected components of the pairwise contiguity graph.
pub struct ClassPartition {
    maps: Vec<SimplicialMap>,
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl ClassPartition {
    pub fn maps(&self) -> &[SimplicialMap] {
        &self.maps
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, map_index: usize) -> usize {
        self.class_of[map_index]
    }

    /// Member map indices per class, each ascending; classes ordered by
    /// their lowest member.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.len()).collect()
    }

    /// Lowest-index member of each class.
    pub fn representatives(&self) -> Vec<&SimplicialMap> {
        self.classes.iter().map(|c| &self.maps[c[0]]).collect()
    }
}

/// Enumerates all maps and merges pairwise contiguous ones. Pairs already
/// known connected are skipped; dropping edges inside a component cannot
/// change the components.
pub fn exact_class_count(
    x: &Arc<SimplicialComplex>,
    y: &Arc<SimplicialComplex>,
    based: Option<(usize, usize)>,
    cap: usize,
) -> Result<ClassPartition> {
    let maps = enumerate_maps(x, y, based, cap)?;
    let assignments: Vec<&[usize]> = maps.iter().map(|f| f.assignment()).collect();
    let image_ok = |img: &[usize]| y.contains(img);
    let partition = partition_by_contiguity(x.maximal_simplices(), &image_ok, &assignments);
    Ok(attach_partition(maps, partition))
}

pub(crate) fn partition_by_contiguity(
    maximal: &[Simplex],
    image_ok: &dyn Fn(&[usize]) -> bool,
    assignments: &[&[usize]],
) -> UnionFind {
    let mut uf = UnionFind::new(assignments.len());
    let mut union = Vec::new();
    for i in 0..assignments.len() {
        for j in i + 1..assignments.len() {
            if uf.find(i) == uf.find(j) {
                continue;
            }
            if family_contiguous(maximal, image_ok, &[assignments[i], assignments[j]], &mut union)
            {
                uf.union(i, j);
            }
        }
    }
    uf
}

pub(crate) fn attach_partition(maps: Vec<SimplicialMap>, mut uf: UnionFind) -> ClassPartition {
    let roots = uf.labels();
    let mut root_to_class: HashMap<usize, usize> = HashMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of = vec![0usize; maps.len()];
    for (i, &r) in roots.iter().enumerate() {
        let next = root_to_class.len();
        let c = *root_to_class.entry(r).or_insert(next);
        if c == classes.len() {
            classes.push(Vec::new());
        }
        classes[c].push(i);
        class_of[i] = c;
    }
    ClassPartition {
        maps,
        class_of,
        classes,
    }
}

/// Tie-break rule for choosing a carrier vertex during simplicial
/// approximation. Neither choice is canonical; any choice satisfies the
/// carrier condition, and different choices yield contiguous maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Tiebreak {
    #[default]
    LowestVertexId,
    MaxWeight,
}

/// Simplicial approximation of the subdivision homeomorphism: each refined
/// vertex is sent to a vertex of its carrier. The carrier condition holds by
/// construction since carriers are support unions.
pub fn approximate_subdivision(sub: &Subdivision, tiebreak: Tiebreak) -> SimplicialMap {
    let assignment: Vec<usize> = sub
        .embedding()
        .iter()
        .map(|g| {
            let support = g.support();
            match tiebreak {
                Tiebreak::LowestVertexId => support[0],
                Tiebreak::MaxWeight => {
                    let mut best = support[0];
                    for &v in &support {
                        if g.weight(v) > g.weight(best) {
                            best = v;
                        }
                    }
                    best
                }
            }
        })
        .collect();
    SimplicialMap::new(sub.refined().clone(), sub.ancestor().clone(), assignment)
        .expect("carrier vertices give a simplicial map")
}

/// Verification used by tests and callers: the image of every refined
/// simplex must lie inside that simplex's carrier.
pub fn approximation_respects_carriers(sub: &Subdivision, f: &SimplicialMap) -> Result<bool> {
    if !same_complex(f.domain(), sub.refined()) || !same_complex(f.codomain(), sub.ancestor()) {
        return Err(Error::MixedComplexes);
    }
    for s in sub.refined().simplices() {
        let carrier = sub.carrier(s)?;
        if !f.image_of(s.vertices()).iter().all(|&w| carrier.contains_vertex(w)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One direction of the exponential correspondence: a map out of a product
/// `x ⊠ z` becomes the map sending each `z`-vertex to the slice map
/// `f(-, w)`, a vertex of the mapping complex.
pub fn exponential_transpose(
    f: &SimplicialMap,
    x: &Arc<SimplicialComplex>,
    z: &Arc<SimplicialComplex>,
    mapping: &ContiguityComplex,
) -> Result<SimplicialMap> {
    let (xc, zc) = (x.vertex_count(), z.vertex_count());
    if f.domain().vertex_count() != xc * zc
        || !same_complex(mapping.domain(), x)
        || !same_complex(f.codomain(), mapping.codomain())
    {
        return Err(Error::MixedComplexes);
    }
    let mut assignment = Vec::with_capacity(zc);
    for w in 0..zc {
        let slice: Vec<usize> = (0..xc)
            .map(|v| f.apply(product_vertex(v, w, zc)))
            .collect();
        assignment.push(mapping.find(&slice).ok_or(Error::MapNotInTable)?);
    }
    SimplicialMap::new(z.clone(), mapping.complex().clone(), assignment)
}

/// The inverse direction: a map into the mapping complex spreads out to a
/// map off the product, `(v, w)` going to `g(w)` evaluated at `v`.
pub fn exponential_transpose_inverse(
    g: &SimplicialMap,
    mapping: &ContiguityComplex,
    product: &Arc<SimplicialComplex>,
) -> Result<SimplicialMap> {
    if !same_complex(g.codomain(), mapping.complex()) {
        return Err(Error::MixedComplexes);
    }
    let (xc, zc) = (
        mapping.domain().vertex_count(),
        g.domain().vertex_count(),
    );
    if product.vertex_count() != xc * zc {
        return Err(Error::MixedComplexes);
    }
    let mut assignment = vec![0usize; xc * zc];
    for w in 0..zc {
        let slice = mapping.maps()[g.apply(w)].assignment();
        for v in 0..xc {
            assignment[product_vertex(v, w, zc)] = slice[v];
        }
    }
    SimplicialMap::new(
        product.clone(),
        mapping.codomain().clone(),
        assignment,
    )
}
