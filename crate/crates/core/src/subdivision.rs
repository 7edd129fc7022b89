use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::complex::{barycentric_complex, Simplex, SimplicialComplex};
use crate::error::Error;
use crate::Result;

/// A point of the geometric realization of a complex, as exact barycentric
/// coordinates over the complex's vertices. Weights are positive rationals
/// summing to 1 and the support must span a simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricVertex {
    coords: BTreeMap<usize, BigRational>,
}

impl GeometricVertex {
    pub fn new(
        coords: BTreeMap<usize, BigRational>,
        ancestor: &SimplicialComplex,
    ) -> Result<Self> {
        if coords.is_empty() || coords.values().any(|w| !w.is_positive()) {
            return Err(Error::BadWeights);
        }
        let total: BigRational = coords.values().sum();
        if !total.is_one() {
            return Err(Error::BadWeights);
        }
        let support: Vec<usize> = coords.keys().copied().collect();
        if !ancestor.contains(&support) {
            return Err(Error::SupportNotSimplex);
        }
        Ok(GeometricVertex { coords })
    }

    fn at_vertex(v: usize) -> Self {
        let mut coords = BTreeMap::new();
        coords.insert(v, BigRational::one());
        GeometricVertex { coords }
    }

    /// Equal-weight average of the given points.
    fn barycenter(points: &[&GeometricVertex]) -> Self {
        let n = BigRational::from_integer(points.len().into());
        let mut coords: BTreeMap<usize, BigRational> = BTreeMap::new();
        for p in points {
            for (v, w) in &p.coords {
                let entry = coords.entry(*v).or_insert_with(BigRational::zero);
                *entry += w / &n;
            }
        }
        GeometricVertex { coords }
    }

    /// Ancestor vertices with nonzero weight, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.coords.keys().copied().collect()
    }

    pub fn weight(&self, v: usize) -> Option<&BigRational> {
        self.coords.get(&v)
    }

    pub fn coords(&self) -> &BTreeMap<usize, BigRational> {
        &self.coords
    }

    /// Squared Euclidean distance with ancestor vertices orthonormal.
    pub fn distance_squared(&self, other: &GeometricVertex) -> BigRational {
        let mut total = BigRational::zero();
        for (v, w) in &self.coords {
            let diff = match other.coords.get(v) {
                Some(u) => w - u,
                None => w.clone(),
            };
            total += &diff * &diff;
        }
        for (v, u) in &other.coords {
            if !self.coords.contains_key(v) {
                total += u * u;
            }
        }
        total
    }
}

/// A refinement of a complex together with the exact embedding of the
/// refined vertices into the geometric realization of the ancestor. Iterated
/// refinements keep the original ancestor, so mesh size is always measured
/// in the original complex.
pub struct Subdivision {
    ancestor: Arc<SimplicialComplex>,
    refined: Arc<SimplicialComplex>,
    embedding: Vec<GeometricVertex>,
    carriers: HashMap<Simplex, Simplex>,
}

impl Subdivision {
    /// The trivial subdivision: refined complex is the ancestor itself.
    pub fn identity(x: Arc<SimplicialComplex>) -> Self {
        let embedding: Vec<GeometricVertex> = (0..x.vertex_count())
            .map(GeometricVertex::at_vertex)
            .collect();
        let carriers = compute_carriers(&x, &embedding, &x);
        Subdivision {
            ancestor: x.clone(),
            refined: x,
            embedding,
            carriers,
        }
    }

    /// One barycentric refinement step. The result's ancestor is this
    /// subdivision's ancestor, with coordinates composed through it.
    pub fn refine(&self) -> Self {
        let (complex, cells) = barycentric_complex(&self.refined);
        let embedding: Vec<GeometricVertex> = cells
            .iter()
            .map(|cell| {
                let points: Vec<&GeometricVertex> = cell
                    .vertices()
                    .iter()
                    .map(|&v| &self.embedding[v])
                    .collect();
                GeometricVertex::barycenter(&points)
            })
            .collect();
        let refined = Arc::new(complex);
        let carriers = compute_carriers(&refined, &embedding, &self.ancestor);
        Subdivision {
            ancestor: self.ancestor.clone(),
            refined,
            embedding,
            carriers,
        }
    }

    pub fn ancestor(&self) -> &Arc<SimplicialComplex> {
        &self.ancestor
    }

    pub fn refined(&self) -> &Arc<SimplicialComplex> {
        &self.refined
    }

    pub fn embedding(&self) -> &[GeometricVertex] {
        &self.embedding
    }

    /// Minimal ancestor simplex whose geometric simplex contains the given
    /// refined simplex: the union of the coordinate supports of its vertices.
    pub fn carrier(&self, simplex: &Simplex) -> Result<&Simplex> {
        self.carriers.get(simplex).ok_or(Error::UnknownSimplex)
    }

    /// Largest embedded edge length, ancestor vertices orthonormal.
    /// Zero for complexes without 1-simplices.
    pub fn mesh_size(&self) -> f64 {
        self.mesh_size_squared()
            .to_f64()
            .map(f64::sqrt)
            .unwrap_or(f64::INFINITY)
    }

    /// Exact square of the mesh size, for comparisons against rational bounds.
    pub fn mesh_size_squared(&self) -> BigRational {
        let mut max = BigRational::zero();
        for s in self.refined.simplices() {
            if s.dim() != 1 {
                continue;
            }
            let d = self.embedding[s.vertices()[0]].distance_squared(&self.embedding[s.vertices()[1]]);
            if d > max {
                max = d;
            }
        }
        max
    }
}

/// Every refined simplex has a well-defined carrier: the union of supports,
/// which valid subdivisions guarantee is an ancestor simplex.
fn compute_carriers(
    refined: &SimplicialComplex,
    embedding: &[GeometricVertex],
    ancestor: &SimplicialComplex,
) -> HashMap<Simplex, Simplex> {
    let supports: Vec<Vec<usize>> = embedding.iter().map(|g| g.support()).collect();
    refined
        .simplices()
        .map(|s| {
            let mut union: Vec<usize> = Vec::new();
            for &v in s.vertices() {
                union.extend_from_slice(&supports[v]);
            }
            union.sort_unstable();
            union.dedup();
            assert!(
                ancestor.contains(&union),
                "support union must be an ancestor simplex"
            );
            (s.clone(), Simplex::new(union))
        })
        .collect()
}

/// Barycentric subdivision of a complex: one vertex per simplex, placed at
/// the equal-weight barycenter; simplices are the flags of the face poset.
pub fn barycentric_subdivision(x: &Arc<SimplicialComplex>) -> Subdivision {
    Subdivision::identity(x.clone()).refine()
}

/// `n`-fold barycentric subdivision; `n = 0` gives the identity subdivision.
pub fn iterated_subdivision(x: &Arc<SimplicialComplex>, n: usize) -> Subdivision {
    let mut sub = Subdivision::identity(x.clone());
    for _ in 0..n {
        sub = sub.refine();
    }
    sub
}
