//! Finite metric spaces and Vietoris–Rips complexes.
//!
//! A Rips complex at scale `epsilon` keeps every simplex whose vertices are
//! pairwise within `epsilon` (closed threshold), truncated at a mandatory
//! dimension cap.  Because the truncation is by clique size, the resulting
//! simplex set is automatically downward closed.

use std::sync::{Arc, OnceLock};

use crate::complex::{Simplex, SimplicialComplex};
use crate::error::Error;
use crate::maps::{same_complex, SimplicialMap};
use crate::Result;

/// Dimension cap used when callers have no better idea.  Two is enough for
/// the H0/H1 questions this crate asks of Rips complexes.
pub const DEFAULT_RIPS_DIM: usize = 2;

/// A finite metric space given by its full distance matrix, stored dense.
#[derive(Clone, Debug)]
pub struct FiniteMetricSpace {
    n: usize,
    // row-major n x n, validated symmetric with zero diagonal
    d: Vec<f64>,
}

impl FiniteMetricSpace {
    /// Validates and wraps a distance matrix.  Distances must be finite and
    /// non-negative, the diagonal zero, and the matrix exactly symmetric.
    /// Triangle-inequality failures are *not* an error; see
    /// [`FiniteMetricSpace::triangle_violations`].
    pub fn from_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut d = vec![0.0; n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::BadMetric { i, j: row.len() });
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::BadMetric { i, j });
                }
                d[i * n + j] = v;
            }
        }
        for i in 0..n {
            if d[i * n + i] != 0.0 {
                return Err(Error::BadMetric { i, j: i });
            }
            for j in (i + 1)..n {
                if d[i * n + j] != d[j * n + i] {
                    return Err(Error::BadMetric { i, j });
                }
            }
        }
        Ok(FiniteMetricSpace { n, d })
    }

    /// Euclidean metric on a point cloud.  Points may have any common
    /// dimension; mismatched rows are rejected.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let n = points.len();
        let dim = points.first().map_or(0, Vec::len);
        let mut d = vec![0.0; n * n];
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim || p.iter().any(|x| !x.is_finite()) {
                return Err(Error::BadMetric { i, j: p.len() });
            }
            for (j, q) in points.iter().enumerate().take(i) {
                let s: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
                let dist = s.sqrt();
                d[i * n + j] = dist;
                d[j * n + i] = dist;
            }
        }
        Ok(FiniteMetricSpace { n, d })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    /// Ordered triples `(i, j, k)` with `d(i,k) > d(i,j) + d(j,k)`.  Returned
    /// for diagnostics; nothing in this crate refuses to run on them.
    pub fn triangle_violations(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    if self.distance(i, k) > self.distance(i, j) + self.distance(j, k) {
                        out.push((i, j, k));
                    }
                }
            }
        }
        out
    }

    /// All distinct off-diagonal distances, ascending.
    pub fn critical_values(&self) -> Vec<f64> {
        let mut vals: Vec<f64> = (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| self.distance(i, j)))
            .collect();
        vals.sort_by(|a, b| a.partial_cmp(b).expect("validated finite"));
        vals.dedup();
        vals
    }
}

/// Parses a point cloud from CSV text, one point per row, coordinates as
/// columns.  Blank lines and lines starting with `#` are skipped.
pub fn parse_point_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            })
            .collect::<Result<_>>()?;
        points.push(row);
    }
    Ok(points)
}

/// Parses a full square distance matrix from CSV text.
pub fn parse_distance_csv(text: &str) -> Result<FiniteMetricSpace> {
    let rows = parse_point_csv(text)?;
    FiniteMetricSpace::from_matrix(&rows)
}

/// A Rips complex remembers the metric space and scale it came from, so that
/// contiguity tests can use the metric criterion instead of simplex lookups.
#[derive(Clone)]
pub struct RipsComplex {
    space: Arc<FiniteMetricSpace>,
    epsilon: f64,
    max_dim: usize,
    complex: Arc<SimplicialComplex>,
}

impl RipsComplex {
    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }
}

/// Builds `R_epsilon` truncated at `max_dim`.  The cap is mandatory because
/// Rips complexes fill in high-dimensional cliques very quickly.
pub fn rips_complex(
    space: &Arc<FiniteMetricSpace>,
    epsilon: f64,
    max_dim: usize,
) -> RipsComplex {
    let complex = build_rips(space, epsilon, max_dim);
    RipsComplex {
        space: space.clone(),
        epsilon,
        max_dim,
        complex: Arc::new(complex),
    }
}

fn build_rips(space: &FiniteMetricSpace, epsilon: f64, max_dim: usize) -> SimplicialComplex {
    let n = space.len();
    let within = |i: usize, j: usize| space.distance(i, j) <= epsilon;
    // cliques of size k+1, grown one vertex at a time; subsets of cliques are
    // cliques, so the union over sizes is already downward closed
    let mut all: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut frontier = all.clone();
    for _ in 0..max_dim {
        let mut next = Vec::new();
        for clique in &frontier {
            let last = *clique.last().expect("cliques are nonempty");
            for j in (last + 1)..n {
                if clique.iter().all(|&v| within(v, j)) {
                    let mut bigger = clique.clone();
                    bigger.push(j);
                    next.push(bigger);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    let simplices = all.into_iter().map(Simplex::from_sorted).collect();
    SimplicialComplex::from_closed_set(n, simplices, None)
}

/// The Rips filtration of a metric space, materialised lazily per stage.
/// Stage `i` is the Rips complex at the `i`-th distinct off-diagonal
/// distance; an explicit scale-zero stage is prepended when no pair of
/// points coincides, so stage 0 is always the discrete complex.
pub struct RipsFiltration {
    space: Arc<FiniteMetricSpace>,
    max_dim: usize,
    values: Vec<f64>,
    stages: Vec<OnceLock<Arc<SimplicialComplex>>>,
}

impl RipsFiltration {
    pub fn new(space: &Arc<FiniteMetricSpace>, max_dim: usize) -> Self {
        let mut values = space.critical_values();
        if values.first() != Some(&0.0) {
            values.insert(0, 0.0);
        }
        let stages = values.iter().map(|_| OnceLock::new()).collect();
        RipsFiltration {
            space: space.clone(),
            max_dim,
            values,
            stages,
        }
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    /// Scale values of the stages, ascending, starting at 0.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The complex at stage `idx`; built on first use and cached.
    pub fn complex_at(&self, idx: usize) -> Arc<SimplicialComplex> {
        self.stages[idx]
            .get_or_init(|| Arc::new(build_rips(&self.space, self.values[idx], self.max_dim)))
            .clone()
    }

    /// The Rips complex wrapper at stage `idx` (keeps the metric attached).
    pub fn rips_at(&self, idx: usize) -> RipsComplex {
        RipsComplex {
            space: self.space.clone(),
            epsilon: self.values[idx],
            max_dim: self.max_dim,
            complex: self.complex_at(idx),
        }
    }
}

/// Mutual contiguity into a Rips complex via the metric criterion: a family
/// is mutually contiguous iff for every maximal domain simplex the combined
/// image set has diameter at most `epsilon`.  This never materialises
/// high-dimensional simplices of the codomain.
pub fn rips_contiguous(maps: &[&SimplicialMap], rips: &RipsComplex) -> Result<bool> {
    let Some(first) = maps.first() else {
        return Ok(true);
    };
    for f in maps {
        if !same_complex(f.codomain(), rips.complex()) {
            return Err(Error::NotRipsCodomain);
        }
        if !same_complex(f.domain(), first.domain()) {
            return Err(Error::MixedComplexes);
        }
    }
    let space = rips.space();
    let eps = rips.epsilon();
    let mut image: Vec<usize> = Vec::new();
    for sigma in first.domain().maximal_simplices() {
        image.clear();
        for f in maps {
            image.extend(sigma.vertices().iter().map(|&v| f.apply(v)));
        }
        image.sort_unstable();
        image.dedup();
        for (a, &u) in image.iter().enumerate() {
            for &w in &image[a + 1..] {
                if space.distance(u, w) > eps {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::StandardComplex;

    fn square_cloud() -> Arc<FiniteMetricSpace> {
        // unit square: side 1, diagonal sqrt(2)
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ];
        Arc::new(FiniteMetricSpace::from_points(&pts).unwrap())
    }

    #[test]
    fn rejects_bad_matrices() {
        let asym = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
        assert!(matches!(
            FiniteMetricSpace::from_matrix(&asym),
            Err(Error::BadMetric { .. })
        ));
        let diag = vec![vec![0.5]];
        assert!(FiniteMetricSpace::from_matrix(&diag).is_err());
        let nan = vec![vec![0.0, f64::NAN], vec![f64::NAN, 0.0]];
        assert!(FiniteMetricSpace::from_matrix(&nan).is_err());
    }

    #[test]
    fn square_rips_stages() {
        let space = square_cloud();
        // below the side length: four isolated vertices
        let r = rips_complex(&space, 0.5, 2);
        assert_eq!(r.complex().f_vector(), vec![4]);
        // at the side length: the 4-cycle, no diagonals
        let r = rips_complex(&space, 1.0, 2);
        assert_eq!(r.complex().f_vector(), vec![4, 4]);
        assert_eq!(
            *r.complex().as_ref(),
            StandardComplex::Circle(4).build().unwrap()
        );
        // at the diagonal: everything up to the cap
        let r = rips_complex(&space, 1.5, 2);
        assert_eq!(r.complex().f_vector(), vec![4, 6, 4]);
        let r3 = rips_complex(&space, 1.5, 3);
        assert_eq!(r3.complex().f_vector(), vec![4, 6, 4, 1]);
    }

    #[test]
    fn closed_threshold_includes_equal_distances() {
        let space = square_cloud();
        let diag = space.distance(0, 2);
        let r = rips_complex(&space, diag, 2);
        assert!(r.complex().contains(&[0, 2]));
        let r = rips_complex(&space, diag - 1e-9, 2);
        assert!(!r.complex().contains(&[0, 2]));
    }

    #[test]
    fn filtration_stages_are_cached_and_monotone() {
        let space = square_cloud();
        let filt = RipsFiltration::new(&space, 2);
        // distinct distances 1 and sqrt(2), plus the synthetic zero stage
        assert_eq!(filt.len(), 3);
        assert_eq!(filt.values()[0], 0.0);
        let a = filt.complex_at(1);
        let b = filt.complex_at(1);
        assert!(Arc::ptr_eq(&a, &b));
        for i in 1..filt.len() {
            let prev = filt.complex_at(i - 1);
            let cur = filt.complex_at(i);
            for s in prev.simplices() {
                assert!(cur.contains_simplex(s));
            }
        }
    }

    #[test]
    fn coincident_points_skip_synthetic_zero_stage() {
        let pts = vec![vec![0.0], vec![0.0], vec![1.0]];
        let space = Arc::new(FiniteMetricSpace::from_points(&pts).unwrap());
        let filt = RipsFiltration::new(&space, 1);
        assert_eq!(filt.values(), &[0.0, 1.0]);
        // the zero stage already identifies the coincident pair
        assert!(filt.complex_at(0).contains(&[0, 1]));
    }

    #[test]
    fn metric_contiguity_matches_simplex_test() {
        use crate::contiguity::mutually_contiguous;
        let space = square_cloud();
        let dom = Arc::new(StandardComplex::Circle(4).build().unwrap());
        let pairs: [(&[usize], &[usize]); 3] = [
            (&[0, 1, 2, 3], &[1, 2, 3, 0]),
            (&[0, 1, 2, 3], &[2, 3, 0, 1]),
            (&[0, 0, 0, 0], &[1, 1, 1, 1]),
        ];
        // at the side length there are no triangles and neighbours sit at
        // diameter sqrt(2); at the diagonal with dim 3 the complex is full
        for (eps, max_dim) in [(1.0, 2), (2f64.sqrt(), 3)] {
            let r = rips_complex(&space, eps, max_dim);
            for (a, b) in pairs {
                let f = SimplicialMap::new(dom.clone(), r.complex().clone(), a.to_vec()).unwrap();
                let g = SimplicialMap::new(dom.clone(), r.complex().clone(), b.to_vec()).unwrap();
                assert_eq!(
                    rips_contiguous(&[&f, &g], &r).unwrap(),
                    mutually_contiguous(&[&f, &g]).unwrap(),
                    "eps {eps} pair {a:?} {b:?}"
                );
            }
        }
        // the metric test sees the untruncated complex: capping the diagonal
        // complex at dim 2 drops the solid tetrahedron but not the fact that
        // all four points fit inside the scale
        let r = rips_complex(&space, 2f64.sqrt(), 2);
        let id = SimplicialMap::new(dom.clone(), r.complex().clone(), vec![0, 1, 2, 3]).unwrap();
        let opp = SimplicialMap::new(dom, r.complex().clone(), vec![2, 3, 0, 1]).unwrap();
        assert!(rips_contiguous(&[&id, &opp], &r).unwrap());
        assert!(!mutually_contiguous(&[&id, &opp]).unwrap());
    }

    #[test]
    fn csv_parsing_roundtrip() {
        let text = "# corners\n0,0\n1, 0\n\n1,1\n0,1\n";
        let pts = parse_point_csv(text).unwrap();
        assert_eq!(pts.len(), 4);
        let space = FiniteMetricSpace::from_points(&pts).unwrap();
        assert!((space.distance(0, 2) - 2f64.sqrt()).abs() < 1e-12);
        let bad = parse_distance_csv("0,1\n1,0.5\n");
        assert!(bad.is_err());
    }
}
