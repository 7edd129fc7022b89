//! Brute-force oracles and seeded generators shared by the integration
//! suites. Everything here recomputes results from first principles —
//! subset enumeration, dense Gaussian elimination, explicit matrix powers,
//! plain BFS — so agreement with the library is evidence, not circularity.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};
use std::ops::RangeInclusive;
use std::sync::Arc;

use contig_core::{Simplex, SimplicialComplex};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn arc(c: SimplicialComplex) -> Arc<SimplicialComplex> {
    Arc::new(c)
}

/// Every nonempty subset of every facet plus all singletons, as sorted
/// vertex lists. Bitmask enumeration; facets must stay small.
pub fn subset_closure(vertex_count: usize, facets: &[Vec<usize>]) -> HashSet<Vec<usize>> {
    let mut out: HashSet<Vec<usize>> = (0..vertex_count).map(|v| vec![v]).collect();
    for facet in facets {
        let mut vs = facet.clone();
        vs.sort_unstable();
        vs.dedup();
        let n = vs.len();
        assert!(n <= 20, "oracle sized for small facets");
        for mask in 1u32..(1 << n) {
            let subset: Vec<usize> = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| vs[i])
                .collect();
            out.insert(subset);
        }
    }
    out
}

/// Simpliciality checked on every simplex of the domain, not only the
/// maximal ones.
pub fn simplicial_on_all(x: &SimplicialComplex, y: &SimplicialComplex, a: &[usize]) -> bool {
    x.simplices().all(|s| {
        let mut img: Vec<usize> = s.vertices().iter().map(|&v| a[v]).collect();
        img.sort_unstable();
        img.dedup();
        y.contains(&img)
    })
}

/// Mutual contiguity checked on every simplex of the domain — the raw
/// definition, before the maximal-simplex reduction.
pub fn family_contiguous_on_all(
    x: &SimplicialComplex,
    y: &SimplicialComplex,
    assignments: &[&[usize]],
) -> bool {
    x.simplices().all(|s| {
        let mut img: Vec<usize> = Vec::new();
        for a in assignments {
            img.extend(s.vertices().iter().map(|&v| a[v]));
        }
        img.sort_unstable();
        img.dedup();
        y.contains(&img)
    })
}

pub fn contiguous_on_all(
    x: &SimplicialComplex,
    y: &SimplicialComplex,
    a: &[usize],
    b: &[usize],
) -> bool {
    family_contiguous_on_all(x, y, &[a, b])
}

/// Odometer enumeration of all simplicial vertex assignments, independent
/// of the library's backtracking enumerator. `m^n` must stay tiny.
pub fn enumerate_assignments_oracle(
    x: &SimplicialComplex,
    y: &SimplicialComplex,
    based: Option<(usize, usize)>,
) -> Vec<Vec<usize>> {
    let (n, m) = (x.vertex_count(), y.vertex_count());
    let total = m.checked_pow(n as u32).expect("oracle sized for tiny instances");
    assert!(total <= 5_000_000, "oracle sized for tiny instances");
    let mut out = Vec::new();
    for code in 0..total {
        let mut a = vec![0usize; n];
        let mut c = code;
        for slot in a.iter_mut() {
            *slot = c % m;
            c /= m;
        }
        if let Some((bx, by)) = based {
            if a[bx] != by {
                continue;
            }
        }
        if simplicial_on_all(x, y, &a) {
            out.push(a);
        }
    }
    out
}

/// Contiguity-class sizes by BFS over the pairwise all-simplices test,
/// ascending.
pub fn class_sizes_oracle(
    x: &SimplicialComplex,
    y: &SimplicialComplex,
    assignments: &[Vec<usize>],
) -> Vec<usize> {
    let n = assignments.len();
    let mut seen = vec![false; n];
    let mut sizes = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut size = 0usize;
        while let Some(i) = queue.pop_front() {
            size += 1;
            for j in 0..n {
                if !seen[j] && contiguous_on_all(x, y, &assignments[i], &assignments[j]) {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        sizes.push(size);
    }
    sizes.sort_unstable();
    sizes
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Dense Gaussian elimination rank over GF(p). `p` must be prime and small
/// enough that `p^2` fits in u64.
pub fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0usize;
    let mut at = 0usize;
    for col in 0..ncols {
        let Some(pivot) = (at..rows.len()).find(|&r| rows[r][col] % p != 0) else {
            continue;
        };
        rows.swap(at, pivot);
        let inv = pow_mod(rows[at][col], p - 2, p);
        for c in col..ncols {
            rows[at][c] = rows[at][c] % p * inv % p;
        }
        for r in 0..rows.len() {
            if r != at && rows[r][col] % p != 0 {
                let factor = rows[r][col] % p;
                for c in col..ncols {
                    let sub = factor * rows[at][c] % p;
                    rows[r][c] = (rows[r][c] % p + p - sub) % p;
                }
            }
        }
        at += 1;
        rank += 1;
        if at == rows.len() {
            break;
        }
    }
    rank
}

/// Betti numbers from dense boundary matrices and Gaussian elimination.
pub fn betti_oracle(c: &SimplicialComplex, p: u64) -> Vec<usize> {
    let Some(dim) = c.dim() else {
        return Vec::new();
    };
    let mut by_dim: Vec<Vec<&Simplex>> = vec![Vec::new(); dim + 1];
    for s in c.sorted_simplices() {
        by_dim[s.dim()].push(s);
    }
    let index: Vec<HashMap<&[usize], usize>> = by_dim
        .iter()
        .map(|level| {
            level
                .iter()
                .enumerate()
                .map(|(i, s)| (s.vertices(), i))
                .collect()
        })
        .collect();
    // ranks[k] = rank of the boundary map from k-chains to (k-1)-chains
    let mut ranks = vec![0usize; dim + 2];
    for k in 1..=dim {
        let rows = by_dim[k - 1].len();
        let mut matrix = vec![vec![0u64; by_dim[k].len()]; rows];
        for (j, s) in by_dim[k].iter().enumerate() {
            for (drop, facet) in s.facets().iter().enumerate() {
                let i = index[k - 1][facet.vertices()];
                matrix[i][j] = if drop % 2 == 0 { 1 } else { p - 1 };
            }
        }
        ranks[k] = rank_mod_p(matrix, p);
    }
    (0..=dim)
        .map(|k| by_dim[k].len() - ranks[k] - ranks[k + 1])
        .collect()
}

fn mat_mul(a: &[Vec<BigUint>], b: &[Vec<BigUint>]) -> Vec<Vec<BigUint>> {
    let n = a.len();
    let mut out = vec![vec![BigUint::zero(); n]; n];
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    out[i][j] += aik * &b[k][j];
                }
            }
        }
    }
    out
}

/// Based closed walk count of length `k` in the 1-skeleton via an explicit
/// big-integer matrix power; `reflexive` adds identity loops (collapsed
/// edges).
pub fn walk_total_oracle(
    y: &SimplicialComplex,
    base: usize,
    k: usize,
    reflexive: bool,
) -> BigUint {
    let n = y.vertex_count();
    let mut m = vec![vec![BigUint::zero(); n]; n];
    for s in y.simplices() {
        if s.dim() == 1 {
            let (u, v) = (s.vertices()[0], s.vertices()[1]);
            m[u][v] = BigUint::one();
            m[v][u] = BigUint::one();
        }
    }
    if reflexive {
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = BigUint::one();
        }
    }
    let mut acc = vec![vec![BigUint::zero(); n]; n];
    for (i, row) in acc.iter_mut().enumerate() {
        row[i] = BigUint::one();
    }
    for _ in 0..k {
        acc = mat_mul(&acc, &m);
    }
    acc[base][base].clone()
}

/// Connected components of the 1-skeleton by BFS over edge lists rebuilt
/// from scratch.
pub fn component_count_oracle(c: &SimplicialComplex) -> usize {
    let n = c.vertex_count();
    let mut adj = vec![Vec::new(); n];
    for s in c.simplices() {
        if s.dim() == 1 {
            let (u, v) = (s.vertices()[0], s.vertices()[1]);
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    let mut seen = vec![false; n];
    let mut components = 0usize;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    components
}

/// Random small complex with bounded facet count and size, so exhaustive
/// oracles stay tractable.
pub fn random_complex(
    rng: &mut ChaCha8Rng,
    vertices: RangeInclusive<usize>,
    max_facets: usize,
    max_facet_size: usize,
) -> SimplicialComplex {
    let n = rng.gen_range(vertices);
    let count = rng.gen_range(1..=max_facets);
    let facets: Vec<Vec<usize>> = (0..count)
        .map(|_| {
            let size = rng.gen_range(1..=max_facet_size.min(n));
            let mut ids: Vec<usize> = (0..n).collect();
            for i in 0..size {
                let j = rng.gen_range(i..n);
                ids.swap(i, j);
            }
            ids[..size].to_vec()
        })
        .collect();
    SimplicialComplex::from_facets(n, &facets).expect("small instance")
}

pub fn random_cloud(rng: &mut ChaCha8Rng, points: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..points)
        .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect()
}

/// Rejection-sample a simplicial vertex assignment; `None` when the budget
/// runs out (sparse targets).
pub fn random_simplicial_assignment(
    rng: &mut ChaCha8Rng,
    x: &SimplicialComplex,
    y: &SimplicialComplex,
    attempts: usize,
) -> Option<Vec<usize>> {
    let (n, m) = (x.vertex_count(), y.vertex_count());
    for _ in 0..attempts {
        let a: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
        if simplicial_on_all(x, y, &a) {
            return Some(a);
        }
    }
    None
}

/// Nested stages: downward closures of growing prefixes of one facet list,
/// all over the same vertex set.
pub fn random_filtration(rng: &mut ChaCha8Rng, stages: usize) -> Vec<Arc<SimplicialComplex>> {
    let full = random_complex(rng, 4..=8, stages.max(2), 3);
    let facets: Vec<Vec<usize>> = full
        .maximal_simplices()
        .iter()
        .map(|s| s.vertices().to_vec())
        .collect();
    let n = full.vertex_count();
    (0..=facets.len())
        .map(|take| arc(SimplicialComplex::from_facets(n, &facets[..take]).expect("small")))
        .collect()
}

/// Chi-squared statistic against the uniform expectation over all cells.
pub fn chi_squared_uniform(observed: &[u64]) -> f64 {
    let total: u64 = observed.iter().sum();
    let expected = total as f64 / observed.len() as f64;
    observed
        .iter()
        .map(|&o| {
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum()
}
