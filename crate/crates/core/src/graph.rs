//! Odd graphs O_k, their distance stratification and intersection numbers.
//!
//! A vertex of O_k is a (k-1)-subset of the ground set {1, ..., 2k-1},
//! stored as a bitmask whose bit `j` marks element `j + 1`. Two vertices are
//! adjacent exactly when their masks are disjoint.
//!
//! Intersection numbers use the backward/forward naming of the quantum
//! probability literature, which is swapped with respect to
//! Brouwer-Cohen-Neumaier:
//!
//! - `b[i]` counts the neighbours of a distance-`i` vertex at distance `i - 1`,
//! - `c[i]` counts those at distance `i + 1`,
//! - `a[i]` counts those at distance `i`,
//!
//! with `b[0] = c[d] = 0`.

use std::collections::VecDeque;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest degree for which the full vertex set is materialized.
pub const K_MAX: usize = 8;

/// Smallest admissible degree.
pub const K_MIN: usize = 2;

/// The odd graph O_k with an explicit neighbour table.
#[derive(Debug, Clone)]
pub struct OddGraph {
    k: usize,
    vertices: Vec<u32>,
    neighbors: Vec<Vec<usize>>,
}

impl OddGraph {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ground_set_size(&self) -> usize {
        2 * self.k - 1
    }

    /// Vertex bitmasks, sorted ascending.
    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn mask(&self, v: usize) -> u32 {
        self.vertices[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.vertices[u] & self.vertices[v] == 0
    }

    /// Index of the vertex with the given mask, if it is one.
    pub fn index_of(&self, mask: u32) -> Option<usize> {
        self.vertices.binary_search(&mask).ok()
    }

    /// The lexicographically smallest (k-1)-subset, {1, ..., k-1}.
    pub fn default_origin(&self) -> usize {
        0
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                index: v,
                count: self.vertex_count(),
            })
        }
    }

    /// BFS distances from `source` to every vertex.
    pub fn distances_from(&self, source: usize) -> Result<Vec<usize>> {
        self.check_vertex(source)?;
        let mut dist = vec![usize::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &w in &self.neighbors[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        Ok(dist)
    }

    /// Dense 0/1 adjacency matrix in row-major order.
    pub fn adjacency_dense(&self) -> Vec<Vec<u8>> {
        let n = self.vertex_count();
        let mut a = vec![vec![0u8; n]; n];
        for (u, row) in self.neighbors.iter().enumerate() {
            for &v in row {
                a[u][v] = 1;
            }
        }
        a
    }
}

/// Next integer with the same popcount (Gosper's hack).
fn next_same_popcount(x: u32) -> u32 {
    let c = x & x.wrapping_neg();
    let r = x + c;
    (((r ^ x) >> 2) / c) | r
}

/// Enumerates O_k with vertices sorted ascending by bitmask.
pub fn build_odd_graph(k: usize) -> Result<OddGraph> {
    if !(K_MIN..=K_MAX).contains(&k) {
        return Err(Error::DegreeOutOfRange {
            k,
            min: K_MIN,
            max: K_MAX,
        });
    }
    let bits = 2 * k - 1;
    let limit = 1u32 << bits;
    let mut vertices = Vec::with_capacity(binomial(bits as u64, (k - 1) as u64) as usize);
    let mut mask = (1u32 << (k - 1)) - 1;
    while mask < limit {
        vertices.push(mask);
        mask = next_same_popcount(mask);
    }

    let neighbors = vertices
        .iter()
        .map(|&u| {
            vertices
                .iter()
                .enumerate()
                .filter(|&(_, &v)| u & v == 0)
                .map(|(j, _)| j)
                .collect()
        })
        .collect();

    Ok(OddGraph {
        k,
        vertices,
        neighbors,
    })
}

/// Binomial coefficient, exact for the small arguments used here.
pub fn binomial(n: u64, r: u64) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Shortest-path distance between `u` and `v`.
pub fn distance(graph: &OddGraph, u: usize, v: usize) -> Result<usize> {
    graph.check_vertex(v)?;
    Ok(graph.distances_from(u)?[v])
}

/// Size of the intersection of two vertices at distance `n` in O_k.
pub fn intersection_size_at_distance(k: usize, n: usize) -> usize {
    if n.is_multiple_of(2) {
        k - 1 - n / 2
    } else {
        (n - 1) / 2
    }
}

/// Distance read off from `|u ∩ v|` alone, without any traversal.
pub fn distance_via_intersection(graph: &OddGraph, u: usize, v: usize) -> Result<usize> {
    graph.check_vertex(u)?;
    graph.check_vertex(v)?;
    if u == v {
        return Err(Error::InvalidArgument(
            "distance_via_intersection requires distinct vertices".into(),
        ));
    }
    let common = (graph.mask(u) & graph.mask(v)).count_ones() as usize;
    let k = graph.k();
    (1..k)
        .find(|&n| intersection_size_at_distance(k, n) == common)
        .ok_or_else(|| {
            Error::InvariantViolation(format!(
                "no distance in 1..{k} has intersection size {common}"
            ))
        })
}

/// Partition of the vertex set into distance shells around an origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratification {
    pub origin: usize,
    pub strata: Vec<Vec<usize>>,
    /// Stratum index of every vertex.
    pub level: Vec<usize>,
}

impl Stratification {
    pub fn sizes(&self) -> Vec<usize> {
        self.strata.iter().map(Vec::len).collect()
    }

    pub fn diameter(&self) -> usize {
        self.strata.len() - 1
    }

    pub fn levels(&self) -> usize {
        self.strata.len()
    }
}

pub fn stratify(graph: &OddGraph, origin: usize) -> Result<Stratification> {
    let dist = graph.distances_from(origin)?;
    if dist.contains(&usize::MAX) {
        return Err(Error::InvariantViolation("graph is disconnected".into()));
    }
    let diameter = dist.iter().copied().max().unwrap_or(0);
    let mut strata = vec![Vec::new(); diameter + 1];
    for (v, &d) in dist.iter().enumerate() {
        strata[d].push(v);
    }
    Ok(Stratification {
        origin,
        strata,
        level: dist,
    })
}

/// Tridiagonal slices of the intersection array, in backward/forward
/// naming (see the module docs).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntersectionNumbers {
    pub k: usize,
    pub diameter: usize,
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    pub c: Vec<u64>,
    #[serde(serialize_with = "serialize_biguints")]
    pub shell_sizes: Vec<BigUint>,
}

fn serialize_biguints<S: serde::Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

impl IntersectionNumbers {
    /// Checks `a_i + b_i + c_i = k` and the shell-size recursion.
    pub fn check_closure(&self) -> Result<()> {
        let k = self.k as u64;
        for i in 0..=self.diameter {
            if self.a[i] + self.b[i] + self.c[i] != k {
                return Err(Error::InvariantViolation(format!(
                    "a+b+c != k at level {i}: {} + {} + {}",
                    self.a[i], self.b[i], self.c[i]
                )));
            }
        }
        if self.b[0] != 0 || self.c[self.diameter] != 0 {
            return Err(Error::InvariantViolation("boundary b_0 = c_d = 0 violated".into()));
        }
        for i in 0..self.diameter {
            let lhs = &self.shell_sizes[i] * self.c[i];
            let rhs = &self.shell_sizes[i + 1] * self.b[i + 1];
            if lhs != rhs {
                return Err(Error::InvariantViolation(format!(
                    "shell sizes break k_i c_i = k_(i+1) b_(i+1) at level {i}"
                )));
            }
        }
        Ok(())
    }
}

/// Counts neighbours by stratum for every vertex and insists the counts are
/// the same across each stratum.
pub fn intersection_numbers(graph: &OddGraph, strat: &Stratification) -> Result<IntersectionNumbers> {
    let d = strat.diameter();
    let mut a = vec![0u64; d + 1];
    let mut b = vec![0u64; d + 1];
    let mut c = vec![0u64; d + 1];
    for (i, stratum) in strat.strata.iter().enumerate() {
        for (pos, &v) in stratum.iter().enumerate() {
            let (mut back, mut same, mut fwd) = (0u64, 0u64, 0u64);
            for &w in graph.neighbors(v) {
                match strat.level[w] as isize - i as isize {
                    -1 => back += 1,
                    0 => same += 1,
                    1 => fwd += 1,
                    _ => {
                        return Err(Error::InvariantViolation(format!(
                            "edge {v}-{w} skips a stratum"
                        )))
                    }
                }
            }
            if pos == 0 {
                (b[i], a[i], c[i]) = (back, same, fwd);
            } else if (b[i], a[i], c[i]) != (back, same, fwd) {
                return Err(Error::NotDistanceRegular(format!(
                    "vertex {v} in stratum {i} has counts ({back}, {same}, {fwd}), \
                     expected ({}, {}, {})",
                    b[i], a[i], c[i]
                )));
            }
        }
    }
    let shell_sizes = strat.sizes().into_iter().map(BigUint::from).collect();
    let inter = IntersectionNumbers {
        k: graph.k(),
        diameter: d,
        a,
        b,
        c,
        shell_sizes,
    };
    inter.check_closure()?;
    Ok(inter)
}

/// Intersection numbers of O_k from their closed form; no graph is built, so
/// any `k >= 2` works.
pub fn closed_form_intersection(k: usize) -> Result<IntersectionNumbers> {
    if k < K_MIN {
        return Err(Error::DegreeOutOfRange {
            k,
            min: K_MIN,
            max: usize::MAX,
        });
    }
    let d = k - 1;
    let kk = k as u64;
    let b: Vec<u64> = (0..=d)
        .map(|i| match i {
            0 => 0,
            i if i % 2 == 0 => (i / 2) as u64,
            i => i.div_ceil(2) as u64,
        })
        .collect();
    let c: Vec<u64> = (0..=d)
        .map(|i| match i {
            i if i == d => 0,
            i if i % 2 == 0 => kk - (i / 2) as u64,
            i => kk - i.div_ceil(2) as u64,
        })
        .collect();
    let a: Vec<u64> = (0..=d).map(|i| kk - b[i] - c[i]).collect();

    let mut shell_sizes = Vec::with_capacity(d + 1);
    shell_sizes.push(BigUint::from(1u32));
    for i in 0..d {
        let next = &shell_sizes[i] * c[i] / b[i + 1];
        shell_sizes.push(next);
    }
    let inter = IntersectionNumbers {
        k,
        diameter: d,
        a,
        b,
        c,
        shell_sizes,
    };
    inter.check_closure()?;
    Ok(inter)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn petersen_counts() {
        let g = build_odd_graph(3).unwrap();
        assert_eq!(g.vertex_count(), 10);
        assert_eq!(g.edge_count(), 15);
        assert!((0..10).all(|v| g.neighbors(v).len() == 3));
    }

    #[test]
    fn k2_is_a_triangle() {
        let g = build_odd_graph(2).unwrap();
        assert_eq!(g.vertices(), &[0b001, 0b010, 0b100]);
        assert_eq!(g.edge_count(), 3);
        let s = stratify(&g, 0).unwrap();
        assert_eq!(s.sizes(), vec![1, 2]);
        let inter = intersection_numbers(&g, &s).unwrap();
        assert_eq!(inter.a, vec![0, 1]);
        assert_eq!(inter, closed_form_intersection(2).unwrap());
    }

    #[test]
    fn k4_sizes() {
        let g = build_odd_graph(4).unwrap();
        assert_eq!(g.vertex_count(), 35);
        assert!((0..35).all(|v| g.neighbors(v).len() == 4));
        let s = stratify(&g, g.default_origin()).unwrap();
        assert_eq!(s.sizes(), vec![1, 4, 12, 18]);
        assert_eq!(s.diameter(), 3);
    }

    #[test]
    fn default_origin_is_smallest_subset() {
        let g = build_odd_graph(4).unwrap();
        assert_eq!(g.mask(g.default_origin()), 0b111);
    }

    #[test]
    fn degree_bounds() {
        assert!(matches!(
            build_odd_graph(1),
            Err(Error::DegreeOutOfRange { k: 1, .. })
        ));
        let err = build_odd_graph(K_MAX + 1).unwrap_err();
        assert!(err.to_string().contains("2..=8"));
        assert!(closed_form_intersection(1).is_err());
    }

    #[test]
    fn distances_in_o4() {
        let g = build_odd_graph(4).unwrap();
        assert_eq!(distance(&g, 5, 5).unwrap(), 0);
        // {1,2,3} and {1,4,5} share one element
        let u = g.index_of(0b0000111).unwrap();
        let v = g.index_of(0b0011001).unwrap();
        assert_eq!(distance(&g, u, v).unwrap(), 3);
        assert_eq!(distance_via_intersection(&g, u, v).unwrap(), 3);
        // {1,2,3} and {1,2,4}
        let w = g.index_of(0b0001011).unwrap();
        assert_eq!(distance_via_intersection(&g, u, w).unwrap(), 2);
        // disjoint
        let x = g.index_of(0b1110000).unwrap();
        assert_eq!(distance_via_intersection(&g, u, x).unwrap(), 1);
        assert!(distance_via_intersection(&g, u, u).is_err());
        assert!(distance(&g, 0, 35).is_err());
    }

    #[test]
    fn petersen_disjoint_pairs_are_adjacent() {
        let g = build_odd_graph(3).unwrap();
        for u in 0..10 {
            for v in 0..10 {
                if g.mask(u) & g.mask(v) == 0 {
                    assert_eq!(distance(&g, u, v).unwrap(), 1);
                }
            }
        }
    }

    #[test]
    fn k4_intersection_numbers() {
        let g = build_odd_graph(4).unwrap();
        let s = stratify(&g, 0).unwrap();
        let inter = intersection_numbers(&g, &s).unwrap();
        assert_eq!(inter.b, vec![0, 1, 1, 2]);
        assert_eq!(inter.c, vec![4, 3, 3, 0]);
        assert_eq!(inter.a, vec![0, 0, 0, 2]);
        assert_eq!(inter, closed_form_intersection(4).unwrap());
    }

    #[test]
    fn petersen_intersection_numbers() {
        let g = build_odd_graph(3).unwrap();
        let s = stratify(&g, 0).unwrap();
        assert_eq!(s.sizes(), vec![1, 3, 6]);
        let inter = intersection_numbers(&g, &s).unwrap();
        assert_eq!(inter.a, vec![0, 0, 2]);
        assert_eq!(inter.b, vec![0, 1, 1]);
        assert_eq!(inter.c, vec![3, 2, 0]);
    }

    #[test]
    fn closed_form_entries() {
        for k in [2usize, 5, 10, 37] {
            let inter = closed_form_intersection(k).unwrap();
            assert_eq!(inter.b[1], 1);
        }
        assert_eq!(closed_form_intersection(10).unwrap().c[2], 9);
    }

    #[test]
    fn non_distance_regular_is_detected() {
        // A path 0-1-2-3 seen from vertex 1 is not distance-regular.
        let g = OddGraph {
            k: 2,
            vertices: vec![1, 2, 4, 8],
            neighbors: vec![vec![1], vec![0, 2], vec![1, 3], vec![2]],
        };
        let s = stratify(&g, 1).unwrap();
        assert!(matches!(
            intersection_numbers(&g, &s),
            Err(Error::NotDistanceRegular(_))
        ));
    }
}
