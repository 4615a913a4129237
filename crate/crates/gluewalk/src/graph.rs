//! Port-labeled k-regular graphs and the glued-trees construction.
//!
//! Every edge end carries a label in `0..k`; the walk's shift operator moves a
//! walker from `(vertex, label)` to the opposite end of that edge. Self loops
//! occupy a single port and map `(v, c)` to itself.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A k-regular graph with a label on each end of each edge.
///
/// The port map sends `(vertex, label)` to the `(vertex, label)` at the other
/// end of the incident edge, and is an involution: following a port twice
/// returns to the starting end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortLabeledGraph {
    num_vertices: usize,
    degree: usize,
    /// Flattened map, indexed by `v * degree + c`.
    port_map: Vec<(u32, u8)>,
}

/// A single invariant violation found by [`PortLabeledGraph::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A port points at a vertex or label outside the graph.
    PortOutOfRange {
        vertex: usize,
        label: usize,
        to_vertex: usize,
        to_label: usize,
    },
    /// `port_map(port_map(v, c)) != (v, c)`.
    InvolutionBroken { vertex: usize, label: usize },
    /// BFS from vertex 0 did not reach every vertex.
    Disconnected { reachable: usize, total: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PortOutOfRange {
                vertex,
                label,
                to_vertex,
                to_label,
            } => write!(
                f,
                "port ({vertex},{label}) points out of range at ({to_vertex},{to_label})"
            ),
            Violation::InvolutionBroken { vertex, label } => {
                write!(f, "port map is not an involution at ({vertex},{label})")
            }
            Violation::Disconnected { reachable, total } => {
                write!(f, "graph is disconnected: reached {reachable} of {total} vertices")
            }
        }
    }
}

impl PortLabeledGraph {
    /// Builds a graph from an explicit port map (`entries[v * degree + c]`).
    ///
    /// No invariants are checked here; call [`validate`](Self::validate) to
    /// audit involution and connectivity.
    pub fn from_port_map(num_vertices: usize, degree: usize, entries: Vec<(u32, u8)>) -> Result<Self> {
        let expected = num_vertices * degree;
        if entries.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: entries.len(),
            });
        }
        Ok(Self {
            num_vertices,
            degree,
            port_map: entries,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The opposite end of the edge attached to port `c` of vertex `v`.
    #[inline]
    pub fn port(&self, vertex: usize, label: usize) -> (usize, usize) {
        let (w, c) = self.port_map[vertex * self.degree + label];
        (w as usize, c as usize)
    }

    /// Checks involution, port ranges, and connectivity.
    ///
    /// Returns an empty list iff the port map is a total involution on a
    /// connected graph. Violations are collected, not thrown.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        for v in 0..self.num_vertices {
            for c in 0..self.degree {
                let (w, cc) = self.port(v, c);
                if w >= self.num_vertices || cc >= self.degree {
                    violations.push(Violation::PortOutOfRange {
                        vertex: v,
                        label: c,
                        to_vertex: w,
                        to_label: cc,
                    });
                    continue;
                }
                if self.port(w, cc) != (v, c) {
                    violations.push(Violation::InvolutionBroken { vertex: v, label: c });
                }
            }
        }
        // Connectivity only makes sense once all ports are in range.
        if violations.iter().all(|v| !matches!(v, Violation::PortOutOfRange { .. }))
            && self.num_vertices > 0
        {
            let mut seen = vec![false; self.num_vertices];
            let mut stack = vec![0usize];
            seen[0] = true;
            let mut reachable = 1usize;
            while let Some(v) = stack.pop() {
                for c in 0..self.degree {
                    let (w, _) = self.port(v, c);
                    if !seen[w] {
                        seen[w] = true;
                        reachable += 1;
                        stack.push(w);
                    }
                }
            }
            if reachable != self.num_vertices {
                violations.push(Violation::Disconnected {
                    reachable,
                    total: self.num_vertices,
                });
            }
        }
        violations
    }

    /// Serializes to the canonical edge-list text format.
    ///
    /// One line per edge, `v,port_v,w,port_w`, written once from the
    /// lexicographically lower `(vertex, port)` end; self loops appear once as
    /// `v,c,v,c`. Lines are sorted by `(v, port_v)`.
    pub fn export_edge_list(&self) -> String {
        let mut out = String::new();
        for v in 0..self.num_vertices {
            for c in 0..self.degree {
                let (w, cc) = self.port(v, c);
                if (w, cc) >= (v, c) {
                    out.push_str(&format!("{v},{c},{w},{cc}\n"));
                }
            }
        }
        out
    }

    /// Parses the edge-list text format produced by
    /// [`export_edge_list`](Self::export_edge_list).
    ///
    /// Vertex count and degree are inferred from the largest index and label
    /// seen. Fails with the offending line number on malformed input,
    /// duplicate port assignments, or ports left undefined.
    pub fn import_edge_list(text: &str) -> Result<Self> {
        let mut ends: Vec<(usize, (usize, usize), (usize, usize))> = Vec::new();
        let mut max_vertex = 0usize;
        let mut max_label = 0usize;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(Error::EdgeListParse {
                    line: line_no,
                    message: format!("expected 4 comma-separated fields, got {}", fields.len()),
                });
            }
            let mut nums = [0usize; 4];
            for (slot, field) in nums.iter_mut().zip(&fields) {
                *slot = field.trim().parse().map_err(|_| Error::EdgeListParse {
                    line: line_no,
                    message: format!("invalid integer `{field}`"),
                })?;
            }
            let [v, cv, w, cw] = nums;
            max_vertex = max_vertex.max(v).max(w);
            max_label = max_label.max(cv).max(cw);
            ends.push((line_no, (v, cv), (w, cw)));
        }
        if ends.is_empty() {
            return Err(Error::EdgeListParse {
                line: 0,
                message: "empty edge list".into(),
            });
        }
        let num_vertices = max_vertex + 1;
        let degree = max_label + 1;
        let mut entries: Vec<Option<(u32, u8)>> = vec![None; num_vertices * degree];
        let mut assign = |(v, cv): (usize, usize), (w, cw): (usize, usize), line: usize| -> Result<()> {
            let slot = &mut entries[v * degree + cv];
            if slot.is_some() {
                return Err(Error::EdgeListParse {
                    line,
                    message: format!("port ({v},{cv}) assigned twice"),
                });
            }
            *slot = Some((w as u32, cw as u8));
            Ok(())
        };
        for &(line, a, b) in &ends {
            assign(a, b, line)?;
            if a != b {
                assign(b, a, line)?;
            }
        }
        let entries: Vec<(u32, u8)> = entries
            .into_iter()
            .enumerate()
            .map(|(i, slot)| {
                slot.ok_or_else(|| Error::EdgeListParse {
                    line: 0,
                    message: format!("port ({},{}) never defined", i / degree, i % degree),
                })
            })
            .collect::<Result<_>>()?;
        Self::from_port_map(num_vertices, degree, entries)
    }
}

/// How the two trees' leaves are joined into a cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gluing {
    /// Canonical cycle L0-R0-L1-R1-...-L(m-1)-R(m-1)-L0 over the leaf ranks.
    Alternating,
    /// Side-alternating cycle over seeded random leaf orderings.
    RandomCycle { seed: u64 },
}

/// Parameters of a glued-trees graph G'n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GluedTreesSpec {
    /// Layers of edges per tree before the gluing stage (n >= 1).
    pub depth: usize,
    pub gluing: Gluing,
}

impl GluedTreesSpec {
    pub fn new(depth: usize) -> Self {
        Self {
            depth,
            gluing: Gluing::Alternating,
        }
    }

    pub fn with_gluing(depth: usize, gluing: Gluing) -> Self {
        Self { depth, gluing }
    }

    /// Total vertex count 2^(n+2) - 2.
    pub fn num_vertices(&self) -> usize {
        (1usize << (self.depth + 2)) - 2
    }

    /// The far root, always the highest vertex index.
    pub fn target_vertex(&self) -> usize {
        self.num_vertices() - 1
    }

    /// Leaves per side, 2^n.
    pub fn leaves_per_side(&self) -> usize {
        1usize << self.depth
    }
}

const DEGREE: usize = 3;

/// Builds the 3-regular glued-trees graph G'n.
///
/// Two depth-n binary trees are joined at their leaves by a cycle alternating
/// between the sides, and a self loop is added to each root so every vertex
/// has exactly three ports. The left tree is numbered in breadth-first order
/// from the left root at index 0; the right tree mirrors it so the right root
/// (the target vertex) takes the highest index 2^(n+2) - 3.
///
/// Port convention: self loops sit on port 0 of each root; tree vertices reach
/// their parent through port 0 and their children through ports 1 and 2; each
/// leaf's two cycle edges leave through port 1 (forward along the cycle) and
/// port 2 (backward).
pub fn build_glued_trees(spec: &GluedTreesSpec) -> Result<PortLabeledGraph> {
    let n = spec.depth;
    if n < 1 {
        return Err(Error::InvalidDepth(n));
    }
    let num_vertices = spec.num_vertices();
    let leaves = spec.leaves_per_side();
    let internal = leaves - 1; // vertices per tree that have children
    let mirror = |i: usize| num_vertices - 1 - i;

    let mut entries = vec![(0u32, 0u8); num_vertices * DEGREE];
    let mut connect = |a: usize, la: usize, b: usize, lb: usize| {
        entries[a * DEGREE + la] = (b as u32, lb as u8);
        entries[b * DEGREE + lb] = (a as u32, la as u8);
    };

    // Tree edges: child 2i+1 hangs off port 1, child 2i+2 off port 2, and the
    // child's port 0 points back at the parent. The right tree mirrors both
    // endpoints.
    for i in 0..internal {
        for (child, label) in [(2 * i + 1, 1), (2 * i + 2, 2)] {
            connect(i, label, child, 0);
            connect(mirror(i), label, mirror(child), 0);
        }
    }

    // Self loop on each root: a single port mapped to itself.
    connect(0, 0, 0, 0);
    connect(num_vertices - 1, 0, num_vertices - 1, 0);

    // Gluing cycle over the leaves: forward edges leave through port 1 and
    // arrive on port 2.
    let first_leaf = leaves - 1;
    let mut left: Vec<usize> = (0..leaves).map(|j| first_leaf + j).collect();
    let mut right: Vec<usize> = (0..leaves).map(|j| mirror(first_leaf + j)).collect();
    if let Gluing::RandomCycle { seed } = spec.gluing {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        left.shuffle(&mut rng);
        right.shuffle(&mut rng);
    }
    let cycle: Vec<usize> = left
        .iter()
        .zip(&right)
        .flat_map(|(&l, &r)| [l, r])
        .collect();
    for t in 0..cycle.len() {
        let next = cycle[(t + 1) % cycle.len()];
        connect(cycle[t], 1, next, 2);
    }

    PortLabeledGraph::from_port_map(num_vertices, DEGREE, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g6_has_254_vertices_and_target_253() {
        let spec = GluedTreesSpec::new(6);
        let graph = build_glued_trees(&spec).unwrap();
        assert_eq!(graph.num_vertices(), 254);
        assert_eq!(spec.target_vertex(), 253);
    }

    #[test]
    fn g4_has_62_vertices() {
        let graph = build_glued_trees(&GluedTreesSpec::new(4)).unwrap();
        assert_eq!(graph.num_vertices(), 62);
    }

    #[test]
    fn g1_leaves_form_a_four_cycle_and_all_degrees_are_three() {
        let graph = build_glued_trees(&GluedTreesSpec::new(1)).unwrap();
        assert_eq!(graph.num_vertices(), 6);
        // Independent adjacency-count oracle: tally edge ends per vertex from
        // the port map, counting a self loop as one incident end.
        let mut degree = vec![0usize; 6];
        let mut cycle_adj = vec![Vec::new(); 6];
        for v in 0..6 {
            for c in 0..3 {
                let (w, cc) = graph.port(v, c);
                if (w, cc) >= (v, c) {
                    degree[v] += 1;
                    if (w, cc) != (v, c) {
                        degree[w] += 1;
                    }
                    // Leaf-leaf edges are exactly the gluing cycle.
                    if (1..=4).contains(&v) && (1..=4).contains(&w) {
                        cycle_adj[v].push(w);
                        cycle_adj[w].push(v);
                    }
                }
            }
        }
        assert_eq!(degree, vec![3; 6]);
        // The four leaves 1..=4 each have two cycle neighbors, and walking the
        // cycle visits all four before returning.
        for v in 1..=4 {
            assert_eq!(cycle_adj[v].len(), 2, "leaf {v} cycle degree");
        }
        let mut visited = vec![1usize];
        let mut prev = usize::MAX;
        let mut cur = 1usize;
        loop {
            let next = *cycle_adj[cur].iter().find(|&&w| w != prev).unwrap();
            if next == 1 {
                break;
            }
            visited.push(next);
            prev = cur;
            cur = next;
        }
        visited.sort_unstable();
        assert_eq!(visited, vec![1, 2, 3, 4]);
    }

    #[test]
    fn validate_accepts_construction() {
        let graph = build_glued_trees(&GluedTreesSpec::new(3)).unwrap();
        assert!(graph.validate().is_empty());
    }

    #[test]
    fn validate_reports_broken_involution() {
        // port_map(0,1) = (1,0) but port_map(1,0) = (2,2).
        let entries = vec![
            (0, 0), // (0,0) self loop
            (1, 0), // (0,1) -> (1,0)
            (2, 0), // (0,2)
            (2, 2), // (1,0) -> (2,2): breaks the pairing with (0,1)
            (2, 1), // (1,1)
            (1, 2), // (1,2) self loop
            (0, 2), // (2,0)
            (1, 1), // (2,1)
            (2, 2), // (2,2) self loop
        ];
        let graph = PortLabeledGraph::from_port_map(3, 3, entries).unwrap();
        let violations = graph.validate();
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::InvolutionBroken { vertex: 0, label: 1 })));
    }

    #[test]
    fn validate_reports_disconnection() {
        // Two disjoint triangles, each vertex: two triangle edges + self loop.
        let mut entries = vec![(0u32, 0u8); 6 * 3];
        let mut connect = |a: usize, la: usize, b: usize, lb: usize| {
            entries[a * 3 + la] = (b as u32, lb as u8);
            entries[b * 3 + lb] = (a as u32, la as u8);
        };
        for base in [0usize, 3] {
            let (p, q, r) = (base, base + 1, base + 2);
            connect(p, 0, q, 1);
            connect(q, 0, r, 1);
            connect(r, 0, p, 1);
            connect(p, 2, p, 2);
            connect(q, 2, q, 2);
            connect(r, 2, r, 2);
        }
        let graph = PortLabeledGraph::from_port_map(6, 3, entries).unwrap();
        let violations = graph.validate();
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::Disconnected { reachable: 3, total: 6 })));
    }

    #[test]
    fn export_import_round_trip_is_identity() {
        for gluing in [Gluing::Alternating, Gluing::RandomCycle { seed: 7 }] {
            let graph = build_glued_trees(&GluedTreesSpec::with_gluing(3, gluing)).unwrap();
            let text = graph.export_edge_list();
            let back = PortLabeledGraph::import_edge_list(&text).unwrap();
            assert_eq!(back, graph);
            assert_eq!(back.export_edge_list(), text);
        }
    }

    #[test]
    fn g1_export_line_count_matches_enumeration() {
        let graph = build_glued_trees(&GluedTreesSpec::new(1)).unwrap();
        // Enumeration oracle: count undirected edges (self loops once) straight
        // off the port map. G'1 has 4 tree edges + 4 cycle edges + 2 loops.
        let mut edges = 0usize;
        for v in 0..graph.num_vertices() {
            for c in 0..graph.degree() {
                if graph.port(v, c) >= (v, c) {
                    edges += 1;
                }
            }
        }
        assert_eq!(edges, 10);
        assert_eq!(graph.export_edge_list().lines().count(), edges);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = PortLabeledGraph::import_edge_list("a,b,c\n").unwrap_err();
        match err {
            Error::EdgeListParse { line, .. } => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn import_rejects_incomplete_port_map() {
        // Vertex 1 port 1 never defined.
        let err = PortLabeledGraph::import_edge_list("0,0,1,0\n0,1,1,2\n").unwrap_err();
        assert!(matches!(err, Error::EdgeListParse { .. }));
    }

    #[test]
    fn rejects_depth_zero() {
        assert!(matches!(
            build_glued_trees(&GluedTreesSpec::new(0)),
            Err(Error::InvalidDepth(0))
        ));
    }

    #[test]
    fn random_cycle_is_deterministic_per_seed() {
        let a = build_glued_trees(&GluedTreesSpec::with_gluing(4, Gluing::RandomCycle { seed: 11 })).unwrap();
        let b = build_glued_trees(&GluedTreesSpec::with_gluing(4, Gluing::RandomCycle { seed: 11 })).unwrap();
        let c = build_glued_trees(&GluedTreesSpec::with_gluing(4, Gluing::RandomCycle { seed: 12 })).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
