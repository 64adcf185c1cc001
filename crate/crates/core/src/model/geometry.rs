//! Convex no-fly zones and detour distances over the visibility graph of
//! node positions and zone corners.

use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};

use super::{DistanceMatrix, ModelError, Point};

/// Signed-distance slack (km) below which a point counts as on the boundary.
const BOUNDARY_EPS: f64 = 1e-9;

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Convex polygon with vertices stored counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

impl ConvexPolygon {
    /// Accepts vertices in either orientation; rejects fewer than three
    /// vertices, zero area and reflex corners.
    pub fn new(mut vertices: Vec<Point>) -> Option<Self> {
        if vertices.len() < 3 || vertices.iter().any(|p| !p.is_finite()) {
            return None;
        }
        let area2: f64 = (0..vertices.len())
            .map(|i| {
                let a = vertices[i];
                let b = vertices[(i + 1) % vertices.len()];
                a.x * b.y - b.x * a.y
            })
            .sum();
        if area2.abs() < 1e-15 {
            return None;
        }
        if area2 < 0.0 {
            vertices.reverse();
        }
        let n = vertices.len();
        for i in 0..n {
            if cross(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]) < -1e-12 {
                return None;
            }
        }
        Some(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// (start, unit direction, unit inward normal) per edge.
    fn edges(&self) -> impl Iterator<Item = (Point, f64, f64)> + '_ {
        let n = self.vertices.len();
        (0..n).filter_map(move |i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let len = a.distance(b);
            (len > 0.0).then(|| (a, (b.x - a.x) / len, (b.y - a.y) / len))
        })
    }

    /// True when `p` lies strictly inside (boundary excluded).
    pub fn contains_strictly(&self, p: Point) -> bool {
        self.edges().all(|(a, ux, uy)| ux * (p.y - a.y) - uy * (p.x - a.x) > BOUNDARY_EPS)
    }

    /// True when the open segment `a-b` passes through the polygon interior.
    /// Grazing a corner or running along an edge does not count.
    pub fn blocks(&self, a: Point, b: Point) -> bool {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for (v, ux, uy) in self.edges() {
            // signed distance to the edge line along the segment: f0 + t f1
            let f0 = ux * (a.y - v.y) - uy * (a.x - v.x);
            let f1 = ux * (b.y - a.y) - uy * (b.x - a.x);
            if f1.abs() < 1e-15 {
                if f0 <= BOUNDARY_EPS {
                    return false;
                }
                continue;
            }
            let t = (BOUNDARY_EPS - f0) / f1;
            if f1 > 0.0 {
                lo = lo.max(t);
            } else {
                hi = hi.min(t);
            }
            if hi - lo <= 1e-12 {
                return false;
            }
        }
        hi - lo > 1e-12
    }
}

/// True when the segment crosses the interior of any obstacle.
pub fn segment_crosses_interior(a: Point, b: Point, obstacles: &[ConvexPolygon]) -> bool {
    obstacles.iter().any(|o| o.blocks(a, b))
}

/// Replaces `d_ij` by the shortest obstacle-avoiding polyline whenever the
/// straight segment between nodes `i` and `j` crosses a zone. Intermediate
/// points are zone corners only. Entries never decrease.
pub fn apply_no_fly_detours(
    matrix: &DistanceMatrix,
    positions: &[Point],
    obstacles: &[ConvexPolygon],
) -> Result<DistanceMatrix, ModelError> {
    if obstacles.is_empty() {
        return Ok(matrix.clone());
    }
    if matrix.size() != positions.len() {
        return Err(ModelError::BadDistanceMatrix {
            expected: positions.len(),
            reason: format!("got {}x{}", matrix.size(), matrix.size()),
        });
    }
    for (i, &p) in positions.iter().enumerate() {
        if obstacles.iter().any(|o| o.contains_strictly(p)) {
            return Err(ModelError::NodeInsideNoFlyZone(i));
        }
    }

    let corners: Vec<Point> = obstacles.iter().flat_map(|o| o.vertices().iter().copied()).collect();
    // graph nodes: corners first, then one node per position
    let mut graph = UnGraph::<(), f64>::with_capacity(corners.len() + positions.len(), 0);
    let corner_ix: Vec<NodeIndex> = corners.iter().map(|_| graph.add_node(())).collect();
    let pos_ix: Vec<NodeIndex> = positions.iter().map(|_| graph.add_node(())).collect();
    for a in 0..corners.len() {
        for b in a + 1..corners.len() {
            if !segment_crosses_interior(corners[a], corners[b], obstacles) {
                graph.add_edge(corner_ix[a], corner_ix[b], corners[a].distance(corners[b]));
            }
        }
    }
    for (p, &pt) in positions.iter().enumerate() {
        for (c, &corner) in corners.iter().enumerate() {
            if !segment_crosses_interior(pt, corner, obstacles) {
                graph.add_edge(pos_ix[p], corner_ix[c], pt.distance(corner));
            }
        }
    }

    let mut out = matrix.clone();
    for i in 0..positions.len() {
        let blocked: Vec<usize> = (i + 1..positions.len())
            .filter(|&j| segment_crosses_interior(positions[i], positions[j], obstacles))
            .collect();
        if blocked.is_empty() {
            continue;
        }
        // only corner-to-corner and position-to-corner edges exist, so
        // paths never pass through another customer
        let dist = dijkstra(&graph, pos_ix[i], None, |e| *e.weight());
        for j in blocked {
            let detour = dist.get(&pos_ix[j]).copied().unwrap_or(f64::INFINITY);
            if detour.is_finite() {
                out.set_symmetric(i, j, matrix.get(i, j).max(detour));
            } else {
                return Err(ModelError::InvalidParameter(format!("no obstacle-free path between nodes {i} and {j}")));
            }
        }
    }
    Ok(out)
}
