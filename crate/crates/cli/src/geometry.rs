//! Tour polylines for external plotting.

use anyhow::{bail, Result};
use gdrp_core::model::{Instance, Point};
use gdrp_core::solver::Solution;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    #[serde(rename = "type")]
    pub drone_type: usize,
    pub unit: usize,
    /// Node ids along the tour, depot (0) at both ends.
    pub nodes: Vec<usize>,
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeMarker {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    /// Package mass; zero for the depot.
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub depot: [f64; 2],
    pub nodes: Vec<NodeMarker>,
    pub polylines: Vec<Polyline>,
}

fn xy(p: Point) -> [f64; 2] {
    [p.x, p.y]
}

pub fn build_geometry(solution: &Solution, instance: &Instance) -> Result<Geometry> {
    let n = instance.len();
    let mut polylines = Vec::with_capacity(solution.tours.len());
    for t in &solution.tours {
        if let Some(&bad) = t.visits.iter().find(|&&c| c == 0 || c > n) {
            bail!("tour {}.{} visits customer {bad}, which the instance does not have", t.drone_type, t.unit);
        }
        let nodes: Vec<usize> = std::iter::once(0).chain(t.visits.iter().copied()).chain(std::iter::once(0)).collect();
        let points = nodes.iter().map(|&v| xy(instance.position(v))).collect();
        polylines.push(Polyline { drone_type: t.drone_type, unit: t.unit, nodes, points });
    }
    let nodes = std::iter::once(NodeMarker { id: 0, x: instance.depot().x, y: instance.depot().y, mass: 0.0 })
        .chain(instance.customers().iter().map(|c| NodeMarker { id: c.id, x: c.position.x, y: c.position.y, mass: c.package_mass }))
        .collect();
    Ok(Geometry { depot: xy(instance.depot()), nodes, polylines })
}

#[cfg(test)]
mod tests {
    use super::*;
    use gdrp_core::model::appendix_d_instance;
    use gdrp_core::solver::Tour;

    fn tour(visits: Vec<usize>) -> Tour {
        Tour { drone_type: 1, unit: 1, visits, energy: 0.0, distance: 0.0 }
    }

    #[test]
    fn polylines_close_at_the_depot() {
        let inst = appendix_d_instance(4).unwrap();
        let s = Solution { tours: vec![tour(vec![2, 4]), tour(vec![1])], total_energy: 0.0, total_distance: 0.0 };
        let g = build_geometry(&s, &inst).unwrap();
        assert_eq!(g.polylines.len(), 2);
        for p in &g.polylines {
            assert_eq!(p.points.first(), Some(&g.depot));
            assert_eq!(p.points.last(), Some(&g.depot));
        }
        assert_eq!(g.polylines[0].points[1], xy(inst.position(2)));
        assert_eq!(g.nodes.len(), 5);
    }

    #[test]
    fn empty_solution_and_bad_ids() {
        let inst = appendix_d_instance(3).unwrap();
        assert!(build_geometry(&Solution::empty(), &inst).unwrap().polylines.is_empty());
        let bad = Solution { tours: vec![tour(vec![4])], total_energy: 0.0, total_distance: 0.0 };
        assert!(build_geometry(&bad, &inst).is_err());
    }
}
