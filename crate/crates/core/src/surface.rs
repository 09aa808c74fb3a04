//! Combinatorial model of a marked oriented surface with a partial
//! triangulation: marked points with multiplicities and unit coefficients,
//! arcs as pairs of half-edges, a rotation system (counter-clockwise), and
//! face annotations carrying what pure combinatorics cannot see (genus,
//! enclosed boundary circles, isolated points).

use crate::scalar::{Ring, Scalar};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointId(pub usize);
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcId(pub usize);
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfEdgeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Location {
    Interior,
    Boundary { component: usize, position: usize },
}

#[derive(Debug, Clone)]
pub struct MarkedPoint {
    pub name: String,
    pub location: Location,
    pub multiplicity: u32,
    pub lambda: Scalar,
}

#[derive(Debug, Clone)]
pub struct ArcData {
    pub name: String,
    pub halves: [HalfEdgeId; 2],
}

#[derive(Debug, Clone)]
pub struct HalfEdgeData {
    pub name: String,
    pub arc: ArcId,
    pub point: PointId,
    pub end: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    Left,
    Right,
}

/// An anchor tying a face annotation to a traced walk: either the walk on a
/// side of a half-edge (`Right` = the walk of the dart leaving through it),
/// or the walk containing a boundary segment (for walks made of segments
/// only).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SideRef {
    Half { half_edge: HalfEdgeId, side: Side },
    Segment { component: usize, index: usize },
}

/// Textual form of an anchor, as it appears in a spec or `.ptri` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnchorSpec {
    Half(String, Side),
    Segment(usize, usize),
}

/// User-declared data for one face (region) of the complement of the arcs.
/// A face may own several traced boundary walks (a non-separating loop on
/// the torus leaves a single annular face with two one-sided walks).
#[derive(Debug, Clone)]
pub struct FaceAnnotation {
    pub name: String,
    pub genus: u32,
    pub enclosed: Vec<usize>,
    pub isolated: Vec<PointId>,
    pub anchors: Vec<SideRef>,
}

#[derive(Debug, Error)]
pub enum SurfaceError {
    #[error("duplicate name {0:?}")]
    DuplicateName(String),
    #[error("unknown point {0:?}")]
    UnknownPoint(String),
    #[error("unknown half-edge {0:?}")]
    UnknownHalfEdge(String),
    #[error("half-edge {0:?} listed in rotation of {1:?} but attached to {2:?}")]
    RotationWrongPoint(String, String, String),
    #[error("half-edge {0:?} appears {1} times in rotations; expected exactly once")]
    RotationCoverage(String, usize),
    #[error("boundary component {0} positions are not contiguous 0..{1}")]
    BoundaryPositions(usize, usize),
    #[error("boundary component index {0} out of range (boundaries={1})")]
    BoundaryIndex(usize, u32),
    #[error("multiplicity of {0:?} must be >= 1")]
    ZeroMultiplicity(String),
    #[error("lambda of {0:?} must be a unit (nonzero)")]
    LambdaNotUnit(String),
    #[error("coefficient ring mismatch at point {0:?}")]
    RingMismatch(String),
    #[error("arc {0:?} must have exactly two half-edges")]
    ArcHalves(String),
}

/// Raw construction data; produced by the `.ptri` parser and by tests.
#[derive(Debug, Clone, Default)]
pub struct SurfaceSpec {
    pub genus: u32,
    pub boundary_count: u32,
    pub points: Vec<(String, Location, u32, Scalar)>,
    /// (arc name, (half-edge name, point name), (half-edge name, point name))
    pub arcs: Vec<(String, (String, String), (String, String))>,
    pub rotations: Vec<(String, Vec<String>)>,
    pub faces: Vec<FaceSpecLine>,
}

#[derive(Debug, Clone)]
pub struct FaceSpecLine {
    pub name: String,
    pub genus: u32,
    pub enclosed: Vec<usize>,
    pub isolated: Vec<String>,
    pub anchors: Vec<AnchorSpec>,
}

#[derive(Debug, Clone)]
pub struct PartialTriangulation {
    pub ring: Ring,
    pub genus: u32,
    pub boundary_count: u32,
    pub points: Vec<MarkedPoint>,
    pub arcs: Vec<ArcData>,
    pub half_edges: Vec<HalfEdgeData>,
    /// Rotation per point: cyclic (interior) or linear counter-clockwise
    /// (boundary) order of the incident half-edges.
    pub rotations: Vec<Vec<HalfEdgeId>>,
    pub faces: Vec<FaceAnnotation>,
    /// Points of each boundary component in counter-clockwise order.
    pub boundary_points: Vec<Vec<PointId>>,
    rot_pos: Vec<(usize, usize)>, // half-edge -> (point, index in rotation)
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeStats {
    pub degrees: BTreeMap<String, usize>,
    pub boundary_to_boundary_arcs: usize,
}

impl PartialTriangulation {
    pub fn from_spec(ring: Ring, spec: &SurfaceSpec) -> Result<Self, SurfaceError> {
        let mut point_index: HashMap<String, PointId> = HashMap::new();
        let mut points = Vec::new();
        for (name, location, m, lambda) in &spec.points {
            if point_index.contains_key(name) {
                return Err(SurfaceError::DuplicateName(name.clone()));
            }
            if *m == 0 {
                return Err(SurfaceError::ZeroMultiplicity(name.clone()));
            }
            if lambda.is_zero() {
                return Err(SurfaceError::LambdaNotUnit(name.clone()));
            }
            if lambda.ring() != ring {
                return Err(SurfaceError::RingMismatch(name.clone()));
            }
            if let Location::Boundary { component, .. } = location {
                if *component >= spec.boundary_count as usize {
                    return Err(SurfaceError::BoundaryIndex(*component, spec.boundary_count));
                }
            }
            point_index.insert(name.clone(), PointId(points.len()));
            points.push(MarkedPoint {
                name: name.clone(),
                location: *location,
                multiplicity: *m,
                lambda: lambda.clone(),
            });
        }

        let mut half_index: HashMap<String, HalfEdgeId> = HashMap::new();
        let mut half_edges = Vec::new();
        let mut arcs = Vec::new();
        for (arc_name, (h0, p0), (h1, p1)) in &spec.arcs {
            if arcs.iter().any(|a: &ArcData| &a.name == arc_name) {
                return Err(SurfaceError::DuplicateName(arc_name.clone()));
            }
            let arc_id = ArcId(arcs.len());
            let mut halves = [HalfEdgeId(0); 2];
            for (end, (h_name, p_name)) in [(0u8, (h0, p0)), (1u8, (h1, p1))] {
                let point = *point_index
                    .get(p_name)
                    .ok_or_else(|| SurfaceError::UnknownPoint(p_name.clone()))?;
                if half_index.contains_key(h_name) {
                    return Err(SurfaceError::DuplicateName(h_name.clone()));
                }
                let id = HalfEdgeId(half_edges.len());
                half_index.insert(h_name.clone(), id);
                half_edges.push(HalfEdgeData {
                    name: h_name.clone(),
                    arc: arc_id,
                    point,
                    end,
                });
                halves[end as usize] = id;
            }
            arcs.push(ArcData { name: arc_name.clone(), halves });
        }

        let mut rotations: Vec<Vec<HalfEdgeId>> = vec![Vec::new(); points.len()];
        for (p_name, hs) in &spec.rotations {
            let p = *point_index
                .get(p_name)
                .ok_or_else(|| SurfaceError::UnknownPoint(p_name.clone()))?;
            for h_name in hs {
                let h = *half_index
                    .get(h_name)
                    .ok_or_else(|| SurfaceError::UnknownHalfEdge(h_name.clone()))?;
                if half_edges[h.0].point != p {
                    return Err(SurfaceError::RotationWrongPoint(
                        h_name.clone(),
                        p_name.clone(),
                        points[half_edges[h.0].point.0].name.clone(),
                    ));
                }
                rotations[p.0].push(h);
            }
        }
        let mut seen = vec![0usize; half_edges.len()];
        for rot in &rotations {
            for h in rot {
                seen[h.0] += 1;
            }
        }
        for (i, count) in seen.iter().enumerate() {
            if *count != 1 {
                return Err(SurfaceError::RotationCoverage(half_edges[i].name.clone(), *count));
            }
        }

        // boundary components: positions contiguous 0..n-1, CCW order
        let mut boundary_points: Vec<Vec<(usize, PointId)>> =
            vec![Vec::new(); spec.boundary_count as usize];
        for (i, p) in points.iter().enumerate() {
            if let Location::Boundary { component, position } = p.location {
                boundary_points[component].push((position, PointId(i)));
            }
        }
        let mut boundary_ordered = Vec::new();
        for (c, mut comp) in boundary_points.into_iter().enumerate() {
            comp.sort();
            let ok = comp.iter().enumerate().all(|(i, (pos, _))| *pos == i);
            if !ok {
                return Err(SurfaceError::BoundaryPositions(c, comp.len()));
            }
            boundary_ordered.push(comp.into_iter().map(|(_, p)| p).collect::<Vec<_>>());
        }

        let mut faces = Vec::new();
        for line in &spec.faces {
            let isolated = line
                .isolated
                .iter()
                .map(|n| {
                    point_index
                        .get(n)
                        .copied()
                        .ok_or_else(|| SurfaceError::UnknownPoint(n.clone()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let anchors = line
                .anchors
                .iter()
                .map(|anchor| match anchor {
                    AnchorSpec::Half(h, side) => half_index
                        .get(h)
                        .map(|&half_edge| SideRef::Half { half_edge, side: *side })
                        .ok_or_else(|| SurfaceError::UnknownHalfEdge(h.clone())),
                    AnchorSpec::Segment(component, index) => {
                        Ok(SideRef::Segment { component: *component, index: *index })
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            for c in &line.enclosed {
                if *c >= spec.boundary_count as usize {
                    return Err(SurfaceError::BoundaryIndex(*c, spec.boundary_count));
                }
            }
            faces.push(FaceAnnotation {
                name: line.name.clone(),
                genus: line.genus,
                enclosed: line.enclosed.clone(),
                isolated,
                anchors,
            });
        }

        let mut rot_pos = vec![(0usize, 0usize); half_edges.len()];
        for (p, rot) in rotations.iter().enumerate() {
            for (i, h) in rot.iter().enumerate() {
                rot_pos[h.0] = (p, i);
            }
        }

        Ok(PartialTriangulation {
            ring,
            genus: spec.genus,
            boundary_count: spec.boundary_count,
            points,
            arcs,
            half_edges,
            rotations,
            faces,
            boundary_points: boundary_ordered,
            rot_pos,
        })
    }

    pub fn point_of(&self, h: HalfEdgeId) -> PointId {
        self.half_edges[h.0].point
    }

    pub fn arc_of(&self, h: HalfEdgeId) -> ArcId {
        self.half_edges[h.0].arc
    }

    pub fn other_half(&self, h: HalfEdgeId) -> HalfEdgeId {
        let arc = &self.arcs[self.arc_of(h).0];
        if arc.halves[0] == h {
            arc.halves[1]
        } else {
            arc.halves[0]
        }
    }

    pub fn is_interior(&self, p: PointId) -> bool {
        matches!(self.points[p.0].location, Location::Interior)
    }

    pub fn is_loop(&self, arc: ArcId) -> bool {
        let a = &self.arcs[arc.0];
        self.point_of(a.halves[0]) == self.point_of(a.halves[1])
    }

    pub fn arc_points(&self, arc: ArcId) -> (PointId, PointId) {
        let a = &self.arcs[arc.0];
        (self.point_of(a.halves[0]), self.point_of(a.halves[1]))
    }

    pub fn fully_interior(&self, arc: ArcId) -> bool {
        let (p, q) = self.arc_points(arc);
        self.is_interior(p) && self.is_interior(q)
    }

    pub fn degree(&self, p: PointId) -> usize {
        self.rotations[p.0].len()
    }

    /// Position of a half-edge in its point's rotation sequence.
    pub fn rotation_position(&self, h: HalfEdgeId) -> usize {
        self.rot_pos[h.0].1
    }

    /// Counter-clockwise successor of `h` around its point; `None` for the
    /// last half-edge at a boundary point (no arrow wraps across a segment).
    pub fn rot_next(&self, h: HalfEdgeId) -> Option<HalfEdgeId> {
        let p = self.point_of(h);
        let rot = &self.rotations[p.0];
        let i = self.rotation_position(h);
        if self.is_interior(p) {
            Some(rot[(i + 1) % rot.len()])
        } else if i + 1 < rot.len() {
            Some(rot[i + 1])
        } else {
            None
        }
    }

    pub fn rot_prev(&self, h: HalfEdgeId) -> Option<HalfEdgeId> {
        let p = self.point_of(h);
        let rot = &self.rotations[p.0];
        let i = self.rotation_position(h);
        if self.is_interior(p) {
            Some(rot[(i + rot.len() - 1) % rot.len()])
        } else if i > 0 {
            Some(rot[i - 1])
        } else {
            None
        }
    }

    pub fn point_id(&self, name: &str) -> Option<PointId> {
        self.points.iter().position(|p| p.name == name).map(PointId)
    }

    pub fn arc_id(&self, name: &str) -> Option<ArcId> {
        self.arcs.iter().position(|a| a.name == name).map(ArcId)
    }

    pub fn half_edge_id(&self, name: &str) -> Option<HalfEdgeId> {
        self.half_edges
            .iter()
            .position(|h| h.name == name)
            .map(HalfEdgeId)
    }

    pub fn point_name(&self, p: PointId) -> &str {
        &self.points[p.0].name
    }

    pub fn arc_name(&self, a: ArcId) -> &str {
        &self.arcs[a.0].name
    }

    pub fn multiplicity(&self, p: PointId) -> u32 {
        self.points[p.0].multiplicity
    }

    pub fn lambda(&self, p: PointId) -> &Scalar {
        &self.points[p.0].lambda
    }

    /// Number of boundary segments (only marked components carry segments).
    pub fn segment_count(&self) -> usize {
        self.boundary_points.iter().map(|c| c.len()).sum()
    }

    pub fn marked_component(&self, c: usize) -> bool {
        !self.boundary_points[c].is_empty()
    }

    pub fn degree_stats(&self) -> DegreeStats {
        let degrees = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.name.clone(), self.degree(PointId(i))))
            .collect();
        let boundary_to_boundary_arcs = (0..self.arcs.len())
            .filter(|&a| {
                let (p, q) = self.arc_points(ArcId(a));
                !self.is_interior(p) && !self.is_interior(q)
            })
            .count();
        DegreeStats { degrees, boundary_to_boundary_arcs }
    }

    /// Marked points that count as vertices of the combinatorial map:
    /// incident to an arc, or lying on a marked boundary component.
    pub fn vertex_count(&self) -> usize {
        self.points
            .iter()
            .enumerate()
            .filter(|(i, p)| {
                self.degree(PointId(*i)) > 0 || matches!(p.location, Location::Boundary { .. })
            })
            .count()
    }

    pub fn edge_count(&self) -> usize {
        self.arcs.len() + self.segment_count()
    }

    /// Degree-zero interior points; these must be assigned to faces.
    pub fn isolated_interior_points(&self) -> Vec<PointId> {
        (0..self.points.len())
            .map(PointId)
            .filter(|&p| self.is_interior(p) && self.degree(p) == 0)
            .collect()
    }

    pub fn unmarked_components(&self) -> Vec<usize> {
        (0..self.boundary_count as usize)
            .filter(|&c| !self.marked_component(c))
            .collect()
    }
}

/// Violations found by `validate`; each carries the offending object and a
/// short code matching the check that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    SphereNeedsFivePoints { have: usize },
    DiscNeedsThreePoints { have: usize },
    EulerMismatch { lhs: i64, rhs: i64 },
    EmptyMonogon { arc: String },
    DuplicateArcBigon { first: String, second: String },
    BoundaryParallelBigon { arc: String },
    LoopEnclosesLowMultiplicityPoint { arc: String, point: String, multiplicity: u32 },
    IsolatedPointUnassigned { point: String },
    IsolatedPointMultiplyAssigned { point: String },
    IsolatedAssignmentNotIsolated { point: String, face: String },
    EnclosedComponentUnassigned { component: usize },
    EnclosedComponentMultiplyAssigned { component: usize },
    EnclosedComponentMarked { component: usize, face: String },
    AnchorConflict { walk: usize, faces: Vec<String> },
    FaceWithoutWalks { face: String },
}

impl Violation {
    pub fn code(&self) -> &'static str {
        use Violation::*;
        match self {
            SphereNeedsFivePoints { .. } | DiscNeedsThreePoints { .. } => "a",
            EulerMismatch { .. } => "b",
            EmptyMonogon { .. } => "c",
            DuplicateArcBigon { .. } | BoundaryParallelBigon { .. } => "d",
            LoopEnclosesLowMultiplicityPoint { .. } => "e",
            IsolatedPointUnassigned { .. }
            | IsolatedPointMultiplyAssigned { .. }
            | IsolatedAssignmentNotIsolated { .. }
            | EnclosedComponentUnassigned { .. }
            | EnclosedComponentMultiplyAssigned { .. }
            | EnclosedComponentMarked { .. }
            | AnchorConflict { .. }
            | FaceWithoutWalks { .. } => "f",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Warning {
    LoopParallelToUnmarkedCircle { arc: String },
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

