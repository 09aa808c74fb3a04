//! Face tracing on the combinatorial map. Rotations are counter-clockwise,
//! so every boundary walk comes out clockwise with its face on the right.
//! Boundary segments of marked components take part in the walks; a face
//! (region of the complement) may own several walks.

use crate::surface::{
    ArcId, FaceSpecLine, HalfEdgeId, Location, PartialTriangulation, PointId,
    Side, SideRef, SurfaceSpec, Violation, Warning,
};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FacesError {
    #[error("arc {0:?} is not a loop")]
    NotALoop(String),
    #[error("face transport failed: {0}")]
    Transport(String),
}

/// One step of a face walk: travelling along one side of an arc (identified
/// by the half-edge it leaves through) or along a boundary segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dart {
    Arc { leave: HalfEdgeId },
    Seg { component: usize, index: usize },
}

#[derive(Debug, Clone)]
pub struct Walk {
    pub darts: Vec<Dart>,
}

impl Walk {
    pub fn arc_dart_count(&self) -> usize {
        self.darts.iter().filter(|d| matches!(d, Dart::Arc { .. })).count()
    }

    pub fn seg_dart_count(&self) -> usize {
        self.darts.len() - self.arc_dart_count()
    }
}

/// A face (region) with resolved walk ownership.
#[derive(Debug, Clone)]
pub struct Face {
    pub name: String,
    pub genus: u32,
    pub enclosed: Vec<usize>,
    pub isolated: Vec<PointId>,
    pub walks: Vec<usize>,
}

impl Face {
    /// Euler characteristic contribution of this face: a disc with g handles,
    /// w boundary walks and e enclosed boundary circles has chi = 2-2g-w-e.
    pub fn chi(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.walks.len() as i64 - self.enclosed.len() as i64
    }
}

#[derive(Debug, Clone)]
pub struct FaceStructure {
    pub walks: Vec<Walk>,
    pub faces: Vec<Face>,
    pub walk_face: Vec<usize>,
    pub assembly_violations: Vec<Violation>,
    dart_walk: HashMap<Dart, usize>,
}

impl FaceStructure {
    pub fn walk_of(&self, d: Dart) -> usize {
        self.dart_walk[&d]
    }

    pub fn face_of_dart(&self, d: Dart) -> usize {
        self.walk_face[self.walk_of(d)]
    }

    /// Walk on the requested side of a half-edge. `Right` is the walk of the
    /// dart leaving through `h`; `Left` the walk of the dart arriving via it.
    pub fn walk_on_side(&self, t: &PartialTriangulation, h: HalfEdgeId, side: Side) -> usize {
        let leave = match side {
            Side::Right => h,
            Side::Left => t.other_half(h),
        };
        self.walk_of(Dart::Arc { leave })
    }
}

fn seg_prev(t: &PartialTriangulation, component: usize, position: usize) -> Dart {
    let n = t.boundary_points[component].len();
    Dart::Seg { component, index: (position + n - 1) % n }
}

/// Successor of a dart in its face walk.
pub fn face_next(t: &PartialTriangulation, d: Dart) -> Dart {
    match d {
        Dart::Arc { leave } => {
            let arrive = t.other_half(leave);
            let p = t.point_of(arrive);
            match t.rot_next(arrive) {
                Some(h) => Dart::Arc { leave: h },
                None => {
                    // last half-edge at a boundary point: continue along the
                    // boundary towards the previous marked point
                    let Location::Boundary { component, position } = t.points[p.0].location
                    else {
                        unreachable!("interior rotations are cyclic")
                    };
                    seg_prev(t, component, position)
                }
            }
        }
        Dart::Seg { component, index } => {
            // the inner dart of segment (c, i) runs clockwise and arrives at
            // the point sitting at position i
            let p = t.boundary_points[component][index];
            match t.rotations[p.0].first() {
                Some(&h) => Dart::Arc { leave: h },
                None => seg_prev(t, component, index),
            }
        }
    }
}

fn all_darts(t: &PartialTriangulation) -> Vec<Dart> {
    let mut darts: Vec<Dart> = (0..t.half_edges.len())
        .map(|h| Dart::Arc { leave: HalfEdgeId(h) })
        .collect();
    for (c, pts) in t.boundary_points.iter().enumerate() {
        for i in 0..pts.len() {
            darts.push(Dart::Seg { component: c, index: i });
        }
    }
    darts
}

/// Traces all face boundary walks. Deterministic: each walk starts at its
/// least dart, and walks are ordered by that dart.
pub fn trace_walks(t: &PartialTriangulation) -> Vec<Walk> {
    let darts = all_darts(t);
    let mut visited: BTreeSet<Dart> = BTreeSet::new();
    let mut walks = Vec::new();
    for &start in &darts {
        if visited.contains(&start) {
            continue;
        }
        let mut walk = Vec::new();
        let mut d = start;
        loop {
            visited.insert(d);
            walk.push(d);
            d = face_next(t, d);
            if d == start {
                break;
            }
        }
        walks.push(Walk { darts: walk });
    }
    walks
}

/// Resolves the face annotations against the traced walks. Unclaimed walks
/// become plain disc faces; anchor conflicts are reported, first claim wins.
pub fn face_structure(t: &PartialTriangulation) -> FaceStructure {
    let walks = trace_walks(t);
    let mut dart_walk = HashMap::new();
    for (w, walk) in walks.iter().enumerate() {
        for &d in &walk.darts {
            dart_walk.insert(d, w);
        }
    }

    let mut violations = Vec::new();
    let mut claims: Vec<Option<usize>> = vec![None; walks.len()];
    let mut faces: Vec<Face> = Vec::new();
    for ann in &t.faces {
        let mut owned = Vec::new();
        for anchor in &ann.anchors {
            let w = match anchor {
                SideRef::Half { half_edge, side } => {
                    let leave = match side {
                        Side::Right => *half_edge,
                        Side::Left => t.other_half(*half_edge),
                    };
                    dart_walk.get(&Dart::Arc { leave }).copied()
                }
                SideRef::Segment { component, index } => {
                    dart_walk.get(&Dart::Seg { component: *component, index: *index }).copied()
                }
            };
            let Some(w) = w else { continue };
            match claims[w] {
                Some(prev) if prev != faces.len() => {
                    violations.push(Violation::AnchorConflict {
                        walk: w,
                        faces: vec![faces[prev].name.clone(), ann.name.clone()],
                    });
                }
                Some(_) => {}
                None => {
                    claims[w] = Some(faces.len());
                    owned.push(w);
                }
            }
        }
        if owned.is_empty() && !walks.is_empty() {
            violations.push(Violation::FaceWithoutWalks { face: ann.name.clone() });
        }
        faces.push(Face {
            name: ann.name.clone(),
            genus: ann.genus,
            enclosed: ann.enclosed.clone(),
            isolated: ann.isolated.clone(),
            walks: owned,
        });
    }
    for (w, claim) in claims.iter().enumerate() {
        if claim.is_none() {
            faces.push(Face {
                name: format!("_F{w}"),
                genus: 0,
                enclosed: Vec::new(),
                isolated: Vec::new(),
                walks: vec![w],
            });
        }
    }
    if walks.is_empty() && t.faces.is_empty() {
        faces.push(Face {
            name: "_F0".to_string(),
            genus: 0,
            enclosed: Vec::new(),
            isolated: Vec::new(),
            walks: Vec::new(),
        });
    }
    let mut walk_face = vec![usize::MAX; walks.len()];
    for (f, face) in faces.iter().enumerate() {
        for &w in &face.walks {
            walk_face[w] = f;
        }
    }
    FaceStructure { walks, faces, walk_face, assembly_violations: violations, dart_walk }
}

/// A face that is an empty disc bounded by exactly three arc sides, in the
/// clockwise order the walk produces. Self-folded triangles repeat an arc.
#[derive(Debug, Clone)]
pub struct SmallTriangle {
    /// sides (u, v, w) in clockwise walk order
    pub sides: [ArcId; 3],
    /// corners (M, N, P): M between w and u, N between u and v, P between v and w
    pub corners: [PointId; 3],
    /// arriving half-edges at the corners N, P, M (walk order)
    pub arrivals: [HalfEdgeId; 3],
}

pub fn small_triangles(t: &PartialTriangulation) -> Vec<SmallTriangle> {
    small_triangles_in(t, &face_structure(t))
}

pub fn small_triangles_in(t: &PartialTriangulation, fs: &FaceStructure) -> Vec<SmallTriangle> {
    let mut out = Vec::new();
    for face in &fs.faces {
        if face.genus != 0
            || !face.enclosed.is_empty()
            || !face.isolated.is_empty()
            || face.walks.len() != 1
        {
            continue;
        }
        let walk = &fs.walks[face.walks[0]];
        if walk.darts.len() != 3 || walk.seg_dart_count() != 0 {
            continue;
        }
        let leaves: Vec<HalfEdgeId> = walk
            .darts
            .iter()
            .map(|d| match d {
                Dart::Arc { leave } => *leave,
                Dart::Seg { .. } => unreachable!(),
            })
            .collect();
        let sides = [t.arc_of(leaves[0]), t.arc_of(leaves[1]), t.arc_of(leaves[2])];
        let arrivals = [
            t.other_half(leaves[0]),
            t.other_half(leaves[1]),
            t.other_half(leaves[2]),
        ];
        let corners = [
            t.point_of(arrivals[2]), // M, closing corner between w and u
            t.point_of(arrivals[0]), // N
            t.point_of(arrivals[1]), // P
        ];
        out.push(SmallTriangle { sides, corners, arrivals });
    }
    out
}

/// What lies on one side of a loop arc.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RegionSummary {
    pub faces: Vec<String>,
    pub genus: i64,
    pub sigma_boundary_circles: usize,
    pub marked_points: Vec<String>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub enum LoopSides {
    /// both sides reach the same region: the loop is non-separating
    SameRegion { faces: Vec<String> },
    Separated { sides: [RegionSummary; 2] },
}

pub fn enclosed_region(t: &PartialTriangulation, arc: ArcId) -> Result<LoopSides, FacesError> {
    if !t.is_loop(arc) {
        return Err(FacesError::NotALoop(t.arc_name(arc).to_string()));
    }
    let fs = face_structure(t);
    Ok(enclosed_region_in(t, &fs, arc))
}

pub fn enclosed_region_in(
    t: &PartialTriangulation,
    fs: &FaceStructure,
    arc: ArcId,
) -> LoopSides {
    let halves = t.arcs[arc.0].halves;
    let f0 = fs.face_of_dart(Dart::Arc { leave: halves[0] });
    let f1 = fs.face_of_dart(Dart::Arc { leave: halves[1] });

    // face adjacency across every arc except the loop itself
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); fs.faces.len()];
    for (a, data) in t.arcs.iter().enumerate() {
        if ArcId(a) == arc {
            continue;
        }
        let fa = fs.face_of_dart(Dart::Arc { leave: data.halves[0] });
        let fb = fs.face_of_dart(Dart::Arc { leave: data.halves[1] });
        adj[fa].insert(fb);
        adj[fb].insert(fa);
    }

    let bfs = |start: usize| -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([start]);
        let mut queue = vec![start];
        while let Some(f) = queue.pop() {
            for &g in &adj[f] {
                if seen.insert(g) {
                    queue.push(g);
                }
            }
        }
        seen
    };

    let side0 = bfs(f0);
    if side0.contains(&f1) {
        return LoopSides::SameRegion {
            faces: side0.iter().map(|&f| fs.faces[f].name.clone()).collect(),
        };
    }
    let side1 = bfs(f1);
    let base = t.point_of(halves[0]);
    let summary = |visited: &BTreeSet<usize>| region_summary(t, fs, visited, base, arc);
    LoopSides::Separated { sides: [summary(&side0), summary(&side1)] }
}

fn region_summary(
    t: &PartialTriangulation,
    fs: &FaceStructure,
    visited: &BTreeSet<usize>,
    base: PointId,
    cut: ArcId,
) -> RegionSummary {
    let mut arcs_inside = BTreeSet::new();
    for (a, data) in t.arcs.iter().enumerate() {
        if ArcId(a) == cut {
            continue;
        }
        if visited.contains(&fs.face_of_dart(Dart::Arc { leave: data.halves[0] })) {
            arcs_inside.insert(ArcId(a));
        }
    }
    let mut marked_circles = BTreeSet::new();
    for c in 0..t.boundary_count as usize {
        if t.marked_component(c)
            && visited.contains(&fs.face_of_dart(Dart::Seg { component: c, index: 0 }))
        {
            marked_circles.insert(c);
        }
    }
    let mut enclosed_inside = BTreeSet::new();
    let mut isolated_inside = BTreeSet::new();
    let mut chi_faces = 0i64;
    for &f in visited {
        let face = &fs.faces[f];
        chi_faces += face.chi();
        enclosed_inside.extend(face.enclosed.iter().copied());
        isolated_inside.extend(face.isolated.iter().copied());
    }

    let mut vertex_points: BTreeSet<PointId> = BTreeSet::from([base]);
    let mut marked_points: BTreeSet<PointId> = BTreeSet::new();
    for &a in &arcs_inside {
        let (p, q) = t.arc_points(a);
        vertex_points.extend([p, q]);
        marked_points.extend([p, q]);
    }
    let mut segments_inside = 0usize;
    for &c in &marked_circles {
        segments_inside += t.boundary_points[c].len();
        for &p in &t.boundary_points[c] {
            vertex_points.insert(p);
            marked_points.insert(p);
        }
    }
    marked_points.extend(isolated_inside.iter().copied());
    marked_points.remove(&base);

    let v = vertex_points.len() as i64;
    let e = arcs_inside.len() as i64 + segments_inside as i64 + 1;
    let chi = v - e + chi_faces;
    let circles = marked_circles.len() as i64 + enclosed_inside.len() as i64 + 1;
    let two_genus = 2 - chi - circles;
    debug_assert!(two_genus >= 0 && two_genus % 2 == 0, "inconsistent side surface");
    RegionSummary {
        faces: visited.iter().map(|&f| fs.faces[f].name.clone()).collect(),
        genus: two_genus / 2,
        sigma_boundary_circles: (marked_circles.len() + enclosed_inside.len()),
        marked_points: marked_points
            .iter()
            .map(|&p| t.point_name(p).to_string())
            .collect(),
    }
}

/// Full validation: the paper's hypotheses plus bookkeeping consistency.
pub fn validate(t: &PartialTriangulation) -> crate::surface::ValidationReport {
    let mut report = crate::surface::ValidationReport::default();
    let n_points = t.points.len();

    // (a) sphere / disc minimum marked points
    if t.genus == 0 && t.boundary_count == 0 && n_points < 5 {
        report.violations.push(Violation::SphereNeedsFivePoints { have: n_points });
    }
    if t.genus == 0 && t.boundary_count == 1 && n_points < 3 {
        report.violations.push(Violation::DiscNeedsThreePoints { have: n_points });
    }

    let fs = face_structure(t);
    report.violations.extend(fs.assembly_violations.clone());

    // (f) assignment of isolated points and arc-free boundary components
    let isolated = t.isolated_interior_points();
    for p in &isolated {
        let count = fs.faces.iter().filter(|f| f.isolated.contains(p)).count();
        match count {
            0 => report
                .violations
                .push(Violation::IsolatedPointUnassigned { point: t.point_name(*p).into() }),
            1 => {}
            _ => report.violations.push(Violation::IsolatedPointMultiplyAssigned {
                point: t.point_name(*p).into(),
            }),
        }
    }
    for face in &fs.faces {
        for p in &face.isolated {
            if !isolated.contains(p) {
                report.violations.push(Violation::IsolatedAssignmentNotIsolated {
                    point: t.point_name(*p).into(),
                    face: face.name.clone(),
                });
            }
        }
        for &c in &face.enclosed {
            if t.marked_component(c) {
                report.violations.push(Violation::EnclosedComponentMarked {
                    component: c,
                    face: face.name.clone(),
                });
            }
        }
    }
    for c in t.unmarked_components() {
        let count = fs.faces.iter().filter(|f| f.enclosed.contains(&c)).count();
        match count {
            0 => report
                .violations
                .push(Violation::EnclosedComponentUnassigned { component: c }),
            1 => {}
            _ => report
                .violations
                .push(Violation::EnclosedComponentMultiplyAssigned { component: c }),
        }
    }

    // (b) Euler characteristic consistency
    let lhs = t.vertex_count() as i64 - t.edge_count() as i64
        + fs.faces.iter().map(|f| f.chi()).sum::<i64>();
    let rhs = 2 - 2 * t.genus as i64 - t.boundary_count as i64;
    if lhs != rhs {
        report.violations.push(Violation::EulerMismatch { lhs, rhs });
    }

    // (c), (d): empty monogon and bigon faces
    for face in &fs.faces {
        if face.genus != 0
            || !face.enclosed.is_empty()
            || !face.isolated.is_empty()
            || face.walks.len() != 1
        {
            continue;
        }
        let walk = &fs.walks[face.walks[0]];
        let arc_ids: Vec<ArcId> = walk
            .darts
            .iter()
            .filter_map(|d| match d {
                Dart::Arc { leave } => Some(t.arc_of(*leave)),
                Dart::Seg { .. } => None,
            })
            .collect();
        match (walk.darts.len(), arc_ids.len()) {
            (1, 1) => report
                .violations
                .push(Violation::EmptyMonogon { arc: t.arc_name(arc_ids[0]).into() }),
            (2, 2) if arc_ids[0] != arc_ids[1] => {
                report.violations.push(Violation::DuplicateArcBigon {
                    first: t.arc_name(arc_ids[0]).into(),
                    second: t.arc_name(arc_ids[1]).into(),
                })
            }
            (2, 1) => report
                .violations
                .push(Violation::BoundaryParallelBigon { arc: t.arc_name(arc_ids[0]).into() }),
            _ => {}
        }
    }

    // (e) loops cutting off a single low-multiplicity point; also the
    // boundary-parallel-loop warning
    if report.violations.iter().all(|v| v.code() != "b" && v.code() != "f") {
        for a in 0..t.arcs.len() {
            let arc = ArcId(a);
            if !t.is_loop(arc) {
                continue;
            }
            if let LoopSides::Separated { sides } = enclosed_region_in(t, &fs, arc) {
                for side in &sides {
                    if side.genus == 0
                        && side.sigma_boundary_circles == 0
                        && side.marked_points.len() == 1
                    {
                        let p = t.point_id(&side.marked_points[0]).expect("known point");
                        let m = t.multiplicity(p);
                        if m <= 2 {
                            report.violations.push(
                                Violation::LoopEnclosesLowMultiplicityPoint {
                                    arc: t.arc_name(arc).into(),
                                    point: side.marked_points[0].clone(),
                                    multiplicity: m,
                                },
                            );
                        }
                    }
                    if side.genus == 0
                        && side.marked_points.is_empty()
                        && side.sigma_boundary_circles == 1
                    {
                        report.warnings.push(Warning::LoopParallelToUnmarkedCircle {
                            arc: t.arc_name(arc).into(),
                        });
                    }
                }
            }
        }
    }

    report
}

/// Deletes every arc outside `keep`, merging faces and reassigning isolated
/// points and enclosed boundary components to the merged faces.
pub fn restrict(
    t: &PartialTriangulation,
    keep: &BTreeSet<ArcId>,
) -> Result<PartialTriangulation, crate::surface::SurfaceError> {
    let fs = face_structure(t);
    let deleted: Vec<ArcId> = (0..t.arcs.len())
        .map(ArcId)
        .filter(|a| !keep.contains(a))
        .collect();

    // union-find over old faces, joined across each deleted arc
    let mut parent: Vec<usize> = (0..fs.faces.len()).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    for &a in &deleted {
        let halves = t.arcs[a.0].halves;
        let fa = fs.face_of_dart(Dart::Arc { leave: halves[0] });
        let fb = fs.face_of_dart(Dart::Arc { leave: halves[1] });
        let (ra, rb) = (find(&mut parent, fa), find(&mut parent, fb));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            parent[hi] = lo;
        }
    }

    let deleted_set: BTreeSet<ArcId> = deleted.iter().copied().collect();
    let mut group_chi: BTreeMap<usize, i64> = BTreeMap::new();
    let mut group_enclosed: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    let mut group_isolated: BTreeMap<usize, BTreeSet<PointId>> = BTreeMap::new();
    for f in 0..fs.faces.len() {
        let g = find(&mut parent, f);
        *group_chi.entry(g).or_insert(0) += fs.faces[f].chi();
        group_enclosed.entry(g).or_default().extend(fs.faces[f].enclosed.iter().copied());
        group_isolated.entry(g).or_default().extend(fs.faces[f].isolated.iter().copied());
    }
    for &a in &deleted {
        let g = find(&mut parent, fs.face_of_dart(Dart::Arc { leave: t.arcs[a.0].halves[0] }));
        *group_chi.entry(g).or_insert(0) -= 1;
    }
    // interior points whose arcs are all deleted become isolated content of
    // the merged face around them
    for (i, _) in t.points.iter().enumerate() {
        let p = PointId(i);
        if !t.is_interior(p) || t.degree(p) == 0 {
            continue;
        }
        let remaining = t.rotations[i]
            .iter()
            .any(|&h| !deleted_set.contains(&t.arc_of(h)));
        if !remaining {
            let any_half = t.rotations[i][0];
            let g = find(&mut parent, fs.face_of_dart(Dart::Arc { leave: any_half }));
            *group_chi.entry(g).or_insert(0) += 1;
            group_isolated.entry(g).or_default().insert(p);
        }
    }

    // build the reduced triangulation without faces first, to trace new walks
    let mut spec = SurfaceSpec {
        genus: t.genus,
        boundary_count: t.boundary_count,
        points: t
            .points
            .iter()
            .map(|p| (p.name.clone(), p.location, p.multiplicity, p.lambda.clone()))
            .collect(),
        arcs: Vec::new(),
        rotations: Vec::new(),
        faces: Vec::new(),
    };
    for (a, data) in t.arcs.iter().enumerate() {
        if keep.contains(&ArcId(a)) {
            let h0 = &t.half_edges[data.halves[0].0];
            let h1 = &t.half_edges[data.halves[1].0];
            spec.arcs.push((
                data.name.clone(),
                (h0.name.clone(), t.point_name(h0.point).to_string()),
                (h1.name.clone(), t.point_name(h1.point).to_string()),
            ));
        }
    }
    for (p, rot) in t.rotations.iter().enumerate() {
        let kept: Vec<String> = rot
            .iter()
            .filter(|&&h| !deleted_set.contains(&t.arc_of(h)))
            .map(|&h| t.half_edges[h.0].name.clone())
            .collect();
        if !kept.is_empty() {
            spec.rotations.push((t.point_name(PointId(p)).to_string(), kept));
        }
    }
    let bare = PartialTriangulation::from_spec(t.ring, &spec)?;
    let new_walks = trace_walks(&bare);

    // map each new walk to its merged group via any of its darts
    let mut group_new_walks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (w, walk) in new_walks.iter().enumerate() {
        let dart = walk.darts[0];
        let old_face = match dart {
            Dart::Arc { leave } => {
                let name = &bare.half_edges[leave.0].name;
                let old_h = t.half_edge_id(name).expect("kept half-edge");
                fs.face_of_dart(Dart::Arc { leave: old_h })
            }
            Dart::Seg { component, index } => {
                fs.face_of_dart(Dart::Seg { component, index })
            }
        };
        let g = find(&mut parent, old_face);
        group_new_walks.entry(g).or_default().push(w);
    }

    // assemble face annotations per group
    for (&g, chi) in &group_chi {
        let walks = group_new_walks.get(&g).cloned().unwrap_or_default();
        let enclosed: Vec<usize> = group_enclosed
            .get(&g)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default();
        let isolated: Vec<String> = group_isolated
            .get(&g)
            .map(|s| s.iter().map(|&p| t.point_name(p).to_string()).collect())
            .unwrap_or_default();
        let two_genus = 2 - chi - walks.len() as i64 - enclosed.len() as i64;
        assert!(
            two_genus >= 0 && two_genus % 2 == 0,
            "face merge produced inconsistent genus"
        );
        let mut line = FaceSpecLine {
            name: fs.faces[g].name.clone(),
            genus: (two_genus / 2) as u32,
            enclosed,
            isolated,
            anchors: Vec::new(),
        };
        for &w in &walks {
            match new_walks[w].darts[0] {
                Dart::Arc { leave } => line
                    .anchors
                    .push(crate::surface::AnchorSpec::Half(
                        bare.half_edges[leave.0].name.clone(),
                        Side::Right,
                    )),
                Dart::Seg { component, index } => line
                    .anchors
                    .push(crate::surface::AnchorSpec::Segment(component, index)),
            }
        }
        spec.faces.push(line);
    }

    PartialTriangulation::from_spec(t.ring, &spec)
}

/// Compares the rotation systems of two triangulations up to renaming of
/// half-edges (arc names and point names must agree; a loop's two halves may
/// swap). Used for the flip round-trip invariant.
pub fn same_rotation_system(a: &PartialTriangulation, b: &PartialTriangulation) -> bool {
    if a.points.len() != b.points.len() || a.arcs.len() != b.arcs.len() {
        return false;
    }
    for p in &a.points {
        match b.point_id(&p.name) {
            Some(q) => {
                let bp = &b.points[q.0];
                if bp.location != p.location || bp.multiplicity != p.multiplicity {
                    return false;
                }
            }
            None => return false,
        }
    }
    // loops whose halves might be swapped
    let loops: Vec<ArcId> = (0..a.arcs.len())
        .map(ArcId)
        .filter(|&x| a.is_loop(x))
        .collect();
    let n = loops.len().min(16);
    for mask in 0..(1usize << n) {
        let render = |t: &PartialTriangulation, swap: &dyn Fn(&str, u8) -> u8| {
            let mut rots: Vec<(String, Vec<(String, u8)>)> = Vec::new();
            for (p, rot) in t.rotations.iter().enumerate() {
                let mut seq: Vec<(String, u8)> = rot
                    .iter()
                    .map(|&h| {
                        let hd = &t.half_edges[h.0];
                        let arc = t.arc_name(hd.arc).to_string();
                        let e = swap(&arc, hd.end);
                        (arc, e)
                    })
                    .collect();
                if t.is_interior(PointId(p)) && !seq.is_empty() {
                    // canonical rotation of the cyclic sequence
                    let min_idx = (0..seq.len())
                        .min_by_key(|&i| {
                            let mut r = seq.clone();
                            r.rotate_left(i);
                            r
                        })
                        .unwrap();
                    seq.rotate_left(min_idx);
                }
                rots.push((t.point_name(PointId(p)).to_string(), seq));
            }
            rots.sort();
            rots
        };
        let id = |_: &str, e: u8| e;
        let swap_fn = |arc: &str, e: u8| {
            for (i, l) in loops.iter().enumerate().take(n) {
                if a.arc_name(*l) == arc && mask & (1 << i) != 0 {
                    return 1 - e;
                }
            }
            e
        };
        let ra = render(a, &id);
        let rb = render(b, &swap_fn);
        if ra == rb {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra;
    use crate::fixtures;
    use std::collections::BTreeSet;

    fn arc_darts(t: &PartialTriangulation, walk: &Walk) -> Vec<String> {
        walk.darts
            .iter()
            .map(|d| match d {
                Dart::Arc { leave } => t.half_edges[leave.0].name.clone(),
                Dart::Seg { component, index } => format!("@{component}:{index}"),
            })
            .collect()
    }

    #[test]
    fn disc_fixture_walks() {
        let t = fixtures::disc_abcd();
        let walks = trace_walks(&t);
        assert_eq!(walks.len(), 3, "disc fixture has three faces");
        // the small triangle walk: sides of BA, CA, BC only
        let tri: Vec<Vec<String>> = walks
            .iter()
            .filter(|w| w.darts.len() == 3 && w.seg_dart_count() == 0)
            .map(|w| arc_darts(&t, w))
            .collect();
        assert_eq!(tri.len(), 1);
        let names: BTreeSet<String> = tri[0].iter().cloned().collect();
        assert_eq!(
            names,
            BTreeSet::from(["BA_B".into(), "CA_A".into(), "BC_C".into()])
        );
        // every arc side and segment in exactly one walk
        let total: usize = walks.iter().map(|w| w.darts.len()).sum();
        assert_eq!(total, 2 * t.arcs.len() + t.segment_count());
    }

    #[test]
    fn chord_of_disc_has_two_walks() {
        // single chord between two boundary points; third point for the
        // disc minimum
        let text = "surface genus=0 boundaries=1\n\
                    point P boundary=0:0 m=1 lambda=1\n\
                    point Q boundary=0:1 m=1 lambda=1\n\
                    point R interior m=3 lambda=1\n\
                    point S interior m=3 lambda=1\n\
                    arc c c_P@P c_Q@Q\n\
                    rotation P: c_P\n\
                    rotation Q: c_Q\n\
                    face F genus=0 encloses=[] isolated=[R] side=c_P.R\n\
                    face G genus=0 encloses=[] isolated=[S] side=c_P.L\n";
        let t = crate::format::parse_ptri(text, crate::scalar::Ring::Rationals).unwrap();
        assert_eq!(trace_walks(&t).len(), 2);
    }

    #[test]
    fn torus_fixture_one_face_two_walks() {
        let t = fixtures::torus_loop();
        let fs = face_structure(&t);
        assert_eq!(fs.walks.len(), 2, "a loop always traces two one-sided walks");
        assert_eq!(fs.faces.len(), 1, "both walks belong to the single annular face");
        assert_eq!(fs.faces[0].walks.len(), 2);
        // the face contains both arc sides
        let sides: usize = fs.faces[0]
            .walks
            .iter()
            .map(|&w| fs.walks[w].arc_dart_count())
            .sum();
        assert_eq!(sides, 2);
    }

    #[test]
    fn fixtures_validate() {
        for t in [
            fixtures::disc_abcd(),
            fixtures::torus_loop(),
            fixtures::triangle_mnp(),
            fixtures::loop_n(),
            fixtures::torus_tri(),
        ] {
            let report = validate(&t);
            assert!(report.ok(), "violations: {:?}", report.violations);
        }
    }

    #[test]
    fn degree_stats_examples() {
        let t = fixtures::torus_loop();
        let stats = t.degree_stats();
        assert_eq!(stats.degrees["M"], 2, "loops count twice");
        assert_eq!(stats.degrees["N"], 0);
        assert_eq!(stats.boundary_to_boundary_arcs, 0);

        let t = fixtures::disc_abcd();
        let stats = t.degree_stats();
        assert_eq!(stats.degrees["A"], 3);
        assert_eq!(stats.degrees["B"], 2);
        assert_eq!(stats.degrees["C"], 2);
        assert_eq!(stats.degrees["D"], 1);
        assert_eq!(stats.boundary_to_boundary_arcs, 1);
        let sum: usize = stats.degrees.values().sum();
        assert_eq!(sum, 2 * t.arcs.len());
    }

    #[test]
    fn sphere_minimum_rejected() {
        let text = "surface genus=0 boundaries=0\n\
                    point A interior m=3 lambda=1\n\
                    point B interior m=3 lambda=1\n\
                    point C interior m=3 lambda=1\n\
                    point D interior m=3 lambda=1\n\
                    face F genus=0 encloses=[] isolated=[A,B,C,D]\n";
        let t = crate::format::parse_ptri_unchecked(text, crate::scalar::Ring::Rationals).unwrap();
        let report = validate(&t);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::SphereNeedsFivePoints { have: 4 })));
    }

    #[test]
    fn disc_minimum_rejected() {
        let text = "surface genus=0 boundaries=1\n\
                    point A boundary=0:0 m=1 lambda=1\n\
                    point B boundary=0:1 m=1 lambda=1\n";
        let t = crate::format::parse_ptri_unchecked(text, crate::scalar::Ring::Rationals).unwrap();
        let report = validate(&t);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::DiscNeedsThreePoints { have: 2 })));
    }

    fn loop_around_point(m: u32) -> PartialTriangulation {
        let text = format!(
            "surface genus=0 boundaries=1\n\
             point M interior m={m} lambda=1\n\
             point N interior m=3 lambda=1\n\
             point P interior m=3 lambda=1\n\
             arc L L_1@N L_2@N\n\
             rotation N: L_1 L_2\n\
             face IN genus=0 encloses=[] isolated=[M] side=L_1.R\n\
             face OUT genus=0 encloses=[0] isolated=[P] side=L_1.L\n"
        );
        crate::format::parse_ptri_unchecked(&text, crate::scalar::Ring::Rationals).unwrap()
    }

    #[test]
    fn loop_enclosing_low_multiplicity_rejected() {
        let t = loop_around_point(2);
        let report = validate(&t);
        assert!(report.violations.iter().any(|v| matches!(
            v,
            Violation::LoopEnclosesLowMultiplicityPoint { multiplicity: 2, .. }
        )));
        let ok = loop_around_point(3);
        assert!(validate(&ok).ok());
    }

    #[test]
    fn small_triangles_on_fixtures() {
        let t = fixtures::disc_abcd();
        let tris = small_triangles(&t);
        assert_eq!(tris.len(), 1);
        let names: Vec<&str> = tris[0].sides.iter().map(|&a| t.arc_name(a)).collect();
        // cyclic content (BC, BA, CA); walk starts at the least dart
        let mut cyc = names.clone();
        cyc.sort();
        assert_eq!(cyc, vec!["BA", "BC", "CA"]);
        let corners: BTreeSet<&str> =
            tris[0].corners.iter().map(|&p| t.point_name(p)).collect();
        assert_eq!(corners, BTreeSet::from(["A", "B", "C"]));

        assert!(small_triangles(&fixtures::torus_loop()).is_empty());

        let l = fixtures::loop_n();
        let tris = small_triangles(&l);
        assert_eq!(tris.len(), 1, "self-folded triangle inside the loop");
        let mut names: Vec<&str> = tris[0].sides.iter().map(|&a| l.arc_name(a)).collect();
        names.sort();
        assert_eq!(names, vec!["L", "MN", "MN"], "repetition explicit");
    }

    #[test]
    fn enclosed_region_examples() {
        let l = fixtures::loop_n();
        let loop_arc = l.arc_id("L").unwrap();
        match enclosed_region(&l, loop_arc).unwrap() {
            LoopSides::Separated { sides } => {
                let inner = sides
                    .iter()
                    .find(|s| s.marked_points == vec!["M".to_string()])
                    .expect("one side encloses M");
                assert_eq!(inner.genus, 0);
                assert_eq!(inner.sigma_boundary_circles, 0);
            }
            other => panic!("expected separated sides, got {other:?}"),
        }

        let torus = fixtures::torus_loop();
        let u = torus.arc_id("u").unwrap();
        assert!(matches!(
            enclosed_region(&torus, u).unwrap(),
            LoopSides::SameRegion { .. }
        ));

        let disc = fixtures::disc_abcd();
        assert!(enclosed_region(&disc, disc.arc_id("AD").unwrap()).is_err());
    }

    #[test]
    fn restrict_examples() {
        let t = fixtures::disc_abcd();
        let keep = BTreeSet::from([t.arc_id("AD").unwrap()]);
        let r = restrict(&t, &keep).unwrap();
        assert!(validate(&r).ok(), "{:?}", validate(&r).violations);
        assert_eq!(r.arcs.len(), 1);
        assert_eq!(r.degree_stats().degrees["D"], 1);
        assert_eq!(r.rotations[r.point_id("A").unwrap().0].len(), 1);
        // C became isolated
        let fs = face_structure(&r);
        assert!(fs
            .faces
            .iter()
            .any(|f| f.isolated.contains(&r.point_id("C").unwrap())));

        // restrict to everything is the identity on rotation data
        let all: BTreeSet<ArcId> = (0..t.arcs.len()).map(ArcId).collect();
        let same = restrict(&t, &all).unwrap();
        assert!(same_rotation_system(&t, &same));

        // restrict to nothing leaves an arcless surface with every point
        // isolated in one face
        let none = restrict(&t, &BTreeSet::new()).unwrap();
        assert!(validate(&none).ok());
        assert_eq!(none.arcs.len(), 0);

        // restriction tower: restrict(restrict(t, A), B) = restrict(t, B)
        let a: BTreeSet<ArcId> = ["AD", "BA", "CA"]
            .iter()
            .map(|n| t.arc_id(n).unwrap())
            .collect();
        let mid = restrict(&t, &a).unwrap();
        let b_mid: BTreeSet<ArcId> = ["AD", "CA"]
            .iter()
            .map(|n| mid.arc_id(n).unwrap())
            .collect();
        let b_full: BTreeSet<ArcId> = ["AD", "CA"]
            .iter()
            .map(|n| t.arc_id(n).unwrap())
            .collect();
        let two_step = restrict(&mid, &b_mid).unwrap();
        let one_step = restrict(&t, &b_full).unwrap();
        assert!(same_rotation_system(&two_step, &one_step));
    }

    #[test]
    fn restrict_torus_to_nothing() {
        let t = fixtures::torus_loop();
        let r = restrict(&t, &BTreeSet::new()).unwrap();
        assert!(validate(&r).ok(), "{:?}", validate(&r).violations);
        let fs = face_structure(&r);
        assert_eq!(fs.faces.len(), 1);
        assert_eq!(fs.faces[0].genus, 1, "the face is the whole torus");
        assert_eq!(fs.faces[0].isolated.len(), 2);
    }

    #[test]
    fn euler_identity_on_fixtures() {
        for t in [fixtures::disc_abcd(), fixtures::torus_loop(), fixtures::torus_tri()] {
            let fs = face_structure(&t);
            let lhs = t.vertex_count() as i64 - t.edge_count() as i64
                + fs.faces.iter().map(|f| f.chi()).sum::<i64>();
            assert_eq!(lhs, 2 - 2 * t.genus as i64 - t.boundary_count as i64);
        }
    }

    #[test]
    fn ranks_via_restriction_subsets() {
        // #basis of the truncation equals the rank formula of the
        // restriction for every subset of the disc fixture's arcs
        let t = fixtures::disc_abcd();
        let n = t.arcs.len();
        for mask in 0..(1u32 << n) {
            let keep: BTreeSet<ArcId> = (0..n).filter(|i| mask & (1 << i) != 0).map(ArcId).collect();
            let r = restrict(&t, &keep).unwrap();
            assert_eq!(
                algebra::enumerate_basis(&r).len() as u64,
                algebra::rank_formula(&r),
                "mask {mask:b}"
            );
        }
    }
}
