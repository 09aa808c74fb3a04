//! Brauer graph algebras: the boundary-free, triangle-free specialization of
//! the partial-triangulation engine, a direct construction from a ribbon
//! graph, comparison against the full engine, and the embedding of any
//! Brauer graph into a closed marked surface.

use crate::algebra::{self, Algebra, StructureConstants};
use crate::faces;
use crate::quiver;
use crate::scalar::{Ring, Scalar};
use crate::surface::{
    ArcId, FaceSpecLine, Location, PartialTriangulation, PointId, Side, SurfaceError, SurfaceSpec,
};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BrauerError {
    #[error("not the Brauer case: {0:?}")]
    NotBrauerCase(Vec<String>),
    #[error("the edge graph is disconnected")]
    Disconnected,
    #[error("graph has no edges")]
    NoEdges,
    #[error("rotation data is not orientable (odd Euler characteristic {0})")]
    OddEuler(i64),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Algebra(#[from] algebra::AlgebraError),
}

/// Raw Brauer graph data, as parsed from the reduced `.ptri` dialect.
#[derive(Debug, Clone, Default)]
pub struct BrauerSpec {
    pub vertices: Vec<(String, u32, Scalar)>,
    pub edges: Vec<(String, (String, String), (String, String))>,
    pub rotations: Vec<(String, Vec<String>)>,
}

/// A ribbon graph with vertex multiplicities and unit coefficients. The
/// carrier reuses the surface machinery with every vertex interior; its
/// genus/boundary fields are placeholders, only the rotation data matters.
#[derive(Debug, Clone)]
pub struct BrauerGraph {
    pub carrier: PartialTriangulation,
}

impl BrauerGraph {
    pub fn from_spec(ring: Ring, spec: &BrauerSpec) -> Result<BrauerGraph, SurfaceError> {
        let sspec = SurfaceSpec {
            genus: 0,
            boundary_count: 0,
            points: spec
                .vertices
                .iter()
                .map(|(n, m, l)| (n.clone(), Location::Interior, *m, l.clone()))
                .collect(),
            arcs: spec.edges.clone(),
            rotations: spec.rotations.clone(),
            faces: Vec::new(),
        };
        Ok(BrauerGraph { carrier: PartialTriangulation::from_spec(ring, &sspec)? })
    }

    pub fn edge_count(&self) -> usize {
        self.carrier.arcs.len()
    }

    /// Brauer graph algebra dimension, directly: sum of m_v * d_v^2.
    pub fn dimension_formula(&self) -> u64 {
        (0..self.carrier.points.len())
            .map(|p| {
                let d = self.carrier.degree(PointId(p)) as u64;
                self.carrier.multiplicity(PointId(p)) as u64 * d * d
            })
            .sum()
    }
}

/// The engine with an empty triangle table: cycle identifications and socle
/// annihilation stay, every bouncing product is zero.
pub fn brauer_algebra(g: &BrauerGraph) -> Algebra {
    let q = quiver::build_quiver(&g.carrier);
    let bounce = quiver::bouncing_pairs_with(&g.carrier, &q, &[]);
    Algebra::from_parts(g.carrier.clone(), q, bounce)
}

pub fn brauer_algebra_direct(g: &BrauerGraph) -> Result<StructureConstants, BrauerError> {
    Ok(algebra::structure_table(&brauer_algebra(g))?)
}

#[derive(Debug, Clone, Serialize)]
pub struct BrauerCase {
    pub is_brauer: bool,
    pub reasons: Vec<String>,
}

/// True iff there is no small triangle and no arc touches the boundary.
pub fn is_brauer_case(t: &PartialTriangulation) -> BrauerCase {
    let mut reasons = Vec::new();
    let triangles = faces::small_triangles(t);
    if !triangles.is_empty() {
        let tri = &triangles[0];
        reasons.push(format!(
            "small triangle on ({}, {}, {})",
            t.arc_name(tri.sides[0]),
            t.arc_name(tri.sides[1]),
            t.arc_name(tri.sides[2])
        ));
    }
    for a in 0..t.arcs.len() {
        if !t.fully_interior(ArcId(a)) {
            reasons.push(format!("arc {} touches the boundary", t.arc_name(ArcId(a))));
        }
    }
    BrauerCase { is_brauer: reasons.is_empty(), reasons }
}

/// Forgets faces and boundary-free surface data, keeping the ribbon graph of
/// the arc-incident points.
pub fn extract_ribbon(t: &PartialTriangulation) -> Result<BrauerGraph, SurfaceError> {
    let mut spec = BrauerSpec::default();
    for (i, p) in t.points.iter().enumerate() {
        if t.degree(PointId(i)) > 0 {
            spec.vertices.push((p.name.clone(), p.multiplicity, p.lambda.clone()));
        }
    }
    for arc in &t.arcs {
        let h0 = &t.half_edges[arc.halves[0].0];
        let h1 = &t.half_edges[arc.halves[1].0];
        spec.edges.push((
            arc.name.clone(),
            (h0.name.clone(), t.point_name(h0.point).to_string()),
            (h1.name.clone(), t.point_name(h1.point).to_string()),
        ));
    }
    for (p, rot) in t.rotations.iter().enumerate() {
        if !rot.is_empty() {
            spec.rotations.push((
                t.point_name(PointId(p)).to_string(),
                rot.iter().map(|h| t.half_edges[h.0].name.clone()).collect(),
            ));
        }
    }
    BrauerGraph::from_spec(t.ring, &spec)
}

/// A structure table keyed by printable names, for comparison across engines
/// whose internal indices differ.
fn named_table(sc: &StructureConstants) -> BTreeMap<(String, String), (String, String)> {
    let mut out = BTreeMap::new();
    for i in 0..sc.dim() {
        for j in 0..sc.dim() {
            if let Some((c, k)) = &sc.table[i][j] {
                out.insert(
                    (sc.names[i].clone(), sc.names[j].clone()),
                    (c.to_string(), sc.names[*k].clone()),
                );
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonVerdict {
    pub equal: bool,
    pub delta_dim: usize,
    pub brauer_dim: usize,
    pub mismatches: Vec<String>,
}

/// Builds the partial-triangulation algebra and the direct Brauer graph
/// algebra of the underlying ribbon graph and compares structure constants
/// entry by entry.
pub fn compare_with_delta(t: &PartialTriangulation) -> Result<ComparisonVerdict, BrauerError> {
    let case = is_brauer_case(t);
    if !case.is_brauer {
        return Err(BrauerError::NotBrauerCase(case.reasons));
    }
    let delta = algebra::structure_table(&Algebra::for_triangulation(t))?;
    let ribbon = extract_ribbon(t)?;
    let direct = brauer_algebra_direct(&ribbon)?;

    let a = named_table(&delta);
    let b = named_table(&direct);
    let mut mismatches = Vec::new();
    for (key, val) in &a {
        match b.get(key) {
            Some(v) if v == val => {}
            other => mismatches.push(format!(
                "({} * {}): delta gives {:?}, brauer gives {:?}",
                key.0, key.1, val, other
            )),
        }
    }
    for (key, val) in &b {
        if !a.contains_key(key) {
            mismatches.push(format!(
                "({} * {}): only in brauer table: {:?}",
                key.0, key.1, val
            ));
        }
    }
    mismatches.truncate(20);
    Ok(ComparisonVerdict {
        equal: mismatches.is_empty() && delta.dim() == direct.dim(),
        delta_dim: delta.dim(),
        brauer_dim: direct.dim(),
        mismatches,
    })
}

/// Embeds a Brauer graph as a partial triangulation of the closed surface
/// determined by its rotation system, padding every face with an isolated
/// marked point of multiplicity 3 so no small triangle or excluded loop can
/// appear.
pub fn embed_brauer_graph(g: &BrauerGraph) -> Result<PartialTriangulation, BrauerError> {
    let t = &g.carrier;
    if t.arcs.is_empty() {
        return Err(BrauerError::NoEdges);
    }
    // connectivity of the edge-bearing part
    let mut parent: Vec<usize> = (0..t.points.len()).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    for arc in &t.arcs {
        let (p, q) = (t.point_of(arc.halves[0]).0, t.point_of(arc.halves[1]).0);
        let (rp, rq) = (find(&mut parent, p), find(&mut parent, q));
        if rp != rq {
            parent[rp] = rq;
        }
    }
    let incident: Vec<usize> = (0..t.points.len())
        .filter(|&p| t.degree(PointId(p)) > 0)
        .collect();
    let root = find(&mut parent, incident[0]);
    if incident.iter().any(|&p| find(&mut parent, p) != root) {
        return Err(BrauerError::Disconnected);
    }

    let walks = faces::trace_walks(t);
    let chi = incident.len() as i64 - t.arcs.len() as i64 + walks.len() as i64;
    if chi % 2 != 0 {
        return Err(BrauerError::OddEuler(chi));
    }
    let genus = (2 - chi) / 2;
    assert!(genus >= 0, "rotation system gives negative genus");

    let mut spec = SurfaceSpec {
        genus: genus as u32,
        boundary_count: 0,
        points: t
            .points
            .iter()
            .map(|p| (p.name.clone(), Location::Interior, p.multiplicity, p.lambda.clone()))
            .collect(),
        arcs: t
            .arcs
            .iter()
            .map(|arc| {
                let h0 = &t.half_edges[arc.halves[0].0];
                let h1 = &t.half_edges[arc.halves[1].0];
                (
                    arc.name.clone(),
                    (h0.name.clone(), t.point_name(h0.point).to_string()),
                    (h1.name.clone(), t.point_name(h1.point).to_string()),
                )
            })
            .collect(),
        rotations: t
            .rotations
            .iter()
            .enumerate()
            .filter(|(_, rot)| !rot.is_empty())
            .map(|(p, rot)| {
                (
                    t.point_name(PointId(p)).to_string(),
                    rot.iter().map(|h| t.half_edges[h.0].name.clone()).collect(),
                )
            })
            .collect(),
        faces: Vec::new(),
    };

    // one isolated multiplicity-3 point inside every face
    let one = t.ring.one();
    for (w, walk) in walks.iter().enumerate() {
        let pad = format!("_pad{w}");
        spec.points.push((pad.clone(), Location::Interior, 3, one.clone()));
        let anchor = match walk.darts[0] {
            faces::Dart::Arc { leave } => crate::surface::AnchorSpec::Half(
                t.half_edges[leave.0].name.clone(),
                Side::Right,
            ),
            faces::Dart::Seg { .. } => unreachable!("no boundary in a ribbon graph"),
        };
        spec.faces.push(FaceSpecLine {
            name: format!("_F{w}"),
            genus: 0,
            enclosed: Vec::new(),
            isolated: vec![pad],
            anchors: vec![anchor],
        });
    }
    // sphere minimum: pad face 0 with extra isolated points
    let mut extra = 0;
    while genus == 0 && spec.points.len() < 5 {
        let pad = format!("_sphere{extra}");
        extra += 1;
        spec.points.push((pad.clone(), Location::Interior, 3, one.clone()));
        spec.faces[0].isolated.push(pad);
    }

    let embedded = PartialTriangulation::from_spec(t.ring, &spec)?;
    debug_assert!(faces::validate(&embedded).ok(), "embedding must validate");
    Ok(embedded)
}

/// Seeded random connected ribbon graph with bounded size; `max_md` caps
/// m_v * d_v so the oracle stays tractable.
pub fn random_graph(ring: Ring, seed: u64, max_edges: usize, max_m: u32, max_md: u32) -> BrauerGraph {
    use rand::{Rng, SeedableRng};
    for attempt in 0..10_000u64 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(attempt));
        let n_vertices = rng.gen_range(1..=3usize);
        let n_edges = rng.gen_range(1..=max_edges);
        let mut spec = BrauerSpec::default();
        let mut degree = vec![0usize; n_vertices];
        let mut halves_at: Vec<Vec<String>> = vec![Vec::new(); n_vertices];
        for e in 0..n_edges {
            let a = rng.gen_range(0..n_vertices);
            let b = rng.gen_range(0..n_vertices);
            let (h0, h1) = (format!("E{e}_0"), format!("E{e}_1"));
            degree[a] += 1;
            degree[b] += 1;
            halves_at[a].push(h0.clone());
            halves_at[b].push(h1.clone());
            spec.edges.push((
                format!("E{e}"),
                (h0, format!("V{a}")),
                (h1, format!("V{b}")),
            ));
        }
        if degree.iter().any(|&d| d == 0) {
            continue;
        }
        let mut ok = true;
        for v in 0..n_vertices {
            let cap = (max_md / degree[v] as u32).min(max_m);
            if cap == 0 {
                ok = false;
                break;
            }
            let m = rng.gen_range(1..=cap);
            let lambda = loop {
                let c = ring.from_integer(*[1i64, -1, 2, -2].get(rng.gen_range(0..4)).unwrap());
                if !c.is_zero() {
                    break c;
                }
            };
            spec.vertices.push((format!("V{v}"), m, lambda));
            let mut rot = halves_at[v].clone();
            // random cyclic order
            for i in (1..rot.len()).rev() {
                rot.swap(i, rng.gen_range(0..=i));
            }
            spec.rotations.push((format!("V{v}"), rot));
        }
        if !ok {
            continue;
        }
        let g = match BrauerGraph::from_spec(ring, &spec) {
            Ok(g) => g,
            Err(_) => continue,
        };
        // connected?
        if embed_brauer_graph(&g).is_ok() {
            return g;
        }
    }
    panic!("random ribbon graph generation failed to converge");
}
