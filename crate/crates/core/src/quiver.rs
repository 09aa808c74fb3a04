//! The quiver of a partial triangulation: one vertex per arc, one arrow per
//! consecutive half-edge pair around a marked point (counter-clockwise), and
//! the classification of every composable bouncing pair as a triangle
//! substitution or a zero relation.

use crate::faces::{self, SmallTriangle};
use crate::scalar::Scalar;
use crate::surface::{ArcId, HalfEdgeId, PartialTriangulation, PointId};
use serde::Serialize;
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArrowId(pub usize);

#[derive(Debug, Clone)]
pub struct Arrow {
    pub name: String,
    pub from: HalfEdgeId,
    pub to: HalfEdgeId,
    pub pivot: PointId,
    pub source: ArcId,
    pub target: ArcId,
}

#[derive(Debug, Clone)]
pub struct Quiver {
    pub arrows: Vec<Arrow>,
    /// arrow starting at a half-edge, if any (`None` for the last half-edge
    /// of a boundary rotation)
    arrow_from: Vec<Option<ArrowId>>,
}

fn arrow_name(i: usize) -> String {
    let letter = (b'a' + (i % 26) as u8) as char;
    if i < 26 {
        letter.to_string()
    } else {
        format!("{letter}{}", i / 26)
    }
}

impl Quiver {
    pub fn arrow_starting_at(&self, h: HalfEdgeId) -> Option<ArrowId> {
        self.arrow_from[h.0]
    }

    pub fn arrow(&self, a: ArrowId) -> &Arrow {
        &self.arrows[a.0]
    }

    pub fn arrow_by_name(&self, name: &str) -> Option<ArrowId> {
        self.arrows.iter().position(|a| a.name == name).map(ArrowId)
    }

    /// Arrow between two arcs at a pivot point, when unique.
    pub fn arrow_between(&self, source: ArcId, target: ArcId, pivot: PointId) -> Option<ArrowId> {
        let mut found = None;
        for (i, a) in self.arrows.iter().enumerate() {
            if a.source == source && a.target == target && a.pivot == pivot {
                if found.is_some() {
                    return None;
                }
                found = Some(ArrowId(i));
            }
        }
        found
    }
}

/// One arrow per consecutive pair: cyclic at interior points, linear at
/// boundary points. Deterministic ids in (point, rotation position) order.
pub fn build_quiver(t: &PartialTriangulation) -> Quiver {
    let mut arrows = Vec::new();
    let mut arrow_from = vec![None; t.half_edges.len()];
    for (p, rot) in t.rotations.iter().enumerate() {
        let d = rot.len();
        if d == 0 {
            continue;
        }
        let pairs: Vec<(HalfEdgeId, HalfEdgeId)> = if t.is_interior(PointId(p)) {
            (0..d).map(|i| (rot[i], rot[(i + 1) % d])).collect()
        } else {
            (0..d.saturating_sub(1)).map(|i| (rot[i], rot[i + 1])).collect()
        };
        for (from, to) in pairs {
            let id = ArrowId(arrows.len());
            arrow_from[from.0] = Some(id);
            arrows.push(Arrow {
                name: arrow_name(id.0),
                from,
                to,
                pivot: PointId(p),
                source: t.arc_of(from),
                target: t.arc_of(to),
            });
        }
    }
    Quiver { arrows, arrow_from }
}

/// A path winding around a single marked point: `length` consecutive arrows
/// starting from the arrow that leaves `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WindingSpec {
    pub start: HalfEdgeId,
    pub length: u32,
}

/// omega_{u,M} for the half-edge of u at M: the full once-around winding at
/// an interior point, zero at a boundary point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Omega {
    Zero,
    Winding(WindingSpec),
}

pub fn omega(t: &PartialTriangulation, h: HalfEdgeId) -> Omega {
    let p = t.point_of(h);
    if t.is_interior(p) {
        Omega::Winding(WindingSpec { start: h, length: t.degree(p) as u32 })
    } else {
        Omega::Zero
    }
}

/// The half-edge reached after `k` arrow steps around the pivot of `h`;
/// `None` when a boundary rotation runs out.
pub fn half_edge_step(t: &PartialTriangulation, h: HalfEdgeId, k: u32) -> Option<HalfEdgeId> {
    let p = t.point_of(h);
    let rot = &t.rotations[p.0];
    let pos = t.rotation_position(h);
    if t.is_interior(p) {
        Some(rot[(pos + k as usize) % rot.len()])
    } else if pos + (k as usize) < rot.len() {
        Some(rot[pos + k as usize])
    } else {
        None
    }
}

/// Arrow ids of a winding path.
pub fn winding_arrows(
    t: &PartialTriangulation,
    q: &Quiver,
    spec: &WindingSpec,
) -> Vec<ArrowId> {
    (0..spec.length)
        .map(|i| {
            let h = half_edge_step(t, spec.start, i).expect("winding within rotation");
            q.arrow_starting_at(h).expect("winding arrow exists")
        })
        .collect()
}

/// Substitution rule attached to the bouncing pair of a small triangle
/// corner: `alpha beta = lambda_M * (winding of length m_M d_M - 1)`, with a
/// zero right-hand side when the corner sits on the boundary.
#[derive(Debug, Clone)]
pub struct TriangleRelation {
    pub in_arrow: ArrowId,
    pub out_arrow: ArrowId,
    pub corner: PointId,
    pub coefficient: Scalar,
    /// `None` when the corner is on the boundary (the product is zero)
    pub replacement: Option<WindingSpec>,
}

#[derive(Debug, Clone)]
pub enum BounceClass {
    Triangle(TriangleRelation),
    Zero,
}

#[derive(Debug, Clone, Serialize)]
pub struct BouncingPairReport {
    pub in_arrow: String,
    pub out_arrow: String,
    pub class: String,
}

/// All composable arrow pairs that are not winding continuations, each
/// classified. Every small triangle contributes exactly three pairs.
#[derive(Debug, Clone, Default)]
pub struct BouncingTable {
    pub map: HashMap<(ArrowId, ArrowId), BounceClass>,
}

impl BouncingTable {
    pub fn classify(&self, x: ArrowId, y: ArrowId) -> Option<&BounceClass> {
        self.map.get(&(x, y))
    }
}

pub fn bouncing_pairs(t: &PartialTriangulation, q: &Quiver) -> BouncingTable {
    let triangles = faces::small_triangles(t);
    bouncing_pairs_with(t, q, &triangles)
}

pub fn bouncing_pairs_with(
    t: &PartialTriangulation,
    q: &Quiver,
    triangles: &[SmallTriangle],
) -> BouncingTable {
    let mut map: HashMap<(ArrowId, ArrowId), BounceClass> = HashMap::new();
    for tri in triangles {
        // corner arrows in walk order: alpha at N (u->v), beta at P (v->w),
        // gamma at M (w->u)
        let alpha = q.arrow_starting_at(tri.arrivals[0]).expect("corner arrow");
        let beta = q.arrow_starting_at(tri.arrivals[1]).expect("corner arrow");
        let gamma = q.arrow_starting_at(tri.arrivals[2]).expect("corner arrow");
        let m_corner = tri.corners[0];
        let n_corner = tri.corners[1];
        let p_corner = tri.corners[2];
        for (pair, corner, third) in [
            ((alpha, beta), m_corner, gamma),
            ((beta, gamma), n_corner, alpha),
            ((gamma, alpha), p_corner, beta),
        ] {
            let replacement = if t.is_interior(corner) {
                let d = t.degree(corner) as u32;
                let m = t.multiplicity(corner);
                let length = m * d - 1;
                assert!(
                    length >= 1,
                    "triangle corner {} with m*d = 1; excluded by validation",
                    t.point_name(corner)
                );
                Some(WindingSpec { start: q.arrow(third).to, length })
            } else {
                None
            };
            map.insert(
                pair,
                BounceClass::Triangle(TriangleRelation {
                    in_arrow: pair.0,
                    out_arrow: pair.1,
                    corner,
                    coefficient: t.lambda(corner).clone(),
                    replacement,
                }),
            );
        }
    }
    // remaining composable non-continuation pairs are zero relations
    for (i, x) in q.arrows.iter().enumerate() {
        for (j, y) in q.arrows.iter().enumerate() {
            if x.target == y.source && y.from != x.to {
                map.entry((ArrowId(i), ArrowId(j))).or_insert(BounceClass::Zero);
            }
        }
    }
    BouncingTable { map }
}
