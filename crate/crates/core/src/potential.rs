//! Quiver with potential for triangulations, cyclic derivatives, and an
//! independent path-quotient dimension oracle.
//!
//! The oracle works on raw relation elements only: it completes them into a
//! degree-lexicographic rewriting system by resolving overlaps, then counts
//! irreducible path words. It never sees windings, bouncing classifications
//! or any other structure the algebra engine uses, so it cross-checks that
//! engine from the outside.

use crate::algebra::{self, Algebra, Element};
use crate::faces;
use crate::quiver::{self, ArrowId, BounceClass, Quiver, WindingSpec};
use crate::scalar::{Ring, Scalar};
use crate::surface::{ArcId, PartialTriangulation, PointId};
use serde::Serialize;
use std::collections::{BTreeMap, VecDeque};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PotentialError {
    #[error("not a triangulation: {0}")]
    NotTriangulation(String),
    #[error("multiplicity {m} of {point} is not invertible over {ring}")]
    MultiplicityNotInvertible { point: String, m: u32, ring: Ring },
    #[error(transparent)]
    Algebra(#[from] algebra::AlgebraError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("relation mixes sources or targets")]
    NonUniformRelation,
    #[error("relation reduces to an invertible idempotent; quotient degenerate")]
    DegenerateRelation,
    #[error("completion did not terminate within {0} rules")]
    CompletionOverflow(usize),
    #[error("more than {0} normal words; quotient too large for the bound")]
    TooManyNormalWords(usize),
}

/// A formal sum of cycles, each stored rotated to its least form.
#[derive(Debug, Clone)]
pub struct Potential {
    pub terms: Vec<(Scalar, Vec<ArrowId>)>,
}

impl Potential {
    pub fn display(&self, q: &Quiver) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(c, cycle)| {
                let word: Vec<&str> =
                    cycle.iter().map(|a| q.arrow(*a).name.as_str()).collect();
                format!("({c})*{}", word.join("."))
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn least_rotation(cycle: &[ArrowId]) -> Vec<ArrowId> {
    let n = cycle.len();
    (0..n)
        .map(|i| {
            let mut r = cycle.to_vec();
            r.rotate_left(i);
            r
        })
        .min()
        .expect("non-empty cycle")
}

/// Maximality check used to gate the potential: every boundary component is
/// marked and every face is an empty disc with exactly three sides (arc
/// sides or boundary segments).
pub fn is_triangulation(t: &PartialTriangulation) -> Result<(), String> {
    for c in 0..t.boundary_count as usize {
        if !t.marked_component(c) {
            return Err(format!("boundary component {c} carries no marked point"));
        }
    }
    let fs = faces::face_structure(t);
    for face in &fs.faces {
        if face.genus != 0 || !face.enclosed.is_empty() || !face.isolated.is_empty() {
            return Err(format!("face {} is not a plain disc", face.name));
        }
        if face.walks.len() != 1 {
            return Err(format!("face {} has {} boundary walks", face.name, face.walks.len()));
        }
        let len = fs.walks[face.walks[0]].darts.len();
        if len != 3 {
            return Err(format!("face {} has {len} sides, expected 3", face.name));
        }
    }
    Ok(())
}

/// W = sum of small-triangle 3-cycles minus sum over marked points of
/// (lambda_M / m_M) * omega_{u_M,M}^{m_M}, with u_M the least incident arc.
pub fn build_potential(t: &PartialTriangulation, q: &Quiver) -> Result<Potential, PotentialError> {
    is_triangulation(t).map_err(PotentialError::NotTriangulation)?;
    for (i, p) in t.points.iter().enumerate() {
        if t.is_interior(PointId(i)) {
            let m_scalar = t.ring.from_integer(p.multiplicity as i64);
            if m_scalar.is_zero() {
                return Err(PotentialError::MultiplicityNotInvertible {
                    point: p.name.clone(),
                    m: p.multiplicity,
                    ring: t.ring,
                });
            }
        }
    }

    let mut terms: Vec<(Scalar, Vec<ArrowId>)> = Vec::new();
    for tri in faces::small_triangles(t) {
        let cycle: Vec<ArrowId> = tri
            .arrivals
            .iter()
            .map(|&h| q.arrow_starting_at(h).expect("corner arrow"))
            .collect();
        terms.push((t.ring.one(), least_rotation(&cycle)));
    }
    for (i, _) in t.points.iter().enumerate() {
        let p = PointId(i);
        if !t.is_interior(p) || t.degree(p) == 0 {
            continue;
        }
        let u = t.rotations[i]
            .iter()
            .map(|&h| (t.arc_of(h), h))
            .min()
            .expect("degree > 0");
        let d = t.degree(p) as u32;
        let m = t.multiplicity(p);
        let full = WindingSpec { start: u.1, length: m * d };
        let cycle = quiver::winding_arrows(t, q, &full);
        let m_inv = t
            .ring
            .from_integer(m as i64)
            .inv()
            .expect("m invertible, checked above");
        let coeff = t.lambda(p).times(&m_inv).neg();
        terms.push((coeff, least_rotation(&cycle)));
    }
    Ok(Potential { terms })
}

/// One path term of a relation element: arrows read left to right; an empty
/// word is the trivial path at `at`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PathTerm {
    pub at: ArcId,
    pub arrows: Vec<ArrowId>,
}

/// A relation in the path algebra: a sum of paths sharing source and target.
#[derive(Debug, Clone)]
pub struct RelationElement {
    pub terms: Vec<(Scalar, PathTerm)>,
}

impl RelationElement {
    pub fn display(&self, q: &Quiver) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(c, t)| {
                if t.arrows.is_empty() {
                    format!("({c})*e")
                } else {
                    let w: Vec<&str> = t.arrows.iter().map(|a| q.arrow(*a).name.as_str()).collect();
                    format!("({c})*{}", w.join("."))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// d_a(c_1...c_n) = sum over occurrences c_i = a of c_{i+1}...c_n c_1...c_{i-1}.
pub fn cyclic_derivative(q: &Quiver, w: &Potential, a: ArrowId) -> RelationElement {
    let mut collected: BTreeMap<PathTerm, Scalar> = BTreeMap::new();
    for (coeff, cycle) in &w.terms {
        for (i, arrow) in cycle.iter().enumerate() {
            if *arrow != a {
                continue;
            }
            let mut word: Vec<ArrowId> = cycle[i + 1..].to_vec();
            word.extend_from_slice(&cycle[..i]);
            let term = PathTerm { at: q.arrow(a).target, arrows: word };
            match collected.entry(term) {
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    let sum = o.get().plus(coeff);
                    if sum.is_zero() {
                        o.remove();
                    } else {
                        *o.get_mut() = sum;
                    }
                }
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(coeff.clone());
                }
            }
        }
    }
    RelationElement {
        terms: collected.into_iter().map(|(t, c)| (c, t)).collect(),
    }
}

/// The defining relations (cycle identification, socle annihilation,
/// triangle substitution, zero bounces) as raw relation elements for the
/// oracle.
pub fn defining_relations(t: &PartialTriangulation, q: &Quiver) -> Vec<RelationElement> {
    let bounce = quiver::bouncing_pairs(t, q);
    let mut rels = Vec::new();

    let omega_word = |h| match quiver::omega(t, h) {
        quiver::Omega::Zero => None,
        quiver::Omega::Winding(w) => {
            let p = t.point_of(h);
            let full = WindingSpec { start: w.start, length: w.length * t.multiplicity(p) };
            Some(quiver::winding_arrows(t, q, &full))
        }
    };

    for data in &t.arcs {
        let (h0, h1) = (data.halves[0], data.halves[1]);
        let arc = t.arc_of(h0);
        let mut terms = Vec::new();
        if let Some(w) = omega_word(h0) {
            terms.push((t.lambda(t.point_of(h0)).clone(), PathTerm { at: arc, arrows: w }));
        }
        if let Some(w) = omega_word(h1) {
            terms.push((
                t.lambda(t.point_of(h1)).neg(),
                PathTerm { at: arc, arrows: w },
            ));
        }
        // a loop at one point yields the identification of its two windings;
        // both-boundary arcs contribute nothing
        if !terms.is_empty() {
            rels.push(RelationElement { terms });
        }

        for h in [h0, h1] {
            let Some(w) = omega_word(h) else { continue };
            for (qi, arrow) in q.arrows.iter().enumerate() {
                if arrow.source == arc {
                    let mut word = w.clone();
                    word.push(ArrowId(qi));
                    rels.push(RelationElement {
                        terms: vec![(t.ring.one(), PathTerm { at: arc, arrows: word })],
                    });
                }
            }
        }
    }

    let mut pairs: Vec<(&(ArrowId, ArrowId), &BounceClass)> = bounce.map.iter().collect();
    pairs.sort_by_key(|((x, y), _)| (x.0, y.0));
    for ((x, y), class) in pairs {
        let at = q.arrow(*x).source;
        let pair_term = (
            t.ring.one(),
            PathTerm { at, arrows: vec![*x, *y] },
        );
        let terms = match class {
            BounceClass::Zero => vec![pair_term],
            BounceClass::Triangle(rel) => match &rel.replacement {
                None => vec![pair_term],
                Some(spec) => {
                    let word = quiver::winding_arrows(t, q, spec);
                    vec![
                        pair_term,
                        (rel.coefficient.neg(), PathTerm { at, arrows: word }),
                    ]
                }
            },
        };
        rels.push(RelationElement { terms });
    }
    rels
}

#[derive(Debug, Clone, Serialize)]
pub struct PathIdealQuotient {
    pub bound: u32,
    pub dimension: u64,
    pub stabilized: bool,
}

pub fn default_bound(t: &PartialTriangulation) -> u32 {
    let max_md = (0..t.points.len())
        .map(|p| t.multiplicity(PointId(p)) * t.degree(PointId(p)) as u32)
        .max()
        .unwrap_or(0);
    2 * max_md + 2
}

// ---- the reducer ----------------------------------------------------------

type Word = Vec<usize>;
/// (length, word): BTreeMap order = degree-lexicographic
type Key = (usize, Word);
type Poly = BTreeMap<Key, Scalar>;

struct Rule {
    lead: Word,
    rest: Vec<(Scalar, Word)>,
}

const MAX_RULES: usize = 20_000;
const MAX_NORMAL_WORDS: usize = 2_000_000;

fn add_term(poly: &mut Poly, word: Word, coeff: Scalar) {
    if coeff.is_zero() {
        return;
    }
    let key = (word.len(), word);
    match poly.entry(key) {
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let sum = o.get().plus(&coeff);
            if sum.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = sum;
            }
        }
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(coeff);
        }
    }
}

fn find_subword(haystack: &[usize], needle: &[usize]) -> Option<usize> {
    if needle.len() > haystack.len() {
        return None;
    }
    (0..=haystack.len() - needle.len()).find(|&i| &haystack[i..i + needle.len()] == needle)
}

/// Full normal form of a polynomial with respect to the rule set.
fn reduce_poly(mut work: Poly, rules: &[Rule]) -> Poly {
    let mut out: Poly = BTreeMap::new();
    while let Some(((len, word), coeff)) = work.pop_last() {
        if coeff.is_zero() {
            continue;
        }
        let hit = rules.iter().find_map(|r| {
            find_subword(&word, &r.lead).map(|pos| (r, pos))
        });
        match hit {
            None => add_term(&mut out, word, coeff),
            Some((rule, pos)) => {
                let prefix = &word[..pos];
                let suffix = &word[pos + rule.lead.len()..];
                for (c, repl) in &rule.rest {
                    let mut new_word = Vec::with_capacity(len - rule.lead.len() + repl.len());
                    new_word.extend_from_slice(prefix);
                    new_word.extend_from_slice(repl);
                    new_word.extend_from_slice(suffix);
                    add_term(&mut work, new_word, coeff.times(c));
                }
            }
        }
    }
    out
}

fn poly_to_rule(poly: Poly) -> Result<Option<Rule>, OracleError> {
    let mut terms: Vec<(Key, Scalar)> = poly.into_iter().collect();
    let Some(((_, lead), lead_coeff)) = terms.pop() else {
        return Ok(None);
    };
    if lead.is_empty() {
        return Err(OracleError::DegenerateRelation);
    }
    let inv = lead_coeff.inv().expect("field scalar");
    let rest = terms
        .into_iter()
        .map(|((_, w), c)| (c.neg().times(&inv), w))
        .collect();
    Ok(Some(Rule { lead, rest }))
}

/// Overlap S-polynomials of two rules (both orders are generated by the
/// caller feeding (a,b) and (b,a)).
fn overlaps(g1: &Rule, g2: &Rule) -> Vec<Poly> {
    let mut out = Vec::new();
    let (l1, l2) = (&g1.lead, &g2.lead);
    // proper overlap: suffix of l1 = prefix of l2
    for k in 1..l1.len().min(l2.len()) {
        if l1[l1.len() - k..] == l2[..k] {
            let a = &l1[..l1.len() - k];
            let c = &l2[k..];
            let mut poly: Poly = BTreeMap::new();
            for (coeff, w) in &g1.rest {
                let mut word = w.clone();
                word.extend_from_slice(c);
                add_term(&mut poly, word, coeff.clone());
            }
            for (coeff, w) in &g2.rest {
                let mut word = a.to_vec();
                word.extend_from_slice(w);
                add_term(&mut poly, word, coeff.neg());
            }
            out.push(poly);
        }
    }
    // containment: l2 inside l1
    if l2.len() < l1.len() {
        if let Some(pos) = find_subword(l1, l2) {
            let a = &l1[..pos];
            let c = &l1[pos + l2.len()..];
            let mut poly: Poly = BTreeMap::new();
            for (coeff, w) in &g1.rest {
                add_term(&mut poly, w.clone(), coeff.clone());
            }
            for (coeff, w) in &g2.rest {
                let mut word = a.to_vec();
                word.extend_from_slice(w);
                word.extend_from_slice(c);
                add_term(&mut poly, word, coeff.neg());
            }
            out.push(poly);
        }
    }
    out
}

/// Arrow endpoints, the only quiver data the oracle needs.
pub struct QuiverShape {
    pub vertices: usize,
    /// per arrow: (source vertex, target vertex)
    pub arrows: Vec<(usize, usize)>,
}

impl QuiverShape {
    pub fn of(q: &Quiver, vertices: usize) -> QuiverShape {
        QuiverShape {
            vertices,
            arrows: q.arrows.iter().map(|a| (a.source.0, a.target.0)).collect(),
        }
    }
}

/// Dimension of the path algebra modulo the two-sided ideal generated by the
/// relations, measured on words of length <= bound; `stabilized` when the
/// count at bound+1 agrees.
pub fn quotient_dimension_oracle(
    shape: &QuiverShape,
    relations: &[RelationElement],
    bound: u32,
) -> Result<PathIdealQuotient, OracleError> {
    // uniformity: every term of a relation shares source and target
    for rel in relations {
        let mut sig = None;
        for (_, term) in &rel.terms {
            let s = if term.arrows.is_empty() {
                (term.at.0, term.at.0)
            } else {
                (
                    shape.arrows[term.arrows[0].0].0,
                    shape.arrows[term.arrows.last().unwrap().0].1,
                )
            };
            match sig {
                None => sig = Some(s),
                Some(prev) if prev != s => return Err(OracleError::NonUniformRelation),
                _ => {}
            }
        }
    }

    // completion
    let mut rules: Vec<Rule> = Vec::new();
    let mut queue: VecDeque<Poly> = relations
        .iter()
        .map(|rel| {
            let mut poly: Poly = BTreeMap::new();
            for (c, term) in &rel.terms {
                add_term(
                    &mut poly,
                    term.arrows.iter().map(|a| a.0).collect(),
                    c.clone(),
                );
            }
            poly
        })
        .collect();
    while let Some(poly) = queue.pop_front() {
        let reduced = reduce_poly(poly, &rules);
        let Some(rule) = poly_to_rule(reduced)? else { continue };
        for existing in &rules {
            for s in overlaps(existing, &rule) {
                queue.push_back(s);
            }
            for s in overlaps(&rule, existing) {
                queue.push_back(s);
            }
        }
        for s in overlaps(&rule, &rule) {
            queue.push_back(s);
        }
        rules.push(rule);
        if rules.len() > MAX_RULES {
            return Err(OracleError::CompletionOverflow(MAX_RULES));
        }
    }

    // count irreducible words up to bound+1, grouped by length
    let ends_with_lead = |word: &[usize]| -> bool {
        rules.iter().any(|r| {
            r.lead.len() <= word.len() && word[word.len() - r.lead.len()..] == r.lead[..]
        })
    };
    let mut per_length: Vec<u64> = Vec::new();
    // frontier of (word, end vertex)
    let mut frontier: Vec<(Word, usize)> = Vec::new();
    per_length.push(shape.vertices as u64);
    for v in 0..shape.vertices {
        frontier.push((Vec::new(), v));
    }
    let mut total_words = shape.vertices;
    for _len in 1..=(bound + 1) {
        let mut next = Vec::new();
        for (word, end) in &frontier {
            for (a, (s, t)) in shape.arrows.iter().enumerate() {
                if s != end {
                    continue;
                }
                let mut w = word.clone();
                w.push(a);
                if !ends_with_lead(&w) {
                    next.push((w, *t));
                }
            }
        }
        total_words += next.len();
        if total_words > MAX_NORMAL_WORDS {
            return Err(OracleError::TooManyNormalWords(MAX_NORMAL_WORDS));
        }
        per_length.push(next.len() as u64);
        frontier = next;
    }
    let dim_at = |b: u32| -> u64 { per_length.iter().take(b as usize + 1).sum() };
    let dimension = dim_at(bound);
    let stabilized = dimension == dim_at(bound + 1);
    Ok(PathIdealQuotient { bound, dimension, stabilized })
}

#[derive(Debug, Clone, Serialize)]
pub struct JacobianReport {
    pub derivatives_vanish: Vec<(String, bool)>,
    pub oracle: PathIdealQuotient,
    pub rank: u64,
    pub consistent: bool,
}

/// Checks that every cyclic derivative of W maps to zero in the algebra and
/// that the Jacobian quotient dimension matches the rank formula.
pub fn jacobian_consistency_check(t: &PartialTriangulation) -> Result<JacobianReport, PotentialError> {
    let alg = Algebra::for_triangulation(t);
    let q = &alg.quiver;
    let w = build_potential(t, q)?;

    let mut derivatives = Vec::new();
    let mut relations = Vec::new();
    let mut all_zero = true;
    for a in 0..q.arrows.len() {
        let rel = cyclic_derivative(q, &w, ArrowId(a));
        let mut image = Element::zero();
        for (c, term) in &rel.terms {
            let val = alg.evaluate_word(&term.arrows, Some(term.at))?;
            image.add_scaled(val.scaled(c));
        }
        let vanishes = image.is_zero();
        all_zero &= vanishes;
        derivatives.push((q.arrow(ArrowId(a)).name.clone(), vanishes));
        relations.push(rel);
    }

    let shape = QuiverShape::of(q, t.arcs.len());
    let oracle = quotient_dimension_oracle(&shape, &relations, default_bound(t))?;
    let rank = algebra::rank_formula(t);
    let consistent = all_zero && oracle.stabilized && oracle.dimension == rank;
    Ok(JacobianReport { derivatives_vanish: derivatives, oracle, rank, consistent })
}
