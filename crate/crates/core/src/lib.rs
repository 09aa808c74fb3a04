//! Exact-arithmetic workbench for the finite-rank algebras attached to
//! partial triangulations of marked oriented surfaces: construction, basis
//! and structure constants, Brauer-graph and Jacobian bridges, flips and
//! derived-invariant reports.

pub mod algebra;
pub mod brauer;
pub mod faces;
pub mod format;
pub mod linalg;
pub mod potential;
pub mod quiver;
pub mod scalar;
pub mod surface;

/// Shipped example surfaces, also used heavily by the test suite.
pub mod fixtures {
    use crate::format::parse_ptri;
    use crate::scalar::Ring;
    use crate::surface::PartialTriangulation;

    pub const DISC_ABCD: &str = include_str!("../fixtures/disc_abcd.ptri");
    pub const TORUS_LOOP: &str = include_str!("../fixtures/torus_loop.ptri");
    pub const TRIANGLE_MNP: &str = include_str!("../fixtures/triangle_mnp.ptri");
    pub const LOOP_N: &str = include_str!("../fixtures/loop_n.ptri");
    pub const TORUS_TRI: &str = include_str!("../fixtures/torus_tri.ptri");

    pub fn disc_abcd() -> PartialTriangulation {
        parse_ptri(DISC_ABCD, Ring::Rationals).expect("fixture is valid")
    }

    pub fn torus_loop() -> PartialTriangulation {
        parse_ptri(TORUS_LOOP, Ring::Rationals).expect("fixture is valid")
    }

    pub fn triangle_mnp() -> PartialTriangulation {
        parse_ptri(TRIANGLE_MNP, Ring::Rationals).expect("fixture is valid")
    }

    pub fn loop_n() -> PartialTriangulation {
        parse_ptri(LOOP_N, Ring::Rationals).expect("fixture is valid")
    }

    pub fn torus_tri() -> PartialTriangulation {
        parse_ptri(TORUS_TRI, Ring::Rationals).expect("fixture is valid")
    }

    /// Rebuilds a fixture with some multiplicities overridden.
    pub fn with_multiplicity(text: &str, overrides: &[(&str, u32)]) -> PartialTriangulation {
        let mut spec = crate::format::parse_spec(text, Ring::Rationals).expect("fixture parses");
        for (name, m) in overrides {
            let p = spec
                .points
                .iter_mut()
                .find(|(n, _, _, _)| n == name)
                .expect("known point");
            p.2 = *m;
        }
        let t = PartialTriangulation::from_spec(Ring::Rationals, &spec).expect("fixture builds");
        assert!(crate::faces::validate(&t).ok(), "fixture must stay valid");
        t
    }
}
