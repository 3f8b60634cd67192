//! Exact-arithmetic verification engine for simplicial vector spaces over Q.
//!
//! The crate models Lie n-groupoids as finite simplicial Q-vector spaces
//! (linear structure maps, exact rational entries) and makes every geometric
//! condition of that theory — Kan conditions, hypercovers, tangent-complex
//! quasi-isomorphisms, cohomological descent, shifted symplectic
//! non-degeneracy, and the transfer of shifted symplectic forms along Morita
//! equivalences — an exact rank condition that is checked with no rounding.
//!
//! Module map:
//! * [`exactla`] — dense rational matrices, kernels, solving, chain homology
//! * [`ssets`] — finite simplicial sets: simplices, horns, boundaries, nerves
//! * [`linmodel`] — simplicial Q-vector spaces, horn/matching maps, Dold-Kan,
//!   fiber products, coskeleta, Cech nerves
//! * [`tangent`] — tangent complexes and quasi-isomorphism certification
//! * [`forms`] — polynomial differential forms, the simplicial de Rham double
//!   complex, truncated total cohomology, Eilenberg-Zilber comparison
//! * [`symplectic`] — shifted forms, the shuffle pairing, symplectic Morita
//!   equivalence and the transfer solver
//! * [`descent`] — homotopy operators, nerve descent, coskeleton retracts
//! * [`instances`] — deterministic builders and seeded random generators used
//!   by the self-test battery, the test suite and the benches
//!
//! Heavy inner loops (matrix elimination, batch verification) run on rayon
//! when the `parallel` feature is enabled (default); results are bitwise
//! identical to sequential execution.

pub mod par;

pub mod exactla;
pub mod ssets;

pub mod linmodel;
pub mod tangent;

pub mod forms;
pub mod symplectic;

pub mod descent;

pub mod instances;
pub mod selftest;
