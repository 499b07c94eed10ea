//! Exact computational algebra for quiver representations over small prime
//! fields.
//!
//! The engine enumerates representation varieties of quivers over `F_p`
//! exhaustively, classifies orbits under the base-change group, counts Hall
//! numbers, multiplies in twisted and extended Hall algebras, applies
//! finite-field Fourier transforms to orbit functions, and realizes highest
//! weight modules on quotients of function spaces attached to framed
//! quivers.  Every computation is exact: coefficients live in the
//! cyclotomic field `Q(zeta_(4p))` ([`scalar`]), counts are big integers,
//! and every identity the engine claims is checked by exhaustive
//! enumeration with zero tolerance.
//!
//! Module map:
//!
//! * [`error`] — shared error type and hard enumeration ceilings.
//! * [`scalar`] — the exact cyclotomic coefficient field, `v = sqrt(p)`.
//! * [`gflin`] — dense linear algebra over `F_p`.
//! * [`quiver`] — quivers, framings, orientation data, Euler forms.
//! * [`linalg`] — dense exact linear algebra over the cyclotomic field.
//! * [`repspace`] — representation spaces, orbit enumeration, Hall numbers.
//! * [`hall`] — twisted and extended Hall algebras, comultiplication,
//!   the bilinear pairing between the plus and minus halves.
//! * [`fourier`] — orbit functions, induction product, Fourier transforms.
//! * [`framed`] — framed function spaces, the distinguished subspace and
//!   its quotient, raising/lowering/grading operators, defining relations,
//!   highest weight modules.
//! * [`cache`] — persistent orbit-table cache with integrity checks.
//! * [`verify`] — named check suites and machine-readable reports.

pub mod cache;
pub mod error;
pub mod fourier;
pub mod framed;
pub mod gflin;
pub mod hall;
pub mod linalg;
pub mod quiver;
pub mod repspace;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Field, Scalar};
