//! Modular data of rational vertex operator algebras and their orbifolds.
//!
//! The crate works with a *modular datum* `(c, {h_i}, S)`: a central charge, the
//! conformal weights of the irreducible modules, and the unitary S-matrix. From it
//! we build the T-matrix, check the SL2(Z) relations, extract fusion rules through
//! the Verlinde formula, evaluate the conformal-block representation on arbitrary
//! elements of SL2(Z), and assemble the modular datum of the cyclic permutation
//! orbifold `(V^{⊗k})^{Z_k}` for prime `k`.
//!
//! The generic restricted S-matrix of `V^G` for a finite abelian group `G` is in
//! [`restricted`]; it is driven entirely by user supplied orbit, character and
//! cross-block data.

pub mod cli;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod linalg;
pub mod modular_data;
pub mod perm_orbifold;
pub mod phase;
pub mod report;
pub mod restricted;
pub mod sl2z;

pub use error::{Error, Result};
pub use linalg::{CMatrix, Complex};
pub use modular_data::{
    quantum_dimensions, t_matrix, validate_modular_datum, verlinde_fusion, Fusion, FusionTensor,
    ModularDatum, ModuleInfo, Tolerances,
};
pub use perm_orbifold::{build_orbifold_datum, Convention, OrbifoldDatum, OrbifoldModuleLabel};
pub use phase::{parse_rational, Phase, Rational};
pub use report::{CheckResult, ValidationReport};
pub use sl2z::{decompose_to_generators, evaluate_word_int, rho_of, GeneratorWord, Sl2Matrix};
