//! Forbidden-intersection ("Sperner-like") set families on the Boolean lattice.
//!
//! * [`lattice`]: subsets as bit vectors, colex layers, exact binomials.
//! * [`restrictions`]: layer restriction systems `(G, x)` and pair conditions.
//! * [`weight`]: the best union-of-layers construction, solved exactly.
//! * [`families`]: set families, verifiers, explicit constructions, and the
//!   base-8 encoding with combinatorial line search.
//! * [`search`]: exact maximum families at small `n` via independent sets.
//! * [`probe`]: peeling, neighbour walks, the random chain process, and bound
//!   evaluators.

pub mod error;
pub mod families;
pub mod lattice;
pub mod par;
pub mod probe;
pub mod restrictions;
pub mod search;
pub mod weight;

pub use error::{Error, Result};
pub use families::{SetFamily, Verdict, Witness};
pub use lattice::{binomial, diff_size, is_neighbor, layer_iter, BigCount, SubsetWord};
pub use par::Exec;
pub use restrictions::{Edge, PairCondition, RestrictionSystem};
