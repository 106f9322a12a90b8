//! Randomized code-based key encapsulation with common-randomness
//! consolidation.
//!
//! Alice publishes `P = B C`, a randomized and punctured block permutation
//! hidden behind a random factor `B`. Bob sends `P (c + e1 + r1) + e2 + r2`
//! where `c` concatenates labeled first-order Reed-Muller codewords, `e1`/`e2`
//! are injected errors and `r1`/`r2` are common-randomness bits. Alice's
//! private factor undoes `B` up to a per-block permutation, so each block can
//! be decoded on its own; disagreements between the two parties' common
//! randomness simply show up as extra errors.
//!
//! ```
//! use rand::SeedableRng;
//! use rand_chacha::ChaCha20Rng;
//! use rkem::{keygen, kem, CrConfig, ParamSet};
//!
//! let params = ParamSet::toy8();
//! let mut rng = ChaCha20Rng::seed_from_u64(7);
//! let (pk, sk) = keygen::keygen(&params, &mut rng, CrConfig::NONE).unwrap();
//! let key = kem::SharedKey::random(&params, &mut rng);
//! let none = kem::CommonRandomnessView::none();
//! let ct = kem::encapsulate(&pk, &key, &mut rng, &none, kem::ErrorBudget::new(params.t)).unwrap();
//! assert_eq!(kem::decapsulate(&sk, &ct, &none).unwrap(), key);
//! ```

pub mod accounting;
pub mod attack;
pub mod cli;
pub mod code;
pub mod format;
pub mod gf2;
pub mod kem;
pub mod keygen;
pub mod params;
pub mod rng;
pub mod sim;

pub use gf2::{BitMatrix, BitVector};
pub use keygen::{CrConfig, PrivateKey, PublicKey};
pub use params::{ParamSet, Preset};
