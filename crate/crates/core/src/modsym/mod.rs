//! Plus modular symbols of elliptic curves over `Q`.

pub mod cache;
pub mod curve;
pub mod linalg;
pub mod p1;
pub mod symbol;

pub use cache::{load_or_compute, resolve_cache_dir, CACHE_DIR_ENV};
pub use curve::CurveData;
pub use symbol::{ManinSymbolSpace, PlusEigenSymbol};
