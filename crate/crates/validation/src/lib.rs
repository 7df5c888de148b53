//! Holds the `acceptance` test target; see `tests/acceptance.rs`.
//!
//! Run it with `cargo test -p tempered-validation --test acceptance`.
