//! Holds the `acceptance` test target. Run it with
//! `cargo test -p casimir-inertia-validation --test acceptance`.
