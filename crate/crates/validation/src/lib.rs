//! Test-only crate; the acceptance suite lives in `tests/acceptance.rs`.
