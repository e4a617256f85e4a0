//! Holds the `acceptance` test target, which runs after the library's own
//! suites. See `tests/acceptance.rs`.
