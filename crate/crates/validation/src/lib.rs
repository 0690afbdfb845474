//! Holds the `acceptance` test target, which runs the full numerical
//! acceptance criteria and prints one PASS/FAIL line per criterion.
//! Run it alone with `cargo test -p ndsim-validation --test acceptance`.
