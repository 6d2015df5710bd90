//! Bundled code description files.

use crate::specfile::{parse_spec, SpecFile};

macro_rules! fixture_table {
    ($($name:literal),* $(,)?) => {
        /// `(name, file text)` for every bundled fixture.
        pub const FIXTURES: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../fixtures/", $name, ".code")))),*
        ];
    };
}

fixture_table!(
    "toric",
    "newman_moore",
    "haah",
    "checkerboard",
    "hhb_a",
    "fibonacci_fsl",
    "gross",
    "honeycomb_color",
    "fsl_odd_odd",
    "sierpinski_prism",
    "fsl_odd_even",
    "decomposable_example",
    "example1",
);

/// Fixtures with `[lift]` data, in table order.
pub const TABLE_ROWS: &[&str] = &[
    "haah",
    "checkerboard",
    "hhb_a",
    "fibonacci_fsl",
    "gross",
    "honeycomb_color",
    "fsl_odd_odd",
    "sierpinski_prism",
    "fsl_odd_even",
];

pub fn text(name: &str) -> Option<&'static str> {
    FIXTURES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Parses a bundled fixture.
pub fn load(name: &str) -> Option<SpecFile> {
    text(name).map(|t| parse_spec(t).expect("bundled fixture parses"))
}

pub fn names() -> impl Iterator<Item = &'static str> {
    FIXTURES.iter().map(|(n, _)| *n)
}
