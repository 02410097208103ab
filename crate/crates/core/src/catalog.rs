//! Bundled algebras. The JSON sources live in `catalog/` next to this crate
//! and double as example input files for the command-line tool.

use crate::algebra::LieAlgebra;
use crate::io::{parse_algebra, LoadedAlgebra};
use crate::scalar::{Rational, Scalar};

macro_rules! entries {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../catalog/", $name, ".json")))),*]
    };
}

/// `(name, json)` for every bundled algebra.
pub const SOURCES: &[(&str, &str)] = entries![
    "abelian_2d",
    "nonabelian_2d",
    "abelian_3d",
    "heisenberg",
    "family_e2",
    "family_e2_flipped",
    "family_e11",
    "family_123",
    "so3",
    "e2_plus_r",
];

pub fn load(name: &str) -> Option<LoadedAlgebra> {
    SOURCES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| parse_algebra(text).expect("bundled catalog entry parses"))
}

pub fn all() -> Vec<(&'static str, LieAlgebra<Rational>)> {
    SOURCES
        .iter()
        .map(|(n, text)| (*n, parse_algebra(text).expect("bundled catalog entry parses").algebra))
        .collect()
}

fn get(name: &str) -> LieAlgebra<Rational> {
    load(name).expect("bundled catalog entry").algebra
}

pub fn heisenberg() -> LieAlgebra<Rational> {
    get("heisenberg")
}

/// `[e1, e2] = e2`.
pub fn nonabelian_2d() -> LieAlgebra<Rational> {
    get("nonabelian_2d")
}

pub fn so3() -> LieAlgebra<Rational> {
    get("so3")
}

pub fn e2_plus_r() -> LieAlgebra<Rational> {
    get("e2_plus_r")
}

/// `[e1,e2] = α e2 + β e3`, `[e1,e3] = γ e2 − α e3`, `[e2,e3] = 0`.
pub fn family<S: Scalar>(alpha: S, beta: S, gamma: S) -> LieAlgebra<S> {
    let z = S::zero();
    LieAlgebra::from_brackets(
        3,
        vec![
            (0, 1, vec![z.clone(), alpha.clone(), beta]),
            (0, 2, vec![z, gamma, -alpha]),
        ],
    )
    .expect("family brackets are well formed")
}
