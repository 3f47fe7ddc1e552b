//! Bundled JSON fixtures.

use crate::dimer::DimerModel;
use crate::paths::{path_from_json, PLPath, PathError, PuncturedPlane};

pub const CONIFOLD_DIMER: &str = include_str!("../fixtures/conifold_dimer.json");
pub const HEXAGONAL_DIMER: &str = include_str!("../fixtures/hexagonal_dimer.json");
pub const VANISHING_CYCLE_DGA: &str = include_str!("../fixtures/vanishing_cycle_dga.json");

/// Two nodes and four edges: the brane tiling whose dual quiver is the conifold quiver.
pub fn conifold_dimer() -> DimerModel {
    DimerModel::from_json(CONIFOLD_DIMER).expect("bundled fixture")
}

/// The hexagonal tiling with one face.
pub fn hexagonal_dimer() -> DimerModel {
    DimerModel::from_json(HEXAGONAL_DIMER).expect("bundled fixture")
}

pub const GAMMA0: &str = include_str!("../fixtures/paths/gamma0.json");
pub const GAMMA1: &str = include_str!("../fixtures/paths/gamma1.json");
pub const SIGMA0: &str = include_str!("../fixtures/paths/sigma0.json");
pub const SIGMA1: &str = include_str!("../fixtures/paths/sigma1.json");

/// One of `gamma0`, `gamma1`, `sigma0`, `sigma1`.
pub fn path(name: &str) -> Result<(PLPath, PuncturedPlane), PathError> {
    let src = match name {
        "gamma0" => GAMMA0,
        "gamma1" => GAMMA1,
        "sigma0" => SIGMA0,
        "sigma1" => SIGMA1,
        _ => return Err(PathError::Json(format!("no bundled path {name}"))),
    };
    path_from_json(src)
}
