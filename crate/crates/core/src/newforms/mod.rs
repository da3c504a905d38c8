//! Newform orbits, q-series and Eichler integrals.

mod lmfdb;
mod orbit;
mod qseries;

pub use lmfdb::{fetch_orbit, orbit_from_records, parse_label, BASE_URL_ENV, DEFAULT_BASE_URL};
pub use orbit::{EmbeddedOrbit, NewformOrbit};
pub use qseries::{eichler_series, eta_product, evaluate, terms_for_tail, IntegerSeries, QSeries};

use crate::error::{Error, Result};
use std::path::Path;

const BUNDLED: &[(&str, &str)] = &[
    ("27.2.a.a", include_str!("../../data/orbits/27.2.a.a.json")),
    ("23.2.a.a", include_str!("../../data/orbits/23.2.a.a.json")),
    ("256.2.a.e", include_str!("../../data/orbits/256.2.a.e.json")),
];

/// Labels of the orbits shipped with the crate.
pub fn bundled_labels() -> Vec<&'static str> {
    BUNDLED.iter().map(|(l, _)| *l).collect()
}

/// Loads a bundled orbit by label, or an orbit JSON file by path.
pub fn load_orbit(source: &str) -> Result<NewformOrbit> {
    if let Some((_, json)) = BUNDLED.iter().find(|(l, _)| *l == source) {
        return NewformOrbit::from_json(json);
    }
    let path = Path::new(source);
    if path.is_file() {
        return NewformOrbit::from_json(&std::fs::read_to_string(path)?);
    }
    Err(Error::OrbitNotFound(source.to_string()))
}
