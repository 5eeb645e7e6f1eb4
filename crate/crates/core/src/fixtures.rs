//! Bundled molecular integrals (STO-3G) with reference energies.
//!
//! Each fixture is an FCIDUMP file plus a TOML sidecar. Short aliases are
//! accepted: `h2`, `lih`, and `p4_d0.80` style names for the P4 scan.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{parse_fcidump, IntegralSet, Ordering, SpinOrbitalMap};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub element: String,
    pub xyz: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureMetadata {
    pub name: String,
    pub description: String,
    pub basis: String,
    pub ordering: Ordering,
    pub units: String,
    pub hf_energy: f64,
    pub fci_energy: f64,
    pub nuclear_repulsion: f64,
    pub geometry: Vec<Atom>,
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub metadata: FixtureMetadata,
    pub integrals: IntegralSet,
}

impl Fixture {
    pub fn name(&self) -> &str {
        &self.metadata.name
    }

    pub fn orbital_map(&self) -> Result<SpinOrbitalMap> {
        SpinOrbitalMap::aufbau(
            self.metadata.ordering,
            self.integrals.n_spatial(),
            self.integrals.n_electrons(),
        )
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.integrals.n_spatial()
    }

    fn from_texts(fcidump: &str, sidecar: &str) -> Result<Self> {
        let metadata: FixtureMetadata =
            toml::from_str(sidecar).map_err(|e| Error::Metadata(e.to_string()))?;
        let integrals = parse_fcidump(fcidump)?;
        if (metadata.nuclear_repulsion - integrals.e_nuclear()).abs() > 1e-8 {
            return Err(Error::Metadata(format!(
                "{}: nuclear repulsion {} disagrees with integrals {}",
                metadata.name,
                metadata.nuclear_repulsion,
                integrals.e_nuclear()
            )));
        }
        Ok(Fixture {
            metadata,
            integrals,
        })
    }
}

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        &[$((
            $name,
            include_str!(concat!("../fixtures/", $name, ".fcidump")),
            include_str!(concat!("../fixtures/", $name, ".toml")),
        )),*]
    };
}

static BUNDLED: &[(&str, &str, &str)] = bundled![
    "h2_sto3g_r1.00",
    "lih_sto3g_r1.00",
    "p4_sto3g_d0.40",
    "p4_sto3g_d0.60",
    "p4_sto3g_d0.80",
    "p4_sto3g_d1.00",
    "p4_sto3g_d1.20",
    "p4_sto3g_d1.40",
    "p4_sto3g_d1.60",
    "p4_sto3g_d1.80",
    "p4_sto3g_d2.00",
    "p4_sto3g_d2.20",
    "p4_sto3g_d2.50",
    "p4_sto3g_d3.00",
    "p4_sto3g_d3.50",
    "p4_sto3g_d4.00",
];

/// Full names of all bundled fixtures.
pub fn list() -> Vec<&'static str> {
    BUNDLED.iter().map(|(name, _, _)| *name).collect()
}

fn resolve(name: &str) -> Option<&'static (&'static str, &'static str, &'static str)> {
    let lower = name.to_ascii_lowercase();
    let full = match lower.as_str() {
        "h2" => "h2_sto3g_r1.00".to_string(),
        "lih" => "lih_sto3g_r1.00".to_string(),
        other => match other.strip_prefix("p4_d") {
            Some(d) => match d.parse::<f64>() {
                Ok(d) => format!("p4_sto3g_d{d:.2}"),
                Err(_) => other.to_string(),
            },
            None => other.to_string(),
        },
    };
    BUNDLED.iter().find(|(n, _, _)| *n == full)
}

/// Loads a bundled fixture by full name or alias.
pub fn load(name: &str) -> Result<Fixture> {
    let (_, fcidump, sidecar) = resolve(name).ok_or_else(|| Error::UnknownFixture(name.into()))?;
    Fixture::from_texts(fcidump, sidecar)
}

/// The P4 fixture at separation `d` (angstrom), if bundled.
pub fn p4(d: f64) -> Result<Fixture> {
    load(&format!("p4_d{d:.2}"))
}

/// Loads `<path>` as FCIDUMP and `<path>` with a `.toml` extension as sidecar.
pub fn load_path(path: &Path) -> Result<Fixture> {
    let fcidump = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let sidecar_path = path.with_extension("toml");
    let sidecar =
        std::fs::read_to_string(&sidecar_path).map_err(|e| Error::io(&sidecar_path, e))?;
    Fixture::from_texts(&fcidump, &sidecar)
}

/// A bundled name, an alias, or a filesystem path to an FCIDUMP.
pub fn load_any(spec: &str) -> Result<Fixture> {
    match load(spec) {
        Err(Error::UnknownFixture(_)) if Path::new(spec).exists() => load_path(Path::new(spec)),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_bundled_parse() {
        for name in list() {
            let f = load(name).unwrap();
            assert_eq!(f.name(), name);
            assert!(f.metadata.fci_energy <= f.metadata.hf_energy + 1e-10);
        }
    }

    #[test]
    fn aliases() {
        assert_eq!(load("h2").unwrap().name(), "h2_sto3g_r1.00");
        assert_eq!(load("LiH").unwrap().n_qubits(), 12);
        assert_eq!(load("p4_d0.8").unwrap().name(), "p4_sto3g_d0.80");
        assert_eq!(p4(2.0).unwrap().n_qubits(), 8);
        assert!(matches!(load("h3"), Err(Error::UnknownFixture(_))));
    }

    #[test]
    fn load_from_disk() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
        let f = load_path(&dir.join("h2_sto3g_r1.00.fcidump")).unwrap();
        assert_eq!(f.integrals.n_electrons(), 2);
    }
}
