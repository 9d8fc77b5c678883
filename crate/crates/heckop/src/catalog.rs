//! Irreducible compact Hermitian symmetric spaces and their restricted root data.
//!
//! Keys: `AIII:p=P,q=Q` (q ≥ p ≥ 1), `BDI:q=Q` (q ≥ 3), `DIII:j=J` (j ≥ 2),
//! `CI:j=J` (j ≥ 1), `EIII`, `EVII`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rootdata::{build_root_system, Case, Multiplicity, RootDatum};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub rank: usize,
    pub case: Case,
    pub m_s: f64,
    pub m_m: f64,
    pub m_l: f64,
}

impl CatalogEntry {
    pub fn multiplicity(&self) -> Multiplicity {
        Multiplicity::new(self.m_s, self.m_m, self.m_l)
    }

    pub fn root_datum(&self) -> Result<RootDatum> {
        build_root_system(self.rank, self.case, self.multiplicity())
    }
}

fn entry(rank: usize, case: Case, m: (f64, f64, f64)) -> CatalogEntry {
    CatalogEntry { rank, case, m_s: m.0, m_m: m.1, m_l: m.2 }
}

fn params(body: &str) -> Option<BTreeMap<&str, usize>> {
    body.split(',')
        .map(|kv| {
            let (k, v) = kv.split_once('=')?;
            Some((k.trim(), v.trim().parse().ok()?))
        })
        .collect()
}

pub fn lookup(key: &str) -> Result<CatalogEntry> {
    let bad = || Error::Catalog(key.to_string());
    let compact: String = key.chars().filter(|c| !c.is_whitespace()).collect();
    let (family, body) = compact.split_once(':').unwrap_or((compact.as_str(), ""));
    let p = params(body).unwrap_or_default();
    let get = |name: &str| p.get(name).copied().ok_or_else(bad);
    let e = match family {
        "AIII" => {
            let (pp, q) = (get("p")?, get("q")?);
            if pp == 0 || q < pp {
                return Err(bad());
            }
            let case = if pp == q { Case::I } else { Case::II };
            entry(pp, case, (2.0 * (q - pp) as f64, 2.0, 1.0))
        }
        "BDI" => {
            let q = get("q")?;
            if q < 3 {
                return Err(bad());
            }
            entry(2, Case::I, (0.0, q as f64 - 2.0, 1.0))
        }
        "DIII" => {
            let j = get("j")?;
            if j < 2 {
                return Err(bad());
            }
            if j % 2 == 0 {
                entry(j / 2, Case::I, (0.0, 4.0, 1.0))
            } else {
                entry(j / 2, Case::II, (4.0, 4.0, 1.0))
            }
        }
        "CI" => {
            let j = get("j")?;
            if j == 0 {
                return Err(bad());
            }
            entry(j, Case::I, (0.0, 1.0, 1.0))
        }
        "EIII" if body.is_empty() => entry(2, Case::II, (8.0, 6.0, 1.0)),
        "EVII" if body.is_empty() => entry(3, Case::I, (0.0, 8.0, 1.0)),
        _ => return Err(bad()),
    };
    Ok(e)
}

/// Representative keys covering every family at small rank.
pub fn standard_keys() -> Vec<&'static str> {
    vec![
        "AIII:p=1,q=1",
        "AIII:p=1,q=2",
        "AIII:p=1,q=3",
        "AIII:p=2,q=2",
        "AIII:p=2,q=3",
        "BDI:q=3",
        "BDI:q=4",
        "DIII:j=4",
        "DIII:j=5",
        "CI:j=1",
        "CI:j=2",
        "EIII",
        "EVII",
    ]
}

pub fn standard_catalog() -> BTreeMap<String, CatalogEntry> {
    standard_keys()
        .into_iter()
        .map(|k| (k.to_string(), lookup(k).expect("standard key")))
        .collect()
}

pub fn catalog_json() -> String {
    serde_json::to_string_pretty(&standard_catalog()).expect("catalog serializes")
}

/// Parses a catalog file with the same shape as [`catalog_json`].
pub fn parse_catalog(text: &str) -> Result<BTreeMap<String, CatalogEntry>> {
    serde_json::from_str(text).map_err(|e| Error::Catalog(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rows() {
        let e = lookup("EIII").unwrap();
        assert_eq!((e.rank, e.case, e.multiplicity()), (2, Case::II, Multiplicity::new(8.0, 6.0, 1.0)));
        let e = lookup("CI:j=3").unwrap();
        assert_eq!((e.rank, e.case, e.multiplicity()), (3, Case::I, Multiplicity::new(0.0, 1.0, 1.0)));
        let e = lookup("AIII:p=2,q=3").unwrap();
        assert_eq!((e.rank, e.case), (2, Case::II));
        assert_eq!(e.multiplicity(), Multiplicity::new(2.0, 2.0, 1.0));
        assert_eq!(lookup("AIII: p=2, q=2").unwrap().case, Case::I);
        assert_eq!(lookup("DIII:j=5").unwrap().rank, 2);
        assert_eq!(lookup("EVII").unwrap().multiplicity(), Multiplicity::new(0.0, 8.0, 1.0));
    }

    #[test]
    fn bad_keys() {
        for k in ["AIII:p=3,q=2", "BDI:q=2", "XYZ", "CI", "EIII:j=1", "CI:j=0"] {
            assert!(lookup(k).is_err(), "{k}");
        }
    }

    #[test]
    fn json_roundtrip() {
        let parsed = parse_catalog(&catalog_json()).unwrap();
        assert_eq!(parsed, standard_catalog());
        for e in parsed.values() {
            e.root_datum().unwrap();
        }
    }
}
