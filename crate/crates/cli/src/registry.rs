//! Built-in molecule constants.

use molspin::MoleculeSpec;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

const BUILTIN: &str = include_str!("../data/molecules.toml");

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Registry {
    pub version: String,
    #[serde(rename = "molecule")]
    pub molecules: Vec<MoleculeSpec>,
}

impl Registry {
    pub fn builtin() -> Self {
        let r: Registry = toml::from_str(BUILTIN).expect("embedded registry parses");
        for m in &r.molecules {
            m.validate().expect("embedded registry entries validate");
        }
        r
    }

    pub fn get(&self, name: &str) -> CliResult<MoleculeSpec> {
        self.molecules
            .iter()
            .find(|m| m.name.eq_ignore_ascii_case(name))
            .cloned()
            .ok_or_else(|| {
                let known: Vec<&str> = self.molecules.iter().map(|m| m.name.as_str()).collect();
                CliError::field("molecule", format!("unknown molecule `{name}` (registry has {})", known.join(", ")))
            })
    }

    pub fn raw() -> &'static str {
        BUILTIN
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use molspin::SpeciesKind;

    #[test]
    fn builtin_entries() {
        let r = Registry::builtin();
        assert_eq!(r.version, "1");
        let krb = r.get("KRb").unwrap();
        assert_eq!(krb.kind, SpeciesKind::Singlet);
        assert_eq!(krb.nuclei.len(), 2);
        assert!(!krb.source.is_empty());
        let yo = r.get("yo").unwrap();
        assert_eq!(yo.kind, SpeciesKind::Doublet);
        assert!(yo.electron.is_some());
        assert!(r.get("NaCs").is_err());
    }
}
