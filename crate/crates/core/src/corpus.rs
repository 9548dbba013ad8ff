//! Built-in initial data used by decay and smoothing sweeps.

use serde::{Deserialize, Serialize};

use crate::quadrature::RadialProfile;
use crate::solver::{pull_back, ExteriorData};
use crate::{Error, Exponent, Result};

const BUILTIN: &str = include_str!("corpus.toml");

/// Which variable a corpus profile is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    /// `F(r)` for `r > 1`.
    Exterior,
    /// The lifted `g(r) = (r + 1) F(r + 1)` for `r > 0`.
    HalfLine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Datum {
    pub name: String,
    #[serde(default)]
    pub summary: String,
    pub space: Space,
    pub profile: RadialProfile,
}

impl Datum {
    /// Exterior data for exponent `p`, scaled to `‖f‖_p = 1`.
    pub fn exterior(&self, p: Exponent) -> Result<ExteriorData> {
        let raw = match self.space {
            Space::Exterior => ExteriorData::new(self.profile.clone(), p)?,
            Space::HalfLine => pull_back(&self.profile, p)?,
        };
        raw.normalized()
    }
}

#[derive(Deserialize)]
struct CorpusFile {
    datum: Vec<Datum>,
}

/// Parses a corpus file; names must be unique.
pub fn parse_corpus(text: &str) -> Result<Vec<Datum>> {
    let file: CorpusFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    for (i, d) in file.datum.iter().enumerate() {
        if file.datum[..i].iter().any(|e| e.name == d.name) {
            return Err(Error::Config(format!("duplicate corpus entry '{}'", d.name)));
        }
    }
    Ok(file.datum)
}

/// The shipped corpus: `indicator`, `gaussian-moment` and `power-tail`.
pub fn builtin() -> Vec<Datum> {
    parse_corpus(BUILTIN).expect("built-in corpus parses")
}

pub fn find(name: &str) -> Result<Datum> {
    builtin()
        .into_iter()
        .find(|d| d.name == name)
        .ok_or_else(|| Error::Config(format!("unknown corpus datum '{name}'")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{data_norm, lift_initial_data};
    use approx::assert_relative_eq;

    #[test]
    fn builtin_entries() {
        let names: Vec<String> = builtin().into_iter().map(|d| d.name).collect();
        assert_eq!(names, ["indicator", "gaussian-moment", "power-tail"]);
        assert!(find("nope").is_err());
    }

    #[test]
    fn entries_normalize_for_every_exponent() {
        for datum in builtin() {
            for p in [1.0, 2.0, 3.0, 6.0, f64::INFINITY] {
                let data = datum.exterior(Exponent::new(p).unwrap()).unwrap();
                assert_relative_eq!(data_norm(&data).unwrap(), 1.0, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn gaussian_moment_lifts_back() {
        let datum = find("gaussian-moment").unwrap();
        let g = lift_initial_data(&pull_back(&datum.profile, Exponent::ONE).unwrap());
        for &r in &[0.3, 1.0, 4.0] {
            assert_relative_eq!(g.eval(r), r * (-r * r / 4.0f64).exp(), max_relative = 1e-14);
        }
    }

    #[test]
    fn duplicate_names_rejected() {
        let text = "[[datum]]\nname='a'\nspace='exterior'\n[datum.profile]\nsegments=[]\n\
                    [[datum]]\nname='a'\nspace='exterior'\n[datum.profile]\nsegments=[]\n";
        assert!(matches!(parse_corpus(text), Err(Error::Config(_))));
    }
}
