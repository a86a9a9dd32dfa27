//! Raw-frame JSON configuration files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coalition::GameConfig;
use crate::error::{Error, Result};
use crate::geometry::{canonical_frame, CanonicalFrame, Point3, TargetPlaneSpec, EPS_GEO};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    /// Target plane normal; the play subspace is `K·p > b`.
    #[serde(rename = "K")]
    pub normal: [f64; 3],
    pub b: f64,
    pub pursuers: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evader: Option<[f64; 3]>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Validate and map into the canonical frame.
    pub fn to_canonical(&self) -> Result<(GameConfig, CanonicalFrame)> {
        let spec = TargetPlaneSpec::new(Point3::from_array(self.normal), self.b);
        let frame = canonical_frame(spec)?;
        let mut raw = Vec::with_capacity(self.pursuers.len());
        for (i, p) in self.pursuers.iter().enumerate() {
            raw.push(
                Point3::try_new(p[0], p[1], p[2])
                    .map_err(|_| Error::NonFinite(format!("pursuers[{i}]")))?,
            );
        }
        let evader = match self.evader {
            Some(e) => {
                let e = Point3::try_new(e[0], e[1], e[2])
                    .map_err(|_| Error::NonFinite("evader".into()))?;
                if !(spec.side(e) > 0.0) {
                    return Err(Error::EvaderNotInPlay);
                }
                Some(e)
            }
            None => None,
        };
        // duplicates are judged in the raw frame so messages match the file
        for i in 0..raw.len() {
            for j in (i + 1)..raw.len() {
                if raw[i].distance(raw[j]) <= EPS_GEO {
                    return Err(Error::DuplicatePlayers(
                        format!("pursuers[{i}]"),
                        format!("pursuers[{j}]"),
                    ));
                }
            }
            if let Some(e) = evader {
                if raw[i].distance(e) <= EPS_GEO {
                    return Err(Error::DuplicatePlayers(
                        "evader".into(),
                        format!("pursuers[{i}]"),
                    ));
                }
            }
        }
        let pursuers = raw.iter().map(|p| frame.to_canonical(*p)).collect();
        let evader = evader.map(|e| {
            let mut c = frame.to_canonical(e);
            // K·e > b guarantees this up to rounding
            c.z = c.z.max(f64::MIN_POSITIVE);
            c
        });
        Ok((GameConfig::new(pursuers, evader)?, frame))
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<(GameConfig, CanonicalFrame)> {
    let text = std::fs::read_to_string(path)?;
    ConfigFile::parse(&text)?.to_canonical()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> Result<(GameConfig, CanonicalFrame)> {
        ConfigFile::parse(text)?.to_canonical()
    }

    #[test]
    fn canonical_input_is_unchanged() {
        let (cfg, frame) =
            load(r#"{"K":[0,0,1],"b":0,"pursuers":[[0,0,-1]],"evader":[0,0,1]}"#).unwrap();
        assert_eq!(frame, CanonicalFrame::IDENTITY);
        assert_eq!(cfg.pursuers, vec![Point3::new(0.0, 0.0, -1.0)]);
        assert_eq!(cfg.evader, Some(Point3::new(0.0, 0.0, 1.0)));
    }

    #[test]
    fn validation_errors() {
        assert_eq!(
            load(r#"{"K":[1,0,0],"b":1,"pursuers":[[5,0,0]],"evader":[0,0,0]}"#),
            Err(Error::EvaderNotInPlay)
        );
        assert_eq!(
            load(r#"{"K":[0,0,0],"b":0,"pursuers":[[0,0,1]]}"#),
            Err(Error::ZeroNormal)
        );
        assert!(matches!(
            load(r#"{"K":[0,0,1],"b":0,"pursuers":[[0,0,1]],"extra":1}"#),
            Err(Error::Parse(_))
        ));
        assert_eq!(
            load(r#"{"K":[0,0,1],"b":0,"pursuers":[[0,0,1],[1,0,1],[0,0,1]]}"#),
            Err(Error::DuplicatePlayers(
                "pursuers[0]".into(),
                "pursuers[2]".into()
            ))
        );
        assert!(matches!(
            load(r#"{"K":[0,0,1],"b":0}"#),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn tilted_plane_maps_heights() {
        let (cfg, _) =
            load(r#"{"K":[2,0,0],"b":2,"pursuers":[[0,3,4]],"evader":[3,0,0]}"#).unwrap();
        assert!((cfg.pursuers[0].z + 1.0).abs() < 1e-12);
        assert!((cfg.evader.unwrap().z - 2.0).abs() < 1e-12);
    }
}
