//! Distribution configs.
//!
//! A config file is JSON, either
//!
//! ```json
//! {"kind": "finite", "pieces": [{"left": "0/1", "right": "1/3", "density": "3/2"}]}
//! ```
//!
//! or `{"kind": "infinite_geometric"}`. Every number is a `num/den` string
//! (a bare integer is also accepted) so nothing passes through a float.

use std::path::Path;

use pwquant_core::{PiecewiseUniform, Rational, UniformPiece};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parsing {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("piece {index}: {source}")]
    Piece {
        index: usize,
        source: pwquant_core::Error,
    },
    #[error(transparent)]
    Core(#[from] pwquant_core::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceConfig {
    pub left: String,
    pub right: String,
    pub density: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionConfig {
    Finite { pieces: Vec<PieceConfig> },
    InfiniteGeometric,
}

impl DistributionConfig {
    pub fn build(&self) -> Result<PiecewiseUniform, ConfigError> {
        match self {
            DistributionConfig::InfiniteGeometric => Ok(PiecewiseUniform::InfiniteGeometric),
            DistributionConfig::Finite { pieces } => {
                let mut out = Vec::with_capacity(pieces.len());
                for (i, p) in pieces.iter().enumerate() {
                    let piece = (|| {
                        UniformPiece::new(
                            p.left.parse::<Rational>()?,
                            p.right.parse::<Rational>()?,
                            p.density.parse::<Rational>()?,
                        )
                    })()
                    .map_err(|source| ConfigError::Piece {
                        index: i + 1,
                        source,
                    })?;
                    out.push(piece);
                }
                Ok(PiecewiseUniform::finite(out)?)
            }
        }
    }

    pub fn from_distribution(dist: &PiecewiseUniform) -> Self {
        match dist {
            PiecewiseUniform::InfiniteGeometric => DistributionConfig::InfiniteGeometric,
            PiecewiseUniform::Finite(pieces) => DistributionConfig::Finite {
                pieces: pieces
                    .iter()
                    .map(|p| PieceConfig {
                        left: p.left().to_string(),
                        right: p.right().to_string(),
                        density: p.density().to_string(),
                    })
                    .collect(),
            },
        }
    }
}

pub fn load(path: &Path) -> Result<PiecewiseUniform, ConfigError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: shown.clone(),
        source,
    })?;
    let cfg: DistributionConfig =
        serde_json::from_str(&text).map_err(|source| ConfigError::Json {
            path: shown,
            source,
        })?;
    cfg.build()
}

/// `infinite`, `uniform`, `three-piece`, or a path to a config file.
pub fn resolve(name: &str) -> Result<PiecewiseUniform, ConfigError> {
    match name {
        "infinite" => Ok(PiecewiseUniform::InfiniteGeometric),
        "uniform" => Ok(PiecewiseUniform::uniform()),
        "three-piece" => Ok(PiecewiseUniform::three_piece()),
        path => load(Path::new(path)),
    }
}
