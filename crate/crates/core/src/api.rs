//! Programming paradigms and translation directions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A parallel programming paradigm a kernel can be written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Api {
    Serial,
    OpenMP,
    #[serde(rename = "CUDA")]
    Cuda,
}

impl Api {
    pub const ALL: [Api; 3] = [Api::Serial, Api::OpenMP, Api::Cuda];

    /// Name used inside prompts.
    pub fn display_name(self) -> &'static str {
        match self {
            Api::Serial => "Serial",
            Api::OpenMP => "OpenMP",
            Api::Cuda => "CUDA",
        }
    }

    /// Short lowercase slug used in file names and direction names.
    pub fn slug(self) -> &'static str {
        match self {
            Api::Serial => "serial",
            Api::OpenMP => "omp",
            Api::Cuda => "cuda",
        }
    }

    pub fn file_extension(self) -> &'static str {
        match self {
            Api::Cuda => "cu",
            Api::Serial | Api::OpenMP => "cpp",
        }
    }

    /// Basename (without extension) of this API's member in the corpus directory.
    pub fn corpus_stem(self) -> &'static str {
        match self {
            Api::Serial => "serial",
            Api::OpenMP => "openmp",
            Api::Cuda => "cuda",
        }
    }
}

impl fmt::Display for Api {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown API `{0}` (expected serial, omp/openmp or cuda)")]
pub struct ParseApiError(pub String);

impl FromStr for Api {
    type Err = ParseApiError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "serial" => Ok(Api::Serial),
            "omp" | "openmp" => Ok(Api::OpenMP),
            "cuda" => Ok(Api::Cuda),
            _ => Err(ParseApiError(s.to_string())),
        }
    }
}

/// An ordered (source, target) API pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Direction {
    pub from: Api,
    pub to: Api,
}

impl Direction {
    pub const SERIAL_TO_OMP: Direction = Direction::new(Api::Serial, Api::OpenMP);
    pub const SERIAL_TO_CUDA: Direction = Direction::new(Api::Serial, Api::Cuda);
    pub const CUDA_TO_OMP: Direction = Direction::new(Api::Cuda, Api::OpenMP);
    pub const OMP_TO_CUDA: Direction = Direction::new(Api::OpenMP, Api::Cuda);

    /// The four directions evaluated by default, in reporting order.
    pub const STANDARD: [Direction; 4] = [
        Direction::SERIAL_TO_OMP,
        Direction::SERIAL_TO_CUDA,
        Direction::CUDA_TO_OMP,
        Direction::OMP_TO_CUDA,
    ];

    pub const fn new(from: Api, to: Api) -> Self {
        Direction { from, to }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-to-{}", self.from.slug(), self.to.slug())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid direction `{0}` (expected e.g. cuda-to-omp)")]
pub struct ParseDirectionError(pub String);

impl FromStr for Direction {
    type Err = ParseDirectionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseDirectionError(s.to_string());
        let (from, to) = s.split_once("-to-").ok_or_else(err)?;
        let from: Api = from.parse().map_err(|_| err())?;
        let to: Api = to.parse().map_err(|_| err())?;
        if from == to {
            return Err(err());
        }
        Ok(Direction { from, to })
    }
}

impl Serialize for Direction {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direction_names_round_trip() {
        for d in Direction::STANDARD {
            assert_eq!(d.to_string().parse::<Direction>().unwrap(), d);
        }
        assert_eq!("cuda-to-openmp".parse::<Direction>().unwrap(), Direction::CUDA_TO_OMP);
        assert!("cuda-to-cuda".parse::<Direction>().is_err());
        assert!("cuda".parse::<Direction>().is_err());
    }

    #[test]
    fn api_serializes_with_prompt_names() {
        assert_eq!(serde_json::to_string(&Api::Cuda).unwrap(), "\"CUDA\"");
        assert_eq!(serde_json::to_string(&Api::OpenMP).unwrap(), "\"OpenMP\"");
    }
}
