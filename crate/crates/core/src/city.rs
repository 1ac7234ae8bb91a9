//! The five reference cities and their dataset policies.

use core::fmt;
use core::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum City {
    Amsterdam,
    Bengaluru,
    Milan,
    Tallinn,
    Turin,
}

impl City {
    /// Shared label order for reports and grids.
    pub const ALL: [City; 5] = [
        City::Amsterdam,
        City::Bengaluru,
        City::Milan,
        City::Tallinn,
        City::Turin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            City::Amsterdam => "Amsterdam",
            City::Bengaluru => "Bengaluru",
            City::Milan => "Milan",
            City::Tallinn => "Tallinn",
            City::Turin => "Turin",
        }
    }
}

impl fmt::Display for City {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownCity;

impl FromStr for City {
    type Err = UnknownCity;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "amsterdam" => Ok(City::Amsterdam),
            "bengaluru" | "bangalore" => Ok(City::Bengaluru),
            "milan" | "milano" => Ok(City::Milan),
            "tallinn" => Ok(City::Tallinn),
            "turin" | "torino" => Ok(City::Turin),
            _ => Err(UnknownCity),
        }
    }
}
