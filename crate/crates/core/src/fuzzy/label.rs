use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::FuzzyError;

/// One of the seven linguistic terms partitioning a universe.
///
/// Ordering follows the universe from most negative to most positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LinguisticLabel {
    NB,
    NM,
    NS,
    ZO,
    PS,
    PM,
    PB,
}

impl LinguisticLabel {
    pub const ALL: [LinguisticLabel; 7] = [
        LinguisticLabel::NB,
        LinguisticLabel::NM,
        LinguisticLabel::NS,
        LinguisticLabel::ZO,
        LinguisticLabel::PS,
        LinguisticLabel::PM,
        LinguisticLabel::PB,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    /// Mirror image about ZO.
    pub fn negate(self) -> Self {
        Self::ALL[6 - self.index()]
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LinguisticLabel::NB => "NB",
            LinguisticLabel::NM => "NM",
            LinguisticLabel::NS => "NS",
            LinguisticLabel::ZO => "ZO",
            LinguisticLabel::PS => "PS",
            LinguisticLabel::PM => "PM",
            LinguisticLabel::PB => "PB",
        }
    }
}

impl fmt::Display for LinguisticLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LinguisticLabel {
    type Err = FuzzyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .iter()
            .copied()
            .find(|l| l.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| FuzzyError::UnknownLabel(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seven_labels_totally_ordered() {
        let all = LinguisticLabel::ALL;
        assert_eq!(all.len(), 7);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn negation_pairs() {
        use LinguisticLabel::*;
        assert_eq!(NB.negate(), PB);
        assert_eq!(NM.negate(), PM);
        assert_eq!(NS.negate(), PS);
        assert_eq!(ZO.negate(), ZO);
        for l in LinguisticLabel::ALL {
            assert_eq!(l.negate().negate(), l);
        }
    }

    #[test]
    fn parse_round_trip() {
        for l in LinguisticLabel::ALL {
            assert_eq!(l.to_string().parse::<LinguisticLabel>().unwrap(), l);
        }
        assert!("XX".parse::<LinguisticLabel>().is_err());
    }
}
