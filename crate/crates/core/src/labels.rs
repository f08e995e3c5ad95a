//! The fixed vocabulary of clause labels used for section titles.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

macro_rules! clause_labels {
    ($($variant:ident => $text:literal),+ $(,)?) => {
        /// One of the twenty key clause categories of a fund custody contract,
        /// or `Unknown` when a section cannot be assigned.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum ClauseLabel {
            $($variant,)+
            Unknown,
        }

        impl ClauseLabel {
            /// The twenty real labels in alphabetical order (excludes `Unknown`).
            pub const ALL: [ClauseLabel; 20] = [$(ClauseLabel::$variant,)+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(ClauseLabel::$variant => $text,)+
                    ClauseLabel::Unknown => "unknown",
                }
            }
        }

        impl FromStr for ClauseLabel {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let norm = s.trim().to_ascii_lowercase();
                match norm.as_str() {
                    $($text => Ok(ClauseLabel::$variant),)+
                    "unknown" => Ok(ClauseLabel::Unknown),
                    _ => Err(format!("unknown clause label {s:?}")),
                }
            }
        }
    };
}

clause_labels! {
    AccountTransactions => "account transactions",
    AuthorizedPersons => "authorized persons",
    Definitions => "definitions",
    DutiesAndResponsibilities => "duties and responsibilities",
    EvidenceOfAuthority => "evidence of authority",
    FeeSchedule => "fee schedule",
    FeesAndExpenses => "fees and expenses",
    ForeignCustodian => "foreign custodian and subcustodian",
    GoverningLaw => "governing law",
    Indemnification => "indemnification",
    Instructions => "instructions",
    LimitationsOfLiability => "limitations and scope of use or liability",
    Miscellaneous => "miscellaneous",
    Nominees => "nominees",
    ProprietaryInformation => "proprietary information",
    Recitals => "recitals",
    StandardOfCare => "standard of care liabilities",
    Subcustodians => "subcustodians and securities depositories",
    SuccessorCustodian => "successor custodian",
    Termination => "termination",
}

impl ClauseLabel {
    pub fn is_unknown(self) -> bool {
        self == ClauseLabel::Unknown
    }
}

impl fmt::Display for ClauseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for ClauseLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for ClauseLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_labels_sorted_and_round_trip() {
        let names: Vec<_> = ClauseLabel::ALL.iter().map(|l| l.as_str()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        assert_eq!(names.len(), 20);
        for label in ClauseLabel::ALL {
            assert_eq!(label.as_str().parse::<ClauseLabel>().unwrap(), label);
        }
        assert!("force majeure".parse::<ClauseLabel>().is_err());
    }
}
