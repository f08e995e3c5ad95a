//! Deterministic extraction tools: the three date kinds and the involved
//! parties of a contract.

mod date;
mod dates;
mod parties;

pub use date::{CalendarDate, MAX_YEAR, MIN_YEAR};
pub use dates::{
    extract_dates, extract_dates_with, find_date_literals, DateBundle, DateKind, DateLiteral,
    DateMention, DateSpotter, Evidence, RegexDateSpotter,
};
pub use parties::{
    extract_parties, infer_role, normalize_name, PartyRecord, PartyRegistry, PartyRole,
    RegistryEntry,
};
