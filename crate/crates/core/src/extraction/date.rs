use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub const MIN_YEAR: i32 = 1900;
pub const MAX_YEAR: i32 = 2100;

/// A validated Gregorian date in 1900..=2100. Renders as `DD/MM/YYYY`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CalendarDate {
    year: i32,
    month: u32,
    day: u32,
}

pub fn is_leap(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

pub fn days_in_month(year: i32, month: u32) -> u32 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap(year) => 29,
        2 => 28,
        _ => 0,
    }
}

impl CalendarDate {
    pub fn new(year: i32, month: u32, day: u32) -> Option<Self> {
        if !(MIN_YEAR..=MAX_YEAR).contains(&year) || !(1..=12).contains(&month) {
            return None;
        }
        if day == 0 || day > days_in_month(year, month) {
            return None;
        }
        Some(Self { year, month, day })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u32 {
        self.month
    }

    pub fn day(self) -> u32 {
        self.day
    }

    /// Parses the canonical `DD/MM/YYYY` rendering.
    pub fn parse_canonical(s: &str) -> Option<Self> {
        let mut parts = s.split('/');
        let (d, m, y) = (parts.next()?, parts.next()?, parts.next()?);
        if parts.next().is_some() || d.len() != 2 || m.len() != 2 || y.len() != 4 {
            return None;
        }
        Self::new(y.parse().ok()?, m.parse().ok()?, d.parse().ok()?)
    }

    /// Days since 1970-01-01 (civil-from-days inverse).
    pub fn to_days(self) -> i64 {
        let y = if self.month <= 2 { self.year - 1 } else { self.year } as i64;
        let era = if y >= 0 { y } else { y - 399 } / 400;
        let yoe = y - era * 400;
        let m = self.month as i64;
        let doy = (153 * (if m > 2 { m - 3 } else { m + 9 }) + 2) / 5 + self.day as i64 - 1;
        let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        era * 146_097 + doe - 719_468
    }

    pub fn from_days(days: i64) -> Option<Self> {
        let z = days + 719_468;
        let era = if z >= 0 { z } else { z - 146_096 } / 146_097;
        let doe = z - era * 146_097;
        let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
        let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        let mp = (5 * doy + 2) / 153;
        let d = (doy - (153 * mp + 2) / 5 + 1) as u32;
        let m = if mp < 10 { mp + 3 } else { mp - 9 } as u32;
        let y = yoe + era * 400 + i64::from(m <= 2);
        Self::new(i32::try_from(y).ok()?, m, d)
    }

    pub fn add_days(self, days: i64) -> Option<Self> {
        Self::from_days(self.to_days() + days)
    }

    /// Adds calendar months, clamping the day to the end of the target month.
    pub fn add_months(self, months: i64) -> Option<Self> {
        let index = self.year as i64 * 12 + (self.month as i64 - 1) + months;
        let year = i32::try_from(index.div_euclid(12)).ok()?;
        let month = index.rem_euclid(12) as u32 + 1;
        if !(MIN_YEAR..=MAX_YEAR).contains(&year) {
            return None;
        }
        Self::new(year, month, self.day.min(days_in_month(year, month)))
    }

    pub fn add_years(self, years: i64) -> Option<Self> {
        self.add_months(years.checked_mul(12)?)
    }
}

impl fmt::Display for CalendarDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}/{:02}/{:04}", self.day, self.month, self.year)
    }
}

impl FromStr for CalendarDate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_canonical(s).ok_or_else(|| format!("not a DD/MM/YYYY date: {s:?}"))
    }
}

impl Serialize for CalendarDate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CalendarDate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(y: i32, m: u32, day: u32) -> CalendarDate {
        CalendarDate::new(y, m, day).unwrap()
    }

    #[test]
    fn rejects_invalid_dates() {
        assert!(CalendarDate::new(2021, 2, 29).is_none());
        assert!(CalendarDate::new(2020, 2, 29).is_some());
        assert!(CalendarDate::new(1899, 12, 31).is_none());
        assert!(CalendarDate::new(2101, 1, 1).is_none());
        assert!(CalendarDate::new(2000, 13, 1).is_none());
    }

    #[test]
    fn canonical_rendering_is_zero_padded() {
        assert_eq!(d(2005, 6, 3).to_string(), "03/06/2005");
        assert!(CalendarDate::parse_canonical("3/6/2005").is_none());
    }

    #[test]
    fn month_end_clamping() {
        assert_eq!(d(2021, 1, 31).add_months(1), Some(d(2021, 2, 28)));
        assert_eq!(d(2020, 1, 31).add_months(1), Some(d(2020, 2, 29)));
        assert_eq!(d(2020, 2, 29).add_years(1), Some(d(2021, 2, 28)));
        assert_eq!(d(2100, 12, 1).add_months(1), None);
    }

    #[test]
    fn epoch_anchor() {
        assert_eq!(d(1970, 1, 1).to_days(), 0);
        assert_eq!(d(2000, 3, 1).to_days(), 11_017);
    }

    proptest! {
        #[test]
        fn render_parse_identity(y in 1900i32..=2100, m in 1u32..=12, day in 1u32..=31) {
            if let Some(date) = CalendarDate::new(y, m, day) {
                prop_assert_eq!(CalendarDate::parse_canonical(&date.to_string()), Some(date));
            }
        }

        #[test]
        fn days_round_trip(n in -25_567i64..=47_482) {
            let date = CalendarDate::from_days(n).unwrap();
            prop_assert_eq!(date.to_days(), n);
        }
    }
}
