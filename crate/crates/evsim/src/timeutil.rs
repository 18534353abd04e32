//! Calendar helpers for the hourly simulation clock.

use chrono::{Datelike, Days, Months, NaiveDate, NaiveDateTime, Timelike};

pub type Timestamp = NaiveDateTime;

/// Hours in the mean Julian year, used to convert an hour offset into
/// fractional elapsed years.
pub const HOURS_PER_YEAR: f64 = 8766.0;

pub fn year_start(year: i32) -> Timestamp {
    NaiveDate::from_ymd_opt(year, 1, 1)
        .expect("valid year")
        .and_hms_opt(0, 0, 0)
        .expect("valid time")
}

pub fn hours_in_year(year: i32) -> u32 {
    let days = if is_leap_year(year) { 366 } else { 365 };
    days * 24
}

pub fn is_leap_year(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

/// Timestamp exactly one calendar year later. Feb 29 maps to Feb 28.
pub fn plus_one_year(t: Timestamp) -> Timestamp {
    t.checked_add_months(Months::new(12)).expect("in range")
}

pub fn add_hours(t: Timestamp, hours: i64) -> Timestamp {
    t.checked_add_signed(chrono::Duration::hours(hours))
        .expect("in range")
}

pub fn hours_between(earlier: Timestamp, later: Timestamp) -> i64 {
    (later - earlier).num_hours()
}

/// Maps a simulated timestamp onto the same month/day/hour of `target_year`.
/// Feb 29 falls back to Feb 28 when the target year is not a leap year.
pub fn map_to_year(t: Timestamp, target_year: i32) -> Timestamp {
    let (month, mut day) = (t.month(), t.day());
    if month == 2 && day == 29 && !is_leap_year(target_year) {
        day = 28;
    }
    NaiveDate::from_ymd_opt(target_year, month, day)
        .expect("valid mapped date")
        .and_hms_opt(t.hour(), 0, 0)
        .expect("valid time")
}

/// Hour offset of `t` within `year` when `t` is mapped into that year's
/// calendar. Assumes the source year series starts Jan 1, 00:00.
pub fn hour_offset_in_year(t: Timestamp, year: i32) -> usize {
    let mapped = map_to_year(t, year);
    hours_between(year_start(year), mapped) as usize
}

pub fn start_of_day(t: Timestamp) -> Timestamp {
    t.date().and_hms_opt(0, 0, 0).expect("valid time")
}

pub fn next_day(d: NaiveDate) -> NaiveDate {
    d.checked_add_days(Days::new(1)).expect("in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    #[test]
    fn leap_day_maps_to_feb_28() {
        let t = NaiveDate::from_ymd_opt(2024, 2, 29)
            .unwrap()
            .and_hms_opt(13, 0, 0)
            .unwrap();
        let mapped = map_to_year(t, 2019);
        assert_eq!(mapped.date(), NaiveDate::from_ymd_opt(2019, 2, 28).unwrap());
        assert_eq!(mapped.hour(), 13);
    }

    #[test]
    fn one_year_later() {
        // 2031-10 to 2032-10 crosses the 2032 leap day.
        let t = year_start(2031) + chrono::Duration::hours(7000);
        let later = plus_one_year(t);
        assert_eq!(hours_between(t, later), 8784);
        let t = year_start(2019);
        assert_eq!(hours_between(t, plus_one_year(t)), 8760);
    }

    #[test]
    fn year_lengths() {
        assert_eq!(hours_in_year(2019), 8760);
        assert_eq!(hours_in_year(2020), 8784);
    }
}
