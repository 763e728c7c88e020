//! Wall-clock source for log timestamps. Tests and `--fixed-time` runs use
//! [`FixedClock`] so log files are reproducible.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, FixedOffset, NaiveDateTime, Utc};

/// A point in time, rendered `YYYY-MM-DD HH:MM:SS TZ` where `TZ` is `UTC` or
/// a `+HH:MM` offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Timestamp(DateTime<FixedOffset>);

impl Timestamp {
    pub fn new(at: DateTime<FixedOffset>) -> Self {
        Timestamp(at)
    }

    pub fn datetime(&self) -> DateTime<FixedOffset> {
        self.0
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format("%Y-%m-%d %H:%M:%S"))?;
        if self.0.offset().local_minus_utc() == 0 {
            f.write_str(" UTC")
        } else {
            write!(f, " {}", self.0.format("%:z"))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse `{0}` as a timestamp; use e.g. 2020-05-08T15:24:36+02:00")]
pub struct TimestampParseError(String);

/// Accepts RFC 3339 (`2020-05-08T15:24:36+02:00`), or a date and time without
/// offset (`2020-05-08 15:24:36`, taken as UTC).
impl FromStr for Timestamp {
    type Err = TimestampParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Ok(t) = DateTime::parse_from_rfc3339(s) {
            return Ok(Timestamp(t));
        }
        for fmt in ["%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S"] {
            if let Ok(naive) = NaiveDateTime::parse_from_str(s, fmt) {
                return Ok(Timestamp(naive.and_utc().fixed_offset()));
            }
        }
        Err(TimestampParseError(s.to_string()))
    }
}

pub trait Clock: Send + Sync {
    fn now(&self) -> Timestamp;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> Timestamp {
        Timestamp(Utc::now().fixed_offset())
    }
}

/// Always reports the same instant.
#[derive(Debug, Clone, Copy)]
pub struct FixedClock(pub Timestamp);

impl Clock for FixedClock {
    fn now(&self) -> Timestamp {
        self.0
    }
}
