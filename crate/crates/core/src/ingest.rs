//! Tick CSV ingestion: parse `timestamp_ns,price`, keep one trading session
//! per local calendar day, and map session time onto `[0, 1]`.
//!
//! Cleaning rules, in order: session filter, drop nonpositive prices,
//! collapse equal timestamps to their median price.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, FixedOffset, NaiveDate, NaiveTime, Timelike};

use crate::error::{invalid, Error, Result};
use crate::simulate::TickSeries;

const NANOS_PER_SEC: i64 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawTickFile {
    /// `(nanoseconds since the Unix epoch, price)`, sorted by time.
    pub rows: Vec<(i64, f64)>,
    /// Malformed rows that were skipped.
    pub skipped: usize,
}

impl RawTickFile {
    /// Stable-sorts `rows` by timestamp.
    pub fn from_rows(mut rows: Vec<(i64, f64)>) -> Self {
        rows.sort_by_key(|r| r.0);
        Self { rows, skipped: 0 }
    }
}

/// Wall-clock trading session, e.g. `09:45-15:45`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SessionWindow {
    pub open: NaiveTime,
    pub close: NaiveTime,
}

impl SessionWindow {
    pub fn new(open: NaiveTime, close: NaiveTime) -> Result<Self> {
        if open >= close {
            return Err(invalid(format!(
                "session open {open} is not before close {close}"
            )));
        }
        Ok(Self { open, close })
    }

    fn open_ns(&self) -> i64 {
        self.open.num_seconds_from_midnight() as i64 * NANOS_PER_SEC + self.open.nanosecond() as i64
    }

    fn close_ns(&self) -> i64 {
        self.close.num_seconds_from_midnight() as i64 * NANOS_PER_SEC
            + self.close.nanosecond() as i64
    }

    pub fn length_ns(&self) -> i64 {
        self.close_ns() - self.open_ns()
    }

    /// Epoch nanoseconds of session time `t ∈ [0, 1]` on `date`.
    pub fn epoch_ns(&self, date: NaiveDate, tz: FixedOffset, t: f64) -> i64 {
        let midnight_local =
            date.and_hms_opt(0, 0, 0).unwrap().and_utc().timestamp() * NANOS_PER_SEC;
        let utc_midnight = midnight_local - tz.local_minus_utc() as i64 * NANOS_PER_SEC;
        utc_midnight + self.open_ns() + (t * self.length_ns() as f64).round() as i64
    }
}

impl FromStr for SessionWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once('-')
            .ok_or_else(|| invalid(format!("session `{s}` is not of the form HH:MM-HH:MM")))?;
        let parse = |x: &str| {
            NaiveTime::parse_from_str(x.trim(), "%H:%M")
                .or_else(|_| NaiveTime::parse_from_str(x.trim(), "%H:%M:%S"))
                .map_err(|e| invalid(format!("bad session time `{x}`: {e}")))
        };
        Self::new(parse(a)?, parse(b)?)
    }
}

/// Parse a UTC offset such as `-05:00`, `+0100` or `Z`.
pub fn parse_offset(s: &str) -> Result<FixedOffset> {
    if s.eq_ignore_ascii_case("z") || s.eq_ignore_ascii_case("utc") {
        return Ok(FixedOffset::east_opt(0).unwrap());
    }
    FixedOffset::from_str(s).map_err(|e| invalid(format!("bad UTC offset `{s}`: {e}")))
}

pub fn parse_ticks_from_reader(reader: impl Read) -> Result<RawTickFile> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let names: Vec<&str> = headers.iter().collect();
    if !(names == ["timestamp_ns", "price"] || names == ["timestamp", "price"]) {
        return Err(Error::Format(format!(
            "expected header `timestamp_ns,price`, found `{}`",
            names.join(",")
        )));
    }
    let mut rows = Vec::new();
    let mut skipped = 0;
    for record in rdr.records() {
        let parsed = record.ok().and_then(|r| {
            if r.len() != 2 {
                return None;
            }
            let ts = r[0].parse::<i64>().ok()?;
            let price = r[1].parse::<f64>().ok().filter(|p| p.is_finite())?;
            Some((ts, price))
        });
        match parsed {
            Some(row) => rows.push(row),
            None => skipped += 1,
        }
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("no valid tick rows".into()));
    }
    let mut raw = RawTickFile::from_rows(rows);
    raw.skipped = skipped;
    Ok(raw)
}

pub fn parse_ticks(path: &Path) -> Result<RawTickFile> {
    parse_ticks_from_reader(std::fs::File::open(path)?)
}

/// One cleaned trading session.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionDay {
    pub date: NaiveDate,
    pub timestamps_ns: Vec<i64>,
    /// Session time in `[0, 1]` and price.
    pub ticks: TickSeries,
}

impl SessionDay {
    pub fn to_raw(&self) -> RawTickFile {
        RawTickFile::from_rows(
            self.timestamps_ns
                .iter()
                .copied()
                .zip(self.ticks.prices().iter().copied())
                .collect(),
        )
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Split into sessions by local date and clean each one.
pub fn clean(
    raw: &RawTickFile,
    window: &SessionWindow,
    tz: FixedOffset,
) -> Result<Vec<SessionDay>> {
    let offset_ns = tz.local_minus_utc() as i64 * NANOS_PER_SEC;
    let open = window.open_ns();
    let close = window.close_ns();
    let length = window.length_ns() as f64;

    let mut by_day: BTreeMap<NaiveDate, BTreeMap<i64, Vec<f64>>> = BTreeMap::new();
    for &(ts, price) in &raw.rows {
        if !(price > 0.0) {
            continue;
        }
        let local = ts + offset_ns;
        let day_ns = local.rem_euclid(86_400 * NANOS_PER_SEC);
        if day_ns < open || day_ns > close {
            continue;
        }
        let date = DateTime::from_timestamp(local.div_euclid(NANOS_PER_SEC), 0)
            .ok_or_else(|| invalid(format!("timestamp {ts} out of range")))?
            .date_naive();
        by_day
            .entry(date)
            .or_default()
            .entry(ts)
            .or_default()
            .push(price);
    }
    if by_day.is_empty() {
        return Err(Error::EmptyInput(
            "no ticks inside the session window".into(),
        ));
    }

    by_day
        .into_iter()
        .map(|(date, groups)| {
            let mut stamps = Vec::with_capacity(groups.len());
            let mut times = Vec::with_capacity(groups.len());
            let mut prices = Vec::with_capacity(groups.len());
            for (ts, mut group) in groups {
                let day_ns = (ts + offset_ns).rem_euclid(86_400 * NANOS_PER_SEC);
                stamps.push(ts);
                times.push((day_ns - open) as f64 / length);
                prices.push(median(&mut group));
            }
            Ok(SessionDay {
                date,
                timestamps_ns: stamps,
                ticks: TickSeries::new(times, prices)?,
            })
        })
        .collect()
}

/// Write cleaned sessions as `date,timestamp_ns,time,price`.
pub fn write_cleaned(writer: impl Write, days: &[SessionDay]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["date", "timestamp_ns", "time", "price"])?;
    for day in days {
        let date = day.date.to_string();
        for ((ts, t), p) in day
            .timestamps_ns
            .iter()
            .zip(day.ticks.times())
            .zip(day.ticks.prices())
        {
            w.write_record([date.clone(), ts.to_string(), t.to_string(), p.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Read a cleaned file back into per-day tick series (session time, price).
pub fn read_cleaned(reader: impl Read) -> Result<Vec<(NaiveDate, TickSeries)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Format(format!("cleaned tick file lacks a `{name}` column")))
    };
    let (c_date, c_time, c_price) = (col("date")?, col("time")?, col("price")?);
    let mut days: BTreeMap<NaiveDate, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for (line, record) in rdr.records().enumerate() {
        let r = record?;
        let bad = |what: &str| Error::Format(format!("row {}: bad {what}", line + 2));
        let date = NaiveDate::from_str(&r[c_date]).map_err(|_| bad("date"))?;
        let t: f64 = r[c_time].parse().map_err(|_| bad("time"))?;
        let p: f64 = r[c_price].parse().map_err(|_| bad("price"))?;
        let entry = days.entry(date).or_default();
        entry.0.push(t);
        entry.1.push(p);
    }
    if days.is_empty() {
        return Err(Error::EmptyInput("cleaned tick file has no rows".into()));
    }
    days.into_iter()
        .map(|(d, (t, p))| Ok((d, TickSeries::new(t, p)?)))
        .collect()
}
