use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;

use super::{MarketError, Result};
use crate::Real;

/// Price observations in strictly ascending date order.
#[derive(Debug, Clone, PartialEq)]
pub struct DatedSeries<F> {
    pub dates: Vec<NaiveDate>,
    pub values: Vec<F>,
}

impl<F: Real> DatedSeries<F> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn negated(&self) -> Self {
        Self { dates: self.dates.clone(), values: self.values.iter().map(|v| -*v).collect() }
    }
}

pub fn load_price_csv<F: Real>(path: impl AsRef<Path>) -> Result<DatedSeries<F>> {
    let file =
        std::fs::File::open(path.as_ref()).map_err(|e| MarketError::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_price_csv(file)
}

/// Parses a `date,price` CSV. Row numbers in errors are file line numbers,
/// counting the header as line 1.
pub fn parse_price_csv<F: Real, R: Read>(reader: R) -> Result<DatedSeries<F>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| MarketError::Io(e.to_string()))?.clone();
    let names: Vec<&str> = header.iter().map(|h| h.trim_start_matches('\u{feff}')).collect();
    if names != ["date", "price"] {
        return Err(MarketError::BadHeader(names.join(",")));
    }

    let mut dates = Vec::new();
    let mut values = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let row = e.position().map(|p| p.line() as usize).unwrap_or(0);
            MarketError::MalformedRow { row, reason: e.to_string() }
        })?;
        let row = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let bad = |reason: String| MarketError::MalformedRow { row, reason };
        if record.len() != 2 {
            return Err(bad(format!("expected 2 fields, got {}", record.len())));
        }
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d")
            .map_err(|e| bad(format!("bad date `{}`: {e}", &record[0])))?;
        let price: F = record[1].parse().map_err(|_| bad(format!("bad price `{}`", &record[1])))?;
        if !price.is_finite() || price <= F::zero() {
            return Err(bad(format!("price must be positive, got `{}`", &record[1])));
        }
        if let Some(prev) = dates.last() {
            if date == *prev {
                return Err(bad(format!("duplicate date {date}")));
            }
            if date < *prev {
                return Err(bad(format!("date {date} precedes {prev}")));
            }
        }
        dates.push(date);
        values.push(price);
    }
    Ok(DatedSeries { dates, values })
}

/// Writes a series so that `parse_price_csv` reproduces it exactly.
pub fn write_price_csv<F: Real, W: Write>(series: &DatedSeries<F>, mut out: W) -> std::io::Result<()> {
    writeln!(out, "date,price")?;
    for (d, v) in series.dates.iter().zip(&series.values) {
        writeln!(out, "{},{}", d.format("%Y-%m-%d"), v)?;
    }
    Ok(())
}

/// Values of `a` and `b` on the dates they share, in date order.
pub fn inner_join<F: Real>(a: &DatedSeries<F>, b: &DatedSeries<F>) -> (Vec<NaiveDate>, Vec<F>, Vec<F>) {
    let lookup: BTreeMap<NaiveDate, F> = b.dates.iter().copied().zip(b.values.iter().copied()).collect();
    let mut dates = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (d, x) in a.dates.iter().zip(&a.values) {
        if let Some(y) = lookup.get(d) {
            dates.push(*d);
            xs.push(*x);
            ys.push(*y);
        }
    }
    (dates, xs, ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn parse(text: &str) -> Result<DatedSeries<f64>> {
        parse_price_csv(text.as_bytes())
    }

    #[test]
    fn two_rows() {
        let s = parse("date,price\n2024-01-01,42000.5\n2024-02-01,43000\n").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.values, vec![42000.5, 43000.0]);
    }

    #[test]
    fn crlf_accepted() {
        let s = parse("date,price\r\n2024-01-01,1\r\n2024-01-02,2\r\n").unwrap();
        assert_eq!(s.values, vec![1.0, 2.0]);
    }

    #[test]
    fn zero_price_names_row() {
        let err = parse("date,price\n2024-01-01,5\n2024-01-02,0\n").unwrap_err();
        assert!(matches!(err, MarketError::MalformedRow { row: 3, .. }), "{err:?}");
    }

    #[test]
    fn ordering_and_duplicates() {
        assert!(matches!(
            parse("date,price\n2024-01-02,5\n2024-01-01,6\n"),
            Err(MarketError::MalformedRow { row: 3, .. })
        ));
        let dup = parse("date,price\n2024-01-01,5\n2024-01-01,6\n").unwrap_err();
        assert!(dup.to_string().contains("duplicate"));
    }

    #[test]
    fn malformed_rows() {
        assert!(matches!(parse("date,price\nnot-a-date,5\n"), Err(MarketError::MalformedRow { row: 2, .. })));
        assert!(matches!(parse("date,price\n2024-01-01,abc\n"), Err(MarketError::MalformedRow { row: 2, .. })));
        assert!(matches!(parse("day,close\n2024-01-01,1\n"), Err(MarketError::BadHeader(_))));
    }

    #[test]
    fn hundred_rows_round_trip() {
        let mut rng = crate::seed::rng(3);
        let start = NaiveDate::from_ymd_opt(2020, 8, 11).unwrap();
        let series = DatedSeries {
            dates: (0..100).map(|i| start + chrono::Days::new(i * 7)).collect(),
            values: (0..100).map(|_| rng.random_range(0.01..200_000.0)).collect::<Vec<f64>>(),
        };
        let mut buf = Vec::new();
        write_price_csv(&series, &mut buf).unwrap();
        let back: DatedSeries<f64> = parse_price_csv(buf.as_slice()).unwrap();
        assert_eq!(back, series);
    }

    #[test]
    fn join_on_shared_dates() {
        let a = parse("date,price\n2024-01-01,1\n2024-01-02,2\n2024-01-03,3\n").unwrap();
        let b = parse("date,price\n2024-01-02,20\n2024-01-03,30\n2024-01-04,40\n").unwrap();
        let (dates, xs, ys) = inner_join(&a, &b);
        assert_eq!(dates.len(), 2);
        assert_eq!(xs, vec![2.0, 3.0]);
        assert_eq!(ys, vec![20.0, 30.0]);
    }
}
