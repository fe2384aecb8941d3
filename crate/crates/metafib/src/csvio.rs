//! CSV emission and parsing for terms, deviations, mortality tables, and
//! generation statistics.
//!
//! All writers emit LF line endings and a fixed header, so identical inputs
//! produce byte-identical files. Floats go through Rust's shortest
//! round-trip formatting.

use std::io::{self, BufRead, Write};

use crate::eval::History;
use crate::genstats::{AlphaPoint, Deviation, GenerationStats};
use crate::mortality::MortalityRecord;

/// Why a CSV file could not be parsed.
#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

fn malformed(line: usize, message: impl Into<String>) -> CsvError {
    CsvError::Malformed {
        line,
        message: message.into(),
    }
}

/// Writes a term table: header `n,value`, one row per term.
pub fn write_terms(mut w: impl Write, history: &History) -> io::Result<()> {
    w.write_all(b"n,value\n")?;
    for (i, value) in history.iter().enumerate() {
        writeln!(w, "{},{value}", i as u64 + 1)?;
    }
    Ok(())
}

/// Writes deviations under the same `n,value` shape as terms; values are
/// half-integers and print exactly (`2`, `-0.5`, ...).
pub fn write_deviations(mut w: impl Write, deviations: &[Deviation]) -> io::Result<()> {
    w.write_all(b"n,value\n")?;
    for d in deviations {
        writeln!(w, "{},{}", d.n, d.s())?;
    }
    Ok(())
}

/// Reads a term table back: expects the `n,value` header and consecutive
/// indices from 1, returning just the values.
pub fn read_terms(r: impl BufRead) -> Result<Vec<i64>, CsvError> {
    let mut values = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if i == 0 {
            if line != "n,value" {
                return Err(malformed(1, "expected header 'n,value'"));
            }
            continue;
        }
        let (n, value) = line
            .split_once(',')
            .ok_or_else(|| malformed(i + 1, "expected 'n,value' row"))?;
        let n: u64 = n
            .parse()
            .map_err(|_| malformed(i + 1, format!("bad index {n:?}")))?;
        if n != i as u64 {
            return Err(malformed(i + 1, format!("expected n={i}, found {n}")));
        }
        values.push(
            value
                .parse()
                .map_err(|_| malformed(i + 1, format!("bad value {value:?}")))?,
        );
    }
    Ok(values)
}

/// Reads any two-column numeric CSV (terms or deviations) as plot points,
/// skipping the header row.
pub fn read_points(r: impl BufRead) -> Result<Vec<(f64, f64)>, CsvError> {
    let mut points = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if i == 0 {
            continue;
        }
        let (x, y) = line
            .split_once(',')
            .ok_or_else(|| malformed(i + 1, "expected two columns"))?;
        let parse = |s: &str| -> Result<f64, CsvError> {
            s.parse()
                .map_err(|_| malformed(i + 1, format!("bad number {s:?}")))
        };
        points.push((parse(x)?, parse(y)?));
    }
    Ok(points)
}

/// Writes a mortality table: `k,L,status,max_term,wall_ms`. The `L` column
/// is empty for failed runs (budget or overflow), `-1` for cap-reached.
pub fn write_mortality(mut w: impl Write, records: &[MortalityRecord]) -> io::Result<()> {
    w.write_all(b"k,L,status,max_term,wall_ms\n")?;
    for r in records {
        let l = r.l.map(|v| v.to_string()).unwrap_or_default();
        writeln!(w, "{},{l},{},{},{}", r.k, r.status, r.max_term, r.wall_ms)?;
    }
    Ok(())
}

/// Writes generation statistics: `t,n_lo,n_hi,count,mean,stddev,alpha`.
/// The alpha column is empty for t=1 (no predecessor) and for generations
/// following a zero-spread window.
pub fn write_stats(
    mut w: impl Write,
    stats: &GenerationStats,
    alphas: &[AlphaPoint],
) -> io::Result<()> {
    w.write_all(b"t,n_lo,n_hi,count,mean,stddev,alpha\n")?;
    for (i, row) in stats.rows.iter().enumerate() {
        let alpha = i
            .checked_sub(1)
            .and_then(|j| alphas.get(j))
            .and_then(|a| a.alpha)
            .map(|a| a.to_string())
            .unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{alpha}",
            row.t, row.lo, row.hi, row.count, row.mean, row.stddev
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{compile, run, RunConfig, RunStatus};
    use crate::families::Family;
    use crate::genstats::{alpha_series, deviations, moments, GenerationScheme};
    use crate::mortality::{sweep, SweepConfig};

    fn h3_history() -> History {
        let spec = Family::Hk { k: 3 }.spec().unwrap();
        run(&compile(&spec), spec.init(), &RunConfig::default()).0
    }

    #[test]
    fn terms_round_trip_exactly() {
        let history = h3_history();
        let mut buf = Vec::new();
        write_terms(&mut buf, &history).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("n,value\n1,1\n2,1\n3,2\n4,4\n"));
        assert!(!text.contains('\r'));
        let values = read_terms(buf.as_slice()).unwrap();
        assert_eq!(values.len() as u64, history.len());
        assert!(values
            .iter()
            .enumerate()
            .all(|(i, &v)| history.term(i as u64 + 1) == Some(v)));
    }

    #[test]
    fn deviation_halves_print_exactly() {
        let history = h3_history();
        let devs = deviations(&history, 4, 7).unwrap();
        let mut buf = Vec::new();
        write_deviations(&mut buf, &devs).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,value\n4,2\n"));
        assert!(text.contains("7,-0.5\n"));
    }

    #[test]
    fn points_parse_terms_and_deviations_alike() {
        let points = read_points(&b"n,value\n1,5\n2,-0.5\n"[..]).unwrap();
        assert_eq!(points, [(1.0, 5.0), (2.0, -0.5)]);
    }

    #[test]
    fn misnumbered_or_malformed_rows_are_rejected() {
        assert!(read_terms(&b"bogus\n1,1\n"[..]).is_err());
        assert!(read_terms(&b"n,value\n2,1\n"[..]).is_err());
        assert!(read_terms(&b"n,value\n1\n"[..]).is_err());
        assert!(read_points(&b"n,value\n1,x\n"[..]).is_err());
    }

    #[test]
    fn mortality_rows_spell_out_statuses() {
        let config = SweepConfig {
            k_first: 3,
            k_last: 4,
            run: RunConfig {
                cap_n: 100_000,
                budget_bytes: 1 << 20,
                ..RunConfig::default()
            },
            workers: 1,
            measure_time: false,
        };
        let mut records = sweep(&config).unwrap();
        records.push(MortalityRecord {
            k: 5,
            l: Some(-1),
            status: RunStatus::CapReached,
            max_term: 7,
            wall_ms: 0,
        });
        records.push(MortalityRecord {
            k: 6,
            l: None,
            status: RunStatus::BudgetExceeded,
            max_term: 7,
            wall_ms: 0,
        });
        let mut buf = Vec::new();
        write_mortality(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "k,L,status,max_term,wall_ms");
        assert!(lines[1].starts_with("3,53,died,"));
        assert!(lines[2].starts_with("4,42,died,"));
        assert_eq!(lines[3], "5,-1,cap-reached,7,0");
        assert_eq!(lines[4], "6,,budget-exceeded,7,0");
    }

    #[test]
    fn stats_rows_leave_alpha_blank_where_undefined() {
        let history = h3_history();
        let devs = deviations(&history, 4, 20).unwrap();
        let windows = GenerationScheme::Explicit {
            boundaries: vec![3, 8, 14, 20],
        }
        .segment()
        .unwrap();
        let stats = moments(&devs, &windows).unwrap();
        let alphas = alpha_series(&stats);
        let mut buf = Vec::new();
        write_stats(&mut buf, &stats, &alphas).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,n_lo,n_hi,count,mean,stddev,alpha");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("1,3,8,5,"));
        assert!(lines[1].ends_with(','), "t=1 has no alpha: {}", lines[1]);
        assert!(!lines[2].ends_with(','), "t=2 has an alpha: {}", lines[2]);
    }
}
