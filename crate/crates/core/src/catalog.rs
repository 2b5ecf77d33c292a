//! Catalog ingestion: tabular minima and transition-state files into a
//! [`Network`]. Two layouts are accepted. The native one carries an explicit
//! minimum index:
//!
//! ```text
//! minima:  index V log_prod_freq point_group_order
//! ts:      V log_prod_freq point_group_order min1 min2
//! ```
//!
//! The pathsample-compatible layout drops the index (minima are numbered by
//! 1-based line order) and may carry trailing inertia columns, which are
//! ignored. Frequencies are stored in the files as the log of the product
//! over modes; the geometric mean recovered here divides by kappa for minima
//! and kappa - 1 for saddles.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::network::{MinimumRecord, Network, TransitionStateRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogFormat {
    NativeTabular,
    PathsampleCompatible,
}

#[derive(Debug, Clone)]
pub struct CatalogFiles {
    pub minima: PathBuf,
    pub transition_states: PathBuf,
    pub format: CatalogFormat,
}

/// One minima-file line, kept in file units (log product of frequencies).
#[derive(Debug, Clone, PartialEq)]
pub struct RawMinimum {
    pub id: u64,
    pub energy: f64,
    pub log_prod_freq: f64,
    pub point_group_order: u64,
    /// Source line, for error reporting; not serialized.
    pub line: usize,
}

/// One transition-state line in file units.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTransitionState {
    pub energy: f64,
    pub log_prod_freq: f64,
    pub point_group_order: u64,
    pub from: u64,
    pub to: u64,
    pub line: usize,
}

/// Parsed catalog content before frequency conversion.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogData {
    pub minima: Vec<RawMinimum>,
    pub transition_states: Vec<RawTransitionState>,
}

fn split_fields(line: &str) -> Vec<&str> {
    line.split_whitespace().collect()
}

fn parse_f64(field: &str, line: usize, what: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|_| Error::parse(line, format!("{what} is not a number: {field:?}")))
}

fn parse_u64(field: &str, line: usize, what: &str) -> Result<u64> {
    field
        .parse::<u64>()
        .map_err(|_| Error::parse(line, format!("{what} is not a nonnegative integer: {field:?}")))
}

fn check_order(order: u64, line: usize) -> Result<u64> {
    if order == 0 {
        return Err(Error::domain(format!(
            "point group order must be positive (line {line})"
        )));
    }
    Ok(order)
}

impl CatalogData {
    /// Parses both tables from strings. Blank lines and lines starting with
    /// `#` are skipped; line numbers in errors refer to the physical file.
    pub fn parse_strings(minima: &str, transition_states: &str, format: CatalogFormat) -> Result<CatalogData> {
        let mut min_records = Vec::new();
        for (ix, raw) in minima.lines().enumerate() {
            let line = ix + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields = split_fields(trimmed);
            let rec = match format {
                CatalogFormat::NativeTabular => {
                    if fields.len() != 4 {
                        return Err(Error::parse(
                            line,
                            format!("minima line needs 4 fields, got {}", fields.len()),
                        ));
                    }
                    RawMinimum {
                        id: parse_u64(fields[0], line, "minimum index")?,
                        energy: parse_f64(fields[1], line, "potential")?,
                        log_prod_freq: parse_f64(fields[2], line, "log frequency product")?,
                        point_group_order: check_order(
                            parse_u64(fields[3], line, "point group order")?,
                            line,
                        )?,
                        line,
                    }
                }
                CatalogFormat::PathsampleCompatible => {
                    if fields.len() < 3 {
                        return Err(Error::parse(
                            line,
                            format!("minima line needs at least 3 fields, got {}", fields.len()),
                        ));
                    }
                    RawMinimum {
                        id: min_records.len() as u64 + 1,
                        energy: parse_f64(fields[0], line, "potential")?,
                        log_prod_freq: parse_f64(fields[1], line, "log frequency product")?,
                        point_group_order: check_order(
                            parse_u64(fields[2], line, "point group order")?,
                            line,
                        )?,
                        line,
                    }
                }
            };
            min_records.push(rec);
        }

        let mut ts_records = Vec::new();
        for (ix, raw) in transition_states.lines().enumerate() {
            let line = ix + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields = split_fields(trimmed);
            let enough = match format {
                CatalogFormat::NativeTabular => fields.len() == 5,
                CatalogFormat::PathsampleCompatible => fields.len() >= 5,
            };
            if !enough {
                return Err(Error::parse(
                    line,
                    format!("transition state line needs 5 fields, got {}", fields.len()),
                ));
            }
            ts_records.push(RawTransitionState {
                energy: parse_f64(fields[0], line, "potential")?,
                log_prod_freq: parse_f64(fields[1], line, "log frequency product")?,
                point_group_order: check_order(
                    parse_u64(fields[2], line, "point group order")?,
                    line,
                )?,
                from: parse_u64(fields[3], line, "first minimum")?,
                to: parse_u64(fields[4], line, "second minimum")?,
                line,
            });
        }

        Ok(CatalogData {
            minima: min_records,
            transition_states: ts_records,
        })
    }

    pub fn parse(files: &CatalogFiles) -> Result<CatalogData> {
        let minima = std::fs::read_to_string(&files.minima)?;
        let ts = std::fs::read_to_string(&files.transition_states)?;
        Self::parse_strings(&minima, &ts, files.format)
    }

    /// Serializes back to the native tabular layout. Floats print in their
    /// shortest round-trip form, so parse-serialize is idempotent.
    pub fn serialize(&self) -> (String, String) {
        let mut minima = String::new();
        for m in &self.minima {
            writeln!(
                minima,
                "{} {:?} {:?} {}",
                m.id, m.energy, m.log_prod_freq, m.point_group_order
            )
            .unwrap();
        }
        let mut ts = String::new();
        for t in &self.transition_states {
            writeln!(
                ts,
                "{:?} {:?} {} {} {}",
                t.energy, t.log_prod_freq, t.point_group_order, t.from, t.to
            )
            .unwrap();
        }
        (minima, ts)
    }

    /// Converts frequencies and builds the network. Minima average over
    /// kappa vibrational modes, saddles over kappa - 1.
    pub fn into_network(&self, kappa: u32) -> Result<Network> {
        if kappa < 2 {
            return Err(Error::domain(
                "kappa must be at least 2 to recover saddle frequencies",
            ));
        }
        let minima = self
            .minima
            .iter()
            .map(|m| {
                let mean_frequency = (m.log_prod_freq / kappa as f64).exp();
                if !(mean_frequency > 0.0) || !mean_frequency.is_finite() {
                    return Err(Error::domain(format!(
                        "minimum {} frequency not representable: exp({} / {kappa}) (line {})",
                        m.id, m.log_prod_freq, m.line
                    )));
                }
                Ok(MinimumRecord {
                    id: m.id,
                    energy: m.energy,
                    point_group_order: m.point_group_order,
                    mean_frequency,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let saddles = self
            .transition_states
            .iter()
            .map(|t| {
                let mean_frequency = (t.log_prod_freq / (kappa - 1) as f64).exp();
                if !(mean_frequency > 0.0) || !mean_frequency.is_finite() {
                    return Err(Error::domain(format!(
                        "transition state on line {} frequency not representable: exp({} / {})",
                        t.line,
                        t.log_prod_freq,
                        kappa - 1
                    )));
                }
                Ok(TransitionStateRecord {
                    from: t.from,
                    to: t.to,
                    energy: t.energy,
                    point_group_order: t.point_group_order,
                    mean_frequency,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Network::build(&minima, &saddles, kappa)
    }
}

/// Reads catalog files into a network.
pub fn parse_catalog(files: &CatalogFiles, kappa: u32) -> Result<Network> {
    CatalogData::parse(files)?.into_network(kappa)
}

/// SHA-256 digest of a file, lowercase hex; exports embed it for provenance.
pub fn file_sha256(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        write!(out, "{b:02x}").unwrap();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMA: &str = "1 0.0 3.0 2\n2 0.5 3.3 1\n3 0.1 2.7 6\n";
    const TS: &str = "1.0 2.0 1 1 2\n0.7 2.2 2 2 3\n";

    #[test]
    fn golden_three_state_chain() {
        let data = CatalogData::parse_strings(MINIMA, TS, CatalogFormat::NativeTabular).unwrap();
        let net = data.into_network(3).unwrap();
        assert_eq!(net.num_states(), 3);
        assert_eq!(net.num_edges(), 2);
        assert_eq!(net.resolve(1), Some(0));
        assert_eq!(net.resolve(3), Some(2));
        assert_eq!(net.state(0).energy, 0.0);
        assert_eq!(net.state(2).point_group_order, 6);
        assert!((net.state(0).mean_frequency - (3.0f64 / 3.0).exp()).abs() <= 1e-15);
        let e = net.edge_between(0, 1).unwrap();
        assert!((net.edge(e).mean_frequency - (2.0f64 / 2.0).exp()).abs() <= 1e-15);
    }

    #[test]
    fn pathsample_layout_numbers_lines_and_ignores_inertia() {
        let minima = "0.0 3.0 2 11.0 12.0 13.0\n0.5 3.3 1 11.0 12.0 13.0\n0.1 2.7 6 11.0 12.0 13.0\n";
        let ts = "1.0 2.0 1 1 2 9.0 9.0 9.0\n0.7 2.2 2 2 3 9.0 9.0 9.0\n";
        let a = CatalogData::parse_strings(minima, ts, CatalogFormat::PathsampleCompatible).unwrap();
        let b = CatalogData::parse_strings(MINIMA, TS, CatalogFormat::NativeTabular).unwrap();
        assert_eq!(a.serialize(), b.serialize());
    }

    #[test]
    fn blank_and_comment_lines_are_skipped_without_renumbering() {
        let minima = "# header\n\n1 0.0 3.0 2\n2 0.5 3.3 1\n3 0.1 2.7 6\n";
        let data = CatalogData::parse_strings(minima, TS, CatalogFormat::NativeTabular).unwrap();
        assert_eq!(data.minima.len(), 3);
        assert_eq!(data.minima[0].line, 3);
    }

    #[test]
    fn negative_point_group_order_is_a_parse_error_naming_the_line() {
        let minima = "1 0.0 3.0 2\n2 0.5 3.3 1\n3 0.1 2.7 6\n4 0.2 2.0 1\n5 0.3 2.0 1\n6 0.4 2.0 1\n7 0.5 2.0 -3\n";
        let err = CatalogData::parse_strings(minima, "", CatalogFormat::NativeTabular).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("line 7"), "{err}");
    }

    #[test]
    fn zero_point_group_order_is_a_domain_error() {
        let minima = "1 0.0 3.0 0\n";
        let err = CatalogData::parse_strings(minima, "", CatalogFormat::NativeTabular).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn wrong_field_count_names_the_line() {
        let err =
            CatalogData::parse_strings("1 0.0 3.0\n", "", CatalogFormat::NativeTabular).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        let err = CatalogData::parse_strings(MINIMA, "1.0 2.0 1 1\n", CatalogFormat::NativeTabular)
            .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn unrepresentable_frequency_is_a_domain_error() {
        let minima = "1 0.0 1e6 1\n";
        let data = CatalogData::parse_strings(minima, "", CatalogFormat::NativeTabular).unwrap();
        let err = data.into_network(2).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn unknown_minimum_reference_is_structural() {
        let data = CatalogData::parse_strings(MINIMA, "1.0 2.0 1 1 9\n", CatalogFormat::NativeTabular)
            .unwrap();
        let err = data.into_network(3).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("9"), "{err}");
    }

    #[test]
    fn kappa_below_two_is_rejected() {
        let data = CatalogData::parse_strings(MINIMA, TS, CatalogFormat::NativeTabular).unwrap();
        assert_eq!(data.into_network(1).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn serialization_round_trips() {
        let data = CatalogData::parse_strings(MINIMA, TS, CatalogFormat::NativeTabular).unwrap();
        let (m1, t1) = data.serialize();
        let again = CatalogData::parse_strings(&m1, &t1, CatalogFormat::NativeTabular).unwrap();
        assert_eq!(again.serialize(), (m1.clone(), t1.clone()));
        let tokens = |s: &str| s.split_whitespace().map(str::to_owned).collect::<Vec<_>>();
        assert_eq!(tokens(&m1), tokens(MINIMA));
        assert_eq!(tokens(&t1), tokens(TS));
    }

    #[test]
    fn file_parse_and_digest() {
        let dir = tempfile::tempdir().unwrap();
        let min_path = dir.path().join("min.data");
        let ts_path = dir.path().join("ts.data");
        std::fs::write(&min_path, MINIMA).unwrap();
        std::fs::write(&ts_path, TS).unwrap();
        let files = CatalogFiles {
            minima: min_path.clone(),
            transition_states: ts_path,
            format: CatalogFormat::NativeTabular,
        };
        let net = parse_catalog(&files, 3).unwrap();
        assert_eq!(net.num_states(), 3);
        let digest = file_sha256(&min_path).unwrap();
        assert_eq!(digest.len(), 64);
        assert!(digest.chars().all(|c| c.is_ascii_hexdigit()));
        let missing = dir.path().join("absent");
        assert_eq!(file_sha256(&missing).unwrap_err().exit_code(), 2);
    }
}
