//! Charging-session records and CSV parsing.

use std::io::Read;

use chrono::NaiveDateTime;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChargerClass {
    Slow,
    Fast,
    Rapid,
}

impl ChargerClass {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "slow" => Some(Self::Slow),
            "fast" => Some(Self::Fast),
            "rapid" => Some(Self::Rapid),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Slow => "slow",
            Self::Fast => "fast",
            Self::Rapid => "rapid",
        }
    }
}

/// One plug-in/plug-out event at a charger.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargingSession {
    pub charger_id: String,
    pub plug_in: NaiveDateTime,
    pub plug_out: NaiveDateTime,
    pub energy_kwh: f64,
    pub charger_class: ChargerClass,
}

impl ChargingSession {
    pub fn duration_minutes(&self) -> f64 {
        (self.plug_out - self.plug_in).num_seconds() as f64 / 60.0
    }
}

/// Maps CSV header names onto session fields. Energy and class columns are
/// optional: without them sessions get 0 kWh and the rapid class.
#[derive(Debug, Clone)]
pub struct ColumnMap {
    pub charger_id: String,
    pub plug_in: String,
    pub plug_out: String,
    pub energy: Option<String>,
    pub class: Option<String>,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            charger_id: "charger_id".to_string(),
            plug_in: "plug_in".to_string(),
            plug_out: "plug_out".to_string(),
            energy: Some("energy_kwh".to_string()),
            class: Some("charger_class".to_string()),
        }
    }
}

/// One rejected input row: 1-based file line number (the header is line 1)
/// and the reason it was dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectedRow {
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct ParseOutcome {
    pub sessions: Vec<ChargingSession>,
    pub rejects: Vec<RejectedRow>,
}

impl ParseOutcome {
    /// The reject report as text, one line per rejected row.
    pub fn reject_report(&self) -> String {
        let mut out = String::new();
        for r in &self.rejects {
            out.push_str(&format!("row {}: {}\n", r.line, r.reason));
        }
        out
    }
}

/// Accepts `YYYY-MM-DDTHH:MM` and `YYYY-MM-DDTHH:MM:SS`.
pub fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    let s = s.trim();
    NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S")
        .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M"))
        .ok()
}

/// Parses session records. Rows that cannot form a valid session are counted
/// and reported with their line numbers, never silently dropped. A mandatory
/// column missing from the header is a fatal configuration error.
pub fn parse_sessions<R: Read>(reader: R, columns: &ColumnMap) -> Result<ParseOutcome> {
    let mut csv_reader = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = csv_reader.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.trim() == name);

    let id_idx = find(&columns.charger_id)
        .ok_or_else(|| Error::Config(format!("missing mandatory column '{}' in header", columns.charger_id)))?;
    let in_idx = find(&columns.plug_in)
        .ok_or_else(|| Error::Config(format!("missing mandatory column '{}' in header", columns.plug_in)))?;
    let out_idx = find(&columns.plug_out)
        .ok_or_else(|| Error::Config(format!("missing mandatory column '{}' in header", columns.plug_out)))?;
    let energy_idx = match &columns.energy {
        Some(name) => Some(
            find(name).ok_or_else(|| Error::Config(format!("missing column '{name}' in header")))?,
        ),
        None => None,
    };
    let class_idx = match &columns.class {
        Some(name) => Some(
            find(name).ok_or_else(|| Error::Config(format!("missing column '{name}' in header")))?,
        ),
        None => None,
    };

    let mut sessions = Vec::new();
    let mut rejects = Vec::new();
    for (row_idx, record) in csv_reader.records().enumerate() {
        let record = record?;
        // Data rows start on line 2; fall back to counting if the reader
        // has no position (it always does for real input).
        let line = record.position().map(|p| p.line()).unwrap_or(row_idx as u64 + 2);
        let reject = |reason: String, rejects: &mut Vec<RejectedRow>| {
            rejects.push(RejectedRow { line, reason });
        };

        let field = |idx: usize| record.get(idx).map(str::trim).unwrap_or("");
        let charger_id = field(id_idx);
        if charger_id.is_empty() {
            reject("missing charger id".to_string(), &mut rejects);
            continue;
        }
        let raw_in = field(in_idx);
        let raw_out = field(out_idx);
        if raw_in.is_empty() || raw_out.is_empty() {
            reject("missing plug-in or plug-out timestamp".to_string(), &mut rejects);
            continue;
        }
        let plug_in = match parse_timestamp(raw_in) {
            Some(t) => t,
            None => {
                reject(format!("unparsable plug-in timestamp '{raw_in}'"), &mut rejects);
                continue;
            }
        };
        let plug_out = match parse_timestamp(raw_out) {
            Some(t) => t,
            None => {
                reject(format!("unparsable plug-out timestamp '{raw_out}'"), &mut rejects);
                continue;
            }
        };
        if plug_out <= plug_in {
            reject(format!("plug_out ({raw_out}) not after plug_in ({raw_in})"), &mut rejects);
            continue;
        }
        let energy_kwh = match energy_idx {
            Some(idx) => {
                let raw = field(idx);
                if raw.is_empty() {
                    0.0
                } else {
                    match raw.parse::<f64>() {
                        Ok(v) if v >= 0.0 && v.is_finite() => v,
                        _ => {
                            reject(format!("invalid energy value '{raw}'"), &mut rejects);
                            continue;
                        }
                    }
                }
            }
            None => 0.0,
        };
        let charger_class = match class_idx {
            Some(idx) => {
                let raw = field(idx);
                match ChargerClass::parse(raw) {
                    Some(c) => c,
                    None => {
                        reject(format!("unknown charger class '{raw}'"), &mut rejects);
                        continue;
                    }
                }
            }
            None => ChargerClass::Rapid,
        };

        sessions.push(ChargingSession {
            charger_id: charger_id.to_string(),
            plug_in,
            plug_out,
            energy_kwh,
            charger_class,
        });
    }
    Ok(ParseOutcome { sessions, rejects })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_map() -> ColumnMap {
        ColumnMap::default()
    }

    #[test]
    fn parses_a_plain_row() {
        let csv = "charger_id,plug_in,plug_out,energy_kwh,charger_class\n\
                   CP001,2018-03-05T10:05,2018-03-05T10:33,11.2,rapid\n";
        let out = parse_sessions(csv.as_bytes(), &default_map()).unwrap();
        assert!(out.rejects.is_empty());
        assert_eq!(out.sessions.len(), 1);
        let s = &out.sessions[0];
        assert_eq!(s.charger_id, "CP001");
        assert_eq!(s.duration_minutes(), 28.0);
        assert_eq!(s.energy_kwh, 11.2);
        assert_eq!(s.charger_class, ChargerClass::Rapid);
    }

    #[test]
    fn header_only_file_is_empty() {
        let csv = "charger_id,plug_in,plug_out,energy_kwh,charger_class\n";
        let out = parse_sessions(csv.as_bytes(), &default_map()).unwrap();
        assert!(out.sessions.is_empty());
        assert!(out.rejects.is_empty());
        assert_eq!(out.reject_report(), "");
    }

    #[test]
    fn reversed_interval_is_rejected_with_line_number() {
        let csv = "charger_id,plug_in,plug_out,energy_kwh,charger_class\n\
                   CP001,2018-03-05T10:33,2018-03-05T10:05,1.0,rapid\n";
        let out = parse_sessions(csv.as_bytes(), &default_map()).unwrap();
        assert!(out.sessions.is_empty());
        assert_eq!(out.rejects.len(), 1);
        assert_eq!(out.rejects[0].line, 2);
        assert!(out.rejects[0].reason.contains("not after"));
        assert!(out.reject_report().starts_with("row 2:"));
    }

    #[test]
    fn bad_timestamp_and_missing_fields_are_rejected() {
        let csv = "charger_id,plug_in,plug_out,energy_kwh,charger_class\n\
                   CP001,05/03/2018 10:05,2018-03-05T10:33,1.0,rapid\n\
                   ,2018-03-05T10:05,2018-03-05T10:33,1.0,rapid\n\
                   CP003,2018-03-05T10:05,2018-03-05T10:33,1.0,rapid\n";
        let out = parse_sessions(csv.as_bytes(), &default_map()).unwrap();
        assert_eq!(out.sessions.len(), 1);
        assert_eq!(out.rejects.len(), 2);
        assert_eq!(out.rejects[0].line, 2);
        assert_eq!(out.rejects[1].line, 3);
    }

    #[test]
    fn missing_mandatory_column_is_fatal() {
        let csv = "station,plug_in,plug_out\nCP001,2018-03-05T10:05,2018-03-05T10:33\n";
        let err = parse_sessions(csv.as_bytes(), &default_map()).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(err.to_string().contains("charger_id"));
    }

    #[test]
    fn optional_columns_can_be_absent() {
        let csv = "charger_id,plug_in,plug_out\nCP001,2018-03-05T10:05,2018-03-05T10:33\n";
        let map = ColumnMap { energy: None, class: None, ..ColumnMap::default() };
        let out = parse_sessions(csv.as_bytes(), &map).unwrap();
        assert_eq!(out.sessions[0].energy_kwh, 0.0);
        assert_eq!(out.sessions[0].charger_class, ChargerClass::Rapid);
    }

    #[test]
    fn seconds_precision_is_accepted() {
        let csv = "charger_id,plug_in,plug_out,energy_kwh,charger_class\n\
                   CP001,2018-03-05T10:05:30,2018-03-05T10:06:30,0.2,rapid\n";
        let out = parse_sessions(csv.as_bytes(), &default_map()).unwrap();
        assert_eq!(out.sessions[0].duration_minutes(), 1.0);
    }

    #[test]
    fn negative_energy_is_rejected() {
        let csv = "charger_id,plug_in,plug_out,energy_kwh,charger_class\n\
                   CP001,2018-03-05T10:05,2018-03-05T10:33,-2.0,rapid\n";
        let out = parse_sessions(csv.as_bytes(), &default_map()).unwrap();
        assert!(out.sessions.is_empty());
        assert!(out.rejects[0].reason.contains("energy"));
    }

    #[test]
    fn serialize_parse_discretize_round_trip() {
        use chrono::NaiveDate;
        // Sessions -> CSV text -> parse -> discretize matches discretizing
        // the originals directly.
        let day = NaiveDate::from_ymd_opt(2018, 3, 5).unwrap();
        let mut state = 99u64;
        let mut next = move |m: u64| {
            state = crate::seeds::splitmix64(state);
            state % m
        };
        let sessions: Vec<ChargingSession> = (0..40)
            .map(|_| {
                let start_min = next(1440 * 2) as i64;
                let duration = next(90) as i64 + 1;
                let plug_in = day.and_hms_opt(0, 0, 0).unwrap() + chrono::Duration::minutes(start_min);
                ChargingSession {
                    charger_id: format!("CP{:03}", next(3) + 1),
                    plug_in,
                    plug_out: plug_in + chrono::Duration::minutes(duration),
                    energy_kwh: next(50) as f64 / 2.0,
                    charger_class: ChargerClass::Rapid,
                }
            })
            .collect();

        let mut text = String::from("charger_id,plug_in,plug_out,energy_kwh,charger_class\n");
        for s in &sessions {
            text.push_str(&format!(
                "{},{},{},{},{}\n",
                s.charger_id,
                s.plug_in.format("%Y-%m-%dT%H:%M:%S"),
                s.plug_out.format("%Y-%m-%dT%H:%M:%S"),
                s.energy_kwh,
                s.charger_class.as_str()
            ));
        }
        let parsed = parse_sessions(text.as_bytes(), &default_map()).unwrap();
        assert!(parsed.rejects.is_empty());
        assert_eq!(parsed.sessions, sessions);

        for charger in ["CP001", "CP002", "CP003"] {
            let direct = crate::ingest::discretize(&sessions, charger, day, 4, 10).unwrap();
            let via_csv = crate::ingest::discretize(&parsed.sessions, charger, day, 4, 10).unwrap();
            assert_eq!(direct, via_csv);
        }
    }
}
