//! Model container files.
//!
//! Layout: a plain-text header (format version, architecture, feature
//! layout, and one `tensor <name> <len>` line per weight array), the marker
//! line `end-header`, the named arrays as little-endian 32-bit floats in
//! declared order, and a text trailer `checksum <crc32>` over everything
//! before it. The day-type profiles ride along so a saved model is
//! self-contained for inference. Weights are stored in 32 bits; reloaded
//! probabilities may differ from the training-time ones by < 1e-6, and
//! every loader thresholds the same stored weights, so reloaded decisions
//! agree with each other exactly.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::DayTypeProfiles;
use crate::models::{HybridConfig, HybridModel};
use crate::nn::ParamSet;

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "OCCUFORGE-MODEL";

/// A trained hybrid model bundled with everything inference needs.
#[derive(Debug, Clone)]
pub struct SavedModel {
    pub charger_id: String,
    pub delta_minutes: u32,
    pub model: HybridModel,
    pub profiles: DayTypeProfiles,
}

/// IEEE CRC-32 (reflected, polynomial 0xEDB88320).
pub fn crc32(bytes: &[u8]) -> u32 {
    let mut table = [0u32; 256];
    for (i, entry) in table.iter_mut().enumerate() {
        let mut c = i as u32;
        for _ in 0..8 {
            c = if c & 1 != 0 { 0xEDB8_8320 ^ (c >> 1) } else { c >> 1 };
        }
        *entry = c;
    }
    let mut crc = 0xFFFF_FFFFu32;
    for &b in bytes {
        crc = table[((crc ^ b as u32) & 0xFF) as usize] ^ (crc >> 8);
    }
    crc ^ 0xFFFF_FFFF
}

fn tensor_entries(saved: &SavedModel) -> Vec<(String, Vec<f64>)> {
    let mut entries = vec![
        ("profile_weekday".to_string(), saved.profiles.weekday.clone()),
        ("profile_weekend".to_string(), saved.profiles.weekend.clone()),
    ];
    for (name, block) in saved.model.blocks() {
        entries.push((name, block.to_vec()));
    }
    entries
}

pub fn save_model(saved: &SavedModel, path: &Path) -> Result<()> {
    let entries = tensor_entries(saved);
    let cfg = &saved.model.config;

    let mut header = String::new();
    header.push_str(&format!("{MAGIC} v{FORMAT_VERSION}\n"));
    header.push_str("kind hybrid\n");
    header.push_str(&format!("charger {}\n", saved.charger_id));
    header.push_str(&format!("delta_minutes {}\n", saved.delta_minutes));
    header.push_str(&format!("m {}\n", cfg.m));
    header.push_str(&format!("k {}\n", cfg.k));
    header.push_str(&format!("threshold {}\n", cfg.threshold));
    header.push_str(&format!("x2_dim {}\n", cfg.x2_dim));
    header.push_str(&format!("lstm_hidden {}\n", cfg.lstm_hidden));
    header.push_str(&format!(
        "branch {}\n",
        cfg.branch.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
    ));
    header.push_str(&format!("post_lstm {}\n", cfg.post_lstm));
    header.push_str(&format!("merge {}\n", cfg.merge));
    header.push_str(&format!("dropout {}\n", cfg.dropout_rate));
    header.push_str(&format!("profile_source {}\n", saved.profiles.source.replace('\n', " ")));
    header.push_str("feature_layout x1=recent-first;x2=slot/spd,dow/6,weekend,profile\n");
    for (name, values) in &entries {
        header.push_str(&format!("tensor {name} {}\n", values.len()));
    }
    header.push_str("end-header\n");

    let mut payload = Vec::new();
    for (_, values) in &entries {
        for &v in values {
            payload.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }

    let mut checked = header.into_bytes();
    checked.extend_from_slice(&payload);
    let crc = crc32(&checked);

    let mut file = BufWriter::new(File::create(path)?);
    file.write_all(&checked)?;
    writeln!(file, "checksum {crc:08x}")?;
    file.flush()?;
    Ok(())
}

struct Header {
    fields: Vec<(String, String)>,
    tensors: Vec<(String, usize)>,
    byte_len: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    let mut fields = Vec::new();
    let mut tensors = Vec::new();
    let mut offset = 0usize;
    let mut first = true;
    loop {
        let rest = &bytes[offset..];
        let nl = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| Error::ModelFormat("header is truncated".to_string()))?;
        let line = std::str::from_utf8(&rest[..nl])
            .map_err(|_| Error::ModelFormat("header is not UTF-8".to_string()))?;
        offset += nl + 1;

        if first {
            first = false;
            let (magic, version) = line
                .split_once(" v")
                .ok_or_else(|| Error::ModelFormat("missing magic line".to_string()))?;
            if magic != MAGIC {
                return Err(Error::ModelFormat(format!("bad magic '{magic}'")));
            }
            let version: u32 = version
                .trim()
                .parse()
                .map_err(|_| Error::ModelFormat(format!("bad version '{version}'")))?;
            if version != FORMAT_VERSION {
                return Err(Error::ModelVersion(version));
            }
            continue;
        }
        if line == "end-header" {
            return Ok(Header { fields, tensors, byte_len: offset });
        }
        let (key, value) = line
            .split_once(' ')
            .ok_or_else(|| Error::ModelFormat(format!("malformed header line '{line}'")))?;
        if key == "tensor" {
            let (name, len) = value
                .rsplit_once(' ')
                .ok_or_else(|| Error::ModelFormat(format!("malformed tensor line '{line}'")))?;
            let len: usize = len
                .parse()
                .map_err(|_| Error::ModelFormat(format!("bad tensor length in '{line}'")))?;
            tensors.push((name.to_string(), len));
        } else {
            fields.push((key.to_string(), value.to_string()));
        }
    }
}

fn field<'a>(header: &'a Header, key: &str) -> Result<&'a str> {
    header
        .fields
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| Error::ModelFormat(format!("missing header field '{key}'")))
}

fn parse_field<T: std::str::FromStr>(header: &Header, key: &str) -> Result<T> {
    field(header, key)?
        .parse()
        .map_err(|_| Error::ModelFormat(format!("bad value for header field '{key}'")))
}

pub fn load_model(path: &Path) -> Result<SavedModel> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.is_empty() {
        return Err(Error::ModelFormat("file is empty".to_string()));
    }
    let header = parse_header(&bytes)?;

    let payload_len: usize = header.tensors.iter().map(|(_, len)| len * 4).sum();
    let payload_end = header.byte_len + payload_len;
    if bytes.len() < payload_end {
        return Err(Error::ModelFormat(format!(
            "payload truncated: need {payload_len} bytes, file has {}",
            bytes.len() - header.byte_len
        )));
    }

    let trailer = std::str::from_utf8(&bytes[payload_end..])
        .map_err(|_| Error::ModelFormat("trailer is not UTF-8".to_string()))?;
    let stored: u32 = trailer
        .trim()
        .strip_prefix("checksum ")
        .and_then(|v| u32::from_str_radix(v.trim(), 16).ok())
        .ok_or_else(|| Error::ModelFormat("missing checksum trailer".to_string()))?;
    let computed = crc32(&bytes[..payload_end]);
    if stored != computed {
        return Err(Error::Checksum { stored, computed });
    }

    if field(&header, "kind")? != "hybrid" {
        return Err(Error::ModelFormat(format!("unsupported model kind '{}'", field(&header, "kind")?)));
    }
    let config = HybridConfig {
        m: parse_field(&header, "m")?,
        k: parse_field(&header, "k")?,
        x2_dim: parse_field(&header, "x2_dim")?,
        lstm_hidden: parse_field(&header, "lstm_hidden")?,
        branch: field(&header, "branch")?
            .split(',')
            .map(|v| v.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::ModelFormat("bad branch widths".to_string()))?,
        post_lstm: parse_field(&header, "post_lstm")?,
        merge: parse_field(&header, "merge")?,
        dropout_rate: parse_field(&header, "dropout")?,
        threshold: parse_field(&header, "threshold")?,
    };

    // Decode tensors in declared order.
    let mut cursor = header.byte_len;
    let mut decoded: Vec<(String, Vec<f64>)> = Vec::with_capacity(header.tensors.len());
    for (name, len) in &header.tensors {
        let mut values = Vec::with_capacity(*len);
        for _ in 0..*len {
            let raw: [u8; 4] = bytes[cursor..cursor + 4].try_into().unwrap();
            values.push(f32::from_le_bytes(raw) as f64);
            cursor += 4;
        }
        decoded.push((name.clone(), values));
    }

    let take = |name: &str| -> Result<Vec<f64>> {
        decoded
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| Error::ModelFormat(format!("missing tensor '{name}'")))
    };

    let mut model = HybridModel::new(config, 0)?;
    for (name, block) in model.blocks_mut() {
        let values = take(&name)?;
        if values.len() != block.len() {
            return Err(Error::ModelFormat(format!(
                "tensor '{name}' has {} values, model expects {}",
                values.len(),
                block.len()
            )));
        }
        block.copy_from_slice(&values);
    }
    let profiles = DayTypeProfiles {
        weekday: take("profile_weekday")?,
        weekend: take("profile_weekend")?,
        source: field(&header, "profile_source").unwrap_or("").to_string(),
    };

    Ok(SavedModel {
        charger_id: field(&header, "charger")?.to_string(),
        delta_minutes: parse_field(&header, "delta_minutes")?,
        model,
        profiles,
    })
}
