//! Bill of materials with integer euro-cent prices.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

pub const CATALOG_HEADER: [&str; 4] = ["part_id", "name", "unit_price_cents", "quantity"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BomError {
    #[error("line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("line {line}: duplicate part id `{part_id}`")]
    DuplicatePart { line: u64, part_id: String },
    #[error("line {line}: `{field}` must be {expected}, got {value}")]
    NegativeValue {
        line: u64,
        field: &'static str,
        expected: &'static str,
        value: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartLine {
    /// LEGO design number.
    pub part_id: String,
    pub name: String,
    pub unit_price_cents: u64,
    pub quantity: u64,
}

impl PartLine {
    pub fn line_total_cents(&self) -> u64 {
        self.unit_price_cents * self.quantity
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub part_count: u64,
    pub cost_cents: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Bom {
    lines: Vec<PartLine>,
}

impl Bom {
    /// Rejects duplicate part ids and zero quantities. `line` numbers in the
    /// errors count parts from 1.
    pub fn new(lines: Vec<PartLine>) -> Result<Self, BomError> {
        let mut seen = HashSet::new();
        for (i, l) in lines.iter().enumerate() {
            let line = i as u64 + 1;
            if l.quantity == 0 {
                return Err(BomError::NegativeValue {
                    line,
                    field: "quantity",
                    expected: "at least 1",
                    value: "0".into(),
                });
            }
            if !seen.insert(l.part_id.as_str()) {
                return Err(BomError::DuplicatePart {
                    line,
                    part_id: l.part_id.clone(),
                });
            }
        }
        Ok(Self { lines })
    }

    pub fn lines(&self) -> &[PartLine] {
        &self.lines
    }

    pub fn get(&self, part_id: &str) -> Option<&PartLine> {
        self.lines.iter().find(|l| l.part_id == part_id)
    }

    pub fn totals(&self) -> Totals {
        self.lines.iter().fold(
            Totals {
                part_count: 0,
                cost_cents: 0,
            },
            |t, l| Totals {
                part_count: t.part_count + l.quantity,
                cost_cents: t.cost_cents + l.line_total_cents(),
            },
        )
    }
}

/// The shopping list for the LEGO ellipsograph (cheapest colour, Nov 2020).
///
/// Part 3008 is priced at 1 ¢: its line total of 0.03 € for three bricks and
/// the 0.97 € grand total both require it.
pub fn default_catalog() -> Bom {
    const PARTS: [(&str, &str, u64, u64); 9] = [
        ("3005", "Brick 1x1", 1, 2),
        ("3004", "Brick 1x2", 1, 2),
        ("3009", "Brick 1x6", 1, 5),
        ("3001", "Brick 2x4", 1, 4),
        ("3008", "Brick 1x8", 1, 3),
        ("2431", "Flat tile 1x4", 1, 2),
        ("32278", "Technic beam 15M", 9, 1),
        ("2780", "Technic pin", 1, 4),
        ("6098", "Base plate 16x16", 66, 1),
    ];
    let lines = PARTS
        .iter()
        .map(|&(id, name, price, qty)| PartLine {
            part_id: id.into(),
            name: name.into(),
            unit_price_cents: price,
            quantity: qty,
        })
        .collect();
    Bom::new(lines).expect("built-in catalog is valid")
}

/// Formats cents as `"0.97 EUR"`.
pub fn format_eur(cents: u64) -> String {
    format!("{}.{:02} EUR", cents / 100, cents % 100)
}

fn parse_count(line: u64, field: &'static str, raw: &str, min: i128) -> Result<u64, BomError> {
    let value: i128 = raw.trim().parse().map_err(|_| BomError::MalformedRow {
        line,
        reason: format!("`{field}` is not an integer: {raw:?}"),
    })?;
    if value < min {
        return Err(BomError::NegativeValue {
            line,
            field,
            expected: if min == 0 {
                "non-negative"
            } else {
                "at least 1"
            },
            value: raw.trim().into(),
        });
    }
    u64::try_from(value).map_err(|_| BomError::MalformedRow {
        line,
        reason: format!("`{field}` is out of range: {raw}"),
    })
}

/// Parses a catalog with header `part_id,name,unit_price_cents,quantity`.
/// Errors report the 1-based line of the input text.
pub fn load_catalog(text: &str) -> Result<Bom, BomError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut lines = Vec::new();
    let mut seen = HashSet::new();
    let mut header_seen = false;
    for record in reader.records() {
        let record = record.map_err(|e| BomError::MalformedRow {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if !header_seen {
            if record.iter().ne(CATALOG_HEADER) {
                return Err(BomError::MalformedRow {
                    line,
                    reason: format!("expected header `{}`", CATALOG_HEADER.join(",")),
                });
            }
            header_seen = true;
            continue;
        }
        if record.len() != CATALOG_HEADER.len() {
            return Err(BomError::MalformedRow {
                line,
                reason: format!(
                    "expected {} fields, found {}",
                    CATALOG_HEADER.len(),
                    record.len()
                ),
            });
        }
        let part_id = record[0].trim().to_string();
        if part_id.is_empty() {
            return Err(BomError::MalformedRow {
                line,
                reason: "empty part_id".into(),
            });
        }
        let unit_price_cents = parse_count(line, "unit_price_cents", &record[2], 0)?;
        let quantity = parse_count(line, "quantity", &record[3], 1)?;
        if !seen.insert(part_id.clone()) {
            return Err(BomError::DuplicatePart { line, part_id });
        }
        lines.push(PartLine {
            part_id,
            name: record[1].to_string(),
            unit_price_cents,
            quantity,
        });
    }
    if !header_seen {
        return Err(BomError::MalformedRow {
            line: 1,
            reason: "missing header".into(),
        });
    }
    Bom::new(lines)
}

/// Canonical serialization: header, one row per part, LF endings.
pub fn save_catalog(bom: &Bom) -> String {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer
        .write_record(CATALOG_HEADER)
        .expect("writing to memory");
    for l in &bom.lines {
        writer
            .write_record([
                l.part_id.as_str(),
                l.name.as_str(),
                &l.unit_price_cents.to_string(),
                &l.quantity.to_string(),
            ])
            .expect("writing to memory");
    }
    let bytes = writer.into_inner().expect("flushing to memory");
    String::from_utf8(bytes).expect("catalog fields are UTF-8")
}
