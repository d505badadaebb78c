//! Actual season results against simulated benchmarks.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::calibration::DriverClass;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::season_sim::{Category, Entity, SimulationSummary};

/// The 2025 driver and team totals, header `name,team,class,points,entity`.
pub const SEASON_2025_CSV: &str = include_str!("../data/season_2025.csv");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonRecord {
    pub entrant_name: String,
    pub team_name: String,
    pub class: DriverClass,
    pub points: f64,
    pub entity: Entity,
}

impl SeasonRecord {
    pub fn category(&self) -> Category {
        Category::new(self.class, self.entity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Above,
    Meets,
    Below,
}

impl Outcome {
    /// `above` iff `points > high`, `below` iff `points < low`, else `meets`.
    pub fn from_interval<F: Real>(points: F, low: F, high: F) -> Self {
        if points > high {
            Outcome::Above
        } else if points < low {
            Outcome::Below
        } else {
            Outcome::Meets
        }
    }

    pub fn glyph(self) -> &'static str {
        match self {
            Outcome::Above => "↑",
            Outcome::Meets => "→",
            Outcome::Below => "↓",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Above => "above",
            Outcome::Meets => "meets",
            Outcome::Below => "below",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict<F> {
    pub record: SeasonRecord,
    pub benchmark: SimulationSummary<F>,
    pub outcome: Outcome,
}

pub fn classify<F: Real>(
    record: &SeasonRecord,
    benchmark: &SimulationSummary<F>,
) -> Result<Verdict<F>> {
    if record.category() != benchmark.category {
        return Err(Error::CategoryMismatch {
            name: record.entrant_name.clone(),
            record: record.category().to_string(),
            benchmark: benchmark.category.to_string(),
        });
    }
    let outcome =
        Outcome::from_interval(F::lit(record.points), benchmark.ci_low, benchmark.ci_high);
    Ok(Verdict {
        record: record.clone(),
        benchmark: *benchmark,
        outcome,
    })
}

/// One verdict per record, in input order.
pub fn classify_season<F: Real>(
    records: &[SeasonRecord],
    benchmarks: &HashMap<Category, SimulationSummary<F>>,
) -> Result<Vec<Verdict<F>>> {
    records
        .iter()
        .map(|r| {
            let b = benchmarks
                .get(&r.category())
                .ok_or_else(|| Error::MissingBenchmark {
                    name: r.entrant_name.clone(),
                    category: r.category().to_string(),
                })?;
            classify(r, b)
        })
        .collect()
}

#[derive(Debug, Deserialize)]
struct RawRow {
    name: Option<String>,
    team: Option<String>,
    class: Option<String>,
    points: Option<String>,
    entity: Option<String>,
}

fn required(line: u64, field: &str, value: Option<String>) -> Result<String> {
    match value.map(|v| v.trim().to_string()) {
        Some(v) if !v.is_empty() => Ok(v),
        _ => Err(Error::Row {
            line,
            field: field.into(),
            message: "missing value".into(),
        }),
    }
}

const HEADER: [&str; 5] = ["name", "team", "class", "points", "entity"];

/// Parses `name,team,class,points,entity` rows. Line numbers in errors are
/// 1-based and count the header.
pub fn ingest_results<R: Read>(source: R) -> Result<Vec<SeasonRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(source);
    let header = reader.headers()?.clone();
    for want in HEADER {
        if !header.iter().any(|h| h == want) {
            return Err(Error::Row {
                line: 1,
                field: want.into(),
                message: format!("missing column; header must be `{}`", HEADER.join(",")),
            });
        }
    }

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Row {
            line: e.position().map_or(0, |p| p.line()),
            field: "*".into(),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let row: RawRow = record.deserialize(Some(&header)).map_err(|e| Error::Row {
            line,
            field: "*".into(),
            message: e.to_string(),
        })?;
        let name = required(line, "name", row.name)?;
        let team = required(line, "team", row.team)?;
        let class = required(line, "class", row.class)?
            .parse::<DriverClass>()
            .map_err(|message| Error::Row {
                line,
                field: "class".into(),
                message,
            })?;
        let points_text = required(line, "points", row.points)?;
        let points: f64 = points_text.parse().map_err(|_| Error::Row {
            line,
            field: "points".into(),
            message: format!("`{points_text}` is not a number"),
        })?;
        if !points.is_finite() || points < 0.0 {
            return Err(Error::Row {
                line,
                field: "points".into(),
                message: format!("points must be a non-negative number, got {points_text}"),
            });
        }
        let entity = required(line, "entity", row.entity)?
            .parse::<Entity>()
            .map_err(|message| Error::Row {
                line,
                field: "entity".into(),
                message,
            })?;
        if !seen.insert(name.clone()) {
            return Err(Error::DuplicateEntrant { line, name });
        }
        out.push(SeasonRecord {
            entrant_name: name,
            team_name: team,
            class,
            points,
            entity,
        });
    }
    Ok(out)
}

/// Team records summed from driver records, teams in order of first
/// appearance. Every team must field exactly two drivers of one class.
pub fn team_records(drivers: &[SeasonRecord]) -> Result<Vec<SeasonRecord>> {
    let mut order: Vec<&str> = Vec::new();
    let mut members: HashMap<&str, Vec<&SeasonRecord>> = HashMap::new();
    for d in drivers.iter().filter(|r| r.entity == Entity::Driver) {
        let team = d.team_name.as_str();
        if !members.contains_key(team) {
            order.push(team);
        }
        members.entry(team).or_default().push(d);
    }
    order
        .into_iter()
        .map(|team| {
            let ds = &members[team];
            if ds.len() != 2 {
                return Err(Error::TeamAggregation {
                    team: team.into(),
                    message: format!("expected 2 drivers, found {}", ds.len()),
                });
            }
            if ds[0].class != ds[1].class {
                return Err(Error::TeamAggregation {
                    team: team.into(),
                    message: "drivers have different classes".into(),
                });
            }
            Ok(SeasonRecord {
                entrant_name: team.into(),
                team_name: team.into(),
                class: ds[0].class,
                points: ds[0].points + ds[1].points,
                entity: Entity::Team,
            })
        })
        .collect()
}

/// Machine-readable verdict; outcome is text, never a glyph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRow {
    pub name: String,
    pub team: String,
    pub class: DriverClass,
    pub entity: Entity,
    pub points: f64,
    pub mean_points: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub outcome: Outcome,
}

impl<F: Real> From<&Verdict<F>> for VerdictRow {
    fn from(v: &Verdict<F>) -> Self {
        Self {
            name: v.record.entrant_name.clone(),
            team: v.record.team_name.clone(),
            class: v.record.class,
            entity: v.record.entity,
            points: v.record.points,
            mean_points: v.benchmark.mean_points.to_f64_lossy(),
            ci_low: v.benchmark.ci_low.to_f64_lossy(),
            ci_high: v.benchmark.ci_high.to_f64_lossy(),
            outcome: v.outcome,
        }
    }
}

fn fmt_points(x: f64) -> String {
    if x.fract() == 0.0 {
        format!("{x:.0}")
    } else {
        format!("{x}")
    }
}

/// Markdown tables in the style of the published driver and team tables:
/// drivers first, then teams, with arrow glyphs.
pub fn render_markdown<F: Real>(verdicts: &[Verdict<F>]) -> String {
    let mut out = String::new();
    let drivers: Vec<_> = verdicts
        .iter()
        .filter(|v| v.record.entity == Entity::Driver)
        .collect();
    let teams: Vec<_> = verdicts
        .iter()
        .filter(|v| v.record.entity == Entity::Team)
        .collect();
    if !drivers.is_empty() {
        out.push_str("| Driver | Team | Points | 95% CI | Performance |\n");
        out.push_str("|---|---|--:|---|:-:|\n");
        for v in drivers {
            out.push_str(&format!(
                "| {} | {} | {} | ({}–{}) | {} |\n",
                v.record.entrant_name,
                v.record.team_name,
                fmt_points(v.record.points),
                fmt_points(v.benchmark.ci_low.to_f64_lossy()),
                fmt_points(v.benchmark.ci_high.to_f64_lossy()),
                v.outcome.glyph()
            ));
        }
    }
    if !teams.is_empty() {
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str("| Team | Points | 95% CI | Performance |\n");
        out.push_str("|---|--:|---|:-:|\n");
        for v in teams {
            out.push_str(&format!(
                "| {} | {} | ({}–{}) | {} |\n",
                v.record.entrant_name,
                fmt_points(v.record.points),
                fmt_points(v.benchmark.ci_low.to_f64_lossy()),
                fmt_points(v.benchmark.ci_high.to_f64_lossy()),
                v.outcome.glyph()
            ));
        }
    }
    out
}

pub fn render_json<F: Real>(verdicts: &[Verdict<F>]) -> Result<String> {
    let rows: Vec<VerdictRow> = verdicts.iter().map(VerdictRow::from).collect();
    Ok(serde_json::to_string_pretty(&rows)?)
}

pub fn render_csv<F: Real>(verdicts: &[Verdict<F>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for v in verdicts {
        w.serialize(VerdictRow::from(v))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
