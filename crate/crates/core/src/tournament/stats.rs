//! Derived statistics and result tables.
//!
//! Every figure is computed from [`Counters`] alone, so stats taken live and
//! stats recomputed from a replay agree exactly.

use std::fmt::Write as _;

use crate::sim::{Counters, WorldState, TICS_PER_SECOND};

pub const CSV_HEADER: &str = "place,bot,frags,fd_ratio,kills,suicides,deaths,avg_speed_kmh,attacks,shooting_precision,detection_precision,hits_taken,damage_taken,ammo_picked,medikits_picked,armors_picked";

/// Kills minus suicides.
pub fn frags(kills: u32, suicides: u32) -> i64 {
    kills as i64 - suicides as i64
}

/// Frags per death with deaths floored at one, truncated toward zero to two
/// decimals (the convention the published tables follow).
pub fn fd_ratio(frags: i64, deaths: u32) -> f64 {
    let hundredths = frags * 100 / deaths.max(1) as i64;
    hundredths as f64 / 100.0
}

/// Mean speed while alive, with 128 units = 3 m and 35 tics/s.
pub fn avg_speed_kmh(distance_units: f64, alive_tics: u32) -> f64 {
    if alive_tics == 0 {
        return 0.0;
    }
    distance_units * TICS_PER_SECOND as f64 / alive_tics as f64 * (3.0 / 128.0) * 3.6
}

/// `num / den` as a percentage rounded half up to one decimal; 0 when `den` is 0.
fn percent(num: u32, den: u32) -> f64 {
    if den == 0 {
        return 0.0;
    }
    let tenths = (2 * num as u64 * 1000 + den as u64) / (2 * den as u64);
    tenths as f64 / 10.0
}

/// (shooting, detection) precision in percent.
pub fn precisions(c: &Counters) -> (f64, f64) {
    (percent(c.attacks_damaging, c.attacks), percent(c.attacks_visible, c.attacks))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlayerStats {
    pub counters: Counters,
    pub frags: i64,
    pub fd_ratio: f64,
    pub avg_speed_kmh: f64,
    pub shooting_precision: f64,
    pub detection_precision: f64,
}

impl PlayerStats {
    pub fn from_counters(c: &Counters) -> PlayerStats {
        let f = frags(c.kills, c.suicides);
        let (shooting, detection) = precisions(c);
        PlayerStats {
            counters: c.clone(),
            frags: f,
            fd_ratio: fd_ratio(f, c.deaths),
            avg_speed_kmh: avg_speed_kmh(c.distance_units(), c.alive_tics),
            shooting_precision: shooting,
            detection_precision: detection,
        }
    }
}

/// Outcome of one match, per player slot.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchStats {
    pub final_tic: u32,
    pub players: Vec<PlayerStats>,
}

impl MatchStats {
    pub fn from_counters(final_tic: u32, counters: &[Counters]) -> MatchStats {
        MatchStats { final_tic, players: counters.iter().map(PlayerStats::from_counters).collect() }
    }

    pub fn from_world(world: &WorldState) -> MatchStats {
        MatchStats::from_counters(world.tic, &world.counters)
    }
}

/// One ranked line of a results table.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub place: usize,
    pub name: String,
    pub stats: PlayerStats,
}

/// Ranks by frags, then F/D, then input order.
pub fn rank(entries: &[(String, Counters)]) -> Vec<Row> {
    let mut rows: Vec<(usize, String, PlayerStats)> =
        entries.iter().enumerate().map(|(i, (n, c))| (i, n.clone(), PlayerStats::from_counters(c))).collect();
    rows.sort_by(|a, b| b.2.frags.cmp(&a.2.frags).then(b.2.fd_ratio.total_cmp(&a.2.fd_ratio)).then(a.0.cmp(&b.0)));
    rows.into_iter().enumerate().map(|(i, (_, name, stats))| Row { place: i + 1, name, stats }).collect()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn to_csv(rows: &[Row]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let s = &r.stats;
        let c = &s.counters;
        let _ = writeln!(
            out,
            "{},{},{},{:.2},{},{},{},{:.2},{},{:.1},{:.1},{},{},{},{},{}",
            r.place,
            csv_field(&r.name),
            s.frags,
            s.fd_ratio,
            c.kills,
            c.suicides,
            c.deaths,
            s.avg_speed_kmh,
            c.attacks,
            s.shooting_precision,
            s.detection_precision,
            c.hits_taken,
            c.damage_taken_hp,
            c.picked_ammo,
            c.picked_medikits,
            c.picked_armors
        );
    }
    out
}

/// One played match as seen by the tables: which participant sat in each
/// slot and what they scored.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchRecord {
    pub map: String,
    /// Participant id for each player slot.
    pub participants: Vec<usize>,
    pub stats: MatchStats,
}

/// Rendered tables for a series of matches.
#[derive(Clone, Debug, PartialEq)]
pub struct Tables {
    pub per_match_csv: Vec<String>,
    pub summary_csv: String,
    pub summary_md: String,
}

/// Builds per-match CSVs, the overall CSV and a Markdown summary with a frag
/// column per map plus totals.
pub fn emit_tables(names: &[String], matches: &[MatchRecord]) -> Tables {
    let per_match_csv = matches
        .iter()
        .map(|m| {
            let entries: Vec<(String, Counters)> = m
                .participants
                .iter()
                .zip(&m.stats.players)
                .map(|(&p, s)| (names.get(p).cloned().unwrap_or_else(|| format!("player{p}")), s.counters.clone()))
                .collect();
            to_csv(&rank(&entries))
        })
        .collect();

    let mut maps: Vec<&str> = Vec::new();
    for m in matches {
        if !maps.contains(&m.map.as_str()) {
            maps.push(&m.map);
        }
    }
    let mut totals = vec![Counters::default(); names.len()];
    let mut per_map = vec![vec![Counters::default(); maps.len()]; names.len()];
    for m in matches {
        let mi = maps.iter().position(|x| *x == m.map).expect("map listed");
        for (&p, s) in m.participants.iter().zip(&m.stats.players) {
            if p < names.len() {
                totals[p].accumulate(&s.counters);
                per_map[p][mi].accumulate(&s.counters);
            }
        }
    }
    let entries: Vec<(String, Counters)> = names.iter().cloned().zip(totals).collect();
    let rows = rank(&entries);

    let mut md = String::from("| place | bot |");
    for m in &maps {
        let _ = write!(md, " {m} frags |");
    }
    md.push_str(" total frags | F/D | kills | suicides | deaths | km/h | attacks | shooting % | detection % |\n|---|---|");
    md.push_str(&"---|".repeat(maps.len() + 9));
    md.push('\n');
    for r in &rows {
        let p = names.iter().position(|n| *n == r.name).unwrap_or(0);
        let s = &r.stats;
        let _ = write!(md, "| {} | {} |", r.place, r.name);
        for c in &per_map[p] {
            let _ = write!(md, " {} |", c.frags());
        }
        let _ = writeln!(
            md,
            " {} | {:.2} | {} | {} | {} | {:.2} | {} | {:.1} | {:.1} |",
            s.frags,
            s.fd_ratio,
            s.counters.kills,
            s.counters.suicides,
            s.counters.deaths,
            s.avg_speed_kmh,
            s.counters.attacks,
            s.shooting_precision,
            s.detection_precision
        );
    }
    Tables { per_match_csv, summary_csv: to_csv(&rows), summary_md: md }
}
