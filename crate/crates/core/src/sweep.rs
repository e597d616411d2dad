//! Theory and simulation sweeps over PER tables, the transmission-order study,
//! and the CSV result format.

use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::analysis::avg_aoc_ms;
use crate::domain::{PerVector, SchemeKind, TimingModel, TransmissionOrder};
use crate::error::{AocError, Result};
use crate::sim::{simulate_ms, SimConfig};
use crate::table::{PerTable, SnrDb};

pub const ROW_HEADER: &str = "snr_db,scheme,mode,avg_aoc_ms,ci_halfwidth_ms,seed";
/// Header used when rows carry a transmission-order index.
pub const ORDER_ROW_HEADER: &str = "snr_db,scheme,mode,avg_aoc_ms,ci_halfwidth_ms,seed,order";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Theory,
    Simulation,
}

impl Mode {
    pub fn token(self) -> &'static str {
        match self {
            Mode::Theory => "theory",
            Mode::Simulation => "simulation",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "theory" => Ok(Mode::Theory),
            "simulation" => Ok(Mode::Simulation),
            other => Err(format!("unknown mode '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub snr_db: f64,
    pub scheme: SchemeKind,
    pub mode: Mode,
    pub avg_aoc_ms: f64,
    /// Zero for theory rows.
    pub ci_halfwidth_ms: f64,
    /// Simulation seed; zero for theory rows.
    pub seed: u64,
    /// 1-based index into the order list of an order study.
    pub order: Option<usize>,
}

impl SweepRow {
    fn sort_key(&self) -> (SnrDb, SchemeKind, Mode, Option<usize>) {
        (SnrDb(self.snr_db), self.scheme, self.mode, self.order)
    }
}

fn sort_rows(rows: &mut [SweepRow]) {
    rows.sort_by_key(SweepRow::sort_key);
}

// splitmix64 finalizer
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn scheme_tag(scheme: SchemeKind) -> u64 {
    match scheme {
        SchemeKind::TdmaNr => 1,
        SchemeKind::TdmaR => 2,
        SchemeKind::Fdma => 3,
    }
}

/// Seed of the simulation at one sweep point. Depends only on the master seed
/// and the point's own key.
pub fn point_seed(master: u64, snr_db: f64, scheme: SchemeKind) -> u64 {
    // fold -0.0 into 0.0
    let snr = if snr_db == 0.0 { 0.0_f64 } else { snr_db };
    master ^ mix64(snr.to_bits() ^ mix64(scheme_tag(scheme)))
}

/// Seed of the simulation for one order of an order study.
pub fn order_seed(master: u64, order_index: usize, scheme: SchemeKind) -> u64 {
    master ^ mix64((order_index as u64).rotate_left(32) ^ mix64(scheme_tag(scheme)))
}

fn theory_row(snr_db: f64, scheme: SchemeKind, p: &PerVector, timing: &TimingModel) -> Result<SweepRow> {
    Ok(SweepRow {
        snr_db,
        scheme,
        mode: Mode::Theory,
        avg_aoc_ms: avg_aoc_ms(scheme, p, timing)?,
        ci_halfwidth_ms: 0.0,
        seed: 0,
        order: None,
    })
}

fn simulation_row(snr_db: f64, config: &SimConfig, timing: &TimingModel) -> Result<SweepRow> {
    let r = simulate_ms(config, timing)?;
    Ok(SweepRow {
        snr_db,
        scheme: config.scheme(),
        mode: Mode::Simulation,
        avg_aoc_ms: r.avg_aoc,
        ci_halfwidth_ms: r.ci_halfwidth,
        seed: r.seed,
        order: None,
    })
}

/// Evaluates every `(snr_db, scheme)` entry of `table` in each requested mode.
///
/// Points run in parallel; the returned rows are sorted by
/// `(snr_db, scheme, mode)` so the output does not depend on scheduling.
pub fn run_sweep(
    table: &PerTable,
    timing: &TimingModel,
    modes: &[Mode],
    horizon: u64,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    let points: Vec<(f64, SchemeKind, &PerVector)> = table.iter().collect();
    let per_point: Vec<Vec<SweepRow>> = points
        .par_iter()
        .map(|&(snr_db, scheme, p)| {
            let mut rows = Vec::new();
            if modes.contains(&Mode::Theory) {
                rows.push(theory_row(snr_db, scheme, p, timing)?);
            }
            if modes.contains(&Mode::Simulation) {
                let config = SimConfig::new(scheme, p.clone(), horizon, point_seed(seed, snr_db, scheme))?;
                rows.push(simulation_row(snr_db, &config, timing)?);
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<SweepRow> = per_point.into_iter().flatten().collect();
    sort_rows(&mut rows);
    Ok(rows)
}

/// Compares TDMA-NR and TDMA-R under several device transmission orders.
///
/// Theory rows evaluate the closed forms on the reordered PER vector;
/// simulation rows keep `p` in device order and let the simulator schedule it.
pub fn run_order_study(
    p: &PerVector,
    orders: &[TransmissionOrder],
    timing: &TimingModel,
    modes: &[Mode],
    horizon: u64,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    if let Some(bad) = orders.iter().find(|o| o.len() != p.len()) {
        return Err(AocError::InvalidOrder(format!(
            "order {bad} does not cover {} devices",
            p.len()
        )));
    }
    let jobs: Vec<(usize, &TransmissionOrder, SchemeKind)> = orders
        .iter()
        .enumerate()
        .flat_map(|(k, o)| [SchemeKind::TdmaNr, SchemeKind::TdmaR].map(|s| (k + 1, o, s)))
        .collect();
    let per_job: Vec<Vec<SweepRow>> = jobs
        .par_iter()
        .map(|&(index, order, scheme)| {
            let mut rows = Vec::new();
            if modes.contains(&Mode::Theory) {
                rows.push(theory_row(0.0, scheme, &p.permuted(order)?, timing)?);
            }
            if modes.contains(&Mode::Simulation) {
                let config = SimConfig::new(scheme, p.clone(), horizon, order_seed(seed, index, scheme))?
                    .with_order(order.clone())?;
                rows.push(simulation_row(0.0, &config, timing)?);
            }
            for row in &mut rows {
                row.order = Some(index);
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<SweepRow> = per_job.into_iter().flatten().collect();
    sort_rows(&mut rows);
    Ok(rows)
}

/// Fixed-point rendering with six significant digits.
pub fn format_sig6(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0.00000".to_string();
    }
    let decimals = |v: f64| (5 - v.abs().log10().floor() as i32).max(0) as usize;
    let d = decimals(x);
    let s = format!("{:.*}", d, x);
    // rounding may carry into a new leading digit, e.g. 9.999999 -> 10.00000
    let rounded: f64 = s.parse().unwrap_or(x);
    let d2 = decimals(rounded);
    if d2 < d {
        format!("{:.*}", d2, x)
    } else {
        s
    }
}

/// Writes the header and one line per row. Order-study rows add an `order`
/// column.
pub fn emit_rows<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    let with_order = rows.iter().any(|r| r.order.is_some());
    writeln!(out, "{}", if with_order { ORDER_ROW_HEADER } else { ROW_HEADER })?;
    for r in rows {
        write!(
            out,
            "{},{},{},{},{},{}",
            format_sig6(r.snr_db),
            r.scheme,
            r.mode,
            format_sig6(r.avg_aoc_ms),
            format_sig6(r.ci_halfwidth_ms),
            r.seed
        )?;
        if with_order {
            match r.order {
                Some(k) => write!(out, ",{k}")?,
                None => write!(out, ",")?,
            }
        }
        writeln!(out)?;
    }
    out.flush()
}

/// Reads rows written by [`emit_rows`].
pub fn parse_rows<R: BufRead>(input: R) -> Result<Vec<SweepRow>> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| AocError::Parse { line: 1, message: "missing header".into() })?;
    let with_order = match header.trim_end() {
        ROW_HEADER => false,
        ORDER_ROW_HEADER => true,
        _ => {
            return Err(AocError::Parse {
                line: 1,
                message: format!("unexpected header '{header}'"),
            })
        }
    };
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i as u64 + 2;
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let err = |message: String| AocError::Parse { line: line_no, message };
        let fields: Vec<&str> = line.split(',').collect();
        let expected = if with_order { 7 } else { 6 };
        if fields.len() != expected {
            return Err(err(format!("expected {expected} fields, got {}", fields.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| err(format!("'{s}': {e}")));
        rows.push(SweepRow {
            snr_db: num(fields[0])?,
            scheme: fields[1].parse().map_err(err)?,
            mode: fields[2].parse().map_err(err)?,
            avg_aoc_ms: num(fields[3])?,
            ci_halfwidth_ms: num(fields[4])?,
            seed: fields[5].parse().map_err(|e| err(format!("seed: {e}")))?,
            order: if with_order && !fields[6].is_empty() {
                Some(fields[6].parse().map_err(|e| err(format!("order: {e}")))?)
            } else {
                None
            },
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_timing() -> TimingModel {
        TimingModel::new(0.104, 0.224).unwrap()
    }

    #[test]
    fn sig6_formatting() {
        assert_eq!(format_sig6(0.936), "0.936000");
        assert_eq!(format_sig6(14.448), "14.4480");
        assert_eq!(format_sig6(123456.7), "123457");
        assert_eq!(format_sig6(9.9999999), "10.0000");
        assert_eq!(format_sig6(-2.5), "-2.50000");
        assert_eq!(format_sig6(0.0), "0.00000");
        assert_eq!(format_sig6(f64::INFINITY), "inf");
    }

    #[test]
    fn empty_rows_give_header_only() {
        let mut buf = Vec::new();
        emit_rows(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{ROW_HEADER}\n"));
    }

    #[test]
    fn one_row_two_lines() {
        let row = SweepRow {
            snr_db: 10.0,
            scheme: SchemeKind::Fdma,
            mode: Mode::Theory,
            avg_aoc_ms: 0.336,
            ci_halfwidth_ms: 0.0,
            seed: 0,
            order: None,
        };
        let mut buf = Vec::new();
        emit_rows(&[row], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, format!("{ROW_HEADER}\n10.0000,fdma,theory,0.336000,0.00000,0\n"));
    }

    #[test]
    fn zero_loss_sweep_theory_equals_simulation() {
        let p = PerVector::uniform(6, 0.0).unwrap();
        let table = PerTable::single(20.0, &p, &SchemeKind::ALL);
        let rows = run_sweep(&table, &default_timing(), &[Mode::Theory, Mode::Simulation], 6_000, 9).unwrap();
        assert_eq!(rows.len(), 6);
        for pair in rows.chunks(2) {
            assert_eq!(pair[0].mode, Mode::Theory);
            assert_eq!(pair[1].mode, Mode::Simulation);
            assert_eq!(pair[0].avg_aoc_ms, pair[1].avg_aoc_ms);
            let expected = if pair[0].scheme.is_tdma() { 0.936 } else { 0.336 };
            assert!((pair[0].avg_aoc_ms - expected).abs() < 1e-12);
            assert_ne!(pair[1].seed, 0);
        }
    }

    #[test]
    fn theory_only_sweep() {
        let p = PerVector::uniform(3, 0.2).unwrap();
        let table = PerTable::single(5.0, &p, &SchemeKind::ALL);
        let rows = run_sweep(&table, &default_timing(), &[Mode::Theory], 1000, 1).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.mode == Mode::Theory && r.seed == 0));
    }

    #[test]
    fn seeds_depend_only_on_key() {
        let a = point_seed(7, 10.0, SchemeKind::TdmaR);
        assert_eq!(a, point_seed(7, 10.0, SchemeKind::TdmaR));
        assert_ne!(a, point_seed(7, 10.0, SchemeKind::TdmaNr));
        assert_ne!(a, point_seed(7, 11.0, SchemeKind::TdmaR));
        assert_eq!(point_seed(7, 0.0, SchemeKind::Fdma), point_seed(7, -0.0, SchemeKind::Fdma));
        assert_ne!(order_seed(7, 1, SchemeKind::TdmaR), order_seed(7, 2, SchemeKind::TdmaR));
    }

    #[test]
    fn uniform_orders_identical() {
        let p = PerVector::uniform(6, 0.2).unwrap();
        let rows = run_order_study(&p, &TransmissionOrder::study_orders(), &default_timing(), &[Mode::Theory], 1, 0).unwrap();
        assert_eq!(rows.len(), 6);
        for scheme in [SchemeKind::TdmaNr, SchemeKind::TdmaR] {
            let vals: Vec<f64> = rows.iter().filter(|r| r.scheme == scheme).map(|r| r.avg_aoc_ms).collect();
            assert!(vals.iter().all(|&v| v == vals[0]));
        }
    }

    #[test]
    fn order_study_rejects_bad_orders() {
        let p = PerVector::uniform(3, 0.2).unwrap();
        let orders = [TransmissionOrder::identity(4)];
        assert!(run_order_study(&p, &orders, &default_timing(), &[Mode::Theory], 10, 0).is_err());
    }

    #[test]
    fn order_rows_round_trip() {
        let p = PerVector::new(vec![0.05, 0.1, 0.1, 0.1, 0.1, 0.2]).unwrap();
        let rows = run_order_study(
            &p,
            &TransmissionOrder::study_orders(),
            &default_timing(),
            &[Mode::Theory, Mode::Simulation],
            20_000,
            3,
        )
        .unwrap();
        assert_eq!(rows.len(), 12);
        let mut buf = Vec::new();
        emit_rows(&rows, &mut buf).unwrap();
        let back = parse_rows(buf.as_slice()).unwrap();
        assert_eq!(back.len(), rows.len());
        for (a, b) in rows.iter().zip(&back) {
            assert_eq!((a.scheme, a.mode, a.order, a.seed), (b.scheme, b.mode, b.order, b.seed));
            assert!((a.avg_aoc_ms - b.avg_aoc_ms).abs() <= 5e-6 * a.avg_aoc_ms.abs());
        }
    }
}
