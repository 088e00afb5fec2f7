use std::io::Write;

use super::{block_frequencies, EmpiricalMeasure, EmpiricsError};
use crate::measures::MeasureSpec;
use crate::Symbol;

/// Largest number of in-cap blocks enumerated by a defect computation.
pub const MAX_DEFECT_BLOCKS: f64 = (1u64 << 24) as f64;

fn in_cap_blocks(symbols: &[Symbol], k: usize) -> Result<Vec<Vec<Symbol>>, EmpiricsError> {
    let n = (symbols.len() as f64).powi(k as i32);
    if n > MAX_DEFECT_BLOCKS {
        return Err(EmpiricsError::TooManyBlocks(n));
    }
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|b: Vec<Symbol>| {
                symbols.iter().map(move |&s| {
                    let mut c = b.clone();
                    c.push(s);
                    c
                })
            })
            .collect();
    }
    Ok(out)
}

/// `max_B |Fr(B) − μ([B])|` over all in-cap blocks, observed or not, plus
/// the discrepancy of the overflow bucket against the mass above the cap.
pub fn normality_defect_of(table: &EmpiricalMeasure, spec: &MeasureSpec) -> Result<f64, EmpiricsError> {
    let mut worst = 0.0f64;
    let mut in_cap_mass = 0.0;
    for b in in_cap_blocks(&table.in_cap_symbols(), table.k)? {
        let m = spec.cylinder_measure(&b)?;
        in_cap_mass += m;
        worst = worst.max((table.frequency(&b) - m).abs());
    }
    let overflow_mass = if table.cap.is_some() {
        (1.0 - in_cap_mass).max(0.0)
    } else {
        0.0
    };
    Ok(worst + (table.overflow_frequency() - overflow_mass).abs())
}

/// Normality defect of a prefix for blocks of length `k`; `cap` bounds the
/// symbols counted individually (countable alphabets default to 100).
pub fn normality_defect(
    x: &[Symbol],
    spec: &MeasureSpec,
    k: usize,
    cap: Option<u64>,
) -> Result<f64, EmpiricsError> {
    let table = block_frequencies(x, spec.alphabet(), k, cap)?;
    normality_defect_of(&table, spec)
}

pub fn simple_normality_defect(x: &[Symbol], spec: &MeasureSpec, cap: Option<u64>) -> Result<f64, EmpiricsError> {
    normality_defect(x, spec, 1, cap)
}

/// Writes `block, count, frequency, reference_measure, deviation` rows for
/// every observed block, then an `other` row for the overflow bucket when the
/// table has a cap. Blocks are written as space-separated symbols.
pub fn write_table_csv<W: Write>(
    table: &EmpiricalMeasure,
    reference: Option<&MeasureSpec>,
    out: W,
) -> Result<(), EmpiricsError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["block", "count", "frequency", "reference_measure", "deviation"])?;
    let mut in_cap_mass = 0.0;
    for (block, &count) in &table.counts {
        let freq = table.frequency(block);
        let label = block.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ");
        let (reference_cell, deviation_cell) = match reference {
            Some(spec) => {
                let m = spec.cylinder_measure(block)?;
                (fmt(m), fmt(freq - m))
            }
            None => (String::new(), String::new()),
        };
        w.write_record([label, count.to_string(), fmt(freq), reference_cell, deviation_cell])?;
    }
    if table.cap.is_some() {
        let freq = table.overflow_frequency();
        let (reference_cell, deviation_cell) = match reference {
            Some(spec) => {
                for b in in_cap_blocks(&table.in_cap_symbols(), table.k)? {
                    in_cap_mass += spec.cylinder_measure(&b)?;
                }
                let m = (1.0 - in_cap_mass).max(0.0);
                (fmt(m), fmt(freq - m))
            }
            None => (String::new(), String::new()),
        };
        w.write_record([
            "other".to_string(),
            table.overflow.to_string(),
            fmt(freq),
            reference_cell,
            deviation_cell,
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn fmt(v: f64) -> String {
    format!("{v:.12e}")
}
