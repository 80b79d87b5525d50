use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use qtlink::figures::{Cell, Dataset};
use serde::Serialize;

use crate::args::Format;
use crate::error::CliError;

pub const SIGNIFICANT_DIGITS: usize = 9;

/// `%.9g`-style rendering: fixed notation for moderate exponents, trailing
/// zeros dropped.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn fmt_cell(cell: &Cell) -> String {
    match cell {
        Cell::Num(x) => fmt_sig(*x),
        Cell::Bool(b) => b.to_string(),
    }
}

/// Writes through `f` to `path`, or to stdout when `path` is absent.
pub fn with_sink(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), CliError> {
    match path {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::io(path, e))?;
            let mut w = BufWriter::new(file);
            f(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

#[derive(Serialize)]
struct DatasetDocument<'a> {
    tool: &'static str,
    version: &'static str,
    #[serde(flatten)]
    dataset: &'a Dataset,
}

pub fn write_dataset(w: &mut dyn Write, dataset: &Dataset, format: Format) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(w, dataset),
        Format::Json => {
            let doc = DatasetDocument {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                dataset,
            };
            serde_json::to_writer_pretty(&mut *w, &doc)?;
            writeln!(w)
        }
    }
}

fn write_csv(w: &mut dyn Write, dataset: &Dataset) -> io::Result<()> {
    writeln!(w, "# {} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"))?;
    writeln!(w, "# target: {}", dataset.target)?;
    for (axis, range) in &dataset.spec.axes {
        writeln!(
            w,
            "# axis: {} from {} to {} in {} steps",
            axis,
            fmt_sig(range.min),
            fmt_sig(range.max),
            range.steps
        )?;
    }
    let f = &dataset.spec.fixed;
    writeln!(
        w,
        "# fixed: C_source={} C_destination={} zeta_product={} fiber_length_km={} attenuation_db_per_km={} egt_source_cap={}",
        fmt_sig(f.c_source),
        fmt_sig(f.c_destination),
        fmt_sig(f.zeta_product),
        fmt_sig(f.fiber_length_km),
        fmt_sig(f.attenuation_db_per_km),
        f.egt_source_cap.map(fmt_sig).unwrap_or_else(|| "none".into())
    )?;
    for formula in &dataset.formulas {
        writeln!(w, "# formula: {formula}")?;
    }
    writeln!(w, "{}", dataset.columns.join(","))?;
    for row in &dataset.rows {
        let cells: Vec<String> = row.iter().map(fmt_cell).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Aligned `key: value` lines.
pub fn write_pairs(w: &mut dyn Write, pairs: &[(&str, String)]) -> io::Result<()> {
    let width = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in pairs {
        writeln!(w, "{k:<width$}  {v}")?;
    }
    Ok(())
}

pub fn write_json<T: Serialize>(w: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)
}
