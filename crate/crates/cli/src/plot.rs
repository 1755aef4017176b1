//! Converts run artifacts into plot-ready tables: log-scaled diameter
//! series and pinned/free position splits.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Trace columns that can serve as the decay series, in preference order.
const DIAMETER_COLUMNS: [&str; 3] = ["velocity_diameter", "diameter", "max_block"];

/// Reads the artifacts in `dir` and writes the plot tables next to them:
/// `diameter_vs_t.csv` from the trace, and `positions_pinned.csv` /
/// `positions_free.csv` when a positions file is present.
pub fn emit_plot_data(dir: &Path) -> Result<()> {
    let trace_path = dir.join("trace.csv");
    let trace = fs::read_to_string(&trace_path)
        .with_context(|| format!("reading {}", trace_path.display()))?;
    let diameter_table = diameter_vs_t(&trace)?;
    fs::write(dir.join("diameter_vs_t.csv"), diameter_table)
        .context("writing diameter_vs_t.csv")?;

    let positions_path = dir.join("positions.csv");
    if positions_path.exists() {
        let positions = fs::read_to_string(&positions_path)
            .with_context(|| format!("reading {}", positions_path.display()))?;
        let (pinned, free) = split_positions(&positions)?;
        fs::write(dir.join("positions_pinned.csv"), pinned)
            .context("writing positions_pinned.csv")?;
        fs::write(dir.join("positions_free.csv"), free).context("writing positions_free.csv")?;
    }
    Ok(())
}

/// Builds a `t,diameter,log10_diameter` table from a trace, using the first
/// recognized diameter-like column; non-positive rows are dropped because
/// they have no logarithm.
pub fn diameter_vs_t(trace: &str) -> Result<String> {
    let mut lines = trace.lines();
    let header = lines.next().context("trace has no header row")?;
    let columns: Vec<&str> = header.split(',').collect();
    let t_idx = columns
        .iter()
        .position(|&c| c == "t" || c == "step")
        .context("trace header has no time column")?;
    let (name, value_idx) = DIAMETER_COLUMNS
        .iter()
        .find_map(|&name| columns.iter().position(|&c| c == name).map(|i| (name, i)))
        .context("trace header has no diameter-like column")?;

    let mut out = String::from("t,diameter,log10_diameter\n");
    for (line_no, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let parse = |idx: usize, what: &str| -> Result<f64> {
            fields
                .get(idx)
                .with_context(|| format!("row {}: missing {what} field", line_no + 2))?
                .parse::<f64>()
                .with_context(|| format!("row {}: unreadable {what} field", line_no + 2))
        };
        let t = parse(t_idx, "time")?;
        let value = parse(value_idx, name)?;
        if value > 0.0 {
            out.push_str(&format!("{t},{value},{}\n", value.log10()));
        }
    }
    Ok(out)
}

/// Splits a `vertex,role,x,y,z` table into pinned and free vertex tables,
/// dropping mirror copies (they duplicate the free half by symmetry).
pub fn split_positions(positions: &str) -> Result<(String, String)> {
    let mut lines = positions.lines();
    let header = lines.next().context("positions file has no header row")?;
    if header != "vertex,role,x,y,z" {
        bail!("unexpected positions header: {header}");
    }
    let mut pinned = format!("{header}\n");
    let mut free = format!("{header}\n");
    for (line_no, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let role = line
            .split(',')
            .nth(1)
            .with_context(|| format!("row {}: missing role field", line_no + 2))?;
        match role {
            "pinned" => {
                pinned.push_str(line);
                pinned.push('\n');
            }
            "free" => {
                free.push_str(line);
                free.push('\n');
            }
            "mirror" => {}
            other => bail!("row {}: unknown role {other:?}", line_no + 2),
        }
    }
    Ok((pinned, free))
}
