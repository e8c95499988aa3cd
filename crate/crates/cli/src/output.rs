use mzi_qfi::audit::{Cell, SweepRow, Table1Report};
use mzi_qfi::{FullReport, Scalar};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

/// Writes `text` to `path` through a temporary file in the same directory,
/// or to standard output when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), String> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return out
            .write_all(text.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| format!("stdout: {e}"));
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let fail = |e: std::io::Error| format!("{}: {e}", path.display());
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(text.as_bytes()).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

/// Shortest round-trip form, in exponent notation outside `[1e-4, 1e16)`.
fn num(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-4..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn scalar(v: Scalar) -> String {
    v.value().map(num).unwrap_or_default()
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> Result<String, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| e.to_string())?;
    for r in rows {
        w.write_record(&r).map_err(|e| e.to_string())?;
    }
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    String::from_utf8(bytes).map_err(|e| e.to_string())
}

fn report_fields(r: &FullReport) -> Vec<(&'static str, String)> {
    let c = &r.coherence;
    let q = &r.qfi;
    vec![
        ("cutoff", r.cutoff.to_string()),
        ("truncation_loss", num(r.truncation_loss)),
        ("nbar", num(c.nbar)),
        ("nbar_a", num(c.nbar_a)),
        ("nbar_b", num(c.nbar_b)),
        ("g2_a", scalar(c.g2_a)),
        ("g2_b", scalar(c.g2_b)),
        ("g2_ab", scalar(c.g2_ab)),
        ("var_na", num(c.var_na)),
        ("var_nb", num(c.var_nb)),
        ("cov_nab", num(c.cov_nab)),
        ("path_symmetric", c.path_symmetric.to_string()),
        ("f_variance", num(q.f_variance)),
        ("f_mode", scalar(q.f_mode)),
        ("f_path_symmetric", scalar(q.f_path_symmetric)),
        ("f_fidelity", num(q.f_fidelity)),
        ("f_particle", scalar(q.f_particle)),
        ("crb", scalar(q.crb)),
        (
            "sub_shot_noise",
            q.scaling_class
                .map(|s| s.sub_shot_noise.to_string())
                .unwrap_or_default(),
        ),
        ("route_agreement", num(q.route_agreement)),
        ("routes_consistent", q.routes_consistent.to_string()),
        ("entropy", num(r.entanglement.entropy)),
        ("entropy_bits", num(r.entanglement.entropy_bits)),
        ("separable", r.entanglement.separable.to_string()),
        (
            "fixed_number",
            r.sectors
                .fixed_number
                .map(|n| n.to_string())
                .unwrap_or_default(),
        ),
    ]
}

pub fn report_csv(r: &FullReport) -> Result<String, String> {
    let rows = report_fields(r)
        .into_iter()
        .map(|(k, v)| vec![k.to_string(), v])
        .collect();
    csv_text(&["field", "value"], rows)
}

pub fn report_table(r: &FullReport) -> String {
    let mut out = String::new();
    for (k, v) in report_fields(r) {
        let shown = if v.is_empty() { "UNDEFINED".to_string() } else { v };
        let _ = writeln!(out, "{k:<18} {shown}");
    }
    for (field, reason) in &r.undefined {
        let _ = writeln!(out, "# {field}: {reason}");
    }
    out
}

const TABLE1_HEADER: [&str; 17] = [
    "family",
    "target_nbar",
    "nbar",
    "g2",
    "g2_predicted",
    "g2_status",
    "g2_alt_status",
    "g2_ab",
    "g2_ab_predicted",
    "g2_ab_status",
    "g2_ab_alt_status",
    "qfi",
    "qfi_predicted",
    "qfi_status",
    "qfi_alt_status",
    "routes_consistent",
    "note",
];

fn cell_columns(c: &Cell) -> [String; 4] {
    [
        scalar(c.numeric),
        opt(c.predicted),
        c.status.as_str().to_string(),
        c.alternative
            .map(|a| a.status.as_str().to_string())
            .unwrap_or_default(),
    ]
}

pub fn table1_csv(r: &Table1Report) -> Result<String, String> {
    let rows = r
        .rows
        .iter()
        .map(|row| {
            let mut v = vec![
                row.family.name().to_string(),
                num(row.target_nbar),
                opt(row.nbar),
            ];
            for (_, cell) in row.cells() {
                v.extend(cell_columns(cell));
            }
            v.push(row.routes_consistent.to_string());
            v.push(row.note.clone().unwrap_or_default());
            v
        })
        .collect();
    csv_text(&TABLE1_HEADER, rows)
}

pub fn table1_table(r: &Table1Report) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<26} {:>8}  {:<34} {:<34} {:<34}",
        "family", "nbar", "g2", "g2_ab", "qfi"
    );
    for row in &r.rows {
        let cells: Vec<String> = row
            .cells()
            .iter()
            .map(|(_, c)| {
                let v = c.numeric.value().map(|x| format!("{x:.6}")).unwrap_or("-".into());
                let p = c.predicted.map(|x| format!("{x:.6}")).unwrap_or("-".into());
                let alt = match c.alternative {
                    Some(a) => format!(" (n/2: {})", a.status.as_str()),
                    None => String::new(),
                };
                format!("{v} vs {p} {}{alt}", c.status.as_str())
            })
            .collect();
        let _ = writeln!(
            out,
            "{:<26} {:>8}  {:<34} {:<34} {:<34}",
            row.family.name(),
            row.nbar.map(|n| format!("{n:.4}")).unwrap_or("-".into()),
            cells[0],
            cells[1],
            cells[2]
        );
        if let Some(note) = &row.note {
            let _ = writeln!(out, "  note: {note}");
        }
    }
    let _ = writeln!(
        out,
        "mismatched cells: {}, route failures: {}",
        r.mismatched_cells, r.route_failures
    );
    out
}

const SWEEP_HEADER: [&str; 8] = [
    "target",
    "nbar",
    "qfi",
    "g2",
    "g2_ab",
    "entropy",
    "cov_sigma_z",
    "note",
];

fn sweep_columns(r: &SweepRow) -> Vec<String> {
    vec![
        num(r.target),
        opt(r.nbar),
        opt(r.qfi),
        scalar(r.g2),
        scalar(r.g2_ab),
        opt(r.entropy),
        scalar(r.cov_sigma_z),
        r.note.clone(),
    ]
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String, String> {
    csv_text(&SWEEP_HEADER, rows.iter().map(sweep_columns).collect())
}

pub fn sweep_table(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", SWEEP_HEADER.join("\t"));
    for r in rows {
        let cols: Vec<String> = sweep_columns(r)
            .into_iter()
            .map(|c| if c.is_empty() { "-".into() } else { c })
            .collect();
        let _ = writeln!(out, "{}", cols.join("\t"));
    }
    out
}
