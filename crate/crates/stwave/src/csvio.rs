//! CSV serialization for the study drivers.
//!
//! Every file starts with `#`-prefixed metadata lines (schema version, git
//! commit, configuration echo, column conventions), followed by exactly one
//! header line and the data rows.  Output is plain UTF-8.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::process::Command;

use crate::error::Result;
use crate::experiments::{
    CompressionChoice, CondConfig, CondRow, HeatConfig, HeatMode, HeatRow, OdeConfig, OdeRow,
};

/// Bumped whenever a column is added, removed, or reinterpreted.
pub const SCHEMA_VERSION: u32 = 1;

/// Short commit hash of the enclosing git checkout, or `"unknown"` when the
/// binary runs outside one.
pub fn git_hash() -> String {
    Command::new("git")
        .args(["rev-parse", "--short", "HEAD"])
        .output()
        .ok()
        .filter(|out| out.status.success())
        .map(|out| String::from_utf8_lossy(&out.stdout).trim().to_string())
        .filter(|hash| !hash.is_empty())
        .unwrap_or_else(|| "unknown".to_string())
}

fn compression_echo(choice: &CompressionChoice) -> String {
    match choice {
        CompressionChoice::Default => "default(a=1.25,delta=midpoint)".to_string(),
        CompressionChoice::Dense => "dense".to_string(),
        CompressionChoice::Window { cutoff, delta } => {
            format!("a={cutoff},delta={delta}")
        }
    }
}

fn metadata(schema: &str, config: &str, extra: &[&str]) -> String {
    let mut text = String::new();
    let _ = writeln!(text, "# schema: {schema} v{SCHEMA_VERSION}");
    let _ = writeln!(text, "# git: {}", git_hash());
    let _ = writeln!(text, "# config: {config}");
    for line in extra {
        let _ = writeln!(text, "# {line}");
    }
    text
}

fn fmt_rate(rate: Option<f64>) -> String {
    rate.map(|r| format!("{r:.3}")).unwrap_or_default()
}

/// Renders the reaction-ODE convergence table.
pub fn ode_csv(cfg: &OdeConfig, rows: &[OdeRow]) -> String {
    let config = format!(
        "moments={} levels={}..{} mu={} horizon={} compress={}",
        cfg.dual_order,
        cfg.levels.start(),
        cfg.levels.end(),
        cfg.mu,
        cfg.horizon,
        compression_echo(&cfg.compression),
    );
    let mut text = metadata(
        "stwave-ode1d",
        &config,
        &[
            "percent = 100*nnz/N^2 of the compressed system matrix",
            "errors in L2(0,T), H1(0,T), and the fractional 1/2-norm; \
             rate columns are log2(previous/current)",
        ],
    );
    text.push_str(
        "j,N,nnz,percent,l2,l2_rate,h1,h1_rate,h_half,h_half_rate,\
         tail_ratio,factor_nnz,residual\n",
    );
    for r in rows {
        let _ = writeln!(
            text,
            "{},{},{},{:.2},{:.6e},{},{:.6e},{},{:.6e},{},{:.2e},{},{:.2e}",
            r.level,
            r.n,
            r.nnz,
            r.percent,
            r.l2,
            fmt_rate(r.l2_rate),
            r.h1,
            fmt_rate(r.h1_rate),
            r.h_half,
            fmt_rate(r.h_half_rate),
            r.tail_ratio,
            r.factor_nnz,
            r.residual,
        );
    }
    text
}

/// Renders the condition-number sweep, one column per reaction weight.
pub fn cond_csv(cfg: &CondConfig, rows: &[CondRow]) -> String {
    let mus = cfg
        .mus
        .iter()
        .map(|m| format!("{m}"))
        .collect::<Vec<_>>()
        .join(",");
    let config = format!(
        "levels={}..{} mus={} horizon={}",
        cfg.levels.start(),
        cfg.levels.end(),
        mus,
        cfg.horizon,
    );
    let mut text = metadata(
        "stwave-cond",
        &config,
        &["kappa of diag-scaled A + mu*T*M in multiscale coordinates"],
    );
    text.push_str("dof");
    for m in &cfg.mus {
        let _ = write!(text, ",cond_mu{m}");
    }
    text.push('\n');
    for r in rows {
        let _ = write!(text, "{}", r.dof);
        for k in &r.kappas {
            let _ = write!(text, ",{k:.4}");
        }
        text.push('\n');
    }
    text
}

/// Renders the heat-benchmark table (full or sparse tensor mode).
pub fn heat_csv(cfg: &HeatConfig, rows: &[HeatRow]) -> String {
    let mode = match cfg.mode {
        HeatMode::Full => "full",
        HeatMode::Sparse => "sparse",
    };
    let config = format!(
        "mode={mode} levels={}..{} tol={:.0e} max_iterations={}",
        cfg.levels.start(),
        cfg.levels.end(),
        cfg.tol,
        cfg.max_iterations,
    );
    let mut text = metadata(
        "stwave-heat2d",
        &config,
        &[
            "N_x counts grid nodes incl. boundary; dofs are the solved unknowns",
            "ops = multiply-adds in operator applications during the solve",
        ],
    );
    text.push_str("mode,j,N_t,N_x,dofs,iterations,converged,l2q_error,rate,ops\n");
    for r in rows {
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{},{:.6e},{},{}",
            mode,
            r.level,
            r.nt,
            r.nx_nodes,
            r.dofs,
            r.iterations,
            r.converged,
            r.l2q,
            fmt_rate(r.rate),
            r.ops,
        );
    }
    text
}

/// Writes `text` to `path`, creating parent directories as needed.
pub fn write_report(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_ode_row() -> OdeRow {
        OdeRow {
            level: 4,
            n: 16,
            nnz: 238,
            percent: 92.97,
            factor_nnz: 240,
            residual: 1.0e-15,
            l2: 3.28e-2,
            l2_rate: None,
            h1: 1.88,
            h1_rate: Some(1.002),
            h_half: 2.48e-1,
            h_half_rate: Some(1.498),
            tail_ratio: 1.0e-9,
        }
    }

    #[test]
    fn ode_csv_has_metadata_then_single_header() {
        let cfg = OdeConfig::default();
        let text = ode_csv(&cfg, &[sample_ode_row()]);
        let lines: Vec<&str> = text.lines().collect();
        let comments = lines.iter().take_while(|l| l.starts_with('#')).count();
        assert!(comments >= 3, "metadata lines missing:\n{text}");
        assert!(lines[comments].starts_with("j,N,nnz,percent"));
        assert_eq!(lines.len(), comments + 2);
        assert!(lines[comments + 1].starts_with("4,16,238,92.97,3.280000e-2"));
    }

    #[test]
    fn cond_csv_one_column_per_mu() {
        let cfg = CondConfig::default();
        let rows = vec![CondRow {
            level: 3,
            dof: 8,
            kappas: vec![4.8998, 4.2814, 16.9206],
        }];
        let text = cond_csv(&cfg, &rows);
        let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
        assert_eq!(header, "dof,cond_mu1,cond_mu10,cond_mu100");
        assert!(text.lines().last().unwrap().starts_with("8,4.8998,4.2814"));
    }

    #[test]
    fn heat_csv_rate_blank_on_first_row() {
        let cfg = HeatConfig::default();
        let rows = vec![HeatRow {
            level: 4,
            nt: 16,
            nx_nodes: 289,
            dofs: 3600,
            iterations: 19,
            converged: true,
            l2q: 3.9234e-3,
            rate: None,
            ops: 123456,
        }];
        let text = heat_csv(&cfg, &rows);
        let row = text.lines().last().unwrap();
        assert!(row.contains("full,4,16,289,3600,19,true,3.923400e-3,,123456"));
    }

    #[test]
    fn write_report_creates_parent_dirs() {
        let dir = std::env::temp_dir().join("stwave-csvio-test");
        let _ = std::fs::remove_dir_all(&dir);
        let path = dir.join("nested").join("out.csv");
        write_report(&path, "# empty\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "# empty\n");
        let _ = std::fs::remove_dir_all(&dir);
    }
}
