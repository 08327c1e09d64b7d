//! CSV emission. UTF-8, LF line endings, header row, '.' decimal separator,
//! floats at full double precision (17 significant digits). Identical runs
//! produce byte-identical files.

use jumpfb::sweeps::{SweepResult, TimeSeriesPoint};

/// 17 significant digits in scientific notation.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn steady_table(rows: &[(&str, f64)]) -> String {
    let mut out = String::from("name,value\n");
    for (name, value) in rows {
        out.push_str(name);
        out.push(',');
        out.push_str(&fmt_float(*value));
        out.push('\n');
    }
    out
}

pub fn time_series_table(points: &[TimeSeriesPoint]) -> String {
    let mut out = String::from("t,concurrence,fidelity,purity\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_float(p.t),
            fmt_float(p.concurrence),
            fmt_float(p.fidelity_to_singlet),
            fmt_float(p.purity)
        ));
    }
    out
}

pub fn labeled_time_series_table(series: &[(String, Vec<TimeSeriesPoint>)]) -> String {
    let mut out = String::from("t,concurrence,fidelity,purity,series_label\n");
    for (label, points) in series {
        for p in points {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_float(p.t),
                fmt_float(p.concurrence),
                fmt_float(p.fidelity_to_singlet),
                fmt_float(p.purity),
                label
            ));
        }
    }
    out
}

pub fn sweep_table(result: &SweepResult) -> String {
    let mut out = String::from("omega,lambda,value,null_dimension,residual\n");
    for (i, &omega) in result.omegas.iter().enumerate() {
        for (j, &lambda) in result.lambdas.iter().enumerate() {
            let diag = result.diagnostics[i][j];
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_float(omega),
                fmt_float(lambda),
                fmt_float(result.grid[i][j]),
                diag.null_dimension,
                fmt_float(diag.residual)
            ));
        }
    }
    out
}

pub fn trajectory_table(times: &[f64], mean_concurrence: &[f64], stderr: &[f64], n: usize) -> String {
    let mut out = String::from("t,mean_concurrence,stderr,n\n");
    for ((t, c), se) in times.iter().zip(mean_concurrence).zip(stderr) {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_float(*t),
            fmt_float(*c),
            fmt_float(*se),
            n
        ));
    }
    out
}
