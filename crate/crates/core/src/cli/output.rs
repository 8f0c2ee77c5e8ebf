//! Number formatting and CSV rendering.

use crate::simulator::{SimulationTrace, SweepPoint};

pub const ALLOCATION_COLUMNS: [&str; 4] = ["stage", "duration_s", "reward", "penalty"];

pub const TRACE_COLUMNS: [&str; 12] = [
    "stage",
    "kind",
    "time_s",
    "queue_before",
    "duration_s",
    "reward",
    "waiting_penalty",
    "arrival_penalty",
    "benefit",
    "arrivals",
    "queue_after",
    "running_avg_benefit",
];

pub const SWEEP_COLUMNS: [&str; 3] = ["arrival_rate", "benefit_rh", "benefit_greedy"];

/// Nine significant digits, trailing zeros trimmed, exponent form outside
/// `[1e-5, 1e9)` (like C's `%.9g`).
pub fn sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exponent) = sci.split_once('e').expect("exponent form");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if (-5..9).contains(&exponent) {
        let decimals = (8 - exponent).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let sign = if exponent < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa.to_string()), sign, exponent.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// `#` comment lines, a header row and the data rows.
pub fn render_csv(comments: &[String], columns: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    for line in comments {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// One allocation row: one-based stage, seconds, reward, penalty.
pub fn allocation_row(stage: usize, duration: f64, reward: f64, penalty: f64) -> Vec<String> {
    vec![stage.to_string(), sig9(duration), sig9(reward), sig9(penalty)]
}

pub fn trace_rows(trace: &SimulationTrace) -> Vec<Vec<String>> {
    trace
        .records
        .iter()
        .map(|r| {
            vec![
                r.stage.to_string(),
                r.kind.as_str().to_string(),
                sig9(r.start_time),
                sig9(r.queue_before),
                sig9(r.duration),
                sig9(r.reward),
                sig9(r.waiting_penalty),
                sig9(r.arrival_penalty),
                sig9(r.benefit),
                sig9(r.arrivals),
                sig9(r.queue_after),
                sig9(r.running_average),
            ]
        })
        .collect()
}

pub fn sweep_rows(points: &[SweepPoint]) -> Vec<Vec<String>> {
    points.iter().map(|p| vec![sig9(p.arrival_rate), sig9(p.receding_horizon), sig9(p.greedy)]).collect()
}
