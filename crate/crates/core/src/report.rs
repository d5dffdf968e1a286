//! Human-readable rendering. Bit values are shown to four decimals;
//! machine output goes through serde instead.

use std::fmt::Write;

use crate::extended::ExtendedReal;
use crate::metrics::{FlowRange, FlowReport, SearchEffort};

fn range(r: &FlowRange) -> String {
    let open = if r.lo == ExtendedReal::NegInf { "(" } else { "[" };
    let close = if r.hi == ExtendedReal::PosInf { ")" } else { "]" };
    format!("{open}{:.4}, {:.4}{close}", r.lo, r.hi)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "size-consistent"
    } else {
        "NOT size-consistent"
    }
}

fn search(s: &SearchEffort) -> String {
    match s {
        SearchEffort::Defined { residual_bits, space } => {
            format!("residual {residual_bits:.4} bits, space {space:.4} candidates")
        }
        SearchEffort::Undefined { diagnostic } => format!("undefined: {diagnostic}"),
    }
}

pub fn render_report(r: &FlowReport) -> String {
    let mut s = String::new();
    let mut line = |label: &str, value: String| {
        writeln!(s, "{label:<38} {value}").unwrap();
    };
    line("secret size eta", format!("{:.4} bits", r.eta));
    line("observation", r.observation.to_string());
    line("prebelief", r.prebelief.to_string());
    line("postbelief", r.postbelief.to_string());
    line("belief in reality (pre -> post)", format!("{:.4} -> {:.4}", r.pre_at_reality, r.post_at_reality));
    line("uncertainty U (pre)", format!("{:.4} bits", r.uncertainty_pre));
    line("uncertainty U' (post)", format!("{:.4} bits", r.uncertainty_post));
    line(
        "R   uncertainty reduction",
        format!("{:.4} bits  range {}  {}", r.r, range(&r.range_r), verdict(r.size_consistent_r)),
    );
    let q = match r.q {
        Some(q) => format!("{q:.4} bits"),
        None => "undefined".to_string(),
    };
    line("Q   accuracy gain (KL)", format!("{q}  range {}  {}", range(&r.range_q), verdict(r.size_consistent_q)));
    line("Q'  normalized accuracy gain (JS)", format!("{:.4}  range {}", r.q_prime, range(&r.range_q_prime)));
    line(
        "Q'' size-scaled accuracy gain",
        format!(
            "{:.4} bits  range {}  {}",
            r.q_double_prime,
            range(&r.range_q_double),
            verdict(r.size_consistent_q_double)
        ),
    );
    line("KL distance from reality", format!("{:.4} -> {:.4} bits", r.pre_kl_distance, r.post_kl_distance));
    line("refined distance from reality", format!("{:.4} -> {:.4} bits", r.pre_distance, r.post_distance));
    line("correct-guess likelihood multiplier", format!("{:.4}x", r.multiplier));
    line("search effort after Q''", search(&r.search_q_double));
    line(
        "search effort after Q",
        r.search_q.as_ref().map(search).unwrap_or_else(|| "undefined: Q is undefined".into()),
    );
    s
}
