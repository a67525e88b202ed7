//! Plain-text renderings. JSON output goes through serde directly.

use std::fmt::Write;

use sosel::bounds::BoundLedger;
use sosel::identifiability::IdentifiabilityReport;
use sosel::simlab::ExperimentSummary;

use crate::commands::FitReport;

fn num(v: f64) -> String {
    if v == 0.0 || (1e-3..1e6).contains(&v.abs()) {
        format!("{v:.6}")
    } else {
        format!("{v:.4e}")
    }
}

pub fn fit_table(r: &FitReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "algorithm   {}", r.algorithm);
    let _ = writeln!(s, "mode        {}", r.mode);
    let _ = writeln!(s, "n, p        {}, {}", r.n, r.p);
    let _ = writeln!(s, "penalty r   {}", num(r.penalties.r));
    if r.lasso.is_some() {
        let _ = writeln!(s, "penalty r_L {}", num(r.penalties.r_l));
    }
    if let Some(sc) = &r.screen {
        let _ = writeln!(s, "S0          {}", sc.s0);
        let _ = writeln!(s, "S1          {}", sc.s1);
    }
    let _ = writeln!(s, "selected    {}", r.selected);
    if let Some(b0) = r.intercept {
        let _ = writeln!(s, "intercept   {}", num(b0));
    }
    let _ = writeln!(s, "\n{:>5}  {:<16} {:>14}", "index", "name", "beta");
    for c in &r.coefficients {
        let _ = writeln!(s, "{:>5}  {:<16} {:>14}", c.index, c.name, num(c.beta));
    }
    let _ = writeln!(
        s,
        "\n{:>4} {:>6} {:>14} {:>14}",
        "size", "added", "rss", "gic"
    );
    for st in &r.path {
        let added = st.added.map_or("-".to_string(), |a| a.to_string());
        let _ = writeln!(
            s,
            "{:>4} {:>6} {:>14} {:>14}",
            st.size,
            added,
            num(st.rss),
            num(st.gic)
        );
    }
    s
}

pub fn fit_tsv(r: &FitReport) -> String {
    let mut s = String::from("index\tname\tbeta\n");
    if let Some(b0) = r.intercept {
        let _ = writeln!(s, "0\t(intercept)\t{b0}");
    }
    for c in &r.coefficients {
        let _ = writeln!(s, "{}\t{}\t{}", c.index, c.name, c.beta);
    }
    s.push_str("\nsize\tadded\trss\tgic\n");
    for st in &r.path {
        let added = st.added.map_or(String::new(), |a| a.to_string());
        let _ = writeln!(s, "{}\t{}\t{}\t{}", st.size, added, st.rss, st.gic);
    }
    s
}

pub fn bounds_table(l: &BoundLedger) -> String {
    let mut s = String::new();
    let screen = l
        .screening_size
        .map_or("undefined".to_string(), |v| v.to_string());
    let _ = writeln!(s, "screening size s  {screen}");
    let _ = writeln!(s, "c1, c2            {:.6}, {:.6}", l.c1, l.c2);
    let _ = writeln!(s, "exhaustive lower  {}", num(l.exhaustive_lower));
    for b in l.results() {
        let status = if b.assumptions_ok { "ok" } else { "FAILED" };
        let _ = writeln!(
            s,
            "\n{:<8} value {}  raw {}  assumptions {status}",
            b.name,
            num(b.value),
            num(b.raw)
        );
        for a in &b.assumptions {
            let mark = if a.holds { " " } else { "x" };
            let _ = writeln!(
                s,
                "  [{mark}] {:<24} {:>14} <= {:>14}",
                a.name,
                num(a.lhs),
                num(a.rhs)
            );
        }
    }
    s
}

pub fn bounds_tsv(l: &BoundLedger) -> String {
    let mut s = String::from("bound\tvalue\traw\tassumption\tholds\tlhs\trhs\n");
    for b in l.results() {
        if b.assumptions.is_empty() {
            let _ = writeln!(s, "{}\t{}\t{}\t\t\t\t", b.name, b.value, b.raw);
        }
        for a in &b.assumptions {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                b.name, b.value, b.raw, a.name, a.holds, a.lhs, a.rhs
            );
        }
    }
    s
}

pub fn diagnose_table(r: &IdentifiabilityReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "support           {}", r.support);
    let _ = writeln!(s, "theta*_min        {}", num(r.theta_min));
    let _ = writeln!(s, "delta(T)          {}", num(r.delta_identifiability));
    let _ = writeln!(
        s,
        "kappa^2(T,3)      {}  [{}, {}]",
        num(r.kappa_support.value),
        num(r.kappa_support.lower_cert),
        num(r.kappa_support.upper_cert)
    );
    let _ = writeln!(
        s,
        "kappa^2(t,3)      {}  [{}, {}]",
        num(r.kappa_uniform.value),
        num(r.kappa_uniform.lower_cert),
        num(r.kappa_uniform.upper_cert)
    );
    let _ = writeln!(s, "\n{:>4} {:>14}", "s", "delta(T,s)");
    for d in &r.delta_scaled {
        let _ = writeln!(s, "{:>4} {:>14}", d.s, num(d.delta));
    }
    let _ = writeln!(s, "\n{:>6} {:>14}", "c", "kappa^2(T,c)");
    for k in &r.kappa_cone_profile {
        let _ = writeln!(s, "{:>6} {:>14}", k.c, num(k.kappa_sq));
    }
    let _ = writeln!(s, "\nchecks");
    for (name, ok) in r.flags.named() {
        let _ = writeln!(
            s,
            "  {:<34} {}",
            name,
            if ok { "holds" } else { "VIOLATED" }
        );
    }
    s
}

pub fn summary_table(sm: &ExperimentSummary) -> String {
    let mut s = String::new();
    let f = &sm.frequencies;
    let _ = writeln!(s, "replicates        {}", sm.replicates);
    let _ = writeln!(
        s,
        "penalties         r = {}, r_L = {}",
        num(sm.penalties.r),
        num(sm.penalties.r_l)
    );
    let _ = writeln!(
        s,
        "\n{:<16} {:>8} {:>10} {:>10}",
        "event", "count", "freq", "se"
    );
    for (name, fr) in [
        ("screen_fail", f.screen_fail),
        ("order_fail", f.order_fail),
        ("underfit", f.underfit),
        ("overfit", f.overfit),
        ("exact", f.exact),
        ("selection_error", f.selection_error),
        ("event_a_fail", f.event_a_fail),
    ] {
        let _ = writeln!(
            s,
            "{name:<16} {:>8} {:>10.5} {:>10.5}",
            fr.count, fr.freq, fr.se
        );
    }
    if !sm.coverage.is_empty() {
        let _ = writeln!(
            s,
            "\n{:<8} {:>10} {:>12} {:>12} {:>8}",
            "bound", "freq", "bound", "ledger", "covered"
        );
        for c in &sm.coverage {
            let _ = writeln!(
                s,
                "{:<8} {:>10.5} {:>12} {:>12} {:>8}",
                c.bound,
                c.frequency,
                num(c.bound_value),
                if c.assumptions_ok { "ok" } else { "failed" },
                c.covered
            );
        }
    }
    if let Some(ex) = &sm.exhaustive {
        let _ = writeln!(
            s,
            "\ngreedy error {:.5}, exhaustive error {:.5}, lower bound {}",
            ex.greedy_error.freq,
            ex.exhaustive_error.freq,
            num(ex.lower_bound)
        );
    }
    let pv = &sm.pivot;
    if let Some(ks) = pv.ks_distance {
        let _ = writeln!(
            s,
            "\npivot F({},{}): KS {:.5} over {} replicates (DKW 95% {:.5})",
            pv.d1, pv.d2, ks, pv.used, pv.dkw_95
        );
    }
    let _ = writeln!(
        s,
        "greedy family violations {}",
        sm.greedy_family_violations
    );
    s
}

#[cfg(test)]
mod tests {
    use super::num;

    #[test]
    fn number_formatting() {
        assert_eq!(num(0.0), "0.000000");
        assert_eq!(num(2.5), "2.500000");
        assert_eq!(num(1.5e-7), "1.5000e-7");
        assert_eq!(num(-3e8), "-3.0000e8");
        assert_eq!(num(f64::INFINITY), "inf");
    }
}
