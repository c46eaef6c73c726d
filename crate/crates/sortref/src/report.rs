//! Search reports: JSON lines (one object per probe) and a text summary.

use std::fmt::Write;

use serde::Serialize;
use sortref_core::refine::{Outcome, Probe, SearchMode};
use sortref_core::{SortRefinement, StructureView};

#[derive(Debug, Serialize)]
pub struct SignatureJson {
    pub bits: String,
    pub multiplicity: u64,
    pub sample: String,
}

#[derive(Debug, Serialize)]
pub struct SortJson {
    pub sigma: String,
    pub subjects: u64,
    pub signatures: Vec<SignatureJson>,
}

#[derive(Debug, Serialize)]
pub struct ProbeJson {
    pub mode: &'static str,
    pub k: usize,
    pub theta: String,
    pub outcome: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sorts: Option<Vec<SortJson>>,
}

pub fn mode_label(mode: SearchMode) -> &'static str {
    match mode {
        SearchMode::HighestTheta => "highest-theta",
        SearchMode::LowestK => "lowest-k",
    }
}

pub fn sorts_json(view: &StructureView, r: &SortRefinement) -> Vec<SortJson> {
    r.sorts
        .iter()
        .map(|s| SortJson {
            sigma: s.value.fraction(),
            subjects: s.signatures.iter().map(|&i| view.set(i).multiplicity).sum(),
            signatures: s
                .signatures
                .iter()
                .map(|&i| {
                    let set = view.set(i);
                    SignatureJson {
                        bits: set.bits.to_string(),
                        multiplicity: set.multiplicity,
                        sample: set.sample.clone(),
                    }
                })
                .collect(),
        })
        .collect()
}

/// One JSON object per probe, newline terminated. Wall times only when
/// `timings` is set.
pub fn json_lines(view: &StructureView, mode: &'static str, probes: &[Probe], timings: bool) -> String {
    let mut out = String::new();
    for p in probes {
        let j = ProbeJson {
            mode,
            k: p.k,
            theta: p.theta.to_string(),
            outcome: p.outcome.label(),
            wall_ms: if timings { p.elapsed.map(|d| d.as_secs_f64() * 1e3) } else { None },
            sorts: p.refinement.as_ref().map(|r| sorts_json(view, r)),
        };
        out.push_str(&serde_json::to_string(&j).expect("report serializes"));
        out.push('\n');
    }
    out
}

/// Per-sort membership and values.
pub fn refinement_dump(view: &StructureView, r: &SortRefinement) -> String {
    let mut out = String::new();
    for (i, s) in r.sorts.iter().enumerate() {
        let subjects: u64 = s.signatures.iter().map(|&j| view.set(j).multiplicity).sum();
        writeln!(out, "sort {} sigma={} signatures={} subjects={subjects}", i + 1, s.value, s.signatures.len())
            .unwrap();
        for &j in &s.signatures {
            let set = view.set(j);
            writeln!(out, "  {}\t{}\t{}", set.bits, set.multiplicity, set.sample).unwrap();
        }
    }
    out
}

/// The last feasible probe.
pub fn best_probe(probes: &[Probe]) -> Option<&Probe> {
    probes.iter().rev().find(|p| p.is_feasible())
}

pub fn summary(view: &StructureView, mode: &str, probes: &[Probe], timings: bool) -> String {
    let mut out = String::new();
    writeln!(out, "mode={mode}").unwrap();
    for p in probes {
        write!(
            out,
            "probe k={} theta={} ({}) {}",
            p.k,
            p.theta,
            sortref_core::threshold::format_decimal(p.theta.value(), 2),
            p.outcome.label()
        )
        .unwrap();
        if let (true, Some(d)) = (timings, p.elapsed) {
            write!(out, " {:.3}s", d.as_secs_f64()).unwrap();
        }
        out.push('\n');
    }
    match best_probe(probes) {
        Some(best) => {
            let r = best.refinement.as_ref().expect("feasible probe has a refinement");
            writeln!(out, "best k={} theta={} sorts={}", best.k, best.theta, r.k_used()).unwrap();
            out.push_str(&refinement_dump(view, r));
        }
        None => writeln!(out, "best none").unwrap(),
    }
    if probes.last().is_some_and(|p| p.outcome == Outcome::Unknown) {
        writeln!(out, "stopped on time limit").unwrap();
    }
    out
}
