//! Structured analysis reports: a stable machine-readable schema plus a
//! deterministic text rendering.
//!
//! Every numeric claim in a report is recomputable from the input field and
//! the recorded options. The input digest is a SHA-256 of the canonicalized
//! field text, so cosmetic edits to a field file do not change its identity.

use crate::analysis::{FixedPointSet, StabilityVerdict};
use crate::equivalence::EquivalenceVerdict;
use crate::expr::C1Report;
use crate::norms::NormCertificate;
use crate::perturb::{InequivalenceEvidence, Perturbation};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Default)]
pub struct RobustnessCertificate {
    pub radius: f64,
    pub eps0: f64,
    pub eps1: f64,
    pub delta: f64,
}

impl RobustnessCertificate {
    /// Extracts the certificate a stable verdict carries.
    pub fn from_verdict(v: &StabilityVerdict) -> Option<Self> {
        match (v.robustness_radius, v.margins) {
            (Some(radius), Some(m)) => Some(RobustnessCertificate {
                radius,
                eps0: m.eps0,
                eps1: m.eps1,
                delta: m.delta,
            }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct Certificates {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm: Option<NormCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub robustness: Option<RobustnessCertificate>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PerturbationReport {
    pub mode: String,
    #[serde(flatten)]
    pub perturbation: Perturbation,
    pub measured_distance: f64,
    pub output_text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<InequivalenceEvidence>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    #[serde(flatten)]
    pub verdict: EquivalenceVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub breakpoints: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub input_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1_report: Option<C1Report>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_point_set: Option<FixedPointSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<StabilityVerdict>,
    pub certificates: Certificates,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equivalence: Option<EquivalenceReport>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(tool_version: &str, command: String, input_digest: String) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool_version: tool_version.to_string(),
            command,
            input_digest,
            c1_report: None,
            fixed_point_set: None,
            verdict: None,
            certificates: Certificates::default(),
            perturbation: None,
            equivalence: None,
            warnings: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(format!("tool_version: {}", self.tool_version));
        line(format!("command: {}", self.command));
        line(format!("input_digest: {}", self.input_digest));
        if let Some(c1) = &self.c1_report {
            line(format!(
                "c1: {} (seam value gap {:.3e}, seam slope gap {:.3e})",
                if c1.overall { "pass" } else { "FAIL" },
                c1.periodic_value_gap,
                c1.periodic_deriv_gap,
            ));
            for b in &c1.breakpoint_checks {
                line(format!(
                    "  breakpoint {:.9}: left {:.6}, right {:.6} -> {}",
                    b.location,
                    b.left_slope,
                    b.right_slope,
                    if b.pass { "pass" } else { "FAIL" }
                ));
            }
        }
        if let Some(set) = &self.fixed_point_set {
            if set.whole_circle_zero {
                line("fixed points: the whole circle".to_string());
            } else {
                line(format!(
                    "fixed points: {} isolated, {} interval(s), accumulation: {}",
                    set.isolated.len(),
                    set.zero_intervals.len(),
                    if set.accumulation.is_some() {
                        "yes"
                    } else {
                        "no"
                    }
                ));
                for p in &set.isolated {
                    line(format!(
                        "  {:.12}  {:?}  f' = {:.9}",
                        p.location.position(),
                        p.kind,
                        p.f_prime
                    ));
                }
                for arc in &set.zero_intervals {
                    line(format!(
                        "  zero interval [{:.9}, {:.9}]",
                        arc.start.position(),
                        arc.end.position()
                    ));
                }
                if let Some(acc) = &set.accumulation {
                    line(format!(
                        "  accumulation near {:.9} ({} zeros folded, arc [{:.6}, {:.6}])",
                        acc.limit.position(),
                        acc.count_in_probe,
                        acc.arc.start.position(),
                        acc.arc.end.position()
                    ));
                }
            }
        }
        if let Some(v) = &self.verdict {
            line(format!(
                "verdict: {} ({:?})",
                if v.stable { "stable" } else { "UNSTABLE" },
                v.diagnosis
            ));
        }
        if let Some(r) = &self.certificates.robustness {
            line(format!(
                "robustness radius: {:.9} (eps0 {:.9}, eps1 {:.9}, delta {:.9})",
                r.radius, r.eps0, r.eps1, r.delta
            ));
        }
        if let Some(nc) = &self.certificates.norm {
            line(format!(
                "norm certificate: value {:.9} = sup|f| {:.9} + sup|f'| {:.9} (grid {}, refined: {})",
                nc.value, nc.sup_f, nc.sup_fprime, nc.grid_size, nc.refined
            ));
            for note in &nc.notes {
                line(format!("  note: {note}"));
            }
        }
        if let Some(p) = &self.perturbation {
            line(format!(
                "perturbation: {} via {:?}, sigma {:.9e}, support {}, measured norm {:.9e}",
                p.mode,
                p.perturbation.recipe,
                p.perturbation.sigma,
                p.perturbation.support,
                p.perturbation.measured_norm
            ));
            line(format!("  measured distance: {:.9e}", p.measured_distance));
            line(format!("  output: {}", p.output_text));
            if let Some(ev) = &p.evidence {
                line(format!("  inequivalence: {}", ev.reason));
            }
        }
        if let Some(eq) = &self.equivalence {
            line(format!(
                "equivalence: {} (zero sets matched: {}, sign conditions: {}, orientation: {:?})",
                if eq.verdict.equivalent {
                    "equivalent"
                } else {
                    "NOT equivalent"
                },
                eq.verdict.zero_set_matched,
                eq.verdict.sign_conditions_ok,
                eq.verdict.orientation
            ));
            if let Some(detail) = &eq.verdict.failure_detail {
                line(format!("  detail: {detail}"));
            }
            if let Some(bps) = &eq.breakpoints {
                for (x, y) in bps {
                    line(format!("  {x} {y}"));
                }
            }
        }
        if self.warnings.is_empty() {
            line("warnings: none".to_string());
        } else {
            line("warnings:".to_string());
            for w in &self.warnings {
                line(format!("  - {w}"));
            }
        }
        out
    }
}

/// SHA-256 of the canonical field text, as lowercase hex.
pub fn input_digest(canonical_text: &str) -> String {
    let bytes = Sha256::digest(canonical_text.as_bytes());
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
