//! Lemma entries and the report bundle.

use std::collections::BTreeMap;

use gpregime::numerics::SlopeFit;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::Stage;

pub const REPORT_SCHEMA: &str = "gpregime-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The producing stage is not in the pipeline.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaEntry {
    pub id: String,
    pub stage: Stage,
    pub description: String,
    pub status: Status,
    pub quantities: BTreeMap<String, Value>,
    pub slopes: BTreeMap<String, SlopeFit>,
    /// Named checks and whether each passed.
    pub checks: BTreeMap<String, bool>,
    pub thresholds: BTreeMap<String, f64>,
}

impl LemmaEntry {
    pub fn new(id: &str, stage: Stage, description: &str) -> Self {
        LemmaEntry {
            id: id.into(),
            stage,
            description: description.into(),
            status: Status::Skipped,
            quantities: BTreeMap::new(),
            slopes: BTreeMap::new(),
            checks: BTreeMap::new(),
            thresholds: BTreeMap::new(),
        }
    }

    pub fn quantity(&mut self, key: &str, v: impl Serialize) -> &mut Self {
        self.quantities
            .insert(key.into(), serde_json::to_value(v).unwrap_or(Value::Null));
        self
    }

    pub fn slope(&mut self, key: &str, fit: SlopeFit) -> &mut Self {
        self.checks.insert(format!("slope:{key}"), fit.pass);
        self.slopes.insert(key.into(), fit);
        self
    }

    pub fn check(&mut self, key: &str, ok: bool) -> &mut Self {
        self.checks.insert(key.into(), ok);
        self
    }

    pub fn threshold(&mut self, key: &str, v: f64) -> &mut Self {
        self.thresholds.insert(key.into(), v);
        self
    }

    /// Status from the recorded checks.
    pub fn finish(mut self) -> Self {
        self.status = if self.checks.values().all(|&c| c) {
            Status::Pass
        } else {
            Status::Fail
        };
        self
    }
}

/// Every entry a full pipeline emits, in report order.
pub const LEMMA_IDS: [(&str, Stage, &str); 20] = [
    ("a0", Stage::Scatter, "scattering length and 8π a0 = ∫Vf"),
    (
        "3.0.i",
        Stage::Scatter,
        "Neumann eigenvalue λ_ℓ ≈ 3a0/(Nℓ)³",
    ),
    ("3.0.ii", Stage::Scatter, "∫V f_ℓ − 8π a0 = O(a0/(Nℓ))"),
    (
        "3.0.iii",
        Stage::Scatter,
        "decay of w_ℓ and ∫w_ℓ ≈ (2/5)π a0 (Nℓ)²",
    ),
    ("3.0.iv", Stage::Scatter, "|ŵ_ℓ(p)| ≤ C/p²"),
    (
        "gp",
        Stage::Gp,
        "GP minimizer, Euler-Lagrange residual and ε_GP",
    ),
    (
        "gap",
        Stage::Gp,
        "simple zero eigenvalue of h_GP and positive gap",
    ),
    (
        "decay",
        Stage::Gp,
        "exponential decay of φ, φ', Δφ and polynomial decay of φ̂",
    ),
    ("2.2", Stage::Kernels, "‖η_H‖ ≤ Cℓ^{α/2} and ‖∇₁η_H‖ ≤ C√N"),
    (
        "2.4",
        Stage::Kernels,
        "‖ν_H‖ ≤ Cℓ^{α/2} and the norms of ǧ_L",
    ),
    (
        "bndpr",
        Stage::Kernels,
        "‖p_η‖, ‖r_η‖ ≤ Cℓ^α and the η^(n) power bound",
    ),
    (
        "4.2",
        Stage::Kernels,
        "gradient and Laplacian kernel bounds",
    ),
    ("4.3", Stage::Kernels, "cross-gradient kernel quantity"),
    ("hN", Stage::Kernels, "h_N and its large-N limit"),
    (
        "comm-b",
        Stage::Fock,
        "canonical and modified commutation relations",
    ),
    (
        "UNconjugation",
        Stage::Fock,
        "U_N partial isometry and conjugation relations",
    ),
    ("cLNj", Stage::Fock, "⟨ψ,H_Nψ⟩ = ⟨U_Nψ, L̃_N U_Nψ⟩"),
    ("2.3", Stage::Fock, "e^{−B}(𝒩+1)^n e^B ≤ C(𝒩+1)^n"),
    ("2.6", Stage::Fock, "e^{−tA}(𝒩+1)^k e^{tA} ≤ C(𝒩+1)^k"),
    ("defd", Stage::Fock, "d_η remainder scales like 1/N"),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReportBundle {
    pub schema: String,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical runs.
    pub generated_at: u64,
    pub seed: u64,
    pub pipeline: Vec<Stage>,
    pub entries: Vec<LemmaEntry>,
    pub pass: bool,
}

impl LemmaReportBundle {
    /// Assemble entries in canonical order; missing ids become skipped.
    pub fn assemble(seed: u64, pipeline: Vec<Stage>, mut produced: Vec<LemmaEntry>) -> Self {
        let entries: Vec<LemmaEntry> = LEMMA_IDS
            .iter()
            .map(
                |&(id, stage, desc)| match produced.iter().position(|e| e.id == id) {
                    Some(i) => produced.swap_remove(i),
                    None => LemmaEntry::new(id, stage, desc),
                },
            )
            .collect();
        let pass = entries.iter().all(|e| e.status != Status::Fail);
        let generated_at = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        LemmaReportBundle {
            schema: REPORT_SCHEMA.into(),
            generated_at,
            seed,
            pipeline,
            entries,
            pass,
        }
    }

    pub fn entry(&self, id: &str) -> Option<&LemmaEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    /// Serialized report with the timestamp zeroed.
    pub fn canonical_json(&self) -> String {
        let mut c = self.clone();
        c.generated_at = 0;
        serde_json::to_string_pretty(&c).expect("report serializes")
    }
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    id: &'a str,
    stage: &'a str,
    status: Status,
    failed_checks: String,
}

/// One CSV row per entry.
pub fn summary_csv(bundle: &LemmaReportBundle) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for e in &bundle.entries {
        let failed: Vec<&str> = e
            .checks
            .iter()
            .filter(|(_, &ok)| !ok)
            .map(|(k, _)| k.as_str())
            .collect();
        w.serialize(SummaryRow {
            id: &e.id,
            stage: e.stage.name(),
            status: e.status,
            failed_checks: failed.join(";"),
        })
        .expect("csv row");
    }
    String::from_utf8(w.into_inner().expect("csv flush")).expect("utf-8")
}

/// Serialize rows to CSV text.
pub fn to_csv<T: Serialize>(rows: &[T]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("csv row");
    }
    String::from_utf8(w.into_inner().expect("csv flush")).expect("utf-8")
}
