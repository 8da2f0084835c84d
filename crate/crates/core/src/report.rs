//! Solver output and its text/CSV renderings.

use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::detection;
use crate::error::Result;
use crate::model::{GameSpec, ReceiverRule, SignalDesign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Concept {
    Team,
    Stackelberg,
    Nash,
}

impl Concept {
    pub fn name(self) -> &'static str {
        match self {
            Concept::Team => "team",
            Concept::Stackelberg => "stackelberg",
            Concept::Nash => "nash",
        }
    }
}

impl std::str::FromStr for Concept {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "team" => Ok(Concept::Team),
            "stackelberg" => Ok(Concept::Stackelberg),
            "nash" => Ok(Concept::Nash),
            other => Err(format!("unknown concept `{other}`")),
        }
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Existence {
    Exists,
    /// Only the degenerate (babbling) equilibrium exists; no pair with
    /// `a != 0` survives mutual best responses.
    OnlyDegenerate,
    None,
}

impl Existence {
    pub fn name(self) -> &'static str {
        match self {
            Existence::Exists => "exists",
            Existence::OnlyDegenerate => "only-degenerate",
            Existence::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub concept: Concept,
    pub case_label: String,
    pub informative: bool,
    pub d_star: f64,
    pub d_max: f64,
    pub signals: SignalDesign,
    pub rule: ReceiverRule,
    pub risk_t: f64,
    pub risk_r: f64,
    pub existence: Existence,
    pub notes: Vec<String>,
}

impl EquilibriumReport {
    /// Fills in both risks from `(signals, rule)`.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn build(
        spec: &GameSpec,
        concept: Concept,
        case_label: impl Into<String>,
        d_star: f64,
        d_max: f64,
        signals: SignalDesign,
        rule: ReceiverRule,
        existence: Existence,
    ) -> Result<Self> {
        let (risk_t, risk_r) = detection::game_risks(&signals, &rule, spec)?;
        let informative = d_star > 0.0 && rule.is_threshold();
        Ok(EquilibriumReport {
            concept,
            case_label: case_label.into(),
            informative,
            d_star,
            d_max,
            signals,
            rule,
            risk_t,
            risk_r,
            existence,
            notes: Vec::new(),
        })
    }

    pub(crate) fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn csv_header() -> &'static str {
        "concept,case,informative,existence,d_star,d_max,s0,s1,rule,direction,threshold,risk_t,risk_r"
    }

    pub fn csv_row(&self) -> String {
        let (dir, eta) = match &self.rule {
            ReceiverRule::Threshold { direction, threshold } => (join(direction), fmt_f64(*threshold)),
            _ => (String::new(), String::new()),
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.concept,
            self.case_label,
            self.informative,
            self.existence.name(),
            fmt_f64(self.d_star),
            fmt_f64(self.d_max),
            join(&self.signals.s0),
            join(&self.signals.s1),
            self.rule.label(),
            dir,
            eta,
            fmt_f64(self.risk_t),
            fmt_f64(self.risk_r),
        )
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "concept      {}", self.concept);
        let _ = writeln!(s, "case         {}", self.case_label);
        let _ = writeln!(s, "informative  {}", self.informative);
        let _ = writeln!(s, "existence    {}", self.existence.name());
        let _ = writeln!(s, "d*           {:.6}", self.d_star);
        let _ = writeln!(s, "d_max        {:.6}", self.d_max);
        let _ = writeln!(s, "S0           {}", show_vec(&self.signals.s0));
        let _ = writeln!(s, "S1           {}", show_vec(&self.signals.s1));
        match &self.rule {
            ReceiverRule::Threshold { direction, threshold } => {
                let _ = writeln!(
                    s,
                    "rule         decide H1 iff a.y >= eta, a = {}, eta = {:.6}",
                    show_vec(direction),
                    threshold
                );
            }
            other => {
                let _ = writeln!(s, "rule         {}", other.label());
            }
        }
        let _ = writeln!(s, "risk_t       {:.6}", self.risk_t);
        let _ = writeln!(s, "risk_r       {:.6}", self.risk_r);
        for n in &self.notes {
            let _ = writeln!(s, "note         {n}");
        }
        s
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn join(v: &[f64]) -> String {
    v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(";")
}

fn show_vec(v: &[f64]) -> String {
    if let [x] = v {
        format!("{x:.6}")
    } else {
        let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
        format!("({})", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 0.4704, f64::MIN_POSITIVE, 123456.789e10] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn concept_parse() {
        assert_eq!("nash".parse::<Concept>().unwrap(), Concept::Nash);
        assert!("minimax".parse::<Concept>().is_err());
    }
}
