//! The verdict report and its JSON form.
//!
//! Floats are written with 17 significant digits; non-finite values are
//! written as the strings `"inf"`, `"-inf"` and `"nan"`.

use std::fmt::Write as _;

use super::intervals::CaseLabel;

#[derive(Clone, Debug, PartialEq)]
pub struct IntervalRecord {
    pub j: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub m_j: f64,
    pub case_label: CaseLabel,
    pub grad_sq_start: f64,
    pub grad_sq_end: f64,
    /// Case 1: the Gronwall bound at `t_end`. Case 2: `grad_sq_start`, the
    /// value the non-increase claim caps the interval at. Mixed: `grad_sq_end`.
    pub bound_value_at_end: f64,
    pub satisfied: bool,
    /// Smallest `ν − 2√c₁·m^{-1/2}‖∇u‖` over the interval's samples (Case 2).
    pub margin_min: Option<f64>,
    /// A checkpoint was available at `t_start`.
    pub verifiable: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WEnvelope {
    /// `1/(2c‖∇u₀‖⁴)`.
    pub valid_until: f64,
    /// `‖∇u(t)‖² ≤ W(t)` at every sample before `valid_until`.
    pub satisfied_within_window: bool,
    /// Total length of high-dominant intervals.
    pub case2_time: f64,
    /// `valid_until + case2_time`, the extension heuristic for time spent in
    /// decreasing intervals.
    pub extended_valid_until: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantsUsed {
    pub c1: f64,
    pub c1_mode: String,
    pub c2: f64,
    pub c_local: f64,
    pub hysteresis: f64,
    pub nu: f64,
    pub u0_l2_sq: f64,
    pub rng: Option<String>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub intervals: Vec<IntervalRecord>,
    pub energy_residual: f64,
    pub chain_failures: usize,
    pub w_envelope: WEnvelope,
    pub global_sup_grad_sq: f64,
    pub notes: Vec<String>,
    pub constants_used: ConstantsUsed,
}

/// JSON number with 17 significant digits, or a string for non-finite values.
pub fn json_f64(v: f64) -> String {
    if v.is_nan() {
        "\"nan\"".into()
    } else if v.is_infinite() {
        if v > 0.0 { "\"inf\"" } else { "\"-inf\"" }.into()
    } else {
        format!("{v:.16e}")
    }
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

struct Obj {
    fields: Vec<(&'static str, String)>,
}

impl Obj {
    fn new() -> Self {
        Self { fields: Vec::new() }
    }

    fn raw(mut self, key: &'static str, value: String) -> Self {
        self.fields.push((key, value));
        self
    }

    fn num(self, key: &'static str, v: f64) -> Self {
        self.raw(key, json_f64(v))
    }

    fn render(&self, indent: usize) -> String {
        if self.fields.is_empty() {
            return "{}".into();
        }
        let pad = "  ".repeat(indent + 1);
        let mut out = String::from("{\n");
        for (i, (k, v)) in self.fields.iter().enumerate() {
            let sep = if i + 1 < self.fields.len() { "," } else { "" };
            let _ = writeln!(out, "{pad}{}: {v}{sep}", json_str(k));
        }
        out.push_str(&"  ".repeat(indent));
        out.push('}');
        out
    }
}

fn array(items: Vec<String>, indent: usize) -> String {
    if items.is_empty() {
        return "[]".into();
    }
    let pad = "  ".repeat(indent + 1);
    let mut out = String::from("[\n");
    let len = items.len();
    for (i, item) in items.into_iter().enumerate() {
        let sep = if i + 1 < len { "," } else { "" };
        let _ = writeln!(out, "{pad}{item}{sep}");
    }
    out.push_str(&"  ".repeat(indent));
    out.push(']');
    out
}

impl IntervalRecord {
    fn to_obj(&self) -> Obj {
        Obj::new()
            .raw("j", self.j.to_string())
            .num("t_start", self.t_start)
            .num("t_end", self.t_end)
            .num("m_j", self.m_j)
            .raw("case_label", json_str(self.case_label.as_str()))
            .num("grad_sq_start", self.grad_sq_start)
            .num("grad_sq_end", self.grad_sq_end)
            .num("bound_value_at_end", self.bound_value_at_end)
            .raw("satisfied", self.satisfied.to_string())
            .raw("margin_min", self.margin_min.map_or("null".into(), json_f64))
            .raw("verifiable", self.verifiable.to_string())
    }
}

impl BoundReport {
    pub fn to_json(&self) -> String {
        let intervals = self.intervals.iter().map(|r| r.to_obj().render(2)).collect();
        let w = &self.w_envelope;
        let w_obj = Obj::new()
            .num("valid_until", w.valid_until)
            .raw("satisfied_within_window", w.satisfied_within_window.to_string())
            .num("case2_time", w.case2_time)
            .num("extended_valid_until", w.extended_valid_until);
        let c = &self.constants_used;
        let mut c_obj = Obj::new()
            .num("c1", c.c1)
            .raw("c1_mode", json_str(&c.c1_mode))
            .num("c2", c.c2)
            .num("c_local", c.c_local)
            .num("hysteresis", c.hysteresis)
            .num("nu", c.nu)
            .num("u0_l2_sq", c.u0_l2_sq);
        if let Some(rng) = &c.rng {
            c_obj = c_obj.raw("rng", json_str(rng));
        }
        if let Some(seed) = c.seed {
            c_obj = c_obj.raw("seed", seed.to_string());
        }
        let notes = self.notes.iter().map(|n| json_str(n)).collect();
        let mut out = Obj::new()
            .raw("intervals", array(intervals, 1))
            .num("energy_residual", self.energy_residual)
            .raw("chain_failures", self.chain_failures.to_string())
            .raw("w_envelope", w_obj.render(1))
            .num("global_sup_grad_sq", self.global_sup_grad_sq)
            .raw("notes", array(notes, 1))
            .raw("constants_used", c_obj.render(1))
            .render(0);
        out.push('\n');
        out
    }
}
