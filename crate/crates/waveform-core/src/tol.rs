//! Numerical tolerances shared by the constructors and checkers.

/// Tolerance knobs used throughout construction, gluing checks, and
/// verification. All fields must be strictly positive.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ToleranceConfig {
    /// Bracketing root refinement tolerance (in the abscissa).
    pub root_tol: f64,
    /// Absolute tolerance handed to adaptive quadrature.
    pub quad_abs_tol: f64,
    /// Relative tolerance for first-integral residual checks.
    pub invariant_rel_tol: f64,
    /// |c'| below this classifies a glue candidate as degenerate.
    pub degenerate_cprime_tol: f64,
    /// Maximum w-mismatch allowed across a glue point.
    pub glue_value_tol: f64,
    /// Monotone tables stop this close to an equilibrium; beyond it the
    /// exponential tail extension takes over.
    pub tail_cutoff_epsilon: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            root_tol: 1e-12,
            quad_abs_tol: 1e-10,
            invariant_rel_tol: 1e-6,
            degenerate_cprime_tol: 1e-8,
            glue_value_tol: 1e-9,
            tail_cutoff_epsilon: 1e-8,
        }
    }
}

impl ToleranceConfig {
    /// True if every tolerance is strictly positive.
    pub fn is_valid(&self) -> bool {
        self.root_tol > 0.0
            && self.quad_abs_tol > 0.0
            && self.invariant_rel_tol > 0.0
            && self.degenerate_cprime_tol > 0.0
            && self.glue_value_tol > 0.0
            && self.tail_cutoff_epsilon > 0.0
    }

    /// Override a tolerance by name. Returns false for unknown keys.
    pub fn set_by_key(&mut self, key: &str, value: f64) -> bool {
        match key {
            "root_tol" => self.root_tol = value,
            "quad_abs_tol" => self.quad_abs_tol = value,
            "invariant_rel_tol" => self.invariant_rel_tol = value,
            "degenerate_cprime_tol" => self.degenerate_cprime_tol = value,
            "glue_value_tol" => self.glue_value_tol = value,
            "tail_cutoff_epsilon" => self.tail_cutoff_epsilon = value,
            _ => return false,
        }
        true
    }
}
