//! Shared configuration for numerical routines.

/// Tolerances, budgets and the RNG seed used by quadrature and Monte Carlo paths.
///
/// Every routine that samples or integrates takes one of these, so a run is
/// fully determined by (spec, arguments, config).
#[derive(Debug, Clone)]
pub struct QuadConfig {
    /// Relative tolerance for adaptive quadrature.
    pub rel_tol: f64,
    /// Absolute tolerance floor for adaptive quadrature.
    pub abs_tol: f64,
    /// Maximum number of integrand evaluations per top-level integral.
    pub max_evals: usize,
    /// Monte Carlo sample budget.
    pub mc_samples: usize,
    /// Seed for the deterministic counter-based generator.
    pub seed: u64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-7,
            abs_tol: 1e-12,
            max_evals: 20_000_000,
            mc_samples: 100_000,
            seed: 0,
        }
    }
}

impl QuadConfig {
    pub fn with_seed(seed: u64) -> Self {
        QuadConfig {
            seed,
            ..Self::default()
        }
    }

    pub fn rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn mc_samples(mut self, mc_samples: usize) -> Self {
        self.mc_samples = mc_samples;
        self
    }
}
