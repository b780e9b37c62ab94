//! Standard-state chemical potentials.

/// `μ*(T, p) = c0 + c1 T + c2 T ln T + v0 p − ½ v0 κ p² + v0 ε T p`.
///
/// The temperature-only part (`p = 0`) serves as the standard potential
/// `μθ(T)` of a reacting ideal gas; the pressure terms give a liquid-like
/// molar volume `v0 (1 − κ p + ε T)` for solution components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StandardPotential {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    /// Molar volume scale.
    pub v0: f64,
    /// Compressibility.
    pub kappa: f64,
    /// Thermal expansion.
    pub eps: f64,
}

/// Value and first three derivatives of a function of one variable.
pub type Derivs3 = [f64; 4];

/// Value and derivatives of `μ*` in `(T, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialDerivs {
    pub value: f64,
    pub t: f64,
    pub p: f64,
    pub tt: f64,
    pub tp: f64,
    pub pp: f64,
}

impl StandardPotential {
    /// A potential with no pressure dependence.
    pub fn temperature_only(c0: f64, c1: f64, c2: f64) -> Self {
        Self {
            c0,
            c1,
            c2,
            ..Self::default()
        }
    }

    /// `μθ(T)` and its first three temperature derivatives. Requires `T > 0`.
    pub fn theta(&self, t: f64) -> Derivs3 {
        let ln_t = t.ln();
        [
            self.c0 + self.c1 * t + self.c2 * t * ln_t,
            self.c1 + self.c2 * (ln_t + 1.0),
            self.c2 / t,
            -self.c2 / (t * t),
        ]
    }

    pub fn at(&self, t: f64, p: f64) -> PotentialDerivs {
        let [value, d_t, tt, _] = self.theta(t);
        let v0 = self.v0;
        PotentialDerivs {
            value: value + v0 * p - 0.5 * v0 * self.kappa * p * p + v0 * self.eps * t * p,
            t: d_t + v0 * self.eps * p,
            p: v0 - v0 * self.kappa * p + v0 * self.eps * t,
            tt,
            tp: v0 * self.eps,
            pp: -v0 * self.kappa,
        }
    }
}
