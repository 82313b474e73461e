use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::oracle::SetFunctionOracle;
use crate::scalar::Scalar;

/// Lower bound applied to every finite box half-width.
pub const EPSILON_FLOOR: f64 = 1e-8;

/// Rule for the box half-width at outer iteration `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonMode<T> {
    ConstDelta,
    DeltaOverT,
    DeltaOverSqrtT,
    Fixed(T),
    Infinite,
}

impl<T: Scalar> EpsilonMode<T> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, EpsilonMode::Infinite)
    }
}

impl<T: Scalar> fmt::Display for EpsilonMode<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsilonMode::ConstDelta => f.write_str("const-delta"),
            EpsilonMode::DeltaOverT => f.write_str("delta-over-t"),
            EpsilonMode::DeltaOverSqrtT => f.write_str("delta-over-sqrt-t"),
            EpsilonMode::Fixed(v) => write!(f, "fixed:{v}"),
            EpsilonMode::Infinite => f.write_str("infinite"),
        }
    }
}

impl<T: Scalar> FromStr for EpsilonMode<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "const-delta" | "const_delta" | "delta" => return Ok(EpsilonMode::ConstDelta),
            "delta-over-t" | "delta_over_t" => return Ok(EpsilonMode::DeltaOverT),
            "delta-over-sqrt-t" | "delta_over_sqrt_t" => return Ok(EpsilonMode::DeltaOverSqrtT),
            "infinite" | "inf" => return Ok(EpsilonMode::Infinite),
            _ => {}
        }
        if let Some(v) = s.strip_prefix("fixed:").or_else(|| s.strip_prefix("fixed=")) {
            let v: T = v.trim().parse().map_err(|_| Error::Config(format!("invalid fixed epsilon '{v}'")))?;
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::Config(format!("fixed epsilon must be positive and finite, got {v}")));
            }
            return Ok(EpsilonMode::Fixed(v));
        }
        Err(Error::Config(format!("unknown epsilon mode '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Bcd,
    AcceleratedBcd,
    Aar,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Bcd => "bcd",
            Algorithm::AcceleratedBcd => "acc",
            Algorithm::Aar => "aar",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "bcd" => Ok(Algorithm::Bcd),
            "acc" | "accelerated" | "accelerated-bcd" | "accelerated_bcd" => Ok(Algorithm::AcceleratedBcd),
            "aar" => Ok(Algorithm::Aar),
            other => Err(Error::Config(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// Extrapolation rule of the accelerated solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Momentum {
    /// `β = (t - 1) / (t + 2)`.
    #[default]
    Fista,
    /// `β = 0`: plain block coordinate ascent.
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    pub algorithm: Algorithm,
    pub epsilon_mode: EpsilonMode<T>,
    /// Multiplies `Δ` in the schedules; `None` means `1/√n`.
    pub proportionality: Option<T>,
    pub max_outer_iters: usize,
    /// Absolute stopping threshold on the discrete gap; `None` means
    /// `1e-6 (1 + |F(best)|)`.
    pub gap_tolerance: Option<T>,
    pub momentum: Momentum,
    /// Fill `wall_ms` in trace records. Off by default so traces are
    /// reproducible byte for byte.
    pub record_wall_time: bool,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        SolverConfig {
            algorithm: Algorithm::Bcd,
            epsilon_mode: EpsilonMode::ConstDelta,
            proportionality: None,
            max_outer_iters: 1000,
            gap_tolerance: None,
            momentum: Momentum::Fista,
            record_wall_time: false,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    /// Checks the configuration against a decomposition with `r` summands.
    pub fn validate(&self, r: usize) -> Result<()> {
        if r < 2 {
            return Err(Error::Config(format!("need at least 2 summands, got {r}")));
        }
        match self.algorithm {
            Algorithm::AcceleratedBcd if r != 2 => {
                return Err(Error::Config(format!("accelerated BCD needs exactly 2 summands, got {r}")));
            }
            Algorithm::Aar if r != 2 => {
                return Err(Error::Config(format!("AAR needs exactly 2 summands, got {r}")));
            }
            Algorithm::Aar if !self.epsilon_mode.is_infinite() => {
                return Err(Error::Config("AAR runs with an infinite box only".into()));
            }
            _ => {}
        }
        if let EpsilonMode::Fixed(v) = self.epsilon_mode {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::Config(format!("fixed epsilon must be positive and finite, got {v}")));
            }
        }
        if let Some(c) = self.proportionality {
            if !(c > T::zero()) || !c.is_finite() {
                return Err(Error::Config(format!("proportionality must be positive, got {c}")));
            }
        }
        if let Some(g) = self.gap_tolerance {
            if !(g >= T::zero()) || !g.is_finite() {
                return Err(Error::Config(format!("gap tolerance must be nonnegative, got {g}")));
            }
        }
        Ok(())
    }

    pub fn proportionality_for(&self, n: usize) -> T {
        self.proportionality.unwrap_or_else(|| T::one() / T::from_usize_lossy(n.max(1)).sqrt())
    }
}

pub(crate) fn diameter_squared<T: Scalar, F: SetFunctionOracle<T> + ?Sized>(f: &F) -> T {
    f.boundary_terms().into_iter().map(|x| x * x).sum()
}

/// `Δ_i = sqrt(Σ_j [F({j}) + F(V∖{j}) - F(V)]²)`.
pub fn diameter<T: Scalar, F: SetFunctionOracle<T> + ?Sized>(f: &F) -> T {
    diameter_squared(f).sqrt()
}

/// Box half-width for outer iteration `t ≥ 1`; infinite for
/// [`EpsilonMode::Infinite`].
pub fn epsilon_schedule<T: Scalar>(mode: EpsilonMode<T>, delta: T, t: usize, proportionality: T) -> T {
    let t = T::from_usize_lossy(t.max(1));
    let eps = match mode {
        EpsilonMode::ConstDelta => proportionality * delta,
        EpsilonMode::DeltaOverT => proportionality * delta / t,
        EpsilonMode::DeltaOverSqrtT => proportionality * delta / t.sqrt(),
        EpsilonMode::Fixed(v) => v,
        EpsilonMode::Infinite => return T::infinity(),
    };
    eps.max(T::lit(EPSILON_FLOOR))
}

/// Gap guaranteed for the best suplevel set of a primal point that is
/// `eta_c`-suboptimal: `η_C/(4ε) + sqrt(η_C n / 2)`.
pub fn eta_d_bound<T: Scalar>(eta_c: T, epsilon: T, n: usize) -> T {
    let eta_c = eta_c.max(T::zero());
    let first = if epsilon.is_infinite() { T::zero() } else { eta_c / (T::lit(4.0) * epsilon) };
    first + (eta_c * T::from_usize_lossy(n) / T::lit(2.0)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cut::CutFunction;

    #[test]
    fn diameters() {
        let chain2: CutFunction<f64> = CutFunction::chain(&[1.0]);
        assert_eq!(diameter_squared(&chain2), 8.0);
        let m = CutFunction::modular(vec![0.3, -2.0, 1.0]).unwrap();
        assert_eq!(diameter(&m), 0.0);
        let two = CutFunction::undirected(4, &[(0, 1, 1.0), (2, 3, 1.0)], vec![0.0; 4]).unwrap();
        assert_eq!(diameter_squared(&two), 16.0);
    }

    #[test]
    fn boundary_terms_match_generic_definition() {
        let f = CutFunction::new(
            4,
            vec![
                crate::cut::Arc { from: 0, to: 1, capacity: 0.5 },
                crate::cut::Arc { from: 2, to: 1, capacity: 1.5 },
                crate::cut::Arc { from: 3, to: 0, capacity: 2.0 },
            ],
            vec![0.1, -0.2, 0.0, 0.3],
        )
        .unwrap();
        let fast = f.boundary_terms();
        let d =
            crate::prox::restrict_contract(&f, &crate::set::Subset::empty(4), &crate::set::Subset::full(4)).unwrap();
        // the default implementation, reached through a wrapper that does not override it
        struct Plain<'a>(&'a CutFunction<f64>);
        impl SetFunctionOracle<f64> for Plain<'_> {
            fn ground_size(&self) -> usize {
                self.0.ground_size()
            }
            fn eval(&self, s: &crate::set::Subset) -> f64 {
                self.0.eval(s)
            }
            fn minimize(&self, u: &[f64]) -> Result<crate::oracle::DiscreteMinimum<f64>> {
                self.0.minimize(u)
            }
            fn restrict(&self, _a: &crate::set::Subset, _d: &crate::set::Subset) -> Result<Self> {
                unimplemented!()
            }
        }
        let slow = Plain(&f).boundary_terms();
        for j in 0..4 {
            assert!((fast[j] - slow[j]).abs() < 1e-12);
        }
        assert_eq!(d.boundary_terms(), fast);
    }

    #[test]
    fn schedules() {
        assert_eq!(epsilon_schedule(EpsilonMode::DeltaOverT, 2.0, 4, 1.0), 0.5);
        assert!((epsilon_schedule(EpsilonMode::ConstDelta, 2.0, 17, 0.1) - 0.2f64).abs() < 1e-15);
        assert_eq!(epsilon_schedule(EpsilonMode::DeltaOverSqrtT, 2.0, 4, 1.0), 1.0);
        assert_eq!(epsilon_schedule(EpsilonMode::ConstDelta, 0.0, 1, 1.0), 1e-8);
        assert_eq!(epsilon_schedule(EpsilonMode::Fixed(0.25), 5.0, 9, 1.0), 0.25);
        assert!(epsilon_schedule::<f64>(EpsilonMode::Infinite, 5.0, 9, 1.0).is_infinite());
    }

    #[test]
    fn eta_d_examples() {
        assert_eq!(eta_d_bound(0.0, 0.25, 2), 0.0);
        assert!((eta_d_bound(0.01, 0.25, 2) - 0.11f64).abs() < 1e-12);
        assert!((eta_d_bound(0.08, 0.1, 100) - 2.2f64).abs() < 1e-12);
    }

    #[test]
    fn parse_modes() {
        assert_eq!("fixed:0.25".parse::<EpsilonMode<f64>>().unwrap(), EpsilonMode::Fixed(0.25));
        assert_eq!("delta-over-sqrt-t".parse::<EpsilonMode<f64>>().unwrap(), EpsilonMode::DeltaOverSqrtT);
        assert!("fixed:-1".parse::<EpsilonMode<f64>>().is_err());
        assert!("sometimes".parse::<EpsilonMode<f64>>().is_err());
        for m in [EpsilonMode::ConstDelta, EpsilonMode::DeltaOverT, EpsilonMode::Infinite, EpsilonMode::Fixed(0.5)] {
            assert_eq!(m.to_string().parse::<EpsilonMode<f64>>().unwrap(), m);
        }
        assert_eq!("acc".parse::<Algorithm>().unwrap(), Algorithm::AcceleratedBcd);
    }

    #[test]
    fn validation() {
        let mut cfg = SolverConfig::<f64> { algorithm: Algorithm::Aar, ..Default::default() };
        assert!(cfg.validate(2).is_err());
        cfg.epsilon_mode = EpsilonMode::Infinite;
        assert!(cfg.validate(2).is_ok());
        assert!(cfg.validate(3).is_err());
        cfg.algorithm = Algorithm::AcceleratedBcd;
        assert!(cfg.validate(3).is_err());
        cfg.algorithm = Algorithm::Bcd;
        assert!(cfg.validate(3).is_ok());
        cfg.proportionality = Some(0.0);
        assert!(cfg.validate(3).is_err());
    }
}
