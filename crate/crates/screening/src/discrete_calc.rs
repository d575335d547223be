//! Discrete calculus and discrete concave maximization on `{0, ..., b}`.
//!
//! A function is represented by its exact-rational tabulation. The forward
//! and backward differences play the role of derivatives; a strictly
//! discrete concave function has at most two global maximizers, and when
//! there are two they are adjacent. Everything here is table-driven and
//! exact; no floating point enters this module.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::{Error, Rat, Result};

/// An exact-rational function tabulated on `{0, ..., b}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TabulatedFn {
    values: Vec<Rat>,
}

/// Structural flags of a tabulation, produced by [`TabulatedFn::check_concavity`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcavityReport {
    /// `f(0) = 0`.
    pub zero_at_origin: bool,
    /// Backward difference strictly positive everywhere.
    pub increasing: bool,
    /// Second difference strictly negative on the interior.
    pub strictly_concave: bool,
    /// Second difference bounded below by -1 (concavity not "too strong").
    pub bounded_concavity: bool,
    /// No forward difference is an integer.
    pub no_integer_forward_diff: bool,
}

impl ConcavityReport {
    /// The basic shape requirements: zero at origin, strictly increasing,
    /// strictly discrete concave.
    pub fn basic(&self) -> bool {
        self.zero_at_origin && self.increasing && self.strictly_concave
    }
}

impl TabulatedFn {
    pub fn new(values: Vec<Rat>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Domain(
                "tabulation needs at least two points (b >= 1)".into(),
            ));
        }
        Ok(Self { values })
    }

    /// Tabulates `q -> linear*q + quad*q^2` on `{0, ..., b}`.
    pub fn from_quadratic(linear: &Rat, quad: &Rat, b: u64) -> Result<Self> {
        let values = (0..=b)
            .map(|q| {
                let q = Rat::from(BigInt::from(q));
                linear * &q + quad * &q * &q
            })
            .collect();
        Self::new(values)
    }

    /// Upper end of the domain.
    pub fn bound(&self) -> u64 {
        (self.values.len() - 1) as u64
    }

    pub fn eval(&self, q: u64) -> Result<&Rat> {
        self.values
            .get(q as usize)
            .ok_or_else(|| Error::Domain(format!("q={q} outside 0..={}", self.bound())))
    }

    /// Forward difference `f(q+1) - f(q)`, defined for `0 <= q <= b-1`.
    pub fn forward_diff(&self, q: u64) -> Result<Rat> {
        if q >= self.bound() {
            return Err(Error::Domain(format!(
                "forward difference undefined at q={q} (b={})",
                self.bound()
            )));
        }
        Ok(&self.values[q as usize + 1] - &self.values[q as usize])
    }

    /// Backward difference `f(q) - f(q-1)`, defined for `1 <= q <= b`.
    pub fn backward_diff(&self, q: u64) -> Result<Rat> {
        if q == 0 || q > self.bound() {
            return Err(Error::Domain(format!(
                "backward difference undefined at q={q} (b={})",
                self.bound()
            )));
        }
        Ok(&self.values[q as usize] - &self.values[q as usize - 1])
    }

    /// Mixed second difference `f(q+1) - 2f(q) + f(q-1)`, defined on the
    /// interior `1 <= q <= b-1`. Forward-of-backward and backward-of-forward
    /// agree, so there is a single entry point.
    pub fn second_diff(&self, q: u64) -> Result<Rat> {
        if q == 0 || q >= self.bound() {
            return Err(Error::Domain(format!(
                "second difference undefined at q={q} (b={})",
                self.bound()
            )));
        }
        let i = q as usize;
        Ok(&self.values[i + 1] - &self.values[i] - (&self.values[i] - &self.values[i - 1]))
    }

    /// Evaluates all structural flags by exhaustive scan.
    pub fn check_concavity(&self) -> ConcavityReport {
        let b = self.bound();
        let zero_at_origin = self.values[0].is_zero();
        let increasing = (1..=b).all(|q| self.backward_diff(q).unwrap().is_positive());
        let strictly_concave = (1..b).all(|q| self.second_diff(q).unwrap().is_negative());
        let neg_one = -Rat::one();
        let bounded_concavity = (1..b).all(|q| self.second_diff(q).unwrap() >= neg_one);
        let no_integer_forward_diff =
            (0..b).all(|q| !self.forward_diff(q).unwrap().is_integer());
        ConcavityReport {
            zero_at_origin,
            increasing,
            strictly_concave,
            bounded_concavity,
            no_integer_forward_diff,
        }
    }

    fn full_scan_argmax(&self) -> Vec<u64> {
        let mut best = &self.values[0];
        for v in &self.values[1..] {
            if v > best {
                best = v;
            }
        }
        (0..=self.bound())
            .filter(|&q| &self.values[q as usize] == best)
            .collect()
    }

    /// All global maximizers of a strictly discrete concave tabulation.
    ///
    /// Local maximizers are found via the one-sided first-order conditions
    /// and checked against the full-scan argmax; under strict concavity the
    /// result has one or two (adjacent) elements.
    pub fn maximize_concave(&self) -> Result<Vec<u64>> {
        if !self.check_concavity().strictly_concave {
            return Err(Error::Precondition(
                "maximize_concave requires strict discrete concavity".into(),
            ));
        }
        let b = self.bound();
        let zero = Rat::zero();
        let local: Vec<u64> = (0..=b)
            .filter(|&q| {
                let up_ok = q == b || self.forward_diff(q).unwrap() <= zero;
                let down_ok = q == 0 || self.backward_diff(q).unwrap() >= zero;
                up_ok && down_ok
            })
            .collect();
        let scan = self.full_scan_argmax();
        if local != scan {
            return Err(Error::Invariant(format!(
                "local maximizers {local:?} differ from full-scan argmax {scan:?}"
            )));
        }
        if local.is_empty() || local.len() > 2 {
            return Err(Error::Invariant(format!(
                "maximizer set {local:?} has unexpected size"
            )));
        }
        if local.len() == 2 && local[1] != local[0] + 1 {
            return Err(Error::Invariant(format!(
                "non-adjacent maximizers {local:?}"
            )));
        }
        Ok(local)
    }

    /// Solves the sandwich `forward_diff(q) <= c <= backward_diff(q)` over
    /// the domain, with one-sided conditions at the boundary. Equals the
    /// maximizer set of `q -> f(q) - c*q`.
    pub fn solve_foc(&self, c: &Rat) -> Result<Vec<u64>> {
        let report = self.check_concavity();
        if !report.strictly_concave {
            return Err(Error::Precondition(
                "solve_foc requires a strictly concave tabulation".into(),
            ));
        }
        if !c.is_positive() {
            return Err(Error::Precondition("solve_foc requires c > 0".into()));
        }
        let b = self.bound();
        let sandwich: Vec<u64> = (0..=b)
            .filter(|&q| {
                let up_ok = q == b || self.forward_diff(q).unwrap() <= *c;
                let down_ok = q == 0 || self.backward_diff(q).unwrap() >= *c;
                up_ok && down_ok
            })
            .collect();
        let shifted = TabulatedFn::new(
            (0..=b)
                .map(|q| &self.values[q as usize] - c * Rat::from(BigInt::from(q)))
                .collect(),
        )?;
        let via_max = shifted.maximize_concave()?;
        if sandwich != via_max {
            return Err(Error::Invariant(format!(
                "FOC set {sandwich:?} differs from shifted maximizer set {via_max:?}"
            )));
        }
        Ok(sandwich)
    }
}

/// Exact floor of a rational.
pub fn floor_rat(x: &Rat) -> BigInt {
    x.floor().to_integer()
}

/// Exact ceiling of a rational.
pub fn ceil_rat(x: &Rat) -> BigInt {
    x.ceil().to_integer()
}

/// The product identity for grid types: `ceil((j - 1/gamma) * n) = j*n`,
/// valid because `gamma > b >= n` keeps `n/gamma` inside `(0, 1)`.
pub fn ceil_type_product(j: u64, gamma: u64, n: u64) -> Result<u64> {
    if gamma <= n {
        return Err(Error::Precondition(format!(
            "ceil_type_product needs gamma > n (gamma={gamma}, n={n})"
        )));
    }
    if j == 0 {
        return Err(Error::Precondition("type index j must be >= 1".into()));
    }
    let kappa = Rat::from(BigInt::from(j)) - Rat::new(BigInt::one(), BigInt::from(gamma));
    let direct = ceil_rat(&(kappa * Rat::from(BigInt::from(n))));
    let product = j * n;
    if direct != BigInt::from(product) {
        return Err(Error::Invariant(format!(
            "ceiling product identity failed: ceil = {direct}, j*n = {product}"
        )));
    }
    Ok(product)
}
