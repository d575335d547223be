//! Exact-rational beliefs over types: log-concavity, likelihood ratios,
//! Mills ratios, virtual costs, and belief construction.
//!
//! Beliefs are indexed by order statistic, so `prob(1)` is the probability
//! of the highest cost type. Log-concavity is the single distributional
//! assumption everything else flows from: it yields monotone likelihood
//! ratios, a monotone Mills ratio, and strictly decreasing virtual costs.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::model::TypeSpace;
use crate::{Error, Rat, Result};

/// A full-support probability vector over the order statistics.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Belief {
    probs: Vec<Rat>,
}

impl Belief {
    pub fn new(probs: Vec<Rat>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Domain("belief needs at least one type".into()));
        }
        if probs.iter().any(|p| !p.is_positive()) {
            return Err(Error::Domain("belief must have full support".into()));
        }
        let total: Rat = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::Domain(format!("belief sums to {total}, not 1")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(m: usize) -> Self {
        let p = Rat::new(BigInt::one(), BigInt::from(m));
        Self { probs: vec![p; m] }
    }

    pub fn type_count(&self) -> usize {
        self.probs.len()
    }

    /// Probability of order statistic `i` (1-based).
    pub fn prob(&self, i: usize) -> &Rat {
        &self.probs[i - 1]
    }

    pub fn probs(&self) -> &[Rat] {
        &self.probs
    }

    /// `p^i * p^i >= p^(i+1) * p^(i-1)` for all interior `i`; vacuous for
    /// `m <= 2`.
    pub fn is_log_concave(&self) -> bool {
        let m = self.type_count();
        (2..m).all(|i| self.prob(i) * self.prob(i) >= self.prob(i + 1) * self.prob(i - 1))
    }

    /// Discrete Mills ratio `sum_{k > i} p^k / p^i`; zero at the top `i = m`.
    pub fn mills_ratio(&self, i: usize) -> Rat {
        let m = self.type_count();
        assert!(i >= 1 && i <= m, "index out of range");
        let tail: Rat = self.probs[i..].iter().sum();
        tail / self.prob(i)
    }

    /// Virtual cost `ceil(kappa^(i)) + mills_ratio(i)`.
    pub fn virtual_cost(&self, ts: &TypeSpace, i: usize) -> Result<Rat> {
        if self.type_count() as u64 != ts.type_count() {
            return Err(Error::Domain(format!(
                "belief over {} types used with a {}-type space",
                self.type_count(),
                ts.type_count()
            )));
        }
        Ok(Rat::from(BigInt::from(ts.ceil_kappa(i))) + self.mills_ratio(i))
    }

    /// Exhaustive check of `p^(i+k)/p^i >= p^(j+k)/p^j` for all `i < j`,
    /// `k >= 1`, `j + k <= m`.
    pub fn likelihood_ratio_monotone(&self) -> bool {
        let m = self.type_count();
        for i in 1..=m {
            for j in (i + 1)..=m {
                for k in 1..=(m - j) {
                    let lhs = self.prob(i + k) / self.prob(i);
                    let rhs = self.prob(j + k) / self.prob(j);
                    if lhs < rhs {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Inverts the Mills-ratio map: given strictly positive targets
    /// `r^1, ..., r^(m-1)`, builds the unique full-support belief whose
    /// Mills ratios reproduce them. Log-concavity is not forced; callers
    /// filter.
    pub fn from_mills(targets: &[Rat]) -> Result<Self> {
        if targets.iter().any(|r| !r.is_positive()) {
            return Err(Error::Domain("Mills targets must be strictly positive".into()));
        }
        let mut probs = Vec::with_capacity(targets.len() + 1);
        let mut tail = Rat::one(); // probability mass of types i..m
        for r in targets {
            let denom = Rat::one() + r;
            probs.push(&tail / &denom);
            tail = tail * r / denom;
        }
        probs.push(tail);
        Self::new(probs)
    }

    /// Finite perturbation family within L-infinity `radius` on the simplex.
    pub fn perturb(&self, radius: &Rat, strategy: PerturbStrategy) -> Result<Vec<Belief>> {
        if radius.is_negative() {
            return Err(Error::Domain("radius must be non-negative".into()));
        }
        if radius.is_zero() {
            return Ok(vec![self.clone()]);
        }
        match strategy {
            PerturbStrategy::CoordinatePairs => {
                let m = self.type_count();
                let mut out = Vec::new();
                for i in 0..m {
                    for j in 0..m {
                        if i == j {
                            continue;
                        }
                        let mut probs = self.probs.clone();
                        probs[i] += radius;
                        probs[j] -= radius;
                        if !probs[j].is_positive() {
                            return Err(Error::Domain(format!(
                                "radius {radius} destroys full support at index {}",
                                j + 1
                            )));
                        }
                        out.push(Belief::new(probs)?);
                    }
                }
                Ok(out)
            }
        }
    }

    /// Serialization form: canonical `"n/d"` strings.
    pub fn to_strings(&self) -> Vec<String> {
        self.probs.iter().map(crate::format_rat).collect()
    }

    pub fn from_strings(strings: &[String]) -> Result<Self> {
        let probs = strings
            .iter()
            .map(|s| crate::parse_rat(s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(probs)
    }
}

/// Direction families for [`Belief::perturb`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbStrategy {
    /// `p + radius*(e_i - e_j)` for every ordered pair `i != j`.
    CoordinatePairs,
}

/// All full-support beliefs with denominator `d`: vectors `k_i/d`,
/// `k_i >= 1`, summing to one. Deterministic lexicographic order.
pub fn belief_grid(m: usize, d: u64) -> Vec<Belief> {
    let mut out = Vec::new();
    let mut parts = Vec::with_capacity(m);
    compositions(m, d, &mut parts, &mut out);
    out
}

fn compositions(m: usize, remaining: u64, parts: &mut Vec<u64>, out: &mut Vec<Belief>) {
    if parts.len() == m - 1 {
        if remaining >= 1 {
            parts.push(remaining);
            let d: u64 = parts.iter().sum();
            let probs = parts
                .iter()
                .map(|&k| Rat::new(BigInt::from(k), BigInt::from(d)))
                .collect();
            out.push(Belief::new(probs).expect("grid belief is valid"));
            parts.pop();
        }
        return;
    }
    let slots_left = (m - parts.len() - 1) as u64;
    for k in 1..=(remaining.saturating_sub(slots_left)) {
        parts.push(k);
        compositions(m, remaining - k, parts, out);
        parts.pop();
    }
}

/// The log-concave sub-grid of [`belief_grid`].
pub fn log_concave_grid(m: usize, d: u64) -> Vec<Belief> {
    belief_grid(m, d)
        .into_iter()
        .filter(|p| p.is_log_concave())
        .collect()
}
