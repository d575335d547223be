//! Core domain objects: the type grid, the principal's value function,
//! contracts, menus, and both players' payoffs.
//!
//! Types are indexed by descending order statistic: index 1 is the highest
//! marginal cost `m - 1/gamma`, index `m` the lowest `1 - 1/gamma`. The
//! non-integer grid is what breaks agent indifferences: for any type
//! `theta` and distinct quantities the payoff difference `theta * (q - q')`
//! is never an integer, so ties are impossible except between the outside
//! option and the null contract `(0, 0)`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::discrete_calc::{ceil_type_product, ConcavityReport, TabulatedFn};
use crate::{Error, Rat, Result};

/// The type grid `{1 - 1/gamma, ..., m - 1/gamma}` with `gamma > b > m >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TypeSpace {
    m: u64,
    gamma: u64,
    b: u64,
}

impl TypeSpace {
    pub fn new(m: u64, gamma: u64, b: u64) -> Result<Self> {
        // gamma = b is admitted (the denominator only needs to out-scale
        // every quantity difference that actually arises; exact ties are
        // detected dynamically in best_response either way).
        if !(m >= 1 && b > m && gamma >= b) {
            return Err(Error::Domain(format!(
                "type space requires gamma >= b > m >= 1, got gamma={gamma}, b={b}, m={m}"
            )));
        }
        Ok(Self { m, gamma, b })
    }

    pub fn type_count(&self) -> u64 {
        self.m
    }

    pub fn gamma(&self) -> u64 {
        self.gamma
    }

    pub fn bound(&self) -> u64 {
        self.b
    }

    /// The i-th highest cost, `kappa^(i) = (m - i + 1) - 1/gamma`, `i` 1-based.
    pub fn kappa(&self, i: usize) -> Rat {
        assert!(i >= 1 && i as u64 <= self.m, "type index out of range");
        Rat::from(BigInt::from(self.m - i as u64 + 1))
            - Rat::new(BigInt::one(), BigInt::from(self.gamma))
    }

    /// `ceil(kappa^(i)) = m - i + 1`, an integer.
    pub fn ceil_kappa(&self, i: usize) -> u64 {
        assert!(i >= 1 && i as u64 <= self.m, "type index out of range");
        self.m - i as u64 + 1
    }

    /// Order-statistic index of `theta`, or a domain error if `theta` is
    /// not on the grid.
    pub fn index_of(&self, theta: &Rat) -> Result<usize> {
        for i in 1..=self.m as usize {
            if &self.kappa(i) == theta {
                return Ok(i);
            }
        }
        Err(Error::Domain(format!("theta={theta} not in the type grid")))
    }

    /// `ceil(kappa^(i) * n) = ceil(kappa^(i)) * n` for any `n` in `D`.
    pub fn ceil_kappa_times(&self, i: usize, n: u64) -> Result<u64> {
        ceil_type_product(self.ceil_kappa(i), self.gamma, n)
    }

    /// Agent payoff `t - theta*q` for a contract, `0` for the outside option.
    pub fn agent_payoff(&self, choice: &Choice, theta: &Rat) -> Result<Rat> {
        self.index_of(theta)?;
        Ok(match choice {
            Choice::Outside => Rat::zero(),
            Choice::Take(c) => {
                Rat::from(BigInt::from(c.t)) - theta * Rat::from(BigInt::from(c.q))
            }
        })
    }

    /// The unique best response of type `theta` to menu `M` (against the
    /// added outside option). The only possible payoff tie is between the
    /// outside option and the null contract `(0, 0)`; it resolves to the
    /// outside option. Any other tie signals a broken invariant.
    pub fn best_response(&self, menu: &Menu, theta: &Rat) -> Result<Choice> {
        self.index_of(theta)?;
        let mut best = Choice::Outside;
        let mut best_payoff = Rat::zero();
        for c in menu.contracts() {
            if c.q == 0 && c.t == 0 {
                continue; // payoff 0, resolved in favor of the outside option
            }
            let payoff = self.agent_payoff(&Choice::Take(*c), theta)?;
            if payoff > best_payoff {
                best = Choice::Take(*c);
                best_payoff = payoff;
            } else if payoff == best_payoff {
                return Err(Error::Invariant(format!(
                    "agent tie at theta={theta} between {best:?} and {c:?}"
                )));
            }
        }
        Ok(best)
    }
}

/// The principal's valuation, validated to be zero at the origin and
/// strictly discrete concave. The remaining shape flags (increasing,
/// bounded concavity, no integer slope) are recorded and checked by the
/// operations that need them; requiring them globally would reject
/// valuations whose uptake region is a strict subset of the grid.
#[derive(Debug, Clone)]
pub struct ValueFunction {
    table: TabulatedFn,
    report: ConcavityReport,
}

impl ValueFunction {
    pub fn new(table: TabulatedFn) -> Result<Self> {
        let report = table.check_concavity();
        if !report.zero_at_origin || !report.strictly_concave {
            return Err(Error::Precondition(format!(
                "value function must be zero at origin and strictly discrete concave; \
                 report: {report:?}"
            )));
        }
        Ok(Self { table, report })
    }

    pub fn from_quadratic(linear: &Rat, quad: &Rat, b: u64) -> Result<Self> {
        Self::new(TabulatedFn::from_quadratic(linear, quad, b)?)
    }

    pub fn table(&self) -> &TabulatedFn {
        &self.table
    }

    pub fn report(&self) -> &ConcavityReport {
        &self.report
    }

    pub fn bound(&self) -> u64 {
        self.table.bound()
    }

    pub fn eval(&self, q: u64) -> Result<&Rat> {
        self.table.eval(q)
    }

    /// Principal payoff `v(q) - t` for a contract, `0` for the outside option.
    pub fn principal_payoff(&self, choice: &Choice) -> Result<Rat> {
        Ok(match choice {
            Choice::Outside => Rat::zero(),
            Choice::Take(c) => self.eval(c.q)? - Rat::from(BigInt::from(c.t)),
        })
    }
}

/// A quantity-transfer pair on the grid `D^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Contract {
    pub q: u64,
    pub t: u64,
}

impl Contract {
    pub fn new(q: u64, t: u64) -> Self {
        Self { q, t }
    }

    pub fn is_null(&self) -> bool {
        self.q == 0 && self.t == 0
    }
}

/// The agent's choice: a contract from the menu or the outside option.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    Take(Contract),
    Outside,
}

impl Choice {
    pub fn contract(&self) -> Option<&Contract> {
        match self {
            Choice::Take(c) => Some(c),
            Choice::Outside => None,
        }
    }
}

/// A non-empty set of contracts offered to the agent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Menu {
    contracts: BTreeSet<Contract>,
}

impl Menu {
    pub fn new(contracts: impl IntoIterator<Item = Contract>) -> Result<Self> {
        let contracts: BTreeSet<Contract> = contracts.into_iter().collect();
        if contracts.is_empty() {
            return Err(Error::Domain("a menu must be non-empty".into()));
        }
        Ok(Self { contracts })
    }

    pub fn contracts(&self) -> impl Iterator<Item = &Contract> {
        self.contracts.iter()
    }

    pub fn len(&self) -> usize {
        self.contracts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, c: &Contract) -> bool {
        self.contracts.contains(c)
    }

    pub fn is_superset(&self, other: &Menu) -> bool {
        self.contracts.is_superset(&other.contracts)
    }

    pub fn with(&self, extra: Contract) -> Menu {
        let mut contracts = self.contracts.clone();
        contracts.insert(extra);
        Menu { contracts }
    }
}

/// The per-type contract list `(q^i, t^i)`, ordered by order statistic.
/// Distinct types may hold identical contracts (bunching); the induced
/// menu is the set of distinct entries.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ContractAssignment {
    contracts: Vec<Contract>,
}

impl ContractAssignment {
    pub fn new(contracts: Vec<Contract>) -> Result<Self> {
        if contracts.is_empty() {
            return Err(Error::Domain("assignment must cover at least one type".into()));
        }
        Ok(Self { contracts })
    }

    pub fn type_count(&self) -> usize {
        self.contracts.len()
    }

    /// Contract for order statistic `i` (1-based).
    pub fn contract(&self, i: usize) -> &Contract {
        &self.contracts[i - 1]
    }

    pub fn contracts(&self) -> &[Contract] {
        &self.contracts
    }

    pub fn quantities(&self) -> Vec<u64> {
        self.contracts.iter().map(|c| c.q).collect()
    }

    pub fn transfers(&self) -> Vec<u64> {
        self.contracts.iter().map(|c| c.t).collect()
    }

    /// The menu induced by the assignment; bunching can collapse it below
    /// the number of types.
    pub fn induced_menu(&self) -> Menu {
        Menu::new(self.contracts.iter().copied()).expect("assignment is non-empty")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn theta3() -> TypeSpace {
        TypeSpace::new(3, 100, 100).unwrap()
    }

    #[test]
    fn type_grid_order_statistics() {
        let ts = theta3();
        assert_eq!(ts.kappa(1), rat(299, 100));
        assert_eq!(ts.kappa(2), rat(199, 100));
        assert_eq!(ts.kappa(3), rat(99, 100));
        assert_eq!(ts.ceil_kappa(1), 3);
        assert_eq!(ts.ceil_kappa(3), 1);
        // ceil(kappa) = kappa + 1/gamma
        for i in 1..=3 {
            assert_eq!(
                Rat::from(BigInt::from(ts.ceil_kappa(i))),
                ts.kappa(i) + rat(1, 100)
            );
        }
        assert!(TypeSpace::new(3, 100, 100).is_ok());
        assert!(TypeSpace::new(3, 100, 101).is_err()); // gamma <= b
        assert!(TypeSpace::new(3, 100, 3).is_err()); // b <= m
        assert!(TypeSpace::new(0, 100, 10).is_err());
    }

    #[test]
    fn ceil_kappa_product_identity() {
        let ts = theta3();
        for i in 1..=3 {
            for n in [0, 1, 45, 47, 99] {
                assert_eq!(ts.ceil_kappa_times(i, n).unwrap(), ts.ceil_kappa(i) * n);
            }
            // At n = gamma the ceiling identity genuinely breaks:
            // (j - 1/gamma) * gamma = j*gamma - 1 is already an integer.
            assert!(ts.ceil_kappa_times(i, 100).is_err());
        }
    }

    #[test]
    fn agent_payoff_examples() {
        let ts = theta3();
        let c = Choice::Take(Contract::new(45, 135));
        assert_eq!(ts.agent_payoff(&c, &rat(299, 100)).unwrap(), rat(45, 100));
        assert_eq!(ts.agent_payoff(&Choice::Outside, &rat(99, 100)).unwrap(), rat(0, 1));
        let c = Choice::Take(Contract::new(49, 141));
        assert_eq!(ts.agent_payoff(&c, &rat(99, 100)).unwrap(), rat(9249, 100));
        assert!(ts.agent_payoff(&Choice::Outside, &rat(1, 2)).is_err());
    }

    #[test]
    fn principal_payoff_examples() {
        let v = ValueFunction::from_quadratic(&rat(50, 1), &rat(-1, 2), 100).unwrap();
        let c = Choice::Take(Contract::new(49, 141));
        // v(49) - 141 = 1249.5 - 141
        assert_eq!(v.principal_payoff(&c).unwrap(), rat(2217, 2));
        assert_eq!(v.principal_payoff(&Choice::Outside).unwrap(), rat(0, 1));
        assert_eq!(
            v.principal_payoff(&Choice::Take(Contract::new(0, 0))).unwrap(),
            rat(0, 1)
        );
    }

    #[test]
    fn value_function_rejects_bad_shapes() {
        // Linear: not strictly concave.
        assert!(ValueFunction::from_quadratic(&rat(3, 1), &rat(0, 1), 10).is_err());
        // Steep quadratics stop increasing inside the grid but remain
        // valid; the flag is recorded for the operations that care.
        let v = ValueFunction::from_quadratic(&rat(253, 1), &rat(-5, 2), 100).unwrap();
        assert!(!v.report().increasing);
        assert!(ValueFunction::from_quadratic(&rat(253, 1), &rat(-5, 2), 50).unwrap()
            .report()
            .increasing);
        // Nonzero origin.
        use crate::discrete_calc::TabulatedFn;
        assert!(ValueFunction::new(
            TabulatedFn::new(vec![rat(1, 1), rat(2, 1), rat(5, 2)]).unwrap()
        )
        .is_err());
    }

    #[test]
    fn best_response_examples() {
        let ts = theta3();
        let menu = Menu::new([
            Contract::new(45, 135),
            Contract::new(47, 139),
            Contract::new(49, 141),
        ])
        .unwrap();
        assert_eq!(
            ts.best_response(&menu, &rat(299, 100)).unwrap(),
            Choice::Take(Contract::new(45, 135))
        );
        let single = Menu::new([Contract::new(10, 5)]).unwrap();
        assert_eq!(ts.best_response(&single, &rat(99, 100)).unwrap(), Choice::Outside);
        // The null contract resolves to the outside option.
        let null = Menu::new([Contract::new(0, 0)]).unwrap();
        for i in 1..=3 {
            assert_eq!(ts.best_response(&null, &ts.kappa(i)).unwrap(), Choice::Outside);
        }
    }

    #[test]
    fn no_tie_property_exhaustive_small_grid() {
        // theta*(q - q') is never an integer for 0 < |q - q'| <= b < gamma,
        // so distinct-quantity contracts never tie, and no q >= 1 contract
        // ties with the outside option.
        let ts = TypeSpace::new(3, 11, 10).unwrap();
        let b = ts.bound();
        for i in 1..=3 {
            let theta = ts.kappa(i);
            for q in 1..=b {
                for t in 0..=b {
                    let pay = ts
                        .agent_payoff(&Choice::Take(Contract::new(q, t)), &theta)
                        .unwrap();
                    assert!(!pay.is_zero(), "participation tie at q={q}, t={t}");
                    for q2 in 0..q {
                        for t2 in 0..=b {
                            let pay2 = ts
                                .agent_payoff(&Choice::Take(Contract::new(q2, t2)), &theta)
                                .unwrap();
                            assert_ne!(pay, pay2, "tie at ({q},{t}) vs ({q2},{t2})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn induced_menu_collapses_under_bunching() {
        let a = ContractAssignment::new(vec![
            Contract::new(50, 150),
            Contract::new(50, 150),
            Contract::new(50, 150),
        ])
        .unwrap();
        assert_eq!(a.type_count(), 3);
        assert_eq!(a.induced_menu().len(), 1);
    }
}
