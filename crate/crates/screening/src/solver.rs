//! The screening solver: per-type optimal quantity sets via the combined
//! first-order conditions, round-up transfers, constraint verification,
//! monotonicity and uniqueness certificates, and menu enumeration.
//!
//! The combined F.O.C. for type `i` sandwiches the virtual cost between
//! the forward and backward differences of the value function:
//! `forward_diff(q) <= phi^i <= backward_diff(q)`. Transfers then follow
//! from the binding local constraints, `t^i = ceil(kappa^(i)) q^i +
//! sum_{j<i} q^j`, which carries a strict round-up rent of `q^i / gamma`
//! on top of the information rent.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::beliefs::Belief;
use crate::model::{Contract, ContractAssignment, Menu, TypeSpace, ValueFunction};
use crate::{format_rat, Error, Rat, Result};

/// Status of a single IC or PC constraint under exact evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintStatus {
    Strict,
    Equality,
    Violated,
}

/// Exact evaluation of all `m^2` incentive constraints and `m`
/// participation constraints of an assignment.
#[derive(Debug, Clone)]
pub struct ConstraintReport {
    /// `ic[i-1][j-1]` is the status of IC_{i,j}. Diagonal entries hold
    /// with equality by construction.
    pub ic: Vec<Vec<ConstraintStatus>>,
    /// `pc[i-1]` is the status of PC_i.
    pub pc: Vec<ConstraintStatus>,
}

impl ConstraintReport {
    pub fn all_hold(&self) -> bool {
        self.ic
            .iter()
            .flatten()
            .chain(self.pc.iter())
            .all(|s| *s != ConstraintStatus::Violated)
    }

    /// All off-diagonal ICs strict and every PC strict except possibly at
    /// the null contract.
    pub fn all_strict(&self, a: &ContractAssignment) -> bool {
        let m = self.pc.len();
        for i in 1..=m {
            for j in 1..=m {
                if i != j && self.ic[i - 1][j - 1] != ConstraintStatus::Strict {
                    return false;
                }
            }
            let null = a.contract(i).is_null();
            match self.pc[i - 1] {
                ConstraintStatus::Strict => {}
                ConstraintStatus::Equality if null => {}
                _ => return false,
            }
        }
        true
    }
}

/// Weak/strict monotonicity of per-type quantity sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonotonicityReport {
    /// `min Q^(i+1) >= max Q^i` for all `i`.
    pub weak: bool,
    /// `min Q^(i+1) > max Q^i` for all `i`.
    pub strict: bool,
}

/// Full output of [`solve`].
#[derive(Debug, Clone)]
pub struct Solution {
    /// `Q^i(p)` per order statistic; each set has one or two adjacent
    /// elements.
    pub quantity_sets: Vec<Vec<u64>>,
    /// Every assignment formed by one quantity per type plus formula
    /// transfers, in lexicographic quantity order.
    pub assignments: Vec<ContractAssignment>,
    /// True iff every `Q^i` is a singleton.
    pub unique: bool,
    /// Indices `i` (1-based) whose `Q^i` is a doubleton.
    pub nonunique_types: Vec<usize>,
    pub monotonicity: MonotonicityReport,
    /// Per assignment: the induced menu collapsed below `m` contracts
    /// (bunching).
    pub collapsed: Vec<bool>,
    /// Per assignment: expected principal payoff, computed from the
    /// explicit contracts and cross-checked against the reduced objective.
    pub expected_payoffs: Vec<Rat>,
}

/// Per-type optimal quantity sets `Q^i(p)` from the combined F.O.C.s.
///
/// Requires the basic value-function shape and a full-support log-concave
/// belief. The top type's set depends only on `ceil(kappa^(m))` (no
/// distortion at the top).
pub fn optimal_quantities(
    v: &ValueFunction,
    ts: &TypeSpace,
    p: &Belief,
) -> Result<Vec<Vec<u64>>> {
    if !p.is_log_concave() {
        return Err(Error::Precondition("belief must be log-concave".into()));
    }
    (1..=ts.type_count() as usize)
        .map(|i| v.table().solve_foc(&p.virtual_cost(ts, i)?))
        .collect()
}

/// Formula transfers for a per-type quantity vector: the closed form
/// `t^i = ceil(kappa^(i)) q^i + sum_{j<i} q^j` and its recursive form are
/// both computed and must agree. Transfers are reported even when they
/// exceed the grid bound — see [`capacity_check`] for callers that need
/// contracts confined to `D x D`.
pub fn transfers(quantities: &[u64], ts: &TypeSpace) -> Result<Vec<u64>> {
    if quantities.len() as u64 != ts.type_count() {
        return Err(Error::Domain("one quantity per type required".into()));
    }
    if let Some(&q) = quantities.iter().find(|&&q| q > ts.bound()) {
        return Err(Error::Domain(format!("quantity {q} outside the grid")));
    }
    let mut closed = Vec::with_capacity(quantities.len());
    let mut prefix: u64 = 0;
    for (idx, &q) in quantities.iter().enumerate() {
        let i = idx + 1;
        closed.push(ts.ceil_kappa(i) * q + prefix);
        prefix += q;
    }
    // Recursive form: t^1 = ceil(kappa^(1)) q^1, then
    // t^i = t^(i-1) + ceil(kappa^(i)) (q^i - q^(i-1)).
    let mut recursive: Vec<i128> = vec![(ts.ceil_kappa(1) * quantities[0]) as i128];
    for idx in 1..quantities.len() {
        let i = idx + 1;
        let prev = recursive[idx - 1];
        let dq = quantities[idx] as i128 - quantities[idx - 1] as i128;
        recursive.push(prev + ts.ceil_kappa(i) as i128 * dq);
    }
    for (idx, (&c, &r)) in closed.iter().zip(recursive.iter()).enumerate() {
        if c as i128 != r {
            return Err(Error::Invariant(format!(
                "transfer forms disagree at type {}: closed {c}, recursive {r}",
                idx + 1
            )));
        }
    }
    Ok(closed)
}

/// Errors if any transfer falls outside the grid `{0, ..., b}`. Split off
/// from [`transfers`] because the closed form routinely lands above `b`
/// on small grids, which only matters to consumers that must stay inside
/// `D x D` (the brute-force oracle, strict batch runs).
pub fn capacity_check(transfers: &[u64], ts: &TypeSpace) -> Result<()> {
    for (idx, &t) in transfers.iter().enumerate() {
        if t > ts.bound() {
            return Err(Error::Capacity {
                type_index: idx + 1,
                transfer: t,
                bound: ts.bound(),
            });
        }
    }
    Ok(())
}

/// Exact evaluation of every IC and PC constraint.
pub fn verify_constraints(a: &ContractAssignment, ts: &TypeSpace) -> Result<ConstraintReport> {
    let m = a.type_count();
    if m as u64 != ts.type_count() {
        return Err(Error::Domain("assignment/type-space size mismatch".into()));
    }
    let own: Vec<Rat> = (1..=m)
        .map(|i| agent_utility(a.contract(i), &ts.kappa(i)))
        .collect();
    let status = |diff: &Rat| {
        if diff.is_zero() {
            ConstraintStatus::Equality
        } else if diff > &Rat::zero() {
            ConstraintStatus::Strict
        } else {
            ConstraintStatus::Violated
        }
    };
    let ic = (1..=m)
        .map(|i| {
            (1..=m)
                .map(|j| {
                    let other = agent_utility(a.contract(j), &ts.kappa(i));
                    status(&(&own[i - 1] - &other))
                })
                .collect()
        })
        .collect();
    let pc = own.iter().map(status).collect();
    Ok(ConstraintReport { ic, pc })
}

fn agent_utility(c: &Contract, theta: &Rat) -> Rat {
    Rat::from(BigInt::from(c.t)) - theta * Rat::from(BigInt::from(c.q))
}

/// Rent of type `i` in a formula-transfer assignment:
/// `q^i / gamma + sum_{j<i} q^j`.
pub fn agent_rent(a: &ContractAssignment, ts: &TypeSpace, i: usize) -> Rat {
    let prefix: u64 = (1..i).map(|j| a.contract(j).q).sum();
    Rat::new(BigInt::from(a.contract(i).q), BigInt::from(ts.gamma()))
        + Rat::from(BigInt::from(prefix))
}

/// Uniqueness of the optimal assignment, with the indices at the FOC
/// boundary as certificate.
pub fn is_unique(v: &ValueFunction, ts: &TypeSpace, p: &Belief) -> Result<(bool, Vec<usize>)> {
    let sets = optimal_quantities(v, ts, p)?;
    let certificate: Vec<usize> = sets
        .iter()
        .enumerate()
        .filter(|(_, s)| s.len() > 1)
        .map(|(idx, _)| idx + 1)
        .collect();
    Ok((certificate.is_empty(), certificate))
}

pub fn monotonicity_report(quantity_sets: &[Vec<u64>]) -> MonotonicityReport {
    let weak = quantity_sets
        .windows(2)
        .all(|w| w[1].iter().min() >= w[0].iter().max());
    let strict = quantity_sets
        .windows(2)
        .all(|w| w[1].iter().min() > w[0].iter().max());
    MonotonicityReport { weak, strict }
}

/// Expected principal payoff of an explicit assignment under `p`.
pub fn expected_principal_payoff(
    v: &ValueFunction,
    a: &ContractAssignment,
    p: &Belief,
) -> Result<Rat> {
    let mut total = Rat::zero();
    for i in 1..=a.type_count() {
        let c = a.contract(i);
        total += p.prob(i) * (v.eval(c.q)? - Rat::from(BigInt::from(c.t)));
    }
    Ok(total)
}

/// The reduced objective `sum_i p^i (v(q^i) - phi^i q^i)`; must coincide
/// with [`expected_principal_payoff`] on formula-transfer assignments.
pub fn reduced_objective(
    v: &ValueFunction,
    ts: &TypeSpace,
    p: &Belief,
    quantities: &[u64],
) -> Result<Rat> {
    let mut total = Rat::zero();
    for (idx, &q) in quantities.iter().enumerate() {
        let i = idx + 1;
        let phi = p.virtual_cost(ts, i)?;
        total += p.prob(i) * (v.eval(q)? - phi * Rat::from(BigInt::from(q)));
    }
    Ok(total)
}

/// Solves the full screening problem: quantity sets, all optimal
/// assignments with formula transfers, constraint verification, payoff
/// cross-check, uniqueness and monotonicity certificates.
pub fn solve(v: &ValueFunction, ts: &TypeSpace, p: &Belief) -> Result<Solution> {
    let quantity_sets = optimal_quantities(v, ts, p)?;
    let (unique, nonunique_types) = {
        let cert: Vec<usize> = quantity_sets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.len() > 1)
            .map(|(idx, _)| idx + 1)
            .collect();
        (cert.is_empty(), cert)
    };
    let monotonicity = monotonicity_report(&quantity_sets);

    let mut assignments = Vec::new();
    let mut collapsed = Vec::new();
    let mut expected_payoffs = Vec::new();
    for quantities in cartesian(&quantity_sets) {
        let ts_transfers = transfers(&quantities, ts)?;
        let contracts = quantities
            .iter()
            .zip(&ts_transfers)
            .map(|(&q, &t)| Contract::new(q, t))
            .collect();
        let a = ContractAssignment::new(contracts)?;
        let report = verify_constraints(&a, ts)?;
        if !report.all_hold() {
            return Err(Error::Invariant(
                "solved assignment violates an IC/PC constraint".into(),
            ));
        }
        let payoff = expected_principal_payoff(v, &a, p)?;
        let reduced = reduced_objective(v, ts, p, &quantities)?;
        if payoff != reduced {
            return Err(Error::Invariant(format!(
                "explicit payoff {payoff} disagrees with reduced objective {reduced}"
            )));
        }
        collapsed.push(a.induced_menu().len() < a.type_count());
        expected_payoffs.push(payoff);
        assignments.push(a);
    }
    Ok(Solution {
        quantity_sets,
        assignments,
        unique,
        nonunique_types,
        monotonicity,
        collapsed,
        expected_payoffs,
    })
}

fn cartesian(sets: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let mut acc: Vec<Vec<u64>> = vec![vec![]];
    for set in sets {
        let mut next = Vec::with_capacity(acc.len() * set.len());
        for prefix in &acc {
            for &q in set {
                let mut row = prefix.clone();
                row.push(q);
                next.push(row);
            }
        }
        acc = next;
    }
    acc
}

/// All optimal assignments (the contract-level content of the optimal menu
/// set). Identical to [`solve`] but returning only the assignments.
pub fn enumerate_optimal_menus(
    v: &ValueFunction,
    ts: &TypeSpace,
    p: &Belief,
) -> Result<Vec<ContractAssignment>> {
    Ok(solve(v, ts, p)?.assignments)
}

/// When the optimum is non-unique, checks that the agent's rent at a type
/// with two optimal quantities is strictly larger under the larger one.
/// Returns `None` when every quantity set is a singleton.
pub fn agent_prefers_larger(
    v: &ValueFunction,
    ts: &TypeSpace,
    p: &Belief,
) -> Result<Option<bool>> {
    let solution = solve(v, ts, p)?;
    if solution.unique {
        return Ok(None);
    }
    let mut all = true;
    for a in &solution.assignments {
        for b in &solution.assignments {
            for i in 1..=a.type_count() {
                if a.contract(i).q == b.contract(i).q + 1 {
                    let (ra, rb) = (agent_rent(a, ts, i), agent_rent(b, ts, i));
                    // Rent equals realized payoff at the own contract.
                    debug_assert_eq!(ra, agent_utility(a.contract(i), &ts.kappa(i)));
                    all &= ra > rb;
                }
            }
        }
    }
    Ok(Some(all))
}

/// True iff the extra contracts of `menu` over the base assignment are
/// never chosen: each type's best response within `menu` is exactly its
/// assigned contract.
pub fn is_valid_augmentation(
    menu: &Menu,
    base: &ContractAssignment,
    ts: &TypeSpace,
) -> Result<bool> {
    if !menu.is_superset(&base.induced_menu()) {
        return Err(Error::Precondition(
            "menu must contain the base assignment's contracts".into(),
        ));
    }
    for i in 1..=base.type_count() {
        let br = ts.best_response(menu, &ts.kappa(i))?;
        let assigned = base.contract(i);
        let matches = match br {
            crate::model::Choice::Take(c) => c == *assigned,
            // the null contract resolves to the outside option
            crate::model::Choice::Outside => assigned.is_null(),
        };
        if !matches {
            return Ok(false);
        }
    }
    Ok(true)
}

/// CSV header for [`solution_csv`].
pub const CSV_HEADER: &str = "assignment,i,kappa,ceil_kappa,phi,Q,q,t,rent,principal_payoff";

/// Serializes a solution as deterministic CSV rows, one per assignment and
/// type. Quantity sets are `;`-separated inside the cell.
pub fn solution_csv(
    v: &ValueFunction,
    ts: &TypeSpace,
    p: &Belief,
    s: &Solution,
) -> Result<String> {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (a_idx, a) in s.assignments.iter().enumerate() {
        for i in 1..=a.type_count() {
            let c = a.contract(i);
            let phi = p.virtual_cost(ts, i)?;
            let qset = s.quantity_sets[i - 1]
                .iter()
                .map(|q| q.to_string())
                .collect::<Vec<_>>()
                .join(";");
            let payoff = v.eval(c.q)? - Rat::from(BigInt::from(c.t));
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                a_idx,
                i,
                format_rat(&ts.kappa(i)),
                ts.ceil_kappa(i),
                format_rat(&phi),
                qset,
                c.q,
                c.t,
                format_rat(&agent_rent(a, ts, i)),
                format_rat(&payoff),
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rat;

    pub(crate) fn example_v() -> ValueFunction {
        ValueFunction::from_quadratic(&rat(50, 1), &rat(-1, 2), 100).unwrap()
    }

    pub(crate) fn example_ts() -> TypeSpace {
        TypeSpace::new(3, 100, 100).unwrap()
    }

    fn belief(v: &[(i64, i64)]) -> Belief {
        Belief::new(v.iter().map(|&(n, d)| rat(n, d)).collect()).unwrap()
    }

    #[test]
    fn example_1_quantities() {
        let sets = optimal_quantities(&example_v(), &example_ts(), &Belief::uniform(3)).unwrap();
        assert_eq!(sets, vec![vec![45], vec![47], vec![49]]);
    }

    #[test]
    fn example_2_quantities() {
        let p = belief(&[(1, 4), (1, 2), (1, 4)]);
        let sets = optimal_quantities(&example_v(), &example_ts(), &p).unwrap();
        assert_eq!(sets, vec![vec![44], vec![47, 48], vec![49]]);
    }

    #[test]
    fn example_3_quantities_bunch() {
        let v = ValueFunction::from_quadratic(&rat(253, 1), &rat(-5, 2), 50).unwrap();
        let ts = TypeSpace::new(3, 100, 50).unwrap();
        let sets = optimal_quantities(&v, &ts, &Belief::uniform(3)).unwrap();
        assert_eq!(sets, vec![vec![50], vec![50], vec![50]]);
        let report = monotonicity_report(&sets);
        assert!(report.weak && !report.strict);
    }

    #[test]
    fn non_log_concave_belief_rejected() {
        let p = belief(&[(9, 20), (1, 10), (9, 20)]);
        assert!(matches!(
            optimal_quantities(&example_v(), &example_ts(), &p),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn transfer_examples() {
        let ts = example_ts();
        assert_eq!(transfers(&[45, 47, 49], &ts).unwrap(), vec![135, 139, 141]);
        assert_eq!(transfers(&[0, 0, 0], &ts).unwrap(), vec![0, 0, 0]);
        // Bunched quantities collapse to a single transfer.
        let narrow = TypeSpace::new(3, 100, 50).unwrap();
        let t = transfers(&[50, 50, 50], &narrow).unwrap();
        assert_eq!(t, vec![150, 150, 150]);
        // ...which does not fit inside the b=50 grid.
        assert!(matches!(
            capacity_check(&t, &narrow),
            Err(Error::Capacity { type_index: 1, transfer: 150, bound: 50 })
        ));
        assert!(capacity_check(&[45, 47, 49], &ts).is_ok());
    }

    #[test]
    fn constraint_verification() {
        let ts = example_ts();
        let a = ContractAssignment::new(vec![
            Contract::new(45, 135),
            Contract::new(47, 139),
            Contract::new(49, 141),
        ])
        .unwrap();
        let report = verify_constraints(&a, &ts).unwrap();
        assert!(report.all_hold());
        assert!(report.all_strict(&a));

        // Swapping two types' contracts breaks at least one IC.
        let swapped = ContractAssignment::new(vec![
            Contract::new(47, 139),
            Contract::new(45, 135),
            Contract::new(49, 141),
        ])
        .unwrap();
        let report = verify_constraints(&swapped, &ts).unwrap();
        assert!(!report.all_hold());

        // PC equality occurs exactly at the null contract.
        let null = ContractAssignment::new(vec![Contract::new(0, 0); 3]).unwrap();
        let report = verify_constraints(&null, &ts).unwrap();
        assert!(report.pc.iter().all(|s| *s == ConstraintStatus::Equality));
        assert!(report.all_strict(&null) == false); // ICs are equalities too
    }

    #[test]
    fn agent_rent_examples() {
        let ts = example_ts();
        let a = ContractAssignment::new(vec![
            Contract::new(45, 135),
            Contract::new(47, 139),
            Contract::new(49, 141),
        ])
        .unwrap();
        assert_eq!(agent_rent(&a, &ts, 1), rat(45, 100));
        assert_eq!(agent_rent(&a, &ts, 3), rat(9249, 100));
        let zero_first = ContractAssignment::new(vec![
            Contract::new(0, 0),
            Contract::new(47, 139),
            Contract::new(49, 141),
        ])
        .unwrap();
        assert_eq!(agent_rent(&zero_first, &ts, 1), rat(0, 1));
    }

    #[test]
    fn uniqueness_certificates() {
        let v = example_v();
        let ts = example_ts();
        assert_eq!(is_unique(&v, &ts, &Belief::uniform(3)).unwrap(), (true, vec![]));
        let p = belief(&[(1, 4), (1, 2), (1, 4)]);
        assert_eq!(is_unique(&v, &ts, &p).unwrap(), (false, vec![2]));
        let v3 = ValueFunction::from_quadratic(&rat(253, 1), &rat(-5, 2), 50).unwrap();
        let ts3 = TypeSpace::new(3, 100, 50).unwrap();
        assert_eq!(is_unique(&v3, &ts3, &Belief::uniform(3)).unwrap(), (true, vec![]));
    }

    #[test]
    fn example_1_solution() {
        let s = solve(&example_v(), &example_ts(), &Belief::uniform(3)).unwrap();
        assert_eq!(s.assignments.len(), 1);
        assert_eq!(
            s.assignments[0].contracts(),
            &[
                Contract::new(45, 135),
                Contract::new(47, 139),
                Contract::new(49, 141)
            ]
        );
        assert!(s.unique && s.monotonicity.weak && s.monotonicity.strict);
        assert!(!s.collapsed[0]);
    }

    #[test]
    fn example_2_solution() {
        let p = belief(&[(1, 4), (1, 2), (1, 4)]);
        let s = solve(&example_v(), &example_ts(), &p).unwrap();
        assert_eq!(s.assignments.len(), 2);
        assert_eq!(
            s.assignments[0].contracts(),
            &[
                Contract::new(44, 132),
                Contract::new(47, 138),
                Contract::new(49, 140)
            ]
        );
        assert_eq!(
            s.assignments[1].contracts(),
            &[
                Contract::new(44, 132),
                Contract::new(48, 140),
                Contract::new(49, 141)
            ]
        );
        // Principal indifference across the optimal assignments.
        assert_eq!(s.expected_payoffs[0], s.expected_payoffs[1]);
        assert_eq!(agent_prefers_larger(&example_v(), &example_ts(), &p).unwrap(), Some(true));
        // Agent rent at type 2: 44 + 47/100 vs 44 + 48/100.
        assert_eq!(agent_rent(&s.assignments[0], &example_ts(), 2), rat(4447, 100));
        assert_eq!(agent_rent(&s.assignments[1], &example_ts(), 2), rat(4448, 100));
    }

    #[test]
    fn example_3_solution_collapses() {
        // Over-concave valuation: every type is bunched at q = 50 and the
        // menu collapses to the single contract (50, 150).
        let v = ValueFunction::from_quadratic(&rat(253, 1), &rat(-5, 2), 100).unwrap();
        let ts = TypeSpace::new(3, 100, 100).unwrap();
        assert!(!v.report().bounded_concavity);
        let s = solve(&v, &ts, &Belief::uniform(3)).unwrap();
        assert_eq!(s.quantity_sets, vec![vec![50], vec![50], vec![50]]);
        assert!(s.unique);
        assert!(s.monotonicity.weak && !s.monotonicity.strict);
        assert!(s.collapsed[0]);
        let a = &s.assignments[0];
        assert_eq!(a.transfers(), vec![150, 150, 150]);
        assert_eq!(a.induced_menu().len(), 1);
        // The collapsed transfer outgrows the b = 100 grid.
        assert!(matches!(
            capacity_check(&a.transfers(), &ts),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn augmentation_checks() {
        let ts = example_ts();
        let s = solve(&example_v(), &ts, &Belief::uniform(3)).unwrap();
        let base = &s.assignments[0];
        let menu = base.induced_menu();
        assert!(is_valid_augmentation(&menu, base, &ts).unwrap());
        // (1, 0) has negative payoff for every type: never chosen.
        assert!(is_valid_augmentation(&menu.with(Contract::new(1, 0)), base, &ts).unwrap());
        // (45, 140) strictly tempts the highest cost type.
        assert!(!is_valid_augmentation(&menu.with(Contract::new(45, 140)), base, &ts).unwrap());
        assert!(is_valid_augmentation(&Menu::new([Contract::new(1, 0)]).unwrap(), base, &ts).is_err());
    }

    #[test]
    fn round_up_rent_identity() {
        // IC_{i,i-1} slack is exactly (q^i - q^(i-1)) / gamma.
        let ts = example_ts();
        let s = solve(&example_v(), &ts, &Belief::uniform(3)).unwrap();
        let a = &s.assignments[0];
        for i in 2..=3 {
            let own = agent_utility(a.contract(i), &ts.kappa(i));
            let mimic = agent_utility(a.contract(i - 1), &ts.kappa(i));
            let slack = own - mimic;
            let dq = a.contract(i).q - a.contract(i - 1).q;
            assert_eq!(slack, Rat::new(BigInt::from(dq), BigInt::from(ts.gamma())));
        }
    }

    #[test]
    fn csv_is_deterministic() {
        let v = example_v();
        let ts = example_ts();
        let p = Belief::uniform(3);
        let s = solve(&v, &ts, &p).unwrap();
        let a = solution_csv(&v, &ts, &p, &s).unwrap();
        let b = solution_csv(&v, &ts, &p, &s).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with(CSV_HEADER));
        assert!(a.contains("0,1,299/100,3,5,45,45,135,9/20,"));
    }
}
