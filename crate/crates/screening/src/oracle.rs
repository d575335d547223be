//! Independent brute-force verification: direct constrained enumeration
//! over all per-type contract assignments and direct agent-choice scans.
//!
//! Nothing here touches the first-order-condition machinery; feasibility
//! is the literal weak IC/PC system and the objective is the literal
//! expected payoff. Enumeration is lexicographic over
//! `(q^1, t^1, ..., q^m, t^m)`; prefixes violating a pairwise constraint
//! are pruned, which is sound because constraints only couple pairs of
//! types. The full argmax set is returned, never a representative.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::beliefs::Belief;
use crate::model::{Choice, Contract, ContractAssignment, Menu, TypeSpace, ValueFunction};
use crate::{Error, Rat, Result};

/// Enumeration caps; the search space is `(b+1)^(2m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleCaps {
    pub max_b: u64,
    pub max_m: u64,
}

impl Default for OracleCaps {
    fn default() -> Self {
        Self { max_b: 12, max_m: 3 }
    }
}

/// Maximum expected principal payoff and the full set of feasible argmax
/// assignments, by exhaustive enumeration.
pub fn brute_force_optimal(
    v: &ValueFunction,
    ts: &TypeSpace,
    p: &Belief,
    caps: OracleCaps,
) -> Result<(Rat, Vec<ContractAssignment>)> {
    check_inputs(v, ts, p, caps)?;
    #[cfg(feature = "parallel")]
    {
        brute_force_optimal_par(v, ts, p, caps)
    }
    #[cfg(not(feature = "parallel"))]
    {
        brute_force_optimal_seq(v, ts, p, caps)
    }
}

/// Sequential enumeration; always available, used as the bench baseline.
pub fn brute_force_optimal_seq(
    v: &ValueFunction,
    ts: &TypeSpace,
    p: &Belief,
    caps: OracleCaps,
) -> Result<(Rat, Vec<ContractAssignment>)> {
    check_inputs(v, ts, p, caps)?;
    let ctx = Context::new(v, ts, p);
    let mut best = Local::new();
    for first in ctx.contracts() {
        let mut local = Local::new();
        ctx.extend(&mut vec![first], &mut local);
        best.merge(local);
    }
    best.finish()
}

/// Parallel enumeration, partitioned by the first type's contract.
#[cfg(feature = "parallel")]
pub fn brute_force_optimal_par(
    v: &ValueFunction,
    ts: &TypeSpace,
    p: &Belief,
    caps: OracleCaps,
) -> Result<(Rat, Vec<ContractAssignment>)> {
    use rayon::prelude::*;
    check_inputs(v, ts, p, caps)?;
    let ctx = Context::new(v, ts, p);
    let firsts: Vec<Contract> = ctx.contracts().collect();
    let best = firsts
        .into_par_iter()
        .map(|first| {
            let mut local = Local::new();
            ctx.extend(&mut vec![first], &mut local);
            local
        })
        .reduce(Local::new, |mut a, b| {
            a.merge(b);
            a
        });
    best.finish()
}

fn check_inputs(v: &ValueFunction, ts: &TypeSpace, p: &Belief, caps: OracleCaps) -> Result<()> {
    if v.bound() != ts.bound() {
        return Err(Error::Domain("value function and type space bounds differ".into()));
    }
    if p.type_count() as u64 != ts.type_count() {
        return Err(Error::Domain("belief/type-space size mismatch".into()));
    }
    if ts.bound() > caps.max_b || ts.type_count() > caps.max_m {
        return Err(Error::CapExceeded(format!(
            "instance (b={}, m={}) exceeds oracle caps; needs max_b >= {} and max_m >= {}",
            ts.bound(),
            ts.type_count(),
            ts.bound(),
            ts.type_count()
        )));
    }
    Ok(())
}

struct Context<'a> {
    v: &'a ValueFunction,
    ts: &'a TypeSpace,
    p: &'a Belief,
    kappas: Vec<Rat>,
}

/// Running argmax set for one enumeration partition.
struct Local {
    best: Option<Rat>,
    argmax: Vec<Vec<Contract>>,
}

impl Local {
    fn new() -> Self {
        Self { best: None, argmax: Vec::new() }
    }

    fn offer(&mut self, payoff: Rat, assignment: &[Contract]) {
        match &self.best {
            Some(b) if *b > payoff => {}
            Some(b) if *b == payoff => self.argmax.push(assignment.to_vec()),
            _ => {
                self.best = Some(payoff);
                self.argmax = vec![assignment.to_vec()];
            }
        }
    }

    fn merge(&mut self, other: Local) {
        if let Some(payoff) = other.best {
            match &self.best {
                Some(b) if *b > payoff => {}
                Some(b) if *b == payoff => self.argmax.extend(other.argmax),
                _ => {
                    self.best = Some(payoff);
                    self.argmax = other.argmax;
                }
            }
        }
    }

    fn finish(self) -> Result<(Rat, Vec<ContractAssignment>)> {
        let best = self
            .best
            .ok_or_else(|| Error::Invariant("empty feasible set: null assignment missing".into()))?;
        let mut assignments = self
            .argmax
            .into_iter()
            .map(ContractAssignment::new)
            .collect::<Result<Vec<_>>>()?;
        assignments.sort();
        Ok((best, assignments))
    }
}

impl<'a> Context<'a> {
    fn new(v: &'a ValueFunction, ts: &'a TypeSpace, p: &'a Belief) -> Self {
        let kappas = (1..=ts.type_count() as usize).map(|i| ts.kappa(i)).collect();
        Self { v, ts, p, kappas }
    }

    fn contracts(&self) -> impl Iterator<Item = Contract> + '_ {
        let b = self.ts.bound();
        (0..=b).flat_map(move |q| (0..=b).map(move |t| Contract::new(q, t)))
    }

    fn utility(&self, i: usize, c: &Contract) -> Rat {
        Rat::from(BigInt::from(c.t)) - &self.kappas[i - 1] * Rat::from(BigInt::from(c.q))
    }

    /// True iff the newly appended contract respects PC and both IC
    /// directions against every earlier type.
    fn prefix_feasible(&self, prefix: &[Contract]) -> bool {
        let i = prefix.len();
        let c = &prefix[i - 1];
        let own = self.utility(i, c);
        if own < Rat::zero() {
            return false;
        }
        for (j_idx, other) in prefix[..i - 1].iter().enumerate() {
            let j = j_idx + 1;
            if own < self.utility(i, other) {
                return false;
            }
            if self.utility(j, other) < self.utility(j, c) {
                return false;
            }
        }
        true
    }

    fn extend(&self, prefix: &mut Vec<Contract>, local: &mut Local) {
        if !self.prefix_feasible(prefix) {
            return;
        }
        if prefix.len() as u64 == self.ts.type_count() {
            let mut payoff = Rat::zero();
            for (idx, c) in prefix.iter().enumerate() {
                payoff += self.p.prob(idx + 1)
                    * (self.v.eval(c.q).expect("q in range") - Rat::from(BigInt::from(c.t)));
            }
            local.offer(payoff, prefix);
            return;
        }
        for next in self.contracts() {
            prefix.push(next);
            self.extend(prefix, local);
            prefix.pop();
        }
    }
}

/// Linear-scan best response over `M` plus the outside option; the
/// independent check of the no-tie route in [`TypeSpace::best_response`].
pub fn brute_force_best_response(menu: &Menu, ts: &TypeSpace, theta: &Rat) -> Result<Choice> {
    ts.index_of(theta)?;
    let mut candidates: Vec<(Rat, Choice)> = vec![(Rat::zero(), Choice::Outside)];
    for c in menu.contracts() {
        let payoff = Rat::from(BigInt::from(c.t)) - theta * Rat::from(BigInt::from(c.q));
        candidates.push((payoff, Choice::Take(*c)));
    }
    let max = candidates.iter().map(|(p, _)| p.clone()).max().unwrap();
    let mut winners: Vec<Choice> = candidates
        .into_iter()
        .filter(|(p, _)| *p == max)
        .map(|(_, c)| c)
        .collect();
    // The only admissible tie is outside option vs the null contract.
    winners.retain(|c| !matches!(c, Choice::Take(c) if c.is_null()));
    match winners.as_slice() {
        [only] => Ok(*only),
        [] => Ok(Choice::Outside),
        _ => Err(Error::Invariant(format!(
            "agent indifference among {winners:?} at theta={theta}"
        ))),
    }
}
