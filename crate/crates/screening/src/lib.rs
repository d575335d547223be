//! Exact solver for the discrete principal-agent screening problem.
//!
//! A principal procures a quantity `q` from an agent in exchange for a
//! transfer `t`, with both drawn from the integer grid `D = {0, ..., b}`.
//! The agent's marginal cost is private information, drawn from a grid of
//! non-integer types. All arithmetic is exact rational: optimality here
//! hinges on equalities between discrete derivatives and virtual costs
//! that floating point would miss or fabricate.
//!
//! The crate is organized bottom-up:
//!
//! - [`discrete_calc`]: discrete derivatives and concave maximization on
//!   integer intervals, plus exact floor/ceiling utilities.
//! - [`model`]: types, contracts, menus, payoffs, agent best responses.
//! - [`beliefs`]: exact-rational beliefs over types, log-concavity,
//!   Mills ratios, virtual costs.
//! - [`solver`]: per-type optimal quantity sets, transfers, constraint
//!   verification, optimal and augmented menus.
//! - [`oracle`]: brute-force enumeration used to cross-check the solver.
//! - [`rationalizability`]: the iterated-reduction membership test for
//!   menus and a desk-scale literal fixed-point check.
//!
//! With the default `parallel` feature the oracle enumeration and batch
//! loops run on rayon; without it everything falls back to sequential
//! code with identical results.

pub mod beliefs;
pub mod discrete_calc;
mod error;
pub mod model;
pub mod oracle;
pub mod rationalizability;
pub mod solver;

pub use error::{Error, Result};

/// Exact rational scalar used throughout the crate.
pub type Rat = num_rational::BigRational;

use num_bigint::BigInt;

/// Shorthand for building a rational from an integer pair.
pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses a rational from `"n"` or `"n/d"` form.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let numer: BigInt = n
        .parse()
        .map_err(|_| Error::Parse(format!("invalid rational {s:?}")))?;
    let denom: BigInt = d
        .parse()
        .map_err(|_| Error::Parse(format!("invalid rational {s:?}")))?;
    if denom == BigInt::from(0) {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(numer, denom))
}

/// Canonical display form: reduced, `"n"` for integers, `"n/d"` otherwise.
pub fn format_rat(x: &Rat) -> String {
    x.to_string()
}

pub(crate) mod exec {
    //! Tiny execution shim: map a slice through a function, in parallel
    //! when the `parallel` feature is on.

    #[cfg(feature = "parallel")]
    pub fn map_collect<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
    where
        T: Send,
        U: Send,
        F: Fn(T) -> U + Sync + Send,
    {
        use rayon::prelude::*;
        items.into_par_iter().map(f).collect()
    }

    #[cfg(not(feature = "parallel"))]
    pub fn map_collect<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
    where
        F: Fn(T) -> U,
    {
        items.into_iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        assert_eq!(parse_rat("5/2").unwrap(), rat(5, 2));
        assert_eq!(parse_rat("-1/2").unwrap(), rat(-1, 2));
        assert_eq!(parse_rat("7").unwrap(), rat(7, 1));
        assert_eq!(format_rat(&rat(6, 4)), "3/2");
        assert_eq!(format_rat(&rat(8, 2)), "4");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }
}
