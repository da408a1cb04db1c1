//! Enumeration of feasible strategies and of whole strategy profiles.
//!
//! A strategy is a capacity vector over the `n - 1` other agents with total at
//! most `k`. Profiles are addressed by a mixed-radix index whose digit `a` is
//! agent `a`'s strategy number, so changing one agent's strategy is index
//! arithmetic.

use crate::error::{Error, Result};
use crate::network::{check_parameters, Capacity, NodeId, Strategy, StrategyProfile};

/// Number of feasible strategies per agent: the weak compositions of every
/// total `0..=k` into `n - 1` labeled parts, which sums to `C(n - 1 + k, k)`.
pub fn strategy_count(n: usize, k: u32) -> u128 {
    binomial((n - 1) as u128 + u128::from(k), u128::from(k))
}

fn binomial(n: u128, r: u128) -> u128 {
    let r = r.min(n - r);
    (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Yields every feasible strategy of `owner` exactly once, starting with the
/// empty strategy.
pub fn enumerate_strategies(n: usize, k: u32, owner: NodeId) -> Result<StrategyIter> {
    check_parameters(n, k)?;
    if owner >= n {
        return Err(Error::Argument(format!("agent {owner} out of range 0..{n}")));
    }
    Ok(StrategyIter {
        owner,
        k,
        digits: vec![0; n - 1],
        sum: 0,
        done: false,
    })
}

/// Odometer over capacity vectors with total at most `k`.
#[derive(Debug, Clone)]
pub struct StrategyIter {
    owner: NodeId,
    k: u32,
    digits: Vec<Capacity>,
    sum: u32,
    done: bool,
}

impl StrategyIter {
    fn target(&self, slot: usize) -> NodeId {
        if slot < self.owner {
            slot
        } else {
            slot + 1
        }
    }

    fn advance(&mut self) {
        for slot in 0..self.digits.len() {
            if self.sum < self.k {
                self.digits[slot] += 1;
                self.sum += 1;
                return;
            }
            self.sum -= self.digits[slot];
            self.digits[slot] = 0;
        }
        self.done = true;
    }
}

impl Iterator for StrategyIter {
    type Item = Strategy;

    fn next(&mut self) -> Option<Strategy> {
        if self.done {
            return None;
        }
        let purchases: Vec<(NodeId, Capacity)> = self
            .digits
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c > 0)
            .map(|(slot, &c)| (self.target(slot), c))
            .collect();
        let strategy = Strategy::new(self.owner, purchases).expect("odometer strategies are valid");
        self.advance();
        Some(strategy)
    }
}

/// Mixed-radix addressing of all `(strategy count)^n` profiles.
#[derive(Debug, Clone)]
pub(crate) struct ProfileSpace {
    n: usize,
    k: u32,
    radix: usize,
    /// Per agent, per strategy number: the strategy.
    strategies: Vec<Vec<Strategy>>,
    /// `radix^a` for each agent `a`.
    place: Vec<u64>,
    size: u64,
}

impl ProfileSpace {
    /// Fails with [`Error::BudgetExceeded`] when the profile count is above
    /// `budget`.
    pub(crate) fn new(n: usize, k: u32, budget: u128) -> Result<Self> {
        check_parameters(n, k)?;
        let radix = strategy_count(n, k);
        let count = (0..n).try_fold(1u128, |acc, _| acc.checked_mul(radix));
        let count = match count {
            Some(c) if c <= budget && c <= u128::from(u64::MAX) => c,
            Some(c) => return Err(Error::BudgetExceeded { count: c, budget }),
            None => {
                return Err(Error::BudgetExceeded {
                    count: u128::MAX,
                    budget,
                })
            }
        };
        let strategies = (0..n)
            .map(|a| enumerate_strategies(n, k, a).map(Iterator::collect))
            .collect::<Result<Vec<Vec<Strategy>>>>()?;
        let radix = radix as usize;
        let mut place = Vec::with_capacity(n);
        let mut p = 1u64;
        for _ in 0..n {
            place.push(p);
            p = p.saturating_mul(radix as u64);
        }
        Ok(ProfileSpace {
            n,
            k,
            radix,
            strategies,
            place,
            size: count as u64,
        })
    }

    pub(crate) fn n(&self) -> usize {
        self.n
    }

    pub(crate) fn radix(&self) -> usize {
        self.radix
    }

    pub(crate) fn size(&self) -> u64 {
        self.size
    }

    pub(crate) fn digit(&self, index: u64, agent: usize) -> usize {
        ((index / self.place[agent]) % self.radix as u64) as usize
    }

    /// Index of the profile that differs from `index` only in `agent` playing
    /// strategy number `digit`.
    pub(crate) fn with_digit(&self, index: u64, agent: usize, digit: usize) -> u64 {
        let current = self.digit(index, agent) as u64;
        index - current * self.place[agent] + digit as u64 * self.place[agent]
    }

    pub(crate) fn strategy(&self, agent: usize, digit: usize) -> &Strategy {
        &self.strategies[agent][digit]
    }

    /// Strategy number of `strategy` for its owner.
    #[cfg(test)]
    pub(crate) fn digit_of(&self, strategy: &Strategy) -> Option<usize> {
        self.strategies
            .get(strategy.owner())?
            .iter()
            .position(|s| s == strategy)
    }

    #[cfg(test)]
    pub(crate) fn index_of(&self, profile: &StrategyProfile) -> Option<u64> {
        if profile.n() != self.n || profile.k() != self.k {
            return None;
        }
        profile
            .strategies()
            .iter()
            .enumerate()
            .try_fold(0u64, |acc, (a, s)| Some(acc + self.digit_of(s)? as u64 * self.place[a]))
    }

    /// Undirected capacity matrix of the profile at `index`.
    pub(crate) fn matrix(&self, index: u64) -> Vec<u64> {
        let n = self.n;
        let mut m = vec![0u64; n * n];
        for a in 0..n {
            for &(t, c) in self.strategies[a][self.digit(index, a)].purchases() {
                m[a * n + t] += u64::from(c);
                m[t * n + a] += u64::from(c);
            }
        }
        m
    }

    pub(crate) fn profile(&self, index: u64) -> StrategyProfile {
        let strategies = (0..self.n)
            .map(|a| self.strategies[a][self.digit(index, a)].clone())
            .collect();
        StrategyProfile::new(self.n, self.k, strategies).expect("enumerated profiles are feasible")
    }
}
