//! Worst-case query budgets of the estimator under the theoretical preset,
//! in exact rational arithmetic.
//!
//! Nothing here runs the estimator. Each step's budget is the product of the
//! loop sizes and per-call bounds used by the implementation:
//!
//! * Step 0: C(n, 3) singleton queries, when the exhaustive branch applies.
//! * Step 1: `N₁ · (16τL + 1)` with `N₁ = ⌈18L/ε²⌉`.
//! * Step 4: `(3L + 2) · 30N · (16τL + 1)`; a decide pass sees at most three
//!   times the compaction limit `10N`.
//! * Steps 5 and 6: `(3L + 2) · 30N · 2 · (3L+1)Γ(2L+1)(L+1)`, the factor 2
//!   covering the reseeded retry.
//! * Step 8: `16L · (30N + 1)`; after `3L` halvings at most one active
//!   triangle is left, so every residual tree is a single path or a root.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::scalar::ceil_log2;

#[derive(Clone, Debug, PartialEq)]
pub struct BudgetConstants {
    pub kappa1: BigRational,
    pub kappa2: BigRational,
    pub kappa3: BigRational,
}

impl Default for BudgetConstants {
    fn default() -> Self {
        BudgetConstants {
            kappa1: int(271),
            kappa2: int(271),
            kappa3: int(1),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BudgetBreakdown {
    pub log_n: u32,
    pub tau: BigInt,
    pub n_cap: BigInt,
    pub rounds: BigInt,
    pub gamma: BigInt,
    pub iterations: BigInt,
    pub exhaustive_branch: bool,
    pub exhaustive: BigInt,
    pub threshold: BigInt,
    pub decide: BigInt,
    pub coarse: BigInt,
    pub final_exact: BigInt,
}

impl BudgetBreakdown {
    pub fn total(&self) -> BigInt {
        &self.exhaustive + &self.threshold + &self.decide + &self.coarse + &self.final_exact
    }
}

fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn ceil(x: &BigRational) -> BigInt {
    x.ceil().to_integer()
}

fn pow(x: &BigRational, e: u32) -> BigRational {
    num_traits::pow(x.clone(), e as usize)
}

/// `d² · L¹⁸ / ε⁴`, the shape of the overall query bound.
pub fn bound_shape(n: u64, d: u64, eps: &BigRational) -> BigRational {
    let l = int(i64::from(ceil_log2(n as usize)));
    let d = BigRational::from_integer(BigInt::from(d));
    &d * &d * pow(&l, 18) / pow(eps, 4)
}

/// Whether the exhaustive branch applies: `ε ≤ √d · L^{9/2} / n^{3/4}`,
/// checked as `ε⁴ · n³ ≤ d² · L¹⁸`.
pub fn exhaustive_applies(n: u64, d: u64, eps: &BigRational) -> bool {
    let nn = BigRational::from_integer(BigInt::from(n));
    pow(eps, 4) * pow(&nn, 3) <= bound_shape(n, d, &int(1))
}

/// Per-step worst-case budgets for a graph on `n` vertices.
pub fn theoretical_budget(n: u64, d: u64, eps: &BigRational, k: &BudgetConstants) -> BudgetBreakdown {
    assert!(n >= 3, "budgets need at least three vertices");
    assert!(eps > &BigRational::zero() && eps < &BigRational::one(), "ε must lie in (0, 1)");
    let lu = ceil_log2(n as usize);
    let l = int(i64::from(lu));
    let dd = BigRational::from_integer(BigInt::from(d));
    let eps2 = eps * eps;

    let tau_a = int(36) * &k.kappa1 * &k.kappa1;
    let tau_b = int(324) * &k.kappa2 * &k.kappa2;
    let tau_c = if tau_a > tau_b { tau_a } else { tau_b };
    let tau = ceil(&(tau_c * &dd * &dd * pow(&l, 4) / &eps2));
    let n_cap = ceil(&(&k.kappa3 * pow(&l, 12) / &eps2));
    let rounds = ceil(&(int(18) * &l / &eps2));
    let li = l.to_integer();
    let gamma = BigInt::from(2000) * &li;
    let iterations = BigInt::from(3) * &li + 2;

    let zero = BigInt::zero();
    if exhaustive_applies(n, d, eps) {
        let nb = BigInt::from(n);
        let exhaustive = &nb * (&nb - 1) * (&nb - 2) / 6;
        return BudgetBreakdown {
            log_n: lu,
            tau,
            n_cap,
            rounds,
            gamma,
            iterations,
            exhaustive_branch: true,
            exhaustive,
            threshold: zero.clone(),
            decide: zero.clone(),
            coarse: zero.clone(),
            final_exact: zero,
        };
    }

    let per_decide = BigInt::from(16) * &tau * &li + 1;
    let tuples = BigInt::from(30) * &n_cap;
    let per_coarse = (BigInt::from(3) * &li + 1)
        * &gamma
        * (BigInt::from(2) * &li + 1)
        * (&li + 1);
    BudgetBreakdown {
        log_n: lu,
        threshold: &rounds * &per_decide,
        decide: &iterations * &tuples * &per_decide,
        coarse: &iterations * &tuples * 2 * per_coarse,
        final_exact: BigInt::from(16) * &li * (&tuples + 1),
        exhaustive_branch: false,
        exhaustive: zero,
        tau,
        n_cap,
        rounds,
        gamma,
        iterations,
    }
}

/// Result of comparing a budget against `C · d² · L¹⁸ / ε⁴`.
#[derive(Clone, Debug, PartialEq)]
pub struct BudgetAudit {
    pub n: u64,
    pub d: u64,
    pub eps: BigRational,
    pub budget: BudgetBreakdown,
    pub bound: BigRational,
    /// `total / (d² L¹⁸ / ε⁴)`, the smallest C that would pass.
    pub implied_constant: BigRational,
    pub within: bool,
}

pub fn audit_budget(n: u64, d: u64, eps: &BigRational, c: &BigRational, k: &BudgetConstants) -> BudgetAudit {
    let budget = theoretical_budget(n, d, eps, k);
    let shape = bound_shape(n, d, eps);
    let total = BigRational::from_integer(budget.total());
    let bound = c * &shape;
    BudgetAudit {
        n,
        d,
        eps: eps.clone(),
        within: total <= bound,
        implied_constant: total / shape,
        budget,
        bound,
    }
}
