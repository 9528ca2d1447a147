//! Decentralizing a planned consumption path in a market economy with
//! annuities: how aggregate consumption is split across cohorts, the
//! age-dependent capital income tax that makes individuals choose that
//! split, and the lump-sum transfers that close each cohort's budget.

mod allocation;
mod error;
mod lump;
mod tax;

pub use allocation::{allocation_rule, commitment_allocation, AllocationRule, AllocationVariant};
pub use error::FiscalError;
pub use lump::{lump_sum_present_values, LumpSum};
pub use tax::{
    cutoff_age, cutoff_age_at, default_age_grid, long_run_tax, market_steady_state, steady_state_subsidy, tax_surface,
    uniform_subsidy, FiscalSchedule,
};
