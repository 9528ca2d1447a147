use growth_model::{DiscountKernel, ExpSum, Technology, Utility};
use growth_numerics::quad::gl5;
use growth_numerics::{Dopri5, OdeOptions, OdeStatus, Solution};

use crate::{CandidateValue, FlowError, PolicyFunction};

/// Integration tolerances and horizons for trajectory functionals.
#[derive(Debug, Clone, Copy)]
pub struct FlowSettings {
    pub rtol: f64,
    pub atol: f64,
    /// The flow counts as settled once `|K - k̄| < settle_tol · (1 + k̄)`.
    pub settle_tol: f64,
    /// Horizon past the last kernel breakpoint for policies without a
    /// steady state.
    pub free_horizon: f64,
    /// Give up on settling after this many years.
    pub max_horizon: f64,
    /// Step cap; tightened further to the fastest kernel time scale.
    pub h_max: f64,
}

impl Default for FlowSettings {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10, settle_tol: 1e-8, free_horizon: 200.0, max_horizon: 1e6, h_max: 10.0 }
    }
}

/// How the integral beyond the truncation horizon `T` is closed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailClosure {
    /// Beyond `T` the deviation from `k̄` decays like `e^{rate (t - T)}`.
    SteadyState { k_bar: f64, rate: f64 },
    /// Integrands are continued affinely from `T`; exact when the flow is an
    /// exponential and the integrand is logarithmic in capital.
    Affine,
    /// No tail: the run stopped at a caller-chosen time.
    Truncated,
}

/// Solution of `K' = f(K) - σ(K)` with the resolvent `R' = (f'(K) - σ'(K)) R`.
#[derive(Debug, Clone)]
pub struct FlowResult {
    pub k0: f64,
    pub solution: Solution<2>,
    pub horizon: f64,
    pub closure: TailClosure,
}

impl FlowResult {
    /// `(K(t), R(t))`, continued analytically past the horizon when the tail
    /// is a steady-state closure.
    pub fn state(&self, t: f64) -> (f64, f64) {
        let [k, r] = self.solution.eval(t.min(self.horizon));
        match self.closure {
            TailClosure::SteadyState { k_bar, rate } if t > self.horizon => {
                let e = (rate * (t - self.horizon)).exp();
                (k_bar + (k - k_bar) * e, r * e)
            }
            _ => (k, r),
        }
    }

    pub fn capital(&self, t: f64) -> f64 {
        self.state(t).0
    }

    pub fn resolvent(&self, t: f64) -> f64 {
        self.state(t).1
    }

    /// Accepted step end points, starting at 0.
    pub fn sample_times(&self) -> Vec<f64> {
        std::iter::once(0.0).chain(self.solution.steps.iter().map(|s| s.t1())).collect()
    }
}

#[derive(Debug, Clone, Copy)]
enum Integrand {
    /// `u(σ(K))`.
    Utility,
    /// `u'(σ(K)) σ'(K) R`: the marginal effect of a capital perturbation.
    ShadowResolvent,
}

/// Evaluates flows and flow functionals for one policy.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator<'a> {
    pub policy: &'a PolicyFunction,
    pub tech: &'a Technology,
    pub utility: Utility,
    pub settings: FlowSettings,
}

impl<'a> Evaluator<'a> {
    pub fn new(policy: &'a PolicyFunction, tech: &'a Technology, utility: Utility) -> Self {
        Self { policy, tech, utility, settings: FlowSettings::default() }
    }

    pub fn with_settings(mut self, settings: FlowSettings) -> Self {
        self.settings = settings;
        self
    }

    fn rhs(&self) -> impl Fn(f64, &[f64; 2]) -> Option<[f64; 2]> + '_ {
        move |_, y| {
            let k = y[0];
            if !self.policy.contains(k) {
                return None;
            }
            let (s, sp, _) = self.policy.eval_all(k);
            Some([self.tech.output(k) - s, (self.tech.marginal(k) - sp) * y[1]])
        }
    }

    fn solver(&self, h_max: f64) -> Dopri5 {
        Dopri5::new(OdeOptions { rtol: self.settings.rtol, atol: self.settings.atol, h_max, ..OdeOptions::default() })
    }

    fn check_start(&self, k: f64) -> Result<(), FlowError> {
        if self.policy.contains(k) {
            Ok(())
        } else {
            let (lo, hi) = self.policy.domain();
            Err(FlowError::OutsideDomain { k, lo, hi })
        }
    }

    /// Trajectory on `[0, t_end]` without a tail closure.
    pub fn integrate_flow(&self, k: f64, t_end: f64) -> Result<FlowResult, FlowError> {
        self.check_start(k)?;
        if !(t_end > 0.0) {
            return Err(FlowError::InvalidArgument(format!("horizon must be positive, got {t_end}")));
        }
        let sol = self.solver(self.settings.h_max).integrate(self.rhs(), 0.0, [k, 1.0], t_end);
        if sol.status != OdeStatus::Completed {
            return Err(FlowError::Diverged { k0: k, t: sol.t_end(), k_last: sol.y_end()[0] });
        }
        Ok(FlowResult { k0: k, horizon: t_end, solution: sol, closure: TailClosure::Truncated })
    }

    /// Trajectory run until it settles at the steady state, with steps
    /// aligned to the breakpoints of `weight`.
    pub fn settle(&self, k: f64, weight: &ExpSum) -> Result<FlowResult, FlowError> {
        self.check_start(k)?;
        let fastest = weight.pieces.iter().map(|p| p.rate).fold(0.0, f64::max);
        let h_max = if fastest > 0.0 { self.settings.h_max.min(1.0 / fastest) } else { self.settings.h_max };
        let breaks = weight.breakpoints();
        let steady = self.policy.steady_state();
        let closure_at = |k_bar: f64| TailClosure::SteadyState {
            k_bar,
            rate: self.tech.marginal(k_bar) - self.policy.sigma_prime(k_bar),
        };
        let mut sol = Solution {
            steps: Vec::new(),
            status: OdeStatus::Completed,
            t_start: 0.0,
            y_start: [k, 1.0],
            rejected: 0,
            rhs_evals: 0,
        };
        let near = |kk: f64| steady.is_some_and(|kb| (kk - kb).abs() < self.settings.settle_tol * (1.0 + kb));
        if near(k) {
            let kb = steady.unwrap_or(k);
            return Ok(FlowResult { k0: k, solution: sol, horizon: 0.0, closure: closure_at(kb) });
        }
        let last_break = breaks.last().copied().unwrap_or(0.0);
        let end = if steady.is_some() {
            self.settings.max_horizon.max(last_break)
        } else {
            last_break + self.settings.free_horizon
        };
        let mut t = 0.0;
        let mut y = [k, 1.0];
        let solver = self.solver(h_max);
        for seg_end in breaks.iter().copied().filter(|b| *b < end).chain(std::iter::once(end)) {
            let run = solver.integrate_until(self.rhs(), t, y, seg_end, |_, y| near(y[0]));
            let status = run.status;
            sol.extend(run);
            t = sol.t_end();
            y = sol.y_end();
            match status {
                OdeStatus::Completed => {}
                OdeStatus::Stopped => {
                    let kb = steady.unwrap_or(y[0]);
                    return Ok(FlowResult { k0: k, solution: sol, horizon: t, closure: closure_at(kb) });
                }
                _ => return Err(FlowError::Diverged { k0: k, t, k_last: y[0] }),
            }
        }
        if steady.is_some() {
            return Err(FlowError::NotSettled { k0: k, t });
        }
        Ok(FlowResult { k0: k, solution: sol, horizon: t, closure: TailClosure::Affine })
    }

    /// Integrand value and its time derivative at state `(K, R)`.
    fn integrand(&self, which: Integrand, k: f64, r: f64) -> (f64, f64) {
        let (s, sp, spp) = self.policy.eval_all(k);
        let u = &self.utility;
        let kdot = self.tech.output(k) - s;
        match which {
            Integrand::Utility => (u.value(s), u.marginal(s) * sp * kdot),
            Integrand::ShadowResolvent => {
                let up = u.marginal(s);
                let upp = -up / s;
                let g = up * sp * r;
                let rdot = (self.tech.marginal(k) - sp) * r;
                let gdot = (upp * sp * sp + up * spp) * kdot * r + up * sp * rdot;
                (g, gdot)
            }
        }
    }

    fn weighted_integral(&self, flow: &FlowResult, weight: &ExpSum, which: Integrand) -> f64 {
        let mut body = 0.0;
        for step in &flow.solution.steps {
            let (a, b) = (step.t0, step.t1());
            body += gl5(
                |t| {
                    let [k, r] = step.eval(t);
                    weight.value(t) * self.integrand(which, k, r).0
                },
                a,
                b,
            );
        }
        let big_t = flow.horizon;
        let [kt, rt] = flow.solution.y_end();
        let (gt, gdot) = self.integrand(which, kt, rt);
        let tail = match flow.closure {
            TailClosure::SteadyState { k_bar, rate } => {
                let g_inf = match which {
                    Integrand::Utility => self.utility.value(self.policy.sigma(k_bar)),
                    Integrand::ShadowResolvent => 0.0,
                };
                g_inf * weight.tail(big_t) + (gt - g_inf) * weight.weighted_tail(big_t, rate)
            }
            TailClosure::Affine => gt * weight.tail(big_t) + gdot * weight.moment_tail(big_t),
            TailClosure::Truncated => 0.0,
        };
        body + tail
    }

    /// `∫ weight(t) u(σ(K(t, k))) dt`.
    pub fn discounted_utility(&self, weight: &ExpSum, k: f64) -> Result<f64, FlowError> {
        let flow = self.settle(k, weight)?;
        Ok(self.weighted_integral(&flow, weight, Integrand::Utility))
    }

    /// Value of following the policy from `k`: `∫ h u(σ(K)) dt`.
    pub fn value(&self, kernel: &DiscountKernel, k: f64) -> Result<f64, FlowError> {
        self.discounted_utility(kernel.pieces(), k)
    }

    /// `∫ h u'(σ(K)) σ'(K) R dt`: the value of a marginal unit of capital
    /// carried by the flow.
    pub fn shadow_value(&self, kernel: &DiscountKernel, k: f64) -> Result<f64, FlowError> {
        let flow = self.settle(k, kernel.pieces())?;
        Ok(self.weighted_integral(&flow, kernel.pieces(), Integrand::ShadowResolvent))
    }

    /// Gain from consuming `c` instead of `σ(k)` for an instant, per unit of
    /// time: `u(c) - u(σ(k)) + (σ(k) - c) ∫ h u'σ' R dt`.
    pub fn perturbation_payoff(&self, kernel: &DiscountKernel, k: f64, c: f64) -> Result<f64, FlowError> {
        if !(c > 0.0) {
            return Err(FlowError::InvalidArgument(format!("consumption must be positive, got {c}")));
        }
        let j = self.shadow_value(kernel, k)?;
        Ok(self.payoff_from_shadow(k, c, j))
    }

    /// Payoff for each candidate consumption, sharing one flow.
    pub fn perturbation_payoffs(&self, kernel: &DiscountKernel, k: f64, cs: &[f64]) -> Result<Vec<f64>, FlowError> {
        let j = self.shadow_value(kernel, k)?;
        Ok(cs.iter().map(|&c| self.payoff_from_shadow(k, c, j)).collect())
    }

    fn payoff_from_shadow(&self, k: f64, c: f64, j: f64) -> f64 {
        let s = self.policy.sigma(k);
        self.utility.value(c) - self.utility.value(s) + (s - c) * j
    }

    /// `v(k) - ∫ h u(σ(K)) dt` for a candidate value `v`.
    pub fn ie_residual(&self, kernel: &DiscountKernel, v: &CandidateValue, ks: &[f64]) -> Result<Vec<f64>, FlowError> {
        ks.iter().map(|&k| Ok(v.value(k) - self.value(kernel, k)?)).collect()
    }

    /// `λ v(k) - ∫ (λ h + h') u(σ(K)) dt - max_c [u(c) + v'(k)(f(k) - c)]`
    /// with `λ = -h'(0+)` and `h'` the absolutely continuous derivative.
    /// For an exponential kernel the integral vanishes and this is the HJB
    /// residual.
    pub fn de_residual(&self, kernel: &DiscountKernel, v: &CandidateValue, ks: &[f64]) -> Result<Vec<f64>, FlowError> {
        let lam = kernel.initial_rate();
        let nonlocal = kernel.nonlocal_sum();
        ks.iter()
            .map(|&k| {
                let extra = if nonlocal.is_zero() { 0.0 } else { self.discounted_utility(&nonlocal, k)? };
                let sup = self.utility.hamiltonian_max(v.deriv(k), self.tech.output(k));
                Ok(lam * v.value(k) - extra - sup)
            })
            .collect()
    }

    /// `-∫ h' u(σ(K)) dt / ∫ h u(σ(K)) dt`.
    pub fn effective_discount_rate(&self, kernel: &DiscountKernel, k: f64) -> Result<f64, FlowError> {
        let num = -self.discounted_utility(&kernel.derivative_sum(), k)?;
        let den = self.value(kernel, k)?;
        if den.abs() < 1e-12 * (1.0 + num.abs()) {
            return Err(FlowError::DegenerateValue { k });
        }
        Ok(num / den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn linear_setup(a: f64, s: f64) -> (PolicyFunction, Technology) {
        (PolicyFunction::linear(s).unwrap(), Technology::linear(a).unwrap())
    }

    #[test]
    fn linear_flow_is_exponential() {
        let (p, t) = linear_setup(0.07, 0.05);
        let ev = Evaluator::new(&p, &t, Utility::Log);
        let fr = ev.integrate_flow(3.0, 40.0).unwrap();
        for tt in [0.0, 1.5, 17.0, 40.0] {
            assert_relative_eq!(fr.capital(tt), 3.0 * (0.02 * tt).exp(), max_relative = 1e-9);
            assert_relative_eq!(fr.resolvent(tt), (0.02 * tt).exp(), max_relative = 1e-9);
        }
    }

    #[test]
    fn affine_tail_is_exact_for_log_of_exponential_path() {
        let (p, t) = linear_setup(0.08, 0.05);
        let ev = Evaluator::new(&p, &t, Utility::Log);
        let h = DiscountKernel::exponential(0.05).unwrap();
        let k: f64 = 4.0;
        let exact = ((0.05 * k).ln() + (0.08 - 0.05) / 0.05) / 0.05;
        // Limited by the 1e-8 relative integration tolerance on K.
        assert_relative_eq!(ev.value(&h, k).unwrap(), exact, max_relative = 1e-8);
    }

    #[test]
    fn payoff_vanishes_at_policy_consumption() {
        let (p, t) = linear_setup(0.08, 0.05);
        let ev = Evaluator::new(&p, &t, Utility::Log);
        let h = DiscountKernel::exponential(0.05).unwrap();
        assert_eq!(ev.perturbation_payoff(&h, 2.0, p.sigma(2.0)).unwrap(), 0.0);
    }

    #[test]
    fn start_at_steady_state_uses_closed_tail() {
        let t = Technology::cobb_douglas(1.0, 0.3).unwrap();
        let p = PolicyFunction::linear(0.1).unwrap().with_located_steady_state(&t);
        let kb = p.steady_state().unwrap();
        let ev = Evaluator::new(&p, &t, Utility::Log);
        let h = DiscountKernel::exponential(0.05).unwrap();
        assert_relative_eq!(ev.value(&h, kb).unwrap(), t.output(kb).ln() / 0.05, max_relative = 1e-12);
    }
}
