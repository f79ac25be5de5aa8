//! Analytic objective gradients: reverse accumulation through the smooth
//! robustness recursion, then the discrete adjoint of the dynamics.

use crate::formula::{Formula, PredicateMode};
use crate::semantics::plan::{Node, Plan};
use crate::semantics::smooth;
use crate::semantics::EvalError;
use crate::signal::Signal;

use super::{simulate, simulate_unchecked, total_cost, StageCost, SynthesisError, SynthesisProblem};

/// Robustness value together with its gradient over all signal samples,
/// flattened as `grad[t * n_components + component]`.
struct ValGrad {
    value: f64,
    grad: Vec<f64>,
}

/// Smooth weighted robustness at time 0 and its gradient with respect to
/// every sample of `signal`.
pub(crate) fn smooth_rob_with_sample_grad(
    formula: &Formula,
    signal: &Signal,
    beta: f64,
    mode_override: Option<PredicateMode>,
) -> Result<(f64, Vec<f64>), EvalError> {
    let plan = Plan::build(formula, signal.components(), mode_override)?;
    let needed = formula.horizon();
    if needed > signal.last_index() {
        return Err(EvalError::HorizonExceedsSignal {
            needed,
            available: signal.last_index(),
        });
    }
    let times = signal.len();
    let n_comp = signal.components().len();
    let mut memo: Vec<Option<ValGrad>> = std::iter::repeat_with(|| None)
        .take(plan.nodes.len() * times)
        .collect();
    let key = eval(&plan, signal, beta, &mut memo, times, n_comp, plan.root, 0);
    let root = memo[key].take().expect("root evaluated");
    Ok((root.value, root.grad))
}

#[allow(clippy::too_many_arguments)]
fn eval(
    plan: &Plan,
    signal: &Signal,
    beta: f64,
    memo: &mut Vec<Option<ValGrad>>,
    times: usize,
    n_comp: usize,
    id: usize,
    t: usize,
) -> usize {
    let key = id * times + t;
    if memo[key].is_some() {
        return key;
    }
    let dims = times * n_comp;
    let entry = match &plan.nodes[id] {
        Node::True => ValGrad {
            value: f64::INFINITY,
            grad: vec![0.0; dims],
        },
        Node::False => ValGrad {
            value: f64::NEG_INFINITY,
            grad: vec![0.0; dims],
        },
        Node::Pred { terms, offset, mode } => {
            let raw = terms
                .iter()
                .map(|(c, coef)| coef * signal.value(t, *c))
                .sum::<f64>()
                + offset;
            let mut grad = vec![0.0; dims];
            let value = match mode {
                PredicateMode::Metric { scale } => {
                    for (c, coef) in terms {
                        grad[t * n_comp + c] += scale * coef;
                    }
                    scale * raw
                }
                // a step in the signal value: zero gradient almost everywhere
                PredicateMode::Boolean { magnitude } => {
                    if raw >= 0.0 {
                        *magnitude
                    } else {
                        -magnitude
                    }
                }
            };
            ValGrad { value, grad }
        }
        Node::Not(sub) => {
            let child_key = eval(plan, signal, beta, memo, times, n_comp, *sub, t);
            let child = memo[child_key].as_ref().unwrap();
            ValGrad {
                value: -child.value,
                grad: child.grad.iter().map(|g| -g).collect(),
            }
        }
        Node::Nary { or, subs, wbar } => {
            let keys: Vec<usize> = subs
                .iter()
                .map(|s| eval(plan, signal, beta, memo, times, n_comp, *s, t))
                .collect();
            combine(*or, beta, wbar, &keys, memo, dims)
        }
        Node::Temporal { eventually, a, b, sub, wbar } => {
            let keys: Vec<usize> = (t + a..=t + b)
                .map(|tp| eval(plan, signal, beta, memo, times, n_comp, *sub, tp))
                .collect();
            combine(*eventually, beta, wbar, &keys, memo, dims)
        }
    };
    memo[key] = Some(entry);
    key
}

fn combine(
    or: bool,
    beta: f64,
    wbar: &[f64],
    child_keys: &[usize],
    memo: &[Option<ValGrad>],
    dims: usize,
) -> ValGrad {
    if child_keys.len() == 1 {
        // singleton aggregation is the identity, as in the value engine
        let child = memo[child_keys[0]].as_ref().unwrap();
        return ValGrad {
            value: child.value,
            grad: child.grad.clone(),
        };
    }
    let xs: Vec<f64> = child_keys
        .iter()
        .map(|k| memo[*k].as_ref().unwrap().value)
        .collect();
    let mut terms = Vec::with_capacity(xs.len());
    let mut term_grads = Vec::with_capacity(xs.len());
    for (w, x) in wbar.iter().zip(&xs) {
        if or {
            terms.push(smooth::disj_term(beta, *w, *x));
            term_grads.push(smooth::disj_term_grad(beta, *w, *x));
        } else {
            terms.push(smooth::conj_term(beta, *w, *x));
            term_grads.push(smooth::conj_term_grad(beta, *w, *x));
        }
    }
    let (value, agg_grads) = if or {
        smooth::softmax_with_weights(beta, &terms)
    } else {
        smooth::softmin_with_weights(beta, &terms)
    };
    let mut grad = vec![0.0; dims];
    for ((key, agg), dterm) in child_keys.iter().zip(&agg_grads).zip(&term_grads) {
        let factor = agg * dterm;
        if factor == 0.0 {
            continue;
        }
        let child = memo[*key].as_ref().unwrap();
        for (slot, g) in grad.iter_mut().zip(&child.grad) {
            *slot += factor * g;
        }
    }
    ValGrad { value, grad }
}

/// Gradient of `smooth robustness - lambda * J` with respect to every input
/// component, via the adjoint recursion
///
/// ```text
/// adj(T) = d rob / d q(T)
/// grad_u(t) = B(t)^T adj(t+1) - lambda * dJ/du(t)
/// adj(t) = d rob / d q(t) + A(t)^T adj(t+1)
/// ```
pub(crate) fn analytic_gradient(
    problem: &SynthesisProblem,
    inputs: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>, SynthesisError> {
    let system = problem.system.as_ref();
    let trajectory = simulate(system, &problem.q0, inputs)?;
    let (_, sample_grad) = smooth_rob_with_sample_grad(
        &problem.formula,
        &trajectory,
        problem.config.beta,
        problem.config.predicate_mode,
    )?;

    let n = system.state_dim();
    let m = system.input_dim();
    let steps = inputs.len();

    let mut adj: Vec<f64> = sample_grad[steps * n..(steps + 1) * n].to_vec();
    let mut grad = vec![vec![0.0; m]; steps];
    for t in (0..steps).rev() {
        let q_t = trajectory.sample(t);
        let u_t = &inputs[t];
        let a = system.jac_state(q_t, u_t);
        let b = system.jac_input(q_t, u_t);
        for (k, slot) in grad[t].iter_mut().enumerate() {
            *slot = (0..n).map(|i| b[i * m + k] * adj[i]).sum();
        }
        let mut prev = vec![0.0; n];
        for (i, slot) in prev.iter_mut().enumerate() {
            *slot = sample_grad[t * n + i] + (0..n).map(|j| a[j * n + i] * adj[j]).sum::<f64>();
        }
        adj = prev;
    }

    if problem.lambda != 0.0 {
        match &problem.cost {
            StageCost::Quadratic => {
                for (row, u_row) in grad.iter_mut().zip(inputs) {
                    for (slot, u) in row.iter_mut().zip(u_row) {
                        *slot -= problem.lambda * u;
                    }
                }
            }
            StageCost::Custom(_) => {
                // the stage cost may read states, so probe the whole rollout
                let cost_of = |probe: &[Vec<f64>]| -> Result<f64, SynthesisError> {
                    let traj = simulate_unchecked(system, &problem.q0, probe)?;
                    Ok(total_cost(problem, probe, &traj))
                };
                let h = 1e-6;
                let mut probe = inputs.to_vec();
                for t in 0..steps {
                    for k in 0..m {
                        probe[t][k] = inputs[t][k] + h;
                        let plus = cost_of(&probe)?;
                        probe[t][k] = inputs[t][k] - h;
                        let minus = cost_of(&probe)?;
                        probe[t][k] = inputs[t][k];
                        grad[t][k] -= problem.lambda * (plus - minus) / (2.0 * h);
                    }
                }
            }
        }
    }
    Ok(grad)
}
