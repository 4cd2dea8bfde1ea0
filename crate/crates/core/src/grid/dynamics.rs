use nalgebra::{DMatrix, DVector};

use crate::error::{GridflexError, Result};
use crate::grid::{ControlInput, Disturbance, GridSpec, GridState, KnownInput};

/// Residual tolerance (infinity norm) for accepting an implicit step.
pub const NEWTON_TOL: f64 = 1e-9;
/// Iteration cap for the damped Newton solver.
pub const NEWTON_MAX_ITER: usize = 50;

/// Net power injection at every node: generation plus deployed reserves,
/// plus wind forecast and error, minus load, minus storage power.
pub fn node_power_balance(
    spec: &GridSpec,
    state: &GridState,
    u: &ControlInput,
    v: &KnownInput,
    w: &Disturbance,
) -> Result<Vec<f64>> {
    state.check_dims(spec)?;
    u.check_dims(spec)?;
    v.check_dims(spec)?;
    w.check_dims(spec)?;

    let mut pbar = vec![0.0; spec.n_t()];
    for (i, &node) in spec.gen_node.iter().enumerate() {
        pbar[node] += state.p_gen[i] + u.r_gen[i];
    }
    for (m, &node) in spec.farm_node.iter().enumerate() {
        pbar[node] += v.p_wind_fc[m] + w.dp_wind[m];
    }
    for (n, p) in pbar.iter_mut().enumerate() {
        *p -= v.p_load[n];
    }
    for (s, &node) in spec.battery_node.iter().enumerate() {
        pbar[node] -= v.p_stor[s] + u.r_stor[s];
    }
    Ok(pbar)
}

/// Backward-Euler residual of the coupled angle/frequency swing dynamics,
/// evaluated at `state_next` with injections `pbar_next`.
///
/// For every node n the residual has two components:
///   delta_n(k+1) - delta_n(k) - dt * omega_n(k+1)
///   m_n (omega_n(k+1) - omega_n(k)) - dt * (pbar_n - d_n omega_n(k+1) - flows_n)
///
/// where flows_n is the sinusoidal coupling to the neighbouring nodes.
/// A zero residual means `state_next` satisfies the implicit step.
pub fn swing_residual(
    spec: &GridSpec,
    state_next: &GridState,
    state: &GridState,
    pbar_next: &[f64],
) -> Result<Vec<f64>> {
    state.check_dims(spec)?;
    state_next.check_dims(spec)?;
    if pbar_next.len() != spec.n_t() {
        return Err(GridflexError::Dimension(
            "pbar length does not match node count".into(),
        ));
    }
    let n_t = spec.n_t();
    let dt = spec.dt;
    let mut r = vec![0.0; 2 * n_t];
    for n in 0..n_t {
        r[n] = state_next.delta[n] - state.delta[n] - dt * state_next.omega[n];
        let flows: f64 = spec
            .neighbors(n)
            .map(|(p, b)| b * (state_next.delta[n] - state_next.delta[p]).sin())
            .sum();
        r[n_t + n] = spec.inertia[n] * (state_next.omega[n] - state.omega[n])
            - dt * (pbar_next[n] - spec.damping[n] * state_next.omega[n] - flows);
    }
    Ok(r)
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, &x| a.max(x.abs()))
}

/// Solves the implicit angle/frequency sub-system by damped Newton
/// iteration, starting from `state` as the initial guess. Returns the
/// converged (delta, omega) pair.
fn solve_swing(spec: &GridSpec, state: &GridState, next_template: &mut GridState, pbar: &[f64]) -> Result<()> {
    let n_t = spec.n_t();
    let dt = spec.dt;

    next_template.delta = state.delta.clone();
    next_template.omega = state.omega.clone();

    let mut residual = swing_residual(spec, next_template, state, pbar)?;
    let mut norm = inf_norm(&residual);

    for iter in 0..NEWTON_MAX_ITER {
        if norm <= NEWTON_TOL {
            return Ok(());
        }
        // Jacobian over unknowns y = (delta(k+1), omega(k+1)).
        let mut jac = DMatrix::<f64>::zeros(2 * n_t, 2 * n_t);
        for n in 0..n_t {
            jac[(n, n)] = 1.0;
            jac[(n, n_t + n)] = -dt;
            let mut diag = 0.0;
            for (p, b) in spec.neighbors(n) {
                let c = b * (next_template.delta[n] - next_template.delta[p]).cos();
                diag += c;
                jac[(n_t + n, p)] = -dt * c;
            }
            jac[(n_t + n, n)] = dt * diag;
            jac[(n_t + n, n_t + n)] = spec.inertia[n] + dt * spec.damping[n];
        }
        let rhs = DVector::from_column_slice(&residual);
        let step = jac.lu().solve(&rhs).ok_or(GridflexError::NewtonDiverged {
            iterations: iter,
            residual: norm,
        })?;

        // Backtracking line search on the residual norm.
        let mut alpha = 1.0;
        loop {
            let mut trial = next_template.clone();
            for n in 0..n_t {
                trial.delta[n] -= alpha * step[n];
                trial.omega[n] -= alpha * step[n_t + n];
            }
            let trial_res = swing_residual(spec, &trial, state, pbar)?;
            let trial_norm = inf_norm(&trial_res);
            if trial_norm < norm || alpha < 1.0 / 64.0 {
                next_template.delta = trial.delta;
                next_template.omega = trial.omega;
                residual = trial_res;
                norm = trial_norm;
                break;
            }
            alpha *= 0.5;
        }
    }
    if norm <= NEWTON_TOL {
        Ok(())
    } else {
        Err(GridflexError::NewtonDiverged {
            iterations: NEWTON_MAX_ITER,
            residual: norm,
        })
    }
}

/// One backward-Euler step of the full discrete dynamics.
///
/// Generator outputs and battery SoC integrate explicitly; the
/// angle/frequency sub-system solves the implicit swing residual to
/// `NEWTON_TOL`. `v` and `w` are the known input and realized disturbance
/// in effect at the arrival step, consistent with the implicit scheme
/// evaluating the injections at k+1.
pub fn step_dynamics(
    spec: &GridSpec,
    state: &GridState,
    u: &ControlInput,
    v: &KnownInput,
    w: &Disturbance,
) -> Result<GridState> {
    state.check_dims(spec)?;
    u.check_dims(spec)?;

    let dt = spec.dt;
    let mut next = state.clone();
    next.k = state.k + 1;
    for i in 0..spec.n_g() {
        next.p_gen[i] = state.p_gen[i] + dt * u.dp_gen[i];
    }
    for s in 0..spec.n_s() {
        next.soc[s] = state.soc[s]
            + dt * (v.p_stor[s] + u.r_stor[s]) * spec.battery_efficiency
                / (3600.0 * spec.battery_capacity[s]);
    }

    let pbar = node_power_balance(spec, &next, u, v, w)?;
    solve_swing(spec, state, &mut next, &pbar)?;
    Ok(next)
}

/// Solves the static power-flow equilibrium: angles such that the line
/// flows carry the given injections with zero frequency deviation. The
/// first node is the angle reference. Requires the injections to sum to
/// (approximately) zero.
pub fn solve_equilibrium_angles(spec: &GridSpec, pbar: &[f64]) -> Result<Vec<f64>> {
    let n_t = spec.n_t();
    if pbar.len() != n_t {
        return Err(GridflexError::Dimension(
            "pbar length does not match node count".into(),
        ));
    }
    let total: f64 = pbar.iter().sum();
    if total.abs() > 1e-6 {
        return Err(GridflexError::Argument(format!(
            "equilibrium requires balanced injections, got total {total:.3e} MW"
        )));
    }
    let mut delta = vec![0.0; n_t];
    if n_t == 1 {
        return Ok(delta);
    }

    let mismatch = |delta: &[f64]| -> Vec<f64> {
        (0..n_t)
            .map(|n| {
                let flows: f64 = spec
                    .neighbors(n)
                    .map(|(p, b)| b * (delta[n] - delta[p]).sin())
                    .sum();
                pbar[n] - flows
            })
            .collect()
    };

    let mut res = mismatch(&delta);
    for iter in 0..NEWTON_MAX_ITER {
        // Drop node 0 as the reference: unknowns are delta[1..].
        let norm = inf_norm(&res[1..]);
        if norm <= NEWTON_TOL {
            return Ok(delta);
        }
        let m = n_t - 1;
        let mut jac = DMatrix::<f64>::zeros(m, m);
        for n in 1..n_t {
            let mut diag = 0.0;
            for (p, b) in spec.neighbors(n) {
                let c = b * (delta[n] - delta[p]).cos();
                diag += c;
                if p >= 1 {
                    jac[(n - 1, p - 1)] += c;
                }
            }
            jac[(n - 1, n - 1)] -= diag;
        }
        let rhs = DVector::from_iterator(m, res[1..].iter().map(|&r| -r));
        let step = jac.lu().solve(&rhs).ok_or(GridflexError::NewtonDiverged {
            iterations: iter,
            residual: norm,
        })?;
        for n in 1..n_t {
            delta[n] += step[n - 1];
        }
        res = mismatch(&delta);
    }
    let norm = inf_norm(&res[1..]);
    if norm <= NEWTON_TOL {
        Ok(delta)
    } else {
        Err(GridflexError::NewtonDiverged {
            iterations: NEWTON_MAX_ITER,
            residual: norm,
        })
    }
}
