//! Value iteration on the fully observable relaxation.

use rayon::prelude::*;

use crate::error::ModelError;
use crate::pomdp::{Action, Tabular};

/// Optimal values and greedy actions of the underlying MDP.
#[derive(Debug, Clone, PartialEq)]
pub struct MdpSolution {
    /// `V_MDP`, indexed by [`Tabular::state_index`].
    pub values: Vec<f64>,
    /// Greedy action per state (lowest index on ties).
    pub policy: Vec<Action>,
    /// Sup-norm Bellman residual of `values`.
    pub residual: f64,
}

impl MdpSolution {
    pub fn value<M: Tabular>(&self, model: &M, s: &M::State) -> f64 {
        self.values[model.state_index(s)]
    }

    pub fn action<M: Tabular>(&self, model: &M, s: &M::State) -> Action {
        self.policy[model.state_index(s)]
    }
}

/// Flattened transition table: for state `i` and action `a`, the entries
/// `rows[starts[i * A + a]..starts[i * A + a + 1]]`.
struct Table {
    actions: usize,
    starts: Vec<usize>,
    rows: Vec<(u32, f64, f64)>,
}

impl Table {
    fn build<M: Tabular>(model: &M) -> Self {
        let n = model.num_indexed_states();
        let actions = model.num_actions();
        let per_state: Vec<Vec<Vec<(u32, f64, f64)>>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let s = model.state_at(i);
                if model.is_terminal(&s) {
                    return vec![Vec::new(); actions];
                }
                (0..actions)
                    .map(|a| {
                        model
                            .transitions(&s, a)
                            .into_iter()
                            .map(|t| (t.next as u32, t.prob, t.reward))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let mut starts = Vec::with_capacity(n * actions + 1);
        let mut rows = Vec::new();
        for state in per_state {
            for row in state {
                starts.push(rows.len());
                rows.extend(row);
            }
        }
        starts.push(rows.len());
        Table { actions, starts, rows }
    }

    fn q(&self, values: &[f64], i: usize, a: usize, discount: f64) -> f64 {
        let k = i * self.actions + a;
        self.rows[self.starts[k]..self.starts[k + 1]]
            .iter()
            .map(|&(next, p, r)| p * (r + discount * values[next as usize]))
            .sum()
    }

    /// One Jacobi backup: new values and greedy actions. Terminal states
    /// (empty rows) keep value 0.
    fn backup(&self, values: &[f64], discount: f64) -> (Vec<f64>, Vec<Action>) {
        let n = values.len();
        (0..n)
            .into_par_iter()
            .map(|i| {
                if self.starts[i * self.actions] == self.starts[(i + 1) * self.actions] {
                    return (0.0, 0);
                }
                let mut best = f64::NEG_INFINITY;
                let mut arg = 0;
                for a in 0..self.actions {
                    let q = self.q(values, i, a, discount);
                    if q > best {
                        best = q;
                        arg = a;
                    }
                }
                (best, arg)
            })
            .unzip()
    }
}

/// Solve the MDP to a sup-norm Bellman residual of at most `tol`.
pub fn mdp_value_iteration<M: Tabular>(model: &M, tol: f64) -> Result<MdpSolution, ModelError> {
    if !(tol > 0.0) {
        return Err(ModelError::InvalidParameters(format!("tolerance {tol} must be positive")));
    }
    let discount = model.discount();
    let table = Table::build(model);
    let mut values = vec![0.0; model.num_indexed_states()];
    loop {
        let (next, policy) = table.backup(&values, discount);
        let residual = next
            .iter()
            .zip(&values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        values = next;
        if residual <= tol {
            // report the residual of the values actually returned
            let (check, _) = table.backup(&values, discount);
            let residual = check
                .iter()
                .zip(&values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            return Ok(MdpSolution { values, policy, residual });
        }
    }
}
