//! Brute-force reference computations.
//!
//! Everything here starts from the raw model parameters, enumerates the full
//! `p(D, E, U, R)` table with its own loops and obtains every quantity by
//! summing and dividing cells of that table. None of it goes through the
//! library's law accessors.
#![allow(dead_code)]

use mnar_bounds::ModelParams;

/// `joint[d][e][u][r]`
pub struct Joint {
    pub k: usize,
    pub table: Vec<Vec<Vec<Vec<f64>>>>,
}

pub fn enumerate(params: &ModelParams) -> Joint {
    let k = params.u_card;
    let bern = |p: f64, v: usize| if v == 1 { p } else { 1.0 - p };
    let mut table = vec![vec![vec![vec![0.0; 2]; k]; 2]; 2];
    for (d, by_d) in table.iter_mut().enumerate() {
        for (e, by_e) in by_d.iter_mut().enumerate() {
            for (u, by_u) in by_e.iter_mut().enumerate() {
                for (r, cell) in by_u.iter_mut().enumerate() {
                    *cell = params.p_u[u]
                        * bern(params.p_e1_given_u[u], e)
                        * bern(params.p_d1_given_eu[e][u], d)
                        * bern(params.p_r1_given_eu[e][u], r);
                }
            }
        }
    }
    Joint { k, table }
}

impl Joint {
    /// Sum of cells matching every `Some` coordinate.
    pub fn mass(&self, d: Option<usize>, e: Option<usize>, u: Option<usize>, r: Option<usize>) -> f64 {
        let mut total = 0.0;
        for dd in 0..2 {
            for ee in 0..2 {
                for uu in 0..self.k {
                    for rr in 0..2 {
                        let keep = d.is_none_or(|x| x == dd)
                            && e.is_none_or(|x| x == ee)
                            && u.is_none_or(|x| x == uu)
                            && r.is_none_or(|x| x == rr);
                        if keep {
                            total += self.table[dd][ee][uu][rr];
                        }
                    }
                }
            }
        }
        total
    }

    /// `p(D = 1 | E = e, U = u)` from the full table.
    pub fn outcome_given_eu(&self, e: usize, u: usize) -> f64 {
        self.mass(Some(1), Some(e), Some(u), None) / self.mass(None, Some(e), Some(u), None)
    }

    /// `p(D = 1 | E = e, U = u, R = 0)` from the full table.
    pub fn outcome_given_eu_r0(&self, e: usize, u: usize) -> f64 {
        self.mass(Some(1), Some(e), Some(u), Some(0)) / self.mass(None, Some(e), Some(u), Some(0))
    }

    pub fn p_u(&self, u: usize) -> f64 {
        self.mass(None, None, Some(u), None)
    }

    /// `p(D_e = 1)` by adjustment, with both factors read off the table.
    pub fn true_potential(&self, e: usize) -> f64 {
        (0..self.k).map(|u| self.outcome_given_eu(e, u) * self.p_u(u)).sum()
    }

    /// `p(U = u | E = e, R = r)`.
    pub fn confounder_given_er(&self, u: usize, e: usize, r: usize) -> f64 {
        self.mass(None, Some(e), Some(u), Some(r)) / self.mass(None, Some(e), None, Some(r))
    }

    /// `p(D = 1 | E = e, R = 1)`.
    pub fn outcome_given_e_r1(&self, e: usize) -> f64 {
        self.mass(Some(1), Some(e), None, Some(1)) / self.mass(None, Some(e), None, Some(1))
    }

    /// Complete-case adjustment.
    pub fn complete_case(&self, e: usize) -> f64 {
        let p_r0 = self.mass(None, None, None, Some(0));
        (0..self.k)
            .map(|u| self.outcome_given_eu_r0(e, u) * self.mass(None, None, Some(u), Some(0)) / p_r0)
            .sum()
    }

    /// Marginal of `U` after every incomplete case with `(D, E) = (d, e)` is
    /// completed with `p(U | D = d, E = e, R = 0)`.
    pub fn completed_confounder(&self) -> Vec<f64> {
        let mut completed = vec![0.0; self.k];
        for d in 0..2 {
            for e in 0..2 {
                let observed = self.mass(Some(d), Some(e), None, Some(0));
                let missing = self.mass(Some(d), Some(e), None, Some(1));
                for (u, c) in completed.iter_mut().enumerate() {
                    let cell = self.mass(Some(d), Some(e), Some(u), Some(0));
                    *c += cell + missing * cell / observed;
                }
            }
        }
        completed
    }

    pub fn multiple_imputation(&self, e: usize) -> f64 {
        self.completed_confounder()
            .iter()
            .enumerate()
            .map(|(u, q)| self.outcome_given_eu_r0(e, u) * q)
            .sum()
    }

    /// `p(D_e = 1)` from the counterfactual decomposition, with
    /// `p(U | E = 1 - e, R = 1)` replaced by `weights`.
    pub fn potential_with_missing_weights(&self, e: usize, weights: &[f64]) -> f64 {
        let other = 1 - e;
        let factual = self.mass(Some(1), Some(e), None, None);
        let observed: f64 = (0..self.k)
            .map(|u| self.outcome_given_eu_r0(e, u) * self.mass(None, Some(other), Some(u), Some(0)))
            .sum();
        let missing: f64 = (0..self.k)
            .map(|u| self.outcome_given_eu_r0(e, u) * weights[u])
            .sum::<f64>()
            * self.mass(None, Some(other), None, Some(1));
        factual + observed + missing
    }

    /// Assumption-free bounds on `p(D_e = 1)` by enumerating the vertices of
    /// the simplex of `p(U | E = 1 - e, R = 1)`; the decomposition is linear in
    /// those weights so its extremes sit at point masses.
    pub fn vertex_bounds(&self, e: usize) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for vertex in 0..self.k {
            let mut w = vec![0.0; self.k];
            w[vertex] = 1.0;
            let v = self.potential_with_missing_weights(e, &w);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi.min(1.0))
    }

    /// Extremes of `p(U | E = e, R = 1)`.
    pub fn sensitivity_extremes(&self, e: usize) -> (f64, f64) {
        let ws: Vec<f64> = (0..self.k).map(|u| self.confounder_given_er(u, e, 1)).collect();
        (
            ws.iter().cloned().fold(f64::INFINITY, f64::min),
            ws.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        )
    }
}
