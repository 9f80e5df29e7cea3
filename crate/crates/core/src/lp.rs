//! Small exact linear programs: `max c·x` subject to `A x <= b`, `x >= 0`.
//!
//! Dense two-phase simplex over rationals with Bland's rule, so it always
//! terminates. Sized for the handful of variables and few dozen constraints
//! that rate regions need; it makes no attempt at sparsity.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> Rational {
        self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for x in self.rows[r].iter_mut() {
            *x /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f.is_zero() {
                continue;
            }
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= f * y;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations maximizing `cost` over the columns where
    /// `allowed` holds. Returns false if the objective is unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: &dyn Fn(usize) -> bool) -> bool {
        loop {
            let mut entering = None;
            for j in 0..self.width {
                if !allowed(j) || self.basis.contains(&j) {
                    continue;
                }
                let mut reduced = cost[j];
                for (i, &b) in self.basis.iter().enumerate() {
                    let a = self.rows[i][j];
                    if !a.is_zero() {
                        reduced -= cost[b] * a;
                    }
                }
                if reduced.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else { return true };
            let mut leaving: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leaving {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            let Some((r, _)) = leaving else { return false };
            self.pivot(r, c);
        }
    }
}

/// Maximizes `c·x` subject to `a x <= b` and `x >= 0`.
pub fn maximize(c: &[Rational], a: &[Vec<Rational>], b: &[Rational]) -> LpOutcome {
    let n = c.len();
    let m = a.len();
    assert_eq!(b.len(), m, "one bound per constraint row");
    assert!(a.iter().all(|row| row.len() == n), "constraint rows must match objective length");

    let negative: Vec<usize> = (0..m).filter(|&i| b[i].is_negative()).collect();
    let k = negative.len();
    let width = n + m + k;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art = 0;
    for i in 0..m {
        let mut row = vec![Rational::zero(); width + 1];
        let flip = b[i].is_negative();
        let sign = if flip { -Rational::one() } else { Rational::one() };
        for j in 0..n {
            row[j] = a[i][j] * sign;
        }
        row[n + i] = sign;
        row[width] = b[i] * sign;
        if flip {
            row[n + m + art] = Rational::one();
            basis.push(n + m + art);
            art += 1;
        } else {
            basis.push(n + i);
        }
        rows.push(row);
    }
    let mut tab = Tableau { rows, basis, width };
    let is_art = |j: usize| j >= n + m;

    if k > 0 {
        let mut cost1 = vec![Rational::zero(); width];
        for c in cost1.iter_mut().skip(n + m) {
            *c = -Rational::one();
        }
        tab.optimize(&cost1, &|_| true);
        let infeasibility: Rational = (0..tab.rows.len()).filter(|&i| is_art(tab.basis[i])).map(|i| tab.rhs(i)).sum();
        if infeasibility.is_positive() {
            return LpOutcome::Infeasible;
        }
        // Drive zero-valued artificials out of the basis; drop rows that are
        // linear combinations of the others.
        let mut i = 0;
        while i < tab.rows.len() {
            if is_art(tab.basis[i]) {
                if let Some(j) = (0..n + m).find(|&j| !tab.rows[i][j].is_zero()) {
                    tab.pivot(i, j);
                    i += 1;
                } else {
                    tab.rows.remove(i);
                    tab.basis.remove(i);
                }
            } else {
                i += 1;
            }
        }
    }

    let mut cost = vec![Rational::zero(); width];
    cost[..n].copy_from_slice(c);
    if !tab.optimize(&cost, &|j| !is_art(j)) {
        return LpOutcome::Unbounded;
    }
    let mut point = vec![Rational::zero(); n];
    for (i, &bv) in tab.basis.iter().enumerate() {
        if bv < n {
            point[bv] = tab.rhs(i);
        }
    }
    let value = c.iter().zip(&point).map(|(ci, xi)| ci * xi).sum();
    LpOutcome::Optimal { value, point }
}

/// Whether `{a x <= b, x >= 0}` is nonempty.
pub fn feasible(a: &[Vec<Rational>], b: &[Rational], n: usize) -> bool {
    !matches!(maximize(&vec![Rational::zero(); n], a, b), LpOutcome::Infeasible)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y; x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        let out = maximize(&r(&[3, 5]), &[r(&[1, 0]), r(&[0, 2]), r(&[3, 2])], &r(&[4, 12, 18]));
        assert_eq!(out, LpOutcome::Optimal { value: int(36), point: r(&[2, 6]) });
    }

    #[test]
    fn needs_phase_one() {
        // max -x - y; x + y >= 1 (as -x - y <= -1), x <= 3 -> -1
        let out = maximize(&r(&[-1, -1]), &[r(&[-1, -1]), r(&[1, 0])], &r(&[-1, 3]));
        assert_eq!(out.value(), Some(int(-1)));
        // x >= 2 and x <= 1
        let out = maximize(&r(&[1]), &[r(&[-1]), r(&[1])], &r(&[-2, 1]));
        assert_eq!(out, LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_and_trivial() {
        assert_eq!(maximize(&r(&[1, 0]), &[r(&[0, 1])], &r(&[1])), LpOutcome::Unbounded);
        assert_eq!(maximize(&r(&[0, 0]), &[], &[]).value(), Some(int(0)));
        assert_eq!(maximize(&r(&[1]), &[], &[]), LpOutcome::Unbounded);
    }

    #[test]
    fn fractional_optimum() {
        let out = maximize(&[int(1), int(2)], &[r(&[2, 1]), r(&[1, 3])], &r(&[3, 4]));
        // Vertices (0,0), (3/2,0), (1,1), (0,4/3); x + 2y peaks at (1,1).
        assert_eq!(out.value(), Some(int(3)));
        let out = maximize(&[int(0), int(1)], &[r(&[2, 1]), r(&[1, 3])], &r(&[3, 4]));
        assert_eq!(out.value(), Some(frac(4, 3)));
    }

    #[test]
    fn degenerate_duplicate_rows() {
        let out = maximize(&r(&[1, 1]), &[r(&[1, 1]), r(&[1, 1]), r(&[-1, -1]), r(&[1, 0])], &r(&[2, 2, -2, 1]));
        assert_eq!(out.value(), Some(int(2)));
    }

    /// Brute-force 2-variable optimum over all pairwise line intersections.
    fn brute_2d(c: &[Rational], a: &[Vec<Rational>], b: &[Rational]) -> Option<Rational> {
        let mut lines: Vec<(Vec<Rational>, Rational)> = a.iter().cloned().zip(b.iter().cloned()).collect();
        lines.push((r(&[-1, 0]), int(0)));
        lines.push((r(&[0, -1]), int(0)));
        let mut best: Option<Rational> = None;
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let (p, q) = (&lines[i], &lines[j]);
                let det = p.0[0] * q.0[1] - p.0[1] * q.0[0];
                if det.is_zero() {
                    continue;
                }
                let x = (p.1 * q.0[1] - p.0[1] * q.1) / det;
                let y = (p.0[0] * q.1 - p.1 * q.0[0]) / det;
                let ok = x >= int(0) && y >= int(0) && a.iter().zip(b).all(|(row, bi)| row[0] * x + row[1] * y <= *bi);
                if ok {
                    let v = c[0] * x + c[1] * y;
                    best = Some(best.map_or(v, |bb: Rational| bb.max(v)));
                }
            }
        }
        best
    }

    #[test]
    fn agrees_with_vertex_brute_force_on_bounded_2d() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..400 {
            let m = rng.gen_range(1..6);
            let mut a: Vec<Vec<Rational>> = (0..m).map(|_| vec![int(rng.gen_range(-3..4)), int(rng.gen_range(-3..4))]).collect();
            let mut b: Vec<Rational> = (0..m).map(|_| frac(rng.gen_range(-4..9), rng.gen_range(1..4))).collect();
            // Box to keep it bounded.
            a.push(r(&[1, 0]));
            b.push(int(5));
            a.push(r(&[0, 1]));
            b.push(int(5));
            let c = vec![int(rng.gen_range(-3..4)), int(rng.gen_range(-3..4))];
            let lp = maximize(&c, &a, &b);
            let brute = brute_2d(&c, &a, &b);
            match (lp, brute) {
                (LpOutcome::Optimal { value, point }, Some(v)) => {
                    assert_eq!(value, v);
                    assert!(a.iter().zip(&b).all(|(row, bi)| row[0] * point[0] + row[1] * point[1] <= *bi));
                }
                (LpOutcome::Infeasible, None) => {}
                (lp, brute) => panic!("mismatch: {lp:?} vs {brute:?}"),
            }
        }
    }
}
