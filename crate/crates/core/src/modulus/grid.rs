//! Tensor-product axes graded geometrically away from focus coordinates.
//!
//! Within each gap the lines follow `ξ(d) = ln(1 + c d)/c` sampled at half
//! integers, where `d` is the distance to the nearer focus and `c = γ/h`.
//! The local spacing is then about `h + γ d`, every focus sits at the middle
//! of a cell, and refining (halving `h` and `γ` together) doubles the number
//! of cells per gap while sampling the same map.

/// Axis description at the coarsest level.
#[derive(Debug, Clone)]
pub(crate) struct AxisSpec {
    pub foci: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
    pub h: f64,
    pub grading: f64,
}

fn xi(c: f64, d: f64) -> f64 {
    if c == 0.0 {
        d
    } else {
        (c * d).ln_1p() / c
    }
}

fn inv_xi(c: f64, x: f64) -> f64 {
    if c == 0.0 {
        x
    } else {
        (c * x).exp_m1() / c
    }
}

fn cells(c: f64, length: f64, h: f64, level: u32) -> (usize, f64) {
    let total = xi(c, length);
    let n0 = ((total / h).round() as usize).max(1);
    let n = n0 << level;
    (n, total / n as f64)
}

impl AxisSpec {
    fn merged_foci(&self) -> Vec<f64> {
        let mut f: Vec<f64> = self.foci.iter().copied().filter(|v| *v > self.lo && *v < self.hi).collect();
        f.sort_by(|a, b| a.total_cmp(b));
        let tol = 1e-3 * self.h;
        let mut out: Vec<f64> = Vec::with_capacity(f.len());
        let mut group: Vec<f64> = Vec::new();
        for v in f {
            if let Some(&last) = group.last() {
                if v - last > tol {
                    out.push(group.iter().sum::<f64>() / group.len() as f64);
                    group.clear();
                }
            }
            group.push(v);
        }
        if !group.is_empty() {
            out.push(group.iter().sum::<f64>() / group.len() as f64);
        }
        out
    }

    /// Grid lines at refinement `level` (0 = coarsest).
    pub fn lines(&self, level: u32) -> Vec<f64> {
        let c = self.grading / self.h;
        let foci = self.merged_foci();
        let mut out = vec![self.lo];
        if foci.is_empty() {
            let (n, _) = cells(0.0, self.hi - self.lo, self.h, level);
            for i in 1..n {
                out.push(self.lo + (self.hi - self.lo) * i as f64 / n as f64);
            }
            out.push(self.hi);
            return out;
        }
        // outer part below the first focus
        let f0 = foci[0];
        let (n, hp) = cells(c, f0 - self.lo, self.h, level);
        for k in (0..n).rev() {
            out.push(f0 - inv_xi(c, (k as f64 + 0.5) * hp));
        }
        for w in foci.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (n, hp) = cells(c, 0.5 * (b - a), self.h, level);
            for k in 0..n {
                out.push(a + inv_xi(c, (k as f64 + 0.5) * hp));
            }
            for k in (0..n).rev() {
                out.push(b - inv_xi(c, (k as f64 + 0.5) * hp));
            }
        }
        let fl = foci[foci.len() - 1];
        let (n, hp) = cells(c, self.hi - fl, self.h, level);
        for k in 0..n {
            out.push(fl + inv_xi(c, (k as f64 + 0.5) * hp));
        }
        out.push(self.hi);
        out.sort_by(|a, b| a.total_cmp(b));
        out.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + a.abs()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_without_grading() {
        let a = AxisSpec { foci: vec![0.5], lo: 0.0, hi: 1.0, h: 0.1, grading: 0.0 };
        let l = a.lines(0);
        assert_eq!(l.len(), 12);
        assert!(l.windows(2).all(|w| (w[1] - w[0] - 0.1).abs() < 1e-12 || (w[1] - w[0] - 0.05).abs() < 1e-12));
        // focus is a cell midpoint
        assert!(l.iter().all(|&x| (x - 0.5).abs() > 0.04));
        assert_eq!(a.lines(1).len(), 22);
    }

    #[test]
    fn graded_spacing_grows_away_from_focus() {
        let a = AxisSpec { foci: vec![0.0], lo: -1000.0, hi: 1000.0, h: 0.01, grading: 0.2 };
        let l = a.lines(0);
        assert!(l.len() < 200, "{}", l.len());
        let near = l.iter().filter(|x| x.abs() < 0.01).count();
        assert_eq!(near, 2);
        let l1 = a.lines(1);
        assert!(l1.len() >= 2 * l.len() - 3);
        assert!(l.windows(2).all(|w| w[1] > w[0]));
        assert_eq!((l[0], l[l.len() - 1]), (-1000.0, 1000.0));
    }

    #[test]
    fn close_foci_are_merged() {
        let a = AxisSpec { foci: vec![0.0, 1e-9, 1.0], lo: -1.0, hi: 2.0, h: 0.1, grading: 0.1 };
        assert_eq!(a.merged_foci().len(), 2);
    }
}
