//! Householder QR with column-norm pivoting (Businger–Golub), used for every
//! least-squares solve so that collinear designs are detected and named.

/// Relative threshold on `|R_kk| / |R_00|` below which a column is declared
/// linearly dependent on the columns pivoted before it.
pub const RANK_TOL: f64 = 1e-10;

pub(crate) struct PivotedQr {
    n: usize,
    p: usize,
    /// Column-major; Householder vectors below the diagonal, R above.
    a: Vec<f64>,
    /// Leading element of each Householder vector.
    v0: Vec<f64>,
    beta: Vec<f64>,
    /// Diagonal of R.
    rdiag: Vec<f64>,
    /// Column scaling applied before factoring.
    scale: Vec<f64>,
    /// `perm[k]` is the original column placed at position k.
    pub perm: Vec<usize>,
    pub rank: usize,
}

impl PivotedQr {
    /// Factors an `n x p` column-major matrix. Columns are scaled to unit norm
    /// first so the rank decision does not depend on units.
    pub fn new(data: &[f64], n: usize, p: usize) -> Self {
        assert_eq!(data.len(), n * p);
        let mut a = data.to_vec();
        let mut scale = vec![1.0; p];
        for j in 0..p {
            let col = &mut a[j * n..(j + 1) * n];
            let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                col.iter_mut().for_each(|v| *v /= norm);
                scale[j] = norm;
            } else {
                scale[j] = 0.0;
            }
        }
        let mut perm: Vec<usize> = (0..p).collect();
        let mut v0 = vec![0.0; p.min(n)];
        let mut beta = vec![0.0; p.min(n)];
        let mut rdiag = vec![0.0; p.min(n)];
        let steps = p.min(n);
        for k in 0..steps {
            // pivot: largest remaining column norm
            let (mut best, mut best_norm) = (k, -1.0);
            for j in k..p {
                let norm: f64 = a[j * n + k..(j + 1) * n].iter().map(|v| v * v).sum();
                if norm > best_norm {
                    best = j;
                    best_norm = norm;
                }
            }
            if best != k {
                for i in 0..n {
                    a.swap(k * n + i, best * n + i);
                }
                perm.swap(k, best);
            }
            let col = &mut a[k * n + k..(k + 1) * n];
            let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                rdiag[k] = 0.0;
                beta[k] = 0.0;
                v0[k] = 0.0;
                continue;
            }
            let alpha = if col[0] > 0.0 { -norm } else { norm };
            let lead = col[0] - alpha;
            col[0] = lead;
            let vtv: f64 = col.iter().map(|v| v * v).sum();
            let b = 2.0 / vtv;
            rdiag[k] = alpha;
            beta[k] = b;
            v0[k] = lead;
            for j in k + 1..p {
                let (left, right) = a.split_at_mut(j * n);
                let v = &left[k * n + k..(k + 1) * n];
                let target = &mut right[k..n];
                let dot: f64 = v.iter().zip(target.iter()).map(|(x, y)| x * y).sum();
                let f = b * dot;
                target.iter_mut().zip(v).for_each(|(t, vi)| *t -= f * vi);
            }
        }
        let r00 = rdiag.first().map_or(0.0, |v| v.abs());
        let rank = rdiag
            .iter()
            .take_while(|d| r00 > 0.0 && d.abs() > RANK_TOL * r00)
            .count();
        PivotedQr {
            n,
            p,
            a,
            v0,
            beta,
            rdiag,
            scale,
            perm,
            rank,
        }
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank == self.p && self.scale.iter().all(|&s| s > 0.0)
    }

    /// Original indices of the columns judged dependent.
    pub fn dependent_columns(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.perm[self.rank..].to_vec();
        for (j, s) in self.scale.iter().enumerate() {
            if *s == 0.0 && !out.contains(&j) {
                out.push(j);
            }
        }
        out.sort_unstable();
        out
    }

    /// Least-squares coefficients for a full-rank factorization.
    pub fn solve(&self, y: &[f64]) -> Vec<f64> {
        debug_assert!(self.is_full_rank());
        let n = self.n;
        let mut qty = y.to_vec();
        for k in 0..self.rank {
            let v = &self.a[k * n + k..(k + 1) * n];
            let tail = &mut qty[k..];
            // v's first entry lives in the factor storage, already equal to v0
            let dot: f64 = v.iter().zip(tail.iter()).map(|(a, b)| a * b).sum();
            let f = self.beta[k] * dot;
            tail.iter_mut().zip(v).for_each(|(t, vi)| *t -= f * vi);
        }
        let p = self.p;
        let mut z = vec![0.0; p];
        for k in (0..p).rev() {
            let mut s = qty[k];
            for j in k + 1..p {
                s -= self.a[j * n + k] * z[j];
            }
            z[k] = s / self.rdiag[k];
        }
        let mut coef = vec![0.0; p];
        for k in 0..p {
            let j = self.perm[k];
            coef[j] = z[k] / self.scale[j];
        }
        debug_assert!(self.v0.len() == self.beta.len());
        coef
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_square_system() {
        // [[2,1],[1,3]] x = [3,5] -> x = [0.8, 1.4]
        let qr = PivotedQr::new(&[2.0, 1.0, 1.0, 3.0], 2, 2);
        let x = qr.solve(&[3.0, 5.0]);
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
    }

    #[test]
    fn detects_duplicate_column() {
        let col = [1.0, 2.0, 3.0, 4.0];
        let mut data = vec![1.0; 4];
        data.extend_from_slice(&col);
        data.extend(col.iter().map(|v| 2.0 * v));
        let qr = PivotedQr::new(&data, 4, 3);
        assert_eq!(qr.rank, 2);
        assert!(!qr.is_full_rank());
        assert_eq!(qr.dependent_columns().len(), 1);
    }

    #[test]
    fn zero_column_is_dependent() {
        let data = [1.0, 1.0, 1.0, 0.0, 0.0, 0.0];
        let qr = PivotedQr::new(&data, 3, 2);
        assert_eq!(qr.dependent_columns(), vec![1]);
    }
}
