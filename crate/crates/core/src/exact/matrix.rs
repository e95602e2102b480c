//! Dense exact matrices over a cyclotomic field, with the linear algebra
//! the rest of the crate needs: products, rank, nullspace, solving.

use super::cyclo::Cyclo;
use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    a: Vec<Cyclo>,
}

impl Mat {
    pub fn zero(rows: usize, cols: usize, order: u32) -> Self {
        Mat {
            rows,
            cols,
            a: vec![Cyclo::zero(order); rows * cols],
        }
    }

    pub fn identity(n: usize, order: u32) -> Self {
        let mut m = Self::zero(n, n, order);
        for i in 0..n {
            m[(i, i)] = Cyclo::one(order);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Cyclo>>) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut a = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            a.extend(row);
        }
        Mat { rows: r, cols: c, a }
    }

    pub fn order(&self) -> u32 {
        self.a
            .first()
            .map(|c| c.order())
            .expect("order of empty matrix")
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let a = self
            .a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| x.add(y))
            .collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            a,
        }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let a = self
            .a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| x.sub(y))
            .collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            a,
        }
    }

    pub fn neg(&self) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            a: self.a.iter().map(|x| x.neg()).collect(),
        }
    }

    pub fn scale(&self, c: &Cyclo) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            a: self.a.iter().map(|x| x.mul(c)).collect(),
        }
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let order = if self.a.is_empty() {
            other.order()
        } else {
            self.order()
        };
        let mut out = Mat::zero(self.rows, other.cols, order);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let x = &self[(i, k)];
                if x.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let y = &other[(k, j)];
                    if y.is_zero() {
                        continue;
                    }
                    let t = out[(i, j)].add(&x.mul(y));
                    out[(i, j)] = t;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zero(self.cols, self.rows, self.order());
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn trace(&self) -> Cyclo {
        assert_eq!(self.rows, self.cols);
        let mut t = Cyclo::zero(self.order());
        for i in 0..self.rows {
            t = t.add(&self[(i, i)]);
        }
        t
    }

    pub fn map(&self, f: impl Fn(&Cyclo) -> Cyclo) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            a: self.a.iter().map(f).collect(),
        }
    }

    /// Row-reduce `self` in place (returning pivot columns); used by rank,
    /// nullspace and solve below.
    fn rref(mut self) -> (Mat, Vec<usize>) {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            // find pivot
            let mut piv = None;
            for i in r..self.rows {
                if !self[(i, c)].is_zero() {
                    piv = Some(i);
                    break;
                }
            }
            let Some(p) = piv else { continue };
            if p != r {
                for j in 0..self.cols {
                    let tmp = self[(p, j)].clone();
                    self[(p, j)] = self[(r, j)].clone();
                    self[(r, j)] = tmp;
                }
            }
            let inv = self[(r, c)].inv().expect("pivot invertible");
            for j in 0..self.cols {
                self[(r, j)] = self[(r, j)].mul(&inv);
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero() {
                    let f = self[(i, c)].clone();
                    for j in 0..self.cols {
                        let t = self[(i, j)].sub(&f.mul(&self[(r, j)]));
                        self[(i, j)] = t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (self, pivots)
    }

    pub fn rank(&self) -> usize {
        let (_, pivots) = self.clone().rref();
        pivots.len()
    }

    /// Basis of the right nullspace (vectors of length self.cols).
    pub fn nullspace(&self) -> Vec<Vec<Cyclo>> {
        let order = self.order();
        let (r, pivots) = self.clone().rref();
        let mut basis = Vec::new();
        let piv_set: std::collections::HashSet<usize> = pivots.iter().cloned().collect();
        for free in 0..self.cols {
            if piv_set.contains(&free) {
                continue;
            }
            let mut v = vec![Cyclo::zero(order); self.cols];
            v[free] = Cyclo::one(order);
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = r[(ri, free)].neg();
            }
            basis.push(v);
        }
        basis
    }

    /// Solve self * x = b; returns one exact solution if consistent.
    pub fn solve(&self, b: &[Cyclo]) -> Option<Vec<Cyclo>> {
        assert_eq!(b.len(), self.rows);
        let order = self.order();
        let mut aug = Mat::zero(self.rows, self.cols + 1, order);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (r, pivots) = aug.rref();
        // inconsistent if a pivot lands in the augmented column
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![Cyclo::zero(order); self.cols];
        for (ri, &pc) in pivots.iter().enumerate() {
            x[pc] = r[(ri, self.cols)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Mat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let order = self.order();
        let mut aug = Mat::zero(n, 2 * n, order);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Cyclo::one(order);
        }
        let (r, pivots) = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        let mut out = Mat::zero(n, n, order);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(out)
    }

    pub fn col(&self, j: usize) -> Vec<Cyclo> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    /// Embed all entries into a larger cyclotomic field.
    pub fn embed(&self, m: u32) -> Mat {
        self.map(|c| c.embed(m))
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = Cyclo;
    fn index(&self, (i, j): (usize, usize)) -> &Cyclo {
        &self.a[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cyclo {
        &mut self.a[i * self.cols + j]
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{}  ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(es: [i64; 4], order: u32) -> Mat {
        Mat::from_rows(vec![
            vec![Cyclo::from_i64(order, es[0]), Cyclo::from_i64(order, es[1])],
            vec![Cyclo::from_i64(order, es[2]), Cyclo::from_i64(order, es[3])],
        ])
    }

    #[test]
    fn inverse_and_rank() {
        let m = m2([1, 2, 3, 5], 4);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Mat::identity(2, 4));
        assert_eq!(m.rank(), 2);
        let s = m2([1, 2, 2, 4], 4);
        assert_eq!(s.rank(), 1);
        assert!(s.inverse().is_none());
        assert_eq!(s.nullspace().len(), 1);
    }

    #[test]
    fn solve_consistency() {
        let m = m2([1, 1, 0, 1], 4);
        let b = vec![Cyclo::from_i64(4, 3), Cyclo::from_i64(4, 1)];
        let x = m.solve(&b).unwrap();
        assert_eq!(x[0], Cyclo::from_i64(4, 2));
        assert_eq!(x[1], Cyclo::from_i64(4, 1));
    }
}
