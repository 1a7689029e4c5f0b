use rand::Rng;

use super::{NumericsError, Real};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor2<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Real> Tensor2<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<F>) -> Result<Self, NumericsError> {
        if data.len() != rows * cols {
            return Err(NumericsError::Shape(format!(
                "{} values for a {rows}x{cols} tensor",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// I.i.d. uniform entries on `[-scale, scale]`.
    pub fn uniform<R: Rng>(rows: usize, cols: usize, scale: f64, rng: &mut R) -> Self {
        let data = (0..rows * cols)
            .map(|_| F::lit(rng.gen_range(-scale..=scale)))
            .collect();
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[F] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [F] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<F> {
        self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> F {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: F) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [F] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn fill(&mut self, v: F) {
        self.data.iter_mut().for_each(|x| *x = v);
    }

    /// `out += self · x`
    pub fn matvec_acc(&self, x: &[F], out: &mut [F]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (r, o) in out.iter_mut().enumerate() {
            let row = self.row(r);
            let mut acc = F::zero();
            for (a, b) in row.iter().zip(x) {
                acc = acc + *a * *b;
            }
            *o = *o + acc;
        }
    }

    /// `out += selfᵀ · x`
    pub fn matvec_t_acc(&self, x: &[F], out: &mut [F]) {
        debug_assert_eq!(x.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        for (r, &xr) in x.iter().enumerate() {
            if xr == F::zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(r)) {
                *o = *o + *a * xr;
            }
        }
    }

    /// `self += a · bᵀ`
    pub fn add_outer(&mut self, a: &[F], b: &[F]) {
        debug_assert_eq!(a.len(), self.rows);
        debug_assert_eq!(b.len(), self.cols);
        for (r, &ar) in a.iter().enumerate() {
            if ar == F::zero() {
                continue;
            }
            for (d, bc) in self.row_mut(r).iter_mut().zip(b) {
                *d = *d + ar * *bc;
            }
        }
    }

    /// `self += other`
    pub fn add_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.shape(), other.shape());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + *b;
        }
    }

    pub fn scale(&mut self, s: F) {
        self.data.iter_mut().for_each(|x| *x = *x * s);
    }

    /// Plain triple-loop product.
    pub fn matmul(&self, other: &Self) -> Result<Self, NumericsError> {
        if self.cols != other.rows {
            return Err(NumericsError::Shape(format!(
                "cannot multiply {:?} by {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = out.data[idx] + a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// Cache-blocked product; same accumulation order per output entry as
    /// [`Tensor2::matmul`] so results are bit-identical.
    pub fn matmul_blocked(&self, other: &Self, block: usize) -> Result<Self, NumericsError> {
        if self.cols != other.rows {
            return Err(NumericsError::Shape(format!(
                "cannot multiply {:?} by {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let block = block.max(1);
        let mut out = Self::zeros(self.rows, other.cols);
        for i0 in (0..self.rows).step_by(block) {
            for j0 in (0..other.cols).step_by(block) {
                let i1 = (i0 + block).min(self.rows);
                let j1 = (j0 + block).min(other.cols);
                for i in i0..i1 {
                    for k in 0..self.cols {
                        let a = self.get(i, k);
                        for j in j0..j1 {
                            let idx = i * other.cols + j;
                            out.data[idx] = out.data[idx] + a * other.get(k, j);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn check_finite(&self, what: &str) -> Result<(), NumericsError> {
        match self.data.iter().position(|x| !x.is_finite()) {
            Some(index) => Err(NumericsError::NonFinite { what: what.to_string(), index }),
            None => Ok(()),
        }
    }

    pub fn cast<G: Real>(&self) -> Tensor2<G> {
        Tensor2 {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| G::lit(x.as_f64())).collect(),
        }
    }
}
