//! Two-dimensional product codes with identical row and column codes.

use crate::bch::ComponentCode;

/// Square row-major matrix; entry `(i, j)` is row `i`, column `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

pub type BitMatrix = Matrix<u8>;
pub type LlrMatrix = Matrix<f64>;

impl<T: Copy + Default> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![T::default(); n * n] }
    }

    pub fn from_vec(n: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), n * n, "matrix data must hold n^2 entries");
        Matrix { n, data }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, T> {
        self.data.chunks_exact(self.n)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn map<U: Copy + Default>(&self, f: impl Fn(T) -> U) -> Matrix<U> {
        Matrix { n: self.n, data: self.data.iter().map(|&x| f(x)).collect() }
    }
}

impl BitMatrix {
    pub fn xor(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.n, other.n);
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a ^ b).collect(),
        }
    }

    pub fn weight(&self) -> usize {
        self.data.iter().filter(|&&b| b != 0).count()
    }
}

#[derive(Debug, Clone)]
pub struct ProductCode {
    component: ComponentCode,
}

impl ProductCode {
    pub fn new(component: ComponentCode) -> Self {
        ProductCode { component }
    }

    pub fn component(&self) -> &ComponentCode {
        &self.component
    }

    pub fn n(&self) -> usize {
        self.component.n()
    }

    pub fn k(&self) -> usize {
        self.component.k()
    }

    /// `k^2 / n^2`.
    pub fn rate(&self) -> f64 {
        let (k, n) = (self.k() as f64, self.n() as f64);
        (k * k) / (n * n)
    }

    /// Places the k x k message in the top-left block, encodes the first k
    /// rows, then every column.
    pub fn encode(&self, message: &BitMatrix) -> BitMatrix {
        let (n, k) = (self.n(), self.k());
        assert_eq!(message.n(), k, "message must be k x k");
        let mut out = BitMatrix::zeros(n);
        for i in 0..k {
            self.component.encode_into(message.row(i), out.row_mut(i));
        }
        let mut col = vec![0u8; n];
        for j in 0..n {
            let msg: Vec<u8> = (0..k).map(|i| out.get(i, j)).collect();
            self.component.encode_into(&msg, &mut col);
            for (i, &b) in col.iter().enumerate().skip(k) {
                out.set(i, j, b);
            }
        }
        out
    }

    /// The k x k information block of an n x n array.
    pub fn message(&self, array: &BitMatrix) -> BitMatrix {
        BitMatrix::from_fn(self.k(), |i, j| array.get(i, j))
    }

    pub fn is_codeword(&self, array: &BitMatrix) -> bool {
        assert_eq!(array.n(), self.n());
        array.rows().all(|r| self.component.is_codeword(r))
            && (0..self.n()).all(|j| self.component.is_codeword(&array.column(j)))
    }
}
