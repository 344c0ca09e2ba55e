use serde::{Deserialize, Serialize};

/// Dense row-major `k × k` matrix. Serializes as a list of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<T>>", try_from = "Vec<Vec<T>>")]
#[serde(bound(serialize = "T: Clone + Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Clone> SquareMatrix<T> {
    pub fn filled(n: usize, value: T) -> Self {
        SquareMatrix {
            n,
            data: vec![value; n * n],
        }
    }
}

impl<T> SquareMatrix<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.n + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        (0..self.n).map(move |i| self.row(i))
    }
}

impl SquareMatrix<f64> {
    pub fn from_rows(rows: &[&[f64]]) -> Option<Self> {
        Self::try_from(rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).ok()
    }
}

impl<T: Clone> From<SquareMatrix<T>> for Vec<Vec<T>> {
    fn from(m: SquareMatrix<T>) -> Self {
        m.rows().map(<[T]>::to_vec).collect()
    }
}

impl<T> TryFrom<Vec<Vec<T>>> for SquareMatrix<T> {
    type Error = String;

    fn try_from(rows: Vec<Vec<T>>) -> Result<Self, String> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(format!("matrix with {n} rows is not square"));
        }
        Ok(SquareMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }
}
