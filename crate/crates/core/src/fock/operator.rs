use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::scalar::Scalar;
use super::space::FockSpace;

/// Sparse matrix in the occupation basis, stored by rows.
#[derive(Debug, Clone)]
pub struct FockOperator<S: Scalar> {
    pub space: Arc<FockSpace>,
    rows: Vec<Vec<(usize, S)>>,
}

impl<S: Scalar> FockOperator<S> {
    pub fn zero(space: &Arc<FockSpace>) -> Self {
        FockOperator {
            space: space.clone(),
            rows: vec![Vec::new(); space.dim()],
        }
    }

    pub fn identity(space: &Arc<FockSpace>) -> Self {
        Self::diagonal(space, |_| S::one())
    }

    pub fn diagonal(space: &Arc<FockSpace>, f: impl Fn(usize) -> S) -> Self {
        let rows = (0..space.dim())
            .map(|i| {
                let v = f(i);
                if v.is_zero() {
                    Vec::new()
                } else {
                    vec![(i, v)]
                }
            })
            .collect();
        FockOperator {
            space: space.clone(),
            rows,
        }
    }

    /// Operator from `(row, col, value)` entries; duplicates are summed.
    pub fn from_entries(
        space: &Arc<FockSpace>,
        entries: impl IntoIterator<Item = (usize, usize, S)>,
    ) -> Self {
        let mut acc: Vec<BTreeMap<usize, S>> = vec![BTreeMap::new(); space.dim()];
        for (r, c, v) in entries {
            let e = acc[r].entry(c).or_insert_with(S::zero);
            *e = e.clone() + v;
        }
        Self::from_maps(space, acc)
    }

    fn from_maps(space: &Arc<FockSpace>, acc: Vec<BTreeMap<usize, S>>) -> Self {
        FockOperator {
            space: space.clone(),
            rows: acc
                .into_iter()
                .map(|m| m.into_iter().filter(|(_, v)| !v.is_zero()).collect())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, r: usize, c: usize) -> S {
        self.rows[r]
            .iter()
            .find(|(j, _)| *j == c)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(S::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &S)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, c.to_owned(), v)))
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_entries(
            &self.space,
            self.entries()
                .map(|(r, c, v)| (r, c, v.clone()))
                .chain(o.entries().map(|(r, c, v)| (r, c, v.clone()))),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-S::one()))
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::from_entries(
            &self.space,
            self.entries()
                .map(|(r, c, v)| (r, c, v.clone() * s.clone())),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        let acc: Vec<BTreeMap<usize, S>> = self
            .rows
            .iter()
            .map(|row| {
                let mut m: BTreeMap<usize, S> = BTreeMap::new();
                for (k, a) in row {
                    for (c, b) in &o.rows[*k] {
                        let e = m.entry(*c).or_insert_with(S::zero);
                        *e = e.clone() + a.clone() * b.clone();
                    }
                }
                m
            })
            .collect();
        Self::from_maps(&self.space, acc)
    }

    /// `[self, o]`
    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_entries(
            &self.space,
            self.entries().map(|(r, c, v)| (c, r, v.conj())),
        )
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.entries()
            .map(|(_, _, v)| v.magnitude())
            .fold(0.0, f64::max)
    }

    /// `‖A − A†‖_max`
    pub fn hermiticity_defect(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs()
    }

    /// Change in total occupation the operator induces, if uniform.
    pub fn number_offset(&self) -> Option<i64> {
        let mut off = None;
        for (r, c, _) in self.entries() {
            let d = self.space.total(r) as i64 - self.space.total(c) as i64;
            match off {
                None => off = Some(d),
                Some(o) if o != d => return None,
                _ => {}
            }
        }
        off.or(Some(0))
    }
}

/// Maximum entry of `a − b`.
pub fn deviation<S: Scalar>(a: &FockOperator<S>, b: &FockOperator<S>) -> f64 {
    a.sub(b).max_abs()
}

impl FockOperator<Complex64> {
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (r, c, v) in self.entries() {
            m[(r, c)] = *v;
        }
        m
    }

    pub fn from_dense(space: &Arc<FockSpace>, m: &DMatrix<Complex64>) -> Self {
        let n = m.nrows();
        Self::from_entries(
            space,
            (0..n)
                .flat_map(|r| (0..n).map(move |c| (r, c)))
                .filter_map(|(r, c)| {
                    let v = m[(r, c)];
                    (v.norm() > 0.0).then_some((r, c, v))
                }),
        )
    }
}
