//! Flat-vector linear algebra over model parameters.
//!
//! A [`ParamVector`] is a flat `f64` buffer plus a [`Layout`] describing the
//! tensors it was flattened from. The layout is metadata only: every
//! operation here treats vectors as flat and only checks that layouts agree.
//! Sums are accumulated left to right over a fixed column order so results
//! are bit-reproducible.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Shape of one tensor inside a flattened parameter vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Shape {
    /// Row-major `(rows, cols)` matrix.
    Matrix(usize, usize),
    /// Plain vector.
    Vector(usize),
}

impl Shape {
    pub fn len(&self) -> usize {
        match *self {
            Shape::Matrix(r, c) => r * c,
            Shape::Vector(n) => n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Ordered list of tensor shapes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Layout(Vec<Shape>);

impl Layout {
    pub fn new(shapes: Vec<Shape>) -> Self {
        Layout(shapes)
    }

    /// A single flat vector of `n` elements.
    pub fn flat(n: usize) -> Self {
        Layout(vec![Shape::Vector(n)])
    }

    pub fn shapes(&self) -> &[Shape] {
        &self.0
    }

    /// Total element count.
    pub fn numel(&self) -> usize {
        self.0.iter().map(Shape::len).sum()
    }

    /// Layout of `self` followed by `other`.
    pub fn concat(&self, other: &Layout) -> Layout {
        let mut shapes = self.0.clone();
        shapes.extend_from_slice(&other.0);
        Layout(shapes)
    }
}

/// Flat parameter vector with a layout descriptor.
///
/// Construction rejects non-finite values and a length that disagrees with
/// the layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamVector {
    layout: Layout,
    values: Vec<f64>,
}

impl ParamVector {
    pub fn new(values: Vec<f64>, layout: Layout) -> Result<Self> {
        if values.len() != layout.numel() {
            return Err(Error::DimensionMismatch {
                context: "ParamVector::new",
                expected: layout.numel(),
                actual: values.len(),
            });
        }
        check_finite("ParamVector::new", &values)?;
        Ok(ParamVector { layout, values })
    }

    /// Vector with a single flat shape.
    pub fn from_flat(values: Vec<f64>) -> Result<Self> {
        let layout = Layout::flat(values.len());
        Self::new(values, layout)
    }

    pub fn zeros(layout: Layout) -> Self {
        let values = vec![0.0; layout.numel()];
        ParamVector { layout, values }
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Mutable access for in-crate kernels that keep values finite.
    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Errors if any element is NaN or infinite.
    pub fn check_finite(&self, context: &'static str) -> Result<()> {
        check_finite(context, &self.values)
    }

    fn same_layout(&self, other: &ParamVector, context: &'static str) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch(context));
        }
        Ok(())
    }

    pub fn dot(&self, other: &ParamVector) -> Result<f64> {
        self.same_layout(other, "dot")?;
        Ok(dot_slices(&self.values, &other.values))
    }

    /// Euclidean norm.
    pub fn norm2(&self) -> f64 {
        libm::sqrt(dot_slices(&self.values, &self.values))
    }

    /// `self <- self + s * other`.
    pub fn axpy(&mut self, s: f64, other: &ParamVector) -> Result<()> {
        self.same_layout(other, "axpy")?;
        for (v, w) in self.values.iter_mut().zip(&other.values) {
            *v += s * w;
        }
        Ok(())
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.values {
            *v *= s;
        }
    }

    /// Concatenate two vectors, concatenating their layouts.
    pub fn concat(&self, other: &ParamVector) -> ParamVector {
        let mut values = Vec::with_capacity(self.len() + other.len());
        values.extend_from_slice(&self.values);
        values.extend_from_slice(&other.values);
        ParamVector {
            layout: self.layout.concat(&other.layout),
            values,
        }
    }

    /// Split into a prefix with layout `head` and the remainder with layout `tail`.
    pub fn split(&self, head: &Layout, tail: &Layout) -> Result<(ParamVector, ParamVector)> {
        if head.concat(tail) != self.layout {
            return Err(Error::LayoutMismatch("split"));
        }
        let (a, b) = self.values.split_at(head.numel());
        Ok((
            ParamVector {
                layout: head.clone(),
                values: a.to_vec(),
            },
            ParamVector {
                layout: tail.clone(),
                values: b.to_vec(),
            },
        ))
    }
}

/// Elementwise `a - b`.
pub fn delta(a: &ParamVector, b: &ParamVector) -> Result<ParamVector> {
    a.same_layout(b, "delta")?;
    let values = a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect();
    Ok(ParamVector {
        layout: a.layout.clone(),
        values,
    })
}

/// `Σ_j w_j · v_j`, accumulated left to right in iteration order.
///
/// All vectors must share one layout; at least one term is required.
pub fn linear_combination<'a, I>(terms: I) -> Result<ParamVector>
where
    I: IntoIterator<Item = (&'a ParamVector, f64)>,
{
    let mut terms = terms.into_iter().peekable();
    let first = terms.peek().ok_or(Error::Empty("linear_combination terms"))?;
    let mut out = ParamVector::zeros(first.0.layout.clone());
    for (col, w) in terms {
        out.same_layout(col, "linear_combination")?;
        for (o, x) in out.values.iter_mut().zip(&col.values) {
            *o += w * x;
        }
    }
    Ok(out)
}

pub(crate) fn dot_slices(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc + x * y)
}

fn check_finite(context: &'static str, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { context, index }),
        None => Ok(()),
    }
}

/// `M` parameter vectors sharing one layout, viewed as the columns of a matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamMatrix {
    columns: Vec<ParamVector>,
}

impl ParamMatrix {
    pub fn new(columns: Vec<ParamVector>) -> Result<Self> {
        let first = columns.first().ok_or(Error::Empty("ParamMatrix columns"))?;
        if columns.iter().any(|c| c.layout != first.layout) {
            return Err(Error::LayoutMismatch("ParamMatrix::new"));
        }
        Ok(ParamMatrix { columns })
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn layout(&self) -> &Layout {
        &self.columns[0].layout
    }

    pub fn columns(&self) -> &[ParamVector] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> Result<&ParamVector> {
        let len = self.columns.len();
        self.columns.get(j).ok_or(Error::OutOfRange {
            context: "ParamMatrix::column",
            index: j,
            len,
        })
    }

    /// Replace column `j`; the new column must share the matrix layout.
    pub fn set_column(&mut self, j: usize, v: ParamVector) -> Result<()> {
        let len = self.columns.len();
        if j >= len {
            return Err(Error::OutOfRange {
                context: "ParamMatrix::set_column",
                index: j,
                len,
            });
        }
        if v.layout != self.columns[j].layout {
            return Err(Error::LayoutMismatch("ParamMatrix::set_column"));
        }
        self.columns[j] = v;
        Ok(())
    }

    /// `Σ_j weights[j] · column(j)`, i.e. the matrix-vector product `Θ w`.
    pub fn weighted_sum(&self, weights: &[f64]) -> Result<ParamVector> {
        if weights.len() != self.columns.len() {
            return Err(Error::DimensionMismatch {
                context: "weighted_sum",
                expected: self.columns.len(),
                actual: weights.len(),
            });
        }
        linear_combination(self.columns.iter().zip(weights.iter().copied()))
    }

    /// `Θᵀ v`: one dot product per column.
    pub fn transpose_mul(&self, v: &ParamVector) -> Result<Vec<f64>> {
        if v.layout != *self.layout() {
            return Err(Error::LayoutMismatch("transpose_mul"));
        }
        Ok(self
            .columns
            .iter()
            .map(|c| dot_slices(&c.values, &v.values))
            .collect())
    }

    /// Frobenius norm `‖Θ‖_F`.
    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(
            self.columns
                .iter()
                .map(|c| dot_slices(&c.values, &c.values))
                .sum(),
        )
    }

    /// Largest column norm.
    pub fn max_column_norm(&self) -> f64 {
        self.columns.iter().map(ParamVector::norm2).fold(0.0, f64::max)
    }
}

/// Euclidean norm of a plain slice.
pub fn norm_slice(v: &[f64]) -> f64 {
    libm::sqrt(dot_slices(v, v))
}
