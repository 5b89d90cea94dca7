//! Minimal dense integer tensor kernel.
//!
//! Cells are `u32`; tensors in a boolean role hold only `{0, 1}`. The kernel
//! provides exactly the operations the enforcement loop needs: axis sums,
//! nonzero scans, unit-axis insertion/removal, elementwise selection and
//! comparison masks, a batched matrix-vector product, and slicing by index
//! lists. There is no broadcasting beyond the leading axis of
//! [`batched_matvec`], no strides, and no floating point.
//!
//! Every operation is a pure function of its inputs. Operations may fan
//! elementwise or per-slice work out to scoped worker threads (see
//! [`with_workers`]); outputs are bit-identical for every worker count
//! because each output cell is computed independently in a fixed order.

use crate::error::{Error, Result};
use std::cell::Cell;
use std::fmt;

thread_local! {
    static WORKERS: Cell<usize> = const { Cell::new(1) };
}

struct WorkerGuard(usize);

impl Drop for WorkerGuard {
    fn drop(&mut self) {
        WORKERS.with(|w| w.set(self.0));
    }
}

/// Runs `f` with the kernel worker count set to `workers` (at least 1) on the
/// current thread, restoring the previous count afterwards.
pub fn with_workers<R>(workers: usize, f: impl FnOnce() -> R) -> R {
    let prev = WORKERS.with(|w| w.replace(workers.max(1)));
    let _guard = WorkerGuard(prev);
    f()
}

/// Kernel worker count currently in effect on this thread. Defaults to 1.
pub fn current_workers() -> usize {
    WORKERS.with(Cell::get)
}

/// Below this many cells the kernel always runs sequentially; spawning
/// threads costs more than the work itself.
const PARALLEL_CUTOFF: usize = 4096;

/// Fills `out[i] = f(i)` for all i, partitioning the flat cell range across
/// the current worker count. Each cell is written by exactly one worker, so
/// the result does not depend on scheduling.
#[cfg(not(target_arch = "wasm32"))]
fn fill_cells(out: &mut [u32], f: impl Fn(usize) -> u32 + Sync) {
    let workers = current_workers();
    if workers <= 1 || out.len() < PARALLEL_CUTOFF {
        for (i, cell) in out.iter_mut().enumerate() {
            *cell = f(i);
        }
        return;
    }
    let chunk = out.len().div_ceil(workers);
    std::thread::scope(|scope| {
        for (ci, part) in out.chunks_mut(chunk).enumerate() {
            let f = &f;
            scope.spawn(move || {
                let base = ci * chunk;
                for (i, cell) in part.iter_mut().enumerate() {
                    *cell = f(base + i);
                }
            });
        }
    });
}

#[cfg(target_arch = "wasm32")]
fn fill_cells(out: &mut [u32], f: impl Fn(usize) -> u32 + Sync) {
    for (i, cell) in out.iter_mut().enumerate() {
        *cell = f(i);
    }
}

/// Dense row-major tensor of non-negative integers.
#[derive(Clone, PartialEq, Eq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<u32>,
}

impl fmt::Debug for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.data.len() <= 32 {
            write!(
                f,
                "Tensor{{shape: {:?}, data: {:?}}}",
                self.shape, self.data
            )
        } else {
            write!(
                f,
                "Tensor{{shape: {:?}, data: [{} cells]}}",
                self.shape,
                self.data.len()
            )
        }
    }
}

impl Tensor {
    /// Builds a tensor from a shape and flat row-major data.
    pub fn new(shape: Vec<usize>, data: Vec<u32>) -> Result<Self> {
        let numel: usize = shape.iter().product();
        if numel != data.len() {
            return Err(Error::ShapeDataMismatch {
                shape,
                len: data.len(),
            });
        }
        Ok(Self { shape, data })
    }

    pub fn from_elem(shape: Vec<usize>, value: u32) -> Self {
        let numel: usize = shape.iter().product();
        Self {
            shape,
            data: vec![value; numel],
        }
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        Self::from_elem(shape, 0)
    }

    pub fn ones(shape: Vec<usize>) -> Self {
        Self::from_elem(shape, 1)
    }

    /// Rank-0 tensor holding a single value.
    pub fn scalar(value: u32) -> Self {
        Self {
            shape: Vec::new(),
            data: vec![value],
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    /// Cell at a full index tuple. Panics on rank or bounds violations;
    /// intended for construction code and tests, not hot paths.
    pub fn get(&self, index: &[usize]) -> u32 {
        assert_eq!(index.len(), self.rank(), "index rank mismatch");
        let mut flat = 0;
        for (axis, &i) in index.iter().enumerate() {
            assert!(i < self.shape[axis], "index out of bounds");
            flat = flat * self.shape[axis] + i;
        }
        self.data[flat]
    }

    fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut index = vec![0; self.rank()];
        for axis in (0..self.rank()).rev() {
            index[axis] = flat % self.shape[axis];
            flat /= self.shape[axis];
        }
        index
    }

    /// Sums out one axis. Negative `dim` counts from the end.
    pub fn sum_along(&self, dim: isize) -> Result<Tensor> {
        let axis = normalize_axis(dim, self.rank())?;
        let axis_len = self.shape[axis];
        let inner: usize = self.shape[axis + 1..].iter().product();
        let out_shape: Vec<usize> = self
            .shape
            .iter()
            .enumerate()
            .filter_map(|(i, &s)| (i != axis).then_some(s))
            .collect();
        let mut out = vec![0u32; out_shape.iter().product()];
        let data = &self.data;
        fill_cells(&mut out, |cell| {
            let outer = cell / inner;
            let offset = cell % inner;
            let base = outer * axis_len * inner + offset;
            let mut sum = 0u32;
            for j in 0..axis_len {
                sum += data[base + j * inner];
            }
            sum
        });
        Tensor::new(out_shape, out)
    }

    /// True iff some cell is nonzero.
    pub fn any_true(&self) -> bool {
        self.data.iter().any(|&v| v != 0)
    }

    /// Index tuples of all nonzero cells, ascending in row-major order.
    pub fn nonzero_indices(&self) -> Vec<Vec<usize>> {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(flat, _)| self.unravel(flat))
            .collect()
    }

    /// Inserts a size-1 axis at `dim`. For rank r, `dim` ranges over
    /// `0..=r`; negative values count from the end of that range.
    pub fn dim_expand(&self, dim: isize) -> Result<Tensor> {
        let rank = self.rank();
        let adjusted = if dim < 0 {
            dim + rank as isize + 1
        } else {
            dim
        };
        if adjusted < 0 || adjusted > rank as isize {
            return Err(Error::AxisOutOfRange { dim, rank });
        }
        let mut shape = self.shape.clone();
        shape.insert(adjusted as usize, 1);
        Ok(Tensor {
            shape,
            data: self.data.clone(),
        })
    }

    /// Removes a size-1 axis at `dim` (negative counts from the end).
    pub fn dim_reduct(&self, dim: isize) -> Result<Tensor> {
        let axis = normalize_axis(dim, self.rank())?;
        if self.shape[axis] != 1 {
            return Err(Error::AxisNotUnit {
                axis,
                size: self.shape[axis],
            });
        }
        let mut shape = self.shape.clone();
        shape.remove(axis);
        Ok(Tensor {
            shape,
            data: self.data.clone(),
        })
    }

    /// Gathers the listed positions along `dim`, in `idx` order. The result
    /// has `shape[dim] == idx.len()`; an empty list yields an empty axis.
    pub fn index_select(&self, dim: isize, idx: &[usize]) -> Result<Tensor> {
        let axis = normalize_axis(dim, self.rank())?;
        let size = self.shape[axis];
        for &i in idx {
            if i >= size {
                return Err(Error::IndexOutOfBounds {
                    index: i,
                    axis,
                    size,
                });
            }
        }
        let inner: usize = self.shape[axis + 1..].iter().product();
        let outer: usize = self.shape[..axis].iter().product();
        let mut out_shape = self.shape.clone();
        out_shape[axis] = idx.len();
        let mut out = Vec::with_capacity(outer * idx.len() * inner);
        for o in 0..outer {
            let base = o * size * inner;
            for &j in idx {
                out.extend_from_slice(&self.data[base + j * inner..base + (j + 1) * inner]);
            }
        }
        Tensor::new(out_shape, out)
    }

    /// Mask with 1 where `self > rhs`.
    pub fn gt_scalar(&self, rhs: u32) -> Tensor {
        self.map_mask(|v| v > rhs)
    }

    /// Mask with 1 where `self != rhs`.
    pub fn ne_scalar(&self, rhs: u32) -> Tensor {
        self.map_mask(|v| v != rhs)
    }

    /// Elementwise equality mask against a same-shape tensor.
    pub fn eq_elem(&self, other: &Tensor) -> Result<Tensor> {
        self.zip_mask(other, |a, b| a == b)
    }

    /// Elementwise inequality mask against a same-shape tensor.
    pub fn ne_elem(&self, other: &Tensor) -> Result<Tensor> {
        self.zip_mask(other, |a, b| a != b)
    }

    fn map_mask(&self, pred: impl Fn(u32) -> bool + Sync) -> Tensor {
        let mut out = vec![0u32; self.data.len()];
        let data = &self.data;
        fill_cells(&mut out, |i| u32::from(pred(data[i])));
        Tensor {
            shape: self.shape.clone(),
            data: out,
        }
    }

    fn zip_mask(&self, other: &Tensor, pred: impl Fn(u32, u32) -> bool + Sync) -> Result<Tensor> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch {
                left: self.shape.clone(),
                right: other.shape.clone(),
            });
        }
        let mut out = vec![0u32; self.data.len()];
        let (a, b) = (&self.data, &other.data);
        fill_cells(&mut out, |i| u32::from(pred(a[i], b[i])));
        Ok(Tensor {
            shape: self.shape.clone(),
            data: out,
        })
    }
}

/// Cellwise select: where `cond` is nonzero take `x`, else `y`. All three
/// tensors must share one shape; callers pre-slice instead of broadcasting.
pub fn where_select(cond: &Tensor, x: &Tensor, y: &Tensor) -> Result<Tensor> {
    if cond.shape != x.shape {
        return Err(Error::ShapeMismatch {
            left: cond.shape.clone(),
            right: x.shape.clone(),
        });
    }
    if cond.shape != y.shape {
        return Err(Error::ShapeMismatch {
            left: cond.shape.clone(),
            right: y.shape.clone(),
        });
    }
    let mut out = vec![0u32; cond.data.len()];
    let (c, xs, ys) = (&cond.data, &x.data, &y.data);
    fill_cells(&mut out, |i| if c[i] != 0 { xs[i] } else { ys[i] });
    Ok(Tensor {
        shape: cond.shape.clone(),
        data: out,
    })
}

/// Batched integer matrix-vector product.
///
/// `a` has shape `[n, k, p, q]` and `v` has shape `[k, q, 1]`; `v` is reused
/// for each of the `n` leading slices of `a`. The result has shape
/// `[n, k, p, 1]` with `out[i, j, r, 0] = sum_t a[i, j, r, t] * v[j, t, 0]`.
/// Work is partitioned over the leading axis.
pub fn batched_matvec(a: &Tensor, v: &Tensor) -> Result<Tensor> {
    let mismatch = || Error::ShapeMismatch {
        left: a.shape.clone(),
        right: v.shape.clone(),
    };
    if a.rank() != 4 || v.rank() != 3 {
        return Err(mismatch());
    }
    let (n, k, p, q) = (a.shape[0], a.shape[1], a.shape[2], a.shape[3]);
    if v.shape != [k, q, 1] {
        return Err(mismatch());
    }
    let row_block = k * p;
    let mut out = vec![0u32; n * row_block];
    let run_rows = |first_row: usize, block: &mut [u32]| {
        for (off, cell) in block.iter_mut().enumerate() {
            let i = first_row + off / row_block;
            let rem = off % row_block;
            let j = rem / p;
            let r = rem % p;
            let a_base = ((i * k + j) * p + r) * q;
            let v_base = j * q;
            let mut acc = 0u32;
            for t in 0..q {
                acc += a.data[a_base + t] * v.data[v_base + t];
            }
            *cell = acc;
        }
    };
    let workers = current_workers();
    if cfg!(target_arch = "wasm32") || workers <= 1 || out.len() < PARALLEL_CUTOFF || row_block == 0
    {
        run_rows(0, &mut out);
    } else {
        #[cfg(not(target_arch = "wasm32"))]
        {
            let rows_per = n.div_ceil(workers);
            std::thread::scope(|scope| {
                for (ci, block) in out.chunks_mut(rows_per * row_block).enumerate() {
                    let run_rows = &run_rows;
                    scope.spawn(move || run_rows(ci * rows_per, block));
                }
            });
        }
    }
    Tensor::new(vec![n, k, p, 1], out)
}

fn normalize_axis(dim: isize, rank: usize) -> Result<usize> {
    let adjusted = if dim < 0 { dim + rank as isize } else { dim };
    if adjusted < 0 || adjusted >= rank as isize {
        return Err(Error::AxisOutOfRange { dim, rank });
    }
    Ok(adjusted as usize)
}
