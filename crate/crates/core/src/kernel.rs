//! Stride kernels that apply a small dense operator to selected wires of a
//! state vector in place, without materializing the full `2^n x 2^n` matrix.
//!
//! An operator touching bit positions `P` partitions the amplitude vector into
//! independent groups of `2^|P|` amplitudes. Groups are visited in a single
//! pass. With the `parallel` feature, contiguous blocks that contain whole
//! groups are processed on the rayon pool; each amplitude is computed by the
//! same arithmetic in the same order either way, so results are bit-identical.

use crate::matrix::{C64, ZERO};
use crate::qstate::bit_position;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How data-parallel work is scheduled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Execution {
    /// Everything on the calling thread.
    Serial,
    /// Use the rayon pool where the work is large enough. Falls back to
    /// serial execution when the crate is built without `parallel`.
    #[default]
    Parallel,
}

impl Execution {
    #[inline]
    pub(crate) fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// State vectors below this length are always updated serially.
pub const PARALLEL_MIN_AMPLITUDES: usize = 1 << 14;

/// Inserts a zero bit at each position of `sorted_pos` (ascending).
#[inline(always)]
fn spread(mut i: usize, sorted_pos: &[usize]) -> usize {
    for &p in sorted_pos {
        let low = i & ((1usize << p) - 1);
        i = ((i >> p) << (p + 1)) | low;
    }
    i
}

struct Plan<'a> {
    matrix: &'a [C64],
    dim: usize,
    offsets: Vec<usize>,
    sorted_pos: Vec<usize>,
    control_mask: usize,
}

impl Plan<'_> {
    fn run_block(&self, block: &mut [C64]) {
        match self.dim {
            2 => self.run_fixed::<2>(block),
            4 => self.run_fixed::<4>(block),
            8 => self.run_fixed::<8>(block),
            _ => self.run_dynamic(block),
        }
    }

    fn run_fixed<const D: usize>(&self, block: &mut [C64]) {
        let groups = block.len() >> self.sorted_pos.len();
        let mut offs = [0usize; D];
        offs.copy_from_slice(&self.offsets);
        let mut m = [[ZERO; D]; D];
        for (r, row) in m.iter_mut().enumerate() {
            row.copy_from_slice(&self.matrix[r * D..(r + 1) * D]);
        }
        for g in 0..groups {
            let base = spread(g, &self.sorted_pos) | self.control_mask;
            let mut v = [ZERO; D];
            for (slot, off) in v.iter_mut().zip(offs) {
                *slot = block[base | off];
            }
            for (row, off) in m.iter().zip(offs) {
                let mut acc = ZERO;
                for (a, b) in row.iter().zip(&v) {
                    acc += a * b;
                }
                block[base | off] = acc;
            }
        }
    }

    fn run_dynamic(&self, block: &mut [C64]) {
        let d = self.dim;
        let groups = block.len() >> self.sorted_pos.len();
        let mut v = vec![ZERO; d];
        for g in 0..groups {
            let base = spread(g, &self.sorted_pos) | self.control_mask;
            for (slot, off) in v.iter_mut().zip(&self.offsets) {
                *slot = block[base | off];
            }
            for (r, off) in self.offsets.iter().enumerate() {
                let row = &self.matrix[r * d..(r + 1) * d];
                let mut acc = ZERO;
                for (a, b) in row.iter().zip(&v) {
                    acc += a * b;
                }
                block[base | off] = acc;
            }
        }
    }
}

/// Single-qubit update on adjacent half-blocks.
fn run_single(block: &mut [C64], stride: usize, m: [C64; 4]) {
    for chunk in block.chunks_exact_mut(2 * stride) {
        let (lo, hi) = chunk.split_at_mut(stride);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = m[0] * x + m[1] * y;
            *b = m[2] * x + m[3] * y;
        }
    }
}

/// Applies `matrix` (row-major, `2^k x 2^k`) to `targets` of an `n`-qubit
/// amplitude vector, only on the subspace where every wire in `controls` is 1.
/// The first target is the most significant bit of the matrix index.
pub(crate) fn apply(
    amps: &mut [C64],
    num_qubits: usize,
    matrix: &[C64],
    targets: &[usize],
    controls: &[usize],
    exec: Execution,
) {
    let k = targets.len();
    let dim = 1usize << k;
    debug_assert_eq!(matrix.len(), dim * dim);
    debug_assert_eq!(amps.len(), 1usize << num_qubits);
    let parallel = exec.is_parallel() && amps.len() >= PARALLEL_MIN_AMPLITUDES;

    if k == 1 && controls.is_empty() {
        let stride = 1usize << bit_position(targets[0], num_qubits);
        let m = [matrix[0], matrix[1], matrix[2], matrix[3]];
        if parallel {
            #[cfg(feature = "parallel")]
            {
                if amps.len() / (2 * stride) >= 64 {
                    amps.par_chunks_mut(PARALLEL_MIN_AMPLITUDES.max(2 * stride))
                        .for_each(|b| run_single(b, stride, m));
                } else {
                    amps.par_chunks_exact_mut(2 * stride).for_each(|chunk| {
                        let (lo, hi) = chunk.split_at_mut(stride);
                        lo.par_iter_mut()
                            .zip(hi.par_iter_mut())
                            .with_min_len(4096)
                            .for_each(|(a, b)| {
                                let (x, y) = (*a, *b);
                                *a = m[0] * x + m[1] * y;
                                *b = m[2] * x + m[3] * y;
                            });
                    });
                }
                return;
            }
        }
        run_single(amps, stride, m);
        return;
    }

    let offsets: Vec<usize> = (0..dim)
        .map(|local| {
            targets.iter().enumerate().fold(0usize, |acc, (j, &t)| {
                let bit = (local >> (k - 1 - j)) & 1;
                acc | (bit << bit_position(t, num_qubits))
            })
        })
        .collect();
    let mut sorted_pos: Vec<usize> = targets
        .iter()
        .chain(controls)
        .map(|&q| bit_position(q, num_qubits))
        .collect();
    sorted_pos.sort_unstable();
    let control_mask = controls
        .iter()
        .fold(0usize, |acc, &q| acc | (1usize << bit_position(q, num_qubits)));
    let plan = Plan {
        matrix,
        dim,
        offsets,
        control_mask,
        sorted_pos,
    };

    // Blocks spanning every touched bit are independent of one another.
    let block_len = 2usize << plan.sorted_pos.last().copied().unwrap_or(0);
    if parallel && amps.len() / block_len >= 2 {
        #[cfg(feature = "parallel")]
        {
            let chunk = block_len.max(PARALLEL_MIN_AMPLITUDES / 4);
            amps.par_chunks_mut(chunk).for_each(|big| {
                for b in big.chunks_mut(block_len) {
                    plan.run_block(b);
                }
            });
            return;
        }
    }
    for b in amps.chunks_mut(block_len) {
        plan.run_block(b);
    }
}
