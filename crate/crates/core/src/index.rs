//! Mixed-radix addressing for flat probability tables.
//!
//! Every table in the crate uses the same layout: each variable is a digit
//! whose radix is its cardinality and the last variable varies fastest.

use crate::error::{Error, Result};

/// Flat offset of `indices` in a table laid out with `radices`.
pub fn mixed_radix_index(indices: &[usize], radices: &[usize]) -> Result<usize> {
    if indices.len() != radices.len() {
        return Err(Error::LengthMismatch {
            expected: radices.len(),
            actual: indices.len(),
        });
    }
    let mut flat = 0usize;
    for (position, (&index, &radix)) in indices.iter().zip(radices).enumerate() {
        if index >= radix {
            return Err(Error::IndexOutOfRange { position, index, radix });
        }
        flat = flat * radix + index;
    }
    Ok(flat)
}

/// Inverse of [`mixed_radix_index`].
pub fn decode_mixed_radix(mut flat: usize, radices: &[usize]) -> Vec<usize> {
    let mut out = vec![0; radices.len()];
    for (slot, &radix) in out.iter_mut().zip(radices).rev() {
        *slot = flat % radix;
        flat /= radix;
    }
    out
}

/// Product of the radices, or `None` on overflow.
pub fn state_space_size(radices: &[usize]) -> Option<u128> {
    radices.iter().try_fold(1u128, |acc, &r| acc.checked_mul(r as u128))
}

/// Strides for each position (last position has stride 1).
pub fn strides(radices: &[usize]) -> Vec<usize> {
    let mut out = vec![1; radices.len()];
    for i in (0..radices.len().saturating_sub(1)).rev() {
        out[i] = out[i + 1] * radices[i + 1];
    }
    out
}

/// Odometer over all joint states in canonical order.
#[derive(Debug, Clone)]
pub struct JointStates {
    radices: Vec<usize>,
    current: Vec<usize>,
    done: bool,
}

impl JointStates {
    pub fn new(radices: &[usize]) -> Self {
        let done = radices.contains(&0);
        JointStates {
            radices: radices.to_vec(),
            current: vec![0; radices.len()],
            done,
        }
    }

    /// Advances in place; returns `false` once the space is exhausted.
    pub fn advance(state: &mut [usize], radices: &[usize]) -> bool {
        for pos in (0..state.len()).rev() {
            state[pos] += 1;
            if state[pos] < radices[pos] {
                return true;
            }
            state[pos] = 0;
        }
        false
    }
}

impl Iterator for JointStates {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        self.done = !Self::advance(&mut self.current, &self.radices);
        Some(out)
    }
}
