//! Walsh-Hadamard transforms restricted to a subset of index bits.
//!
//! Transforming over the bits in `mask` while leaving the others alone is the
//! same as running an independent length-`2^popcount(mask)` transform on every
//! coset of the complementary bits, which is what the XOR-convolution kernels
//! need.

use crate::graph::bits;

/// Unnormalized in-place transform over the bits in `mask`.
/// Applying it twice multiplies by `2^popcount(mask)`.
pub fn wht_over(data: &mut [f64], mask: u64) {
    debug_assert!(data.len().is_power_of_two());
    for b in bits(mask) {
        let h = 1usize << b;
        debug_assert!(h < data.len());
        for block in data.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, d) = (*x + *y, *x - *y);
                *x = s;
                *y = d;
            }
        }
    }
}

/// Inverse of [`wht_over`].
pub fn iwht_over(data: &mut [f64], mask: u64) {
    wht_over(data, mask);
    let scale = 1.0 / (1u64 << mask.count_ones()) as f64;
    data.iter_mut().for_each(|x| *x *= scale);
}
