//! Discrete Fourier analysis for band-power estimates and filter
//! verification. Radix-2 FFT for power-of-two lengths, direct DFT otherwise
//! (epoch windows are short, so the quadratic path stays cheap).

use crate::num::{real, Real};

/// In-place iterative radix-2 FFT. Lengths must be a power of two.
pub fn fft_radix2<T: Real>(re: &mut [T], im: &mut [T]) {
    let n = re.len();
    assert!(n.is_power_of_two(), "fft length must be a power of two");
    assert_eq!(n, im.len());

    // Bit-reversal permutation.
    let shift = n.leading_zeros() + 1;
    for i in 0..n {
        let j = i.reverse_bits() >> shift;
        if i < j {
            re.swap(i, j);
            im.swap(i, j);
        }
    }

    let mut size = 2;
    while size <= n {
        let half = size / 2;
        let step = -std::f64::consts::TAU / size as f64;
        for start in (0..n).step_by(size) {
            for k in 0..half {
                let angle = step * k as f64;
                let (wr, wi) = (real::<T>(angle.cos()), real::<T>(angle.sin()));
                let (ur, ui) = (re[start + k], im[start + k]);
                let (vr, vi) = (re[start + k + half], im[start + k + half]);
                let tr = wr * vr - wi * vi;
                let ti = wr * vi + wi * vr;
                re[start + k] = ur + tr;
                im[start + k] = ui + ti;
                re[start + k + half] = ur - tr;
                im[start + k + half] = ui - ti;
            }
        }
        size <<= 1;
    }
}

/// DFT of a real signal; returns `(re, im)` of all n bins.
pub fn dft_real<T: Real>(x: &[T]) -> (Vec<T>, Vec<T>) {
    let n = x.len();
    if n.is_power_of_two() && n > 1 {
        let mut re = x.to_vec();
        let mut im = vec![T::zero(); n];
        fft_radix2(&mut re, &mut im);
        return (re, im);
    }
    let mut re = vec![T::zero(); n];
    let mut im = vec![T::zero(); n];
    for (k, (rk, ik)) in re.iter_mut().zip(im.iter_mut()).enumerate() {
        let step = -std::f64::consts::TAU * k as f64 / n as f64;
        let mut sr = T::zero();
        let mut si = T::zero();
        for (t, &xt) in x.iter().enumerate() {
            let angle = step * t as f64;
            sr += xt * real(angle.cos());
            si += xt * real(angle.sin());
        }
        *rk = sr;
        *ik = si;
    }
    (re, im)
}

/// One-sided periodogram: `|X_k|^2 / n` for `k = 0 ..= n/2`.
///
/// Bin `k` sits at frequency `k * fs / n`.
pub fn periodogram<T: Real>(x: &[T]) -> Vec<T> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let (re, im) = dft_real(x);
    let inv_n = T::one() / real::<T>(n as f64);
    (0..=n / 2)
        .map(|k| (re[k] * re[k] + im[k] * im[k]) * inv_n)
        .collect()
}
