//! Type-I discrete sine transform on the interior nodes of a [`Grid`].
//!
//! Both the Poisson solver and the Gaussian filter are diagonal in this
//! basis. The 1-D transform of length `n` is evaluated through a complex FFT
//! of the odd extension (length `2(n + 1)`), two real rows per FFT. Lengths
//! that are not powers of two go through Bluestein's chirp-z algorithm, so
//! any grid size is O(N log N).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::Result;
use crate::field::{Field, Grid};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Complex {
    re: f64,
    im: f64,
}

impl Complex {
    #[inline]
    fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    #[inline]
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }

    #[inline]
    fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    fn expi(theta: f64) -> Self {
        Self::new(libm::cos(theta), libm::sin(theta))
    }
}

#[derive(Debug, Clone)]
struct Radix2 {
    n: usize,
    twiddles: Vec<Complex>,
    bitrev: Vec<u32>,
}

impl Radix2 {
    fn new(n: usize) -> Self {
        debug_assert!(n.is_power_of_two());
        let bits = n.trailing_zeros();
        let twiddles = (0..n / 2)
            .map(|k| Complex::expi(-2.0 * PI * k as f64 / n as f64))
            .collect();
        let bitrev = (0..n as u32)
            .map(|k| if bits == 0 { 0 } else { k.reverse_bits() >> (32 - bits) })
            .collect();
        Self { n, twiddles, bitrev }
    }

    /// Forward transform `X_k = Σ x_m e^{-2πikm/n}`, in place.
    fn process(&self, buf: &mut [Complex]) {
        let n = self.n;
        for k in 0..n {
            let r = self.bitrev[k] as usize;
            if r > k {
                buf.swap(k, r);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let step = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let w = self.twiddles[k * step];
                    let a = buf[start + k];
                    let b = buf[start + k + half].mul(w);
                    buf[start + k] = Complex::new(a.re + b.re, a.im + b.im);
                    buf[start + k + half] = Complex::new(a.re - b.re, a.im - b.im);
                }
            }
            len <<= 1;
        }
    }
}

#[derive(Debug, Clone)]
struct Bluestein {
    n: usize,
    inner: Radix2,
    chirp: Vec<Complex>,
    kernel_hat: Vec<Complex>,
}

impl Bluestein {
    fn new(n: usize) -> Self {
        let m = (2 * n - 1).next_power_of_two();
        let inner = Radix2::new(m);
        // k² mod 2n keeps the chirp argument small and exact.
        let chirp: Vec<Complex> = (0..n)
            .map(|k| {
                let k2 = (k as u128 * k as u128 % (2 * n as u128)) as f64;
                Complex::expi(-PI * k2 / n as f64)
            })
            .collect();
        let mut kernel = vec![Complex::default(); m];
        kernel[0] = chirp[0].conj();
        for k in 1..n {
            kernel[k] = chirp[k].conj();
            kernel[m - k] = chirp[k].conj();
        }
        inner.process(&mut kernel);
        Self {
            n,
            inner,
            chirp,
            kernel_hat: kernel,
        }
    }

    fn process(&self, buf: &mut [Complex], scratch: &mut Vec<Complex>) {
        let m = self.inner.n;
        scratch.clear();
        scratch.resize(m, Complex::default());
        for k in 0..self.n {
            scratch[k] = buf[k].mul(self.chirp[k]);
        }
        self.inner.process(scratch);
        // Inverse FFT through conjugation.
        for (s, h) in scratch.iter_mut().zip(&self.kernel_hat) {
            *s = s.mul(*h).conj();
        }
        self.inner.process(scratch);
        let inv = 1.0 / m as f64;
        for k in 0..self.n {
            let c = scratch[k].conj();
            buf[k] = Complex::new(c.re * inv, c.im * inv).mul(self.chirp[k]);
        }
    }
}

#[derive(Debug, Clone)]
enum Fft {
    Radix2(Radix2),
    Bluestein(Bluestein),
}

impl Fft {
    fn new(n: usize) -> Self {
        if n.is_power_of_two() {
            Fft::Radix2(Radix2::new(n))
        } else {
            Fft::Bluestein(Bluestein::new(n))
        }
    }

    fn process(&self, buf: &mut [Complex], scratch: &mut Vec<Complex>) {
        match self {
            Fft::Radix2(p) => p.process(buf),
            Fft::Bluestein(p) => p.process(buf, scratch),
        }
    }
}

/// Unnormalised 1-D DST-I: `X_k = Σ_{m=1}^{n} x_m sin(π k m / (n + 1))`.
#[derive(Debug, Clone)]
pub struct Dst1 {
    n: usize,
    fft: Fft,
}

impl Dst1 {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            fft: Fft::new(2 * (n + 1)),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Transforms two real sequences at once, in place.
    fn transform_pair(&self, a: &mut [f64], b: Option<&mut [f64]>, buf: &mut Vec<Complex>, scratch: &mut Vec<Complex>) {
        let n = self.n;
        let m = 2 * (n + 1);
        buf.clear();
        buf.resize(m, Complex::default());
        match &b {
            Some(b) => {
                for k in 0..n {
                    buf[k + 1] = Complex::new(a[k], b[k]);
                    buf[m - 1 - k] = Complex::new(-a[k], -b[k]);
                }
            }
            None => {
                for k in 0..n {
                    buf[k + 1] = Complex::new(a[k], 0.0);
                    buf[m - 1 - k] = Complex::new(-a[k], 0.0);
                }
            }
        }
        self.fft.process(buf, scratch);
        for k in 0..n {
            a[k] = -0.5 * buf[k + 1].im;
        }
        if let Some(b) = b {
            for k in 0..n {
                b[k] = 0.5 * buf[k + 1].re;
            }
        }
    }

    pub fn transform(&self, x: &mut [f64]) {
        let mut buf = Vec::new();
        let mut scratch = Vec::new();
        self.transform_pair(x, None, &mut buf, &mut scratch);
    }

    /// Applies the transform to every contiguous row of length `n`.
    fn transform_rows(&self, data: &mut [f64]) {
        let n = self.n;
        let mut buf = Vec::with_capacity(2 * (n + 1));
        let mut scratch = Vec::new();
        let mut rows = data.chunks_exact_mut(n);
        loop {
            match (rows.next(), rows.next()) {
                (Some(a), Some(b)) => self.transform_pair(a, Some(b), &mut buf, &mut scratch),
                (Some(a), None) => self.transform_pair(a, None, &mut buf, &mut scratch),
                _ => break,
            }
        }
    }
}

/// Sine-mode amplitudes of a Dirichlet field: `f(x_i, y_j) = Σ c[k1,k2]
/// sin(π k1 i / (nx - 1)) sin(π k2 j / (ny - 1))`, modes `k = 1..=n_int`.
#[derive(Debug, Clone, PartialEq)]
pub struct SineCoeffs {
    pub n1: usize,
    pub n2: usize,
    /// Indexed `(k2 - 1) * n1 + (k1 - 1)`.
    pub data: Vec<f64>,
}

impl SineCoeffs {
    pub fn zeros(n1: usize, n2: usize) -> Self {
        Self {
            n1,
            n2,
            data: vec![0.0; n1 * n2],
        }
    }

    #[inline]
    pub fn get(&self, k1: usize, k2: usize) -> f64 {
        self.data[(k2 - 1) * self.n1 + (k1 - 1)]
    }

    #[inline]
    pub fn set(&mut self, k1: usize, k2: usize, v: f64) {
        self.data[(k2 - 1) * self.n1 + (k1 - 1)] = v;
    }
}

/// Separable 2-D DST-I on the interior of a grid.
#[derive(Debug, Clone)]
pub struct SineTransform {
    grid: Grid,
    dst_x: Dst1,
    dst_y: Dst1,
}

impl SineTransform {
    pub fn new(grid: Grid) -> Self {
        Self {
            grid,
            dst_x: Dst1::new(grid.nx() - 2),
            dst_y: Dst1::new(grid.ny() - 2),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn raw_2d(&self, data: &mut [f64]) {
        let (n1, n2) = (self.dst_x.n, self.dst_y.n);
        self.dst_x.transform_rows(data);
        let mut t = vec![0.0; n1 * n2];
        transpose(data, &mut t, n1, n2);
        self.dst_y.transform_rows(&mut t);
        transpose(&t, data, n2, n1);
    }

    /// Mode amplitudes of `f` (interior values only are read).
    pub fn forward(&self, f: &Field) -> Result<SineCoeffs> {
        if f.grid() != &self.grid {
            return Err(crate::error::Error::GridMismatch);
        }
        let (nx, n1, n2) = (self.grid.nx(), self.dst_x.n, self.dst_y.n);
        let mut data = Vec::with_capacity(n1 * n2);
        for j in 1..=n2 {
            data.extend_from_slice(&f.values()[j * nx + 1..j * nx + 1 + n1]);
        }
        self.raw_2d(&mut data);
        let norm = 4.0 / ((n1 + 1) * (n2 + 1)) as f64;
        for v in &mut data {
            *v *= norm;
        }
        Ok(SineCoeffs { n1, n2, data })
    }

    /// Dirichlet field with the given mode amplitudes.
    pub fn inverse(&self, c: &SineCoeffs) -> Field {
        let (nx, n1, n2) = (self.grid.nx(), self.dst_x.n, self.dst_y.n);
        assert_eq!((c.n1, c.n2), (n1, n2), "coefficient shape mismatch");
        let mut data = c.data.clone();
        self.raw_2d(&mut data);
        let mut out = Field::zeros(self.grid);
        let vals = out.values_mut();
        for j in 1..=n2 {
            vals[j * nx + 1..j * nx + 1 + n1].copy_from_slice(&data[(j - 1) * n1..j * n1]);
        }
        out
    }

    /// Multiplies every mode of `f` by `symbol(k1, k2)`.
    pub fn apply_diagonal(&self, f: &Field, symbol: &SineCoeffs) -> Result<Field> {
        let mut c = self.forward(f)?;
        for (v, s) in c.data.iter_mut().zip(&symbol.data) {
            *v *= s;
        }
        Ok(self.inverse(&c))
    }
}

fn transpose(src: &[f64], dst: &mut [f64], cols: usize, rows: usize) {
    const B: usize = 32;
    for jb in (0..rows).step_by(B) {
        for ib in (0..cols).step_by(B) {
            for j in jb..(jb + B).min(rows) {
                for i in ib..(ib + B).min(cols) {
                    dst[i * rows + j] = src[j * cols + i];
                }
            }
        }
    }
}
