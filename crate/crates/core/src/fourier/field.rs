use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;

use crate::error::{Result, SpecError};

/// Fourier coefficients of a trigonometric polynomial of degree `N`,
/// stored in centered order `k = -N..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    degree: usize,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(degree: usize) -> Self {
        Self {
            degree,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * degree + 1],
        }
    }

    pub fn from_coeffs(degree: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * degree + 1 {
            return Err(SpecError::BadLength {
                degree,
                expected: 2 * degree + 1,
                got: coeffs.len(),
            });
        }
        Ok(Self { degree, coeffs })
    }

    /// Builds a field from a coefficient rule evaluated for every `k`.
    pub fn from_fn(degree: usize, mut f: impl FnMut(i64) -> Complex64) -> Self {
        let n = degree as i64;
        let coeffs = (-n..=n).map(&mut f).collect();
        Self { degree, coeffs }
    }

    /// Real field `c e^{ikx} + conj(c) e^{-ikx}` (or the real part of `c` when `k = 0`).
    pub fn real_mode(degree: usize, k: i64, c: Complex64) -> Self {
        let mut f = Self::zeros(degree);
        if k == 0 {
            f.set(0, Complex64::new(c.re, 0.0));
        } else {
            f.set(k, c);
            f.set(-k, c.conj());
        }
        f
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Iterates `(k, coefficient)` pairs in ascending `k`.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n = self.degree as i64;
        self.coeffs.iter().enumerate().map(move |(i, c)| (i as i64 - n, *c))
    }

    #[inline]
    fn index(&self, k: i64) -> Option<usize> {
        let n = self.degree as i64;
        (k.abs() <= n).then(|| (k + n) as usize)
    }

    /// Coefficient of mode `k`; zero outside `|k| <= N`.
    #[inline]
    pub fn coeff(&self, k: i64) -> Complex64 {
        self.index(k)
            .map(|i| self.coeffs[i])
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Sets mode `k`. Panics when `|k| > N`.
    #[inline]
    pub fn set(&mut self, k: i64, c: Complex64) {
        let i = self
            .index(k)
            .unwrap_or_else(|| panic!("mode {k} outside degree {}", self.degree));
        self.coeffs[i] = c;
    }

    /// Largest `|c_{-k} - conj(c_k)|` over all modes.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.degree as i64;
        (0..=n)
            .map(|k| (self.coeff(-k) - self.coeff(k).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Forces exact Hermitian symmetry by averaging each `±k` pair.
    pub fn symmetrize(&mut self) {
        let n = self.degree as i64;
        let c0 = self.coeff(0);
        self.set(0, Complex64::new(c0.re, 0.0));
        for k in 1..=n {
            let avg = 0.5 * (self.coeff(k) + self.coeff(-k).conj());
            self.set(k, avg);
            self.set(-k, avg.conj());
        }
    }

    /// Zero-extends (or truncates) to another degree.
    pub fn resized(&self, degree: usize) -> Self {
        Self::from_fn(degree, |k| self.coeff(k))
    }

    /// `∫ u v dx` over one period for real fields `u = self`, `v = other`.
    pub fn inner(&self, other: &Self) -> f64 {
        let n = self.degree.min(other.degree) as i64;
        let s: f64 = (-n..=n)
            .map(|k| (self.coeff(k).conj() * other.coeff(k)).re)
            .sum();
        2.0 * PI * s
    }

    /// `‖u‖_{L²}` over one period via Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        2.0 * PI * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// `self += a * x`, degrees must agree.
    pub fn axpy(&mut self, a: f64, x: &Self) {
        debug_assert_eq!(self.degree, x.degree);
        for (s, v) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *s += v * a;
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.degree.max(other.degree);
        Self::from_fn(n, |k| self.coeff(k) - other.coeff(k))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Writes `k,re,im` rows in ascending `k` with a header line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "k,re,im")?;
        for (k, c) in self.modes() {
            writeln!(w, "{k},{:e},{:e}", c.re, c.im)?;
        }
        Ok(())
    }

    /// Parses the `k,re,im` format written by [`SpectralField::write_csv`].
    pub fn read_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with('k')) {
                continue;
            }
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            let parse_err = || SpecError::InvalidArgument(format!("bad csv row {}: {line}", lineno + 1));
            if parts.len() != 3 {
                return Err(parse_err());
            }
            let k: i64 = parts[0].parse().map_err(|_| parse_err())?;
            let re: f64 = parts[1].parse().map_err(|_| parse_err())?;
            let im: f64 = parts[2].parse().map_err(|_| parse_err())?;
            rows.push((k, Complex64::new(re, im)));
        }
        if rows.is_empty() || rows.len() % 2 == 0 {
            return Err(SpecError::InvalidArgument("csv must hold 2N+1 rows".into()));
        }
        let degree = rows.len() / 2;
        let mut f = Self::zeros(degree);
        for (i, (k, c)) in rows.into_iter().enumerate() {
            if k != i as i64 - degree as i64 {
                return Err(SpecError::InvalidArgument(format!("rows out of order at k = {k}")));
            }
            f.set(k, c);
        }
        Ok(f)
    }
}

/// Real samples on the `2N+1` equispaced grid `x_ν = 2πν/(2N+1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NodalField {
    degree: usize,
    values: Vec<f64>,
}

impl NodalField {
    pub fn new(degree: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != 2 * degree + 1 {
            return Err(SpecError::BadLength {
                degree,
                expected: 2 * degree + 1,
                got: values.len(),
            });
        }
        Ok(Self { degree, values })
    }

    pub fn from_fn(degree: usize, f: impl Fn(f64) -> f64) -> Self {
        let values = grid(2 * degree + 1).map(f).collect();
        Self { degree, values }
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Grid spacing `h = 2π/(2N+1)`.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / (2 * self.degree + 1) as f64
    }

    pub fn point(&self, nu: usize) -> f64 {
        nu as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> {
        grid(2 * self.degree + 1)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,value")?;
        for (x, v) in self.points().zip(&self.values) {
            writeln!(w, "{x:e},{v:e}")?;
        }
        Ok(())
    }
}

/// The `len` equispaced points `2πν/len`, `ν = 0..len`.
pub fn grid(len: usize) -> impl Iterator<Item = f64> {
    let h = 2.0 * PI / len as f64;
    (0..len).map(move |nu| nu as f64 * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::project;

    #[test]
    fn csv_round_trip() {
        let f = SpectralField::from_fn(4, |k| Complex64::new(1.0 / 3.0 * k as f64, (k as f64).sin()));
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k,re,im\n-4,"));
        assert_eq!(SpectralField::read_csv(&text).unwrap(), f);
        assert!(SpectralField::read_csv("k,re,im\n0,1,0\n1,0,0\n").is_err());
        assert!(SpectralField::read_csv("k,re,im\n1,1,0\n0,0,0\n-1,1,0\n").is_err());
    }

    #[test]
    fn lengths_checked() {
        assert!(NodalField::new(3, vec![0.0; 6]).is_err());
        assert!(SpectralField::from_coeffs(2, vec![Complex64::new(0.0, 0.0); 4]).is_err());
        let nodal = NodalField::from_fn(2, |x| x);
        assert!((nodal.point(4) - 8.0 * PI / 5.0).abs() < 1e-15);
        assert!((nodal.spacing() - 2.0 * PI / 5.0).abs() < 1e-15);
    }

    #[test]
    fn norms_and_resizing() {
        // sin x has L² norm √π
        let s = SpectralField::real_mode(3, 1, Complex64::new(0.0, -0.5));
        assert!((s.l2_norm() - PI.sqrt()).abs() < 1e-15);
        assert_eq!(s.resized(1).resized(3), s);
        assert_eq!(s.coeff(9), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn tail_decay_rate() {
        // ‖(I - S_N) w‖ for ŵ_k = |k|^{-s} behaves like N^{1/2 - s}
        let big = 1 << 15;
        for s in [1.5f64, 2.0, 3.0] {
            let w = SpectralField::from_fn(big, |k| {
                if k == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new((k.abs() as f64).powf(-s), 0.0)
                }
            });
            let scaled: Vec<f64> = [16usize, 32, 64, 128]
                .iter()
                .map(|&n| {
                    let tail = w.sub(&project(&w, n).unwrap().resized(big)).l2_norm();
                    tail / (n as f64).powf(0.5 - s)
                })
                .collect();
            let hi = scaled.iter().cloned().fold(f64::MIN, f64::max);
            let lo = scaled.iter().cloned().fold(f64::MAX, f64::min);
            assert!(hi / lo <= 2.0, "s={s}: {scaled:?}");
        }
    }
}
