//! Spin factors with `{x,y,z} = ⟨x/y⟩z + ⟨z/y⟩x − ⟨x/z̄⟩ȳ`.

use num_complex::Complex64;

use super::FactorModel;
use crate::triple::LinearMap;

/// Real spin factor on `X₁ ⊕ X₂` (`dim X₁ = r`, `dim X₂ = s`) with the
/// involution `x̄ = (x₁, −x₂)`. Coordinates list `X₁` before `X₂`.
pub(crate) struct RealSpin {
    pub r: usize,
    pub s: usize,
}

impl RealSpin {
    fn bar(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(i, v)| if i < self.r { *v } else { -*v })
            .collect()
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

impl FactorModel for RealSpin {
    fn dim(&self) -> usize {
        self.r + self.s
    }

    fn product(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let xy = dot(x, y);
        let zy = dot(z, y);
        let xzbar = dot(x, &self.bar(z));
        let ybar = self.bar(y);
        (0..self.dim())
            .map(|l| xy * z[l] + zy * x[l] - xzbar * ybar[l])
            .collect()
    }

    /// `‖x‖² = ⟨x/x⟩ + √(⟨x/x⟩² − ⟨x/x̄⟩²)`, with the radicand factored as
    /// `(2‖x₂‖²)(2‖x₁‖²)` to avoid cancellation. Equals `‖x₁‖ + ‖x₂‖`.
    fn norm(&self, x: &[f64]) -> f64 {
        let a2 = dot(&x[..self.r], &x[..self.r]);
        let b2 = dot(&x[self.r..], &x[self.r..]);
        let p = a2 + b2;
        (p + (4.0 * a2 * b2).sqrt()).sqrt()
    }

    fn tripotents(&self) -> Vec<(String, Vec<f64>)> {
        let n = self.dim();
        let mut out: Vec<(String, Vec<f64>)> = (0..n)
            .map(|i| {
                let mut v = vec![0.0; n];
                v[i] = 1.0;
                (format!("e{}", i + 1), v)
            })
            .collect();
        if self.s >= 1 && self.r >= 1 {
            let mut v = vec![0.0; n];
            v[0] = 0.5;
            v[self.r] = 0.5;
            out.push(("(e1 + f1)/2".into(), v.clone()));
            v[self.r] = -0.5;
            out.push(("(e1 - f1)/2".into(), v));
        }
        out
    }
}

/// Complex spin factor `ℂⁿ` with coordinatewise conjugation, realified with
/// interleaved `(re, im)` coordinates.
pub(crate) struct ComplexSpin {
    pub n: usize,
}

fn to_complex(x: &[f64]) -> Vec<Complex64> {
    x.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()
}

fn from_complex(v: &[Complex64]) -> Vec<f64> {
    v.iter().flat_map(|c| [c.re, c.im]).collect()
}

/// `⟨x/y⟩ = Σ x_k ȳ_k`
fn herm(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

fn bilinear(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

impl FactorModel for ComplexSpin {
    fn dim(&self) -> usize {
        2 * self.n
    }

    fn product(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let (x, y, z) = (to_complex(x), to_complex(y), to_complex(z));
        let xy = herm(&x, &y);
        let zy = herm(&z, &y);
        // ⟨x / z̄⟩ = Σ x_k z_k
        let xz = bilinear(&x, &z);
        let out: Vec<Complex64> = (0..self.n)
            .map(|l| xy * z[l] + zy * x[l] - xz * y[l].conj())
            .collect();
        from_complex(&out)
    }

    fn norm(&self, x: &[f64]) -> f64 {
        let x = to_complex(x);
        let p = herm(&x, &x).re;
        let q = bilinear(&x, &x).norm();
        (p + (p * p - q * q).max(0.0).sqrt()).sqrt()
    }

    fn complex_structure(&self) -> Option<LinearMap> {
        let n = self.dim();
        let images: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut v = vec![0.0; n];
                if i % 2 == 0 {
                    v[i + 1] = 1.0;
                } else {
                    v[i - 1] = -1.0;
                }
                v
            })
            .collect();
        Some(LinearMap::from_images(n, &images))
    }

    fn tripotents(&self) -> Vec<(String, Vec<f64>)> {
        let d = self.dim();
        let mut e1 = vec![0.0; d];
        e1[0] = 1.0;
        let mut ie1 = vec![0.0; d];
        ie1[1] = 1.0;
        let mut out = vec![("e1".to_string(), e1), ("i·e1".to_string(), ie1)];
        if self.n >= 2 {
            let mut m = vec![0.0; d];
            m[0] = 0.5;
            m[3] = 0.5;
            out.push(("(e1 + i·e2)/2".into(), m.clone()));
            m[3] = -0.5;
            out.push(("(e1 - i·e2)/2".into(), m));
        }
        out
    }
}
