//! The square lattice Λ = {m : Re m ∈ ℤ, Im m ∈ ℤ} and its shell enumeration.
//!
//! Lattice sums in this crate are truncated over sup-norm shells: shell `k`
//! holds the points with max(|Re m|, |Im m|) = k (8k points for k ≥ 1, one for
//! k = 0). Enumerating shells 0..=⌊r⌋ visits each point of the window
//! |m|∞ ≤ r exactly once, (2⌊r⌋+1)² points in total.

use num_complex::Complex64;

/// The fixed unit square lattice.
#[derive(Debug, Clone, Copy, Default)]
pub struct Lattice;

impl Lattice {
    /// Points with sup-norm exactly `k`, in a fixed deterministic order
    /// (counter-clockwise from the right edge).
    pub fn shell(k: u32) -> Vec<(i64, i64)> {
        let k = k as i64;
        if k == 0 {
            return vec![(0, 0)];
        }
        let mut pts = Vec::with_capacity((8 * k) as usize);
        for j in -k..=k {
            pts.push((k, j));
        }
        for j in -k..=k {
            pts.push((-k, j));
        }
        for i in (-k + 1)..k {
            pts.push((i, k));
            pts.push((i, -k));
        }
        pts
    }

    /// All lattice points with |m|∞ ≤ r, shell-major.
    pub fn points_within(r: f64) -> Vec<(i64, i64)> {
        let kmax = r.floor().max(0.0) as u32;
        let mut pts = Vec::with_capacity(((2 * kmax as usize + 1).pow(2)) as usize);
        for k in 0..=kmax {
            pts.extend(Self::shell(k));
        }
        pts
    }
}

/// A concrete truncation window |m|∞ ≤ k_max with cached complex points and
/// the Eisenstein tail moments needed by the corrected sums.
#[derive(Debug, Clone)]
pub struct Window {
    pub k_max: u32,
    pub points: Vec<(i64, i64)>,
    pub points_c: Vec<Complex64>,
    /// Tail moment Σ_{|m|∞ > k_max} m⁻⁴ (real by symmetry).
    pub s4_tail: f64,
    /// Tail moment Σ_{|m|∞ > k_max} m⁻⁸ (real by symmetry).
    pub s8_tail: f64,
}

/// Eisenstein series Σ'_{m∈Λ} m⁻⁴ for the unit square lattice,
/// Γ(1/4)⁸/(960π²) = ϖ⁴/15 with ϖ the lemniscate constant.
pub const G4: f64 = 3.151_212_002_153_897_5;
/// Eisenstein series Σ'_{m∈Λ} m⁻⁸ = (3/7)·G4².
pub const G8: f64 = 4.255_773_035_365_189_5;

impl Window {
    pub fn new(radius: f64) -> Self {
        let k_max = radius.floor().max(0.0) as u32;
        let points = Lattice::points_within(radius);
        let points_c: Vec<Complex64> = points
            .iter()
            .map(|&(a, b)| Complex64::new(a as f64, b as f64))
            .collect();
        // Window moments; the tails are the full-lattice constants minus these.
        let mut s4 = 0.0;
        let mut s8 = 0.0;
        for &m in &points_c {
            if m.norm_sqr() > 0.5 {
                let inv2 = 1.0 / (m * m);
                let inv4 = inv2 * inv2;
                s4 += inv4.re;
                s8 += (inv4 * inv4).re;
            }
        }
        Window {
            k_max,
            points,
            points_c,
            s4_tail: G4 - s4,
            s8_tail: G8 - s8,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
