//! The damped and phase-twisted multiplier families ψ^(ρ) and ψ_η.
//!
//! Both are quotients of truncated lattice sums of the seed φ against the
//! truncated φ-sum itself, taken over the *same* summation window anchored at
//! the cell of the evaluation point. Anchoring makes the defining identities
//! exact for the truncated objects: ψ̃₀ ≡ 1 bit-exactly, and the
//! quasiperiodic boundary relations
//!
//! ```text
//! ψ_η(m + 1 + iy) = e^{iη₁} ψ_η(m + iy),   ψ_η(m + x + i) = e^{iη₂} ψ_η(m + x)
//! ```
//!
//! hold to rounding rather than to a truncation tail. The twisted sum carries
//! e^{+iη·m} phases, the sign the boundary relations above require.
//!
//! For |η| beyond the certified radius R the multiplier continues as the
//! principal-branch power ψ̃_{Rη/|η|}^{|η|/R}, evaluated on the local cell
//! value (certified Re > 0) with the quasimomentum phase factored out.

use crate::elliptic::{reduce_nearest, EllipticPair, TruncationPolicy};
use crate::error::{Error, Result};
use crate::geometry::PeriodicCell;
use crate::lattice::Window;
use num_complex::Complex64;
use rayon::prelude::*;

/// Margin used when certifying R; strictly below the 3/4 of the continuum
/// bound to guard against off-node excursions.
pub const R_MARGIN: f64 = 0.7;

/// Relative tolerance quantum for grouping grid |η| values.
const NORM_QUANTUM: f64 = 1e-12;

/// Seed values φ(z_q − n) tabulated over evaluation nodes × window points,
/// the workhorse of every batched multiplier evaluation.
pub struct PhiTable {
    pub window: Window,
    pub nodes: Vec<Complex64>,
    values: Vec<Complex64>,
    varphi: Vec<Complex64>,
    norms: Vec<f64>,
}

impl PhiTable {
    /// Tabulate for nodes inside cl(Q) (cell index 0).
    pub fn build(pair: &EllipticPair, trunc: &TruncationPolicy, nodes: Vec<Complex64>) -> Self {
        let window = Window::new(trunc.radius);
        let nw = window.len();
        let mut values = vec![Complex64::default(); nodes.len() * nw];
        let mut varphi = vec![Complex64::default(); nodes.len()];
        values
            .par_chunks_mut(nw)
            .zip(varphi.par_iter_mut())
            .zip(nodes.par_iter())
            .for_each(|((row, vp), &z)| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, &m) in window.points_c.iter().enumerate() {
                    let v = pair.phi_raw(z - m);
                    row[j] = v;
                    acc += v;
                }
                *vp = acc;
            });
        let norms = window.points_c.iter().map(|m| m.norm()).collect();
        PhiTable {
            window,
            nodes,
            values,
            varphi,
            norms,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn varphi_values(&self) -> &[Complex64] {
        &self.varphi
    }

    fn phase_factors(&self, eta: (f64, f64)) -> Vec<Complex64> {
        let k = self.window.k_max as i64;
        let axis = |e: f64| -> Vec<Complex64> {
            (-k..=k).map(|j| Complex64::from_polar(1.0, e * j as f64)).collect()
        };
        let u = axis(eta.0);
        let v = axis(eta.1);
        self.window
            .points
            .iter()
            .map(|&(a, b)| u[(a + k) as usize] * v[(b + k) as usize])
            .collect()
    }

    /// ψ̃_η at every node. `sup_cap`: stop early once a node exceeds the cap
    /// (used by certification sweeps); the returned vector is then truncated.
    pub fn psi_tilde_capped(&self, eta: (f64, f64), sup_cap: Option<f64>) -> Vec<Complex64> {
        let ph = self.phase_factors(eta);
        let nw = self.window.len();
        let mut out = Vec::with_capacity(self.len());
        for (q, row) in self.values.chunks(nw).enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (p, x) in ph.iter().zip(row) {
                acc += p * x;
            }
            let val = acc / self.varphi[q];
            out.push(val);
            if let Some(cap) = sup_cap {
                if (val - 1.0).norm() > cap {
                    return out;
                }
            }
        }
        out
    }

    /// ψ̃_η at every node.
    pub fn psi_tilde(&self, eta: (f64, f64)) -> Vec<Complex64> {
        self.psi_tilde_capped(eta, None)
    }

    /// ψ_η at every node given the certified radius R.
    pub fn psi_eta(&self, eta: (f64, f64), r_threshold: f64) -> Result<Vec<Complex64>> {
        let en = (eta.0 * eta.0 + eta.1 * eta.1).sqrt();
        if en <= r_threshold {
            return Ok(self.psi_tilde(eta));
        }
        let nu = (r_threshold * eta.0 / en, r_threshold * eta.1 / en);
        let base = self.psi_tilde(nu);
        let p = en / r_threshold;
        base.into_iter()
            .enumerate()
            .map(|(q, v)| {
                if v.re <= 0.0 {
                    return Err(Error::BranchViolation {
                        z: self.nodes[q],
                        re: v.re,
                        r: r_threshold,
                    });
                }
                Ok(principal_power(v, p))
            })
            .collect()
    }

    /// ψ^(ρ) at every node; `shift` places the damping center at the cell
    /// m so the values are those of ψ^(ρ)(z + m).
    pub fn psi_rho_shifted(&self, rho: f64, shift: (i64, i64)) -> Vec<Complex64> {
        let nw = self.window.len();
        let damp: Vec<f64> = if shift == (0, 0) {
            self.norms.iter().map(|&n| 2.0f64.powf(-rho * n)).collect()
        } else {
            self.window
                .points
                .iter()
                .map(|&(a, b)| {
                    let n = (((a + shift.0) as f64).hypot((b + shift.1) as f64)) * rho;
                    2.0f64.powf(-n)
                })
                .collect()
        };
        self.values
            .chunks(nw)
            .enumerate()
            .map(|(q, row)| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (d, x) in damp.iter().zip(row) {
                    acc += d * x;
                }
                acc / self.varphi[q]
            })
            .collect()
    }

    pub fn psi_rho(&self, rho: f64) -> Vec<Complex64> {
        self.psi_rho_shifted(rho, (0, 0))
    }
}

#[inline]
fn principal_power(v: Complex64, p: f64) -> Complex64 {
    Complex64::from_polar(v.norm().powf(p), p * v.arg())
}

/// Local twisted sum at a single point: returns (Σ e^{iη·n} φ(zl−n), Σ φ(zl−n))
/// over the zero-anchored window, with the nearest (n = 0) term split off so
/// the quotient stays conditioned next to the pole set.
fn twisted_local(
    pair: &EllipticPair,
    window: &Window,
    zl: Complex64,
    eta: (f64, f64),
) -> (Complex64, Complex64) {
    let mut num_rest = Complex64::new(0.0, 0.0);
    let mut den_rest = Complex64::new(0.0, 0.0);
    for &(a, b) in &window.points {
        if (a, b) == (0, 0) {
            continue;
        }
        let m = Complex64::new(a as f64, b as f64);
        let v = pair.phi_raw(zl - m);
        num_rest += Complex64::from_polar(1.0, eta.0 * a as f64 + eta.1 * b as f64) * v;
        den_rest += v;
    }
    let phi0 = pair.phi_raw(zl);
    (phi0 + num_rest, phi0 + den_rest)
}

fn membership_and_guard(
    z: Complex64,
    pair: &EllipticPair,
    trunc: &TruncationPolicy,
    cell: &PeriodicCell,
) -> Result<(i64, i64)> {
    let m = cell.contains(z).ok_or(Error::OutsideDomain(z))?;
    let dist = reduce_nearest(z - pair.alpha).norm();
    if dist < trunc.epsilon_pole {
        return Err(Error::PoleProximity {
            z,
            dist,
            guard: trunc.epsilon_pole,
        });
    }
    Ok(m)
}

/// ψ̃_η(z) = φ_η(z)/φ(z) with the window anchored at the cell of z.
pub fn psi_tilde_eta(
    z: Complex64,
    eta: (f64, f64),
    pair: &EllipticPair,
    trunc: &TruncationPolicy,
    cell: &PeriodicCell,
) -> Result<Complex64> {
    let (m1, m2) = membership_and_guard(z, pair, trunc, cell)?;
    let window = Window::new(trunc.radius);
    let zl = z - Complex64::new(m1 as f64, m2 as f64);
    let (num, den) = twisted_local(pair, &window, zl, eta);
    let phase = Complex64::from_polar(1.0, eta.0 * m1 as f64 + eta.1 * m2 as f64);
    Ok(phase * num / den)
}

/// ψ^(ρ)(z) = φ^(ρ)(z)/φ(z), damping 2^{-ρ|m|} centered at the origin.
pub fn psi_rho(
    z: Complex64,
    rho: f64,
    pair: &EllipticPair,
    trunc: &TruncationPolicy,
    cell: &PeriodicCell,
) -> Result<Complex64> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::BadParameter(format!("rho = {rho} must lie in (0, 1]")));
    }
    let (m1, m2) = membership_and_guard(z, pair, trunc, cell)?;
    let window = Window::new(trunc.radius);
    let zl = z - Complex64::new(m1 as f64, m2 as f64);
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = Complex64::new(0.0, 0.0);
    for &(a, b) in &window.points {
        let v = pair.phi_raw(zl - Complex64::new(a as f64, b as f64));
        let g = ((a + m1) as f64).hypot((b + m2) as f64);
        num += 2.0f64.powf(-rho * g) * v;
        den += v;
    }
    Ok(num / den)
}

/// The frozen multiplier family: certified twist radius R, fitted Hölder
/// exponent β and the measured lower bound of |φ| on cl(ϖ).
pub struct MultiplierFamily {
    pub pair: EllipticPair,
    pub trunc: TruncationPolicy,
    pub r_threshold: f64,
    pub beta: f64,
    pub varphi_floor: f64,
    pub grid_resolution: usize,
    /// Certified inf of |ψ̃_η| over nodes for grid |η| ≤ R.
    pub certified_inf: f64,
    /// Table over the cell quadrature nodes followed by boundary/rim samples.
    table: PhiTable,
    quad_len: usize,
}

impl MultiplierFamily {
    /// Run find_R on the given cell and freeze the family.
    pub fn certify(
        pair: EllipticPair,
        trunc: TruncationPolicy,
        cell: &PeriodicCell,
        eta_grid_resolution: usize,
    ) -> Result<Self> {
        if eta_grid_resolution < 32 {
            return Err(Error::BadParameter(format!(
                "eta grid resolution {eta_grid_resolution} must be >= 32 per axis"
            )));
        }
        let mut nodes = cell.quadrature.nodes.clone();
        let quad_len = nodes.len();
        // certification also samples cl(ϖ): the obstacle rim and ∂Q
        for (a, b) in cell.boundary_pairs(24) {
            nodes.push(a);
            nodes.push(b);
        }
        let rim = cell.obstacle.radius + 1e-9;
        for j in 0..64 {
            let th = 2.0 * std::f64::consts::PI * j as f64 / 64.0;
            nodes.push(cell.obstacle.center + Complex64::from_polar(rim, th));
        }
        let table = PhiTable::build(&pair, &trunc, nodes);
        let varphi_floor = table
            .varphi_values()
            .iter()
            .map(|v| v.norm())
            .fold(f64::INFINITY, f64::min);

        let (r_threshold, certified_inf) = find_r_on_table(&table, eta_grid_resolution)?;
        let beta = fit_beta(&table);
        Ok(MultiplierFamily {
            pair,
            trunc,
            r_threshold,
            beta,
            varphi_floor,
            grid_resolution: eta_grid_resolution,
            certified_inf,
            table,
            quad_len,
        })
    }

    /// Number of cell quadrature nodes the family was certified on.
    pub fn quad_len(&self) -> usize {
        self.quad_len
    }

    /// ψ_η on the cell quadrature nodes.
    pub fn psi_eta_at_quadrature(&self, eta: (f64, f64)) -> Result<Vec<Complex64>> {
        let mut v = self.table.psi_eta(eta, self.r_threshold)?;
        v.truncate(self.quad_len);
        Ok(v)
    }

    /// ψ^(ρ)(z + m) on the cell quadrature nodes.
    pub fn psi_rho_at_quadrature(&self, rho: f64, shift: (i64, i64)) -> Vec<Complex64> {
        let mut v = self.table.psi_rho_shifted(rho, shift);
        v.truncate(self.quad_len);
        v
    }

    /// φ on the cell quadrature nodes (window-truncated, matching the quotients).
    pub fn varphi_at_quadrature(&self) -> &[Complex64] {
        &self.table.varphi_values()[..self.quad_len]
    }

    /// ψ_η at a single point of Ω.
    pub fn psi_eta(&self, z: Complex64, eta: (f64, f64), cell: &PeriodicCell) -> Result<Complex64> {
        let (m1, m2) = membership_and_guard(z, &self.pair, &self.trunc, cell)?;
        let window = Window::new(self.trunc.radius);
        let zl = z - Complex64::new(m1 as f64, m2 as f64);
        let en = (eta.0 * eta.0 + eta.1 * eta.1).sqrt();
        let phase = Complex64::from_polar(1.0, eta.0 * m1 as f64 + eta.1 * m2 as f64);
        if en <= self.r_threshold {
            let (num, den) = twisted_local(&self.pair, &window, zl, eta);
            return Ok(phase * num / den);
        }
        let nu = (self.r_threshold * eta.0 / en, self.r_threshold * eta.1 / en);
        let (num, den) = twisted_local(&self.pair, &window, zl, nu);
        let local = num / den;
        if local.re <= 0.0 {
            return Err(Error::BranchViolation {
                z,
                re: local.re,
                r: self.r_threshold,
            });
        }
        Ok(phase * principal_power(local, en / self.r_threshold))
    }

    /// ψ̃_η at a single point of Ω.
    pub fn psi_tilde(&self, z: Complex64, eta: (f64, f64), cell: &PeriodicCell) -> Result<Complex64> {
        psi_tilde_eta(z, eta, &self.pair, &self.trunc, cell)
    }
}

/// Inclusive uniform η grid over [-π, π]² sorted by |η|, grouped by equal norm.
fn eta_grid_by_norm(resolution: usize) -> Vec<(f64, Vec<(f64, f64)>)> {
    let axis: Vec<f64> = (0..resolution)
        .map(|i| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / (resolution - 1) as f64)
        .collect();
    let mut pts: Vec<((f64, f64), f64)> = Vec::with_capacity(resolution * resolution);
    for &a in &axis {
        for &b in &axis {
            pts.push(((a, b), a.hypot(b)));
        }
    }
    pts.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap());
    let mut groups: Vec<(f64, Vec<(f64, f64)>)> = Vec::new();
    for (eta, n) in pts {
        match groups.last_mut() {
            Some((gn, v)) if (n - *gn).abs() <= NORM_QUANTUM * (1.0 + n) => v.push(eta),
            _ => groups.push((n, vec![eta])),
        }
    }
    groups
}

/// The grid-certified twist radius: the largest R such that every grid η with
/// |η| ≤ R has sup over nodes of |ψ̃_η − 1| ≤ 0.7. Also returns the measured
/// inf of |ψ̃_η| over the certified ball.
fn find_r_on_table(table: &PhiTable, resolution: usize) -> Result<(f64, f64)> {
    let groups = eta_grid_by_norm(resolution);
    let mut certified = 0.0f64;
    let mut inf_psi = f64::INFINITY;
    for (norm, etas) in &groups {
        if *norm <= NORM_QUANTUM {
            continue; // η = 0 has sup exactly 0
        }
        let results: Vec<(f64, f64)> = etas
            .par_iter()
            .map(|&eta| {
                let vals = table.psi_tilde_capped(eta, Some(R_MARGIN));
                let sup = vals.iter().map(|v| (v - 1.0).norm()).fold(0.0f64, f64::max);
                let inf = vals.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
                (sup, inf)
            })
            .collect();
        let group_sup = results.iter().map(|r| r.0).fold(0.0f64, f64::max);
        if group_sup > R_MARGIN {
            if certified == 0.0 {
                return Err(Error::NoPositiveR {
                    smallest_eta: *norm,
                    sup: group_sup,
                    margin: R_MARGIN,
                });
            }
            break;
        }
        certified = *norm;
        inf_psi = inf_psi.min(results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min));
    }
    if certified == 0.0 {
        return Err(Error::NoPositiveR {
            smallest_eta: 0.0,
            sup: 0.0,
            margin: R_MARGIN,
        });
    }
    Ok((certified, inf_psi))
}

/// Convenience wrapper: run the R certification standalone.
pub fn find_r(
    pair: &EllipticPair,
    trunc: &TruncationPolicy,
    cell: &PeriodicCell,
    eta_grid_resolution: usize,
) -> Result<f64> {
    if eta_grid_resolution < 32 {
        return Err(Error::BadParameter(format!(
            "eta grid resolution {eta_grid_resolution} must be >= 32 per axis"
        )));
    }
    let table = PhiTable::build(pair, trunc, cell.quadrature.nodes.clone());
    Ok(find_r_on_table(&table, eta_grid_resolution)?.0)
}

/// Log–log fit of sup_z |ψ̃_η − 1| against |η| over |η| ∈ [1e-3, 1e-1].
fn fit_beta(table: &PhiTable) -> f64 {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 0..10 {
        let r = 1e-3 * (100.0f64).powf(k as f64 / 9.0);
        let mut sup = 0.0f64;
        for th in [0.0f64, 0.9, 2.1, 3.9] {
            let eta = (r * th.cos(), r * th.sin());
            let s = table
                .psi_tilde(eta)
                .iter()
                .map(|v| (v - 1.0).norm())
                .fold(0.0f64, f64::max);
            sup = sup.max(s);
        }
        xs.push(r.ln());
        ys.push(sup.ln());
    }
    linear_slope(&xs, &ys).0
}

/// Least-squares slope and R² of y against x.
pub fn linear_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, r2)
}
