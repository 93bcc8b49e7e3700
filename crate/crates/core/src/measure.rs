//! Distributions under the trace state, the median, and Chebyshev bounds.

use serde::{Deserialize, Serialize};

use crate::operator::{check_exponent, lp_power_of, BorelInterval, HermitianOperator, SpectralResolution};
use crate::report::{InequalityReport, ReportBuilder};
use crate::serde_ext::ext_real;
use crate::{Error, Result, Tolerances};

/// Slack used when comparing a tail weight against 1/2. Weights are
/// multiples of `1/d`, so anything far below `1/d` is rounding.
pub const HALF_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub value: f64,
    pub weight: f64,
}

/// `B -> tau(e_B(x))` for a finite spectrum: a weighted list of atoms with
/// strictly ascending values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDistribution {
    atoms: Vec<Atom>,
}

impl TraceDistribution {
    pub fn from_resolution(res: &SpectralResolution) -> Self {
        let atoms = res
            .eigenvalues()
            .iter()
            .enumerate()
            .map(|(i, &value)| Atom { value, weight: res.weight(i) })
            .collect();
        Self { atoms }
    }

    /// Sorts, drops zero weights, and merges values closer than
    /// `tol_cluster * max(1, max |value|)`.
    pub fn from_weighted(mut points: Vec<(f64, f64)>, tol_cluster: f64) -> Self {
        points.retain(|&(_, w)| w > 0.0);
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let scale = points.iter().fold(1.0_f64, |m, p| m.max(p.0.abs()));
        let gap = tol_cluster * scale;
        let mut atoms: Vec<Atom> = Vec::new();
        // value of the first point in the current cluster, running weighted offset
        let mut anchor = 0.0;
        let mut offset = 0.0;
        let mut last = f64::NEG_INFINITY;
        for (v, w) in points {
            match atoms.last_mut() {
                Some(a) if v - last <= gap => {
                    offset += w * (v - anchor);
                    a.weight += w;
                    a.value = anchor + offset / a.weight;
                }
                _ => {
                    anchor = v;
                    offset = 0.0;
                    atoms.push(Atom { value: v, weight: w });
                }
            }
            last = v;
        }
        Self { atoms }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Distribution of `-x`.
    pub fn mirrored(&self) -> Self {
        Self { atoms: self.atoms.iter().rev().map(|a| Atom { value: -a.value, weight: a.weight }).collect() }
    }

    /// Largest atom-wise difference in value or weight; `inf` when the atom
    /// counts differ.
    pub fn distance(&self, other: &Self) -> f64 {
        if self.atoms.len() != other.atoms.len() {
            return f64::INFINITY;
        }
        self.atoms
            .iter()
            .zip(&other.atoms)
            .map(|(a, b)| (a.value - b.value).abs().max((a.weight - b.weight).abs()))
            .fold(0.0, f64::max)
    }

    pub fn matches(&self, other: &Self, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    /// Distance between the distribution and its mirror image.
    pub fn symmetry_deviation(&self) -> f64 {
        self.distance(&self.mirrored())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.symmetry_deviation() <= tol
    }

    pub fn weight_in(&self, interval: &BorelInterval, eps_bnd: f64) -> f64 {
        self.atoms.iter().filter(|a| interval.contains(a.value, eps_bnd)).map(|a| a.weight).sum()
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight * a.value).sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.atoms.iter().map(|a| a.weight * (a.value - mean).powi(2)).sum()
    }

    /// `sup { alpha : tau(e_[alpha, inf)) >= 1/2 }`: the largest atom whose
    /// upper tail, itself included, carries at least half the mass.
    pub fn median(&self) -> f64 {
        let mut tail = 0.0;
        for a in self.atoms.iter().rev() {
            tail += a.weight;
            if tail >= 0.5 - HALF_EPS {
                return a.value;
            }
        }
        // weights sum to one, so the loop always returns
        self.atoms.first().map_or(0.0, |a| a.value)
    }
}

pub fn distribution(x: &HermitianOperator) -> Result<TraceDistribution> {
    Ok(TraceDistribution::from_resolution(&x.resolution()?))
}

/// Compares clustered atom lists; operators may live in different dimensions.
pub fn identically_distributed(x: &HermitianOperator, y: &HermitianOperator, tol: f64) -> Result<bool> {
    Ok(distribution(x)?.matches(&distribution(y)?, tol))
}

/// `x` and `-x` are identically distributed.
pub fn is_symmetric(x: &HermitianOperator, tol: f64) -> Result<bool> {
    Ok(distribution(x)?.is_symmetric(tol))
}

pub fn median(x: &HermitianOperator) -> Result<f64> {
    Ok(distribution(x)?.median())
}

pub(crate) fn check_threshold(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::BadThreshold(t))
    }
}

/// `tau(e_[t, inf)(x)) <= t^{-p} tau(|x|^p)`.
pub fn chebyshev_check(x: &HermitianOperator, t: f64, p: f64, tol: &Tolerances) -> Result<InequalityReport> {
    check_exponent(p)?;
    check_threshold(t)?;
    let res = x.resolution()?;
    let lhs = res.trace_in(&BorelInterval::at_least(t), tol.eps_bnd);
    let moment = lp_power_of(&res, p);
    let rhs = moment / t.powf(p);

    let mut b = ReportBuilder::new("chebyshev", tol.tol_check);
    b.parameter("t", t).parameter("p", p);
    b.trace("tau(e_[t,inf)(x))", lhs).trace("tau(|x|^p)", moment);
    b.bound("tau(e_[t,inf)(x)) <= t^-p tau(|x|^p)", lhs, rhs);
    Ok(b.finish(lhs, rhs))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianReport {
    #[serde(with = "ext_real")]
    pub median: f64,
    /// `tau(e_[m, inf)(x))`.
    #[serde(with = "ext_real")]
    pub tail_at_median: f64,
    /// `tau(e_(-inf, m](x))`.
    #[serde(with = "ext_real")]
    pub cdf_at_median: f64,
    #[serde(with = "ext_real")]
    pub exponent: f64,
    /// `2^{1/p} ||x||_p`.
    #[serde(with = "ext_real")]
    pub bound_2p: f64,
    /// `sqrt(2 var(x))`.
    #[serde(with = "ext_real")]
    pub bound_var: f64,
    pub definition_ok: bool,
    /// `tau(e_[alpha, inf)(|x|)) < 1/2` implies `|med| <= alpha` on the grid.
    pub tail_bound_ok: bool,
    #[serde(with = "ext_real")]
    pub tail_bound_slack: f64,
    /// `|med(x)| <= 2^{1/p} ||x||_p`.
    pub lp_bound_ok: bool,
    #[serde(with = "ext_real")]
    pub lp_bound_slack: f64,
    /// `|med(x) - tau(x)| <= sqrt(2 var(x))`.
    pub variance_bound_ok: bool,
    #[serde(with = "ext_real")]
    pub variance_bound_slack: f64,
    pub all_pass: bool,
}

/// Checks the defining inequalities of the median and the three median bounds.
///
/// The tail bound is quantified over the atoms of `|x|`, the midpoints between
/// consecutive atoms, half the smallest positive atom, and one point past the
/// spectrum. On an atomic spectrum the hypothesis is piecewise constant in
/// `alpha` and the conclusion is monotone, so this grid is exhaustive.
pub fn median_property_check(x: &HermitianOperator, p: f64, tol: &Tolerances) -> Result<MedianReport> {
    check_exponent(p)?;
    let res = x.resolution()?;
    let dist = TraceDistribution::from_resolution(&res);
    let m = dist.median();
    let eps = tol.eps_bnd;
    let tail_at_median = dist.weight_in(&BorelInterval::at_least(m), eps);
    let cdf_at_median = dist.weight_in(&BorelInterval::at_most(m), eps);
    let definition_ok = tail_at_median >= 0.5 - HALF_EPS && cdf_at_median >= 0.5 - HALF_EPS;

    let abs = TraceDistribution::from_resolution(&res.absolute());
    let mut grid: Vec<f64> = abs.atoms().iter().map(|a| a.value).filter(|v| *v > 0.0).collect();
    let mids: Vec<f64> = abs.atoms().windows(2).map(|w| 0.5 * (w[0].value + w[1].value)).collect();
    grid.extend(mids.into_iter().filter(|v| *v > 0.0));
    if let Some(smallest) = abs.atoms().iter().map(|a| a.value).find(|v| *v > 0.0) {
        grid.push(0.5 * smallest);
    }
    grid.push(res.norm() + 1.0);
    let mut tail_bound_slack = f64::INFINITY;
    for alpha in grid {
        if abs.weight_in(&BorelInterval::at_least(alpha), eps) < 0.5 - HALF_EPS {
            tail_bound_slack = tail_bound_slack.min(alpha - m.abs());
        }
    }

    let lp = lp_power_of(&res, p).powf(1.0 / p);
    let bound_2p = 2f64.powf(1.0 / p) * lp;
    let lp_bound_slack = bound_2p - m.abs();
    let bound_var = (2.0 * dist.variance()).sqrt();
    let variance_bound_slack = bound_var - (m - dist.mean()).abs();

    let ok = |s: f64| s >= -tol.tol_check;
    let tail_bound_ok = ok(tail_bound_slack);
    let lp_bound_ok = ok(lp_bound_slack);
    let variance_bound_ok = ok(variance_bound_slack);
    Ok(MedianReport {
        median: m,
        tail_at_median,
        cdf_at_median,
        exponent: p,
        bound_2p,
        bound_var,
        definition_ok,
        tail_bound_ok,
        tail_bound_slack,
        lp_bound_ok,
        lp_bound_slack,
        variance_bound_ok,
        variance_bound_slack,
        all_pass: definition_ok && tail_bound_ok && lp_bound_ok && variance_bound_ok,
    })
}
