//! Finite abelian covers along homomorphisms to Z, and the geography of
//! the resulting manifolds: Euler characteristic, cusp census, signature
//! and slope.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::cusps::{census, CuspRecord, FlatLabel};
use crate::exact::json::Fraction;
use crate::exact::{q, qf, Rational};
use crate::group::{cusp_killing_hom, screw_hom, presentation, IntHomomorphism};
use crate::homology::truncated_complex;
use crate::pairing::{ridge_cycles, SideGluing, SidePairing};
use crate::{Error, Result};

/// Handedness of the quarter-twist cusp of the bundled manifold in the
/// ambient orientation of the coordinate frame. Cusp η-invariants are
/// signed relative to it, so that the bundled manifold has signature +1.
pub const REFERENCE_HANDEDNESS: i32 = 1;

/// Labels for the cover with deck group `Z/n × Z/m`: side `s` goes to
/// `(first(g_s) mod n, second(g_s) mod m)`.
#[derive(Clone, Debug)]
pub struct CoverSpec {
    pub base: SidePairing,
    pub n: usize,
    pub m: usize,
    pub first: IntHomomorphism,
    pub second: IntHomomorphism,
}

impl CoverSpec {
    /// Cover of the bundled manifold along `(h mod n, v mod m)`.
    pub fn of_bundled(base: SidePairing, n: usize, m: usize) -> Self {
        let p = presentation(&base);
        CoverSpec {
            first: cusp_killing_hom(&p),
            second: screw_hom(&p),
            base,
            n,
            m,
        }
    }
}

/// Copies of the 24-cell indexed by `Z/n × Z/m` (copy `i·m + j`); side `s`
/// of copy `k` is glued to side `σ(s)` of copy `k + label(s)`.
#[derive(Clone, Debug)]
pub struct CoverComplex {
    base: SidePairing,
    pub n: usize,
    pub m: usize,
    labels: [(usize, usize); 24],
}

impl SideGluing for CoverComplex {
    fn base(&self) -> &SidePairing {
        &self.base
    }

    fn copies(&self) -> usize {
        self.n * self.m
    }

    fn neighbour_copy(&self, copy: usize, side: usize) -> usize {
        let (i, j) = (copy / self.m, copy % self.m);
        let (a, b) = self.labels[side];
        ((i + a) % self.n) * self.m + (j + b) % self.m
    }
}

impl CoverComplex {
    pub fn degree(&self) -> usize {
        self.n * self.m
    }

    pub fn label(&self, side: usize) -> (usize, usize) {
        self.labels[side]
    }

    /// Every ridge cycle of the base closes up in every copy.
    pub fn lifts_ridge_cycles(&self) -> bool {
        let cycles = ridge_cycles(&self.base);
        (0..self.copies()).all(|k| {
            cycles.iter().all(|c| {
                let end = c.sides().iter().fold(k, |copy, &s| self.neighbour_copy(copy, s));
                end == k
            })
        })
    }
}

fn modulo(x: i64, n: usize) -> usize {
    x.rem_euclid(n as i64) as usize
}

pub fn build_cover(spec: &CoverSpec) -> Result<CoverComplex> {
    if spec.n == 0 || spec.m == 0 {
        return Err(Error::Disconnected { image: 0, order: 0 });
    }
    let p = presentation(&spec.base);
    for (i, r) in p.relators.iter().enumerate() {
        let a = spec.first.eval(&p, r)?;
        let b = spec.second.eval(&p, r)?;
        if modulo(a, spec.n) != 0 || modulo(b, spec.m) != 0 {
            return Err(Error::RelatorNotKilled(i));
        }
    }
    let labels: [(usize, usize); 24] = std::array::from_fn(|s| {
        (
            modulo(spec.first.on_side(&p, &spec.base, s), spec.n),
            modulo(spec.second.on_side(&p, &spec.base, s), spec.m),
        )
    });
    // image of the labels in Z/n × Z/m
    let order = spec.n * spec.m;
    let mut seen = vec![false; order];
    seen[0] = true;
    let mut stack = vec![0usize];
    while let Some(k) = stack.pop() {
        for &(a, b) in &labels {
            let t = ((k / spec.m + a) % spec.n) * spec.m + (k % spec.m + b) % spec.m;
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    let image = seen.iter().filter(|&&x| x).count();
    if image != order {
        return Err(Error::Disconnected { image, order });
    }
    let cc = CoverComplex {
        base: spec.base.clone(),
        n: spec.n,
        m: spec.m,
        labels,
    };
    if !cc.lifts_ridge_cycles() {
        return Err(Error::Inconsistent("a ridge cycle does not close in the cover".into()));
    }
    Ok(cc)
}

/// Magnitude of the η-invariant of a cusp section type.
pub fn eta_magnitude(label: FlatLabel) -> Rational {
    match label {
        FlatLabel::F1 | FlatLabel::F2 | FlatLabel::F6 => q(0),
        FlatLabel::F3 => qf(2, 3),
        FlatLabel::F4 => q(1),
        FlatLabel::F5 => qf(4, 3),
    }
}

/// η of one cusp, signed against [`REFERENCE_HANDEDNESS`].
pub fn eta(rec: &CuspRecord) -> Rational {
    let h = rec.handedness.unwrap_or(0);
    -eta_magnitude(rec.flat) * Rational::from_integer(BigInt::from(h * REFERENCE_HANDEDNESS))
}

/// `(σ_signed, σ_abs)`, with σ the negated sum of cusp η-invariants.
pub fn signature(cusps: &[CuspRecord]) -> Result<(i64, i64)> {
    let total: Rational = cusps.iter().map(eta).sum();
    let sigma = -total;
    if !sigma.is_integer() {
        return Err(Error::Inconsistent(format!("signature {sigma} is not an integer")));
    }
    let s = sigma.to_integer();
    let s: i64 = s.try_into().map_err(|_| Error::Inconsistent("signature out of range".into()))?;
    Ok((s, s.abs()))
}

/// Exact inequalities relating χ, σ, the number of cusps k and volume
/// `(4π²/3)·χ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundChecks {
    /// χ > 0.
    pub chi_positive: bool,
    /// |σ| ≤ (4/3)·k.
    pub sigma_by_cusps: bool,
    /// Vol > 0.61293·k, using π² > 9.8696044.
    pub volume_by_cusps: bool,
    /// χ > 0.03493·|σ|.
    pub chi_by_sigma: bool,
    /// |σ/χ| < 28.62869.
    pub slope_bounded: bool,
}

impl BoundChecks {
    pub fn all(&self) -> bool {
        self.chi_positive && self.sigma_by_cusps && self.volume_by_cusps && self.chi_by_sigma && self.slope_bounded
    }
}

pub fn bound_checks(chi: i64, sigma_abs: i64, cusps: usize) -> BoundChecks {
    let chi_q = q(chi);
    let s = q(sigma_abs);
    let k = q(cusps as i64);
    let pi2_lower = qf(98_696_044, 10_000_000);
    BoundChecks {
        chi_positive: chi > 0,
        sigma_by_cusps: s <= qf(4, 3) * &k,
        volume_by_cusps: qf(4, 3) * pi2_lower * &chi_q > qf(61_293, 100_000) * &k,
        chi_by_sigma: chi_q > qf(3_493, 100_000) * &s,
        slope_bounded: chi > 0 && s < qf(2_862_869, 100_000) * &chi_q,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeographyReport {
    pub n: usize,
    pub m: usize,
    pub degree: usize,
    pub chi: i64,
    pub cusp_count: usize,
    pub cusps: Vec<CuspRecord>,
    pub type_counts: Vec<(FlatLabel, usize)>,
    pub sigma_signed: i64,
    pub sigma_abs: i64,
    /// σ_abs / χ.
    pub slope: Fraction,
    /// Volume divided by π².
    pub volume_over_pi2: Fraction,
    pub bounds: BoundChecks,
    pub bounds_ok: bool,
}

impl GeographyReport {
    pub fn count(&self, label: FlatLabel) -> usize {
        self.cusps.iter().filter(|c| c.flat == label).count()
    }
}

/// Euler characteristic from the cell counts of the truncated quotient.
pub fn euler_characteristic<G: SideGluing + ?Sized>(g: &G) -> Result<i64> {
    Ok(truncated_complex(g)?.chain_complex().euler_characteristic())
}

/// Full report; fails hard if any bound is violated.
pub fn geography<G: SideGluing + ?Sized>(g: &G, n: usize, m: usize) -> Result<GeographyReport> {
    let chi = euler_characteristic(g)?;
    let cusps = census(g)?;
    let (sigma_signed, sigma_abs) = signature(&cusps)?;
    let bounds = bound_checks(chi, sigma_abs, cusps.len());
    if !bounds.all() {
        return Err(Error::Inconsistent(format!("geography bound violated: {bounds:?}")));
    }
    let mut type_counts: Vec<(FlatLabel, usize)> = Vec::new();
    for c in &cusps {
        match type_counts.iter_mut().find(|(l, _)| *l == c.flat) {
            Some(e) => e.1 += 1,
            None => type_counts.push((c.flat, 1)),
        }
    }
    type_counts.sort();
    let slope = Rational::new(BigInt::from(sigma_abs), BigInt::from(chi));
    Ok(GeographyReport {
        n,
        m,
        degree: g.copies(),
        chi,
        cusp_count: cusps.len(),
        cusps,
        type_counts,
        sigma_signed,
        sigma_abs,
        slope: slope.into(),
        volume_over_pi2: (qf(4, 3) * q(chi)).into(),
        bounds,
        bounds_ok: true,
    })
}

/// Cover of the bundled manifold along `(h mod n, v mod m)` and its report.
pub fn bundled_cover_report(base: &SidePairing, n: usize, m: usize) -> Result<(CoverComplex, GeographyReport)> {
    let cc = build_cover(&CoverSpec::of_bundled(base.clone(), n, m))?;
    let r = geography(&cc, n, m)?;
    Ok((cc, r))
}

/// Copies met by each chiral cusp, sorted.
pub fn chiral_copies(r: &GeographyReport) -> Vec<Vec<usize>> {
    r.cusps
        .iter()
        .filter(|c| c.flat.is_chiral())
        .map(|c| {
            let mut v = c.copies.clone();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect()
}
