//! Zeros of the Jost function and statistics of their distribution.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::coeffs::ClassParams;
use crate::error::{Error, Result};
use crate::jost::log_growth_bound;
use crate::poly::ComplexPolynomial;
use crate::Complex64;

/// Roots closer than `max(CLUSTER_RADIUS, CLUSTER_RADIUS_REL * |z|)` are
/// reported as one zero of higher multiplicity. Double roots only come out of
/// the iteration to about `sqrt(eps) |z|`, hence the relative term.
pub const CLUSTER_RADIUS: f64 = 1e-8;
pub const CLUSTER_RADIUS_REL: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 500;
/// Relative step below which an iterate is considered converged.
pub const STEP_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub location: Complex64,
    pub multiplicity: usize,
}

/// Multiset of resonances, kept sorted by modulus.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64, usize)>", into = "Vec<(f64, f64, usize)>")]
pub struct ResonanceSet {
    zeros: Vec<Resonance>,
}

impl ResonanceSet {
    pub fn new(mut zeros: Vec<Resonance>) -> Result<Self> {
        if let Some(z) = zeros.iter().find(|z| z.multiplicity == 0) {
            return Err(Error::Argument(format!("zero multiplicity at {}", z.location)));
        }
        if let Some(z) = zeros.iter().find(|z| !(z.location.re.is_finite() && z.location.im.is_finite())) {
            return Err(Error::Argument(format!("non-finite resonance {}", z.location)));
        }
        sort_by_modulus(&mut zeros);
        Ok(Self { zeros })
    }

    /// Every location with multiplicity one.
    pub fn simple(locations: impl IntoIterator<Item = Complex64>) -> Result<Self> {
        Self::new(
            locations
                .into_iter()
                .map(|location| Resonance { location, multiplicity: 1 })
                .collect(),
        )
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn zeros(&self) -> &[Resonance] {
        &self.zeros
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.zeros.iter().map(|z| z.multiplicity).sum()
    }

    /// Locations repeated according to multiplicity.
    pub fn expanded(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.zeros
            .iter()
            .flat_map(|z| std::iter::repeat_n(z.location, z.multiplicity))
    }

    pub fn min_modulus(&self) -> Option<f64> {
        self.zeros.iter().map(|z| z.location.norm()).reduce(f64::min)
    }

    /// `prod (1 - z / z_n)^{m_n}` evaluated at `z`.
    pub fn hadamard_product(&self, z: Complex64) -> Complex64 {
        self.zeros.iter().fold(Complex64::new(1.0, 0.0), |acc, r| {
            acc * (1.0 - z / r.location).powi(r.multiplicity as i32)
        })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["re", "im", "multiplicity"])?;
        for z in &self.zeros {
            w.serialize((z.location.re, z.location.im, z.multiplicity))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            re: f64,
            im: f64,
            multiplicity: usize,
        }
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["re", "im", "multiplicity"] {
            return Err(Error::Argument(format!(
                "resonance CSV must have header re,im,multiplicity, got {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut zeros = Vec::new();
        for row in r.deserialize() {
            let row: Row = row?;
            zeros.push(Resonance {
                location: Complex64::new(row.re, row.im),
                multiplicity: row.multiplicity,
            });
        }
        Self::new(zeros)
    }
}

fn sort_by_modulus(zeros: &mut [Resonance]) {
    zeros.sort_by(|a, b| {
        a.location
            .norm()
            .total_cmp(&b.location.norm())
            .then(a.location.arg().total_cmp(&b.location.arg()))
    });
}

impl TryFrom<Vec<(f64, f64, usize)>> for ResonanceSet {
    type Error = Error;

    fn try_from(rows: Vec<(f64, f64, usize)>) -> Result<Self> {
        Self::new(
            rows.into_iter()
                .map(|(re, im, multiplicity)| Resonance {
                    location: Complex64::new(re, im),
                    multiplicity,
                })
                .collect(),
        )
    }
}

impl From<ResonanceSet> for Vec<(f64, f64, usize)> {
    fn from(set: ResonanceSet) -> Self {
        set.zeros
            .iter()
            .map(|z| (z.location.re, z.location.im, z.multiplicity))
            .collect()
    }
}

/// Newton correction `p(z)/p'(z)` and the relative backward error
/// `|p(z)| / sum |a_j| |z|^j`. Outside the unit disk the reversed polynomial
/// is evaluated at `1/z` to avoid overflow and cancellation.
fn newton_ratio(coeffs: &[Complex64], z: Complex64) -> (Complex64, f64) {
    let n = coeffs.len() - 1;
    let zero = Complex64::new(0.0, 0.0);
    if z.norm() <= 1.0 {
        let (mut p, mut dp, mut pabs) = (zero, zero, 0.0);
        let r = z.norm();
        for &c in coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
            pabs = pabs * r + c.norm();
        }
        (p / dp, p.norm() / pabs)
    } else {
        let w = z.inv();
        let r = w.norm();
        let (mut q, mut dq, mut qabs) = (zero, zero, 0.0);
        // q(w) = sum_j a_{n-j} w^j, so Horner runs over a_0, a_1, ..., a_n
        for &c in coeffs.iter() {
            dq = dq * w + q;
            q = q * w + c;
            qabs = qabs * r + c.norm();
        }
        // p(z) = z^n q(1/z)  =>  p/p' = z q / (n q - w q')
        (z * q / (n as f64 * q - w * dq), q.norm() / qabs)
    }
}

/// Starting points from the upper convex hull of `(j, log|a_j|)`: each hull
/// edge from `i` to `k` contributes `k - i` points on a circle whose radius
/// matches the magnitude of that group of roots.
fn initial_guesses(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let pts: Vec<(usize, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(j, c)| (j, c.norm().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b unless it lies strictly above the chord a -> p
            let cross = (b.0 as f64 - a.0 as f64) * (p.1 - a.1) - (b.1 - a.1) * (p.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let sigma = 0.7;
    let mut guesses = Vec::with_capacity(n);
    for edge in hull.windows(2) {
        let (i, li) = edge[0];
        let (k, lk) = edge[1];
        let count = k - i;
        let radius = ((li - lk) / count as f64).exp();
        for j in 0..count {
            let angle = std::f64::consts::TAU * (j as f64 / count as f64 + i as f64 / n as f64) + sigma;
            guesses.push(Complex64::from_polar(radius, angle));
        }
    }
    guesses
}

/// Raw Aberth–Ehrlich iteration on the coefficient vector (leading coefficient nonzero).
pub(crate) fn aberth_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    let mut roots = initial_guesses(coeffs);
    debug_assert_eq!(roots.len(), n);
    let mut done = vec![false; n];
    for _ in 0..MAX_ITERATIONS {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let zi = roots[i];
            let (ratio, backward) = newton_ratio(coeffs, zi);
            if backward <= 4.0 * f64::EPSILON || !ratio.is_finite() && backward == 0.0 {
                done[i] = true;
                continue;
            }
            let repulsion: Complex64 = roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &zj)| (zi - zj).inv())
                .sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if !step.is_finite() {
                return Err(Error::Numerical(format!("non-finite Aberth step at root {i}")));
            }
            roots[i] = zi - step;
            if step.norm() <= STEP_TOLERANCE * roots[i].norm().max(f64::MIN_POSITIVE) {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return Ok(roots);
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        partial: roots,
    })
}

/// All zeros of `pi`. Each root must satisfy `|pi(r)| <= tol * sum |a_j| |r|^j`;
/// roots within the cluster radius of each other are merged.
pub fn find_resonances(pi: &ComplexPolynomial, tol: f64) -> Result<ResonanceSet> {
    let Some(degree) = pi.degree() else {
        return Err(Error::Argument("the zero polynomial has no isolated zeros".into()));
    };
    if degree == 0 {
        return Ok(ResonanceSet::empty());
    }
    let lead = pi.coeff(degree);
    let monic: Vec<Complex64> = pi.coeffs().iter().map(|&c| c / lead).collect();
    let roots = aberth_roots(&monic)?;

    for r in &roots {
        let residual = pi.eval(*r).norm() / pi.eval_abs(*r);
        if !(residual <= tol) {
            return Err(Error::Numerical(format!(
                "root {r} has relative residual {residual:e} above {tol:e}"
            )));
        }
    }

    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for r in roots {
        match clusters
            .iter_mut()
            .find(|(c, m)| {
                let center = *c / *m as f64;
                let radius = CLUSTER_RADIUS.max(CLUSTER_RADIUS_REL * center.norm().max(r.norm()));
                (center - r).norm() < radius
            })
        {
            Some((sum, m)) => {
                *sum += r;
                *m += 1;
            }
            None => clusters.push((r, 1)),
        }
    }
    ResonanceSet::new(
        clusters
            .into_iter()
            .map(|(sum, m)| Resonance {
                location: sum / m as f64,
                multiplicity: m,
            })
            .collect(),
    )
}

/// Constant `L` bounding `|Pi|` on the disk of radius `e`, from the growth envelope.
pub fn growth_constant(params: &ClassParams) -> f64 {
    let at_e = Complex64::new(std::f64::consts::E, 0.0);
    log_growth_bound(at_e, params)
        .expect("|e| >= 1")
        .exp()
}

/// `1 + delta = (QL + e) / (QL + 1)`: no member of the class has a resonance
/// in the open disk of this radius.
pub fn resonance_free_radius(params: &ClassParams) -> f64 {
    let ql = params.q() * growth_constant(params);
    1.0 + (std::f64::consts::E - 1.0) / (ql + 1.0)
}

/// Number of zeros, with multiplicity, in the open disk `|z| < r`.
pub fn counting_function(set: &ResonanceSet, r: f64) -> usize {
    set.zeros
        .iter()
        .filter(|z| z.location.norm() < r)
        .map(|z| z.multiplicity)
        .sum()
}

/// `sum_{|z_n| >= R} 1/|z_n|`, with multiplicity.
pub fn inverse_moment(set: &ResonanceSet, radius: f64) -> f64 {
    set.zeros
        .iter()
        .filter(|z| z.location.norm() >= radius)
        .map(|z| z.multiplicity as f64 / z.location.norm())
        .sum()
}
