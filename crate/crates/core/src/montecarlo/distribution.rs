//! Mean-zero, finite-variance step laws and their exact truncated moments.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::analytic::normal_sf;
use crate::error::{domain, parameter, Error, Result};
use crate::rngcore::Stream;

/// Largest atom index whose location `exp(e^k)` is representable in `f64`.
pub const ATOMS_SAMPLABLE_K_MAX: u32 = 6;

/// Law of the increments `X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "kebab-case")]
pub enum DistributionSpec {
    /// ±1 with probability 1/2 each.
    Rademacher,
    StdNormal,
    /// Uniform on `(−w, w)`.
    CenteredUniform { half_width: f64 },
    /// `value` with probability `prob`, `−prob·value/(1 − prob)` otherwise.
    TwoPoint { value: f64, prob: f64 },
    /// Symmetric atoms at `±exp(e^k)`, `1 ≤ k ≤ k_max`, each with mass
    /// `c / (2 k² exp(2e^k))`; the remaining mass sits at 0.
    AtomsDoublyExp { c: f64, k_max: u32 },
}

impl DistributionSpec {
    /// Two-point law with unit variance: `prob = 1/(1 + value²)`.
    pub fn two_point_unit(value: f64) -> Self {
        DistributionSpec::TwoPoint {
            value,
            prob: 1.0 / (1.0 + value * value),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DistributionSpec::Rademacher | DistributionSpec::StdNormal => Ok(()),
            DistributionSpec::CenteredUniform { half_width } => {
                if half_width > 0.0 && half_width.is_finite() {
                    Ok(())
                } else {
                    Err(domain(format!("uniform half-width must be positive, got {half_width}")))
                }
            }
            DistributionSpec::TwoPoint { value, prob } => {
                if !(value != 0.0 && value.is_finite()) {
                    return Err(domain(format!("two-point value must be finite and non-zero, got {value}")));
                }
                if !(prob > 0.0 && prob < 1.0) {
                    return Err(domain(format!("two-point probability must lie in (0, 1), got {prob}")));
                }
                Ok(())
            }
            DistributionSpec::AtomsDoublyExp { c, k_max } => {
                if !(c > 0.0 && c.is_finite()) {
                    return Err(domain(format!("atom constant must satisfy c > 0, got {c}")));
                }
                if k_max == 0 {
                    return Err(parameter("atom distribution needs k_max ≥ 1"));
                }
                let mass: f64 = (1..=k_max).map(|k| atom_mass(c, k)).sum();
                if mass > 1.0 {
                    return Err(domain(format!("atom masses sum to {mass} > 1; reduce c")));
                }
                Ok(())
            }
        }
    }

    /// σ² = E X².
    pub fn variance(&self) -> f64 {
        match *self {
            DistributionSpec::Rademacher | DistributionSpec::StdNormal => 1.0,
            DistributionSpec::CenteredUniform { half_width } => half_width * half_width / 3.0,
            DistributionSpec::TwoPoint { value, prob } => prob * value * value / (1.0 - prob),
            DistributionSpec::AtomsDoublyExp { c, k_max } => {
                c * (1..=k_max).map(|k| 1.0 / f64::from(k * k)).sum::<f64>()
            }
        }
    }

    pub fn sigma(&self) -> f64 {
        self.variance().sqrt()
    }

    /// `sup |X|`, when finite.
    pub fn support_bound(&self) -> Option<f64> {
        match *self {
            DistributionSpec::Rademacher => Some(1.0),
            DistributionSpec::StdNormal => None,
            DistributionSpec::CenteredUniform { half_width } => Some(half_width),
            DistributionSpec::TwoPoint { value, prob } => {
                Some(value.abs().max((prob * value / (1.0 - prob)).abs()))
            }
            DistributionSpec::AtomsDoublyExp { k_max, .. } => {
                let x = f64::from(k_max).exp().exp();
                x.is_finite().then_some(x)
            }
        }
    }

    /// Short human-readable form, used in records.
    pub fn summary(&self) -> String {
        match *self {
            DistributionSpec::Rademacher => "rademacher".into(),
            DistributionSpec::StdNormal => "normal".into(),
            DistributionSpec::CenteredUniform { half_width } => format!("uniform(w={half_width})"),
            DistributionSpec::TwoPoint { value, prob } => format!("twopoint(v={value},p={prob})"),
            DistributionSpec::AtomsDoublyExp { c, k_max } => format!("atoms(c={c},kmax={k_max})"),
        }
    }

    /// `(E[X I{|X| ≤ t}], E[X² I{|X| ≤ t}])`.
    pub fn truncated_moments(&self, t: f64) -> (f64, f64) {
        match *self {
            DistributionSpec::Rademacher => {
                if t >= 1.0 {
                    (0.0, 1.0)
                } else {
                    (0.0, 0.0)
                }
            }
            DistributionSpec::StdNormal => (0.0, 1.0 - normal_tail_second_moment(t)),
            DistributionSpec::CenteredUniform { half_width: w } => {
                let s = t.min(w);
                (0.0, s * s * s / (3.0 * w))
            }
            DistributionSpec::TwoPoint { value, prob } => {
                let other = -prob * value / (1.0 - prob);
                let mut m = (0.0, 0.0);
                for (x, p) in [(value, prob), (other, 1.0 - prob)] {
                    if x.abs() <= t {
                        m.0 += p * x;
                        m.1 += p * x * x;
                    }
                }
                m
            }
            DistributionSpec::AtomsDoublyExp { c, k_max } => {
                let ln_t = t.ln();
                let m2 = (1..=k_max)
                    .filter(|&k| f64::from(k).exp() <= ln_t)
                    .map(|k| c / f64::from(k * k))
                    .sum();
                (0.0, m2)
            }
        }
    }

    /// `E[X² I{|X| ≥ t}]` with `t` given through its logarithm.
    pub fn tail_second_moment(&self, t: LogT) -> f64 {
        let ln_t = t.ln_t();
        let t_lin = || ln_t.exp();
        match *self {
            DistributionSpec::Rademacher => {
                if ln_t <= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            DistributionSpec::StdNormal => normal_tail_second_moment(t_lin()),
            DistributionSpec::CenteredUniform { half_width: w } => {
                let t = t_lin();
                if t >= w {
                    0.0
                } else {
                    (w * w * w - t * t * t) / (3.0 * w)
                }
            }
            DistributionSpec::TwoPoint { value, prob } => {
                let other = -prob * value / (1.0 - prob);
                [(value, prob), (other, 1.0 - prob)]
                    .iter()
                    .filter(|(x, _)| x.abs().ln() >= ln_t)
                    .map(|(x, p)| p * x * x)
                    .sum()
            }
            // |X| = exp(e^k) ≥ t  ⇔  e^k ≥ ln t; never materializes the atoms
            DistributionSpec::AtomsDoublyExp { c, k_max } => (1..=k_max)
                .filter(|&k| f64::from(k).exp() >= ln_t)
                .map(|k| c / f64::from(k * k))
                .sum(),
        }
    }

    /// Prepared sampler; fails when the law cannot be sampled in `f64`.
    pub fn sampler(&self) -> Result<Sampler> {
        self.validate()?;
        Ok(match *self {
            DistributionSpec::Rademacher => Sampler::Rademacher,
            DistributionSpec::StdNormal => Sampler::StdNormal,
            DistributionSpec::CenteredUniform { half_width } => Sampler::Uniform { half_width },
            DistributionSpec::TwoPoint { value, prob } => Sampler::TwoPoint {
                hi: value,
                lo: -prob * value / (1.0 - prob),
                prob,
            },
            DistributionSpec::AtomsDoublyExp { c, k_max } => {
                if k_max > ATOMS_SAMPLABLE_K_MAX {
                    return Err(Error::Capability(format!(
                        "atom exp(e^{k_max}) overflows f64 (e^{k_max} > 709); sampling supports k_max ≤ {ATOMS_SAMPLABLE_K_MAX}"
                    )));
                }
                let mut cumulative = Vec::with_capacity(k_max as usize);
                let mut locations = Vec::with_capacity(k_max as usize);
                let mut acc = 0.0;
                for k in 1..=k_max {
                    acc += atom_mass(c, k);
                    cumulative.push(acc);
                    locations.push(f64::from(k).exp().exp());
                }
                Sampler::Atoms {
                    cumulative,
                    locations,
                }
            }
        })
    }
}

/// Combined mass of the pair `±exp(e^k)`.
fn atom_mass(c: f64, k: u32) -> f64 {
    (c.ln() - 2.0 * f64::from(k).ln() - 2.0 * f64::from(k).exp()).exp()
}

/// `E[Z² I{|Z| ≥ t}] = 2 (t φ(t) + Φ̄(t))` for a standard normal `Z`.
pub fn normal_tail_second_moment(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    let density = (-0.5 * t * t).exp() / (2.0 * PI).sqrt();
    2.0 * (t * density + normal_sf(t))
}

/// A level `t > 0` stored as `ln t`, so atoms far beyond `f64` range can be
/// addressed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogT(f64);

impl LogT {
    pub fn from_t(t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(domain(format!("level t must be a positive real, got {t}")));
        }
        Ok(LogT(t.ln()))
    }

    pub fn from_ln(ln_t: f64) -> Result<Self> {
        if !ln_t.is_finite() {
            return Err(domain(format!("ln t must be finite, got {ln_t}")));
        }
        Ok(LogT(ln_t))
    }

    /// Location `exp(e^k)` of the k-th doubly exponential atom.
    pub fn atom(k: u32) -> Self {
        LogT(f64::from(k).exp())
    }

    pub fn ln_t(&self) -> f64 {
        self.0
    }

    /// Guarded `log log t`.
    pub fn loglog(&self) -> f64 {
        // log t = ln t ∨ 1, then log log t = ln(log t) ∨ 1
        let log_t = self.0.max(1.0);
        log_t.max(E).ln()
    }

    /// `t` itself, infinite when beyond `f64` range.
    pub fn value(&self) -> f64 {
        self.0.exp()
    }
}

/// Sampling state prepared from a [`DistributionSpec`].
#[derive(Debug, Clone, PartialEq)]
pub enum Sampler {
    Rademacher,
    StdNormal,
    Uniform { half_width: f64 },
    TwoPoint { hi: f64, lo: f64, prob: f64 },
    Atoms { cumulative: Vec<f64>, locations: Vec<f64> },
}

impl Sampler {
    #[inline]
    pub fn draw(&self, stream: &mut Stream) -> f64 {
        match self {
            Sampler::Rademacher => {
                if stream.next_u64() >> 63 == 1 {
                    1.0
                } else {
                    -1.0
                }
            }
            Sampler::StdNormal => stream.gaussian(),
            Sampler::Uniform { half_width } => half_width * (2.0 * stream.uniform01() - 1.0),
            Sampler::TwoPoint { hi, lo, prob } => {
                if stream.uniform01() < *prob {
                    *hi
                } else {
                    *lo
                }
            }
            Sampler::Atoms {
                cumulative,
                locations,
            } => {
                let u = stream.uniform01();
                let total = *cumulative.last().expect("k_max ≥ 1");
                if u >= total {
                    return 0.0;
                }
                let k = cumulative.partition_point(|&m| m <= u);
                let lower = if k == 0 { 0.0 } else { cumulative[k - 1] };
                // first half of the pair's mass goes to +x_k
                if u - lower < 0.5 * (cumulative[k] - lower) {
                    locations[k]
                } else {
                    -locations[k]
                }
            }
        }
    }
}

/// One draw from `dist`.
pub fn sample(dist: &DistributionSpec, stream: &mut Stream) -> Result<f64> {
    Ok(dist.sampler()?.draw(stream))
}

/// `log log t · E[X² I{|X| ≥ t}]` at each level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub ln_t: f64,
    pub loglog_t: f64,
    pub tail_second_moment: f64,
    pub value: f64,
}

/// Tail-moment profile used to inspect the `o(1/log log t)` and
/// `O(1/log log t)` conditions.
pub fn condition_profile(dist: &DistributionSpec, t_grid: &[LogT]) -> Result<Vec<ProfilePoint>> {
    dist.validate()?;
    Ok(t_grid
        .iter()
        .map(|&t| {
            let m = dist.tail_second_moment(t);
            let ll = t.loglog();
            ProfilePoint {
                ln_t: t.ln_t(),
                loglog_t: ll,
                tail_second_moment: m,
                value: ll * m,
            }
        })
        .collect())
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rademacher_draws() {
        let mut s = Stream::new(3, 0);
        let smp = DistributionSpec::Rademacher.sampler().unwrap();
        let n = 1_000_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let x = smp.draw(&mut s);
            assert!(x == 1.0 || x == -1.0);
            sum += x;
        }
        assert!((sum / n as f64).abs() < 3e-3);
    }

    #[test]
    fn uniform_variance() {
        let d = DistributionSpec::CenteredUniform { half_width: 3f64.sqrt() };
        assert!((d.variance() - 1.0).abs() < 1e-15);
        let smp = d.sampler().unwrap();
        let mut s = Stream::new(4, 0);
        let n = 1_000_000;
        let (mut m1, mut m2) = (0.0, 0.0);
        for _ in 0..n {
            let x = smp.draw(&mut s);
            m1 += x;
            m2 += x * x;
        }
        let var = m2 / n as f64 - (m1 / n as f64).powi(2);
        assert!((var - 1.0).abs() < 0.01);
    }

    #[test]
    fn two_point_is_centred() {
        let d = DistributionSpec::two_point_unit(10.0);
        assert!((d.variance() - 1.0).abs() < 1e-14);
        let DistributionSpec::TwoPoint { value, prob } = d else { unreachable!() };
        let other = -prob * value / (1.0 - prob);
        assert!((prob * value + (1.0 - prob) * other).abs() < 1e-15);
        assert!((other + 0.1).abs() < 1e-15);
    }

    #[test]
    fn atoms_capability_limit() {
        let d = DistributionSpec::AtomsDoublyExp { c: 1.0, k_max: 7 };
        assert!(matches!(d.sampler(), Err(Error::Capability(_))));
        let mut s = Stream::new(0, 0);
        assert!(matches!(sample(&d, &mut s), Err(Error::Capability(_))));
        let d = DistributionSpec::AtomsDoublyExp { c: 1.0, k_max: 6 };
        assert!(d.sampler().is_ok());
        assert!((d.variance() - (1..=6).map(|k| 1.0 / (k * k) as f64).sum::<f64>()).abs() < 1e-15);
        assert!(DistributionSpec::AtomsDoublyExp { c: 500.0, k_max: 3 }.validate().is_err());
    }

    #[test]
    fn atoms_sampler_hits_first_atom() {
        let d = DistributionSpec::AtomsDoublyExp { c: 200.0, k_max: 3 };
        let smp = d.sampler().unwrap();
        let mut s = Stream::new(11, 0);
        let n = 200_000;
        let x1 = 1f64.exp().exp();
        let (mut plus, mut minus) = (0, 0);
        for _ in 0..n {
            let x = smp.draw(&mut s);
            if x == x1 {
                plus += 1;
            } else if x == -x1 {
                minus += 1;
            } else {
                assert!(x == 0.0 || x.abs() == 2f64.exp().exp() || x.abs() == 3f64.exp().exp());
            }
        }
        let p = 200.0 / (x1 * x1);
        let expected = p * n as f64;
        let got = (plus + minus) as f64;
        assert!((got - expected).abs() < 5.0 * expected.sqrt());
        assert!(((plus - minus) as f64).abs() < 5.0 * expected.sqrt());
    }

    #[test]
    fn truncated_moments_closed_forms() {
        let d = DistributionSpec::two_point_unit(10.0);
        let (m1, m2) = d.truncated_moments(3.1);
        assert!((m1 + 10.0 / 101.0).abs() < 1e-15);
        assert!((m2 - 1.0 / 101.0).abs() < 1e-15);
        assert!(((m2 - m1 * m1) - 1.0 / 10_201.0).abs() < 1e-16);
        assert_eq!(DistributionSpec::Rademacher.truncated_moments(1.0), (0.0, 1.0));
        assert_eq!(DistributionSpec::StdNormal.truncated_moments(518.0), (0.0, 1.0));
        let u = DistributionSpec::CenteredUniform { half_width: 2.0 };
        assert!((u.truncated_moments(1.0).1 - 1.0 / 6.0).abs() < 1e-15);
        assert!((u.truncated_moments(5.0).1 - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn normal_tail_moment_oracle() {
        // Simpson quadrature of 2∫_t^∞ x² φ(x) dx
        let t = 2.0;
        let m = 100_000;
        let h = 20.0 / m as f64;
        let f = |x: f64| x * x * (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
        let mut acc = f(t) + f(t + 20.0);
        for i in 1..m {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(t + i as f64 * h);
        }
        let q = 2.0 * acc * h / 3.0;
        assert!((normal_tail_second_moment(t) - q).abs() < 1e-12);
        assert!((normal_tail_second_moment(10.0) / 1.554_159_431_349_06e-21 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn profile_examples() {
        let rows = condition_profile(&DistributionSpec::StdNormal, &[LogT::from_t(10.0).unwrap()]).unwrap();
        assert!(rows[0].value < 1e-20 && rows[0].value > 0.0);
        let rows = condition_profile(&DistributionSpec::Rademacher, &[LogT::from_t(2.0).unwrap()]).unwrap();
        assert_eq!(rows[0].value, 0.0);
        let d = DistributionSpec::AtomsDoublyExp { c: 1.0, k_max: 30 };
        let rows = condition_profile(&d, &[LogT::atom(20)]).unwrap();
        let direct: f64 = (20..=30).map(|j| 1.0 / (j * j) as f64).sum::<f64>() * 20.0;
        assert_eq!(rows[0].loglog_t, 20.0);
        assert!((rows[0].value - direct).abs() < 1e-12);
    }

    #[test]
    fn atoms_profile_bounds() {
        let c = 1.5;
        let k_max = 40;
        let d = DistributionSpec::AtomsDoublyExp { c, k_max };
        for k in 5..=k_max / 2 {
            let v = condition_profile(&d, &[LogT::atom(k)]).unwrap()[0].value;
            let kf = f64::from(k);
            assert!(v >= c * (1.0 - kf / f64::from(k_max)) && v <= c * kf / (kf - 1.0), "k = {k}: {v}");
        }
    }
}
