use crate::error::{Error, Result};
use crate::orlicz::nonlinearity::{segment_index, NonlinearitySpec};
use crate::quadrature::GaussLegendre;

/// Knots per decade of the cached antiderivative table.
const KNOTS_PER_DECADE: f64 = 16.0;
/// Upper end of the cached table.
const TABLE_MAX: f64 = 1e20;
/// Relative agreement required between the one-panel and two-panel rule when
/// the table is built.
const TABLE_TOL: f64 = 1e-10;

/// The N-function `Φ(t) = ∫₀ᵗ φ(s) ds` generated by a [`NonlinearitySpec`].
///
/// Closed-form families evaluate directly. `PowerLog` and `PowerOverLog` use a
/// convergent series near the origin and, above it, a log-spaced table of
/// exact partial integrals completed by a fixed Gauss–Legendre panel, so the
/// derivative of `Φ` is `φ` to rounding.
#[derive(Debug, Clone)]
pub struct YoungFunction {
    spec: NonlinearitySpec,
    antiderivative: Antiderivative,
    rule: GaussLegendre,
}

#[derive(Debug, Clone)]
enum Antiderivative {
    PurePower {
        p: f64,
    },
    /// Cumulative integrals at the knots of a piecewise-linear `φ`.
    Piecewise {
        cumulative: Vec<f64>,
    },
    Tabled {
        series: Series,
        table: Table,
    },
}

#[derive(Debug, Clone)]
enum Series {
    /// `Φ(t) = t^p Σ_{k≥1} (-1)^{k+1} x^k / (k (p + k r))`, `x = t^r`.
    PowerLog { p: f64, r: f64 },
    /// `Φ(t) = Σ_k c_k t^{p-1+k} / (p-1+k)` with `s/log(1+s) = Σ c_k s^k`.
    PowerOverLog { p: f64, coeffs: Vec<f64> },
}

#[derive(Debug, Clone)]
struct Table {
    start: f64,
    log_ratio: f64,
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl YoungFunction {
    pub fn new(spec: NonlinearitySpec) -> Result<Self> {
        spec.validate()?;
        let rule = GaussLegendre::new(10);
        let antiderivative = match spec {
            NonlinearitySpec::PurePower { p } => Antiderivative::PurePower { p },
            NonlinearitySpec::Tabulated { ref knots } => {
                let mut cumulative = Vec::with_capacity(knots.len());
                let mut acc = 0.0;
                cumulative.push(0.0);
                for w in knots.windows(2) {
                    acc += 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0);
                    cumulative.push(acc);
                }
                Antiderivative::Piecewise { cumulative }
            }
            NonlinearitySpec::PowerLog { p, r } => {
                let series = Series::PowerLog { p, r };
                let start = 0.5f64.powf(1.0 / r);
                Antiderivative::Tabled {
                    table: build_table(&spec, &series, start)?,
                    series,
                }
            }
            NonlinearitySpec::PowerOverLog { p } => {
                let series = Series::PowerOverLog {
                    p,
                    coeffs: gregory_coefficients(64),
                };
                Antiderivative::Tabled {
                    table: build_table(&spec, &series, 0.25)?,
                    series,
                }
            }
        };
        let yf = Self {
            spec,
            antiderivative,
            rule,
        };
        yf.check_shape()?;
        Ok(yf)
    }

    pub fn spec(&self) -> &NonlinearitySpec {
        &self.spec
    }

    pub fn has_closed_form(&self) -> bool {
        self.spec.has_closed_form_antiderivative()
    }

    /// Largest admissible argument of `φ` and `Φ`.
    pub fn domain_max(&self) -> f64 {
        self.spec.domain_max()
    }

    /// `φ(t)`, odd in `t`.
    pub fn phi(&self, t: f64) -> Result<f64> {
        let v = self.spec.phi_pos(t.abs())?;
        Ok(if t < 0.0 { -v } else { v })
    }

    /// `φ'(|t|)`; at the origin the value at a tiny positive argument is used.
    pub fn dphi(&self, t: f64) -> Result<f64> {
        self.spec.dphi_pos(t.abs().max(1e-12))
    }

    /// `Φ(t)`, even in `t`.
    #[allow(non_snake_case)]
    pub fn Phi(&self, t: f64) -> Result<f64> {
        let t = t.abs();
        if t == 0.0 {
            return Ok(0.0);
        }
        match &self.antiderivative {
            Antiderivative::PurePower { p } => Ok(t.powf(*p) / p),
            Antiderivative::Piecewise { cumulative } => {
                let NonlinearitySpec::Tabulated { knots } = &self.spec else {
                    unreachable!()
                };
                let max = self.domain_max();
                if t > max {
                    return Err(Error::ExtrapolationRefused { t, max });
                }
                let i = segment_index(knots, t);
                let (t0, v0) = knots[i];
                let slope = (knots[i + 1].1 - v0) / (knots[i + 1].0 - t0);
                let dt = t - t0;
                Ok(cumulative[i] + v0 * dt + 0.5 * slope * dt * dt)
            }
            Antiderivative::Tabled { series, table } => {
                if t <= table.start {
                    return Ok(series.eval(t));
                }
                let (knot, base) = table.lower_knot(t);
                if t <= TABLE_MAX {
                    return Ok(base + self.panel(knot, t)?);
                }
                // Beyond the table: walk log-spaced panels from the last knot.
                let mut acc = base;
                let mut a = knot;
                let step = table.log_ratio.exp();
                while a < t {
                    let b = (a * step).min(t);
                    acc += self.panel(a, b)?;
                    a = b;
                }
                Ok(acc)
            }
        }
    }

    fn panel(&self, a: f64, b: f64) -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        self.rule.try_integrate(a, b, |s| self.spec.phi_pos(s))
    }

    /// `φ⁻¹(y)` for `y ≥ 0`, by geometric bracketing and bisection.
    pub fn phi_inverse(&self, y: f64) -> Result<f64> {
        invert_increasing(y, self.domain_max(), |t| self.spec.phi_pos(t))
    }

    /// `Φ⁻¹(y)` for `y ≥ 0`.
    #[allow(non_snake_case)]
    pub fn Phi_inverse(&self, y: f64) -> Result<f64> {
        invert_increasing(y, self.domain_max(), |t| self.Phi(t))
    }

    /// Complementary function `Φ*(t) = sup_{s≥0} (st - Φ(s))`, attained at `s = φ⁻¹(t)`.
    #[allow(non_snake_case)]
    pub fn Phi_conjugate(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("Φ* is evaluated for t ≥ 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        let s = self.phi_inverse(t)?;
        Ok(t * s - self.Phi(s)?)
    }

    /// Sanity checks on the generated function: `φ` odd and strictly
    /// increasing, `Φ` convex and even, and the N-function limits probed at
    /// the sampled extremes.
    fn check_shape(&self) -> Result<()> {
        let max = self.domain_max();
        let hi = if max.is_finite() { max } else { 1e6 };
        let lo = if max.is_finite() { max * 1e-4 } else { 1e-6 };
        let n = 200;
        let grid: Vec<f64> = (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect();
        let mut prev = 0.0;
        for &t in &grid {
            let v = self.phi(t)?;
            if !(v > prev) || self.phi(-t)? != -v {
                return Err(Error::InvalidSpec(format!(
                    "{} is not an odd increasing function near t = {t}",
                    self.spec.label()
                )));
            }
            prev = v;
        }
        for w in grid.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mid = self.Phi(0.5 * (a + b))?;
            let chord = 0.5 * (self.Phi(a)? + self.Phi(b)?);
            if mid > chord * (1.0 + 1e-12) {
                return Err(Error::InvalidSpec(format!("Φ is not convex on [{a}, {b}]")));
            }
        }
        if max.is_infinite() {
            let small = self.Phi(lo)? / lo;
            let large = self.Phi(hi)? / hi;
            if !(small < 1.0 && large > 1.0) {
                return Err(Error::InvalidSpec(format!(
                    "{} fails the N-function probes (Φ(t)/t = {small:e} at {lo:e}, {large:e} at {hi:e})",
                    self.spec.label()
                )));
            }
        }
        Ok(())
    }
}

/// `Φ(t)`; free-function form of [`YoungFunction::Phi`].
#[allow(non_snake_case)]
pub fn eval_Phi(yf: &YoungFunction, t: f64) -> Result<f64> {
    yf.Phi(t)
}

/// `Φ*(t)`; free-function form of [`YoungFunction::Phi_conjugate`].
#[allow(non_snake_case)]
pub fn eval_Phi_conjugate(yf: &YoungFunction, t: f64) -> Result<f64> {
    yf.Phi_conjugate(t)
}

impl Series {
    fn eval(&self, t: f64) -> f64 {
        match self {
            Series::PowerLog { p, r } => {
                let x = t.powf(*r);
                let mut sum = 0.0;
                let mut xk = 1.0;
                for k in 1..400 {
                    xk *= x;
                    let kf = k as f64;
                    let term = xk / (kf * (p + kf * r));
                    sum += if k % 2 == 1 { term } else { -term };
                    if term < 1e-18 * sum.abs() {
                        break;
                    }
                }
                t.powf(*p) * sum
            }
            Series::PowerOverLog { p, coeffs } => {
                let mut sum = 0.0;
                let mut tk = 1.0;
                for (k, c) in coeffs.iter().enumerate() {
                    let term = c * tk / (p - 1.0 + k as f64);
                    sum += term;
                    if term.abs() < 1e-18 * sum.abs() {
                        break;
                    }
                    tk *= t;
                }
                t.powf(p - 1.0) * sum
            }
        }
    }
}

impl Table {
    fn lower_knot(&self, t: f64) -> (f64, f64) {
        let idx = ((t / self.start).ln() / self.log_ratio).floor() as usize;
        let idx = idx.min(self.knots.len() - 1);
        // Guard against the floor landing one knot too high after rounding.
        let idx = if self.knots[idx] > t && idx > 0 { idx - 1 } else { idx };
        (self.knots[idx], self.values[idx])
    }
}

fn build_table(spec: &NonlinearitySpec, series: &Series, start: f64) -> Result<Table> {
    let fine = GaussLegendre::new(16);
    let log_ratio = std::f64::consts::LN_10 / KNOTS_PER_DECADE;
    let count = ((TABLE_MAX / start).ln() / log_ratio).ceil() as usize + 1;
    let mut knots = Vec::with_capacity(count);
    let mut values = Vec::with_capacity(count);
    let mut acc = series.eval(start);
    knots.push(start);
    values.push(acc);
    for i in 1..count {
        let a = knots[i - 1];
        let b = start * (log_ratio * i as f64).exp();
        let phi = |s: f64| spec.phi_pos(s);
        let coarse = fine.try_integrate(a, b, phi)?;
        let m = 0.5 * (a + b);
        let refined = fine.try_integrate(a, m, phi)? + fine.try_integrate(m, b, phi)?;
        if (coarse - refined).abs() > TABLE_TOL * refined.abs() {
            return Err(Error::Quadrature {
                a,
                b,
                coarse,
                fine: refined,
            });
        }
        acc += refined;
        knots.push(b);
        values.push(acc);
    }
    Ok(Table {
        start,
        log_ratio,
        knots,
        values,
    })
}

/// Power-series coefficients of `s / log(1 + s)`.
fn gregory_coefficients(n: usize) -> Vec<f64> {
    // log(1+s)/s = Σ_j (-1)^j s^j / (j+1); invert the series.
    let l: Vec<f64> = (0..n)
        .map(|j| if j % 2 == 0 { 1.0 } else { -1.0 } / (j as f64 + 1.0))
        .collect();
    let mut c = vec![0.0; n];
    c[0] = 1.0;
    for k in 1..n {
        c[k] = -(1..=k).map(|j| l[j] * c[k - j]).sum::<f64>();
    }
    c
}

/// Solves `f(t) = y` for an increasing `f` with `f(0) = 0`.
pub(crate) fn invert_increasing<F>(y: f64, max: f64, f: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if y < 0.0 || !y.is_finite() {
        return Err(Error::Domain(format!("cannot invert at y = {y}")));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0f64.min(max);
    while f(hi)? < y {
        lo = hi;
        if hi >= max {
            return Err(Error::ExtrapolationRefused { t: hi * 2.0, max });
        }
        hi = (hi * 2.0).min(max);
        if hi > 1e300 {
            return Err(Error::Numeric(format!("no bracket found for y = {y}")));
        }
    }
    if lo == 0.0 {
        // Shrink geometrically so tiny targets keep full relative precision.
        let mut probe = hi;
        loop {
            let next = probe * 0.5;
            if next == 0.0 || f(next)? < y {
                lo = next;
                hi = probe;
                break;
            }
            probe = next;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn yf(spec: NonlinearitySpec) -> YoungFunction {
        YoungFunction::new(spec).unwrap()
    }

    #[test]
    fn quadratic_closed_form() {
        let f = yf(NonlinearitySpec::PurePower { p: 2.0 });
        assert_eq!(f.Phi(3.0).unwrap(), 4.5);
        assert_eq!(f.Phi(0.0).unwrap(), 0.0);
        assert_eq!(f.Phi(-3.0).unwrap(), 4.5);
    }

    #[test]
    fn power_log_matches_closed_form_antiderivative_for_p2_r2() {
        // ∫₀ᵗ s log(1+s²) ds = ((1+t²) ln(1+t²) - t²) / 2
        let f = yf(NonlinearitySpec::PowerLog { p: 2.0, r: 2.0 });
        let exact = |t: f64| {
            let u = t * t;
            if u < 0.25 {
                // (1+u)ln(1+u) - u = Σ_{k≥2} (-u)^k / (k(k-1)), free of cancellation.
                (2..60).map(|k| (-u).powi(k) / (k * (k - 1)) as f64).sum::<f64>() / 2.0
            } else {
                ((1.0 + u) * u.ln_1p() - u) / 2.0
            }
        };
        assert!((f.Phi(1.0).unwrap() - 0.193_147_180_559_945_3).abs() < 1e-14);
        for &t in &[1e-4, 0.01, 0.3, 0.70710678, 0.9, 1.0, 2.5, 17.0, 1e3, 1e6] {
            let got = f.Phi(t).unwrap();
            let want = exact(t);
            assert!((got - want).abs() <= 1e-12 * want, "t = {t}: {got} vs {want}");
        }
    }

    #[test]
    fn power_over_log_series_and_table_agree() {
        let f = yf(NonlinearitySpec::PowerOverLog { p: 4.0 });
        let rule = GaussLegendre::new(40);
        // Direct high-order quadrature on a smooth stretch far from zero.
        let direct = rule.integrate(0.25, 2.0, |s| s.powi(3) / s.ln_1p());
        let got = f.Phi(2.0).unwrap() - f.Phi(0.25).unwrap();
        assert!((got - direct).abs() < 1e-13 * direct);
        // Continuity across the series/table boundary.
        let a = f.Phi(0.25 * (1.0 - 1e-13)).unwrap();
        let b = f.Phi(0.25 * (1.0 + 1e-13)).unwrap();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn derivative_of_phi_is_phi() {
        for spec in [
            NonlinearitySpec::PowerLog { p: 2.5, r: 1.5 },
            NonlinearitySpec::PowerOverLog { p: 4.0 },
        ] {
            let f = yf(spec);
            for &t in &[0.05, 0.6, 1.3, 9.0, 250.0] {
                let h = 1e-5 * t;
                let fd = (f.Phi(t + h).unwrap() - f.Phi(t - h).unwrap()) / (2.0 * h);
                let phi = f.phi(t).unwrap();
                assert!((fd - phi).abs() < 1e-8 * phi, "t = {t}: {fd} vs {phi}");
            }
        }
    }

    #[test]
    fn beyond_table_walks_panels() {
        let f = yf(NonlinearitySpec::PowerOverLog { p: 3.0 });
        let a = f.Phi(TABLE_MAX).unwrap();
        let b = f.Phi(TABLE_MAX * 1.5).unwrap();
        let direct = GaussLegendre::new(30).integrate(TABLE_MAX, 1.5 * TABLE_MAX, |s| s * s / s.ln_1p());
        assert!(((b - a) - direct).abs() < 1e-10 * direct);
    }

    #[test]
    fn tabulated_antiderivative_is_exact() {
        let f = yf(NonlinearitySpec::Tabulated {
            knots: vec![(0.0, 0.0), (1.0, 1.0), (3.0, 5.0)],
        });
        assert!((f.Phi(1.0).unwrap() - 0.5).abs() < 1e-15);
        // 0.5 + ∫₁² (1 + 2(s-1)) ds = 0.5 + 2
        assert!((f.Phi(2.0).unwrap() - 2.5).abs() < 1e-15);
        assert!(f.Phi(3.5).is_err());
    }

    #[test]
    fn inverses_round_trip() {
        let f = yf(NonlinearitySpec::PowerLog { p: 2.5, r: 1.5 });
        for &t in &[1e-7, 1e-3, 0.4, 2.0, 1e4] {
            let y = f.Phi(t).unwrap();
            let back = f.Phi_inverse(y).unwrap();
            assert!((back - t).abs() < 1e-12 * t, "{t} -> {back}");
            let back = f.phi_inverse(f.phi(t).unwrap()).unwrap();
            assert!((back - t).abs() < 1e-12 * t);
        }
    }

    #[test]
    fn gregory_coefficients_start_correctly() {
        let c = gregory_coefficients(6);
        let want = [1.0, 0.5, -1.0 / 12.0, 1.0 / 24.0, -19.0 / 720.0, 3.0 / 160.0];
        for (a, b) in c.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
