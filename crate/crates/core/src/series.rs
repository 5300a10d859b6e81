//! Truncated power series over exact rationals or complex floats, Bernoulli
//! numbers, and the reference characteristic series.
//!
//! Every series here starts at `x^2`: constant and linear coefficients are
//! structurally absent.

use crate::rational::{factorial, format_rat, rat_to_f64, Rat};
use num_complex::Complex64;
use num_traits::{One, Zero};

/// Coefficients of a truncated series, indexed by powers `2..=order`.
#[derive(Clone, Debug, PartialEq)]
pub enum SeriesCoeffs {
    Exact(Vec<Rat>),
    Complex(Vec<Complex64>),
}

/// A power series truncated at `order`, starting at the quadratic term.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    order: usize,
    coeffs: SeriesCoeffs,
}

impl TruncatedSeries {
    pub fn zero_exact(order: usize) -> TruncatedSeries {
        assert!(order >= 2);
        TruncatedSeries {
            order,
            coeffs: SeriesCoeffs::Exact(vec![Rat::zero(); order - 1]),
        }
    }

    pub fn zero_complex(order: usize) -> TruncatedSeries {
        assert!(order >= 2);
        TruncatedSeries {
            order,
            coeffs: SeriesCoeffs::Complex(vec![Complex64::zero(); order - 1]),
        }
    }

    pub fn from_exact(coeffs: Vec<(usize, Rat)>, order: usize) -> TruncatedSeries {
        let mut s = TruncatedSeries::zero_exact(order);
        for (j, c) in coeffs {
            s.set_exact(j, c);
        }
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.coeffs, SeriesCoeffs::Exact(_))
    }

    pub fn set_exact(&mut self, j: usize, c: Rat) {
        assert!((2..=self.order).contains(&j));
        match &mut self.coeffs {
            SeriesCoeffs::Exact(v) => v[j - 2] = c,
            SeriesCoeffs::Complex(_) => panic!("set_exact on a complex series"),
        }
    }

    pub fn set_complex(&mut self, j: usize, c: Complex64) {
        assert!((2..=self.order).contains(&j));
        match &mut self.coeffs {
            SeriesCoeffs::Complex(v) => v[j - 2] = c,
            SeriesCoeffs::Exact(_) => panic!("set_complex on an exact series"),
        }
    }

    pub fn exact_coeff(&self, j: usize) -> Option<&Rat> {
        match &self.coeffs {
            SeriesCoeffs::Exact(v) => v.get(j.checked_sub(2)?),
            _ => None,
        }
    }

    /// The coefficient of `x^j` as a complex number (exact coefficients are
    /// converted).
    pub fn coeff_as_complex(&self, j: usize) -> Complex64 {
        if !(2..=self.order).contains(&j) {
            return Complex64::zero();
        }
        match &self.coeffs {
            SeriesCoeffs::Exact(v) => Complex64::new(rat_to_f64(&v[j - 2]), 0.0),
            SeriesCoeffs::Complex(v) => v[j - 2],
        }
    }

    /// Zeroes all odd-power coefficients.
    pub fn even_part(&self) -> TruncatedSeries {
        let mut out = self.clone();
        match &mut out.coeffs {
            SeriesCoeffs::Exact(v) => {
                for (i, c) in v.iter_mut().enumerate() {
                    if (i + 2) % 2 == 1 {
                        *c = Rat::zero();
                    }
                }
            }
            SeriesCoeffs::Complex(v) => {
                for (i, c) in v.iter_mut().enumerate() {
                    if (i + 2) % 2 == 1 {
                        *c = Complex64::zero();
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &TruncatedSeries) -> TruncatedSeries {
        assert_eq!(self.order, other.order, "order mismatch");
        match (&self.coeffs, &other.coeffs) {
            (SeriesCoeffs::Exact(a), SeriesCoeffs::Exact(b)) => TruncatedSeries {
                order: self.order,
                coeffs: SeriesCoeffs::Exact(
                    a.iter().zip(b).map(|(x, y)| x + y).collect(),
                ),
            },
            _ => {
                let mut out = TruncatedSeries::zero_complex(self.order);
                for j in 2..=self.order {
                    out.set_complex(j, self.coeff_as_complex(j) + other.coeff_as_complex(j));
                }
                out
            }
        }
    }

    pub fn sub(&self, other: &TruncatedSeries) -> TruncatedSeries {
        match (&self.coeffs, &other.coeffs) {
            (SeriesCoeffs::Exact(a), SeriesCoeffs::Exact(b)) => {
                assert_eq!(self.order, other.order);
                TruncatedSeries {
                    order: self.order,
                    coeffs: SeriesCoeffs::Exact(
                        a.iter().zip(b).map(|(x, y)| x - y).collect(),
                    ),
                }
            }
            _ => {
                assert_eq!(self.order, other.order);
                let mut out = TruncatedSeries::zero_complex(self.order);
                for j in 2..=self.order {
                    out.set_complex(j, self.coeff_as_complex(j) - other.coeff_as_complex(j));
                }
                out
            }
        }
    }

    /// Largest coefficient-wise absolute difference, for tolerance checks
    /// across field kinds.
    pub fn max_abs_diff(&self, other: &TruncatedSeries) -> f64 {
        let top = self.order.min(other.order);
        (2..=top)
            .map(|j| (self.coeff_as_complex(j) - other.coeff_as_complex(j)).norm())
            .fold(0.0, f64::max)
    }

    /// TSV rendering: one `power <tab> coefficient` row per power, exact
    /// coefficients as `p/q`, complex ones as `re,im`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("power\tcoefficient\n");
        for j in 2..=self.order {
            match &self.coeffs {
                SeriesCoeffs::Exact(v) => {
                    out.push_str(&format!("{}\t{}\n", j, format_rat(&v[j - 2])));
                }
                SeriesCoeffs::Complex(v) => {
                    let c = v[j - 2];
                    out.push_str(&format!("{}\t{:.17e},{:.17e}\n", j, c.re, c.im));
                }
            }
        }
        out
    }
}

/// Coefficients `b_j` of `X^{j-1} Y` in a group-like series of two
/// non-commuting variables, for `2 <= j <= order`.
#[derive(Clone, Debug, PartialEq)]
pub struct AssociatorCoefficients {
    pub order: usize,
    pub values: Vec<Complex64>,
}

impl AssociatorCoefficients {
    pub fn new(order: usize, values: Vec<Complex64>) -> AssociatorCoefficients {
        assert_eq!(values.len(), order - 1);
        AssociatorCoefficients { order, values }
    }

    pub fn value(&self, j: usize) -> Complex64 {
        self.values[j - 2]
    }
}

/// The `j`-th Bernoulli number with the `B_1 = -1/2` convention.
pub fn bernoulli(k: usize) -> Rat {
    bernoulli_table(k)[k].clone()
}

fn bernoulli_table(up_to: usize) -> Vec<Rat> {
    let mut b: Vec<Rat> = Vec::with_capacity(up_to + 1);
    for k in 0..=up_to {
        if k == 0 {
            b.push(Rat::one());
            continue;
        }
        // sum_{i=0}^{k} C(k+1, i) B_i = 0
        let mut acc = Rat::zero();
        for (i, bi) in b.iter().enumerate() {
            acc += Rat::from_integer(crate::rational::binomial(k + 1, i)) * bi;
        }
        b.push(-acc / Rat::from_integer((k as i64 + 1).into()));
    }
    b
}

/// The reference series `-1/2 log((e^{x/2} - e^{-x/2})/x)`, computed two
/// independent ways that must agree exactly: the closed-form coefficients
/// `-B_{2k}/(4k (2k)!)` and a direct truncated log expansion.
pub fn duflo_reference_series(order: usize) -> TruncatedSeries {
    assert!(order >= 2);
    let closed = duflo_closed_form(order);
    let expanded = duflo_log_expansion(order);
    assert_eq!(
        closed, expanded,
        "closed form and log expansion disagree; conventions are broken"
    );
    closed
}

/// The closed-form route: `-B_{2k}/(4k (2k)!)` on even powers.
pub fn duflo_closed_form(order: usize) -> TruncatedSeries {
    let mut s = TruncatedSeries::zero_exact(order);
    let mut k = 1;
    while 2 * k <= order {
        let b = bernoulli(2 * k);
        let denom = Rat::from_integer((4 * k as i64).into())
            * Rat::from_integer(factorial(2 * k));
        s.set_exact(2 * k, -b / denom);
        k += 1;
    }
    s
}

/// The expansion route: truncated coefficients of
/// `(e^{x/2} - e^{-x/2})/x = sum x^{2j}/(4^j (2j+1)!)`, then
/// `-1/2 log(1 + u)` term by term.
pub fn duflo_log_expansion(order: usize) -> TruncatedSeries {
    // Dense coefficient vectors indexed by power, length order+1.
    let mut u = vec![Rat::zero(); order + 1];
    let mut j = 1;
    while 2 * j <= order {
        let denom = Rat::from_integer(num_bigint::BigInt::from(4).pow(j as u32))
            * Rat::from_integer(factorial(2 * j + 1));
        u[2 * j] = Rat::one() / denom;
        j += 1;
    }
    // log(1+u) = sum_{m>=1} (-1)^{m+1} u^m / m, truncated.
    let mut log = vec![Rat::zero(); order + 1];
    let mut power = vec![Rat::zero(); order + 1];
    power[0] = Rat::one(); // u^0
    for m in 1..=order / 2 {
        power = truncated_product(&power, &u, order);
        let sign = if m % 2 == 1 { Rat::one() } else { -Rat::one() };
        let m_rat = Rat::from_integer((m as i64).into());
        for p in 0..=order {
            log[p] += &sign * &power[p] / &m_rat;
        }
    }
    let half = Rat::new((-1).into(), 2.into());
    let mut s = TruncatedSeries::zero_exact(order);
    for p in 2..=order {
        s.set_exact(p, &log[p] * &half);
    }
    s
}

fn truncated_product(a: &[Rat], b: &[Rat], order: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); order + 1];
    for i in 0..=order {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..=order - i {
            if b[j].is_zero() {
                continue;
            }
            out[i + j] += &a[i] * &b[j];
        }
    }
    out
}

/// Riemann zeta at integer argument `k >= 2`, by direct summation with an
/// Euler-Maclaurin tail, accurate well below 1e-15 relative error.
pub fn zeta(k: usize) -> f64 {
    assert!(k >= 2);
    let m = 24usize;
    let mut sum = 0.0f64;
    for n in 1..m {
        sum += (n as f64).powi(-(k as i32));
    }
    let mf = m as f64;
    // Integral term, half correction, and Bernoulli corrections.
    let mut tail = mf.powi(1 - k as i32) / (k as f64 - 1.0) + 0.5 * mf.powi(-(k as i32));
    let mut falling = k as f64; // k (k+1) ... rising actually; see below
    let mut power = mf.powi(-(k as i32) - 1);
    for j in 1..=6usize {
        let b2j = rat_to_f64(&bernoulli(2 * j));
        // d^{2j-1}/dx^{2j-1} x^{-k} = -(k)(k+1)...(k+2j-2) x^{-k-2j+1}
        tail += b2j / factorial_f64(2 * j) * falling * power;
        falling *= (k + 2 * j - 1) as f64 * (k + 2 * j) as f64;
        power /= mf * mf;
    }
    sum + tail
}

fn factorial_f64(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product::<f64>().max(1.0)
}

/// Exact value of `zeta(2k)` via `(-1)^{k+1} B_{2k} (2 pi)^{2k} / (2 (2k)!)`,
/// used to cross-check the summation route.
pub fn zeta_even_exact_f64(k: usize) -> f64 {
    let b = rat_to_f64(&bernoulli(2 * k));
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    sign * b * (2.0 * std::f64::consts::PI).powi(2 * k as i32)
        / (2.0 * factorial_f64(2 * k))
}

/// Which reference zeta series to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZetaVariant {
    /// `lambda_k = zeta(k) / (k (2 pi i)^k)`.
    HalfPropagator,
    /// The associator normalization; identical to `HalfPropagator` (the two
    /// closed forms expand to the same coefficients).
    Kz,
    /// The even part of the same series.
    At,
}

/// The zeta-valued reference series of the chosen variant.
pub fn zeta_reference_series(variant: ZetaVariant, order: usize) -> TruncatedSeries {
    assert!(order >= 2);
    let mut s = TruncatedSeries::zero_complex(order);
    for k in 2..=order {
        let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        let coeff = Complex64::new(zeta(k), 0.0) / (two_pi_i.powu(k as u32) * k as f64);
        s.set_complex(k, coeff);
    }
    match variant {
        ZetaVariant::HalfPropagator | ZetaVariant::Kz => s,
        ZetaVariant::At => s.even_part(),
    }
}

/// Characteristic series of an associator-coefficient table:
/// `lambda_j = b_j / j`.
pub fn associator_characteristic(phi: &AssociatorCoefficients) -> TruncatedSeries {
    let mut s = TruncatedSeries::zero_complex(phi.order);
    for j in 2..=phi.order {
        s.set_complex(j, phi.value(j) / j as f64);
    }
    s
}

/// `log Gamma` for complex arguments with positive real part (Lanczos, g = 7).
pub fn log_gamma(z: Complex64) -> Complex64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    let zm1 = z - 1.0;
    let mut x = Complex64::new(COEF[0], 0.0);
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        x += c / (zm1 + i as f64);
    }
    let t = zm1 + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (zm1 + 0.5) * t.ln() - t + x.ln()
}

/// The Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.5772156649015328606;

/// Evaluates `sum_{k=2}^{order} zeta(k) z^k / k`; its limit is
/// `log Gamma(1 - z) - gamma z` for `|z| < 1`.
pub fn zeta_log_gamma_sum(z: Complex64, order: usize) -> Complex64 {
    let mut acc = Complex64::zero();
    for k in 2..=order {
        acc += zeta(k) * z.powu(k as u32) / k as f64;
    }
    acc
}
