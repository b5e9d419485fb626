use nalgebra::DMatrix;
use num_bigint::{BigInt, Sign};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::multimod::BasisFactory;
use super::{dimension, required_precision, QExpansion};
use crate::arith::ArithTable;
use crate::{Error, Result};

/// Exact integer matrix of `T_p` on the Victor Miller basis: column `j`
/// holds the first `d` coefficients of `T_p g_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeckeMatrix {
    pub weight: u32,
    pub p: u64,
    pub entries: Vec<Vec<BigInt>>,
}

impl HeckeMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn trace(&self) -> BigInt {
        (0..self.dim()).map(|i| self.entries[i][i].clone()).sum()
    }

    pub fn mul(&self, o: &HeckeMatrix) -> Vec<Vec<BigInt>> {
        let d = self.dim();
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| (0..d).map(|l| &self.entries[i][l] * &o.entries[l][j]).sum())
                    .collect()
            })
            .collect()
    }

    /// Characteristic polynomial `x^d + c_{d-1} x^{d-1} + ... + c_0`,
    /// coefficients listed from `c_0`; available for `d <= 3`.
    pub fn charpoly(&self) -> Option<Vec<BigInt>> {
        let m = &self.entries;
        match self.dim() {
            1 => Some(vec![-m[0][0].clone(), BigInt::from(1)]),
            2 => {
                let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
                Some(vec![det, -self.trace(), BigInt::from(1)])
            }
            3 => {
                let minor = |a: usize, b: usize| &m[a][a] * &m[b][b] - &m[a][b] * &m[b][a];
                let det = &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
                    - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
                    + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0]);
                Some(vec![-det, minor(0, 1) + minor(0, 2) + minor(1, 2), -self.trace(), BigInt::from(1)])
            }
            _ => None,
        }
    }

    /// `T_p` scaled to the normalized coordinates: entry `(i, j)` times
    /// `j^w / (i^w p^w)` with `w = (k - 1) / 2`.
    pub fn balanced(&self) -> DMatrix<f64> {
        let d = self.dim();
        let w = (self.weight as f64 - 1.0) / 2.0;
        let lp = (self.p as f64).ln();
        DMatrix::from_fn(d, d, |i, j| {
            let shift = w * (((j + 1) as f64).ln() - ((i + 1) as f64).ln() - lp);
            scaled(&self.entries[i][j], shift)
        })
    }
}

/// `x * e^shift` evaluated without overflowing on huge `x`.
pub(crate) fn scaled(x: &BigInt, shift: f64) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let bits = x.bits();
    let drop = bits.saturating_sub(62);
    let top = (x.abs() >> drop).to_f64().unwrap();
    let ln = top.ln() + drop as f64 * std::f64::consts::LN_2 + shift;
    let v = ln.exp();
    if x.sign() == Sign::Minus {
        -v
    } else {
        v
    }
}

pub fn hecke_matrix(k: u32, p: u64, basis: &[QExpansion]) -> Result<HeckeMatrix> {
    let d = basis.len();
    let needed = p as usize * d + 1;
    let have = basis.iter().map(|g| g.precision()).min().unwrap_or(0);
    if have < needed {
        return Err(Error::InsufficientPrecision { required: needed, available: have });
    }
    let pk = BigInt::from(p).pow(k - 1);
    let entries = (1..=d)
        .map(|i| {
            basis
                .iter()
                .map(|g| {
                    let mut v = g.coeff(i * p as usize).clone();
                    if i as u64 % p == 0 {
                        v += &pk * g.coeff(i / p as usize);
                    }
                    v
                })
                .collect()
        })
        .collect();
    Ok(HeckeMatrix { weight: k, p, entries })
}

/// A level-one Hecke eigenform with normalized coefficients
/// `a_f(n) = lambda_f(n) / n^{(k-1)/2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeckeEigenform {
    pub weight: u32,
    pub index: usize,
    pub prime_bound: u64,
    /// `(p, a_f(p))` for every prime `p <= prime_bound`, ascending.
    pub prime_eigenvalues: Vec<(u64, f64)>,
    pub l1_symsq: Option<f64>,
    #[serde(skip)]
    dense: Vec<f64>,
}

impl HeckeEigenform {
    pub fn new(weight: u32, index: usize, prime_bound: u64, prime_eigenvalues: Vec<(u64, f64)>) -> Self {
        let mut dense = vec![f64::NAN; prime_bound as usize + 1];
        for &(p, a) in &prime_eigenvalues {
            dense[p as usize] = a;
        }
        HeckeEigenform { weight, index, prime_bound, prime_eigenvalues, l1_symsq: None, dense }
    }

    /// Rebuild the lookup table after deserialization.
    pub fn reindex(self) -> Self {
        let mut f = HeckeEigenform::new(self.weight, self.index, self.prime_bound, self.prime_eigenvalues);
        f.l1_symsq = self.l1_symsq;
        f
    }

    pub fn a_p(&self, p: u64) -> Result<f64> {
        match self.dense.get(p as usize) {
            Some(v) if !v.is_nan() => Ok(*v),
            _ => Err(Error::MissingPrime(p)),
        }
    }

    /// Largest `N` such that every `a_f(n)`, `n <= N`, is servable.
    pub fn coefficient_precision(&self) -> u64 {
        let mut n = self.prime_bound + 1;
        while !crate::arith::is_prime(n) {
            n += 1;
        }
        n - 1
    }

    /// `a_f(p^e)` from `a_f(p^{e+1}) = a_f(p) a_f(p^e) - a_f(p^{e-1})`.
    pub fn prime_power(&self, p: u64, e: u32) -> Result<f64> {
        let ap = self.a_p(p)?;
        let (mut prev, mut cur) = (1.0, ap);
        if e == 0 {
            return Ok(1.0);
        }
        for _ in 1..e {
            let next = ap * cur - prev;
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }

    pub fn coefficient(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::invalid("coefficients are indexed from n = 1"));
        }
        let factors = ArithTable::global().factorize(n);
        if let Some(&(p, _)) = factors.iter().find(|&&(p, _)| p > self.prime_bound) {
            return Err(Error::MissingPrime(p));
        }
        factors.iter().try_fold(1.0, |acc, &(p, e)| Ok(acc * self.prime_power(p, e)?))
    }

    /// `a_f(n^2)` for `n = 0..=n_max` (entry 0 unused).
    pub fn square_coefficients(&self, n_max: u64) -> Result<Vec<f64>> {
        let table = ArithTable::global();
        let mut out = vec![0.0; n_max as usize + 1];
        for n in 1..=n_max {
            let mut v = 1.0;
            for (p, e) in table.factorize(n) {
                if p > self.prime_bound {
                    return Err(Error::MissingPrime(p));
                }
                v *= self.prime_power(p, 2 * e)?;
            }
            out[n as usize] = v;
        }
        Ok(out)
    }
}

/// `c_m = sum_{d^2 e = m} a_f(e^2)`, the Dirichlet coefficients of
/// `L(s, sym^2 f)`, for `m = 0..=n` (entry 0 unused).
pub fn symsq_dirichlet_coeffs(f: &HeckeEigenform, n: u64) -> Result<Vec<f64>> {
    let sq = f.square_coefficients(n)?;
    let mut c = vec![0.0; n as usize + 1];
    let mut d = 1u64;
    while d * d <= n {
        for e in 1..=n / (d * d) {
            c[(d * d * e) as usize] += sq[e as usize];
        }
        d += 1;
    }
    Ok(c)
}

/// Exact data kept alongside the floating eigenforms of one weight.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub weight: u32,
    pub t2: HeckeMatrix,
    pub forms: Vec<HeckeEigenform>,
}

/// Eigenforms of weight `k` with `a_f(p)` for all primes `p <= prime_bound`.
pub fn eigenforms(k: u32, prime_bound: u64) -> Result<Vec<HeckeEigenform>> {
    let mut factory = BasisFactory::new(required_precision(k, prime_bound));
    Ok(eigensystem(&mut factory, k, prime_bound)?.forms)
}

/// Several weights sharing one basis factory; precision is set by the
/// largest dimension among `weights`.
pub fn eigenforms_for_weights(weights: &[u32], prime_bound: u64) -> Result<Vec<EigenSystem>> {
    let precision = weights.iter().map(|&k| required_precision(k, prime_bound)).max().unwrap_or(0);
    let mut factory = BasisFactory::new(precision);
    weights.iter().map(|&k| eigensystem(&mut factory, k, prime_bound)).collect()
}

pub(crate) fn eigensystem(factory: &mut BasisFactory, k: u32, prime_bound: u64) -> Result<EigenSystem> {
    if prime_bound < 2 {
        return Err(Error::invalid("prime bound must be at least 2"));
    }
    let d = dimension(k);
    if d == 0 {
        return Err(Error::invalid(format!("no cusp forms of weight {k}")));
    }
    let needed = required_precision(k, prime_bound);
    if factory.precision() < needed {
        return Err(Error::InsufficientPrecision { required: needed, available: factory.precision() });
    }
    // exact coefficients only where they are read: the T_5 window and the primes
    let primes = crate::arith::primes_up_to(prime_bound);
    let window = 5 * (d + 1) + 1;
    let mut indices: Vec<usize> = (0..window).collect();
    indices.extend(primes.iter().map(|&p| p as usize).filter(|&p| p >= window));
    let lifted = factory.basis_at(k, &indices)?;
    let basis: Vec<QExpansion> = lifted
        .iter()
        .map(|c| QExpansion::new(k, c[..window].to_vec()))
        .collect();
    let coeff_at = |j: usize, n: u64| -> &BigInt {
        let pos = if (n as usize) < window {
            n as usize
        } else {
            window + indices[window..].binary_search(&(n as usize)).expect("prime index lifted")
        };
        &lifted[j][pos]
    };
    let t2 = hecke_matrix(k, 2, &basis)?;
    let t3 = hecke_matrix(k, 3, &basis)?;
    let t5 = hecke_matrix(k, 5, &basis)?;
    let (b2, b3, b5) = (t2.balanced(), t3.balanced(), t5.balanced());

    let vectors = match eigenvectors(&b2) {
        Ok(v) => v,
        Err(Error::Degenerate { .. }) => eigenvectors(&b3).map_err(|e| match e {
            Error::Degenerate { gap, .. } => Error::Degenerate { weight: k, gap },
            other => other,
        })?,
        Err(e) => return Err(e),
    };

    for v in &vectors {
        for (name, b) in [("T_2", &b2), ("T_3", &b3), ("T_5", &b5)] {
            let bv = b * v;
            let lambda = bv[0];
            let resid = (&bv - v * lambda).norm();
            if resid > 1e-8 * b.norm().max(1.0) * v.norm() {
                return Err(Error::Contract(format!(
                    "weight {k}: {name} residual {resid:.3e} on a T_2 eigenvector"
                )));
            }
        }
    }
    if let Some(cp) = t2.charpoly() {
        check_charpoly(k, &cp, &vectors, &b2)?;
    }

    // normalized basis values g_j(n) (j/n)^w for n <= prime_bound
    let w = (k as f64 - 1.0) / 2.0;
    let scaled_basis: Vec<Vec<f64>> = (0..d)
        .map(|j| {
            let lj = ((j + 1) as f64).ln();
            primes.iter().map(|&p| scaled(coeff_at(j, p), w * (lj - (p as f64).ln()))).collect()
        })
        .collect();

    let mut forms: Vec<(f64, f64, Vec<(u64, f64)>)> = vectors
        .iter()
        .map(|v| {
            let table: Vec<(u64, f64)> = primes
                .iter()
                .enumerate()
                .map(|(pi, &p)| {
                    let a: f64 = (0..d).map(|j| v[j] * scaled_basis[j][pi]).sum();
                    (p, a)
                })
                .collect();
            let a2 = table[0].1;
            let a3 = table.get(1).map(|t| t.1).unwrap_or(0.0);
            (a2, a3, table)
        })
        .collect();
    forms.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    let forms = forms
        .into_iter()
        .enumerate()
        .map(|(i, (_, _, table))| HeckeEigenform::new(k, i, prime_bound, table))
        .collect();
    Ok(EigenSystem { weight: k, t2, forms })
}

/// Eigenvectors of a balanced Hecke matrix, scaled so the first entry is 1.
fn eigenvectors(b: &DMatrix<f64>) -> Result<Vec<nalgebra::DVector<f64>>> {
    let d = b.nrows();
    let norm = b.norm().max(1.0);
    let mut eig: Vec<f64> = match b.clone().schur().eigenvalues() {
        Some(e) => e.iter().copied().collect(),
        None => {
            return Err(Error::Contract("Hecke matrix has non-real eigenvalues".into()));
        }
    };
    eig.sort_by(f64::total_cmp);
    for w in eig.windows(2) {
        let gap = w[1] - w[0];
        if gap < 1e-8 * norm {
            return Err(Error::Degenerate { weight: 0, gap });
        }
    }
    let mut out = Vec::with_capacity(d);
    for &lambda in &eig {
        let shifted = b - DMatrix::identity(d, d) * (lambda + 1e-10 * norm);
        let lu = shifted.lu();
        let mut v = nalgebra::DVector::from_element(d, 1.0);
        for _ in 0..4 {
            v = lu.solve(&v).ok_or_else(|| Error::Contract("singular inverse iteration".into()))?;
            let s = v.amax();
            v /= s;
        }
        if v[0].abs() < 1e-12 * v.amax() {
            return Err(Error::Contract("eigenvector with vanishing first coefficient".into()));
        }
        let first = v[0];
        v /= first;
        out.push(v);
    }
    Ok(out)
}

/// Every floating eigenvalue must be a root of the exact characteristic
/// polynomial, checked in normalized coordinates.
fn check_charpoly(k: u32, cp: &[BigInt], vectors: &[nalgebra::DVector<f64>], b: &DMatrix<f64>) -> Result<()> {
    let d = cp.len() - 1;
    let w = (k as f64 - 1.0) / 2.0 * 2f64.ln();
    // x = 2^w y turns c_i x^i into 2^{w d} * (c_i 2^{-w(d-i)}) y^i
    let coeffs: Vec<f64> = cp.iter().enumerate().map(|(i, c)| scaled(c, -w * (d - i) as f64)).collect();
    if d == 2 {
        let disc = &cp[1] * &cp[1] - BigInt::from(4) * &cp[0];
        if !disc.is_positive() {
            return Err(Error::Contract(format!("weight {k}: T_2 discriminant is not positive")));
        }
    }
    for v in vectors {
        let y = (b * v)[0];
        let val: f64 = coeffs.iter().rev().fold(0.0, |acc, &c| acc * y + c);
        let scale: f64 = coeffs.iter().enumerate().map(|(i, c)| c.abs() * y.abs().powi(i as i32)).sum();
        if val.abs() > 1e-9 * scale {
            return Err(Error::Contract(format!(
                "weight {k}: eigenvalue {y} misses the exact characteristic polynomial ({val:.3e})"
            )));
        }
    }
    Ok(())
}
