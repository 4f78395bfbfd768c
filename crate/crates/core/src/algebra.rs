//! Graded Lie algebras with exact structure constants, the Dynkin form of the
//! Baker-Campbell-Hausdorff series, and the rank tests built on brackets.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Debug;
use core::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::linalg;

/// Exact scalar used for structure constants and the symbolic group law.
pub type Rational = Ratio<i128>;

/// Field operations needed to evaluate brackets and the group law.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Zero
{
    fn from_rational(r: &Rational) -> Self;
}

impl Scalar for f64 {
    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        *r
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// A vector of the Lie algebra in the fixed basis `X_1, ..., X_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraVector<S = f64> {
    pub coords: Vec<S>,
}

impl<S: Scalar> AlgebraVector<S> {
    pub fn new(coords: Vec<S>) -> Self {
        Self { coords }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            coords: vec![S::zero(); n],
        }
    }

    /// The basis vector `X_{i+1}` (0-based `i`).
    pub fn basis(n: usize, i: usize) -> Self
    where
        S: From<i8>,
    {
        let mut v = Self::zeros(n);
        v.coords[i] = S::from(1);
        v
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Self { coords }
    }

    pub fn neg(&self) -> Self {
        Self {
            coords: self.coords.iter().map(|a| -a.clone()).collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        Self {
            coords: self.coords.iter().map(|a| a.clone() * s.clone()).collect(),
        }
    }
}

impl AlgebraVector<Rational> {
    pub fn to_f64(&self) -> AlgebraVector<f64> {
        AlgebraVector::new(self.coords.iter().map(rational_to_f64).collect())
    }
}

/// Unvalidated algebra description, 1-based bracket indices as in the file format.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraSpec {
    pub dim: usize,
    pub exponents: Vec<Rational>,
    /// Weight (layer) of each basis index.
    pub layers: Vec<u32>,
    /// Entries `(i, j, k, c)` meaning `[X_i, X_j]` has `c` on `X_k`.
    pub brackets: Vec<(usize, usize, usize, Rational)>,
}

/// Monomial-sparse polynomial over the variables `x_1..x_n, y_1..y_n`.
type Poly = BTreeMap<Vec<u16>, Rational>;

/// The group law `log(exp x exp y)` expanded into polynomial terms.
#[derive(Clone, Debug)]
struct CompiledLaw {
    comp: Vec<usize>,
    coef: Vec<Rational>,
    coef_f: Vec<f64>,
    vars: Vec<u16>,
    offs: Vec<usize>,
}

/// A validated graded nilpotent Lie algebra.
#[derive(Clone, Debug)]
pub struct GradedLieAlgebra {
    dim: usize,
    exponents: Vec<Rational>,
    exponents_f: Vec<f64>,
    layers: Vec<u32>,
    /// Nonzero `c_{ij}^k` for all ordered pairs, 0-based.
    terms: Vec<(usize, usize, usize, Rational)>,
    step: usize,
    dynkin: Vec<(Vec<u8>, Rational)>,
    law: CompiledLaw,
    last_central: bool,
}

fn idx3(n: usize, i: usize, j: usize, k: usize) -> usize {
    (i * n + j) * n + k
}

impl GradedLieAlgebra {
    /// Validates a specification: shapes, antisymmetry, grading and Jacobi.
    pub fn from_spec(spec: &AlgebraSpec) -> Result<Self> {
        let n = spec.dim;
        if n == 0 {
            return Err(Error::InvalidAlgebra("dimension must be positive".into()));
        }
        if spec.exponents.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: spec.exponents.len(),
            });
        }
        if spec.layers.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: spec.layers.len(),
            });
        }
        if spec.exponents.iter().any(|e| !e.is_positive()) {
            return Err(Error::InvalidAlgebra("exponents must be positive".into()));
        }
        if spec.exponents.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidAlgebra(
                "exponents must be nondecreasing".into(),
            ));
        }
        if spec.layers.iter().any(|&w| w == 0) {
            return Err(Error::InvalidAlgebra("layer weights start at 1".into()));
        }

        let mut table = vec![Rational::zero(); n * n * n];
        for &(i, j, k, c) in &spec.brackets {
            for idx in [i, j, k] {
                if idx == 0 || idx > n {
                    return Err(Error::InvalidAlgebra(format!(
                        "bracket index {idx} out of range 1..={n}"
                    )));
                }
            }
            if c.is_zero() {
                continue;
            }
            let (a, b, t) = (i - 1, j - 1, k - 1);
            if a == b {
                return Err(Error::AntisymmetryViolation { i, j, k });
            }
            let cur = table[idx3(n, a, b, t)];
            if !cur.is_zero() && cur != c {
                return Err(Error::AntisymmetryViolation { i, j, k });
            }
            table[idx3(n, a, b, t)] = c;
            table[idx3(n, b, a, t)] = -c;
        }

        let mut terms = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for t in 0..n {
                    let c = table[idx3(n, a, b, t)];
                    if c.is_zero() {
                        continue;
                    }
                    let graded = spec.layers[t] == spec.layers[a] + spec.layers[b]
                        && spec.exponents[t] == spec.exponents[a] + spec.exponents[b];
                    if !graded {
                        let (i, j) = if a < b { (a, b) } else { (b, a) };
                        return Err(Error::GradingViolation {
                            i: i + 1,
                            j: j + 1,
                            k: t + 1,
                        });
                    }
                    terms.push((a, b, t, c));
                }
            }
        }

        // Jacobi on basis triples: [a,[b,c]] + [b,[c,a]] + [c,[a,b]] = 0.
        let br = |a: usize, v: &[Rational]| -> Vec<Rational> {
            let mut out = vec![Rational::zero(); n];
            for &(i, j, k, c) in &terms {
                if i == a && !v[j].is_zero() {
                    out[k] += c * v[j];
                }
            }
            out
        };
        let col = |a: usize, b: usize| -> Vec<Rational> {
            (0..n).map(|t| table[idx3(n, a, b, t)]).collect()
        };
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    let s1 = br(a, &col(b, c));
                    let s2 = br(b, &col(c, a));
                    let s3 = br(c, &col(a, b));
                    if (0..n).any(|t| !(s1[t] + s2[t] + s3[t]).is_zero()) {
                        return Err(Error::JacobiViolation {
                            i: a + 1,
                            j: b + 1,
                            k: c + 1,
                        });
                    }
                }
            }
        }

        let step = nilpotency_step(n, &terms);
        let last_central = terms.iter().all(|&(i, j, _, _)| i != n - 1 && j != n - 1);
        let dynkin = dynkin_words(step);
        let mut alg = Self {
            dim: n,
            exponents_f: spec.exponents.iter().map(rational_to_f64).collect(),
            exponents: spec.exponents.clone(),
            layers: spec.layers.clone(),
            terms,
            step,
            dynkin,
            law: CompiledLaw {
                comp: vec![],
                coef: vec![],
                coef_f: vec![],
                vars: vec![],
                offs: vec![0],
            },
            last_central,
        };
        alg.law = compile_law(&alg);
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn exponents(&self) -> &[Rational] {
        &self.exponents
    }

    pub fn exponents_f64(&self) -> &[f64] {
        &self.exponents_f
    }

    /// Weight of each basis index.
    pub fn layers(&self) -> &[u32] {
        &self.layers
    }

    /// Homogeneous dimension, the trace of the dilation generator.
    pub fn homogeneous_dim(&self) -> Rational {
        self.exponents.iter().fold(Rational::zero(), |a, b| a + b)
    }

    pub fn q(&self) -> f64 {
        rational_to_f64(&self.homogeneous_dim())
    }

    /// Nilpotency step: the longest nonvanishing bracket length.
    pub fn step(&self) -> usize {
        self.step
    }

    pub fn is_abelian(&self) -> bool {
        self.terms.is_empty()
    }

    /// Whether the last basis vector is central.
    pub fn last_is_central(&self) -> bool {
        self.last_central
    }

    /// Whether the group law reads `(x y)_n = x_n + y_n + p(x', y')` and the
    /// other components ignore `x_n, y_n`. Holds whenever `X_n` is central.
    pub fn last_coordinate_additive(&self) -> bool {
        let n = self.dim;
        let (xn, yn) = ((n - 1) as u16, (2 * n - 1) as u16);
        let law = &self.law;
        (0..law.comp.len()).all(|t| {
            let vars = &law.vars[law.offs[t]..law.offs[t + 1]];
            let touches = vars.iter().any(|&v| v == xn || v == yn);
            !touches || (vars.len() == 1 && law.comp[t] == n - 1 && law.coef[t] == Rational::one())
        })
    }

    /// Basis indices (0-based) carrying weight `w`.
    pub fn layer_indices(&self, w: u32) -> Vec<usize> {
        (0..self.dim).filter(|&i| self.layers[i] == w).collect()
    }

    pub fn max_weight(&self) -> u32 {
        self.layers.iter().copied().max().unwrap_or(0)
    }

    /// Structure constant `c_{ij}^k` (0-based).
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> Rational {
        self.terms
            .iter()
            .find(|t| t.0 == i && t.1 == j && t.2 == k)
            .map(|t| t.3)
            .unwrap_or_else(Rational::zero)
    }

    /// Back to a specification with one entry per unordered pair, `i < j`.
    pub fn to_spec(&self) -> AlgebraSpec {
        AlgebraSpec {
            dim: self.dim,
            exponents: self.exponents.clone(),
            layers: self.layers.clone(),
            brackets: self
                .terms
                .iter()
                .filter(|t| t.0 < t.1)
                .map(|&(i, j, k, c)| (i + 1, j + 1, k + 1, c))
                .collect(),
        }
    }

    /// Number of terms in the compiled group law.
    pub fn law_terms(&self) -> usize {
        self.law.comp.len()
    }

    fn check_dim<S>(&self, v: &[S]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn bracket_raw<S: Scalar>(&self, x: &[S], y: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.dim];
        for (i, j, k, c) in &self.terms {
            if x[*i].is_zero() || y[*j].is_zero() {
                continue;
            }
            out[*k] = out[*k].clone() + S::from_rational(c) * x[*i].clone() * y[*j].clone();
        }
        out
    }

    /// Group law `log(exp x exp y)` in floating point, writing into `out`.
    /// Coordinatewise bound on `|x y|` for `|x_j| <= xb_j`, `|y_j| <= yb_j`,
    /// from the absolute values of the law's terms.
    pub(crate) fn law_abs_bound(&self, xb: &[f64], yb: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let law = &self.law;
        let mut out = vec![0.0; n];
        for t in 0..law.comp.len() {
            let m = law.vars[law.offs[t]..law.offs[t + 1]].iter().fold(law.coef_f[t].abs(), |acc, &v| {
                let v = v as usize;
                acc * if v < n { xb[v] } else { yb[v - n] }
            });
            out[law.comp[t]] += m;
        }
        out
    }

    pub(crate) fn law_f64(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        let n = self.dim;
        let mut buf = [0.0f64; 64];
        let mut heap;
        let xy: &mut [f64] = if 2 * n <= 64 {
            &mut buf[..2 * n]
        } else {
            heap = vec![0.0; 2 * n];
            &mut heap[..]
        };
        xy[..n].copy_from_slice(x);
        xy[n..].copy_from_slice(y);
        out.iter_mut().for_each(|v| *v = 0.0);
        let law = &self.law;
        for t in 0..law.comp.len() {
            let mut p = law.coef_f[t];
            for &v in &law.vars[law.offs[t]..law.offs[t + 1]] {
                p *= xy[v as usize];
            }
            out[law.comp[t]] += p;
        }
    }

    pub(crate) fn law_generic<S: Scalar>(&self, x: &[S], y: &[S]) -> Vec<S> {
        let n = self.dim;
        let mut out = vec![S::zero(); n];
        let law = &self.law;
        for t in 0..law.comp.len() {
            let mut p = S::from_rational(&law.coef[t]);
            for &v in &law.vars[law.offs[t]..law.offs[t + 1]] {
                let v = v as usize;
                p = p * if v < n {
                    x[v].clone()
                } else {
                    y[v - n].clone()
                };
            }
            out[law.comp[t]] = out[law.comp[t]].clone() + p;
        }
        out
    }
}

/// Smallest `m` with every bracket of length `m + 1` zero (lower central series).
fn nilpotency_step(n: usize, terms: &[(usize, usize, usize, Rational)]) -> usize {
    // current spanning set of C^i, kept in echelon form
    let mut current: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut v = vec![Rational::zero(); n];
            v[i] = Rational::one();
            v
        })
        .collect();
    let mut step = 1;
    loop {
        let mut next = Vec::new();
        for a in 0..n {
            for v in &current {
                let mut out = vec![Rational::zero(); n];
                for &(i, j, k, c) in terms {
                    if i == a && !v[j].is_zero() {
                        out[k] += c * v[j];
                    }
                }
                if out.iter().any(|x| !x.is_zero()) {
                    next.push(out);
                }
            }
        }
        let next = echelon(n, next);
        if next.is_empty() || step > n {
            return step;
        }
        current = next;
        step += 1;
    }
}

/// Row echelon basis of the span of `rows`.
fn echelon(n: usize, mut rows: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let mut basis: Vec<Vec<Rational>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for mut r in rows.drain(..) {
        for (b, &p) in basis.iter().zip(&pivots) {
            if !r[p].is_zero() {
                let f = r[p] / b[p];
                for t in 0..n {
                    r[t] -= f * b[t];
                }
            }
        }
        if let Some(p) = (0..n).find(|&t| !r[t].is_zero()) {
            basis.push(r);
            pivots.push(p);
        }
    }
    basis
}

fn factorial(k: usize) -> i128 {
    (1..=k as i128).product()
}

/// Dynkin words over `{0 = X, 1 = Y}` up to length `max_len` with merged
/// coefficients. A word `w_1..w_L` stands for `[w_1, [w_2, ..., w_L]]`.
fn dynkin_words(max_len: usize) -> Vec<(Vec<u8>, Rational)> {
    fn rec(
        remaining: usize,
        pairs: &mut Vec<(usize, usize)>,
        total: usize,
        acc: &mut BTreeMap<Vec<u8>, Rational>,
    ) {
        if remaining == 0 {
            let nn = pairs.len() as i128;
            let sign = if nn % 2 == 1 { 1 } else { -1 };
            let mut denom = nn * total as i128;
            let mut word = Vec::with_capacity(total);
            for &(r, s) in pairs.iter() {
                denom *= factorial(r) * factorial(s);
                word.extend(core::iter::repeat(0u8).take(r));
                word.extend(core::iter::repeat(1u8).take(s));
            }
            if word.len() >= 2 && word[word.len() - 1] == word[word.len() - 2] {
                return;
            }
            *acc.entry(word).or_insert_with(Rational::zero) += Rational::new(sign, denom);
            return;
        }
        for len in 1..=remaining {
            for r in 0..=len {
                pairs.push((r, len - r));
                rec(remaining - len, pairs, total, acc);
                pairs.pop();
            }
        }
    }
    let mut acc = BTreeMap::new();
    for total in 1..=max_len {
        rec(total, &mut Vec::new(), total, &mut acc);
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let mut m: Vec<u16> = ma.iter().chain(mb).copied().collect();
            m.sort_unstable();
            *out.entry(m).or_insert_with(Rational::zero) += *ca * *cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn sym_bracket(alg: &GradedLieAlgebra, a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let mut out = vec![Poly::new(); alg.dim];
    for &(i, j, k, c) in &alg.terms {
        if a[i].is_empty() || b[j].is_empty() {
            continue;
        }
        for (m, v) in poly_mul(&a[i], &b[j]) {
            *out[k].entry(m).or_insert_with(Rational::zero) += c * v;
        }
    }
    for p in &mut out {
        p.retain(|_, c| !c.is_zero());
    }
    out
}

fn compile_law(alg: &GradedLieAlgebra) -> CompiledLaw {
    let n = alg.dim;
    let letter = |offset: usize| -> Vec<Poly> {
        (0..n)
            .map(|i| {
                let mut p = Poly::new();
                p.insert(vec![(offset + i) as u16], Rational::one());
                p
            })
            .collect()
    };
    let xs = letter(0);
    let ys = letter(n);
    let mut total = vec![Poly::new(); n];
    for (word, c) in &alg.dynkin {
        let pick = |l: u8| if l == 0 { &xs } else { &ys };
        let mut acc = pick(word[word.len() - 1]).clone();
        for &l in word[..word.len() - 1].iter().rev() {
            acc = sym_bracket(alg, pick(l), &acc);
        }
        for (k, p) in acc.into_iter().enumerate() {
            for (m, v) in p {
                *total[k].entry(m).or_insert_with(Rational::zero) += *c * v;
            }
        }
    }
    let mut law = CompiledLaw {
        comp: vec![],
        coef: vec![],
        coef_f: vec![],
        vars: vec![],
        offs: vec![0],
    };
    for (k, p) in total.into_iter().enumerate() {
        for (m, c) in p {
            if c.is_zero() {
                continue;
            }
            law.comp.push(k);
            law.coef_f.push(rational_to_f64(&c));
            law.coef.push(c);
            law.vars.extend(m);
            law.offs.push(law.vars.len());
        }
    }
    law
}

/// `[X, Y]` by bilinear expansion.
pub fn bracket<S: Scalar>(
    alg: &GradedLieAlgebra,
    x: &AlgebraVector<S>,
    y: &AlgebraVector<S>,
) -> Result<AlgebraVector<S>> {
    alg.check_dim(&x.coords)?;
    alg.check_dim(&y.coords)?;
    Ok(AlgebraVector::new(alg.bracket_raw(&x.coords, &y.coords)))
}

/// `log(exp X exp Y)`, evaluated from the compiled polynomial law.
pub fn bch<S: Scalar>(
    alg: &GradedLieAlgebra,
    x: &AlgebraVector<S>,
    y: &AlgebraVector<S>,
) -> Result<AlgebraVector<S>> {
    alg.check_dim(&x.coords)?;
    alg.check_dim(&y.coords)?;
    Ok(AlgebraVector::new(alg.law_generic(&x.coords, &y.coords)))
}

/// `log(exp X exp Y)` by summing the Dynkin series term by term.
///
/// Slower than [`bch`]; kept as an independent route for cross-checks.
pub fn bch_dynkin<S: Scalar>(
    alg: &GradedLieAlgebra,
    x: &AlgebraVector<S>,
    y: &AlgebraVector<S>,
) -> Result<AlgebraVector<S>> {
    alg.check_dim(&x.coords)?;
    alg.check_dim(&y.coords)?;
    let mut out = vec![S::zero(); alg.dim];
    for (word, c) in &alg.dynkin {
        let pick = |l: u8| if l == 0 { &x.coords } else { &y.coords };
        let mut acc = pick(word[word.len() - 1]).clone();
        for &l in word[..word.len() - 1].iter().rev() {
            acc = alg.bracket_raw(pick(l), &acc);
        }
        let c = S::from_rational(c);
        for (o, a) in out.iter_mut().zip(acc) {
            *o = o.clone() + c.clone() * a;
        }
    }
    Ok(AlgebraVector::new(out))
}

/// Right-nested bracket `[X_1, [X_2, ..., [X_{l-1}, X_l]]]`.
pub fn nested_bracket<S: Scalar>(
    alg: &GradedLieAlgebra,
    xs: &[AlgebraVector<S>],
) -> Result<AlgebraVector<S>> {
    let Some(last) = xs.last() else {
        return Err(Error::InvalidArgument(
            "nested bracket needs at least one vector".into(),
        ));
    };
    for x in xs {
        alg.check_dim(&x.coords)?;
    }
    let mut acc = last.coords.clone();
    for x in xs[..xs.len() - 1].iter().rev() {
        acc = alg.bracket_raw(&x.coords, &acc);
    }
    Ok(AlgebraVector::new(acc))
}

/// Outcome of the stratification rank test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratifiedReport {
    pub stratified: bool,
    /// First layer weight not spanned by `[V_1, V_{w-1}]`.
    pub deficient_layer: Option<u32>,
    /// `(weight, rank of [V_1, V_{w-1}], dim V_w)` for `w >= 2`.
    pub ranks: Vec<(u32, usize, usize)>,
}

/// Checks `[V_1, V_j] = V_{j+1}` for every layer by exact rank.
pub fn check_stratified(alg: &GradedLieAlgebra) -> StratifiedReport {
    let n = alg.dim;
    let top = alg.max_weight();
    let v1 = alg.layer_indices(1);
    let mut ranks = Vec::new();
    let mut deficient = if v1.is_empty() { Some(1) } else { None };
    for w in 2..=top {
        let target = alg.layer_indices(w);
        let prev = alg.layer_indices(w - 1);
        let mut rows = Vec::new();
        for &a in &v1 {
            for &b in &prev {
                let row: Vec<Rational> = (0..n).map(|k| alg.structure_constant(a, b, k)).collect();
                rows.extend(row);
            }
        }
        let r = if rows.is_empty() {
            0
        } else {
            linalg::rank_exact(rows.len() / n, n, &rows)
        };
        ranks.push((w, r, target.len()));
        if r < target.len() && deficient.is_none() {
            deficient = Some(w);
        }
    }
    StratifiedReport {
        stratified: deficient.is_none(),
        deficient_layer: deficient,
        ranks,
    }
}

/// Matrix of `Y -> [X, Y]`, row-major with rows indexed by output component.
fn ad_matrix<S: Scalar>(alg: &GradedLieAlgebra, x: &[S]) -> Vec<S> {
    let n = alg.dim;
    let mut m = vec![S::zero(); n * n];
    for (i, j, k, c) in &alg.terms {
        if x[*i].is_zero() {
            continue;
        }
        m[k * n + j] = m[k * n + j].clone() + S::from_rational(c) * x[*i].clone();
    }
    m
}

/// Dimension of `ker ad_X`, floating rank with the relative SVD threshold.
pub fn ad_kernel_dim(alg: &GradedLieAlgebra, x: &AlgebraVector<f64>) -> Result<usize> {
    alg.check_dim(&x.coords)?;
    let n = alg.dim;
    Ok(n - linalg::rank_float(n, n, &ad_matrix(alg, &x.coords)))
}

/// Dimension of `ker ad_X`, exact rank.
pub fn ad_kernel_dim_exact(alg: &GradedLieAlgebra, x: &AlgebraVector<Rational>) -> Result<usize> {
    alg.check_dim(&x.coords)?;
    let n = alg.dim;
    Ok(n - linalg::rank_exact(n, n, &ad_matrix(alg, &x.coords)))
}

/// Basis of `ker ad_X` (floating, via exact-free Gaussian elimination with pivoting).
pub fn ad_kernel_basis(alg: &GradedLieAlgebra, x: &[f64]) -> Vec<Vec<f64>> {
    let n = alg.dim;
    let mut m = ad_matrix(alg, x);
    let scale = m.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let tol = 1e-10 * scale.max(1e-300);
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for c in 0..n {
        let Some(p) =
            (row..n).max_by(|&a, &b| m[a * n + c].abs().partial_cmp(&m[b * n + c].abs()).unwrap())
        else {
            break;
        };
        if m[p * n + c].abs() <= tol {
            continue;
        }
        for j in 0..n {
            m.swap(p * n + j, row * n + j);
        }
        let pv = m[row * n + c];
        for j in 0..n {
            m[row * n + j] /= pv;
        }
        for r in 0..n {
            if r != row {
                let f = m[r * n + c];
                if f != 0.0 {
                    for j in 0..n {
                        m[r * n + j] -= f * m[row * n + j];
                    }
                }
            }
        }
        pivot_cols.push(c);
        row += 1;
        if row == n {
            break;
        }
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0.0; n];
            v[f] = 1.0;
            for (r, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -m[r * n + f];
            }
            v
        })
        .collect()
}

/// Result of the first-layer span test on a sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorReport {
    pub generates: bool,
    /// Rank of the symmetrised first-layer projection.
    pub rank: usize,
    pub layer_dim: usize,
    pub sample_size: usize,
}

/// Decides whether the first-layer projection of a sample spans `V_1`.
pub fn generator_test(alg: &GradedLieAlgebra, sample: &[GroupElement]) -> Result<GeneratorReport> {
    if sample.is_empty() {
        return Err(Error::InvalidArgument("empty sample".into()));
    }
    let strat = check_stratified(alg);
    if let Some(layer) = strat.deficient_layer {
        return Err(Error::NotStratified { layer });
    }
    let v1 = alg.layer_indices(1);
    let d = v1.len();
    let mut rows = Vec::with_capacity(2 * sample.len() * d);
    for s in sample {
        alg.check_dim(s.coords())?;
        let p: Vec<f64> = v1.iter().map(|&i| s.coords()[i]).collect();
        rows.extend(p.iter().copied());
        rows.extend(p.iter().map(|v| -v));
    }
    let rank = linalg::rank_float(2 * sample.len(), d, &rows);
    Ok(GeneratorReport {
        generates: rank == d,
        rank,
        layer_dim: d,
        sample_size: sample.len(),
    })
}
