//! Exact asymptotic quantifiers (`n = ∞`) for uniform binary substitutions.
//!
//! For primitive aperiodic substitutions the quantifiers are tail sums of
//! `dens(K_l)` over `l ≥ l' = l + m + h - 2`. The support of `dens(K_·)` is a
//! union of geometric chains, so every tail sum is evaluated exactly from
//! `Σ_{k≥j} x^k` and `Σ_{k≥j} k x^k`; this is the reference path. The
//! `ν`-table closed forms are a second path checked against it.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::densities::{chain_length, closed_form_indices, DensityTable, ReconstructionConfig};
use crate::error::{Error, Result};
use crate::rational::{self, ln, pow, to_f64, uint, ExtRational, Rational};
use crate::recplot::BoundaryPolicy;
use crate::rqa::{self, Provenance, RQAReport};
use crate::substitution::{Classification, Substitution, SubstitutionKind};

/// Relative tolerance for the entropy cross-check.
pub const ENT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticQuantifiers {
    pub m: usize,
    pub l: usize,
    pub h: usize,
    pub l_prime: usize,
    /// `p_l`.
    #[serde(with = "rational::serde_rational")]
    pub linedens: Rational,
    /// `P_l = Σ_{k≥l} p_k`.
    #[serde(with = "rational::serde_rational")]
    pub line_dens: Rational,
    #[serde(with = "rational::serde_rational")]
    pub rr: Rational,
    #[serde(with = "rational::serde_rational")]
    pub det: Rational,
    pub lavg: ExtRational,
    #[serde(with = "rational::serde_rational")]
    pub corsum: Rational,
    pub ent: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl AsymptoticQuantifiers {
    pub fn to_report(&self) -> RQAReport {
        RQAReport {
            n: None,
            m: self.m,
            h: self.h,
            l_min: self.l,
            policy: BoundaryPolicy::IncludeAll,
            linedens: [(self.l, self.linedens.clone())].into_iter().collect(),
            line_dens: self.line_dens.clone(),
            rr: self.rr.clone(),
            det: Some(self.det.clone()),
            lavg: Some(self.lavg.clone()),
            ent: self.ent,
            corsum: Some(self.corsum.clone()),
            provenance: Provenance::Asymptotic,
            notes: self.notes.clone(),
        }
    }
}

fn check_mlh(m: usize, l: usize, h: usize) -> Result<usize> {
    if m == 0 || l == 0 || h == 0 {
        return Err(Error::InvalidArgument("m, l and h must all be >= 1".into()));
    }
    Ok(l + m + h - 2)
}

/// `Σ_{k≥j} x^k`.
fn geometric_tail(x: &Rational, j: usize) -> Rational {
    num_traits::pow(x.clone(), j) / (Rational::one() - x)
}

/// `Σ_{k≥j} k x^k = (j x^j − (j−1) x^{j+1}) / (1−x)²`.
fn arith_geometric_tail(x: &Rational, j: usize) -> Rational {
    let xj = num_traits::pow(x.clone(), j);
    let one_minus = Rational::one() - x;
    (uint(j) * &xj - (uint(j) - Rational::one()) * &xj * x) / (&one_minus * &one_minus)
}

/// The three exact tail sums at `l'`: `Σ d`, `Σ l d` and `-Σ d ln d`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailSums {
    pub count: Rational,
    pub weighted: Rational,
    pub neg_entropy: f64,
}

/// Tail sums over `l ≥ l'` grouped per base chain.
pub fn tail_sums(table: &DensityTable, l_prime: usize) -> TailSums {
    let c = &table.constants;
    let q = c.q;
    let x = table.inv_q2();
    let inv_q = Rational::new(BigInt::one(), BigInt::from(q));
    let target = BigInt::from(l_prime);
    let ln_q = (q as f64).ln();
    let mut count = Rational::zero();
    let mut weighted = Rational::zero();
    let mut neg_entropy = 0.0;
    for (l0, d0) in table.support_bases() {
        if l0 < c.r0 {
            if l0 >= l_prime {
                count += d0;
                weighted += uint(l0) * d0;
                neg_entropy -= to_f64(d0) * ln(d0);
            }
            continue;
        }
        let k_min = (0..)
            .find(|&k| chain_length(c, l0, k) >= target)
            .expect("chain lengths grow without bound");
        let g = geometric_tail(&x, k_min);
        let s = d0 * &g;
        // l_k = q^k (l0 + c) - c
        let lengths = (uint(l0) + &c.c) * d0 * geometric_tail(&inv_q, k_min) - &c.c * &s;
        neg_entropy += -ln(d0) * to_f64(&s) + 2.0 * ln_q * to_f64(&(d0 * arith_geometric_tail(&x, k_min)));
        count += s;
        weighted += lengths;
    }
    TailSums {
        count,
        weighted,
        neg_entropy,
    }
}

fn assemble(
    m: usize,
    l: usize,
    h: usize,
    linedens: Rational,
    tail: &TailSums,
    rr1: Rational,
) -> AsymptoticQuantifiers {
    let l_prime = l + m + h - 2;
    let shift = uint(m + h - 2);
    let p = tail.count.clone();
    let rr = &tail.weighted - &shift * &p;
    let corsum = &rr - uint(l - 1) * &p;
    let det = if rr1.is_zero() { Rational::zero() } else { &rr / &rr1 };
    let lavg = if p.is_zero() {
        ExtRational::Infinite
    } else {
        ExtRational::Finite(&rr / &p)
    };
    let ent = (p.is_positive()).then(|| ln(&p) + tail.neg_entropy / to_f64(&p));
    AsymptoticQuantifiers {
        m,
        l,
        h,
        l_prime,
        linedens,
        line_dens: p,
        rr,
        det,
        lavg,
        corsum,
        ent,
        notes: Vec::new(),
    }
}

/// Reference path: exact tail sums of the scaled densities.
pub fn quantifiers_via_sums(
    table: &DensityTable,
    m: usize,
    l: usize,
    h: usize,
) -> Result<AsymptoticQuantifiers> {
    let l_prime = check_mlh(m, l, h)?;
    let tail = tail_sums(table, l_prime);
    let tail1 = tail_sums(table, m + h - 1);
    let rr1 = &tail1.weighted - uint(m + h - 2) * &tail1.count;
    Ok(assemble(m, l, h, table.dens_k(l_prime), &tail, rr1))
}

/// `ν^N`, `ν^RR`, `ν^ENT` on `[R0, R]`; index `i` holds `ν_{R0+i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NuTables {
    pub r0: usize,
    pub r: usize,
    pub n: Vec<Rational>,
    pub rr: Vec<Rational>,
    pub ent: Vec<f64>,
}

impl NuTables {
    pub fn new(table: &DensityTable) -> NuTables {
        let (r0, r) = (table.constants.r0, table.constants.r);
        let mut n = vec![Rational::zero()];
        let mut rr = vec![Rational::zero()];
        let mut ent = vec![0.0];
        for l in r0..r {
            let d = table.base_density(l);
            n.push(n.last().unwrap() + &d);
            rr.push(rr.last().unwrap() + uint(l) * &d);
            ent.push(ent.last().unwrap() + rational::neg_p_ln_p(&d));
        }
        NuTables { r0, r, n, rr, ent }
    }

    fn idx(&self, l: usize) -> usize {
        assert!((self.r0..=self.r).contains(&l), "ν index {l} outside [R0, R]");
        l - self.r0
    }

    pub fn nu_n(&self, l: usize) -> &Rational {
        &self.n[self.idx(l)]
    }

    pub fn nu_rr(&self, l: usize) -> &Rational {
        &self.rr[self.idx(l)]
    }

    pub fn nu_ent(&self, l: usize) -> f64 {
        self.ent[self.idx(l)]
    }

    /// `ν̃_l = ν_R − ν_l`.
    pub fn tilde_n(&self, l: usize) -> Rational {
        self.nu_n(self.r) - self.nu_n(l)
    }

    pub fn tilde_rr(&self, l: usize) -> Rational {
        self.nu_rr(self.r) - self.nu_rr(l)
    }

    pub fn tilde_ent(&self, l: usize) -> f64 {
        self.nu_ent(self.r) - self.nu_ent(l)
    }
}

/// Closed-form tail sums at `l' ≥ R0`.
fn closed_tail(table: &DensityTable, nu: &NuTables, l_prime: usize) -> Result<TailSums> {
    let c = &table.constants;
    let q = c.q;
    let (j, l0) = closed_form_indices(c, l_prime)?;
    let q_r = uint(q);
    let q2 = uint(q * q);
    let qj = Rational::from_integer(pow(q, j));
    let q2j = Rational::from_integer(pow(q, 2 * j));
    let one = Rational::one();

    let (nu_n, til_n) = (nu.nu_n(l0).clone(), nu.tilde_n(l0));
    let count = (&nu_n + &q2 * &til_n) / (&q2j * (&q2 - &one));
    let lengths = (nu.nu_rr(l0) + &q_r * nu.tilde_rr(l0) + &c.c * (&nu_n + &q_r * &til_n))
        / (&qj * (&q_r - &one));
    let weighted = lengths - &c.c * &count;

    let qf = q as f64;
    let jf = j as f64;
    let q2f = qf * qf;
    let scale = 2.0 * qf.ln() / (to_f64(&q2j) * (q2f - 1.0).powi(2));
    let neg_entropy = scale
        * (((jf + 1.0) * q2f - jf) * to_f64(&nu_n) + q2f * (jf * q2f - jf + 1.0) * to_f64(&til_n))
        + (nu.nu_ent(l0) + q2f * nu.tilde_ent(l0)) / (to_f64(&q2j) * (q2f - 1.0));
    Ok(TailSums {
        count,
        weighted,
        neg_entropy,
    })
}

/// Closed-form tail sums for any `l' ≥ 1`, peeling down from `R0` when
/// `l' < R0`.
fn closed_tail_any(table: &DensityTable, nu: &NuTables, l_prime: usize) -> Result<TailSums> {
    let r0 = table.constants.r0;
    if l_prime >= r0 {
        return closed_tail(table, nu, l_prime);
    }
    let mut t = closed_tail(table, nu, r0)?;
    for l in (l_prime..r0).rev() {
        let d = table.dens_k(l);
        t.count += &d;
        t.weighted += uint(l) * &d;
        t.neg_entropy += rational::neg_p_ln_p(&d);
    }
    Ok(t)
}

/// `p_l` from `(j, l0)`: `q^{-2j} dens(K_{l0})` when `l'` lies on the chain
/// of `l0`, zero otherwise.
fn closed_linedens(table: &DensityTable, l_prime: usize) -> Result<Rational> {
    let c = &table.constants;
    if l_prime < c.r0 {
        return Ok(table.dens_k(l_prime));
    }
    let (j, l0) = closed_form_indices(c, l_prime)?;
    if chain_length(c, l0, j) != BigInt::from(l_prime) {
        return Ok(Rational::zero());
    }
    Ok(table.base_density(l0) / Rational::from_integer(pow(c.q, 2 * j)))
}

/// Second path: `ν`-table closed forms, verified against the tail sums.
pub fn closed_form(
    table: &DensityTable,
    m: usize,
    l: usize,
    h: usize,
) -> Result<AsymptoticQuantifiers> {
    let l_prime = check_mlh(m, l, h)?;
    let nu = NuTables::new(table);
    let tail = closed_tail_any(table, &nu, l_prime)?;
    let tail1 = closed_tail_any(table, &nu, m + h - 1)?;
    let rr1 = &tail1.weighted - uint(m + h - 2) * &tail1.count;
    let closed = assemble(m, l, h, closed_linedens(table, l_prime)?, &tail, rr1);

    let reference = quantifiers_via_sums(table, m, l, h)?;
    let mismatch = |what: &str, a: &dyn std::fmt::Display, b: &dyn std::fmt::Display| {
        Error::Discrepancy(format!(
            "{what} at (m, l, h) = ({m}, {l}, {h}): closed form {a}, series {b}"
        ))
    };
    if closed.linedens != reference.linedens {
        return Err(mismatch("linedens", &closed.linedens, &reference.linedens));
    }
    if closed.line_dens != reference.line_dens {
        return Err(mismatch("lineDens", &closed.line_dens, &reference.line_dens));
    }
    if closed.rr != reference.rr {
        return Err(mismatch("RR", &closed.rr, &reference.rr));
    }
    if let (Some(a), Some(b)) = (closed.ent, reference.ent) {
        if (a - b).abs() > ENT_TOLERANCE * b.abs().max(1.0) {
            return Err(mismatch("ENT", &a, &b));
        }
    }
    Ok(closed)
}

/// Quantifiers of a non-primitive substitution: `C = RR = DET = 1`,
/// `L_avg = ∞`, entropy unknown.
pub fn nonprimitive_quantifiers(
    cls: &Classification,
    m: usize,
    l: usize,
    h: usize,
) -> Result<AsymptoticQuantifiers> {
    let l_prime = check_mlh(m, l, h)?;
    if cls.kind.is_primitive() {
        return Err(Error::WrongClass(format!(
            "{:?} is primitive; use the density tables",
            cls.kind
        )));
    }
    Ok(AsymptoticQuantifiers {
        m,
        l,
        h,
        l_prime,
        linedens: Rational::zero(),
        line_dens: Rational::zero(),
        rr: Rational::one(),
        det: Rational::one(),
        lavg: ExtRational::Infinite,
        corsum: Rational::one(),
        ent: None,
        notes: vec!["entropy of line lengths is not determined for non-primitive substitutions".into()],
    })
}

/// Quantifiers of a primitive substitution with a periodic fixed point,
/// exact from one period via the correlation-sum limits.
pub fn periodic_quantifiers(
    s: &Substitution,
    m: usize,
    l: usize,
    h: usize,
) -> Result<AsymptoticQuantifiers> {
    let l_prime = check_mlh(m, l, h)?;
    let cls = s.classify();
    if cls.kind != SubstitutionKind::PrimitivePeriodic {
        return Err(Error::WrongClass(format!("{s} is {:?}, not periodic", cls.kind)));
    }
    let norm = s.normalize().0;
    let period = norm.fixed_point_period(1 << 12)?;
    let h_eff = h + m - 1;
    let x = norm.fixed_point_prefix(period + l + h_eff + 2)?;
    let c = |k: usize| rqa::correlation_sum(&x, period, k, h_eff);
    let (c1, cl, cl1, cl2) = (c(1)?, c(l)?, c(l + 1)?, c(l + 2)?);
    let lim = rqa::asymptotic_from_corsum(&c1, &cl, &cl1, l)?;
    let next = &cl1 - &cl2;
    Ok(AsymptoticQuantifiers {
        m,
        l,
        h,
        l_prime,
        linedens: &lim.line_dens - next,
        line_dens: lim.line_dens.clone(),
        rr: lim.rr,
        det: lim.det.unwrap_or_else(Rational::zero),
        lavg: lim.lavg.unwrap_or(ExtRational::Infinite),
        corsum: cl,
        ent: None,
        notes: vec![format!(
            "periodic fixed point (period {period}); lines on multiples of the period are infinite, entropy not reported"
        )],
    })
}

/// A substitution together with whatever its asymptotics need.
#[derive(Debug, Clone)]
pub enum SubshiftModel {
    Primitive(Box<DensityTable>),
    Periodic(Substitution),
    NonPrimitive(Classification),
}

impl SubshiftModel {
    /// Classify and, for primitive aperiodic substitutions, reconstruct the
    /// density table.
    pub fn build(s: &Substitution, cfg: &ReconstructionConfig) -> Result<SubshiftModel> {
        let cls = s.classify();
        Ok(match cls.kind {
            SubstitutionKind::PrimitiveAperiodic => SubshiftModel::Primitive(Box::new(
                crate::densities::reconstruct_base_with(s, cfg)?,
            )),
            SubstitutionKind::PrimitivePeriodic => SubshiftModel::Periodic(s.clone()),
            _ => SubshiftModel::NonPrimitive(cls),
        })
    }

    pub fn quantifiers(&self, m: usize, l: usize, h: usize) -> Result<AsymptoticQuantifiers> {
        match self {
            SubshiftModel::Primitive(t) => quantifiers_via_sums(t, m, l, h),
            SubshiftModel::Periodic(s) => periodic_quantifiers(s, m, l, h),
            SubshiftModel::NonPrimitive(cls) => nonprimitive_quantifiers(cls, m, l, h),
        }
    }
}

/// `(h, DET_l)` for each `h` in the range.
pub fn determinism_limit_scan(
    model: &SubshiftModel,
    m: usize,
    l: usize,
    hs: impl IntoIterator<Item = usize>,
) -> Result<Vec<(usize, Rational)>> {
    hs.into_iter()
        .map(|h| Ok((h, model.quantifiers(m, l, h)?.det)))
        .collect()
}

/// The envelope `l (l-1) q² / h` bounding `1 − DET_l` for large `h`.
pub fn det_envelope(q: usize, l: usize, h: usize) -> Rational {
    Rational::new(BigInt::from(l * (l - 1) * q * q), BigInt::from(h))
}
