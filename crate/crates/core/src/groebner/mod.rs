//! Gröbner bases over exact fields, quotient algebras, and variety
//! extraction for zero-dimensional ideals.
//!
//! The engine is plain Buchberger with the normal selection strategy
//! (minimal lcm degree, ties by pair index), the coprime-leading-term and
//! chain criteria, and full autoreduction at the end, so output bases are
//! reduced and deterministic. An optional cofactor track keeps, for every
//! basis element, its exact representation in the original generators; that
//! is what membership lifting uses to produce multipliers with the
//! homogeneous degree accounting.

mod variety;

pub use variety::{solve_variety, VarietyConfig, VarietyPoint};

use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::FMat;
use crate::poly::{Monomial, Polynomial};
use crate::scalar::Coeff;

#[derive(Debug, Error)]
pub enum GroebnerError {
    #[error("float-mode input rejected: Groebner arithmetic requires an exact field")]
    FloatModeRejected,
    #[error("generator list is empty")]
    EmptyGenerators,
    #[error("polynomial is not a member of the ideal")]
    NotAMember,
    #[error("ideal is not zero-dimensional")]
    PositiveDimensional,
    #[error("eigenvalue clustering failed (condition estimate {cond:.3e})")]
    EigenFailure { cond: f64 },
    #[error("internal error: {0}")]
    Internal(String),
}

/// Monomial order tag. All arithmetic in this crate uses graded reverse
/// lexicographic order; the tag records that choice in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum MonomialOrder {
    #[default]
    #[serde(rename = "grevlex")]
    GradedRevLex,
}

/// A reduced Gröbner basis together with the generators it came from.
#[derive(Clone, Debug)]
pub struct GroebnerBasis<C> {
    nvars: usize,
    order: MonomialOrder,
    generators: Vec<Polynomial<C>>,
    source: Vec<Polynomial<C>>,
    /// `generators[i] = sum_j cofactors[i][j] * source[j]` when tracked.
    cofactors: Option<Vec<Vec<Polynomial<C>>>>,
}

struct Engine<C> {
    nvars: usize,
    basis: Vec<Polynomial<C>>,
    cof: Option<Vec<Vec<Polynomial<C>>>>,
    nsrc: usize,
}

/// Pair queue entry: normal strategy orders by lcm degree, then pair index.
#[derive(PartialEq, Eq)]
struct Pair {
    lcm_degree: usize,
    i: usize,
    j: usize,
}

impl Ord for Pair {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // BinaryHeap is a max-heap; invert for smallest-first
        (other.lcm_degree, other.i, other.j).cmp(&(self.lcm_degree, self.i, self.j))
    }
}

impl PartialOrd for Pair {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<C: Coeff> Engine<C> {
    /// Full reduction of `p` by the current basis; returns the remainder and
    /// accumulates `quotients[k] * basis[k]` contributions.
    fn reduce(&self, p: Polynomial<C>, quotients: &mut [Polynomial<C>]) -> Polynomial<C> {
        let mut rem = Polynomial::zero(self.nvars);
        let mut h = p;
        'outer: while let Some((lm, lc)) = h.leading().map(|(m, c)| (m.clone(), c.clone())) {
            for (k, b) in self.basis.iter().enumerate() {
                let (blm, blc) = b.leading().expect("zero polynomial in basis");
                if blm.divides(&lm) {
                    let t = blm.div_into(&lm);
                    let c = lc.div(blc);
                    h = h.sub(&b.mul_term(&t, &c));
                    quotients[k].add_term(t, c);
                    continue 'outer;
                }
            }
            rem.add_term(lm.clone(), lc.clone());
            let mut single = Polynomial::zero(self.nvars);
            single.add_term(lm, lc);
            h = h.sub(&single);
        }
        rem
    }

    fn cofactor_of_quotients(&self, quotients: &[Polynomial<C>]) -> Vec<Polynomial<C>> {
        let cof = self.cof.as_ref().unwrap();
        let mut out = vec![Polynomial::zero(self.nvars); self.nsrc];
        for (k, q) in quotients.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            for (s, c) in cof[k].iter().enumerate() {
                if !c.is_zero() {
                    out[s] = out[s].add(&q.mul(c));
                }
            }
        }
        out
    }

    fn push(&mut self, p: Polynomial<C>, cof: Option<Vec<Polynomial<C>>>) {
        let lc = p.leading().unwrap().1.clone();
        let inv = lc.inv().unwrap();
        let monic = p.scale(&inv);
        if let Some(cofs) = &mut self.cof {
            let scaled = cof
                .unwrap()
                .into_iter()
                .map(|c| c.scale(&inv))
                .collect();
            cofs.push(scaled);
        }
        self.basis.push(monic);
    }
}

impl<C: Coeff> GroebnerBasis<C> {
    /// Buchberger's algorithm: reduced, monic, deterministic.
    pub fn new(gens: &[Polynomial<C>]) -> Result<Self, GroebnerError> {
        Self::build(gens, false)
    }

    /// Like [`GroebnerBasis::new`] but also tracks, for every basis element,
    /// its exact cofactor representation in the input generators.
    pub fn new_tracked(gens: &[Polynomial<C>]) -> Result<Self, GroebnerError> {
        Self::build(gens, true)
    }

    fn build(gens: &[Polynomial<C>], track: bool) -> Result<Self, GroebnerError> {
        if !C::EXACT {
            return Err(GroebnerError::FloatModeRejected);
        }
        if gens.is_empty() {
            return Err(GroebnerError::EmptyGenerators);
        }
        let nvars = gens[0].nvars();
        if gens.iter().any(|g| g.nvars() != nvars) {
            return Err(GroebnerError::Internal("mixed variable counts".into()));
        }

        let mut eng = Engine {
            nvars,
            basis: Vec::new(),
            cof: track.then(Vec::new),
            nsrc: gens.len(),
        };
        for (j, g) in gens.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            let mut unit = vec![Polynomial::zero(nvars); gens.len()];
            unit[j] = Polynomial::one(nvars);
            eng.push(g.clone(), track.then_some(unit));
        }

        let mut queue: BinaryHeap<Pair> = BinaryHeap::new();
        let mut done: std::collections::HashSet<(usize, usize)> = Default::default();
        let enqueue = |queue: &mut BinaryHeap<Pair>, basis: &[Polynomial<C>], i: usize, j: usize| {
            let (mi, mj) = (basis[i].leading().unwrap().0, basis[j].leading().unwrap().0);
            queue.push(Pair {
                lcm_degree: mi.lcm(mj).degree(),
                i,
                j,
            });
        };
        for i in 0..eng.basis.len() {
            for j in (i + 1)..eng.basis.len() {
                enqueue(&mut queue, &eng.basis, i, j);
            }
        }

        while let Some(Pair { i, j, .. }) = queue.pop() {
            done.insert((i, j));
            let (ltf, ltg) = (
                eng.basis[i].leading().unwrap().0.clone(),
                eng.basis[j].leading().unwrap().0.clone(),
            );
            // first criterion: coprime leading monomials reduce to zero
            if ltf.coprime(&ltg) {
                continue;
            }
            // chain criterion: some k with LT(k) | lcm and both pairs handled
            let lcm = ltf.lcm(&ltg);
            let chained = (0..eng.basis.len()).any(|k| {
                k != i
                    && k != j
                    && eng.basis[k].leading().unwrap().0.divides(&lcm)
                    && done.contains(&(i.min(k), i.max(k)))
                    && done.contains(&(j.min(k), j.max(k)))
            });
            if chained {
                continue;
            }

            // S-polynomial; both inputs are monic
            let ti = ltf.div_into(&lcm);
            let tj = ltg.div_into(&lcm);
            let spoly = eng.basis[i]
                .mul_term(&ti, &C::one())
                .sub(&eng.basis[j].mul_term(&tj, &C::one()));
            let mut quotients = vec![Polynomial::zero(nvars); eng.basis.len()];
            let rem = eng.reduce(spoly, &mut quotients);
            if rem.is_zero() {
                continue;
            }
            let cof = eng.cof.as_ref().map(|cofs| {
                let mut c: Vec<Polynomial<C>> = cofs[i]
                    .iter()
                    .zip(&cofs[j])
                    .map(|(a, b)| {
                        a.mul_term(&ti, &C::one())
                            .sub(&b.mul_term(&tj, &C::one()))
                    })
                    .collect();
                let qc = eng.cofactor_of_quotients(&quotients);
                for (s, q) in qc.into_iter().enumerate() {
                    c[s] = c[s].sub(&q);
                }
                c
            });
            eng.push(rem, cof);
            let newidx = eng.basis.len() - 1;
            for k in 0..newidx {
                enqueue(&mut queue, &eng.basis, k, newidx);
            }
        }

        let (generators, cofactors) = autoreduce(eng);
        Ok(GroebnerBasis {
            nvars,
            order: MonomialOrder::GradedRevLex,
            generators,
            source: gens.to_vec(),
            cofactors,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn generators(&self) -> &[Polynomial<C>] {
        &self.generators
    }

    pub fn source_generators(&self) -> &[Polynomial<C>] {
        &self.source
    }

    /// `1` is in the basis (the ideal is the whole ring).
    pub fn is_unit_ideal(&self) -> bool {
        self.generators
            .iter()
            .any(|g| g.degree() == Some(0))
    }

    /// Remainder of `p` modulo the basis: zero iff `p` is an ideal member.
    pub fn normal_form(&self, p: &Polynomial<C>) -> Polynomial<C> {
        self.reduce_with_quotients(p).1
    }

    /// Full division: returns `(quotients, remainder)` with
    /// `p = sum_k quotients[k] * generators[k] + remainder`.
    pub fn reduce_with_quotients(
        &self,
        p: &Polynomial<C>,
    ) -> (Vec<Polynomial<C>>, Polynomial<C>) {
        let eng = Engine {
            nvars: self.nvars,
            basis: self.generators.clone(),
            cof: None,
            nsrc: 0,
        };
        let mut quotients = vec![Polynomial::zero(self.nvars); self.generators.len()];
        let rem = eng.reduce(p.clone(), &mut quotients);
        (quotients, rem)
    }

    /// Rewrite quotients against the basis into multipliers against the
    /// source generators, using the tracked cofactors.
    pub fn express_in_source(&self, quotients: &[Polynomial<C>]) -> Vec<Polynomial<C>> {
        let cof = self
            .cofactors
            .as_ref()
            .expect("express_in_source requires a tracked basis");
        let mut out = vec![Polynomial::zero(self.nvars); self.source.len()];
        for (k, q) in quotients.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            for (s, c) in cof[k].iter().enumerate() {
                if !c.is_zero() {
                    out[s] = out[s].add(&q.mul(c));
                }
            }
        }
        out
    }

    pub fn map_coeff<D: Coeff>(&self, f: impl Fn(&C) -> D + Copy) -> GroebnerBasis<D> {
        GroebnerBasis {
            nvars: self.nvars,
            order: self.order,
            generators: self.generators.iter().map(|p| p.map_coeff(f)).collect(),
            source: self.source.iter().map(|p| p.map_coeff(f)).collect(),
            cofactors: self.cofactors.as_ref().map(|cc| {
                cc.iter()
                    .map(|row| row.iter().map(|p| p.map_coeff(f)).collect())
                    .collect()
            }),
        }
    }
}

/// Minimize and fully reduce the basis; keeps cofactors consistent.
fn autoreduce<C: Coeff>(
    eng: Engine<C>,
) -> (Vec<Polynomial<C>>, Option<Vec<Vec<Polynomial<C>>>>) {
    let nvars = eng.nvars;
    let track = eng.cof.is_some();
    let mut polys = eng.basis;
    let mut cofs = eng.cof.unwrap_or_default();

    // minimize: drop elements whose leading term another's divides
    let mut keep: Vec<bool> = vec![true; polys.len()];
    for i in 0..polys.len() {
        if !keep[i] {
            continue;
        }
        for j in 0..polys.len() {
            if i == j || !keep[j] {
                continue;
            }
            let (li, lj) = (
                polys[i].leading().unwrap().0,
                polys[j].leading().unwrap().0,
            );
            if lj.divides(li) && (li != lj || j < i) {
                keep[i] = false;
                break;
            }
        }
    }
    let mut kept: Vec<Polynomial<C>> = Vec::new();
    let mut kept_cof: Vec<Vec<Polynomial<C>>> = Vec::new();
    for (idx, p) in polys.drain(..).enumerate() {
        if keep[idx] {
            kept.push(p);
            if track {
                kept_cof.push(std::mem::take(&mut cofs[idx]));
            }
        }
    }

    // full tail reduction of each element against the others, to fixpoint
    loop {
        let mut changed = false;
        for i in 0..kept.len() {
            let others: Vec<Polynomial<C>> = kept
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, p)| p.clone())
                .collect();
            if others.is_empty() {
                break;
            }
            let sub = Engine {
                nvars,
                basis: others,
                cof: None,
                nsrc: 0,
            };
            let mut quotients = vec![Polynomial::zero(nvars); sub.basis.len()];
            let rem = sub.reduce(kept[i].clone(), &mut quotients);
            if rem != kept[i] {
                changed = true;
                if track {
                    // kept[i] = rem + sum quotients * others
                    let mut newcof = std::mem::take(&mut kept_cof[i]);
                    let mut oidx = 0;
                    for j in 0..kept.len() {
                        if j == i {
                            continue;
                        }
                        let q = &quotients[oidx];
                        oidx += 1;
                        if q.is_zero() {
                            continue;
                        }
                        for s in 0..newcof.len() {
                            let delta = q.mul(&kept_cof[j][s]);
                            newcof[s] = newcof[s].sub(&delta);
                        }
                    }
                    kept_cof[i] = newcof;
                }
                let lc = rem.leading().expect("autoreduction produced zero").1.clone();
                let inv = lc.inv().unwrap();
                kept[i] = rem.scale(&inv);
                if track {
                    for c in &mut kept_cof[i] {
                        *c = c.scale(&inv);
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    // deterministic ordering: ascending leading monomial
    let mut order: Vec<usize> = (0..kept.len()).collect();
    order.sort_by(|&a, &b| {
        kept[a]
            .leading()
            .unwrap()
            .0
            .cmp(kept[b].leading().unwrap().0)
    });
    let generators: Vec<Polynomial<C>> = order.iter().map(|&i| kept[i].clone()).collect();
    let cofactors = track.then(|| order.iter().map(|&i| kept_cof[i].clone()).collect());
    (generators, cofactors)
}

/// Dimension of the quotient ring as a vector space; serialized as the
/// number itself or the string `"infinite"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuotientDimension {
    Finite(usize),
    Infinite,
}

impl Serialize for QuotientDimension {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            QuotientDimension::Finite(d) => s.serialize_u64(*d as u64),
            QuotientDimension::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl<'de> Deserialize<'de> for QuotientDimension {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Tag(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(QuotientDimension::Finite(v as usize)),
            Raw::Tag(t) if t == "infinite" => Ok(QuotientDimension::Infinite),
            Raw::Tag(t) => Err(serde::de::Error::custom(format!(
                "expected a dimension or \"infinite\", got {t:?}"
            ))),
        }
    }
}

impl<C: Coeff> GroebnerBasis<C> {
    /// Finite iff every variable has a pure power among the leading terms.
    pub fn quotient_dimension(&self) -> QuotientDimension {
        if self.is_unit_ideal() {
            return QuotientDimension::Finite(0);
        }
        for v in 0..self.nvars {
            let covered = self.generators.iter().any(|g| {
                let lm = g.leading().unwrap().0;
                lm.0.iter().enumerate().all(|(i, &e)| (i == v) == (e > 0))
            });
            if !covered {
                return QuotientDimension::Infinite;
            }
        }
        QuotientDimension::Finite(self.standard_monomials().len())
    }

    /// Monomials not divisible by any leading term, ascending grevlex.
    /// Only finite for zero-dimensional ideals; guarded by the caller.
    fn standard_monomials(&self) -> Vec<Monomial> {
        let lts: Vec<&Monomial> = self
            .generators
            .iter()
            .map(|g| g.leading().unwrap().0)
            .collect();
        let reducible = |m: &Monomial| lts.iter().any(|lt| lt.divides(m));
        let mut seen = std::collections::BTreeSet::new();
        let one = Monomial::one(self.nvars);
        if reducible(&one) {
            return Vec::new();
        }
        let mut queue = vec![one.clone()];
        seen.insert(one);
        while let Some(m) = queue.pop() {
            for v in 0..self.nvars {
                let mut e = m.0.clone();
                e[v] += 1;
                let next = Monomial(e);
                if !seen.contains(&next) && !reducible(&next) {
                    seen.insert(next.clone());
                    queue.push(next);
                }
            }
        }
        seen.into_iter().collect()
    }
}

/// The quotient ring `F[x]/<gens>` as a finite-dimensional algebra:
/// standard-monomial basis and one multiplication matrix per variable.
#[derive(Clone, Debug)]
pub struct QuotientAlgebra<C> {
    gb: GroebnerBasis<C>,
    basis: Vec<Monomial>,
    mult: Vec<FMat<C>>,
    one_index: usize,
}

impl<C: Coeff> QuotientAlgebra<C> {
    pub fn new(gb: GroebnerBasis<C>) -> Result<Self, GroebnerError> {
        match gb.quotient_dimension() {
            QuotientDimension::Infinite => Err(GroebnerError::PositiveDimensional),
            QuotientDimension::Finite(0) => Ok(QuotientAlgebra {
                gb,
                basis: Vec::new(),
                mult: Vec::new(),
                one_index: 0,
            }),
            QuotientDimension::Finite(dim) => {
                let basis = gb.standard_monomials();
                debug_assert_eq!(basis.len(), dim);
                let index: std::collections::BTreeMap<&Monomial, usize> =
                    basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
                let one_index = *index.get(&Monomial::one(gb.nvars())).unwrap();
                let nvars = gb.nvars();
                let mut mult = Vec::with_capacity(nvars);
                for v in 0..nvars {
                    let mut mat = FMat::zeros(dim, dim);
                    for (j, bm) in basis.iter().enumerate() {
                        let mut e = bm.0.clone();
                        e[v] += 1;
                        let shifted = Monomial(e);
                        let mut p = Polynomial::zero(nvars);
                        p.add_term(shifted, C::one());
                        let nf = gb.normal_form(&p);
                        for (m, c) in nf.terms() {
                            let row = *index
                                .get(m)
                                .expect("normal form left the standard basis");
                            mat.set(row, j, c.clone());
                        }
                    }
                    mult.push(mat);
                }
                Ok(QuotientAlgebra {
                    gb,
                    basis,
                    mult,
                    one_index,
                })
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_monomials(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn multiplication_matrices(&self) -> &[FMat<C>] {
        &self.mult
    }

    pub fn groebner(&self) -> &GroebnerBasis<C> {
        &self.gb
    }

    pub fn nvars(&self) -> usize {
        self.gb.nvars()
    }

    pub fn one_index(&self) -> usize {
        self.one_index
    }

    /// Coordinates of `NF(p)` in the standard-monomial basis.
    pub fn coordinates(&self, p: &Polynomial<C>) -> Vec<C> {
        let nf = self.gb.normal_form(p);
        let mut v = vec![C::zero(); self.dim()];
        for (m, c) in nf.terms() {
            let i = self
                .basis
                .iter()
                .position(|b| b == m)
                .expect("normal form left the standard basis");
            v[i] = c.clone();
        }
        v
    }

    /// The polynomial with the given standard-basis coordinates.
    pub fn element(&self, coords: &[C]) -> Polynomial<C> {
        assert_eq!(coords.len(), self.dim());
        Polynomial::from_terms(
            self.nvars(),
            self.basis
                .iter()
                .cloned()
                .zip(coords.iter().cloned())
                .filter(|(_, c)| !c.is_zero()),
        )
    }

    pub fn map_coeff<D: Coeff>(&self, f: impl Fn(&C) -> D + Copy) -> QuotientAlgebra<D> {
        QuotientAlgebra {
            gb: self.gb.map_coeff(f),
            basis: self.basis.clone(),
            mult: self.mult.iter().map(|m| m.map(f)).collect(),
            one_index: self.one_index,
        }
    }
}

/// Result of lifting an ideal member to explicit multipliers.
#[derive(Clone, Debug)]
pub struct MembershipLift<C> {
    /// `h = sum_i multipliers[i] * g_i`, exactly.
    pub multipliers: Vec<Polynomial<C>>,
    /// Observed: `deg(multipliers[i]) <= deg(h) - deg(g_i)` for all `i`.
    pub degree_contract_met: bool,
    /// The homogeneous route succeeded, so the degree contract is structural
    /// rather than coincidental. False means the ideal has extra behaviour at
    /// infinity and the plain affine division was used.
    pub degree_contract_guaranteed: bool,
}

/// Write an ideal member `h` as `sum_i lambda_i g_i` with degree control.
///
/// When the homogenized generators generate the full homogeneous ideal (which
/// the no-solutions-at-infinity condition guarantees), dividing the
/// homogenization of `h` by a tracked basis of the homogenized generators
/// yields multipliers with `deg(lambda_i) <= deg(h) - deg(g_i)`; otherwise we
/// fall back to plain affine division and flag the contract as unguaranteed.
pub fn lift_membership<C: Coeff>(
    h: &Polynomial<C>,
    gens: &[Polynomial<C>],
) -> Result<MembershipLift<C>, GroebnerError> {
    let nvars = h.nvars();
    if h.is_zero() {
        return Ok(MembershipLift {
            multipliers: vec![Polynomial::zero(nvars); gens.len()],
            degree_contract_met: true,
            degree_contract_guaranteed: true,
        });
    }
    let affine = GroebnerBasis::new_tracked(gens)?;
    if !affine.normal_form(h).is_zero() {
        return Err(GroebnerError::NotAMember);
    }

    // homogeneous route: divide the homogenization of h by a tracked basis of
    // the homogenized generators; everything stays homogeneous, which is what
    // pins the multiplier degrees
    let hbar = h.homogenize().expect("nonzero");
    let gbar: Vec<Polynomial<C>> = gens
        .iter()
        .map(|g| g.homogenize())
        .collect::<Result<_, _>>()
        .map_err(|_| GroebnerError::Internal("zero generator".into()))?;
    let hom = GroebnerBasis::new_tracked(&gbar)?;
    let (q, rem) = hom.reduce_with_quotients(&hbar);
    if rem.is_zero() {
        let lambdas_bar = hom.express_in_source(&q);
        let multipliers: Vec<Polynomial<C>> =
            lambdas_bar.iter().map(|l| l.dehomogenize()).collect();
        check_lift_identity(h, gens, &multipliers)?;
        if !degree_contract(h, gens, &multipliers) {
            return Err(GroebnerError::Internal(
                "homogeneous lift violated the degree contract".into(),
            ));
        }
        return Ok(MembershipLift {
            multipliers,
            degree_contract_met: true,
            degree_contract_guaranteed: true,
        });
    }

    // fallback: plain affine division; degrees not guaranteed
    let (q, rem) = affine.reduce_with_quotients(h);
    if !rem.is_zero() {
        return Err(GroebnerError::NotAMember);
    }
    let multipliers = affine.express_in_source(&q);
    check_lift_identity(h, gens, &multipliers)?;
    let degree_contract_met = degree_contract(h, gens, &multipliers);
    Ok(MembershipLift {
        multipliers,
        degree_contract_met,
        degree_contract_guaranteed: false,
    })
}

fn check_lift_identity<C: Coeff>(
    h: &Polynomial<C>,
    gens: &[Polynomial<C>],
    multipliers: &[Polynomial<C>],
) -> Result<(), GroebnerError> {
    let mut acc = Polynomial::zero(h.nvars());
    for (l, g) in multipliers.iter().zip(gens) {
        acc = acc.add(&l.mul(g));
    }
    if acc != *h {
        return Err(GroebnerError::Internal(
            "membership lift failed to reproduce the input".into(),
        ));
    }
    Ok(())
}

fn degree_contract<C: Coeff>(
    h: &Polynomial<C>,
    gens: &[Polynomial<C>],
    multipliers: &[Polynomial<C>],
) -> bool {
    let dh = h.degree().unwrap_or(0);
    multipliers.iter().zip(gens).all(|(l, g)| match l.degree() {
        None => true,
        Some(dl) => {
            let dg = g.degree().unwrap_or(0);
            dl + dg <= dh
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::QPoly;
    use crate::poly::parse_polynomial;
    use crate::scalar::rat;
    use num_traits::Zero;

    pub(crate) fn qp(src: &str, n: usize) -> QPoly {
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        parse_polynomial(src, &names).unwrap()
    }

    /// Example with four variety points `(0,0), (1,0), (0,1), (a,b)`.
    pub(crate) fn radical_pair(a: i64, b: i64) -> Vec<QPoly> {
        let g1 = format!("x2*({a}*(x2-1) - x1*({b}-1))");
        let g2 = format!("x1*(x2*({a}-1) - {b}*(x1-1))");
        vec![qp(&g1, 2), qp(&g2, 2)]
    }

    /// Example with three variety points and a double point at `(0,1)`.
    pub(crate) fn nonradical_pair(a: i64, b: i64) -> Vec<QPoly> {
        let g1 = format!("x2*({a}*(x2-1) - x1*({b}-1))");
        let g2 = "x1*(x1+x2-1)".to_string();
        vec![qp(&g1, 2), qp(&g2, 2)]
    }

    pub(crate) fn binary_gens(n: usize) -> Vec<QPoly> {
        (0..n)
            .map(|i| {
                let x = QPoly::variable(n, i);
                x.mul(&x).sub(&QPoly::one(n))
            })
            .collect()
    }

    #[test]
    fn binary_basis_is_already_reduced() {
        let gens = binary_gens(2);
        let gb = GroebnerBasis::new(&gens).unwrap();
        let mut got = gb.generators().to_vec();
        got.sort_by(|a, b| b.leading().unwrap().0.cmp(a.leading().unwrap().0));
        assert_eq!(got, gens);
    }

    #[test]
    fn unit_ideal_reduces_to_one() {
        let gens = vec![qp("x1", 1), qp("x1+1", 1)];
        let gb = GroebnerBasis::new(&gens).unwrap();
        assert_eq!(gb.generators(), &[QPoly::one(1)]);
        assert!(gb.is_unit_ideal());
    }

    #[test]
    fn float_mode_rejected() {
        let gens = vec![QPoly::variable(1, 0).to_float()];
        assert!(matches!(
            GroebnerBasis::new(&gens),
            Err(GroebnerError::FloatModeRejected)
        ));
    }

    #[test]
    fn nonradical_power_membership() {
        // generators (x1-1)^3 + (x2-1)^3 and (x1-1)^4 (x2-1)^4: both tenth
        // powers of the shifted variables lie in the ideal
        let gens = vec![qp("(x1-1)^3 + (x2-1)^3", 2), qp("(x1-1)^4*(x2-1)^4", 2)];
        let gb = GroebnerBasis::new(&gens).unwrap();
        assert!(gb.normal_form(&qp("(x2-1)^10", 2)).is_zero());
        assert!(gb.normal_form(&qp("(x1-1)^10", 2)).is_zero());
        // and e.g. (x2-1)^9 does not
        assert!(!gb.normal_form(&qp("(x2-1)^9", 2)).is_zero());
    }

    #[test]
    fn normal_form_examples() {
        let gb = GroebnerBasis::new(&binary_gens(2)).unwrap();
        assert_eq!(gb.normal_form(&qp("x1^2", 2)), QPoly::one(2));
        // idempotent
        let p = qp("x1^3*x2 + x2^2 - 4", 2);
        let nf = gb.normal_form(&p);
        assert_eq!(gb.normal_form(&nf), nf);
    }

    #[test]
    fn normal_form_is_linear_and_multiplicative() {
        let gb = GroebnerBasis::new(&radical_pair(2, 3)).unwrap();
        let p = qp("x1^3 - 2*x2 + 1", 2);
        let q = qp("x1*x2^2 + 5", 2);
        let nf = |r: &QPoly| gb.normal_form(r);
        assert_eq!(nf(&p.add(&q)), nf(&p).add(&nf(&q)));
        assert_eq!(nf(&p.mul(&q)), nf(&nf(&p).mul(&nf(&q))));
    }

    #[test]
    fn spoly_criterion_on_final_basis() {
        // every S-polynomial of the output basis reduces to zero
        for gens in [radical_pair(2, 3), nonradical_pair(2, 3), binary_gens(3)] {
            let gb = GroebnerBasis::new(&gens).unwrap();
            let g = gb.generators();
            for i in 0..g.len() {
                for j in (i + 1)..g.len() {
                    let (mi, mj) = (g[i].leading().unwrap().0, g[j].leading().unwrap().0);
                    let lcm = mi.lcm(mj);
                    let s = g[i]
                        .mul_term(&mi.div_into(&lcm), &rat(1))
                        .sub(&g[j].mul_term(&mj.div_into(&lcm), &rat(1)));
                    assert!(gb.normal_form(&s).is_zero());
                }
            }
        }
    }

    #[test]
    fn reduced_basis_properties() {
        for gens in [radical_pair(2, 3), nonradical_pair(2, 3)] {
            let gb = GroebnerBasis::new(&gens).unwrap();
            for (i, g) in gb.generators().iter().enumerate() {
                assert_eq!(g.leading().unwrap().1, &rat(1));
                for (j, other) in gb.generators().iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    // no term of g is divisible by another leading term
                    let lt = other.leading().unwrap().0;
                    assert!(g.terms().all(|(m, _)| !lt.divides(m)));
                }
            }
        }
    }

    #[test]
    fn quotient_dimensions() {
        let gb = GroebnerBasis::new(&binary_gens(2)).unwrap();
        let qa = QuotientAlgebra::new(gb).unwrap();
        assert_eq!(qa.dim(), 4);
        // ascending grevlex: 1, x2, x1, x1*x2
        let mons: Vec<_> = qa.basis_monomials().to_vec();
        assert_eq!(
            mons,
            vec![
                Monomial(vec![0, 0]),
                Monomial(vec![0, 1]),
                Monomial(vec![1, 0]),
                Monomial(vec![1, 1]),
            ]
        );

        let gb = GroebnerBasis::new(&radical_pair(2, 3)).unwrap();
        assert_eq!(gb.quotient_dimension(), QuotientDimension::Finite(4));

        let gb = GroebnerBasis::new(&[qp("x1", 2)]).unwrap();
        assert_eq!(gb.quotient_dimension(), QuotientDimension::Infinite);
        assert!(matches!(
            QuotientAlgebra::new(gb),
            Err(GroebnerError::PositiveDimensional)
        ));
    }

    #[test]
    fn multiplication_matrices_commute() {
        for gens in [radical_pair(2, 3), nonradical_pair(2, 3), binary_gens(3)] {
            let gb = GroebnerBasis::new(&gens).unwrap();
            let qa = QuotientAlgebra::new(gb).unwrap();
            let m = qa.multiplication_matrices();
            for i in 0..m.len() {
                for j in (i + 1)..m.len() {
                    assert_eq!(m[i].mul_mat(&m[j]), m[j].mul_mat(&m[i]));
                }
            }
        }
    }

    #[test]
    fn lift_membership_binary() {
        let gens = binary_gens(2);
        let lift = lift_membership(&qp("x1^2 - 1", 2), &gens).unwrap();
        assert_eq!(lift.multipliers, vec![QPoly::one(2), QPoly::zero(2)]);
        assert!(lift.degree_contract_met);

        let lift = lift_membership(&qp("x2^2 - x1^2", 2), &gens).unwrap();
        assert_eq!(
            lift.multipliers,
            vec![QPoly::one(2).neg(), QPoly::one(2)]
        );

        assert!(matches!(
            lift_membership(&qp("x1", 2), &gens),
            Err(GroebnerError::NotAMember)
        ));
    }

    #[test]
    fn lift_membership_degree_bound_randomized() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let gens = radical_pair(2, 3);
        for _ in 0..10 {
            // random multipliers of degree <= 2
            let mut h = QPoly::zero(2);
            for g in &gens {
                let mut l = QPoly::zero(2);
                for e1 in 0..=2u32 {
                    for e2 in 0..=(2 - e1) {
                        let c = rng.gen_range(-3i64..=3);
                        l.add_term(Monomial(vec![e1, e2]), rat(c));
                    }
                }
                h = h.add(&l.mul(g));
            }
            if h.is_zero() {
                continue;
            }
            let lift = lift_membership(&h, &gens).unwrap();
            assert!(lift.degree_contract_guaranteed);
            let dh = h.degree().unwrap();
            for (l, g) in lift.multipliers.iter().zip(&gens) {
                if let Some(dl) = l.degree() {
                    assert!(dl + g.degree().unwrap() <= dh);
                }
            }
            // identity
            let mut acc = QPoly::zero(2);
            for (l, g) in lift.multipliers.iter().zip(&gens) {
                acc = acc.add(&l.mul(g));
            }
            assert_eq!(acc, h);
        }
    }

    #[test]
    fn ideal_members_respect_min_degree() {
        // any nonzero member has degree >= max generator degree when there
        // are no solutions at infinity
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let gens = radical_pair(2, 3);
        let maxdeg = gens.iter().map(|g| g.degree().unwrap()).max().unwrap();
        for _ in 0..20 {
            let mut h = QPoly::zero(2);
            for g in &gens {
                let mut l = QPoly::zero(2);
                for e1 in 0..=1u32 {
                    for e2 in 0..=1u32 {
                        let c = rng.gen_range(-2i64..=2);
                        l.add_term(Monomial(vec![e1, e2]), rat(c));
                    }
                }
                h = h.add(&l.mul(g));
            }
            if !h.is_zero() {
                assert!(h.degree().unwrap() >= maxdeg);
            }
        }
    }

    #[test]
    fn tracked_cofactors_reproduce_basis() {
        for gens in [radical_pair(2, 3), nonradical_pair(2, 3)] {
            let gb = GroebnerBasis::new_tracked(&gens).unwrap();
            let cof = gb.cofactors.as_ref().unwrap();
            for (i, b) in gb.generators().iter().enumerate() {
                let mut acc = QPoly::zero(2);
                for (c, g) in cof[i].iter().zip(&gens) {
                    acc = acc.add(&c.mul(g));
                }
                assert_eq!(&acc, b);
            }
        }
    }

    #[test]
    fn zero_polynomial_lift() {
        let gens = binary_gens(2);
        let lift = lift_membership(&QPoly::zero(2), &gens).unwrap();
        assert!(lift.multipliers.iter().all(QPoly::is_zero));
    }

    #[test]
    fn coordinates_round_trip() {
        let gb = GroebnerBasis::new(&radical_pair(2, 3)).unwrap();
        let qa = QuotientAlgebra::new(gb).unwrap();
        let p = qp("x1^4 + x2 - 3", 2);
        let coords = qa.coordinates(&p);
        let elem = qa.element(&coords);
        assert_eq!(qa.groebner().normal_form(&p), elem);
        assert!(!coords.iter().all(Zero::is_zero));
    }
}
