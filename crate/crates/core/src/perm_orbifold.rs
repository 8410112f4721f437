//! Modular datum of the cyclic permutation orbifold `(V^{⊗k})^{Z_k}`, `k` prime.
//!
//! `Z_k` is generated by the k-cycle `g = (1 2 … k)`. Its irreducible modules are
//!
//! * `OffDiagonal(i_1…i_k)`: `M^{i_1} ⊗ … ⊗ M^{i_k}` for a non-constant tuple, one per
//!   rotation orbit;
//! * `Diagonal(i, a)`: the `e^{-2πi a/k}`-eigenspace of `g` on `(M^i)^{⊗k}`;
//! * `Twisted(r, i, a)`: the `e^{-2πi a/k}`-eigenspace of `g` on the `g^r`-twisted
//!   module `T_{g^r}(M^i)`.
//!
//! The twisted module `T_{g^r}(M^i)` is graded by `h_i/k + (k²-1)c/(24k) + n/k`.
//! Which residue `n mod k` carries the `a`-th eigenvalue is fixed by the
//! [`Convention`].

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::io::{self, DatumDoc, OrbifoldMeta};
use crate::linalg::{self, CMatrix, Complex};
use crate::modular_data::{self, ModularDatum, ModuleInfo, Tolerances};
use crate::phase::{frac, rat, Phase, Rational};
use crate::report::{CheckResult, ValidationReport};
use crate::restricted::{
    CharacterTable, CrossBlock, FiniteAbelianGroup, OrbitSpec, RestrictedInput,
};
use crate::sl2z::{build_a, is_prime, rho_of};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrbifoldModuleLabel {
    /// Lexicographically minimal rotation of a non-constant tuple.
    OffDiagonal(Vec<usize>),
    Diagonal {
        i: usize,
        a: usize,
    },
    Twisted {
        r: usize,
        i: usize,
        a: usize,
    },
}

impl OrbifoldModuleLabel {
    pub fn kind(&self) -> &'static str {
        match self {
            OrbifoldModuleLabel::OffDiagonal(_) => "offdiag",
            OrbifoldModuleLabel::Diagonal { .. } => "diag",
            OrbifoldModuleLabel::Twisted { .. } => "twisted",
        }
    }

    /// Human-readable name built from the parent's module labels.
    pub fn display_with(&self, parent: &ModularDatum) -> String {
        match self {
            OrbifoldModuleLabel::OffDiagonal(t) => {
                let parts: Vec<&str> = t.iter().map(|&i| parent.label(i)).collect();
                format!("({})", parts.join(","))
            }
            OrbifoldModuleLabel::Diagonal { i, a } => format!("({})^{a}", parent.label(*i)),
            OrbifoldModuleLabel::Twisted { r, i, a } => {
                format!("T_g{r}({})^{a}", parent.label(*i))
            }
        }
    }

    pub fn params_json(&self) -> serde_json::Value {
        match self {
            OrbifoldModuleLabel::OffDiagonal(t) => serde_json::json!({ "tuple": t }),
            OrbifoldModuleLabel::Diagonal { i, a } => serde_json::json!({ "i": i, "a": a }),
            OrbifoldModuleLabel::Twisted { r, i, a } => {
                serde_json::json!({ "r": r, "i": i, "a": a })
            }
        }
    }
}

/// Sign choice for the residue `m₀` that carries eigencomponent `a` of a
/// `g^r`-twisted module: `m₀ = (∓a·r) mod k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Convention {
    /// `m₀ = (-a·r) mod k`.
    #[default]
    Minus,
    /// `m₀ = (a·r) mod k`.
    Plus,
}

impl Convention {
    pub fn sign(self) -> i64 {
        match self {
            Convention::Minus => -1,
            Convention::Plus => 1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Convention::Minus => Convention::Plus,
            Convention::Plus => Convention::Minus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Convention::Minus => "minus",
            Convention::Plus => "plus",
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minus" => Ok(Convention::Minus),
            "plus" => Ok(Convention::Plus),
            other => Err(Error::Parse(format!(
                "unknown convention {other:?} (expected minus|plus)"
            ))),
        }
    }
}

/// Lexicographically minimal rotation.
pub fn canonical_rotation(t: &[usize]) -> Vec<usize> {
    (0..t.len())
        .map(|r| {
            let mut v = t.to_vec();
            v.rotate_left(r);
            v
        })
        .min()
        .unwrap_or_default()
}

/// `((n^k - n)/k) + n·k + n·k·(k-1)` for a parent with `n` modules.
pub fn orbifold_module_count(n: usize, k: usize) -> usize {
    let n128 = n as u128;
    let total = (n128.pow(k as u32) - n128) / k as u128 + n128 * k as u128 * k as u128;
    total as usize
}

fn check_prime(k: usize) -> Result<()> {
    if is_prime(k as i64) {
        Ok(())
    } else {
        Err(Error::NotPrime(k as i64))
    }
}

/// Weight of `T_{g^r}(M^i)` component `a`, mod 1.
fn twisted_weight(
    d: &ModularDatum,
    k: usize,
    r: usize,
    i: usize,
    a: usize,
    conv: Convention,
) -> Rational {
    let ki = k as i64;
    let m0 = (conv.sign() * (a * r) as i64).rem_euclid(ki);
    let c = d.central_charge();
    frac(d.weight(i) / ki + c * (ki * ki - 1) / (24 * ki) + rat(m0, ki))
}

fn label_weight(
    d: &ModularDatum,
    k: usize,
    label: &OrbifoldModuleLabel,
    conv: Convention,
) -> Rational {
    match label {
        OrbifoldModuleLabel::OffDiagonal(t) => {
            frac(t.iter().fold(Rational::zero(), |acc, &i| acc + d.weight(i)))
        }
        OrbifoldModuleLabel::Diagonal { i, .. } => frac(d.weight(*i) * k as i64),
        OrbifoldModuleLabel::Twisted { r, i, a } => twisted_weight(d, k, *r, *i, *a, conv),
    }
}

/// Orbifold labels in output order: `Diagonal(0,0)`, other diagonals by `(i,a)`,
/// off-diagonal orbits by canonical tuple, twisted by `(r,i,a)`.
pub fn orbifold_labels(n: usize, k: usize) -> Result<Vec<OrbifoldModuleLabel>> {
    check_prime(k)?;
    let mut labels = Vec::with_capacity(orbifold_module_count(n, k));
    for i in 0..n {
        for a in 0..k {
            labels.push(OrbifoldModuleLabel::Diagonal { i, a });
        }
    }
    // Tuples in lexicographic order; keep the orbit representatives.
    let mut t = vec![0usize; k];
    loop {
        if t.iter().any(|&x| x != t[0]) && canonical_rotation(&t) == t {
            labels.push(OrbifoldModuleLabel::OffDiagonal(t.clone()));
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            t[pos] += 1;
            if t[pos] < n {
                break;
            }
            t[pos] = 0;
        }
        if t.iter().all(|&x| x == 0) {
            break;
        }
    }
    for r in 1..k {
        for i in 0..n {
            for a in 0..k {
                labels.push(OrbifoldModuleLabel::Twisted { r, i, a });
            }
        }
    }
    Ok(labels)
}

/// Labels with their conformal weights mod 1.
pub fn enumerate_orbifold_modules(
    d: &ModularDatum,
    k: usize,
    conv: Convention,
) -> Result<Vec<(OrbifoldModuleLabel, Rational)>> {
    Ok(orbifold_labels(d.rank(), k)?
        .into_iter()
        .map(|l| {
            let w = label_weight(d, k, &l, conv);
            (l, w)
        })
        .collect())
}

/// `B^{r,s}` with `B_{j,i} = S_{T_{g^r}(M^j), T_{g^s}(M^i)}`:
///
/// ```text
/// B_{j,i} = e^{2πi a(-h_j/k + c/24k)} · e^{-2πi b(-h_i/k + c/24k)} · Σ_l S_{j,l} ρ(A^{r,s})_{l,i}
/// ```
///
/// with `(a, b, A^{r,s})` from [`build_a`]. The sum runs over `l`, contracting `S`
/// against the row index of `ρ(A^{r,s})`.
pub fn twisted_block_s(d: &ModularDatum, k: usize, r: usize, s: usize) -> Result<CMatrix> {
    let twist = build_a(k as i64, r as i64, s as i64)?;
    let ki = k as i64;
    let c = d.central_charge();
    let n = d.rank();
    let rho_a = rho_of(&twist.matrix, d);
    let inner = linalg::matmul(d.s_matrix(), &rho_a);
    let shift = |i: usize| -d.weight(i) / ki + c / (24 * ki);
    let left: Vec<Complex> = (0..n)
        .map(|j| Phase::new(shift(j) * twist.a).to_complex())
        .collect();
    let right: Vec<Complex> = (0..n)
        .map(|i| Phase::new(-shift(i) * twist.b).to_complex())
        .collect();
    let mut out = inner;
    for ((j, i), z) in out.indexed_iter_mut() {
        *z *= left[j] * right[i];
    }
    Ok(out)
}

struct Assembler<'a> {
    d: &'a ModularDatum,
    k: usize,
    /// `blocks[(r-1)*(k-1) + (s-1)] = B^{r,s}`.
    blocks: Vec<CMatrix>,
}

impl<'a> Assembler<'a> {
    fn new(d: &'a ModularDatum, k: usize) -> Result<Self> {
        let mut blocks = Vec::with_capacity((k - 1) * (k - 1));
        for r in 1..k {
            for s in 1..k {
                blocks.push(twisted_block_s(d, k, r, s)?);
            }
        }
        Ok(Assembler { d, k, blocks })
    }

    fn block(&self, r: usize, s: usize) -> &CMatrix {
        &self.blocks[(r - 1) * (self.k - 1) + (s - 1)]
    }

    fn root(&self, n: usize) -> Complex {
        Phase::from_fraction(n as i64, self.k as i64).to_complex()
    }

    fn entry(&self, x: &OrbifoldModuleLabel, y: &OrbifoldModuleLabel) -> Complex {
        use OrbifoldModuleLabel::*;
        let d = self.d;
        let k = self.k;
        let inv_k = 1.0 / k as f64;
        match (x, y) {
            (Twisted { r, i, a }, Twisted { r: s, i: j, a: b }) => {
                self.block(*r, *s)[[*i, *j]] * self.root(s * a + r * b) * inv_k
            }
            (Twisted { r, i, .. }, Diagonal { i: j, a: b })
            | (Diagonal { i: j, a: b }, Twisted { r, i, .. }) => {
                d.s(*i, *j) * self.root(r * b) * inv_k
            }
            (Twisted { .. }, OffDiagonal(_)) | (OffDiagonal(_), Twisted { .. }) => Complex::zero(),
            (OffDiagonal(u), OffDiagonal(t)) => (0..k)
                .map(|rot| {
                    (0..k)
                        .map(|j| d.s(u[j], t[(j + rot) % k]))
                        .product::<Complex>()
                })
                .sum(),
            (OffDiagonal(u), Diagonal { i: j, .. }) | (Diagonal { i: j, .. }, OffDiagonal(u)) => {
                u.iter().map(|&m| d.s(m, *j)).product()
            }
            (Diagonal { i, .. }, Diagonal { i: j, .. }) => d.s(*i, *j).powu(k as u32) * inv_k,
        }
    }
}

/// Orbifold S-matrix over [`orbifold_labels`], filled symmetrically.
pub fn assemble_orbifold_s(
    d: &ModularDatum,
    k: usize,
) -> Result<(Vec<OrbifoldModuleLabel>, CMatrix)> {
    let labels = orbifold_labels(d.rank(), k)?;
    let asm = Assembler::new(d, k)?;
    let n = labels.len();
    let mut s = linalg::zeros(n);
    for x in 0..n {
        for y in x..n {
            let z = asm.entry(&labels[x], &labels[y]);
            s[[x, y]] = z;
            s[[y, x]] = z;
        }
    }
    Ok((labels, s))
}

/// `T_L = e^{2πi(h_L - kc/24)}` over [`orbifold_labels`].
pub fn orbifold_t(d: &ModularDatum, k: usize, conv: Convention) -> Result<Vec<Phase>> {
    let kc = d.central_charge() * k as i64;
    Ok(enumerate_orbifold_modules(d, k, conv)?
        .into_iter()
        .map(|(_, w)| Phase::new(w - kc / 24))
        .collect())
}

#[derive(Clone, Debug)]
pub struct OrbifoldDatum {
    /// Central charge `k·c`, weights mod 1, assembled S.
    pub datum: ModularDatum,
    pub labels: Vec<OrbifoldModuleLabel>,
    pub k: usize,
    pub convention: Convention,
    pub parent_rank: usize,
    pub parent_central_charge: Rational,
    pub report: ValidationReport,
}

impl OrbifoldDatum {
    pub fn weights(&self) -> Vec<Rational> {
        self.datum.modules().iter().map(|m| m.weight).collect()
    }

    pub fn index_of(&self, label: &OrbifoldModuleLabel) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// The datum document, each module tagged with `label_kind` and its parameters.
    pub fn to_doc(&self) -> DatumDoc {
        let mut doc = DatumDoc::from_datum(&self.datum);
        for (m, l) in doc.modules.iter_mut().zip(&self.labels) {
            m.label_kind = Some(l.kind().to_string());
            m.params = Some(l.params_json());
        }
        doc.orbifold = Some(OrbifoldMeta {
            k: self.k as i64,
            convention: self.convention.name().to_string(),
            parent_rank: self.parent_rank,
            parent_central_charge: self.parent_central_charge.to_string(),
        });
        doc
    }

    pub fn to_json(&self) -> String {
        io::to_json_pretty(&self.to_doc())
    }
}

pub mod checks {
    pub const MODULE_COUNT: &str = "module_count";
    pub const VACUUM_ENTRY: &str = "vacuum_entry";
    pub const GLOBAL_DIMENSION: &str = "global_dimension";
    pub const EIGENCOMPONENT_INDEPENDENCE: &str = "eigencomponent_independence";
}

/// Full pipeline: labels, weights, S, T, and a validation report of the result.
pub fn build_orbifold_datum(
    d: &ModularDatum,
    k: usize,
    conv: Convention,
    tol: Tolerances,
) -> Result<OrbifoldDatum> {
    let (labels, s) = assemble_orbifold_s(d, k)?;
    let modules = labels
        .iter()
        .map(|l| ModuleInfo::new(l.display_with(d), label_weight(d, k, l, conv)))
        .collect();
    let datum = ModularDatum::new(d.central_charge() * k as i64, modules, s)?;
    let mut report = modular_data::validate_modular_datum(&datum, tol);
    report.extend(orbifold_checks(d, k, &labels, &datum, tol));
    Ok(OrbifoldDatum {
        datum,
        labels,
        k,
        convention: conv,
        parent_rank: d.rank(),
        parent_central_charge: d.central_charge(),
        report,
    })
}

/// Builds with `preferred`; if the modular relation fails, retries with the flipped
/// convention and keeps whichever passes (or `preferred` if neither does).
pub fn build_orbifold_datum_auto(
    d: &ModularDatum,
    k: usize,
    preferred: Convention,
    tol: Tolerances,
) -> Result<OrbifoldDatum> {
    let first = build_orbifold_datum(d, k, preferred, tol)?;
    if modular_relation_passes(&first) {
        return Ok(first);
    }
    let second = build_orbifold_datum(d, k, preferred.flipped(), tol)?;
    Ok(if modular_relation_passes(&second) {
        second
    } else {
        first
    })
}

fn modular_relation_passes(o: &OrbifoldDatum) -> bool {
    o.report
        .get(modular_data::checks::MODULAR_RELATION)
        .is_some_and(|c| c.passed)
}

fn orbifold_checks(
    parent: &ModularDatum,
    k: usize,
    labels: &[OrbifoldModuleLabel],
    datum: &ModularDatum,
    tol: Tolerances,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    let expected = orbifold_module_count(parent.rank(), k);
    report.push(CheckResult::new(
        checks::MODULE_COUNT,
        expected == labels.len(),
        (expected as f64 - labels.len() as f64).abs(),
        0.0,
    ));

    let s00 = parent.s(0, 0);
    let want = s00.powu(k as u32) / k as f64;
    let r = (datum.s(0, 0) - want).norm();
    report.push(CheckResult::new(
        checks::VACUUM_ENTRY,
        r <= tol.eps,
        r,
        tol.eps,
    ));

    let (_, glob_parent) = modular_data::quantum_dimensions(parent);
    let (_, glob) = modular_data::quantum_dimensions(datum);
    let want = (k * k) as f64 * glob_parent.powi(k as i32);
    let r = (glob - want).abs() / want.max(1.0);
    report.push(CheckResult::new(
        checks::GLOBAL_DIMENSION,
        r <= tol.eps_int,
        r,
        tol.eps_int,
    ));

    // Rows of Diagonal(i, a) restricted to diagonal/off-diagonal columns do not depend on a.
    let s = datum.s_matrix();
    let mut worst = 0.0f64;
    let untwisted: Vec<usize> = (0..labels.len())
        .filter(|&y| !matches!(labels[y], OrbifoldModuleLabel::Twisted { .. }))
        .collect();
    for (x, lx) in labels.iter().enumerate() {
        if let OrbifoldModuleLabel::Diagonal { i, a } = lx {
            if *a == 0 {
                continue;
            }
            let base = labels
                .iter()
                .position(|l| *l == OrbifoldModuleLabel::Diagonal { i: *i, a: 0 })
                .unwrap();
            for &y in &untwisted {
                worst = worst.max((s[[x, y]] - s[[base, y]]).norm());
            }
        }
    }
    report.push(CheckResult::new(
        checks::EIGENCOMPONENT_INDEPENDENCE,
        worst <= tol.eps,
        worst,
        tol.eps,
    ));
    report
}

/// Orbit, stabilizer, character and cross-block data of the permutation orbifold as
/// input for the generic restricted S-matrix evaluator.
///
/// Orbits are listed in the order of [`orbifold_labels`] (one per diagonal module
/// `i`, off-diagonal orbit, and twisted pair `(r, i)`), so the evaluator's output
/// is indexed exactly like [`assemble_orbifold_s`].
pub fn restricted_input(d: &ModularDatum, k: usize) -> Result<RestrictedInput> {
    check_prime(k)?;
    let group = FiniteAbelianGroup::cyclic(k as i64)?;
    let n = d.rank();
    let all: Vec<Vec<i64>> = group.elements();
    // λ_a(g^x) = e^{-2πi a x/k}: the dual characters of Z_k in order a = 0..k.
    let full_chars = group.dual_characters();
    let trivial = CharacterTable::trivial(&group);

    #[derive(Clone)]
    enum Orbit {
        Diag(usize),
        Off(Vec<usize>),
        Tw(usize, usize),
    }
    let mut orbits = Vec::new();
    let mut kinds = Vec::new();
    for i in 0..n {
        orbits.push(OrbitSpec {
            label: format!("({})^k", d.label(i)),
            twist: vec![0],
            characters: full_chars.clone(),
        });
        kinds.push(Orbit::Diag(i));
    }
    for l in orbifold_labels(n, k)? {
        if let OrbifoldModuleLabel::OffDiagonal(t) = &l {
            orbits.push(OrbitSpec {
                label: l.display_with(d),
                twist: vec![0],
                characters: trivial.clone(),
            });
            kinds.push(Orbit::Off(t.clone()));
        }
    }
    for r in 1..k {
        for i in 0..n {
            orbits.push(OrbitSpec {
                label: format!("T_g{r}({})", d.label(i)),
                twist: vec![r as i64],
                characters: full_chars.clone(),
            });
            kinds.push(Orbit::Tw(r, i));
        }
    }

    // S-matrix of V^{⊗k} and its twisted sectors, the entries S_{M^i, M^j∘κ}.
    let tensor_s = |u: &[usize], t: &[usize]| -> Complex {
        u.iter().zip(t).map(|(&x, &y)| d.s(x, y)).product()
    };
    let rotate = |t: &[usize], kappa: usize| -> Vec<usize> {
        // M^{t_1…t_k} ∘ g^κ = M^{t_{1+κ}…t_{k+κ}}
        (0..k).map(|j| t[(j + kappa) % k]).collect()
    };
    let asm = Assembler::new(d, k)?;
    let constant = |i: usize| vec![i; k];

    let mut blocks = Vec::new();
    for (oi, ki) in kinds.iter().enumerate() {
        for (oj, kj) in kinds.iter().enumerate() {
            let (transversal, values): (Vec<Vec<i64>>, Vec<Complex>) = match (ki, kj) {
                (Orbit::Off(u), Orbit::Off(t)) => all
                    .iter()
                    .map(|kap| (kap.clone(), tensor_s(u, &rotate(t, kap[0] as usize))))
                    .unzip(),
                (Orbit::Diag(i), Orbit::Off(t)) => all
                    .iter()
                    .map(|kap| {
                        (
                            kap.clone(),
                            tensor_s(&constant(*i), &rotate(t, kap[0] as usize)),
                        )
                    })
                    .unzip(),
                (Orbit::Off(u), Orbit::Diag(j)) => {
                    (vec![vec![0]], vec![tensor_s(u, &constant(*j))])
                }
                (Orbit::Diag(i), Orbit::Diag(j)) => {
                    (vec![vec![0]], vec![tensor_s(&constant(*i), &constant(*j))])
                }
                (Orbit::Diag(i), Orbit::Tw(_, j)) | (Orbit::Tw(_, i), Orbit::Diag(j)) => {
                    (vec![vec![0]], vec![d.s(*i, *j)])
                }
                (Orbit::Tw(r, i), Orbit::Tw(s, j)) => {
                    (vec![vec![0]], vec![asm.block(*r, *s)[[*i, *j]]])
                }
                (Orbit::Tw(..), Orbit::Off(_)) | (Orbit::Off(_), Orbit::Tw(..)) => continue,
            };
            blocks.push(CrossBlock {
                i: oi,
                j: oj,
                transversal,
                values,
            });
        }
    }
    Ok(RestrictedInput {
        group,
        orbits,
        blocks,
    })
}
