//! Restricted S-matrix of `V^G` for a finite abelian group `G`.
//!
//! Inputs are explicit data: for every orbit representative `M^i` its twist `g_i`,
//! its stabilizer `G_{M^i}` with a table of (possibly projective) characters, and
//! for every ordered pair of orbits a transversal `C_{i,j}` together with the
//! S-matrix entries `S_{M^i, M^j∘κ}`, `κ ∈ C_{i,j}`. The assembled entry is
//!
//! ```text
//! S_{(i,λ),(j,μ)} = 1/|G_{M^i}| Σ_{κ ∈ C_{i,j}} S_{M^i, M^j∘κ} · conj(λ(κ⁻¹ g_j κ)) · μ(κ g_i⁻¹ κ⁻¹)
//! ```
//!
//! and zero when `C_{i,j}` is empty. Projective tables are taken as given: they
//! must already follow the cocycle convention `α_{M∘k}(k⁻¹ak, k⁻¹bk) = α_M(a, b)`;
//! only orthogonality and dimensions are checked.

use std::collections::{HashMap, HashSet};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{self, EntryDoc};
use crate::linalg::{self, CMatrix, Complex};
use crate::phase::Phase;
use crate::report::{CheckResult, ValidationReport};

/// Residue tuple, one coordinate per invariant factor.
pub type Element = Vec<i64>;

/// `Z_{n_1} × … × Z_{n_r}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAbelianGroup {
    factors: Vec<i64>,
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<i64>) -> Result<Self> {
        if let Some(f) = factors.iter().find(|&&f| f <= 0) {
            return Err(Error::GroupData(format!(
                "invariant factor {f} is not positive"
            )));
        }
        Ok(FiniteAbelianGroup { factors })
    }

    pub fn cyclic(k: i64) -> Result<Self> {
        FiniteAbelianGroup::new(vec![k])
    }

    pub fn factors(&self) -> &[i64] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.factors.iter().product::<i64>() as usize
    }

    pub fn identity(&self) -> Element {
        vec![0; self.factors.len()]
    }

    /// All elements in lexicographic order.
    pub fn elements(&self) -> Vec<Element> {
        let mut out = vec![Vec::new()];
        for &f in &self.factors {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..f).map(move |x| {
                        let mut e = prefix.clone();
                        e.push(x);
                        e
                    })
                })
                .collect();
        }
        out
    }

    pub fn is_element(&self, x: &[i64]) -> bool {
        x.len() == self.factors.len()
            && x.iter()
                .zip(&self.factors)
                .all(|(v, f)| (0..*f).contains(v))
    }

    fn check(&self, x: &[i64]) -> Result<()> {
        if self.is_element(x) {
            Ok(())
        } else {
            Err(Error::GroupData(format!(
                "{x:?} is not an element of Z{:?}",
                self.factors
            )))
        }
    }

    pub fn op(&self, x: &[i64], y: &[i64]) -> Element {
        x.iter()
            .zip(y)
            .zip(&self.factors)
            .map(|((a, b), f)| (a + b).rem_euclid(*f))
            .collect()
    }

    pub fn inverse(&self, x: &[i64]) -> Element {
        x.iter()
            .zip(&self.factors)
            .map(|(a, f)| (-a).rem_euclid(*f))
            .collect()
    }

    /// `κ⁻¹ x κ`; trivial here, kept so the assembly reads like the general formula.
    pub fn conjugate(&self, x: &[i64], kappa: &[i64]) -> Element {
        self.op(&self.op(&self.inverse(kappa), x), kappa)
    }

    /// Irreducible characters `χ_m(x) = e^{-2πi Σ m_l x_l / n_l}`, one per `m ∈ G`,
    /// in the order of [`elements`](Self::elements).
    pub fn dual_characters(&self) -> CharacterTable {
        let elements = self.elements();
        let rows = elements
            .iter()
            .map(|m| Character {
                label: format!("χ{}", fmt_element(m)),
                dim: 1,
                values: elements
                    .iter()
                    .map(|x| self.pairing(m, x).to_complex())
                    .collect(),
            })
            .collect();
        CharacterTable { elements, rows }
    }

    fn pairing(&self, m: &[i64], x: &[i64]) -> Phase {
        m.iter()
            .zip(x)
            .zip(&self.factors)
            .fold(Phase::one(), |acc, ((a, b), f)| {
                acc * Phase::from_fraction(-a * b, *f)
            })
    }
}

fn fmt_element(x: &[i64]) -> String {
    let parts: Vec<String> = x.iter().map(i64::to_string).collect();
    format!("({})", parts.join(","))
}

#[derive(Clone, Debug)]
pub struct Character {
    pub label: String,
    /// `dim W_λ`.
    pub dim: u32,
    /// Values on the stabilizer elements, in table order.
    pub values: Vec<Complex>,
}

/// Characters of a stabilizer subgroup `H`, tabulated on an explicit list of its elements.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    pub elements: Vec<Element>,
    pub rows: Vec<Character>,
}

impl CharacterTable {
    pub fn trivial(group: &FiniteAbelianGroup) -> Self {
        CharacterTable {
            elements: vec![group.identity()],
            rows: vec![Character {
                label: "1".into(),
                dim: 1,
                values: vec![Complex::one()],
            }],
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn position(&self, x: &[i64]) -> Option<usize> {
        self.elements.iter().position(|e| e.as_slice() == x)
    }
}

#[derive(Clone, Debug)]
pub struct OrbitSpec {
    pub label: String,
    /// `g_i`: the representative is a `g_i`-twisted module.
    pub twist: Element,
    /// Stabilizer `G_{M^i}` and its characters.
    pub characters: CharacterTable,
}

/// Transversal `C_{i,j}` and the entries `S_{M^i, M^j∘κ}` for `κ` in it.
#[derive(Clone, Debug)]
pub struct CrossBlock {
    pub i: usize,
    pub j: usize,
    pub transversal: Vec<Element>,
    pub values: Vec<Complex>,
}

#[derive(Clone, Debug)]
pub struct RestrictedInput {
    pub group: FiniteAbelianGroup,
    pub orbits: Vec<OrbitSpec>,
    pub blocks: Vec<CrossBlock>,
}

/// Assembled matrix indexed by `(orbit, character)` pairs, orbit-major.
#[derive(Clone, Debug)]
pub struct RestrictedS {
    pub index: Vec<(usize, usize)>,
    pub labels: Vec<String>,
    pub s: CMatrix,
}

pub mod checks {
    pub const CHARACTER_ORTHOGONALITY: &str = "character_orthogonality";
    pub const DIMENSION_SUM: &str = "dimension_sum";
    pub const TWIST_IN_STABILIZER: &str = "twist_in_stabilizer";
    pub const STABILIZER_SUBGROUP: &str = "stabilizer_subgroup";
    pub const CONJUGATION_INVARIANCE: &str = "conjugation_invariance";
    pub const OUTPUT_SYMMETRY: &str = "output_symmetry";
}

/// Orthogonality `Σ_h λ(h) conj(μ(h)) = |H| δ_{λμ}`, `Σ_λ (dim W_λ)² = |H|`, `g_i ∈ H_i`,
/// and closure of each stabilizer.
pub fn validate_group_data(
    group: &FiniteAbelianGroup,
    orbits: &[OrbitSpec],
    eps: f64,
) -> ValidationReport {
    let mut ortho = 0.0f64;
    let mut ortho_detail = None;
    let mut dim_res = 0.0f64;
    let mut twist_ok = true;
    let mut twist_detail = None;
    let mut subgroup_ok = true;
    let mut subgroup_detail = None;

    for (idx, orbit) in orbits.iter().enumerate() {
        let table = &orbit.characters;
        let h = table.order();

        let members: HashSet<&Element> = table.elements.iter().collect();
        let closed = members.len() == h
            && table.elements.iter().all(|x| group.is_element(x))
            && members.contains(&group.identity())
            && table.elements.iter().all(|x| {
                table
                    .elements
                    .iter()
                    .all(|y| members.contains(&group.op(x, y)))
            });
        if !closed {
            subgroup_ok = false;
            subgroup_detail.get_or_insert(format!(
                "orbit {idx} ({}): stabilizer is not a subgroup",
                orbit.label
            ));
        }
        if !members.contains(&orbit.twist) {
            twist_ok = false;
            twist_detail.get_or_insert(format!(
                "orbit {idx} ({}): twist {:?} not in stabilizer",
                orbit.label, orbit.twist
            ));
        }

        if table.rows.iter().any(|r| r.values.len() != h) {
            ortho = f64::INFINITY;
            ortho_detail.get_or_insert(format!(
                "orbit {idx} ({}): character row length differs from |H|",
                orbit.label
            ));
            continue;
        }
        for (a, ra) in table.rows.iter().enumerate() {
            for (b, rb) in table.rows.iter().enumerate() {
                let inner: Complex = ra
                    .values
                    .iter()
                    .zip(&rb.values)
                    .map(|(x, y)| x * y.conj())
                    .sum();
                let expected = if a == b { h as f64 } else { 0.0 };
                let r = (inner - Complex::new(expected, 0.0)).norm();
                if r > ortho {
                    ortho = r;
                    if r > eps {
                        ortho_detail =
                            Some(format!("orbit {idx} ({}): rows {a}, {b}", orbit.label));
                    }
                }
            }
        }
        let dims: u64 = table.rows.iter().map(|r| (r.dim as u64).pow(2)).sum();
        dim_res = dim_res.max((dims as f64 - h as f64).abs());
    }

    let mut report = ValidationReport::default();
    let mut c = CheckResult::new(checks::CHARACTER_ORTHOGONALITY, ortho <= eps, ortho, eps);
    if let Some(d) = ortho_detail.filter(|_| ortho > eps) {
        c = c.with_detail(d);
    }
    report.push(c);
    report.push(CheckResult::new(
        checks::DIMENSION_SUM,
        dim_res <= eps,
        dim_res,
        eps,
    ));
    let mut c = CheckResult::new(checks::TWIST_IN_STABILIZER, twist_ok, 0.0, 0.0);
    if let Some(d) = twist_detail {
        c = c.with_detail(d);
    }
    report.push(c);
    let mut c = CheckResult::new(checks::STABILIZER_SUBGROUP, subgroup_ok, 0.0, 0.0);
    if let Some(d) = subgroup_detail {
        c = c.with_detail(d);
    }
    report.push(c);
    report
}

/// Within one block, transversal elements that differ by an element of `G_{M^i}` name
/// modules related by conjugation, so `S_{M,N} = S_{M∘h, N∘h}` forces equal entries.
pub fn validate_blocks(input: &RestrictedInput, eps: f64) -> ValidationReport {
    let mut worst = 0.0f64;
    let mut detail = None;
    for block in &input.blocks {
        let Some(orbit) = input.orbits.get(block.i) else {
            continue;
        };
        let stab = &orbit.characters;
        for (x, kx) in block.transversal.iter().enumerate() {
            for (y, ky) in block.transversal.iter().enumerate().skip(x + 1) {
                let quotient = input.group.op(ky, &input.group.inverse(kx));
                if stab.position(&quotient).is_none() {
                    continue;
                }
                let (Some(vx), Some(vy)) = (block.values.get(x), block.values.get(y)) else {
                    continue;
                };
                let r = (vx - vy).norm();
                if r > worst {
                    worst = r;
                    if r > eps {
                        detail = Some(format!(
                            "block ({}, {}): κ = {:?} vs {:?}",
                            block.i, block.j, kx, ky
                        ));
                    }
                }
            }
        }
    }
    let mut report = ValidationReport::default();
    let mut c = CheckResult::new(checks::CONJUGATION_INVARIANCE, worst <= eps, worst, eps);
    if let Some(d) = detail {
        c = c.with_detail(d);
    }
    report.push(c);
    report
}

fn block_map(input: &RestrictedInput) -> Result<HashMap<(usize, usize), &CrossBlock>> {
    let n = input.orbits.len();
    let mut map = HashMap::new();
    for block in &input.blocks {
        if block.i >= n || block.j >= n {
            return Err(Error::MissingBlock {
                i: block.i,
                j: block.j,
                reason: format!("only {n} orbits are defined"),
            });
        }
        if block.values.len() != block.transversal.len() {
            return Err(Error::MissingBlock {
                i: block.i,
                j: block.j,
                reason: format!(
                    "{} transversal elements but {} S-values",
                    block.transversal.len(),
                    block.values.len()
                ),
            });
        }
        for kappa in &block.transversal {
            input.group.check(kappa)?;
        }
        if map.insert((block.i, block.j), block).is_some() {
            return Err(Error::GroupData(format!(
                "duplicate block ({}, {})",
                block.i, block.j
            )));
        }
    }
    Ok(map)
}

fn char_value(table: &CharacterTable, row: usize, x: &[i64], orbit: &OrbitSpec) -> Result<Complex> {
    let pos = table.position(x).ok_or_else(|| {
        Error::GroupData(format!(
            "{x:?} is not in the stabilizer of orbit {:?}",
            orbit.label
        ))
    })?;
    table.rows[row]
        .values
        .get(pos)
        .copied()
        .ok_or_else(|| Error::GroupData(format!("short character row in orbit {:?}", orbit.label)))
}

/// `S = Sᵀ` on the evaluated matrix. Holds whenever the supplied blocks are consistent.
pub fn output_symmetry(out: &RestrictedS, eps: f64) -> CheckResult {
    let r = linalg::max_abs_diff(&out.s, &out.s.t().to_owned());
    CheckResult::new(checks::OUTPUT_SYMMETRY, r <= eps, r, eps)
}

/// Evaluates the restricted S-matrix over all `(orbit, character)` pairs.
pub fn assemble_restricted_s(input: &RestrictedInput) -> Result<RestrictedS> {
    let group = &input.group;
    for orbit in &input.orbits {
        group.check(&orbit.twist)?;
    }
    let blocks = block_map(input)?;

    let mut index = Vec::new();
    let mut labels = Vec::new();
    for (oi, orbit) in input.orbits.iter().enumerate() {
        for (ci, ch) in orbit.characters.rows.iter().enumerate() {
            index.push((oi, ci));
            labels.push(format!("{}[{}]", orbit.label, ch.label));
        }
    }

    let n = index.len();
    let mut s = linalg::zeros(n);
    for (x, &(i, lam)) in index.iter().enumerate() {
        let oi = &input.orbits[i];
        let norm = 1.0 / oi.characters.order() as f64;
        let twist_i_inv = group.inverse(&oi.twist);
        for (y, &(j, mu)) in index.iter().enumerate() {
            let Some(block) = blocks.get(&(i, j)) else {
                continue;
            };
            let oj = &input.orbits[j];
            let mut acc = Complex::zero();
            for (kappa, value) in block.transversal.iter().zip(&block.values) {
                let gj = group.conjugate(&oj.twist, kappa);
                let gi = group.conjugate(&twist_i_inv, &group.inverse(kappa));
                let l = char_value(&oi.characters, lam, &gj, oi)?;
                let m = char_value(&oj.characters, mu, &gi, oj)?;
                acc += value * l.conj() * m;
            }
            s[[x, y]] = acc * norm;
        }
    }
    Ok(RestrictedS { index, labels, s })
}

/// Row of orbit 0 (the vacuum `V`, twist 1, stabilizer `G`) from the short form
/// `S_{(0,λ),(j,μ)} = S_{V,M^j} · λ(g_j⁻¹) · dim W_μ / |G_{M^j}|`.
///
/// Returns the rows for every `λ` of orbit 0, in the same column order as
/// [`assemble_restricted_s`].
pub fn vacuum_rows(input: &RestrictedInput) -> Result<Vec<Vec<Complex>>> {
    let group = &input.group;
    let blocks = block_map(input)?;
    let vac = input
        .orbits
        .first()
        .ok_or_else(|| Error::GroupData("no orbits".into()))?;
    let mut rows = Vec::new();
    for lam in 0..vac.characters.rows.len() {
        let mut row = Vec::new();
        for (j, oj) in input.orbits.iter().enumerate() {
            let s0j = blocks
                .get(&(0, j))
                .and_then(|b| b.values.first().copied())
                .ok_or_else(|| Error::MissingBlock {
                    i: 0,
                    j,
                    reason: "the vacuum orbit meets every orbit".into(),
                })?;
            let l = char_value(&vac.characters, lam, &group.inverse(&oj.twist), vac)?;
            for ch in &oj.characters.rows {
                row.push(s0j * l * ch.dim as f64 / oj.characters.order() as f64);
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Largest entrywise difference between the matrices assembled from two inputs that
/// differ only in their choice of transversals.
pub fn compare_transversal_choices(a: &RestrictedInput, b: &RestrictedInput) -> Result<f64> {
    let sa = assemble_restricted_s(a)?;
    let sb = assemble_restricted_s(b)?;
    if sa.s.dim() != sb.s.dim() {
        return Err(Error::GroupData(
            "inputs index different module sets".into(),
        ));
    }
    Ok(linalg::max_abs_diff(&sa.s, &sb.s))
}

/// Holomorphic `V` with abelian `G`: one twisted module `V(g)` per `g ∈ G`, each with
/// stabilizer `G` and the full dual group as characters.
#[derive(Clone, Debug)]
pub struct HolomorphicInput {
    pub group: FiniteAbelianGroup,
    /// `S_{V(g), V(h)}` indexed by the lexicographic element order of `group`.
    pub s: CMatrix,
}

impl HolomorphicInput {
    pub fn to_restricted(&self) -> Result<RestrictedInput> {
        let elements = self.group.elements();
        if self.s.dim() != (elements.len(), elements.len()) {
            return Err(Error::GroupData(format!(
                "twisted S table is {:?} but |G| = {}",
                self.s.dim(),
                elements.len()
            )));
        }
        let chars = self.group.dual_characters();
        let orbits = elements
            .iter()
            .map(|g| OrbitSpec {
                label: format!("V{}", fmt_element(g)),
                twist: g.clone(),
                characters: chars.clone(),
            })
            .collect();
        let mut blocks = Vec::new();
        for (i, _) in elements.iter().enumerate() {
            for (j, _) in elements.iter().enumerate() {
                blocks.push(CrossBlock {
                    i,
                    j,
                    transversal: vec![self.group.identity()],
                    values: vec![self.s[[i, j]]],
                });
            }
        }
        Ok(RestrictedInput {
            group: self.group.clone(),
            orbits,
            blocks,
        })
    }
}

/// `S_{V(g)_λ, V(h)_μ} = S_{V(g),V(h)} · conj(λ(h)) · μ(g⁻¹) / |G|`.
pub fn holomorphic_assemble(input: &HolomorphicInput) -> Result<RestrictedS> {
    assemble_restricted_s(&input.to_restricted()?)
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CharacterDoc {
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub dim: Option<u32>,
    pub values: Vec<EntryDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitDoc {
    pub label: String,
    pub twist: Element,
    /// Defaults to the whole group.
    #[serde(default)]
    pub stabilizer: Option<Vec<Element>>,
    /// Defaults to the dual group when the stabilizer is all of `G` or trivial.
    #[serde(default)]
    pub characters: Option<Vec<CharacterDoc>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockDoc {
    pub i: usize,
    pub j: usize,
    pub transversal: Vec<Element>,
    pub values: Vec<EntryDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RestrictedDoc {
    pub group: Vec<i64>,
    pub orbits: Vec<OrbitDoc>,
    #[serde(default)]
    pub blocks: Vec<BlockDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HolomorphicDoc {
    pub group: Vec<i64>,
    #[serde(rename = "S")]
    pub s: Vec<Vec<EntryDoc>>,
}

/// Either form of input accepted by the `restricted` command.
#[derive(Clone, Debug)]
pub enum RestrictedSpec {
    General(RestrictedInput),
    Holomorphic(HolomorphicInput),
}

impl RestrictedSpec {
    pub fn to_input(&self) -> Result<RestrictedInput> {
        match self {
            RestrictedSpec::General(i) => Ok(i.clone()),
            RestrictedSpec::Holomorphic(h) => h.to_restricted(),
        }
    }
}

/// Parses a spec document. `"kind": "holomorphic"` selects the holomorphic form.
pub fn parse_restricted_spec(text: &str) -> Result<RestrictedSpec> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let kind = value
        .get("kind")
        .and_then(|k| k.as_str())
        .unwrap_or("general");
    match kind {
        "general" => {
            let doc: RestrictedDoc = serde_json::from_value(value)?;
            Ok(RestrictedSpec::General(doc.to_input()?))
        }
        "holomorphic" => {
            let doc: HolomorphicDoc = serde_json::from_value(value)?;
            Ok(RestrictedSpec::Holomorphic(HolomorphicInput {
                group: FiniteAbelianGroup::new(doc.group)?,
                s: io::parse_matrix(&doc.s)?,
            }))
        }
        other => Err(Error::Parse(format!(
            "unknown restricted spec kind {other:?}"
        ))),
    }
}

impl RestrictedDoc {
    pub fn to_input(&self) -> Result<RestrictedInput> {
        let group = FiniteAbelianGroup::new(self.group.clone())?;
        let mut orbits = Vec::new();
        for o in &self.orbits {
            let elements = o.stabilizer.clone().unwrap_or_else(|| group.elements());
            for e in &elements {
                group.check(e)?;
            }
            let characters = match &o.characters {
                Some(rows) => CharacterTable {
                    elements,
                    rows: rows
                        .iter()
                        .enumerate()
                        .map(|(n, r)| {
                            let values = r
                                .values
                                .iter()
                                .map(EntryDoc::parse)
                                .collect::<Result<Vec<_>>>()?;
                            let dim = match r.dim {
                                Some(d) => d,
                                None => values.first().map_or(1, |v| v.re.round() as u32),
                            };
                            Ok(Character {
                                label: r.label.clone().unwrap_or_else(|| n.to_string()),
                                dim,
                                values,
                            })
                        })
                        .collect::<Result<_>>()?,
                },
                None if elements.len() == group.order() => {
                    let mut t = group.dual_characters();
                    // Re-tabulate on the order the document listed.
                    let full = group.elements();
                    for row in &mut t.rows {
                        row.values = elements
                            .iter()
                            .map(|e| row.values[full.iter().position(|f| f == e).unwrap()])
                            .collect();
                    }
                    t.elements = elements;
                    t
                }
                None if elements.len() == 1 => CharacterTable::trivial(&group),
                None => {
                    return Err(Error::GroupData(format!(
                        "orbit {:?}: characters are required for a proper nontrivial stabilizer",
                        o.label
                    )))
                }
            };
            orbits.push(OrbitSpec {
                label: o.label.clone(),
                twist: o.twist.clone(),
                characters,
            });
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                Ok(CrossBlock {
                    i: b.i,
                    j: b.j,
                    transversal: b.transversal.clone(),
                    values: b
                        .values
                        .iter()
                        .map(EntryDoc::parse)
                        .collect::<Result<_>>()?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(RestrictedInput {
            group,
            orbits,
            blocks,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RestrictedOutputDoc {
    pub labels: Vec<String>,
    #[serde(rename = "S")]
    pub s: Vec<Vec<EntryDoc>>,
    pub report: ValidationReport,
}

impl RestrictedOutputDoc {
    pub fn new(out: &RestrictedS, report: ValidationReport) -> Self {
        RestrictedOutputDoc {
            labels: out.labels.clone(),
            s: io::matrix_doc(&out.s),
            report,
        }
    }
}
