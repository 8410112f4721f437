//! Modular data `(c, {h_i}, S)` of a rational VOA.
//!
//! Index 0 is always the vacuum module, with weight 0. The T-matrix is
//! `diag(e^{2πi(h_i - c/24)})` and is kept as exact phases.

use std::collections::HashSet;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Complex};
use crate::phase::{Phase, Rational};
use crate::report::{CheckResult, ValidationReport};

pub const DEFAULT_EPS: f64 = 1e-9;
pub const DEFAULT_EPS_INT: f64 = 1e-6;

/// Below this magnitude an entry of the vacuum row is treated as zero.
const VACUUM_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Matrix identities (unitarity, symmetry, modular relations).
    pub eps: f64,
    /// Distance of Verlinde coefficients from the nearest nonnegative integer.
    pub eps_int: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps: DEFAULT_EPS,
            eps_int: DEFAULT_EPS_INT,
        }
    }
}

impl Tolerances {
    /// Defaults, overridden by `MODORB_EPS` / `MODORB_EPS_INT` when set and parseable.
    pub fn from_env() -> Self {
        let read = |key: &str| {
            std::env::var(key)
                .ok()
                .and_then(|v| v.trim().parse::<f64>().ok())
        };
        let mut tol = Tolerances::default();
        if let Some(e) = read("MODORB_EPS") {
            tol.eps = e;
        }
        if let Some(e) = read("MODORB_EPS_INT") {
            tol.eps_int = e;
        }
        tol
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModuleInfo {
    pub label: String,
    /// Conformal weight, or its class mod 1 for orbifold outputs.
    #[serde(serialize_with = "ser_rational")]
    pub weight: Rational,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl ModuleInfo {
    pub fn new(label: impl Into<String>, weight: Rational) -> Self {
        ModuleInfo {
            label: label.into(),
            weight,
        }
    }
}

/// Central charge, irreducible modules with their weights, and the S-matrix.
#[derive(Clone, Debug)]
pub struct ModularDatum {
    central_charge: Rational,
    modules: Vec<ModuleInfo>,
    s: CMatrix,
}

impl ModularDatum {
    /// Checks the structural invariants only; the numeric identities are the job of
    /// [`validate_modular_datum`].
    pub fn new(central_charge: Rational, modules: Vec<ModuleInfo>, s: CMatrix) -> Result<Self> {
        if modules.is_empty() {
            return Err(Error::Empty);
        }
        let (rows, cols) = s.dim();
        if rows != modules.len() || cols != modules.len() {
            return Err(Error::DimensionMismatch {
                modules: modules.len(),
                rows,
                cols,
            });
        }
        let mut seen = HashSet::new();
        for m in &modules {
            if !seen.insert(m.label.as_str()) {
                return Err(Error::DuplicateLabel(m.label.clone()));
            }
        }
        if !modules[0].weight.is_zero() {
            return Err(Error::VacuumWeight(modules[0].weight));
        }
        if let Some(((row, col), _)) = s
            .indexed_iter()
            .find(|(_, z)| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite { row, col });
        }
        Ok(ModularDatum {
            central_charge,
            modules,
            s,
        })
    }

    pub fn central_charge(&self) -> Rational {
        self.central_charge
    }

    pub fn modules(&self) -> &[ModuleInfo] {
        &self.modules
    }

    pub fn rank(&self) -> usize {
        self.modules.len()
    }

    pub fn s_matrix(&self) -> &CMatrix {
        &self.s
    }

    pub fn s(&self, i: usize, j: usize) -> Complex {
        self.s[[i, j]]
    }

    pub fn weight(&self, i: usize) -> Rational {
        self.modules[i].weight
    }

    pub fn label(&self, i: usize) -> &str {
        &self.modules[i].label
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.modules.iter().position(|m| m.label == label)
    }

    pub fn t_matrix(&self) -> Vec<Phase> {
        t_matrix(self)
    }

    /// Diagonal of T as complex numbers.
    pub fn t_diagonal(&self) -> Vec<Complex> {
        t_matrix(self).iter().map(Phase::to_complex).collect()
    }
}

/// `T_ii = e^{2πi(h_i - c/24)}`.
pub fn t_matrix(d: &ModularDatum) -> Vec<Phase> {
    let shift = d.central_charge / 24;
    d.modules
        .iter()
        .map(|m| Phase::new(m.weight - shift))
        .collect()
}

/// Fusion multiplicities `N_{ij}^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FusionTensor {
    rank: usize,
    data: Vec<u32>,
}

impl FusionTensor {
    /// `data[(i·n + j)·n + m] = N_{ij}^m`.
    pub fn from_raw(rank: usize, data: Vec<u32>) -> Self {
        assert_eq!(
            data.len(),
            rank * rank * rank,
            "fusion tensor needs rank^3 entries"
        );
        FusionTensor { rank, data }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, i: usize, j: usize, m: usize) -> u32 {
        self.data[(i * self.rank + j) * self.rank + m]
    }

    /// Nonzero `(m, N_{ij}^m)` in increasing `m`.
    pub fn products(&self, i: usize, j: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        (0..self.rank)
            .map(move |m| (m, self.get(i, j, m)))
            .filter(|(_, n)| *n != 0)
    }
}

/// Rounded fusion tensor and the worst distance of a raw coefficient from the
/// nonnegative integer it was rounded to.
#[derive(Clone, Debug)]
pub struct Fusion {
    pub tensor: FusionTensor,
    pub residual: f64,
}

/// `N_{ij}^m = Σ_l S_{il} S_{jl} conj(S_{ml}) / S_{0l}`.
pub fn verlinde_fusion(d: &ModularDatum) -> Result<Fusion> {
    let n = d.rank();
    let s = &d.s;
    let mut inv_vac = Vec::with_capacity(n);
    for l in 0..n {
        let v = s[[0, l]];
        if v.norm() < VACUUM_FLOOR {
            return Err(Error::SingularVacuumRow {
                index: l,
                value: v.norm(),
            });
        }
        inv_vac.push(v.inv());
    }
    let mut data = Vec::with_capacity(n * n * n);
    let mut residual = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let w: Vec<Complex> = (0..n).map(|l| s[[i, l]] * s[[j, l]] * inv_vac[l]).collect();
            for m in 0..n {
                let raw: Complex = (0..n).map(|l| w[l] * s[[m, l]].conj()).sum();
                let rounded = raw.re.round().max(0.0);
                residual = residual.max((raw - Complex::new(rounded, 0.0)).norm());
                data.push(rounded as u32);
            }
        }
    }
    Ok(Fusion {
        tensor: FusionTensor { rank: n, data },
        residual,
    })
}

/// `qdim_i = S_{0i}/S_{00}` and the global dimension `Σ qdim_i²`.
pub fn quantum_dimensions(d: &ModularDatum) -> (Vec<f64>, f64) {
    let s00 = d.s[[0, 0]];
    let qdims: Vec<f64> = (0..d.rank())
        .map(|i| if i == 0 { 1.0 } else { (d.s[[0, i]] / s00).re })
        .collect();
    let glob = qdims.iter().map(|q| q * q).sum();
    (qdims, glob)
}

pub mod checks {
    pub const UNITARITY: &str = "unitarity";
    pub const SYMMETRY: &str = "symmetry";
    pub const VACUUM_POSITIVITY: &str = "vacuum_positivity";
    pub const CHARGE_CONJUGATION: &str = "charge_conjugation";
    pub const MODULAR_RELATION: &str = "modular_relation";
    pub const VERLINDE_INTEGRALITY: &str = "verlinde_integrality";
}

/// Runs every check on `d`. Failures are report entries, never errors.
pub fn validate_modular_datum(d: &ModularDatum, tol: Tolerances) -> ValidationReport {
    validate_with_t(d, &d.t_diagonal(), tol)
}

pub(crate) fn validate_with_t(
    d: &ModularDatum,
    t: &[Complex],
    tol: Tolerances,
) -> ValidationReport {
    let eps = tol.eps;
    let n = d.rank();
    let s = &d.s;
    let mut report = ValidationReport::default();

    let sst = linalg::matmul(s, &linalg::dagger(s));
    let r = linalg::max_abs_diff(&sst, &linalg::identity(n));
    report.push(CheckResult::new(checks::UNITARITY, r <= eps, r, eps));

    let r = linalg::max_abs_diff(s, &s.t().to_owned());
    report.push(CheckResult::new(checks::SYMMETRY, r <= eps, r, eps));

    let imag = (0..n).map(|j| s[[0, j]].im.abs()).fold(0.0, f64::max);
    let min_re = (0..n).map(|j| s[[0, j]].re).fold(f64::INFINITY, f64::min);
    let ok = imag <= eps && min_re > eps;
    let mut c = CheckResult::new(
        checks::VACUUM_POSITIVITY,
        ok,
        imag.max((-min_re).max(0.0)),
        eps,
    );
    if !ok {
        c = c.with_detail(format!(
            "min Re S[0][j] = {min_re:.3e}, max |Im S[0][j]| = {imag:.3e}"
        ));
    }
    report.push(c);

    let s2 = linalg::matmul(s, s);
    report.push(permutation_check(&s2, eps));

    let st = linalg::mul_diag_right(s, t);
    let st3 = linalg::matmul(&linalg::matmul(&st, &st), &st);
    let r = linalg::max_abs_diff(&st3, &s2);
    let mut c = CheckResult::new(checks::MODULAR_RELATION, r <= eps, r, eps);
    if r > eps {
        if let Some(z) = linalg::best_scalar(&st3, &s2) {
            let rescaled = s2.mapv(|x| x * z);
            let rz = linalg::max_abs_diff(&st3, &rescaled);
            if rz <= eps && (z.norm() - 1.0).abs() <= eps {
                let turns = z.arg() / (2.0 * std::f64::consts::PI);
                c = c.with_detail(format!(
                    "(ST)^3 = e^(2πi·{turns:.6})·S^2: residual global phase"
                ));
            }
        }
    }
    report.push(c);

    match verlinde_fusion(d) {
        Ok(f) => report.push(CheckResult::new(
            checks::VERLINDE_INTEGRALITY,
            f.residual <= tol.eps_int,
            f.residual,
            tol.eps_int,
        )),
        Err(e) => report.push(
            CheckResult::new(
                checks::VERLINDE_INTEGRALITY,
                false,
                f64::INFINITY,
                tol.eps_int,
            )
            .with_detail(e.to_string()),
        ),
    }
    report
}

/// `m` is within `eps` of a 0/1 matrix with exactly one 1 per row and column.
fn permutation_check(m: &CMatrix, eps: f64) -> CheckResult {
    let n = m.nrows();
    let mut residual = 0.0f64;
    let mut row_ones = vec![0usize; n];
    let mut col_ones = vec![0usize; n];
    for ((i, j), z) in m.indexed_iter() {
        let to_zero = z.norm();
        let to_one = (z - Complex::new(1.0, 0.0)).norm();
        if to_one < to_zero {
            row_ones[i] += 1;
            col_ones[j] += 1;
        }
        residual = residual.max(to_zero.min(to_one));
    }
    let is_perm = row_ones.iter().chain(col_ones.iter()).all(|&c| c == 1);
    let c = CheckResult::new(
        checks::CHARGE_CONJUGATION,
        is_perm && residual <= eps,
        residual,
        eps,
    );
    if is_perm {
        c
    } else {
        c.with_detail("S^2 is not a permutation matrix")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::phase::rat;

    fn one_module(c: i64) -> ModularDatum {
        ModularDatum::new(
            rat(c, 1),
            vec![ModuleInfo::new("1", rat(0, 1))],
            linalg::identity(1),
        )
        .unwrap()
    }

    #[test]
    fn rejects_shape_violations() {
        let modules = vec![
            ModuleInfo::new("a", rat(0, 1)),
            ModuleInfo::new("b", rat(1, 2)),
            ModuleInfo::new("c", rat(1, 3)),
        ];
        let err = ModularDatum::new(rat(1, 1), modules.clone(), linalg::identity(2)).unwrap_err();
        assert!(err.to_string().contains("dimension mismatch"));

        let mut dup = modules.clone();
        dup[2].label = "a".into();
        assert!(matches!(
            ModularDatum::new(rat(1, 1), dup, linalg::identity(3)),
            Err(Error::DuplicateLabel(_))
        ));

        let mut shifted = modules;
        shifted[0].weight = rat(1, 2);
        assert!(matches!(
            ModularDatum::new(rat(1, 1), shifted, linalg::identity(3)),
            Err(Error::VacuumWeight(_))
        ));

        assert!(matches!(
            ModularDatum::new(rat(1, 1), vec![], linalg::zeros(0)),
            Err(Error::Empty)
        ));
    }

    #[test]
    fn rejects_nan_entries() {
        let mut s = linalg::identity(1);
        s[[0, 0]] = Complex::new(f64::NAN, 0.0);
        let err = ModularDatum::new(rat(0, 1), vec![ModuleInfo::new("1", rat(0, 1))], s);
        assert!(matches!(err, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn t_matrix_angles() {
        let ising = fixtures::ising();
        let t = t_matrix(&ising);
        assert_eq!(t[0].angle(), rat(47, 48));
        assert_eq!(t[1].angle(), rat(23, 48));
        assert_eq!(t[2].angle(), rat(1, 24));
        assert_eq!(t_matrix(&one_module(0))[0].angle(), rat(0, 1));
        assert_eq!(t_matrix(&one_module(8))[0].angle(), rat(2, 3));
    }

    #[test]
    fn one_module_datum_is_valid() {
        let report = validate_modular_datum(&one_module(8), Tolerances::default());
        assert!(report.passed(), "{report}");
        let (q, glob) = quantum_dimensions(&one_module(8));
        assert_eq!(q, vec![1.0]);
        assert_eq!(glob, 1.0);
    }

    #[test]
    fn central_charge_mod_24_matters() {
        // c = 4 gives T = e^{-2πi/6}; with S = [1], (ST)^3 = e^{-πi} = -1 ≠ 1.
        let report = validate_modular_datum(&one_module(4), Tolerances::default());
        let c = report.get(checks::MODULAR_RELATION).unwrap();
        assert!(!c.passed);
        assert!(c.detail.as_deref().unwrap().contains("global phase"));
        assert!(report.get(checks::UNITARITY).unwrap().passed);
    }

    #[test]
    fn perturbation_breaks_unitarity() {
        let ising = fixtures::ising();
        let mut s = ising.s_matrix().clone();
        s[[0, 0]] += Complex::new(0.01, 0.0);
        let bad = ModularDatum::new(ising.central_charge(), ising.modules().to_vec(), s).unwrap();
        let report = validate_modular_datum(&bad, Tolerances::default());
        assert!(!report.get(checks::UNITARITY).unwrap().passed);
        assert!(!report.passed());
    }

    #[test]
    fn ising_fusion_rules() {
        let ising = fixtures::ising();
        let f = verlinde_fusion(&ising).unwrap();
        assert!(f.residual < 1e-12);
        let (one, psi, sigma) = (0, 1, 2);
        let n = &f.tensor;
        assert_eq!(n.get(sigma, sigma, one), 1);
        assert_eq!(n.get(sigma, sigma, psi), 1);
        assert_eq!(n.get(sigma, sigma, sigma), 0);
        assert_eq!(n.get(psi, psi, one), 1);
        assert_eq!(n.get(psi, sigma, sigma), 1);
    }

    #[test]
    fn fusion_matches_brute_force_oracle() {
        // Plain triple loop with explicit division, independent of the cached path.
        for d in [fixtures::ising(), fixtures::fibonacci()] {
            let s = d.s_matrix();
            let n = d.rank();
            let f = verlinde_fusion(&d).unwrap();
            for i in 0..n {
                for j in 0..n {
                    for m in 0..n {
                        let mut acc = Complex::new(0.0, 0.0);
                        for l in 0..n {
                            acc += s[[i, l]] * s[[j, l]] * s[[m, l]].conj() / s[[0, l]];
                        }
                        assert!((acc.re - f.tensor.get(i, j, m) as f64).abs() < 1e-9);
                        assert!(acc.im.abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn fibonacci_fusion() {
        let fib = fixtures::fibonacci();
        let n = verlinde_fusion(&fib).unwrap().tensor;
        assert_eq!(n.get(1, 1, 0), 1);
        assert_eq!(n.get(1, 1, 1), 1);
        assert_eq!(n.products(1, 1).count(), 2);
    }

    #[test]
    fn quantum_dims_of_fixtures() {
        let (q, glob) = quantum_dimensions(&fixtures::ising());
        assert_eq!(q[0], 1.0);
        assert!((q[1] - 1.0).abs() < 1e-12);
        assert!((q[2] - 2f64.sqrt()).abs() < 1e-12);
        assert!((glob - 4.0).abs() < 1e-12);

        let (q, glob) = quantum_dimensions(&fixtures::fibonacci());
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((q[1] - phi).abs() < 1e-12);
        assert!((glob - (5.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn singular_vacuum_row_is_an_error() {
        let mut s = linalg::identity(2);
        s[[0, 1]] = Complex::new(0.0, 0.0);
        let d = ModularDatum::new(
            rat(0, 1),
            vec![
                ModuleInfo::new("a", rat(0, 1)),
                ModuleInfo::new("b", rat(1, 2)),
            ],
            s,
        )
        .unwrap();
        assert!(matches!(
            verlinde_fusion(&d),
            Err(Error::SingularVacuumRow { index: 1, .. })
        ));
        let report = validate_modular_datum(&d, Tolerances::default());
        assert!(!report.get(checks::VERLINDE_INTEGRALITY).unwrap().passed);
        assert!(!report.get(checks::VACUUM_POSITIVITY).unwrap().passed);
    }
}
