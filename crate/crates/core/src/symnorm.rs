//! Symmetric Δ-norms evaluated through the singular value function, with checks
//! for the Δ-norm axioms, the `F(τ) ⊂ E ⊂ S` embedding bound and the dilation
//! inequality `‖σ_{2^k} x‖_E ≤ (2C_E)^k ‖x‖_E`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kcalc;
use crate::stepfn::{Rearrange, SingularFunction};

type EvalFn = dyn Fn(&SingularFunction) -> Result<f64> + Send + Sync;

#[derive(Clone)]
enum Kind {
    Lp(f64),
    LInf,
    L0,
    F,
    S,
    Custom(Arc<EvalFn>),
}

/// A symmetric Δ-norm `‖X‖_E = ‖μ(X)‖_E` with a declared triangle constant.
#[derive(Clone)]
pub struct DeltaNorm {
    name: String,
    c_e: f64,
    kind: Kind,
    scaling_to_zero: bool,
}

impl fmt::Debug for DeltaNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DeltaNorm")
            .field("name", &self.name)
            .field("c_e", &self.c_e)
            .finish()
    }
}

impl DeltaNorm {
    /// `∫μ^p` for `p < 1`, `(∫μ^p)^{1/p}` for `p ≥ 1`; both with `C_E = 1`.
    pub fn lp(p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidInput(format!("L_p needs 0 < p < inf, got {p}")));
        }
        Ok(Self::builtin(format!("Lp:{p}"), Kind::Lp(p), true))
    }

    pub fn linf() -> Self {
        Self::builtin("Linf".into(), Kind::LInf, true)
    }

    /// Group-norm `m(supp μ)`. It is not homogeneous: `‖αx‖₀ = ‖x‖₀` for `α ≠ 0`.
    pub fn l0() -> Self {
        Self::builtin("L0".into(), Kind::L0, false)
    }

    /// `max{‖X‖₀, ‖X‖_∞}` on `F(τ) = L₀ ∩ L∞`.
    pub fn f_norm() -> Self {
        Self::builtin("F".into(), Kind::F, false)
    }

    /// `‖X‖_S = K_1(μ(X))`.
    pub fn s_norm() -> Self {
        Self::builtin("S".into(), Kind::S, true)
    }

    fn builtin(name: String, kind: Kind, scaling_to_zero: bool) -> Self {
        Self {
            name,
            c_e: 1.0,
            kind,
            scaling_to_zero,
        }
    }

    /// A user norm. The evaluation map must be symmetric and pure; the constant
    /// `c_e` is taken as declared.
    pub fn custom(
        name: impl Into<String>,
        c_e: f64,
        eval: impl Fn(&SingularFunction) -> Result<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(c_e >= 1.0 && c_e.is_finite()) {
            return Err(Error::InvalidInput(format!("declared C_E must be >= 1, got {c_e}")));
        }
        Ok(Self {
            name: name.into(),
            c_e,
            kind: Kind::Custom(Arc::new(eval)),
            scaling_to_zero: true,
        })
    }

    /// Same norm with a different declared constant, not validated. Meant for
    /// falsification runs of [`delta_axioms_check`].
    pub fn with_declared_constant(mut self, c_e: f64) -> Self {
        self.c_e = c_e;
        self
    }

    /// Registry lookup: `"Lp:<p>"`, `"Linf"`, `"L0"`, `"F"`, `"S"`.
    pub fn from_key(key: &str) -> Result<Self> {
        match key {
            "Linf" => Ok(Self::linf()),
            "L0" => Ok(Self::l0()),
            "F" => Ok(Self::f_norm()),
            "S" => Ok(Self::s_norm()),
            _ => match key.strip_prefix("Lp:") {
                Some(p) => Self::lp(
                    p.parse()
                        .map_err(|_| Error::InvalidInput(format!("bad exponent in norm key {key:?}")))?,
                ),
                None => Err(Error::InvalidInput(format!("unknown norm key {key:?}"))),
            },
        }
    }

    /// Built-ins with the exponents used by the property suites.
    pub fn builtins() -> Vec<Self> {
        let mut out: Vec<Self> = [0.5, 1.0, 2.0, 3.0].into_iter().map(|p| Self::lp(p).unwrap()).collect();
        out.extend([Self::linf(), Self::l0(), Self::f_norm(), Self::s_norm()]);
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn c_e(&self) -> f64 {
        self.c_e
    }

    /// False for group-norms (L0, F) where `‖αx‖ ↛ 0` as `α → 0`.
    pub fn scaling_to_zero(&self) -> bool {
        self.scaling_to_zero
    }

    pub fn eval(&self, mu: &SingularFunction) -> Result<f64> {
        let finite_support = || {
            if mu.tail() != 0.0 {
                Err(Error::Undefined(format!("{} needs a vanishing tail", self.name)))
            } else {
                Ok(mu.support_measure())
            }
        };
        match &self.kind {
            Kind::Lp(p) => {
                finite_support()?;
                let integral = mu.integral_pow(*p);
                Ok(if *p < 1.0 { integral } else { integral.powf(1.0 / p) })
            }
            Kind::LInf => Ok(mu.initial_value()),
            Kind::L0 => finite_support(),
            Kind::F => Ok(finite_support()?.max(mu.initial_value())),
            Kind::S => Ok(kcalc::s_norm(mu)),
            Kind::Custom(f) => f(mu),
        }
    }
}

/// `‖X‖_E := ‖μ(X)‖_E` for a matrix, step function or singular function.
pub fn e_eval(e: &DeltaNorm, x: &impl Rearrange) -> Result<f64> {
    e.eval(&x.singular_function()?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomEntry {
    pub axiom: &'static str,
    pub status: Status,
    /// Worst observed ratio for the axiom (1.0 is the boundary where relevant).
    pub worst: f64,
    /// Indices into the sample list of the worst witness.
    pub witness: Option<(usize, usize)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub norm: String,
    pub c_e: f64,
    pub entries: Vec<AxiomEntry>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.status != Status::Fail)
    }

    pub fn entry(&self, axiom: &str) -> Option<&AxiomEntry> {
        self.entries.iter().find(|e| e.axiom == axiom)
    }
}

const AXIOM_RTOL: f64 = 1e-12;
const SCALING_STEPS: i32 = 40;
const SCALING_THRESHOLD: f64 = 1e-6;

fn le_with_slack(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + AXIOM_RTOL * rhs.abs().max(lhs.abs())
}

/// Samples the four Δ-norm axioms on `samples` (at least two):
/// definiteness, `‖αx‖ ≤ ‖x‖` for `|α| ≤ 1`, `‖2^{-j}x‖ → 0`, and
/// `‖x ± y‖ ≤ C_E (‖x‖ + ‖y‖)` over all ordered pairs.
pub fn delta_axioms_check(e: &DeltaNorm, samples: &[SingularFunction]) -> Result<AxiomReport> {
    if samples.len() < 2 {
        return Err(Error::InvalidInput("axiom check needs at least two samples".into()));
    }
    let norms: Vec<f64> = samples.iter().map(|s| e.eval(s)).collect::<Result<_>>()?;
    let mut entries = Vec::with_capacity(5);

    // (1) definiteness
    let zero_ok = e.eval(&SingularFunction::zero())? == 0.0;
    let bad = samples
        .iter()
        .zip(&norms)
        .position(|(s, &v)| !(v >= 0.0) || ((v == 0.0) != s.is_zero()));
    entries.push(AxiomEntry {
        axiom: "definiteness",
        status: if zero_ok && bad.is_none() {
            Status::Pass
        } else {
            Status::Fail
        },
        worst: norms.iter().copied().fold(f64::INFINITY, f64::min),
        witness: bad.map(|i| (i, i)),
    });

    // (2) ‖αx‖ ≤ ‖x‖ for |α| ≤ 1
    let mut worst = 0.0_f64;
    let mut witness = None;
    let mut ok = true;
    for (i, (s, &v)) in samples.iter().zip(&norms).enumerate() {
        for alpha in [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0] {
            let scaled = e.eval(&s.scale(alpha))?;
            if !le_with_slack(scaled, v) {
                ok = false;
                witness = Some((i, i));
            }
            if v > 0.0 && scaled / v > worst {
                worst = scaled / v;
            }
        }
    }
    entries.push(AxiomEntry {
        axiom: "contraction",
        status: if ok { Status::Pass } else { Status::Fail },
        worst,
        witness,
    });

    // (3) ‖αx‖ → 0
    if e.scaling_to_zero() {
        let mut worst = 0.0_f64;
        let mut witness = None;
        for (i, (s, &v)) in samples.iter().zip(&norms).enumerate() {
            if v == 0.0 {
                continue;
            }
            let reached = (0..=SCALING_STEPS)
                .map(|j| e.eval(&s.scale((2.0_f64).powi(-j))))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .map(|x| x / v)
                .fold(f64::INFINITY, f64::min);
            if reached > worst {
                worst = reached;
                witness = Some((i, i));
            }
        }
        entries.push(AxiomEntry {
            axiom: "scaling_to_zero",
            status: if worst < SCALING_THRESHOLD {
                Status::Pass
            } else {
                Status::Fail
            },
            worst,
            witness,
        });
    } else {
        entries.push(AxiomEntry {
            axiom: "scaling_to_zero",
            status: Status::NotApplicable,
            worst: f64::NAN,
            witness: None,
        });
    }

    // (4) quasi-triangle inequality with the declared constant
    let mut worst = 0.0_f64;
    let mut witness = None;
    for (i, x) in samples.iter().enumerate() {
        for (j, y) in samples.iter().enumerate() {
            let denom = norms[i] + norms[j];
            for sum in [x.add(y).into_step(), x.as_step().zip_with(y, |a, b| a - b)] {
                let lhs = e_eval(e, &sum)?;
                let ratio = if denom > 0.0 {
                    lhs / denom
                } else if lhs > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                };
                if ratio > worst {
                    worst = ratio;
                    witness = Some((i, j));
                }
            }
        }
    }
    let constant_ok = e.c_e() >= 1.0;
    entries.push(AxiomEntry {
        axiom: "triangle",
        status: if constant_ok && worst <= e.c_e() * (1.0 + AXIOM_RTOL) {
            Status::Pass
        } else {
            Status::Fail
        },
        worst,
        witness,
    });

    Ok(AxiomReport {
        norm: e.name().to_string(),
        c_e: e.c_e(),
        entries,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityReport {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            holds: lhs <= rhs + 1e-12 * rhs.abs().max(lhs.abs()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingReport {
    /// `ε = ‖X‖_F = max{‖X‖₀, ‖X‖_∞}`.
    pub epsilon: f64,
    pub bound: InequalityReport,
}

/// `‖X‖_E ≤ ‖ε·χ_{(0,1)}‖_E` with `ε = ‖X‖_F ≤ 1`, since `μ(X) ≤ ε χ_{(0,ε)}`.
pub fn embedding_check(e: &DeltaNorm, x: &impl Rearrange) -> Result<EmbeddingReport> {
    let mu = x.singular_function()?;
    if mu.tail() != 0.0 {
        return Err(Error::Undefined("embedding check needs an element of F(τ)".into()));
    }
    let epsilon = mu.support_measure().max(mu.initial_value());
    if epsilon > 1.0 {
        return Err(Error::InvalidInput(format!(
            "embedding check needs ‖X‖_F <= 1, got {epsilon}"
        )));
    }
    let lhs = e.eval(&mu)?;
    let rhs = if epsilon == 0.0 {
        0.0
    } else {
        e.eval(&SingularFunction::indicator(epsilon, 1.0)?)?
    };
    Ok(EmbeddingReport {
        epsilon,
        bound: InequalityReport::new(lhs, rhs),
    })
}

/// `‖σ_{2^k} μ‖_E ≤ (2 C_E)^k ‖μ‖_E`.
pub fn dilation_check(e: &DeltaNorm, mu: &SingularFunction, k: u32) -> Result<InequalityReport> {
    let dilated = mu.dilate((2.0_f64).powi(k as i32))?;
    let lhs = e.eval(&dilated)?;
    let rhs = (2.0 * e.c_e()).powi(k as i32) * e.eval(mu)?;
    Ok(InequalityReport::new(lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matmodel::TraceMatrix;

    fn mu(widths: &[f64], values: &[f64]) -> SingularFunction {
        SingularFunction::from_widths(widths, values.to_vec(), 0.0).unwrap()
    }

    fn samples() -> Vec<SingularFunction> {
        vec![
            mu(&[1.0, 2.0], &[3.0, 1.0]),
            mu(&[0.5], &[4.0]),
            mu(&[2.0, 1.0, 3.0], &[2.0, 1.5, 0.2]),
            SingularFunction::zero(),
        ]
    }

    #[test]
    fn eval_examples() {
        let m = SingularFunction::indicator(2.0, 3.0).unwrap();
        assert_eq!(e_eval(&DeltaNorm::lp(1.0).unwrap(), &m).unwrap(), 6.0);
        assert_eq!(e_eval(&DeltaNorm::l0(), &m).unwrap(), 3.0);
        let four = SingularFunction::indicator(4.0, 1.0).unwrap();
        assert_eq!(e_eval(&DeltaNorm::lp(0.5).unwrap(), &four).unwrap(), 2.0);
        assert_eq!(e_eval(&DeltaNorm::f_norm(), &m).unwrap(), 3.0);
        assert_eq!(e_eval(&DeltaNorm::linf(), &m).unwrap(), 2.0);
        assert_eq!(e_eval(&DeltaNorm::s_norm(), &m).unwrap(), 2.0);
    }

    #[test]
    fn undefined_on_nonzero_tail() {
        let c = SingularFunction::new(vec![], vec![], 1.0).unwrap();
        assert!(matches!(DeltaNorm::l0().eval(&c), Err(Error::Undefined(_))));
        assert!(DeltaNorm::f_norm().eval(&c).is_err());
        assert!(DeltaNorm::lp(2.0).unwrap().eval(&c).is_err());
        assert_eq!(DeltaNorm::linf().eval(&c).unwrap(), 1.0);
    }

    #[test]
    fn registry_keys() {
        for key in ["Lp:0.5", "Lp:2", "Linf", "L0", "F", "S"] {
            assert!(DeltaNorm::from_key(key).is_ok(), "{key}");
        }
        assert!(DeltaNorm::from_key("Lp:x").is_err());
        assert!(DeltaNorm::from_key("Lp:-1").is_err());
        assert!(DeltaNorm::from_key("Orlicz").is_err());
    }

    #[test]
    fn axioms_for_builtins() {
        for e in DeltaNorm::builtins() {
            let r = delta_axioms_check(&e, &samples()).unwrap();
            assert!(r.all_pass(), "{}: {:?}", e.name(), r.entries);
        }
        let l0 = delta_axioms_check(&DeltaNorm::l0(), &samples()).unwrap();
        assert_eq!(l0.entry("scaling_to_zero").unwrap().status, Status::NotApplicable);
    }

    #[test]
    fn wrong_constant_is_caught() {
        let e = DeltaNorm::lp(1.0).unwrap().with_declared_constant(0.5);
        let r = delta_axioms_check(&e, &samples()).unwrap();
        assert_eq!(r.entry("triangle").unwrap().status, Status::Fail);
        assert!(!r.all_pass());
    }

    #[test]
    fn custom_norm_needs_constant() {
        assert!(DeltaNorm::custom("half", 0.5, |m| Ok(m.initial_value())).is_err());
        let e = DeltaNorm::custom("sup", 1.0, |m| Ok(m.initial_value())).unwrap();
        assert!(delta_axioms_check(&e, &samples()).unwrap().all_pass());
        assert!(delta_axioms_check(&e, &samples()[..1]).is_err());
    }

    #[test]
    fn embedding_examples() {
        let eps = 0.3;
        let x = TraceMatrix::diag(&[eps, eps * 0.5, 0.0], 0.1).unwrap();
        for p in [0.5, 1.0, 2.0] {
            let r = embedding_check(&DeltaNorm::lp(p).unwrap(), &x).unwrap();
            assert!((r.epsilon - eps).abs() < 1e-15);
            let closed_form = if p < 1.0 { eps.powf(p) } else { eps };
            assert!((r.bound.rhs - closed_form).abs() < 1e-12);
            assert!(r.bound.holds);
        }
        let z = embedding_check(&DeltaNorm::l0(), &TraceMatrix::zeros(2, 1.0).unwrap()).unwrap();
        assert!(z.bound.holds && z.epsilon == 0.0);
        let big = TraceMatrix::diag(&[2.0], 1.0).unwrap();
        assert!(embedding_check(&DeltaNorm::l0(), &big).is_err());
    }

    #[test]
    fn dilation_examples() {
        let m = mu(&[1.0, 2.0], &[3.0, 1.0]);
        let r = dilation_check(&DeltaNorm::lp(1.0).unwrap(), &m, 1).unwrap();
        assert_eq!(r.lhs, r.rhs);
        let r0 = dilation_check(&DeltaNorm::l0(), &m, 1).unwrap();
        assert_eq!(r0.lhs, 6.0);
        assert!(r0.holds);
        let half = dilation_check(&DeltaNorm::lp(0.5).unwrap(), &m, 2).unwrap();
        assert!(half.holds);
        assert!((half.lhs - half.rhs).abs() <= 1e-12 * half.rhs);
        let two = dilation_check(&DeltaNorm::lp(2.0).unwrap(), &m, 2).unwrap();
        assert!(two.holds && two.lhs < two.rhs);
    }
}
