//! Hand inequality chains for the diagonal derivative numerators, validated
//! exactly.
//!
//! Both numerators change sign once in their coefficient sequence. Writing
//! `N` for the total of the negative block and `S` for the positive block:
//!
//! * `P` (negative block first): for `β > 1`, `P(β) > β^(s−1)(S·β − N)` where
//!   `s` is the first positive degree, so `P > 0` once `β ≥ N/S`.
//! * `Q` (positive block first, ending at degree `t`): on `(0, 1]`,
//!   `Q(β) ≥ β^t (S − N·β)`; on `(1, b]`, `Q(β) > S − N·β^deg Q ≥ S − N·b^deg Q`.

use num_traits::{Signed, Zero};
use serde_json::{Value, json};

use crate::scalar::{Rational, format_rational, frac, parse_rational, rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainKind {
    FirstDerivativeBound,
    SecondDerivativeLow,
    SecondDerivativeHigh,
}

impl ChainKind {
    pub fn id(self) -> &'static str {
        match self {
            ChainKind::FirstDerivativeBound => "first_derivative_bound",
            ChainKind::SecondDerivativeLow => "second_derivative_low",
            ChainKind::SecondDerivativeHigh => "second_derivative_high",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            ChainKind::FirstDerivativeBound,
            ChainKind::SecondDerivativeLow,
            ChainKind::SecondDerivativeHigh,
        ]
        .into_iter()
        .find(|k| k.id() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainResult {
    pub kind: ChainKind,
    pub pass: bool,
    /// Degree at which the sign block switches.
    pub split_degree: usize,
    pub negative_total: Rational,
    pub positive_total: Rational,
    /// Human-readable inequalities that were checked, each with its truth value.
    pub steps: Vec<(String, bool)>,
}

impl ChainResult {
    pub fn to_json(&self, coeffs: &[Rational]) -> Value {
        json!({
            "kind": self.kind.id(),
            "coefficients": coeffs.iter().map(format_rational).collect::<Vec<_>>(),
            "split_degree": self.split_degree,
            "negative_total": format_rational(&self.negative_total),
            "positive_total": format_rational(&self.positive_total),
            "steps": self.steps.iter().map(|(s, ok)| json!({"claim": s, "holds": ok})).collect::<Vec<_>>(),
        })
    }
}

/// Index of the first coefficient whose sign differs from `coeffs[0]`, and
/// whether the signs form exactly two blocks.
fn sign_split(coeffs: &[Rational]) -> (usize, bool) {
    let first_neg = coeffs.first().is_some_and(|c| c.is_negative());
    let split = coeffs
        .iter()
        .position(|c| c.is_negative() != first_neg && !c.is_zero())
        .unwrap_or(coeffs.len());
    let two_blocks = coeffs[split..].iter().all(|c| c.is_zero() || c.is_negative() != first_neg);
    (split, two_blocks)
}

fn totals(coeffs: &[Rational]) -> (Rational, Rational) {
    let mut neg = Rational::zero();
    let mut pos = Rational::zero();
    for c in coeffs {
        if c.is_negative() {
            neg -= c;
        } else {
            pos += c;
        }
    }
    (neg, pos)
}

/// Validates one chain for the given ascending coefficient list. `cut` is the
/// right endpoint of the range (6/5 for all three chains).
pub fn verify_inequality_chain(kind: ChainKind, coeffs: &[Rational], cut: &Rational) -> ChainResult {
    let (split, two_blocks) = sign_split(coeffs);
    let (neg, pos) = totals(coeffs);
    let mut steps = vec![(format!("coefficients form two sign blocks split at degree {split}"), two_blocks)];
    match kind {
        ChainKind::FirstDerivativeBound => {
            let starts_negative = coeffs.first().is_some_and(|c| c.is_negative());
            steps.push(("lower-degree block is negative".into(), starts_negative));
            let threshold = if pos.is_zero() { None } else { Some(&neg / &pos) };
            let ok = threshold.as_ref().is_some_and(|t| cut > t);
            steps.push((
                format!(
                    "{} > {}/{}",
                    format_rational(cut),
                    format_rational(&neg),
                    format_rational(&pos)
                ),
                ok,
            ));
        }
        ChainKind::SecondDerivativeLow => {
            let starts_positive = coeffs.first().is_some_and(|c| c.is_positive());
            steps.push(("lower-degree block is positive".into(), starts_positive));
            steps.push((
                format!(
                    "{} - {}*beta > 0 on (0, 1]",
                    format_rational(&pos),
                    format_rational(&neg)
                ),
                pos > neg,
            ));
        }
        ChainKind::SecondDerivativeHigh => {
            let starts_positive = coeffs.first().is_some_and(|c| c.is_positive());
            steps.push(("lower-degree block is positive".into(), starts_positive));
            let deg = coeffs.len().saturating_sub(1);
            let power = num_traits::pow(cut.clone(), deg);
            let sixteen = rat(16);
            steps.push((format!("({})^{deg} < 16", format_rational(cut)), power < sixteen));
            steps.push((
                format!("16 < {}/{}", format_rational(&pos), format_rational(&neg)),
                !neg.is_zero() && sixteen * &neg < pos,
            ));
        }
    }
    ChainResult {
        kind,
        pass: steps.iter().all(|(_, ok)| *ok),
        split_degree: split,
        negative_total: neg,
        positive_total: pos,
        steps,
    }
}

/// Recomputes a serialized chain from its stored coefficients.
pub fn recheck_chain(v: &Value) -> bool {
    let Some(kind) = v["kind"].as_str().and_then(ChainKind::parse) else {
        return false;
    };
    let Some(arr) = v["coefficients"].as_array() else {
        return false;
    };
    let coeffs: Option<Vec<Rational>> = arr
        .iter()
        .map(|c| c.as_str().and_then(|s| parse_rational(s).ok()))
        .collect();
    let Some(coeffs) = coeffs else {
        return false;
    };
    let r = verify_inequality_chain(kind, &coeffs, &frac(6, 5));
    r.pass
        && v["negative_total"].as_str() == Some(&format_rational(&r.negative_total))
        && v["positive_total"].as_str() == Some(&format_rational(&r.positive_total))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(c: &[i64]) -> Vec<Rational> {
        c.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn first_derivative_constants() {
        let p = ints(&[-1, -15, -96, -336, -680, -720, -120, 624, 708, 300, 48]);
        let r = verify_inequality_chain(ChainKind::FirstDerivativeBound, &p, &frac(6, 5));
        assert!(r.pass, "{:?}", r.steps);
        assert_eq!((r.negative_total.clone(), r.positive_total.clone()), (rat(1968), rat(1680)));
        assert_eq!(r.split_degree, 7);
        assert!(recheck_chain(&r.to_json(&p)));
    }

    #[test]
    fn second_derivative_constants() {
        let q = ints(&[
            9, 204, 2142, 13720, 59514, 183672, 412044, 672768, 782892, 611088, 264456, -2592, -74952,
            -42336, -10800, -1152,
        ]);
        for kind in [ChainKind::SecondDerivativeLow, ChainKind::SecondDerivativeHigh] {
            let r = verify_inequality_chain(kind, &q, &frac(6, 5));
            assert!(r.pass, "{:?}", r.steps);
            assert_eq!(r.positive_total, rat(3002509));
            assert_eq!(r.negative_total, rat(131832));
        }
        assert!(num_traits::pow(frac(6, 5), 15) < rat(16));
    }

    #[test]
    fn failing_chain_reports_step() {
        let p = ints(&[-10, 1]);
        let r = verify_inequality_chain(ChainKind::FirstDerivativeBound, &p, &frac(6, 5));
        assert!(!r.pass);
        assert!(r.steps.iter().any(|(s, ok)| !ok && s.contains("6/5 > 10/1")));
    }
}
