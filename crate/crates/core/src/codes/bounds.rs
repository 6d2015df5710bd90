//! Advisory distance-scaling bounds for two-block code families.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::TwoBlockCode;

/// `coefficient * radicand^(1/root)`, an exact form of `n^(power/root)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactRoot {
    pub coefficient: u128,
    pub radicand: u128,
    pub root: u32,
}

impl ExactRoot {
    /// Simplified `n^(power/root)`, or `None` on overflow.
    pub fn of_power(n: u64, power: u32, root: u32) -> Option<ExactRoot> {
        if root == 0 {
            return None;
        }
        let mut coefficient: u128 = 1;
        let mut radicand: u128 = 1;
        for (p, e) in factorize(n) {
            let total = e.checked_mul(power)?;
            let p = p as u128;
            coefficient = coefficient.checked_mul(p.checked_pow(total / root)?)?;
            radicand = radicand.checked_mul(p.checked_pow(total % root)?)?;
        }
        Some(ExactRoot {
            coefficient,
            radicand,
            root,
        })
    }

    pub fn value(&self) -> f64 {
        self.coefficient as f64 * (self.radicand as f64).powf(1.0 / f64::from(self.root))
    }
}

impl fmt::Display for ExactRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.coefficient, self.radicand) {
            (c, 1) => write!(f, "{c}"),
            (1, r) => write!(f, "{r}^(1/{})", self.root),
            (c, r) => write!(f, "{c}*{r}^(1/{})", self.root),
        }
    }
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// The dimension-dependent scaling statements for a code with `n` qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: u64,
    /// Total number of terms in `f` and `g`.
    pub w: usize,
    /// Number of distinct variables used.
    pub v: usize,
    /// Locality dimension `min(v, w - 2)`.
    #[serde(rename = "D")]
    pub dimension: usize,
    /// `n^(1 - 1/D)`, the distance upper-bound scaling.
    pub distance_upper: Option<f64>,
    pub distance_upper_exact: Option<String>,
    /// `n^(1/D)`, the distance lower-bound scaling.
    pub distance_lower: Option<f64>,
    pub distance_lower_exact: Option<String>,
    /// Exponent `2/(D - 1)` in `k * d^(2/(D-1)) <= O(n)`.
    pub tradeoff_exponent: Option<f64>,
    pub statements: Vec<String>,
    pub warnings: Vec<String>,
}

impl BoundReport {
    /// Whether an observed distance sits under the upper scaling value.
    pub fn consistent_with(&self, distance: u64) -> Option<bool> {
        self.distance_upper.map(|u| distance as f64 <= u + 1e-9)
    }
}

fn fmt_num(x: f64) -> String {
    format!("{x:.2}")
}

pub fn bound_report(c: &TwoBlockCode, n: u64) -> BoundReport {
    let w = c.weight();
    let v = c.variables_used().len();
    let mut warnings = Vec::new();
    match c.is_indecomposable() {
        Ok(true) => {}
        Ok(false) => warnings.push("code is decomposable; the bounds apply to each subcode separately".into()),
        Err(e) => warnings.push(format!("indecomposability unknown: {e}")),
    }
    let dimension = v.min(w.saturating_sub(2));
    if v > w.saturating_sub(2) {
        warnings.push(format!("v = {v} exceeds w - 2 = {}; D is capped at w - 2", w.saturating_sub(2)));
    }
    let mut statements = Vec::new();
    let (mut distance_upper, mut distance_upper_exact) = (None, None);
    let (mut distance_lower, mut distance_lower_exact) = (None, None);
    let mut tradeoff_exponent = None;
    if dimension == 0 {
        warnings.push("locality dimension is 0; no scaling statements".into());
    } else {
        let dd = dimension as u32;
        let nf = n as f64;
        let upper = nf.powf(1.0 - 1.0 / f64::from(dd));
        let lower = nf.powf(1.0 / f64::from(dd));
        let ue = ExactRoot::of_power(n, dd - 1, dd).map(|e| e.to_string());
        let le = ExactRoot::of_power(n, 1, dd).map(|e| e.to_string());
        let shown = |exact: &Option<String>, x: f64| match exact {
            Some(e) => format!("{e} ~ {}", fmt_num(x)),
            None => format!("~ {}", fmt_num(x)),
        };
        statements.push(format!(
            "d <= O(n^(1 - 1/{dimension})): n^({}/{dimension}) = {}",
            dimension - 1,
            shown(&ue, upper)
        ));
        if dimension > 1 {
            let t = 2.0 / (dimension as f64 - 1.0);
            tradeoff_exponent = Some(t);
            statements.push(format!("k * d^(2/{}) <= O(n) = O({n})", dimension - 1));
        } else {
            warnings.push("D = 1: the k-d tradeoff exponent is undefined".into());
        }
        statements.push(format!(
            "O(n^(1/{dimension})) <= d when no string-like operators survive: n^(1/{dimension}) = {}",
            shown(&le, lower)
        ));
        distance_upper = Some(upper);
        distance_upper_exact = ue;
        distance_lower = Some(lower);
        distance_lower_exact = le;
    }
    BoundReport {
        n,
        w,
        v,
        dimension,
        distance_upper,
        distance_upper_exact,
        distance_lower,
        distance_lower_exact,
        tradeoff_exponent,
        statements,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::VarContext;

    #[test]
    fn gross_code_report() {
        let ctx = VarContext::new(&["x", "y"]).unwrap();
        let gross = TwoBlockCode::parse(&ctx, "x^3 + y + y^2", "y^3 + x + x^2").unwrap();
        let r = bound_report(&gross, 288);
        assert_eq!((r.w, r.v, r.dimension), (6, 2, 2));
        assert_eq!(r.distance_upper_exact.as_deref(), Some("12*2^(1/2)"));
        // 288 = 144 * 2
        assert!((r.distance_upper.unwrap() - 16.970562748477143).abs() < 1e-9);
        assert!((r.distance_lower.unwrap() - 16.970562748477143).abs() < 1e-9);
        assert_eq!(r.tradeoff_exponent, Some(2.0));
        assert_eq!(r.consistent_with(12), Some(true));
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn toric_scales_like_l() {
        let ctx = VarContext::new(&["x", "y"]).unwrap();
        let toric = TwoBlockCode::parse(&ctx, "1 + x", "1 + y").unwrap();
        for l in [3u64, 5, 10] {
            let r = bound_report(&toric, 2 * l * l);
            assert_eq!(r.dimension, 2);
            assert_eq!(r.distance_upper_exact, Some(format!("{l}*2^(1/2)")));
        }
    }

    #[test]
    fn large_parent_capped_by_weight() {
        let names: Vec<String> = ('a'..='l').map(|c| c.to_string()).collect();
        let ctx = VarContext::new(&names).unwrap();
        let p = TwoBlockCode::parse(&ctx, "1 + a + b + c + d + e + f + g", "1 + h + i + j + k + l").unwrap();
        let r = bound_report(&p, 1000);
        assert_eq!((r.w, r.v, r.dimension), (14, 12, 12));
    }

    #[test]
    fn exact_roots() {
        assert_eq!(ExactRoot::of_power(288, 1, 2).unwrap().to_string(), "12*2^(1/2)");
        assert_eq!(ExactRoot::of_power(64, 2, 3).unwrap().to_string(), "16");
        assert_eq!(ExactRoot::of_power(7, 1, 3).unwrap().to_string(), "7^(1/3)");
        assert!((ExactRoot::of_power(50, 1, 2).unwrap().value() - 50f64.sqrt()).abs() < 1e-12);
    }
}
