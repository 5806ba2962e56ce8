//! Exact population values for finite discrete joint distributions.
//!
//! For a joint `P` over `|X| × |Y|` cells every expectation in `D(Y, X)`,
//! its variance-of-conditional-means form and `η` is a finite sum, so these
//! functions give ground truth for the sample estimators.

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::rng::{open_uniform, rng_from_seed};
use crate::sample::{PointKind, Points, Rotation3, SampleSet};
use serde::Deserialize;

/// Variances at or below this are treated as degenerate.
pub const POPULATION_VARIANCE_FLOOR: f64 = 1e-12;
const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteJoint {
    x_labels: Vec<String>,
    y_points: Points,
    /// Row-major `|X| × |Y|`.
    probs: Vec<f64>,
}

impl DiscreteJoint {
    pub fn new(x_labels: Vec<String>, y_points: Points, probs: Vec<Vec<f64>>) -> Result<Self> {
        let nx = x_labels.len();
        let ny = y_points.len();
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidJoint("alphabets must be non-empty".into()));
        }
        if probs.len() != nx || probs.iter().any(|r| r.len() != ny) {
            return Err(Error::InvalidJoint(format!(
                "probability matrix must be {nx} × {ny}"
            )));
        }
        let flat: Vec<f64> = probs.into_iter().flatten().collect();
        if let Some(p) = flat.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidJoint(format!("invalid probability {p}")));
        }
        let total: f64 = flat.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidJoint(format!("probabilities sum to {total}, not 1")));
        }
        let joint = DiscreteJoint {
            x_labels,
            y_points,
            probs: flat,
        };
        if let Some(b) = joint.y_marginal().iter().position(|&m| m <= 0.0) {
            return Err(Error::InvalidJoint(format!(
                "y point {} (index {b}) has zero marginal mass",
                joint.y_points.get(b)
            )));
        }
        if ny < 2 {
            return Err(Error::InvalidJoint(
                "Y marginal must put mass on at least two points".into(),
            ));
        }
        Ok(joint)
    }

    /// Joint over scalar `y` values with labels `"0"`, `"1"`, …
    pub fn scalar(y_values: Vec<f64>, probs: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (0..probs.len()).map(|a| a.to_string()).collect();
        Self::new(labels, Points::scalars(y_values), probs)
    }

    /// Product joint `p qᵀ`.
    pub fn product(px: &[f64], y_values: Vec<f64>, qy: &[f64]) -> Result<Self> {
        let probs = px.iter().map(|&p| qy.iter().map(|&q| p * q).collect()).collect();
        Self::scalar(y_values, probs)
    }

    pub fn nx(&self) -> usize {
        self.x_labels.len()
    }

    pub fn ny(&self) -> usize {
        self.y_points.len()
    }

    pub fn x_labels(&self) -> &[String] {
        &self.x_labels
    }

    pub fn y_points(&self) -> &Points {
        &self.y_points
    }

    #[inline]
    pub fn prob(&self, a: usize, b: usize) -> f64 {
        self.probs[a * self.ny() + b]
    }

    pub fn x_marginal(&self) -> Vec<f64> {
        (0..self.nx()).map(|a| (0..self.ny()).map(|b| self.prob(a, b)).sum()).collect()
    }

    pub fn y_marginal(&self) -> Vec<f64> {
        (0..self.ny()).map(|b| (0..self.nx()).map(|a| self.prob(a, b)).sum()).collect()
    }

    /// `(1 − w) P + w · P_X ⊗ P_Y`
    pub fn mix_with_product(&self, w: f64) -> Result<Self> {
        let px = self.x_marginal();
        let py = self.y_marginal();
        let probs = (0..self.nx())
            .map(|a| {
                (0..self.ny())
                    .map(|b| (1.0 - w) * self.prob(a, b) + w * px[a] * py[b])
                    .collect()
            })
            .collect();
        Self::new(self.x_labels.clone(), self.y_points.clone(), probs)
    }

    /// Parses `{"x_labels": [...], "y_points": [...], "probs": [[...]]}`.
    ///
    /// Labels may be strings or numbers. Each y point is a number or an array
    /// of numbers; with `"y_kind": "so3"` each y point is nine row-major
    /// rotation entries.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: JointDocument =
            serde_json::from_str(text).map_err(|e| Error::InvalidJoint(e.to_string()))?;
        doc.into_joint()
    }

    pub fn to_json(&self) -> String {
        let y_points: Vec<Vec<f64>> = match &self.y_points {
            Points::Real { dim, data } => data.chunks(*dim).map(<[f64]>::to_vec).collect(),
            Points::Rotations(r) => r.iter().map(|r| r.entries().to_vec()).collect(),
        };
        let doc = serde_json::json!({
            "x_labels": self.x_labels,
            "y_points": y_points,
            "y_kind": match self.y_points.kind() { PointKind::Rotation3 => "so3", _ => "real" },
            "probs": (0..self.nx()).map(|a| (0..self.ny()).map(|b| self.prob(a, b)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        });
        doc.to_string()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Label {
    Text(String),
    Number(serde_json::Number),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum YPoint {
    Scalar(f64),
    Vector(Vec<f64>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JointDocument {
    x_labels: Vec<Label>,
    y_points: Vec<YPoint>,
    probs: Vec<Vec<f64>>,
    #[serde(default)]
    y_kind: Option<String>,
}

impl JointDocument {
    fn into_joint(self) -> Result<DiscreteJoint> {
        let labels = self
            .x_labels
            .into_iter()
            .map(|l| match l {
                Label::Text(s) => s,
                Label::Number(n) => n.to_string(),
            })
            .collect();
        let rows: Vec<Vec<f64>> = self
            .y_points
            .into_iter()
            .map(|p| match p {
                YPoint::Scalar(v) => vec![v],
                YPoint::Vector(v) => v,
            })
            .collect();
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidJoint("non-finite y coordinate".into()));
        }
        let y_points = match self.y_kind.as_deref() {
            None | Some("real") => {
                if rows.is_empty() {
                    return Err(Error::InvalidJoint("empty y alphabet".into()));
                }
                Points::from_rows(&rows).map_err(|e| Error::InvalidJoint(e.to_string()))?
            }
            Some("so3") => Points::rotations(
                rows.iter()
                    .map(|r| Rotation3::from_slice(r))
                    .collect::<Result<Vec<_>>>()?,
            ),
            Some(other) => return Err(Error::InvalidJoint(format!("unknown y_kind {other:?}"))),
        };
        DiscreteJoint::new(labels, y_points, self.probs)
    }
}

/// For each y in the alphabet: `(P_Y(y), k(·, y) over the alphabet, 𝕍_Y[k(Y, y)])`.
struct Columns {
    py: Vec<f64>,
    px: Vec<f64>,
    /// row-major `ny × ny`, `gram[b * ny + c] = k(y_c, y_b)`
    gram: Vec<f64>,
}

impl Columns {
    fn new(joint: &DiscreteJoint, kernel_y: &KernelSpec) -> Result<Self> {
        kernel_y.check_points(&joint.y_points)?;
        let ny = joint.ny();
        let mut gram = vec![0.0; ny * ny];
        for b in 0..ny {
            for c in 0..ny {
                gram[b * ny + c] = kernel_y.eval_unchecked(joint.y_points.get(c), joint.y_points.get(b));
            }
        }
        Ok(Columns {
            py: joint.y_marginal(),
            px: joint.x_marginal(),
            gram,
        })
    }

    fn column(&self, b: usize) -> &[f64] {
        let ny = self.py.len();
        &self.gram[b * ny..(b + 1) * ny]
    }

    fn marginal_variance(&self, joint: &DiscreteJoint, b: usize) -> Result<f64> {
        let (m1, m2) = moments(&self.py, self.column(b));
        let var = m2 - m1 * m1;
        if var <= POPULATION_VARIANCE_FLOOR {
            return Err(Error::DegeneratePopulationVariance {
                index: b,
                point: joint.y_points.get(b).to_string(),
            });
        }
        Ok(var)
    }

    /// Conditional law of Y given x = a.
    fn conditional(&self, joint: &DiscreteJoint, a: usize) -> Vec<f64> {
        (0..joint.ny()).map(|c| joint.prob(a, c) / self.px[a]).collect()
    }
}

fn moments(weights: &[f64], values: &[f64]) -> (f64, f64) {
    weights.iter().zip(values).fold((0.0, 0.0), |(m1, m2), (w, v)| (m1 + w * v, m2 + w * v * v))
}

/// `D = 1 − Σ_y P_Y(y) 𝔼_X[𝕍_{Y|X}[k(Y, y)]] / 𝕍_Y[k(Y, y)]`.
pub fn population_d_discrete(joint: &DiscreteJoint, kernel_y: &KernelSpec) -> Result<f64> {
    let cols = Columns::new(joint, kernel_y)?;
    let mut integral = 0.0;
    for b in 0..joint.ny() {
        let var = cols.marginal_variance(joint, b)?;
        let col = cols.column(b);
        let mut expected_cond_var = 0.0;
        for a in (0..joint.nx()).filter(|&a| cols.px[a] > 0.0) {
            let (m1, m2) = moments(&cols.conditional(joint, a), col);
            expected_cond_var += cols.px[a] * (m2 - m1 * m1);
        }
        integral += cols.py[b] * expected_cond_var / var;
    }
    Ok(1.0 - integral)
}

/// `D = Σ_y P_Y(y) 𝕍_X[𝔼_{Y|X}[k(Y, y)]] / 𝕍_Y[k(Y, y)]`.
pub fn population_d_alt_discrete(joint: &DiscreteJoint, kernel_y: &KernelSpec) -> Result<f64> {
    let cols = Columns::new(joint, kernel_y)?;
    let mut integral = 0.0;
    for b in 0..joint.ny() {
        let var = cols.marginal_variance(joint, b)?;
        let col = cols.column(b);
        let (mut s1, mut s2) = (0.0, 0.0);
        for a in (0..joint.nx()).filter(|&a| cols.px[a] > 0.0) {
            let (cond_mean, _) = moments(&cols.conditional(joint, a), col);
            s1 += cols.px[a] * cond_mean;
            s2 += cols.px[a] * cond_mean * cond_mean;
        }
        integral += cols.py[b] * (s2 - s1 * s1) / var;
    }
    Ok(integral)
}

/// `η = 𝔼_X[MMD²(P_{Y|X}, P_Y)] / 𝔼_Y‖k(·, Y) − 𝔼 k(·, Y)‖²`, expanded into
/// double kernel sums over the alphabet.
pub fn population_eta_discrete(joint: &DiscreteJoint, kernel_y: &KernelSpec) -> Result<f64> {
    let cols = Columns::new(joint, kernel_y)?;
    let ny = joint.ny();
    let quad = |u: &[f64], v: &[f64]| -> f64 {
        let mut s = 0.0;
        for b in 0..ny {
            for c in 0..ny {
                s += u[b] * v[c] * cols.gram[b * ny + c];
            }
        }
        s
    };
    let diag: f64 = (0..ny).map(|b| cols.py[b] * cols.gram[b * ny + b]).sum();
    let denominator = diag - quad(&cols.py, &cols.py);
    if denominator <= POPULATION_VARIANCE_FLOOR {
        return Err(Error::DegeneratePopulationVariance {
            index: 0,
            point: "whole Y marginal".into(),
        });
    }
    let mut numerator = 0.0;
    for a in (0..joint.nx()).filter(|&a| cols.px[a] > 0.0) {
        let diff: Vec<f64> = cols
            .conditional(joint, a)
            .iter()
            .zip(&cols.py)
            .map(|(q, p)| q - p)
            .collect();
        numerator += cols.px[a] * quad(&diff, &diff);
    }
    Ok(numerator / denominator)
}

/// `n` i.i.d. draws by inverse-CDF over the cells in row-major order.
/// X label `a` is embedded as the real number `a`.
pub fn sample_from_joint(joint: &DiscreteJoint, n: usize, seed: u64) -> Result<SampleSet> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let mut cdf = Vec::with_capacity(joint.probs.len());
    let mut acc = 0.0;
    for p in &joint.probs {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;
    let last_positive = joint.probs.iter().rposition(|&p| p > 0.0).expect("mass is positive");
    let mut rng = rng_from_seed(seed);
    let ny = joint.ny();
    let mut xs = Vec::with_capacity(n);
    let mut cells = Vec::with_capacity(n);
    for _ in 0..n {
        let u = open_uniform(&mut rng) * total;
        let cell = cdf.partition_point(|&c| c <= u).min(last_positive);
        xs.push((cell / ny) as f64);
        cells.push(cell % ny);
    }
    let y = joint.y_points.permuted(&cells);
    SampleSet::new(Points::scalars(xs), y)
}
