//! Signed fuzzy dependency graph: membership mapping of mined strengths,
//! precedence overrides and an optional signed max–min closure.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::mining::EellsMatrix;
use crate::model::{InfluenceMatrix, PrecedenceMatrix};

/// Monotone map `[0,1] → [0,1]` with `g(0) = 0`, `g(1) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "MembershipRepr")]
pub enum MembershipFunction {
    #[default]
    Identity,
    /// 0 below `lo`, linear ramp to 1 at `hi`.
    ThresholdedLinear { lo: f64, hi: f64 },
    /// `x^exponent`, `0 < exponent < 1`.
    Concave { exponent: f64 },
    /// Smoothstep from `lo` to `hi`.
    SCurve { lo: f64, hi: f64 },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MembershipRepr {
    Text(String),
    Tagged(TaggedMembership),
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum TaggedMembership {
    Identity,
    ThresholdedLinear { lo: f64, hi: f64 },
    Concave { exponent: f64 },
    SCurve { lo: f64, hi: f64 },
}

impl TryFrom<MembershipRepr> for MembershipFunction {
    type Error = Error;

    fn try_from(r: MembershipRepr) -> Result<Self> {
        let g = match r {
            MembershipRepr::Text(s) => return s.parse(),
            MembershipRepr::Tagged(TaggedMembership::Identity) => Self::Identity,
            MembershipRepr::Tagged(TaggedMembership::ThresholdedLinear { lo, hi }) => Self::ThresholdedLinear { lo, hi },
            MembershipRepr::Tagged(TaggedMembership::Concave { exponent }) => Self::Concave { exponent },
            MembershipRepr::Tagged(TaggedMembership::SCurve { lo, hi }) => Self::SCurve { lo, hi },
        };
        g.validated()
    }
}

impl MembershipFunction {
    pub fn validated(self) -> Result<Self> {
        let ok = match self {
            Self::Identity => true,
            Self::ThresholdedLinear { lo, hi } | Self::SCurve { lo, hi } => 0.0 <= lo && lo < hi && hi <= 1.0,
            Self::Concave { exponent } => exponent > 0.0 && exponent < 1.0,
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::Invalid(format!("bad membership parameters: {self}")))
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match *self {
            Self::Identity => x,
            Self::ThresholdedLinear { lo, hi } => {
                if x < lo {
                    0.0
                } else if x >= hi {
                    1.0
                } else {
                    (x - lo) / (hi - lo)
                }
            }
            Self::Concave { exponent } => x.powf(exponent),
            Self::SCurve { lo, hi } => {
                let t = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
                t * t * (3.0 - 2.0 * t)
            }
        }
    }
}

impl fmt::Display for MembershipFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => write!(f, "identity"),
            Self::ThresholdedLinear { lo, hi } => write!(f, "tl:{lo}:{hi}"),
            Self::Concave { exponent } => write!(f, "concave:{exponent}"),
            Self::SCurve { lo, hi } => write!(f, "sc:{lo}:{hi}"),
        }
    }
}

/// `identity`, `tl:LO:HI`, `concave:P`, `sc:LO:HI`.
impl FromStr for MembershipFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| Error::Invalid(format!("membership `{s}`: `{t}` is not a number")))
        };
        let g = match parts.as_slice() {
            ["identity"] => Self::Identity,
            ["tl", lo, hi] => Self::ThresholdedLinear { lo: num(lo)?, hi: num(hi)? },
            ["concave", p] => Self::Concave { exponent: num(p)? },
            ["sc", lo, hi] => Self::SCurve { lo: num(lo)?, hi: num(hi)? },
            _ => return Err(Error::Invalid(format!("unknown membership `{s}`"))),
        };
        g.validated()
    }
}

/// `d = sign(η)·g(|η|)` off the diagonal; the diagonal is +1.
pub fn apply_membership(eta: &EellsMatrix, g: &MembershipFunction) -> InfluenceMatrix {
    let n = eta.dim();
    let entries = Grid::from_fn(n, n, |i, j| {
        if i == j {
            return 1.0;
        }
        let e = eta.get(i, j);
        if e > 0.0 {
            g.eval(e)
        } else if e < 0.0 {
            -g.eval(-e)
        } else {
            0.0
        }
    });
    InfluenceMatrix::new(eta.ids().to_vec(), entries).expect("membership output is a valid influence matrix")
}

/// Every nonzero precedence cell replaces the strength with ±1.
pub fn apply_precedence(d: &InfluenceMatrix, gamma: &PrecedenceMatrix) -> Result<InfluenceMatrix> {
    let n = d.dim();
    if gamma.dim() != n {
        return Err(Error::Dimension {
            what: "precedence matrix vs influence matrix".into(),
            expected: n,
            found: gamma.dim(),
        });
    }
    let entries = Grid::from_fn(n, n, |i, j| match gamma.get(i, j) {
        0 => d.get(i, j),
        s => s as f64,
    });
    InfluenceMatrix::new(d.ids().to_vec(), entries)
}

/// Positive and negative path strengths of every ordered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedStrengths {
    pub positive: Grid<f64>,
    pub negative: Grid<f64>,
}

impl SignedStrengths {
    pub fn split(d: &InfluenceMatrix) -> Self {
        let n = d.dim();
        Self {
            positive: Grid::from_fn(n, n, |i, j| d.get(i, j).max(0.0)),
            negative: Grid::from_fn(n, n, |i, j| (-d.get(i, j)).max(0.0)),
        }
    }

    /// Relaxes through every intermediate until nothing changes. Strengths
    /// only take values already present, so this terminates.
    pub fn close(mut self) -> Self {
        let n = self.positive.rows();
        loop {
            let mut changed = false;
            for k in 0..n {
                for i in 0..n {
                    let (pik, nik) = (self.positive[(i, k)], self.negative[(i, k)]);
                    if pik == 0.0 && nik == 0.0 {
                        continue;
                    }
                    for j in 0..n {
                        let (pkj, nkj) = (self.positive[(k, j)], self.negative[(k, j)]);
                        let pos = pik.min(pkj).max(nik.min(nkj));
                        let neg = pik.min(nkj).max(nik.min(pkj));
                        if pos > self.positive[(i, j)] {
                            self.positive[(i, j)] = pos;
                            changed = true;
                        }
                        if neg > self.negative[(i, j)] {
                            self.negative[(i, j)] = neg;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return self;
            }
        }
    }

    /// Dominant sign per pair, 0 on ties; diagonal +1.
    pub fn resolve(&self, ids: &[String]) -> InfluenceMatrix {
        let n = self.positive.rows();
        let entries = Grid::from_fn(n, n, |i, j| {
            let (p, q) = (self.positive[(i, j)], self.negative[(i, j)]);
            if i == j {
                1.0
            } else if p > q {
                p
            } else if q > p {
                -q
            } else {
                0.0
            }
        });
        InfluenceMatrix::new(ids.to_vec(), entries).expect("closure output is a valid influence matrix")
    }
}

/// Signed max–min transitive closure of `d`.
pub fn transitive_influence(d: &InfluenceMatrix) -> InfluenceMatrix {
    SignedStrengths::split(d).close().resolve(d.ids())
}
