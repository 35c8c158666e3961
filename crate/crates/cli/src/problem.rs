use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use turnpath_core::region::region_bounding_box;
use turnpath_core::TurnRegion;
use turnpath_core::{CostModel, GridSpec, Point, Rect};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostSpec {
    #[serde(default = "one")]
    pub length_weight: f64,
    #[serde(default)]
    pub turn_weight: f64,
}

fn one() -> f64 {
    1.0
}

fn default_tolerance() -> f64 {
    1e-9
}

impl Default for CostSpec {
    fn default() -> Self {
        CostSpec {
            length_weight: 1.0,
            turn_weight: 0.0,
        }
    }
}

/// A planning problem as read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(rename = "A")]
    pub a: Point,
    #[serde(rename = "B")]
    pub b: Point,
    pub n: usize,
    /// Turn bound in radians (degrees when loaded with `degrees = true`).
    pub phi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub cost: CostSpec,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub strict_turns: bool,
    #[serde(default)]
    pub seed: u64,
}

impl ProblemFile {
    pub fn from_json(text: &str, degrees: bool) -> CliResult<Self> {
        let mut p: ProblemFile =
            serde_json::from_str(text).map_err(|e| CliError::Validation(format!("invalid problem file: {e}")))?;
        if degrees {
            p.phi = p.phi.to_radians();
        }
        p.validate()?;
        Ok(p)
    }

    pub fn load(path: &Path, degrees: bool) -> CliResult<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text, degrees)
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Validation(m));
        if !(self.a.is_finite() && self.b.is_finite() && self.phi.is_finite()) {
            return bad("A, B and phi must be finite".into());
        }
        if self.a == self.b {
            return bad("A and B must differ".into());
        }
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.phi <= 0.0 {
            return bad(format!("phi must be positive, got {}", self.phi));
        }
        if self.span() >= PI {
            return bad(format!(
                "n*phi = {} >= pi is outside the supported regime (every point would be reachable)",
                self.span()
            ));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return bad(format!("tolerance must be finite and >= 0, got {}", self.tolerance));
        }
        let c = self.cost;
        if !(c.length_weight >= 0.0 && c.turn_weight >= 0.0 && c.length_weight.is_finite() && c.turn_weight.is_finite())
        {
            return bad("cost weights must be finite and >= 0".into());
        }
        if let Some(g) = &self.grid {
            g.validate()?;
        }
        Ok(())
    }

    /// `n * phi`.
    pub fn span(&self) -> f64 {
        self.n as f64 * self.phi
    }

    pub fn region(&self) -> CliResult<TurnRegion> {
        Ok(TurnRegion::new(self.a, self.b, self.span())?)
    }

    pub fn region_box(&self) -> CliResult<Rect> {
        Ok(region_bounding_box(&self.region()?)?)
    }

    pub fn cost_model(&self) -> CostModel {
        CostModel::new(self.cost.length_weight, self.cost.turn_weight)
    }

    /// The given grid, or the bounding box of `S(A, B, n phi)` padded by `tau`.
    pub fn grid_or_default(&self, tau: Option<f64>) -> CliResult<GridSpec> {
        match (&self.grid, tau) {
            (Some(g), None) => Ok(*g),
            (Some(g), Some(t)) => Ok(GridSpec::new(g.q, g.p, t)?),
            (None, Some(t)) => Ok(GridSpec::covering(&self.region_box()?, t)?),
            (None, None) => Err(CliError::Validation(
                "no grid given; add \"grid\" to the problem file".into(),
            )),
        }
    }

    /// Warnings about a grid that does not contain `S(A, B, n phi)`.
    pub fn grid_warnings(&self, grid: &GridSpec) -> CliResult<Vec<String>> {
        let r = self.region_box()?;
        let q = grid.rect();
        if q.contains(r.min) && q.contains(r.max) {
            Ok(Vec::new())
        } else {
            Ok(vec![format!(
                "grid [{}, {}] x [{}, {}] does not contain S(A, B, n phi); results are restricted to the grid",
                q.min.x, q.max.x, q.min.y, q.max.y
            )])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal_and_defaults() {
        let p = ProblemFile::from_json(r#"{"A":[0,-1],"B":[0,1],"n":2,"phi":0.5}"#, false).unwrap();
        assert_eq!(p.tolerance, 1e-9);
        assert_eq!(p.cost, CostSpec::default());
        assert!(!p.strict_turns);
        assert!(p.grid.is_none());
        let g = p.grid_or_default(Some(0.25)).unwrap();
        assert!(p.grid_warnings(&g).unwrap().is_empty());
        let back: ProblemFile = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn rejects_bad_problems() {
        for text in [
            r#"{"A":[0,-1],"B":[0,1],"n":4,"phi":0.8}"#,
            r#"{"A":[0,1],"B":[0,1],"n":1,"phi":0.5}"#,
            r#"{"A":[0,-1],"B":[0,1],"n":0,"phi":0.5}"#,
            r#"{"A":[0,-1],"B":[0,1],"n":1,"phi":-0.5}"#,
            r#"{"A":[0,-1],"B":[0,1],"n":1,"phi":0.5,"grid":{"q":[0,0],"p":[1,1],"tau":[0.1,0.2]}}"#,
            r#"{"A":[0,-1],"B":[0,1],"n":1,"phi":0.5,"extra":1}"#,
            r#"{"A":[0,-1],"B":[0,1],"n":1}"#,
        ] {
            assert!(
                matches!(ProblemFile::from_json(text, false), Err(CliError::Validation(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn degrees_and_grid_warning() {
        let p = ProblemFile::from_json(
            r#"{"A":[0,-1],"B":[0,1],"n":1,"phi":90,"grid":{"q":[0,0],"p":[1,1],"tau":0.5}}"#,
            true,
        )
        .unwrap();
        assert!((p.phi - PI / 2.0).abs() < 1e-15);
        assert_eq!(p.grid_warnings(&p.grid.unwrap()).unwrap().len(), 1);
    }
}
