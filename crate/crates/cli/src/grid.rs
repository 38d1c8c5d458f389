use plurigreen_core::{CPoint, Complex64};

use crate::CliError;

/// One axis per real coordinate, in the order `x1r,x1i,x2r,...`.
#[derive(Debug, Clone, PartialEq)]
pub enum Axis {
    Fixed(f64),
    /// `count` equispaced values from `lo` to `hi` inclusive.
    Range { lo: f64, hi: f64, count: usize },
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Axis::Fixed(v) => vec![v],
            Axis::Range { lo, count: 1, .. } => vec![lo],
            Axis::Range { lo, hi, count } => (0..count)
                .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
                .collect(),
        }
    }

    pub fn varies(&self) -> bool {
        matches!(self, Axis::Range { count, .. } if *count > 1)
    }
}

/// A product grid such as `-0.9:0.9:21,0,0.5,0`: a 21-point line in
/// `Re z1` with `z2 = 0.5`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub axes: Vec<Axis>,
}

impl GridSpec {
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let bad = |m: String| CliError::Usage(format!("grid {spec:?}: {m}"));
        let axes = spec
            .split(',')
            .map(|part| {
                let fields: Vec<&str> = part.split(':').map(str::trim).collect();
                let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("{s:?} is not a number")));
                match fields.as_slice() {
                    [v] => Ok(Axis::Fixed(num(v)?)),
                    [lo, hi, n] => Ok(Axis::Range {
                        lo: num(lo)?,
                        hi: num(hi)?,
                        count: n.parse().map_err(|_| bad(format!("{n:?} is not a count")))?,
                    }),
                    _ => Err(bad(format!("axis {part:?} is neither a value nor lo:hi:count"))),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        if axes.len() % 2 != 0 {
            return Err(bad("needs a real and an imaginary axis per coordinate".into()));
        }
        Ok(GridSpec { axes })
    }

    pub fn dim(&self) -> usize {
        self.axes.len() / 2
    }

    /// Grid points in row-major order, the last axis varying fastest.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = vec![Vec::new()];
        for axis in &self.axes {
            let vals = axis.values();
            out = out
                .into_iter()
                .flat_map(|p| {
                    vals.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        out
    }

    /// Indices of the axes that take more than one value.
    pub fn varying(&self) -> Vec<usize> {
        (0..self.axes.len()).filter(|&i| self.axes[i].varies()).collect()
    }
}

/// Parses `x1r,x1i,x2r,x2i,...` into a point.
pub fn parse_point(text: &str) -> Result<CPoint, CliError> {
    let vals = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Usage(format!("point {text:?}: expected comma-separated reals")))?;
    point_from_reals(&vals)
}

pub fn point_from_reals(vals: &[f64]) -> Result<CPoint, CliError> {
    if vals.is_empty() || vals.len() % 2 != 0 {
        return Err(CliError::Usage(
            "a point needs a real and an imaginary part per coordinate".into(),
        ));
    }
    CPoint::new(vals.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect())
        .map_err(|e| CliError::Usage(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_order_and_counts() {
        let g = GridSpec::parse("-1:1:3,0,0.5,0:0.2:2").unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], vec![-1.0, 0.0, 0.5, 0.0]);
        assert_eq!(pts[1], vec![-1.0, 0.0, 0.5, 0.2]);
        assert_eq!(pts[5], vec![1.0, 0.0, 0.5, 0.2]);
        assert_eq!(g.varying(), vec![0, 3]);
    }

    #[test]
    fn empty_axis_gives_no_points() {
        let g = GridSpec::parse("0:1:0,0").unwrap();
        assert!(g.points().is_empty());
    }

    #[test]
    fn rejects_malformed() {
        assert!(GridSpec::parse("0:1,0").is_err());
        assert!(GridSpec::parse("0,0,1").is_err());
        assert!(parse_point("0.5,x").is_err());
        assert!(parse_point("0.5").is_err());
        assert_eq!(parse_point("0.5,0,0.6,-0.1").unwrap().dim(), 2);
    }
}
