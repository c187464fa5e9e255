//! Sample grids: `log:lo,hi,n`, `lin:lo,hi,n` and `sym:radius,step`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::ParseError;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Grid {
    /// `n` points, geometrically spaced on `[lo, hi]`, `0 < lo < hi`.
    Log { lo: f64, hi: f64, n: usize },
    /// `n` points, evenly spaced on `[lo, hi]`.
    Lin { lo: f64, hi: f64, n: usize },
    /// All multiples `i * step` with `|i * step| <= radius`.
    Sym { radius: f64, step: f64 },
}

impl Grid {
    pub fn log(lo: f64, hi: f64, n: usize) -> Self {
        Grid::Log { lo, hi, n }
    }

    pub fn lin(lo: f64, hi: f64, n: usize) -> Self {
        Grid::Lin { lo, hi, n }
    }

    pub fn sym(radius: f64, step: f64) -> Self {
        Grid::Sym { radius, step }
    }

    pub fn points(&self) -> Vec<f64> {
        match *self {
            Grid::Log { lo, hi, n } => {
                if n == 1 {
                    return vec![lo];
                }
                let (a, b) = (lo.ln(), hi.ln());
                let step = (b - a) / (n - 1) as f64;
                (0..n)
                    .map(|i| match i {
                        0 => lo,
                        i if i == n - 1 => hi,
                        i => (a + step * i as f64).exp(),
                    })
                    .collect()
            }
            Grid::Lin { lo, hi, n } => {
                if n == 1 {
                    return vec![lo];
                }
                let step = (hi - lo) / (n - 1) as f64;
                (0..n)
                    .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                    .collect()
            }
            Grid::Sym { radius, step } => {
                let half = (radius / step + 1e-9).floor() as i64;
                (-half..=half).map(|i| i as f64 * step).collect()
            }
        }
    }

    /// Largest absolute coordinate on the grid.
    pub fn radius(&self) -> f64 {
        match *self {
            Grid::Log { hi, .. } => hi,
            Grid::Lin { lo, hi, .. } => lo.abs().max(hi.abs()),
            Grid::Sym { radius, .. } => radius,
        }
    }

    /// Same spacing rule, radius multiplied by `factor`. Symmetric grids keep
    /// their step so the enlarged grid contains the original one.
    pub fn enlarged(&self, factor: f64) -> Grid {
        match *self {
            Grid::Log { lo, hi, n } => Grid::Log {
                lo,
                hi: hi * factor,
                n: ((n as f64) * factor).ceil() as usize,
            },
            Grid::Lin { lo, hi, n } => Grid::Lin {
                lo: lo * factor,
                hi: hi * factor,
                n: ((n as f64) * factor).ceil() as usize,
            },
            Grid::Sym { radius, step } => Grid::Sym {
                radius: radius * factor,
                step,
            },
        }
    }

    /// Grid restricted to half the radius (for growth-trend comparisons).
    pub fn shrunk(&self, factor: f64) -> Grid {
        match *self {
            Grid::Log { lo, hi, n } => {
                let hi2 = (hi / factor).max(lo);
                let frac = (hi2 / lo).ln() / (hi / lo).ln();
                Grid::Log {
                    lo,
                    hi: hi2,
                    n: ((n as f64 * frac).ceil() as usize).max(2),
                }
            }
            Grid::Lin { lo, hi, n } => Grid::Lin {
                lo: lo / factor,
                hi: hi / factor,
                n: ((n as f64) / factor).ceil().max(2.0) as usize,
            },
            Grid::Sym { radius, step } => Grid::Sym {
                radius: radius / factor,
                step,
            },
        }
    }

    pub fn validate(&self) -> Result<(), ParseError> {
        let bad = |m: &str| Err(ParseError::Grid(m.to_string()));
        match *self {
            Grid::Log { lo, hi, n } => {
                if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite()) {
                    return bad("log grid needs 0 < lo < hi");
                }
                if n < 2 {
                    return bad("log grid needs at least 2 points");
                }
            }
            Grid::Lin { lo, hi, n } => {
                if !(hi > lo && lo.is_finite() && hi.is_finite()) || n < 2 {
                    return bad("lin grid needs lo < hi and at least 2 points");
                }
            }
            Grid::Sym { radius, step } => {
                if !(radius > 0.0 && step > 0.0 && step <= radius && radius.is_finite()) {
                    return bad("sym grid needs 0 < step <= radius");
                }
            }
        }
        Ok(())
    }
}

impl FromStr for Grid {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseError::Grid(format!("cannot parse grid `{s}`"));
        let (kind, rest) = s.split_once(':').ok_or_else(err)?;
        let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
        let num = |i: usize| -> Result<f64, ParseError> {
            parts
                .get(i)
                .ok_or_else(err)?
                .parse::<f64>()
                .map_err(|_| err())
        };
        let count = |i: usize| -> Result<usize, ParseError> {
            parts
                .get(i)
                .ok_or_else(err)?
                .parse::<usize>()
                .map_err(|_| err())
        };
        let g = match kind.trim() {
            "log" if parts.len() == 3 => Grid::Log {
                lo: num(0)?,
                hi: num(1)?,
                n: count(2)?,
            },
            "lin" if parts.len() == 3 => Grid::Lin {
                lo: num(0)?,
                hi: num(1)?,
                n: count(2)?,
            },
            "sym" if parts.len() == 2 => Grid::Sym {
                radius: num(0)?,
                step: num(1)?,
            },
            _ => return Err(err()),
        };
        g.validate()?;
        Ok(g)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grid::Log { lo, hi, n } => write!(f, "log:{lo:e},{hi:e},{n}"),
            Grid::Lin { lo, hi, n } => write!(f, "lin:{lo},{hi},{n}"),
            Grid::Sym { radius, step } => write!(f, "sym:{radius},{step}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_kinds() {
        let g: Grid = "log:1e-2,1e8,2000".parse().unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 2000);
        assert_eq!(pts[0], 1e-2);
        assert_eq!(pts[1999], 1e8);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));

        let s: Grid = "sym:6,0.015625".parse().unwrap();
        let pts = s.points();
        assert_eq!(pts.len(), 769);
        assert_eq!(pts[384], 0.0);
        assert_eq!(*pts.last().unwrap(), 6.0);

        assert!("log:0,1,10".parse::<Grid>().is_err());
        assert!("cube:1,2".parse::<Grid>().is_err());
    }

    #[test]
    fn enlarged_sym_grid_contains_original() {
        let g = Grid::sym(5.0, 0.25);
        let big = g.enlarged(1.25).points();
        for p in g.points() {
            assert!(big.contains(&p));
        }
    }
}
