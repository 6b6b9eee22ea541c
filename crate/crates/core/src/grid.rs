//! Uniform tensor grids in the `(x1, x2)` plane and the `x1,x2,value` CSV
//! schema shared by sampled surfaces and phases.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned rectangle `[x1_min, x1_max] x [x2_min, x2_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x1_min: f64,
    pub x1_max: f64,
    pub x2_min: f64,
    pub x2_max: f64,
}

impl Rect {
    pub fn new(x1_min: f64, x1_max: f64, x2_min: f64, x2_max: f64) -> Result<Self> {
        let ok = [x1_min, x1_max, x2_min, x2_max].iter().all(|v| v.is_finite())
            && x1_min < x1_max
            && x2_min < x2_max;
        if !ok {
            return Err(Error::bad_params(
                "rect",
                format!("invalid bounds [{x1_min}, {x1_max}] x [{x2_min}, {x2_max}]"),
            ));
        }
        Ok(Self {
            x1_min,
            x1_max,
            x2_min,
            x2_max,
        })
    }

    /// Square `[-half, half]^2`.
    pub fn centered(half: f64) -> Self {
        Self::new(-half, half, -half, half).expect("half-width must be positive")
    }

    pub fn contains(&self, x1: f64, x2: f64) -> bool {
        x1 >= self.x1_min && x1 <= self.x1_max && x2 >= self.x2_min && x2 <= self.x2_max
    }

    pub fn diameter(&self) -> f64 {
        (self.x1_max - self.x1_min).hypot(self.x2_max - self.x2_min)
    }

    pub fn center(&self) -> (f64, f64) {
        (
            0.5 * (self.x1_min + self.x1_max),
            0.5 * (self.x2_min + self.x2_max),
        )
    }
}

/// Node layout of a uniform `n1 x n2` grid covering a rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub rect: Rect,
    pub n1: usize,
    pub n2: usize,
}

impl GridSpec {
    pub fn new(rect: Rect, n1: usize, n2: usize) -> Self {
        Self { rect, n1, n2 }
    }

    pub fn h1(&self) -> f64 {
        (self.rect.x1_max - self.rect.x1_min) / (self.n1.max(2) - 1) as f64
    }

    pub fn h2(&self) -> f64 {
        (self.rect.x2_max - self.rect.x2_min) / (self.n2.max(2) - 1) as f64
    }

    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.rect.x1_min + i as f64 * self.h1(),
            self.rect.x2_min + j as f64 * self.h2(),
        )
    }

    /// Row-major index with `i` (along x1) varying fastest.
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n1 + i
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
        (0..self.n2).flat_map(move |j| {
            (0..self.n1).map(move |i| {
                let (x1, x2) = self.node(i, j);
                (i, j, x1, x2)
            })
        })
    }

    /// Cell containing `(x1, x2)` and the local coordinates inside it. Points
    /// outside the grid map to the nearest edge cell with local coordinates
    /// outside `[0, 1]`, which turns bilinear interpolation into linear
    /// extrapolation.
    pub fn locate(&self, x1: f64, x2: f64) -> (usize, usize, f64, f64) {
        let f1 = (x1 - self.rect.x1_min) / self.h1();
        let f2 = (x2 - self.rect.x2_min) / self.h2();
        let i = (f1.floor().max(0.0) as usize).min(self.n1 - 2);
        let j = (f2.floor().max(0.0) as usize).min(self.n2 - 2);
        (i, j, f1 - i as f64, f2 - j as f64)
    }
}

/// Scalar samples on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridData {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

impl GridData {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if spec.n1 < 2 || spec.n2 < 2 {
            return Err(Error::SingularSystem(spec.n1, spec.n2));
        }
        if values.len() != spec.len() {
            return Err(Error::bad_params(
                "grid",
                format!("expected {} values, got {}", spec.len(), values.len()),
            ));
        }
        Ok(Self { spec, values })
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = spec.nodes().map(|(_, _, x1, x2)| f(x1, x2)).collect();
        Self::new(spec, values)
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.spec.index(i, j)]
    }

    pub fn bilinear(&self, x1: f64, x2: f64) -> f64 {
        let (i, j, s, t) = self.spec.locate(x1, x2);
        let v00 = self.at(i, j);
        let v10 = self.at(i + 1, j);
        let v01 = self.at(i, j + 1);
        let v11 = self.at(i + 1, j + 1);
        (1.0 - s) * (1.0 - t) * v00 + s * (1.0 - t) * v10 + (1.0 - s) * t * v01 + s * t * v11
    }

    /// Read a grid from CSV with header `x1,x2,<value>`. Rows may come in any
    /// order but must fill a complete uniform tensor grid.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)?;
        let mut rows: Vec<(f64, f64, f64)> = Vec::new();
        for record in reader.records() {
            let record = record?;
            if record.len() < 3 {
                return Err(Error::ConfigParse(format!(
                    "{}: expected 3 columns, got {}",
                    path.display(),
                    record.len()
                )));
            }
            let parse = |k: usize| -> Result<f64> {
                record[k].trim().parse::<f64>().map_err(|e| {
                    Error::ConfigParse(format!("{}: bad number `{}`: {e}", path.display(), &record[k]))
                })
            };
            rows.push((parse(0)?, parse(1)?, parse(2)?));
        }
        Self::from_rows(&rows)
    }

    pub fn from_rows(rows: &[(f64, f64, f64)]) -> Result<Self> {
        let mut xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let mut ys: Vec<f64> = rows.iter().map(|r| r.1).collect();
        for v in [&mut xs, &mut ys] {
            v.sort_by(f64::total_cmp);
            v.dedup();
        }
        let (n1, n2) = (xs.len(), ys.len());
        if n1 < 2 || n2 < 2 {
            return Err(Error::SingularSystem(n1, n2));
        }
        if rows.len() != n1 * n2 {
            return Err(Error::bad_params("grid", "rows do not form a complete tensor grid"));
        }
        let rect = Rect::new(xs[0], xs[n1 - 1], ys[0], ys[n2 - 1])?;
        let spec = GridSpec::new(rect, n1, n2);
        let tol = 1e-9 * rect.diameter();
        for (k, x) in xs.iter().enumerate() {
            if (spec.node(k, 0).0 - x).abs() > tol {
                return Err(Error::bad_params("grid", "x1 coordinates are not uniformly spaced"));
            }
        }
        for (k, y) in ys.iter().enumerate() {
            if (spec.node(0, k).1 - y).abs() > tol {
                return Err(Error::bad_params("grid", "x2 coordinates are not uniformly spaced"));
            }
        }
        let mut values = vec![f64::NAN; spec.len()];
        for &(x1, x2, v) in rows {
            let i = ((x1 - rect.x1_min) / spec.h1()).round() as usize;
            let j = ((x2 - rect.x2_min) / spec.h2()).round() as usize;
            values[spec.index(i, j)] = v;
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::bad_params("grid", "duplicate or missing grid nodes"));
        }
        Self::new(spec, values)
    }

    pub fn write_csv(&self, path: &Path, value_column: &str) -> Result<()> {
        let mut writer = csv::Writer::from_path(path)?;
        writer.write_record(["x1", "x2", value_column])?;
        for (i, j, x1, x2) in self.spec.nodes() {
            writer.write_record([
                crate::output::fmt_f64(x1),
                crate::output::fmt_f64(x2),
                crate::output::fmt_f64(self.at(i, j)),
            ])?;
        }
        writer.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}
