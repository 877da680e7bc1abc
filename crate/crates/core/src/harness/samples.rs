use std::path::Path;

use num_complex::Complex64;

use super::HarnessError;
use crate::domain::{PeriodicDomain, SmoothFactor};
use crate::spectral::{fourier_coefficients, TrigPoly};

/// Values on the grid `a + k T / N`, looked up by nearest grid index.
struct Grid {
    a: f64,
    period: f64,
    values: Vec<Complex64>,
}

impl SmoothFactor for Grid {
    fn eval(&self, x: f64) -> Complex64 {
        let n = self.values.len() as i64;
        let k = ((x - self.a) / self.period * n as f64).round() as i64;
        self.values[k.rem_euclid(n) as usize]
    }
}

/// Reads `x, u_re[, u_im]` rows sampled on a uniform grid over `[a, b)` and
/// returns the interpolating trigonometric polynomial. A non-numeric first
/// row is taken as a header.
pub fn load_samples(path: &Path, dom: &PeriodicDomain) -> Result<TrigPoly, HarnessError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| HarnessError::io(path, e))?;
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| HarnessError::io(path, e))?;
        let fields: Vec<&str> = record.iter().collect();
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        let nums = match parsed {
            Ok(nums) => nums,
            Err(_) if line == 0 => continue,
            Err(_) => {
                return Err(HarnessError::Config(format!(
                    "{}: non-numeric row {}",
                    path.display(),
                    line + 1
                )))
            }
        };
        match nums[..] {
            [_, re] => values.push(Complex64::new(re, 0.0)),
            [_, re, im] => values.push(Complex64::new(re, im)),
            _ => {
                return Err(HarnessError::Config(format!(
                    "{}: row {} needs 2 or 3 columns",
                    path.display(),
                    line + 1
                )))
            }
        }
        xs.push(nums[0]);
    }

    let n = values.len();
    if n < 8 || n % 2 != 0 {
        return Err(HarnessError::Config(format!(
            "{}: need an even number (>= 8) of samples, got {n}",
            path.display()
        )));
    }
    let (a, period) = (dom.a(), dom.period());
    for (k, &x) in xs.iter().enumerate() {
        let expected = a + k as f64 * period / n as f64;
        if (x - expected).abs() > 1e-9 * period {
            return Err(HarnessError::Config(format!(
                "{}: sample {k} at x={x} is off the uniform grid (expected {expected})",
                path.display()
            )));
        }
    }
    let grid = Grid { a, period, values };
    Ok(fourier_coefficients(&grid, dom, n)?)
}
