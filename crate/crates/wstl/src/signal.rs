//! Discrete-time signals and inclusive integer time intervals.
//!
//! A [`Signal`] is a dense trace: one sample vector per time step `0..=T`,
//! with a fixed list of named components. Time is unitless; the step is 1.

use thiserror::Error;

/// Errors raised while constructing or parsing signals.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignalError {
    #[error("signal has no data rows")]
    Empty,
    #[error("row {row}: expected {expected} cells, found {found}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, column {col}: {message}")]
    Parse {
        row: usize,
        col: usize,
        message: String,
    },
    #[error("row {row}, column {col}: value is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("duplicate component name `{0}`")]
    DuplicateComponent(String),
}

/// Inclusive integer interval `[a, b]` of time steps, `0 <= a <= b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimeInterval {
    a: usize,
    b: usize,
}

/// Error for `b < a` interval bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("invalid interval [{a},{b}]: bounds must satisfy a <= b")]
pub struct InvalidInterval {
    pub a: usize,
    pub b: usize,
}

impl TimeInterval {
    pub fn new(a: usize, b: usize) -> Result<Self, InvalidInterval> {
        if a <= b {
            Ok(Self { a, b })
        } else {
            Err(InvalidInterval { a, b })
        }
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    /// Number of time steps in the interval: `b - a + 1`.
    pub fn len(&self) -> usize {
        self.b - self.a + 1
    }

    pub fn is_empty(&self) -> bool {
        false // intervals are non-empty by construction
    }

    /// Iterates the steps `a, a+1, ..., b`.
    pub fn iter(&self) -> std::ops::RangeInclusive<usize> {
        self.a..=self.b
    }

    /// The shifted interval `t + [a, b] = [t+a, t+b]`.
    pub fn shift(&self, t: usize) -> TimeInterval {
        TimeInterval {
            a: t + self.a,
            b: t + self.b,
        }
    }
}

impl std::fmt::Display for TimeInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{}]", self.a, self.b)
    }
}

/// A multi-component real-valued trace sampled at `t = 0, 1, ..., T`.
///
/// Immutable after construction; every sample has one finite entry per
/// component.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    components: Vec<String>,
    samples: Vec<Vec<f64>>,
}

impl Signal {
    pub fn new(
        components: Vec<String>,
        samples: Vec<Vec<f64>>,
    ) -> Result<Self, SignalError> {
        if samples.is_empty() {
            return Err(SignalError::Empty);
        }
        for (i, name) in components.iter().enumerate() {
            if components[..i].contains(name) {
                return Err(SignalError::DuplicateComponent(name.clone()));
            }
        }
        for (t, sample) in samples.iter().enumerate() {
            // report in file coordinates: header is row 1, sample t is row t+2
            if sample.len() != components.len() {
                return Err(SignalError::RaggedRows {
                    row: t + 2,
                    expected: components.len(),
                    found: sample.len(),
                });
            }
            for (c, value) in sample.iter().enumerate() {
                if !value.is_finite() {
                    return Err(SignalError::NonFinite { row: t + 2, col: c + 1 });
                }
            }
        }
        Ok(Self { components, samples })
    }

    pub fn components(&self) -> &[String] {
        &self.components
    }

    pub fn component_index(&self, name: &str) -> Option<usize> {
        self.components.iter().position(|c| c == name)
    }

    /// Number of samples, `T + 1`.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Index of the final sample, `T`.
    pub fn last_index(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn sample(&self, t: usize) -> &[f64] {
        &self.samples[t]
    }

    pub fn value(&self, t: usize, component: usize) -> f64 {
        self.samples[t][component]
    }

    /// Parses the signal CSV format: a header row of component names, then
    /// one row of numeric cells per time step.
    pub fn from_csv(text: &str) -> Result<Self, SignalError> {
        let text = text.strip_prefix('\u{feff}').unwrap_or(text);
        let mut rows = text
            .lines()
            .map(|line| line.strip_suffix('\r').unwrap_or(line))
            .enumerate()
            .filter(|(_, line)| !line.trim().is_empty());

        let (_, header) = rows.next().ok_or(SignalError::Empty)?;
        let components: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();

        let mut samples = Vec::new();
        let mut sample_rows = Vec::new();
        for (idx, line) in rows {
            let row = idx + 1; // 1-based file row
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != components.len() {
                return Err(SignalError::RaggedRows {
                    row,
                    expected: components.len(),
                    found: cells.len(),
                });
            }
            let mut sample = Vec::with_capacity(cells.len());
            for (c, cell) in cells.iter().enumerate() {
                let value: f64 = cell.trim().parse().map_err(|_| SignalError::Parse {
                    row,
                    col: c + 1,
                    message: format!("expected a number, found `{}`", cell.trim()),
                })?;
                if !value.is_finite() {
                    return Err(SignalError::NonFinite { row, col: c + 1 });
                }
                sample.push(value);
            }
            samples.push(sample);
            sample_rows.push(row);
        }
        if samples.is_empty() {
            return Err(SignalError::Empty);
        }
        for (i, name) in components.iter().enumerate() {
            if components[..i].contains(name) {
                return Err(SignalError::DuplicateComponent(name.clone()));
            }
        }
        Ok(Self { components, samples })
    }

    /// Renders the signal in the same CSV format `from_csv` accepts.
    ///
    /// Values use the shortest decimal form that parses back to the same
    /// float, so `from_csv(to_csv(s)) == s`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.components.join(","));
        out.push('\n');
        for sample in &self.samples {
            let cells: Vec<String> = sample.iter().map(|v| format!("{v}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}
