use crate::error::{Error, Result};

/// Reviews left by buyers of a single type, in arrival order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TypeReviews {
    values: Vec<f64>,
    sum: f64,
}

impl TypeReviews {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Running sum, accumulated left to right in arrival order.
    pub fn sum(&self) -> f64 {
        self.sum
    }

    pub fn mean(&self) -> Option<f64> {
        (!self.values.is_empty()).then(|| self.sum / self.values.len() as f64)
    }

    fn push(&mut self, value: f64) {
        self.values.push(value);
        self.sum += value;
    }
}

/// Append-only log of `(type, ex-post value)` reviews with per-type views.
#[derive(Debug, Clone, PartialEq)]
pub struct ReviewLog {
    entries: Vec<(usize, f64)>,
    by_type: Vec<TypeReviews>,
}

impl ReviewLog {
    pub fn new(d: usize) -> Self {
        Self {
            entries: Vec::new(),
            by_type: vec![TypeReviews::default(); d],
        }
    }

    pub fn append(&mut self, type_index: usize, value: f64) -> Result<()> {
        let d = self.by_type.len();
        let slot = self
            .by_type
            .get_mut(type_index)
            .ok_or(Error::TypeOutOfRange {
                index: type_index,
                d,
            })?;
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidParameter(format!(
                "review value {value} outside [0, 1]"
            )));
        }
        slot.push(value);
        self.entries.push((type_index, value));
        Ok(())
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn d(&self) -> usize {
        self.by_type.len()
    }

    /// Reviews of type `type_index`. Panics if the index is out of range.
    pub fn of_type(&self, type_index: usize) -> &TypeReviews {
        &self.by_type[type_index]
    }
}
