use super::RegressionError;

/// Named numeric columns, one row per organization.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    row_ids: Vec<String>,
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn new(
        row_ids: Vec<String>,
        names: Vec<String>,
        columns: Vec<Vec<f64>>,
    ) -> Result<Self, RegressionError> {
        let n = row_ids.len();
        if names.len() != columns.len() {
            return Err(RegressionError::InvalidBlocks(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        for (name, col) in names.iter().zip(&columns) {
            if col.len() != n {
                return Err(RegressionError::LengthMismatch {
                    name: name.clone(),
                    len: col.len(),
                    expected: n,
                });
            }
            if col.iter().any(|x| !x.is_finite()) {
                return Err(RegressionError::NonFinite(name.clone()));
            }
        }
        Ok(Self {
            row_ids,
            names,
            columns,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    pub fn column(&self, name: &str) -> Result<&[f64], RegressionError> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
            .ok_or_else(|| RegressionError::UnknownColumn(name.to_owned()))
    }

    /// `(name, values)` pairs for the requested columns, in request order.
    pub fn design<'a, S: AsRef<str>>(
        &'a self,
        names: &'a [S],
    ) -> Result<Vec<(&'a str, &'a [f64])>, RegressionError> {
        names
            .iter()
            .map(|n| Ok((n.as_ref(), self.column(n.as_ref())?)))
            .collect()
    }
}
