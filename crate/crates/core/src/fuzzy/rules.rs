use serde::{Deserialize, Serialize};

use super::label::LinguisticLabel::{self, *};
use super::FuzzyError;

/// 7x7 rule base: `rows[e][de]` is the output label for that antecedent pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleTable {
    rows: [[LinguisticLabel; 7]; 7],
}

const DEFAULT_ROWS: [[LinguisticLabel; 7]; 7] = [
    [NB, NB, NM, NM, NS, NS, ZO],
    [NB, NM, NM, NS, NS, ZO, PS],
    [NM, NM, NS, NS, ZO, PS, PS],
    [NM, NS, NS, ZO, PS, PS, PM],
    [NS, NS, ZO, PS, PS, PM, PM],
    [NS, ZO, PS, PS, PM, PM, PB],
    [ZO, PS, PS, PM, PM, PB, PB],
];

impl Default for RuleTable {
    fn default() -> Self {
        RuleTable { rows: DEFAULT_ROWS }
    }
}

impl RuleTable {
    pub fn new(rows: [[LinguisticLabel; 7]; 7]) -> Result<Self, FuzzyError> {
        let table = RuleTable { rows };
        table.validate()?;
        Ok(table)
    }

    /// Parses seven whitespace-separated rows of seven labels each.
    pub fn parse_rows<S: AsRef<str>>(lines: &[S]) -> Result<Self, FuzzyError> {
        if lines.len() != 7 {
            return Err(FuzzyError::InvalidTable(format!(
                "expected 7 rows, got {}",
                lines.len()
            )));
        }
        let mut rows = [[ZO; 7]; 7];
        for (i, line) in lines.iter().enumerate() {
            let cells: Vec<&str> = line.as_ref().split_whitespace().collect();
            if cells.len() != 7 {
                return Err(FuzzyError::InvalidTable(format!(
                    "row {i}: expected 7 labels, got {}",
                    cells.len()
                )));
            }
            for (j, cell) in cells.iter().enumerate() {
                rows[i][j] = cell.parse()?;
            }
        }
        Self::new(rows)
    }

    /// Rows rendered back into the textual form accepted by [`parse_rows`](Self::parse_rows).
    pub fn to_rows(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|l| l.as_str()).collect::<Vec<_>>().join(" "))
            .collect()
    }

    pub fn get(&self, e: LinguisticLabel, de: LinguisticLabel) -> LinguisticLabel {
        self.rows[e.index()][de.index()]
    }

    pub fn rows(&self) -> &[[LinguisticLabel; 7]; 7] {
        &self.rows
    }

    /// Odd symmetry (negating both inputs negates the output) and
    /// monotonicity along every row and column.
    pub fn validate(&self) -> Result<(), FuzzyError> {
        for i in 0..7 {
            for j in 0..7 {
                if self.rows[6 - i][6 - j] != self.rows[i][j].negate() {
                    return Err(FuzzyError::InvalidTable(format!(
                        "cell ({i}, {j}) breaks odd symmetry"
                    )));
                }
                if j > 0 && self.rows[i][j] < self.rows[i][j - 1] {
                    return Err(FuzzyError::InvalidTable(format!("row {i} is not monotone")));
                }
                if i > 0 && self.rows[i][j] < self.rows[i - 1][j] {
                    return Err(FuzzyError::InvalidTable(format!(
                        "column {j} is not monotone"
                    )));
                }
            }
        }
        Ok(())
    }
}
