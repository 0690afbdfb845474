use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Transmit,
    Listen,
}

impl Role {
    pub fn letter(self) -> char {
        match self {
            Role::Transmit => 'T',
            Role::Listen => 'L',
        }
    }
}

/// Three-node transmit/listen schedule; node A is the reference.
pub const EXAMPLE_PATTERN_CSV: &str = "\
A,T,T,L,L,T,L,T,L,L,T,T,L,T,T,L
B,L,L,T,L,T,T,L,T,L,L,L,L,T,T,T
C,L,T,T,L,T,L,L,T,T,T,T,T,T,T,L
";

/// Scripted roles, one row per node with the reference first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RolePattern {
    pub labels: Vec<String>,
    /// `roles[node][slot]`.
    pub roles: Vec<Vec<Role>>,
}

impl RolePattern {
    /// Parses lines of the form `label,T,L,...`. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut labels = Vec::new();
        let mut roles = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split(',').map(str::trim);
            let label = fields.next().unwrap_or_default().to_string();
            let row = fields
                .map(|f| match f {
                    "T" | "t" => Ok(Role::Transmit),
                    "L" | "l" => Ok(Role::Listen),
                    other => Err(Error::Pattern(format!("line {}: unknown role {other:?}", lineno + 1))),
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some(first) = roles.first().map(Vec::len) {
                if row.len() != first {
                    return Err(Error::Pattern(format!(
                        "line {}: {} slots, expected {first}",
                        lineno + 1,
                        row.len()
                    )));
                }
            }
            labels.push(label);
            roles.push(row);
        }
        if roles.is_empty() || roles[0].is_empty() {
            return Err(Error::Pattern("pattern has no slots".into()));
        }
        Ok(Self { labels, roles })
    }

    pub fn node_count(&self) -> usize {
        self.roles.len()
    }

    pub fn slots(&self) -> usize {
        self.roles[0].len()
    }

    /// Roles of every node in 0-based `slot`.
    pub fn roles_at(&self, slot: usize) -> Vec<Role> {
        self.roles.iter().map(|r| r[slot]).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (label, row) in self.labels.iter().zip(&self.roles) {
            out.push_str(label);
            for r in row {
                out.push(',');
                out.push(r.letter());
            }
            out.push('\n');
        }
        out
    }
}
