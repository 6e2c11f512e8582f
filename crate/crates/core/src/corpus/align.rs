use serde::{Deserialize, Serialize};

use super::{CorpusError, Token};

/// One step of an edit alignment from a reference to a hypothesis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "UPPERCASE")]
pub enum EditOp {
    Match { token: Token },
    Sub { reference: Token, hypothesis: Token },
    Ins { token: Token },
    Del { token: Token },
}

impl EditOp {
    pub fn cost(&self) -> usize {
        match self {
            EditOp::Match { .. } => 0,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignedPair {
    pub reference: Vec<Token>,
    pub hypothesis: Vec<Token>,
    pub ops: Vec<EditOp>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub matches: usize,
    pub substitutions: usize,
    pub insertions: usize,
    pub deletions: usize,
}

impl AlignedPair {
    pub fn cost(&self) -> usize {
        self.ops.iter().map(EditOp::cost).sum()
    }

    pub fn counts(&self) -> OpCounts {
        let mut c = OpCounts::default();
        for op in &self.ops {
            match op {
                EditOp::Match { .. } => c.matches += 1,
                EditOp::Sub { .. } => c.substitutions += 1,
                EditOp::Ins { .. } => c.insertions += 1,
                EditOp::Del { .. } => c.deletions += 1,
            }
        }
        c
    }

    /// Applies the ops to the reference, producing the hypothesis they
    /// describe. Returns `None` if the ops do not consume the reference
    /// exactly.
    pub fn replay(&self) -> Option<Vec<Token>> {
        let mut out = Vec::with_capacity(self.hypothesis.len());
        let mut r = self.reference.iter();
        for op in &self.ops {
            match op {
                EditOp::Match { token } => {
                    if r.next()? != token {
                        return None;
                    }
                    out.push(token.clone());
                }
                EditOp::Sub {
                    reference,
                    hypothesis,
                } => {
                    if r.next()? != reference {
                        return None;
                    }
                    out.push(hypothesis.clone());
                }
                EditOp::Ins { token } => out.push(token.clone()),
                EditOp::Del { token } => {
                    if r.next()? != token {
                        return None;
                    }
                }
            }
        }
        if r.next().is_some() {
            return None;
        }
        Some(out)
    }
}

/// Minimum-cost word alignment under unit SUB/INS/DEL costs.
///
/// The backtrace prefers MATCH, then SUB, then DEL, then INS whenever more
/// than one move reaches a cell at optimal cost, which makes the op sequence
/// (and thus channel training) deterministic.
pub fn align(reference: &[Token], hypothesis: &[Token]) -> AlignedPair {
    let n = reference.len();
    let m = hypothesis.len();
    let width = m + 1;
    let mut dist = vec![0usize; (n + 1) * width];
    for i in 0..=n {
        dist[i * width] = i;
    }
    for j in 0..=m {
        dist[j] = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let diag =
                dist[(i - 1) * width + j - 1] + usize::from(reference[i - 1] != hypothesis[j - 1]);
            let del = dist[(i - 1) * width + j] + 1;
            let ins = dist[i * width + j - 1] + 1;
            dist[i * width + j] = diag.min(del).min(ins);
        }
    }

    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = dist[i * width + j];
        if i > 0 && j > 0 {
            let diag = dist[(i - 1) * width + j - 1];
            if reference[i - 1] == hypothesis[j - 1] && diag == here {
                ops.push(EditOp::Match {
                    token: reference[i - 1].clone(),
                });
                i -= 1;
                j -= 1;
                continue;
            }
            if reference[i - 1] != hypothesis[j - 1] && diag + 1 == here {
                ops.push(EditOp::Sub {
                    reference: reference[i - 1].clone(),
                    hypothesis: hypothesis[j - 1].clone(),
                });
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && dist[(i - 1) * width + j] + 1 == here {
            ops.push(EditOp::Del {
                token: reference[i - 1].clone(),
            });
            i -= 1;
        } else {
            ops.push(EditOp::Ins {
                token: hypothesis[j - 1].clone(),
            });
            j -= 1;
        }
    }
    ops.reverse();
    AlignedPair {
        reference: reference.to_vec(),
        hypothesis: hypothesis.to_vec(),
        ops,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WerReport {
    pub substitutions: usize,
    pub insertions: usize,
    pub deletions: usize,
    pub ref_words: usize,
    pub rate: f64,
}

impl WerReport {
    pub fn errors(&self) -> usize {
        self.substitutions + self.insertions + self.deletions
    }
}

/// Pooled word error rate, `(S + I + D) / Σ|ref|`.
pub fn wer(pairs: &[AlignedPair]) -> Result<WerReport, CorpusError> {
    if pairs.is_empty() {
        return Err(CorpusError::UndefinedRate("no aligned pairs".into()));
    }
    let mut report = WerReport {
        substitutions: 0,
        insertions: 0,
        deletions: 0,
        ref_words: 0,
        rate: 0.0,
    };
    for p in pairs {
        let c = p.counts();
        report.substitutions += c.substitutions;
        report.insertions += c.insertions;
        report.deletions += c.deletions;
        report.ref_words += p.reference.len();
    }
    if report.ref_words == 0 {
        if report.errors() == 0 {
            return Ok(report);
        }
        return Err(CorpusError::UndefinedRate(
            "hypotheses are non-empty but every reference is empty".into(),
        ));
    }
    report.rate = report.errors() as f64 / report.ref_words as f64;
    Ok(report)
}
