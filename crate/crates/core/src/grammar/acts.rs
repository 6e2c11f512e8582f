use std::cmp::Ordering;

use serde::Serialize;

use super::chart::Constituent;
use super::rules::{ActType, ACT_SYN};
use super::Frame;
use crate::corpus::Token;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeechAct {
    pub act_type: ActType,
    pub content: Frame,
    /// Token span `[start, end)`.
    pub start: usize,
    pub end: usize,
    pub score: f64,
    /// How specific the act is, in `[0, 1]`.
    pub confidence: f64,
}

impl SpeechAct {
    pub fn is_garbled(&self) -> bool {
        self.content.has("garbled")
    }

    pub fn specificity(&self) -> f64 {
        match self.act_type {
            ActType::Tell if self.content.is_empty() => 0.25,
            ActType::Tell if self.is_garbled() => 0.5,
            ActType::Tell => 0.75,
            _ => 1.0,
        }
    }

    fn key(&self) -> (usize, usize, ActType, &Frame) {
        (self.start, self.end, self.act_type, &self.content)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActSequence {
    pub acts: Vec<SpeechAct>,
    /// Token indices inside some act span, ascending.
    pub covered: Vec<usize>,
    /// Token indices no act accounts for, ascending.
    pub skipped: Vec<usize>,
    pub confidence: f64,
}

impl ActSequence {
    pub fn act_types(&self) -> Vec<ActType> {
        self.acts.iter().map(|a| a.act_type).collect()
    }
}

/// Covered share of the input times the mean act specificity. Zero for an
/// empty utterance.
pub fn confidence(acts: &[SpeechAct], token_count: usize) -> f64 {
    if token_count == 0 || acts.is_empty() {
        return 0.0;
    }
    let covered: usize = acts.iter().map(|a| a.end - a.start).sum();
    let mean = acts.iter().map(SpeechAct::specificity).sum::<f64>() / acts.len() as f64;
    covered as f64 / token_count as f64 * mean
}

fn candidates(chart: &[Constituent]) -> Vec<SpeechAct> {
    let mut out: Vec<SpeechAct> = chart
        .iter()
        .filter(|c| c.category.syn == ACT_SYN)
        .filter_map(|c| {
            let act_type = c.category.sem.parse::<ActType>().ok()?;
            if c.frame.is_empty() && !act_type.allows_empty_content() {
                return None;
            }
            let mut act = SpeechAct {
                act_type,
                content: c.frame.clone(),
                start: c.start,
                end: c.end,
                score: c.score,
                confidence: 0.0,
            };
            act.confidence = act.specificity();
            Some(act)
        })
        .collect();
    out.sort_by(|a, b| a.key().cmp(&b.key()));
    out
}

/// A covering of a token suffix.
#[derive(Clone)]
struct Plan {
    /// Acts plus skipped tokens.
    cost: usize,
    skipped: usize,
    score: f64,
    acts: Vec<usize>,
}

fn compare(a: &Plan, b: &Plan, acts: &[SpeechAct]) -> Ordering {
    a.cost
        .cmp(&b.cost)
        .then(a.skipped.cmp(&b.skipped))
        .then(b.score.total_cmp(&a.score))
        .then_with(|| {
            let ka = a.acts.iter().map(|&i| acts[i].key());
            let kb = b.acts.iter().map(|&i| acts[i].key());
            ka.cmp(kb)
        })
}

fn finish(plan: Plan, acts: Vec<SpeechAct>, n: usize) -> ActSequence {
    let mut chosen: Vec<SpeechAct> = plan.acts.iter().map(|&i| acts[i].clone()).collect();
    if chosen.is_empty() {
        // nothing interpretable: a contentless TELL that covers nothing
        chosen.push(SpeechAct {
            act_type: ActType::Tell,
            content: Frame::new(),
            start: 0,
            end: 0,
            score: 0.0,
            confidence: 0.25,
        });
    }
    let mut inside = vec![false; n];
    for a in &chosen {
        inside[a.start..a.end].iter_mut().for_each(|x| *x = true);
    }
    let covered = (0..n).filter(|&i| inside[i]).collect();
    let skipped = (0..n).filter(|&i| !inside[i]).collect();
    let confidence = confidence(&chosen, n);
    ActSequence {
        acts: chosen,
        covered,
        skipped,
        confidence,
    }
}

/// Chooses disjoint, left-to-right act constituents that account for the
/// input as cheaply as possible. The cost of a covering is its number of acts
/// plus its number of skipped tokens; ties go to fewer skipped tokens, then
/// to the higher summed constituent score, then to the lexicographically
/// smaller act list.
pub fn extract_acts(chart: &[Constituent], tokens: &[Token]) -> ActSequence {
    let n = tokens.len();
    let acts = candidates(chart);
    let mut by_start: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for (i, a) in acts.iter().enumerate() {
        by_start[a.start].push(i);
    }
    let mut best: Vec<Plan> = vec![
        Plan {
            cost: 0,
            skipped: 0,
            score: 0.0,
            acts: Vec::new(),
        };
        n + 1
    ];
    for i in (0..n).rev() {
        let next = &best[i + 1];
        let mut winner = Plan {
            cost: next.cost + 1,
            skipped: next.skipped + 1,
            score: next.score,
            acts: next.acts.clone(),
        };
        for &a in &by_start[i] {
            let rest = &best[acts[a].end];
            let mut list = Vec::with_capacity(rest.acts.len() + 1);
            list.push(a);
            list.extend_from_slice(&rest.acts);
            let plan = Plan {
                cost: rest.cost + 1,
                skipped: rest.skipped,
                score: acts[a].score + rest.score,
                acts: list,
            };
            if compare(&plan, &winner, &acts) == Ordering::Less {
                winner = plan;
            }
        }
        best[i] = winner;
    }
    let plan = best.swap_remove(0);
    finish(plan, acts, n)
}

/// Reference implementation: enumerates every disjoint selection and keeps
/// the best under the same objective. Exponential; for testing only.
pub fn brute_force_acts(chart: &[Constituent], tokens: &[Token]) -> ActSequence {
    let n = tokens.len();
    let acts = candidates(chart);

    fn enumerate(pos: usize, n: usize, acts: &[SpeechAct], prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == n {
            out.push(prefix.clone());
            return;
        }
        enumerate(pos + 1, n, acts, prefix, out);
        for (i, a) in acts.iter().enumerate() {
            if a.start == pos {
                prefix.push(i);
                enumerate(a.end, n, acts, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut all = Vec::new();
    enumerate(0, n, &acts, &mut Vec::new(), &mut all);

    let plans = all.into_iter().map(|sel| {
        let covered: usize = sel.iter().map(|&i| acts[i].end - acts[i].start).sum();
        let skipped = n - covered;
        // summed right to left to match the dynamic program bit for bit
        let score = sel.iter().rev().fold(0.0, |s, &i| acts[i].score + s);
        Plan {
            cost: sel.len() + skipped,
            skipped,
            score,
            acts: sel,
        }
    });
    let plan = plans
        .min_by(|a, b| compare(a, b, &acts))
        .expect("at least the all-skipped selection exists");
    finish(plan, acts, n)
}
