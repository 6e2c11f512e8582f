use std::collections::HashMap;

use serde::Serialize;

use super::rules::{Category, Directive, Grammar, Item, LhsSem, Rule, UNKNOWN_SYN};
use super::{Frame, Value};
use crate::corpus::Token;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constituent {
    pub start: usize,
    pub end: usize,
    pub category: Category,
    pub frame: Frame,
    pub score: f64,
}

type Key = (usize, usize, Category, Frame);

struct Chart {
    items: Vec<Constituent>,
    index: HashMap<Key, usize>,
    /// Constituent ids by start position.
    by_start: Vec<Vec<usize>>,
}

impl Chart {
    /// Adds or improves a constituent; returns its id if anything changed.
    fn add(&mut self, c: Constituent) -> Option<usize> {
        let key = (c.start, c.end, c.category.clone(), c.frame.clone());
        if let Some(&id) = self.index.get(&key) {
            if c.score > self.items[id].score {
                self.items[id].score = c.score;
                return Some(id);
            }
            return None;
        }
        let id = self.items.len();
        self.by_start[c.start].push(id);
        self.index.insert(key, id);
        self.items.push(c);
        Some(id)
    }
}

fn item_matches(item: &Item, c: &Constituent) -> bool {
    match item {
        Item::Literal(_) => false,
        Item::Cat {
            syn,
            sem,
            constraints,
        } => {
            *syn == c.category.syn
                && sem.as_ref().is_none_or(|s| *s == c.category.sem)
                && constraints.iter().all(|k| k.holds(&c.frame))
        }
    }
}

/// Applies `rule` to a full child sequence; `None` for literal positions.
fn build(rule: &Rule, children: &[Option<&Constituent>], start: usize, end: usize) -> Option<Constituent> {
    let child = |i: usize| children[i].expect("directives only reference category items");
    let sem = match &rule.lhs_sem {
        LhsSem::Fixed(s) => s.clone(),
        LhsSem::Copy(i) => child(*i).category.sem.clone(),
    };
    let mut frame = Frame::new();
    for d in &rule.directives {
        let ok = match d {
            Directive::Merge(i) => frame.merge(&child(*i).frame),
            Directive::Copy { slot, child: i, key } => match child(*i).frame.get(key) {
                Some(Value::Atom(a)) => frame.unify_atom(slot, a),
                Some(Value::List(items)) => frame.append(slot, items),
                None => true,
            },
            Directive::Append { slot, child: i, key } => {
                let items = child(*i).frame.list(key);
                items.is_empty() || frame.append(slot, &items)
            }
            Directive::Const { slot, value } => frame.unify_atom(slot, value),
        };
        if !ok {
            return None;
        }
    }
    let score = rule.weight * children.iter().flatten().map(|c| c.score).product::<f64>();
    Some(Constituent {
        start,
        end,
        category: Category {
            syn: rule.lhs_syn.clone(),
            sem,
        },
        frame,
        score,
    })
}

/// Finds every way to match `rule.rhs[k..]` from `pos` to exactly `end`.
fn match_rhs<'a>(
    rule: &Rule,
    k: usize,
    pos: usize,
    end: usize,
    tokens: &[Token],
    chart: &'a Chart,
    acc: &mut Vec<Option<&'a Constituent>>,
    out: &mut Vec<Constituent>,
    start: usize,
) {
    if k == rule.rhs.len() {
        if pos == end {
            out.extend(build(rule, acc, start, end));
        }
        return;
    }
    // each remaining item needs at least one token
    if pos + (rule.rhs.len() - k) > end {
        return;
    }
    let last = k + 1 == rule.rhs.len();
    match &rule.rhs[k] {
        Item::Literal(w) => {
            if tokens[pos].as_str() == w {
                acc.push(None);
                match_rhs(rule, k + 1, pos + 1, end, tokens, chart, acc, out, start);
                acc.pop();
            }
        }
        item => {
            for &id in &chart.by_start[pos] {
                let c = &chart.items[id];
                let fits = if last { c.end == end } else { c.end < end };
                // a lone item would be the whole span; unary rules run in closure
                if fits && !(k == 0 && last) && item_matches(item, c) {
                    acc.push(Some(c));
                    match_rhs(rule, k + 1, c.end, end, tokens, chart, acc, out, start);
                    acc.pop();
                }
            }
        }
    }
}

/// Builds every constituent derivable over every span of `tokens`.
///
/// Spans are completed shortest first, so when a span is processed all of its
/// proper sub-spans are final. Unary rules are closed per span with an agenda.
pub fn parse_chart(tokens: &[Token], grammar: &Grammar) -> Vec<Constituent> {
    let n = tokens.len();
    let mut chart = Chart {
        items: Vec::new(),
        index: HashMap::new(),
        by_start: vec![Vec::new(); n + 1],
    };
    let (unary, other): (Vec<&Rule>, Vec<&Rule>) = grammar
        .rules
        .iter()
        .partition(|r| r.rhs.len() == 1 && matches!(r.rhs[0], Item::Cat { .. }));

    for len in 1..=n {
        for start in 0..=n - len {
            let end = start + len;
            let mut agenda = Vec::new();

            for entry in grammar.lookup(tokens, start) {
                if entry.words.len() == len {
                    agenda.extend(chart.add(Constituent {
                        start,
                        end,
                        category: entry.category.clone(),
                        frame: entry.features.clone(),
                        score: 1.0,
                    }));
                }
            }
            if len == 1 && !grammar.knows_word(tokens[start].as_str()) {
                let mut frame = Frame::new();
                frame.set("word", Value::Atom(tokens[start].to_string()));
                agenda.extend(chart.add(Constituent {
                    start,
                    end,
                    category: Category {
                        syn: UNKNOWN_SYN.into(),
                        sem: UNKNOWN_SYN.into(),
                    },
                    frame,
                    score: 1.0,
                }));
            }

            let mut built = Vec::new();
            for rule in &other {
                let mut acc = Vec::new();
                match_rhs(rule, 0, start, end, tokens, &chart, &mut acc, &mut built, start);
            }
            for c in built {
                agenda.extend(chart.add(c));
            }

            while let Some(id) = agenda.pop() {
                let mut built = Vec::new();
                for rule in &unary {
                    if item_matches(&rule.rhs[0], &chart.items[id]) {
                        built.extend(build(rule, &[Some(&chart.items[id])], start, end));
                    }
                }
                for c in built {
                    agenda.extend(chart.add(c));
                }
            }
        }
    }
    chart.items
}
