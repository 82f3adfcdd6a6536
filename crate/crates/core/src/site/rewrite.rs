//! Bounded Knuth-Bendix completion over generator words.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::VecDeque;

const MAX_RULES: usize = 20_000;

type Rule = (Vec<usize>, Vec<usize>);

#[derive(Debug, Clone)]
pub(crate) struct RewriteSystem {
    rules: Vec<Rule>,
}

fn shortlex(a: &[usize], b: &[usize]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

fn find(hay: &[usize], needle: &[usize]) -> Option<usize> {
    if needle.is_empty() || needle.len() > hay.len() {
        return None;
    }
    (0..=hay.len() - needle.len()).find(|&i| &hay[i..i + needle.len()] == needle)
}

impl RewriteSystem {
    fn rewrite_once(rules: &[Rule], w: &[usize]) -> Option<Vec<usize>> {
        for (l, r) in rules {
            if let Some(i) = find(w, l) {
                let mut out = Vec::with_capacity(w.len() - l.len() + r.len());
                out.extend_from_slice(&w[..i]);
                out.extend_from_slice(r);
                out.extend_from_slice(&w[i + l.len()..]);
                return Some(out);
            }
        }
        None
    }

    fn normalize_with(rules: &[Rule], mut w: Vec<usize>) -> Vec<usize> {
        while let Some(next) = Self::rewrite_once(rules, &w) {
            w = next;
        }
        w
    }

    pub(crate) fn normalize(&self, w: Vec<usize>) -> Vec<usize> {
        Self::normalize_with(&self.rules, w)
    }

    /// Whether a word whose proper suffix is already irreducible is itself
    /// irreducible, i.e. no left-hand side is a prefix of it.
    pub(crate) fn is_irreducible_prefix(&self, w: &[usize]) -> bool {
        self.rules.iter().all(|(l, _)| !w.starts_with(l))
    }

    fn critical_pairs(a: &Rule, b: &Rule, out: &mut VecDeque<Rule>) {
        let (l1, r1) = a;
        let (l2, r2) = b;
        // suffix of l1 overlaps prefix of l2
        for k in 1..l1.len().min(l2.len()) {
            if l1[l1.len() - k..] == l2[..k] {
                let mut p1 = r1.clone();
                p1.extend_from_slice(&l2[k..]);
                let mut p2 = l1[..l1.len() - k].to_vec();
                p2.extend_from_slice(r2);
                out.push_back((p1, p2));
            }
        }
        // l2 inside l1
        if l2.len() <= l1.len() && l1 != l2 {
            for i in 0..=l1.len() - l2.len() {
                if l1[i..i + l2.len()] == l2[..] {
                    let p1 = r1.clone();
                    let mut p2 = l1[..i].to_vec();
                    p2.extend_from_slice(r2);
                    p2.extend_from_slice(&l1[i + l2.len()..]);
                    out.push_back((p1, p2));
                }
            }
        }
    }

    pub(crate) fn complete(initial: Vec<Rule>, bound: usize) -> Result<Self> {
        let mut rules: Vec<Rule> = Vec::new();
        let mut pending: VecDeque<Rule> = initial.into_iter().collect();
        while let Some((a, b)) = pending.pop_front() {
            let a = Self::normalize_with(&rules, a);
            let b = Self::normalize_with(&rules, b);
            let (l, r) = match shortlex(&a, &b) {
                Ordering::Equal => continue,
                Ordering::Greater => (a, b),
                Ordering::Less => (b, a),
            };
            if l.len() > bound || rules.len() >= MAX_RULES {
                return Err(Error::NonTerminatingPresentation { bound });
            }
            let new = (l, r);
            let mut cps = VecDeque::new();
            for old in &rules {
                Self::critical_pairs(&new, old, &mut cps);
                Self::critical_pairs(old, &new, &mut cps);
            }
            Self::critical_pairs(&new, &new, &mut cps);
            rules.push(new);
            pending.extend(cps);
        }
        // Interreduce: drop rules whose lhs is reducible by another rule,
        // normalize right-hand sides.
        let mut reduced: Vec<Rule> = Vec::new();
        for (i, (l, r)) in rules.iter().enumerate() {
            let redundant = rules
                .iter()
                .enumerate()
                .any(|(j, (l2, _))| j != i && find(l, l2).is_some() && (l2 != l || j < i));
            if !redundant {
                reduced.push((l.clone(), r.clone()));
            }
        }
        let snapshot = reduced.clone();
        for rule in reduced.iter_mut() {
            rule.1 = Self::normalize_with(&snapshot, rule.1.clone());
        }
        reduced.sort_by(|a, b| shortlex(&a.0, &b.0));
        Ok(RewriteSystem { rules: reduced })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn completes_simple_monoid() {
        // a.b = id, b.a = id over one object: Z
        let rs = RewriteSystem::complete(vec![(vec![0, 1], vec![]), (vec![1, 0], vec![])], 16).unwrap();
        assert_eq!(rs.normalize(vec![0, 0, 1, 1, 0]), vec![0]);
    }

    #[test]
    fn completion_adds_critical_rules() {
        // aa = b, ab = ba is implied; check normal forms agree
        let rs = RewriteSystem::complete(vec![(vec![0, 0, 0], vec![]), (vec![0, 0], vec![1])], 16).unwrap();
        assert_eq!(rs.normalize(vec![1, 0]), rs.normalize(vec![0, 1]));
    }
}
