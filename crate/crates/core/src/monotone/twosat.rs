//! Two-satisfiability over an implication graph.

/// A literal: variable index with polarity, or a constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Literal {
    True,
    False,
    Var { var: usize, positive: bool },
}

impl Literal {
    pub fn negate(self) -> Literal {
        match self {
            Literal::True => Literal::False,
            Literal::False => Literal::True,
            Literal::Var { var, positive } => Literal::Var { var, positive: !positive },
        }
    }

    fn node(self) -> usize {
        match self {
            Literal::Var { var, positive } => 2 * var + usize::from(!positive),
            _ => unreachable!("constants have no node"),
        }
    }
}

/// A 2SAT instance built from implications between literals.
#[derive(Debug, Clone)]
pub struct TwoSat {
    vars: usize,
    edges: Vec<Vec<usize>>,
    contradiction: bool,
}

impl TwoSat {
    pub fn new(vars: usize) -> Self {
        TwoSat { vars, edges: vec![Vec::new(); 2 * vars], contradiction: false }
    }

    fn edge(&mut self, from: Literal, to: Literal) {
        self.edges[from.node()].push(to.node());
    }

    /// Adds `a → b` (and its contrapositive).
    pub fn implies(&mut self, a: Literal, b: Literal) {
        match (a, b) {
            (Literal::False, _) | (_, Literal::True) => {}
            (Literal::True, Literal::False) => self.contradiction = true,
            (Literal::True, b) => self.edge(b.negate(), b),
            (a, Literal::False) => self.edge(a, a.negate()),
            (a, b) => {
                self.edge(a, b);
                self.edge(b.negate(), a.negate());
            }
        }
    }

    /// A satisfying assignment, if any.
    pub fn solve(&self) -> Option<Vec<bool>> {
        if self.contradiction {
            return None;
        }
        let comp = strongly_connected_components(&self.edges);
        // Tarjan numbers components in reverse topological order, so a literal whose
        // component comes first is implied by its negation's rather than the other way.
        (0..self.vars)
            .map(|v| {
                let (pos, neg) = (comp[2 * v], comp[2 * v + 1]);
                (pos != neg).then_some(pos < neg)
            })
            .collect()
    }
}

/// Component index of every node, numbered in the order Tarjan's algorithm completes them.
fn strongly_connected_components(edges: &[Vec<usize>]) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let n = edges.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut comps = 0;
    // Explicit call stack of (node, next edge position).
    let mut calls: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        calls.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&(v, pos)) = calls.last() {
            if let Some(&w) = edges[v].get(pos) {
                if let Some(top) = calls.last_mut() {
                    top.1 += 1;
                }
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    calls.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            calls.pop();
            if let Some(&(parent, _)) = calls.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                while let Some(w) = stack.pop() {
                    on_stack[w] = false;
                    comp[w] = comps;
                    if w == v {
                        break;
                    }
                }
                comps += 1;
            }
        }
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(v: usize) -> Literal {
        Literal::Var { var: v, positive: true }
    }

    fn check(clauses: &[(Literal, Literal)], sol: &[bool]) -> bool {
        let val = |l: Literal| match l {
            Literal::True => true,
            Literal::False => false,
            Literal::Var { var, positive } => sol[var] == positive,
        };
        clauses.iter().all(|&(a, b)| !val(a) || val(b))
    }

    #[test]
    fn agrees_with_exhaustive_search() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let vars = rng.gen_range(1..=5);
            let clauses: Vec<(Literal, Literal)> = (0..rng.gen_range(0..9))
                .map(|_| {
                    let mut lit = || match rng.gen_range(0..12) {
                        0 => Literal::True,
                        1 => Literal::False,
                        r => Literal::Var { var: rng.gen_range(0..vars), positive: r % 2 == 0 },
                    };
                    (lit(), lit())
                })
                .collect();
            let mut sat = TwoSat::new(vars);
            for &(a, b) in &clauses {
                sat.implies(a, b);
            }
            let brute = (0..1u32 << vars).any(|m| {
                let sol: Vec<bool> = (0..vars).map(|v| m >> v & 1 == 1).collect();
                check(&clauses, &sol)
            });
            match sat.solve() {
                Some(sol) => assert!(check(&clauses, &sol)),
                None => assert!(!brute),
            }
            assert_eq!(sat.solve().is_some(), brute);
        }
    }

    #[test]
    fn forced_chain() {
        let mut sat = TwoSat::new(3);
        sat.implies(Literal::True, var(0));
        sat.implies(var(0), var(1));
        sat.implies(var(1), var(2).negate());
        assert_eq!(sat.solve(), Some(vec![true, true, false]));
        sat.implies(var(1), var(2));
        assert_eq!(sat.solve(), None);
    }
}
