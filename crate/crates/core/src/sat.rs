//! Propositional formulas, Tseitin clausification and a small DPLL solver.
//! Grounded DRSs over a few individuals stay in the low thousands of
//! clauses, which this handles quickly.

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Formula {
    True,
    False,
    Atom(usize),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub(crate) fn not(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(inner) => *inner,
            other => Formula::Not(Box::new(other)),
        }
    }

    pub(crate) fn and(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    pub(crate) fn or(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    /// Evaluate under a total assignment of the atoms.
    #[cfg(test)]
    pub(crate) fn eval(&self, val: &[bool]) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a) => val[*a],
            Formula::Not(f) => !f.eval(val),
            Formula::And(fs) => fs.iter().all(|f| f.eval(val)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval(val)),
        }
    }
}

/// Literals are 1-based variables, negative when negated.
type Clause = Vec<i64>;

struct Cnf {
    clauses: Vec<Clause>,
    vars: usize,
}

impl Cnf {
    fn fresh(&mut self) -> i64 {
        self.vars += 1;
        self.vars as i64
    }

    /// A literal equivalent to `f`.
    fn encode(&mut self, f: &Formula) -> i64 {
        match f {
            Formula::Atom(a) => *a as i64 + 1,
            Formula::Not(inner) => -self.encode(inner),
            Formula::True | Formula::False => {
                let v = self.fresh();
                self.clauses.push(vec![if *f == Formula::True { v } else { -v }]);
                v
            }
            Formula::And(parts) | Formula::Or(parts) => {
                let lits: Vec<i64> = parts.iter().map(|p| self.encode(p)).collect();
                let v = self.fresh();
                if matches!(f, Formula::And(_)) {
                    for &l in &lits {
                        self.clauses.push(vec![-v, l]);
                    }
                    let mut big: Clause = lits.iter().map(|l| -l).collect();
                    big.push(v);
                    self.clauses.push(big);
                } else {
                    let mut big: Clause = lits.clone();
                    big.push(-v);
                    self.clauses.push(big);
                    for &l in &lits {
                        self.clauses.push(vec![v, -l]);
                    }
                }
                v
            }
        }
    }
}

/// Is `f` satisfiable? `atoms` bounds the atom indices used in `f`.
pub(crate) fn satisfiable(f: &Formula, atoms: usize) -> bool {
    match f {
        Formula::True => return true,
        Formula::False => return false,
        _ => {}
    }
    let mut cnf = Cnf { clauses: Vec::new(), vars: atoms };
    let top = cnf.encode(f);
    cnf.clauses.push(vec![top]);
    let mut assignment = vec![0i8; cnf.vars + 1];
    dpll(&cnf.clauses, &mut assignment)
}

fn value(assignment: &[i8], lit: i64) -> i8 {
    let v = assignment[lit.unsigned_abs() as usize];
    if lit > 0 {
        v
    } else {
        -v
    }
}

fn dpll(clauses: &[Clause], assignment: &mut Vec<i8>) -> bool {
    let mut trail = Vec::new();
    // unit propagation to a fixpoint
    loop {
        let mut changed = false;
        for clause in clauses {
            let mut unassigned = None;
            let mut open = 0;
            let mut satisfied = false;
            for &lit in clause {
                match value(assignment, lit) {
                    1 => {
                        satisfied = true;
                        break;
                    }
                    0 => {
                        open += 1;
                        unassigned = Some(lit);
                    }
                    _ => {}
                }
            }
            if satisfied {
                continue;
            }
            match (open, unassigned) {
                (0, _) => {
                    undo(assignment, &trail);
                    return false;
                }
                (1, Some(lit)) => {
                    assignment[lit.unsigned_abs() as usize] = if lit > 0 { 1 } else { -1 };
                    trail.push(lit.unsigned_abs() as usize);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    // branch on the first literal of the first open clause
    let choice = clauses.iter().find_map(|clause| {
        if clause.iter().any(|&l| value(assignment, l) == 1) {
            return None;
        }
        clause.iter().copied().find(|&l| value(assignment, l) == 0)
    });
    let Some(lit) = choice else {
        return true;
    };
    let var = lit.unsigned_abs() as usize;
    for polarity in [lit > 0, lit < 0] {
        assignment[var] = if polarity { 1 } else { -1 };
        if dpll(clauses, assignment) {
            return true;
        }
        assignment[var] = 0;
    }
    undo(assignment, &trail);
    false
}

fn undo(assignment: &mut [i8], trail: &[usize]) {
    for &v in trail {
        assignment[v] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_formula(atoms: usize) -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![(0..atoms).prop_map(Formula::Atom), Just(Formula::True), Just(Formula::False)];
        leaf.prop_recursive(4, 40, 4, |inner| {
            prop_oneof![
                inner.clone().prop_map(|f| Formula::Not(Box::new(f))),
                prop::collection::vec(inner.clone(), 0..4).prop_map(Formula::And),
                prop::collection::vec(inner, 0..4).prop_map(Formula::Or),
            ]
        })
    }

    fn brute(f: &Formula, atoms: usize) -> bool {
        (0..1u32 << atoms).any(|bits| {
            let val: Vec<bool> = (0..atoms).map(|i| bits >> i & 1 == 1).collect();
            f.eval(&val)
        })
    }

    proptest! {
        #[test]
        fn dpll_agrees_with_truth_tables(f in arb_formula(5)) {
            prop_assert_eq!(satisfiable(&f, 5), brute(&f, 5));
        }
    }

    #[test]
    fn small_cases() {
        let a = Formula::Atom(0);
        assert!(satisfiable(&a, 1));
        assert!(!satisfiable(&Formula::and([a.clone(), Formula::not(a.clone())]), 1));
        assert!(satisfiable(&Formula::or([a.clone(), Formula::not(a)]), 1));
    }
}
