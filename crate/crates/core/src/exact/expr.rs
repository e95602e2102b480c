//! Hash-consed expression DAG over the coordinates of L^n.
//!
//! Variables are indexed 0..2n with the convention that variable 2l is the
//! x-coordinate and 2l+1 the y-coordinate of the l-th copy of L. Rational
//! function equality is decided by randomized exact evaluation, never by
//! canonical forms.

use super::cyclo::{rat_i64, Cyclo};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Var(u32),
    Const(Cyclo),
    Add(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Pow(Expr, u32),
}

#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}
impl Eq for Expr {}

impl std::hash::Hash for Expr {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (Arc::as_ptr(&self.0) as usize).hash(state);
    }
}

#[derive(PartialEq, Eq, Hash)]
enum Key {
    Var(u32),
    Const(Cyclo),
    Add(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    Pow(usize, u32),
}

fn interner() -> &'static Mutex<HashMap<Key, Expr>> {
    static INTERNER: OnceLock<Mutex<HashMap<Key, Expr>>> = OnceLock::new();
    INTERNER.get_or_init(|| Mutex::new(HashMap::new()))
}

fn intern(key: Key, node: impl FnOnce() -> Node) -> Expr {
    let mut map = interner().lock().unwrap();
    if let Some(e) = map.get(&key) {
        return e.clone();
    }
    let e = Expr(Arc::new(node()));
    map.insert(key, e.clone());
    e
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("division by zero during evaluation")]
    DivisionByZero,
    #[error("variable index {0} out of range for point of length {1}")]
    VarOutOfRange(u32, usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PitError {
    #[error("resample budget exhausted: denominators vanish too often")]
    ResampleBudget,
}

impl Expr {
    fn id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn var(i: u32) -> Expr {
        intern(Key::Var(i), || Node::Var(i))
    }

    pub fn constant(c: Cyclo) -> Expr {
        intern(Key::Const(c.clone()), move || Node::Const(c))
    }

    pub fn int(order: u32, n: i64) -> Expr {
        Expr::constant(Cyclo::from_i64(order, n))
    }

    pub fn as_const(&self) -> Option<&Cyclo> {
        match self.node() {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero_const(&self) -> bool {
        self.as_const().map(|c| c.is_zero()).unwrap_or(false)
    }

    pub fn is_one_const(&self) -> bool {
        self.as_const().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn add(a: &Expr, b: &Expr) -> Expr {
        if a.is_zero_const() {
            return b.clone();
        }
        if b.is_zero_const() {
            return a.clone();
        }
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            return Expr::constant(x.add(y));
        }
        // commutative: order children by pointer for sharing
        let (a, b) = if a.id() <= b.id() {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        };
        intern(Key::Add(a.id(), b.id()), move || Node::Add(a, b))
    }

    pub fn sub(a: &Expr, b: &Expr) -> Expr {
        let order = Expr::infer_order(a, b);
        Expr::add(a, &Expr::mul(&Expr::int(order, -1), b))
    }

    pub fn mul(a: &Expr, b: &Expr) -> Expr {
        if a.is_zero_const() {
            return a.clone();
        }
        if b.is_zero_const() {
            return b.clone();
        }
        if a.is_one_const() {
            return b.clone();
        }
        if b.is_one_const() {
            return a.clone();
        }
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            return Expr::constant(x.mul(y));
        }
        let (a, b) = if a.id() <= b.id() {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        };
        intern(Key::Mul(a.id(), b.id()), move || Node::Mul(a, b))
    }

    pub fn div(a: &Expr, b: &Expr) -> Expr {
        assert!(!b.is_zero_const(), "literal zero denominator");
        if a.is_zero_const() || b.is_one_const() {
            return a.clone();
        }
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            return Expr::constant(x.div(y).expect("constant division by zero"));
        }
        let (ac, bc) = (a.clone(), b.clone());
        intern(Key::Div(a.id(), b.id()), move || Node::Div(ac, bc))
    }

    pub fn pow(a: &Expr, e: u32) -> Expr {
        if e == 0 {
            // order-aware one: fall back to order of a constant if present
            return Expr::constant(Cyclo::one(a.any_order().unwrap_or(1)));
        }
        if e == 1 {
            return a.clone();
        }
        if let Some(x) = a.as_const() {
            return Expr::constant(x.pow(e as u64));
        }
        let ac = a.clone();
        intern(Key::Pow(a.id(), e), move || Node::Pow(ac, e))
    }

    pub fn neg(a: &Expr) -> Expr {
        let order = a.any_order().unwrap_or(1);
        Expr::mul(&Expr::int(order, -1), a)
    }

    pub fn sum(order: u32, terms: &[Expr]) -> Expr {
        let mut acc = Expr::int(order, 0);
        for t in terms {
            acc = Expr::add(&acc, t);
        }
        acc
    }

    fn infer_order(a: &Expr, b: &Expr) -> u32 {
        a.any_order().or_else(|| b.any_order()).unwrap_or(1)
    }

    /// Find the cyclotomic order of any constant in the DAG.
    pub fn any_order(&self) -> Option<u32> {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.id()) {
                continue;
            }
            match e.node() {
                Node::Const(c) => return Some(c.order()),
                Node::Var(_) => {}
                Node::Add(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                    stack.push(a.clone());
                    stack.push(b.clone());
                }
                Node::Pow(a, _) => stack.push(a.clone()),
            }
        }
        None
    }

    pub fn max_var(&self) -> Option<u32> {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        let mut best = None;
        while let Some(e) = stack.pop() {
            if !seen.insert(e.id()) {
                continue;
            }
            match e.node() {
                Node::Var(i) => best = Some(best.map_or(*i, |b: u32| b.max(*i))),
                Node::Const(_) => {}
                Node::Add(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                    stack.push(a.clone());
                    stack.push(b.clone());
                }
                Node::Pow(a, _) => stack.push(a.clone()),
            }
        }
        best
    }

    /// Evaluate at an exact point. `order` is the ambient cyclotomic order the
    /// result should live in; point entries must already have that order.
    pub fn eval(&self, point: &[Cyclo], order: u32) -> Result<Cyclo, EvalError> {
        let mut memo: HashMap<usize, Cyclo> = HashMap::new();
        self.eval_memo(point, order, &mut memo)
    }

    fn eval_memo(
        &self,
        point: &[Cyclo],
        order: u32,
        memo: &mut HashMap<usize, Cyclo>,
    ) -> Result<Cyclo, EvalError> {
        if let Some(v) = memo.get(&self.id()) {
            return Ok(v.clone());
        }
        let v = match self.node() {
            Node::Var(i) => point
                .get(*i as usize)
                .cloned()
                .ok_or(EvalError::VarOutOfRange(*i, point.len()))?,
            Node::Const(c) => {
                if c.order() == order {
                    c.clone()
                } else {
                    c.embed(order)
                }
            }
            Node::Add(a, b) => {
                let x = a.eval_memo(point, order, memo)?;
                let y = b.eval_memo(point, order, memo)?;
                x.add(&y)
            }
            Node::Mul(a, b) => {
                let x = a.eval_memo(point, order, memo)?;
                let y = b.eval_memo(point, order, memo)?;
                x.mul(&y)
            }
            Node::Div(a, b) => {
                let y = b.eval_memo(point, order, memo)?;
                if y.is_zero() {
                    return Err(EvalError::DivisionByZero);
                }
                let x = a.eval_memo(point, order, memo)?;
                x.div(&y).unwrap()
            }
            Node::Pow(a, e) => {
                let x = a.eval_memo(point, order, memo)?;
                x.pow(*e as u64)
            }
        };
        memo.insert(self.id(), v.clone());
        Ok(v)
    }

    /// Symbolic partial derivative with respect to variable `var`.
    pub fn diff(&self, var: u32) -> Expr {
        let mut memo: HashMap<usize, Expr> = HashMap::new();
        self.diff_memo(var, &mut memo)
    }

    fn diff_memo(&self, var: u32, memo: &mut HashMap<usize, Expr>) -> Expr {
        if let Some(d) = memo.get(&self.id()) {
            return d.clone();
        }
        let order = self.any_order().unwrap_or(1);
        let d = match self.node() {
            Node::Var(i) => {
                if *i == var {
                    Expr::int(order, 1)
                } else {
                    Expr::int(order, 0)
                }
            }
            Node::Const(c) => Expr::constant(Cyclo::zero(c.order())),
            Node::Add(a, b) => Expr::add(&a.diff_memo(var, memo), &b.diff_memo(var, memo)),
            Node::Mul(a, b) => {
                let da = a.diff_memo(var, memo);
                let db = b.diff_memo(var, memo);
                Expr::add(&Expr::mul(&da, b), &Expr::mul(a, &db))
            }
            Node::Div(a, b) => {
                // (a/b)' = a'/b - a b'/b^2
                let da = a.diff_memo(var, memo);
                let db = b.diff_memo(var, memo);
                let t1 = Expr::div(&da, b);
                let t2 = Expr::div(&Expr::mul(a, &db), &Expr::pow(b, 2));
                Expr::sub(&t1, &t2)
            }
            Node::Pow(a, e) => {
                let da = a.diff_memo(var, memo);
                let fac = Expr::int(order, *e as i64);
                Expr::mul(&fac, &Expr::mul(&Expr::pow(a, e - 1), &da))
            }
        };
        memo.insert(self.id(), d.clone());
        d
    }

    /// Substitute each variable by the expression `f(i)`; structural, memoized.
    pub fn subst(&self, f: &dyn Fn(u32) -> Expr) -> Expr {
        let mut memo: HashMap<usize, Expr> = HashMap::new();
        self.subst_memo(f, &mut memo)
    }

    fn subst_memo(&self, f: &dyn Fn(u32) -> Expr, memo: &mut HashMap<usize, Expr>) -> Expr {
        if let Some(s) = memo.get(&self.id()) {
            return s.clone();
        }
        let s = match self.node() {
            Node::Var(i) => f(*i),
            Node::Const(_) => self.clone(),
            Node::Add(a, b) => Expr::add(&a.subst_memo(f, memo), &b.subst_memo(f, memo)),
            Node::Mul(a, b) => Expr::mul(&a.subst_memo(f, memo), &b.subst_memo(f, memo)),
            Node::Div(a, b) => Expr::div(&a.subst_memo(f, memo), &b.subst_memo(f, memo)),
            Node::Pow(a, e) => Expr::pow(&a.subst_memo(f, memo), *e),
        };
        memo.insert(self.id(), s.clone());
        s
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Var(i) => write!(f, "v{}", i),
            Node::Const(c) => write!(f, "{}", c),
            Node::Add(a, b) => write!(f, "({:?} + {:?})", a, b),
            Node::Mul(a, b) => write!(f, "({:?} * {:?})", a, b),
            Node::Div(a, b) => write!(f, "({:?} / {:?})", a, b),
            Node::Pow(a, e) => write!(f, "({:?})^{}", a, e),
        }
    }
}

/// Draw one exact random point with integer coordinates in [-10^6, 10^6].
pub fn random_point(rng: &mut ChaCha8Rng, nvars: usize, order: u32) -> Vec<Cyclo> {
    (0..nvars)
        .map(|_| {
            let v: i64 = rng.gen_range(-1_000_000..=1_000_000);
            Cyclo::from_rat(order, rat_i64(v))
        })
        .collect()
}

/// Randomized exact equality of two expression DAGs.
///
/// True iff a - b evaluates to exactly zero at `trials` independently drawn
/// exact rational points avoiding all denominator zeros; points hitting a
/// denominator are resampled with a bounded retry budget.
pub fn expr_equal_randomized(
    a: &Expr,
    b: &Expr,
    trials: u32,
    seed: u64,
    order: u32,
) -> Result<bool, PitError> {
    assert!(trials >= 1);
    let nvars = a
        .max_var()
        .into_iter()
        .chain(b.max_var())
        .max()
        .map(|m| m as usize + 1)
        .unwrap_or(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut budget: u64 = 64 * trials as u64;
    let mut done = 0;
    while done < trials {
        if budget == 0 {
            return Err(PitError::ResampleBudget);
        }
        budget -= 1;
        let pt = random_point(&mut rng, nvars, order);
        let va = a.eval(&pt, order);
        let vb = b.eval(&pt, order);
        match (va, vb) {
            (Ok(x), Ok(y)) => {
                if x != y {
                    return Ok(false);
                }
                done += 1;
            }
            (Err(EvalError::DivisionByZero), _) | (_, Err(EvalError::DivisionByZero)) => {
                continue; // resample
            }
            (Err(e), _) | (_, Err(e)) => panic!("evaluation error: {e}"),
        }
    }
    Ok(true)
}

/// Randomized exact zero test.
pub fn expr_is_zero(e: &Expr, trials: u32, seed: u64, order: u32) -> Result<bool, PitError> {
    let zero = Expr::int(order, 0);
    expr_equal_randomized(e, &zero, trials, seed, order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diff_square() {
        // d/dx1 (x1^2) at x1=3 is 6 (variable 0 is x1)
        let x = Expr::var(0);
        let sq = Expr::mul(&x, &x);
        let d = sq.diff(0);
        let v = d.eval(&[Cyclo::from_i64(1, 3)], 1).unwrap();
        assert_eq!(v, Cyclo::from_i64(1, 6));
    }

    #[test]
    fn diff_quotient() {
        // d/dy1 (x1/y1) at (x1,y1)=(1,2) is -1/4
        let x = Expr::var(0);
        let y = Expr::var(1);
        let q = Expr::div(&x, &y);
        let d = q.diff(1);
        let v = d
            .eval(&[Cyclo::from_i64(1, 1), Cyclo::from_i64(1, 2)], 1)
            .unwrap();
        assert_eq!(v, Cyclo::from_rat(1, rat_i64(-1) / rat_i64(4)));
    }

    #[test]
    fn diff_independent_var() {
        // d/dx2 (x1*y1) = 0 (x2 is variable 2)
        let p = Expr::mul(&Expr::var(0), &Expr::var(1));
        let d = p.diff(2);
        assert!(d.is_zero_const());
    }

    #[test]
    fn randomized_equality() {
        let x = Expr::var(0);
        let y = Expr::var(1);
        let lhs = Expr::pow(&Expr::add(&x, &y), 2);
        let two = Expr::int(1, 2);
        let rhs = Expr::sum(
            1,
            &[
                Expr::pow(&x, 2),
                Expr::mul(&two, &Expr::mul(&x, &y)),
                Expr::pow(&y, 2),
            ],
        );
        assert!(expr_equal_randomized(&lhs, &rhs, 10, 1, 1).unwrap());
        assert!(!expr_equal_randomized(&x, &y, 10, 1, 1).unwrap());
    }

    #[test]
    fn hash_consing_shares_nodes() {
        let a = Expr::add(&Expr::var(0), &Expr::var(1));
        let b = Expr::add(&Expr::var(1), &Expr::var(0));
        assert_eq!(a, b);
    }

    #[test]
    fn partial_fraction_vanishing_sum() {
        // sum over p of 1/(z - eps^(2q-2p)) - 1/(z - eps^(-2p)) for l=4, q=1
        // with eps a primitive 4th root of unity; variable 0 plays z.
        let l = 4i64;
        let q = 1i64;
        let order = 4u32;
        let z = Expr::var(0);
        let mut terms = Vec::new();
        for p in 0..l {
            let e1 = Expr::constant(Cyclo::root_of_unity(order, 2 * q - 2 * p));
            let e2 = Expr::constant(Cyclo::root_of_unity(order, -2 * p));
            let one = Expr::int(order, 1);
            terms.push(Expr::div(&one, &Expr::sub(&z, &e1)));
            terms.push(Expr::neg(&Expr::div(&one, &Expr::sub(&z, &e2))));
        }
        let s = Expr::sum(order, &terms);
        assert!(expr_is_zero(&s, 10, 7, order).unwrap());
    }
}
