//! Normalized intertwiners for the McKay quiver, the slice imbedding of L^n
//! into the representation space, the discriminant function, and the
//! geometric sanity checks (vertex sum rule, bilinear source/sink rules,
//! transversality, torus/group compatibility).

use crate::exact::{expr_is_zero, rat_i64, Cyclo, Expr, Mat, PitError};
use crate::gamma::{Group, IrrepTable};
use crate::mckay::{Color, ParamPack, QuiverSpec};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SliceError {
    #[error("intertwiner construction failed: {0}")]
    Intertwiner(String),
    #[error("identity failed: {0}")]
    Identity(String),
    #[error("regularity violated: {0}")]
    Regularity(String),
    #[error(transparent)]
    Pit(#[from] PitError),
}

/// phi_a as a pair of matrices: phi_a(u) = u_x * X + u_y * Y, a map from
/// N*_{t(a)} to N*_{h(a)}.
#[derive(Clone, Debug)]
pub struct PhiPair {
    pub x: Mat,
    pub y: Mat,
}

impl PhiPair {
    pub fn apply(&self, u: &(Cyclo, Cyclo)) -> Mat {
        self.x.scale(&u.0).add(&self.y.scale(&u.1))
    }
}

/// Intertwiners for every edge of the double quiver. Edge indexing: edge k
/// for k < arrows.len() is the k-th arrow of Q; edge k + arrows.len() is its
/// reverse.
pub struct Intertwiners {
    pub phi: Vec<PhiPair>,
    pub n_q: usize,
}

/// Endpoints of edge `e` of the double quiver (tail, head).
pub fn edge_endpoints(quiver: &QuiverSpec, e: usize) -> (usize, usize) {
    let nq = quiver.arrows.len();
    if e < nq {
        quiver.arrows[e]
    } else {
        let (t, h) = quiver.arrows[e - nq];
        (h, t)
    }
}

impl Intertwiners {
    pub fn n_edges(&self) -> usize {
        2 * self.n_q
    }

    pub fn reverse(&self, e: usize) -> usize {
        if e < self.n_q {
            e + self.n_q
        } else {
            e - self.n_q
        }
    }

    /// phi'_a: N*_{t(a)} -> L tensor N*_{h(a)}; returns (x-component,
    /// y-component) so that phi'_a(m) = x (x)Y m - y (x)X m.
    pub fn phi_prime(&self, e: usize) -> (Mat, Mat) {
        let p = &self.phi[e];
        (p.y.clone(), p.x.neg())
    }
}

/// Matrix of the operator phi'_a . phi_{a*} on L (x) N*_i in the ordered
/// basis (x (x) e_1, ..., x (x) e_d, y (x) e_1, ..., y (x) e_d).
fn phi_prime_phi(iw: &Intertwiners, e_fwd: usize, e_bwd: usize, dim_i: usize) -> Mat {
    // phi_{e_bwd}: L (x) N*_i -> N*_j applies [X | Y]; phi'_{e_fwd} sends
    // m to x (x) (Y' m) - y (x) (X' m)
    let pb = &iw.phi[e_bwd];
    let (fx, fy) = iw.phi_prime(e_fwd);
    let top_left = fx.mul(&pb.x);
    let top_right = fx.mul(&pb.y);
    let bot_left = fy.mul(&pb.x);
    let bot_right = fy.mul(&pb.y);
    let order = top_left.order();
    let mut out = Mat::zero(2 * dim_i, 2 * dim_i, order);
    for r in 0..dim_i {
        for c in 0..dim_i {
            out[(r, c)] = top_left[(r, c)].clone();
            out[(r, dim_i + c)] = top_right[(r, c)].clone();
            out[(dim_i + r, c)] = bot_left[(r, c)].clone();
            out[(dim_i + r, dim_i + c)] = bot_right[(r, c)].clone();
        }
    }
    out
}

/// Solve for the intertwiners of every edge of the double quiver and apply
/// the normalization phi_{a*} phi'_a = delta_{h(a)} Id for a in Q.
pub fn build_intertwiners(
    group: &Group,
    irr: &IrrepTable,
    quiver: &QuiverSpec,
) -> Result<Intertwiners, SliceError> {
    let amb = group.ambient;
    let nq = quiver.arrows.len();
    let mut phi: Vec<Option<PhiPair>> = vec![None; 2 * nq];

    let is_a1 = quiver.n_irr == 2;
    if is_a1 {
        // cyclic:2. Both arrows run i -> o in our orientation; the explicit
        // projection assignments below realize the vertex sum rule.
        let o = quiver.extending;
        for (k, &(t, h)) in quiver.arrows.iter().enumerate() {
            assert_eq!(h, o);
            assert_ne!(t, o);
            let one = Mat::identity(1, amb);
            let zero = Mat::zero(1, 1, amb);
            if k == 0 {
                // a1: i -> o : phi = pr^x_o, phi_{a1*} = -pr^y_i
                phi[0] = Some(PhiPair {
                    x: one.clone(),
                    y: zero.clone(),
                });
                phi[nq] = Some(PhiPair {
                    x: zero.clone(),
                    y: one.neg(),
                });
            } else {
                // a2: i -> o : phi = pr^y_o, phi_{a2*} = pr^x_i
                phi[1] = Some(PhiPair {
                    x: zero.clone(),
                    y: one.clone(),
                });
                phi[nq + 1] = Some(PhiPair {
                    x: one.clone(),
                    y: zero,
                });
            }
        }
    } else {
        for e in 0..2 * nq {
            let (t, h) = edge_endpoints(quiver, e);
            let dt = irr.dims[t];
            let dh = irr.dims[h];
            // unknowns: entries of X then Y (each dh x dt); equivariance for
            // each generator g: for u in {x, y},
            //   phi(g u (x) .) rho*_t(g) = rho*_h(g) phi(u (x) .)
            let nunk = 2 * dh * dt;
            let mut rows: Vec<Vec<Cyclo>> = Vec::new();
            for &g in &group.generators {
                let gm = &group.elems[g as usize];
                let rt = irr.dual_matrix(group, t, g);
                let rh = irr.dual_matrix(group, h, g);
                // g x = gm[0][0] x + gm[1][0] y ; g y = gm[0][1] x + gm[1][1] y
                for ucol in 0..2 {
                    // LHS: (gm[0][ucol] X + gm[1][ucol] Y) * rt; RHS: rh * (ucol == 0 ? X : Y)
                    for r in 0..dh {
                        for c in 0..dt {
                            let mut row = vec![Cyclo::zero(amb); nunk];
                            // LHS coefficients
                            for m in 0..dt {
                                let rt_mc = rt[(m, c)].clone();
                                if rt_mc.is_zero() {
                                    continue;
                                }
                                // X_{r,m} coefficient gm[0][ucol]*rt[m][c]
                                row[r * dt + m] =
                                    row[r * dt + m].add(&gm[(0, ucol)].mul(&rt_mc));
                                // Y_{r,m} coefficient gm[1][ucol]*rt[m][c]
                                row[dh * dt + r * dt + m] =
                                    row[dh * dt + r * dt + m].add(&gm[(1, ucol)].mul(&rt_mc));
                            }
                            // RHS coefficients: rh[r][m] * (X or Y)_{m,c}
                            for m in 0..dh {
                                let rh_rm = rh[(r, m)].clone();
                                if rh_rm.is_zero() {
                                    continue;
                                }
                                let base = if ucol == 0 { 0 } else { dh * dt };
                                row[base + m * dt + c] = row[base + m * dt + c].sub(&rh_rm);
                            }
                            rows.push(row);
                        }
                    }
                }
            }
            let m = Mat::from_rows(rows);
            let null = m.nullspace();
            if null.len() != 1 {
                return Err(SliceError::Intertwiner(format!(
                    "edge {e}: intertwiner space has dimension {}, expected 1",
                    null.len()
                )));
            }
            // deterministic representative: scale first nonzero entry to 1
            let mut v = null[0].clone();
            let pivot = v
                .iter()
                .find(|c| !c.is_zero())
                .cloned()
                .ok_or_else(|| SliceError::Intertwiner("zero intertwiner".into()))?;
            let inv = pivot.inv().unwrap();
            for c in v.iter_mut() {
                *c = c.mul(&inv);
            }
            let mut xm = Mat::zero(dh, dt, amb);
            let mut ym = Mat::zero(dh, dt, amb);
            for r in 0..dh {
                for c in 0..dt {
                    xm[(r, c)] = v[r * dt + c].clone();
                    ym[(r, c)] = v[dh * dt + r * dt + c].clone();
                }
            }
            phi[e] = Some(PhiPair { x: xm, y: ym });
        }
    }
    let mut iw = Intertwiners {
        phi: phi.into_iter().map(|p| p.unwrap()).collect(),
        n_q: nq,
    };
    if !is_a1 {
        // normalize: phi_{a*} phi'_a = delta_{h(a)} Id for each a in Q by
        // rescaling phi_{a*}
        for a in 0..nq {
            let (t, h) = quiver.arrows[a];
            let astar = a + nq;
            // phi_{a*} phi'_a = X_{a*} Y_a - Y_{a*} X_a on N*_t
            let prod = iw.phi[astar]
                .x
                .mul(&iw.phi[a].y)
                .sub(&iw.phi[astar].y.mul(&iw.phi[a].x));
            let dt = irr.dims[t];
            // must be scalar by irreducibility
            let scalar = prod[(0, 0)].clone();
            let target = Cyclo::from_i64(amb, irr.dims[h] as i64);
            let expected = Mat::identity(dt, amb).scale(&scalar);
            if prod != expected {
                return Err(SliceError::Intertwiner(
                    "pairing is not scalar on an irreducible".into(),
                ));
            }
            if scalar.is_zero() {
                return Err(SliceError::Intertwiner("degenerate pairing".into()));
            }
            let factor = target.div(&scalar).unwrap();
            iw.phi[astar] = PhiPair {
                x: iw.phi[astar].x.scale(&factor),
                y: iw.phi[astar].y.scale(&factor),
            };
        }
    }
    // validate both normalizations on every arrow of Q
    for a in 0..nq {
        let (t, h) = quiver.arrows[a];
        let astar = a + nq;
        let fwd = iw.phi[astar]
            .x
            .mul(&iw.phi[a].y)
            .sub(&iw.phi[astar].y.mul(&iw.phi[a].x));
        if fwd != Mat::identity(irr.dims[t], amb).scale(&Cyclo::from_i64(amb, irr.dims[h] as i64))
        {
            return Err(SliceError::Intertwiner(format!(
                "normalization phi_a* phi'_a = delta_h Id fails on arrow {a}"
            )));
        }
        let bwd = iw.phi[a]
            .x
            .mul(&iw.phi[astar].y)
            .sub(&iw.phi[a].y.mul(&iw.phi[astar].x));
        if bwd
            != Mat::identity(irr.dims[h], amb).scale(&Cyclo::from_i64(amb, -(irr.dims[t] as i64)))
        {
            return Err(SliceError::Intertwiner(format!(
                "normalization phi_a phi'_a* = -delta_t Id fails on arrow {a}"
            )));
        }
    }
    Ok(iw)
}

/// Vertex sum rule: at every vertex i,
///   sum over incoming a of phi'_a phi_{a*} - sum over outgoing a of
///   phi'_{a*} phi_a = delta_i Id on L (x) N*_i.
pub fn check_rp(
    group: &Group,
    irr: &IrrepTable,
    quiver: &QuiverSpec,
    iw: &Intertwiners,
) -> Result<(), SliceError> {
    let amb = group.ambient;
    for i in 0..quiver.n_irr {
        let d = irr.dims[i];
        let mut acc = Mat::zero(2 * d, 2 * d, amb);
        for a in 0..quiver.arrows.len() {
            let (t, h) = quiver.arrows[a];
            let astar = a + quiver.arrows.len();
            if h == i {
                acc = acc.add(&phi_prime_phi(iw, a, astar, d));
            }
            if t == i {
                acc = acc.sub(&phi_prime_phi(iw, astar, a, d));
            }
        }
        let expect = Mat::identity(2 * d, amb).scale(&Cyclo::from_i64(amb, d as i64));
        if acc != expect {
            return Err(SliceError::Identity(format!(
                "vertex sum rule fails at vertex {i}"
            )));
        }
    }
    Ok(())
}

/// Bilinear source/sink rules, checked on basis pairs (u, w) in {x, y}^2:
///   sources i: sum over outgoing a of phi_{a*}(u) phi_a(w) = delta_i omega(u, w) Id
///   sinks j:   sum over incoming a of phi_a(w) phi_{a*}(u) = delta_j omega(u, w) Id
/// (the starred argument comes first in omega; this is the sign the vertex
/// sum rule forces).
pub fn check_rpp(
    group: &Group,
    irr: &IrrepTable,
    quiver: &QuiverSpec,
    iw: &Intertwiners,
) -> Result<(), SliceError> {
    let amb = group.ambient;
    let basis = [
        (Cyclo::one(amb), Cyclo::zero(amb)),
        (Cyclo::zero(amb), Cyclo::one(amb)),
    ];
    let nq = quiver.arrows.len();
    for i in 0..quiver.n_irr {
        let d = irr.dims[i];
        for u in &basis {
            for w in &basis {
                let ome = group.omega(u, w);
                let expect = Mat::identity(d, amb).scale(&Cyclo::from_i64(amb, d as i64).mul(&ome));
                let mut acc = Mat::zero(d, d, amb);
                match quiver.colors[i] {
                    Color::Source => {
                        for a in 0..nq {
                            let (t, _) = quiver.arrows[a];
                            if t != i {
                                continue;
                            }
                            acc = acc.add(&iw.phi[a + nq].apply(u).mul(&iw.phi[a].apply(w)));
                        }
                    }
                    Color::Sink => {
                        for a in 0..nq {
                            let (_, h) = quiver.arrows[a];
                            if h != i {
                                continue;
                            }
                            acc = acc.add(&iw.phi[a].apply(w).mul(&iw.phi[a + nq].apply(u)));
                        }
                    }
                }
                if acc != expect {
                    return Err(SliceError::Identity(format!(
                        "bilinear rule fails at vertex {i}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// An exact point of (L^x)^n in the regular locus.
#[derive(Clone, Debug)]
pub struct SlicePoint {
    pub us: Vec<(Cyclo, Cyclo)>,
}

impl SlicePoint {
    pub fn n(&self) -> usize {
        self.us.len()
    }

    /// Coordinates flattened as (x_1, y_1, ..., x_n, y_n) for Expr evaluation.
    pub fn coords(&self) -> Vec<Cyclo> {
        let mut v = Vec::with_capacity(2 * self.n());
        for u in &self.us {
            v.push(u.0.clone());
            v.push(u.1.clone());
        }
        v
    }
}

/// Representatives of the singular lines (lines with stabilizer strictly
/// larger than {1, zeta}), each with its kappa exponent |stab/S| - 1.
pub fn singular_lines(group: &Group) -> Vec<((Cyclo, Cyclo), i64)> {
    let amb = group.ambient;
    let mut lines: Vec<(Cyclo, Cyclo)> = Vec::new();
    for g in 0..group.order() as u16 {
        if g == 0 || g == group.zeta {
            continue;
        }
        let m = &group.elems[g as usize];
        // eigenvectors of a 2x2 matrix: solve (m - t) v = 0 for each
        // eigenvalue t; eigenvalues are roots of unity in the ambient field
        for k in 0..group.elem_order[g as usize] as i64 {
            let ord = group.elem_order[g as usize] as i64;
            if group.ambient as i64 % ord != 0 {
                continue;
            }
            let t = Cyclo::root_of_unity(amb, (amb as i64 / ord) * k);
            let a = m[(0, 0)].sub(&t);
            let b = m[(0, 1)].clone();
            let c = m[(1, 0)].clone();
            let d = m[(1, 1)].sub(&t);
            // det = 0 required for eigenvalue
            if !a.mul(&d).sub(&b.mul(&c)).is_zero() {
                continue;
            }
            // kernel vector
            let v = if !a.is_zero() || !b.is_zero() {
                (b.clone(), a.neg())
            } else if !c.is_zero() || !d.is_zero() {
                (d.clone(), c.neg())
            } else {
                continue; // m == t Id, cannot happen for g not in {1, zeta}
            };
            if v.0.is_zero() && v.1.is_zero() {
                continue;
            }
            // canonical representative: first nonzero coordinate = 1
            let vn = if !v.0.is_zero() {
                let i = v.0.inv().unwrap();
                (Cyclo::one(amb), v.1.mul(&i))
            } else {
                let i = v.1.inv().unwrap();
                (v.0.mul(&i), Cyclo::one(amb))
            };
            if !lines.contains(&vn) {
                lines.push(vn);
            }
        }
    }
    // lexicographically smallest representative is already canonical here;
    // compute kappa for each line
    let mut out = Vec::new();
    for v in lines {
        let mut stab = 0i64;
        for g in 0..group.order() as u16 {
            let gv = group.act(g, &v);
            // gv proportional to v?
            if gv.0.mul(&v.1).sub(&gv.1.mul(&v.0)).is_zero() {
                stab += 1;
            }
        }
        let kappa = stab / 2 - 1;
        if kappa > 0 {
            out.push((v, kappa));
        }
    }
    // deterministic ordering
    out.sort_by_key(|(v, _)| format!("{}|{}", v.0, v.1));
    out
}

/// The discriminant as a symbolic expression in the 2n slice coordinates:
/// product over slots of 1/Delta(u_k) times the product over unordered slot
/// pairs and all group elements of 1/omega(u_m, g u_l).
pub fn discriminant_expr(group: &Group, n: usize) -> Expr {
    let amb = group.ambient;
    let lines = singular_lines(group);
    let one = Expr::int(amb, 1);
    let mut denom = one.clone();
    let xv = |l: usize| Expr::var(2 * l as u32);
    let yv = |l: usize| Expr::var(2 * l as u32 + 1);
    for l in 0..n {
        for (v, kappa) in &lines {
            // omega(v, u_l) = v_x * y_l - v_y * x_l
            let term = Expr::sub(
                &Expr::mul(&Expr::constant(v.0.clone()), &yv(l)),
                &Expr::mul(&Expr::constant(v.1.clone()), &xv(l)),
            );
            denom = Expr::mul(&denom, &Expr::pow(&term, *kappa as u32));
        }
    }
    for m in 0..n {
        for l in (m + 1)..n {
            for g in 0..group.order() as u16 {
                // omega(u_m, g u_l) where (g u)_x etc. are linear forms
                let gm = &group.elems[g as usize];
                let gx = Expr::add(
                    &Expr::mul(&Expr::constant(gm[(0, 0)].clone()), &xv(l)),
                    &Expr::mul(&Expr::constant(gm[(0, 1)].clone()), &yv(l)),
                );
                let gy = Expr::add(
                    &Expr::mul(&Expr::constant(gm[(1, 0)].clone()), &xv(l)),
                    &Expr::mul(&Expr::constant(gm[(1, 1)].clone()), &yv(l)),
                );
                let term = Expr::sub(&Expr::mul(&xv(m), &gy), &Expr::mul(&yv(m), &gx));
                denom = Expr::mul(&denom, &term);
            }
        }
    }
    Expr::div(&one, &denom)
}

/// Check that each slot Euler field scales the discriminant by
/// -(n|G| - 2): the per-slot homogeneity that makes the square root of the
/// discriminant shift the section twist by (n|G| - 2)/2 per slot.
pub fn check_discr_weight(group: &Group, n: usize, trials: u32, seed: u64) -> Result<(), SliceError> {
    let amb = group.ambient;
    let d = discriminant_expr(group, n);
    let weight = Expr::int(amb, -((n as i64) * group.order() as i64 - 2));
    for l in 0..n {
        let x = Expr::var(2 * l as u32);
        let y = Expr::var(2 * l as u32 + 1);
        let euler = Expr::add(&Expr::mul(&x, &d.diff(2 * l as u32)), &Expr::mul(&y, &d.diff(2 * l as u32 + 1)));
        let resid = Expr::sub(&euler, &Expr::mul(&weight, &d));
        if !expr_is_zero(&resid, trials, seed.wrapping_add(l as u64), amb)? {
            return Err(SliceError::Identity(format!(
                "discriminant weight fails in slot {l}"
            )));
        }
    }
    Ok(())
}

/// Total degree of Delta (the single-slot numerator polynomial): |G| - 2.
pub fn delta_degree(group: &Group) -> i64 {
    singular_lines(group).iter().map(|(_, k)| k).sum()
}

/// Regularity conditions for a candidate point.
pub fn is_regular(group: &Group, us: &[(Cyclo, Cyclo)]) -> bool {
    let n = us.len();
    for u in us {
        if u.0.is_zero() && u.1.is_zero() {
            return false;
        }
        // off the singular lines: omega(v, u) != 0
        for (v, _) in singular_lines(group) {
            if v.0.mul(&u.1).sub(&v.1.mul(&u.0)).is_zero() {
                return false;
            }
        }
        // omega(u, g u) != 0 for g outside {1, zeta}
        for g in 0..group.order() as u16 {
            if g == 0 || g == group.zeta {
                continue;
            }
            let gu = group.act(g, u);
            if group.omega(u, &gu).is_zero() {
                return false;
            }
        }
    }
    for m in 0..n {
        for l in 0..n {
            if m == l {
                continue;
            }
            for g in 0..group.order() as u16 {
                let gu = group.act(g, &us[l]);
                if group.omega(&us[m], &gu).is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

/// Sample a regular point with small integer coordinates.
pub fn sample_regular(group: &Group, n: usize, rng: &mut ChaCha8Rng) -> SlicePoint {
    let amb = group.ambient;
    loop {
        let us: Vec<(Cyclo, Cyclo)> = (0..n)
            .map(|_| {
                (
                    Cyclo::from_i64(amb, rng.gen_range(-20i64..=20)),
                    Cyclo::from_i64(amb, rng.gen_range(-20i64..=20)),
                )
            })
            .collect();
        if is_regular(group, &us) {
            return SlicePoint { us };
        }
    }
}

/// Block-diagonal point of the representation space: for each arrow a of Q
/// the block-diagonal matrix of phi_a(u_l), and the all-ones column for b.
pub struct RepPoint {
    /// Per arrow of Q (same indexing as quiver.arrows).
    pub blocks: Vec<Mat>,
    /// Value at the extra arrow b: alpha_o x 1 column of ones.
    pub b_col: Mat,
}

pub fn slice_map(
    irr: &IrrepTable,
    quiver: &QuiverSpec,
    iw: &Intertwiners,
    pt: &SlicePoint,
) -> RepPoint {
    let n = pt.n();
    let amb = iw.phi[0].x.order();
    let mut blocks = Vec::new();
    for a in 0..quiver.arrows.len() {
        let (t, h) = quiver.arrows[a];
        let (dt, dh) = (irr.dims[t], irr.dims[h]);
        let mut m = Mat::zero(n * dh, n * dt, amb);
        for l in 0..n {
            let v = iw.phi[a].apply(&pt.us[l]);
            for r in 0..dh {
                for c in 0..dt {
                    m[(l * dh + r, l * dt + c)] = v[(r, c)].clone();
                }
            }
        }
        blocks.push(m);
    }
    let mut b_col = Mat::zero(n, 1, amb);
    for l in 0..n {
        b_col[(l, 0)] = Cyclo::one(amb);
    }
    RepPoint { blocks, b_col }
}

/// Block-diagonal value of an edge of the double quiver at a point (used for
/// the doubled slice point where both directions carry the same point).
pub fn edge_block(
    irr: &IrrepTable,
    quiver: &QuiverSpec,
    iw: &Intertwiners,
    e: usize,
    pt: &SlicePoint,
) -> Mat {
    let n = pt.n();
    let amb = iw.phi[0].x.order();
    let (t, h) = edge_endpoints(quiver, e);
    let (dt, dh) = (irr.dims[t], irr.dims[h]);
    let mut m = Mat::zero(n * dh, n * dt, amb);
    for l in 0..n {
        let v = iw.phi[e].apply(&pt.us[l]);
        for r in 0..dh {
            for c in 0..dt {
                m[(l * dh + r, l * dt + c)] = v[(r, c)].clone();
            }
        }
    }
    m
}

/// The group imbedding into GL(alpha): component of g at each vertex of the
/// CM quiver. Slot-major index convention: basis vector (l, p) of the vertex
/// space is l * delta_i + p.
pub fn j_lie_group(
    group: &Group,
    irr: &IrrepTable,
    quiver: &QuiverSpec,
    n: usize,
    perm: &[usize],
    gs: &[u16],
) -> Vec<Mat> {
    let amb = group.ambient;
    let mut out = Vec::new();
    for i in 0..quiver.n_irr {
        let d = irr.dims[i];
        let mut m = Mat::zero(n * d, n * d, amb);
        for l in 0..n {
            // slot l content goes to slot perm[l], with the dual action of
            // the local element applied after the move
            let tgt = perm[l];
            let dual = irr.dual_matrix(group, i, gs[tgt]);
            for r in 0..d {
                for c in 0..d {
                    m[(tgt * d + r, l * d + c)] = dual[(r, c)].clone();
                }
            }
        }
        out.push(m);
    }
    // special vertex: always 1
    out.push(Mat::identity(1, amb));
    out
}

/// Torus imbedding: diagonal t^{-1} on the slot factor at sources, identity
/// at sinks and at the special vertex.
pub fn j_lie_torus(
    irr: &IrrepTable,
    quiver: &QuiverSpec,
    n: usize,
    ts: &[Cyclo],
) -> Vec<Mat> {
    let amb = ts[0].order();
    let mut out = Vec::new();
    for i in 0..quiver.n_irr {
        let d = irr.dims[i];
        let mut m = Mat::identity(n * d, amb);
        if quiver.colors[i] == Color::Source {
            for l in 0..n {
                let tinv = ts[l].inv().expect("torus coordinate zero");
                for r in 0..d {
                    m[(l * d + r, l * d + r)] = tinv.clone();
                }
            }
        }
        out.push(m);
    }
    out.push(Mat::identity(1, amb));
    out
}

/// Verify that slice map and group imbedding are compatible:
/// j(g u) = j_lie(g) . j(u) for torus elements and wreath elements.
pub fn check_agree(
    group: &Group,
    irr: &IrrepTable,
    quiver: &QuiverSpec,
    iw: &Intertwiners,
    pt: &SlicePoint,
    rng: &mut ChaCha8Rng,
) -> Result<(), SliceError> {
    let amb = group.ambient;
    let n = pt.n();
    let conj =
        |glm: &Vec<Mat>, rp: &RepPoint| -> RepPoint {
            let mut blocks = Vec::new();
            for a in 0..quiver.arrows.len() {
                let (t, h) = quiver.arrows[a];
                let inv_t = glm[t].inverse().expect("invertible");
                blocks.push(glm[h].mul(&rp.blocks[a]).mul(&inv_t));
            }
            let s_inv = glm[quiver.n_irr].inverse().unwrap();
            let b_col = glm[quiver.extending].mul(&rp.b_col).mul(&s_inv);
            RepPoint { blocks, b_col }
        };
    let eq = |a: &RepPoint, b: &RepPoint| -> bool {
        a.b_col == b.b_col && a.blocks.iter().zip(&b.blocks).all(|(x, y)| x == y)
    };
    let j_u = slice_map(irr, quiver, iw, pt);
    // torus action
    let ts: Vec<Cyclo> = (0..n)
        .map(|_| Cyclo::from_i64(amb, rng.gen_range(1i64..=7)))
        .collect();
    let scaled = SlicePoint {
        us: pt
            .us
            .iter()
            .zip(&ts)
            .map(|(u, t)| (u.0.mul(t), u.1.mul(t)))
            .collect(),
    };
    let lhs = slice_map(irr, quiver, iw, &scaled);
    let glm = j_lie_torus(irr, quiver, n, &ts);
    if !eq(&lhs, &conj(&glm, &j_u)) {
        return Err(SliceError::Identity("torus compatibility fails".into()));
    }
    // wreath action: permutation then local elements
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    let gs: Vec<u16> = (0..n)
        .map(|_| rng.gen_range(0..group.order() as u16))
        .collect();
    // g . u places gamma_{perm[l]} u_l in slot perm[l]
    let mut moved = vec![(Cyclo::zero(amb), Cyclo::zero(amb)); n];
    for l in 0..n {
        moved[perm[l]] = group.act(gs[perm[l]], &pt.us[l]);
    }
    let gpt = SlicePoint { us: moved };
    if !is_regular(group, &gpt.us) {
        return Err(SliceError::Regularity("moved point left the regular locus".into()));
    }
    let lhs2 = slice_map(irr, quiver, iw, &gpt);
    let glm2 = j_lie_group(group, irr, quiver, n, &perm, &gs);
    if !eq(&lhs2, &conj(&glm2, &j_u)) {
        return Err(SliceError::Identity("wreath compatibility fails".into()));
    }
    Ok(())
}

/// Assemble the tangent map gl(alpha) (+) L^n -> T Rep_alpha at j(u) and
/// check it is onto with kernel of dimension exactly n.
pub fn transversality_check(
    group: &Group,
    irr: &IrrepTable,
    pack: &ParamPack,
    iw: &Intertwiners,
    pt: &SlicePoint,
) -> Result<(), SliceError> {
    if !is_regular(group, &pt.us) {
        return Err(SliceError::Regularity("point is not regular".into()));
    }
    let quiver = &pack.quiver;
    let amb = group.ambient;
    let n = pt.n();
    let rp = slice_map(irr, quiver, iw, pt);
    // rows: coordinates of the tangent space (all arrows of the CM quiver);
    // cols: basis of gl(alpha) then the 2n slice directions
    let alpha = &pack.alpha;
    let nv = quiver.n_vertices();
    let gl_dim: i64 = alpha.iter().map(|a| a * a).sum();
    let arrows_cm = quiver.arrows_cm();
    let row_dim: usize = arrows_cm
        .iter()
        .map(|&(t, h)| (alpha[t] * alpha[h]) as usize)
        .sum();
    let mut cols: Vec<Vec<Cyclo>> = Vec::new();
    // value of arrow a at the point
    let arrow_val = |a: usize| -> Mat {
        if a < quiver.arrows.len() {
            rp.blocks[a].clone()
        } else {
            rp.b_col.clone()
        }
    };
    // orbit directions: for each vertex v and matrix unit E_{rs} in gl(alpha_v),
    // the derivative at the identity is E x_a - x_a E by head/tail
    for v in 0..nv {
        let av = alpha[v] as usize;
        for r in 0..av {
            for s in 0..av {
                let mut col = Vec::with_capacity(row_dim);
                for (ai, &(t, h)) in arrows_cm.iter().enumerate() {
                    let xv = arrow_val(ai);
                    let (rows_a, cols_a) = (alpha[h] as usize, alpha[t] as usize);
                    let mut blk = Mat::zero(rows_a, cols_a, amb);
                    if h == v {
                        // E_{rs} * x
                        for c in 0..cols_a {
                            blk[(r, c)] = blk[(r, c)].add(&xv[(s, c)]);
                        }
                    }
                    if t == v {
                        // - x * E_{rs}
                        for rr in 0..rows_a {
                            blk[(rr, s)] = blk[(rr, s)].sub(&xv[(rr, r)]);
                        }
                    }
                    for rr in 0..rows_a {
                        for cc in 0..cols_a {
                            col.push(blk[(rr, cc)].clone());
                        }
                    }
                }
                cols.push(col);
            }
        }
    }
    // slice directions: derivative of the slice map along (x or y) in slot l
    for l in 0..n {
        for xy in 0..2 {
            let mut col = Vec::with_capacity(row_dim);
            for (ai, &(t, h)) in arrows_cm.iter().enumerate() {
                let (rows_a, cols_a) = (alpha[h] as usize, alpha[t] as usize);
                let mut blk = Mat::zero(rows_a, cols_a, amb);
                if ai < quiver.arrows.len() {
                    let (dt, dh) = (irr.dims[t], irr.dims[h]);
                    let dphi = if xy == 0 {
                        iw.phi[ai].x.clone()
                    } else {
                        iw.phi[ai].y.clone()
                    };
                    for r in 0..dh {
                        for c in 0..dt {
                            blk[(l * dh + r, l * dt + c)] = dphi[(r, c)].clone();
                        }
                    }
                }
                for rr in 0..rows_a {
                    for cc in 0..cols_a {
                        col.push(blk[(rr, cc)].clone());
                    }
                }
            }
            cols.push(col);
        }
    }
    // transpose into matrix (rows = tangent coordinates)
    let total_cols = cols.len();
    let mut m = Mat::zero(row_dim, total_cols, amb);
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            m[(i, j)] = v.clone();
        }
    }
    let rank = m.rank();
    if rank != row_dim {
        return Err(SliceError::Identity(format!(
            "tangent map not onto: rank {rank} of {row_dim}"
        )));
    }
    // The kernel always contains the global scalar of gl(alpha), which acts
    // trivially on the representation space; beyond that line the kernel is
    // spanned by the torus-matching pairs, so its dimension is n + 1.
    let kernel = total_cols - rank;
    if kernel != n + 1 {
        return Err(SliceError::Identity(format!(
            "kernel dimension {kernel}, expected {} = n + scalar line (gl dim {gl_dim})",
            n + 1
        )));
    }
    // verify the scalar line really is in the kernel
    {
        let mut scalar_col = vec![Cyclo::zero(amb); row_dim];
        let mut idx = 0usize;
        for v in 0..nv {
            let av = alpha[v] as usize;
            for r in 0..av {
                for s in 0..av {
                    if r == s {
                        for (i, entry) in cols[idx].iter().enumerate() {
                            scalar_col[i] = scalar_col[i].add(entry);
                        }
                    }
                    idx += 1;
                }
            }
        }
        if scalar_col.iter().any(|c| !c.is_zero()) {
            return Err(SliceError::Identity(
                "global scalar does not act trivially".into(),
            ));
        }
    }
    Ok(())
}

/// Only the zero family intertwines the slice values at two points unless the
/// points are related by the group: exact nullspace computation.
pub fn check_rigidity(
    group: &Group,
    irr: &IrrepTable,
    quiver: &QuiverSpec,
    iw: &Intertwiners,
    u: &(Cyclo, Cyclo),
    w: &(Cyclo, Cyclo),
) -> Result<(), SliceError> {
    // skip if u ~ g w for some g
    for g in 0..group.order() as u16 {
        let gw = group.act(g, w);
        if u.0.mul(&gw.1).sub(&u.1.mul(&gw.0)).is_zero() {
            return Err(SliceError::Regularity(
                "points are group-proportional".into(),
            ));
        }
    }
    let amb = group.ambient;
    // unknowns: beta_i in End(N*_i); equations: phi_a(u) beta_t = beta_h phi_a(w)
    let nunk: usize = irr.dims.iter().map(|d| d * d).sum();
    let offs: Vec<usize> = {
        let mut o = vec![0usize];
        for d in &irr.dims {
            let last = *o.last().unwrap();
            o.push(last + d * d);
        }
        o
    };
    let mut rows = Vec::new();
    for a in 0..quiver.arrows.len() {
        let (t, h) = quiver.arrows[a];
        let pu = iw.phi[a].apply(u);
        let pw = iw.phi[a].apply(w);
        let (dt, dh) = (irr.dims[t], irr.dims[h]);
        for r in 0..dh {
            for c in 0..dt {
                let mut row = vec![Cyclo::zero(amb); nunk];
                // (phi(u) beta_t)_{r,c} = sum_m phi(u)_{r,m} beta_t_{m,c}
                for m in 0..dt {
                    row[offs[t] + m * dt + c] = row[offs[t] + m * dt + c].add(&pu[(r, m)]);
                }
                // -(beta_h phi(w))_{r,c} = -sum_m beta_h_{r,m} phi(w)_{m,c}
                for m in 0..dh {
                    row[offs[h] + r * dh + m] = row[offs[h] + r * dh + m].sub(&pw[(m, c)]);
                }
                rows.push(row);
            }
        }
    }
    let m = Mat::from_rows(rows);
    if !m.nullspace().is_empty() {
        return Err(SliceError::Identity(
            "nonzero intertwiner between distinct slice values".into(),
        ));
    }
    Ok(())
}

/// Moment-map value at a doubled representation point: per vertex,
/// sum over incoming of x_a x_{a*} minus sum over outgoing of x_{a*} x_a.
pub fn moment_map(
    quiver: &QuiverSpec,
    alpha: &[i64],
    fwd: &[Mat],
    bwd: &[Mat],
    b_col: Option<&Mat>,
    b_row: Option<&Mat>,
) -> Vec<Mat> {
    let order = fwd
        .first()
        .map(|m| m.order())
        .or_else(|| b_col.map(|m| m.order()))
        .expect("empty moment data");
    let nv = quiver.n_vertices();
    let mut out: Vec<Mat> = (0..nv)
        .map(|v| Mat::zero(alpha[v] as usize, alpha[v] as usize, order))
        .collect();
    for a in 0..quiver.arrows.len() {
        let (t, h) = quiver.arrows[a];
        out[h] = out[h].add(&fwd[a].mul(&bwd[a]));
        out[t] = out[t].sub(&bwd[a].mul(&fwd[a]));
    }
    if let (Some(col), Some(row), Some(s)) = (b_col, b_row, quiver.special) {
        let o = quiver.extending;
        out[o] = out[o].add(&col.mul(row));
        out[s] = out[s].sub(&row.mul(col));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::{build_group, irreps, CentralElement};
    use crate::mckay::{mckay_quiver, param_pack};
    use rand::SeedableRng;

    fn setup(desc: &str) -> (Group, IrrepTable, QuiverSpec, Intertwiners) {
        let g = build_group(desc).unwrap();
        let irr = irreps(&g).unwrap();
        let q = mckay_quiver(&g, &irr).unwrap();
        let iw = build_intertwiners(&g, &irr, &q).unwrap();
        (g, irr, q, iw)
    }

    #[test]
    fn rp_all_groups() {
        for desc in [
            "cyclic:2",
            "cyclic:4",
            "cyclic:6",
            "binary-dihedral:2",
            "binary-dihedral:3",
        ] {
            let (g, irr, q, iw) = setup(desc);
            check_rp(&g, &irr, &q, &iw).unwrap_or_else(|e| panic!("{desc}: {e}"));
        }
    }

    #[test]
    fn rpp_all_groups() {
        for desc in ["cyclic:2", "cyclic:4", "binary-dihedral:2"] {
            let (g, irr, q, iw) = setup(desc);
            check_rpp(&g, &irr, &q, &iw).unwrap_or_else(|e| panic!("{desc}: {e}"));
        }
    }

    #[test]
    fn discriminant_trivial_for_a1() {
        let g = build_group("cyclic:2").unwrap();
        assert!(singular_lines(&g).is_empty());
        assert_eq!(delta_degree(&g), 0);
    }

    #[test]
    fn delta_degree_matches() {
        for desc in ["cyclic:4", "cyclic:6", "binary-dihedral:2", "binary-dihedral:3"] {
            let g = build_group(desc).unwrap();
            assert_eq!(delta_degree(&g), g.order() as i64 - 2, "{desc}");
        }
    }

    #[test]
    fn discr_weight_small() {
        for (desc, n) in [("cyclic:2", 2usize), ("cyclic:4", 1), ("binary-dihedral:2", 1)] {
            let g = build_group(desc).unwrap();
            check_discr_weight(&g, n, 6, 42).unwrap_or_else(|e| panic!("{desc}: {e}"));
        }
    }

    #[test]
    fn transversality_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for (desc, n) in [("cyclic:2", 1usize), ("cyclic:2", 2), ("cyclic:4", 1)] {
            let (g, irr, q, iw) = setup(desc);
            let pack = param_pack(&g, &irr, &q, n, &g.zero(), &CentralElement::zero(&g)).unwrap();
            let pt = sample_regular(&g, n, &mut rng);
            transversality_check(&g, &irr, &pack, &iw, &pt)
                .unwrap_or_else(|e| panic!("{desc} n={n}: {e}"));
        }
    }

    #[test]
    fn agree_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (desc, n) in [("cyclic:2", 2usize), ("cyclic:4", 2), ("binary-dihedral:2", 1)] {
            let (g, irr, q, iw) = setup(desc);
            let pt = sample_regular(&g, n, &mut rng);
            check_agree(&g, &irr, &q, &iw, &pt, &mut rng)
                .unwrap_or_else(|e| panic!("{desc} n={n}: {e}"));
        }
    }

    #[test]
    fn rigidity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for desc in ["cyclic:4", "binary-dihedral:2"] {
            let (g, irr, q, iw) = setup(desc);
            loop {
                let p1 = sample_regular(&g, 1, &mut rng);
                let p2 = sample_regular(&g, 1, &mut rng);
                match check_rigidity(&g, &irr, &q, &iw, &p1.us[0], &p2.us[0]) {
                    Ok(()) => break,
                    Err(SliceError::Regularity(_)) => continue,
                    Err(e) => panic!("{desc}: {e}"),
                }
            }
        }
    }

    #[test]
    fn doubled_slice_moment_vanishes() {
        // with both directions of each edge carrying the same point, the
        // moment-map value vanishes at every vertex of Q
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for (desc, n) in [("cyclic:2", 2usize), ("cyclic:4", 1), ("binary-dihedral:2", 1)] {
            let (g, irr, q, iw) = setup(desc);
            let pack = param_pack(&g, &irr, &q, n, &g.zero(), &CentralElement::zero(&g)).unwrap();
            let pt = sample_regular(&g, n, &mut rng);
            let nq = q.arrows.len();
            let cm = &pack.quiver;
            let fwd: Vec<Mat> = (0..nq).map(|a| edge_block(&irr, cm, &iw, a, &pt)).collect();
            let bwd: Vec<Mat> = (0..nq)
                .map(|a| edge_block(&irr, cm, &iw, a + nq, &pt))
                .collect();
            let mu = moment_map(cm, &pack.alpha, &fwd, &bwd, None, None);
            for (v, m) in mu.iter().enumerate() {
                if v == cm.s() {
                    continue;
                }
                assert!(m.is_zero(), "{desc} n={n} vertex {v} moment nonzero");
            }
        }
    }
}
