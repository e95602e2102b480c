//! The wreath-product group algebra and the symplectic reflection algebra
//! with a PBW normal form: sums of ordered monomials in the x-, y-generators
//! times wreath group elements, reduced by iterated rewriting against the
//! defining commutation relations.

use crate::exact::{rat_i64, Cyclo};
use crate::gamma::{CentralElement, Group, IrrepTable};
use crate::mckay::ParamPack;
use crate::slice::{edge_endpoints, Intertwiners};
use std::collections::HashMap;

/// Element of the wreath product: perm is sigma (perm[i] = sigma(i)), gs the
/// local group elements. The element acts on L^n by permuting slots first and
/// applying the local elements after: (g u)_j = gs[j] . u_{sigma^{-1}(j)}.
/// Consequently g v_(l) g^{-1} = (gs[sigma(l)] v)_(sigma(l)).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Wreath {
    pub perm: Vec<u8>,
    pub gs: Vec<u16>,
}

impl Wreath {
    pub fn identity(n: usize) -> Self {
        Wreath {
            perm: (0..n as u8).collect(),
            gs: vec![0; n],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| p as usize == i)
            && self.gs.iter().all(|&g| g == 0)
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut w = Wreath::identity(n);
        w.perm.swap(a, b);
        w
    }

    pub fn local(n: usize, slot: usize, g: u16) -> Self {
        let mut w = Wreath::identity(n);
        w.gs[slot] = g;
        w
    }

    pub fn sign(&self) -> i64 {
        // parity of the permutation
        let n = self.perm.len();
        let mut seen = vec![false; n];
        let mut sign = 1i64;
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let mut len = 0;
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                j = self.perm[j] as usize;
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        sign
    }

    pub fn mul(&self, other: &Wreath, group: &Group) -> Wreath {
        let n = self.perm.len();
        let mut perm = vec![0u8; n];
        let mut gs = vec![0u16; n];
        // inverse of self.perm
        let mut sinv = vec![0u8; n];
        for i in 0..n {
            sinv[self.perm[i] as usize] = i as u8;
        }
        for i in 0..n {
            perm[i] = self.perm[other.perm[i] as usize];
        }
        for j in 0..n {
            gs[j] = group.mul2(self.gs[j], other.gs[sinv[j] as usize]);
        }
        Wreath { perm, gs }
    }

    pub fn inverse(&self, group: &Group) -> Wreath {
        let n = self.perm.len();
        let mut perm = vec![0u8; n];
        let mut gs = vec![0u16; n];
        for i in 0..n {
            perm[self.perm[i] as usize] = i as u8;
        }
        for j in 0..n {
            gs[j] = group.invert(self.gs[self.perm[j] as usize]);
        }
        Wreath { perm, gs }
    }

    /// Apply to a point of L^n.
    pub fn act_point(&self, group: &Group, us: &[(Cyclo, Cyclo)]) -> Vec<(Cyclo, Cyclo)> {
        let n = self.perm.len();
        let mut sinv = vec![0usize; n];
        for i in 0..n {
            sinv[self.perm[i] as usize] = i;
        }
        (0..n)
            .map(|j| group.act(self.gs[j], &us[sinv[j]]))
            .collect()
    }
}

/// Exponent vector over x_1, y_1, ..., x_n, y_n (index 2l for x, 2l+1 for y).
pub type Mono = Vec<u8>;

fn mono_degree(m: &Mono) -> usize {
    m.iter().map(|&e| e as usize).sum()
}

/// A letter of a word: (slot, 0 for x / 1 for y).
type Letter = (u8, u8);

fn word_of_mono(m: &Mono) -> Vec<Letter> {
    let mut w = Vec::new();
    for (i, &e) in m.iter().enumerate() {
        for _ in 0..e {
            w.push(((i / 2) as u8, (i % 2) as u8));
        }
    }
    w
}

fn mono_of_sorted_word(n: usize, w: &[Letter]) -> Mono {
    let mut m = vec![0u8; 2 * n];
    for &(slot, xy) in w {
        m[2 * slot as usize + xy as usize] += 1;
    }
    m
}

/// Parameters for the rewriting: everything the defining relations need.
pub struct SraCtx<'a> {
    pub group: &'a Group,
    pub n: usize,
    pub t: Cyclo,
    pub k: Cyclo,
    pub c: CentralElement,
}

impl<'a> SraCtx<'a> {
    pub fn new(group: &'a Group, n: usize, k: Cyclo, c: CentralElement) -> Self {
        let t = group.rat(rat_i64(1) / rat_i64(group.order() as i64));
        SraCtx { group, n, t, k, c }
    }

    pub fn from_pack(group: &'a Group, pack: &ParamPack) -> Self {
        SraCtx::new(group, pack.n, pack.k.clone(), pack.c.clone())
    }

    /// Same group and rank, with the sign of k flipped.
    pub fn flip_k(&self) -> SraCtx<'a> {
        SraCtx {
            group: self.group,
            n: self.n,
            t: self.t.clone(),
            k: self.k.neg(),
            c: self.c.clone(),
        }
    }

    /// Same group and rank with c replaced by its bar involution.
    pub fn bar_c(&self) -> SraCtx<'a> {
        SraCtx {
            group: self.group,
            n: self.n,
            t: self.t.clone(),
            k: self.k.clone(),
            c: self.c.bar(self.group),
        }
    }
}

/// Normal-form element: map from (ordered monomial, group element) to an
/// exact coefficient; zero coefficients are pruned.
#[derive(Clone, Debug)]
pub struct SraElem {
    pub n: usize,
    pub terms: HashMap<(Mono, Wreath), Cyclo>,
}

impl SraElem {
    pub fn zero(n: usize) -> Self {
        SraElem {
            n,
            terms: HashMap::new(),
        }
    }

    pub fn one(n: usize, group: &Group) -> Self {
        let mut terms = HashMap::new();
        terms.insert(
            (vec![0u8; 2 * n], Wreath::identity(n)),
            Cyclo::one(group.ambient),
        );
        SraElem { n, terms }
    }

    pub fn group_elem(n: usize, group: &Group, w: Wreath, coeff: Cyclo) -> Self {
        let mut e = SraElem::zero(n);
        e.push(vec![0u8; 2 * n], w, coeff);
        let _ = group;
        e
    }

    /// Single generator x_(slot) or y_(slot).
    pub fn generator(n: usize, group: &Group, slot: usize, xy: u8, coeff: Cyclo) -> Self {
        let mut m = vec![0u8; 2 * n];
        m[2 * slot + xy as usize] += 1;
        let mut e = SraElem::zero(n);
        e.push(m, Wreath::identity(n), coeff);
        let _ = group;
        e
    }

    fn push(&mut self, m: Mono, w: Wreath, coeff: Cyclo) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry((m, w));
        match entry {
            std::collections::hash_map::Entry::Occupied(mut o) => {
                let v = o.get().add(&coeff);
                if v.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::hash_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
        }
    }

    pub fn add(&self, other: &SraElem) -> SraElem {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for ((m, w), c) in &other.terms {
            out.push(m.clone(), w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &SraElem) -> SraElem {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for ((m, w), c) in &other.terms {
            out.push(m.clone(), w.clone(), c.neg());
        }
        out
    }

    pub fn scale(&self, c: &Cyclo) -> SraElem {
        let mut out = SraElem::zero(self.n);
        for ((m, w), v) in &self.terms {
            out.push(m.clone(), w.clone(), v.mul(c));
        }
        out
    }

    pub fn neg(&self) -> SraElem {
        let mut out = SraElem::zero(self.n);
        for ((m, w), v) in &self.terms {
            out.push(m.clone(), w.clone(), v.neg());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|(m, _)| mono_degree(m))
            .max()
            .unwrap_or(0)
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn equal(&self, other: &SraElem) -> bool {
        if self.n != other.n || self.terms.len() != other.terms.len() {
            return false;
        }
        self.terms
            .iter()
            .all(|(k, v)| other.terms.get(k).map_or(false, |w| w == v))
    }
}

/// Correction terms of the commutator [u_(l), v_(m)] in normal form, as a
/// list of (group element, coefficient).
fn commutator_terms(
    ctx: &SraCtx,
    l: usize,
    uxy: u8,
    m: usize,
    vxy: u8,
) -> Vec<(Wreath, Cyclo)> {
    let group = ctx.group;
    let amb = group.ambient;
    let n = ctx.n;
    let half = Cyclo::from_rat(amb, rat_i64(1) / rat_i64(2));
    let basis = [
        (Cyclo::one(amb), Cyclo::zero(amb)),
        (Cyclo::zero(amb), Cyclo::one(amb)),
    ];
    let mut out: Vec<(Wreath, Cyclo)> = Vec::new();
    if l == m {
        // [x_(l), y_(l)] = t + (k/2) sum_{m != l} sum_g s_{lm} g_(l) g_(m)^{-1}
        //               + sum_{g != 1} c_g g_(l)
        // (and [y, x] is the negative; [x, x] = [y, y] = 0)
        if uxy == vxy {
            return out;
        }
        let sign = if uxy == 0 { 1i64 } else { -1i64 };
        let sg = Cyclo::from_i64(amb, sign);
        out.push((Wreath::identity(n), ctx.t.mul(&sg)));
        let kh = ctx.k.mul(&half).mul(&sg);
        if !kh.is_zero() {
            for mm in 0..n {
                if mm == l {
                    continue;
                }
                for g in 0..group.order() as u16 {
                    let w = Wreath::transposition(n, l, mm)
                        .mul(&Wreath::local(n, l, g), group)
                        .mul(&Wreath::local(n, mm, group.invert(g)), group);
                    out.push((w, kh.clone()));
                }
            }
        }
        for g in 1..group.order() as u16 {
            let cg = ctx.c.coeff(g);
            if cg.is_zero() {
                continue;
            }
            out.push((Wreath::local(n, l, g), cg.mul(&sg)));
        }
    } else {
        // [u_(l), v_(m)] = -(k/2) sum_g omega(g u, v) s_{lm} g_(l) g_(m)^{-1}
        let u = &basis[uxy as usize];
        let v = &basis[vxy as usize];
        let mkh = ctx.k.mul(&half).neg();
        if mkh.is_zero() {
            return out;
        }
        for g in 0..group.order() as u16 {
            let gu = group.act(g, u);
            let om = group.omega(&gu, v);
            if om.is_zero() {
                continue;
            }
            let w = Wreath::transposition(n, l, m)
                .mul(&Wreath::local(n, l, g), group)
                .mul(&Wreath::local(n, m, group.invert(g)), group);
            out.push((w, mkh.mul(&om)));
        }
    }
    out
}

/// Transform a letter by conjugation with a group element: g v_(l) g^{-1}
/// expands to a combination of the two letters at slot sigma(l).
fn conjugate_letter(
    ctx: &SraCtx,
    g: &Wreath,
    letter: Letter,
) -> Vec<(Letter, Cyclo)> {
    let (slot, xy) = letter;
    let tgt = g.perm[slot as usize] as usize;
    let gamma = g.gs[tgt];
    let gm = &ctx.group.elems[gamma as usize];
    // image vector = gamma . (x or y): column xy of the matrix
    let cx = gm[(0, xy as usize)].clone();
    let cy = gm[(1, xy as usize)].clone();
    let mut out = Vec::new();
    if !cx.is_zero() {
        out.push(((tgt as u8, 0u8), cx));
    }
    if !cy.is_zero() {
        out.push(((tgt as u8, 1u8), cy));
    }
    out
}

/// Straighten a list of raw items (word, group, coeff) to normal form.
fn normalize(ctx: &SraCtx, items: Vec<(Vec<Letter>, Wreath, Cyclo)>) -> SraElem {
    let mut out = SraElem::zero(ctx.n);
    let mut stack = items;
    while let Some((word, g, coeff)) = stack.pop() {
        if coeff.is_zero() {
            continue;
        }
        // find first adjacent inversion
        let key = |l: &Letter| (l.0 as usize) * 2 + l.1 as usize;
        let mut pos = None;
        for p in 0..word.len().saturating_sub(1) {
            if key(&word[p]) > key(&word[p + 1]) {
                pos = Some(p);
                break;
            }
        }
        let Some(p) = pos else {
            out.push(mono_of_sorted_word(ctx.n, &word), g, coeff);
            continue;
        };
        let a = word[p];
        let b = word[p + 1];
        // a b = b a + [a, b]
        let mut swapped = word.clone();
        swapped.swap(p, p + 1);
        stack.push((swapped, g.clone(), coeff.clone()));
        let corr = commutator_terms(ctx, a.0 as usize, a.1, b.0 as usize, b.1);
        if !corr.is_empty() {
            let prefix: Vec<Letter> = word[..p].to_vec();
            let suffix: Vec<Letter> = word[p + 2..].to_vec();
            for (h, hc) in corr {
                // prefix . h . suffix . g = prefix . (h suffix h^{-1}) . h g
                // expand each conjugated suffix letter
                let mut expansions: Vec<(Vec<Letter>, Cyclo)> =
                    vec![(prefix.clone(), coeff.mul(&hc))];
                for &letter in &suffix {
                    let options = conjugate_letter(ctx, &h, letter);
                    let mut next = Vec::new();
                    for (w2, c2) in &expansions {
                        for (nl, nc) in &options {
                            let mut w3 = w2.clone();
                            w3.push(*nl);
                            next.push((w3, c2.mul(nc)));
                        }
                    }
                    expansions = next;
                }
                let hg = h.mul(&g, ctx.group);
                for (w2, c2) in expansions {
                    stack.push((w2, hg.clone(), c2));
                }
            }
        }
    }
    out
}

/// Product in the symplectic reflection algebra, reduced to normal form.
pub fn sra_mul(ctx: &SraCtx, a: &SraElem, b: &SraElem) -> SraElem {
    assert_eq!(a.n, ctx.n);
    assert_eq!(b.n, ctx.n);
    let mut items = Vec::new();
    for ((m1, g1), c1) in &a.terms {
        let w1 = word_of_mono(m1);
        for ((m2, g2), c2) in &b.terms {
            // move g1 past the letters of m2
            let w2 = word_of_mono(m2);
            let mut expansions: Vec<(Vec<Letter>, Cyclo)> = vec![(w1.clone(), c1.mul(c2))];
            for &letter in &w2 {
                let options = conjugate_letter(ctx, g1, letter);
                let mut next = Vec::new();
                for (w, c) in &expansions {
                    for (nl, nc) in &options {
                        let mut w3 = w.clone();
                        w3.push(*nl);
                        next.push((w3, c.mul(nc)));
                    }
                }
                expansions = next;
            }
            let g = g1.mul(g2, ctx.group);
            for (w, c) in expansions {
                items.push((w, g.clone(), c));
            }
        }
    }
    normalize(ctx, items)
}

/// Product of a list of elements, left to right.
pub fn sra_product(ctx: &SraCtx, factors: &[&SraElem]) -> SraElem {
    let mut acc = SraElem::one(ctx.n, ctx.group);
    for f in factors {
        acc = sra_mul(ctx, &acc, f);
    }
    acc
}

// ---------------------------------------------------------------------------
// idempotents

/// Average over a set of wreath elements with uniform weight.
fn average(n: usize, group: &Group, ws: Vec<(Wreath, Cyclo)>) -> SraElem {
    let mut e = SraElem::zero(n);
    for (w, c) in ws {
        e.push(vec![0u8; 2 * n], w, c);
    }
    let _ = group;
    e
}

/// Symmetrizer over the permutations of slots start..n (identity locals).
pub fn symmetrizer(ctx: &SraCtx, start: usize, signed: bool) -> SraElem {
    let n = ctx.n;
    let amb = ctx.group.ambient;
    let slots: Vec<usize> = (start..n).collect();
    let mut perms: Vec<Vec<usize>> = vec![slots.clone()];
    // generate all permutations of the moving slots
    let mut all = Vec::new();
    fn heap(k: usize, arr: &mut Vec<usize>, all: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            all.push(arr.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, arr, all);
            if k % 2 == 0 {
                arr.swap(i, k - 1);
            } else {
                arr.swap(0, k - 1);
            }
        }
    }
    let mut arr = slots.clone();
    heap(arr.len().max(1), &mut arr, &mut all);
    if slots.is_empty() {
        all = vec![vec![]];
    }
    perms = all;
    let count = perms.len() as i64;
    let weight = Cyclo::from_rat(amb, rat_i64(1) / rat_i64(count));
    let mut ws = Vec::new();
    for p in &perms {
        let mut w = Wreath::identity(n);
        for (idx, &img) in p.iter().enumerate() {
            w.perm[slots[idx]] = img as u8;
        }
        let c = if signed {
            weight.mul(&Cyclo::from_i64(amb, w.sign()))
        } else {
            weight.clone()
        };
        ws.push((w, c));
    }
    average(n, ctx.group, ws)
}

/// The matrix-coefficient element u^i_{p,q} placed in one slot:
/// (dim_i/|G|) sum_g rho_i(g^{-1})_{q,p} g_(slot).
pub fn matrix_unit(ctx: &SraCtx, irr: &IrrepTable, i: usize, p: usize, q: usize, slot: usize) -> SraElem {
    let group = ctx.group;
    let amb = group.ambient;
    let scale = Cyclo::from_rat(
        amb,
        rat_i64(irr.dims[i] as i64) / rat_i64(group.order() as i64),
    );
    let mut ws = Vec::new();
    for g in 0..group.order() as u16 {
        let coeff = irr.irreps[i][group.invert(g) as usize][(q, p)].mul(&scale);
        if coeff.is_zero() {
            continue;
        }
        ws.push((Wreath::local(ctx.n, slot, g), coeff));
    }
    average(ctx.n, group, ws)
}

/// e_o in one slot: average of the whole group.
pub fn e_o_slot(ctx: &SraCtx, irr: &IrrepTable, slot: usize) -> SraElem {
    matrix_unit(ctx, irr, irr.trivial, 0, 0, slot)
}

/// The idempotents of the quiver map.
pub struct Idempotents {
    /// e = symmetrizer times e_o in every slot.
    pub e: SraElem,
    /// e_minus = signed symmetrizer times e_o in every slot.
    pub e_minus: SraElem,
    /// e_{i, n-1} for every vertex i of I.
    pub e_vertex: Vec<SraElem>,
}

pub fn idempotents(ctx: &SraCtx, irr: &IrrepTable) -> Idempotents {
    let n = ctx.n;
    let mut e = symmetrizer(ctx, 0, false);
    for slot in 0..n {
        e = sra_mul(ctx, &e, &e_o_slot(ctx, irr, slot));
    }
    let mut e_minus = symmetrizer(ctx, 0, true);
    for slot in 0..n {
        e_minus = sra_mul(ctx, &e_minus, &e_o_slot(ctx, irr, slot));
    }
    let mut e_vertex = Vec::new();
    for i in 0..irr.len() {
        let mut v = symmetrizer(ctx, 1, false);
        v = sra_mul(ctx, &v, &matrix_unit(ctx, irr, i, 0, 0, 0));
        for slot in 1..n {
            v = sra_mul(ctx, &v, &e_o_slot(ctx, irr, slot));
        }
        e_vertex.push(v);
    }
    Idempotents { e, e_minus, e_vertex }
}

// ---------------------------------------------------------------------------
// the quiver map

/// Steps of a path in the doubled CM quiver: an edge index of the double
/// quiver of Q, or the extra arrows between o and the special vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathStep {
    Edge(usize),
    B,
    BStar,
}

/// The element of L (x) CG sitting in slot 1 that realizes one edge of the
/// double quiver, padded by e_o in the remaining slots.
pub fn edge_element(
    ctx: &SraCtx,
    irr: &IrrepTable,
    iw: &Intertwiners,
    quiver: &crate::mckay::QuiverSpec,
    e: usize,
) -> SraElem {
    let amb = ctx.group.ambient;
    let (t, _h) = edge_endpoints(quiver, e);
    let sign = if e < iw.n_q { 1i64 } else { -1i64 };
    let sg = Cyclo::from_i64(amb, sign);
    let phi = &iw.phi[e];
    let dt = irr.dims[t];
    let mut acc = SraElem::zero(ctx.n);
    for p in 0..dt {
        // (phi^y)_{1p} x_(1) - (phi^x)_{1p} y_(1), times u^t_{p,1} in slot 1
        let unit = matrix_unit(ctx, irr, t, p, 0, 0);
        let vx = SraElem::generator(ctx.n, ctx.group, 0, 0, phi.y[(0, p)].mul(&sg));
        let vy = SraElem::generator(ctx.n, ctx.group, 0, 1, phi.x[(0, p)].mul(&sg).neg());
        let vec_part = vx.add(&vy);
        acc = acc.add(&sra_mul(ctx, &vec_part, &unit));
    }
    // pad with e_o in slots 2..n
    for slot in 1..ctx.n {
        acc = sra_mul(ctx, &acc, &e_o_slot(ctx, irr, slot));
    }
    acc
}

/// -(1 + s_12 + ... + s_1n): the renormalized projection generator.
pub fn bstar_element(ctx: &SraCtx) -> SraElem {
    let n = ctx.n;
    let amb = ctx.group.ambient;
    let mut e = SraElem::zero(n);
    e.push(
        vec![0u8; 2 * n],
        Wreath::identity(n),
        Cyclo::from_i64(amb, -1),
    );
    for l in 1..n {
        e.push(
            vec![0u8; 2 * n],
            Wreath::transposition(n, 0, l),
            Cyclo::from_i64(amb, -1),
        );
    }
    e
}

/// Vertex at which a path step starts / ends (in the CM vertex set, with the
/// special vertex encoded as quiver.s()).
pub fn step_endpoints(quiver: &crate::mckay::QuiverSpec, step: PathStep) -> (usize, usize) {
    match step {
        PathStep::Edge(e) => edge_endpoints(quiver, e),
        PathStep::B => (quiver.s(), quiver.extending),
        PathStep::BStar => (quiver.extending, quiver.s()),
    }
}

/// Image of a path under the quiver map: the product of per-edge elements
/// sandwiched by the vertex idempotents of its endpoints (e_{i,n-1} on I,
/// the symmetrizer idempotent e at the special vertex). An empty path at
/// vertex v gives the idempotent of v. Uses the renormalized convention
/// where the backwards special arrow is -(1 + s_12 + ... + s_1n).
pub fn theta_quiver_path(
    ctx: &SraCtx,
    irr: &IrrepTable,
    iw: &Intertwiners,
    quiver: &crate::mckay::QuiverSpec,
    idem: &Idempotents,
    steps: &[PathStep],
    start_vertex: usize,
) -> Result<SraElem, String> {
    let vert_idem = |v: usize| -> &SraElem {
        if Some(v) == quiver.special {
            &idem.e
        } else {
            &idem.e_vertex[v]
        }
    };
    let mut at = start_vertex;
    let mut acc = vert_idem(at).clone();
    for &step in steps {
        let (t, h) = step_endpoints(quiver, step);
        if t != at {
            return Err(format!("path not composable at vertex {at}"));
        }
        let x = match step {
            PathStep::Edge(e) => edge_element(ctx, irr, iw, quiver, e),
            PathStep::B => SraElem::one(ctx.n, ctx.group),
            PathStep::BStar => bstar_element(ctx),
        };
        acc = sra_mul(ctx, &x, &acc);
        acc = sra_mul(ctx, vert_idem(h), &acc);
        at = h;
    }
    Ok(acc)
}

/// Report of a relation check: the first failing vertex with the residual.
#[derive(Debug)]
pub struct RelationFailure {
    pub vertex: usize,
    pub residual_terms: usize,
    pub detail: String,
}

/// Verify the preprojective relations of the quiver-map images: at every
/// vertex i of I, sandwiched by e_{i,n-1},
///   sum over incoming a of a a* - sum over outgoing a of a* a
///     + [i = o] nu b b*  =  (lambda_i - [i = o] nu) e_{i,n-1}
/// and at the special vertex b* b = -n e.
pub fn check_pimodule_relations(
    ctx: &SraCtx,
    irr: &IrrepTable,
    iw: &Intertwiners,
    pack: &ParamPack,
    idem: &Idempotents,
) -> Result<(), RelationFailure> {
    let quiver = &pack.quiver;
    let nq = iw.n_q;
    let o = quiver.extending;
    for i in 0..quiver.n_irr {
        let mut acc = SraElem::zero(ctx.n);
        for a in 0..nq {
            let (t, h) = quiver.arrows[a];
            if h == i {
                let p = theta_quiver_path(
                    ctx,
                    irr,
                    iw,
                    quiver,
                    idem,
                    &[PathStep::Edge(a + nq), PathStep::Edge(a)],
                    i,
                )
                .unwrap();
                acc = acc.add(&p);
            }
            if t == i {
                let p = theta_quiver_path(
                    ctx,
                    irr,
                    iw,
                    quiver,
                    idem,
                    &[PathStep::Edge(a), PathStep::Edge(a + nq)],
                    i,
                )
                .unwrap();
                acc = acc.sub(&p);
            }
        }
        let mut rhs_coeff = pack.lambda[i].clone();
        if i == o {
            let bb = theta_quiver_path(
                ctx,
                irr,
                iw,
                quiver,
                idem,
                &[PathStep::BStar, PathStep::B],
                o,
            )
            .unwrap();
            acc = acc.add(&bb.scale(&pack.nu));
            rhs_coeff = rhs_coeff.sub(&pack.nu);
        }
        let rhs = idem.e_vertex[i].scale(&rhs_coeff);
        let resid = acc.sub(&rhs);
        if !resid.is_zero() {
            return Err(RelationFailure {
                vertex: i,
                residual_terms: resid.term_count(),
                detail: format!("vertex relation fails at {i}"),
            });
        }
    }
    // special vertex: b* b = -n e
    let bsb = theta_quiver_path(
        ctx,
        irr,
        iw,
        quiver,
        idem,
        &[PathStep::B, PathStep::BStar],
        quiver.s(),
    )
    .unwrap();
    let rhs = idem.e.scale(&Cyclo::from_i64(ctx.group.ambient, -(ctx.n as i64)));
    if !bsb.sub(&rhs).is_zero() {
        return Err(RelationFailure {
            vertex: quiver.s(),
            residual_terms: bsb.sub(&rhs).term_count(),
            detail: "special vertex relation fails".into(),
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// elementary (anti)isomorphisms

/// Anti-isomorphism into the algebra with c replaced by its bar involution:
/// g -> g^{-1}, u -> sqrt(-1) u, extended anti-multiplicatively. The result
/// is in normal form with respect to the target parameters.
pub fn anti_iso(ctx: &SraCtx, a: &SraElem) -> SraElem {
    let target = ctx.bar_c();
    let group = ctx.group;
    let amb = group.ambient;
    let i_unit = Cyclo::root_of_unity(amb, (amb / 4) as i64);
    let mut items = Vec::new();
    for ((m, g), c) in &a.terms {
        let ginv = g.inverse(group);
        let mut word = word_of_mono(m);
        word.reverse();
        let deg = word.len() as u64;
        // g^{-1} . (reversed word): move the group element to the right
        let mut expansions: Vec<(Vec<Letter>, Cyclo)> =
            vec![(Vec::new(), c.mul(&i_unit.pow(deg)))];
        for &letter in &word {
            let options = conjugate_letter(&target, &ginv, letter);
            let mut next = Vec::new();
            for (w, cc) in &expansions {
                for (nl, nc) in &options {
                    let mut w3 = w.clone();
                    w3.push(*nl);
                    next.push((w3, cc.mul(nc)));
                }
            }
            expansions = next;
        }
        for (w, cc) in expansions {
            items.push((w, ginv.clone(), cc));
        }
    }
    normalize(&target, items)
}

/// Isomorphism into the algebra with k replaced by -k: permutations pick up
/// their sign, local group elements and the generators are fixed.
pub fn iso_sign(a: &SraElem) -> SraElem {
    let mut out = SraElem::zero(a.n);
    for ((m, g), c) in &a.terms {
        let s = g.sign();
        let cc = if s == 1 { c.clone() } else { c.neg() };
        out.push(m.clone(), g.clone(), cc);
    }
    out
}

/// Random element of bounded degree with a bounded number of terms.
pub fn random_elem(
    ctx: &SraCtx,
    rng: &mut impl rand::Rng,
    max_degree: usize,
    n_terms: usize,
) -> SraElem {
    let n = ctx.n;
    let group = ctx.group;
    let mut e = SraElem::zero(n);
    for _ in 0..n_terms {
        let deg = rng.gen_range(0..=max_degree);
        let mut m = vec![0u8; 2 * n];
        for _ in 0..deg {
            let i = rng.gen_range(0..2 * n);
            m[i] += 1;
        }
        let mut perm: Vec<u8> = (0..n as u8).collect();
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            perm.swap(i, j);
        }
        let gs: Vec<u16> = (0..n)
            .map(|_| rng.gen_range(0..group.order() as u16))
            .collect();
        let coeff = group.rat(crate::exact::Rat::new(
            rng.gen_range(-9i64..=9).into(),
            rng.gen_range(1i64..=9).into(),
        ));
        e.push(m, Wreath { perm, gs }, coeff);
    }
    e
}

/// The right-hand side of the defining commutator of x_(l) and y_(l), as a
/// normal-form element.
pub fn relation_rhs_same_slot(ctx: &SraCtx, l: usize) -> SraElem {
    let mut e = SraElem::zero(ctx.n);
    for (w, c) in commutator_terms(ctx, l, 0, l, 1) {
        e.push(vec![0u8; 2 * ctx.n], w, c);
    }
    e
}

/// The right-hand side of the cross-slot commutator [u_(l), v_(m)].
pub fn relation_rhs_cross(ctx: &SraCtx, l: usize, uxy: u8, m: usize, vxy: u8) -> SraElem {
    let mut e = SraElem::zero(ctx.n);
    for (w, c) in commutator_terms(ctx, l, uxy, m, vxy) {
        e.push(vec![0u8; 2 * ctx.n], w, c);
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::{build_group, irreps, random_central};
    use crate::mckay::{mckay_quiver, param_pack};
    use crate::slice::build_intertwiners;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx_for<'a>(
        group: &'a Group,
        n: usize,
        rng: &mut ChaCha8Rng,
    ) -> SraCtx<'a> {
        let k = group.rat(crate::exact::Rat::new(
            rng.gen_range(-5i64..=5).into(),
            rng.gen_range(1i64..=5).into(),
        ));
        let c = random_central(group, rng);
        SraCtx::new(group, n, k, c)
    }

    #[test]
    fn wreath_convention() {
        // g v_(l) g^{-1} = (gs[sigma(l)] v)_(sigma(l)) as an identity of the
        // action on points
        let g = build_group("cyclic:4").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 3;
        for _ in 0..20 {
            let mut perm: Vec<u8> = (0..n as u8).collect();
            for i in (1..n).rev() {
                let j = rng.gen_range(0..=i);
                perm.swap(i, j);
            }
            let gs: Vec<u16> = (0..n).map(|_| rng.gen_range(0..4u16)).collect();
            let w = Wreath { perm, gs };
            let v = Wreath {
                perm: {
                    let mut p: Vec<u8> = (0..n as u8).collect();
                    let i = rng.gen_range(0..n);
                    let j = rng.gen_range(0..n);
                    p.swap(i, j);
                    p
                },
                gs: (0..n).map(|_| rng.gen_range(0..4u16)).collect(),
            };
            // associativity of the action
            let us: Vec<(Cyclo, Cyclo)> = (0..n)
                .map(|_| (g.int(rng.gen_range(-5..=5)), g.int(rng.gen_range(-5..=5))))
                .collect();
            let lhs = w.mul(&v, &g).act_point(&g, &us);
            let rhs = w.act_point(&g, &v.act_point(&g, &us));
            assert_eq!(lhs, rhs);
            // inverse
            assert!(w.mul(&w.inverse(&g), &g).is_identity());
        }
    }

    #[test]
    fn defining_relation_same_slot() {
        // normalizing y x returns x y - (relation rhs), n = 1
        let g = build_group("cyclic:2").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ctx = ctx_for(&g, 1, &mut rng);
        let x = SraElem::generator(1, &g, 0, 0, g.one());
        let y = SraElem::generator(1, &g, 0, 1, g.one());
        let yx = sra_mul(&ctx, &y, &x);
        let xy = sra_mul(&ctx, &x, &y);
        let comm = xy.sub(&yx);
        let rhs = relation_rhs_same_slot(&ctx, 0);
        assert!(comm.sub(&rhs).is_zero());
        // y x = x y - t - c_zeta zeta
        let mut expect = xy.clone();
        expect = expect.sub(&rhs);
        assert!(yx.sub(&expect).is_zero());
    }

    #[test]
    fn cross_slot_commutator_cyclic2() {
        // [x_(1), x_(2)] = 0 for cyclic:2 since omega(g x, x) = 0 for g = +-1
        let g = build_group("cyclic:2").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ctx = ctx_for(&g, 2, &mut rng);
        let x1 = SraElem::generator(2, &g, 0, 0, g.one());
        let x2 = SraElem::generator(2, &g, 1, 0, g.one());
        let c = sra_mul(&ctx, &x1, &x2).sub(&sra_mul(&ctx, &x2, &x1));
        assert!(c.is_zero());
        // but [x_(1), y_(2)] is not zero for k != 0
        if !ctx.k.is_zero() {
            let y2 = SraElem::generator(2, &g, 1, 1, g.one());
            let c2 = sra_mul(&ctx, &x1, &y2).sub(&sra_mul(&ctx, &y2, &x1));
            assert!(!c2.is_zero());
            assert!(c2.sub(&relation_rhs_cross(&ctx, 0, 0, 1, 1)).is_zero());
        }
    }

    #[test]
    fn associativity_smoke() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for desc in ["cyclic:2", "cyclic:4", "binary-dihedral:2"] {
            let g = build_group(desc).unwrap();
            for n in 1..=2usize {
                let ctx = ctx_for(&g, n, &mut rng);
                for _ in 0..3 {
                    let a = random_elem(&ctx, &mut rng, 2, 2);
                    let b = random_elem(&ctx, &mut rng, 2, 2);
                    let c = random_elem(&ctx, &mut rng, 2, 2);
                    let lhs = sra_mul(&ctx, &sra_mul(&ctx, &a, &b), &c);
                    let rhs = sra_mul(&ctx, &a, &sra_mul(&ctx, &b, &c));
                    assert!(lhs.sub(&rhs).is_zero(), "{desc} n={n}");
                }
            }
        }
    }

    #[test]
    fn filtration_never_increases() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let g = build_group("cyclic:4").unwrap();
        let ctx = ctx_for(&g, 2, &mut rng);
        for _ in 0..10 {
            let a = random_elem(&ctx, &mut rng, 3, 2);
            let b = random_elem(&ctx, &mut rng, 3, 2);
            let p = sra_mul(&ctx, &a, &b);
            assert!(p.max_degree() <= a.max_degree() + b.max_degree());
        }
    }

    #[test]
    fn idempotents_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for desc in ["cyclic:2", "cyclic:4", "binary-dihedral:2"] {
            let g = build_group(desc).unwrap();
            let irr = irreps(&g).unwrap();
            for n in 1..=2usize {
                let ctx = ctx_for(&g, n, &mut rng);
                let idem = idempotents(&ctx, &irr);
                assert!(sra_mul(&ctx, &idem.e, &idem.e).sub(&idem.e).is_zero());
                assert!(sra_mul(&ctx, &idem.e_minus, &idem.e_minus)
                    .sub(&idem.e_minus)
                    .is_zero());
                for v in &idem.e_vertex {
                    assert!(sra_mul(&ctx, v, v).sub(v).is_zero());
                }
            }
        }
    }

    #[test]
    fn spherical_corner_closed() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = build_group("cyclic:2").unwrap();
        let irr = irreps(&g).unwrap();
        let ctx = ctx_for(&g, 2, &mut rng);
        let idem = idempotents(&ctx, &irr);
        let a = random_elem(&ctx, &mut rng, 2, 3);
        let ea = sra_product(&ctx, &[&idem.e, &a, &idem.e]);
        // e (e a e) e = e a e
        let back = sra_product(&ctx, &[&idem.e, &ea, &idem.e]);
        assert!(back.sub(&ea).is_zero());
    }

    #[test]
    fn bstar_b_is_minus_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for desc in ["cyclic:2", "cyclic:4"] {
            let g = build_group(desc).unwrap();
            let irr = irreps(&g).unwrap();
            let q = mckay_quiver(&g, &irr).unwrap();
            let iw = build_intertwiners(&g, &irr, &q).unwrap();
            for n in 1..=3usize {
                let ctx = ctx_for(&g, n, &mut rng);
                let k = ctx.k.clone();
                let c = ctx.c.clone();
                let pack = param_pack(&g, &irr, &q, n, &k, &c).unwrap();
                let idem = idempotents(&ctx, &irr);
                let bsb = theta_quiver_path(
                    &ctx,
                    &irr,
                    &iw,
                    &pack.quiver,
                    &idem,
                    &[PathStep::B, PathStep::BStar],
                    pack.quiver.s(),
                )
                .unwrap();
                let rhs = idem.e.scale(&g.int(-(n as i64)));
                assert!(bsb.sub(&rhs).is_zero(), "{desc} n={n}");
            }
        }
    }

    #[test]
    fn pimodule_relations() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for desc in ["cyclic:2", "cyclic:4", "binary-dihedral:2"] {
            let g = build_group(desc).unwrap();
            let irr = irreps(&g).unwrap();
            let q = mckay_quiver(&g, &irr).unwrap();
            let iw = build_intertwiners(&g, &irr, &q).unwrap();
            for n in 1..=2usize {
                let ctx = ctx_for(&g, n, &mut rng);
                let pack = param_pack(&g, &irr, &q, n, &ctx.k, &ctx.c).unwrap();
                let idem = idempotents(&ctx, &irr);
                check_pimodule_relations(&ctx, &irr, &iw, &pack, &idem)
                    .unwrap_or_else(|e| panic!("{desc} n={n}: {e:?}"));
            }
        }
    }

    #[test]
    fn anti_iso_antimultiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for desc in ["cyclic:2", "binary-dihedral:2"] {
            let g = build_group(desc).unwrap();
            let ctx = ctx_for(&g, 2, &mut rng);
            let target = ctx.bar_c();
            for _ in 0..5 {
                let a = random_elem(&ctx, &mut rng, 2, 2);
                let b = random_elem(&ctx, &mut rng, 2, 2);
                let lhs = anti_iso(&ctx, &sra_mul(&ctx, &a, &b));
                let rhs = sra_mul(&target, &anti_iso(&ctx, &b), &anti_iso(&ctx, &a));
                assert!(lhs.sub(&rhs).is_zero(), "{desc}");
            }
        }
    }

    #[test]
    fn iso_sign_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let g = build_group("cyclic:2").unwrap();
        let irr = irreps(&g).unwrap();
        let ctx = ctx_for(&g, 3, &mut rng);
        let flipped = ctx.flip_k();
        // multiplicative
        for _ in 0..5 {
            let a = random_elem(&ctx, &mut rng, 2, 2);
            let b = random_elem(&ctx, &mut rng, 2, 2);
            let lhs = iso_sign(&sra_mul(&ctx, &a, &b));
            let rhs = sra_mul(&flipped, &iso_sign(&a), &iso_sign(&b));
            assert!(lhs.sub(&rhs).is_zero());
        }
        // sends e to e_minus
        let idem = idempotents(&ctx, &irr);
        assert!(iso_sign(&idem.e).sub(&idem.e_minus).is_zero());
        // image of the same-slot commutator is the relation of the flipped
        // algebra
        let img = iso_sign(&relation_rhs_same_slot(&ctx, 0));
        let expect = relation_rhs_same_slot(&flipped, 0);
        assert!(img.sub(&expect).is_zero());
    }
}
