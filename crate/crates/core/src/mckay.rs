//! The McKay quiver of a finite subgroup of SL2, its Calogero-Moser
//! extension, the full parameter pack attached to (n, k, c), and the Weyl
//! group action on parameter vectors.

use crate::exact::{rat_i64, Cyclo, Rat};
use crate::gamma::{CentralElement, Group, IrrepTable};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuiverError {
    #[error("quiver construction failed: {0}")]
    Construction(String),
    #[error("parameter consistency failed: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Color {
    Source,
    Sink,
}

/// An oriented quiver on the irrep vertex set, optionally extended by a
/// special vertex `s` with one arrow b: s -> o.
#[derive(Debug, Clone)]
pub struct QuiverSpec {
    /// Number of vertices coming from irreps (the set I).
    pub n_irr: usize,
    /// Arrows (tail, head) of Q, excluding b.
    pub arrows: Vec<(usize, usize)>,
    /// Extending vertex (trivial representation).
    pub extending: usize,
    /// Index of the special vertex if present (always n_irr).
    pub special: Option<usize>,
    /// Two-coloring of I; the extending vertex is a sink and every edge runs
    /// from a source-colored vertex to a sink-colored vertex.
    pub colors: Vec<Color>,
}

impl QuiverSpec {
    pub fn n_vertices(&self) -> usize {
        self.n_irr + usize::from(self.special.is_some())
    }

    /// Index of the special vertex (panics if not a CM quiver).
    pub fn s(&self) -> usize {
        self.special.expect("not a Calogero-Moser quiver")
    }

    /// All arrows including b: s -> o when the special vertex is present.
    pub fn arrows_cm(&self) -> Vec<(usize, usize)> {
        let mut all = self.arrows.clone();
        if let Some(s) = self.special {
            all.push((s, self.extending));
        }
        all
    }

    /// Adjacency matrix (with multiplicity) of the underlying graph on I.
    pub fn adjacency(&self) -> Vec<Vec<i64>> {
        let mut a = vec![vec![0i64; self.n_irr]; self.n_irr];
        for &(t, h) in &self.arrows {
            a[t][h] += 1;
            a[h][t] += 1;
        }
        a
    }

    /// Generalized Cartan matrix 2*Id - adjacency on I.
    pub fn cartan(&self) -> Vec<Vec<i64>> {
        let mut c = self.adjacency();
        for i in 0..self.n_irr {
            for j in 0..self.n_irr {
                c[i][j] = -c[i][j];
            }
            c[i][i] += 2;
        }
        c
    }

    /// Cartan matrix of the full CM vertex set (b contributes one edge o-s).
    pub fn cartan_cm(&self) -> Vec<Vec<i64>> {
        let n = self.n_vertices();
        let mut c = vec![vec![0i64; n]; n];
        let base = self.cartan();
        for i in 0..self.n_irr {
            for j in 0..self.n_irr {
                c[i][j] = base[i][j];
            }
        }
        if let Some(s) = self.special {
            c[s][s] = 2;
            c[s][self.extending] = -1;
            c[self.extending][s] = -1;
        }
        c
    }
}

/// Build the McKay quiver from character inner products, with the bipartite
/// orientation making the extending vertex a sink.
pub fn mckay_quiver(group: &Group, irr: &IrrepTable) -> Result<QuiverSpec, QuiverError> {
    let n = irr.len();
    let amb = group.ambient;
    let g_order = group.order() as i64;
    // multiplicity of N_i inside L tensor N_j
    let mut mult = vec![vec![0usize; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = Cyclo::zero(amb);
            for g in 0..group.order() {
                let chi_l = group.elems[g].trace();
                let term = chi_l
                    .mul(&irr.chars[j][g])
                    .mul(&irr.chars[i][group.invert(g as u16) as usize]);
                s = s.add(&term);
            }
            let r = s
                .as_rat()
                .ok_or_else(|| QuiverError::Construction("non-integer multiplicity".into()))?;
            let scaled = &r / rat_i64(g_order);
            if !scaled.is_integer() {
                return Err(QuiverError::Construction("non-integer multiplicity".into()));
            }
            let m: i64 = scaled
                .to_integer()
                .try_into()
                .map_err(|_| QuiverError::Construction("multiplicity overflow".into()))?;
            if m < 0 {
                return Err(QuiverError::Construction("negative multiplicity".into()));
            }
            mult[i][j] = m as usize;
        }
    }
    for i in 0..n {
        if mult[i][i] != 0 {
            return Err(QuiverError::Construction("graph has a loop".into()));
        }
        for j in 0..n {
            if mult[i][j] != mult[j][i] {
                return Err(QuiverError::Construction(
                    "multiplicities not symmetric".into(),
                ));
            }
        }
    }
    // two-color by BFS from the extending vertex (colored sink)
    let o = irr.trivial;
    let mut colors = vec![None; n];
    colors[o] = Some(Color::Sink);
    let mut queue = std::collections::VecDeque::from([o]);
    while let Some(v) = queue.pop_front() {
        for w in 0..n {
            if mult[v][w] == 0 {
                continue;
            }
            let want = match colors[v].unwrap() {
                Color::Sink => Color::Source,
                Color::Source => Color::Sink,
            };
            match colors[w] {
                None => {
                    colors[w] = Some(want);
                    queue.push_back(w);
                }
                Some(c) if c != want => {
                    return Err(QuiverError::Construction(
                        "no bipartite orientation of the McKay graph".into(),
                    ))
                }
                _ => {}
            }
        }
    }
    if colors.iter().any(|c| c.is_none()) {
        return Err(QuiverError::Construction("McKay graph not connected".into()));
    }
    let colors: Vec<Color> = colors.into_iter().map(|c| c.unwrap()).collect();
    // orient every edge source -> sink
    let mut arrows = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for _ in 0..mult[i][j] {
                match (colors[i], colors[j]) {
                    (Color::Source, Color::Sink) => arrows.push((i, j)),
                    (Color::Sink, Color::Source) => arrows.push((j, i)),
                    _ => {
                        return Err(QuiverError::Construction(
                            "equal colors joined by an edge".into(),
                        ))
                    }
                }
            }
        }
    }
    let spec = QuiverSpec {
        n_irr: n,
        arrows,
        extending: o,
        special: None,
        colors,
    };
    // extended Dynkin check: the dimension vector spans the Cartan kernel
    let cartan = spec.cartan();
    for i in 0..n {
        let mut s = 0i64;
        for j in 0..n {
            s += cartan[i][j] * irr.dims[j] as i64;
        }
        if s != 0 {
            return Err(QuiverError::Construction(
                "not extended Dynkin: dimension vector is not in the Cartan kernel".into(),
            ));
        }
    }
    Ok(spec)
}

pub fn with_special(spec: &QuiverSpec) -> QuiverSpec {
    let mut cm = spec.clone();
    cm.special = Some(spec.n_irr);
    cm
}

/// Full parameter pack for a choice of rank n, coupling k and central c.
pub struct ParamPack {
    pub n: usize,
    pub t: Cyclo,
    pub k: Cyclo,
    pub nu: Cyclo,
    pub c: CentralElement,
    pub delta: Vec<i64>,
    /// alpha over the CM vertex set: alpha_i = n*delta_i, alpha_s = 1.
    pub alpha: Vec<i64>,
    pub partial: Vec<i64>,
    /// chi over the CM vertex set (last entry chi_s).
    pub chi: Vec<Cyclo>,
    pub chi_prime: Vec<Cyclo>,
    pub lambda: Vec<Cyclo>,
    pub mu: Cyclo,
    pub psi: Cyclo,
    pub quiver: QuiverSpec,
}

/// Assemble the pack; t is always 1/|G|.
pub fn param_pack(
    group: &Group,
    irr: &IrrepTable,
    quiver: &QuiverSpec,
    n: usize,
    k: &Cyclo,
    c: &CentralElement,
) -> Result<ParamPack, QuiverError> {
    c.validate(group)
        .map_err(|e| QuiverError::Inconsistent(e.to_string()))?;
    let amb = group.ambient;
    let g_order = group.order() as i64;
    let t = Cyclo::from_rat(amb, rat_i64(1) / rat_i64(g_order));
    let ni = irr.len();
    let delta: Vec<i64> = irr.dims.iter().map(|&d| d as i64).collect();
    let cm = if quiver.special.is_some() {
        quiver.clone()
    } else {
        with_special(quiver)
    };
    let s = cm.s();
    let o = cm.extending;
    let mut alpha = vec![0i64; ni + 1];
    for i in 0..ni {
        alpha[i] = n as i64 * delta[i];
    }
    alpha[s] = 1;
    // partial_i = n(-delta_i + sum over arrows with tail i of delta_head),
    // cross-checked against -n * Tr(zeta on N_i)
    let mut partial = vec![0i64; ni];
    for i in 0..ni {
        let mut acc = -delta[i];
        for &(tl, hd) in &cm.arrows_cm() {
            if tl == i {
                acc += delta[hd];
            }
        }
        partial[i] = n as i64 * acc;
    }
    for i in 0..ni {
        let tr = irr.chars[i][group.zeta as usize]
            .as_rat()
            .ok_or_else(|| QuiverError::Inconsistent("non-rational trace of zeta".into()))?;
        let expect = rat_i64(-(n as i64)) * tr;
        if rat_i64(partial[i]) != expect {
            return Err(QuiverError::Inconsistent(format!(
                "orientation count and zeta trace disagree at vertex {i}"
            )));
        }
    }
    // lambda_i = Tr(t + c; N_i)
    let lambda: Vec<Cyclo> = (0..ni)
        .map(|i| {
            t.mul(&Cyclo::from_i64(amb, delta[i]))
                .add(&c.trace_in(irr, i))
        })
        .collect();
    {
        let mut dot = Cyclo::zero(amb);
        for i in 0..ni {
            dot = dot.add(&lambda[i].mul(&Cyclo::from_i64(amb, delta[i])));
        }
        if !dot.is_one() {
            return Err(QuiverError::Inconsistent("delta . lambda != 1".into()));
        }
    }
    let half = Cyclo::from_rat(amb, rat_i64(1) / rat_i64(2));
    let nu = k.mul(&Cyclo::from_i64(amb, g_order)).mul(&half);
    let mut chi = vec![Cyclo::zero(amb); ni + 1];
    for i in 0..ni {
        chi[i] = lambda[i].sub(&Cyclo::from_i64(amb, partial[i]));
        if i == o {
            chi[i] = chi[i].sub(&nu);
        }
    }
    chi[s] = Cyclo::from_i64(amb, n as i64)
        .mul(&nu.sub(&Cyclo::one(amb)))
        .add(&Cyclo::one(amb));
    let mut chi_prime = chi.clone();
    chi_prime[s] = chi[s].sub(&Cyclo::one(amb));
    // mu = -(c_zeta |G| / 2 + 1); psi = sum over sources of delta_i chi_i
    let c_zeta = c.coeff(group.zeta);
    let mu = c_zeta
        .mul(&Cyclo::from_i64(amb, g_order))
        .mul(&half)
        .add(&Cyclo::one(amb))
        .neg();
    let mut psi = Cyclo::zero(amb);
    for i in 0..ni {
        if cm.colors[i] == Color::Source {
            psi = psi.add(&chi[i].mul(&Cyclo::from_i64(amb, delta[i])));
        }
    }
    Ok(ParamPack {
        n,
        t,
        k: k.clone(),
        nu,
        c: c.clone(),
        delta,
        alpha,
        partial,
        chi,
        chi_prime,
        lambda,
        mu,
        psi,
        quiver: cm,
    })
}

/// One failing identity, with both sides rendered.
#[derive(Debug, Clone)]
pub struct IdentityFailure {
    pub what: String,
    pub lhs: String,
    pub rhs: String,
}

impl std::fmt::Display for IdentityFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: lhs = {}, rhs = {}", self.what, self.lhs, self.rhs)
    }
}

/// Check the parameter identities tying (k, c) to chi:
///   c_zeta + n = (1 - 2 psi)/|G|
///   k = 2(1 - sum_j delta_j chi_j)/|G|
///   c_g = (1 - sum_j chi_j (delta_j - Tr(g on N_j^*)))/|G|  for g != 1, zeta
///   2(mu - psi) = n|G| - 2
pub fn check_lemma_params(
    group: &Group,
    irr: &IrrepTable,
    pack: &ParamPack,
) -> Result<(), IdentityFailure> {
    let amb = group.ambient;
    let g_order = group.order() as i64;
    let inv_g = Cyclo::from_rat(amb, rat_i64(1) / rat_i64(g_order));
    let ni = irr.len();
    {
        let lhs = pack
            .c
            .coeff(group.zeta)
            .add(&Cyclo::from_i64(amb, pack.n as i64));
        let rhs = Cyclo::one(amb).sub(&pack.psi.add(&pack.psi)).mul(&inv_g);
        if lhs != rhs {
            return Err(IdentityFailure {
                what: "c_zeta + n = (1 - 2 psi)/|G|".into(),
                lhs: format!("{lhs}"),
                rhs: format!("{rhs}"),
            });
        }
    }
    {
        let mut dot = Cyclo::zero(amb);
        for j in 0..ni {
            dot = dot.add(&pack.chi[j].mul(&Cyclo::from_i64(amb, pack.delta[j])));
        }
        let rhs = Cyclo::from_i64(amb, 2)
            .mul(&Cyclo::one(amb).sub(&dot))
            .mul(&inv_g);
        if pack.k != rhs {
            return Err(IdentityFailure {
                what: "k = 2(1 - sum delta_j chi_j)/|G|".into(),
                lhs: format!("{}", pack.k),
                rhs: format!("{rhs}"),
            });
        }
    }
    for g in 1..group.order() as u16 {
        if g == group.zeta {
            continue;
        }
        let mut acc = Cyclo::zero(amb);
        for j in 0..ni {
            let tr_dual = irr.dual_char(group, j, g);
            acc = acc.add(&pack.chi[j].mul(&Cyclo::from_i64(amb, pack.delta[j]).sub(&tr_dual)));
        }
        let rhs = Cyclo::one(amb).sub(&acc).mul(&inv_g);
        if pack.c.coeff(g) != &rhs {
            return Err(IdentityFailure {
                what: format!("c_g formula at group element {g}"),
                lhs: format!("{}", pack.c.coeff(g)),
                rhs: format!("{rhs}"),
            });
        }
    }
    {
        // exact form of the weight identity: (mu + 1/2) - psi = (n|G| - 2)/2,
        // the scalar by which the two section twists differ per slot
        let lhs = pack
            .mu
            .add(&Cyclo::from_rat(amb, rat_i64(1) / rat_i64(2)))
            .sub(&pack.psi);
        let rhs = Cyclo::from_rat(amb, rat_i64(pack.n as i64 * g_order - 2) / rat_i64(2));
        if lhs != rhs {
            return Err(IdentityFailure {
                what: "(mu + 1/2) - psi = (n|G| - 2)/2".into(),
                lhs: format!("{lhs}"),
                rhs: format!("{rhs}"),
            });
        }
    }
    Ok(())
}

/// Simple reflection r_i acting on a vector over the given Cartan matrix:
/// r_i(v) = v - sum_j C_{ij} v_i e_j.
pub fn weyl_reflect(cartan: &[Vec<i64>], v: &[Cyclo], i: usize) -> Vec<Cyclo> {
    let mut out = v.to_vec();
    let amb = v[0].order();
    for j in 0..v.len() {
        let c = cartan[i][j];
        if c != 0 {
            out[j] = out[j].sub(&Cyclo::from_i64(amb, c).mul(&v[i]));
        }
    }
    out
}

/// Reduced word for the longest element of the finite Weyl group obtained by
/// deleting the extending vertex: greedy descent on a strictly dominant
/// vector in fundamental-weight coordinates.
pub fn longest_word(quiver: &QuiverSpec) -> Vec<usize> {
    let cartan = quiver.cartan();
    let o = quiver.extending;
    let fin: Vec<usize> = (0..quiver.n_irr).filter(|&i| i != o).collect();
    let pos = |i: usize| fin.iter().position(|&x| x == i).unwrap();
    let mut v: Vec<Rat> = vec![rat_i64(1); fin.len()];
    let mut word = Vec::new();
    loop {
        let Some(&i) = fin.iter().find(|&&i| v[pos(i)] > rat_i64(0)) else {
            break;
        };
        let vi = v[pos(i)].clone();
        for &j in &fin {
            let c = cartan[i][j];
            if c != 0 {
                v[pos(j)] = &v[pos(j)] - &(rat_i64(c) * vi.clone());
            }
        }
        word.push(i);
        if word.len() > 10_000 {
            panic!("longest-element search did not terminate");
        }
    }
    word
}

/// Check w0(lambda) = -lambda-bar + 2 e_o for a vector over I with
/// delta . lambda = 1; lambda-bar permutes entries by the dual involution.
pub fn longest_check(
    quiver: &QuiverSpec,
    irr: &IrrepTable,
    lambda: &[Cyclo],
) -> Result<(), IdentityFailure> {
    let amb = lambda[0].order();
    let mut dot = Cyclo::zero(amb);
    for i in 0..quiver.n_irr {
        dot = dot.add(&lambda[i].mul(&Cyclo::from_i64(amb, irr.dims[i] as i64)));
    }
    if !dot.is_one() {
        return Err(IdentityFailure {
            what: "longest_check requires delta . lambda = 1".into(),
            lhs: format!("{dot}"),
            rhs: "1".into(),
        });
    }
    let cartan = quiver.cartan();
    let word = longest_word(quiver);
    let mut v = lambda.to_vec();
    for &i in &word {
        v = weyl_reflect(&cartan, &v, i);
    }
    for i in 0..quiver.n_irr {
        let mut expect = lambda[irr.dual[i]].neg();
        if i == quiver.extending {
            expect = expect.add(&Cyclo::from_i64(amb, 2));
        }
        if v[i] != expect {
            return Err(IdentityFailure {
                what: format!("w0(lambda) = -lambda-bar + 2 e_o at vertex {i}"),
                lhs: format!("{}", v[i]),
                rhs: format!("{expect}"),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::{build_group, irreps, random_central};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(desc: &str) -> (Group, IrrepTable, QuiverSpec) {
        let g = build_group(desc).unwrap();
        let irr = irreps(&g).unwrap();
        let q = mckay_quiver(&g, &irr).unwrap();
        (g, irr, q)
    }

    #[test]
    fn a1_tilde_two_arrows_into_o() {
        let (_, irr, q) = setup("cyclic:2");
        assert_eq!(q.arrows.len(), 2);
        for &(t, h) in &q.arrows {
            assert_eq!(h, irr.trivial);
            assert_ne!(t, irr.trivial);
        }
    }

    #[test]
    fn a3_tilde_cycle() {
        let (_, _, q) = setup("cyclic:4");
        assert_eq!(q.n_irr, 4);
        assert_eq!(q.arrows.len(), 4);
        let adj = q.adjacency();
        for i in 0..4 {
            let deg: i64 = adj[i].iter().sum();
            assert_eq!(deg, 2);
        }
    }

    #[test]
    fn d4_tilde_star() {
        let (_, irr, q) = setup("binary-dihedral:2");
        assert_eq!(q.n_irr, 5);
        assert_eq!(q.arrows.len(), 4);
        let center = irr.dims.iter().position(|&d| d == 2).unwrap();
        let adj = q.adjacency();
        let deg: i64 = adj[center].iter().sum();
        assert_eq!(deg, 4);
    }

    #[test]
    fn partial_for_a1() {
        // cyclic:2, n=1: partial_o = -1, partial_i = 1
        let (g, irr, q) = setup("cyclic:2");
        let k = g.rat(rat_i64(1) / rat_i64(3));
        let c = CentralElement::zero(&g);
        let p = param_pack(&g, &irr, &q, 1, &k, &c).unwrap();
        assert_eq!(p.partial[irr.trivial], -1);
        assert_eq!(p.partial[1 - irr.trivial], 1);
    }

    #[test]
    fn chi_s_at_zero_coupling() {
        // k = 0, c = 0: chi_s = 1 - n
        for desc in ["cyclic:2", "cyclic:4", "binary-dihedral:2"] {
            let (g, irr, q) = setup(desc);
            for n in 1..=3usize {
                let p =
                    param_pack(&g, &irr, &q, n, &g.zero(), &CentralElement::zero(&g)).unwrap();
                assert_eq!(p.chi[p.quiver.s()], g.int(1 - n as i64));
            }
        }
    }

    #[test]
    fn lemma_params_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for desc in [
            "cyclic:2",
            "cyclic:4",
            "cyclic:6",
            "binary-dihedral:2",
            "binary-dihedral:3",
        ] {
            let (g, irr, q) = setup(desc);
            for _ in 0..5 {
                let n = rng.gen_range(1..=4usize);
                let k = g.rat(Rat::new(
                    rng.gen_range(-9i64..=9).into(),
                    rng.gen_range(1i64..=9).into(),
                ));
                let c = random_central(&g, &mut rng);
                let p = param_pack(&g, &irr, &q, n, &k, &c).unwrap();
                check_lemma_params(&g, &irr, &p).unwrap();
            }
        }
    }

    #[test]
    fn reflection_involution_and_a1_formula() {
        let (g, _, q) = setup("cyclic:2");
        let cartan = q.cartan();
        let o = q.extending;
        let i = 1 - o;
        assert_eq!(cartan[i][o], -2);
        let v = vec![g.int(5), g.int(3)];
        let (vo, vi) = (v[o].clone(), v[i].clone());
        let r = weyl_reflect(&cartan, &v, i);
        // r_i(lambda) = (lambda_o + 2 lambda_i, -lambda_i) in (o, i) coords
        assert_eq!(r[o], vo.add(&vi).add(&vi));
        assert_eq!(r[i], vi.neg());
        let rr = weyl_reflect(&cartan, &r, i);
        assert_eq!(rr, v);
    }

    #[test]
    fn longest_element_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for desc in [
            "cyclic:2",
            "cyclic:4",
            "cyclic:6",
            "binary-dihedral:2",
            "binary-dihedral:3",
        ] {
            let (g, irr, q) = setup(desc);
            for _ in 0..5 {
                let mut lambda: Vec<Cyclo> = (0..q.n_irr)
                    .map(|_| {
                        g.rat(Rat::new(
                            rng.gen_range(-9i64..=9).into(),
                            rng.gen_range(1i64..=9).into(),
                        ))
                    })
                    .collect();
                let mut dot = g.zero();
                for i in 0..q.n_irr {
                    dot = dot.add(&lambda[i].mul(&g.int(irr.dims[i] as i64)));
                }
                let o = q.extending;
                lambda[o] = lambda[o].add(&g.one().sub(&dot));
                longest_check(&q, &irr, &lambda).unwrap();
            }
        }
    }
}
