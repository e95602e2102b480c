//! Finite subgroups of Sp(L) = SL2 containing -Id, their irreducible
//! representations and characters, and central class-function elements.

use crate::exact::{rat_i64, Cyclo, Mat, Rat};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("unknown group descriptor `{0}`; expected cyclic:<even n>=2>, binary-dihedral:<n>=1>, binary-tetrahedral, binary-octahedral or binary-icosahedral")]
    BadDescriptor(String),
    #[error("cyclic groups of odd order are rejected: the construction needs the central element of order 2, which only even cyclic groups contain")]
    OddCyclic,
    #[error("group family `{0}` is recognized but not built in this configuration")]
    Unsupported(String),
    #[error("group validation failed: {0}")]
    Validation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    Cyclic(u32),         // full order 2m
    BinaryDihedral(u32), // parameter m, order 4m
}

/// A finite subgroup of SL2 with multiplication table, inverse table,
/// conjugacy classes and the central element of order 2.
pub struct Group {
    pub kind: GroupKind,
    pub name: String,
    /// Ambient cyclotomic order: all matrix entries and all character values
    /// of this group live in Q(zeta_ambient). Always a multiple of 4 so the
    /// square root of -1 is available.
    pub ambient: u32,
    pub elems: Vec<Mat>,
    pub mul: Vec<Vec<u16>>,
    pub inv: Vec<u16>,
    /// Index of -Id (the identity is always index 0).
    pub zeta: u16,
    /// Indices of a generating set.
    pub generators: Vec<u16>,
    pub classes: Vec<Vec<u16>>,
    pub class_of: Vec<u16>,
    /// Order of each element.
    pub elem_order: Vec<u32>,
}

impl Group {
    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn one(&self) -> Cyclo {
        Cyclo::one(self.ambient)
    }

    pub fn zero(&self) -> Cyclo {
        Cyclo::zero(self.ambient)
    }

    pub fn rat(&self, r: Rat) -> Cyclo {
        Cyclo::from_rat(self.ambient, r)
    }

    pub fn int(&self, n: i64) -> Cyclo {
        Cyclo::from_i64(self.ambient, n)
    }

    /// The symplectic form with omega(x, y) = 1 in the fixed basis {x, y}.
    pub fn omega(&self, u: &(Cyclo, Cyclo), v: &(Cyclo, Cyclo)) -> Cyclo {
        u.0.mul(&v.1).sub(&u.1.mul(&v.0))
    }

    /// Apply group element g to a vector of L (column convention).
    pub fn act(&self, g: u16, v: &(Cyclo, Cyclo)) -> (Cyclo, Cyclo) {
        let m = &self.elems[g as usize];
        (
            m[(0, 0)].mul(&v.0).add(&m[(0, 1)].mul(&v.1)),
            m[(1, 0)].mul(&v.0).add(&m[(1, 1)].mul(&v.1)),
        )
    }

    pub fn mul2(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize][b as usize]
    }

    pub fn invert(&self, a: u16) -> u16 {
        self.inv[a as usize]
    }
}

fn find_elem(elems: &[Mat], m: &Mat) -> Option<u16> {
    elems.iter().position(|e| e == m).map(|i| i as u16)
}

fn close_group(gens: Vec<Mat>, ambient: u32) -> Result<Vec<Mat>, GroupError> {
    let id = Mat::identity(2, ambient);
    let mut elems = vec![id];
    let mut frontier = vec![0usize];
    while let Some(i) = frontier.pop() {
        for g in &gens {
            let prod = g.mul(&elems[i]);
            if find_elem(&elems, &prod).is_none() {
                elems.push(prod);
                frontier.push(elems.len() - 1);
                if elems.len() > 240 {
                    return Err(GroupError::Validation(
                        "closure exceeded 240 elements".into(),
                    ));
                }
            }
        }
    }
    Ok(elems)
}

/// Parse and build a group from its descriptor.
pub fn build_group(desc: &str) -> Result<Group, GroupError> {
    let (family, param) = match desc.split_once(':') {
        Some((f, p)) => (f, Some(p)),
        None => (desc, None),
    };
    match family {
        "cyclic" => {
            let n: u32 = param
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| GroupError::BadDescriptor(desc.into()))?;
            if n < 2 {
                return Err(GroupError::BadDescriptor(desc.into()));
            }
            if n % 2 != 0 {
                return Err(GroupError::OddCyclic);
            }
            build_cyclic(n)
        }
        "binary-dihedral" => {
            let m: u32 = param
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| GroupError::BadDescriptor(desc.into()))?;
            if m < 1 {
                return Err(GroupError::BadDescriptor(desc.into()));
            }
            build_binary_dihedral(m)
        }
        "binary-tetrahedral" | "binary-octahedral" | "binary-icosahedral" => {
            Err(GroupError::Unsupported(family.into()))
        }
        _ => Err(GroupError::BadDescriptor(desc.into())),
    }
}

fn lcm_u32(a: u32, b: u32) -> u32 {
    let gcd = |mut x: u32, mut y: u32| {
        while y != 0 {
            let t = x % y;
            x = y;
            y = t;
        }
        x
    };
    a / gcd(a, b) * b
}

fn finish_group(
    kind: GroupKind,
    name: String,
    ambient: u32,
    elems: Vec<Mat>,
    generators: Vec<u16>,
) -> Result<Group, GroupError> {
    let n = elems.len();
    for (i, e) in elems.iter().enumerate() {
        let det = e[(0, 0)].mul(&e[(1, 1)]).sub(&e[(0, 1)].mul(&e[(1, 0)]));
        if !det.is_one() {
            return Err(GroupError::Validation(format!("element {i} has det != 1")));
        }
    }
    let mut mul = vec![vec![0u16; n]; n];
    for i in 0..n {
        for j in 0..n {
            let prod = elems[i].mul(&elems[j]);
            let k = find_elem(&elems, &prod)
                .ok_or_else(|| GroupError::Validation("not closed under multiplication".into()))?;
            mul[i][j] = k;
        }
    }
    let mut inv = vec![0u16; n];
    for i in 0..n {
        let j = (0..n)
            .find(|&j| mul[i][j] == 0)
            .ok_or_else(|| GroupError::Validation("missing inverse".into()))?;
        inv[i] = j as u16;
    }
    let minus_id = {
        let m = Mat::identity(2, ambient).neg();
        find_elem(&elems, &m).ok_or_else(|| GroupError::Validation("-Id not present".into()))?
    };
    for i in 0..n {
        if mul[i][minus_id as usize] != mul[minus_id as usize][i] {
            return Err(GroupError::Validation("-Id not central".into()));
        }
    }
    if mul[minus_id as usize][minus_id as usize] != 0 {
        return Err(GroupError::Validation("-Id does not square to 1".into()));
    }
    let mut elem_order = vec![0u32; n];
    for i in 0..n {
        let mut k = i as u16;
        let mut ord = 1;
        while k != 0 {
            k = mul[k as usize][i];
            ord += 1;
        }
        elem_order[i] = ord;
    }
    let mut class_of = vec![u16::MAX; n];
    let mut classes: Vec<Vec<u16>> = Vec::new();
    for i in 0..n {
        if class_of[i] != u16::MAX {
            continue;
        }
        let cid = classes.len() as u16;
        let mut class = Vec::new();
        for g in 0..n {
            let c = mul[mul[g][i] as usize][inv[g] as usize];
            if class_of[c as usize] == u16::MAX {
                class_of[c as usize] = cid;
                class.push(c);
            }
        }
        class.sort();
        classes.push(class);
    }
    Ok(Group {
        kind,
        name,
        ambient,
        elems,
        mul,
        inv,
        zeta: minus_id,
        generators,
        classes,
        class_of,
        elem_order,
    })
}

fn build_cyclic(n: u32) -> Result<Group, GroupError> {
    let ambient = lcm_u32(n, 4);
    let mut g = Mat::zero(2, 2, ambient);
    g[(0, 0)] = Cyclo::root_of_unity(ambient, (ambient / n) as i64);
    g[(1, 1)] = Cyclo::root_of_unity(ambient, -((ambient / n) as i64));
    let elems = close_group(vec![g.clone()], ambient)?;
    if elems.len() != n as usize {
        return Err(GroupError::Validation(format!(
            "cyclic group closure has {} elements, expected {n}",
            elems.len()
        )));
    }
    let gen_idx = find_elem(&elems, &g).unwrap();
    finish_group(
        GroupKind::Cyclic(n),
        format!("cyclic:{n}"),
        ambient,
        elems,
        vec![gen_idx],
    )
}

fn build_binary_dihedral(m: u32) -> Result<Group, GroupError> {
    let ambient = lcm_u32(2 * m, 4);
    let mut a = Mat::zero(2, 2, ambient);
    a[(0, 0)] = Cyclo::root_of_unity(ambient, (ambient / (2 * m)) as i64);
    a[(1, 1)] = Cyclo::root_of_unity(ambient, -((ambient / (2 * m)) as i64));
    let mut b = Mat::zero(2, 2, ambient);
    b[(0, 1)] = Cyclo::one(ambient);
    b[(1, 0)] = Cyclo::from_i64(ambient, -1);
    let elems = close_group(vec![a.clone(), b.clone()], ambient)?;
    if elems.len() != (4 * m) as usize {
        return Err(GroupError::Validation(format!(
            "binary dihedral closure has {} elements, expected {}",
            elems.len(),
            4 * m
        )));
    }
    let ga = find_elem(&elems, &a).unwrap();
    let gb = find_elem(&elems, &b).unwrap();
    finish_group(
        GroupKind::BinaryDihedral(m),
        format!("binary-dihedral:{m}"),
        ambient,
        elems,
        vec![ga, gb],
    )
}

/// Complete list of irreducible representations, as explicit matrices per
/// group element, validated by character orthogonality and sum of squares.
pub struct IrrepTable {
    /// irreps[i][g] is the matrix of group element g in irrep i.
    pub irreps: Vec<Vec<Mat>>,
    pub dims: Vec<usize>,
    /// chars[i][g] = trace of g in irrep i.
    pub chars: Vec<Vec<Cyclo>>,
    /// Index of the trivial representation.
    pub trivial: usize,
    /// dual[i] = index of the irrep isomorphic to the dual of irrep i.
    pub dual: Vec<usize>,
}

impl IrrepTable {
    pub fn len(&self) -> usize {
        self.irreps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.irreps.is_empty()
    }

    /// Matrix of g acting on the dual of irrep i: transpose of g^{-1}.
    pub fn dual_matrix(&self, group: &Group, i: usize, g: u16) -> Mat {
        self.irreps[i][group.invert(g) as usize].transpose()
    }

    /// Character of the dual irrep at g: chi_i(g^{-1}).
    pub fn dual_char(&self, group: &Group, i: usize, g: u16) -> Cyclo {
        self.chars[i][group.invert(g) as usize].clone()
    }
}

/// Construct the irrep table from the hard-coded family formulas and
/// validate it; a validation failure indicates a construction bug.
pub fn irreps(group: &Group) -> Result<IrrepTable, GroupError> {
    let amb = group.ambient;
    let n = group.order();
    let mut irreps: Vec<Vec<Mat>> = Vec::new();
    match group.kind {
        GroupKind::Cyclic(m) => {
            let g0 = group.generators[0];
            let mut expo = vec![0i64; n];
            let mut cur = 0u16;
            for e in 0..n {
                expo[cur as usize] = e as i64;
                cur = group.mul2(g0, cur);
            }
            for r in 0..m as i64 {
                let rep: Vec<Mat> = (0..n)
                    .map(|g| {
                        let mut mat = Mat::zero(1, 1, amb);
                        mat[(0, 0)] =
                            Cyclo::root_of_unity(amb, (amb as i64 / m as i64) * r * expo[g]);
                        mat
                    })
                    .collect();
                irreps.push(rep);
            }
        }
        GroupKind::BinaryDihedral(m) => {
            let ga = group.generators[0];
            let gb = group.generators[1];
            // write every element as a^j or a^j b with j < 2m
            let mut decomp = vec![(0u32, false); n];
            {
                let mut aj = 0u16;
                for j in 0..2 * m {
                    decomp[aj as usize] = (j, false);
                    let ajb = group.mul2(aj, gb);
                    decomp[ajb as usize] = (j, true);
                    aj = group.mul2(aj, ga);
                }
            }
            let i4 = Cyclo::root_of_unity(amb, (amb / 4) as i64);
            let one_dims: Vec<(Cyclo, Cyclo)> = if m % 2 == 0 {
                vec![
                    (Cyclo::one(amb), Cyclo::one(amb)),
                    (Cyclo::one(amb), Cyclo::from_i64(amb, -1)),
                    (Cyclo::from_i64(amb, -1), Cyclo::one(amb)),
                    (Cyclo::from_i64(amb, -1), Cyclo::from_i64(amb, -1)),
                ]
            } else {
                vec![
                    (Cyclo::one(amb), Cyclo::one(amb)),
                    (Cyclo::one(amb), Cyclo::from_i64(amb, -1)),
                    (Cyclo::from_i64(amb, -1), i4.clone()),
                    (Cyclo::from_i64(amb, -1), i4.neg()),
                ]
            };
            for (va, vb) in one_dims {
                let rep: Vec<Mat> = (0..n)
                    .map(|g| {
                        let (j, has_b) = decomp[g];
                        let mut v = va.pow(j as u64);
                        if has_b {
                            v = v.mul(&vb);
                        }
                        let mut mat = Mat::zero(1, 1, amb);
                        mat[(0, 0)] = v;
                        mat
                    })
                    .collect();
                irreps.push(rep);
            }
            for jj in 1..m {
                let eps = (amb / (2 * m)) as i64;
                let rep: Vec<Mat> = (0..n)
                    .map(|g| {
                        let (j, has_b) = decomp[g];
                        let mut mat = Mat::zero(2, 2, amb);
                        mat[(0, 0)] = Cyclo::root_of_unity(amb, eps * (jj as i64) * (j as i64));
                        mat[(1, 1)] = Cyclo::root_of_unity(amb, -eps * (jj as i64) * (j as i64));
                        if has_b {
                            let mut bm = Mat::zero(2, 2, amb);
                            bm[(0, 1)] = Cyclo::one(amb);
                            bm[(1, 0)] = if jj % 2 == 0 {
                                Cyclo::one(amb)
                            } else {
                                Cyclo::from_i64(amb, -1)
                            };
                            mat = mat.mul(&bm);
                        }
                        mat
                    })
                    .collect();
                irreps.push(rep);
            }
        }
    }
    let dims: Vec<usize> = irreps.iter().map(|r| r[0].rows).collect();
    let chars: Vec<Vec<Cyclo>> = irreps
        .iter()
        .map(|r| r.iter().map(|m| m.trace()).collect())
        .collect();

    for (i, rep) in irreps.iter().enumerate() {
        for a in 0..n {
            for b in 0..n {
                let prod = rep[a].mul(&rep[b]);
                if prod != rep[group.mul2(a as u16, b as u16) as usize] {
                    return Err(GroupError::Validation(format!(
                        "irrep {i} is not a homomorphism at ({a},{b})"
                    )));
                }
            }
        }
    }
    let total: usize = dims.iter().map(|d| d * d).sum();
    if total != n {
        return Err(GroupError::Validation(format!(
            "sum of dim^2 is {total}, expected {n}"
        )));
    }
    for i in 0..irreps.len() {
        for j in 0..irreps.len() {
            let mut s = Cyclo::zero(amb);
            for g in 0..n {
                s = s.add(&chars[i][g].mul(&chars[j][group.invert(g as u16) as usize]));
            }
            let expected = if i == j {
                Cyclo::from_i64(amb, n as i64)
            } else {
                Cyclo::zero(amb)
            };
            if s != expected {
                return Err(GroupError::Validation(format!(
                    "orthogonality fails for irreps {i},{j}"
                )));
            }
        }
    }
    let trivial = irreps
        .iter()
        .position(|r| r.iter().all(|m| m.rows == 1 && m[(0, 0)].is_one()))
        .ok_or_else(|| GroupError::Validation("no trivial representation".into()))?;
    let mut dual = vec![usize::MAX; irreps.len()];
    for i in 0..irreps.len() {
        let target: Vec<Cyclo> = (0..n)
            .map(|g| chars[i][group.invert(g as u16) as usize].clone())
            .collect();
        dual[i] = chars
            .iter()
            .position(|c| c == &target)
            .ok_or_else(|| GroupError::Validation(format!("no dual for irrep {i}")))?;
    }
    Ok(IrrepTable {
        irreps,
        dims,
        chars,
        trivial,
        dual,
    })
}

/// A central element sum_{g != 1} c_g g with coefficients constant on
/// conjugacy classes; the coefficient at the identity is always zero.
#[derive(Clone, Debug)]
pub struct CentralElement {
    pub coeffs: Vec<Cyclo>,
}

impl CentralElement {
    pub fn zero(group: &Group) -> Self {
        CentralElement {
            coeffs: vec![group.zero(); group.order()],
        }
    }

    /// Build from per-class coefficients keyed by class index; the class of
    /// the identity must not appear.
    pub fn from_class_coeffs(
        group: &Group,
        by_class: &HashMap<usize, Cyclo>,
    ) -> Result<Self, GroupError> {
        let mut coeffs = vec![group.zero(); group.order()];
        for (&cls, v) in by_class {
            if cls >= group.classes.len() {
                return Err(GroupError::Validation(format!("no class {cls}")));
            }
            if group.classes[cls].contains(&0) {
                return Err(GroupError::Validation(
                    "central element must vanish at the identity".into(),
                ));
            }
            for &g in &group.classes[cls] {
                coeffs[g as usize] = v.clone();
            }
        }
        Ok(CentralElement { coeffs })
    }

    pub fn validate(&self, group: &Group) -> Result<(), GroupError> {
        if !self.coeffs[0].is_zero() {
            return Err(GroupError::Validation(
                "central element supported at the identity".into(),
            ));
        }
        for cls in &group.classes {
            let v = &self.coeffs[cls[0] as usize];
            for &g in cls {
                if &self.coeffs[g as usize] != v {
                    return Err(GroupError::Validation(
                        "coefficients not constant on conjugacy classes".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn coeff(&self, g: u16) -> &Cyclo {
        &self.coeffs[g as usize]
    }

    /// Trace of this element in irrep i.
    pub fn trace_in(&self, irr: &IrrepTable, i: usize) -> Cyclo {
        let mut s: Option<Cyclo> = None;
        for (g, c) in self.coeffs.iter().enumerate() {
            let term = c.mul(&irr.chars[i][g]);
            s = Some(match s {
                None => term,
                Some(acc) => acc.add(&term),
            });
        }
        s.unwrap()
    }

    /// Bar involution g -> g^{-1}.
    pub fn bar(&self, group: &Group) -> CentralElement {
        let mut coeffs = vec![group.zero(); group.order()];
        for (g, c) in self.coeffs.iter().enumerate() {
            coeffs[group.invert(g as u16) as usize] = c.clone();
        }
        CentralElement { coeffs }
    }

    /// c-dagger = -c + 2|G|^{-1} sum_{g != 1} g.
    pub fn dagger(&self, group: &Group) -> CentralElement {
        let two_over = group.rat(rat_i64(2) / rat_i64(group.order() as i64));
        let mut coeffs = vec![group.zero(); group.order()];
        for g in 1..group.order() {
            coeffs[g] = two_over.sub(&self.coeffs[g]);
        }
        CentralElement { coeffs }
    }

    /// c' = sum_{g != 1} (2t - c_g) g^{-1}.
    pub fn prime(&self, group: &Group, t: &Cyclo) -> CentralElement {
        let two_t = t.add(t);
        let mut coeffs = vec![group.zero(); group.order()];
        for g in 1..group.order() {
            coeffs[group.invert(g as u16) as usize] = two_t.sub(&self.coeffs[g]);
        }
        CentralElement { coeffs }
    }
}

/// Derived central data: trace vectors and the involution images.
pub struct CentralPack {
    pub lambda: Vec<Cyclo>,
    pub lambda_bar: Vec<Cyclo>,
    pub lambda_dag: Vec<Cyclo>,
    pub c_bar: CentralElement,
    pub c_dag: CentralElement,
    pub c_prime: CentralElement,
}

/// lambda_i = trace of (t*1 + c) on irrep i, with the bar and dagger
/// companions and c'.
pub fn central_pack(
    group: &Group,
    irr: &IrrepTable,
    c: &CentralElement,
    t: &Cyclo,
) -> Result<CentralPack, GroupError> {
    c.validate(group)?;
    let lam = |ce: &CentralElement| -> Vec<Cyclo> {
        (0..irr.len())
            .map(|i| {
                let dim = Cyclo::from_i64(group.ambient, irr.dims[i] as i64);
                t.mul(&dim).add(&ce.trace_in(irr, i))
            })
            .collect()
    };
    let lambda = lam(c);
    let c_bar = c.bar(group);
    let lambda_bar = lam(&c_bar);
    let c_dag = c.dagger(group);
    let lambda_dag: Vec<Cyclo> = lam(&c_dag);
    for i in 0..irr.len() {
        let mut expect = lambda[i].neg();
        if i == irr.trivial {
            expect = expect.add(&Cyclo::from_i64(group.ambient, 2));
        }
        if lambda_dag[i] != expect {
            return Err(GroupError::Validation(
                "lambda-dagger identity failed".into(),
            ));
        }
    }
    let c_prime = c.prime(group, t);
    Ok(CentralPack {
        lambda,
        lambda_bar,
        lambda_dag,
        c_bar,
        c_dag,
        c_prime,
    })
}

/// Draw a random central element with small rational coefficients.
pub fn random_central(group: &Group, rng: &mut impl rand::Rng) -> CentralElement {
    let mut by_class = HashMap::new();
    for (cid, cls) in group.classes.iter().enumerate() {
        if cls.contains(&0) {
            continue;
        }
        let num: i64 = rng.gen_range(-9..=9);
        let den: i64 = rng.gen_range(1..=9);
        by_class.insert(cid, group.rat(Rat::new(num.into(), den.into())));
    }
    CentralElement::from_class_coeffs(group, &by_class).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn cyclic2_is_plus_minus_id() {
        let g = build_group("cyclic:2").unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.zeta, 1);
    }

    #[test]
    fn cyclic4_closure() {
        let g = build_group("cyclic:4").unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.elem_order[g.generators[0] as usize], 4);
    }

    #[test]
    fn odd_cyclic_rejected() {
        assert!(matches!(build_group("cyclic:3"), Err(GroupError::OddCyclic)));
        assert!(matches!(build_group("cyclic:5"), Err(GroupError::OddCyclic)));
    }

    #[test]
    fn quaternion_group() {
        // binary-dihedral:2 is the quaternion group of order 8 with
        // element-order census {1: 1x, 2: 1x, 4: 6x}
        let g = build_group("binary-dihedral:2").unwrap();
        assert_eq!(g.order(), 8);
        let mut census = HashMap::new();
        for &o in &g.elem_order {
            *census.entry(o).or_insert(0) += 1;
        }
        assert_eq!(census.get(&1), Some(&1));
        assert_eq!(census.get(&2), Some(&1));
        assert_eq!(census.get(&4), Some(&6));
    }

    #[test]
    fn irreps_cyclic2() {
        let g = build_group("cyclic:2").unwrap();
        let t = irreps(&g).unwrap();
        assert_eq!(t.dims, vec![1, 1]);
        assert_eq!(t.trivial, 0);
    }

    #[test]
    fn irreps_cyclic4_characters() {
        // 4 one-dimensional irreps with character i^k on the generator
        let g = build_group("cyclic:4").unwrap();
        let t = irreps(&g).unwrap();
        assert_eq!(t.dims, vec![1, 1, 1, 1]);
        let i = Cyclo::root_of_unity(g.ambient, (g.ambient / 4) as i64);
        let gen = g.generators[0] as usize;
        let mut seen: Vec<Cyclo> = t.chars.iter().map(|c| c[gen].clone()).collect();
        let mut expect: Vec<Cyclo> = (0..4).map(|k| i.pow(k as u64)).collect();
        seen.sort_by_key(|c| format!("{c}"));
        expect.sort_by_key(|c| format!("{c}"));
        assert_eq!(seen, expect);
    }

    #[test]
    fn irreps_bd2_dims() {
        let g = build_group("binary-dihedral:2").unwrap();
        let t = irreps(&g).unwrap();
        let mut dims = t.dims.clone();
        dims.sort();
        assert_eq!(dims, vec![1, 1, 1, 1, 2]);
    }

    #[test]
    fn irreps_bd3() {
        let g = build_group("binary-dihedral:3").unwrap();
        let t = irreps(&g).unwrap();
        let mut dims = t.dims.clone();
        dims.sort();
        assert_eq!(dims, vec![1, 1, 1, 1, 2, 2]);
    }

    #[test]
    fn central_traces() {
        // cyclic:2, c = c_zeta * zeta, t = 1/2: lambda = (t + c, t - c)
        let g = build_group("cyclic:2").unwrap();
        let irr = irreps(&g).unwrap();
        let mut by_class = HashMap::new();
        let czeta = g.rat(rat_i64(3) / rat_i64(7));
        let zcls = g.class_of[g.zeta as usize] as usize;
        by_class.insert(zcls, czeta.clone());
        let c = CentralElement::from_class_coeffs(&g, &by_class).unwrap();
        let t = g.rat(rat_i64(1) / rat_i64(2));
        let pack = central_pack(&g, &irr, &c, &t).unwrap();
        assert_eq!(pack.lambda[irr.trivial], t.add(&czeta));
        assert_eq!(pack.lambda[1 - irr.trivial], t.sub(&czeta));
    }

    #[test]
    fn regular_character_identity() {
        // c = 0 gives lambda_i = dim_i / |G| and delta . lambda = 1
        for desc in ["cyclic:4", "binary-dihedral:2"] {
            let g = build_group(desc).unwrap();
            let irr = irreps(&g).unwrap();
            let c = CentralElement::zero(&g);
            let t = g.rat(rat_i64(1) / rat_i64(g.order() as i64));
            let pack = central_pack(&g, &irr, &c, &t).unwrap();
            let mut dot = g.zero();
            for i in 0..irr.len() {
                assert_eq!(
                    pack.lambda[i],
                    g.rat(rat_i64(irr.dims[i] as i64) / rat_i64(g.order() as i64))
                );
                dot = dot.add(&pack.lambda[i].mul(&g.int(irr.dims[i] as i64)));
            }
            assert!(dot.is_one());
        }
    }

    #[test]
    fn central_trace_sum_vanishes() {
        // sum_i dim_i * Tr(c; N_i) = 0 for every c supported away from 1
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for desc in [
            "cyclic:2",
            "cyclic:4",
            "cyclic:6",
            "binary-dihedral:2",
            "binary-dihedral:3",
        ] {
            let g = build_group(desc).unwrap();
            let irr = irreps(&g).unwrap();
            let c = random_central(&g, &mut rng);
            let mut s = g.zero();
            for i in 0..irr.len() {
                s = s.add(&c.trace_in(&irr, i).mul(&g.int(irr.dims[i] as i64)));
            }
            assert!(s.is_zero(), "failed for {desc}");
        }
    }

    #[test]
    fn bar_is_involution() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let g = build_group("binary-dihedral:3").unwrap();
        let c = random_central(&g, &mut rng);
        let cbb = c.bar(&g).bar(&g);
        assert_eq!(c.coeffs, cbb.coeffs);
    }
}
