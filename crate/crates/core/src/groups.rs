//! Finite groups given by multiplication tables, their automorphisms,
//! ordinary and twisted conjugacy, character tables, and the characters of
//! representations of `F ⋊_α ℤ` induced from `F ⋊_α jℤ`.
//!
//! Elements of the semidirect product are pairs `(f, k)` multiplied as
//! `(f₁, k₁)(f₂, k₂) = (f₁ α^{k₁}(f₂), k₁ + k₂)`, so conjugating `(f, k)` by
//! `γ ∈ F` gives `(γ f α^k(γ⁻¹), k)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{DelocError, Result};
use crate::linalg::{condition_number, eigenvalues, null_vector, Matrix};
use crate::scalar::Scalar;

/// Largest order for which the group axioms are checked on construction.
pub const AXIOM_CHECK_LIMIT: usize = 512;
/// Largest order for which character tables are computed rather than supplied.
pub const CHARACTER_TABLE_LIMIT: usize = 48;

/// A finite group on the elements `0..order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    inverse: Vec<usize>,
    identity: usize,
    labels: Vec<String>,
}

impl FiniteGroup {
    /// Group from a row-major multiplication table: `table[a * order + b] = ab`.
    pub fn from_table(order: usize, table: Vec<usize>, labels: Option<Vec<String>>) -> Result<Self> {
        if order == 0 {
            return Err(DelocError::Schema("group order must be positive".into()));
        }
        if table.len() != order * order {
            return Err(DelocError::Schema(format!(
                "multiplication table has {} entries, expected {}",
                table.len(),
                order * order
            )));
        }
        if let Some(&x) = table.iter().find(|&&x| x >= order) {
            return Err(DelocError::Schema(format!("table entry {x} is not an element")));
        }
        let labels = match labels {
            Some(l) if l.len() != order => {
                return Err(DelocError::Schema(format!("{} labels for {order} elements", l.len())))
            }
            Some(l) => l,
            None => (0..order).map(|i| format!("{i}")).collect(),
        };
        let mul = |a: usize, b: usize| table[a * order + b];
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| mul(e, x) == x && mul(x, e) == x))
            .ok_or_else(|| DelocError::Validation("no identity element".into()))?;
        let mut inverse = vec![0; order];
        for (x, inv) in inverse.iter_mut().enumerate() {
            *inv = (0..order)
                .find(|&y| mul(x, y) == identity && mul(y, x) == identity)
                .ok_or_else(|| DelocError::Validation(format!("element {x} has no inverse")))?;
        }
        if order <= AXIOM_CHECK_LIMIT {
            for a in 0..order {
                for b in 0..order {
                    let ab = mul(a, b);
                    for c in 0..order {
                        if mul(ab, c) != mul(a, mul(b, c)) {
                            return Err(DelocError::Validation(format!(
                                "associativity fails at ({a}, {b}, {c})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(Self {
            order,
            table,
            inverse,
            identity,
            labels,
        })
    }

    /// Closure of a set of permutations of `0..degree` under composition
    /// `(στ)(x) = σ(τ(x))`. Element 0 is the identity.
    pub fn from_permutations(degree: usize, generators: &[Vec<usize>]) -> Result<Self> {
        for g in generators {
            let mut seen = vec![false; degree];
            if g.len() != degree || g.iter().any(|&x| x >= degree || core::mem::replace(&mut seen[x], true)) {
                return Err(DelocError::Schema(format!(
                    "{g:?} is not a permutation of {degree} points"
                )));
            }
        }
        let compose = |s: &[usize], t: &[usize]| -> Vec<usize> { t.iter().map(|&x| s[x]).collect() };
        let mut elements: Vec<Vec<usize>> = vec![(0..degree).collect()];
        let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        index.insert(elements[0].clone(), 0);
        let mut frontier = 0;
        while frontier < elements.len() {
            for g in generators {
                let next = compose(g, &elements[frontier]);
                if !index.contains_key(&next) {
                    index.insert(next.clone(), elements.len());
                    elements.push(next);
                }
            }
            frontier += 1;
        }
        let order = elements.len();
        let table = elements
            .iter()
            .flat_map(|a| elements.iter().map(|b| index[&compose(a, b)]).collect::<Vec<_>>())
            .collect();
        Self::from_table(order, table, None)
    }

    /// Group on `0..order` with multiplication given by a closure.
    fn from_fn(order: usize, mul: impl Fn(usize, usize) -> usize, labels: Vec<String>) -> Self {
        let table = (0..order * order).map(|i| mul(i / order, i % order)).collect();
        Self::from_table(order, table, Some(labels)).expect("catalog group satisfies the axioms")
    }

    /// `ℤ/n`, element `a` standing for `a mod n`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0);
        Self::from_fn(n, |a, b| (a + b) % n, (0..n).map(|a| format!("{a}")).collect())
    }

    /// Dihedral group of order `2n`; element `a + n b` is `r^a s^b`.
    pub fn dihedral(n: usize) -> Self {
        assert!(n > 0);
        let mul = |x: usize, y: usize| {
            let (a, b, c, d) = (x % n, x / n, y % n, y / n);
            let rot = if b == 0 { (a + c) % n } else { (a + n - c) % n };
            rot + n * ((b + d) % 2)
        };
        let labels = (0..2 * n).map(|x| format!("r^{}s^{}", x % n, x / n)).collect();
        Self::from_fn(2 * n, mul, labels)
    }

    /// Dicyclic group of order `4n` (`n = 2` is the quaternion group);
    /// element `a + 2n b` is `x^a y^b` with `y² = x^n`, `yx = x⁻¹y`.
    pub fn dicyclic(n: usize) -> Self {
        assert!(n > 0);
        let m = 2 * n;
        let mul = |p: usize, q: usize| {
            let (a, b, c, d) = (p % m, p / m, q % m, q / m);
            let rot = if b == 0 { a + c } else { a + m - c };
            if b + d == 2 {
                (rot + n) % m
            } else {
                rot % m + m * (b + d)
            }
        };
        let labels = (0..2 * m).map(|x| format!("x^{}y^{}", x % m, x / m)).collect();
        Self::from_fn(2 * m, mul, labels)
    }

    pub fn quaternion() -> Self {
        Self::dicyclic(2)
    }

    /// Symmetric group on `n` points.
    pub fn symmetric(n: usize) -> Self {
        assert!(n > 0);
        if n == 1 {
            return Self::cyclic(1);
        }
        let transposition = (0..n).map(|x| [1, 0].get(x).copied().unwrap_or(x)).collect();
        let cycle = (0..n).map(|x| (x + 1) % n).collect();
        Self::from_permutations(n, &[transposition, cycle]).expect("valid generators")
    }

    /// Alternating group on `n ≥ 3` points, generated by the 3-cycles `(0 1 i)`.
    pub fn alternating(n: usize) -> Self {
        assert!(n >= 3);
        let gens: Vec<Vec<usize>> = (2..n)
            .map(|i| {
                (0..n)
                    .map(|x| match x {
                        0 => 1,
                        1 => i,
                        _ if x == i => 0,
                        _ => x,
                    })
                    .collect()
            })
            .collect();
        Self::from_permutations(n, &gens).expect("valid generators")
    }

    /// `G × H`; element `g + |G| h` is `(g, h)`.
    pub fn direct_product(g: &Self, h: &Self) -> Self {
        let (m, n) = (g.order, h.order);
        let labels = (0..m * n)
            .map(|x| format!("({},{})", g.labels[x % m], h.labels[x / m]))
            .collect();
        Self::from_fn(m * n, |x, y| g.mul(x % m, y % m) + m * h.mul(x / m, y / m), labels)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn elements(&self) -> core::ops::Range<usize> {
        0..self.order
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }
}

/// An automorphism `α` of a finite group, as a permutation of its elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automorphism {
    map: Vec<usize>,
}

impl Automorphism {
    pub fn new(group: &FiniteGroup, map: Vec<usize>) -> Result<Self> {
        if map.len() != group.order() {
            return Err(DelocError::Schema(format!(
                "automorphism has {} images, group order is {}",
                map.len(),
                group.order()
            )));
        }
        let mut seen = vec![false; map.len()];
        if map
            .iter()
            .any(|&x| x >= map.len() || core::mem::replace(&mut seen[x], true))
        {
            return Err(DelocError::Validation("automorphism is not a bijection".into()));
        }
        if map[group.identity()] != group.identity() {
            return Err(DelocError::Validation("automorphism does not fix the identity".into()));
        }
        for a in group.elements() {
            for b in group.elements() {
                if map[group.mul(a, b)] != group.mul(map[a], map[b]) {
                    return Err(DelocError::Validation(format!("α(xy) ≠ α(x)α(y) at x = {a}, y = {b}")));
                }
            }
        }
        Ok(Self { map })
    }

    pub fn identity(group: &FiniteGroup) -> Self {
        Self {
            map: group.elements().collect(),
        }
    }

    /// Inner automorphism `x ↦ g x g⁻¹`.
    pub fn inner(group: &FiniteGroup, g: usize) -> Self {
        Self {
            map: group
                .elements()
                .map(|x| group.mul(group.mul(g, x), group.inv(g)))
                .collect(),
        }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// Smallest `m ≥ 1` with `α^m = id`.
    pub fn order(&self) -> usize {
        let mut current = self.map.clone();
        let mut m = 1;
        while current.iter().enumerate().any(|(i, &x)| i != x) {
            current = current.iter().map(|&x| self.map[x]).collect();
            m += 1;
        }
        m
    }

    /// `α^k` for any integer `k`, reduced modulo the order of `α`.
    pub fn power(&self, k: i64) -> Self {
        let ord = self.order() as i64;
        let e = k.rem_euclid(ord);
        let mut map: Vec<usize> = (0..self.map.len()).collect();
        for _ in 0..e {
            map = map.iter().map(|&x| self.map[x]).collect();
        }
        Self { map }
    }
}

/// Orbits of a group acting on itself, with a lookup from element to orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassPartition {
    /// Orbits ordered by their smallest element; each orbit is sorted.
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
}

impl ClassPartition {
    fn from_orbits(order: usize, orbit_of: impl Fn(usize) -> Vec<usize>) -> Self {
        let mut class_of = vec![usize::MAX; order];
        let mut classes = Vec::new();
        for x in 0..order {
            if class_of[x] != usize::MAX {
                continue;
            }
            let mut orbit = orbit_of(x);
            orbit.sort_unstable();
            orbit.dedup();
            for &y in &orbit {
                class_of[y] = classes.len();
            }
            classes.push(orbit);
        }
        Self { classes, class_of }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }
}

/// Partition of `G` into orbits of `x ↦ γxγ⁻¹`.
pub fn conjugacy_classes(group: &FiniteGroup) -> ClassPartition {
    ClassPartition::from_orbits(group.order(), |x| {
        group
            .elements()
            .map(|g| group.mul(group.mul(g, x), group.inv(g)))
            .collect()
    })
}

/// Classes of `f ∼_k f'` iff `γ f α^k(γ⁻¹) = f'` for some `γ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedClassDecomposition {
    /// `k` reduced modulo the order of `α`.
    pub k: i64,
    pub partition: ClassPartition,
    /// `|[f]_k|` per class.
    pub sizes: Vec<usize>,
    /// `s_k(f) = |{γ : γ f α^k(γ⁻¹) = f}|` per class.
    pub stabilizer_orders: Vec<usize>,
}

impl TwistedClassDecomposition {
    pub fn class_size_of(&self, f: usize) -> usize {
        self.sizes[self.partition.class_of[f]]
    }
}

pub fn twisted_classes(group: &FiniteGroup, alpha: &Automorphism, k: i64) -> TwistedClassDecomposition {
    let reduced = k.rem_euclid(alpha.order() as i64);
    let ak = alpha.power(reduced);
    let act = |g: usize, f: usize| group.mul(group.mul(g, f), ak.apply(group.inv(g)));
    let partition = ClassPartition::from_orbits(group.order(), |f| group.elements().map(|g| act(g, f)).collect());
    let sizes = partition.sizes();
    let stabilizer_orders = partition
        .classes
        .iter()
        .map(|c| group.elements().filter(|&g| act(g, c[0]) == c[0]).count())
        .collect();
    TwistedClassDecomposition {
        k: reduced,
        partition,
        sizes,
        stabilizer_orders,
    }
}

/// Square table `χ_ρ(g_i)` of irreducible characters.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterTable {
    /// One representative per conjugacy class, identity class first.
    pub representatives: Vec<usize>,
    pub class_sizes: Vec<usize>,
    /// `rows[ρ][i] = χ_ρ(g_i)`; the trivial character comes first.
    pub rows: Vec<Vec<Complex64>>,
}

impl CharacterTable {
    pub fn group_order(&self) -> usize {
        self.class_sizes.iter().sum()
    }

    pub fn degrees(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r[0].re).collect()
    }

    pub fn as_matrix(&self) -> DMatrix<Complex64> {
        let n = self.rows.len();
        DMatrix::from_fn(n, self.class_sizes.len(), |i, j| self.rows[i][j])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableReport {
    pub condition_number: f64,
    pub max_orthogonality_error: f64,
}

/// Checks row orthogonality `Σ_i |⟨g_i⟩| χ_ρ(g_i) conj(χ_σ(g_i)) = |Γ| δ_ρσ`
/// to 1e-8 and invertibility.
pub fn verify_character_table(table: &CharacterTable) -> Result<TableReport> {
    let r = table.class_sizes.len();
    if table.rows.len() != r || table.rows.iter().any(|row| row.len() != r) || table.representatives.len() != r {
        return Err(DelocError::Schema(format!(
            "character table must be square with {r} classes"
        )));
    }
    let order = table.group_order() as f64;
    let mut worst = 0.0f64;
    for a in 0..r {
        for b in a..r {
            let inner: Complex64 = (0..r)
                .map(|i| table.rows[a][i] * table.rows[b][i].conj() * table.class_sizes[i] as f64)
                .sum();
            let expected = if a == b { order } else { 0.0 };
            let err = (inner - expected).norm() / order;
            if err > 1e-8 {
                return Err(DelocError::Validation(format!(
                    "rows {a} and {b} fail orthogonality (inner product {inner})"
                )));
            }
            worst = worst.max(err);
        }
    }
    let cond = condition_number(&table.as_matrix())?;
    if !cond.is_finite() {
        return Err(DelocError::Validation("character table is singular".into()));
    }
    Ok(TableReport {
        condition_number: cond,
        max_orthogonality_error: worst,
    })
}

/// Character values are cyclotomic integers; a real or imaginary part within
/// `1e-9` of a multiple of `1/2` is taken to be that multiple, so that tables
/// of groups with rational characters come out exact.
fn snap_half_integer(z: Complex64) -> Complex64 {
    let snap = |x: f64| {
        let h = (2.0 * x).round() / 2.0;
        if (x - h).abs() < 1e-9 {
            h + 0.0
        } else {
            x
        }
    };
    Complex64::new(snap(z.re), snap(z.im))
}

/// Character table by Burnside's algorithm: the central characters
/// `ω_ρ(C_i) = |C_i| χ_ρ(g_i)/χ_ρ(1)` are the common eigenvectors of the class
/// multiplication matrices.
pub fn character_table(group: &FiniteGroup) -> Result<CharacterTable> {
    if group.order() > CHARACTER_TABLE_LIMIT {
        return Err(DelocError::Unsupported(format!(
            "character tables are computed only up to order {CHARACTER_TABLE_LIMIT}; supply one for order {}",
            group.order()
        )));
    }
    let classes = conjugacy_classes(group);
    let r = classes.len();
    let sizes = classes.sizes();
    // The identity has the smallest index among its class only if it is
    // element 0; reorder so its class comes first.
    let id_class = classes.class_of[group.identity()];
    let mut order_of_classes: Vec<usize> = (0..r).collect();
    order_of_classes.swap(0, id_class);
    let reps: Vec<usize> = order_of_classes.iter().map(|&c| classes.classes[c][0]).collect();
    let h: Vec<usize> = order_of_classes.iter().map(|&c| sizes[c]).collect();
    let position: Vec<usize> = {
        let mut p = vec![0; r];
        for (new, &old) in order_of_classes.iter().enumerate() {
            p[old] = new;
        }
        p
    };
    let class_idx = |x: usize| position[classes.class_of[x]];

    // a[j][i][k] = |{x ∈ C_j : x⁻¹ z_k ∈ C_i}| for a fixed z_k ∈ C_k.
    let mut structure = vec![vec![vec![0.0f64; r]; r]; r];
    for (j, &cj) in order_of_classes.iter().enumerate() {
        for (k, &zk) in reps.iter().enumerate() {
            for &x in &classes.classes[cj] {
                structure[j][class_idx(group.mul(group.inv(x), zk))][k] += 1.0;
            }
        }
    }

    for attempt in 0..8u32 {
        let weights: Vec<f64> = (0..r)
            .map(|j| {
                1.0 / (j as f64 + 1.618 + 0.37 * attempt as f64) + 0.1 * ((j * 7 + attempt as usize * 3) % 5) as f64
            })
            .collect();
        let combo = DMatrix::from_fn(r, r, |i, k| {
            Complex64::new((0..r).map(|j| weights[j] * structure[j][i][k]).sum(), 0.0)
        });
        let lambdas = eigenvalues(&combo)?;
        let separated = lambdas
            .iter()
            .enumerate()
            .all(|(a, x)| lambdas.iter().skip(a + 1).all(|y| (x - y).norm() > 1e-6));
        if !separated {
            continue;
        }
        let mut rows = Vec::with_capacity(r);
        for &lambda in &lambdas {
            let shifted = &combo - DMatrix::from_diagonal_element(r, r, lambda);
            let v = null_vector(&shifted)?;
            if v[0].norm() < 1e-12 {
                return Err(DelocError::Numeric("central character vanishes at the identity".into()));
            }
            let omega: Vec<Complex64> = v.iter().map(|z| z / v[0]).collect();
            let norm: f64 = omega.iter().zip(&h).map(|(w, &hi)| w.norm_sqr() / hi as f64).sum();
            let degree = (group.order() as f64 / norm).sqrt().round();
            rows.push(
                omega
                    .iter()
                    .zip(&h)
                    .map(|(w, &hi)| snap_half_integer(w * degree / hi as f64))
                    .collect::<Vec<_>>(),
            );
        }
        // Trivial character first, then by degree and a stable tiebreak.
        rows.sort_by(|a: &Vec<Complex64>, b: &Vec<Complex64>| {
            let trivial = |row: &Vec<Complex64>| row.iter().all(|z| (z - 1.0).norm() < 1e-8);
            trivial(b)
                .cmp(&trivial(a))
                .then(a[0].re.total_cmp(&b[0].re))
                .then_with(|| {
                    let key = |row: &Vec<Complex64>| row.iter().map(|z| z.re * 3.0 + z.im).sum::<f64>();
                    key(b).total_cmp(&key(a))
                })
        });
        let table = CharacterTable {
            representatives: reps.clone(),
            class_sizes: h.clone(),
            rows,
        };
        verify_character_table(&table)?;
        return Ok(table);
    }
    Err(DelocError::Numeric("could not separate the central characters".into()))
}

/// Representation `ν` of `F ⋊_α jℤ` given by `μ : F → GL(N)` and `U = ν(e, j)`,
/// subject to `μ(α^j(f)) U = U μ(f)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedRep<T: Scalar> {
    j: u32,
    alpha: Automorphism,
    mu: Vec<Matrix<T>>,
    u: Matrix<T>,
}

impl<T: Scalar> InducedRep<T> {
    pub fn new(group: &FiniteGroup, alpha: &Automorphism, j: u32, mu: Vec<Matrix<T>>, u: Matrix<T>) -> Result<Self> {
        const TOL: f64 = 1e-12;
        if j == 0 {
            return Err(DelocError::Domain("period j must be positive".into()));
        }
        if mu.len() != group.order() {
            return Err(DelocError::Schema(format!(
                "μ has {} matrices, group order is {}",
                mu.len(),
                group.order()
            )));
        }
        let n = u.rows();
        if !u.is_square() || mu.iter().any(|m| m.rows() != n || m.cols() != n) {
            return Err(DelocError::Schema(format!("μ(f) and U must all be {n}×{n}")));
        }
        if !mu[group.identity()].near(&Matrix::identity(n), TOL) {
            return Err(DelocError::Validation("μ(e) is not the identity".into()));
        }
        for a in group.elements() {
            for b in group.elements() {
                if !mu[a].mul(&mu[b]).near(&mu[group.mul(a, b)], TOL) {
                    return Err(DelocError::Validation(format!("μ is not a homomorphism at ({a}, {b})")));
                }
            }
        }
        if !T::is_exact() {
            let unitary = |m: &Matrix<T>| m.mul(&m.adjoint()).near(&Matrix::identity(n), TOL);
            if let Some(f) = group.elements().find(|&f| !unitary(&mu[f])) {
                return Err(DelocError::Validation(format!("μ({f}) is not unitary")));
            }
            if !unitary(&u) {
                return Err(DelocError::Validation("U is not unitary".into()));
            }
        } else if u.inverse().is_none() {
            return Err(DelocError::Validation("U is singular".into()));
        }
        let aj = alpha.power(i64::from(j));
        if let Some(f) = group
            .elements()
            .find(|&f| !mu[aj.apply(f)].mul(&u).near(&u.mul(&mu[f]), TOL))
        {
            return Err(DelocError::Validation(format!("μ(α^j(f)) U ≠ U μ(f) at f = {f}")));
        }
        Ok(Self {
            j,
            alpha: alpha.clone(),
            mu,
            u,
        })
    }

    pub fn period(&self) -> u32 {
        self.j
    }

    pub fn dimension(&self) -> usize {
        self.u.rows()
    }

    pub fn alpha(&self) -> &Automorphism {
        &self.alpha
    }

    pub fn mu(&self, f: usize) -> &Matrix<T> {
        &self.mu[f]
    }

    pub fn u(&self) -> &Matrix<T> {
        &self.u
    }

    pub fn to_complex(&self) -> InducedRep<Complex64> {
        InducedRep {
            j: self.j,
            alpha: self.alpha.clone(),
            mu: self.mu.iter().map(Matrix::to_complex).collect(),
            u: self.u.to_complex(),
        }
    }
}

/// `χ_ρ(f, k)`: zero unless `j | k`, otherwise with `k = jr`
/// `Tr([μ(f) + μ(α⁻¹(f)) + … + μ(α^{-(j-1)}(f))] U^r)`.
pub fn induced_character<T: Scalar>(data: &InducedRep<T>, f: usize, k: i64) -> T {
    let j = i64::from(data.j);
    if k % j != 0 {
        return T::zero();
    }
    let ur = data.u.pow_signed(k / j).expect("U is invertible by construction");
    let inv_alpha = data.alpha.power(-1);
    let mut x = f;
    let mut total = T::zero();
    for _ in 0..data.j {
        total = total + data.mu[x].mul(&ur).trace();
        x = inv_alpha.apply(x);
    }
    total
}
