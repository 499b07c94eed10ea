//! Representation spaces over `F_p`, orbit enumeration, and Hall numbers.
//!
//! A representation of a quiver with dimension vector `d` assigns to each
//! arrow `h : s -> t` a `d_t x d_s` matrix over `F_p`.  The *representation
//! space* is the finite set of all such assignments; the *base-change
//! group* `G = prod GL(d_i)` over the acting vertices operates by
//! `x_h |-> g_t x_h g_s^(-1)` (with the identity at non-acting vertices).
//!
//! Orbits of this action are isomorphism classes.  [`OrbitTable`]
//! enumerates every point, partitions the space into orbits by breadth
//! first search over group generators, and — whenever the group is small
//! enough to sweep element by element — re-derives each orbit and each
//! stabilizer order independently and asserts agreement.
//!
//! Hall numbers are computed literally: `g^c_(a,b)` counts the subобjects
//! of the canonical representative of class `c` that are isomorphic to
//! `b` with quotient isomorphic to `a` (the subobject is the *second*
//! lower index).  An independent routine counts intertwining monomorphisms
//! instead and divides by the automorphism count, giving the test suite a
//! second route to the same numbers.

use std::cell::RefCell;
use std::collections::HashMap;
use std::path::PathBuf;
use std::rc::Rc;

use crate::error::{limits, Error, Result};
use crate::gflin::{self, GfMatrix};
use crate::quiver::{dims_label, Quiver};
use crate::scalar::{is_prime, Field};

/// An isomorphism class handle: the dimension vector plus the class index
/// inside the orbit table at those dimensions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassId {
    pub dims: Vec<usize>,
    pub index: u32,
}

impl ClassId {
    pub fn new(dims: Vec<usize>, index: u32) -> ClassId {
        ClassId { dims, index }
    }

    /// Stable printable label, `d1,d2,...:k`.
    pub fn label(&self) -> String {
        format!("{}:{}", dims_label(&self.dims), self.index)
    }
}

// ---------------------------------------------------------------------------
// Representation space
// ---------------------------------------------------------------------------

/// The space of representations of a quiver at a fixed dimension vector,
/// over `F_p`.  Points are flat byte vectors: the row-major entries of the
/// arrow matrices, arrows in quiver order.
#[derive(Clone, Debug)]
pub struct RepSpace {
    quiver: Quiver,
    dims: Vec<usize>,
    p: u8,
    shapes: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    total_entries: usize,
}

impl RepSpace {
    pub fn new(quiver: &Quiver, dims: &[usize], p: u64) -> Result<RepSpace> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p > 251 {
            return Err(Error::InvalidInput(format!("prime {p} too large for byte entries")));
        }
        if dims.len() != quiver.n_vertices() {
            return Err(Error::InvalidInput(format!(
                "dimension vector has {} entries for a quiver with {} vertices",
                dims.len(),
                quiver.n_vertices()
            )));
        }
        let mut shapes = Vec::with_capacity(quiver.arrows().len());
        let mut offsets = Vec::with_capacity(quiver.arrows().len());
        let mut total = 0usize;
        for h in quiver.arrows() {
            let shape = (dims[h.tgt], dims[h.src]);
            offsets.push(total);
            total += shape.0 * shape.1;
            shapes.push(shape);
        }
        // Refuse spaces too large to enumerate exactly.
        let mut count = 1u128;
        for _ in 0..total {
            count = count.saturating_mul(p as u128);
            if count > limits::MAX_SPACE_POINTS {
                return Err(Error::scale("representation space points", count, limits::MAX_SPACE_POINTS));
            }
        }
        Ok(RepSpace {
            quiver: quiver.clone(),
            dims: dims.to_vec(),
            p: p as u8,
            shapes,
            offsets,
            total_entries: total,
        })
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
    pub fn p(&self) -> u8 {
        self.p
    }
    pub fn total_entries(&self) -> usize {
        self.total_entries
    }

    pub fn point_count(&self) -> u128 {
        (self.p as u128).pow(self.total_entries as u32)
    }

    /// The all-zeros representation.
    pub fn zero_point(&self) -> Vec<u8> {
        vec![0u8; self.total_entries]
    }

    /// Visit every point in lexicographic order of the flat entry vector.
    pub fn for_each_point(&self, mut f: impl FnMut(&[u8])) {
        let mut x = vec![0u8; self.total_entries];
        loop {
            f(&x);
            let mut i = self.total_entries;
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                x[i] += 1;
                if x[i] < self.p {
                    break;
                }
                x[i] = 0;
            }
        }
    }

    /// Rank of a point in the lexicographic enumeration (mixed-radix value
    /// of the entry vector); dense in `0..point_count()`.
    pub fn point_index(&self, x: &[u8]) -> usize {
        debug_assert_eq!(x.len(), self.total_entries);
        let mut idx = 0usize;
        for &e in x {
            idx = idx * self.p as usize + e as usize;
        }
        idx
    }

    /// Extract the matrix of arrow slot `h`.
    pub fn arrow_matrix(&self, x: &[u8], h: usize) -> GfMatrix {
        let (r, c) = self.shapes[h];
        let off = self.offsets[h];
        GfMatrix::from_flat(self.p, r, c, &x[off..off + r * c])
    }

    /// Overwrite the matrix of arrow slot `h`.
    pub fn put_arrow_matrix(&self, x: &mut [u8], h: usize, m: &GfMatrix) {
        let (r, c) = self.shapes[h];
        assert_eq!((m.rows(), m.cols()), (r, c));
        let off = self.offsets[h];
        x[off..off + r * c].copy_from_slice(m.entries());
    }

    /// Apply a group element (matrices indexed by acting vertex, with
    /// precomputed inverses) to a point.
    pub fn act(&self, mats: &[GfMatrix], invs: &[GfMatrix], x: &[u8]) -> Vec<u8> {
        let mut out = x.to_vec();
        for (h, arrow) in self.quiver.arrows().iter().enumerate() {
            let mut m = self.arrow_matrix(x, h);
            if self.quiver.is_acting(arrow.src) {
                m = m.mul(&invs[arrow.src]);
            }
            if self.quiver.is_acting(arrow.tgt) {
                m = mats[arrow.tgt].mul(&m);
            }
            self.put_arrow_matrix(&mut out, h, &m);
        }
        out
    }

    /// The base-change group of this space.
    pub fn group(&self) -> GradedGroup {
        GradedGroup {
            p: self.p,
            dims: self.dims[..self.quiver.n_acting()].to_vec(),
        }
    }

    /// Visit every graded subspace with the given sub-dimension vector,
    /// presented as per-vertex canonical column-basis matrices.
    pub fn for_each_graded_subspace(
        &self,
        sub_dims: &[usize],
        mut f: impl FnMut(&[GfMatrix]),
    ) {
        assert_eq!(sub_dims.len(), self.dims.len());
        if sub_dims.iter().zip(&self.dims).any(|(k, d)| k > d) {
            return;
        }
        let options: Vec<Vec<GfMatrix>> = (0..self.dims.len())
            .map(|v| gflin::subspace_bases(self.p, self.dims[v], sub_dims[v]))
            .collect();
        let mut choice = vec![0usize; options.len()];
        let mut current: Vec<GfMatrix> = options.iter().map(|o| o[0].clone()).collect();
        loop {
            f(&current);
            let mut i = options.len();
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                choice[i] += 1;
                if choice[i] < options[i].len() {
                    current[i] = options[i][choice[i]].clone();
                    break;
                }
                choice[i] = 0;
                current[i] = options[i][0].clone();
            }
        }
    }

    /// Build the splitting data for one graded subspace.
    pub fn splitter(&self, bases: &[GfMatrix]) -> SubspaceSplitter {
        assert_eq!(bases.len(), self.dims.len());
        let sub_dims: Vec<usize> = bases.iter().map(GfMatrix::cols).collect();
        let quot_dims: Vec<usize> = self
            .dims
            .iter()
            .zip(&sub_dims)
            .map(|(d, k)| d - k)
            .collect();
        let mut change = Vec::with_capacity(bases.len());
        let mut change_inv = Vec::with_capacity(bases.len());
        for (v, s) in bases.iter().enumerate() {
            assert_eq!(s.rows(), self.dims[v]);
            let m = s.complete_basis();
            let inv = m.inverse().expect("completed basis is invertible");
            change.push(m);
            change_inv.push(inv);
        }
        SubspaceSplitter {
            space: self.clone(),
            sub_dims,
            quot_dims,
            change,
            change_inv,
        }
    }
}

/// Splitting data for a fixed graded subspace `W` of a representation
/// space: a completed basis `[S | C]` per vertex and its inverse.
///
/// For a point `x`, conjugating each arrow matrix into the completed basis
/// produces a block triangular matrix iff `W` is `x`-stable; the diagonal
/// blocks are then the restriction to `W` and the induced quotient map.
pub struct SubspaceSplitter {
    space: RepSpace,
    sub_dims: Vec<usize>,
    quot_dims: Vec<usize>,
    change: Vec<GfMatrix>,
    change_inv: Vec<GfMatrix>,
}

impl SubspaceSplitter {
    pub fn sub_dims(&self) -> &[usize] {
        &self.sub_dims
    }
    pub fn quot_dims(&self) -> &[usize] {
        &self.quot_dims
    }

    /// Split `x` along the subspace: `Some((restriction, quotient))` when
    /// the subspace is stable under every arrow matrix, `None` otherwise.
    /// The two returned points live in the spaces at `sub_dims` and
    /// `quot_dims` of the same quiver.
    pub fn split(&self, x: &[u8]) -> Option<(Vec<u8>, Vec<u8>)> {
        let quiver = self.space.quiver();
        let sub_space = RepSpace::new(quiver, &self.sub_dims, self.space.p() as u64).ok()?;
        let quot_space = RepSpace::new(quiver, &self.quot_dims, self.space.p() as u64).ok()?;
        self.split_with(&sub_space, &quot_space, x)
    }

    /// Like [`SubspaceSplitter::split`] but reusing prebuilt target spaces
    /// (hot path for bulk scans).
    pub fn split_with(
        &self,
        sub_space: &RepSpace,
        quot_space: &RepSpace,
        x: &[u8],
    ) -> Option<(Vec<u8>, Vec<u8>)> {
        let quiver = self.space.quiver();
        let mut sub_point = sub_space.zero_point();
        let mut quot_point = quot_space.zero_point();
        for (h, arrow) in quiver.arrows().iter().enumerate() {
            let m = self.space.arrow_matrix(x, h);
            let conj = self.change_inv[arrow.tgt].mul(&m).mul(&self.change[arrow.src]);
            let ks = self.sub_dims[arrow.src];
            let kt = self.sub_dims[arrow.tgt];
            // Stability: the block mapping W_src into the complement of
            // W_tgt must vanish.
            for r in kt..conj.rows() {
                for c in 0..ks {
                    if conj.at(r, c) != 0 {
                        return None;
                    }
                }
            }
            let mut sub_m = GfMatrix::zero(self.space.p(), kt, ks);
            for r in 0..kt {
                for c in 0..ks {
                    sub_m.set(r, c, conj.at(r, c));
                }
            }
            let mut quot_m =
                GfMatrix::zero(self.space.p(), conj.rows() - kt, conj.cols() - ks);
            for r in kt..conj.rows() {
                for c in ks..conj.cols() {
                    quot_m.set(r - kt, c - ks, conj.at(r, c));
                }
            }
            sub_space.put_arrow_matrix(&mut sub_point, h, &sub_m);
            quot_space.put_arrow_matrix(&mut quot_point, h, &quot_m);
        }
        Some((sub_point, quot_point))
    }
}

// ---------------------------------------------------------------------------
// The base-change group
// ---------------------------------------------------------------------------

/// A group element: one invertible matrix per acting vertex, with the
/// inverses precomputed.
#[derive(Clone, Debug)]
pub struct GroupElement {
    pub mats: Vec<GfMatrix>,
    pub invs: Vec<GfMatrix>,
}

/// The product of `GL(d_i, F_p)` over the acting vertices.
#[derive(Clone, Debug)]
pub struct GradedGroup {
    p: u8,
    dims: Vec<usize>,
}

/// Smallest primitive root mod `p`.
fn primitive_root(p: u8) -> u8 {
    'next: for g in 2..p {
        let mut x = 1u32;
        for _ in 0..(p as u32 - 2) {
            x = x * g as u32 % p as u32;
            if x == 1 {
                continue 'next;
            }
        }
        return g;
    }
    1 // p = 2
}

impl GradedGroup {
    pub fn order(&self) -> u128 {
        self.order_checked().expect("group order fits in u128")
    }

    /// Group order, or `None` on `u128` overflow.
    pub fn order_checked(&self) -> Option<u128> {
        let mut out = 1u128;
        for &d in &self.dims {
            out = out.checked_mul(gflin::gl_order(self.p as u64, d))?;
        }
        Some(out)
    }

    /// A generating set: per acting vertex, all transvections
    /// `I + c E_(jk)` (`j != k`, `c` nonzero), plus — for `p > 2` — the
    /// diagonal `diag(r, 1, ..., 1)` with `r` a primitive root, to reach
    /// determinants outside `SL`.
    pub fn generators(&self) -> Vec<GroupElement> {
        let mut out = Vec::new();
        for (v, &d) in self.dims.iter().enumerate() {
            let mut local: Vec<GfMatrix> = Vec::new();
            for j in 0..d {
                for k in 0..d {
                    if j == k {
                        continue;
                    }
                    for c in 1..self.p {
                        let mut m = GfMatrix::identity(self.p, d);
                        m.set(j, k, c);
                        local.push(m);
                    }
                }
            }
            if self.p > 2 && d >= 1 {
                let mut m = GfMatrix::identity(self.p, d);
                m.set(0, 0, primitive_root(self.p));
                local.push(m);
            }
            for m in local {
                let inv = m.inverse().expect("generator invertible");
                let mut mats: Vec<GfMatrix> = self
                    .dims
                    .iter()
                    .map(|&dd| GfMatrix::identity(self.p, dd))
                    .collect();
                let mut invs = mats.clone();
                mats[v] = m;
                invs[v] = inv;
                out.push(GroupElement { mats, invs });
            }
        }
        out
    }

    /// Full element-by-element enumeration.  The group is materialized as
    /// a set, so this is capped at [`limits::MAX_GROUP_ORDER`]; callers
    /// that sweep every element against every point (the orbit-table
    /// cross-check) apply the stricter [`limits::MAX_GROUP_SWEEP`]
    /// threshold themselves.
    pub fn elements(&self) -> Result<Vec<GroupElement>> {
        let order = self
            .order_checked()
            .ok_or_else(|| Error::scale("group order", u128::MAX, limits::MAX_GROUP_ORDER))?;
        if order > limits::MAX_GROUP_ORDER {
            return Err(Error::scale("group enumeration", order, limits::MAX_GROUP_ORDER));
        }
        let per_vertex: Vec<Vec<GfMatrix>> = self
            .dims
            .iter()
            .map(|&d| gflin::invertible_matrices(self.p, d))
            .collect::<Result<_>>()?;
        let mut out = Vec::with_capacity(order as usize);
        let mut choice = vec![0usize; per_vertex.len()];
        loop {
            let mats: Vec<GfMatrix> = choice
                .iter()
                .zip(&per_vertex)
                .map(|(&i, opts)| opts[i].clone())
                .collect();
            let invs: Vec<GfMatrix> = mats
                .iter()
                .map(|m| m.inverse().expect("invertible"))
                .collect();
            out.push(GroupElement { mats, invs });
            let mut i = per_vertex.len();
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                choice[i] += 1;
                if choice[i] < per_vertex[i].len() {
                    break;
                }
                choice[i] = 0;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Orbit tables
// ---------------------------------------------------------------------------

/// One isomorphism class: canonical representative (the lexicographically
/// least point of the orbit), orbit size, and automorphism group order.
#[derive(Clone, Debug)]
pub struct IsoClass {
    pub rep: Vec<u8>,
    pub orbit_size: u128,
    pub aut_order: u128,
}

/// Complete classification of a representation space into isomorphism
/// classes, with a dense point -> class lookup.
#[derive(Debug)]
pub struct OrbitTable {
    space: RepSpace,
    classes: Vec<IsoClass>,
    class_of: Vec<u32>,
    group_order: u128,
}

impl OrbitTable {
    /// Enumerate the space and classify every point.
    ///
    /// Orbits are found by breadth first search over group generators,
    /// seeded at the lexicographically least unvisited point (which is
    /// therefore the canonical representative).  Two invariants are
    /// asserted unconditionally: orbit sizes divide the group order, and
    /// they sum to the number of points.  When the group order is at most
    /// [`limits::MAX_GROUP_SWEEP`] the whole group is additionally swept
    /// element by element for every class, re-deriving the orbit and the
    /// stabilizer order independently of the BFS.
    pub fn build(space: RepSpace) -> Result<OrbitTable> {
        let group = space.group();
        // The BFS only applies generators, so the group itself may be huge;
        // all that is required is that its order (used for automorphism
        // counts) stays representable.
        let group_order = group
            .order_checked()
            .ok_or_else(|| Error::scale("group order", u128::MAX, u128::MAX))?;
        let n_points = space.point_count() as usize;
        let generators = group.generators();

        let mut class_of = vec![u32::MAX; n_points];
        let mut classes: Vec<IsoClass> = Vec::new();
        let mut queue: Vec<Vec<u8>> = Vec::new();

        space.for_each_point(|seed| {
            let seed_idx = space.point_index(seed);
            if class_of[seed_idx] != u32::MAX {
                return;
            }
            let class_idx = classes.len() as u32;
            let mut orbit_size = 0u128;
            class_of[seed_idx] = class_idx;
            queue.clear();
            queue.push(seed.to_vec());
            while let Some(x) = queue.pop() {
                orbit_size += 1;
                for g in &generators {
                    let y = space.act(&g.mats, &g.invs, &x);
                    let yi = space.point_index(&y);
                    if class_of[yi] == u32::MAX {
                        class_of[yi] = class_idx;
                        queue.push(y);
                    } else {
                        debug_assert_eq!(class_of[yi], class_idx);
                    }
                }
            }
            assert_eq!(
                group_order % orbit_size,
                0,
                "orbit size must divide the group order"
            );
            classes.push(IsoClass {
                rep: seed.to_vec(),
                orbit_size,
                aut_order: group_order / orbit_size,
            });
        });

        let total: u128 = classes.iter().map(|c| c.orbit_size).sum();
        assert_eq!(total, space.point_count(), "orbits must partition the space");

        let table = OrbitTable {
            space,
            classes,
            class_of,
            group_order,
        };

        if group_order <= limits::MAX_GROUP_SWEEP {
            table.sweep_check()?;
        }
        Ok(table)
    }

    /// Independent verification pass: enumerate the full group, recompute
    /// each orbit and stabilizer by brute force, and compare with the BFS
    /// results.
    fn sweep_check(&self) -> Result<()> {
        let elements = self.space.group().elements()?;
        assert_eq!(elements.len() as u128, self.group_order);
        for (ci, class) in self.classes.iter().enumerate() {
            let mut orbit: Vec<usize> = Vec::new();
            let mut stab = 0u128;
            for g in &elements {
                let y = self.space.act(&g.mats, &g.invs, &class.rep);
                if y == class.rep {
                    stab += 1;
                }
                orbit.push(self.space.point_index(&y));
            }
            orbit.sort_unstable();
            orbit.dedup();
            assert_eq!(
                orbit.len() as u128,
                class.orbit_size,
                "sweep orbit size disagrees with BFS for class {ci}"
            );
            assert_eq!(
                stab, class.aut_order,
                "stabilizer order disagrees with counting for class {ci}"
            );
            // The canonical representative is the least point of its orbit.
            assert_eq!(orbit[0], self.space.point_index(&class.rep));
            for &pt in &orbit {
                assert_eq!(self.class_of[pt], ci as u32);
            }
        }
        Ok(())
    }

    pub fn space(&self) -> &RepSpace {
        &self.space
    }
    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }
    pub fn classes(&self) -> &[IsoClass] {
        &self.classes
    }
    pub fn class(&self, i: u32) -> &IsoClass {
        &self.classes[i as usize]
    }
    pub fn group_order(&self) -> u128 {
        self.group_order
    }

    /// The class index of a point.
    pub fn classify_point(&self, x: &[u8]) -> u32 {
        self.class_of[self.space.point_index(x)]
    }

    /// The class id of a point.
    pub fn class_id_of(&self, x: &[u8]) -> ClassId {
        ClassId::new(self.space.dims().to_vec(), self.classify_point(x))
    }
}

// ---------------------------------------------------------------------------
// Session: memoized tables and Hall numbers
// ---------------------------------------------------------------------------

/// Per-`gamma`-class table of subobject counts: for each class of the
/// ambient dimension vector, how many stable graded subspaces have a given
/// (quotient class, subobject class) pair.
pub type SubquotCounts = Vec<HashMap<(u32, u32), u64>>;

/// Session statistics (cache behaviour; used by tests and the CLI).
#[derive(Clone, Debug, Default)]
pub struct SessionStats {
    pub tables_built: u64,
    pub tables_from_memory: u64,
    pub tables_from_disk: u64,
}

/// A computation session over a fixed prime: one coefficient field plus
/// memoized orbit tables and subquotient count tables, optionally backed
/// by a persistent on-disk cache.
pub struct Session {
    field: Field,
    tables: RefCell<HashMap<(String, Vec<usize>), Rc<OrbitTable>>>,
    subquot: RefCell<HashMap<(String, Vec<usize>, Vec<usize>), Rc<SubquotCounts>>>,
    cache_dir: Option<PathBuf>,
    stats: RefCell<SessionStats>,
}

impl Session {
    pub fn new(p: u64) -> Result<Session> {
        Ok(Session {
            field: Field::new(p)?,
            tables: RefCell::new(HashMap::new()),
            subquot: RefCell::new(HashMap::new()),
            cache_dir: None,
            stats: RefCell::new(SessionStats::default()),
        })
    }

    /// A session whose orbit tables are persisted under `dir`.
    pub fn with_cache_dir(p: u64, dir: impl Into<PathBuf>) -> Result<Session> {
        let mut s = Session::new(p)?;
        s.cache_dir = Some(dir.into());
        Ok(s)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn stats(&self) -> SessionStats {
        self.stats.borrow().clone()
    }

    /// The orbit table of `quiver` at `dims`, memoized (and persisted when
    /// a cache directory is configured).
    pub fn table(&self, quiver: &Quiver, dims: &[usize]) -> Result<Rc<OrbitTable>> {
        let key = (quiver.hash_hex(), dims.to_vec());
        if let Some(t) = self.tables.borrow().get(&key) {
            self.stats.borrow_mut().tables_from_memory += 1;
            return Ok(t.clone());
        }
        let space = RepSpace::new(quiver, dims, self.p())?;
        let from_disk = if let Some(dir) = &self.cache_dir {
            crate::cache::load_or_build(dir, &space)?
        } else {
            None
        };
        let table = match from_disk {
            Some(t) => {
                self.stats.borrow_mut().tables_from_disk += 1;
                Rc::new(t)
            }
            None => {
                let t = Rc::new(OrbitTable::build(space)?);
                if let Some(dir) = &self.cache_dir {
                    crate::cache::store(dir, &t)?;
                }
                self.stats.borrow_mut().tables_built += 1;
                t
            }
        };
        self.tables.borrow_mut().insert(key, table.clone());
        Ok(table)
    }

    /// Automorphism count `a_c` of a class.
    pub fn aut_order(&self, quiver: &Quiver, class: &ClassId) -> Result<u128> {
        let t = self.table(quiver, &class.dims)?;
        Ok(t.class(class.index).aut_order)
    }

    /// For every class at `quot_dims + sub_dims`, count stable graded
    /// subspaces by (quotient class, subobject class).  Memoized.
    pub fn subquot_counts(
        &self,
        quiver: &Quiver,
        quot_dims: &[usize],
        sub_dims: &[usize],
    ) -> Result<Rc<SubquotCounts>> {
        let key = (quiver.hash_hex(), quot_dims.to_vec(), sub_dims.to_vec());
        if let Some(t) = self.subquot.borrow().get(&key) {
            return Ok(t.clone());
        }
        let ambient_dims = crate::quiver::dims_add(quot_dims, sub_dims);
        let ambient = self.table(quiver, &ambient_dims)?;
        let sub_table = self.table(quiver, sub_dims)?;
        let quot_table = self.table(quiver, quot_dims)?;
        let sub_space = RepSpace::new(quiver, sub_dims, self.p())?;
        let quot_space = RepSpace::new(quiver, quot_dims, self.p())?;

        let mut counts: SubquotCounts = vec![HashMap::new(); ambient.n_classes()];
        let reps: Vec<(usize, Vec<u8>)> = ambient
            .classes()
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.rep.clone()))
            .collect();
        ambient.space().for_each_graded_subspace(sub_dims, |bases| {
            let splitter = ambient.space().splitter(bases);
            for (ci, rep) in &reps {
                if let Some((sub_pt, quot_pt)) = splitter.split_with(&sub_space, &quot_space, rep)
                {
                    let sc = sub_table.classify_point(&sub_pt);
                    let qc = quot_table.classify_point(&quot_pt);
                    *counts[*ci].entry((qc, sc)).or_insert(0) += 1;
                }
            }
        });
        let rc = Rc::new(counts);
        self.subquot.borrow_mut().insert(key, rc.clone());
        Ok(rc)
    }

    /// The Hall number `g^gamma_(alpha, beta)`: the number of subobjects
    /// of (the canonical representative of) `gamma` isomorphic to `beta`
    /// whose quotient is isomorphic to `alpha`.
    pub fn hall_number(
        &self,
        quiver: &Quiver,
        gamma: &ClassId,
        alpha: &ClassId,
        beta: &ClassId,
    ) -> Result<u64> {
        if crate::quiver::dims_add(&alpha.dims, &beta.dims) != gamma.dims {
            return Ok(0);
        }
        let counts = self.subquot_counts(quiver, &alpha.dims, &beta.dims)?;
        Ok(*counts[gamma.index as usize]
            .get(&(alpha.index, beta.index))
            .unwrap_or(&0))
    }

    /// Independent Hall-number route: count intertwining graded
    /// monomorphisms from the canonical representative of `beta` into the
    /// one of `gamma` whose cokernel is isomorphic to `alpha`, and divide
    /// by `a_beta` (each subobject is hit by exactly `a_beta` monos).
    pub fn hall_number_via_monos(
        &self,
        quiver: &Quiver,
        gamma: &ClassId,
        alpha: &ClassId,
        beta: &ClassId,
    ) -> Result<u64> {
        if crate::quiver::dims_add(&alpha.dims, &beta.dims) != gamma.dims {
            return Ok(0);
        }
        let gamma_table = self.table(quiver, &gamma.dims)?;
        let beta_table = self.table(quiver, &beta.dims)?;
        let quot_table = self.table(quiver, &alpha.dims)?;
        let gamma_rep = gamma_table.class(gamma.index).rep.clone();
        let beta_rep = beta_table.class(beta.index).rep.clone();
        let gamma_space = gamma_table.space();
        let beta_space = beta_table.space();
        let quot_space = RepSpace::new(quiver, &alpha.dims, self.p())?;
        let sub_space = RepSpace::new(quiver, &beta.dims, self.p())?;

        // Enumerate per-vertex injective matrices.
        let options: Vec<Vec<GfMatrix>> = (0..quiver.n_vertices())
            .map(|v| gflin::injective_matrices(self.p() as u8, gamma.dims[v], beta.dims[v]))
            .collect::<Result<_>>()?;
        let mut count = 0u64;
        let mut choice = vec![0usize; options.len()];
        'outer: loop {
            let ys: Vec<&GfMatrix> = choice.iter().zip(&options).map(|(&i, o)| &o[i]).collect();
            // Intertwining: x_gamma . y_src = y_tgt . x_beta at every arrow.
            let mut ok = true;
            for (h, arrow) in quiver.arrows().iter().enumerate() {
                let lhs = gamma_space.arrow_matrix(&gamma_rep, h).mul(ys[arrow.src]);
                let rhs = ys[arrow.tgt].mul(&beta_space.arrow_matrix(&beta_rep, h));
                if lhs != rhs {
                    ok = false;
                    break;
                }
            }
            if ok {
                let bases: Vec<GfMatrix> = ys.iter().map(|m| (*m).clone()).collect();
                let splitter = gamma_space.splitter(&bases);
                let (sub_pt, quot_pt) = splitter
                    .split_with(&sub_space, &quot_space, &gamma_rep)
                    .expect("image of an intertwiner is stable");
                debug_assert_eq!(beta_table.classify_point(&sub_pt), beta.index);
                if quot_table.classify_point(&quot_pt) == alpha.index {
                    count += 1;
                }
            }
            let mut i = options.len();
            loop {
                if i == 0 {
                    break 'outer;
                }
                i -= 1;
                choice[i] += 1;
                if choice[i] < options[i].len() {
                    break;
                }
                choice[i] = 0;
            }
        }
        let a_beta = beta_table.class(beta.index).aut_order as u64;
        assert_eq!(count % a_beta, 0, "mono count must be divisible by a_beta");
        Ok(count / a_beta)
    }

    /// All class ids at a dimension vector.
    pub fn class_ids(&self, quiver: &Quiver, dims: &[usize]) -> Result<Vec<ClassId>> {
        let t = self.table(quiver, dims)?;
        Ok((0..t.n_classes() as u32)
            .map(|i| ClassId::new(dims.to_vec(), i))
            .collect())
    }
}
