//! Quivers, framings, orientation bookkeeping, and bilinear forms.
//!
//! A quiver here carries three extra pieces of structure on top of its
//! vertices and arrows:
//!
//! * a count `n_acting` of *acting* vertices — the base-change group of a
//!   representation space is the product of `GL(d_i)` over these vertices
//!   only.  Framing vertices added by [`Quiver::framed`] are not acted on.
//! * a fixed *reference orientation* per arrow slot.  Orientation-changing
//!   transforms flip arrows relative to this reference, and the sign
//!   convention of the Fourier kernel depends on which side of the
//!   reference an arrow currently sits on.
//! * stable arrow order, so points of representation spaces serialize
//!   deterministically.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// One arrow `src -> tgt` (vertex indices).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arrow {
    pub src: usize,
    pub tgt: usize,
}

impl Arrow {
    pub fn new(src: usize, tgt: usize) -> Arrow {
        Arrow { src, tgt }
    }

    /// The same edge with the opposite direction.
    pub fn reversed(self) -> Arrow {
        Arrow {
            src: self.tgt,
            tgt: self.src,
        }
    }
}

/// A finite quiver with acting/framing vertex split and per-arrow
/// reference orientations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    vertex_names: Vec<String>,
    n_acting: usize,
    arrows: Vec<Arrow>,
    reference: Vec<Arrow>,
}

impl Quiver {
    /// A plain quiver: every vertex acting, reference = current orientation.
    pub fn new(vertex_names: Vec<String>, arrows: Vec<(usize, usize)>) -> Result<Quiver> {
        let n = vertex_names.len();
        let arrows: Vec<Arrow> = arrows.iter().map(|&(s, t)| Arrow::new(s, t)).collect();
        for a in &arrows {
            if a.src >= n || a.tgt >= n {
                return Err(Error::InvalidInput(format!(
                    "arrow {} -> {} out of range for {} vertices",
                    a.src, a.tgt, n
                )));
            }
            if a.src == a.tgt {
                return Err(Error::InvalidInput(format!("loop at vertex {}", a.src)));
            }
        }
        Ok(Quiver {
            vertex_names,
            n_acting: n,
            arrows: arrows.clone(),
            reference: arrows,
        })
    }

    /// The one-vertex quiver with no arrows.
    pub fn a1() -> Quiver {
        Quiver::new(vec!["1".into()], vec![]).unwrap()
    }

    /// The two-vertex quiver with a single arrow `1 -> 2`.
    pub fn a2() -> Quiver {
        Quiver::new(vec!["1".into(), "2".into()], vec![(0, 1)]).unwrap()
    }

    /// The two-vertex quiver with a double arrow `1 => 2`.
    pub fn kronecker() -> Quiver {
        Quiver::new(vec!["1".into(), "2".into()], vec![(0, 1), (0, 1)]).unwrap()
    }

    /// Look up a preset by name.
    pub fn preset(name: &str) -> Result<Quiver> {
        match name {
            "a1" => Ok(Quiver::a1()),
            "a2" => Ok(Quiver::a2()),
            "kronecker" => Ok(Quiver::kronecker()),
            other => Err(Error::InvalidInput(format!("unknown quiver preset: {other}"))),
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.vertex_names.len()
    }

    /// Number of acting vertices (the group is `prod GL(d_i)` over these).
    pub fn n_acting(&self) -> usize {
        self.n_acting
    }

    pub fn is_acting(&self, v: usize) -> bool {
        v < self.n_acting
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertex_names[v]
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn reference(&self) -> &[Arrow] {
        &self.reference
    }

    /// True iff arrow slot `h` currently points in its reference direction.
    pub fn in_reference_direction(&self, h: usize) -> bool {
        self.arrows[h] == self.reference[h]
    }

    /// Attach one framing vertex per acting vertex.
    ///
    /// The framing vertex of acting vertex `i` is index `n + i` with name
    /// `"<name>^"`.  Base arrows keep their slots; framing arrows follow,
    /// one per acting vertex, pointing `i -> i^` when `towards_frame` is
    /// true and `i^ -> i` otherwise.  The group still acts only through
    /// the original vertices.
    pub fn framed(&self, towards_frame: bool) -> Quiver {
        assert_eq!(
            self.n_acting,
            self.n_vertices(),
            "refusing to frame an already framed quiver"
        );
        let n = self.n_vertices();
        let mut names = self.vertex_names.clone();
        for i in 0..n {
            names.push(format!("{}^", self.vertex_names[i]));
        }
        let mut arrows = self.arrows.clone();
        for i in 0..n {
            let a = if towards_frame {
                Arrow::new(i, n + i)
            } else {
                Arrow::new(n + i, i)
            };
            arrows.push(a);
        }
        Quiver {
            vertex_names: names,
            n_acting: n,
            arrows: arrows.clone(),
            reference: arrows,
        }
    }

    /// Flip the arrows at the given slots (reference orientations stay).
    pub fn reorient(&self, flip: &[usize]) -> Quiver {
        let mut q = self.clone();
        for &h in flip {
            q.arrows[h] = q.arrows[h].reversed();
        }
        q
    }

    /// The orientation in which vertex `i` is a source: every arrow
    /// currently pointing into `i` is flipped.
    pub fn source_orientation(&self, i: usize) -> Quiver {
        let flips: Vec<usize> = (0..self.arrows.len())
            .filter(|&h| self.arrows[h].tgt == i)
            .collect();
        self.reorient(&flips)
    }

    /// True iff the two quivers differ only in arrow directions (same
    /// vertices, acting split, and reference orientations).
    pub fn same_underlying(&self, other: &Quiver) -> bool {
        self.vertex_names == other.vertex_names
            && self.n_acting == other.n_acting
            && self.reference == other.reference
            && self
                .arrows
                .iter()
                .zip(&other.arrows)
                .all(|(a, b)| a == b || *a == b.reversed())
    }

    /// Arrow slots where the orientations of `self` and `other` differ.
    pub fn flipped_against(&self, other: &Quiver) -> Result<Vec<usize>> {
        if !self.same_underlying(other) {
            return Err(Error::Incompatible(
                "quivers do not share an underlying graph".into(),
            ));
        }
        Ok((0..self.arrows.len())
            .filter(|&h| self.arrows[h] != other.arrows[h])
            .collect())
    }

    /// The Euler form of the current orientation:
    /// `<a, b> = sum_v a_v b_v - sum_h a_src(h) b_tgt(h)`.
    pub fn euler_form(&self, a: &[i64], b: &[i64]) -> i64 {
        assert_eq!(a.len(), self.n_vertices());
        assert_eq!(b.len(), self.n_vertices());
        let mut out = 0i64;
        for v in 0..self.n_vertices() {
            out += a[v] * b[v];
        }
        for h in &self.arrows {
            out -= a[h.src] * b[h.tgt];
        }
        out
    }

    /// The symmetrized Euler form `(a, b) = <a, b> + <b, a>`; independent
    /// of orientation.
    pub fn symmetric_form(&self, a: &[i64], b: &[i64]) -> i64 {
        self.euler_form(a, b) + self.euler_form(b, a)
    }

    /// The induction-normalization exponent
    /// `m(a, b) = sum_h a_src(h) b_tgt(h) + sum_v a_v b_v`.
    pub fn m_factor(&self, a: &[i64], b: &[i64]) -> i64 {
        assert_eq!(a.len(), self.n_vertices());
        assert_eq!(b.len(), self.n_vertices());
        let mut out = 0i64;
        for v in 0..self.n_vertices() {
            out += a[v] * b[v];
        }
        for h in &self.arrows {
            out += a[h.src] * b[h.tgt];
        }
        out
    }

    /// Canonical JSON describing the full structure (used for hashing and
    /// the persistent cache).
    pub fn canonical_json(&self) -> serde_json::Value {
        serde_json::json!({
            "vertices": self.vertex_names,
            "acting": self.n_acting,
            "arrows": self.arrows.iter().map(|a| vec![a.src, a.tgt]).collect::<Vec<_>>(),
            "reference": self.reference.iter().map(|a| vec![a.src, a.tgt]).collect::<Vec<_>>(),
        })
    }

    /// Hex SHA-256 of the canonical JSON; keys cache entries.
    pub fn hash_hex(&self) -> String {
        let json = serde_json::to_vec(&self.canonical_json()).expect("serializable");
        let mut hasher = Sha256::new();
        hasher.update(&json);
        let digest = hasher.finalize();
        let mut out = String::with_capacity(64);
        for b in digest {
            out.push_str(&format!("{b:02x}"));
        }
        out
    }

    /// Parse the full canonical form produced by
    /// [`Quiver::canonical_json`], including the acting split and the
    /// reference orientations.
    pub fn from_canonical_json(value: &serde_json::Value) -> Result<Quiver> {
        let bad = |what: &str| Error::InvalidInput(format!("canonical quiver json: {what}"));
        let names: Vec<String> = value
            .get("vertices")
            .and_then(|x| serde_json::from_value(x.clone()).ok())
            .ok_or_else(|| bad("missing vertices"))?;
        let n_acting = value
            .get("acting")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| bad("missing acting count"))? as usize;
        let parse_arrows = |key: &str| -> Result<Vec<Arrow>> {
            let pairs: Vec<(usize, usize)> = value
                .get(key)
                .and_then(|x| serde_json::from_value(x.clone()).ok())
                .ok_or_else(|| bad("missing arrow list"))?;
            Ok(pairs.iter().map(|&(s, t)| Arrow::new(s, t)).collect())
        };
        let arrows = parse_arrows("arrows")?;
        let reference = parse_arrows("reference")?;
        if n_acting > names.len() || arrows.len() != reference.len() {
            return Err(bad("inconsistent sizes"));
        }
        for a in arrows.iter().chain(&reference) {
            if a.src >= names.len() || a.tgt >= names.len() || a.src == a.tgt {
                return Err(bad("arrow out of range"));
            }
        }
        Ok(Quiver {
            vertex_names: names,
            n_acting,
            arrows,
            reference,
        })
    }

    /// Parse the user-facing JSON form
    /// `{"vertices": ["1", "2"], "arrows": [[0, 1]]}` (all vertices acting,
    /// reference = given orientation).
    pub fn from_json(value: &serde_json::Value) -> Result<Quiver> {
        let names: Vec<String> = value
            .get("vertices")
            .and_then(|x| serde_json::from_value(x.clone()).ok())
            .ok_or_else(|| Error::InvalidInput("quiver json needs a \"vertices\" array of names".into()))?;
        let arrows: Vec<(usize, usize)> = value
            .get("arrows")
            .and_then(|x| serde_json::from_value(x.clone()).ok())
            .ok_or_else(|| Error::InvalidInput("quiver json needs an \"arrows\" array of [src, tgt] pairs".into()))?;
        Quiver::new(names, arrows)
    }
}

/// Widen a dimension vector to signed entries.
pub fn to_i64(dims: &[usize]) -> Vec<i64> {
    dims.iter().map(|&d| d as i64).collect()
}

/// Sum of the entries of a dimension vector.
pub fn dim_total(dims: &[usize]) -> usize {
    dims.iter().sum()
}

/// Componentwise sum of two dimension vectors.
pub fn dims_add(a: &[usize], b: &[usize]) -> Vec<usize> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Componentwise difference `a - b`, or `None` if any entry would go
/// negative.
pub fn dims_sub(a: &[usize], b: &[usize]) -> Option<Vec<usize>> {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| x.checked_sub(*y))
        .collect()
}

/// Pad a base dimension vector with zeros up to `n` entries.
pub fn dims_pad(base: &[usize], n: usize) -> Vec<usize> {
    assert!(base.len() <= n);
    let mut out = base.to_vec();
    out.resize(n, 0);
    out
}

/// Render a dimension vector as `d1,d2,...`.
pub fn dims_label(dims: &[usize]) -> String {
    dims.iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_forms() {
        let a1 = Quiver::a1();
        assert_eq!(a1.euler_form(&[1], &[1]), 1);
        assert_eq!(a1.symmetric_form(&[1], &[1]), 2);

        let a2 = Quiver::a2();
        let e0 = [1, 0];
        let e1 = [0, 1];
        assert_eq!(a2.euler_form(&e0, &e1), -1);
        assert_eq!(a2.euler_form(&e1, &e0), 0);
        assert_eq!(a2.symmetric_form(&e0, &e1), -1);
        assert_eq!(a2.symmetric_form(&e0, &e0), 2);

        let k = Quiver::kronecker();
        assert_eq!(k.symmetric_form(&[1, 0], &[0, 1]), -2);
    }

    #[test]
    fn reorientation_preserves_symmetric_form() {
        let a2 = Quiver::a2();
        let flipped = a2.reorient(&[0]);
        assert_eq!(flipped.arrows()[0], Arrow::new(1, 0));
        assert!(!flipped.in_reference_direction(0));
        for a in [[1i64, 0], [0, 1], [2, 3]] {
            for b in [[1i64, 0], [0, 1], [1, 1]] {
                assert_eq!(a2.symmetric_form(&a, &b), flipped.symmetric_form(&a, &b));
            }
        }
        // Euler form itself does change.
        assert_ne!(
            a2.euler_form(&[1, 0], &[0, 1]),
            flipped.euler_form(&[1, 0], &[0, 1])
        );
    }

    #[test]
    fn framing_structure() {
        let q = Quiver::a2().framed(true);
        assert_eq!(q.n_vertices(), 4);
        assert_eq!(q.n_acting(), 2);
        assert_eq!(q.vertex_name(2), "1^");
        assert_eq!(q.vertex_name(3), "2^");
        assert_eq!(q.arrows().len(), 3);
        assert_eq!(q.arrows()[0], Arrow::new(0, 1));
        assert_eq!(q.arrows()[1], Arrow::new(0, 2));
        assert_eq!(q.arrows()[2], Arrow::new(1, 3));
        assert!(!q.is_acting(2));

        let qrev = Quiver::a2().framed(false);
        assert_eq!(qrev.arrows()[1], Arrow::new(2, 0));

        // On base-supported vectors the framed Euler form restricts to the
        // base one, whichever way the framing arrows point.
        let base = Quiver::a2();
        for a in [[1i64, 0], [0, 1], [2, 1]] {
            for b in [[1i64, 0], [0, 1], [1, 2]] {
                let af = [a[0], a[1], 0, 0];
                let bf = [b[0], b[1], 0, 0];
                assert_eq!(q.euler_form(&af, &bf), base.euler_form(&a, &b));
                assert_eq!(qrev.euler_form(&af, &bf), base.euler_form(&a, &b));
            }
        }
    }

    #[test]
    fn source_orientation_and_flip_tracking() {
        let q = Quiver::a2().framed(true);
        // Vertex 1 has the incoming base arrow 0 -> 1; making it a source
        // flips exactly that slot.
        let q1 = q.source_orientation(1);
        assert_eq!(q1.arrows()[0], Arrow::new(1, 0));
        assert_eq!(q.flipped_against(&q1).unwrap(), vec![0]);
        assert_eq!(q.flipped_against(&q).unwrap(), Vec::<usize>::new());
        // Vertex 0 is already a source.
        assert_eq!(q.source_orientation(0), q);
        // Unrelated quivers are rejected.
        assert!(Quiver::a1().flipped_against(&q).is_err());
    }

    #[test]
    fn hashing_and_json() {
        let a2 = Quiver::a2();
        let h1 = a2.hash_hex();
        assert_eq!(h1.len(), 64);
        assert_eq!(h1, Quiver::a2().hash_hex());
        assert_ne!(h1, a2.reorient(&[0]).hash_hex());
        assert_ne!(h1, a2.framed(true).hash_hex());

        let parsed = Quiver::from_json(&serde_json::json!({
            "vertices": ["1", "2"],
            "arrows": [[0, 1]],
        }))
        .unwrap();
        assert_eq!(parsed, a2);
        assert!(Quiver::from_json(&serde_json::json!({"vertices": ["1"]})).is_err());
        assert!(Quiver::new(vec!["1".into()], vec![(0, 0)]).is_err());
    }

    #[test]
    fn dim_helpers() {
        assert_eq!(dims_add(&[1, 2], &[3, 4]), vec![4, 6]);
        assert_eq!(dims_sub(&[3, 4], &[1, 2]), Some(vec![2, 2]));
        assert_eq!(dims_sub(&[1, 0], &[0, 1]), None);
        assert_eq!(dims_pad(&[1, 2], 4), vec![1, 2, 0, 0]);
        assert_eq!(dims_label(&[1, 2, 0]), "1,2,0");
        assert_eq!(dim_total(&[1, 2, 3]), 6);
    }
}
