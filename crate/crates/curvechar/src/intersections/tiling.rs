//! The ideal-quadrilateral tessellation of the universal cover.
//!
//! The once-punctured torus has an ideal quadrilateral fundamental domain Q
//! whose vertices are the cusp points {κ, a⁻¹κ, b⁻¹a⁻¹κ, b⁻¹κ}, where κ is
//! the fixed point of the parabolic commutator K = aba⁻¹b⁻¹.  Side pairings
//! are discovered from the matrices at construction and the quadrilateral is
//! verified (distinct vertices in circular order, paired sides, images landing
//! in the correct complementary arc), so every later walk runs on a certified
//! tessellation.
//!
//! A geodesic that avoids the vertex set crosses a bi-infinite sequence of
//! tiles, consecutive tiles sharing the crossed edge.  For the axis of w the
//! sequence is periodic under w, so one period of tiles determines every
//! double coset ⟨w⟩g⟨w⟩ whose translate of the axis can cross it.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::backend::{orient3, parabolic_fix, BoundaryPoint, GMat, Kernel};
use super::IntersectError;
use crate::words::{parse_word, Letter, Word};

/// Safety cap on tile walks; genuine walks are short (a handful of tiles per
/// word letter), so hitting the cap signals a logic or precision failure.
const WALK_CAP: usize = 100_000;

/// A tile g·Q of the tessellation.
#[derive(Clone)]
pub(crate) struct Tile {
    pub word: Word,
    pub mat: GMat,
    pub verts: [BoundaryPoint; 4],
}

pub(crate) struct Tiling<'k> {
    kernel: &'k Kernel,
    base_verts: [BoundaryPoint; 4],
    /// Generator letter l such that the neighbor across side i (between
    /// vertices i and i+1) of tile g·Q is the tile (g·l)·Q.
    neighbor: [Letter; 4],
}

/// Whether the reduced word is a power of K = aba⁻¹b⁻¹ (including K⁰), i.e.
/// fixes the cusp point κ.
fn is_commutator_power(w: &Word, k: &Word) -> bool {
    if w.is_empty() {
        return true;
    }
    if w.len() % 4 != 0 {
        return false;
    }
    let m = (w.len() / 4) as i64;
    *w == k.pow(m) || *w == k.pow(-m)
}

impl<'k> Tiling<'k> {
    /// Builds and verifies the tessellation.  `Ok(None)` means the interval
    /// precision was insufficient; `Err` means the structure failed
    /// verification outright.
    pub fn build(kernel: &'k Kernel) -> Result<Option<Tiling<'k>>, IntersectError> {
        let k_word = parse_word("abAB", 2).expect("fixed word");
        let mk = kernel.word_mat(&k_word);
        // The commutator has trace −2 on every cusped structure (checked at
        // structure construction), so its eigenvalue is −1.
        let minus_one = BigRational::from(BigInt::from(-1));
        let Some(kappa) = parabolic_fix(&mk, &minus_one) else {
            return Ok(None);
        };

        let vertex_words: [Word; 4] = ["", "A", "BA", "B"]
            .map(|s| parse_word(s, 2).expect("fixed word"));
        let raw_pts: Vec<BoundaryPoint> = vertex_words
            .iter()
            .map(|w| kernel.word_mat(w).apply(&kappa))
            .collect();

        // Discover the counterclockwise circular order, anchored at vertex 0.
        let mut order: Option<[usize; 4]> = None;
        let mut undecided = false;
        for perm in [[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]] {
            let idx = [0, perm[0], perm[1], perm[2]];
            let mut ok = true;
            for i in 0..4 {
                let o = orient3(
                    &raw_pts[idx[i]],
                    &raw_pts[idx[(i + 1) % 4]],
                    &raw_pts[idx[(i + 2) % 4]],
                );
                match o {
                    Some(1) => {}
                    Some(_) => {
                        ok = false;
                        break;
                    }
                    None => {
                        ok = false;
                        undecided = true;
                        break;
                    }
                }
            }
            if ok {
                order = Some(idx);
                break;
            }
        }
        let Some(order) = order else {
            if undecided {
                return Ok(None);
            }
            return Err(IntersectError::InvalidStructure(
                "cusp vertices are not in convex position".into(),
            ));
        };
        let ordered_words: [Word; 4] = order.map(|i| vertex_words[i].clone());
        let base_verts: [BoundaryPoint; 4] = order.map(|i| raw_pts[i].clone());

        // Discover side pairings: each generator letter identifies exactly two
        // vertex cusps with two vertex cusps (mod ⟨K⟩); those two targets span
        // the side whose neighboring tile is that letter.
        let mut neighbor: [Option<Letter>; 4] = [None; 4];
        for code in ["a", "A", "b", "B"] {
            let lw = parse_word(code, 2).expect("fixed word");
            let l = lw.letters()[0];
            let mut matches: Vec<(usize, usize)> = Vec::new(); // (source, target)
            for (src, u) in ordered_words.iter().enumerate() {
                let image = lw.concat(u);
                for (tgt, v) in ordered_words.iter().enumerate() {
                    if is_commutator_power(&v.invert().concat(&image), &k_word) {
                        matches.push((src, tgt));
                    }
                }
            }
            if matches.len() != 2 {
                return Err(IntersectError::InvalidStructure(format!(
                    "generator {code} identifies {} cusp vertices, expected 2",
                    matches.len()
                )));
            }
            let targets = [matches[0].1, matches[1].1];
            let side = match (targets[0].min(targets[1]), targets[0].max(targets[1])) {
                (0, 1) => 0,
                (1, 2) => 1,
                (2, 3) => 2,
                (0, 3) => 3,
                _ => {
                    return Err(IntersectError::InvalidStructure(format!(
                        "generator {code} pairs non-adjacent cusp vertices"
                    )))
                }
            };
            // The two vertices not sent onto the target side must land
            // strictly inside its complementary arc.
            let sources = [matches[0].0, matches[1].0];
            let mat = kernel.word_mat(&lw);
            for (src, pt) in raw_pts.iter().enumerate() {
                let src_ord = order.iter().position(|&i| i == src).expect("permutation");
                if sources.contains(&src_ord) {
                    continue;
                }
                let image = mat.apply(pt);
                match orient3(&base_verts[side], &image, &base_verts[(side + 1) % 4]) {
                    Some(1) => {}
                    Some(_) => {
                        return Err(IntersectError::InvalidStructure(format!(
                            "image of a cusp vertex under {code} misses the paired arc"
                        )))
                    }
                    None => return Ok(None),
                }
            }
            if neighbor[side].is_some() {
                return Err(IntersectError::InvalidStructure(format!(
                    "two generators pair the same side (second: {code})"
                )));
            }
            neighbor[side] = Some(l);
        }
        let neighbor = [
            neighbor[0].expect("all sides paired"),
            neighbor[1].expect("all sides paired"),
            neighbor[2].expect("all sides paired"),
            neighbor[3].expect("all sides paired"),
        ];

        Ok(Some(Tiling {
            kernel,
            base_verts,
            neighbor,
        }))
    }

    pub fn base_tile(&self) -> Tile {
        Tile {
            word: Word::identity(2),
            mat: self.kernel.identity(),
            verts: self.base_verts.clone(),
        }
    }

    /// The neighboring tile across side `side` of `t`.  Möbius maps preserve
    /// circular order, so vertex/side indices of every tile agree with the
    /// base tile's.
    pub fn step(&self, t: &Tile, side: usize) -> Tile {
        let l = self.neighbor[side];
        let word = t.word.concat(&Word::new([l], 2));
        let mat = t.mat.mul(self.kernel.letter_mat(l));
        let verts = [
            mat.apply(&self.base_verts[0]),
            mat.apply(&self.base_verts[1]),
            mat.apply(&self.base_verts[2]),
            mat.apply(&self.base_verts[3]),
        ];
        Tile { word, mat, verts }
    }

    /// The unique side index i with p strictly inside the open arc from
    /// vertex i counterclockwise to vertex i+1.  `None` if undecided at the
    /// current precision.
    pub fn gap_of(&self, t: &Tile, p: &BoundaryPoint) -> Option<usize> {
        let mut found = None;
        for i in 0..4 {
            match orient3(&t.verts[i], p, &t.verts[(i + 1) % 4])? {
                1 => {
                    if found.is_some() {
                        return None;
                    }
                    found = Some(i);
                }
                _ => {}
            }
        }
        found
    }

    /// A tile crossed by the geodesic with endpoints p, q: walk from the base
    /// tile toward the chord until the endpoints separate.
    pub fn locate(&self, p: &BoundaryPoint, q: &BoundaryPoint) -> Option<Tile> {
        let mut t = self.base_tile();
        for _ in 0..WALK_CAP {
            let gp = self.gap_of(&t, p)?;
            let gq = self.gap_of(&t, q)?;
            if gp != gq {
                return Some(t);
            }
            t = self.step(&t, gp);
        }
        None
    }

    /// One period of the tiles crossed by the axis of `w` (attracting
    /// endpoint `q`), starting from the crossed tile `start`: the walk
    /// advances through the side facing q until it reaches the w-translate of
    /// the start.
    pub fn axis_tiles(&self, start: Tile, q: &BoundaryPoint, w: &Word) -> Option<Vec<Tile>> {
        let forward = w.concat(&start.word);
        let backward = w.invert().concat(&start.word);
        let mut tiles = vec![start];
        for _ in 0..WALK_CAP {
            let cur = tiles.last().expect("nonempty");
            let gq = self.gap_of(cur, q)?;
            let next = self.step(cur, gq);
            if next.word == forward || next.word == backward {
                return Some(tiles);
            }
            tiles.push(next);
        }
        None
    }
}
