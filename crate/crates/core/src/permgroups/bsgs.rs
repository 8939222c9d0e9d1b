//! Deterministic Schreier–Sims over the point domain.
//!
//! Two tracking modes:
//!
//! * full: elements are sifted as complete permutations and the base grows
//!   on demand;
//! * frame: the base starts with a *determining set* (a point set whose
//!   pointwise stabilizer in the ambient automorphism group is trivial), so
//!   sifting only tracks the images of base points.

use rand::Rng;

use super::perm::Perm;

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Level {
    base: u32,
    /// Indices into the strong generator store.
    gens: Vec<u32>,
    orbit: Vec<u32>,
    parent: Vec<u32>,
    via: Vec<u32>,
    checked_orbit: usize,
    checked_gens: usize,
    cursor: usize,
}

impl Level {
    fn new(n: usize, base: u32) -> Self {
        let mut parent = vec![NONE; n];
        parent[base as usize] = base;
        Level {
            base,
            gens: Vec::new(),
            orbit: vec![base],
            parent,
            via: vec![NONE; n],
            checked_orbit: 0,
            checked_gens: 0,
            cursor: 0,
        }
    }

    fn contains(&self, x: u32) -> bool {
        self.parent[x as usize] != NONE
    }

    /// Next Schreier pair `(orbit index, level-generator index)` not yet checked.
    fn next_pair(&mut self) -> Option<(usize, usize)> {
        loop {
            if self.checked_gens < self.gens.len() {
                if self.cursor < self.checked_orbit {
                    self.cursor += 1;
                    return Some((self.cursor - 1, self.checked_gens));
                }
                self.checked_gens += 1;
                self.cursor = 0;
                continue;
            }
            if self.checked_orbit < self.orbit.len() {
                if self.cursor < self.gens.len() {
                    self.cursor += 1;
                    return Some((self.checked_orbit, self.cursor - 1));
                }
                self.checked_orbit += 1;
                self.cursor = 0;
                continue;
            }
            return None;
        }
    }
}

/// A base and strong generating set for a permutation group on `0..n`.
#[derive(Clone, Debug)]
pub struct Bsgs {
    n: usize,
    store: Vec<Perm>,
    inv: Vec<Perm>,
    levels: Vec<Level>,
    /// Points whose images are followed while sifting.
    tracked: Vec<u32>,
    frame: bool,
}

enum Sift {
    Identity,
    /// Nontrivial residue fixing the first `level` base points; images of tracked points.
    Residue {
        level: usize,
        images: Vec<u32>,
        word: Vec<(usize, u32)>,
    },
}

impl Bsgs {
    /// Schreier–Sims for the group generated by `gens`. The base starts
    /// with `prefix`. With `frame = Some(f)` the caller guarantees that
    /// only the identity of the ambient group fixes `prefix ∪ f` pointwise.
    pub fn new(n: usize, gens: &[Perm], prefix: &[u32], frame: Option<&[u32]>) -> Self {
        let mut base: Vec<u32> = Vec::new();
        for &b in prefix.iter().chain(frame.unwrap_or(&[])) {
            if !base.contains(&b) {
                base.push(b);
            }
        }
        let is_frame = frame.is_some();
        let tracked = if is_frame { base.clone() } else { (0..n as u32).collect() };
        let mut bs = Bsgs {
            n,
            store: Vec::new(),
            inv: Vec::new(),
            levels: base.iter().map(|&b| Level::new(n, b)).collect(),
            tracked,
            frame: is_frame,
        };
        for g in gens {
            if g.is_identity() {
                continue;
            }
            let moved = bs.levels.iter().position(|lv| g.apply(lv.base) != lv.base);
            let k = match moved {
                Some(k) => k,
                None if is_frame => continue,
                None => {
                    let p = (0..n as u32).find(|&x| g.apply(x) != x).expect("nonidentity");
                    bs.push_level(p);
                    bs.levels.len() - 1
                }
            };
            bs.add_generator(g.clone(), 0, k);
        }
        bs.schreier_sims();
        bs
    }

    fn push_level(&mut self, p: u32) {
        self.levels.push(Level::new(self.n, p));
    }

    fn tracked_pos(&self, level: usize) -> usize {
        if self.frame {
            level
        } else {
            self.levels[level].base as usize
        }
    }

    /// Adds `g` to the generators of levels `from..=to` and extends their orbits.
    fn add_generator(&mut self, g: Perm, from: usize, to: usize) {
        let idx = self.store.len() as u32;
        self.inv.push(g.inverse());
        self.store.push(g);
        for i in from..=to {
            self.levels[i].gens.push(idx);
            self.extend_orbit(i);
        }
    }

    fn extend_orbit(&mut self, i: usize) {
        let lv = &mut self.levels[i];
        let mut k = 0;
        while k < lv.orbit.len() {
            let x = lv.orbit[k];
            for &s in &lv.gens {
                let y = self.store[s as usize].apply(x);
                if lv.parent[y as usize] == NONE {
                    lv.parent[y as usize] = x;
                    lv.via[y as usize] = s;
                    lv.orbit.push(y);
                }
            }
            k += 1;
        }
    }

    /// Generator indices along the Schreier tree path from the base to `x`.
    fn rep_word(&self, i: usize, mut x: u32) -> Vec<u32> {
        let lv = &self.levels[i];
        let mut w = Vec::new();
        while x != lv.base {
            w.push(lv.via[x as usize]);
            x = lv.parent[x as usize];
        }
        w.reverse();
        w
    }

    /// `x^{u_β^{-1}}` for the coset representative `u_β` of level `i`.
    fn apply_rep_inverse(&self, i: usize, beta: u32, mut x: u32) -> u32 {
        let lv = &self.levels[i];
        let mut cur = beta;
        while cur != lv.base {
            x = self.inv[lv.via[cur as usize] as usize].apply(x);
            cur = lv.parent[cur as usize];
        }
        x
    }

    /// Coset representative of level `i` mapping the base point to `beta`.
    pub fn coset_rep(&self, i: usize, beta: u32) -> Option<Perm> {
        if !self.levels[i].contains(beta) {
            return None;
        }
        let mut p: Vec<u32> = (0..self.n as u32).collect();
        for s in self.rep_word(i, beta) {
            let g = &self.store[s as usize];
            for x in p.iter_mut() {
                *x = g.apply(*x);
            }
        }
        Some(Perm::from_vec_unchecked(p))
    }

    fn sift_images(&self, mut images: Vec<u32>, start: usize, mut word: Vec<(usize, u32)>) -> Sift {
        for j in start..self.levels.len() {
            let beta = images[self.tracked_pos(j)];
            if !self.levels[j].contains(beta) {
                return Sift::Residue { level: j, images, word };
            }
            if beta != self.levels[j].base {
                for x in images.iter_mut() {
                    *x = self.apply_rep_inverse(j, beta, *x);
                }
                word.push((j, beta));
            }
        }
        if images.iter().zip(&self.tracked).all(|(a, b)| a == b) {
            Sift::Identity
        } else {
            let level = self.levels.len();
            Sift::Residue { level, images, word }
        }
    }

    /// Full permutation of a residue from its sift record.
    fn rebuild(&self, start: Perm, word: &[(usize, u32)]) -> Perm {
        let mut p = start.into_vec();
        for &(j, beta) in word {
            for x in p.iter_mut() {
                *x = self.apply_rep_inverse(j, beta, *x);
            }
        }
        Perm::from_vec_unchecked(p)
    }

    fn schreier_sims(&mut self) {
        'outer: loop {
            for i in (0..self.levels.len()).rev() {
                while let Some((k, si)) = self.levels[i].next_pair() {
                    let lv = &self.levels[i];
                    let beta = lv.orbit[k];
                    let s = lv.gens[si];
                    let img = self.store[s as usize].apply(beta);
                    if lv.parent[img as usize] == beta && lv.via[img as usize] == s {
                        continue;
                    }
                    let word = self.rep_word(i, beta);
                    let apply_us = |x: u32| -> u32 {
                        let y = word.iter().fold(x, |y, &w| self.store[w as usize].apply(y));
                        self.store[s as usize].apply(y)
                    };
                    let images: Vec<u32> = self.tracked.iter().map(|&x| apply_us(x)).collect();
                    match self.sift_images(images, i, Vec::new()) {
                        Sift::Identity => {}
                        Sift::Residue { level, images, word: divs } => {
                            let res = if self.frame {
                                let start = Perm::from_vec_unchecked((0..self.n as u32).map(apply_us).collect());
                                self.rebuild(start, &divs)
                            } else {
                                Perm::from_vec_unchecked(images)
                            };
                            let level = if level == self.levels.len() {
                                if self.frame {
                                    // Cannot happen for a valid frame; keep the element anyway.
                                    let p =
                                        (0..self.n as u32).find(|&x| res.apply(x) != x).expect("nontrivial residue");
                                    self.tracked.push(p);
                                    self.push_level(p);
                                } else {
                                    let p =
                                        (0..self.n as u32).find(|&x| res.apply(x) != x).expect("nontrivial residue");
                                    self.push_level(p);
                                }
                                self.levels.len() - 1
                            } else {
                                level
                            };
                            self.add_generator(res, i + 1, level);
                            continue 'outer;
                        }
                    }
                }
            }
            break;
        }
    }

    /// Adds `g` to the group if it is not already a member (by sifting the
    /// tracked points). Returns true if the group grew.
    pub fn extend(&mut self, g: &Perm) -> bool {
        let images: Vec<u32> = self.tracked.iter().map(|&x| g.apply(x)).collect();
        match self.sift_images(images, 0, Vec::new()) {
            Sift::Identity => false,
            Sift::Residue { level, images, word } => {
                let res = if self.frame { self.rebuild(g.clone(), &word) } else { Perm::from_vec_unchecked(images) };
                if res.is_identity() {
                    return false;
                }
                let level = if level == self.levels.len() {
                    let p = (0..self.n as u32).find(|&x| res.apply(x) != x).expect("nontrivial residue");
                    if self.frame {
                        self.tracked.push(p);
                    }
                    self.push_level(p);
                    self.levels.len() - 1
                } else {
                    level
                };
                self.add_generator(res, 0, level);
                self.schreier_sims();
                true
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    /// Basic orbit of level `i`.
    pub fn basic_orbit(&self, i: usize) -> &[u32] {
        &self.levels[i].orbit
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    /// Order of the pointwise stabilizer of the first `i` base points.
    pub fn stabilizer_order(&self, i: usize) -> u128 {
        self.levels[i..].iter().map(|l| l.orbit.len() as u128).product()
    }

    /// Strong generators fixing the first `i` base points.
    pub fn stabilizer_generators(&self, i: usize) -> Vec<Perm> {
        match self.levels.get(i) {
            Some(lv) => lv.gens.iter().map(|&s| self.store[s as usize].clone()).collect(),
            None => Vec::new(),
        }
    }

    pub fn strong_generators(&self) -> &[Perm] {
        &self.store
    }

    /// Exact membership test by sifting the full permutation.
    pub fn contains(&self, g: &Perm) -> bool {
        if g.len() != self.n {
            return false;
        }
        let mut p = g.as_slice().to_vec();
        for (j, lv) in self.levels.iter().enumerate() {
            let beta = p[lv.base as usize];
            if !lv.contains(beta) {
                return false;
            }
            for x in p.iter_mut() {
                *x = self.apply_rep_inverse(j, beta, *x);
            }
        }
        p.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// Uniformly random element.
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> Perm {
        let mut p = Perm::identity(self.n);
        for (i, lv) in self.levels.iter().enumerate().rev() {
            let beta = lv.orbit[rng.gen_range(0..lv.orbit.len())];
            let u = self.coset_rep(i, beta).expect("orbit point");
            p = p.then(&u);
        }
        p
    }

    /// All elements, if there are at most `limit`.
    pub fn elements(&self, limit: usize) -> Option<Vec<Perm>> {
        if self.order() > limit as u128 {
            return None;
        }
        let mut out = vec![Perm::identity(self.n)];
        for (i, lv) in self.levels.iter().enumerate().rev() {
            let reps: Vec<Perm> = lv.orbit.iter().map(|&b| self.coset_rep(i, b).expect("orbit point")).collect();
            out = out.iter().flat_map(|h| reps.iter().map(move |u| h.then(u))).collect();
        }
        Some(out)
    }
}
