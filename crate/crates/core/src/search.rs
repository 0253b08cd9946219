//! Backtracking embedding search shared by membership tests and enumeration.

use crate::structure::{EnumStructure, View};

/// Calls `visit` on every embedding of `pattern` into `target` in lexicographic
/// order of value sequences; returns true as soon as `visit` returns true.
///
/// `pin = Some((p, t))` forces pattern point `p` onto target point `t`, and
/// `cand` restricts the remaining points to the listed target points. Pinned
/// searches assign the pinned point first, so they are not lexicographic.
pub(crate) fn for_each_embedding<V: View + ?Sized>(
    pattern: &EnumStructure,
    target: &V,
    ordered: bool,
    pin: Option<(usize, usize)>,
    cand: Option<&[usize]>,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    let n = pattern.size();
    if n > target.len() {
        return false;
    }
    let mut order: Vec<usize> = (0..n).collect();
    if let Some((p, _)) = pin {
        order.retain(|&x| x != p);
        order.insert(0, p);
    }
    let mut img = vec![usize::MAX; n];
    let mut st = State { pattern, target, ordered, pin, cand, order: &order, img: &mut img };
    st.rec(0, visit)
}

struct State<'a, V: View + ?Sized> {
    pattern: &'a EnumStructure,
    target: &'a V,
    ordered: bool,
    pin: Option<(usize, usize)>,
    cand: Option<&'a [usize]>,
    order: &'a [usize],
    img: &'a mut Vec<usize>,
}

impl<V: View + ?Sized> State<'_, V> {
    fn fits(&self, p: usize, t: usize) -> bool {
        if self.target.unary(t) != self.pattern.unary(p) {
            return false;
        }
        for q in 0..self.pattern.size() {
            let tq = self.img[q];
            if tq == usize::MAX {
                continue;
            }
            if tq == t {
                return false;
            }
            if self.ordered && ((q < p && tq > t) || (q > p && tq < t)) {
                return false;
            }
            if self.target.rel(tq, t) != self.pattern.rel(q, p) {
                return false;
            }
        }
        true
    }

    fn rec(&mut self, depth: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if depth == self.order.len() {
            return visit(self.img);
        }
        let p = self.order[depth];
        if let Some((pp, t)) = self.pin {
            if pp == p {
                if self.fits(p, t) {
                    self.img[p] = t;
                    if self.rec(depth + 1, visit) {
                        return true;
                    }
                    self.img[p] = usize::MAX;
                }
                return false;
            }
        }
        let lo = if self.ordered && self.pin.is_none() && p > 0 { self.img[p - 1] + 1 } else { 0 };
        match self.cand {
            Some(list) => {
                for &t in list {
                    if t >= lo && self.try_point(p, t, depth, visit) {
                        return true;
                    }
                }
            }
            None => {
                for t in lo..self.target.len() {
                    if self.try_point(p, t, depth, visit) {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn try_point(&mut self, p: usize, t: usize, depth: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if !self.fits(p, t) {
            return false;
        }
        self.img[p] = t;
        if self.rec(depth + 1, visit) {
            return true;
        }
        self.img[p] = usize::MAX;
        false
    }
}

/// Whether some structure in `forbidden` embeds into `view` using point `q`.
/// Valid for irreducible patterns: every other image point is related to `q`,
/// so candidates are restricted to `q`'s neighbours.
pub(crate) fn copy_through<V: View + ?Sized>(forbidden: &[EnumStructure], view: &V, q: usize) -> bool {
    let nbrs: Vec<usize> = (0..view.len()).filter(|&x| x != q && view.rel(x, q) != 0).collect();
    for f in forbidden {
        if f.size() > nbrs.len() + 1 {
            continue;
        }
        for p in 0..f.size() {
            if f.unary(p) != view.unary(q) {
                continue;
            }
            if for_each_embedding(f, view, false, Some((p, q)), Some(&nbrs), &mut |_| true) {
                return true;
            }
        }
    }
    false
}
