//! Structure constants `N_{alpha,beta}` by the extraspecial-pair algorithm.
//!
//! Positive roots are totally ordered by their index (height, then coefficients).
//! For each positive root `xi` the extraspecial pair `(alpha', beta')` is the special
//! pair with the smallest `alpha'`; its constant is fixed to `+(p+1)`.  All other
//! constants follow from the Chevalley-basis identities, with `N_{-a,-b} = -N_{a,b}`.

use num_rational::Rational64;

use super::RootData;
use crate::error::{Error, Result};

fn p_value(d: &RootData, a: usize, b: usize) -> i64 {
    // max { n : b - n a is a root }
    let (ca, cb) = (&d.rs.roots()[a].coeffs, &d.rs.roots()[b].coeffs);
    let mut n = 0;
    loop {
        let v: Vec<i32> = cb.iter().zip(ca).map(|(&y, &x)| y - (n + 1) * x).collect();
        if d.rs.is_root(&v) {
            n += 1;
        } else {
            return n as i64;
        }
    }
}

struct Solver<'a> {
    d: &'a RootData<'a>,
    np: usize,
    pos: Vec<Option<i64>>,
}

impl Solver<'_> {
    fn is_pos(&self, a: usize) -> bool {
        a < self.np
    }

    fn general(&self, a: usize, b: usize) -> Result<i64> {
        let Some(s) = self.d.sum(a, b) else {
            return Ok(0);
        };
        let (pa, pb) = (self.is_pos(a), self.is_pos(b));
        if pa && pb {
            return self.pos[a * self.np + b]
                .ok_or_else(|| Error::Construction(format!("constant N({a},{b}) requested before it was fixed")));
        }
        if !pa && !pb {
            return Ok(-self.general(self.d.neg(a), self.d.neg(b))?);
        }
        let c = self.d.neg(s);
        let (num, den) = if self.is_pos(b) == self.is_pos(c) {
            (self.d.len2[c] * self.general(b, c)?, self.d.len2[a])
        } else {
            (self.d.len2[c] * self.general(c, a)?, self.d.len2[b])
        };
        if num % den != 0 {
            return Err(Error::Construction(format!("non-integral constant N({a},{b}) = {num}/{den}")));
        }
        Ok(num / den)
    }

    fn set(&mut self, a: usize, b: usize, v: i64) {
        self.pos[a * self.np + b] = Some(v);
        self.pos[b * self.np + a] = Some(-v);
    }
}

/// Dense table `N[a * nroots + b]` over all root pairs (zero when `a + b` is not a root).
pub(super) fn structure_constants(d: &RootData) -> Result<Vec<i64>> {
    let nr = d.rs.roots().len();
    let np = nr / 2;
    let mut solver = Solver { d, np, pos: vec![None; np * np] };

    for xi in 0..np {
        let special: Vec<(usize, usize)> =
            (0..xi).flat_map(|a| (a + 1..xi).map(move |b| (a, b))).filter(|&(a, b)| d.sum(a, b) == Some(xi)).collect();
        let Some(&(a0, b0)) = special.first() else {
            continue;
        };
        let n0 = p_value(d, a0, b0) + 1;
        solver.set(a0, b0, n0);
        for &(a, b) in &special[1..] {
            // Four-root identity applied to (a, b, -a0, -b0).
            let len_xi = d.len2[xi];
            let mut acc = Rational64::from_integer(0);
            let bma0 = d.sum(b, d.neg(a0));
            let ama0 = d.sum(a, d.neg(a0));
            if let Some(r) = bma0 {
                let t = solver.general(b, d.neg(a0))? * solver.general(a, d.neg(b0))?;
                acc += Rational64::new(t, d.len2[r]);
            }
            if let Some(r) = ama0 {
                let t = solver.general(d.neg(a0), a)? * solver.general(b, d.neg(b0))?;
                acc += Rational64::new(t, d.len2[r]);
            }
            let value = acc * Rational64::new(len_xi, n0);
            if !value.is_integer() {
                return Err(Error::Construction(format!("non-integral constant for special pair ({a},{b})")));
            }
            solver.set(a, b, value.to_integer());
        }
    }

    let mut table = vec![0i64; nr * nr];
    for a in 0..nr {
        for b in 0..nr {
            table[a * nr + b] = solver.general(a, b)?;
        }
    }
    Ok(table)
}

pub(super) fn string_length(d: &RootData, a: usize, b: usize) -> i64 {
    p_value(d, a, b)
}
