//! Explicit finite abelian groups `ℤ/m₁ × ⋯ × ℤ/m_k`, small enough to list
//! every element. Used for brute-force counts (automorphisms, embeddings,
//! generating tuples) that check the closed formulas.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};

/// Groups larger than this are refused by the brute-force routines.
pub const MAX_EXPLICIT_ORDER: u64 = 1 << 16;

/// Subgroup as a bitset over element indices.
pub type Subset = Vec<u64>;

#[derive(Clone, Debug)]
pub struct ExplicitGroup {
    moduli: Vec<u64>,
    order: usize,
}

impl ExplicitGroup {
    pub fn new(moduli: &[u64]) -> Result<Self> {
        let mut order: u64 = 1;
        for &m in moduli {
            if m == 0 {
                return Err(Error::Invalid("cyclic factor of order 0".into()));
            }
            order = order
                .checked_mul(m)
                .filter(|&o| o <= MAX_EXPLICIT_ORDER)
                .ok_or_else(|| {
                    Error::ResourceLimit(format!(
                        "explicit group {moduli:?} is larger than {MAX_EXPLICIT_ORDER} elements"
                    ))
                })?;
        }
        Ok(Self {
            moduli: moduli.to_vec(),
            order: order as usize,
        })
    }

    /// `(ℤ/p^{λ₁}) × ⋯ × (ℤ/p^{λ_r})`
    pub fn of_type(p: u64, parts: &[u32]) -> Result<Self> {
        let moduli: Vec<u64> = parts.iter().map(|&l| p.pow(l)).collect();
        Self::new(&moduli)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    fn decode(&self, mut idx: usize, out: &mut [u64]) {
        for (c, &m) in out.iter_mut().zip(&self.moduli) {
            *c = (idx as u64) % m;
            idx /= m as usize;
        }
    }

    fn encode(&self, coords: &[u64]) -> usize {
        let mut idx = 0usize;
        for (&c, &m) in coords.iter().zip(&self.moduli).rev() {
            idx = idx * m as usize + c as usize;
        }
        idx
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let k = self.moduli.len();
        let mut ca = vec![0; k];
        let mut cb = vec![0; k];
        self.decode(a, &mut ca);
        self.decode(b, &mut cb);
        for i in 0..k {
            ca[i] = (ca[i] + cb[i]) % self.moduli[i];
        }
        self.encode(&ca)
    }

    /// `n · a`
    pub fn mul(&self, n: u64, a: usize) -> usize {
        let k = self.moduli.len();
        let mut ca = vec![0; k];
        self.decode(a, &mut ca);
        for i in 0..k {
            ca[i] = ((ca[i] as u128 * n as u128) % self.moduli[i] as u128) as u64;
        }
        self.encode(&ca)
    }

    pub fn element_order(&self, a: usize) -> u64 {
        let mut ca = vec![0; self.moduli.len()];
        self.decode(a, &mut ca);
        ca.iter().zip(&self.moduli).fold(1u64, |acc, (&c, &m)| {
            let o = m / num_integer::gcd(c, m);
            num_integer::lcm(acc, o)
        })
    }

    pub fn empty_subset(&self) -> Subset {
        vec![0; self.order.div_ceil(64)]
    }

    pub fn trivial_subgroup(&self) -> Subset {
        let mut s = self.empty_subset();
        s[0] |= 1;
        s
    }

    pub fn full(&self) -> Subset {
        let mut s = self.empty_subset();
        for i in 0..self.order {
            s[i / 64] |= 1 << (i % 64);
        }
        s
    }

    pub fn members(&self, s: &Subset) -> Vec<usize> {
        (0..self.order).filter(|&i| s[i / 64] >> (i % 64) & 1 == 1).collect()
    }

    pub fn size(s: &Subset) -> usize {
        s.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn contains(s: &Subset, i: usize) -> bool {
        s[i / 64] >> (i % 64) & 1 == 1
    }

    /// `⟨H, x⟩` for a subgroup `H`: the union of cosets `H + kx`.
    pub fn extend(&self, h: &Subset, x: usize) -> Subset {
        let members = self.members(h);
        let mut out = h.clone();
        let mut kx = x;
        while !Self::contains(h, kx) {
            for &m in &members {
                let e = self.add(m, kx);
                out[e / 64] |= 1 << (e % 64);
            }
            kx = self.add(kx, x);
        }
        out
    }

    /// Type of a subgroup of a `p`-group, read off from the sizes of its
    /// `p^k`-torsion layers. Parts are weakly decreasing.
    pub fn p_subgroup_type(&self, p: u64, h: &Subset) -> Vec<u32> {
        let members = self.members(h);
        let total = ilog_exact(members.len() as u64, p);
        let mut conj = Vec::new();
        let mut prev = 0u32;
        let mut pk = p;
        while prev < total {
            let torsion = members.iter().filter(|&&m| self.mul(pk, m) == 0).count() as u64;
            let s = ilog_exact(torsion, p);
            conj.push(s - prev);
            prev = s;
            pk = pk.saturating_mul(p);
        }
        conjugate_parts(&conj)
    }

    /// Every subgroup, by closing under single-element extension from the
    /// trivial subgroup.
    pub fn all_subgroups(&self) -> Vec<Subset> {
        let mut seen: HashSet<Subset> = HashSet::new();
        let mut stack = vec![self.trivial_subgroup()];
        seen.insert(self.trivial_subgroup());
        while let Some(h) = stack.pop() {
            for x in 0..self.order {
                if Self::contains(&h, x) {
                    continue;
                }
                let g = self.extend(&h, x);
                if seen.insert(g.clone()) {
                    stack.push(g);
                }
            }
        }
        let mut v: Vec<Subset> = seen.into_iter().collect();
        v.sort();
        v
    }
}

fn ilog_exact(mut n: u64, p: u64) -> u32 {
    let mut e = 0;
    while n > 1 {
        debug_assert!(n % p == 0);
        n /= p;
        e += 1;
    }
    e
}

fn conjugate_parts(parts: &[u32]) -> Vec<u32> {
    let max = parts.iter().copied().max().unwrap_or(0);
    (1..=max)
        .map(|i| parts.iter().filter(|&&x| x >= i).count() as u32)
        .collect()
}

/// Number of tuples `(x₁, …, x_r)` in `g` with `ord(x_i)` satisfying
/// `order_ok(i, ord)` whose span passes `accept`. `bound[i]` is an upper bound
/// on `ord(x_i)`; branches whose span cannot reach `target_order` are cut.
pub(crate) fn count_tuples(
    g: &ExplicitGroup,
    bounds: &[u64],
    target_order: usize,
    order_ok: &dyn Fn(usize, u64) -> bool,
    accept: &dyn Fn(&Subset) -> bool,
) -> u128 {
    let orders: Vec<u64> = (0..g.order()).map(|x| g.element_order(x)).collect();
    let mut memo: HashMap<(usize, Subset), u128> = HashMap::new();

    fn rec(
        g: &ExplicitGroup,
        i: usize,
        h: Subset,
        bounds: &[u64],
        target: usize,
        orders: &[u64],
        order_ok: &dyn Fn(usize, u64) -> bool,
        accept: &dyn Fn(&Subset) -> bool,
        memo: &mut HashMap<(usize, Subset), u128>,
    ) -> u128 {
        if i == bounds.len() {
            return u128::from(accept(&h));
        }
        let reach: u128 = bounds[i..].iter().map(|&b| b as u128).product();
        if (ExplicitGroup::size(&h) as u128) * reach < target as u128 {
            return 0;
        }
        let key = (i, h);
        if let Some(&c) = memo.get(&key) {
            return c;
        }
        let h = key.1.clone();
        let mut total = 0;
        for x in 0..g.order() {
            if !order_ok(i, orders[x]) {
                continue;
            }
            let next = g.extend(&h, x);
            total += rec(g, i + 1, next, bounds, target, orders, order_ok, accept, memo);
        }
        memo.insert(key, total);
        total
    }

    rec(
        g,
        0,
        g.trivial_subgroup(),
        bounds,
        target_order,
        &orders,
        order_ok,
        accept,
        &mut memo,
    )
}
