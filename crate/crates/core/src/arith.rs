//! Small elementary number theory: sieving, factoring, divisor tables.

/// All primes `≤ limit`, by the sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut f = 2;
    while f * f <= n {
        if n % f == 0 {
            return false;
        }
        f += 1;
    }
    true
}

/// Prime factorization by trial division, as `(p, e)` with `p` increasing.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n % f == 0 {
            let mut e = 0;
            while n % f == 0 {
                n /= f;
                e += 1;
            }
            out.push((f, e));
        }
        f += if f == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Exponent of `p` in `n`; `n` must be nonzero.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0 && p > 1);
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n % i == 0 {
            small.push(i);
            if i != n / i {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Ordered factorizations `n = a₁ ⋯ a_d` into positive factors.
pub fn ordered_factorizations(n: u64, d: usize) -> Vec<Vec<u64>> {
    fn rec(n: u64, d: usize, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if d == 1 {
            prefix.push(n);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in divisors(n) {
            prefix.push(a);
            rec(n / a, d - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if d == 0 {
        if n == 1 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, d, &mut Vec::with_capacity(d), &mut out);
    out
}

/// Table `t[n]` (for `1 ≤ n < bound`) of the number of sublattices of `ℤ^d`
/// of index `n`, by repeated Dirichlet convolution
/// `ζ(s)ζ(s−1)⋯ζ(s−d+1) = Σ a(n) n^{−s}`. `t[0]` is 0.
///
/// Saturates at `u128::MAX` rather than overflowing.
pub fn sublattice_count_table(d: usize, bound: u64) -> Vec<u128> {
    let n = bound as usize;
    let mut cur = vec![0u128; n.max(1)];
    if n > 1 {
        cur[1] = 1;
    }
    // multiply by ζ(s−k) for k = 0..d−1
    for k in 0..d as u32 {
        let mut next = vec![0u128; n.max(1)];
        for a in 1..n {
            if cur[a] == 0 {
                continue;
            }
            let mut b = 1;
            while a * b < n {
                let w = (b as u128).saturating_pow(k);
                next[a * b] = next[a * b].saturating_add(cur[a].saturating_mul(w));
                b += 1;
            }
        }
        cur = next;
    }
    cur
}
