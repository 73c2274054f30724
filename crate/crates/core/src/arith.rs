//! Small integer helpers shared by the field and lattice code.

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Splits `q = p^m`, returning `None` when `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    let f = factorize(q);
    if f.len() == 1 {
        Some(f[0])
    } else {
        None
    }
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut r = 1u128;
    let mut base = (b % m) as u128;
    let m128 = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % m128;
        }
        base = base * base % m128;
        e >>= 1;
    }
    b = r as u64;
    b
}

/// Multiplicative order of `a` modulo `n`; requires `gcd(a, n) = 1`. Order modulo 1 is 1.
pub fn mult_order(a: u64, n: u64) -> u64 {
    if n == 1 {
        return 1;
    }
    assert_eq!(gcd(a % n, n), 1, "order needs a unit");
    let mut x = a % n;
    let mut k = 1;
    while x != 1 {
        x = ((x as u128 * a as u128) % n as u128) as u64;
        k += 1;
    }
    k
}

pub fn checked_pow(b: u64, e: u32) -> Option<u64> {
    let mut r: u64 = 1;
    for _ in 0..e {
        r = r.checked_mul(b)?;
    }
    Some(r)
}

/// Part of `n` coprime to `p`.
pub fn prime_to_part(mut n: u64, p: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    while n % p == 0 {
        n /= p;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization_and_orders() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(prime_power(49), Some((7, 2)));
        assert_eq!(prime_power(12), None);
        assert_eq!(mult_order(2, 7), 3);
        assert_eq!(mult_order(3, 8), 2);
        assert_eq!(pow_mod(3, 4, 7), 4);
        assert!(is_prime(1_048_573));
        assert!(!is_prime(1));
    }
}
