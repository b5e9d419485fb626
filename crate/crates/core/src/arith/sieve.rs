use std::sync::OnceLock;

/// Smallest-prime-factor sieve with Möbius and Euler phi tables.
///
/// Built once and then read-only, so a shared reference can be handed to
/// any number of worker threads.
#[derive(Debug, Clone)]
pub struct ArithTable {
    limit: u64,
    spf: Vec<u32>,
    mu: Vec<i8>,
    phi: Vec<u32>,
}

pub const DEFAULT_TABLE_LIMIT: u64 = 1_000_000;

impl ArithTable {
    pub fn new(limit: u64) -> Self {
        let n = limit.max(1) as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        let mut mu = vec![0i8; n + 1];
        let mut phi = vec![0u32; n + 1];
        mu[1] = 1;
        phi[1] = 1;
        // linear sieve
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
                mu[i] = -1;
                phi[i] = i as u32 - 1;
            }
            for &p in &primes {
                let ip = i * p as usize;
                if p > spf[i] || ip > n {
                    break;
                }
                spf[ip] = p;
                if p == spf[i] {
                    mu[ip] = 0;
                    phi[ip] = phi[i] * p;
                } else {
                    mu[ip] = -mu[i];
                    phi[ip] = phi[i] * (p - 1);
                }
            }
        }
        ArithTable { limit: n as u64, spf, mu, phi }
    }

    /// Process-wide table up to [`DEFAULT_TABLE_LIMIT`], built on first use.
    pub fn global() -> &'static ArithTable {
        static TABLE: OnceLock<ArithTable> = OnceLock::new();
        TABLE.get_or_init(|| ArithTable::new(DEFAULT_TABLE_LIMIT))
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn factorize(&self, mut n: u64) -> Vec<(u64, u32)> {
        if n > self.limit {
            return super::factorize(n);
        }
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            n /= p;
            match out.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    pub fn mobius(&self, n: u64) -> i32 {
        if n <= self.limit {
            self.mu[n as usize] as i32
        } else {
            super::mobius(n)
        }
    }

    pub fn phi(&self, n: u64) -> u64 {
        if n <= self.limit {
            self.phi[n as usize] as u64
        } else {
            super::euler_phi(n)
        }
    }

    pub fn is_prime(&self, n: u64) -> bool {
        if n <= self.limit {
            n >= 2 && self.spf[n as usize] as u64 == n
        } else {
            super::is_prime(n)
        }
    }

    pub fn num_divisors(&self, n: u64) -> u64 {
        self.factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
    }

    pub fn tau_star(&self, n: u64) -> f64 {
        self.factorize(n)
            .iter()
            .map(|&(p, e)| (e + 1) as f64 + e as f64 / (p as f64).sqrt())
            .product()
    }

    pub fn mu_star(&self, j: u64) -> f64 {
        if self.mobius(j) == 0 {
            return 0.0;
        }
        self.factorize(j)
            .iter()
            .map(|&(p, _)| -1.0 - 1.0 / (p as f64).sqrt())
            .product()
    }
}
