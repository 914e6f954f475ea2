//! Binomial coefficients and k-subset enumeration shared by the verifiers.

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

pub fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// Lexicographic iterator over the `k`-subsets of `0..n`.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    current: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            current: (0..k).collect(),
            done: k > n,
        }
    }

    /// Starts at the `rank`-th subset in lexicographic order.
    pub fn starting_at(n: usize, k: usize, rank: u128) -> Self {
        match unrank(n, k, rank) {
            Some(current) => Combinations {
                n,
                current,
                done: false,
            },
            None => Combinations {
                n,
                current: Vec::new(),
                done: true,
            },
        }
    }

    /// Moves to the next subset; `current` becomes `None` once exhausted.
    pub fn step(&mut self) {
        if !self.done {
            self.done = !advance(&mut self.current, self.n);
        }
    }

    pub fn current(&self) -> Option<&[usize]> {
        (!self.done).then_some(&self.current[..])
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        self.done = !advance(&mut self.current, self.n);
        Some(out)
    }
}

fn advance(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// The `rank`-th `k`-subset of `0..n` in lexicographic order.
pub fn unrank(n: usize, k: usize, mut rank: u128) -> Option<Vec<usize>> {
    if k > n || rank >= binomial(n as u64, k as u64) {
        return None;
    }
    let mut out = Vec::with_capacity(k);
    let mut x = 0usize;
    for i in 0..k {
        loop {
            let c = binomial((n - x - 1) as u64, (k - i - 1) as u64);
            if rank < c {
                break;
            }
            rank -= c;
            x += 1;
        }
        out.push(x);
        x += 1;
    }
    Some(out)
}

/// All `k`-subsets of `0..n` in colexicographic order (largest element compared first).
pub fn colex_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = Combinations::new(n, k).collect();
    all.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(17, 5), 6188);
        assert_eq!(binomial(18, 8), 43758);
        assert_eq!(binomial(18, 7), 31824);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(0, 0), 1);
    }

    #[test]
    fn combinations_match_count_and_unrank() {
        let all: Vec<_> = Combinations::new(7, 3).collect();
        assert_eq!(all.len(), 35);
        for (r, c) in all.iter().enumerate() {
            assert_eq!(unrank(7, 3, r as u128).as_ref(), Some(c));
            let mut it = Combinations::starting_at(7, 3, r as u128);
            assert_eq!(it.next().as_ref(), Some(c));
        }
        assert_eq!(Combinations::new(4, 0).count(), 1);
        assert_eq!(Combinations::new(2, 3).count(), 0);
    }

    #[test]
    fn step_agrees_with_iterator() {
        let mut a = Combinations::new(6, 2);
        let b: Vec<_> = Combinations::new(6, 2).collect();
        let mut seen = Vec::new();
        while let Some(c) = a.current() {
            seen.push(c.to_vec());
            a.step();
        }
        assert_eq!(seen, b);
    }

    #[test]
    fn colex_order() {
        assert_eq!(
            colex_subsets(3, 2),
            vec![vec![0, 1], vec![0, 2], vec![1, 2]]
        );
        assert_eq!(colex_subsets(4, 2)[2], vec![1, 2]);
    }
}
