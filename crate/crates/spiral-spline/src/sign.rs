//! Branch selectors.
//!
//! Each interpolation branch is labeled by one sign per segment, roughly
//! the concavity of the curve there. Branch indices run 1..=2^n: index p
//! maps through the n low binary digits of p (most significant first),
//! digit 0 giving +1, so p = 2^n is the all-plus branch.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    /// Entries must be exactly +1 or -1.
    pub fn new(entries: Vec<i8>) -> Option<Self> {
        if entries.is_empty() || !entries.iter().all(|&s| s == 1 || s == -1) {
            return None;
        }
        Some(SignVector(entries))
    }

    pub fn all_plus(n: usize) -> Self {
        SignVector(vec![1; n])
    }

    pub fn all_minus(n: usize) -> Self {
        SignVector(vec![-1; n])
    }

    /// Decode branch index `p` in `1..=2^n`.
    pub fn from_branch_index(p: usize, n: usize) -> Self {
        assert!(n >= 1 && n < usize::BITS as usize);
        assert!(
            (1..=(1usize << n)).contains(&p),
            "branch index out of range"
        );
        let bits = p % (1 << n);
        let entries = (0..n)
            .map(|i| {
                let digit = (bits >> (n - 1 - i)) & 1;
                if digit == 0 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        SignVector(entries)
    }

    /// Inverse of [`from_branch_index`].
    pub fn branch_index(&self) -> usize {
        let n = self.len();
        let mut bits = 0usize;
        for (i, &s) in self.0.iter().enumerate() {
            if s == -1 {
                bits |= 1 << (n - 1 - i);
            }
        }
        if bits == 0 {
            1 << n
        } else {
            bits
        }
    }

    /// All 2^n branches in index order 1..=2^n.
    pub fn enumerate(n: usize) -> impl Iterator<Item = SignVector> {
        (1..=(1usize << n)).map(move |p| SignVector::from_branch_index(p, n))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[i8] {
        &self.0
    }

    /// Sign of segment `j` (0-based) as a float factor.
    pub fn factor(&self, j: usize) -> f64 {
        f64::from(self.0[j])
    }

    /// Compact form like `+--+`.
    pub fn compact(&self) -> String {
        self.0
            .iter()
            .map(|&s| if s == 1 { '+' } else { '-' })
            .collect()
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}
