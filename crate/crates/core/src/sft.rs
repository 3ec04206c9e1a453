//! Subshifts of finite type over a finite alphabet.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perron::{perron_pair, Dense};

/// A finite sequence of alphabet indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u32>);

const DIGITS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyz";

impl Word {
    pub fn new(symbols: Vec<u32>) -> Self {
        Word(symbols)
    }

    pub fn symbols(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses `"0110"` (one base-36 digit per symbol) or `"12.3.40"`
    /// (dot-separated decimal symbols, for large alphabets).
    pub fn parse(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::InvalidWord(s.to_string()));
        }
        let symbols = if s.contains('.') {
            s.split('.')
                .map(|t| t.parse::<u32>().map_err(|_| Error::InvalidWord(s.to_string())))
                .collect::<Result<Vec<_>>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(36)
                        .ok_or_else(|| Error::InvalidWord(s.to_string()))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Ok(Word(symbols))
    }

    /// Smallest `p` such that the word is a power of its length-`p` prefix.
    pub fn primitive_period(&self) -> usize {
        let n = self.0.len();
        (1..=n)
            .find(|&p| n.is_multiple_of(p) && (p..n).all(|i| self.0[i] == self.0[i - p]))
            .unwrap_or(n)
    }

    /// Lexicographically least rotation.
    pub fn canonical_rotation(&self) -> Word {
        let n = self.0.len();
        (0..n)
            .map(|r| Word((0..n).map(|i| self.0[(i + r) % n]).collect()))
            .min()
            .unwrap_or_else(|| self.clone())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&s| (s as usize) < DIGITS.len()) {
            for &s in &self.0 {
                write!(f, "{}", DIGITS[s as usize] as char)?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

/// A subshift of finite type given by a 0/1 transition matrix.
///
/// Entry `(a, b)` is allowed iff symbol `b` may follow symbol `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sft {
    alphabet: usize,
    allowed: Vec<bool>,
    primitive: bool,
}

/// On-disk form: `{"alphabet": n, "transitions": [[...]]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SftDocument {
    pub alphabet: usize,
    pub transitions: Vec<Vec<u8>>,
}

impl Sft {
    /// Validates the transition matrix and computes the primitivity flag.
    pub fn new(alphabet_size: usize, transitions: &[Vec<u8>]) -> Result<Sft> {
        if alphabet_size == 0 {
            return Err(Error::EmptyAlphabet);
        }
        let rows = transitions.len();
        for (row, r) in transitions.iter().enumerate() {
            if r.len() != rows {
                return Err(Error::NotSquare {
                    rows,
                    row,
                    len: r.len(),
                });
            }
        }
        if rows != alphabet_size {
            return Err(Error::SizeMismatch {
                alphabet: alphabet_size,
                matrix: rows,
            });
        }
        let n = alphabet_size;
        let mut allowed = vec![false; n * n];
        for (i, r) in transitions.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                match v {
                    0 => {}
                    1 => allowed[i * n + j] = true,
                    _ => {
                        return Err(Error::NotBinary {
                            row: i,
                            col: j,
                            value: v,
                        })
                    }
                }
            }
        }
        for a in 0..n {
            if !(0..n).any(|b| allowed[a * n + b]) {
                return Err(Error::ZeroRowOrColumn {
                    symbol: a,
                    direction: "successor",
                });
            }
            if !(0..n).any(|b| allowed[b * n + a]) {
                return Err(Error::ZeroRowOrColumn {
                    symbol: a,
                    direction: "predecessor",
                });
            }
        }
        let primitive = boolean_primitive(n, &allowed);
        Ok(Sft {
            alphabet: n,
            allowed,
            primitive,
        })
    }

    pub fn from_document(doc: &SftDocument) -> Result<Sft> {
        Sft::new(doc.alphabet, &doc.transitions)
    }

    pub fn to_document(&self) -> SftDocument {
        SftDocument {
            alphabet: self.alphabet,
            transitions: self.transitions(),
        }
    }

    pub fn full_shift(d: usize) -> Sft {
        Sft::new(d, &vec![vec![1; d]; d]).expect("full shift is valid")
    }

    /// Binary sequences without two consecutive 1s.
    pub fn golden_mean() -> Sft {
        Sft::new(2, &[vec![1, 1], vec![1, 0]]).expect("golden mean shift is valid")
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    #[inline]
    pub fn allows(&self, a: u32, b: u32) -> bool {
        self.allowed[a as usize * self.alphabet + b as usize]
    }

    pub fn transitions(&self) -> Vec<Vec<u8>> {
        (0..self.alphabet)
            .map(|a| {
                (0..self.alphabet)
                    .map(|b| self.allowed[a * self.alphabet + b] as u8)
                    .collect()
            })
            .collect()
    }

    pub fn successors(&self, a: u32) -> impl Iterator<Item = u32> + '_ {
        (0..self.alphabet as u32).filter(move |&b| self.allows(a, b))
    }

    /// True iff some power of the transition matrix is entrywise positive.
    pub fn is_primitive(&self) -> bool {
        self.primitive
    }

    pub fn require_primitive(&self) -> Result<()> {
        if self.primitive {
            Ok(())
        } else {
            Err(Error::NotPrimitive)
        }
    }

    pub fn adjacency(&self) -> Dense {
        let n = self.alphabet;
        let mut m = Dense::zeros(n);
        for a in 0..n {
            for b in 0..n {
                if self.allowed[a * n + b] {
                    m.set(a, b, 1.0);
                }
            }
        }
        m
    }

    /// `log` of the Perron root of the transition matrix, in nats.
    pub fn topological_entropy(&self) -> Result<f64> {
        self.require_primitive()?;
        let p = perron_pair(&self.adjacency()).ok_or(Error::NotPrimitive)?;
        Ok(p.log_lambda.max(0.0))
    }

    fn symbol_in_range(&self, s: u32) -> bool {
        (s as usize) < self.alphabet
    }

    pub fn is_admissible(&self, w: &Word) -> bool {
        let s = w.symbols();
        !s.is_empty()
            && s.iter().all(|&x| self.symbol_in_range(x))
            && s.windows(2).all(|p| self.allows(p[0], p[1]))
    }

    /// Admissible including the wrap-around pair from last to first symbol.
    pub fn is_cyclically_admissible(&self, w: &Word) -> bool {
        let s = w.symbols();
        self.is_admissible(w) && self.allows(*s.last().unwrap(), s[0])
    }

    /// All admissible words of the given length, in lexicographic order.
    pub fn words(&self, len: usize) -> Vec<Word> {
        let mut out = Vec::new();
        if len == 0 {
            return out;
        }
        let mut stack: Vec<u32> = Vec::with_capacity(len);
        fn rec(sft: &Sft, len: usize, stack: &mut Vec<u32>, out: &mut Vec<Word>) {
            if stack.len() == len {
                out.push(Word(stack.clone()));
                return;
            }
            for b in 0..sft.alphabet as u32 {
                if stack.last().is_none_or(|&a| sft.allows(a, b)) {
                    stack.push(b);
                    rec(sft, len, stack, out);
                    stack.pop();
                }
            }
        }
        rec(self, len, &mut stack, &mut out);
        out
    }

    /// Recoding to the `k`-block presentation.
    ///
    /// The new alphabet is the admissible `k`-words in lexicographic order;
    /// `w -> w'` is allowed iff the words overlap in `k - 1` symbols.
    pub fn higher_block(&self, k: usize) -> Result<Sft> {
        if k == 0 {
            return Err(Error::ZeroDepth);
        }
        if k == 1 {
            return Ok(self.clone());
        }
        let words = self.words(k);
        let n = words.len();
        let mut rows = vec![vec![0u8; n]; n];
        for (i, w) in words.iter().enumerate() {
            for (j, v) in words.iter().enumerate() {
                let (ws, vs) = (w.symbols(), v.symbols());
                if ws[1..] == vs[..k - 1] {
                    rows[i][j] = 1;
                }
            }
        }
        Sft::new(n, &rows)
    }
}

fn boolean_primitive(n: usize, allowed: &[bool]) -> bool {
    // Wielandt: primitive iff A^m > 0 for m = (n-1)^2 + 1; powers 2^j >= that suffice.
    let bound = (n - 1) * (n - 1) + 1;
    let mut b = allowed.to_vec();
    let mut exponent = 1usize;
    loop {
        if exponent >= bound {
            return b.iter().all(|&x| x);
        }
        let mut next = vec![false; n * n];
        for i in 0..n {
            for k in 0..n {
                if b[i * n + k] {
                    for j in 0..n {
                        next[i * n + j] |= b[k * n + j];
                    }
                }
            }
        }
        b = next;
        exponent *= 2;
    }
}
