//! Braid words in the Artin generators and the exact combinatorics on them.
//!
//! A letter `e > 0` stands for `σ_e`, a letter `e < 0` for `σ_{-e}^{-1}`.
//! Strand positions are 1-based throughout.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A word in the Artin generators on `n` strands.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord {
    n: usize,
    letters: Vec<i32>,
}

/// A bijection on `{1, …, n}`. `images[p - 1]` is the image of `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation {
    images: Vec<usize>,
}

/// A cycle of the closure permutation, i.e. one component of the closed braid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// Strand positions visited by the cycle, starting at the smallest.
    pub strands: Vec<usize>,
}

impl Component {
    pub fn strand_count(&self) -> usize {
        self.strands.len()
    }
}

impl BraidWord {
    pub fn new(n: usize, letters: Vec<i32>) -> Result<Self> {
        if n == 0 {
            return Err(Error::TooFewStrands { got: 0, min: 1 });
        }
        for &e in &letters {
            if e == 0 || e.unsigned_abs() as usize >= n {
                return Err(Error::InvalidWord(format!(
                    "letter {e} is not a generator on {n} strands"
                )));
            }
        }
        Ok(Self { n, letters })
    }

    /// The identity braid on `n` strands.
    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, Vec::new())
    }

    /// Parses whitespace-separated signed integers, e.g. `"1 -2 1 -2"`.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let letters = text
            .split_whitespace()
            .map(|tok| {
                i32::from_str(tok)
                    .map_err(|_| Error::InvalidWord(format!("`{tok}` is not an integer")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, letters)
    }

    pub fn strands(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Concatenation `self · other` (self read first).
    pub fn concat(&self, other: &BraidWord) -> Result<BraidWord> {
        if self.n != other.n {
            return Err(Error::InvalidWord(format!(
                "cannot concatenate words on {} and {} strands",
                self.n, other.n
            )));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(BraidWord { n: self.n, letters })
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord {
            n: self.n,
            letters: self.letters.iter().rev().map(|e| -e).collect(),
        }
    }

    /// The permutation `start position ↦ end position` induced by the word.
    pub fn permutation(&self) -> Permutation {
        // strand_at[p] = label of the strand currently at position p
        let mut strand_at: Vec<usize> = (0..self.n).collect();
        for &e in &self.letters {
            let p = e.unsigned_abs() as usize - 1;
            strand_at.swap(p, p + 1);
        }
        let mut images = vec![0; self.n];
        for (pos, &label) in strand_at.iter().enumerate() {
            images[label] = pos + 1;
        }
        Permutation { images }
    }

    /// Components of the closure, ordered by their smallest strand.
    pub fn components(&self) -> Vec<Component> {
        self.permutation().cycles()
    }

    /// `(k_plus, k_minus)`: the number of positive and negative letters.
    pub fn crossing_counts(&self) -> (usize, usize) {
        let plus = self.letters.iter().filter(|&&e| e > 0).count();
        (plus, self.letters.len() - plus)
    }

    /// Signed crossing count `k_plus - k_minus`.
    pub fn writhe(&self) -> i64 {
        let (p, m) = self.crossing_counts();
        p as i64 - m as i64
    }

    /// `w^r`; negative `r` repeats the inverse word.
    pub fn power(&self, r: i64) -> BraidWord {
        let base = if r < 0 { self.inverse() } else { self.clone() };
        let reps = r.unsigned_abs() as usize;
        let mut letters = Vec::with_capacity(base.letters.len() * reps);
        for _ in 0..reps {
            letters.extend_from_slice(&base.letters);
        }
        BraidWord { n: self.n, letters }
    }

    /// Each generator index occurs, and only with one sign.
    pub fn is_homogeneous(&self) -> bool {
        let mut sign = vec![0i32; self.n.saturating_sub(1)];
        for &e in &self.letters {
            let i = e.unsigned_abs() as usize - 1;
            let s = e.signum();
            if sign[i] == 0 {
                sign[i] = s;
            } else if sign[i] != s {
                return false;
            }
        }
        sign.iter().all(|&s| s != 0)
    }

    /// Every index occurs and `σ_i` always carries the sign `(-1)^{i+1}`.
    pub fn is_alternating(&self) -> bool {
        let mut seen = vec![false; self.n.saturating_sub(1)];
        for &e in &self.letters {
            let i = e.unsigned_abs() as usize;
            if e.signum() != alternating_sign(i) {
                return false;
            }
            seen[i - 1] = true;
        }
        seen.iter().all(|&s| s)
    }

    /// True iff `other` is a cyclic rotation of `self`, letter for letter.
    pub fn cyclic_equal(&self, other: &BraidWord) -> bool {
        if self.n != other.n || self.letters.len() != other.letters.len() {
            return false;
        }
        let len = self.letters.len();
        if len == 0 {
            return true;
        }
        (0..len).any(|shift| (0..len).all(|k| self.letters[(k + shift) % len] == other.letters[k]))
    }

    /// Images of the free generators `x_1, …, x_n` under the Artin action,
    /// as freely reduced words in signed generator indices.
    ///
    /// `σ_i` sends `x_i ↦ x_i x_{i+1} x_i^{-1}` and `x_{i+1} ↦ x_i`. The action is
    /// faithful, so equal images mean equal braids. Image length can grow
    /// exponentially with the word length.
    pub fn artin_images(&self) -> Vec<Vec<i32>> {
        fn reduce(word: Vec<i32>) -> Vec<i32> {
            let mut out: Vec<i32> = Vec::with_capacity(word.len());
            for x in word {
                if out.last() == Some(&-x) {
                    out.pop();
                } else {
                    out.push(x);
                }
            }
            out
        }
        fn inv(w: &[i32]) -> Vec<i32> {
            w.iter().rev().map(|x| -x).collect()
        }
        let mut img: Vec<Vec<i32>> = (1..=self.n as i32).map(|i| vec![i]).collect();
        for &e in &self.letters {
            let i = e.unsigned_abs() as usize - 1;
            let (a, b) = (img[i].clone(), img[i + 1].clone());
            if e > 0 {
                img[i] = reduce([a.as_slice(), &b, &inv(&a)].concat());
                img[i + 1] = a;
            } else {
                img[i] = b.clone();
                img[i + 1] = reduce([inv(&b).as_slice(), &a, &b].concat());
            }
        }
        img
    }

    /// True iff both words represent the same element of the braid group.
    pub fn same_braid(&self, other: &BraidWord) -> bool {
        self.n == other.n && self.artin_images() == other.artin_images()
    }

    /// True iff some cyclic rotation of one word is the same braid as the other.
    ///
    /// Weaker than [`BraidWord::cyclic_equal`]: it also accepts words that
    /// differ by braid relations, as different generic projections do.
    pub fn rotation_equivalent(&self, other: &BraidWord) -> bool {
        if self.n != other.n {
            return false;
        }
        let rotations = |w: &BraidWord| -> Vec<BraidWord> {
            let len = w.letters.len().max(1);
            (0..len)
                .map(|r| {
                    let mut l = w.letters.clone();
                    l.rotate_left(r.min(w.letters.len()));
                    BraidWord { n: w.n, letters: l }
                })
                .collect()
        };
        let (mine, theirs) = (self.artin_images(), other.artin_images());
        rotations(self).iter().any(|r| r.artin_images() == theirs)
            || rotations(other).iter().any(|r| r.artin_images() == mine)
    }

    /// Deletes the strands whose *starting* positions are listed in `deleted`.
    ///
    /// A letter is dropped when either of the strands it crosses is deleted;
    /// the surviving letters are re-indexed by the order of the surviving strands.
    pub fn forget_strands(&self, deleted: &[usize]) -> Result<BraidWord> {
        let mut gone = vec![false; self.n];
        for &d in deleted {
            if d == 0 || d > self.n {
                return Err(Error::IndexOutOfRange { index: d, max: self.n });
            }
            gone[d - 1] = true;
        }
        let survivors = gone.iter().filter(|g| !**g).count();
        if survivors == 0 {
            return Err(Error::TooFewStrands { got: 0, min: 1 });
        }
        let mut strand_at: Vec<usize> = (0..self.n).collect();
        let mut letters = Vec::new();
        for &e in &self.letters {
            let p = e.unsigned_abs() as usize - 1;
            let (a, b) = (strand_at[p], strand_at[p + 1]);
            if !gone[a] && !gone[b] {
                let rank = strand_at[..p].iter().filter(|&&s| !gone[s]).count();
                letters.push(e.signum() * (rank as i32 + 1));
            }
            strand_at.swap(p, p + 1);
        }
        BraidWord::new(survivors, letters)
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for e in &self.letters {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{e}")?;
            first = false;
        }
        Ok(())
    }
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self { images: (1..=n).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v == 0 || v > n || seen[v - 1] {
                return Err(Error::InvalidWord(format!("{images:?} is not a permutation")));
            }
            seen[v - 1] = true;
        }
        Ok(Self { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, p: usize) -> usize {
        self.images[p - 1]
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: self.images.iter().map(|&p| other.apply(p)).collect(),
        }
    }

    pub fn pow(&self, r: i64) -> Permutation {
        let base = if r < 0 { self.inverse() } else { self.clone() };
        let mut out = Permutation::identity(self.len());
        for _ in 0..r.unsigned_abs() {
            out = out.then(&base);
        }
        out
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.len()];
        for (i, &p) in self.images.iter().enumerate() {
            images[p - 1] = i + 1;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &p)| p == i + 1)
    }

    pub fn cycles(&self) -> Vec<Component> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 1..=n {
            if seen[start - 1] {
                continue;
            }
            let mut strands = Vec::new();
            let mut p = start;
            while !seen[p - 1] {
                seen[p - 1] = true;
                strands.push(p);
                p = self.apply(p);
            }
            out.push(Component { strands });
        }
        out
    }
}

/// Sign carried by `σ_i` in an alternating word: `(-1)^{i+1}`.
pub fn alternating_sign(i: usize) -> i32 {
    if i % 2 == 1 {
        1
    } else {
        -1
    }
}

fn alt(i: usize) -> i32 {
    alternating_sign(i) * i as i32
}

/// The positive half twist `Δ_n = (σ_1…σ_{n-1})(σ_1…σ_{n-2})…(σ_1σ_2)σ_1`.
pub fn half_twist(n: usize) -> Result<BraidWord> {
    if n < 2 {
        return Err(Error::TooFewStrands { got: n, min: 2 });
    }
    let mut letters = Vec::with_capacity(n * (n - 1) / 2);
    for top in (1..n).rev() {
        letters.extend(1..=top as i32);
    }
    BraidWord::new(n, letters)
}

/// `Δ_n^{2k}`.
pub fn full_twist(n: usize, k: i64) -> Result<BraidWord> {
    Ok(half_twist(n)?.power(2 * k))
}

/// The braid `B'` on `2n` strands: the first added strand (starting at
/// position `n + 1`) is threaded through `w` so that every letter carries its
/// alternating sign.
///
/// A letter `σ_i^{(-1)^{i+1}}` is kept. A letter `σ_i^{(-1)^i}` becomes: the
/// added strand walks left from position `n + 1` to position `i`, the crossing
/// is performed one slot to the right as `σ_{i+1}^{(-1)^i}`, and the added
/// strand walks back to `n + 1`. All walking letters carry alternating signs.
pub fn thread_alternating(w: &BraidWord) -> BraidWord {
    let n = w.n;
    let mut letters = Vec::new();
    for &e in &w.letters {
        let i = e.unsigned_abs() as usize;
        if e.signum() == alternating_sign(i) {
            letters.push(e);
            continue;
        }
        letters.extend((i..=n).rev().map(alt));
        letters.push(e.signum() * (i as i32 + 1));
        letters.extend((i..=n).map(alt));
    }
    BraidWord { n: 2 * n, letters }
}

/// The alternating block `∏_{k=1}^{n} ∏_{j=1}^{n} σ_{n+k-j}^{(-1)^{n+k-j+1}}`
/// on `2n` strands. It exchanges the left and right halves.
pub fn exchange_block(n: usize) -> BraidWord {
    let mut letters = Vec::with_capacity(n * n);
    for k in 1..=n {
        for j in 1..=n {
            letters.push(alt(n + k - j));
        }
    }
    BraidWord { n: 2 * n, letters }
}

/// The alternating, homogeneous braid `B''` on `2n` strands built from `w`.
pub fn homogenize(w: &BraidWord) -> BraidWord {
    let threaded = thread_alternating(w);
    let block = exchange_block(w.n);
    let mut letters = threaded.letters;
    letters.extend(block.letters);
    BraidWord { n: 2 * w.n, letters }
}

/// Outcome of checking the homogenization statements for one word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomogenizationCheck {
    pub word: String,
    pub strands: usize,
    pub homogenized: String,
    pub alternating: bool,
    pub homogeneous: bool,
    /// Forgetting the added strands of the threaded braid leaves the word.
    pub threaded_keeps_word: bool,
    /// Forgetting the original strands of the threaded braid leaves nothing.
    pub threaded_drops_word: bool,
    /// The square permutes each half like the word does.
    pub square_permutation: bool,
    /// Forgetting either half of the square leaves the word.
    pub square_forgets_to_word: bool,
}

impl HomogenizationCheck {
    pub fn passed(&self) -> bool {
        self.alternating
            && self.homogeneous
            && self.threaded_keeps_word
            && self.threaded_drops_word
            && self.square_permutation
            && self.square_forgets_to_word
    }
}

/// Verifies the sublink construction on `w`.
pub fn check_homogenization(w: &BraidWord) -> Result<HomogenizationCheck> {
    let n = w.n;
    let low: Vec<usize> = (1..=n).collect();
    let high: Vec<usize> = (n + 1..=2 * n).collect();
    let threaded = thread_alternating(w);
    let h = homogenize(w);
    let square = h.power(2);
    let pw = w.permutation();
    let ps = square.permutation();
    let square_permutation = (1..=2 * n).all(|j| ps.apply(j) == if j <= n { pw.apply(j) } else { n + pw.apply(j - n) });
    Ok(HomogenizationCheck {
        word: w.to_string(),
        strands: n,
        homogenized: h.to_string(),
        alternating: h.is_alternating(),
        homogeneous: h.is_homogeneous(),
        threaded_keeps_word: threaded.forget_strands(&high)? == *w,
        threaded_drops_word: threaded.forget_strands(&low)?.is_empty(),
        square_permutation,
        square_forgets_to_word: square.forget_strands(&low)?.same_braid(w) && square.forget_strands(&high)?.same_braid(w),
    })
}

/// A uniformly random word with `2..=max_strands` strands and at most `max_len` letters.
pub fn random_word<R: Rng>(rng: &mut R, max_strands: usize, max_len: usize) -> BraidWord {
    let n = rng.gen_range(2..=max_strands.max(2));
    let len = rng.gen_range(0..=max_len);
    let letters = (0..len)
        .map(|_| {
            let i = rng.gen_range(1..n) as i32;
            if rng.gen_bool(0.5) {
                i
            } else {
                -i
            }
        })
        .collect();
    BraidWord { n, letters }
}

/// `(⌈(k_- + 1)/n⌉, ⌈(k_+ + 1)/n⌉)`: the numbers of positive resp. negative
/// full twists after which the braid closes to a fibered link.
pub fn twist_bound(w: &BraidWord) -> (u64, u64) {
    let (plus, minus) = w.crossing_counts();
    let n = w.n as u64;
    ((minus as u64 + 1).div_ceil(n), (plus as u64 + 1).div_ceil(n))
}

/// `Y_1 = σ_1^2`, `Y_i = σ_i^{-1}…σ_2^{-1} σ_1^2 σ_2…σ_i`.
pub fn y_word(i: usize, n: usize) -> Result<BraidWord> {
    if i == 0 || i >= n {
        return Err(Error::IndexOutOfRange { index: i, max: n.saturating_sub(1) });
    }
    let mut letters: Vec<i32> = (2..=i as i32).rev().map(|k| -k).collect();
    letters.extend([1, 1]);
    letters.extend(2..=i as i32);
    BraidWord::new(n, letters)
}

/// Additive offset used for even `i` in [`x_word`] when none is given:
/// `⌊(n - 1)/2⌋`.
pub fn default_x_offset(n: usize) -> usize {
    n.saturating_sub(1) / 2
}

/// Index of the `Y` word that `X_i` stands for.
pub fn x_index(i: usize, n: usize, offset: Option<usize>) -> Result<usize> {
    if i == 0 || i >= n {
        return Err(Error::IndexOutOfRange { index: i, max: n.saturating_sub(1) });
    }
    let y = if i % 2 == 1 {
        i.div_ceil(2)
    } else {
        i / 2 + offset.unwrap_or_else(|| default_x_offset(n))
    };
    if y >= n {
        return Err(Error::IndexOutOfRange { index: y, max: n - 1 });
    }
    Ok(y)
}

/// `X_i`: `Y_{(i+1)/2}` for odd `i`, `Y_{i/2 + offset}` for even `i`.
pub fn x_word(i: usize, n: usize, offset: Option<usize>) -> Result<BraidWord> {
    y_word(x_index(i, n, offset)?, n)
}
