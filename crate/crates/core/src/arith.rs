//! Residue-modulus pairs, validated instances, and Chinese remaindering.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::int::{self, Int};

/// A normalized fraction: positive denominator, coprime parts.
pub type Rational<T> = Ratio<T>;

/// Builds the normalized form of `num / den`.
pub fn rational<T: Int>(num: T, den: T) -> Result<Rational<T>> {
    if den.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(Ratio::new(num, den))
}

/// One residue `x mod m`, stored as the least nonnegative representative.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResiduePair<T> {
    residue: T,
    modulus: T,
}

impl<T: Int> ResiduePair<T> {
    /// Accepts any integer residue and reduces it into `[0, modulus)`.
    pub fn new(residue: T, modulus: T) -> Result<Self> {
        let two = T::one() + T::one();
        if modulus < two {
            return Err(Error::InvalidModulus(modulus.to_string()));
        }
        Ok(Self { residue: residue.mod_floor(&modulus), modulus })
    }

    pub fn residue(&self) -> &T {
        &self.residue
    }

    pub fn modulus(&self) -> &T {
        &self.modulus
    }

    /// True when `den * residue == num (mod modulus)`.
    pub fn is_good_for(&self, r: &Rational<T>) -> Result<bool> {
        let m = &self.modulus;
        let q = r.denom().mod_floor(m);
        let p = r.numer().mod_floor(m);
        let lhs = int::mul(&q, &self.residue)?;
        Ok(int::sub(&lhs, &p)?.mod_floor(m).is_zero())
    }
}

/// Numerator bound `P`, denominator bound `Q` and the allowed number of bad
/// pairs `e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds<T> {
    pub num_bound: T,
    pub den_bound: T,
    pub max_bad: usize,
}

impl<T: Int> Bounds<T> {
    pub fn new(num_bound: T, den_bound: T, max_bad: usize) -> Result<Self> {
        if num_bound < T::one() || den_bound < T::one() {
            return Err(Error::InvalidArgument(
                "numerator and denominator bounds must be at least 1".into(),
            ));
        }
        Ok(Self { num_bound, den_bound, max_bad })
    }

    /// Whether `r` lies within the numerator and denominator bounds.
    pub fn admits(&self, r: &Rational<T>) -> bool {
        r.numer().abs() <= self.num_bound && *r.denom() <= self.den_bound
    }
}

/// Pairwise coprime residue-modulus pairs sorted by increasing modulus,
/// together with their CRT combination `X mod M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance<T> {
    pairs: Vec<ResiduePair<T>>,
    // input_position[i] is where the i-th sorted pair appeared in the input
    input_position: Vec<usize>,
    modulus: T,
    residue: T,
}

/// Combines `X mod M` with `x mod m` for coprime `M`, `m`.
fn crt_step<T: Int>(big_x: &T, big_m: &T, x: &T, m: &T) -> Result<T> {
    let inv = int::inv_mod(&big_m.mod_floor(m), m).ok_or_else(|| {
        Error::DuplicateOrNonCoprimeModuli { first: big_m.to_string(), second: m.to_string() }
    })?;
    let diff = int::sub(x, &big_x.mod_floor(m))?;
    let t = int::mul(&diff.mod_floor(m), &inv)?.mod_floor(m);
    int::add(big_x, &int::mul(big_m, &t)?)
}

impl<T: Int> Instance<T> {
    /// Sorts the pairs, checks pairwise coprimality and folds them into a
    /// single residue `0 <= X < M`.
    pub fn new(pairs: impl IntoIterator<Item = ResiduePair<T>>) -> Result<Self> {
        let mut tagged: Vec<(usize, ResiduePair<T>)> = pairs.into_iter().enumerate().collect();
        if tagged.is_empty() {
            return Err(Error::EmptyInput);
        }
        tagged.sort_by(|a, b| a.1.modulus.cmp(&b.1.modulus));
        let mut inst = Instance {
            pairs: Vec::with_capacity(tagged.len()),
            input_position: Vec::with_capacity(tagged.len()),
            modulus: T::one(),
            residue: T::zero(),
        };
        for (pos, pair) in tagged {
            inst.absorb(pos, pair)?;
        }
        Ok(inst)
    }

    /// Adds one more pair, keeping the moduli sorted. The new pair's input
    /// position is the current length.
    pub fn extended(mut self, pair: ResiduePair<T>) -> Result<Self> {
        let pos = self.pairs.len();
        self.absorb(pos, pair)?;
        Ok(self)
    }

    fn absorb(&mut self, pos: usize, pair: ResiduePair<T>) -> Result<()> {
        let g = self.modulus.mod_floor(&pair.modulus).gcd(&pair.modulus);
        if !g.is_one() {
            let clash = self
                .pairs
                .iter()
                .find(|p| !p.modulus.gcd(&pair.modulus).is_one())
                .map(|p| p.modulus.to_string())
                .unwrap_or_else(|| self.modulus.to_string());
            return Err(Error::DuplicateOrNonCoprimeModuli {
                first: clash,
                second: pair.modulus.to_string(),
            });
        }
        self.residue = crt_step(&self.residue, &self.modulus, &pair.residue, &pair.modulus)?;
        self.modulus = int::mul(&self.modulus, &pair.modulus)?;
        let at = self.pairs.partition_point(|p| p.modulus < pair.modulus);
        self.pairs.insert(at, pair);
        self.input_position.insert(at, pos);
        Ok(())
    }

    pub fn pairs(&self) -> &[ResiduePair<T>] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Combined modulus `M`.
    pub fn modulus(&self) -> &T {
        &self.modulus
    }

    /// Combined residue `X` with `0 <= X < M`.
    pub fn residue(&self) -> &T {
        &self.residue
    }

    /// Position in the original input of the pair at sorted index `i`.
    pub fn input_position(&self, i: usize) -> usize {
        self.input_position[i]
    }

    /// Product of the `e` largest moduli; 1 for `e = 0`.
    pub fn largest_moduli_product(&self, e: usize) -> Result<T> {
        let mut acc = T::one();
        for p in self.pairs.iter().rev().take(e) {
            acc = int::mul(&acc, &p.modulus)?;
        }
        Ok(acc)
    }

    /// Number of pairs whose residue is zero.
    pub fn zero_residues(&self) -> usize {
        self.pairs.iter().filter(|p| p.residue.is_zero()).count()
    }
}

/// Images of `r` modulo each of `moduli`.
pub fn residues_of<T: Int>(r: &Rational<T>, moduli: &[T]) -> Result<Vec<ResiduePair<T>>> {
    moduli
        .iter()
        .enumerate()
        .map(|(index, m)| {
            let inv = int::inv_mod(r.denom(), m).ok_or(Error::NonInvertibleDenominator { index })?;
            let x = int::mul(&r.numer().mod_floor(m), &inv)?;
            ResiduePair::new(x, m.clone())
        })
        .collect()
}

/// Sorted-order indices of the pairs that are bad for `r`.
pub fn count_bad<T: Int>(r: &Rational<T>, inst: &Instance<T>) -> Result<Vec<usize>> {
    let mut bad = Vec::new();
    for (i, pair) in inst.pairs.iter().enumerate() {
        if !pair.is_good_for(r)? {
            bad.push(i);
        }
    }
    Ok(bad)
}
