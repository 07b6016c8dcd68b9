//! Functions sampled on unit-step lattices `{base, base+1, …}`.

use std::io::{Read, Write};

use num_traits::{One, Signed};

use crate::numerics::{as_index, int, parse_rational, Scalar};
use crate::{Error, Rational, Result};

/// A function on `{base + j : j = 0..n}` with `n ≥ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn<S> {
    base: Rational,
    values: Vec<S>,
}

impl<S: Scalar> GridFn<S> {
    pub fn from_samples(base: Rational, values: Vec<S>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyDomain);
        }
        Ok(Self { base, values })
    }

    /// Samples `f(base + j)` for `j = 0..len`.
    pub fn tabulate(base: Rational, len: usize, mut f: impl FnMut(&Rational) -> S) -> Result<Self> {
        let values = (0..len).map(|j| f(&(&base + int(j as i64)))).collect();
        Self::from_samples(base, values)
    }

    pub fn base(&self) -> &Rational {
        &self.base
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The point of index `j`.
    pub fn point(&self, j: usize) -> Rational {
        &self.base + int(j as i64)
    }

    /// The rightmost grid point.
    pub fn last_point(&self) -> Rational {
        self.point(self.len() - 1)
    }

    pub fn points(&self) -> impl Iterator<Item = Rational> + '_ {
        (0..self.len()).map(|j| self.point(j))
    }

    /// Index of `t`, checking that it lies on this grid.
    pub fn index_of(&self, t: &Rational) -> Result<usize> {
        let offset = t - &self.base;
        if !offset.denom().is_one() {
            return Err(Error::OffGrid(format!("{t} (grid base {})", self.base)));
        }
        match as_index(&offset) {
            Some(j) if j < self.len() => Ok(j),
            _ => Err(Error::OutOfRange(format!(
                "{t} (grid covers {}..={})",
                self.base,
                self.last_point()
            ))),
        }
    }

    pub fn eval(&self, t: &Rational) -> Result<S> {
        Ok(self.values[self.index_of(t)?].clone())
    }

    pub fn get(&self, j: usize) -> Option<&S> {
        self.values.get(j)
    }

    /// Copy of the window `[from, to]`.
    pub fn restrict(&self, from: &Rational, to: &Rational) -> Result<Self> {
        if to < from {
            return Err(Error::EmptyDomain);
        }
        let i = self.index_of(from)?;
        let j = self.index_of(to)?;
        Self::from_samples(from.clone(), self.values[i..=j].to_vec())
    }

    pub fn map<T: Scalar>(&self, f: impl FnMut(&S) -> T) -> GridFn<T> {
        GridFn { base: self.base.clone(), values: self.values.iter().map(f).collect() }
    }

    /// `α f + β g` on grids with the same domain.
    pub fn linear_combination(&self, alpha: &S, other: &Self, beta: &S) -> Result<Self> {
        if self.base != other.base || self.len() != other.len() {
            return Err(Error::Domain("linear combination of grids with different domains".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(f, g)| alpha.clone() * f.clone() + beta.clone() * g.clone())
            .collect();
        Self::from_samples(self.base.clone(), values)
    }

    /// Largest `|value|`, or zero.
    pub fn max_abs(&self) -> S {
        self.values.iter().map(|v| v.abs()).fold(S::zero(), |m, v| if v > m { v } else { m })
    }

    /// Writes the `t,value` CSV form.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "value"]).map_err(csv_err)?;
        for (j, v) in self.values.iter().enumerate() {
            w.write_record([self.point(j).to_string(), v.to_text()]).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the `t,value` CSV form. Points must be consecutive on a unit
    /// lattice.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let headers = r.headers().map_err(csv_err)?.clone();
        if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "value" {
            return Err(Error::Parse(format!(
                "expected header `t,value`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut base: Option<Rational> = None;
        let mut values = Vec::new();
        for (row, record) in r.records().enumerate() {
            let record = record.map_err(csv_err)?;
            let t = parse_rational(&record[0])?;
            let expected = base.as_ref().map(|b| b + int(row as i64));
            match expected {
                None => base = Some(t),
                Some(e) if e == t => {}
                Some(e) => {
                    return Err(Error::Parse(format!(
                        "row {}: expected t = {e}, found {t}",
                        row + 2
                    )))
                }
            }
            values.push(S::parse_value(&record[1])?);
        }
        let base = base.ok_or(Error::EmptyDomain)?;
        Self::from_samples(base, values)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// The discrete interval `[a, b] = {a, a+1, …, b}` with `0 ≤ a < b` integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiscreteInterval {
    a: u64,
    b: u64,
}

impl DiscreteInterval {
    pub fn new(a: u64, b: u64) -> Result<Self> {
        if a >= b {
            return Err(Error::Domain(format!("discrete interval needs a < b, got [{a}, {b}]")));
        }
        Ok(Self { a, b })
    }

    /// From rationals, which must be nonnegative integers.
    pub fn from_rationals(a: &Rational, b: &Rational) -> Result<Self> {
        let conv = |q: &Rational| {
            if q.is_negative() || !q.denom().is_one() {
                Err(Error::Domain(format!("{q} is not in {{0, 1, 2, …}}")))
            } else {
                as_index(q).map(|n| n as u64).ok_or_else(|| Error::Domain(format!("{q} too large")))
            }
        };
        Self::new(conv(a)?, conv(b)?)
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn len(&self) -> usize {
        (self.b - self.a + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, t: &Rational) -> bool {
        t.denom().is_one() && !t.is_negative() && *t >= int(self.a as i64) && *t <= int(self.b as i64)
    }

    pub fn points(&self) -> impl Iterator<Item = Rational> {
        (self.a..=self.b).map(|t| int(t as i64))
    }
}

/// Left-to-right sum; an empty range sums to zero.
pub(crate) fn sum<S: Scalar>(terms: impl Iterator<Item = S>) -> S {
    terms.fold(S::zero(), |acc, x| acc + x)
}
