//! Text grammar for model descriptions, e.g. `poisson:lambda=100` or
//! `twopoint:x0=-1,x1=1,p=0.5`.

use super::{IndexModel, SummandModel};
use crate::error::{Error, Result};
use crate::pmf::{read_pmf_csv, DiscretePmf};
use std::collections::BTreeMap;
use std::str::FromStr;

struct Params<'a> {
    family: &'a str,
    values: BTreeMap<&'a str, &'a str>,
}

impl<'a> Params<'a> {
    fn parse(spec: &'a str) -> Result<Self> {
        let (family, rest) =
            spec.split_once(':').ok_or_else(|| Error::Parse(format!("`{spec}`: expected `family:key=value,...`")))?;
        let mut values = BTreeMap::new();
        let mut rest = rest.trim();
        while !rest.is_empty() {
            // `base=` swallows the remainder so nested specs keep their commas
            if let Some(inner) = rest.strip_prefix("base=") {
                values.insert("base", inner);
                break;
            }
            let (item, tail) = match rest.split_once(',') {
                Some((i, t)) => (i, t),
                None => (rest, ""),
            };
            let (k, v) =
                item.split_once('=').ok_or_else(|| Error::Parse(format!("`{spec}`: `{item}` is not key=value")))?;
            if values.insert(k.trim(), v.trim()).is_some() {
                return Err(Error::Parse(format!("`{spec}`: duplicate key `{k}`")));
            }
            rest = tail.trim();
        }
        Ok(Self { family: family.trim(), values })
    }

    fn take<T: FromStr>(&mut self, key: &str) -> Result<T> {
        let raw = self.values.remove(key).ok_or_else(|| Error::Parse(format!("`{}` needs `{key}=`", self.family)))?;
        raw.parse::<T>().map_err(|_| Error::Parse(format!("`{}`: bad value `{raw}` for `{key}`", self.family)))
    }

    fn finish(self) -> Result<()> {
        match self.values.keys().next() {
            Some(k) => Err(Error::Parse(format!("`{}`: unknown key `{k}`", self.family))),
            None => Ok(()),
        }
    }
}

fn load_pmf(rest: &str) -> Result<DiscretePmf> {
    let path = rest.strip_prefix('@').ok_or_else(|| Error::Parse("pmf spec must be `pmf:@file.csv`".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
    read_pmf_csv(&text)
}

/// Parses an index description.
pub fn parse_index(spec: &str) -> Result<IndexModel> {
    let spec = spec.trim();
    if let Some(rest) = spec.strip_prefix("pmf:") {
        return IndexModel::finite(load_pmf(rest)?);
    }
    let mut p = Params::parse(spec)?;
    let model = match p.family {
        "dirac" => IndexModel::dirac(p.take("n")?),
        "poisson" => IndexModel::poisson(p.take("lambda")?),
        "binomial" | "bin" => {
            let n = p.take("n")?;
            IndexModel::binomial(n, p.take("p")?)
        }
        "hyper" | "hypergeometric" => {
            let n = p.take("n")?;
            let r = p.take("r")?;
            IndexModel::hypergeometric(n, r, p.take("s")?)
        }
        "negbin" => {
            let r = p.take("r")?;
            IndexModel::negative_binomial(r, p.take("q")?)
        }
        "conv" => {
            let copies = p.take("copies")?;
            let base: String = p.take("base")?;
            IndexModel::convolution(parse_index(&base)?, copies)
        }
        other => return Err(Error::Parse(format!("unknown index family `{other}`"))),
    };
    p.finish()?;
    model
}

/// Parses a summand description.
pub fn parse_summand(spec: &str) -> Result<SummandModel> {
    let spec = spec.trim();
    if let Some(rest) = spec.strip_prefix("pmf:") {
        return SummandModel::finite(load_pmf(rest)?);
    }
    let mut p = Params::parse(spec)?;
    let model = match p.family {
        "const" | "constant" => SummandModel::constant(p.take("v")?),
        "bern" | "bernoulli" => SummandModel::bernoulli(p.take("p")?),
        "twopoint" => {
            let x0 = p.take("x0")?;
            let x1 = p.take("x1")?;
            SummandModel::two_point(x0, x1, p.take("p")?)
        }
        "exp" | "exponential" => SummandModel::exponential(p.take("rate")?),
        "uniform" => {
            let lo = p.take("lo")?;
            SummandModel::uniform(lo, p.take("hi")?)
        }
        other => return Err(Error::Parse(format!("unknown summand family `{other}`"))),
    };
    p.finish()?;
    model
}
