//! Serde adapters writing complex numbers as `{"re": .., "im": ..}`.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize, Clone, Copy)]
pub(crate) struct Cx {
    re: f64,
    im: f64,
}

impl From<Complex64> for Cx {
    fn from(c: Complex64) -> Self {
        Cx { re: c.re, im: c.im }
    }
}

impl From<Cx> for Complex64 {
    fn from(c: Cx) -> Self {
        Complex64::new(c.re, c.im)
    }
}

pub(crate) mod opt {
    use super::*;

    pub fn serialize<S: Serializer>(c: &Option<Complex64>, s: S) -> Result<S::Ok, S::Error> {
        c.map(Cx::from).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Complex64>, D::Error> {
        Ok(Option::<Cx>::deserialize(d)?.map(Into::into))
    }
}

pub(crate) mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|c| Cx::from(*c)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        Ok(Vec::<Cx>::deserialize(d)?
            .into_iter()
            .map(Into::into)
            .collect())
    }
}

pub(crate) mod opt_pair {
    use super::*;

    pub fn serialize<S: Serializer>(
        p: &Option<(Complex64, Complex64)>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        p.map(|(a, b)| [Cx::from(a), Cx::from(b)]).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<Option<(Complex64, Complex64)>, D::Error> {
        Ok(Option::<[Cx; 2]>::deserialize(d)?.map(|[a, b]| (a.into(), b.into())))
    }
}
