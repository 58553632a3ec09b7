//! JSON encodings: complex numbers are `[re, im]` pairs, matrices are lists of rows.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::types::{CMat, CVec, Ket, UnitaryOp, C64};

pub fn matrix_to_rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMat, String> {
    let n = rows.len();
    let m = rows.first().map(Vec::len).unwrap_or(0);
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != m) {
        return Err(format!("matrix row {i} has {} entries, expected {m}", r.len()));
    }
    Ok(CMat::from_fn(n, m, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

pub fn vector_to_pairs(v: &CVec) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn vector_from_pairs(p: &[[f64; 2]]) -> CVec {
    CVec::from_iterator(p.len(), p.iter().map(|z| C64::new(z[0], z[1])))
}

pub mod matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &CMat, s: S) -> Result<S::Ok, S::Error> {
        matrix_to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMat, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        matrix_from_rows(&rows).map_err(D::Error::custom)
    }
}

pub mod unitary {
    use super::*;

    pub fn serialize<S: Serializer>(u: &UnitaryOp, s: S) -> Result<S::Ok, S::Error> {
        matrix_to_rows(u.matrix()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<UnitaryOp, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        let m = matrix_from_rows(&rows).map_err(D::Error::custom)?;
        UnitaryOp::new(m).map_err(D::Error::custom)
    }
}

pub mod ket {
    use super::*;

    pub fn serialize<S: Serializer>(k: &Ket, s: S) -> Result<S::Ok, S::Error> {
        vector_to_pairs(k.amplitudes()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ket, D::Error> {
        let p = Vec::<[f64; 2]>::deserialize(d)?;
        Ket::new(vector_from_pairs(&p)).map_err(D::Error::custom)
    }
}

pub mod kets {
    use super::*;

    pub fn serialize<S: Serializer>(ks: &[Ket], s: S) -> Result<S::Ok, S::Error> {
        ks.iter()
            .map(|k| vector_to_pairs(k.amplitudes()))
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Ket>, D::Error> {
        let ps = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        ps.iter()
            .map(|p| Ket::new(vector_from_pairs(p)).map_err(D::Error::custom))
            .collect()
    }
}
