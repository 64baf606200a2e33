//! CSV serialization of atom lists.
//!
//! Scalar measures use the header `point,weight`, vector measures
//! `p1,...,pd,weight` and finite-alphabet measures `label,weight`.

use std::io::{Read, Write};

use super::atomic::{AtomicMeasure, Support};
use super::point::{Point, SpaceTag};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "NA".to_string()
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_atoms_csv<T: Scalar, W: Write>(measure: &AtomicMeasure<T>, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    match measure.support() {
        Support::Labels(ls) => {
            wtr.write_record(["label", "weight"]).map_err(csv_err)?;
            for (l, w) in ls.iter().zip(measure.weights()) {
                wtr.write_record([l.to_string(), fmt_f64(w.to_f64_lossy())])
                    .map_err(csv_err)?;
            }
        }
        Support::Scalars(xs) => {
            wtr.write_record(["point", "weight"]).map_err(csv_err)?;
            for (x, w) in xs.iter().zip(measure.weights()) {
                wtr.write_record([fmt_f64(x.to_f64_lossy()), fmt_f64(w.to_f64_lossy())])
                    .map_err(csv_err)?;
            }
        }
        Support::Vectors { dim, coords } => {
            let mut header: Vec<String> = (1..=*dim).map(|i| format!("p{i}")).collect();
            header.push("weight".into());
            wtr.write_record(&header).map_err(csv_err)?;
            for (i, w) in measure.weights().iter().enumerate() {
                let mut rec: Vec<String> = coords[i * dim..(i + 1) * dim]
                    .iter()
                    .map(|c| fmt_f64(c.to_f64_lossy()))
                    .collect();
                rec.push(fmt_f64(w.to_f64_lossy()));
                wtr.write_record(&rec).map_err(csv_err)?;
            }
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Reads an atom list; `alphabet_size` overrides the inferred `k` for label
/// files.
pub fn read_atoms_csv<T: Scalar, R: Read>(input: R, alphabet_size: Option<usize>) -> Result<AtomicMeasure<T>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(|s| s.trim().to_string())
        .collect();
    let parse = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|e| Error::InvalidMeasure(format!("cannot parse {s:?}: {e}")))
    };
    if header.last().map(String::as_str) != Some("weight") {
        return Err(Error::InvalidMeasure(format!("unexpected header {header:?}")));
    }
    let mut atoms = Vec::new();
    let space = match header.first().map(String::as_str) {
        Some("label") if header.len() == 2 => {
            let mut kmax = 0;
            for rec in rdr.records() {
                let rec = rec.map_err(csv_err)?;
                let l: usize = rec[0]
                    .trim()
                    .parse()
                    .map_err(|e| Error::InvalidMeasure(format!("bad label {:?}: {e}", &rec[0])))?;
                kmax = kmax.max(l + 1);
                atoms.push((Point::Label(l), T::of(parse(&rec[1])?)));
            }
            SpaceTag::FiniteAlphabet {
                k: alphabet_size.unwrap_or(kmax),
            }
        }
        Some("point") if header.len() == 2 => {
            for rec in rdr.records() {
                let rec = rec.map_err(csv_err)?;
                atoms.push((Point::Scalar(T::of(parse(&rec[0])?)), T::of(parse(&rec[1])?)));
            }
            SpaceTag::RealLine
        }
        Some(_) => {
            let d = header.len() - 1;
            for (i, h) in header[..d].iter().enumerate() {
                if *h != format!("p{}", i + 1) {
                    return Err(Error::InvalidMeasure(format!("unexpected column {h:?}")));
                }
            }
            for rec in rdr.records() {
                let rec = rec.map_err(csv_err)?;
                let v = (0..d).map(|i| parse(&rec[i]).map(T::of)).collect::<Result<Vec<T>>>()?;
                atoms.push((Point::Vector(v), T::of(parse(&rec[d])?)));
            }
            SpaceTag::Euclidean { d }
        }
        None => return Err(Error::InvalidMeasure("empty header".into())),
    };
    AtomicMeasure::new(space, atoms)
}
