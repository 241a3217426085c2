//! CSV emission. Numbers are written with 17 significant digits so that a
//! trajectory read back is bit-identical.

use std::fs;
use std::path::Path;

use super::HarnessError;
use crate::linalg::norm_sqr;
use crate::propagator::Trajectory;

pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// `t,P1,P2[,P3],norm,reC1,imC1,...`
pub fn trajectory_header(n: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend((1..=n).map(|i| format!("P{i}")));
    h.push("norm".into());
    for i in 1..=n {
        h.push(format!("reC{i}"));
        h.push(format!("imC{i}"));
    }
    h
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, HarnessError> {
    let bytes = w.into_inner().map_err(|e| HarnessError::Csv(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is ASCII"))
}

pub fn trajectory_csv<const N: usize>(tr: &Trajectory<N>) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(trajectory_header(N)).map_err(HarnessError::from)?;
    for (t, psi) in tr.times.iter().zip(&tr.states) {
        let mut row = vec![fmt(*t)];
        row.extend(psi.iter().map(|c| fmt(c.norm_sqr())));
        row.push(fmt(norm_sqr(psi).sqrt()));
        for c in psi {
            row.push(fmt(c.re));
            row.push(fmt(c.im));
        }
        w.write_record(&row)?;
    }
    finish(w)
}

/// `axis1,axis2,fidelity`, one row per cell, `axis1` outermost.
pub fn scan_csv(axis1: &[f64], axis2: &[f64], fidelity: &[f64]) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["axis1", "axis2", "fidelity"])?;
    for (i, a) in axis1.iter().enumerate() {
        for (j, b) in axis2.iter().enumerate() {
            w.write_record([fmt(*a), fmt(*b), fmt(fidelity[i * axis2.len() + j])])?;
        }
    }
    finish(w)
}

/// Arbitrary named columns of equal length.
pub fn columns_csv(names: &[&str], columns: &[Vec<f64>]) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(names)?;
    let rows = columns.first().map_or(0, Vec::len);
    for r in 0..rows {
        w.write_record(columns.iter().map(|c| fmt(c[r])))?;
    }
    finish(w)
}

pub fn write(path: &Path, contents: &str) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    #[test]
    fn headers() {
        assert_eq!(trajectory_header(2).join(","), "t,P1,P2,norm,reC1,imC1,reC2,imC2");
        assert_eq!(
            trajectory_header(3).join(","),
            "t,P1,P2,P3,norm,reC1,imC1,reC2,imC2,reC3,imC3"
        );
    }

    #[test]
    fn values_survive_a_text_round_trip() {
        let x = std::f64::consts::PI * 1e-9;
        assert_eq!(fmt(x).parse::<f64>().unwrap(), x);
        let tr = Trajectory {
            times: vec![0.0, 0.5],
            states: vec![
                [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
                [C64::new(0.6, 0.1), C64::new(-0.3, 0.7)],
            ],
            steps: 1,
            min_norm: 1.0,
        };
        let text = trajectory_csv(&tr).unwrap();
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
        assert_eq!(rows.len(), 2);
        let p2: f64 = rows[1][2].parse().unwrap();
        assert_eq!(p2, C64::new(-0.3, 0.7).norm_sqr());
        let im2: f64 = rows[1][7].parse().unwrap();
        assert_eq!(im2, 0.7);
    }

    #[test]
    fn scan_layout() {
        let text = scan_csv(&[1.0, 2.0], &[3.0, 4.0, 5.0], &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6]).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "axis1,axis2,fidelity");
        assert_eq!(lines.len(), 7);
        assert!(lines[4].starts_with("2.0000000000000000e0,3.0000000000000000e0,"));
    }
}
