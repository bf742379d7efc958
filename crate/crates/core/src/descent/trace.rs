use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub epoch: usize,
    pub objective: f64,
    pub alpha: f64,
    pub beta: f64,
    pub cd_l1: Option<f64>,
    pub dcd: Option<f64>,
    pub emd: Option<f64>,
    /// Largest per-point gradient norm.
    pub grad_max: f64,
    /// Some nearest-neighbor assignment changed since the previous step.
    pub switched: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub rows: Vec<TraceRow>,
}

impl OptimizationTrace {
    pub const CSV_HEADER: &'static str = "epoch,objective,alpha,beta,cd_l1,dcd,emd,grad_max";

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.epoch,
                r.objective,
                r.alpha,
                r.beta,
                opt(r.cd_l1),
                opt(r.dcd),
                opt(r.emd),
                r.grad_max
            )
            .unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rows() {
        let t = OptimizationTrace {
            rows: vec![TraceRow {
                epoch: 3,
                objective: 0.5,
                alpha: 1.0,
                beta: 2.0,
                cd_l1: Some(0.25),
                dcd: None,
                emd: Some(0.125),
                grad_max: 1.5,
                switched: false,
            }],
        };
        assert_eq!(t.to_csv(), "epoch,objective,alpha,beta,cd_l1,dcd,emd,grad_max\n3,0.5,1,2,0.25,,0.125,1.5\n");
    }
}
