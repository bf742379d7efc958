use serde::{Deserialize, Serialize};

/// A bundle of evaluation metrics; absent entries were not requested or not applicable.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub cd_l1: Option<f64>,
    pub cd_l2: Option<f64>,
    pub dcd: Option<f64>,
    pub emd: Option<f64>,
    pub fscore: Option<f64>,
    pub hausdorff: Option<f64>,
    pub p2f: Option<f64>,
    pub fidelity: Option<f64>,
}

impl MetricReport {
    pub const COLUMNS: [&'static str; 8] =
        ["cd_l1", "cd_l2", "dcd", "emd", "fscore", "hausdorff", "p2f", "fidelity"];

    pub fn values(&self) -> [Option<f64>; 8] {
        [
            self.cd_l1,
            self.cd_l2,
            self.dcd,
            self.emd,
            self.fscore,
            self.hausdorff,
            self.p2f,
            self.fidelity,
        ]
    }

    pub fn csv_header() -> String {
        Self::COLUMNS.join(",")
    }

    /// One CSV row in [`Self::COLUMNS`] order; absent metrics are empty fields.
    pub fn csv_row(&self) -> String {
        self.values()
            .iter()
            .map(|v| v.map(|x| x.to_string()).unwrap_or_default())
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let r = MetricReport { cd_l1: Some(1.25), fscore: Some(0.5), ..Default::default() };
        assert_eq!(MetricReport::csv_header(), "cd_l1,cd_l2,dcd,emd,fscore,hausdorff,p2f,fidelity");
        assert_eq!(r.csv_row(), "1.25,,,,0.5,,,");
    }
}
